use std::process::Command;

fn landau(args: &[&str]) -> (i32, String, String) {
    let out = Command::new(env!("CARGO_BIN_EXE_landau"))
        .args(args)
        .env_remove("LANDAU_CACHE_DIR")
        .output()
        .unwrap();
    (
        out.status.code().unwrap_or(-1),
        String::from_utf8(out.stdout).unwrap(),
        String::from_utf8(out.stderr).unwrap(),
    )
}

#[test]
fn compute_digits_and_factored() {
    assert_eq!(landau(&["compute", "5", "--format", "digits"]).1.trim(), "6");
    assert_eq!(landau(&["compute", "19", "--format", "digits"]).1.trim(), "420");
    let (code, out, _) = landau(&["compute", "1000000"]);
    assert_eq!(code, 0);
    assert!(out.contains("(43 * 3947 / 3847) * N"), "{out}");
    assert!(out.contains("l(N) = 998093"));
}

#[test]
fn compute_json_and_log_agree() {
    let (_, out, _) = landau(&["compute", "1000000000", "--format", "json"]);
    let v: serde_json::Value = serde_json::from_str(out.trim()).unwrap();
    assert_eq!(v["n"], 1_000_000_000u64);
    assert_eq!(v["ellN"], 999_969_437u64);
    assert_eq!(v["correction_num"], "37 * 150991");
    assert_eq!(v["correction_den"], "2 * 3 * 148399");
    let (_, log, _) = landau(&["compute", "1000000000", "--format", "log"]);
    let a = v["log10_g"].as_str().unwrap();
    assert_eq!(&a[..27], &log.trim()[..27]);
}

#[test]
fn table_and_verify() {
    let (_, out, _) = landau(&["table", "5", "5", "--format", "digits"]);
    assert_eq!(out, "5\t6\n");
    let (_, out, _) = landau(&["table", "31000", "31005"]);
    assert_eq!(out.lines().count(), 6);
    assert!(out.lines().all(|l| l.contains("[17-5")), "{out}");
    let (code, out, _) = landau(&["verify", "2000"]);
    assert_eq!(code, 0);
    assert_eq!(out.trim(), "1994/1994 OK");
}

#[test]
fn gfun_superchampion_prefixes() {
    let (_, out, _) = landau(&["gfun", "103", "22"]);
    assert!(out.starts_with("G(103, 22) = 107 * 113 / (97 * 101)"), "{out}");
    assert!(out.contains("algorithm small"));
    let (_, out, _) = landau(&["superchampion", "--first", "8"]);
    let ells: Vec<&str> = out.lines().map(|l| l.split('\t').nth(2).unwrap()).collect();
    assert_eq!(ells, ["0", "3", "5", "7", "12", "19", "30", "43"]);
    let (_, out, _) = landau(&["prefixes", "998555", "--normalized"]);
    assert!(out.contains("# normalized candidates: 3"), "{out}");
}

#[test]
fn errors_map_to_exit_codes() {
    let (code, _, err) = landau(&["--precision", "12", "compute", "100"]);
    assert_eq!(code, 1);
    assert!(err.contains("precision"));
    let (code, _, _) = landau(&["table", "0", "2000000"]);
    assert_eq!(code, 1);
    let (code, _, _) = landau(&["compute", "1000", "--digit-budget", "1000", "--format", "digits"]);
    assert_eq!(code, 0);
    let (code, _, _) = landau(&["compute", "1000000", "--digit-budget", "1000", "--format", "digits"]);
    assert_eq!(code, 4);
    let (code, _, _) = landau(&["nonsense"]);
    assert_eq!(code, 64);
}

#[test]
fn cache_dir_from_environment() {
    let dir = tempfile::tempdir().unwrap();
    let out = Command::new(env!("CARGO_BIN_EXE_landau"))
        .args(["compute", "100000"])
        .env("LANDAU_CACHE_DIR", dir.path())
        .output()
        .unwrap();
    assert!(out.status.success());
    let names: Vec<String> = std::fs::read_dir(dir.path())
        .unwrap()
        .map(|e| e.unwrap().file_name().to_string_lossy().into_owned())
        .collect();
    assert!(names.iter().any(|n| n.starts_with("e2-")), "{names:?}");
    let again = landau(&["compute", "100000"]).1;
    assert_eq!(String::from_utf8(out.stdout).unwrap(), again);
}
