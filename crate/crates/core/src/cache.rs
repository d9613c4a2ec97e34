//! On-disk text cache of the E″ table: a header line, then `q j p l`
//! per entry.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use crate::error::{LandauError, Result};
use crate::primes::PrimeTable;
use crate::superchampion::{build_e2_table, E2Entry};

const E2_HEADER: &str = "# landau e2 v1";

pub fn e2_path(dir: &Path, ell_limit: u64) -> PathBuf {
    dir.join(format!("e2-{ell_limit}.txt"))
}

pub fn write_e2(path: &Path, entries: &[E2Entry]) -> Result<()> {
    if let Some(parent) = path.parent() {
        fs::create_dir_all(parent)?;
    }
    let tmp = path.with_extension("tmp");
    {
        let mut f = std::io::BufWriter::new(fs::File::create(&tmp)?);
        writeln!(f, "{E2_HEADER}")?;
        for e in entries {
            writeln!(f, "{} {} {} {}", e.q, e.j, e.p, e.l)?;
        }
        f.flush()?;
    }
    fs::rename(tmp, path)?;
    Ok(())
}

pub fn read_e2(path: &Path) -> Result<Vec<E2Entry>> {
    let text = fs::read_to_string(path)?;
    let mut lines = text.lines();
    if lines.next() != Some(E2_HEADER) {
        return Err(LandauError::Parse(format!(
            "{}: stale or foreign E2 cache",
            path.display()
        )));
    }
    let mut out = Vec::new();
    for (i, line) in lines.enumerate() {
        let f: Vec<u64> = line
            .split_whitespace()
            .map(str::parse)
            .collect::<std::result::Result<_, _>>()
            .map_err(|e| LandauError::Parse(format!("{}:{}: {e}", path.display(), i + 2)))?;
        if f.len() != 4 {
            return Err(LandauError::Parse(format!(
                "{}:{}: expected `q j p l`",
                path.display(),
                i + 2
            )));
        }
        out.push(E2Entry {
            q: f[0],
            j: f[1] as u32,
            p: f[2],
            l: f[3],
        });
    }
    if out.is_empty() || out.windows(2).any(|w| w[0].l >= w[1].l) {
        return Err(LandauError::Parse(format!("{}: corrupt E2 cache", path.display())));
    }
    Ok(out)
}

/// Read the table for `ell_limit` from `dir`, or build and store it.
pub fn load_or_build_e2(ell_limit: u64, t: &PrimeTable, dir: &Path) -> Result<Vec<E2Entry>> {
    let path = e2_path(dir, ell_limit);
    if let Ok(e) = read_e2(&path) {
        return Ok(e);
    }
    let e = build_e2_table(ell_limit, t)?;
    if let Err(err) = write_e2(&path, &e) {
        eprintln!("warning: cannot write {}: {err}", path.display());
    }
    Ok(e)
}
