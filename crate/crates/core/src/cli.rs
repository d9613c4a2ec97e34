//! Command-line front end: argument parsing, configuration and output
//! formatting. The `landau` binary is a thin wrapper around [`run`].

use std::io::Write;
use std::path::PathBuf;
use std::sync::Arc;

use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;

use crate::arith;
use crate::assemble::{Landau, LandauResult, SOFT_CEILING};
use crate::error::{LandauError, Result};
use crate::gfunction::GSolver;
use crate::oracle::g_list_merge_prune;
use crate::primes::{default_limit, PrimeTable};
use crate::superchampion::ChampionIter;

/// Largest `b` accepted by `table`.
pub const TABLE_LIMIT: u64 = 1_000_000;

#[derive(Parser, Debug)]
#[command(name = "landau", version, about = "Landau's function g(n) in factored form")]
pub struct Cli {
    /// Significant digits trusted in logarithm comparisons (20..=31).
    #[arg(long, global = true, default_value_t = 30)]
    pub precision: u32,

    /// Cache directory for the sieve, the E2 table and delta1 values.
    #[arg(long, global = true, env = "LANDAU_CACHE_DIR")]
    pub cache_dir: Option<PathBuf>,

    /// Override the automatic sieve limit.
    #[arg(long, global = true)]
    pub sieve_limit: Option<u64>,

    /// Refuse to print integers with more digits than this.
    #[arg(long, global = true, default_value_t = 10_000_000)]
    pub digit_budget: u64,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Compute g(n).
    Compute {
        n: u64,
        #[arg(long, value_enum, default_value_t = Format::Factored)]
        format: Format,
    },
    /// Print `n<TAB>g(n)` for a <= n <= b, using the list algorithm.
    Table {
        a: u64,
        b: u64,
        #[arg(long, value_enum, default_value_t = Format::Factored)]
        format: Format,
    },
    /// Check the fast path against the list algorithm for 7 <= n <= max_n.
    Verify {
        #[arg(default_value_t = 100_000)]
        max_n: u64,
    },
    /// Evaluate G(p, m).
    Gfun { p: u64, m: u64 },
    /// Show the superchampion data for n, or list the first champions.
    Superchampion {
        n: Option<u64>,
        #[arg(long)]
        first: Option<usize>,
    },
    /// Dump the plain prefixes D(B) for n as `delta ben dell`.
    Prefixes {
        n: u64,
        /// Also list the normalized candidates.
        #[arg(long)]
        normalized: bool,
    },
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Factored,
    Digits,
    Log,
    Json,
}

/// Settings shared by every subcommand.
#[derive(Clone, Debug)]
pub struct Config {
    pub sieve_limit_override: Option<u64>,
    pub precision_digits: u32,
    pub cache_dir: Option<PathBuf>,
    pub digit_budget: u64,
}

impl Default for Config {
    fn default() -> Config {
        Config {
            sieve_limit_override: None,
            precision_digits: 30,
            cache_dir: None,
            digit_budget: 10_000_000,
        }
    }
}

impl Config {
    pub fn from_cli(cli: &Cli) -> Result<Config> {
        let c = Config {
            sieve_limit_override: cli.sieve_limit,
            precision_digits: cli.precision,
            cache_dir: cli.cache_dir.clone(),
            digit_budget: cli.digit_budget,
        };
        c.validate()?;
        Ok(c)
    }

    pub fn validate(&self) -> Result<()> {
        if self.digit_budget < 1000 {
            return Err(LandauError::InvalidInput(format!(
                "digit budget must be at least 1000, got {}",
                self.digit_budget
            )));
        }
        if !(20..=crate::real::REAL_DIGITS).contains(&self.precision_digits) {
            return Err(LandauError::InvalidInput(format!(
                "precision must be between 20 and {} digits, got {}",
                crate::real::REAL_DIGITS,
                self.precision_digits
            )));
        }
        Ok(())
    }

    /// Install the precision globally; call once before computing.
    pub fn apply(&self) -> Result<()> {
        self.validate()?;
        arith::set_precision(self.precision_digits)
    }

    fn engine(&self, max_n: u64) -> Result<Landau> {
        Landau::open(max_n, self.sieve_limit_override, self.cache_dir.as_deref())
    }
}

/// The JSON record printed by `compute --format json`.
#[derive(Serialize, Debug)]
pub struct ComputeJson {
    pub n: u64,
    pub rho: Option<String>,
    #[serde(rename = "ellN")]
    pub ell_n: u64,
    #[serde(rename = "N_brackets")]
    pub n_brackets: String,
    pub correction_num: String,
    pub correction_den: String,
    pub ell_g: u64,
    pub log10_g: String,
}

impl ComputeJson {
    pub fn new(r: &LandauResult, t: &PrimeTable, digits: usize) -> ComputeJson {
        ComputeJson {
            n: r.n,
            rho: r.context.as_ref().map(|c| c.rho.to_decimal_string(digits)),
            ell_n: r.ell_n(),
            n_brackets: r.render_n(t),
            correction_num: r.correction.numerator().render_with(Some(t)),
            correction_den: r.correction.denominator().render_with(Some(t)),
            ell_g: r.ell_g,
            log10_g: r.log10_g().to_decimal_string(digits),
        }
    }
}

/// Parse arguments, run, and return the process exit code.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 64 } else { 0 };
        }
    };
    let stdout = std::io::stdout();
    let mut out = stdout.lock();
    match run(&cli, &mut out) {
        Ok(code) => code,
        Err(e) => {
            let _ = out.flush();
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}

/// Execute a parsed command line; `Ok(code)` carries a nonzero code for
/// a failed verification.
pub fn run(cli: &Cli, out: &mut dyn Write) -> Result<i32> {
    let cfg = Config::from_cli(cli)?;
    cfg.apply()?;
    match &cli.command {
        Command::Compute { n, format } => cmd_compute(&cfg, *n, *format, out).map(|_| 0),
        Command::Table { a, b, format } => cmd_table(&cfg, *a, *b, *format, out).map(|_| 0),
        Command::Verify { max_n } => cmd_verify(&cfg, *max_n, out).map(|ok| if ok { 0 } else { 1 }),
        Command::Gfun { p, m } => cmd_gfun(&cfg, *p, *m, out).map(|_| 0),
        Command::Superchampion { n, first } => cmd_superchampion(&cfg, *n, *first, out).map(|_| 0),
        Command::Prefixes { n, normalized } => cmd_prefixes(&cfg, *n, *normalized, out).map(|_| 0),
    }
}

pub fn cmd_compute(cfg: &Config, n: u64, format: Format, out: &mut dyn Write) -> Result<()> {
    if n > SOFT_CEILING {
        eprintln!("warning: n above 10^15; the large-m G recursion relies on delta1 existing there");
    }
    let e = cfg.engine(n)?;
    let r = e.compute(n)?;
    let t = e.table();
    let digits = cfg.precision_digits as usize;
    match format {
        Format::Factored => {
            writeln!(out, "g({n}) = {}", r.render(t))?;
            if r.context.is_some() {
                writeln!(out, "l(N) = {}", r.ell_n())?;
            }
            writeln!(out, "l(g) = {}", r.ell_g)?;
        }
        Format::Digits => writeln!(out, "{}", r.factorization(t).to_decimal(cfg.digit_budget)?)?,
        Format::Log => writeln!(out, "{}", r.log10_g().to_decimal_string(digits))?,
        Format::Json => {
            let j = ComputeJson::new(&r, t, digits);
            let s = serde_json::to_string(&j).map_err(|e| LandauError::Internal(e.to_string()))?;
            writeln!(out, "{s}")?;
        }
    }
    Ok(())
}

pub fn cmd_table(cfg: &Config, a: u64, b: u64, format: Format, out: &mut dyn Write) -> Result<()> {
    if a > b {
        return Err(LandauError::InvalidInput(format!("empty range {a}..{b}")));
    }
    if b > TABLE_LIMIT {
        return Err(LandauError::OutOfRange(format!(
            "table is limited to b <= {TABLE_LIMIT}, got {b}"
        )));
    }
    let list = g_list_merge_prune(b.max(7))?;
    let t = PrimeTable::build(default_limit(b))?;
    for n in a..=b {
        let g = list.query(n)?;
        let cell = match format {
            Format::Factored => g.render_with(Some(&t)),
            Format::Digits => g.to_decimal(cfg.digit_budget)?,
            Format::Log => g.log10().to_decimal_string(cfg.precision_digits as usize),
            Format::Json => {
                let v = serde_json::json!({ "n": n, "g": g.render_with(Some(&t)), "ell": g.ell() });
                v.to_string()
            }
        };
        if format == Format::Json {
            writeln!(out, "{cell}")?;
        } else {
            writeln!(out, "{n}\t{cell}")?;
        }
    }
    Ok(())
}

/// Returns whether every value matched.
pub fn cmd_verify(cfg: &Config, max_n: u64, out: &mut dyn Write) -> Result<bool> {
    if max_n < 7 {
        return Err(LandauError::InvalidInput(format!("verify needs max_n >= 7, got {max_n}")));
    }
    let e = cfg.engine(max_n)?;
    let list = g_list_merge_prune(max_n)?;
    let t = e.table();
    let total = max_n - 6;
    let mut good = 0u64;
    for n in 7..=max_n {
        let want = list.query(n)?;
        let got = e.compute(n).map(|r| r.factorization(t));
        match got {
            Ok(g) if g == want => good += 1,
            Ok(g) => writeln!(
                out,
                "mismatch at n={n}: computed {} expected {}",
                g.render_with(Some(t)),
                want.render_with(Some(t))
            )?,
            Err(err) => writeln!(
                out,
                "failure at n={n}: {err}; expected {}",
                want.render_with(Some(t))
            )?,
        }
    }
    let ok = good == total;
    writeln!(out, "{good}/{total} {}", if ok { "OK" } else { "FAILED" })?;
    Ok(ok)
}

pub fn cmd_gfun(cfg: &Config, p: u64, m: u64, out: &mut dyn Write) -> Result<()> {
    let limit = cfg
        .sieve_limit_override
        .unwrap_or_else(|| p.saturating_add(m).saturating_add(m / 2) + 1_000_000);
    let t = Arc::new(PrimeTable::load_or_build(limit, cfg.cache_dir.as_deref())?);
    let solver = match &cfg.cache_dir {
        Some(d) => GSolver::with_cache_dir(t.clone(), d),
        None => GSolver::new(t.clone()),
    };
    let (g, alg) = solver.g(p, m)?;
    writeln!(out, "G({p}, {m}) = {}", g.fraction().render_with(Some(&t)))?;
    writeln!(out, "cost {}", g.cost())?;
    writeln!(out, "algorithm {alg}")?;
    Ok(())
}

pub fn cmd_superchampion(
    cfg: &Config,
    n: Option<u64>,
    first: Option<usize>,
    out: &mut dyn Write,
) -> Result<()> {
    if let Some(count) = first {
        let t = Arc::new(PrimeTable::build(cfg.sieve_limit_override.unwrap_or(1_000_000))?);
        for (i, (f, ell, slope)) in ChampionIter::new(t.clone()).take(count).enumerate() {
            let s = slope.map_or("-".to_string(), |s| s.to_string());
            writeln!(out, "{}\t{}\t{ell}\t{s}", i + 1, f.render_with(Some(&t)))?;
        }
    }
    if let Some(n) = n {
        let e = cfg.engine(n)?;
        let c = e.context(n)?;
        let t = e.table();
        let d = cfg.precision_digits as usize;
        writeln!(out, "n = {n}")?;
        writeln!(out, "rho = {} = {}", c.slope, c.rho.to_decimal_string(d))?;
        writeln!(out, "N = {}", c.champion.render(t))?;
        writeln!(out, "l(N) = {}", c.ell_n)?;
        writeln!(out, "l(N') = {}", c.n_plus_ell)?;
        writeln!(out, "p_k = {} (k = {})", c.p_k, c.k)?;
        writeln!(out, "x1 = {}", c.x1.to_decimal_string(d))?;
        writeln!(out, "x2 = {}", c.x2.to_decimal_string(d))?;
        writeln!(out, "B1 = {}", c.b1.to_decimal_string(d))?;
    }
    if n.is_none() && first.is_none() {
        return Err(LandauError::InvalidInput(
            "superchampion needs n or --first".to_string(),
        ));
    }
    Ok(())
}

pub fn cmd_prefixes(cfg: &Config, n: u64, normalized: bool, out: &mut dyn Write) -> Result<()> {
    let e = cfg.engine(n)?;
    let (ctx, bound, d) = e.prefixes(n)?;
    let t = e.table();
    let digits = cfg.precision_digits as usize;
    writeln!(out, "# n = {n}")?;
    writeln!(out, "# rho = {}", ctx.rho.to_decimal_string(digits))?;
    writeln!(out, "# B = {}", bound.b.to_decimal_string(digits))?;
    writeln!(out, "# B/rho = {}", (bound.b / ctx.rho).to_decimal_string(8))?;
    writeln!(out, "# t1 = {}", bound.t1.to_decimal_string(digits))?;
    writeln!(out, "# |D| = {}", d.len())?;
    for c in &d {
        writeln!(
            out,
            "{}\t{}\t{}",
            c.delta.render_with(Some(t)),
            c.ben.to_decimal_string(12),
            c.dell
        )?;
    }
    if normalized {
        let cands = e.normalized_candidates(&ctx, &bound, &d)?;
        writeln!(out, "# normalized candidates: {}", cands.len())?;
        for c in &cands {
            writeln!(
                out,
                "{}\tomega={}\tm={}\tbase={}",
                c.pi.render_with(Some(t)),
                c.omega,
                c.m_suffix,
                c.base_prime
            )?;
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn run_args(args: &[&str]) -> (Result<i32>, String) {
        let cli = Cli::try_parse_from(std::iter::once("landau").chain(args.iter().copied())).unwrap();
        let mut buf = Vec::new();
        let r = run(&cli, &mut buf);
        (r, String::from_utf8(buf).unwrap())
    }

    #[test]
    fn compute_formats() {
        let (r, s) = run_args(&["compute", "5", "--format", "digits"]);
        assert_eq!(r.unwrap(), 0);
        assert_eq!(s.trim(), "6");
        let (_, s) = run_args(&["compute", "19", "--format", "digits"]);
        assert_eq!(s.trim(), "420");
        let (_, s) = run_args(&["compute", "1000000", "--format", "json"]);
        let v: serde_json::Value = serde_json::from_str(s.trim()).unwrap();
        assert_eq!(v["ellN"], 998093);
        assert_eq!(v["ell_g"], 999999);
        assert_eq!(v["correction_num"], "43 * 3947");
        assert_eq!(v["correction_den"], "3847");
    }

    #[test]
    fn table_rows() {
        let (_, s) = run_args(&["table", "0", "7", "--format", "digits"]);
        let vals: Vec<&str> = s.lines().map(|l| l.split('\t').nth(1).unwrap()).collect();
        assert_eq!(vals, ["1", "1", "2", "3", "4", "6", "6", "12"]);
        let (r, _) = run_args(&["table", "5", "2000000"]);
        assert!(matches!(r, Err(LandauError::OutOfRange(_))));
    }

    #[test]
    fn config_bounds() {
        let mut c = Config::default();
        assert!(c.validate().is_ok());
        c.precision_digits = 19;
        assert!(c.validate().is_err());
        c.precision_digits = 30;
        c.digit_budget = 999;
        assert!(c.validate().is_err());
    }
}
