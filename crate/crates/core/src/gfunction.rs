//! G(p_k, m): the largest fraction `Q_1..Q_s / (q_1..q_s)` with
//! `3 <= q_s < .. < q_1 <= p_k < p_{k+1} <= Q_1 < .. < Q_s` and
//! `Σ(Q_i − q_i) <= m`.
//!
//! Small `m` goes through the H recursion on a window of primes around
//! `p_k`; large `m` reduces to a few small values of `G(p_{k+1}, ·)`.

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::sync::{Arc, Mutex};

use num_bigint::BigUint;

use crate::arith::{ln_int, PrimeFraction};
use crate::error::{LandauError, Result};
use crate::primes::PrimeTable;
use crate::real::Real;

/// Below this budget the H recursion is always used.
pub const SMALL_M: u64 = 3000;

/// Initial number of primes above `p_k` in the H window.
const FIRST_WINDOW: usize = 10;

const DELTA1_HEADER: &str = "# landau delta1 v1";

/// A value of G with its cost `Σ(Q_i − q_i)`.
#[derive(Clone, PartialEq, Eq)]
pub struct GFraction {
    frac: PrimeFraction,
    cost: u64,
}

impl GFraction {
    pub fn one() -> GFraction {
        GFraction {
            frac: PrimeFraction::one(),
            cost: 0,
        }
    }

    /// Check the shape required of G(p_k, ·) and compute the cost.
    pub fn from_fraction(frac: PrimeFraction, p_k: u64) -> Result<GFraction> {
        let bad = |why: &str| {
            Err(LandauError::Internal(format!(
                "{} is not a G fraction for p_k={p_k}: {why}",
                frac.render()
            )))
        };
        let (mut up, mut down) = (0usize, 0usize);
        let mut cost = 0i64;
        for &(p, e) in frac.factors() {
            match e {
                1 if p > p_k => {
                    up += 1;
                    cost += p as i64;
                }
                -1 if p <= p_k && p >= 3 => {
                    down += 1;
                    cost -= p as i64;
                }
                _ => return bad("misplaced prime"),
            }
        }
        if up != down {
            return bad("unbalanced");
        }
        Ok(GFraction {
            frac,
            cost: cost as u64,
        })
    }

    pub fn fraction(&self) -> &PrimeFraction {
        &self.frac
    }

    pub fn into_fraction(self) -> PrimeFraction {
        self.frac
    }

    pub fn cost(&self) -> u64 {
        self.cost
    }

    /// The number s of numerator (and denominator) primes.
    pub fn pairs(&self) -> usize {
        self.frac.factors().len() / 2
    }

    pub fn is_one(&self) -> bool {
        self.frac.is_one()
    }

    /// `Q_1 < .. < Q_s`.
    pub fn numerators(&self) -> Vec<u64> {
        self.frac
            .factors()
            .iter()
            .filter(|f| f.1 > 0)
            .map(|f| f.0)
            .collect()
    }

    /// `q_1 > .. > q_s`.
    pub fn denominators(&self) -> Vec<u64> {
        self.frac
            .factors()
            .iter()
            .rev()
            .filter(|f| f.1 < 0)
            .map(|f| f.0)
            .collect()
    }

    pub fn ln(&self) -> Real {
        self.frac.ln()
    }

    /// Exact test of `G >= 1 + d/p`.
    pub fn at_least_one_plus(&self, d: u64, p: u64) -> bool {
        let (a, b) = self.frac.to_big_ratio();
        a * BigUint::from(p) >= b * BigUint::from(p + d)
    }
}

impl PartialOrd for GFraction {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for GFraction {
    fn cmp(&self, other: &Self) -> Ordering {
        self.frac.cmp_value(&other.frac)
    }
}

impl fmt::Display for GFraction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let num = self.numerators();
        let den = self.denominators();
        if num.is_empty() {
            return write!(f, "1");
        }
        let join = |v: &[u64]| {
            v.iter()
                .map(|p| p.to_string())
                .collect::<Vec<_>>()
                .join(" * ")
        };
        if den.len() == 1 {
            write!(f, "{} / {}", join(&num), den[0])
        } else {
            let mut d = den.clone();
            d.reverse();
            write!(f, "{} / ({})", join(&num), join(&d))
        }
    }
}

impl fmt::Debug for GFraction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "GFraction({self}, cost {})", self.cost)
    }
}

/// Which algorithm produced a value.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum GAlgorithm {
    Trivial,
    Small,
    Large,
}

impl fmt::Display for GAlgorithm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            GAlgorithm::Trivial => "trivial",
            GAlgorithm::Small => "small",
            GAlgorithm::Large => "large",
        })
    }
}

fn check_base(t: &PrimeTable, p_k: u64) -> Result<usize> {
    let kk = t.index_of(p_k).ok_or_else(|| {
        LandauError::InvalidInput(format!("{p_k} is not a prime within the sieve"))
    })?;
    if p_k < 3 {
        return Err(LandauError::InvalidInput(format!(
            "G(p_k, m) needs p_k >= 3, got {p_k}"
        )));
    }
    Ok(kk)
}

/// The H tables on the window `P_1 < .. < P_R`, `P_K = p_k`, for
/// even budgets up to `M`. Values are logs; one bit per entry records
/// whether `P_r` entered the minimum.
struct HWindow {
    p: Vec<u64>,
    k: usize,
    j_top: usize,
    need: Vec<usize>,
    // bits[r][j - jlo(r)] is a bitset over half-budgets
    bits: Vec<Vec<Vec<u64>>>,
    last: Vec<Real>,
}

impl HWindow {
    fn jlo(&self, r: usize) -> usize {
        1.max(r.saturating_sub(self.k))
    }

    fn bit(&self, r: usize, j: usize, mi: usize) -> bool {
        let row = &self.bits[r][j - self.jlo(r)];
        row[mi / 64] >> (mi % 64) & 1 == 1
    }

    /// Primes of H(j, P_r; 2mi), by walking the choice bits back.
    fn members(&self, mut j: usize, mut r: usize, mut mi: usize) -> Vec<u64> {
        let mut out = Vec::with_capacity(j);
        while j > 0 {
            mi = mi.min(self.need[j]);
            if self.bit(r, j, mi) {
                out.push(self.p[r]);
                let shift = (self.p[r] as i64 - self.p[self.k + j] as i64) / 2;
                mi = (mi as i64 + shift) as usize;
                j -= 1;
            }
            r -= 1;
        }
        out
    }

    fn build(t: &PrimeTable, kk: usize, m_max: u64, r_top: usize) -> Result<HWindow> {
        let p_next = t.try_prime(kk + 1)?;
        let low = p_next.saturating_sub(m_max).max(3);
        let i1 = t.pi(low - 1) + 1;
        let mut p = vec![0u64];
        for i in i1..=r_top {
            p.push(t.try_prime(i)?);
        }
        let r_len = p.len() - 1;
        let k = kk + 1 - i1;
        let j_top = r_len - k;
        // half-budget ranges needed at each level, capped where H is
        // already P_1..P_j
        let mut need = vec![0usize; j_top + 1];
        need[j_top] = (m_max / 2) as usize;
        for j in (1..j_top).rev() {
            need[j] = need[j + 1] + ((p[r_len] - p[k + j + 1]) / 2) as usize;
        }
        let mut top_sum = 0u64;
        let mut low_sum = 0u64;
        for j in 1..=j_top {
            top_sum += p[k + j];
            low_sum += p[j];
            let cap = (top_sum.saturating_sub(low_sum) / 2) as usize;
            need[j] = need[j].min(cap);
        }
        let mut w = HWindow {
            p,
            k,
            j_top,
            need,
            bits: Vec::with_capacity(r_len + 1),
            last: Vec::new(),
        };
        w.bits.push(Vec::new());
        let mut cur: Vec<Vec<Real>> = (0..=j_top)
            .map(|j| vec![Real::INFINITY; w.need[j] + 1])
            .collect();
        for r in 1..=r_len {
            let jlo = w.jlo(r);
            let jhi = r.min(j_top);
            let mut row: Vec<Vec<u64>> = (jlo..=jhi.max(jlo))
                .map(|j| vec![0u64; w.need[j.min(j_top)] / 64 + 1])
                .collect();
            if jlo <= jhi {
                let lp = ln_int(w.p[r]);
                for j in (jlo..=jhi).rev() {
                    let shift = (w.p[r] as i64 - w.p[k + j] as i64) / 2;
                    let (below, here) = cur.split_at_mut(j);
                    let prev = &below[j - 1];
                    let here = &mut here[0];
                    for mi in 0..=w.need[j] {
                        let idx = mi as i64 + shift;
                        if idx < 0 {
                            continue;
                        }
                        let b = if j == 1 {
                            lp
                        } else {
                            let v = prev[(idx as usize).min(w.need[j - 1])];
                            if !v.is_finite() {
                                continue;
                            }
                            v + lp
                        };
                        let a = here[mi];
                        let take = if !a.is_finite() {
                            true
                        } else {
                            let d = (b - a).to_f64();
                            let guard = 1e-25 * (a.to_f64().abs() + 1.0);
                            if d < -guard {
                                true
                            } else if d > guard {
                                false
                            } else {
                                // near tie: compare the products exactly
                                let pa = w.members(j, r - 1, mi);
                                let mut pb = w.members(j - 1, r - 1, idx as usize);
                                pb.push(w.p[r]);
                                let prod = |v: &[u64]| {
                                    v.iter().fold(BigUint::from(1u32), |x, &q| x * q)
                                };
                                prod(&pb) < prod(&pa)
                            }
                        };
                        if take {
                            here[mi] = b;
                            row[j - jlo][mi / 64] |= 1 << (mi % 64);
                        }
                    }
                }
            }
            w.bits.push(row);
        }
        w.last = std::mem::take(&mut cur[j_top]);
        Ok(w)
    }

    /// G(p_k, m) on this window, `m <= M`.
    fn g(&self, m: u64) -> Result<GFraction> {
        let r_len = self.p.len() - 1;
        let h = self.members(self.j_top, r_len, (m / 2) as usize);
        let mut f: Vec<(u64, i32)> = Vec::with_capacity(2 * h.len());
        let pk = self.p[self.k];
        for &q in &h {
            if q <= pk {
                f.push((q, -1));
            }
        }
        for r in (self.k + 1)..=r_len {
            if !h.contains(&self.p[r]) {
                f.push((self.p[r], 1));
            }
        }
        GFraction::from_fraction(PrimeFraction::from_factors(f), pk)
    }
}

/// G(p_k, m) for all `m <= M` on the window whose largest prime is the
/// `r_top`-th; a lower bound for G, exact once the window is wide enough.
fn g_window(t: &PrimeTable, kk: usize, m_max: u64, r_top: usize) -> Result<Vec<GFraction>> {
    let w = HWindow::build(t, kk, m_max, r_top)?;
    let mut out = Vec::with_capacity(m_max as usize + 1);
    for m in (0..=m_max).step_by(2) {
        let g = w.g(m)?;
        if m < m_max {
            out.push(g.clone());
        }
        out.push(g);
    }
    out.truncate(m_max as usize + 1);
    Ok(out)
}

fn check_budget(t: &PrimeTable, kk: usize, m_max: u64) -> Result<u64> {
    let p_next = t.try_prime(kk + 1)?;
    if m_max + 3 > p_next {
        return Err(LandauError::OutOfRange(format!(
            "m={m_max} above p_(k+1) - 3 = {}",
            p_next as i64 - 3
        )));
    }
    Ok(p_next)
}

/// Largest prime that can appear in G(p_k, m) given a lower bound `f`.
fn largest_prime_bound(p_k: u64, m: u64, f: &GFraction) -> f64 {
    let direct = (p_k + m) as f64;
    if f.is_one() {
        return direct;
    }
    let x = f.ln().to_f64().exp_m1();
    direct.min(m as f64 * (1.0 + x) / x)
}

/// G(p_k, m) for every `0 <= m <= M` by the H recursion, starting from
/// ten primes above `p_k` and widening until every value is confirmed.
pub fn g_small(t: &PrimeTable, p_k: u64, m_max: u64) -> Result<Vec<GFraction>> {
    let kk = check_base(t, p_k)?;
    let p_next = check_budget(t, kk, m_max)?;
    let gap = p_next - p_k;
    let mut r_top = kk + FIRST_WINDOW;
    t.try_prime(r_top)?;
    let mut out = g_window(t, kk, m_max, r_top)?;
    loop {
        let top = t.prime(r_top) as f64;
        let mut need: f64 = 0.0;
        let mut worst = 0u64;
        for m in gap..=m_max {
            let b = largest_prime_bound(p_k, m, &out[m as usize]);
            if top <= b * (1.0 + 1e-12) + 1.0 {
                need = need.max(b);
                worst = m;
            }
        }
        if worst == 0 {
            return Ok(out);
        }
        let new_top = t.pi((need * (1.0 + 1e-12)) as u64 + 2) + 1;
        r_top = new_top.max(r_top + 1);
        t.try_prime(r_top)?;
        let fresh = g_window(t, kk, worst, r_top)?;
        out[..fresh.len()].clone_from_slice(&fresh);
    }
}

/// G(p_k, m) by the H recursion on the full window: all primes in
/// `[p_{k+1} − M, p_k + M]`.
pub fn g_small_full(t: &PrimeTable, p_k: u64, m_max: u64) -> Result<Vec<GFraction>> {
    let kk = check_base(t, p_k)?;
    check_budget(t, kk, m_max)?;
    let r_top = t.pi(p_k + m_max) + 1;
    t.try_prime(r_top)?;
    g_window(t, kk, m_max, r_top.max(kk + 1))
}

/// The sandwich `p_{k+1}/q <= G(p_k, m) <= p_{k+1}/(p_{k+1} − m)` with
/// `q` the least prime `>= p_{k+1} − m`: returns `(p_{k+1}, q)`.
pub fn sandwich(t: &PrimeTable, p_k: u64, m: u64) -> Result<(u64, u64)> {
    let kk = check_base(t, p_k)?;
    let p_next = check_budget(t, kk, m)?;
    let q = t.prime_at_least(p_next - m)?;
    Ok((p_next, q))
}

/// Evaluates G and keeps the δ₁ table.
pub struct GSolver {
    table: Arc<PrimeTable>,
    delta1: Mutex<BTreeMap<u64, u64>>,
    cache_file: Option<PathBuf>,
}

impl GSolver {
    pub fn new(table: Arc<PrimeTable>) -> GSolver {
        GSolver {
            table,
            delta1: Mutex::new(BTreeMap::new()),
            cache_file: None,
        }
    }

    /// Solver whose δ₁ values persist in `dir/delta1.txt`.
    pub fn with_cache_dir(table: Arc<PrimeTable>, dir: &Path) -> GSolver {
        let file = dir.join("delta1.txt");
        let mut map = BTreeMap::new();
        if let Ok(text) = std::fs::read_to_string(&file) {
            let mut lines = text.lines();
            if lines.next() == Some(DELTA1_HEADER) {
                for line in lines {
                    let mut it = line.split_whitespace();
                    if let (Some(Ok(p)), Some(Ok(d))) =
                        (it.next().map(str::parse), it.next().map(str::parse))
                    {
                        map.insert(p, d);
                    }
                }
            }
        }
        GSolver {
            table,
            delta1: Mutex::new(map),
            cache_file: Some(file),
        }
    }

    pub fn table(&self) -> &PrimeTable {
        &self.table
    }

    fn remember(&self, p: u64, d: u64) {
        self.delta1.lock().expect("delta1 lock").insert(p, d);
        let Some(file) = &self.cache_file else {
            return;
        };
        let fresh = !file.exists();
        let res = std::fs::OpenOptions::new()
            .create(true)
            .append(true)
            .open(file)
            .and_then(|mut f| {
                if fresh {
                    writeln!(f, "{DELTA1_HEADER}")?;
                }
                writeln!(f, "{p} {d}")
            });
        if let Err(e) = res {
            eprintln!("warning: cannot write {}: {e}", file.display());
        }
    }

    /// δ₁(p_k): the least even `δ₁ >= Δ(p_{k+1})` such that
    /// `G(p_{k+1}, d) >= 1 + d/p_{k+1}` for `d = δ₁−Δ+2, .., δ₁`.
    pub fn delta1(&self, p_k: u64) -> Result<u64> {
        if let Some(&d) = self.delta1.lock().expect("delta1 lock").get(&p_k) {
            return Ok(d);
        }
        let t = &*self.table;
        let kk = check_base(t, p_k)?;
        let p1 = t.try_prime(kk + 1)?;
        let p2 = t.try_prime(kk + 2)?;
        let gap_max = t.max_gap_upto(p1)?;
        let lp = (p_k as f64).ln();
        let ceiling = (4.0 * 2.55 * lp * lp) as u64;
        let mut top = (2 * gap_max).max((2.55 * lp * lp) as u64);
        loop {
            top = top.min(ceiling).min(p2 - 3) & !1;
            let g = g_small(t, p1, top)?;
            let good: Vec<bool> = (0..=top)
                .map(|d| g[d as usize].at_least_one_plus(d, p1))
                .collect();
            let mut d1 = gap_max + (gap_max & 1);
            while d1 <= top {
                let ok = (1..=gap_max / 2).all(|i| {
                    let d = d1 + 2 - 2 * i;
                    good[d as usize]
                });
                if ok {
                    self.remember(p_k, d1);
                    return Ok(d1);
                }
                d1 += 2;
            }
            if top >= ceiling || top + 3 >= p2 {
                return Err(LandauError::Delta1Ceiling { p: p_k, ceiling });
            }
            top *= 2;
        }
    }

    /// G(p_k, m) by the large-m recursion; needs `m >= 9δ₁(p_k)/2`.
    pub fn g_large(&self, p_k: u64, m: u64) -> Result<GFraction> {
        let m = m & !1;
        let t = &*self.table;
        let kk = check_base(t, p_k)?;
        let p1 = check_budget(t, kk, m)?;
        let p2 = t.try_prime(kk + 2)?;
        if m < p1 - p_k {
            return Ok(GFraction::one());
        }
        let d1 = self.delta1(p_k)?;
        if 2 * m < 9 * d1 {
            return Err(LandauError::InvalidInput(format!(
                "large-m recursion needs m >= 9/2 δ1 = {}, got {m}",
                9 * d1 / 2
            )));
        }
        // the window must cover δ₁ and every d reached by q <= q̂
        let hat_room = p2 - p1 + 3 * d1 / 2 + 2;
        let inner_max = d1.max(hat_room).min(p2 - 3) & !1;
        let inner = g_small(t, p1, inner_max)?;
        let mut delta = None;
        let mut d = d1;
        loop {
            if 9 * d < 2 * m
                && t.is_prime(p1 + d - m)
                && inner[d as usize].at_least_one_plus(d, p1)
            {
                delta = Some(d);
                break;
            }
            if d == 0 {
                break;
            }
            d -= 2;
        }
        let Some(delta) = delta else {
            return Err(LandauError::Internal(format!(
                "no admissible δ for G({p_k}, {m}) with δ1 = {d1}"
            )));
        };
        let q0 = p1 - m;
        if delta == 0 {
            return GFraction::from_fraction(PrimeFraction::ratio(&[p1], &[q0]), p_k);
        }
        let (fp1, fp2, fd, fm) = (p1 as f64, p2 as f64, delta as f64, m as f64);
        let q_hat = fp1 * fp2 * (fp1 - fm + fd) / ((fp1 + fd) * (fp1 - 1.5 * fd));
        let q_top = (q_hat * (1.0 + 1e-12)).floor() as u64 + 1;
        let mut best: Option<GFraction> = None;
        let mut q = t.prime_at_least(q0)?;
        while q <= q_top {
            let dd = m - (p1 - q);
            if dd > inner_max {
                return Err(LandauError::Internal(format!(
                    "inner budget {dd} beyond window {inner_max}"
                )));
            }
            let f = PrimeFraction::ratio(&[p1], &[q]).mul(inner[dd as usize].fraction());
            let cand = GFraction::from_fraction(f, p_k)?;
            if best.as_ref().is_none_or(|b| cand > *b) {
                best = Some(cand);
            }
            q = t.next_prime(q)?;
        }
        best.ok_or_else(|| LandauError::Internal(format!("empty q range for G({p_k}, {m})")))
    }

    /// G(p_k, m), choosing the algorithm by the size of m.
    pub fn g(&self, p_k: u64, m: u64) -> Result<(GFraction, GAlgorithm)> {
        let m = m & !1;
        let t = &*self.table;
        if p_k == 2 {
            // no odd prime lies below 2
            return Ok((GFraction::one(), GAlgorithm::Trivial));
        }
        let kk = check_base(t, p_k)?;
        let p1 = check_budget(t, kk, m)?;
        if m < p1 - p_k {
            return Ok((GFraction::one(), GAlgorithm::Trivial));
        }
        if m >= SMALL_M {
            let d1 = self.delta1(p_k)?;
            if 2 * m >= 9 * d1 {
                return Ok((self.g_large(p_k, m)?, GAlgorithm::Large));
            }
        }
        let v = g_small(t, p_k, m)?;
        Ok((v[m as usize].clone(), GAlgorithm::Small))
    }
}
