//! ℓ-superchampion numbers: the critical slopes, the E″ table, and the
//! champion pair bracketing a given n.

use std::cmp::{Ordering, Reverse};
use std::collections::BinaryHeap;
use std::fmt;
use std::sync::Arc;

use crate::arith::{ln_int, render_product, PrimeFraction};
use crate::error::{LandauError, Result};
use crate::primes::PrimeTable;
use crate::real::Real;

/// `q^j - q^{j-1}` for `j >= 2`, and `q` for `j == 1`.
pub fn weight(q: u64, j: u32) -> u64 {
    if j == 1 {
        q
    } else {
        q.pow(j - 1) * (q - 1)
    }
}

/// A critical slope `weight(q, j) / log q`, kept symbolic so equality is
/// exact.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Slope {
    pub q: u64,
    pub j: u32,
}

impl Slope {
    pub fn new(q: u64, j: u32) -> Slope {
        Slope { q, j }
    }

    pub fn weight(&self) -> u64 {
        weight(self.q, self.j)
    }

    pub fn value(&self) -> Real {
        Real::from_u64(self.weight()) / ln_int(self.q)
    }

    /// True for the two representations of 2/log 2.
    fn is_two_anomaly(&self) -> bool {
        self.q == 2 && self.j <= 2
    }

    /// Exact-aware comparison of two slopes.
    pub fn cmp_slope(&self, other: &Slope) -> Ordering {
        if self == other || (self.is_two_anomaly() && other.is_two_anomaly()) {
            return Ordering::Equal;
        }
        self.value()
            .partial_cmp(&other.value())
            .expect("slopes are finite")
    }
}

impl fmt::Display for Slope {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.j == 1 {
            write!(f, "{}/log {}", self.q, self.q)
        } else {
            write!(
                f,
                "({}^{}-{}^{})/log {}",
                self.q,
                self.j,
                self.q,
                self.j - 1,
                self.q
            )
        }
    }
}

/// One row `[q, j, p, l]` of the E″ table.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct E2Entry {
    pub q: u64,
    pub j: u32,
    pub p: u64,
    pub l: u64,
}

impl E2Entry {
    pub fn slope(&self) -> Slope {
        Slope::new(self.q, self.j)
    }
}

#[derive(PartialEq)]
struct HeapKey(Real, u64, u32);

impl Eq for HeapKey {}

impl PartialOrd for HeapKey {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for HeapKey {
    fn cmp(&self, other: &Self) -> Ordering {
        Slope::new(self.1, self.2)
            .cmp_slope(&Slope::new(other.1, other.2))
            .then(self.2.cmp(&other.2))
            .then(self.1.cmp(&other.1))
            .then(self.0.total_cmp(&other.0))
    }
}

fn key(q: u64, j: u32) -> Reverse<HeapKey> {
    Reverse(HeapKey(Slope::new(q, j).value(), q, j))
}

/// 1-based index of the largest prime `p >= 3` with `p/log p < r`.
fn largest_prime_below_slope(t: &PrimeTable, r: &Slope) -> Result<usize> {
    let below = |i: usize| Slope::new(t.prime(i), 1).cmp_slope(r) == Ordering::Less;
    // p/log p is increasing from p = 3 on
    let (mut lo, mut hi) = (2usize, t.len());
    if !below(lo) {
        return Err(LandauError::InvalidInput(format!("slope {r} below 3/log 3")));
    }
    if below(hi) {
        return Err(LandauError::Capacity(format!(
            "slope {r} needs primes beyond the sieve limit {}",
            t.limit()
        )));
    }
    while hi - lo > 1 {
        let mid = (lo + hi) / 2;
        if below(mid) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(lo)
}

/// The E″ table in increasing slope order, up to and including the
/// first entry with `l > ell_limit`.
pub fn build_e2_table(ell_limit: u64, t: &PrimeTable) -> Result<Vec<E2Entry>> {
    if ell_limit < 7 {
        return Err(LandauError::InvalidInput(format!(
            "E2 table needs ell_limit >= 7, got {ell_limit}"
        )));
    }
    let mut heap = BinaryHeap::new();
    heap.push(key(2, 2));
    let mut last_base = 1usize;
    let mut weight_sum = 0u64;
    let mut out = Vec::new();
    while let Some(Reverse(HeapKey(_, q, j))) = heap.pop() {
        if j == 2 && t.index_of(q) == Some(last_base) {
            last_base += 1;
            heap.push(key(t.try_prime(last_base)?, 2));
        }
        heap.push(key(q, j + 1));
        weight_sum += weight(q, j);
        let slope = Slope::new(q, j);
        let ip = largest_prime_below_slope(t, &slope)?;
        let l = t.cumsum(ip) + weight_sum;
        out.push(E2Entry {
            q,
            j,
            p: t.prime(ip),
            l,
        });
        if l > ell_limit {
            break;
        }
    }
    Ok(out)
}

/// The champion `N_ρ` in compact form: exponents at least 2 on the
/// smallest primes, exponent 1 on the remaining primes up to `p_k`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Champion {
    /// `(p, α_p)` for the primes with `α_p >= 2`, ascending.
    pub high: Vec<(u64, u32)>,
    /// Index of the largest prime factor `p_k`.
    pub k: usize,
    pub p_k: u64,
    pub ell: u64,
}

impl Champion {
    pub fn exponent(&self, p: u64) -> u32 {
        if p > self.p_k {
            return 0;
        }
        match self.high.binary_search_by_key(&p, |&(q, _)| q) {
            Ok(i) => self.high[i].1,
            Err(_) => 1,
        }
    }

    /// Full factorization; `t` must cover `p_k`.
    pub fn to_fraction(&self, t: &PrimeTable) -> PrimeFraction {
        let f: Vec<(u64, i32)> = (1..=self.k)
            .map(|i| {
                let p = t.prime(i);
                (p, self.exponent(p) as i32)
            })
            .collect();
        PrimeFraction::from_sorted(f)
    }

    /// Natural log of N, summed over all its primes.
    pub fn ln(&self, t: &PrimeTable) -> Real {
        let mut s = Real::ZERO;
        for i in 1..=self.k {
            s += ln_int(t.prime(i));
        }
        for &(p, e) in &self.high {
            s += ln_int(p).mul_f64((e - 1) as f64);
        }
        s
    }

    /// Canonical bracketed rendering.
    pub fn render(&self, t: &PrimeTable) -> String {
        let mut parts = Vec::new();
        let high: Vec<(u64, i32)> = self.high.iter().map(|&(p, e)| (p, e as i32)).collect();
        if !high.is_empty() {
            parts.push(render_product(&high, Some(t)));
        }
        let first = self.high.len() + 1;
        if first <= self.k {
            let a = t.prime(first);
            let b = self.p_k;
            let run = self.k + 1 - first;
            parts.push(if run >= 3 {
                format!("[{a}-{b}]")
            } else {
                (first..=self.k)
                    .map(|i| t.prime(i).to_string())
                    .collect::<Vec<_>>()
                    .join(" * ")
            });
        }
        if parts.is_empty() {
            "1".to_string()
        } else {
            parts.join(" * ")
        }
    }
}

/// Exponent of `p` in the lower (`upper == false`) or upper champion
/// associated to `rho`.
pub fn champion_exponent(p: u64, rho: &Slope, upper: bool) -> u32 {
    let mut j = 0;
    loop {
        let c = Slope::new(p, j + 1).cmp_slope(rho);
        let take = match c {
            Ordering::Less => true,
            Ordering::Equal => upper,
            Ordering::Greater => false,
        };
        if !take {
            return j;
        }
        j += 1;
    }
}

/// Build `N_ρ` (or `N_ρ^+`) from the slope.
pub fn champion_for_slope(rho: &Slope, upper: bool, t: &PrimeTable) -> Result<Champion> {
    if rho.cmp_slope(&Slope::new(5, 1)) == Ordering::Less {
        return Err(LandauError::InvalidInput(format!(
            "slope {rho} below 5/log 5"
        )));
    }
    let mut high = Vec::new();
    let mut ell = 0u64;
    let mut i = 1;
    loop {
        let p = t.try_prime(i)?;
        let e = champion_exponent(p, rho, upper);
        if e < 2 {
            break;
        }
        high.push((p, e));
        ell += p.pow(e);
        i += 1;
    }
    // p/log p is increasing for p >= 3, and 2, 3 always divide N here
    let ok = |i: usize| champion_exponent(t.prime(i), rho, upper) >= 1;
    let (mut lo, mut hi) = (2usize, t.len());
    if ok(hi) {
        return Err(LandauError::Capacity(format!(
            "champion for {rho} exceeds the sieve limit {}",
            t.limit()
        )));
    }
    while hi - lo > 1 {
        let mid = (lo + hi) / 2;
        if ok(mid) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let k = lo;
    let k = k.max(high.len());
    let ones = if k > high.len() {
        t.cumsum(k) - t.cumsum(high.len())
    } else {
        0
    };
    ell += ones;
    Ok(Champion {
        high,
        k,
        p_k: if k == 0 { 1 } else { t.prime(k) },
        ell,
    })
}

/// Everything fixed by `n` before the benefit analysis.
#[derive(Clone, Debug)]
pub struct SuperchampionContext {
    pub n: u64,
    pub slope: Slope,
    pub rho: Real,
    pub champion: Champion,
    pub ell_n: u64,
    pub n_plus_ell: u64,
    pub k: usize,
    pub p_k: u64,
    /// `x_1, x_2, ...` down to and including the first value below 2.
    pub xs: Vec<Real>,
    pub x1: Real,
    pub x2: Real,
    pub sqrt_x1: Real,
    pub b1: Real,
}

impl SuperchampionContext {
    /// `α_p`, the exponent of `p` in N.
    pub fn alpha(&self, p: u64) -> u32 {
        self.champion.exponent(p)
    }
}

/// Root of `x - ρ log x` above ρ (`j = 1`) or of
/// `x^{j-1}(x-1) - ρ log x` above 1 (`j >= 2`).
pub fn solve_xj(rho: Real, j: u32) -> Real {
    let r = rho.to_f64();
    let hf = |x: f64| -> f64 {
        if j == 1 {
            x - r * x.ln()
        } else {
            x.powi(j as i32 - 1) * (x - 1.0) - r * x.ln()
        }
    };
    let (mut lo, mut hi) = if j == 1 {
        (r, 2.0 * r * r.ln() + 10.0)
    } else {
        (1.0, r.max(4.0))
    };
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid == lo || mid == hi {
            break;
        }
        if hf(mid) < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let mut x = Real::from(0.5 * (lo + hi));
    let jr = Real::from(j as f64);
    for _ in 0..4 {
        let lx = x.ln();
        let (h, dh) = if j == 1 {
            (x - rho * lx, Real::ONE - rho / x)
        } else {
            let xm2 = if j >= 2 { x.powi(j - 2) } else { Real::ONE };
            let xm1 = xm2 * x;
            let h = xm1 * (x - Real::ONE) - rho * lx;
            let dh = jr * xm1 - (jr - Real::ONE) * xm2 - rho / x;
            (h, dh)
        };
        if dh.is_zero() {
            break;
        }
        x -= h / dh;
    }
    x
}

/// `x_1, x_2, ...` for `ρ`, ending with the first value below 2.
pub fn xj_thresholds(rho: Real) -> Result<Vec<Real>> {
    let min = Slope::new(5, 1).value();
    if rho < min - Real::from(1e-25) {
        return Err(LandauError::InvalidInput(format!(
            "slope {rho} below 5/log 5"
        )));
    }
    let mut xs = vec![solve_xj(rho, 1)];
    let mut j = 2;
    loop {
        let x = solve_xj(rho, j);
        xs.push(x);
        if x.to_f64() < 2.0 {
            break;
        }
        j += 1;
    }
    Ok(xs)
}

/// `(x^j - x^{j-1}) / log x` (or `x / log x` for `j = 1`).
pub fn threshold_residual(x: Real, j: u32, rho: Real) -> Real {
    let v = if j == 1 {
        x / x.ln()
    } else {
        x.powi(j - 1) * (x - Real::ONE) / x.ln()
    };
    v - rho
}

/// N_ρ assembled from thresholds: `p^j` for `x_{j+1} <= p < x_j`.
pub fn champion_factorization(xs: &[Real], t: &PrimeTable) -> Result<PrimeFraction> {
    let x1 = xs[0];
    let mut f = Vec::new();
    let mut i = 1;
    loop {
        let p = t.try_prime(i)?;
        let pr = Real::from_u64(p);
        if pr >= x1 {
            break;
        }
        let j = xs.iter().take_while(|&&x| pr < x).count() as i32;
        f.push((p, j));
        i += 1;
    }
    Ok(PrimeFraction::from_sorted(f))
}

/// `min(x_2^2 - 2 x_2, x_1/2 - sqrt(x_1))`.
pub fn b1(x1: Real, x2: Real) -> Real {
    let a = x2 * x2 - x2.mul_pow2(2.0);
    let b = x1.mul_pow2(0.5) - x1.sqrt();
    a.min(b)
}

/// Locate `ρ ∈ E` with `ℓ(N_ρ) <= n < ℓ(N_ρ^+)`.
pub fn find_context(n: u64, e2: &[E2Entry], t: &PrimeTable) -> Result<SuperchampionContext> {
    if n < 7 {
        return Err(LandauError::InvalidInput(format!(
            "the champion context needs n >= 7, got {n}"
        )));
    }
    let i = e2.partition_point(|e| e.l <= n);
    if i == 0 || i >= e2.len() {
        return Err(LandauError::Capacity(format!(
            "E2 table of {} entries does not bracket n={n}",
            e2.len()
        )));
    }
    let cur = e2[i - 1];
    let next = e2[i];
    let t_ell = next.l - weight(next.q, next.j);
    let (slope, ell_n, n_plus_ell) = if t_ell <= n {
        (next.slope(), t_ell, next.l)
    } else {
        // add primes after cur.p one at a time until the cost passes n
        let base = t.index_of(cur.p).expect("table prime");
        let over = |m: usize| cur.l + t.cumsum(m) - t.cumsum(base) > n;
        let (mut lo, mut hi) = (base, base + 1);
        while !over(hi) {
            lo = hi;
            hi = (base + 2 * (hi - base)).min(t.len());
            if hi == lo {
                return Err(LandauError::Capacity(format!(
                    "sieve limit {} too small for n={n}",
                    t.limit()
                )));
            }
        }
        while hi - lo > 1 {
            let mid = (lo + hi) / 2;
            if over(mid) {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        let p = t.prime(hi);
        let np = cur.l + t.cumsum(hi) - t.cumsum(base);
        (Slope::new(p, 1), np - p, np)
    };
    let champion = champion_for_slope(&slope, false, t)?;
    if champion.ell != ell_n {
        return Err(LandauError::Internal(format!(
            "champion cost {} disagrees with table cost {ell_n} at n={n}",
            champion.ell
        )));
    }
    let rho = slope.value();
    let xs = xj_thresholds(rho)?;
    let x1 = xs[0];
    let x2 = xs[1];
    let ctx = SuperchampionContext {
        n,
        slope,
        rho,
        k: champion.k,
        p_k: champion.p_k,
        champion,
        ell_n,
        n_plus_ell,
        sqrt_x1: x1.sqrt(),
        b1: b1(x1, x2),
        xs,
        x1,
        x2,
    };
    Ok(ctx)
}

/// All superchampions in increasing order, starting from 1.
pub struct ChampionIter {
    table: Arc<PrimeTable>,
    heap: BinaryHeap<Reverse<HeapKey>>,
    next_base: usize,
    factors: Vec<(u64, u32)>,
    ell: u64,
    started: bool,
}

impl ChampionIter {
    pub fn new(table: Arc<PrimeTable>) -> ChampionIter {
        let mut heap = BinaryHeap::new();
        heap.push(key(2, 1));
        heap.push(key(3, 1));
        ChampionIter {
            table,
            heap,
            next_base: 2,
            factors: Vec::new(),
            ell: 0,
            started: false,
        }
    }
}

impl Iterator for ChampionIter {
    /// `(N, ℓ(N), slope leading to N)`; the slope is `None` for 1.
    type Item = (PrimeFraction, u64, Option<Slope>);

    fn next(&mut self) -> Option<Self::Item> {
        if !self.started {
            self.started = true;
            return Some((PrimeFraction::one(), 0, None));
        }
        let Reverse(HeapKey(_, q, j)) = self.heap.pop()?;
        if j == 1 && self.table.prime(self.next_base) == q {
            // stop quietly at the end of the table
            if self.next_base + 1 > self.table.len() {
                return None;
            }
            self.next_base += 1;
            let nq = self.table.prime(self.next_base);
            self.heap.push(key(nq, 1));
        }
        self.heap.push(key(q, j + 1));
        match self.factors.binary_search_by_key(&q, |&(p, _)| p) {
            Ok(i) => self.factors[i].1 += 1,
            Err(i) => self.factors.insert(i, (q, 1)),
        }
        self.ell += weight(q, j);
        let f = PrimeFraction::from_sorted(
            self.factors.iter().map(|&(p, e)| (p, e as i32)).collect(),
        );
        debug_assert_eq!(f.ell(), self.ell as i64);
        Some((f, self.ell, Some(Slope::new(q, j))))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn table(limit: u64) -> PrimeTable {
        PrimeTable::build(limit).unwrap()
    }

    #[test]
    fn first_champions() {
        let t = Arc::new(table(1000));
        let got: Vec<(String, u64)> = ChampionIter::new(t)
            .take(8)
            .map(|(f, l, _)| (f.to_decimal(100).unwrap(), l))
            .collect();
        let want = [
            ("1", 0),
            ("3", 3),
            ("6", 5),
            ("12", 7),
            ("60", 12),
            ("420", 19),
            ("4620", 30),
            ("60060", 43),
        ];
        for (g, w) in got.iter().zip(want.iter()) {
            assert_eq!((g.0.as_str(), g.1), (w.0, w.1));
        }
    }

    #[test]
    fn e2_rows() {
        let t = table(100_000);
        let e2 = build_e2_table(10_000, &t).unwrap();
        let rows: Vec<[u64; 4]> = e2.iter().take(11).map(|e| [e.q, e.j as u64, e.p, e.l]).collect();
        assert_eq!(
            rows,
            vec![
                [2, 2, 3, 7],
                [3, 2, 13, 49],
                [2, 3, 13, 53],
                [2, 4, 43, 301],
                [5, 2, 47, 368],
                [3, 3, 67, 626],
                [7, 2, 97, 1160],
                [2, 5, 107, 1487],
                [11, 2, 251, 6307],
                [2, 6, 251, 6339],
                [3, 4, 271, 7453],
            ]
        );
        assert!(e2.last().unwrap().l > 10_000);
        assert!(e2[e2.len() - 2].l <= 10_000);
    }

    #[test]
    fn contexts_for_small_n() {
        let t = table(100_000);
        let e2 = build_e2_table(100_000, &t).unwrap();
        let c = find_context(12, &e2, &t).unwrap();
        assert_eq!(c.champion.to_fraction(&t), PrimeFraction::from_u64(60));
        assert_eq!(c.ell_n, 12);
        assert_eq!(c.slope, Slope::new(7, 1));
        let c = find_context(43, &e2, &t).unwrap();
        assert_eq!(c.champion.to_fraction(&t), PrimeFraction::from_u64(60060));
        assert_eq!(c.ell_n, 43);
        let c = find_context(7, &e2, &t).unwrap();
        assert_eq!(c.champion.to_fraction(&t), PrimeFraction::from_u64(12));
        assert_eq!(c.slope, Slope::new(5, 1));
        // successive costs inside an E2 gap
        for (n, l) in [(420, 368), (421, 421), (479, 421), (480, 480), (541, 541), (608, 608)] {
            assert_eq!(find_context(n, &e2, &t).unwrap().ell_n, l, "n={n}");
        }
        assert!(find_context(6, &e2, &t).is_err());
    }

    #[test]
    fn context_for_one_million() {
        let t = table(3_000_000);
        let e2 = build_e2_table(1_000_000, &t).unwrap();
        let c = find_context(1_000_000, &e2, &t).unwrap();
        assert_eq!(c.ell_n, 998093);
        assert_eq!(c.champion.render(&t), "2^9 * 3^6 * 5^4 * 7^3 * [11-41]^2 * [43-3923]");
        assert!(c.ell_n <= c.n && c.n < c.n_plus_ell);
        assert!(Real::from_u64(c.p_k) < c.x1);
        assert!(c.x1 <= Real::from_u64(t.next_prime(c.p_k).unwrap()));
        assert!(Real::from(2.0) < c.x2 && c.x2 < c.sqrt_x1 && c.sqrt_x1 < c.rho && c.rho < c.x1);
        let f = champion_factorization(&c.xs, &t).unwrap();
        assert_eq!(f, c.champion.to_fraction(&t));
        assert_eq!(f.ell() as u64, c.ell_n);
    }

    #[test]
    fn thresholds() {
        let r5 = Slope::new(5, 1).value();
        let xs = xj_thresholds(r5).unwrap();
        assert!((xs[0] - Real::from(5.0)).abs().to_f64() < 1e-25);
        assert!(xs[1].to_f64() > 2.0);
        assert!(xs.last().unwrap().to_f64() < 2.0);
        let r7 = Slope::new(7, 1).value();
        let xs = xj_thresholds(r7).unwrap();
        assert!((xs[0] - Real::from(7.0)).abs().to_f64() < 1e-25);
        let rho = Real::from(12661.7);
        let xs = xj_thresholds(rho).unwrap();
        for (i, &x) in xs.iter().enumerate() {
            let r = threshold_residual(x, i as u32 + 1, rho);
            assert!(r.abs().to_f64() <= 1e-20 * rho.to_f64(), "j={} r={r:?}", i + 1);
        }
        assert!(xs.windows(2).all(|w| w[0] > w[1]));
        assert!(xj_thresholds(Real::from(3.0)).is_err());
    }

    #[test]
    fn b1_formula() {
        let v = b1(Real::from(25.0), Real::from(4.2)).to_f64();
        assert!((v - 7.5).abs() < 1e-12);
        let v = b1(Real::from(100.0), Real::from(3.0)).to_f64();
        assert!((v - 3.0).abs() < 1e-12);
    }

    #[test]
    fn slope_exponents() {
        let two = Slope::new(2, 1);
        assert_eq!(two.cmp_slope(&Slope::new(2, 2)), Ordering::Equal);
        assert_eq!(champion_exponent(2, &two, false), 0);
        assert_eq!(champion_exponent(2, &two, true), 2);
        assert_eq!(champion_exponent(3, &two, false), 1);
        let s = Slope::new(5, 1);
        assert_eq!(champion_exponent(5, &s, false), 0);
        assert_eq!(champion_exponent(5, &s, true), 1);
        assert_eq!(champion_exponent(2, &s, false), 2);
        assert_eq!(champion_exponent(3, &s, false), 1);
    }
}
