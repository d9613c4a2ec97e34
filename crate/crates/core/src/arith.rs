//! Factored integers and prime fractions, the additive cost ℓ, and
//! comparison through high-precision logarithms.

use std::cell::RefCell;
use std::cmp::Ordering;
use std::fmt;
use std::hash::{Hash, Hasher};
use std::sync::atomic::{AtomicU32, Ordering as AtomicOrdering};

use num_bigint::BigUint;
use num_traits::One;

use crate::error::{LandauError, Result};
use crate::primes::{is_prime_u64, PrimeTable};
use crate::real::{Real, REAL_DIGITS};

/// Alias used in public signatures for the working-precision real type.
pub type HighPrecisionReal = Real;

static PRECISION: AtomicU32 = AtomicU32::new(30);

/// Set the number of significant digits trusted in log comparisons.
///
/// Must lie in `20..=31`; the double-double type cannot honour more.
pub fn set_precision(digits: u32) -> Result<()> {
    if !(20..=REAL_DIGITS).contains(&digits) {
        return Err(LandauError::InvalidInput(format!(
            "precision must be between 20 and {REAL_DIGITS} digits, got {digits}"
        )));
    }
    PRECISION.store(digits, AtomicOrdering::Relaxed);
    Ok(())
}

pub fn precision() -> u32 {
    PRECISION.load(AtomicOrdering::Relaxed)
}

const SMALL_LN: usize = 1 << 16;

thread_local! {
    static LN_CACHE: RefCell<Vec<Real>> = const { RefCell::new(Vec::new()) };
}

/// Natural log of a positive integer; memoized below 2^16.
pub fn ln_int(p: u64) -> Real {
    if (p as usize) < SMALL_LN {
        LN_CACHE.with(|c| {
            let mut c = c.borrow_mut();
            if c.is_empty() {
                c.resize(SMALL_LN, Real::from(f64::NAN));
            }
            let v = c[p as usize];
            if v.hi().is_nan() {
                let v = Real::from_u64(p).ln();
                c[p as usize] = v;
                v
            } else {
                v
            }
        })
    } else {
        Real::from_u64(p).ln()
    }
}

fn prime_power(p: u64, e: u32) -> i64 {
    p.checked_pow(e)
        .filter(|&v| v <= i64::MAX as u64)
        .unwrap_or_else(|| panic!("{p}^{e} overflows the 64-bit cost"))
        as i64
}

/// ℓ contribution of `p^e`: `p^e` for `e > 0`, `-p^{-e}` for `e < 0`.
#[inline]
pub fn ell_term(p: u64, e: i32) -> i64 {
    match e.cmp(&0) {
        Ordering::Greater => prime_power(p, e as u32),
        Ordering::Less => -prime_power(p, e.unsigned_abs()),
        Ordering::Equal => 0,
    }
}

/// A rational number `U/V` stored as its prime factorization with
/// signed exponents, together with its exact ℓ and a high-precision log.
#[derive(Clone)]
pub struct PrimeFraction {
    factors: Vec<(u64, i32)>,
    ell: i64,
    log: Real,
    mass: f64,
}

impl PrimeFraction {
    pub fn one() -> PrimeFraction {
        PrimeFraction {
            factors: Vec::new(),
            ell: 0,
            log: Real::ZERO,
            mass: 0.0,
        }
    }

    /// Build from `(prime, exponent)` pairs in any order; repeated primes
    /// are merged and zero exponents dropped. Primality is not checked.
    pub fn from_factors<I: IntoIterator<Item = (u64, i32)>>(it: I) -> PrimeFraction {
        let mut v: Vec<(u64, i32)> = it.into_iter().collect();
        v.sort_unstable_by_key(|&(p, _)| p);
        let mut out: Vec<(u64, i32)> = Vec::with_capacity(v.len());
        for (p, e) in v {
            match out.last_mut() {
                Some(last) if last.0 == p => last.1 += e,
                _ => out.push((p, e)),
            }
        }
        out.retain(|&(_, e)| e != 0);
        Self::from_sorted(out)
    }

    /// Build from pairs already sorted by strictly increasing prime with
    /// non-zero exponents.
    pub fn from_sorted(factors: Vec<(u64, i32)>) -> PrimeFraction {
        debug_assert!(factors.windows(2).all(|w| w[0].0 < w[1].0));
        debug_assert!(factors.iter().all(|&(_, e)| e != 0));
        let mut ell = 0i64;
        let mut log = Real::ZERO;
        let mut mass = 0.0;
        for &(p, e) in &factors {
            ell += ell_term(p, e);
            let l = ln_int(p);
            log += l.mul_f64(e as f64);
            mass += (e.unsigned_abs() as f64) * l.hi();
        }
        PrimeFraction {
            factors,
            ell,
            log,
            mass,
        }
    }

    pub fn prime(p: u64) -> PrimeFraction {
        Self::from_sorted(vec![(p, 1)])
    }

    pub fn prime_power(p: u64, e: i32) -> PrimeFraction {
        if e == 0 {
            Self::one()
        } else {
            Self::from_sorted(vec![(p, e)])
        }
    }

    /// Product of the given primes divided by the product of `den`.
    pub fn ratio(num: &[u64], den: &[u64]) -> PrimeFraction {
        Self::from_factors(
            num.iter()
                .map(|&p| (p, 1))
                .chain(den.iter().map(|&q| (q, -1))),
        )
    }

    /// Factor a positive integer by trial division.
    pub fn from_u64(mut n: u64) -> PrimeFraction {
        assert!(n > 0, "cannot factor zero");
        let mut f = Vec::new();
        let mut d = 2u64;
        while d * d <= n {
            if n.is_multiple_of(d) {
                let mut e = 0;
                while n.is_multiple_of(d) {
                    n /= d;
                    e += 1;
                }
                f.push((d, e));
            }
            d += if d == 2 { 1 } else { 2 };
        }
        if n > 1 {
            f.push((n, 1));
        }
        Self::from_sorted(f)
    }

    pub fn factors(&self) -> &[(u64, i32)] {
        &self.factors
    }

    pub fn is_one(&self) -> bool {
        self.factors.is_empty()
    }

    /// True when no exponent is negative.
    pub fn is_integer(&self) -> bool {
        self.factors.iter().all(|&(_, e)| e > 0)
    }

    /// ℓ of the fraction: ℓ(U) − ℓ(V).
    pub fn ell(&self) -> i64 {
        self.ell
    }

    pub fn ln(&self) -> Real {
        self.log
    }

    pub fn log10(&self) -> Real {
        self.log / Real::LN_10
    }

    pub fn exponent(&self, p: u64) -> i32 {
        match self.factors.binary_search_by_key(&p, |&(q, _)| q) {
            Ok(i) => self.factors[i].1,
            Err(_) => 0,
        }
    }

    pub fn numerator(&self) -> PrimeFraction {
        Self::from_sorted(self.factors.iter().copied().filter(|&(_, e)| e > 0).collect())
    }

    pub fn denominator(&self) -> PrimeFraction {
        Self::from_sorted(
            self.factors
                .iter()
                .filter(|&&(_, e)| e < 0)
                .map(|&(p, e)| (p, -e))
                .collect(),
        )
    }

    /// Largest prime with a positive exponent.
    pub fn largest_prime(&self) -> Option<u64> {
        self.factors.iter().rev().find(|&&(_, e)| e > 0).map(|&(p, _)| p)
    }

    pub fn inv(&self) -> PrimeFraction {
        PrimeFraction {
            factors: self.factors.iter().map(|&(p, e)| (p, -e)).collect(),
            ell: -self.ell,
            log: -self.log,
            mass: self.mass,
        }
    }

    /// Exponent-wise sum with cancellation; caches are updated
    /// incrementally.
    pub fn mul(&self, other: &PrimeFraction) -> PrimeFraction {
        let (a, b) = (&self.factors, &other.factors);
        let mut out = Vec::with_capacity(a.len() + b.len());
        let mut ell = self.ell + other.ell;
        let (mut i, mut j) = (0, 0);
        while i < a.len() && j < b.len() {
            match a[i].0.cmp(&b[j].0) {
                Ordering::Less => {
                    out.push(a[i]);
                    i += 1;
                }
                Ordering::Greater => {
                    out.push(b[j]);
                    j += 1;
                }
                Ordering::Equal => {
                    let p = a[i].0;
                    let e = a[i].1 + b[j].1;
                    ell += ell_term(p, e) - ell_term(p, a[i].1) - ell_term(p, b[j].1);
                    if e != 0 {
                        out.push((p, e));
                    }
                    i += 1;
                    j += 1;
                }
            }
        }
        out.extend_from_slice(&a[i..]);
        out.extend_from_slice(&b[j..]);
        let (log, mass) = if out.is_empty() {
            (Real::ZERO, 0.0)
        } else {
            (self.log + other.log, self.mass + other.mass)
        };
        PrimeFraction {
            factors: out,
            ell,
            log,
            mass,
        }
    }

    pub fn div(&self, other: &PrimeFraction) -> PrimeFraction {
        self.mul(&other.inv())
    }

    /// Multiply by `p^e`.
    pub fn mul_prime_power(&self, p: u64, e: i32) -> PrimeFraction {
        self.mul(&Self::prime_power(p, e))
    }

    /// Recompute ℓ and the log from the factors alone.
    pub fn recomputed(&self) -> PrimeFraction {
        Self::from_sorted(self.factors.clone())
    }

    /// Upper bound on the absolute error of the cached log.
    fn log_guard(&self, other: &PrimeFraction) -> f64 {
        let eps = 10f64.powi(-(precision() as i32));
        10.0 * eps * (self.mass + other.mass + 1.0)
    }

    /// Numerator and denominator as big integers.
    pub fn to_big_ratio(&self) -> (BigUint, BigUint) {
        let num: Vec<(u64, u32)> = self
            .factors
            .iter()
            .filter(|&&(_, e)| e > 0)
            .map(|&(p, e)| (p, e as u32))
            .collect();
        let den: Vec<(u64, u32)> = self
            .factors
            .iter()
            .filter(|&&(_, e)| e < 0)
            .map(|&(p, e)| (p, e.unsigned_abs()))
            .collect();
        (product_tree(&num), product_tree(&den))
    }

    /// Exact comparison by cross multiplication.
    pub fn cmp_exact(&self, other: &PrimeFraction) -> Ordering {
        // a/b vs c/d  <=>  a*d vs c*b, and a*d / (c*b) = self / other
        let q = self.div(other);
        let (num, den) = q.to_big_ratio();
        num.cmp(&den)
    }

    /// Order by logarithm, falling back to exact arithmetic when the two
    /// logs are closer than the guard band.
    pub fn cmp_value(&self, other: &PrimeFraction) -> Ordering {
        if self.factors == other.factors {
            return Ordering::Equal;
        }
        self.cmp_guarded(other, self.log_guard(other))
    }

    fn cmp_guarded(&self, other: &PrimeFraction, g: f64) -> Ordering {
        let d = (self.log - other.log).to_f64();
        if d > g {
            Ordering::Greater
        } else if d < -g {
            Ordering::Less
        } else {
            self.cmp_exact(other)
        }
    }

    /// Decimal digits of the integer value, refusing beyond `digit_budget`.
    pub fn to_decimal(&self, digit_budget: u64) -> Result<String> {
        let est = self.log10().to_f64().abs().ceil() as u64 + 1;
        if est > digit_budget {
            return Err(LandauError::Capacity(format!(
                "about {est} digits exceed the digit budget {digit_budget}"
            )));
        }
        let (num, den) = self.to_big_ratio();
        if den.is_one() {
            Ok(num.to_str_radix(10))
        } else {
            Ok(format!("{num}/{den}"))
        }
    }

    /// Canonical rendering; consecutive-prime runs are detected with
    /// `table` when given, by primality testing otherwise.
    pub fn render_with(&self, table: Option<&PrimeTable>) -> String {
        let num: Vec<(u64, i32)> = self.factors.iter().copied().filter(|&(_, e)| e > 0).collect();
        let den: Vec<(u64, i32)> = self
            .factors
            .iter()
            .filter(|&&(_, e)| e < 0)
            .map(|&(p, e)| (p, -e))
            .collect();
        let n = render_product(&num, table);
        if den.is_empty() {
            return n;
        }
        let d = render_product(&den, table);
        let d_terms = d.contains(" * ");
        if d_terms {
            format!("{n} / ({d})")
        } else {
            format!("{n} / {d}")
        }
    }

    pub fn render(&self) -> String {
        self.render_with(None)
    }

    /// Parse the canonical rendering.
    pub fn parse(s: &str) -> Result<PrimeFraction> {
        parse_fraction(s)
    }
}

/// Product of `p^e` over the list by binary splitting.
pub fn product_tree(items: &[(u64, u32)]) -> BigUint {
    match items.len() {
        0 => BigUint::one(),
        1 => BigUint::from(items[0].0).pow(items[0].1),
        n => {
            let (a, b) = items.split_at(n / 2);
            product_tree(a) * product_tree(b)
        }
    }
}

fn consecutive(a: u64, b: u64, table: Option<&PrimeTable>) -> bool {
    if let Some(t) = table {
        if b <= t.limit() {
            return match (t.index_of(a), t.index_of(b)) {
                (Some(i), Some(j)) => j == i + 1,
                _ => false,
            };
        }
    }
    if b <= a {
        return false;
    }
    (a + 1..b).all(|x| !is_prime_u64(x))
}

/// Render a product of positive prime powers, bracketing runs of three
/// or more consecutive primes sharing an exponent.
pub fn render_product(f: &[(u64, i32)], table: Option<&PrimeTable>) -> String {
    if f.is_empty() {
        return "1".to_string();
    }
    let mut parts = Vec::new();
    let mut i = 0;
    while i < f.len() {
        let mut j = i;
        while j + 1 < f.len() && f[j + 1].1 == f[i].1 && consecutive(f[j].0, f[j + 1].0, table) {
            j += 1;
        }
        if j >= i + 2 {
            parts.push(power_str(&format!("[{}-{}]", f[i].0, f[j].0), f[i].1));
            i = j + 1;
        } else {
            parts.push(power_str(&f[i].0.to_string(), f[i].1));
            i += 1;
        }
    }
    parts.join(" * ")
}

fn power_str(base: &str, e: i32) -> String {
    if e == 1 {
        base.to_string()
    } else {
        format!("{base}^{e}")
    }
}

fn primes_between(a: u64, b: u64) -> Result<Vec<u64>> {
    if a > b {
        return Err(LandauError::Parse(format!("empty prime range [{a}-{b}]")));
    }
    if b < 3 {
        return Ok(if a <= 2 && b >= 2 { vec![2] } else { vec![] });
    }
    if b - a < 100_000 {
        return Ok((a..=b).filter(|&x| is_prime_u64(x)).collect());
    }
    let t = PrimeTable::build(b)?;
    let lo = t.pi(a.saturating_sub(1));
    Ok(t.primes()[lo..].iter().map(|&p| p as u64).collect())
}

fn parse_product(s: &str, out: &mut Vec<(u64, i32)>, sign: i32) -> Result<()> {
    let s = s.trim();
    let s = s
        .strip_prefix('(')
        .and_then(|x| x.strip_suffix(')'))
        .unwrap_or(s)
        .trim();
    if s == "1" {
        return Ok(());
    }
    let bad = |t: &str| LandauError::Parse(format!("bad factor {t:?}"));
    for term in s.split('*') {
        let term = term.trim();
        let (base, exp) = match term.rsplit_once('^') {
            Some((b, e)) if !b.ends_with('-') => {
                let e: i32 = e.trim().parse().map_err(|_| bad(term))?;
                if e <= 0 {
                    return Err(bad(term));
                }
                (b.trim(), e)
            }
            _ => (term, 1),
        };
        if let Some(inner) = base.strip_prefix('[').and_then(|x| x.strip_suffix(']')) {
            let (a, b) = inner.split_once('-').ok_or_else(|| bad(term))?;
            let a: u64 = a.trim().parse().map_err(|_| bad(term))?;
            let b: u64 = b.trim().parse().map_err(|_| bad(term))?;
            if !is_prime_u64(a) || !is_prime_u64(b) {
                return Err(LandauError::Parse(format!("range ends must be prime: {term}")));
            }
            for p in primes_between(a, b)? {
                check_power(p, exp)?;
                out.push((p, sign * exp));
            }
        } else {
            let p: u64 = base.parse().map_err(|_| bad(term))?;
            if !is_prime_u64(p) {
                return Err(LandauError::Parse(format!("{p} is not prime")));
            }
            check_power(p, exp)?;
            out.push((p, sign * exp));
        }
    }
    Ok(())
}

fn check_power(p: u64, e: i32) -> Result<()> {
    match p.checked_pow(e as u32) {
        Some(v) if v <= i64::MAX as u64 => Ok(()),
        _ => Err(LandauError::Parse(format!("{p}^{e} is too large"))),
    }
}

fn parse_fraction(s: &str) -> Result<PrimeFraction> {
    let mut f = Vec::new();
    match s.split_once('/') {
        Some((n, d)) => {
            parse_product(n, &mut f, 1)?;
            parse_product(d, &mut f, -1)?;
        }
        None => parse_product(s, &mut f, 1)?,
    }
    Ok(PrimeFraction::from_factors(f))
}

impl PartialEq for PrimeFraction {
    fn eq(&self, other: &Self) -> bool {
        self.factors == other.factors
    }
}

impl Eq for PrimeFraction {}

impl Hash for PrimeFraction {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.factors.hash(state);
    }
}

impl PartialOrd for PrimeFraction {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for PrimeFraction {
    fn cmp(&self, other: &Self) -> Ordering {
        self.cmp_value(other)
    }
}

impl fmt::Display for PrimeFraction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.render())
    }
}

impl fmt::Debug for PrimeFraction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "PrimeFraction({})", self.render())
    }
}

impl std::str::FromStr for PrimeFraction {
    type Err = LandauError;
    fn from_str(s: &str) -> Result<Self> {
        parse_fraction(s)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pf(s: &str) -> PrimeFraction {
        s.parse().unwrap()
    }

    #[test]
    fn ell_values() {
        assert_eq!(PrimeFraction::one().ell(), 0);
        assert_eq!(PrimeFraction::from_u64(12).ell(), 7);
        assert_eq!(PrimeFraction::from_u64(60060).ell(), 43);
        assert_eq!(pf("43 / 41").ell(), 2);
        assert_eq!(pf("37 * 150991 / (2 * 3 * 148399)").ell(), 37 + 150991 - 2 - 3 - 148399);
    }

    #[test]
    fn multiplication() {
        let a = pf("43 / 41");
        assert!(a.mul(&a.inv()).is_one());
        assert_eq!(a.mul(&a.inv()).ln(), Real::ZERO);
        let b = PrimeFraction::from_u64(12).mul(&PrimeFraction::prime(3));
        assert_eq!(b, PrimeFraction::from_u64(36));
        assert_eq!(b.ell(), 13);
        let c = pf("43 * 3947 / 3847").mul(&PrimeFraction::prime(3847));
        assert_eq!(c, PrimeFraction::ratio(&[43, 3947], &[]));
        assert_eq!(c.ell(), 43 + 3947);
        // cancellation to a different exponent
        let d = pf("2^3").mul(&pf("1 / 2^5"));
        assert_eq!(d.factors(), &[(2, -2)]);
        assert_eq!(d.ell(), -4);
    }

    #[test]
    fn comparison() {
        let a = PrimeFraction::ratio(&[107, 113], &[97, 101]);
        let b = PrimeFraction::ratio(&[109], &[97]);
        assert_eq!(a.cmp(&b), Ordering::Greater);
        assert_eq!(a.cmp(&a.clone()), Ordering::Equal);
        let c = PrimeFraction::ratio(&[11], &[2, 5]);
        let d = PrimeFraction::ratio(&[43], &[41]);
        assert_eq!(c.cmp(&d), Ordering::Greater);
        assert_eq!(c.cmp_exact(&d), Ordering::Greater);
    }

    #[test]
    fn near_ties_use_exact_fallback() {
        // a huge guard forces every comparison through big integers
        let xs = [
            pf("2^40"),
            pf("3^25"),
            pf("5^17 / 7"),
            pf("1000003 * 1000033"),
            pf("1000037 * 1000039"),
            pf("43 / 41"),
        ];
        for a in &xs {
            for b in &xs {
                let expect = a.cmp_guarded(b, 0.0);
                assert_eq!(a.cmp_guarded(b, 1e9), expect, "{a} vs {b}");
            }
        }
    }

    #[test]
    fn decimal() {
        assert_eq!(PrimeFraction::from_u64(12).to_decimal(100).unwrap(), "12");
        assert_eq!(PrimeFraction::ratio(&[2, 3, 5, 7], &[]).to_decimal(100).unwrap(), "210");
        assert_eq!(pf("2^4 * 3^2 * 5 * 7 * 11 * 13 * 17 * 19").to_decimal(100).unwrap(), "232792560");
        assert_eq!(pf("43 / 41").to_decimal(100).unwrap(), "43/41");
        assert!(pf("2^60").to_decimal(5).is_err());
    }

    #[test]
    fn render_and_parse() {
        let n = pf("2^9 * 3^6 * 5^4 * 7^3 * [11-41]^2 * [43-3923]");
        assert_eq!(n.ell(), 998093);
        assert_eq!(n.render(), "2^9 * 3^6 * 5^4 * 7^3 * [11-41]^2 * [43-3923]");
        let g = pf("37 * 150991 / (2 * 3 * 148399)");
        assert_eq!(g.render(), "37 * 150991 / (2 * 3 * 148399)");
        assert_eq!(pf("1 / 7").render(), "1 / 7");
        assert_eq!(PrimeFraction::one().render(), "1");
        assert_eq!(pf("11^4 * 13^4").render(), "11^4 * 13^4");
        assert_eq!(pf("[11-13]^4"), pf("11^4 * 13^4"));
        assert!(PrimeFraction::parse("4").is_err());
        assert!(PrimeFraction::parse("[10-13]").is_err());
        assert!(PrimeFraction::parse("2^x").is_err());
        assert!(PrimeFraction::parse("2^100").is_err());
    }

    #[test]
    fn render_with_table_agrees() {
        let t = PrimeTable::build(10_000).unwrap();
        let n = pf("2^9 * 3^6 * 5^4 * 7^3 * [11-41]^2 * [43-3923]");
        assert_eq!(n.render_with(Some(&t)), n.render());
    }

    #[test]
    fn precision_bounds() {
        assert!(set_precision(19).is_err());
        assert!(set_precision(40).is_err());
        set_precision(30).unwrap();
        assert_eq!(precision(), 30);
    }

    #[test]
    fn ln_cache_matches_direct() {
        for p in [2u64, 3, 65521, 65537, 192678883] {
            let a = ln_int(p);
            let b = Real::from_u64(p).ln();
            assert!((a - b).abs().to_f64() < 1e-29);
        }
    }
}
