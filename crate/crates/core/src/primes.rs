//! Prime table: segmented sieve, indexed access, prefix sums and
//! record gaps.
//!
//! Indices are 1-based throughout: `prime(1) == 2`, and
//! `cumsum(i) == p_1 + ... + p_i` with `cumsum(0) == 0`.

use std::fs;
use std::io::{Read, Write};
use std::path::{Path, PathBuf};

use crate::error::{LandauError, Result};

const SEGMENT: usize = 1 << 20;
const CACHE_MAGIC: &[u8; 8] = b"LANDAUPT";
const CACHE_VERSION: u32 = 1;

/// Upper bound on the sieve limit; primes are stored as `u32`.
pub const MAX_LIMIT: u64 = 4_000_000_000;

#[derive(Clone, Debug)]
pub struct PrimeTable {
    limit: u64,
    primes: Vec<u32>,
    sums: Vec<u64>,
    gaps: GapTable,
}

/// Record gaps: `(p, d)` where `d = p - prev_prime(p)` exceeds every
/// earlier gap.
#[derive(Clone, Debug, Default)]
pub struct GapTable {
    thresholds: Vec<(u64, u64)>,
}

impl GapTable {
    pub fn thresholds(&self) -> &[(u64, u64)] {
        &self.thresholds
    }

    /// Largest gap `p_j - p_{j-1}` with `p_j <= x`.
    pub fn max_gap_upto(&self, x: u64) -> u64 {
        let i = self.thresholds.partition_point(|&(p, _)| p <= x);
        if i == 0 {
            0
        } else {
            self.thresholds[i - 1].1
        }
    }
}

/// Automatic sieve limit for a given `n`: `2.7 sqrt(n log n) + 10^6`.
pub fn default_limit(n: u64) -> u64 {
    let nf = (n.max(3)) as f64;
    (2.7 * (nf * nf.ln()).sqrt()) as u64 + 1_000_000
}

fn base_primes(limit: u64) -> Vec<u64> {
    let r = (limit as f64).sqrt() as u64 + 2;
    let mut is = vec![true; r as usize + 1];
    let mut out = Vec::new();
    for i in 2..=r as usize {
        if is[i] {
            out.push(i as u64);
            let mut j = i * i;
            while j <= r as usize {
                is[j] = false;
                j += i;
            }
        }
    }
    out
}

fn sieve(limit: u64) -> Vec<u32> {
    let mut primes: Vec<u32> = Vec::with_capacity(estimate_count(limit));
    if limit < 2 {
        return primes;
    }
    primes.push(2);
    let base: Vec<u64> = base_primes(limit).into_iter().filter(|&p| p > 2).collect();
    // segment over odd numbers: slot i stands for lo + 2i
    let mut seg = vec![0u8; SEGMENT];
    let mut lo = 3u64;
    while lo <= limit {
        let hi = (lo + 2 * SEGMENT as u64 - 1).min(limit);
        let len = ((hi - lo) / 2 + 1) as usize;
        seg[..len].fill(1);
        for &p in &base {
            let p2 = p * p;
            if p2 > hi {
                break;
            }
            let mut start = if p2 >= lo {
                p2
            } else {
                let m = lo.div_ceil(p) * p;
                if m % 2 == 0 {
                    m + p
                } else {
                    m
                }
            };
            if start < lo {
                start += 2 * p;
            }
            let mut i = ((start - lo) / 2) as usize;
            let step = p as usize;
            while i < len {
                seg[i] = 0;
                i += step;
            }
        }
        for (i, &flag) in seg[..len].iter().enumerate() {
            if flag != 0 {
                primes.push((lo + 2 * i as u64) as u32);
            }
        }
        lo = hi + 1;
        if lo.is_multiple_of(2) {
            lo += 1;
        }
    }
    primes
}

fn estimate_count(limit: u64) -> usize {
    if limit < 100 {
        return 32;
    }
    let x = limit as f64;
    (1.26 * x / x.ln()) as usize
}

impl PrimeTable {
    /// Sieve all primes up to `limit`.
    pub fn build(limit: u64) -> Result<PrimeTable> {
        if limit < 3 {
            return Err(LandauError::InvalidInput(format!(
                "sieve limit must be at least 3, got {limit}"
            )));
        }
        if limit > MAX_LIMIT {
            return Err(LandauError::Capacity(format!(
                "sieve limit {limit} exceeds {MAX_LIMIT}"
            )));
        }
        Ok(Self::from_primes(limit, sieve(limit)))
    }

    fn from_primes(limit: u64, primes: Vec<u32>) -> PrimeTable {
        let mut sums = Vec::with_capacity(primes.len() + 1);
        sums.push(0u64);
        let mut acc = 0u64;
        let mut thresholds = Vec::new();
        let mut best = 0u64;
        let mut prev = 0u64;
        for &p in &primes {
            let p = p as u64;
            acc = acc.checked_add(p).expect("prime sum overflow");
            sums.push(acc);
            if prev > 0 && p - prev > best {
                best = p - prev;
                let lx = (p as f64).ln();
                assert!(
                    (best as f64) <= 0.93 * lx * lx,
                    "prime gap {best} at {p} breaks the 0.93 log^2 bound"
                );
                thresholds.push((p, best));
            }
            prev = p;
        }
        assert!(acc < (1u64 << 63));
        PrimeTable {
            limit,
            primes,
            sums,
            gaps: GapTable { thresholds },
        }
    }

    /// Load a cached table from `dir`, or sieve and store it there.
    pub fn load_or_build(limit: u64, dir: Option<&Path>) -> Result<PrimeTable> {
        let Some(dir) = dir else {
            return Self::build(limit);
        };
        let path = cache_path(dir, limit);
        if let Ok(t) = Self::read_cache(&path) {
            if t.limit == limit {
                return Ok(t);
            }
        }
        let t = Self::build(limit)?;
        // a failed cache write is not fatal
        let _ = t.write_cache(&path);
        Ok(t)
    }

    pub fn write_cache(&self, path: &Path) -> Result<()> {
        if let Some(parent) = path.parent() {
            fs::create_dir_all(parent)?;
        }
        let tmp = path.with_extension("tmp");
        {
            let mut f = std::io::BufWriter::new(fs::File::create(&tmp)?);
            f.write_all(CACHE_MAGIC)?;
            f.write_all(&CACHE_VERSION.to_le_bytes())?;
            f.write_all(&self.limit.to_le_bytes())?;
            f.write_all(&(self.primes.len() as u64).to_le_bytes())?;
            for &p in &self.primes {
                f.write_all(&p.to_le_bytes())?;
            }
            f.flush()?;
        }
        fs::rename(tmp, path)?;
        Ok(())
    }

    pub fn read_cache(path: &Path) -> Result<PrimeTable> {
        let mut f = std::io::BufReader::new(fs::File::open(path)?);
        let mut magic = [0u8; 8];
        f.read_exact(&mut magic)?;
        let mut b4 = [0u8; 4];
        let mut b8 = [0u8; 8];
        f.read_exact(&mut b4)?;
        if &magic != CACHE_MAGIC || u32::from_le_bytes(b4) != CACHE_VERSION {
            return Err(LandauError::Parse("stale or foreign prime cache".into()));
        }
        f.read_exact(&mut b8)?;
        let limit = u64::from_le_bytes(b8);
        f.read_exact(&mut b8)?;
        let count = u64::from_le_bytes(b8) as usize;
        let mut raw = vec![0u8; count * 4];
        f.read_exact(&mut raw)?;
        let primes: Vec<u32> = raw
            .chunks_exact(4)
            .map(|c| u32::from_le_bytes([c[0], c[1], c[2], c[3]]))
            .collect();
        if primes.first() != Some(&2) || primes.windows(2).any(|w| w[0] >= w[1]) {
            return Err(LandauError::Parse("corrupt prime cache".into()));
        }
        Ok(Self::from_primes(limit, primes))
    }

    pub fn limit(&self) -> u64 {
        self.limit
    }

    /// Number of primes in the table.
    pub fn len(&self) -> usize {
        self.primes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.primes.is_empty()
    }

    pub fn primes(&self) -> &[u32] {
        &self.primes
    }

    pub fn cumulative_sums(&self) -> &[u64] {
        &self.sums
    }

    pub fn gaps(&self) -> &GapTable {
        &self.gaps
    }

    /// The `i`-th prime, 1-based.
    #[inline]
    pub fn prime(&self, i: usize) -> u64 {
        self.primes[i - 1] as u64
    }

    /// The `i`-th prime if it is in the table.
    pub fn try_prime(&self, i: usize) -> Result<u64> {
        if i == 0 || i > self.primes.len() {
            return Err(LandauError::Capacity(format!(
                "prime index {i} beyond table of {} primes (limit {})",
                self.primes.len(),
                self.limit
            )));
        }
        Ok(self.prime(i))
    }

    /// `p_1 + ... + p_i`.
    #[inline]
    pub fn cumsum(&self, i: usize) -> u64 {
        self.sums[i]
    }

    /// Number of primes `<= x`.
    pub fn pi(&self, x: u64) -> usize {
        if x >= u32::MAX as u64 {
            return self.primes.len();
        }
        self.primes.partition_point(|&p| (p as u64) <= x)
    }

    /// Sum of primes `<= x`.
    pub fn sum_upto(&self, x: u64) -> u64 {
        self.sums[self.pi(x)]
    }

    /// 1-based index of `p` if it is a prime in the table.
    pub fn index_of(&self, p: u64) -> Option<usize> {
        let i = self.pi(p);
        (i > 0 && self.prime(i) == p).then_some(i)
    }

    pub fn is_prime(&self, x: u64) -> bool {
        if x <= self.limit {
            self.index_of(x).is_some()
        } else {
            is_prime_u64(x)
        }
    }

    /// Smallest prime `> x`.
    pub fn next_prime(&self, x: u64) -> Result<u64> {
        let i = self.pi(x);
        self.try_prime(i + 1)
    }

    /// Smallest prime `>= x`.
    pub fn prime_at_least(&self, x: u64) -> Result<u64> {
        self.next_prime(x.saturating_sub(1))
    }

    /// Largest prime `< x`.
    pub fn prev_prime(&self, x: u64) -> Result<u64> {
        if x < 3 {
            return Err(LandauError::OutOfRange(format!("no prime below {x}")));
        }
        if x > self.limit + 1 {
            return Err(LandauError::Capacity(format!(
                "prev_prime({x}) beyond sieve limit {}",
                self.limit
            )));
        }
        Ok(self.prime(self.pi(x - 1)))
    }

    /// `p_a + ... + p_b` for `1 <= a <= b <= len`.
    pub fn sum_prime_range(&self, a: usize, b: usize) -> Result<u64> {
        if a == 0 || a > b || b > self.primes.len() {
            return Err(LandauError::OutOfRange(format!(
                "prime index range {a}..={b} with {} primes",
                self.primes.len()
            )));
        }
        Ok(self.sums[b] - self.sums[a - 1])
    }

    /// Δ(x): the largest gap between consecutive primes up to `x`.
    pub fn max_gap_upto(&self, x: u64) -> Result<u64> {
        if x < 3 || x > self.limit {
            return Err(LandauError::OutOfRange(format!(
                "max_gap_upto({x}) outside [3, {}]",
                self.limit
            )));
        }
        Ok(self.gaps.max_gap_upto(x))
    }
}

pub fn cache_path(dir: &Path, limit: u64) -> PathBuf {
    dir.join(format!("primes-{limit}.bin"))
}

fn mul_mod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

fn pow_mod(mut b: u64, mut e: u64, m: u64) -> u64 {
    let mut r = 1u64;
    b %= m;
    while e > 0 {
        if e & 1 == 1 {
            r = mul_mod(r, b, m);
        }
        b = mul_mod(b, b, m);
        e >>= 1;
    }
    r
}

/// Deterministic Miller-Rabin for all 64-bit integers.
pub fn is_prime_u64(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    for p in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        if n.is_multiple_of(p) {
            return n == p;
        }
    }
    let mut d = n - 1;
    let mut s = 0;
    while d.is_multiple_of(2) {
        d /= 2;
        s += 1;
    }
    'witness: for a in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        let mut x = pow_mod(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mul_mod(x, x, n);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

#[cfg(test)]
mod tests {
    use super::*;

    fn naive_primes(limit: u64) -> Vec<u32> {
        (2..=limit)
            .filter(|&x| (2..x).take_while(|d| d * d <= x).all(|d| x % d != 0))
            .map(|x| x as u32)
            .collect()
    }

    #[test]
    fn small_tables_match_trial_division() {
        for limit in [3u64, 4, 10, 30, 97, 1000, 5003] {
            let t = PrimeTable::build(limit).unwrap();
            assert_eq!(t.primes(), &naive_primes(limit)[..], "limit {limit}");
        }
        assert_eq!(PrimeTable::build(10).unwrap().primes(), &[2, 3, 5, 7]);
    }

    #[test]
    fn segment_boundaries() {
        let limit = 3 * 2 * SEGMENT as u64 + 17;
        let t = PrimeTable::build(limit).unwrap();
        for w in t.primes().windows(2) {
            assert!(w[0] < w[1]);
        }
        for &p in t.primes().iter().step_by(997) {
            assert!(is_prime_u64(p as u64));
        }
        let n = t.len();
        assert_eq!(t.pi(limit), n);
    }

    #[test]
    fn counts_and_sums() {
        let t = PrimeTable::build(1_000_000).unwrap();
        assert_eq!(t.len(), 78498);
        assert_eq!(t.sum_upto(30), 129);
        assert_eq!(t.sum_upto(29), 129);
        let direct: u64 = t.primes().iter().map(|&p| p as u64).sum();
        assert_eq!(t.cumsum(t.len()), direct);
    }

    #[test]
    fn navigation() {
        let t = PrimeTable::build(1000).unwrap();
        assert_eq!(t.next_prime(7).unwrap(), 11);
        assert_eq!(t.next_prime(113).unwrap(), 127);
        assert_eq!(t.next_prime(2).unwrap(), 3);
        assert_eq!(t.next_prime(1).unwrap(), 2);
        assert_eq!(t.prev_prime(11).unwrap(), 7);
        assert_eq!(t.prev_prime(128).unwrap(), 127);
        assert_eq!(t.prev_prime(3).unwrap(), 2);
        assert!(t.prev_prime(2).is_err());
        assert!(t.next_prime(997).is_err());
        for &p in t.primes() {
            let p = p as u64;
            assert_eq!(t.next_prime(p - 1).unwrap(), p);
            if p < 997 {
                assert_eq!(t.prev_prime(p + 1).unwrap(), p);
            }
        }
    }

    #[test]
    fn range_sums() {
        let t = PrimeTable::build(100).unwrap();
        assert_eq!(t.sum_prime_range(1, 4).unwrap(), 17);
        assert_eq!(t.sum_prime_range(1, 10).unwrap(), 129);
        assert_eq!(t.sum_prime_range(5, 5).unwrap(), 11);
        assert!(t.sum_prime_range(0, 3).is_err());
        assert!(t.sum_prime_range(4, 3).is_err());
        assert!(t.sum_prime_range(1, 26).is_err());
    }

    #[test]
    fn record_gaps() {
        let t = PrimeTable::build(1_000_100).unwrap();
        assert_eq!(t.max_gap_upto(100).unwrap(), 8);
        assert_eq!(t.max_gap_upto(10_000).unwrap(), 36);
        assert_eq!(t.max_gap_upto(1_000_000).unwrap(), 114);
        assert_eq!(t.max_gap_upto(3).unwrap(), 1);
        assert!(t.max_gap_upto(2).is_err());
        let th = t.gaps().thresholds();
        assert!(th.windows(2).all(|w| w[0].1 < w[1].1 && w[0].0 < w[1].0));
    }

    #[test]
    fn miller_rabin() {
        let t = PrimeTable::build(20_000).unwrap();
        for x in 0..20_000u64 {
            assert_eq!(is_prime_u64(x), t.index_of(x).is_some(), "{x}");
        }
        assert!(is_prime_u64(192_678_883));
        assert!(is_prime_u64(18_446_744_073_709_551_557));
        assert!(!is_prime_u64(3_215_031_751));
    }

    #[test]
    fn cache_roundtrip() {
        let dir = tempfile::tempdir().unwrap();
        let a = PrimeTable::load_or_build(50_000, Some(dir.path())).unwrap();
        assert!(cache_path(dir.path(), 50_000).exists());
        let b = PrimeTable::load_or_build(50_000, Some(dir.path())).unwrap();
        assert_eq!(a.primes(), b.primes());
        assert_eq!(a.cumulative_sums(), b.cumulative_sums());
        fs::write(cache_path(dir.path(), 50_000), b"garbage").unwrap();
        let c = PrimeTable::load_or_build(50_000, Some(dir.path())).unwrap();
        assert_eq!(a.primes(), c.primes());
    }

    #[test]
    fn limits() {
        assert!(PrimeTable::build(2).is_err());
        assert!(matches!(
            PrimeTable::build(MAX_LIMIT + 1),
            Err(LandauError::Capacity(_))
        ));
    }
}
