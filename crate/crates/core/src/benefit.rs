//! Benefits, the plain-prefix sets D(B′) and the bound B on
//! ben g(n) + n − ℓ(g(n)).

use std::cmp::Ordering;

use crate::arith::{ln_int, PrimeFraction};
use crate::error::{LandauError, Result};
use crate::primes::PrimeTable;
use crate::real::Real;
use crate::superchampion::{weight, Slope, SuperchampionContext};

/// A plain prefix δ together with ben(Nδ) and ℓ(Nδ) − ℓ(N).
#[derive(Clone, Debug)]
pub struct PrefixCandidate {
    pub delta: PrimeFraction,
    pub ben: Real,
    pub dell: i64,
}

/// The bound B, its companion t₁, and the witness `M/N = δ_ω`.
#[derive(Clone, Debug)]
pub struct BoundResult {
    pub b: Real,
    pub t1: Real,
    pub witness: PrimeFraction,
    pub witness_omega: i64,
}

/// `ℓ(p^i) - ℓ(p^{i-1}) - ρ log p`, exactly zero on the slope itself.
fn step(p: u64, i: u32, ctx: &SuperchampionContext) -> Real {
    if Slope::new(p, i).cmp_slope(&ctx.slope) == Ordering::Equal {
        return Real::ZERO;
    }
    Real::from_u64(weight(p, i)) - ctx.rho * ln_int(p)
}

fn pow_ell(p: u64, e: u32) -> i64 {
    if e == 0 {
        0
    } else {
        p.checked_pow(e).expect("prime power cost overflow") as i64
    }
}

/// `ben_p` and the ℓ-change for moving the exponent of `p` from `α_p` to
/// `α_p + z`.
pub fn ben_prime(p: u64, z: i32, ctx: &SuperchampionContext) -> Result<(Real, i64)> {
    let a = ctx.alpha(p) as i32;
    if z < -a {
        return Err(LandauError::InvalidInput(format!(
            "exponent {z} of {p} below -{a}"
        )));
    }
    let mut b = Real::ZERO;
    if z > 0 {
        for i in (a + 1)..=(a + z) {
            b += step(p, i as u32, ctx);
        }
    } else {
        for i in (a + z + 1)..=a {
            b -= step(p, i as u32, ctx);
        }
    }
    let dell = pow_ell(p, (a + z) as u32) - pow_ell(p, a as u32);
    Ok((b, dell))
}

/// ben(Nδ) summed prime by prime.
pub fn ben(delta: &PrimeFraction, ctx: &SuperchampionContext) -> Result<Real> {
    Ok(ben_and_dell(delta, ctx)?.0)
}

/// `(ben(Nδ), ℓ(Nδ) − ℓ(N))`.
pub fn ben_and_dell(delta: &PrimeFraction, ctx: &SuperchampionContext) -> Result<(Real, i64)> {
    let mut b = Real::ZERO;
    let mut d = 0i64;
    for &(p, z) in delta.factors() {
        let (bp, dp) = ben_prime(p, z, ctx)?;
        b += bp;
        d += dp;
    }
    Ok((b, d))
}

/// Options `(γ, ben_p, dℓ)` for one prime with `ben_p <= budget`, in
/// increasing benefit order.
fn prime_options(p: u64, budget: Real, ctx: &SuperchampionContext) -> Vec<(i32, Real, i64)> {
    let a = ctx.alpha(p) as i32;
    let mut out = vec![(0, Real::ZERO, 0i64)];
    let mut b = Real::ZERO;
    for g in 1.. {
        b += step(p, (a + g) as u32, ctx);
        if b > budget {
            break;
        }
        out.push((g, b, pow_ell(p, (a + g) as u32) - pow_ell(p, a as u32)));
    }
    let mut b = Real::ZERO;
    for g in 1..=a {
        b -= step(p, (a - g + 1) as u32, ctx);
        if b > budget {
            break;
        }
        out.push((-g, b, pow_ell(p, (a - g) as u32) - pow_ell(p, a as u32)));
    }
    out.sort_by(|x, y| x.1.total_cmp(&y.1));
    out
}

/// Keep only candidates not beaten by a larger δ of no greater cost.
pub fn prune(mut u: Vec<PrefixCandidate>) -> Vec<PrefixCandidate> {
    u.sort_by(|a, b| a.delta.cmp(&b.delta));
    let mut kept = Vec::with_capacity(u.len());
    let mut min_dell = i64::MAX;
    for c in u.into_iter().rev() {
        if c.dell < min_dell {
            min_dell = c.dell;
            kept.push(c);
        }
    }
    kept.reverse();
    kept
}

/// The pruned set D(B′) over the primes below √x₁, sorted by value.
pub fn build_prefix_sets(
    ctx: &SuperchampionContext,
    b_prime: Real,
    t: &PrimeTable,
) -> Result<Vec<PrefixCandidate>> {
    if b_prime >= ctx.b1 {
        return Err(LandauError::BoundFailure {
            n: ctx.n,
            b: b_prime.to_f64(),
            b1: ctx.b1.to_f64(),
        });
    }
    let mut d = vec![PrefixCandidate {
        delta: PrimeFraction::one(),
        ben: Real::ZERO,
        dell: 0,
    }];
    let mut i = 1;
    loop {
        let p = t.try_prime(i)?;
        if Real::from_u64(p) >= ctx.sqrt_x1 {
            break;
        }
        i += 1;
        let min_ben = d.iter().map(|c| c.ben).fold(Real::INFINITY, Real::min);
        let opts = prime_options(p, b_prime - min_ben, ctx);
        if opts.len() == 1 {
            continue;
        }
        let mut u = Vec::with_capacity(d.len() * opts.len());
        for c in &d {
            let room = b_prime - c.ben;
            for &(g, bp, dl) in &opts {
                if bp > room {
                    break;
                }
                let delta = if g == 0 {
                    c.delta.clone()
                } else {
                    c.delta.mul_prime_power(p, g)
                };
                u.push(PrefixCandidate {
                    delta,
                    ben: c.ben + bp,
                    dell: c.dell + dl,
                });
            }
        }
        d = prune(u);
    }
    Ok(d)
}

/// `S_ω`: the sum of `p_{k+1..k+ω}`, or minus the sum of
/// `p_{k+ω+1..k}` for negative ω.
pub fn s_omega(ctx: &SuperchampionContext, omega: i64, t: &PrimeTable) -> Result<i64> {
    let k = ctx.k as i64;
    let j = k + omega;
    if j < 0 || j as usize > t.len() {
        return Err(LandauError::Capacity(format!(
            "prime index {j} outside the table"
        )));
    }
    Ok(t.cumsum(j as usize) as i64 - t.cumsum(ctx.k) as i64)
}

/// Benefit added by moving from Nδ to Nδ_ω.
pub fn ben_shift(ctx: &SuperchampionContext, omega: i64, t: &PrimeTable) -> Real {
    let k = ctx.k as i64;
    let mut b = Real::ZERO;
    if omega > 0 {
        for i in (k + 1)..=(k + omega) {
            b += step(t.prime(i as usize), 1, ctx);
        }
    } else {
        for i in (k + omega + 1)..=k {
            b -= step(t.prime(i as usize), 1, ctx);
        }
    }
    b
}

/// `p_{k+ω}` and `p_{k+ω+1}` as a product fraction for δ_ω / δ.
pub fn omega_fraction(ctx: &SuperchampionContext, omega: i64, t: &PrimeTable) -> PrimeFraction {
    let k = ctx.k as i64;
    if omega >= 0 {
        PrimeFraction::from_sorted(
            ((k + 1)..=(k + omega))
                .map(|i| (t.prime(i as usize), 1))
                .collect(),
        )
    } else {
        PrimeFraction::from_sorted(
            ((k + omega + 1)..=k)
                .map(|i| (t.prime(i as usize), -1))
                .collect(),
        )
    }
}

/// Largest ω with `S_ω <= rem`, or `None` if it would divide out a
/// prime below √x₁.
pub fn largest_omega(
    ctx: &SuperchampionContext,
    rem: i64,
    t: &PrimeTable,
) -> Result<Option<i64>> {
    let k = ctx.k;
    if rem >= 0 {
        // first index j > k with cumsum(j) - cumsum(k) > rem
        let target = t.cumsum(k) + rem as u64;
        let j = t.cumulative_sums().partition_point(|&s| s <= target);
        if j >= t.cumulative_sums().len() {
            return Err(LandauError::Capacity(format!(
                "sieve limit {} too small for the suffix budget",
                t.limit()
            )));
        }
        Ok(Some(j as i64 - 1 - k as i64))
    } else {
        // smallest w with cumsum(k) - cumsum(k - w) >= -rem
        let need = (-rem) as u64;
        let sums = t.cumulative_sums();
        if sums[k] < need {
            return Ok(None);
        }
        let hi = sums[k] - need;
        let j = sums[..=k].partition_point(|&s| s <= hi) - 1;
        let omega = j as i64 - k as i64;
        // all removed primes p_{j+1..k} must be at least √x₁
        if Real::from_u64(t.prime(j + 1)) < ctx.sqrt_x1 {
            return Ok(None);
        }
        Ok(Some(omega))
    }
}

/// Root of `ρ log t − t = B` in `(ρ, x₁)`.
pub fn solve_t1(ctx: &SuperchampionContext, b: Real) -> Real {
    let rho = ctx.rho;
    let f = |t: Real| rho * t.ln() - t - b;
    let (mut lo, mut hi) = (rho.to_f64(), ctx.x1.to_f64());
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid == lo || mid == hi {
            break;
        }
        if f(Real::from(mid)).to_f64() > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let mut x = Real::from(0.5 * (lo + hi));
    for _ in 0..3 {
        let d = rho / x - Real::ONE;
        if d.is_zero() {
            break;
        }
        x -= f(x) / d;
    }
    x
}

/// B from the prefixes in `d`, with its witness and t₁.
pub fn estimate_b(
    ctx: &SuperchampionContext,
    d: &[PrefixCandidate],
    t: &PrimeTable,
) -> Result<BoundResult> {
    let n = ctx.n as i64;
    let mut best: Option<(Real, usize, i64)> = None;
    for (idx, c) in d.iter().enumerate() {
        let rem = n - ctx.ell_n as i64 - c.dell;
        let Some(omega) = largest_omega(ctx, rem, t)? else {
            continue;
        };
        let s = s_omega(ctx, omega, t)?;
        let ben_m = c.ben + ben_shift(ctx, omega, t);
        let value = ben_m + Real::from_i64(rem - s);
        if best.as_ref().is_none_or(|b| value < b.0) {
            best = Some((value, idx, omega));
        }
    }
    let Some((b, idx, omega)) = best else {
        return Err(LandauError::Internal(format!(
            "no prefix yields a witness at n={}",
            ctx.n
        )));
    };
    let witness = d[idx].delta.mul(&omega_fraction(ctx, omega, t));
    let t1 = if b < ctx.b1 { solve_t1(ctx, b) } else { ctx.x1 };
    Ok(BoundResult {
        b,
        t1,
        witness,
        witness_omega: omega,
    })
}

/// Initial B′ by the size of n, kept below B₁.
pub fn initial_b_prime(ctx: &SuperchampionContext) -> Real {
    let cap = ctx.b1 - ctx.b1.mul_f64(1e-6);
    let b = if ctx.n < 2485 {
        cap
    } else if ctx.n <= 10_000_000_000 {
        ctx.rho
    } else {
        ctx.rho.mul_pow2(0.5)
    };
    b.min(cap)
}

/// Iterate D(B′) and B until `B <= B′`; returns B and D(B).
pub fn bound_loop(
    ctx: &SuperchampionContext,
    t: &PrimeTable,
) -> Result<(BoundResult, Vec<PrefixCandidate>)> {
    bound_loop_from(ctx, initial_b_prime(ctx), t)
}

/// [`bound_loop`] starting from a given B′.
pub fn bound_loop_from(
    ctx: &SuperchampionContext,
    mut b_prime: Real,
    t: &PrimeTable,
) -> Result<(BoundResult, Vec<PrefixCandidate>)> {
    let mut best: Option<BoundResult> = None;
    for _ in 0..8 {
        let d = build_prefix_sets(ctx, b_prime, t)?;
        let r = estimate_b(ctx, &d, t)?;
        if best.as_ref().is_none_or(|b| r.b < b.b) {
            best = Some(r);
        }
        let b = best.clone().expect("set above");
        if b.b <= b_prime {
            let d: Vec<PrefixCandidate> = d.into_iter().filter(|c| c.ben <= b.b).collect();
            return Ok((b, d));
        }
        if b.b >= ctx.b1 {
            return Err(LandauError::BoundFailure {
                n: ctx.n,
                b: b.b.to_f64(),
                b1: ctx.b1.to_f64(),
            });
        }
        b_prime = b.b;
    }
    Err(LandauError::Internal(format!(
        "benefit bound did not settle at n={}",
        ctx.n
    )))
}


#[cfg(test)]
mod table_tests {
    use super::*;
    use crate::superchampion::{build_e2_table, find_context};

    #[test]
    fn prefix_set_sizes_near_one_billion() {
        let n = 1_000_064_448;
        let t = PrimeTable::build(crate::primes::default_limit(n)).unwrap();
        let e2 = build_e2_table(n, &t).unwrap();
        let c = find_context(n, &e2, &t).unwrap();
        let fr = [0.0, 0.2, 0.4, 0.6, 0.7, 0.8, 0.9, 1.0, 1.1];
        let sizes = [1, 11, 34, 76, 109, 139, 165, 194, 224];
        // B/ρ with the half-unit of its last printed digit
        let bs = [
            (7.5, 0.05),
            (1.15, 0.005),
            (1.13, 0.005),
            (1.104, 0.0005),
            (1.098, 0.0005),
            (1.082, 0.0005),
            (1.074, 0.0005),
            (1.055, 0.0005),
            (1.055, 0.0005),
        ];
        for i in 0..fr.len() {
            let d = build_prefix_sets(&c, c.rho.mul_f64(fr[i]), &t).unwrap();
            let b = estimate_b(&c, &d, &t).unwrap().b / c.rho;
            assert_eq!(d.len(), sizes[i], "B'={}ρ", fr[i]);
            assert!((b.to_f64() - bs[i].0).abs() <= bs[i].1, "B'={}ρ B={:?}ρ", fr[i], b);
        }
        let (b, _) = bound_loop_from(&c, c.rho.mul_f64(0.6), &t).unwrap();
        assert!((b.b.to_f64() - 13361.6).abs() < 0.05, "{:?}", b.b);
    }
}
