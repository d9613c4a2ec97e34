//! Normalized prefixes, the fight between them, and the final maximum
//! `g(n) = max N Π̂ G(p_{k+ω}, n − ℓ(NΠ̂))`.

use std::cmp::Ordering;
use std::path::Path;
use std::sync::Arc;

use num_bigint::BigUint;

use crate::arith::{ell_term, ln_int, PrimeFraction};
use crate::benefit::{
    ben_and_dell, ben_shift, bound_loop, largest_omega, omega_fraction, s_omega, BoundResult,
    PrefixCandidate,
};
use crate::cache;
use crate::error::{LandauError, Result};
use crate::gfunction::{GAlgorithm, GFraction, GSolver};
use crate::oracle::g_table_dp;
use crate::primes::{default_limit, PrimeTable};
use crate::real::Real;
use crate::superchampion::{build_e2_table, find_context, E2Entry, SuperchampionContext};

/// Largest n the engine is designed for.
pub const SOFT_CEILING: u64 = 1_000_000_000_000_000;

/// Below this n the benefit bound can exceed B₁, so g(n) is read from
/// the dynamic-programming table instead.
pub const TABLE_BELOW: u64 = 166;

/// A plain prefix moved by ω primes at the top of N.
#[derive(Clone, Debug)]
pub struct NormalizedCandidate {
    pub plain: PrefixCandidate,
    pub omega: i64,
    /// Π̂ = δ p_{k+1}..p_{k+ω}, or δ / (p_{k+ω+1}..p_k) for ω < 0.
    pub pi: PrimeFraction,
    pub ben: Real,
    pub ell_npi: u64,
    pub m_suffix: u64,
    /// `p_{k+ω}`, the base of the suffix G.
    pub base_prime: u64,
    /// `p_{k+ω+1}`.
    pub next_prime: u64,
}

impl NormalizedCandidate {
    /// log of Π̂ p_{k+ω+1}/q, with q the least prime `>= p_{k+ω+1} − m`.
    fn lower(&self, t: &PrimeTable) -> Result<(Real, u64)> {
        let q = t.prime_at_least(self.next_prime - self.m_suffix)?;
        Ok((self.pi.ln() + ln_int(self.next_prime) - ln_int(q), q))
    }

    /// log of Π̂ p_{k+ω+1}/(p_{k+ω+1} − m).
    fn upper(&self) -> Real {
        self.pi.ln() + ln_int(self.next_prime) - ln_int(self.next_prime - self.m_suffix)
    }
}

/// g(n) as `N × correction`.
#[derive(Clone, Debug)]
pub struct LandauResult {
    pub n: u64,
    /// `None` for `n <` [`TABLE_BELOW`], where N is taken to be 1.
    pub context: Option<SuperchampionContext>,
    pub correction: PrimeFraction,
    pub ell_g: u64,
    pub log_g: Real,
    pub bound: Option<Real>,
    pub prefixes: usize,
    pub candidates: usize,
    pub survivors: usize,
    pub evaluated: Vec<GAlgorithm>,
}

impl LandauResult {
    pub fn ell_n(&self) -> u64 {
        self.context.as_ref().map_or(0, |c| c.ell_n)
    }

    pub fn log10_g(&self) -> Real {
        self.log_g / Real::LN_10
    }

    /// The whole factorization of g(n).
    pub fn factorization(&self, t: &PrimeTable) -> PrimeFraction {
        match &self.context {
            Some(c) => c.champion.to_fraction(t).mul(&self.correction),
            None => self.correction.clone(),
        }
    }

    /// `N` in bracket notation, `1` for small n.
    pub fn render_n(&self, t: &PrimeTable) -> String {
        match &self.context {
            Some(c) => c.champion.render(t),
            None => "1".to_string(),
        }
    }

    /// `(correction) * N`, or the bare value for small n.
    pub fn render(&self, t: &PrimeTable) -> String {
        match &self.context {
            None => self.correction.render(),
            Some(_) if self.correction.is_one() => format!("N = {}", self.render_n(t)),
            Some(_) => format!("({}) * N, N = {}", self.correction.render(), self.render_n(t)),
        }
    }
}

/// ℓ(N f) − ℓ(N), with `alpha` giving the exponents of N.
pub fn ell_shift(f: &PrimeFraction, alpha: impl Fn(u64) -> u32) -> Result<i64> {
    let mut d = 0i64;
    for &(p, e) in f.factors() {
        let a = alpha(p) as i32;
        if a + e < 0 {
            return Err(LandauError::Internal(format!(
                "correction divides {p} more than N does"
            )));
        }
        d += ell_term(p, a + e) - ell_term(p, a);
    }
    Ok(d)
}

fn exact_less(a: (&PrimeFraction, u64, u64), b: (&PrimeFraction, u64, u64)) -> bool {
    // a.0 * a.1 / a.2  <  b.0 * b.1 / b.2
    let q = a.0.div(b.0);
    let (num, den) = q.to_big_ratio();
    num * BigUint::from(a.1) * BigUint::from(b.2) < den * BigUint::from(b.1) * BigUint::from(a.2)
}

/// The computing engine: prime table, E″ table and G solver.
pub struct Landau {
    table: Arc<PrimeTable>,
    e2: Vec<E2Entry>,
    e2_limit: u64,
    solver: GSolver,
}

impl Landau {
    /// Engine able to handle every `n <= max_n`.
    pub fn new(max_n: u64) -> Result<Landau> {
        Self::open(max_n, None, None)
    }

    /// Like [`Landau::new`] with an explicit sieve limit and an optional
    /// cache directory for the sieve, the E″ table and δ₁.
    pub fn open(max_n: u64, sieve_limit: Option<u64>, cache_dir: Option<&Path>) -> Result<Landau> {
        let max_n = max_n.max(7);
        let limit = sieve_limit.unwrap_or_else(|| default_limit(max_n));
        let table = Arc::new(PrimeTable::load_or_build(limit, cache_dir)?);
        let e2 = match cache_dir {
            Some(dir) => cache::load_or_build_e2(max_n, &table, dir)?,
            None => build_e2_table(max_n, &table)?,
        };
        let solver = match cache_dir {
            Some(dir) => GSolver::with_cache_dir(table.clone(), dir),
            None => GSolver::new(table.clone()),
        };
        Ok(Landau {
            table,
            e2,
            e2_limit: max_n,
            solver,
        })
    }

    pub fn table(&self) -> &PrimeTable {
        &self.table
    }

    pub fn table_arc(&self) -> Arc<PrimeTable> {
        self.table.clone()
    }

    pub fn e2(&self) -> &[E2Entry] {
        &self.e2
    }

    pub fn solver(&self) -> &GSolver {
        &self.solver
    }

    pub fn max_n(&self) -> u64 {
        self.e2_limit
    }

    pub fn context(&self, n: u64) -> Result<SuperchampionContext> {
        if n > self.e2_limit {
            return Err(LandauError::OutOfRange(format!(
                "n={n} beyond the engine limit {}",
                self.e2_limit
            )));
        }
        find_context(n, &self.e2, &self.table)
    }

    /// The context, the bound B and the plain prefixes D(B).
    pub fn prefixes(
        &self,
        n: u64,
    ) -> Result<(SuperchampionContext, BoundResult, Vec<PrefixCandidate>)> {
        let ctx = self.context(n)?;
        let (b, d) = bound_loop(&ctx, &self.table)?;
        Ok((ctx, b, d))
    }

    /// Every normalized prefix compatible with the bound.
    pub fn normalized_candidates(
        &self,
        ctx: &SuperchampionContext,
        bound: &BoundResult,
        d: &[PrefixCandidate],
    ) -> Result<Vec<NormalizedCandidate>> {
        let t = &*self.table;
        let n = ctx.n as i64;
        let slack = Real::ONE / (Real::ONE - ctx.rho / bound.t1);
        let loose = (bound.b * slack).to_f64();
        let mut out = Vec::new();
        for c in d {
            let b = n - ctx.ell_n as i64 - c.dell;
            let Some(top) = largest_omega(ctx, b, t)? else {
                continue;
            };
            let mut omega = top;
            loop {
                let j = ctx.k as i64 + omega;
                if j < 1 {
                    break;
                }
                let s = s_omega(ctx, omega, t)?;
                if ((b - s) as f64) > loose + 1.0 {
                    break;
                }
                let next = t.try_prime(j as usize + 1)?;
                // t1 is a computed root; it may sit an ulp above a prime
                if Real::from_u64(next) < bound.t1 - bound.t1.mul_f64(1e-24) {
                    break;
                }
                let ben = c.ben + ben_shift(ctx, omega, t);
                let tight = Real::from_i64(b) - (bound.b - ben) * slack;
                let tol = 1e-20 * (b.unsigned_abs() as f64 + 1.0);
                if (Real::from_i64(s) - tight).to_f64() >= -tol {
                    let m = (b - s) as u64;
                    if (Real::from_u64(next) - Real::from_u64(m)) < ctx.sqrt_x1 {
                        return Err(LandauError::SuffixBudget {
                            n: ctx.n,
                            p: next,
                            m,
                            sqrt_x1: ctx.sqrt_x1.to_f64(),
                        });
                    }
                    let pi = c.delta.mul(&omega_fraction(ctx, omega, t));
                    out.push(NormalizedCandidate {
                        plain: c.clone(),
                        omega,
                        pi,
                        ben,
                        ell_npi: (ctx.ell_n as i64 + c.dell + s) as u64,
                        m_suffix: m,
                        base_prime: t.prime(j as usize),
                        next_prime: next,
                    });
                }
                omega -= 1;
            }
        }
        if out.is_empty() {
            return Err(LandauError::Internal(format!(
                "no normalized prefix at n={}",
                ctx.n
            )));
        }
        Ok(out)
    }

    /// Drop candidates whose upper bound is below another's lower bound.
    pub fn fight(&self, cands: Vec<NormalizedCandidate>) -> Result<Vec<NormalizedCandidate>> {
        if cands.len() < 2 {
            return Ok(cands);
        }
        let t = &*self.table;
        let lows: Vec<(Real, u64)> = cands.iter().map(|c| c.lower(t)).collect::<Result<_>>()?;
        let (best_low, bi) = lows
            .iter()
            .enumerate()
            .map(|(i, l)| (l.0, i))
            .max_by(|a, b| a.0.total_cmp(&b.0))
            .expect("nonempty");
        let mut keep = Vec::new();
        for (i, c) in cands.iter().enumerate() {
            if i == bi {
                keep.push(c.clone());
                continue;
            }
            let up = c.upper();
            let d = (up - best_low).to_f64();
            let guard = 1e-24 * (up.to_f64().abs() + 1.0);
            let beaten = if d < -guard {
                true
            } else if d > guard {
                false
            } else {
                let w = &cands[bi];
                exact_less(
                    (&c.pi, c.next_prime, c.next_prime - c.m_suffix),
                    (&w.pi, w.next_prime, lows[bi].1),
                )
            };
            if !beaten {
                keep.push(c.clone());
            }
        }
        Ok(keep)
    }

    /// g(n).
    pub fn compute(&self, n: u64) -> Result<LandauResult> {
        if n < TABLE_BELOW {
            let g = g_table_dp(TABLE_BELOW - 1)?.get(n);
            return Ok(LandauResult {
                n,
                context: None,
                ell_g: g.ell() as u64,
                log_g: g.ln(),
                correction: g,
                bound: None,
                prefixes: 0,
                candidates: 0,
                survivors: 0,
                evaluated: Vec::new(),
            });
        }
        let t = &*self.table;
        let (ctx, bound, d) = self.prefixes(n)?;
        let cands = self.normalized_candidates(&ctx, &bound, &d)?;
        let n_cands = cands.len();
        let mut survivors = self.fight(cands)?;
        let n_surv = survivors.len();
        let lows: Vec<Real> = survivors
            .iter()
            .map(|c| c.lower(t).map(|l| l.0))
            .collect::<Result<_>>()?;
        let mut order: Vec<usize> = (0..survivors.len()).collect();
        order.sort_by(|&a, &b| lows[b].total_cmp(&lows[a]));
        let mut best: Option<(PrimeFraction, i64)> = None;
        let mut evaluated = Vec::new();
        for &i in &order {
            let c = &mut survivors[i];
            if let Some((bv, _)) = &best {
                let d = (c.upper() - bv.ln()).to_f64();
                if d < -1e-24 * (bv.ln().to_f64().abs() + 1.0) {
                    continue;
                }
            }
            let (g, alg) = self.solver.g(c.base_prime, c.m_suffix)?;
            evaluated.push(alg);
            let value = c.pi.mul(g.fraction());
            let shift = ell_shift(&value, |p| ctx.alpha(p))?;
            if ctx.ell_n as i64 + shift > n as i64 {
                return Err(LandauError::Internal(format!(
                    "candidate {} costs {} > n={n}",
                    value.render(),
                    ctx.ell_n as i64 + shift
                )));
            }
            let better = match &best {
                None => true,
                Some((bv, _)) => match value.cmp_value(bv) {
                    Ordering::Greater => true,
                    Ordering::Less => false,
                    Ordering::Equal => {
                        return Err(LandauError::Internal(format!(
                            "two candidates reach the same value at n={n}"
                        )))
                    }
                },
            };
            if better {
                best = Some((value, shift));
            }
        }
        let (correction, shift) = best.expect("at least one candidate is evaluated");
        let log_g = ctx.champion.ln(t) + correction.ln();
        Ok(LandauResult {
            n,
            ell_g: (ctx.ell_n as i64 + shift) as u64,
            log_g,
            correction,
            bound: Some(bound.b),
            prefixes: d.len(),
            candidates: n_cands,
            survivors: n_surv,
            evaluated,
            context: Some(ctx),
        })
    }

    /// G(p, m) with the algorithm that produced it.
    pub fn g_function(&self, p: u64, m: u64) -> Result<(GFraction, GAlgorithm)> {
        self.solver.g(p, m)
    }

    /// ben and ℓ-shift of an arbitrary prefix at n.
    pub fn benefit_of(&self, n: u64, delta: &PrimeFraction) -> Result<(Real, i64)> {
        ben_and_dell(delta, &self.context(n)?)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracle::g_list_merge_prune;

    #[test]
    fn small_n_from_table() {
        let e = Landau::new(100).unwrap();
        let want = ["1", "1", "2", "3", "4", "6", "6", "12"];
        for (n, w) in want.iter().enumerate() {
            let r = e.compute(n as u64).unwrap();
            assert_eq!(r.correction.to_decimal(100).unwrap(), *w);
        }
    }

    #[test]
    fn matches_oracle_to_three_thousand() {
        let e = Landau::new(3000).unwrap();
        let l = g_list_merge_prune(3000).unwrap();
        for n in 7..=3000 {
            let r = e.compute(n).unwrap();
            let got = r.factorization(e.table());
            assert_eq!(got, l.query(n).unwrap(), "n={n}");
            assert_eq!(r.ell_g, l.ell_at(n), "n={n}");
        }
    }

    #[test]
    fn one_million() {
        let e = Landau::new(1_000_000).unwrap();
        for n in [999_999, 1_000_000] {
            let r = e.compute(n).unwrap();
            assert_eq!(r.ell_n(), 998_093);
            assert_eq!(r.correction.render(), "43 * 3947 / 3847");
            assert_eq!(r.ell_g, 999_999);
        }
    }

    #[test]
    fn three_candidates() {
        let e = Landau::new(1_000_000).unwrap();
        let (ctx, b, d) = e.prefixes(998_555).unwrap();
        let c = e.normalized_candidates(&ctx, &b, &d).unwrap();
        let mut got: Vec<String> = c.iter().map(|c| c.plain.delta.render()).collect();
        got.sort();
        assert_eq!(got, ["1", "11 / (2 * 5)", "43 / 41"]);
    }
}
