//! Baseline computations of g(n) for all n up to a small bound: the
//! prime-by-prime dynamic program, the merge-and-prune champion list, and
//! an exhaustive search for tiny n.

use std::cmp::Ordering;

use crate::arith::{ln_int, PrimeFraction};
use crate::error::{LandauError, Result};
use crate::primes::PrimeTable;
use crate::real::Real;

/// Largest `N` accepted by the table oracles.
pub const ORACLE_LIMIT: u64 = 2_000_000;

/// Largest `n` accepted by [`g_bruteforce`].
pub const BRUTE_LIMIT: u64 = 64;

const NIL: u32 = u32::MAX;

/// Persistent singly linked factorizations: each node is one prime
/// power followed by the rest of the product.
#[derive(Default)]
struct Arena {
    nodes: Vec<(u32, u16, u32)>,
}

impl Arena {
    fn push(&mut self, p: u64, e: u32, next: u32) -> u32 {
        self.nodes.push((p as u32, e as u16, next));
        (self.nodes.len() - 1) as u32
    }

    fn fraction(&self, mut at: u32) -> PrimeFraction {
        let mut f = Vec::new();
        while at != NIL {
            let (p, e, next) = self.nodes[at as usize];
            f.push((p as u64, e as i32));
            at = next;
        }
        PrimeFraction::from_factors(f)
    }
}

#[derive(Clone, Copy)]
struct Value {
    node: u32,
    ell: u64,
    log: Real,
}

fn compare(arena: &Arena, a: &Value, b: &Value) -> Ordering {
    if a.node == b.node {
        return Ordering::Equal;
    }
    let d = (a.log - b.log).to_f64();
    let guard = 1e-26 * (a.log.to_f64().abs() + b.log.to_f64().abs() + 1.0);
    if d > guard {
        Ordering::Greater
    } else if d < -guard {
        Ordering::Less
    } else {
        arena.fraction(a.node).cmp_exact(&arena.fraction(b.node))
    }
}

fn pmax(n: u64) -> u64 {
    if n < 5 {
        n
    } else {
        let x = n as f64;
        (1.328 * (x * x.ln()).sqrt()).floor() as u64
    }
}

fn oracle_primes(n: u64) -> Result<Vec<u64>> {
    if n > ORACLE_LIMIT {
        return Err(LandauError::Capacity(format!(
            "oracle table size {n} exceeds {ORACLE_LIMIT}"
        )));
    }
    let top = pmax(n);
    if top < 2 {
        return Ok(Vec::new());
    }
    let t = PrimeTable::build(top.max(3))?;
    Ok(t.primes()
        .iter()
        .map(|&p| p as u64)
        .filter(|&p| p <= top)
        .collect())
}

/// g(n) for every `0 <= n <= N`.
pub struct GTable {
    arena: Arena,
    values: Vec<Value>,
}

impl GTable {
    pub fn limit(&self) -> u64 {
        (self.values.len() - 1) as u64
    }

    pub fn get(&self, n: u64) -> PrimeFraction {
        self.arena.fraction(self.values[n as usize].node)
    }

    pub fn ell(&self, n: u64) -> u64 {
        self.values[n as usize].ell
    }

    pub fn ln(&self, n: u64) -> Real {
        self.values[n as usize].log
    }
}

/// Dynamic program over primes `p <= 1.328 sqrt(N log N)`:
/// `g_j(n) = max(g_{j-1}(n), p_j^k g_{j-1}(n - p_j^k))`.
pub fn g_table_dp(big_n: u64) -> Result<GTable> {
    let primes = oracle_primes(big_n)?;
    let mut arena = Arena::default();
    let one = Value {
        node: NIL,
        ell: 0,
        log: Real::ZERO,
    };
    let mut g = vec![one; big_n as usize + 1];
    for &p in &primes {
        let lp = ln_int(p);
        for n in (p..=big_n).rev() {
            let mut best = g[n as usize];
            let mut best_k = 0u32;
            let mut pk = p;
            let mut k = 1u32;
            while pk <= n {
                let prev = g[(n - pk) as usize];
                let cand = Value {
                    node: prev.node,
                    ell: prev.ell + pk,
                    log: prev.log + lp.mul_f64(k as f64),
                };
                let d = (cand.log - best.log).to_f64();
                let guard = 1e-26 * (cand.log.to_f64().abs() + 1.0);
                let better = if d > guard {
                    true
                } else if d < -guard {
                    false
                } else {
                    // near tie: settle it on the exact factorizations
                    let fc = arena.fraction(prev.node).mul_prime_power(p, k as i32);
                    let fb = if best_k > 0 {
                        arena.fraction(best.node).mul_prime_power(p, best_k as i32)
                    } else {
                        arena.fraction(best.node)
                    };
                    fc.cmp_exact(&fb) == Ordering::Greater
                };
                if better {
                    best = cand;
                    best_k = k;
                }
                pk = match pk.checked_mul(p) {
                    Some(v) => v,
                    None => break,
                };
                k += 1;
            }
            if best_k > 0 {
                best.node = arena.push(p, best_k, best.node);
                g[n as usize] = best;
            }
        }
    }
    Ok(GTable { arena, values: g })
}

/// The final champion list: `(M_i, l_i)` with both coordinates strictly
/// increasing; `g(n) = M_i` for `l_i <= n < l_{i+1}`.
pub struct ChampionList {
    arena: Arena,
    entries: Vec<Value>,
    limit: u64,
}

impl ChampionList {
    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn limit(&self) -> u64 {
        self.limit
    }

    /// `(M_i, l_i)` for the `i`-th entry, 0-based.
    pub fn entry(&self, i: usize) -> (PrimeFraction, u64) {
        let v = &self.entries[i];
        (self.arena.fraction(v.node), v.ell)
    }

    pub fn entries(&self) -> impl Iterator<Item = (PrimeFraction, u64)> + '_ {
        (0..self.entries.len()).map(|i| self.entry(i))
    }

    fn index_for(&self, n: u64) -> usize {
        self.entries.partition_point(|v| v.ell <= n) - 1
    }

    /// g(n) for `n <= limit`.
    pub fn query(&self, n: u64) -> Result<PrimeFraction> {
        if n > self.limit {
            return Err(LandauError::OutOfRange(format!(
                "query {n} beyond list limit {}",
                self.limit
            )));
        }
        Ok(self.entry(self.index_for(n)).0)
    }

    pub fn ln_at(&self, n: u64) -> Real {
        self.entries[self.index_for(n)].log
    }

    pub fn ell_at(&self, n: u64) -> u64 {
        self.entries[self.index_for(n)].ell
    }
}

/// The merging and pruning algorithm over the same primes as
/// [`g_table_dp`].
pub fn g_list_merge_prune(big_n: u64) -> Result<ChampionList> {
    g_list_over(big_n, &oracle_primes(big_n)?)
}

/// The list built from the given primes only.
pub fn g_list_over(big_n: u64, primes: &[u64]) -> Result<ChampionList> {
    let mut arena = Arena::default();
    let mut list = vec![Value {
        node: NIL,
        ell: 0,
        log: Real::ZERO,
    }];
    for &p in primes {
        let lp = ln_int(p);
        let mut lambda: Vec<Value> = list.clone();
        let mut pk = p;
        let mut k = 1u32;
        while pk <= big_n {
            for v in &list {
                if v.ell + pk > big_n {
                    // list is increasing in ell
                    break;
                }
                let node = arena.push(p, k, v.node);
                lambda.push(Value {
                    node,
                    ell: v.ell + pk,
                    log: v.log + lp.mul_f64(k as f64),
                });
            }
            pk = match pk.checked_mul(p) {
                Some(v) => v,
                None => break,
            };
            k += 1;
        }
        lambda.sort_by(|a, b| compare(&arena, a, b));
        // sweep from the largest value keeping strictly smaller costs
        let mut kept: Vec<Value> = Vec::with_capacity(lambda.len());
        let mut min_ell = u64::MAX;
        for v in lambda.iter().rev() {
            if v.ell < min_ell {
                min_ell = v.ell;
                kept.push(*v);
            }
        }
        kept.reverse();
        list = kept;
    }
    Ok(ChampionList {
        arena,
        entries: list,
        limit: big_n,
    })
}

/// g(n) by exhaustive search over sets of prime powers, `n <= 64`.
pub fn g_bruteforce(n: u64) -> Result<PrimeFraction> {
    if n > BRUTE_LIMIT {
        return Err(LandauError::Capacity(format!(
            "brute force refused for n={n} > {BRUTE_LIMIT}"
        )));
    }
    let primes: Vec<u64> = (2..=n.max(2))
        .filter(|&x| (2..x).all(|d| x % d != 0))
        .collect();
    fn go(primes: &[u64], budget: u64, acc: u128, cur: &mut Vec<(u64, i32)>, best: &mut (u128, Vec<(u64, i32)>)) {
        if acc > best.0 {
            *best = (acc, cur.clone());
        }
        for (i, &p) in primes.iter().enumerate() {
            if p > budget {
                break;
            }
            let mut pk = p;
            let mut k = 1;
            while pk <= budget {
                cur.push((p, k));
                go(&primes[i + 1..], budget - pk, acc * pk as u128, cur, best);
                cur.pop();
                pk *= p;
                k += 1;
            }
        }
    }
    let mut best = (1u128, Vec::new());
    go(&primes, n, 1, &mut Vec::new(), &mut best);
    Ok(PrimeFraction::from_factors(best.1))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn int(f: &PrimeFraction) -> String {
        f.to_decimal(1000).unwrap()
    }

    #[test]
    fn dp_small_values() {
        let t = g_table_dp(7).unwrap();
        let got: Vec<String> = (0..=7).map(|n| int(&t.get(n))).collect();
        assert_eq!(got, ["1", "1", "2", "3", "4", "6", "6", "12"]);
        assert_eq!(int(&g_table_dp(43).unwrap().get(43)), "60060");
        assert_eq!(int(&g_table_dp(0).unwrap().get(0)), "1");
        assert_eq!(int(&g_table_dp(100).unwrap().get(100)), "232792560");
    }

    #[test]
    fn list_small_values() {
        let l = g_list_over(8, &[2, 3]).unwrap();
        let got: Vec<(String, u64)> = l.entries().map(|(m, e)| (int(&m), e)).collect();
        let want = [("1", 0), ("2", 2), ("3", 3), ("4", 4), ("6", 5), ("12", 7)];
        for (i, (m, e)) in want.iter().enumerate() {
            assert_eq!(got[i], (m.to_string(), *e));
        }
        let z = g_list_merge_prune(0).unwrap();
        assert_eq!(z.len(), 1);
        assert_eq!(int(&z.query(0).unwrap()), "1");
    }

    #[test]
    fn list_matches_dp() {
        let t = g_table_dp(300).unwrap();
        let l = g_list_merge_prune(300).unwrap();
        for n in 0..=300 {
            assert_eq!(t.get(n), l.query(n).unwrap(), "n={n}");
            assert_eq!(t.ell(n), l.ell_at(n));
        }
        for w in l.entries.windows(2) {
            assert!(w[0].ell < w[1].ell);
            assert!(w[0].log < w[1].log);
        }
    }

    #[test]
    fn brute_force() {
        assert_eq!(int(&g_bruteforce(5).unwrap()), "6");
        assert_eq!(int(&g_bruteforce(19).unwrap()), "420");
        assert_eq!(int(&g_bruteforce(1).unwrap()), "1");
        assert_eq!(int(&g_bruteforce(0).unwrap()), "1");
        assert!(g_bruteforce(65).is_err());
    }

    #[test]
    fn capacity() {
        assert!(g_table_dp(ORACLE_LIMIT + 1).is_err());
    }
}
