use std::sync::{Arc, OnceLock};

use landau::benefit::{ben, ben_and_dell, bound_loop};
use landau::oracle::g_list_merge_prune;
use landau::real::Real;
use landau::{GSolver, Landau, PrimeFraction, PrimeTable};
use proptest::prelude::*;

const MAX_N: u64 = 2_000_000;

fn engine() -> &'static Landau {
    static E: OnceLock<Landau> = OnceLock::new();
    E.get_or_init(|| Landau::new(MAX_N).unwrap())
}

fn small_table() -> Arc<PrimeTable> {
    static T: OnceLock<Arc<PrimeTable>> = OnceLock::new();
    T.get_or_init(|| Arc::new(PrimeTable::build(100_000).unwrap())).clone()
}

/// Exhaustive G over the primes up to `p + m`, for cross-checking.
fn g_brute(t: &PrimeTable, p: u64, m: u64) -> PrimeFraction {
    let below: Vec<u64> = t.primes().iter().map(|&q| q as u64).filter(|&q| q <= p).collect();
    let above: Vec<u64> = t.primes().iter().map(|&q| q as u64).filter(|&q| q > p && q <= p + m).collect();
    // s pairs cost at least (s smallest above) - (s largest below)
    let s_max = (1..=above.len().min(below.len()))
        .take_while(|&s| {
            above[..s].iter().sum::<u64>() - below[below.len() - s..].iter().sum::<u64>() <= m
        })
        .last()
        .unwrap_or(0);
    // every set of `s` denominators, as (sum, product, members)
    let mut dens: Vec<Vec<(u64, PrimeFraction, Vec<u64>)>> = vec![vec![(0, PrimeFraction::one(), vec![])]];
    for s in 1..=s_max {
        let mut next = Vec::new();
        for (sum, prod, set) in &dens[s - 1] {
            let top = set.last().copied().unwrap_or(0);
            for &q in below.iter().filter(|&&q| q > top) {
                let mut v = set.clone();
                v.push(q);
                next.push((sum + q, prod.mul_prime_power(q, 1), v));
            }
        }
        dens.push(next);
    }
    let mut best = PrimeFraction::one();
    for mask in 1u32..(1 << above.len()) {
        let num: Vec<u64> = (0..above.len()).filter(|i| mask >> i & 1 == 1).map(|i| above[i]).collect();
        let need = num.iter().sum::<u64>().saturating_sub(m);
        let s = num.len();
        if s > s_max {
            continue;
        }
        if let Some((_, _, den)) = dens[s]
            .iter()
            .filter(|d| d.0 >= need)
            .min_by(|a, b| a.1.cmp(&b.1))
        {
            let f = PrimeFraction::ratio(&num, den);
            if f > best {
                best = f;
            }
        }
    }
    best
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn g_is_feasible_and_within_known_bounds(n in 906u64..MAX_N) {
        let e = engine();
        let r = e.compute(n).unwrap();
        let g = r.factorization(e.table());
        prop_assert!(g.is_integer());
        prop_assert!(g.ell() as u64 <= n);
        prop_assert_eq!(g.ell() as u64, r.ell_g);
        let nf = n as f64;
        let s = (nf * nf.ln()).sqrt();
        let lg = r.log_g.to_f64();
        prop_assert!(lg >= s);
        prop_assert!(lg <= s * (1.0 + (nf.ln().ln() - 0.975) / (2.0 * nf.ln())));
        prop_assert!(g.largest_prime().unwrap() as f64 <= 1.328 * s);
    }

    #[test]
    fn g_is_monotone(n in 166u64..MAX_N - 1) {
        let e = engine();
        let a = e.compute(n).unwrap().factorization(e.table());
        let b = e.compute(n + 1).unwrap().factorization(e.table());
        prop_assert!(a <= b);
    }

    #[test]
    fn benefit_is_nonnegative_and_additive(
        n in 10_000u64..MAX_N,
        a in prop::sample::select(vec![2u64, 3, 5, 7, 11, 13]),
        b in prop::sample::select(vec![17u64, 19, 23, 29]),
        ea in -1i32..3,
        eb in -1i32..3,
    ) {
        let ctx = engine().context(n).unwrap();
        let fa = PrimeFraction::from_factors([(a, ea)]);
        let fb = PrimeFraction::from_factors([(b, eb)]);
        let x = ben(&fa, &ctx).unwrap();
        let y = ben(&fb, &ctx).unwrap();
        let xy = ben(&fa.mul(&fb), &ctx).unwrap();
        prop_assert!(x >= Real::ZERO && y >= Real::ZERO);
        prop_assert!((xy - x - y).abs().to_f64() <= 1e-18 * (xy.to_f64().abs() + 1.0));
        let (_, dl) = ben_and_dell(&fa.mul(&fb), &ctx).unwrap();
        prop_assert_eq!(dl, ben_and_dell(&fa, &ctx).unwrap().1 + ben_and_dell(&fb, &ctx).unwrap().1);
    }

    #[test]
    fn pruned_prefixes_are_sound(n in 2_485u64..MAX_N) {
        let ctx = engine().context(n).unwrap();
        let (b, d) = bound_loop(&ctx, engine().table()).unwrap();
        let mut v: Vec<_> = d.iter().collect();
        v.sort_by(|x, y| x.delta.cmp(&y.delta));
        for w in v.windows(2) {
            // a larger prefix that costs no more would make the smaller useless
            prop_assert!(w[0].dell < w[1].dell);
        }
        prop_assert!(d.iter().all(|c| c.ben <= b.b && c.ben >= Real::ZERO));
        prop_assert!(d.iter().any(|c| c.delta.is_one()));
    }

    #[test]
    fn g_lies_in_sandwich(k in 3usize..9000, m in 0u64..4000) {
        let t = engine().table();
        let p = t.prime(k);
        let p1 = t.prime(k + 1);
        // G is defined for m <= p_(k+1) - 3
        let m = m % (p1 - 2);
        let me = m & !1;
        let (g, _) = engine().solver().g(p, m).unwrap();
        prop_assert!(g.cost() <= me);
        if me >= p1 - p && me + 3 <= p1 {
            let q = t.prime_at_least(p1 - me).unwrap();
            prop_assert!(*g.fraction() >= PrimeFraction::ratio(&[p1], &[q]));
            let upper = PrimeFraction::from_u64(p1).div(&PrimeFraction::from_u64(p1 - me));
            prop_assert!(*g.fraction() <= upper);
        }
    }

    #[test]
    fn rendering_round_trips(fs in prop::collection::btree_map(0usize..2000, -3i32..4, 0..25)) {
        let t = small_table();
        let f = PrimeFraction::from_factors(fs.into_iter().map(|(i, e)| (t.prime(i + 1), e)));
        prop_assert_eq!(PrimeFraction::parse(&f.render()).unwrap(), f.clone());
        prop_assert_eq!(PrimeFraction::parse(&f.render_with(Some(&t))).unwrap(), f);
    }
}

#[test]
fn g_matches_exhaustive_search() {
    let t = small_table();
    let solver = GSolver::new(t.clone());
    for p in [13u64, 31, 103] {
        let p1 = t.next_prime(p).unwrap();
        for m in 0..=60.min(p1 - 3) {
            let (g, _) = solver.g(p, m).unwrap();
            assert_eq!(*g.fraction(), g_brute(&t, p, m), "G({p}, {m})");
        }
    }
}

#[test]
fn engine_matches_list_near_four_hundred_thousand() {
    let list = g_list_merge_prune(400_000).unwrap();
    let e = engine();
    for n in (390_000..400_000).step_by(7) {
        assert_eq!(e.compute(n).unwrap().factorization(e.table()), list.query(n).unwrap(), "n={n}");
    }
}

#[test]
fn champions_are_fixed_points() {
    let e = engine();
    let t = e.table_arc();
    for (_, ell, _) in landau::superchampion::ChampionIter::new(t).skip(1).take_while(|c| c.1 <= MAX_N) {
        if ell < landau::assemble::TABLE_BELOW {
            continue;
        }
        let r = e.compute(ell).unwrap();
        assert!(r.correction.is_one(), "n = l(N) = {ell} gives {}", r.correction);
    }
}
