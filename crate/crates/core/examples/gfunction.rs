//! G(p, m) through both algorithms, and delta1 for a few primes.

use std::sync::Arc;

use landau::gfunction::g_small;
use landau::{GSolver, PrimeTable};

fn main() -> landau::Result<()> {
    let t = Arc::new(PrimeTable::build(2_000_000)?);
    let solver = GSolver::new(t.clone());
    for (p, m) in [(103, 22), (107, 12), (9973, 40), (9973, 3000), (999_983, 20_000)] {
        let (g, alg) = solver.g(p, m)?;
        println!("G({p}, {m}) = {g}  [cost {}, {alg}]", g.cost());
    }
    // the two algorithms agree where both apply
    let p = 9973;
    let d1 = solver.delta1(p)?;
    let small = g_small(&t, p, 3000)?;
    let from = (9 * d1).div_ceil(2).next_multiple_of(2).max(2);
    for m in (from..=3000).step_by(250) {
        assert_eq!(small[m as usize], solver.g_large(p, m)?);
    }
    println!("delta1({p}) = {d1}; small and large agree on m >= {from}");
    for p in [101u64, 10_007, 100_003, 1_000_003] {
        println!("delta1({p}) = {}", solver.delta1(p)?);
    }
    Ok(())
}
