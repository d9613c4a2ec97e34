//! Sieve statistics and record gaps.

use landau::PrimeTable;

fn main() -> landau::Result<()> {
    let t = PrimeTable::build(100_000_000)?;
    println!("{} primes up to {}", t.len(), t.limit());
    println!("sum of primes up to 10^6: {}", t.sum_upto(1_000_000));
    for e in 2..=8 {
        let x = 10u64.pow(e);
        println!("pi(10^{e}) = {:>8}  max gap up to 10^{e} = {}", t.pi(x), t.max_gap_upto(x)?);
    }
    println!("record gaps:");
    for &(p, d) in t.gaps().thresholds().iter().rev().take(5) {
        println!("  {d} ending at {p}");
    }
    Ok(())
}
