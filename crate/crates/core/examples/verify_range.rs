//! Compare the fast path against the list algorithm on a range.

use landau::oracle::g_list_merge_prune;
use landau::Landau;

fn main() -> landau::Result<()> {
    let max_n: u64 = std::env::args()
        .nth(1)
        .map_or(20_000, |a| a.parse().expect("max_n must be an integer"));
    let engine = Landau::new(max_n)?;
    let list = g_list_merge_prune(max_n)?;
    let mut bad = 0;
    for n in 7..=max_n {
        let got = engine.compute(n)?.factorization(engine.table());
        if got != list.query(n)? {
            println!("mismatch at {n}: {got} vs {}", list.query(n)?);
            bad += 1;
        }
    }
    println!("{}/{} OK", max_n - 6 - bad, max_n - 6);
    Ok(())
}
