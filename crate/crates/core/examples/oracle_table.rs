//! The three reference algorithms side by side for small n.

use landau::oracle::{g_bruteforce, g_list_merge_prune, g_table_dp};

fn main() -> landau::Result<()> {
    let dp = g_table_dp(60)?;
    let list = g_list_merge_prune(60)?;
    println!("n\tg(n)\tdigits\tl(g)");
    for n in 0..=60 {
        let g = dp.get(n);
        assert_eq!(g, list.query(n)?);
        if n <= 40 {
            assert_eq!(g, g_bruteforce(n)?);
        }
        println!("{n}\t{g}\t{}\t{}", g.to_decimal(100)?, g.ell());
    }
    Ok(())
}
