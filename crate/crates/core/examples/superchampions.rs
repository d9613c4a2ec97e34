//! The first superchampions, and where n = 10^12 sits among them.

use landau::superchampion::ChampionIter;
use landau::Landau;

fn main() -> landau::Result<()> {
    let engine = Landau::new(1_000_000_000_000)?;
    let t = engine.table_arc();
    for (f, ell, slope) in ChampionIter::new(t.clone()).take(20) {
        let s = slope.map_or(String::new(), |s| s.to_string());
        println!("{ell:>5}  {:<40} {s}", f.render_with(Some(&t)));
    }
    let c = engine.context(1_000_000_000_000)?;
    println!();
    println!("n = 10^12: rho = {}", c.slope);
    println!("  N = {}", c.champion.render(&t));
    println!("  l(N) = {} <= n < l(N') = {}", c.ell_n, c.n_plus_ell);
    println!("  x1 = {:.6}, x2 = {:.6}, B1 = {:.3}", c.x1.to_f64(), c.x2.to_f64(), c.b1.to_f64());
    println!("  E2 entries up to 10^12: {}", engine.e2().len());
    Ok(())
}
