//! Plain and normalized prefixes around n = 10^6.

use landau::Landau;

fn main() -> landau::Result<()> {
    let n = std::env::args()
        .nth(1)
        .map_or(998_555, |a| a.parse().expect("n must be an integer"));
    let engine = Landau::new(n)?;
    let t = engine.table();
    let (ctx, bound, d) = engine.prefixes(n)?;
    println!(
        "n = {n}, B = {:.4} (B/rho = {:.4}), t1 = {:.3}",
        bound.b.to_f64(),
        (bound.b / ctx.rho).to_f64(),
        bound.t1.to_f64()
    );
    println!("witness M/N = {} (omega = {})", bound.witness, bound.witness_omega);
    println!("{} plain prefixes:", d.len());
    for c in d.iter().take(15) {
        println!("  {:<24} ben {:>10.4}  dl {:>6}", c.delta.render_with(Some(t)), c.ben.to_f64(), c.dell);
    }
    let cands = engine.normalized_candidates(&ctx, &bound, &d)?;
    println!("{} normalized candidates:", cands.len());
    for c in &cands {
        println!("  {} (omega {}, suffix budget {})", c.pi, c.omega, c.m_suffix);
    }
    let left = engine.fight(cands)?;
    println!("{} left after the fight", left.len());
    Ok(())
}
