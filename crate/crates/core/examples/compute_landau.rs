//! g(n) for a few n given on the command line (default: powers of ten).

use std::time::Instant;

use landau::Landau;

fn main() -> landau::Result<()> {
    let ns: Vec<u64> = std::env::args()
        .skip(1)
        .map(|a| a.parse().expect("n must be an integer"))
        .collect();
    let ns = if ns.is_empty() {
        vec![1_000, 1_000_000, 1_000_000_000]
    } else {
        ns
    };
    let engine = Landau::new(*ns.iter().max().unwrap())?;
    for n in ns {
        let t0 = Instant::now();
        let r = engine.compute(n)?;
        println!("g({n}) = {}", r.render(engine.table()));
        println!(
            "  l(g) = {}, log10 g = {}, {} prefixes, {} candidates, {:?}",
            r.ell_g,
            r.log10_g().to_decimal_string(20),
            r.prefixes,
            r.candidates,
            t0.elapsed()
        );
    }
    Ok(())
}
