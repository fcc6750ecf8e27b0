//! The mean growth rate lambda: closed form, and a quadrature
//! cross-check via the expected norm increment.

use maxplus_growth::analytic::{lambda_by_quadrature, lambda_closed, RateParams};

fn main() -> maxplus_growth::Result<()> {
    for (mu, nu) in [(1.0, 1.0), (1.0, 2.0), (0.5, 3.0), (4.0, 0.25)] {
        let p = RateParams::new(mu, nu)?;
        let exact = lambda_closed(&p);
        let quad = lambda_by_quadrature(&p, 1e-9)?;
        println!(
            "mu={mu:<5} nu={nu:<5} lambda={exact:.12}  quadrature delta {:.2e}",
            (quad - exact).abs()
        );
    }

    // At equal rates the formula collapses to 5/(4 mu).
    let p = RateParams::new(2.0, 2.0)?;
    println!(
        "mu=nu=2: lambda={} (5/(4*2) = {})",
        lambda_closed(&p),
        5.0 / 8.0
    );
    Ok(())
}
