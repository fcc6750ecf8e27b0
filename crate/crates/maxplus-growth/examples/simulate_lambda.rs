//! Seeded Monte Carlo estimate of lambda, compared against the closed
//! form. Reruns with the same seed reproduce the numbers exactly,
//! regardless of thread count.

use maxplus_growth::analytic::{lambda_closed, RateParams};
use maxplus_growth::montecarlo::{run_simulation, SimConfig, GENERATOR_ID};

fn main() -> maxplus_growth::Result<()> {
    let p = RateParams::new(1.0, 2.0)?;
    let cfg = SimConfig {
        params: p,
        steps: 20_000,
        trials: 400,
        base_seed: 42,
        record_y_at: vec![],
        record_z: false,
    };
    let out = run_simulation(&cfg)?;

    let exact = lambda_closed(&p);
    let e = &out.estimate;
    println!("generator: {GENERATOR_ID}");
    println!(
        "lambda_hat = {:.6} +/- {:.6}  ({} trials x {} steps)",
        e.mean, e.std_error, e.n, cfg.steps
    );
    println!(
        "closed form = {exact:.6}, deviation = {:.2} standard errors",
        (e.mean - exact).abs() / e.std_error
    );
    Ok(())
}
