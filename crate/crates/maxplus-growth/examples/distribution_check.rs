//! Kolmogorov-Smirnov checks of the simulated distributions against the
//! analytic ones: the difference Y(k) against Psi_k and the stationary
//! Psi, and the final norm increment against the increment CDF Phi.

use maxplus_growth::analytic::{phi_cdf, psi1, psi_eval, psi_limit, psi_next, RateParams};
use maxplus_growth::montecarlo::{ks_statistic, ks_threshold_95, run_simulation, SimConfig};

fn main() -> maxplus_growth::Result<()> {
    let p = RateParams::new(1.0, 2.0)?;
    let cfg = SimConfig {
        params: p,
        steps: 50,
        trials: 20_000,
        base_seed: 7,
        record_y_at: vec![1, 2, 50],
        record_z: true,
    };
    let out = run_simulation(&cfg)?;
    let threshold = ks_threshold_95(cfg.trials);
    println!("95% KS threshold for n={}: {threshold:.5}\n", cfg.trials);

    let mut c = psi1(&p);
    for k in [1usize, 2] {
        let d = ks_statistic(&out.y_samples[&k], |t| psi_eval(&p, &c, t))?;
        println!("Y({k}) vs Psi_{k}:      D = {d:.5}");
        c = psi_next(&p, &c);
    }

    let star = psi_limit(&p);
    let d = ks_statistic(&out.y_samples[&50], |t| psi_eval(&p, &star, t))?;
    println!("Y(50) vs limit Psi:  D = {d:.5}");

    let d = ks_statistic(out.final_z.as_ref().unwrap(), |t| phi_cdf(&p, t))?;
    println!("Z(50)-Z(49) vs Phi:  D = {d:.5}");
    Ok(())
}
