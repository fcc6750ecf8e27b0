//! The two-coefficient recursion behind the difference distribution:
//! iterate Psi_k -> Psi_{k+1} and watch it contract onto the
//! stationary coefficients.

use maxplus_growth::analytic::{psi1, psi_eval, psi_limit, psi_next, RateParams};

fn main() -> maxplus_growth::Result<()> {
    let p = RateParams::new(1.0, 2.0)?;
    let star = psi_limit(&p);

    let mut c = psi1(&p);
    println!("k   c1               gap to limit");
    for k in 1..=12 {
        println!("{k:<3} {:.12}   {:.3e}", c.c1(), (c.c1() - star.c1()).abs());
        c = psi_next(&p, &c);
    }
    println!(
        "limit: c1={:.12} c2={:.12}  (nu^2 and mu^2 over mu^2+nu^2)",
        star.c1(),
        star.c2()
    );

    // A few points of the stationary CDF itself.
    println!("\nt      Psi(t)");
    for t in [-2.0, -0.5, 0.0, 0.5, 2.0] {
        println!("{t:>4}   {:.12}", psi_eval(&p, &star, t));
    }
    Ok(())
}
