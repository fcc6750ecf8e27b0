//! Exact formulas for the diagonal-exponential max-plus system.
//!
//! `Y(k) = y(k) - x(k)` has a CDF of the two-sided exponential form
//! `c1·e^{mu·t}` for `t <= 0` and `1 - c2·e^{-nu·t}` for `t > 0`. The
//! recursion for the CDF of `Y(k)` is closed on that family, so it reduces
//! to a scalar recursion on `(c1, c2)`. This module carries that recursion,
//! its stationary limit, the limiting increment distribution `Phi` with
//! density `phi`, and the closed-form mean growth rate `lambda`, together
//! with a quadrature route to `lambda` used for cross-checking.
//!
//! Note on `Phi`: the implemented CDF is
//! `Phi(t) = 1 - [ (mu^2+mu*nu+nu^2)/(mu+nu) * (nu*e^{-mu*t} + mu*e^{-nu*t})
//!                 - mu*nu*e^{-(mu+nu)*t} ] / (mu^2+nu^2)` for `t >= 0`.
//! The sign of the `mu*nu*e^{-(mu+nu)t}` term is forced: with a plus sign
//! the expression equals `-2*mu*nu/(mu^2+nu^2) < 0` at `t = 0` and is not a
//! CDF, and only the minus sign is consistent with the integral equation
//! for `Phi`, with the density `phi` below, and with the closed-form mean.
//!
//! Rates are evaluated directly (no log-space tricks); the supported rate
//! domain is `[1e-3, 1e3]` per rate. Outside of it, overflow or underflow
//! of `e^{±mu·t}` is the caller's risk.

use serde::Serialize;

use crate::{Error, Result};

/// Exponential CDF `t -> max(0, 1 - e^{-rate*t})`.
pub fn exp_cdf(rate: f64, t: f64) -> Result<f64> {
    check_rate(rate, "rate")?;
    Ok(if t <= 0.0 { 0.0 } else { -(-rate * t).exp_m1() })
}

/// Exponential density `t -> rate*e^{-rate*t}` for `t >= 0`, else `0`.
pub fn exp_pdf(rate: f64, t: f64) -> Result<f64> {
    check_rate(rate, "rate")?;
    Ok(if t < 0.0 {
        0.0
    } else {
        rate * (-rate * t).exp()
    })
}

fn check_rate(rate: f64, name: &str) -> Result<()> {
    if !rate.is_finite() || rate <= 0.0 {
        return Err(Error::InvalidParameter(format!(
            "{name} must be > 0 and finite, got {rate}"
        )));
    }
    Ok(())
}

/// The pair of exponential rates `(mu, nu)` of the diagonal entries.
///
/// `mu = nu` is allowed; it reduces to the unit-rate symmetric case after
/// time rescaling.
#[derive(Copy, Clone, Debug, PartialEq, Serialize)]
pub struct RateParams {
    mu: f64,
    nu: f64,
}

impl RateParams {
    pub fn new(mu: f64, nu: f64) -> Result<Self> {
        check_rate(mu, "mu")?;
        check_rate(nu, "nu")?;
        Ok(RateParams { mu, nu })
    }

    pub fn mu(&self) -> f64 {
        self.mu
    }

    pub fn nu(&self) -> f64 {
        self.nu
    }

    pub fn min_rate(&self) -> f64 {
        self.mu.min(self.nu)
    }

    pub fn swapped(&self) -> Self {
        RateParams {
            mu: self.nu,
            nu: self.mu,
        }
    }

    /// CDF of the first diagonal entry, rate `mu`.
    pub fn f_cdf(&self, t: f64) -> f64 {
        if t <= 0.0 {
            0.0
        } else {
            -(-self.mu * t).exp_m1()
        }
    }

    /// CDF of the second diagonal entry, rate `nu`.
    pub fn g_cdf(&self, t: f64) -> f64 {
        if t <= 0.0 {
            0.0
        } else {
            -(-self.nu * t).exp_m1()
        }
    }

    /// Density of the first diagonal entry.
    pub fn f_pdf(&self, t: f64) -> f64 {
        if t < 0.0 {
            0.0
        } else {
            self.mu * (-self.mu * t).exp()
        }
    }

    /// Density of the second diagonal entry.
    pub fn g_pdf(&self, t: f64) -> f64 {
        if t < 0.0 {
            0.0
        } else {
            self.nu * (-self.nu * t).exp()
        }
    }
}

/// Coefficients `(c1, c2)` of a CDF of the two-sided exponential form
/// `c1·e^{mu·t}` for `t <= 0`, `1 - c2·e^{-nu·t}` for `t > 0`.
///
/// Continuity at `t = 0` forces `c1 + c2 = 1`; the constructor enforces it
/// to within `1e-12`.
#[derive(Copy, Clone, Debug, PartialEq)]
pub struct PsiCoefficients {
    c1: f64,
    c2: f64,
}

impl PsiCoefficients {
    pub const SUM_TOL: f64 = 1e-12;

    pub fn new(c1: f64, c2: f64) -> Result<Self> {
        let in_range = |c: f64| (0.0..=1.0).contains(&c);
        if !in_range(c1) || !in_range(c2) {
            return Err(Error::InvalidParameter(format!(
                "coefficients must lie in [0,1], got ({c1}, {c2})"
            )));
        }
        if (c1 + c2 - 1.0).abs() > Self::SUM_TOL {
            return Err(Error::InvalidParameter(format!(
                "coefficients must sum to 1 within {:e}, got {c1} + {c2}",
                Self::SUM_TOL
            )));
        }
        Ok(PsiCoefficients { c1, c2 })
    }

    pub fn c1(&self) -> f64 {
        self.c1
    }

    pub fn c2(&self) -> f64 {
        self.c2
    }
}

/// The law of `Y(1) = beta_1 - alpha_1`: coefficients
/// `(nu/(mu+nu), mu/(mu+nu))`.
pub fn psi1(p: &RateParams) -> PsiCoefficients {
    let s = p.mu() + p.nu();
    PsiCoefficients {
        c1: p.nu() / s,
        c2: p.mu() / s,
    }
}

/// The double integral `mu*nu*∫∫ Psi(u-v) e^{-mu*u - nu*v} du dv` over the
/// positive quadrant, evaluated in closed form for a two-sided exponential
/// `Psi`: `a*(c1 - c2) + nu/(mu+nu)` with `a = mu*nu/(mu+nu)^2`.
pub fn weighted_integral(p: &RateParams, c: &PsiCoefficients) -> f64 {
    let s = p.mu() + p.nu();
    let a = p.mu() * p.nu() / (s * s);
    a * (c.c1() - c.c2()) + p.nu() / s
}

/// One step of the coefficient recursion: the new `c1` is the weighted
/// integral of the current CDF, and continuity fixes `c2 = 1 - c1`.
pub fn psi_next(p: &RateParams, c: &PsiCoefficients) -> PsiCoefficients {
    let c1 = weighted_integral(p, c);
    PsiCoefficients { c1, c2: 1.0 - c1 }
}

/// The stationary coefficients `(nu^2/(mu^2+nu^2), mu^2/(mu^2+nu^2))`,
/// the unique fixed point of [`psi_next`].
pub fn psi_limit(p: &RateParams) -> PsiCoefficients {
    let s2 = p.mu() * p.mu() + p.nu() * p.nu();
    PsiCoefficients {
        c1: p.nu() * p.nu() / s2,
        c2: p.mu() * p.mu() / s2,
    }
}

/// Evaluates the two-sided exponential CDF at `t`. The boundary `t = 0`
/// uses the left branch; both branches agree there by continuity.
pub fn psi_eval(p: &RateParams, c: &PsiCoefficients, t: f64) -> f64 {
    if t <= 0.0 {
        c.c1() * (p.mu() * t).exp()
    } else {
        1.0 - c.c2() * (-p.nu() * t).exp()
    }
}

/// The limiting CDF of the norm increment `Z(k)`, for `t >= 0`
/// (zero for `t <= 0`). See the module docs for the sign of the
/// `mu*nu*e^{-(mu+nu)t}` term.
pub fn phi_cdf(p: &RateParams, t: f64) -> f64 {
    if t <= 0.0 {
        return 0.0;
    }
    let (mu, nu) = (p.mu(), p.nu());
    let s2 = mu * mu + nu * nu;
    let q = (mu * mu + mu * nu + nu * nu) / (mu + nu);
    let bracket =
        q * (nu * (-mu * t).exp() + mu * (-nu * t).exp()) - mu * nu * (-(mu + nu) * t).exp();
    1.0 - bracket / s2
}

/// The density of the limiting increment distribution, for `t >= 0`
/// (zero for `t < 0`).
pub fn phi_pdf(p: &RateParams, t: f64) -> f64 {
    if t < 0.0 {
        return 0.0;
    }
    let (mu, nu) = (p.mu(), p.nu());
    let s2 = mu * mu + nu * nu;
    let q = (mu * mu + mu * nu + nu * nu) / (mu + nu);
    mu * nu / s2 * (q * ((-mu * t).exp() + (-nu * t).exp()) - (mu + nu) * (-(mu + nu) * t).exp())
}

/// Closed-form mean growth rate:
/// `(mu^4 + mu^3*nu + mu^2*nu^2 + mu*nu^3 + nu^4) /
///  (mu*nu*(mu+nu)*(mu^2+nu^2))`. Equals `5/(4*mu)` when `nu = mu`.
pub fn lambda_closed(p: &RateParams) -> f64 {
    let (mu, nu) = (p.mu(), p.nu());
    let num = mu.powi(4) + mu.powi(3) * nu + mu.powi(2) * nu.powi(2) + mu * nu.powi(3) + nu.powi(4);
    num / (mu * nu * (mu + nu) * (mu * mu + nu * nu))
}

/// Mean growth rate via `∫_0^∞ t*phi(t) dt`, by composite Simpson
/// quadrature with resolution doubling until two successive estimates
/// agree to `rel_tol`, on `[0, T]` with `T` large enough that the analytic
/// tail bound of the integrand is negligible at `rel_tol`.
pub fn lambda_by_quadrature(p: &RateParams, rel_tol: f64) -> Result<f64> {
    if !(rel_tol > 0.0 && rel_tol <= 1e-2) {
        return Err(Error::InvalidParameter(format!(
            "rel_tol must lie in (0, 1e-2], got {rel_tol}"
        )));
    }
    let (mu, nu) = (p.mu(), p.nu());
    let m = p.min_rate();
    let mut t_end = 40.0 / m;
    loop {
        // t*phi(t) <= C*t*(e^{-mu t} + e^{-nu t}) with C = mu*nu*q/(mu^2+nu^2).
        let c = mu * nu / (mu * mu + nu * nu) * (mu * mu + mu * nu + nu * nu) / (mu + nu);
        let tail = c
            * ((t_end + 1.0 / mu) * (-mu * t_end).exp() / mu
                + (t_end + 1.0 / nu) * (-nu * t_end).exp() / nu);
        if tail <= 0.25 * rel_tol * lambda_closed(p) {
            break;
        }
        t_end *= 2.0;
    }

    let integrand = |t: f64| t * phi_pdf(p, t);
    let mut n = 64;
    let mut prev = simpson(&integrand, 0.0, t_end, n);
    loop {
        n *= 2;
        let cur = simpson(&integrand, 0.0, t_end, n);
        if (cur - prev).abs() <= 0.5 * rel_tol * cur.abs() {
            return Ok(cur);
        }
        if n >= (1 << 22) {
            return Err(Error::QuadratureBudget { last: cur });
        }
        prev = cur;
    }
}

/// Composite Simpson rule with `n` (even) subintervals.
pub(crate) fn simpson(f: &dyn Fn(f64) -> f64, a: f64, b: f64, n: usize) -> f64 {
    debug_assert!(n.is_multiple_of(2) && n >= 2);
    let h = (b - a) / n as f64;
    let mut acc = f(a) + f(b);
    for i in 1..n {
        let w = if i % 2 == 1 { 4.0 } else { 2.0 };
        acc += w * f(a + i as f64 * h);
    }
    acc * h / 3.0
}
