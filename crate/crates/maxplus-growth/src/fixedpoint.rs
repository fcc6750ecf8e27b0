//! Ansatz-free grid solution of the CDF recursion and its fixed point.
//!
//! The recursion maps the CDF of `Y(k-1)` to that of `Y(k)` through a
//! double integral over the positive quadrant. Substituting `w = u - v`
//! collapses it to a one-dimensional integral against the difference
//! kernel `K(w)`, so one iteration costs `O(grid)` instead of `O(grid^2)`.
//! The kernel reduction is validated against a 2-D quadrature oracle in
//! the tests.
//!
//! Quadrature is composite trapezoid on the uniform grid; outside the
//! grid the CDF is extended by `0` on the left and `1` on the right, and
//! the right tail of the kernel integral is added in closed form under
//! that convention. A run-time check rejects grids whose kernel tail mass
//! exceeds the requested tolerance.

use crate::analytic::{psi1, psi_eval, PsiCoefficients, RateParams};
use crate::{Error, Result};

/// Uniform grid description and solver controls.
#[derive(Copy, Clone, Debug, PartialEq)]
pub struct GridSpec {
    t_min: f64,
    t_max: f64,
    step: f64,
    tol: f64,
    max_iter: usize,
}

impl GridSpec {
    pub fn new(t_min: f64, t_max: f64, step: f64, tol: f64, max_iter: usize) -> Result<Self> {
        if !(t_min < 0.0 && t_max > 0.0 && t_min.is_finite() && t_max.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "grid must satisfy t_min < 0 < t_max, got [{t_min}, {t_max}]"
            )));
        }
        if !step.is_finite() || step <= 0.0 {
            return Err(Error::InvalidParameter(format!(
                "step must be > 0, got {step}"
            )));
        }
        let span = t_max - t_min;
        let cells = (span / step).round();
        if cells < 10.0 || ((cells * step - span) / span).abs() > 1e-9 {
            return Err(Error::InvalidParameter(format!(
                "(t_max - t_min)/step must be an integer count >= 10, got {}",
                span / step
            )));
        }
        if !tol.is_finite() || tol < 1e-12 {
            return Err(Error::InvalidParameter(format!(
                "tol must be >= 1e-12, got {tol}"
            )));
        }
        if max_iter == 0 {
            return Err(Error::InvalidParameter("max_iter must be >= 1".into()));
        }
        Ok(GridSpec {
            t_min,
            t_max,
            step,
            tol,
            max_iter,
        })
    }

    /// Default grid for the given rates: range `±30/min(mu,nu)`, step
    /// `0.005/min(mu,nu)`, tolerance `1e-10`, at most 200 iterations.
    pub fn default_for(p: &RateParams) -> Self {
        let m = p.min_rate();
        GridSpec::new(-30.0 / m, 30.0 / m, 0.005 / m, 1e-10, 200)
            .expect("default grid spec is valid")
    }

    pub fn t_min(&self) -> f64 {
        self.t_min
    }

    pub fn t_max(&self) -> f64 {
        self.t_max
    }

    pub fn step(&self) -> f64 {
        self.step
    }

    pub fn tol(&self) -> f64 {
        self.tol
    }

    pub fn max_iter(&self) -> usize {
        self.max_iter
    }

    pub fn num_points(&self) -> usize {
        ((self.t_max - self.t_min) / self.step).round() as usize + 1
    }

    /// The `i`-th grid abscissa `t_min + i*step`.
    pub fn t(&self, i: usize) -> f64 {
        self.t_min + i as f64 * self.step
    }
}

/// A CDF tabulated on a uniform grid: values in `[0,1]`, nondecreasing,
/// extended by `0` left of the grid and `1` right of it.
#[derive(Clone, Debug, PartialEq)]
pub struct GridCdf {
    spec: GridSpec,
    values: Vec<f64>,
}

const MONOTONE_SLACK: f64 = 1e-12;

impl GridCdf {
    pub fn new(spec: GridSpec, values: Vec<f64>) -> Result<Self> {
        if values.len() != spec.num_points() {
            return Err(Error::DimensionMismatch(format!(
                "grid has {} points but {} values were supplied",
                spec.num_points(),
                values.len()
            )));
        }
        let mut prev = 0.0;
        for (i, &v) in values.iter().enumerate() {
            if !(-MONOTONE_SLACK..=1.0 + MONOTONE_SLACK).contains(&v) {
                return Err(Error::InvalidParameter(format!(
                    "CDF value out of [0,1] at grid index {i}: {v}"
                )));
            }
            if i > 0 && v < prev - MONOTONE_SLACK {
                return Err(Error::InvalidParameter(format!(
                    "CDF values must be nondecreasing, violated at index {i}: {prev} -> {v}"
                )));
            }
            prev = v;
        }
        Ok(GridCdf { spec, values })
    }

    /// Tabulates a two-sided exponential CDF on the grid.
    pub fn tabulate(p: &RateParams, c: &PsiCoefficients, spec: GridSpec) -> Self {
        let values = (0..spec.num_points())
            .map(|i| psi_eval(p, c, spec.t(i)))
            .collect();
        GridCdf { spec, values }
    }

    pub fn spec(&self) -> &GridSpec {
        &self.spec
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn value(&self, i: usize) -> f64 {
        self.values[i]
    }

    /// Evaluates the tabulated CDF at arbitrary `t`, linearly interpolating
    /// between grid points and applying the 0/1 extension convention.
    pub fn eval(&self, t: f64) -> f64 {
        if t <= self.spec.t_min {
            return if t == self.spec.t_min {
                self.values[0]
            } else {
                0.0
            };
        }
        if t >= self.spec.t_max {
            return if t == self.spec.t_max {
                *self.values.last().unwrap()
            } else {
                1.0
            };
        }
        let pos = (t - self.spec.t_min) / self.spec.step;
        let i = (pos.floor() as usize).min(self.values.len() - 2);
        let frac = pos - i as f64;
        self.values[i] * (1.0 - frac) + self.values[i + 1] * frac
    }

    /// Sup-norm distance to another grid on the same spec.
    pub fn sup_distance(&self, other: &GridCdf) -> f64 {
        self.values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }

    /// Sup-norm distance to a reference CDF sampled at the grid points.
    pub fn sup_distance_to(&self, cdf: impl Fn(f64) -> f64) -> f64 {
        self.values
            .iter()
            .enumerate()
            .map(|(i, &v)| (v - cdf(self.spec.t(i))).abs())
            .fold(0.0, f64::max)
    }
}

/// The difference kernel `K(w)`: the weight of `Psi(w)` obtained by
/// integrating `e^{-mu*u - nu*v}` along the line `u - v = w` in the
/// positive quadrant. `K(w) = e^{-mu*w}/(mu+nu)` for `w >= 0` and
/// `e^{nu*w}/(mu+nu)` for `w < 0`; `mu*nu*∫K = 1`.
pub fn difference_kernel(p: &RateParams, w: f64) -> f64 {
    let s = p.mu() + p.nu();
    if w >= 0.0 {
        (-p.mu() * w).exp() / s
    } else {
        (p.nu() * w).exp() / s
    }
}

/// Kernel tail masses `mu*nu*∫K` beyond the two grid edges.
fn kernel_tails(p: &RateParams, spec: &GridSpec) -> (f64, f64) {
    let s = p.mu() + p.nu();
    let left = p.mu() / s * (p.nu() * spec.t_min()).exp();
    let right = p.nu() / s * (-p.mu() * spec.t_max()).exp();
    (left, right)
}

fn check_grid_width(p: &RateParams, spec: &GridSpec) -> Result<()> {
    let (left, right) = kernel_tails(p, spec);
    if left > spec.tol() || right > spec.tol() {
        let s = p.mu() + p.nu();
        let need_max = (p.nu() / (s * spec.tol())).ln() / p.mu();
        let need_min = -(p.mu() / (s * spec.tol())).ln() / p.nu();
        return Err(Error::GridTooNarrow(format!(
            "kernel tail mass beyond the grid is {:.3e} (left) / {:.3e} (right) \
             against tol {:.1e}; widen the grid to t_min <= {:.3}, t_max >= {:.3}",
            left,
            right,
            spec.tol(),
            need_min,
            need_max
        )));
    }
    Ok(())
}

/// `I = mu*nu*∫ Psi(w) K(w) dw` by composite trapezoid over the grid, plus
/// the closed-form right-tail contribution under the `Psi = 1` convention.
fn weighted_integral_on_grid(p: &RateParams, psi: &GridCdf) -> f64 {
    let spec = psi.spec();
    let scale = p.mu() * p.nu();
    let f = |i: usize| scale * psi.value(i) * difference_kernel(p, spec.t(i));
    let n = spec.num_points();
    let mut acc = 0.5 * (f(0) + f(n - 1));
    for i in 1..n - 1 {
        acc += f(i);
    }
    let (_, right_tail) = kernel_tails(p, spec);
    acc * spec.step() + right_tail
}

/// One application of the CDF recursion on the grid: computes the weighted
/// integral `I` of the input CDF and emits `I*e^{mu*t}` for `t <= 0` and
/// `1 - (1-I)*e^{-nu*t}` for `t > 0`.
pub fn apply_recursion(p: &RateParams, psi: &GridCdf) -> Result<GridCdf> {
    let spec = *psi.spec();
    check_grid_width(p, &spec)?;
    let i_val = weighted_integral_on_grid(p, psi);
    if !(i_val > 0.0 && i_val < 1.0) {
        return Err(Error::InvalidParameter(format!(
            "weighted integral {i_val} fell outside (0,1); the step {} is too \
             coarse for rates ({}, {})",
            spec.step(),
            p.mu(),
            p.nu()
        )));
    }
    let values = (0..spec.num_points())
        .map(|i| {
            let t = spec.t(i);
            if t <= 0.0 {
                i_val * (p.mu() * t).exp()
            } else {
                1.0 - (1.0 - i_val) * (-p.nu() * t).exp()
            }
        })
        .collect();
    GridCdf::new(spec, values)
}

/// Iterates [`apply_recursion`] from the tabulated first-step CDF until
/// the sup-norm change drops below `spec.tol`, returning the converged
/// grid and the number of iterations taken.
pub fn solve_fixed_point(p: &RateParams, spec: GridSpec) -> Result<(GridCdf, usize)> {
    let mut cur = GridCdf::tabulate(p, &psi1(p), spec);
    let mut delta = f64::INFINITY;
    for iteration in 1..=spec.max_iter() {
        let next = apply_recursion(p, &cur)?;
        delta = cur.sup_distance(&next);
        cur = next;
        if delta < spec.tol() {
            return Ok((cur, iteration));
        }
    }
    Err(Error::NoConvergence {
        iterations: spec.max_iter(),
        delta,
    })
}

/// Mean growth rate from a tabulated difference CDF: builds the increment
/// CDF `Phi` on the nonnegative part of the grid by quadrature of its
/// integral representation, then integrates `1 - Phi` over `[0, ∞)`
/// (trapezoid over the grid plus a closed-form tail).
pub fn lambda_from_grid(p: &RateParams, psi: &GridCdf) -> Result<f64> {
    let spec = psi.spec();
    check_grid_width(p, spec)?;
    let (mu, nu) = (p.mu(), p.nu());
    let h = spec.step();

    // J+ = int_0^inf Psi(u) e^{-mu u} du, with Psi = 1 beyond the grid.
    let n_right = (spec.t_max() / h).floor() as usize;
    let fp = |i: usize| {
        let u = i as f64 * h;
        psi.eval(u) * (-mu * u).exp()
    };
    let mut j_plus = 0.5 * (fp(0) + fp(n_right));
    for i in 1..n_right {
        j_plus += fp(i);
    }
    j_plus *= h;
    let t_edge = n_right as f64 * h;
    j_plus += (-mu * t_edge).exp() / mu;

    // J- = int_0^inf Psi(-u) e^{-nu u} du, with Psi = 0 beyond the grid.
    let n_left = (-spec.t_min() / h).floor() as usize;
    let fm = |i: usize| {
        let u = i as f64 * h;
        psi.eval(-u) * (-nu * u).exp()
    };
    let mut j_minus = 0.5 * (fm(0) + fm(n_left));
    for i in 1..n_left {
        j_minus += fm(i);
    }
    j_minus *= h;

    // Phi(t) = G(t)(1 - mu e^{-mu t} J+) + F(t) nu e^{-nu t} J-.
    let phi = |t: f64| {
        p.g_cdf(t) * (1.0 - mu * (-mu * t).exp() * j_plus)
            + p.f_cdf(t) * nu * (-nu * t).exp() * j_minus
    };

    // E[Z] = int_0^inf (1 - Phi).
    let g = |i: usize| 1.0 - phi(i as f64 * h);
    let mut ez = 0.5 * (g(0) + g(n_right));
    for i in 1..n_right {
        ez += g(i);
    }
    ez *= h;
    // Closed-form tail of 1 - Phi beyond the grid edge in terms of J+/J-.
    let (a, b) = ((-mu * t_edge).exp(), (-nu * t_edge).exp());
    ez += j_plus * a + b / nu - mu * j_plus * a * b / (mu + nu) - j_minus * b
        + nu * j_minus * a * b / (mu + nu);
    Ok(ez)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::analytic::{lambda_closed, psi_limit, psi_next, simpson};

    fn params(mu: f64, nu: f64) -> RateParams {
        RateParams::new(mu, nu).unwrap()
    }

    #[test]
    fn grid_spec_validation() {
        assert!(GridSpec::new(-1.0, 1.0, 0.1, 1e-10, 100).is_ok());
        assert!(GridSpec::new(1.0, 2.0, 0.1, 1e-10, 100).is_err());
        assert!(GridSpec::new(-1.0, 1.0, 0.3, 1e-10, 100).is_err()); // non-integer count
        assert!(GridSpec::new(-0.2, 0.2, 0.1, 1e-10, 100).is_err()); // count < 10
        assert!(GridSpec::new(-1.0, 1.0, 0.1, 1e-13, 100).is_err());
        assert!(GridSpec::new(-1.0, 1.0, 0.1, 1e-10, 0).is_err());
    }

    #[test]
    fn grid_cdf_validation() {
        let spec = GridSpec::new(-1.0, 1.0, 0.1, 1e-10, 100).unwrap();
        assert!(GridCdf::new(spec, vec![0.0; 3]).is_err());
        let mut vals: Vec<f64> = (0..spec.num_points())
            .map(|i| i as f64 / (spec.num_points() - 1) as f64)
            .collect();
        assert!(GridCdf::new(spec, vals.clone()).is_ok());
        vals[5] = 2.0;
        assert!(GridCdf::new(spec, vals.clone()).is_err());
        vals[5] = 0.0;
        assert!(GridCdf::new(spec, vals).is_err()); // monotonicity broken
    }

    #[test]
    fn kernel_pointwise_values() {
        let p = params(1.0, 1.0);
        assert!((difference_kernel(&p, 0.0) - 0.5).abs() < 1e-12);
        assert!((difference_kernel(&p, 2.0_f64.ln()) - 0.25).abs() < 1e-12);
        let p = params(1.0, 2.0);
        assert!((difference_kernel(&p, -1.0) - (-2.0_f64).exp() / 3.0).abs() < 1e-12);
        assert!((difference_kernel(&p, -1.0) - 0.045111).abs() < 1e-6);
    }

    /// Line-integral oracle: K(w) as the integral of the joint density
    /// `e^{-mu u - nu v}` along `u - v = w` inside the positive quadrant.
    fn kernel_line_oracle(p: &RateParams, w: f64) -> f64 {
        let v0 = (-w).max(0.0);
        let f = |v: f64| (-p.mu() * (v + w) - p.nu() * v).exp();
        simpson(&f, v0, v0 + 60.0 / (p.mu() + p.nu()), 1 << 14)
    }

    #[test]
    fn kernel_matches_line_oracle() {
        for (mu, nu) in [(1.0, 1.0), (1.0, 2.0), (0.5, 3.0)] {
            let p = params(mu, nu);
            for w in [-2.0, -0.5, 0.0, 0.3, 1.7] {
                let oracle = kernel_line_oracle(&p, w);
                assert!(
                    (difference_kernel(&p, w) - oracle).abs() < 1e-10,
                    "({mu},{nu}) w={w}"
                );
            }
        }
    }

    #[test]
    fn kernel_continuity_and_total_mass() {
        for (mu, nu) in [(1.0, 1.0), (1.0, 2.0), (3.3, 0.7)] {
            let p = params(mu, nu);
            let s = mu + nu;
            assert!((difference_kernel(&p, 0.0) - 1.0 / s).abs() < 1e-12);
            assert!((difference_kernel(&p, 1e-14) - difference_kernel(&p, -1e-14)).abs() < 1e-12);
            // mu*nu*int K = 1, exactly mu*nu*(1/mu + 1/nu)/s.
            let mass = mu * nu * (1.0 / mu + 1.0 / nu) / s;
            assert!((mass - 1.0).abs() < 1e-12);
        }
    }

    fn test_spec(p: &RateParams) -> GridSpec {
        let m = p.min_rate();
        GridSpec::new(-30.0 / m, 30.0 / m, 0.005 / m, 1e-5, 200).unwrap()
    }

    #[test]
    fn recursion_on_first_step_cdf() {
        let p = params(1.0, 1.0);
        let psi = GridCdf::tabulate(&p, &psi1(&p), test_spec(&p));
        let next = apply_recursion(&p, &psi).unwrap();
        // Output at t = 0 equals the weighted integral.
        let i0 = next.eval(0.0);
        assert!((i0 - 0.5).abs() < 1e-5, "I = {i0}");
    }

    #[test]
    fn recursion_on_second_step_cdf() {
        let p = params(1.0, 2.0);
        let psi2 = psi_next(&p, &psi1(&p));
        let grid = GridCdf::tabulate(&p, &psi2, test_spec(&p));
        let next = apply_recursion(&p, &grid).unwrap();
        let i0 = next.eval(0.0);
        assert!((i0 - 188.0 / 243.0).abs() < 1e-5, "I = {i0}");
    }

    #[test]
    fn limiting_cdf_is_a_fixed_point_of_the_grid_map() {
        let p = params(1.0, 1.0);
        let spec = test_spec(&p);
        let star = GridCdf::tabulate(&p, &psi_limit(&p), spec);
        let next = apply_recursion(&p, &star).unwrap();
        assert!(star.sup_distance(&next) < spec.tol());
    }

    #[test]
    fn narrow_grid_is_rejected_with_widening_hint() {
        let p = params(1.0, 1.0);
        let spec = GridSpec::new(-2.0, 2.0, 0.01, 1e-10, 50).unwrap();
        let psi = GridCdf::tabulate(&p, &psi1(&p), spec);
        match apply_recursion(&p, &psi) {
            Err(Error::GridTooNarrow(msg)) => {
                assert!(msg.contains("widen"), "message: {msg}");
            }
            other => panic!("expected GridTooNarrow, got {other:?}"),
        }
    }

    #[test]
    fn solver_examples() {
        let p = params(1.0, 1.0);
        let spec = GridSpec::new(-30.0, 30.0, 0.005, 1e-10, 200).unwrap();
        let (grid, _) = solve_fixed_point(&p, spec).unwrap();
        assert!((grid.eval(0.0) - 0.5).abs() < 1e-4);

        let p = params(1.0, 2.0);
        let spec = GridSpec::new(-30.0, 30.0, 0.005, 1e-10, 200).unwrap();
        let (grid, iterations) = solve_fixed_point(&p, spec).unwrap();
        assert!((grid.eval(0.0) - 0.8).abs() < 1e-3);
        // Contraction-ratio bound on the iteration count.
        let ratio = 2.0 * p.mu() * p.nu() / (p.mu() + p.nu()).powi(2);
        let bound = (1e-10f64.ln() / ratio.ln()).ceil() as usize + 2;
        assert!(iterations <= bound, "{iterations} > {bound}");
    }

    #[test]
    fn solver_reports_non_convergence() {
        let p = params(1.0, 2.0);
        let spec = GridSpec::new(-30.0, 30.0, 0.005, 1e-10, 2).unwrap();
        match solve_fixed_point(&p, spec) {
            Err(Error::NoConvergence { iterations, delta }) => {
                assert_eq!(iterations, 2);
                assert!(delta > 1e-10);
            }
            other => panic!("expected NoConvergence, got {other:?}"),
        }
    }

    #[test]
    fn monotone_iteration_direction() {
        for (mu, nu, sign) in [(2.0, 1.0, -1.0), (1.0, 2.0, 1.0), (1.5, 1.5, 0.0)] {
            let p = params(mu, nu);
            let spec = test_spec(&p);
            let mut cur = GridCdf::tabulate(&p, &psi1(&p), spec);
            for _ in 0..5 {
                let next = apply_recursion(&p, &cur).unwrap();
                let slack = 10.0 * spec.tol();
                for (a, b) in cur.values().iter().zip(next.values()) {
                    if sign < 0.0 {
                        assert!(b - a <= slack);
                    } else if sign > 0.0 {
                        assert!(a - b <= slack);
                    } else {
                        assert!((a - b).abs() <= slack);
                    }
                }
                cur = next;
            }
        }
    }

    #[test]
    fn solver_matches_analytic_on_rate_grid() {
        // Logarithmic sweep over [0.1, 10]^2. The step scales with the
        // fast rate so its side of the kernel stays resolved; the range
        // scales with the slow rate so the tails fit.
        for &mu in &[0.1, 1.0, 10.0] {
            for &nu in &[0.1, 1.0, 10.0] {
                let p = params(mu, nu);
                let m = p.min_rate();
                let step = 0.005 / mu.max(nu);
                let span = (30.0 / m / step).ceil() * step;
                let spec = GridSpec::new(-span, span, step, 1e-10, 200).unwrap();
                let (grid, _) = solve_fixed_point(&p, spec).unwrap();
                let star = psi_limit(&p);
                let sup = grid.sup_distance_to(|t| psi_eval(&p, &star, t));
                assert!(sup < 1e-4, "({mu},{nu}): sup {sup}");
            }
        }
    }

    #[test]
    fn lambda_from_grid_examples() {
        for (mu, nu, tol) in [(1.0, 1.0, 1e-3), (1.0, 2.0, 2e-3)] {
            let p = params(mu, nu);
            let (grid, _) = solve_fixed_point(&p, GridSpec::default_for(&p)).unwrap();
            let lam = lambda_from_grid(&p, &grid).unwrap();
            let exact = lambda_closed(&p);
            assert!(
                (lam - exact).abs() < tol * exact,
                "({mu},{nu}): {lam} vs {exact}"
            );
        }
        // Swap symmetry up to grid tolerance.
        let p12 = params(1.0, 2.0);
        let p21 = params(2.0, 1.0);
        let (g12, _) = solve_fixed_point(&p12, GridSpec::default_for(&p12)).unwrap();
        let (g21, _) = solve_fixed_point(&p21, GridSpec::default_for(&p21)).unwrap();
        let l12 = lambda_from_grid(&p12, &g12).unwrap();
        let l21 = lambda_from_grid(&p21, &g21).unwrap();
        assert!((l12 - l21).abs() < 1e-6 * l12);
    }

    #[test]
    fn grid_eval_interpolation_and_extension() {
        let p = params(1.0, 1.0);
        let spec = GridSpec::new(-5.0, 5.0, 0.5, 1e-10, 10).unwrap();
        let grid = GridCdf::tabulate(&p, &psi_limit(&p), spec);
        assert_eq!(grid.eval(-100.0), 0.0);
        assert_eq!(grid.eval(100.0), 1.0);
        let mid = grid.eval(0.25);
        assert!(mid > grid.eval(0.0) && mid < grid.eval(0.5));
    }
}
