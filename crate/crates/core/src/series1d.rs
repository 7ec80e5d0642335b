//! One-dimensional exponential Taylor expansions.
//!
//! Partial sums are polynomials in `w = e^{λ(x - x0)} - 1`. The remainder of
//! order `N` is evaluated from its integral representation
//!
//! ```text
//! R_N = λ/(N-1)! ∫_0^1 D^{λ,(N)}a(ξ_θ) (e^{λ(1-θ)(x-x0)} - 1)^{N-1} (x - x0) dθ,
//! ξ_θ = (1-θ) x0 + θ x
//! ```
//!
//! and bounded by the two sup estimates obtained by pulling absolute values
//! inside. Suprema are sampled on uniform grids; they are estimates, not
//! certificates.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{validation, Error, Result};
use crate::expr::ExprAst;
use crate::jet::lift;
use crate::multi_index::factorial;
use crate::operator::{cancellation_scale, check_lambda, d_lambda_recursive};
use crate::quadrature::GaussLegendre;

pub const MAX_EXPANSION_ORDER: usize = 64;
pub const DEFAULT_QUAD_NODES: usize = 64;
pub const DEFAULT_GRID: usize = 513;
/// Grid used by [`epsilon_sup`] for general complex `λ`.
const EPSILON_GRID: usize = 1025;
const GROWTH_GRID: usize = 257;
pub const MAX_GROWTH_ORDER: usize = 32;
/// A ratio's denominator counts as zero below this fraction of the largest
/// significant operator value.
const ZERO_RELATIVE: f64 = 1e-14;
/// Operator values below this fraction of their cancellation scale are
/// rounding residue.
const CANCELLATION_FLOOR: f64 = 1e-10;
/// Relative spread of the trailing window above which a radius is unstable.
const STABLE_SPREAD: f64 = 0.2;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

/// Truncated series `Σ_{j<N} c_j w^j` with `c_j = D^{λ,(j)}a(x0) / j!`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Expansion1D {
    pub lambda: Complex64,
    pub x0: f64,
    pub coeffs: Vec<Complex64>,
}

impl Expansion1D {
    /// Number of terms `N`.
    pub fn order(&self) -> usize {
        self.coeffs.len()
    }

    pub fn eval(&self, x: f64) -> Complex64 {
        eval_series(self, x)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RemainderEstimate {
    pub order: usize,
    pub integral_value: Complex64,
    pub bound_tight: f64,
    pub bound_loose: f64,
    pub grid_points: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConvergenceReport {
    /// `(j, j |v_j| / |v_{j+1}|)` for every index with a usable denominator.
    pub ratios: Vec<(usize, f64)>,
    pub r_estimate: f64,
    /// Period `T` when `λ = 2πi / T` is purely imaginary.
    pub period: Option<f64>,
    /// Half-width of the x-region of convergence, when `period` is known.
    pub x_region_halfwidth: Option<f64>,
    pub stable: bool,
}

fn check_point(name: &str, v: f64) -> Result<()> {
    if !v.is_finite() {
        return Err(validation(format!("{name} must be finite")));
    }
    Ok(())
}

/// `D^{λ,(j)} a(xi)` for `j = 0..=n` by the recursive route.
pub fn operator_values_at(ast: &ExprAst, lambda: Complex64, xi: f64, n: usize) -> Result<Vec<Complex64>> {
    let jet = lift(ast, xi, n)?;
    Ok(d_lambda_recursive(&jet, xi, lambda, n)?.values)
}

fn operator_value_at(ast: &ExprAst, lambda: Complex64, xi: f64, n: usize) -> Result<Complex64> {
    Ok(operator_values_at(ast, lambda, xi, n)?[n])
}

/// Expansion with `n` terms about `x0`.
pub fn expand_1d(ast: &ExprAst, lambda: Complex64, x0: f64, n: usize) -> Result<Expansion1D> {
    check_lambda(lambda)?;
    check_point("x0", x0)?;
    if !(1..=MAX_EXPANSION_ORDER).contains(&n) {
        return Err(validation(format!(
            "expansion order must lie in 1..={MAX_EXPANSION_ORDER}, got {n}"
        )));
    }
    let values = operator_values_at(ast, lambda, x0, n - 1)?;
    let coeffs = values
        .iter()
        .enumerate()
        .map(|(j, v)| v / factorial(j))
        .collect();
    Ok(Expansion1D { lambda, x0, coeffs })
}

/// Horner evaluation in `w = e^{λ(x - x0)} - 1`.
pub fn eval_series(exp: &Expansion1D, x: f64) -> Complex64 {
    let w = (exp.lambda * (x - exp.x0)).exp_m1();
    exp.coeffs.iter().rev().fold(ZERO, |acc, c| acc * w + c)
}

trait ExpM1 {
    fn exp_m1(self) -> Self;
}

impl ExpM1 for Complex64 {
    /// `e^z - 1` without cancellation for small `|z|`.
    fn exp_m1(self) -> Complex64 {
        // e^{a+ib} - 1 = (e^a cos b - 1) + i e^a sin b
        //             = expm1(a) cos b - 2 sin^2(b/2) + i e^a sin b
        let (a, b) = (self.re, self.im);
        let half = (b / 2.0).sin();
        Complex64::new(a.exp_m1() * b.cos() - 2.0 * half * half, a.exp() * b.sin())
    }
}

pub(crate) fn exp_m1(z: Complex64) -> Complex64 {
    z.exp_m1()
}

/// Integral remainder of order `n` by `quad_nodes`-point Gauss–Legendre.
pub fn remainder_integral(
    ast: &ExprAst,
    lambda: Complex64,
    x0: f64,
    x: f64,
    n: usize,
    quad_nodes: usize,
) -> Result<Complex64> {
    check_lambda(lambda)?;
    check_point("x0", x0)?;
    check_point("x", x)?;
    if n == 0 {
        return Err(validation("remainder order must be at least 1"));
    }
    let rule = GaussLegendre::new(quad_nodes)?;
    if x == x0 {
        return Ok(ZERO);
    }
    let h = x - x0;
    let mut acc = ZERO;
    for (&theta, &weight) in rule.nodes.iter().zip(&rule.weights) {
        let xi = (1.0 - theta) * x0 + theta * x;
        let d = operator_value_at(ast, lambda, xi, n)?;
        let w = exp_m1(lambda * ((1.0 - theta) * h));
        acc += d * w.powi(n as i32 - 1) * weight;
    }
    Ok(acc * lambda * h / factorial(n - 1))
}

/// Both sup bounds for `R_n`, plus the integral value for comparison.
pub fn remainder_bound(
    ast: &ExprAst,
    lambda: Complex64,
    x0: f64,
    x: f64,
    n: usize,
    grid: usize,
) -> Result<RemainderEstimate> {
    check_lambda(lambda)?;
    check_point("x0", x0)?;
    check_point("x", x)?;
    if n == 0 {
        return Err(validation("remainder order must be at least 1"));
    }
    if grid < 3 || grid.is_multiple_of(2) {
        return Err(validation("grid must be odd and at least 3"));
    }
    let integral_value = remainder_integral(ast, lambda, x0, x, n, DEFAULT_QUAD_NODES)?;
    let h = (x - x0).abs();
    let mut sup_product: f64 = 0.0;
    let mut sup_operator: f64 = 0.0;
    for i in 0..grid {
        let t = i as f64 / (grid - 1) as f64;
        let xi = x0 + (x - x0) * t;
        let d = operator_value_at(ast, lambda, xi, n)?;
        let w = exp_m1(lambda * (x - xi));
        sup_product = sup_product.max((d * w.powi(n as i32 - 1)).norm());
        sup_operator = sup_operator.max(d.norm());
    }
    let prefactor = lambda.norm() / factorial(n - 1) * h;
    let eps = epsilon_sup(lambda, h);
    Ok(RemainderEstimate {
        order: n,
        integral_value,
        bound_tight: prefactor * sup_product,
        bound_loose: prefactor * sup_operator * eps.powi(n as i32 - 1),
        grid_points: grid,
    })
}

/// `ε(λ, r) = sup_{-r ≤ z ≤ r} |e^{λz} - 1|`.
pub fn epsilon_sup(lambda: Complex64, r: f64) -> f64 {
    let r = r.abs();
    if r == 0.0 {
        return 0.0;
    }
    if lambda.im == 0.0 {
        return (lambda.re.abs() * r).exp_m1();
    }
    if lambda.re == 0.0 {
        let half = (lambda.im.abs() * r / 2.0).min(PI / 2.0);
        return 2.0 * half.sin();
    }
    let f = |z: f64| exp_m1(lambda * z).norm();
    let step = 2.0 * r / (EPSILON_GRID - 1) as f64;
    let (best_i, best) = (0..EPSILON_GRID)
        .map(|i| (i, f(-r + step * i as f64)))
        .fold((0, f64::NEG_INFINITY), |a, b| if b.1 > a.1 { b } else { a });
    let lo = (-r + step * best_i as f64 - step).max(-r);
    let hi = (-r + step * best_i as f64 + step).min(r);
    best.max(golden_max(f, lo, hi))
}

fn golden_max(f: impl Fn(f64) -> f64, mut lo: f64, mut hi: f64) -> f64 {
    let g = (5f64.sqrt() - 1.0) / 2.0;
    let mut a = hi - g * (hi - lo);
    let mut b = lo + g * (hi - lo);
    let (mut fa, mut fb) = (f(a), f(b));
    for _ in 0..80 {
        if fa < fb {
            lo = a;
            a = b;
            fa = fb;
            b = lo + g * (hi - lo);
            fb = f(b);
        } else {
            hi = b;
            b = a;
            fb = fa;
            a = hi - g * (hi - lo);
            fa = f(a);
        }
    }
    fa.max(fb)
}

/// Period `T` with `λ = 2πi/T`, for purely imaginary `λ`.
pub fn period_of(lambda: Complex64) -> Option<f64> {
    (lambda.re == 0.0 && lambda.im != 0.0).then(|| 2.0 * PI / lambda.im.abs())
}

/// Half-width `T arcsin(r/2) / π` of the x-region, infinite for `r > 2`.
pub fn region_halfwidth(period: f64, r: f64) -> f64 {
    if r > 2.0 {
        f64::INFINITY
    } else {
        period * (r / 2.0).asin() / PI
    }
}

/// Finite-window surrogate for `limsup j |v_j| / |v_{j+1}|`.
pub fn radius_estimate(
    ast: &ExprAst,
    lambda: Complex64,
    x0: f64,
    j_max: usize,
    window: usize,
) -> Result<ConvergenceReport> {
    check_lambda(lambda)?;
    check_point("x0", x0)?;
    if window < 4 || window > j_max || j_max > MAX_EXPANSION_ORDER {
        return Err(validation(format!(
            "need 4 <= window <= j_max <= {MAX_EXPANSION_ORDER}, got window={window}, j_max={j_max}"
        )));
    }
    let jet = lift(ast, x0, j_max)?;
    let values = d_lambda_recursive(&jet, x0, lambda, j_max)?.values;
    let scale = cancellation_scale(&jet, lambda, j_max)?;
    let ratios = ratio_sequence(&values, &scale);
    if ratios.len() < window {
        return Err(Error::Diagnostic(format!(
            "only {} usable ratios, window needs {window} (terminating or vanishing series?)",
            ratios.len()
        )));
    }
    let tail = &ratios[ratios.len() - window..];
    let max = tail.iter().map(|r| r.1).fold(f64::NEG_INFINITY, f64::max);
    let min = tail.iter().map(|r| r.1).fold(f64::INFINITY, f64::min);
    let stable = if max > 0.0 {
        (max - min) / max <= STABLE_SPREAD
    } else {
        true
    };
    let period = period_of(lambda);
    Ok(ConvergenceReport {
        r_estimate: max,
        x_region_halfwidth: period.map(|t| region_halfwidth(t, max)),
        period,
        stable,
        ratios,
    })
}

/// Ratios `j |v_j| / |v_{j+1}|` for `j ≥ 1`.
///
/// A value is significant when it exceeds `1e-10` of its cancellation scale;
/// the recursion amplifies rounding roughly like `j!`, so anything below that
/// carries no signal. A denominator counts as zero when it is not significant
/// or falls below `1e-14` times the largest significant value.
pub(crate) fn ratio_sequence(values: &[Complex64], scale: &[f64]) -> Vec<(usize, f64)> {
    let significant = |j: usize| {
        let v = values[j].norm();
        v > 0.0 && v > CANCELLATION_FLOOR * scale[j]
    };
    let largest = (0..values.len())
        .filter(|&j| significant(j))
        .map(|j| values[j].norm())
        .fold(0.0, f64::max);
    (1..values.len().saturating_sub(1))
        .filter(|&j| significant(j + 1) && values[j + 1].norm() >= ZERO_RELATIVE * largest)
        .map(|j| (j, j as f64 * values[j].norm() / values[j + 1].norm()))
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GrowthReport {
    pub period: f64,
    /// `g_N = sup_{[0,T]} |D^{λ,(N)} a|` sampled on the grid, `N = 0..=N_max`.
    pub sup_values: Vec<f64>,
    /// Smallest shift `k` for which `g_N / (N+k)!` stops growing over the
    /// trailing half of the sampled orders.
    pub k: Option<usize>,
    /// `max g_N / (N+k)!` over the trailing half.
    pub c0: Option<f64>,
    /// `max g_N / (N+k)!` over every sampled order.
    pub c0_all_orders: Option<f64>,
    pub bounded: bool,
    pub periodic: bool,
    pub grid_points: usize,
    pub note: String,
}

/// Heuristic check of factorial growth `sup |D^{λ,(N)} a| ≤ C0 (N+k)!` for
/// a `T`-periodic function with `λ = 2πi/T`. Sampled, so it neither proves
/// nor refutes the hypothesis.
pub fn growth_diagnostic(ast: &ExprAst, lambda: Complex64, period: f64, n_max: usize) -> Result<GrowthReport> {
    check_lambda(lambda)?;
    if !(period.is_finite() && period > 0.0) {
        return Err(validation("period must be positive"));
    }
    let expected = Complex64::new(0.0, 2.0 * PI / period);
    if (lambda - expected).norm() > 1e-9 * expected.norm() {
        return Err(validation(format!(
            "growth diagnostic needs lambda = 2*pi*i/T = {}i",
            expected.im
        )));
    }
    if n_max == 0 || n_max > MAX_GROWTH_ORDER {
        return Err(validation(format!("N_max must lie in 1..={MAX_GROWTH_ORDER}")));
    }
    let mut sup_values = vec![0.0f64; n_max + 1];
    for i in 0..GROWTH_GRID {
        let xi = period * i as f64 / (GROWTH_GRID - 1) as f64;
        let values = operator_values_at(ast, lambda, xi, n_max)?;
        for (s, v) in sup_values.iter_mut().zip(&values) {
            *s = s.max(v.norm());
        }
    }
    let periodic = (0..8).all(|i| {
        let xi = period * i as f64 / 8.0;
        match (ast.eval_real(&[xi]), ast.eval_real(&[xi + period])) {
            (Ok(a), Ok(b)) => (a - b).norm() <= 1e-9 * (1.0 + a.norm()),
            _ => false,
        }
    });
    let tail_start = n_max / 2;
    let mut fit = None;
    for k in 0..=n_max {
        let q: Vec<f64> = sup_values
            .iter()
            .enumerate()
            .map(|(n, g)| g / factorial(n + k))
            .collect();
        let tail = &q[tail_start..];
        let tail_max = tail.iter().copied().fold(0.0, f64::max);
        if tail_max <= tail[0] * (1.0 + 1e-6) {
            let all = q.iter().copied().fold(0.0, f64::max);
            fit = Some((k, tail_max, all));
            break;
        }
    }
    let mut note = String::from("sampled heuristic: does not prove or refute the growth hypothesis");
    if !periodic {
        note.push_str("; warning: function does not appear to be T-periodic");
    }
    Ok(GrowthReport {
        period,
        sup_values,
        k: fit.map(|f| f.0),
        c0: fit.map(|f| f.1),
        c0_all_orders: fit.map(|f| f.2),
        bounded: fit.is_some(),
        periodic,
        grid_points: GROWTH_GRID,
        note,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::parse;
    use proptest::prelude::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn two_pi_i() -> Complex64 {
        c(0.0, 2.0 * PI)
    }

    fn ast(src: &str) -> ExprAst {
        parse(src, 1).unwrap()
    }

    #[test]
    fn cosine_coefficients() {
        let e = expand_1d(&ast("cos(2*pi*x)"), two_pi_i(), 0.0, 5).unwrap();
        let expect = [1.0, 0.0, 0.5, -0.5, 0.5];
        for (got, want) in e.coeffs.iter().zip(expect) {
            assert!((got - c(want, 0.0)).norm() < 1e-12);
        }
    }

    #[test]
    fn linear_coefficients() {
        let e = expand_1d(&ast("x"), two_pi_i(), 0.0, 3).unwrap();
        assert_eq!(e.coeffs[0], c(0.0, 0.0));
        for j in 1..3 {
            let sign = if j % 2 == 1 { 1.0 } else { -1.0 };
            let want = c(sign, 0.0) / (two_pi_i() * j as f64);
            assert!((e.coeffs[j] - want).norm() < 1e-15);
        }
    }

    #[test]
    fn exponential_terminates() {
        let e = expand_1d(&ast("exp(x)"), c(1.0, 0.0), 0.0, 5).unwrap();
        for (j, want) in [1.0, 1.0, 0.0, 0.0, 0.0].iter().enumerate() {
            assert!((e.coeffs[j] - c(*want, 0.0)).norm() < 1e-14);
        }
        let e2 = expand_1d(&ast("exp(x)"), c(1.0, 0.0), 0.0, 2).unwrap();
        for x in [-1.0, -0.3, 0.0, 0.7, 1.0] {
            assert!((eval_series(&e2, x) - c(f64::exp(x), 0.0)).norm() < 1e-12 * f64::exp(x));
        }
    }

    #[test]
    fn eigenfunctions_terminate() {
        let lambda = c(0.3, 1.1);
        for m in 1..=4 {
            let src = format!("exp({m}*(0.3+1.1*i)*x)");
            let f = ast(&src);
            let e = expand_1d(&f, lambda, 0.2, m + 1).unwrap();
            let values = operator_values_at(&f, lambda, 0.2, m + 3).unwrap();
            assert!(values[m + 1].norm() < 1e-9 && values[m + 2].norm() < 1e-9);
            for x in [-0.5, 0.1, 0.9] {
                let want = f.eval_real(&[x]).unwrap();
                assert!((eval_series(&e, x) - want).norm() < 1e-12 * (1.0 + want.norm()), "m={m} x={x}");
            }
        }
    }

    #[test]
    fn evaluation_at_center_and_cosine_value() {
        let e = expand_1d(&ast("cos(2*pi*x)"), two_pi_i(), 0.0, 40).unwrap();
        assert_eq!(eval_series(&e, 0.0), e.coeffs[0]);
        let v = eval_series(&e, 0.1);
        assert!((v - c((0.2 * PI).cos(), 0.0)).norm() < 1e-7);
        assert!(((0.2 * PI).cos() - 0.80901699).abs() < 1e-8);
    }

    #[test]
    fn periodic_partial_sums() {
        let e = expand_1d(&ast("cos(2*pi*x) + sin(4*pi*x)"), two_pi_i(), 0.0, 12).unwrap();
        for x in [-0.4, -0.1, 0.05, 0.33] {
            let w = exp_m1(e.lambda * x).norm();
            let scale: f64 = e.coeffs.iter().enumerate().map(|(j, c)| c.norm() * w.powi(j as i32)).sum();
            assert!((eval_series(&e, x) - eval_series(&e, x + 1.0)).norm() < 1e-13 * scale.max(1.0));
        }
    }

    #[test]
    fn remainder_examples() {
        let f = ast("exp(x)");
        let l = c(1.0, 0.0);
        assert_eq!(remainder_integral(&f, l, 0.0, 0.0, 5, 64).unwrap(), c(0.0, 0.0));
        let partial = eval_series(&expand_1d(&f, l, 0.0, 5).unwrap(), 0.3);
        let r = remainder_integral(&f, l, 0.0, 0.3, 5, 64).unwrap();
        assert!((partial + r - c(0.3f64.exp(), 0.0)).norm() < 1e-10);

        let g = ast("cos(2*pi*x)");
        let partial = eval_series(&expand_1d(&g, two_pi_i(), 0.0, 6).unwrap(), 0.1);
        let r = remainder_integral(&g, two_pi_i(), 0.0, 0.1, 6, 64).unwrap();
        assert!((c((0.2 * PI).cos(), 0.0) - partial - r).norm() < 1e-9);
    }

    #[test]
    fn bound_examples() {
        let g = ast("cos(2*pi*x)");
        let at_center = remainder_bound(&g, two_pi_i(), 0.0, 0.0, 6, 513).unwrap();
        assert_eq!((at_center.bound_tight, at_center.bound_loose), (0.0, 0.0));
        let est = remainder_bound(&g, two_pi_i(), 0.0, 0.1, 6, 513).unwrap();
        assert!(est.bound_tight >= est.integral_value.norm());

        let f = ast("exp(x)");
        let est = remainder_bound(&f, c(1.0, 0.0), 0.0, 0.3, 5, 513).unwrap();
        assert!(est.bound_loose >= est.bound_tight);
        assert!(est.bound_tight >= est.integral_value.norm());
        assert!(est.bound_tight > 0.0);
    }

    #[test]
    fn argument_validation() {
        let f = ast("x");
        let l = c(1.0, 0.0);
        assert!(expand_1d(&f, c(0.0, 0.0), 0.0, 3).is_err());
        assert!(expand_1d(&f, l, 0.0, 0).is_err());
        assert!(expand_1d(&f, l, 0.0, 65).is_err());
        assert!(remainder_integral(&f, l, 0.0, 1.0, 0, 64).is_err());
        assert!(remainder_integral(&f, l, 0.0, 1.0, 2, 1).is_err());
        assert!(remainder_bound(&f, l, 0.0, 1.0, 2, 4).is_err());
        assert!(remainder_bound(&f, l, 0.0, 1.0, 2, 1).is_err());
        assert!(radius_estimate(&f, l, 0.0, 10, 3).is_err());
        assert!(radius_estimate(&f, l, 0.0, 65, 8).is_err());
        assert!(matches!(
            remainder_integral(&ast("log(x)"), l, 1.0, -1.0, 3, 64),
            Err(Error::Domain(_))
        ));
    }

    #[test]
    fn epsilon_closed_forms() {
        assert_eq!(epsilon_sup(c(0.3, -2.0), 0.0), 0.0);
        assert!((epsilon_sup(two_pi_i(), 1.0 / 6.0) - 1.0).abs() < 1e-15);
        for r in [0.1, 0.5, 2.0] {
            assert!((epsilon_sup(c(1.0, 0.0), r) - r.exp_m1()).abs() < 1e-15);
            assert!((epsilon_sup(c(-1.0, 0.0), r) - r.exp_m1()).abs() < 1e-15);
        }
        assert_eq!(epsilon_sup(two_pi_i(), 0.7), 2.0);
    }

    /// Dense brute-force oracle for the supremum.
    fn brute_epsilon(lambda: Complex64, r: f64) -> f64 {
        let n = 200_001;
        (0..n)
            .map(|i| {
                let z = -r + 2.0 * r * i as f64 / (n - 1) as f64;
                ((lambda * z).exp() - 1.0).norm()
            })
            .fold(0.0, f64::max)
    }

    #[test]
    fn epsilon_general_complex_matches_brute_force() {
        for (lambda, r) in [(c(0.4, 3.0), 0.9), (c(-0.2, 7.0), 1.3), (c(1.0, 1.0), 0.5), (c(0.05, 20.0), 0.4)] {
            let got = epsilon_sup(lambda, r);
            let oracle = brute_epsilon(lambda, r);
            assert!(got >= oracle - 1e-12 && got - oracle < 1e-8, "{lambda} {r}: {got} vs {oracle}");
        }
    }

    proptest! {
        #[test]
        fn epsilon_monotone_and_bounded(re in -2.0f64..2.0, im in -10.0f64..10.0, r in 0.0f64..2.0, dr in 0.0f64..0.5) {
            let lambda = c(re, im);
            prop_assume!(lambda.norm() > 1e-3);
            prop_assert!(epsilon_sup(lambda, r + dr) >= epsilon_sup(lambda, r) - 1e-12);
            let imag = c(0.0, im);
            prop_assume!(im.abs() > 1e-3);
            prop_assert!(epsilon_sup(imag, r) <= 2.0);
        }
    }

    #[test]
    fn cosine_radius() {
        let rep = radius_estimate(&ast("cos(2*pi*x)"), two_pi_i(), 0.0, 64, 8).unwrap();
        for &(j, rho) in &rep.ratios {
            if j >= 2 {
                assert!((rho - j as f64 / (j as f64 + 1.0)).abs() < 1e-9, "j={j}");
            }
        }
        assert!((rep.r_estimate - 1.0).abs() < 0.05);
        assert!((rep.x_region_halfwidth.unwrap() - 1.0 / 6.0).abs() < 0.01);
        assert!(rep.stable);
    }

    #[test]
    fn linear_radius() {
        let rep = radius_estimate(&ast("x"), two_pi_i(), 0.0, 40, 8).unwrap();
        assert!(rep.ratios.iter().all(|r| (r.1 - 1.0).abs() < 1e-12));
        assert!((rep.r_estimate - 1.0).abs() < 1e-12);
        assert!((rep.x_region_halfwidth.unwrap() - 1.0 / 6.0).abs() < 1e-12);
    }

    #[test]
    fn terminating_radius_is_diagnostic_error() {
        for (src, lambda) in [("exp(x)", c(1.0, 0.0)), ("exp(2*pi*i*x)", two_pi_i()), ("4", c(1.0, 0.0))] {
            let err = radius_estimate(&ast(src), lambda, 0.0, 64, 8).unwrap_err();
            assert!(matches!(err, Error::Diagnostic(_)), "{src}");
        }
    }

    #[test]
    fn region_conversion() {
        assert!((region_halfwidth(1.0, 1.0) - 1.0 / 6.0).abs() < 1e-15);
        assert!((region_halfwidth(1.0, 2.0) - 0.5).abs() < 1e-15);
        assert!(region_halfwidth(1.0, 2.5).is_infinite());
        assert_eq!(period_of(c(0.0, -PI)), Some(2.0));
        assert_eq!(period_of(c(1.0, PI)), None);
    }

    #[test]
    fn cosine_growth() {
        let rep = growth_diagnostic(&ast("cos(2*pi*x)"), two_pi_i(), 1.0, 16).unwrap();
        for n in 2..=16 {
            let want = factorial(n) / 2.0;
            assert!((rep.sup_values[n] - want).abs() < 1e-9 * want, "n={n}");
        }
        assert_eq!(rep.k, Some(0));
        assert!((rep.c0.unwrap() - 0.5).abs() < 1e-9);
        assert!(rep.bounded && rep.periodic);
    }

    #[test]
    fn constant_growth() {
        let rep = growth_diagnostic(&ast("2"), two_pi_i(), 1.0, 8).unwrap();
        assert!(rep.sup_values[1..].iter().all(|&g| g == 0.0));
        assert!(rep.bounded);
    }

    #[test]
    fn linear_growth_warns() {
        let rep = growth_diagnostic(&ast("x"), two_pi_i(), 1.0, 12).unwrap();
        assert!(!rep.periodic);
        assert!(rep.note.contains("warning"));
        for n in 1..=12 {
            let want = factorial(n - 1) / (2.0 * PI);
            assert!((rep.sup_values[n] - want).abs() < 1e-9 * want);
        }
        assert_eq!(rep.k, Some(0));
    }

    #[test]
    fn growth_requires_matching_lambda() {
        assert!(growth_diagnostic(&ast("x"), c(0.0, 1.0), 1.0, 4).is_err());
        assert!(growth_diagnostic(&ast("x"), two_pi_i(), -1.0, 4).is_err());
        assert!(growth_diagnostic(&ast("x"), two_pi_i(), 1.0, 33).is_err());
    }
}
