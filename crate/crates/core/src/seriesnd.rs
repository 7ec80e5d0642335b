//! Multivariate exponential Taylor expansions on axis-aligned boxes.
//!
//! The partial sum runs over multi-indices `|γ| < N`:
//! `Σ c_γ Π_i (e^{λ(x_i - x̃_i)} - 1)^{γ_i}` with `c_γ = D^{λ,(γ)}a(x̃) / γ!`.
//! No closed remainder formula is available here, only the bound
//! `|λ| [Σ_{|γ|=N} N/γ! sup_Q |D^{λ,(γ)}a|] ε(λ, ‖x-x̃‖∞)^{N-1} ‖x-x̃‖∞`,
//! with the sup over the box `Q(x, x̃)` estimated from samples.

use std::collections::BTreeMap;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{validation, Result};
use crate::expr::ExprAst;
use crate::jet::{lift_nd, lift_nd_in, IndexSpace};
use crate::multi_index::{factorial, indices_of_degree};
pub use crate::multi_index::{multi_indices, MultiIndex};
use crate::operator::{check_lambda, d_lambda_nd, d_lambda_nd_at};
use crate::series1d::{epsilon_sup, exp_m1};
use crate::stirling::StirlingTable;

pub const MAX_DIMS: usize = 4;
pub const MAX_ORDER: usize = 16;
/// Beyond this many variables the box is sampled randomly instead of on a
/// tensor grid.
const TENSOR_GRID_MAX_DIMS: usize = 3;
pub const DEFAULT_GRID: usize = 17;
pub const DEFAULT_ALPHA: f64 = 0.9;

/// Closed box `Π [lo_i, hi_i]`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BoxDomain {
    pub lo: Vec<f64>,
    pub hi: Vec<f64>,
}

impl BoxDomain {
    /// `Q(x, y)`: each coordinate between the corresponding coordinates.
    pub fn between(x: &[f64], y: &[f64]) -> Self {
        let (lo, hi) = x.iter().zip(y).map(|(&a, &b)| (a.min(b), a.max(b))).unzip();
        Self { lo, hi }
    }

    pub fn around(center: &[f64], halfwidth: f64) -> Self {
        Self {
            lo: center.iter().map(|c| c - halfwidth).collect(),
            hi: center.iter().map(|c| c + halfwidth).collect(),
        }
    }

    pub fn dims(&self) -> usize {
        self.lo.len()
    }

    pub fn contains(&self, p: &[f64]) -> bool {
        p.iter()
            .zip(self.lo.iter().zip(&self.hi))
            .all(|(v, (l, h))| l <= v && v <= h)
    }

    /// Tensor grid with `grid` points per non-degenerate axis for up to three
    /// dimensions; otherwise `10 * grid` seeded uniform points plus both
    /// corners.
    pub fn sample(&self, grid: usize, seed: u64) -> Vec<Vec<f64>> {
        let axis = |i: usize| -> Vec<f64> {
            if self.lo[i] == self.hi[i] {
                vec![self.lo[i]]
            } else {
                (0..grid)
                    .map(|k| self.lo[i] + (self.hi[i] - self.lo[i]) * k as f64 / (grid - 1) as f64)
                    .collect()
            }
        };
        if self.dims() <= TENSOR_GRID_MAX_DIMS {
            let mut points = vec![Vec::new()];
            for i in 0..self.dims() {
                let ticks = axis(i);
                points = points
                    .into_iter()
                    .flat_map(|p| {
                        ticks.iter().map(move |&t| {
                            let mut q = p.clone();
                            q.push(t);
                            q
                        })
                    })
                    .collect();
            }
            points
        } else {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let mut points = vec![self.lo.clone(), self.hi.clone()];
            for _ in 0..10 * grid {
                points.push(
                    self.lo
                        .iter()
                        .zip(&self.hi)
                        .map(|(&l, &h)| if l == h { l } else { rng.gen_range(l..=h) })
                        .collect(),
                );
            }
            points
        }
    }
}

/// `c_γ` for all `|γ| < order`, keyed in graded-lexicographic order.
#[derive(Debug, Clone, PartialEq)]
pub struct ExpansionND {
    pub lambda: Complex64,
    pub center: Vec<f64>,
    pub order: usize,
    pub coeffs: BTreeMap<MultiIndex, Complex64>,
}

impl ExpansionND {
    pub fn dims(&self) -> usize {
        self.center.len()
    }

    pub fn coeff(&self, g: &MultiIndex) -> Complex64 {
        self.coeffs.get(g).copied().unwrap_or_default()
    }
}

fn check_vector(name: &str, v: &[f64], dims: usize) -> Result<()> {
    if v.len() != dims {
        return Err(validation(format!(
            "{name} has {} coordinates, expected {dims}",
            v.len()
        )));
    }
    if v.iter().any(|c| !c.is_finite()) {
        return Err(validation(format!("{name} must be finite")));
    }
    Ok(())
}

fn check_setup(ast: &ExprAst, center: &[f64], order: usize) -> Result<()> {
    let dims = ast.dims();
    if !(1..=MAX_DIMS).contains(&dims) {
        return Err(validation(format!("dimension must lie in 1..={MAX_DIMS}")));
    }
    if !(1..=MAX_ORDER).contains(&order) {
        return Err(validation(format!("order must lie in 1..={MAX_ORDER}")));
    }
    check_vector("center", center, dims)
}

/// Expansion of order `order` (all `|γ| < order`) about `center`.
pub fn expand_nd(ast: &ExprAst, lambda: Complex64, center: &[f64], order: usize) -> Result<ExpansionND> {
    check_lambda(lambda)?;
    check_setup(ast, center, order)?;
    let jet = lift_nd(ast, center, order - 1)?;
    let table = StirlingTable::build(order)?;
    let field = d_lambda_nd(&jet, &table, center, lambda, order)?;
    let coeffs = field
        .values
        .into_iter()
        .map(|(g, v)| {
            let f = g.factorial();
            (g, v / f)
        })
        .collect();
    Ok(ExpansionND {
        lambda,
        center: center.to_vec(),
        order,
        coeffs,
    })
}

/// Partial sum at `x`, with per-axis powers of `e^{λ(x_i - x̃_i)} - 1`.
pub fn eval_nd(exp: &ExpansionND, x: &[f64]) -> Result<Complex64> {
    check_vector("x", x, exp.dims())?;
    let powers: Vec<Vec<Complex64>> = x
        .iter()
        .zip(&exp.center)
        .map(|(&xi, &ci)| {
            let w = exp_m1(exp.lambda * (xi - ci));
            let mut p = Vec::with_capacity(exp.order);
            let mut acc = Complex64::new(1.0, 0.0);
            for _ in 0..exp.order {
                p.push(acc);
                acc *= w;
            }
            p
        })
        .collect();
    Ok(exp
        .coeffs
        .iter()
        .map(|(g, c)| {
            g.components()
                .iter()
                .zip(&powers)
                .fold(*c, |acc, (&e, p)| acc * p[e as usize])
        })
        .sum())
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct NdRemainderBound {
    pub order: usize,
    pub bound: f64,
    /// `‖x - x̃‖∞`.
    pub sup_norm: f64,
    pub epsilon: f64,
    pub samples: usize,
}

/// Sampled sups of `|D^{λ,(γ)}a|` over `points` for the given indices.
fn sample_sups(
    ast: &ExprAst,
    lambda: Complex64,
    points: &[Vec<f64>],
    gammas: &[MultiIndex],
    jet_order: usize,
) -> Result<Vec<f64>> {
    let space = IndexSpace::new(ast.dims(), jet_order);
    let widest = gammas
        .iter()
        .flat_map(|g| g.components().iter().copied())
        .max()
        .unwrap_or(0) as usize;
    let table = StirlingTable::build(widest.max(1))?;
    let mut sups = vec![0.0f64; gammas.len()];
    for p in points {
        let jet = lift_nd_in(ast, p, &space)?;
        let values = d_lambda_nd_at(&jet, &table, lambda, gammas)?;
        for (s, v) in sups.iter_mut().zip(values) {
            *s = s.max(v.norm());
        }
    }
    Ok(sups)
}

/// Sampled version of the order-`order` remainder bound at `x`.
pub fn remainder_bound_nd(
    ast: &ExprAst,
    lambda: Complex64,
    center: &[f64],
    x: &[f64],
    order: usize,
    grid: usize,
    seed: u64,
) -> Result<NdRemainderBound> {
    check_lambda(lambda)?;
    check_setup(ast, center, order)?;
    check_vector("x", x, ast.dims())?;
    if grid < 3 {
        return Err(validation("grid must have at least 3 points per axis"));
    }
    let sup_norm = x
        .iter()
        .zip(center)
        .map(|(a, b)| (a - b).abs())
        .fold(0.0, f64::max);
    let epsilon = epsilon_sup(lambda, sup_norm);
    if sup_norm == 0.0 {
        return Ok(NdRemainderBound {
            order,
            bound: 0.0,
            sup_norm,
            epsilon,
            samples: 0,
        });
    }
    let points = BoxDomain::between(x, center).sample(grid, seed);
    let gammas = indices_of_degree(ast.dims(), order as u32);
    let sups = sample_sups(ast, lambda, &points, &gammas, order)?;
    let bracket: f64 = gammas
        .iter()
        .zip(&sups)
        .map(|(g, s)| order as f64 / g.factorial() * s)
        .sum();
    Ok(NdRemainderBound {
        order,
        bound: lambda.norm() * bracket * epsilon.powi(order as i32 - 1) * sup_norm,
        sup_norm,
        epsilon,
        samples: points.len(),
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EnvelopeEntry {
    pub index: MultiIndex,
    pub sup: f64,
    pub allowed: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct NdConvergenceReport {
    pub a: f64,
    pub v_halfwidth: f64,
    pub alpha: f64,
    pub entries: Vec<EnvelopeEntry>,
    /// Whether `sup_V |D^{λ,(γ)}a| ≤ A γ!` held at every sampled index.
    pub envelope_holds: bool,
    /// Smallest `A` consistent with the samples.
    pub a_required: f64,
    /// Largest `δ` with `ε(λ, δ) ≤ α`.
    pub delta_epsilon: f64,
    /// `min(delta_epsilon, v_halfwidth)`.
    pub delta: f64,
    /// `(N, A δ |λ| N^n / (n-1)! α^{N-1})` for `N = 1..=N_max`.
    pub predicted: Vec<(usize, f64)>,
    pub samples: usize,
}

/// Largest `δ ≥ 0` with `ε(λ, δ) ≤ α`, by bisection.
pub fn delta_for_alpha(lambda: Complex64, alpha: f64) -> Result<f64> {
    check_lambda(lambda)?;
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(validation("alpha must lie in (0, 1)"));
    }
    let mut hi = 1.0 / lambda.norm();
    while epsilon_sup(lambda, hi) <= alpha {
        hi *= 2.0;
    }
    let mut lo = 0.0;
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if epsilon_sup(lambda, mid) <= alpha {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo <= 1e-15 * hi {
            break;
        }
    }
    Ok(lo)
}

/// Samples the factorial envelope `sup_V |D^{λ,(γ)}a| ≤ A γ!` over the box of
/// half-width `v_halfwidth` for all `|γ| ≤ n_max` and reports the geometric
/// remainder envelope it implies.
#[allow(clippy::too_many_arguments)]
pub fn convergence_check_nd(
    ast: &ExprAst,
    lambda: Complex64,
    center: &[f64],
    a: f64,
    v_halfwidth: f64,
    n_max: usize,
    alpha: f64,
    grid: usize,
    seed: u64,
) -> Result<NdConvergenceReport> {
    check_lambda(lambda)?;
    check_setup(ast, center, n_max)?;
    if !(a > 0.0 && a.is_finite()) {
        return Err(validation("A must be positive"));
    }
    if !(v_halfwidth > 0.0 && v_halfwidth.is_finite()) {
        return Err(validation("V half-width must be positive"));
    }
    if grid < 3 {
        return Err(validation("grid must have at least 3 points per axis"));
    }
    let dims = ast.dims();
    let points = BoxDomain::around(center, v_halfwidth).sample(grid, seed);
    let gammas = multi_indices(dims, n_max as u32 + 1);
    let sups = sample_sups(ast, lambda, &points, &gammas, n_max)?;
    let mut entries = Vec::with_capacity(gammas.len());
    let mut a_required: f64 = 0.0;
    for (g, s) in gammas.into_iter().zip(sups) {
        let f = g.factorial();
        a_required = a_required.max(s / f);
        entries.push(EnvelopeEntry {
            allowed: a * f,
            sup: s,
            index: g,
        });
    }
    let envelope_holds = entries.iter().all(|e| e.sup <= e.allowed * (1.0 + 1e-9));
    let delta_epsilon = delta_for_alpha(lambda, alpha)?;
    let delta = delta_epsilon.min(v_halfwidth);
    let shape = factorial(dims - 1);
    let predicted = (1..=n_max)
        .map(|n| {
            let nf = n as f64;
            (n, a * delta * lambda.norm() * nf.powi(dims as i32) / shape * alpha.powi(n as i32 - 1))
        })
        .collect();
    Ok(NdConvergenceReport {
        a,
        v_halfwidth,
        alpha,
        entries,
        envelope_holds,
        a_required,
        delta_epsilon,
        delta,
        predicted,
        samples: points.len(),
    })
}

/// `|a(x) - partial sum of order N|` for `N = 1..=n_max`.
pub fn measured_remainders(
    ast: &ExprAst,
    lambda: Complex64,
    center: &[f64],
    x: &[f64],
    n_max: usize,
) -> Result<Vec<(usize, f64)>> {
    let exact = ast.eval_real(x)?;
    let full = expand_nd(ast, lambda, center, n_max)?;
    (1..=n_max)
        .map(|n| {
            let truncated = ExpansionND {
                coeffs: full
                    .coeffs
                    .iter()
                    .filter(|(g, _)| (g.degree() as usize) < n)
                    .map(|(g, c)| (g.clone(), *c))
                    .collect(),
                order: n,
                ..full.clone()
            };
            Ok((n, (exact - eval_nd(&truncated, x)?).norm()))
        })
        .collect()
}
