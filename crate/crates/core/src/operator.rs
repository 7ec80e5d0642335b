//! Values of the operators `D^{λ,(j)}` at a point.
//!
//! Two independent routes are provided. The recursive route applies
//! `D^{λ,(j+1)} = (λ^{-1} d/dx - j) D^{λ,(j)}` to a jet and is the default: it
//! never forms the large alternating Stirling sums. The Stirling route uses
//! `D^{λ,(N)} = Σ_m s(N, m) λ^{-m} d^m/dx^m` and serves as a cross-check.

use std::collections::BTreeMap;
use std::sync::Arc;

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{validation, Result};
use crate::jet::{derivative, IndexSpace, Jet1D, JetND};
use crate::multi_index::{factorial, multi_indices, MultiIndex};
use crate::stirling::StirlingTable;

/// `values[j] = D^{λ,(j)} a(x0)` for `j = 0..=N`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OperatorSequence {
    pub lambda: Complex64,
    pub center: f64,
    pub values: Vec<Complex64>,
}

/// `D^{λ,(γ)} a(x̃)` for every `|γ| < N`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OperatorField {
    pub lambda: Complex64,
    pub center: Vec<f64>,
    pub values: BTreeMap<MultiIndex, Complex64>,
}

impl OperatorField {
    pub fn get(&self, g: &MultiIndex) -> Complex64 {
        self.values.get(g).copied().unwrap_or_default()
    }
}

pub(crate) fn check_lambda(lambda: Complex64) -> Result<()> {
    if lambda == Complex64::new(0.0, 0.0) {
        return Err(validation("lambda must be nonzero"));
    }
    if !lambda.is_finite() {
        return Err(validation("lambda must be finite"));
    }
    Ok(())
}

fn check_order(jet_order: usize, n: usize) -> Result<()> {
    if n > jet_order {
        return Err(validation(format!(
            "operator order {n} exceeds jet order {jet_order}"
        )));
    }
    Ok(())
}

/// Recursive route: tracks the jet of `D^{λ,(j)} a` and reads off its value.
pub fn d_lambda_recursive(
    jet: &Jet1D,
    center: f64,
    lambda: Complex64,
    n: usize,
) -> Result<OperatorSequence> {
    check_lambda(lambda)?;
    check_order(jet.order(), n)?;
    let inv = Complex64::new(1.0, 0.0) / lambda;
    let mut g = jet.truncate(n);
    let mut values = Vec::with_capacity(n + 1);
    for j in 0..n {
        values.push(g.value());
        let d = derivative(&g)?.scale(inv);
        g = d.sub(&g.truncate(d.order()).scale(Complex64::new(j as f64, 0.0)));
    }
    values.push(g.value());
    Ok(OperatorSequence {
        lambda,
        center,
        values,
    })
}

/// Magnitude the recursion would reach without cancellation:
/// `Σ_m |s(j, m)| |λ|^{-m} |a^{(m)}(x0)|` for `j = 0..=n`.
///
/// Obtained by running the recursion on absolute values, where
/// `E_{j+1} = |λ|^{-1} E_j' + j E_j`. Operator values far below this scale are
/// rounding residue.
pub fn cancellation_scale(jet: &Jet1D, lambda: Complex64, n: usize) -> Result<Vec<f64>> {
    check_lambda(lambda)?;
    check_order(jet.order(), n)?;
    let inv = 1.0 / lambda.norm();
    let mut e: Vec<f64> = jet.coeffs()[..=n].iter().map(|c| c.norm()).collect();
    let mut out = Vec::with_capacity(n + 1);
    for j in 0..n {
        out.push(e[0]);
        e = (0..e.len() - 1)
            .map(|m| (m + 1) as f64 * e[m + 1] * inv + j as f64 * e[m])
            .collect();
    }
    out.push(e[0]);
    Ok(out)
}

/// Stirling route: `v_N = Σ_{m=1..N} s(N, m) λ^{-m} m! c_m`.
pub fn d_lambda_stirling(
    jet: &Jet1D,
    table: &StirlingTable,
    center: f64,
    lambda: Complex64,
    n: usize,
) -> Result<OperatorSequence> {
    check_lambda(lambda)?;
    check_order(jet.order(), n)?;
    if table.n_max() < n {
        return Err(validation(format!(
            "stirling table depth {} is below operator order {n}",
            table.n_max()
        )));
    }
    // d^m a / λ^m at the center
    let scaled: Vec<Complex64> = (0..=n)
        .map(|m| jet.coeffs()[m] * factorial(m) * lambda.powi(-(m as i32)))
        .collect();
    let values = (0..=n)
        .map(|big_n| {
            if big_n == 0 {
                return jet.value();
            }
            (1..=big_n)
                .map(|m| scaled[m] * table.signed_f64(big_n, m))
                .sum()
        })
        .collect();
    Ok(OperatorSequence {
        lambda,
        center,
        values,
    })
}

/// Per-axis Stirling expansion over multi-indices `|γ| < n`:
/// `D^{λ,(γ)}a = Σ_m Π_i s(γ_i, m_i) λ^{-|m|} ∂^m a`, where `m_i` runs over
/// `1..=γ_i` on active axes and is 0 elsewhere.
pub fn d_lambda_nd(
    jet: &JetND,
    table: &StirlingTable,
    center: &[f64],
    lambda: Complex64,
    n: usize,
) -> Result<OperatorField> {
    if n == 0 {
        return Err(validation("multi-index order must be at least 1"));
    }
    let gammas = multi_indices(jet.dims(), n as u32);
    let values = d_lambda_nd_at(jet, table, lambda, &gammas)?;
    Ok(OperatorField {
        lambda,
        center: center.to_vec(),
        values: gammas.into_iter().zip(values).collect(),
    })
}

/// [`d_lambda_nd`] restricted to the given multi-indices.
pub fn d_lambda_nd_at(
    jet: &JetND,
    table: &StirlingTable,
    lambda: Complex64,
    gammas: &[MultiIndex],
) -> Result<Vec<Complex64>> {
    check_lambda(lambda)?;
    let top = gammas.iter().map(|g| g.degree() as usize).max().unwrap_or(0);
    check_order(jet.order(), top)?;
    if gammas.iter().any(|g| g.dims() != jet.dims()) {
        return Err(validation("multi-index dimension does not match the jet"));
    }
    let widest = gammas
        .iter()
        .flat_map(|g| g.components().iter().copied())
        .max()
        .unwrap_or(0) as usize;
    if table.n_max() < widest {
        return Err(validation("stirling table too shallow"));
    }
    let dims = jet.dims();
    let lambda_pows: Vec<Complex64> = (0..=top).map(|m| lambda.powi(-(m as i32))).collect();
    let mut out = Vec::with_capacity(gammas.len());
    for gamma in gammas {
        // per-axis choices (m_i, s(γ_i, m_i))
        let choices: Vec<Vec<(u32, f64)>> = gamma
            .components()
            .iter()
            .map(|&g| {
                if g == 0 {
                    vec![(0, 1.0)]
                } else {
                    (1..=g)
                        .map(|m| (m, table.signed_f64(g as usize, m as usize)))
                        .collect()
                }
            })
            .collect();
        let mut total = Complex64::new(0.0, 0.0);
        let mut cursor = vec![0usize; dims];
        'outer: loop {
            let mut weight = 1.0;
            let mut m = Vec::with_capacity(dims);
            for (axis, &c) in cursor.iter().enumerate() {
                let (mi, s) = choices[axis][c];
                weight *= s;
                m.push(mi);
            }
            let m = MultiIndex::new(m);
            let deg = m.degree() as usize;
            total += jet.coeff(&m) * m.factorial() * lambda_pows[deg] * weight;
            for axis in (0..dims).rev() {
                cursor[axis] += 1;
                if cursor[axis] < choices[axis].len() {
                    continue 'outer;
                }
                cursor[axis] = 0;
            }
            break;
        }
        out.push(total);
    }
    Ok(out)
}

/// Recursive route in several variables: the one-dimensional recursion is
/// applied along each axis in turn using partial derivatives of the jet.
pub fn d_lambda_nd_recursive(
    jet: &JetND,
    center: &[f64],
    lambda: Complex64,
    n: usize,
) -> Result<OperatorField> {
    check_lambda(lambda)?;
    if n == 0 {
        return Err(validation("multi-index order must be at least 1"));
    }
    check_order(jet.order(), n - 1)?;
    let dims = jet.dims();
    let spaces: Vec<Arc<IndexSpace>> = (0..=jet.order())
        .map(|k| IndexSpace::new(dims, k))
        .collect();
    let inv = Complex64::new(1.0, 0.0) / lambda;
    let mut values = BTreeMap::new();
    for gamma in multi_indices(dims, n as u32) {
        let mut g: JetND = jet.clone();
        for (axis, &steps) in gamma.components().iter().enumerate() {
            for j in 0..steps {
                let target = &spaces[g.order() - 1];
                let d = g.partial(axis, target)?.scale(inv);
                let lowered = g.restrict(target);
                g = d.sub(&lowered.scale(Complex64::new(j as f64, 0.0)));
            }
        }
        values.insert(gamma, g.value());
    }
    Ok(OperatorField {
        lambda,
        center: center.to_vec(),
        values,
    })
}
