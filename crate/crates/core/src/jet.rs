//! Truncated Taylor arithmetic over complex scalars.
//!
//! Coefficients are stored normalized, `c_j = f^(j)(x0) / j!`, so that orders
//! up to [`MAX_ORDER`] stay within double range. Elementary functions are
//! propagated with the usual power-series recurrences; multivariate jets are
//! truncated by total degree and handle elementary functions by composing the
//! univariate expansion of the outer function with the nilpotent part.

use std::collections::HashMap;
use std::sync::{Arc, OnceLock};

use num_complex::Complex64;

use crate::error::{domain, validation, Result};
use crate::expr::{Evaluator, ExprAst, Func};
use crate::multi_index::{indices_of_degree, MultiIndex};

/// Highest univariate jet order accepted by [`lift`].
pub const MAX_ORDER: usize = 64;
/// Highest total order accepted by [`lift_nd`].
pub const MAX_ND_ORDER: usize = 32;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);

fn check_log_domain(c0: Complex64, what: &str) -> Result<()> {
    if c0.im == 0.0 && c0.re <= 0.0 {
        return Err(domain(format!("{what} of non-positive value {}", c0.re)));
    }
    Ok(())
}

/// Univariate truncated Taylor series `c_0 + c_1 t + ... + c_K t^K`.
#[derive(Debug, Clone, PartialEq)]
pub struct Jet1D {
    coeffs: Vec<Complex64>,
}

impl Jet1D {
    /// Panics on an empty coefficient vector.
    pub fn from_coeffs(coeffs: Vec<Complex64>) -> Self {
        assert!(!coeffs.is_empty(), "a jet needs at least one coefficient");
        Self { coeffs }
    }

    pub fn constant(c: Complex64, order: usize) -> Self {
        let mut coeffs = vec![ZERO; order + 1];
        coeffs[0] = c;
        Self { coeffs }
    }

    /// The jet of the identity function at `x0`.
    pub fn variable(x0: Complex64, order: usize) -> Self {
        let mut j = Self::constant(x0, order);
        if order >= 1 {
            j.coeffs[1] = ONE;
        }
        j
    }

    pub fn order(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    pub fn value(&self) -> Complex64 {
        self.coeffs[0]
    }

    /// `f^(m)(x0)`, i.e. `m! c_m`.
    pub fn derivative_value(&self, m: usize) -> Complex64 {
        self.coeffs[m] * crate::multi_index::factorial(m)
    }

    pub fn truncate(&self, order: usize) -> Jet1D {
        Jet1D::from_coeffs(self.coeffs[..=order.min(self.order())].to_vec())
    }

    pub fn add(&self, other: &Jet1D) -> Jet1D {
        self.zip(other, |a, b| a + b)
    }

    pub fn sub(&self, other: &Jet1D) -> Jet1D {
        self.zip(other, |a, b| a - b)
    }

    pub fn scale(&self, s: Complex64) -> Jet1D {
        Jet1D::from_coeffs(self.coeffs.iter().map(|c| c * s).collect())
    }

    pub fn neg(&self) -> Jet1D {
        Jet1D::from_coeffs(self.coeffs.iter().map(|c| -c).collect())
    }

    fn zip(&self, other: &Jet1D, f: impl Fn(Complex64, Complex64) -> Complex64) -> Jet1D {
        let k = self.order().min(other.order());
        Jet1D::from_coeffs((0..=k).map(|i| f(self.coeffs[i], other.coeffs[i])).collect())
    }

    pub fn mul(&self, other: &Jet1D) -> Jet1D {
        let k = self.order().min(other.order());
        let out = (0..=k)
            .map(|n| (0..=n).map(|i| self.coeffs[i] * other.coeffs[n - i]).sum())
            .collect();
        Jet1D::from_coeffs(out)
    }

    pub fn div(&self, other: &Jet1D) -> Result<Jet1D> {
        let g0 = other.coeffs[0];
        if g0 == ZERO {
            return Err(domain("division by a jet with zero value"));
        }
        let k = self.order().min(other.order());
        let mut q = Vec::with_capacity(k + 1);
        for n in 0..=k {
            let acc: Complex64 = (1..=n).map(|j| other.coeffs[j] * q[n - j]).sum();
            q.push((self.coeffs[n] - acc) / g0);
        }
        Ok(Jet1D::from_coeffs(q))
    }

    pub fn exp(&self) -> Jet1D {
        let k = self.order();
        let mut e = Vec::with_capacity(k + 1);
        e.push(self.coeffs[0].exp());
        for n in 1..=k {
            let acc: Complex64 = (1..=n)
                .map(|j| self.coeffs[j] * e[n - j] * j as f64)
                .sum();
            e.push(acc / n as f64);
        }
        Jet1D::from_coeffs(e)
    }

    pub fn ln(&self) -> Result<Jet1D> {
        let f0 = self.coeffs[0];
        check_log_domain(f0, "log")?;
        let k = self.order();
        let mut l = Vec::with_capacity(k + 1);
        l.push(f0.ln());
        for n in 1..=k {
            let acc: Complex64 = (1..n)
                .map(|j| l[j] * self.coeffs[n - j] * j as f64)
                .sum();
            l.push((self.coeffs[n] - acc / n as f64) / f0);
        }
        Ok(Jet1D::from_coeffs(l))
    }

    /// `(sin f, cos f)` (or `(sinh f, cosh f)` when `hyperbolic`).
    fn sin_cos_impl(&self, hyperbolic: bool) -> (Jet1D, Jet1D) {
        let k = self.order();
        let f0 = self.coeffs[0];
        let (s0, c0) = if hyperbolic {
            (f0.sinh(), f0.cosh())
        } else {
            (f0.sin(), f0.cos())
        };
        let sign = if hyperbolic { 1.0 } else { -1.0 };
        let mut s = Vec::with_capacity(k + 1);
        let mut c = Vec::with_capacity(k + 1);
        s.push(s0);
        c.push(c0);
        for n in 1..=k {
            let mut sa = ZERO;
            let mut ca = ZERO;
            for j in 1..=n {
                let w = self.coeffs[j] * j as f64;
                sa += w * c[n - j];
                ca += w * s[n - j];
            }
            s.push(sa / n as f64);
            c.push(ca * sign / n as f64);
        }
        (Jet1D::from_coeffs(s), Jet1D::from_coeffs(c))
    }

    pub fn sin_cos(&self) -> (Jet1D, Jet1D) {
        self.sin_cos_impl(false)
    }

    pub fn sinh_cosh(&self) -> (Jet1D, Jet1D) {
        self.sin_cos_impl(true)
    }

    pub fn sqrt(&self) -> Result<Jet1D> {
        let f0 = self.coeffs[0];
        check_log_domain(f0, "sqrt")?;
        let k = self.order();
        let mut r = Vec::with_capacity(k + 1);
        r.push(f0.sqrt());
        let two_r0 = r[0] * 2.0;
        for n in 1..=k {
            let acc: Complex64 = (1..n).map(|j| r[j] * r[n - j]).sum();
            r.push((self.coeffs[n] - acc) / two_r0);
        }
        Ok(Jet1D::from_coeffs(r))
    }

    pub fn powi(&self, n: i32) -> Result<Jet1D> {
        let mut base = self.clone();
        let mut acc = Jet1D::constant(ONE, self.order());
        let mut e = n.unsigned_abs();
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&base);
            }
            e >>= 1;
            if e > 0 {
                base = base.mul(&base);
            }
        }
        if n < 0 {
            Jet1D::constant(ONE, self.order()).div(&acc)
        } else {
            Ok(acc)
        }
    }

    pub fn apply(&self, f: Func) -> Result<Jet1D> {
        Ok(match f {
            Func::Sin => self.sin_cos().0,
            Func::Cos => self.sin_cos().1,
            Func::Tan => {
                let (s, c) = self.sin_cos();
                s.div(&c)?
            }
            Func::Exp => self.exp(),
            Func::Log => self.ln()?,
            Func::Sqrt => self.sqrt()?,
            Func::Sinh => self.sinh_cosh().0,
            Func::Cosh => self.sinh_cosh().1,
        })
    }
}

/// Jet of the derivative: order drops by one, `b_m = (m + 1) c_{m+1}`.
pub fn derivative(jet: &Jet1D) -> Result<Jet1D> {
    if jet.order() == 0 {
        return Err(validation("cannot differentiate an order-0 jet"));
    }
    Ok(Jet1D::from_coeffs(
        jet.coeffs[1..]
            .iter()
            .enumerate()
            .map(|(m, c)| c * (m + 1) as f64)
            .collect(),
    ))
}

struct Jet1DEvaluator {
    x0: f64,
    order: usize,
}

impl Evaluator for Jet1DEvaluator {
    type Value = Jet1D;

    fn constant(&self, c: Complex64) -> Jet1D {
        Jet1D::constant(c, self.order)
    }

    fn variable(&self, _index: usize) -> Jet1D {
        Jet1D::variable(Complex64::new(self.x0, 0.0), self.order)
    }

    fn add(&self, a: Jet1D, b: Jet1D) -> Jet1D {
        a.add(&b)
    }

    fn sub(&self, a: Jet1D, b: Jet1D) -> Jet1D {
        a.sub(&b)
    }

    fn mul(&self, a: Jet1D, b: Jet1D) -> Jet1D {
        a.mul(&b)
    }

    fn neg(&self, a: Jet1D) -> Jet1D {
        a.neg()
    }

    fn div(&self, a: Jet1D, b: Jet1D) -> Result<Jet1D> {
        a.div(&b)
    }

    fn powi(&self, a: Jet1D, n: i32) -> Result<Jet1D> {
        a.powi(n)
    }

    fn call(&self, f: Func, a: Jet1D) -> Result<Jet1D> {
        a.apply(f)
    }
}

/// Taylor coefficients up to `order` of a one-variable function at `x0`.
pub fn lift(ast: &ExprAst, x0: f64, order: usize) -> Result<Jet1D> {
    if ast.dims() != 1 {
        return Err(validation(format!(
            "univariate jet requested for a function of {} variables",
            ast.dims()
        )));
    }
    if order > MAX_ORDER {
        return Err(validation(format!("jet order {order} exceeds {MAX_ORDER}")));
    }
    if !x0.is_finite() {
        return Err(validation("jet center must be finite"));
    }
    ast.evaluate(&Jet1DEvaluator { x0, order })
}

/// Multi-indices with `|γ| ≤ order` and their products, shared by jets.
#[derive(Debug)]
pub struct IndexSpace {
    dims: usize,
    order: usize,
    indices: Vec<MultiIndex>,
    lookup: HashMap<MultiIndex, usize>,
    products: OnceLock<Vec<[u32; 3]>>,
}

impl IndexSpace {
    pub fn new(dims: usize, order: usize) -> Arc<Self> {
        let indices: Vec<MultiIndex> = (0..=order as u32)
            .flat_map(|d| indices_of_degree(dims, d))
            .collect();
        let lookup = indices
            .iter()
            .enumerate()
            .map(|(i, g)| (g.clone(), i))
            .collect();
        Arc::new(Self {
            dims,
            order,
            indices,
            lookup,
            products: OnceLock::new(),
        })
    }

    pub fn dims(&self) -> usize {
        self.dims
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn indices(&self) -> &[MultiIndex] {
        &self.indices
    }

    pub fn position(&self, g: &MultiIndex) -> Option<usize> {
        self.lookup.get(g).copied()
    }

    pub fn len(&self) -> usize {
        self.indices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.indices.is_empty()
    }

    fn products(&self) -> &[[u32; 3]] {
        self.products.get_or_init(|| {
            let mut out = Vec::new();
            for (i, a) in self.indices.iter().enumerate() {
                let room = self.order as u32 - a.degree();
                for (j, b) in self.indices.iter().enumerate() {
                    if b.degree() > room {
                        break;
                    }
                    let k = self.lookup[&a.add(b)];
                    out.push([i as u32, j as u32, k as u32]);
                }
            }
            out
        })
    }
}

/// Multivariate jet truncated by total degree; `c_γ = ∂^γ f(x̃) / γ!`.
#[derive(Debug, Clone)]
pub struct JetND {
    space: Arc<IndexSpace>,
    coeffs: Vec<Complex64>,
}

impl JetND {
    pub fn constant(space: &Arc<IndexSpace>, c: Complex64) -> Self {
        let mut coeffs = vec![ZERO; space.len()];
        coeffs[0] = c;
        Self {
            space: Arc::clone(space),
            coeffs,
        }
    }

    pub fn variable(space: &Arc<IndexSpace>, axis: usize, value: f64) -> Self {
        let mut j = Self::constant(space, Complex64::new(value, 0.0));
        if space.order >= 1 {
            let pos = space.lookup[&MultiIndex::unit(space.dims, axis)];
            j.coeffs[pos] = ONE;
        }
        j
    }

    pub fn space(&self) -> &Arc<IndexSpace> {
        &self.space
    }

    pub fn order(&self) -> usize {
        self.space.order
    }

    pub fn dims(&self) -> usize {
        self.space.dims
    }

    pub fn value(&self) -> Complex64 {
        self.coeffs[0]
    }

    /// Normalized coefficient at `γ`; zero outside the stored range.
    pub fn coeff(&self, g: &MultiIndex) -> Complex64 {
        self.space
            .position(g)
            .map(|p| self.coeffs[p])
            .unwrap_or(ZERO)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&MultiIndex, Complex64)> {
        self.space.indices.iter().zip(self.coeffs.iter().copied())
    }

    fn map(&self, f: impl Fn(Complex64) -> Complex64) -> JetND {
        JetND {
            space: Arc::clone(&self.space),
            coeffs: self.coeffs.iter().map(|&c| f(c)).collect(),
        }
    }

    fn zip(&self, other: &JetND, f: impl Fn(Complex64, Complex64) -> Complex64) -> JetND {
        debug_assert!(Arc::ptr_eq(&self.space, &other.space));
        JetND {
            space: Arc::clone(&self.space),
            coeffs: self
                .coeffs
                .iter()
                .zip(&other.coeffs)
                .map(|(&a, &b)| f(a, b))
                .collect(),
        }
    }

    pub fn add(&self, other: &JetND) -> JetND {
        self.zip(other, |a, b| a + b)
    }

    pub fn sub(&self, other: &JetND) -> JetND {
        self.zip(other, |a, b| a - b)
    }

    pub fn scale(&self, s: Complex64) -> JetND {
        self.map(|c| c * s)
    }

    pub fn neg(&self) -> JetND {
        self.map(|c| -c)
    }

    pub fn mul(&self, other: &JetND) -> JetND {
        let mut out = vec![ZERO; self.coeffs.len()];
        for &[i, j, k] in self.space.products() {
            let a = self.coeffs[i as usize];
            if a == ZERO {
                continue;
            }
            out[k as usize] += a * other.coeffs[j as usize];
        }
        JetND {
            space: Arc::clone(&self.space),
            coeffs: out,
        }
    }

    /// `outer(self)` where `outer` holds the Taylor coefficients of the outer
    /// function at `self.value()`.
    pub fn compose(&self, outer: &Jet1D) -> JetND {
        let k = self.order().min(outer.order());
        let mut h = self.clone();
        h.coeffs[0] = ZERO;
        let mut acc = JetND::constant(&self.space, outer.coeffs()[k]);
        for m in (0..k).rev() {
            acc = acc.mul(&h);
            acc.coeffs[0] += outer.coeffs()[m];
        }
        acc
    }

    pub fn apply(&self, f: Func) -> Result<JetND> {
        let outer = Jet1D::variable(self.value(), self.order()).apply(f)?;
        Ok(self.compose(&outer))
    }

    pub fn recip(&self) -> Result<JetND> {
        let v = self.value();
        if v == ZERO {
            return Err(domain("division by a jet with zero value"));
        }
        let inv = ONE / v;
        let mut coeffs = Vec::with_capacity(self.order() + 1);
        let mut term = inv;
        for _ in 0..=self.order() {
            coeffs.push(term);
            term *= -inv;
        }
        Ok(self.compose(&Jet1D::from_coeffs(coeffs)))
    }

    pub fn div(&self, other: &JetND) -> Result<JetND> {
        Ok(self.mul(&other.recip()?))
    }

    pub fn powi(&self, n: i32) -> Result<JetND> {
        let mut base = self.clone();
        let mut acc = JetND::constant(&self.space, ONE);
        let mut e = n.unsigned_abs();
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&base);
            }
            e >>= 1;
            if e > 0 {
                base = base.mul(&base);
            }
        }
        if n < 0 {
            acc.recip()
        } else {
            Ok(acc)
        }
    }

    /// Drops the terms above the order of `target`.
    pub fn restrict(&self, target: &Arc<IndexSpace>) -> JetND {
        JetND {
            space: Arc::clone(target),
            coeffs: target.indices.iter().map(|g| self.coeff(g)).collect(),
        }
    }

    /// Partial derivative along `axis`, returned in `target` (order one less).
    pub fn partial(&self, axis: usize, target: &Arc<IndexSpace>) -> Result<JetND> {
        if self.order() == 0 {
            return Err(validation("cannot differentiate an order-0 jet"));
        }
        if target.order + 1 != self.order() || target.dims != self.dims() {
            return Err(validation("partial derivative target space mismatch"));
        }
        let coeffs = target
            .indices
            .iter()
            .map(|g| {
                let up = g.add(&MultiIndex::unit(g.dims(), axis));
                self.coeff(&up) * (g.components()[axis] + 1) as f64
            })
            .collect();
        Ok(JetND {
            space: Arc::clone(target),
            coeffs,
        })
    }
}

struct JetNDEvaluator<'a> {
    space: &'a Arc<IndexSpace>,
    center: &'a [f64],
}

impl Evaluator for JetNDEvaluator<'_> {
    type Value = JetND;

    fn constant(&self, c: Complex64) -> JetND {
        JetND::constant(self.space, c)
    }

    fn variable(&self, index: usize) -> JetND {
        JetND::variable(self.space, index, self.center[index])
    }

    fn add(&self, a: JetND, b: JetND) -> JetND {
        a.add(&b)
    }

    fn sub(&self, a: JetND, b: JetND) -> JetND {
        a.sub(&b)
    }

    fn mul(&self, a: JetND, b: JetND) -> JetND {
        a.mul(&b)
    }

    fn neg(&self, a: JetND) -> JetND {
        a.neg()
    }

    fn div(&self, a: JetND, b: JetND) -> Result<JetND> {
        a.div(&b)
    }

    fn powi(&self, a: JetND, n: i32) -> Result<JetND> {
        a.powi(n)
    }

    fn call(&self, f: Func, a: JetND) -> Result<JetND> {
        a.apply(f)
    }
}

/// Multivariate jet of total order `order` at `center`.
pub fn lift_nd(ast: &ExprAst, center: &[f64], order: usize) -> Result<JetND> {
    if order > MAX_ND_ORDER {
        return Err(validation(format!("jet order {order} exceeds {MAX_ND_ORDER}")));
    }
    let space = IndexSpace::new(ast.dims(), order);
    lift_nd_in(ast, center, &space)
}

/// Like [`lift_nd`] but reuses an existing index space.
pub fn lift_nd_in(ast: &ExprAst, center: &[f64], space: &Arc<IndexSpace>) -> Result<JetND> {
    if center.len() != ast.dims() || space.dims() != ast.dims() {
        return Err(validation(format!(
            "center has {} coordinates, function takes {}",
            center.len(),
            ast.dims()
        )));
    }
    if center.iter().any(|c| !c.is_finite()) {
        return Err(validation("jet center must be finite"));
    }
    ast.evaluate(&JetNDEvaluator { space, center })
}
