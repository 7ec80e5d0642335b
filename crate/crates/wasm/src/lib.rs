//! Browser bindings for the interactive demo in `www/`.
//!
//! Each exported function takes plain numbers and strings and returns a JSON
//! document; the `*_json` functions are the same operations callable from
//! native code and tests.

use exptaylor::identities;
use exptaylor::series1d::{eval_series, expand_1d, period_of, radius_estimate, region_halfwidth, remainder_bound};
use exptaylor::{parse, ExprAst};
use num_complex::Complex64;
use serde::Serialize;
use wasm_bindgen::prelude::*;

/// Upper limit on sampled points per curve.
pub const MAX_POINTS: usize = 2001;
/// Upper limit on the order swept by [`error_curve_json`].
pub const MAX_SWEEP_ORDER: usize = 40;

type Out = Result<String, String>;

fn function(src: &str) -> Result<ExprAst, String> {
    parse(src, 1).map_err(|e| e.to_string())
}

fn to_json<T: Serialize>(v: &T) -> Out {
    serde_json::to_string(v).map_err(|e| e.to_string())
}

#[derive(Serialize)]
struct PartialSums {
    x: Vec<f64>,
    exact: Vec<f64>,
    approx_re: Vec<f64>,
    approx_im: Vec<f64>,
    abs_error: Vec<f64>,
    /// Convergence region `x0 ± halfwidth` when the rate is imaginary.
    region: Option<(f64, f64)>,
    coeffs: Vec<(f64, f64)>,
}

/// Partial sum of order `order` against the function on `[lo, hi]`.
#[allow(clippy::too_many_arguments)]
pub fn partial_sums_json(
    src: &str,
    lambda_re: f64,
    lambda_im: f64,
    x0: f64,
    order: usize,
    lo: f64,
    hi: f64,
    points: usize,
) -> Out {
    if !(2..=MAX_POINTS).contains(&points) || !(lo < hi) {
        return Err(format!("need lo < hi and 2..={MAX_POINTS} points"));
    }
    let ast = function(src)?;
    let lambda = Complex64::new(lambda_re, lambda_im);
    let exp = expand_1d(&ast, lambda, x0, order).map_err(|e| e.to_string())?;
    let mut out = PartialSums {
        x: Vec::with_capacity(points),
        exact: Vec::with_capacity(points),
        approx_re: Vec::with_capacity(points),
        approx_im: Vec::with_capacity(points),
        abs_error: Vec::with_capacity(points),
        region: None,
        coeffs: exp.coeffs.iter().map(|c| (c.re, c.im)).collect(),
    };
    for i in 0..points {
        let t = i as f64 / (points - 1) as f64;
        let x = lo * (1.0 - t) + hi * t;
        // points outside the function's domain are left as gaps
        let exact = ast.eval_real(&[x]).map(|v| v.re).unwrap_or(f64::NAN);
        let approx = eval_series(&exp, x);
        out.x.push(x);
        out.exact.push(exact);
        out.approx_re.push(approx.re);
        out.approx_im.push(approx.im);
        out.abs_error.push((approx - Complex64::new(exact, 0.0)).norm());
    }
    if let Some(period) = period_of(lambda) {
        let h = region_halfwidth(period, 1.0);
        out.region = Some((x0 - h, x0 + h));
    }
    to_json(&out)
}

#[derive(Serialize)]
struct ErrorCurve {
    order: Vec<usize>,
    abs_error: Vec<f64>,
    remainder: Vec<f64>,
    bound_tight: Vec<f64>,
    bound_loose: Vec<f64>,
}

/// Error, integral remainder and both bounds at `x` for `N = 1..=n_max`.
pub fn error_curve_json(src: &str, lambda_re: f64, lambda_im: f64, x0: f64, x: f64, n_max: usize) -> Out {
    if !(1..=MAX_SWEEP_ORDER).contains(&n_max) {
        return Err(format!("order must lie in 1..={MAX_SWEEP_ORDER}"));
    }
    let ast = function(src)?;
    let lambda = Complex64::new(lambda_re, lambda_im);
    let exact = ast.eval_real(&[x]).map_err(|e| e.to_string())?;
    let mut out = ErrorCurve {
        order: Vec::new(),
        abs_error: Vec::new(),
        remainder: Vec::new(),
        bound_tight: Vec::new(),
        bound_loose: Vec::new(),
    };
    for n in 1..=n_max {
        let exp = expand_1d(&ast, lambda, x0, n).map_err(|e| e.to_string())?;
        let b = remainder_bound(&ast, lambda, x0, x, n, 129).map_err(|e| e.to_string())?;
        out.order.push(n);
        out.abs_error.push((eval_series(&exp, x) - exact).norm());
        out.remainder.push(b.integral_value.norm());
        out.bound_tight.push(b.bound_tight);
        out.bound_loose.push(b.bound_loose);
    }
    to_json(&out)
}

/// Ratio-test radius report.
pub fn radius_json(src: &str, lambda_re: f64, lambda_im: f64, x0: f64) -> Out {
    let ast = function(src)?;
    let rep = radius_estimate(&ast, Complex64::new(lambda_re, lambda_im), x0, 64, 8).map_err(|e| e.to_string())?;
    to_json(&rep)
}

/// The identity suite with default tolerances.
pub fn identities_json() -> Out {
    let results = identities::run_suite(None).map_err(|e| e.to_string())?;
    to_json(&results)
}

fn js(r: Out) -> Result<String, JsValue> {
    r.map_err(|e| JsValue::from_str(&e))
}

#[wasm_bindgen(js_name = partialSums)]
#[allow(clippy::too_many_arguments)]
pub fn partial_sums(
    src: &str,
    lambda_re: f64,
    lambda_im: f64,
    x0: f64,
    order: usize,
    lo: f64,
    hi: f64,
    points: usize,
) -> Result<String, JsValue> {
    js(partial_sums_json(src, lambda_re, lambda_im, x0, order, lo, hi, points))
}

#[wasm_bindgen(js_name = errorCurve)]
pub fn error_curve(src: &str, lambda_re: f64, lambda_im: f64, x0: f64, x: f64, n_max: usize) -> Result<String, JsValue> {
    js(error_curve_json(src, lambda_re, lambda_im, x0, x, n_max))
}

#[wasm_bindgen]
pub fn radius(src: &str, lambda_re: f64, lambda_im: f64, x0: f64) -> Result<String, JsValue> {
    js(radius_json(src, lambda_re, lambda_im, x0))
}

#[wasm_bindgen]
pub fn identities() -> Result<String, JsValue> {
    js(identities_json())
}
