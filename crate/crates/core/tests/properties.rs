use std::f64::consts::PI;

use exptaylor::identities::{linear_series, log_series};
use exptaylor::jet::lift;
use exptaylor::operator::{cancellation_scale, d_lambda_recursive, d_lambda_stirling};
use exptaylor::series1d::{eval_series, expand_1d, remainder_bound, remainder_integral};
use exptaylor::seriesnd::{eval_nd, expand_nd};
use exptaylor::stirling::StirlingTable;
use exptaylor::{parse, MultiIndex};
use num_complex::Complex64;
use proptest::prelude::*;

const FUNCTIONS: [(&str, f64, f64); 6] = [
    // (source, Re λ, Im λ)
    ("cos(2*pi*x)", 0.0, 2.0 * PI),
    ("x", 0.0, 2.0 * PI),
    ("x^2", 0.0, 2.0 * PI),
    ("exp(x)", 1.0, 0.0),
    ("exp(2*x)", 1.0, 0.0),
    ("sin(x) + x^3", 1.0, 0.0),
];

fn case(i: usize) -> (exptaylor::ExprAst, Complex64) {
    let (src, re, im) = FUNCTIONS[i];
    (parse(src, 1).unwrap(), Complex64::new(re, im))
}

#[test]
fn paths_agree_away_from_origin_up_to_cancellation() {
    let table = StirlingTable::build(12).unwrap();
    for i in 0..FUNCTIONS.len() {
        let (ast, lambda) = case(i);
        for x0 in [-0.2, 0.3, 1.1] {
            let jet = lift(&ast, x0, 12).unwrap();
            let rec = d_lambda_recursive(&jet, x0, lambda, 12).unwrap();
            let sti = d_lambda_stirling(&jet, &table, x0, lambda, 12).unwrap();
            let scale = cancellation_scale(&jet, lambda, 12).unwrap();
            for n in 0..=12 {
                let diff = (rec.values[n] - sti.values[n]).norm();
                let allowed = 1e-9 * rec.values[n].norm() + 64.0 * f64::EPSILON * scale[n];
                assert!(diff <= allowed, "{} x0={x0} N={n}: {diff:e} > {allowed:e}", FUNCTIONS[i].0);
            }
        }
    }
}

#[test]
fn linear_identity_is_an_expansion_of_x() {
    let ast = parse("x", 1).unwrap();
    let exp = expand_1d(&ast, Complex64::new(0.0, 2.0 * PI), 0.0, 41).unwrap();
    for x in [-0.12, 0.05, 0.1] {
        let id = linear_series(x, 40).unwrap();
        assert!((id.computed - eval_series(&exp, x)).norm() < 1e-13, "x={x}");
    }
}

#[test]
fn log_identity_is_an_expansion_at_rate_log_k() {
    // with λ = log k, x0 = 0, x = -1 the expansion of x sums to -(1/log k) Σ q^j / j
    let ast = parse("x", 1).unwrap();
    for k in [2u32, 3, 5] {
        let lambda = Complex64::new((k as f64).ln(), 0.0);
        let exp = expand_1d(&ast, lambda, 0.0, 41).unwrap();
        let via_expansion = -lambda * eval_series(&exp, -1.0);
        let id = log_series(k, 40).unwrap();
        assert!((id.computed - via_expansion).norm() < 1e-12, "k={k}");
    }
}

#[test]
fn functions_of_one_axis_embed_in_higher_dimensions() {
    let lambda = Complex64::new(0.0, 2.0 * PI);
    let one = expand_1d(&parse("sin(2*pi*x) + x^2", 1).unwrap(), lambda, 0.1, 7).unwrap();
    let three = expand_nd(&parse("sin(2*pi*x2) + x2^2", 3).unwrap(), lambda, &[0.4, 0.1, -0.3], 7).unwrap();
    for (g, c) in &three.coeffs {
        let comps = g.components();
        let want = if comps[0] == 0 && comps[2] == 0 { one.coeffs[comps[1] as usize] } else { Complex64::new(0.0, 0.0) };
        assert!((c - want).norm() < 1e-12, "{g}: {c} vs {want}");
    }
    assert_eq!(three.coeff(&MultiIndex::new(vec![0, 3, 0])), one.coeffs[3]);
    let x = [0.45, 0.12, -0.27];
    let w_sum = eval_series(&one, 0.12);
    assert!((eval_nd(&three, &x).unwrap() - w_sum).norm() < 1e-13);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn reconstruction_holds(i in 0usize..6, x in -0.15f64..0.15, n in 1usize..=10) {
        let (ast, lambda) = case(i);
        let exp = expand_1d(&ast, lambda, 0.0, n).unwrap();
        let r = remainder_integral(&ast, lambda, 0.0, x, n, 64).unwrap();
        let truth = ast.eval_real(&[x]).unwrap();
        prop_assert!((eval_series(&exp, x) + r - truth).norm() <= 1e-9);
    }

    #[test]
    fn bounds_dominate_remainder(i in 0usize..6, x in -0.15f64..0.15, n in 1usize..=10) {
        let (ast, lambda) = case(i);
        let b = remainder_bound(&ast, lambda, 0.0, x, n, 129).unwrap();
        prop_assert!(b.integral_value.norm() <= 1.01 * b.bound_tight + 1e-15);
        prop_assert!(b.bound_tight <= 1.02 * b.bound_loose + 1e-15);
    }

    #[test]
    fn shifting_the_centre_keeps_the_value(i in 0usize..6, x0 in -0.3f64..0.3, n in 1usize..=8) {
        // the N = 1 sum is a(x0), so the remainder carries everything else
        let (ast, lambda) = case(i);
        let x = x0 + 0.07;
        let exp = expand_1d(&ast, lambda, x0, n).unwrap();
        let r = remainder_integral(&ast, lambda, x0, x, n, 64).unwrap();
        let truth = ast.eval_real(&[x]).unwrap();
        prop_assert!((eval_series(&exp, x) + r - truth).norm() <= 1e-9);
    }
}
