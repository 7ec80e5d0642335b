//! Closed-form series identities that follow from particular expansions,
//! each evaluated numerically and checked against its stated value.
//!
//! The Stirling sums are computed under both sign conventions for
//! `S^{(k)}_{(j)}`; results record which convention reproduces the target.
//! The unweighted Stirling sums sit on the boundary `|2^x - 1| = 1` and
//! converge slowly, so they are accelerated by averaging consecutive partial
//! sums.

use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::fmt::Write as _;

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{validation, Result};
use crate::multi_index::factorial;
use crate::series1d::exp_m1;
use crate::stirling::{build_ratio_rows, SignConvention, MAX_RATIO_J};

const FLOOR: f64 = 1e-12;
pub const MAX_WEIGHTED_TERMS: usize = 200;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct IdentityResult {
    pub name: String,
    pub computed: Complex64,
    pub target: Complex64,
    pub terms_used: usize,
    pub abs_error: f64,
    pub tolerance: f64,
    pub passed: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub variant: Option<SignConvention>,
    #[serde(skip_serializing_if = "String::is_empty")]
    pub note: String,
}

impl IdentityResult {
    fn new(name: String, computed: Complex64, target: Complex64, terms_used: usize, tolerance: f64) -> Self {
        let abs_error = (computed - target).norm();
        Self {
            name,
            computed,
            target,
            terms_used,
            abs_error,
            tolerance,
            passed: abs_error <= tolerance,
            variant: None,
            note: String::new(),
        }
    }

    fn with_tolerance(mut self, tolerance: f64) -> Self {
        self.tolerance = tolerance;
        self.passed = self.abs_error <= tolerance;
        self
    }
}

/// Tail bound for `Σ_{j>J} |w|^j / j`-type sums with `|w| ≤ 1`, `w ≠ -1`:
/// geometric when `|w| < 1`, Abel summation otherwise.
fn log_tail(w: Complex64, terms: usize) -> f64 {
    let next = (terms + 1) as f64;
    let r = w.norm();
    let abel = 2.0 / (next * (Complex64::new(1.0, 0.0) + w).norm());
    if r < 1.0 {
        abel.min(r.powf(next) / (next * (1.0 - r)))
    } else {
        abel
    }
}

fn check_terms(terms: usize, min: usize) -> Result<()> {
    if terms < min {
        return Err(validation(format!("need at least {min} terms, got {terms}")));
    }
    Ok(())
}

/// `cos(2πx) = 1 + Σ_{j≥2} (-1)^j/2 (e^{2πix} - 1)^j` for `|x| < 1/6`.
pub fn cosine_series(x: f64, terms: usize) -> Result<IdentityResult> {
    if !(x.abs() < 1.0 / 6.0) {
        return Err(validation(format!("cosine series needs |x| < 1/6, got {x}")));
    }
    check_terms(terms, 2)?;
    let w = exp_m1(Complex64::new(0.0, 2.0 * PI * x));
    let mut sum = Complex64::new(1.0, 0.0);
    let mut p = w;
    for j in 2..=terms {
        p *= w;
        let sign = if j % 2 == 0 { 0.5 } else { -0.5 };
        sum += p * sign;
    }
    let r = w.norm();
    let tol = (2.0 * r.powi(terms as i32 + 1) / (1.0 - r)).max(FLOOR);
    Ok(IdentityResult::new(
        format!("cosine_x{x}"),
        sum,
        Complex64::new((2.0 * PI * x).cos(), 0.0),
        terms,
        tol,
    ))
}

/// `x = Σ_{j≥1} (-1)^{j-1} / (2πi j) (e^{2πix} - 1)^j` for `|x| ≤ 1/6`.
pub fn linear_series(x: f64, terms: usize) -> Result<IdentityResult> {
    if !(x.abs() <= 1.0 / 6.0) {
        return Err(validation(format!("linear series needs |x| <= 1/6, got {x}")));
    }
    check_terms(terms, 1)?;
    let w = exp_m1(Complex64::new(0.0, 2.0 * PI * x));
    let mut sum = Complex64::new(0.0, 0.0);
    let mut p = Complex64::new(1.0, 0.0);
    for j in 1..=terms {
        p *= w;
        let sign = if j % 2 == 1 { 1.0 } else { -1.0 };
        sum += p * (sign / j as f64);
    }
    let sum = sum / Complex64::new(0.0, 2.0 * PI);
    let tol = log_tail(w, terms) / (2.0 * PI) + FLOOR;
    let name = if x.abs() == 1.0 / 6.0 {
        format!("linear_x{}1/6", if x < 0.0 { "-" } else { "" })
    } else {
        format!("linear_x{x}")
    };
    let mut res = IdentityResult::new(name, sum, Complex64::new(x, 0.0), terms, tol);
    if w.norm() >= 1.0 - 1e-12 {
        res.note = "closed endpoint |e^{2 pi i x} - 1| = 1".to_owned();
    }
    Ok(res)
}

/// `Σ_{j≥1} ((k-1)/k)^j / j = log k`.
pub fn log_series(k: u32, terms: usize) -> Result<IdentityResult> {
    if k < 2 {
        return Err(validation("log series needs k >= 2"));
    }
    check_terms(terms, 1)?;
    let q = (k as f64 - 1.0) / k as f64;
    let mut sum = 0.0;
    let mut p = 1.0;
    for j in 1..=terms {
        p *= q;
        sum += p / j as f64;
    }
    let next = (terms + 1) as f64;
    let tol = q.powf(next) / next / (1.0 - q) + FLOOR;
    Ok(IdentityResult::new(
        format!("log_k{k}"),
        Complex64::new(sum, 0.0),
        Complex64::new((k as f64).ln(), 0.0),
        terms,
        tol,
    ))
}

/// Neumaier-compensated running sum.
#[derive(Default)]
struct CompensatedSum {
    sum: f64,
    carry: f64,
}

impl CompensatedSum {
    fn add(&mut self, v: f64) {
        let t = self.sum + v;
        if self.sum.abs() >= v.abs() {
            self.carry += (self.sum - t) + v;
        } else {
            self.carry += (v - t) + self.sum;
        }
        self.sum = t;
    }

    fn value(&self) -> f64 {
        self.sum + self.carry
    }
}

/// Stirling-number sums evaluated from the expansion of `x^k` with
/// `λ = log 2` at `x = -1` (weighted) or `x = 1` (unweighted).
///
/// * weighted: `Σ_{j≥k} (-1)^j S^{(k)}_{(j)} / (2^j j!)`, target `(-1)^k log(2)^k / k!`
/// * unweighted, signed: `Σ_{j≥k} s(j,k) / j!`, target `log(2)^k / k!`
/// * unweighted, unsigned: `Σ_{j≥k} (-1)^j |s(j,k)| / j!`, same target
///
/// The unweighted sums are returned as the mean of the partial sums through
/// `terms` and `terms + 1`.
pub fn stirling_log2_series(
    k: usize,
    weighted: bool,
    terms: usize,
    variant: SignConvention,
) -> Result<IdentityResult> {
    if !(1..=4).contains(&k) {
        return Err(validation(format!("k must lie in 1..=4, got {k}")));
    }
    let cap = if weighted { MAX_WEIGHTED_TERMS } else { MAX_RATIO_J - 2 };
    if terms < k || terms > cap {
        return Err(validation(format!("terms must lie in {k}..={cap}, got {terms}")));
    }
    let rows = build_ratio_rows(k, terms + 2)?;
    let u = &rows[k - 1];
    let ln2k = 2f64.ln().powi(k as i32) / factorial(k);
    let parity = |n: usize| if n.is_multiple_of(2) { 1.0 } else { -1.0 };
    // term for index j, built from u_{j,k} = |s(j,k)| / j!
    let term = |j: usize| -> f64 {
        let signed = parity(j - k) * u.get(j);
        match (weighted, variant) {
            (true, SignConvention::Signed) => parity(j) * signed * 0.5f64.powi(j as i32),
            (true, SignConvention::Unsigned) => parity(j) * u.get(j) * 0.5f64.powi(j as i32),
            (false, SignConvention::Signed) => signed,
            (false, SignConvention::Unsigned) => parity(j) * u.get(j),
        }
    };
    let mut acc = CompensatedSum::default();
    for j in k..=terms {
        acc.add(term(j));
    }
    let (computed, target, tol, used, name, note) = if weighted {
        let tol = 2.0 * term(terms + 1).abs() + FLOOR;
        (
            acc.value(),
            parity(k) * ln2k,
            tol,
            terms,
            format!("stirling_weighted_k{k}"),
            String::new(),
        )
    } else {
        let s_j = acc.value();
        let next = term(terms + 1);
        let s_j1 = s_j + next;
        // alternating with eventually decreasing terms: the limit lies between
        // consecutive partial sums
        let tol = next.abs() / 2.0 + FLOOR;
        (
            0.5 * (s_j + s_j1),
            ln2k,
            tol,
            terms + 1,
            format!("stirling_boundary_k{k}"),
            "boundary series at |2^x - 1| = 1, averaged partial sums".to_owned(),
        )
    };
    let mut res = IdentityResult::new(name, Complex64::new(computed, 0.0), Complex64::new(target, 0.0), used, tol);
    res.variant = Some(variant);
    res.note = note;
    Ok(res)
}

/// Both conventions for one Stirling identity.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConventionComparison {
    pub signed: IdentityResult,
    pub unsigned: IdentityResult,
}

impl ConventionComparison {
    pub fn matching(&self) -> Vec<SignConvention> {
        [(&self.signed, SignConvention::Signed), (&self.unsigned, SignConvention::Unsigned)]
            .into_iter()
            .filter(|(r, _)| r.passed)
            .map(|(_, c)| c)
            .collect()
    }

    /// The matching result, preferring the signed reading when both match;
    /// the closer one when neither does.
    pub fn selected(&self) -> IdentityResult {
        let mut pick = if self.signed.passed || (!self.unsigned.passed && self.signed.abs_error <= self.unsigned.abs_error) {
            self.signed.clone()
        } else {
            self.unsigned.clone()
        };
        let matching = self.matching();
        let tag = match matching.as_slice() {
            [] => "no sign convention matches the target".to_owned(),
            [one] => format!("only the {one} convention matches"),
            _ => "both conventions match".to_owned(),
        };
        pick.note = if pick.note.is_empty() { tag } else { format!("{}; {tag}", pick.note) };
        pick
    }
}

pub fn stirling_log2_both(k: usize, weighted: bool, terms: usize) -> Result<ConventionComparison> {
    Ok(ConventionComparison {
        signed: stirling_log2_series(k, weighted, terms, SignConvention::Signed)?,
        unsigned: stirling_log2_series(k, weighted, terms, SignConvention::Unsigned)?,
    })
}

pub const BOUNDARY_TERMS: usize = 100_000;

/// Runs every registered identity in a fixed order. `overrides` replaces the
/// tolerance of the named entries.
pub fn run_suite(overrides: Option<&BTreeMap<String, f64>>) -> Result<Vec<IdentityResult>> {
    let mut out = vec![
        cosine_series(0.0, 10)?,
        cosine_series(0.1, 60)?,
        cosine_series(-0.1, 60)?,
        cosine_series(0.15, 80)?,
        linear_series(0.0, 10)?,
        linear_series(0.1, 80)?,
        linear_series(-0.1, 80)?,
        linear_series(1.0 / 6.0, 2000)?,
        log_series(2, 60)?,
        log_series(3, 100)?,
        log_series(5, 200)?,
    ];
    for k in 1..=4 {
        out.push(stirling_log2_both(k, true, 60)?.selected());
    }
    for k in 1..=4 {
        out.push(stirling_log2_both(k, false, BOUNDARY_TERMS)?.selected());
    }
    if let Some(map) = overrides {
        out = out
            .into_iter()
            .map(|r| match map.get(&r.name) {
                Some(&tol) => r.with_tolerance(tol),
                None => r,
            })
            .collect();
    }
    Ok(out)
}

/// JSON array of results.
pub fn to_json(results: &[IdentityResult]) -> String {
    serde_json::to_string_pretty(results).expect("identity results always serialize")
}

/// Plain-text pass/fail table.
pub fn format_table(results: &[IdentityResult]) -> String {
    let mut s = String::new();
    let _ = writeln!(
        s,
        "{:<24} {:>6} {:>9} {:>12} {:>12} {:>9}  target",
        "identity", "status", "terms", "abs_error", "tolerance", "variant"
    );
    for r in results {
        let _ = writeln!(
            s,
            "{:<24} {:>6} {:>9} {:>12.3e} {:>12.3e} {:>9}  {:.15}",
            r.name,
            if r.passed { "PASS" } else { "FAIL" },
            r.terms_used,
            r.abs_error,
            r.tolerance,
            r.variant.map(|v| v.to_string()).unwrap_or_else(|| "-".into()),
            r.target.re,
        );
    }
    let failed = results.iter().filter(|r| !r.passed).count();
    let _ = writeln!(s, "{} identities, {failed} failed", results.len());
    s
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::stirling::StirlingTable;
    use num_traits::ToPrimitive;

    #[test]
    fn cosine_examples() {
        let r = cosine_series(0.0, 10).unwrap();
        assert_eq!(r.computed, r.target);
        let r = cosine_series(0.1, 60).unwrap();
        assert!(r.abs_error <= 1e-10 && r.passed);
        let r = cosine_series(0.15, 80).unwrap();
        assert!(r.passed);
        assert!(cosine_series(1.0 / 6.0, 10).is_err());
        assert!(cosine_series(0.1, 1).is_err());
    }

    #[test]
    fn linear_examples() {
        assert_eq!(linear_series(0.0, 10).unwrap().computed, Complex64::new(0.0, 0.0));
        for x in [0.1, -0.1] {
            let r = linear_series(x, 80).unwrap();
            assert!(r.abs_error <= 1e-8 && r.passed);
        }
        let edge = linear_series(1.0 / 6.0, 2000).unwrap();
        assert!(edge.passed, "{edge:?}");
        assert!(linear_series(0.2, 10).is_err());
    }

    #[test]
    fn log_examples() {
        let r = log_series(2, 60).unwrap();
        assert!((r.computed.re - std::f64::consts::LN_2).abs() < 1e-12 && r.passed);
        let r = log_series(5, 200).unwrap();
        assert!(r.abs_error < 1e-10);
        let r = log_series(2, 1).unwrap();
        assert!((r.abs_error - 0.1931).abs() < 1e-4);
        assert!(r.tolerance >= r.abs_error);
        assert!(log_series(1, 10).is_err());
    }

    #[test]
    fn weighted_stirling_examples() {
        let r = stirling_log2_series(2, true, 60, SignConvention::Signed).unwrap();
        assert!((r.target.re - 0.240226506959).abs() < 1e-12);
        assert!(r.abs_error < 1e-10);
        let r = stirling_log2_series(1, true, 60, SignConvention::Signed).unwrap();
        assert!((r.computed.re + 2f64.ln()).abs() < 1e-12);
    }

    #[test]
    fn weighted_sum_matches_exact_table() {
        let table = StirlingTable::build(60).unwrap();
        for k in 1..=4 {
            let mut oracle = 0.0;
            for j in k..=60 {
                let num = table.signed(j, k).to_f64().unwrap();
                let sign = if j % 2 == 0 { 1.0 } else { -1.0 };
                oracle += sign * num / (2f64.powi(j as i32) * factorial(j));
            }
            let r = stirling_log2_series(k, true, 60, SignConvention::Signed).unwrap();
            assert!((r.computed.re - oracle).abs() < 1e-14, "k={k}");
        }
    }

    #[test]
    fn boundary_stirling_k2() {
        let r = stirling_log2_series(2, false, 100_000, SignConvention::Signed).unwrap();
        assert!(r.abs_error < 1e-4 && r.passed, "{r:?}");
    }

    #[test]
    fn signed_convention_explains_every_case() {
        for k in 1..=4 {
            for weighted in [true, false] {
                let terms = if weighted { 60 } else { 20_000 };
                let cmp = stirling_log2_both(k, weighted, terms).unwrap();
                assert!(cmp.signed.passed, "k={k} weighted={weighted}: {:?}", cmp.signed);
                // the unsigned reading only agrees on even k for the boundary sums
                let unsigned_expected = !weighted && k % 2 == 0;
                assert_eq!(cmp.unsigned.passed, unsigned_expected, "k={k} weighted={weighted}");
                assert_eq!(cmp.selected().variant, Some(SignConvention::Signed));
            }
        }
    }

    #[test]
    fn tail_bounds_shrink() {
        let a = cosine_series(0.15, 40).unwrap().tolerance;
        let b = cosine_series(0.15, 80).unwrap().tolerance;
        assert!(b < a / 2.0);
        let a = log_series(3, 20).unwrap().tolerance;
        let b = log_series(3, 40).unwrap().tolerance;
        assert!(b < a / 2.0);
        let a = stirling_log2_series(2, false, 1000, SignConvention::Signed).unwrap().tolerance;
        let b = stirling_log2_series(2, false, 4000, SignConvention::Signed).unwrap().tolerance;
        assert!(b < a / 2.0);
    }

    #[test]
    fn suite_default_and_overrides() {
        let base = run_suite(None).unwrap();
        assert!(base.iter().all(|r| r.passed), "{}", format_table(&base));
        assert_eq!(run_suite(Some(&BTreeMap::new())).unwrap(), base);
        let mut o = BTreeMap::new();
        o.insert("log_k2".to_owned(), 1e-30);
        let tweaked = run_suite(Some(&o)).unwrap();
        for (a, b) in base.iter().zip(&tweaked) {
            if a.name == "log_k2" {
                assert!(!b.passed);
            } else {
                assert_eq!(a, b);
            }
        }
        let text = format_table(&tweaked);
        assert!(text.contains("1 failed"));
        let parsed: serde_json::Value = serde_json::from_str(&to_json(&tweaked)).unwrap();
        assert_eq!(parsed.as_array().unwrap().len(), tweaked.len());
        assert_eq!(parsed[0]["name"], "cosine_x0");
    }

    #[test]
    fn validation() {
        assert!(stirling_log2_series(0, true, 60, SignConvention::Signed).is_err());
        assert!(stirling_log2_series(5, true, 60, SignConvention::Signed).is_err());
        assert!(stirling_log2_series(2, true, 201, SignConvention::Signed).is_err());
        assert!(stirling_log2_series(3, true, 2, SignConvention::Signed).is_err());
    }
}
