use std::collections::BTreeMap;

use exptaylor::identities::{self, IdentityResult};
use exptaylor::series1d::{self, ConvergenceReport, GrowthReport};
use exptaylor::seriesnd;
use exptaylor::{parse, Error, ExprAst, MultiIndex};
use num_complex::Complex64;
use serde::Serialize;

use crate::args::*;
use crate::exit;
use crate::render::{complex, csv, json, key_values, sci, table, ComplexJson};
use crate::Outcome;

#[derive(Debug)]
enum CliError {
    Core(Error),
    Usage(String),
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        CliError::Core(e)
    }
}

impl From<exptaylor::expr::ParseError> for CliError {
    fn from(e: exptaylor::expr::ParseError) -> Self {
        CliError::Core(e.into())
    }
}

impl CliError {
    fn code(&self) -> i32 {
        match self {
            CliError::Usage(_) | CliError::Core(Error::Validation(_) | Error::Parse(_)) => exit::VALIDATION,
            CliError::Core(Error::Domain(_) | Error::Diagnostic(_)) => exit::DOMAIN,
        }
    }

    fn message(&self) -> String {
        match self {
            CliError::Usage(m) => format!("usage error: {m}"),
            CliError::Core(e) => e.to_string(),
        }
    }
}

type CmdResult = Result<Report, CliError>;

/// A rendered command result; `failure` turns it into exit code 3.
struct Report {
    json: String,
    csv: String,
    text: String,
    failure: Option<String>,
}

impl Report {
    fn pick(&self, format: Format) -> &str {
        match format {
            Format::Json => &self.json,
            Format::Csv => &self.csv,
            Format::Text => &self.text,
        }
    }
}

pub(crate) fn dispatch(command: Command) -> Outcome {
    let (result, output, default) = match command {
        Command::Expand(a) => (expand(&a), a.output, Format::Text),
        Command::Eval(a) => (eval(&a), a.output, Format::Text),
        Command::Sweep(a) => (sweep(&a), a.output, Format::Csv),
        Command::Radius(a) => (radius(&a), a.output, Format::Text),
        Command::Growth(a) => (growth(&a), a.output, Format::Text),
        Command::Nd(a) => (nd(&a), a.output, Format::Text),
        Command::Identities(a) => (identities(&a), a.output, Format::Text),
    };
    let report = match result {
        Ok(r) => r,
        Err(e) => {
            return Outcome { code: e.code(), stdout: String::new(), stderr: format!("error: {}\n", e.message()) }
        }
    };
    let body = report.pick(output.format.unwrap_or(default)).to_owned();
    let (stdout, mut stderr) = match &output.out {
        Some(path) => match std::fs::write(path, &body) {
            Ok(()) => (String::new(), String::new()),
            Err(e) => {
                return Outcome {
                    code: exit::VALIDATION,
                    stdout: String::new(),
                    stderr: format!("error: cannot write {}: {e}\n", path.display()),
                }
            }
        },
        None => (body, String::new()),
    };
    let code = match report.failure {
        Some(msg) => {
            stderr.push_str(&format!("check failed: {msg}\n"));
            exit::CHECK_FAILED
        }
        None => exit::OK,
    };
    Outcome { code, stdout, stderr }
}

fn parse_fn(text: &str, dims: usize) -> Result<ExprAst, CliError> {
    Ok(parse(text, dims)?)
}

fn center(x0: &Option<Point>, dims: usize) -> Result<Vec<f64>, CliError> {
    match x0 {
        None => Ok(vec![0.0; dims]),
        Some(Point(v)) if v.len() == dims => Ok(v.clone()),
        Some(Point(v)) => Err(CliError::Usage(format!("--x0 has {} components but --dims is {dims}", v.len()))),
    }
}

#[derive(Serialize)]
#[serde(untagged)]
enum IndexJson {
    Scalar(usize),
    Multi(Vec<u32>),
}

#[derive(Serialize)]
#[serde(untagged)]
enum PointJson {
    Scalar(f64),
    Vector(Vec<f64>),
}

#[derive(Serialize)]
struct CoeffJson {
    index: IndexJson,
    re: f64,
    im: f64,
}

#[derive(Serialize)]
struct ExpansionJson<'a> {
    lambda: ComplexJson,
    x0: PointJson,
    order: usize,
    coeffs: Vec<CoeffJson>,
    #[serde(skip_serializing_if = "Option::is_none")]
    evaluation: Option<&'a NdEvaluation>,
}

fn coeff_rows(coeffs: &[(IndexJson, Complex64)]) -> Vec<Vec<String>> {
    coeffs
        .iter()
        .map(|(i, c)| {
            let index = match i {
                IndexJson::Scalar(j) => j.to_string(),
                IndexJson::Multi(g) => MultiIndex::new(g.clone()).to_string(),
            };
            vec![index, sci(c.re), sci(c.im)]
        })
        .collect()
}

fn expansion_report(
    ast: &ExprAst,
    lambda: Complex64,
    x0: PointJson,
    order: usize,
    coeffs: Vec<(IndexJson, Complex64)>,
    evaluation: Option<&NdEvaluation>,
) -> Report {
    let rows = coeff_rows(&coeffs);
    let x0_text = match &x0 {
        PointJson::Scalar(v) => v.to_string(),
        PointJson::Vector(v) => format!("{v:?}"),
    };
    let mut text = key_values(&[
        ("f", ast.to_string()),
        ("lambda", complex(lambda)),
        ("x0", x0_text),
        ("N", order.to_string()),
    ]);
    text.push('\n');
    text.push_str(&table(&["index", "re", "im"], &rows));
    if let Some(e) = evaluation {
        text.push('\n');
        text.push_str(&key_values(&e.pairs()));
    }
    let doc = ExpansionJson {
        lambda: lambda.into(),
        x0,
        order,
        coeffs: coeffs
            .into_iter()
            .map(|(index, c)| CoeffJson { index, re: c.re, im: c.im })
            .collect(),
        evaluation,
    };
    Report { json: json(&doc), csv: csv(&["index", "re", "im"], &rows), text, failure: None }
}

fn expand(a: &ExpandArgs) -> CmdResult {
    let ast = parse_fn(&a.function, a.dims)?;
    let x0 = center(&a.x0, a.dims)?;
    if a.dims == 1 {
        let exp = series1d::expand_1d(&ast, a.lambda, x0[0], a.order)?;
        let coeffs = exp.coeffs.iter().enumerate().map(|(j, &c)| (IndexJson::Scalar(j), c)).collect();
        Ok(expansion_report(&ast, a.lambda, PointJson::Scalar(x0[0]), a.order, coeffs, None))
    } else {
        let exp = seriesnd::expand_nd(&ast, a.lambda, &x0, a.order)?;
        let coeffs = nd_coeffs(&exp);
        Ok(expansion_report(&ast, a.lambda, PointJson::Vector(x0), a.order, coeffs, None))
    }
}

fn nd_coeffs(exp: &seriesnd::ExpansionND) -> Vec<(IndexJson, Complex64)> {
    exp.coeffs
        .iter()
        .map(|(g, &c)| (IndexJson::Multi(g.components().to_vec()), c))
        .collect()
}

#[derive(Serialize)]
struct EvalReport {
    function: String,
    lambda: ComplexJson,
    x0: f64,
    x: f64,
    order: usize,
    approx: ComplexJson,
    exact: ComplexJson,
    abs_error: f64,
    remainder: ComplexJson,
    reconstruction_error: f64,
    bound_tight: f64,
    bound_loose: f64,
    quad_nodes: usize,
    grid: usize,
}

fn eval(a: &EvalArgs) -> CmdResult {
    let ast = parse_fn(&a.function, 1)?;
    let exp = series1d::expand_1d(&ast, a.lambda, a.x0, a.order)?;
    let approx = series1d::eval_series(&exp, a.x);
    let exact = ast.eval_real(&[a.x])?;
    let remainder = series1d::remainder_integral(&ast, a.lambda, a.x0, a.x, a.order, a.quad_nodes)?;
    let bounds = series1d::remainder_bound(&ast, a.lambda, a.x0, a.x, a.order, a.grid)?;
    let r = EvalReport {
        function: ast.to_string(),
        lambda: a.lambda.into(),
        x0: a.x0,
        x: a.x,
        order: a.order,
        approx: approx.into(),
        exact: exact.into(),
        abs_error: (approx - exact).norm(),
        remainder: remainder.into(),
        reconstruction_error: (approx + remainder - exact).norm(),
        bound_tight: bounds.bound_tight,
        bound_loose: bounds.bound_loose,
        quad_nodes: a.quad_nodes,
        grid: a.grid,
    };
    let header = [
        "x", "order", "approx_re", "approx_im", "exact_re", "exact_im", "abs_error", "remainder_re",
        "remainder_im", "reconstruction_error", "bound_tight", "bound_loose",
    ];
    let row = vec![
        sci(r.x),
        r.order.to_string(),
        sci(approx.re),
        sci(approx.im),
        sci(exact.re),
        sci(exact.im),
        sci(r.abs_error),
        sci(remainder.re),
        sci(remainder.im),
        sci(r.reconstruction_error),
        sci(r.bound_tight),
        sci(r.bound_loose),
    ];
    let text = key_values(&[
        ("f", r.function.clone()),
        ("lambda", complex(a.lambda)),
        ("x0", a.x0.to_string()),
        ("x", a.x.to_string()),
        ("N", a.order.to_string()),
        ("partial sum", complex(approx)),
        ("f(x)", complex(exact)),
        ("abs error", sci(r.abs_error)),
        ("integral remainder", complex(remainder)),
        ("|sum + R - f(x)|", sci(r.reconstruction_error)),
        ("tight bound", sci(r.bound_tight)),
        ("loose bound", sci(r.bound_loose)),
    ]);
    let failure = (a.check && !(r.reconstruction_error <= a.check_tol)).then(|| {
        format!("|sum + R - f(x)| = {:e} exceeds {:e}", r.reconstruction_error, a.check_tol)
    });
    Ok(Report { json: json(&r), csv: csv(&header, &[row]), text, failure })
}

#[derive(Serialize)]
struct SweepRow {
    #[serde(skip_serializing_if = "Option::is_none")]
    x: Option<f64>,
    #[serde(rename = "N", skip_serializing_if = "Option::is_none")]
    n: Option<usize>,
    abs_error: f64,
    bound_tight: f64,
    bound_loose: f64,
}

fn sweep(a: &SweepArgs) -> CmdResult {
    let ast = parse_fn(&a.function, 1)?;
    let point = |x: f64, n: usize| -> Result<(f64, f64, f64), CliError> {
        let exp = series1d::expand_1d(&ast, a.lambda, a.x0, n)?;
        let err = (series1d::eval_series(&exp, x) - ast.eval_real(&[x])?).norm();
        let b = series1d::remainder_bound(&ast, a.lambda, a.x0, x, n, a.grid)?;
        Ok((err, b.bound_tight, b.bound_loose))
    };
    let mut rows = Vec::new();
    let first;
    if let Some(range) = a.x_range {
        first = "x";
        let n = a.order.ok_or_else(|| CliError::Usage("--x-range needs --order".into()))?;
        for x in range.points() {
            let (abs_error, bound_tight, bound_loose) = point(x, n)?;
            rows.push(SweepRow { x: Some(x), n: None, abs_error, bound_tight, bound_loose });
        }
    } else {
        first = "N";
        let (lo, hi) = a.n_range.ok_or_else(|| CliError::Usage("need --x-range or --n-range".into()))?;
        let x = a.x.ok_or_else(|| CliError::Usage("--n-range needs --x".into()))?;
        for n in lo..=hi {
            let (abs_error, bound_tight, bound_loose) = point(x, n)?;
            rows.push(SweepRow { x: None, n: Some(n), abs_error, bound_tight, bound_loose });
        }
    }
    let cells: Vec<Vec<String>> = rows
        .iter()
        .map(|r| {
            let lead = r.x.map(sci).unwrap_or_else(|| r.n.unwrap_or_default().to_string());
            vec![lead, sci(r.abs_error), sci(r.bound_tight), sci(r.bound_loose)]
        })
        .collect();
    let header = [first, "abs_error", "bound_tight", "bound_loose"];
    Ok(Report { json: json(&rows), csv: csv(&header, &cells), text: table(&header, &cells), failure: None })
}

#[derive(Serialize)]
struct RadiusJson<'a> {
    function: String,
    lambda: ComplexJson,
    x0: f64,
    #[serde(flatten)]
    report: &'a ConvergenceReport,
}

fn radius(a: &RadiusArgs) -> CmdResult {
    let ast = parse_fn(&a.function, 1)?;
    let report = series1d::radius_estimate(&ast, a.lambda, a.x0, a.j_max, a.window)?;
    let rows: Vec<Vec<String>> = report.ratios.iter().map(|&(j, r)| vec![j.to_string(), sci(r)]).collect();
    let opt = |v: Option<f64>| v.map(sci).unwrap_or_else(|| "-".into());
    let mut text = key_values(&[
        ("f", ast.to_string()),
        ("lambda", complex(a.lambda)),
        ("x0", a.x0.to_string()),
        ("r estimate", sci(report.r_estimate)),
        ("period", opt(report.period)),
        ("x-region half-width", opt(report.x_region_halfwidth)),
        ("stable", report.stable.to_string()),
    ]);
    text.push('\n');
    text.push_str(&table(&["j", "j|v_j|/|v_j+1|"], &rows));
    let doc = RadiusJson { function: ast.to_string(), lambda: a.lambda.into(), x0: a.x0, report: &report };
    Ok(Report { json: json(&doc), csv: csv(&["j", "ratio"], &rows), text, failure: None })
}

#[derive(Serialize)]
struct GrowthJson<'a> {
    function: String,
    lambda: ComplexJson,
    #[serde(flatten)]
    report: &'a GrowthReport,
}

fn growth(a: &GrowthArgs) -> CmdResult {
    let ast = parse_fn(&a.function, 1)?;
    if !(a.period.is_finite() && a.period > 0.0) {
        return Err(CliError::Usage("--period must be positive".into()));
    }
    let lambda = Complex64::new(0.0, 2.0 * std::f64::consts::PI / a.period);
    let report = series1d::growth_diagnostic(&ast, lambda, a.period, a.order)?;
    let rows: Vec<Vec<String>> = report
        .sup_values
        .iter()
        .enumerate()
        .map(|(n, &g)| vec![n.to_string(), sci(g)])
        .collect();
    let opt_f = |v: Option<f64>| v.map(sci).unwrap_or_else(|| "-".into());
    let mut pairs = vec![
        ("f", ast.to_string()),
        ("period", a.period.to_string()),
        ("lambda", complex(lambda)),
        ("k", report.k.map(|k| k.to_string()).unwrap_or_else(|| "-".into())),
        ("C0", opt_f(report.c0)),
        ("C0 (all orders)", opt_f(report.c0_all_orders)),
        ("bounded", report.bounded.to_string()),
        ("periodic", report.periodic.to_string()),
    ];
    if !report.note.is_empty() {
        pairs.push(("note", report.note.clone()));
    }
    let mut text = key_values(&pairs);
    text.push('\n');
    text.push_str(&table(&["N", "sup |D^N a|"], &rows));
    let doc = GrowthJson { function: ast.to_string(), lambda: lambda.into(), report: &report };
    Ok(Report { json: json(&doc), csv: csv(&["N", "sup"], &rows), text, failure: None })
}

#[derive(Serialize)]
struct NdEvaluation {
    x: Vec<f64>,
    approx: ComplexJson,
    exact: ComplexJson,
    abs_error: f64,
    bound: f64,
    sup_norm: f64,
    epsilon: f64,
    samples: usize,
}

impl NdEvaluation {
    fn pairs(&self) -> Vec<(&'static str, String)> {
        vec![
            ("x", format!("{:?}", self.x)),
            ("partial sum", complex(Complex64::new(self.approx.re, self.approx.im))),
            ("f(x)", complex(Complex64::new(self.exact.re, self.exact.im))),
            ("abs error", sci(self.abs_error)),
            ("remainder bound", sci(self.bound)),
            ("epsilon", sci(self.epsilon)),
            ("box samples", self.samples.to_string()),
        ]
    }
}

fn nd(a: &NdArgs) -> CmdResult {
    let ast = parse_fn(&a.function, a.dims)?;
    let x0 = center(&a.x0, a.dims)?;
    let exp = seriesnd::expand_nd(&ast, a.lambda, &x0, a.order)?;
    let evaluation = match &a.x {
        None => None,
        Some(Point(x)) => {
            if x.len() != a.dims {
                return Err(CliError::Usage(format!("--x has {} components but --dims is {}", x.len(), a.dims)));
            }
            let approx = seriesnd::eval_nd(&exp, x)?;
            let exact = ast.eval_real(x)?;
            let b = seriesnd::remainder_bound_nd(&ast, a.lambda, &x0, x, a.order, a.grid, a.seed)?;
            Some(NdEvaluation {
                x: x.clone(),
                approx: approx.into(),
                exact: exact.into(),
                abs_error: (approx - exact).norm(),
                bound: b.bound,
                sup_norm: b.sup_norm,
                epsilon: b.epsilon,
                samples: b.samples,
            })
        }
    };
    let mut report = expansion_report(
        &ast,
        a.lambda,
        PointJson::Vector(x0),
        a.order,
        nd_coeffs(&exp),
        evaluation.as_ref(),
    );
    if a.check {
        if let Some(e) = &evaluation {
            if !(e.abs_error <= e.bound) {
                report.failure = Some(format!("|f(x) - sum| = {:e} exceeds bound {:e}", e.abs_error, e.bound));
            }
        }
    }
    Ok(report)
}

fn identities(a: &IdentitiesArgs) -> CmdResult {
    let overrides: BTreeMap<String, f64> = a.tolerances.iter().cloned().collect();
    let results = identities::run_suite(Some(&overrides))?;
    if let Some(unknown) = overrides.keys().find(|k| !results.iter().any(|r| &r.name == *k)) {
        return Err(CliError::Usage(format!("no identity named `{unknown}`")));
    }
    let selected: Vec<IdentityResult> =
        results.into_iter().filter(|r| r.name.starts_with(a.suite.prefix())).collect();
    let header = [
        "name", "passed", "terms", "computed_re", "computed_im", "target_re", "target_im", "abs_error",
        "tolerance", "variant",
    ];
    let rows: Vec<Vec<String>> = selected
        .iter()
        .map(|r| {
            vec![
                r.name.clone(),
                r.passed.to_string(),
                r.terms_used.to_string(),
                sci(r.computed.re),
                sci(r.computed.im),
                sci(r.target.re),
                sci(r.target.im),
                sci(r.abs_error),
                sci(r.tolerance),
                r.variant.map(|v| v.to_string()).unwrap_or_default(),
            ]
        })
        .collect();
    let failed: Vec<&str> = selected.iter().filter(|r| !r.passed).map(|r| r.name.as_str()).collect();
    let failure = (!failed.is_empty()).then(|| format!("{} identities failed: {}", failed.len(), failed.join(", ")));
    Ok(Report {
        json: identities::to_json(&selected) + "\n",
        csv: csv(&header, &rows),
        text: identities::format_table(&selected),
        failure,
    })
}
