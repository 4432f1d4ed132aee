#![allow(clippy::neg_cmp_op_on_partial_ord)]

use clap::{Args, Parser, Subcommand, ValueEnum};
use elliptic_selberg::blocks::{j_integral, u_block, BlockIndex};
use elliptic_selberg::macdonald::{
    modular_matrices, relation_residuals, translation_matrices, MacdonaldBasis, TransformMatrix,
};
use elliptic_selberg::qseries::{check_series_identity, identity_by_name, theta_identities, QExp};
use elliptic_selberg::quadrature::QuadratureSpec;
use elliptic_selberg::selberg::{block_constant, selberg_oracle, selberg_value, SelbergParams};
use elliptic_selberg::specfun::{
    dedekind_eta, phi, sigma_and_e, theta1, theta_level, EllipticArgument, ModularPoint, SeriesTruncation,
};
use elliptic_selberg::suite::{run_criterion, CRITERIA};
use elliptic_selberg::transforms::numeric_modular_matrices;
use elliptic_selberg::verify::{verify_identity, IdentityId, VerificationReport, DEFAULT_GRID};
use elliptic_selberg::{Complex64, Error};
use serde::Serialize;
use serde_json::{json, Value};
use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

/// Elliptic Selberg integrals, conformal blocks and identity checks.
#[derive(Debug, Parser, Serialize)]
#[command(name = "ellsel", version)]
struct Cli {
    /// Worker threads; 0 uses one per core.
    #[arg(long, global = true, default_value_t = 0)]
    threads: usize,
    /// Report format.
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    format: Format,
    /// Write the report to this file instead of stdout.
    #[arg(long, global = true)]
    output: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
enum Format {
    Json,
    Csv,
}

#[derive(Debug, Subcommand, Serialize)]
#[serde(tag = "subcommand", rename_all = "lowercase")]
enum Command {
    /// Evaluate a special function.
    Eval(EvalArgs),
    /// Check a theta-function identity exactly as q-series.
    Series(SeriesArgs),
    /// Selberg closed form, optionally against the quadrature oracle.
    Selberg(SelbergArgs),
    /// Analytic T, S, A, B matrices with relation residuals.
    Smatrix(LevelArgs),
    /// Analytic modular matrices, optionally against quadrature.
    Modular(ModularArgs),
    /// One conformal block u_{κ,n}(λ, τ) and its integral J.
    Block(BlockArgs),
    /// Verify block identities against their closed forms.
    Verify(VerifyArgs),
    /// Run the acceptance battery.
    Suite(SuiteArgs),
}

fn parse_complex(s: &str) -> Result<Complex64, String> {
    s.trim()
        .parse::<Complex64>()
        .map_err(|e| format!("expected a complex number like 0.3+0.9i: {e}"))
}

fn parse_tau(s: &str) -> Result<Complex64, String> {
    let tau = parse_complex(s)?;
    if !(tau.im > 0.0) {
        return Err(format!("tau must have positive imaginary part, got {tau}"));
    }
    Ok(tau)
}

#[derive(Debug, Clone, Args, Serialize)]
struct QuadArgs {
    /// Gauss–Legendre nodes per cell.
    #[arg(long, default_value_t = QuadratureSpec::default().gauss_order)]
    gauss_order: usize,
    /// Graded cells between each endpoint window and the midpoint.
    #[arg(long, default_value_t = QuadratureSpec::default().graded_mesh_levels)]
    mesh_levels: usize,
    /// Endpoint subtraction order (0 or 1).
    #[arg(long, default_value_t = QuadratureSpec::default().subtraction_order)]
    subtraction_order: u8,
    /// Endpoint window width.
    #[arg(long, default_value_t = QuadratureSpec::default().endpoint_delta)]
    endpoint_delta: f64,
    /// Exponent step used at degenerate corner exponents.
    #[arg(long, default_value_t = QuadratureSpec::default().continuation_step)]
    continuation_step: f64,
    /// Integrand evaluation ceiling per integral.
    #[arg(long, default_value_t = QuadratureSpec::default().max_evaluations)]
    max_evaluations: usize,
}

impl QuadArgs {
    fn spec(&self) -> elliptic_selberg::Result<QuadratureSpec> {
        let spec = QuadratureSpec {
            gauss_order: self.gauss_order,
            graded_mesh_levels: self.mesh_levels,
            subtraction_order: self.subtraction_order,
            endpoint_delta: self.endpoint_delta,
            continuation_step: self.continuation_step,
            max_evaluations: self.max_evaluations,
        };
        spec.validate()?;
        Ok(spec)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
enum Function {
    Theta1,
    Eta,
    Phi,
    ThetaLevel,
    SigmaE,
}

#[derive(Debug, Args, Serialize)]
struct EvalArgs {
    #[arg(long, value_enum)]
    function: Function,
    #[arg(long, default_value = "0+1i", value_parser = parse_tau)]
    tau: Complex64,
    #[arg(long, default_value = "0.3", value_parser = parse_complex)]
    lambda: Complex64,
    /// Second argument t of σ_λ(t) and E(t).
    #[arg(long, default_value = "0.5", value_parser = parse_complex)]
    t: Complex64,
    /// Index of φ_k.
    #[arg(long, default_value_t = 1)]
    k: u8,
    #[arg(long, default_value_t = 4)]
    kappa: u32,
    #[arg(long, default_value_t = 1)]
    n: i64,
    /// Use θ^s = θ(λ) + θ(−λ).
    #[arg(long)]
    symmetrized: bool,
    /// Order of the λ-derivative.
    #[arg(long, default_value_t = 0)]
    d_lambda: u8,
    /// Order of the τ-derivative.
    #[arg(long, default_value_t = 0)]
    d_tau: u8,
}

#[derive(Debug, Args, Serialize)]
struct SeriesArgs {
    /// Identity name; see --list.
    #[arg(long, conflicts_with_all = ["lemma", "corollary", "all"])]
    identity: Option<String>,
    /// Identities by lemma label (7.1, 7.3 or 7.5).
    #[arg(long, conflicts_with_all = ["corollary", "all"])]
    lemma: Option<String>,
    /// Identities by corollary label (7.2).
    #[arg(long, conflicts_with = "all")]
    corollary: Option<String>,
    /// Every built-in identity at its default order.
    #[arg(long)]
    all: bool,
    /// List the built-in identities.
    #[arg(long)]
    list: bool,
    /// Truncation order in q; defaults to each identity's own order.
    #[arg(long)]
    order: Option<i64>,
}

#[derive(Debug, Args, Serialize)]
struct SelbergArgs {
    #[arg(long, default_value_t = 1)]
    p: usize,
    #[arg(long, value_parser = parse_complex)]
    alpha: Complex64,
    #[arg(long, value_parser = parse_complex)]
    beta: Complex64,
    #[arg(long, value_parser = parse_complex)]
    gamma: Complex64,
    /// Also integrate numerically.
    #[arg(long)]
    oracle: bool,
    #[command(flatten)]
    quad: QuadArgs,
}

#[derive(Debug, Args, Serialize)]
struct LevelArgs {
    #[arg(long, default_value_t = 1)]
    p: usize,
    #[arg(long)]
    kappa: u32,
}

#[derive(Debug, Args, Serialize)]
struct ModularArgs {
    #[command(flatten)]
    level: LevelArgs,
    /// Also extract T and S from quadrature at tau.
    #[arg(long)]
    numeric: bool,
    #[arg(long, default_value = "0+1i", value_parser = parse_tau)]
    tau: Complex64,
    #[command(flatten)]
    quad: QuadArgs,
}

#[derive(Debug, Args, Serialize)]
struct BlockArgs {
    #[command(flatten)]
    level: LevelArgs,
    #[arg(long)]
    n: i64,
    #[arg(long, default_value = "0.3", value_parser = parse_complex)]
    lambda: Complex64,
    #[arg(long, default_value = "0+0.9i", value_parser = parse_tau)]
    tau: Complex64,
    #[command(flatten)]
    quad: QuadArgs,
}

#[derive(Debug, Args, Serialize)]
struct VerifyArgs {
    /// 1..10 or "all".
    #[arg(long, default_value = "all")]
    identity: String,
    #[arg(long, default_value_t = 1)]
    p: usize,
    #[arg(long, default_value = "0+0.9i", value_parser = parse_tau)]
    tau: Complex64,
    /// Comma-separated λ grid [default: 0.13,0.27,0.41,0.55,0.69,0.83].
    #[arg(long, value_delimiter = ',')]
    grid: Option<Vec<f64>>,
    /// Relative tolerance; defaults to each identity's own.
    #[arg(long)]
    tol: Option<f64>,
    /// Shorthand for --format csv.
    #[arg(long)]
    csv: bool,
    #[command(flatten)]
    quad: QuadArgs,
}

#[derive(Debug, Args, Serialize)]
struct SuiteArgs {
    /// Criteria to run [default: all of 1, 2, 3, 4, 5, 6, 6-p2, 7, 8, 9].
    #[arg(long, value_delimiter = ',')]
    criterion: Option<Vec<String>>,
}

enum Failure {
    Usage(String),
    Runtime(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::InvalidParameter(_) | Error::OutOfSupportedRange(_) | Error::UnsupportedP(_) => {
                Failure::Usage(e.to_string())
            }
            _ => Failure::Runtime(e.to_string()),
        }
    }
}

/// A finished subcommand: its resolved inputs, result and verdict.
struct Outcome {
    resolved: Value,
    result: Value,
    rows: Option<Vec<CsvRow>>,
    pass: bool,
}

impl Outcome {
    fn ok(resolved: Value, result: Value) -> Self {
        Self {
            resolved,
            result,
            rows: None,
            pass: true,
        }
    }
}

#[derive(Debug, Serialize)]
struct CsvRow {
    name: String,
    #[serde(rename = "param-key")]
    param_key: String,
    #[serde(rename = "param-value")]
    param_value: f64,
    lhs_re: f64,
    lhs_im: f64,
    rhs_re: f64,
    rhs_im: f64,
    rel_err: f64,
    pass: bool,
}

fn to_value<T: Serialize>(v: &T) -> Value {
    serde_json::to_value(v).expect("serializable report")
}

fn matrix_rows(m: &TransformMatrix) -> Vec<Vec<Complex64>> {
    (0..m.entries.nrows())
        .map(|i| m.entries.row(i).iter().copied().collect())
        .collect()
}

fn matrix_value(m: &TransformMatrix) -> Value {
    json!({ "indices": m.indices(), "rows": matrix_rows(m) })
}

fn point(tau: Complex64) -> Result<ModularPoint, Failure> {
    Ok(ModularPoint::new(tau)?)
}

fn run_eval(a: &EvalArgs) -> Result<Outcome, Failure> {
    let pt = point(a.tau)?;
    let trunc = SeriesTruncation::default();
    let arg = EllipticArgument::new(a.lambda, &pt);
    let result = match a.function {
        Function::Theta1 => json!({ "value": theta1(&arg, &pt, a.d_lambda, a.d_tau, &trunc)? }),
        Function::Eta => json!({ "value": dedekind_eta(&pt, &trunc)? }),
        Function::Phi => json!({ "value": phi(a.k, &pt, &trunc)? }),
        Function::ThetaLevel => json!({
            "value": theta_level(a.kappa, a.n, &arg, &pt, a.symmetrized, a.d_lambda, a.d_tau, &trunc)?
        }),
        Function::SigmaE => {
            let s = sigma_and_e(&arg, a.t, &pt, &trunc)?;
            json!({ "sigma": s.sigma, "e": s.e, "rho": s.rho, "rho_prime": s.rho_prime })
        }
    };
    Ok(Outcome::ok(json!({ "truncation": trunc }), result))
}

/// Catalog names behind each lemma or corollary label.
const LABELS: [(&str, &str, &[&str]); 4] = [
    ("lemma", "7.1", &["half-period-shift"]),
    ("corollary", "7.2", &["theta21-eta-phi3"]),
    ("lemma", "7.3", &["theta4-phi1", "theta4-phi2", "theta4-phi3-squared"]),
    ("lemma", "7.5", &["theta6-eta"]),
];

fn run_series(a: &SeriesArgs) -> Result<Outcome, Failure> {
    let catalog = theta_identities();
    if a.list {
        let names: Vec<Value> = catalog
            .iter()
            .map(|(id, order)| json!({ "name": id.name, "default_order": order.to_string() }))
            .collect();
        return Ok(Outcome::ok(json!({}), json!({ "identities": names })));
    }
    let by_label = |kind: &str, label: &str| -> Result<Vec<String>, Failure> {
        LABELS
            .iter()
            .find(|(k, l, _)| *k == kind && *l == label)
            .map(|(_, _, names)| names.iter().map(|s| s.to_string()).collect())
            .ok_or_else(|| Failure::Usage(format!("no {kind} labelled {label}")))
    };
    let names: Vec<String> = match (&a.identity, &a.lemma, &a.corollary, a.all) {
        (Some(n), _, _, _) => vec![n.clone()],
        (_, Some(l), _, _) => by_label("lemma", l)?,
        (_, _, Some(c), _) => by_label("corollary", c)?,
        (_, _, _, true) => catalog.iter().map(|(id, _)| id.name.clone()).collect(),
        _ => return Err(Failure::Usage("series needs --identity, --lemma, --corollary, --all or --list".into())),
    };
    let mut reports = Vec::new();
    let mut orders = Vec::new();
    for name in &names {
        let id = identity_by_name(name).ok_or_else(|| Failure::Usage(format!("unknown identity {name:?}")))?;
        let order = match a.order {
            Some(o) => QExp::from_integer(o),
            None => catalog.iter().find(|(c, _)| c.name == *name).map(|(_, o)| *o).expect("catalog entry"),
        };
        orders.push(json!({ "name": name, "order": order.to_string() }));
        reports.push(check_series_identity(&id, order)?);
    }
    let pass = reports.iter().all(|r| r.pass);
    Ok(Outcome {
        resolved: json!({ "identities": orders }),
        result: json!({ "reports": reports, "pass": pass }),
        rows: None,
        pass,
    })
}

fn run_selberg(a: &SelbergArgs) -> Result<Outcome, Failure> {
    let quad = a.quad.spec()?;
    let params = SelbergParams::new(a.p, a.alpha, a.beta, a.gamma);
    let value = selberg_value(&params)?;
    let mut result = json!({ "params": params, "closed_form": value });
    if a.oracle {
        let o = selberg_oracle(&params, &quad)?;
        let rel = (o.value - value).norm() / value.norm().max(f64::MIN_POSITIVE);
        result["oracle"] = to_value(&o);
        result["rel_err"] = json!(rel);
    }
    Ok(Outcome::ok(json!({ "quad": quad }), result))
}

fn run_smatrix(a: &LevelArgs) -> Result<Outcome, Failure> {
    let (t, s) = modular_matrices(a.p, a.kappa)?;
    let (ma, mb) = translation_matrices(a.p, a.kappa)?;
    let r = relation_residuals(&s.entries, &t.entries, &ma.entries, &mb.entries, a.p, a.kappa)?;
    let dim = t.dim();
    let basis = MacdonaldBasis::new(a.p + 1, a.kappa, dim - 1)?;
    let result = json!({
        "dim": dim,
        "T": matrix_value(&t),
        "S": matrix_value(&s),
        "A": matrix_value(&ma),
        "B": matrix_value(&mb),
        "relation_residuals": r,
        "max_relation_residual": r.max(),
        "orthogonality_defect": basis.orthogonality_defect(),
    });
    Ok(Outcome::ok(json!({}), result))
}

fn run_modular(a: &ModularArgs) -> Result<Outcome, Failure> {
    let quad = a.quad.spec()?;
    let (t, s) = modular_matrices(a.level.p, a.level.kappa)?;
    let mut result = json!({ "T": matrix_value(&t), "S": matrix_value(&s) });
    if a.numeric {
        let pt = point(a.tau)?;
        let (nt, ns) = numeric_modular_matrices(a.level.p, a.level.kappa, &pt, &quad)?;
        let diff = |x: &TransformMatrix, y: &TransformMatrix| {
            (&x.entries - &y.entries).iter().map(|c| c.norm()).fold(0.0, f64::max)
        };
        result["numeric"] = json!({
            "T": matrix_value(&nt),
            "S": matrix_value(&ns),
            "max_abs_diff_T": diff(&nt, &t),
            "max_abs_diff_S": diff(&ns, &s),
        });
    }
    Ok(Outcome::ok(json!({ "quad": quad }), result))
}

fn run_block(a: &BlockArgs) -> Result<Outcome, Failure> {
    let quad = a.quad.spec()?;
    let pt = point(a.tau)?;
    let idx = BlockIndex::new(a.level.p, a.level.kappa, a.n)?;
    let arg = EllipticArgument::new(a.lambda, &pt);
    let j = j_integral(&idx, &arg, &pt, &quad)?;
    let u = u_block(&idx, &arg, &pt, &quad)?;
    let c = block_constant(idx.p, idx.kappa, idx.n)?;
    let result = json!({ "index": idx, "constant": c.value, "j": j, "u": u });
    Ok(Outcome::ok(json!({ "quad": quad, "reduced_n": idx.n }), result))
}

fn csv_rows(reports: &[VerificationReport]) -> Vec<CsvRow> {
    reports
        .iter()
        .flat_map(|r| {
            r.points.iter().map(move |pt| CsvRow {
                name: r.name.clone(),
                param_key: "lambda".into(),
                param_value: pt.lambda,
                lhs_re: pt.lhs.re,
                lhs_im: pt.lhs.im,
                rhs_re: pt.rhs.re,
                rhs_im: pt.rhs.im,
                rel_err: pt.rel_err,
                pass: pt.pass,
            })
        })
        .collect()
}

fn run_verify(a: &VerifyArgs) -> Result<Outcome, Failure> {
    let quad = a.quad.spec()?;
    let pt = point(a.tau)?;
    let grid = a.grid.clone().unwrap_or_else(|| DEFAULT_GRID.to_vec());
    if grid.is_empty() {
        return Err(Failure::Usage("empty lambda grid".into()));
    }
    let ids: Vec<IdentityId> = if a.identity == "all" {
        IdentityId::all().collect()
    } else {
        let n: u8 = a
            .identity
            .parse()
            .map_err(|_| Failure::Usage(format!("--identity must be 1..10 or all, got {:?}", a.identity)))?;
        vec![IdentityId::new(n)?]
    };
    let reports = ids
        .into_iter()
        .map(|id| verify_identity(id, a.p, &grid, &pt, &quad, a.tol))
        .collect::<elliptic_selberg::Result<Vec<_>>>()?;
    let pass = reports.iter().all(|r| r.pass);
    Ok(Outcome {
        resolved: json!({ "grid": grid, "quad": quad }),
        result: json!({ "reports": reports, "pass": pass }),
        rows: Some(csv_rows(&reports)),
        pass,
    })
}

fn run_suite(a: &SuiteArgs) -> Result<Outcome, Failure> {
    let ids: Vec<String> = match &a.criterion {
        Some(list) => list.clone(),
        None => CRITERIA.iter().map(|s| s.to_string()).collect(),
    };
    let reports = ids.iter().map(|id| run_criterion(id)).collect::<elliptic_selberg::Result<Vec<_>>>()?;
    for r in &reports {
        eprintln!("{}", r.summary_line());
    }
    let pass = reports.iter().all(|r| r.pass);
    Ok(Outcome {
        resolved: json!({ "criteria": ids }),
        result: json!({ "reports": reports, "pass": pass }),
        rows: None,
        pass,
    })
}

fn render(cli: &Cli, format: Format, outcome: Outcome) -> Result<Vec<u8>, Failure> {
    match format {
        Format::Json => {
            let report = json!({
                "config": { "cli": to_value(cli), "resolved": outcome.resolved },
                "result": outcome.result,
            });
            let mut out = serde_json::to_vec_pretty(&report).expect("serializable report");
            out.push(b'\n');
            Ok(out)
        }
        Format::Csv => {
            let rows = outcome
                .rows
                .ok_or_else(|| Failure::Usage("csv output is available for verify only".into()))?;
            let mut w = csv::Writer::from_writer(Vec::new());
            for row in rows {
                w.serialize(row).map_err(|e| Failure::Runtime(e.to_string()))?;
            }
            w.into_inner().map_err(|e| Failure::Runtime(e.to_string()))
        }
    }
}

fn execute(cli: &Cli) -> Result<bool, Failure> {
    rayon::ThreadPoolBuilder::new()
        .num_threads(cli.threads)
        .build_global()
        .map_err(|e| Failure::Runtime(e.to_string()))?;
    let mut format = cli.format;
    let outcome = match &cli.command {
        Command::Eval(a) => run_eval(a)?,
        Command::Series(a) => run_series(a)?,
        Command::Selberg(a) => run_selberg(a)?,
        Command::Smatrix(a) => run_smatrix(a)?,
        Command::Modular(a) => run_modular(a)?,
        Command::Block(a) => run_block(a)?,
        Command::Verify(a) => {
            if a.csv {
                format = Format::Csv;
            }
            run_verify(a)?
        }
        Command::Suite(a) => run_suite(a)?,
    };
    let pass = outcome.pass;
    let bytes = render(cli, format, outcome)?;
    match &cli.output {
        Some(path) => std::fs::write(path, bytes).map_err(|e| Failure::Runtime(format!("{}: {e}", path.display())))?,
        None => std::io::stdout()
            .write_all(&bytes)
            .map_err(|e| Failure::Runtime(e.to_string()))?,
    }
    Ok(pass)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match execute(&cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(Failure::Runtime(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
    }
}
