//! Command-line front end: `check`, `solve`, `verify-s`, `example`, `gevrey`.
//!
//! Exit status is 0 on success, 1 when a checked inequality or the solver
//! fails, and 2 for usage, configuration or parse errors.

pub mod config;
pub mod format;

use std::ffi::OsString;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_complex::Complex64;
use serde::Serialize;
use serde_json::{json, Map, Value};

use crate::geometry::{check_s_property, exp_map_threshold, mu};
use crate::gevrey::{coefficient_decay, endpoint_contrast, DecayFit};
use crate::hypotheses::{
    check_conditions_seeded, example1_bound, example2_bound, lambda_function, HypothesisError,
    Problem,
};
use crate::picard::{
    check_tube_inclusion, choose_s2, lens_iterate, omega_step_check, solve, PicardError, Solution,
};
use config::RunConfig;
use format::{solution_csv, to_json};

/// Uniform output points of the solution CSV.
pub const CSV_POINTS: usize = 257;
pub const DEFAULT_D_LIST: [f64; 4] = [0.5, 0.0, -0.5, -0.9];

#[derive(Debug, Clone, PartialEq)]
pub enum CliError {
    /// Bad invocation, configuration or expression.
    Usage(String),
    /// A checked inequality or the solver failed.
    Failure(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Failure(_) => 1,
        }
    }

    fn message(&self) -> &str {
        match self {
            CliError::Usage(m) | CliError::Failure(m) => m,
        }
    }
}

impl From<PicardError> for CliError {
    fn from(e: PicardError) -> Self {
        match e {
            PicardError::InvalidOption(_) => CliError::Usage(e.to_string()),
            PicardError::Hypothesis(
                HypothesisError::Parse(_) | HypothesisError::InvalidProblem(_),
            ) => CliError::Usage(e.to_string()),
            _ => CliError::Failure(e.to_string()),
        }
    }
}

impl From<HypothesisError> for CliError {
    fn from(e: HypothesisError) -> Self {
        PicardError::from(e).into()
    }
}

type CliResult<T> = Result<T, CliError>;

#[derive(Parser, Debug)]
#[command(
    name = "fracpicard",
    version,
    about = "Certified Picard solver for Caputo fractional functional equations"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Args, Debug, Clone, Default)]
pub struct Common {
    /// TOML run configuration.
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long)]
    pub tol: Option<f64>,
    /// Chebyshev grid size.
    #[arg(long)]
    pub grid: Option<usize>,
    #[arg(long = "quad-order")]
    pub quad_order: Option<usize>,
    /// Output directory.
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long = "max-iter")]
    pub max_iter: Option<usize>,
    /// Left offset of the lens construction, in (-1, 1).
    #[arg(long, allow_hyphen_values = true)]
    pub d: Option<f64>,
    /// Seed for randomized sampling.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Check the hypotheses and write hypotheses.json.
    Check(Common),
    /// Solve and write solution.csv and certificate.json.
    Solve(Common),
    /// Check the sector-inclusion property of a map.
    VerifyS(VerifyArgs),
    /// Run the full pipeline on a built-in example.
    Example(ExampleArgs),
    /// Solve and write Chebyshev decay fits to gevrey.json.
    Gevrey(GevreyArgs),
}

#[derive(Args, Debug)]
pub struct VerifyArgs {
    #[command(flatten)]
    pub common: Common,
    /// Map to test; defaults to the configured psi or the exponential map.
    #[arg(long)]
    pub psi: Option<String>,
    /// Shrink exponent l; defaults to the configured k or 1.
    #[arg(long)]
    pub l: Option<f64>,
    /// Base radius A of the sector family.
    #[arg(long, default_value_t = 0.5)]
    pub a: f64,
    #[arg(long = "n-min", default_value_t = 1)]
    pub n_min: u32,
    #[arg(long = "n-max", default_value_t = 64)]
    pub n_max: u32,
    #[arg(long, default_value_t = 128)]
    pub samples: usize,
    /// Also evaluate the analytic threshold for the exponential map.
    #[arg(long)]
    pub analytic: bool,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExampleName {
    Example1,
    Example2,
}

#[derive(Args, Debug)]
pub struct ExampleArgs {
    pub name: ExampleName,
    #[command(flatten)]
    pub common: Common,
    #[arg(long, allow_hyphen_values = true)]
    pub alpha: Option<f64>,
    /// Coefficient C of the first example.
    #[arg(long, allow_hyphen_values = true)]
    pub c: Option<f64>,
    /// Forcing amplitude of the first example.
    #[arg(long, allow_hyphen_values = true)]
    pub gamma: Option<f64>,
    /// Coefficient of the second example.
    #[arg(long, allow_hyphen_values = true)]
    pub eta: Option<f64>,
    /// Real initial value.
    #[arg(long, allow_hyphen_values = true)]
    pub lambda: Option<f64>,
}

#[derive(Args, Debug)]
pub struct GevreyArgs {
    #[command(flatten)]
    pub common: Common,
    /// Left endpoints to compare.
    #[arg(long = "d-list", value_delimiter = ',', allow_hyphen_values = true)]
    pub d_list: Vec<f64>,
    #[arg(long = "n-coeffs", default_value_t = 129)]
    pub n_coeffs: usize,
}

/// Parses arguments, runs one command and returns the exit status.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return e.exit_code();
        }
    };
    match dispatch(cli.command) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {}", e.message());
            e.exit_code()
        }
    }
}

fn dispatch(cmd: Command) -> CliResult<()> {
    match cmd {
        Command::Check(c) => cmd_check(&c),
        Command::Solve(c) => cmd_solve(&c),
        Command::VerifyS(v) => cmd_verify_s(&v),
        Command::Example(e) => cmd_example(&e),
        Command::Gevrey(g) => cmd_gevrey(&g),
    }
}

fn load_config(c: &Common) -> CliResult<RunConfig> {
    let mut cfg = match &c.config {
        Some(path) => RunConfig::load(path).map_err(CliError::Usage)?,
        None => RunConfig::default(),
    };
    if let Some(v) = c.tol {
        cfg.solver.tol = v;
    }
    if let Some(v) = c.grid {
        cfg.solver.grid_size = v;
    }
    if let Some(v) = c.quad_order {
        cfg.solver.quad_order = v;
    }
    if let Some(v) = c.max_iter {
        cfg.solver.max_iter = v;
    }
    if let Some(v) = c.d {
        cfg.lens.d = v;
    }
    cfg.validate().map_err(CliError::Usage)?;
    Ok(cfg)
}

fn require_problem(cfg: &RunConfig) -> CliResult<Problem> {
    cfg.problem
        .as_ref()
        .ok_or_else(|| CliError::Usage("configuration has no [problem] section".into()))?
        .build()
        .map_err(CliError::Usage)
}

fn out_dir(c: &Common) -> CliResult<PathBuf> {
    let dir = c.out.clone().unwrap_or_else(|| PathBuf::from("."));
    std::fs::create_dir_all(&dir)
        .map_err(|e| CliError::Usage(format!("{}: {e}", dir.display())))?;
    Ok(dir)
}

fn resolve(dir: &Path, configured: &Option<PathBuf>, default: &str) -> PathBuf {
    match configured {
        Some(p) if p.is_absolute() => p.clone(),
        Some(p) => dir.join(p),
        None => dir.join(default),
    }
}

fn write(path: &Path, text: &str) -> CliResult<()> {
    if let Some(parent) = path.parent() {
        std::fs::create_dir_all(parent)
            .map_err(|e| CliError::Usage(format!("{}: {e}", parent.display())))?;
    }
    std::fs::write(path, text).map_err(|e| CliError::Usage(format!("{}: {e}", path.display())))
}

fn json_text<T: Serialize>(v: &T) -> CliResult<String> {
    to_json(v).map_err(|e| CliError::Failure(format!("serialization: {e}")))
}

fn complex_json(z: Complex64) -> Value {
    json!({ "re": z.re, "im": z.im })
}

fn problem_json(p: &Problem) -> Value {
    json!({
        "alpha": p.alpha.value(),
        "lambda": complex_json(p.lambda),
        "a": p.a.to_string(),
        "b": p.b.to_string(),
        "psi": p.psi.to_string(),
        "phi": p.phi.to_string(),
        "alpha0": p.alpha0,
        "beta0": p.beta0,
        "k": p.k,
        "sigma": p.sigma,
    })
}

fn cmd_check(c: &Common) -> CliResult<()> {
    let cfg = load_config(c)?;
    let p = require_problem(&cfg)?;
    let dir = out_dir(c)?;
    let report = match check_conditions_seeded(&p, c.seed) {
        Ok(r) => r,
        Err(HypothesisError::DegenerateCoefficient) => {
            let body =
                json!({ "problem": problem_json(&p), "all_passed": false, "degenerate": true });
            write(&dir.join("hypotheses.json"), &json_text(&body)?)?;
            return Err(CliError::Failure(
                "a vanishes identically: conditions (b)-(d) are undefined (solve uses the linear path)".into(),
            ));
        }
        Err(e) => return Err(e.into()),
    };
    for cond in report.conditions() {
        println!(
            "{} ({}) {}: lhs = {}, rhs = {}",
            if cond.passed { "PASS" } else { "FAIL" },
            cond.name,
            cond.statement,
            cond.lhs.map_or("undefined".into(), format::g17),
            cond.rhs.map_or("undefined".into(), format::g17),
        );
    }
    let body = json!({ "problem": problem_json(&p), "all_passed": report.all_passed(), "hypotheses": report });
    write(&dir.join("hypotheses.json"), &json_text(&body)?)?;
    match report.first_failure() {
        None => Ok(()),
        Some(f) => Err(CliError::Failure(violation(
            f.name,
            f.statement,
            f.lhs,
            f.rhs,
        ))),
    }
}

fn violation(name: &str, statement: &str, lhs: Option<f64>, rhs: Option<f64>) -> String {
    let side = |v: Option<f64>| v.map_or("undefined".to_string(), format::g17);
    format!(
        "condition ({name}) violated: {statement}; lhs = {}, rhs = {}",
        side(lhs),
        side(rhs)
    )
}

fn failure_message(e: PicardError) -> CliError {
    match e {
        PicardError::HypothesisFailure {
            name,
            statement,
            lhs,
            rhs,
        } => CliError::Failure(violation(&name, &statement, lhs, rhs)),
        other => other.into(),
    }
}

fn solution_points(sol: &Solution) -> Vec<(f64, Complex64)> {
    (0..CSV_POINTS)
        .map(|i| {
            let t = -1.0 + 2.0 * i as f64 / (CSV_POINTS - 1) as f64;
            (t, sol.u.eval(t))
        })
        .collect()
}

fn run_solve(p: &Problem, cfg: &RunConfig, seed: u64) -> CliResult<Solution> {
    let sol = solve(p, &cfg.solver_options(seed)).map_err(failure_message)?;
    let cert = &sol.certificate;
    println!(
        "converged in {} iterations: Q = {}, bound = {}, residual = {}",
        cert.iterations,
        format::g17(cert.q),
        format::g17(cert.apriori_bound.min(cert.aposteriori_bound)),
        format::g17(cert.residual_sup)
    );
    Ok(sol)
}

fn certificate_value(p: &Problem, sol: &Solution) -> CliResult<Map<String, Value>> {
    let mut map = match serde_json::to_value(&sol.certificate) {
        Ok(Value::Object(m)) => m,
        _ => {
            return Err(CliError::Failure(
                "certificate did not serialize to an object".into(),
            ))
        }
    };
    map.insert("problem".into(), problem_json(p));
    Ok(map)
}

fn write_solution(
    dir: &Path,
    cfg: &RunConfig,
    sol: &Solution,
    cert: &Map<String, Value>,
) -> CliResult<()> {
    write(
        &resolve(dir, &cfg.outputs.solution_csv_path, "solution.csv"),
        &solution_csv(solution_points(sol)),
    )?;
    write(
        &resolve(dir, &cfg.outputs.certificate_path, "certificate.json"),
        &json_text(cert)?,
    )
}

fn cmd_solve(c: &Common) -> CliResult<()> {
    let cfg = load_config(c)?;
    let p = require_problem(&cfg)?;
    let dir = out_dir(c)?;
    let sol = run_solve(&p, &cfg, c.seed)?;
    let cert = certificate_value(&p, &sol)?;
    write_solution(&dir, &cfg, &sol, &cert)
}

fn cmd_verify_s(v: &VerifyArgs) -> CliResult<()> {
    let cfg = load_config(&v.common)?;
    let dir = out_dir(&v.common)?;
    let psi_text = v
        .psi
        .clone()
        .or_else(|| cfg.problem.as_ref().map(|p| p.psi.clone()))
        .unwrap_or_else(|| crate::hypotheses::EXP_MAP.to_string());
    let psi = crate::expr::parse(&psi_text).map_err(|e| CliError::Usage(format!("psi: {e}")))?;
    let l =
        v.l.or_else(|| cfg.problem.as_ref().map(|p| p.k))
            .unwrap_or(1.0);
    let mut analytic = Value::Null;
    if v.analytic {
        let bound = 1.0 / (mu() * l);
        if v.a >= bound {
            eprintln!(
                "warning: A = {} is not below the admissibility bound 1/(mu l) = {}",
                format::g17(v.a),
                format::g17(bound)
            );
            analytic = json!({ "admissible": false, "bound": bound });
        } else {
            let th = exp_map_threshold(l, v.a).map_err(|e| CliError::Failure(e.to_string()))?;
            println!("analytic threshold N = {}", th.n);
            analytic = json!({ "admissible": true, "bound": bound, "threshold": th });
        }
    }
    let report = check_s_property(&psi, l, v.a, v.n_min..=v.n_max, v.samples)
        .map_err(|e| CliError::Usage(e.to_string()))?;
    println!("n\tworst_margin");
    for st in &report.stages {
        println!("{}\t{}", st.n, format::g17(st.worst_margin));
    }
    let body = json!({ "psi": psi.to_string(), "report": report, "analytic": analytic });
    write(&dir.join("s_property.json"), &json_text(&body)?)?;
    match report.threshold {
        Some(n) => {
            println!("verified from N = {n}");
            Ok(())
        }
        None => {
            let last = report.stages.last().expect("non-empty range");
            Err(CliError::Failure(format!(
                "sector inclusion fails at stage {}: worst margin {} <= 0",
                last.n,
                format::g17(last.worst_margin)
            )))
        }
    }
}

fn example_problem(e: &ExampleArgs) -> CliResult<Problem> {
    let alpha = e.alpha.unwrap_or(0.5);
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(CliError::Usage(format!(
            "alpha must lie in (0, 1), got {alpha}"
        )));
    }
    match e.name {
        ExampleName::Example1 => {
            let (c, gamma) = (e.c.unwrap_or(0.05), e.gamma.unwrap_or(0.1));
            let lambda = Complex64::new(e.lambda.unwrap_or(0.0), 0.0);
            let bound = example1_bound(alpha, gamma)?;
            if !(c.abs() < bound) {
                return Err(CliError::Failure(format!(
                    "admissibility violated: |C| < bound; lhs = {}, rhs = {}",
                    format::g17(c.abs()),
                    format::g17(bound)
                )));
            }
            Ok(Problem::example1(alpha, c, gamma, lambda)?)
        }
        ExampleName::Example2 => {
            let eta = e.eta.unwrap_or(0.05);
            let lambda = Complex64::new(e.lambda.unwrap_or(0.1), 0.0);
            let bound = example2_bound(alpha, lambda)?;
            if !(eta.abs() < bound) {
                return Err(CliError::Failure(format!(
                    "admissibility violated: |eta| < bound; lhs = {}, rhs = {}",
                    format::g17(eta.abs()),
                    format::g17(bound)
                )));
            }
            Ok(Problem::example2(alpha, eta, lambda)?)
        }
    }
}

fn decay_json(fits: &[DecayFit]) -> Value {
    serde_json::to_value(fits).unwrap_or(Value::Null)
}

fn cmd_example(e: &ExampleArgs) -> CliResult<()> {
    let cfg = load_config(&e.common)?;
    let p = example_problem(e)?;
    let dir = out_dir(&e.common)?;
    let sol = run_solve(&p, &cfg, e.common.seed)?;
    let mut cert = certificate_value(&p, &sol)?;
    let lens_opts = cfg.lens_options(cfg.solver.quad_order);

    let s1 = sol
        .certificate
        .s1
        .ok_or_else(|| CliError::Failure("no extension radius s1 with Lambda(s) < 1".into()))?;
    let s2 = choose_s2(&p, s1, cfg.lens.d, &lens_opts)?;
    let run = lens_iterate(&p, s2, &lens_opts)?;
    let lambda_s2 = lambda_function(&p, sol.certificate.r0, s2)?;
    let inclusion = check_tube_inclusion(
        &run.iterates,
        sol.certificate.r0,
        p.k,
        s2,
        lens_opts.samples_per_arc,
    );
    let steps = omega_step_check(&run, lambda_s2, 1e-13);
    cert.insert(
        "lens".into(),
        json!({ "d": cfg.lens.d, "s2": s2, "lambda_s2": lambda_s2, "options": lens_opts, "inclusion": inclusion, "steps": steps }),
    );

    let decay =
        coefficient_decay(&sol.u, 0.0, 129).map_err(|e| CliError::Failure(e.to_string()))?;
    let contrast = endpoint_contrast(&sol.u, &DEFAULT_D_LIST, 129)
        .map_err(|e| CliError::Failure(e.to_string()))?;
    cert.insert(
        "gevrey".into(),
        json!({ "target_class": p.k, "decay": decay, "contrast": decay_json(&contrast) }),
    );
    write_solution(&dir, &cfg, &sol, &cert)?;
    if !inclusion.holds {
        let worst = inclusion
            .stages
            .iter()
            .min_by(|a, b| a.worst_margin.total_cmp(&b.worst_margin))
            .expect("stages");
        return Err(CliError::Failure(format!(
            "tube inclusion violated at stage {}: dist(omega_n, [-R0, R0]) < {}; margin = {}",
            worst.n,
            format::g17(worst.tube_radius),
            format::g17(worst.worst_margin)
        )));
    }
    println!(
        "lens stages 1..={} inside their tubes (s2 = {})",
        lens_opts.n_max,
        format::g17(s2)
    );
    Ok(())
}

fn cmd_gevrey(g: &GevreyArgs) -> CliResult<()> {
    let cfg = load_config(&g.common)?;
    let p = require_problem(&cfg)?;
    let dir = out_dir(&g.common)?;
    let sol = run_solve(&p, &cfg, g.common.seed)?;
    let d_list: Vec<f64> = match (g.common.d, g.d_list.is_empty()) {
        (Some(d), true) => vec![d],
        (_, true) => DEFAULT_D_LIST.to_vec(),
        (_, false) => g.d_list.clone(),
    };
    let fits = endpoint_contrast(&sol.u, &d_list, g.n_coeffs)
        .map_err(|e| CliError::Usage(e.to_string()))?;
    println!("d\tgamma\trate\tresidual\tgeometric_rate");
    for f in &fits {
        match f.fit {
            Some(s) => println!(
                "{}\t{}\t{}\t{}\t{}",
                format::g17(f.d),
                format::g17(s.gamma),
                format::g17(s.rate),
                format::g17(s.residual),
                format::g17(f.geometric_rate.unwrap_or(f64::NAN))
            ),
            None => println!(
                "{}\ttoo simple ({} coefficients above floor)",
                format::g17(f.d),
                f.n_above_floor
            ),
        }
    }
    write(
        &dir.join("gevrey.json"),
        &json_text(&json!({ "problem": problem_json(&p), "fits": decay_json(&fits) }))?,
    )
}
