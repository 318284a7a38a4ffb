use std::fs;
use std::io::{self, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use turnpoint::airy::airy_eval;
use turnpoint::approximant::{sup_errors, UniformApproximant};
use turnpoint::blowup::DEFAULT_DELTA;
use turnpoint::eigen::eigen_table;
use turnpoint::poly::Poly;
use turnpoint::problem::{catalog, ProblemSpec};
use turnpoint::reference::rate_fit;
use turnpoint::series::{b0_coeffs, ell_riccati_coeffs, hyp_riccati_coeffs};
use turnpoint::validation::{self, CriterionReport, RATE_EPS, RATE_GRID, REF_TOL};

const THREADS_VAR: &str = "TURNPOINT_THREADS";

#[derive(Parser)]
#[command(name = "turnpoint", version, about = "Uniform turning-point asymptotics")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Evaluate the uniform W^u approximant on a grid.
    Approx(ApproxArgs),
    /// Tabulate Ai, Ai′, Bi, Bi′ and the Wronskian.
    AiryTable(AiryArgs),
    /// Print the formal series coefficients.
    Series(SeriesArgs),
    /// Chart round trips, Airy propagation and ε conservation.
    ChartsCheck(ChartsArgs),
    /// Run the acceptance criteria.
    Validate(ValidateArgs),
    /// Sup error of the approximant against the reference, with the fitted slope.
    Rates(RatesArgs),
    /// Bohr–Sommerfeld and shooting eigenvalues of a well.
    Eigen(EigenArgs),
}

#[derive(Clone, Copy, PartialEq, ValueEnum)]
enum Format {
    Csv,
    Json,
}

#[derive(Args)]
struct Output {
    /// Write here instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "csv")]
    format: Format,
    /// Run the built-in examples of this subcommand and exit.
    #[arg(long)]
    selftest: bool,
}

#[derive(Args)]
struct ApproxArgs {
    /// Problem JSON: {"mu_poly": [...]} or {"v_poly": [...], "energy": E}; default μ = t + t²/2.
    #[arg(long)]
    problem: Option<PathBuf>,
    #[arg(long, default_value_t = 1e-2)]
    eps: f64,
    #[arg(long, default_value_t = DEFAULT_DELTA)]
    delta: f64,
    #[arg(long, default_value_t = -0.3, allow_negative_numbers = true)]
    from: f64,
    #[arg(long, default_value_t = 0.3, allow_negative_numbers = true)]
    to: f64,
    #[arg(long, default_value_t = 61)]
    points: usize,
    #[command(flatten)]
    output: Output,
}

#[derive(Args)]
struct AiryArgs {
    #[arg(long, default_value_t = -5.0, allow_negative_numbers = true)]
    from: f64,
    #[arg(long, default_value_t = 2.0, allow_negative_numbers = true)]
    to: f64,
    #[arg(long, default_value_t = 0.5)]
    step: f64,
    #[command(flatten)]
    output: Output,
}

#[derive(Clone, Copy, PartialEq, ValueEnum)]
enum SeriesKind {
    Hyperbolic,
    Elliptic,
    B0,
}

#[derive(Args)]
struct SeriesArgs {
    #[arg(long)]
    problem: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "hyperbolic")]
    kind: SeriesKind,
    /// Evaluation point (ignored for b0).
    #[arg(long, default_value_t = -0.3, allow_negative_numbers = true)]
    t: f64,
    /// Highest order N (or L for b0).
    #[arg(long, default_value_t = 5)]
    order: usize,
    #[command(flatten)]
    output: Output,
}

#[derive(Args)]
struct ChartsArgs {
    #[arg(long)]
    problem: Option<PathBuf>,
    #[arg(long, default_value_t = 1000)]
    points: usize,
    #[arg(long, default_value_t = 0x7e57)]
    seed: u64,
    /// Run the checks and exit; the report is JSON either way.
    #[arg(long)]
    selftest: bool,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct ValidateArgs {
    /// Criterion ids to run (default all).
    #[arg(long, value_delimiter = ',')]
    only: Vec<String>,
    #[command(flatten)]
    output: Output,
}

#[derive(Args)]
struct RatesArgs {
    #[arg(long)]
    problem: Option<PathBuf>,
    #[arg(long, value_delimiter = ',', default_values_t = RATE_EPS.to_vec())]
    eps: Vec<f64>,
    #[arg(long, default_value_t = DEFAULT_DELTA)]
    delta: f64,
    #[arg(long, default_value_t = -0.2, allow_negative_numbers = true)]
    from: f64,
    #[arg(long, default_value_t = 0.2, allow_negative_numbers = true)]
    to: f64,
    #[arg(long, default_value_t = RATE_GRID)]
    points: usize,
    #[arg(long, default_value_t = REF_TOL)]
    tol: f64,
    #[command(flatten)]
    output: Output,
}

#[derive(Args)]
struct EigenArgs {
    /// Well JSON: {"v_poly": [...]}; default V = t².
    #[arg(long)]
    well: Option<PathBuf>,
    #[arg(long, value_delimiter = ',', default_values_t = vec![1e-2])]
    eps: Vec<f64>,
    #[arg(long, default_value_t = 10)]
    n_max: usize,
    #[arg(long, default_value_t = 1e-12)]
    tol: f64,
    #[command(flatten)]
    output: Output,
}

/// A usage or configuration problem (exit 2).
#[derive(Debug)]
struct ConfigError(String);

impl std::fmt::Display for ConfigError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for ConfigError {}

fn config(msg: impl Into<String>) -> anyhow::Error {
    ConfigError(msg.into()).into()
}

/// Outcome of a subcommand that ran to completion.
enum Status {
    Ok,
    Failed,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = e.exit_code();
            let _ = e.print();
            return ExitCode::from(code.clamp(0, 255) as u8);
        }
    };
    if let Err(e) = init_threads() {
        eprintln!("error: {e:#}");
        return ExitCode::from(2);
    }
    match run(cli.cmd) {
        Ok(Status::Ok) => ExitCode::SUCCESS,
        Ok(Status::Failed) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            if e.downcast_ref::<ConfigError>().is_some() {
                ExitCode::from(2)
            } else {
                ExitCode::from(1)
            }
        }
    }
}

#[cfg(feature = "parallel")]
fn init_threads() -> anyhow::Result<()> {
    if let Ok(v) = std::env::var(THREADS_VAR) {
        let n: usize = v
            .parse()
            .map_err(|_| config(format!("{THREADS_VAR} must be a positive integer, got {v:?}")))?;
        if n == 0 {
            return Err(config(format!("{THREADS_VAR} must be positive")));
        }
        rayon::ThreadPoolBuilder::new().num_threads(n).build_global()?;
    }
    Ok(())
}

#[cfg(not(feature = "parallel"))]
fn init_threads() -> anyhow::Result<()> {
    if std::env::var(THREADS_VAR).is_ok() {
        eprintln!("warning: {THREADS_VAR} ignored in a sequential build");
    }
    Ok(())
}

fn run(cmd: Cmd) -> anyhow::Result<Status> {
    match cmd {
        Cmd::Approx(a) => approx(a),
        Cmd::AiryTable(a) => airy_table(a),
        Cmd::Series(a) => series(a),
        Cmd::ChartsCheck(a) => charts_check(a),
        Cmd::Validate(a) => validate(a),
        Cmd::Rates(a) => rates(a),
        Cmd::Eigen(a) => eigen(a),
    }
}

fn load_problem(path: &Option<PathBuf>) -> anyhow::Result<ProblemSpec> {
    match path {
        None => Ok(catalog::quadratic()),
        Some(p) => {
            let text = fs::read_to_string(p).map_err(|e| config(format!("cannot read {}: {e}", p.display())))?;
            ProblemSpec::from_json(&text).map_err(|e| config(format!("{}: {e}", p.display())))
        }
    }
}

#[derive(serde::Deserialize)]
struct WellDoc {
    v_poly: Vec<f64>,
}

fn load_well(path: &Option<PathBuf>) -> anyhow::Result<Poly> {
    match path {
        None => Ok(catalog::harmonic_well()),
        Some(p) => {
            let text = fs::read_to_string(p).map_err(|e| config(format!("cannot read {}: {e}", p.display())))?;
            let doc: WellDoc = serde_json::from_str(&text).map_err(|e| config(format!("{}: {e}", p.display())))?;
            Ok(Poly::new(doc.v_poly))
        }
    }
}

fn check_eps(eps: &[f64]) -> anyhow::Result<()> {
    if eps.is_empty() {
        return Err(config("need at least one ε"));
    }
    for &e in eps {
        if !(e > 0.0 && e < 1.0) {
            return Err(config(format!("ε = {e} must lie in (0, 1)")));
        }
    }
    Ok(())
}

fn check_delta(delta: f64) -> anyhow::Result<()> {
    if !(delta > 0.0 && delta < 1.0) {
        return Err(config(format!("δ = {delta} must lie in (0, 1)")));
    }
    Ok(())
}

fn check_range(from: f64, to: f64) -> anyhow::Result<()> {
    if !(from.is_finite() && to.is_finite() && from <= to) {
        return Err(config(format!("need finite --from ≤ --to, got {from}, {to}")));
    }
    Ok(())
}

fn num(v: f64) -> String {
    format!("{v:.16e}")
}

/// A header and rows of already formatted fields.
struct Table {
    header: Vec<&'static str>,
    rows: Vec<Vec<String>>,
    trailer: Vec<String>,
}

impl Table {
    fn new(header: Vec<&'static str>) -> Self {
        Table {
            header,
            rows: Vec::new(),
            trailer: Vec::new(),
        }
    }

    fn to_json(&self) -> serde_json::Value {
        let rows: Vec<serde_json::Value> = self
            .rows
            .iter()
            .map(|r| {
                let obj = self
                    .header
                    .iter()
                    .zip(r)
                    .map(|(h, v)| {
                        let val = v
                            .parse::<f64>()
                            .ok()
                            .and_then(|f| serde_json::Number::from_f64(f).map(serde_json::Value::Number))
                            .unwrap_or_else(|| serde_json::Value::String(v.clone()));
                        (h.to_string(), val)
                    })
                    .collect();
                serde_json::Value::Object(obj)
            })
            .collect();
        if self.trailer.is_empty() {
            serde_json::Value::Array(rows)
        } else {
            serde_json::json!({ "rows": rows, "notes": self.trailer })
        }
    }
}

fn sink(out: &Option<PathBuf>) -> anyhow::Result<Box<dyn Write>> {
    Ok(match out {
        None => Box::new(io::stdout().lock()),
        Some(p) => Box::new(io::BufWriter::new(
            fs::File::create(p).map_err(|e| config(format!("cannot write {}: {e}", p.display())))?,
        )),
    })
}

fn emit(table: &Table, output: &Output) -> anyhow::Result<()> {
    let mut w = sink(&output.out)?;
    match output.format {
        Format::Csv => {
            {
                let mut csv = csv::Writer::from_writer(&mut w);
                csv.write_record(&table.header)?;
                for r in &table.rows {
                    csv.write_record(r)?;
                }
                csv.flush()?;
            }
            for line in &table.trailer {
                writeln!(w, "# {line}")?;
            }
        }
        Format::Json => {
            serde_json::to_writer_pretty(&mut w, &table.to_json())?;
            writeln!(w)?;
        }
    }
    w.flush()?;
    Ok(())
}

fn emit_json<T: Serialize>(value: &T, out: &Option<PathBuf>) -> anyhow::Result<()> {
    let mut w = sink(out)?;
    serde_json::to_writer_pretty(&mut w, value)?;
    writeln!(w)?;
    w.flush()?;
    Ok(())
}

fn selftest_result(name: &str, checks: &[(&str, bool)]) -> Status {
    let mut ok = true;
    for (what, passed) in checks {
        println!("{} {name}: {what}", if *passed { "PASS" } else { "FAIL" });
        ok &= passed;
    }
    if ok {
        Status::Ok
    } else {
        Status::Failed
    }
}

fn approx_table(p: &ProblemSpec, eps: f64, delta: f64, from: f64, to: f64, points: usize) -> anyhow::Result<Table> {
    let (pn, rec) = p.normalize()?;
    let approx = UniformApproximant::new(&pn, eps, delta)?;
    let mut table = Table::new(vec!["t", "x", "y", "log_scale", "interval"]);
    let n = points.max(2);
    for k in 0..n {
        let t = from + (to - from) * k as f64 / (n - 1) as f64;
        let w = approx.eval(rec.normalized_t(t))?;
        table.rows.push(vec![
            num(t),
            num(w.x),
            num(rec.original_y(w.y)),
            num(w.log_scale),
            format!("{:?}", w.interval),
        ]);
    }
    Ok(table)
}

fn approx(a: ApproxArgs) -> anyhow::Result<Status> {
    if a.output.selftest {
        let eps = 1e-2;
        let t = approx_table(&catalog::linear(), eps, DEFAULT_DELTA, -0.3, 0.3, 7)?;
        let mut worst = 0.0f64;
        for row in &t.rows {
            let tt: f64 = row[0].parse()?;
            let x: f64 = row[1].parse::<f64>()? * row[3].parse::<f64>()?.exp();
            let ai = airy_eval(-tt / eps.powf(2.0 / 3.0))?.ai;
            worst = worst.max((x - ai).abs() / ai.abs().max(1e-3));
        }
        return Ok(selftest_result(
            "approx",
            &[("μ = t reproduces Ai(−t/ε^{2/3})", worst <= 1e-8)],
        ));
    }
    check_eps(&[a.eps])?;
    check_delta(a.delta)?;
    check_range(a.from, a.to)?;
    let p = load_problem(&a.problem)?;
    let table = approx_table(&p, a.eps, a.delta, a.from, a.to, a.points)?;
    emit(&table, &a.output)?;
    Ok(Status::Ok)
}

fn airy_rows(from: f64, to: f64, step: f64) -> anyhow::Result<Table> {
    if !(step > 0.0) {
        return Err(config(format!("--step must be positive, got {step}")));
    }
    check_range(from, to)?;
    let n = ((to - from) / step).round() as usize + 1;
    let mut table = Table::new(vec!["x", "ai", "aip", "bi", "bip", "wronskian"]);
    for k in 0..n {
        let x = from + step * k as f64;
        let a = airy_eval(x).map_err(|e| config(e.to_string()))?;
        table.rows.push(vec![
            num(x),
            num(a.ai),
            num(a.aip),
            num(a.bi),
            num(a.bip),
            num(a.wronskian()),
        ]);
    }
    Ok(table)
}

fn airy_table(a: AiryArgs) -> anyhow::Result<Status> {
    if a.output.selftest {
        let t = airy_rows(-5.0, 2.0, 0.5)?;
        let w_ok = t
            .rows
            .iter()
            .all(|r| (r[5].parse::<f64>().unwrap() - std::f64::consts::FRAC_1_PI).abs() <= 1e-12);
        return Ok(selftest_result(
            "airy-table",
            &[
                ("15 rows on [−5, 2] step 0.5", t.rows.len() == 15),
                ("Wronskian column is 1/π", w_ok),
            ],
        ));
    }
    emit(&airy_rows(a.from, a.to, a.step)?, &a.output)?;
    Ok(Status::Ok)
}

fn series_table(p: &ProblemSpec, kind: SeriesKind, t: f64, order: usize) -> anyhow::Result<Table> {
    let mut table = Table::new(vec!["k", "re", "im"]);
    let coeffs: Vec<(f64, f64)> = match kind {
        SeriesKind::Hyperbolic => hyp_riccati_coeffs(p, t, order)?
            .coeffs
            .iter()
            .map(|&c| (c, 0.0))
            .collect(),
        SeriesKind::Elliptic => ell_riccati_coeffs(p, t, order)?
            .coeffs
            .iter()
            .map(|c| (c.re, c.im))
            .collect(),
        SeriesKind::B0 => b0_coeffs(order).coeffs.iter().map(|c| (c.re, c.im)).collect(),
    };
    for (k, (re, im)) in coeffs.into_iter().enumerate() {
        table.rows.push(vec![k.to_string(), num(re), num(im)]);
    }
    Ok(table)
}

fn series(a: SeriesArgs) -> anyhow::Result<Status> {
    if a.output.selftest {
        let b = series_table(&catalog::quadratic(), SeriesKind::B0, 0.0, 2)?;
        let b1: f64 = b.rows[1][2].parse()?;
        let b2: f64 = b.rows[2][1].parse()?;
        let h = series_table(&catalog::linear(), SeriesKind::Hyperbolic, -1.0, 1)?;
        let h0: f64 = h.rows[0][1].parse()?;
        return Ok(selftest_result(
            "series",
            &[
                ("b₁ = −i/4", b1 == -0.25),
                ("b₂ = −7/32", b2 == -7.0 / 32.0),
                ("μ = t, t = −1: H₀ = 1", (h0 - 1.0).abs() <= 1e-15),
            ],
        ));
    }
    if a.order > 60 {
        return Err(config(format!("--order {} too large (max 60)", a.order)));
    }
    let p = load_problem(&a.problem)?;
    emit(&series_table(&p, a.kind, a.t, a.order)?, &a.output)?;
    Ok(Status::Ok)
}

fn charts_check(a: ChartsArgs) -> anyhow::Result<Status> {
    if a.points == 0 {
        return Err(config("--points must be positive"));
    }
    let p = if a.selftest {
        catalog::quadratic()
    } else {
        load_problem(&a.problem)?
    };
    let report = validation::charts_check(&p, a.points, a.seed);
    emit_json(&report, &a.out)?;
    Ok(if report.passed { Status::Ok } else { Status::Failed })
}

fn run_selected(only: &[String]) -> anyhow::Result<Vec<CriterionReport>> {
    let all: [(&str, fn() -> CriterionReport); 10] = [
        ("1", validation::criterion_1),
        ("2", validation::criterion_2),
        ("3", validation::criterion_3),
        ("3b", validation::criterion_3_small_eps),
        ("4", validation::criterion_4),
        ("5", validation::criterion_5),
        ("6", validation::criterion_6),
        ("7", validation::criterion_7),
        ("8", validation::criterion_8),
        ("9", validation::criterion_9),
    ];
    for id in only {
        if !all.iter().any(|(k, _)| k == id) {
            return Err(config(format!("unknown criterion {id:?}")));
        }
    }
    Ok(all
        .iter()
        .filter(|(k, _)| only.is_empty() || only.iter().any(|o| o == k))
        .map(|(_, f)| f())
        .collect())
}

fn validate(a: ValidateArgs) -> anyhow::Result<Status> {
    let only = if a.output.selftest {
        vec!["1".to_string(), "2".to_string()]
    } else {
        a.only
    };
    let reports = run_selected(&only)?;
    let failed = reports.iter().any(|r| !r.passed && !r.id.ends_with('b'));
    match a.output.format {
        Format::Json => emit_json(&reports, &a.output.out)?,
        Format::Csv => {
            let mut w = sink(&a.output.out)?;
            for r in &reports {
                writeln!(w, "{}", r.line())?;
            }
        }
    }
    Ok(if failed { Status::Failed } else { Status::Ok })
}

fn rates_table(p: &ProblemSpec, a: &RatesArgs) -> anyhow::Result<Table> {
    let (pn, _) = p.normalize()?;
    let errs = sup_errors(&pn, &a.eps, a.delta, a.from, a.to, a.points, a.tol)?;
    let mut table = Table::new(vec!["eps", "sup_error"]);
    for (e, s) in &errs {
        table.rows.push(vec![num(*e), num(*s)]);
    }
    if errs.len() >= 3 {
        let fit = rate_fit(&errs)?;
        table.trailer.push(format!(
            "slope={:.6} half_width={:.6} n={}",
            fit.slope, fit.half_width, fit.n
        ));
    }
    Ok(table)
}

fn rates(a: RatesArgs) -> anyhow::Result<Status> {
    if a.output.selftest {
        let args = RatesArgs {
            problem: None,
            eps: vec![2e-3, 1e-3, 5e-4],
            points: 101,
            ..a
        };
        let t = rates_table(&catalog::quadratic(), &args)?;
        let ok = t.rows.len() == 3 && t.trailer.len() == 1 && t.trailer[0].starts_with("slope=");
        return Ok(selftest_result("rates", &[("three rows and a slope line", ok)]));
    }
    check_eps(&a.eps)?;
    check_delta(a.delta)?;
    check_range(a.from, a.to)?;
    if a.points < 2 {
        return Err(config("--points must be at least 2"));
    }
    if !(a.tol >= 1e-12) {
        return Err(config(format!("--tol {} below 1e-12", a.tol)));
    }
    let p = load_problem(&a.problem)?;
    emit(&rates_table(&p, &a)?, &a.output)?;
    Ok(Status::Ok)
}

fn eigen_rows(v: &Poly, eps: &[f64], n_max: usize, tol: f64) -> anyhow::Result<Table> {
    let mut table = Table::new(vec!["eps", "n", "e_bs", "e_ref", "gap"]);
    let results: Vec<_> = turnpoint::par::map(eps, |&e| eigen_table(v, e, n_max, tol));
    for r in results {
        for row in r? {
            table.rows.push(vec![
                num(row.eps),
                row.n.to_string(),
                num(row.e_bs),
                num(row.e_ref),
                num(row.gap),
            ]);
        }
    }
    Ok(table)
}

fn eigen(a: EigenArgs) -> anyhow::Result<Status> {
    if a.output.selftest {
        let t = eigen_rows(&catalog::harmonic_well(), &[1e-2], 3, 1e-12)?;
        let ok = t.rows.iter().all(|r| {
            let n: f64 = r[1].parse().unwrap();
            let e: f64 = r[3].parse().unwrap();
            (e - 1e-2 * (2.0 * n + 1.0)).abs() <= 1e-8
        });
        return Ok(selftest_result(
            "eigen",
            &[("V = t², ε = 0.01: E_n = 0.01(2n + 1)", ok)],
        ));
    }
    check_eps(&a.eps)?;
    if !(a.tol >= 1e-12) {
        return Err(config(format!("--tol {} below 1e-12", a.tol)));
    }
    let v = load_well(&a.well)?;
    emit(&eigen_rows(&v, &a.eps, a.n_max, a.tol)?, &a.output)?;
    Ok(Status::Ok)
}
