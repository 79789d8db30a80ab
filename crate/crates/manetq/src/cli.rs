//! Command-line front end.
//!
//! Commands emit JSON lines by default or CSV with `--format csv`; both carry
//! the same numbers. Exact results are serialized as `num/den` rationals
//! first-class, with a 12-significant-digit decimal rendering alongside as
//! presentation; asymptotic, Monte Carlo and d-dimensional results are plain
//! floats. Nothing is printed on error paths.
//!
//! Exit codes: 0 success, 1 parse errors, 2 domain/parameter errors,
//! 3 infeasible solve targets.

use std::str::FromStr;

use clap::{Args, Parser, Subcommand};
use serde_json::{json, Map, Value};

use crate::asym::{self, Regime};
use crate::bounds;
use crate::error::{Error, Result};
use crate::exact::{self, MetricKind};
use crate::mc::{self, Boundary, TrialConfig};
use crate::params::{ExactRational, PhysicalParams, SystemParams};
use crate::solve::{self, QualityTarget};
use crate::varying::OnProbability;

/// Environment variable capping simulation parallelism.
pub const THREADS_ENV: &str = "MANETQ_THREADS";

#[derive(Parser)]
#[command(
    name = "manetq",
    about = "Connectivity and quality metrics for 1-D ad hoc networks with random node placement",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Evaluate one metric exactly or asymptotically
    Eval(EvalArgs),
    /// Reproduce the minimum-node design table
    Table(TableArgs),
    /// Emit (n, x, exact, asymptotic) rows for plotting
    Sweep(SweepArgs),
    /// Seeded Monte Carlo estimates of all metrics
    Simulate(SimulateArgs),
    /// Minimum node count for a quality target
    Solve(SolveArgs),
    /// Exact disconnected-boundary bounds from the periodic value
    Bounds(BoundsArgs),
}

#[derive(Args)]
struct EvalArgs {
    /// conn|coveredness|coverage|segmentation|vulnerability|reachability|disc:K
    #[arg(long)]
    metric: String,
    /// exact | asym
    #[arg(long, default_value = "exact")]
    mode: String,
    #[arg(long)]
    n: Option<u64>,
    /// Normalized range as `<int>/<int>` or decimal
    #[arg(long)]
    rho: Option<String>,
    /// Radio range (with --l, alternative to --rho)
    #[arg(long)]
    r: Option<String>,
    /// System length
    #[arg(long)]
    l: Option<String>,
    /// Evaluate directly at eta = n*rho - ln n (asym mode)
    #[arg(long)]
    eta: Option<f64>,
    /// Evaluate directly at nu = n*rho (asym mode)
    #[arg(long)]
    nu: Option<f64>,
    /// Coverage in d dimensions (asym mode, floating point)
    #[arg(long)]
    dim: Option<u32>,
    #[arg(long, default_value = "json")]
    format: String,
}

#[derive(Args)]
struct TableArgs {
    /// System length
    #[arg(long, default_value = "1000")]
    l: String,
    /// Comma-separated radio ranges
    #[arg(long, default_value = "30,10")]
    r: String,
    /// Comma-separated quality levels; segmentation and vulnerability rows
    /// use the complementary bound (level 0.9 means <= 0.1)
    #[arg(long, default_value = "0.9,0.99")]
    targets: String,
    #[arg(long, default_value = "json")]
    format: String,
}

#[derive(Args)]
struct SweepArgs {
    #[arg(long)]
    metric: String,
    /// Node counts: comma list or geometric `start..stop*factor`
    #[arg(long = "n-grid")]
    n_grid: String,
    /// nrho | eta
    #[arg(long = "x-axis", default_value = "nrho")]
    x_axis: String,
    /// X values: comma list or arithmetic `start..stop+step` (rational grammar)
    #[arg(long = "x-grid")]
    x_grid: String,
    /// Also emit the asymptotic value and error columns
    #[arg(long = "compare-asym")]
    compare_asym: bool,
    #[arg(long, default_value = "json")]
    format: String,
}

#[derive(Args)]
struct SimulateArgs {
    #[arg(long)]
    n: u64,
    #[arg(long)]
    rho: Option<String>,
    #[arg(long)]
    r: Option<String>,
    #[arg(long)]
    l: Option<String>,
    /// periodic | disconnected
    #[arg(long, default_value = "periodic")]
    boundary: String,
    #[arg(long, default_value_t = 100_000)]
    trials: u64,
    #[arg(long)]
    seed: u64,
    /// Varying-node mode: per-device on-probability (rational grammar)
    #[arg(long = "p-on")]
    p_on: Option<String>,
    /// Clip radio discs to [0, 1] for coverage instead of the circular convention
    #[arg(long = "coverage-clip")]
    coverage_clip: bool,
    #[arg(long, default_value = "json")]
    format: String,
}

#[derive(Args)]
struct SolveArgs {
    #[arg(long)]
    metric: String,
    #[arg(long)]
    target: f64,
    #[arg(long)]
    r: String,
    #[arg(long, default_value = "1000")]
    l: String,
    #[arg(long, default_value = "json")]
    format: String,
}

#[derive(Args)]
struct BoundsArgs {
    #[arg(long)]
    n: u64,
    #[arg(long)]
    rho: Option<String>,
    #[arg(long)]
    r: Option<String>,
    #[arg(long)]
    l: Option<String>,
    #[arg(long, default_value_t = 0)]
    k: u64,
    #[arg(long, default_value = "json")]
    format: String,
}

type Record = Map<String, Value>;

#[derive(Clone, Copy, PartialEq)]
enum Format {
    Json,
    Csv,
}

impl FromStr for Format {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "json" => Ok(Format::Json),
            "csv" => Ok(Format::Csv),
            other => Err(Error::Parse(format!("unknown format {other:?}"))),
        }
    }
}

/// Parse args, run, print. Returns the process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            // clap handles --help/--version as "errors" with success status.
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    match dispatch(cli) {
        Ok(output) => {
            print!("{output}");
            0
        }
        Err(e) => {
            eprintln!("error: {e}");
            match e {
                Error::Parse(_) => 1,
                Error::InvalidParameter(_) | Error::Domain(_) | Error::Regime(_) => 2,
                Error::Infeasible { .. } => 3,
            }
        }
    }
}

fn dispatch(cli: Cli) -> Result<String> {
    let (records, format) = match cli.command {
        Command::Eval(a) => (cmd_eval(&a)?, a.format.parse()?),
        Command::Table(a) => (cmd_table(&a)?, a.format.parse()?),
        Command::Sweep(a) => (cmd_sweep(&a)?, a.format.parse()?),
        Command::Simulate(a) => (cmd_simulate(&a)?, a.format.parse()?),
        Command::Solve(a) => (cmd_solve(&a)?, a.format.parse()?),
        Command::Bounds(a) => (cmd_bounds(&a)?, a.format.parse()?),
    };
    Ok(render(&records, format))
}

fn render(records: &[Record], format: Format) -> String {
    match format {
        Format::Json => {
            let mut out = String::new();
            for r in records {
                out.push_str(&serde_json::to_string(r).expect("record serializes"));
                out.push('\n');
            }
            out
        }
        Format::Csv => {
            let mut out = String::new();
            if let Some(first) = records.first() {
                let keys: Vec<&String> = first.keys().collect();
                out.push_str(&keys.iter().map(|k| k.as_str()).collect::<Vec<_>>().join(","));
                out.push('\n');
                for r in records {
                    let row: Vec<String> = keys.iter().map(|k| csv_cell(r.get(*k))).collect();
                    out.push_str(&row.join(","));
                    out.push('\n');
                }
            }
            out
        }
    }
}

fn csv_cell(v: Option<&Value>) -> String {
    match v {
        None | Some(Value::Null) => String::new(),
        Some(Value::String(s)) => s.clone(),
        // Numbers go through the same serializer as the JSON output, so both
        // formats carry identical digits.
        Some(other) => serde_json::to_string(other).expect("scalar serializes"),
    }
}

/// Render to 12 significant digits; presentation only.
fn decimal12(x: f64) -> String {
    if x == 0.0 {
        return "0".into();
    }
    if !x.is_finite() {
        return x.to_string();
    }
    let e = x.abs().log10().floor() as i32;
    if (-4..=11).contains(&e) {
        let prec = (11 - e).max(0) as usize;
        format!("{x:.prec$}")
    } else {
        format!("{x:.11e}")
    }
}

fn parse_rational(what: &str, s: &str) -> Result<ExactRational> {
    s.parse::<ExactRational>()
        .map_err(|_| Error::Parse(format!("--{what}: cannot parse {s:?} as <int>/<int> or decimal")))
}

/// Resolve `--rho` or the `--r/--l` pair into normalized params.
fn resolve_params(
    n: Option<u64>,
    rho: &Option<String>,
    r: &Option<String>,
    l: &Option<String>,
) -> Result<SystemParams> {
    let n = n.ok_or_else(|| Error::Parse("--n is required here".into()))?;
    let rho = resolve_rho(rho, r, l)?;
    SystemParams::new(n, rho)
}

fn resolve_rho(rho: &Option<String>, r: &Option<String>, l: &Option<String>) -> Result<ExactRational> {
    match (rho, r, l) {
        (Some(rho), None, None) => parse_rational("rho", rho),
        (None, Some(r), Some(l)) => {
            let phys = PhysicalParams::new(parse_rational("r", r)?, parse_rational("l", l)?)?;
            Ok(phys.r() / phys.l())
        }
        (Some(_), Some(_), _) | (Some(_), _, Some(_)) => {
            Err(Error::Parse("give either --rho or the --r/--l pair, not both".into()))
        }
        _ => Err(Error::Parse("give --rho, or --r together with --l".into())),
    }
}

fn base_record(command: &str) -> Record {
    let mut r = Record::new();
    r.insert("command".into(), json!(command));
    r
}

fn insert_exact(record: &mut Record, key: &str, value: &ExactRational) {
    record.insert(key.into(), json!(value.to_string()));
    record.insert(format!("{key}_decimal"), json!(decimal12(value.to_f64())));
}

// ---------------------------------------------------------------------------
// eval

fn cmd_eval(a: &EvalArgs) -> Result<Vec<Record>> {
    let kind: MetricKind = a.metric.parse()?;
    let mut record = base_record("eval");
    record.insert("metric".into(), json!(kind.to_string()));
    record.insert("mode".into(), json!(a.mode.trim()));

    match a.mode.trim() {
        "exact" => {
            let params = resolve_params(a.n, &a.rho, &a.r, &a.l)?;
            record.insert("n".into(), json!(params.n()));
            record.insert("rho".into(), json!(params.rho().to_string()));
            let value = exact::metric(&params, kind)?;
            insert_exact(&mut record, "value", value.value());
            record.insert("provenance".into(), json!("exact"));
        }
        "asym" => {
            let value = eval_asym(a, kind, &mut record)?;
            record.insert("value".into(), json!(value));
            record.insert("provenance".into(), json!("asymptotic"));
        }
        other => return Err(Error::Parse(format!("unknown mode {other:?}; use exact or asym"))),
    }
    Ok(vec![record])
}

fn eval_asym(a: &EvalArgs, kind: MetricKind, record: &mut Record) -> Result<f64> {
    if let Some(dim) = a.dim {
        if kind != MetricKind::Coverage {
            return Err(Error::InvalidParameter("--dim applies to the coverage metric only".into()));
        }
        let params = resolve_params(a.n, &a.rho, &a.r, &a.l)?;
        record.insert("n".into(), json!(params.n()));
        record.insert("rho".into(), json!(params.rho().to_string()));
        record.insert("dim".into(), json!(dim));
        return exact::coverage_ddim(params.n(), params.rho().to_f64(), dim);
    }
    match (a.eta, a.nu) {
        (Some(eta), None) => {
            record.insert("eta".into(), json!(eta));
            asym::metric(kind, Regime::Eta(eta))
        }
        (None, Some(nu)) => {
            record.insert("nu".into(), json!(nu));
            asym::metric(kind, Regime::Nu(nu))
        }
        (Some(_), Some(_)) => Err(Error::Parse("give --eta or --nu, not both".into())),
        (None, None) => {
            // Derive the regime from (n, rho) according to the metric's
            // scaling class; coveredness goes through connectedness at
            // doubled range.
            let params = resolve_params(a.n, &a.rho, &a.r, &a.l)?;
            record.insert("n".into(), json!(params.n()));
            record.insert("rho".into(), json!(params.rho().to_string()));
            if kind == MetricKind::Coveredness {
                let eta2 = asym::eta_from_params(&params.with_doubled_rho());
                record.insert("eta".into(), json!(eta2));
                return Ok(asym::connectedness(eta2));
            }
            if kind.is_intensive() {
                let nu = asym::nu_from_params(&params);
                record.insert("nu".into(), json!(nu));
                asym::metric(kind, Regime::Nu(nu))
            } else {
                let eta = asym::eta_from_params(&params);
                record.insert("eta".into(), json!(eta));
                asym::metric(kind, Regime::Eta(eta))
            }
        }
    }
}

// ---------------------------------------------------------------------------
// table

fn cmd_table(a: &TableArgs) -> Result<Vec<Record>> {
    let l = parse_rational("l", &a.l)?;
    let radii: Vec<ExactRational> = a
        .r
        .split(',')
        .map(|s| parse_rational("r", s))
        .collect::<Result<_>>()?;
    let targets: Vec<f64> = a
        .targets
        .split(',')
        .map(|s| {
            s.trim()
                .parse::<f64>()
                .map_err(|_| Error::Parse(format!("--targets: bad level {s:?}")))
        })
        .collect::<Result<_>>()?;
    if radii.is_empty() || targets.is_empty() {
        return Err(Error::Parse("--r and --targets must be non-empty".into()));
    }

    let mut records = Vec::new();
    for &level in &targets {
        for kind in MetricKind::QUALITY_FIVE {
            for r in &radii {
                let threshold = match kind {
                    MetricKind::Segmentation | MetricKind::Vulnerability => 1.0 - level,
                    _ => level,
                };
                let target = QualityTarget::new(kind, threshold)?;
                let phys = PhysicalParams::new(r.clone(), l.clone())?;
                let solved = solve::min_nodes(&target, &phys)?;
                let mut record = base_record("table");
                record.insert("metric".into(), json!(kind.to_string()));
                record.insert("level".into(), json!(level));
                record.insert("threshold".into(), json!(threshold));
                record.insert("r".into(), json!(r.to_string()));
                record.insert("l".into(), json!(l.to_string()));
                record.insert("n_min".into(), json!(solved.n_min));
                record.insert("auxiliary".into(), json!(solved.auxiliary));
                record.insert("achieved".into(), json!(solved.achieved));
                record.insert("provenance".into(), json!("asymptotic"));
                records.push(record);
            }
        }
    }
    Ok(records)
}

// ---------------------------------------------------------------------------
// sweep

fn parse_n_grid(s: &str) -> Result<Vec<u64>> {
    let s = s.trim();
    if let Some((range, factor)) = s.split_once('*') {
        let (start, stop) = range
            .split_once("..")
            .ok_or_else(|| Error::Parse(format!("--n-grid: expected start..stop*factor in {s:?}")))?;
        let start: u64 = start.trim().parse().map_err(|_| Error::Parse("--n-grid: bad start".into()))?;
        let stop: u64 = stop.trim().parse().map_err(|_| Error::Parse("--n-grid: bad stop".into()))?;
        let factor: u64 = factor.trim().parse().map_err(|_| Error::Parse("--n-grid: bad factor".into()))?;
        if start == 0 || factor < 2 || stop < start {
            return Err(Error::Parse("--n-grid: need start >= 1, factor >= 2, stop >= start".into()));
        }
        let mut grid = Vec::new();
        let mut n = start;
        while n <= stop {
            grid.push(n);
            match n.checked_mul(factor) {
                Some(next) => n = next,
                None => break,
            }
        }
        Ok(grid)
    } else {
        s.split(',')
            .map(|tok| {
                tok.trim()
                    .parse::<u64>()
                    .map_err(|_| Error::Parse(format!("--n-grid: bad node count {tok:?}")))
            })
            .collect()
    }
}

fn parse_x_grid(s: &str) -> Result<Vec<ExactRational>> {
    let s = s.trim();
    if let Some((range, step)) = s.split_once('+') {
        if let Some((start, stop)) = range.split_once("..") {
            let start = parse_rational("x-grid", start)?;
            let stop = parse_rational("x-grid", stop)?;
            let step = parse_rational("x-grid", step)?;
            if !step.is_positive() || stop < start {
                return Err(Error::Parse("--x-grid: need step > 0 and stop >= start".into()));
            }
            let mut grid = Vec::new();
            let mut x = start;
            while x <= stop {
                grid.push(x.clone());
                x = x + step.clone();
            }
            return Ok(grid);
        }
    }
    s.split(',').map(|tok| parse_rational("x-grid", tok)).collect()
}

fn cmd_sweep(a: &SweepArgs) -> Result<Vec<Record>> {
    let kind: MetricKind = a.metric.parse()?;
    let n_grid = parse_n_grid(&a.n_grid)?;
    let x_grid = parse_x_grid(&a.x_grid)?;
    let axis = a.x_axis.trim().to_ascii_lowercase();

    let mut records = Vec::new();
    for &n in &n_grid {
        for x in &x_grid {
            let rho = match axis.as_str() {
                // nrho: rho = x / n, exact.
                "nrho" => x / &ExactRational::from_int(n as i64),
                // eta: rho = (x + ln n) / n, rationalized at denominator 1e6
                // because ln n is irrational.
                "eta" => {
                    let rho_f = (x.to_f64() + (n as f64).ln()) / n as f64;
                    ExactRational::round_with_denominator(rho_f, 1_000_000)?
                }
                other => return Err(Error::Parse(format!("--x-axis: unknown axis {other:?}"))),
            };
            if !rho.is_positive() {
                return Err(Error::InvalidParameter(format!(
                    "sweep point n={n} x={x} yields non-positive rho"
                )));
            }
            let params = SystemParams::new(n, rho)?;
            let exact_value = exact::metric(&params, kind)?;

            let mut record = base_record("sweep");
            record.insert("metric".into(), json!(kind.to_string()));
            record.insert("n".into(), json!(n));
            record.insert("x".into(), json!(x.to_f64()));
            record.insert("rho".into(), json!(params.rho().to_string()));
            record.insert("exact".into(), json!(exact_value.to_f64()));
            record.insert("exact_rational".into(), json!(exact_value.to_string()));
            if a.compare_asym {
                let approx = sweep_asym_value(kind, &params)?;
                let abs_error = (exact_value.to_f64() - approx).abs();
                record.insert("asymptotic".into(), json!(approx));
                record.insert("abs_error".into(), json!(abs_error));
                let rel = if exact_value.value().is_zero() {
                    Value::Null
                } else {
                    json!(abs_error / exact_value.to_f64())
                };
                record.insert("rel_error".into(), rel);
            }
            records.push(record);
        }
    }
    Ok(records)
}

fn sweep_asym_value(kind: MetricKind, params: &SystemParams) -> Result<f64> {
    if kind == MetricKind::Coveredness {
        return Ok(asym::connectedness(asym::eta_from_params(&params.with_doubled_rho())));
    }
    if kind.is_intensive() {
        asym::metric(kind, Regime::Nu(asym::nu_from_params(params)))
    } else {
        asym::metric(kind, Regime::Eta(asym::eta_from_params(params)))
    }
}

// ---------------------------------------------------------------------------
// simulate

fn configure_threads() -> Result<()> {
    if let Ok(raw) = std::env::var(THREADS_ENV) {
        let threads: usize = raw
            .trim()
            .parse()
            .map_err(|_| Error::Parse(format!("{THREADS_ENV}={raw:?} is not a thread count")))?;
        if threads == 0 {
            return Err(Error::Parse(format!("{THREADS_ENV} must be >= 1")));
        }
        // Ignore AlreadyInitialized: tests may install their own pool.
        let _ = rayon::ThreadPoolBuilder::new().num_threads(threads).build_global();
    }
    Ok(())
}

fn cmd_simulate(a: &SimulateArgs) -> Result<Vec<Record>> {
    configure_threads()?;
    let params = resolve_params(Some(a.n), &a.rho, &a.r, &a.l)?;
    let boundary: Boundary = a.boundary.parse()?;
    let mut config = TrialConfig::new(params, boundary, a.trials, a.seed)?;
    if let Some(p) = &a.p_on {
        config.on_probability = Some(OnProbability::new(parse_rational("p-on", p)?)?);
    }
    config.coverage_clip = a.coverage_clip;

    let estimates = mc::run(&config)?;
    let boundary_name = match boundary {
        Boundary::Periodic => "periodic",
        Boundary::Disconnected => "disconnected",
    };
    let mut records = Vec::new();
    for (kind, est) in &estimates {
        let mut record = base_record("simulate");
        record.insert("metric".into(), json!(kind.to_string()));
        record.insert("mean".into(), json!(est.mean));
        record.insert("stderr".into(), json!(est.stderr));
        record.insert("trials".into(), json!(est.trials));
        record.insert("seed".into(), json!(est.seed));
        record.insert("n".into(), json!(config.params.n()));
        record.insert("rho".into(), json!(config.params.rho().to_string()));
        record.insert("boundary".into(), json!(boundary_name));
        if let Some(p) = &config.on_probability {
            record.insert("p_on".into(), json!(p.value().to_string()));
        }
        record.insert("provenance".into(), json!("monte-carlo"));
        records.push(record);
    }
    Ok(records)
}

// ---------------------------------------------------------------------------
// solve / bounds

fn cmd_solve(a: &SolveArgs) -> Result<Vec<Record>> {
    let kind: MetricKind = a.metric.parse()?;
    let target = QualityTarget::new(kind, a.target)?;
    let phys = PhysicalParams::new(parse_rational("r", &a.r)?, parse_rational("l", &a.l)?)?;
    let solved = solve::min_nodes(&target, &phys)?;

    let mut record = base_record("solve");
    record.insert("metric".into(), json!(kind.to_string()));
    record.insert("target".into(), json!(a.target));
    record.insert(
        "direction".into(),
        json!(match target.direction {
            solve::Direction::AtLeast => "at-least",
            solve::Direction::AtMost => "at-most",
        }),
    );
    record.insert("r".into(), json!(phys.r().to_string()));
    record.insert("l".into(), json!(phys.l().to_string()));
    record.insert("n_min".into(), json!(solved.n_min));
    record.insert("auxiliary".into(), json!(solved.auxiliary));
    record.insert("achieved".into(), json!(solved.achieved));
    record.insert("provenance".into(), json!("asymptotic"));
    Ok(vec![record])
}

fn cmd_bounds(a: &BoundsArgs) -> Result<Vec<Record>> {
    let params = resolve_params(Some(a.n), &a.rho, &a.r, &a.l)?;
    let b = bounds::disconnection_bounds(&params, a.k)?;
    let width = bounds::width(&params)?;

    let mut record = base_record("bounds");
    record.insert("n".into(), json!(params.n()));
    record.insert("rho".into(), json!(params.rho().to_string()));
    record.insert("k".into(), json!(a.k));
    insert_exact(&mut record, "lower", b.lower.value());
    insert_exact(&mut record, "upper", b.upper.value());
    insert_exact(&mut record, "width", &width);
    record.insert("provenance".into(), json!("bounds"));
    Ok(vec![record])
}

#[cfg(test)]
mod tests {
    use super::*;

    fn eval_args(metric: &str, mode: &str) -> EvalArgs {
        EvalArgs {
            metric: metric.into(),
            mode: mode.into(),
            n: None,
            rho: None,
            r: None,
            l: None,
            eta: None,
            nu: None,
            dim: None,
            format: "json".into(),
        }
    }

    #[test]
    fn eval_exact_spec_example() {
        let mut a = eval_args("conn", "exact");
        a.n = Some(2);
        a.rho = Some("3/5".into());
        let records = cmd_eval(&a).unwrap();
        assert_eq!(records[0]["value"], json!("1/5"));
        assert_eq!(records[0]["value_decimal"], json!("0.200000000000"));
        assert_eq!(records[0]["provenance"], json!("exact"));
    }

    #[test]
    fn eval_coverage_half_rho() {
        let mut a = eval_args("coverage", "exact");
        a.n = Some(7);
        a.rho = Some("1/2".into());
        let records = cmd_eval(&a).unwrap();
        assert_eq!(records[0]["value"], json!("1/1"));
    }

    #[test]
    fn eval_asym_eta_zero() {
        let mut a = eval_args("conn", "asym");
        a.eta = Some(0.0);
        let records = cmd_eval(&a).unwrap();
        let v = records[0]["value"].as_f64().unwrap();
        assert!((v - 0.36787944117144233).abs() < 1e-15);
    }

    #[test]
    fn eval_asym_coveredness_uses_doubled_rho() {
        let mut a = eval_args("coveredness", "asym");
        a.n = Some(100);
        a.rho = Some("1/20".into());
        let records = cmd_eval(&a).unwrap();
        let eta = records[0]["eta"].as_f64().unwrap();
        assert!((eta - (10.0 - 100f64.ln())).abs() < 1e-12);
        // Direct eta input is rejected for coveredness.
        let mut a = eval_args("coveredness", "asym");
        a.eta = Some(1.0);
        assert!(cmd_eval(&a).is_err());
    }

    #[test]
    fn eval_dim_routes_to_ddim_coverage() {
        let mut a = eval_args("coverage", "asym");
        a.n = Some(2);
        a.rho = Some("1/4".into());
        a.dim = Some(1);
        let records = cmd_eval(&a).unwrap();
        assert!((records[0]["value"].as_f64().unwrap() - 0.75).abs() < 1e-12);
        a.dim = Some(4);
        assert!(cmd_eval(&a).is_err());
    }

    #[test]
    fn rho_and_physical_pair_are_exclusive() {
        let mut a = eval_args("conn", "exact");
        a.n = Some(2);
        a.rho = Some("1/2".into());
        a.r = Some("30".into());
        a.l = Some("1000".into());
        assert!(matches!(cmd_eval(&a), Err(Error::Parse(_))));
    }

    #[test]
    fn table_defaults_reproduce_paper_values() {
        let a = TableArgs {
            l: "1000".into(),
            r: "30,10".into(),
            targets: "0.9,0.99".into(),
            format: "json".into(),
        };
        let records = cmd_table(&a).unwrap();
        let got: Vec<u64> = records.iter().map(|r| r["n_min"].as_u64().unwrap()).collect();
        let expected = [
            261u64, 906, 39, 116, 77, 231, 102, 304, 173, 650, 349, 1167, 77, 231, 154, 461, 209,
            627, 226, 804,
        ];
        assert_eq!(got, expected);
    }

    #[test]
    fn table_single_column() {
        let a = TableArgs {
            l: "1000".into(),
            r: "30".into(),
            targets: "0.9".into(),
            format: "json".into(),
        };
        let got: Vec<u64> = cmd_table(&a)
            .unwrap()
            .iter()
            .map(|r| r["n_min"].as_u64().unwrap())
            .collect();
        assert_eq!(got, [261, 39, 77, 102, 173]);
    }

    #[test]
    fn grid_parsers() {
        assert_eq!(parse_n_grid("16..128*2").unwrap(), vec![16, 32, 64, 128]);
        assert_eq!(parse_n_grid("5,7,11").unwrap(), vec![5, 7, 11]);
        assert!(parse_n_grid("0..8*2").is_err());
        let xs = parse_x_grid("-2..4+2").unwrap();
        assert_eq!(xs.len(), 4);
        assert_eq!(xs[0], ExactRational::from_int(-2));
        assert_eq!(xs[3], ExactRational::from_int(4));
        assert_eq!(parse_x_grid("1/5,0.3").unwrap().len(), 2);
    }

    #[test]
    fn sweep_single_point_matches_exact() {
        let a = SweepArgs {
            metric: "conn".into(),
            n_grid: "2".into(),
            x_axis: "nrho".into(),
            x_grid: "1.2".into(),
            compare_asym: false,
            format: "json".into(),
        };
        let records = cmd_sweep(&a).unwrap();
        assert_eq!(records[0]["exact_rational"], json!("1/5"));
        assert_eq!(records[0]["rho"], json!("3/5"));
    }

    #[test]
    fn sweep_error_columns_behave() {
        let a = SweepArgs {
            metric: "conn".into(),
            n_grid: "64..512*2".into(),
            x_axis: "eta".into(),
            x_grid: "0..2+1".into(),
            compare_asym: true,
            format: "json".into(),
        };
        let records = cmd_sweep(&a).unwrap();
        for r in &records {
            assert!(r["abs_error"].as_f64().unwrap() >= 0.0);
        }
        // At fixed eta >= 0, error decreases in n.
        for x_idx in 0..3 {
            let errs: Vec<f64> = records
                .iter()
                .filter(|r| (r["x"].as_f64().unwrap() - x_idx as f64).abs() < 1e-9)
                .map(|r| r["abs_error"].as_f64().unwrap())
                .collect();
            assert_eq!(errs.len(), 4);
            assert!(errs.windows(2).all(|w| w[1] < w[0]), "eta={x_idx}: {errs:?}");
        }
    }

    #[test]
    fn sweep_coverage_approaches_limit() {
        let a = SweepArgs {
            metric: "coverage".into(),
            n_grid: "16..1024*4".into(),
            x_axis: "nrho".into(),
            x_grid: "1".into(),
            compare_asym: false,
            format: "json".into(),
        };
        let records = cmd_sweep(&a).unwrap();
        let last = records.last().unwrap()["exact"].as_f64().unwrap();
        assert!((last - (1.0 - (-2.0f64).exp())).abs() < 2e-3, "got {last}");
    }

    #[test]
    fn bounds_spec_example() {
        let a = BoundsArgs {
            n: 2,
            rho: Some("1/4".into()),
            r: None,
            l: None,
            k: 0,
            format: "json".into(),
        };
        let records = cmd_bounds(&a).unwrap();
        assert_eq!(records[0]["lower"], json!("0/1"));
        assert_eq!(records[0]["upper"], json!("15/16"));
    }

    #[test]
    fn solve_exit_paths() {
        let a = SolveArgs {
            metric: "connectedness".into(),
            target: 0.9,
            r: "30".into(),
            l: "1000".into(),
            format: "json".into(),
        };
        let records = cmd_solve(&a).unwrap();
        assert_eq!(records[0]["n_min"], json!(261));

        let a = SolveArgs {
            metric: "vulnerability".into(),
            target: 0.9,
            r: "30".into(),
            l: "1000".into(),
            format: "json".into(),
        };
        assert!(matches!(cmd_solve(&a), Err(Error::Infeasible { .. })));
    }

    #[test]
    fn csv_and_json_carry_identical_numbers() {
        let a = TableArgs {
            l: "1000".into(),
            r: "30".into(),
            targets: "0.9".into(),
            format: "json".into(),
        };
        let records = cmd_table(&a).unwrap();
        let json_out = render(&records, Format::Json);
        let csv_out = render(&records, Format::Csv);

        let json_rows: Vec<Value> = json_out
            .lines()
            .map(|l| serde_json::from_str(l).unwrap())
            .collect();
        let mut csv_lines = csv_out.lines();
        let header: Vec<&str> = csv_lines.next().unwrap().split(',').collect();
        for (row, json_row) in csv_lines.zip(&json_rows) {
            for (key, cell) in header.iter().zip(row.split(',')) {
                match &json_row[*key] {
                    Value::Number(n) => {
                        assert_eq!(cell.parse::<f64>().unwrap(), n.as_f64().unwrap(), "{key}")
                    }
                    Value::String(s) => assert_eq!(cell, s, "{key}"),
                    other => panic!("unexpected value {other:?}"),
                }
            }
        }
    }

    #[test]
    fn decimal12_rendering() {
        assert_eq!(decimal12(0.2), "0.200000000000");
        assert_eq!(decimal12(1.0), "1.00000000000");
        assert_eq!(decimal12(0.9375), "0.937500000000");
        assert_eq!(decimal12(0.0), "0");
        assert_eq!(decimal12(1.5e-20), "1.50000000000e-20");
    }

    #[test]
    fn rational_outputs_reparse() {
        let mut a = eval_args("seg", "exact");
        a.n = Some(3);
        a.rho = Some("0.5".into());
        let records = cmd_eval(&a).unwrap();
        let v = records[0]["value"].as_str().unwrap();
        assert_eq!(v.parse::<ExactRational>().unwrap(), ExactRational::ratio(1, 4));
    }
}
