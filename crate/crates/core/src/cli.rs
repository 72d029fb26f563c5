//! Command-line front end.
//!
//! Exit status is 0 on success, 1 for invalid input and 2 when a computation
//! fails to converge or a result violates one of the bounds it must satisfy.

use std::ffi::OsString;
use std::fmt::Write as _;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use serde_json::{json, Value};

use crate::bounds::{self, entry, BoundReport};
use crate::error::{Error, Result};
use crate::fock::{NumberDistribution, ProbeState};
use crate::optimizer::{self, CostKind, CurveRow, DimPolicy, DEFAULT_MEAN_TOL};
use crate::phasedist::{canonical_distribution, PhaseDistribution, DEFAULT_ENTROPY_GRID};
use crate::povm::{self, EstimatePOM};

pub const SCHEMA: &str = "phaselimit/1";
pub const CURVE_COLUMNS: [&str; 9] = [
    "mean",
    "dim",
    "lambda",
    "cost",
    "delta",
    "product",
    "tail_mass",
    "residual",
    "iterations",
];
/// Slack below `k_C` tolerated in optimizer products before flagging them.
pub const PRODUCT_FLOOR_TOL: f64 = 1e-6;
const THREADS_VAR: &str = "PHASELIMIT_THREADS";

#[derive(Debug, Parser)]
#[command(
    name = "phaselimit",
    version,
    about = "Phase-estimation limits: analytic bounds, minimum-error probes and measurement simulation",
    after_help = "Curve CSV columns, in order: mean,dim,lambda,cost,delta,product,tail_mass,residual,iterations \
(prefixed by kind when both kinds are requested). JSON output carries \"schema\": \"phaselimit/1\".\n\
Exit status: 0 success, 1 invalid input, 2 numerical failure or violated bound.\n\
PHASELIMIT_THREADS caps the number of worker threads."
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Print k_A, k_C and the first Airy zero z_A.
    Constants(OutputArgs),
    /// Evaluate the entropic bound chain for a state's canonical phase distribution.
    Bounds {
        #[command(flatten)]
        state: StateArgs,
        /// Fixed entropy quadrature grid (power of two, at least 64); refined
        /// automatically from the default when omitted.
        #[arg(long)]
        grid: Option<usize>,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Minimum-error probe at one mean number.
    Optimize {
        /// Target mean number.
        #[arg(long)]
        mean: f64,
        #[arg(long, value_enum, default_value_t = KindArg::Exact)]
        kind: KindArg,
        #[command(flatten)]
        solver: SolverArgs,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Minimum (mean+1)·δ over a list of means.
    Curve {
        /// Comma-separated, strictly ascending means.
        #[arg(long, value_delimiter = ',', required = true)]
        means: Vec<f64>,
        /// Cost to minimize; both curves when omitted.
        #[arg(long, value_enum)]
        kind: Option<KindArg>,
        #[command(flatten)]
        solver: SolverArgs,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Phase-averaged error distribution of a measurement applied to a state.
    Simulate {
        /// Measurement as JSON: {"outcomes": [{"estimate": x, "element": [[[re, im], ...], ...]}]}.
        #[arg(long)]
        povm: PathBuf,
        #[command(flatten)]
        state: StateArgs,
        /// Fixed entropy quadrature grid; refined automatically when omitted.
        #[arg(long)]
        grid: Option<usize>,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Perfect discrimination of K equally spaced phases.
    Discriminate {
        #[arg(long = "K", short = 'K')]
        k: usize,
        #[command(flatten)]
        output: OutputArgs,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum KindArg {
    Exact,
    Surrogate,
}

impl From<KindArg> for CostKind {
    fn from(k: KindArg) -> Self {
        match k {
            KindArg::Exact => CostKind::ExactSquare,
            KindArg::Surrogate => CostKind::Surrogate,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
    Table,
}

#[derive(Debug, Args)]
pub struct OutputArgs {
    /// Output format; curves default to csv, everything else to table.
    #[arg(long, value_enum)]
    format: Option<Format>,
    /// Write to this file (atomically) instead of standard output.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct StateArgs {
    /// A JSON file, inline JSON amplitudes (`[0.6, 0.8]` or `[[re, im], ...]`)
    /// or `random:DIM`.
    #[arg(long)]
    state: String,
    /// Seed for `random:DIM` states.
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

#[derive(Debug, Args)]
pub struct SolverArgs {
    /// Starting truncation dimension; doubled until the tail is negligible.
    #[arg(long)]
    dim: Option<usize>,
    /// Relative tolerance on the achieved mean.
    #[arg(long, default_value_t = DEFAULT_MEAN_TOL)]
    mean_tol: f64,
}

impl SolverArgs {
    fn policy(&self) -> Result<DimPolicy> {
        match self.dim {
            Some(0) => Err(Error::InvalidArgument("--dim must be positive".into())),
            Some(d) => Ok(DimPolicy::starting_at(d)),
            None => Ok(DimPolicy::auto()),
        }
    }
}

/// A finished command: text to emit plus any bound violations found.
struct Rendered {
    text: String,
    violations: Vec<String>,
}

/// Parses `args` (including the program name) and runs the command.
/// Returns the process exit status.
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) if e.use_stderr() => {
            let _ = write!(stderr, "{}", e.render());
            return 1;
        }
        Err(e) => {
            let _ = write!(stdout, "{}", e.render());
            return 0;
        }
    };
    if let Err(e) = configure_threads() {
        let _ = writeln!(stderr, "error: {e}");
        return 1;
    }
    let (out, result) = match cli.command {
        Command::Constants(ref o) => (o, constants(o.format)),
        Command::Bounds { ref state, grid, ref output } => (output, bounds_cmd(state, grid, output.format)),
        Command::Optimize { mean, kind, ref solver, ref output } => {
            (output, optimize_cmd(mean, kind.into(), solver, output.format))
        }
        Command::Curve { ref means, kind, ref solver, ref output } => {
            (output, curve_cmd(means, kind, solver, output.format))
        }
        Command::Simulate { ref povm, ref state, grid, ref output } => {
            (output, simulate_cmd(povm, state, grid, output.format))
        }
        Command::Discriminate { k, ref output } => (output, discriminate_cmd(k, output.format)),
    };
    let rendered = match result {
        Ok(r) => r,
        Err(e) => {
            let _ = writeln!(stderr, "error: {e}");
            return if e.is_numerical() { 2 } else { 1 };
        }
    };
    if let Err(e) = emit(&rendered.text, out.out.as_deref(), stdout) {
        let _ = writeln!(stderr, "error: {e}");
        return 1;
    }
    if rendered.violations.is_empty() {
        0
    } else {
        for v in &rendered.violations {
            let _ = writeln!(stderr, "BOUND VIOLATION: {v}");
        }
        2
    }
}

fn configure_threads() -> Result<()> {
    let Ok(value) = std::env::var(THREADS_VAR) else {
        return Ok(());
    };
    let threads: usize = value
        .trim()
        .parse()
        .ok()
        .filter(|&n| n > 0)
        .ok_or_else(|| Error::InvalidArgument(format!("{THREADS_VAR} must be a positive integer, got {value:?}")))?;
    // A second call in the same process (tests) finds the pool already built.
    let _ = rayon::ThreadPoolBuilder::new().num_threads(threads).build_global();
    Ok(())
}

fn emit(text: &str, out: Option<&Path>, stdout: &mut dyn Write) -> Result<()> {
    match out {
        None => {
            stdout.write_all(text.as_bytes())?;
            Ok(())
        }
        Some(path) => {
            let dir = match path.parent() {
                Some(p) if !p.as_os_str().is_empty() => p,
                _ => Path::new("."),
            };
            let mut tmp = tempfile::NamedTempFile::new_in(dir)?;
            tmp.write_all(text.as_bytes())?;
            tmp.as_file().sync_all()?;
            tmp.persist(path).map_err(|e| Error::Io(e.error))?;
            Ok(())
        }
    }
}

fn to_json<T: Serialize>(value: &T) -> Result<String> {
    Ok(serde_json::to_string_pretty(value)? + "\n")
}

fn csv_text(header: &[&str], rows: &[Vec<String>]) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    let fail = |e: csv::Error| Error::InvalidArgument(format!("csv output: {e}"));
    w.write_record(header).map_err(fail)?;
    for row in rows {
        w.write_record(row).map_err(fail)?;
    }
    let bytes = w.into_inner().map_err(|e| Error::InvalidArgument(format!("csv output: {e}")))?;
    Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
}

/// Loads a state from a JSON file, inline JSON, or `random:DIM`.
pub fn load_state(spec: &str, seed: u64) -> Result<ProbeState> {
    let spec = spec.trim();
    if let Some(dim) = spec.strip_prefix("random:") {
        let dim: usize = dim
            .parse()
            .map_err(|_| Error::InvalidArgument(format!("bad random state dimension {dim:?}")))?;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        return ProbeState::random(dim, &mut rng);
    }
    let text = if spec.starts_with('[') || spec.starts_with('{') {
        spec.to_string()
    } else {
        std::fs::read_to_string(spec)?
    };
    Ok(serde_json::from_str(&text)?)
}

fn constants(format: Option<Format>) -> Result<Rendered> {
    let k_a = bounds::k_a();
    let z_a = bounds::airy_first_zero()?;
    let k_c = bounds::k_c();
    let text = match format.unwrap_or(Format::Table) {
        Format::Table => format!("k_A = {k_a:.12}\nk_C = {k_c:.12}\nz_A = {z_a:.12}\n"),
        Format::Csv => format!("name,value\nk_A,{k_a:.12}\nk_C,{k_c:.12}\nz_A,{z_a:.12}\n"),
        Format::Json => to_json(&json!({"schema": SCHEMA, "k_A": k_a, "k_C": k_c, "z_A": z_a}))?,
    };
    Ok(Rendered {
        text,
        violations: vec![],
    })
}

fn hard_violations(report: &BoundReport) -> Vec<String> {
    report
        .entries
        .iter()
        .filter(|e| e.name != entry::THERMAL_SHARP && !e.satisfied)
        .map(|e| format!("{}: {} {} {} fails (margin {:e})", e.name, e.lhs, e.relation, e.rhs, e.margin))
        .collect()
}

fn report_on_grid(dist: &PhaseDistribution, numbers: &NumberDistribution, grid: Option<usize>) -> Result<BoundReport> {
    match grid {
        Some(g) => bounds::bound_report_with_grid(dist, numbers, g),
        None => bounds::bound_report(dist, numbers),
    }
}

fn report_rows(report: &BoundReport) -> Vec<Vec<String>> {
    report
        .entries
        .iter()
        .map(|e| {
            vec![
                e.name.clone(),
                num(e.lhs),
                e.relation.to_string(),
                num(e.rhs),
                num(e.margin),
                e.satisfied.to_string(),
            ]
        })
        .collect()
}

const REPORT_COLUMNS: [&str; 6] = ["name", "lhs", "relation", "rhs", "margin", "satisfied"];

fn bounds_cmd(state: &StateArgs, grid: Option<usize>, format: Option<Format>) -> Result<Rendered> {
    let s = load_state(&state.state, state.seed)?;
    let report = report_on_grid(&canonical_distribution(&s), &s.number_distribution(), grid)?;
    let text = match format.unwrap_or(Format::Table) {
        Format::Table => report.to_table(),
        Format::Csv => csv_text(&REPORT_COLUMNS, &report_rows(&report))?,
        Format::Json => to_json(&json!({
            "schema": SCHEMA,
            "dim": s.dim(),
            "report": report,
        }))?,
    };
    Ok(Rendered {
        violations: hard_violations(&report),
        text,
    })
}

fn product_violation(kind: CostKind, mean: f64, product: f64) -> Option<String> {
    let floor = bounds::k_c() - PRODUCT_FLOOR_TOL;
    (product < floor).then(|| format!("{kind} product {product} at mean {mean} is below k_C - {PRODUCT_FLOOR_TOL:e} = {floor}"))
}

/// Shortest round-trip text, switching to exponent form for very small or
/// very large magnitudes.
pub fn num(x: f64) -> String {
    if x == 0.0 || !x.is_finite() || (1e-4..1e15).contains(&x.abs()) {
        x.to_string()
    } else {
        format!("{x:e}")
    }
}

fn curve_row_strings(row: &CurveRow) -> Vec<String> {
    vec![
        num(row.mean),
        row.dim.to_string(),
        num(row.lambda),
        num(row.cost),
        num(row.delta),
        num(row.product),
        num(row.tail_mass),
        num(row.residual),
        row.iterations.to_string(),
    ]
}

fn optimize_cmd(mean: f64, kind: CostKind, solver: &SolverArgs, format: Option<Format>) -> Result<Rendered> {
    let r = optimizer::optimize_at_mean(kind, mean, &solver.policy()?, solver.mean_tol)?;
    let row = CurveRow::from(&r);
    let violations = product_violation(kind, mean, r.product()).into_iter().collect();
    let amplitudes: Vec<f64> = r.state.amplitudes().iter().map(|c| c.re).collect();
    let text = match format.unwrap_or(Format::Table) {
        Format::Csv => csv_text(&CURVE_COLUMNS, &[curve_row_strings(&row)])?,
        Format::Json => to_json(&json!({
            "schema": SCHEMA,
            "kind": kind,
            "target_mean": mean,
            "achieved_mean": r.achieved_mean,
            "eigenvalue": r.eigenvalue,
            "row": row,
            "amplitudes": amplitudes,
        }))?,
        Format::Table => {
            let mut t = String::new();
            let _ = writeln!(t, "kind          {kind}");
            let _ = writeln!(t, "target_mean   {mean}");
            let _ = writeln!(t, "achieved_mean {}", num(r.achieved_mean));
            for (name, value) in CURVE_COLUMNS.iter().zip(curve_row_strings(&row)).skip(1) {
                let _ = writeln!(t, "{name:<13} {value}");
            }
            t
        }
    };
    Ok(Rendered { text, violations })
}

fn curve_cmd(means: &[f64], kind: Option<KindArg>, solver: &SolverArgs, format: Option<Format>) -> Result<Rendered> {
    let kinds: Vec<CostKind> = match kind {
        Some(k) => vec![k.into()],
        None => vec![CostKind::ExactSquare, CostKind::Surrogate],
    };
    let policy = solver.policy()?;
    let mut curves = Vec::new();
    let mut violations = Vec::new();
    for &k in &kinds {
        let rows = optimizer::figure2_curve(k, means, &policy, solver.mean_tol)?;
        for row in &rows {
            violations.extend(product_violation(k, row.mean, row.product));
        }
        if k == CostKind::ExactSquare {
            for w in rows.windows(2) {
                if w[1].product > w[0].product + PRODUCT_FLOOR_TOL {
                    violations.push(format!(
                        "exact product increases from {} at mean {} to {} at mean {}",
                        w[0].product, w[0].mean, w[1].product, w[1].mean
                    ));
                }
            }
        }
        curves.push((k, rows));
    }
    let labeled = kinds.len() > 1;
    let text = match format.unwrap_or(Format::Csv) {
        Format::Csv | Format::Table => {
            let mut header: Vec<&str> = CURVE_COLUMNS.to_vec();
            if labeled {
                header.insert(0, "kind");
            }
            let rows: Vec<Vec<String>> = curves
                .iter()
                .flat_map(|(k, rows)| {
                    rows.iter().map(move |r| {
                        let mut v = curve_row_strings(r);
                        if labeled {
                            v.insert(0, k.name().to_string());
                        }
                        v
                    })
                })
                .collect();
            if format == Some(Format::Table) {
                table_text(&header, &rows)
            } else {
                csv_text(&header, &rows)?
            }
        }
        Format::Json => {
            let curves: Vec<Value> = curves
                .iter()
                .map(|(k, rows)| json!({"kind": k, "rows": rows}))
                .collect();
            to_json(&json!({"schema": SCHEMA, "k_C": bounds::k_c(), "curves": curves}))?
        }
    };
    Ok(Rendered { text, violations })
}

fn table_text(header: &[&str], rows: &[Vec<String>]) -> String {
    let widths: Vec<usize> = (0..header.len())
        .map(|i| rows.iter().map(|r| r[i].len()).chain([header[i].len()]).max().unwrap_or(0))
        .collect();
    let mut out = String::new();
    for line in std::iter::once(header.iter().map(|s| s.to_string()).collect::<Vec<_>>()).chain(rows.iter().cloned()) {
        let cells: Vec<String> = line.iter().zip(&widths).map(|(c, w)| format!("{c:>w$}")).collect();
        out += cells.join("  ").trim_end();
        out.push('\n');
    }
    out
}

/// Summary of an averaged error distribution and the bounds it must respect.
#[derive(Debug, Serialize)]
struct Simulation {
    schema: &'static str,
    dim: usize,
    outcomes: usize,
    mean_number: f64,
    moments: Vec<[f64; 2]>,
    mean_square_deviation: f64,
    delta: f64,
    holevo_variance: crate::phasedist::HolevoVariance,
    entropy: f64,
    ensemble_length: f64,
    heisenberg_bound: f64,
    heisenberg_margin: f64,
    /// Informational: the conjectured sharp bound need not hold at small means.
    conjectured_bound: f64,
    conjectured_margin: f64,
    /// Largest difference between the direct and covariant-seed moments.
    covariant_mismatch: f64,
    report: BoundReport,
}

fn simulate_cmd(povm_path: &Path, state: &StateArgs, grid: Option<usize>, format: Option<Format>) -> Result<Rendered> {
    let text = std::fs::read_to_string(povm_path)?;
    let pom: EstimatePOM = serde_json::from_str(&text)?;
    let s = load_state(&state.state, state.seed)?;
    let dist = povm::average_distribution(&pom, &s)?;
    let seed = povm::covariant_seed(&pom)?;
    let via_seed = povm::covariant_distribution(&seed, &s)?;
    let covariant_mismatch = max_moment_difference(&dist, &via_seed);
    let numbers = s.number_distribution();
    let report = report_on_grid(&dist, &numbers, grid)?;
    let nbar = numbers.mean();
    let msd = dist.mean_square_deviation();
    let delta = msd.sqrt();
    let heisenberg_bound = bounds::heisenberg_bound(nbar)?;
    let conjectured_bound = bounds::conjectured_bound(nbar)?;
    let entropy = match grid {
        Some(g) => dist.differential_entropy(g)?,
        None => dist.refined_entropy(DEFAULT_ENTROPY_GRID)?,
    };
    let sim = Simulation {
        schema: SCHEMA,
        dim: s.dim(),
        outcomes: pom.len(),
        mean_number: nbar,
        moments: dist.moments().iter().map(|m| [m.re, m.im]).collect(),
        mean_square_deviation: msd,
        delta,
        holevo_variance: dist.holevo_variance(),
        entropy,
        ensemble_length: entropy.exp(),
        heisenberg_bound,
        heisenberg_margin: delta - heisenberg_bound,
        conjectured_bound,
        conjectured_margin: delta - conjectured_bound,
        covariant_mismatch,
        report,
    };
    let mut violations = hard_violations(&sim.report);
    if !(sim.heisenberg_margin > 0.0) {
        violations.push(format!("delta {delta} does not exceed k_A/(mean+1) = {heisenberg_bound}"));
    }
    let text = match format.unwrap_or(Format::Table) {
        Format::Json => to_json(&sim)?,
        Format::Csv => csv_text(&REPORT_COLUMNS, &report_rows(&sim.report))?,
        Format::Table => {
            let mut t = String::new();
            let _ = writeln!(t, "outcomes              {}", sim.outcomes);
            let _ = writeln!(t, "mean_number           {}", num(sim.mean_number));
            let _ = writeln!(t, "mean_square_deviation {}", num(sim.mean_square_deviation));
            let _ = writeln!(t, "delta                 {}", num(sim.delta));
            let _ = writeln!(t, "holevo_variance       {}", sim.holevo_variance);
            let _ = writeln!(t, "entropy               {}", num(sim.entropy));
            let _ = writeln!(t, "ensemble_length       {}", num(sim.ensemble_length));
            let _ = writeln!(t, "heisenberg_bound      {} (margin {:e})", sim.heisenberg_bound, sim.heisenberg_margin);
            let _ = writeln!(t, "conjectured_bound     {} (margin {:e})", sim.conjectured_bound, sim.conjectured_margin);
            let _ = writeln!(t, "covariant_mismatch    {:e}", sim.covariant_mismatch);
            t + &sim.report.to_table()
        }
    };
    Ok(Rendered { text, violations })
}

pub(crate) fn max_moment_difference(a: &PhaseDistribution, b: &PhaseDistribution) -> f64 {
    let n = a.moments().len().max(b.moments().len());
    (0..n).map(|k| (a.moment(k) - b.moment(k)).norm()).fold(0.0, f64::max)
}

fn discriminate_cmd(k: usize, format: Option<Format>) -> Result<Rendered> {
    let demo = povm::kphase_construction(k)?;
    let averaged = povm::average_distribution(&demo.povm, &demo.state)?;
    let delta = averaged.mean_square_deviation().sqrt();
    let bound = bounds::heisenberg_bound(demo.mean_number)?;
    let gram_deviation = demo.gram_deviation();
    let mut violations = Vec::new();
    if gram_deviation > 1e-12 {
        violations.push(format!("Gram matrix deviates from identity by {gram_deviation:e}"));
    }
    if !(delta > bound) {
        violations.push(format!("averaged delta {delta} does not exceed k_A/(mean+1) = {bound}"));
    }
    let gram: Vec<Vec<[f64; 2]>> = demo
        .gram
        .row_iter()
        .map(|r| r.iter().map(|c| [c.re, c.im]).collect())
        .collect();
    let text = match format.unwrap_or(Format::Table) {
        Format::Json => to_json(&json!({
            "schema": SCHEMA,
            "K": k,
            "mean_number": demo.mean_number,
            "gram": gram,
            "gram_deviation": gram_deviation,
            "success_probabilities": demo.success_probabilities,
            "errors_at_special_phases": demo.errors_at_special_phases,
            "averaged_delta": delta,
            "heisenberg_bound": bound,
            "heisenberg_margin": delta - bound,
        }))?,
        Format::Csv => {
            let rows: Vec<Vec<String>> = (0..k)
                .map(|j| {
                    vec![
                        j.to_string(),
                        num(std::f64::consts::TAU * j as f64 / k as f64),
                        num(demo.success_probabilities[j]),
                        num(demo.errors_at_special_phases[j]),
                    ]
                })
                .collect();
            csv_text(&["index", "phase", "success_probability", "error"], &rows)?
        }
        Format::Table => {
            let mut t = String::new();
            let _ = writeln!(t, "K                   {k}");
            let _ = writeln!(t, "mean_number         {}", demo.mean_number);
            let _ = writeln!(t, "gram_deviation      {gram_deviation:e}");
            let min_success = demo.success_probabilities.iter().copied().fold(f64::INFINITY, f64::min);
            let max_error = demo.errors_at_special_phases.iter().copied().fold(0.0, f64::max);
            let _ = writeln!(t, "min_success         {min_success}");
            let _ = writeln!(t, "max_error_at_phases {max_error:e}");
            let _ = writeln!(t, "averaged_delta      {delta}");
            let _ = writeln!(t, "heisenberg_bound    {bound} (margin {:e})", delta - bound);
            t
        }
    };
    Ok(Rendered { text, violations })
}
