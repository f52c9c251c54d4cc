//! Command line front end: scheme generation, decoding plans, fidelity
//! curves, squeezing-cost minimization, subset sweeps, and the built-in
//! verification suite.
//!
//! Exit codes: 0 success, 1 usage or parameter error, 2 no-cloning
//! violation, 3 rank failure, 4 verification failure. Player labels in
//! flags and output are 1-based; library documents carry no labels.

use std::io::Write as _;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};
use rayon::prelude::*;
use serde::Serialize;

use cvqss::cost::{self, SqueezeCostResult};
use cvqss::decoder::{self, DecodeFrame, DisentanglingPlan, XiSystem};
use cvqss::fidelity;
use cvqss::gaussian;
use cvqss::matlib::{dot, Tolerance};
use cvqss::scheme::{self, SchemeDoc, SchemeView, ThresholdParams, ValidationReport};
use cvqss::verify::{self, FaultInjection};
use cvqss::{Error, Result};

/// Gap below which the two minimization routes count as agreeing.
const AGREEMENT_EPS: f64 = 1e-6;

#[derive(Parser)]
#[command(
    name = "cvqss",
    version,
    about = "Continuous-variable threshold secret sharing toolkit"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a random (k, n) scheme and report its validation
    Scheme {
        /// Threshold: collaborators needed to reconstruct
        #[arg(long)]
        k: usize,
        /// Shares dealt (k <= n <= 2k - 1)
        #[arg(long)]
        n: usize,
        /// RNG seed (the CVQSS_SEED environment variable overrides this)
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Write here instead of stdout (atomic replace)
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Build and verify a disentangling plan for collaborating players
    Decode {
        /// Scheme document produced by the scheme command
        #[arg(long)]
        scheme: PathBuf,
        /// Collaborating players, 1-based, comma separated
        #[arg(long, value_delimiter = ',', conflicts_with = "all_subsets")]
        subset: Option<Vec<usize>>,
        /// Plan every k-subset of the available players
        #[arg(long)]
        all_subsets: bool,
        /// Free parameter override (defaults to the squeezing-optimal value)
        #[arg(long, allow_negative_numbers = true)]
        gamma: Option<f64>,
        /// Write here instead of stdout (atomic replace)
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Tabulate replica fidelity against the squeezing parameter
    FidelityCurve {
        /// First-class noise weight (with --v; excludes --scheme)
        #[arg(long)]
        u: Option<f64>,
        /// Second-class noise weight (with --u; excludes --scheme)
        #[arg(long)]
        v: Option<f64>,
        /// Grid start:stop:step, endpoints inclusive
        #[arg(long, allow_hyphen_values = true)]
        r: String,
        /// Read the noise weights off a scheme and add simulated points
        #[arg(long)]
        scheme: Option<PathBuf>,
        /// Collaborating players, 1-based (with --scheme)
        #[arg(long, value_delimiter = ',')]
        subset: Option<Vec<usize>>,
        /// Secret mean "x,p" for the simulated points
        #[arg(long, default_value = "0,0", allow_hyphen_values = true)]
        amplitude: String,
        /// Output format
        #[arg(long, value_enum, default_value_t = Format::Json)]
        format: Format,
        /// Write here instead of stdout (atomic replace)
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Minimize total squeezing over the free parameter, two ways
    CostMin {
        /// Secret coefficient of the expanded transform
        #[arg(long, allow_negative_numbers = true)]
        alpha: f64,
        /// First-row noise coefficient of the expanded transform
        #[arg(long, allow_negative_numbers = true)]
        beta: f64,
        /// Also evaluate both groupings of the boundary-case closed form
        #[arg(long)]
        boundary_readings: bool,
        /// Write here instead of stdout (atomic replace)
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Fidelity and squeezing cost for every subset across a grid
    Sweep {
        /// Scheme document produced by the scheme command
        #[arg(long)]
        scheme: PathBuf,
        /// Grid start:stop:step, endpoints inclusive
        #[arg(long, allow_hyphen_values = true)]
        r: String,
        /// Secret mean "x,p"
        #[arg(long, default_value = "0,0", allow_hyphen_values = true)]
        amplitude: String,
        /// Output format
        #[arg(long, value_enum, default_value_t = Format::Json)]
        format: Format,
        /// Write here instead of stdout (atomic replace)
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Run the acceptance criteria and report pass/fail
    Verify {
        /// Machine-readable report
        #[arg(long)]
        json: bool,
        /// Corrupt one plan on purpose; the suite must catch it
        #[arg(long, value_enum)]
        inject_fault: Option<FaultArg>,
        /// Write here instead of stdout (atomic replace)
        #[arg(long)]
        output: Option<PathBuf>,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Clone, Copy, ValueEnum)]
enum FaultArg {
    /// Scale one entry of a plan's first passive stage
    PerturbZ,
}

fn main() {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(err) => {
            let code = match err.kind() {
                clap::error::ErrorKind::DisplayHelp | clap::error::ErrorKind::DisplayVersion => 0,
                _ => 1,
            };
            let _ = err.print();
            std::process::exit(code);
        }
    };
    match run(cli) {
        Ok(code) => std::process::exit(code),
        Err(err) => {
            eprintln!("error: {err}");
            std::process::exit(err.exit_code());
        }
    }
}

fn run(cli: Cli) -> Result<i32> {
    match cli.command {
        Command::Scheme { k, n, seed, output } => cmd_scheme(k, n, seed, output.as_deref()),
        Command::Decode { scheme, subset, all_subsets, gamma, output } => {
            cmd_decode(&scheme, subset, all_subsets, gamma, output.as_deref())
        }
        Command::FidelityCurve { u, v, r, scheme, subset, amplitude, format, output } => {
            cmd_fidelity_curve(u, v, &r, scheme.as_deref(), subset, &amplitude, format, output.as_deref())
        }
        Command::CostMin { alpha, beta, boundary_readings, output } => {
            cmd_cost_min(alpha, beta, boundary_readings, output.as_deref())
        }
        Command::Sweep { scheme, r, amplitude, format, output } => {
            cmd_sweep(&scheme, &r, &amplitude, format, output.as_deref())
        }
        Command::Verify { json, inject_fault, output } => {
            cmd_verify(json, inject_fault, output.as_deref())
        }
    }
}

fn invalid(context: String) -> Error {
    Error::InvalidParam { context }
}

fn resolve_seed(flag: u64) -> Result<u64> {
    match std::env::var("CVQSS_SEED") {
        Ok(raw) => raw.trim().parse::<u64>().map_err(|_| {
            invalid(format!("CVQSS_SEED must be a nonnegative integer, got {raw:?}"))
        }),
        Err(std::env::VarError::NotPresent) => Ok(flag),
        Err(err) => Err(invalid(format!("CVQSS_SEED: {err}"))),
    }
}

/// Prints to stdout, or replaces `output` atomically via a sibling
/// temporary file so readers never observe a partial document.
fn emit(output: Option<&Path>, contents: &str) -> Result<()> {
    let path = match output {
        None => {
            print!("{contents}");
            return Ok(());
        }
        Some(p) => p,
    };
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p,
        _ => Path::new("."),
    };
    let write = || -> std::io::Result<()> {
        let mut tmp = tempfile::NamedTempFile::new_in(dir)?;
        tmp.write_all(contents.as_bytes())?;
        tmp.as_file().sync_all()?;
        tmp.persist(path).map_err(|e| e.error)?;
        Ok(())
    };
    write().map_err(|e| invalid(format!("writing {}: {e}", path.display())))
}

fn to_pretty<T: Serialize>(value: &T) -> Result<String> {
    serde_json::to_string_pretty(value)
        .map(|mut s| {
            s.push('\n');
            s
        })
        .map_err(|e| invalid(format!("serializing output: {e}")))
}

fn load_scheme(path: &Path) -> Result<SchemeView> {
    let raw = std::fs::read_to_string(path)
        .map_err(|e| invalid(format!("reading {}: {e}", path.display())))?;
    let doc: SchemeDoc = serde_json::from_str(&raw)
        .map_err(|e| invalid(format!("{} is not a scheme document: {e}", path.display())))?;
    SchemeView::from_doc(&doc)
}

/// Converts 1-based player labels to 0-based share indices.
fn parse_players(labels: &[usize], n: usize) -> Result<Vec<usize>> {
    let mut indices = Vec::with_capacity(labels.len());
    for &p in labels {
        if p == 0 || p > n {
            return Err(invalid(format!(
                "player {p} out of range: players are numbered 1 to {n}"
            )));
        }
        if indices.contains(&(p - 1)) {
            return Err(invalid(format!("player {p} listed more than once")));
        }
        indices.push(p - 1);
    }
    Ok(indices)
}

fn parse_amplitude(spec: &str) -> Result<(f64, f64)> {
    let err = || invalid(format!("amplitude must be \"x,p\" with finite reals, got {spec:?}"));
    let parts: Vec<&str> = spec.split(',').collect();
    if parts.len() != 2 {
        return Err(err());
    }
    let x: f64 = parts[0].trim().parse().map_err(|_| err())?;
    let p: f64 = parts[1].trim().parse().map_err(|_| err())?;
    if !x.is_finite() || !p.is_finite() {
        return Err(err());
    }
    Ok((x, p))
}

/// Parses "start:stop:step" into an inclusive grid; the endpoint is kept
/// whenever it lands within half a step.
fn parse_grid(spec: &str) -> Result<Vec<f64>> {
    let err = || invalid(format!("grid must be start:stop:step with step > 0, got {spec:?}"));
    let parts: Vec<&str> = spec.split(':').collect();
    if parts.len() != 3 {
        return Err(err());
    }
    let mut nums = [0.0f64; 3];
    for (slot, part) in nums.iter_mut().zip(&parts) {
        *slot = part.trim().parse().map_err(|_| err())?;
    }
    let [start, stop, step] = nums;
    if !start.is_finite() || !stop.is_finite() || !step.is_finite() || step <= 0.0 || stop < start {
        return Err(err());
    }
    let count = ((stop - start) / step + 0.5).floor() as usize + 1;
    if count > 1_000_000 {
        return Err(invalid(format!("grid has {count} points, limit is 1000000")));
    }
    let mut grid: Vec<f64> = (0..count).map(|i| start + step * i as f64).collect();
    if let Some(last) = grid.last_mut() {
        // snap accumulated rounding at the endpoint, not a semantic shift
        if (*last - stop).abs() <= step * 1e-9 {
            *last = stop;
        }
    }
    Ok(grid)
}

/// All k-element subsets of `items`, lexicographic by position.
fn k_subsets_of(items: &[usize], k: usize) -> Vec<Vec<usize>> {
    let n = items.len();
    let mut out = Vec::new();
    if k == 0 || k > n {
        return out;
    }
    let mut idx: Vec<usize> = (0..k).collect();
    loop {
        out.push(idx.iter().map(|&i| items[i]).collect());
        let mut i = k;
        loop {
            if i == 0 {
                return out;
            }
            i -= 1;
            if idx[i] != i + n - k {
                idx[i] += 1;
                for j in i + 1..k {
                    idx[j] = idx[j - 1] + 1;
                }
                break;
            }
        }
    }
}

#[derive(Serialize)]
struct SchemeOut {
    k: usize,
    n: usize,
    seed: Option<u64>,
    rows: Vec<Vec<f64>>,
    validation: ValidationReport,
}

fn cmd_scheme(k: usize, n: usize, seed: u64, output: Option<&Path>) -> Result<i32> {
    let seed = resolve_seed(seed)?;
    let params = ThresholdParams::new(k, n)?;
    let view = scheme::random_encoding(params, seed)?;
    let validation = scheme::validate(view.encoding().matrix(), k, Tolerance::default())?;
    let doc = view.to_doc()?;
    let out = SchemeOut { k: doc.k, n: doc.n, seed: doc.seed, rows: doc.rows, validation };
    emit(output, &to_pretty(&out)?)?;
    Ok(0)
}

#[derive(Serialize)]
struct PlanVerification {
    reconstruction_residual: f64,
    orthogonality_defect: f64,
    secret_coefficient_residual: f64,
    first_noise_residual: f64,
    span_residual: f64,
}

#[derive(Serialize)]
struct DecodeEntry {
    collaborators: Vec<usize>,
    alpha: f64,
    beta: f64,
    gamma_free: f64,
    r1: f64,
    r2: f64,
    total_squeezing: f64,
    gamma0: f64,
    r_min: f64,
    plan: serde_json::Value,
    verification: PlanVerification,
}

fn realized_system(
    view: &SchemeView,
    collaborators: &[usize],
    gamma: Option<f64>,
) -> Result<(DisentanglingPlan, DecodeFrame, XiSystem)> {
    let tol = Tolerance::default();
    let (plan, fr) = decoder::plan_for(view, collaborators, gamma, tol)?;
    let sp = decoder::split(view.encoding(), collaborators)?;
    let xi = XiSystem::build(view.encoding().matrix(), sp.collaborators(), sp.complement(), plan.t())?;
    xi.validate_against(&fr.v)?;
    Ok((plan, fr, xi))
}

fn decode_entry(view: &SchemeView, collaborators: &[usize], gamma: Option<f64>) -> Result<DecodeEntry> {
    let (plan, fr, xi) = realized_system(view, collaborators, gamma)?;
    let opt = cost::minimize_gamma_analytic(fr.alpha, fr.beta)?;
    let secret_coefficient_residual = (xi.alpha(0) - 1.0).abs();
    let first_noise_residual = xi.beta(0).iter().fold(0.0f64, |m, x| m.max(x.abs()));
    let span_residual = (1..xi.k())
        .map(|i| dot(xi.zeta(i), &fr.v).abs())
        .fold(0.0, f64::max);
    let verification = PlanVerification {
        reconstruction_residual: plan.reconstruction_residual()?,
        orthogonality_defect: verify::plan_orthogonality_defect(&plan),
        secret_coefficient_residual,
        first_noise_residual,
        span_residual,
    };
    let plan_json: serde_json::Value = serde_json::from_str(&plan.to_json()?)
        .map_err(|e| invalid(format!("re-reading plan document: {e}")))?;
    let mut sorted = collaborators.to_vec();
    sorted.sort_unstable();
    Ok(DecodeEntry {
        collaborators: sorted.iter().map(|c| c + 1).collect(),
        alpha: fr.alpha,
        beta: fr.beta,
        gamma_free: plan.gamma_free(),
        r1: plan.r1(),
        r2: plan.r2(),
        total_squeezing: plan.total_squeezing(),
        gamma0: opt.gamma0,
        r_min: opt.r_min,
        plan: plan_json,
        verification,
    })
}

#[derive(Serialize)]
struct AllSubsetsOut {
    k: usize,
    n: usize,
    plans: Vec<DecodeEntry>,
}

fn cmd_decode(
    scheme_path: &Path,
    subset: Option<Vec<usize>>,
    all_subsets: bool,
    gamma: Option<f64>,
    output: Option<&Path>,
) -> Result<i32> {
    let view = load_scheme(scheme_path)?;
    let k = view.k();
    let n = view.n_available();
    match (subset, all_subsets) {
        (Some(labels), false) => {
            if labels.len() != k {
                return Err(Error::BadSubset {
                    context: format!("need exactly k = {k} players, got {}", labels.len()),
                });
            }
            let indices = parse_players(&labels, n)?;
            let entry = decode_entry(&view, &indices, gamma)?;
            emit(output, &to_pretty(&entry)?)?;
        }
        (None, true) => {
            let subsets = k_subsets_of(&view.available(), k);
            let mut plans = Vec::with_capacity(subsets.len());
            for s in &subsets {
                plans.push(decode_entry(&view, s, gamma)?);
            }
            emit(output, &to_pretty(&AllSubsetsOut { k, n, plans })?)?;
        }
        (None, false) => return Err(invalid("decode needs --subset or --all-subsets".into())),
        (Some(_), true) => {
            return Err(invalid("--subset conflicts with --all-subsets".into()));
        }
    }
    Ok(0)
}

#[derive(Serialize)]
struct CurvePoint {
    r: f64,
    f: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    f_sim: Option<f64>,
}

#[derive(Serialize)]
struct CurveOut {
    u: f64,
    v: f64,
    points: Vec<CurvePoint>,
}

#[allow(clippy::too_many_arguments)]
fn cmd_fidelity_curve(
    u: Option<f64>,
    v: Option<f64>,
    r: &str,
    scheme: Option<&Path>,
    subset: Option<Vec<usize>>,
    amplitude: &str,
    format: Format,
    output: Option<&Path>,
) -> Result<i32> {
    let grid = parse_grid(r)?;
    let (u, v, sim) = match (scheme, u, v) {
        (Some(path), None, None) => {
            let view = load_scheme(path)?;
            let labels = subset.ok_or_else(|| invalid("--scheme needs --subset".into()))?;
            if labels.len() != view.k() {
                return Err(Error::BadSubset {
                    context: format!("need exactly k = {} players, got {}", view.k(), labels.len()),
                });
            }
            let indices = parse_players(&labels, view.n_available())?;
            let amp = parse_amplitude(amplitude)?;
            // noise weights do not depend on the probe amplitude here
            let (_, _, xi) = realized_system(&view, &indices, None)?;
            let params = fidelity::degradation_params(&xi, 1.0)?;
            (params.u(), params.v(), Some((view, indices, amp)))
        }
        (None, Some(u), Some(v)) => (u, v, None),
        _ => return Err(invalid("pass either --u and --v, or --scheme with --subset".into())),
    };
    let curve = fidelity::fidelity_curve(u, v, &grid)?;
    let mut points = Vec::with_capacity(curve.len());
    for &(r_i, f) in &curve {
        let f_sim = match &sim {
            Some((view, indices, amp)) => {
                let (f_sim, _) =
                    fidelity::end_to_end_fidelity(view, indices, r_i.exp(), None, *amp, Tolerance::default())?;
                Some(f_sim)
            }
            None => None,
        };
        points.push(CurvePoint { r: r_i, f, f_sim });
    }
    let contents = match format {
        Format::Json => to_pretty(&CurveOut { u, v, points })?,
        Format::Csv => {
            let mut s = String::new();
            if sim.is_some() {
                s.push_str("r,f,f_sim\n");
                for p in &points {
                    s.push_str(&format!("{},{},{}\n", p.r, p.f, p.f_sim.unwrap_or(f64::NAN)));
                }
            } else {
                s.push_str("r,f\n");
                for p in &points {
                    s.push_str(&format!("{},{}\n", p.r, p.f));
                }
            }
            s
        }
    };
    emit(output, &contents)?;
    Ok(0)
}

#[derive(Serialize)]
struct BoundaryReadingsOut {
    kappa: f64,
    sqrt_reading: f64,
    product_reading: f64,
    matches_oracle: &'static str,
}

#[derive(Serialize)]
struct CostMinOut {
    alpha: f64,
    beta: f64,
    analytic: SqueezeCostResult,
    oracle: SqueezeCostResult,
    r_min_gap: f64,
    agreement: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    boundary_readings: Option<BoundaryReadingsOut>,
    #[serde(skip_serializing_if = "Option::is_none")]
    note: Option<String>,
}

fn cmd_cost_min(alpha: f64, beta: f64, readings: bool, output: Option<&Path>) -> Result<i32> {
    let analytic = cost::minimize_gamma_analytic(alpha, beta)?;
    let oracle = cost::minimize_gamma_oracle(alpha, beta)?;
    let r_min_gap = (analytic.r_min - oracle.r_min).abs();
    let agreement = r_min_gap <= AGREEMENT_EPS;
    let (boundary_readings, note) = if readings {
        match cost::boundary_case_readings(alpha, beta) {
            Ok(b) => {
                let kappa = cost::kappa(alpha, beta)?;
                let sqrt_hit = (b.sqrt_reading - oracle.r_min).abs() <= AGREEMENT_EPS;
                let product_hit = (b.product_reading - oracle.r_min).abs() <= AGREEMENT_EPS;
                let matches_oracle = match (sqrt_hit, product_hit) {
                    (true, true) => "both",
                    (true, false) => "sqrt",
                    (false, true) => "product",
                    (false, false) => "neither",
                };
                let note = match matches_oracle {
                    "sqrt" => Some(
                        "the grouping |ln(alpha sqrt(kappa))| matches the optimizer; \
                         |ln(kappa alpha)| does not"
                            .to_string(),
                    ),
                    "product" => Some(
                        "the grouping |ln(kappa alpha)| matches the optimizer; \
                         |ln(alpha sqrt(kappa))| does not"
                            .to_string(),
                    ),
                    "neither" => Some(
                        "neither grouping matches the optimizer; the minimum sits \
                         elsewhere for these parameters"
                            .to_string(),
                    ),
                    _ => None,
                };
                (
                    Some(BoundaryReadingsOut {
                        kappa,
                        sqrt_reading: b.sqrt_reading,
                        product_reading: b.product_reading,
                        matches_oracle,
                    }),
                    note,
                )
            }
            Err(e) => (None, Some(format!("boundary readings unavailable: {e}"))),
        }
    } else {
        (None, None)
    };
    let out = CostMinOut { alpha, beta, analytic, oracle, r_min_gap, agreement, boundary_readings, note };
    emit(output, &to_pretty(&out)?)?;
    Ok(0)
}

#[derive(Serialize)]
struct SweepRow {
    subset: Vec<usize>,
    r: f64,
    f_sim: f64,
    f_analytic: f64,
    r1: f64,
    r2: f64,
    total_squeezing: f64,
}

#[derive(Serialize)]
struct SweepOut {
    k: usize,
    n: usize,
    amplitude: [f64; 2],
    rows: Vec<SweepRow>,
}

fn cmd_sweep(
    scheme_path: &Path,
    r: &str,
    amplitude: &str,
    format: Format,
    output: Option<&Path>,
) -> Result<i32> {
    let view = load_scheme(scheme_path)?;
    let grid = parse_grid(r)?;
    let amp = parse_amplitude(amplitude)?;
    let subsets = k_subsets_of(&view.available(), view.k());
    let jobs: Vec<(usize, f64)> = subsets
        .iter()
        .enumerate()
        .flat_map(|(si, _)| grid.iter().map(move |&r_i| (si, r_i)))
        .collect();
    let rows: Result<Vec<SweepRow>> = jobs
        .par_iter()
        .map(|&(si, r_i)| {
            let subset = &subsets[si];
            let a = r_i.exp();
            let rep = decoder::replicate(&view, subset, amp, a, None, Tolerance::default())?;
            let f_sim = gaussian::overlap_with_coherent(&rep.replica, amp)?;
            let params = fidelity::degradation_params(&rep.xi, a)?;
            let f_analytic = fidelity::analytic_fidelity(&params);
            Ok(SweepRow {
                subset: subset.iter().map(|c| c + 1).collect(),
                r: r_i,
                f_sim,
                f_analytic,
                r1: rep.plan.r1(),
                r2: rep.plan.r2(),
                total_squeezing: rep.plan.total_squeezing(),
            })
        })
        .collect();
    let rows = rows?;
    let contents = match format {
        Format::Json => to_pretty(&SweepOut {
            k: view.k(),
            n: view.n_available(),
            amplitude: [amp.0, amp.1],
            rows,
        })?,
        Format::Csv => {
            let mut s = String::from("subset,r,f_sim,f_analytic,r1,r2,total_squeezing\n");
            for row in &rows {
                let subset = row
                    .subset
                    .iter()
                    .map(|c| c.to_string())
                    .collect::<Vec<_>>()
                    .join("+");
                s.push_str(&format!(
                    "{},{},{},{},{},{},{}\n",
                    subset, row.r, row.f_sim, row.f_analytic, row.r1, row.r2, row.total_squeezing
                ));
            }
            s
        }
    };
    emit(output, &contents)?;
    Ok(0)
}

#[derive(Serialize)]
struct VerifyOut {
    passed: bool,
    criteria: Vec<verify::CriterionResult>,
}

fn cmd_verify(json: bool, fault: Option<FaultArg>, output: Option<&Path>) -> Result<i32> {
    let fault = fault.map(|f| match f {
        FaultArg::PerturbZ => FaultInjection::PerturbZ,
    });
    let results = verify::run_all(fault);
    let passed = results.iter().all(|c| c.passed);
    let contents = if json {
        to_pretty(&VerifyOut { passed, criteria: results.clone() })?
    } else {
        let mut s = String::new();
        for c in &results {
            let status = if c.passed { "PASS" } else { "FAIL" };
            s.push_str(&format!("criterion {} {}: {} ({})\n", c.id, c.name, status, c.details));
        }
        s.push_str(if passed { "all criteria passed\n" } else { "verification FAILED\n" });
        s
    };
    emit(output, &contents)?;
    if let Some(first) = results.iter().find(|c| !c.passed) {
        eprintln!("verification failed at criterion {}: {}", first.id, first.name);
        return Ok(4);
    }
    Ok(0)
}
