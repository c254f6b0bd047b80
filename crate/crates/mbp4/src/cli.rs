//! Command-line frontend: code generation and inspection, single-shot
//! decoding, and Monte-Carlo sweeps.
//!
//! Exit codes: 0 success, 1 decode FAIL (single-shot mode), 2 usage error,
//! 3 I/O or validation error.

use std::fmt::Write as _;
use std::fs;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use crate::bp::{self, DecoderConfig, Domain, Mode, Schedule};
use crate::channel::ChannelPrior;
use crate::codes::{self, Code, CodeError};
use crate::pauli::PauliString;
use crate::sim::{self, PointRecord, StopRule};
use crate::verify;

#[derive(Parser)]
#[command(
    name = "mbp4",
    about = "Belief-propagation decoders with memory effects for quantum stabilizer codes",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate, load, or inspect check matrices.
    Code {
        #[command(subcommand)]
        action: CodeAction,
    },
    /// Decode a single error or syndrome.
    Decode(DecodeArgs),
    /// Monte-Carlo sweep over depolarizing rates.
    Simulate(SimulateArgs),
}

#[derive(Subcommand)]
enum CodeAction {
    /// Generate a built-in code family.
    Gen(GenArgs),
    /// Parse and validate a check-matrix file.
    Load { path: PathBuf },
    /// Print size, rank, and weight statistics of a code.
    Info { code: String },
}

#[derive(Args)]
struct GenArgs {
    /// five | surface | toric | bicycle
    #[arg(long)]
    family: Family,
    /// Lattice size for surface/toric.
    #[arg(long)]
    l: Option<usize>,
    /// Qubit count for bicycle.
    #[arg(long)]
    n: Option<usize>,
    /// Logical qubit count for bicycle.
    #[arg(long)]
    k_logical: Option<usize>,
    /// Stabilizer weight for bicycle.
    #[arg(long)]
    row_weight: Option<usize>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Output file (stdout when omitted).
    #[arg(short, long)]
    output: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum Family {
    Five,
    Surface,
    Toric,
    Bicycle,
}

#[derive(Clone, Copy, ValueEnum)]
enum ScheduleArg {
    Parallel,
    Serial,
    Grouped,
}

#[derive(Clone, Copy, ValueEnum)]
enum ModeArg {
    Mbp,
    NormalizedBp,
}

#[derive(Clone, Copy, ValueEnum)]
enum DomainArg {
    Log,
    Linear,
}

#[derive(Args, Clone)]
struct DecoderArgs {
    #[arg(long, default_value_t = 1.0)]
    alpha: f64,
    /// Descending alpha grid "start:end:step"; enables the adaptive decoder.
    #[arg(long)]
    alpha_grid: Option<String>,
    #[arg(long, default_value_t = 0.0)]
    beta: f64,
    #[arg(long, value_enum, default_value_t = ScheduleArg::Parallel)]
    schedule: ScheduleArg,
    #[arg(long, value_enum, default_value_t = ModeArg::Mbp)]
    mode: ModeArg,
    #[arg(long, default_value_t = 30)]
    tmax: usize,
    #[arg(long, default_value_t = 30.0)]
    clip: f64,
    /// Fixed initialization rate for the decoding prior.
    #[arg(long, alias = "fixed-init")]
    eps0: Option<f64>,
    #[arg(long, value_enum, default_value_t = DomainArg::Log)]
    domain: DomainArg,
}

#[derive(Args)]
struct DecodeArgs {
    /// Built-in alias (513, surface:L, toric:L, bicycle:N,K,k,seed) or a file
    /// path.
    #[arg(long)]
    code: String,
    /// Pauli error string, e.g. IIIYI (syndrome computed from it).
    #[arg(long)]
    error: Option<String>,
    /// Binary syndrome string, e.g. 1011.
    #[arg(long)]
    syndrome: Option<String>,
    /// Depolarizing rate for the decoding prior.
    #[arg(long)]
    eps: Option<f64>,
    #[command(flatten)]
    decoder: DecoderArgs,
    /// Write the per-iteration energy trace CSV here.
    #[arg(long)]
    trace: Option<PathBuf>,
}

#[derive(Args)]
struct SimulateArgs {
    #[arg(long)]
    code: String,
    /// Comma-separated depolarizing rates.
    #[arg(long)]
    eps_list: String,
    #[command(flatten)]
    decoder: DecoderArgs,
    /// Stop a point after this many logical error events.
    #[arg(long, default_value_t = 100)]
    events: u64,
    #[arg(long, default_value_t = 10_000_000)]
    max_trials: u64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Worker threads (defaults to the machine parallelism).
    #[arg(long)]
    threads: Option<usize>,
    /// Output base path; writes BASE.csv and BASE.json (stdout when omitted).
    #[arg(short, long)]
    output: Option<PathBuf>,
}

/// Classified CLI failure carrying its exit code.
enum CliError {
    Usage(String),
    Data(String),
}

impl CliError {
    fn code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Data(_) => 3,
        }
    }

    fn message(&self) -> &str {
        match self {
            CliError::Usage(m) | CliError::Data(m) => m,
        }
    }
}

impl From<CodeError> for CliError {
    fn from(e: CodeError) -> Self {
        match e {
            CodeError::BadParameter(_) => CliError::Usage(e.to_string()),
            other => CliError::Data(other.to_string()),
        }
    }
}

pub fn main() -> ! {
    let cli = Cli::parse();
    let code = match run(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {}", e.message());
            e.code()
        }
    };
    std::process::exit(code);
}

fn run(cli: Cli) -> Result<i32, CliError> {
    match cli.command {
        Command::Code { action } => run_code(action).map(|()| 0),
        Command::Decode(args) => run_decode(args),
        Command::Simulate(args) => run_simulate(args).map(|()| 0),
    }
}

/// Resolves a code alias or file path.
fn resolve_code(spec: &str) -> Result<Code, CliError> {
    let parse_usize = |s: &str, what: &str| {
        s.parse::<usize>()
            .map_err(|_| CliError::Usage(format!("bad {what} in code alias: {s:?}")))
    };
    if spec == "513" || spec == "five" {
        return Ok(codes::gen_five_qubit());
    }
    if let Some(l) = spec.strip_prefix("surface:") {
        return Ok(codes::gen_surface(parse_usize(l, "L")?)?);
    }
    if let Some(l) = spec.strip_prefix("toric:") {
        return Ok(codes::gen_toric(parse_usize(l, "L")?)?);
    }
    if let Some(rest) = spec.strip_prefix("bicycle:") {
        let parts: Vec<&str> = rest.split(',').collect();
        if parts.len() != 4 {
            return Err(CliError::Usage(format!(
                "bicycle alias must be bicycle:N,K,k,seed, got {spec:?}"
            )));
        }
        let n = parse_usize(parts[0], "N")?;
        let k = parse_usize(parts[1], "K")?;
        let w = parse_usize(parts[2], "row-weight")?;
        let seed = parts[3]
            .parse::<u64>()
            .map_err(|_| CliError::Usage(format!("bad seed in code alias: {:?}", parts[3])))?;
        return Ok(codes::gen_bicycle(n, k, w, seed)?);
    }
    Ok(codes::load_check_matrix(spec)?)
}

/// Lattice size of a code alias, when it has one (used for grouped sweeps).
fn lattice_size(spec: &str) -> Option<usize> {
    spec.strip_prefix("surface:")
        .or_else(|| spec.strip_prefix("toric:"))
        .and_then(|l| l.parse().ok())
}

fn build_config(args: &DecoderArgs, code_spec: &str, n: usize) -> Result<DecoderConfig, CliError> {
    let schedule = match args.schedule {
        ScheduleArg::Parallel => Schedule::Parallel,
        ScheduleArg::Serial => Schedule::Serial,
        ScheduleArg::Grouped => {
            let l = lattice_size(code_spec).ok_or_else(|| {
                CliError::Usage(
                    "the grouped schedule needs a lattice code alias (surface:L or toric:L)".into(),
                )
            })?;
            Schedule::GroupedSerial(codes::lattice_groups(l))
        }
    };
    let alpha_grid = match &args.alpha_grid {
        Some(s) => Some(bp::parse_alpha_grid(s).map_err(CliError::Usage)?),
        None => None,
    };
    let cfg = DecoderConfig {
        alpha: args.alpha,
        beta: args.beta,
        mode: match args.mode {
            ModeArg::Mbp => Mode::Mbp,
            ModeArg::NormalizedBp => Mode::NormalizedBp,
        },
        schedule,
        t_max: args.tmax,
        clip: args.clip,
        alpha_grid,
        fixed_eps0: args.eps0,
        domain: match args.domain {
            DomainArg::Log => Domain::Log,
            DomainArg::Linear => Domain::Linear,
        },
        trace: false,
    };
    cfg.validate(n).map_err(CliError::Usage)?;
    Ok(cfg)
}

fn run_code(action: CodeAction) -> Result<(), CliError> {
    match action {
        CodeAction::Gen(args) => {
            let code = match args.family {
                Family::Five => codes::gen_five_qubit(),
                Family::Surface => {
                    let l = args
                        .l
                        .ok_or(CliError::Usage("surface requires --l".into()))?;
                    codes::gen_surface(l)?
                }
                Family::Toric => {
                    let l = args.l.ok_or(CliError::Usage("toric requires --l".into()))?;
                    codes::gen_toric(l)?
                }
                Family::Bicycle => {
                    let (n, k, w) = match (args.n, args.k_logical, args.row_weight) {
                        (Some(n), Some(k), Some(w)) => (n, k, w),
                        _ => {
                            return Err(CliError::Usage(
                                "bicycle requires --n, --k-logical and --row-weight".into(),
                            ))
                        }
                    };
                    codes::gen_bicycle(n, k, w, args.seed)?
                }
            };
            let text = codes::write_check_matrix(&code);
            match args.output {
                Some(path) => fs::write(&path, text).map_err(|e| {
                    CliError::Data(format!("failed to write {}: {e}", path.display()))
                })?,
                None => print!("{text}"),
            }
            eprintln!(
                "generated {}: [[{}, {}{}]] with {} checks",
                code.label(),
                code.n(),
                code.k(),
                code.distance().map_or(String::new(), |d| format!(", {d}")),
                code.m()
            );
            Ok(())
        }
        CodeAction::Load { path } => {
            let code = codes::load_check_matrix(&path)?;
            println!(
                "ok: {} qubits, {} checks, rank {}, K = {}",
                code.n(),
                code.m(),
                code.rank(),
                code.k()
            );
            Ok(())
        }
        CodeAction::Info { code } => {
            let code = resolve_code(&code)?;
            print!("{}", info_report(&code));
            Ok(())
        }
    }
}

fn info_report(code: &Code) -> String {
    let mut out = String::new();
    let stats = |w: &[usize]| {
        let min = w.iter().min().copied().unwrap_or(0);
        let max = w.iter().max().copied().unwrap_or(0);
        let mean = w.iter().sum::<usize>() as f64 / w.len().max(1) as f64;
        format!("min {min} / mean {mean:.2} / max {max}")
    };
    let _ = writeln!(out, "code:        {}", code.label());
    let _ = writeln!(out, "qubits (N):  {}", code.n());
    let _ = writeln!(out, "checks (M):  {}", code.m());
    let _ = writeln!(out, "rank:        {}", code.rank());
    let _ = writeln!(out, "logical (K): {}", code.k());
    if let Some(d) = code.distance() {
        let _ = writeln!(out, "distance:    {d}");
    }
    let _ = writeln!(out, "row weight:  {}", stats(&code.checks().row_weights()));
    let _ = writeln!(out, "col weight:  {}", stats(&code.checks().column_weights()));
    out
}

fn run_decode(args: DecodeArgs) -> Result<i32, CliError> {
    let code = resolve_code(&args.code)?;
    let mut cfg = build_config(&args.decoder, &args.code, code.n())?;
    cfg.trace = args.trace.is_some();

    let (z, error) = match (&args.error, &args.syndrome) {
        (Some(e), None) => {
            let error: PauliString = e
                .parse()
                .map_err(|err| CliError::Usage(format!("bad error string: {err}")))?;
            if error.len() != code.n() {
                return Err(CliError::Usage(format!(
                    "error has {} qubits, code has {}",
                    error.len(),
                    code.n()
                )));
            }
            (code.syndrome(&error), Some(error))
        }
        (None, Some(s)) => {
            let bits: Result<Vec<bool>, _> = s
                .chars()
                .map(|c| match c {
                    '0' => Ok(false),
                    '1' => Ok(true),
                    other => Err(CliError::Usage(format!("bad syndrome bit {other:?}"))),
                })
                .collect();
            let bits = bits?;
            if bits.len() != code.m() {
                return Err(CliError::Usage(format!(
                    "syndrome has {} bits, code has {} checks",
                    bits.len(),
                    code.m()
                )));
            }
            (bits, None)
        }
        _ => {
            return Err(CliError::Usage(
                "exactly one of --error or --syndrome is required".into(),
            ))
        }
    };

    let eps = match (args.eps, cfg.fixed_eps0) {
        (Some(e), _) => e,
        (None, Some(e0)) => e0,
        (None, None) => return Err(CliError::Usage("--eps (or --eps0) is required".into())),
    };
    let prior_rate = cfg.fixed_eps0.unwrap_or(eps);
    let prior = ChannelPrior::depolarizing(code.n(), prior_rate)
        .map_err(|e| CliError::Usage(e.to_string()))?;

    let result = if cfg.alpha_grid.is_some() {
        bp::decode_adaptive(&code, &z, &prior, &cfg)
    } else {
        match cfg.domain {
            Domain::Log => bp::decode(&code, &z, &prior, &cfg),
            Domain::Linear => bp::decode_linear(&code, &z, &prior, &cfg),
        }
    };

    println!(
        "status:     {}",
        if result.converged() { "CONVERGE" } else { "FAIL" }
    );
    println!("estimate:   {}", result.estimate);
    println!("iterations: {}", result.iterations);
    println!("alpha:      {}", result.alpha_used);
    if let Some(error) = &error {
        let outcome = verify::classify(error, &result, &z, &code);
        println!("outcome:    {outcome:?}");
    }

    if let Some(path) = &args.trace {
        let mut csv = String::from("iter,j_s_bounded,j_s_mismatch\n");
        for row in result.energy_trace.as_deref().unwrap_or(&[]) {
            let _ = writeln!(csv, "{},{},{}", row.iter, row.j_s_bounded, row.j_s_mismatch);
        }
        fs::write(path, csv)
            .map_err(|e| CliError::Data(format!("failed to write {}: {e}", path.display())))?;
    }

    Ok(if result.converged() { 0 } else { 1 })
}

#[derive(Serialize)]
struct SweepOutput {
    meta: SweepMeta,
    points: Vec<PointRecord>,
}

#[derive(Serialize)]
struct SweepMeta {
    seed: u64,
    events: u64,
    max_trials: u64,
    eps0: Option<f64>,
    domain: String,
    /// Wall time; the only non-reproducible field.
    elapsed_secs: f64,
}

fn run_simulate(args: SimulateArgs) -> Result<(), CliError> {
    if let Some(threads) = args.threads {
        rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build_global()
            .map_err(|e| CliError::Usage(format!("thread pool: {e}")))?;
    }
    let code = resolve_code(&args.code)?;
    let cfg = build_config(&args.decoder, &args.code, code.n())?;
    let eps_list: Result<Vec<f64>, _> = args
        .eps_list
        .split(',')
        .map(|t| {
            t.trim()
                .parse::<f64>()
                .map_err(|_| CliError::Usage(format!("bad eps value {t:?}")))
        })
        .collect();
    let eps_list = eps_list?;
    if eps_list.is_empty() {
        return Err(CliError::Usage("--eps-list must name at least one rate".into()));
    }
    let stop = StopRule { min_events: args.events, max_trials: args.max_trials };
    stop.validate().map_err(CliError::Usage)?;

    let started = std::time::Instant::now();
    let mut points = Vec::new();
    for &eps in &eps_list {
        let stats = sim::run_point(&code, &cfg, eps, &stop, args.seed)
            .map_err(|e| CliError::Usage(e.to_string()))?;
        let record = PointRecord::new(&code, &cfg, eps, &stats);
        eprintln!(
            "eps {eps}: {} trials, rate {:.3e} [{:.3e}, {:.3e}], tau {:.2}",
            record.n_tot, record.rate, record.ci_lo, record.ci_hi, record.tau_all
        );
        points.push(record);
    }

    let mut csv = String::from(PointRecord::CSV_HEADER);
    csv.push('\n');
    for p in &points {
        csv.push_str(&p.csv_row());
        csv.push('\n');
    }

    match &args.output {
        None => print!("{csv}"),
        Some(base) => {
            let csv_path = base.with_extension("csv");
            let json_path = base.with_extension("json");
            let output = SweepOutput {
                meta: SweepMeta {
                    seed: args.seed,
                    events: args.events,
                    max_trials: args.max_trials,
                    eps0: cfg.fixed_eps0,
                    domain: match cfg.domain {
                        Domain::Log => "log".into(),
                        Domain::Linear => "linear".into(),
                    },
                    elapsed_secs: started.elapsed().as_secs_f64(),
                },
                points,
            };
            fs::write(&csv_path, csv).map_err(|e| {
                CliError::Data(format!("failed to write {}: {e}", csv_path.display()))
            })?;
            let json = serde_json::to_string_pretty(&output)
                .expect("records serialize infallibly");
            fs::write(&json_path, json).map_err(|e| {
                CliError::Data(format!("failed to write {}: {e}", json_path.display()))
            })?;
            eprintln!("wrote {} and {}", csv_path.display(), json_path.display());
        }
    }
    Ok(())
}
