//! Command-line driver.
//!
//! Exit codes: 0 success, 1 runtime or data error, 2 flag/usage error.
//! Every run is deterministic given its flags and `--seed`; nothing reads
//! the clock or the environment.

use std::fs::File;
use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::catalog::{load_manifest_path, save_manifest, synth_catalog};
use crate::error::Error;
use crate::geometry::TileGrid;
use crate::prediction::{
    eval_accuracy, linear_predict_attention, predict_attention, AttentionEstimate,
    PredictorConfig,
};
use crate::simulator::{
    emit_report, simulate, BandwidthModel, ReportFormat, Scheme, SimConfig,
};
use crate::svr::SvrConfig;
use crate::trace::{
    gen_synthetic, load_trace_path, serialize_trace, SyntheticKind, SyntheticParams,
    DEFAULT_PURSUIT_PERIOD_S, DEFAULT_PURSUIT_PITCH_AMP_DEG, DEFAULT_PURSUIT_YAW_AMP_DEG,
    DEFAULT_SACCADE_DWELL_S, DEFAULT_STATIC_SIGMA_DEG,
};

#[derive(Parser)]
#[command(
    name = "fovr",
    about = "Attention-driven tiled 360-degree streaming toolkit",
    version
)]
struct Cli {
    /// Seed for every stochastic step.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Output path, `-` for standard output.
    #[arg(long, global = true, default_value = "-")]
    out: String,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Head/gaze trace tools.
    #[command(subcommand)]
    Trace(TraceCmd),
    /// Sliding-window attention prediction over a recorded trace.
    Predict(PredictArgs),
    /// Tile bitrate catalog tools.
    #[command(subcommand)]
    Catalog(CatalogCmd),
    /// Streaming playout simulation.
    Simulate(SimulateArgs),
}

#[derive(Subcommand)]
enum TraceCmd {
    /// Generate a synthetic trace.
    Gen(TraceGenArgs),
}

#[derive(Subcommand)]
enum CatalogCmd {
    /// Synthesize a catalog manifest.
    Synth(CatalogSynthArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum KindArg {
    Static,
    Pursuit,
    Saccade,
}

#[derive(Args)]
struct TraceGenArgs {
    /// Motion regime.
    #[arg(long, value_enum)]
    kind: KindArg,
    /// Trace length in seconds.
    #[arg(long, default_value_t = 10.0)]
    duration: f64,
    /// Sample rate in Hz.
    #[arg(long, default_value_t = 30.0)]
    rate: f64,
    /// Gaussian angular noise in degrees (static and pursuit).
    #[arg(long, default_value_t = DEFAULT_STATIC_SIGMA_DEG)]
    sigma: f64,
    /// Pursuit yaw amplitude in degrees.
    #[arg(long, default_value_t = DEFAULT_PURSUIT_YAW_AMP_DEG)]
    yaw_amp: f64,
    /// Pursuit pitch amplitude in degrees.
    #[arg(long, default_value_t = DEFAULT_PURSUIT_PITCH_AMP_DEG)]
    pitch_amp: f64,
    /// Pursuit period in seconds.
    #[arg(long, default_value_t = DEFAULT_PURSUIT_PERIOD_S)]
    period: f64,
    /// Saccade mean dwell in seconds.
    #[arg(long, default_value_t = DEFAULT_SACCADE_DWELL_S)]
    dwell: f64,
}

#[derive(Clone, Copy, ValueEnum)]
enum ModelArg {
    Svr,
    Linear,
}

#[derive(Args)]
struct PredictArgs {
    /// Trace file to evaluate.
    #[arg(long)]
    trace: PathBuf,
    /// Trailing window length in seconds.
    #[arg(long, default_value_t = 5.0)]
    window: f64,
    /// Prediction horizon in seconds.
    #[arg(long, default_value_t = 1.0)]
    horizon: f64,
    /// Accuracy tolerance in degrees.
    #[arg(long, default_value_t = 5.0)]
    tolerance: f64,
    /// Predictor family.
    #[arg(long, value_enum, default_value_t = ModelArg::Svr)]
    model: ModelArg,
    /// SVR regularization weight.
    #[arg(long, default_value_t = 100.0)]
    svr_c: f64,
    /// SVR insensitive-tube half-width in degrees.
    #[arg(long, default_value_t = 0.5)]
    svr_epsilon: f64,
    /// SVR RBF kernel sharpness.
    #[arg(long, default_value_t = 10.0)]
    svr_gamma: f64,
}

#[derive(Args)]
struct CatalogSynthArgs {
    /// Tile grid as COLSxROWS.
    #[arg(long, default_value = "36x36")]
    grid: String,
    /// Number of clips.
    #[arg(long, default_value_t = 10)]
    clips: usize,
    /// Whole-sphere HD bitrate in kbps, split evenly across tiles.
    #[arg(long, default_value_t = 40_000.0)]
    base_kbps: f64,
    /// SD rung ratios of the HD tile rate, descending, comma-separated.
    #[arg(long, default_value = "0.66")]
    sd_ratios: String,
    /// LD rung ratios of the HD tile rate, descending, comma-separated.
    #[arg(long, default_value = "0.12")]
    ld_ratios: String,
    /// Per-tile bitrate jitter fraction in [0, 0.5).
    #[arg(long, default_value_t = 0.0)]
    jitter: f64,
}

#[derive(Clone, Copy, ValueEnum)]
enum SchemeArg {
    Fovr,
    Full,
    HeadOnly,
    GazeOnly,
}

#[derive(Clone, Copy, ValueEnum)]
enum FormatArg {
    Rows,
    Summary,
}

#[derive(Args)]
struct SimulateArgs {
    /// Trace file; wall time 0 is its first sample.
    #[arg(long)]
    trace: PathBuf,
    /// Catalog manifest file.
    #[arg(long)]
    manifest: PathBuf,
    /// Constant link rate in Mbps, or a path to a `t_ms,bps` step file.
    #[arg(long, conflicts_with = "sweep")]
    bw: Option<String>,
    /// Comma-separated constant rates in Mbps, simulated in order.
    #[arg(long)]
    sweep: Option<String>,
    /// Delivery scheme.
    #[arg(long, value_enum, default_value_t = SchemeArg::Fovr)]
    scheme: SchemeArg,
    /// Report layout.
    #[arg(long, value_enum, default_value_t = FormatArg::Summary)]
    format: FormatArg,
    /// Prediction window in seconds.
    #[arg(long, default_value_t = 5.0)]
    window: f64,
    /// Prediction horizon in seconds.
    #[arg(long, default_value_t = 1.0)]
    horizon: f64,
    /// Accuracy tolerance in degrees.
    #[arg(long, default_value_t = 5.0)]
    tolerance: f64,
    /// Decode/render delay in ms.
    #[arg(long, default_value_t = 90.0)]
    processing_delay: f64,
    /// Attention inference delay in ms.
    #[arg(long, default_value_t = 0.066)]
    prediction_delay: f64,
    /// Request latency in ms.
    #[arg(long, default_value_t = 20.0)]
    latency: f64,
    /// Clips buffered before playback starts.
    #[arg(long, default_value_t = 1)]
    startup_clips: usize,
}

/// Usage errors exit 2, data/runtime errors exit 1.
#[derive(Debug)]
enum RunError {
    Usage(String),
    Data(Error),
}

impl From<Error> for RunError {
    fn from(e: Error) -> RunError {
        RunError::Data(e)
    }
}

fn usage(e: Error) -> RunError {
    RunError::Usage(e.to_string())
}

pub fn run() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = e.exit_code();
            let _ = e.print();
            return ExitCode::from(code.clamp(0, 255) as u8);
        }
    };
    let output = match dispatch(&cli) {
        Ok(bytes) => bytes,
        Err(RunError::Usage(msg)) => {
            eprintln!("error: {msg}");
            return ExitCode::from(2);
        }
        Err(RunError::Data(e)) => {
            eprintln!("error: {e}");
            return ExitCode::from(1);
        }
    };
    match write_out(&cli.out, &output) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}

fn write_out(out: &str, bytes: &[u8]) -> std::io::Result<()> {
    if out == "-" {
        let stdout = std::io::stdout();
        let mut lock = stdout.lock();
        lock.write_all(bytes)?;
        lock.flush()
    } else {
        let mut f = File::create(out)?;
        f.write_all(bytes)?;
        f.flush()
    }
}

fn dispatch(cli: &Cli) -> Result<Vec<u8>, RunError> {
    match &cli.command {
        Command::Trace(TraceCmd::Gen(args)) => cmd_trace_gen(args, cli.seed),
        Command::Predict(args) => cmd_predict(args),
        Command::Catalog(CatalogCmd::Synth(args)) => cmd_catalog_synth(args, cli.seed),
        Command::Simulate(args) => cmd_simulate(args),
    }
}

fn cmd_trace_gen(args: &TraceGenArgs, seed: u64) -> Result<Vec<u8>, RunError> {
    let kind = match args.kind {
        KindArg::Static => SyntheticKind::Static {
            sigma_deg: args.sigma,
        },
        KindArg::Pursuit => SyntheticKind::Pursuit {
            yaw_amp_deg: args.yaw_amp,
            pitch_amp_deg: args.pitch_amp,
            period_s: args.period,
            sigma_deg: args.sigma,
        },
        KindArg::Saccade => SyntheticKind::Saccade {
            mean_dwell_s: args.dwell,
        },
    };
    let params = SyntheticParams::new(kind, args.duration, args.rate);
    let trace = gen_synthetic(&params, seed).map_err(usage)?;
    let mut buf = Vec::new();
    serialize_trace(&trace, &mut buf)?;
    Ok(buf)
}

fn cmd_predict(args: &PredictArgs) -> Result<Vec<u8>, RunError> {
    let cfg = PredictorConfig {
        window_s: args.window,
        horizon_s: args.horizon,
        tolerance_deg: args.tolerance,
        ..PredictorConfig::default()
    };
    cfg.validate().map_err(usage)?;
    let svr_cfg = SvrConfig {
        c: args.svr_c,
        epsilon: args.svr_epsilon,
        gamma: args.svr_gamma,
        ..SvrConfig::default()
    };
    svr_cfg.validate().map_err(usage)?;
    let trace = load_trace_path(&args.trace)?;

    let window_ms = cfg.window_s * 1000.0;
    let horizon_ms = cfg.horizon_s * 1000.0;
    let start = trace.start_ms() as f64;
    let end = trace.end_ms() as f64;
    let mut estimates: Vec<AttentionEstimate> = Vec::new();
    let mut ends: Vec<f64> = Vec::new();
    let mut i = 0usize;
    loop {
        let t_end = start + window_ms + i as f64 * horizon_ms;
        if t_end + horizon_ms > end + 1e-9 {
            break;
        }
        let window = trace.segment(t_end - window_ms, t_end)?;
        let est = match args.model {
            ModelArg::Svr => predict_attention(&window, &cfg, &svr_cfg)?,
            ModelArg::Linear => linear_predict_attention(&window, &cfg)?,
        };
        estimates.push(est);
        ends.push(t_end);
        i += 1;
    }
    if estimates.is_empty() {
        return Err(RunError::Data(Error::invalid(format!(
            "trace spans {} ms, shorter than window + horizon = {} ms",
            trace.span_ms(),
            window_ms + horizon_ms
        ))));
    }
    let report = eval_accuracy(&estimates, &trace, cfg.tolerance_deg)?;

    // One line per estimate: index, window end, predicted mean, and a 0/1
    // flag set only when every horizon instant was within tolerance.
    let mut buf = Vec::new();
    for (i, est) in estimates.iter().enumerate() {
        let correct = u8::from(report.per_estimate[i] >= 1.0);
        writeln!(
            buf,
            "{} {:.3} {:.6} {:.6} {}",
            i,
            ends[i],
            est.mean.yaw_deg(),
            est.mean.pitch_deg(),
            correct
        )
        .expect("vec write");
    }
    writeln!(buf, "# accuracy {:.6}", report.accuracy).expect("vec write");
    Ok(buf)
}

fn parse_grid(text: &str) -> Result<TileGrid, RunError> {
    let parts: Vec<&str> = text.split('x').collect();
    let bad = || RunError::Usage(format!("grid must be COLSxROWS, got {text:?}"));
    if parts.len() != 2 {
        return Err(bad());
    }
    let cols: u32 = parts[0].parse().map_err(|_| bad())?;
    let rows: u32 = parts[1].parse().map_err(|_| bad())?;
    TileGrid::new(cols, rows).map_err(usage)
}

fn parse_ratio_list(text: &str, what: &str) -> Result<Vec<f64>, RunError> {
    let mut out = Vec::new();
    for part in text.split(',') {
        let v: f64 = part.trim().parse().map_err(|_| {
            RunError::Usage(format!("bad {what} ratio {part:?} in {text:?}"))
        })?;
        out.push(v);
    }
    Ok(out)
}

fn cmd_catalog_synth(args: &CatalogSynthArgs, seed: u64) -> Result<Vec<u8>, RunError> {
    let grid = parse_grid(&args.grid)?;
    let sd = parse_ratio_list(&args.sd_ratios, "sd")?;
    let ld = parse_ratio_list(&args.ld_ratios, "ld")?;
    // Every input is a flag, so synthesis failures are usage errors.
    let cat = synth_catalog(grid, args.clips, args.base_kbps, &sd, &ld, args.jitter, seed)
        .map_err(usage)?;
    let mut buf = Vec::new();
    save_manifest(&cat, &mut buf)?;
    Ok(buf)
}

/// `--bw` accepts a number (Mbps) or a step-file path.
fn parse_bw(text: &str) -> Result<BandwidthModel, RunError> {
    if let Ok(mbps) = text.parse::<f64>() {
        return BandwidthModel::constant(mbps * 1e6).map_err(usage);
    }
    BandwidthModel::load_path(std::path::Path::new(text)).map_err(RunError::Data)
}

fn parse_sweep(text: &str) -> Result<Vec<f64>, RunError> {
    let mut out = Vec::new();
    for part in text.split(',') {
        let mbps: f64 = part.trim().parse().map_err(|_| {
            RunError::Usage(format!("bad sweep rate {part:?} in {text:?}"))
        })?;
        out.push(mbps);
    }
    if out.is_empty() {
        return Err(RunError::Usage("sweep lists no rates".into()));
    }
    Ok(out)
}

fn cmd_simulate(args: &SimulateArgs) -> Result<Vec<u8>, RunError> {
    let cfg = SimConfig {
        predictor: PredictorConfig {
            window_s: args.window,
            horizon_s: args.horizon,
            tolerance_deg: args.tolerance,
            ..PredictorConfig::default()
        },
        svr: SvrConfig::default(),
        processing_delay_ms: args.processing_delay,
        prediction_delay_ms: args.prediction_delay,
        network_latency_ms: args.latency,
        startup_clips: args.startup_clips,
    };
    cfg.validate().map_err(usage)?;
    let scheme = match args.scheme {
        SchemeArg::Fovr => Scheme::Fovr,
        SchemeArg::Full => Scheme::Full,
        SchemeArg::HeadOnly => Scheme::HeadOnly,
        SchemeArg::GazeOnly => Scheme::GazeOnly,
    };
    let format = match args.format {
        FormatArg::Rows => ReportFormat::Rows,
        FormatArg::Summary => ReportFormat::Summary,
    };
    let trace = load_trace_path(&args.trace)?;
    let cat = load_manifest_path(&args.manifest)?;

    let mut buf = Vec::new();
    match (&args.bw, &args.sweep) {
        (Some(bw), None) => {
            let model = parse_bw(bw)?;
            let report = simulate(&trace, &cat, &model, &cfg, scheme)?;
            buf.extend_from_slice(emit_report(&report, format).as_bytes());
        }
        (None, Some(sweep)) => {
            for mbps in parse_sweep(sweep)? {
                let model = BandwidthModel::constant(mbps * 1e6).map_err(usage)?;
                let report = simulate(&trace, &cat, &model, &cfg, scheme)?;
                writeln!(buf, "# bw_mbps {mbps}").expect("vec write");
                buf.extend_from_slice(emit_report(&report, format).as_bytes());
            }
        }
        (None, None) => {
            return Err(RunError::Usage("one of --bw or --sweep is required".into()))
        }
        (Some(_), Some(_)) => unreachable!("clap conflicts_with"),
    }
    Ok(buf)
}
