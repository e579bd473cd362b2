//! Command-line driver: regenerates the coefficient curves and sensitivity
//! grids as CSV, runs the optimizers, and exposes reconstruction and
//! shot-noise simulation as JSON.
//!
//! Exit codes: 0 on success, 2 for configuration errors, 3 for degenerate
//! schemes, 1 for I/O failures. Errors are printed to stderr as a single
//! JSON line. All numbers are emitted with 17 significant digits.

use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use spintomo::montecarlo::{
    estimate_and_reconstruct, error_vs_kappa_sweep, sample_bloch_ball, ExperimentPlan,
    StrategyPlan, SweepScheme,
};
use spintomo::optimize::{abs_det_n_cuberoot, minimize_1d, minimize_2d, FigureOfMerit};
use spintomo::scattering::{coefficients, Channel, Kappa};
use spintomo::spin_algebra::{
    density_to_bloch, BlochVector, Complex2x2, UnitDirection,
};
use spintomo::tomography::{invert_scheme, ReconstructionResult};
use spintomo::Error;

#[derive(Parser)]
#[command(
    name = "spintomo",
    version,
    about = "Qubit state tomography through 1D scattering of a probe spin",
    long_about = "Exact scattering probabilities for a probe qubit crossing a fixed target \
qubit via a delta-shaped Heisenberg coupling, linear-inversion tomography of the target's \
Bloch vector, sensitivity optimization over incident wave numbers, and Monte Carlo shot-noise \
simulation. Wave numbers are dimensionless (kappa = hbar^2 k / m g).\n\n\
A JSON config file (--config) may provide any flag value by its long name \
(e.g. {\"kappa\": 1.7, \"shots\": 10000}); command-line flags take precedence."
)]
struct Cli {
    /// JSON file with default values for any flag, keyed by flag name.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Tabulate the probability coefficients a, a', b, c over a kappa grid (CSV: kappa,a,a_prime,b,c).
    Coeffs(CoeffsArgs),
    /// Minimize a scheme's sensitivity figure of merit over incident wave numbers (JSON).
    Optimize(OptimizeArgs),
    /// Invert three measured probabilities into a Bloch vector (JSON).
    Reconstruct(ReconstructArgs),
    /// Simulate finite-shot experiments and report reconstruction errors (JSON or CSV).
    Simulate(SimulateArgs),
    /// Tabulate |det N|^(1/3) over a (kappa1, kappa2) box (CSV: kappa1,kappa2,value).
    DetGrid(DetGridArgs),
}

#[derive(Args)]
struct CoeffsArgs {
    /// Channel: t (transmission) or r (reflection).
    #[arg(long)]
    channel: Option<String>,
    /// Lower end of the kappa grid [default: 0.05].
    #[arg(long)]
    kappa_min: Option<f64>,
    /// Upper end of the kappa grid [default: 20].
    #[arg(long)]
    kappa_max: Option<f64>,
    /// Number of log-spaced grid points [default: 256].
    #[arg(long)]
    points: Option<usize>,
    /// Output file; stdout when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct OptimizeArgs {
    /// Scheme: frame-t, frame-r, parallel-t, parallel-r, or momentum.
    #[arg(long)]
    scheme: Option<String>,
    /// 1D search range lower end [default: 0.1].
    #[arg(long)]
    kappa_min: Option<f64>,
    /// 1D search range upper end [default: 100].
    #[arg(long)]
    kappa_max: Option<f64>,
    /// 2D search box for momentum, "lo,hi" or "lo1,hi1,lo2,hi2" [default: 0.2,10].
    #[arg(long)]
    r#box: Option<String>,
    /// Output file; stdout when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct SchemeArgs {
    /// Strategy: frame, parallel, or momentum.
    #[arg(long)]
    strategy: Option<String>,
    /// Channel for the frame/parallel strategies: t or r.
    #[arg(long)]
    channel: Option<String>,
    /// Incident wave number kappa (the first one for momentum).
    #[arg(long)]
    kappa: Option<f64>,
    /// Second wave number for the momentum strategy.
    #[arg(long)]
    kappa2: Option<f64>,
    /// Preparation axis n_i as "x,y,z" [default: 0,0,1].
    #[arg(long)]
    n_i: Option<String>,
    /// Frame axis n_1 (perpendicular to n_i) as "x,y,z" [default: 1,0,0].
    #[arg(long)]
    n_1: Option<String>,
    /// Detection axis n_f for the momentum strategy as "x,y,z" [default: 1,0,0].
    #[arg(long)]
    n_f: Option<String>,
}

#[derive(Args)]
struct ReconstructArgs {
    #[command(flatten)]
    scheme: SchemeArgs,
    /// The three measured probabilities as "p1,p2,p3".
    #[arg(long)]
    probs: Option<String>,
    /// Output file; stdout when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct SimulateArgs {
    #[command(flatten)]
    scheme: SchemeArgs,
    /// True state as a Bloch vector "x,y,z" [default: 0.3,-0.2,0.4].
    #[arg(long)]
    bloch: Option<String>,
    /// True state as a density matrix "re00,im00,re01,im01,re10,im10,re11,im11"
    /// (row-major); overrides --bloch.
    #[arg(long)]
    density: Option<String>,
    /// Shots per detector setup [default: 10000].
    #[arg(long)]
    shots: Option<u64>,
    /// Replication count [default: 200].
    #[arg(long)]
    replicas: Option<usize>,
    /// Master RNG seed [default: 0].
    #[arg(long)]
    seed: Option<u64>,
    /// Sweep mode: comma-separated kappa values; emits a CSV error table.
    #[arg(long)]
    grid: Option<String>,
    /// Output format for the single-run mode: json (report) or csv (per-replica errors).
    #[arg(long)]
    format: Option<String>,
    /// Output file; stdout when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct DetGridArgs {
    /// Box as "lo,hi" (square) or "lo1,hi1,lo2,hi2" [default: 0.2,10].
    #[arg(long)]
    r#box: Option<String>,
    /// Grid resolution per axis, at least 16 [default: 128].
    #[arg(long)]
    resolution: Option<usize>,
    /// Drop rows whose value exceeds this contour level.
    #[arg(long)]
    max_contour: Option<f64>,
    /// Output file; stdout when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
}

struct AppError {
    code: u8,
    msg: String,
}

impl AppError {
    fn config(msg: impl Into<String>) -> Self {
        AppError {
            code: 2,
            msg: msg.into(),
        }
    }

    fn io(msg: impl Into<String>) -> Self {
        AppError {
            code: 1,
            msg: msg.into(),
        }
    }
}

impl From<Error> for AppError {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::DegenerateScheme { .. } => 3,
            _ => 2,
        };
        AppError {
            code,
            msg: e.to_string(),
        }
    }
}

/// 17-significant-digit decimal text.
fn g17(x: f64) -> String {
    if x.is_infinite() {
        return if x > 0.0 { "inf".into() } else { "-inf".into() };
    }
    format!("{x:.16e}")
}

fn json_str(s: &str) -> String {
    serde_json::Value::String(s.to_string()).to_string()
}

type Config = serde_json::Value;

fn load_config(path: &Option<PathBuf>) -> Result<Config, AppError> {
    match path {
        None => Ok(serde_json::Value::Null),
        Some(p) => {
            let text = fs::read_to_string(p)
                .map_err(|e| AppError::config(format!("cannot read config {}: {e}", p.display())))?;
            serde_json::from_str(&text)
                .map_err(|e| AppError::config(format!("config is not valid JSON: {e}")))
        }
    }
}

fn cfg_f64(cfg: &Config, key: &str) -> Result<Option<f64>, AppError> {
    match cfg.get(key) {
        None => Ok(None),
        Some(v) => v
            .as_f64()
            .map(Some)
            .ok_or_else(|| AppError::config(format!("config key '{key}' must be a number"))),
    }
}

fn cfg_u64(cfg: &Config, key: &str) -> Result<Option<u64>, AppError> {
    match cfg.get(key) {
        None => Ok(None),
        Some(v) => v
            .as_u64()
            .map(Some)
            .ok_or_else(|| AppError::config(format!("config key '{key}' must be an unsigned integer"))),
    }
}

fn cfg_str(cfg: &Config, key: &str) -> Result<Option<String>, AppError> {
    match cfg.get(key) {
        None => Ok(None),
        Some(v) => v
            .as_str()
            .map(|s| Some(s.to_string()))
            .ok_or_else(|| AppError::config(format!("config key '{key}' must be a string"))),
    }
}

fn parse_floats(text: &str, expected: usize, what: &str) -> Result<Vec<f64>, AppError> {
    let parts: Result<Vec<f64>, _> = text.split(',').map(|p| p.trim().parse::<f64>()).collect();
    let parts =
        parts.map_err(|e| AppError::config(format!("cannot parse {what} '{text}': {e}")))?;
    if parts.len() != expected {
        return Err(AppError::config(format!(
            "{what} needs {expected} comma-separated values, got {}",
            parts.len()
        )));
    }
    Ok(parts)
}

fn parse_channel(text: &str) -> Result<Channel, AppError> {
    match text {
        "t" | "transmission" => Ok(Channel::Transmission),
        "r" | "reflection" => Ok(Channel::Reflection),
        other => Err(AppError::config(format!(
            "unknown channel '{other}' (use t or r)"
        ))),
    }
}

fn parse_direction(text: &str, what: &str) -> Result<UnitDirection, AppError> {
    let c = parse_floats(text, 3, what)?;
    UnitDirection::from_components(c[0], c[1], c[2]).map_err(AppError::from)
}

fn write_output(out: &Option<PathBuf>, content: &str) -> Result<(), AppError> {
    match out {
        None => {
            print!("{content}");
            Ok(())
        }
        Some(p) => fs::write(p, content)
            .map_err(|e| AppError::io(format!("cannot write {}: {e}", p.display()))),
    }
}

fn log_grid(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    let (llo, lhi) = (lo.ln(), hi.ln());
    (0..n)
        .map(|i| (llo + (lhi - llo) * i as f64 / (n - 1) as f64).exp())
        .collect()
}

fn resolve_plan(args: &SchemeArgs, cfg: &Config) -> Result<(StrategyPlan, String), AppError> {
    let strategy = args
        .strategy
        .clone()
        .or(cfg_str(cfg, "strategy")?)
        .ok_or_else(|| AppError::config("--strategy is required (frame, parallel, momentum)"))?;
    let kappa = args
        .kappa
        .or(cfg_f64(cfg, "kappa")?)
        .ok_or_else(|| AppError::config("--kappa is required"))?;
    let kappa = Kappa::new(kappa)?;
    let n_i = parse_direction(
        &args
            .n_i
            .clone()
            .or(cfg_str(cfg, "n_i")?)
            .unwrap_or_else(|| "0,0,1".into()),
        "n_i",
    )?;
    match strategy.as_str() {
        "frame" => {
            let channel = parse_channel(
                &args
                    .channel
                    .clone()
                    .or(cfg_str(cfg, "channel")?)
                    .ok_or_else(|| AppError::config("--channel is required for frame"))?,
            )?;
            let n_1 = parse_direction(
                &args
                    .n_1
                    .clone()
                    .or(cfg_str(cfg, "n_1")?)
                    .unwrap_or_else(|| "1,0,0".into()),
                "n_1",
            )?;
            Ok((
                StrategyPlan::Frame {
                    n_i,
                    n_1,
                    kappa,
                    channel,
                },
                strategy,
            ))
        }
        "parallel" => {
            let channel = parse_channel(
                &args
                    .channel
                    .clone()
                    .or(cfg_str(cfg, "channel")?)
                    .ok_or_else(|| AppError::config("--channel is required for parallel"))?,
            )?;
            let n_1 = parse_direction(
                &args
                    .n_1
                    .clone()
                    .or(cfg_str(cfg, "n_1")?)
                    .unwrap_or_else(|| "1,0,0".into()),
                "n_1",
            )?;
            let n_2 = UnitDirection::new(n_i.cross(n_1)).map_err(AppError::from)?;
            Ok((
                StrategyPlan::Parallel {
                    axes: [n_1, n_2, n_i],
                    kappa,
                    channel,
                },
                strategy,
            ))
        }
        "momentum" => {
            let kappa2 = args
                .kappa2
                .or(cfg_f64(cfg, "kappa2")?)
                .ok_or_else(|| AppError::config("--kappa2 is required for momentum"))?;
            let n_f = parse_direction(
                &args
                    .n_f
                    .clone()
                    .or(cfg_str(cfg, "n_f")?)
                    .unwrap_or_else(|| "1,0,0".into()),
                "n_f",
            )?;
            Ok((
                StrategyPlan::Momentum {
                    n_i,
                    n_f,
                    kappa1: kappa,
                    kappa2: Kappa::new(kappa2)?,
                },
                strategy,
            ))
        }
        other => Err(AppError::config(format!(
            "unknown strategy '{other}' (use frame, parallel, momentum)"
        ))),
    }
}

fn reconstruction_json(rec: &ReconstructionResult, provenance: &str) -> String {
    let raw = rec.v_raw.as_array();
    let clip = rec.v_clipped.as_vec3().as_array();
    format!(
        "{{\"v_raw\":[{},{},{}],\"v_clipped\":[{},{},{}],\"was_clipped\":{},\"condition_number\":{},\"scheme\":{}}}",
        g17(raw[0]),
        g17(raw[1]),
        g17(raw[2]),
        g17(clip[0]),
        g17(clip[1]),
        g17(clip[2]),
        rec.was_clipped,
        g17(rec.condition_number),
        json_str(provenance)
    )
}

fn cmd_coeffs(args: &CoeffsArgs, cfg: &Config) -> Result<(), AppError> {
    let channel = parse_channel(
        &args
            .channel
            .clone()
            .or(cfg_str(cfg, "channel")?)
            .unwrap_or_else(|| "t".into()),
    )?;
    let lo = args.kappa_min.or(cfg_f64(cfg, "kappa_min")?).unwrap_or(0.05);
    let hi = args.kappa_max.or(cfg_f64(cfg, "kappa_max")?).unwrap_or(20.0);
    let points = args
        .points
        .or(cfg_u64(cfg, "points")?.map(|v| v as usize))
        .unwrap_or(256);
    if !(lo.is_finite() && hi.is_finite()) || lo <= 0.0 || hi <= lo || points < 2 {
        return Err(AppError::config("coeffs needs 0 < kappa_min < kappa_max and points >= 2"));
    }
    let mut csv = String::from("kappa,a,a_prime,b,c\n");
    for k in log_grid(lo, hi, points) {
        let co = coefficients(1.0 / k, channel);
        csv.push_str(&format!(
            "{},{},{},{},{}\n",
            g17(k),
            g17(co.a),
            g17(co.a_prime),
            g17(co.b),
            g17(co.c)
        ));
    }
    write_output(&args.out, &csv)
}

fn parse_box(text: &str) -> Result<[f64; 4], AppError> {
    let parts: Result<Vec<f64>, _> = text.split(',').map(|p| p.trim().parse::<f64>()).collect();
    let parts = parts.map_err(|e| AppError::config(format!("cannot parse box '{text}': {e}")))?;
    match parts.as_slice() {
        [lo, hi] => Ok([*lo, *hi, *lo, *hi]),
        [a, b, c, d] => Ok([*a, *b, *c, *d]),
        _ => Err(AppError::config("box needs 2 or 4 comma-separated values")),
    }
}

fn cmd_optimize(args: &OptimizeArgs, cfg: &Config) -> Result<(), AppError> {
    let scheme = args
        .scheme
        .clone()
        .or(cfg_str(cfg, "scheme")?)
        .ok_or_else(|| AppError::config("--scheme is required"))?;
    let lo = args.kappa_min.or(cfg_f64(cfg, "kappa_min")?).unwrap_or(0.1);
    let hi = args.kappa_max.or(cfg_f64(cfg, "kappa_max")?).unwrap_or(100.0);
    let json = match scheme.as_str() {
        "momentum" => {
            let box_text = args
                .r#box
                .clone()
                .or(cfg_str(cfg, "box")?)
                .unwrap_or_else(|| "0.2,10".into());
            let bounds = parse_box(&box_text)?;
            let opt = minimize_2d(abs_det_n_cuberoot, bounds)?;
            format!(
                "{{\"scheme\":{},\"argmin\":[{},{}],\"min_value\":{},\"closed_form_at_argmin\":{},\"evaluations\":{}}}\n",
                json_str(&scheme),
                g17(opt.argmin.0),
                g17(opt.argmin.1),
                g17(opt.value),
                g17(abs_det_n_cuberoot(opt.argmin.0, opt.argmin.1)),
                opt.evaluations
            )
        }
        name => {
            let fom = match name {
                "frame-t" => FigureOfMerit::DetMt,
                "frame-r" => FigureOfMerit::DetMr,
                "parallel-t" => FigureOfMerit::LambdaT,
                "parallel-r" => FigureOfMerit::LambdaR,
                other => {
                    return Err(AppError::config(format!(
                        "unknown scheme '{other}' (use frame-t, frame-r, parallel-t, parallel-r, momentum)"
                    )))
                }
            };
            let opt = minimize_1d(|k| fom.eval(k), lo, hi)?;
            format!(
                "{{\"scheme\":{},\"argmin\":[{}],\"min_value\":{},\"closed_form_at_argmin\":{},\"evaluations\":{}}}\n",
                json_str(&scheme),
                g17(opt.argmin),
                g17(opt.value),
                g17(fom.eval(opt.argmin)),
                opt.evaluations
            )
        }
    };
    write_output(&args.out, &json)
}

fn cmd_reconstruct(args: &ReconstructArgs, cfg: &Config) -> Result<(), AppError> {
    let (plan, _) = resolve_plan(&args.scheme, cfg)?;
    let probs_text = args
        .probs
        .clone()
        .or(cfg_str(cfg, "probs")?)
        .ok_or_else(|| AppError::config("--probs is required"))?;
    let p = parse_floats(&probs_text, 3, "probs")?;
    for &x in &p {
        if !(0.0..=1.0).contains(&x) {
            return Err(AppError::config(format!("probability {x} outside [0, 1]")));
        }
    }
    let scheme = plan.scheme()?;
    let rec = invert_scheme(&scheme, [p[0], p[1], p[2]])?;
    let json = format!(
        "{}\n",
        reconstruction_json(&rec, &scheme.provenance.to_string())
    );
    write_output(&args.out, &json)
}

fn resolve_true_state(args: &SimulateArgs, cfg: &Config) -> Result<BlochVector, AppError> {
    if let Some(text) = args.density.clone().or(cfg_str(cfg, "density")?) {
        let e = parse_floats(&text, 8, "density")?;
        let c = |re: f64, im: f64| num_complex::Complex64::new(re, im);
        let rho = Complex2x2([[c(e[0], e[1]), c(e[2], e[3])], [c(e[4], e[5]), c(e[6], e[7])]]);
        return density_to_bloch(&rho).map_err(AppError::from);
    }
    let text = args
        .bloch
        .clone()
        .or(cfg_str(cfg, "bloch")?)
        .unwrap_or_else(|| "0.3,-0.2,0.4".into());
    let v = parse_floats(&text, 3, "bloch")?;
    BlochVector::from_components(v[0], v[1], v[2]).map_err(AppError::from)
}

fn cmd_simulate(args: &SimulateArgs, cfg: &Config) -> Result<(), AppError> {
    let shots = args.shots.or(cfg_u64(cfg, "shots")?).unwrap_or(10_000);
    let replicas = args
        .replicas
        .or(cfg_u64(cfg, "replicas")?.map(|v| v as usize))
        .unwrap_or(200);
    let seed = args.seed.or(cfg_u64(cfg, "seed")?).unwrap_or(0);
    if shots == 0 {
        return Err(AppError::config("shots must be >= 1"));
    }
    if replicas == 0 {
        return Err(AppError::config("replicas must be >= 1"));
    }

    if let Some(grid_text) = args.grid.clone().or(cfg_str(cfg, "grid")?) {
        // sweep mode: canonical axes, true states sampled uniformly in the ball
        let parts: Result<Vec<f64>, _> =
            grid_text.split(',').map(|p| p.trim().parse::<f64>()).collect();
        let grid =
            parts.map_err(|e| AppError::config(format!("cannot parse grid '{grid_text}': {e}")))?;
        let strategy = args
            .scheme
            .strategy
            .clone()
            .or(cfg_str(cfg, "strategy")?)
            .unwrap_or_else(|| "parallel".into());
        let channel = parse_channel(
            &args
                .scheme
                .channel
                .clone()
                .or(cfg_str(cfg, "channel")?)
                .unwrap_or_else(|| "t".into()),
        )?;
        let sweep = match strategy.as_str() {
            "frame" => SweepScheme::Frame(channel),
            "parallel" => SweepScheme::Parallel(channel),
            other => {
                return Err(AppError::config(format!(
                    "sweep supports strategies frame and parallel, not '{other}'"
                )))
            }
        };
        let mut state_rng = ChaCha8Rng::seed_from_u64(seed);
        state_rng.set_stream(u64::MAX);
        let v_set: Vec<BlochVector> = (0..64).map(|_| sample_bloch_ball(&mut state_rng)).collect();
        let table = error_vs_kappa_sweep(sweep, &grid, shots, replicas, &v_set, seed)?;
        let mut csv = String::from("kappa,mean_error,std_error,clip_rate\n");
        for row in table {
            csv.push_str(&format!(
                "{},{},{},{}\n",
                g17(row.kappa),
                g17(row.mean_error),
                g17(row.std_error),
                g17(row.clip_rate)
            ));
        }
        return write_output(&args.out, &csv);
    }

    let (strategy, strategy_name) = resolve_plan(&args.scheme, cfg)?;
    let v_true = resolve_true_state(args, cfg)?;
    let plan = ExperimentPlan {
        strategy,
        shots,
        seed,
    };
    let output = estimate_and_reconstruct(&plan, &v_true, replicas)?;
    let format = args
        .format
        .clone()
        .or(cfg_str(cfg, "format")?)
        .unwrap_or_else(|| "json".into());
    match format.as_str() {
        "csv" => {
            let mut csv = String::from("replica,error\n");
            for (i, e) in output.per_replica_errors.iter().enumerate() {
                csv.push_str(&format!("{i},{}\n", g17(*e)));
            }
            write_output(&args.out, &csv)
        }
        "json" => {
            let scheme = plan.strategy.scheme()?;
            let json = format!(
                "{{\"strategy\":{},\"shots\":{},\"replicas\":{},\"seed\":{},\"mean_error\":{},\"std_error\":{},\"mean_trace_distance\":{},\"clip_rate\":{},\"reconstruction\":{}}}\n",
                json_str(&strategy_name),
                shots,
                replicas,
                seed,
                g17(output.report.mean_error),
                g17(output.report.std_error),
                g17(output.report.mean_trace_distance),
                g17(output.report.clip_rate),
                reconstruction_json(&output.reconstruction, &scheme.provenance.to_string())
            );
            write_output(&args.out, &json)
        }
        other => Err(AppError::config(format!(
            "unknown format '{other}' (use csv or json)"
        ))),
    }
}

fn cmd_det_grid(args: &DetGridArgs, cfg: &Config) -> Result<(), AppError> {
    let box_text = args
        .r#box
        .clone()
        .or(cfg_str(cfg, "box")?)
        .unwrap_or_else(|| "0.2,10".into());
    let [lo1, hi1, lo2, hi2] = parse_box(&box_text)?;
    let resolution = args
        .resolution
        .or(cfg_u64(cfg, "resolution")?.map(|v| v as usize))
        .unwrap_or(128);
    if resolution < 16 {
        return Err(AppError::config("resolution must be at least 16"));
    }
    if !(lo1 > 0.0 && hi1 > lo1 && lo2 > 0.0 && hi2 > lo2) {
        return Err(AppError::config("box must satisfy 0 < lo < hi on both axes"));
    }
    let max_contour = args.max_contour.or(cfg_f64(cfg, "max_contour")?);
    let g1 = log_grid(lo1, hi1, resolution);
    let g2 = log_grid(lo2, hi2, resolution);
    let mut csv = String::from("kappa1,kappa2,value\n");
    for &k1 in &g1 {
        for &k2 in &g2 {
            let v = abs_det_n_cuberoot(k1, k2);
            if let Some(cap) = max_contour {
                if v > cap {
                    continue;
                }
            }
            csv.push_str(&format!("{},{},{}\n", g17(k1), g17(k2), g17(v)));
        }
    }
    write_output(&args.out, &csv)
}

fn run(cli: &Cli) -> Result<(), AppError> {
    let cfg = load_config(&cli.config)?;
    match &cli.command {
        Command::Coeffs(args) => cmd_coeffs(args, &cfg),
        Command::Optimize(args) => cmd_optimize(args, &cfg),
        Command::Reconstruct(args) => cmd_reconstruct(args, &cfg),
        Command::Simulate(args) => cmd_simulate(args, &cfg),
        Command::DetGrid(args) => cmd_det_grid(args, &cfg),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!(
                "{{\"error\":{},\"code\":{}}}",
                json_str(&e.msg),
                e.code
            );
            ExitCode::from(e.code)
        }
    }
}
