//! Command-line front end for the conditional cat-state
//! preparation pipeline.
//!
//! Exit codes: 0 success, 2 configuration error, 3 degenerate conditioning
//! outcome, 4 phase-space grid coverage failure, 1 anything else.

use std::fmt::Write as _;
use std::io::Write as _;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use num_complex::Complex64 as C64;
use serde_json::{json, Value};

use kerrcat_core::analysis::{find_vacuum_zeros, scan_vacuum, ScanResult, VacuumZero};
use kerrcat_core::coherent::{ComplexAmplitude, SingleModeState, TwoModeState};
use kerrcat_core::kerr::{kerr_amplitudes, kerr_coefficients, kerr_state};
use kerrcat_core::phase_space::{constellation, wigner, GridSpec};
use kerrcat_core::scheme::{
    run_conditional, sample_homodyne, scheme_two_mode, Mode3Density, SchemeConfig, XmSelection,
};
use kerrcat_core::Error as CoreError;

const QUADRATURE_CONVENTION: &str =
    "x = (a + a^dag)/sqrt(2); a coherent state of amplitude b peaks at (sqrt(2) Re b, sqrt(2) Im b)";

#[derive(Parser)]
#[command(
    name = "kerrcat",
    version,
    about = "Conditional cat-state preparation from circular coherent-state superpositions"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
enum WignerSource {
    /// The conditioned mode-4 state of the pipeline.
    Conditioned,
    /// The N-component input state itself.
    Input,
    /// The vacuum, as a calibration fixture.
    Vacuum,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
enum SampleSource {
    /// Mode 3 of the beam splitter output.
    Scheme,
    /// A two-mode vacuum, as a calibration fixture.
    Vacuum,
}

fn parse_target(s: &str) -> Result<(usize, usize), String> {
    let (k, l) = s
        .split_once(',')
        .ok_or_else(|| format!("expected two comma-separated indices, got {s:?}"))?;
    let parse = |t: &str| {
        t.trim()
            .parse::<usize>()
            .map_err(|e| format!("bad component index {t:?}: {e}"))
    };
    Ok((parse(k)?, parse(l)?))
}

fn parse_grid(s: &str) -> Result<[f64; 4], String> {
    let parts: Vec<&str> = s.split(',').collect();
    if parts.len() != 4 {
        return Err(format!(
            "expected x_min,x_max,p_min,p_max, got {s:?}"
        ));
    }
    let mut out = [0.0; 4];
    for (slot, part) in out.iter_mut().zip(&parts) {
        *slot = part
            .trim()
            .parse::<f64>()
            .map_err(|e| format!("bad grid bound {part:?}: {e}"))?;
    }
    Ok(out)
}

#[derive(Subcommand)]
enum Command {
    /// Decomposition weights c_k and the component amplitude table.
    Coefficients {
        /// Number of components N.
        #[arg(long)]
        n: usize,
        /// Input coherent amplitude α.
        #[arg(long)]
        alpha: f64,
        /// Output path; standard output when absent.
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Condition mode 4 on a homodyne outcome and report the decomposition.
    Condition {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        alpha: f64,
        /// Target component pair, e.g. 3,4.
        #[arg(long, value_parser = parse_target)]
        target: (usize, usize),
        /// Quadrature outcome; defaults to the target peak center.
        #[arg(long, allow_negative_numbers = true)]
        xm: Option<f64>,
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Scan the vacuum and secondary ratios over a range of α, with refined
    /// interference zeros appended.
    Scan {
        #[arg(long)]
        n: usize,
        #[arg(long, value_parser = parse_target)]
        target: (usize, usize),
        /// Lower end of the α range.
        #[arg(long)]
        from: f64,
        /// Upper end of the α range.
        #[arg(long)]
        to: f64,
        /// Number of scan points.
        #[arg(long)]
        steps: usize,
        /// Fixed quadrature outcome; by default x_m tracks the target peak.
        #[arg(long, allow_negative_numbers = true)]
        xm: Option<f64>,
        #[arg(long, value_enum, default_value_t = Format::Csv)]
        format: Format,
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Wigner function of a pipeline state on a phase-space grid.
    Wigner {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        alpha: f64,
        /// Target component pair; required for the conditioned state.
        #[arg(long, value_parser = parse_target)]
        target: Option<(usize, usize)>,
        #[arg(long, allow_negative_numbers = true)]
        xm: Option<f64>,
        /// Which state to render.
        #[arg(long, value_enum, default_value_t = WignerSource::Conditioned)]
        state: WignerSource,
        /// Explicit grid bounds x_min,x_max,p_min,p_max; auto-derived from
        /// the constellation plus margin when absent.
        #[arg(long, value_parser = parse_grid, allow_hyphen_values = true)]
        grid: Option<[f64; 4]>,
        /// Grid points per axis.
        #[arg(long, default_value_t = 256)]
        resolution: usize,
        /// Margin around the constellation for the auto grid.
        #[arg(long, default_value_t = 5.0)]
        margin: f64,
        #[arg(long, value_enum, default_value_t = Format::Json)]
        format: Format,
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Draw homodyne samples from the mode-3 density and report acceptance
    /// statistics for a window around x_m.
    Sample {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        alpha: f64,
        #[arg(long, value_parser = parse_target)]
        target: Option<(usize, usize)>,
        #[arg(long, allow_negative_numbers = true)]
        xm: Option<f64>,
        /// RNG seed; a fixed seed reproduces the output byte for byte.
        #[arg(long)]
        seed: u64,
        /// Number of samples.
        #[arg(long)]
        count: usize,
        /// Acceptance window half-width w: a sample succeeds if |x − x_m| ≤ w.
        #[arg(long)]
        window: f64,
        #[arg(long, value_enum, default_value_t = SampleSource::Scheme)]
        state: SampleSource,
        #[arg(long)]
        output: Option<PathBuf>,
    },
}

enum CliError {
    Config(String),
    Core(CoreError),
    Io(std::io::Error),
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Config(_) => 2,
            CliError::Core(CoreError::Domain(_)) => 2,
            CliError::Core(CoreError::DegenerateOutcome { .. }) => 3,
            CliError::Core(CoreError::GridCoverage { .. }) => 4,
            CliError::Core(_) => 1,
            CliError::Io(_) => 1,
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Config(m) => write!(f, "{m}"),
            CliError::Core(e) => write!(f, "{e}"),
            CliError::Io(e) => write!(f, "io error: {e}"),
        }
    }
}

impl From<CoreError> for CliError {
    fn from(e: CoreError) -> Self {
        CliError::Core(e)
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Io(e)
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Err(e) = configure_threads() {
        eprintln!("kerrcat: {e}");
        return ExitCode::from(e.exit_code());
    }
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("kerrcat: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}

/// KERRCAT_THREADS caps the rayon pool used for scans and Wigner grids.
fn configure_threads() -> Result<(), CliError> {
    if let Ok(v) = std::env::var("KERRCAT_THREADS") {
        let n: usize = v
            .parse()
            .map_err(|_| CliError::Config(format!("KERRCAT_THREADS must be an integer, got {v:?}")))?;
        if n == 0 {
            return Err(CliError::Config(
                "KERRCAT_THREADS must be at least 1".into(),
            ));
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| CliError::Config(format!("could not size the thread pool: {e}")))?;
    }
    Ok(())
}

fn run(command: Command) -> Result<(), CliError> {
    match command {
        Command::Coefficients { n, alpha, output } => {
            let text = cmd_coefficients(n, alpha)?;
            write_output(output.as_deref(), &text)
        }
        Command::Condition {
            n,
            alpha,
            target,
            xm,
            output,
        } => {
            let text = cmd_condition(n, alpha, target, xm)?;
            write_output(output.as_deref(), &text)
        }
        Command::Scan {
            n,
            target,
            from,
            to,
            steps,
            xm,
            format,
            output,
        } => {
            let text = cmd_scan(n, target, from, to, steps, xm, format)?;
            write_output(output.as_deref(), &text)
        }
        Command::Wigner {
            n,
            alpha,
            target,
            xm,
            state,
            grid,
            resolution,
            margin,
            format,
            output,
        } => {
            let text = cmd_wigner(n, alpha, target, xm, state, grid, resolution, margin, format)?;
            write_output(output.as_deref(), &text)
        }
        Command::Sample {
            n,
            alpha,
            target,
            xm,
            seed,
            count,
            window,
            state,
            output,
        } => {
            let text = cmd_sample(n, alpha, target, xm, seed, count, window, state)?;
            write_output(output.as_deref(), &text)
        }
    }
}

fn write_output(path: Option<&std::path::Path>, content: &str) -> Result<(), CliError> {
    match path {
        Some(p) => std::fs::write(p, content)?,
        None => {
            let mut out = std::io::stdout().lock();
            out.write_all(content.as_bytes())?;
        }
    }
    Ok(())
}

fn complex_json(z: C64) -> Value {
    json!({ "re": z.re, "im": z.im })
}

fn config_json(config: &SchemeConfig, x_m: f64) -> Value {
    json!({
        "alpha": config.alpha(),
        "n_components": config.n_components(),
        "target": { "k": config.target().k(), "l": config.target().l() },
        "x_m": x_m,
    })
}

fn cmd_coefficients(n: usize, alpha: f64) -> Result<String, CliError> {
    let weights = kerr_coefficients(n)?;
    let amps = kerr_amplitudes(alpha, n)?;
    let coefficients: Vec<Value> = (1..=n)
        .map(|k| {
            let c = weights.coeff(k);
            json!({
                "k": k,
                "re": c.re,
                "im": c.im,
                "modulus": c.norm(),
                "phase": weights.phases()[k - 1],
            })
        })
        .collect();
    let amplitudes: Vec<Value> = amps
        .iter()
        .enumerate()
        .map(|(i, a)| json!({ "k": i + 1, "re": a.re, "im": a.im }))
        .collect();
    let points = constellation(&kerr_state(alpha, n)?);
    let weights_json: Vec<Value> = points.iter().map(|p| json!(p.weight)).collect();
    let doc = json!({
        "n_components": n,
        "alpha": alpha,
        "coefficients": coefficients,
        "amplitudes": amplitudes,
        "term_weights": weights_json,
    });
    Ok(format!("{:#}\n", doc))
}

fn cmd_condition(
    n: usize,
    alpha: f64,
    target: (usize, usize),
    xm: Option<f64>,
) -> Result<String, CliError> {
    let config = SchemeConfig::new(alpha, n, target.0, target.1)?;
    let selection = xm.map_or(XmSelection::TrackPeak, XmSelection::Fixed);
    let res = run_conditional(&config, selection)?;
    let d_target = res
        .d_target(&config)
        .map(|z| z.norm())
        .filter(|m| *m > 0.0)
        .ok_or_else(|| CliError::Core(CoreError::Numerical(
            "target amplitude vanished; choose an x_m nearer the target peak".into(),
        )))?;
    let mut entries: Vec<(&kerrcat_core::CssLabel, &C64)> = res.d.iter().collect();
    entries.sort_by(|a, b| b.1.norm().total_cmp(&a.1.norm()));
    let d_json: Vec<Value> = entries
        .iter()
        .map(|(label, z)| {
            json!({
                "k": label.k(),
                "l": label.l(),
                "re": z.re,
                "im": z.im,
                "modulus": z.norm(),
                "ratio_to_target": z.norm() / d_target,
            })
        })
        .collect();
    let state4: Vec<Value> = res
        .state4
        .terms()
        .iter()
        .map(|&(c, a)| json!({ "coeff": complex_json(c), "amp": { "re": a.re, "im": a.im } }))
        .collect();
    let secondary = entries
        .iter()
        .filter(|(label, _)| **label != config.target())
        .map(|(_, z)| z.norm() / d_target)
        .fold(0.0, f64::max);
    let fidelity = kerrcat_core::coherent::state_fidelity(&res.state4, &config.target_css_state())?;
    let doc = json!({
        "config": config_json(&config, res.x_m),
        "x_m": res.x_m,
        "density": res.density,
        "d0": { "re": res.d0.re, "im": res.d0.im, "modulus": res.d0.norm() },
        "vacuum_ratio": res.d0.norm() / d_target,
        "secondary_ratio": secondary,
        "fidelity_to_target": fidelity,
        "d": d_json,
        "state4": state4,
    });
    Ok(format!("{:#}\n", doc))
}

fn scan_json(
    config: &SchemeConfig,
    scan: &ScanResult,
    zeros: &[VacuumZero],
) -> Value {
    let points: Vec<Value> = scan
        .points
        .iter()
        .map(|p| {
            json!({
                "alpha": p.alpha,
                "x_m": p.x_m,
                "vacuum_ratio": p.vacuum_ratio,
                "secondary_ratio": p.secondary_ratio,
                "fidelity": p.fidelity,
                "density": p.density,
            })
        })
        .collect();
    let zeros: Vec<Value> = zeros
        .iter()
        .map(|z| {
            json!({
                "alpha": z.alpha,
                "vacuum_ratio": z.vacuum_ratio,
                "bracket_low": z.bracket.0,
                "bracket_high": z.bracket.1,
            })
        })
        .collect();
    let failures: Vec<Value> = scan
        .failures
        .iter()
        .map(|f| json!({ "alpha": f.alpha, "message": f.message }))
        .collect();
    json!({
        "config": {
            "alpha": config.alpha(),
            "n_components": config.n_components(),
            "target": { "k": config.target().k(), "l": config.target().l() },
        },
        "points": points,
        "zeros": zeros,
        "failures": failures,
    })
}

fn scan_csv(scan: &ScanResult, zeros: &[VacuumZero]) -> String {
    let mut out = String::new();
    out.push_str("alpha,x_m,vacuum_ratio,secondary_ratio,fidelity,density\n");
    for p in &scan.points {
        let _ = writeln!(
            out,
            "{},{},{},{},{},{}",
            p.alpha, p.x_m, p.vacuum_ratio, p.secondary_ratio, p.fidelity, p.density
        );
    }
    out.push_str("# zeros: alpha,vacuum_ratio,bracket_low,bracket_high\n");
    for z in zeros {
        let _ = writeln!(
            out,
            "# zero,{},{},{},{}",
            z.alpha, z.vacuum_ratio, z.bracket.0, z.bracket.1
        );
    }
    for f in &scan.failures {
        let _ = writeln!(out, "# failure,{},{}", f.alpha, f.message);
    }
    out
}

fn cmd_scan(
    n: usize,
    target: (usize, usize),
    from: f64,
    to: f64,
    steps: usize,
    xm: Option<f64>,
    format: Format,
) -> Result<String, CliError> {
    let config = SchemeConfig::new(from, n, target.0, target.1)?;
    let selection = xm.map_or(XmSelection::TrackPeak, XmSelection::Fixed);
    let scan = scan_vacuum(&config, from, to, steps, selection)?;
    for f in &scan.failures {
        eprintln!("kerrcat: scan point at alpha = {} failed: {}", f.alpha, f.message);
    }
    let zeros = find_vacuum_zeros(&config, selection, &scan.points);
    Ok(match format {
        Format::Json => format!("{:#}\n", scan_json(&config, &scan, &zeros)),
        Format::Csv => scan_csv(&scan, &zeros),
    })
}

#[allow(clippy::too_many_arguments)]
fn cmd_wigner(
    n: usize,
    alpha: f64,
    target: Option<(usize, usize)>,
    xm: Option<f64>,
    source: WignerSource,
    grid: Option<[f64; 4]>,
    resolution: usize,
    margin: f64,
    format: Format,
) -> Result<String, CliError> {
    let state: SingleModeState = match source {
        WignerSource::Vacuum => SingleModeState::vacuum(),
        WignerSource::Input => kerr_state(alpha, n)?,
        WignerSource::Conditioned => {
            let (k, l) = target.ok_or_else(|| {
                CliError::Config("--target is required for the conditioned state".into())
            })?;
            let config = SchemeConfig::new(alpha, n, k, l)?;
            let selection = xm.map_or(XmSelection::TrackPeak, XmSelection::Fixed);
            run_conditional(&config, selection)?.state4
        }
    };
    let spec = match grid {
        Some([x_min, x_max, p_min, p_max]) => {
            GridSpec::new(x_min, x_max, p_min, p_max, resolution, resolution)?
        }
        None => GridSpec::covering(&state, margin, resolution)?,
    };
    if spec.margin_around(&state) < 3.0 {
        eprintln!(
            "kerrcat: warning: grid margin around the constellation is below 3; \
             coverage may fail"
        );
    }
    let grid = wigner(&state, &spec)?;
    Ok(match format {
        Format::Json => {
            let doc = json!({
                "convention": QUADRATURE_CONVENTION,
                "spec": {
                    "x_min": spec.x_min,
                    "x_max": spec.x_max,
                    "p_min": spec.p_min,
                    "p_max": spec.p_max,
                    "nx": spec.nx,
                    "np": spec.np,
                },
                "integral": grid.integral(),
                "min": grid.min_value(),
                "max": grid.max_value(),
                "values": grid.values(),
            });
            format!("{:#}\n", doc)
        }
        Format::Csv => {
            let mut out = String::new();
            let _ = writeln!(out, "# wigner grid: rows = x index, columns = p index");
            let _ = writeln!(out, "# convention: {QUADRATURE_CONVENTION}");
            let _ = writeln!(
                out,
                "# x_min={} x_max={} p_min={} p_max={} nx={} np={}",
                spec.x_min, spec.x_max, spec.p_min, spec.p_max, spec.nx, spec.np
            );
            for ix in 0..spec.nx {
                let row: Vec<String> = (0..spec.np)
                    .map(|ip| grid.value(ix, ip).to_string())
                    .collect();
                let _ = writeln!(out, "{}", row.join(","));
            }
            out
        }
    })
}

#[allow(clippy::too_many_arguments)]
fn cmd_sample(
    n: usize,
    alpha: f64,
    target: Option<(usize, usize)>,
    xm: Option<f64>,
    seed: u64,
    count: usize,
    window: f64,
    source: SampleSource,
) -> Result<String, CliError> {
    if count == 0 {
        return Err(CliError::Config("--count must be at least 1".into()));
    }
    if !(window > 0.0 && window.is_finite()) {
        return Err(CliError::Config("--window must be positive".into()));
    }
    let (two_mode, x_m, config_json_val): (TwoModeState, f64, Value) = match source {
        SampleSource::Vacuum => {
            let two = TwoModeState::product(ComplexAmplitude::zero(), ComplexAmplitude::zero());
            (two, xm.unwrap_or(0.0), json!({ "state": "vacuum" }))
        }
        SampleSource::Scheme => {
            let (k, l) = target.ok_or_else(|| {
                CliError::Config("--target is required for the scheme state".into())
            })?;
            let config = SchemeConfig::new(alpha, n, k, l)?;
            let selection = xm.map_or(XmSelection::TrackPeak, XmSelection::Fixed);
            let x_m = selection.resolve(&config);
            (scheme_two_mode(&config), x_m, config_json(&config, x_m))
        }
    };
    let samples = sample_homodyne(&two_mode, seed, count);
    let mean = samples.iter().sum::<f64>() / count as f64;
    let variance = samples.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / count as f64;
    let inside = samples.iter().filter(|x| (**x - x_m).abs() <= window).count();
    let density = Mode3Density::new(&two_mode);
    let window_probability = density.integral(x_m - window, x_m + window, 2001);
    let doc = json!({
        "config": config_json_val,
        "seed": seed,
        "count": count,
        "x_m": x_m,
        "window": window,
        "mean": mean,
        "variance": variance,
        "min": samples.iter().copied().fold(f64::INFINITY, f64::min),
        "max": samples.iter().copied().fold(f64::NEG_INFINITY, f64::max),
        "success_fraction": inside as f64 / count as f64,
        "window_probability": window_probability,
    });
    Ok(format!("{:#}\n", doc))
}
