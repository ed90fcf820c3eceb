//! `lefschetz-lens`: solve lens equations of the catastrophe normal forms,
//! certify `Σ μ = 0` over random trials, decompose it on the projective
//! plane, and export caustic and image-count data.

mod config;
mod report;

use std::fs;
use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use lefschetz_lens::catalog::{instantiate, CatastropheModel, ModelId};
use lefschetz_lens::caustics::{
    beta_cusp_detect, critical_curve, image_count_grid, nearest_samples, Window,
};
use lefschetz_lens::imaging::{
    solve_images, verify_invariant, ImagingError, SamplingBox, SolveOptions, PRNG_NAME,
};
use lefschetz_lens::lefschetz::{lefschetz_total, LefschetzError};

use config::{
    load_config_file, parse_format, parse_pair, parse_resolution, parse_window, Format, ModelSel,
    RawConfig, RunConfig,
};
use report::{
    caustic_csv, sweep_csv, LefschetzOut, ModelVerifyOut, SolveOut, VerifyOut, CAUSTIC_HEADER,
};

const EXIT_OK: u8 = 0;
const EXIT_FAILED: u8 = 1;
const EXIT_INCOMPLETE: u8 = 2;
const EXIT_CAUSTIC: u8 = 3;
const EXIT_USAGE: u8 = 64;
const EXIT_UNEQUAL_DEGREES: u8 = 65;

const THREADS_ENV: &str = "LEFSCHETZ_LENS_THREADS";

/// A run that ends without (complete) output.
#[derive(Debug)]
pub struct Failure {
    pub code: u8,
    pub message: String,
}

impl Failure {
    pub fn usage(message: impl Into<String>) -> Self {
        Self {
            code: EXIT_USAGE,
            message: message.into(),
        }
    }
}

#[derive(Parser)]
#[command(
    name = "lefschetz-lens",
    version,
    about = "Magnification invariants of lensing catastrophes"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// All complex images of one source, with magnifications
    Solve(RunArgs),
    /// Monte-Carlo certification of the invariant over random trials
    Verify(RunArgs),
    /// Affine and infinity fixed-point indices of the projective map
    Lefschetz(RunArgs),
    /// Critical curve, caustic and cusp flags as CSV
    Caustic(RunArgs),
    /// Real image counts over a grid of sources as CSV
    Sweep(RunArgs),
}

#[derive(Args, Clone, Default)]
struct RunArgs {
    /// Model name, or `all` for verify
    #[arg(long)]
    model: Option<String>,
    /// Umbilic or swallowtail parameter c
    #[arg(long, allow_hyphen_values = true)]
    c: Option<f64>,
    /// Lensing-umbilic parameter p
    #[arg(long, allow_hyphen_values = true)]
    p: Option<f64>,
    /// Source position `y1,y2`
    #[arg(long, value_parser = parse_pair, allow_hyphen_values = true)]
    y: Option<[f64; 2]>,
    /// Number of random trials per model [default: 1000]
    #[arg(long)]
    trials: Option<usize>,
    /// Seed of the trial generator [default: 42]
    #[arg(long)]
    seed: Option<u64>,
    /// Acceptance tolerance [default: 1e-8]
    #[arg(long)]
    tol: Option<f64>,
    /// Source window `y1min,y1max,y2min,y2max`
    #[arg(long, value_parser = parse_window, allow_hyphen_values = true)]
    window: Option<[f64; 4]>,
    /// Grid cells `n1,n2`
    #[arg(long, value_parser = parse_resolution)]
    resolution: Option<[usize; 2]>,
    /// Points on the critical curve [default: 1000]
    #[arg(long)]
    samples: Option<usize>,
    /// Output file (stdout when absent)
    #[arg(long)]
    output: Option<PathBuf>,
    /// json or csv
    #[arg(long, value_parser = parse_format)]
    format: Option<Format>,
    /// Flat `key = value` file with defaults for the flags above
    #[arg(long)]
    config: Option<PathBuf>,
}

impl RunArgs {
    fn into_config(self) -> Result<RunConfig, Failure> {
        let file = match &self.config {
            Some(path) => load_config_file(path)?,
            None => RawConfig::default(),
        };
        RawConfig {
            model: self.model,
            c: self.c,
            p: self.p,
            y: self.y,
            trials: self.trials,
            seed: self.seed,
            tol: self.tol,
            window: self.window,
            resolution: self.resolution,
            samples: self.samples,
            output: self.output,
            format: self.format,
        }
        .or(file)
        .resolve()
    }
}

/// Output text plus the exit code to finish with.
struct Outcome {
    text: String,
    code: u8,
}

fn require_format(cfg: &RunConfig, only: Format) -> Result<(), Failure> {
    if cfg.format_or(only) != only {
        let name = if only == Format::Json { "json" } else { "csv" };
        return Err(Failure::usage(format!("this command only writes {name}")));
    }
    Ok(())
}

fn json<T: serde::Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("report serializes");
    s.push('\n');
    s
}

fn build_model(cfg: &RunConfig, id: ModelId, y: [f64; 2]) -> Result<CatastropheModel, Failure> {
    instantiate(id, cfg.params(id, y)?).map_err(|e| Failure::usage(e.to_string()))
}

fn cmd_solve(cfg: &RunConfig) -> Result<Outcome, Failure> {
    require_format(cfg, Format::Json)?;
    let id = cfg.single_model()?;
    let model = build_model(cfg, id, cfg.source()?)?;
    let (set, code) = match solve_images(&model, &SolveOptions::default()) {
        Ok(ss) => (ss, EXIT_OK),
        Err(ImagingError::IncompleteSolve { best, .. }) => (*best, EXIT_INCOMPLETE),
        Err(ImagingError::CausticSource { set, .. }) => (*set, EXIT_CAUSTIC),
        Err(e) => return Err(Failure::usage(e.to_string())),
    };
    Ok(Outcome {
        text: json(&SolveOut::from(&set)),
        code,
    })
}

fn cmd_verify(cfg: &RunConfig) -> Result<Outcome, Failure> {
    require_format(cfg, Format::Json)?;
    if cfg.c.is_some() || cfg.p.is_some() || cfg.y.is_some() {
        return Err(Failure::usage(
            "verify draws c, p and y itself; use --window to set the source box",
        ));
    }
    let ids: Vec<ModelId> = match cfg.model {
        Some(ModelSel::All) => ModelId::ALL.to_vec(),
        Some(ModelSel::One(id)) => vec![id],
        None => {
            return Err(Failure::usage(
                "--model is required (a model name or `all`)",
            ))
        }
    };
    let reports: Vec<_> = ids
        .iter()
        .map(|&id| {
            let mut domain = SamplingBox::default_for(id);
            if let Some(w) = cfg.window {
                domain = domain.with_window(w);
            }
            verify_invariant(id, cfg.trials, cfg.seed, &domain, cfg.tol)
        })
        .collect();
    let passed = reports.iter().all(|r| r.passed());
    let out = VerifyOut {
        prng: PRNG_NAME.to_string(),
        seed: cfg.seed,
        tol: cfg.tol,
        trials: cfg.trials,
        models: reports.iter().map(ModelVerifyOut::from).collect(),
        passed,
    };
    Ok(Outcome {
        text: json(&out),
        code: if passed { EXIT_OK } else { EXIT_FAILED },
    })
}

fn fmt_projective(p: &[lefschetz_lens::Complex64; 3]) -> String {
    let c = |z: lefschetz_lens::Complex64| {
        if z.im == 0.0 {
            format!("{}", z.re)
        } else {
            format!("{z}")
        }
    };
    format!("({}:{}:{})", c(p[0]), c(p[1]), c(p[2]))
}

fn cmd_lefschetz(cfg: &RunConfig) -> Result<Outcome, Failure> {
    require_format(cfg, Format::Json)?;
    let id = cfg.single_model()?;
    let model = build_model(cfg, id, cfg.source()?)?;
    match lefschetz_total(&model) {
        Ok(rep) => Ok(Outcome {
            text: json(&LefschetzOut::from(&rep)),
            code: if rep.defect() <= cfg.tol {
                EXIT_OK
            } else {
                EXIT_FAILED
            },
        }),
        Err(LefschetzError::UnequalDegrees { indeterminacy, .. }) => {
            let pts: Vec<String> = indeterminacy.iter().map(fmt_projective).collect();
            Err(Failure {
                code: EXIT_UNEQUAL_DEGREES,
                message: format!(
                    "{id} has component degrees {:?}; the homogenized map is undefined at {}",
                    id.degrees(),
                    pts.join(", ")
                ),
            })
        }
        Err(LefschetzError::Imaging(ImagingError::IncompleteSolve {
            count, expected, ..
        })) => Err(Failure {
            code: EXIT_INCOMPLETE,
            message: format!("found {count} of {expected} images"),
        }),
        Err(LefschetzError::Imaging(e @ ImagingError::CausticSource { .. })) => Err(Failure {
            code: EXIT_CAUSTIC,
            message: e.to_string(),
        }),
        Err(e) => Err(Failure {
            code: EXIT_FAILED,
            message: e.to_string(),
        }),
    }
}

fn cmd_caustic(cfg: &RunConfig) -> Result<Outcome, Failure> {
    require_format(cfg, Format::Csv)?;
    let header_only = Outcome {
        text: format!("{CAUSTIC_HEADER}\n"),
        code: EXIT_OK,
    };
    if cfg.samples == 0 {
        return Ok(header_only);
    }
    let id = cfg.single_model()?;
    let model = build_model(cfg, id, cfg.y.unwrap_or([0.0, 0.0]))?;
    let mut points = match critical_curve(&model, cfg.samples) {
        Ok(p) => p,
        Err(_) => return Ok(header_only),
    };
    let cusps = beta_cusp_detect(&model, &points);
    let mut flags = nearest_samples(&points, &cusps);
    let mut order: Vec<usize> = (0..points.len()).collect();
    order.sort_by(|&a, &b| {
        (points[a].branch, points[a].parameter_t)
            .partial_cmp(&(points[b].branch, points[b].parameter_t))
            .expect("finite parameters")
    });
    points = order.iter().map(|&k| points[k]).collect();
    flags = order.iter().map(|&k| flags[k]).collect();
    Ok(Outcome {
        text: caustic_csv(&points, &flags),
        code: EXIT_OK,
    })
}

fn cmd_sweep(cfg: &RunConfig) -> Result<Outcome, Failure> {
    require_format(cfg, Format::Csv)?;
    let id = cfg.single_model()?;
    let window = cfg
        .window
        .ok_or_else(|| Failure::usage("--window is required"))?;
    let resolution = cfg
        .resolution
        .ok_or_else(|| Failure::usage("--resolution is required"))?;
    let template = build_model(cfg, id, [0.0, 0.0])?;
    let grid = image_count_grid(
        &template,
        Window::from_array(window),
        resolution,
        &SolveOptions::default(),
    )
    .map_err(|e| Failure::usage(e.to_string()))?;
    Ok(Outcome {
        text: sweep_csv(&grid),
        code: EXIT_OK,
    })
}

fn configure_threads() -> Result<(), Failure> {
    let Ok(v) = std::env::var(THREADS_ENV) else {
        return Ok(());
    };
    let n: usize = v.trim().parse().ok().filter(|n| *n > 0).ok_or_else(|| {
        Failure::usage(format!(
            "{THREADS_ENV} must be a positive integer, got `{v}`"
        ))
    })?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| Failure::usage(e.to_string()))
}

fn write_output(path: Option<&PathBuf>, text: &str) -> Result<(), Failure> {
    let io = |e: std::io::Error| Failure {
        code: EXIT_FAILED,
        message: format!("cannot write output: {e}"),
    };
    match path {
        Some(p) => fs::write(p, text).map_err(io),
        None => {
            let mut out = std::io::stdout().lock();
            out.write_all(text.as_bytes())
                .and_then(|_| out.flush())
                .map_err(io)
        }
    }
}

type Handler = fn(&RunConfig) -> Result<Outcome, Failure>;

fn run(cli: Cli) -> Result<u8, Failure> {
    configure_threads()?;
    let (args, cmd): (RunArgs, Handler) = match cli.command {
        Command::Solve(a) => (a, cmd_solve),
        Command::Verify(a) => (a, cmd_verify),
        Command::Lefschetz(a) => (a, cmd_lefschetz),
        Command::Caustic(a) => (a, cmd_caustic),
        Command::Sweep(a) => (a, cmd_sweep),
    };
    let cfg = args.into_config()?;
    let outcome = cmd(&cfg)?;
    write_output(cfg.output.as_ref(), &outcome.text)?;
    Ok(outcome.code)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}
