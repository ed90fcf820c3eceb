use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use lefschetz_lens::catalog::{ControlParams, ModelId, ShapeParam};

use crate::Failure;

pub const DEFAULT_TRIALS: usize = 1000;
pub const DEFAULT_SEED: u64 = 42;
pub const DEFAULT_TOL: f64 = 1e-8;
pub const DEFAULT_SAMPLES: usize = 1000;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Format {
    Json,
    Csv,
}

/// Which models a command applies to.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ModelSel {
    One(ModelId),
    All,
}

/// Settings gathered from flags, then the config file, then defaults.
#[derive(Clone, Debug, Default)]
pub struct RawConfig {
    pub model: Option<String>,
    pub c: Option<f64>,
    pub p: Option<f64>,
    pub y: Option<[f64; 2]>,
    pub trials: Option<usize>,
    pub seed: Option<u64>,
    pub tol: Option<f64>,
    pub window: Option<[f64; 4]>,
    pub resolution: Option<[usize; 2]>,
    pub samples: Option<usize>,
    pub output: Option<PathBuf>,
    pub format: Option<Format>,
}

impl RawConfig {
    /// Fill unset fields from `other`.
    pub fn or(self, other: RawConfig) -> RawConfig {
        RawConfig {
            model: self.model.or(other.model),
            c: self.c.or(other.c),
            p: self.p.or(other.p),
            y: self.y.or(other.y),
            trials: self.trials.or(other.trials),
            seed: self.seed.or(other.seed),
            tol: self.tol.or(other.tol),
            window: self.window.or(other.window),
            resolution: self.resolution.or(other.resolution),
            samples: self.samples.or(other.samples),
            output: self.output.or(other.output),
            format: self.format.or(other.format),
        }
    }

    pub fn resolve(self) -> Result<RunConfig, Failure> {
        let model = match self.model.as_deref() {
            None => None,
            Some("all") => Some(ModelSel::All),
            Some(name) => Some(ModelSel::One(
                name.parse::<ModelId>()
                    .map_err(|e| Failure::usage(e.to_string()))?,
            )),
        };
        let tol = self.tol.unwrap_or(DEFAULT_TOL);
        if !(tol.is_finite() && tol > 0.0) {
            return Err(Failure::usage("--tol must be a positive number"));
        }
        Ok(RunConfig {
            model,
            c: self.c,
            p: self.p,
            y: self.y,
            trials: self.trials.unwrap_or(DEFAULT_TRIALS),
            seed: self.seed.unwrap_or(DEFAULT_SEED),
            tol,
            window: self.window,
            resolution: self.resolution,
            samples: self.samples.unwrap_or(DEFAULT_SAMPLES),
            output: self.output,
            format: self.format,
        })
    }
}

#[derive(Clone, Debug)]
pub struct RunConfig {
    pub model: Option<ModelSel>,
    pub c: Option<f64>,
    pub p: Option<f64>,
    pub y: Option<[f64; 2]>,
    pub trials: usize,
    pub seed: u64,
    pub tol: f64,
    pub window: Option<[f64; 4]>,
    pub resolution: Option<[usize; 2]>,
    pub samples: usize,
    pub output: Option<PathBuf>,
    pub format: Option<Format>,
}

impl RunConfig {
    pub fn single_model(&self) -> Result<ModelId, Failure> {
        match self.model {
            Some(ModelSel::One(id)) => Ok(id),
            Some(ModelSel::All) => Err(Failure::usage("--model all is only accepted by verify")),
            None => Err(Failure::usage("--model is required")),
        }
    }

    pub fn source(&self) -> Result<[f64; 2], Failure> {
        self.y.ok_or_else(|| Failure::usage("--y is required"))
    }

    /// Control parameters for `id`, checking that `c`/`p` match the model.
    pub fn params(&self, id: ModelId, y: [f64; 2]) -> Result<ControlParams, Failure> {
        match (id.shape_param(), self.c, self.p) {
            (ShapeParam::None, None, None) => Ok(ControlParams::source(y)),
            (ShapeParam::C, Some(c), None) => Ok(ControlParams::with_c(c, y)),
            (ShapeParam::P, None, Some(p)) => Ok(ControlParams::with_p(p, y)),
            (ShapeParam::None, ..) => {
                Err(Failure::usage(format!("{id} takes neither --c nor --p")))
            }
            (ShapeParam::C, ..) => Err(Failure::usage(format!("{id} requires --c (and no --p)"))),
            (ShapeParam::P, ..) => Err(Failure::usage(format!("{id} requires --p (and no --c)"))),
        }
    }

    pub fn format_or(&self, default: Format) -> Format {
        self.format.unwrap_or(default)
    }
}

pub fn parse_pair(s: &str) -> Result<[f64; 2], String> {
    let v = parse_list::<f64>(s, 2)?;
    Ok([v[0], v[1]])
}

pub fn parse_window(s: &str) -> Result<[f64; 4], String> {
    let v = parse_list::<f64>(s, 4)?;
    Ok([v[0], v[1], v[2], v[3]])
}

pub fn parse_resolution(s: &str) -> Result<[usize; 2], String> {
    let v = parse_list::<usize>(s, 2)?;
    Ok([v[0], v[1]])
}

pub fn parse_format(s: &str) -> Result<Format, String> {
    match s {
        "json" => Ok(Format::Json),
        "csv" => Ok(Format::Csv),
        other => Err(format!("unknown format `{other}` (expected json or csv)")),
    }
}

fn parse_list<T: std::str::FromStr>(s: &str, n: usize) -> Result<Vec<T>, String> {
    let parts: Vec<&str> = s.split(',').map(str::trim).collect();
    if parts.len() != n {
        return Err(format!("expected {n} comma-separated values, got `{s}`"));
    }
    parts
        .iter()
        .map(|p| p.parse::<T>().map_err(|_| format!("invalid number `{p}`")))
        .collect()
}

/// Read a flat `key = value` file; `#` starts a comment.
pub fn load_config_file(path: &Path) -> Result<RawConfig, Failure> {
    let text = fs::read_to_string(path)
        .map_err(|e| Failure::usage(format!("cannot read config {}: {e}", path.display())))?;
    let mut entries = BTreeMap::new();
    for (n, line) in text.lines().enumerate() {
        let line = line.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (k, v) = line.split_once('=').ok_or_else(|| {
            Failure::usage(format!(
                "{}:{}: expected key = value",
                path.display(),
                n + 1
            ))
        })?;
        entries.insert(k.trim().to_string(), v.trim().to_string());
    }
    let mut cfg = RawConfig::default();
    let bad = |k: &str, e: String| Failure::usage(format!("config key `{k}`: {e}"));
    for (k, v) in entries {
        match k.as_str() {
            "model" => cfg.model = Some(v),
            "c" => {
                cfg.c = Some(
                    v.parse()
                        .map_err(|_| bad(&k, format!("invalid number `{v}`")))?,
                )
            }
            "p" => {
                cfg.p = Some(
                    v.parse()
                        .map_err(|_| bad(&k, format!("invalid number `{v}`")))?,
                )
            }
            "y" => cfg.y = Some(parse_pair(&v).map_err(|e| bad(&k, e))?),
            "trials" => {
                cfg.trials = Some(
                    v.parse()
                        .map_err(|_| bad(&k, format!("invalid count `{v}`")))?,
                )
            }
            "seed" => {
                cfg.seed = Some(
                    v.parse()
                        .map_err(|_| bad(&k, format!("invalid seed `{v}`")))?,
                )
            }
            "tol" => {
                cfg.tol = Some(
                    v.parse()
                        .map_err(|_| bad(&k, format!("invalid number `{v}`")))?,
                )
            }
            "window" => cfg.window = Some(parse_window(&v).map_err(|e| bad(&k, e))?),
            "resolution" => cfg.resolution = Some(parse_resolution(&v).map_err(|e| bad(&k, e))?),
            "samples" => {
                cfg.samples = Some(
                    v.parse()
                        .map_err(|_| bad(&k, format!("invalid count `{v}`")))?,
                )
            }
            "output" | "output_path" => cfg.output = Some(PathBuf::from(v)),
            "format" => cfg.format = Some(parse_format(&v).map_err(|e| bad(&k, e))?),
            _ => return Err(Failure::usage(format!("unknown config key `{k}`"))),
        }
    }
    Ok(cfg)
}
