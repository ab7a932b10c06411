//! Run configuration: command-line flags layered over an optional `key = value` file.
//!
//! Keys in the file use the long flag names (`slice-gap = 3`). Flags given on the
//! command line win over the file; anything left unset falls back to the defaults.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use anyhow::{Context, Result};
use clap::Args;

use tprism_core::generators::{GeneratorConfig, Model};
use tprism_core::prism::BuildOptions;
use tprism_core::{ContactSequence, WeightConfig, WeightFn};

/// Environment variable naming the default output directory.
pub const OUT_DIR_ENV: &str = "TPRISM_OUT_DIR";

#[derive(Debug, Clone, Default, Args)]
pub struct RunArgs {
    /// key=value configuration file; command-line flags take precedence
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,

    /// contact file with `t i j` lines
    #[arg(long, global = true)]
    pub input: Option<PathBuf>,
    /// synthetic model: er, ad or bursty
    #[arg(long, global = true)]
    pub model: Option<String>,
    #[arg(long, global = true)]
    pub n: Option<u32>,
    /// time horizon (number of steps for the AD model)
    #[arg(long = "T", global = true)]
    pub horizon: Option<f64>,
    #[arg(long, global = true)]
    pub lambda: Option<f64>,
    #[arg(long, global = true)]
    pub a_min: Option<f64>,
    #[arg(long, global = true)]
    pub a_max: Option<f64>,
    #[arg(long, global = true)]
    pub alpha: Option<f64>,
    #[arg(long, global = true)]
    pub m: Option<u32>,
    /// Weibull shape of the bursty model
    #[arg(long, global = true)]
    pub shape: Option<f64>,
    /// Weibull scale of the bursty model
    #[arg(long, global = true)]
    pub scale: Option<f64>,
    #[arg(long, global = true)]
    pub seed: Option<u64>,

    #[arg(long, global = true)]
    pub bin_width: Option<f64>,
    /// keep only contacts within this duration from the window start
    #[arg(long, global = true)]
    pub window: Option<f64>,
    /// window start (defaults to the first contact time)
    #[arg(long, global = true)]
    pub window_start: Option<f64>,

    /// maximum slice gap K
    #[arg(long, global = true)]
    pub slice_gap: Option<u32>,
    /// unit, reciprocal or exp:LAMBDA
    #[arg(long, global = true)]
    pub weight_fn: Option<String>,
    #[arg(long, global = true)]
    pub diagonal_factor: Option<f64>,
    /// cap on the clique dimension in each snapshot
    #[arg(long, global = true)]
    pub max_dim: Option<usize>,
    /// only build prisms between consecutive active slices
    #[arg(long, global = true)]
    pub consecutive_only: bool,

    /// output directory (defaults to $TPRISM_OUT_DIR)
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Source {
    File(PathBuf),
    Synthetic(GeneratorConfig),
}

/// Fully resolved configuration.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub source: Source,
    pub bin_width: f64,
    pub window: Option<(Option<f64>, f64)>,
    pub options: BuildOptions,
    pub weights: WeightConfig,
    pub out: Option<PathBuf>,
}

pub fn usage(msg: impl Into<String>) -> anyhow::Error {
    anyhow::anyhow!(msg.into())
}

const KNOWN_KEYS: [&str; 21] = [
    "input",
    "model",
    "n",
    "T",
    "lambda",
    "a-min",
    "a-max",
    "alpha",
    "m",
    "shape",
    "scale",
    "seed",
    "bin-width",
    "window",
    "window-start",
    "slice-gap",
    "weight-fn",
    "diagonal-factor",
    "max-dim",
    "consecutive-only",
    "out",
];

pub fn parse_config_file(text: &str) -> Result<BTreeMap<String, String>> {
    let mut map = BTreeMap::new();
    for (k, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (key, value) = line
            .split_once('=')
            .ok_or_else(|| usage(format!("config line {}: expected key = value", k + 1)))?;
        let key = key.trim().replace('_', "-");
        if !KNOWN_KEYS.contains(&key.as_str()) {
            return Err(usage(format!("config line {}: unknown key `{key}`", k + 1)));
        }
        map.insert(key, value.trim().to_string());
    }
    Ok(map)
}

struct Layered<'a> {
    file: &'a BTreeMap<String, String>,
}

impl Layered<'_> {
    fn get<T: FromStr>(&self, flag: Option<T>, key: &str) -> Result<Option<T>>
    where
        T::Err: std::fmt::Display,
    {
        if flag.is_some() {
            return Ok(flag);
        }
        match self.file.get(key) {
            None => Ok(None),
            Some(v) => v
                .parse()
                .map(Some)
                .map_err(|e| usage(format!("config key `{key}`: cannot parse `{v}`: {e}"))),
        }
    }
}

impl RunArgs {
    pub fn resolve(&self) -> Result<RunConfig> {
        let file = match &self.config {
            Some(p) => {
                let text = std::fs::read_to_string(p)
                    .map_err(|e| usage(format!("cannot read config {}: {e}", p.display())))?;
                parse_config_file(&text)?
            }
            None => BTreeMap::new(),
        };
        let cfg = Layered { file: &file };

        let input: Option<PathBuf> = cfg.get(self.input.clone(), "input")?;
        let model: Option<String> = cfg.get(self.model.clone(), "model")?;
        let source = match (input, model) {
            (Some(_), Some(_)) => return Err(usage("give either --input or --model, not both")),
            (None, None) => return Err(usage("no contact source: give --input FILE or --model er|ad|bursty")),
            (Some(path), None) => Source::File(path),
            (None, Some(name)) => {
                let model = match Model::default_for(&name).map_err(|e| usage(e.to_string()))? {
                    Model::Er { lambda } => Model::Er { lambda: cfg.get(self.lambda, "lambda")?.unwrap_or(lambda) },
                    Model::Ad { a_min, a_max, alpha, m } => Model::Ad {
                        a_min: cfg.get(self.a_min, "a-min")?.unwrap_or(a_min),
                        a_max: cfg.get(self.a_max, "a-max")?.unwrap_or(a_max),
                        alpha: cfg.get(self.alpha, "alpha")?.unwrap_or(alpha),
                        m: cfg.get(self.m, "m")?.unwrap_or(m),
                    },
                    Model::Bursty { shape, scale } => Model::Bursty {
                        shape: cfg.get(self.shape, "shape")?.unwrap_or(shape),
                        scale: cfg.get(self.scale, "scale")?.unwrap_or(scale),
                    },
                };
                Source::Synthetic(GeneratorConfig {
                    n_nodes: cfg.get(self.n, "n")?.unwrap_or(25),
                    horizon: cfg.get(self.horizon, "T")?.unwrap_or(50.0),
                    model,
                    seed: cfg.get(self.seed, "seed")?.unwrap_or(0),
                })
            }
        };

        let window_len: Option<f64> = cfg.get(self.window, "window")?;
        let window_start: Option<f64> = cfg.get(self.window_start, "window-start")?;
        if window_start.is_some() && window_len.is_none() {
            return Err(usage("--window-start needs --window"));
        }

        let consecutive_only = self.consecutive_only
            || cfg.get(None::<bool>, "consecutive-only")?.unwrap_or(false);
        let slice_gap = cfg.get(self.slice_gap, "slice-gap")?.unwrap_or(3);
        if slice_gap < 1 {
            return Err(usage("--slice-gap must be at least 1"));
        }
        let options = BuildOptions {
            slice_gap,
            max_dim: cfg.get(self.max_dim, "max-dim")?,
            consecutive_only,
        };
        let g: WeightFn = cfg
            .get(self.weight_fn.clone(), "weight-fn")?
            .map(|s: String| s.parse().map_err(|e: tprism_core::Error| usage(e.to_string())))
            .transpose()?
            .unwrap_or(WeightFn::Reciprocal);
        let weights = WeightConfig {
            g,
            diagonal_factor: cfg.get(self.diagonal_factor, "diagonal-factor")?.unwrap_or(0.5),
        };
        weights.validate().map_err(|e| usage(e.to_string()))?;

        let out = cfg
            .get(self.out.clone(), "out")?
            .or_else(|| std::env::var_os(OUT_DIR_ENV).map(PathBuf::from));

        Ok(RunConfig {
            source,
            bin_width: cfg.get(self.bin_width, "bin-width")?.unwrap_or(5.0),
            window: window_len.map(|len| (window_start, len)),
            options,
            weights,
            out,
        })
    }
}

impl RunConfig {
    /// Raw contacts from the file or generator, windowed but not binned.
    pub fn contacts(&self) -> Result<ContactSequence> {
        let raw = match &self.source {
            Source::File(path) => read_file(path)?,
            Source::Synthetic(g) => g.generate().map_err(|e| usage(e.to_string()))?,
        };
        match self.window {
            None => Ok(raw),
            Some((start, len)) => {
                let start = match start {
                    Some(s) => s,
                    None => match raw.events().first() {
                        Some(e) => e.t,
                        None => return Ok(raw),
                    },
                };
                raw.window(start, start + len).map_err(|e| usage(e.to_string()))
            }
        }
    }

    /// Windowed and binned contacts.
    pub fn binned(&self) -> Result<ContactSequence> {
        self.contacts()?.bin(self.bin_width).map_err(|e| usage(e.to_string()))
    }

    pub fn out_dir(&self) -> Result<&Path> {
        self.out
            .as_deref()
            .ok_or_else(|| usage(format!("no output directory: pass --out DIR or set {OUT_DIR_ENV}")))
    }
}

fn read_file(path: &Path) -> Result<ContactSequence> {
    let file = std::fs::File::open(path).map_err(|e| usage(format!("cannot open {}: {e}", path.display())))?;
    tprism_core::contact_stream::read_contacts(std::io::BufReader::new(file))
        .with_context(|| format!("reading {}", path.display()))
}

pub fn ensure_dir(dir: &Path) -> Result<()> {
    std::fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))
}

pub fn write(dir: &Path, name: &str, contents: &str) -> Result<()> {
    let path = dir.join(name);
    std::fs::write(&path, contents).with_context(|| format!("writing {}", path.display()))
}
