//! Run configuration: flags first, then any values from a `--config` file.

use crate::args::{CommonArgs, Format};
use anyhow::{bail, Context};
use rashba::green::QuadratureControl;
use rashba::specfun::SeriesControl;
use rashba::{Coupling, Exec, C64};
use serde::{Deserialize, Serialize};
use std::path::{Path, PathBuf};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Output {
    pub path: Option<PathBuf>,
    pub format: Option<Format>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunConfig {
    pub coupling: Coupling,
    pub time: C64,
    pub grid_n: usize,
    pub box_length: f64,
    pub series: SeriesControl,
    pub quadrature: QuadratureControl,
    pub output: Output,
    #[serde(skip)]
    pub exec: Exec,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct FileCoupling {
    alpha: Option<f64>,
    beta: Option<f64>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct FileTime {
    re: Option<f64>,
    im: Option<f64>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct FileGrid {
    n: Option<usize>,
    box_length: Option<f64>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct FileTolerances {
    series_rel_tol: Option<f64>,
    series_max_terms: Option<usize>,
    quad_abs_tol: Option<f64>,
    eps_sequence: Option<Vec<f64>>,
    t_max: Option<f64>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct FileOutput {
    path: Option<PathBuf>,
    format: Option<Format>,
}

/// Layout of the TOML file; every key is optional.
#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct ConfigFile {
    #[serde(default)]
    coupling: FileCoupling,
    #[serde(default)]
    time: FileTime,
    #[serde(default)]
    grid: FileGrid,
    #[serde(default)]
    tolerances: FileTolerances,
    #[serde(default)]
    output: FileOutput,
}

fn load(path: &Path) -> anyhow::Result<ConfigFile> {
    let text = std::fs::read_to_string(path).with_context(|| format!("reading config {}", path.display()))?;
    toml::from_str(&text).with_context(|| format!("parsing config {}", path.display()))
}

impl RunConfig {
    pub fn resolve(args: &CommonArgs) -> anyhow::Result<RunConfig> {
        let file = match &args.config {
            Some(p) => load(p)?,
            None => ConfigFile::default(),
        };
        let alpha = file.coupling.alpha.unwrap_or(args.alpha);
        let beta = file.coupling.beta.unwrap_or(args.beta);
        let t = file.tolerances;
        let defaults = QuadratureControl::default();
        let cfg = RunConfig {
            coupling: Coupling::new(alpha, beta)?,
            time: C64::new(file.time.re.unwrap_or(args.t_re), file.time.im.unwrap_or(args.t_im)),
            grid_n: file.grid.n.unwrap_or(args.grid_n),
            box_length: file.grid.box_length.unwrap_or(args.box_length),
            series: SeriesControl {
                rel_tol: t.series_rel_tol.unwrap_or(SeriesControl::default().rel_tol),
                max_terms: t.series_max_terms.unwrap_or(SeriesControl::default().max_terms),
            },
            quadrature: QuadratureControl {
                eps_sequence: t.eps_sequence.unwrap_or(defaults.eps_sequence),
                abs_tol: t.quad_abs_tol.unwrap_or(args.tol),
                t_max: t.t_max.unwrap_or(defaults.t_max),
            },
            output: Output {
                path: file.output.path.or_else(|| args.out.clone()),
                format: file.output.format.or(args.format),
            },
            exec: if args.sequential { Exec::Sequential } else { Exec::Parallel },
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> anyhow::Result<()> {
        if self.grid_n < 8 || !self.grid_n.is_power_of_two() {
            bail!("grid-n must be a power of two >= 8, got {}", self.grid_n);
        }
        if !(self.box_length > 0.0 && self.box_length.is_finite()) {
            bail!("box length must be positive, got {}", self.box_length);
        }
        if !(self.time.re.is_finite() && self.time.im.is_finite()) {
            bail!("time must be finite");
        }
        self.series.validate()?;
        self.quadrature.validate()?;
        Ok(())
    }

    /// Output format for a command, falling back to its default.
    pub fn format_or(&self, default: Format) -> Format {
        self.output.format.unwrap_or(default)
    }
}
