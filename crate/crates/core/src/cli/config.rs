//! TOML run and sweep configuration.
//!
//! ```toml
//! [grid]
//! kind = "periodic"      # or "line", which also needs `halfwidth`
//! n_points = 512
//!
//! [initial]
//! kind = "gaussian_momentum"
//! amplitude = 1.0
//! center = 0.5
//! width = 0.05
//!
//! [solver]              # every key optional
//! t_end = 5.0
//!
//! [output]              # every key optional
//! dir = "out/gaussian"
//!
//! [sweep]               # `sweep` only; each axis optional
//! amplitude = [0.5, 1.0]
//! n_points = [256, 512]
//! ```

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{FlowError, Result};
use crate::evolution::SolverConfig;
use crate::grid::{DomainKind, Grid1D};
use crate::initdata::InitialDataSpec;

/// Environment variable that replaces the output root.
pub const OUTDIR_ENV: &str = "NONLOCAL_FLOW_OUTDIR";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridSpec {
    pub kind: DomainKind,
    pub n_points: usize,
    /// Half-width `L` of the line box `[−L, L)`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub halfwidth: Option<f64>,
}

impl GridSpec {
    pub fn build(&self) -> Result<Grid1D> {
        match (self.kind, self.halfwidth) {
            (DomainKind::Periodic, None) => Grid1D::periodic(self.n_points),
            (DomainKind::Periodic, Some(_)) => Err(FlowError::InvalidConfig(
                "grid.halfwidth only applies to kind = \"line\"".into(),
            )),
            (DomainKind::Line, Some(l)) => Grid1D::line(self.n_points, l),
            (DomainKind::Line, None) => Err(FlowError::InvalidConfig(
                "grid.halfwidth is required for kind = \"line\"".into(),
            )),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct OutputSpec {
    pub dir: PathBuf,
    pub snapshots: bool,
    pub records: bool,
    pub report: bool,
}

impl Default for OutputSpec {
    fn default() -> Self {
        Self {
            dir: PathBuf::from("output"),
            snapshots: true,
            records: true,
            report: true,
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepAxes {
    pub amplitude: Option<Vec<f64>>,
    pub n_points: Option<Vec<usize>>,
    pub width: Option<Vec<f64>>,
    pub initial: Option<Vec<InitialDataSpec>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub grid: GridSpec,
    pub initial: InitialDataSpec,
    #[serde(default)]
    pub solver: SolverConfig,
    #[serde(default)]
    pub output: OutputSpec,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sweep: Option<SweepAxes>,
}

impl RunConfig {
    pub fn parse(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| FlowError::InvalidConfig(e.to_string()))
    }

    /// Reads the file, resolves relative paths against its directory, and
    /// validates every nested spec.
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| FlowError::InputFile {
            path: path.to_path_buf(),
            message: e.to_string(),
        })?;
        let mut cfg = Self::parse(&text).map_err(|e| match e {
            FlowError::InvalidConfig(msg) => FlowError::InputFile {
                path: path.to_path_buf(),
                message: msg,
            },
            other => other,
        })?;
        let base = path.parent().unwrap_or(Path::new("."));
        cfg.initial.resolve_paths(base);
        if let Some(specs) = cfg.sweep.as_mut().and_then(|s| s.initial.as_mut()) {
            for s in specs {
                s.resolve_paths(base);
            }
        }
        if cfg.output.dir.is_relative() {
            cfg.output.dir = base.join(&cfg.output.dir);
        }
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        self.grid.build()?;
        self.initial.validate()?;
        self.solver.validate()
    }

    /// Output directory after applying [`OUTDIR_ENV`].
    pub fn output_dir(&self) -> PathBuf {
        resolve_output_dir(&self.output.dir, std::env::var_os(OUTDIR_ENV).map(PathBuf::from))
    }
}

/// With an override root, the configured directory keeps only its final
/// component and is placed under the root.
pub fn resolve_output_dir(dir: &Path, root: Option<PathBuf>) -> PathBuf {
    match root {
        Some(root) => root.join(dir.file_name().unwrap_or(dir.as_os_str())),
        None => dir.to_path_buf(),
    }
}
