use std::collections::BTreeSet;
use std::io::Write;
use std::path::{Path, PathBuf};

use rayon::prelude::*;

use super::config::{RunConfig, SweepAxes};
use super::output::{write_records, write_report, write_snapshots, RunReport};
use crate::diagnostics::CheckId;
use crate::error::{FlowError, Result};
use crate::evolution::{simulate, Termination};
use crate::initdata::{build_initial_field, InitialDataSpec};
use crate::kernel::{NonlocalOperators, SpectralOperators};
use crate::verify;

/// Process exit status. Sweeps report the most severe run, in the order
/// `Ok < Violations < EarlyTermination < ConfigError`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExitStatus {
    Ok,
    ConfigError,
    Violations,
    EarlyTermination,
}

impl ExitStatus {
    pub fn code(self) -> i32 {
        match self {
            ExitStatus::Ok => 0,
            ExitStatus::ConfigError => 1,
            ExitStatus::Violations => 2,
            ExitStatus::EarlyTermination => 3,
        }
    }

    fn severity(self) -> u8 {
        match self {
            ExitStatus::Ok => 0,
            ExitStatus::Violations => 1,
            ExitStatus::EarlyTermination => 2,
            ExitStatus::ConfigError => 3,
        }
    }

    pub fn worst(self, other: Self) -> Self {
        if other.severity() > self.severity() {
            other
        } else {
            self
        }
    }
}

/// A finished run: its report and where it was written.
#[derive(Debug, Clone)]
pub struct RunOutcome {
    pub status: ExitStatus,
    pub report: RunReport,
    pub dir: PathBuf,
}

/// Simulates one configuration and writes its artifacts into `dir`.
pub fn execute_run(cfg: &RunConfig, dir: &Path) -> Result<RunOutcome> {
    cfg.validate()?;
    let grid = cfg.grid.build()?;
    let init = build_initial_field(&cfg.initial, &grid)?;
    let result = simulate(&init.u0, &cfg.solver)?;
    std::fs::create_dir_all(dir)?;

    let status = if result.termination != Termination::Completed {
        ExitStatus::EarlyTermination
    } else if result.violations().next().is_some() {
        ExitStatus::Violations
    } else {
        ExitStatus::Ok
    };
    let mut warnings = init.warnings;
    warnings.extend(result.warnings.iter().cloned());
    let report = RunReport {
        termination: result.termination,
        final_time: result.final_time(),
        exit_code: status.code(),
        checks: result.reports.clone(),
        informational: result.informational.clone(),
        warnings,
        stats: result.stats.clone(),
    };
    if cfg.output.snapshots {
        write_snapshots(&dir.join("snapshots.csv"), &result.snapshots)?;
    }
    if cfg.output.records {
        write_records(&dir.join("records.csv"), &result.records, cfg.solver.max_order)?;
    }
    if cfg.output.report {
        write_report(&dir.join("report.json"), &report)?;
    }
    Ok(RunOutcome {
        status,
        report,
        dir: dir.to_path_buf(),
    })
}

fn print_outcome(out: &mut dyn Write, outcome: &RunOutcome) -> std::io::Result<()> {
    let r = &outcome.report;
    writeln!(out, "termination: {:?} at t = {}", r.termination, r.final_time)?;
    for c in &r.checks {
        let status = if c.passed { "PASS" } else { "FAIL" };
        writeln!(
            out,
            "{status}  {:<28} worst margin {:>12.4e} at t = {}",
            c.label(),
            c.worst_margin,
            c.time_of_worst
        )?;
    }
    writeln!(out, "output: {}", outcome.dir.display())
}

pub fn cmd_run(config: &Path, out: &mut dyn Write, err: &mut dyn Write) -> ExitStatus {
    let cfg = match RunConfig::load(config) {
        Ok(cfg) => cfg,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            return ExitStatus::ConfigError;
        }
    };
    match execute_run(&cfg, &cfg.output_dir()) {
        Ok(outcome) => {
            for w in &outcome.report.warnings {
                let _ = writeln!(err, "warning: {w}");
            }
            let _ = print_outcome(out, &outcome);
            outcome.status
        }
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            ExitStatus::ConfigError
        }
    }
}

pub fn cmd_verify(seed: u64, out: &mut dyn Write, err: &mut dyn Write) -> ExitStatus {
    verify_with(&SpectralOperators, seed, out, err)
}

/// `verify` against arbitrary operators, so a broken implementation can be
/// shown to fail.
pub fn verify_with(
    ops: &dyn NonlocalOperators,
    seed: u64,
    out: &mut dyn Write,
    err: &mut dyn Write,
) -> ExitStatus {
    match verify::run_suite(ops, seed) {
        Ok(checks) => {
            let _ = out.write_all(verify::render(seed, &checks).as_bytes());
            if checks.iter().all(verify::VerifyCheck::passed) {
                ExitStatus::Ok
            } else {
                ExitStatus::Violations
            }
        }
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            ExitStatus::ConfigError
        }
    }
}

/// One point of the sweep grid.
#[derive(Debug, Clone)]
pub struct SweepPoint {
    pub id: String,
    pub amplitude: Option<f64>,
    pub width: Option<f64>,
    pub config: RunConfig,
}

fn set_amplitude(spec: &mut InitialDataSpec, value: f64) -> Result<()> {
    match spec {
        InitialDataSpec::GaussianMomentum { amplitude, .. }
        | InitialDataSpec::CosineBumpMomentum { amplitude, .. }
        | InitialDataSpec::RandomNonnegMomentum { amplitude, .. } => *amplitude = value,
        InitialDataSpec::MollifiedPeakon { height, .. } => *height = value,
        other => {
            return Err(FlowError::InvalidConfig(format!(
                "sweep axis `amplitude` does not apply to kind `{}`",
                other.kind_name()
            )))
        }
    }
    Ok(())
}

fn set_width(spec: &mut InitialDataSpec, value: f64) -> Result<()> {
    match spec {
        InitialDataSpec::GaussianMomentum { width, .. } => *width = value,
        InitialDataSpec::MollifiedPeakon { mollify_width, .. } => *mollify_width = value,
        InitialDataSpec::CosineBumpMomentum { support_width, .. } => *support_width = value,
        other => {
            return Err(FlowError::InvalidConfig(format!(
                "sweep axis `width` does not apply to kind `{}`",
                other.kind_name()
            )))
        }
    }
    Ok(())
}

fn axis<T: Clone>(values: &Option<Vec<T>>, name: &str) -> Result<Option<Vec<T>>> {
    match values {
        Some(v) if v.is_empty() => Err(FlowError::InvalidConfig(format!("sweep axis `{name}` is empty"))),
        other => Ok(other.clone()),
    }
}

/// Cartesian product `initial × n_points × amplitude × width`; axes not given
/// keep the base configuration's value.
pub fn plan_sweep(base: &RunConfig) -> Result<Vec<SweepPoint>> {
    let empty = SweepAxes::default();
    let axes = base.sweep.as_ref().unwrap_or(&empty);
    if axes == &empty {
        return Err(FlowError::InvalidConfig("sweep grid is empty: no [sweep] axes given".into()));
    }
    let initials = axis(&axes.initial, "initial")?.unwrap_or_else(|| vec![base.initial.clone()]);
    let sizes = axis(&axes.n_points, "n_points")?.unwrap_or_else(|| vec![base.grid.n_points]);
    let amps: Vec<Option<f64>> = axis(&axes.amplitude, "amplitude")?
        .map_or(vec![None], |v| v.into_iter().map(Some).collect());
    let widths: Vec<Option<f64>> = axis(&axes.width, "width")?
        .map_or(vec![None], |v| v.into_iter().map(Some).collect());

    let mut points = Vec::new();
    for init in &initials {
        for &n in &sizes {
            for &a in &amps {
                for &w in &widths {
                    let mut config = base.clone();
                    config.sweep = None;
                    config.initial = init.clone();
                    config.grid.n_points = n;
                    if let Some(a) = a {
                        set_amplitude(&mut config.initial, a)?;
                    }
                    if let Some(w) = w {
                        set_width(&mut config.initial, w)?;
                    }
                    points.push(SweepPoint {
                        id: format!("run_{:03}", points.len()),
                        amplitude: a,
                        width: w,
                        config,
                    });
                }
            }
        }
    }
    Ok(points)
}

fn opt(v: Option<f64>) -> String {
    v.map_or_else(String::new, |v| format!("{v:?}"))
}

fn write_summary(
    path: &Path,
    points: &[SweepPoint],
    results: &[std::result::Result<RunOutcome, String>],
) -> Result<()> {
    let labels: BTreeSet<(CheckId, Option<usize>, String)> = results
        .iter()
        .flatten()
        .flat_map(|o| o.report.checks.iter().map(|c| (c.check_id, c.order, c.label())))
        .collect();
    let mut w = std::io::BufWriter::new(std::fs::File::create(path)?);
    write!(w, "run_id,kind,n_points,amplitude,width,termination,exit_code,error")?;
    for (_, _, label) in &labels {
        write!(w, ",{label}")?;
    }
    writeln!(w)?;
    for (p, r) in points.iter().zip(results) {
        write!(
            w,
            "{},{},{},{},{}",
            p.id,
            p.config.initial.kind_name(),
            p.config.grid.n_points,
            opt(p.amplitude),
            opt(p.width)
        )?;
        match r {
            Ok(o) => {
                write!(w, ",{:?},{},", o.report.termination, o.status.code())?;
                for (id, order, _) in &labels {
                    let margin = o
                        .report
                        .checks
                        .iter()
                        .find(|c| c.check_id == *id && c.order == *order)
                        .map(|c| c.worst_margin);
                    write!(w, ",{}", opt(margin))?;
                }
            }
            Err(e) => {
                let msg = e.replace(['"', '\n'], " ");
                write!(w, ",error,{},\"{msg}\"", ExitStatus::ConfigError.code())?;
                for _ in &labels {
                    write!(w, ",")?;
                }
            }
        }
        writeln!(w)?;
    }
    w.flush()?;
    Ok(())
}

pub fn cmd_sweep(config: &Path, jobs: Option<usize>, out: &mut dyn Write, err: &mut dyn Write) -> ExitStatus {
    let fail = |err: &mut dyn Write, e: FlowError| {
        let _ = writeln!(err, "error: {e}");
        ExitStatus::ConfigError
    };
    let base = match RunConfig::load(config) {
        Ok(cfg) => cfg,
        Err(e) => return fail(err, e),
    };
    let points = match plan_sweep(&base) {
        Ok(p) => p,
        Err(e) => return fail(err, e),
    };
    let root = base.output_dir();
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(j) = jobs {
        builder = builder.num_threads(j.max(1));
    }
    let pool = match builder.build() {
        Ok(p) => p,
        Err(e) => return fail(err, FlowError::InvalidConfig(e.to_string())),
    };
    let results: Vec<std::result::Result<RunOutcome, String>> = pool.install(|| {
        points
            .par_iter()
            .map(|p| execute_run(&p.config, &root.join(&p.id)).map_err(|e| e.to_string()))
            .collect()
    });
    if let Err(e) = std::fs::create_dir_all(&root)
        .map_err(FlowError::from)
        .and_then(|_| write_summary(&root.join("summary.csv"), &points, &results))
    {
        return fail(err, e);
    }

    let mut status = ExitStatus::Ok;
    for (p, r) in points.iter().zip(&results) {
        let s = match r {
            Ok(o) => {
                let _ = writeln!(out, "{}  {:?}  exit {}", p.id, o.report.termination, o.status.code());
                o.status
            }
            Err(e) => {
                let _ = writeln!(err, "{}: error: {e}", p.id);
                ExitStatus::ConfigError
            }
        };
        status = status.worst(s);
    }
    let _ = writeln!(out, "summary: {}", root.join("summary.csv").display());
    status
}
