//! CSV and JSON emission. Floats use `{:?}` formatting: the shortest decimal
//! that round-trips, switching to exponent form for very small or large values.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

use serde::Serialize;

use crate::diagnostics::{momentum, CheckReport, DiagnosticsRecord, InformationalCheck};
use crate::error::Result;
use crate::evolution::{RunStats, Snapshot, Termination};

#[derive(Debug, Clone, Serialize)]
pub struct RunReport {
    pub termination: Termination,
    pub final_time: f64,
    pub exit_code: i32,
    pub checks: Vec<CheckReport>,
    pub informational: Vec<InformationalCheck>,
    pub warnings: Vec<String>,
    pub stats: RunStats,
}

fn csv_row(w: &mut impl Write, values: impl IntoIterator<Item = f64>) -> std::io::Result<()> {
    let mut first = true;
    for v in values {
        if !first {
            w.write_all(b",")?;
        }
        first = false;
        write!(w, "{v:?}")?;
    }
    w.write_all(b"\n")
}

/// Column names of `records.csv` for monitored order `n`.
pub fn records_header(n: usize) -> Vec<String> {
    let mut h = vec!["t".to_string()];
    h.extend((0..=n).map(|m| format!("I_{m}")));
    h.extend((0..n).map(|m| format!("k_{m}")));
    h.extend((0..=n).map(|m| format!("kappa_{m}")));
    h.extend(["u_L1", "u_int", "m_int", "m_L1", "m_min", "ux_sup"].map(String::from));
    h.extend((0..=n).map(|m| format!("env_{m}")));
    h.push("h1_env".into());
    h
}

pub fn write_records(path: &Path, records: &[DiagnosticsRecord], n: usize) -> Result<()> {
    let mut w = BufWriter::new(File::create(path)?);
    writeln!(w, "{}", records_header(n).join(","))?;
    for r in records {
        let row = std::iter::once(r.t)
            .chain(r.energies.iter().copied())
            .chain(r.k.iter().copied())
            .chain(r.kappa.iter().copied())
            .chain([r.u_l1, r.u_int, r.m_int, r.m_l1, r.m_min, r.ux_sup])
            .chain(r.gronwall_envelope.iter().copied())
            .chain(std::iter::once(r.h1_envelope));
        csv_row(&mut w, row)?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_snapshots(path: &Path, snapshots: &[Snapshot]) -> Result<()> {
    let mut w = BufWriter::new(File::create(path)?);
    writeln!(w, "t,x,u,m")?;
    for s in snapshots {
        let m = momentum(&s.u)?;
        let grid = s.u.grid();
        for (j, (u, m)) in s.u.values().iter().zip(m.values()).enumerate() {
            csv_row(&mut w, [s.t, grid.node(j), *u, *m])?;
        }
    }
    w.flush()?;
    Ok(())
}

pub fn write_report(path: &Path, report: &RunReport) -> Result<()> {
    let mut w = BufWriter::new(File::create(path)?);
    serde_json::to_writer_pretty(&mut w, report).map_err(std::io::Error::from)?;
    w.write_all(b"\n")?;
    w.flush()?;
    Ok(())
}
