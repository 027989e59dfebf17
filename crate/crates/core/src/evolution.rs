//! Method-of-lines integration of `u_t = 2uu_x + ∂ₓΛ⁻²(u² + (u²)_x)`.
//!
//! Space is discretised with Fourier multipliers, time with classical RK4
//! under step-doubling error control. Steps are additionally capped by an
//! advective stability limit, since the spectral advection operator has
//! eigenvalues up to `2‖u‖_∞ κ_N` on the imaginary axis.

use rustfft::num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::diagnostics::{CheckReport, DiagnosticsRecord, InformationalCheck, Monitor};
use crate::error::{FlowError, Result};
use crate::field::Field;
use crate::kernel::one_plus_dx_helmholtz_inverse;
use crate::spectral::{dealias, Spectrum};

/// A run stops with [`Termination::BlowupSuspected`] once `k_1 = max(‖u‖_∞, ‖u_x‖_∞)` exceeds this.
pub const BLOWUP_THRESHOLD: f64 = 1e6;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SolverConfig {
    pub t_end: f64,
    pub dt_initial: f64,
    /// Per-step local error bound (sup norm).
    pub error_tolerance: f64,
    pub dt_min: f64,
    /// Highest Sobolev order monitored, in `1..=6`.
    pub max_order: usize,
    /// Accepted steps between stored snapshots.
    pub snapshot_stride: usize,
    /// Accepted steps between diagnostics records.
    pub monitor_stride: usize,
    /// Apply the 2/3-rule filter to the nonlinear terms.
    pub dealias: bool,
    /// Fraction of the RK4 imaginary-axis stability interval used by the step cap.
    pub stability_factor: f64,
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self {
            t_end: 1.0,
            dt_initial: 1e-3,
            error_tolerance: 1e-9,
            dt_min: 1e-8,
            max_order: 3,
            snapshot_stride: 50,
            monitor_stride: 5,
            dealias: false,
            stability_factor: 2.0,
        }
    }
}

impl SolverConfig {
    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(FlowError::InvalidConfig(msg));
        if !(self.t_end.is_finite() && self.t_end > 0.0) {
            return bad(format!("t_end must be positive, got {}", self.t_end));
        }
        if !(self.dt_min > 0.0 && self.dt_min < self.dt_initial && self.dt_initial <= self.t_end) {
            return bad(format!(
                "need 0 < dt_min < dt_initial <= t_end, got dt_min = {}, dt_initial = {}, t_end = {}",
                self.dt_min, self.dt_initial, self.t_end
            ));
        }
        if self.error_tolerance.is_nan() || self.error_tolerance <= 0.0 {
            return bad(format!("error_tolerance must be positive, got {}", self.error_tolerance));
        }
        if !(1..=6).contains(&self.max_order) {
            return bad(format!("max_order must be in 1..=6, got {}", self.max_order));
        }
        if self.snapshot_stride == 0 || self.monitor_stride == 0 {
            return bad("snapshot_stride and monitor_stride must be positive".into());
        }
        if !(self.stability_factor > 0.0 && self.stability_factor < 2.0 * std::f64::consts::SQRT_2) {
            return bad(format!(
                "stability_factor must lie in (0, 2√2), got {}",
                self.stability_factor
            ));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Termination {
    Completed,
    BlowupSuspected,
    StepUnderflow,
    NonFinite,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct RhsOptions {
    pub dealias: bool,
}

#[derive(Debug, Clone)]
pub struct Snapshot {
    pub t: f64,
    pub u: Field,
}

#[derive(Debug, Clone, Default, Serialize)]
pub struct RunStats {
    pub accepted_steps: usize,
    pub rejected_steps: usize,
    pub smallest_dt: f64,
    pub largest_dt: f64,
}

#[derive(Debug, Clone)]
pub struct SimulationResult {
    pub snapshots: Vec<Snapshot>,
    pub records: Vec<DiagnosticsRecord>,
    pub termination: Termination,
    pub reports: Vec<CheckReport>,
    pub informational: Vec<InformationalCheck>,
    pub warnings: Vec<String>,
    pub stats: RunStats,
}

impl SimulationResult {
    pub fn violations(&self) -> impl Iterator<Item = &CheckReport> {
        self.reports.iter().filter(|r| !r.passed)
    }

    pub fn final_time(&self) -> f64 {
        self.snapshots.last().map_or(0.0, |s| s.t)
    }
}

/// Right-hand side `2uu_x + ∂ₓΛ⁻²(u² + (u²)_x)`.
pub fn rhs(u: &Field) -> Result<Field> {
    rhs_with(u, RhsOptions::default())
}

pub fn rhs_with(u: &Field, opts: RhsOptions) -> Result<Field> {
    let u = if opts.dealias { dealias(u) } else { u.clone() };
    let ux = Spectrum::of(&u).apply(|k| Complex64::new(0.0, k));
    let sq = u.square();
    // ∂Λ⁻²(1 + ∂) has symbol iκ(1 + iκ)/(1 + κ²)
    let nonlocal = Spectrum::of(&sq).apply(|k| Complex64::new(-k * k, k) / (1.0 + k * k));
    let mut out = u.zip_with(&ux, |a, b| 2.0 * a * b);
    out = &out + &nonlocal;
    if opts.dealias {
        out = dealias(&out);
    }
    out.ensure_finite()?;
    Ok(out)
}

/// The same right-hand side written as `2uu_x + (1+∂ₓ)Λ⁻²u² − u²`, using `∂ₓ²Λ⁻² = Λ⁻² − 1`.
pub fn rhs_cross_check(u: &Field) -> Result<Field> {
    let ux = Spectrum::of(u).apply(|k| Complex64::new(0.0, k));
    let sq = u.square();
    let p = one_plus_dx_helmholtz_inverse(&sq);
    let out = Field::from_raw(
        u.grid(),
        (0..u.len())
            .map(|i| 2.0 * u.values()[i] * ux.values()[i] + p.values()[i] - sq.values()[i])
            .collect(),
    );
    out.ensure_finite()?;
    Ok(out)
}

pub fn rk4_step(u: &Field, dt: f64) -> Result<Field> {
    rk4_step_with(u, dt, RhsOptions::default())
}

pub fn rk4_step_with(u: &Field, dt: f64, opts: RhsOptions) -> Result<Field> {
    let k1 = rhs_with(u, opts)?;
    let k2 = rhs_with(&u.axpy(0.5 * dt, &k1), opts)?;
    let k3 = rhs_with(&u.axpy(0.5 * dt, &k2), opts)?;
    let k4 = rhs_with(&u.axpy(dt, &k3), opts)?;
    let out = Field::from_raw(
        u.grid(),
        (0..u.len())
            .map(|i| {
                u.values()[i]
                    + dt / 6.0
                        * (k1.values()[i] + 2.0 * k2.values()[i] + 2.0 * k3.values()[i] + k4.values()[i])
            })
            .collect(),
    );
    out.ensure_finite()?;
    Ok(out)
}

#[derive(Debug, Clone)]
pub struct StepOutcome {
    /// State after two half steps.
    pub field: Field,
    pub accepted_dt: f64,
    pub next_dt: f64,
    pub error_estimate: f64,
    pub rejections: usize,
}

/// One step-doubling step: `sup|two halves − one full| / 15` must not exceed `tol`.
pub fn adaptive_step(u: &Field, dt: f64, tol: f64, dt_min: f64) -> Result<StepOutcome> {
    adaptive_step_with(u, dt, tol, dt_min, RhsOptions::default())
}

pub fn adaptive_step_with(
    u: &Field,
    dt: f64,
    tol: f64,
    dt_min: f64,
    opts: RhsOptions,
) -> Result<StepOutcome> {
    u.ensure_finite()?;
    rhs_with(u, opts)?;
    let mut dt = dt;
    let mut rejections = 0;
    loop {
        if dt < dt_min {
            return Err(FlowError::StepUnderflow { dt, dt_min });
        }
        let trial = rk4_step_with(u, dt, opts).and_then(|full| {
            let mid = rk4_step_with(u, 0.5 * dt, opts)?;
            let half = rk4_step_with(&mid, 0.5 * dt, opts)?;
            Ok((half.sup_distance(&full) / 15.0, half))
        });
        let (err, half) = match trial {
            Ok(pair) => pair,
            Err(FlowError::NonFinite { .. }) => (f64::INFINITY, u.clone()),
            Err(e) => return Err(e),
        };
        let factor = if err == 0.0 {
            4.0
        } else {
            (0.9 * (tol / err).powf(0.2)).clamp(0.25, 4.0)
        };
        if err <= tol {
            return Ok(StepOutcome {
                field: half,
                accepted_dt: dt,
                next_dt: dt * factor,
                error_estimate: err,
                rejections,
            });
        }
        rejections += 1;
        dt *= factor.min(0.5);
    }
}

/// Largest step the advective stability cap allows for state `u`.
pub fn stability_limit(u: &Field, factor: f64) -> f64 {
    let k_nyquist = std::f64::consts::PI / u.grid().spacing();
    let u_sup = u.sup();
    let ux_sup = Spectrum::of(u).apply(|k| Complex64::new(0.0, k)).sup();
    let rate = 2.0 * u_sup * k_nyquist + 2.0 * ux_sup + 3.0 * u_sup;
    if rate == 0.0 {
        f64::INFINITY
    } else {
        factor / rate
    }
}

/// Integrates `u0` to `config.t_end`, recording diagnostics along the way.
pub fn simulate(u0: &Field, config: &SolverConfig) -> Result<SimulationResult> {
    config.validate()?;
    u0.ensure_finite()?;
    let opts = RhsOptions {
        dealias: config.dealias,
    };
    let mut monitor = Monitor::new(u0, config)?;
    let mut records = vec![monitor.observe(0.0, u0)?];
    let mut snapshots = vec![Snapshot { t: 0.0, u: u0.clone() }];
    let mut stats = RunStats {
        smallest_dt: f64::INFINITY,
        ..RunStats::default()
    };

    let mut u = u0.clone();
    let mut t = 0.0;
    let mut dt = config.dt_initial;
    let mut step = 0usize;
    let end_eps = 1e-12;

    let termination = loop {
        let remaining = config.t_end - t;
        if remaining <= end_eps {
            break Termination::Completed;
        }
        let cap = stability_limit(&u, config.stability_factor);
        let trial = dt.min(cap).min(remaining);
        let dt_min = config.dt_min.min(remaining);
        let outcome = match adaptive_step_with(&u, trial, config.error_tolerance, dt_min, opts) {
            Ok(o) => o,
            Err(FlowError::StepUnderflow { .. }) => break Termination::StepUnderflow,
            Err(FlowError::NonFinite { .. }) => break Termination::NonFinite,
            Err(e) => return Err(e),
        };
        stats.rejected_steps += outcome.rejections;
        stats.accepted_steps += 1;
        stats.smallest_dt = stats.smallest_dt.min(outcome.accepted_dt);
        stats.largest_dt = stats.largest_dt.max(outcome.accepted_dt);
        t = if outcome.accepted_dt == remaining {
            config.t_end
        } else {
            t + outcome.accepted_dt
        };
        u = outcome.field;
        dt = outcome.next_dt;
        step += 1;

        let k1 = u.sup().max(Spectrum::of(&u).apply(|k| Complex64::new(0.0, k)).sup());
        if !k1.is_finite() || k1 > BLOWUP_THRESHOLD {
            break Termination::BlowupSuspected;
        }
        if step.is_multiple_of(config.monitor_stride) {
            records.push(monitor.observe(t, &u)?);
        }
        if step.is_multiple_of(config.snapshot_stride) {
            snapshots.push(Snapshot { t, u: u.clone() });
        }
    };

    if u.ensure_finite().is_ok() {
        if records.last().is_some_and(|r| r.t < t) {
            records.push(monitor.observe(t, &u)?);
        }
        if snapshots.last().is_some_and(|s| s.t < t) {
            snapshots.push(Snapshot { t, u: u.clone() });
        }
    }
    if stats.accepted_steps == 0 {
        stats.smallest_dt = 0.0;
    }

    let (reports, informational, warnings) = monitor.finish(&records)?;
    Ok(SimulationResult {
        snapshots,
        records,
        termination,
        reports,
        informational,
        warnings,
        stats,
    })
}

/// Classical RK4 with a fixed step, landing exactly on `t_end`.
pub fn integrate_fixed(u0: &Field, dt: f64, t_end: f64, opts: RhsOptions) -> Result<Field> {
    if !(dt > 0.0 && t_end >= 0.0) {
        return Err(FlowError::InvalidConfig(format!("need dt > 0 and t_end ≥ 0, got {dt}, {t_end}")));
    }
    let steps = (t_end / dt).ceil() as usize;
    let h = if steps == 0 { 0.0 } else { t_end / steps as f64 };
    let mut u = u0.clone();
    for _ in 0..steps {
        u = rk4_step_with(&u, h, opts)?;
    }
    Ok(u)
}

/// Sup-norm residual of `u_t − u_txx = ∂ₓ(2−∂ₓ)(1+∂ₓ)u²`, with `u_t` replaced
/// by the forward difference `(u_after − u_before)/dt` and the spatial side
/// evaluated at `u_before`. The residual is first order in `dt`.
pub fn equation_residual_third_order(u_before: &Field, u_after: &Field, dt: f64) -> f64 {
    let ut = u_after.zip_with(u_before, |a, b| (a - b) / dt);
    let lhs = Spectrum::of(&ut).apply(|k| Complex64::new(1.0 + k * k, 0.0));
    // ∂(2 − ∂)(1 + ∂) = ∂(2 + ∂ − ∂²) has symbol iκ(2 + iκ + κ²)
    let rhs = Spectrum::of(&u_before.square())
        .apply(|k| Complex64::new(0.0, k) * Complex64::new(2.0 + k * k, k));
    lhs.sup_distance(&rhs)
}

#[cfg(test)]
mod tests {
    use std::f64::consts::PI;

    use super::*;
    use crate::grid::Grid1D;
    use crate::kernel::helmholtz_inverse;

    fn gaussian_state(n: usize) -> Field {
        let g = Grid1D::periodic(n).unwrap();
        let m = Field::from_fn(&g, |x| (-(x - 0.5).powi(2) / (2.0 * 0.05 * 0.05)).exp());
        helmholtz_inverse(&m)
    }

    #[test]
    fn equilibria_are_fixed_points() {
        let g = Grid1D::periodic(64).unwrap();
        assert_eq!(rhs(&Field::zeros(&g)).unwrap().sup(), 0.0);
        let c = Field::constant(&g, 0.7);
        assert!(rhs(&c).unwrap().sup() < 1e-14);
        assert!(rk4_step(&c, 0.3).unwrap().sup_distance(&c) < 1e-14);
        assert_eq!(rk4_step(&Field::zeros(&g), 5.0).unwrap().sup(), 0.0);
    }

    #[test]
    fn rhs_forms_agree() {
        let g = Grid1D::periodic(256).unwrap();
        let u = Field::from_fn(&g, |x| (2.0 * PI * x).sin());
        let a = rhs(&u).unwrap();
        let b = rhs_cross_check(&u).unwrap();
        assert!(a.sup_distance(&b) <= 1e-10, "{:e}", a.sup_distance(&b));
    }

    #[test]
    fn adaptive_step_on_equilibrium_accepts_with_zero_error() {
        let g = Grid1D::periodic(32).unwrap();
        let out = adaptive_step(&Field::constant(&g, 1.5), 10.0, 1e-9, 1e-8).unwrap();
        assert_eq!(out.accepted_dt, 10.0);
        assert_eq!(out.rejections, 0);
        assert!(out.error_estimate < 1e-13);
    }

    #[test]
    fn adaptive_step_rejects_huge_steps() {
        let u = gaussian_state(128);
        let out = adaptive_step(&u, 5.0, 1e-9, 1e-8).unwrap();
        assert!(out.rejections > 0);
        assert!(out.accepted_dt <= 2.5);
        assert!(out.error_estimate <= 1e-9);
    }

    #[test]
    fn adaptive_step_local_error_is_controlled() {
        let u = gaussian_state(128);
        let out = adaptive_step(&u, 0.01, 1e-9, 1e-8).unwrap();
        // reference: 64 sub-steps over the accepted interval
        let mut r = u.clone();
        let h = out.accepted_dt / 64.0;
        for _ in 0..64 {
            r = rk4_step(&r, h).unwrap();
        }
        assert!(out.field.sup_distance(&r) <= 1e-9);
    }

    #[test]
    fn underflow_is_reported() {
        let u = gaussian_state(64);
        let err = adaptive_step(&u, 1.0, 1e-30, 0.5).unwrap_err();
        assert!(matches!(err, FlowError::StepUnderflow { .. }));
    }

    #[test]
    fn invalid_configs_rejected() {
        let base = SolverConfig::default();
        for c in [
            SolverConfig { t_end: -1.0, ..base.clone() },
            SolverConfig { dt_min: 1e-2, dt_initial: 1e-3, ..base.clone() },
            SolverConfig { dt_initial: 2.0, ..base.clone() },
            SolverConfig { error_tolerance: 0.0, ..base.clone() },
            SolverConfig { max_order: 0, ..base.clone() },
            SolverConfig { max_order: 7, ..base.clone() },
            SolverConfig { monitor_stride: 0, ..base.clone() },
            SolverConfig { stability_factor: 3.0, ..base.clone() },
        ] {
            assert!(c.validate().is_err(), "{c:?}");
        }
        assert!(base.validate().is_ok());
    }

    #[test]
    fn zero_run_completes() {
        let g = Grid1D::periodic(32).unwrap();
        let res = simulate(&Field::zeros(&g), &SolverConfig::default()).unwrap();
        assert_eq!(res.termination, Termination::Completed);
        assert!((res.final_time() - 1.0).abs() < 1e-12);
        for r in &res.records {
            assert!(r.energies.iter().all(|&e| e == 0.0));
            assert_eq!(r.m_int, 0.0);
            assert_eq!(r.ux_sup, 0.0);
        }
        assert_eq!(res.violations().count(), 0);
        assert!(res.records.windows(2).all(|w| w[0].t < w[1].t));
    }

    #[test]
    fn residual_vanishes_on_constants() {
        let g = Grid1D::periodic(128).unwrap();
        let c = Field::constant(&g, 0.4);
        assert!(equation_residual_third_order(&c, &c, 1e-4) <= 1e-6);
    }
}
