//! Conserved quantities, the energy inequalities, and the Grönwall-type
//! envelopes, evaluated on single fields and along simulated trajectories.
//!
//! Margins are signed slacks: positive means the inequality holds with room
//! to spare. A check passes when its worst margin is `≥ −tolerance`.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::energy::{density_from_derivatives, leibniz_from_derivatives};
use crate::error::{FlowError, Result};
use crate::evolution::{rhs, rhs_cross_check, rhs_with, RhsOptions, SolverConfig};
use crate::field::{lp_norm, Field, Norm};
use crate::grid::DomainKind;
use crate::kernel::one_plus_dx_helmholtz_inverse;
use crate::spectral::{derivative, derivatives};

/// Absolute slack for node-wise inequalities.
pub const POINTWISE_ABS_TOL: f64 = 1e-12;
/// Relative slack (times the right-hand side) for node-wise inequalities.
pub const POINTWISE_REL_TOL: f64 = 1e-9;
/// Absolute slack for integral inequalities and envelope log-margins.
pub const INTEGRAL_TOL: f64 = 1e-8;
pub const CONSERVATION_TOL: f64 = 1e-6;
pub const SIGN_TOL: f64 = 1e-6;
pub const SLOPE_TOL: f64 = 1e-8;
/// `|u|` on the outer 5% bands of a line box must stay below this.
pub const TAIL_THRESHOLD: f64 = 1e-8;
/// Agreement required between the two right-hand-side formulations, relative
/// to `max(1, ‖rhs‖_∞)`.
pub const RHS_FORMS_TOL: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum CheckId {
    Prop31,
    Prop32,
    Prop34,
    Prop35,
    Prop37,
    GronwallThm21,
    MomentumConservation,
    MassConservation,
    SlopeBoundLem41,
    SignPreservation,
    H1Growth,
}

impl CheckId {
    pub const ALL: [CheckId; 11] = [
        CheckId::Prop31,
        CheckId::Prop32,
        CheckId::Prop34,
        CheckId::Prop35,
        CheckId::Prop37,
        CheckId::GronwallThm21,
        CheckId::MomentumConservation,
        CheckId::MassConservation,
        CheckId::SlopeBoundLem41,
        CheckId::SignPreservation,
        CheckId::H1Growth,
    ];

    pub fn tolerance(self) -> f64 {
        match self {
            CheckId::Prop31 | CheckId::Prop32 => POINTWISE_ABS_TOL,
            CheckId::Prop34 | CheckId::Prop35 | CheckId::Prop37 => INTEGRAL_TOL,
            CheckId::GronwallThm21 | CheckId::H1Growth => INTEGRAL_TOL,
            CheckId::MomentumConservation | CheckId::MassConservation => CONSERVATION_TOL,
            CheckId::SlopeBoundLem41 => SLOPE_TOL,
            CheckId::SignPreservation => SIGN_TOL,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            CheckId::Prop31 => "Prop31",
            CheckId::Prop32 => "Prop32",
            CheckId::Prop34 => "Prop34",
            CheckId::Prop35 => "Prop35",
            CheckId::Prop37 => "Prop37",
            CheckId::GronwallThm21 => "GronwallThm21",
            CheckId::MomentumConservation => "MomentumConservation",
            CheckId::MassConservation => "MassConservation",
            CheckId::SlopeBoundLem41 => "SlopeBoundLem41",
            CheckId::SignPreservation => "SignPreservation",
            CheckId::H1Growth => "H1Growth",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckReport {
    pub check_id: CheckId,
    /// Sobolev order the check refers to, where it has one.
    pub order: Option<usize>,
    pub worst_margin: f64,
    pub time_of_worst: f64,
    pub tolerance: f64,
    pub passed: bool,
}

impl CheckReport {
    pub fn single(check_id: CheckId, order: Option<usize>, margin: f64) -> Self {
        let tolerance = check_id.tolerance();
        Self {
            check_id,
            order,
            worst_margin: margin,
            time_of_worst: 0.0,
            tolerance,
            passed: margin >= -tolerance,
        }
    }

    pub fn at(mut self, t: f64) -> Self {
        self.time_of_worst = t;
        self
    }

    /// `CheckId` name with the order appended, e.g. `GronwallThm21[m=2]`.
    pub fn label(&self) -> String {
        match self.order {
            Some(m) => format!("{}[m={m}]", self.check_id.name()),
            None => self.check_id.name().to_string(),
        }
    }

    fn absorb(&mut self, other: &CheckReport) {
        if other.worst_margin < self.worst_margin || self.worst_margin.is_nan() {
            self.worst_margin = other.worst_margin;
            self.time_of_worst = other.time_of_worst;
        }
        self.passed = self.worst_margin >= -self.tolerance;
    }
}

/// A monitored quantity that carries no pass/fail claim.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InformationalCheck {
    pub name: String,
    pub order: usize,
    pub worst_margin: f64,
    pub time_of_worst: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Violation {
    pub check_id: CheckId,
    pub order: Option<usize>,
    pub margin: f64,
}

/// All monitored functionals at one time.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DiagnosticsRecord {
    pub t: f64,
    /// `I_0 ..= I_n`
    pub energies: Vec<f64>,
    /// `k_0 .. k_{n-1}`
    pub k: Vec<f64>,
    /// `κ_0 ..= κ_n` with the literal `n = max_order`.
    pub kappa: Vec<f64>,
    /// `κ_m` with `n` replaced by `m`.
    pub kappa_variant: Vec<f64>,
    pub u_l1: f64,
    pub u_int: f64,
    pub m_int: f64,
    pub m_l1: f64,
    pub m_min: f64,
    pub ux_sup: f64,
    pub gronwall_envelope: Vec<f64>,
    pub gronwall_envelope_variant: Vec<f64>,
    pub h1_envelope: f64,
    /// `d/dt ‖∂ⁿu‖²_{L²}` evaluated from the right-hand side.
    pub energy_rate: f64,
    pub tail_amplitude: f64,
    /// `‖rhs − rhs_cross_check‖_∞`, both without dealiasing.
    pub rhs_forms_gap: f64,
    pub violations: Vec<Violation>,
}

/// `m = u − u_xx`
pub fn momentum(u: &Field) -> Result<Field> {
    let uxx = derivative(u, 2)?;
    Ok(u - &uxx)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConservedQuantities {
    pub m_int: f64,
    pub u_int: f64,
    pub m_l1: f64,
}

pub fn conserved_quantities(u: &Field) -> Result<ConservedQuantities> {
    let m = momentum(u)?;
    Ok(ConservedQuantities {
        m_int: m.integral(),
        u_int: u.integral(),
        m_l1: lp_norm(&m, Norm::L1),
    })
}

/// `α_m = 2^m + 2^{m−2} + n` for `m ≥ 2`, zero otherwise.
pub fn alpha(m: usize, n: usize) -> f64 {
    if m >= 2 {
        (1u64 << m) as f64 + (1u64 << (m - 2)) as f64 + n as f64
    } else {
        0.0
    }
}

/// `κ_m` from its ingredients; `k[j] = k_j = max_{i≤j} ‖∂^i u‖_∞` for `j ≥ 0`
/// (at least `k_0` and `k_1` must be present).
pub fn kappa_from_parts(m: usize, n: usize, k: &[f64], u_l1: f64, g_sup: f64) -> f64 {
    let young = 2.0 * g_sup * u_l1;
    if m == 0 {
        return 2.0 * (k[0] + young);
    }
    2.0 * ((n as f64 + 3.0) * k[1] + young + alpha(m, n) * k[m - 1])
}

/// `κ_m(t)` for the field `u` with hierarchy depth `n`.
pub fn kappa(u: &Field, m: usize, n: usize) -> Result<f64> {
    assert!(m <= n, "kappa needs m ≤ n");
    let d = derivatives(u, m.max(1))?;
    let k = running_max(&d.iter().map(Field::sup).collect::<Vec<_>>());
    let g_sup = u.grid().kernel_table().g_sup();
    Ok(kappa_from_parts(m, n, &k, lp_norm(u, Norm::L1), g_sup))
}

fn running_max(v: &[f64]) -> Vec<f64> {
    v.iter()
        .scan(0.0_f64, |acc, &x| {
            *acc = acc.max(x);
            Some(*acc)
        })
        .collect()
}

fn log_margin(envelope: f64, value: f64) -> f64 {
    if value <= 0.0 {
        0.0
    } else if envelope <= 0.0 {
        f64::NEG_INFINITY
    } else {
        envelope.ln() - value.ln()
    }
}

/// Multiplier of `∫κ_m` in the `I_m` envelope: `m` for `m ≥ 1`, and 1 for the
/// `I_0` bound `d/dt I_0 ≤ κ_0 I_0`.
pub fn envelope_exponent(m: usize) -> f64 {
    m.max(1) as f64
}

fn envelope_report(
    history: &[DiagnosticsRecord],
    check_id: CheckId,
    order: Option<usize>,
    rate: impl Fn(&DiagnosticsRecord) -> f64,
    value: impl Fn(&DiagnosticsRecord) -> f64,
    exponent: f64,
) -> Result<CheckReport> {
    let first = history.first().ok_or(FlowError::EmptyHistory)?;
    let v0 = value(first);
    let mut integral = 0.0;
    let mut report = CheckReport::single(check_id, order, log_margin(v0, v0));
    for w in history.windows(2) {
        integral += 0.5 * (w[1].t - w[0].t) * (rate(&w[0]) + rate(&w[1]));
        let env = v0 * (exponent * integral).exp();
        let r = CheckReport::single(check_id, order, log_margin(env, value(&w[1]))).at(w[1].t);
        report.absorb(&r);
    }
    Ok(report)
}

/// `I_m(t) ≤ I_m(0) exp(m ∫₀ᵗ κ_m)` at every record (trapezoid in time).
pub fn gronwall_check(history: &[DiagnosticsRecord], m: usize) -> Result<CheckReport> {
    envelope_report(
        history,
        CheckId::GronwallThm21,
        Some(m),
        |r| r.kappa[m],
        |r| r.energies[m],
        envelope_exponent(m),
    )
}

/// `2I_1(t) ≤ 2I_1(0) exp(10 ∫₀ᵗ ‖u_x‖_∞)` at every record.
pub fn h1_growth_check(history: &[DiagnosticsRecord]) -> Result<CheckReport> {
    envelope_report(
        history,
        CheckId::H1Growth,
        None,
        |r| r.ux_sup,
        |r| 2.0 * r.energies[1],
        10.0,
    )
}

/// `‖u_x‖_∞ ≤ K₁`.
pub fn slope_bound_check(u: &Field, k1: f64) -> Result<CheckReport> {
    let ux = derivative(u, 1)?;
    Ok(CheckReport::single(CheckId::SlopeBoundLem41, None, k1 - ux.sup()))
}

/// Margin is `min m(t,·)`.
pub fn sign_preservation_check(u: &Field) -> Result<CheckReport> {
    let m = momentum(u)?;
    Ok(CheckReport::single(CheckId::SignPreservation, None, m.min()))
}

/// The node-wise triple-product and Leibniz bounds, and the integral bounds
/// on `∫∂ⁿu·P` and `∫u·P` (`P = (1+∂)Λ⁻²u²`), at order `n`.
pub fn pointwise_inequality_sweep(u: &Field, n: usize) -> Result<Vec<CheckReport>> {
    assert!(n >= 1, "inequality sweep needs n ≥ 1");
    let d = derivatives(u, n)?;
    let g_sup = u.grid().kernel_table().g_sup();
    let p = one_plus_dx_helmholtz_inverse(&u.square());
    Ok(sweep_from_parts(u, &d, &p, n, g_sup))
}

fn pointwise_margin(lhs: f64, rhs: f64) -> f64 {
    rhs - lhs + POINTWISE_REL_TOL * rhs.abs()
}

pub(crate) fn sweep_from_parts(u: &Field, d: &[Field], p: &Field, n: usize, g_sup: f64) -> Vec<CheckReport> {
    let len = u.len();
    let dx = u.grid().spacing();
    let jn = density_from_derivatives(d, n);
    let k_nm1 = d[..n].iter().map(Field::sup).fold(0.0, f64::max);
    let i_n = jn.integral();

    // triple products: |∂^k u||∂^ℓ u||∂^n u| ≤ k_{n-1} J_n for 0 ≤ k ≤ ℓ < n
    let mut m31 = f64::INFINITY;
    for i in 0..len {
        let rhs = k_nm1 * jn.values()[i];
        let dn = d[n].values()[i].abs();
        let mut kmax = 0.0_f64;
        for dl in &d[..n] {
            let l = dl.values()[i].abs();
            // leading factor: the largest |∂^k u| with k ≤ ℓ
            kmax = kmax.max(l);
            m31 = m31.min(pointwise_margin(kmax * l * dn, rhs));
        }
    }

    // Leibniz bound: |∂ⁿ u²| ≤ 2ⁿ J_n
    let leib = leibniz_from_derivatives(d, n);
    let two_n = (1u64 << n) as f64;
    let m32 = (0..len)
        .map(|i| pointwise_margin(leib.values()[i].abs(), two_n * jn.values()[i]))
        .fold(f64::INFINITY, f64::min);

    // integral bounds with P = (1+∂)Λ⁻² u²
    let u_p: Vec<f64> = u.values().iter().zip(p.values()).map(|(a, b)| a * b).collect();
    let int_u_p = dx * u_p.iter().sum::<f64>();
    let int_abs_u_p = dx * u_p.iter().map(|v| v.abs()).sum::<f64>();
    let int_dn_p = dx * d[n].values().iter().zip(p.values()).map(|(a, b)| a * b).sum::<f64>();
    let m34 = int_abs_u_p + (two_n - 1.0) * k_nm1 * i_n - int_dn_p.abs();
    let l2 = lp_norm(u, Norm::L2);
    let m35 = 2.0 * g_sup * lp_norm(u, Norm::L1) * l2 * l2 - int_u_p.abs();

    vec![
        CheckReport::single(CheckId::Prop31, Some(n), m31),
        CheckReport::single(CheckId::Prop32, Some(n), m32),
        CheckReport::single(CheckId::Prop34, Some(n), m34),
        CheckReport::single(CheckId::Prop35, None, m35),
    ]
}

/// `d/dt ‖∂ⁿu‖²_{L²} = 2∫ ∂ⁿu · ∂ⁿ(u_t)` with `u_t` from the right-hand side.
pub fn energy_rate(u: &Field, n: usize, opts: RhsOptions) -> Result<f64> {
    Ok(energy_rates(u, n, opts)?[n])
}

/// `d/dt ‖∂^m u‖²_{L²}` for `m = 0..=n`.
pub fn energy_rates(u: &Field, n: usize, opts: RhsOptions) -> Result<Vec<f64>> {
    let ut = rhs_with(u, opts)?;
    let a = derivatives(u, n)?;
    let b = derivatives(&ut, n)?;
    Ok(a.iter().zip(&b).map(|(x, y)| 2.0 * (x * y).integral()).collect())
}

#[derive(Debug, Clone)]
struct Baseline {
    energies: Vec<f64>,
    m_int: f64,
    u_int: f64,
    m_l1: f64,
}

#[derive(Debug, Clone)]
struct Previous {
    t: f64,
    kappa: Vec<f64>,
    kappa_variant: Vec<f64>,
    ux_sup: f64,
}

/// Accumulates diagnostics along a trajectory.
#[derive(Debug)]
pub struct Monitor {
    n: usize,
    opts: RhsOptions,
    g_sup: f64,
    line: bool,
    baseline: Option<Baseline>,
    previous: Option<Previous>,
    kappa_integrals: Vec<f64>,
    kappa_variant_integrals: Vec<f64>,
    ux_integral: f64,
    book: BTreeMap<(CheckId, Option<usize>), CheckReport>,
    info: BTreeMap<(String, usize), InformationalCheck>,
    warnings: Vec<String>,
    tail_warned: bool,
    rhs_warned: bool,
}

impl Monitor {
    pub fn new(u0: &Field, config: &SolverConfig) -> Result<Self> {
        let n = config.max_order;
        u0.grid().check_order(n.max(2))?;
        Ok(Self {
            n,
            opts: RhsOptions {
                dealias: config.dealias,
            },
            g_sup: u0.grid().kernel_table().g_sup(),
            line: u0.grid().kind() == DomainKind::Line,
            baseline: None,
            previous: None,
            kappa_integrals: vec![0.0; n + 1],
            kappa_variant_integrals: vec![0.0; n + 1],
            ux_integral: 0.0,
            book: BTreeMap::new(),
            info: BTreeMap::new(),
            warnings: Vec::new(),
            tail_warned: false,
            rhs_warned: false,
        })
    }

    fn absorb(&mut self, report: CheckReport, violations: &mut Vec<Violation>) {
        if !report.passed {
            violations.push(Violation {
                check_id: report.check_id,
                order: report.order,
                margin: report.worst_margin,
            });
        }
        let key = (report.check_id, report.order);
        match self.book.get_mut(&key) {
            Some(existing) => existing.absorb(&report),
            None => {
                self.book.insert(key, report);
            }
        }
    }

    fn note(&mut self, name: &str, order: usize, margin: f64, t: f64) {
        let entry = self
            .info
            .entry((name.to_string(), order))
            .or_insert_with(|| InformationalCheck {
                name: name.to_string(),
                order,
                worst_margin: margin,
                time_of_worst: t,
            });
        if margin < entry.worst_margin {
            entry.worst_margin = margin;
            entry.time_of_worst = t;
        }
    }

    /// Evaluates every functional and check on `u` at time `t`.
    pub fn observe(&mut self, t: f64, u: &Field) -> Result<DiagnosticsRecord> {
        let n = self.n;
        let d = derivatives(u, n.max(2))?;
        let sups: Vec<f64> = d.iter().map(Field::sup).collect();
        let kk = running_max(&sups);
        let dx = u.grid().spacing();
        let mut energies = Vec::with_capacity(n + 1);
        let mut acc = 0.0;
        for dj in &d[..=n] {
            acc += 0.5 * dx * dj.values().iter().map(|v| v * v).sum::<f64>();
            energies.push(acc);
        }
        let m = u - &d[2];
        let u_l1 = lp_norm(u, Norm::L1);
        let u_int = u.integral();
        let m_int = m.integral();
        let m_l1 = lp_norm(&m, Norm::L1);
        let m_min = m.min();
        let ux_sup = sups[1];

        let kappa: Vec<f64> = (0..=n)
            .map(|j| kappa_from_parts(j, n, &kk, u_l1, self.g_sup))
            .collect();
        let kappa_variant: Vec<f64> = (0..=n)
            .map(|j| kappa_from_parts(j, j, &kk, u_l1, self.g_sup))
            .collect();

        if let Some(prev) = &self.previous {
            let h = 0.5 * (t - prev.t);
            for j in 0..=n {
                self.kappa_integrals[j] += h * (prev.kappa[j] + kappa[j]);
                self.kappa_variant_integrals[j] += h * (prev.kappa_variant[j] + kappa_variant[j]);
            }
            self.ux_integral += h * (prev.ux_sup + ux_sup);
        }
        let base = self
            .baseline
            .get_or_insert_with(|| Baseline {
                energies: energies.clone(),
                m_int,
                u_int,
                m_l1,
            })
            .clone();
        let gronwall_envelope: Vec<f64> = (0..=n)
            .map(|j| base.energies[j] * (envelope_exponent(j) * self.kappa_integrals[j]).exp())
            .collect();
        let gronwall_envelope_variant: Vec<f64> = (0..=n)
            .map(|j| base.energies[j] * (envelope_exponent(j) * self.kappa_variant_integrals[j]).exp())
            .collect();
        let h1_envelope = 2.0 * base.energies[1] * (10.0 * self.ux_integral).exp();

        let rates = energy_rates(u, n, self.opts)?;
        let plain = rhs(u)?;
        let rhs_forms_gap = plain.sup_distance(&rhs_cross_check(u)?);
        if rhs_forms_gap > RHS_FORMS_TOL * plain.sup().max(1.0) && !self.rhs_warned {
            self.rhs_warned = true;
            self.warnings.push(format!(
                "right-hand-side formulations differ by {rhs_forms_gap:e} at t = {t}"
            ));
        }
        let tail_amplitude = if self.line { u.tail_amplitude() } else { 0.0 };

        let mut violations = Vec::new();
        let p = one_plus_dx_helmholtz_inverse(&u.square());
        for r in sweep_from_parts(u, &d, &p, n, self.g_sup) {
            self.absorb(r.at(t), &mut violations);
        }
        self.absorb(
            CheckReport::single(CheckId::Prop37, Some(n), 2.0 * kappa[n] * energies[n] - rates[n]).at(t),
            &mut violations,
        );
        for j in 0..n {
            self.note("Prop37LowerOrder", j, 2.0 * kappa[j] * energies[j] - rates[j], t);
        }
        for j in 0..=n {
            self.absorb(
                CheckReport::single(
                    CheckId::GronwallThm21,
                    Some(j),
                    log_margin(gronwall_envelope[j], energies[j]),
                )
                .at(t),
                &mut violations,
            );
            self.note(
                "GronwallVariant",
                j,
                log_margin(gronwall_envelope_variant[j], energies[j]),
                t,
            );
        }
        self.absorb(
            CheckReport::single(CheckId::H1Growth, None, log_margin(h1_envelope, 2.0 * energies[1])).at(t),
            &mut violations,
        );
        self.absorb(
            CheckReport::single(CheckId::MomentumConservation, None, -(m_int - base.m_int).abs()).at(t),
            &mut violations,
        );
        self.absorb(
            CheckReport::single(CheckId::MassConservation, None, -(u_int - base.u_int).abs()).at(t),
            &mut violations,
        );
        self.absorb(
            CheckReport::single(CheckId::SlopeBoundLem41, None, base.m_l1 - ux_sup).at(t),
            &mut violations,
        );
        self.absorb(
            CheckReport::single(CheckId::SignPreservation, None, m_min).at(t),
            &mut violations,
        );

        if self.line && tail_amplitude >= TAIL_THRESHOLD && !self.tail_warned {
            self.tail_warned = true;
            self.warnings.push(format!(
                "tail mass {tail_amplitude:e} ≥ {TAIL_THRESHOLD:e} at t = {t}: line box too small"
            ));
        }
        self.previous = Some(Previous {
            t,
            kappa: kappa.clone(),
            kappa_variant: kappa_variant.clone(),
            ux_sup,
        });
        Ok(DiagnosticsRecord {
            t,
            energies,
            k: kk[..n].to_vec(),
            kappa,
            kappa_variant,
            u_l1,
            u_int,
            m_int,
            m_l1,
            m_min,
            ux_sup,
            gronwall_envelope,
            gronwall_envelope_variant,
            h1_envelope,
            energy_rate: rates[n],
            tail_amplitude,
            rhs_forms_gap,
            violations,
        })
    }

    pub fn tail_warning_raised(&self) -> bool {
        self.tail_warned
    }

    /// Final reports. Envelope checks are recomputed from the record history.
    pub fn finish(
        mut self,
        history: &[DiagnosticsRecord],
    ) -> Result<(Vec<CheckReport>, Vec<InformationalCheck>, Vec<String>)> {
        if history.is_empty() {
            return Err(FlowError::EmptyHistory);
        }
        for m in 0..=self.n {
            self.book
                .insert((CheckId::GronwallThm21, Some(m)), gronwall_check(history, m)?);
        }
        self.book.insert((CheckId::H1Growth, None), h1_growth_check(history)?);
        Ok((
            self.book.into_values().collect(),
            self.info.into_values().collect(),
            self.warnings,
        ))
    }
}

#[cfg(test)]
mod tests {
    use std::f64::consts::PI;

    use super::*;
    use crate::corpus::BandLimitedCorpus;
    use crate::grid::Grid1D;
    use crate::kernel::helmholtz_inverse;

    fn sine() -> Field {
        let g = Grid1D::periodic(256).unwrap();
        Field::from_fn(&g, |x| (2.0 * PI * x).sin())
    }

    #[test]
    fn momentum_examples() {
        let g = Grid1D::periodic(256).unwrap();
        let c = Field::constant(&g, 2.0);
        assert!(momentum(&c).unwrap().sup_distance(&c) < 1e-13);
        let u = Field::from_fn(&g, |x| (2.0 * PI * x).cos());
        let e = Field::from_fn(&g, |x| (1.0 + 4.0 * PI * PI) * (2.0 * PI * x).cos());
        assert!(momentum(&u).unwrap().sup_distance(&e) < 1e-10);
        let f = BandLimitedCorpus::new(3).sample(&g);
        assert!(momentum(&helmholtz_inverse(&f)).unwrap().sup_distance(&f) < 1e-8);
    }

    #[test]
    fn conserved_quantity_identities() {
        let g = Grid1D::periodic(256).unwrap();
        let f = BandLimitedCorpus::new(11).sample(&g);
        let q = conserved_quantities(&f).unwrap();
        assert!((q.m_int - q.u_int).abs() < 1e-10);
        assert!(q.m_l1 >= q.m_int.abs());
        let m = BandLimitedCorpus::new(12).sample_nonnegative(&g);
        let q = conserved_quantities(&helmholtz_inverse(&m)).unwrap();
        assert!((q.m_l1 - q.m_int).abs() < 1e-10);
    }

    #[test]
    fn kappa_examples() {
        let g = Grid1D::periodic(256).unwrap();
        let z = Field::zeros(&g);
        assert_eq!(kappa(&z, 0, 3).unwrap(), 0.0);
        assert_eq!(kappa(&z, 3, 3).unwrap(), 0.0);
        let s = sine();
        let g_sup = g.kernel_table().g_sup();
        let expected = 2.0 * (1.0 + 2.0 * g_sup * 2.0 / PI);
        let got = kappa(&s, 0, 3).unwrap();
        // the trapezoid L¹ norm of |sin| is only second-order accurate at its kinks
        assert!((got - expected).abs() < 1e-3, "{got} vs {expected}");
    }

    #[test]
    fn alpha_values() {
        assert_eq!(alpha(0, 4), 0.0);
        assert_eq!(alpha(1, 4), 0.0);
        assert_eq!(alpha(2, 4), 4.0 + 1.0 + 4.0);
        assert_eq!(alpha(3, 3), 8.0 + 2.0 + 3.0);
    }

    #[test]
    fn kappa_literal_formula() {
        let s = sine();
        let k = [1.0, 2.0 * PI, 4.0 * PI * PI];
        let u_l1 = lp_norm(&s, Norm::L1);
        let g_sup = s.grid().kernel_table().g_sup();
        let n = 3;
        let expected = 2.0 * ((n as f64 + 3.0) * k[1] + 2.0 * g_sup * u_l1 + alpha(2, n) * k[1]);
        assert!((kappa(&s, 2, n).unwrap() - expected).abs() < 1e-8);
    }

    #[test]
    fn zero_field_sweep() {
        let g = Grid1D::periodic(64).unwrap();
        for r in pointwise_inequality_sweep(&Field::zeros(&g), 2).unwrap() {
            assert!(r.passed);
            assert_eq!(r.worst_margin, 0.0, "{:?}", r.check_id);
        }
    }

    #[test]
    fn sine_sweep_order_two() {
        let s = sine();
        let reports = pointwise_inequality_sweep(&s, 2).unwrap();
        assert!(reports.iter().all(|r| r.passed));
        // the Leibniz-bound margin is min over nodes of 4 J₂ − |∂²(u²)| (+ relative slack)
        let d = derivatives(&s, 2).unwrap();
        let j2 = density_from_derivatives(&d, 2);
        let l = leibniz_from_derivatives(&d, 2);
        let direct = (0..s.len())
            .map(|i| 4.0 * j2.values()[i] - l.values()[i].abs())
            .fold(f64::INFINITY, f64::min);
        let m32 = reports.iter().find(|r| r.check_id == CheckId::Prop32).unwrap();
        // equality is attained at x = 0, where 4J₂ = |∂²(u²)| = 8π²
        assert!(direct.abs() < 1e-9 * 4.0 * j2.sup());
        assert!((m32.worst_margin - direct).abs() <= 1e-9 * 4.0 * j2.sup());
    }

    #[test]
    fn slope_and_sign_examples() {
        let g = Grid1D::periodic(128).unwrap();
        let z = Field::zeros(&g);
        let r = slope_bound_check(&z, 0.0).unwrap();
        assert!(r.passed && r.worst_margin == 0.0);
        let r = sign_preservation_check(&z).unwrap();
        assert!(r.passed && r.worst_margin == 0.0);
        let mut corpus = BandLimitedCorpus::new(5);
        for _ in 0..10 {
            let m = corpus.sample_nonnegative(&g);
            let u = helmholtz_inverse(&m);
            assert!(slope_bound_check(&u, lp_norm(&m, Norm::L1)).unwrap().passed);
            assert!(sign_preservation_check(&u).unwrap().passed);
        }
    }

    fn record(t: f64, i: Vec<f64>, kappa: Vec<f64>, ux_sup: f64) -> DiagnosticsRecord {
        DiagnosticsRecord {
            t,
            energies: i,
            k: vec![],
            kappa: kappa.clone(),
            kappa_variant: kappa,
            u_l1: 0.0,
            u_int: 0.0,
            m_int: 0.0,
            m_l1: 0.0,
            m_min: 0.0,
            ux_sup,
            gronwall_envelope: vec![],
            gronwall_envelope_variant: vec![],
            h1_envelope: 0.0,
            energy_rate: 0.0,
            tail_amplitude: 0.0,
            rhs_forms_gap: 0.0,
            violations: vec![],
        }
    }

    #[test]
    fn envelope_checks_on_trivial_histories() {
        assert!(matches!(gronwall_check(&[], 1), Err(FlowError::EmptyHistory)));
        assert!(matches!(h1_growth_check(&[]), Err(FlowError::EmptyHistory)));

        let single = [record(0.0, vec![1.0, 2.0], vec![1.0, 1.0], 0.5)];
        let r = gronwall_check(&single, 1).unwrap();
        assert!(r.passed && r.worst_margin == 0.0);
        let r = h1_growth_check(&single).unwrap();
        assert!(r.passed && r.worst_margin == 0.0);

        let zeros: Vec<_> = (0..4).map(|i| record(i as f64, vec![0.0; 3], vec![0.0; 3], 0.0)).collect();
        for m in 0..3 {
            let r = gronwall_check(&zeros, m).unwrap();
            assert!(r.passed && r.worst_margin == 0.0);
        }
        assert!(h1_growth_check(&zeros).unwrap().passed);
    }

    #[test]
    fn envelope_detects_growth_beyond_bound() {
        // I_1 grows like e^{3t} while κ_1 ≡ 1 allows only e^{t}
        let hist: Vec<_> = (0..11)
            .map(|i| {
                let t = 0.1 * i as f64;
                record(t, vec![1.0, (3.0 * t).exp()], vec![1.0, 1.0], 0.0)
            })
            .collect();
        let r = gronwall_check(&hist, 1).unwrap();
        assert!(!r.passed);
        assert!((r.worst_margin + 2.0).abs() < 1e-12);
        assert!((r.time_of_worst - 1.0).abs() < 1e-12);
    }
}
