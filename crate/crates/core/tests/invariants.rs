use std::f64::consts::PI;

use nonlocal_flow::diagnostics::{pointwise_inequality_sweep, CheckId};
use nonlocal_flow::energy::{energy, energy_density, k_max, leibniz_square_derivative};
use nonlocal_flow::evolution::{rhs, rhs_cross_check, simulate, SolverConfig, Termination};
use nonlocal_flow::initdata::{build_initial_field, InitialDataSpec};
use nonlocal_flow::kernel::{helmholtz_inverse, one_plus_dx_helmholtz_inverse};
use nonlocal_flow::spectral::derivative;
use nonlocal_flow::{lp_norm, Field, Grid1D, Norm};
use proptest::prelude::*;

const MODES: usize = 6;

/// `a₀ + Σ_k (a_k cos 2πkx + b_k sin 2πkx)/(1+k²)` on the unit circle.
fn band_limited(grid: &Grid1D, coeffs: &[f64]) -> Field {
    Field::from_fn(grid, |x| {
        let mut v = coeffs[0];
        for k in 1..=MODES {
            let s = 1.0 / (1.0 + (k * k) as f64);
            let th = 2.0 * PI * k as f64 * x;
            v += s * (coeffs[2 * k - 1] * th.cos() + coeffs[2 * k] * th.sin());
        }
        v
    })
}

fn coeffs() -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(-1.0..1.0f64, 2 * MODES + 1)
}

fn grid() -> Grid1D {
    Grid1D::periodic(256).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn energies_are_cumulative_and_monotone(c in coeffs()) {
        let f = band_limited(&grid(), &c);
        let mut sum = 0.0;
        let mut prev = 0.0;
        for m in 0..=4 {
            let d = derivative(&f, m).unwrap();
            sum += 0.5 * lp_norm(&d, Norm::L2).powi(2);
            let i = energy(&f, m).unwrap();
            prop_assert!((i - sum).abs() <= 1e-10 * sum.max(1.0));
            prop_assert!(i >= prev);
            prev = i;
        }
    }

    #[test]
    fn discrete_embedding(c in coeffs()) {
        let f = band_limited(&grid(), &c);
        prop_assert!(f.sup() <= (2.0 * energy(&f, 1).unwrap()).sqrt());
    }

    #[test]
    fn leibniz_matches_direct(c in coeffs(), n in 0usize..=4) {
        let f = band_limited(&grid(), &c);
        let direct = derivative(&f.square(), n).unwrap();
        prop_assert!(leibniz_square_derivative(&f, n).unwrap().sup_distance(&direct) <= 1e-8);
    }

    #[test]
    fn pointwise_and_integral_inequalities(c in coeffs(), n in 1usize..=4) {
        let f = band_limited(&grid(), &c);
        for r in pointwise_inequality_sweep(&f, n).unwrap() {
            prop_assert!(r.passed, "{} margin {:e}", r.label(), r.worst_margin);
        }
    }

    #[test]
    fn prop_three_one_literal(c in coeffs(), n in 1usize..=4) {
        let f = band_limited(&grid(), &c);
        let d: Vec<Field> = (0..=n).map(|j| derivative(&f, j).unwrap()).collect();
        let j = energy_density(&f, n).unwrap();
        let k = k_max(&f, n).unwrap();
        for i in 0..f.len() {
            for a in 0..n {
                for b in a..n {
                    let lhs = (d[a].values()[i] * d[b].values()[i] * d[n].values()[i]).abs();
                    prop_assert!(lhs <= k * j.values()[i] * (1.0 + 1e-9) + 1e-12);
                }
            }
        }
    }

    #[test]
    fn second_derivative_identity(c in coeffs()) {
        let f = band_limited(&grid(), &c);
        let h = helmholtz_inverse(&f);
        let lhs = derivative(&h, 2).unwrap();
        prop_assert!(lhs.sup_distance(&(&h - &f)) <= 1e-8);
    }

    #[test]
    fn helmholtz_inverse_preserves_sign(c in coeffs()) {
        let f = band_limited(&grid(), &c);
        let shifted = f.map(|v| v - f.min());
        prop_assert!(helmholtz_inverse(&shifted).min() >= -1e-12);
    }

    #[test]
    fn young_bound(c in coeffs()) {
        let g = grid();
        let f = band_limited(&g, &c);
        let p = one_plus_dx_helmholtz_inverse(&f.square());
        let bound = 2.0 * g.kernel_table().g_sup() * lp_norm(&f, Norm::L2).powi(2);
        prop_assert!(p.sup() <= bound * (1.0 + 1e-12));
    }

    #[test]
    fn rhs_formulations_agree(c in coeffs()) {
        let f = band_limited(&grid(), &c);
        prop_assert!(rhs(&f).unwrap().sup_distance(&rhs_cross_check(&f).unwrap()) <= 1e-10);
    }

    #[test]
    fn generated_momentum_is_nonnegative(
        seed in any::<u64>(),
        n_modes in 1usize..8,
        amplitude in 0.01..10.0f64,
        width in 0.02..0.3f64,
        center in 0.0..1.0f64,
    ) {
        let g = grid();
        for spec in [
            InitialDataSpec::RandomNonnegMomentum { seed, n_modes, amplitude },
            InitialDataSpec::GaussianMomentum { amplitude, center, width },
            InitialDataSpec::MollifiedPeakon { height: amplitude, center, mollify_width: width },
        ] {
            let f = build_initial_field(&spec, &g).unwrap();
            prop_assert!(f.m0.min() >= 0.0);
            prop_assert_eq!(lp_norm(&f.m0, Norm::L1), f.m0.integral());
            prop_assert!(f.warnings.is_empty());
        }
        let f = build_initial_field(&InitialDataSpec::RandomNonnegMomentum { seed, n_modes, amplitude }, &g).unwrap();
        let m = &f.u0 - &derivative(&f.u0, 2).unwrap();
        prop_assert!(m.sup_distance(&f.m0) <= 1e-8 * amplitude.max(1.0));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(6))]

    #[test]
    fn short_runs_satisfy_every_check(seed in any::<u64>(), amplitude in 0.1..2.0f64) {
        let g = Grid1D::periodic(128).unwrap();
        let spec = InitialDataSpec::RandomNonnegMomentum { seed, n_modes: 4, amplitude };
        let init = build_initial_field(&spec, &g).unwrap();
        let cfg = SolverConfig { t_end: 0.3, ..SolverConfig::default() };
        let r = simulate(&init.u0, &cfg).unwrap();
        prop_assert_eq!(r.termination, Termination::Completed);
        for c in &r.reports {
            prop_assert!(c.passed, "{} margin {:e}", c.label(), c.worst_margin);
        }
        for rec in &r.records {
            prop_assert!(rec.k.windows(2).all(|w| w[0] <= w[1]));
        }
        // ‖u₀‖_{H^m} two ways
        for m in 0..=cfg.max_order {
            let direct: f64 = (0..=m)
                .map(|j| lp_norm(&derivative(&init.u0, j).unwrap(), Norm::L2).powi(2))
                .sum::<f64>()
                .sqrt();
            let hm = (2.0 * r.records[0].energies[m]).sqrt();
            prop_assert!((hm - direct).abs() <= 1e-10 * hm);
        }
        prop_assert!(r.warnings.is_empty(), "{:?}", r.warnings);
    }
}

#[test]
fn simulate_is_bit_deterministic() {
    let g = Grid1D::periodic(128).unwrap();
    let spec = InitialDataSpec::GaussianMomentum { amplitude: 1.0, center: 0.5, width: 0.1 };
    let u0 = build_initial_field(&spec, &g).unwrap().u0;
    let cfg = SolverConfig { t_end: 0.5, ..SolverConfig::default() };
    let a = simulate(&u0, &cfg).unwrap();
    let b = simulate(&u0, &cfg).unwrap();
    assert_eq!(a.records, b.records);
    assert_eq!(a.snapshots.last().unwrap().u.values(), b.snapshots.last().unwrap().u.values());
}

#[test]
fn conservation_drift_is_at_roundoff() {
    let g = Grid1D::periodic(256).unwrap();
    let spec = InitialDataSpec::GaussianMomentum { amplitude: 1.0, center: 0.25, width: 0.08 };
    let u0 = build_initial_field(&spec, &g).unwrap().u0;
    for tol in [1e-6, 1e-9] {
        let cfg = SolverConfig { t_end: 1.0, error_tolerance: tol, ..SolverConfig::default() };
        let r = simulate(&u0, &cfg).unwrap();
        for c in r.reports.iter().filter(|c| {
            matches!(c.check_id, CheckId::MomentumConservation | CheckId::MassConservation)
        }) {
            assert!(c.worst_margin >= -1e-13, "{} {:e}", c.label(), c.worst_margin);
        }
    }
}
