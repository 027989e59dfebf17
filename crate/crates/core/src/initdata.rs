//! Initial data built from a non-negative momentum `m₀`, with `u₀ = Λ⁻² m₀`.

use std::f64::consts::PI;
use std::path::{Path, PathBuf};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rustfft::num_complex::Complex64;
use rustfft::FftPlanner;
use serde::{Deserialize, Serialize};

use crate::error::{FlowError, Result};
use crate::field::Field;
use crate::grid::{signed_mode, DomainKind, Grid1D};
use crate::kernel::helmholtz_inverse;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum InitialDataSpec {
    /// `m₀ = A exp(−(x−c)²/(2w²))`
    GaussianMomentum { amplitude: f64, center: f64, width: f64 },
    /// Unit-mass gaussian of width `mollify_width` carrying the momentum `2h`
    /// of the peakon `h e^{−|x−c|}`.
    MollifiedPeakon { height: f64, center: f64, mollify_width: f64 },
    /// `m₀ = A (1 + cos(2π(x−c)/s))/2` on `|x−c| < s/2`, zero elsewhere.
    CosineBumpMomentum { amplitude: f64, center: f64, support_width: f64 },
    /// Random Fourier series, shifted by its minimum and rescaled to `[0, A]`.
    RandomNonnegMomentum { seed: u64, n_modes: usize, amplitude: f64 },
    /// Two-column `x m₀` text file of uniform samples over one period of the grid.
    Explicit { path: PathBuf },
    Zero,
}

#[derive(Debug, Clone)]
pub struct InitialField {
    pub u0: Field,
    pub m0: Field,
    pub warnings: Vec<String>,
}

impl InitialDataSpec {
    pub fn validate(&self) -> Result<()> {
        let positive = |name: &str, v: f64| {
            if v.is_finite() && v > 0.0 {
                Ok(())
            } else {
                Err(FlowError::InvalidConfig(format!("{name} must be positive, got {v}")))
            }
        };
        let finite = |name: &str, v: f64| {
            if v.is_finite() {
                Ok(())
            } else {
                Err(FlowError::InvalidConfig(format!("{name} must be finite")))
            }
        };
        match *self {
            InitialDataSpec::GaussianMomentum { amplitude, center, width } => {
                positive("amplitude", amplitude)?;
                positive("width", width)?;
                finite("center", center)
            }
            InitialDataSpec::MollifiedPeakon { height, center, mollify_width } => {
                positive("height", height)?;
                positive("mollify_width", mollify_width)?;
                finite("center", center)
            }
            InitialDataSpec::CosineBumpMomentum { amplitude, center, support_width } => {
                positive("amplitude", amplitude)?;
                positive("support_width", support_width)?;
                finite("center", center)
            }
            InitialDataSpec::RandomNonnegMomentum { n_modes, amplitude, .. } => {
                positive("amplitude", amplitude)?;
                if n_modes == 0 {
                    return Err(FlowError::InvalidConfig("n_modes must be at least 1".into()));
                }
                Ok(())
            }
            InitialDataSpec::Explicit { .. } | InitialDataSpec::Zero => Ok(()),
        }
    }

    /// Resolves a relative `Explicit` path against `base`.
    pub fn resolve_paths(&mut self, base: &Path) {
        if let InitialDataSpec::Explicit { path } = self {
            if path.is_relative() {
                *path = base.join(&*path);
            }
        }
    }

    pub fn kind_name(&self) -> &'static str {
        match self {
            InitialDataSpec::GaussianMomentum { .. } => "gaussian_momentum",
            InitialDataSpec::MollifiedPeakon { .. } => "mollified_peakon",
            InitialDataSpec::CosineBumpMomentum { .. } => "cosine_bump_momentum",
            InitialDataSpec::RandomNonnegMomentum { .. } => "random_nonneg_momentum",
            InitialDataSpec::Explicit { .. } => "explicit",
            InitialDataSpec::Zero => "zero",
        }
    }
}

/// Signed displacement `x − c`, wrapped to the nearest image on a periodic grid.
fn displacement(grid: &Grid1D, x: f64, c: f64) -> f64 {
    let d = x - c;
    match grid.kind() {
        DomainKind::Periodic => d - d.round(),
        DomainKind::Line => d,
    }
}

/// `exp(−d²/(2w²))` summed over the periodic images that contribute.
fn gaussian_profile(grid: &Grid1D, c: f64, w: f64) -> Field {
    let images: i32 = match grid.kind() {
        DomainKind::Periodic => (8.0 * w).ceil() as i32 + 1,
        DomainKind::Line => 0,
    };
    Field::from_fn(grid, |x| {
        let d = displacement(grid, x, c);
        (-images..=images)
            .map(|k| {
                let s = d + k as f64;
                (-s * s / (2.0 * w * w)).exp()
            })
            .sum()
    })
}

fn random_momentum(grid: &Grid1D, seed: u64, n_modes: usize, amplitude: f64) -> Field {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let coeffs: Vec<(f64, f64)> = (1..=n_modes)
        .map(|k| {
            let s = 1.0 / (1.0 + (k * k) as f64);
            (rng.random_range(-1.0..=1.0) * s, rng.random_range(-1.0..=1.0) * s)
        })
        .collect();
    let origin = grid.origin();
    let extent = grid.extent();
    let raw = Field::from_fn(grid, |x| {
        let theta = 2.0 * PI * (x - origin) / extent;
        coeffs
            .iter()
            .enumerate()
            .map(|(i, (a, b))| {
                let k = (i + 1) as f64;
                a * (k * theta).cos() + b * (k * theta).sin()
            })
            .sum()
    });
    let lo = raw.min();
    let span = raw.max() - lo;
    if span > 0.0 {
        raw.map(|v| (v - lo) * (amplitude / span))
    } else {
        Field::constant(grid, amplitude)
    }
}

fn parse_samples(path: &Path) -> Result<(Vec<f64>, Vec<f64>)> {
    let err = |message: String| FlowError::InputFile {
        path: path.to_path_buf(),
        message,
    };
    let text = std::fs::read_to_string(path).map_err(|e| err(e.to_string()))?;
    let mut xs = Vec::new();
    let mut ms = Vec::new();
    for (lineno, line) in text.lines().enumerate() {
        let line = line.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let cols: Vec<&str> = line
            .split(|c: char| c == ',' || c.is_whitespace())
            .filter(|s| !s.is_empty())
            .collect();
        if cols.len() != 2 {
            return Err(err(format!("line {}: expected two columns", lineno + 1)));
        }
        let parse = |s: &str| {
            s.parse::<f64>()
                .ok()
                .filter(|v| v.is_finite())
                .ok_or_else(|| err(format!("line {}: `{s}` is not a finite number", lineno + 1)))
        };
        xs.push(parse(cols[0])?);
        ms.push(parse(cols[1])?);
    }
    if xs.len() < 2 {
        return Err(err("need at least two samples".into()));
    }
    Ok((xs, ms))
}

/// Band-limited (trigonometric) resampling of uniform samples onto `grid`.
fn resample(grid: &Grid1D, path: &Path, xs: &[f64], ms: &[f64]) -> Result<Field> {
    let m = xs.len();
    let n = grid.n_points();
    let extent = grid.extent();
    let h = (xs[m - 1] - xs[0]) / (m - 1) as f64;
    let rel = 1e-6;
    let uniform = xs
        .windows(2)
        .all(|w| ((w[1] - w[0]) - h).abs() <= rel * h.abs().max(1e-300));
    if !(h > 0.0 && uniform && (h * m as f64 - extent).abs() <= rel * extent) {
        return Err(FlowError::InputFile {
            path: path.to_path_buf(),
            message: format!(
                "samples must be increasing, uniformly spaced, and cover one period of length {extent}"
            ),
        });
    }
    let mut buf: Vec<Complex64> = ms.iter().map(|&v| Complex64::new(v, 0.0)).collect();
    FftPlanner::new().plan_fft_forward(m).process(&mut buf);

    let mut spec = vec![Complex64::new(0.0, 0.0); n];
    let shift = grid.origin() - xs[0];
    for (j, c) in buf.iter().enumerate() {
        let mode = signed_mode(j, m);
        let k = 2.0 * PI * mode as f64 / extent;
        let coeff = c / m as f64 * Complex64::from_polar(1.0, k * shift);
        let nyquist_m = m.is_multiple_of(2) && j == m / 2;
        let slot = |mode: i64| -> Option<usize> {
            let a = mode.unsigned_abs() as usize;
            if 2 * a > n || (2 * a == n && n < m) {
                None
            } else {
                Some(mode.rem_euclid(n as i64) as usize)
            }
        };
        if nyquist_m && n > m {
            // cosine mode: split evenly between ±m/2
            let half = coeff * 0.5;
            for s in [mode, -mode] {
                if let Some(i) = slot(s) {
                    spec[i] += half;
                }
            }
        } else if let Some(i) = slot(mode) {
            spec[i] += coeff;
        }
    }
    FftPlanner::new().plan_fft_inverse(n).process(&mut spec);
    Field::new(grid, spec.iter().map(|c| c.re).collect())
}

/// `u₀ = Λ⁻² m₀`.
pub fn from_momentum(m0: Field) -> InitialField {
    InitialField {
        u0: helmholtz_inverse(&m0),
        m0,
        warnings: Vec::new(),
    }
}

pub fn build_initial_field(spec: &InitialDataSpec, grid: &Grid1D) -> Result<InitialField> {
    spec.validate()?;
    let m0 = match *spec {
        InitialDataSpec::GaussianMomentum { amplitude, center, width } => {
            gaussian_profile(grid, center, width).map(|v| amplitude * v)
        }
        InitialDataSpec::MollifiedPeakon { height, center, mollify_width } => {
            let scale = 2.0 * height / (mollify_width * (2.0 * PI).sqrt());
            gaussian_profile(grid, center, mollify_width).map(|v| scale * v)
        }
        InitialDataSpec::CosineBumpMomentum { amplitude, center, support_width } => {
            Field::from_fn(grid, |x| {
                let d = displacement(grid, x, center);
                if 2.0 * d.abs() < support_width {
                    0.5 * amplitude * (1.0 + (2.0 * PI * d / support_width).cos())
                } else {
                    0.0
                }
            })
        }
        InitialDataSpec::RandomNonnegMomentum { seed, n_modes, amplitude } => {
            random_momentum(grid, seed, n_modes, amplitude)
        }
        InitialDataSpec::Explicit { ref path } => {
            let (xs, ms) = parse_samples(path)?;
            resample(grid, path, &xs, &ms)?
        }
        InitialDataSpec::Zero => Field::zeros(grid),
    };
    let mut out = from_momentum(m0);
    let lo = out.m0.min();
    if lo < 0.0 {
        out.warnings.push(format!(
            "initial momentum is negative somewhere (min {lo:e}); sign preservation is not claimed"
        ));
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use std::io::Write;

    use super::*;
    use crate::diagnostics::momentum;
    use crate::field::{lp_norm, Norm};
    use crate::kernel::green;

    #[test]
    fn gaussian_round_trip() {
        let g = Grid1D::periodic(256).unwrap();
        let spec = InitialDataSpec::GaussianMomentum { amplitude: 1.0, center: 0.5, width: 0.05 };
        let f = build_initial_field(&spec, &g).unwrap();
        assert!(f.m0.min() >= 0.0);
        assert!(f.warnings.is_empty());
        assert!(momentum(&f.u0).unwrap().sup_distance(&f.m0) < 1e-8);
        assert!((lp_norm(&f.m0, Norm::L1) - f.m0.integral()).abs() == 0.0);
    }

    #[test]
    fn zero_momentum_gives_zero_velocity() {
        let g = Grid1D::periodic(64).unwrap();
        let f = build_initial_field(&InitialDataSpec::Zero, &g).unwrap();
        assert_eq!(f.u0.sup(), 0.0);
    }

    #[test]
    fn mollified_peakon_is_peakon_shaped() {
        let g = Grid1D::line(4096, 20.0).unwrap();
        let spec = InitialDataSpec::MollifiedPeakon { height: 1.0, center: 0.0, mollify_width: 0.1 };
        let f = build_initial_field(&spec, &g).unwrap();
        assert!((f.m0.integral() - 2.0).abs() < 1e-10);
        let peakon = Field::from_fn(&g, |x| 2.0 * green(x, DomainKind::Line));
        let dist = f.u0.sup_distance(&peakon);
        // mollification rounds the crest over a width ~ 0.1
        assert!(dist < 0.1, "{dist}");
        let far = Field::from_fn(&g, |x| if x.abs() > 1.0 { 1.0 } else { 0.0 });
        let far_err = (&(&f.u0 - &peakon) * &far).sup();
        assert!(far_err < 1e-2, "{far_err}");
    }

    #[test]
    fn cosine_bump_has_compact_support() {
        let g = Grid1D::periodic(256).unwrap();
        let spec = InitialDataSpec::CosineBumpMomentum { amplitude: 2.0, center: 0.0, support_width: 0.25 };
        let f = build_initial_field(&spec, &g).unwrap();
        assert!(f.m0.min() >= 0.0);
        assert!((f.m0.max() - 2.0).abs() < 1e-12);
        assert_eq!(f.m0.values()[128], 0.0);
        // the bump is centred on 0 and wraps around the circle
        assert_eq!(f.m0.values()[0], 2.0);
        assert!((f.m0.integral() - 0.25).abs() < 1e-12);
    }

    #[test]
    fn random_momentum_is_reproducible_and_scaled() {
        let g = Grid1D::periodic(128).unwrap();
        let spec = InitialDataSpec::RandomNonnegMomentum { seed: 9, n_modes: 5, amplitude: 3.0 };
        let a = build_initial_field(&spec, &g).unwrap();
        let b = build_initial_field(&spec, &g).unwrap();
        assert_eq!(a.m0.values(), b.m0.values());
        assert_eq!(a.m0.min(), 0.0);
        assert!((a.m0.max() - 3.0).abs() < 1e-12);
        assert!(momentum(&a.u0).unwrap().sup_distance(&a.m0) < 1e-8);
    }

    #[test]
    fn invalid_parameters_rejected() {
        let g = Grid1D::periodic(64).unwrap();
        for spec in [
            InitialDataSpec::GaussianMomentum { amplitude: 0.0, center: 0.5, width: 0.1 },
            InitialDataSpec::GaussianMomentum { amplitude: 1.0, center: 0.5, width: -0.1 },
            InitialDataSpec::MollifiedPeakon { height: 1.0, center: f64::NAN, mollify_width: 0.1 },
            InitialDataSpec::RandomNonnegMomentum { seed: 0, n_modes: 0, amplitude: 1.0 },
        ] {
            assert!(matches!(build_initial_field(&spec, &g), Err(FlowError::InvalidConfig(_))));
        }
    }

    fn write_samples(rows: impl Iterator<Item = (f64, f64)>) -> tempfile::NamedTempFile {
        let mut file = tempfile::NamedTempFile::new().unwrap();
        writeln!(file, "# x m0").unwrap();
        for (x, m) in rows {
            writeln!(file, "{x} {m}").unwrap();
        }
        file
    }

    #[test]
    fn explicit_file_round_trip_on_same_grid() {
        let g = Grid1D::periodic(64).unwrap();
        let f = |x: f64| 1.0 + (2.0 * PI * x).cos() + 0.3 * (6.0 * PI * x).sin();
        let file = write_samples(g.nodes().iter().map(|&x| (x, f(x))));
        let spec = InitialDataSpec::Explicit { path: file.path().to_path_buf() };
        let out = build_initial_field(&spec, &g).unwrap();
        let exact = Field::from_fn(&g, f);
        assert!(out.m0.sup_distance(&exact) < 1e-12);
    }

    #[test]
    fn explicit_file_resamples_band_limited_data() {
        let f = |x: f64| 1.0 + (2.0 * PI * x).cos() + 0.3 * (6.0 * PI * x).sin();
        let coarse = Grid1D::periodic(32).unwrap();
        let file = write_samples(coarse.nodes().iter().map(|&x| (x, f(x))));
        let spec = InitialDataSpec::Explicit { path: file.path().to_path_buf() };
        for n in [16, 128] {
            let g = Grid1D::periodic(n).unwrap();
            let out = build_initial_field(&spec, &g).unwrap();
            assert!(out.m0.sup_distance(&Field::from_fn(&g, f)) < 1e-12, "n = {n}");
        }
    }

    #[test]
    fn explicit_file_on_shifted_line_box() {
        let g = Grid1D::line(128, 4.0).unwrap();
        let f = |x: f64| 2.0 + (PI * x / 4.0).sin();
        // same period, samples offset by half a cell
        let h = 8.0 / 50.0;
        let file = write_samples((0..50).map(|i| {
            let x = -4.0 + (i as f64 + 0.5) * h;
            (x, f(x))
        }));
        let spec = InitialDataSpec::Explicit { path: file.path().to_path_buf() };
        let out = build_initial_field(&spec, &g).unwrap();
        assert!(out.m0.sup_distance(&Field::from_fn(&g, f)) < 1e-12);
    }

    #[test]
    fn explicit_negative_momentum_warns() {
        let g = Grid1D::periodic(32).unwrap();
        let file = write_samples(g.nodes().iter().map(|&x| (x, (2.0 * PI * x).sin())));
        let spec = InitialDataSpec::Explicit { path: file.path().to_path_buf() };
        let out = build_initial_field(&spec, &g).unwrap();
        assert_eq!(out.warnings.len(), 1);
    }

    #[test]
    fn explicit_file_errors_name_the_file() {
        let g = Grid1D::periodic(32).unwrap();
        let file = write_samples([(0.0, 1.0), (0.1, 2.0), (0.5, 1.0)].into_iter());
        let spec = InitialDataSpec::Explicit { path: file.path().to_path_buf() };
        match build_initial_field(&spec, &g) {
            Err(FlowError::InputFile { path, .. }) => assert_eq!(path, file.path()),
            other => panic!("unexpected {other:?}"),
        }
        let spec = InitialDataSpec::Explicit { path: "/definitely/missing.txt".into() };
        assert!(matches!(build_initial_field(&spec, &g), Err(FlowError::InputFile { .. })));
    }

    #[test]
    fn toml_representation() {
        let spec: InitialDataSpec =
            toml::from_str("kind = \"gaussian_momentum\"\namplitude = 1.0\ncenter = 0.5\nwidth = 0.05\n").unwrap();
        assert_eq!(spec, InitialDataSpec::GaussianMomentum { amplitude: 1.0, center: 0.5, width: 0.05 });
        let bad = toml::from_str::<InitialDataSpec>(
            "kind = \"gaussian_momentum\"\namplitude = 1.0\ncenter = 0.5\nwidht = 0.05\n",
        );
        assert!(bad.unwrap_err().to_string().contains("widht"));
    }
}
