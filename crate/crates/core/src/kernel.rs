//! Green's kernels of `Λ² = 1 − ∂ₓ²` and the non-local operators built on them.
//!
//! The production path applies the operators as Fourier multipliers. On the
//! line the multiplier lives on the `[-L, L)` box, which is exact for the
//! periodized kernel `cosh(L − |x|) / (2 sinh L)`; that kernel differs from
//! `½e^{−|x|}` by `O(e^{−L})`. [`convolve_direct`] is the quadrature oracle.

use rustfft::num_complex::Complex64;

use crate::error::Result;
use crate::field::Field;
use crate::grid::{DomainKind, Grid1D};
use crate::spectral::{apply_multiplier, derivative, derivatives};

const INV_TWO_SINH_HALF: f64 = 0.959_517_375_667_471_9; // 1 / (2 sinh ½)

/// Closed-form Green's function of `1 − ∂ₓ²` on the line or the unit circle.
pub fn green(x: f64, kind: DomainKind) -> f64 {
    match kind {
        DomainKind::Line => 0.5 * (-x.abs()).exp(),
        DomainKind::Periodic => (x - x.floor() - 0.5).cosh() * INV_TWO_SINH_HALF,
    }
}

/// `∂ₓg`, with the value 0 at the kink (sgn 0 = 0).
///
/// On the circle this is `sinh(x − ⌊x⌋ − ½) / (2 sinh ½)`, the derivative of
/// the cosh kernel (negative just right of the kink, like the line kernel).
pub fn green_derivative(x: f64, kind: DomainKind) -> f64 {
    match kind {
        DomainKind::Line => -0.5 * sgn(x) * (-x.abs()).exp(),
        DomainKind::Periodic => {
            let frac = x - x.floor();
            if frac == 0.0 {
                0.0
            } else {
                (frac - 0.5).sinh() * INV_TWO_SINH_HALF
            }
        }
    }
}

/// Green's function of `1 − ∂ₓ²` on a box of period `2L`, evaluated after
/// wrapping `x` into `[-L, L)`.
pub fn periodized_green(x: f64, halfwidth: f64) -> f64 {
    let z = wrap(x, halfwidth).abs();
    let l = halfwidth;
    0.5 * (-z).exp() * (1.0 + (-2.0 * (l - z)).exp()) / (1.0 - (-2.0 * l).exp())
}

pub fn periodized_green_derivative(x: f64, halfwidth: f64) -> f64 {
    let w = wrap(x, halfwidth);
    let z = w.abs();
    let l = halfwidth;
    -0.5 * sgn(w) * (-z).exp() * (1.0 - (-2.0 * (l - z)).exp()) / (1.0 - (-2.0 * l).exp())
}

fn wrap(x: f64, halfwidth: f64) -> f64 {
    let p = 2.0 * halfwidth;
    x - p * ((x + halfwidth) / p).floor()
}

fn sgn(x: f64) -> f64 {
    if x > 0.0 {
        1.0
    } else if x < 0.0 {
        -1.0
    } else {
        0.0
    }
}

/// Which kernel [`convolve_direct`] integrates against.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum KernelPart {
    G,
    Dg,
}

/// Kernel samples at the node offsets `iΔ` of a grid (offsets wrap into the
/// box, so index `i` and `i − N` coincide).
#[derive(Debug, Clone)]
pub struct KernelTable {
    kind: DomainKind,
    spacing: f64,
    g_values: Vec<f64>,
    dg_values: Vec<f64>,
    g_sup: f64,
}

impl KernelTable {
    pub fn new(grid: &Grid1D) -> Self {
        let n = grid.n_points();
        let dx = grid.spacing();
        let l = grid.halfwidth();
        let offset = |i: usize| {
            if i <= n / 2 {
                i as f64 * dx
            } else {
                (i as f64 - n as f64) * dx
            }
        };
        let (g_values, dg_values): (Vec<f64>, Vec<f64>) = match grid.kind() {
            DomainKind::Periodic => (0..n)
                .map(|i| {
                    let z = i as f64 * dx;
                    (
                        green(z, DomainKind::Periodic),
                        green_derivative(z, DomainKind::Periodic),
                    )
                })
                .unzip(),
            DomainKind::Line => (0..n)
                .map(|i| {
                    let z = offset(i);
                    (periodized_green(z, l), periodized_green_derivative(z, l))
                })
                .unzip(),
        };
        let g_sup = g_values.iter().fold(0.0_f64, |m, v| m.max(v.abs()));
        Self {
            kind: grid.kind(),
            spacing: dx,
            g_values,
            dg_values,
            g_sup,
        }
    }

    pub fn kind(&self) -> DomainKind {
        self.kind
    }

    pub fn g_values(&self) -> &[f64] {
        &self.g_values
    }

    pub fn dg_values(&self) -> &[f64] {
        &self.dg_values
    }

    /// `‖g‖_∞` of the kernel actually applied on this grid.
    pub fn g_sup(&self) -> f64 {
        self.g_sup
    }

    /// Kink-corrected quadrature of `g` over one period.
    pub fn mass(&self) -> f64 {
        let h = self.spacing;
        let t = h * self.g_values.iter().sum::<f64>();
        t - h.powi(2) / 12.0 + h.powi(4) / 720.0 - h.powi(6) / 30240.0
    }

    fn part(&self, which: KernelPart) -> &[f64] {
        match which {
            KernelPart::G => &self.g_values,
            KernelPart::Dg => &self.dg_values,
        }
    }
}

/// `Λ⁻² f = g ∗ f` via the multiplier `1 / (1 + κ²)`.
pub fn helmholtz_inverse(f: &Field) -> Field {
    apply_multiplier(f, |k| Complex64::new(1.0 / (1.0 + k * k), 0.0))
}

/// `∂ₓΛ⁻² f = (∂ₓg) ∗ f` via the multiplier `iκ / (1 + κ²)`.
pub fn dx_helmholtz_inverse(f: &Field) -> Field {
    apply_multiplier(f, |k| Complex64::new(0.0, k / (1.0 + k * k)))
}

/// `(1 + ∂ₓ)Λ⁻² f = (g + ∂ₓg) ∗ f`.
pub fn one_plus_dx_helmholtz_inverse(f: &Field) -> Field {
    apply_multiplier(f, |k| Complex64::new(1.0, k) / (1.0 + k * k))
}

/// Abstraction over the non-local operators so checks can be run against
/// alternative (or deliberately broken) implementations.
pub trait NonlocalOperators: Sync {
    fn helmholtz_inverse(&self, f: &Field) -> Field;
    fn dx_helmholtz_inverse(&self, f: &Field) -> Field;

    fn one_plus_dx_helmholtz_inverse(&self, f: &Field) -> Field {
        &self.helmholtz_inverse(f) + &self.dx_helmholtz_inverse(f)
    }
}

/// The Fourier-multiplier operators.
#[derive(Debug, Clone, Copy, Default)]
pub struct SpectralOperators;

impl NonlocalOperators for SpectralOperators {
    fn helmholtz_inverse(&self, f: &Field) -> Field {
        helmholtz_inverse(f)
    }

    fn dx_helmholtz_inverse(&self, f: &Field) -> Field {
        dx_helmholtz_inverse(f)
    }

    fn one_plus_dx_helmholtz_inverse(&self, f: &Field) -> Field {
        one_plus_dx_helmholtz_inverse(f)
    }
}

/// O(N²) circular convolution by quadrature against the sampled kernel.
///
/// The trapezoid sum is corrected for the kink of the kernel at zero offset
/// with the Euler–Maclaurin jump terms through `Δ⁶`. The derivatives of `f`
/// those terms need come from 8th-order central differences, so this path
/// shares nothing with the Fourier multipliers.
pub fn convolve_direct(f: &Field, kernel: &KernelTable, which: KernelPart) -> Field {
    let n = f.len();
    let h = f.grid().spacing();
    let vals = f.values();
    let k = kernel.part(which);

    let mut d = vec![vals.to_vec()];
    for _ in 0..5 {
        let next = central_difference(d.last().unwrap(), h);
        d.push(next);
    }
    let (h2, h4, h6) = (h * h, h.powi(4), h.powi(6));

    let out = (0..n)
        .map(|i| {
            let mut t = 0.0;
            for (j, &fj) in vals.iter().enumerate() {
                t += k[(i + n - j) % n] * fj;
            }
            t *= h;
            let corr = match which {
                KernelPart::G => {
                    let (f0, f2, f4) = (d[0][i], d[2][i], d[4][i]);
                    -h2 / 12.0 * f0 + h4 / 720.0 * (3.0 * f2 + f0)
                        - h6 / 30240.0 * (5.0 * f4 + 10.0 * f2 + f0)
                }
                KernelPart::Dg => {
                    let (f1, f3, f5) = (d[1][i], d[3][i], d[5][i]);
                    h2 / 12.0 * f1 - h4 / 720.0 * (f3 + 3.0 * f1)
                        + h6 / 30240.0 * (f5 + 10.0 * f3 + 5.0 * f1)
                }
            };
            t + corr
        })
        .collect();
    Field::from_raw(f.grid(), out)
}

fn central_difference(v: &[f64], h: f64) -> Vec<f64> {
    const C: [f64; 4] = [4.0 / 5.0, -1.0 / 5.0, 4.0 / 105.0, -1.0 / 280.0];
    let n = v.len();
    (0..n)
        .map(|i| {
            C.iter()
                .enumerate()
                .map(|(s, c)| {
                    let s = s + 1;
                    c * (v[(i + s) % n] - v[(i + n - s) % n])
                })
                .sum::<f64>()
                / h
        })
        .collect()
}

/// Sup-norm of `∂ⁿ(1+∂)Λ⁻² f − [(1+∂)Λ⁻² f − Σ_{k<n} ∂^k f]`.
pub fn operator_identity_residual(f: &Field, n: usize) -> Result<f64> {
    operator_identity_residual_with(&SpectralOperators, f, n)
}

pub fn operator_identity_residual_with(
    ops: &dyn NonlocalOperators,
    f: &Field,
    n: usize,
) -> Result<f64> {
    let p = ops.one_plus_dx_helmholtz_inverse(f);
    let left = derivative(&p, n)?;
    let mut right = p;
    for dk in &derivatives(f, n.saturating_sub(1))?[..n] {
        right = &right - dk;
    }
    Ok(left.sup_distance(&right))
}
