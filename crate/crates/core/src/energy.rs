//! The energy hierarchy: pointwise densities `J_m`, their integrals `I_m`,
//! and the derivative sup-norm maxima `k_{n-1}`.

use crate::error::Result;
use crate::field::Field;
use crate::spectral::derivatives;

/// Binomial coefficient, extended by zero outside `0 ≤ k ≤ n`.
pub fn binom(n: i64, k: i64) -> u64 {
    if n < 0 || k < 0 || k > n {
        return 0;
    }
    let k = k.min(n - k) as u64;
    let n = n as u64;
    (0..k).fold(1u64, |acc, i| acc * (n - i) / (i + 1))
}

/// `∂ⁿ(f²)` assembled from the Leibniz expansion `Σ C(n,k) (∂^{n-k}f)(∂^k f)`.
pub fn leibniz_square_derivative(f: &Field, n: usize) -> Result<Field> {
    let d = derivatives(f, n)?;
    Ok(leibniz_from_derivatives(&d, n))
}

pub(crate) fn leibniz_from_derivatives(d: &[Field], n: usize) -> Field {
    let len = d[0].len();
    let mut out = vec![0.0; len];
    for k in 0..=n {
        let c = binom(n as i64, k as i64) as f64;
        let (a, b) = (d[n - k].values(), d[k].values());
        for i in 0..len {
            out[i] += c * a[i] * b[i];
        }
    }
    Field::from_raw(d[0].grid(), out)
}

/// `J_m = ½ Σ_{j≤m} (∂^j f)²` at every node.
pub fn energy_density(f: &Field, m: usize) -> Result<Field> {
    Ok(density_from_derivatives(&derivatives(f, m)?, m))
}

pub(crate) fn density_from_derivatives(d: &[Field], m: usize) -> Field {
    let len = d[0].len();
    let mut out = vec![0.0; len];
    for dj in &d[..=m] {
        for (o, v) in out.iter_mut().zip(dj.values()) {
            *o += v * v;
        }
    }
    out.iter_mut().for_each(|o| *o *= 0.5);
    Field::from_raw(d[0].grid(), out)
}

/// `I_m = ∫ J_m dx`, so that `‖f‖_{H^m} = √(2 I_m)`.
pub fn energy(f: &Field, m: usize) -> Result<f64> {
    Ok(energy_density(f, m)?.integral())
}

/// `k_{n-1} = max_{0≤j≤n-1} ‖∂^j f‖_∞`.
pub fn k_max(f: &Field, n: usize) -> Result<f64> {
    assert!(n >= 1, "k_max needs n ≥ 1");
    let d = derivatives(f, n - 1)?;
    Ok(d.iter().map(Field::sup).fold(0.0, f64::max))
}

/// `J_m`, `I_m` and `k_m` for one field and one order.
#[derive(Debug, Clone)]
pub struct EnergyProfile {
    pub order: usize,
    pub density: Field,
    pub energy: f64,
    pub k_value: f64,
}

impl EnergyProfile {
    pub fn new(f: &Field, order: usize) -> Result<Self> {
        let d = derivatives(f, order)?;
        let density = density_from_derivatives(&d, order);
        let energy = density.integral();
        let k_value = d.iter().map(Field::sup).fold(0.0, f64::max);
        Ok(Self {
            order,
            density,
            energy,
            k_value,
        })
    }
}
