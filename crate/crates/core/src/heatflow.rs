//! Heat states `v = constant + sum_m c_m e_m` and the exact Neumann heat
//! propagator, which multiplies `c_m` by `exp(-m^2 pi^2 t)`.

use std::f64::consts::{PI, SQRT_2};

use serde::{Deserialize, Serialize};

use crate::colehopf::{ensure_positive, hopf};
use crate::error::{Error, Result};
use crate::grid::{cos_pi, sin_pi, GridFunction, Mesh};

/// Truncation used when projecting sampled heat states.
pub const DEFAULT_MODES: usize = 32;

/// Cosine-series heat state; `coeffs[m - 1]` is `c_m`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CosineSeries {
    pub constant: f64,
    pub coeffs: Vec<f64>,
}

impl CosineSeries {
    pub fn new(constant: f64, coeffs: Vec<f64>) -> Result<Self> {
        if coeffs.is_empty() {
            return Err(Error::InvalidArgument(
                "cosine series needs at least one coefficient".into(),
            ));
        }
        if !constant.is_finite() || coeffs.iter().any(|c| !c.is_finite()) {
            return Err(Error::InvalidArgument("non-finite cosine coefficient".into()));
        }
        Ok(Self { constant, coeffs })
    }

    /// Series for `1 + sum_m a_m cos(m pi x)`, the form used to write presets.
    pub fn from_cosine_amplitudes(amplitudes: &[f64]) -> Result<Self> {
        Self::new(1.0, amplitudes.iter().map(|a| a / SQRT_2).collect())
    }

    /// Largest retained wavenumber `M`.
    pub fn max_wavenumber(&self) -> usize {
        self.coeffs.len()
    }

    /// `c_m`, zero beyond the truncation.
    pub fn coeff(&self, m: usize) -> f64 {
        assert!(m >= 1, "cosine coefficients start at m = 1");
        self.coeffs.get(m - 1).copied().unwrap_or(0.0)
    }

    /// Exact heat flow to time `t`.
    pub fn evolve(&self, t: f64) -> Result<Self> {
        if t < 0.0 {
            return Err(Error::NegativeTime(t));
        }
        let coeffs = self
            .coeffs
            .iter()
            .enumerate()
            .map(|(i, c)| {
                let m = (i + 1) as f64;
                (-m * m * PI * PI * t).exp() * c
            })
            .collect();
        Ok(Self {
            constant: self.constant,
            coeffs,
        })
    }

    pub fn synthesize(&self, mesh: Mesh) -> GridFunction {
        let values = mesh
            .points()
            .map(|x| {
                self.coeffs
                    .iter()
                    .enumerate()
                    .fold(self.constant, |acc, (i, c)| {
                        acc + c * SQRT_2 * cos_pi((i + 1) as f64 * x)
                    })
            })
            .collect();
        GridFunction::from_vec_unchecked(mesh, values)
    }

    /// Analytic `x`-derivative of the series, sampled.
    pub fn synthesize_derivative(&self, mesh: Mesh) -> GridFunction {
        let values = mesh
            .points()
            .map(|x| {
                self.coeffs.iter().enumerate().fold(0.0, |acc, (i, c)| {
                    let m = (i + 1) as f64;
                    acc - c * SQRT_2 * m * PI * sin_pi(m * x)
                })
            })
            .collect();
        GridFunction::from_vec_unchecked(mesh, values)
    }

    /// `sum_m (m pi c_m)^2`, the squared `L2` norm of `v'` by Parseval.
    pub fn gradient_energy(&self) -> f64 {
        self.coeffs
            .iter()
            .enumerate()
            .map(|(i, c)| {
                let k = (i + 1) as f64 * PI * c;
                k * k
            })
            .sum()
    }

    /// Cole transform with the analytic series derivative.
    pub fn cole_exact(&self, mesh: Mesh) -> Result<GridFunction> {
        let v = self.synthesize(mesh);
        ensure_positive(&v)?;
        Ok(self
            .synthesize_derivative(mesh)
            .zip_with(&v, |dv, v| -2.0 * dv / v))
    }

    /// Exact Burgers state at time `t` whose heat state at `t = 0` is `self`.
    pub fn burgers_at(&self, t: f64, mesh: Mesh) -> Result<GridFunction> {
        self.evolve(t)?.cole_exact(mesh)
    }
}

/// Trapezoid projection onto `1, e_1, ..., e_M`.
pub fn project(v0: &GridFunction, max_wavenumber: usize) -> CosineSeries {
    assert!(max_wavenumber >= 1, "projection needs M >= 1");
    let mesh = v0.mesh();
    let h = mesh.dx();
    let n = mesh.n_points();
    let vals = v0.values();
    let coeffs = (1..=max_wavenumber)
        .map(|m| {
            let mut acc = 0.0;
            for (i, &v) in vals.iter().enumerate() {
                let w = if i == 0 || i == n - 1 { 0.5 } else { 1.0 };
                acc += w * v * cos_pi(m as f64 * mesh.x(i));
            }
            SQRT_2 * h * acc
        })
        .collect();
    CosineSeries {
        constant: v0.trapezoid(),
        coeffs,
    }
}

/// Heat state `H(u0)` projected onto `M` cosine modes; its coefficients are
/// the elementary eigenfunctionals `l_m(u0)`.
pub fn heat_coefficients(u0: &GridFunction, max_wavenumber: usize) -> CosineSeries {
    project(&hopf(u0), max_wavenumber)
}
