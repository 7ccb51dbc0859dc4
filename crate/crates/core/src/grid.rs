//! Uniform mesh on `[0, 1]`, composite trapezoid quadrature, finite
//! differences and the orthonormal cosine basis `e_m(x) = sqrt(2) cos(m pi x)`.

use std::f64::consts::{PI, SQRT_2};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Default number of mesh points.
pub const DEFAULT_POINTS: usize = 1024;

/// Uniform mesh `x_i = i / (n_points - 1)`, `i = 0..n_points`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Mesh {
    n_points: usize,
}

impl Mesh {
    pub fn new(n_points: usize) -> Result<Self> {
        if n_points < 3 {
            return Err(Error::MeshTooSmall(n_points));
        }
        Ok(Self { n_points })
    }

    pub fn n_points(&self) -> usize {
        self.n_points
    }

    pub fn dx(&self) -> f64 {
        1.0 / (self.n_points - 1) as f64
    }

    /// Position of point `i`. Division keeps both endpoints exact.
    pub fn x(&self, i: usize) -> f64 {
        i as f64 / (self.n_points - 1) as f64
    }

    pub fn points(&self) -> impl ExactSizeIterator<Item = f64> + '_ {
        (0..self.n_points).map(|i| self.x(i))
    }
}

impl Default for Mesh {
    fn default() -> Self {
        Self {
            n_points: DEFAULT_POINTS,
        }
    }
}

/// `sin(pi y)` with exact zeros at integer `y` and exact odd symmetry.
pub fn sin_pi(y: f64) -> f64 {
    let r = y.rem_euclid(2.0);
    let (r, sign) = if r >= 1.0 { (r - 1.0, -1.0) } else { (r, 1.0) };
    if r == 0.0 {
        return 0.0;
    }
    let r = if r > 0.5 { 1.0 - r } else { r };
    sign * (PI * r).sin()
}

/// `cos(pi y)` with exact zeros at half-integers and exact signs at integers.
pub fn cos_pi(y: f64) -> f64 {
    sin_pi(y + 0.5)
}

/// Real samples of a function on a [`Mesh`].
#[derive(Debug, Clone, PartialEq)]
pub struct GridFunction {
    mesh: Mesh,
    values: Vec<f64>,
}

impl GridFunction {
    pub fn new(mesh: Mesh, values: Vec<f64>) -> Result<Self> {
        if values.len() != mesh.n_points() {
            return Err(Error::LengthMismatch {
                expected: mesh.n_points(),
                got: values.len(),
            });
        }
        if let Some(index) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFinite { index });
        }
        Ok(Self { mesh, values })
    }

    /// Samples `f` at every mesh point.
    ///
    /// # Panics
    /// If `f` returns a non-finite value.
    pub fn from_fn(mesh: Mesh, f: impl Fn(f64) -> f64) -> Self {
        let values: Vec<f64> = mesh.points().map(f).collect();
        assert!(
            values.iter().all(|v| v.is_finite()),
            "sampled function is not finite"
        );
        Self { mesh, values }
    }

    pub fn zeros(mesh: Mesh) -> Self {
        Self {
            mesh,
            values: vec![0.0; mesh.n_points()],
        }
    }

    pub fn constant(mesh: Mesh, c: f64) -> Self {
        Self {
            mesh,
            values: vec![c; mesh.n_points()],
        }
    }

    /// Builds without the finiteness check. Callers guarantee finite values.
    pub(crate) fn from_vec_unchecked(mesh: Mesh, values: Vec<f64>) -> Self {
        debug_assert_eq!(values.len(), mesh.n_points());
        Self { mesh, values }
    }

    pub fn mesh(&self) -> Mesh {
        self.mesh
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    pub fn first(&self) -> f64 {
        self.values[0]
    }

    pub fn last(&self) -> f64 {
        self.values[self.values.len() - 1]
    }

    pub fn map(&self, f: impl Fn(f64) -> f64) -> Self {
        Self::from_vec_unchecked(self.mesh, self.values.iter().map(|&v| f(v)).collect())
    }

    /// Pointwise combination of two functions on the same mesh.
    ///
    /// # Panics
    /// If the meshes differ.
    pub fn zip_with(&self, other: &Self, f: impl Fn(f64, f64) -> f64) -> Self {
        assert_eq!(self.mesh, other.mesh, "grid functions live on different meshes");
        Self::from_vec_unchecked(
            self.mesh,
            self.values
                .iter()
                .zip(&other.values)
                .map(|(&a, &b)| f(a, b))
                .collect(),
        )
    }

    pub fn scale(&self, s: f64) -> Self {
        self.map(|v| s * v)
    }

    pub fn add(&self, other: &Self) -> Self {
        self.zip_with(other, |a, b| a + b)
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.zip_with(other, |a, b| a - b)
    }

    pub fn mul(&self, other: &Self) -> Self {
        self.zip_with(other, |a, b| a * b)
    }

    /// Composite trapezoid approximation of the integral over `[0, 1]`.
    pub fn trapezoid(&self) -> f64 {
        let v = &self.values;
        let n = v.len();
        let inner: f64 = v[1..n - 1].iter().sum();
        self.mesh.dx() * (inner + 0.5 * (v[0] + v[n - 1]))
    }

    /// Running trapezoid integral `g(x_i) = int_0^{x_i} f`.
    ///
    /// The last entry is computed with the same summation as [`Self::trapezoid`]
    /// so the two agree bit for bit.
    pub fn cumulative_trapezoid(&self) -> Self {
        let v = &self.values;
        let n = v.len();
        let h = self.mesh.dx();
        let mut out = Vec::with_capacity(n);
        out.push(0.0);
        let mut acc = 0.0;
        for i in 1..n {
            acc += 0.5 * (v[i - 1] + v[i]);
            out.push(h * acc);
        }
        out[n - 1] = self.trapezoid();
        Self::from_vec_unchecked(self.mesh, out)
    }

    /// `L2` norm under trapezoid quadrature.
    pub fn l2_norm(&self) -> f64 {
        self.map(|v| v * v).trapezoid().sqrt()
    }

    /// Inner product under trapezoid quadrature.
    pub fn inner(&self, other: &Self) -> f64 {
        self.mul(other).trapezoid()
    }

    pub fn sup_norm(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    /// Largest pointwise distance to `other`.
    pub fn sup_distance(&self, other: &Self) -> f64 {
        self.sub(other).sup_norm()
    }

    /// Minimum sample and its index.
    pub fn min(&self) -> (f64, usize) {
        self.values
            .iter()
            .enumerate()
            .fold((f64::INFINITY, 0), |(m, k), (i, &v)| {
                if v < m {
                    (v, i)
                } else {
                    (m, k)
                }
            })
    }

    /// Second-order finite difference derivative: central in the interior,
    /// one-sided three-point stencils at both ends.
    pub fn derivative(&self) -> Self {
        let v = &self.values;
        let n = v.len();
        let inv = 1.0 / (2.0 * self.mesh.dx());
        let mut d = Vec::with_capacity(n);
        d.push((-3.0 * v[0] + 4.0 * v[1] - v[2]) * inv);
        for i in 1..n - 1 {
            d.push((v[i + 1] - v[i - 1]) * inv);
        }
        d.push((3.0 * v[n - 1] - 4.0 * v[n - 2] + v[n - 3]) * inv);
        Self::from_vec_unchecked(self.mesh, d)
    }

    /// Second derivative as two applications of [`Self::derivative`].
    pub fn second_derivative(&self) -> Self {
        self.derivative().derivative()
    }
}

/// Samples of `e_m(x) = sqrt(2) cos(m pi x)`.
///
/// # Panics
/// If `m == 0`; the constant mode is not part of this basis.
pub fn basis_e(m: usize, mesh: Mesh) -> GridFunction {
    assert!(m >= 1, "cosine basis starts at m = 1");
    GridFunction::from_fn(mesh, |x| SQRT_2 * cos_pi(m as f64 * x))
}

/// Derivative of `e_m`: `-sqrt(2) m pi sin(m pi x)`.
pub fn basis_e_derivative(m: usize, mesh: Mesh) -> GridFunction {
    let k = -SQRT_2 * m as f64 * PI;
    GridFunction::from_fn(mesh, |x| k * sin_pi(m as f64 * x))
}
