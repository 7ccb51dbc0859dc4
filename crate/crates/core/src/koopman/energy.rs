//! Kinetic energy `E(u) = int u^2` expanded in products of Koopman terms.
//!
//! `E(u(t)) = sum_{nu, nu'} b_{nu nu'} phi_nu phi_nu' exp((lambda_nu + lambda_nu') t)`
//! with `b_{nu nu'} = int a_nu a_nu'`. Pairs sharing `lambda_nu + lambda_nu'`
//! are merged, so the result is a short exponential sum.

use std::collections::BTreeMap;
use std::f64::consts::PI;

use faer::Mat;
use serde::Serialize;

use super::Decomposition;
use crate::grid::GridFunction;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EnergyComponent {
    /// `lambda_nu + lambda_nu'`.
    pub lambda: f64,
    /// Sum of `b phi phi'` over all pairs with this exponent.
    pub coefficient: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EnergyDecomposition {
    /// Sorted by decreasing `lambda`.
    pub components: Vec<EnergyComponent>,
    /// `(t, E_series(t))` for each requested sample.
    pub samples: Vec<(f64, f64)>,
}

impl EnergyDecomposition {
    pub fn energy_at(&self, t: f64) -> f64 {
        self.components
            .iter()
            .map(|c| c.coefficient * (c.lambda * t).exp())
            .sum()
    }
}

/// Energy expansion of the `(L, W)` truncation for `u0`, evaluated at `t_samples`.
pub fn energy_decomposition(
    u0: &GridFunction,
    max_tail_length: usize,
    max_wavenumber: u32,
    t_samples: &[f64],
) -> EnergyDecomposition {
    let dec = Decomposition::new(u0, max_tail_length, max_wavenumber);
    energy_of(&dec, t_samples)
}

pub(crate) fn energy_of(dec: &Decomposition, t_samples: &[f64]) -> EnergyDecomposition {
    let mesh = dec.mesh();
    let n = mesh.n_points();
    let k = dec.terms.len();
    let h = mesh.dx();
    let weight = |i: usize| if i == 0 || i == n - 1 { 0.5 * h } else { h };
    let modes = Mat::<f64>::from_fn(n, k, |i, j| dec.terms[j].mode.values()[i]);
    let weighted = Mat::<f64>::from_fn(n, k, |i, j| weight(i) * modes[(i, j)]);
    let gram = modes.transpose() * &weighted;

    let mut by_exponent: BTreeMap<u64, f64> = BTreeMap::new();
    for (i, ti) in dec.terms.iter().enumerate() {
        let ci = ti.multiplicity as f64 * ti.amplitude;
        if ci == 0.0 {
            continue;
        }
        for (j, tj) in dec.terms.iter().enumerate() {
            let cj = tj.multiplicity as f64 * tj.amplitude;
            let key = ti.index.squared_sum() + tj.index.squared_sum();
            *by_exponent.entry(key).or_default() += gram[(i, j)] * ci * cj;
        }
    }
    let components: Vec<_> = by_exponent
        .into_iter()
        .map(|(s, coefficient)| EnergyComponent {
            lambda: -PI * PI * s as f64,
            coefficient,
        })
        .collect();
    let mut out = EnergyDecomposition {
        components,
        samples: Vec::new(),
    };
    out.samples = t_samples.iter().map(|&t| (t, out.energy_at(t))).collect();
    out
}
