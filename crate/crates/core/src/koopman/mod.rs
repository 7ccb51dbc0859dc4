//! Explicit Koopman decomposition of the Burgers flow.
//!
//! For `u0` with heat state `H(u0) = 1 + sum_m l_m e_m` the Burgers solution is
//!
//! ```text
//! u(t, x) = sum_nu exp(lambda_nu t) phi_nu(u0) a_nu(x)
//! lambda_nu = -pi^2 sum_k n_k^2
//! a_nu(x)   = (-1)^alpha 2^((alpha+3)/2) n0 pi sin(n0 pi x) prod_{k>=1} cos(n_k pi x)
//! phi_nu    = prod_k l_{n_k}(u0)
//! ```
//!
//! A [`Decomposition`] truncates the sum to tail lengths `<= L` and entries
//! `<= W`. Ordered tuples that differ only by a tail permutation give identical
//! terms, so the series is summed over canonical indices weighted by their
//! multiplicity, in canonical order.

mod energy;
mod index;
mod spectral;

use std::f64::consts::PI;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::colehopf::{check_region, RegionReport};
use crate::error::{Error, Result};
use crate::grid::{cos_pi, sin_pi, GridFunction, Mesh};
use crate::heatflow::{heat_coefficients, CosineSeries, DEFAULT_MODES};
use crate::oracle::{self, SolverConfig};

pub use energy::{energy_decomposition, EnergyComponent, EnergyDecomposition};
pub use index::{
    canonical_indices, concatenate, eigenvalue, enumerate, raw_count, MultiIndex, RawIndex,
};
pub use spectral::{
    independent_count, relevance, relevance_window, Relevance, INDEPENDENCE_CUTOFF,
};

/// Sampled trigonometric factors `sin(n pi x)` and `cos(n pi x)` for `n <= W`.
struct TrigTable {
    sin: Vec<Vec<f64>>,
    cos: Vec<Vec<f64>>,
}

impl TrigTable {
    fn new(max_wavenumber: u32, mesh: Mesh) -> Self {
        let row = |f: fn(f64) -> f64, n: u32| -> Vec<f64> {
            mesh.points().map(|x| f(f64::from(n) * x)).collect()
        };
        Self {
            sin: (1..=max_wavenumber).map(|n| row(sin_pi, n)).collect(),
            cos: (1..=max_wavenumber).map(|n| row(cos_pi, n)).collect(),
        }
    }

    fn mode(&self, nu: &MultiIndex, mesh: Mesh) -> GridFunction {
        let alpha = nu.alpha();
        let sign = if alpha % 2 == 0 { 1.0 } else { -1.0 };
        let scale = sign * 2f64.powf((alpha as f64 + 3.0) / 2.0) * f64::from(nu.head()) * PI;
        let mut values: Vec<f64> = self.sin[nu.head() as usize - 1]
            .iter()
            .map(|s| scale * s)
            .collect();
        for &n in nu.tail() {
            for (v, c) in values.iter_mut().zip(&self.cos[n as usize - 1]) {
                *v *= c;
            }
        }
        GridFunction::from_vec_unchecked(mesh, values)
    }
}

/// Koopman mode `a_nu` sampled on `mesh`.
pub fn mode(nu: &MultiIndex, mesh: Mesh) -> GridFunction {
    TrigTable::new(nu.max_entry(), mesh).mode(nu, mesh)
}

/// `phi_nu` evaluated from precomputed elementary eigenfunctionals `l_m`.
pub fn amplitude_from(nu: &MultiIndex, heat: &CosineSeries) -> f64 {
    nu.entries().map(|n| heat.coeff(n as usize)).product()
}

/// Eigenfunctional `phi_nu(u0) = prod_k c_{n_k}(H(u0))`.
pub fn amplitude(nu: &MultiIndex, u0: &GridFunction) -> f64 {
    let heat = heat_coefficients(u0, nu.max_entry() as usize);
    amplitude_from(nu, &heat)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct DecompositionConfig {
    pub max_tail_length: usize,
    pub max_wavenumber: u32,
    pub n_points: usize,
}

#[derive(Debug, Clone)]
pub struct KoopmanTerm {
    pub index: MultiIndex,
    /// Number of ordered tuples represented by `index`.
    pub multiplicity: u64,
    pub lambda: f64,
    pub amplitude: f64,
    pub mode: GridFunction,
}

impl KoopmanTerm {
    /// Contribution of this canonical term (all orderings) at time `t`.
    pub fn weight(&self, t: f64) -> f64 {
        self.multiplicity as f64 * (self.lambda * t).exp() * self.amplitude
    }
}

/// Truncated Koopman series for one initial datum.
#[derive(Debug, Clone)]
pub struct Decomposition {
    pub config: DecompositionConfig,
    pub terms: Vec<KoopmanTerm>,
    /// Ordered-tuple count before deduplication.
    pub raw_count: u64,
    /// Absent for decompositions loaded from a record.
    pub u0: Option<GridFunction>,
}

/// Raised when the series is evaluated where convergence is not guaranteed.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub enum ReconstructionWarning {
    /// `t = 0` with a datum outside the uniform-convergence region.
    OutsideUniformRegion { norm_u0: f64 },
    /// `t = 0` on a loaded decomposition whose datum is unknown.
    UnknownRegion,
}

#[derive(Debug, Clone)]
pub struct Reconstruction {
    pub u: GridFunction,
    pub warning: Option<ReconstructionWarning>,
}

impl Decomposition {
    /// Builds the truncated series for `u0`, keeping every amplitude.
    pub fn new(u0: &GridFunction, max_tail_length: usize, max_wavenumber: u32) -> Self {
        Self::build(u0, max_tail_length, max_wavenumber, None)
    }

    /// Like [`Self::new`] but drops canonical terms with `|phi_nu| < threshold`.
    pub fn with_prune(
        u0: &GridFunction,
        max_tail_length: usize,
        max_wavenumber: u32,
        threshold: f64,
    ) -> Self {
        Self::build(u0, max_tail_length, max_wavenumber, Some(threshold))
    }

    fn build(
        u0: &GridFunction,
        max_tail_length: usize,
        max_wavenumber: u32,
        prune: Option<f64>,
    ) -> Self {
        assert!(max_wavenumber >= 1, "max_wavenumber must be >= 1");
        let mesh = u0.mesh();
        let heat = heat_coefficients(u0, max_wavenumber as usize);
        let indices: Vec<_> = canonical_indices(max_tail_length, max_wavenumber)
            .into_iter()
            .map(|(nu, m)| {
                let a = amplitude_from(&nu, &heat);
                (nu, m, a)
            })
            .filter(|(_, _, a)| prune.is_none_or(|p| a.abs() >= p))
            .collect();
        let table = TrigTable::new(max_wavenumber, mesh);
        let terms = indices
            .into_par_iter()
            .map(|(index, multiplicity, amplitude)| KoopmanTerm {
                lambda: index.eigenvalue(),
                mode: table.mode(&index, mesh),
                index,
                multiplicity,
                amplitude,
            })
            .collect();
        Self {
            config: DecompositionConfig {
                max_tail_length,
                max_wavenumber,
                n_points: mesh.n_points(),
            },
            terms,
            raw_count: raw_count(max_tail_length, max_wavenumber),
            u0: Some(u0.clone()),
        }
    }

    pub fn mesh(&self) -> Mesh {
        Mesh::new(self.config.n_points).expect("decomposition mesh was validated on construction")
    }

    pub fn canonical_count(&self) -> usize {
        self.terms.len()
    }

    pub fn region(&self) -> Option<RegionReport> {
        self.u0.as_ref().map(check_region)
    }

    /// Distinct eigenvalues present in the truncation, in decreasing order.
    pub fn distinct_eigenvalues(&self) -> Vec<f64> {
        let mut sums: Vec<u64> = self.terms.iter().map(|t| t.index.squared_sum()).collect();
        sums.sort_unstable();
        sums.dedup();
        sums.into_iter().map(|s| -PI * PI * s as f64).collect()
    }

    /// Series value at time `t` on the decomposition's own mesh.
    pub fn reconstruct(&self, t: f64) -> Result<Reconstruction> {
        if t < 0.0 {
            return Err(Error::NegativeTime(t));
        }
        let mesh = self.mesh();
        let mut acc = vec![0.0; mesh.n_points()];
        for term in &self.terms {
            let w = term.weight(t);
            for (a, m) in acc.iter_mut().zip(term.mode.values()) {
                *a += w * m;
            }
        }
        let warning = if t == 0.0 {
            match self.region() {
                Some(r) if !r.omega_b_small_member => {
                    Some(ReconstructionWarning::OutsideUniformRegion { norm_u0: r.norm_u0 })
                }
                Some(_) => None,
                None => Some(ReconstructionWarning::UnknownRegion),
            }
        } else {
            None
        };
        Ok(Reconstruction {
            u: GridFunction::from_vec_unchecked(mesh, acc),
            warning,
        })
    }

    /// Series value at time `t` with modes resampled on another mesh.
    pub fn reconstruct_on(&self, t: f64, mesh: Mesh) -> Result<GridFunction> {
        if t < 0.0 {
            return Err(Error::NegativeTime(t));
        }
        let table = TrigTable::new(self.config.max_wavenumber, mesh);
        let mut acc = vec![0.0; mesh.n_points()];
        for term in &self.terms {
            let w = term.weight(t);
            for (a, m) in acc.iter_mut().zip(table.mode(&term.index, mesh).values()) {
                *a += w * m;
            }
        }
        Ok(GridFunction::from_vec_unchecked(mesh, acc))
    }

    pub fn to_record(&self) -> DecompositionRecord {
        DecompositionRecord {
            config: self.config,
            terms: self
                .terms
                .iter()
                .map(|t| TermRecord {
                    index: t.index.clone(),
                    multiplicity: t.multiplicity,
                    lambda: t.lambda,
                    amplitude: t.amplitude,
                })
                .collect(),
        }
    }

    /// Rebuilds a decomposition from its record; modes are re-synthesized.
    pub fn from_record(record: &DecompositionRecord) -> Result<Self> {
        let mesh = Mesh::new(record.config.n_points)?;
        let max_w = record
            .terms
            .iter()
            .map(|t| t.index.max_entry())
            .max()
            .unwrap_or(1)
            .max(record.config.max_wavenumber);
        let table = TrigTable::new(max_w, mesh);
        let terms = record
            .terms
            .iter()
            .map(|t| KoopmanTerm {
                index: t.index.clone(),
                multiplicity: t.multiplicity,
                lambda: t.index.eigenvalue(),
                amplitude: t.amplitude,
                mode: table.mode(&t.index, mesh),
            })
            .collect();
        Ok(Self {
            config: record.config,
            terms,
            raw_count: raw_count(record.config.max_tail_length, record.config.max_wavenumber),
            u0: None,
        })
    }
}

/// JSON form of a decomposition: `{config, terms: [{index, multiplicity, lambda, amplitude}]}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DecompositionRecord {
    pub config: DecompositionConfig,
    pub terms: Vec<TermRecord>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TermRecord {
    pub index: MultiIndex,
    pub multiplicity: u64,
    pub lambda: f64,
    pub amplitude: f64,
}

/// `sup_x |u0 - series(t = 0)|` for a datum in the uniform-convergence region.
pub fn completeness_residual(
    u0: &GridFunction,
    max_tail_length: usize,
    max_wavenumber: u32,
) -> Result<f64> {
    let region = check_region(u0);
    if !region.omega_b_small_member {
        return Err(Error::RegionViolation {
            norm_u0: region.norm_u0,
        });
    }
    let heat = heat_coefficients(u0, max_wavenumber as usize);
    let series = series_sum(&heat, max_tail_length, max_wavenumber, 0.0, u0.mesh())?;
    Ok(series.sup_distance(u0))
}

/// Truncated series at time `t` without storing modes. Suited to truncations
/// too large for a [`Decomposition`]; terms are summed in canonical order.
pub fn series_sum(
    heat: &CosineSeries,
    max_tail_length: usize,
    max_wavenumber: u32,
    t: f64,
    mesh: Mesh,
) -> Result<GridFunction> {
    const CHUNK: usize = 256;
    if t < 0.0 {
        return Err(Error::NegativeTime(t));
    }
    let table = TrigTable::new(max_wavenumber, mesh);
    let indices = canonical_indices(max_tail_length, max_wavenumber);
    let partials: Vec<Vec<f64>> = indices
        .par_chunks(CHUNK)
        .map(|chunk| {
            let mut acc = vec![0.0; mesh.n_points()];
            for (nu, m) in chunk {
                let w = *m as f64 * (nu.eigenvalue() * t).exp() * amplitude_from(nu, heat);
                if w == 0.0 {
                    continue;
                }
                for (a, v) in acc.iter_mut().zip(table.mode(nu, mesh).values()) {
                    *a += w * v;
                }
            }
            acc
        })
        .collect();
    let mut total = vec![0.0; mesh.n_points()];
    for p in partials {
        for (a, v) in total.iter_mut().zip(p) {
            *a += v;
        }
    }
    Ok(GridFunction::from_vec_unchecked(mesh, total))
}

/// How `u(t)` is produced when checking the eigenfunctional law.
#[derive(Debug, Clone, Copy)]
pub enum EvolutionPath {
    /// Exact heat propagation of the projected heat state, then the exact Cole map.
    ExactHeat,
    /// The finite difference Burgers solver.
    FiniteDifference(SolverConfig),
}

/// `|phi_nu(u(t)) - exp(lambda_nu t) phi_nu(u0)|`.
pub fn eigenfunctional_evolution_check(
    nu: &MultiIndex,
    u0: &GridFunction,
    t: f64,
    path: EvolutionPath,
) -> Result<f64> {
    if t < 0.0 {
        return Err(Error::NegativeTime(t));
    }
    let modes = DEFAULT_MODES.max(nu.max_entry() as usize);
    let heat0 = heat_coefficients(u0, modes);
    let ut = match path {
        EvolutionPath::ExactHeat => heat0.burgers_at(t, u0.mesh())?,
        EvolutionPath::FiniteDifference(cfg) => {
            oracle::solve(u0, &cfg, &[t])?.pop().expect("one output requested")
        }
    };
    let heat_t = heat_coefficients(&ut, modes);
    let lhs = amplitude_from(nu, &heat_t);
    let rhs = (nu.eigenvalue() * t).exp() * amplitude_from(nu, &heat0);
    Ok((lhs - rhs).abs())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::heatflow::CosineSeries;

    fn mesh() -> Mesh {
        Mesh::new(1024).unwrap()
    }

    fn nu(e: &[u32]) -> MultiIndex {
        MultiIndex::from_entries(e).unwrap()
    }

    fn c1_heat() -> CosineSeries {
        CosineSeries::from_cosine_amplitudes(&[0.5, 0.25]).unwrap()
    }

    fn c1_u0() -> GridFunction {
        c1_heat().cole_exact(mesh()).unwrap()
    }

    #[test]
    fn mode_examples() {
        let m = Mesh::new(1025).unwrap();
        let a = mode(&nu(&[1]), m);
        assert!((a.values()[512] - 8.885766).abs() < 1e-6);
        let a = mode(&nu(&[1, 1]), m);
        assert!((a.values()[256] + 2.0 * PI).abs() < 1e-12);
        for e in [&[1][..], &[2, 1, 1], &[3, 2], &[2, 2, 2, 1]] {
            let a = mode(&nu(e), m);
            assert_eq!(a.first(), 0.0);
            assert_eq!(a.last().abs(), 0.0);
        }
    }

    #[test]
    fn mode_matches_direct_formula() {
        let m = Mesh::new(257).unwrap();
        let n = nu(&[2, 3, 1]);
        let direct = GridFunction::from_fn(m, |x| {
            2f64.powf(2.5) * 2.0 * PI * (2.0 * PI * x).sin() * (PI * x).cos() * (3.0 * PI * x).cos()
        });
        assert!(mode(&n, m).sup_distance(&direct) < 1e-12);
    }

    #[test]
    fn tail_permutations_give_identical_terms() {
        let m = mesh();
        let u0 = c1_u0();
        let a = nu(&[2, 1, 2, 1]);
        // from_entries canonicalises, so evaluate the raw orderings directly
        let direct = |entries: &[u32]| {
            GridFunction::from_fn(m, |x| {
                let alpha = entries.len() - 1;
                let mut v = (-1f64).powi(alpha as i32)
                    * 2f64.powf((alpha as f64 + 3.0) / 2.0)
                    * entries[0] as f64
                    * PI
                    * sin_pi(entries[0] as f64 * x);
                for &k in &entries[1..] {
                    v *= cos_pi(k as f64 * x);
                }
                v
            })
        };
        let x1 = direct(&[2, 1, 2, 1]);
        let x2 = direct(&[2, 2, 1, 1]);
        assert!(x1.sup_distance(&x2) < 1e-13);
        assert!(mode(&a, m).sup_distance(&x1) < 1e-12);
        let heat = heat_coefficients(&u0, 4);
        let p1: f64 = [2u32, 1, 2, 1].iter().map(|&n| heat.coeff(n as usize)).product();
        let p2: f64 = [2u32, 2, 1, 1].iter().map(|&n| heat.coeff(n as usize)).product();
        assert!((p1 - p2).abs() <= 1e-15 * p2.abs());
        assert!((amplitude_from(&a, &heat) - p2).abs() <= 1e-15 * p2.abs());
    }

    #[test]
    fn amplitude_examples() {
        let zero = GridFunction::zeros(mesh());
        for e in [&[1][..], &[2, 1], &[1, 1, 1]] {
            assert!(amplitude(&nu(e), &zero).abs() < 1e-15);
        }
        let u0 = c1_u0();
        assert!((amplitude(&nu(&[1]), &u0) - 2f64.powf(-1.5)).abs() < 1e-4);
        assert!((amplitude(&nu(&[1, 2]), &u0) - 0.0625).abs() < 1e-4);
    }

    #[test]
    fn zero_datum_reconstructs_to_zero() {
        let dec = Decomposition::new(&GridFunction::zeros(mesh()), 3, 2);
        for t in [0.0, 0.01, 0.2] {
            let r = dec.reconstruct(t).unwrap();
            assert!(r.u.sup_norm() < 1e-14);
            assert!(r.warning.is_none());
        }
    }

    #[test]
    fn c1_reconstruction_at_t006() {
        let dec = Decomposition::new(&c1_u0(), 5, 2);
        assert_eq!(dec.raw_count, 126);
        assert_eq!(dec.canonical_count(), 42);
        let exact = c1_heat().burgers_at(0.06, mesh()).unwrap();
        let r = dec.reconstruct(0.06).unwrap();
        assert!(r.warning.is_none());
        assert!(r.u.sup_distance(&exact) < 1e-2);
    }

    #[test]
    fn c1_series_fails_at_t0_with_warning() {
        let u0 = c1_u0();
        let dec = Decomposition::new(&u0, 5, 2);
        let r = dec.reconstruct(0.0).unwrap();
        assert!(matches!(
            r.warning,
            Some(ReconstructionWarning::OutsideUniformRegion { .. })
        ));
        let err = r.u.sub(&u0);
        assert!(err.sup_norm() > 0.1);
        let worst = err
            .values()
            .iter()
            .enumerate()
            .max_by(|a, b| a.1.abs().total_cmp(&b.1.abs()))
            .unwrap()
            .0;
        assert!(mesh().x(worst) < 0.25, "largest error should sit near x = 0");
    }

    #[test]
    fn reconstruct_rejects_negative_time() {
        let dec = Decomposition::new(&c1_u0(), 1, 2);
        assert!(matches!(dec.reconstruct(-1e-3), Err(Error::NegativeTime(_))));
    }

    #[test]
    fn reconstruct_on_other_mesh_agrees() {
        let dec = Decomposition::new(&c1_u0(), 3, 2);
        let on_self = dec.reconstruct(0.05).unwrap().u;
        let same = dec.reconstruct_on(0.05, mesh()).unwrap();
        assert!(on_self.sup_distance(&same) < 1e-14);
        let coarse = dec.reconstruct_on(0.05, Mesh::new(1020).unwrap()).unwrap();
        assert_eq!(coarse.values().len(), 1020);
        assert!(coarse.first() == 0.0 && coarse.last().abs() < 1e-15);
    }

    #[test]
    fn record_round_trip_preserves_series() {
        let dec = Decomposition::new(&c1_u0(), 3, 2);
        let json = serde_json::to_string(&dec.to_record()).unwrap();
        let back = Decomposition::from_record(&serde_json::from_str(&json).unwrap()).unwrap();
        assert_eq!(back.canonical_count(), dec.canonical_count());
        let a = dec.reconstruct(0.03).unwrap().u;
        let b = back.reconstruct(0.03).unwrap();
        assert!(a.sup_distance(&b.u) < 1e-15);
        assert!(matches!(
            back.reconstruct(0.0).unwrap().warning,
            Some(ReconstructionWarning::UnknownRegion)
        ));
    }

    #[test]
    fn prune_drops_small_amplitudes() {
        let u0 = c1_u0();
        let all = Decomposition::new(&u0, 3, 4);
        let pruned = Decomposition::with_prune(&u0, 3, 4, 1e-6);
        assert!(pruned.canonical_count() < all.canonical_count());
        assert!(pruned.terms.iter().all(|t| t.amplitude.abs() >= 1e-6));
        let a = all.reconstruct(0.05).unwrap().u;
        let b = pruned.reconstruct(0.05).unwrap().u;
        assert!(a.sup_distance(&b) < 1e-4);
    }

    #[test]
    fn streaming_sum_matches_decomposition() {
        let u0 = c1_u0();
        let dec = Decomposition::new(&u0, 4, 3);
        let heat = heat_coefficients(&u0, 3);
        let a = dec.reconstruct(0.04).unwrap().u;
        let b = series_sum(&heat, 4, 3, 0.04, mesh()).unwrap();
        assert!(a.sup_distance(&b) < 1e-12);
    }

    #[test]
    fn completeness_examples() {
        let m = mesh();
        assert!(completeness_residual(&GridFunction::zeros(m), 2, 2).unwrap() < 1e-14);
        let big = c1_u0();
        assert!(matches!(
            completeness_residual(&big, 2, 2),
            Err(Error::RegionViolation { .. })
        ));
    }

    #[test]
    fn eigenfunctional_examples() {
        let m = mesh();
        let zero = GridFunction::zeros(m);
        let r = eigenfunctional_evolution_check(&nu(&[1]), &zero, 0.1, EvolutionPath::ExactHeat).unwrap();
        assert!(r < 1e-15);
        let u0 = c1_u0();
        for e in [&[1][..], &[1, 2]] {
            let r = eigenfunctional_evolution_check(&nu(e), &u0, 0.1, EvolutionPath::ExactHeat).unwrap();
            assert!(r < 1e-6, "{e:?}: {r}");
        }
    }

    #[test]
    fn distinct_eigenvalues_of_paper_truncation() {
        let dec = Decomposition::new(&c1_u0(), 5, 2);
        let l = dec.distinct_eigenvalues();
        assert_eq!(l.len(), 21);
        assert_eq!(l[0], -PI * PI);
        assert_eq!(*l.last().unwrap(), -24.0 * PI * PI);
    }
}
