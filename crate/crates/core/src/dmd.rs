//! Snapshot matrices and SVD-based exact DMD.
//!
//! With `X1 = U Sigma V^T` (rank `r`), the reduced propagator is
//! `S = U^T X2 V Sigma^-1`, its eigenpairs `S W = W M` give the discrete
//! eigenvalues and the modes are `Phi = X2 V Sigma^-1 W`.

use std::io::{Read, Write};

use faer::linalg::solvers::SolveLstsq;
use faer::{c64, Mat};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::{GridFunction, Mesh};

/// Relative singular-value cutoff for the default rank.
pub const RANK_CUTOFF: f64 = 1e-12;

/// Snapshots of a flow: rows are interior mesh points, columns are times
/// `t0 + k dt`.
#[derive(Debug, Clone)]
pub struct SnapshotMatrix {
    pub data: Mat<f64>,
    pub dt: f64,
    pub t0: f64,
}

impl SnapshotMatrix {
    pub fn new(data: Mat<f64>, dt: f64, t0: f64) -> Result<Self> {
        if data.ncols() < 2 {
            return Err(Error::InvalidArgument("need at least two snapshots".into()));
        }
        if data.nrows() == 0 {
            return Err(Error::InvalidArgument("snapshots have no rows".into()));
        }
        if !(dt > 0.0 && dt.is_finite()) || !t0.is_finite() {
            return Err(Error::InvalidArgument(format!("bad sampling dt={dt}, t0={t0}")));
        }
        Ok(Self { data, dt, t0 })
    }

    pub fn n_snapshots(&self) -> usize {
        self.data.ncols()
    }

    pub fn time(&self, k: usize) -> f64 {
        self.t0 + k as f64 * self.dt
    }

    /// Column `k` with zero endpoints restored.
    pub fn snapshot(&self, k: usize) -> GridFunction {
        let col = self.data.col(k);
        with_endpoints(col.iter().copied())
    }

    /// CSV with a header row of sample times and one row per spatial point.
    pub fn write_csv<W: Write>(&self, writer: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(writer);
        let n = self.n_snapshots();
        w.write_record((0..n).map(|k| format!("{:.16e}", self.time(k))))?;
        for i in 0..self.data.nrows() {
            w.write_record((0..n).map(|k| format!("{:.16e}", self.data[(i, k)])))?;
        }
        w.flush()?;
        Ok(())
    }

    /// Inverse of [`Self::write_csv`]. Times must be uniformly spaced.
    pub fn read_csv<R: Read>(reader: R) -> Result<Self> {
        let mut r = csv::ReaderBuilder::new().has_headers(true).from_reader(reader);
        let parse = |s: &str| -> Result<f64> {
            s.trim()
                .parse::<f64>()
                .map_err(|e| Error::InvalidArgument(format!("bad number {s:?}: {e}")))
        };
        let times: Vec<f64> = r.headers()?.iter().map(parse).collect::<Result<_>>()?;
        if times.len() < 2 {
            return Err(Error::InvalidArgument("need at least two snapshot times".into()));
        }
        let dt = times[1] - times[0];
        for (k, &t) in times.iter().enumerate() {
            if (t - (times[0] + k as f64 * dt)).abs() > 1e-9 * dt.abs().max(1.0) {
                return Err(Error::InvalidArgument("snapshot times are not uniform".into()));
            }
        }
        let mut rows: Vec<Vec<f64>> = Vec::new();
        for rec in r.records() {
            let rec = rec?;
            let row: Vec<f64> = rec.iter().map(parse).collect::<Result<_>>()?;
            if row.len() != times.len() {
                return Err(Error::LengthMismatch {
                    expected: times.len(),
                    got: row.len(),
                });
            }
            rows.push(row);
        }
        let data = Mat::from_fn(rows.len(), times.len(), |i, k| rows[i][k]);
        Self::new(data, dt, times[0])
    }
}

fn with_endpoints(interior: impl Iterator<Item = f64>) -> GridFunction {
    let mut v = vec![0.0];
    v.extend(interior);
    v.push(0.0);
    let mesh = Mesh::new(v.len()).expect("snapshots have at least one interior row");
    GridFunction::from_vec_unchecked(mesh, v)
}

/// Column `k` holds `flow(k dt)` on the interior points of `mesh`.
pub fn build_snapshots(
    mut flow: impl FnMut(f64) -> Result<GridFunction>,
    n_t: usize,
    dt: f64,
    mesh: Mesh,
) -> Result<SnapshotMatrix> {
    let n = mesh.n_points() - 2;
    let mut data = Mat::<f64>::zeros(n, n_t);
    for k in 0..n_t {
        let u = flow(k as f64 * dt)?;
        if u.mesh() != mesh {
            return Err(Error::LengthMismatch {
                expected: mesh.n_points(),
                got: u.mesh().n_points(),
            });
        }
        for (i, &v) in u.values()[1..=n].iter().enumerate() {
            data[(i, k)] = v;
        }
    }
    SnapshotMatrix::new(data, dt, 0.0)
}

#[derive(Debug, Clone)]
pub struct DmdResult {
    /// `mu_j`, sorted by decreasing `|b_j|`, ties by decreasing real part.
    pub eigenvalues_discrete: Vec<c64>,
    /// `log(mu_j) / dt`.
    pub eigenvalues_continuous: Vec<c64>,
    /// Columns `Phi_j`, interior rows only.
    pub modes: Mat<c64>,
    pub amplitudes: Vec<c64>,
    pub rank_used: usize,
    /// All singular values of `X1`.
    pub singular_values: Vec<f64>,
    /// Reduced propagator `S` (`rank_used x rank_used`).
    pub reduced: Mat<f64>,
    /// Eigenvectors of `S`, ordered like the eigenvalues.
    pub eigenvectors: Mat<c64>,
    pub dt: f64,
    pub t0: f64,
}

fn la_err(e: impl std::fmt::Debug) -> Error {
    Error::LinearAlgebra(format!("{e:?}"))
}

/// Exact DMD of `snapshots`. Without `rank`, keeps every singular value above
/// [`RANK_CUTOFF`] relative to the largest. An explicit `rank` may go down to
/// machine precision but not into exactly zero singular values.
pub fn exact_dmd(snapshots: &SnapshotMatrix, rank: Option<usize>) -> Result<DmdResult> {
    let x = &snapshots.data;
    let m = x.ncols();
    let x1 = x.subcols(0, m - 1);
    let x2 = x.subcols(1, m - 1);
    let svd = x1.thin_svd().map_err(la_err)?;
    let sv: Vec<f64> = svd.S().column_vector().iter().copied().collect();
    let smax = sv.first().copied().unwrap_or(0.0);
    let count_above = |rel: f64| sv.iter().filter(|&&s| s > rel * smax).count();
    let r = match rank {
        None => count_above(RANK_CUTOFF),
        Some(req) => {
            let available = count_above(f64::EPSILON);
            if req == 0 || req > available {
                return Err(Error::RankDeficient {
                    requested: req,
                    available,
                });
            }
            req
        }
    };
    if r == 0 {
        return Err(Error::RankDeficient {
            requested: 1,
            available: 0,
        });
    }

    let u = svd.U().subcols(0, r);
    let v = svd.V().subcols(0, r);
    let sigma_inv = Mat::<f64>::from_fn(r, r, |i, j| if i == j { 1.0 / sv[i] } else { 0.0 });
    let projected = x2 * v * &sigma_inv;
    let reduced = u.transpose() * &projected;

    let evd = reduced.eigen().map_err(la_err)?;
    let mu: Vec<c64> = evd.S().column_vector().iter().copied().collect();
    let w = evd.U().to_owned();

    let projected_c = Mat::<c64>::from_fn(projected.nrows(), r, |i, j| c64::new(projected[(i, j)], 0.0));
    let modes = &projected_c * &w;
    let first = Mat::<c64>::from_fn(x.nrows(), 1, |i, _| c64::new(x[(i, 0)], 0.0));
    let b = modes.col_piv_qr().solve_lstsq(&first);
    let amps: Vec<c64> = (0..r).map(|j| b[(j, 0)]).collect();

    let mut order: Vec<usize> = (0..r).collect();
    order.sort_by(|&i, &j| {
        amps[j]
            .norm()
            .total_cmp(&amps[i].norm())
            .then(mu[j].re.total_cmp(&mu[i].re))
            .then(mu[j].im.total_cmp(&mu[i].im))
    });
    let mu: Vec<c64> = order.iter().map(|&i| mu[i]).collect();
    let amplitudes: Vec<c64> = order.iter().map(|&i| amps[i]).collect();
    let modes = Mat::<c64>::from_fn(modes.nrows(), r, |i, j| modes[(i, order[j])]);
    let eigenvectors = Mat::<c64>::from_fn(r, r, |i, j| w[(i, order[j])]);
    let continuous = mu.iter().map(|z| z.ln() / snapshots.dt).collect();

    Ok(DmdResult {
        eigenvalues_discrete: mu,
        eigenvalues_continuous: continuous,
        modes,
        amplitudes,
        rank_used: r,
        singular_values: sv,
        reduced,
        eigenvectors,
        dt: snapshots.dt,
        t0: snapshots.t0,
    })
}

impl DmdResult {
    /// `max_j ||S w_j - mu_j w_j|| / ||S||_F`.
    pub fn eigenpair_residual(&self) -> f64 {
        let r = self.rank_used;
        let s_norm = self.reduced.norm_l2();
        let mut worst = 0.0f64;
        for j in 0..r {
            let mut acc = 0.0;
            for i in 0..r {
                let mut sw = c64::new(0.0, 0.0);
                for k in 0..r {
                    sw += self.eigenvectors[(k, j)] * self.reduced[(i, k)];
                }
                acc += (sw - self.eigenvalues_discrete[j] * self.eigenvectors[(i, j)]).norm_sqr();
            }
            worst = worst.max(acc.sqrt());
        }
        if s_norm > 0.0 {
            worst / s_norm
        } else {
            worst
        }
    }

    fn reconstruct_interior(&self, t: f64) -> Vec<c64> {
        let s = (t - self.t0) / self.dt;
        let weights: Vec<c64> = self
            .eigenvalues_discrete
            .iter()
            .zip(&self.amplitudes)
            .map(|(mu, b)| b * (mu.ln() * s).exp())
            .collect();
        (0..self.modes.nrows())
            .map(|i| {
                weights
                    .iter()
                    .enumerate()
                    .map(|(j, w)| self.modes[(i, j)] * w)
                    .sum()
            })
            .collect()
    }

    /// Relative Frobenius error of the reconstruction over every snapshot.
    pub fn reconstruction_error(&self, snapshots: &SnapshotMatrix) -> f64 {
        let mut num = 0.0;
        let mut den = 0.0;
        for k in 0..snapshots.n_snapshots() {
            let rec = self.reconstruct_interior(snapshots.time(k));
            for (i, z) in rec.iter().enumerate() {
                let x = snapshots.data[(i, k)];
                num += (z.re - x).powi(2);
                den += x * x;
            }
        }
        if den > 0.0 {
            (num / den).sqrt()
        } else {
            num.sqrt()
        }
    }

    /// Serializable form with complex numbers as `[re, im]`.
    pub fn to_record(&self) -> DmdRecord {
        let pair = |z: &c64| [z.re, z.im];
        DmdRecord {
            rank_used: self.rank_used,
            dt: self.dt,
            t0: self.t0,
            singular_values: self.singular_values.clone(),
            eigenvalues_discrete: self.eigenvalues_discrete.iter().map(pair).collect(),
            eigenvalues_continuous: self.eigenvalues_continuous.iter().map(pair).collect(),
            amplitudes: self.amplitudes.iter().map(pair).collect(),
            modes: (0..self.rank_used)
                .map(|j| self.modes.col(j).iter().map(pair).collect())
                .collect(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DmdRecord {
    pub rank_used: usize,
    pub dt: f64,
    pub t0: f64,
    pub singular_values: Vec<f64>,
    pub eigenvalues_discrete: Vec<[f64; 2]>,
    pub eigenvalues_continuous: Vec<[f64; 2]>,
    pub amplitudes: Vec<[f64; 2]>,
    /// One entry per mode, interior rows only.
    pub modes: Vec<Vec<[f64; 2]>>,
}

/// Real part of `sum_j Phi_j b_j mu_j^((t - t0) / dt)` with zero endpoints,
/// and the sup norm of the discarded imaginary part.
pub fn dmd_reconstruct(dmd: &DmdResult, t: f64) -> (GridFunction, f64) {
    let z = dmd.reconstruct_interior(t);
    let imag = z.iter().fold(0.0f64, |m, z| m.max(z.im.abs()));
    (with_endpoints(z.iter().map(|z| z.re)), imag)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SpectralMatch {
    pub dmd: [f64; 2],
    pub nearest_koopman: f64,
    pub relative_distance: f64,
    pub matched: bool,
}

/// Nearest Koopman eigenvalue for each continuous DMD eigenvalue. A pair
/// matches when the relative distance is below `tol_rel` and
/// `|Im| < tol_rel |Re|`.
pub fn compare_spectra(dmd: &DmdResult, koopman: &[f64], tol_rel: f64) -> Result<Vec<SpectralMatch>> {
    if koopman.is_empty() || dmd.eigenvalues_continuous.is_empty() {
        return Err(Error::InvalidArgument("spectra must be non-empty".into()));
    }
    Ok(dmd
        .eigenvalues_continuous
        .iter()
        .map(|z| {
            let (nearest, dist) = koopman
                .iter()
                .map(|&l| (l, (z - c64::new(l, 0.0)).norm()))
                .min_by(|a, b| a.1.total_cmp(&b.1))
                .expect("non-empty");
            let relative_distance = if nearest != 0.0 { dist / nearest.abs() } else { dist };
            SpectralMatch {
                dmd: [z.re, z.im],
                nearest_koopman: nearest,
                relative_distance,
                matched: relative_distance < tol_rel && z.im.abs() < tol_rel * z.re.abs(),
            }
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::sin_pi;
    use crate::heatflow::CosineSeries;
    use std::f64::consts::PI;

    fn linear_snapshots(t0: f64) -> SnapshotMatrix {
        let mesh = Mesh::new(256).unwrap();
        let mut s = build_snapshots(
            |t| Ok(GridFunction::from_fn(mesh, |x| (-PI * PI * (t + t0)).exp() * sin_pi(x))),
            21,
            0.002,
            mesh,
        )
        .unwrap();
        s.t0 = t0;
        s
    }

    fn c1_snapshots(n_t: usize) -> SnapshotMatrix {
        let mesh = Mesh::new(1024).unwrap();
        let heat = CosineSeries::from_cosine_amplitudes(&[0.5, 0.25]).unwrap();
        build_snapshots(|t| heat.burgers_at(t, mesh), n_t, 0.002, mesh).unwrap()
    }

    #[test]
    fn snapshot_shapes() {
        let mesh = Mesh::new(1024).unwrap();
        let s = c1_snapshots(101);
        assert_eq!((s.data.nrows(), s.data.ncols()), (1022, 101));
        let u0 = CosineSeries::from_cosine_amplitudes(&[0.5, 0.25])
            .unwrap()
            .cole_exact(mesh)
            .unwrap();
        assert_eq!(s.snapshot(0).values(), u0.values());
        let z = build_snapshots(|_| Ok(GridFunction::zeros(mesh)), 5, 0.1, mesh).unwrap();
        assert!(z.data.col_iter().all(|c| c.iter().all(|&v| v == 0.0)));
    }

    #[test]
    fn linear_flow_recovers_decay_rate() {
        let d = exact_dmd(&linear_snapshots(0.0), None).unwrap();
        assert_eq!(d.rank_used, 1);
        let l = d.eigenvalues_continuous[0];
        assert!((l.re + PI * PI).abs() < 1e-4);
        assert!(l.im.abs() < 1e-12);
    }

    #[test]
    fn shift_invariance() {
        let a = exact_dmd(&linear_snapshots(0.0), None).unwrap();
        let b = exact_dmd(&linear_snapshots(0.05), None).unwrap();
        assert!((a.eigenvalues_discrete[0] - b.eigenvalues_discrete[0]).norm() < 1e-12);
        let (u, _) = dmd_reconstruct(&b, 0.05);
        let (v, _) = dmd_reconstruct(&b, 0.05 + 10.0 * 0.002);
        assert!((u.values()[128] - (-PI * PI * 0.05).exp() * sin_pi(128.0 / 255.0)).abs() < 1e-10);
        assert!((v.values()[128] - (-PI * PI * 0.07).exp() * sin_pi(128.0 / 255.0)).abs() < 1e-10);
    }

    #[test]
    fn burgers_spectrum_properties() {
        let s = c1_snapshots(101);
        let d = exact_dmd(&s, Some(15)).unwrap();
        assert_eq!(d.rank_used, 15);
        assert_eq!(d.modes.ncols(), 15);
        assert_eq!(d.amplitudes.len(), 15);
        assert!(d.eigenpair_residual() <= 1e-8);
        // conjugate symmetry
        for z in &d.eigenvalues_discrete {
            if z.im.abs() > 1e-12 {
                let partner = d
                    .eigenvalues_discrete
                    .iter()
                    .map(|w| (w - z.conj()).norm())
                    .fold(f64::INFINITY, f64::min);
                assert!(partner < 1e-8 * z.norm(), "{z} has no conjugate partner");
            }
        }
        let (first, imag) = dmd_reconstruct(&d, 0.0);
        assert!(imag < 1e-8);
        let x0 = s.snapshot(0);
        assert!(first.sub(&x0).l2_norm() / x0.l2_norm() < 1e-4);
        let (u50, _) = dmd_reconstruct(&d, 50.0 * 0.002);
        let x50 = s.snapshot(50);
        assert!(u50.sub(&x50).l2_norm() / x50.l2_norm() < 1e-3);
    }

    #[test]
    fn svd_propagator_matches_pseudo_inverse() {
        // well-conditioned linear data: x_{k+1} = A x_k with a random stable A
        use faer::linalg::solvers::DenseSolveCore;
        use rand::{Rng, SeedableRng};
        let mut rng = rand::rngs::StdRng::seed_from_u64(7);
        let n = 6;
        let a = Mat::<f64>::from_fn(n, n, |i, j| {
            let d = if i == j { 0.5 } else { 0.0 };
            d + 0.1 * rng.gen_range(-1.0..1.0)
        });
        let mut x = Mat::<f64>::zeros(n, 12);
        for i in 0..n {
            x[(i, 0)] = rng.gen_range(-1.0..1.0);
        }
        for k in 1..12 {
            let next = &a * x.col(k - 1);
            for i in 0..n {
                x[(i, k)] = next[i] + 1e-3 * rng.gen_range(-1.0..1.0);
            }
        }
        let snaps = SnapshotMatrix::new(x.clone(), 0.1, 0.0).unwrap();
        let d = exact_dmd(&snaps, None).unwrap();
        assert_eq!(d.rank_used, n);
        let x1 = x.subcols(0, 11);
        let x2 = x.subcols(1, 11);
        // P = X2 X1^+ via normal equations on the transposed problem
        let gram = x1 * x1.transpose();
        let p = (x2 * x1.transpose()) * gram.partial_piv_lu().inverse();
        let resid_pinv = (x2 - &p * x1).norm_l2();
        // X1 has full row rank, so U is square and P = U S U^T
        let svd = x1.thin_svd().unwrap();
        let u = svd.U();
        let p_svd = u * &d.reduced * u.transpose();
        let resid_svd = (x2 - &p_svd * x1).norm_l2();
        assert!((resid_svd - resid_pinv).abs() <= 1e-8 * resid_pinv.max(1.0));
    }

    #[test]
    fn explicit_rank_is_bounded() {
        let s = linear_snapshots(0.0);
        assert!(matches!(exact_dmd(&s, Some(40)), Err(Error::RankDeficient { .. })));
        assert!(matches!(exact_dmd(&s, Some(0)), Err(Error::RankDeficient { .. })));
    }

    #[test]
    fn csv_round_trip() {
        let s = linear_snapshots(0.0);
        let mut buf = Vec::new();
        s.write_csv(&mut buf).unwrap();
        let back = SnapshotMatrix::read_csv(buf.as_slice()).unwrap();
        assert_eq!(back.data, s.data);
        assert!((back.dt - s.dt).abs() < 1e-15);
        assert!(SnapshotMatrix::read_csv("0.0,0.1,0.3\n1,2,3\n".as_bytes()).is_err());
    }

    #[test]
    fn compare_spectra_identity() {
        let d = exact_dmd(&linear_snapshots(0.0), None).unwrap();
        let own: Vec<f64> = d.eigenvalues_continuous.iter().map(|z| z.re).collect();
        let m = compare_spectra(&d, &own, 1e-9).unwrap();
        assert!(m.iter().all(|x| x.matched));
        let m = compare_spectra(&d, &[-PI * PI, -4.0 * PI * PI], 0.01).unwrap();
        assert_eq!(m[0].nearest_koopman, -PI * PI);
        assert!(compare_spectra(&d, &[], 0.01).is_err());
    }
}
