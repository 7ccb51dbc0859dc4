//! Finite difference solver for `u_t = -u u_x + u_xx`, `u(t, 0) = u(t, 1) = 0`.
//!
//! Diffusion is backward Euler (one tridiagonal solve per step), advection is
//! the explicit central difference of the flux `u^2 / 2`. A step that would
//! exceed `0.25 dx / max|u|` is halved, at most [`MAX_HALVINGS`] times.

use serde::{Deserialize, Serialize};

use crate::colehopf::{ensure_dirichlet, hopf};
use crate::error::{Error, Result};
use crate::grid::{GridFunction, Mesh};
use crate::heatflow::{project, DEFAULT_MODES};

pub const MAX_HALVINGS: u32 = 20;

/// Courant number bounding the advective step.
pub const CFL: f64 = 0.25;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SolverConfig {
    pub mesh: Mesh,
    pub dt: f64,
    pub t_end: f64,
}

impl SolverConfig {
    pub fn new(mesh: Mesh, dt: f64, t_end: f64) -> Result<Self> {
        if !(dt > 0.0 && dt.is_finite()) {
            return Err(Error::InvalidArgument(format!("time step must be positive, got {dt}")));
        }
        if !(t_end > 0.0 && t_end.is_finite()) {
            return Err(Error::InvalidArgument(format!("t_end must be positive, got {t_end}")));
        }
        Ok(Self { mesh, dt, t_end })
    }
}

/// States at each requested time. Every output time is hit exactly: the last
/// step before it is shortened.
pub fn solve(u0: &GridFunction, cfg: &SolverConfig, t_out: &[f64]) -> Result<Vec<GridFunction>> {
    if u0.mesh() != cfg.mesh {
        return Err(Error::LengthMismatch {
            expected: cfg.mesh.n_points(),
            got: u0.mesh().n_points(),
        });
    }
    ensure_dirichlet(u0)?;
    for (i, &t) in t_out.iter().enumerate() {
        if t < 0.0 {
            return Err(Error::NegativeTime(t));
        }
        if t > cfg.t_end {
            return Err(Error::InvalidArgument(format!("output time {t} beyond t_end {}", cfg.t_end)));
        }
        if i > 0 && t < t_out[i - 1] {
            return Err(Error::InvalidArgument("output times must be ascending".into()));
        }
    }

    let mut stepper = Stepper::new(cfg.mesh, u0.values());
    let mut t = 0.0;
    let mut out = Vec::with_capacity(t_out.len());
    for &target in t_out {
        while target - t > 1e-14 * target.max(1.0) {
            let step = cfg.dt.min(target - t);
            stepper.advance(step, t)?;
            t += step;
        }
        t = target;
        out.push(GridFunction::from_vec_unchecked(cfg.mesh, stepper.state()));
    }
    Ok(out)
}

/// `sup_x |H(solve(u0)(t)) - heat flow of H(u0) to t|`.
pub fn conjugacy_residual(u0: &GridFunction, t: f64, cfg: &SolverConfig) -> Result<f64> {
    let ut = solve(u0, cfg, &[t])?.pop().expect("one output requested");
    let via_burgers = hopf(&ut);
    let via_heat = project(&hopf(u0), DEFAULT_MODES).evolve(t)?.synthesize(cfg.mesh);
    Ok(via_burgers.sup_distance(&via_heat))
}

struct Stepper {
    h: f64,
    /// Interior values; the endpoints are identically zero.
    u: Vec<f64>,
    rhs: Vec<f64>,
    scratch: Vec<f64>,
}

impl Stepper {
    fn new(mesh: Mesh, values: &[f64]) -> Self {
        let u = values[1..values.len() - 1].to_vec();
        let m = u.len();
        Self {
            h: mesh.dx(),
            u,
            rhs: vec![0.0; m],
            scratch: vec![0.0; m],
        }
    }

    fn state(&self) -> Vec<f64> {
        let mut v = Vec::with_capacity(self.u.len() + 2);
        v.push(0.0);
        v.extend_from_slice(&self.u);
        v.push(0.0);
        v
    }

    fn advance(&mut self, dt: f64, t: f64) -> Result<()> {
        let umax = self.u.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        let limit = if umax > 0.0 { CFL * self.h / umax } else { f64::INFINITY };
        let mut levels = 0;
        let mut sub = dt;
        while sub > limit {
            levels += 1;
            if levels > MAX_HALVINGS {
                return Err(Error::UnstableStep { levels, t });
            }
            sub *= 0.5;
        }
        for _ in 0..1u64 << levels {
            self.step(sub);
        }
        if self.u.iter().any(|v| !v.is_finite()) {
            return Err(Error::UnstableStep { levels, t });
        }
        Ok(())
    }

    fn step(&mut self, dt: f64) {
        let m = self.u.len();
        let at = |u: &[f64], i: isize| -> f64 {
            if i < 0 || i as usize >= m {
                0.0
            } else {
                u[i as usize]
            }
        };
        let c = dt / (2.0 * self.h);
        for i in 0..m {
            let ul = at(&self.u, i as isize - 1);
            let ur = at(&self.u, i as isize + 1);
            self.rhs[i] = self.u[i] - c * 0.5 * (ur * ur - ul * ul);
        }
        // (1 + 2r) u_i - r u_{i-1} - r u_{i+1} = rhs_i
        let r = dt / (self.h * self.h);
        let (a, b) = (-r, 1.0 + 2.0 * r);
        self.scratch[0] = a / b;
        self.rhs[0] /= b;
        for i in 1..m {
            let denom = b - a * self.scratch[i - 1];
            self.scratch[i] = a / denom;
            self.rhs[i] = (self.rhs[i] - a * self.rhs[i - 1]) / denom;
        }
        self.u[m - 1] = self.rhs[m - 1];
        for i in (0..m - 1).rev() {
            self.u[i] = self.rhs[i] - self.scratch[i] * self.u[i + 1];
        }
    }
}
