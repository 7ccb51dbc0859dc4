//! Initial condition specs accepted by `--ic`.
//!
//! - `paper-c1`: `u0 = C(1 + cos(pi x)/2 + cos(2 pi x)/4)` with the analytic Cole map
//! - `cos:a1,a2,...`: `u0 = C(1 + sum_m a_m cos(m pi x))`
//! - `sin:b1,b2,...`: `u0 = sum_k b_k sin(k pi x)`
//! - `file:PATH`: CSV of samples, the last column is `u0`; a header row is optional
//! - `zero`: `u0 = 0`
//! - `linear`: the linear flow `exp(-pi^2 t) sin(pi x)`, accepted by `dmd` only

use std::f64::consts::PI;
use std::path::PathBuf;

use burgers_koopman::grid::sin_pi;
use burgers_koopman::heatflow::{heat_coefficients, DEFAULT_MODES};
use burgers_koopman::{CosineSeries, GridFunction, Mesh};

use crate::error::{CliError, CliResult};

#[derive(Debug, Clone, PartialEq)]
pub enum IcSpec {
    PaperC1,
    Cosine(Vec<f64>),
    Sine(Vec<f64>),
    File(PathBuf),
    Zero,
    Linear,
}

fn parse_list(s: &str) -> CliResult<Vec<f64>> {
    let vals = s
        .split(',')
        .map(|p| {
            p.trim()
                .parse::<f64>()
                .ok()
                .filter(|v| v.is_finite())
                .ok_or_else(|| CliError::Config(format!("bad coefficient {p:?}")))
        })
        .collect::<CliResult<Vec<_>>>()?;
    if vals.is_empty() {
        return Err(CliError::Config("empty coefficient list".into()));
    }
    Ok(vals)
}

impl std::str::FromStr for IcSpec {
    type Err = CliError;

    fn from_str(s: &str) -> CliResult<Self> {
        match s {
            "paper-c1" => return Ok(IcSpec::PaperC1),
            "zero" => return Ok(IcSpec::Zero),
            "linear" => return Ok(IcSpec::Linear),
            _ => {}
        }
        match s.split_once(':') {
            Some(("cos", rest)) => Ok(IcSpec::Cosine(parse_list(rest)?)),
            Some(("sin", rest)) => Ok(IcSpec::Sine(parse_list(rest)?)),
            Some(("file", rest)) if !rest.is_empty() => Ok(IcSpec::File(PathBuf::from(rest))),
            _ => Err(CliError::Config(format!(
                "unknown initial condition {s:?}; expected paper-c1, cos:.., sin:.., file:PATH, zero or linear"
            ))),
        }
    }
}

/// A resolved initial datum together with the heat state that generates its flow.
#[derive(Debug, Clone)]
pub struct InitialCondition {
    pub u0: GridFunction,
    /// Exact when the datum was built from a cosine series, projected otherwise.
    pub heat: CosineSeries,
}

impl InitialCondition {
    pub fn mesh(&self) -> Mesh {
        self.u0.mesh()
    }

    /// Exact Burgers state at `t` generated by the heat state.
    pub fn flow(&self, t: f64) -> burgers_koopman::Result<GridFunction> {
        self.heat.burgers_at(t, self.mesh())
    }
}

fn from_heat(heat: CosineSeries, mesh: Mesh) -> CliResult<InitialCondition> {
    let u0 = heat.cole_exact(mesh)?;
    Ok(InitialCondition { u0, heat })
}

fn from_samples(u0: GridFunction) -> InitialCondition {
    let heat = heat_coefficients(&u0, DEFAULT_MODES);
    InitialCondition { u0, heat }
}

fn read_samples(path: &PathBuf) -> CliResult<Vec<f64>> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .from_path(path)
        .map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
    let mut values = Vec::new();
    for (row, rec) in reader.records().enumerate() {
        let rec = rec.map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
        let Some(last) = rec.iter().last() else { continue };
        match last.trim().parse::<f64>() {
            Ok(v) => values.push(v),
            Err(_) if row == 0 => continue,
            Err(_) => {
                return Err(CliError::Config(format!(
                    "{}: row {} is not numeric",
                    path.display(),
                    row + 1
                )))
            }
        }
    }
    Ok(values)
}

/// Builds the datum on `mesh`; `file:` specs carry their own mesh size.
pub fn resolve(spec: &IcSpec, mesh: Mesh) -> CliResult<InitialCondition> {
    match spec {
        IcSpec::PaperC1 => from_heat(CosineSeries::from_cosine_amplitudes(&[0.5, 0.25])?, mesh),
        IcSpec::Cosine(a) => from_heat(CosineSeries::from_cosine_amplitudes(a)?, mesh),
        IcSpec::Sine(b) => Ok(from_samples(GridFunction::from_fn(mesh, |x| {
            b.iter()
                .enumerate()
                .map(|(k, c)| c * sin_pi((k + 1) as f64 * x))
                .sum()
        }))),
        IcSpec::Zero => Ok(from_samples(GridFunction::zeros(mesh))),
        IcSpec::File(path) => {
            let values = read_samples(path)?;
            let mesh = Mesh::new(values.len())?;
            let u0 = GridFunction::new(mesh, values)
                .map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
            Ok(from_samples(u0))
        }
        IcSpec::Linear => Err(CliError::Config(
            "the linear preset is only available to the dmd command".into(),
        )),
    }
}

/// `exp(-pi^2 t) sin(pi x)`.
pub fn linear_flow(t: f64, mesh: Mesh) -> GridFunction {
    let decay = (-PI * PI * t).exp();
    GridFunction::from_fn(mesh, |x| decay * sin_pi(x))
}
