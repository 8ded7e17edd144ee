//! Experiment driver: channel models, parameter sweeps, critical-time search,
//! Bloch-ellipsoid meshes, flat-file output and the command line.

mod cli;
mod critical;
mod io;

use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

pub use cli::run_cli;
pub use critical::{
    default_bracket, find_classical_crossing, find_esd_time, find_fidelity_minimum,
    find_shrink_minimum, Axis, CriticalKind, CriticalOutcome, CriticalTimeResult,
};
pub use io::{emit_csv, emit_json, fmt_num, parse_csv, parse_json, write_mesh_csv, SweepDocument};

use crate::dynamics::{
    default_step, evolve_analytic, integrate, integrate_path, ChannelParams, EnvironmentSpec,
    XStateElements,
};
use crate::error::{Error, Result};
use crate::metrics::{concurrence_signed_auto, purity};
use crate::qcore::DensityMatrix;
use crate::teleport::{bloch_coefficients, bell_overlaps, TeleportReport};

/// Which propagator produces the channel state.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Engine {
    #[default]
    Analytic,
    Integrator,
    /// Integrator state, with the gap to the analytic state recorded.
    Both,
}

impl FromStr for Engine {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "analytic" => Ok(Engine::Analytic),
            "integrator" => Ok(Engine::Integrator),
            "both" => Ok(Engine::Both),
            _ => Err(Error::InvalidArgument(format!("unknown engine '{s}'"))),
        }
    }
}

/// Column groups a sweep can emit.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Quantity {
    F,
    C,
    P,
    #[serde(rename = "chi")]
    Chi,
    #[serde(rename = "shrink")]
    Shrink,
    #[serde(rename = "blochcoeff")]
    BlochCoeff,
}

impl Quantity {
    pub const ALL: [Quantity; 6] = [
        Quantity::F,
        Quantity::C,
        Quantity::P,
        Quantity::Chi,
        Quantity::Shrink,
        Quantity::BlochCoeff,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Quantity::F => "F",
            Quantity::C => "C",
            Quantity::P => "P",
            Quantity::Chi => "chi",
            Quantity::Shrink => "shrink",
            Quantity::BlochCoeff => "blochcoeff",
        }
    }
}

impl fmt::Display for Quantity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Quantity {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        Quantity::ALL
            .into_iter()
            .find(|q| q.name().eq_ignore_ascii_case(s))
            .ok_or_else(|| Error::InvalidArgument(format!("unknown quantity '{s}'")))
    }
}

/// A Bell-state resource evolving in a given environment.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ChannelModel {
    pub initial_bell: usize,
    pub env: EnvironmentSpec,
    pub params: ChannelParams,
    pub engine: Engine,
    /// RK4 step; `None` selects [`default_step`].
    pub step: Option<f64>,
}

/// A channel state and, for [`Engine::Both`], its distance to the analytic one.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EvolvedState {
    pub rho: DensityMatrix,
    pub engine_disagreement: f64,
}

impl ChannelModel {
    pub fn new(
        initial_bell: usize,
        env: EnvironmentSpec,
        params: ChannelParams,
        engine: Engine,
        step: Option<f64>,
    ) -> Result<Self> {
        if initial_bell > 3 {
            return Err(Error::InvalidArgument(format!("Bell index {initial_bell} not in 0..=3")));
        }
        if let Some(h) = step {
            if !(h.is_finite() && h > 0.0) {
                return Err(Error::InvalidArgument(format!("step = {h} must be finite and > 0")));
            }
        }
        Ok(Self { initial_bell, env, params, engine, step })
    }

    pub fn analytic(initial_bell: usize, env: EnvironmentSpec, params: ChannelParams) -> Result<Self> {
        Self::new(initial_bell, env, params, Engine::Analytic, None)
    }

    pub fn with_delta(self, delta: f64) -> Self {
        Self { params: self.params.with_delta(delta), ..self }
    }

    pub fn with_engine(self, engine: Engine) -> Self {
        Self { engine, ..self }
    }

    pub fn initial_state(&self) -> DensityMatrix {
        DensityMatrix::bell(self.initial_bell).expect("index validated")
    }

    pub fn step(&self) -> f64 {
        self.step.unwrap_or_else(|| default_step(&self.params, &self.env))
    }

    fn analytic_from(&self, rho0: &DensityMatrix, dt: f64) -> Result<DensityMatrix> {
        let x0 = XStateElements::from_density(rho0)?;
        evolve_analytic(&x0, &self.params, &self.env, dt).to_density()
    }

    /// States at non-decreasing `times`. The integrator marches once over
    /// the whole grid.
    pub fn states_at(&self, times: &[f64]) -> Result<Vec<EvolvedState>> {
        if let Some(bad) = times.iter().find(|t| !(t.is_finite() && **t >= 0.0)) {
            return Err(Error::InvalidArgument(format!("time {bad} must be finite and >= 0")));
        }
        let rho0 = self.initial_state();
        let analytic = || -> Result<Vec<DensityMatrix>> {
            times.iter().map(|&t| self.analytic_from(&rho0, t)).collect()
        };
        match self.engine {
            Engine::Analytic => Ok(analytic()?
                .into_iter()
                .map(|rho| EvolvedState { rho, engine_disagreement: 0.0 })
                .collect()),
            Engine::Integrator => Ok(integrate_path(&rho0, &self.params, &self.env, times, self.step())?
                .into_iter()
                .map(|rho| EvolvedState { rho, engine_disagreement: 0.0 })
                .collect()),
            Engine::Both => {
                let numeric = integrate_path(&rho0, &self.params, &self.env, times, self.step())?;
                Ok(numeric
                    .into_iter()
                    .zip(analytic()?)
                    .map(|(rho, exact)| EvolvedState {
                        engine_disagreement: rho.mat().max_abs_diff(exact.mat()),
                        rho,
                    })
                    .collect())
            }
        }
    }

    pub fn state_at(&self, t: f64) -> Result<EvolvedState> {
        Ok(self.states_at(&[t])?.remove(0))
    }

    /// State at `t` given the state `rho0` at an earlier time `t0`. The
    /// analytic engine ignores the anchor and evaluates at `t` directly.
    pub fn state_from(&self, t0: f64, rho0: &DensityMatrix, t: f64) -> Result<DensityMatrix> {
        match self.engine {
            Engine::Analytic => self.analytic_from(&self.initial_state(), t),
            Engine::Integrator | Engine::Both => {
                integrate(rho0, &self.params, &self.env, t - t0, self.step())
            }
        }
    }
}

/// A full sweep: one Bell start, one environment, a `t` grid and optionally
/// a `Δ` grid replacing `params.delta`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepSpec {
    pub initial_bell: usize,
    pub env: EnvironmentSpec,
    pub params: ChannelParams,
    pub t_grid: Vec<f64>,
    pub delta_grid: Option<Vec<f64>>,
    pub engine: Engine,
    pub quantities: Vec<Quantity>,
    /// Pauli branch for shrink factors and Bloch coefficients; `None` uses
    /// the optimal branch at each point.
    pub m: Option<usize>,
    pub step: Option<f64>,
}

fn check_grid(name: &str, grid: &[f64]) -> Result<()> {
    if grid.is_empty() {
        return Err(Error::InvalidArgument(format!("{name} grid is empty")));
    }
    if grid.iter().any(|v| !v.is_finite()) {
        return Err(Error::InvalidArgument(format!("{name} grid has non-finite values")));
    }
    if grid.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::InvalidArgument(format!("{name} grid is not strictly increasing")));
    }
    Ok(())
}

impl SweepSpec {
    /// A spec with every quantity selected and the analytic engine.
    pub fn new(initial_bell: usize, env: EnvironmentSpec, params: ChannelParams, t_grid: Vec<f64>) -> Self {
        Self {
            initial_bell,
            env,
            params,
            t_grid,
            delta_grid: None,
            engine: Engine::Analytic,
            quantities: Quantity::ALL.to_vec(),
            m: None,
            step: None,
        }
    }

    pub fn validate(&self) -> Result<()> {
        check_grid("t", &self.t_grid)?;
        if self.t_grid[0] < 0.0 {
            return Err(Error::InvalidArgument("t grid has negative times".into()));
        }
        if let Some(d) = &self.delta_grid {
            check_grid("delta", d)?;
        }
        if self.quantities.is_empty() {
            return Err(Error::InvalidArgument("no quantities selected".into()));
        }
        if let Some(m) = self.m {
            if m > 3 {
                return Err(Error::InvalidArgument(format!("Pauli branch {m} not in 0..=3")));
            }
        }
        self.model().map(|_| ())
    }

    pub fn model(&self) -> Result<ChannelModel> {
        ChannelModel::new(self.initial_bell, self.env, self.params, self.engine, self.step)
    }

    pub fn deltas(&self) -> Vec<f64> {
        self.delta_grid.clone().unwrap_or_else(|| vec![self.params.delta])
    }
}

/// One grid point of a sweep.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SweepRecord {
    pub delta: f64,
    pub t: f64,
    /// Maximal average fidelity.
    #[serde(rename = "F")]
    pub f: f64,
    #[serde(rename = "C")]
    pub c: f64,
    #[serde(rename = "P")]
    pub p: f64,
    pub chi: [f64; 4],
    pub m_star: usize,
    pub delta_x: f64,
    pub delta_y: f64,
    pub delta_z: f64,
    /// Signed Bloch coefficients whose magnitudes are the shrink factors.
    pub bloch_x: f64,
    pub bloch_y: f64,
    pub bloch_z: f64,
    pub engine_disagreement: f64,
}

impl SweepRecord {
    pub fn from_state(delta: f64, t: f64, state: &EvolvedState, m: Option<usize>) -> Result<Self> {
        let report = TeleportReport::new(&state.rho, m)?;
        let [bx, by, bz] = report.bloch_coeffs;
        Ok(Self {
            delta,
            t,
            f: report.max_avg_fidelity.clamp(0.0, 1.0),
            c: concurrence_signed_auto(&state.rho)?.clamp(0.0, 1.0),
            p: purity(&state.rho),
            chi: report.chi.chi,
            m_star: report.m_star,
            delta_x: bx.abs(),
            delta_y: by.abs(),
            delta_z: bz.abs(),
            bloch_x: bx,
            bloch_y: by,
            bloch_z: bz,
            engine_disagreement: state.engine_disagreement,
        })
    }
}

fn sweep_row(spec: &SweepSpec, model: &ChannelModel, delta: f64) -> Result<Vec<SweepRecord>> {
    let at = |t: f64, e: Error| Error::AtGridPoint { delta, t, source: Box::new(e) };
    let states = model.with_delta(delta).states_at(&spec.t_grid).map_err(|e| {
        let t = match e {
            Error::IntegrationDiverged { t, .. } => t,
            _ => spec.t_grid[0],
        };
        at(t, e)
    })?;
    spec.t_grid
        .iter()
        .zip(&states)
        .map(|(&t, s)| SweepRecord::from_state(delta, t, s, spec.m).map_err(|e| at(t, e)))
        .collect()
}

/// Evaluates every `(Δ, t)` grid point, Δ-major. Rows run in parallel; the
/// output order is always the grid order.
pub fn sweep(spec: &SweepSpec) -> Result<Vec<SweepRecord>> {
    spec.validate()?;
    let model = spec.model()?;
    let rows: Vec<Vec<SweepRecord>> = spec
        .deltas()
        .into_par_iter()
        .map(|delta| sweep_row(spec, &model, delta))
        .collect::<Result<_>>()?;
    Ok(rows.into_iter().flatten().collect())
}

/// One vertex of a distorted Bloch sphere.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MeshPoint {
    pub theta: f64,
    pub phi: f64,
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

/// Image of the Bloch sphere under the teleportation channel at time `t`,
/// on the grid `θᵢ = πi/(n_θ−1)`, `φⱼ = 2πj/n_φ`, row-major in θ. The Pauli
/// branch defaults to the optimal one.
pub fn bloch_mesh(
    model: &ChannelModel,
    t: f64,
    m: Option<usize>,
    n_theta: usize,
    n_phi: usize,
) -> Result<Vec<MeshPoint>> {
    if n_theta < 2 || n_phi < 3 {
        return Err(Error::InvalidArgument(format!(
            "mesh {n_theta}x{n_phi} below the 2x3 minimum"
        )));
    }
    let rho = model.state_at(t)?.rho;
    let chi = bell_overlaps(&rho);
    let m = match m {
        Some(m) => m,
        None => TeleportReport::from_overlaps(chi, None)?.m_star,
    };
    let [cx, cy, cz] = bloch_coefficients(&chi, m)?;
    let mut mesh = Vec::with_capacity(n_theta * n_phi);
    for i in 0..n_theta {
        let theta = std::f64::consts::PI * i as f64 / (n_theta - 1) as f64;
        let (st, ct) = theta.sin_cos();
        for j in 0..n_phi {
            let phi = std::f64::consts::TAU * j as f64 / n_phi as f64;
            let (sp, cp) = phi.sin_cos();
            mesh.push(MeshPoint { theta, phi, x: cx * st * cp, y: cy * st * sp, z: cz * ct });
        }
    }
    Ok(mesh)
}
