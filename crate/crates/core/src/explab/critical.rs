//! Critical times: the classical-limit crossing `F = 2/3`, the fidelity
//! minimum, entanglement sudden death and shrink-factor minima.
//!
//! Every search first samples the bracket densely enough to resolve the
//! Hamiltonian oscillations, then refines the first sign change by bisection
//! or the sampled minimum by golden-section search.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::{ChannelModel, Engine};
use crate::dynamics::integrate_path;
use crate::error::{Error, Result};
use crate::metrics::concurrence_signed_auto;
use crate::qcore::DensityMatrix;
use crate::teleport::{bell_overlaps, bloch_coefficients, fully_entangled_fraction};

/// Largest residual accepted at a located root.
pub const ROOT_RESIDUAL_TOL: f64 = 1e-9;
const GOLDEN_TOL: f64 = 1e-9;
const MIN_SAMPLES: usize = 2000;
const MAX_SAMPLES: usize = 200_000;
const CHUNK: usize = 4096;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum CriticalKind {
    ClassicalCrossing,
    FidelityMinimum,
    EntanglementSuddenDeath,
    ShrinkMinimum,
}

impl FromStr for CriticalKind {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "classical" => Ok(CriticalKind::ClassicalCrossing),
            "fmin" => Ok(CriticalKind::FidelityMinimum),
            "esd" => Ok(CriticalKind::EntanglementSuddenDeath),
            "shrinkmin" => Ok(CriticalKind::ShrinkMinimum),
            _ => Err(Error::InvalidArgument(format!(
                "unknown critical kind '{s}' (classical, fmin, esd, shrinkmin)"
            ))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Axis {
    X,
    Y,
    Z,
}

impl Axis {
    fn index(self) -> usize {
        self as usize
    }
}

impl fmt::Display for Axis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(["x", "y", "z"][self.index()])
    }
}

impl FromStr for Axis {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "x" => Ok(Axis::X),
            "y" => Ok(Axis::Y),
            "z" => Ok(Axis::Z),
            _ => Err(Error::InvalidArgument(format!("unknown axis '{s}'"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "status", rename_all = "kebab-case")]
pub enum CriticalOutcome {
    Found { t: f64, value: f64 },
    /// The sampled minimum sits at a bracket end: the quantity is monotone.
    EdgeMinimum { t: f64, value: f64 },
    NoneInBracket,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CriticalTimeResult {
    pub kind: CriticalKind,
    pub outcome: CriticalOutcome,
}

impl CriticalTimeResult {
    /// Time of a found root or interior minimum.
    pub fn found_time(&self) -> Option<f64> {
        match self.outcome {
            CriticalOutcome::Found { t, .. } => Some(t),
            _ => None,
        }
    }
}

/// `[0, 200/γ]`.
pub fn default_bracket(gamma: f64) -> Result<(f64, f64)> {
    if gamma <= 0.0 {
        return Err(Error::InvalidArgument(
            "gamma = 0 has no natural time scale; pass an explicit bracket".into(),
        ));
    }
    Ok((0.0, 200.0 / gamma))
}

fn resolve_bracket(model: &ChannelModel, bracket: Option<(f64, f64)>) -> Result<(f64, f64)> {
    let (lo, hi) = match bracket {
        Some(b) => b,
        None => default_bracket(model.env.gamma)?,
    };
    if !(lo.is_finite() && hi.is_finite() && lo >= 0.0 && hi > lo) {
        return Err(Error::InvalidArgument(format!("bad bracket [{lo}, {hi}]")));
    }
    Ok((lo, hi))
}

/// Sample grid fine enough for about four points per unit of the fastest
/// rate in the generator.
fn sample_grid(model: &ChannelModel, lo: f64, hi: f64) -> Vec<f64> {
    let rate = model.params.j.abs() + model.params.delta.abs() + model.env.gamma;
    let n = ((hi - lo) * 4.0 * rate).ceil() as usize;
    let n = n.clamp(MIN_SAMPLES, MAX_SAMPLES);
    (0..=n).map(|i| lo + (hi - lo) * i as f64 / n as f64).collect()
}

/// Evaluates `f` on the channel state at every grid time, holding at most
/// one chunk of states in memory.
fn scan<F>(model: &ChannelModel, grid: &[f64], f: &F) -> Result<Vec<f64>>
where
    F: Fn(&DensityMatrix) -> Result<f64>,
{
    let mut out = Vec::with_capacity(grid.len());
    if model.engine == Engine::Analytic {
        for &t in grid {
            out.push(f(&model.state_at(t)?.rho)?);
        }
        return Ok(out);
    }
    let (mut t0, mut rho0) = (0.0, model.initial_state());
    for chunk in grid.chunks(CHUNK) {
        let rel: Vec<f64> = chunk.iter().map(|t| t - t0).collect();
        let states = integrate_path(&rho0, &model.params, &model.env, &rel, model.step())?;
        for s in &states {
            out.push(f(s)?);
        }
        t0 = *chunk.last().expect("chunks are nonempty");
        rho0 = *states.last().expect("chunks are nonempty");
    }
    Ok(out)
}

/// `f` as a function of time, continued from the state at `anchor`.
fn evaluator<'a, F>(
    model: &'a ChannelModel,
    anchor: f64,
    f: &'a F,
) -> Result<impl Fn(f64) -> Result<f64> + 'a>
where
    F: Fn(&DensityMatrix) -> Result<f64>,
{
    let rho_a = model.state_at(anchor)?.rho;
    Ok(move |t: f64| f(&model.state_from(anchor, &rho_a, t)?))
}

fn bisect<G>(g: G, mut lo: f64, mut hi: f64, mut g_lo: f64) -> Result<(f64, f64)>
where
    G: Fn(f64) -> Result<f64>,
{
    let tol = 1e-10 * (hi - lo);
    let mut best = (lo, g_lo);
    for _ in 0..200 {
        if hi - lo <= tol.max(4.0 * f64::EPSILON * hi.abs()) {
            break;
        }
        let mid = 0.5 * (lo + hi);
        let v = g(mid)?;
        if v.abs() < best.1.abs() {
            best = (mid, v);
        }
        if v == 0.0 {
            break;
        }
        if (v > 0.0) == (g_lo > 0.0) {
            lo = mid;
            g_lo = v;
        } else {
            hi = mid;
        }
    }
    if best.1.abs() > ROOT_RESIDUAL_TOL {
        return Err(Error::NumericalFailure(format!(
            "bisection stalled at t = {} with residual {:e}",
            best.0, best.1
        )));
    }
    Ok(best)
}

fn golden<G>(g: G, mut a: f64, mut b: f64) -> Result<(f64, f64)>
where
    G: Fn(f64) -> Result<f64>,
{
    let r = 0.5 * (5f64.sqrt() - 1.0);
    let mut c = b - r * (b - a);
    let mut d = a + r * (b - a);
    let (mut gc, mut gd) = (g(c)?, g(d)?);
    for _ in 0..300 {
        if b - a <= GOLDEN_TOL {
            break;
        }
        if gc <= gd {
            b = d;
            d = c;
            gd = gc;
            c = b - r * (b - a);
            gc = g(c)?;
        } else {
            a = c;
            c = d;
            gc = gd;
            d = a + r * (b - a);
            gd = g(d)?;
        }
    }
    Ok(if gc <= gd { (c, gc) } else { (d, gd) })
}

/// First sign change of `f` over the bracket, refined by bisection.
fn first_root<F>(
    kind: CriticalKind,
    model: &ChannelModel,
    bracket: Option<(f64, f64)>,
    f: F,
) -> Result<CriticalTimeResult>
where
    F: Fn(&DensityMatrix) -> Result<f64>,
{
    let (lo, hi) = resolve_bracket(model, bracket)?;
    let grid = sample_grid(model, lo, hi);
    let vals = scan(model, &grid, &f)?;
    let mut last_nonzero: Option<usize> = None;
    for (k, &v) in vals.iter().enumerate() {
        if v == 0.0 {
            continue;
        }
        if let Some(j) = last_nonzero {
            if (v > 0.0) != (vals[j] > 0.0) {
                let g = evaluator(model, grid[j], &f)?;
                let (t, value) = bisect(g, grid[j], grid[k], vals[j])?;
                return Ok(CriticalTimeResult { kind, outcome: CriticalOutcome::Found { t, value } });
            }
        }
        last_nonzero = Some(k);
    }
    Ok(CriticalTimeResult { kind, outcome: CriticalOutcome::NoneInBracket })
}

/// Minimum of `f` over the bracket. A sampled minimum tied with a bracket
/// end is reported as an edge minimum.
fn minimum<F>(
    kind: CriticalKind,
    model: &ChannelModel,
    bracket: Option<(f64, f64)>,
    f: F,
) -> Result<CriticalTimeResult>
where
    F: Fn(&DensityMatrix) -> Result<f64>,
{
    const TIE: f64 = 1e-12;
    let (lo, hi) = resolve_bracket(model, bracket)?;
    let grid = sample_grid(model, lo, hi);
    let vals = scan(model, &grid, &f)?;
    let (k, vmin) = vals
        .iter()
        .copied()
        .enumerate()
        .fold((0, f64::INFINITY), |best, (i, v)| if v < best.1 { (i, v) } else { best });
    let last = vals.len() - 1;
    let edge = |i: usize| CriticalTimeResult {
        kind,
        outcome: CriticalOutcome::EdgeMinimum { t: grid[i], value: vals[i] },
    };
    if vals[last] <= vmin + TIE {
        return Ok(edge(last));
    }
    if vals[0] <= vmin + TIE {
        return Ok(edge(0));
    }
    let g = evaluator(model, grid[k - 1], &f)?;
    let (t, value) = golden(g, grid[k - 1], grid[k + 1])?;
    Ok(CriticalTimeResult { kind, outcome: CriticalOutcome::Found { t, value } })
}

fn max_fidelity(rho: &DensityMatrix) -> f64 {
    (2.0 * fully_entangled_fraction(&bell_overlaps(rho)).0 + 1.0) / 3.0
}

/// Time at which the maximal average fidelity crosses the classical limit
/// `2/3`.
pub fn find_classical_crossing(
    model: &ChannelModel,
    bracket: Option<(f64, f64)>,
) -> Result<CriticalTimeResult> {
    first_root(CriticalKind::ClassicalCrossing, model, bracket, |rho| {
        Ok(max_fidelity(rho) - 2.0 / 3.0)
    })
}

pub fn find_fidelity_minimum(
    model: &ChannelModel,
    bracket: Option<(f64, f64)>,
) -> Result<CriticalTimeResult> {
    minimum(CriticalKind::FidelityMinimum, model, bracket, |rho| Ok(max_fidelity(rho)))
}

/// Smallest root of the signed concurrence (the argument of `max{0, ·}`).
pub fn find_esd_time(model: &ChannelModel, bracket: Option<(f64, f64)>) -> Result<CriticalTimeResult> {
    first_root(CriticalKind::EntanglementSuddenDeath, model, bracket, concurrence_signed_auto)
}

/// Minimum of one shrink factor. The Pauli branch defaults to the one that
/// is optimal at `t = 0`, the index of the initial Bell state, so the
/// searched function stays continuous.
pub fn find_shrink_minimum(
    model: &ChannelModel,
    axis: Axis,
    m: Option<usize>,
    bracket: Option<(f64, f64)>,
) -> Result<CriticalTimeResult> {
    let m = m.unwrap_or(model.initial_bell);
    if m > 3 {
        return Err(Error::InvalidArgument(format!("Pauli branch {m} not in 0..=3")));
    }
    minimum(CriticalKind::ShrinkMinimum, model, bracket, |rho| {
        Ok(bloch_coefficients(&bell_overlaps(rho), m)?[axis.index()].abs())
    })
}
