//! Standard teleportation of one qubit through a two-qubit resource.
//!
//! With Bell overlaps `χᵢ = ⟨ψᵢ|ρ|ψᵢ⟩`, Bob's state after Pauli branch `m` is
//! `Σ_k χ_{(k+m) mod 4} σᵏ ρ_in σᵏ`. The branch shift is ordinary addition
//! modulo 4, not Pauli-group composition; the two agree on `χ₀^{(m)} = χ_m`
//! (hence on every fidelity) but not on the Bloch coefficients.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::qcore::{bell_vector, pauli, pure_to_density, DensityMatrix, Mat2, PureQubit};

/// Tolerance on the range and normalisation of Bell overlaps.
pub const OVERLAP_TOL: f64 = 1e-9;

fn check_branch(m: usize) -> Result<()> {
    if m > 3 {
        return Err(Error::InvalidArgument(format!("Pauli branch {m} not in 0..=3")));
    }
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BellOverlaps {
    pub chi: [f64; 4],
}

impl BellOverlaps {
    pub fn new(chi: [f64; 4]) -> Result<Self> {
        let sum: f64 = chi.iter().sum();
        let in_range = chi
            .iter()
            .all(|c| c.is_finite() && (-OVERLAP_TOL..=1.0 + OVERLAP_TOL).contains(c));
        if !in_range || (sum - 1.0).abs() > OVERLAP_TOL {
            return Err(Error::InvalidState(format!("{chi:?} are not Bell overlaps")));
        }
        Ok(Self { chi })
    }

    /// `χ_k^{(m)} = χ_{(k+m) mod 4}`.
    pub fn shifted(&self, k: usize, m: usize) -> f64 {
        self.chi[(k + m) % 4]
    }
}

/// Overlaps of the resource with the four Bell states.
pub fn bell_overlaps(rho_c: &DensityMatrix) -> BellOverlaps {
    let m = rho_c.mat();
    let mut chi = [0.0; 4];
    for (i, c) in chi.iter_mut().enumerate() {
        let v = bell_vector(i).expect("valid index");
        let mut acc = num_complex::Complex64::new(0.0, 0.0);
        for r in 0..4 {
            for s in 0..4 {
                acc += v[r].conj() * m[(r, s)] * v[s];
            }
        }
        *c = acc.re;
    }
    BellOverlaps { chi }
}

/// Bob's state after the Bell measurement and Pauli correction of branch `m`.
pub fn output_state(rho_c: &DensityMatrix, input: &PureQubit, m: usize) -> Result<Mat2> {
    check_branch(m)?;
    let chi = bell_overlaps(rho_c);
    Ok(output_state_from_overlaps(&chi, &pure_to_density(input), m))
}

pub fn output_state_from_overlaps(chi: &BellOverlaps, rho_in: &Mat2, m: usize) -> Mat2 {
    (0..4).fold(Mat2::zeros(), |acc, k| {
        let s = pauli(k).expect("valid index");
        acc + s * *rho_in * s * chi.shifted(k, m)
    })
}

/// `⟨φ_in|ρ_out|φ_in⟩`, clamped to `[0, 1]`.
pub fn fidelity(input: &PureQubit, rho_out: &Mat2) -> f64 {
    let a = input.amplitudes();
    let mut acc = num_complex::Complex64::new(0.0, 0.0);
    for r in 0..2 {
        for s in 0..2 {
            acc += a[r].conj() * rho_out[(r, s)] * a[s];
        }
    }
    acc.re.clamp(0.0, 1.0)
}

/// Per-input fidelity as an explicit function of the input angles.
pub fn fidelity_closed_form(chi: &BellOverlaps, m: usize, input: &PureQubit) -> Result<f64> {
    check_branch(m)?;
    let (st, ct) = input.theta().sin_cos();
    let (sp, cp) = input.phi().sin_cos();
    Ok(chi.shifted(0, m)
        + chi.shifted(1, m) * st * st * cp * cp
        + chi.shifted(2, m) * st * st * sp * sp
        + chi.shifted(3, m) * ct * ct)
}

/// Fidelity averaged over the Bloch sphere, `(2χ_m + 1)/3`.
pub fn average_fidelity(chi: &BellOverlaps, m: usize) -> Result<f64> {
    check_branch(m)?;
    Ok((2.0 * chi.shifted(0, m) + 1.0) / 3.0)
}

/// Fully entangled fraction `max_m χ_m` and the smallest `m` attaining it.
pub fn fully_entangled_fraction(chi: &BellOverlaps) -> (f64, usize) {
    let mut best = (chi.chi[0], 0);
    for (m, &c) in chi.chi.iter().enumerate().skip(1) {
        if c > best.0 {
            best = (c, m);
        }
    }
    best
}

/// Signed scaling of the x, y and z Bloch components under branch `m`.
pub fn bloch_coefficients(chi: &BellOverlaps, m: usize) -> Result<[f64; 3]> {
    check_branch(m)?;
    let c = |k| chi.shifted(k, m);
    Ok([
        c(0) + c(1) - c(2) - c(3),
        c(0) - c(1) + c(2) - c(3),
        c(0) - c(1) - c(2) + c(3),
    ])
}

/// Shrink factors `(δx, δy, δz)`: absolute values of the Bloch coefficients.
pub fn shrink_factors(chi: &BellOverlaps, m: usize) -> Result<[f64; 3]> {
    Ok(bloch_coefficients(chi, m)?.map(f64::abs))
}

/// Pairwise summation in a fixed order.
fn pairwise_sum(xs: &[f64]) -> f64 {
    match xs.len() {
        0 => 0.0,
        1 => xs[0],
        n => pairwise_sum(&xs[..n / 2]) + pairwise_sum(&xs[n / 2..]),
    }
}

/// Brute-force average fidelity: midpoint rule on a uniform grid in `cos θ`
/// and `φ`, using the actual output state at every node.
pub fn average_fidelity_quadrature(
    rho_c: &DensityMatrix,
    m: usize,
    n_theta: usize,
    n_phi: usize,
) -> Result<f64> {
    check_branch(m)?;
    if n_theta < 8 || n_phi < 8 {
        return Err(Error::InvalidArgument(format!(
            "quadrature grid {n_theta}x{n_phi} below the 8x8 minimum"
        )));
    }
    let chi = bell_overlaps(rho_c);
    let rows: Vec<f64> = (0..n_theta)
        .into_par_iter()
        .map(|i| {
            let u = -1.0 + (i as f64 + 0.5) * 2.0 / n_theta as f64;
            let theta = u.clamp(-1.0, 1.0).acos();
            let vals: Vec<f64> = (0..n_phi)
                .map(|j| {
                    let phi = (j as f64 + 0.5) * std::f64::consts::TAU / n_phi as f64;
                    let q = PureQubit::new(theta, phi).expect("grid node inside the sphere");
                    let out = output_state_from_overlaps(&chi, &pure_to_density(&q), m);
                    fidelity(&q, &out)
                })
                .collect();
            pairwise_sum(&vals)
        })
        .collect();
    Ok(pairwise_sum(&rows) / (n_theta * n_phi) as f64)
}

/// Everything the protocol yields for one resource state.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TeleportReport {
    pub chi: BellOverlaps,
    /// Branch maximising the average fidelity (smallest index on ties).
    pub m_star: usize,
    /// Branch used for the Bloch coefficients: `m_star` unless overridden.
    pub m_used: usize,
    pub avg_fidelity_per_m: [f64; 4],
    pub max_avg_fidelity: f64,
    pub fef: f64,
    pub bloch_coeffs: [f64; 3],
    pub shrink: [f64; 3],
}

impl TeleportReport {
    pub fn new(rho_c: &DensityMatrix, m_override: Option<usize>) -> Result<Self> {
        Self::from_overlaps(bell_overlaps(rho_c), m_override)
    }

    pub fn from_overlaps(chi: BellOverlaps, m_override: Option<usize>) -> Result<Self> {
        let (fef, m_star) = fully_entangled_fraction(&chi);
        let m_used = m_override.unwrap_or(m_star);
        check_branch(m_used)?;
        let mut per_m = [0.0; 4];
        for (m, f) in per_m.iter_mut().enumerate() {
            *f = average_fidelity(&chi, m)?;
        }
        let bloch_coeffs = bloch_coefficients(&chi, m_used)?;
        Ok(Self {
            chi,
            m_star,
            m_used,
            avg_fidelity_per_m: per_m,
            max_avg_fidelity: (2.0 * fef + 1.0) / 3.0,
            fef,
            bloch_coeffs,
            shrink: bloch_coeffs.map(f64::abs),
        })
    }
}
