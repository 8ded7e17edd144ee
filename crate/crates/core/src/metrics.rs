//! Entanglement and mixedness of the channel state.
//!
//! Concurrence is `max{0, λ₁ − λ₂ − λ₃ − λ₄}` where the λᵢ are the square
//! roots, in decreasing order, of the eigenvalues of
//! `R = ρ (σʸ⊗σʸ) ρ* (σʸ⊗σʸ)`. The λᵢ are computed as the singular values of
//! `Bᵀ (σʸ⊗σʸ) B` for any factor `ρ = B B†`, which gives them to absolute
//! machine precision even when R is nearly singular.

use crate::dynamics::XStateElements;
use crate::error::{Error, Result};
use crate::qcore::{eigh, eigvals_general, kron, pauli, singular_values, DensityMatrix, Mat4};

/// Imaginary parts of R's eigenvalues above this are a numerical failure.
pub const SPIN_FLIP_IMAG_TOL: f64 = 1e-7;

/// Size below which a signed concurrence is indistinguishable from zero.
const ROUNDOFF_BAND: f64 = 16.0 * f64::EPSILON;

fn yy() -> Mat4 {
    let y = pauli(2).expect("valid index");
    kron(&y, &y)
}

/// Square roots of the eigenvalues of R in decreasing order.
pub fn wootters_lambdas(rho: &DensityMatrix) -> Result<[f64; 4]> {
    let eig = eigh(rho.mat())?;
    // Eigenvalues at round-off level are treated as exact zeros.
    let floor = 4.0 * f64::EPSILON;
    let mut factor = eig.vectors;
    for col in 0..4 {
        let w = eig.values[col];
        let s = if w > floor { w.sqrt() } else { 0.0 };
        for row in 0..4 {
            factor[(row, col)] *= s;
        }
    }
    let tau = factor.transpose() * yy() * factor;
    singular_values(&tau)
}

/// The argument of `max{0, ·}`: `λ₁ − λ₂ − λ₃ − λ₄`. Negative values
/// indicate a separable state.
pub fn concurrence_signed(rho: &DensityMatrix) -> Result<f64> {
    let l = wootters_lambdas(rho)?;
    Ok(snap(l[0], l[1] + l[2] + l[3]))
}

/// `a − b`, or exactly zero when the difference is at round-off level.
/// Entries of a density matrix are at most 1 and carry absolute errors of
/// a few ulps, so the band is absolute below 1.
fn snap(a: f64, b: f64) -> f64 {
    let d = a - b;
    if d.abs() <= ROUNDOFF_BAND * (a.abs() + b.abs()).max(1.0) {
        0.0
    } else {
        d
    }
}

/// Wootters concurrence, in `[0, 1]`.
pub fn concurrence(rho: &DensityMatrix) -> Result<f64> {
    Ok(concurrence_signed(rho)?.clamp(0.0, 1.0))
}

/// Concurrence computed literally from the general eigenvalues of R.
/// Slower to converge near separability; kept as an independent route.
pub fn concurrence_spin_flip_eigs(rho: &DensityMatrix) -> Result<f64> {
    let m = rho.mat();
    let r = *m * yy() * m.conj() * yy();
    let ev = eigvals_general(&r)?;
    let mut lambdas = [0.0; 4];
    for (l, z) in lambdas.iter_mut().zip(ev) {
        if z.im.abs() > SPIN_FLIP_IMAG_TOL {
            return Err(Error::NumericalFailure(format!(
                "spin-flipped operator has eigenvalue {z} with imaginary part above {SPIN_FLIP_IMAG_TOL:e}"
            )));
        }
        *l = z.re.max(0.0).sqrt();
    }
    lambdas.sort_by(|a, b| b.total_cmp(a));
    Ok((lambdas[0] - lambdas[1] - lambdas[2] - lambdas[3]).clamp(0.0, 1.0))
}

/// X-state shortcut before clamping:
/// `2·max{|ρ₁₄| − √(ρ₂₂ρ₃₃), |ρ₂₃| − √(ρ₁₁ρ₄₄)}`.
pub fn concurrence_x_signed(x: &XStateElements) -> Result<f64> {
    let pops = x.populations();
    if let Some(bad) = pops.iter().find(|p| **p < -crate::qcore::STATE_TOL) {
        return Err(Error::InvalidState(format!("negative population {bad}")));
    }
    let [p1, p2, p3, p4] = pops.map(|p| p.max(0.0));
    let a = snap(x.r14.norm(), (p2 * p3).sqrt());
    let b = snap(x.r23.norm(), (p1 * p4).sqrt());
    Ok(2.0 * a.max(b))
}

pub fn concurrence_x(x: &XStateElements) -> Result<f64> {
    Ok(concurrence_x_signed(x)?.clamp(0.0, 1.0))
}

/// Signed concurrence using the X-state formula when `rho` has X structure
/// and the general route otherwise.
pub fn concurrence_signed_auto(rho: &DensityMatrix) -> Result<f64> {
    match XStateElements::from_density(rho) {
        Ok(x) => concurrence_x_signed(&x),
        Err(_) => concurrence_signed(rho),
    }
}

/// Purity `Tr ρ²`, in `[1/4, 1]` for two qubits.
pub fn purity(rho: &DensityMatrix) -> f64 {
    // Tr ρ² = Σ |ρ_ij|² for Hermitian ρ.
    rho.mat().iter().map(|z| z.norm_sqr()).sum()
}
