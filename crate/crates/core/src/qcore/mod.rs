//! Fixed-size complex linear algebra and the single- and two-qubit objects
//! built on it.
//!
//! Basis conventions: `|0⟩ = (1, 0)ᵀ`, `|1⟩ = (0, 1)ᵀ`, and two-qubit rows and
//! columns are ordered `|00⟩, |01⟩, |10⟩, |11⟩` with the first qubit most
//! significant. `ħ = 1`.

mod linalg;
mod matrix;

use std::f64::consts::{FRAC_1_SQRT_2, PI};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

pub use linalg::{eigh, eigvals_general, eigvals_hermitian, singular_values, HermitianEigen};
pub use matrix::{dagger, kron, matmul, trace, Mat, Mat2, Mat4};

use crate::error::{Error, Result};

/// Gate applied to density matrices: Hermiticity, unit trace and
/// positivity are each checked to this absolute tolerance.
pub const STATE_TOL: f64 = 1e-9;

/// Slack allowed on the length of a Bloch vector.
pub const BLOCH_TOL: f64 = 1e-9;

const I: Complex64 = Complex64::new(0.0, 1.0);

/// Pauli operator `σ^k`: `k = 0` is the identity, then x, y, z.
pub fn pauli(k: usize) -> Result<Mat2> {
    let r = |re| Complex64::new(re, 0.0);
    Ok(match k {
        0 => Mat2::identity(),
        1 => Mat2::from_rows([[r(0.0), r(1.0)], [r(1.0), r(0.0)]]),
        2 => Mat2::from_rows([[r(0.0), -I], [I, r(0.0)]]),
        3 => Mat2::from_rows([[r(1.0), r(0.0)], [r(0.0), r(-1.0)]]),
        _ => return Err(Error::InvalidArgument(format!("Pauli index {k} not in 0..=3"))),
    })
}

/// Lowering operator `σ⁻ = (σ¹ − iσ²)/2`, which maps `|0⟩` to `|1⟩`.
pub fn sigma_minus() -> Mat2 {
    let mut m = Mat2::zeros();
    m[(1, 0)] = Complex64::new(1.0, 0.0);
    m
}

/// Raising operator `σ⁺ = (σ¹ + iσ²)/2`.
pub fn sigma_plus() -> Mat2 {
    sigma_minus().dagger()
}

/// The i-th Bell vector: `(|00⟩ ± |11⟩)/√2` for i = 0, 3 and
/// `(|01⟩ ± |10⟩)/√2` for i = 1, 2.
pub fn bell_vector(i: usize) -> Result<[Complex64; 4]> {
    let h = Complex64::new(FRAC_1_SQRT_2, 0.0);
    let z = Complex64::new(0.0, 0.0);
    Ok(match i {
        0 => [h, z, z, h],
        1 => [z, h, h, z],
        2 => [z, h, -h, z],
        3 => [h, z, z, -h],
        _ => return Err(Error::InvalidArgument(format!("Bell index {i} not in 0..=3"))),
    })
}

/// Projector onto the i-th Bell state.
pub fn bell(i: usize) -> Result<Mat4> {
    let v = bell_vector(i)?;
    let mut m = Mat4::zeros();
    for r in 0..4 {
        for c in 0..4 {
            m[(r, c)] = v[r] * v[c].conj();
        }
    }
    Ok(m)
}

/// A two-qubit density matrix: Hermitian, unit trace and positive
/// semidefinite within [`STATE_TOL`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DensityMatrix(Mat4);

impl DensityMatrix {
    pub fn new(m: Mat4) -> Result<Self> {
        let v = Self::violation(&m)?;
        if v > STATE_TOL {
            return Err(Error::InvalidState(format!(
                "not a density matrix (max violation {v:e})"
            )));
        }
        Ok(Self(m))
    }

    /// Largest of the Hermiticity defect, trace defect and negative part of
    /// the spectrum. Non-finite input is an error.
    pub fn violation(m: &Mat4) -> Result<f64> {
        if !m.is_finite() {
            return Err(Error::InvalidState("non-finite matrix entry".into()));
        }
        let herm = m.hermiticity_defect();
        let tr = (m.trace() - Complex64::new(1.0, 0.0)).norm();
        let min_eig = eigvals_hermitian(m)?[0];
        Ok(herm.max(tr).max(-min_eig))
    }

    pub fn bell(i: usize) -> Result<Self> {
        bell(i).map(Self)
    }

    pub fn maximally_mixed() -> Self {
        Self(Mat4::identity() * 0.25)
    }

    pub fn mat(&self) -> &Mat4 {
        &self.0
    }

    pub fn into_mat(self) -> Mat4 {
        self.0
    }

    /// Entry `ρ_{ij}` with 1-based indices as written in the physics
    /// literature.
    pub fn elem(&self, i: usize, j: usize) -> Complex64 {
        self.0[(i - 1, j - 1)]
    }
}

/// Pure single-qubit state `cos(θ/2)|0⟩ + e^{iφ} sin(θ/2)|1⟩`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PureQubit {
    theta: f64,
    phi: f64,
}

impl PureQubit {
    /// `theta` in `[0, π]`, `phi` in `[0, 2π)`.
    pub fn new(theta: f64, phi: f64) -> Result<Self> {
        if !(0.0..=PI).contains(&theta) {
            return Err(Error::InvalidArgument(format!("theta = {theta} outside [0, π]")));
        }
        if !(0.0..2.0 * PI).contains(&phi) {
            return Err(Error::InvalidArgument(format!("phi = {phi} outside [0, 2π)")));
        }
        Ok(Self { theta, phi })
    }

    pub fn theta(&self) -> f64 {
        self.theta
    }

    pub fn phi(&self) -> f64 {
        self.phi
    }

    pub fn amplitudes(&self) -> [Complex64; 2] {
        let (s, c) = (self.theta / 2.0).sin_cos();
        [
            Complex64::new(c, 0.0),
            Complex64::from_polar(s, self.phi),
        ]
    }

    pub fn bloch(&self) -> BlochVector {
        let (st, ct) = self.theta.sin_cos();
        let (sp, cp) = self.phi.sin_cos();
        BlochVector {
            x: st * cp,
            y: st * sp,
            z: ct,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BlochVector {
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

impl BlochVector {
    pub fn new(x: f64, y: f64, z: f64) -> Result<Self> {
        let v = Self { x, y, z };
        if !(x.is_finite() && y.is_finite() && z.is_finite()) || v.norm() > 1.0 + BLOCH_TOL {
            return Err(Error::InvalidState(format!("({x}, {y}, {z}) is not a Bloch vector")));
        }
        Ok(v)
    }

    pub fn norm(&self) -> f64 {
        (self.x * self.x + self.y * self.y + self.z * self.z).sqrt()
    }

    pub fn as_array(&self) -> [f64; 3] {
        [self.x, self.y, self.z]
    }
}

/// `|φ⟩⟨φ|` for a pure qubit.
pub fn pure_to_density(q: &PureQubit) -> Mat2 {
    let a = q.amplitudes();
    let mut m = Mat2::zeros();
    for r in 0..2 {
        for c in 0..2 {
            m[(r, c)] = a[r] * a[c].conj();
        }
    }
    m
}

/// Bloch vector of a qubit density matrix: `x = 2 Re ρ₁₂`,
/// `y = −2 Im ρ₁₂`, `z = 2ρ₁₁ − 1`.
pub fn bloch_of(rho: &Mat2) -> Result<BlochVector> {
    if !rho.is_finite() {
        return Err(Error::InvalidState("non-finite qubit density matrix".into()));
    }
    let herm = rho.hermiticity_defect();
    let tr = (rho.trace() - Complex64::new(1.0, 0.0)).norm();
    if herm > STATE_TOL || tr > STATE_TOL {
        return Err(Error::InvalidState(format!(
            "qubit matrix not Hermitian with unit trace (defects {herm:e}, {tr:e})"
        )));
    }
    let r12 = rho[(0, 1)];
    BlochVector::new(2.0 * r12.re, -2.0 * r12.im, 2.0 * rho[(0, 0)].re - 1.0)
}
