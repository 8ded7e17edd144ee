#![allow(dead_code)]

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::Rng;

use telechan::dynamics::{ChannelParams, EnvironmentSpec, XStateElements};
use telechan::qcore::{DensityMatrix, Mat2, Mat4};

pub fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

/// `G G† / Tr(G G†)` for a matrix `G` with uniform entries: a full-rank
/// density matrix with no special structure.
pub fn random_density<R: Rng>(rng: &mut R) -> DensityMatrix {
    let mut g = Mat4::zeros();
    for i in 0..4 {
        for j in 0..4 {
            g[(i, j)] = c(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
        }
    }
    let m = g * g.dagger();
    let tr = m.trace().re;
    DensityMatrix::new(m * (1.0 / tr)).unwrap()
}

/// A random X state, with coherences inside the positivity bounds
/// `|ρ₁₄|² ≤ ρ₁₁ρ₄₄` and `|ρ₂₃|² ≤ ρ₂₂ρ₃₃`.
pub fn random_x_state<R: Rng>(rng: &mut R) -> XStateElements {
    let mut p = [0.0; 4];
    for v in &mut p {
        *v = rng.gen_range(1e-3..1.0);
    }
    let s: f64 = p.iter().sum();
    p.iter_mut().for_each(|v| *v /= s);
    let coh = |rng: &mut R, a: f64, b: f64| {
        let r = rng.gen_range(0.0..1.0) * (a * b).sqrt();
        Complex64::from_polar(r, rng.gen_range(0.0..std::f64::consts::TAU))
    };
    let r14 = coh(rng, p[0], p[3]);
    let r23 = coh(rng, p[1], p[2]);
    XStateElements {
        r11: c(p[0], 0.0),
        r22: c(p[1], 0.0),
        r33: c(p[2], 0.0),
        r44: c(p[3], 0.0),
        r14,
        r41: r14.conj(),
        r23,
        r32: r23.conj(),
    }
}

/// A random single-qubit unitary `e^{iα} Rz(β) Ry(γ) Rz(δ)`.
pub fn random_unitary<R: Rng>(rng: &mut R) -> Mat2 {
    let mut a = || rng.gen_range(0.0..std::f64::consts::TAU);
    let (alpha, beta, gamma, delta) = (a(), a(), a(), a());
    let rz = |x: f64| {
        let mut m = Mat2::zeros();
        m[(0, 0)] = Complex64::from_polar(1.0, -x / 2.0);
        m[(1, 1)] = Complex64::from_polar(1.0, x / 2.0);
        m
    };
    let (s, co) = (gamma / 2.0).sin_cos();
    let ry = Mat2::from_real([[co, -s], [s, co]]);
    rz(beta) * ry * rz(delta) * Complex64::from_polar(1.0, alpha)
}

fn to_dmatrix(m: &Mat4) -> DMatrix<Complex64> {
    DMatrix::from_fn(4, 4, |i, j| m[(i, j)])
}

/// Liouvillian acting on row-major `vec(ρ)`, assembled from
/// `vec(AρB) = (A ⊗ Bᵀ) vec(ρ)`. Independent of the crate's generator.
pub fn liouvillian(p: &ChannelParams, env: &EnvironmentSpec) -> DMatrix<Complex64> {
    let id = DMatrix::<Complex64>::identity(4, 4);
    let mut h = DMatrix::<Complex64>::zeros(4, 4);
    h[(0, 3)] = c(p.delta, 0.0);
    h[(3, 0)] = c(p.delta, 0.0);
    h[(1, 2)] = c(p.j, 0.0);
    h[(2, 1)] = c(p.j, 0.0);
    let mut l = (h.kronecker(&id) - id.kronecker(&h.transpose())) * c(0.0, -1.0);
    for jump in env.jump_operators() {
        let cm = to_dmatrix(&jump);
        let cdc = cm.adjoint() * &cm;
        let term = cm.kronecker(&cm.conjugate()) * c(2.0, 0.0)
            - cdc.kronecker(&id)
            - id.kronecker(&cdc.transpose());
        l += term * c(0.5 * env.gamma, 0.0);
    }
    l
}

/// `exp(L t) vec(ρ₀)` by Padé scaling and squaring.
pub fn propagate_exact(rho0: &Mat4, p: &ChannelParams, env: &EnvironmentSpec, t: f64) -> Mat4 {
    let prop = (liouvillian(p, env) * c(t, 0.0)).exp();
    let v = nalgebra::DVector::from_fn(16, |k, _| rho0[(k / 4, k % 4)]);
    let out = prop * v;
    let mut m = Mat4::zeros();
    for k in 0..16 {
        m[(k / 4, k % 4)] = out[k];
    }
    m
}
