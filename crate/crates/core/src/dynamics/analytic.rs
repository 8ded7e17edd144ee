//! Closed-form evolution of X states (nonzero entries only on the diagonal
//! and anti-diagonal) under the three reservoirs.
//!
//! Notation follows the usual shorthand `ϱ_ij = ρ_ij(0)` and
//! `ϱ_{ij±kl} = ρ_ij(0) ± ρ_kl(0)`. Exponentially growing factors in the
//! coefficient `a` are folded into the decaying prefactor before evaluation,
//! so long times do not overflow.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::{ChannelParams, EnvKind, EnvironmentSpec};
use crate::error::{Error, Result};
use crate::qcore::{DensityMatrix, Mat4};

const I: Complex64 = Complex64::new(0.0, 1.0);

fn re(x: f64) -> Complex64 {
    Complex64::new(x, 0.0)
}

/// The eight entries of an X state that may be nonzero.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct XStateElements {
    pub r11: Complex64,
    pub r22: Complex64,
    pub r33: Complex64,
    pub r44: Complex64,
    pub r14: Complex64,
    pub r41: Complex64,
    pub r23: Complex64,
    pub r32: Complex64,
}

/// Largest off-X entry tolerated when reading a matrix as an X state.
pub const X_STRUCTURE_TOL: f64 = 1e-12;

impl XStateElements {
    /// Reads the X entries of `m`; fails if any other entry exceeds
    /// [`X_STRUCTURE_TOL`].
    pub fn from_mat(m: &Mat4) -> Result<Self> {
        let off = Self::off_x_magnitude(m);
        if off > X_STRUCTURE_TOL {
            return Err(Error::InvalidState(format!(
                "matrix is not an X state (off-X entry of size {off:e})"
            )));
        }
        Ok(Self {
            r11: m[(0, 0)],
            r22: m[(1, 1)],
            r33: m[(2, 2)],
            r44: m[(3, 3)],
            r14: m[(0, 3)],
            r41: m[(3, 0)],
            r23: m[(1, 2)],
            r32: m[(2, 1)],
        })
    }

    pub fn from_density(rho: &DensityMatrix) -> Result<Self> {
        Self::from_mat(rho.mat())
    }

    /// Largest modulus among entries outside the diagonal and anti-diagonal.
    pub fn off_x_magnitude(m: &Mat4) -> f64 {
        let mut off: f64 = 0.0;
        for i in 0..4 {
            for j in 0..4 {
                if i != j && i + j != 3 {
                    off = off.max(m[(i, j)].norm());
                }
            }
        }
        off
    }

    pub fn to_mat(&self) -> Mat4 {
        let mut m = Mat4::zeros();
        m[(0, 0)] = self.r11;
        m[(1, 1)] = self.r22;
        m[(2, 2)] = self.r33;
        m[(3, 3)] = self.r44;
        m[(0, 3)] = self.r14;
        m[(3, 0)] = self.r41;
        m[(1, 2)] = self.r23;
        m[(2, 1)] = self.r32;
        m
    }

    pub fn to_density(&self) -> Result<DensityMatrix> {
        DensityMatrix::new(self.to_mat())
    }

    /// Diagonal entries as reals, in order ρ₁₁, ρ₂₂, ρ₃₃, ρ₄₄.
    pub fn populations(&self) -> [f64; 4] {
        [self.r11.re, self.r22.re, self.r33.re, self.r44.re]
    }
}

/// Coefficients of the closed-form solution at one time.
///
/// `rho11` is `a·e^{−2γt}` (dissipative) or `a·e^{−4γt}` (noisy), which is
/// the evolved ρ₁₁ itself; `a` alone grows exponentially and is never formed.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum AnalyticCoefficients {
    Dissipative {
        c1: f64,
        c2: f64,
        b1: Complex64,
        b2: Complex64,
        rho11: Complex64,
    },
    Noisy {
        b1: Complex64,
        b2: Complex64,
        rho11: Complex64,
    },
    /// Also used for any reservoir when `γ = 0`, where the motion is unitary.
    Dephasing {
        kappa: Complex64,
        nu: Complex64,
        d: [Complex64; 4],
        e: [Complex64; 4],
    },
}

impl AnalyticCoefficients {
    pub fn new(x0: &XStateElements, p: &ChannelParams, env: &EnvironmentSpec, t: f64) -> Self {
        let g = env.gamma;
        let kind = if g == 0.0 { EnvKind::Dephasing } else { env.kind };
        let (s2d, c2d) = (2.0 * p.delta * t).sin_cos();
        match kind {
            EnvKind::Dissipative => {
                let d = p.delta;
                let denom = 4.0 * d * d + g * g;
                let c1 = d / denom;
                let c2 = g * g / denom;
                let b1 = (x0.r14 - x0.r41) + I * (2.0 * g * c1);
                let b2 = (x0.r11 - x0.r44) + c2;
                let e1 = (-g * t).exp();
                let e2 = (-2.0 * g * t).exp();
                let rho11 = x0.r11 * e2
                    + ((I * (2.0 * d) * b1 - b2 * g) * s2d + (b2 * (2.0 * d) + I * g * b1) * c2d)
                        * (c1 * e1)
                    + re(d * c1) * (1.0 - e2)
                    - b2 * (2.0 * d * c1 * e2)
                    - I * g * b1 * (c1 * e2);
                AnalyticCoefficients::Dissipative { c1, c2, b1, b2, rho11 }
            }
            EnvKind::Noisy => {
                let b1 = x0.r14 - x0.r41;
                let b2 = x0.r11 - x0.r44;
                let rho11 = (I * b1 * s2d + b2 * c2d) * (0.5 * (-2.0 * g * t).exp())
                    + 0.25
                    + (2.0 * (x0.r11 + x0.r44) - 1.0) * (0.25 * (-4.0 * g * t).exp());
                AnalyticCoefficients::Noisy { b1, b2, rho11 }
            }
            EnvKind::Dephasing => {
                let kappa = Complex64::new(g * g - 16.0 * p.delta * p.delta, 0.0).sqrt() * 0.5;
                let nu = Complex64::new(g * g - 16.0 * p.j * p.j, 0.0).sqrt() * 0.5;
                let d = damped_block(kappa, p.delta, g, t);
                let e = damped_block(nu, p.j, g, t);
                AnalyticCoefficients::Dephasing { kappa, nu, d, e }
            }
        }
    }
}

/// `cosh(kt)·e^{−γt/2}` and `sinh(kt)/k·e^{−γt/2}`, finite at `k = 0`.
fn damped_hyperbolic(k: Complex64, g: f64, t: f64) -> (Complex64, Complex64) {
    let z = k * t;
    let damp = -0.5 * g * t;
    if z.norm() < 1e-3 {
        let z2 = z * z;
        let w = re(damp.exp());
        let cosh = (1.0 + z2 * (0.5 + z2 * (1.0 / 24.0 + z2 / 720.0))) * w;
        let sinhc = (1.0 + z2 * (1.0 / 6.0 + z2 * (1.0 / 120.0 + z2 / 5040.0))) * w * t;
        (cosh, sinhc)
    } else {
        let ep = (z + damp).exp();
        let em = (-z + damp).exp();
        ((ep + em) * 0.5, (ep - em) / (k * 2.0))
    }
}

/// `[d₁, d₂, d₃, d₄]` for the block driven by coupling `w` (Δ for the
/// ρ₁₁/ρ₄₄ block, J for ρ₂₂/ρ₃₃), with `k` the matching κ or ν.
fn damped_block(k: Complex64, w: f64, g: f64, t: f64) -> [Complex64; 4] {
    let (ch, sh_over_k) = damped_hyperbolic(k, g, t);
    let plus = ch + sh_over_k * (0.5 * g);
    let minus = ch - sh_over_k * (0.5 * g);
    let cross = I * (2.0 * w) * sh_over_k;
    [plus, cross, cross, minus]
}

/// Closed-form X-state evolution over time `t`.
pub fn evolve_analytic(
    x0: &XStateElements,
    p: &ChannelParams,
    env: &EnvironmentSpec,
    t: f64,
) -> XStateElements {
    match AnalyticCoefficients::new(x0, p, env, t) {
        AnalyticCoefficients::Dissipative { c1, c2, b1, b2, rho11 } => {
            decay_form(x0, p, env.gamma, t, c1, c2, b1, b2, rho11)
        }
        AnalyticCoefficients::Noisy { b1, b2, rho11 } => {
            decay_form(x0, p, 2.0 * env.gamma, t, 0.0, 0.0, b1, b2, rho11)
        }
        AnalyticCoefficients::Dephasing { d, e, .. } => {
            let decay = (-env.gamma * t).exp();
            let (s14, d14) = (x0.r11 + x0.r44, x0.r11 - x0.r44);
            let (p14, m14) = (x0.r14 + x0.r41, x0.r14 - x0.r41);
            let (s23, d23) = (x0.r22 + x0.r33, x0.r22 - x0.r33);
            let (p23, m23) = (x0.r23 + x0.r32, x0.r23 - x0.r32);
            XStateElements {
                r11: (s14 + d[0] * d14 + d[1] * m14) * 0.5,
                r44: (s14 - d[0] * d14 - d[1] * m14) * 0.5,
                r14: (p14 * decay + d[2] * d14 + d[3] * m14) * 0.5,
                r41: (p14 * decay - d[2] * d14 - d[3] * m14) * 0.5,
                r22: (s23 + e[0] * d23 + e[1] * m23) * 0.5,
                r33: (s23 - e[0] * d23 - e[1] * m23) * 0.5,
                r23: (p23 * decay + e[2] * d23 + e[3] * m23) * 0.5,
                r32: (p23 * decay - e[2] * d23 - e[3] * m23) * 0.5,
            }
        }
    }
}

/// Shared form of the dissipative and noisy solutions; `rate` is γ for the
/// dissipative reservoir and 2γ for the noisy one.
#[allow(clippy::too_many_arguments)]
fn decay_form(
    x0: &XStateElements,
    p: &ChannelParams,
    rate: f64,
    t: f64,
    c1: f64,
    c2: f64,
    b1: Complex64,
    b2: Complex64,
    rho11: Complex64,
) -> XStateElements {
    let e = (-rate * t).exp();
    let (s2d, c2d) = (2.0 * p.delta * t).sin_cos();
    let (s2j, c2j) = (2.0 * p.j * t).sin_cos();
    let rho44 = rho11 - (b2 * c2d + I * b1 * s2d) * e + c2;
    let p14 = x0.r14 + x0.r41;
    let osc14 = I * b2 * s2d + b1 * c2d;
    let shift = I * (rate * c1);
    let d23 = x0.r22 - x0.r33;
    let m23 = x0.r23 - x0.r32;
    let osc22 = (d23 * c2j + I * m23 * s2j) * e;
    let rest = re(1.0) - rho11 - rho44;
    let p23 = x0.r23 + x0.r32;
    let osc23 = I * d23 * s2j + m23 * c2j;
    XStateElements {
        r11: rho11,
        r44: rho44,
        r14: (p14 + osc14) * (0.5 * e) - shift,
        r41: (p14 - osc14) * (0.5 * e) + shift,
        r22: (rest + osc22) * 0.5,
        r33: (rest - osc22) * 0.5,
        r23: (p23 + osc23) * (0.5 * e),
        r32: (p23 - osc23) * (0.5 * e),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qcore::bell;

    fn bell_x(i: usize) -> XStateElements {
        XStateElements::from_mat(&bell(i).unwrap()).unwrap()
    }

    fn env(kind: EnvKind, g: f64) -> EnvironmentSpec {
        EnvironmentSpec::new(kind, g).unwrap()
    }

    fn close(a: Complex64, b: f64, tol: f64) -> bool {
        (a - re(b)).norm() <= tol
    }

    #[test]
    fn identity_at_time_zero() {
        let x0 = XStateElements {
            r11: re(0.4),
            r22: re(0.1),
            r33: re(0.2),
            r44: re(0.3),
            r14: Complex64::new(0.1, 0.2),
            r41: Complex64::new(0.1, -0.2),
            r23: Complex64::new(-0.05, 0.07),
            r32: Complex64::new(-0.05, -0.07),
        };
        for kind in EnvKind::ALL {
            for (j, d, g) in [(1.0, 0.3, 0.05), (0.0, 0.0, 0.2), (0.2, -0.4, 0.0), (0.0125, 0.0125, 0.05)] {
                let p = ChannelParams::new(j, d).unwrap();
                let out = evolve_analytic(&x0, &p, &env(kind, g), 0.0);
                assert!(out.to_mat().approx_eq(&x0.to_mat(), 1e-12), "{kind} {j} {d} {g}");
            }
        }
    }

    #[test]
    fn dissipative_bell1() {
        let p = ChannelParams::new(1.0, 0.0).unwrap();
        let x = evolve_analytic(&bell_x(1), &p, &env(EnvKind::Dissipative, 0.05), 8.0);
        let h = (-0.4f64).exp() / 2.0;
        for z in [x.r22, x.r33, x.r23, x.r32] {
            assert!(close(z, h, 1e-12));
            assert!(close(z, 0.335160, 1e-6));
        }
        assert!(close(x.r44, 1.0 - (-0.4f64).exp(), 1e-12));
        assert!(close(x.r44, 0.329680, 1e-6));
        assert!(close(x.r11, 0.0, 1e-15));
    }

    #[test]
    fn noisy_bell0() {
        let p = ChannelParams::new(0.0, 0.0).unwrap();
        let x = evolve_analytic(&bell_x(0), &p, &env(EnvKind::Noisy, 0.05), 5.0);
        let e1 = (-1.0f64).exp();
        assert!(close(x.r11, (1.0 + e1) / 4.0, 1e-12));
        assert!(close(x.r44, (1.0 + e1) / 4.0, 1e-12));
        assert!(close(x.r14, (-0.5f64).exp() / 2.0, 1e-12));
        assert!(close(x.r22, (1.0 - e1) / 4.0, 1e-12));
        assert!(close(x.r33, (1.0 - e1) / 4.0, 1e-12));
        assert!(close(x.r11, 0.341970, 1e-6));
        assert!(close(x.r14, 0.303265, 1e-6));
        assert!(close(x.r22, 0.158030, 1e-6));
    }

    #[test]
    fn dephasing_bell0() {
        let p = ChannelParams::new(0.7, 0.0).unwrap();
        let x = evolve_analytic(&bell_x(0), &p, &env(EnvKind::Dephasing, 0.05), 16.0);
        assert!(close(x.r11, 0.5, 1e-12));
        assert!(close(x.r44, 0.5, 1e-12));
        assert!(close(x.r14, (-0.8f64).exp() / 2.0, 1e-12));
    }

    #[test]
    fn no_overflow_at_long_times() {
        let p = ChannelParams::new(1.0, 0.3).unwrap();
        for kind in EnvKind::ALL {
            let x = evolve_analytic(&bell_x(0), &p, &env(kind, 0.05), 1.0e5);
            assert!(x.to_mat().is_finite(), "{kind}");
            assert!(x.to_density().is_ok(), "{kind}");
        }
    }

    #[test]
    fn degenerate_kappa_is_continuous() {
        let g = 0.05;
        let d = g / 4.0;
        let x0 = bell_x(0);
        let e = env(EnvKind::Dephasing, g);
        for t in [0.5, 8.0, 32.0] {
            let at = evolve_analytic(&x0, &ChannelParams::new(0.0, d).unwrap(), &e, t);
            let near = evolve_analytic(&x0, &ChannelParams::new(0.0, d * (1.0 + 1e-7)).unwrap(), &e, t);
            assert!(at.to_mat().approx_eq(&near.to_mat(), 1e-6));
        }
    }

    #[test]
    fn rejects_non_x_matrix() {
        let mut m = bell(0).unwrap();
        m[(0, 1)] = re(0.1);
        assert!(XStateElements::from_mat(&m).is_err());
    }
}
