//! Channel dynamics: the anisotropic XY Hamiltonian, site-local Lindblad
//! dissipators for three reservoir types, a fixed-step RK4 integrator and
//! closed-form propagators for X states.

mod analytic;
mod integrate;

use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

pub use analytic::{evolve_analytic, AnalyticCoefficients, XStateElements};
pub use integrate::{default_step, integrate, integrate_path, Generator};

use crate::error::{Error, Result};
use crate::qcore::{kron, pauli, sigma_minus, sigma_plus, DensityMatrix, Mat2, Mat4};

/// Exchange coupling `J` and anisotropy `Δ` of the XY chain, in inverse
/// time units.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ChannelParams {
    pub j: f64,
    pub delta: f64,
}

impl ChannelParams {
    pub fn new(j: f64, delta: f64) -> Result<Self> {
        if !(j.is_finite() && delta.is_finite()) {
            return Err(Error::InvalidArgument(format!("non-finite J = {j} or Δ = {delta}")));
        }
        Ok(Self { j, delta })
    }

    pub fn with_delta(self, delta: f64) -> Self {
        Self { delta, ..self }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum EnvKind {
    /// Zero-temperature reservoir, jump operator `σ⁻` on each site.
    Dissipative,
    /// Infinite-temperature reservoir, jump operators `σ⁻` and `σ⁺`.
    Noisy,
    /// Pure dephasing, jump operator `σ⁺σ⁻`.
    Dephasing,
}

impl EnvKind {
    pub const ALL: [EnvKind; 3] = [EnvKind::Dissipative, EnvKind::Noisy, EnvKind::Dephasing];

    /// Single-site jump operators for this reservoir.
    pub fn site_operators(self) -> Vec<Mat2> {
        match self {
            EnvKind::Dissipative => vec![sigma_minus()],
            EnvKind::Noisy => vec![sigma_minus(), sigma_plus()],
            EnvKind::Dephasing => vec![sigma_plus() * sigma_minus()],
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            EnvKind::Dissipative => "dissipative",
            EnvKind::Noisy => "noisy",
            EnvKind::Dephasing => "dephasing",
        }
    }
}

impl fmt::Display for EnvKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for EnvKind {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "dissipative" => Ok(EnvKind::Dissipative),
            "noisy" => Ok(EnvKind::Noisy),
            "dephasing" => Ok(EnvKind::Dephasing),
            _ => Err(Error::InvalidArgument(format!("unknown environment '{s}'"))),
        }
    }
}

/// Reservoir type plus the coupling rate `γ ≥ 0` shared by both qubits.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EnvironmentSpec {
    pub kind: EnvKind,
    pub gamma: f64,
}

impl EnvironmentSpec {
    pub fn new(kind: EnvKind, gamma: f64) -> Result<Self> {
        if !(gamma.is_finite() && gamma >= 0.0) {
            return Err(Error::InvalidArgument(format!("gamma = {gamma} must be finite and >= 0")));
        }
        Ok(Self { kind, gamma })
    }

    /// Two-qubit jump operators: every site operator tensored with the
    /// identity on the other site, site A first.
    pub fn jump_operators(&self) -> Vec<Mat4> {
        let id = Mat2::identity();
        let site = self.kind.site_operators();
        site.iter()
            .map(|c| kron(c, &id))
            .chain(site.iter().map(|c| kron(&id, c)))
            .collect()
    }
}

/// `H = (J+Δ)/2 σˣσˣ + (J−Δ)/2 σʸσʸ`.
pub fn build_hamiltonian(p: &ChannelParams) -> Mat4 {
    let x = pauli(1).expect("valid index");
    let y = pauli(2).expect("valid index");
    kron(&x, &x) * (0.5 * (p.j + p.delta)) + kron(&y, &y) * (0.5 * (p.j - p.delta))
}

/// Right-hand side of the master equation,
/// `−i[H, ρ] + (γ/2) Σ_n (2 c_n ρ c_n† − {c_n† c_n, ρ})`, with the sum over
/// the jump operators of both sites. Accepts any 4×4 matrix so it can be
/// used as a linear map.
pub fn lindblad_rhs_mat(rho: &Mat4, p: &ChannelParams, env: &EnvironmentSpec) -> Mat4 {
    let h = build_hamiltonian(p);
    let mut out = h.commutator(rho) * Complex64::new(0.0, -1.0);
    if env.gamma == 0.0 {
        return out;
    }
    let half_gamma = 0.5 * env.gamma;
    for c in env.jump_operators() {
        let cd = c.dagger();
        let jump = c * *rho * cd * 2.0;
        let anti = (cd * c).anticommutator(rho);
        out = out + (jump - anti) * half_gamma;
    }
    out
}

pub fn lindblad_rhs(rho: &DensityMatrix, p: &ChannelParams, env: &EnvironmentSpec) -> Mat4 {
    lindblad_rhs_mat(rho.mat(), p, env)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn r(x: f64) -> Complex64 {
        Complex64::new(x, 0.0)
    }

    /// Brute-force expansion of the Hamiltonian from its defining sum of
    /// Kronecker products, entry by entry.
    fn hamiltonian_by_expansion(j: f64, d: f64) -> Mat4 {
        let x = pauli(1).unwrap();
        let y = pauli(2).unwrap();
        let mut h = Mat4::zeros();
        for a in 0..2 {
            for b in 0..2 {
                for c in 0..2 {
                    for e in 0..2 {
                        h[(2 * a + c, 2 * b + e)] = x[(a, b)] * x[(c, e)] * (0.5 * (j + d))
                            + y[(a, b)] * y[(c, e)] * (0.5 * (j - d));
                    }
                }
            }
        }
        h
    }

    #[test]
    fn hamiltonian_examples() {
        let h = build_hamiltonian(&ChannelParams::new(1.0, 0.0).unwrap());
        let mut want = Mat4::zeros();
        want[(1, 2)] = r(1.0);
        want[(2, 1)] = r(1.0);
        assert!(h.approx_eq(&want, 1e-15));

        assert_eq!(build_hamiltonian(&ChannelParams::new(0.0, 0.0).unwrap()).max_abs(), 0.0);

        let h = build_hamiltonian(&ChannelParams::new(0.0, 1.0).unwrap());
        let mut want = Mat4::zeros();
        want[(0, 3)] = r(1.0);
        want[(3, 0)] = r(1.0);
        assert!(h.approx_eq(&want, 1e-15));
    }

    #[test]
    fn hamiltonian_matches_expansion() {
        for (j, d) in [(0.3, -0.7), (1.0, 0.5), (-2.0, 0.1)] {
            let h = build_hamiltonian(&ChannelParams::new(j, d).unwrap());
            assert!(h.approx_eq(&hamiltonian_by_expansion(j, d), 1e-15));
            assert_eq!(h.hermiticity_defect(), 0.0);
            assert!((h[(0, 3)] - r(d)).norm() < 1e-15);
            assert!((h[(1, 2)] - r(j)).norm() < 1e-15);
        }
    }

    #[test]
    fn rhs_fixed_points() {
        let mixed = DensityMatrix::maximally_mixed();
        let p = ChannelParams::new(0.7, -0.3).unwrap();
        let env = EnvironmentSpec::new(EnvKind::Dephasing, 0.2).unwrap();
        assert!(lindblad_rhs(&mixed, &p, &env).max_abs() < 1e-16);

        let mut ground = Mat4::zeros();
        ground[(3, 3)] = r(1.0);
        let ground = DensityMatrix::new(ground).unwrap();
        let env = EnvironmentSpec::new(EnvKind::Dissipative, 0.05).unwrap();
        let p0 = ChannelParams::new(0.0, 0.0).unwrap();
        assert!(lindblad_rhs(&ground, &p0, &env).max_abs() < 1e-16);
    }

    #[test]
    fn rhs_bell_decay_rate() {
        let env = EnvironmentSpec::new(EnvKind::Dissipative, 0.05).unwrap();
        let p = ChannelParams::new(0.0, 0.0).unwrap();
        let d = lindblad_rhs(&DensityMatrix::bell(0).unwrap(), &p, &env);
        assert!((d[(0, 0)] - r(-0.05)).norm() < 1e-15);
    }

    #[test]
    fn rhs_traceless_hermitian() {
        let p = ChannelParams::new(0.9, 0.4).unwrap();
        for kind in EnvKind::ALL {
            let env = EnvironmentSpec::new(kind, 0.3).unwrap();
            for i in 0..4 {
                let d = lindblad_rhs(&DensityMatrix::bell(i).unwrap(), &p, &env);
                assert!(d.trace().norm() < 1e-15);
                assert!(d.hermiticity_defect() < 1e-15);
            }
        }
    }

    #[test]
    fn env_parsing_and_validation() {
        assert_eq!("Noisy".parse::<EnvKind>().unwrap(), EnvKind::Noisy);
        assert!("thermal".parse::<EnvKind>().is_err());
        assert!(EnvironmentSpec::new(EnvKind::Noisy, -0.1).is_err());
        assert!(ChannelParams::new(f64::NAN, 0.0).is_err());
        assert_eq!(EnvironmentSpec::new(EnvKind::Noisy, 0.1).unwrap().jump_operators().len(), 4);
    }
}
