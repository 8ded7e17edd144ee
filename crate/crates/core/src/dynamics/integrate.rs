use num_complex::Complex64;

use super::{lindblad_rhs_mat, ChannelParams, EnvironmentSpec};
use crate::error::{Error, Result};
use crate::qcore::{DensityMatrix, Mat4, STATE_TOL};

type Vec16 = [Complex64; 16];

/// Default RK4 step: `1e-3 / max(1, |J| + |Δ|, γ)`.
pub fn default_step(p: &ChannelParams, env: &EnvironmentSpec) -> f64 {
    1e-3 / 1f64.max(p.j.abs() + p.delta.abs()).max(env.gamma)
}

/// The Lindblad generator as a sparse linear map on the 16 entries of ρ
/// (row-major). Built by applying [`lindblad_rhs_mat`] to each matrix unit,
/// so it is the same map, only cheaper to evaluate.
#[derive(Debug, Clone)]
pub struct Generator {
    terms: Vec<(usize, usize, Complex64)>,
}

impl Generator {
    pub fn new(p: &ChannelParams, env: &EnvironmentSpec) -> Self {
        let mut terms = Vec::new();
        for col in 0..16 {
            let mut unit = Mat4::zeros();
            unit[(col / 4, col % 4)] = Complex64::new(1.0, 0.0);
            let image = lindblad_rhs_mat(&unit, p, env);
            for (row, z) in image.iter().enumerate() {
                if *z != Complex64::new(0.0, 0.0) {
                    terms.push((row, col, *z));
                }
            }
        }
        Self { terms }
    }

    pub fn nnz(&self) -> usize {
        self.terms.len()
    }

    fn apply(&self, y: &Vec16) -> Vec16 {
        let mut out = [Complex64::new(0.0, 0.0); 16];
        for &(row, col, z) in &self.terms {
            out[row] += z * y[col];
        }
        out
    }

    pub fn apply_mat(&self, m: &Mat4) -> Mat4 {
        from_vec(&self.apply(&to_vec(m)))
    }

    /// One classical RK4 step of size `h`.
    fn rk4_step(&self, y: &Vec16, h: f64) -> Vec16 {
        let axpy = |a: &Vec16, s: f64, b: &Vec16| {
            let mut out = *a;
            for (o, x) in out.iter_mut().zip(b) {
                *o += x * s;
            }
            out
        };
        let k1 = self.apply(y);
        let k2 = self.apply(&axpy(y, 0.5 * h, &k1));
        let k3 = self.apply(&axpy(y, 0.5 * h, &k2));
        let k4 = self.apply(&axpy(y, h, &k3));
        let mut out = *y;
        for i in 0..16 {
            out[i] += (k1[i] + (k2[i] + k3[i]) * 2.0 + k4[i]) * (h / 6.0);
        }
        out
    }

    /// Advances `y` by `duration` using `ceil(duration / step)` equal steps.
    fn advance(&self, y: &mut Vec16, duration: f64, step: f64) {
        if duration <= 0.0 {
            return;
        }
        let n = (duration / step).ceil().max(1.0) as u64;
        let h = duration / n as f64;
        for _ in 0..n {
            *y = self.rk4_step(y, h);
        }
    }
}

fn to_vec(m: &Mat4) -> Vec16 {
    let mut v = [Complex64::new(0.0, 0.0); 16];
    for (dst, src) in v.iter_mut().zip(m.iter()) {
        *dst = *src;
    }
    v
}

fn from_vec(v: &Vec16) -> Mat4 {
    let mut m = Mat4::zeros();
    for (k, z) in v.iter().enumerate() {
        m[(k / 4, k % 4)] = *z;
    }
    m
}

fn check_step(step: f64) -> Result<()> {
    if !(step.is_finite() && step > 0.0) {
        return Err(Error::InvalidArgument(format!("step = {step} must be finite and > 0")));
    }
    Ok(())
}

fn validated(m: Mat4, t: f64) -> Result<DensityMatrix> {
    let v = DensityMatrix::violation(&m).unwrap_or(f64::INFINITY);
    if v > STATE_TOL {
        return Err(Error::IntegrationDiverged { t, max_violation: v });
    }
    DensityMatrix::new(m)
}

/// Integrates the master equation from `rho0` at time 0 to time `t` with
/// classical fixed-step RK4. The step actually used is
/// `t / ceil(t / step)`.
pub fn integrate(
    rho0: &DensityMatrix,
    p: &ChannelParams,
    env: &EnvironmentSpec,
    t: f64,
    step: f64,
) -> Result<DensityMatrix> {
    Ok(integrate_path(rho0, p, env, &[t], step)?.remove(0))
}

/// States at each of the non-decreasing `times`, marching once through the
/// whole interval. Every returned state is validated.
pub fn integrate_path(
    rho0: &DensityMatrix,
    p: &ChannelParams,
    env: &EnvironmentSpec,
    times: &[f64],
    step: f64,
) -> Result<Vec<DensityMatrix>> {
    check_step(step)?;
    if let Some(bad) = times.iter().find(|t| !(t.is_finite() && **t >= 0.0)) {
        return Err(Error::InvalidArgument(format!("time {bad} must be finite and >= 0")));
    }
    if times.windows(2).any(|w| w[1] < w[0]) {
        return Err(Error::InvalidArgument("times must be non-decreasing".into()));
    }
    let gen = Generator::new(p, env);
    let mut y = to_vec(rho0.mat());
    let mut now = 0.0;
    let mut out = Vec::with_capacity(times.len());
    for &t in times {
        if t == 0.0 {
            out.push(*rho0);
            continue;
        }
        gen.advance(&mut y, t - now, step);
        now = t;
        out.push(validated(from_vec(&y), t)?);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dynamics::{lindblad_rhs, EnvKind};

    fn setup(kind: EnvKind, gamma: f64, j: f64, d: f64) -> (ChannelParams, EnvironmentSpec) {
        (
            ChannelParams::new(j, d).unwrap(),
            EnvironmentSpec::new(kind, gamma).unwrap(),
        )
    }

    #[test]
    fn generator_matches_rhs() {
        let (p, env) = setup(EnvKind::Noisy, 0.3, 0.8, -0.2);
        let gen = Generator::new(&p, &env);
        for i in 0..4 {
            let rho = DensityMatrix::bell(i).unwrap();
            let a = gen.apply_mat(rho.mat());
            let b = lindblad_rhs(&rho, &p, &env);
            assert!(a.approx_eq(&b, 1e-15));
        }
    }

    #[test]
    fn zero_time_is_identity() {
        let (p, env) = setup(EnvKind::Dissipative, 0.05, 1.0, 0.3);
        let rho0 = DensityMatrix::bell(2).unwrap();
        let out = integrate(&rho0, &p, &env, 0.0, 1e-3).unwrap();
        assert_eq!(out, rho0);
    }

    #[test]
    fn dissipative_bell0() {
        let (p, env) = setup(EnvKind::Dissipative, 0.05, 0.0, 0.0);
        let rho = integrate(&DensityMatrix::bell(0).unwrap(), &p, &env, 8.0, default_step(&p, &env)).unwrap();
        assert!((rho.elem(1, 1).re - (-0.8f64).exp() / 2.0).abs() < 1e-9);
        assert!((rho.elem(1, 4).re - (-0.4f64).exp() / 2.0).abs() < 1e-9);
        assert!((rho.elem(1, 1).re - 0.224664).abs() < 1e-6);
        assert!((rho.elem(1, 4).re - 0.335160).abs() < 1e-6);
    }

    #[test]
    fn dephasing_bell0() {
        let (p, env) = setup(EnvKind::Dephasing, 0.05, 0.0, 0.0);
        let rho = integrate(&DensityMatrix::bell(0).unwrap(), &p, &env, 16.0, default_step(&p, &env)).unwrap();
        assert!((rho.elem(1, 4).re - (-0.8f64).exp() / 2.0).abs() < 1e-9);
        assert!((rho.elem(1, 1).re - 0.5).abs() < 1e-12);
        assert!((rho.elem(4, 4).re - 0.5).abs() < 1e-12);
    }

    #[test]
    fn path_matches_direct() {
        let (p, env) = setup(EnvKind::Dissipative, 0.2, 1.0, 0.5);
        let rho0 = DensityMatrix::bell(1).unwrap();
        let step = default_step(&p, &env);
        let path = integrate_path(&rho0, &p, &env, &[0.0, 0.5, 2.0, 3.0], step).unwrap();
        let direct = integrate(&rho0, &p, &env, 3.0, step).unwrap();
        assert!(path[3].mat().approx_eq(direct.mat(), 1e-12));
        assert_eq!(path[0], rho0);
    }

    #[test]
    fn rejects_bad_arguments() {
        let (p, env) = setup(EnvKind::Noisy, 0.1, 0.0, 0.0);
        let rho0 = DensityMatrix::bell(0).unwrap();
        assert!(integrate(&rho0, &p, &env, 1.0, 0.0).is_err());
        assert!(integrate(&rho0, &p, &env, -1.0, 1e-3).is_err());
        assert!(integrate_path(&rho0, &p, &env, &[2.0, 1.0], 1e-3).is_err());
    }

    #[test]
    fn huge_step_diverges() {
        let (p, env) = setup(EnvKind::Dissipative, 50.0, 0.0, 0.0);
        let err = integrate(&DensityMatrix::bell(0).unwrap(), &p, &env, 10.0, 10.0).unwrap_err();
        assert!(matches!(err, Error::IntegrationDiverged { .. }), "{err}");
    }
}
