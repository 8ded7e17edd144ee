//! Eigen- and singular-value routines for 4×4 complex matrices, backed by
//! nalgebra's Hermitian eigensolver, complex Schur form and SVD.

use nalgebra::{Matrix4, Schur, SymmetricEigen};
use num_complex::Complex64;

use super::matrix::Mat4;
use crate::error::{Error, Result};

fn to_na(m: &Mat4) -> Matrix4<Complex64> {
    Matrix4::from_fn(|i, j| m[(i, j)])
}

fn from_na(m: &Matrix4<Complex64>) -> Mat4 {
    let mut out = Mat4::zeros();
    for i in 0..4 {
        for j in 0..4 {
            out[(i, j)] = m[(i, j)];
        }
    }
    out
}

/// Spectral decomposition of a Hermitian matrix: eigenvalues in ascending
/// order, and the matching orthonormal eigenvectors as the columns of
/// `vectors`.
#[derive(Debug, Clone)]
pub struct HermitianEigen {
    pub values: [f64; 4],
    pub vectors: Mat4,
}

/// Eigen-decomposes the Hermitian part `(m + m†)/2` of `m`.
pub fn eigh(m: &Mat4) -> Result<HermitianEigen> {
    if !m.is_finite() {
        return Err(Error::NumericalFailure("non-finite matrix passed to eigh".into()));
    }
    let h = (*m + m.dagger()) * 0.5;
    let eig = SymmetricEigen::try_new(to_na(&h), f64::EPSILON, 1000)
        .ok_or_else(|| Error::NumericalFailure("Hermitian eigensolver did not converge".into()))?;
    let mut order = [0usize, 1, 2, 3];
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let vecs = from_na(&eig.eigenvectors);
    let mut values = [0.0; 4];
    let mut vectors = Mat4::zeros();
    for (dst, &src) in order.iter().enumerate() {
        values[dst] = eig.eigenvalues[src];
        for row in 0..4 {
            vectors[(row, dst)] = vecs[(row, src)];
        }
    }
    Ok(HermitianEigen { values, vectors })
}

/// Eigenvalues of a Hermitian matrix in ascending order.
pub fn eigvals_hermitian(m: &Mat4) -> Result<[f64; 4]> {
    eigh(m).map(|e| e.values)
}

/// Eigenvalues of a general complex matrix, from its complex Schur form.
/// Order is unspecified.
pub fn eigvals_general(m: &Mat4) -> Result<[Complex64; 4]> {
    if !m.is_finite() {
        return Err(Error::NumericalFailure("non-finite matrix passed to eigvals_general".into()));
    }
    let schur = Schur::try_new(to_na(m), f64::EPSILON, 10_000)
        .ok_or_else(|| Error::NumericalFailure("Schur iteration did not converge".into()))?;
    let ev = schur
        .eigenvalues()
        .ok_or_else(|| Error::NumericalFailure("Schur form is not triangular".into()))?;
    Ok([ev[0], ev[1], ev[2], ev[3]])
}

/// Singular values in descending order.
pub fn singular_values(m: &Mat4) -> Result<[f64; 4]> {
    if !m.is_finite() {
        return Err(Error::NumericalFailure("non-finite matrix passed to SVD".into()));
    }
    let svd = nalgebra::SVD::try_new(to_na(m), false, false, f64::EPSILON, 10_000)
        .ok_or_else(|| Error::NumericalFailure("SVD did not converge".into()))?;
    let mut s = [
        svd.singular_values[0],
        svd.singular_values[1],
        svd.singular_values[2],
        svd.singular_values[3],
    ];
    s.sort_by(|a, b| b.total_cmp(a));
    Ok(s)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qcore::{kron, pauli};

    #[test]
    fn zz_spectrum() {
        let z = pauli(3).unwrap();
        let ev = eigvals_hermitian(&kron(&z, &z)).unwrap();
        let expect = [-1.0, -1.0, 1.0, 1.0];
        for (a, b) in ev.iter().zip(expect) {
            assert!((a - b).abs() < 1e-12, "{ev:?}");
        }
    }

    #[test]
    fn eigh_reconstructs() {
        let x = pauli(1).unwrap();
        let y = pauli(2).unwrap();
        let m = kron(&x, &y) + kron(&y, &y) * 0.3 + Mat4::identity() * 0.1;
        let e = eigh(&m).unwrap();
        let mut d = Mat4::zeros();
        for i in 0..4 {
            d[(i, i)] = Complex64::new(e.values[i], 0.0);
        }
        let back = e.vectors * d * e.vectors.dagger();
        assert!(back.approx_eq(&m, 1e-12));
        assert!(e.values.windows(2).all(|w| w[0] <= w[1]));
    }

    #[test]
    fn general_eigs_of_triangular() {
        let mut m = Mat4::zeros();
        let diag = [
            Complex64::new(1.0, 1.0),
            Complex64::new(-2.0, 0.0),
            Complex64::new(0.5, -0.25),
            Complex64::new(3.0, 0.0),
        ];
        for i in 0..4 {
            m[(i, i)] = diag[i];
            for j in i + 1..4 {
                m[(i, j)] = Complex64::new(0.3, -0.7);
            }
        }
        let mut ev = eigvals_general(&m).unwrap().to_vec();
        for d in diag {
            let k = ev
                .iter()
                .position(|z| (z - d).norm() < 1e-10)
                .unwrap_or_else(|| panic!("missing {d}"));
            ev.remove(k);
        }
    }

    #[test]
    fn singular_values_of_unitary_are_one() {
        let h = kron(&pauli(1).unwrap(), &pauli(2).unwrap());
        for s in singular_values(&h).unwrap() {
            assert!((s - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn rejects_nan() {
        let mut m = Mat4::identity();
        m[(1, 2)] = Complex64::new(f64::NAN, 0.0);
        assert!(eigvals_hermitian(&m).is_err());
        assert!(eigvals_general(&m).is_err());
    }
}
