use std::ops::{Add, Index, IndexMut, Mul, Neg, Sub};

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Dense square complex matrix of fixed dimension, stored row-major.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Mat<const N: usize> {
    rows: [[Complex64; N]; N],
}

pub type Mat2 = Mat<2>;
pub type Mat4 = Mat<4>;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);

impl<const N: usize> Mat<N> {
    pub const DIM: usize = N;

    pub const fn zeros() -> Self {
        Self {
            rows: [[ZERO; N]; N],
        }
    }

    pub fn identity() -> Self {
        let mut m = Self::zeros();
        for i in 0..N {
            m.rows[i][i] = ONE;
        }
        m
    }

    pub const fn from_rows(rows: [[Complex64; N]; N]) -> Self {
        Self { rows }
    }

    /// Builds a matrix from a row-major slice of exactly `N * N` entries.
    /// Non-finite entries are rejected.
    pub fn from_row_major(entries: &[Complex64]) -> Result<Self> {
        if entries.len() != N * N {
            return Err(Error::InvalidArgument(format!(
                "expected {} entries, got {}",
                N * N,
                entries.len()
            )));
        }
        let mut m = Self::zeros();
        for (k, z) in entries.iter().enumerate() {
            if !(z.re.is_finite() && z.im.is_finite()) {
                return Err(Error::InvalidArgument(format!(
                    "non-finite entry at ({}, {})",
                    k / N,
                    k % N
                )));
            }
            m.rows[k / N][k % N] = *z;
        }
        Ok(m)
    }

    pub fn from_real(rows: [[f64; N]; N]) -> Self {
        let mut m = Self::zeros();
        for (dst, src) in m.rows.iter_mut().zip(rows) {
            for (d, s) in dst.iter_mut().zip(src) {
                *d = Complex64::new(s, 0.0);
            }
        }
        m
    }

    pub fn rows(&self) -> &[[Complex64; N]; N] {
        &self.rows
    }

    pub fn iter(&self) -> impl Iterator<Item = &Complex64> {
        self.rows.iter().flatten()
    }

    pub fn is_finite(&self) -> bool {
        self.iter().all(|z| z.re.is_finite() && z.im.is_finite())
    }

    pub fn dagger(&self) -> Self {
        let mut m = Self::zeros();
        for i in 0..N {
            for j in 0..N {
                m.rows[i][j] = self.rows[j][i].conj();
            }
        }
        m
    }

    /// Entrywise complex conjugate in the computational basis.
    pub fn conj(&self) -> Self {
        self.map(|z| z.conj())
    }

    pub fn transpose(&self) -> Self {
        let mut m = Self::zeros();
        for i in 0..N {
            for j in 0..N {
                m.rows[i][j] = self.rows[j][i];
            }
        }
        m
    }

    pub fn trace(&self) -> Complex64 {
        (0..N).map(|i| self.rows[i][i]).sum()
    }

    pub fn matmul(&self, rhs: &Self) -> Self {
        let mut m = Self::zeros();
        for i in 0..N {
            for k in 0..N {
                let a = self.rows[i][k];
                if a == ZERO {
                    continue;
                }
                for j in 0..N {
                    m.rows[i][j] += a * rhs.rows[k][j];
                }
            }
        }
        m
    }

    pub fn commutator(&self, rhs: &Self) -> Self {
        self.matmul(rhs) - rhs.matmul(self)
    }

    pub fn anticommutator(&self, rhs: &Self) -> Self {
        self.matmul(rhs) + rhs.matmul(self)
    }

    pub fn scale(&self, s: Complex64) -> Self {
        self.map(|z| z * s)
    }

    pub fn map(&self, f: impl Fn(Complex64) -> Complex64) -> Self {
        let mut m = *self;
        for z in m.rows.iter_mut().flatten() {
            *z = f(*z);
        }
        m
    }

    /// Largest entrywise modulus.
    pub fn max_abs(&self) -> f64 {
        self.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    /// Largest entrywise modulus of `self - other`.
    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        (*self - *other).max_abs()
    }

    /// Equality up to an absolute entrywise tolerance.
    pub fn approx_eq(&self, other: &Self, tol: f64) -> bool {
        self.max_abs_diff(other) <= tol
    }

    /// Largest entrywise modulus of `self - self†`.
    pub fn hermiticity_defect(&self) -> f64 {
        self.max_abs_diff(&self.dagger())
    }
}

impl<const N: usize> Default for Mat<N> {
    fn default() -> Self {
        Self::zeros()
    }
}

impl<const N: usize> Index<(usize, usize)> for Mat<N> {
    type Output = Complex64;
    fn index(&self, (i, j): (usize, usize)) -> &Complex64 {
        &self.rows[i][j]
    }
}

impl<const N: usize> IndexMut<(usize, usize)> for Mat<N> {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Complex64 {
        &mut self.rows[i][j]
    }
}

impl<const N: usize> Add for Mat<N> {
    type Output = Self;
    fn add(mut self, rhs: Self) -> Self {
        for (a, b) in self.rows.iter_mut().flatten().zip(rhs.iter()) {
            *a += *b;
        }
        self
    }
}

impl<const N: usize> Sub for Mat<N> {
    type Output = Self;
    fn sub(mut self, rhs: Self) -> Self {
        for (a, b) in self.rows.iter_mut().flatten().zip(rhs.iter()) {
            *a -= *b;
        }
        self
    }
}

impl<const N: usize> Neg for Mat<N> {
    type Output = Self;
    fn neg(self) -> Self {
        self.map(|z| -z)
    }
}

impl<const N: usize> Mul for Mat<N> {
    type Output = Self;
    fn mul(self, rhs: Self) -> Self {
        self.matmul(&rhs)
    }
}

impl<const N: usize> Mul<f64> for Mat<N> {
    type Output = Self;
    fn mul(self, s: f64) -> Self {
        self.map(|z| z * s)
    }
}

impl<const N: usize> Mul<Complex64> for Mat<N> {
    type Output = Self;
    fn mul(self, s: Complex64) -> Self {
        self.scale(s)
    }
}

/// Kronecker product `a ⊗ b`; the first factor acts on the more significant
/// index, so `|ab⟩` sits at row `2a + b`.
pub fn kron(a: &Mat2, b: &Mat2) -> Mat4 {
    let mut m = Mat4::zeros();
    for i in 0..2 {
        for j in 0..2 {
            for k in 0..2 {
                for l in 0..2 {
                    m[(2 * i + k, 2 * j + l)] = a[(i, j)] * b[(k, l)];
                }
            }
        }
    }
    m
}

pub fn dagger<const N: usize>(m: &Mat<N>) -> Mat<N> {
    m.dagger()
}

pub fn matmul<const N: usize>(a: &Mat<N>, b: &Mat<N>) -> Mat<N> {
    a.matmul(b)
}

pub fn trace<const N: usize>(m: &Mat<N>) -> Complex64 {
    m.trace()
}
