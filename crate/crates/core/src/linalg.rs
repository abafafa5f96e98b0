//! Small dense complex linear-algebra helpers on top of `nalgebra`.

use nalgebra::{Complex, DMatrix, DVector};

use crate::error::{Error, Result};

pub type C64 = Complex<f64>;
pub type CMatrix = DMatrix<C64>;
pub type CVector = DVector<C64>;

/// Real Frobenius inner product `Re tr(Aᴴ B)`.
///
/// For Hermitian `A` this equals `Re tr(A B)`, the form used by every trace
/// constraint in the crate.
pub fn frob_inner(a: &CMatrix, b: &CMatrix) -> f64 {
    debug_assert_eq!(a.shape(), b.shape());
    a.as_slice()
        .iter()
        .zip(b.as_slice())
        .map(|(x, y)| x.re * y.re + x.im * y.im)
        .sum()
}

/// `Re tr(A B)` for square matrices of equal size, without forming the product.
pub fn re_trace_product(a: &CMatrix, b: &CMatrix) -> f64 {
    let n = a.nrows();
    let mut acc = 0.0;
    for i in 0..n {
        for j in 0..n {
            let x = a[(i, j)];
            let y = b[(j, i)];
            acc += x.re * y.re - x.im * y.im;
        }
    }
    acc
}

pub fn frob_norm_sq(a: &CMatrix) -> f64 {
    a.as_slice().iter().map(|z| z.norm_sqr()).sum()
}

/// Hermitian part `(H + Hᴴ)/2`.
pub fn hermitian_part(h: &CMatrix) -> CMatrix {
    (h + h.adjoint()) * C64::new(0.5, 0.0)
}

pub fn all_finite(m: &CMatrix) -> bool {
    m.iter().all(|z| z.re.is_finite() && z.im.is_finite())
}

/// Relative Hermitian defect `‖H − Hᴴ‖_F / max(1, ‖H‖_F)`.
pub fn hermitian_defect(h: &CMatrix) -> f64 {
    let d = frob_norm_sq(&(h - h.adjoint())).sqrt();
    d / frob_norm_sq(h).sqrt().max(1.0)
}

/// Eigendecomposition of a Hermitian matrix (symmetrized first).
pub struct HermitianEigen {
    pub values: DVector<f64>,
    pub vectors: CMatrix,
}

impl HermitianEigen {
    pub fn new(h: &CMatrix) -> Result<Self> {
        if h.nrows() != h.ncols() {
            return Err(Error::DimensionMismatch {
                context: "hermitian eigendecomposition",
                expected: h.nrows(),
                got: h.ncols(),
            });
        }
        if !all_finite(h) {
            return Err(Error::NonFinite("hermitian eigendecomposition"));
        }
        let eig = hermitian_part(h).symmetric_eigen();
        if eig.eigenvalues.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite("hermitian eigendecomposition"));
        }
        Ok(Self {
            values: eig.eigenvalues,
            vectors: eig.eigenvectors,
        })
    }

    /// Index of the largest eigenvalue. Eigenvalues within a relative 1e-12
    /// of the maximum count as tied; the largest solver index wins.
    pub fn principal_index(&self) -> usize {
        let max = self.values.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        let tol = 1e-12 * max.abs().max(1.0);
        self.values
            .iter()
            .rposition(|&v| v >= max - tol)
            .expect("non-empty spectrum")
    }

    pub fn principal(&self) -> (f64, CVector) {
        let k = self.principal_index();
        (self.values[k], self.vectors.column(k).into_owned())
    }

    pub fn min_value(&self) -> f64 {
        self.values.iter().cloned().fold(f64::INFINITY, f64::min)
    }

    /// Sum of absolute eigenvalues (singular values of a Hermitian matrix).
    pub fn nuclear_norm(&self) -> f64 {
        self.values.iter().map(|v| v.abs()).sum()
    }

    pub fn spectral_norm(&self) -> f64 {
        self.values.iter().map(|v| v.abs()).fold(0.0, f64::max)
    }
}

/// Eigenvalues only.
pub fn hermitian_eigenvalues(h: &CMatrix) -> Result<DVector<f64>> {
    if !all_finite(h) {
        return Err(Error::NonFinite("hermitian eigenvalues"));
    }
    Ok(hermitian_part(h).symmetric_eigenvalues())
}

/// Outer product `u vᴴ`.
pub fn outer(u: &CVector, v: &CVector) -> CMatrix {
    u * v.adjoint()
}

/// Unit-modulus vector `[e^{jω_1}, …, e^{jω_N}]ᵀ`.
pub fn phasor_vector(phases: &[f64]) -> CVector {
    CVector::from_iterator(phases.len(), phases.iter().map(|&w| C64::from_polar(1.0, w)))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn frob_inner_matches_trace_for_hermitian() {
        let a = CMatrix::from_row_slice(
            2,
            2,
            &[
                C64::new(1.0, 0.0),
                C64::new(0.5, -0.25),
                C64::new(0.5, 0.25),
                C64::new(-2.0, 0.0),
            ],
        );
        let b = CMatrix::from_row_slice(
            2,
            2,
            &[
                C64::new(0.3, 0.0),
                C64::new(-1.0, 2.0),
                C64::new(-1.0, -2.0),
                C64::new(4.0, 0.0),
            ],
        );
        let direct = (&a * &b).trace().re;
        assert!((frob_inner(&a, &b) - direct).abs() < 1e-14);
        assert!((re_trace_product(&a, &b) - direct).abs() < 1e-14);
    }

    #[test]
    fn principal_tie_break_is_largest_index() {
        let eig = HermitianEigen::new(&CMatrix::identity(3, 3)).unwrap();
        assert_eq!(eig.principal_index(), 2);
        assert!((eig.nuclear_norm() - 3.0).abs() < 1e-12);
        assert!((eig.spectral_norm() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn non_finite_rejected() {
        let mut m = CMatrix::identity(2, 2);
        m[(0, 1)] = C64::new(f64::NAN, 0.0);
        assert!(HermitianEigen::new(&m).is_err());
    }
}
