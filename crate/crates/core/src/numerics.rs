//! Dense complex linear algebra shared by every other module.
//!
//! All eigen, exponential and positivity decisions live here so the physics
//! modules never touch a decomposition directly.

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use num_complex::Complex64;

use crate::error::{Error, Result};

pub type C64 = Complex64;
pub type ComplexMatrix = DMatrix<C64>;
pub type ComplexVector = DVector<C64>;

/// Tolerance under which a matrix is accepted as Hermitian.
pub const HERMITIAN_TOL: f64 = 1e-10;
/// Eigenvalues in `(-PSD_CLIP, 0)` are roundoff; anything below is a bug upstream.
pub const PSD_CLIP: f64 = 1e-9;

#[inline]
pub fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

/// Eigendecomposition of a Hermitian matrix, eigenvalues ascending.
#[derive(Clone, Debug)]
pub struct HermitianEigen {
    pub eigenvalues: Vec<f64>,
    /// Orthonormal eigenvectors stored as columns, in eigenvalue order.
    pub eigenvectors: ComplexMatrix,
}

impl HermitianEigen {
    /// Rebuilds `V f(Λ) V†` for a complex-valued spectral function.
    pub fn map_spectrum<F: Fn(f64) -> C64>(&self, f: F) -> ComplexMatrix {
        let v = &self.eigenvectors;
        let n = v.nrows();
        let mut scaled = v.clone();
        for (k, &lam) in self.eigenvalues.iter().enumerate() {
            let w = f(lam);
            for i in 0..n {
                scaled[(i, k)] *= w;
            }
        }
        scaled * v.adjoint()
    }
}

/// Largest absolute entry.
pub fn max_abs(a: &ComplexMatrix) -> f64 {
    a.iter().fold(0.0_f64, |m, z| m.max(z.norm()))
}

pub fn hermiticity_defect(a: &ComplexMatrix) -> f64 {
    max_abs(&(a - a.adjoint()))
}

pub fn is_hermitian(a: &ComplexMatrix, tol: f64) -> bool {
    a.is_square() && hermiticity_defect(a) < tol
}

/// `‖U†U − I‖_max`.
pub fn unitarity_defect(u: &ComplexMatrix) -> f64 {
    let n = u.nrows();
    max_abs(&(u.adjoint() * u - ComplexMatrix::identity(n, n)))
}

fn check_square_finite(a: &ComplexMatrix) -> Result<()> {
    if !a.is_square() {
        return Err(Error::NotSquare {
            rows: a.nrows(),
            cols: a.ncols(),
        });
    }
    if a.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
        return Err(Error::NonFinite);
    }
    Ok(())
}

pub fn hermitian_eig(a: &ComplexMatrix) -> Result<HermitianEigen> {
    check_square_finite(a)?;
    let defect = hermiticity_defect(a);
    if defect > HERMITIAN_TOL {
        return Err(Error::NotHermitian { defect });
    }
    let sym = (a + a.adjoint()).scale(0.5);
    let n = sym.nrows();
    let eig = SymmetricEigen::new(sym);

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| eig.eigenvalues[i].total_cmp(&eig.eigenvalues[j]));

    let eigenvalues = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let mut eigenvectors = ComplexMatrix::zeros(n, n);
    for (dst, &src) in order.iter().enumerate() {
        eigenvectors.set_column(dst, &eig.eigenvectors.column(src));
    }
    Ok(HermitianEigen {
        eigenvalues,
        eigenvectors,
    })
}

/// `exp(scale · A)` for Hermitian `A`, via the eigendecomposition.
pub fn hermitian_expm(a: &ComplexMatrix, scale: C64) -> Result<ComplexMatrix> {
    if !scale.re.is_finite() || !scale.im.is_finite() {
        return Err(Error::NonFinite);
    }
    let eig = hermitian_eig(a)?;
    Ok(eig.map_spectrum(|lam| (scale * lam).exp()))
}

/// Clips roundoff-level negative eigenvalues of a density matrix and
/// renormalizes the trace.
pub fn psd_project(rho: &ComplexMatrix) -> Result<ComplexMatrix> {
    let trace = rho.trace();
    if (trace.re - 1.0).abs() > 1e-8 || trace.im.abs() > 1e-8 {
        return Err(Error::BadTrace { trace: trace.re });
    }
    let eig = hermitian_eig(rho)?;
    if let Some(&worst) = eig.eigenvalues.iter().find(|&&l| l < -PSD_CLIP) {
        return Err(Error::NegativeSpectrum { eigenvalue: worst });
    }
    if eig.eigenvalues.iter().all(|&l| l >= 0.0) {
        return Ok(rho.clone());
    }
    let clipped: Vec<f64> = eig.eigenvalues.iter().map(|&l| l.max(0.0)).collect();
    let total: f64 = clipped.iter().sum();
    let v = &eig.eigenvectors;
    let mut out = ComplexMatrix::zeros(v.nrows(), v.ncols());
    for (k, &l) in clipped.iter().enumerate() {
        if l == 0.0 {
            continue;
        }
        let col = v.column(k);
        out += (col * col.adjoint()).scale(l / total);
    }
    Ok(out)
}

/// Eigenvalues of a Hermitian matrix, ascending.
pub fn hermitian_eigenvalues(a: &ComplexMatrix) -> Result<Vec<f64>> {
    Ok(hermitian_eig(a)?.eigenvalues)
}

/// `−Σ λ log₂ λ` over a spectrum, with `0 log 0 = 0`.
pub fn shannon_bits<I: IntoIterator<Item = f64>>(probs: I) -> f64 {
    probs
        .into_iter()
        .filter(|&p| p > 0.0)
        .map(|p| -p * p.log2())
        .sum()
}

/// Kronecker product.
pub fn kron(a: &ComplexMatrix, b: &ComplexMatrix) -> ComplexMatrix {
    a.kronecker(b)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn diag(vals: &[f64]) -> ComplexMatrix {
        ComplexMatrix::from_diagonal(&DVector::from_iterator(
            vals.len(),
            vals.iter().map(|&v| c(v, 0.0)),
        ))
    }

    fn sigma_z() -> ComplexMatrix {
        diag(&[1.0, -1.0])
    }

    #[test]
    fn eig_identity_and_pauli() {
        let e = hermitian_eig(&ComplexMatrix::identity(2, 2)).unwrap();
        assert_eq!(e.eigenvalues, vec![1.0, 1.0]);
        let e = hermitian_eig(&sigma_z()).unwrap();
        assert!((e.eigenvalues[0] + 1.0).abs() < 1e-14);
        assert!((e.eigenvalues[1] - 1.0).abs() < 1e-14);
    }

    #[test]
    fn eig_real_diagonal_is_sorted_diagonal() {
        let vals = [3.5, -1.25, 0.0, 2.0, -7.0];
        let e = hermitian_eig(&diag(&vals)).unwrap();
        let mut sorted = vals.to_vec();
        sorted.sort_by(f64::total_cmp);
        for (a, b) in e.eigenvalues.iter().zip(&sorted) {
            assert!((a - b).abs() < 1e-14);
        }
    }

    #[test]
    fn eig_rejects_bad_input() {
        let rect = ComplexMatrix::zeros(2, 3);
        assert!(matches!(hermitian_eig(&rect), Err(Error::NotSquare { .. })));
        let mut nan = ComplexMatrix::identity(2, 2);
        nan[(0, 1)] = c(f64::NAN, 0.0);
        assert!(matches!(hermitian_eig(&nan), Err(Error::NonFinite)));
        let mut skew = ComplexMatrix::zeros(2, 2);
        skew[(0, 1)] = c(1.0, 0.0);
        assert!(matches!(hermitian_eig(&skew), Err(Error::NotHermitian { .. })));
    }

    #[test]
    fn eig_reconstructs_random_hermitian() {
        let n = 7;
        let mut a = ComplexMatrix::zeros(n, n);
        for i in 0..n {
            for j in 0..n {
                a[(i, j)] = c(((i * 7 + j * 3) % 5) as f64 - 2.0, ((i + 2 * j) % 3) as f64);
            }
        }
        let h = (&a + a.adjoint()).scale(0.5);
        let e = hermitian_eig(&h).unwrap();
        let v = &e.eigenvectors;
        let lam = diag(&e.eigenvalues);
        assert!(max_abs(&(&h * v - v * lam)) < 1e-10);
        assert!(max_abs(&(v.adjoint() * v - ComplexMatrix::identity(n, n))) < 1e-10);
        assert!(e.eigenvalues.windows(2).all(|w| w[0] <= w[1]));
    }

    #[test]
    fn expm_diagonal_and_zero() {
        let u = hermitian_expm(&sigma_z(), c(0.0, -PI / 2.0)).unwrap();
        assert!((u[(0, 0)] - c(0.0, -1.0)).norm() < 1e-14);
        assert!((u[(1, 1)] - c(0.0, 1.0)).norm() < 1e-14);
        assert!(u[(0, 1)].norm() < 1e-14);

        let z = ComplexMatrix::zeros(4, 4);
        let u = hermitian_expm(&z, c(3.0, -2.0)).unwrap();
        assert!(max_abs(&(u - ComplexMatrix::identity(4, 4))) < 1e-14);
    }

    #[test]
    fn psd_project_cases() {
        let half = diag(&[0.5, 0.5]);
        assert!(max_abs(&(psd_project(&half).unwrap() - &half)) < 1e-15);

        let tiny = diag(&[1.0 + 1e-11, -1e-11]);
        let p = psd_project(&tiny).unwrap();
        assert!(max_abs(&(p - diag(&[1.0, 0.0]))) < 1e-15);

        let bad = diag(&[1.1, -0.1]);
        assert!(matches!(
            psd_project(&bad),
            Err(Error::NegativeSpectrum { .. })
        ));
    }

    #[test]
    fn entropy_zero_log_zero() {
        assert_eq!(shannon_bits([1.0, 0.0]), 0.0);
        assert!((shannon_bits([0.5, 0.5]) - 1.0).abs() < 1e-15);
    }
}
