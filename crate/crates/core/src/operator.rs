//! The measurement-operator interface consumed by GAMP.

use ndarray::Array2;
use num_complex::Complex64;

/// A complex linear map `A: C^cols → C^rows` together with the elementwise
/// `|A_ij|²` products GAMP needs for variance propagation.
///
/// Slices passed in must have the matching length; implementations may panic
/// otherwise.
pub trait LinearOperator: Sync {
    fn rows(&self) -> usize;
    fn cols(&self) -> usize;

    /// `A x`
    fn forward(&self, x: &[Complex64]) -> Vec<Complex64>;
    /// `A^* z`
    fn adjoint(&self, z: &[Complex64]) -> Vec<Complex64>;
    /// `|A|² v` (elementwise squared magnitudes)
    fn forward_abs_sq(&self, v: &[f64]) -> Vec<f64>;
    /// `(|A|²)^T w`
    fn adjoint_abs_sq(&self, w: &[f64]) -> Vec<f64>;
    /// `‖A‖_F²`
    fn frobenius_sq(&self) -> f64;
}

/// Explicit dense matrix; used for small synthetic problems and as an oracle.
#[derive(Debug, Clone)]
pub struct DenseOperator {
    pub matrix: Array2<Complex64>,
}

impl DenseOperator {
    pub fn new(matrix: Array2<Complex64>) -> Self {
        Self { matrix }
    }
}

impl LinearOperator for DenseOperator {
    fn rows(&self) -> usize {
        self.matrix.nrows()
    }

    fn cols(&self) -> usize {
        self.matrix.ncols()
    }

    fn forward(&self, x: &[Complex64]) -> Vec<Complex64> {
        assert_eq!(x.len(), self.cols());
        self.matrix
            .rows()
            .into_iter()
            .map(|row| row.iter().zip(x).map(|(a, b)| a * b).sum())
            .collect()
    }

    fn adjoint(&self, z: &[Complex64]) -> Vec<Complex64> {
        assert_eq!(z.len(), self.rows());
        self.matrix
            .columns()
            .into_iter()
            .map(|col| col.iter().zip(z).map(|(a, b)| a.conj() * b).sum())
            .collect()
    }

    fn forward_abs_sq(&self, v: &[f64]) -> Vec<f64> {
        assert_eq!(v.len(), self.cols());
        self.matrix
            .rows()
            .into_iter()
            .map(|row| row.iter().zip(v).map(|(a, b)| a.norm_sqr() * b).sum())
            .collect()
    }

    fn adjoint_abs_sq(&self, w: &[f64]) -> Vec<f64> {
        assert_eq!(w.len(), self.rows());
        self.matrix
            .columns()
            .into_iter()
            .map(|col| col.iter().zip(w).map(|(a, b)| a.norm_sqr() * b).sum())
            .collect()
    }

    fn frobenius_sq(&self) -> f64 {
        self.matrix.iter().map(|z| z.norm_sqr()).sum()
    }
}
