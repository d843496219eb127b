use nalgebra::{DMatrix, DVector};
use num_complex::Complex64 as C64;

use super::Grid;
use crate::error::{invalid, Error, Result};

/// Explicit one-particle operator on the grid.
///
/// The matrix is stored in the orthonormal site basis `delta_x / h^{d/2}`;
/// the integral kernel is `A(x;y) = matrix[(x, y)] / h^d`.
#[derive(Debug, Clone, PartialEq)]
pub struct DenseOperator {
    grid: Grid,
    matrix: DMatrix<C64>,
}

/// Schatten norms and trace of an operator.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OperatorNorms {
    pub operator_norm: f64,
    pub hs_norm: f64,
    pub trace_norm: f64,
    pub trace: C64,
}

pub(crate) fn svd(
    m: DMatrix<C64>,
    vectors: bool,
) -> Result<nalgebra::SVD<C64, nalgebra::Dyn, nalgebra::Dyn>> {
    let n = m.nrows().max(m.ncols()).max(1);
    nalgebra::SVD::try_new(m, vectors, vectors, f64::EPSILON, 2000 * n)
        .ok_or_else(|| Error::Decomposition("SVD did not converge".into()))
}

pub(crate) fn hermitian_eigen(m: DMatrix<C64>) -> Result<(DVector<f64>, DMatrix<C64>)> {
    let n = m.nrows().max(1);
    let eig = nalgebra::SymmetricEigen::try_new(m, f64::EPSILON, 2000 * n)
        .ok_or_else(|| Error::Decomposition("Hermitian eigensolver did not converge".into()))?;
    Ok((eig.eigenvalues, eig.eigenvectors))
}

pub(crate) fn max_entry(m: &DMatrix<C64>) -> f64 {
    m.iter().fold(0.0, |acc, v| acc.max(v.norm()))
}

impl DenseOperator {
    pub fn new(grid: Grid, matrix: DMatrix<C64>) -> Result<Self> {
        grid.check_dense()?;
        if matrix.nrows() != grid.len() || matrix.ncols() != grid.len() {
            return Err(invalid(
                "matrix",
                format!(
                    "expected {n}x{n}, got {}x{}",
                    matrix.nrows(),
                    matrix.ncols(),
                    n = grid.len()
                ),
            ));
        }
        Ok(Self { grid, matrix })
    }

    pub fn zeros(grid: Grid) -> Result<Self> {
        Self::new(grid, DMatrix::zeros(grid.len(), grid.len()))
    }

    pub fn identity(grid: Grid) -> Result<Self> {
        Self::new(grid, DMatrix::identity(grid.len(), grid.len()))
    }

    /// Builds the operator from its integral kernel `A(x;y)`.
    pub fn from_kernel(grid: Grid, kernel: impl Fn(usize, usize) -> C64) -> Result<Self> {
        grid.check_dense()?;
        let hd = grid.cell_volume();
        let n = grid.len();
        Self::new(grid, DMatrix::from_fn(n, n, |i, j| kernel(i, j) * hd))
    }

    /// Projection-like sum `sum_j |f_j><f_j|` of orthonormal-basis columns.
    pub fn from_columns(grid: Grid, columns: &DMatrix<C64>) -> Result<Self> {
        grid.check_dense()?;
        Self::new(grid, columns * columns.adjoint())
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn matrix(&self) -> &DMatrix<C64> {
        &self.matrix
    }

    pub fn into_matrix(self) -> DMatrix<C64> {
        self.matrix
    }

    pub fn side(&self) -> usize {
        self.matrix.nrows()
    }

    /// Integral kernel `A(x;y)`.
    pub fn kernel(&self, x: usize, y: usize) -> C64 {
        self.matrix[(x, y)] / self.grid.cell_volume()
    }

    pub fn trace(&self) -> C64 {
        self.matrix.trace()
    }

    pub fn adjoint(&self) -> Self {
        Self {
            grid: self.grid,
            matrix: self.matrix.adjoint(),
        }
    }

    /// Largest entry of `A - A*`.
    pub fn hermiticity_defect(&self) -> f64 {
        max_entry(&(&self.matrix - self.matrix.adjoint()))
    }

    pub fn is_hermitian(&self) -> bool {
        self.hermiticity_defect() < 1e-12
    }

    pub fn sub(&self, other: &DenseOperator) -> Result<DenseOperator> {
        if self.grid != other.grid {
            return Err(Error::GridMismatch);
        }
        Ok(Self {
            grid: self.grid,
            matrix: &self.matrix - &other.matrix,
        })
    }

    pub fn mul(&self, other: &DenseOperator) -> Result<DenseOperator> {
        if self.grid != other.grid {
            return Err(Error::GridMismatch);
        }
        Ok(Self {
            grid: self.grid,
            matrix: &self.matrix * &other.matrix,
        })
    }

    pub fn scaled(&self, c: C64) -> DenseOperator {
        Self {
            grid: self.grid,
            matrix: &self.matrix * c,
        }
    }

    /// Hilbert-Schmidt norm straight from the entries.
    pub fn frobenius(&self) -> f64 {
        self.matrix.iter().map(|v| v.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn singular_values(&self) -> Result<Vec<f64>> {
        let s = svd(self.matrix.clone(), false)?;
        Ok(s.singular_values.iter().copied().collect())
    }

    pub fn norms(&self) -> Result<OperatorNorms> {
        let sv = self.singular_values()?;
        Ok(OperatorNorms {
            operator_norm: sv.iter().copied().fold(0.0, f64::max),
            hs_norm: sv.iter().map(|s| s * s).sum::<f64>().sqrt(),
            trace_norm: sv.iter().sum(),
            trace: self.trace(),
        })
    }

    /// `|A| = (A* A)^{1/2}`, assembled as `V diag(sigma) V*` from the SVD.
    pub fn absolute_value(&self) -> Result<DenseOperator> {
        let s = svd(self.matrix.clone(), true)?;
        let v_t = s
            .v_t
            .ok_or_else(|| Error::Decomposition("missing right singular vectors".into()))?;
        let sigma = DMatrix::from_diagonal(&s.singular_values.map(|x| C64::new(x, 0.0)));
        let abs = v_t.adjoint() * sigma * &v_t;
        let abs = (&abs + abs.adjoint()) * C64::new(0.5, 0.0);
        Ok(Self {
            grid: self.grid,
            matrix: abs,
        })
    }

    /// Eigenvalues of a Hermitian operator in ascending order.
    pub fn hermitian_eigenvalues(&self) -> Result<Vec<f64>> {
        let (vals, _) = hermitian_eigen(self.matrix.clone())?;
        let mut v: Vec<f64> = vals.iter().copied().collect();
        v.sort_by(f64::total_cmp);
        Ok(v)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_matrix(n: usize, rng: &mut ChaCha8Rng) -> DMatrix<C64> {
        DMatrix::from_fn(n, n, |_, _| {
            C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))
        })
    }

    fn grid8() -> Grid {
        Grid::new(1, 8, 1.0).unwrap()
    }

    #[test]
    fn identity_norms() {
        let id = DenseOperator::identity(grid8()).unwrap();
        let n = id.norms().unwrap();
        assert!((n.operator_norm - 1.0).abs() < 1e-12);
        assert!((n.hs_norm - 8f64.sqrt()).abs() < 1e-12);
        assert!((n.trace_norm - 8.0).abs() < 1e-12);
        assert!((n.trace.re - 8.0).abs() < 1e-12);
    }

    #[test]
    fn rank_one_projection_norms() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let v = random_matrix(8, &mut rng).column(0).into_owned();
        let v = &v / C64::new(v.norm(), 0.0);
        let p = DenseOperator::new(grid8(), &v * v.adjoint()).unwrap();
        let n = p.norms().unwrap();
        for x in [n.operator_norm, n.hs_norm, n.trace_norm, n.trace.re] {
            assert!((x - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn trace_norm_matches_eigen_oracle() {
        // Oracle: sum of square roots of the eigenvalues of A*A.
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let grid = grid8();
        let a = random_matrix(8, &mut rng);
        let op = DenseOperator::new(grid, a.clone()).unwrap();
        let (ev, _) = hermitian_eigen(a.adjoint() * &a).unwrap();
        let oracle: f64 = ev.iter().map(|e| e.max(0.0).sqrt()).sum();
        assert!((op.norms().unwrap().trace_norm - oracle).abs() < 1e-10);
    }

    #[test]
    fn absolute_value_of_psd_and_negative_projection() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let b = random_matrix(8, &mut rng);
        let psd = DenseOperator::new(grid8(), &b * b.adjoint()).unwrap();
        let abs = psd.absolute_value().unwrap();
        assert!(abs.sub(&psd).unwrap().frobenius() < 1e-10 * psd.frobenius());

        let v = b.column(1).into_owned();
        let v = &v / C64::new(v.norm(), 0.0);
        let p = DenseOperator::new(grid8(), &v * v.adjoint()).unwrap();
        let abs = p.scaled(C64::new(-1.0, 0.0)).absolute_value().unwrap();
        assert!(abs.sub(&p).unwrap().frobenius() < 1e-12);
    }

    #[test]
    fn absolute_value_cross_checks_trace_norm() {
        let mut rng = ChaCha8Rng::seed_from_u64(13);
        let grid = Grid::new(1, 16, 2.0).unwrap();
        let a = DenseOperator::new(grid, random_matrix(16, &mut rng)).unwrap();
        let abs = a.absolute_value().unwrap();
        assert!(abs.is_hermitian());
        for i in 0..16 {
            assert!(abs.matrix()[(i, i)].re >= -1e-12);
        }
        assert!((abs.trace().re - a.norms().unwrap().trace_norm).abs() < 1e-10);
        // idempotent under a second application
        let abs2 = abs.absolute_value().unwrap();
        assert!(abs2.sub(&abs).unwrap().frobenius() < 1e-10);
    }

    #[test]
    fn trace_norm_dominates_trace() {
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        for _ in 0..100 {
            let a = DenseOperator::new(grid8(), random_matrix(8, &mut rng)).unwrap();
            let n = a.norms().unwrap();
            assert!(n.trace_norm >= n.trace.norm() - 1e-12);
            assert!(n.trace_norm >= n.hs_norm - 1e-12);
            assert!(n.hs_norm >= n.operator_norm - 1e-12);
        }
    }

    #[test]
    fn dense_cap_is_enforced() {
        let grid = Grid::new(1, 2048, 1.0).unwrap();
        assert!(matches!(
            DenseOperator::zeros(grid),
            Err(Error::CapExceeded { .. })
        ));
    }
}
