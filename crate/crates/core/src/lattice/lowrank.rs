use nalgebra::DMatrix;
use num_complex::Complex64 as C64;

use super::dense::svd;
use crate::error::{invalid, Result};

/// Operator `L R*` stored through its factors (columns in the orthonormal
/// site basis).
///
/// Commutators of multiplication operators with rank-`N` projections have
/// rank at most `2N`, so their singular values and `|A|` follow from a
/// `2N x 2N` SVD after thin QR factorizations of both factors.
#[derive(Debug, Clone)]
pub struct LowRankOperator {
    left: DMatrix<C64>,
    right: DMatrix<C64>,
}

/// Reduced SVD `A = U diag(s) W*` with thin `U`, `W`.
struct ThinSvd {
    sigma: Vec<f64>,
    right_vectors: DMatrix<C64>,
}

impl LowRankOperator {
    pub fn new(left: DMatrix<C64>, right: DMatrix<C64>) -> Result<Self> {
        if left.nrows() != right.nrows() || left.ncols() != right.ncols() {
            return Err(invalid(
                "factors",
                format!(
                    "factor shapes differ: {}x{} vs {}x{}",
                    left.nrows(),
                    left.ncols(),
                    right.nrows(),
                    right.ncols()
                ),
            ));
        }
        Ok(Self { left, right })
    }

    pub fn side(&self) -> usize {
        self.left.nrows()
    }

    pub fn rank_bound(&self) -> usize {
        self.left.ncols()
    }

    pub fn to_dense(&self) -> DMatrix<C64> {
        &self.left * self.right.adjoint()
    }

    fn thin_svd(&self) -> Result<ThinSvd> {
        let n = self.side();
        let k = self.rank_bound();
        if k == 0 {
            return Ok(ThinSvd {
                sigma: Vec::new(),
                right_vectors: DMatrix::zeros(n, 0),
            });
        }
        if 2 * k >= n {
            let s = svd(self.to_dense(), true)?;
            let v_t = s.v_t.expect("requested");
            return Ok(ThinSvd {
                sigma: s.singular_values.iter().copied().collect(),
                right_vectors: v_t.adjoint(),
            });
        }
        let ql = self.left.clone().qr();
        let qr = self.right.clone().qr();
        let core = ql.r() * qr.r().adjoint();
        let s = svd(core, true)?;
        let w = s.v_t.expect("requested").adjoint();
        Ok(ThinSvd {
            sigma: s.singular_values.iter().copied().collect(),
            right_vectors: qr.q() * w,
        })
    }

    pub fn singular_values(&self) -> Result<Vec<f64>> {
        Ok(self.thin_svd()?.sigma)
    }

    pub fn trace_norm(&self) -> Result<f64> {
        Ok(self.singular_values()?.iter().sum())
    }

    /// Diagonal of `|A|` in the site basis, `sum_k s_k |W_{xk}|^2`.
    pub fn abs_diagonal(&self) -> Result<Vec<f64>> {
        let t = self.thin_svd()?;
        let w = &t.right_vectors;
        Ok((0..self.side())
            .map(|x| {
                t.sigma
                    .iter()
                    .enumerate()
                    .map(|(k, s)| s * w[(x, k)].norm_sqr())
                    .sum()
            })
            .collect())
    }
}
