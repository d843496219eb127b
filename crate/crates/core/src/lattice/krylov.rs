//! Lanczos approximation of `exp(-i tau H) v` for Hermitian `H` given as a
//! matrix-free action.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64 as C64;

use crate::error::{Error, Result};

const MAX_DIM: usize = 40;

fn dot(a: &[C64], b: &[C64]) -> C64 {
    a.iter().zip(b).map(|(x, y)| x.conj() * y).sum()
}

fn norm(a: &[C64]) -> f64 {
    a.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt()
}

/// Computes `exp(-i tau H) v` to relative accuracy `tol`.
///
/// The step is subdivided whenever the Krylov residual estimate does not
/// reach `tol` within [`MAX_DIM`] vectors. Inner products are the plain
/// Euclidean ones, so `H` must be Hermitian with respect to them.
pub fn expm_apply<F>(mut apply: F, v: &[C64], tau: f64, tol: f64) -> Result<Vec<C64>>
where
    F: FnMut(&[C64]) -> Vec<C64>,
{
    let mut out = v.to_vec();
    let mut remaining = tau;
    let mut step = tau;
    let mut guard = 0;
    while remaining.abs() > 0.0 {
        guard += 1;
        if guard > 100_000 {
            return Err(Error::Decomposition("Krylov exponential did not converge".into()));
        }
        if step.abs() > remaining.abs() {
            step = remaining;
        }
        match lanczos_step(&mut apply, &out, step, tol)? {
            Some(next) => {
                out = next;
                remaining -= step;
                step *= 1.5;
            }
            None => step *= 0.5,
        }
    }
    Ok(out)
}

/// One Lanczos exponential; `None` when the residual estimate is too large.
fn lanczos_step<F>(apply: &mut F, v: &[C64], tau: f64, tol: f64) -> Result<Option<Vec<C64>>>
where
    F: FnMut(&[C64]) -> Vec<C64>,
{
    let beta0 = norm(v);
    if beta0 == 0.0 {
        return Ok(Some(v.to_vec()));
    }
    let mut basis: Vec<Vec<C64>> = vec![v.iter().map(|x| x / beta0).collect()];
    let mut alphas = Vec::new();
    let mut betas: Vec<f64> = Vec::new();
    for j in 0..MAX_DIM {
        let mut w = apply(&basis[j]);
        let a = dot(&basis[j], &w).re;
        alphas.push(a);
        // full reorthogonalization, twice
        for _ in 0..2 {
            for q in &basis {
                let c = dot(q, &w);
                for (wi, qi) in w.iter_mut().zip(q) {
                    *wi -= c * qi;
                }
            }
        }
        let b = norm(&w);
        let m = j + 1;
        let coeffs = tridiag_exp(&alphas, &betas, tau)?;
        let err = b * coeffs[m - 1].norm();
        if err <= tol || b < 1e-14 {
            let mut out = vec![C64::new(0.0, 0.0); v.len()];
            for (c, q) in coeffs.iter().zip(&basis) {
                for (o, qi) in out.iter_mut().zip(q) {
                    *o += c * qi * beta0;
                }
            }
            return Ok(Some(out));
        }
        betas.push(b);
        basis.push(w.iter().map(|x| x / b).collect());
    }
    Ok(None)
}

/// First column of `exp(-i tau T)` for the symmetric tridiagonal `T`.
fn tridiag_exp(alphas: &[f64], betas: &[f64], tau: f64) -> Result<Vec<C64>> {
    let m = alphas.len();
    let t = DMatrix::from_fn(m, m, |i, j| {
        if i == j {
            alphas[i]
        } else if i + 1 == j {
            betas[i]
        } else if j + 1 == i {
            betas[j]
        } else {
            0.0
        }
    });
    let eig = nalgebra::SymmetricEigen::try_new(t, f64::EPSILON, 1000 * m.max(1))
        .ok_or_else(|| Error::Decomposition("tridiagonal eigensolver failed".into()))?;
    let u = &eig.eigenvectors;
    let phases: DVector<C64> = eig
        .eigenvalues
        .map(|e| C64::from_polar(1.0, -tau * e));
    Ok((0..m)
        .map(|i| (0..m).map(|k| u[(i, k)] * phases[k] * u[(0, k)]).sum())
        .collect())
}
