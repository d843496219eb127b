use nalgebra::DMatrix;
use num_complex::Complex64 as C64;

use super::{annihilate_mask, create_mask, FockOperator, FockSpace, FockVector, ModeOperator};
use crate::error::{invalid, Error, Result};

const UNITARY_TOL: f64 = 1e-10;
const PROJECTION_TOL: f64 = 1e-12;

fn rows_of(mask: usize, m: usize) -> Vec<usize> {
    (0..m).filter(|i| mask & (1 << i) != 0).collect()
}

/// `a*(f_1) ... a*(f_N) Omega` for orbitals given as the columns of an
/// `M x N` matrix. The amplitude of `{s_1 < ... < s_N}` is the minor
/// `det F[{s}, :]`.
pub fn slater_vector(space: FockSpace, orbitals: &DMatrix<C64>) -> Result<FockVector> {
    let m = space.modes();
    let n = orbitals.ncols();
    if orbitals.nrows() != m {
        return Err(invalid("orbitals", format!("expected {m} rows, got {}", orbitals.nrows())));
    }
    if n > m {
        return Err(invalid("orbitals", "more orbitals than modes"));
    }
    let mut out = FockVector::zeros(space);
    for mask in space.sector(n) {
        let rows = rows_of(mask, m);
        out.amplitudes_mut()[mask] = orbitals.select_rows(&rows).determinant();
    }
    Ok(out)
}

/// Particle-hole unitary of a basis-diagonal projection `omega`:
/// `R |T> = c_{t_1} ... c_{t_m} |S>` with `c_t = a_t` on the occupied set
/// `S` and `a*_t` elsewhere, `t_1 < ... < t_m`.
pub fn particle_hole(space: FockSpace, omega: &ModeOperator) -> Result<FockOperator> {
    let m = space.modes();
    if omega.nrows() != m || omega.ncols() != m {
        return Err(invalid("omega", "shape does not match the mode count"));
    }
    let mut occupied = 0usize;
    for i in 0..m {
        for j in 0..m {
            let v = omega[(i, j)];
            if i != j && v.norm() > PROJECTION_TOL {
                return Err(Error::NotDiagonalProjection);
            }
        }
        let d = omega[(i, i)];
        if (d - C64::new(1.0, 0.0)).norm() <= PROJECTION_TOL {
            occupied |= 1 << i;
        } else if d.norm() > PROJECTION_TOL {
            return Err(Error::NotDiagonalProjection);
        }
    }
    let mut triplets = Vec::with_capacity(space.dim());
    for t in 0..space.dim() {
        let mut state = occupied;
        let mut sign = 1.0;
        // Apply c_{t_m} first, c_{t_1} last.
        for i in rows_of(t, m).into_iter().rev() {
            let step = if occupied & (1 << i) != 0 {
                annihilate_mask(state, i)
            } else {
                create_mask(state, i)
            };
            let (next, s) = step.expect("each mode is touched once");
            state = next;
            sign *= s;
        }
        triplets.push((state, t, C64::new(sign, 0.0)));
    }
    FockOperator::from_triplets(space, triplets)
}

/// Unitary `M x M` matrix whose leading columns are the given orthonormal
/// orbitals.
pub fn unitary_completion(orbitals: &DMatrix<C64>) -> Result<DMatrix<C64>> {
    let m = orbitals.nrows();
    let n = orbitals.ncols();
    if n > m {
        return Err(invalid("orbitals", "more orbitals than modes"));
    }
    let gram = orbitals.adjoint() * orbitals;
    let defect = (gram - DMatrix::<C64>::identity(n, n)).iter().fold(0.0f64, |a, v| a.max(v.norm()));
    if defect > UNITARY_TOL {
        return Err(Error::NotUnitary(defect));
    }
    let mut stacked = DMatrix::zeros(m, n + m);
    stacked.columns_mut(0, n).copy_from(orbitals);
    stacked.columns_mut(n, m).fill_with_identity();
    // Trailing columns of Q span the orthogonal complement of the orbitals.
    let mut q = stacked.qr().q();
    q.columns_mut(0, n).copy_from(orbitals);
    Ok(q)
}

/// Second quantization `Gamma(W)` of a one-particle unitary, with matrix
/// elements `<S'| Gamma(W) |S> = det W[S', S]`.
pub fn lift_unitary(space: FockSpace, w: &ModeOperator) -> Result<FockOperator> {
    let m = space.modes();
    if w.nrows() != m || w.ncols() != m {
        return Err(invalid("W", "shape does not match the mode count"));
    }
    let defect = (w.adjoint() * w - DMatrix::<C64>::identity(m, m))
        .iter()
        .fold(0.0f64, |a, v| a.max(v.norm()));
    if defect > UNITARY_TOL {
        return Err(Error::NotUnitary(defect));
    }
    let mut blocks = Vec::with_capacity(m + 1);
    for n in 0..=m {
        let basis = space.sector(n);
        let rows: Vec<Vec<usize>> = basis.iter().map(|&s| rows_of(s, m)).collect();
        let mut block = DMatrix::zeros(basis.len(), basis.len());
        for (b, cols) in rows.iter().enumerate() {
            let sub = w.select_columns(cols);
            for (a, r) in rows.iter().enumerate() {
                block[(a, b)] = if n == 0 {
                    C64::new(1.0, 0.0)
                } else {
                    sub.select_rows(r).determinant()
                };
            }
        }
        blocks.push((n, block));
    }
    FockOperator::from_sector_blocks(space, &blocks)
}

/// Particle-hole unitary of the projection onto the span of orthonormal
/// orbitals, `R = Gamma(W) R_0 Gamma(W)*` where `W` completes the orbitals
/// to a unitary and `R_0` is the diagonal particle-hole map of the first `N`
/// modes. `R Omega` is [`slater_vector`] of the orbitals.
pub fn particle_hole_general(space: FockSpace, orbitals: &DMatrix<C64>) -> Result<FockOperator> {
    let m = space.modes();
    let n = orbitals.ncols();
    let w = unitary_completion(orbitals)?;
    let mut omega0 = DMatrix::zeros(m, m);
    for i in 0..n {
        omega0[(i, i)] = C64::new(1.0, 0.0);
    }
    let lifted = lift_unitary(space, &w)?;
    lifted.mul(&particle_hole(space, &omega0)?)?.mul(&lifted.adjoint())
}
