use std::collections::BTreeMap;

use nalgebra::DMatrix;
use num_complex::Complex64 as C64;

use super::{annihilate_mask, create_mask, FockSpace, FockVector, ModeOperator};
use crate::error::{invalid, Error, Result};

/// Sparse operator on a Fock space, stored as merged `(row, col, value)`
/// triplets sorted by row.
#[derive(Debug, Clone, PartialEq)]
pub struct FockOperator {
    space: FockSpace,
    entries: Vec<(usize, usize, C64)>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PairKind {
    /// `sum O_ij a_i a_j`.
    Annihilation,
    /// `sum O_ij a*_i a*_j`.
    Creation,
}

fn check_mode_operator(space: &FockSpace, o: &ModeOperator) -> Result<()> {
    let m = space.modes();
    if o.nrows() != m || o.ncols() != m {
        return Err(invalid("O", format!("expected {m}x{m} mode operator, got {}x{}", o.nrows(), o.ncols())));
    }
    Ok(())
}

impl FockOperator {
    fn from_map(space: FockSpace, map: BTreeMap<(usize, usize), C64>) -> Self {
        let entries = map
            .into_iter()
            .filter(|(_, v)| *v != C64::new(0.0, 0.0))
            .map(|((r, c), v)| (r, c, v))
            .collect();
        Self { space, entries }
    }

    pub fn from_triplets(space: FockSpace, triplets: impl IntoIterator<Item = (usize, usize, C64)>) -> Result<Self> {
        let mut map = BTreeMap::new();
        for (r, c, v) in triplets {
            if r >= space.dim() || c >= space.dim() {
                return Err(invalid("triplet", "index outside the Fock space"));
            }
            *map.entry((r, c)).or_insert(C64::new(0.0, 0.0)) += v;
        }
        Ok(Self::from_map(space, map))
    }

    pub fn zero(space: FockSpace) -> Self {
        Self {
            space,
            entries: Vec::new(),
        }
    }

    pub fn identity(space: FockSpace) -> Self {
        Self {
            space,
            entries: (0..space.dim()).map(|i| (i, i, C64::new(1.0, 0.0))).collect(),
        }
    }

    /// Particle-number operator `N = dGamma(1)`.
    pub fn number(space: FockSpace) -> Self {
        Self::from_map(
            space,
            (0..space.dim())
                .map(|i| ((i, i), C64::new(i.count_ones() as f64, 0.0)))
                .collect(),
        )
    }

    pub fn annihilator(space: FockSpace, i: usize) -> Result<Self> {
        check_mode(&space, i)?;
        let map = (0..space.dim())
            .filter_map(|m| annihilate_mask(m, i).map(|(t, s)| ((t, m), C64::new(s, 0.0))))
            .collect();
        Ok(Self::from_map(space, map))
    }

    pub fn creator(space: FockSpace, i: usize) -> Result<Self> {
        Ok(Self::annihilator(space, i)?.adjoint())
    }

    /// `dGamma(O) = sum_ij O_ij a*_i a_j`.
    pub fn d_gamma(space: FockSpace, o: &ModeOperator) -> Result<Self> {
        check_mode_operator(&space, o)?;
        let m = space.modes();
        let mut map = BTreeMap::new();
        for mask in 0..space.dim() {
            for j in 0..m {
                let Some((mid, s1)) = annihilate_mask(mask, j) else { continue };
                for i in 0..m {
                    let oij = o[(i, j)];
                    if oij == C64::new(0.0, 0.0) {
                        continue;
                    }
                    if let Some((t, s2)) = create_mask(mid, i) {
                        *map.entry((t, mask)).or_insert(C64::new(0.0, 0.0)) += oij * s1 * s2;
                    }
                }
            }
        }
        Ok(Self::from_map(space, map))
    }

    /// `sum_ij O_ij a_i a_j` or `sum_ij O_ij a*_i a*_j`.
    pub fn pair(space: FockSpace, o: &ModeOperator, kind: PairKind) -> Result<Self> {
        check_mode_operator(&space, o)?;
        let m = space.modes();
        let step: fn(usize, usize) -> Option<(usize, f64)> = match kind {
            PairKind::Annihilation => annihilate_mask,
            PairKind::Creation => create_mask,
        };
        let mut map = BTreeMap::new();
        for mask in 0..space.dim() {
            for j in 0..m {
                let Some((mid, s1)) = step(mask, j) else { continue };
                for i in 0..m {
                    let oij = o[(i, j)];
                    if oij == C64::new(0.0, 0.0) {
                        continue;
                    }
                    if let Some((t, s2)) = step(mid, i) {
                        *map.entry((t, mask)).or_insert(C64::new(0.0, 0.0)) += oij * s1 * s2;
                    }
                }
            }
        }
        Ok(Self::from_map(space, map))
    }

    /// Block-diagonal operator from per-sector dense blocks, indexed by
    /// [`FockSpace::sector`] order.
    pub fn from_sector_blocks(space: FockSpace, blocks: &[(usize, DMatrix<C64>)]) -> Result<Self> {
        let mut triplets = Vec::new();
        for (n, block) in blocks {
            let basis = space.sector(*n);
            if block.nrows() != basis.len() || block.ncols() != basis.len() {
                return Err(invalid("block", format!("sector {n} block has wrong shape")));
            }
            for (a, &r) in basis.iter().enumerate() {
                for (b, &c) in basis.iter().enumerate() {
                    triplets.push((r, c, block[(a, b)]));
                }
            }
        }
        Self::from_triplets(space, triplets)
    }

    pub fn space(&self) -> FockSpace {
        self.space
    }

    pub fn entries(&self) -> &[(usize, usize, C64)] {
        &self.entries
    }

    pub fn nnz(&self) -> usize {
        self.entries.len()
    }

    pub fn apply(&self, v: &FockVector) -> Result<FockVector> {
        if v.space() != self.space {
            return Err(Error::GridMismatch);
        }
        let mut out = FockVector::zeros(self.space);
        let amps = v.amplitudes();
        let o = out.amplitudes_mut();
        for &(r, c, x) in &self.entries {
            o[r] += x * amps[c];
        }
        Ok(out)
    }

    pub fn adjoint(&self) -> Self {
        let map = self.entries.iter().map(|&(r, c, v)| ((c, r), v.conj())).collect();
        Self::from_map(self.space, map)
    }

    pub fn scaled(&self, c: C64) -> Self {
        Self {
            space: self.space,
            entries: self.entries.iter().map(|&(r, col, v)| (r, col, v * c)).collect(),
        }
    }

    pub fn add(&self, other: &FockOperator) -> Result<Self> {
        if other.space != self.space {
            return Err(Error::GridMismatch);
        }
        Self::from_triplets(self.space, self.entries.iter().chain(&other.entries).copied())
    }

    pub fn sub(&self, other: &FockOperator) -> Result<Self> {
        self.add(&other.scaled(C64::new(-1.0, 0.0)))
    }

    /// Sparse product `self * other`.
    pub fn mul(&self, other: &FockOperator) -> Result<Self> {
        if other.space != self.space {
            return Err(Error::GridMismatch);
        }
        let mut by_row: Vec<Vec<(usize, C64)>> = vec![Vec::new(); self.space.dim()];
        for &(r, c, v) in &other.entries {
            by_row[r].push((c, v));
        }
        let mut map = BTreeMap::new();
        for &(r, k, a) in &self.entries {
            for &(c, b) in &by_row[k] {
                *map.entry((r, c)).or_insert(C64::new(0.0, 0.0)) += a * b;
            }
        }
        Ok(Self::from_map(self.space, map))
    }

    /// `A B + B A`.
    pub fn anticommutator(&self, other: &FockOperator) -> Result<Self> {
        self.mul(other)?.add(&other.mul(self)?)
    }

    /// `A B - B A`.
    pub fn commutator(&self, other: &FockOperator) -> Result<Self> {
        self.mul(other)?.sub(&other.mul(self)?)
    }

    /// Largest entry in absolute value.
    pub fn max_abs(&self) -> f64 {
        self.entries.iter().fold(0.0, |m, e| m.max(e.2.norm()))
    }

    /// True when every stored entry connects equal particle numbers.
    pub fn conserves_number(&self) -> bool {
        self.entries
            .iter()
            .all(|&(r, c, v)| r.count_ones() == c.count_ones() || v.norm() == 0.0)
    }

    pub fn to_dense(&self) -> Result<DMatrix<C64>> {
        self.space.check_dense()?;
        let d = self.space.dim();
        let mut m = DMatrix::zeros(d, d);
        for &(r, c, v) in &self.entries {
            m[(r, c)] += v;
        }
        Ok(m)
    }

    /// Restriction to the `n`-particle sector in [`FockSpace::sector`] order.
    pub fn sector_matrix(&self, n: usize) -> DMatrix<C64> {
        let basis = self.space.sector(n);
        let mut index = vec![usize::MAX; self.space.dim()];
        for (a, &m) in basis.iter().enumerate() {
            index[m] = a;
        }
        let mut out = DMatrix::zeros(basis.len(), basis.len());
        for &(r, c, v) in &self.entries {
            if index[r] != usize::MAX && index[c] != usize::MAX {
                out[(index[r], index[c])] += v;
            }
        }
        out
    }

    /// Operator norm from a dense SVD.
    pub fn operator_norm(&self) -> Result<f64> {
        let s = crate::lattice::dense::svd(self.to_dense()?, false)?;
        Ok(s.singular_values.iter().copied().fold(0.0, f64::max))
    }
}

fn check_mode(space: &FockSpace, i: usize) -> Result<()> {
    if i >= space.modes() {
        return Err(invalid("mode", format!("mode {i} outside 0..{}", space.modes())));
    }
    Ok(())
}
