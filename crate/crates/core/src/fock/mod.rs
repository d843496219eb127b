//! Finite-mode fermionic Fock space with occupation-bitmask basis.
//!
//! Mode `i` is bit `i`. Creation and annihilation carry the Jordan-Wigner
//! sign `(-1)^{#occupied modes below i}`, so that
//! `a*_{s_1} ... a*_{s_n} Omega` with `s_1 < ... < s_n` is the basis vector
//! of `{s_1, ..., s_n}` with amplitude `+1`.

mod audit;
mod bogoliubov;
mod fluctuation;
mod hamiltonian;
mod operator;

pub use audit::{
    b_bound_trial, second_quantization_audit, particle_hole_suite, BBoundTrial, BoundId, BoundRow, SecondQuantizationReport,
    ParticleHoleSuite,
};
pub use bogoliubov::{lift_unitary, particle_hole, particle_hole_general, slater_vector, unitary_completion};
pub use fluctuation::{
    fluctuation_growth_run, fluctuation_identity_case, fluctuation_number, hs_distance, one_pdm, FluctuationRow, FluctuationRun, RingSetup,
};
pub use hamiltonian::{second_quantized_hamiltonian, ExactPropagator, ModeLattice};
pub use operator::{FockOperator, PairKind};

use nalgebra::DMatrix;
use num_complex::Complex64 as C64;

use crate::error::{invalid, Error, Result};

/// Largest supported mode count.
pub const MAX_MODES: usize = 12;
/// Largest mode count for which full dense Fock matrices are built.
pub const DENSE_MODES: usize = 8;

/// One-particle operator on the mode space.
pub type ModeOperator = DMatrix<C64>;

/// `2^M`-dimensional Fock space over `M` modes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct FockSpace {
    modes: usize,
}

impl FockSpace {
    pub fn new(modes: usize) -> Result<Self> {
        if modes == 0 || modes > MAX_MODES {
            return Err(invalid("M", format!("mode count must lie in 1..={MAX_MODES}, got {modes}")));
        }
        Ok(Self { modes })
    }

    pub fn modes(&self) -> usize {
        self.modes
    }

    pub fn dim(&self) -> usize {
        1 << self.modes
    }

    /// Bitmasks with `n` occupied modes, ascending.
    pub fn sector(&self, n: usize) -> Vec<usize> {
        (0..self.dim()).filter(|s| s.count_ones() as usize == n).collect()
    }

    pub fn check_dense(&self) -> Result<()> {
        if self.modes > DENSE_MODES {
            return Err(Error::CapExceeded {
                what: "dense Fock matrix modes",
                size: self.modes,
                cap: DENSE_MODES,
            });
        }
        Ok(())
    }
}

/// Sign and target of `a_i |mask>`, if nonzero.
pub(crate) fn annihilate_mask(mask: usize, i: usize) -> Option<(usize, f64)> {
    if mask & (1 << i) == 0 {
        return None;
    }
    Some((mask ^ (1 << i), jw_sign(mask, i)))
}

/// Sign and target of `a*_i |mask>`, if nonzero.
pub(crate) fn create_mask(mask: usize, i: usize) -> Option<(usize, f64)> {
    if mask & (1 << i) != 0 {
        return None;
    }
    Some((mask | (1 << i), jw_sign(mask, i)))
}

fn jw_sign(mask: usize, i: usize) -> f64 {
    if (mask & ((1 << i) - 1)).count_ones().is_multiple_of(2) {
        1.0
    } else {
        -1.0
    }
}

/// State vector over the bitmask basis.
#[derive(Debug, Clone, PartialEq)]
pub struct FockVector {
    space: FockSpace,
    amps: Vec<C64>,
}

impl FockVector {
    pub fn new(space: FockSpace, amps: Vec<C64>) -> Result<Self> {
        if amps.len() != space.dim() {
            return Err(invalid("amplitudes", format!("expected {}, got {}", space.dim(), amps.len())));
        }
        if amps.iter().any(|a| !(a.re.is_finite() && a.im.is_finite())) {
            return Err(invalid("amplitudes", "non-finite amplitude"));
        }
        Ok(Self { space, amps })
    }

    pub fn zeros(space: FockSpace) -> Self {
        Self {
            space,
            amps: vec![C64::new(0.0, 0.0); space.dim()],
        }
    }

    pub fn vacuum(space: FockSpace) -> Self {
        Self::basis(space, 0)
    }

    pub fn basis(space: FockSpace, mask: usize) -> Self {
        let mut v = Self::zeros(space);
        v.amps[mask] = C64::new(1.0, 0.0);
        v
    }

    pub fn space(&self) -> FockSpace {
        self.space
    }

    pub fn amplitudes(&self) -> &[C64] {
        &self.amps
    }

    pub fn amplitudes_mut(&mut self) -> &mut [C64] {
        &mut self.amps
    }

    pub fn norm(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn normalized(mut self) -> Self {
        let n = self.norm();
        if n > 0.0 {
            for a in &mut self.amps {
                *a /= n;
            }
        }
        self
    }

    pub fn inner(&self, other: &FockVector) -> C64 {
        self.amps.iter().zip(&other.amps).map(|(a, b)| a.conj() * b).sum()
    }

    pub fn distance(&self, other: &FockVector) -> f64 {
        self.amps
            .iter()
            .zip(&other.amps)
            .map(|(a, b)| (a - b).norm_sqr())
            .sum::<f64>()
            .sqrt()
    }

    pub fn annihilate(&self, i: usize) -> FockVector {
        let mut out = Self::zeros(self.space);
        for (mask, a) in self.amps.iter().enumerate() {
            if let Some((t, s)) = annihilate_mask(mask, i) {
                out.amps[t] += a * s;
            }
        }
        out
    }

    pub fn create(&self, i: usize) -> FockVector {
        let mut out = Self::zeros(self.space);
        for (mask, a) in self.amps.iter().enumerate() {
            if let Some((t, s)) = create_mask(mask, i) {
                out.amps[t] += a * s;
            }
        }
        out
    }

    /// `a(g) = sum_i conj(g_i) a_i`.
    pub fn annihilate_fn(&self, g: &[C64]) -> FockVector {
        let mut out = Self::zeros(self.space);
        for (i, gi) in g.iter().enumerate() {
            if gi.norm() == 0.0 {
                continue;
            }
            let part = self.annihilate(i);
            for (o, p) in out.amps.iter_mut().zip(&part.amps) {
                *o += gi.conj() * p;
            }
        }
        out
    }

    /// `a*(f) = sum_i f_i a*_i`.
    pub fn create_fn(&self, f: &[C64]) -> FockVector {
        let mut out = Self::zeros(self.space);
        for (i, fi) in f.iter().enumerate() {
            if fi.norm() == 0.0 {
                continue;
            }
            let part = self.create(i);
            for (o, p) in out.amps.iter_mut().zip(&part.amps) {
                *o += fi * p;
            }
        }
        out
    }

    /// `<N>`.
    pub fn number_expectation(&self) -> f64 {
        self.amps
            .iter()
            .enumerate()
            .map(|(m, a)| m.count_ones() as f64 * a.norm_sqr())
            .sum()
    }

    /// `f(N) Psi` for a function of the particle number.
    pub fn number_function(&self, f: impl Fn(f64) -> f64) -> FockVector {
        let amps = self
            .amps
            .iter()
            .enumerate()
            .map(|(m, a)| a * f(m.count_ones() as f64))
            .collect();
        Self { space: self.space, amps }
    }

    /// Weight in the `n`-particle sector.
    pub fn sector_weight(&self, n: usize) -> f64 {
        self.amps
            .iter()
            .enumerate()
            .filter(|(m, _)| m.count_ones() as usize == n)
            .map(|(_, a)| a.norm_sqr())
            .sum()
    }
}

#[cfg(test)]
mod tests;
