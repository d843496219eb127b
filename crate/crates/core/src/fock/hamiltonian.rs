use std::f64::consts::PI;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64 as C64;

use super::{FockOperator, FockSpace, FockVector, ModeOperator, MAX_MODES};
use crate::error::{invalid, Error, Result};
use crate::lattice::dense::hermitian_eigen;
use crate::lattice::krylov::expm_apply;
use crate::lattice::ScaledParams;
use crate::potentials::PowerLawPotential;

/// Sector dimension up to which propagation uses a cached eigenbasis.
pub const EIGEN_SECTOR_CAP: usize = 1024;
const KRYLOV_TOL: f64 = 1e-13;

/// One-particle data of a finite site lattice: kinetic matrix in the site
/// basis, pair potential between sites and mean-field coupling.
#[derive(Debug, Clone, PartialEq)]
pub struct ModeLattice {
    kinetic: ModeOperator,
    pair: DMatrix<f64>,
    coupling: f64,
    epsilon: f64,
}

impl ModeLattice {
    /// Ring of `m >= 2` sites with circumference `length`. The kinetic matrix
    /// is `T_xy = (1/M) sum_k eps^2 k^2 e^{ik(x-y)}` and the pair potential is
    /// `min(d^{-alpha}, h^{-alpha})` in the periodic distance `d`.
    pub fn ring(m: usize, length: f64, params: ScaledParams, interacting: bool) -> Result<Self> {
        if !(2..=MAX_MODES).contains(&m) {
            return Err(invalid("M", format!("ring needs 2..={MAX_MODES} sites, got {m}")));
        }
        if !(length > 0.0 && length.is_finite()) {
            return Err(invalid("L", "ring length must be positive"));
        }
        let h = length / m as f64;
        let eps2 = params.epsilon().powi(2);
        let lo = -((m / 2) as i64);
        let modes: Vec<f64> = (lo..lo + m as i64).map(|j| 2.0 * PI * j as f64 / length).collect();
        let kinetic = DMatrix::from_fn(m, m, |x, y| {
            let sep = (x as f64 - y as f64) * h;
            modes
                .iter()
                .map(|k| C64::from_polar(eps2 * k * k, k * sep))
                .sum::<C64>()
                / m as f64
        });
        let alpha = params.alpha();
        let pair = DMatrix::from_fn(m, m, |x, y| {
            if !interacting {
                return 0.0;
            }
            let raw = (x as f64 - y as f64).abs() * h;
            let dist = raw.min(length - raw);
            dist.max(h).powf(-alpha)
        });
        Ok(Self {
            kinetic,
            pair,
            coupling: params.coupling(),
            epsilon: params.epsilon(),
        })
    }

    /// Sites of a grid with at most [`MAX_MODES`] points, using its spectral
    /// kinetic operator and regularized potential. The mean-field flow of this
    /// lattice is the grid Hartree-Fock flow.
    pub fn from_grid(potential: &PowerLawPotential, params: ScaledParams) -> Result<Self> {
        let grid = *potential.grid();
        let g = grid.len();
        if g > MAX_MODES {
            return Err(Error::CapExceeded {
                what: "grid sites as Fock modes",
                size: g,
                cap: MAX_MODES,
            });
        }
        let eps2 = params.epsilon().powi(2);
        let kinetic = DMatrix::from_fn(g, g, |x, y| {
            let px = grid.position(x);
            let py = grid.position(y);
            (0..g)
                .map(|s| {
                    let idx = grid.unravel(s);
                    let phase: f64 = (0..grid.dim())
                        .map(|a| grid.momentum(idx[a]) * (px[a] - py[a]))
                        .sum();
                    C64::from_polar(eps2 * grid.momentum_sq(s), phase)
                })
                .sum::<C64>()
                / g as f64
        });
        let pair = DMatrix::from_fn(g, g, |x, y| if potential.is_off() { 0.0 } else { potential.between(x, y) });
        Ok(Self {
            kinetic,
            pair,
            coupling: params.coupling(),
            epsilon: params.epsilon(),
        })
    }

    pub fn sites(&self) -> usize {
        self.kinetic.nrows()
    }

    pub fn kinetic(&self) -> &ModeOperator {
        &self.kinetic
    }

    pub fn pair(&self) -> &DMatrix<f64> {
        &self.pair
    }

    pub fn coupling(&self) -> f64 {
        self.coupling
    }

    pub fn epsilon(&self) -> f64 {
        self.epsilon
    }
}

/// `dGamma(T) + (1/N) sum_{x<y} V(x-y) n_x n_y`.
pub fn second_quantized_hamiltonian(lattice: &ModeLattice) -> Result<FockOperator> {
    let m = lattice.sites();
    let space = FockSpace::new(m)?;
    let kinetic = FockOperator::d_gamma(space, &lattice.kinetic)?;
    let diag = (0..space.dim()).map(|mask| {
        let mut e = 0.0;
        for x in 0..m {
            if mask & (1 << x) == 0 {
                continue;
            }
            for y in x + 1..m {
                if mask & (1 << y) != 0 {
                    e += lattice.pair[(x, y)];
                }
            }
        }
        (mask, mask, C64::new(lattice.coupling * e, 0.0))
    });
    kinetic.add(&FockOperator::from_triplets(space, diag)?)
}

enum SectorPropagator {
    Eigen {
        values: DVector<f64>,
        vectors: DMatrix<C64>,
    },
    Sparse {
        entries: Vec<(usize, usize, C64)>,
    },
}

/// `exp(-i t H / eps)` restricted to particle-number sectors, with a cached
/// eigenbasis for sectors up to [`EIGEN_SECTOR_CAP`] states and Krylov
/// propagation beyond.
pub struct ExactPropagator {
    space: FockSpace,
    epsilon: f64,
    sectors: Vec<(Vec<usize>, SectorPropagator)>,
}

impl ExactPropagator {
    pub fn new(hamiltonian: &FockOperator, epsilon: f64) -> Result<Self> {
        if !hamiltonian.conserves_number() {
            return Err(invalid("H", "Hamiltonian must conserve particle number"));
        }
        if !(epsilon > 0.0) {
            return Err(invalid("epsilon", "must be positive"));
        }
        let space = hamiltonian.space();
        let mut sectors = Vec::with_capacity(space.modes() + 1);
        for n in 0..=space.modes() {
            let basis = space.sector(n);
            let prop = if basis.len() <= EIGEN_SECTOR_CAP {
                let (values, vectors) = hermitian_eigen(hamiltonian.sector_matrix(n))?;
                SectorPropagator::Eigen { values, vectors }
            } else {
                let mut index = vec![usize::MAX; space.dim()];
                for (a, &s) in basis.iter().enumerate() {
                    index[s] = a;
                }
                let entries = hamiltonian
                    .entries()
                    .iter()
                    .filter(|(r, c, _)| index[*r] != usize::MAX && index[*c] != usize::MAX)
                    .map(|&(r, c, v)| (index[r], index[c], v))
                    .collect();
                SectorPropagator::Sparse { entries }
            };
            sectors.push((basis, prop));
        }
        Ok(Self { space, epsilon, sectors })
    }

    pub fn propagate(&self, psi: &FockVector, t: f64) -> Result<FockVector> {
        if psi.space() != self.space {
            return Err(Error::GridMismatch);
        }
        let tau = t / self.epsilon;
        let mut out = FockVector::zeros(self.space);
        for (basis, prop) in &self.sectors {
            let local: Vec<C64> = basis.iter().map(|&s| psi.amplitudes()[s]).collect();
            if local.iter().all(|a| a.norm() == 0.0) {
                continue;
            }
            let evolved = match prop {
                SectorPropagator::Eigen { values, vectors } => {
                    let coeffs = vectors.adjoint() * DVector::from_vec(local);
                    let phased = DVector::from_iterator(
                        coeffs.len(),
                        coeffs.iter().zip(values.iter()).map(|(c, e)| c * C64::from_polar(1.0, -tau * e)),
                    );
                    (vectors * phased).iter().copied().collect::<Vec<_>>()
                }
                SectorPropagator::Sparse { entries } => {
                    let dim = basis.len();
                    expm_apply(
                        |v| {
                            let mut w = vec![C64::new(0.0, 0.0); dim];
                            for &(r, c, x) in entries {
                                w[r] += x * v[c];
                            }
                            w
                        },
                        &local,
                        tau,
                        KRYLOV_TOL,
                    )?
                }
            };
            for (&s, v) in basis.iter().zip(evolved) {
                out.amplitudes_mut()[s] = v;
            }
        }
        Ok(out)
    }
}
