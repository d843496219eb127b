//! Exact antisymmetric `N`-body propagation for `N = 2, 3` on small grids.
//!
//! The wave function is stored as orthonormal-site amplitudes
//! `phi(s_1, ..., s_N) = h^{dN/2} psi(x_{s_1}, ..., x_{s_N})` with particle 0
//! slowest, so the configuration array is an `(N d)`-axis block of side `M`.

use nalgebra::DMatrix;
use num_complex::Complex64 as C64;

use crate::error::{invalid, Error, Result};
use crate::fock::{fluctuation_number, FockSpace, FockVector};
use crate::hf::{density_matrix, hf_step, SlaterState};
use crate::lattice::dense::hermitian_eigen;
use crate::lattice::spectral::fft_block;
use crate::lattice::{ComplexField, DenseOperator, Grid, ScaledParams};
use crate::potentials::PowerLawPotential;

/// Largest configuration array.
pub const NBODY_SITE_CAP: usize = 1 << 22;
/// Dense Hamiltonian oracle cap on the configuration count.
pub const NBODY_DENSE_CAP: usize = 4096;

const ZERO_PROJECTION_TOL: f64 = 1e-12;

fn permutations(n: usize) -> Vec<(Vec<usize>, f64)> {
    fn rec(prefix: &mut Vec<usize>, rest: &mut Vec<usize>, sign: f64, out: &mut Vec<(Vec<usize>, f64)>) {
        if rest.is_empty() {
            out.push((prefix.clone(), sign));
            return;
        }
        for k in 0..rest.len() {
            let x = rest.remove(k);
            prefix.push(x);
            // Picking the k-th remaining element costs k transpositions.
            rec(prefix, rest, if k % 2 == 0 { sign } else { -sign }, out);
            prefix.pop();
            rest.insert(k, x);
        }
    }
    let mut out = Vec::new();
    rec(&mut Vec::new(), &mut (0..n).collect(), 1.0, &mut out);
    out
}

/// Antisymmetric `N`-particle wave function on a grid.
#[derive(Debug, Clone, PartialEq)]
pub struct NBodyState {
    grid: Grid,
    params: ScaledParams,
    amps: Vec<C64>,
    time: f64,
}

fn config_len(grid: &Grid, n: usize) -> Result<usize> {
    let mut total: usize = 1;
    for _ in 0..n {
        total = total.saturating_mul(grid.len());
    }
    if total > NBODY_SITE_CAP {
        return Err(Error::CapExceeded {
            what: "N-body configuration sites",
            size: total,
            cap: NBODY_SITE_CAP,
        });
    }
    Ok(total)
}

fn decode(mut index: usize, g: usize, n: usize) -> Vec<usize> {
    let mut sites = vec![0; n];
    for slot in sites.iter_mut().rev() {
        *slot = index % g;
        index /= g;
    }
    sites
}

fn encode(sites: &[usize], g: usize) -> usize {
    sites.iter().fold(0, |acc, &s| acc * g + s)
}

impl NBodyState {
    /// Signed permutation sum of `raw`, renormalized.
    pub fn antisymmetrize(grid: Grid, params: ScaledParams, raw: &[C64]) -> Result<Self> {
        let n = params.n_particles();
        let total = config_len(&grid, n)?;
        if raw.len() != total {
            return Err(invalid("psi", format!("expected {total} amplitudes, got {}", raw.len())));
        }
        let g = grid.len();
        let perms = permutations(n);
        let mut amps = vec![C64::new(0.0, 0.0); total];
        for (idx, out) in amps.iter_mut().enumerate() {
            let sites = decode(idx, g, n);
            let mut permuted = vec![0; n];
            for (perm, sign) in &perms {
                for (k, &p) in perm.iter().enumerate() {
                    permuted[k] = sites[p];
                }
                *out += raw[encode(&permuted, g)] * *sign;
            }
        }
        let raw_norm = raw.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
        let norm = amps.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
        if !(norm > ZERO_PROJECTION_TOL * raw_norm.max(f64::MIN_POSITIVE)) {
            return Err(Error::ZeroAntisymmetricPart);
        }
        for a in &mut amps {
            *a /= norm;
        }
        Ok(Self {
            grid,
            params,
            amps,
            time: 0.0,
        })
    }

    /// `(N!)^{-1/2} det(f_i(x_j))` for the orbitals of a Slater state.
    pub fn from_slater(state: &SlaterState) -> Result<Self> {
        let raw = product_amplitudes(state.orbitals())?;
        Ok(Self::antisymmetrize(*state.grid(), *state.params(), &raw)?.with_time(state.time()))
    }

    pub fn with_time(mut self, time: f64) -> Self {
        self.time = time;
        self
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn params(&self) -> &ScaledParams {
        &self.params
    }

    pub fn n_particles(&self) -> usize {
        self.params.n_particles()
    }

    pub fn time(&self) -> f64 {
        self.time
    }

    pub fn amplitudes(&self) -> &[C64] {
        &self.amps
    }

    pub fn norm(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt()
    }

    /// `||phi + phi o swap(i, j)||`.
    pub fn swap_residual(&self, i: usize, j: usize) -> f64 {
        let n = self.n_particles();
        let g = self.grid.len();
        let mut acc = 0.0;
        for (idx, a) in self.amps.iter().enumerate() {
            let mut sites = decode(idx, g, n);
            sites.swap(i, j);
            acc += (a + self.amps[encode(&sites, g)]).norm_sqr();
        }
        acc.sqrt()
    }

    /// Largest swap residual over all particle pairs.
    pub fn antisymmetry_defect(&self) -> f64 {
        let n = self.n_particles();
        let mut worst: f64 = 0.0;
        for i in 0..n {
            for j in i + 1..n {
                worst = worst.max(self.swap_residual(i, j));
            }
        }
        worst
    }

    /// Occupation-basis vector over the grid sites; needs a grid with at most
    /// twelve sites.
    pub fn to_fock(&self) -> Result<FockVector> {
        let space = FockSpace::new(self.grid.len())?;
        let n = self.n_particles();
        let g = self.grid.len();
        let scale = (1..=n).map(|k| k as f64).product::<f64>().sqrt();
        let mut out = FockVector::zeros(space);
        for mask in space.sector(n) {
            let sites: Vec<usize> = (0..g).filter(|i| mask & (1 << i) != 0).collect();
            out.amplitudes_mut()[mask] = self.amps[encode(&sites, g)] * scale;
        }
        Ok(out)
    }
}

/// `gamma = N tr_{2..N} |psi><psi|` in the orthonormal site basis.
pub fn reduced_density(state: &NBodyState) -> Result<DenseOperator> {
    let g = state.grid.len();
    state.grid.check_dense()?;
    let rest = state.amps.len() / g;
    let n = state.n_particles() as f64;
    let block = DMatrix::from_row_slice(g, rest, &state.amps);
    let gamma = (&block * block.adjoint()) * C64::new(n, 0.0);
    DenseOperator::new(state.grid, gamma)
}

fn pair_interaction(grid: &Grid, potential: &PowerLawPotential, n: usize, coupling: f64) -> Result<Vec<f64>> {
    let total = config_len(grid, n)?;
    let g = grid.len();
    Ok((0..total)
        .map(|idx| {
            if potential.is_off() {
                return 0.0;
            }
            let sites = decode(idx, g, n);
            let mut w = 0.0;
            for i in 0..n {
                for j in i + 1..n {
                    w += potential.between(sites[i], sites[j]);
                }
            }
            coupling * w
        })
        .collect())
}

fn kinetic_eigenvalues(grid: &Grid, n: usize, eps: f64) -> Result<Vec<f64>> {
    let total = config_len(grid, n)?;
    let axes = n * grid.dim();
    let m = grid.sites_per_axis();
    let ksq: Vec<f64> = (0..m).map(|i| grid.momentum(i).powi(2)).collect();
    Ok((0..total)
        .map(|idx| {
            let mut rest = idx;
            let mut s = 0.0;
            for _ in 0..axes {
                s += ksq[rest % m];
                rest /= m;
            }
            eps * eps * s
        })
        .collect())
}

/// Splitting scheme of [`NBodyPropagator`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SplitScheme {
    /// Half kinetic, full interaction, half kinetic.
    Strang,
    /// Yoshida triple jump of Strang substeps, fourth order.
    Yoshida4,
}

impl SplitScheme {
    fn weights(&self) -> Vec<f64> {
        match self {
            Self::Strang => vec![1.0],
            Self::Yoshida4 => {
                let c = 2f64.cbrt();
                let w1 = 1.0 / (2.0 - c);
                vec![w1, -c * w1, w1]
            }
        }
    }
}

/// Split-step propagator for `exp(-i dt H / eps)` with the kinetic part
/// diagonal in the `N`-fold spectral basis and the pair interaction diagonal
/// in position.
#[derive(Debug, Clone)]
pub struct NBodyPropagator {
    grid: Grid,
    n: usize,
    dt: f64,
    /// `(half kinetic phases, interaction phases)` per Strang substep.
    stages: Vec<(Vec<C64>, Vec<C64>)>,
}

impl NBodyPropagator {
    pub fn new(grid: Grid, params: ScaledParams, potential: &PowerLawPotential, dt: f64) -> Result<Self> {
        Self::with_scheme(grid, params, potential, dt, SplitScheme::Strang)
    }

    pub fn with_scheme(
        grid: Grid,
        params: ScaledParams,
        potential: &PowerLawPotential,
        dt: f64,
        scheme: SplitScheme,
    ) -> Result<Self> {
        if potential.grid() != &grid {
            return Err(Error::GridMismatch);
        }
        if !(dt > 0.0 && dt.is_finite()) {
            return Err(invalid("dt", "time step must be positive"));
        }
        let n = params.n_particles();
        let eps = params.epsilon();
        let kinetic = kinetic_eigenvalues(&grid, n, eps)?;
        let pair = pair_interaction(&grid, potential, n, params.coupling())?;
        let stages = scheme
            .weights()
            .into_iter()
            .map(|w| {
                let h = w * dt;
                (
                    kinetic.iter().map(|e| C64::from_polar(1.0, -0.5 * h * e / eps)).collect(),
                    pair.iter().map(|v| C64::from_polar(1.0, -h * v / eps)).collect(),
                )
            })
            .collect();
        Ok(Self { grid, n, dt, stages })
    }

    fn diagonal_in_momentum(&self, amps: &mut [C64], phases: &[C64]) {
        let axes = self.n * self.grid.dim();
        let m = self.grid.sites_per_axis();
        fft_block(amps, axes, m, false);
        for (a, p) in amps.iter_mut().zip(phases) {
            *a *= p;
        }
        fft_block(amps, axes, m, true);
    }

    pub fn step(&self, state: &NBodyState) -> Result<NBodyState> {
        if state.grid != self.grid || state.n_particles() != self.n {
            return Err(Error::GridMismatch);
        }
        let mut amps = state.amps.clone();
        for (half, pot) in &self.stages {
            self.diagonal_in_momentum(&mut amps, half);
            for (a, p) in amps.iter_mut().zip(pot) {
                *a *= p;
            }
            self.diagonal_in_momentum(&mut amps, half);
        }
        Ok(NBodyState {
            amps,
            time: state.time + self.dt,
            ..state.clone()
        })
    }
}

/// One Strang step; see [`NBodyPropagator`] for repeated use.
pub fn nbody_step(state: &NBodyState, potential: &PowerLawPotential, dt: f64) -> Result<NBodyState> {
    NBodyPropagator::new(state.grid, state.params, potential, dt)?.step(state)
}

/// `<psi, H psi>` with `H = sum_i -eps^2 Lap_i + (1/N) sum_{i<j} V(x_i - x_j)`.
pub fn nbody_energy(state: &NBodyState, potential: &PowerLawPotential) -> Result<f64> {
    let n = state.n_particles();
    let eps = state.params.epsilon();
    let kin = kinetic_eigenvalues(&state.grid, n, eps)?;
    let pot = pair_interaction(&state.grid, potential, n, state.params.coupling())?;
    let mut hat = state.amps.clone();
    fft_block(&mut hat, n * state.grid.dim(), state.grid.sites_per_axis(), false);
    let total = hat.len() as f64;
    let kinetic: f64 = hat.iter().zip(&kin).map(|(a, e)| a.norm_sqr() * e).sum::<f64>() / total;
    let interaction: f64 = state.amps.iter().zip(&pot).map(|(a, w)| a.norm_sqr() * w).sum();
    Ok(kinetic + interaction)
}

/// Dense `N`-body Hamiltonian in the orthonormal configuration basis.
pub fn nbody_hamiltonian(grid: Grid, params: ScaledParams, potential: &PowerLawPotential) -> Result<DMatrix<C64>> {
    let n = params.n_particles();
    let total = config_len(&grid, n)?;
    if total > NBODY_DENSE_CAP {
        return Err(Error::CapExceeded {
            what: "dense N-body Hamiltonian",
            size: total,
            cap: NBODY_DENSE_CAP,
        });
    }
    let g = grid.len();
    let eps2 = params.epsilon().powi(2);
    let one_body = DMatrix::from_fn(g, g, |x, y| {
        let px = grid.position(x);
        let py = grid.position(y);
        (0..g)
            .map(|s| {
                let idx = grid.unravel(s);
                let phase: f64 = (0..grid.dim()).map(|a| grid.momentum(idx[a]) * (px[a] - py[a])).sum();
                C64::from_polar(eps2 * grid.momentum_sq(s), phase)
            })
            .sum::<C64>()
            / g as f64
    });
    let pot = pair_interaction(&grid, potential, n, params.coupling())?;
    let mut h = DMatrix::zeros(total, total);
    for col in 0..total {
        let sites = decode(col, g, n);
        h[(col, col)] += pot[col];
        for p in 0..n {
            let mut moved = sites.clone();
            for target in 0..g {
                moved[p] = target;
                h[(encode(&moved, g), col)] += one_body[(target, sites[p])];
            }
        }
    }
    Ok(h)
}

/// `exp(-i t H / eps) psi` from a dense eigendecomposition.
pub fn dense_propagate(h: &DMatrix<C64>, state: &NBodyState, t: f64) -> Result<NBodyState> {
    if h.nrows() != state.amps.len() {
        return Err(invalid("H", "dimension does not match the state"));
    }
    let (values, vectors) = hermitian_eigen(h.clone())?;
    let tau = t / state.params.epsilon();
    let coeffs = vectors.adjoint() * nalgebra::DVector::from_column_slice(&state.amps);
    let phased = nalgebra::DVector::from_iterator(
        coeffs.len(),
        coeffs.iter().zip(values.iter()).map(|(c, e)| c * C64::from_polar(1.0, -tau * e)),
    );
    Ok(NBodyState {
        amps: (vectors * phased).iter().copied().collect(),
        time: state.time + t,
        ..state.clone()
    })
}

/// Distances between the exact one-particle density and the Hartree-Fock
/// projection at one time.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DistanceReport {
    pub t: f64,
    pub hs: f64,
    pub trace: f64,
    pub n_fluct: f64,
    pub sqrt_n: f64,
    pub n: f64,
}

impl DistanceReport {
    pub fn compare(t: f64, gamma: &DenseOperator, omega: &DenseOperator) -> Result<Self> {
        let diff = gamma.sub(omega)?;
        let norms = diff.norms()?;
        let n = omega.trace().re;
        Ok(Self {
            t,
            hs: norms.hs_norm,
            trace: norms.trace_norm,
            n_fluct: fluctuation_number(gamma.matrix(), omega.matrix())?,
            sqrt_n: n.sqrt(),
            n,
        })
    }
}

pub fn distance_csv(rows: &[DistanceReport]) -> String {
    let mut out = String::from("t,hs,trace,n_fluct,sqrtN,N\n");
    for r in rows {
        out.push_str(&format!(
            "{:e},{:e},{:e},{:e},{:e},{:e}\n",
            r.t, r.hs, r.trace, r.n_fluct, r.sqrt_n, r.n
        ));
    }
    out
}

/// Exact and Hartree-Fock evolution from the same Slater data, compared
/// every `sample_every` steps (and at `t = 0`).
pub fn hf_exact_probe(
    initial: &SlaterState,
    potential: &PowerLawPotential,
    dt: f64,
    steps: usize,
    sample_every: usize,
) -> Result<Vec<DistanceReport>> {
    let n = initial.n_particles();
    let grid = *initial.grid();
    match n {
        2 if grid.dim() == 1 && grid.sites_per_axis() <= 64 => {}
        3 if grid.dim() == 1 && grid.sites_per_axis() <= 16 => {}
        _ => {
            return Err(invalid(
                "scenario",
                "probe supports d = 1 with N = 2 (M <= 64) or N = 3 (M <= 16)",
            ))
        }
    }
    if sample_every == 0 {
        return Err(invalid("sample_every", "must be positive"));
    }
    let prop = NBodyPropagator::new(grid, *initial.params(), potential, dt)?;
    let mut exact = NBodyState::from_slater(initial)?;
    let mut hf = initial.clone();
    let mut rows = vec![DistanceReport::compare(0.0, &reduced_density(&exact)?, &density_matrix(&hf)?)?];
    for k in 1..=steps {
        exact = prop.step(&exact)?;
        hf = hf_step(&hf, potential, dt)?;
        if k % sample_every == 0 || k == steps {
            rows.push(DistanceReport::compare(
                k as f64 * dt,
                &reduced_density(&exact)?,
                &density_matrix(&hf)?,
            )?);
        }
    }
    Ok(rows)
}

/// Orbital product `f_1(x_1) ... f_N(x_N)` in site amplitudes, without
/// antisymmetrization.
pub fn product_amplitudes(orbitals: &[ComplexField]) -> Result<Vec<C64>> {
    let first = orbitals.first().ok_or_else(|| invalid("orbitals", "need at least one orbital"))?;
    let grid = *first.grid();
    let n = orbitals.len();
    let total = config_len(&grid, n)?;
    let cols: Vec<Vec<C64>> = orbitals.iter().map(|f| f.site_amplitudes()).collect();
    Ok((0..total)
        .map(|idx| {
            decode(idx, grid.len(), n)
                .iter()
                .zip(&cols)
                .map(|(&s, c)| c[s])
                .product()
        })
        .collect())
}

#[cfg(test)]
mod tests;
