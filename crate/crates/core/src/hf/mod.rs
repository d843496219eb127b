//! Time-dependent Hartree-Fock propagation of Slater states.
//!
//! Orbitals obey `i eps d_t f_j = (-eps^2 Lap + V*rho - X) f_j` with
//! `rho = N^{-1} sum_j |f_j|^2` and the exchange operator
//! `(X g)(x) = N^{-1} sum_i f_i(x) (V * (conj(f_i) g))(x)`.

mod checkpoint;
mod presets;

pub use checkpoint::{read_checkpoint, write_checkpoint, CHECKPOINT_MAGIC};
pub use presets::{
    fermi_ball, gaussian_packets, phase_space_lattice, random_slater, separated_packets, PacketCenter,
};

use nalgebra::DMatrix;
use num_complex::Complex64 as C64;

use crate::error::{invalid, Error, Result};
use crate::lattice::dense::hermitian_eigen;
use crate::lattice::krylov::expm_apply;
use crate::lattice::{apply_kinetic, fft_axes, ifft_axes, inner, ComplexField, DenseOperator, Grid, ScaledParams};
use crate::potentials::PowerLawPotential;

/// Gram defect accepted when a state is constructed.
pub const GRAM_TOLERANCE: f64 = 1e-8;
/// Gram defect after a step beyond which propagation aborts.
pub const DRIFT_ABORT: f64 = 1e-6;
/// Largest admissible `dt * max(eps^2 |k|^2) / eps`.
///
/// The kinetic flow is applied exactly, so this is an accuracy guard for
/// the splitting rather than a stability bound.
pub const KINETIC_PHASE_LIMIT: f64 = 1.0e3;
/// Relative accuracy of the Krylov mean-field exponential.
pub const KRYLOV_TOL: f64 = 1e-13;

/// `N` orthonormal orbitals spanning the range of `omega`.
#[derive(Debug, Clone, PartialEq)]
pub struct SlaterState {
    grid: Grid,
    orbitals: Vec<ComplexField>,
    params: ScaledParams,
    time: f64,
}

impl SlaterState {
    /// Validates orthonormality to [`GRAM_TOLERANCE`].
    pub fn new(grid: Grid, orbitals: Vec<ComplexField>, params: ScaledParams, time: f64) -> Result<Self> {
        let state = Self::unchecked(grid, orbitals, params, time)?;
        let defect = state.gram_defect();
        if defect > GRAM_TOLERANCE {
            return Err(invalid("orbitals", format!("Gram defect {defect:.3e} exceeds {GRAM_TOLERANCE:e}")));
        }
        Ok(state)
    }

    /// Löwdin-orthonormalizes arbitrary linearly independent orbitals.
    pub fn orthonormalized(grid: Grid, orbitals: Vec<ComplexField>, params: ScaledParams, time: f64) -> Result<Self> {
        let mut state = Self::unchecked(grid, orbitals, params, time)?;
        state.lowdin()?;
        Ok(state)
    }

    fn unchecked(grid: Grid, orbitals: Vec<ComplexField>, params: ScaledParams, time: f64) -> Result<Self> {
        if orbitals.len() != params.n_particles() {
            return Err(invalid(
                "orbitals",
                format!("{} orbitals for N = {}", orbitals.len(), params.n_particles()),
            ));
        }
        if orbitals.len() > grid.len() {
            return Err(invalid("orbitals", "more orbitals than grid sites"));
        }
        if orbitals.iter().any(|f| *f.grid() != grid) {
            return Err(Error::GridMismatch);
        }
        if !time.is_finite() {
            return Err(invalid("t", "time must be finite"));
        }
        Ok(Self {
            grid,
            orbitals,
            params,
            time,
        })
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn orbitals(&self) -> &[ComplexField] {
        &self.orbitals
    }

    pub fn params(&self) -> &ScaledParams {
        &self.params
    }

    pub fn time(&self) -> f64 {
        self.time
    }

    pub fn n_particles(&self) -> usize {
        self.orbitals.len()
    }

    pub fn with_time(mut self, time: f64) -> Self {
        self.time = time;
        self
    }

    /// `G_ij = <f_i, f_j>`.
    pub fn gram(&self) -> DMatrix<C64> {
        let n = self.orbitals.len();
        DMatrix::from_fn(n, n, |i, j| {
            inner(&self.orbitals[i], &self.orbitals[j]).expect("orbitals share the grid")
        })
    }

    /// Largest entry of `G - 1`.
    pub fn gram_defect(&self) -> f64 {
        let g = self.gram();
        let n = g.nrows();
        let mut worst: f64 = 0.0;
        for i in 0..n {
            for j in 0..n {
                let target = if i == j { 1.0 } else { 0.0 };
                worst = worst.max((g[(i, j)] - target).norm());
            }
        }
        worst
    }

    /// Replaces the orbitals by `F G^{-1/2}`, which leaves the spanned
    /// subspace unchanged.
    fn lowdin(&mut self) -> Result<()> {
        let g = self.gram();
        let (vals, vecs) = hermitian_eigen(g)?;
        if vals.iter().any(|&v| v <= 1e-12) {
            return Err(invalid("orbitals", "orbitals are linearly dependent"));
        }
        let inv_sqrt = DMatrix::from_diagonal(&vals.map(|v| C64::new(1.0 / v.sqrt(), 0.0)));
        let s = &vecs * inv_sqrt * vecs.adjoint();
        let n = self.orbitals.len();
        let mut fresh = vec![ComplexField::zeros(self.grid); n];
        for (j, out) in fresh.iter_mut().enumerate() {
            for i in 0..n {
                out.axpy(s[(i, j)], &self.orbitals[i])?;
            }
        }
        self.orbitals = fresh;
        Ok(())
    }

    /// Position density `rho(x) = N^{-1} sum_j |f_j(x)|^2`, integrating to 1.
    pub fn density(&self) -> Vec<f64> {
        let inv_n = self.params.coupling();
        let mut rho = vec![0.0; self.grid.len()];
        for f in &self.orbitals {
            for (r, v) in rho.iter_mut().zip(f.values()) {
                *r += v.norm_sqr() * inv_n;
            }
        }
        rho
    }

    /// Orbital amplitudes in the orthonormal site basis, one column each.
    pub fn site_columns(&self) -> DMatrix<C64> {
        let n = self.orbitals.len();
        let mut m = DMatrix::zeros(self.grid.len(), n);
        for (j, f) in self.orbitals.iter().enumerate() {
            for (x, v) in f.site_amplitudes().into_iter().enumerate() {
                m[(x, j)] = v;
            }
        }
        m
    }
}

/// `omega = sum_j |f_j><f_j|` as an explicit operator.
pub fn density_matrix(state: &SlaterState) -> Result<DenseOperator> {
    DenseOperator::from_columns(state.grid, &state.site_columns())
}

/// Mean-field quantities frozen at one instant.
#[derive(Debug, Clone)]
pub struct HFFields<'a> {
    potential: &'a PowerLawPotential,
    orbitals: Vec<Vec<C64>>,
    density: Vec<f64>,
    direct: Vec<f64>,
    inv_n: f64,
}

impl<'a> HFFields<'a> {
    pub fn new(state: &SlaterState, potential: &'a PowerLawPotential) -> Result<Self> {
        if *potential.grid() != state.grid {
            return Err(Error::GridMismatch);
        }
        let density = state.density();
        let mut buf: Vec<C64> = density.iter().map(|&r| C64::new(r, 0.0)).collect();
        potential.convolve_in_place(&mut buf);
        let direct = buf.iter().map(|v| v.re).collect();
        Ok(Self {
            potential,
            orbitals: state.orbitals.iter().map(|f| f.values().to_vec()).collect(),
            density,
            direct,
            inv_n: state.params.coupling(),
        })
    }

    /// `rho_t`.
    pub fn density(&self) -> &[f64] {
        &self.density
    }

    /// Direct potential `U_t = V * rho_t`.
    pub fn direct(&self) -> &[f64] {
        &self.direct
    }

    /// Exchange kernel `X_t(x;y) = N^{-1} V(x - y) omega(x;y)` between two sites.
    pub fn exchange_kernel(&self, x: usize, y: usize) -> C64 {
        let omega: C64 = self.orbitals.iter().map(|f| f[x] * f[y].conj()).sum();
        omega * self.potential.between(x, y) * self.inv_n
    }

    /// `X_t g` through `N` convolutions.
    pub fn exchange(&self, g: &[C64]) -> Vec<C64> {
        let mut out = vec![C64::new(0.0, 0.0); g.len()];
        if self.potential.is_off() {
            return out;
        }
        let mut buf = vec![C64::new(0.0, 0.0); g.len()];
        for f in &self.orbitals {
            for ((b, fi), gi) in buf.iter_mut().zip(f).zip(g) {
                *b = fi.conj() * gi;
            }
            self.potential.convolve_in_place(&mut buf);
            for ((o, fi), b) in out.iter_mut().zip(f).zip(&buf) {
                *o += fi * b * self.inv_n;
            }
        }
        out
    }

    /// `(U_t - X_t) g`.
    pub fn mean_field(&self, g: &[C64]) -> Vec<C64> {
        let mut out = self.exchange(g);
        for ((o, u), gi) in out.iter_mut().zip(&self.direct).zip(g) {
            *o = gi * u - *o;
        }
        out
    }
}

/// `h_HF f_j` for every orbital.
pub fn hf_generator(state: &SlaterState, potential: &PowerLawPotential) -> Result<Vec<ComplexField>> {
    let fields = HFFields::new(state, potential)?;
    state
        .orbitals
        .iter()
        .map(|f| {
            let mut out = apply_kinetic(f, &state.params);
            let mf = ComplexField::new(state.grid, fields.mean_field(f.values()))?;
            out.axpy(C64::new(1.0, 0.0), &mf)?;
            Ok(out)
        })
        .collect()
}

/// `E_HF = tr(-eps^2 Lap omega) + (2N)^{-1} int V (omega(x;x) omega(y;y) - |omega(x;y)|^2)`.
pub fn hf_energy(state: &SlaterState, potential: &PowerLawPotential) -> Result<f64> {
    Ok(energy_parts(state, potential)?.total())
}

/// Kinetic, direct and exchange contributions to the HF energy.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EnergyParts {
    pub kinetic: f64,
    pub direct: f64,
    pub exchange: f64,
}

impl EnergyParts {
    pub fn total(&self) -> f64 {
        self.kinetic + self.direct - self.exchange
    }
}

pub fn energy_parts(state: &SlaterState, potential: &PowerLawPotential) -> Result<EnergyParts> {
    let fields = HFFields::new(state, potential)?;
    let hd = state.grid.cell_volume();
    let mut parts = EnergyParts {
        kinetic: 0.0,
        direct: 0.0,
        exchange: 0.0,
    };
    for f in &state.orbitals {
        parts.kinetic += inner(f, &apply_kinetic(f, &state.params))?.re;
        let xf = fields.exchange(f.values());
        let ex: C64 = f.values().iter().zip(&xf).map(|(a, b)| a.conj() * b).sum();
        parts.exchange += 0.5 * hd * ex.re;
    }
    let n = state.n_particles() as f64;
    // (2N)^{-1} int n (V*n) with n = N rho
    let dir: f64 = fields.density.iter().zip(&fields.direct).map(|(r, u)| r * u).sum();
    parts.direct = 0.5 * n * hd * dir;
    Ok(parts)
}

fn kinetic_table(grid: &Grid, params: &ScaledParams) -> Vec<f64> {
    let eps2 = params.epsilon().powi(2);
    (0..grid.len()).map(|s| eps2 * grid.momentum_sq(s)).collect()
}

/// Largest `dt * eps^2 |k|^2 / eps` on the grid.
pub fn kinetic_phase(grid: &Grid, params: &ScaledParams, dt: f64) -> f64 {
    let kmax = std::f64::consts::PI / grid.spacing();
    dt * params.epsilon() * kmax * kmax * grid.dim() as f64
}

fn kinetic_flow(values: &mut [C64], grid: &Grid, table: &[f64], tau: f64, eps: f64) {
    fft_axes(grid, values);
    for (v, e) in values.iter_mut().zip(table) {
        *v *= C64::from_polar(1.0, -tau * e / eps);
    }
    ifft_axes(grid, values);
}

fn mean_field_flow(orbitals: &[Vec<C64>], fields: &HFFields, tau: f64, eps: f64) -> Result<Vec<Vec<C64>>> {
    orbitals
        .iter()
        .map(|v| expm_apply(|g| fields.mean_field(g), v, tau / eps, KRYLOV_TOL))
        .collect()
}

fn with_values(state: &SlaterState, values: &[Vec<C64>]) -> Result<SlaterState> {
    let orbitals = values
        .iter()
        .map(|v| ComplexField::new(state.grid, v.clone()))
        .collect::<Result<Vec<_>>>()?;
    Ok(SlaterState {
        orbitals,
        ..state.clone()
    })
}

/// One second-order step of length `dt`: half kinetic, mean field, half
/// kinetic.
///
/// The mean-field substep is frozen at its own midpoint, found by a predictor
/// half-step from the fields of the substep's initial orbitals. For one
/// orbital the mean field annihilates that orbital, so the step is exactly free.
pub fn hf_step(state: &SlaterState, potential: &PowerLawPotential, dt: f64) -> Result<SlaterState> {
    if !(dt > 0.0 && dt.is_finite()) {
        return Err(invalid("dt", format!("time step must be positive, got {dt}")));
    }
    let phase = kinetic_phase(&state.grid, &state.params, dt);
    if phase > KINETIC_PHASE_LIMIT {
        return Err(invalid(
            "dt",
            format!("kinetic phase per step {phase:.3e} exceeds {KINETIC_PHASE_LIMIT:e}"),
        ));
    }
    let eps = state.params.epsilon();
    let grid = state.grid;
    let table = kinetic_table(&grid, &state.params);
    let mut values: Vec<Vec<C64>> = state.orbitals.iter().map(|f| f.values().to_vec()).collect();
    for v in &mut values {
        kinetic_flow(v, &grid, &table, 0.5 * dt, eps);
    }
    if !potential.is_off() {
        let start = with_values(state, &values)?;
        let fields_start = HFFields::new(&start, potential)?;
        let half = mean_field_flow(&values, &fields_start, 0.5 * dt, eps)?;
        let fields_mid = HFFields::new(&with_values(state, &half)?, potential)?;
        values = mean_field_flow(&values, &fields_mid, dt, eps)?;
    }
    for v in &mut values {
        kinetic_flow(v, &grid, &table, 0.5 * dt, eps);
    }
    let mut next = with_values(state, &values)?.with_time(state.time + dt);
    let drift = next.gram_defect();
    if drift > DRIFT_ABORT {
        return Err(Error::OrthonormalityDrift {
            drift,
            limit: DRIFT_ABORT,
            time: next.time,
        });
    }
    next.lowdin()?;
    Ok(next)
}

/// Runs `steps` steps, calling `observe` on the initial state and after every step.
pub fn evolve(
    state: &SlaterState,
    potential: &PowerLawPotential,
    dt: f64,
    steps: usize,
    mut observe: impl FnMut(usize, &SlaterState) -> Result<()>,
) -> Result<SlaterState> {
    let mut cur = state.clone();
    observe(0, &cur)?;
    for k in 1..=steps {
        cur = hf_step(&cur, potential, dt)?;
        observe(k, &cur)?;
    }
    Ok(cur)
}

/// Exact free propagation `exp(-i t (-eps Lap)) f`.
pub fn free_evolve(f: &ComplexField, params: &ScaledParams, t: f64) -> ComplexField {
    let grid = *f.grid();
    let table = kinetic_table(&grid, params);
    let mut v = f.values().to_vec();
    kinetic_flow(&mut v, &grid, &table, t, params.epsilon());
    ComplexField::new(grid, v).expect("finite")
}
