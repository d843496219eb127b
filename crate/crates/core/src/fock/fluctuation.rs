use nalgebra::DMatrix;
use num_complex::Complex64 as C64;

use super::{
    particle_hole_general, second_quantized_hamiltonian, slater_vector, ExactPropagator, FockSpace, FockVector,
    ModeLattice, ModeOperator,
};
use crate::error::{invalid, Result};
use crate::hf::{fermi_ball, hf_step, SlaterState};
use crate::lattice::{Grid, ScaledParams};
use crate::potentials::PowerLawPotential;

/// One-particle reduced density `gamma_xy = <Psi, a*_y a_x Psi>`.
pub fn one_pdm(psi: &FockVector) -> ModeOperator {
    let m = psi.space().modes();
    let lowered: Vec<FockVector> = (0..m).map(|i| psi.annihilate(i)).collect();
    DMatrix::from_fn(m, m, |x, y| lowered[y].inner(&lowered[x]))
}

/// `tr gamma + tr omega - 2 Re tr(omega gamma)`, the expected number of
/// particle-hole excitations of `Psi` relative to the projection `omega`.
pub fn fluctuation_number(gamma: &ModeOperator, omega: &ModeOperator) -> Result<f64> {
    if gamma.shape() != omega.shape() || gamma.nrows() != gamma.ncols() {
        return Err(invalid("gamma", "gamma and omega must be square of equal size"));
    }
    Ok(gamma.trace().re + omega.trace().re - 2.0 * (omega * gamma).trace().re)
}

/// `||gamma - omega||_HS`.
pub fn hs_distance(gamma: &ModeOperator, omega: &ModeOperator) -> Result<f64> {
    if gamma.shape() != omega.shape() {
        return Err(invalid("gamma", "shape mismatch"));
    }
    Ok((gamma - omega).norm())
}

/// Ring of `M` sites carrying a translation-invariant Slater state.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RingSetup {
    pub sites: usize,
    pub particles: usize,
    pub alpha: f64,
    pub length: f64,
    pub t_final: f64,
    pub steps: usize,
    pub interacting: bool,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FluctuationRow {
    pub t: f64,
    /// From the one-particle formula.
    pub n_fluct: f64,
    /// `<R* Psi, N R* Psi>` computed in Fock space.
    pub n_fock: f64,
    pub hs_distance: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct FluctuationRun {
    pub setup: RingSetup,
    pub rows: Vec<FluctuationRow>,
}

impl FluctuationRun {
    /// Largest gap between the one-particle formula and the Fock-space value.
    pub fn identity_defect(&self) -> f64 {
        self.rows.iter().fold(0.0, |m, r| m.max((r.n_fluct - r.n_fock).abs()))
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("t,n_fluct,hs_distance\n");
        for r in &self.rows {
            out.push_str(&format!("{:e},{:e},{:e}\n", r.t, r.n_fluct, r.hs_distance));
        }
        out
    }
}

/// Exact Fock evolution of the ring Fermi ball against its Hartree-Fock
/// trajectory on the same lattice.
///
/// The Hartree-Fock side runs on a one-dimensional grid, so `M` must be a
/// grid-admissible size within the Fock mode cap (in practice `M = 8`).
pub fn fluctuation_growth_run(setup: RingSetup) -> Result<FluctuationRun> {
    if setup.steps == 0 || !(setup.t_final >= 0.0) {
        return Err(invalid("steps", "need at least one step and T >= 0"));
    }
    let grid = Grid::new(1, setup.sites, setup.length)?;
    let space = FockSpace::new(setup.sites)?;
    let params = ScaledParams::new(setup.particles, setup.alpha)?;
    let potential = if setup.interacting {
        PowerLawPotential::new(grid, setup.alpha)?
    } else {
        PowerLawPotential::off(grid, setup.alpha)?
    };
    let lattice = ModeLattice::from_grid(&potential, params)?;
    let hamiltonian = second_quantized_hamiltonian(&lattice)?;
    let propagator = ExactPropagator::new(&hamiltonian, params.epsilon())?;

    let mut hf: SlaterState = fermi_ball(grid, params)?;
    let psi0 = slater_vector(space, &hf.site_columns())?;
    let dt = setup.t_final / setup.steps as f64;
    let mut rows = Vec::with_capacity(setup.steps + 1);
    for k in 0..=setup.steps {
        if k > 0 && dt > 0.0 {
            hf = hf_step(&hf, &potential, dt)?;
        }
        let t = k as f64 * dt;
        let psi = propagator.propagate(&psi0, t)?;
        rows.push(fluctuation_row(t, &psi, &hf.site_columns())?);
    }
    Ok(FluctuationRun { setup, rows })
}

fn fluctuation_row(t: f64, psi: &FockVector, orbitals: &DMatrix<C64>) -> Result<FluctuationRow> {
    let gamma = one_pdm(psi);
    let omega = orbitals * orbitals.adjoint();
    let r = particle_hole_general(psi.space(), orbitals)?;
    let excited = r.adjoint().apply(psi)?;
    Ok(FluctuationRow {
        t,
        n_fluct: fluctuation_number(&gamma, &omega)?,
        n_fock: excited.number_expectation(),
        hs_distance: hs_distance(&gamma, &omega)?,
    })
}

/// Formula and Fock-space values of the fluctuation number for a random
/// normalized `Psi` and a random rank-`N` projection, drawn from ChaCha8
/// stream `case` of `seed`.
pub fn fluctuation_identity_case(modes: usize, seed: u64, case: u64) -> Result<(f64, f64)> {
    use rand::{Rng, SeedableRng};
    let space = FockSpace::new(modes)?;
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(case);
    let n = rng.gen_range(1..modes);
    let orbitals = super::audit::random_orbitals(modes, n, &mut rng);
    let amps = (0..space.dim())
        .map(|_| C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
        .collect();
    let psi = FockVector::new(space, amps)?.normalized();
    let row = fluctuation_row(0.0, &psi, &orbitals)?;
    Ok((row.n_fluct, row.n_fock))
}
