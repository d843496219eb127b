use super::*;
use crate::fock::{
    one_pdm, second_quantized_hamiltonian, ExactPropagator, ModeLattice,
};
use crate::hf::{free_evolve, random_slater, separated_packets};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn grid1(m: usize, l: f64) -> Grid {
    Grid::new(1, m, l).unwrap()
}

fn random_antisymmetric(grid: Grid, params: ScaledParams, rng: &mut ChaCha8Rng) -> NBodyState {
    let total = grid.len().pow(params.n_particles() as u32);
    let raw: Vec<C64> = (0..total)
        .map(|_| C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
        .collect();
    NBodyState::antisymmetrize(grid, params, &raw).unwrap()
}

#[test]
fn permutation_signs() {
    let perms = permutations(3);
    assert_eq!(perms.len(), 6);
    assert_eq!(perms.iter().map(|p| p.1).sum::<f64>(), 0.0);
    for (p, s) in &perms {
        let mut inversions = 0;
        for i in 0..3 {
            for j in i + 1..3 {
                if p[i] > p[j] {
                    inversions += 1;
                }
            }
        }
        assert_eq!(*s, if inversions % 2 == 0 { 1.0 } else { -1.0 });
    }
}

#[test]
fn symmetric_input_has_no_antisymmetric_part() {
    let grid = grid1(8, 4.0);
    let params = ScaledParams::new(2, 1.0).unwrap();
    let raw: Vec<C64> = (0..64).map(|i| C64::new(((i / 8) + (i % 8)) as f64, 0.0)).collect();
    assert!(matches!(
        NBodyState::antisymmetrize(grid, params, &raw),
        Err(Error::ZeroAntisymmetricPart)
    ));
}

#[test]
fn slater_reduced_density_is_orbital_projection() {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let grid = grid1(16, 4.0);
    let params = ScaledParams::new(2, 1.0).unwrap();
    let slater = random_slater(grid, params, &mut rng).unwrap();
    let psi = NBodyState::from_slater(&slater).unwrap();
    assert!((psi.norm() - 1.0).abs() < 1e-12);
    assert!(psi.swap_residual(0, 1) < 1e-12);
    // Explicit partial trace over the second particle.
    let a = psi.amplitudes();
    let g = 16;
    let mut gamma = DMatrix::<C64>::zeros(g, g);
    for x in 0..g {
        for y in 0..g {
            for z in 0..g {
                gamma[(x, y)] += 2.0 * a[x * g + z] * a[y * g + z].conj();
            }
        }
    }
    let cols = slater.site_columns();
    let omega = &cols * cols.adjoint();
    assert!((&gamma - &omega).norm() < 1e-10);
    assert!((reduced_density(&psi).unwrap().matrix() - omega).norm() < 1e-10);
}

#[test]
fn slater_amplitudes_are_scaled_determinants() {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let grid = grid1(8, 4.0);
    let params = ScaledParams::new(3, 1.0).unwrap();
    let slater = random_slater(grid, params, &mut rng).unwrap();
    let psi = NBodyState::from_slater(&slater).unwrap();
    let cols = slater.site_columns();
    for sites in [[0usize, 1, 2], [5, 3, 7], [6, 6, 1]] {
        let minor = DMatrix::from_fn(3, 3, |i, j| cols[(sites[i], j)]);
        let expected = minor.determinant() / 6f64.sqrt();
        let got = psi.amplitudes()[sites[0] * 64 + sites[1] * 8 + sites[2]];
        assert!((got - expected).norm() < 1e-13);
    }
}

#[test]
fn random_state_density_bounds() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let grid = grid1(8, 4.0);
    let params = ScaledParams::new(3, 1.0).unwrap();
    let psi = random_antisymmetric(grid, params, &mut rng);
    assert!(psi.antisymmetry_defect() < 1e-12);
    let gamma = reduced_density(&psi).unwrap();
    assert!((gamma.trace().re - 3.0).abs() < 1e-9);
    assert!(gamma.is_hermitian());
    for e in gamma.hermitian_eigenvalues().unwrap() {
        assert!((-1e-9..=1.0 + 1e-9).contains(&e));
    }
}

#[test]
fn free_slater_stays_factorized() {
    let grid = grid1(32, 8.0);
    let params = ScaledParams::new(2, 1.0).unwrap();
    let slater = separated_packets(grid, params, 0.5, 4.0).unwrap();
    let off = PowerLawPotential::off(grid, 1.0).unwrap();
    let prop = NBodyPropagator::new(grid, params, &off, 0.05).unwrap();
    let mut psi = NBodyState::from_slater(&slater).unwrap();
    for _ in 0..10 {
        psi = prop.step(&psi).unwrap();
    }
    let moved: Vec<ComplexField> = slater.orbitals().iter().map(|f| free_evolve(f, &params, 0.5)).collect();
    let target = NBodyState::from_slater(&SlaterState::new(grid, moved, params, 0.5).unwrap()).unwrap();
    let err: f64 = psi
        .amplitudes()
        .iter()
        .zip(target.amplitudes())
        .map(|(a, b)| (a - b).norm_sqr())
        .sum::<f64>()
        .sqrt();
    assert!(err < 1e-10, "{err}");
}

#[test]
fn strang_matches_dense_exponential() {
    let grid = grid1(8, 4.0);
    let params = ScaledParams::new(2, 0.5).unwrap();
    let pot = PowerLawPotential::new(grid, 0.5).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let slater = random_slater(grid, params, &mut rng).unwrap();
    let psi0 = NBodyState::from_slater(&slater).unwrap();
    let h = nbody_hamiltonian(grid, params, &pot).unwrap();
    assert!((&h - h.adjoint()).norm() < 1e-12);
    let exact = dense_propagate(&h, &psi0, 0.2).unwrap();
    let prop = NBodyPropagator::new(grid, params, &pot, 1e-4).unwrap();
    let mut psi = psi0.clone();
    for _ in 0..2000 {
        psi = prop.step(&psi).unwrap();
    }
    let err: f64 = psi
        .amplitudes()
        .iter()
        .zip(exact.amplitudes())
        .map(|(a, b)| (a - b).norm_sqr())
        .sum::<f64>()
        .sqrt();
    assert!(err < 1e-8, "{err}");
    let e_dense = {
        let v = nalgebra::DVector::from_column_slice(psi0.amplitudes());
        (v.adjoint() * &h * &v)[(0, 0)].re
    };
    assert!((e_dense - nbody_energy(&psi0, &pot).unwrap()).abs() < 1e-12);
}

#[test]
fn two_body_matches_fock_space() {
    let grid = grid1(8, 8.0);
    let params = ScaledParams::new(2, 0.5).unwrap();
    let pot = PowerLawPotential::new(grid, 0.5).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let psi = random_antisymmetric(grid, params, &mut rng);
    let fock = psi.to_fock().unwrap();
    assert!((fock.norm() - 1.0).abs() < 1e-12);
    let gamma_fock = one_pdm(&fock);
    assert!((reduced_density(&psi).unwrap().matrix() - &gamma_fock).norm() < 1e-10);

    let h = nbody_hamiltonian(grid, params, &pot).unwrap();
    let exact = dense_propagate(&h, &psi, 0.7).unwrap();
    let lattice = ModeLattice::from_grid(&pot, params).unwrap();
    let fock_prop = ExactPropagator::new(&second_quantized_hamiltonian(&lattice).unwrap(), params.epsilon()).unwrap();
    let evolved = fock_prop.propagate(&fock, 0.7).unwrap();
    assert!(exact.to_fock().unwrap().distance(&evolved) < 1e-10);
}

#[test]
fn probe_starts_at_zero_and_stays_zero_without_interaction() {
    let grid = grid1(64, 8.0);
    let params = ScaledParams::new(2, 1.0).unwrap();
    let slater = separated_packets(grid, params, 0.5, 4.0).unwrap();
    let off = PowerLawPotential::off(grid, 1.0).unwrap();
    let rows = hf_exact_probe(&slater, &off, 1e-2, 100, 10).unwrap();
    assert_eq!(rows.len(), 11);
    for r in &rows {
        assert!(r.hs < 1e-9 && r.trace < 1e-9 && r.n_fluct.abs() < 1e-9, "{r:?}");
        assert!((r.n - 2.0).abs() < 1e-9);
    }
}

#[test]
fn probe_fluctuations_dominate_hs_distance() {
    let grid = grid1(64, 8.0);
    let params = ScaledParams::new(2, 0.5).unwrap();
    let slater = separated_packets(grid, params, 0.5, 4.0).unwrap();
    let pot = PowerLawPotential::new(grid, 0.5).unwrap();
    let rows = hf_exact_probe(&slater, &pot, 1e-3, 1000, 100).unwrap();
    assert!(rows[0].hs < 1e-12);
    for r in &rows {
        assert!(r.hs * r.hs <= r.n_fluct + 1e-8);
        assert!(r.hs <= r.trace + 1e-12);
    }
    assert!(rows.last().unwrap().hs > 1e-6);
    assert!(distance_csv(&rows).starts_with("t,hs,trace,n_fluct,sqrtN,N\n"));
}

fn energy_drift(scheme: SplitScheme, dt: f64) -> f64 {
    let grid = grid1(64, 8.0);
    let params = ScaledParams::new(2, 1.0).unwrap();
    let slater = separated_packets(grid, params, 0.5, 4.0).unwrap();
    let pot = PowerLawPotential::new(grid, 1.0).unwrap();
    let prop = NBodyPropagator::with_scheme(grid, params, &pot, dt, scheme).unwrap();
    let mut psi = NBodyState::from_slater(&slater).unwrap();
    let e0 = nbody_energy(&psi, &pot).unwrap();
    let steps = (1.0 / dt).round() as usize;
    let mut worst: f64 = 0.0;
    for k in 1..=steps {
        psi = prop.step(&psi).unwrap();
        if k % (steps / 20) == 0 {
            worst = worst.max(((nbody_energy(&psi, &pot).unwrap() - e0) / e0).abs());
        }
    }
    assert!(psi.antisymmetry_defect() < 1e-8);
    assert!((psi.norm() - 1.0).abs() < 1e-10);
    worst
}

#[test]
fn strang_energy_drift_is_second_order() {
    let coarse = energy_drift(SplitScheme::Strang, 1e-3);
    let fine = energy_drift(SplitScheme::Strang, 5e-4);
    assert!(coarse < 1e-6, "{coarse:e}");
    let ratio = coarse / fine;
    assert!((3.3..=4.7).contains(&ratio), "{ratio}");
}

#[test]
fn fourth_order_energy_drift_below_1e8() {
    let drift = energy_drift(SplitScheme::Yoshida4, 1e-3);
    assert!(drift < 1e-8, "{drift:e}");
}

#[test]
fn size_cap_is_enforced() {
    let grid = Grid::new(2, 64, 1.0).unwrap();
    let params = ScaledParams::new(2, 1.0).unwrap();
    assert!(matches!(
        NBodyState::antisymmetrize(grid, params, &[]),
        Err(Error::CapExceeded { .. })
    ));
}
