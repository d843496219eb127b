use super::audit::random_orbitals;
use super::*;
use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn c(re: f64) -> C64 {
    C64::new(re, 0.0)
}

fn random_vector(space: FockSpace, rng: &mut ChaCha8Rng) -> FockVector {
    let amps = (0..space.dim())
        .map(|_| C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
        .collect();
    FockVector::new(space, amps).unwrap().normalized()
}

fn random_unitary(m: usize, rng: &mut ChaCha8Rng) -> DMatrix<C64> {
    random_orbitals(m, m, rng)
}

#[test]
fn canonical_anticommutation_relations() {
    let space = FockSpace::new(5).unwrap();
    let id = FockOperator::identity(space);
    for i in 0..5 {
        let ai = FockOperator::annihilator(space, i).unwrap();
        for j in 0..5 {
            let aj = FockOperator::annihilator(space, j).unwrap();
            let ajs = FockOperator::creator(space, j).unwrap();
            let mixed = ai.anticommutator(&ajs).unwrap();
            let expected = if i == j { id.clone() } else { FockOperator::zero(space) };
            assert!(mixed.sub(&expected).unwrap().max_abs() < 1e-15);
            assert!(ai.anticommutator(&aj).unwrap().max_abs() < 1e-15);
        }
    }
}

#[test]
fn number_operator_is_second_quantized_identity() {
    let space = FockSpace::new(4).unwrap();
    let n = FockOperator::number(space);
    let dg = FockOperator::d_gamma(space, &DMatrix::identity(4, 4)).unwrap();
    assert!(n.sub(&dg).unwrap().max_abs() < 1e-15);
    let mut sum = FockOperator::zero(space);
    for i in 0..4 {
        let a = FockOperator::annihilator(space, i).unwrap();
        sum = sum.add(&a.adjoint().mul(&a).unwrap()).unwrap();
    }
    assert!(n.sub(&sum).unwrap().max_abs() < 1e-15);
}

#[test]
fn ascending_creation_product_has_unit_amplitude() {
    let space = FockSpace::new(6).unwrap();
    let mut v = FockVector::vacuum(space);
    for i in [4, 2, 1] {
        v = v.create(i);
    }
    assert_eq!(v, FockVector::basis(space, 0b010110));
}

#[test]
fn slater_vector_matches_creation_products() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let space = FockSpace::new(6).unwrap();
    for n in 1..=4 {
        let f = random_orbitals(6, n, &mut rng);
        let mut expected = FockVector::vacuum(space);
        for j in (0..n).rev() {
            let col: Vec<C64> = f.column(j).iter().copied().collect();
            expected = expected.create_fn(&col);
        }
        let v = slater_vector(space, &f).unwrap();
        assert!(v.distance(&expected) < 1e-13);
        assert!((v.norm() - 1.0).abs() < 1e-13);
        assert!((v.sector_weight(n) - 1.0).abs() < 1e-13);
    }
}

#[test]
fn slater_one_pdm_is_projection() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let space = FockSpace::new(7).unwrap();
    let f = random_orbitals(7, 3, &mut rng);
    let gamma = one_pdm(&slater_vector(space, &f).unwrap());
    let omega = &f * f.adjoint();
    assert!((gamma - &omega).norm() < 1e-13);
}

#[test]
fn d_gamma_expectation_is_trace_against_one_pdm() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let space = FockSpace::new(5).unwrap();
    let psi = random_vector(space, &mut rng);
    let o = DMatrix::from_fn(5, 5, |_, _| C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)));
    let lhs = psi.inner(&FockOperator::d_gamma(space, &o).unwrap().apply(&psi).unwrap());
    let rhs = (&o * one_pdm(&psi)).trace();
    assert!((lhs - rhs).norm() < 1e-13);
}

#[test]
fn pair_operators_are_adjoint_pairs() {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let space = FockSpace::new(5).unwrap();
    let o = DMatrix::from_fn(5, 5, |_, _| C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)));
    let ann = FockOperator::pair(space, &o, PairKind::Annihilation).unwrap();
    // (sum O_ij a_i a_j)* = sum conj(O_ij) a*_j a*_i.
    let cre = FockOperator::pair(space, &o.adjoint(), PairKind::Creation).unwrap();
    assert!(ann.adjoint().sub(&cre).unwrap().max_abs() < 1e-14);
}

#[test]
fn particle_hole_maps_vacuum_to_slater_state() {
    let space = FockSpace::new(6).unwrap();
    let mut omega = DMatrix::zeros(6, 6);
    for i in [0, 3, 4] {
        omega[(i, i)] = c(1.0);
    }
    let r = particle_hole(space, &omega).unwrap();
    let out = r.apply(&FockVector::vacuum(space)).unwrap();
    assert_eq!(out, FockVector::basis(space, 0b011001));
    let rr = r.adjoint().mul(&r).unwrap();
    assert!(rr.sub(&FockOperator::identity(space)).unwrap().max_abs() < 1e-15);
}

#[test]
fn particle_hole_rejects_non_diagonal_input() {
    let space = FockSpace::new(3).unwrap();
    let mut omega = DMatrix::zeros(3, 3);
    omega[(0, 1)] = c(0.5);
    assert!(matches!(particle_hole(space, &omega), Err(Error::NotDiagonalProjection)));
    let mut half = DMatrix::zeros(3, 3);
    half[(1, 1)] = c(0.5);
    assert!(matches!(particle_hole(space, &half), Err(Error::NotDiagonalProjection)));
}

/// `R* a(g) R = a(u g) + a*(conj(v) conj(g))` applied to random vectors.
fn check_conjugation(space: FockSpace, f: &DMatrix<C64>, r: &FockOperator, rng: &mut ChaCha8Rng) {
    let m = space.modes();
    let omega = f * f.adjoint();
    let u = DMatrix::<C64>::identity(m, m) - &omega;
    let v_bar = f * f.transpose();
    for _ in 0..4 {
        let g: Vec<C64> = (0..m)
            .map(|_| C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
            .collect();
        let gv = nalgebra::DVector::from_vec(g.clone());
        let ug: Vec<C64> = (&u * &gv).iter().copied().collect();
        let g_bar = gv.map(|z| z.conj());
        let vg: Vec<C64> = (&v_bar * g_bar).iter().copied().collect();
        let psi = random_vector(space, rng);
        let lhs = r.adjoint().apply(&r.apply(&psi).unwrap().annihilate_fn(&g)).unwrap();
        let mut rhs = psi.annihilate_fn(&ug);
        let extra = psi.create_fn(&vg);
        for (a, b) in rhs.amplitudes_mut().iter_mut().zip(extra.amplitudes()) {
            *a += b;
        }
        assert!(lhs.distance(&rhs) < 1e-12, "defect {}", lhs.distance(&rhs));
    }
}

#[test]
fn particle_hole_conjugation_identity_diagonal() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let space = FockSpace::new(5).unwrap();
    let occupied = [1usize, 2, 4];
    let mut f = DMatrix::zeros(5, 3);
    let mut omega = DMatrix::zeros(5, 5);
    for (j, &i) in occupied.iter().enumerate() {
        f[(i, j)] = c(1.0);
        omega[(i, i)] = c(1.0);
    }
    let r = particle_hole(space, &omega).unwrap();
    check_conjugation(space, &f, &r, &mut rng);
}

#[test]
fn particle_hole_conjugation_identity_general() {
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    let space = FockSpace::new(5).unwrap();
    let f = random_orbitals(5, 2, &mut rng);
    let r = particle_hole_general(space, &f).unwrap();
    let out = r.apply(&FockVector::vacuum(space)).unwrap();
    assert!(out.distance(&slater_vector(space, &f).unwrap()) < 1e-13);
    check_conjugation(space, &f, &r, &mut rng);
}

#[test]
fn lifted_unitary_properties() {
    let mut rng = ChaCha8Rng::seed_from_u64(13);
    let space = FockSpace::new(5).unwrap();
    let w1 = random_unitary(5, &mut rng);
    let w2 = random_unitary(5, &mut rng);
    let g1 = lift_unitary(space, &w1).unwrap();
    let g2 = lift_unitary(space, &w2).unwrap();
    let g12 = lift_unitary(space, &(&w1 * &w2)).unwrap();
    assert!(g1.mul(&g2).unwrap().sub(&g12).unwrap().max_abs() < 1e-13);
    assert!(g1
        .mul(&g1.adjoint())
        .unwrap()
        .sub(&FockOperator::identity(space))
        .unwrap()
        .max_abs()
        < 1e-13);
    let vac = FockVector::vacuum(space);
    assert!(g1.apply(&vac).unwrap().distance(&vac) < 1e-15);
    // Gamma(W) a*(f) Gamma(W)* = a*(W f).
    let f: Vec<C64> = (0..5).map(|_| C64::new(rng.gen_range(-1.0..1.0), 0.3)).collect();
    let wf: Vec<C64> = (&w1 * nalgebra::DVector::from_vec(f.clone())).iter().copied().collect();
    let psi = random_vector(space, &mut rng);
    let lhs = g1.apply(&g1.adjoint().apply(&psi).unwrap().create_fn(&f)).unwrap();
    assert!(lhs.distance(&psi.create_fn(&wf)) < 1e-12);
}

#[test]
fn lift_rejects_non_unitary() {
    let space = FockSpace::new(3).unwrap();
    let w = DMatrix::from_element(3, 3, c(1.0));
    assert!(matches!(lift_unitary(space, &w), Err(Error::NotUnitary(_))));
}

#[test]
fn first_bound_saturates_for_identity_on_basis_state() {
    let space = FockSpace::new(6).unwrap();
    let psi = FockVector::basis(space, 0b101101);
    let dg = FockOperator::d_gamma(space, &DMatrix::identity(6, 6)).unwrap();
    let lhs = psi.inner(&dg.apply(&psi).unwrap()).re;
    assert_eq!(lhs, 4.0);
    assert_eq!(psi.number_expectation(), 4.0);
}

#[test]
fn printed_creation_pair_bound_fails_on_vacuum() {
    let space = FockSpace::new(2).unwrap();
    let mut o = DMatrix::zeros(2, 2);
    o[(0, 1)] = c(1.0);
    o[(1, 0)] = c(-1.0);
    let vac = FockVector::vacuum(space);
    let lhs = FockOperator::pair(space, &o, PairKind::Creation)
        .unwrap()
        .apply(&vac)
        .unwrap()
        .norm();
    assert!((lhs - 2.0).abs() < 1e-15);
    let hs = o.norm();
    assert_eq!(hs * vac.number_function(f64::sqrt).norm(), 0.0);
    assert!((hs * vac.number_function(|n| (n + 1.0).sqrt()).norm() - 2f64.sqrt()).abs() < 1e-15);
    assert!((hs * vac.number_function(|n| (n + 2.0).sqrt()).norm() - 2.0).abs() < 1e-15);
}

#[test]
fn audit_has_no_gated_violations() {
    let report = second_quantization_audit(300, 5, 21).unwrap();
    assert!(report.passed(), "{}", report.to_csv());
    assert!(report.row(BoundId::PairCreationHsPrinted).unwrap().violations > 0);
    let csv = report.to_csv();
    assert!(csv.starts_with("bound_id,trials,max_slack"));
    assert_eq!(csv.lines().count(), 1 + BoundId::ALL.len());
}

#[test]
fn audit_trials_are_prefix_stable() {
    let a = second_quantization_audit(20, 4, 9).unwrap();
    let b = second_quantization_audit(20, 4, 9).unwrap();
    assert_eq!(a, b);
    let c = second_quantization_audit(10, 4, 9).unwrap();
    for (long, short) in a.rows.iter().zip(&c.rows) {
        assert!(long.max_slack >= short.max_slack);
    }
}

#[test]
fn b_operator_bound_random_slater_cases() {
    let mut worst: f64 = f64::NEG_INFINITY;
    for case in 0..30 {
        let t = b_bound_trial(6, 77, case).unwrap();
        assert!(t.lhs <= t.rhs_kernel + 1e-10);
        worst = worst.max(t.lhs - t.rhs);
    }
    assert!(worst <= 1e-10, "worst slack {worst}");
}

#[test]
fn two_site_hamiltonian_energy() {
    let params = crate::lattice::ScaledParams::with_epsilon(2, 1.0, 0.5).unwrap();
    let lattice = ModeLattice::ring(2, 2.0, params, true).unwrap();
    let h = second_quantized_hamiltonian(&lattice).unwrap();
    let full = h.sector_matrix(2);
    let k = std::f64::consts::PI;
    let expected = 0.25 * k * k + 0.5 * 1.0;
    assert!((full[(0, 0)].re - expected).abs() < 1e-13);
    let one = h.sector_matrix(1);
    assert!((one - lattice.kinetic()).norm() < 1e-14);
    assert!(h.conserves_number());
    assert!(h.sub(&h.adjoint()).unwrap().max_abs() < 1e-14);
}

#[test]
fn grid_lattice_matches_ring_lattice() {
    let params = crate::lattice::ScaledParams::new(2, 0.5).unwrap();
    let grid = crate::lattice::Grid::new(1, 8, 8.0).unwrap();
    let pot = crate::potentials::PowerLawPotential::new(grid, 0.5).unwrap();
    let a = ModeLattice::from_grid(&pot, params).unwrap();
    let b = ModeLattice::ring(8, 8.0, params, true).unwrap();
    assert!((a.kinetic() - b.kinetic()).norm() < 1e-13);
    assert!((a.pair() - b.pair()).norm() < 1e-13);
}

#[test]
fn exact_propagator_is_unitary_and_composes() {
    let mut rng = ChaCha8Rng::seed_from_u64(31);
    let params = crate::lattice::ScaledParams::new(3, 1.0).unwrap();
    let lattice = ModeLattice::ring(6, 6.0, params, true).unwrap();
    let h = second_quantized_hamiltonian(&lattice).unwrap();
    let prop = ExactPropagator::new(&h, params.epsilon()).unwrap();
    let psi = random_vector(FockSpace::new(6).unwrap(), &mut rng);
    let once = prop.propagate(&psi, 0.7).unwrap();
    let twice = prop.propagate(&prop.propagate(&psi, 0.3).unwrap(), 0.4).unwrap();
    assert!((once.norm() - 1.0).abs() < 1e-13);
    assert!(once.distance(&twice) < 1e-12);
    let e0 = psi.inner(&h.apply(&psi).unwrap()).re;
    let e1 = once.inner(&h.apply(&once).unwrap()).re;
    assert!((e0 - e1).abs() < 1e-12);
    for n in 0..=6 {
        assert!((psi.sector_weight(n) - once.sector_weight(n)).abs() < 1e-13);
    }
}

#[test]
fn free_ring_has_no_fluctuations() {
    let run = fluctuation_growth_run(RingSetup {
        sites: 8,
        particles: 2,
        alpha: 0.5,
        length: 8.0,
        t_final: 1.0,
        steps: 10,
        interacting: false,
    })
    .unwrap();
    for r in &run.rows {
        assert!(r.n_fluct.abs() < 1e-9 && r.n_fock.abs() < 1e-9 && r.hs_distance < 1e-9);
    }
}

#[test]
fn interacting_ring_fluctuation_identity() {
    let run = fluctuation_growth_run(RingSetup {
        sites: 8,
        particles: 2,
        alpha: 0.5,
        length: 8.0,
        t_final: 1.0,
        steps: 20,
        interacting: true,
    })
    .unwrap();
    assert!(run.identity_defect() < 1e-10, "{}", run.identity_defect());
    assert!(run.rows[0].n_fluct.abs() < 1e-12);
    assert!(run.rows.last().unwrap().n_fluct > 1e-8);
    for r in &run.rows {
        assert!(r.hs_distance.powi(2) <= r.n_fluct + 1e-10);
    }
    assert!(run.to_csv().starts_with("t,n_fluct,hs_distance\n"));
}

#[test]
fn fluctuation_identity_random_cases() {
    for case in 0..20 {
        let (formula, fock) = fluctuation_identity_case(6, 40, case).unwrap();
        assert!((formula - fock).abs() < 1e-10, "{formula} {fock}");
    }
}

#[test]
fn particle_hole_suite_is_exact() {
    let suite = particle_hole_suite(6, 3, 21, 4).unwrap();
    assert!(suite.car < 1e-15);
    assert!(suite.worst() < 1e-12, "{suite:?}");
    assert!(particle_hole_suite(6, 0, 21, 1).is_err());
}
