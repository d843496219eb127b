use nalgebra::DMatrix;
use num_complex::Complex64 as C64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{slater_vector, FockOperator, FockSpace, FockVector, ModeOperator, PairKind};
use crate::error::{invalid, Result};
use crate::lattice::dense::svd;

/// Violation threshold for the audited inequalities.
pub const SLACK_TOL: f64 = 1e-10;

/// The second-quantization bounds checked by [`second_quantization_audit`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum BoundId {
    /// `<dGamma(O)> <= ||O|| <N>` for `O >= 0`.
    ExpectationPsd,
    /// `|<dGamma(O)>| <= ||O|| <N>` for general `O`.
    ExpectationAbs,
    /// `||dGamma(O) Psi|| <= ||O|| ||N Psi||`.
    DGammaOp,
    /// `||dGamma(O) Psi|| <= ||O||_HS ||N^{1/2} Psi||`.
    DGammaHs,
    /// `||sum O_ij a_i a_j Psi|| <= ||O||_HS ||N^{1/2} Psi||`.
    PairAnnihilationHs,
    /// `||sum O_ij a*_i a*_j Psi|| <= ||O||_HS ||N^{1/2} Psi||`, reported only:
    /// it fails on the vacuum.
    PairCreationHsPrinted,
    /// `||sum O_ij a*_i a*_j Psi|| <= ||O||_HS ||(N+2)^{1/2} Psi||`.
    PairCreationHs,
    /// `||dGamma(O) Psi|| <= 2 tr|O|`.
    DGammaTrace,
    /// `||sum O_ij a_i a_j Psi|| <= 2 tr|O|`.
    PairAnnihilationTrace,
    /// `||sum O_ij a*_i a*_j Psi|| <= 2 tr|O|`.
    PairCreationTrace,
}

impl BoundId {
    pub const ALL: [BoundId; 10] = [
        BoundId::ExpectationPsd,
        BoundId::ExpectationAbs,
        BoundId::DGammaOp,
        BoundId::DGammaHs,
        BoundId::PairAnnihilationHs,
        BoundId::PairCreationHsPrinted,
        BoundId::PairCreationHs,
        BoundId::DGammaTrace,
        BoundId::PairAnnihilationTrace,
        BoundId::PairCreationTrace,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            BoundId::ExpectationPsd => "expectation_psd",
            BoundId::ExpectationAbs => "expectation_abs",
            BoundId::DGammaOp => "dgamma_op",
            BoundId::DGammaHs => "dgamma_hs",
            BoundId::PairAnnihilationHs => "pair_annihilation_hs",
            BoundId::PairCreationHsPrinted => "pair_creation_hs_printed",
            BoundId::PairCreationHs => "pair_creation_hs",
            BoundId::DGammaTrace => "dgamma_trace",
            BoundId::PairAnnihilationTrace => "pair_annihilation_trace",
            BoundId::PairCreationTrace => "pair_creation_trace",
        }
    }

    /// Whether a violation of this bound counts as an audit failure.
    pub fn gated(&self) -> bool {
        !matches!(self, BoundId::PairCreationHsPrinted)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BoundRow {
    pub id: BoundId,
    pub trials: usize,
    /// Largest `LHS - RHS` over all trials.
    pub max_slack: f64,
    pub violations: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SecondQuantizationReport {
    pub modes: usize,
    pub rows: Vec<BoundRow>,
}

impl SecondQuantizationReport {
    /// True when no gated bound is violated beyond [`SLACK_TOL`].
    pub fn passed(&self) -> bool {
        self.rows.iter().all(|r| !r.id.gated() || r.violations == 0)
    }

    pub fn row(&self, id: BoundId) -> Option<&BoundRow> {
        self.rows.iter().find(|r| r.id == id)
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("bound_id,trials,max_slack,violations,gated\n");
        for r in &self.rows {
            out.push_str(&format!(
                "{},{},{:e},{},{}\n",
                r.id.name(),
                r.trials,
                r.max_slack,
                r.violations,
                r.id.gated()
            ));
        }
        out
    }
}

fn uniform_c64<R: Rng>(rng: &mut R) -> C64 {
    C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))
}

fn random_matrix<R: Rng>(rows: usize, cols: usize, rng: &mut R) -> DMatrix<C64> {
    DMatrix::from_fn(rows, cols, |_, _| uniform_c64(rng))
}

/// Random `M x N` matrix with orthonormal columns.
pub(crate) fn random_orbitals<R: Rng>(m: usize, n: usize, rng: &mut R) -> DMatrix<C64> {
    random_matrix(m, n, rng).qr().q()
}

fn random_state<R: Rng>(space: FockSpace, kind: usize, rng: &mut R) -> Result<FockVector> {
    let m = space.modes();
    let v = match kind % 4 {
        0 => FockVector::new(space, (0..space.dim()).map(|_| uniform_c64(rng)).collect())?,
        1 => {
            let n = rng.gen_range(0..=m);
            let amps = (0..space.dim())
                .map(|s| {
                    if s.count_ones() as usize == n {
                        uniform_c64(rng)
                    } else {
                        C64::new(0.0, 0.0)
                    }
                })
                .collect();
            FockVector::new(space, amps)?
        }
        2 => {
            let n = rng.gen_range(1..=m);
            slater_vector(space, &random_orbitals(m, n, rng))?
        }
        _ => {
            // Low particle numbers, vacuum included.
            let amps = (0..space.dim())
                .map(|s| {
                    if s.count_ones() <= 1 {
                        uniform_c64(rng)
                    } else {
                        C64::new(0.0, 0.0)
                    }
                })
                .collect();
            FockVector::new(space, amps)?
        }
    };
    Ok(v.normalized())
}

struct ModeNorms {
    op: f64,
    hs: f64,
    trace: f64,
}

fn mode_norms(o: &ModeOperator) -> Result<ModeNorms> {
    let s = svd(o.clone(), false)?.singular_values;
    Ok(ModeNorms {
        op: s.iter().copied().fold(0.0, f64::max),
        hs: s.iter().map(|x| x * x).sum::<f64>().sqrt(),
        trace: s.iter().sum(),
    })
}

/// Randomized audit of the second-quantization bounds at `M` modes.
///
/// Trial `k` draws from the ChaCha8 stream `k` of `seed`, so results do not
/// depend on the number of trials run before it.
pub fn second_quantization_audit(trials: usize, modes: usize, seed: u64) -> Result<SecondQuantizationReport> {
    let space = FockSpace::new(modes)?;
    space.check_dense()?;
    let mut rows: Vec<BoundRow> = BoundId::ALL
        .iter()
        .map(|&id| BoundRow {
            id,
            trials,
            max_slack: f64::NEG_INFINITY,
            violations: 0,
        })
        .collect();
    for k in 0..trials {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(k as u64);
        let psi = random_state(space, k, &mut rng)?;
        let scale: f64 = rng.gen_range(0.1..3.0);
        let o = random_matrix(modes, modes, &mut rng) * C64::new(scale, 0.0);
        let b = random_matrix(modes, modes, &mut rng);
        let o_psd = &b * b.adjoint() * C64::new(scale, 0.0);
        let norms = mode_norms(&o)?;
        let psd_norm = mode_norms(&o_psd)?.op;

        let n_exp = psi.number_expectation();
        let n_psi = psi.number_function(|n| n).norm();
        let sqrt_n_psi = psi.number_function(f64::sqrt).norm();
        let sqrt_n2_psi = psi.number_function(|n| (n + 2.0).sqrt()).norm();

        let dg_psd = FockOperator::d_gamma(space, &o_psd)?;
        let dg = FockOperator::d_gamma(space, &o)?;
        let pa = FockOperator::pair(space, &o, PairKind::Annihilation)?;
        let pc = FockOperator::pair(space, &o, PairKind::Creation)?;
        let exp_psd = psi.inner(&dg_psd.apply(&psi)?).re;
        let exp_abs = psi.inner(&dg.apply(&psi)?).norm();
        let dg_norm = dg.apply(&psi)?.norm();
        let pa_norm = pa.apply(&psi)?.norm();
        let pc_norm = pc.apply(&psi)?.norm();

        let checks = [
            (exp_psd, psd_norm * n_exp),
            (exp_abs, norms.op * n_exp),
            (dg_norm, norms.op * n_psi),
            (dg_norm, norms.hs * sqrt_n_psi),
            (pa_norm, norms.hs * sqrt_n_psi),
            (pc_norm, norms.hs * sqrt_n_psi),
            (pc_norm, norms.hs * sqrt_n2_psi),
            (dg_norm, 2.0 * norms.trace),
            (pa_norm, 2.0 * norms.trace),
            (pc_norm, 2.0 * norms.trace),
        ];
        for (row, (lhs, rhs)) in rows.iter_mut().zip(checks) {
            let slack = lhs - rhs;
            row.max_slack = row.max_slack.max(slack);
            if slack > SLACK_TOL {
                row.violations += 1;
            }
        }
    }
    Ok(SecondQuantizationReport { modes, rows })
}

/// One randomized check of `||B|| <= 2 tr|conj(v) chi u|` for a Slater
/// projection `omega = F F*` with `u = 1 - omega`, `v = conj(F) conj(F)^T`
/// and a Gaussian window `chi` on a ring of `M` sites.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BBoundTrial {
    /// Operator norm of `B = sum_{xw} (v chi u)_{xw} a_x a_w`.
    pub lhs: f64,
    /// `2 tr|conj(v) chi u|`.
    pub rhs: f64,
    /// `2 tr|v chi u|`, the trace norm of the kernel of `B` itself.
    pub rhs_kernel: f64,
}

pub fn b_bound_trial(modes: usize, seed: u64, case: u64) -> Result<BBoundTrial> {
    let space = FockSpace::new(modes)?;
    space.check_dense()?;
    if modes < 2 {
        return Err(invalid("M", "need at least two modes"));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(case);
    let n = rng.gen_range(1..modes);
    let f = random_orbitals(modes, n, &mut rng);
    let omega = &f * f.adjoint();
    let u = DMatrix::<C64>::identity(modes, modes) - omega;
    let v = f.map(|z| z.conj()) * f.map(|z| z.conj()).transpose();
    let v_bar = v.map(|z| z.conj());
    let r: f64 = rng.gen_range(0.5..modes as f64 / 2.0);
    let z: f64 = rng.gen_range(0.0..modes as f64);
    let chi = DMatrix::from_fn(modes, modes, |x, y| {
        if x != y {
            return C64::new(0.0, 0.0);
        }
        let raw = (x as f64 - z).rem_euclid(modes as f64);
        let d = raw.min(modes as f64 - raw);
        C64::new((-(d * d) / (r * r)).exp(), 0.0)
    });
    let kernel = &v * &chi * &u;
    let b = FockOperator::pair(space, &kernel, PairKind::Annihilation)?;
    Ok(BBoundTrial {
        lhs: b.operator_norm()?,
        rhs: 2.0 * mode_norms(&(&v_bar * &chi * &u))?.trace,
        rhs_kernel: 2.0 * mode_norms(&kernel)?.trace,
    })
}

/// Errors of the particle-hole construction on one random Slater projection.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ParticleHoleSuite {
    pub modes: usize,
    pub particles: usize,
    /// Largest entry of `{a_i, a_j}` and `{a_i, a*_j} - delta_ij`.
    pub car: f64,
    /// `||R Omega - slater_vector(F)||`.
    pub vacuum_image: f64,
    /// `||gamma(R Omega) - omega||_HS`.
    pub one_pdm: f64,
    /// Largest `||R* a(g) R Psi - (a(u g) + a*(conj(v) conj(g))) Psi||` over the probes.
    pub conjugation: f64,
}

impl ParticleHoleSuite {
    pub fn worst(&self) -> f64 {
        self.car.max(self.vacuum_image).max(self.one_pdm).max(self.conjugation)
    }
}

pub fn particle_hole_suite(modes: usize, particles: usize, seed: u64, probes: usize) -> Result<ParticleHoleSuite> {
    let space = FockSpace::new(modes)?;
    space.check_dense()?;
    if particles == 0 || particles > modes {
        return Err(invalid("N", "need 1 <= N <= M"));
    }
    let mut car: f64 = 0.0;
    for i in 0..modes {
        let a_i = FockOperator::annihilator(space, i)?;
        for j in 0..modes {
            let a_j = FockOperator::annihilator(space, j)?;
            let ad_j = FockOperator::creator(space, j)?;
            car = car.max(a_i.anticommutator(&a_j)?.max_abs());
            let mut mixed = a_i.anticommutator(&ad_j)?;
            if i == j {
                mixed = mixed.sub(&FockOperator::identity(space))?;
            }
            car = car.max(mixed.max_abs());
        }
    }

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let f = random_orbitals(modes, particles, &mut rng);
    let omega = &f * f.adjoint();
    let r = super::particle_hole_general(space, &f)?;
    let image = r.apply(&FockVector::vacuum(space))?;
    let vacuum_image = image.distance(&slater_vector(space, &f)?);
    let one_pdm = (super::one_pdm(&image) - &omega).norm();

    let u = DMatrix::<C64>::identity(modes, modes) - &omega;
    let v_bar = &f * f.transpose();
    let mut conjugation: f64 = 0.0;
    for _ in 0..probes {
        let g = nalgebra::DVector::from_fn(modes, |_, _| uniform_c64(&mut rng));
        let ug: Vec<C64> = (&u * &g).iter().copied().collect();
        let vg: Vec<C64> = (&v_bar * g.map(|z| z.conj())).iter().copied().collect();
        let psi = random_state(space, 0, &mut rng)?;
        let g: Vec<C64> = g.iter().copied().collect();
        let lhs = r.adjoint().apply(&r.apply(&psi)?.annihilate_fn(&g))?;
        let mut rhs = psi.annihilate_fn(&ug);
        for (a, b) in rhs.amplitudes_mut().iter_mut().zip(psi.create_fn(&vg).amplitudes()) {
            *a += b;
        }
        conjugation = conjugation.max(lhs.distance(&rhs));
    }
    Ok(ParticleHoleSuite {
        modes,
        particles,
        car,
        vacuum_image,
        one_pdm,
        conjugation,
    })
}
