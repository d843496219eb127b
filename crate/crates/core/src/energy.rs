//! Kinetic and potential energy inequalities behind the `L^{5/3}` density
//! bound: Lieb-Thirring form, Hardy-Littlewood-Sobolev form, Hölder
//! interpolation and the Young split.
//!
//! Densities here integrate to `N`: `n(x) = omega(x;x) = N rho(x)`.

use num_complex::Complex64 as C64;

use crate::error::{invalid, Result};
use crate::hf::{energy_parts, SlaterState};
use crate::lattice::{apply_kinetic, fft_axes, ifft_axes, inner, ComplexField, DenseOperator, Grid};
use crate::potentials::PowerLawPotential;
use crate::semiclassics::lp_norm;

/// Relative slack allowed on every inequality link.
pub const LINK_TOL: f64 = 1e-10;

/// `6 / (6 - alpha)`, the HLS exponent for `|x|^{-alpha}` in three dimensions.
pub fn hls_exponent(alpha: f64) -> f64 {
    6.0 / (6.0 - alpha)
}

/// `(12 - 5 alpha)/6 + 5 alpha/6`.
pub fn exponent_identity(alpha: f64) -> f64 {
    (12.0 - 5.0 * alpha) / 6.0 + 5.0 * alpha / 6.0
}

/// Density `n = N rho` of a Slater state.
pub fn particle_density(state: &SlaterState) -> Vec<f64> {
    let n = state.n_particles() as f64;
    state.density().into_iter().map(|r| n * r).collect()
}

/// `(1/N) int int V(x-y) n(x) n(y)` on the grid.
pub fn potential_energy(grid: &Grid, density: &[f64], potential: &PowerLawPotential, n_particles: f64) -> Result<f64> {
    let field = ComplexField::from_real(*grid, density)?;
    let conv = potential.convolve(&field)?;
    let s: f64 = density.iter().zip(conv.values()).map(|(a, b)| a * b.re).sum();
    Ok(grid.cell_volume() * s / n_particles)
}

/// `tr(-Lap) omega` for an explicit operator.
fn dense_kinetic(omega: &DenseOperator) -> Result<f64> {
    let grid = *omega.grid();
    let g = grid.len();
    let m = omega.matrix();
    let mut total = 0.0;
    for col in 0..g {
        let mut v: Vec<C64> = m.column(col).iter().copied().collect();
        fft_axes(&grid, &mut v);
        for (s, x) in v.iter_mut().enumerate() {
            *x *= grid.momentum_sq(s);
        }
        ifft_axes(&grid, &mut v);
        total += v[col].re;
    }
    Ok(total)
}

/// `||n||_{5/3}^{5/3} / tr(-Lap) omega` for a Slater state.
pub fn lieb_thirring_check(state: &SlaterState) -> Result<f64> {
    let grid = *state.grid();
    let eps2 = state.params().epsilon().powi(2);
    let kinetic = kinetic_energy(state)? / eps2;
    Ok(lp_norm(&grid, &particle_density(state), 5.0 / 3.0).powf(5.0 / 3.0) / kinetic)
}

/// Same ratio for an explicit density matrix, with `n(x) = omega(x;x)`.
pub fn lieb_thirring_check_dense(omega: &DenseOperator) -> Result<f64> {
    let grid = *omega.grid();
    let hd = grid.cell_volume();
    let density: Vec<f64> = (0..grid.len()).map(|x| omega.matrix()[(x, x)].re / hd).collect();
    Ok(lp_norm(&grid, &density, 5.0 / 3.0).powf(5.0 / 3.0) / dense_kinetic(omega)?)
}

fn kinetic_energy(state: &SlaterState) -> Result<f64> {
    let mut total = 0.0;
    for f in state.orbitals() {
        total += inner(f, &apply_kinetic(f, state.params()))?.re;
    }
    Ok(total)
}

/// Both sides of the HLS form `(1/N) int int V n n <= (C/N) ||n||_p^2`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HlsRow {
    pub lhs: f64,
    /// `(1/N) ||n||_p^2`.
    pub rhs: f64,
    /// `lhs / rhs`, the measured constant.
    pub ratio: f64,
}

/// HLS form for a density on a three-dimensional grid.
pub fn hls_density_check(
    grid: &Grid,
    density: &[f64],
    potential: &PowerLawPotential,
    n_particles: f64,
) -> Result<HlsRow> {
    if grid.dim() != 3 {
        return Err(invalid("d", "the HLS form is stated in three dimensions"));
    }
    let lhs = potential_energy(grid, density, potential, n_particles)?;
    let rhs = lp_norm(grid, density, hls_exponent(potential.alpha())).powi(2) / n_particles;
    Ok(HlsRow {
        lhs,
        rhs,
        ratio: lhs / rhs,
    })
}

pub fn hls_potential_check(state: &SlaterState, potential: &PowerLawPotential) -> Result<HlsRow> {
    hls_density_check(
        state.grid(),
        &particle_density(state),
        potential,
        state.n_particles() as f64,
    )
}

/// One inequality `lhs <= rhs` of the chain.
#[derive(Debug, Clone, PartialEq)]
pub struct Link {
    pub name: &'static str,
    pub lhs: f64,
    pub rhs: f64,
    /// Equalities are checked as two-sided.
    pub equality: bool,
}

impl Link {
    fn new(name: &'static str, lhs: f64, rhs: f64) -> Self {
        Self {
            name,
            lhs,
            rhs,
            equality: false,
        }
    }

    fn equal(name: &'static str, lhs: f64, rhs: f64) -> Self {
        Self {
            name,
            lhs,
            rhs,
            equality: true,
        }
    }

    pub fn holds(&self) -> bool {
        let scale = self.lhs.abs().max(self.rhs.abs()).max(f64::MIN_POSITIVE);
        let gap = self.lhs - self.rhs;
        if self.equality {
            gap.abs() <= 1e-9 * scale
        } else {
            gap <= LINK_TOL * scale
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ChainReport {
    pub links: Vec<Link>,
}

impl ChainReport {
    pub fn violations(&self) -> usize {
        self.links.iter().filter(|l| !l.holds()).count()
    }

    pub fn link(&self, name: &str) -> Option<&Link> {
        self.links.iter().find(|l| l.name == name)
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("link,lhs,rhs,holds\n");
        for l in &self.links {
            out.push_str(&format!("{},{:e},{:e},{}\n", l.name, l.lhs, l.rhs, l.holds()));
        }
        out
    }
}

/// Interpolation and Young links for a density with `||n||_1 = N`:
///
/// * `||n||_p^2 <= ||n||_1^{(12-5a)/6} ||n||_{5/3}^{5a/6}`, `p = 6/(6-a)`;
/// * `(1/N) ||n||_1^{(12-5a)/6} ||n||_{5/3}^{5a/6} = N^{1-5a/6} ||n||_{5/3}^{5a/6}`;
/// * `N^{1-5a/6} ||n||_{5/3}^{5a/6} <= ((2-a)/2) N + (a/2) N^{-2/3} ||n||_{5/3}^{5/3}`;
/// * `(12-5a)/6 + 5a/6 = 2`.
pub fn interpolation_young_chain(grid: &Grid, density: &[f64], alpha: f64, n_particles: f64) -> Result<ChainReport> {
    if !(alpha > 0.0 && alpha <= 1.0) {
        return Err(invalid("alpha", "alpha must lie in (0,1]"));
    }
    let l1 = lp_norm(grid, density, 1.0);
    if (l1 - n_particles).abs() > 1e-8 * n_particles {
        return Err(invalid("density", format!("||n||_1 = {l1} differs from N = {n_particles}")));
    }
    let p = hls_exponent(alpha);
    let lp = lp_norm(grid, density, p);
    let l53 = lp_norm(grid, density, 5.0 / 3.0);
    let interp = l1.powf((12.0 - 5.0 * alpha) / 6.0) * l53.powf(5.0 * alpha / 6.0);
    let middle = n_particles.powf(1.0 - 5.0 * alpha / 6.0) * l53.powf(5.0 * alpha / 6.0);
    let young = (2.0 - alpha) / 2.0 * n_particles
        + alpha / 2.0 * n_particles.powf(-2.0 / 3.0) * l53.powf(5.0 / 3.0);
    Ok(ChainReport {
        links: vec![
            Link::new("interpolation", lp * lp, interp),
            Link::equal("mass_normalization", interp / n_particles, middle),
            Link::new("young_split", middle, young),
            Link::equal("exponent_identity", exponent_identity(alpha), 2.0),
        ],
    })
}

/// Full audit of one Slater state.
#[derive(Debug, Clone, PartialEq)]
pub struct EnergyReport {
    pub dim: usize,
    pub n_particles: usize,
    pub alpha: f64,
    /// `tr(-eps^2 Lap) omega`.
    pub kinetic_eps: f64,
    /// `tr(-Lap) omega`.
    pub kinetic: f64,
    /// `||n||_{5/3}`.
    pub rho_53: f64,
    /// `(1/N) int int V n n`.
    pub potential: f64,
    pub hf_energy: f64,
    /// `(1/N) ||n||_p^2`; three dimensions only.
    pub hls_bound: Option<f64>,
    /// `(1/N) ||n||_1^{(12-5a)/6} ||n||_{5/3}^{5a/6}`.
    pub interpolation_bound: f64,
    /// `||n||_{5/3}^{5/3} / tr(-Lap) omega`.
    pub lt_ratio: f64,
    pub hls_ratio: Option<f64>,
    pub chain: ChainReport,
}

impl EnergyReport {
    pub const CSV_HEADER: &'static str = "d,N,alpha,kinetic_eps,kinetic,rho_53,potential,hf_energy,hls_bound,interpolation_bound,lt_ratio,hls_ratio,violations";

    pub fn csv_row(&self) -> String {
        let opt = |v: Option<f64>| v.map(|x| format!("{x:e}")).unwrap_or_default();
        format!(
            "{},{},{},{:e},{:e},{:e},{:e},{:e},{},{:e},{:e},{},{}",
            self.dim,
            self.n_particles,
            self.alpha,
            self.kinetic_eps,
            self.kinetic,
            self.rho_53,
            self.potential,
            self.hf_energy,
            opt(self.hls_bound),
            self.interpolation_bound,
            self.lt_ratio,
            opt(self.hls_ratio),
            self.chain.violations()
        )
    }

    pub fn violations(&self) -> usize {
        self.chain.violations()
    }
}

/// Chain links plus the kinetic bound `tr(-eps^2 Lap) omega <= E_HF`, which
/// needs the interaction to be positive. Lieb-Thirring and HLS are reported
/// as measured ratios.
pub fn energy_report(state: &SlaterState, potential: &PowerLawPotential) -> Result<EnergyReport> {
    let grid = *state.grid();
    let n = state.n_particles() as f64;
    let alpha = potential.alpha();
    let eps2 = state.params().epsilon().powi(2);
    let density = particle_density(state);
    let parts = energy_parts(state, potential)?;
    let kinetic = parts.kinetic / eps2;
    let l53 = lp_norm(&grid, &density, 5.0 / 3.0);
    let mut chain = interpolation_young_chain(&grid, &density, alpha, n)?;
    chain.links.push(Link::new("kinetic_below_energy", parts.kinetic, parts.total()));
    let interpolation_bound = chain.links[0].rhs / n;
    let pot = potential_energy(&grid, &density, potential, n)?;
    let hls = if grid.dim() == 3 {
        Some(hls_density_check(&grid, &density, potential, n)?)
    } else {
        None
    };
    Ok(EnergyReport {
        dim: grid.dim(),
        n_particles: state.n_particles(),
        alpha,
        kinetic_eps: parts.kinetic,
        kinetic,
        rho_53: l53,
        potential: pot,
        hf_energy: parts.total(),
        hls_bound: hls.map(|h| h.rhs),
        interpolation_bound,
        lt_ratio: l53.powf(5.0 / 3.0) / kinetic,
        hls_ratio: hls.map(|h| h.ratio),
        chain,
    })
}

/// `||n_t||_{5/3}^{5/3} / (eps^{-2} E_HF(omega_0))` along a trajectory.
/// Energy conservation keeps this below the Lieb-Thirring ratio at `t = 0`
/// up to propagation error.
pub fn energy_transfer_ratios(trajectory: &[SlaterState], potential: &PowerLawPotential) -> Result<Vec<f64>> {
    let first = trajectory
        .first()
        .ok_or_else(|| invalid("trajectory", "empty trajectory"))?;
    let eps2 = first.params().epsilon().powi(2);
    let budget = energy_parts(first, potential)?.total() / eps2;
    if !(budget > 0.0) {
        return Err(invalid("trajectory", "initial energy must be positive"));
    }
    Ok(trajectory
        .iter()
        .map(|s| lp_norm(s.grid(), &particle_density(s), 5.0 / 3.0).powf(5.0 / 3.0) / budget)
        .collect())
}
