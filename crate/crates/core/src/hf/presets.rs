use std::f64::consts::PI;

use num_complex::Complex64 as C64;
use rand::Rng;

use super::SlaterState;
use crate::error::{invalid, Result};
use crate::lattice::{ComplexField, Grid, ScaledParams};

/// The `N` plane waves of smallest `|k|`, ties broken by ascending signed
/// mode index. In 1D with `N = 8` this is `m = -4..=3`.
pub fn fermi_ball(grid: Grid, params: ScaledParams) -> Result<SlaterState> {
    let n = params.n_particles();
    if n > grid.len() {
        return Err(invalid("N", "more particles than modes"));
    }
    let d = grid.dim();
    let mut modes: Vec<(i64, [i64; 3], usize)> = (0..grid.len())
        .map(|s| {
            let idx = grid.unravel(s);
            let mut m = [0i64; 3];
            for a in 0..d {
                m[a] = grid.signed_index(idx[a]);
            }
            (m.iter().map(|x| x * x).sum(), m, s)
        })
        .collect();
    modes.sort();
    let amp = grid.length().powf(-(d as f64) / 2.0);
    let orbitals = modes[..n]
        .iter()
        .map(|&(_, m, _)| {
            ComplexField::from_fn(grid, |x| {
                let phase: f64 = (0..d).map(|a| 2.0 * PI * m[a] as f64 * x[a] / grid.length()).sum();
                C64::from_polar(amp, phase)
            })
        })
        .collect();
    SlaterState::orthonormalized(grid, orbitals, params, 0.0)
}

/// Phase-space center `(q, p)` of one coherent packet.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PacketCenter {
    pub q: [f64; 3],
    pub p: [f64; 3],
}

/// Centers on a rectangular phase-space lattice inside
/// `[-q_extent, q_extent]^d x [-p_extent, p_extent]^d`.
///
/// In 1D the `N = 2^k` packets use `2^{ceil(k/2)}` positions and
/// `2^{floor(k/2)}` momenta. For `d > 1` the positions fill a cubic lattice
/// in row-major order and all momenta vanish.
pub fn phase_space_lattice(d: usize, n: usize, q_extent: f64, p_extent: f64) -> Result<Vec<PacketCenter>> {
    if n == 0 {
        return Err(invalid("N", "need at least one packet"));
    }
    if !(1..=3).contains(&d) {
        return Err(invalid("d", "dimension must be 1, 2 or 3"));
    }
    let ticks = |count: usize, extent: f64| -> Vec<f64> {
        if count == 1 {
            return vec![0.0];
        }
        (0..count)
            .map(|a| -extent + (a as f64 + 0.5) * 2.0 * extent / count as f64)
            .collect()
    };
    if d == 1 {
        let bits = (n as f64).log2().ceil() as u32;
        let n_q = 1usize << bits.div_ceil(2);
        let n_p = n.div_ceil(n_q);
        let qs = ticks(n_q, q_extent);
        let ps = ticks(n_p, p_extent);
        let mut out = Vec::with_capacity(n);
        'outer: for p in &ps {
            for q in &qs {
                if out.len() == n {
                    break 'outer;
                }
                out.push(PacketCenter {
                    q: [*q, 0.0, 0.0],
                    p: [*p, 0.0, 0.0],
                });
            }
        }
        return Ok(out);
    }
    let mut side: usize = 1;
    while side.pow(d as u32) < n {
        side += 1;
    }
    let qs = ticks(side, q_extent);
    Ok((0..n)
        .map(|k| {
            let mut q = [0.0; 3];
            let mut rest = k;
            for a in (0..d).rev() {
                q[a] = qs[rest % side];
                rest /= side;
            }
            PacketCenter { q, p: [0.0; 3] }
        })
        .collect())
}

/// Löwdin-orthonormalized Gaussian packets
/// `exp(-|x - q|^2 / (2 sigma^2) + i p.(x - q) / eps)` on the torus.
pub fn gaussian_packets(grid: Grid, params: ScaledParams, centers: &[PacketCenter], sigma: f64) -> Result<SlaterState> {
    if !(sigma > 0.0) {
        return Err(invalid("sigma", "packet width must be positive"));
    }
    let eps = params.epsilon();
    let d = grid.dim();
    let orbitals = centers
        .iter()
        .map(|c| {
            ComplexField::from_fn(grid, |x| {
                let dx = grid.min_image(x, c.q);
                let r2: f64 = dx[..d].iter().map(|v| v * v).sum();
                let phase: f64 = (0..d).map(|a| c.p[a] * dx[a] / eps).sum();
                C64::from_polar((-r2 / (2.0 * sigma * sigma)).exp(), phase)
            })
            .normalized()
        })
        .collect();
    SlaterState::orthonormalized(grid, orbitals, params, 0.0)
}

/// Orthonormalized orbitals with independent uniform random amplitudes.
pub fn random_slater<R: Rng>(grid: Grid, params: ScaledParams, rng: &mut R) -> Result<SlaterState> {
    let orbitals = (0..params.n_particles())
        .map(|_| {
            let vals = (0..grid.len())
                .map(|_| C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
                .collect();
            ComplexField::new(grid, vals)
        })
        .collect::<Result<Vec<_>>>()?;
    SlaterState::orthonormalized(grid, orbitals, params, 0.0)
}

/// Packets of width `sigma = s0 eps` on a phase-space lattice whose spacing
/// is `gap` packet widths in both position (`gap sigma`) and momentum
/// (`gap eps / sigma`).
pub fn separated_packets(grid: Grid, params: ScaledParams, s0: f64, gap: f64) -> Result<SlaterState> {
    if !(s0 > 0.0 && gap > 0.0) {
        return Err(invalid("packets", "width factor and gap must be positive"));
    }
    let n = params.n_particles();
    let d = grid.dim();
    let sigma = s0 * params.epsilon();
    let dq = gap * sigma;
    let dp = gap * params.epsilon() / sigma;
    let (n_q, n_p) = if d == 1 {
        let bits = (n as f64).log2().ceil() as u32;
        let n_q = 1usize << bits.div_ceil(2);
        (n_q, n.div_ceil(n_q))
    } else {
        let mut side: usize = 1;
        while side.pow(d as u32) < n {
            side += 1;
        }
        (side, 1)
    };
    let centers = phase_space_lattice(d, n, 0.5 * dq * n_q as f64, 0.5 * dp * n_p as f64)?;
    gaussian_packets(grid, params, &centers, sigma)
}
