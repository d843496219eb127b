//! Inverse-power-law interaction on the grid and its Gaussian-window
//! radial representation
//!
//! ```text
//! |x - y|^{-alpha} = C_{alpha,d} int_0^inf dr r^{-(d+1+alpha)} int dz chi_{r,z}(x) chi_{r,z}(y),
//! chi_{r,z}(x) = exp(-|x - z|^2 / r^2).
//! ```

use std::f64::consts::PI;
use std::fmt::Write as _;

use num_complex::Complex64 as C64;
use statrs::function::gamma::gamma;

use crate::error::{invalid, Error, Result};
use crate::lattice::{fft_axes, ifft_axes, ComplexField, Grid};

/// Regularization applied at the on-site cell.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Regularization {
    /// `V(x) = min(|x|_per^{-alpha}, h^{-alpha})`.
    CellCap,
    /// Interaction switched off, `V = 0`.
    Off,
}

/// `V(x) = |x|^{-alpha}` realized on a periodic grid with minimum-image
/// distances and a capped on-site value.
#[derive(Debug, Clone)]
pub struct PowerLawPotential {
    grid: Grid,
    alpha: f64,
    rule: Regularization,
    values: Vec<f64>,
    spectrum: Vec<C64>,
}

impl PowerLawPotential {
    pub fn new(grid: Grid, alpha: f64) -> Result<Self> {
        check_alpha(alpha)?;
        let cap = grid.spacing().powf(-alpha);
        let origin = [0.0; 3];
        let values: Vec<f64> = (0..grid.len())
            .map(|s| {
                let r = grid.min_image_distance(grid.position(s), origin);
                if r > 0.0 {
                    r.powf(-alpha).min(cap)
                } else {
                    cap
                }
            })
            .collect();
        let mut spectrum: Vec<C64> = values.iter().map(|&v| C64::new(v, 0.0)).collect();
        fft_axes(&grid, &mut spectrum);
        Ok(Self {
            grid,
            alpha,
            rule: Regularization::CellCap,
            values,
            spectrum,
        })
    }

    /// The non-interacting case `V = 0`.
    pub fn off(grid: Grid, alpha: f64) -> Result<Self> {
        check_alpha(alpha)?;
        Ok(Self {
            grid,
            alpha,
            rule: Regularization::Off,
            values: vec![0.0; grid.len()],
            spectrum: vec![C64::new(0.0, 0.0); grid.len()],
        })
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn rule(&self) -> Regularization {
        self.rule
    }

    pub fn is_off(&self) -> bool {
        self.rule == Regularization::Off
    }

    /// `V` at the displacement of each site from the origin.
    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// `V(x_a - x_b)` for two sites.
    pub fn between(&self, a: usize, b: usize) -> f64 {
        let ia = self.grid.unravel(a);
        let ib = self.grid.unravel(b);
        let m = self.grid.sites_per_axis();
        let mut idx = [0usize; 3];
        for axis in 0..self.grid.dim() {
            idx[axis] = (ia[axis] + m - ib[axis]) % m;
        }
        self.values[self.grid.ravel(idx)]
    }

    /// Periodic convolution `(V * f)(x) = h^d sum_y V(x - y) f(y)` for a
    /// complex field.
    pub fn convolve(&self, f: &ComplexField) -> Result<ComplexField> {
        if *f.grid() != self.grid {
            return Err(Error::GridMismatch);
        }
        let mut data = f.values().to_vec();
        self.convolve_in_place(&mut data);
        ComplexField::new(self.grid, data)
    }

    /// Same as [`PowerLawPotential::convolve`] on a raw buffer of `M^d` values.
    pub fn convolve_in_place(&self, data: &mut [C64]) {
        debug_assert_eq!(data.len(), self.grid.len());
        if self.is_off() {
            data.fill(C64::new(0.0, 0.0));
            return;
        }
        fft_axes(&self.grid, data);
        let hd = self.grid.cell_volume();
        for (d, k) in data.iter_mut().zip(&self.spectrum) {
            *d *= k * hd;
        }
        ifft_axes(&self.grid, data);
    }
}

fn check_alpha(alpha: f64) -> Result<()> {
    if !(alpha > 0.0 && alpha <= 1.0) {
        return Err(invalid("alpha", format!("alpha must lie in (0,1], got {alpha}")));
    }
    Ok(())
}

/// Direct term `V * rho` of a real density; the result is real.
pub fn convolve_potential(rho: &ComplexField, potential: &PowerLawPotential) -> Result<ComplexField> {
    let mut out = potential.convolve(rho)?;
    if rho.max_imag() <= 1e-10 {
        for v in out.values_mut() {
            v.im = 0.0;
        }
    }
    Ok(out)
}

/// Normalization making the Gaussian-window integral reproduce
/// `s^{-alpha}` exactly in `d` dimensions:
/// `C = [ (pi/2)^{d/2} 2^{alpha/2 - 1} Gamma(alpha/2) ]^{-1}`.
pub fn fdl_constant(alpha: f64, d: usize) -> Result<f64> {
    check_alpha(alpha)?;
    if !(1..=3).contains(&d) {
        return Err(invalid("d", format!("dimension must be 1, 2 or 3, got {d}")));
    }
    Ok(1.0 / ((PI / 2.0).powf(d as f64 / 2.0) * 2f64.powf(alpha / 2.0 - 1.0) * gamma(alpha / 2.0)))
}

/// `int dz chi_{r,z}(x) chi_{r,z}(y) = (pi r^2 / 2)^{d/2} exp(-|x-y|^2 / (2 r^2))`.
pub fn z_integral(x: &[f64], y: &[f64], r: f64) -> f64 {
    let d = x.len();
    let dist2: f64 = x.iter().zip(y).map(|(a, b)| (a - b) * (a - b)).sum();
    (PI * r * r / 2.0).powf(d as f64 / 2.0) * (-dist2 / (2.0 * r * r)).exp()
}

/// Trapezoidal rule in `log r` for integrals `int dr f(r)`.
///
/// When `upper_tail` is set the interval `[r_max, inf)` is accounted for
/// analytically by [`fdl_reconstruct`].
#[derive(Debug, Clone, PartialEq)]
pub struct RadialQuadrature {
    nodes: Vec<f64>,
    weights: Vec<f64>,
    dim: usize,
    upper_tail: bool,
}

impl RadialQuadrature {
    pub fn log_spaced(r_min: f64, r_max: f64, n: usize, dim: usize) -> Result<Self> {
        if !(r_min > 0.0 && r_max > r_min && r_max.is_finite()) {
            return Err(invalid("r_range", format!("need 0 < r_min < r_max, got [{r_min}, {r_max}]")));
        }
        if n < 2 {
            return Err(invalid("nodes", "need at least two nodes"));
        }
        if !(1..=3).contains(&dim) {
            return Err(invalid("d", format!("dimension must be 1, 2 or 3, got {dim}")));
        }
        let (lo, hi) = (r_min.ln(), r_max.ln());
        let du = (hi - lo) / (n - 1) as f64;
        let nodes: Vec<f64> = (0..n).map(|j| (lo + du * j as f64).exp()).collect();
        let weights = nodes
            .iter()
            .enumerate()
            .map(|(j, r)| {
                let end = if j == 0 || j == n - 1 { 0.5 } else { 1.0 };
                end * du * r
            })
            .collect();
        Ok(Self {
            nodes,
            weights,
            dim,
            upper_tail: true,
        })
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn has_upper_tail(&self) -> bool {
        self.upper_tail
    }

    pub fn r_min(&self) -> Option<f64> {
        self.nodes.first().copied()
    }

    pub fn r_max(&self) -> Option<f64> {
        self.nodes.last().copied()
    }

    pub fn total_weight(&self) -> f64 {
        self.weights.iter().sum()
    }

    /// CSV export with header `r_node,weight`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("r_node,weight\n");
        for (r, w) in self.nodes.iter().zip(&self.weights) {
            let _ = writeln!(out, "{r:e},{w:e}");
        }
        out
    }
}

/// Result of a radial reconstruction.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Reconstruction {
    pub value: f64,
    /// Set when the node range does not bracket `[s/20, 20 s]`.
    pub accuracy_warning: bool,
}

/// `int_R^inf dr r^{-1-alpha} exp(-s^2/(2 r^2))` from the far-field series of
/// the Gaussian.
fn upper_tail(s: f64, alpha: f64, r_max: f64) -> f64 {
    let x = -s * s / (2.0 * r_max * r_max);
    let mut term = 1.0;
    let mut sum = 0.0;
    for n in 0..60 {
        let contrib = term * r_max.powf(-alpha) / (alpha + 2.0 * n as f64);
        sum += contrib;
        if contrib.abs() < 1e-18 * sum.abs() {
            break;
        }
        term *= x / (n + 1) as f64;
    }
    sum
}

/// Quadrature value of `C_{alpha,d} int dr r^{-(d+1+alpha)} z_integral(s, r)`,
/// an approximation of `s^{-alpha}`.
pub fn fdl_reconstruct(s: f64, alpha: f64, quad: &RadialQuadrature) -> Result<Reconstruction> {
    if !(s > 0.0 && s.is_finite()) {
        return Err(invalid("s", format!("distance must be positive, got {s}")));
    }
    let c = fdl_constant(alpha, quad.dim)?;
    let d = quad.dim;
    let mut x = [0.0; 3];
    x[0] = s;
    let origin = [0.0; 3];
    let power = -(d as f64 + 1.0 + alpha);
    let mut sum = 0.0;
    for (&r, &w) in quad.nodes.iter().zip(&quad.weights) {
        sum += w * r.powf(power) * z_integral(&x[..d], &origin[..d], r);
    }
    let mut accuracy_warning = true;
    if let (Some(lo), Some(hi)) = (quad.r_min(), quad.r_max()) {
        accuracy_warning = !(lo <= s / 20.0 && hi >= 20.0 * s);
        if quad.upper_tail {
            sum += (PI / 2.0).powf(d as f64 / 2.0) * upper_tail(s, alpha, hi);
        }
    }
    Ok(Reconstruction {
        value: c * sum,
        accuracy_warning,
    })
}

/// Node set split at the cutoff `k = eps^{1/(3 - alpha)}`.
#[derive(Debug, Clone, PartialEq)]
pub struct SplitQuadrature {
    pub cutoff: f64,
    pub near: RadialQuadrature,
    pub far: RadialQuadrature,
}

/// Optimal near/far cutoff `k = eps^{1/(3-alpha)}`.
pub fn cutoff_scale(epsilon: f64, alpha: f64) -> f64 {
    epsilon.powf(1.0 / (3.0 - alpha))
}

pub fn split_quadrature(quad: &RadialQuadrature, epsilon: f64, alpha: f64) -> Result<SplitQuadrature> {
    if !(epsilon > 0.0) {
        return Err(invalid("epsilon", "epsilon must be positive"));
    }
    check_alpha(alpha)?;
    let k = cutoff_scale(epsilon, alpha);
    let cut = quad.nodes.partition_point(|&r| r < k);
    let part = |range: std::ops::Range<usize>, tail: bool| RadialQuadrature {
        nodes: quad.nodes[range.clone()].to_vec(),
        weights: quad.weights[range].to_vec(),
        dim: quad.dim,
        upper_tail: tail,
    };
    Ok(SplitQuadrature {
        cutoff: k,
        near: part(0..cut, false),
        far: part(cut..quad.nodes.len(), quad.upper_tail),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn standard_quad(d: usize) -> RadialQuadrature {
        RadialQuadrature::log_spaced(1e-3, 1e3, 400, d).unwrap()
    }

    #[test]
    fn constant_at_coulomb_exponent() {
        let c = fdl_constant(1.0, 3).unwrap();
        assert!((c - 4.0 / (PI * PI)).abs() < 1e-12);
        assert!((c - 0.405285).abs() < 1e-6);
    }

    #[test]
    fn constant_at_half_exponent_matches_quadrature_oracle() {
        // Oracle: substitute u = r^{-alpha}; the r-integral of the z-integral
        // at s = 1 becomes (pi/2)^{3/2}/alpha int_0^inf exp(-u^{2/alpha}/2) du,
        // evaluated with a fine trapezoid rule.
        let alpha = 0.5;
        let du = 1e-4;
        let integral: f64 = (0..200_000)
            .map(|j| {
                let u = j as f64 * du;
                let w = if j == 0 { 0.5 } else { 1.0 };
                w * (-u.powf(2.0 / alpha) / 2.0).exp()
            })
            .sum::<f64>()
            * du
            * (PI / 2.0).powf(1.5)
            / alpha;
        let c = fdl_constant(alpha, 3).unwrap();
        assert!((c * integral - 1.0).abs() < 1e-6);
        assert!((c - 0.235_619_704_050_123_8).abs() < 1e-12);
    }

    #[test]
    fn constant_defining_identity() {
        for d in 1..=3 {
            for alpha in [0.1, 0.25, 0.5, 0.75, 1.0] {
                let c = fdl_constant(alpha, d).unwrap();
                let inv = (PI / 2.0).powf(d as f64 / 2.0) * 2f64.powf(alpha / 2.0 - 1.0) * gamma(alpha / 2.0);
                assert!((c * inv - 1.0).abs() < 1e-12);
            }
        }
        assert!(fdl_constant(1.5, 3).is_err());
        assert!(fdl_constant(0.0, 3).is_err());
    }

    #[test]
    fn z_integral_values() {
        let r = 0.7;
        let x = [0.1, -0.2, 0.3];
        assert!((z_integral(&x, &x, r) - (PI * r * r / 2.0).powf(1.5)).abs() < 1e-14);
        assert!(z_integral(&[0.0, 0.0, 0.0], &[1e3, 0.0, 0.0], 1.0) == 0.0);
        let y = [0.1, -0.2, 1.3];
        assert_eq!(z_integral(&x, &y, r), z_integral(&y, &x, r));
    }

    #[test]
    fn z_integral_matches_lattice_sum() {
        // Oracle: direct summation of chi(x) chi(y) over a z lattice, h = 0.05.
        let h = 0.05;
        let x = [0.0, 0.0, 0.0];
        let y = [1.0, 0.0, 0.0];
        let chi = |p: [f64; 3], z: [f64; 3]| {
            (-((p[0] - z[0]).powi(2) + (p[1] - z[1]).powi(2) + (p[2] - z[2]).powi(2))).exp()
        };
        let n = 120i64;
        let mut sum = 0.0;
        for i in -n..=n + 20 {
            for j in -n..=n {
                for k in -n..=n {
                    let z = [i as f64 * h, j as f64 * h, k as f64 * h];
                    sum += chi(x, z) * chi(y, z);
                }
            }
        }
        sum *= h * h * h;
        let want = (PI / 2.0).powf(1.5) * (-0.5f64).exp();
        assert!((z_integral(&x, &y, 1.0) - want).abs() < 1e-14);
        assert!((sum - want).abs() < 1e-4 * want);
    }

    #[test]
    fn reconstruction_hits_analytic_targets() {
        let q = standard_quad(3);
        let one = fdl_reconstruct(1.0, 1.0, &q).unwrap();
        assert!((one.value - 1.0).abs() < 1e-3);
        assert!(!one.accuracy_warning);
        let two = fdl_reconstruct(2.0, 0.5, &q).unwrap();
        assert!((two.value / 2f64.powf(-0.5) - 1.0).abs() < 1e-3);
        // homogeneity
        let s = 0.8;
        let a = fdl_reconstruct(3.0 * s, 0.75, &q).unwrap().value * 3f64.powf(0.75);
        let b = fdl_reconstruct(s, 0.75, &q).unwrap().value;
        assert!((a - b).abs() < 1e-3 * b);
    }

    #[test]
    fn reconstruction_accuracy_over_alpha_and_distance() {
        for d in 1..=3 {
            let q = standard_quad(d);
            for alpha in [0.25, 0.5, 0.75, 1.0] {
                for j in 0..50 {
                    let s = 0.2 * 25f64.powf(j as f64 / 49.0);
                    let v = fdl_reconstruct(s, alpha, &q).unwrap().value;
                    let err = (v / s.powf(-alpha) - 1.0).abs();
                    assert!(err < 1e-3, "d={d} alpha={alpha} s={s} err={err}");
                }
            }
        }
    }

    #[test]
    fn narrow_range_is_flagged() {
        let q = RadialQuadrature::log_spaced(0.5, 2.0, 50, 3).unwrap();
        assert!(fdl_reconstruct(1.0, 1.0, &q).unwrap().accuracy_warning);
    }

    #[test]
    fn split_at_semiclassical_cutoff() {
        let q = standard_quad(3);
        let sp = split_quadrature(&q, 0.125, 1.0).unwrap();
        assert!((sp.cutoff - 0.125f64.sqrt()).abs() < 1e-15);
        assert!((sp.cutoff - 0.3536).abs() < 1e-4);
        assert!(sp.near.nodes().iter().all(|&r| r < sp.cutoff));
        assert!(sp.far.nodes().iter().all(|&r| r >= sp.cutoff));
        assert!((sp.near.total_weight() + sp.far.total_weight() - q.total_weight()).abs() < 1e-12);
        assert_eq!(split_quadrature(&q, 1.0, 0.3).unwrap().cutoff, 1.0);
        for s in [0.3, 1.0, 4.0] {
            let whole = fdl_reconstruct(s, 1.0, &q).unwrap().value;
            let parts = fdl_reconstruct(s, 1.0, &sp.near).unwrap().value
                + fdl_reconstruct(s, 1.0, &sp.far).unwrap().value;
            assert!((whole - parts).abs() < 1e-12);
        }
    }

    #[test]
    fn csv_export_has_header_and_rows() {
        let q = RadialQuadrature::log_spaced(0.1, 10.0, 5, 3).unwrap();
        let csv = q.to_csv();
        assert!(csv.starts_with("r_node,weight\n"));
        assert_eq!(csv.lines().count(), 6);
        assert!(q.weights().iter().all(|&w| w > 0.0));
        assert!(q.nodes().windows(2).all(|w| w[0] < w[1]));
    }

    #[test]
    fn point_mass_reproduces_potential() {
        let grid = Grid::new(2, 16, 4.0).unwrap();
        let v = PowerLawPotential::new(grid, 0.5).unwrap();
        let mut rho = ComplexField::zeros(grid);
        rho[0] = C64::new(1.0 / grid.cell_volume(), 0.0);
        let out = convolve_potential(&rho, &v).unwrap();
        for s in 0..grid.len() {
            assert!((out[s].re - v.values()[s]).abs() < 1e-10);
            assert_eq!(out[s].im, 0.0);
        }
        assert!((v.values()[0] - grid.spacing().powf(-0.5)).abs() < 1e-15);
        assert!((v.values()[1] - grid.spacing().powf(-0.5)).abs() < 1e-15);
        assert!((v.values()[2] - (2.0 * grid.spacing()).powf(-0.5)).abs() < 1e-15);
    }

    #[test]
    fn convolution_matches_double_sum() {
        // Oracle: O(M^2) direct sum with minimum-image distances.
        let grid = Grid::new(1, 16, 3.0).unwrap();
        let v = PowerLawPotential::new(grid, 1.0).unwrap();
        let h = grid.spacing();
        let bump = |x: f64, c: f64| (-(x - c).powi(2) / 0.1).exp();
        let rho = ComplexField::from_fn(grid, |x| C64::new(bump(x[0], -0.7) + 0.5 * bump(x[0], 0.9), 0.0));
        let out = convolve_potential(&rho, &v).unwrap();
        for a in 0..16 {
            let mut direct = 0.0;
            for b in 0..16 {
                let r = grid.min_image_distance(grid.position(a), grid.position(b));
                let vab = if r == 0.0 { h.powf(-1.0) } else { r.powf(-1.0).min(h.powf(-1.0)) };
                direct += h * vab * rho[b].re;
            }
            assert!((out[a].re - direct).abs() < 1e-10);
        }
    }

    #[test]
    fn convolution_is_positive_linear_and_translation_covariant() {
        let grid = Grid::new(2, 16, 2.0).unwrap();
        let v = PowerLawPotential::new(grid, 0.75).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        let mut rand_rho = || {
            let vals: Vec<f64> = (0..grid.len()).map(|_| rng.gen_range(0.0..1.0)).collect();
            ComplexField::from_real(grid, &vals).unwrap()
        };
        let a = rand_rho();
        let b = rand_rho();
        let va = convolve_potential(&a, &v).unwrap();
        let vb = convolve_potential(&b, &v).unwrap();
        assert!(va.values().iter().all(|x| x.re >= -1e-10));
        let mut sum = a.clone();
        sum.axpy(C64::new(2.0, 0.0), &b).unwrap();
        let vsum = convolve_potential(&sum, &v).unwrap();
        for s in 0..grid.len() {
            assert!((vsum[s] - va[s] - vb[s] * 2.0).norm() < 1e-10);
        }
        let shift = [3, -3, 0];
        let mut shifted = ComplexField::zeros(grid);
        for s in 0..grid.len() {
            shifted[grid.shifted(s, shift)] = a[s];
        }
        let vs = convolve_potential(&shifted, &v).unwrap();
        for s in 0..grid.len() {
            assert!((vs[grid.shifted(s, shift)] - va[s]).norm() < 1e-10);
        }
    }

    #[test]
    fn switched_off_potential_is_zero() {
        let grid = Grid::new(1, 16, 1.0).unwrap();
        let v = PowerLawPotential::off(grid, 1.0).unwrap();
        let rho = ComplexField::from_fn(grid, |_| C64::new(1.0, 0.0));
        assert!(convolve_potential(&rho, &v).unwrap().values().iter().all(|x| x.norm() == 0.0));
    }
}
