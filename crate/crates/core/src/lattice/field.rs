use std::ops::{Index, IndexMut};

use num_complex::Complex64 as C64;

use super::spectral::{fft_axes, ifft_axes};
use super::Grid;
use crate::error::{invalid, Error, Result};

/// Complex amplitude per grid site.
///
/// The `L^2(grid)` inner product carries the cell volume:
/// `<f, g> = h^d sum conj(f) g`.
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexField {
    grid: Grid,
    values: Vec<C64>,
}

impl ComplexField {
    pub fn new(grid: Grid, values: Vec<C64>) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(invalid(
                "values",
                format!("expected {} amplitudes, got {}", grid.len(), values.len()),
            ));
        }
        if values.iter().any(|v| !(v.re.is_finite() && v.im.is_finite())) {
            return Err(invalid("values", "non-finite amplitude"));
        }
        Ok(Self { grid, values })
    }

    pub fn zeros(grid: Grid) -> Self {
        Self {
            grid,
            values: vec![C64::new(0.0, 0.0); grid.len()],
        }
    }

    /// Samples `f(position)` at every site.
    pub fn from_fn(grid: Grid, f: impl Fn([f64; 3]) -> C64) -> Self {
        let values = (0..grid.len()).map(|s| f(grid.position(s))).collect();
        Self { grid, values }
    }

    pub fn from_real(grid: Grid, values: &[f64]) -> Result<Self> {
        Self::new(grid, values.iter().map(|&v| C64::new(v, 0.0)).collect())
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn values(&self) -> &[C64] {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut [C64] {
        &mut self.values
    }

    pub fn into_values(self) -> Vec<C64> {
        self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn norm(&self) -> f64 {
        (self.grid.cell_volume() * self.values.iter().map(|v| v.norm_sqr()).sum::<f64>()).sqrt()
    }

    pub fn normalized(mut self) -> Self {
        let n = self.norm();
        if n > 0.0 {
            self.scale(C64::new(1.0 / n, 0.0));
        }
        self
    }

    pub fn scale(&mut self, c: C64) {
        for v in &mut self.values {
            *v *= c;
        }
    }

    /// `self += c * other`.
    pub fn axpy(&mut self, c: C64, other: &ComplexField) -> Result<()> {
        if self.grid != other.grid {
            return Err(Error::GridMismatch);
        }
        for (a, b) in self.values.iter_mut().zip(&other.values) {
            *a += c * b;
        }
        Ok(())
    }

    /// Pointwise product with a real field.
    pub fn mul_real(&self, weights: &[f64]) -> ComplexField {
        let values = self
            .values
            .iter()
            .zip(weights)
            .map(|(v, w)| v * w)
            .collect();
        ComplexField {
            grid: self.grid,
            values,
        }
    }

    /// Forward spectral coefficients (unnormalized DFT over all axes).
    pub fn forward(&self) -> ComplexField {
        let mut values = self.values.clone();
        fft_axes(&self.grid, &mut values);
        ComplexField {
            grid: self.grid,
            values,
        }
    }

    /// Inverse of [`ComplexField::forward`].
    pub fn inverse(&self) -> ComplexField {
        let mut values = self.values.clone();
        ifft_axes(&self.grid, &mut values);
        ComplexField {
            grid: self.grid,
            values,
        }
    }

    /// Largest imaginary part in absolute value.
    pub fn max_imag(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.im.abs()))
    }

    pub fn real_parts(&self) -> Vec<f64> {
        self.values.iter().map(|v| v.re).collect()
    }

    /// Amplitudes rescaled to the orthonormal site basis, `h^{d/2} f(x)`.
    pub fn site_amplitudes(&self) -> Vec<C64> {
        let s = self.grid.cell_volume().sqrt();
        self.values.iter().map(|v| v * s).collect()
    }

    /// Inverse of [`ComplexField::site_amplitudes`].
    pub fn from_site_amplitudes(grid: Grid, amps: &[C64]) -> Result<Self> {
        let s = 1.0 / grid.cell_volume().sqrt();
        Self::new(grid, amps.iter().map(|v| v * s).collect())
    }
}

impl Index<usize> for ComplexField {
    type Output = C64;
    fn index(&self, i: usize) -> &C64 {
        &self.values[i]
    }
}

impl IndexMut<usize> for ComplexField {
    fn index_mut(&mut self, i: usize) -> &mut C64 {
        &mut self.values[i]
    }
}

/// `<f, g> = h^d sum conj(f) g`.
pub fn inner(f: &ComplexField, g: &ComplexField) -> Result<C64> {
    if f.grid != g.grid {
        return Err(Error::GridMismatch);
    }
    let s: C64 = f
        .values
        .iter()
        .zip(&g.values)
        .map(|(a, b)| a.conj() * b)
        .sum();
    Ok(s * f.grid.cell_volume())
}

/// Particle number, interaction exponent and semiclassical parameter.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScaledParams {
    n_particles: usize,
    alpha: f64,
    epsilon: f64,
}

impl ScaledParams {
    /// Semiclassical scaling `epsilon = N^{-1/3}`.
    pub fn new(n_particles: usize, alpha: f64) -> Result<Self> {
        if n_particles == 0 {
            return Err(invalid("N", "particle number must be >= 1"));
        }
        Self::with_epsilon(n_particles, alpha, (n_particles as f64).powf(-1.0 / 3.0))
    }

    pub fn with_epsilon(n_particles: usize, alpha: f64, epsilon: f64) -> Result<Self> {
        if n_particles == 0 {
            return Err(invalid("N", "particle number must be >= 1"));
        }
        if !(alpha > 0.0 && alpha <= 1.0) {
            return Err(invalid("alpha", format!("alpha must lie in (0,1], got {alpha}")));
        }
        if !(epsilon.is_finite() && epsilon > 0.0) {
            return Err(invalid("epsilon", format!("epsilon must be positive, got {epsilon}")));
        }
        Ok(Self {
            n_particles,
            alpha,
            epsilon,
        })
    }

    pub fn n_particles(&self) -> usize {
        self.n_particles
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn epsilon(&self) -> f64 {
        self.epsilon
    }

    /// Mean-field coupling `1/N`.
    pub fn coupling(&self) -> f64 {
        1.0 / self.n_particles as f64
    }
}

/// Spectral kinetic operator `-eps^2 Laplacian` with multiplier `eps^2 |k|^2`.
pub fn apply_kinetic(f: &ComplexField, params: &ScaledParams) -> ComplexField {
    let grid = *f.grid();
    let eps2 = params.epsilon().powi(2);
    let mut values = f.values.clone();
    fft_axes(&grid, &mut values);
    for (s, v) in values.iter_mut().enumerate() {
        *v *= eps2 * grid.momentum_sq(s);
    }
    ifft_axes(&grid, &mut values);
    ComplexField { grid, values }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use std::f64::consts::PI;

    fn random_field(grid: Grid, rng: &mut ChaCha8Rng) -> ComplexField {
        let values = (0..grid.len())
            .map(|_| C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
            .collect();
        ComplexField::new(grid, values).unwrap()
    }

    fn plane_wave(grid: Grid, m: i64) -> ComplexField {
        let k = 2.0 * PI * m as f64 / grid.length();
        ComplexField::from_fn(grid, |x| C64::from_polar(1.0, k * x[0]))
    }

    #[test]
    fn gaussian_packet_is_normalized() {
        let grid = Grid::new(1, 256, 20.0).unwrap();
        let f = ComplexField::from_fn(grid, |x| C64::new((-x[0] * x[0]).exp(), 0.0)).normalized();
        assert!((inner(&f, &f).unwrap().re - 1.0).abs() < 1e-10);
    }

    #[test]
    fn plane_waves_are_orthogonal() {
        let grid = Grid::new(1, 64, 3.0).unwrap();
        let a = plane_wave(grid, 2);
        let b = plane_wave(grid, -5);
        assert!(inner(&a, &b).unwrap().norm() < 1e-12);
    }

    #[test]
    fn inner_is_conjugate_symmetric() {
        let grid = Grid::new(2, 16, 2.0).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let f = random_field(grid, &mut rng);
        let g = random_field(grid, &mut rng);
        let fg = inner(&f, &g).unwrap();
        let gf = inner(&g, &f).unwrap();
        assert!((fg - gf.conj()).norm() < 1e-12);
    }

    #[test]
    fn grid_mismatch_is_reported() {
        let a = ComplexField::zeros(Grid::new(1, 16, 1.0).unwrap());
        let b = ComplexField::zeros(Grid::new(1, 16, 2.0).unwrap());
        assert!(matches!(inner(&a, &b), Err(Error::GridMismatch)));
    }

    #[test]
    fn plane_wave_is_kinetic_eigenvector() {
        let grid = Grid::new(1, 64, 5.0).unwrap();
        let params = ScaledParams::with_epsilon(8, 1.0, 0.5).unwrap();
        for m in [-32, -3, 0, 7, 31] {
            let f = plane_wave(grid, m);
            let kf = apply_kinetic(&f, &params);
            let lambda = 0.25 * (2.0 * PI * m as f64 / 5.0).powi(2);
            for s in 0..grid.len() {
                assert!((kf[s] - f[s] * lambda).norm() < 1e-9 * (1.0 + lambda));
            }
        }
    }

    #[test]
    fn constant_field_has_zero_kinetic_energy() {
        let grid = Grid::new(3, 8, 2.0).unwrap();
        let f = ComplexField::from_fn(grid, |_| C64::new(0.7, -0.2));
        let kf = apply_kinetic(&f, &ScaledParams::new(1, 0.5).unwrap());
        assert!(kf.values().iter().all(|v| v.norm() < 1e-13));
    }

    #[test]
    fn kinetic_is_hermitian_and_positive() {
        let grid = Grid::new(2, 16, 3.0).unwrap();
        let params = ScaledParams::new(4, 1.0).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..10 {
            let f = random_field(grid, &mut rng);
            let g = random_field(grid, &mut rng);
            let fkg = inner(&f, &apply_kinetic(&g, &params)).unwrap();
            let gkf = inner(&g, &apply_kinetic(&f, &params)).unwrap();
            assert!((fkg - gkf.conj()).norm() < 1e-10);
            assert!(inner(&f, &apply_kinetic(&f, &params)).unwrap().re >= -1e-12);
        }
    }

    #[test]
    fn spectral_round_trip() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for (d, m) in [(1, 1024), (2, 32), (3, 16)] {
            let grid = Grid::new(d, m, 1.0).unwrap();
            let f = random_field(grid, &mut rng);
            let back = f.forward().inverse();
            let mut diff = back.clone();
            diff.axpy(C64::new(-1.0, 0.0), &f).unwrap();
            assert!(diff.norm() < 1e-12 * f.norm());
        }
    }

    #[test]
    fn params_validate_alpha_and_epsilon() {
        assert!(ScaledParams::new(8, 1.5).is_err());
        assert!(ScaledParams::new(8, 0.0).is_err());
        assert!(ScaledParams::new(0, 0.5).is_err());
        assert!(ScaledParams::with_epsilon(8, 0.5, -1.0).is_err());
        let p = ScaledParams::new(512, 1.0).unwrap();
        assert!((p.epsilon() - 0.125).abs() < 1e-15);
    }
}
