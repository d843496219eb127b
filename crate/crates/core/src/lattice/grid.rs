use std::f64::consts::PI;

use crate::error::{invalid, Error, Result};

/// Maximum number of sites a field may carry.
pub const FIELD_SITE_CAP: usize = 1 << 20;
/// Maximum side length of a dense one-particle operator.
pub const DENSE_SIDE_CAP: usize = 1 << 10;

/// Periodic `d`-dimensional lattice with `M` sites per axis on a box of
/// length `L`.
///
/// Site `i` along an axis sits at the wrapped coordinate
/// `x = i h` for `i < M/2` and `x = (i - M) h` otherwise, so the box is
/// `[-L/2, L/2)` with the origin at index zero. Sites are stored with axis 0
/// varying slowest.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Grid {
    dim: usize,
    sites_per_axis: usize,
    length: f64,
}

impl Grid {
    pub fn new(dim: usize, sites_per_axis: usize, length: f64) -> Result<Self> {
        if !(1..=3).contains(&dim) {
            return Err(invalid("d", format!("dimension must be 1, 2 or 3, got {dim}")));
        }
        if sites_per_axis < 8 || !sites_per_axis.is_power_of_two() {
            return Err(invalid(
                "M",
                format!("sites per axis must be a power of two >= 8, got {sites_per_axis}"),
            ));
        }
        if !(length.is_finite() && length > 0.0) {
            return Err(invalid("L", format!("box length must be positive, got {length}")));
        }
        let total = sites_per_axis
            .checked_pow(dim as u32)
            .unwrap_or(usize::MAX);
        if total > FIELD_SITE_CAP {
            return Err(Error::CapExceeded {
                what: "grid sites",
                size: total,
                cap: FIELD_SITE_CAP,
            });
        }
        Ok(Self {
            dim,
            sites_per_axis,
            length,
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn sites_per_axis(&self) -> usize {
        self.sites_per_axis
    }

    pub fn length(&self) -> f64 {
        self.length
    }

    /// Lattice spacing `h = L / M`.
    pub fn spacing(&self) -> f64 {
        self.length / self.sites_per_axis as f64
    }

    /// Volume of one cell, `h^d`.
    pub fn cell_volume(&self) -> f64 {
        self.spacing().powi(self.dim as i32)
    }

    /// Total number of sites `M^d`.
    pub fn len(&self) -> usize {
        self.sites_per_axis.pow(self.dim as u32)
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Fails unless `M^d` fits the dense-operator side cap.
    pub fn check_dense(&self) -> Result<()> {
        if self.len() > DENSE_SIDE_CAP {
            return Err(Error::CapExceeded {
                what: "dense operator side",
                size: self.len(),
                cap: DENSE_SIDE_CAP,
            });
        }
        Ok(())
    }

    /// Signed integer offset of axis index `i` in `[-M/2, M/2)`.
    pub fn signed_index(&self, i: usize) -> i64 {
        let m = self.sites_per_axis as i64;
        let i = i as i64;
        if i < m / 2 {
            i
        } else {
            i - m
        }
    }

    /// Wrapped coordinate of axis index `i`.
    pub fn coord(&self, i: usize) -> f64 {
        self.signed_index(i) as f64 * self.spacing()
    }

    /// Discrete torus momentum `2 pi m / L` for axis index `i`.
    pub fn momentum(&self, i: usize) -> f64 {
        2.0 * PI * self.signed_index(i) as f64 / self.length
    }

    pub fn unravel(&self, site: usize) -> [usize; 3] {
        let m = self.sites_per_axis;
        let mut idx = [0usize; 3];
        let mut rest = site;
        for axis in (0..self.dim).rev() {
            idx[axis] = rest % m;
            rest /= m;
        }
        idx
    }

    pub fn ravel(&self, idx: [usize; 3]) -> usize {
        let m = self.sites_per_axis;
        (0..self.dim).fold(0, |acc, axis| acc * m + idx[axis])
    }

    /// Position of a site; unused axes are zero.
    pub fn position(&self, site: usize) -> [f64; 3] {
        let idx = self.unravel(site);
        let mut x = [0.0; 3];
        for axis in 0..self.dim {
            x[axis] = self.coord(idx[axis]);
        }
        x
    }

    /// Squared momentum `|k|^2` of a spectral site.
    pub fn momentum_sq(&self, site: usize) -> f64 {
        let idx = self.unravel(site);
        (0..self.dim).map(|a| self.momentum(idx[a]).powi(2)).sum()
    }

    /// Minimum-image displacement `a - b` on the torus.
    pub fn min_image(&self, a: [f64; 3], b: [f64; 3]) -> [f64; 3] {
        let l = self.length;
        let mut d = [0.0; 3];
        for axis in 0..self.dim {
            let mut x = a[axis] - b[axis];
            x -= l * (x / l).round();
            d[axis] = x;
        }
        d
    }

    pub fn min_image_distance(&self, a: [f64; 3], b: [f64; 3]) -> f64 {
        self.min_image(a, b).iter().map(|x| x * x).sum::<f64>().sqrt()
    }

    /// Site reached from `site` by shifting `shift[axis]` cells per axis.
    pub fn shifted(&self, site: usize, shift: [i64; 3]) -> usize {
        let m = self.sites_per_axis as i64;
        let mut idx = self.unravel(site);
        for axis in 0..self.dim {
            idx[axis] = (idx[axis] as i64 + shift[axis]).rem_euclid(m) as usize;
        }
        self.ravel(idx)
    }
}
