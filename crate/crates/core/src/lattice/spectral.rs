//! Multi-axis FFTs on the grid layout.
//!
//! The forward transform is unnormalized and the inverse divides by `M^d`,
//! so `ifft_axes(fft_axes(f)) == f` up to rounding.

use std::cell::RefCell;
use std::collections::HashMap;
use std::sync::Arc;

use num_complex::Complex64 as C64;
use rustfft::{Fft, FftDirection, FftPlanner};

use super::Grid;

type Plans = (Arc<dyn Fft<f64>>, Arc<dyn Fft<f64>>);

thread_local! {
    static PLANS: RefCell<HashMap<usize, Plans>> = RefCell::new(HashMap::new());
}

fn plans(m: usize) -> Plans {
    PLANS.with(|cache| {
        cache
            .borrow_mut()
            .entry(m)
            .or_insert_with(|| {
                let mut planner = FftPlanner::new();
                (
                    planner.plan_fft(m, FftDirection::Forward),
                    planner.plan_fft(m, FftDirection::Inverse),
                )
            })
            .clone()
    })
}

/// Applies a 1D transform along each of the `dim` axes of a row-major block
/// with `m` sites per axis.
fn transform_axes(data: &mut [C64], dim: usize, m: usize, plan: &Arc<dyn Fft<f64>>) {
    let total = data.len();
    let mut line = vec![C64::new(0.0, 0.0); m];
    let mut scratch = vec![C64::new(0.0, 0.0); plan.get_inplace_scratch_len()];
    for axis in 0..dim {
        let stride = m.pow((dim - 1 - axis) as u32);
        if stride == 1 {
            for chunk in data.chunks_exact_mut(m) {
                plan.process_with_scratch(chunk, &mut scratch);
            }
            continue;
        }
        let block = stride * m;
        for base in (0..total).step_by(block) {
            for offset in 0..stride {
                let start = base + offset;
                for (k, v) in line.iter_mut().enumerate() {
                    *v = data[start + k * stride];
                }
                plan.process_with_scratch(&mut line, &mut scratch);
                for (k, v) in line.iter().enumerate() {
                    data[start + k * stride] = *v;
                }
            }
        }
    }
}

/// In-place forward transform over all grid axes.
pub fn fft_axes(grid: &Grid, data: &mut [C64]) {
    debug_assert_eq!(data.len(), grid.len());
    let (fwd, _) = plans(grid.sites_per_axis());
    transform_axes(data, grid.dim(), grid.sites_per_axis(), &fwd);
}

/// In-place normalized inverse transform over all grid axes.
pub fn ifft_axes(grid: &Grid, data: &mut [C64]) {
    debug_assert_eq!(data.len(), grid.len());
    let (_, inv) = plans(grid.sites_per_axis());
    transform_axes(data, grid.dim(), grid.sites_per_axis(), &inv);
    let scale = 1.0 / data.len() as f64;
    for v in data.iter_mut() {
        *v *= scale;
    }
}

/// Transform of a block with an arbitrary number of axes of equal length,
/// used by the N-body propagator whose configuration space is `d * N`
/// dimensional.
pub(crate) fn fft_block(data: &mut [C64], axes: usize, m: usize, inverse: bool) {
    let (fwd, inv) = plans(m);
    if inverse {
        transform_axes(data, axes, m, &inv);
        let scale = 1.0 / data.len() as f64;
        for v in data.iter_mut() {
            *v *= scale;
        }
    } else {
        transform_axes(data, axes, m, &fwd);
    }
}
