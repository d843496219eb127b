//! Semiclassical structure of Slater projections: commutators with
//! position and momentum, the diagonal densities of their absolute values,
//! discrete maximal functions and the localized commutator audit.
//!
//! For a Slater state `omega = F F*` every commutator `[A, omega]` with a
//! one-particle `A` factors as `[AF, F] [F, -A*F]*`, so its singular values
//! come from a `2N x 2N` problem. The dense entry points accept an arbitrary
//! `DenseOperator` and use full decompositions.

use std::f64::consts::PI;
use std::fmt::Write as _;

use nalgebra::DMatrix;
use num_complex::Complex64 as C64;

use crate::error::{invalid, Error, Result};
use crate::hf::SlaterState;
use crate::lattice::{fft_axes, ifft_axes, ComplexField, DenseOperator, Grid, LowRankOperator};

/// How the coordinate `x_axis` is realized on the torus.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PositionConvention {
    /// Multiplication by the wrapped coordinate in `[-L/2, L/2)`.
    Plain,
    /// Multiplication by `exp(2 pi i x / L)`, commutator rescaled by `L / (2 pi)`.
    Periodic,
}

impl PositionConvention {
    pub fn name(&self) -> &'static str {
        match self {
            Self::Plain => "plain",
            Self::Periodic => "periodic",
        }
    }

    fn multiplier(&self, grid: &Grid, axis: usize) -> Vec<C64> {
        (0..grid.len())
            .map(|s| {
                let x = grid.position(s)[axis];
                match self {
                    Self::Plain => C64::new(x, 0.0),
                    Self::Periodic => C64::from_polar(1.0, 2.0 * PI * x / grid.length()),
                }
            })
            .collect()
    }

    fn scale(&self, grid: &Grid) -> f64 {
        match self {
            Self::Plain => 1.0,
            Self::Periodic => grid.length() / (2.0 * PI),
        }
    }
}

fn check_axis(grid: &Grid, axis: usize) -> Result<()> {
    if axis >= grid.dim() {
        return Err(invalid("axis", format!("axis {axis} on a {}-dimensional grid", grid.dim())));
    }
    Ok(())
}

/// `[diag(m), omega]`.
fn multiplier_commutator(omega: &DenseOperator, m: &[C64]) -> DenseOperator {
    let a = omega.matrix();
    let n = a.nrows();
    let c = DMatrix::from_fn(n, n, |i, j| (m[i] - m[j]) * a[(i, j)]);
    DenseOperator::new(*omega.grid(), c).expect("same shape")
}

/// `[X_axis, omega]` under the chosen convention.
pub fn commutator_position(omega: &DenseOperator, axis: usize, convention: PositionConvention) -> Result<DenseOperator> {
    let grid = *omega.grid();
    check_axis(&grid, axis)?;
    let m = convention.multiplier(&grid, axis);
    Ok(multiplier_commutator(omega, &m).scaled(C64::new(convention.scale(&grid), 0.0)))
}

/// `-i eps d/dx_axis` applied to a block of site columns.
fn momentum_columns(grid: &Grid, axis: usize, eps: f64, cols: &DMatrix<C64>) -> DMatrix<C64> {
    let mut out = cols.clone();
    let mut buf = vec![C64::new(0.0, 0.0); grid.len()];
    for j in 0..cols.ncols() {
        for (b, v) in buf.iter_mut().zip(cols.column(j).iter()) {
            *b = *v;
        }
        fft_axes(grid, &mut buf);
        for (s, b) in buf.iter_mut().enumerate() {
            *b *= eps * grid.momentum(grid.unravel(s)[axis]);
        }
        ifft_axes(grid, &mut buf);
        for (i, b) in buf.iter().enumerate() {
            out[(i, j)] = *b;
        }
    }
    out
}

/// `[-i eps d/dx_axis, omega]` with the spectral derivative.
pub fn commutator_momentum(omega: &DenseOperator, axis: usize, eps: f64) -> Result<DenseOperator> {
    let grid = *omega.grid();
    check_axis(&grid, axis)?;
    let a = omega.matrix();
    let pa = momentum_columns(&grid, axis, eps, a);
    // omega P = (P omega*)* since P is self-adjoint
    let pa_star = momentum_columns(&grid, axis, eps, &a.adjoint());
    DenseOperator::new(grid, pa - pa_star.adjoint())
}

/// `[A, F F*]` from the columns `AF` and `A*F`.
fn slater_commutator(f: DMatrix<C64>, af: DMatrix<C64>, astar_f: DMatrix<C64>, scale: f64) -> Result<LowRankOperator> {
    let n = f.ncols();
    let rows = f.nrows();
    let mut left = DMatrix::zeros(rows, 2 * n);
    let mut right = DMatrix::zeros(rows, 2 * n);
    left.view_mut((0, 0), (rows, n)).copy_from(&(af * C64::new(scale, 0.0)));
    left.view_mut((0, n), (rows, n)).copy_from(&f);
    right.view_mut((0, 0), (rows, n)).copy_from(&f);
    right.view_mut((0, n), (rows, n)).copy_from(&(astar_f * C64::new(-scale, 0.0)));
    LowRankOperator::new(left, right)
}

/// `[diag(m), omega]` for a Slater state, in factored form.
pub fn commutator_multiplier_lowrank(state: &SlaterState, m: &[C64]) -> Result<LowRankOperator> {
    if m.len() != state.grid().len() {
        return Err(Error::GridMismatch);
    }
    let f = state.site_columns();
    let mf = DMatrix::from_fn(f.nrows(), f.ncols(), |i, j| m[i] * f[(i, j)]);
    let mstar_f = DMatrix::from_fn(f.nrows(), f.ncols(), |i, j| m[i].conj() * f[(i, j)]);
    slater_commutator(f, mf, mstar_f, 1.0)
}

pub fn commutator_position_lowrank(state: &SlaterState, axis: usize, convention: PositionConvention) -> Result<LowRankOperator> {
    let grid = *state.grid();
    check_axis(&grid, axis)?;
    let m = convention.multiplier(&grid, axis);
    let f = state.site_columns();
    let mf = DMatrix::from_fn(f.nrows(), f.ncols(), |i, j| m[i] * f[(i, j)]);
    let mstar_f = DMatrix::from_fn(f.nrows(), f.ncols(), |i, j| m[i].conj() * f[(i, j)]);
    slater_commutator(f, mf, mstar_f, convention.scale(&grid))
}

pub fn commutator_momentum_lowrank(state: &SlaterState, axis: usize) -> Result<LowRankOperator> {
    let grid = *state.grid();
    check_axis(&grid, axis)?;
    let f = state.site_columns();
    let pf = momentum_columns(&grid, axis, state.params().epsilon(), &f);
    slater_commutator(f, pf.clone(), pf, 1.0)
}

/// `rho_{|A|}(x) = |A|(x;x)`, a non-negative field with `h^d sum = tr|A|`.
pub fn diagonal_density(a: &DenseOperator) -> Result<ComplexField> {
    let abs = a.absolute_value()?;
    let grid = *a.grid();
    let hd = grid.cell_volume();
    let vals: Vec<f64> = (0..grid.len()).map(|i| abs.matrix()[(i, i)].re.max(0.0) / hd).collect();
    ComplexField::from_real(grid, &vals)
}

pub fn diagonal_density_lowrank(grid: Grid, a: &LowRankOperator) -> Result<ComplexField> {
    if a.side() != grid.len() {
        return Err(Error::GridMismatch);
    }
    let hd = grid.cell_volume();
    let vals: Vec<f64> = a.abs_diagonal()?.into_iter().map(|v| v.max(0.0) / hd).collect();
    ComplexField::from_real(grid, &vals)
}

/// `||rho||_p = (h^d sum |rho|^p)^{1/p}`; `p = inf` gives the maximum.
pub fn lp_norm(grid: &Grid, rho: &[f64], p: f64) -> f64 {
    if p.is_infinite() {
        return rho.iter().fold(0.0, |m, v| m.max(v.abs()));
    }
    (grid.cell_volume() * rho.iter().map(|v| v.abs().powf(p)).sum::<f64>()).powf(1.0 / p)
}

/// Periodic window sums of half-width `r` along one axis.
fn box_sum_axis(grid: &Grid, data: &[f64], axis: usize, r: usize) -> Vec<f64> {
    let m = grid.sites_per_axis();
    let stride = m.pow((grid.dim() - 1 - axis) as u32);
    let mut out = vec![0.0; data.len()];
    if 2 * r + 1 >= m {
        // the window is the whole period
        for base in 0..data.len() {
            let idx = grid.unravel(base)[axis];
            if idx != 0 {
                continue;
            }
            let total: f64 = (0..m).map(|k| data[base + k * stride]).sum();
            for k in 0..m {
                out[base + k * stride] = total;
            }
        }
        return out;
    }
    let mut prefix = vec![0.0; 3 * m + 1];
    for base in 0..data.len() {
        if grid.unravel(base)[axis] != 0 {
            continue;
        }
        for k in 0..3 * m {
            prefix[k + 1] = prefix[k] + data[base + (k % m) * stride];
        }
        for i in 0..m {
            out[base + i * stride] = prefix[m + i + r + 1] - prefix[m + i - r];
        }
    }
    out
}

/// Discrete maximal function: the largest average of `rho` over centered
/// cubes of half-width `0..=M/2`, a window wider than the box being the
/// full period.
pub fn maximal_function(rho: &ComplexField) -> Result<ComplexField> {
    let grid = *rho.grid();
    let vals = rho.real_parts();
    let scale = vals.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    if let Some((site, &value)) = vals.iter().enumerate().find(|(_, &v)| v < -1e-12 * scale.max(1.0)) {
        return Err(Error::NegativeDensity { value, site });
    }
    let vals: Vec<f64> = vals.into_iter().map(|v| v.max(0.0)).collect();
    let m = grid.sites_per_axis();
    let mut best = vals.clone();
    for r in 1..=m / 2 {
        let mut sums = vals.clone();
        for axis in 0..grid.dim() {
            sums = box_sum_axis(&grid, &sums, axis, r);
        }
        let count = ((2 * r + 1).min(m) as f64).powi(grid.dim() as i32);
        for (b, s) in best.iter_mut().zip(&sums) {
            *b = b.max(s / count);
        }
    }
    ComplexField::from_real(grid, &best)
}

/// One point `(r, z)` of the localized commutator audit.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AuditSample {
    pub r: f64,
    pub z: [f64; 3],
}

/// Exponents and samples for the commutator diagnostics.
#[derive(Debug, Clone, PartialEq)]
pub struct DiagnosticsConfig {
    pub delta: f64,
    pub p: f64,
    pub q: f64,
    pub samples: Vec<AuditSample>,
    pub convention: PositionConvention,
}

impl DiagnosticsConfig {
    /// `q` is the Hölder conjugate of `p`.
    pub fn new(delta: f64, p: f64, samples: Vec<AuditSample>, convention: PositionConvention) -> Result<Self> {
        if !(delta > 0.0 && delta < 0.5) {
            return Err(invalid("delta", format!("delta must lie in (0, 1/2), got {delta}")));
        }
        if !(p > 1.0 && p.is_finite()) {
            return Err(invalid("p", format!("p must exceed 1, got {p}")));
        }
        Ok(Self {
            delta,
            p,
            q: p / (p - 1.0),
            samples,
            convention,
        })
    }

    /// Lower bound `6 / (3 - 2 alpha - 6 delta)` on `p`, if finite.
    pub fn p_threshold(&self, alpha: f64) -> Option<f64> {
        let denom = 3.0 - 2.0 * alpha - 6.0 * self.delta;
        (denom > 0.0).then(|| 6.0 / denom)
    }

    pub fn satisfies_p_threshold(&self, alpha: f64) -> bool {
        self.p_threshold(alpha).is_some_and(|t| self.p > t)
    }

    /// `r`-exponent of the bound, `3/2 - 3 delta`.
    pub fn predicted_exponent(&self) -> f64 {
        1.5 - 3.0 * self.delta
    }

    /// Every combination of the given radii and centers.
    pub fn grid_samples(radii: &[f64], centers: &[[f64; 3]]) -> Vec<AuditSample> {
        centers
            .iter()
            .flat_map(|&z| radii.iter().map(move |&r| AuditSample { r, z }))
            .collect()
    }
}

/// Per-axis commutator diagnostics of one state.
#[derive(Debug, Clone)]
pub struct AxisDiagnostics {
    pub axis: usize,
    pub position_trace_norm: f64,
    pub momentum_trace_norm: f64,
    pub density: ComplexField,
    pub maximal: ComplexField,
    pub norm_l1: f64,
    pub norm_lp: f64,
}

#[derive(Debug, Clone)]
pub struct CommutatorReport {
    pub axes: Vec<AxisDiagnostics>,
    pub n_eps: f64,
}

impl CommutatorReport {
    /// `sum_i [ ||rho_i||_1 + ||rho_i||_p ] / (N eps)`.
    pub fn regularity_value(&self) -> f64 {
        self.axes.iter().map(|a| a.norm_l1 + a.norm_lp).sum::<f64>() / self.n_eps
    }
}

fn axis_diagnostics(
    grid: Grid,
    axis: usize,
    position: f64,
    momentum: f64,
    density: ComplexField,
    p: f64,
) -> Result<AxisDiagnostics> {
    let maximal = maximal_function(&density)?;
    let vals = density.real_parts();
    Ok(AxisDiagnostics {
        axis,
        position_trace_norm: position,
        momentum_trace_norm: momentum,
        norm_l1: lp_norm(&grid, &vals, 1.0),
        norm_lp: lp_norm(&grid, &vals, p),
        density,
        maximal,
    })
}

pub fn commutator_report(state: &SlaterState, config: &DiagnosticsConfig) -> Result<CommutatorReport> {
    let grid = *state.grid();
    let axes = (0..grid.dim())
        .map(|axis| {
            let cx = commutator_position_lowrank(state, axis, config.convention)?;
            let cp = commutator_momentum_lowrank(state, axis)?;
            let density = diagonal_density_lowrank(grid, &cx)?;
            axis_diagnostics(grid, axis, cx.trace_norm()?, cp.trace_norm()?, density, config.p)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(CommutatorReport {
        axes,
        n_eps: state.n_particles() as f64 * state.params().epsilon(),
    })
}

/// Same diagnostics for an arbitrary dense operator; `n_eps` is supplied.
pub fn commutator_report_dense(omega: &DenseOperator, eps: f64, n_eps: f64, config: &DiagnosticsConfig) -> Result<CommutatorReport> {
    let grid = *omega.grid();
    let axes = (0..grid.dim())
        .map(|axis| {
            let cx = commutator_position(omega, axis, config.convention)?;
            let cp = commutator_momentum(omega, axis, eps)?;
            let density = diagonal_density(&cx)?;
            axis_diagnostics(
                grid,
                axis,
                cx.norms()?.trace_norm,
                cp.norms()?.trace_norm,
                density,
                config.p,
            )
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(CommutatorReport { axes, n_eps })
}

/// `chi_{(r,z)}(x) = exp(-|x - z|^2 / r^2)` with minimum-image distances.
pub fn gaussian_window(grid: &Grid, r: f64, z: [f64; 3]) -> Vec<C64> {
    (0..grid.len())
        .map(|s| {
            let d = grid.min_image_distance(grid.position(s), z);
            C64::new((-d * d / (r * r)).exp(), 0.0)
        })
        .collect()
}

fn nearest_site(grid: &Grid, z: [f64; 3]) -> usize {
    let m = grid.sites_per_axis() as i64;
    let mut idx = [0usize; 3];
    for a in 0..grid.dim() {
        idx[a] = ((z[a] / grid.spacing()).round() as i64).rem_euclid(m) as usize;
    }
    grid.ravel(idx)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WindowAuditRow {
    pub r: f64,
    pub z: [f64; 3],
    pub lhs: f64,
    pub rhs: f64,
    pub ratio: f64,
}

#[derive(Debug, Clone)]
pub struct WindowAuditReport {
    pub rows: Vec<WindowAuditRow>,
    /// `max lhs / rhs` over rows with `rhs > 0`.
    pub fitted_c: f64,
    /// Least-squares slope of `log lhs` against `log r`, one intercept per center.
    pub r_exponent: Option<f64>,
    /// `3/2 - 3 delta` for three-dimensional grids, absent otherwise.
    pub predicted_exponent: Option<f64>,
    /// Rows with `rhs = 0` but `lhs > 1e-12`.
    pub degenerate: usize,
    pub dim: usize,
}

impl WindowAuditReport {
    pub fn exponent_gap(&self) -> Option<f64> {
        Some((self.r_exponent? - self.predicted_exponent?).abs())
    }

    /// CSV with header `r,z,lhs,rhs,ratio`; `z` components joined by `;`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("r,z,lhs,rhs,ratio\n");
        for row in &self.rows {
            let z: Vec<String> = row.z[..self.dim].iter().map(|v| format!("{v:e}")).collect();
            let _ = writeln!(out, "{:e},{},{:e},{:e},{:e}", row.r, z.join(";"), row.lhs, row.rhs, row.ratio);
        }
        out
    }
}

fn build_window_audit(
    grid: Grid,
    report: &CommutatorReport,
    config: &DiagnosticsConfig,
    mut lhs_of: impl FnMut(&[C64]) -> Result<f64>,
) -> Result<WindowAuditReport> {
    let l1: Vec<f64> = report.axes.iter().map(|a| a.norm_l1).collect();
    let mut rows = Vec::with_capacity(config.samples.len());
    for s in &config.samples {
        if !(s.r > 0.0) {
            return Err(invalid("r", "window radius must be positive"));
        }
        let chi = gaussian_window(&grid, s.r, s.z);
        let lhs = lhs_of(&chi)?;
        let site = nearest_site(&grid, s.z);
        let sum: f64 = report
            .axes
            .iter()
            .zip(&l1)
            .map(|(a, n1)| n1.powf(1.0 / 6.0 + config.delta) * a.maximal[site].re.powf(5.0 / 6.0 - config.delta))
            .sum();
        let rhs = s.r.powf(config.predicted_exponent()) * sum;
        let ratio = if rhs > 0.0 { lhs / rhs } else { f64::NAN };
        rows.push(WindowAuditRow {
            r: s.r,
            z: s.z,
            lhs,
            rhs,
            ratio,
        });
    }
    let degenerate = rows.iter().filter(|r| r.rhs <= 0.0 && r.lhs > 1e-12).count();
    let fitted_c = rows.iter().filter(|r| r.rhs > 0.0).map(|r| r.ratio).fold(0.0, f64::max);
    let r_exponent = grouped_slope(&rows);
    Ok(WindowAuditReport {
        rows,
        fitted_c,
        r_exponent,
        predicted_exponent: (grid.dim() == 3).then(|| config.predicted_exponent()),
        degenerate,
        dim: grid.dim(),
    })
}

/// Slope of `log lhs` against `log r` with a separate intercept per center.
fn grouped_slope(rows: &[WindowAuditRow]) -> Option<f64> {
    let mut centers: Vec<[f64; 3]> = Vec::new();
    for r in rows {
        if !centers.contains(&r.z) {
            centers.push(r.z);
        }
    }
    let (mut sxy, mut sxx) = (0.0, 0.0);
    for z in centers {
        let pts: Vec<(f64, f64)> = rows
            .iter()
            .filter(|r| r.z == z && r.lhs > 1e-12)
            .map(|r| (r.r.ln(), r.lhs.ln()))
            .collect();
        if pts.len() < 2 {
            continue;
        }
        let mx = pts.iter().map(|p| p.0).sum::<f64>() / pts.len() as f64;
        let my = pts.iter().map(|p| p.1).sum::<f64>() / pts.len() as f64;
        for (x, y) in pts {
            sxy += (x - mx) * (y - my);
            sxx += (x - mx) * (x - mx);
        }
    }
    (sxx > 0.0).then(|| sxy / sxx)
}

/// Audit of `||[chi_{(r,z)}, omega]||_tr` against
/// `r^{3/2 - 3 delta} sum_i ||rho_i||_1^{1/6 + delta} rho_i*(z)^{5/6 - delta}`
/// for an explicit operator.
pub fn window_audit(omega: &DenseOperator, eps: f64, config: &DiagnosticsConfig) -> Result<WindowAuditReport> {
    let grid = *omega.grid();
    let report = commutator_report_dense(omega, eps, 1.0, config)?;
    build_window_audit(grid, &report, config, |chi| {
        Ok(multiplier_commutator(omega, chi).norms()?.trace_norm)
    })
}

/// [`window_audit`] for a Slater state through factored commutators.
pub fn window_audit_state(state: &SlaterState, config: &DiagnosticsConfig) -> Result<WindowAuditReport> {
    let report = commutator_report(state, config)?;
    build_window_audit(*state.grid(), &report, config, |chi| {
        commutator_multiplier_lowrank(state, chi)?.trace_norm()
    })
}

/// One row of the propagated-regularity table.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RegularityRow {
    pub t: f64,
    pub axis: usize,
    pub norm_l1: f64,
    pub norm_lp: f64,
    pub over_n_eps: f64,
}

#[derive(Debug, Clone)]
pub struct RegularityReport {
    pub rows: Vec<RegularityRow>,
    /// `(t, sum_i [||rho_i||_1 + ||rho_i||_p] / (N eps))`.
    pub series: Vec<(f64, f64)>,
    /// Supremum of the series, the measured constant.
    pub fitted_c: f64,
    /// `sum_i tr|[x_i, omega]|` per snapshot, for consistency checks.
    pub trace_norm_sums: Vec<f64>,
}

impl RegularityReport {
    /// CSV with header `t,axis,norm_L1,norm_Lp,over_N_eps,fitted_C`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("t,axis,norm_L1,norm_Lp,over_N_eps,fitted_C\n");
        for r in &self.rows {
            let _ = writeln!(
                out,
                "{:e},{},{:e},{:e},{:e},{:e}",
                r.t, r.axis, r.norm_l1, r.norm_lp, r.over_n_eps, self.fitted_c
            );
        }
        out
    }

    /// Largest relative deviation of the series from its first value.
    pub fn relative_spread(&self) -> f64 {
        let Some(&(_, first)) = self.series.first() else {
            return 0.0;
        };
        self.series
            .iter()
            .map(|(_, v)| (v - first).abs() / first.abs().max(f64::MIN_POSITIVE))
            .fold(0.0, f64::max)
    }
}

/// Measures `sum_i [||rho_{|[x_i,omega_t]|}||_1 + ||.||_p] / (N eps)` along snapshots.
pub fn regularity_check(snapshots: &[SlaterState], config: &DiagnosticsConfig) -> Result<RegularityReport> {
    let mut rows = Vec::new();
    let mut series = Vec::new();
    let mut sums = Vec::new();
    for s in snapshots {
        let rep = commutator_report(s, config)?;
        for a in &rep.axes {
            rows.push(RegularityRow {
                t: s.time(),
                axis: a.axis,
                norm_l1: a.norm_l1,
                norm_lp: a.norm_lp,
                over_n_eps: (a.norm_l1 + a.norm_lp) / rep.n_eps,
            });
        }
        series.push((s.time(), rep.regularity_value()));
        sums.push(rep.axes.iter().map(|a| a.position_trace_norm).sum());
    }
    let fitted_c = series.iter().map(|s| s.1).fold(0.0, f64::max);
    Ok(RegularityReport {
        rows,
        series,
        fitted_c,
        trace_norm_sums: sums,
    })
}

/// Ordinary least-squares `(slope, intercept)` of `log y` against `log x`.
pub fn fit_power_law(xs: &[f64], ys: &[f64]) -> Option<(f64, f64)> {
    if xs.len() != ys.len() || xs.len() < 2 {
        return None;
    }
    let lx: Vec<f64> = xs.iter().map(|v| v.ln()).collect();
    let ly: Vec<f64> = ys.iter().map(|v| v.ln()).collect();
    if lx.iter().chain(&ly).any(|v| !v.is_finite()) {
        return None;
    }
    let n = lx.len() as f64;
    let mx = lx.iter().sum::<f64>() / n;
    let my = ly.iter().sum::<f64>() / n;
    let sxx: f64 = lx.iter().map(|x| (x - mx).powi(2)).sum();
    if sxx == 0.0 {
        return None;
    }
    let sxy: f64 = lx.iter().zip(&ly).map(|(x, y)| (x - mx) * (y - my)).sum();
    let slope = sxy / sxx;
    Some((slope, my - slope * mx))
}
