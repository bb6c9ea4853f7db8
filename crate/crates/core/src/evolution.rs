//! Time evolution of a [`ModeSet`], density grids and revival diagnostics.
//!
//! The density is evaluated as `|Σ_m c_m φ_m(z) e^{−iE_m t}|²`, which costs
//! O(M) per grid point. The explicit double sum over mode pairs is kept as
//! [`double_sum_oracle`] for cross-checking. Phases use the energy above
//! the rest energy; a common offset only contributes a global phase.

use std::f64::consts::PI;

use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::numeric::trapezoid;
use crate::packet::ModeSet;
use crate::spectrum::{ModelKind, PhysicalParams};

/// Largest grid (in cells) [`density_grid`] will allocate.
pub const MAX_GRID_CELLS: usize = 1 << 28;

/// Default mode-count guard of [`double_sum_oracle`].
pub const ORACLE_MAX_MODES: usize = 128;

/// Default threshold of [`detect_revivals`].
pub const REVIVAL_THRESHOLD: f64 = 0.9;

/// Uniform space-time sampling of `[0, L] × [0, t_max · t_unit]`, endpoints
/// inclusive.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridSpec {
    pub nz: usize,
    pub nt: usize,
    /// End time in units of `t_unit`.
    pub t_max: f64,
    /// Time unit, normally the model's analytic revival time.
    pub t_unit: f64,
    pub length: f64,
}

impl GridSpec {
    pub fn new(nz: usize, nt: usize, t_max: f64, t_unit: f64, length: f64) -> Result<Self> {
        if nz < 2 || nt < 2 {
            return Err(Error::InvalidGrid(format!("nz and nt must be >= 2 (got {nz}x{nt})")));
        }
        if !(t_max.is_finite() && t_max > 0.0) {
            return Err(Error::InvalidGrid(format!("t_max must be > 0 (got {t_max})")));
        }
        if !(t_unit.is_finite() && t_unit > 0.0) {
            return Err(Error::InvalidGrid(format!("time unit must be > 0 (got {t_unit})")));
        }
        if !(length.is_finite() && length > 0.0) {
            return Err(Error::InvalidGrid(format!("length must be > 0 (got {length})")));
        }
        Ok(Self { nz, nt, t_max, t_unit, length })
    }

    pub fn z(&self, j: usize) -> f64 {
        self.length * j as f64 / (self.nz - 1) as f64
    }

    pub fn t(&self, i: usize) -> f64 {
        self.t_end() * i as f64 / (self.nt - 1) as f64
    }

    pub fn t_end(&self) -> f64 {
        self.t_max * self.t_unit
    }

    pub fn dz(&self) -> f64 {
        self.length / (self.nz - 1) as f64
    }

    pub fn cells(&self) -> usize {
        self.nz.saturating_mul(self.nt)
    }

    fn same_as(&self, other: &GridSpec) -> std::result::Result<(), String> {
        let close = |a: f64, b: f64| (a - b).abs() <= 1e-12 * a.abs().max(b.abs());
        if self.nz != other.nz || self.nt != other.nt {
            return Err(format!(
                "shape {}x{} vs {}x{}",
                self.nz, self.nt, other.nz, other.nt
            ));
        }
        if !close(self.t_end(), other.t_end()) {
            return Err(format!("time span {} vs {}", self.t_end(), other.t_end()));
        }
        if !close(self.length, other.length) {
            return Err(format!("length {} vs {}", self.length, other.length));
        }
        Ok(())
    }
}

/// Row-major densities, one row per time sample.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityGrid {
    pub spec: GridSpec,
    pub model: ModelKind,
    /// Relativistic parameter of the model that produced the grid.
    pub q: f64,
    values: Vec<f64>,
    norm0: f64,
}

impl DensityGrid {
    pub fn from_values(spec: GridSpec, model: ModelKind, q: f64, values: Vec<f64>) -> Result<Self> {
        if values.len() != spec.cells() {
            return Err(Error::InvalidGrid(format!(
                "{} values for a {}x{} grid",
                values.len(),
                spec.nz,
                spec.nt
            )));
        }
        let norm0 = trapezoid(&values[..spec.nz], spec.dz());
        Ok(Self { spec, model, q, values, norm0 })
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// `∫ρ(z, 0) dz` by the trapezoid rule.
    pub fn norm0(&self) -> f64 {
        self.norm0
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.values[i * self.spec.nz..(i + 1) * self.spec.nz]
    }

    pub fn rows(&self) -> impl Iterator<Item = &[f64]> {
        self.values.chunks_exact(self.spec.nz)
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.values[i * self.spec.nz + j]
    }

    pub fn peak(&self) -> f64 {
        self.values.iter().copied().fold(0.0, f64::max)
    }

    pub fn row_integrals(&self) -> Vec<f64> {
        self.rows().map(|r| trapezoid(r, self.spec.dz())).collect()
    }

    /// Largest `|∫ρ(z,t)dz − norm0| / norm0` over all rows.
    pub fn max_norm_deviation(&self) -> f64 {
        self.row_integrals()
            .into_iter()
            .map(|n| (n - self.norm0).abs() / self.norm0)
            .fold(0.0, f64::max)
    }

    /// Interference contrast `std(ρ) / mean(ρ)` over all cells.
    pub fn contrast(&self) -> f64 {
        let n = self.values.len() as f64;
        let mean = self.values.iter().sum::<f64>() / n;
        let var = self.values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / n;
        var.sqrt() / mean
    }
}

/// `Ψ(z, t) = Σ_m c_m φ_m(z) e^{−iE_m t}`.
pub fn wavefunction_at(set: &ModeSet, z: f64, t: f64) -> Complex64 {
    set.iter()
        .enumerate()
        .map(|(i, (mode, c))| c * set.mode_function(i, z) * Complex64::cis(-mode.kinetic * t))
        .sum()
}

fn allocate(spec: &GridSpec) -> Result<Vec<f64>> {
    let too_large = || Error::GridTooLarge { nz: spec.nz, nt: spec.nt, limit: MAX_GRID_CELLS };
    if spec.cells() > MAX_GRID_CELLS {
        return Err(too_large());
    }
    let mut values = Vec::new();
    values.try_reserve_exact(spec.cells()).map_err(|_| too_large())?;
    values.resize(spec.cells(), 0.0);
    Ok(values)
}

/// Evaluates `|Ψ(z_j, t_i)|²` on the grid. Rows are computed in parallel;
/// every cell is summed in mode order, so the result does not depend on the
/// thread count.
pub fn density_grid(set: &ModeSet, spec: &GridSpec) -> Result<DensityGrid> {
    let mut values = allocate(spec)?;
    let m = set.len();
    let spatial: Vec<Complex64> = (0..spec.nz)
        .flat_map(|j| {
            let z = spec.z(j);
            set.coeffs().iter().enumerate().map(move |(i, c)| c * set.mode_function(i, z))
        })
        .collect();
    let kinetic: Vec<f64> = set.modes().iter().map(|mode| mode.kinetic).collect();

    values.par_chunks_mut(spec.nz).enumerate().for_each(|(i, row)| {
        let t = spec.t(i);
        let phases: Vec<Complex64> = kinetic.iter().map(|e| Complex64::cis(-e * t)).collect();
        for (cell, amps) in row.iter_mut().zip(spatial.chunks_exact(m)) {
            let psi: Complex64 = amps.iter().zip(&phases).map(|(a, p)| a * p).sum();
            *cell = psi.norm_sqr();
        }
    });
    DensityGrid::from_values(*spec, set.model(), set.q(), values)
}

/// Density by the explicit double sum
/// `Σ_m Σ_n conj(c_m φ_m) c_n φ_n e^{−i(E_n − E_m)t}`, limited to
/// [`ORACLE_MAX_MODES`] modes.
pub fn double_sum_oracle(set: &ModeSet, spec: &GridSpec) -> Result<DensityGrid> {
    double_sum_oracle_with_limit(set, spec, ORACLE_MAX_MODES)
}

pub fn double_sum_oracle_with_limit(
    set: &ModeSet,
    spec: &GridSpec,
    max_modes: usize,
) -> Result<DensityGrid> {
    if set.len() > max_modes {
        return Err(Error::OracleTooLarge { modes: set.len(), limit: max_modes });
    }
    let mut values = allocate(spec)?;
    let modes = set.modes();
    let mut residual = 0.0f64;
    for i in 0..spec.nt {
        let t = spec.t(i);
        let beats: Vec<Complex64> = modes
            .iter()
            .flat_map(|m| modes.iter().map(move |n| Complex64::cis(-(n.kinetic - m.kinetic) * t)))
            .collect();
        for j in 0..spec.nz {
            let z = spec.z(j);
            let amps: Vec<Complex64> = set
                .coeffs()
                .iter()
                .enumerate()
                .map(|(k, c)| c * set.mode_function(k, z))
                .collect();
            let mut acc = Complex64::new(0.0, 0.0);
            for (a, am) in amps.iter().enumerate() {
                for (b, an) in amps.iter().enumerate() {
                    acc += am.conj() * an * beats[a * modes.len() + b];
                }
            }
            residual = residual.max(acc.im.abs());
            values[i * spec.nz + j] = acc.re;
        }
    }
    let peak = values.iter().copied().fold(0.0, f64::max);
    if residual > 1e-10 * peak {
        return Err(Error::OracleResidual { residual, peak });
    }
    DensityGrid::from_values(*spec, set.model(), set.q(), values)
}

/// `A(t) = |Σ_m |c_m|² e^{−iE_m t}|²` at each requested time.
pub fn autocorrelation(set: &ModeSet, times: &[f64]) -> Vec<(f64, f64)> {
    let weights: Vec<(f64, f64)> =
        set.iter().map(|(m, c)| (c.norm_sqr(), m.kinetic)).collect();
    times
        .iter()
        .map(|&t| {
            let overlap: Complex64 =
                weights.iter().map(|&(w, e)| Complex64::cis(-e * t) * w).sum();
            (t, overlap.norm_sqr())
        })
        .collect()
}

/// `π √(1 + 4n₀²q²) / (2 E₀ q² n₀)` for rest energy `E₀`.
pub fn revival_time_formula(rest_energy: f64, q: f64, n0: u32) -> f64 {
    let n0 = f64::from(n0);
    PI * (1.0 + 4.0 * n0 * n0 * q * q).sqrt() / (2.0 * rest_energy * (q * q) * n0)
}

/// Closed-form revival time of `model`. The Schrödinger model and both Dirac
/// series regimes use `T_sch`.
pub fn analytic_revival_time(model: ModelKind, params: &PhysicalParams, n0: u32) -> Result<f64> {
    if n0 == 0 {
        return Err(Error::InvalidModeIndex(n0));
    }
    Ok(match model {
        ModelKind::Schrodinger | ModelKind::DiracSlightRel | ModelKind::DiracNonRelLimit => {
            params.trev_sch()
        }
        ModelKind::DiracExact => revival_time_formula(params.rest_energy_dirac(), params.q(), n0),
        ModelKind::KleinGordon => {
            revival_time_formula(params.rest_energy_kg(), params.q_prime(), n0)
        }
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RevivalPeak {
    pub t: f64,
    pub a: f64,
}

/// Local maxima of an autocorrelation trace with `A ≥ threshold`. Interior
/// maxima are refined by a parabola through the three bracketing samples.
/// The first sample is the reference state and never counts; the last one
/// counts when the trace is still rising into it.
pub fn detect_revivals(trace: &[(f64, f64)], threshold: f64) -> Result<Vec<RevivalPeak>> {
    if trace.is_empty() {
        return Err(Error::EmptyTrace);
    }
    let mut peaks = Vec::new();
    for i in 1..trace.len() {
        let (t, a) = trace[i];
        let (_, prev) = trace[i - 1];
        if a < threshold || a < prev {
            continue;
        }
        match trace.get(i + 1) {
            None => {
                if a > prev {
                    peaks.push(RevivalPeak { t, a });
                }
            }
            Some(&(t_next, next)) => {
                if a <= next {
                    continue;
                }
                let curvature = prev - 2.0 * a + next;
                let (dt_shift, a_peak) = if curvature < 0.0 {
                    let offset = 0.5 * (prev - next) / curvature;
                    (offset, a - 0.25 * (prev - next) * offset)
                } else {
                    (0.0, a)
                };
                let dt = 0.5 * (t_next - trace[i - 1].0);
                peaks.push(RevivalPeak { t: t + dt_shift * dt, a: a_peak });
            }
        }
    }
    Ok(peaks)
}

/// Analytic revival time, autocorrelation trace and detected peaks.
#[derive(Debug, Clone, PartialEq)]
pub struct RevivalReport {
    pub model: ModelKind,
    pub analytic_trev: f64,
    pub n0: u32,
    pub autocorr: Vec<(f64, f64)>,
    pub peaks: Vec<RevivalPeak>,
}

/// Samples `A(t)` at `samples` points over `[0, t_max · T_rev]`, with `n0`
/// defaulting to the weighted mean mode index.
pub fn revival_report(
    set: &ModeSet,
    params: &PhysicalParams,
    n0: Option<u32>,
    t_max: f64,
    samples: usize,
    threshold: f64,
) -> Result<RevivalReport> {
    if samples < 2 {
        return Err(Error::InvalidGrid(format!("need at least 2 time samples (got {samples})")));
    }
    let n0 = n0.unwrap_or_else(|| set.mean_mode_index());
    let analytic_trev = analytic_revival_time(set.model(), params, n0)?;
    let t_end = t_max * analytic_trev;
    let times: Vec<f64> =
        (0..samples).map(|i| t_end * i as f64 / (samples - 1) as f64).collect();
    let autocorr = autocorrelation(set, &times);
    let peaks = detect_revivals(&autocorr, threshold)?;
    Ok(RevivalReport { model: set.model(), analytic_trev, n0, autocorr, peaks })
}

/// Differences between two unit-peak-scaled grids.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridComparison {
    pub max_abs: f64,
    pub rms: f64,
}

pub fn compare_grids(a: &DensityGrid, b: &DensityGrid) -> Result<GridComparison> {
    a.spec.same_as(&b.spec).map_err(Error::GridMismatch)?;
    let (pa, pb) = (a.peak(), b.peak());
    if pa <= 0.0 || pb <= 0.0 {
        return Err(Error::ZeroPeak);
    }
    let mut max_abs = 0.0f64;
    let mut sum_sq = 0.0;
    for (x, y) in a.values().iter().zip(b.values()) {
        let d = (x / pa - y / pb).abs();
        max_abs = max_abs.max(d);
        sum_sq += d * d;
    }
    Ok(GridComparison { max_abs, rms: (sum_sq / a.values().len() as f64).sqrt() })
}
