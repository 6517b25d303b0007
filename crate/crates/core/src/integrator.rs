//! Strang split-step integration with exact substeps.
//!
//! The linear substep is the free propagator. The nonlinear substep is a
//! pointwise phase rotation: each law has the form `i∂ₜu = F(|u|²) u`
//! with real `F`, so `|u|` is frozen and `u ← u e^{-iF τ}` is exact.
//! For the excitation laws the rotation is applied to `u = 1 + v` but
//! evaluated in `v` to keep full relative precision on small data.

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::energy::{gronwall_rate, EnergyReport};
use crate::equations::{critical_power, gl_density, nonlinearity, EquationSpec};
use crate::error::{Error, Result};
use crate::fft;
use crate::field::{chunked_sum, chunked_sum_indexed, ComplexField};
use crate::grid::Grid;
use crate::spectral::{lp_norm, propagator_phases};

pub const DEFAULT_GUARD: f64 = 1e6;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct StepConfig {
    pub dt: f64,
    pub n_steps: usize,
    pub snapshot_stride: usize,
    /// Zero every mode with `|k| > k_Nyquist / 2` in the linear substep.
    pub dealias: bool,
    /// Keep snapshot fields; diagnostics are always recorded.
    pub keep_fields: bool,
    /// Abort once `sup|v|` exceeds this value.
    pub guard: f64,
}

impl StepConfig {
    pub fn new(dt: f64, n_steps: usize, snapshot_stride: usize) -> Result<Self> {
        let cfg = Self {
            dt,
            n_steps,
            snapshot_stride,
            dealias: false,
            keep_fields: true,
            guard: DEFAULT_GUARD,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    /// Steps of size `dt` covering `[0, total]`; `total` must be a whole
    /// number of steps.
    pub fn covering(total: f64, dt: f64, snapshot_stride: usize) -> Result<Self> {
        if !(dt > 0.0 && dt.is_finite()) {
            return Err(Error::param("dt", format!("must be positive, got {dt}")));
        }
        let steps = (total / dt).round();
        if steps < 1.0 || (steps * dt - total).abs() > 1e-9 * total.abs().max(dt) {
            return Err(Error::param(
                "T",
                format!("{total} is not a whole number of steps of {dt}"),
            ));
        }
        Self::new(dt, steps as usize, snapshot_stride)
    }

    pub fn with_dealias(mut self, on: bool) -> Self {
        self.dealias = on;
        self
    }

    pub fn with_keep_fields(mut self, keep: bool) -> Self {
        self.keep_fields = keep;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.dt > 0.0 && self.dt.is_finite()) {
            return Err(Error::param("dt", format!("must be positive, got {}", self.dt)));
        }
        if self.n_steps == 0 {
            return Err(Error::param("n_steps", "must be at least 1"));
        }
        if self.snapshot_stride == 0 {
            return Err(Error::param("snapshot_stride", "must be at least 1"));
        }
        if !(self.guard > 0.0) {
            return Err(Error::param("guard", "must be positive"));
        }
        Ok(())
    }

    pub fn total_time(&self) -> f64 {
        self.n_steps as f64 * self.dt
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct NormRecord {
    pub h1dot: f64,
    pub l2: f64,
    pub l4: f64,
    pub l6: f64,
    pub linf: f64,
    pub boundary_shell_max: f64,
}

/// Per-snapshot diagnostics.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Diagnostics {
    pub energy: EnergyReport,
    pub norms: NormRecord,
    /// `∂ₜ∫|Re v|²` evaluated from the snapshot.
    pub mass_rhs: f64,
}

impl Diagnostics {
    /// One forward and one inverse transform per call.
    pub fn compute(v: &ComplexField, spec: &EquationSpec) -> Self {
        let grid = *v.grid();
        let mut spec_buf = v.values().to_vec();
        fft::forward(&grid, &mut spec_buf);
        let k2 = grid.k_squared();
        let n = grid.len() as f64;
        let h1_sq = grid.volume() / (n * n)
            * chunked_sum_indexed(grid.len(), |i| k2[i] * spec_buf[i].norm_sqr());
        spec_buf
            .par_iter_mut()
            .zip(k2.par_iter())
            .for_each(|(c, &k)| *c *= -k);
        fft::inverse(&grid, &mut spec_buf);
        let lap = spec_buf;

        let vals = v.values();
        let w = grid.cell_volume();
        let dispersive = -2.0 * w * chunked_sum_indexed(grid.len(), |i| vals[i].re * lap[i].im);
        let s = *spec;
        let nonlinear = 2.0 * w * chunked_sum(vals, move |&z| z.re * nonlinearity(&s, z).im);

        let potential = w * match s {
            EquationSpec::Gp4 => chunked_sum(vals, |&z| {
                let q = gl_density(z);
                0.25 * q * q
            }),
            EquationSpec::Cq3 { gamma } => chunked_sum(vals, move |&z| {
                let q = gl_density(z);
                0.25 * gamma * q * q + q * q * q / 6.0
            }),
            EquationSpec::EnergyCritical { dim: 4 } => {
                chunked_sum(vals, |&z| 0.25 * z.norm_sqr().powi(2))
            }
            EquationSpec::EnergyCritical { .. } => {
                chunked_sum(vals, |&z| z.norm_sqr().powi(3) / 6.0)
            }
        };
        let energy = 0.5 * h1_sq + potential;
        let re_l2_sq = w * chunked_sum(vals, |&z| z.re * z.re);
        let c0 = match s {
            EquationSpec::Cq3 { gamma } => 3.0 + gamma / 6.0,
            _ => 0.0,
        };

        let finite = |r| lp_norm(v, r).expect("finite exponent");
        Self {
            energy: EnergyReport {
                energy,
                re_l2_sq,
                m_value: energy + c0 * re_l2_sq,
                c0,
            },
            norms: NormRecord {
                h1dot: h1_sq.sqrt(),
                l2: finite(2.0),
                l4: finite(4.0),
                l6: finite(6.0),
                linf: v.max_abs(),
                boundary_shell_max: v.boundary_shell_max(),
            },
            mass_rhs: dispersive + nonlinear,
        }
    }
}

/// Time-stamped snapshots of one run.
#[derive(Clone, Debug, PartialEq)]
pub struct Trajectory {
    spec: EquationSpec,
    grid: Grid,
    timestamps: Vec<f64>,
    snapshots: Vec<ComplexField>,
    diagnostics: Vec<Diagnostics>,
    final_field: ComplexField,
}

impl Trajectory {
    /// Assemble a trajectory from stored snapshots, computing diagnostics.
    pub fn from_snapshots(
        spec: EquationSpec,
        timestamps: Vec<f64>,
        snapshots: Vec<ComplexField>,
    ) -> Result<Self> {
        if snapshots.is_empty() || snapshots.len() != timestamps.len() {
            return Err(Error::Format(format!(
                "{} timestamps for {} snapshots",
                timestamps.len(),
                snapshots.len()
            )));
        }
        if timestamps.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(Error::Format("timestamps must be strictly increasing".into()));
        }
        let grid = *snapshots[0].grid();
        if snapshots.iter().any(|s| *s.grid() != grid) {
            return Err(Error::GridMismatch("snapshots on different grids".into()));
        }
        if grid.dim() != spec.dim() {
            return Err(Error::GridMismatch(format!(
                "{} law on a {}-dimensional grid",
                spec.label(),
                grid.dim()
            )));
        }
        let diagnostics = snapshots.iter().map(|s| Diagnostics::compute(s, &spec)).collect();
        let final_field = snapshots.last().cloned().expect("nonempty");
        Ok(Self {
            spec,
            grid,
            timestamps,
            snapshots,
            diagnostics,
            final_field,
        })
    }

    pub fn spec(&self) -> &EquationSpec {
        &self.spec
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn timestamps(&self) -> &[f64] {
        &self.timestamps
    }

    /// Empty when the run was made with `keep_fields = false`.
    pub fn snapshots(&self) -> &[ComplexField] {
        &self.snapshots
    }

    pub fn diagnostics(&self) -> &[Diagnostics] {
        &self.diagnostics
    }

    pub fn final_field(&self) -> &ComplexField {
        &self.final_field
    }

    pub fn len(&self) -> usize {
        self.timestamps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.timestamps.is_empty()
    }

    pub fn has_fields(&self) -> bool {
        !self.snapshots.is_empty()
    }

    pub fn start_time(&self) -> f64 {
        self.timestamps[0]
    }

    pub fn end_time(&self) -> f64 {
        *self.timestamps.last().expect("nonempty trajectory")
    }

    pub(crate) fn require_fields(&self) -> Result<()> {
        if self.has_fields() {
            Ok(())
        } else {
            Err(Error::InsufficientSampling(
                "trajectory was recorded without snapshot fields".into(),
            ))
        }
    }

    /// Pointwise combination of two trajectories sampled at the same times.
    pub fn zip_with<F>(&self, other: &Self, spec: EquationSpec, f: F) -> Result<Self>
    where
        F: Fn(Complex64, Complex64) -> Complex64 + Sync,
    {
        self.require_fields()?;
        other.require_fields()?;
        if self.timestamps != other.timestamps {
            return Err(Error::Format("trajectories sampled at different times".into()));
        }
        let snaps = self
            .snapshots
            .iter()
            .zip(&other.snapshots)
            .map(|(a, b)| a.zip_map(b, &f))
            .collect::<Result<Vec<_>>>()?;
        Self::from_snapshots(spec, self.timestamps.clone(), snaps)
    }

    /// `max_t |E(t) - E(0)| / |E(0)|` (absolute when `E(0) = 0`).
    pub fn max_energy_drift(&self) -> f64 {
        let e0 = self.diagnostics[0].energy.energy;
        let scale = if e0 == 0.0 { 1.0 } else { e0.abs() };
        self.diagnostics
            .iter()
            .map(|d| (d.energy.energy - e0).abs() / scale)
            .fold(0.0, f64::max)
    }
}

/// Precomputed linear propagator and nonlinear rotation for one `dt`.
pub struct Stepper {
    spec: EquationSpec,
    grid: Grid,
    half_dt: f64,
    linear: Vec<Complex64>,
}

impl Stepper {
    pub fn new(spec: EquationSpec, grid: Grid, dt: f64, dealias: bool) -> Self {
        let mut linear = propagator_phases(&grid, dt);
        if dealias {
            let cutoff = 0.5 * grid.nyquist();
            let k2 = grid.k_squared();
            linear
                .par_iter_mut()
                .zip(k2.par_iter())
                .filter(|(_, &k)| k > cutoff * cutoff)
                .for_each(|(m, _)| *m = Complex64::new(0.0, 0.0));
        }
        Self {
            spec,
            grid,
            half_dt: 0.5 * dt,
            linear,
        }
    }

    fn nonlinear(&self, values: &mut [Complex64]) {
        let tau = self.half_dt;
        match self.spec {
            EquationSpec::Gp4 => values.par_iter_mut().for_each(|z| {
                let q = gl_density(*z);
                *z = rotate_excitation(*z, -q * tau);
            }),
            EquationSpec::Cq3 { gamma } => values.par_iter_mut().for_each(|z| {
                let q = gl_density(*z);
                *z = rotate_excitation(*z, -q * (q + gamma) * tau);
            }),
            EquationSpec::EnergyCritical { dim } => values.par_iter_mut().for_each(|z| {
                let theta = -critical_power(dim, z.norm_sqr()) * tau;
                *z *= Complex64::from_polar(1.0, theta);
            }),
        }
    }

    fn linear(&self, values: &mut [Complex64]) {
        fft::forward(&self.grid, values);
        values
            .par_iter_mut()
            .zip(self.linear.par_iter())
            .for_each(|(c, m)| *c *= m);
        fft::inverse(&self.grid, values);
    }

    /// One Strang step in place.
    pub fn step(&self, values: &mut [Complex64]) {
        self.nonlinear(values);
        self.linear(values);
        self.nonlinear(values);
    }
}

/// `(1 + v) e^{iθ} - 1`, with `e^{iθ} - 1 = -2 sin²(θ/2) + i sin θ`.
#[inline]
fn rotate_excitation(v: Complex64, theta: f64) -> Complex64 {
    let (s, c) = theta.sin_cos();
    let half = (0.5 * theta).sin();
    let rot = Complex64::new(c, s);
    v * rot + Complex64::new(-2.0 * half * half, s)
}

/// Half nonlinear, full linear, half nonlinear substep. Negative `dt`
/// runs the scheme backwards.
pub fn strang_step(spec: &EquationSpec, v: &ComplexField, dt: f64) -> ComplexField {
    let stepper = Stepper::new(*spec, *v.grid(), dt, false);
    let mut values = v.values().to_vec();
    stepper.step(&mut values);
    ComplexField::from_raw(*v.grid(), values)
}

/// `sup|v|`, or NaN if any entry is non-finite.
fn guarded_sup(values: &[Complex64]) -> f64 {
    values
        .par_iter()
        .map(|z| if z.is_finite() { z.norm() } else { f64::NAN })
        .reduce(
            || 0.0,
            |a, b| if a.is_nan() || b.is_nan() { f64::NAN } else { a.max(b) },
        )
}

pub fn evolve(spec: &EquationSpec, v0: &ComplexField, cfg: &StepConfig) -> Result<Trajectory> {
    spec.validate()?;
    cfg.validate()?;
    let grid = *v0.grid();
    if grid.dim() != spec.dim() {
        return Err(Error::GridMismatch(format!(
            "{} law needs a {}-dimensional grid, got {}",
            spec.label(),
            spec.dim(),
            grid.dim()
        )));
    }
    let stepper = Stepper::new(*spec, grid, cfg.dt, cfg.dealias);
    let mut traj = Trajectory {
        spec: *spec,
        grid,
        timestamps: vec![0.0],
        snapshots: if cfg.keep_fields { vec![v0.clone()] } else { Vec::new() },
        diagnostics: vec![Diagnostics::compute(v0, spec)],
        final_field: v0.clone(),
    };
    let mut values = v0.values().to_vec();
    for step in 1..=cfg.n_steps {
        stepper.step(&mut values);
        let t = step as f64 * cfg.dt;
        let sup = guarded_sup(&values);
        if sup.is_nan() {
            return Err(Error::NumericalFailure {
                time: t,
                partial: Box::new(traj),
            });
        }
        if sup > cfg.guard {
            return Err(Error::BlowUp {
                time: t,
                value: sup,
                guard: cfg.guard,
                partial: Box::new(traj),
            });
        }
        if step % cfg.snapshot_stride == 0 || step == cfg.n_steps {
            let field = ComplexField::from_raw(grid, values.clone());
            traj.timestamps.push(t);
            traj.diagnostics.push(Diagnostics::compute(&field, spec));
            if cfg.keep_fields {
                traj.snapshots.push(field.clone());
            }
            traj.final_field = field;
        }
    }
    Ok(traj)
}

/// Outcome of a step-halving study.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub enum OrderEstimate {
    /// Observed order from the finest three levels.
    Measured {
        order: f64,
        orders: Vec<f64>,
        differences: Vec<f64>,
    },
    /// Differences at rounding level: the scheme is exact on this data.
    ExactIntegration { differences: Vec<f64> },
}

impl OrderEstimate {
    pub fn order(&self) -> Option<f64> {
        match self {
            OrderEstimate::Measured { order, .. } => Some(*order),
            OrderEstimate::ExactIntegration { .. } => None,
        }
    }

    pub fn differences(&self) -> &[f64] {
        match self {
            OrderEstimate::Measured { differences, .. } => differences,
            OrderEstimate::ExactIntegration { differences } => differences,
        }
    }
}

/// Relative L² level below which successive differences count as rounding.
const EXACT_LEVEL: f64 = 1e-11;

/// Final-time solutions for each `dt` in a halving ladder.
pub(crate) fn final_states(
    spec: &EquationSpec,
    v0: &ComplexField,
    total: f64,
    dt_list: &[f64],
) -> Result<Vec<ComplexField>> {
    dt_list
        .iter()
        .map(|&dt| {
            let cfg = StepConfig::covering(total, dt, usize::MAX)?.with_keep_fields(false);
            evolve(spec, v0, &cfg).map(|t| t.final_field().clone())
        })
        .collect()
}

pub(crate) fn order_from_states(states: &[ComplexField]) -> Result<OrderEstimate> {
    let differences = states
        .windows(2)
        .map(|w| lp_norm(&w[0].sub(&w[1])?, 2.0))
        .collect::<Result<Vec<f64>>>()?;
    let scale = lp_norm(states.last().expect("nonempty"), 2.0)?.max(f64::MIN_POSITIVE);
    if differences.iter().all(|&d| d <= EXACT_LEVEL * scale) {
        return Ok(OrderEstimate::ExactIntegration { differences });
    }
    if differences.windows(2).any(|w| !(w[1] < w[0])) {
        return Err(Error::InconclusiveOrder(format!(
            "differences are not decreasing: {differences:?}"
        )));
    }
    let orders: Vec<f64> = differences.windows(2).map(|w| (w[0] / w[1]).log2()).collect();
    Ok(OrderEstimate::Measured {
        order: *orders.last().expect("at least two differences"),
        orders,
        differences,
    })
}

pub(crate) fn check_halving(dt_list: &[f64]) -> Result<()> {
    if dt_list.len() < 3 {
        return Err(Error::param("dt_list", "needs at least three step sizes"));
    }
    for w in dt_list.windows(2) {
        if (w[0] - 2.0 * w[1]).abs() > 1e-12 * w[0] {
            return Err(Error::param("dt_list", "each step must halve the previous one"));
        }
    }
    Ok(())
}

/// Observed temporal order from final-time solutions on a halving ladder.
pub fn convergence_order(
    spec: &EquationSpec,
    v0: &ComplexField,
    total: f64,
    dt_list: &[f64],
) -> Result<OrderEstimate> {
    check_halving(dt_list)?;
    order_from_states(&final_states(spec, v0, total, dt_list)?)
}

/// Centered finite difference of `∫|Re v|²` against the evaluated
/// right-hand side, at every interior snapshot: `(t, fd, rhs)`.
pub fn mass_identity_residuals(traj: &Trajectory) -> Vec<(f64, f64, f64)> {
    let t = traj.timestamps();
    let d = traj.diagnostics();
    (1..traj.len().saturating_sub(1))
        .map(|k| {
            let fd = (d[k + 1].energy.re_l2_sq - d[k - 1].energy.re_l2_sq) / (t[k + 1] - t[k - 1]);
            (t[k], fd, d[k].mass_rhs)
        })
        .collect()
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct GronwallCheck {
    pub c1: f64,
    /// `min_t (C₁ M - ∂ₜM)` over interior snapshots.
    pub min_margin: f64,
    pub rate_holds: bool,
    /// `M(t) ≤ M(0) e^{C₁ t}` at every snapshot.
    pub exponential_holds: bool,
}

/// Check `∂ₜM ≤ C₁ M` (finite-differenced) along a cubic-quintic run.
pub fn gronwall_check(traj: &Trajectory) -> Result<GronwallCheck> {
    let gamma = traj
        .spec()
        .gamma()
        .ok_or_else(|| Error::param("spec", "the modified energy is defined for CQ3"))?;
    let c1 = gronwall_rate(gamma)?;
    let t = traj.timestamps();
    let d = traj.diagnostics();
    let m: Vec<f64> = d.iter().map(|x| x.energy.m_value).collect();
    let mut min_margin = f64::INFINITY;
    for k in 1..traj.len().saturating_sub(1) {
        let dm = (m[k + 1] - m[k - 1]) / (t[k + 1] - t[k - 1]);
        min_margin = min_margin.min(c1 * m[k] - dm);
    }
    let exponential_holds = m
        .iter()
        .zip(t)
        .all(|(&mk, &tk)| mk <= m[0] * (c1 * tk).exp() * (1.0 + 1e-12) + 1e-300);
    Ok(GronwallCheck {
        c1,
        min_margin,
        rate_holds: min_margin >= 0.0,
        exponential_holds,
    })
}
