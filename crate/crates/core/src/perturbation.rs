//! Paired runs of a full law against its energy-critical part.

use serde::{Deserialize, Serialize};

use crate::equations::EquationSpec;
use crate::error::{Error, Result};
use crate::field::ComplexField;
use crate::integrator::{check_halving, evolve, final_states, order_from_states, StepConfig, Trajectory};
use crate::spectral::{free_propagator, h1dot_norm, lp_norm};
use crate::strichartz::{critical_pair, mixed_norm, mixed_norm_samples, n0_proxy, s1_finite_norm, FieldSelector};

#[derive(Clone, Debug, PartialEq)]
pub struct ComparisonSetup {
    /// GP4 or CQ3.
    pub spec: EquationSpec,
    pub v0: ComplexField,
    pub w0: ComplexField,
    pub config: StepConfig,
    pub interval: (f64, f64),
}

impl ComparisonSetup {
    pub fn validate(&self) -> Result<()> {
        self.spec.validate()?;
        if matches!(self.spec, EquationSpec::EnergyCritical { .. }) {
            return Err(Error::param("spec", "compare a GP4 or CQ3 law against its critical part"));
        }
        self.v0.check_same_grid(&self.w0)?;
        if self.v0.grid().dim() != self.spec.dim() {
            return Err(Error::GridMismatch(format!(
                "{} law on a {}-dimensional grid",
                self.spec.label(),
                self.v0.grid().dim()
            )));
        }
        self.config.validate()?;
        let (a, b) = self.interval;
        let end = self.config.total_time();
        if !(a >= 0.0 && a < b && b <= end * (1.0 + 1e-12)) {
            return Err(Error::IntervalOutOfRange { a, b, lo: 0.0, hi: end });
        }
        Ok(())
    }
}

/// Hypothesis and conclusion quantities of the perturbation comparison.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PerturbationReport {
    pub interval: (f64, f64),
    /// Critical space-time norm of the full solution.
    pub l_value: f64,
    /// `sup_t ‖v(t)‖_{Ḣ¹}` over the interval.
    pub e0_value: f64,
    /// `‖v(t₀) - w(t₀)‖_{Ḣ¹}`.
    pub eprime_value: f64,
    /// Critical norm of the free evolution of `v(t₀) - w(t₀)`.
    pub eps_free: f64,
    /// Ṅ⁰ proxy of the forcing gradient.
    pub eps_e: f64,
    /// Critical space-time norm of `w - v`.
    pub diff_crit: f64,
    /// Finite-family Ṡ¹ norm of `w - v`.
    pub diff_s1: f64,
    /// Finite-family Ṡ¹ norm of `w`.
    pub w_s1: f64,
}

/// Both trajectories plus the report assembled from them.
#[derive(Clone, Debug)]
pub struct Comparison {
    pub report: PerturbationReport,
    pub v: Trajectory,
    pub w: Trajectory,
}

fn snapshot_at(traj: &Trajectory, t: f64) -> Result<&ComplexField> {
    let tol = 1e-9 * traj.end_time().abs().max(f64::MIN_POSITIVE);
    traj.timestamps()
        .iter()
        .position(|&s| (s - t).abs() <= tol)
        .map(|i| &traj.snapshots()[i])
        .ok_or_else(|| Error::InsufficientSampling(format!("no snapshot at t0 = {t}")))
}

/// Evolve `v` under the full law and `w` under its critical part and
/// measure every comparison quantity on the interval. `t₀` is the left
/// endpoint of the interval and must be a snapshot time.
pub fn compare_runs_full(setup: &ComparisonSetup) -> Result<Comparison> {
    setup.validate()?;
    let cfg = setup.config.with_keep_fields(true);
    let crit = setup.spec.critical_part();
    let (v_run, w_run) = rayon::join(
        || evolve(&setup.spec, &setup.v0, &cfg),
        || evolve(&crit, &setup.w0, &cfg),
    );
    let v = v_run.map_err(|e| Error::ComparisonRun { run: "full", source: Box::new(e) })?;
    let w = w_run.map_err(|e| Error::ComparisonRun { run: "critical", source: Box::new(e) })?;

    let interval = setup.interval;
    let (a, b) = interval;
    let dim = setup.spec.dim();
    let pair = critical_pair(dim)?;

    let diff = w.zip_with(&v, crit, |x, y| x - y)?;
    let d0 = snapshot_at(&diff, a)?;

    let times: Vec<f64> = v.timestamps().to_vec();
    let tol = 1e-9 * v.end_time().abs().max(f64::MIN_POSITIVE);
    let mut free_times = Vec::new();
    let mut free_norms = Vec::new();
    for &t in &times {
        if t >= a - tol && t <= b + tol {
            free_times.push(t);
            free_norms.push(lp_norm(&free_propagator(d0, t - a), pair.r.to_f64())?);
        }
    }
    let eps_free = mixed_norm_samples(&free_times, &free_norms, pair.q, a, b)?;

    let e0_value = v
        .timestamps()
        .iter()
        .zip(v.diagnostics())
        .filter(|(&t, _)| t >= a - tol && t <= b + tol)
        .map(|(_, d)| d.norms.h1dot)
        .fold(0.0, f64::max);

    let report = PerturbationReport {
        interval,
        l_value: mixed_norm(&v, FieldSelector::Value, pair, interval)?,
        e0_value,
        eprime_value: h1dot_norm(d0),
        eps_free,
        eps_e: n0_proxy(&v, interval, &setup.spec)?,
        diff_crit: mixed_norm(&diff, FieldSelector::Value, pair, interval)?,
        diff_s1: s1_finite_norm(&diff, interval)?,
        w_s1: s1_finite_norm(&w, interval)?,
    };
    Ok(Comparison { report, v, w })
}

pub fn compare_runs(setup: &ComparisonSetup) -> Result<PerturbationReport> {
    compare_runs_full(setup).map(|c| c.report)
}

/// One comparison per amplitude with `v₀ = w₀ = a·base`, in the given
/// (strictly decreasing) order.
pub fn scaling_study(
    spec: &EquationSpec,
    base_v0: &ComplexField,
    amplitudes: &[f64],
    interval: (f64, f64),
    config: &StepConfig,
) -> Result<Vec<(f64, PerturbationReport)>> {
    if amplitudes.is_empty() {
        return Err(Error::param("amplitudes", "need at least one amplitude"));
    }
    if amplitudes.iter().any(|a| !(*a >= 0.0 && a.is_finite())) {
        return Err(Error::param("amplitudes", "must be finite and nonnegative"));
    }
    if amplitudes.windows(2).any(|w| !(w[1] < w[0])) {
        return Err(Error::param("amplitudes", "must be strictly decreasing"));
    }
    amplitudes
        .iter()
        .map(|&amp| {
            let v0 = base_v0.scale(amp.into());
            let setup = ComparisonSetup {
                spec: *spec,
                w0: v0.clone(),
                v0,
                config: *config,
                interval,
            };
            compare_runs(&setup).map(|r| (amp, r))
        })
        .collect()
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct UniquenessReport {
    /// Step sizes from coarse to fine.
    pub dts: Vec<f64>,
    /// `‖u_{dt_i} - u_{dt_{i+1}}‖_{L²}` at the final time.
    pub gaps: Vec<f64>,
    /// Gap between the two finest levels.
    pub l2_gap_final: f64,
    /// Observed order from the finest three levels; `None` when the
    /// scheme is exact on the data or fewer than three levels were run.
    pub order: Option<f64>,
}

/// Evolve the same data with every step size from `coarse.dt` down to
/// `fine.dt` by halving, and compare the final states.
pub fn uniqueness_probe(
    spec: &EquationSpec,
    v0: &ComplexField,
    coarse: &StepConfig,
    fine: &StepConfig,
) -> Result<UniquenessReport> {
    coarse.validate()?;
    fine.validate()?;
    let total = coarse.total_time();
    if (fine.total_time() - total).abs() > 1e-9 * total {
        return Err(Error::param("fine", "must cover the same time span as the coarse run"));
    }
    let ratio = coarse.dt / fine.dt;
    let levels = ratio.log2().round();
    if levels < 1.0 || (ratio - levels.exp2()).abs() > 1e-9 * ratio {
        return Err(Error::param("fine", "dt must be the coarse dt divided by a power of two"));
    }
    let dts: Vec<f64> = (0..=levels as i32).map(|j| coarse.dt / f64::powi(2.0, j)).collect();
    let states = final_states(spec, v0, total, &dts)?;
    let gaps = states
        .windows(2)
        .map(|w| lp_norm(&w[0].sub(&w[1])?, 2.0))
        .collect::<Result<Vec<_>>>()?;
    let order = if dts.len() >= 3 {
        check_halving(&dts)?;
        match order_from_states(&states) {
            Ok(est) => est.order(),
            Err(Error::InconclusiveOrder(_)) => None,
            Err(e) => return Err(e),
        }
    } else {
        None
    };
    Ok(UniquenessReport {
        l2_gap_final: *gaps.last().expect("at least two levels"),
        dts,
        gaps,
        order,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::Grid;
    use num_complex::Complex64;

    fn gaussian(grid: Grid, amp: f64, sigma: f64) -> ComplexField {
        ComplexField::from_fn(grid, move |x| {
            let r2: f64 = x.iter().map(|a| a * a).sum();
            Complex64::new(amp * (-r2 / (sigma * sigma)).exp(), 0.0)
        })
    }

    fn setup(spec: EquationSpec, v0: ComplexField) -> ComparisonSetup {
        ComparisonSetup {
            spec,
            w0: v0.clone(),
            v0,
            config: StepConfig::new(0.01, 10, 1).unwrap(),
            interval: (0.0, 0.1),
        }
    }

    #[test]
    fn zero_data_gives_zero_report() {
        let g = Grid::new(3, 8, 8.0).unwrap();
        let r = compare_runs(&setup(EquationSpec::Cq3 { gamma: 0.5 }, ComplexField::zeros(g))).unwrap();
        for v in [r.l_value, r.e0_value, r.eprime_value, r.eps_free, r.eps_e, r.diff_crit, r.diff_s1, r.w_s1] {
            assert_eq!(v, 0.0);
        }
    }

    #[test]
    fn equal_data_has_no_initial_gap() {
        let g = Grid::new(3, 8, 8.0).unwrap();
        let r = compare_runs(&setup(EquationSpec::Cq3 { gamma: 0.5 }, gaussian(g, 1e-3, 1.5))).unwrap();
        assert_eq!(r.eprime_value, 0.0);
        assert_eq!(r.eps_free, 0.0);
        assert!(r.diff_crit > 0.0 && r.eps_e > 0.0);
    }

    #[test]
    fn interval_and_spec_validation() {
        let g = Grid::new(3, 8, 8.0).unwrap();
        let mut s = setup(EquationSpec::Cq3 { gamma: 0.5 }, ComplexField::zeros(g));
        s.interval = (0.0, 0.5);
        assert!(matches!(compare_runs(&s), Err(Error::IntervalOutOfRange { .. })));
        let s = setup(EquationSpec::EnergyCritical { dim: 3 }, ComplexField::zeros(g));
        assert!(compare_runs(&s).is_err());
    }

    #[test]
    fn scaling_requires_decreasing_amplitudes() {
        let g = Grid::new(3, 8, 8.0).unwrap();
        let cfg = StepConfig::new(0.01, 10, 1).unwrap();
        let base = gaussian(g, 1.0, 1.5);
        let spec = EquationSpec::Cq3 { gamma: 0.5 };
        assert!(scaling_study(&spec, &base, &[1e-3, 2e-3], (0.0, 0.1), &cfg).is_err());
        let t = scaling_study(&spec, &base, &[0.0], (0.0, 0.1), &cfg).unwrap();
        assert_eq!(t[0].1.diff_crit, 0.0);
    }

    #[test]
    fn constant_data_probe_is_exact() {
        let g = Grid::new(3, 8, 8.0).unwrap();
        let v0 = ComplexField::constant(g, Complex64::new(0.2, 0.1));
        let coarse = StepConfig::new(0.02, 10, 10).unwrap();
        let fine = StepConfig::new(0.005, 40, 40).unwrap();
        let r = uniqueness_probe(&EquationSpec::Cq3 { gamma: 0.5 }, &v0, &coarse, &fine).unwrap();
        assert!(r.l2_gap_final <= 1e-12);
        assert_eq!(r.order, None);
        assert_eq!(r.dts.len(), 3);
    }
}
