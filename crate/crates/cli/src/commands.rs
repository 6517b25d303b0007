//! Subcommand implementations.

use std::path::{Path, PathBuf};
use std::time::Instant;

use gpcq_core::integrator::{gronwall_check, GronwallCheck, NormRecord};
use gpcq_core::io::read_trajectory;
use gpcq_core::perturbation::{compare_runs, scaling_study, ComparisonSetup, PerturbationReport};
use gpcq_core::strichartz::{partition_by_x1, Partition};
use gpcq_core::{evolve, EnergyReport, EquationSpec, Error, GeneralCqParams, ReducedCq, Trajectory};
use serde::Serialize;

use crate::config::RunConfig;
use crate::error::CliError;
use crate::initial::{generate_initial, BOUNDARY_THRESHOLD};
use crate::output::{resolve_path, save_csv, save_json, save_trajectory};
use crate::verify::{run_suite, Suite, VerifyReport};

/// Options shared by every subcommand.
#[derive(Clone, Debug, Default)]
pub struct Options {
    pub seed: Option<u64>,
    pub out_dir: Option<PathBuf>,
}

impl Options {
    fn out_dir(&self) -> &Path {
        self.out_dir.as_deref().unwrap_or(Path::new("."))
    }

    fn apply_seed(&self, cfg: &mut RunConfig) {
        if let Some(s) = self.seed {
            cfg.seed = s;
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct GuardInfo {
    pub time: f64,
    pub message: String,
}

#[derive(Clone, Debug, Serialize)]
pub struct InitialCheck {
    pub boundary_shell_max: f64,
    pub threshold: f64,
    pub below_threshold: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct FinalState {
    pub t: f64,
    pub energy: EnergyReport,
    pub norms: NormRecord,
}

#[derive(Clone, Debug, Serialize)]
pub struct SimulationSummary {
    pub status: &'static str,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub guard: Option<GuardInfo>,
    pub config: RunConfig,
    pub equation: EquationSpec,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub reduction: Option<ReducedCq>,
    pub dt: f64,
    pub steps: usize,
    pub snapshots: usize,
    pub initial: InitialCheck,
    #[serde(rename = "final")]
    pub final_state: FinalState,
    pub max_energy_drift: f64,
    /// `min_t (C₁ M - ∂ₜM)` and the exponential bound; cubic-quintic only.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub gronwall: Option<GronwallCheck>,
    pub wall_time_s: f64,
}

/// Outcome of `simulate`: exit status plus what was written.
#[derive(Debug)]
pub struct SimulationOutcome {
    pub exit_code: i32,
    pub summary: SimulationSummary,
    pub csv_path: PathBuf,
    pub json_path: PathBuf,
}

fn split_guard(result: gpcq_core::Result<Trajectory>) -> Result<(Trajectory, Option<GuardInfo>), CliError> {
    match result {
        Ok(t) => Ok((t, None)),
        Err(e) => {
            let message = e.to_string();
            match e {
                Error::BlowUp { time, partial, .. } | Error::NumericalFailure { time, partial } => {
                    Ok((*partial, Some(GuardInfo { time, message })))
                }
                other => Err(other.into()),
            }
        }
    }
}

pub fn simulate(mut cfg: RunConfig, opts: &Options) -> Result<SimulationOutcome, CliError> {
    opts.apply_seed(&mut cfg);
    let keep = cfg.outputs.trajectory_path.is_some();
    let run = cfg.resolve(keep)?;
    let start = Instant::now();
    let (traj, guard) = split_guard(evolve(&run.spec, &run.v0, &run.step))?;
    let wall = start.elapsed().as_secs_f64();

    let out = opts.out_dir();
    let csv_path = resolve_path(out, cfg.outputs.csv_path.as_deref(), "diagnostics.csv");
    let json_path = resolve_path(out, cfg.outputs.json_path.as_deref(), "summary.json");
    save_csv(&csv_path, &traj)?;
    if let Some(p) = cfg.outputs.trajectory_path.as_deref() {
        save_trajectory(&resolve_path(out, Some(p), ""), &traj)?;
    }

    let last = traj.diagnostics().last().expect("nonempty");
    let shell = run.v0.boundary_shell_max();
    let gronwall = match run.spec {
        EquationSpec::Cq3 { .. } => Some(gronwall_check(&traj)?),
        _ => None,
    };
    let summary = SimulationSummary {
        status: if guard.is_some() { "guard_tripped" } else { "ok" },
        guard,
        equation: run.spec,
        reduction: run.reduction,
        dt: run.step.dt,
        steps: run.step.n_steps,
        snapshots: traj.len(),
        initial: InitialCheck {
            boundary_shell_max: shell,
            threshold: BOUNDARY_THRESHOLD,
            below_threshold: shell < BOUNDARY_THRESHOLD,
        },
        final_state: FinalState {
            t: traj.end_time(),
            energy: last.energy,
            norms: last.norms,
        },
        max_energy_drift: traj.max_energy_drift(),
        gronwall,
        wall_time_s: wall,
        config: cfg,
    };
    save_json(&json_path, &summary)?;
    Ok(SimulationOutcome {
        exit_code: if summary.guard.is_some() { 2 } else { 0 },
        summary,
        csv_path,
        json_path,
    })
}

pub fn verify(suite: Suite, samples: u64, seed: u64, report_path: Option<&Path>, opts: &Options) -> Result<VerifyReport, CliError> {
    let report = run_suite(suite, samples, seed);
    let name = format!("verify_{}.json", serde_json::to_value(suite)?.as_str().unwrap_or("suite"));
    save_json(&resolve_path(opts.out_dir(), report_path, &name), &report)?;
    Ok(report)
}

/// Descriptions of the report fields, written alongside the numbers.
pub const QUANTITY_LABELS: [(&str, &str); 8] = [
    ("l_value", "critical space-time norm of the full solution v"),
    ("e0_value", "sup over the interval of the H1-dot norm of v"),
    ("eprime_value", "H1-dot distance between v and w at t0"),
    ("eps_free", "critical space-time norm of the free evolution of v(t0) - w(t0)"),
    ("eps_e", "dual Strichartz proxy of the gradient of the forcing term"),
    ("diff_crit", "critical space-time norm of w - v"),
    ("diff_s1", "finite-family S1 norm of w - v"),
    ("w_s1", "finite-family S1 norm of w"),
];

#[derive(Clone, Debug, Serialize)]
pub struct ComparisonRow {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub amplitude: Option<f64>,
    pub report: PerturbationReport,
}

#[derive(Clone, Debug, Serialize)]
pub struct ComparisonOutput {
    pub equation: EquationSpec,
    pub interval: [f64; 2],
    pub t0: f64,
    pub quantities: std::collections::BTreeMap<&'static str, &'static str>,
    pub rows: Vec<ComparisonRow>,
}

pub fn compare(mut cfg: RunConfig, opts: &Options) -> Result<ComparisonOutput, CliError> {
    opts.apply_seed(&mut cfg);
    let cmp = cfg
        .comparison
        .clone()
        .ok_or_else(|| CliError::Config("missing `comparison` block".into()))?;
    let run = cfg.resolve(true)?;
    let interval = (cmp.interval[0], cmp.interval[1]);
    let rows = match &cmp.amplitudes {
        Some(amps) => scaling_study(&run.spec, &run.v0, amps, interval, &run.step)?
            .into_iter()
            .map(|(a, report)| ComparisonRow { amplitude: Some(a), report })
            .collect(),
        None => {
            let w0 = match &cmp.w0 {
                Some(d) => generate_initial(d, run.grid, cfg.seed)
                    .map_err(|e| CliError::Config(format!("at `comparison.w0`: {e}")))?,
                None => run.v0.clone(),
            };
            let setup = ComparisonSetup {
                spec: run.spec,
                v0: run.v0.clone(),
                w0,
                config: run.step,
                interval,
            };
            vec![ComparisonRow {
                amplitude: None,
                report: compare_runs(&setup)?,
            }]
        }
    };
    let output = ComparisonOutput {
        equation: run.spec,
        interval: cmp.interval,
        t0: interval.0,
        quantities: QUANTITY_LABELS.into_iter().collect(),
        rows,
    };
    let path = resolve_path(opts.out_dir(), cfg.outputs.report_path.as_deref(), "comparison.json");
    save_json(&path, &output)?;
    Ok(output)
}

#[derive(Clone, Debug, Serialize)]
pub struct PartitionOutput {
    pub eta: f64,
    #[serde(rename = "J")]
    pub chunks: usize,
    pub start: f64,
    pub breakpoints: Vec<f64>,
    pub chunk_x1: Vec<f64>,
    pub total_x1: f64,
}

impl From<Partition> for PartitionOutput {
    fn from(p: Partition) -> Self {
        Self {
            eta: p.eta,
            chunks: p.chunks(),
            start: p.start,
            total_x1: p.total_norm(),
            breakpoints: p.breakpoints,
            chunk_x1: p.chunk_norms,
        }
    }
}

/// Partition a stored trajectory, or the configured run, into `Ẋ¹`
/// chunks of size `eta`.
pub fn partition(mut cfg: RunConfig, trajectory: Option<&Path>, eta: Option<f64>, opts: &Options) -> Result<PartitionOutput, CliError> {
    opts.apply_seed(&mut cfg);
    let eta = eta
        .or(cfg.partition.as_ref().map(|p| p.eta))
        .ok_or_else(|| CliError::Config("missing `partition.eta`".into()))?;
    let traj = match trajectory {
        Some(path) => {
            let (spec, _) = cfg.equation_spec()?;
            let file = std::fs::File::open(path)?;
            read_trajectory(&mut std::io::BufReader::new(file), spec)?
        }
        None => {
            let run = cfg.resolve(true)?;
            evolve(&run.spec, &run.v0, &run.step)?
        }
    };
    let output: PartitionOutput = partition_by_x1(&traj, eta)?.into();
    let path = resolve_path(opts.out_dir(), cfg.outputs.report_path.as_deref(), "partition.json");
    save_json(&path, &output)?;
    Ok(output)
}

pub fn rescale(alpha1: f64, alpha3: f64, alpha5: f64) -> Result<ReducedCq, CliError> {
    let p = GeneralCqParams::new(alpha1, alpha3, alpha5)?;
    Ok(gpcq_core::equations::reduce_general(&p)?)
}
