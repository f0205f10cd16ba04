//! Command-line front end: scenario configs, runs, comparisons, presets.
//!
//! A scenario is described by a single TOML file (unknown keys are hard
//! errors). Three pipelines are available:
//!
//! - `analytic`: second-order perturbative witness formulas on a time grid;
//! - `closed`: exact unitary evolution on a truncated Fock space;
//! - `open`: Lindblad master-equation evolution with damping.
//!
//! Every run writes `<name>.csv` (column `gt` plus the witness columns) and
//! `<name>.meta.json` (the fully resolved config plus diagnostics). The
//! sidecar's `config` object is itself a valid run input, so any result can
//! be reproduced from its own metadata. `compare` runs the analytic and
//! closed pipelines on the same grid and reports per-column maximum
//! absolute differences against cross-validation budgets.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::analytic::{analytic_series, validity_warning};
use crate::dynamics::{evolve_closed, evolve_lindblad_observe, EvolutionDiagnostics, TimeGrid};
use crate::error::{Error, Result};
use crate::fock::{coherent_state, fock_state, HilbertConfig, QuantumState};
use crate::params::{InitialAmplitudes, SystemParams};
use crate::witnesses::{moments, SeriesSource, WitnessSeries, COLUMN_NAMES};
use crate::C64;

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

/// Which solver a scenario uses.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Pipeline {
    Analytic,
    Closed,
    Open,
}

impl std::fmt::Display for Pipeline {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Pipeline::Analytic => "analytic",
            Pipeline::Closed => "closed",
            Pipeline::Open => "open",
        })
    }
}

/// Raw `[initial]` table. One flat table instead of a tagged enum so that
/// unknown keys anywhere in the file stay hard errors.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InitialTable {
    /// `"coherent"` or `"fock"`.
    pub kind: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub alpha: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub beta_mag: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub phi: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub n_a: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub n_c: Option<usize>,
}

/// Validated initial state.
#[derive(Debug, Clone, PartialEq)]
pub enum InitialState {
    Coherent(InitialAmplitudes),
    Fock { n_a: usize, n_c: usize },
}

impl InitialState {
    fn from_table(table: &InitialTable) -> Result<Self> {
        match table.kind.as_str() {
            "coherent" => {
                if table.n_a.is_some() || table.n_c.is_some() {
                    return Err(Error::Config(
                        "coherent initial state takes alpha/beta_mag/phi, not n_a/n_c".to_string(),
                    ));
                }
                let alpha = table.alpha.ok_or_else(|| {
                    Error::Config("coherent initial state needs alpha".to_string())
                })?;
                let beta_mag = table.beta_mag.ok_or_else(|| {
                    Error::Config("coherent initial state needs beta_mag".to_string())
                })?;
                Ok(InitialState::Coherent(InitialAmplitudes::new(
                    alpha,
                    beta_mag,
                    table.phi.unwrap_or(0.0),
                )?))
            }
            "fock" => {
                if table.alpha.is_some() || table.beta_mag.is_some() || table.phi.is_some() {
                    return Err(Error::Config(
                        "fock initial state takes n_a/n_c, not coherent amplitudes".to_string(),
                    ));
                }
                let n_a = table
                    .n_a
                    .ok_or_else(|| Error::Config("fock initial state needs n_a".to_string()))?;
                let n_c = table
                    .n_c
                    .ok_or_else(|| Error::Config("fock initial state needs n_c".to_string()))?;
                Ok(InitialState::Fock { n_a, n_c })
            }
            other => Err(Error::Config(format!(
                "initial state kind must be \"coherent\" or \"fock\", got \"{other}\""
            ))),
        }
    }

    fn to_table(&self) -> InitialTable {
        match self {
            InitialState::Coherent(amps) => InitialTable {
                kind: "coherent".to_string(),
                alpha: Some(amps.alpha),
                beta_mag: Some(amps.beta_mag),
                phi: Some(amps.phi),
                n_a: None,
                n_c: None,
            },
            InitialState::Fock { n_a, n_c } => InitialTable {
                kind: "fock".to_string(),
                alpha: None,
                beta_mag: None,
                phi: None,
                n_a: Some(*n_a),
                n_c: Some(*n_c),
            },
        }
    }

    fn build(&self, config: HilbertConfig) -> Result<QuantumState> {
        match self {
            InitialState::Coherent(amps) => {
                coherent_state(config, C64::new(amps.alpha, 0.0), amps.beta())
            }
            InitialState::Fock { n_a, n_c } => fock_state(config, *n_a, *n_c),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridSpec {
    pub t_max: f64,
    pub points: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct HilbertSpec {
    pub dim_a: usize,
    pub dim_c: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct IntegratorSpec {
    /// Upper bound on the Runge-Kutta step for the open pipeline.
    pub step: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SweepParam {
    Gamma,
    NTh,
    Phi,
}

impl std::fmt::Display for SweepParam {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            SweepParam::Gamma => "gamma",
            SweepParam::NTh => "n_th",
            SweepParam::Phi => "phi",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepSpec {
    pub param: SweepParam,
    pub values: Vec<f64>,
}

/// On-disk scenario description. Optional sections fall back to
/// pipeline-dependent defaults at resolution time.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioConfig {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
    pub pipeline: Pipeline,
    pub params: SystemParams,
    pub initial: InitialTable,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub grid: Option<GridSpec>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub hilbert: Option<HilbertSpec>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub integrator: Option<IntegratorSpec>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub sweep: Option<SweepSpec>,
}

/// Fully validated scenario with every default filled in.
#[derive(Debug, Clone)]
pub struct ResolvedScenario {
    pub name: String,
    pub pipeline: Pipeline,
    pub params: SystemParams,
    pub initial: InitialState,
    pub grid: GridSpec,
    pub hilbert: HilbertSpec,
    pub step: f64,
    pub sweep: Option<SweepSpec>,
}

impl ScenarioConfig {
    /// Validates the config and fills defaults. `fallback_name` is used when
    /// the file does not name itself (normally the file stem).
    pub fn resolve(&self, fallback_name: &str) -> Result<ResolvedScenario> {
        let params = self.params.clone().validated()?;
        let initial = InitialState::from_table(&self.initial)?;

        match self.pipeline {
            Pipeline::Analytic => {
                if !matches!(initial, InitialState::Coherent(_)) {
                    return Err(Error::Config(
                        "the analytic pipeline requires a coherent initial state".to_string(),
                    ));
                }
                if params.gamma != 0.0 || params.n_th != 0.0 {
                    return Err(Error::Config(
                        "the analytic pipeline has no damping; set gamma = 0 and n_th = 0 \
                         or use the open pipeline"
                            .to_string(),
                    ));
                }
            }
            Pipeline::Closed => {
                if params.gamma != 0.0 || params.n_th != 0.0 {
                    return Err(Error::Config(
                        "the closed pipeline ignores damping; set gamma = 0 and n_th = 0 \
                         or use the open pipeline"
                            .to_string(),
                    ));
                }
            }
            Pipeline::Open => {
                // SystemParams::validated already enforces gamma >= 0.
            }
        }

        let grid = self.grid.unwrap_or(match self.pipeline {
            Pipeline::Open => GridSpec {
                t_max: 3.0,
                points: 1000,
            },
            _ => GridSpec {
                t_max: 0.3,
                points: 300,
            },
        });
        if !(grid.t_max.is_finite() && grid.t_max > 0.0) || grid.points < 2 {
            return Err(Error::Config(format!(
                "grid must have t_max > 0 and at least 2 points, got t_max = {}, points = {}",
                grid.t_max, grid.points
            )));
        }

        let hilbert = self.hilbert.unwrap_or(match initial {
            InitialState::Coherent(_) => HilbertSpec {
                dim_a: 20,
                dim_c: 20,
            },
            InitialState::Fock { .. } => HilbertSpec {
                dim_a: 8,
                dim_c: 12,
            },
        });
        HilbertConfig::new(hilbert.dim_a, hilbert.dim_c)?;

        let step = self.integrator.map_or(2e-4, |i| i.step);
        if !(step.is_finite() && step > 0.0) {
            return Err(Error::Config(format!(
                "integrator step must be finite and positive, got {step}"
            )));
        }

        if let Some(sweep) = &self.sweep {
            if sweep.values.is_empty() {
                return Err(Error::Config("sweep.values must not be empty".to_string()));
            }
            if !sweep.values.iter().all(|v| v.is_finite()) {
                return Err(Error::Config("sweep values must be finite".to_string()));
            }
            match sweep.param {
                SweepParam::Gamma | SweepParam::NTh => {
                    if self.pipeline != Pipeline::Open {
                        return Err(Error::Config(format!(
                            "sweeping {} requires the open pipeline",
                            sweep.param
                        )));
                    }
                    if sweep.values.iter().any(|&v| v < 0.0) {
                        return Err(Error::Config(format!(
                            "{} sweep values must be nonnegative",
                            sweep.param
                        )));
                    }
                }
                SweepParam::Phi => {
                    if !matches!(initial, InitialState::Coherent(_)) {
                        return Err(Error::Config(
                            "sweeping phi requires a coherent initial state".to_string(),
                        ));
                    }
                }
            }
        }

        let name = self
            .name
            .clone()
            .unwrap_or_else(|| fallback_name.to_string());
        if name.is_empty() {
            return Err(Error::Config("scenario name must not be empty".to_string()));
        }

        Ok(ResolvedScenario {
            name,
            pipeline: self.pipeline,
            params,
            initial,
            grid,
            hilbert,
            step,
            sweep: self.sweep.clone(),
        })
    }
}

/// One concrete pipeline execution (a sweep expands into several).
#[derive(Debug, Clone)]
pub struct Job {
    pub name: String,
    pub pipeline: Pipeline,
    pub params: SystemParams,
    pub initial: InitialState,
    pub grid: GridSpec,
    pub hilbert: HilbertSpec,
    pub step: f64,
    /// Present when the job came out of a sweep.
    pub swept: Option<(SweepParam, f64)>,
}

impl ResolvedScenario {
    /// Expands the sweep (if any) into independent jobs.
    pub fn jobs(&self) -> Result<Vec<Job>> {
        let base = Job {
            name: self.name.clone(),
            pipeline: self.pipeline,
            params: self.params.clone(),
            initial: self.initial.clone(),
            grid: self.grid,
            hilbert: self.hilbert,
            step: self.step,
            swept: None,
        };
        let Some(sweep) = &self.sweep else {
            return Ok(vec![base]);
        };
        let mut jobs = Vec::with_capacity(sweep.values.len());
        for &value in &sweep.values {
            let mut job = base.clone();
            job.name = format!("{}_{}{}", self.name, sweep.param, value);
            job.swept = Some((sweep.param, value));
            match sweep.param {
                SweepParam::Gamma => job.params.gamma = value,
                SweepParam::NTh => job.params.n_th = value,
                SweepParam::Phi => match &mut job.initial {
                    InitialState::Coherent(amps) => amps.phi = value,
                    InitialState::Fock { .. } => unreachable!("validated at resolve time"),
                },
            }
            job.params = job.params.validated()?;
            jobs.push(job);
        }
        Ok(jobs)
    }
}

impl Job {
    fn config_echo(&self) -> ScenarioConfig {
        ScenarioConfig {
            name: Some(self.name.clone()),
            pipeline: self.pipeline,
            params: self.params.clone(),
            initial: self.initial.to_table(),
            grid: Some(self.grid),
            hilbert: Some(self.hilbert),
            integrator: Some(IntegratorSpec { step: self.step }),
            sweep: None,
        }
    }

    fn time_grid(&self) -> Result<TimeGrid> {
        TimeGrid::uniform(self.grid.t_max, self.grid.points)
    }

    /// Runs the pipeline and returns the witness series plus diagnostics.
    pub fn execute(&self) -> Result<(WitnessSeries, JobDiagnostics)> {
        let grid = self.time_grid()?;
        match self.pipeline {
            Pipeline::Analytic => {
                let InitialState::Coherent(amps) = &self.initial else {
                    unreachable!("validated at resolve time")
                };
                let series = analytic_series(&self.params, amps, &grid);
                Ok((
                    series,
                    JobDiagnostics {
                        source: SeriesSource::Analytic.to_string(),
                        validity_warning: validity_warning(grid.t_max(), &self.params),
                        integrator_step: None,
                        initial_top_level_occupation: None,
                        max_top_level_occupation: None,
                        max_weight_drift: None,
                        min_sampled_eigenvalue: None,
                        notes: self.notes(),
                    },
                ))
            }
            Pipeline::Closed => {
                let config = HilbertConfig::new(self.hilbert.dim_a, self.hilbert.dim_c)?;
                let state = self.initial.build(config)?;
                let initial_occ = state.top_level_occupation();
                let traj = evolve_closed(&state, &self.params, &grid)?;
                let diag = traj.diagnostics();
                let series = crate::witnesses::witness_series(&traj);
                Ok((
                    series,
                    JobDiagnostics {
                        source: SeriesSource::NumericClosed.to_string(),
                        validity_warning: None,
                        integrator_step: None,
                        initial_top_level_occupation: Some(initial_occ),
                        max_top_level_occupation: Some(diag.max_top_level_occupation),
                        max_weight_drift: Some(diag.max_weight_drift),
                        min_sampled_eigenvalue: None,
                        notes: self.notes(),
                    },
                ))
            }
            Pipeline::Open => {
                let config = HilbertConfig::new(self.hilbert.dim_a, self.hilbert.dim_c)?;
                let state = self.initial.build(config)?;
                let initial_occ = state.top_level_occupation();
                let mut columns: Vec<Vec<f64>> =
                    vec![Vec::with_capacity(grid.len()); COLUMN_NAMES.len()];
                let diag: EvolutionDiagnostics =
                    evolve_lindblad_observe(&state, &self.params, &grid, self.step, |_, _, st| {
                        for (col, v) in columns.iter_mut().zip(moments(st).witness_row()) {
                            col.push(v);
                        }
                        Ok(())
                    })?;
                let mut series =
                    WitnessSeries::new(grid.times().to_vec(), SeriesSource::NumericOpen);
                for (name, col) in COLUMN_NAMES.iter().zip(columns) {
                    series.push_column(name, col);
                }
                Ok((
                    series,
                    JobDiagnostics {
                        source: SeriesSource::NumericOpen.to_string(),
                        validity_warning: None,
                        integrator_step: Some(self.step),
                        initial_top_level_occupation: Some(initial_occ),
                        max_top_level_occupation: Some(diag.max_top_level_occupation),
                        max_weight_drift: Some(diag.max_weight_drift),
                        min_sampled_eigenvalue: diag.min_sampled_eigenvalue,
                        notes: self.notes(),
                    },
                ))
            }
        }
    }

    fn notes(&self) -> Vec<String> {
        let mut notes = Vec::new();
        if let Some((param, value)) = self.swept {
            notes.push(format!(
                "{param} = {value} comes from a sweep; sweep values are reporting choices \
                 spanning weak to moderate damping, anchored at gamma = 0.01"
            ));
        }
        notes
    }
}

/// Diagnostics block of the `.meta.json` sidecar.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct JobDiagnostics {
    pub source: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub validity_warning: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub integrator_step: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub initial_top_level_occupation: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub max_top_level_occupation: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub max_weight_drift: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub min_sampled_eigenvalue: Option<f64>,
    #[serde(skip_serializing_if = "Vec::is_empty", default)]
    pub notes: Vec<String>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct MetaSidecar {
    pub config: ScenarioConfig,
    pub diagnostics: JobDiagnostics,
}

/// Writes `bytes` to `path` through a same-directory temp file and rename,
/// so concurrent sweep jobs never expose partial files.
fn write_atomic(path: &Path, bytes: &[u8]) -> Result<()> {
    let file_name = path
        .file_name()
        .ok_or_else(|| Error::Config(format!("output path {} has no file name", path.display())))?
        .to_string_lossy()
        .into_owned();
    let tmp = path.with_file_name(format!("{file_name}.tmp"));
    fs::write(&tmp, bytes)?;
    fs::rename(&tmp, path)?;
    Ok(())
}

fn series_to_csv(series: &WitnessSeries) -> Result<Vec<u8>> {
    let mut writer = csv::Writer::from_writer(Vec::new());
    let mut header = vec!["gt".to_string()];
    header.extend(series.names().iter().map(|s| s.to_string()));
    writer
        .write_record(&header)
        .map_err(|e| Error::Config(format!("csv write failed: {e}")))?;
    let names = series.names();
    for (i, &t) in series.grid().iter().enumerate() {
        let mut record = Vec::with_capacity(names.len() + 1);
        record.push(format!("{t}"));
        for name in &names {
            record.push(format!("{}", series.column(name).expect("known column")[i]));
        }
        writer
            .write_record(&record)
            .map_err(|e| Error::Config(format!("csv write failed: {e}")))?;
    }
    writer
        .into_inner()
        .map_err(|e| Error::Config(format!("csv write failed: {e}")))
}

/// Result of persisting one job.
#[derive(Debug, Clone)]
pub struct JobOutput {
    pub name: String,
    pub csv_path: PathBuf,
    pub meta_path: PathBuf,
    pub rows: usize,
    pub diagnostics: JobDiagnostics,
}

fn run_job(job: &Job, out_dir: &Path) -> Result<JobOutput> {
    let (series, diagnostics) = job.execute()?;
    let csv_path = out_dir.join(format!("{}.csv", job.name));
    write_atomic(&csv_path, &series_to_csv(&series)?)?;
    let meta = MetaSidecar {
        config: job.config_echo(),
        diagnostics: diagnostics.clone(),
    };
    let meta_path = out_dir.join(format!("{}.meta.json", job.name));
    let mut meta_bytes = serde_json::to_vec_pretty(&meta)
        .map_err(|e| Error::Config(format!("meta serialization failed: {e}")))?;
    meta_bytes.push(b'\n');
    write_atomic(&meta_path, &meta_bytes)?;
    Ok(JobOutput {
        name: job.name.clone(),
        csv_path,
        meta_path,
        rows: series.len(),
        diagnostics,
    })
}

/// Executes a resolved scenario, one output pair per job. Sweep jobs run in
/// parallel and share no state.
pub fn run_scenario(scenario: &ResolvedScenario, out_dir: &Path) -> Result<Vec<JobOutput>> {
    fs::create_dir_all(out_dir)?;
    let jobs = scenario.jobs()?;
    let mut outputs = jobs
        .par_iter()
        .map(|job| run_job(job, out_dir))
        .collect::<Result<Vec<_>>>()?;
    outputs.sort_by(|a, b| a.name.cmp(&b.name));
    Ok(outputs)
}

/// Cross-validation budget for `column` under `params`, if this combination
/// is covered by a quantitative claim.
///
/// - `g = 0`, `chi = 0`: free evolution, where the perturbative solution is
///   exact, so every column must agree to 1e-8.
/// - `chi = 0`, `g != 0`: linear exchange keeps coherent states coherent,
///   so the exciton variances are pinned at 1/4 in both pipelines.
/// - otherwise: the second-order claim, 1e-2 over `gt <= 0.3`, for the
///   twelve columns shared by both derivations.
pub fn column_budget(params: &SystemParams, column: &str) -> Option<f64> {
    if params.g == 0.0 && params.chi == 0.0 {
        return Some(1e-8);
    }
    if params.chi == 0.0 {
        return match column {
            "varX_a" | "varY_a" => Some(1e-8),
            _ => None,
        };
    }
    match column {
        "varX_a" | "varY_a" | "varX_ac" | "varY_ac" | "D_a" | "D_c" | "D_ac" | "HZ1" | "HZ2"
        | "Duan" | "N_a" | "N_c" => Some(1e-2),
        _ => None,
    }
}

/// Absolute difference that treats a shared NaN (both sides unoccupied) as
/// agreement and a one-sided NaN as infinite disagreement.
fn column_diff(a: f64, b: f64) -> f64 {
    match (a.is_nan(), b.is_nan()) {
        (true, true) => 0.0,
        (false, false) => (a - b).abs(),
        _ => f64::INFINITY,
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ColumnReport {
    pub name: String,
    pub max_abs_diff: f64,
    pub at_gt: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub budget: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub within_budget: Option<bool>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CompareReport {
    pub name: String,
    pub grid: GridSpec,
    pub hilbert: HilbertSpec,
    pub columns: Vec<ColumnReport>,
    /// Number of columns whose budget was exceeded.
    pub violations: usize,
}

/// Runs the closed and analytic pipelines on the same grid and reports
/// per-column maximum absolute differences.
pub fn compare_scenario(
    scenario: &ResolvedScenario,
) -> Result<(WitnessSeries, WitnessSeries, CompareReport)> {
    if scenario.sweep.is_some() {
        return Err(Error::Config(
            "compare works on a single job; remove the sweep section".to_string(),
        ));
    }
    let InitialState::Coherent(amps) = &scenario.initial else {
        return Err(Error::Config(
            "compare requires a coherent initial state (the perturbative solution assumes one)"
                .to_string(),
        ));
    };
    if scenario.params.gamma != 0.0 || scenario.params.n_th != 0.0 {
        return Err(Error::Config(
            "compare cross-validates undamped pipelines; set gamma = 0 and n_th = 0".to_string(),
        ));
    }

    let grid = TimeGrid::uniform(scenario.grid.t_max, scenario.grid.points)?;
    let config = HilbertConfig::new(scenario.hilbert.dim_a, scenario.hilbert.dim_c)?;
    let state = scenario.initial.build(config)?;
    let traj = evolve_closed(&state, &scenario.params, &grid)?;
    let numeric = crate::witnesses::witness_series(&traj);
    let analytic = analytic_series(&scenario.params, amps, &grid);

    let mut columns = Vec::with_capacity(COLUMN_NAMES.len());
    let mut violations = 0;
    for name in COLUMN_NAMES {
        let a = analytic.column(name).expect("analytic column");
        let n = numeric.column(name).expect("numeric column");
        let mut max_abs_diff = 0.0f64;
        let mut at_gt = 0.0f64;
        for (i, &t) in grid.times().iter().enumerate() {
            let d = column_diff(a[i], n[i]);
            if d > max_abs_diff {
                max_abs_diff = d;
                at_gt = t;
            }
        }
        let budget = column_budget(&scenario.params, name);
        let within_budget = budget.map(|b| max_abs_diff <= b);
        if within_budget == Some(false) {
            violations += 1;
        }
        columns.push(ColumnReport {
            name: name.to_string(),
            max_abs_diff,
            at_gt,
            budget,
            within_budget,
        });
    }

    Ok((
        numeric,
        analytic,
        CompareReport {
            name: scenario.name.clone(),
            grid: scenario.grid,
            hilbert: scenario.hilbert,
            columns,
            violations,
        },
    ))
}

/// Persists compare outputs: exact CSV, analytic CSV, JSON report. Returns
/// the report and a human-readable summary.
pub fn compare_to_dir(
    scenario: &ResolvedScenario,
    out_dir: &Path,
) -> Result<(CompareReport, String)> {
    fs::create_dir_all(out_dir)?;
    let (numeric, analytic, report) = compare_scenario(scenario)?;
    write_atomic(
        &out_dir.join(format!("{}.csv", scenario.name)),
        &series_to_csv(&numeric)?,
    )?;
    write_atomic(
        &out_dir.join(format!("{}.analytic.csv", scenario.name)),
        &series_to_csv(&analytic)?,
    )?;
    let mut report_bytes = serde_json::to_vec_pretty(&report)
        .map_err(|e| Error::Config(format!("report serialization failed: {e}")))?;
    report_bytes.push(b'\n');
    write_atomic(
        &out_dir.join(format!("{}.report.json", scenario.name)),
        &report_bytes,
    )?;

    let mut summary = String::new();
    let _ = writeln!(
        summary,
        "compare {}: exact ({}, {}) vs second-order over gt in [0, {}], {} points",
        report.name,
        report.hilbert.dim_a,
        report.hilbert.dim_c,
        report.grid.t_max,
        report.grid.points
    );
    for col in &report.columns {
        let verdict = match col.within_budget {
            Some(true) => "ok",
            Some(false) => "EXCEEDS BUDGET",
            None => "informational",
        };
        let budget = col.budget.map_or("-".to_string(), |b| format!("{b:.1e}"));
        let _ = writeln!(
            summary,
            "  {:<9} max |diff| {:>10.4e} at gt = {:<6.4} budget {:>7} {}",
            col.name, col.max_abs_diff, col.at_gt, budget, verdict
        );
    }
    let _ = writeln!(
        summary,
        "{} of {} budgeted columns exceed their budget",
        report.violations,
        report.columns.iter().filter(|c| c.budget.is_some()).count()
    );
    Ok((report, summary))
}

/// Loads a scenario from TOML, or from the `config` object of a
/// `.meta.json` sidecar. Returns the config and the name fallback derived
/// from the file name.
pub fn load_config(path: &Path) -> Result<(ScenarioConfig, String)> {
    let text = fs::read_to_string(path)?;
    let is_json = path
        .extension()
        .map_or(false, |e| e.eq_ignore_ascii_case("json"));
    let config: ScenarioConfig = if is_json {
        let value: serde_json::Value = serde_json::from_str(&text)
            .map_err(|e| Error::Config(format!("{}: invalid JSON: {e}", path.display())))?;
        let inner = value.get("config").cloned().ok_or_else(|| {
            Error::Config(format!(
                "{}: JSON input must be a sidecar with a `config` object",
                path.display()
            ))
        })?;
        serde_json::from_value(inner)
            .map_err(|e| Error::Config(format!("{}: invalid config: {e}", path.display())))?
    } else {
        toml::from_str(&text)
            .map_err(|e| Error::Config(format!("{}: invalid config: {e}", path.display())))?
    };
    let stem = path
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| "scenario".to_string());
    let fallback = stem.trim_end_matches(".meta").to_string();
    Ok((config, fallback))
}

fn cds_coherent_initial(phi: f64) -> InitialTable {
    InitialTable {
        kind: "coherent".to_string(),
        alpha: Some(2.0),
        beta_mag: Some(1.0),
        phi: Some(phi),
        n_a: None,
        n_c: None,
    }
}

/// Built-in scenario presets, one per reproduced figure panel family.
pub fn presets() -> Vec<(&'static str, &'static str, ScenarioConfig)> {
    let pi = std::f64::consts::PI;
    let cds = SystemParams::cds();
    let desk_grid = Some(GridSpec {
        t_max: 0.3,
        points: 301,
    });
    let long_grid = Some(GridSpec {
        t_max: 3.0,
        points: 1000,
    });
    // The thermal exciton bath pumps occupation upward over the long scan
    // window, so the exciton mode gets extra headroom.
    let open_dims = Some(HilbertSpec {
        dim_a: 20,
        dim_c: 18,
    });
    let analytic_base = |name: &str, phi: f64| ScenarioConfig {
        name: Some(name.to_string()),
        pipeline: Pipeline::Analytic,
        params: cds.clone(),
        initial: cds_coherent_initial(phi),
        grid: desk_grid,
        hilbert: None,
        integrator: None,
        sweep: None,
    };
    let phi_sweep = Some(SweepSpec {
        param: SweepParam::Phi,
        values: vec![0.0, pi],
    });
    let gamma_sweep = Some(SweepSpec {
        param: SweepParam::Gamma,
        values: vec![0.0, 0.01, 0.05],
    });
    let nth_sweep = Some(SweepSpec {
        param: SweepParam::NTh,
        values: vec![0.0, 1.0, 2.0],
    });
    let open_base = |name: &str, phi: f64, gamma: f64, n_th: f64| ScenarioConfig {
        name: Some(name.to_string()),
        pipeline: Pipeline::Open,
        params: SystemParams {
            gamma,
            n_th,
            ..cds.clone()
        },
        initial: cds_coherent_initial(phi),
        grid: long_grid,
        hilbert: open_dims,
        integrator: Some(IntegratorSpec { step: 1e-3 }),
        sweep: None,
    };

    vec![
        (
            "fig1a",
            "single-mode quadrature variances, second-order solution",
            analytic_base("fig1a", 0.0),
        ),
        (
            "fig1b",
            "intermodal quadrature variances, second-order solution",
            analytic_base("fig1b", 0.0),
        ),
        (
            "fig2a",
            "single-mode and intermodal antibunching, in-phase input",
            analytic_base("fig2a", 0.0),
        ),
        ("fig2b", "intermodal antibunching phase contrast", {
            let mut c = analytic_base("fig2b", 0.0);
            c.sweep = phi_sweep.clone();
            c
        }),
        ("fig3a", "HZ1 entanglement witness phase selectivity", {
            let mut c = analytic_base("fig3a", 0.0);
            c.sweep = phi_sweep.clone();
            c
        }),
        ("fig3b", "HZ2 entanglement witness phase selectivity", {
            let mut c = analytic_base("fig3b", 0.0);
            c.sweep = phi_sweep;
            c
        }),
        (
            "fig4a",
            "squeezing and antibunching under damping, in phase",
            {
                let mut c = open_base("fig4a", 0.0, 0.0, 0.0);
                c.sweep = gamma_sweep.clone();
                c
            },
        ),
        (
            "fig4b",
            "intermodal witnesses under damping, out of phase",
            {
                let mut c = open_base("fig4b", pi, 0.0, 0.0);
                c.sweep = gamma_sweep.clone();
                c
            },
        ),
        ("fig4c", "HZ1 degradation with thermal exciton bath", {
            let mut c = open_base("fig4c", pi, 0.01, 0.0);
            c.sweep = nth_sweep.clone();
            c
        }),
        ("fig4d", "HZ2 degradation with thermal exciton bath", {
            let mut c = open_base("fig4d", 0.0, 0.01, 0.0);
            c.sweep = nth_sweep;
            c
        }),
        ("fig4e", "damping sweep against a warm exciton bath", {
            let mut c = open_base("fig4e", pi, 0.0, 1.0);
            c.sweep = gamma_sweep.clone();
            c
        }),
        ("fig4f", "damping sweep against a hot exciton bath", {
            let mut c = open_base("fig4f", pi, 0.0, 2.0);
            c.sweep = gamma_sweep.clone();
            c
        }),
        ("fig5", "steering from a photon Fock state under damping", {
            ScenarioConfig {
                name: Some("fig5".to_string()),
                pipeline: Pipeline::Open,
                params: cds.clone(),
                initial: InitialTable {
                    kind: "fock".to_string(),
                    alpha: None,
                    beta_mag: None,
                    phi: None,
                    n_a: Some(0),
                    n_c: Some(5),
                },
                grid: long_grid,
                hilbert: Some(HilbertSpec {
                    dim_a: 8,
                    dim_c: 12,
                }),
                integrator: Some(IntegratorSpec { step: 5e-4 }),
                sweep: gamma_sweep,
            }
        }),
    ]
}

pub fn preset_config(name: &str) -> Result<ScenarioConfig> {
    presets()
        .into_iter()
        .find(|(n, _, _)| *n == name)
        .map(|(_, _, c)| c)
        .ok_or_else(|| {
            let known: Vec<&str> = presets().iter().map(|(n, _, _)| *n).collect();
            Error::Config(format!(
                "unknown preset \"{name}\"; available: {}",
                known.join(", ")
            ))
        })
}

/// Command-line interface.
#[derive(Debug, Parser)]
#[command(
    name = "kerr-exciton",
    version,
    about = "Nonclassicality witnesses for a Kerr exciton mode coupled to a cavity photon"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run a scenario config and write CSV + metadata per job.
    Run {
        /// Path to a TOML config or a .meta.json sidecar.
        config: PathBuf,
        /// Output directory (default "out").
        #[arg(long)]
        out: Option<PathBuf>,
        /// Override the time grid as "t_max,points".
        #[arg(long)]
        grid: Option<String>,
        /// Override the Fock truncation as "dim_a,dim_c".
        #[arg(long)]
        dims: Option<String>,
    },
    /// Cross-validate the analytic and exact closed pipelines on one config.
    Compare {
        /// Path to a TOML config or a .meta.json sidecar.
        config: PathBuf,
        /// Output directory (default "out").
        #[arg(long)]
        out: Option<PathBuf>,
        /// Override the time grid as "t_max,points".
        #[arg(long)]
        grid: Option<String>,
        /// Override the Fock truncation as "dim_a,dim_c".
        #[arg(long)]
        dims: Option<String>,
    },
    /// List presets, or write the named preset's config file.
    Presets {
        /// Preset name; omit to list all presets.
        name: Option<String>,
        /// Output directory (default "out").
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Print the tool version.
    Version,
}

fn parse_pair<T: std::str::FromStr>(text: &str, what: &str) -> Result<(T, T)> {
    let mut parts = text.split(',');
    let err = || Error::Config(format!("{what} must look like \"a,b\", got \"{text}\""));
    let a = parts.next().ok_or_else(err)?.trim();
    let b = parts.next().ok_or_else(err)?.trim();
    if parts.next().is_some() {
        return Err(err());
    }
    let a = a.parse::<T>().map_err(|_| err())?;
    let b = b.parse::<T>().map_err(|_| err())?;
    Ok((a, b))
}

fn apply_overrides(
    config: &mut ScenarioConfig,
    grid: Option<&str>,
    dims: Option<&str>,
) -> Result<()> {
    if let Some(text) = grid {
        let (t_max, points) = parse_pair::<f64>(text, "--grid")?;
        if points.fract() != 0.0 || points < 0.0 {
            return Err(Error::Config(format!(
                "--grid points must be a nonnegative integer, got {points}"
            )));
        }
        config.grid = Some(GridSpec {
            t_max,
            points: points as usize,
        });
    }
    if let Some(text) = dims {
        let (dim_a, dim_c) = parse_pair::<usize>(text, "--dims")?;
        config.hilbert = Some(HilbertSpec { dim_a, dim_c });
    }
    Ok(())
}

/// Entry point behind `main`. Prints human-readable progress to stdout.
pub fn execute(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Run {
            config,
            out,
            grid,
            dims,
        } => {
            let (mut cfg, fallback) = load_config(&config)?;
            apply_overrides(&mut cfg, grid.as_deref(), dims.as_deref())?;
            let scenario = cfg.resolve(&fallback)?;
            let out_dir = out.unwrap_or_else(|| PathBuf::from("out"));
            let outputs = run_scenario(&scenario, &out_dir)?;
            for output in &outputs {
                println!(
                    "job {}: wrote {} ({} rows) and {}",
                    output.name,
                    output.csv_path.display(),
                    output.rows,
                    output.meta_path.display()
                );
                if let Some(warning) = &output.diagnostics.validity_warning {
                    println!("  note: {warning}");
                }
            }
            Ok(())
        }
        Command::Compare {
            config,
            out,
            grid,
            dims,
        } => {
            let (mut cfg, fallback) = load_config(&config)?;
            apply_overrides(&mut cfg, grid.as_deref(), dims.as_deref())?;
            let scenario = cfg.resolve(&fallback)?;
            let out_dir = out.unwrap_or_else(|| PathBuf::from("out"));
            let (_, summary) = compare_to_dir(&scenario, &out_dir)?;
            print!("{summary}");
            println!(
                "wrote {0}/{1}.csv, {0}/{1}.analytic.csv, {0}/{1}.report.json",
                out_dir.display(),
                scenario.name
            );
            Ok(())
        }
        Command::Presets { name, out } => match name {
            None => {
                for (name, description, _) in presets() {
                    println!("{name:<7} {description}");
                }
                Ok(())
            }
            Some(name) => {
                let cfg = preset_config(&name)?;
                let out_dir = out.unwrap_or_else(|| PathBuf::from("out"));
                fs::create_dir_all(&out_dir)?;
                let path = out_dir.join(format!("{name}.toml"));
                let text = toml::to_string_pretty(&cfg)
                    .map_err(|e| Error::Config(format!("preset serialization failed: {e}")))?;
                write_atomic(&path, text.as_bytes())?;
                println!("wrote {}", path.display());
                Ok(())
            }
        },
        Command::Version => {
            println!("kerr-exciton {VERSION}");
            Ok(())
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn minimal_toml() -> &'static str {
        r#"
            pipeline = "analytic"

            [params]
            omega1 = 25.277
            omega2 = 24.013
            chi = 0.05304

            [initial]
            kind = "coherent"
            alpha = 2.0
            beta_mag = 1.0
        "#
    }

    #[test]
    fn minimal_config_resolves_with_defaults() {
        let cfg: ScenarioConfig = toml::from_str(minimal_toml()).unwrap();
        let scenario = cfg.resolve("desk").unwrap();
        assert_eq!(scenario.name, "desk");
        assert_eq!(scenario.grid.t_max, 0.3);
        assert_eq!(scenario.grid.points, 300);
        assert_eq!(scenario.hilbert.dim_a, 20);
        assert_eq!(scenario.params.g, 1.0);
        assert_eq!(scenario.step, 2e-4);
    }

    #[test]
    fn unknown_keys_are_rejected_everywhere() {
        let top = format!("{}\nunknown_key = 1\n", minimal_toml());
        assert!(toml::from_str::<ScenarioConfig>(&top).is_err());
        let nested = minimal_toml().replace("chi = 0.05304", "chi = 0.05304\nxi = 2.0");
        assert!(toml::from_str::<ScenarioConfig>(&nested).is_err());
        let initial = minimal_toml().replace("beta_mag = 1.0", "beta_mag = 1.0\nextra = 3");
        assert!(toml::from_str::<ScenarioConfig>(&initial).is_err());
    }

    #[test]
    fn analytic_pipeline_rejects_fock_and_damping() {
        let fock = minimal_toml().replace(
            "kind = \"coherent\"\n            alpha = 2.0\n            beta_mag = 1.0",
            "kind = \"fock\"\n            n_a = 0\n            n_c = 5",
        );
        let cfg: ScenarioConfig = toml::from_str(&fock).unwrap();
        assert!(matches!(cfg.resolve("x"), Err(Error::Config(_))));

        let damped = minimal_toml().replace("chi = 0.05304", "chi = 0.05304\ngamma = 0.01");
        let cfg: ScenarioConfig = toml::from_str(&damped).unwrap();
        assert!(matches!(cfg.resolve("x"), Err(Error::Config(_))));
    }

    #[test]
    fn initial_table_cross_field_validation() {
        let mixed = minimal_toml().replace("beta_mag = 1.0", "beta_mag = 1.0\nn_a = 1");
        let cfg: ScenarioConfig = toml::from_str(&mixed).unwrap();
        assert!(matches!(cfg.resolve("x"), Err(Error::Config(_))));

        let bad_kind = minimal_toml().replace("kind = \"coherent\"", "kind = \"thermal\"");
        let cfg: ScenarioConfig = toml::from_str(&bad_kind).unwrap();
        assert!(matches!(cfg.resolve("x"), Err(Error::Config(_))));
    }

    #[test]
    fn sweep_expansion_names_jobs() {
        let toml_text = format!(
            "{}\n[sweep]\nparam = \"phi\"\nvalues = [0.0, 1.5]\n",
            minimal_toml()
        );
        let cfg: ScenarioConfig = toml::from_str(&toml_text).unwrap();
        let scenario = cfg.resolve("scan").unwrap();
        let jobs = scenario.jobs().unwrap();
        assert_eq!(jobs.len(), 2);
        assert_eq!(jobs[0].name, "scan_phi0");
        assert_eq!(jobs[1].name, "scan_phi1.5");
        match &jobs[1].initial {
            InitialState::Coherent(amps) => assert_eq!(amps.phi, 1.5),
            other => panic!("unexpected initial {other:?}"),
        }
    }

    #[test]
    fn sweep_validation() {
        let gamma_on_analytic = format!(
            "{}\n[sweep]\nparam = \"gamma\"\nvalues = [0.0, 0.01]\n",
            minimal_toml()
        );
        let cfg: ScenarioConfig = toml::from_str(&gamma_on_analytic).unwrap();
        assert!(matches!(cfg.resolve("x"), Err(Error::Config(_))));

        let empty = format!(
            "{}\n[sweep]\nparam = \"phi\"\nvalues = []\n",
            minimal_toml()
        );
        let cfg: ScenarioConfig = toml::from_str(&empty).unwrap();
        assert!(matches!(cfg.resolve("x"), Err(Error::Config(_))));
    }

    #[test]
    fn presets_all_resolve_and_expand() {
        let all = presets();
        assert_eq!(all.len(), 13);
        let names: Vec<&str> = all.iter().map(|(n, _, _)| *n).collect();
        for expected in [
            "fig1a", "fig1b", "fig2a", "fig2b", "fig3a", "fig3b", "fig4a", "fig4b", "fig4c",
            "fig4d", "fig4e", "fig4f", "fig5",
        ] {
            assert!(names.contains(&expected), "missing preset {expected}");
        }
        for (name, _, cfg) in all {
            let scenario = cfg.resolve(name).unwrap();
            let jobs = scenario.jobs().unwrap();
            assert!(!jobs.is_empty(), "{name} expands to no jobs");
            let text = toml::to_string_pretty(&cfg).unwrap();
            let round: ScenarioConfig = toml::from_str(&text).unwrap();
            assert_eq!(round.resolve(name).unwrap().name, scenario.name);
        }
        assert!(preset_config("fig0").is_err());
    }

    #[test]
    fn budgets_follow_parameter_regime() {
        let cds = SystemParams::cds();
        assert_eq!(column_budget(&cds, "N_a"), Some(1e-2));
        assert_eq!(column_budget(&cds, "g2_a"), None);
        let linear = SystemParams::new(25.277, 24.013, 0.0, 1.0).unwrap();
        assert_eq!(column_budget(&linear, "varX_a"), Some(1e-8));
        assert_eq!(column_budget(&linear, "N_a"), None);
        let free = SystemParams::new(25.277, 24.013, 0.0, 0.0).unwrap();
        assert_eq!(column_budget(&free, "S_a_to_c"), Some(1e-8));
    }

    #[test]
    fn nan_columns_compare_as_agreement_only_when_shared() {
        assert_eq!(column_diff(f64::NAN, f64::NAN), 0.0);
        assert_eq!(column_diff(1.0, 2.5), 1.5);
        assert!(column_diff(f64::NAN, 1.0).is_infinite());
    }

    #[test]
    fn grid_and_dims_overrides_parse() {
        let mut cfg: ScenarioConfig = toml::from_str(minimal_toml()).unwrap();
        apply_overrides(&mut cfg, Some("0.5,40"), Some("6,7")).unwrap();
        assert_eq!(
            cfg.grid,
            Some(GridSpec {
                t_max: 0.5,
                points: 40
            })
        );
        assert_eq!(cfg.hilbert, Some(HilbertSpec { dim_a: 6, dim_c: 7 }));
        assert!(apply_overrides(&mut cfg, Some("0.5"), None).is_err());
        assert!(apply_overrides(&mut cfg, Some("0.5,12.5"), None).is_err());
        assert!(apply_overrides(&mut cfg, None, Some("6,7,8")).is_err());
    }

    #[test]
    fn meta_sidecar_round_trips_as_run_input() {
        let cfg: ScenarioConfig = toml::from_str(minimal_toml()).unwrap();
        let scenario = cfg.resolve("loop").unwrap();
        let job = &scenario.jobs().unwrap()[0];
        let meta = MetaSidecar {
            config: job.config_echo(),
            diagnostics: JobDiagnostics {
                source: "analytic".to_string(),
                validity_warning: None,
                integrator_step: None,
                initial_top_level_occupation: None,
                max_top_level_occupation: None,
                max_weight_drift: None,
                min_sampled_eigenvalue: None,
                notes: Vec::new(),
            },
        };
        let text = serde_json::to_string_pretty(&meta).unwrap();
        let value: serde_json::Value = serde_json::from_str(&text).unwrap();
        let round: ScenarioConfig =
            serde_json::from_value(value.get("config").unwrap().clone()).unwrap();
        let again = round.resolve("ignored").unwrap();
        assert_eq!(again.name, "loop");
        assert_eq!(again.grid, scenario.grid);
        assert_eq!(again.hilbert, scenario.hilbert);
    }

    #[test]
    fn compare_rejects_sweeps_and_fock() {
        let sweep = format!(
            "{}\n[sweep]\nparam = \"phi\"\nvalues = [0.0]\n",
            minimal_toml()
        );
        let cfg: ScenarioConfig = toml::from_str(&sweep).unwrap();
        let scenario = cfg.resolve("x").unwrap();
        assert!(matches!(compare_scenario(&scenario), Err(Error::Config(_))));
    }
}
