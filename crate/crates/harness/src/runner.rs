//! Multi-seed experiment execution and stepsize grid selection.

use std::path::{Path, PathBuf};
use std::time::Instant;

use rayon::prelude::*;

use ftrlm_core::optim::{GradientSample, OptimizerState};
use ftrlm_core::problems::{
    full_objective, parse_libsvm, synth_separable, Dataset, LossKind, StochasticOracle,
};

use crate::config::{Algo, DatasetSpec, ExperimentConfig, LossSpec};
use crate::{Error, Result};

/// Objectives above this are treated as divergence.
pub const DIVERGENCE_LIMIT: f64 = 1e12;

/// One (algorithm, grid point, seed) run.
#[derive(Debug, Clone, PartialEq)]
pub struct RunRecord {
    pub algo: String,
    pub schedule: String,
    /// Grid point the schedule was built from.
    pub c: f64,
    pub seed: u64,
    pub epochs: usize,
    /// Objective at epoch boundaries, starting with the initial point;
    /// length `epochs + 1` unless the run diverged and was truncated.
    pub objective_per_epoch: Vec<f64>,
    /// Realized `sum_t ||g_t||^2` over emitted gradients.
    pub grad_sq_sum: f64,
    /// Realized per-coordinate `sum_t g_{t,j}^2`.
    pub grad_sq_per_coord: Vec<f64>,
    pub wallclock_secs: f64,
    /// Set when the objective blew past [`DIVERGENCE_LIMIT`], turned
    /// non-finite, or the iterate produced non-finite gradients. Diverged
    /// runs are excluded from averages and grid selection.
    pub diverged: bool,
}

impl RunRecord {
    pub fn final_objective(&self) -> Option<f64> {
        if self.diverged {
            None
        } else {
            self.objective_per_epoch.last().copied()
        }
    }
}

/// Resolve a dataset spec, looking file paths up under `data_dir` when the
/// path itself does not exist as given.
pub fn load_dataset(spec: &DatasetSpec, data_dir: Option<&Path>) -> Result<Dataset> {
    match spec {
        DatasetSpec::Synth { n, d, margin, seed } => Ok(synth_separable(*n, *d, *margin, *seed)?),
        DatasetSpec::File { path } => {
            let resolved: PathBuf = if path.exists() {
                path.clone()
            } else if let Some(dir) = data_dir {
                dir.join(path)
            } else {
                path.clone()
            };
            let text = std::fs::read_to_string(&resolved).map_err(|e| Error::io(&resolved, e))?;
            Ok(parse_libsvm(&text)?)
        }
    }
}

fn loss_kind(spec: LossSpec) -> LossKind {
    match spec {
        LossSpec::Hinge => LossKind::Hinge,
        LossSpec::SquaredHinge => LossKind::SquaredHinge,
    }
}

/// Run every (algorithm, grid point, seed) combination of the config over
/// the dataset, in parallel, and return the records sorted by
/// (algorithm, grid point, seed) so emission order never depends on thread
/// scheduling.
pub fn run_experiment(cfg: &ExperimentConfig, data_dir: Option<&Path>) -> Result<Vec<RunRecord>> {
    cfg.validate()?;
    let data = load_dataset(&cfg.dataset, data_dir)?;
    let kind = loss_kind(cfg.loss);

    let mut jobs = Vec::new();
    for algo in &cfg.algos {
        for &c in &cfg.grid {
            for seed in 0..cfg.seeds {
                jobs.push((*algo, c, seed));
            }
        }
    }

    let mut records = jobs
        .par_iter()
        .map(|&(algo, c, seed)| run_single(algo, c, seed, cfg, &data, &kind))
        .collect::<Result<Vec<_>>>()?;
    records.sort_by(|a, b| {
        (&a.algo, a.c, a.seed)
            .partial_cmp(&(&b.algo, b.c, b.seed))
            .expect("run keys are finite")
    });
    Ok(records)
}

fn run_single(
    algo: Algo,
    c: f64,
    seed: u64,
    cfg: &ExperimentConfig,
    data: &Dataset,
    kind: &LossKind,
) -> Result<RunRecord> {
    let start = Instant::now();
    let d = data.dim();
    let mut oracle = StochasticOracle::new(data, kind.clone(), seed, cfg.order, cfg.scale)?;

    let mut state = match algo {
        Algo::Sgdm { averaged: true, .. } => OptimizerState::new(vec![0.0; d])?.with_averaging(),
        Algo::Sgdm { .. } | Algo::AdaGrad => OptimizerState::new(vec![0.0; d])?,
        Algo::FtrlM | Algo::AdaFtrlM => OptimizerState::ftrl_start(vec![0.0; d], 1.0)?,
    };
    let sched = algo.ftrl_schedule(c, cfg.eps);

    let mut grad_buf = vec![0.0; d];
    let mut sample = GradientSample::new(vec![0.0; d])?;
    let mut grad_sq_sum = 0.0;
    let mut grad_sq_per_coord = vec![0.0; d];

    let report_point = |state: &OptimizerState| -> Vec<f64> {
        state
            .averaged_iterate()
            .unwrap_or_else(|| state.iterate())
            .to_vec()
    };

    let mut objective_per_epoch =
        vec![full_objective(kind, &report_point(&state), data, cfg.scale)];
    let mut diverged = false;

    'epochs: for _ in 0..cfg.epochs {
        for _ in 0..data.n() {
            oracle.fill_next(state.iterate(), &mut grad_buf)?;
            if sample.set_values(&grad_buf).is_err() {
                // Non-finite gradient: the iterate has left the realm.
                diverged = true;
                break 'epochs;
            }
            for (acc, g) in grad_sq_per_coord.iter_mut().zip(&grad_buf) {
                grad_sq_sum += g * g;
                *acc += g * g;
            }
            let t = state.round();
            let step = match algo {
                Algo::Sgdm { beta, .. } => state.sgdm_step(&sample, c / (t as f64).sqrt(), beta),
                Algo::AdaGrad => state.adagrad_step(&sample, c, cfg.eps),
                Algo::FtrlM | Algo::AdaFtrlM => {
                    state.ftrl_step(&sample, 1.0, sched.as_ref().expect("set above"))
                }
            };
            if step.is_err() {
                diverged = true;
                break 'epochs;
            }
        }
        let obj = full_objective(kind, &report_point(&state), data, cfg.scale);
        if !obj.is_finite() || obj > DIVERGENCE_LIMIT {
            diverged = true;
            break;
        }
        objective_per_epoch.push(obj);
    }

    Ok(RunRecord {
        algo: algo.label(),
        schedule: algo.schedule_label(c, cfg.eps),
        c,
        seed,
        epochs: cfg.epochs,
        objective_per_epoch,
        grad_sq_sum,
        grad_sq_per_coord,
        wallclock_secs: start.elapsed().as_secs_f64(),
        diverged,
    })
}

/// For each algorithm, the grid point minimizing the mean final objective
/// over non-diverged seeds; ties go to the smaller stepsize. Errors if every
/// run of some algorithm diverged.
pub fn grid_select(records: &[RunRecord]) -> Result<Vec<(String, f64)>> {
    let mut algos: Vec<&str> = records.iter().map(|r| r.algo.as_str()).collect();
    algos.sort_unstable();
    algos.dedup();

    let mut best = Vec::new();
    for algo in algos {
        let mut cs: Vec<f64> = records
            .iter()
            .filter(|r| r.algo == algo)
            .map(|r| r.c)
            .collect();
        cs.sort_by(|a, b| a.partial_cmp(b).expect("finite grid"));
        cs.dedup();
        let mut winner: Option<(f64, f64)> = None; // (c, mean final)
        for c in cs {
            let finals: Vec<f64> = records
                .iter()
                .filter(|r| r.algo == algo && r.c == c)
                .filter_map(RunRecord::final_objective)
                .collect();
            if finals.is_empty() {
                continue; // every seed diverged at this grid point
            }
            let mean = finals.iter().sum::<f64>() / finals.len() as f64;
            // Strict improvement only: on ties the earlier (smaller) c wins.
            if winner.is_none_or(|(_, best_mean)| mean < best_mean) {
                winner = Some((c, mean));
            }
        }
        match winner {
            Some((c, _)) => best.push((algo.to_string(), c)),
            None => return Err(Error::NoUsableRuns(format!("every run of {algo} diverged"))),
        }
    }
    Ok(best)
}
