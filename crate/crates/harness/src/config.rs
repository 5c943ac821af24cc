//! Experiment configuration: the algorithm roster, stepsize grids, and a
//! plain-text `key = value` config format.

use std::path::PathBuf;

use ftrlm_core::optim::StepsizeSchedule;
use ftrlm_core::problems::{ObjectiveScale, SampleOrder};

use crate::{Error, Result};

/// The algorithms the runner knows how to drive.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Algo {
    /// Classic constant-momentum SGD with `eta_t = c / sqrt(t)`; when
    /// `averaged`, the reported point is the running average of iterates.
    Sgdm { beta: f64, averaged: bool },
    /// Per-coordinate accumulated-gradient scaling with stepsize `c`.
    AdaGrad,
    /// Momentum form of weighted averaging with `gamma_t = c / sqrt(t)`.
    FtrlM,
    /// Same kernel with the coordinate-wise adaptive stepsize, scale `c`.
    AdaFtrlM,
}

impl Algo {
    pub fn label(&self) -> String {
        match self {
            Algo::Sgdm {
                beta,
                averaged: false,
            } => format!("sgdm(beta={beta})"),
            Algo::Sgdm {
                beta,
                averaged: true,
            } => format!("sgdm-avg(beta={beta})"),
            Algo::AdaGrad => "adagrad".into(),
            Algo::FtrlM => "ftrlm".into(),
            Algo::AdaFtrlM => "adaftrlm".into(),
        }
    }

    /// Human-readable snapshot of the schedule this algorithm runs with at
    /// grid point `c` (commas avoided so CSV fields stay unquoted).
    pub fn schedule_label(&self, c: f64, eps: f64) -> String {
        match self {
            Algo::Sgdm { .. } => format!("eta=c/sqrt(t) c={c}"),
            Algo::AdaGrad => format!("adagrad c={c} eps={eps:e}"),
            Algo::FtrlM => format!("gamma=c/sqrt(t) c={c}"),
            Algo::AdaFtrlM => format!("adaptive-coord c={c} eps={eps:e}"),
        }
    }

    /// The stepsize schedule fed to the weighted-averaging kernel, when this
    /// algorithm uses one.
    pub fn ftrl_schedule(&self, c: f64, eps: f64) -> Option<StepsizeSchedule> {
        match self {
            Algo::FtrlM => Some(StepsizeSchedule::Polynomial { c, exponent: 0.5 }),
            Algo::AdaFtrlM => Some(StepsizeSchedule::AdaptiveCoordinate { scale: c, eps }),
            _ => None,
        }
    }

    fn parse(tok: &str, beta: f64) -> Result<Self> {
        match tok {
            "sgdm" => Ok(Algo::Sgdm {
                beta,
                averaged: false,
            }),
            "sgdm-avg" => Ok(Algo::Sgdm {
                beta,
                averaged: true,
            }),
            "adagrad" => Ok(Algo::AdaGrad),
            "ftrlm" => Ok(Algo::FtrlM),
            "adaftrlm" => Ok(Algo::AdaFtrlM),
            other => Err(Error::Config(format!(
                "unknown algorithm {other:?} (expected sgdm, sgdm-avg, adagrad, ftrlm, adaftrlm)"
            ))),
        }
    }
}

/// Where the data comes from.
#[derive(Debug, Clone, PartialEq)]
pub enum DatasetSpec {
    Synth {
        n: usize,
        d: usize,
        margin: f64,
        seed: u64,
    },
    File {
        path: PathBuf,
    },
}

/// Loss selection exposed through the config format.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LossSpec {
    Hinge,
    SquaredHinge,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub dataset: DatasetSpec,
    pub loss: LossSpec,
    pub algos: Vec<Algo>,
    /// Stepsize grid (the `c` of each algorithm's schedule).
    pub grid: Vec<f64>,
    pub epochs: usize,
    /// Number of seeds; runs use seeds `0..seeds`.
    pub seeds: u64,
    /// Adaptive-schedule regularizer.
    pub eps: f64,
    pub order: SampleOrder,
    pub scale: ObjectiveScale,
}

impl ExperimentConfig {
    pub fn validate(&self) -> Result<()> {
        if self.algos.is_empty() {
            return Err(Error::Config("need at least one algorithm".into()));
        }
        if self.grid.is_empty() {
            return Err(Error::Config("need at least one grid point".into()));
        }
        if self.grid.iter().any(|c| !(c.is_finite() && *c > 0.0)) {
            return Err(Error::Config("grid stepsizes must be positive".into()));
        }
        if self.seeds == 0 {
            return Err(Error::Config("need at least one seed".into()));
        }
        if !(self.eps.is_finite() && self.eps > 0.0) {
            return Err(Error::Config("eps must be positive".into()));
        }
        Ok(())
    }
}

/// Parse the plain-text config format: one `key = value` pair per line,
/// `#` comments. Lists use `;` separators.
///
/// Keys: `dataset` (`synth` or a file path), `n`, `d`, `margin`,
/// `data_seed`, `loss` (`hinge` | `squared_hinge`), `algos`, `grid`,
/// `epochs`, `seeds`, `eps`, `beta`, `order` (`shuffle` | `replacement`),
/// `scale` (`sum` | `mean`).
pub fn parse_config(text: &str) -> Result<ExperimentConfig> {
    let mut kv = std::collections::BTreeMap::new();
    for (line_no, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let Some((k, v)) = line.split_once('=') else {
            return Err(Error::Config(format!(
                "line {}: expected key = value, got {line:?}",
                line_no + 1
            )));
        };
        if kv
            .insert(k.trim().to_string(), v.trim().to_string())
            .is_some()
        {
            return Err(Error::Config(format!(
                "line {}: duplicate key {:?}",
                line_no + 1,
                k.trim()
            )));
        }
    }

    let known = [
        "dataset",
        "n",
        "d",
        "margin",
        "data_seed",
        "loss",
        "algos",
        "grid",
        "epochs",
        "seeds",
        "eps",
        "beta",
        "order",
        "scale",
    ];
    if let Some(bad) = kv.keys().find(|k| !known.contains(&k.as_str())) {
        return Err(Error::Config(format!("unknown key {bad:?}")));
    }

    let get = |k: &str| kv.get(k).map(String::as_str);
    let parse_f64 = |k: &str, v: &str| {
        v.parse::<f64>()
            .map_err(|_| Error::Config(format!("{k}: not a number: {v:?}")))
    };
    let parse_usize = |k: &str, v: &str| {
        v.parse::<usize>()
            .map_err(|_| Error::Config(format!("{k}: not a count: {v:?}")))
    };

    let dataset = match get("dataset") {
        None => return Err(Error::Config("missing key \"dataset\"".into())),
        Some("synth") => DatasetSpec::Synth {
            n: parse_usize("n", get("n").unwrap_or("800"))?,
            d: parse_usize("d", get("d").unwrap_or("100"))?,
            margin: parse_f64("margin", get("margin").unwrap_or("0.1"))?,
            seed: get("data_seed")
                .unwrap_or("0")
                .parse()
                .map_err(|_| Error::Config("data_seed: not an integer".into()))?,
        },
        Some(path) => DatasetSpec::File {
            path: PathBuf::from(path),
        },
    };

    let loss = match get("loss").unwrap_or("squared_hinge") {
        "hinge" => LossSpec::Hinge,
        "squared_hinge" => LossSpec::SquaredHinge,
        other => {
            return Err(Error::Config(format!(
                "unknown loss {other:?} (expected hinge or squared_hinge)"
            )))
        }
    };

    let beta = parse_f64("beta", get("beta").unwrap_or("0.9"))?;
    let algos = get("algos")
        .unwrap_or("sgdm;sgdm-avg;adagrad;ftrlm;adaftrlm")
        .split(';')
        .map(|t| Algo::parse(t.trim(), beta))
        .collect::<Result<Vec<_>>>()?;

    let grid = get("grid")
        .unwrap_or("0.001;0.01;0.1;1;10;100;1000")
        .split(';')
        .map(|t| parse_f64("grid", t.trim()))
        .collect::<Result<Vec<_>>>()?;

    let order = match get("order").unwrap_or("shuffle") {
        "shuffle" => SampleOrder::ShuffleEachEpoch,
        "replacement" => SampleOrder::WithReplacement,
        other => return Err(Error::Config(format!("unknown order {other:?}"))),
    };
    let scale = match get("scale").unwrap_or("sum") {
        "sum" => ObjectiveScale::Sum,
        "mean" => ObjectiveScale::Mean,
        other => return Err(Error::Config(format!("unknown scale {other:?}"))),
    };

    let cfg = ExperimentConfig {
        dataset,
        loss,
        algos,
        grid,
        epochs: parse_usize("epochs", get("epochs").unwrap_or("50"))?,
        seeds: get("seeds")
            .unwrap_or("5")
            .parse()
            .map_err(|_| Error::Config("seeds: not an integer".into()))?,
        eps: parse_f64("eps", get("eps").unwrap_or("1e-8"))?,
        order,
        scale,
    };
    cfg.validate()?;
    Ok(cfg)
}
