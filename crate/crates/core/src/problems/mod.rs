//! Datasets, loss functions, and gradient oracles for linear models.
//!
//! Everything downstream works against [`Dataset`]: a list of sparse rows
//! with ±1 labels plus the constants ([`ProblemMeta`]) that the bound
//! calculators in [`crate::analysis`] consume. Data comes from either the
//! synthetic separable generator ([`synth_separable`]) or the LIBSVM text
//! parser ([`parse_libsvm`]).

mod libsvm;
mod loss;
mod oracle;
mod synth;

pub use libsvm::{parse_libsvm, parse_libsvm_with_dim, serialize_libsvm};
pub use loss::{full_objective, full_subgradient, loss_and_subgrad, LossKind};
pub use oracle::{SampleOrder, StochasticOracle};
pub use synth::synth_separable;

use crate::error::{Error, Result};

/// How per-sample losses combine into the reported objective: a plain sum
/// over samples (the default everywhere here) or the mean for comparing
/// against tools that normalize by `n`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ObjectiveScale {
    Sum,
    Mean,
}

impl ObjectiveScale {
    /// Multiplier applied to a single-sample quantity so that its
    /// expectation under uniform sampling matches the objective.
    pub fn per_sample_factor(self, n: usize) -> f64 {
        match self {
            ObjectiveScale::Sum => n as f64,
            ObjectiveScale::Mean => 1.0,
        }
    }
}

/// One sample's features: `(index, value)` pairs, sorted by index, indices
/// 0-based and unique, values finite.
#[derive(Debug, Clone, PartialEq)]
pub struct SparseRow {
    entries: Vec<(usize, f64)>,
}

impl SparseRow {
    pub fn new(mut entries: Vec<(usize, f64)>) -> Result<Self> {
        if entries.iter().any(|&(_, v)| !v.is_finite()) {
            return Err(Error::RejectedInput("non-finite feature value".into()));
        }
        entries.sort_unstable_by_key(|&(j, _)| j);
        if entries.windows(2).any(|w| w[0].0 == w[1].0) {
            return Err(Error::RejectedInput("duplicate feature index".into()));
        }
        Ok(Self { entries })
    }

    /// A fully dense row over coordinates `0..values.len()`.
    pub fn dense(values: &[f64]) -> Result<Self> {
        Self::new(values.iter().copied().enumerate().collect())
    }

    pub fn entries(&self) -> &[(usize, f64)] {
        &self.entries
    }

    pub fn nnz(&self) -> usize {
        self.entries.len()
    }

    /// Largest 0-based index present, if any.
    pub fn max_index(&self) -> Option<usize> {
        self.entries.last().map(|&(j, _)| j)
    }

    /// `<row, w>`; `w` must cover every index in the row.
    pub fn dot(&self, w: &[f64]) -> f64 {
        self.entries.iter().map(|&(j, v)| v * w[j]).sum()
    }

    pub fn norm_sq(&self) -> f64 {
        self.entries.iter().map(|&(_, v)| v * v).sum()
    }

    pub fn max_abs(&self) -> f64 {
        self.entries.iter().fold(0.0, |m, &(_, v)| m.max(v.abs()))
    }

    /// `out += coeff * row`, touching only the stored indices.
    pub fn add_scaled_into(&self, coeff: f64, out: &mut [f64]) {
        for &(j, v) in &self.entries {
            out[j] += coeff * v;
        }
    }

    /// Dense copy of length `d`.
    pub fn to_dense(&self, d: usize) -> Vec<f64> {
        let mut out = vec![0.0; d];
        self.add_scaled_into(1.0, &mut out);
        out
    }
}

/// Problem constants consumed by stepsize choices and bound calculators.
#[derive(Debug, Clone, PartialEq)]
pub struct ProblemMeta {
    /// Bound on the ℓ2 norm of any per-sample (unscaled) subgradient:
    /// the largest row norm.
    pub g: f64,
    /// Bound on the ℓ∞ norm: the largest absolute feature value.
    pub g_inf: f64,
    /// Smoothness constant of the squared-hinge sum objective on this data:
    /// `2 n max_i ||x_i||^2`.
    pub l_smooth: f64,
    /// Gradient noise level, when known.
    pub sigma: Option<f64>,
    /// Separation margin, when the data was generated with one.
    pub margin: Option<f64>,
    /// Optimal objective value, when known (0 for separable hinge losses).
    pub f_star: Option<f64>,
}

/// An immutable labelled dataset over `R^d` with rows stored sparse.
#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    rows: Vec<SparseRow>,
    labels: Vec<f64>,
    d: usize,
    meta: ProblemMeta,
}

impl Dataset {
    /// Validates labels (±1), index range, and computes the base meta
    /// constants from the rows.
    pub fn new(rows: Vec<SparseRow>, labels: Vec<f64>, d: usize) -> Result<Self> {
        if rows.len() != labels.len() {
            return Err(Error::Config(format!(
                "{} rows but {} labels",
                rows.len(),
                labels.len()
            )));
        }
        if labels.iter().any(|&y| y != 1.0 && y != -1.0) {
            return Err(Error::RejectedInput("labels must be +1 or -1".into()));
        }
        for row in &rows {
            if let Some(j) = row.max_index() {
                if j >= d {
                    return Err(Error::RejectedInput(format!(
                        "feature index {j} outside dimension {d}"
                    )));
                }
            }
        }
        let max_norm_sq = rows.iter().map(SparseRow::norm_sq).fold(0.0, f64::max);
        let meta = ProblemMeta {
            g: max_norm_sq.sqrt(),
            g_inf: rows.iter().map(SparseRow::max_abs).fold(0.0, f64::max),
            l_smooth: 2.0 * rows.len() as f64 * max_norm_sq,
            sigma: None,
            margin: None,
            f_star: None,
        };
        Ok(Self {
            rows,
            labels,
            d,
            meta,
        })
    }

    pub fn n(&self) -> usize {
        self.rows.len()
    }

    pub fn dim(&self) -> usize {
        self.d
    }

    pub fn rows(&self) -> &[SparseRow] {
        &self.rows
    }

    pub fn labels(&self) -> &[f64] {
        &self.labels
    }

    pub fn row(&self, i: usize) -> &SparseRow {
        &self.rows[i]
    }

    pub fn label(&self, i: usize) -> f64 {
        self.labels[i]
    }

    pub fn meta(&self) -> &ProblemMeta {
        &self.meta
    }

    /// For constructors that know more than the rows reveal (margin, noise
    /// level, optimal value).
    pub fn meta_mut(&mut self) -> &mut ProblemMeta {
        &mut self.meta
    }
}
