//! Per-sample losses for linear predictors and the summed objective.

use super::{Dataset, ObjectiveScale, SparseRow};

/// Convex losses on a linear score `<w, x>`.
///
/// Every variant has subgradients of the form `coeff * x`, which the
/// stochastic oracle exploits to avoid materializing sparse vectors.
#[derive(Debug, Clone, PartialEq)]
pub enum LossKind {
    /// `max(0, 1 - y <w, x>)`; at a functional margin of exactly 1 the
    /// subgradient 0 is returned (the minimal-norm element of the
    /// subdifferential, keeping gradient-norm bounds tight).
    Hinge,
    /// `max(0, 1 - y <w, x>)^2` — differentiable, and smooth on bounded data.
    SquaredHinge,
    /// `|<w, x> - <target, x>|` for a fixed weight-space target: an absolute
    /// deviation in the prediction, with the label ignored. At a tie the
    /// subgradient 0 is returned.
    AbsDeviation(Vec<f64>),
}

impl LossKind {
    /// Loss value and the scalar `coeff` such that `coeff * x` is the chosen
    /// subgradient at `w`.
    pub(crate) fn loss_coeff(&self, w: &[f64], row: &SparseRow, label: f64) -> (f64, f64) {
        match self {
            LossKind::Hinge => {
                let slack = 1.0 - label * row.dot(w);
                if slack > 0.0 {
                    (slack, -label)
                } else {
                    (0.0, 0.0)
                }
            }
            LossKind::SquaredHinge => {
                let slack = 1.0 - label * row.dot(w);
                if slack > 0.0 {
                    (slack * slack, -2.0 * slack * label)
                } else {
                    (0.0, 0.0)
                }
            }
            LossKind::AbsDeviation(target) => {
                let residual = row.dot(w) - row.dot(target);
                (residual.abs(), sign(residual))
            }
        }
    }
}

fn sign(v: f64) -> f64 {
    if v > 0.0 {
        1.0
    } else if v < 0.0 {
        -1.0
    } else {
        0.0
    }
}

/// Loss value and subgradient of one sample at `w`.
///
/// `w` (and the target of [`LossKind::AbsDeviation`]) must cover every index
/// present in `row`; that is a caller contract, not a checked error.
pub fn loss_and_subgrad(
    kind: &LossKind,
    w: &[f64],
    row: &SparseRow,
    label: f64,
) -> (f64, SparseRow) {
    let (value, coeff) = kind.loss_coeff(w, row, label);
    let grad = SparseRow::new(row.entries().iter().map(|&(j, v)| (j, coeff * v)).collect())
        .expect("scaling a valid row keeps it valid");
    (value, grad)
}

/// Objective over the whole dataset: the sum of per-sample losses, or the
/// mean under [`ObjectiveScale::Mean`].
pub fn full_objective(kind: &LossKind, w: &[f64], data: &Dataset, scale: ObjectiveScale) -> f64 {
    let total: f64 = data
        .rows()
        .iter()
        .zip(data.labels())
        .map(|(row, &y)| kind.loss_coeff(w, row, y).0)
        .sum();
    match scale {
        ObjectiveScale::Sum => total,
        ObjectiveScale::Mean => total / data.n() as f64,
    }
}

/// Full (sub)gradient of the summed objective, matching the same tie rule as
/// [`loss_and_subgrad`] on every sample.
pub fn full_subgradient(
    kind: &LossKind,
    w: &[f64],
    data: &Dataset,
    scale: ObjectiveScale,
) -> Vec<f64> {
    let mut out = vec![0.0; data.dim()];
    for (row, &y) in data.rows().iter().zip(data.labels()) {
        let (_, coeff) = kind.loss_coeff(w, row, y);
        row.add_scaled_into(coeff, &mut out);
    }
    if scale == ObjectiveScale::Mean {
        let n = data.n() as f64;
        for v in &mut out {
            *v /= n;
        }
    }
    out
}
