//! Weighted FTRL with anytime iterate averaging.
//!
//! The learner keeps `w_{t+1} = w_1 - gamma_t * sum_{i<=t} alpha_i g_i` and
//! plays the running weighted average `x_t = (sum_{i<=t} alpha_i w_i) / A_t`,
//! where the gradients are taken at the averaged points. All sums are
//! maintained incrementally.

use crate::error::{Error, Result};
use crate::optim::GradientSample;

#[derive(Debug, Clone)]
pub struct AnytimeFtrl {
    w1: Vec<f64>,
    /// FTRL prediction of the upcoming round.
    w: Vec<f64>,
    /// Averaged iterate of the upcoming round (where the gradient is taken).
    x: Vec<f64>,
    /// Running sum of weighted gradients.
    weighted_grad_sum: Vec<f64>,
    /// Running sum of weighted FTRL predictions.
    weighted_pred_sum: Vec<f64>,
    weight_sum: f64,
    /// Weight of the round about to be played.
    cur_alpha: f64,
    round: usize,
    prev_gamma: Option<Vec<f64>>,
}

impl AnytimeFtrl {
    pub fn new(w1: Vec<f64>, alpha1: f64) -> Result<Self> {
        if w1.is_empty() || w1.iter().any(|v| !v.is_finite()) {
            return Err(Error::RejectedInput(
                "initial point must be finite and non-empty".into(),
            ));
        }
        if !(alpha1.is_finite() && alpha1 > 0.0) {
            return Err(Error::Config(format!(
                "round weight must be positive, got {alpha1}"
            )));
        }
        let weighted_pred_sum: Vec<f64> = w1.iter().map(|v| alpha1 * v).collect();
        Ok(Self {
            w: w1.clone(),
            x: w1.clone(),
            weighted_grad_sum: vec![0.0; w1.len()],
            weighted_pred_sum,
            w1,
            weight_sum: alpha1,
            cur_alpha: alpha1,
            round: 1,
            prev_gamma: None,
        })
    }

    /// Consume the gradient taken at the current query point, fold it with
    /// the current round's weight, refresh the FTRL prediction with `gamma`
    /// (the stepsize of this round) and roll the weighted average forward.
    pub fn step(&mut self, g: &GradientSample, alpha_next: f64, gamma: &[f64]) -> Result<()> {
        let d = self.w.len();
        if g.dim() != d {
            return Err(Error::Config(format!(
                "gradient dimension {} does not match state dimension {}",
                g.dim(),
                d
            )));
        }
        if !(alpha_next.is_finite() && alpha_next > 0.0) {
            return Err(Error::Config(format!(
                "round weight must be positive, got {alpha_next}"
            )));
        }
        if gamma.len() != d {
            return Err(Error::Config(format!(
                "stepsize dimension {} does not match state dimension {}",
                gamma.len(),
                d
            )));
        }
        if gamma.iter().any(|v| !(v.is_finite() && *v > 0.0)) {
            return Err(Error::Config(
                "stepsize entries must be positive and finite".into(),
            ));
        }
        if let Some(prev) = &self.prev_gamma {
            if gamma.iter().zip(prev).any(|(now, before)| now > before) {
                return Err(Error::Config(
                    "stepsize sequence must be non-increasing".into(),
                ));
            }
        }

        for (s, &gj) in self.weighted_grad_sum.iter_mut().zip(g.values()) {
            *s += self.cur_alpha * gj;
        }
        self.weight_sum += alpha_next;
        for (j, &gj) in gamma.iter().enumerate() {
            self.w[j] = self.w1[j] - gj * self.weighted_grad_sum[j];
            self.weighted_pred_sum[j] += alpha_next * self.w[j];
            self.x[j] = self.weighted_pred_sum[j] / self.weight_sum;
        }
        self.cur_alpha = alpha_next;
        self.round += 1;
        match &mut self.prev_gamma {
            Some(buf) => buf.copy_from_slice(gamma),
            None => self.prev_gamma = Some(gamma.to_vec()),
        }
        Ok(())
    }

    /// Where the next gradient should be taken.
    pub fn query_point(&self) -> &[f64] {
        &self.x
    }

    /// The FTRL prediction of the upcoming round.
    pub fn ftrl_point(&self) -> &[f64] {
        &self.w
    }

    pub fn weight_sum(&self) -> f64 {
        self.weight_sum
    }

    pub fn round(&self) -> usize {
        self.round
    }

    pub fn dim(&self) -> usize {
        self.w.len()
    }
}
