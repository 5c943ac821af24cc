//! First-order update kernels and stepsize schedules.
//!
//! All kernels mutate an [`OptimizerState`] in place. The FTRL-based momentum
//! kernel ([`OptimizerState::ftrl_step`]) and the weighted-averaging form
//! ([`AnytimeFtrl`]) produce the same iterates for the same weight and
//! stepsize sequences; the test suites check this to 1e-9.

mod adagrad;
mod anytime;
mod ftrl;
mod schedule;
mod sgdm;

pub use anytime::AnytimeFtrl;
pub use schedule::StepsizeSchedule;

use crate::error::{Error, Result};

/// A validated gradient vector; every entry is finite.
#[derive(Debug, Clone, PartialEq)]
pub struct GradientSample {
    g: Vec<f64>,
    meta: Option<usize>,
}

impl GradientSample {
    pub fn new(g: Vec<f64>) -> Result<Self> {
        Self::validate(&g)?;
        Ok(Self { g, meta: None })
    }

    /// Attach a per-sample identifier (e.g. a dataset row index).
    pub fn with_meta(g: Vec<f64>, meta: usize) -> Result<Self> {
        Self::validate(&g)?;
        Ok(Self {
            g,
            meta: Some(meta),
        })
    }

    /// Overwrite the entries in place (dimension must match); revalidates.
    pub fn set_values(&mut self, src: &[f64]) -> Result<()> {
        if src.len() != self.g.len() {
            return Err(Error::RejectedInput(format!(
                "gradient dimension changed from {} to {}",
                self.g.len(),
                src.len()
            )));
        }
        Self::validate(src)?;
        self.g.copy_from_slice(src);
        Ok(())
    }

    fn validate(g: &[f64]) -> Result<()> {
        if g.is_empty() {
            return Err(Error::RejectedInput("empty gradient".into()));
        }
        if let Some(j) = g.iter().position(|v| !v.is_finite()) {
            return Err(Error::RejectedInput(format!(
                "non-finite gradient entry {} at coordinate {}",
                g[j], j
            )));
        }
        Ok(())
    }

    pub fn values(&self) -> &[f64] {
        &self.g
    }

    pub fn meta(&self) -> Option<usize> {
        self.meta
    }

    pub fn dim(&self) -> usize {
        self.g.len()
    }
}

/// Shared state for the update kernels.
///
/// Fields cover the union of what the kernels need: `x`/`m` for every kernel,
/// the initial point and running weight sums for the FTRL forms, squared
/// gradient accumulators for the adaptive schedules and AdaGrad, and an
/// optional running average of the iterates.
///
/// All running sums are maintained incrementally; nothing is ever recomputed
/// from history.
#[derive(Debug, Clone)]
pub struct OptimizerState {
    x: Vec<f64>,
    m: Vec<f64>,
    x1: Vec<f64>,
    /// 1-based round counter: the index of the next gradient to be consumed.
    t: usize,
    /// Sum of weights through the current round (0 until `ftrl_start`).
    sum_alpha: f64,
    /// Sum of weights through the previous round.
    sum_alpha_prev: f64,
    /// Per-coordinate running sum of squared weighted gradients.
    accum_sq: Vec<f64>,
    /// Running sum of squared weighted gradient norms.
    accum_sq_norm: f64,
    /// Running average of produced iterates, when averaging is enabled.
    avg: Option<Vec<f64>>,
    /// Stepsize emitted at the previous round, used to enforce monotonicity.
    prev_gamma: Option<Vec<f64>>,
}

impl OptimizerState {
    /// State for the plain kernels (SGDM, AdaGrad) starting at `x1`.
    pub fn new(x1: Vec<f64>) -> Result<Self> {
        if x1.is_empty() {
            return Err(Error::RejectedInput("empty initial point".into()));
        }
        if x1.iter().any(|v| !v.is_finite()) {
            return Err(Error::RejectedInput("non-finite initial point".into()));
        }
        let d = x1.len();
        Ok(Self {
            x: x1.clone(),
            m: vec![0.0; d],
            x1,
            t: 1,
            sum_alpha: 0.0,
            sum_alpha_prev: 0.0,
            accum_sq: vec![0.0; d],
            accum_sq_norm: 0.0,
            avg: None,
            prev_gamma: None,
        })
    }

    /// State for the FTRL-based momentum kernel; `alpha1` is the weight of
    /// the first round.
    pub fn ftrl_start(x1: Vec<f64>, alpha1: f64) -> Result<Self> {
        if !(alpha1.is_finite() && alpha1 > 0.0) {
            return Err(Error::Config(format!(
                "round weight must be positive, got {alpha1}"
            )));
        }
        let mut s = Self::new(x1)?;
        s.sum_alpha = alpha1;
        Ok(s)
    }

    /// Enable iterate averaging (SGDM-AVG); the average starts at the
    /// initial point and tracks the produced iterates.
    pub fn with_averaging(mut self) -> Self {
        self.avg = Some(self.x.clone());
        self
    }

    pub fn iterate(&self) -> &[f64] {
        &self.x
    }

    pub fn momentum(&self) -> &[f64] {
        &self.m
    }

    pub fn initial_point(&self) -> &[f64] {
        &self.x1
    }

    pub fn averaged_iterate(&self) -> Option<&[f64]> {
        self.avg.as_deref()
    }

    /// 1-based index of the round about to be played.
    pub fn round(&self) -> usize {
        self.t
    }

    /// Sum of round weights through the current round.
    pub fn weight_sum(&self) -> f64 {
        self.sum_alpha
    }

    /// Sum of round weights through the previous round.
    pub fn weight_sum_prev(&self) -> f64 {
        self.sum_alpha_prev
    }

    /// Per-coordinate running sum of squared weighted gradients.
    pub fn grad_sq_coord(&self) -> &[f64] {
        &self.accum_sq
    }

    /// Running sum of squared weighted gradient norms.
    pub fn grad_sq_total(&self) -> f64 {
        self.accum_sq_norm
    }

    pub fn dim(&self) -> usize {
        self.x.len()
    }

    fn check_dim(&self, g: &GradientSample) -> Result<()> {
        if g.dim() != self.x.len() {
            return Err(Error::Config(format!(
                "gradient dimension {} does not match state dimension {}",
                g.dim(),
                self.x.len()
            )));
        }
        Ok(())
    }

    /// Weight of the round currently being played (FTRL kernels).
    fn current_alpha(&self) -> f64 {
        self.sum_alpha - self.sum_alpha_prev
    }

    /// Fold the incoming gradient into the adaptive accumulators, weighted by
    /// the current round weight. Must happen before the stepsize is emitted
    /// so that adaptive schedules see the newest gradient.
    fn fold_gradient(&mut self, g: &GradientSample) {
        let a = self.current_alpha();
        let a2 = a * a;
        let mut nsq = 0.0;
        for (acc, &gj) in self.accum_sq.iter_mut().zip(g.values()) {
            let sq = gj * gj;
            *acc += a2 * sq;
            nsq += sq;
        }
        self.accum_sq_norm += a2 * nsq;
    }

    /// Enforce that emitted stepsizes never increase.
    fn check_gamma(&self, gamma: &[f64]) -> Result<()> {
        if gamma.len() != self.x.len() {
            return Err(Error::Config(format!(
                "stepsize dimension {} does not match state dimension {}",
                gamma.len(),
                self.x.len()
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
        Ok(())
    }

    fn remember_gamma(&mut self, gamma: &[f64]) {
        match &mut self.prev_gamma {
            Some(buf) => buf.copy_from_slice(gamma),
            None => self.prev_gamma = Some(gamma.to_vec()),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gradient_sample_rejects_non_finite() {
        assert!(GradientSample::new(vec![1.0, f64::NAN]).is_err());
        assert!(GradientSample::new(vec![f64::INFINITY]).is_err());
        assert!(GradientSample::new(vec![]).is_err());
        assert!(GradientSample::new(vec![0.0, -3.5]).is_ok());
    }

    #[test]
    fn gradient_sample_set_values_revalidates() {
        let mut g = GradientSample::new(vec![1.0, 2.0]).unwrap();
        assert!(g.set_values(&[3.0, 4.0]).is_ok());
        assert_eq!(g.values(), &[3.0, 4.0]);
        assert!(g.set_values(&[f64::NAN, 0.0]).is_err());
        assert!(g.set_values(&[1.0]).is_err());
    }

    #[test]
    fn ftrl_start_requires_positive_weight() {
        assert!(OptimizerState::ftrl_start(vec![0.0], 0.0).is_err());
        assert!(OptimizerState::ftrl_start(vec![0.0], -1.0).is_err());
        let s = OptimizerState::ftrl_start(vec![0.0], 2.0).unwrap();
        assert_eq!(s.weight_sum(), 2.0);
        assert_eq!(s.weight_sum_prev(), 0.0);
        assert_eq!(s.round(), 1);
    }

    #[test]
    fn state_rejects_bad_initial_point() {
        assert!(OptimizerState::new(vec![]).is_err());
        assert!(OptimizerState::new(vec![f64::INFINITY]).is_err());
    }
}
