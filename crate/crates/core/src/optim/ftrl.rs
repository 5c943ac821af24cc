//! FTRL-based momentum: increasing momentum with shrinking updates.
//!
//! With round weights `alpha_1, alpha_2, ...` (sums `A_t = alpha_1 + ... +
//! alpha_t`) and a non-increasing stepsize sequence `gamma_t`, the round-`t`
//! update is
//!
//! ```text
//! beta_t = A_{t-1} / A_t                      (0 at t = 1)
//! m_t    = beta_t * m_{t-1} + (1 - beta_t) * g_t
//! eta_t  = (alpha_{t+1} * A_t / A_{t+1}) * gamma_t
//! x_{t+1} = (A_t / A_{t+1}) * x_t + (alpha_{t+1} / A_{t+1}) * x_1 - eta_t * m_t
//! ```
//!
//! The momentum coefficient rises towards 1 while the shrink factor pulls the
//! iterate towards a convex combination with the starting point; the same
//! iterates arise from running weighted FTRL and playing the running weighted
//! average of its predictions (see [`AnytimeFtrl`](crate::optim::AnytimeFtrl),
//! and the equivalence tests).

use crate::error::{Error, Result};
use crate::optim::{GradientSample, OptimizerState, StepsizeSchedule};

impl OptimizerState {
    /// One round of the FTRL-based momentum kernel with the stepsize emitted
    /// by `sched`. The incoming gradient is folded into the adaptive
    /// accumulators *before* the stepsize is emitted.
    ///
    /// `alpha_next` is the weight of the following round. Scalar and
    /// dimension errors leave the state unchanged.
    pub fn ftrl_step(
        &mut self,
        g: &GradientSample,
        alpha_next: f64,
        sched: &StepsizeSchedule,
    ) -> Result<()> {
        self.validate_ftrl_call(g, alpha_next)?;
        self.fold_gradient(g);
        let gamma = sched.gamma(self)?;
        self.apply_shrink_step(g, alpha_next, &gamma)
    }

    /// Same update with an explicitly supplied stepsize vector (one entry per
    /// coordinate). The sequence of supplied stepsizes must be positive and
    /// coordinate-wise non-increasing across calls.
    pub fn ftrl_step_with_gamma(
        &mut self,
        g: &GradientSample,
        alpha_next: f64,
        gamma: &[f64],
    ) -> Result<()> {
        self.validate_ftrl_call(g, alpha_next)?;
        self.check_gamma(gamma)?;
        self.fold_gradient(g);
        self.apply_shrink_step(g, alpha_next, gamma)
    }

    fn validate_ftrl_call(&self, g: &GradientSample, alpha_next: f64) -> Result<()> {
        self.check_dim(g)?;
        if self.weight_sum() <= 0.0 {
            return Err(Error::State(
                "FTRL kernel requires a state built with ftrl_start".into(),
            ));
        }
        if !(alpha_next.is_finite() && alpha_next > 0.0) {
            return Err(Error::Config(format!(
                "round weight must be positive, got {alpha_next}"
            )));
        }
        Ok(())
    }

    fn apply_shrink_step(
        &mut self,
        g: &GradientSample,
        alpha_next: f64,
        gamma: &[f64],
    ) -> Result<()> {
        self.check_gamma(gamma)?;
        let a_cur = self.sum_alpha; // A_t
        let a_next = a_cur + alpha_next; // A_{t+1}
        let beta = self.sum_alpha_prev / a_cur;
        for (m, &gj) in self.m.iter_mut().zip(g.values()) {
            *m = beta * *m + (1.0 - beta) * gj;
        }
        let shrink = a_cur / a_next;
        let pull = alpha_next / a_next;
        let eta_scale = alpha_next * a_cur / a_next;
        for (j, &gj) in gamma.iter().enumerate() {
            let eta = eta_scale * gj;
            self.x[j] = shrink * self.x[j] + pull * self.x1[j] - eta * self.m[j];
        }
        self.sum_alpha_prev = a_cur;
        self.sum_alpha = a_next;
        self.remember_gamma(gamma);
        self.t += 1;
        Ok(())
    }
}
