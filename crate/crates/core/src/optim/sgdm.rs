//! Classic SGD with (exponential) momentum.

use crate::error::{Error, Result};
use crate::optim::{GradientSample, OptimizerState};

impl OptimizerState {
    /// One step of SGD with momentum:
    ///
    /// ```text
    /// m <- beta * m + (1 - beta) * g
    /// x <- x - eta * m
    /// ```
    ///
    /// `beta` may vary per call; `beta = 0` recovers plain SGD. When
    /// averaging is enabled the running average of produced iterates is
    /// updated as well.
    pub fn sgdm_step(&mut self, g: &GradientSample, eta: f64, beta: f64) -> Result<()> {
        self.check_dim(g)?;
        if !(beta.is_finite() && (0.0..=1.0).contains(&beta)) {
            return Err(Error::Config(format!(
                "momentum must lie in [0, 1], got {beta}"
            )));
        }
        if !(eta.is_finite() && eta >= 0.0) {
            return Err(Error::Config(format!(
                "stepsize must be non-negative, got {eta}"
            )));
        }
        for (m, &gj) in self.m.iter_mut().zip(g.values()) {
            *m = beta * *m + (1.0 - beta) * gj;
        }
        for (x, &m) in self.x.iter_mut().zip(&self.m) {
            *x -= eta * m;
        }
        if let Some(avg) = &mut self.avg {
            let t = self.t as f64;
            for (a, &x) in avg.iter_mut().zip(&self.x) {
                *a = ((t - 1.0) * *a + x) / t;
            }
        }
        self.t += 1;
        Ok(())
    }
}
