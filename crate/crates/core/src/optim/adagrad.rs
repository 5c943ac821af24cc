//! Diagonal AdaGrad baseline.

use crate::error::{Error, Result};
use crate::optim::{GradientSample, OptimizerState};

impl OptimizerState {
    /// One AdaGrad step:
    ///
    /// ```text
    /// s_j <- s_j + g_j^2
    /// x_j <- x_j - scale * g_j / sqrt(eps + s_j)
    /// ```
    ///
    /// The accumulator includes the incoming gradient. A coordinate whose
    /// denominator is exactly zero (possible only with `eps = 0` and a
    /// never-touched coordinate) is left unchanged.
    pub fn adagrad_step(&mut self, g: &GradientSample, scale: f64, eps: f64) -> Result<()> {
        self.check_dim(g)?;
        if !(scale.is_finite() && scale > 0.0) {
            return Err(Error::Config(format!(
                "scale must be positive, got {scale}"
            )));
        }
        if !(eps.is_finite() && eps >= 0.0) {
            return Err(Error::Config(format!(
                "eps must be non-negative, got {eps}"
            )));
        }
        let mut nsq = 0.0;
        for j in 0..self.x.len() {
            let gj = g.values()[j];
            let sq = gj * gj;
            self.accum_sq[j] += sq;
            nsq += sq;
            let denom = (eps + self.accum_sq[j]).sqrt();
            if denom > 0.0 {
                self.x[j] -= scale * gj / denom;
            }
        }
        self.accum_sq_norm += nsq;
        self.t += 1;
        Ok(())
    }
}
