//! Log-log convergence-rate estimation.
//!
//! Fitting `ln(objective - reference)` against `ln(epoch)` by least squares
//! turns a polynomial decay `t^{-p}` into a straight line of slope `-p`, so
//! the fitted slope is a one-number summary of the observed rate.

use crate::{Error, Result};

/// Fraction of the series (by epoch index) used in the fit by default.
pub const DEFAULT_WINDOW: f64 = 0.5;

/// Gaps smaller than this are clamped up to it before taking logs, so runs
/// that have converged to the reference value stay finite.
pub const GAP_CLAMP: f64 = 1e-15;

/// Gaps below this are treated as evidence that the reference value is not
/// actually a lower bound on the series.
const NEGATIVE_GAP_TOL: f64 = -1e-12;

/// Least-squares slope of `ln(series[t] - f_star)` vs `ln t` over the last
/// `window` fraction of epochs. `series[t]` is the objective after epoch
/// `t`; entry 0 (the initial point) never participates since `ln 0` is
/// undefined. Needs at least three usable points.
pub fn slope_fit(series: &[f64], f_star: f64, window: f64) -> Result<f64> {
    if !(window > 0.0 && window <= 1.0) || !window.is_finite() {
        return Err(Error::Config(format!(
            "fit window must be in (0, 1], got {window}"
        )));
    }
    if !f_star.is_finite() {
        return Err(Error::Config(format!(
            "reference value {f_star} is not finite"
        )));
    }
    if series.len() < 2 {
        return Err(Error::SlopeUndefined(
            "series has no post-initial epochs".into(),
        ));
    }
    let last = series.len() - 1;
    let first = (last as f64 * (1.0 - window)).floor() as usize + 1;

    let mut xs = Vec::with_capacity(last + 1 - first);
    let mut ys = Vec::with_capacity(last + 1 - first);
    for (t, &value) in series.iter().enumerate().take(last + 1).skip(first) {
        if !value.is_finite() {
            return Err(Error::SlopeUndefined(format!(
                "non-finite objective {value} at epoch {t}"
            )));
        }
        let gap = value - f_star;
        if gap < NEGATIVE_GAP_TOL {
            return Err(Error::SlopeUndefined(format!(
                "objective {value} at epoch {t} is below the reference {f_star}"
            )));
        }
        xs.push((t as f64).ln());
        ys.push(gap.max(GAP_CLAMP).ln());
    }
    if xs.len() < 3 {
        return Err(Error::SlopeUndefined(format!(
            "only {} epochs in the fit window, need 3",
            xs.len()
        )));
    }

    let n = xs.len() as f64;
    let x_mean = xs.iter().sum::<f64>() / n;
    let y_mean = ys.iter().sum::<f64>() / n;
    let (mut cov, mut var) = (0.0, 0.0);
    for (x, y) in xs.iter().zip(&ys) {
        cov += (x - x_mean) * (y - y_mean);
        var += (x - x_mean) * (x - x_mean);
    }
    Ok(cov / var)
}
