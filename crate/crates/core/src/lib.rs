//! Convex stochastic optimization with momentum.
//!
//! The crate has four parts:
//!
//! * [`optim`] — first-order update kernels: classic SGD with momentum, an
//!   FTRL-based momentum method whose momentum grows towards 1 while its
//!   update magnitude shrinks, the equivalent weighted-averaging form of the
//!   same method, and diagonal AdaGrad. Stepsize schedules (polynomial,
//!   fixed-horizon, adaptive global/coordinate-wise) live here too.
//! * [`lower_bound`] — a piecewise-linear worst-case construction on which the
//!   last iterate of constant-momentum SGD provably stalls with an extra
//!   logarithmic factor, plus a verifier that replays the optimizer against
//!   the closed-form trajectory and measures the realized gap.
//! * [`problems`] — hinge / squared-hinge / absolute-deviation losses over
//!   sparse rows, a margin-separable synthetic generator, a LIBSVM-format
//!   parser, and a seeded per-sample subgradient oracle.
//! * [`analysis`] — closed-form convergence-bound calculators and numerical
//!   auditors (realized FTRL regret vs. its guarantee, iterate-averaging gap
//!   audit, and checks of the scalar inequalities the guarantees rely on).
//!
//! Everything is plain `f64` and deterministic given a seed; states own their
//! buffers and are `Send`.

pub mod analysis;
pub mod error;
pub mod lower_bound;
pub mod optim;
pub mod problems;

pub use error::{Error, Result};

pub(crate) mod util {
    /// Dot product; callers guarantee equal lengths.
    #[cfg_attr(not(test), allow(dead_code))]
    pub fn dot(a: &[f64], b: &[f64]) -> f64 {
        debug_assert_eq!(a.len(), b.len());
        a.iter().zip(b).map(|(x, y)| x * y).sum()
    }

    #[cfg_attr(not(test), allow(dead_code))]
    pub fn norm_sq(a: &[f64]) -> f64 {
        a.iter().map(|x| x * x).sum()
    }

    /// Largest relative coordinate deviation between two equal-length vectors.
    /// Exact zeros on both sides contribute 0.
    pub fn max_rel_dev(a: &[f64], b: &[f64]) -> f64 {
        debug_assert_eq!(a.len(), b.len());
        a.iter()
            .zip(b)
            .map(|(x, y)| {
                let scale = x.abs().max(y.abs());
                if scale == 0.0 {
                    0.0
                } else {
                    (x - y).abs() / scale
                }
            })
            .fold(0.0, f64::max)
    }
}
