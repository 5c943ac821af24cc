//! Stepsize schedules for the FTRL-based momentum kernel.

use crate::error::{Error, Result};
use crate::optim::OptimizerState;

/// How the per-round stepsize is produced.
///
/// Adaptive kinds read the state's squared-gradient accumulators, which by
/// construction already include the gradient of the round being played, so
/// the very first emitted stepsize is finite even with a tiny `eps`.
#[derive(Debug, Clone, PartialEq)]
pub enum StepsizeSchedule {
    /// `c / t^exponent` at round `t`.
    Polynomial { c: f64, exponent: f64 },
    /// `c / (grad_bound * sqrt(horizon))`, constant, valid for rounds
    /// `1..=horizon` only.
    ConstantHorizon {
        c: f64,
        horizon: usize,
        grad_bound: f64,
    },
    /// `scale / sqrt(eps + sum of squared weighted gradient norms)`,
    /// the same value broadcast to every coordinate.
    AdaptiveGlobal { scale: f64, eps: f64 },
    /// Coordinate-wise `scale / sqrt(eps + per-coordinate squared sum)`.
    AdaptiveCoordinate { scale: f64, eps: f64 },
}

impl StepsizeSchedule {
    /// Emit the stepsize vector for the state's current round.
    ///
    /// For adaptive kinds the state's accumulators must already contain every
    /// gradient up to and including the current round.
    pub fn gamma(&self, state: &OptimizerState) -> Result<Vec<f64>> {
        let d = state.dim();
        match *self {
            StepsizeSchedule::Polynomial { c, exponent } => {
                check_positive("polynomial coefficient", c)?;
                if !(exponent.is_finite() && exponent >= 0.0) {
                    return Err(Error::Config(format!(
                        "polynomial exponent must be non-negative, got {exponent}"
                    )));
                }
                let v = c / (state.round() as f64).powf(exponent);
                Ok(vec![v; d])
            }
            StepsizeSchedule::ConstantHorizon {
                c,
                horizon,
                grad_bound,
            } => {
                check_positive("horizon coefficient", c)?;
                check_positive("gradient bound", grad_bound)?;
                if horizon == 0 {
                    return Err(Error::Config("horizon must be at least 1".into()));
                }
                if state.round() > horizon {
                    return Err(Error::HorizonExceeded {
                        step: state.round(),
                        horizon,
                    });
                }
                let v = c / (grad_bound * (horizon as f64).sqrt());
                Ok(vec![v; d])
            }
            StepsizeSchedule::AdaptiveGlobal { scale, eps } => {
                check_positive("adaptive scale", scale)?;
                check_eps(eps)?;
                let denom = (eps + state.grad_sq_total()).sqrt();
                if denom == 0.0 {
                    return Err(Error::Config(
                        "adaptive stepsize undefined: zero accumulator with eps = 0".into(),
                    ));
                }
                Ok(vec![scale / denom; d])
            }
            StepsizeSchedule::AdaptiveCoordinate { scale, eps } => {
                check_positive("adaptive scale", scale)?;
                check_eps(eps)?;
                state
                    .grad_sq_coord()
                    .iter()
                    .map(|&s| {
                        let denom = (eps + s).sqrt();
                        if denom == 0.0 {
                            Err(Error::Config(
                                "adaptive stepsize undefined: zero accumulator with eps = 0".into(),
                            ))
                        } else {
                            Ok(scale / denom)
                        }
                    })
                    .collect()
            }
        }
    }
}

fn check_positive(what: &str, v: f64) -> Result<()> {
    if v.is_finite() && v > 0.0 {
        Ok(())
    } else {
        Err(Error::Config(format!(
            "{what} must be positive and finite, got {v}"
        )))
    }
}

fn check_eps(eps: f64) -> Result<()> {
    if eps.is_finite() && eps >= 0.0 {
        Ok(())
    } else {
        Err(Error::Config(format!(
            "adaptive eps must be non-negative, got {eps}"
        )))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::optim::GradientSample;

    fn state_at_round(r: usize, d: usize) -> OptimizerState {
        // Advance the round counter without touching anything else.
        let mut s = OptimizerState::new(vec![0.0; d]).unwrap();
        let g = GradientSample::new(vec![1.0; d]).unwrap();
        for _ in 1..r {
            s.sgdm_step(&g, 0.0, 0.0).unwrap();
        }
        s
    }

    #[test]
    fn polynomial_at_round_four() {
        let s = state_at_round(4, 3);
        let sched = StepsizeSchedule::Polynomial {
            c: 1.0,
            exponent: 0.5,
        };
        assert_eq!(sched.gamma(&s).unwrap(), vec![0.5, 0.5, 0.5]);
    }

    #[test]
    fn adaptive_global_before_any_gradient() {
        let s = OptimizerState::ftrl_start(vec![0.0, 0.0], 1.0).unwrap();
        let sched = StepsizeSchedule::AdaptiveGlobal {
            scale: 1.0,
            eps: 1.0,
        };
        assert_eq!(sched.gamma(&s).unwrap(), vec![1.0, 1.0]);
    }

    #[test]
    fn adaptive_global_after_two_gradients() {
        // Unit weights; squared norms 3 then 1 give 1/sqrt(3+1) = 1/2.
        let mut s = OptimizerState::ftrl_start(vec![0.0], 1.0).unwrap();
        let g1 = GradientSample::new(vec![3f64.sqrt()]).unwrap();
        let g2 = GradientSample::new(vec![1.0]).unwrap();
        s.ftrl_step_with_gamma(&g1, 1.0, &[1.0]).unwrap();
        s.ftrl_step_with_gamma(&g2, 1.0, &[1.0]).unwrap();
        let sched = StepsizeSchedule::AdaptiveGlobal {
            scale: 1.0,
            eps: 0.0,
        };
        let g = sched.gamma(&s).unwrap();
        assert!((g[0] - 0.5).abs() < 1e-15);
    }

    #[test]
    fn adaptive_eps_zero_with_empty_accumulator_is_an_error() {
        let s = OptimizerState::ftrl_start(vec![0.0], 1.0).unwrap();
        let sched = StepsizeSchedule::AdaptiveGlobal {
            scale: 1.0,
            eps: 0.0,
        };
        assert!(sched.gamma(&s).is_err());
        let sched = StepsizeSchedule::AdaptiveCoordinate {
            scale: 1.0,
            eps: 0.0,
        };
        assert!(sched.gamma(&s).is_err());
    }

    #[test]
    fn negative_eps_is_an_error() {
        let s = OptimizerState::ftrl_start(vec![0.0], 1.0).unwrap();
        let sched = StepsizeSchedule::AdaptiveGlobal {
            scale: 1.0,
            eps: -1.0,
        };
        assert!(sched.gamma(&s).is_err());
    }

    #[test]
    fn constant_horizon_value_and_overrun() {
        let s = state_at_round(3, 2);
        let sched = StepsizeSchedule::ConstantHorizon {
            c: 2.0,
            horizon: 4,
            grad_bound: 1.0,
        };
        let g = sched.gamma(&s).unwrap();
        assert!((g[0] - 1.0).abs() < 1e-15); // 2 / sqrt(4)
        let s5 = state_at_round(5, 2);
        match sched.gamma(&s5) {
            Err(crate::Error::HorizonExceeded {
                step: 5,
                horizon: 4,
            }) => {}
            other => panic!("expected horizon error, got {other:?}"),
        }
    }

    #[test]
    fn polynomial_is_non_increasing_in_round() {
        let sched = StepsizeSchedule::Polynomial {
            c: 0.7,
            exponent: 0.5,
        };
        let mut last = f64::INFINITY;
        for r in 1..50 {
            let s = state_at_round(r, 1);
            let g = sched.gamma(&s).unwrap()[0];
            assert!(g <= last);
            last = g;
        }
    }
}
