//! Closed-form guarantee calculators and numerical inequality audits.
//!
//! The bound functions return the right-hand sides of the convergence
//! guarantees for the weighted-averaging optimizer under each stepsize
//! regime; tests and the harness compare realized suboptimality gaps against
//! them. The `check_*` functions audit the scalar inequalities those
//! guarantees lean on. All functions here are pure.

use crate::error::{Error, Result};

/// Constants describing a run for the bound calculators.
///
/// `dist0` is `||x_1 - x*||`; `g`/`g_inf` bound subgradient ℓ2/ℓ∞ norms;
/// `l_smooth` is the smoothness constant; `sigma` the gradient noise level;
/// `c` the fixed-stepsize scale; `alpha_scale` the adaptive stepsize scale;
/// `eps` the adaptive regularizer; `t` the round count; `d` the dimension.
#[derive(Debug, Clone, PartialEq)]
pub struct BoundInputs {
    pub dist0: f64,
    pub g: f64,
    pub g_inf: f64,
    pub l_smooth: f64,
    pub sigma: f64,
    pub c: f64,
    pub alpha_scale: f64,
    pub eps: f64,
    pub t: usize,
    pub d: usize,
}

impl BoundInputs {
    fn check_base(&self) -> Result<()> {
        let fields = [
            ("dist0", self.dist0),
            ("g", self.g),
            ("g_inf", self.g_inf),
            ("l_smooth", self.l_smooth),
            ("sigma", self.sigma),
            ("c", self.c),
            ("alpha_scale", self.alpha_scale),
            ("eps", self.eps),
        ];
        for (name, v) in fields {
            if !(v.is_finite() && v >= 0.0) {
                return Err(Error::Config(format!(
                    "{name} must be finite and non-negative, got {v}"
                )));
            }
        }
        if self.t == 0 {
            return Err(Error::Config("round count must be at least 1".into()));
        }
        Ok(())
    }

    fn require_positive_eps(&self) -> Result<()> {
        if self.eps <= 0.0 {
            return Err(Error::Config(
                "this guarantee needs a strictly positive eps".into(),
            ));
        }
        Ok(())
    }

    /// `dist0^2 / alpha_scale + 2 * alpha_scale`, the comparator constant of
    /// the adaptive and smooth-regime guarantees.
    pub fn comparator_constant(&self) -> f64 {
        self.dist0 * self.dist0 / self.alpha_scale + 2.0 * self.alpha_scale
    }
}

/// Gap guarantee for the fixed schedule `gamma_t = c / (G sqrt(t))` after `t`
/// rounds: `dist0^2 G / (c sqrt(T)) + 2 c G / sqrt(T)`.
pub fn bound_fixed_step(inp: &BoundInputs) -> Result<f64> {
    inp.check_base()?;
    if inp.c <= 0.0 {
        return Err(Error::Config("stepsize constant must be positive".into()));
    }
    let sqrt_t = (inp.t as f64).sqrt();
    Ok(inp.dist0 * inp.dist0 * inp.g / (inp.c * sqrt_t) + 2.0 * inp.c * inp.g / sqrt_t)
}

/// Gap guarantee for the globally adaptive schedule, fed the realized
/// `sum_t ||g_t||^2`:
/// `(1/T) [ C sqrt(sum + eps) + alpha_scale G^2 / sqrt(eps) ]`.
pub fn bound_adaptive_global(inp: &BoundInputs, observed_sq_grad_sum: f64) -> Result<f64> {
    inp.check_base()?;
    inp.require_positive_eps()?;
    if !(observed_sq_grad_sum.is_finite() && observed_sq_grad_sum >= 0.0) {
        return Err(Error::Config(
            "gradient sum must be finite and non-negative".into(),
        ));
    }
    let c = inp.comparator_constant();
    Ok((c * (observed_sq_grad_sum + inp.eps).sqrt()
        + inp.alpha_scale * inp.g * inp.g / inp.eps.sqrt())
        / inp.t as f64)
}

/// Coordinate-wise analogue of [`bound_adaptive_global`], fed the realized
/// per-coordinate sums `sum_t g_{t,j}^2`:
/// `(1/T) [ C sum_j sqrt(s_j + eps) + alpha_scale d G_inf^2 / sqrt(eps) ]`.
pub fn bound_adaptive_coord(inp: &BoundInputs, per_coord_sums: &[f64]) -> Result<f64> {
    inp.check_base()?;
    inp.require_positive_eps()?;
    if per_coord_sums.len() != inp.d {
        return Err(Error::Config(format!(
            "expected {} per-coordinate sums, got {}",
            inp.d,
            per_coord_sums.len()
        )));
    }
    if per_coord_sums.iter().any(|s| !(s.is_finite() && *s >= 0.0)) {
        return Err(Error::Config(
            "coordinate sums must be finite and non-negative".into(),
        ));
    }
    let c = inp.comparator_constant();
    let root_sum: f64 = per_coord_sums.iter().map(|s| (s + inp.eps).sqrt()).sum();
    Ok(
        (c * root_sum + inp.alpha_scale * inp.d as f64 * inp.g_inf * inp.g_inf / inp.eps.sqrt())
            / inp.t as f64,
    )
}

/// Which smooth-regime guarantee to evaluate: with the gradient-noise tail
/// term, or without it (interpolating problems, where noise vanishes at the
/// optimum).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SmoothBoundVariant {
    Noisy,
    Interpolation,
}

/// Gap guarantee in the smooth regime with the coordinate-adaptive schedule:
///
/// ```text
/// C/T * ( sqrt(eps + 4 L^2 C^2 ln^2 T + 4 L C sqrt(eps) ln T
///              + 2 alpha_scale G^2 / sqrt(eps))
///         + alpha_scale G^2 / sqrt(eps) )
///   [ + sqrt(2) C sigma / sqrt(T)   for the noisy variant ]
/// ```
pub fn bound_smooth(inp: &BoundInputs, variant: SmoothBoundVariant) -> Result<f64> {
    inp.check_base()?;
    inp.require_positive_eps()?;
    let c = inp.comparator_constant();
    let t = inp.t as f64;
    let ln_t = t.ln();
    let l = inp.l_smooth;
    let noise_tail = inp.alpha_scale * inp.g * inp.g / inp.eps.sqrt();
    let inner = inp.eps
        + 4.0 * l * l * c * c * ln_t * ln_t
        + 4.0 * l * c * inp.eps.sqrt() * ln_t
        + 2.0 * noise_tail;
    let mut bound = c / t * (inner.sqrt() + noise_tail);
    if variant == SmoothBoundVariant::Noisy {
        bound += std::f64::consts::SQRT_2 * c * inp.sigma / t.sqrt();
    }
    Ok(bound)
}

/// Replay the weighted-lazy-projection learner `w_t = w_1 - gamma_{t-1} *
/// sum_{i<t} alpha_i g_i` on linear losses `l_t(w) = <alpha_t g_t, w>` and
/// return `(realized regret against u, guarantee)`, where the guarantee is
///
/// ```text
/// || (u - w_1) / sqrt(gamma_{T-1}) ||^2
///   + 1/2 sum_t <gamma_{t-1}, (alpha_t g_t)^2>
/// ```
///
/// with `gamma_0 := gamma_1`. Errors if shapes disagree, stepsizes are not
/// positive and non-increasing, or the realized regret exceeds the guarantee
/// by more than 1e-9.
pub fn ftrl_regret_gap(
    x1: &[f64],
    u: &[f64],
    alphas: &[f64],
    grads: &[Vec<f64>],
    gammas: &[Vec<f64>],
) -> Result<(f64, f64)> {
    let t_max = alphas.len();
    let d = x1.len();
    if t_max == 0 {
        return Err(Error::Config("need at least one round".into()));
    }
    if grads.len() != t_max || gammas.len() != t_max {
        return Err(Error::Config(format!(
            "{} weights but {} gradients and {} stepsizes",
            t_max,
            grads.len(),
            gammas.len()
        )));
    }
    if u.len() != d || grads.iter().any(|g| g.len() != d) || gammas.iter().any(|g| g.len() != d) {
        return Err(Error::Config("dimension mismatch".into()));
    }
    if alphas.iter().any(|a| !(a.is_finite() && *a > 0.0)) {
        return Err(Error::Config("weights must be positive".into()));
    }
    if gammas
        .iter()
        .flatten()
        .any(|g| !(g.is_finite() && *g > 0.0))
    {
        return Err(Error::Config("stepsizes must be positive".into()));
    }
    if gammas
        .windows(2)
        .any(|pair| pair[0].iter().zip(&pair[1]).any(|(prev, cur)| cur > prev))
    {
        return Err(Error::Config("stepsizes must be non-increasing".into()));
    }

    let mut grad_sum = vec![0.0; d]; // sum of alpha_i g_i over played rounds
    let mut w = x1.to_vec();
    let mut regret = 0.0;
    let mut bound_sum = 0.0;
    for t in 0..t_max {
        // gamma_{t-1}, with gamma_0 aliased to gamma_1.
        let gamma_prev = &gammas[t.saturating_sub(1)];
        for j in 0..d {
            let lg = alphas[t] * grads[t][j];
            regret += lg * (w[j] - u[j]);
            bound_sum += gamma_prev[j] * lg * lg;
            grad_sum[j] += lg;
        }
        if t + 1 < t_max {
            for j in 0..d {
                w[j] = x1[j] - gammas[t][j] * grad_sum[j];
            }
        }
    }
    let gamma_last = &gammas[t_max.saturating_sub(2)];
    let dist_term: f64 = (0..d)
        .map(|j| {
            let diff = u[j] - x1[j];
            diff * diff / gamma_last[j]
        })
        .sum();
    let bound = dist_term + 0.5 * bound_sum;
    if regret > bound + 1e-9 {
        return Err(Error::State(format!(
            "realized regret {regret} exceeded its guarantee {bound}"
        )));
    }
    Ok((regret, bound))
}

/// Conversion audit from online regret to the optimization gap of the
/// averaged point: checks `f_x - f_star <= regret / weight_sum + 1e-9`.
/// `f_star` must be known; `weight_sum` is `sum_t alpha_t`.
pub fn o2b_gap_audit(f_x: f64, f_star: Option<f64>, regret: f64, weight_sum: f64) -> Result<bool> {
    let Some(f_star) = f_star else {
        return Err(Error::Config(
            "gap audit needs the optimal value; none is known".into(),
        ));
    };
    if !(weight_sum.is_finite() && weight_sum > 0.0) {
        return Err(Error::Config(format!(
            "weight sum must be positive, got {weight_sum}"
        )));
    }
    Ok(f_x - f_star <= regret / weight_sum + 1e-9)
}

/// Tail-sum inequality behind the stepsize bookkeeping of the worst-case
/// construction: for `1 <= j <= t <= horizon` and `0 < alpha_exp <= 1/2`,
///
/// ```text
/// (1 / (horizon - j + 1)) * sum_{k=j+1}^{t} k^{-alpha_exp}
///     <= 2 / horizon^{alpha_exp}
/// ```
pub fn check_partial_poly_sum(j: usize, t: usize, horizon: usize, alpha_exp: f64) -> Result<bool> {
    if !(1 <= j && j <= t && t <= horizon) {
        return Err(Error::Config(format!(
            "need 1 <= j <= t <= horizon, got j={j}, t={t}, horizon={horizon}"
        )));
    }
    if !(alpha_exp.is_finite() && 0.0 < alpha_exp && alpha_exp <= 0.5) {
        return Err(Error::Config(format!(
            "exponent must lie in (0, 1/2], got {alpha_exp}"
        )));
    }
    let lhs: f64 = ((j + 1)..=t)
        .map(|k| (k as f64).powf(-alpha_exp))
        .sum::<f64>()
        / (horizon - j + 1) as f64;
    Ok(lhs <= 2.0 / (horizon as f64).powf(alpha_exp))
}

/// Exhaustive sweep of [`check_partial_poly_sum`] over every admissible
/// `(j, t, horizon)` with `horizon <= max_horizon`, for each exponent.
/// Shares prefix sums of `k^{-alpha}` across the sweep, so the triple loop
/// is O(max_horizon^3) cheap comparisons per exponent.
pub fn check_partial_poly_sum_grid(max_horizon: usize, alpha_exps: &[f64]) -> Result<bool> {
    if max_horizon == 0 {
        return Err(Error::Config("need a positive horizon".into()));
    }
    for &alpha_exp in alpha_exps {
        if !(alpha_exp.is_finite() && 0.0 < alpha_exp && alpha_exp <= 0.5) {
            return Err(Error::Config(format!(
                "exponent must lie in (0, 1/2], got {alpha_exp}"
            )));
        }
        // prefix[k] = sum_{i=1}^{k} i^{-alpha}
        let mut prefix = vec![0.0; max_horizon + 1];
        for k in 1..=max_horizon {
            prefix[k] = prefix[k - 1] + (k as f64).powf(-alpha_exp);
        }
        for horizon in 1..=max_horizon {
            let rhs = 2.0 / (horizon as f64).powf(alpha_exp);
            for j in 1..=horizon {
                let denom = (horizon - j + 1) as f64;
                for t in j..=horizon {
                    if prefix[t] - prefix[j] > rhs * denom {
                        return Ok(false);
                    }
                }
            }
        }
    }
    Ok(true)
}

/// Self-bounding property of smooth non-negative-curvature objectives:
/// `||grad f(x)||^2 <= 2 m (f(x) - inf f)` at each supplied point, for `f`
/// returning `(value, gradient)`.
pub fn check_smooth_grad_norm<F>(f: F, m: f64, inf_value: f64, points: &[Vec<f64>]) -> bool
where
    F: Fn(&[f64]) -> (f64, Vec<f64>),
{
    points.iter().all(|x| {
        let (value, grad) = f(x);
        let grad_sq: f64 = grad.iter().map(|g| g * g).sum();
        let rhs = 2.0 * m * (value - inf_value);
        grad_sq <= rhs * (1.0 + 1e-12) + 1e-12
    })
}

/// Integral comparison for weighted sums of a non-increasing non-negative
/// `f`: with partial sums `s_i = a0 + a_1 + ... + a_i` and every `a_i` in
/// `[0, cap]`,
///
/// ```text
/// sum_i a_i f(s_{i-1}) <= integral(a0, s_m) + cap * f(a0)
/// ```
///
/// `integral(lo, hi)` must evaluate the exact integral of `f`.
pub fn check_weighted_sum_integral<F, I>(
    a0: f64,
    seq: &[f64],
    cap: f64,
    f: F,
    integral: I,
) -> Result<bool>
where
    F: Fn(f64) -> f64,
    I: Fn(f64, f64) -> f64,
{
    if !(a0.is_finite() && a0 > 0.0) {
        return Err(Error::Config(format!("a0 must be positive, got {a0}")));
    }
    if !(cap.is_finite() && cap >= 0.0) {
        return Err(Error::Config(format!(
            "cap must be non-negative, got {cap}"
        )));
    }
    if seq
        .iter()
        .any(|a| !(a.is_finite() && (0.0..=cap).contains(a)))
    {
        return Err(Error::Config(
            "sequence entries must lie in [0, cap]".into(),
        ));
    }
    let mut running = a0;
    let mut lhs = 0.0;
    for &a in seq {
        lhs += a * f(running);
        running += a;
    }
    Ok(lhs <= integral(a0, running) + cap * f(a0) + 1e-12)
}

/// [`check_weighted_sum_integral`] specialized to `f(u) = 1/sqrt(u)`, whose
/// integral is `2 (sqrt(hi) - sqrt(lo))`.
pub fn check_weighted_sum_integral_rsqrt(a0: f64, seq: &[f64], cap: f64) -> Result<bool> {
    check_weighted_sum_integral(
        a0,
        seq,
        cap,
        |u| 1.0 / u.sqrt(),
        |lo, hi| 2.0 * (hi.sqrt() - lo.sqrt()),
    )
}
