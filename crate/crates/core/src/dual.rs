//! Lower bounds on `c(n, lambda)` from explicit measures `Q` built interval
//! by interval out of the penalty kernels.
//!
//! On `[kT/n, (k+1)T/n)` a feedback rule picks the normalized variance
//! `y_k = u_k / sigma^2` from the grid observations. With `W` a `Q`-Brownian
//! motion the Girsanov kernel is
//!
//! ```text
//! psi_t = clamp_A( int_{kT/n}^t theta(u_k, s - kT/n) dW_s ) - mu / sigma
//! ```
//!
//! and the grid increments are `sigma (dW + int clamp_A(.) ds)`, so the drift
//! `mu` cancels. The objective `E_Q[f^n - (1/(2 lambda)) int psi^2]` is a
//! lower bound whenever `Q` keeps `E_Q[|dX|^3 | past] <= h(n)`.

use crate::error::{invalid, Result};
use crate::kernels::{kernel_integrand, Branch, KernelParams, KernelRule};
use crate::mc::{estimate_many, simulate_paths, Estimate, McConfig, RngStreamSpec};
use crate::model::{FrictionSchedule, GridSpec, ModelParams, PayoffSpec, GAUSSIAN_ABS_THIRD_MOMENT};
use crate::policy::{ClippedPolicy, PolicyInput};

/// Clamp saturation share above which a warning is attached.
pub const SATURATION_WARNING: f64 = 0.2;

/// Normalization bound `K` of the policy range `[1/K, K]`.
pub const DEFAULT_POLICY_K: f64 = 25.0;

/// `beta(u) = (u / sigma^2) / |u / sigma^2 - 1|`.
pub fn beta_of(u: f64, sigma: f64) -> f64 {
    let r = u / (sigma * sigma);
    r / (r - 1.0).abs()
}

/// Kernel integrand `theta(u, t)` at time `t` into an interval of length `T/n`.
pub fn theta_u_t(u: f64, t: f64, interval: f64, sigma: f64) -> f64 {
    let r = u / (sigma * sigma);
    if r == 1.0 {
        return 0.0;
    }
    let beta = r / (r - 1.0).abs();
    let branch = if r > 1.0 { Branch::Upper } else { Branch::Lower };
    kernel_integrand(beta, branch, interval, interval - t)
}

/// Largest normalized variance whose Gaussian increment satisfies
/// `E|dX|^3 <= h(n)`.
pub fn third_moment_variance_cap(model: &ModelParams, n: usize, friction: &FrictionSchedule) -> f64 {
    let dt = model.horizon / n as f64;
    let s3 = (model.sigma * model.sigma * dt).powf(1.5);
    (friction.price(n) / (GAUSSIAN_ABS_THIRD_MOMENT * s3)).powf(2.0 / 3.0)
}

/// Smallest real `n` with `2 sqrt(2/pi) (sigma^2 T / n)^{3/2} <= c_h n^{-5/4}`.
pub fn third_moment_threshold(model: &ModelParams, friction: &FrictionSchedule) -> f64 {
    // n^{1/4} >= 2 sqrt(2/pi) sigma^3 T^{3/2} / c_h
    (GAUSSIAN_ABS_THIRD_MOMENT * model.sigma.powi(3) * model.horizon.powf(1.5) / friction.c_h).powi(4)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DualKernelSpec {
    /// Clamp level `A` on the inner integral; `None` picks the default.
    pub clamp: Option<f64>,
    pub substeps: usize,
    pub rule: KernelRule,
}

impl Default for DualKernelSpec {
    fn default() -> Self {
        Self {
            clamp: None,
            substeps: 64,
            rule: KernelRule::Midpoint,
        }
    }
}

impl DualKernelSpec {
    pub fn validate(&self) -> Result<()> {
        if let Some(a) = self.clamp {
            if !(a > 0.0) {
                return Err(invalid("clamp", format!("A must be positive, got {a}")));
            }
        }
        if self.substeps == 0 {
            return Err(invalid("substeps", "need at least one substep"));
        }
        Ok(())
    }

    /// `A`, defaulting to `10 max|theta| sqrt(T/n) 3` over the policy range.
    pub fn clamp_level(&self, model: &ModelParams, n: usize, y_lo: f64, y_hi: f64) -> f64 {
        if let Some(a) = self.clamp {
            return a;
        }
        let dt = model.horizon / n as f64;
        let s2 = model.sigma * model.sigma;
        let peak = [y_lo, y_hi]
            .iter()
            .map(|y| {
                let u = y * s2;
                theta_u_t(u, 0.0, dt, model.sigma)
                    .abs()
                    .max(theta_u_t(u, dt, dt, model.sigma).abs())
            })
            .fold(0.0, f64::max);
        let a = 10.0 * peak * dt.sqrt() * 3.0;
        if a > 0.0 {
            a
        } else {
            f64::INFINITY
        }
    }
}

/// Policy restricted to `[1/K, K]` and to the third-moment-feasible range for `n`.
pub fn feasible_policy(
    spec: crate::policy::VolPolicySpec,
    k: f64,
    model: &ModelParams,
    n: usize,
    friction: &FrictionSchedule,
) -> Result<ClippedPolicy> {
    let base = ClippedPolicy::normalized(spec, k)?;
    let cap = third_moment_variance_cap(model, n, friction);
    let y_hi = base.y_hi.min(cap).max(base.y_lo);
    ClippedPolicy::new(base.spec, base.y_lo, y_hi)
}

/// One simulated path under `Q`.
#[derive(Debug, Clone, PartialEq)]
pub struct DualPath {
    /// `X` at the `n + 1` grid times.
    pub grid_values: Vec<f64>,
    /// Normalized variance used on each interval.
    pub variances: Vec<f64>,
    /// `psi` at every substep knot (empty unless recorded).
    pub psi: Vec<f64>,
    /// `int_0^T psi^2 dt`.
    pub penalty_integral: f64,
    pub saturated_substeps: usize,
    pub total_substeps: usize,
}

fn simulate(
    model: &ModelParams,
    n: usize,
    policy: &ClippedPolicy,
    spec: &DualKernelSpec,
    clamp: f64,
    stream: &RngStreamSpec,
    record: bool,
) -> DualPath {
    let dt = model.horizon / n as f64;
    let drift = model.mu / model.sigma;
    let mut z = stream.normals();
    let mut grid_values = Vec::with_capacity(n + 1);
    let mut variances = Vec::with_capacity(n);
    let mut psi_path = Vec::new();
    let mut x = model.x0;
    grid_values.push(x);
    let mut running = 0.0;
    let mut penalty_integral = 0.0;
    let mut saturated = 0usize;
    let mut total = 0usize;
    for k in 0..n {
        let t0 = k as f64 * dt;
        let y = policy.eval(&PolicyInput {
            t: t0,
            x,
            running_integral: running,
            horizon: model.horizon,
        });
        variances.push(y);
        let r = y;
        let kernel = if r == 1.0 {
            None
        } else {
            let beta = r / (r - 1.0).abs();
            let branch = if r > 1.0 { Branch::Upper } else { Branch::Lower };
            Some(KernelParams {
                beta,
                branch,
                t1: 0.0,
                t2: dt,
            })
        };
        let knots = match &kernel {
            Some(p) => p.substep_grid(spec.substeps).knots,
            None => crate::kernels::SubstepGrid::uniform(0.0, dt, spec.substeps).knots,
        };
        let (mut inner, mut w, mut int_clamped) = (0.0f64, 0.0, 0.0);
        let mut left = 0.0f64;
        if record {
            psi_path.push(left - drift);
        }
        for s in knots.windows(2) {
            let ds = s[1] - s[0];
            let dw = z.increment(ds);
            if let Some(p) = &kernel {
                inner += p.integrand(spec.rule.eval_point(s[0], s[1])) * dw;
            }
            let right = inner.clamp(-clamp, clamp);
            if inner.abs() > clamp {
                saturated += 1;
            }
            total += 1;
            w += dw;
            int_clamped += spec.rule.time_weight(left, right, ds);
            let (pl, pr) = (left - drift, right - drift);
            penalty_integral += spec.rule.time_weight(pl * pl, pr * pr, ds);
            if record {
                psi_path.push(pr);
            }
            left = right;
        }
        let x1 = x + model.sigma * (w + int_clamped);
        running += 0.5 * (x + x1) * dt;
        x = x1;
        grid_values.push(x);
    }
    DualPath {
        grid_values,
        variances,
        psi: psi_path,
        penalty_integral,
        saturated_substeps: saturated,
        total_substeps: total,
    }
}

/// Simulates one path of the grid values under `Q` with the kernel path recorded.
pub fn simulate_dual_path(
    model: &ModelParams,
    n: usize,
    policy: &ClippedPolicy,
    spec: &DualKernelSpec,
    stream: &RngStreamSpec,
) -> Result<DualPath> {
    model.validate()?;
    spec.validate()?;
    GridSpec::new(n)?;
    let clamp = spec.clamp_level(model, n, policy.y_lo, policy.y_hi);
    Ok(simulate(model, n, policy, spec, clamp, stream, true))
}

#[derive(Debug, Clone, PartialEq)]
pub struct DualDiagnostics {
    pub clamp: f64,
    pub saturation_fraction: f64,
    pub policy_id: String,
    pub y_lo: f64,
    pub y_hi: f64,
    pub warnings: Vec<String>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DualEstimate {
    pub value: Estimate,
    pub payoff_term: Estimate,
    pub penalty_term: Estimate,
    pub diagnostics: DualDiagnostics,
}

/// Monte Carlo value of `E_Q[f^n - (1/(2 lambda)) int psi^2]`.
pub fn dual_objective(
    model: &ModelParams,
    n: usize,
    lambda: f64,
    payoff: &PayoffSpec,
    policy: &ClippedPolicy,
    spec: &DualKernelSpec,
    mc: &McConfig,
) -> Result<DualEstimate> {
    model.validate()?;
    payoff.validate()?;
    spec.validate()?;
    GridSpec::new(n)?;
    if !(lambda > 0.0 && lambda.is_finite()) {
        return Err(invalid("lambda", format!("must be positive, got {lambda}")));
    }
    let clamp = spec.clamp_level(model, n, policy.y_lo, policy.y_hi);
    let scale = 1.0 / (2.0 * lambda);
    let [value, payoff_term, penalty_term, saturation] =
        estimate_many(["dual_value", "payoff_term", "penalty_term", "saturation"], mc, |s| {
            let path = simulate(model, n, policy, spec, clamp, s, false);
            let f = payoff.on_grid(&path.grid_values);
            let pen = scale * path.penalty_integral;
            [
                f - pen,
                f,
                pen,
                path.saturated_substeps as f64 / path.total_substeps as f64,
            ]
        })?;
    let mut value = value;
    value.mean = payoff_term.mean - penalty_term.mean;
    let mut warnings = Vec::new();
    if saturation.mean > SATURATION_WARNING {
        warnings.push(format!(
            "clamp A = {clamp:.4} saturates on {:.1}% of substeps",
            100.0 * saturation.mean
        ));
    }
    Ok(DualEstimate {
        value,
        payoff_term,
        penalty_term,
        diagnostics: DualDiagnostics {
            clamp,
            saturation_fraction: saturation.mean,
            policy_id: policy.spec.id(),
            y_lo: policy.y_lo,
            y_hi: policy.y_hi,
            warnings,
        },
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct IntervalStats {
    pub k: usize,
    pub mean: f64,
    pub mean_stderr: f64,
    pub third_moment: f64,
    pub third_moment_stderr: f64,
    /// OLS slope of `dX_k` on `X_k - X0` (zero on the first interval).
    pub slope: f64,
    pub slope_stderr: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct MartingaleReport {
    pub n: usize,
    pub h: f64,
    pub intervals: Vec<IntervalStats>,
    /// Largest `|mean| / stderr` over intervals.
    pub worst_mean_z: f64,
    /// Largest `|slope| / stderr` over intervals.
    pub worst_slope_z: f64,
    /// Largest `E|dX|^3 / h(n)` over intervals.
    pub worst_third_ratio: f64,
    /// Every interval satisfies `E|dX|^3 <= h(n) + 3 stderr`.
    pub third_moment_ok: bool,
}

fn mean_se(v: &[f64]) -> (f64, f64) {
    let e = Estimate::from_samples("", v);
    (e.mean, e.stderr)
}

/// Per-interval martingale and third-moment statistics of the grid increments under `Q`.
pub fn martingale_diagnostics(
    model: &ModelParams,
    n: usize,
    policy: &ClippedPolicy,
    spec: &DualKernelSpec,
    friction: &FrictionSchedule,
    mc: &McConfig,
) -> Result<MartingaleReport> {
    model.validate()?;
    spec.validate()?;
    GridSpec::new(n)?;
    let clamp = spec.clamp_level(model, n, policy.y_lo, policy.y_hi);
    let paths = simulate_paths(mc, |s| simulate(model, n, policy, spec, clamp, s, false).grid_values)?;
    let h = friction.price(n);
    let mut intervals = Vec::with_capacity(n);
    for k in 0..n {
        let dx: Vec<f64> = paths.iter().map(|p| p[k + 1] - p[k]).collect();
        let third: Vec<f64> = dx.iter().map(|d| d.abs().powi(3)).collect();
        let (mean, mean_stderr) = mean_se(&dx);
        let (third_moment, third_moment_stderr) = mean_se(&third);
        let (slope, slope_stderr) = if k == 0 {
            (0.0, 0.0)
        } else {
            let xs: Vec<f64> = paths.iter().map(|p| p[k] - model.x0).collect();
            ols_slope(&xs, &dx)
        };
        intervals.push(IntervalStats {
            k,
            mean,
            mean_stderr,
            third_moment,
            third_moment_stderr,
            slope,
            slope_stderr,
        });
    }
    let z = |a: f64, s: f64| if s > 0.0 { a.abs() / s } else if a == 0.0 { 0.0 } else { f64::INFINITY };
    let worst_mean_z = intervals.iter().map(|s| z(s.mean, s.mean_stderr)).fold(0.0, f64::max);
    let worst_slope_z = intervals.iter().map(|s| z(s.slope, s.slope_stderr)).fold(0.0, f64::max);
    let worst_third_ratio = intervals.iter().map(|s| s.third_moment / h).fold(0.0, f64::max);
    let third_moment_ok = intervals
        .iter()
        .all(|s| s.third_moment <= h + 3.0 * s.third_moment_stderr);
    Ok(MartingaleReport {
        n,
        h,
        intervals,
        worst_mean_z,
        worst_slope_z,
        worst_third_ratio,
        third_moment_ok,
    })
}

fn ols_slope(x: &[f64], y: &[f64]) -> (f64, f64) {
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let sxx: f64 = x.iter().map(|v| (v - mx) * (v - mx)).sum();
    if sxx == 0.0 || n < 3.0 {
        return (0.0, 0.0);
    }
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let slope = sxy / sxx;
    let icpt = my - slope * mx;
    let rss: f64 = x.iter().zip(y).map(|(a, b)| (b - icpt - slope * a).powi(2)).sum();
    (slope, (rss / (n - 2.0) / sxx).sqrt())
}

/// Third-moment feasibility for each `n`; also returns the smallest `n` from
/// which every larger tested `n` passes.
pub fn third_moment_scan(
    model: &ModelParams,
    ns: &[usize],
    policy: &ClippedPolicy,
    spec: &DualKernelSpec,
    friction: &FrictionSchedule,
    mc: &McConfig,
) -> Result<(Vec<MartingaleReport>, Option<usize>)> {
    let reports = ns
        .iter()
        .map(|&n| martingale_diagnostics(model, n, policy, spec, friction, mc))
        .collect::<Result<Vec<_>>>()?;
    let mut smallest = None;
    for r in reports.iter().rev() {
        if r.third_moment_ok {
            smallest = Some(r.n);
        } else {
            break;
        }
    }
    Ok((reports, smallest))
}
