//! Limit problem: `sup_nu E[f(X^nu) - (1/(2 l T)) int g(nu_t / sigma^2) dt]`
//! with `X^nu = X0 + int sqrt(nu) dW`.
//!
//! Terminal claims are solved through `v_t + H(v_xx) = 0`, `v(T, .) = f`, with
//! the Hamiltonian of [`crate::kernels::hamiltonian`]. Path-dependent claims
//! get lower bounds from simulated feedback policies.

use statrs::function::erf::erfc;

use crate::error::{invalid, Error, Result};
use crate::interp::UniformAxis;
use crate::kernels::{hamiltonian, penalty, HamiltonianConfig};
use crate::mc::{estimate, Estimate, McConfig};
use crate::model::{ModelParams, PayoffSpec};
use crate::policy::{BandState, PolicyInput, PolicySurface, VolPolicySpec};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum HjbScheme {
    Explicit,
    /// Implicit Euler in time, Howard policy iteration per step.
    ImplicitPolicyIteration,
}

impl HjbScheme {
    pub fn name(&self) -> &'static str {
        match self {
            HjbScheme::Explicit => "explicit",
            HjbScheme::ImplicitPolicyIteration => "implicit",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HjbConfig {
    pub x_min: f64,
    pub x_max: f64,
    pub n_x: usize,
    pub n_t: usize,
    pub scheme: HjbScheme,
    pub y_min: f64,
    pub y_max: f64,
    pub max_sweeps: usize,
}

impl HjbConfig {
    pub const DEFAULT_N_X: usize = 801;
    pub const DEFAULT_N_T: usize = 400;

    /// `X0 +- 6 sigma sqrt(T y_max)` with the default resolution.
    pub fn for_model(model: &ModelParams, y_max: f64) -> Self {
        let half = 6.0 * model.sigma * (model.horizon * y_max).sqrt();
        Self {
            x_min: model.x0 - half,
            x_max: model.x0 + half,
            n_x: Self::DEFAULT_N_X,
            n_t: Self::DEFAULT_N_T,
            scheme: HjbScheme::ImplicitPolicyIteration,
            y_min: HamiltonianConfig::DEFAULT_Y_MIN,
            y_max,
            max_sweeps: 200,
        }
    }

    pub fn with_resolution(self, n_x: usize, n_t: usize) -> Self {
        Self { n_x, n_t, ..self }
    }

    pub fn dx(&self) -> f64 {
        (self.x_max - self.x_min) / (self.n_x - 1) as f64
    }

    pub fn validate(&self, model: &ModelParams) -> Result<()> {
        if self.n_x < 5 || self.n_t < 1 {
            return Err(invalid("n_x", "need n_x >= 5 and n_t >= 1"));
        }
        if !(self.y_min > 0.0 && self.y_min <= 1.0 && self.y_max >= 1.0 && self.y_max.is_finite()) {
            return Err(invalid(
                "y_max",
                format!("need 0 < y_min <= 1 <= y_max, got [{}, {}]", self.y_min, self.y_max),
            ));
        }
        let need = 6.0 * model.sigma * (model.horizon * self.y_max).sqrt();
        let tol = 1e-9 * need;
        if self.x_min > model.x0 - need + tol || self.x_max < model.x0 + need - tol {
            return Err(invalid(
                "x_range",
                format!(
                    "[{}, {}] must cover X0 +- 6 sigma sqrt(T y_max) = [{}, {}]",
                    self.x_min,
                    self.x_max,
                    model.x0 - need,
                    model.x0 + need
                ),
            ));
        }
        if self.max_sweeps == 0 {
            return Err(invalid("max_sweeps", "must be positive"));
        }
        Ok(())
    }

    /// Largest stable time step of the explicit scheme.
    pub fn explicit_dt_limit(&self, model: &ModelParams) -> f64 {
        let dx = self.dx();
        dx * dx / (model.sigma * model.sigma * self.y_max)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct LimitPriceResult {
    pub pi_value: f64,
    pub ell: f64,
    pub times: UniformAxis,
    pub xs: UniformAxis,
    /// `v(t_j, x_i)`, row-major in time.
    pub values: Vec<f64>,
    /// Maximizing normalized variance `y*(t_j, x_i)`; the last row repeats the one before.
    pub policy: Vec<f64>,
    /// Per time step: largest policy-iteration update (zero for the explicit scheme).
    pub residuals: Vec<f64>,
    pub sweeps: Vec<usize>,
    pub scheme: HjbScheme,
}

impl LimitPriceResult {
    pub fn max_residual(&self) -> f64 {
        self.residuals.iter().copied().fold(0.0, f64::max)
    }

    pub fn value_row(&self, j: usize) -> &[f64] {
        &self.values[j * self.xs.len..(j + 1) * self.xs.len]
    }

    pub fn policy_row(&self, j: usize) -> &[f64] {
        &self.policy[j * self.xs.len..(j + 1) * self.xs.len]
    }

    pub fn policy_surface(&self) -> Result<PolicySurface> {
        PolicySurface::new(self.times, self.xs, self.policy.clone())
    }
}

/// Second differences with Neumann data `slope_lo`, `slope_hi` through ghost nodes.
fn second_difference(v: &[f64], dx: f64, slope_lo: f64, slope_hi: f64, out: &mut [f64]) {
    let n = v.len();
    let inv = 1.0 / (dx * dx);
    out[0] = 2.0 * (v[1] - v[0] - dx * slope_lo) * inv;
    for i in 1..n - 1 {
        out[i] = (v[i + 1] - 2.0 * v[i] + v[i - 1]) * inv;
    }
    out[n - 1] = 2.0 * (v[n - 2] - v[n - 1] + dx * slope_hi) * inv;
}

/// Solves `(I - dt a_i D2) v = rhs` with the same ghost-node boundary rows.
fn implicit_solve(a: &[f64], dt: f64, dx: f64, rhs: &[f64], slope_lo: f64, slope_hi: f64, out: &mut [f64]) {
    let n = rhs.len();
    let r = dt / (dx * dx);
    let mut sub = vec![0.0; n];
    let mut diag = vec![0.0; n];
    let mut sup = vec![0.0; n];
    let mut b = rhs.to_vec();
    for i in 0..n {
        let k = a[i] * r;
        diag[i] = 1.0 + 2.0 * k;
        if i == 0 {
            sup[i] = -2.0 * k;
            b[i] -= 2.0 * k * dx * slope_lo;
        } else if i == n - 1 {
            sub[i] = -2.0 * k;
            b[i] += 2.0 * k * dx * slope_hi;
        } else {
            sub[i] = -k;
            sup[i] = -k;
        }
    }
    for i in 1..n {
        let m = sub[i] / diag[i - 1];
        diag[i] -= m * sup[i - 1];
        b[i] -= m * b[i - 1];
    }
    out[n - 1] = b[n - 1] / diag[n - 1];
    for i in (0..n - 1).rev() {
        out[i] = (b[i] - sup[i] * out[i + 1]) / diag[i];
    }
}

/// Value `pi(l)` of the limit problem for a terminal claim.
pub fn hjb_solve(model: &ModelParams, ell: f64, payoff: &PayoffSpec, cfg: &HjbConfig) -> Result<LimitPriceResult> {
    model.validate()?;
    payoff.validate()?;
    cfg.validate(model)?;
    if !payoff.is_terminal() {
        return Err(Error::UnsupportedPayoff(payoff.name().into()));
    }
    let ham = HamiltonianConfig::new(ell, model.sigma, model.horizon).with_bounds(cfg.y_min, cfg.y_max);
    ham.validate()?;
    let dt = model.horizon / cfg.n_t as f64;
    if cfg.scheme == HjbScheme::Explicit {
        let limit = cfg.explicit_dt_limit(model);
        if dt > limit {
            return Err(Error::Unstable { dt, limit });
        }
    }
    let xs = UniformAxis::new(cfg.x_min, cfg.x_max, cfg.n_x);
    let times = UniformAxis::new(0.0, model.horizon, cfg.n_t + 1);
    let dx = xs.step();
    let nx = cfg.n_x;
    let (slope_lo, slope_hi) = (payoff.terminal_slopes(cfg.x_min).0, payoff.terminal_slopes(cfg.x_max).1);
    let s2 = model.sigma * model.sigma;
    let pen = 1.0 / (2.0 * ell * model.horizon);

    let mut values = vec![0.0; (cfg.n_t + 1) * nx];
    let mut policy = vec![1.0; (cfg.n_t + 1) * nx];
    let mut residuals = Vec::with_capacity(cfg.n_t);
    let mut sweeps = Vec::with_capacity(cfg.n_t);
    let terminal: Vec<f64> = xs.points().iter().map(|x| payoff.of_terminal(*x)).collect();
    values[cfg.n_t * nx..].copy_from_slice(&terminal);

    let mut v = terminal;
    let mut d2 = vec![0.0; nx];
    let mut y = vec![1.0; nx];
    let mut coef = vec![0.0; nx];
    let mut rhs = vec![0.0; nx];
    let mut trial = vec![0.0; nx];
    for step in (0..cfg.n_t).rev() {
        match cfg.scheme {
            HjbScheme::Explicit => {
                second_difference(&v, dx, slope_lo, slope_hi, &mut d2);
                for i in 0..nx {
                    let (h, yi) = hamiltonian(d2[i], &ham);
                    y[i] = yi;
                    v[i] += dt * h;
                }
                residuals.push(0.0);
                sweeps.push(1);
            }
            HjbScheme::ImplicitPolicyIteration => {
                // start from the policy of the previous step
                second_difference(&v, dx, slope_lo, slope_hi, &mut d2);
                for i in 0..nx {
                    y[i] = hamiltonian(d2[i], &ham).1;
                }
                let old = v.clone();
                let mut converged = false;
                let mut last = f64::INFINITY;
                let mut used = 0;
                for sweep in 1..=cfg.max_sweeps {
                    used = sweep;
                    for i in 0..nx {
                        coef[i] = 0.5 * s2 * y[i];
                        rhs[i] = old[i] - dt * pen * penalty(y[i]);
                    }
                    implicit_solve(&coef, dt, dx, &rhs, slope_lo, slope_hi, &mut trial);
                    last = trial
                        .iter()
                        .zip(&v)
                        .map(|(a, b)| (a - b).abs())
                        .fold(0.0, f64::max);
                    v.copy_from_slice(&trial);
                    second_difference(&v, dx, slope_lo, slope_hi, &mut d2);
                    let mut changed = false;
                    for i in 0..nx {
                        let yi = hamiltonian(d2[i], &ham).1;
                        if (yi - y[i]).abs() > 1e-12 * yi {
                            changed = true;
                        }
                        y[i] = yi;
                    }
                    if sweep > 1 && (!changed || last <= 1e-13 * (1.0 + v[nx / 2].abs())) {
                        converged = true;
                        break;
                    }
                }
                if !converged {
                    return Err(Error::PolicyIteration {
                        step,
                        sweeps: used,
                        residual: last,
                    });
                }
                residuals.push(last);
                sweeps.push(used);
            }
        }
        if v.iter().any(|x| !x.is_finite()) {
            return Err(Error::Domain(format!("non-finite value at time step {step}")));
        }
        values[step * nx..(step + 1) * nx].copy_from_slice(&v);
        policy[step * nx..(step + 1) * nx].copy_from_slice(&y);
    }
    let last_row = (cfg.n_t - 1) * nx;
    policy.copy_within(last_row..last_row + nx, cfg.n_t * nx);
    residuals.reverse();
    sweeps.reverse();

    let pi_value = {
        let (i, s) = xs.locate(model.x0);
        let row = &values[..nx];
        row[i] + s * (row[i + 1] - row[i])
    };
    Ok(LimitPriceResult {
        pi_value,
        ell,
        times,
        xs,
        values,
        policy,
        residuals,
        sweeps,
        scheme: cfg.scheme,
    })
}

fn normal_cdf(x: f64) -> f64 {
    0.5 * erfc(-x / std::f64::consts::SQRT_2)
}

fn normal_pdf(x: f64) -> f64 {
    (-0.5 * x * x).exp() / (2.0 * std::f64::consts::PI).sqrt()
}

/// Bachelier call `E (x0 + s Z - k)^+`.
pub fn bachelier_call(x0: f64, strike: f64, s: f64) -> f64 {
    if s == 0.0 {
        return (x0 - strike).max(0.0);
    }
    let d = (x0 - strike) / s;
    (x0 - strike) * normal_cdf(d) + s * normal_pdf(d)
}

/// Bachelier put `E (k - x0 - s Z)^+`.
pub fn bachelier_put(x0: f64, strike: f64, s: f64) -> f64 {
    if s == 0.0 {
        return (strike - x0).max(0.0);
    }
    let d = (strike - x0) / s;
    (strike - x0) * normal_cdf(d) + s * normal_pdf(d)
}

/// `E f(X0 + vol sqrt(T) Z)` with `vol = sigma` unless overridden.
pub fn bachelier_closed_form(payoff: &PayoffSpec, model: &ModelParams, vol_override: Option<f64>) -> Result<f64> {
    payoff.validate()?;
    let vol = vol_override.unwrap_or(model.sigma);
    if !(vol >= 0.0 && vol.is_finite()) {
        return Err(invalid("vol", format!("must be finite and >= 0, got {vol}")));
    }
    let s = vol * model.horizon.sqrt();
    let x0 = model.x0;
    Ok(match *payoff {
        PayoffSpec::Constant { value } => value,
        PayoffSpec::LinearTerminal => x0,
        PayoffSpec::CappedCall { strike, cap } => {
            if cap.is_infinite() {
                bachelier_call(x0, strike, s)
            } else {
                bachelier_call(x0, strike, s) - bachelier_call(x0, strike + cap, s)
            }
        }
        PayoffSpec::CappedPut { strike, cap } => {
            if cap.is_infinite() {
                bachelier_put(x0, strike, s)
            } else {
                bachelier_put(x0, strike, s) - bachelier_put(x0, strike - cap, s)
            }
        }
        PayoffSpec::CappedAsian { .. } => return Err(Error::UnsupportedPayoff(payoff.name().into())),
    })
}

/// Monte Carlo value of the limit objective under a feedback policy, clipped
/// to `[y_min, y_max]`. Any policy gives a lower bound on `pi(l)`.
pub fn policy_mc_value(
    model: &ModelParams,
    ell: f64,
    policy: &VolPolicySpec,
    y_bounds: (f64, f64),
    payoff: &PayoffSpec,
    steps: usize,
    mc: &McConfig,
) -> Result<Estimate> {
    model.validate()?;
    payoff.validate()?;
    policy.validate()?;
    if !(ell > 0.0) || steps == 0 {
        return Err(invalid("ell", "need ell > 0 and at least one time step"));
    }
    let (y_lo, y_hi) = y_bounds;
    let t_end = model.horizon;
    let dt = t_end / steps as f64;
    let pen = 1.0 / (2.0 * ell * t_end);
    estimate("limit_objective", mc, |stream| {
        let mut z = stream.normals();
        let mut x = model.x0;
        let mut integral = 0.0;
        let mut cost = 0.0;
        for j in 0..steps {
            let t = j as f64 * dt;
            let y = policy
                .raw(&PolicyInput {
                    t,
                    x,
                    running_integral: integral,
                    horizon: t_end,
                })
                .clamp(y_lo, y_hi);
            cost += penalty(y) * dt;
            let x1 = x + model.sigma * y.sqrt() * z.increment(dt);
            integral += 0.5 * (x + x1) * dt;
            x = x1;
        }
        payoff.of_state(x, integral / t_end) - pen * cost
    })
}

/// Two-level band family searched by [`policy_search`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BandFamily {
    pub lo: f64,
    pub hi: f64,
    pub state: BandState,
    pub y_min: f64,
    pub y_max: f64,
    /// Search only `y_inner = y_outer`.
    pub constant_only: bool,
}

impl BandFamily {
    /// Band `[K - C/2, K + C/2]` around the kink region of a capped claim.
    pub fn for_payoff(payoff: &PayoffSpec, y_max: f64) -> Self {
        let (centre, width, state) = match *payoff {
            PayoffSpec::CappedCall { strike, cap } => (strike + 0.5 * cap, cap, BandState::Price),
            PayoffSpec::CappedPut { strike, cap } => (strike - 0.5 * cap, cap, BandState::Price),
            PayoffSpec::CappedAsian { strike, cap } => (strike + 0.5 * cap, cap, BandState::ProjectedAverage),
            _ => (0.0, f64::INFINITY, BandState::Price),
        };
        Self {
            lo: centre - 0.5 * width,
            hi: centre + 0.5 * width,
            state,
            y_min: HamiltonianConfig::DEFAULT_Y_MIN,
            y_max,
            constant_only: false,
        }
    }

    pub fn policy(&self, y_inner: f64, y_outer: f64) -> VolPolicySpec {
        if self.constant_only {
            return VolPolicySpec::Constant { y: y_inner };
        }
        VolPolicySpec::Band {
            y_inner,
            y_outer,
            lo: self.lo,
            hi: self.hi,
            state: self.state,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PolicySearchResult {
    pub best: Estimate,
    pub best_policy: VolPolicySpec,
    /// Best value after each evaluation; nondecreasing.
    pub trace: Vec<f64>,
    pub evaluations: usize,
}

/// Compass search in `(log y_inner, log y_outer)` with common random numbers.
pub fn policy_search(
    model: &ModelParams,
    ell: f64,
    payoff: &PayoffSpec,
    family: &BandFamily,
    steps: usize,
    mc: &McConfig,
    max_evaluations: usize,
) -> Result<PolicySearchResult> {
    let (lo, hi) = (family.y_min.ln(), family.y_max.ln());
    let eval = |p: [f64; 2]| -> Result<Estimate> {
        let pol = family.policy(p[0].exp(), p[1].exp());
        policy_mc_value(model, ell, &pol, (family.y_min, family.y_max), payoff, steps, mc)
    };
    let mut point = [0.0f64, 0.0];
    let mut best = eval(point)?;
    let mut trace = vec![best.mean];
    let mut evaluations = 1;
    let mut step = std::f64::consts::LN_2;
    let dims = if family.constant_only { 1 } else { 2 };
    while step > 0.01 && evaluations < max_evaluations {
        let mut improved = false;
        'dirs: for j in 0..dims {
            for sign in [1.0, -1.0] {
                let mut cand = point;
                cand[j] = (cand[j] + sign * step).clamp(lo, hi);
                if cand == point {
                    continue;
                }
                let e = eval(cand)?;
                evaluations += 1;
                if e.mean > best.mean {
                    best = e;
                    point = cand;
                    improved = true;
                }
                trace.push(best.mean);
                if improved || evaluations >= max_evaluations {
                    break 'dirs;
                }
            }
        }
        if !improved {
            step *= 0.5;
        }
    }
    Ok(PolicySearchResult {
        best,
        best_policy: family.policy(point[0].exp(), point[1].exp()),
        trace,
        evaluations,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn model() -> ModelParams {
        ModelParams::new(100.0, 20.0, 0.0, 1.0).unwrap()
    }

    const CALL: PayoffSpec = PayoffSpec::CappedCall { strike: 100.0, cap: 50.0 };

    #[test]
    fn atm_call_closed_form() {
        let m = model();
        let uncapped = PayoffSpec::CappedCall {
            strike: 100.0,
            cap: f64::INFINITY,
        };
        let v = bachelier_closed_form(&uncapped, &m, None).unwrap();
        assert!((v - 20.0 / (2.0 * std::f64::consts::PI).sqrt()).abs() < 1e-12);
        assert!((v - 7.978_85).abs() < 1e-5);
    }

    #[test]
    fn cap_limit_and_deep_itm() {
        let m = model();
        let big = PayoffSpec::CappedCall { strike: 0.0, cap: 1e6 };
        let v = bachelier_closed_form(&big, &m, None).unwrap();
        // time value 100 (Phi(5) - 1) + 20 phi(5) ~ 5.7e-6
        assert!(v > 100.0 && v - 100.0 < 1e-5, "{v}");
        let mut last = 0.0;
        for cap in [10.0, 50.0, 200.0, 1e4] {
            let p = PayoffSpec::CappedCall { strike: 100.0, cap };
            let v = bachelier_closed_form(&p, &m, None).unwrap();
            assert!(v >= last);
            last = v;
        }
        assert!((last - 7.978_845_608_028_654).abs() < 1e-12);
    }

    #[test]
    fn put_call_parity_for_caps() {
        // C(K) - P(K) = X0 - K for the uncapped Bachelier legs
        for k in [80.0, 100.0, 130.0] {
            assert!((bachelier_call(100.0, k, 20.0) - bachelier_put(100.0, k, 20.0) - (100.0 - k)).abs() < 1e-12);
        }
        let m = model();
        let call = bachelier_closed_form(&CALL, &m, None).unwrap();
        let put = bachelier_closed_form(&PayoffSpec::CappedPut { strike: 100.0, cap: 50.0 }, &m, None).unwrap();
        assert!((call - put).abs() < 1e-12, "symmetric about X0");
    }

    #[test]
    fn explicit_refuses_unstable_step() {
        let m = model();
        let cfg = HjbConfig {
            scheme: HjbScheme::Explicit,
            ..HjbConfig::for_model(&m, 25.0).with_resolution(201, 10)
        };
        assert!(matches!(hjb_solve(&m, 1.0, &CALL, &cfg), Err(Error::Unstable { .. })));
    }

    #[test]
    fn constant_claim_is_flat() {
        let m = model();
        let cfg = HjbConfig::for_model(&m, 25.0).with_resolution(101, 20);
        for ell in [0.01, 1.0, 100.0] {
            let r = hjb_solve(&m, ell, &PayoffSpec::Constant { value: 4.0 }, &cfg).unwrap();
            assert!((r.pi_value - 4.0).abs() < 1e-12);
            assert!(r.policy.iter().all(|y| (*y - 1.0).abs() < 1e-12));
        }
    }

    #[test]
    fn terminal_row_is_payoff() {
        let m = model();
        let cfg = HjbConfig::for_model(&m, 4.0).with_resolution(201, 40);
        let r = hjb_solve(&m, 1.0, &CALL, &cfg).unwrap();
        let last = r.value_row(cfg.n_t);
        for (x, v) in r.xs.points().iter().zip(last) {
            assert_eq!(*v, CALL.of_terminal(*x));
        }
        assert_eq!(r.pi_value, r.value_row(0)[cfg.n_x / 2]);
    }

    #[test]
    fn asian_is_rejected() {
        let m = model();
        let cfg = HjbConfig::for_model(&m, 4.0).with_resolution(51, 5);
        let p = PayoffSpec::CappedAsian { strike: 100.0, cap: 50.0 };
        assert!(matches!(hjb_solve(&m, 1.0, &p, &cfg), Err(Error::UnsupportedPayoff(_))));
    }

    #[test]
    fn explicit_and_implicit_agree() {
        let m = model();
        let base = HjbConfig::for_model(&m, 4.0).with_resolution(121, 0);
        let n_t = (m.horizon / base.explicit_dt_limit(&m)).ceil() as usize + 1;
        let ex = HjbConfig {
            scheme: HjbScheme::Explicit,
            ..base.with_resolution(121, n_t)
        };
        let im = base.with_resolution(121, n_t);
        let a = hjb_solve(&m, 1.0, &CALL, &ex).unwrap().pi_value;
        let b = hjb_solve(&m, 1.0, &CALL, &im).unwrap().pi_value;
        assert!((a - b).abs() < 2e-2 * b.abs(), "explicit {a} implicit {b}");
    }

    #[test]
    fn limit_objective_of_constant_policy() {
        let m = model();
        let v = policy_mc_value(
            &m,
            1.0,
            &VolPolicySpec::Constant { y: 2.0 },
            (1e-4, 25.0),
            &PayoffSpec::Constant { value: 3.0 },
            16,
            &McConfig::new(200, 1, 1),
        )
        .unwrap();
        // 3 - g(2) / 2
        assert!((v.mean - (3.0 - (1.0 - 2f64.ln()) / 2.0)).abs() < 1e-12);
        assert!(v.stderr < 1e-12);
    }

    #[test]
    fn constant_family_on_constant_claim_stays_at_unit_variance() {
        let m = model();
        let fam = BandFamily {
            constant_only: true,
            ..BandFamily::for_payoff(&PayoffSpec::Constant { value: 1.0 }, 25.0)
        };
        let r = policy_search(&m, 1.0, &PayoffSpec::Constant { value: 1.0 }, &fam, 4, &McConfig::new(100, 1, 2), 50).unwrap();
        assert_eq!(r.best_policy, VolPolicySpec::Constant { y: 1.0 });
        assert!(r.trace.windows(2).all(|w| w[1] >= w[0]));
    }
}
