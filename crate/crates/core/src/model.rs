//! Market model, trading grid, friction schedule and payoff menu.
//!
//! The risky asset follows arithmetic Brownian motion `X_t = x0 + sigma W_t + mu t`
//! and is traded only on the equidistant grid `kT/n`. Alongside the asset the
//! investor may buy one-period power options paying `|X_{k+1} - X_k|^3` for the
//! price `h(n)`.

use crate::error::{invalid, Error, Result};

/// `E|Z|^3` for a standard normal `Z`.
pub const GAUSSIAN_ABS_THIRD_MOMENT: f64 = 1.595_769_121_605_730_7; // 2 sqrt(2/pi)

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModelParams {
    pub x0: f64,
    pub sigma: f64,
    pub mu: f64,
    pub horizon: f64,
}

impl ModelParams {
    pub fn new(x0: f64, sigma: f64, mu: f64, horizon: f64) -> Result<Self> {
        let m = Self {
            x0,
            sigma,
            mu,
            horizon,
        };
        m.validate()?;
        Ok(m)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.x0 > 0.0 && self.x0.is_finite()) {
            return Err(invalid("x0", format!("must be positive and finite, got {}", self.x0)));
        }
        if !(self.sigma > 0.0 && self.sigma.is_finite()) {
            return Err(invalid("sigma", format!("must be positive and finite, got {}", self.sigma)));
        }
        if !self.mu.is_finite() {
            return Err(invalid("mu", "must be finite"));
        }
        if !(self.horizon > 0.0 && self.horizon.is_finite()) {
            return Err(invalid("T", format!("must be positive and finite, got {}", self.horizon)));
        }
        Ok(())
    }

    pub fn variance(&self) -> f64 {
        self.sigma * self.sigma
    }

    /// Standard deviation of the terminal price, `sigma sqrt(T)`.
    pub fn terminal_std(&self) -> f64 {
        self.sigma * self.horizon.sqrt()
    }
}

/// Number of trading intervals on `[0, T]`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct GridSpec {
    pub n: usize,
}

impl GridSpec {
    pub fn new(n: usize) -> Result<Self> {
        if n == 0 {
            return Err(invalid("n", "need at least one trading interval"));
        }
        Ok(Self { n })
    }

    pub fn dt(&self, horizon: f64) -> f64 {
        horizon / self.n as f64
    }

    pub fn time(&self, k: usize, horizon: f64) -> f64 {
        // k*T/n rather than k*dt so that the last knot is exactly T.
        horizon * k as f64 / self.n as f64
    }

    pub fn times(&self, horizon: f64) -> Vec<f64> {
        (0..=self.n).map(|k| self.time(k, horizon)).collect()
    }
}

/// Price schedule of the one-period power options, `h(n) = c_h n^{-5/4}`.
///
/// With this exponent `n^{3/2} h(n) -> inf` and `n h(n) -> 0`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FrictionSchedule {
    pub c_h: f64,
}

impl Default for FrictionSchedule {
    fn default() -> Self {
        Self { c_h: 1.0 }
    }
}

impl FrictionSchedule {
    pub const EXPONENT: f64 = -1.25;

    pub fn new(c_h: f64) -> Result<Self> {
        if !(c_h > 0.0 && c_h.is_finite()) {
            return Err(invalid("c_h", format!("must be positive and finite, got {c_h}")));
        }
        Ok(Self { c_h })
    }

    /// Schedule whose one-interval price is `multiple * n^{1/4}` times the
    /// Gaussian third absolute moment `E|sigma sqrt(T/n) Z|^3`.
    pub fn gaussian_scaled(model: &ModelParams, multiple: f64) -> Result<Self> {
        Self::new(multiple * GAUSSIAN_ABS_THIRD_MOMENT * model.terminal_std().powi(3))
    }

    pub fn price(&self, n: usize) -> f64 {
        self.c_h * (n as f64).powf(Self::EXPONENT)
    }
}

/// Claim on the (interpolated) price path.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum PayoffSpec {
    Constant { value: f64 },
    /// `x_T`. Violates `f >= 0`; kept because it is replicated exactly.
    LinearTerminal,
    CappedCall { strike: f64, cap: f64 },
    CappedPut { strike: f64, cap: f64 },
    /// `min(max(avg - K, 0), C)` with `avg` the time average of the path.
    CappedAsian { strike: f64, cap: f64 },
}

/// How a payoff sees a path.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EvalMode {
    /// `f` applied to the piecewise-linear path through all knots.
    Continuous,
    /// `f^n = f o p^n`: only the values at the `n`-grid times are used.
    Discretized { n: usize },
}

fn capped(excess: f64, cap: f64) -> f64 {
    excess.max(0.0).min(cap)
}

impl PayoffSpec {
    pub fn validate(&self) -> Result<()> {
        match *self {
            PayoffSpec::Constant { value } => {
                if !(value >= 0.0 && value.is_finite()) {
                    return Err(invalid("payoff_constant", "constant payoff must be finite and >= 0"));
                }
            }
            PayoffSpec::LinearTerminal => {}
            PayoffSpec::CappedCall { strike, cap }
            | PayoffSpec::CappedPut { strike, cap }
            | PayoffSpec::CappedAsian { strike, cap } => {
                if !strike.is_finite() {
                    return Err(invalid("strike", "must be finite"));
                }
                if !(cap > 0.0) || cap.is_nan() {
                    return Err(invalid("cap", format!("must be positive, got {cap}")));
                }
            }
        }
        Ok(())
    }

    pub fn name(&self) -> &'static str {
        match self {
            PayoffSpec::Constant { .. } => "constant",
            PayoffSpec::LinearTerminal => "linear",
            PayoffSpec::CappedCall { .. } => "capped_call",
            PayoffSpec::CappedPut { .. } => "capped_put",
            PayoffSpec::CappedAsian { .. } => "capped_asian",
        }
    }

    /// Lipschitz constant with respect to the sup norm.
    pub fn lipschitz(&self) -> f64 {
        match self {
            PayoffSpec::Constant { .. } => 0.0,
            _ => 1.0,
        }
    }

    pub fn is_test_only(&self) -> bool {
        matches!(self, PayoffSpec::LinearTerminal)
    }

    /// True when the claim depends on the terminal value only.
    pub fn is_terminal(&self) -> bool {
        !matches!(self, PayoffSpec::CappedAsian { .. })
    }

    /// Payoff as a function of the terminal value. Asian claims are
    /// evaluated on the corresponding path average, see [`Self::of_average`].
    pub fn of_terminal(&self, x: f64) -> f64 {
        match *self {
            PayoffSpec::Constant { value } => value,
            PayoffSpec::LinearTerminal => x,
            PayoffSpec::CappedCall { strike, cap } => capped(x - strike, cap),
            PayoffSpec::CappedPut { strike, cap } => capped(strike - x, cap),
            PayoffSpec::CappedAsian { strike, cap } => capped(x - strike, cap),
        }
    }

    /// Value from the terminal price and the time average of the path.
    pub fn of_state(&self, terminal: f64, average: f64) -> f64 {
        match *self {
            PayoffSpec::CappedAsian { strike, cap } => capped(average - strike, cap),
            _ => self.of_terminal(terminal),
        }
    }

    /// Asian payoff on a given average; terminal payoffs ignore it.
    pub fn of_average(&self, average: f64) -> f64 {
        self.of_state(average, average)
    }

    /// One-sided slopes `(left, right)` of the terminal payoff at `x`.
    pub fn terminal_slopes(&self, x: f64) -> (f64, f64) {
        let h = 1e-7 * (1.0 + x.abs());
        let f0 = self.of_terminal(x);
        (
            (f0 - self.of_terminal(x - h)) / h,
            (self.of_terminal(x + h) - f0) / h,
        )
    }

    /// Payoff of the linear interpolation of equally spaced grid values
    /// `v_0, ..., v_n` on `[0, T]`.
    pub fn on_grid(&self, values: &[f64]) -> f64 {
        let last = *values.last().expect("empty grid path");
        match self {
            PayoffSpec::CappedAsian { .. } => self.of_average(trapezoid_average(values)),
            _ => self.of_terminal(last),
        }
    }
}

/// Time average of the piecewise-linear function through equally spaced knots.
pub fn trapezoid_average(values: &[f64]) -> f64 {
    let n = values.len() - 1;
    if n == 0 {
        return values[0];
    }
    let inner: f64 = values[1..n].iter().sum();
    (0.5 * (values[0] + values[n]) + inner) / n as f64
}

/// Prices observed at strictly increasing times.
#[derive(Debug, Clone, PartialEq)]
pub struct PathSample {
    times: Vec<f64>,
    values: Vec<f64>,
}

impl PathSample {
    pub fn new(times: Vec<f64>, values: Vec<f64>) -> Result<Self> {
        if times.is_empty() || times.len() != values.len() {
            return Err(invalid("path", "times and values must be non-empty and of equal length"));
        }
        if times.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(invalid("path", "times must be strictly increasing"));
        }
        if times.iter().chain(values.iter()).any(|v| !v.is_finite()) {
            return Err(invalid("path", "times and values must be finite"));
        }
        Ok(Self { times, values })
    }

    /// Path sampled on the grid `kT/n`.
    pub fn on_grid(grid: GridSpec, horizon: f64, values: Vec<f64>) -> Result<Self> {
        Self::new(grid.times(horizon), values)
    }

    pub fn times(&self) -> &[f64] {
        &self.times
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn start(&self) -> f64 {
        self.times[0]
    }

    pub fn end(&self) -> f64 {
        *self.times.last().unwrap()
    }

    /// Exact time average of the piecewise-linear interpolant.
    pub fn time_average(&self) -> f64 {
        let span = self.end() - self.start();
        if span == 0.0 {
            return self.values[0];
        }
        let area: f64 = self
            .times
            .windows(2)
            .zip(self.values.windows(2))
            .map(|(t, v)| 0.5 * (v[0] + v[1]) * (t[1] - t[0]))
            .sum();
        area / span
    }
}

/// Piecewise-linear interpolation of `path` at `t`.
pub fn interpolate(path: &PathSample, t: f64) -> Result<f64> {
    let times = path.times();
    let values = path.values();
    if !(t >= path.start() && t <= path.end()) {
        return Err(Error::Domain(format!(
            "t = {t} outside path range [{}, {}]",
            path.start(),
            path.end()
        )));
    }
    // index of the first knot strictly greater than t
    let hi = times.partition_point(|&s| s <= t);
    if hi == 0 {
        return Ok(values[0]);
    }
    if hi == times.len() {
        return Ok(values[times.len() - 1]);
    }
    let lo = hi - 1;
    let w = (t - times[lo]) / (times[hi] - times[lo]);
    Ok(values[lo] + w * (values[hi] - values[lo]))
}

/// Evaluates `payoff` on `path`, which must cover `[0, T]` with `T` its last time.
pub fn payoff_eval(payoff: &PayoffSpec, path: &PathSample, mode: EvalMode) -> Result<f64> {
    if path.start() != 0.0 {
        return Err(Error::Domain(format!("path starts at {} instead of 0", path.start())));
    }
    match mode {
        EvalMode::Continuous => Ok(payoff.of_state(*path.values().last().unwrap(), path.time_average())),
        EvalMode::Discretized { n } => {
            let grid = GridSpec::new(n)?;
            let horizon = path.end();
            let knots = (0..=n)
                .map(|k| interpolate(path, grid.time(k, horizon)))
                .collect::<Result<Vec<_>>>()?;
            Ok(payoff.on_grid(&knots))
        }
    }
}
