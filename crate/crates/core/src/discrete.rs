//! Certainty equivalent of a short claim hedged on the `n`-grid with the
//! underlying and one-period power options, by backward dynamic programming.
//!
//! With `u_k` the certainty equivalent of the remaining problem at time
//! `kT/n`, one step of the recursion reads
//!
//! ```text
//! u_k(s) = min_{gamma, delta >= 0} (1/lambda) log E exp(lambda (u_{k+1}(s') - gamma dX - delta (|dX|^3 - h)))
//! ```
//!
//! with `dX ~ N(mu T/n, sigma^2 T/n)` integrated by Gauss-Hermite quadrature.

use rayon::prelude::*;

use crate::error::{invalid, Error, Result};
use crate::interp::{InterpOrder, Interpolant, UniformAxis};
use crate::mc::{log_mean_exp, simulate_paths, LogMeanExpEstimate, McConfig};
use crate::model::{FrictionSchedule, GridSpec, ModelParams, PayoffSpec};
use crate::quadrature::GaussHermite;

/// Truncation mass above which a warning is attached to the result.
pub const TRUNCATION_WARNING: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DpConfig {
    pub x_min: f64,
    pub x_max: f64,
    pub n_x: usize,
    /// Points of the running-average axis (Asian claims only).
    pub aux_points: usize,
    pub quad_nodes: usize,
    pub interp_order: InterpOrder,
    pub gamma_bound: f64,
    pub delta_bound: f64,
    pub max_iterations: usize,
    /// Drop the power options (`delta = 0`).
    pub delta_free: bool,
}

impl DpConfig {
    pub const DEFAULT_N_X: usize = 401;
    pub const DEFAULT_AUX_POINTS: usize = 41;
    pub const DEFAULT_QUAD_NODES: usize = 128;

    /// Grid of `X0 +- 8 sigma sqrt(T)` and strategy bounds scaled to the claim.
    pub fn for_model(model: &ModelParams, payoff: &PayoffSpec) -> Self {
        let half = 8.0 * model.terminal_std();
        Self {
            x_min: model.x0 - half,
            x_max: model.x0 + half,
            n_x: Self::DEFAULT_N_X,
            aux_points: Self::DEFAULT_AUX_POINTS,
            quad_nodes: Self::DEFAULT_QUAD_NODES,
            interp_order: InterpOrder::Cubic,
            gamma_bound: 10.0 * payoff.lipschitz().max(1.0),
            delta_bound: 10.0,
            max_iterations: 200,
            delta_free: false,
        }
    }

    pub fn validate(&self, model: &ModelParams) -> Result<()> {
        let need = 6.0 * model.terminal_std();
        if self.x_min > model.x0 - need || self.x_max < model.x0 + need {
            return Err(invalid(
                "x_range",
                format!(
                    "[{}, {}] must cover X0 +- 6 sigma sqrt(T) = [{}, {}]",
                    self.x_min,
                    self.x_max,
                    model.x0 - need,
                    model.x0 + need
                ),
            ));
        }
        if self.n_x < 3 {
            return Err(invalid("n_x", "need at least 3 state points"));
        }
        if self.aux_points < 2 {
            return Err(invalid("aux_points", "need at least 2 running-average points"));
        }
        if self.quad_nodes < 16 {
            return Err(invalid("quad_nodes", format!("need at least 16, got {}", self.quad_nodes)));
        }
        if !(self.gamma_bound > 0.0 && self.delta_bound > 0.0) {
            return Err(invalid("gamma_bound", "strategy bounds must be positive"));
        }
        if self.max_iterations == 0 {
            return Err(invalid("max_iterations", "must be positive"));
        }
        Ok(())
    }

    fn x_axis(&self) -> UniformAxis {
        UniformAxis::new(self.x_min, self.x_max, self.n_x)
    }
}

/// Strategy `(gamma_k, delta_k)` tabulated on the state grid of each slice.
#[derive(Debug, Clone, PartialEq)]
pub struct HedgePolicySurface {
    pub x_axes: Vec<UniformAxis>,
    pub aux_axes: Vec<UniformAxis>,
    /// Per slice, row-major over `(aux, x)`.
    pub gamma: Vec<Vec<f64>>,
    pub delta: Vec<Vec<f64>>,
}

impl HedgePolicySurface {
    pub fn slices(&self) -> usize {
        self.gamma.len()
    }

    /// Bilinear lookup in slice `k`, flat outside the grid.
    pub fn at(&self, k: usize, x: f64, aux: f64) -> (f64, f64) {
        let (xa, sa) = (&self.x_axes[k], &self.aux_axes[k]);
        let lookup = |table: &[f64]| -> f64 {
            let row = |j: usize| -> f64 {
                let r = &table[j * xa.len..(j + 1) * xa.len];
                if xa.len == 1 {
                    return r[0];
                }
                let (i, s) = xa.locate(x.clamp(xa.lo, xa.hi));
                r[i] + s.clamp(0.0, 1.0) * (r[i + 1] - r[i])
            };
            if sa.len == 1 {
                return row(0);
            }
            let (j, s) = sa.locate(aux.clamp(sa.lo, sa.hi));
            let s = s.clamp(0.0, 1.0);
            row(j) + s * (row(j + 1) - row(j))
        };
        (lookup(&self.gamma[k]), lookup(&self.delta[k]))
    }
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct DpDiagnostics {
    /// Largest quadrature mass leaving the state grid from a state within
    /// `X0 +- 4 sigma sqrt(T)`.
    pub truncation_mass: f64,
    pub newton_iterations: u64,
    pub max_newton_iterations: usize,
    /// States whose optimal `|gamma|` sits at `gamma_bound`.
    pub gamma_bound_hits: usize,
    /// States whose optimal `delta` sits at `delta_bound`.
    pub delta_bound_hits: usize,
    pub warnings: Vec<String>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CertEquivResult {
    pub c_value: f64,
    pub n: usize,
    pub lambda: f64,
    pub policy: HedgePolicySurface,
    pub diagnostics: DpDiagnostics,
}

/// One-step problem `min (1/lambda) log sum_i w_i exp(lambda (a_i - gamma d_i - delta c_i))`.
struct InnerProblem<'a> {
    log_w: &'a [f64],
    a: &'a [f64],
    d: &'a [f64],
    c: &'a [f64],
    lambda: f64,
}

struct InnerEval {
    value: f64,
    grad: [f64; 2],
    hess: [[f64; 2]; 2],
}

impl InnerProblem<'_> {
    fn value(&self, gamma: f64, delta: f64) -> f64 {
        let lam = self.lambda;
        let mut top = f64::NEG_INFINITY;
        for i in 0..self.a.len() {
            let e = self.log_w[i] + lam * (self.a[i] - gamma * self.d[i] - delta * self.c[i]);
            top = top.max(e);
        }
        let mut sum = 0.0;
        for i in 0..self.a.len() {
            let e = self.log_w[i] + lam * (self.a[i] - gamma * self.d[i] - delta * self.c[i]);
            sum += (e - top).exp();
        }
        (top + sum.ln()) / lam
    }

    fn eval(&self, gamma: f64, delta: f64) -> InnerEval {
        let lam = self.lambda;
        let m = self.a.len();
        let mut expo = Vec::with_capacity(m);
        let mut top = f64::NEG_INFINITY;
        for i in 0..m {
            let e = self.log_w[i] + lam * (self.a[i] - gamma * self.d[i] - delta * self.c[i]);
            top = top.max(e);
            expo.push(e);
        }
        let (mut s0, mut sd, mut sc) = (0.0, 0.0, 0.0);
        for (i, e) in expo.iter_mut().enumerate() {
            *e = (*e - top).exp();
            s0 += *e;
            sd += *e * self.d[i];
            sc += *e * self.c[i];
        }
        let (md, mc) = (sd / s0, sc / s0);
        let (mut vdd, mut vdc, mut vcc) = (0.0, 0.0, 0.0);
        for (i, p) in expo.iter().enumerate() {
            let (x, y) = (self.d[i] - md, self.c[i] - mc);
            vdd += p * x * x;
            vdc += p * x * y;
            vcc += p * y * y;
        }
        let (vdd, vdc, vcc) = (vdd / s0, vdc / s0, vcc / s0);
        InnerEval {
            value: (top + s0.ln()) / lam,
            grad: [-md, -mc],
            hess: [[lam * vdd, lam * vdc], [lam * vdc, lam * vcc]],
        }
    }
}

#[derive(Debug, Clone, Copy)]
struct InnerSolution {
    value: f64,
    gamma: f64,
    delta: f64,
    iterations: usize,
}

#[derive(Debug, Clone, Copy)]
struct Bounds {
    gamma: f64,
    delta: f64,
    delta_free: bool,
}

/// Damped projected Newton on the box `|gamma| <= gamma_bound`, `0 <= delta <= delta_bound`.
fn solve_inner(p: &InnerProblem, start: (f64, f64), bounds: Bounds, max_iter: usize) -> std::result::Result<InnerSolution, String> {
    let lo = [-bounds.gamma, 0.0];
    let hi = [bounds.gamma, if bounds.delta_free { 0.0 } else { bounds.delta }];
    let mut x = [start.0.clamp(lo[0], hi[0]), start.1.clamp(lo[1], hi[1])];
    let mut ev = p.eval(x[0], x[1]);
    for it in 0..max_iter {
        let mut free = [true, true];
        for j in 0..2 {
            let at_lo = x[j] <= lo[j] && ev.grad[j] >= 0.0;
            let at_hi = x[j] >= hi[j] && ev.grad[j] <= 0.0;
            if at_lo || at_hi || lo[j] == hi[j] {
                free[j] = false;
            }
        }
        let step = newton_step(&ev, free);
        let decrement = -(ev.grad[0] * step[0] + ev.grad[1] * step[1]);
        let tol = 1e-13 * (1.0 + ev.value.abs());
        if !(decrement > tol) {
            return Ok(InnerSolution {
                value: ev.value,
                gamma: x[0],
                delta: x[1],
                iterations: it,
            });
        }
        let width = [hi[0] - lo[0], hi[1] - lo[1]];
        let gscale = [width[0].max(1e-300), width[1].max(1e-300)];
        let steepest = [
            if free[0] { -ev.grad[0] * gscale[0] * gscale[0] } else { 0.0 },
            if free[1] { -ev.grad[1] * gscale[1] * gscale[1] } else { 0.0 },
        ];
        let mut accepted = false;
        for dir in [step, steepest] {
            // keep trial points within one box width
            let mut t = 1.0f64;
            for j in 0..2 {
                if dir[j].abs() > width[j] && width[j] > 0.0 {
                    t = t.min(width[j] / dir[j].abs());
                }
            }
            while t > 1e-30 {
                let cand = [
                    (x[0] + t * dir[0]).clamp(lo[0], hi[0]),
                    (x[1] + t * dir[1]).clamp(lo[1], hi[1]),
                ];
                let v = p.value(cand[0], cand[1]);
                let predicted = ev.grad[0] * (cand[0] - x[0]) + ev.grad[1] * (cand[1] - x[1]);
                if v <= ev.value + 1e-4 * predicted.min(0.0) && (cand != x) {
                    x = cand;
                    accepted = true;
                    break;
                }
                t *= 0.5;
            }
            if accepted {
                break;
            }
        }
        if !accepted {
            // no representable decrease left
            if decrement < 1e-8 * (1.0 + ev.value.abs()) {
                return Ok(InnerSolution {
                    value: ev.value,
                    gamma: x[0],
                    delta: x[1],
                    iterations: it,
                });
            }
            return Err(format!("line search failed with Newton decrement {decrement:e}"));
        }
        ev = p.eval(x[0], x[1]);
    }
    Err(format!("no convergence in {max_iter} iterations"))
}

fn newton_step(ev: &InnerEval, free: [bool; 2]) -> [f64; 2] {
    let [[a, b], [_, c]] = ev.hess;
    let [g0, g1] = ev.grad;
    match free {
        [true, true] => {
            let ridge = 1e-12 * (a.abs() + c.abs()) + f64::MIN_POSITIVE;
            let (a, c) = (a + ridge, c + ridge);
            let det = a * c - b * b;
            if det > 1e-14 * a * c {
                [-(c * g0 - b * g1) / det, -(a * g1 - b * g0) / det]
            } else {
                [-g0 / a, -g1 / c]
            }
        }
        [true, false] => [-g0 / (a + f64::MIN_POSITIVE), 0.0],
        [false, true] => [0.0, -g1 / (c + f64::MIN_POSITIVE)],
        [false, false] => [0.0, 0.0],
    }
}

/// Values of one DP slice on its `(aux, x)` grid.
struct Slice {
    x_axis: UniformAxis,
    aux_axis: UniformAxis,
    rows: Vec<Interpolant>,
}

impl Slice {
    fn eval(&self, x: f64, aux: f64) -> f64 {
        if self.rows.len() == 1 {
            return self.rows[0].eval(x);
        }
        let (j, s) = self.aux_axis.locate(aux.clamp(self.aux_axis.lo, self.aux_axis.hi));
        let s = s.clamp(0.0, 1.0);
        let a = self.rows[j].eval(x);
        if s == 0.0 {
            return a;
        }
        a + s * (self.rows[j + 1].eval(x) - a)
    }

    fn slope(&self, x: f64, aux: f64) -> f64 {
        let h = self.x_axis.step();
        (self.eval(x + h, aux) - self.eval(x - h, aux)) / (2.0 * h)
    }
}

struct StateOutcome {
    value: f64,
    gamma: f64,
    delta: f64,
    iterations: usize,
    mass_out: f64,
}

/// Backward recursion for `c(n, lambda)`.
pub fn dp_certainty_equivalent(
    model: &ModelParams,
    grid: GridSpec,
    lambda: f64,
    payoff: &PayoffSpec,
    friction: &FrictionSchedule,
    cfg: &DpConfig,
) -> Result<CertEquivResult> {
    model.validate()?;
    payoff.validate()?;
    cfg.validate(model)?;
    if !(lambda > 0.0 && lambda.is_finite()) {
        return Err(invalid("lambda", format!("must be positive, got {lambda}")));
    }
    let n = grid.n;
    let dt = grid.dt(model.horizon);
    let h = friction.price(n);
    let quad = GaussHermite::new(cfg.quad_nodes)?;
    let log_w: Vec<f64> = quad.weights.iter().map(|w| w.ln()).collect();
    let d: Vec<f64> = quad
        .nodes
        .iter()
        .map(|z| model.mu * dt + model.sigma * dt.sqrt() * z)
        .collect();
    let c: Vec<f64> = d.iter().map(|v| v.abs().powi(3) - h).collect();
    let asian = !payoff.is_terminal();
    let x_axis = cfg.x_axis();
    let core = 4.0 * model.terminal_std();
    let bounds = Bounds {
        gamma: cfg.gamma_bound,
        delta: cfg.delta_bound,
        delta_free: cfg.delta_free,
    };

    let axes_at = |k: usize| -> (UniformAxis, UniformAxis) {
        if k == 0 {
            return (UniformAxis::new(model.x0, model.x0, 1), UniformAxis::new(0.0, 0.0, 1));
        }
        let aux = if asian {
            let f = k as f64 / n as f64;
            UniformAxis::new(f * cfg.x_min, f * cfg.x_max, cfg.aux_points)
        } else {
            UniformAxis::new(0.0, 0.0, 1)
        };
        (x_axis, aux)
    };

    let mut next: Option<Slice> = None;
    let mut diag = DpDiagnostics::default();
    let mut gammas = vec![Vec::new(); n];
    let mut deltas = vec![Vec::new(); n];
    let mut x_axes = vec![x_axis; n];
    let mut aux_axes = vec![UniformAxis::new(0.0, 0.0, 1); n];
    let mut root = f64::NAN;

    for k in (0..n).rev() {
        let (xa, sa) = axes_at(k);
        let prev_delta = if k + 1 < n && gammas[k + 1].len() == xa.len * sa.len {
            Some(deltas[k + 1].clone())
        } else {
            None
        };
        let states = xa.len * sa.len;
        let terminal_step = k + 1 == n;
        let solve_state = |idx: usize| -> Result<StateOutcome> {
            let (j, i) = (idx / xa.len, idx % xa.len);
            let (x, s) = (xa.point(i), sa.point(j));
            let mut a = Vec::with_capacity(d.len());
            let mut mass_out = 0.0;
            for (dx, w) in d.iter().zip(&quad.weights) {
                let x1 = x + dx;
                let s1 = s + (x + x1) / (2.0 * n as f64);
                let v = if terminal_step {
                    payoff.of_state(x1, s1)
                } else {
                    next.as_ref().expect("next slice").eval(x1, s1)
                };
                if !x_axis.contains(x1) {
                    mass_out += w;
                }
                a.push(v);
            }
            let problem = InnerProblem {
                log_w: &log_w,
                a: &a,
                d: &d,
                c: &c,
                lambda,
            };
            let gamma0 = match &next {
                Some(slice) => slice.slope(x + model.mu * dt, s + x / n as f64),
                None => {
                    let x1 = x + model.mu * dt;
                    let e = x_axis.step();
                    let s1 = s + (x + x1) / (2.0 * n as f64);
                    (payoff.of_state(x1 + e, s1 + e / (2.0 * n as f64)) - payoff.of_state(x1 - e, s1 - e / (2.0 * n as f64)))
                        / (2.0 * e)
                }
            };
            let delta0 = prev_delta.as_ref().map_or(0.0, |p| p[idx]);
            let sol = solve_inner(&problem, (gamma0, delta0), bounds, cfg.max_iterations).map_err(|reason| {
                Error::InnerOptimizer {
                    slice: k,
                    x,
                    aux: s,
                    reason,
                }
            })?;
            Ok(StateOutcome {
                value: sol.value,
                gamma: sol.gamma,
                delta: sol.delta,
                iterations: sol.iterations,
                mass_out,
            })
        };
        let outcomes: Vec<StateOutcome> = (0..states)
            .into_par_iter()
            .map(solve_state)
            .collect::<Result<Vec<_>>>()?;

        let mut values = Vec::with_capacity(states);
        let mut g = Vec::with_capacity(states);
        let mut dl = Vec::with_capacity(states);
        for (idx, o) in outcomes.iter().enumerate() {
            let x = xa.point(idx % xa.len);
            if (x - model.x0).abs() <= core {
                diag.truncation_mass = diag.truncation_mass.max(o.mass_out);
            }
            diag.newton_iterations += o.iterations as u64;
            diag.max_newton_iterations = diag.max_newton_iterations.max(o.iterations);
            if o.gamma.abs() >= cfg.gamma_bound * (1.0 - 1e-12) {
                diag.gamma_bound_hits += 1;
            }
            if !cfg.delta_free && o.delta >= cfg.delta_bound * (1.0 - 1e-12) {
                diag.delta_bound_hits += 1;
            }
            values.push(o.value);
            g.push(o.gamma);
            dl.push(o.delta);
        }
        gammas[k] = g;
        deltas[k] = dl;
        x_axes[k] = xa;
        aux_axes[k] = sa;
        if k == 0 {
            root = values[0];
        } else {
            let rows = (0..sa.len)
                .map(|j| Interpolant::new(xa, values[j * xa.len..(j + 1) * xa.len].to_vec(), cfg.interp_order))
                .collect();
            next = Some(Slice {
                x_axis: xa,
                aux_axis: sa,
                rows,
            });
        }
    }

    if !root.is_finite() {
        return Err(Error::Domain(format!("certainty equivalent is not finite ({root})")));
    }
    if diag.truncation_mass > TRUNCATION_WARNING {
        diag.warnings.push(format!(
            "grid truncation mass {:.3e} exceeds {:.0e}; widen the state grid",
            diag.truncation_mass, TRUNCATION_WARNING
        ));
    }
    if diag.gamma_bound_hits > 0 || diag.delta_bound_hits > 0 {
        diag.warnings.push(format!(
            "strategy bounds active at {} (gamma) and {} (delta) states",
            diag.gamma_bound_hits, diag.delta_bound_hits
        ));
    }
    Ok(CertEquivResult {
        c_value: root,
        n,
        lambda,
        policy: HedgePolicySurface {
            x_axes,
            aux_axes,
            gamma: gammas,
            delta: deltas,
        },
        diagnostics: diag,
    })
}

/// `c(n, lambda)` of the zero claim.
pub fn zero_claim_value(
    model: &ModelParams,
    grid: GridSpec,
    lambda: f64,
    friction: &FrictionSchedule,
    cfg: &DpConfig,
) -> Result<CertEquivResult> {
    dp_certainty_equivalent(model, grid, lambda, &PayoffSpec::Constant { value: 0.0 }, friction, cfg)
}

#[derive(Debug, Clone, PartialEq)]
pub struct IndifferenceResult {
    pub pi: f64,
    pub claim: CertEquivResult,
    pub zero: CertEquivResult,
}

/// `pi(n, lambda) = c_f - c_0`.
pub fn indifference_price(
    model: &ModelParams,
    grid: GridSpec,
    lambda: f64,
    payoff: &PayoffSpec,
    friction: &FrictionSchedule,
    cfg: &DpConfig,
) -> Result<IndifferenceResult> {
    let claim = dp_certainty_equivalent(model, grid, lambda, payoff, friction, cfg)?;
    let zero = zero_claim_value(model, grid, lambda, friction, cfg)?;
    Ok(IndifferenceResult {
        pi: claim.c_value - zero.c_value,
        claim,
        zero,
    })
}

/// Minimum of a unimodal `f` on `[a, b]`: `(argmin, min)`.
fn golden_min(f: impl Fn(f64) -> f64, mut a: f64, mut b: f64) -> (f64, f64) {
    let r = (5f64.sqrt() - 1.0) / 2.0;
    let mut c = b - r * (b - a);
    let mut d = a + r * (b - a);
    let (mut fc, mut fd) = (f(c), f(d));
    for _ in 0..160 {
        if fc <= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - r * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + r * (b - a);
            fd = f(d);
        }
    }
    let x = 0.5 * (a + b);
    let fx = f(x);
    if fx <= fc.min(fd) {
        (x, fx)
    } else if fc <= fd {
        (c, fc)
    } else {
        (d, fd)
    }
}

/// One-period certainty equivalent by nested golden-section search over
/// `gamma in [-5, 5]`, `delta in [0, 5]` with a 512-node rule.
pub fn one_period_bruteforce(model: &ModelParams, lambda: f64, payoff: &PayoffSpec, friction: &FrictionSchedule) -> Result<f64> {
    model.validate()?;
    payoff.validate()?;
    if !(lambda > 0.0 && lambda.is_finite()) {
        return Err(invalid("lambda", format!("must be positive, got {lambda}")));
    }
    let quad = GaussHermite::new(512)?;
    let t = model.horizon;
    let h = friction.price(1);
    let mut log_w = Vec::new();
    let (mut a, mut d, mut c) = (Vec::new(), Vec::new(), Vec::new());
    for (z, w) in quad.nodes.iter().zip(&quad.weights) {
        if *w <= 0.0 {
            continue;
        }
        let dx = model.mu * t + model.sigma * t.sqrt() * z;
        let x1 = model.x0 + dx;
        log_w.push(w.ln());
        a.push(payoff.of_state(x1, 0.5 * (model.x0 + x1)));
        d.push(dx);
        c.push(dx.abs().powi(3) - h);
    }
    let p = InnerProblem {
        log_w: &log_w,
        a: &a,
        d: &d,
        c: &c,
        lambda,
    };
    // the partial minimum over gamma is convex in delta, so nested
    // golden-section searches locate the joint minimum of this convex problem
    let profile = |delta: f64| golden_min(|g| p.value(g, delta), -5.0, 5.0).1;
    let (delta, _) = golden_min(profile, 0.0, 5.0);
    let (gamma, _) = golden_min(|g| p.value(g, delta), -5.0, 5.0);
    let best = [p.value(gamma, delta), p.value(gamma, 0.0), profile(0.0)]
        .into_iter()
        .fold(f64::INFINITY, f64::min);
    Ok(best)
}

/// Hedging rule simulated by [`strategy_mc_upper_bound`].
#[derive(Debug, Clone, PartialEq)]
pub enum HedgePolicy {
    Zero,
    Constant { gamma: f64, delta: f64 },
    Surface(HedgePolicySurface),
}

impl HedgePolicy {
    fn at(&self, k: usize, x: f64, aux: f64) -> (f64, f64) {
        match self {
            HedgePolicy::Zero => (0.0, 0.0),
            HedgePolicy::Constant { gamma, delta } => (*gamma, *delta),
            HedgePolicy::Surface(s) => s.at(k, x, aux),
        }
    }
}

/// Monte Carlo value `(1/lambda) log E exp(-lambda (V - f))` of a fixed strategy,
/// an upper bound on `c(n, lambda)` up to sampling error.
pub fn strategy_mc_upper_bound(
    model: &ModelParams,
    grid: GridSpec,
    lambda: f64,
    payoff: &PayoffSpec,
    friction: &FrictionSchedule,
    policy: &HedgePolicy,
    mc: &McConfig,
) -> Result<LogMeanExpEstimate> {
    model.validate()?;
    payoff.validate()?;
    if !(lambda > 0.0 && lambda.is_finite()) {
        return Err(invalid("lambda", format!("must be positive, got {lambda}")));
    }
    if let HedgePolicy::Surface(s) = policy {
        if s.slices() != grid.n {
            return Err(invalid("policy", format!("{} slices for n = {}", s.slices(), grid.n)));
        }
    }
    let n = grid.n;
    let dt = grid.dt(model.horizon);
    let h = friction.price(n);
    let exponents = simulate_paths(mc, |stream| {
        let mut z = stream.normals();
        let (mut x, mut aux, mut wealth) = (model.x0, 0.0, 0.0);
        for k in 0..n {
            let (gamma, delta) = policy.at(k, x, aux);
            let dx = model.mu * dt + model.sigma * z.increment(dt);
            wealth += gamma * dx + delta * (dx.abs().powi(3) - h);
            let x1 = x + dx;
            aux += (x + x1) / (2.0 * n as f64);
            x = x1;
        }
        lambda * (payoff.of_state(x, aux) - wealth)
    })?;
    let samples = if mc.antithetic {
        // pair averages of exp(.) keep the log-mean-exp estimator unbiased in the mean
        exponents
            .chunks_exact(2)
            .map(|p| {
                let m = p[0].max(p[1]);
                m + (0.5 * ((p[0] - m).exp() + (p[1] - m).exp())).ln()
            })
            .collect()
    } else {
        exponents
    };
    let mut out = log_mean_exp("strategy_value", &samples, 1.0 / lambda)?;
    if mc.antithetic {
        out.estimate.n_paths *= 2;
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn model(mu: f64) -> ModelParams {
        ModelParams::new(100.0, 20.0, mu, 1.0).unwrap()
    }

    fn cheap_cfg(m: &ModelParams, p: &PayoffSpec) -> DpConfig {
        DpConfig {
            n_x: 161,
            aux_points: 17,
            ..DpConfig::for_model(m, p)
        }
    }

    fn gaussian_friction(m: &ModelParams) -> FrictionSchedule {
        FrictionSchedule::gaussian_scaled(m, 1.0).unwrap()
    }

    #[test]
    fn inner_newton_matches_closed_form_gaussian() {
        // a_i = 0, no delta leg: min_gamma (1/lambda) log E exp(-lambda gamma dX) with
        // dX ~ N(m, s^2) gives gamma* = m / (lambda s^2), value -m^2 / (2 lambda s^2)
        let quad = GaussHermite::new(32).unwrap();
        let (m, s, lam) = (0.5, 2.0, 0.7);
        let log_w: Vec<f64> = quad.weights.iter().map(|w| w.ln()).collect();
        let d: Vec<f64> = quad.nodes.iter().map(|z| m + s * z).collect();
        let a = vec![0.0; d.len()];
        let c = vec![0.0; d.len()];
        let p = InnerProblem {
            log_w: &log_w,
            a: &a,
            d: &d,
            c: &c,
            lambda: lam,
        };
        let bounds = Bounds {
            gamma: 10.0,
            delta: 10.0,
            delta_free: true,
        };
        let sol = solve_inner(&p, (0.0, 0.0), bounds, 100).unwrap();
        assert!((sol.gamma - m / (lam * s * s)).abs() < 1e-10);
        assert!((sol.value + m * m / (2.0 * lam * s * s)).abs() < 1e-12);
    }

    #[test]
    fn zero_claim_driftless_is_zero() {
        let m = model(0.0);
        let p = PayoffSpec::Constant { value: 0.0 };
        for n in [1, 3] {
            let r = zero_claim_value(&m, GridSpec::new(n).unwrap(), 2.0, &gaussian_friction(&m), &cheap_cfg(&m, &p)).unwrap();
            assert!(r.c_value.abs() < 1e-10, "n={n}: {}", r.c_value);
        }
    }

    #[test]
    fn zero_claim_with_drift_is_nonpositive() {
        let m = model(10.0);
        let p = PayoffSpec::Constant { value: 0.0 };
        let r = zero_claim_value(&m, GridSpec::new(4).unwrap(), 4.0, &gaussian_friction(&m), &cheap_cfg(&m, &p)).unwrap();
        assert!(r.c_value <= 1e-12);
        // Merton-type bound without power options: -mu^2 T / (2 lambda sigma^2)
        assert!(r.c_value >= -10.0 * 10.0 / (2.0 * 4.0 * 400.0) - 1e-3);
    }

    #[test]
    fn constant_claim_prices_at_constant() {
        let m = model(0.0);
        let p = PayoffSpec::Constant { value: 7.5 };
        let r = dp_certainty_equivalent(&m, GridSpec::new(3).unwrap(), 1.0, &p, &gaussian_friction(&m), &cheap_cfg(&m, &p)).unwrap();
        assert!((r.c_value - 7.5).abs() < 1e-10);
    }

    #[test]
    fn linear_claim_is_replicated() {
        let m = model(0.0);
        let p = PayoffSpec::LinearTerminal;
        let f = gaussian_friction(&m);
        for nodes in [16, 24, 64, 128] {
            for n in [1, 4] {
                let cfg = DpConfig {
                    quad_nodes: nodes,
                    ..cheap_cfg(&m, &p)
                };
                let r = dp_certainty_equivalent(&m, GridSpec::new(n).unwrap(), 3.0, &p, &f, &cfg).unwrap();
                assert!((r.c_value - 100.0).abs() < 1e-6, "nodes={nodes} n={n}: {}", r.c_value);
            }
        }
    }

    #[test]
    fn huge_friction_price_switches_off_power_options() {
        let m = model(5.0);
        let p = PayoffSpec::CappedCall { strike: 100.0, cap: 50.0 };
        let cfg = cheap_cfg(&m, &p);
        let grid = GridSpec::new(2).unwrap();
        let fr = FrictionSchedule::new(1e12).unwrap();
        let with = dp_certainty_equivalent(&m, grid, 1.0, &p, &fr, &cfg).unwrap();
        let without = dp_certainty_equivalent(&m, grid, 1.0, &p, &fr, &DpConfig { delta_free: true, ..cfg }).unwrap();
        assert!(with.policy.delta.iter().flatten().all(|d| *d == 0.0));
        assert!((with.c_value - without.c_value).abs() < 1e-8);
    }

    #[test]
    fn monotone_in_risk_aversion() {
        let m = model(0.0);
        let p = PayoffSpec::CappedCall { strike: 100.0, cap: 50.0 };
        let f = gaussian_friction(&m);
        let cfg = cheap_cfg(&m, &p);
        let mut last = f64::NEG_INFINITY;
        for lam in [0.5, 1.0, 2.0, 4.0] {
            let c = dp_certainty_equivalent(&m, GridSpec::new(2).unwrap(), lam, &p, &f, &cfg).unwrap().c_value;
            assert!(c >= last - 1e-9, "lambda {lam}: {c} < {last}");
            last = c;
        }
    }

    #[test]
    fn one_period_bruteforce_trivial_cases() {
        let m = model(0.0);
        let f = gaussian_friction(&m);
        assert!(one_period_bruteforce(&m, 1.0, &PayoffSpec::Constant { value: 0.0 }, &f).unwrap().abs() < 1e-12);
        assert!((one_period_bruteforce(&m, 1.0, &PayoffSpec::Constant { value: 3.0 }, &f).unwrap() - 3.0).abs() < 1e-12);
        assert!((one_period_bruteforce(&m, 1.0, &PayoffSpec::LinearTerminal, &f).unwrap() - 100.0).abs() < 1e-8);
    }

    #[test]
    fn one_period_dp_matches_bruteforce() {
        let m = model(0.0);
        let f = gaussian_friction(&m);
        let p = PayoffSpec::CappedCall { strike: 100.0, cap: 50.0 };
        let dp = dp_certainty_equivalent(&m, GridSpec::new(1).unwrap(), 1.0, &p, &f, &DpConfig::for_model(&m, &p)).unwrap();
        let bf = one_period_bruteforce(&m, 1.0, &p, &f).unwrap();
        assert!((dp.c_value - bf).abs() < 1e-3, "dp {} vs brute force {bf}", dp.c_value);
    }

    #[test]
    fn asian_dp_between_bounds() {
        let m = model(0.0);
        let p = PayoffSpec::CappedAsian { strike: 100.0, cap: 50.0 };
        let f = gaussian_friction(&m);
        let r = dp_certainty_equivalent(&m, GridSpec::new(4).unwrap(), 1.0, &p, &f, &cheap_cfg(&m, &p)).unwrap();
        assert!(r.c_value > 0.0 && r.c_value < 50.0);
    }

    #[test]
    fn policy_lookup_is_flat_outside() {
        let s = HedgePolicySurface {
            x_axes: vec![UniformAxis::new(0.0, 1.0, 2)],
            aux_axes: vec![UniformAxis::new(0.0, 0.0, 1)],
            gamma: vec![vec![0.2, 0.4]],
            delta: vec![vec![0.0, 1.0]],
        };
        assert_eq!(s.at(0, -3.0, 0.0), (0.2, 0.0));
        let (g, d) = s.at(0, 0.5, 0.0);
        assert!((g - 0.3).abs() < 1e-15 && (d - 0.5).abs() < 1e-15);
    }

    #[test]
    fn zero_strategy_on_zero_claim() {
        let m = model(0.0);
        let r = strategy_mc_upper_bound(
            &m,
            GridSpec::new(4).unwrap(),
            1.0,
            &PayoffSpec::Constant { value: 0.0 },
            &FrictionSchedule::default(),
            &HedgePolicy::Zero,
            &McConfig::new(1000, 1, 3),
        )
        .unwrap();
        assert_eq!(r.estimate.mean, 0.0);
    }

    #[test]
    fn config_validation() {
        let m = model(0.0);
        let p = PayoffSpec::CappedCall { strike: 100.0, cap: 50.0 };
        let base = DpConfig::for_model(&m, &p);
        assert!(base.validate(&m).is_ok());
        assert!(DpConfig { x_max: 150.0, ..base }.validate(&m).is_err());
        assert!(DpConfig { quad_nodes: 8, ..base }.validate(&m).is_err());
        assert!(DpConfig { gamma_bound: 0.0, ..base }.validate(&m).is_err());
    }
}
