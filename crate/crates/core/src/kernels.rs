//! Volatility penalty `g`, its Hamiltonian, and the optimal drift kernels.
//!
//! On an interval `[t1, t2]` a mean-zero drift `psi` added to a Brownian motion
//! changes the normalized second moment `r = E(dW + int psi)^2 / (t2 - t1)` and
//! costs `E int psi^2 >= g(r)`. The kernels below attain the bound:
//!
//! * upper branch (`r > 1`), `beta > 1`:
//!   `theta_t = int_{t1}^t (beta (t2 - t1) - (t2 - s))^{-1} dW_s`, with `r = beta / (beta - 1)`;
//! * lower branch (`r < 1`), `beta > 0`:
//!   `vartheta_t = -int_{t1}^t (beta (t2 - t1) + (t2 - s))^{-1} dW_s`, with `r = beta / (beta + 1)`.

use crate::error::{invalid, Error, Result};
use crate::mc::{estimate_many, Estimate, McConfig, RngStreamSpec};

/// `g(y) = y - log y - 1` without domain checks.
#[inline]
pub fn penalty(y: f64) -> f64 {
    y - y.ln() - 1.0
}

/// `g(y) = y - log y - 1` for `y > 0`.
pub fn g_eval(y: f64) -> Result<f64> {
    if !(y > 0.0) || !y.is_finite() {
        return Err(Error::Domain(format!("g is defined for 0 < y < inf, got {y}")));
    }
    Ok(penalty(y))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Branch {
    /// `theta`, raises the local variance.
    Upper,
    /// `vartheta`, lowers it.
    Lower,
}

impl Branch {
    pub fn name(&self) -> &'static str {
        match self {
            Branch::Upper => "theta",
            Branch::Lower => "vartheta",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum BetaBar {
    Kernel { beta: f64, branch: Branch },
    /// `r = 1`: the zero kernel is optimal since `g(1) = 0`.
    NoKernel,
}

/// Kernel parameter reproducing the normalized second moment `r`.
pub fn beta_bar(r: f64) -> Result<BetaBar> {
    if !(r > 0.0) || !r.is_finite() {
        return Err(Error::Domain(format!("moment ratio must be positive, got {r}")));
    }
    if r == 1.0 {
        return Ok(BetaBar::NoKernel);
    }
    let beta = r / (r - 1.0).abs();
    let branch = if r > 1.0 { Branch::Upper } else { Branch::Lower };
    Ok(BetaBar::Kernel { beta, branch })
}

/// Normalized second moment produced by a kernel.
pub fn kernel_second_moment_analytic(beta: f64, branch: Branch) -> Result<f64> {
    check_beta(beta, branch)?;
    Ok(match branch {
        Branch::Upper => beta / (beta - 1.0),
        Branch::Lower => beta / (beta + 1.0),
    })
}

fn check_beta(beta: f64, branch: Branch) -> Result<()> {
    let ok = match branch {
        Branch::Upper => beta > 1.0,
        Branch::Lower => beta > 0.0,
    };
    if !ok || beta.is_nan() {
        return Err(Error::Domain(format!(
            "{} kernel requires beta > {}, got {beta}",
            branch.name(),
            if branch == Branch::Upper { 1 } else { 0 }
        )));
    }
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KernelParams {
    pub beta: f64,
    pub branch: Branch,
    pub t1: f64,
    pub t2: f64,
}

impl KernelParams {
    pub fn new(beta: f64, branch: Branch, t1: f64, t2: f64) -> Result<Self> {
        check_beta(beta, branch)?;
        if !(t2 > t1) || t1 < 0.0 {
            return Err(Error::Domain(format!("need 0 <= t1 < t2, got [{t1}, {t2}]")));
        }
        Ok(Self { beta, branch, t1, t2 })
    }

    pub fn len(&self) -> f64 {
        self.t2 - self.t1
    }

    /// Deterministic integrand of the kernel's stochastic integral at time `s`.
    #[inline]
    pub fn integrand(&self, s: f64) -> f64 {
        kernel_integrand(self.beta, self.branch, self.len(), self.t2 - s)
    }

    /// Substep grid, graded toward the end where the integrand peaks when the
    /// kernel is close to singular.
    pub fn substep_grid(&self, substeps: usize) -> SubstepGrid {
        let l = self.len();
        match self.branch {
            // peak 1/((beta-1) l) at s = t1
            Branch::Upper if self.beta < 1.25 => {
                SubstepGrid::graded(self.t1, self.t2, substeps, (self.beta - 1.0) * l, true)
            }
            // peak 1/(beta l) at s = t2
            Branch::Lower if self.beta < 0.25 => {
                SubstepGrid::graded(self.t1, self.t2, substeps, self.beta * l, false)
            }
            _ => SubstepGrid::uniform(self.t1, self.t2, substeps),
        }
    }
}

/// Kernel integrand on an interval of length `len` with `remaining = t2 - s`.
#[inline]
pub(crate) fn kernel_integrand(beta: f64, branch: Branch, len: f64, remaining: f64) -> f64 {
    match branch {
        Branch::Upper => 1.0 / (beta * len - remaining),
        Branch::Lower => -1.0 / (beta * len + remaining),
    }
}

/// Knots `t1 = s_0 < ... < s_m = t2` of the inner Euler scheme.
#[derive(Debug, Clone, PartialEq)]
pub struct SubstepGrid {
    pub knots: Vec<f64>,
}

impl SubstepGrid {
    pub fn uniform(t1: f64, t2: f64, m: usize) -> Self {
        let m = m.max(1);
        let mut knots: Vec<f64> = (0..=m).map(|j| t1 + (t2 - t1) * j as f64 / m as f64).collect();
        knots[m] = t2;
        Self { knots }
    }

    /// Geometric cells growing away from one end; the smallest cell is about
    /// `scale / 8` (never more than a uniform cell).
    pub fn graded(t1: f64, t2: f64, m: usize, scale: f64, dense_at_start: bool) -> Self {
        let m = m.max(1);
        let l = t2 - t1;
        let first = (scale / 8.0).min(l / m as f64);
        if m == 1 || first >= l / m as f64 {
            return Self::uniform(t1, t2, m);
        }
        // solve first * (q^m - 1) / (q - 1) = l for q > 1
        let total = |q: f64| first * (q.powi(m as i32) - 1.0) / (q - 1.0);
        let (mut lo, mut hi) = (1.0 + 1e-12, 2.0);
        while total(hi) < l {
            hi *= 2.0;
        }
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if total(mid) < l {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        let q = 0.5 * (lo + hi);
        let mut cells: Vec<f64> = (0..m).map(|j| first * q.powi(j as i32)).collect();
        let sum: f64 = cells.iter().sum();
        for c in &mut cells {
            *c *= l / sum;
        }
        if !dense_at_start {
            cells.reverse();
        }
        let mut knots = Vec::with_capacity(m + 1);
        let mut t = t1;
        knots.push(t);
        for c in &cells {
            t += c;
            knots.push(t);
        }
        knots[m] = t2;
        Self { knots }
    }

    pub fn substeps(&self) -> usize {
        self.knots.len() - 1
    }

    pub fn widths(&self) -> impl Iterator<Item = f64> + '_ {
        self.knots.windows(2).map(|w| w[1] - w[0])
    }
}

/// Discretization of the kernel integrals.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum KernelRule {
    /// Integrand at the left knot; time integrals by left Riemann sums.
    EulerLeft,
    /// Integrand at the substep midpoint; time integrals by the trapezoid rule.
    Midpoint,
}

impl KernelRule {
    #[inline]
    pub(crate) fn eval_point(&self, s0: f64, s1: f64) -> f64 {
        match self {
            KernelRule::EulerLeft => s0,
            KernelRule::Midpoint => 0.5 * (s0 + s1),
        }
    }

    /// Contribution of one substep to `int f(psi) ds` from the knot values.
    #[inline]
    pub(crate) fn time_weight(&self, left: f64, right: f64, width: f64) -> f64 {
        match self {
            KernelRule::EulerLeft => left * width,
            KernelRule::Midpoint => 0.5 * (left + right) * width,
        }
    }
}

/// Kernel values at the substep knots.
#[derive(Debug, Clone, PartialEq)]
pub struct KernelPath {
    pub times: Vec<f64>,
    pub values: Vec<f64>,
}

/// Kernel path driven by the Brownian `increments` over `grid`.
pub fn simulate_kernel(
    params: &KernelParams,
    grid: &SubstepGrid,
    increments: &[f64],
    rule: KernelRule,
) -> Result<KernelPath> {
    if increments.len() != grid.substeps() {
        return Err(invalid(
            "increments",
            format!("{} increments for {} substeps", increments.len(), grid.substeps()),
        ));
    }
    let (a, b) = (grid.knots[0], *grid.knots.last().unwrap());
    if (a - params.t1).abs() > 1e-12 * (1.0 + a.abs()) || (b - params.t2).abs() > 1e-12 * (1.0 + b.abs()) {
        return Err(invalid("grid", "substep grid must cover exactly [t1, t2]"));
    }
    let mut values = Vec::with_capacity(increments.len() + 1);
    let mut psi = 0.0;
    values.push(psi);
    for (w, dw) in grid.knots.windows(2).zip(increments) {
        psi += params.integrand(rule.eval_point(w[0], w[1])) * dw;
        values.push(psi);
    }
    Ok(KernelPath {
        times: grid.knots.clone(),
        values,
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum KernelChoice {
    Zero,
    Kernel { beta: f64, branch: Branch },
}

impl KernelChoice {
    pub fn analytic_moment(&self) -> Result<f64> {
        match *self {
            KernelChoice::Zero => Ok(1.0),
            KernelChoice::Kernel { beta, branch } => kernel_second_moment_analytic(beta, branch),
        }
    }
}

/// Monte Carlo check of the penalty bound for one kernel.
#[derive(Debug, Clone, PartialEq)]
pub struct PenaltyBoundReport {
    pub kernel: KernelChoice,
    pub perturbation: f64,
    pub moment_analytic: f64,
    pub moment_mc: Estimate,
    pub penalty_mc: Estimate,
    /// `g` at the analytic moment.
    pub g_of_moment: f64,
    /// `g` at the simulated moment, with a delta-method standard error.
    pub g_of_moment_mc: Estimate,
    /// `|penalty_mc - g_of_moment|`.
    pub penalty_diff: f64,
    /// `|moment_mc - moment_analytic|`.
    pub moment_diff: f64,
}

/// Simulates `psi + eps (W_s - W_{t1})` on `[0, 1]` and returns the normalized
/// second moment and the penalty `int psi^2` of one path.
pub fn penalty_bound_sample(
    kernel: &KernelChoice,
    perturbation: f64,
    grid: &SubstepGrid,
    rule: KernelRule,
    stream: &RngStreamSpec,
) -> [f64; 2] {
    let params = match *kernel {
        KernelChoice::Kernel { beta, branch } => Some(KernelParams { beta, branch, t1: 0.0, t2: 1.0 }),
        KernelChoice::Zero => None,
    };
    let mut g = stream.normals();
    let (mut psi, mut w) = (0.0, 0.0);
    let (mut int_psi, mut int_psi2) = (0.0, 0.0);
    for k in grid.knots.windows(2) {
        let ds = k[1] - k[0];
        let dw = g.increment(ds);
        let left = psi + perturbation * w;
        if let Some(p) = &params {
            psi += p.integrand(rule.eval_point(k[0], k[1])) * dw;
        }
        w += dw;
        let right = psi + perturbation * w;
        int_psi += rule.time_weight(left, right, ds);
        int_psi2 += rule.time_weight(left * left, right * right, ds);
    }
    let total = w + int_psi;
    [total * total, int_psi2]
}

pub fn penalty_bound_report(kernel: KernelChoice, perturbation: f64, mc: &McConfig, rule: KernelRule) -> Result<PenaltyBoundReport> {
    let moment_analytic = kernel.analytic_moment()?;
    let grid = match kernel {
        KernelChoice::Kernel { beta, branch } => {
            KernelParams::new(beta, branch, 0.0, 1.0)?.substep_grid(mc.substeps_per_interval)
        }
        KernelChoice::Zero => SubstepGrid::uniform(0.0, 1.0, mc.substeps_per_interval),
    };
    let [moment_mc, penalty_mc] = estimate_many(["moment", "penalty"], mc, |s| {
        penalty_bound_sample(&kernel, perturbation, &grid, rule, s)
    })?;
    let g_of_moment = penalty(moment_analytic);
    let g_mc = penalty(moment_mc.mean);
    let g_of_moment_mc = Estimate {
        label: "g(moment)".into(),
        mean: g_mc,
        stderr: (1.0 - 1.0 / moment_mc.mean).abs() * moment_mc.stderr,
        n_paths: moment_mc.n_paths,
        excluded: moment_mc.excluded,
    };
    Ok(PenaltyBoundReport {
        kernel,
        perturbation,
        moment_analytic,
        penalty_diff: (penalty_mc.mean - g_of_moment).abs(),
        moment_diff: (moment_mc.mean - moment_analytic).abs(),
        moment_mc,
        penalty_mc,
        g_of_moment,
        g_of_moment_mc,
    })
}

/// Equality check of the penalty bound at the optimal kernel.
pub fn verify_penalty_equality(kernel: KernelChoice, mc: &McConfig) -> Result<PenaltyBoundReport> {
    penalty_bound_report(kernel, 0.0, mc, KernelRule::Midpoint)
}

/// Pointwise volatility control in the limit problem.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HamiltonianConfig {
    pub ell: f64,
    pub sigma: f64,
    pub horizon: f64,
    pub y_min: f64,
    pub y_max: f64,
}

impl HamiltonianConfig {
    pub const DEFAULT_Y_MIN: f64 = 1e-4;
    pub const DEFAULT_Y_MAX: f64 = 25.0;

    pub fn new(ell: f64, sigma: f64, horizon: f64) -> Self {
        Self {
            ell,
            sigma,
            horizon,
            y_min: Self::DEFAULT_Y_MIN,
            y_max: Self::DEFAULT_Y_MAX,
        }
    }

    pub fn with_bounds(self, y_min: f64, y_max: f64) -> Self {
        Self { y_min, y_max, ..self }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.ell > 0.0 && self.ell.is_finite()) {
            return Err(invalid("ell", format!("must be positive, got {}", self.ell)));
        }
        if !(self.sigma > 0.0 && self.horizon > 0.0) {
            return Err(invalid("sigma", "sigma and T must be positive"));
        }
        if !(self.y_min > 0.0 && self.y_min <= 1.0 && self.y_max >= 1.0 && self.y_max.is_finite()) {
            return Err(invalid(
                "y_min",
                format!("need 0 < y_min <= 1 <= y_max < inf, got [{}, {}]", self.y_min, self.y_max),
            ));
        }
        Ok(())
    }

    /// Objective `sigma^2 y gamma / 2 - g(y) / (2 ell T)` at a given `y`.
    #[inline]
    pub fn objective(&self, gamma: f64, y: f64) -> f64 {
        0.5 * self.sigma * self.sigma * y * gamma - penalty(y) / (2.0 * self.ell * self.horizon)
    }
}

/// `max_{y in [y_min, y_max]} { sigma^2 y gamma / 2 - g(y) / (2 ell T) }` and its maximizer.
pub fn hamiltonian(gamma: f64, cfg: &HamiltonianConfig) -> (f64, f64) {
    let slope = cfg.ell * cfg.horizon * cfg.sigma * cfg.sigma * gamma;
    let y = if slope < 1.0 {
        (1.0 / (1.0 - slope)).clamp(cfg.y_min, cfg.y_max)
    } else {
        cfg.y_max
    };
    (cfg.objective(gamma, y), y)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn g_examples() {
        assert_eq!(g_eval(1.0).unwrap(), 0.0);
        let e = std::f64::consts::E;
        assert!((g_eval(e).unwrap() - (e - 2.0)).abs() < 1e-15);
        // log 2 - 1/2 = 0.19314718055994530942 (high-precision reference)
        assert!((g_eval(0.5).unwrap() - 0.193_147_180_559_945_3).abs() < 1e-15);
        assert!(g_eval(0.0).is_err());
        assert!(g_eval(-1.0).is_err());
    }

    #[test]
    fn beta_bar_examples() {
        assert_eq!(beta_bar(2.0).unwrap(), BetaBar::Kernel { beta: 2.0, branch: Branch::Upper });
        assert_eq!(beta_bar(0.5).unwrap(), BetaBar::Kernel { beta: 1.0, branch: Branch::Lower });
        assert_eq!(beta_bar(1.0).unwrap(), BetaBar::NoKernel);
        assert!(beta_bar(0.0).is_err());
    }

    #[test]
    fn beta_bar_inverts_moment_identity() {
        for r in [0.1, 0.5, 0.9, 1.1, 2.0, 7.0] {
            match beta_bar(r).unwrap() {
                BetaBar::Kernel { beta, branch } => {
                    let back = kernel_second_moment_analytic(beta, branch).unwrap();
                    assert!((back - r).abs() < 1e-13);
                }
                BetaBar::NoKernel => unreachable!(),
            }
        }
    }

    #[test]
    fn analytic_moment_examples() {
        assert_eq!(kernel_second_moment_analytic(2.0, Branch::Upper).unwrap(), 2.0);
        assert_eq!(kernel_second_moment_analytic(1.0, Branch::Lower).unwrap(), 0.5);
        let big = kernel_second_moment_analytic(1e9, Branch::Upper).unwrap();
        assert!((big - 1.0).abs() < 1e-8);
        assert!(kernel_second_moment_analytic(1.0, Branch::Upper).is_err());
        assert!(kernel_second_moment_analytic(0.0, Branch::Lower).is_err());
    }

    #[test]
    fn kernel_param_validation() {
        assert!(KernelParams::new(0.9, Branch::Upper, 0.0, 1.0).is_err());
        assert!(KernelParams::new(0.5, Branch::Lower, 0.0, 1.0).is_ok());
        assert!(KernelParams::new(2.0, Branch::Upper, 1.0, 1.0).is_err());
    }

    #[test]
    fn kernel_starts_at_zero() {
        for branch in [Branch::Upper, Branch::Lower] {
            let p = KernelParams::new(2.0, branch, 0.3, 0.8).unwrap();
            let grid = p.substep_grid(10);
            let path = simulate_kernel(&p, &grid, &[0.1; 10], KernelRule::EulerLeft).unwrap();
            assert_eq!(path.values[0], 0.0);
            assert_eq!(path.times[0], 0.3);
        }
    }

    #[test]
    fn single_euler_step() {
        // integrand at s = 0: (2 * 1 - (1 - 0))^{-1} = 1
        let p = KernelParams::new(2.0, Branch::Upper, 0.0, 1.0).unwrap();
        let grid = SubstepGrid::uniform(0.0, 1.0, 1);
        let path = simulate_kernel(&p, &grid, &[1.0], KernelRule::EulerLeft).unwrap();
        assert_eq!(path.values, vec![0.0, 1.0]);
    }

    #[test]
    fn increments_must_match_grid() {
        let p = KernelParams::new(2.0, Branch::Upper, 0.0, 1.0).unwrap();
        let grid = SubstepGrid::uniform(0.0, 1.0, 4);
        assert!(simulate_kernel(&p, &grid, &[1.0; 3], KernelRule::Midpoint).is_err());
        let off = SubstepGrid::uniform(0.0, 2.0, 4);
        assert!(simulate_kernel(&p, &off, &[1.0; 4], KernelRule::Midpoint).is_err());
    }

    #[test]
    fn graded_grids_cover_interval() {
        let up = KernelParams::new(1.05, Branch::Upper, 0.0, 1.0).unwrap().substep_grid(50);
        let w: Vec<f64> = up.widths().collect();
        assert_eq!(up.knots[0], 0.0);
        assert_eq!(*up.knots.last().unwrap(), 1.0);
        assert!(w[0] < w[49]);
        let down = KernelParams::new(0.1, Branch::Lower, 0.0, 1.0).unwrap().substep_grid(50);
        let w: Vec<f64> = down.widths().collect();
        assert!(w[0] > w[49]);
        assert!(down.knots.windows(2).all(|k| k[1] > k[0]));
    }

    #[test]
    fn zero_kernel_report() {
        let r = verify_penalty_equality(KernelChoice::Zero, &McConfig::new(20_000, 8, 1)).unwrap();
        assert_eq!(r.penalty_mc.mean, 0.0);
        assert_eq!(r.g_of_moment, 0.0);
        assert_eq!(r.moment_analytic, 1.0);
        assert!(r.moment_mc.within(1.0, 3.0));
    }

    fn golden_max(f: impl Fn(f64) -> f64, mut a: f64, mut b: f64) -> f64 {
        let phi = (5f64.sqrt() - 1.0) / 2.0;
        for _ in 0..200 {
            let c = b - phi * (b - a);
            let d = a + phi * (b - a);
            if f(c) > f(d) {
                b = d;
            } else {
                a = c;
            }
        }
        f(0.5 * (a + b))
    }

    // 2000-point log-spaced scan followed by golden-section refinement
    fn brute_force_hamiltonian(gamma: f64, cfg: &HamiltonianConfig) -> f64 {
        let (la, lb) = (cfg.y_min.ln(), cfg.y_max.ln());
        let ys: Vec<f64> = (0..2000).map(|i| (la + (lb - la) * i as f64 / 1999.0).exp()).collect();
        let best = (0..ys.len())
            .max_by(|&i, &j| cfg.objective(gamma, ys[i]).total_cmp(&cfg.objective(gamma, ys[j])))
            .unwrap();
        let lo = ys[best.saturating_sub(1)];
        let hi = ys[(best + 1).min(ys.len() - 1)];
        golden_max(|y| cfg.objective(gamma, y), lo, hi).max(cfg.objective(gamma, ys[best]))
    }

    #[test]
    fn hamiltonian_examples() {
        let cfg = HamiltonianConfig::new(1.0, 20.0, 1.0);
        assert_eq!(hamiltonian(0.0, &cfg), (0.0, 1.0));
        let (v, y) = hamiltonian(-10.0, &cfg);
        assert!((y - 1.0 / 4001.0).abs() < 1e-15);
        assert!((v - brute_force_hamiltonian(-10.0, &cfg)).abs() < 1e-8);
        let (v, y) = hamiltonian(-1000.0, &cfg);
        assert_eq!(y, cfg.y_min);
        assert!((v - brute_force_hamiltonian(-1000.0, &cfg)).abs() < 1e-8);
        // l T sigma^2 gamma = 400 * 0.01 >= 1
        let (v, y) = hamiltonian(0.01, &cfg);
        assert_eq!(y, cfg.y_max);
        assert!((v - brute_force_hamiltonian(0.01, &cfg)).abs() < 1e-8);
    }

    #[test]
    fn hamiltonian_envelope_matches_brute_force() {
        let cfg = HamiltonianConfig::new(0.3, 2.0, 1.5);
        let gammas: Vec<f64> = (0..200).map(|i| -3.0 + 6.0 * i as f64 / 199.0).collect();
        let values: Vec<f64> = gammas.iter().map(|&g| hamiltonian(g, &cfg).0).collect();
        for (g, v) in gammas.iter().zip(&values) {
            assert!((v - brute_force_hamiltonian(*g, &cfg)).abs() < 1e-8, "gamma {g}");
        }
        for w in values.windows(2) {
            assert!(w[1] >= w[0] - 1e-12);
        }
        for w in values.windows(3) {
            assert!(w[0] + w[2] - 2.0 * w[1] >= -1e-10, "not convex");
        }
    }

    proptest! {
        #[test]
        fn g_chord_inequality(a in 1e-3f64..25.0, b in 1e-3f64..25.0, c in 1e-3f64..25.0) {
            let mut v = [a, b, c];
            v.sort_by(f64::total_cmp);
            let [y1, y2, y3] = v;
            prop_assume!(y3 - y1 > 1e-9);
            let w = (y3 - y2) / (y3 - y1);
            let chord = w * penalty(y1) + (1.0 - w) * penalty(y3);
            prop_assert!(penalty(y2) <= chord + 1e-12);
        }

        #[test]
        fn g_lower_bounds(y in 1e-6f64..1e3) {
            prop_assert!(penalty(y) >= 0.0);
            prop_assert!(penalty(y) >= y / 2.0 - 1.0);
        }
    }
}
