//! Subcommand drivers. Each returns a [`Table`]; a numerical failure keeps the
//! rows already computed and marks the failing row.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::time::Instant;

use indiff_core::discrete::{dp_certainty_equivalent, zero_claim_value};
use indiff_core::dual::{dual_objective, feasible_policy, martingale_diagnostics};
use indiff_core::kernels::{verify_penalty_equality, Branch, KernelChoice};
use indiff_core::limit::{hjb_solve, policy_search, BandFamily, LimitPriceResult};
use indiff_core::policy::VolPolicySpec;
use indiff_core::{GridSpec, McConfig};

use crate::config::{fmt, DualPolicyChoice, ExperimentConfig};
use crate::report::Table;

/// Evaluations allowed to the band-policy search for path-dependent claims.
const POLICY_SEARCH_EVALUATIONS: usize = 40;

#[derive(Debug)]
pub struct RunOutput {
    pub table: Table,
    /// Long-form side output such as the HJB surface.
    pub surface: Option<String>,
    pub warnings: Vec<String>,
}

/// A failed run: the partial table and the error that stopped it.
#[derive(Debug)]
pub struct RunFailure {
    pub output: RunOutput,
    pub error: indiff_core::Error,
}

pub type RunResult = Result<RunOutput, Box<RunFailure>>;

#[derive(Debug, Clone, Copy, Default)]
pub struct RunOptions {
    pub timing: bool,
}

struct Ctx<'a> {
    cfg: &'a ExperimentConfig,
    out: RunOutput,
    limits: BTreeMap<u64, LimitValue>,
}

/// `pi(ell)` together with the feedback rule that attains it.
#[derive(Clone)]
struct LimitValue {
    pi: f64,
    policy: VolPolicySpec,
    scheme: &'static str,
    n_x: Option<usize>,
    n_t: usize,
    residual: Option<f64>,
    solved: Option<LimitPriceResult>,
}

impl<'a> Ctx<'a> {
    fn new(cfg: &'a ExperimentConfig, header: &'static [&'static str]) -> Self {
        Self {
            cfg,
            out: RunOutput {
                table: Table::new(header),
                surface: None,
                warnings: Vec::new(),
            },
            limits: BTreeMap::new(),
        }
    }

    fn fail(mut self, error: indiff_core::Error) -> Box<RunFailure> {
        self.out.table.error = Some(error.to_string());
        Box::new(RunFailure {
            output: self.out,
            error,
        })
    }

    fn limit(&mut self, ell: f64) -> indiff_core::Result<LimitValue> {
        if let Some(v) = self.limits.get(&ell.to_bits()) {
            return Ok(v.clone());
        }
        let cfg = self.cfg;
        let mut v = if cfg.payoff.is_terminal() {
            let hjb = cfg.hjb_config();
            let res = hjb_solve(&cfg.model, ell, &cfg.payoff, &hjb)?;
            LimitValue {
                pi: res.pi_value,
                policy: VolPolicySpec::Surface(res.policy_surface()?),
                scheme: res.scheme.name(),
                n_x: Some(hjb.n_x),
                n_t: hjb.n_t,
                residual: Some(res.max_residual()),
                solved: Some(res),
            }
        } else {
            let family = BandFamily {
                y_min: cfg.y_min,
                ..BandFamily::for_payoff(&cfg.payoff, cfg.y_max)
            };
            let res = policy_search(
                &cfg.model,
                ell,
                &cfg.payoff,
                &family,
                cfg.limit_steps,
                &cfg.mc,
                POLICY_SEARCH_EVALUATIONS,
            )?;
            LimitValue {
                pi: res.best.mean,
                policy: res.best_policy,
                scheme: "policy_search",
                n_x: None,
                n_t: cfg.limit_steps,
                residual: None,
                solved: None,
            }
        };
        // the cache keeps the scalar summary and the policy, not the full solve
        let solved = v.solved.take();
        self.limits.insert(ell.to_bits(), v.clone());
        v.solved = solved;
        Ok(v)
    }

    fn dual_spec_for(&mut self, ell: f64) -> indiff_core::Result<VolPolicySpec> {
        match self.cfg.dual_policy {
            DualPolicyChoice::Constant(y) => Ok(VolPolicySpec::Constant { y }),
            DualPolicyChoice::Limit => Ok(self.limit(ell)?.policy),
        }
    }
}

fn opt(v: Option<f64>) -> String {
    v.map_or("NA".into(), fmt)
}

/// Each `(n, ell)` pair in config order, with `lambda = n * ell`.
fn pairs(cfg: &ExperimentConfig) -> Vec<(usize, f64, f64)> {
    let mut v = Vec::new();
    for &n in &cfg.ns {
        for &ell in &cfg.ells {
            v.push((n, ell, n as f64 * ell));
        }
    }
    v
}

pub const DISCRETE_HEADER: &[&str] = &["n", "lambda", "c_value", "c0", "pi", "runtime_ms", "truncation_mass"];

pub fn price_discrete(cfg: &ExperimentConfig, opts: RunOptions) -> RunResult {
    let mut ctx = Ctx::new(cfg, DISCRETE_HEADER);
    let friction = cfg.friction_schedule().map_err(|e| Ctx::new(cfg, DISCRETE_HEADER).fail(e))?;
    let dp = cfg.dp_config();
    for (n, _, lambda) in pairs(cfg) {
        let start = Instant::now();
        let res = GridSpec::new(n).and_then(|g| {
            let c = dp_certainty_equivalent(&cfg.model, g, lambda, &cfg.payoff, &friction, &dp)?;
            let z = zero_claim_value(&cfg.model, g, lambda, &friction, &dp)?;
            Ok((c, z))
        });
        let (c, z) = match res {
            Ok(v) => v,
            Err(e) => return Err(ctx.fail(e)),
        };
        let ms = start.elapsed().as_secs_f64() * 1e3;
        for w in c.diagnostics.warnings.iter().chain(&z.diagnostics.warnings) {
            ctx.out.warnings.push(format!("n={n} lambda={lambda}: {w}"));
        }
        ctx.out.table.push(vec![
            n.to_string(),
            fmt(lambda),
            fmt(c.c_value),
            fmt(z.c_value),
            fmt(c.c_value - z.c_value),
            if opts.timing { format!("{ms:.1}") } else { "NA".into() },
            fmt(c.diagnostics.truncation_mass.max(z.diagnostics.truncation_mass)),
        ]);
    }
    Ok(ctx.out)
}

pub const LIMIT_HEADER: &[&str] = &["ell", "y_max", "pi_value", "n_x", "n_t", "scheme", "residual"];
pub const SURFACE_HEADER: &str = "ell,t,x,v,y_star";

pub fn price_limit(cfg: &ExperimentConfig, want_surface: bool) -> RunResult {
    let mut ctx = Ctx::new(cfg, LIMIT_HEADER);
    let mut surface = want_surface.then(|| format!("{SURFACE_HEADER}\n"));
    for &ell in &cfg.ells {
        let v = match ctx.limit(ell) {
            Ok(v) => v,
            Err(e) => return Err(ctx.fail(e)),
        };
        ctx.out.table.push(vec![
            fmt(ell),
            fmt(cfg.y_max),
            fmt(v.pi),
            v.n_x.map_or("NA".into(), |n| n.to_string()),
            v.n_t.to_string(),
            v.scheme.into(),
            opt(v.residual),
        ]);
        if let (Some(s), Some(res)) = (surface.as_mut(), &v.solved) {
            let xs = res.xs.points();
            for j in 0..res.times.len {
                let t = res.times.point(j);
                for (i, (vv, y)) in res.value_row(j).iter().zip(res.policy_row(j)).enumerate() {
                    let _ = writeln!(s, "{},{},{},{},{}", fmt(ell), fmt(t), fmt(xs[i]), fmt(*vv), fmt(*y));
                }
            }
        }
    }
    if want_surface && !cfg.payoff.is_terminal() {
        ctx.out.warnings.push("no value surface for a path-dependent payoff".into());
    }
    ctx.out.surface = surface;
    Ok(ctx.out)
}

pub const DUAL_HEADER: &[&str] = &[
    "n",
    "lambda",
    "A",
    "policy_id",
    "value",
    "stderr",
    "payoff_term",
    "penalty_term",
    "third_moment_ok",
];

pub fn dual_bound(cfg: &ExperimentConfig) -> RunResult {
    let mut ctx = Ctx::new(cfg, DUAL_HEADER);
    let friction = cfg.friction_schedule().map_err(|e| Ctx::new(cfg, DUAL_HEADER).fail(e))?;
    let spec = cfg.dual_spec();
    for (n, ell, lambda) in pairs(cfg) {
        let res = ctx.dual_spec_for(ell).and_then(|raw| {
            let policy = feasible_policy(raw, cfg.policy_k, &cfg.model, n, &friction)?;
            let est = dual_objective(&cfg.model, n, lambda, &cfg.payoff, &policy, &spec, &cfg.mc)?;
            let mart = martingale_diagnostics(&cfg.model, n, &policy, &spec, &friction, &cfg.mc)?;
            Ok((est, mart))
        });
        let (est, mart) = match res {
            Ok(v) => v,
            Err(e) => return Err(ctx.fail(e)),
        };
        for w in &est.diagnostics.warnings {
            ctx.out.warnings.push(format!("n={n} lambda={lambda}: {w}"));
        }
        ctx.out.table.push(vec![
            n.to_string(),
            fmt(lambda),
            fmt(est.diagnostics.clamp),
            est.diagnostics.policy_id.clone(),
            fmt(est.value.mean),
            fmt(est.value.stderr),
            fmt(est.payoff_term.mean),
            fmt(est.penalty_term.mean),
            mart.third_moment_ok.to_string(),
        ]);
    }
    Ok(ctx.out)
}

pub const KERNEL_HEADER: &[&str] = &[
    "beta",
    "branch",
    "moment_analytic",
    "moment_mc",
    "moment_stderr",
    "penalty_mc",
    "penalty_stderr",
    "g_of_moment",
    "abs_diff",
];

/// Kernels reported by `kernel-check`.
pub fn kernel_check_cases() -> Vec<KernelChoice> {
    let mut v: Vec<KernelChoice> = [1.5, 2.0, 5.0]
        .iter()
        .map(|&beta| KernelChoice::Kernel {
            beta,
            branch: Branch::Upper,
        })
        .collect();
    v.push(KernelChoice::Zero);
    v.push(KernelChoice::Kernel {
        beta: 1.0,
        branch: Branch::Lower,
    });
    v
}

pub fn kernel_check(cfg: &ExperimentConfig) -> RunResult {
    let mut ctx = Ctx::new(cfg, KERNEL_HEADER);
    let mc = McConfig {
        substeps_per_interval: cfg.kernel_substeps,
        ..cfg.mc
    };
    for kernel in kernel_check_cases() {
        let r = match verify_penalty_equality(kernel, &mc) {
            Ok(r) => r,
            Err(e) => return Err(ctx.fail(e)),
        };
        let (beta, branch) = match kernel {
            KernelChoice::Zero => ("none".to_string(), "zero"),
            KernelChoice::Kernel { beta, branch } => (fmt(beta), branch.name()),
        };
        ctx.out.table.push(vec![
            beta,
            branch.into(),
            fmt(r.moment_analytic),
            fmt(r.moment_mc.mean),
            fmt(r.moment_mc.stderr),
            fmt(r.penalty_mc.mean),
            fmt(r.penalty_mc.stderr),
            fmt(r.g_of_moment),
            fmt(r.penalty_diff),
        ]);
    }
    Ok(ctx.out)
}

pub const CONVERGE_HEADER: &[&str] = &[
    "n",
    "ell",
    "lambda",
    "c_primal",
    "c0",
    "pi_discrete",
    "dual_lb",
    "dual_lb_stderr",
    "pi_limit",
    "gap",
];

pub fn converge(cfg: &ExperimentConfig) -> RunResult {
    let mut ctx = Ctx::new(cfg, CONVERGE_HEADER);
    let friction = cfg.friction_schedule().map_err(|e| Ctx::new(cfg, CONVERGE_HEADER).fail(e))?;
    let dp = cfg.dp_config();
    let spec = cfg.dual_spec();
    for (n, ell, lambda) in pairs(cfg) {
        let res = (|| {
            let grid = GridSpec::new(n)?;
            let c = dp_certainty_equivalent(&cfg.model, grid, lambda, &cfg.payoff, &friction, &dp)?;
            let z = zero_claim_value(&cfg.model, grid, lambda, &friction, &dp)?;
            let limit = ctx.limit(ell)?;
            let raw = ctx.dual_spec_for(ell)?;
            let policy = feasible_policy(raw, cfg.policy_k, &cfg.model, n, &friction)?;
            let dual = dual_objective(&cfg.model, n, lambda, &cfg.payoff, &policy, &spec, &cfg.mc)?;
            Ok((c, z, limit.pi, dual))
        })();
        let (c, z, pi_limit, dual) = match res {
            Ok(v) => v,
            Err(e) => return Err(ctx.fail(e)),
        };
        for w in c
            .diagnostics
            .warnings
            .iter()
            .chain(&z.diagnostics.warnings)
            .chain(&dual.diagnostics.warnings)
        {
            ctx.out.warnings.push(format!("n={n} ell={ell}: {w}"));
        }
        ctx.out.table.push(vec![
            n.to_string(),
            fmt(ell),
            fmt(lambda),
            fmt(c.c_value),
            fmt(z.c_value),
            fmt(c.c_value - z.c_value),
            fmt(dual.value.mean),
            fmt(dual.value.stderr),
            fmt(pi_limit),
            fmt(c.c_value - pi_limit),
        ]);
    }
    Ok(ctx.out)
}
