//! `key = value` experiment files.
//!
//! Blank lines and `#` comments are ignored. Every key may appear once;
//! unknown keys are rejected. Only `x0`, `sigma`, `T` and `payoff` are required.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use indiff_core::discrete::DpConfig;
use indiff_core::dual::{DualKernelSpec, DEFAULT_POLICY_K};
use indiff_core::interp::InterpOrder;
use indiff_core::kernels::{HamiltonianConfig, KernelRule};
use indiff_core::limit::{HjbConfig, HjbScheme};
use indiff_core::{FrictionSchedule, McConfig, ModelParams, PayoffSpec};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("cannot read {path}: {reason}")]
    Io { path: String, reason: String },
    #[error("line {line}: expected `key = value`, got `{text}`")]
    Syntax { line: usize, text: String },
    #[error("line {line}: unknown key `{key}`")]
    UnknownKey { line: usize, key: String },
    #[error("line {line}: key `{key}` given twice")]
    Duplicate { line: usize, key: String },
    #[error("missing required key `{0}`")]
    Missing(&'static str),
    #[error("key `{key}`: expected {expected}, got `{value}`")]
    Invalid {
        key: &'static str,
        expected: &'static str,
        value: String,
    },
    #[error("invalid configuration: {0}")]
    Model(#[from] indiff_core::Error),
}

/// Keys in `--print-config` order.
pub const KEYS: &[&str] = &[
    "x0",
    "sigma",
    "mu",
    "T",
    "payoff",
    "strike",
    "cap",
    "payoff_value",
    "ell",
    "n",
    "c_h",
    "c_h_gaussian",
    "dp_half_width",
    "dp_n_x",
    "dp_aux_points",
    "quad_nodes",
    "interp",
    "gamma_bound",
    "delta_bound",
    "delta_free",
    "hjb_n_x",
    "hjb_n_t",
    "hjb_scheme",
    "y_min",
    "y_max",
    "paths",
    "substeps",
    "seed",
    "antithetic",
    "dual_clamp",
    "dual_policy",
    "policy_k",
    "kernel_substeps",
    "limit_steps",
    "out",
    "surface_out",
];

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum FrictionChoice {
    Absolute(f64),
    /// Multiple of the Gaussian third absolute moment over the whole horizon.
    GaussianMultiple(f64),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum DualPolicyChoice {
    /// HJB maximizer for terminal claims, best band policy for Asian claims.
    Limit,
    Constant(f64),
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub model: ModelParams,
    pub payoff: PayoffSpec,
    pub ells: Vec<f64>,
    pub ns: Vec<usize>,
    pub friction: FrictionChoice,
    pub dp_half_width: f64,
    pub dp_n_x: usize,
    pub dp_aux_points: usize,
    pub quad_nodes: usize,
    pub interp: InterpOrder,
    pub gamma_bound: Option<f64>,
    pub delta_bound: f64,
    pub delta_free: bool,
    pub hjb_n_x: usize,
    pub hjb_n_t: usize,
    pub hjb_scheme: HjbScheme,
    pub y_min: f64,
    pub y_max: f64,
    pub mc: McConfig,
    pub dual_clamp: Option<f64>,
    pub dual_policy: DualPolicyChoice,
    pub policy_k: f64,
    pub kernel_substeps: usize,
    pub limit_steps: usize,
    pub out: Option<PathBuf>,
    pub surface_out: Option<PathBuf>,
}

impl ExperimentConfig {
    pub fn friction_schedule(&self) -> indiff_core::Result<FrictionSchedule> {
        match self.friction {
            FrictionChoice::Absolute(c) => FrictionSchedule::new(c),
            FrictionChoice::GaussianMultiple(k) => FrictionSchedule::gaussian_scaled(&self.model, k),
        }
    }

    pub fn dp_config(&self) -> DpConfig {
        let base = DpConfig::for_model(&self.model, &self.payoff);
        let half = self.dp_half_width * self.model.terminal_std();
        DpConfig {
            x_min: self.model.x0 - half,
            x_max: self.model.x0 + half,
            n_x: self.dp_n_x,
            aux_points: self.dp_aux_points,
            quad_nodes: self.quad_nodes,
            interp_order: self.interp,
            gamma_bound: self.gamma_bound.unwrap_or(base.gamma_bound),
            delta_bound: self.delta_bound,
            delta_free: self.delta_free,
            ..base
        }
    }

    pub fn hjb_config(&self) -> HjbConfig {
        HjbConfig {
            scheme: self.hjb_scheme,
            y_min: self.y_min,
            ..HjbConfig::for_model(&self.model, self.y_max).with_resolution(self.hjb_n_x, self.hjb_n_t)
        }
    }

    pub fn dual_spec(&self) -> DualKernelSpec {
        DualKernelSpec {
            clamp: self.dual_clamp,
            substeps: self.mc.substeps_per_interval,
            rule: KernelRule::Midpoint,
        }
    }

    /// Checks every derived solver configuration.
    pub fn validate(&self) -> Result<(), ConfigError> {
        self.model.validate()?;
        self.payoff.validate()?;
        self.friction_schedule()?;
        self.mc.validate()?;
        self.dp_config().validate(&self.model)?;
        self.hjb_config().validate(&self.model)?;
        self.dual_spec().validate()?;
        HamiltonianConfig::new(1.0, self.model.sigma, self.model.horizon)
            .with_bounds(self.y_min, self.y_max)
            .validate()?;
        if !(self.policy_k >= 1.0) {
            return Err(invalid("policy_k", "a number >= 1", self.policy_k));
        }
        if self.ells.iter().any(|l| !(*l > 0.0) || !l.is_finite()) {
            return Err(ConfigError::Invalid {
                key: "ell",
                expected: "positive numbers",
                value: join(&self.ells),
            });
        }
        Ok(())
    }

    /// Resolved configuration, one `key = value` line per key.
    pub fn dump(&self) -> String {
        let mut s = String::new();
        for key in KEYS {
            let _ = writeln!(s, "{key} = {}", self.value_of(key));
        }
        s
    }

    fn value_of(&self, key: &str) -> String {
        let (strike, cap, value) = payoff_parts(&self.payoff);
        match key {
            "x0" => fmt(self.model.x0),
            "sigma" => fmt(self.model.sigma),
            "mu" => fmt(self.model.mu),
            "T" => fmt(self.model.horizon),
            "payoff" => self.payoff.name().to_string(),
            "strike" => strike.map_or("none".into(), fmt),
            "cap" => cap.map_or("none".into(), fmt),
            "payoff_value" => value.map_or("none".into(), fmt),
            "ell" => join(&self.ells),
            "n" => self.ns.iter().map(|n| n.to_string()).collect::<Vec<_>>().join(","),
            "c_h" => match self.friction {
                FrictionChoice::Absolute(c) => fmt(c),
                FrictionChoice::GaussianMultiple(_) => self.friction_schedule().map_or("none".into(), |f| fmt(f.c_h)),
            },
            "c_h_gaussian" => match self.friction {
                FrictionChoice::Absolute(_) => "none".into(),
                FrictionChoice::GaussianMultiple(k) => fmt(k),
            },
            "dp_half_width" => fmt(self.dp_half_width),
            "dp_n_x" => self.dp_n_x.to_string(),
            "dp_aux_points" => self.dp_aux_points.to_string(),
            "quad_nodes" => self.quad_nodes.to_string(),
            "interp" => match self.interp {
                InterpOrder::Linear => "linear".into(),
                InterpOrder::Cubic => "cubic".into(),
            },
            "gamma_bound" => self.gamma_bound.map_or("auto".into(), fmt),
            "delta_bound" => fmt(self.delta_bound),
            "delta_free" => self.delta_free.to_string(),
            "hjb_n_x" => self.hjb_n_x.to_string(),
            "hjb_n_t" => self.hjb_n_t.to_string(),
            "hjb_scheme" => self.hjb_scheme.name().into(),
            "y_min" => fmt(self.y_min),
            "y_max" => fmt(self.y_max),
            "paths" => self.mc.n_paths.to_string(),
            "substeps" => self.mc.substeps_per_interval.to_string(),
            "seed" => self.mc.master_seed.to_string(),
            "antithetic" => self.mc.antithetic.to_string(),
            "dual_clamp" => self.dual_clamp.map_or("auto".into(), fmt),
            "dual_policy" => match self.dual_policy {
                DualPolicyChoice::Limit => "limit".into(),
                DualPolicyChoice::Constant(y) => format!("constant:{}", fmt(y)),
            },
            "policy_k" => fmt(self.policy_k),
            "kernel_substeps" => self.kernel_substeps.to_string(),
            "limit_steps" => self.limit_steps.to_string(),
            "out" => self.out.as_ref().map_or("none".into(), |p| p.display().to_string()),
            "surface_out" => self.surface_out.as_ref().map_or("none".into(), |p| p.display().to_string()),
            _ => unreachable!("key table out of sync: {key}"),
        }
    }
}

fn payoff_parts(p: &PayoffSpec) -> (Option<f64>, Option<f64>, Option<f64>) {
    match *p {
        PayoffSpec::Constant { value } => (None, None, Some(value)),
        PayoffSpec::LinearTerminal => (None, None, None),
        PayoffSpec::CappedCall { strike, cap }
        | PayoffSpec::CappedPut { strike, cap }
        | PayoffSpec::CappedAsian { strike, cap } => (Some(strike), Some(cap), None),
    }
}

/// Shortest round-trip decimal representation.
pub fn fmt(v: f64) -> String {
    format!("{v}")
}

fn join(v: &[f64]) -> String {
    v.iter().map(|x| fmt(*x)).collect::<Vec<_>>().join(",")
}

fn invalid(key: &'static str, expected: &'static str, value: impl ToString) -> ConfigError {
    ConfigError::Invalid {
        key,
        expected,
        value: value.to_string(),
    }
}

pub fn parse_config(path: &Path) -> Result<ExperimentConfig, ConfigError> {
    let text = std::fs::read_to_string(path).map_err(|e| ConfigError::Io {
        path: path.display().to_string(),
        reason: e.to_string(),
    })?;
    parse_str(&text)
}

pub fn parse_str(text: &str) -> Result<ExperimentConfig, ConfigError> {
    let mut entries: BTreeMap<&'static str, String> = BTreeMap::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let Some((k, v)) = line.split_once('=') else {
            return Err(ConfigError::Syntax {
                line: i + 1,
                text: line.to_string(),
            });
        };
        let k = k.trim();
        let Some(key) = KEYS.iter().copied().find(|known| *known == k) else {
            return Err(ConfigError::UnknownKey {
                line: i + 1,
                key: k.to_string(),
            });
        };
        if entries.insert(key, v.trim().to_string()).is_some() {
            return Err(ConfigError::Duplicate {
                line: i + 1,
                key: key.to_string(),
            });
        }
    }
    build(&entries)
}

struct Entries<'a>(&'a BTreeMap<&'static str, String>);

impl Entries<'_> {
    fn raw(&self, key: &'static str) -> Option<&str> {
        self.0.get(key).map(|s| s.as_str())
    }

    fn f64_req(&self, key: &'static str) -> Result<f64, ConfigError> {
        let v = self.raw(key).ok_or(ConfigError::Missing(key))?;
        parse_f64(key, v)
    }

    fn f64_or(&self, key: &'static str, default: f64) -> Result<f64, ConfigError> {
        self.raw(key).map_or(Ok(default), |v| parse_f64(key, v))
    }

    fn usize_or(&self, key: &'static str, default: usize) -> Result<usize, ConfigError> {
        self.raw(key).map_or(Ok(default), |v| {
            v.parse::<usize>().map_err(|_| invalid(key, "a non-negative integer", v))
        })
    }

    fn bool_or(&self, key: &'static str, default: bool) -> Result<bool, ConfigError> {
        self.raw(key).map_or(Ok(default), |v| match v {
            "true" => Ok(true),
            "false" => Ok(false),
            _ => Err(invalid(key, "`true` or `false`", v)),
        })
    }

    fn path(&self, key: &'static str) -> Option<PathBuf> {
        self.raw(key).filter(|v| *v != "none").map(PathBuf::from)
    }
}

fn parse_f64(key: &'static str, v: &str) -> Result<f64, ConfigError> {
    match v.parse::<f64>() {
        Ok(x) if !x.is_nan() => Ok(x),
        _ => Err(invalid(key, "a decimal number", v)),
    }
}

fn build(map: &BTreeMap<&'static str, String>) -> Result<ExperimentConfig, ConfigError> {
    let e = Entries(map);
    let x0 = e.f64_req("x0")?;
    let sigma = e.f64_req("sigma")?;
    let horizon = e.f64_req("T")?;
    let mu = e.f64_or("mu", 0.0)?;
    let model = ModelParams::new(x0, sigma, mu, horizon)?;

    let kind = e.raw("payoff").ok_or(ConfigError::Missing("payoff"))?;
    let strike = e.f64_or("strike", x0)?;
    let cap = e.f64_or("cap", 50.0)?;
    let payoff = match kind {
        "constant" => PayoffSpec::Constant {
            value: e.f64_or("payoff_value", 0.0)?,
        },
        "linear" => PayoffSpec::LinearTerminal,
        "capped_call" => PayoffSpec::CappedCall { strike, cap },
        "capped_put" => PayoffSpec::CappedPut { strike, cap },
        "capped_asian" => PayoffSpec::CappedAsian { strike, cap },
        other => {
            return Err(invalid(
                "payoff",
                "one of constant, linear, capped_call, capped_put, capped_asian",
                other,
            ))
        }
    };
    if !matches!(payoff, PayoffSpec::Constant { .. }) && e.raw("payoff_value").is_some() {
        return Err(invalid("payoff_value", "no value unless payoff = constant", e.raw("payoff_value").unwrap()));
    }

    let ells = match e.raw("ell") {
        None => vec![0.1, 1.0, 10.0],
        Some(v) => v
            .split(',')
            .map(|s| parse_f64("ell", s.trim()))
            .collect::<Result<Vec<_>, _>>()?,
    };
    if ells.is_empty() {
        return Err(invalid("ell", "a comma-separated list of positive numbers", ""));
    }
    let ns = match e.raw("n") {
        None => vec![4, 8, 16, 32, 64],
        Some(v) => v
            .split(',')
            .map(|s| {
                s.trim()
                    .parse::<usize>()
                    .ok()
                    .filter(|n| *n > 0)
                    .ok_or_else(|| invalid("n", "a comma-separated list of positive integers", v))
            })
            .collect::<Result<Vec<_>, _>>()?,
    };
    if ns.windows(2).any(|w| w[0] >= w[1]) {
        return Err(invalid("n", "a strictly ascending list", e.raw("n").unwrap_or("")));
    }

    let friction = match (e.raw("c_h"), e.raw("c_h_gaussian")) {
        (Some(_), Some(_)) => return Err(invalid("c_h_gaussian", "at most one of c_h and c_h_gaussian", "both set")),
        (_, Some(v)) => FrictionChoice::GaussianMultiple(parse_f64("c_h_gaussian", v)?),
        (Some(v), None) => FrictionChoice::Absolute(parse_f64("c_h", v)?),
        (None, None) => FrictionChoice::Absolute(FrictionSchedule::default().c_h),
    };

    let interp = match e.raw("interp").unwrap_or("cubic") {
        "cubic" => InterpOrder::Cubic,
        "linear" => InterpOrder::Linear,
        other => return Err(invalid("interp", "`cubic` or `linear`", other)),
    };
    let gamma_bound = match e.raw("gamma_bound") {
        None | Some("auto") => None,
        Some(v) => Some(parse_f64("gamma_bound", v)?),
    };
    let hjb_scheme = match e.raw("hjb_scheme").unwrap_or("implicit") {
        "implicit" => HjbScheme::ImplicitPolicyIteration,
        "explicit" => HjbScheme::Explicit,
        other => return Err(invalid("hjb_scheme", "`implicit` or `explicit`", other)),
    };
    let dual_clamp = match e.raw("dual_clamp") {
        None | Some("auto") => None,
        Some("inf") => Some(f64::INFINITY),
        Some(v) => Some(parse_f64("dual_clamp", v)?),
    };
    let dual_policy = match e.raw("dual_policy") {
        None | Some("limit") => DualPolicyChoice::Limit,
        Some(v) => match v.strip_prefix("constant:") {
            Some(y) => DualPolicyChoice::Constant(parse_f64("dual_policy", y)?),
            None => return Err(invalid("dual_policy", "`limit` or `constant:<y>`", v)),
        },
    };
    let defaults = McConfig::default();
    let seed = match e.raw("seed") {
        None => defaults.master_seed,
        Some(v) => v.parse::<u64>().map_err(|_| invalid("seed", "an unsigned 64-bit integer", v))?,
    };
    let mc = McConfig {
        n_paths: e.usize_or("paths", defaults.n_paths)?,
        substeps_per_interval: e.usize_or("substeps", defaults.substeps_per_interval)?,
        master_seed: seed,
        antithetic: e.bool_or("antithetic", false)?,
    };

    let cfg = ExperimentConfig {
        model,
        payoff,
        ells,
        ns,
        friction,
        dp_half_width: e.f64_or("dp_half_width", 8.0)?,
        dp_n_x: e.usize_or("dp_n_x", DpConfig::DEFAULT_N_X)?,
        dp_aux_points: e.usize_or("dp_aux_points", DpConfig::DEFAULT_AUX_POINTS)?,
        quad_nodes: e.usize_or("quad_nodes", DpConfig::DEFAULT_QUAD_NODES)?,
        interp,
        gamma_bound,
        delta_bound: e.f64_or("delta_bound", 10.0)?,
        delta_free: e.bool_or("delta_free", false)?,
        hjb_n_x: e.usize_or("hjb_n_x", HjbConfig::DEFAULT_N_X)?,
        hjb_n_t: e.usize_or("hjb_n_t", HjbConfig::DEFAULT_N_T)?,
        hjb_scheme,
        y_min: e.f64_or("y_min", HamiltonianConfig::DEFAULT_Y_MIN)?,
        y_max: e.f64_or("y_max", HamiltonianConfig::DEFAULT_Y_MAX)?,
        mc,
        dual_clamp,
        dual_policy,
        policy_k: e.f64_or("policy_k", DEFAULT_POLICY_K)?,
        kernel_substeps: e.usize_or("kernel_substeps", 200)?,
        limit_steps: e.usize_or("limit_steps", 64)?,
        out: e.path("out"),
        surface_out: e.path("surface_out"),
    };
    cfg.validate()?;
    Ok(cfg)
}

#[cfg(test)]
mod tests {
    use super::*;

    const MINIMAL: &str = "x0 = 100\nsigma = 20\nT = 1\npayoff = capped_call\n";

    #[test]
    fn minimal_file_gets_defaults() {
        let cfg = parse_str(MINIMAL).unwrap();
        assert_eq!(cfg.ns, vec![4, 8, 16, 32, 64]);
        assert_eq!(cfg.ells, vec![0.1, 1.0, 10.0]);
        assert_eq!(cfg.payoff, PayoffSpec::CappedCall { strike: 100.0, cap: 50.0 });
        assert_eq!(cfg.friction, FrictionChoice::Absolute(1.0));
        assert_eq!(cfg.mc, McConfig::default());
        let dump = cfg.dump();
        assert!(dump.contains("sigma = 20\n"));
        assert!(dump.contains("n = 4,8,16,32,64\n"));
        assert_eq!(dump.lines().count(), KEYS.len());
    }

    #[test]
    fn dump_parses_back() {
        let cfg = parse_str(&format!("{MINIMAL}mu = 3\nc_h_gaussian = 2\nell = 1\n")).unwrap();
        let text: String = cfg
            .dump()
            .lines()
            .filter(|l| !l.ends_with("= none") && !l.starts_with("c_h ="))
            .map(|l| format!("{l}\n"))
            .collect();
        assert_eq!(parse_str(&text).unwrap(), cfg);
    }

    #[test]
    fn comments_and_blank_lines() {
        let cfg = parse_str("# model\nx0 = 100 # spot\n\nsigma=20\nT = 1\npayoff = constant\npayoff_value = 3\n").unwrap();
        assert_eq!(cfg.payoff, PayoffSpec::Constant { value: 3.0 });
    }

    #[test]
    fn unknown_key_is_named() {
        let err = parse_str("x0 = 100\nsgima = 20\n").unwrap_err();
        assert!(err.to_string().contains("`sgima`"), "{err}");
    }

    #[test]
    fn unsorted_n_rejected() {
        let err = parse_str(&format!("{MINIMAL}n = 8,4\n")).unwrap_err();
        assert!(matches!(err, ConfigError::Invalid { key: "n", .. }), "{err}");
        assert!(parse_str(&format!("{MINIMAL}n = 4,4\n")).is_err());
    }

    #[test]
    fn missing_and_malformed() {
        assert!(matches!(parse_str("x0 = 100\nsigma = 20\nT = 1\n"), Err(ConfigError::Missing("payoff"))));
        assert!(matches!(parse_str(&format!("{MINIMAL}paths = many\n")), Err(ConfigError::Invalid { key: "paths", .. })));
        assert!(matches!(parse_str("x0 100\n"), Err(ConfigError::Syntax { line: 1, .. })));
        assert!(matches!(parse_str(&format!("{MINIMAL}x0 = 3\n")), Err(ConfigError::Duplicate { .. })));
        assert!(parse_str(&format!("{MINIMAL}c_h = 1\nc_h_gaussian = 1\n")).is_err());
        assert!(matches!(parse_str("x0 = 100\nsigma = -1\nT = 1\npayoff = linear\n"), Err(ConfigError::Model(_))));
    }
}
