//! Reproducible Monte Carlo machinery.
//!
//! Every path owns a ChaCha8 stream selected by `(master_seed, stream_id)`, so the
//! draws of a path do not depend on how paths are scheduled across threads.
//! Paths are evaluated in parallel and reduced sequentially in stream order,
//! which makes every estimate bitwise reproducible for any thread count.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;

use crate::error::{invalid, Error, Result};

/// Largest tolerated fraction of paths with non-finite output.
pub const MAX_EXCLUDED_FRACTION: f64 = 1e-3;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct RngStreamSpec {
    pub master_seed: u64,
    pub stream_id: u64,
    /// Antithetic twin: same stream with every normal draw negated.
    pub mirrored: bool,
}

impl RngStreamSpec {
    pub fn new(master_seed: u64, stream_id: u64) -> Self {
        Self {
            master_seed,
            stream_id,
            mirrored: false,
        }
    }

    pub fn mirror(self) -> Self {
        Self {
            mirrored: !self.mirrored,
            ..self
        }
    }

    pub fn normals(&self) -> GaussianStream {
        let mut rng = ChaCha8Rng::seed_from_u64(self.master_seed);
        rng.set_stream(self.stream_id);
        GaussianStream {
            rng,
            sign: if self.mirrored { -1.0 } else { 1.0 },
        }
    }
}

/// Standard normal draws from one stream.
pub struct GaussianStream {
    rng: ChaCha8Rng,
    sign: f64,
}

impl GaussianStream {
    pub fn standard(&mut self) -> f64 {
        let z: f64 = StandardNormal.sample(&mut self.rng);
        self.sign * z
    }

    /// Brownian increment over a step of length `dt`.
    pub fn increment(&mut self, dt: f64) -> f64 {
        self.standard() * dt.sqrt()
    }
}

/// `n_steps` independent `N(0, dt)` increments of the stream.
pub fn brownian_increments(stream: &RngStreamSpec, n_steps: usize, dt: f64) -> Result<Vec<f64>> {
    if n_steps == 0 {
        return Err(invalid("n_steps", "must be at least 1"));
    }
    if !(dt > 0.0 && dt.is_finite()) {
        return Err(invalid("dt", format!("must be positive, got {dt}")));
    }
    let mut g = stream.normals();
    Ok((0..n_steps).map(|_| g.increment(dt)).collect())
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct McConfig {
    pub n_paths: usize,
    pub substeps_per_interval: usize,
    pub master_seed: u64,
    pub antithetic: bool,
}

impl Default for McConfig {
    fn default() -> Self {
        Self {
            n_paths: 100_000,
            substeps_per_interval: 64,
            master_seed: 20_240_601,
            antithetic: false,
        }
    }
}

impl McConfig {
    pub fn new(n_paths: usize, substeps_per_interval: usize, master_seed: u64) -> Self {
        Self {
            n_paths,
            substeps_per_interval,
            master_seed,
            antithetic: false,
        }
    }

    pub fn with_antithetic(self, on: bool) -> Self {
        Self { antithetic: on, ..self }
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_paths == 0 {
            return Err(invalid("paths", "must be at least 1"));
        }
        if self.substeps_per_interval == 0 {
            return Err(invalid("substeps", "must be at least 1"));
        }
        if self.antithetic && self.n_paths < 2 {
            return Err(invalid("paths", "antithetic sampling needs at least 2 paths"));
        }
        Ok(())
    }

    /// Number of independent samples: paths, or antithetic pairs.
    pub fn n_samples(&self) -> usize {
        if self.antithetic {
            self.n_paths / 2
        } else {
            self.n_paths
        }
    }

    pub fn stream(&self, id: u64) -> RngStreamSpec {
        RngStreamSpec::new(self.master_seed, id)
    }
}

/// Sample mean with its standard error.
#[derive(Debug, Clone, PartialEq)]
pub struct Estimate {
    pub label: String,
    pub mean: f64,
    pub stderr: f64,
    /// Number of samples that entered the mean.
    pub n_paths: usize,
    /// Samples dropped for non-finite output.
    pub excluded: usize,
}

impl Estimate {
    pub fn exact(label: impl Into<String>, value: f64) -> Self {
        Self {
            label: label.into(),
            mean: value,
            stderr: 0.0,
            n_paths: 1,
            excluded: 0,
        }
    }

    /// Mean and standard error of finite `samples`.
    pub fn from_samples(label: impl Into<String>, samples: &[f64]) -> Self {
        let mut n = 0usize;
        let mut sum = 0.0;
        for &v in samples.iter().filter(|v| v.is_finite()) {
            n += 1;
            sum += v;
        }
        let mean = if n > 0 { sum / n as f64 } else { f64::NAN };
        let stderr = if n > 1 {
            let ss: f64 = samples
                .iter()
                .filter(|v| v.is_finite())
                .map(|v| (v - mean) * (v - mean))
                .sum();
            (ss / (n - 1) as f64).sqrt() / (n as f64).sqrt()
        } else {
            0.0
        };
        Self {
            label: label.into(),
            mean,
            stderr,
            n_paths: n,
            excluded: samples.len() - n,
        }
    }

    /// `|mean - target| <= k * stderr`.
    pub fn within(&self, target: f64, k: f64) -> bool {
        (self.mean - target).abs() <= k * self.stderr
    }
}

/// Evaluates `f` on every stream of `cfg` (both twins when antithetic) and
/// returns the outputs ordered by stream id.
pub fn simulate_paths<T, F>(cfg: &McConfig, f: F) -> Result<Vec<T>>
where
    T: Send,
    F: Fn(&RngStreamSpec) -> T + Sync,
{
    cfg.validate()?;
    let n = cfg.n_samples() as u64;
    let out = if cfg.antithetic {
        (0..2 * n)
            .into_par_iter()
            .map(|i| {
                let s = cfg.stream(i / 2);
                if i % 2 == 1 {
                    f(&s.mirror())
                } else {
                    f(&s)
                }
            })
            .collect()
    } else {
        (0..n).into_par_iter().map(|i| f(&cfg.stream(i))).collect()
    };
    Ok(out)
}

fn check_exclusions(excluded: usize, total: usize) -> Result<()> {
    if excluded as f64 > MAX_EXCLUDED_FRACTION * total as f64 {
        return Err(Error::TooManyExclusions { excluded, total });
    }
    Ok(())
}

/// Monte Carlo mean of a scalar path functional.
pub fn estimate<F>(label: &str, cfg: &McConfig, f: F) -> Result<Estimate>
where
    F: Fn(&RngStreamSpec) -> f64 + Sync,
{
    let [e] = estimate_many([label], cfg, |s| [f(s)])?;
    Ok(e)
}

/// Monte Carlo means of several functionals computed on the same paths.
///
/// A path whose output has any non-finite component is excluded from every
/// component; more than [`MAX_EXCLUDED_FRACTION`] exclusions is an error.
pub fn estimate_many<const N: usize, F>(labels: [&str; N], cfg: &McConfig, f: F) -> Result<[Estimate; N]>
where
    F: Fn(&RngStreamSpec) -> [f64; N] + Sync,
{
    let raw = simulate_paths(cfg, &f)?;
    let samples: Vec<[f64; N]> = if cfg.antithetic {
        raw.chunks_exact(2)
            .map(|pair| std::array::from_fn(|j| 0.5 * (pair[0][j] + pair[1][j])))
            .collect()
    } else {
        raw
    };
    let total = samples.len();
    let kept: Vec<&[f64; N]> = samples.iter().filter(|s| s.iter().all(|v| v.is_finite())).collect();
    let excluded = total - kept.len();
    check_exclusions(excluded, total)?;
    let per_path = if cfg.antithetic { 2 } else { 1 };
    Ok(std::array::from_fn(|j| {
        let column: Vec<f64> = kept.iter().map(|s| s[j]).collect();
        let mut e = Estimate::from_samples(labels[j], &column);
        e.n_paths *= per_path;
        e.excluded = excluded * per_path;
        e
    }))
}

/// Estimate of `scale * log E[exp(a)]` from samples of `a`.
#[derive(Debug, Clone, PartialEq)]
pub struct LogMeanExpEstimate {
    pub estimate: Estimate,
    /// Jackknife estimate of the bias of the plug-in estimator.
    pub jackknife_bias: f64,
}

pub fn log_mean_exp(label: &str, exponents: &[f64], scale: f64) -> Result<LogMeanExpEstimate> {
    let kept: Vec<f64> = exponents.iter().copied().filter(|v| v.is_finite()).collect();
    let total = exponents.len();
    check_exclusions(total - kept.len(), total)?;
    let n = kept.len();
    if n == 0 {
        return Err(invalid("paths", "no finite samples"));
    }
    let top = kept.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let w: Vec<f64> = kept.iter().map(|a| (a - top).exp()).collect();
    let sum: f64 = w.iter().sum();
    let mean_w = sum / n as f64;
    let theta = top + mean_w.ln();
    let (stderr, bias) = if n > 1 {
        let var = w.iter().map(|v| (v - mean_w) * (v - mean_w)).sum::<f64>() / (n - 1) as f64;
        let se = var.sqrt() / (n as f64).sqrt() / mean_w;
        let loo_mean = w
            .iter()
            .map(|wi| {
                let rest = (sum - wi).max(f64::MIN_POSITIVE);
                top + (rest / (n - 1) as f64).ln()
            })
            .sum::<f64>()
            / n as f64;
        (se, (n - 1) as f64 * (loo_mean - theta))
    } else {
        (0.0, 0.0)
    };
    Ok(LogMeanExpEstimate {
        estimate: Estimate {
            label: label.to_string(),
            mean: scale * theta,
            stderr: scale.abs() * stderr,
            n_paths: n,
            excluded: total - n,
        },
        jackknife_bias: scale * bias,
    })
}
