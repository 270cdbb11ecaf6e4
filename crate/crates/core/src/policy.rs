//! Feedback rules for the normalized variance `y = nu / sigma^2`.

use crate::error::{invalid, Result};
use crate::interp::UniformAxis;

/// Which observable a band policy reacts to.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BandState {
    /// Current price.
    Price,
    /// Projected average `(int_0^t X ds + (T - t) x) / T`.
    ProjectedAverage,
}

/// `y*(t, x)` tabulated on a uniform time-price grid, bilinear in between and
/// flat outside.
#[derive(Debug, Clone, PartialEq)]
pub struct PolicySurface {
    pub times: UniformAxis,
    pub xs: UniformAxis,
    /// Row-major, one row of `xs.len` values per time.
    pub values: Vec<f64>,
}

impl PolicySurface {
    pub fn new(times: UniformAxis, xs: UniformAxis, values: Vec<f64>) -> Result<Self> {
        if values.len() != times.len * xs.len {
            return Err(invalid(
                "policy_surface",
                format!("{} values for a {}x{} grid", values.len(), times.len, xs.len),
            ));
        }
        if values.iter().any(|v| !(*v > 0.0) || !v.is_finite()) {
            return Err(invalid("policy_surface", "values must be positive and finite"));
        }
        Ok(Self { times, xs, values })
    }

    fn row_eval(&self, row: usize, x: f64) -> f64 {
        let r = &self.values[row * self.xs.len..(row + 1) * self.xs.len];
        if self.xs.len == 1 {
            return r[0];
        }
        let x = x.clamp(self.xs.lo, self.xs.hi);
        let (i, s) = self.xs.locate(x);
        let s = s.clamp(0.0, 1.0);
        r[i] + s * (r[i + 1] - r[i])
    }

    pub fn eval(&self, t: f64, x: f64) -> f64 {
        if self.times.len == 1 {
            return self.row_eval(0, x);
        }
        let t = t.clamp(self.times.lo, self.times.hi);
        let (j, s) = self.times.locate(t);
        let s = s.clamp(0.0, 1.0);
        let a = self.row_eval(j, x);
        let b = self.row_eval(j + 1, x);
        a + s * (b - a)
    }
}

/// Normalized-variance feedback rule.
#[derive(Debug, Clone, PartialEq)]
pub enum VolPolicySpec {
    Constant { y: f64 },
    /// `y_inner` while the observed state lies in `[lo, hi]`, `y_outer` outside.
    Band {
        y_inner: f64,
        y_outer: f64,
        lo: f64,
        hi: f64,
        state: BandState,
    },
    Surface(PolicySurface),
}

/// Observation available to a feedback rule at a decision time.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PolicyInput {
    pub t: f64,
    pub x: f64,
    /// `int_0^t X_s ds` along the observed path.
    pub running_integral: f64,
    pub horizon: f64,
}

impl VolPolicySpec {
    pub fn id(&self) -> String {
        match self {
            VolPolicySpec::Constant { y } => format!("const:{y}"),
            VolPolicySpec::Band {
                y_inner,
                y_outer,
                lo,
                hi,
                state,
            } => {
                let tag = match state {
                    BandState::Price => "band",
                    BandState::ProjectedAverage => "avgband",
                };
                format!("{tag}:{y_inner}:{y_outer}:{lo}:{hi}")
            }
            VolPolicySpec::Surface(s) => format!("hjb:{}x{}", s.times.len, s.xs.len),
        }
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            VolPolicySpec::Constant { y } => {
                if !(*y > 0.0 && y.is_finite()) {
                    return Err(invalid("policy", format!("variance ratio must be positive, got {y}")));
                }
            }
            VolPolicySpec::Band {
                y_inner,
                y_outer,
                lo,
                hi,
                ..
            } => {
                if !(*y_inner > 0.0 && *y_outer > 0.0 && y_inner.is_finite() && y_outer.is_finite()) {
                    return Err(invalid("policy", "band levels must be positive"));
                }
                if !(lo <= hi) {
                    return Err(invalid("policy", format!("band [{lo}, {hi}] is empty")));
                }
            }
            VolPolicySpec::Surface(_) => {}
        }
        Ok(())
    }

    /// Unclipped normalized variance.
    pub fn raw(&self, input: &PolicyInput) -> f64 {
        match self {
            VolPolicySpec::Constant { y } => *y,
            VolPolicySpec::Band {
                y_inner,
                y_outer,
                lo,
                hi,
                state,
            } => {
                let s = match state {
                    BandState::Price => input.x,
                    BandState::ProjectedAverage => {
                        (input.running_integral + (input.horizon - input.t) * input.x) / input.horizon
                    }
                };
                if s >= *lo && s <= *hi {
                    *y_inner
                } else {
                    *y_outer
                }
            }
            VolPolicySpec::Surface(surface) => surface.eval(input.t, input.x),
        }
    }
}

/// A policy restricted to `[y_lo, y_hi]`.
#[derive(Debug, Clone, PartialEq)]
pub struct ClippedPolicy {
    pub spec: VolPolicySpec,
    pub y_lo: f64,
    pub y_hi: f64,
}

impl ClippedPolicy {
    pub fn new(spec: VolPolicySpec, y_lo: f64, y_hi: f64) -> Result<Self> {
        spec.validate()?;
        if !(y_lo > 0.0 && y_lo <= y_hi && y_hi.is_finite()) {
            return Err(invalid("policy", format!("clip range [{y_lo}, {y_hi}] is invalid")));
        }
        Ok(Self { spec, y_lo, y_hi })
    }

    /// Symmetric normalization range `[1/K, K]`.
    pub fn normalized(spec: VolPolicySpec, k: f64) -> Result<Self> {
        if !(k >= 1.0) {
            return Err(invalid("policy_k", format!("K must be at least 1, got {k}")));
        }
        Self::new(spec, 1.0 / k, k)
    }

    #[inline]
    pub fn eval(&self, input: &PolicyInput) -> f64 {
        self.spec.raw(input).clamp(self.y_lo, self.y_hi)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn at(t: f64, x: f64) -> PolicyInput {
        PolicyInput {
            t,
            x,
            running_integral: 0.0,
            horizon: 1.0,
        }
    }

    #[test]
    fn constant_and_clip() {
        let p = ClippedPolicy::normalized(VolPolicySpec::Constant { y: 40.0 }, 25.0).unwrap();
        assert_eq!(p.eval(&at(0.0, 100.0)), 25.0);
        let p = ClippedPolicy::normalized(VolPolicySpec::Constant { y: 0.5 }, 25.0).unwrap();
        assert_eq!(p.eval(&at(0.3, -7.0)), 0.5);
        assert!(ClippedPolicy::normalized(VolPolicySpec::Constant { y: 1.0 }, 0.5).is_err());
        assert!(VolPolicySpec::Constant { y: 0.0 }.validate().is_err());
    }

    #[test]
    fn band_switches_on_state() {
        let band = VolPolicySpec::Band {
            y_inner: 4.0,
            y_outer: 0.5,
            lo: 90.0,
            hi: 110.0,
            state: BandState::Price,
        };
        assert_eq!(band.raw(&at(0.0, 100.0)), 4.0);
        assert_eq!(band.raw(&at(0.0, 111.0)), 0.5);
        let avg = VolPolicySpec::Band {
            y_inner: 4.0,
            y_outer: 0.5,
            lo: 90.0,
            hi: 110.0,
            state: BandState::ProjectedAverage,
        };
        // half elapsed at 80 on average, now at 130: projection 105
        let input = PolicyInput {
            t: 0.5,
            x: 130.0,
            running_integral: 40.0,
            horizon: 1.0,
        };
        assert_eq!(avg.raw(&input), 4.0);
    }

    #[test]
    fn surface_is_bilinear() {
        let s = PolicySurface::new(
            UniformAxis::new(0.0, 1.0, 2),
            UniformAxis::new(0.0, 2.0, 3),
            vec![1.0, 2.0, 3.0, 3.0, 4.0, 5.0],
        )
        .unwrap();
        assert!((s.eval(0.0, 1.0) - 2.0).abs() < 1e-15);
        assert!((s.eval(0.5, 0.5) - 2.5).abs() < 1e-15);
        assert_eq!(s.eval(2.0, 10.0), 5.0);
        assert_eq!(s.eval(-1.0, -10.0), 1.0);
        assert!(PolicySurface::new(UniformAxis::new(0.0, 1.0, 2), UniformAxis::new(0.0, 1.0, 2), vec![1.0]).is_err());
    }
}
