//! Interpolation on uniform grids, with linear extrapolation past the ends.

/// Uniform grid `lo, lo + step, ..., hi`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct UniformAxis {
    pub lo: f64,
    pub hi: f64,
    pub len: usize,
}

impl UniformAxis {
    pub fn new(lo: f64, hi: f64, len: usize) -> Self {
        debug_assert!(len >= 1 && hi >= lo);
        Self { lo, hi, len }
    }

    pub fn step(&self) -> f64 {
        if self.len > 1 {
            (self.hi - self.lo) / (self.len - 1) as f64
        } else {
            0.0
        }
    }

    pub fn point(&self, i: usize) -> f64 {
        if self.len == 1 {
            return self.lo;
        }
        self.lo + (self.hi - self.lo) * i as f64 / (self.len - 1) as f64
    }

    pub fn points(&self) -> Vec<f64> {
        (0..self.len).map(|i| self.point(i)).collect()
    }

    pub fn contains(&self, x: f64) -> bool {
        x >= self.lo && x <= self.hi
    }

    /// Cell index `i` and local coordinate `s` with `x = point(i) + s * step`.
    /// `s` falls outside `[0, 1]` when `x` is outside the axis.
    pub fn locate(&self, x: f64) -> (usize, f64) {
        if self.len < 2 {
            return (0, 0.0);
        }
        let u = (x - self.lo) / self.step();
        let i = (u.floor().max(0.0) as usize).min(self.len - 2);
        (i, u - i as f64)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum InterpOrder {
    Linear,
    Cubic,
}

/// Interpolant of samples on a [`UniformAxis`].
#[derive(Debug, Clone)]
pub struct Interpolant {
    axis: UniformAxis,
    values: Vec<f64>,
    /// Natural-spline second derivatives; empty for linear interpolation.
    curvature: Vec<f64>,
}

impl Interpolant {
    pub fn new(axis: UniformAxis, values: Vec<f64>, order: InterpOrder) -> Self {
        assert_eq!(axis.len, values.len());
        let curvature = match order {
            InterpOrder::Cubic if axis.len >= 3 => natural_spline_curvature(&values, axis.step()),
            _ => Vec::new(),
        };
        Self {
            axis,
            values,
            curvature,
        }
    }

    pub fn axis(&self) -> &UniformAxis {
        &self.axis
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// Centered difference quotient of [`Self::eval`] with half-width one grid step.
    pub fn slope(&self, x: f64) -> f64 {
        let h = self.axis.step();
        if h == 0.0 {
            return 0.0;
        }
        (self.eval(x + h) - self.eval(x - h)) / (2.0 * h)
    }

    pub fn eval(&self, x: f64) -> f64 {
        let n = self.axis.len;
        if n == 1 {
            return self.values[0];
        }
        let h = self.axis.step();
        if x < self.axis.lo {
            return self.values[0] + (x - self.axis.lo) * self.end_slope(false);
        }
        if x > self.axis.hi {
            return self.values[n - 1] + (x - self.axis.hi) * self.end_slope(true);
        }
        let (i, s) = self.axis.locate(x);
        let (y0, y1) = (self.values[i], self.values[i + 1]);
        let lin = y0 + s * (y1 - y0);
        if self.curvature.is_empty() {
            return lin;
        }
        let (m0, m1) = (self.curvature[i], self.curvature[i + 1]);
        let a = 1.0 - s;
        lin + h * h / 6.0 * ((a * a * a - a) * m0 + (s * s * s - s) * m1)
    }

    fn end_slope(&self, right: bool) -> f64 {
        let n = self.axis.len;
        let h = self.axis.step();
        if right {
            let base = (self.values[n - 1] - self.values[n - 2]) / h;
            if self.curvature.is_empty() {
                base
            } else {
                base + h / 6.0 * (self.curvature[n - 2] + 2.0 * self.curvature[n - 1])
            }
        } else {
            let base = (self.values[1] - self.values[0]) / h;
            if self.curvature.is_empty() {
                base
            } else {
                base - h / 6.0 * (2.0 * self.curvature[0] + self.curvature[1])
            }
        }
    }
}

fn natural_spline_curvature(y: &[f64], h: f64) -> Vec<f64> {
    let n = y.len();
    // interior equations: m_{i-1} + 4 m_i + m_{i+1} = 6 (y_{i-1} - 2 y_i + y_{i+1}) / h^2
    let k = n - 2;
    let mut diag = vec![4.0; k];
    let mut rhs: Vec<f64> = (1..n - 1)
        .map(|i| 6.0 * (y[i - 1] - 2.0 * y[i] + y[i + 1]) / (h * h))
        .collect();
    for i in 1..k {
        let w = 1.0 / diag[i - 1];
        diag[i] -= w;
        rhs[i] -= w * rhs[i - 1];
    }
    let mut m = vec![0.0; n];
    for i in (0..k).rev() {
        let next = if i + 1 < k { m[i + 2] } else { 0.0 };
        m[i + 1] = (rhs[i] - next) / diag[i];
    }
    m
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn linear_functions_reproduced_with_extrapolation() {
        let axis = UniformAxis::new(-2.0, 3.0, 11);
        let vals: Vec<f64> = axis.points().iter().map(|x| 1.5 * x - 0.25).collect();
        for order in [InterpOrder::Linear, InterpOrder::Cubic] {
            let f = Interpolant::new(axis, vals.clone(), order);
            for x in [-7.0, -2.0, -0.33, 0.0, 1.111, 3.0, 9.5] {
                assert!((f.eval(x) - (1.5 * x - 0.25)).abs() < 1e-12, "{order:?} at {x}");
            }
        }
    }

    #[test]
    fn cubic_is_accurate_on_smooth_data() {
        let axis = UniformAxis::new(0.0, 3.0, 61);
        let vals: Vec<f64> = axis.points().iter().map(|x| x.sin()).collect();
        let lin = Interpolant::new(axis, vals.clone(), InterpOrder::Linear);
        let cub = Interpolant::new(axis, vals, InterpOrder::Cubic);
        let x = 1.2345;
        assert!((cub.eval(x) - x.sin()).abs() < 1e-6);
        assert!((cub.eval(x) - x.sin()).abs() < (lin.eval(x) - x.sin()).abs());
    }

    #[test]
    fn exact_at_knots() {
        let axis = UniformAxis::new(0.0, 1.0, 5);
        let vals = vec![0.0, 3.0, -1.0, 2.0, 2.0];
        let cub = Interpolant::new(axis, vals.clone(), InterpOrder::Cubic);
        for (i, v) in vals.iter().enumerate() {
            assert!((cub.eval(axis.point(i)) - v).abs() < 1e-12);
        }
    }
}
