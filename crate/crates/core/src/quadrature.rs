//! Gauss–Hermite rules for expectations of functions of a standard normal.

use crate::error::{invalid, Result};
use nalgebra::{DMatrix, SymmetricEigen};

/// Nodes `z_i` and weights `w_i` with `sum_i w_i f(z_i) ~ E f(Z)`, `Z ~ N(0,1)`.
#[derive(Debug, Clone, PartialEq)]
pub struct GaussHermite {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl GaussHermite {
    /// `n`-point rule. Nodes start from the eigenvalues of the Jacobi matrix
    /// and are polished by Newton steps on the orthonormal Hermite recurrence,
    /// which also yields the weights.
    pub fn new(n: usize) -> Result<Self> {
        if n == 0 {
            return Err(invalid("quad_nodes", "need at least one node"));
        }
        // probabilists' Hermite: off-diagonal sqrt(k)
        let jacobi = DMatrix::from_fn(n, n, |i, j| {
            if i + 1 == j || j + 1 == i {
                (i.max(j) as f64).sqrt()
            } else {
                0.0
            }
        });
        let mut guesses: Vec<f64> = SymmetricEigen::new(jacobi).eigenvalues.iter().copied().collect();
        guesses.sort_by(f64::total_cmp);

        let mut nodes = Vec::with_capacity(n);
        let mut weights = Vec::with_capacity(n);
        for (i, &z0) in guesses.iter().enumerate() {
            let mut z = z0;
            let mut eval = hermite_eval(n, z);
            for _ in 0..8 {
                let step = eval.0 / eval.1;
                z -= step;
                eval = hermite_eval(n, z);
                if step.abs() <= 1e-15 * (1.0 + z.abs()) {
                    break;
                }
            }
            if n % 2 == 1 && i == n / 2 {
                z = 0.0;
                eval = hermite_eval(n, z);
            }
            nodes.push(z);
            // w = 1 / (n * h_{n-1}(z)^2) for orthonormal h_k
            weights.push((-(2.0 * eval.2) - (n as f64).ln()).exp());
        }
        // enforce exact symmetry
        for i in 0..n / 2 {
            let j = n - 1 - i;
            let z = 0.5 * (nodes[j] - nodes[i]);
            let w = 0.5 * (weights[i] + weights[j]);
            nodes[i] = -z;
            nodes[j] = z;
            weights[i] = w;
            weights[j] = w;
        }
        Ok(Self { nodes, weights })
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn expect(&self, f: impl Fn(f64) -> f64) -> f64 {
        self.nodes.iter().zip(&self.weights).map(|(z, w)| w * f(*z)).sum()
    }
}

/// Orthonormal Hermite recurrence (standard normal weight) at `z`.
/// Returns `h_n` and `h_n'` on a common rescaled footing plus `log |h_{n-1}|`.
fn hermite_eval(n: usize, z: f64) -> (f64, f64, f64) {
    let mut prev = 0.0;
    let mut cur = 1.0;
    let mut log_scale = 0.0;
    for k in 0..n {
        let kf = k as f64;
        let next = (z * cur - kf.sqrt() * prev) / (kf + 1.0).sqrt();
        prev = cur;
        cur = next;
        if cur.abs() > 1e100 {
            cur *= 1e-100;
            prev *= 1e-100;
            log_scale += 100.0 * std::f64::consts::LN_10;
        }
    }
    // h_n' = sqrt(n) h_{n-1}
    let deriv = (n as f64).sqrt() * prev;
    (cur, deriv, prev.abs().ln() + log_scale)
}
