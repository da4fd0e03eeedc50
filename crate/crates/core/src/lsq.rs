//! Bounded Levenberg–Marquardt for small dense least-squares problems.
//!
//! Parameters are kept inside their box by projecting each trial step. The
//! solver is allocation-free and reentrant: all state lives on the stack.

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LmOptions {
    pub max_iterations: usize,
    /// Stop when the relative decrease of the objective falls below this.
    pub ftol: f64,
    /// Stop when the relative parameter step falls below this.
    pub xtol: f64,
}

impl Default for LmOptions {
    fn default() -> Self {
        LmOptions { max_iterations: 200, ftol: 1e-8, xtol: 1e-12 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LmReport<const N: usize> {
    pub params: [f64; N],
    /// Sum of squared residuals at `params`.
    pub cost: f64,
    pub iterations: usize,
}

/// A residual model: `residuals` writes r_k and the Jacobian row dr_k/dp.
pub trait Model<const N: usize> {
    fn len(&self) -> usize;
    fn residual(&self, k: usize, p: &[f64; N]) -> (f64, [f64; N]);
}

fn cost_of<const N: usize, M: Model<N>>(m: &M, p: &[f64; N]) -> f64 {
    (0..m.len()).map(|k| m.residual(k, p).0).map(|r| r * r).sum()
}

/// Solves `a x = b` for a small symmetric positive-definite system by
/// Gaussian elimination with partial pivoting.
fn solve<const N: usize>(mut a: [[f64; N]; N], mut b: [f64; N]) -> Option<[f64; N]> {
    for col in 0..N {
        let piv = (col..N).max_by(|&i, &j| libm::fabs(a[i][col]).total_cmp(&libm::fabs(a[j][col])))?;
        if a[piv][col] == 0.0 || !a[piv][col].is_finite() {
            return None;
        }
        a.swap(col, piv);
        b.swap(col, piv);
        for row in col + 1..N {
            let f = a[row][col] / a[col][col];
            for c in col..N {
                a[row][c] -= f * a[col][c];
            }
            b[row] -= f * b[col];
        }
    }
    let mut x = [0.0; N];
    for row in (0..N).rev() {
        let s: f64 = (row + 1..N).map(|c| a[row][c] * x[c]).sum();
        x[row] = (b[row] - s) / a[row][row];
    }
    Some(x)
}

pub fn minimize<const N: usize, M: Model<N>>(
    model: &M,
    start: [f64; N],
    lower: [f64; N],
    upper: [f64; N],
    opts: &LmOptions,
) -> Result<LmReport<N>> {
    let project = |p: [f64; N]| {
        let mut q = p;
        for i in 0..N {
            q[i] = q[i].clamp(lower[i], upper[i]);
        }
        q
    };
    let mut p = project(start);
    let mut cost = cost_of(model, &p);
    let mut lambda = 1e-3;

    for iter in 1..=opts.max_iterations {
        if cost == 0.0 {
            return Ok(LmReport { params: p, cost, iterations: iter - 1 });
        }
        let mut jtj = [[0.0; N]; N];
        let mut jtr = [0.0; N];
        for k in 0..model.len() {
            let (r, j) = model.residual(k, &p);
            for a in 0..N {
                jtr[a] += j[a] * r;
                for b in 0..N {
                    jtj[a][b] += j[a] * j[b];
                }
            }
        }

        let mut accepted = None;
        while lambda < 1e16 {
            let mut a = jtj;
            for i in 0..N {
                a[i][i] += lambda * jtj[i][i].max(1e-300);
            }
            let neg: [f64; N] = core::array::from_fn(|i| -jtr[i]);
            if let Some(step) = solve(a, neg) {
                let mut trial = p;
                for i in 0..N {
                    trial[i] += step[i];
                }
                let trial = project(trial);
                let c = cost_of(model, &trial);
                if c.is_finite() && c < cost {
                    accepted = Some((trial, c));
                    lambda = (lambda / 3.0).max(1e-12);
                    break;
                }
            }
            lambda *= 4.0;
        }

        let Some((next, next_cost)) = accepted else {
            // no descent direction left: stationary to working precision
            return Ok(LmReport { params: p, cost, iterations: iter });
        };
        let rel_decrease = (cost - next_cost) / cost;
        let rel_step = (0..N)
            .map(|i| libm::fabs(next[i] - p[i]) / (libm::fabs(p[i]) + opts.xtol))
            .fold(0.0, f64::max);
        p = next;
        cost = next_cost;
        if rel_step <= opts.xtol || (rel_decrease <= opts.ftol && rel_step <= libm::sqrt(opts.ftol)) {
            return Ok(LmReport { params: p, cost, iterations: iter });
        }
    }
    Err(Error::NonConvergence { iterations: opts.max_iterations })
}
