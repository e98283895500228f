//! Damped least-squares fit of the reciprocal-affine curve
//! `y = c + 1 / (a x + b)`.
//!
//! The solver is Levenberg-Marquardt with Marquardt (diagonal) scaling, an
//! analytic Jacobian and a multiplicative damping schedule. Steps that would
//! put the curve's pole inside the working gamma range are rejected like any
//! other failed step. Besides the caller's initial guess, a second start is
//! seeded by scanning the asymptote `c` and solving the remaining linear
//! problem `1 / (y - c) = a x + b`; the better of the two runs is returned.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Range of `x` over which a non-degenerate curve must stay pole free.
pub const WORKING_RANGE: (f64, f64) = (0.1, 5.0);

/// Sequences whose spread is below this are treated as flat.
pub const DEGENERATE_SPREAD: f64 = 1e-4;

pub const DEFAULT_INIT: [f64; 3] = [1.0, 1.0, 0.0];
pub const DEFAULT_MAX_ITER: usize = 200;
pub const DEFAULT_TOL: f64 = 1e-10;

/// Fitted curve parameters and fit diagnostics.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CurveParams {
    pub a: f64,
    pub b: f64,
    pub c: f64,
    /// Mean squared residual over the fitted points.
    pub fit_mse: f64,
    /// The data was flat; the curve is the constant `c`.
    pub degenerate: bool,
    /// False when the solver stopped on the iteration cap or a singular
    /// system rather than on the gradient tolerance.
    pub converged: bool,
}

impl CurveParams {
    /// A curve with the given coefficients and no fit attached.
    pub fn new(a: f64, b: f64, c: f64) -> Self {
        Self {
            a,
            b,
            c,
            fit_mse: 0.0,
            degenerate: false,
            converged: true,
        }
    }

    pub fn constant(c: f64) -> Self {
        Self {
            a: 0.0,
            b: 0.0,
            c,
            fit_mse: 0.0,
            degenerate: true,
            converged: true,
        }
    }
}

/// Points to fit, sorted by `x`.
#[derive(Debug, Clone, PartialEq)]
pub struct FitProblem {
    xs: Vec<f64>,
    ys: Vec<f64>,
}

impl FitProblem {
    /// Needs at least four points with distinct, finite coordinates. Pairs
    /// are sorted by `x`, so the input order does not matter.
    pub fn new(xs: &[f64], ys: &[f64]) -> Result<Self> {
        if xs.len() != ys.len() {
            return Err(Error::InvalidParameter(format!(
                "{} x values but {} y values",
                xs.len(),
                ys.len()
            )));
        }
        if xs.len() < 4 {
            return Err(Error::InvalidParameter(format!(
                "at least four points are needed to fit three parameters, got {}",
                xs.len()
            )));
        }
        if xs.iter().chain(ys).any(|v| !v.is_finite()) {
            return Err(Error::InvalidParameter("non-finite fit data".into()));
        }
        let mut pairs: Vec<(f64, f64)> = xs.iter().copied().zip(ys.iter().copied()).collect();
        pairs.sort_by(|p, q| p.0.total_cmp(&q.0));
        if pairs.windows(2).any(|w| w[0].0 == w[1].0) {
            return Err(Error::InvalidParameter("x values must be distinct".into()));
        }
        let (xs, ys) = pairs.into_iter().unzip();
        Ok(Self { xs, ys })
    }

    pub fn xs(&self) -> &[f64] {
        &self.xs
    }

    pub fn ys(&self) -> &[f64] {
        &self.ys
    }

    fn len(&self) -> usize {
        self.xs.len()
    }

    /// Sum of squared residuals, or infinity where the curve is undefined.
    fn cost(&self, p: [f64; 3]) -> f64 {
        if !pole_free(p[0], p[1]) {
            return f64::INFINITY;
        }
        self.xs
            .iter()
            .zip(&self.ys)
            .map(|(&x, &y)| {
                let r = model(p, x) - y;
                r * r
            })
            .sum()
    }
}

#[inline]
fn model(p: [f64; 3], x: f64) -> f64 {
    p[2] + 1.0 / (p[0] * x + p[1])
}

/// `a x + b` keeps one strict sign over the working range.
fn pole_free(a: f64, b: f64) -> bool {
    let lo = a * WORKING_RANGE.0 + b;
    let hi = a * WORKING_RANGE.1 + b;
    lo.is_finite() && hi.is_finite() && ((lo > 0.0 && hi > 0.0) || (lo < 0.0 && hi < 0.0))
}

/// Partial derivatives of the model with respect to `(a, b, c)`.
pub fn jacobian_row(a: f64, b: f64, x: f64) -> [f64; 3] {
    let d = a * x + b;
    let inv2 = 1.0 / (d * d);
    [-x * inv2, -inv2, 1.0]
}

/// Evaluates the curve at `x`.
pub fn evaluate(params: &CurveParams, x: f64) -> Result<f64> {
    if params.degenerate {
        return Ok(params.c);
    }
    let d = params.a * x + params.b;
    if d == 0.0 || !d.is_finite() {
        return Err(Error::CurvePole(x));
    }
    Ok(params.c + 1.0 / d)
}

/// Fits the curve with default settings: init `(1, 1, 0)`, 200 iterations,
/// gradient tolerance `1e-10`.
pub fn fit(problem: &FitProblem) -> CurveParams {
    solve(problem, DEFAULT_INIT, DEFAULT_MAX_ITER, DEFAULT_TOL)
}

pub fn solve(problem: &FitProblem, init: [f64; 3], max_iter: usize, tol: f64) -> CurveParams {
    let ys = problem.ys();
    let (lo, hi) = ys
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &y| {
            (lo.min(y), hi.max(y))
        });
    if hi - lo < DEGENERATE_SPREAD {
        let c = ys.iter().sum::<f64>() / ys.len() as f64;
        let mse = ys.iter().map(|y| (y - c) * (y - c)).sum::<f64>() / ys.len() as f64;
        return CurveParams {
            fit_mse: mse,
            ..CurveParams::constant(c)
        };
    }

    let mut best = levenberg_marquardt(problem, init, max_iter, tol);
    if let Some(seed) = asymptote_seed(problem) {
        let alt = levenberg_marquardt(problem, seed, max_iter, tol);
        if alt.cost < best.cost {
            best = alt;
        }
    }
    if !best.cost.is_finite() {
        log::warn!("curve fit found no pole-free parameters");
    }
    CurveParams {
        a: best.params[0],
        b: best.params[1],
        c: best.params[2],
        fit_mse: best.cost / problem.len() as f64,
        degenerate: false,
        converged: best.converged,
    }
}

struct Run {
    params: [f64; 3],
    cost: f64,
    converged: bool,
}

fn levenberg_marquardt(problem: &FitProblem, init: [f64; 3], max_iter: usize, tol: f64) -> Run {
    let mut p = init;
    let mut cost = problem.cost(p);
    if !cost.is_finite() {
        return Run {
            params: p,
            cost,
            converged: false,
        };
    }
    let mut mu = 1e-3;
    let mut converged = false;

    for _ in 0..max_iter {
        let mut jtj = [[0.0; 3]; 3];
        let mut grad = [0.0; 3];
        for (&x, &y) in problem.xs().iter().zip(problem.ys()) {
            let row = jacobian_row(p[0], p[1], x);
            let r = model(p, x) - y;
            for i in 0..3 {
                grad[i] += row[i] * r;
                for j in 0..3 {
                    jtj[i][j] += row[i] * row[j];
                }
            }
        }
        let gnorm = grad.iter().map(|g| g * g).sum::<f64>().sqrt();
        if gnorm <= tol || cost == 0.0 {
            converged = true;
            break;
        }

        // Inner loop: raise damping until a step lowers the cost.
        let mut accepted = false;
        while mu < 1e16 {
            let mut lhs = jtj;
            for (i, row) in lhs.iter_mut().enumerate() {
                row[i] += mu * jtj[i][i].max(1e-12);
            }
            let rhs = [-grad[0], -grad[1], -grad[2]];
            if let Some(step) = solve3(lhs, rhs) {
                let trial = [p[0] + step[0], p[1] + step[1], p[2] + step[2]];
                let trial_cost = problem.cost(trial);
                if trial_cost < cost {
                    let rel = (cost - trial_cost) / cost.max(f64::MIN_POSITIVE);
                    let step_norm = step.iter().map(|s| s * s).sum::<f64>().sqrt();
                    let p_norm = trial.iter().map(|s| s * s).sum::<f64>().sqrt();
                    p = trial;
                    cost = trial_cost;
                    mu = (mu / 10.0).max(1e-15);
                    accepted = true;
                    if rel < 1e-15 && step_norm <= 1e-15 * (1.0 + p_norm) {
                        converged = true;
                    }
                    break;
                }
            }
            mu *= 10.0;
        }
        if !accepted {
            // No damping recovers a descent step: we are at a (numerical) minimum.
            converged = gnorm <= tol.sqrt();
            break;
        }
        if converged {
            break;
        }
    }
    Run {
        params: p,
        cost,
        converged,
    }
}

/// Gaussian elimination with partial pivoting on a 3x3 system.
#[allow(clippy::needless_range_loop)]
fn solve3(mut m: [[f64; 3]; 3], mut v: [f64; 3]) -> Option<[f64; 3]> {
    for col in 0..3 {
        let pivot = (col..3).max_by(|&i, &j| m[i][col].abs().total_cmp(&m[j][col].abs()))?;
        if m[pivot][col].abs() < 1e-300 || !m[pivot][col].is_finite() {
            return None;
        }
        m.swap(col, pivot);
        v.swap(col, pivot);
        for row in col + 1..3 {
            let f = m[row][col] / m[col][col];
            for k in col..3 {
                m[row][k] -= f * m[col][k];
            }
            v[row] -= f * v[col];
        }
    }
    let mut out = [0.0; 3];
    for row in (0..3).rev() {
        let mut s = v[row];
        for k in row + 1..3 {
            s -= m[row][k] * out[k];
        }
        out[row] = s / m[row][row];
    }
    out.iter().all(|v| v.is_finite()).then_some(out)
}

/// Starting point from a 1-D scan over the asymptote `c`. For each candidate
/// the transformed points `1 / (y - c)` are fitted by ordinary least squares
/// in `x`; the candidate with the lowest residual in `y` wins.
fn asymptote_seed(problem: &FitProblem) -> Option<[f64; 3]> {
    let ys = problem.ys();
    let lo = ys.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = ys.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let spread = hi - lo;

    let mut best: Option<([f64; 3], f64)> = None;
    for k in 0..=120 {
        let offset = spread * 10f64.powf(-4.0 + k as f64 * 7.0 / 120.0);
        for c in [lo - offset, hi + offset] {
            let Some((a, b)) = linear_fit(problem.xs(), ys.iter().map(|y| 1.0 / (y - c))) else {
                continue;
            };
            let cost = problem.cost([a, b, c]);
            if cost.is_finite() && best.is_none_or(|(_, bc)| cost < bc) {
                best = Some(([a, b, c], cost));
            }
        }
    }
    best.map(|(p, _)| p)
}

fn linear_fit(xs: &[f64], zs: impl Iterator<Item = f64>) -> Option<(f64, f64)> {
    let n = xs.len() as f64;
    let (mut sx, mut sz, mut sxx, mut sxz) = (0.0, 0.0, 0.0, 0.0);
    for (&x, z) in xs.iter().zip(zs) {
        sx += x;
        sz += z;
        sxx += x * x;
        sxz += x * z;
    }
    let det = n * sxx - sx * sx;
    if det.abs() < 1e-300 {
        return None;
    }
    let a = (n * sxz - sx * sz) / det;
    let b = (sz - a * sx) / n;
    (a.is_finite() && b.is_finite()).then_some((a, b))
}
