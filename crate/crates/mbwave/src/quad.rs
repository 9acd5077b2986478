//! Adaptive composite Gauss–Legendre quadrature.
//!
//! Panels carry a 15-point Gauss–Legendre rule; a panel is accepted when the
//! halved estimate agrees with the coarse one within the budget allotted to
//! that panel, otherwise it is split. The error budget is distributed over
//! panels proportionally to length, against a running L1-style scale so that
//! relative tolerances behave sensibly for oscillatory integrands.
//!
//! Nodes and weights are computed once by Newton iteration on the Legendre
//! polynomial rather than transcribed, and are accurate to machine precision.

use crate::error::{Error, Result};
use std::sync::OnceLock;

const GL_N: usize = 15;
const MAX_DEPTH: u32 = 58;

/// Result of an adaptive integration.
#[derive(Debug, Clone, Copy)]
pub struct Quad {
    /// Integral estimate.
    pub value: f64,
    /// Accumulated panel-disagreement error estimate.
    pub error: f64,
    /// Number of accepted panels.
    pub panels: usize,
}

/// Legendre polynomial value and derivative at `x` for degree `n`.
fn legendre_pd(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0_f64;
    let mut p1 = x;
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    let d = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

/// Nodes and weights of the `GL_N`-point rule on [-1, 1].
fn gl_rule() -> &'static ([f64; GL_N], [f64; GL_N]) {
    static RULE: OnceLock<([f64; GL_N], [f64; GL_N])> = OnceLock::new();
    RULE.get_or_init(|| {
        let mut nodes = [0.0; GL_N];
        let mut weights = [0.0; GL_N];
        for k in 0..GL_N {
            let mut x =
                (std::f64::consts::PI * (k as f64 + 0.75) / (GL_N as f64 + 0.5)).cos();
            for _ in 0..100 {
                let (p, d) = legendre_pd(GL_N, x);
                let dx = p / d;
                x -= dx;
                if dx.abs() < 1e-16 {
                    break;
                }
            }
            let (_, d) = legendre_pd(GL_N, x);
            nodes[GL_N - 1 - k] = x;
            weights[GL_N - 1 - k] = 2.0 / ((1.0 - x * x) * d * d);
        }
        (nodes, weights)
    })
}

fn gl_panel<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> f64 {
    let (nodes, weights) = gl_rule();
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let mut acc = 0.0;
    for i in 0..GL_N {
        acc += weights[i] * f(c + h * nodes[i]);
    }
    acc * h
}

/// Integrates `f` over `[a, b]` adaptively.
///
/// Stops refining a panel once its halved and coarse estimates agree within
/// the panel's share of `max(abs_tol, rel_tol * scale)`, where `scale` tracks
/// the accumulated absolute mass of the integrand. Errors if the estimate
/// fails to converge (non-finite values or depth exhaustion beyond budget).
pub fn integrate<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, rel_tol: f64, abs_tol: f64) -> Result<Quad> {
    if a == b {
        return Ok(Quad {
            value: 0.0,
            error: 0.0,
            panels: 0,
        });
    }
    if a > b {
        let mut q = integrate(f, b, a, rel_tol, abs_tol)?;
        q.value = -q.value;
        return Ok(q);
    }
    let total_len = b - a;
    // Stack of (lo, hi, coarse estimate, depth); L1 scale grows as panels land.
    let mut stack: Vec<(f64, f64, f64, u32)> = vec![(a, b, gl_panel(&f, a, b), 0)];
    let mut value = 0.0;
    let mut err = 0.0;
    let mut l1 = 0.0_f64;
    let mut panels = 0usize;
    while let Some((lo, hi, coarse, depth)) = stack.pop() {
        let mid = 0.5 * (lo + hi);
        let left = gl_panel(&f, lo, mid);
        let right = gl_panel(&f, mid, hi);
        let fine = left + right;
        if !fine.is_finite() {
            return Err(Error::NoConvergence {
                what: "quadrature",
                achieved: f64::NAN,
                wanted: rel_tol,
                steps: panels,
            });
        }
        let disagreement = (fine - coarse).abs();
        let scale = l1 + fine.abs();
        let budget = f64::max(abs_tol, rel_tol * scale) * ((hi - lo) / total_len);
        // Panels narrower than a few ulps cannot be split meaningfully.
        let width_floor = (hi - lo) <= 8.0 * f64::EPSILON * (lo.abs() + hi.abs() + 1.0);
        if disagreement <= budget || depth >= MAX_DEPTH || width_floor {
            value += fine;
            err += disagreement;
            l1 += left.abs() + right.abs();
            panels += 1;
        } else {
            stack.push((lo, mid, left, depth + 1));
            stack.push((mid, hi, right, depth + 1));
        }
    }
    let tol_final = f64::max(abs_tol, rel_tol * f64::max(l1, value.abs()));
    if !value.is_finite() || err > 50.0 * tol_final.max(f64::MIN_POSITIVE) {
        return Err(Error::NoConvergence {
            what: "quadrature",
            achieved: err,
            wanted: tol_final,
            steps: panels,
        });
    }
    Ok(Quad {
        value,
        error: err,
        panels,
    })
}

/// Integrates with the crate's strict default tolerances (1e-12 relative).
pub fn integrate_strict<F: Fn(f64) -> f64>(f: F, a: f64, b: f64) -> Result<Quad> {
    integrate(f, a, b, 1e-12, 1e-15)
}

/// Cumulative integrals of `f` along a sorted grid.
///
/// Returns `out[i] = integral of f from grid[0] to grid[i]`, each increment
/// computed adaptively, so the prefix sums inherit the panel tolerance.
pub fn cumulative<F: Fn(f64) -> f64>(f: F, grid: &[f64], rel_tol: f64) -> Result<Vec<f64>> {
    let mut out = Vec::with_capacity(grid.len());
    let mut acc = 0.0;
    out.push(0.0);
    for w in grid.windows(2) {
        acc += integrate(&f, w[0], w[1], rel_tol, 1e-15)?.value;
        out.push(acc);
    }
    Ok(out)
}
