//! Conjugation by difference quotients against a reference orbit.
//!
//! When the return map's slope tends to one, the quotient
//! `(gamma^n(x) - gamma^n(x0)) / (gamma^(n+1)(x0) - gamma^n(x0))`
//! converges to a solution of the unit-shift equation vanishing at `x0`.
//! Convergence is only `O(1/n)`, so quotients are sampled along a
//! geometric subsequence of depths and extrapolated; the reference orbit
//! is computed once and shared by every grid node.

use crate::boundary::CharMaps;
use crate::error::{Error, Result};
use crate::par;
use crate::spline::CubicSpline;

use super::orbit::{orbit, Growth};
use super::{required_reach, splined_solution, AbelDiag, AbelMethod, AbelSolution};

/// Spacing of interpolation nodes.
const GRID_STEP: f64 = 1e-3;
/// Hard cap on interpolation nodes; the step widens past this.
const MAX_GRID_NODES: usize = 400_000;
/// First quotient checkpoint; later ones double.
const FIRST_CHECKPOINT: usize = 16;

/// Solves the unit-shift equation by extrapolated difference quotients.
///
/// `x0` seeds the reference orbit (the solution vanishes there before
/// renormalization), `n_iter` caps the orbit depth per node.  Fails with
/// [`Error::Hypothesis`] when the map is expansive, where the quotient
/// degenerates to a two-point evaluation instead of a conjugation.
pub fn levy(maps: &CharMaps, x0: f64, n_iter: usize, tol: f64) -> Result<AbelSolution> {
    if !(x0 >= -1.0) {
        return Err(Error::InvalidParameter {
            what: "levy",
            msg: format!("reference seed must lie in the map's domain, got {x0}"),
        });
    }
    let probe = orbit(maps, x0, 512);
    if let Growth::Exponential { rate } = probe.growth {
        return Err(Error::Hypothesis {
            msg: format!(
                "difference quotients converge to a conjugation only when the \
                 map slope tends to one; estimated limit slope is {rate:.4}"
            ),
        });
    }
    if let Growth::Contracting { rate, wall } = probe.growth {
        return Err(Error::Hypothesis {
            msg: format!(
                "the return map contracts toward an attracting point near \
                 {wall:.4} (slope {rate:.4} there), so difference quotients \
                 linearize geometrically instead of conjugating to a unit \
                 shift; for a sampled curve this means the extrapolated tail \
                 closes the width to zero, so extend the samples past the \
                 working horizon or end them where the width levels off"
            ),
        });
    }
    if probe.len() < FIRST_CHECKPOINT {
        return Err(Error::Hypothesis {
            msg: format!(
                "reference orbit leaves the computable domain after {} step(s)",
                probe.len()
            ),
        });
    }

    // Depth is the largest FIRST_CHECKPOINT * 2^m not above the request, so
    // checkpoints land exactly on the final depth.
    let mut depth = FIRST_CHECKPOINT;
    while depth * 2 <= n_iter.max(4 * FIRST_CHECKPOINT) {
        depth *= 2;
    }
    let reference = orbit(maps, x0, depth + 1);
    while reference.len() < depth + 2 {
        depth /= 2;
        if depth < 4 * FIRST_CHECKPOINT {
            return Err(Error::Hypothesis {
                msg: "reference orbit is too short to extrapolate quotients".into(),
            });
        }
    }

    let reach = required_reach(maps);
    let h = GRID_STEP.max((reach + 1.0) / MAX_GRID_NODES as f64);
    let n = ((reach + 1.0) / h).ceil() as usize;
    let grid: Vec<f64> = (0..=n)
        .map(|i| -1.0 + (reach + 1.0) * i as f64 / n as f64)
        .collect();

    let tol_node = (tol * 0.05).max(1e-14);
    let results = par::map_slice(&grid, |&x| quotient(maps, x, &reference.x, depth, tol_node));
    let mut phi = Vec::with_capacity(grid.len());
    let mut max_terms = 0;
    for r in results {
        let (v, k) = r?;
        phi.push(v);
        max_terms = max_terms.max(k);
    }

    let diag = AbelDiag {
        max_terms,
        grid_nodes: grid.len(),
        ..AbelDiag::default()
    };
    let spline = CubicSpline::natural(grid, phi)?;
    splined_solution(AbelMethod::Levy, spline, diag, maps, tol)
}

/// Difference quotient of the orbit of `x` against the reference, sampled
/// at doubling depths and Richardson-extrapolated.  Stops early once two
/// consecutive extrapolations agree to `tol_node`.
fn quotient(
    maps: &CharMaps,
    x: f64,
    reference: &[f64],
    depth: usize,
    tol_node: f64,
) -> Result<(f64, usize)> {
    let mut cur = x;
    let mut guess = None;
    let mut k = 0usize;
    let mut window = [f64::NAN; 3];
    let mut last_extrap = f64::NAN;
    let mut cp = FIRST_CHECKPOINT;
    loop {
        while k < cp {
            let (next, t) = maps.gamma_guess(cur, guess)?;
            cur = next;
            guess = Some(t);
            k += 1;
        }
        let q = (cur - reference[k]) / (reference[k + 1] - reference[k]);
        window = [window[1], window[2], q];
        let at_depth = k >= depth;
        if window[0].is_finite() {
            let extrap = richardson(window);
            let settled = last_extrap.is_finite() && (extrap - last_extrap).abs() < tol_node;
            if settled || at_depth {
                return Ok((extrap, k));
            }
            last_extrap = extrap;
        } else if at_depth {
            return Ok((q, k));
        }
        cp *= 2;
    }
}

/// Two-level extrapolation of samples at depths `n, 2n, 4n` under the
/// model `q + c/n + d/n^2`; exact on that model.
fn richardson(w: [f64; 3]) -> f64 {
    (8.0 * w[2] - 6.0 * w[1] + w[0]) / 3.0
}
