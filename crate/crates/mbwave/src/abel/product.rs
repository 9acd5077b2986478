//! Constructive conjugations built from infinite products along orbits.
//!
//! Both solvers share a plan: evaluate a convergent product `P(x)` over the
//! forward orbit of every grid node, recover the conjugating function as a
//! normalized integral of `P` against an explicit weight, and interpolate
//! with exact slopes.  They differ in how the product is normalized, which
//! is dictated by how fast the return map's slope leaves (or approaches)
//! one.

use crate::boundary::CharMaps;
use crate::error::{Error, Result};
use crate::par;
use crate::spline::CubicSpline;

use super::orbit::{orbit, Growth};
use super::{required_reach, splined_solution, AbelDiag, AbelMethod, AbelSolution};

/// Target spacing of interpolation nodes.
const GRID_STEP: f64 = 2e-3;
/// Hard cap on interpolation nodes; the step widens past this.
const MAX_GRID_NODES: usize = 400_000;
/// Per-node cap on product terms for the expansive solver.
const EXPANSIVE_TERM_CAP: usize = 400;
/// Per-node cap on product terms for the power-law solver.  The fitted
/// tail supplies the remainder, so this trades orbit work against how much
/// the tail model is trusted.
const PARABOLIC_TERM_CAP: usize = 1600;

/// Grid from -1 to `reach` that contains 1 as an exact node, so the
/// normalization integral over one fundamental interval needs no
/// interpolation at its endpoint.
fn build_grid(reach: f64) -> Vec<f64> {
    let h = GRID_STEP.max((reach + 1.0) / MAX_GRID_NODES as f64);
    let n1 = ((2.0 / h).ceil() as usize).max(8);
    let n2 = (((reach - 1.0) / h).ceil() as usize).max(8);
    let mut g = Vec::with_capacity(n1 + n2 + 1);
    for i in 0..=n1 {
        g.push(-1.0 + 2.0 * i as f64 / n1 as f64);
    }
    for j in 1..=n2 {
        g.push(1.0 + (reach - 1.0) * j as f64 / n2 as f64);
    }
    g
}

/// Index of the node holding exactly 1.0 in a [`build_grid`] result.
fn unit_node(grid: &[f64]) -> usize {
    grid.iter().position(|&v| v == 1.0).expect("grid contains 1")
}

/// Conjugation for return maps whose slope tends to a limit `l > 1`.
///
/// Along each orbit the product of `slope/l` converges geometrically; its
/// integral from -1, offset by the unique constant making the result scale
/// by `l` under the map, is an exact eigenfunction of the composition
/// operator, and its base-`l` logarithm advances by one per reflection.
///
/// Fails with [`Error::Hypothesis`] when the orbit cannot be iterated or
/// the limit slope does not exceed one.
pub fn product_expansive(maps: &CharMaps, tol: f64) -> Result<AbelSolution> {
    let probe = orbit(maps, -1.0, 512);
    if probe.len() < 4 {
        return Err(Error::Hypothesis {
            msg: format!(
                "return-map orbit leaves the computable domain after {} step(s); \
                 the limit slope cannot be estimated",
                probe.len()
            ),
        });
    }
    // The deepest slope sample is the sharpest limit estimate.
    let ell = *probe.slope.last().unwrap();
    if !matches!(probe.growth, Growth::Exponential { .. }) || ell <= 1.0 + 1e-3 {
        return Err(Error::Hypothesis {
            msg: format!(
                "limit slope estimate {ell:.6} does not exceed one; \
                 the slope-normalizing product diverges"
            ),
        });
    }

    let grid = build_grid(required_reach(maps));
    let term_tol = (tol * 1e-2).max(1e-14);
    let results = par::map_slice(&grid, |&x| slope_product(maps, x, ell, term_tol));
    let mut p = Vec::with_capacity(grid.len());
    let mut max_terms = 0;
    for r in results {
        let (v, k) = r?;
        p.push(v);
        max_terms = max_terms.max(k);
    }

    // psi(x) = int_{-1}^{x} P + c with c = int_{-1}^{1} P / (l - 1) is the
    // unique offset making psi(gamma(x)) = l * psi(x); then
    // phi = ln(psi)/ln(l) shifts by one per reflection.
    let p_spline = CubicSpline::natural(grid.clone(), p.clone())?;
    let prefix = p_spline.prefix_integral();
    let c = prefix[unit_node(&grid)] / (ell - 1.0);
    let log_l = ell.ln();
    let mut phi = Vec::with_capacity(grid.len());
    let mut dphi = Vec::with_capacity(grid.len());
    for (i, &pi) in p.iter().enumerate() {
        let psi = prefix[i] + c;
        phi.push(psi.ln() / log_l);
        dphi.push(pi / (psi * log_l));
    }
    let diag = AbelDiag {
        limit_slope: Some(ell),
        max_terms,
        grid_nodes: grid.len(),
        ..AbelDiag::default()
    };
    let spline = CubicSpline::from_hermite(grid, phi, dphi)?;
    splined_solution(AbelMethod::ProductExpansive, spline, diag, maps, tol)
}

/// `prod_k slope(x_k)/l` along the orbit of `x`, with a geometric tail
/// correction once consecutive log-terms fall below `term_tol`.
fn slope_product(maps: &CharMaps, x: f64, ell: f64, term_tol: f64) -> Result<(f64, usize)> {
    let mut log_p = 0.0;
    let mut cur = x;
    let mut guess = None;
    let mut prev_dev: Option<f64> = None;
    let mut calm = 0usize;
    let mut k = 0usize;
    loop {
        let (next, t) = maps.gamma_guess(cur, guess)?;
        let lt = (maps.gamma_prime_at_time(t) / ell).ln();
        log_p += lt;
        k += 1;
        let dev = lt.abs();
        if dev < term_tol {
            calm += 1;
        } else {
            calm = 0;
        }
        if calm >= 3 || k >= EXPANSIVE_TERM_CAP || next > 1e10 {
            // Terms decay geometrically; extend the last one as a series.
            if let Some(pd) = prev_dev {
                if pd > 0.0 && dev > 0.0 {
                    let r = (dev / pd).min(0.9);
                    log_p += lt * r / (1.0 - r);
                }
            }
            return Ok((log_p.exp(), k));
        }
        prev_dev = Some(dev);
        guess = Some(t);
        cur = next;
    }
}

/// Conjugation for return maps whose slope decays to one like a power law,
/// `slope(x) = 1 + a(1-delta) x^-delta + o(x^-delta)` with `delta != 1`.
///
/// The orbit product of `g(x_k) slope(x_k) / g(x_{k+1})` with
/// `g = gamma^(1-delta)` has terms `1 + O(1/k^2)`; the truncated product is
/// finished with a fitted two-term tail in `1/k`.  The conjugation is the
/// integral of `P * gamma^(delta-1)` from -1, scaled so one reflection
/// advances it by exactly one.
///
/// When `delta_a` is `None` the exponent pair is fitted from the slope
/// decay along a probe orbit; supplying it skips the fit.
pub fn product_parabolic(
    maps: &CharMaps,
    delta_a: Option<(f64, f64)>,
    tol: f64,
) -> Result<AbelSolution> {
    let probe = orbit(maps, -1.0, PARABOLIC_TERM_CAP);
    if matches!(probe.growth, Growth::Exponential { .. }) {
        return Err(Error::Hypothesis {
            msg: "return-map slope stays above one along the orbit; \
                  use the expansive product instead"
                .into(),
        });
    }
    let (delta, a) = match delta_a.or(match probe.growth {
        Growth::Polynomial { delta, a, .. } => Some((delta, a)),
        _ => None,
    }) {
        Some(pair) => pair,
        None => {
            return Err(Error::Hypothesis {
                msg: "slope deviation from one shows no power-law decay; \
                      supply (delta, a) explicitly or use the quotient solver"
                    .into(),
            })
        }
    };
    if !(delta > 0.05) || (delta - 1.0).abs() < 0.02 || !(a > 0.0) {
        return Err(Error::InvalidParameter {
            what: "product_parabolic",
            msg: format!("need delta > 0.05 away from 1 and a > 0, got delta={delta}, a={a}"),
        });
    }

    let grid = build_grid(required_reach(maps));
    let results = par::map_slice(&grid, |&x| tail_corrected_product(maps, x, delta, a, tol));
    let mut integrand = Vec::with_capacity(grid.len());
    let mut max_terms = 0;
    for r in results {
        let (p, gamma_x, k) = r?;
        // d(phi)/dx is proportional to P(x) * gamma(x)^(delta-1).
        integrand.push(p * gamma_x.powf(delta - 1.0));
        max_terms = max_terms.max(k);
    }

    let w_spline = CubicSpline::natural(grid.clone(), integrand.clone())?;
    let prefix = w_spline.prefix_integral();
    let unit = prefix[unit_node(&grid)];
    if !(unit > 0.0) {
        return Err(Error::NoConvergence {
            what: "power-law product normalization",
            achieved: unit,
            wanted: f64::MIN_POSITIVE,
            steps: max_terms,
        });
    }
    let c = 1.0 / unit;
    let phi: Vec<f64> = prefix.iter().map(|&v| c * v).collect();
    let dphi: Vec<f64> = integrand.iter().map(|&v| c * v).collect();
    let diag = AbelDiag {
        delta: Some(delta),
        a_coef: Some(a),
        max_terms,
        grid_nodes: grid.len(),
        ..AbelDiag::default()
    };
    let spline = CubicSpline::from_hermite(grid, phi, dphi)?;
    splined_solution(AbelMethod::ProductParabolic, spline, diag, maps, tol)
}

/// Product of `g(x_k) slope(x_k) / g(x_{k+1})` with `g = gamma^(1-delta)`
/// along the orbit of `x`, truncated at `PARABOLIC_TERM_CAP` terms and
/// completed by a least-squares tail fit.
///
/// Under the power law the orbit advances like `x_k^delta ~ delta*a*(k+s)`
/// with a node-dependent index offset `s = gamma(x)^delta / (delta*a)`, so
/// the log-terms decay like `1/(k+s)^2`.  Fitting in the shifted basis
/// keeps the tail model faithful for nodes that start deep.
///
/// Returns `(P(x), gamma(x), terms_used)`.
fn tail_corrected_product(
    maps: &CharMaps,
    x: f64,
    delta: f64,
    a: f64,
    tol: f64,
) -> Result<(f64, f64, usize)> {
    let one_minus = 1.0 - delta;
    let term_tol = (tol * 0.05).max(1e-13);

    // g(x_k) = gamma(x_k)^(1-delta) = x_{k+1}^(1-delta), so each term needs
    // the slope at x_k and the two following orbit points.
    let (mut x1, t0) = maps.gamma_guess(x, None)?;
    let gamma_x = x1;
    let mut slope_k = maps.gamma_prime_at_time(t0);
    let mut guess = Some(t0);

    let mut log_p = 0.0;
    let mut log_terms: Vec<f64> = Vec::new();
    let mut k = 0usize;
    loop {
        let (x2, t1) = maps.gamma_guess(x1, guess)?;
        let lt = one_minus * (x1.ln() - x2.ln()) + slope_k.ln();
        log_p += lt;
        log_terms.push(lt);
        k += 1;
        if (k >= 48 && lt.abs() < term_tol) || k >= PARABOLIC_TERM_CAP {
            break;
        }
        slope_k = maps.gamma_prime_at_time(t1);
        guess = Some(t1);
        x1 = x2;
    }
    let shift = gamma_x.powf(delta) / (delta * a);
    log_p += power_tail(&log_terms, shift, &tail_exponents(delta));
    Ok((log_p.exp(), gamma_x, k))
}

/// Decay exponents present in the log-terms.  The orbit's subleading
/// structure `x_k = (delta*a*(k+s))^(1/delta) * (1 + O((k+s)^(-1/delta)))`
/// contributes exponents `1 + j/delta` on top of the generic integers.
fn tail_exponents(delta: f64) -> Vec<f64> {
    let mut exps = vec![2.0, 3.0];
    for j in 1..=4 {
        let q = 1.0 + j as f64 / delta;
        if (1.05..=3.45).contains(&q) && exps.iter().all(|&e| (e - q).abs() > 0.07) {
            exps.push(q);
        }
    }
    exps.sort_by(|a, b| a.partial_cmp(b).unwrap());
    exps
}

/// Least-squares fit of the last three quarters of the log-terms to
/// `sum_j c_j (k+s)^(-q_j)`, returning the implied sum over all untaken
/// terms.
fn power_tail(log_terms: &[f64], s: f64, exps: &[f64]) -> f64 {
    let n = log_terms.len();
    let m = exps.len();
    if n < 48 {
        return 0.0;
    }
    let lo = n / 4;
    let mut gram = vec![0.0; m * m];
    let mut rhs = vec![0.0; m];
    let mut w = vec![0.0; m];
    for (i, &lt) in log_terms.iter().enumerate().skip(lo) {
        let k = (i + 1) as f64 + s;
        for (j, &q) in exps.iter().enumerate() {
            w[j] = k.powf(-q);
        }
        for r in 0..m {
            for c in r..m {
                gram[r * m + c] += w[r] * w[c];
            }
            rhs[r] += lt * w[r];
        }
    }
    for r in 0..m {
        for c in 0..r {
            gram[r * m + c] = gram[c * m + r];
        }
    }
    let coef = match solve_small(&mut gram, &mut rhs, m) {
        Some(c) => c,
        None => return 0.0,
    };
    exps.iter()
        .zip(&coef)
        .map(|(&q, &cq)| cq * shifted_zeta_tail(n, q, s))
        .sum()
}

/// Gaussian elimination with partial pivoting for the tiny normal systems
/// of the tail fit.  Consumes its inputs.
fn solve_small(a: &mut [f64], b: &mut [f64], m: usize) -> Option<Vec<f64>> {
    for col in 0..m {
        let pivot = (col..m).max_by(|&r1, &r2| {
            a[r1 * m + col]
                .abs()
                .total_cmp(&a[r2 * m + col].abs())
        })?;
        if a[pivot * m + col].abs() < 1e-300 {
            return None;
        }
        if pivot != col {
            for c in 0..m {
                a.swap(col * m + c, pivot * m + c);
            }
            b.swap(col, pivot);
        }
        for row in (col + 1)..m {
            let f = a[row * m + col] / a[col * m + col];
            for c in col..m {
                a[row * m + c] -= f * a[col * m + c];
            }
            b[row] -= f * b[col];
        }
    }
    let mut x = vec![0.0; m];
    for row in (0..m).rev() {
        let mut acc = b[row];
        for c in (row + 1)..m {
            acc -= a[row * m + c] * x[c];
        }
        x[row] = acc / a[row * m + row];
        if !x[row].is_finite() {
            return None;
        }
    }
    Some(x)
}

/// `sum_{k > n} (k+s)^-p` by three-term Euler-Maclaurin; the base is large
/// enough here that the omitted terms are far below working precision.
fn shifted_zeta_tail(n: usize, p: f64, s: f64) -> f64 {
    let x = n as f64 + s + 1.0;
    x.powf(1.0 - p) / (p - 1.0) + 0.5 * x.powf(-p) + p / 12.0 * x.powf(-p - 1.0)
}
