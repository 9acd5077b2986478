//! Bracketing root-finding for monotone functions, plus 1-D minimization.
//!
//! The solver brackets the target, bisects until the bracket is tight, then
//! applies a Newton polish when a derivative is supplied. A caller-provided
//! guess switches to safeguarded Newton (bracket-guarded), which is what
//! makes long orbit iterations affordable; both paths land within the same
//! width tolerance.

use crate::error::{Error, Result};

/// Hard ceiling for bracket expansion; queries beyond this are treated as
/// saturation of the underlying map.
const EXPAND_MAX: f64 = 1e13;

/// Default bracket width tolerance (scaled by the root magnitude).
pub const WIDTH_TOL: f64 = 1e-13;

/// Solves `f(t) = target` for strictly increasing `f`.
///
/// `lo`/`hi` seed the bracket; `hi` is expanded geometrically while
/// `f(hi) < target` (an `Error::Saturated` is reported if the function never
/// reaches the target). `df(t)` may return `None` where no derivative is
/// available; Newton steps are only taken where it is `Some`.
pub fn solve_increasing<F, D>(
    f: F,
    df: D,
    target: f64,
    lo: f64,
    hi: f64,
    guess: Option<f64>,
    width_tol: f64,
) -> Result<f64>
where
    F: Fn(f64) -> f64,
    D: Fn(f64) -> Option<f64>,
{
    let mut a = lo;
    let mut b = hi.max(lo);
    let fa = f(a);
    if fa > target {
        if (fa - target) <= 1e-12 * (1.0 + target.abs()) {
            return Ok(a);
        }
        return Err(Error::Domain {
            what: "root target",
            value: target,
            lo: fa,
            hi: f64::INFINITY,
        });
    }
    let mut fb = f(b);
    let mut step = (b - a).abs().max(1.0);
    while fb < target {
        if b > EXPAND_MAX {
            return Err(Error::Saturated {
                what: "monotone map",
                reached: fb,
                target,
            });
        }
        a = b;
        b += step;
        step *= 2.0;
        let fb_prev = fb;
        fb = f(b);
        // When the gain per doubling sinks below the rounding noise at the
        // argument scale, the map is numerically saturated: even if the
        // target were attained further out, the preimage would be
        // meaningless (f' ~ 0 relative to ulp(t)).
        let noise = 64.0 * f64::EPSILON * (b.abs() + fb.abs() + 1.0);
        if fb < target && (fb - fb_prev) <= noise {
            return Err(Error::Saturated {
                what: "monotone map",
                reached: fb,
                target,
            });
        }
    }

    // Safeguarded Newton from the guess when one is supplied.
    if let Some(g) = guess {
        if let Some(x) = newton_guarded(&f, &df, target, a, b, g, width_tol) {
            return Ok(x);
        }
    }

    // Bisection to a tight bracket.
    let mut iter = 0usize;
    while (b - a) > width_tol * (1.0_f64).max(a.abs().max(b.abs())) {
        let mid = 0.5 * (a + b);
        if mid <= a || mid >= b {
            break;
        }
        if f(mid) < target {
            a = mid;
        } else {
            b = mid;
        }
        iter += 1;
        if iter > 200 {
            break;
        }
    }
    let mut x = 0.5 * (a + b);
    // One Newton polish where the derivative exists.
    if let Some(d) = df(x) {
        if d > 0.0 {
            let xn = x - (f(x) - target) / d;
            if xn >= a - (b - a) && xn <= b + (b - a) {
                x = xn;
            }
        }
    }
    Ok(x)
}

fn newton_guarded<F, D>(
    f: &F,
    df: &D,
    target: f64,
    mut a: f64,
    mut b: f64,
    guess: f64,
    width_tol: f64,
) -> Option<f64>
where
    F: Fn(f64) -> f64,
    D: Fn(f64) -> Option<f64>,
{
    let mut x = guess.clamp(a, b);
    for _ in 0..60 {
        let fx = f(x) - target;
        let scale = (1.0_f64).max(x.abs());
        if fx.abs() <= 1e-14 * (1.0 + target.abs()).max(scale) {
            return Some(x);
        }
        if fx < 0.0 {
            a = a.max(x);
        } else {
            b = b.min(x);
        }
        let d = df(x)?;
        if !(d > 0.0) {
            return None;
        }
        let mut xn = x - fx / d;
        if xn <= a || xn >= b {
            xn = 0.5 * (a + b);
        }
        if (xn - x).abs() <= width_tol * scale {
            return Some(xn);
        }
        x = xn;
    }
    // Did not settle; let the bisection path take over.
    None
}

/// Golden-section minimization of a unimodal function on `[a, b]`.
///
/// Returns `(argmin, min)`. Callers that cannot guarantee unimodality should
/// seed `[a, b]` from a dense scan around the best sample.
pub fn golden_min<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, tol: f64) -> (f64, f64) {
    let inv_phi = 0.5 * (5.0_f64.sqrt() - 1.0);
    let (mut a, mut b) = (a.min(b), a.max(b));
    let mut c = b - inv_phi * (b - a);
    let mut d = a + inv_phi * (b - a);
    let (mut fc, mut fd) = (f(c), f(d));
    while (b - a) > tol * (1.0_f64).max(a.abs().max(b.abs())) {
        if fc < fd {
            b = d;
            d = c;
            fd = fc;
            c = b - inv_phi * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + inv_phi * (b - a);
            fd = f(d);
        }
    }
    let x = 0.5 * (a + b);
    (x, f(x))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn linear_root_is_exact() {
        let f = |t: f64| 0.5 * t - 1.0;
        let x = solve_increasing(f, |_| Some(0.5), 0.0, 0.0, 1.0, None, WIDTH_TOL).unwrap();
        assert_relative_eq!(x, 2.0, epsilon = 1e-13);
    }

    #[test]
    fn cubic_root_matches_analytic() {
        let f = |t: f64| t * t * t - 2.0;
        let x = solve_increasing(f, |t| Some(3.0 * t * t), 0.0, 0.0, 1.0, None, WIDTH_TOL).unwrap();
        assert_relative_eq!(x, 2.0_f64.powf(1.0 / 3.0), epsilon = 1e-12);
    }

    #[test]
    fn guess_path_agrees_with_bisection() {
        let f = |t: f64| t + t.sin() * 0.3;
        let no_guess =
            solve_increasing(f, |t| Some(1.0 + 0.3 * t.cos()), 5.0, 0.0, 1.0, None, WIDTH_TOL)
                .unwrap();
        let with_guess = solve_increasing(
            f,
            |t| Some(1.0 + 0.3 * t.cos()),
            5.0,
            0.0,
            1.0,
            Some(4.0),
            WIDTH_TOL,
        )
        .unwrap();
        assert_relative_eq!(no_guess, with_guess, epsilon = 1e-11);
    }

    #[test]
    fn saturating_function_reports_saturation() {
        let f = |t: f64| t.atan();
        let r = solve_increasing(f, |_| None, 2.0, 0.0, 1.0, None, WIDTH_TOL);
        assert!(matches!(r, Err(Error::Saturated { .. })));
    }

    #[test]
    fn target_below_domain_floor_errors() {
        let f = |t: f64| t;
        let r = solve_increasing(f, |_| None, -1.0, 0.0, 1.0, None, WIDTH_TOL);
        assert!(r.is_err());
    }

    #[test]
    fn golden_finds_quadratic_minimum() {
        let (x, fx) = golden_min(|t| (t - 1.3) * (t - 1.3) + 2.0, 0.0, 3.0, 1e-12);
        // The argmin is comparison-noise limited near sqrt(eps); the value
        // itself is quadratically insensitive and lands at full precision.
        assert_relative_eq!(x, 1.3, epsilon = 1e-6);
        assert_relative_eq!(fx, 2.0, epsilon = 1e-13);
    }

    #[test]
    fn large_roots_use_relative_width() {
        let f = |t: f64| 0.25 * t - 1.0;
        let x =
            solve_increasing(f, |_| Some(0.25), 1e9, 0.0, 1.0, None, WIDTH_TOL).unwrap();
        assert_relative_eq!(x, 4.0 * (1e9 + 1.0), max_relative = 1e-12);
    }
}
