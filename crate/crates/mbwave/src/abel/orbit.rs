//! Forward orbits of the boundary return map and their growth statistics.
//!
//! The return map sends a point `x` on the time axis to the value seen one
//! boundary reflection later.  Orbits of this map drive both constructive
//! conjugation solvers and the visit-count bookkeeping used by combined
//! observation windows, so they are computed once and carried around as a
//! plain sequence together with the map's slope at each point.

use crate::boundary::CharMaps;

/// Orbit points past this magnitude are not produced.
pub const ORBIT_OVERFLOW: f64 = 1e12;

const EXPANSIVE_MARGIN: f64 = 1e-3;

/// Why an orbit stopped before reaching the requested length.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Truncation {
    /// The next point would exceed [`ORBIT_OVERFLOW`].
    Overflow { at: usize },
    /// The map could not be advanced: the underlying inversion stalled
    /// because the boundary speed approaches one and the map flattens
    /// into its asymptote.
    Saturated { at: usize },
}

/// Asymptotic growth of an orbit.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Growth {
    /// Successive ratios stay above one: `x_n ~ c * rate^n`.
    Exponential { rate: f64 },
    /// Power-law escape `x_n ~ c * n^exponent` with `exponent = 1/delta`,
    /// where the map slope behaves like `1 + a*(1-delta)*x^-delta`.
    Polynomial { exponent: f64, delta: f64, a: f64 },
    /// Increments decay geometrically: the orbit accumulates below the
    /// attracting point near `wall`, where the map slope is `rate` < 1.
    Contracting { rate: f64, wall: f64 },
    /// Too few points, or the tail fits neither model.
    Indeterminate,
}

/// A forward orbit `x_0, gamma(x_0), gamma^2(x_0), ...` with slopes.
#[derive(Debug, Clone)]
pub struct Orbit {
    /// Orbit points, starting from the seed.
    pub x: Vec<f64>,
    /// Map slope at each orbit point.
    pub slope: Vec<f64>,
    /// Set when the orbit stopped early.
    pub truncation: Option<Truncation>,
    /// Fitted growth class of the tail.
    pub growth: Growth,
}

impl Orbit {
    pub fn len(&self) -> usize {
        self.x.len()
    }

    pub fn is_empty(&self) -> bool {
        self.x.is_empty()
    }

    /// Number of orbit points that fall inside `[x0, limit]`.
    pub fn visits_below(&self, limit: f64) -> usize {
        self.x.iter().take_while(|&&v| v <= limit).count()
    }
}

/// Computes the forward orbit of `x0` under the return map, up to `n_max`
/// applications or until the orbit leaves `[x0, ORBIT_OVERFLOW]`.
///
/// Never fails: a point whose image cannot be computed ends the orbit with
/// a [`Truncation`] record instead.  Points are recorded together with the
/// map slope there, so a final point whose slope is unavailable is dropped.
///
/// Each step reuses the previous reflection time as a starting guess for the
/// map inversion, so long orbits cost a few function evaluations per step.
pub fn orbit(maps: &CharMaps, x0: f64, n_max: usize) -> Orbit {
    let mut x = Vec::with_capacity(n_max.min(1 << 16) + 1);
    let mut slope = Vec::with_capacity(x.capacity());
    let mut truncation = None;

    let mut cur = x0;
    let mut guess: Option<f64> = None;
    for n in 0..=n_max {
        match maps.gamma_guess(cur, guess) {
            Ok((next, t)) => {
                x.push(cur);
                slope.push(maps.gamma_prime_at_time(t));
                if n == n_max {
                    break;
                }
                if next > ORBIT_OVERFLOW {
                    truncation = Some(Truncation::Overflow { at: n + 1 });
                    break;
                }
                guess = Some(t);
                cur = next;
            }
            Err(_) => {
                truncation = Some(Truncation::Saturated { at: n });
                break;
            }
        }
    }

    let growth = classify(&x, &slope);
    Orbit {
        x,
        slope,
        truncation,
        growth,
    }
}

fn classify(x: &[f64], slope: &[f64]) -> Growth {
    if let Some(g) = detect_contraction(x, slope) {
        return g;
    }

    // Need a positive tail to take ratios and logarithms of.
    let first_pos = match x.iter().position(|&v| v > 0.0) {
        Some(i) => i,
        None => return Growth::Indeterminate,
    };
    let tail = &x[first_pos..];
    if tail.len() < 6 {
        return Growth::Indeterminate;
    }

    // Ratio test on the last half of the positive tail.  Point ratios of a
    // pure shift also sit above one at finite depth, so the limit slope
    // must corroborate before the orbit is called exponential; the final
    // slope sample is the deepest and therefore most accurate estimate.
    let half = &tail[tail.len() / 2..];
    let mut min_ratio = f64::INFINITY;
    for w in half.windows(2) {
        min_ratio = min_ratio.min(w[1] / w[0]);
    }
    let rate = *slope.last().unwrap();
    if min_ratio > 1.0 + EXPANSIVE_MARGIN && rate > 1.0 + EXPANSIVE_MARGIN {
        return Growth::Exponential { rate };
    }

    match fit_power_tail(x, slope) {
        Some((delta, a)) => Growth::Polynomial {
            exponent: 1.0 / delta,
            delta,
            a,
        },
        None => Growth::Indeterminate,
    }
}

/// Detects geometric increment decay toward a finite accumulation point.
///
/// Neutral maps drive the increment ratios to one however slowly they
/// escape, so a deep tail whose ratios and slope both sit below one by a
/// solid margin can only be contracting at an attracting fixed point. The
/// wall estimate sums the remaining geometric increments.
fn detect_contraction(x: &[f64], slope: &[f64]) -> Option<Growth> {
    const RATIO_WINDOW: usize = 8;
    const MARGIN: f64 = 1e-2;
    if x.len() < RATIO_WINDOW + 2 || slope.len() != x.len() {
        return None;
    }

    // Near the wall the increments sink below floating-point resolution
    // while the map still advances; a stagnant tail at sub-unit slope is
    // already conclusive.
    let resolution = |v: f64| 1e-13 * (1.0 + v.abs());
    let mut end = x.len() - 1;
    while end > 0 && x[end] - x[end - 1] <= resolution(x[end]) {
        end -= 1;
    }
    let rate = slope[end];
    if !(rate > 0.0 && rate < 1.0 - MARGIN) {
        return None;
    }
    if x.len() - 1 - end >= RATIO_WINDOW {
        return Some(Growth::Contracting {
            rate,
            wall: *x.last().unwrap(),
        });
    }
    if end + 1 < RATIO_WINDOW + 2 {
        return None;
    }

    let tail = &x[end - (RATIO_WINDOW + 1)..=end];
    let mut sum = 0.0;
    let mut prev = tail[1] - tail[0];
    for w in tail[1..].windows(2) {
        let d = w[1] - w[0];
        if !(d > 0.0 && prev > 0.0 && d.is_finite()) {
            return None;
        }
        let r = d / prev;
        if r >= 1.0 {
            return None;
        }
        sum += r;
        prev = d;
    }
    let r = sum / RATIO_WINDOW as f64;
    if r >= 1.0 - MARGIN {
        return None;
    }
    let wall = tail[RATIO_WINDOW + 1] + prev * r / (1.0 - r);
    Some(Growth::Contracting { rate, wall })
}

/// Fits `slope(x) ~ 1 + a*(1-delta)*x^-delta` on the orbit tail by
/// regressing `ln|slope - 1|` against `ln x`.  Returns `(delta, a)`.
pub fn fit_power_tail(x: &[f64], slope: &[f64]) -> Option<(f64, f64)> {
    let mut lx = Vec::new();
    let mut ly = Vec::new();
    for (&xi, &si) in x.iter().zip(slope) {
        let dev = si - 1.0;
        // Skip points where the deviation has sunk into rounding noise.
        if xi > 1.0 && dev.abs() > 1e-12 {
            lx.push(xi.ln());
            ly.push(dev.abs().ln());
        }
    }
    if lx.len() < 8 {
        return None;
    }
    // Use the deeper half: the power law is asymptotic.
    let skip = lx.len() / 2;
    let (lx, ly) = (&lx[skip..], &ly[skip..]);

    let n = lx.len() as f64;
    let mx = lx.iter().sum::<f64>() / n;
    let my = ly.iter().sum::<f64>() / n;
    let mut sxx = 0.0;
    let mut sxy = 0.0;
    for (&a, &b) in lx.iter().zip(ly) {
        sxx += (a - mx) * (a - mx);
        sxy += (a - mx) * (b - my);
    }
    if sxx < 1e-12 {
        return None;
    }
    let b = sxy / sxx;
    let delta = -b;
    if !(0.05..=20.0).contains(&delta) || (delta - 1.0).abs() < 0.02 {
        return None;
    }
    let intercept = my - b * mx;
    let a = intercept.exp() / (1.0 - delta).abs();
    Some((delta, a))
}
