//! Moving-endpoint boundary curves and their characteristic maps.
//!
//! The spatial domain is 0 <= x <= s(t) with s(0) = 1 and |s'| < 1. Four
//! closed-form families are built in; arbitrary curves enter as CSV samples
//! interpolated by a cubic spline (linear end-slope continuation past the
//! last sample).
//!
//! Characteristic maps: alpha(t) = t + s(t), beta(t) = t - s(t), both
//! strictly increasing, and the return map gamma = alpha ∘ beta⁻¹ sending
//! the departure coordinate of a rightgoing ray to the arrival coordinate
//! of its reflection at x = 0. gamma(-1) = 1 and gamma has no fixed points;
//! gamma'(y) = (1 + s'(t))/(1 - s'(t)) at t = beta⁻¹(y), so gamma is
//! expanding where the endpoint recedes (s' > 0) and contracting where it
//! advances (s' < 0).
//!
//! For endpoints receding at speeds approaching 1 (the hyperbolic family),
//! beta is bounded above, rightgoing rays from part of the initial interval
//! never return, and the observability times are infinite; saturation is
//! detected and reported as `f64::INFINITY` in [`OptimalTimes`].

use crate::error::{Error, Result};
use crate::rootfind::{self, WIDTH_TOL};
use crate::spline::CubicSpline;
use serde::{Deserialize, Serialize};

/// Admissibility margin: curves must keep |s'| below 1 by at least this.
const SPEED_MARGIN: f64 = 1e-6;

/// Samples used when scanning a curve for admissibility.
const SCAN_SAMPLES: usize = 4096;

/// Boundary curve family tag.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Family {
    Linear,
    Parabolic,
    Hyperbolic,
    Shrinking,
    Custom,
}

impl std::fmt::Display for Family {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            Family::Linear => "linear",
            Family::Parabolic => "parabolic",
            Family::Hyperbolic => "hyperbolic",
            Family::Shrinking => "shrinking",
            Family::Custom => "custom",
        };
        f.write_str(s)
    }
}

impl std::str::FromStr for Family {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "linear" => Ok(Family::Linear),
            "parabolic" => Ok(Family::Parabolic),
            "hyperbolic" => Ok(Family::Hyperbolic),
            "shrinking" => Ok(Family::Shrinking),
            "custom" => Ok(Family::Custom),
            other => Err(Error::InvalidParameter {
                what: "family",
                msg: format!("unknown family '{other}'"),
            }),
        }
    }
}

#[derive(Debug, Clone)]
enum CurveKind {
    Linear { eps: f64 },
    Parabolic { eps: f64 },
    /// Normalized so s(0) = 1; the rate parameter collapses to k = sqrt(2)-1
    /// for every epsilon (the family is self-similar under the rescaling).
    Hyperbolic { k: f64 },
    Shrinking { eps: f64 },
    Sampled { spline: CubicSpline },
}

/// A moving right endpoint t -> s(t) with s(0) = 1 and |s'| < 1.
#[derive(Debug, Clone)]
pub struct BoundaryCurve {
    family: Family,
    epsilon: Option<f64>,
    kind: CurveKind,
    sup_speed: f64,
}

impl BoundaryCurve {
    pub fn linear(eps: f64) -> Result<Self> {
        require_eps("linear epsilon", eps, 0.0, 1.0)?;
        Ok(BoundaryCurve {
            family: Family::Linear,
            epsilon: Some(eps),
            kind: CurveKind::Linear { eps },
            sup_speed: eps,
        })
    }

    pub fn parabolic(eps: f64) -> Result<Self> {
        require_eps("parabolic epsilon", eps, 0.0, 2.0)?;
        Ok(BoundaryCurve {
            family: Family::Parabolic,
            epsilon: Some(eps),
            kind: CurveKind::Parabolic { eps },
            // s'(t) = eps / (2 sqrt(1 + eps t)) peaks at t = 0.
            sup_speed: eps / 2.0,
        })
    }

    pub fn hyperbolic(eps: f64) -> Result<Self> {
        if !(eps > 0.0) || !eps.is_finite() {
            return Err(Error::InvalidParameter {
                what: "hyperbolic epsilon",
                msg: format!("need epsilon > 0, got {eps}"),
            });
        }
        let k = std::f64::consts::SQRT_2 - 1.0;
        Ok(BoundaryCurve {
            family: Family::Hyperbolic,
            epsilon: Some(eps),
            kind: CurveKind::Hyperbolic { k },
            // s' increases toward 1 but never reaches it; the effective sup
            // on any finite horizon stays below 1 and is refined per use.
            sup_speed: 1.0 - SPEED_MARGIN,
        })
    }

    pub fn shrinking(eps: f64) -> Result<Self> {
        require_eps("shrinking epsilon", eps, 0.0, 1.0)?;
        Ok(BoundaryCurve {
            family: Family::Shrinking,
            epsilon: Some(eps),
            kind: CurveKind::Shrinking { eps },
            sup_speed: eps,
        })
    }

    /// Builds a curve from samples (t_i, s_i); t_0 must be 0 with s_0 = 1.
    ///
    /// Between samples the curve is the natural cubic spline; past the last
    /// sample it continues linearly with the end slope. Admissibility
    /// (positivity, |s'| < 1) is checked by dense scanning over the samples.
    pub fn from_samples(t: Vec<f64>, s: Vec<f64>) -> Result<Self> {
        if t.is_empty() || t[0].abs() > 1e-12 {
            return Err(Error::InvalidParameter {
                what: "curve samples",
                msg: "samples must start at t = 0".into(),
            });
        }
        if (s[0] - 1.0).abs() > 1e-9 {
            return Err(Error::InadmissibleCurve {
                msg: format!("s(0) = {} but the normalization requires s(0) = 1", s[0]),
            });
        }
        let spline = CubicSpline::natural(t, s)?;
        let curve = BoundaryCurve {
            family: Family::Custom,
            epsilon: None,
            kind: CurveKind::Sampled { spline },
            sup_speed: 0.0,
        };
        let (_, hi) = curve.sample_domain().unwrap();
        let mut sup = 0.0_f64;
        for i in 0..=SCAN_SAMPLES {
            let tt = hi * i as f64 / SCAN_SAMPLES as f64;
            let sv = curve.s(tt);
            if !(sv > 0.0) {
                return Err(Error::InadmissibleCurve {
                    msg: format!("s({tt:.6}) = {sv:.6} is not positive"),
                });
            }
            sup = sup.max(curve.s_prime(tt).abs());
        }
        if sup >= 1.0 - SPEED_MARGIN {
            return Err(Error::InadmissibleCurve {
                msg: format!("max |s'| = {sup:.6} violates |s'| < 1"),
            });
        }
        Ok(BoundaryCurve {
            sup_speed: sup,
            ..curve
        })
    }

    pub fn family(&self) -> Family {
        self.family
    }

    pub fn epsilon(&self) -> Option<f64> {
        self.epsilon
    }

    /// Endpoint position at time t >= 0.
    pub fn s(&self, t: f64) -> f64 {
        match &self.kind {
            CurveKind::Linear { eps } => 1.0 + eps * t,
            CurveKind::Parabolic { eps } => (1.0 + eps * t).sqrt(),
            CurveKind::Hyperbolic { k } => {
                let v = 1.0 + k * t;
                (-1.0 + (1.0 + v * v).sqrt()) / k
            }
            CurveKind::Shrinking { eps } => 1.0 / (1.0 + eps * t),
            CurveKind::Sampled { spline } => spline.eval(t),
        }
    }

    /// Endpoint velocity at time t >= 0.
    pub fn s_prime(&self, t: f64) -> f64 {
        match &self.kind {
            CurveKind::Linear { eps } => *eps,
            CurveKind::Parabolic { eps } => eps / (2.0 * (1.0 + eps * t).sqrt()),
            CurveKind::Hyperbolic { k } => {
                let v = 1.0 + k * t;
                v / (1.0 + v * v).sqrt()
            }
            CurveKind::Shrinking { eps } => {
                let d = 1.0 + eps * t;
                -eps / (d * d)
            }
            CurveKind::Sampled { spline } => spline.deriv(t),
        }
    }

    /// Largest |s'| over the curve's validated range.
    pub fn sup_speed(&self) -> f64 {
        self.sup_speed
    }

    /// Sample range for `Custom` curves, `None` for closed-form families.
    pub fn sample_domain(&self) -> Option<(f64, f64)> {
        match &self.kind {
            CurveKind::Sampled { spline } => Some(spline.domain()),
            _ => None,
        }
    }
}

fn require_eps(what: &'static str, eps: f64, lo: f64, hi: f64) -> Result<()> {
    if !(eps > lo && eps < hi) || !eps.is_finite() {
        return Err(Error::InvalidParameter {
            what,
            msg: format!("need {lo} < epsilon < {hi}, got {eps}"),
        });
    }
    Ok(())
}

/// Observability horizons of a curve.
///
/// `left`/`right` are `f64::INFINITY` when the corresponding characteristic
/// never returns (endpoint receding at asymptotic speed 1).
#[derive(Debug, Clone, Copy, Serialize)]
pub struct OptimalTimes {
    /// Exact horizon for observation at x = 0: gamma(0).
    pub left: f64,
    /// Exact horizon for observation at x = s(t): the root of beta(tau) = 1.
    pub right: f64,
    /// Horizon for observation at interior point a: a + gamma(-a).
    pub interior: Option<f64>,
}

/// Characteristic maps of a boundary curve with a validated working horizon.
///
/// Immutable after construction; cheap to clone and safe to share across
/// threads. The checked `alpha`/`beta` enforce `[0, t_max]`; the map
/// inversions and `gamma` work on the full mathematical domain, expanding
/// their own brackets as needed.
#[derive(Debug, Clone)]
pub struct CharMaps {
    curve: BoundaryCurve,
    t_max: f64,
}

impl CharMaps {
    /// Builds maps with the default horizon 10 * gamma(0) (or 20 when
    /// gamma(0) is infinite).
    pub fn new(curve: BoundaryCurve) -> Result<Self> {
        let mut maps = CharMaps {
            curve,
            t_max: f64::INFINITY,
        };
        let g0 = match maps.gamma(0.0) {
            Ok(v) => v,
            Err(Error::Saturated { .. }) => f64::INFINITY,
            Err(e) => return Err(e),
        };
        maps.t_max = if g0.is_finite() { 10.0 * g0 } else { 20.0 };
        // A sampled curve continues linearly past its data, so a negative
        // end slope eventually closes the width; the working horizon must
        // stop short of that collapse to keep the geometry meaningful.
        // Collapse before gamma(0) is impossible while |s'| < 1.
        if maps.curve.family() == Family::Custom {
            if let Some(tc) = maps.collapse_time(maps.t_max) {
                maps.t_max = tc - 1e-6 * (1.0 + tc);
            }
        }
        Ok(maps)
    }

    /// First time in `(0, hi]` where the width reaches zero, if any.
    fn collapse_time(&self, hi: f64) -> Option<f64> {
        const SCAN: usize = 4096;
        let mut prev = 0.0;
        for i in 1..=SCAN {
            let t = hi * i as f64 / SCAN as f64;
            if !(self.curve.s(t) > 0.0) {
                let (mut lo, mut up) = (prev, t);
                for _ in 0..80 {
                    let mid = 0.5 * (lo + up);
                    if self.curve.s(mid) > 0.0 {
                        lo = mid;
                    } else {
                        up = mid;
                    }
                }
                return Some(0.5 * (lo + up));
            }
            prev = t;
        }
        None
    }

    /// Builds maps with an explicit working horizon.
    pub fn with_horizon(curve: BoundaryCurve, t_max: f64) -> Result<Self> {
        if !(t_max > 0.0) || !t_max.is_finite() {
            return Err(Error::InvalidParameter {
                what: "t_max",
                msg: format!("need finite t_max > 0, got {t_max}"),
            });
        }
        Ok(CharMaps { curve, t_max })
    }

    pub fn curve(&self) -> &BoundaryCurve {
        &self.curve
    }

    pub fn t_max(&self) -> f64 {
        self.t_max
    }

    /// alpha(t) = t + s(t) on [0, t_max].
    pub fn alpha(&self, t: f64) -> Result<f64> {
        self.check_horizon("alpha argument", t)?;
        Ok(self.alpha_u(t))
    }

    /// beta(t) = t - s(t) on [0, t_max].
    pub fn beta(&self, t: f64) -> Result<f64> {
        self.check_horizon("beta argument", t)?;
        Ok(self.beta_u(t))
    }

    fn check_horizon(&self, what: &'static str, t: f64) -> Result<()> {
        if !t.is_finite() || t < 0.0 || t > self.t_max {
            return Err(Error::domain(what, t, 0.0, self.t_max));
        }
        Ok(())
    }

    pub(crate) fn alpha_u(&self, t: f64) -> f64 {
        t + self.curve.s(t)
    }

    pub(crate) fn beta_u(&self, t: f64) -> f64 {
        t - self.curve.s(t)
    }

    /// Inverse of beta: the time at which the rightgoing ray from
    /// coordinate y reaches the moving endpoint.
    pub fn beta_inv(&self, y: f64) -> Result<f64> {
        self.beta_inv_guess(y, None)
    }

    pub(crate) fn beta_inv_guess(&self, y: f64, guess: Option<f64>) -> Result<f64> {
        if !y.is_finite() || y < -1.0 - 1e-9 {
            return Err(Error::domain("beta_inv argument", y, -1.0, f64::INFINITY));
        }
        let y = y.max(-1.0);
        let hi = (y + 1.0) / (1.0 - self.curve.sup_speed().min(1.0 - SPEED_MARGIN)) + 1.0;
        rootfind::solve_increasing(
            |t| self.beta_u(t),
            |t| Some(1.0 - self.curve.s_prime(t)),
            y,
            0.0,
            hi,
            guess,
            WIDTH_TOL,
        )
    }

    /// Inverse of alpha: the time at which the leftgoing ray arriving at
    /// coordinate z departed from the endpoint... the departure time of the
    /// reflected ray whose arrival coordinate is z.
    pub fn alpha_inv(&self, z: f64) -> Result<f64> {
        if !z.is_finite() || z < 1.0 - 1e-9 {
            return Err(Error::domain("alpha_inv argument", z, 1.0, f64::INFINITY));
        }
        let z = z.max(1.0);
        let hi = (z - 1.0) / (1.0 - self.curve.sup_speed().min(1.0 - SPEED_MARGIN)) + 1.0;
        rootfind::solve_increasing(
            |t| self.alpha_u(t),
            |t| Some(1.0 + self.curve.s_prime(t)),
            z,
            0.0,
            hi,
            None,
            WIDTH_TOL,
        )
    }

    /// Return map gamma(y) = alpha(beta⁻¹(y)), defined for y >= -1 wherever
    /// beta reaches y; gamma(-1) = 1.
    pub fn gamma(&self, y: f64) -> Result<f64> {
        Ok(self.alpha_u(self.beta_inv(y)?))
    }

    pub(crate) fn gamma_guess(&self, y: f64, guess: Option<f64>) -> Result<(f64, f64)> {
        let t = self.beta_inv_guess(y, guess)?;
        Ok((self.alpha_u(t), t))
    }

    /// Inverse return map gamma⁻¹(z) = beta(alpha⁻¹(z)) for z >= 1.
    pub fn gamma_inv(&self, z: f64) -> Result<f64> {
        Ok(self.beta_u(self.alpha_inv(z)?))
    }

    /// gamma'(y) = (1 + s'(t)) / (1 - s'(t)) at t = beta⁻¹(y).
    pub fn gamma_prime(&self, y: f64) -> Result<f64> {
        let t = self.beta_inv(y)?;
        let sp = self.curve.s_prime(t);
        Ok((1.0 + sp) / (1.0 - sp))
    }

    pub(crate) fn gamma_prime_at_time(&self, t: f64) -> f64 {
        let sp = self.curve.s_prime(t);
        (1.0 + sp) / (1.0 - sp)
    }

    /// Exact observation horizons; infinite entries mean the configuration
    /// is never exactly observable from that sensor.
    pub fn optimal_times(&self, interior_a: Option<f64>) -> Result<OptimalTimes> {
        let left = match self.gamma(0.0) {
            Ok(v) => v,
            Err(Error::Saturated { .. }) => f64::INFINITY,
            Err(e) => return Err(e),
        };
        let right = match self.beta_inv(1.0) {
            Ok(v) => v,
            Err(Error::Saturated { .. }) => f64::INFINITY,
            Err(e) => return Err(e),
        };
        let interior = match interior_a {
            None => None,
            Some(a) => {
                if !(a > 0.0 && a < 1.0) {
                    return Err(Error::domain("interior point a", a, 0.0, 1.0));
                }
                match self.gamma(-a) {
                    Ok(v) => Some(a + v),
                    Err(Error::Saturated { .. }) => Some(f64::INFINITY),
                    Err(e) => return Err(e),
                }
            }
        };
        Ok(OptimalTimes {
            left,
            right,
            interior,
        })
    }
}
