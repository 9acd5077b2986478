//! Series solutions of the wave equation on a domain with a moving end.
//!
//! A field on `0 <= x <= s(t)` pinned at both ends expands over traveling
//! modes `exp(2*pi*i*n*phi(t+x)) - exp(2*pi*i*n*phi(t-x))`, where `phi`
//! solves the unit-shift equation for the boundary curve.  Each truncated
//! sum is itself an exact solution satisfying both pinning conditions, so
//! truncation error lives entirely in how well the initial data is
//! matched.
//!
//! The pipeline: initial displacement and velocity on `[0, 1]` are folded
//! into a single profile on `[-1, 1]` carrying the data along both
//! characteristic directions; mode coefficients are weighted projections
//! of that profile; the field and its derivatives are then evaluated
//! anywhere by two complex exponentials and a running product per point.

use num_complex::Complex64;
use rand::Rng;
use serde::Serialize;

use crate::abel::AbelSolution;
use crate::boundary::BoundaryCurve;
use crate::error::{Error, Result};
use crate::par;
use crate::quad;
use crate::spline::CubicSpline;

/// Default truncation order for CLI runs and sweeps.
pub const DEFAULT_MODES: usize = 32;

const TAU: f64 = std::f64::consts::TAU;

/// Fixed grid used to tabulate the cumulative velocity integral.
const CUM_GRID: usize = 1600;

#[derive(Debug, Clone)]
struct Bump {
    center: f64,
    width: f64,
    amp: f64,
}

impl Bump {
    /// `exp(1 - 1/(1-z^2))` inside the support, zero outside; infinitely
    /// smooth at the edges.
    fn value(&self, x: f64) -> f64 {
        let z = (x - self.center) / self.width;
        if z.abs() >= 1.0 {
            0.0
        } else {
            self.amp * (1.0 - 1.0 / (1.0 - z * z)).exp()
        }
    }

    fn deriv(&self, x: f64) -> f64 {
        let z = (x - self.center) / self.width;
        if z.abs() >= 1.0 {
            0.0
        } else {
            let d = 1.0 - z * z;
            self.amp * (1.0 - 1.0 / d).exp() * (-2.0 * z / (d * d)) / self.width
        }
    }
}

#[derive(Debug, Clone)]
enum Profile {
    Zero,
    /// `sum_k amp_k * sin(k*pi*x)`.
    HarmonicSum(Vec<(u32, f64)>),
    /// `amp * x * (1 - x)`.
    Poly { amp: f64 },
    Bumps(Vec<Bump>),
    Sampled(CubicSpline),
}

impl Profile {
    fn value(&self, x: f64) -> f64 {
        match self {
            Profile::Zero => 0.0,
            Profile::HarmonicSum(terms) => terms
                .iter()
                .map(|&(k, a)| a * (k as f64 * std::f64::consts::PI * x).sin())
                .sum(),
            Profile::Poly { amp } => amp * x * (1.0 - x),
            Profile::Bumps(parts) => parts.iter().map(|b| b.value(x)).sum(),
            Profile::Sampled(sp) => sp.eval(x),
        }
    }

    fn deriv(&self, x: f64) -> f64 {
        match self {
            Profile::Zero => 0.0,
            Profile::HarmonicSum(terms) => terms
                .iter()
                .map(|&(k, a)| {
                    let w = k as f64 * std::f64::consts::PI;
                    a * w * (w * x).cos()
                })
                .sum(),
            Profile::Poly { amp } => amp * (1.0 - 2.0 * x),
            Profile::Bumps(parts) => parts.iter().map(|b| b.deriv(x)).sum(),
            Profile::Sampled(sp) => sp.deriv(x),
        }
    }
}

/// Initial displacement `g` and velocity `f` on the unit-width starting
/// domain `[0, 1]`, with `g` pinned to zero at both ends.
#[derive(Debug, Clone)]
pub struct InitialData {
    g: Profile,
    f: Profile,
}

impl InitialData {
    /// `g = sin(pi x)`, `f = 0`: the fundamental standing mode.
    pub fn sine() -> Self {
        InitialData {
            g: Profile::HarmonicSum(vec![(1, 1.0)]),
            f: Profile::Zero,
        }
    }

    /// A smooth compactly supported displacement, zero velocity.
    pub fn bump() -> Self {
        InitialData {
            g: Profile::Bumps(vec![Bump {
                center: 0.5,
                width: 0.25,
                amp: 1.0,
            }]),
            f: Profile::Zero,
        }
    }

    /// `g = x(1-x)`, `f = 0`.
    pub fn poly() -> Self {
        InitialData {
            g: Profile::Poly { amp: 1.0 },
            f: Profile::Zero,
        }
    }

    /// Distinct smooth displacement and velocity, both nonzero.
    pub fn mixed() -> Self {
        InitialData {
            g: Profile::Bumps(vec![Bump {
                center: 0.35,
                width: 0.2,
                amp: 0.8,
            }]),
            f: Profile::Bumps(vec![Bump {
                center: 0.6,
                width: 0.25,
                amp: 1.2,
            }]),
        }
    }

    /// Looks up a preset by name.
    pub fn preset(name: &str) -> Result<Self> {
        match name {
            "sine" => Ok(Self::sine()),
            "bump" => Ok(Self::bump()),
            "poly" => Ok(Self::poly()),
            "mixed" => Ok(Self::mixed()),
            other => Err(Error::InvalidParameter {
                what: "initial data preset",
                msg: format!("unknown preset {other:?}; expected sine, bump, poly, or mixed"),
            }),
        }
    }

    /// Random smooth data: one to three displacement bumps and up to two
    /// velocity bumps, supports strictly inside the domain.  Deterministic
    /// for a given generator state.
    pub fn random<R: Rng>(rng: &mut R) -> Self {
        fn draw<R: Rng>(rng: &mut R, n: usize) -> Vec<Bump> {
            (0..n)
                .map(|_| Bump {
                    center: rng.gen_range(0.25..0.75),
                    width: rng.gen_range(0.10..0.24),
                    amp: rng.gen_range(0.3..1.0) * if rng.gen_bool(0.5) { 1.0 } else { -1.0 },
                })
                .collect()
        }
        let n_g = rng.gen_range(1..=3);
        let n_f = rng.gen_range(0..=2);
        let g = Profile::Bumps(draw(rng, n_g));
        let f = if n_f == 0 {
            Profile::Zero
        } else {
            Profile::Bumps(draw(rng, n_f))
        };
        InitialData { g, f }
    }

    /// Builds data from tabulated samples on a grid spanning `[0, 1]`.
    pub fn from_samples(x: Vec<f64>, g: Vec<f64>, f: Vec<f64>) -> Result<Self> {
        if x.first() != Some(&0.0) || x.last() != Some(&1.0) {
            return Err(Error::InvalidParameter {
                what: "initial data samples",
                msg: "grid must span [0, 1]".into(),
            });
        }
        let pin = g.first().unwrap_or(&1.0).abs().max(g.last().unwrap_or(&1.0).abs());
        if pin > 1e-9 {
            return Err(Error::InvalidParameter {
                what: "initial data samples",
                msg: format!("displacement must vanish at both ends, got residue {pin:.3e}"),
            });
        }
        let gs = CubicSpline::natural(x.clone(), g)?;
        let fs = CubicSpline::natural(x, f)?;
        Ok(InitialData {
            g: Profile::Sampled(gs),
            f: Profile::Sampled(fs),
        })
    }

    pub fn g(&self, x: f64) -> f64 {
        self.g.value(x)
    }

    pub fn g_prime(&self, x: f64) -> f64 {
        self.g.deriv(x)
    }

    pub fn f(&self, x: f64) -> f64 {
        self.f.value(x)
    }

    /// Squared data norm `int_0^1 g'(x)^2 + f(x)^2 dx`, the conserved
    /// energy scale of the unit-width string.
    pub fn norm_squared(&self) -> Result<f64> {
        let q = quad::integrate(
            |x| {
                let gp = self.g.deriv(x);
                let fv = self.f.value(x);
                gp * gp + fv * fv
            },
            0.0,
            1.0,
            1e-11,
            1e-14,
        )?;
        Ok(q.value)
    }
}

/// The initial data carried along both characteristic directions: a single
/// profile on `[-1, 1]` whose weighted projections are the mode
/// coefficients.
#[derive(Debug, Clone)]
pub struct FoldedProfile {
    data: InitialData,
    f_cum: CubicSpline,
}

impl FoldedProfile {
    pub fn new(data: InitialData) -> Result<Self> {
        let grid: Vec<f64> = (0..=CUM_GRID).map(|i| i as f64 / CUM_GRID as f64).collect();
        let values = quad::cumulative(|x| data.f(x), &grid, 1e-11)?;
        let slopes: Vec<f64> = grid.iter().map(|&x| data.f(x)).collect();
        let f_cum = CubicSpline::from_hermite(grid, values, slopes)?;
        Ok(FoldedProfile { data, f_cum })
    }

    /// Profile value at `y` in `[-1, 1]`: the right-moving part of the
    /// data for positive `y`, the left-moving part reflected for negative.
    pub fn h(&self, y: f64) -> f64 {
        if y >= 0.0 {
            0.5 * (self.data.g(y) + self.f_cum.eval(y))
        } else {
            0.5 * (-self.data.g(-y) + self.f_cum.eval(-y))
        }
    }

    /// Mismatch between the two expressions of the profile at the seam
    /// `y = +-1`; zero because the displacement is pinned at `x = 1`.
    pub fn seam_defect(&self) -> f64 {
        (self.h(1.0) - self.h(-1.0)).abs()
    }

    pub fn data(&self) -> &InitialData {
        &self.data
    }
}

/// Mode coefficients `A_n`, stored for positive and negative `n`
/// separately so synthetic non-real fields can be injected in tests.
#[derive(Debug, Clone)]
pub struct ModeCoefficients {
    /// `pos[k] = A_(k+1)`.
    pos: Vec<Complex64>,
    /// `neg[k] = A_(-(k+1))`.
    neg: Vec<Complex64>,
    /// True when `A_(-n) = conj(A_n)`, i.e. the field is real.
    hermitian: bool,
}

impl ModeCoefficients {
    /// Projects the folded profile on the first `n_modes` oscillating
    /// modes: `A_n = int_{-1}^{1} h(y) exp(-2 pi i n phi(y)) phi'(y) dy`.
    ///
    /// The weight makes the modes orthonormal, so this is a plain Fourier
    /// analysis in the conjugating coordinate.  Real profiles fill the
    /// negative side by conjugation.
    ///
    /// The cumulative-velocity part of the profile is integrated by parts
    /// first (its boundary term cancels because the kernel has period one
    /// across the fold), so the quadratures only ever see the data itself;
    /// evaluating the tabulated cumulative here would seed every
    /// coefficient with interpolation noise that the oscillatory kernels
    /// pick up coherently.
    pub fn project(folded: &FoldedProfile, abel: &AbelSolution, n_modes: usize) -> Result<Self> {
        if n_modes == 0 {
            return Err(Error::InvalidParameter {
                what: "n_modes",
                msg: "need at least one mode".into(),
            });
        }
        let data = folded.data();
        // Odd reflections carrying the data along both characteristics.
        let sg = |y: f64| {
            if y >= 0.0 {
                data.g(y)
            } else {
                -data.g(-y)
            }
        };
        let sf = |y: f64| {
            if y >= 0.0 {
                data.f(y)
            } else {
                -data.f(-y)
            }
        };
        let results = par::map_range(n_modes, |k| -> Result<Complex64> {
            let n = (k + 1) as f64;
            let g_re = quad::integrate(
                |y| sg(y) * (TAU * n * abel.phi(y)).cos() * abel.phi_prime(y),
                -1.0,
                1.0,
                1e-11,
                1e-13,
            )?;
            let g_im = quad::integrate(
                |y| -sg(y) * (TAU * n * abel.phi(y)).sin() * abel.phi_prime(y),
                -1.0,
                1.0,
                1e-11,
                1e-13,
            )?;
            let f_re = quad::integrate(
                |y| sf(y) * (TAU * n * abel.phi(y)).cos(),
                -1.0,
                1.0,
                1e-11,
                1e-13,
            )?;
            let f_im = quad::integrate(
                |y| -sf(y) * (TAU * n * abel.phi(y)).sin(),
                -1.0,
                1.0,
                1e-11,
                1e-13,
            )?;
            // A_n = (1/2) G + (1/(4 pi i n)) Z with G, Z the two integrals.
            let re = 0.5 * g_re.value + f_im.value / (2.0 * TAU * n);
            let im = 0.5 * g_im.value - f_re.value / (2.0 * TAU * n);
            Ok(Complex64::new(re, im))
        });
        let mut pos = Vec::with_capacity(n_modes);
        for r in results {
            pos.push(r?);
        }
        let neg = pos.iter().map(|c| c.conj()).collect();
        Ok(ModeCoefficients {
            pos,
            neg,
            hermitian: true,
        })
    }

    /// Installs explicit coefficients (`pos[k] = A_(k+1)`,
    /// `neg[k] = A_(-(k+1))`), detecting whether they describe a real
    /// field.
    pub fn from_modes(pos: Vec<Complex64>, neg: Vec<Complex64>) -> Result<Self> {
        if pos.is_empty() || pos.len() != neg.len() {
            return Err(Error::InvalidParameter {
                what: "mode coefficients",
                msg: "need equal nonzero counts for both signs".into(),
            });
        }
        let hermitian = pos
            .iter()
            .zip(&neg)
            .all(|(p, n)| (n - p.conj()).norm() <= 1e-12 * (1.0 + p.norm()));
        Ok(ModeCoefficients {
            pos,
            neg,
            hermitian,
        })
    }

    pub fn len(&self) -> usize {
        self.pos.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pos.is_empty()
    }

    pub fn hermitian(&self) -> bool {
        self.hermitian
    }

    /// `A_n` for any nonzero `|n| <= len()`.
    pub fn get(&self, n: i32) -> Complex64 {
        let k = (n.unsigned_abs() as usize).saturating_sub(1);
        match n {
            0 => Complex64::new(0.0, 0.0),
            _ if n > 0 => self.pos.get(k).copied().unwrap_or_default(),
            _ => self.neg.get(k).copied().unwrap_or_default(),
        }
    }

    /// `sum_n |A_n|^2` over both signs.
    pub fn plain_moment(&self) -> f64 {
        self.pos
            .iter()
            .zip(&self.neg)
            .map(|(p, n)| p.norm_sqr() + n.norm_sqr())
            .sum()
    }

    /// `sum_n n^2 |A_n|^2` over both signs: the spectral weight entering
    /// every energy and observability identity.
    pub fn second_moment(&self) -> f64 {
        self.pos
            .iter()
            .zip(&self.neg)
            .enumerate()
            .map(|(k, (p, n))| {
                let nn = (k + 1) as f64;
                nn * nn * (p.norm_sqr() + n.norm_sqr())
            })
            .sum()
    }

    /// Estimated truncated mass `sum_{|n| > N} n^2 |A_n|^2` from a power
    /// fit on the last octave of computed magnitudes.  `None` when the
    /// decay is too slow or too irregular to extrapolate.
    pub fn weighted_tail_estimate(&self) -> Option<f64> {
        let n = self.pos.len();
        if n < 8 {
            return None;
        }
        let lo = n / 2;
        let mut lx = Vec::new();
        let mut ly = Vec::new();
        for k in lo..n {
            let mag = (self.pos[k].norm_sqr() + self.neg[k].norm_sqr()).sqrt();
            if mag > 1e-150 {
                lx.push(((k + 1) as f64).ln());
                ly.push(mag.ln());
            }
        }
        if lx.len() < 4 {
            return Some(0.0);
        }
        let m = lx.len() as f64;
        let mx = lx.iter().sum::<f64>() / m;
        let my = ly.iter().sum::<f64>() / m;
        let sxx: f64 = lx.iter().map(|a| (a - mx) * (a - mx)).sum();
        let sxy: f64 = lx.iter().zip(&ly).map(|(a, b)| (a - mx) * (b - my)).sum();
        if sxx <= 0.0 {
            return None;
        }
        let p = -sxy / sxx;
        let c = (my + p * mx).exp();
        // Tail of sum n^2 (c n^-p)^2 requires 2p - 2 > 1.
        if !(p > 1.6) {
            return None;
        }
        let q = 2.0 * p - 2.0;
        let x = n as f64 + 1.0;
        Some(c * c * (x.powf(1.0 - q) / (q - 1.0) + 0.5 * x.powf(-q)))
    }
}

/// A sampled field value with its space and time derivatives.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct FieldSample {
    pub u: Complex64,
    pub u_x: Complex64,
    pub u_t: Complex64,
}

/// A truncated series solution on a moving domain: boundary curve,
/// certified conjugation, and mode coefficients.
#[derive(Debug, Clone)]
pub struct WaveField {
    curve: BoundaryCurve,
    abel: AbelSolution,
    coeffs: ModeCoefficients,
}

impl WaveField {
    pub fn new(curve: BoundaryCurve, abel: AbelSolution, coeffs: ModeCoefficients) -> Self {
        WaveField {
            curve,
            abel,
            coeffs,
        }
    }

    /// Builds the field for given data by folding and projecting.
    pub fn from_data(
        curve: BoundaryCurve,
        abel: AbelSolution,
        data: InitialData,
        n_modes: usize,
    ) -> Result<Self> {
        let folded = FoldedProfile::new(data)?;
        let coeffs = ModeCoefficients::project(&folded, &abel, n_modes)?;
        Ok(Self::new(curve, abel, coeffs))
    }

    pub fn curve(&self) -> &BoundaryCurve {
        &self.curve
    }

    pub fn abel(&self) -> &AbelSolution {
        &self.abel
    }

    pub fn coefficients(&self) -> &ModeCoefficients {
        &self.coeffs
    }

    /// Evaluates the field and both first derivatives at `(x, t)`.
    ///
    /// Cost is two complex exponentials plus one complex multiply per
    /// mode: powers of the two characteristic phases are accumulated by a
    /// running product.
    pub fn eval(&self, x: f64, t: f64) -> FieldSample {
        let yp = t + x;
        let ym = t - x;
        let pp = self.abel.phi(yp);
        let pm = self.abel.phi(ym);
        let dp = self.abel.phi_prime(yp);
        let dm = self.abel.phi_prime(ym);
        let wp = Complex64::from_polar(1.0, TAU * pp);
        let wm = Complex64::from_polar(1.0, TAU * pm);

        let mut u = Complex64::default();
        let mut u_x = Complex64::default();
        let mut u_t = Complex64::default();
        let mut wpk = Complex64::new(1.0, 0.0);
        let mut wmk = Complex64::new(1.0, 0.0);
        for k in 0..self.coeffs.len() {
            wpk *= wp;
            wmk *= wm;
            let n = (k + 1) as f64;
            let rot = Complex64::new(0.0, TAU * n);

            let cp = self.coeffs.pos[k];
            u += cp * (wpk - wmk);
            u_x += cp * rot * (dp * wpk + dm * wmk);
            u_t += cp * rot * (dp * wpk - dm * wmk);

            let cn = self.coeffs.neg[k];
            let vpk = wpk.conj();
            let vmk = wmk.conj();
            u += cn * (vpk - vmk);
            u_x -= cn * rot * (dp * vpk + dm * vmk);
            u_t -= cn * rot * (dp * vpk - dm * vmk);
        }
        FieldSample { u, u_x, u_t }
    }

    /// Instantaneous energy `1/2 int_0^s(t) |u_x|^2 + |u_t|^2 dx`.
    pub fn energy(&self, t: f64) -> Result<f64> {
        let s = self.curve.s(t);
        let q = quad::integrate(
            |x| {
                let smp = self.eval(x, t);
                smp.u_x.norm_sqr() + smp.u_t.norm_sqr()
            },
            0.0,
            s,
            1e-9,
            1e-12,
        )?;
        Ok(0.5 * q.value)
    }
}
