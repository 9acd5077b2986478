//! Named end-to-end checks for the `verify` front end.
//!
//! Each check exercises one certified property of the pipeline on a
//! built-in curve family and reports a measured defect against its bound.
//! `Quick` runs the straight-line family only; `Full` covers all four
//! families plus the constructive-solver cross-validation. Randomized
//! trials draw from a caller-supplied seed, so a run is reproducible
//! byte-for-byte.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::abel::{self, AbelSolution};
use crate::boundary::{BoundaryCurve, CharMaps};
use crate::error::{Error, Result};
use crate::observability::{self, GramAnalysis, ObservationReport};
use crate::wave::{InitialData, WaveField};

/// How much of the suite to run.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Depth {
    Quick,
    Full,
}

/// Outcome of one named check.
#[derive(Debug, Clone, Serialize)]
pub struct CheckResult {
    pub name: &'static str,
    pub family: &'static str,
    pub passed: bool,
    /// Measured defect (or quantity under test; see `note`).
    pub measured: f64,
    /// Bound the measurement is compared against.
    pub bound: f64,
    pub note: String,
}

impl CheckResult {
    fn defect(
        name: &'static str,
        family: &'static str,
        measured: f64,
        bound: f64,
        note: impl Into<String>,
    ) -> Self {
        CheckResult {
            name,
            family,
            passed: measured.is_finite() && measured <= bound,
            measured,
            bound,
            note: note.into(),
        }
    }
}

/// Runs the suite; every check appears in the output, failed checks carry
/// their defect or error text in `note`.
pub fn run(depth: Depth, seed: u64) -> Vec<CheckResult> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let families: Vec<(&'static str, BoundaryCurve)> = match depth {
        Depth::Quick => vec![("linear", BoundaryCurve::linear(0.5).unwrap())],
        Depth::Full => vec![
            ("linear", BoundaryCurve::linear(0.5).unwrap()),
            ("parabolic", BoundaryCurve::parabolic(1.0).unwrap()),
            ("hyperbolic", BoundaryCurve::hyperbolic(1.0).unwrap()),
            ("shrinking", BoundaryCurve::shrinking(0.5).unwrap()),
        ],
    };
    let mut out = Vec::new();
    for (family, curve) in &families {
        family_block(&mut out, family, curve, depth, &mut rng);
    }
    if depth == Depth::Full {
        solver_block(&mut out);
    }
    out
}

/// True when every check passed.
pub fn all_passed(results: &[CheckResult]) -> bool {
    results.iter().all(|r| r.passed)
}

fn push<F>(out: &mut Vec<CheckResult>, name: &'static str, family: &'static str, f: F)
where
    F: FnOnce() -> Result<CheckResult>,
{
    out.push(match f() {
        Ok(result) => result,
        Err(e) => CheckResult {
            name,
            family,
            passed: false,
            measured: f64::NAN,
            bound: f64::NAN,
            note: format!("error: {e}"),
        },
    });
}

fn family_block(
    out: &mut Vec<CheckResult>,
    family: &'static str,
    curve: &BoundaryCurve,
    depth: Depth,
    rng: &mut ChaCha8Rng,
) {
    let modes = match depth {
        Depth::Quick => 16,
        Depth::Full => 32,
    };
    let trials = match depth {
        Depth::Quick => 3,
        Depth::Full => 10,
    };

    let prepared: Result<(CharMaps, AbelSolution, WaveField)> = (|| {
        let maps = CharMaps::new(curve.clone())?;
        let sol = abel::closed_form(curve)?;
        let field =
            WaveField::from_data(curve.clone(), sol.clone(), InitialData::mixed(), modes)?;
        Ok((maps, sol, field))
    })();
    let (maps, sol, field) = match prepared {
        Ok(v) => v,
        Err(e) => {
            out.push(CheckResult {
                name: "setup",
                family,
                passed: false,
                measured: f64::NAN,
                bound: f64::NAN,
                note: format!("error: {e}"),
            });
            return;
        }
    };

    push(out, "conjugation_residual", family, || {
        let worst = sol.shift_defect(&maps, 10.0, 2000);
        Ok(CheckResult::defect(
            "conjugation_residual",
            family,
            worst,
            1e-10,
            "sup |phi(alpha) - phi(beta) - 1| on 2000 points of [0, 10]",
        ))
    });

    push(out, "return_ray_round_trip", family, || {
        use rand::Rng;
        let hi = maps.beta(10.0_f64.min(maps.t_max()))?;
        let mut worst = 0.0f64;
        for _ in 0..1000 {
            let y = rng.gen_range(-1.0..hi);
            let t = maps.beta_inv(y)?;
            worst = worst.max((maps.beta(t)? - y).abs());
        }
        Ok(CheckResult::defect(
            "return_ray_round_trip",
            family,
            worst,
            1e-9,
            "beta(beta_inv(y)) round trip on 1000 random rays",
        ))
    });

    push(out, "spectral_norm_sandwich", family, || {
        let norm = 2.0 * field.energy(0.0)?;
        let s2 = field.coefficients().second_moment();
        let (m0, big_m0) = sol.phi_prime_range(-1.0, 1.0);
        let pi2 = std::f64::consts::PI.powi(2);
        let lo = 8.0 * pi2 * m0 * s2;
        let hi = 8.0 * pi2 * big_m0 * s2;
        let violation = ((lo - norm).max(norm - hi)).max(0.0) / norm;
        Ok(CheckResult::defect(
            "spectral_norm_sandwich",
            family,
            violation,
            1e-9,
            format!("norm {norm:.6} vs [{lo:.6}, {hi:.6}]"),
        ))
    });

    push(out, "energy_sandwich", family, || {
        let mut worst = 0.0f64;
        for _ in 0..trials {
            let data = InitialData::random(rng);
            let f = WaveField::from_data(curve.clone(), sol.clone(), data, modes)?;
            let norm = 2.0 * f.energy(0.0)?;
            let (m0, big_m0) = sol.phi_prime_range(-1.0, 1.0);
            for i in 0..5 {
                let t = 0.4 * i as f64;
                let e = f.energy(t)?;
                let (mt, big_mt) = sol.phi_prime_range(maps.beta(t)?, maps.alpha(t)?);
                let lo = mt / (2.0 * big_m0) * norm;
                let hi = big_mt / (2.0 * m0) * norm;
                worst = worst.max(((lo - e).max(e - hi)).max(0.0) / norm);
            }
        }
        Ok(CheckResult::defect(
            "energy_sandwich",
            family,
            worst,
            1e-9,
            format!("{trials} random data sets at 5 times"),
        ))
    });

    push(out, "energy_flux", family, || {
        let h = 1e-4;
        let mut worst = 0.0f64;
        for i in 0..10 {
            let t = 0.15 + 0.17 * i as f64;
            let fd = (field.energy(t + h)? - field.energy(t - h)?) / (2.0 * h);
            let sp = curve.s_prime(t);
            let edge = field.eval(curve.s(t), t).u_x.norm_sqr();
            let rhs = 0.5 * sp * (sp * sp - 1.0) * edge;
            let tol = (1e-2 * rhs.abs()).max(1e-4);
            worst = worst.max((fd - rhs).abs() / tol);
            if rhs != 0.0 && fd.signum() != -sp.signum() && fd.abs() > tol {
                return Ok(CheckResult::defect(
                    "energy_flux",
                    family,
                    f64::INFINITY,
                    1.0,
                    format!("energy drift sign violates the slope law at t = {t}"),
                ));
            }
        }
        Ok(CheckResult::defect(
            "energy_flux",
            family,
            worst,
            1.0,
            "finite-difference energy drift vs edge flux at 10 times (scaled)",
        ))
    });

    // Sensors whose optimal windows never close are asserted to say so.
    if family == "hyperbolic" {
        push(out, "endpoint_window_never_closes", family, || {
            let saturated = matches!(
                observability::observe_left(&field, None),
                Err(Error::Saturated { .. })
            );
            Ok(CheckResult {
                name: "endpoint_window_never_closes",
                family,
                passed: saturated,
                measured: f64::NAN,
                bound: f64::NAN,
                note: "the end outruns every return ray; no finite window suffices".into(),
            })
        });
        return;
    }

    push(out, "fixed_end_report", family, || {
        let report = observability::observe_left(&field, None)?;
        Ok(report_check("fixed_end_report", family, &report, 1e-5))
    });

    push(out, "moving_end_report", family, || {
        let report = observability::observe_right(&field, None)?;
        let w = report.detail["w_integral"];
        let lo = report.detail["w_lower"];
        let hi = report.detail["w_upper"];
        let violation = ((lo - w).max(w - hi)).max(0.0) / hi;
        let measured = if report.pass { violation } else { f64::INFINITY };
        Ok(CheckResult::defect(
            "moving_end_report",
            family,
            measured,
            1e-9,
            "two-sided bounds and the weighted sandwich at the moving end",
        ))
    });

    push(out, "interior_report", family, || {
        let report = observability::observe_interior(&field, 0.5)?;
        Ok(report_check("interior_report", family, &report, 1e-5))
    });

    match family {
        "linear" => {
            push(out, "comoving_shift_split", family, || {
                let report = observability::observe_moving(&field, 0.3)?;
                Ok(CheckResult::defect(
                    "comoving_shift_split",
                    family,
                    report.detail["shift_defect"],
                    1e-12,
                    "additive split of the conjugation along the dilated path",
                ))
            });
            push(out, "comoving_report", family, || {
                let report = observability::observe_moving(&field, 0.3)?;
                Ok(report_check("comoving_report", family, &report, 1e-5))
            });
        }
        _ => {
            push(out, "comoving_rejected", family, || {
                let rejected = matches!(
                    observability::observe_moving(&field, 0.3),
                    Err(Error::Hypothesis { .. })
                );
                Ok(CheckResult {
                    name: "comoving_rejected",
                    family,
                    passed: rejected,
                    measured: f64::NAN,
                    bound: f64::NAN,
                    note: "comoving sensors need a proportionally dilating width".into(),
                })
            });
        }
    }

    match family {
        "linear" | "parabolic" => {
            push(out, "combined_gain_grows", family, || {
                let windows: &[f64] = match depth {
                    Depth::Quick => &[4.0, 8.0],
                    Depth::Full => &[4.0, 8.0, 16.0, 32.0],
                };
                let fixed = InitialData::sine();
                let mut min_step = f64::INFINITY;
                let mut prev = 0.0;
                for &tau in windows {
                    let report = observability::observe_simultaneous(&field, &fixed, tau)?;
                    if !report.pass {
                        return Ok(CheckResult {
                            name: "combined_gain_grows",
                            family,
                            passed: false,
                            measured: f64::NAN,
                            bound: f64::NAN,
                            note: format!("combined bounds failed at window {tau}"),
                        });
                    }
                    let lambda = report.detail["lambda"];
                    min_step = min_step.min(lambda - prev);
                    prev = lambda;
                }
                // Defect orientation: negated growth step must stay below
                // (minus) a strictness margin.
                Ok(CheckResult::defect(
                    "combined_gain_grows",
                    family,
                    -min_step,
                    -1e-12,
                    format!("captured-energy multiple reaches {prev:.3}; steps stay positive"),
                ))
            });
        }
        "shrinking" => {
            push(out, "combined_rejected", family, || {
                let rejected = matches!(
                    observability::observe_simultaneous(&field, &InitialData::sine(), 8.0),
                    Err(Error::Hypothesis { .. })
                );
                Ok(CheckResult {
                    name: "combined_rejected",
                    family,
                    passed: rejected,
                    measured: f64::NAN,
                    bound: f64::NAN,
                    note: "a contracting return map starves the combined estimate".into(),
                })
            });
        }
        _ => {}
    }

    push(out, "gram_full_window", family, || {
        let tau = maps.gamma(0.0)?;
        let dim = match depth {
            Depth::Quick => 16,
            Depth::Full => 32,
        };
        let gram = gram_at(&sol, tau, dim)?;
        Ok(CheckResult::defect(
            "gram_full_window",
            family,
            (1.0 - gram.sigma_min).abs(),
            1e-6,
            "windowed mode Gram matrix is the identity on a full return window",
        ))
    });

    push(out, "gram_short_window", family, || {
        let tau = 0.5 * maps.gamma(0.0)?;
        let gram = gram_at(&sol, tau, 32)?;
        Ok(CheckResult::defect(
            "gram_short_window",
            family,
            gram.sigma_min,
            0.1,
            "half a return window leaves some mode combination nearly invisible",
        ))
    });
}

fn gram_at(sol: &AbelSolution, tau: f64, dim: usize) -> Result<GramAnalysis> {
    observability::gram_analysis(sol, tau, dim, 0.5)
}

fn report_check(
    name: &'static str,
    family: &'static str,
    report: &ObservationReport,
    tol: f64,
) -> CheckResult {
    let rel = report.weighted.map(|w| w.rel_err).unwrap_or(0.0);
    let measured = if report.pass { rel } else { f64::INFINITY };
    CheckResult::defect(
        name,
        family,
        measured,
        tol,
        "two-sided bounds hold; weighted trace matches its closed expression",
    )
}

fn solver_block(out: &mut Vec<CheckResult>) {
    push(out, "expansive_product_cross_check", "linear", || {
        let mut worst = 0.0f64;
        for eps in [0.25, 0.5] {
            let curve = BoundaryCurve::linear(eps).unwrap();
            let maps = CharMaps::new(curve.clone())?;
            let exact = abel::closed_form(&curve)?;
            let prod = abel::product_expansive(&maps, abel::CONSTRUCTIVE_TOL)?;
            worst = worst.max(sup_diff(&prod, &exact, -1.0, 6.0));
        }
        Ok(CheckResult::defect(
            "expansive_product_cross_check",
            "linear",
            worst,
            1e-5,
            "product solver vs closed form, slopes 0.25 and 0.5",
        ))
    });

    push(out, "power_law_product_cross_check", "parabolic", || {
        let curve = BoundaryCurve::parabolic(1.0).unwrap();
        let maps = CharMaps::new(curve.clone())?;
        let exact = abel::closed_form(&curve)?;
        let prod = abel::product_parabolic(&maps, Some((0.5, 2.0)), abel::CONSTRUCTIVE_TOL)?;
        Ok(CheckResult::defect(
            "power_law_product_cross_check",
            "parabolic",
            sup_diff(&prod, &exact, -1.0, 6.0),
            1e-5,
            "product solver vs closed form at unit slope parameter",
        ))
    });

    push(out, "quotient_solver_cross_check", "shrinking", || {
        let curve = BoundaryCurve::shrinking(0.5).unwrap();
        let maps = CharMaps::new(curve.clone())?;
        let exact = abel::closed_form(&curve)?;
        let sol = abel::levy(&maps, -1.0, 1 << 13, abel::CONSTRUCTIVE_TOL)?;
        Ok(CheckResult::defect(
            "quotient_solver_cross_check",
            "shrinking",
            sup_diff(&sol, &exact, -1.0, 4.0),
            1e-4,
            "difference-quotient solver vs closed form",
        ))
    });
}

fn sup_diff(a: &AbelSolution, b: &AbelSolution, lo: f64, hi: f64) -> f64 {
    (0..=1400)
        .map(|i| {
            let x = lo + (hi - lo) * i as f64 / 1400.0;
            (a.phi(x) - b.phi(x)).abs()
        })
        .fold(0.0, f64::max)
}
