//! One check per acceptance criterion, shared by the acceptance test target
//! and the `validate` subcommand.

use std::f64::consts::PI;
use std::time::Instant;

use num_complex::Complex64;
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};
use serde::Serialize;
use statrs::function::gamma::gamma;

use crate::airy::{airy_asymptotic, airy_eval, airy_series, envelope, OVERLAP_BAND};
use crate::approximant::{direction_errors, sup_errors, uniform_wu_solution};
use crate::blowup::{chart2_propagate, flow, xc_yc, xc_yc_airy, ChartId, ChartPoint};
use crate::eigen::{bs_energies, eigen_table, reference_energies};
use crate::error::Result;
use crate::problem::{catalog, ProblemSpec};
use crate::reference::{rate_fit, Integrator, IntegratorConfig, LogScaledState};
use crate::series::chart3::{b0_coeffs, chart3_double_coeffs};
use crate::series::riccati::{ell_residual, even_odd_check, hyp_residual};

#[derive(Debug, Clone, Serialize)]
pub struct CriterionReport {
    pub id: String,
    pub name: String,
    pub passed: bool,
    /// The headline measured quantity.
    pub measured: f64,
    pub threshold: String,
    pub detail: String,
    pub seconds: f64,
}

impl CriterionReport {
    pub fn line(&self) -> String {
        format!(
            "{} criterion {} ({}): measured {:.4e}, required {} [{:.2}s] {}",
            if self.passed { "PASS" } else { "FAIL" },
            self.id,
            self.name,
            self.measured,
            self.threshold,
            self.seconds,
            self.detail
        )
    }
}

/// Criteria whose threshold the method cannot meet on the stated grid (see README).
pub const KNOWN_UNATTAINABLE: &[&str] = &["3"];

fn report(id: &str, name: &str, start: Instant, limit: f64, r: Result<(bool, f64, String, String)>) -> CriterionReport {
    let seconds = start.elapsed().as_secs_f64();
    match r {
        Ok((ok, measured, threshold, detail)) => CriterionReport {
            id: id.into(),
            name: name.into(),
            passed: ok && seconds < limit,
            measured,
            threshold: format!("{threshold}, runtime < {limit} s"),
            detail,
            seconds,
        },
        Err(e) => CriterionReport {
            id: id.into(),
            name: name.into(),
            passed: false,
            measured: f64::NAN,
            threshold: format!("runtime < {limit} s"),
            detail: format!("error: {e}"),
            seconds,
        },
    }
}

/// 1. Airy dual evaluation, Wronskian and values at 0.
pub fn criterion_1() -> CriterionReport {
    let start = Instant::now();
    let r = (|| -> Result<_> {
        let (lo, hi) = OVERLAP_BAND;
        let mut band = 0.0f64;
        let mut wr = 0.0f64;
        for k in 0..=1700 {
            let x = -12.0 + 0.01 * k as f64;
            let a = airy_eval(x)?;
            wr = wr.max((a.wronskian() - 1.0 / PI).abs());
            if (lo..=hi).contains(&x.abs()) {
                let s = airy_series(x);
                let b = airy_asymptotic(x)?;
                let (ea, eap, eb, ebp) = envelope(&s, x);
                band = band
                    .max((s.ai - b.ai).abs() / ea)
                    .max((s.aip - b.aip).abs() / eap)
                    .max((s.bi - b.bi).abs() / eb)
                    .max((s.bip - b.bip).abs() / ebp);
            }
        }
        let a0 = airy_eval(0.0)?;
        let ai0 = 1.0 / (3f64.powf(2.0 / 3.0) * gamma(2.0 / 3.0));
        let aip0 = -1.0 / (3f64.cbrt() * gamma(1.0 / 3.0));
        let bi0 = 1.0 / (3f64.powf(1.0 / 6.0) * gamma(2.0 / 3.0));
        let zero = (a0.ai - ai0).abs().max((a0.aip - aip0).abs()).max((a0.bi - bi0).abs());
        let ok = band <= 1e-9 && wr <= 1e-12 && zero <= 1e-12;
        Ok((
            ok,
            band,
            "band ≤ 1e-9, Wronskian ≤ 1e-12, values at 0 ≤ 1e-12".to_string(),
            format!("band {band:.2e}, Wronskian {wr:.2e}, at 0 {zero:.2e}"),
        ))
    })();
    report("1", "Airy core", start, 5.0, r)
}

/// 2. For `μ = t` the approximant is the Airy pair.
pub fn criterion_2() -> CriterionReport {
    let start = Instant::now();
    let r = (|| -> Result<_> {
        let p = catalog::linear();
        let eps = 1e-2;
        let mut worst = 0.0f64;
        for k in 0..=600 {
            let t = -0.3 + 0.001 * k as f64;
            let (x, y) = uniform_wu_solution(&p, eps, 0.2, t)?.unscaled();
            let a = airy_eval(-t / eps.powf(2.0 / 3.0))?;
            let ya = -eps.cbrt() * a.aip;
            let (sx, sy) = if t > 0.0 {
                (a.ai.hypot(a.bi), eps.cbrt() * a.aip.hypot(a.bip))
            } else {
                (a.ai.abs(), ya.abs())
            };
            worst = worst.max((x - a.ai).abs() / sx).max((y - ya).abs() / sy);
        }
        Ok((
            worst <= 1e-8,
            worst,
            "≤ 1e-8".into(),
            "601 points on [−0.3, 0.3], ε = 1e-2".into(),
        ))
    })();
    report("2", "μ = t exactness", start, 5.0, r)
}

pub const RATE_EPS: [f64; 4] = [1e-1, 5e-2, 2.5e-2, 1.25e-2];
pub const RATE_GRID: usize = 801;
pub const REF_TOL: f64 = 1e-11;

/// 3. Sup relative error slope of the uniform approximant.
pub fn criterion_3() -> CriterionReport {
    let start = Instant::now();
    let r = (|| -> Result<_> {
        let p = catalog::quadratic();
        let errs = sup_errors(&p, &RATE_EPS, 0.2, -0.2, 0.2, RATE_GRID, REF_TOL)?;
        let fit = rate_fit(&errs)?;
        let ok = (0.55..=0.85).contains(&fit.slope);
        Ok((
            ok,
            fit.slope,
            "slope in [0.55, 0.85]".into(),
            format!(
                "errors {:?}, ±{:.2}",
                errs.iter().map(|e| format!("{:.3e}", e.1)).collect::<Vec<_>>(),
                fit.half_width
            ),
        ))
    })();
    report("3", "connection rate", start, 60.0, r)
}

/// Diagnostic companion to criterion 3 on smaller ε, where the approximant's
/// intervals separate inside `[−0.2, 0.2]`.
pub fn criterion_3_small_eps() -> CriterionReport {
    let start = Instant::now();
    let r = (|| -> Result<_> {
        let p = catalog::quadratic();
        let eps = [4e-3, 2e-3, 1e-3, 5e-4];
        let errs = sup_errors(&p, &eps, 0.2, -0.2, 0.2, RATE_GRID, REF_TOL)?;
        let fit = rate_fit(&errs)?;
        Ok((
            (0.55..=0.85).contains(&fit.slope),
            fit.slope,
            "slope in [0.55, 0.85] (diagnostic)".into(),
            format!(
                "ε = 4e-3 … 5e-4, errors {:?}",
                errs.iter().map(|e| format!("{:.3e}", e.1)).collect::<Vec<_>>()
            ),
        ))
    })();
    report("3b", "connection rate, small ε (diagnostic)", start, 60.0, r)
}

/// 4. Direction of the unstable bundle at `ν = 0.25`.
pub fn criterion_4() -> CriterionReport {
    let start = Instant::now();
    let r = (|| -> Result<_> {
        let p = catalog::quadratic();
        let errs = direction_errors(&p, 0.25, &RATE_EPS, REF_TOL)?;
        let fit = rate_fit(&errs)?;
        Ok((
            fit.slope >= 0.55,
            fit.slope,
            "slope ≥ 0.55".into(),
            format!(
                "angles {:?}",
                errs.iter().map(|e| format!("{:.3e}", e.1)).collect::<Vec<_>>()
            ),
        ))
    })();
    report("4", "W^u direction", start, 60.0, r)
}

fn residual_slope(n: usize, hyperbolic: bool) -> Result<f64> {
    let p = catalog::quadratic();
    let eps = [0.02, 0.01, 0.005, 0.0025];
    let pairs = eps
        .iter()
        .map(|&e| {
            let r = if hyperbolic {
                hyp_residual(&p, -0.3, n, e)?.abs()
            } else {
                ell_residual(&p, 0.3, n, e)?.norm()
            };
            Ok((e, r))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(rate_fit(&pairs)?.slope)
}

/// 5. Series suite.
pub fn criterion_5() -> CriterionReport {
    let start = Instant::now();
    let r = (|| -> Result<_> {
        let b = b0_coeffs(2);
        let exact = b.coeffs[1] == Complex64::new(0.0, -0.25) && b.coeffs[2] == Complex64::new(-7.0 / 32.0, 0.0);
        let matched = chart3_double_coeffs(&catalog::quadratic(), 0, 2)?;
        let agree = matched[0][1] == b.coeffs[1] && matched[0][2] == b.coeffs[2];
        let eo = even_odd_check(&ProblemSpec::from_mu(vec![0.0, 1.0, 0.5], 1.5)?, 1.0, 3)?;
        let eo_max = eo.iter().fold(0.0f64, |a, &b| a.max(b));
        let mut slopes = Vec::new();
        let mut worst = f64::INFINITY;
        for n in 1..=3 {
            for hyp in [true, false] {
                let s = residual_slope(n, hyp)?;
                worst = worst.min(s - (n as f64 + 0.8));
                slopes.push(format!("{}{n}:{s:.3}", if hyp { "h" } else { "e" }));
            }
        }
        let ok = exact && agree && eo_max <= 1e-12 && worst >= 0.0;
        Ok((
            ok,
            eo_max,
            "b₁, b₂ exact; even/odd ≤ 1e-12; residual slopes ≥ N + 0.8".into(),
            format!(
                "b exact {exact}, matched {agree}, even/odd {eo_max:.2e}, slopes {}",
                slopes.join(" ")
            ),
        ))
    })();
    report("5", "series suite", start, 10.0, r)
}

/// 6. `x_ℂ` from the `B₀` series against `√π(Ai − iBi)`.
pub fn criterion_6() -> CriterionReport {
    let start = Instant::now();
    let r = (|| -> Result<_> {
        let mut worst = 0.0f64;
        for k in 0..=100 {
            let e3 = 0.05 + 0.0025 * k as f64;
            let (x, _) = xc_yc(e3)?;
            let (xa, _) = xc_yc_airy(e3)?;
            worst = worst.max((x - xa).norm() / x.norm());
        }
        Ok((
            worst <= 1e-3,
            worst,
            "≤ 1e-3".into(),
            "101 points on ε₃ ∈ [0.05, 0.3], L = 20".into(),
        ))
    })();
    report("6", "x_ℂ identity", start, 5.0, r)
}

fn rel_close(a: f64, b: f64) -> f64 {
    (a - b).abs() / a.abs().max(b.abs()).max(1.0)
}

/// 7. Chart geometry and chart-2 Airy propagation.
pub fn criterion_7() -> CriterionReport {
    charts_check(&catalog::quadratic(), 1000, 0x7e57)
}

/// Round trips on `points` random chart points, chart-2 Airy propagation and
/// conservation of the blown-down ε along chart-1 and chart-3 flows of `problem`
/// (normalized first).
pub fn charts_check(problem: &ProblemSpec, points: usize, seed: u64) -> CriterionReport {
    let start = Instant::now();
    let r = (|| -> Result<_> {
        let (p, _) = problem.normalize()?;
        let mut rng = StdRng::seed_from_u64(seed);
        let mut worst = 0.0f64;
        for _ in 0..points {
            let x = rng.random_range(-2.0..2.0);
            let ybar = rng.random_range(-2.0..2.0);
            let r = rng.random_range(0.0..1.0);
            let a = rng.random_range(0.05..5.0);
            let (cp, other) = match rng.random_range(0..4) {
                0 => (
                    ChartPoint::Tminus {
                        x,
                        y1: ybar,
                        r1: r,
                        eps1: a,
                    },
                    ChartId::Escale,
                ),
                1 => (
                    ChartPoint::Tplus {
                        x,
                        y3: ybar,
                        r3: r,
                        eps3: a,
                    },
                    ChartId::Escale,
                ),
                2 => (
                    ChartPoint::Escale {
                        x,
                        y2: ybar,
                        t2: -a,
                        r2: r,
                    },
                    ChartId::Tminus,
                ),
                _ => (
                    ChartPoint::Escale {
                        x,
                        y2: ybar,
                        t2: a,
                        r2: r,
                    },
                    ChartId::Tplus,
                ),
            };
            let there = cp.transition(other)?;
            let back = there.transition(cp.chart())?;
            let (p0, p1) = (cp.to_physical(), there.to_physical());
            let arr = |c: &ChartPoint| match *c {
                ChartPoint::Tminus { x, y1, r1, eps1 } => [x, y1, r1, eps1],
                ChartPoint::Escale { x, y2, t2, r2 } => [x, y2, t2, r2],
                ChartPoint::Tplus { x, y3, r3, eps3 } => [x, y3, r3, eps3],
            };
            for (u, v) in arr(&cp).iter().zip(arr(&back)) {
                worst = worst.max(rel_close(*u, v));
            }
            for (u, v) in [(p0.x, p1.x), (p0.y, p1.y), (p0.t, p1.t), (p0.eps, p1.eps)] {
                worst = worst.max(rel_close(u, v));
            }
        }
        let a = airy_eval(5.0)?;
        let b = airy_eval(-5.0)?;
        let start_pt = ChartPoint::Escale {
            x: a.ai,
            y2: -a.aip,
            t2: -5.0,
            r2: 0.0,
        };
        let tol = 1e-12;
        let end = flow(&p, &start_pt, 10.0, 1e-13)?;
        let (xe, ye) = match end {
            ChartPoint::Escale { x, y2, .. } => (x, y2),
            _ => unreachable!(),
        };
        let scale = b.ai.hypot(b.aip);
        let dop = (xe - b.ai).abs().max((ye + b.aip).abs()) / scale;
        let (xm, ym) = chart2_propagate(&p, 0.0, -5.0, (a.ai, -a.aip), 5.0, tol)?;
        let mag = (xm - b.ai).abs().max((ym + b.aip).abs()) / scale;
        let mut drift = 0.0f64;
        for cp in [
            ChartPoint::Tminus {
                x: 1.0,
                y1: 1.0,
                r1: 0.6,
                eps1: 0.05,
            },
            ChartPoint::Tplus {
                x: 1.0,
                y3: 0.0,
                r3: 0.3,
                eps3: 0.9,
            },
        ] {
            let e0 = cp.blown_down_eps();
            let e1 = flow(&p, &cp, 8.0, 1e-13)?.blown_down_eps();
            drift = drift.max((e1 - e0).abs() / e0);
        }
        let prop = dop.max(mag);
        let ok = worst <= 1e-14 && prop <= 1e-9 && drift <= 1e-10;
        Ok((
            ok,
            worst,
            "round trips ≤ 1e-14, Airy propagation ≤ 1e-9, ε drift ≤ 1e-10".into(),
            format!("round trip {worst:.2e}, Airy (Dop853 {dop:.2e}, Magnus {mag:.2e}), drift {drift:.2e}"),
        ))
    })();
    report("7", "blowup geometry", start, 10.0, r)
}

/// 8. Harmonic exactness and the quartic `o(ε)` contract.
pub fn criterion_8() -> CriterionReport {
    let start = Instant::now();
    let r = (|| -> Result<_> {
        let v = catalog::harmonic_well();
        let (mut bs_err, mut ref_err) = (0.0f64, 0.0f64);
        for eps in [1e-1, 1e-2] {
            let bs = bs_energies(&v, eps, 10, None)?.energies;
            let re = reference_energies(&v, eps, 10, 1e-12)?;
            for n in 0..=10 {
                let exact = eps * (2 * n + 1) as f64;
                bs_err = bs_err.max((bs[n] - exact).abs() / exact);
                ref_err = ref_err.max((re[n] - exact).abs());
            }
        }
        let q = catalog::quartic_well();
        let coarse = eigen_table(&q, 4e-2, 2, 1e-12)?;
        let fine = eigen_table(&q, 1e-2, 2, 1e-12)?;
        let ratio = coarse
            .iter()
            .zip(&fine)
            .map(|(c, f)| (f.gap / f.eps) / (c.gap / c.eps))
            .fold(0.0f64, f64::max);
        let ok = bs_err <= 1e-10 && ref_err <= 1e-8 && ratio <= 0.5;
        Ok((
            ok,
            ratio,
            "harmonic bs ≤ 1e-10, ref ≤ 1e-8; quartic ratio ≤ 0.5".into(),
            format!("bs {bs_err:.2e}, ref {ref_err:.2e}, worst gap/ε ratio {ratio:.3}"),
        ))
    })();
    report("8", "eigenvalues", start, 120.0, r)
}

/// 9. Wronskian conservation, time reversal and log linearity of the reference.
pub fn criterion_9() -> CriterionReport {
    let start = Instant::now();
    let r = (|| -> Result<_> {
        let p = catalog::quadratic();
        let eps = 0.02;
        let tol = 1e-10;
        let q = |t: f64| p.mu(t);
        let grid: Vec<f64> = (1..=40).map(|k| -0.3 + 0.02 * k as f64).collect();
        let a0 = LogScaledState::from_xy(-0.3, eps, 1.0, 0.0)?;
        let b0 = LogScaledState::from_xy(-0.3, eps, 0.0, 1.0)?;
        let sa = Integrator::new(q, eps, IntegratorConfig::new(tol))?.advance_grid(a0, &grid)?;
        let sb = Integrator::new(q, eps, IntegratorConfig::new(tol))?.advance_grid(b0, &grid)?;
        let w0 = 1.0;
        let mut wdrift = 0.0f64;
        for (a, b) in sa.iter().zip(&sb) {
            let w = (a.log_mag + b.log_mag).exp() * (a.xh * b.yh - a.yh * b.xh);
            wdrift = wdrift.max((w - w0).abs() / w0);
        }
        let mut it = Integrator::new(q, eps, IntegratorConfig::new(tol))?;
        let s0 = LogScaledState::from_xy(-0.1, eps, 0.6, 0.8)?;
        let s1 = it.advance(s0, 0.45)?;
        let s2 = it.advance(s1, -0.1)?;
        let angle = (s0.xh * s2.yh - s0.yh * s2.xh)
            .abs()
            .atan2((s0.xh * s2.xh + s0.yh * s2.yh).abs());
        let twice = LogScaledState::from_xy(-0.1, eps, 1.2, 1.6)?;
        let t1 = Integrator::new(q, eps, IntegratorConfig::new(tol))?.advance(twice, 0.45)?;
        let lin = (t1.log_mag - s1.log_mag - 2f64.ln()).abs();
        let same_dir = t1.xh == s1.xh && t1.yh == s1.yh;
        let ok = wdrift <= 1e-9 && angle <= 10.0 * tol && lin <= 1e-14 && same_dir;
        Ok((
            ok,
            wdrift,
            "Wronskian ≤ 1e-9, reversal ≤ 10·tol, log linearity exact".into(),
            format!("Wronskian {wdrift:.2e}, reversal {angle:.2e} (tol {tol:e}), log shift error {lin:.2e}, direction equal {same_dir}"),
        ))
    })();
    report("9", "reference integrity", start, 60.0, r)
}

/// Every criterion in order, followed by the criterion-3 diagnostic.
pub fn run_all() -> Vec<CriterionReport> {
    vec![
        criterion_1(),
        criterion_2(),
        criterion_3(),
        criterion_3_small_eps(),
        criterion_4(),
        criterion_5(),
        criterion_6(),
        criterion_7(),
        criterion_8(),
        criterion_9(),
    ]
}
