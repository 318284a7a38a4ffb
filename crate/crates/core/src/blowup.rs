//! Directional charts of the blowup `(y, t, ε) = (r ȳ, r² t̄, r³ ε̄)`.
//!
//! * `Tminus` (`t̄ = −1`): `y = r₁y₁`, `t = −r₁²`, `ε = r₁³ε₁`
//! * `Escale` (`ε̄ = 1`): `y = r₂y₂`, `t = r₂²t₂`, `ε = r₂³`
//! * `Tplus` (`t̄ = 1`): `y = r₃y₃`, `t = r₃²`, `ε = r₃³ε₃`

use std::f64::consts::{FRAC_PI_4, PI};

use num_complex::Complex64;
use ode_solvers::dop_shared::OutputType;
use ode_solvers::{Dop853, System, Vector4};
use serde::Serialize;

use crate::airy::{ai_minus_ibi, airy_eval, airy_eval_scaled};
use crate::error::{Error, Result};
use crate::problem::ProblemSpec;
use crate::reference::{riccati_reference, Integrator, IntegratorConfig, LogScaledState};
use crate::series::chart3::b0_coeffs;
use crate::series::truncation::{b0_exponent_integral, b0_sum, Truncation};

/// Default width parameter of the chart boxes.
pub const DEFAULT_DELTA: f64 = 0.2;
/// Default cap on the `B₀` truncation order.
pub const DEFAULT_B0_ORDER: usize = 20;
/// Upper edge of the `(r₁, ε₁)` box for the chart-1 slope.
pub const UPSILON: f64 = 1.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum ChartId {
    Tminus,
    Escale,
    Tplus,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub enum ChartPoint {
    Tminus { x: f64, y1: f64, r1: f64, eps1: f64 },
    Escale { x: f64, y2: f64, t2: f64, r2: f64 },
    Tplus { x: f64, y3: f64, r3: f64, eps3: f64 },
}

/// Blown-down coordinates.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Physical {
    pub x: f64,
    pub y: f64,
    pub t: f64,
    pub eps: f64,
}

impl ChartPoint {
    pub fn chart(&self) -> ChartId {
        match self {
            ChartPoint::Tminus { .. } => ChartId::Tminus,
            ChartPoint::Escale { .. } => ChartId::Escale,
            ChartPoint::Tplus { .. } => ChartId::Tplus,
        }
    }

    pub fn to_physical(&self) -> Physical {
        match *self {
            ChartPoint::Tminus { x, y1, r1, eps1 } => Physical {
                x,
                y: r1 * y1,
                t: -r1 * r1,
                eps: r1 * r1 * r1 * eps1,
            },
            ChartPoint::Escale { x, y2, t2, r2 } => Physical {
                x,
                y: r2 * y2,
                t: r2 * r2 * t2,
                eps: r2 * r2 * r2,
            },
            ChartPoint::Tplus { x, y3, r3, eps3 } => Physical {
                x,
                y: r3 * y3,
                t: r3 * r3,
                eps: r3 * r3 * r3 * eps3,
            },
        }
    }

    /// `ε = r³ε̄`.
    pub fn blown_down_eps(&self) -> f64 {
        self.to_physical().eps
    }

    fn as_array(&self) -> [f64; 4] {
        match *self {
            ChartPoint::Tminus { x, y1, r1, eps1 } => [x, y1, r1, eps1],
            ChartPoint::Escale { x, y2, t2, r2 } => [x, y2, t2, r2],
            ChartPoint::Tplus { x, y3, r3, eps3 } => [x, y3, r3, eps3],
        }
    }

    fn from_array(chart: ChartId, a: [f64; 4]) -> Self {
        match chart {
            ChartId::Tminus => ChartPoint::Tminus {
                x: a[0],
                y1: a[1],
                r1: a[2],
                eps1: a[3],
            },
            ChartId::Escale => ChartPoint::Escale {
                x: a[0],
                y2: a[1],
                t2: a[2],
                r2: a[3],
            },
            ChartId::Tplus => ChartPoint::Tplus {
                x: a[0],
                y3: a[1],
                r3: a[2],
                eps3: a[3],
            },
        }
    }

    /// Change to an adjacent chart on the overlap.
    pub fn transition(&self, target: ChartId) -> Result<ChartPoint> {
        if self.chart() == target {
            return Ok(*self);
        }
        match (*self, target) {
            (ChartPoint::Escale { x, y2, t2, r2 }, ChartId::Tminus) => {
                if !(t2 < 0.0) {
                    return Err(Error::Domain(format!("Escale → Tminus needs t₂ < 0, got {t2}")));
                }
                let s = (-t2).sqrt();
                Ok(ChartPoint::Tminus {
                    x,
                    y1: y2 / s,
                    r1: r2 * s,
                    eps1: (-t2).powf(-1.5),
                })
            }
            (ChartPoint::Escale { x, y2, t2, r2 }, ChartId::Tplus) => {
                if !(t2 > 0.0) {
                    return Err(Error::Domain(format!("Escale → Tplus needs t₂ > 0, got {t2}")));
                }
                let s = t2.sqrt();
                Ok(ChartPoint::Tplus {
                    x,
                    y3: y2 / s,
                    r3: r2 * s,
                    eps3: t2.powf(-1.5),
                })
            }
            (ChartPoint::Tminus { x, y1, r1, eps1 }, ChartId::Escale) => {
                if !(eps1 > 0.0) {
                    return Err(Error::Domain(format!("Tminus → Escale needs ε₁ > 0, got {eps1}")));
                }
                let c = eps1.cbrt();
                Ok(ChartPoint::Escale {
                    x,
                    y2: y1 / c,
                    t2: -1.0 / (c * c),
                    r2: r1 * c,
                })
            }
            (ChartPoint::Tplus { x, y3, r3, eps3 }, ChartId::Escale) => {
                if !(eps3 > 0.0) {
                    return Err(Error::Domain(format!("Tplus → Escale needs ε₃ > 0, got {eps3}")));
                }
                let c = eps3.cbrt();
                Ok(ChartPoint::Escale {
                    x,
                    y2: y3 / c,
                    t2: 1.0 / (c * c),
                    r2: r3 * c,
                })
            }
            (from, to) => Err(Error::Domain(format!(
                "charts {:?} and {to:?} do not overlap",
                from.chart()
            ))),
        }
    }
}

/// Right-hand side of the desingularized system in the chart's own coordinate order.
pub fn desing_field(p: &ProblemSpec, cp: &ChartPoint) -> [f64; 4] {
    match *cp {
        ChartPoint::Tminus { x, y1, r1, eps1 } => [
            y1,
            p.mu_hat(-r1 * r1) * x + 0.5 * eps1 * y1,
            -0.5 * r1 * eps1,
            1.5 * eps1 * eps1,
        ],
        ChartPoint::Escale { x, y2, t2, r2 } => [y2, -t2 * p.mu_hat(r2 * r2 * t2) * x, 1.0, 0.0],
        ChartPoint::Tplus { x, y3, r3, eps3 } => [
            y3,
            -p.mu_hat(r3 * r3) * x - 0.5 * eps3 * y3,
            0.5 * r3 * eps3,
            -1.5 * eps3 * eps3,
        ],
    }
}

struct ChartFlow<'a> {
    p: &'a ProblemSpec,
    chart: ChartId,
}

impl System<f64, Vector4<f64>> for ChartFlow<'_> {
    fn system(&self, _tau: f64, y: &Vector4<f64>, dy: &mut Vector4<f64>) {
        let cp = ChartPoint::from_array(self.chart, [y[0], y[1], y[2], y[3]]);
        let f = desing_field(self.p, &cp);
        for i in 0..4 {
            dy[i] = f[i];
        }
    }
}

/// Follow the desingularized field for rescaled time `tau` (either sign).
pub fn flow(p: &ProblemSpec, cp: &ChartPoint, tau: f64, tol: f64) -> Result<ChartPoint> {
    let a = cp.as_array();
    let y0 = Vector4::new(a[0], a[1], a[2], a[3]);
    let mut solver = Dop853::new(ChartFlow { p, chart: cp.chart() }, 0.0, tau, tau, y0, tol, tol);
    solver.set_output(OutputType::Sparse);
    solver.integrate().map_err(|e| Error::Integration {
        t: tau,
        h: 0.0,
        steps: 0,
        reason: format!("{e:?}"),
    })?;
    let y = solver.y_out().last().ok_or_else(|| Error::Integration {
        t: tau,
        h: 0.0,
        steps: 0,
        reason: "no output".into(),
    })?;
    Ok(ChartPoint::from_array(cp.chart(), [y[0], y[1], y[2], y[3]]))
}

/// The chart-1 slope of the unstable set and its pieces.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct Chart1Slope {
    pub slope: f64,
    pub u1: f64,
    pub u2: f64,
    pub u3: f64,
}

/// `U₁(ε₁) = −ε₁^{1/3} Ai′(ε₁^{−2/3}) / Ai(ε₁^{−2/3})`, with `U₁(0) = 1`.
pub fn u1(eps1: f64) -> Result<f64> {
    if eps1 == 0.0 {
        return Ok(1.0);
    }
    let a = airy_eval_scaled(eps1.powf(-2.0 / 3.0))?;
    Ok(-eps1.cbrt() * a.aip / a.ai)
}

/// `U₁(ε₁) + U₂(r₁²) + ε₁U₃(r₁²)`; the remainder is `O(r₁²ε₁²)`.
pub fn chart1_hu(p: &ProblemSpec, r1: f64, eps1: f64) -> Result<Chart1Slope> {
    if !(0.0..=UPSILON).contains(&eps1) || !(r1 >= 0.0 && r1 * r1 <= p.nu0()) {
        return Err(Error::Domain(format!(
            "(r₁, ε₁) = ({r1}, {eps1}) is outside the chart-1 box"
        )));
    }
    let t = -r1 * r1;
    let mh = p.mu_hat(t);
    if !(mh > 0.0) {
        return Err(Error::Domain(format!("μ̂({t}) = {mh} is not positive")));
    }
    let dmh = p.mu_hat_jet(t, 1).coeffs[1];
    let v1 = u1(eps1)?;
    let u2 = mh.sqrt() - 1.0;
    let u3 = -0.25 * r1 * r1 * dmh / mh;
    Ok(Chart1Slope {
        slope: v1 + u2 + eps1 * u3,
        u1: v1,
        u2,
        u3,
    })
}

/// The chart-1 slope `y₁/x` from the Riccati reference: `h_u(−r₁², r₁³ε₁)/r₁`.
pub fn chart1_hu_reference(p: &ProblemSpec, r1: f64, eps1: f64) -> Result<f64> {
    if r1 == 0.0 {
        return u1(eps1);
    }
    Ok(riccati_reference(p, r1.powi(3) * eps1, -r1 * r1)? / r1)
}

/// A pair `e^{log_scale}(x, y)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ScaledPair {
    pub x: f64,
    pub y: f64,
    pub log_scale: f64,
}

impl ScaledPair {
    pub fn unscaled(&self) -> (f64, f64) {
        let s = self.log_scale.exp();
        (s * self.x, s * self.y)
    }
}

/// Lower edge `ε^{1/3}δ^{−1/3}` of the outer-chart windows.
pub fn r_inner(eps: f64, delta: f64) -> f64 {
    (eps / delta).cbrt()
}

/// Chart-1 solution `(x, y₁)` on the unstable set:
/// `x = μ̂^{−1/4} Ai(ε^{−2/3}r₁²) e^{−pc/ε}`, `y₁ = −ε^{1/3}r₁⁻¹ μ̂^{1/4} Ai′(ε^{−2/3}r₁²) e^{−pc/ε}`,
/// with `pc` the phase correction at `t = −r₁²`.
pub fn chart1_solution(p: &ProblemSpec, r1: f64, eps: f64, delta: f64) -> Result<ScaledPair> {
    let lo = r_inner(eps, delta);
    if !(r1 >= lo * (1.0 - 1e-12) && r1 * r1 <= p.nu0() * (1.0 + 1e-12)) {
        return Err(Error::Window(format!("r₁ = {r1} is outside [{lo}, √ν₀]")));
    }
    let t = -r1 * r1;
    let (x, y, log) = chart1_physical(p, t, eps)?;
    Ok(ScaledPair {
        x,
        y: y / r1,
        log_scale: log,
    })
}

/// `(x, y, log)` of the chart-1 formula at physical `t < 0`.
pub fn chart1_physical(p: &ProblemSpec, t: f64, eps: f64) -> Result<(f64, f64, f64)> {
    let z = -t / eps.powf(2.0 / 3.0);
    let a = airy_eval_scaled(z)?;
    let mh = p.mu_hat(t);
    let pc = p.phase_correction(t)?;
    Ok((
        mh.powf(-0.25) * a.ai,
        -eps.cbrt() * mh.powf(0.25) * a.aip,
        -a.zeta - pc / eps,
    ))
}

/// `(Ai(−t₂), −Ai′(−t₂))`; the `O(r₂²)` remainder is dropped.
pub fn chart2_solution(_p: &ProblemSpec, t2: f64, _r2: f64) -> Result<(f64, f64)> {
    let a = airy_eval(-t2)?;
    Ok((a.ai, -a.aip))
}

/// Integrate the chart-2 system `x′ = y₂`, `y₂′ = −t₂μ̂(r₂²t₂)x` at fixed `r₂`.
pub fn chart2_propagate(
    p: &ProblemSpec,
    r2: f64,
    t2_from: f64,
    xy: (f64, f64),
    t2_to: f64,
    tol: f64,
) -> Result<(f64, f64)> {
    let q = |t2: f64| t2 * p.mu_hat(r2 * r2 * t2);
    let mut it = Integrator::new(q, 1.0, IntegratorConfig::new(tol))?;
    let s = it.advance(LogScaledState::from_xy(t2_from, 1.0, xy.0, xy.1)?, t2_to)?;
    s.xy().ok_or_else(|| Error::Range("chart-2 solution overflowed".into()))
}

fn check_eps3(eps3: f64) -> Result<()> {
    if !(eps3 > 0.0 && eps3 <= 0.5) {
        return Err(Error::Domain(format!("ε₃ = {eps3} is outside (0, 0.5]")));
    }
    Ok(())
}

/// `T₁(ε₃) = i B₀(ε₃) − ε₃/2 = i − ε₃/4 + O(ε₃²)`.
pub fn t1(eps3: f64, l: usize) -> Result<Complex64> {
    check_eps3(eps3)?;
    let b = b0_coeffs(l + 1);
    Ok(Complex64::i() * b0_sum(&b, eps3, l, Truncation::Terminant) - eps3 / 2.0)
}

/// `A₁(ε₃)` with the terminant-completed optimal truncation of `B₀`.
pub fn a1(eps3: f64, l: usize) -> Result<Complex64> {
    a1_with(eps3, l, Truncation::Terminant)
}

/// `A₁(ε₃) = ε₃^{1/6} exp(i(2/(3ε₃) − π/4)) exp(−(2/3) I(ε₃))` with
/// `I = i Σ_{m≥2} b_m ε₃^{m−1}/(m−1)` truncated at the optimal index (cap `l`).
pub fn a1_with(eps3: f64, l: usize, trunc: Truncation) -> Result<Complex64> {
    check_eps3(eps3)?;
    let b = b0_coeffs(l + 1);
    let integral = b0_exponent_integral(&b, eps3, l, trunc);
    let phase = Complex64::new(0.0, 2.0 / (3.0 * eps3) - FRAC_PI_4);
    Ok((phase - integral * (2.0 / 3.0)).exp() * eps3.powf(1.0 / 6.0))
}

/// `(x_ℂ, y₃ℂ) = (B₀A₁, iA₁)` at `ε₃` with cap `L = 20`.
pub fn xc_yc(eps3: f64) -> Result<(Complex64, Complex64)> {
    xc_yc_with(eps3, DEFAULT_B0_ORDER, Truncation::Terminant)
}

pub fn xc_yc_with(eps3: f64, l: usize, trunc: Truncation) -> Result<(Complex64, Complex64)> {
    check_eps3(eps3)?;
    let b = b0_coeffs(l + 1);
    let a = a1_with(eps3, l, trunc)?;
    Ok((b0_sum(&b, eps3, l, trunc) * a, Complex64::i() * a))
}

/// `(√π(Ai − iBi)(−ε₃^{−2/3}), −√π ε₃^{1/3}(Ai′ − iBi′)(−ε₃^{−2/3}))`.
pub fn xc_yc_airy(eps3: f64) -> Result<(Complex64, Complex64)> {
    if !(eps3 > 0.0) {
        return Err(Error::Domain(format!("ε₃ = {eps3} must be positive")));
    }
    let (w, dw) = ai_minus_ibi(-eps3.powf(-2.0 / 3.0))?;
    let sp = PI.sqrt();
    Ok((w * sp, -dw * sp * eps3.cbrt()))
}

/// How the chart-3 Airy factor is evaluated.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Chart3Route {
    /// `(Ai − iBi)` from the Airy module.
    Airy,
    /// `x_ℂ, y₃ℂ` from the `B₀` series with this cap.
    Series(usize),
}

/// Chart-3 solution `(x, y₃)`:
/// `x = μ̂^{−1/4} Re[(Ai − iBi)(−ε₃^{−2/3}) e^{i pc/ε}]`,
/// `y₃ = −ε₃^{1/3} μ̂^{1/4} Re[(Ai′ − iBi′)(−ε₃^{−2/3}) e^{i pc/ε}]`.
pub fn chart3_solution(p: &ProblemSpec, r3: f64, eps: f64, delta: f64, route: Chart3Route) -> Result<(f64, f64)> {
    let lo = r_inner(eps, delta);
    if !(r3 >= lo * (1.0 - 1e-12) && r3 * r3 <= p.nu0() * (1.0 + 1e-12)) {
        return Err(Error::Window(format!("r₃ = {r3} is outside [{lo}, √ν₀]")));
    }
    let t = r3 * r3;
    let eps3 = eps / (r3 * r3 * r3);
    let (xc, yc) = match route {
        Chart3Route::Airy => xc_yc_airy(eps3)?,
        Chart3Route::Series(l) => xc_yc_with(eps3, l, Truncation::Terminant)?,
    };
    let mh = p.mu_hat(t);
    let rot = Complex64::from_polar(1.0 / PI.sqrt(), p.phase_correction(t)? / eps);
    Ok((mh.powf(-0.25) * (xc * rot).re, mh.powf(0.25) * (yc * rot).re))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::problem::catalog;

    fn close(a: f64, b: f64) -> bool {
        (a - b).abs() <= 1e-14 * b.abs().max(1.0)
    }

    #[test]
    fn physical_examples() {
        let p = ChartPoint::Tplus {
            x: 1.0,
            y3: 0.0,
            r3: 0.3,
            eps3: 1.0,
        }
        .to_physical();
        assert!(close(p.t, 0.09) && close(p.eps, 0.027) && p.y == 0.0);
        let p = ChartPoint::Escale {
            x: 1.0,
            y2: 2.0,
            t2: -1.0,
            r2: 0.1,
        }
        .to_physical();
        assert!(close(p.y, 0.2) && close(p.t, -0.01) && close(p.eps, 0.001));
        let p = ChartPoint::Tminus {
            x: 2.0,
            y1: 5.0,
            r1: 0.0,
            eps1: 3.0,
        }
        .to_physical();
        assert_eq!((p.x, p.y, p.t, p.eps), (2.0, 0.0, 0.0, 0.0));
    }

    #[test]
    fn transition_examples() {
        let a = ChartPoint::Escale {
            x: 1.0,
            y2: 1.0,
            t2: -1.0,
            r2: 0.1,
        };
        match a.transition(ChartId::Tminus).unwrap() {
            ChartPoint::Tminus { r1, y1, eps1, .. } => assert!(close(r1, 0.1) && close(y1, 1.0) && close(eps1, 1.0)),
            _ => unreachable!(),
        }
        let b = ChartPoint::Escale {
            x: 1.0,
            y2: 1.0,
            t2: 4.0,
            r2: 0.1,
        };
        let c = b.transition(ChartId::Tplus).unwrap();
        match c {
            ChartPoint::Tplus { r3, y3, eps3, .. } => assert!(close(r3, 0.2) && close(y3, 0.5) && close(eps3, 0.125)),
            _ => unreachable!(),
        }
        let back = c.transition(ChartId::Escale).unwrap().as_array();
        for (u, v) in back.iter().zip(b.as_array()) {
            assert!(close(*u, v));
        }
        assert!(b.transition(ChartId::Tminus).is_err());
        assert!(c.transition(ChartId::Tminus).is_err());
    }

    #[test]
    fn field_limits() {
        let p = catalog::quadratic();
        let f = desing_field(
            &p,
            &ChartPoint::Escale {
                x: 2.0,
                y2: 3.0,
                t2: 1.5,
                r2: 0.0,
            },
        );
        assert_eq!(f, [3.0, -3.0, 1.0, 0.0]);
        let f = desing_field(
            &p,
            &ChartPoint::Tminus {
                x: 2.0,
                y1: 3.0,
                r1: 0.0,
                eps1: 0.0,
            },
        );
        assert_eq!(f, [3.0, 2.0, 0.0, 0.0]);
        let f = desing_field(
            &p,
            &ChartPoint::Tplus {
                x: 2.0,
                y3: 3.0,
                r3: 0.0,
                eps3: 0.0,
            },
        );
        assert_eq!(f, [3.0, -2.0, 0.0, 0.0]);
    }

    #[test]
    fn u1_limits() {
        assert_eq!(u1(0.0).unwrap(), 1.0);
        for &e in &[1e-3, 1e-2] {
            let d = u1(e).unwrap() - 1.0 - e / 4.0;
            assert!(d.abs() < 2.0 * e * e, "{d}");
        }
        let p = catalog::quadratic();
        let s = chart1_hu(&p, 0.3, 0.0).unwrap();
        assert!(close(s.slope, p.mu_hat(-0.09).sqrt()));
    }

    #[test]
    fn a1_limits() {
        for &e in &[0.01, 0.02] {
            let a = a1(e, 20).unwrap();
            let m = a.norm() / e.powf(1.0 / 6.0);
            assert!((m - 1.0).abs() < 2.0 * e, "{m}");
            let d = (a.arg() - (2.0 / (3.0 * e) - FRAC_PI_4)).rem_euclid(2.0 * PI);
            let d = d.min(2.0 * PI - d);
            assert!(d < 2.0 * e);
        }
        let t = t1(0.01, 20).unwrap();
        assert!((t - Complex64::new(-0.0025, 1.0)).norm() < 1e-3);
    }

    #[test]
    fn xc_matches_airy() {
        for &e in &[0.05, 0.1, 0.2, 0.3] {
            let (x, y) = xc_yc(e).unwrap();
            let (xa, ya) = xc_yc_airy(e).unwrap();
            assert!((x - xa).norm() / x.norm() < 1e-3, "x at {e}");
            assert!((y - ya).norm() / y.norm() < 1e-3, "y at {e}");
        }
    }

    #[test]
    fn linear_problem_charts_are_airy() {
        let p = catalog::linear();
        let eps = 0.01;
        let (x, y3) = chart3_solution(&p, 0.5, eps, 0.2, Chart3Route::Airy).unwrap();
        let z = -0.25 / eps.powf(2.0 / 3.0);
        let a = airy_eval(z).unwrap();
        assert!((x - a.ai).abs() < 1e-14);
        assert!((y3 * 0.5 + eps.cbrt() * a.aip).abs() < 1e-14);
        let s = chart1_solution(&p, 0.5, eps, 0.2).unwrap();
        let a = airy_eval(-z).unwrap();
        let (x, _) = s.unscaled();
        assert!((x - a.ai).abs() < 1e-13 * a.ai);
    }
}
