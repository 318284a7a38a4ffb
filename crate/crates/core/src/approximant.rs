//! The uniform approximation of the unstable solution across the turning
//! point, the direction of the unstable bundle at `t = ν`, and the fit of its
//! phase and amplitude corrections.
//!
//! All pieces share one normalization: the coefficient of `Ai` at `t₂ = 0` is 1,
//! so that `x(0) = Ai(0)` in the limit.

use std::f64::consts::{FRAC_PI_4, PI};

use nalgebra::{DMatrix, DVector};
use serde::Serialize;

use crate::airy::airy_eval;
use crate::blowup::{chart1_physical, chart2_solution, chart3_solution, Chart3Route, ScaledPair};
use crate::error::{Error, Result};
use crate::par;
use crate::problem::ProblemSpec;
use crate::reference::{wu_reference, LogScaledState};

pub use crate::blowup::DEFAULT_DELTA;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Interval {
    J1,
    J2,
    J3,
}

/// One evaluated point: `e^{log_scale}(x, y)`.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct WuValue {
    pub t: f64,
    pub x: f64,
    pub y: f64,
    pub log_scale: f64,
    pub interval: Interval,
}

impl WuValue {
    pub fn unscaled(&self) -> (f64, f64) {
        ScaledPair {
            x: self.x,
            y: self.y,
            log_scale: self.log_scale,
        }
        .unscaled()
    }
}

/// `J₁ = [−ν, −b]`, `J₂ = [−b, b]`, `J₃ = [b, ν]` with `b = ε^{2/3}δ^{−2/3}`.
#[derive(Debug, Clone)]
pub struct UniformApproximant {
    pub problem: ProblemSpec,
    pub eps: f64,
    pub delta: f64,
    pub nu: f64,
    pub b: f64,
}

impl UniformApproximant {
    pub fn new(p: &ProblemSpec, eps: f64, delta: f64) -> Result<Self> {
        if !p.is_normalized() {
            return Err(Error::InvalidProblem(
                "the uniform approximant needs μ′(0) = 1; normalize first".into(),
            ));
        }
        if !(eps > 0.0) || !(delta > 0.0) {
            return Err(Error::Domain(format!("ε = {eps} and δ = {delta} must be positive")));
        }
        Ok(UniformApproximant {
            problem: p.clone(),
            eps,
            delta,
            nu: p.nu0(),
            b: (eps / delta).powf(2.0 / 3.0),
        })
    }

    /// Interval endpoints `[−ν, −b, b, ν]`, with `b` clipped to `ν`.
    pub fn boundaries(&self) -> [f64; 4] {
        let b = self.b.min(self.nu);
        [-self.nu, -b, b, self.nu]
    }

    pub fn interval(&self, t: f64) -> Interval {
        if t < -self.b {
            Interval::J1
        } else if t > self.b {
            Interval::J3
        } else {
            Interval::J2
        }
    }

    pub fn eval(&self, t: f64) -> Result<WuValue> {
        if !(t.abs() <= self.nu * (1.0 + 1e-12)) {
            return Err(Error::Window(format!("|t| = {} exceeds ν = {}", t.abs(), self.nu)));
        }
        self.eval_piece(t, self.interval(t))
    }

    /// Evaluate a given piece's formula at `t`, regardless of where `t` lies.
    pub fn eval_piece(&self, t: f64, piece: Interval) -> Result<WuValue> {
        let p = &self.problem;
        let eps = self.eps;
        let (x, y, log_scale) = match piece {
            Interval::J1 => {
                if !(t < 0.0) {
                    return Err(Error::Domain(format!("the J₁ formula needs t < 0, got {t}")));
                }
                chart1_physical(p, t, eps)?
            }
            Interval::J2 => {
                let (x, y2) = chart2_solution(p, t / eps.powf(2.0 / 3.0), eps.cbrt())?;
                (x, eps.cbrt() * y2, 0.0)
            }
            Interval::J3 => {
                if !(t > 0.0) {
                    return Err(Error::Domain(format!("the J₃ formula needs t > 0, got {t}")));
                }
                let r3 = t.sqrt();
                let (x, y3) = chart3_solution(p, r3, eps, self.delta, Chart3Route::Airy)?;
                (x, r3 * y3, 0.0)
            }
        };
        Ok(WuValue {
            t,
            x,
            y,
            log_scale,
            interval: piece,
        })
    }

    /// Local scale of `(x, y)` used for relative errors: the magnitudes on
    /// `t ≤ 0` and the oscillation envelope
    /// `(μ̂^{−1/4}√(Ai² + Bi²), ε^{1/3}μ̂^{1/4}√(Ai′² + Bi′²))` at `z = −ε^{−2/3}t` on `t > 0`.
    pub fn envelope(&self, t: f64, x: f64, y: f64) -> Result<(f64, f64)> {
        if t <= 0.0 {
            return Ok((x.abs(), y.abs()));
        }
        let a = airy_eval(-t / self.eps.powf(2.0 / 3.0))?;
        let mh = self.problem.mu_hat(t);
        Ok((
            mh.powf(-0.25) * a.ai.hypot(a.bi),
            self.eps.cbrt() * mh.powf(0.25) * a.aip.hypot(a.bip),
        ))
    }

    /// Relative jumps between adjacent pieces at `−b` and `+b`.
    pub fn boundary_jumps(&self) -> Result<(f64, f64)> {
        let jump = |t: f64, a: Interval, b: Interval| -> Result<f64> {
            let (xa, ya) = self.eval_piece(t, a)?.unscaled();
            let (xb, yb) = self.eval_piece(t, b)?.unscaled();
            let (ex, ey) = self.envelope(t, xb, yb)?;
            Ok(((xa - xb).abs() / ex).max((ya - yb).abs() / ey))
        };
        Ok((
            jump(-self.b, Interval::J1, Interval::J2)?,
            jump(self.b, Interval::J3, Interval::J2)?,
        ))
    }
}

pub fn uniform_wu_solution(p: &ProblemSpec, eps: f64, delta: f64, t: f64) -> Result<WuValue> {
    UniformApproximant::new(p, eps, delta)?.eval(t)
}

/// The reference unstable solution on an ascending grid, scaled so that `x(0) = Ai(0)`.
pub fn normalized_reference(p: &ProblemSpec, eps: f64, grid: &[f64], tol: f64) -> Result<Vec<(f64, f64)>> {
    let mut pts = grid.to_vec();
    let zero_at = match pts.iter().position(|&t| t >= 0.0) {
        Some(i) if pts[i] == 0.0 => i,
        Some(i) => {
            pts.insert(i, 0.0);
            i
        }
        None => {
            pts.push(0.0);
            pts.len() - 1
        }
    };
    let states = wu_reference(p, eps, &pts, tol)?;
    let s0 = states[zero_at];
    let ai0 = airy_eval(0.0)?.ai;
    let shift = s0.log_mag + (s0.xh / ai0).ln();
    let mut out: Vec<(f64, f64)> = states.iter().map(|s: &LogScaledState| s.xy_scaled(shift)).collect();
    if grid.get(zero_at) != Some(&0.0) {
        out.remove(zero_at);
    }
    Ok(out)
}

/// Pointwise relative errors of the approximant against the normalized reference.
#[derive(Debug, Clone, Serialize)]
pub struct ErrorProfile {
    pub eps: f64,
    pub t: Vec<f64>,
    pub err_x: Vec<f64>,
    pub err_y: Vec<f64>,
}

impl ErrorProfile {
    /// `max(sup err_x, sup err_y)`.
    pub fn sup(&self) -> f64 {
        self.err_x.iter().chain(&self.err_y).fold(0.0, |a, &b| a.max(b))
    }
}

pub fn error_profile(
    p: &ProblemSpec,
    eps: f64,
    delta: f64,
    lo: f64,
    hi: f64,
    n: usize,
    tol: f64,
) -> Result<ErrorProfile> {
    let ua = UniformApproximant::new(p, eps, delta)?;
    let grid: Vec<f64> = (0..n).map(|k| lo + (hi - lo) * k as f64 / (n - 1) as f64).collect();
    let refs = normalized_reference(p, eps, &grid, tol)?;
    let mut err_x = Vec::with_capacity(n);
    let mut err_y = Vec::with_capacity(n);
    for (&t, &(xr, yr)) in grid.iter().zip(&refs) {
        let (x, y) = ua.eval(t)?.unscaled();
        let (ex, ey) = ua.envelope(t, xr, yr)?;
        err_x.push((x - xr).abs() / ex);
        err_y.push((y - yr).abs() / ey);
    }
    Ok(ErrorProfile {
        eps,
        t: grid,
        err_x,
        err_y,
    })
}

/// Sup relative error over `[lo, hi]` for every `ε`, in parallel.
pub fn sup_errors(
    p: &ProblemSpec,
    eps_list: &[f64],
    delta: f64,
    lo: f64,
    hi: f64,
    n: usize,
    tol: f64,
) -> Result<Vec<(f64, f64)>> {
    par::map(eps_list, |&e| {
        error_profile(p, e, delta, lo, hi, n, tol).map(|pr| (e, pr.sup()))
    })
    .into_iter()
    .collect()
}

/// A unit vector identified with its negative.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Direction2 {
    pub x: f64,
    pub y: f64,
}

impl Direction2 {
    pub fn new(x: f64, y: f64) -> Result<Self> {
        let n = x.hypot(y);
        if !(n > 0.0 && n.is_finite()) {
            return Err(Error::Domain(format!("({x}, {y}) has no direction")));
        }
        Ok(Direction2 { x: x / n, y: y / n })
    }

    /// Angle between the lines, in `[0, π/2]`.
    pub fn angle(&self, other: &Direction2) -> f64 {
        let cross = self.x * other.y - self.y * other.x;
        let dot = self.x * other.x + self.y * other.y;
        cross.abs().atan2(dot.abs())
    }
}

fn check_nu(p: &ProblemSpec, nu: f64) -> Result<()> {
    if !(nu > 0.0 && nu <= p.nu0() * (1.0 + 1e-12)) {
        return Err(Error::Domain(format!("ν = {nu} is outside (0, ν₀]")));
    }
    if !(p.mu(nu) > 0.0) || p.mu_poly().count_roots(1e-12 * nu, nu) > 0 {
        return Err(Error::Domain(format!("μ is not positive on (0, {nu}]")));
    }
    Ok(())
}

/// `(cos(Φ − π/4), −√μ(ν) sin(Φ − π/4))` normalized, `Φ = ε⁻¹∫₀^ν √μ`.
pub fn wu_direction(p: &ProblemSpec, nu: f64, eps: f64) -> Result<Direction2> {
    check_nu(p, nu)?;
    let phi = p.action(0.0, nu)? / eps;
    Direction2::new((phi - FRAC_PI_4).cos(), -p.mu(nu).sqrt() * (phi - FRAC_PI_4).sin())
}

/// Direction of the reference unstable solution at `t = ν`.
pub fn reference_direction(p: &ProblemSpec, nu: f64, eps: f64, tol: f64) -> Result<Direction2> {
    check_nu(p, nu)?;
    let s = wu_reference(p, eps, &[nu], tol)?[0];
    Direction2::new(s.xh, s.yh)
}

/// Angle between [`wu_direction`] and the reference for every `ε`, in parallel.
pub fn direction_errors(p: &ProblemSpec, nu: f64, eps_list: &[f64], tol: f64) -> Result<Vec<(f64, f64)>> {
    par::map(eps_list, |&e| -> Result<(f64, f64)> {
        Ok((e, wu_direction(p, nu, e)?.angle(&reference_direction(p, nu, e, tol)?)))
    })
    .into_iter()
    .collect()
}

/// Corrections extracted at one `ε`:
/// `x μ^{1/4} ∝ cos(Φ − π/4 + ε^{2/3}φ₁)`, `−y μ^{−1/4} ∝ (1 + ε^{2/3}ρ) sin(Φ − π/4 + ε^{2/3}φ₂)`.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct PhaseSample {
    pub eps: f64,
    pub rho: f64,
    pub phi1: f64,
    pub phi2: f64,
}

/// Polynomial in `ε^{1/3}` fitted to one correction.
#[derive(Debug, Clone, Serialize)]
pub struct PolyFit {
    pub coeffs: Vec<f64>,
    pub rms: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct PhaseFit {
    pub samples: Vec<PhaseSample>,
    /// `fits[d] = [ρ, φ₁, φ₂]` fitted with degree `d`.
    pub fits: Vec<[PolyFit; 3]>,
}

fn lstsq(a: DMatrix<f64>, b: DVector<f64>) -> Result<(DVector<f64>, f64)> {
    let svd = a.clone().svd(true, true);
    let sol = svd.solve(&b, 1e-14).map_err(|e| Error::Fit(e.to_string()))?;
    let r = &a * &sol - b;
    Ok((sol, (r.norm_squared() / r.len() as f64).sqrt()))
}

/// Fit `a(t) cos θ + b(t) sin θ` with `a, b` linear in `t − ν`; returns `(A, c)` with
/// `(a, b)(ν) = A(cos c, −sin c)`, i.e. the data is `A cos(θ + c)` near `ν`.
fn local_harmonic(ts: &[f64], vals: &[f64], theta: &[f64], nu: f64, sine: bool) -> Result<(f64, f64)> {
    let n = ts.len();
    let mut a = DMatrix::zeros(n, 4);
    for k in 0..n {
        let (c, s) = (theta[k].cos(), theta[k].sin());
        let d = ts[k] - nu;
        a[(k, 0)] = c;
        a[(k, 1)] = s;
        a[(k, 2)] = d * c;
        a[(k, 3)] = d * s;
    }
    let (sol, _) = lstsq(a, DVector::from_column_slice(vals))?;
    let (cc, ss) = (sol[0], sol[1]);
    if sine {
        // A sin(θ + c) = A sin c cos θ + A cos c sin θ
        Ok((cc.hypot(ss), cc.atan2(ss)))
    } else {
        Ok((cc.hypot(ss), (-ss).atan2(cc)))
    }
}

/// Sample count per local window.
pub const PHASE_SAMPLES: usize = 161;

/// Extract `ρ, φ₁, φ₂` at one `ε` from samples `(t, x, y)` around `ν`.
pub fn phase_sample(p: &ProblemSpec, nu: f64, eps: f64, ts: &[f64], xy: &[(f64, f64)]) -> Result<PhaseSample> {
    let mut theta = Vec::with_capacity(ts.len());
    let mut xs = Vec::with_capacity(ts.len());
    let mut ys = Vec::with_capacity(ts.len());
    for (&t, &(x, y)) in ts.iter().zip(xy) {
        let m = p.mu(t);
        theta.push(p.action(0.0, t)? / eps - FRAC_PI_4);
        xs.push(x * m.powf(0.25));
        ys.push(-y * m.powf(-0.25));
    }
    let (ax, c1) = local_harmonic(ts, &xs, &theta, nu, false)?;
    let (ay, c2) = local_harmonic(ts, &ys, &theta, nu, true)?;
    let s = eps.powf(2.0 / 3.0);
    Ok(PhaseSample {
        eps,
        rho: (ay / ax - 1.0) / s,
        phi1: c1 / s,
        phi2: c2 / s,
    })
}

/// Window `[ν − w, ν + w]` of about two local periods, kept inside `(ν/2, ν₀]`.
pub fn phase_window(p: &ProblemSpec, nu: f64, eps: f64) -> Vec<f64> {
    let period = 2.0 * PI * eps / p.mu(nu).sqrt();
    let w = (2.0 * period).min(0.5 * nu).min(p.nu0() - nu).max(0.0);
    (0..PHASE_SAMPLES)
        .map(|k| nu - w + 2.0 * w * k as f64 / (PHASE_SAMPLES - 1) as f64)
        .collect()
}

/// Phase/amplitude fit from an arbitrary sampler `(ε, grid) → [(x, y)]`.
pub fn phase_fit_with<F>(p: &ProblemSpec, nu: f64, eps_grid: &[f64], max_degree: usize, sampler: F) -> Result<PhaseFit>
where
    F: Fn(f64, &[f64]) -> Result<Vec<(f64, f64)>> + Sync + Send,
{
    check_nu(p, nu)?;
    if eps_grid.len() < 6 {
        return Err(Error::Domain(format!(
            "phase_fit needs at least 6 ε values, got {}",
            eps_grid.len()
        )));
    }
    if p.nu0() - nu <= 0.0 {
        return Err(Error::Domain(
            "ν must lie strictly inside (0, ν₀) to sample around it".into(),
        ));
    }
    let mut samples = par::map(eps_grid, |&e| -> Result<PhaseSample> {
        let ts = phase_window(p, nu, e);
        let xy = sampler(e, &ts)?;
        phase_sample(p, nu, e, &ts, &xy)
    })
    .into_iter()
    .collect::<Result<Vec<_>>>()?;
    unwrap_offsets(&mut samples)?;
    let mut fits = Vec::new();
    for d in 0..=max_degree.min(eps_grid.len() - 2) {
        let n = samples.len();
        let mut a = DMatrix::zeros(n, d + 1);
        for (k, s) in samples.iter().enumerate() {
            let u = s.eps.cbrt();
            for j in 0..=d {
                a[(k, j)] = u.powi(j as i32);
            }
        }
        let fit = |f: &dyn Fn(&PhaseSample) -> f64| -> Result<PolyFit> {
            let b = DVector::from_iterator(n, samples.iter().map(f));
            let (c, rms) = lstsq(a.clone(), b)?;
            Ok(PolyFit {
                coeffs: c.iter().copied().collect(),
                rms,
            })
        };
        fits.push([fit(&|s| s.rho)?, fit(&|s| s.phi1)?, fit(&|s| s.phi2)?]);
    }
    Ok(PhaseFit { samples, fits })
}

fn unwrap_offsets(samples: &mut [PhaseSample]) -> Result<()> {
    for k in 1..samples.len() {
        let prev = samples[k - 1];
        let s = &mut samples[k];
        let scale = s.eps.powf(2.0 / 3.0);
        for (cur, last) in [
            (&mut s.phi1, prev.phi1 * prev.eps.powf(2.0 / 3.0)),
            (&mut s.phi2, prev.phi2 * prev.eps.powf(2.0 / 3.0)),
        ] {
            let c = *cur * scale;
            let turns = ((last - c) / (2.0 * PI)).round();
            let c = c + 2.0 * PI * turns;
            if (c - last).abs() > PI / 2.0 {
                return Err(Error::GridTooCoarse(format!(
                    "phase offset jumps by {:.3} between ε = {} and ε = {}",
                    c - last,
                    prev.eps,
                    s.eps
                )));
            }
            *cur = c / scale;
        }
    }
    Ok(())
}

/// Phase/amplitude fit against the reference unstable solution.
pub fn phase_fit(p: &ProblemSpec, nu: f64, eps_grid: &[f64], max_degree: usize, tol: f64) -> Result<PhaseFit> {
    phase_fit_with(p, nu, eps_grid, max_degree, |e, ts| {
        let states = wu_reference(p, e, ts, tol)?;
        let shift = states[0].log_mag;
        Ok(states.iter().map(|s| s.xy_scaled(shift)).collect())
    })
}

/// Geometric ε grid `start, start·q, …` with `n` points.
pub fn geometric_grid(start: f64, ratio: f64, n: usize) -> Vec<f64> {
    (0..n).map(|k| start * ratio.powi(k as i32)).collect()
}
