//! Ground-truth integration of `ε x′ = y`, `ε y′ = −q(t) x`.
//!
//! One step is a sixth-order Magnus step on the three Gauss nodes with the
//! exact exponential of the traceless 2×2 generator, so the Wronskian is
//! conserved to rounding. Local error is estimated by step doubling. The
//! state is stored as a unit direction plus an accumulated log-magnitude.

use serde::Serialize;
use statrs::distribution::{ContinuousCDF, StudentsT};

use crate::error::{Error, Result};
use crate::problem::ProblemSpec;

/// Solution point stored as unit direction and log-magnitude.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LogScaledState {
    pub t: f64,
    pub eps: f64,
    pub xh: f64,
    pub yh: f64,
    pub log_mag: f64,
}

impl LogScaledState {
    pub fn from_xy(t: f64, eps: f64, x: f64, y: f64) -> Result<Self> {
        Self::from_parts(t, eps, x, y, 0.0)
    }

    /// `(x, y) = e^{log_mag} (x, y)` renormalized to unit direction.
    pub fn from_parts(t: f64, eps: f64, x: f64, y: f64, log_mag: f64) -> Result<Self> {
        let n = x.hypot(y);
        if !(n > 0.0 && n.is_finite()) {
            return Err(Error::Domain(format!("state ({x}, {y}) cannot be normalized")));
        }
        Ok(LogScaledState {
            t,
            eps,
            xh: x / n,
            yh: y / n,
            log_mag: log_mag + n.ln(),
        })
    }

    /// `(x, y)` if representable.
    pub fn xy(&self) -> Option<(f64, f64)> {
        let s = self.log_mag.exp();
        s.is_finite().then(|| (s * self.xh, s * self.yh))
    }

    /// `(x, y)` scaled by `e^{−shift}`.
    pub fn xy_scaled(&self, shift: f64) -> (f64, f64) {
        let s = (self.log_mag - shift).exp();
        (s * self.xh, s * self.yh)
    }

    pub fn slope(&self) -> f64 {
        self.yh / self.xh
    }
}

#[derive(Debug, Clone, Copy)]
pub struct IntegratorConfig {
    /// Local relative tolerance per step.
    pub tol: f64,
    /// First step; defaults to `ε/10`.
    pub h0: Option<f64>,
    /// Take uniform steps of this size with no error control.
    pub fixed_step: Option<f64>,
    pub max_steps: usize,
}

impl IntegratorConfig {
    pub fn new(tol: f64) -> Self {
        IntegratorConfig {
            tol,
            h0: None,
            fixed_step: None,
            max_steps: 50_000_000,
        }
    }

    pub fn fixed(h: f64) -> Self {
        IntegratorConfig {
            fixed_step: Some(h),
            ..Self::new(1e-12)
        }
    }
}

#[derive(Debug, Clone, Copy, Default, Serialize)]
pub struct Stats {
    pub steps: usize,
    pub rejected: usize,
    pub renorms: usize,
}

#[derive(Clone, Copy)]
struct M2([f64; 4]);

impl M2 {
    fn add(self, o: M2) -> M2 {
        M2([
            self.0[0] + o.0[0],
            self.0[1] + o.0[1],
            self.0[2] + o.0[2],
            self.0[3] + o.0[3],
        ])
    }
    fn scale(self, k: f64) -> M2 {
        M2([k * self.0[0], k * self.0[1], k * self.0[2], k * self.0[3]])
    }
    fn mul(self, o: M2) -> M2 {
        let [a, b, c, d] = self.0;
        let [e, f, g, h] = o.0;
        M2([a * e + b * g, a * f + b * h, c * e + d * g, c * f + d * h])
    }
    fn comm(self, o: M2) -> M2 {
        self.mul(o).add(o.mul(self).scale(-1.0))
    }
    fn apply(self, v: [f64; 2]) -> [f64; 2] {
        [self.0[0] * v[0] + self.0[1] * v[1], self.0[2] * v[0] + self.0[3] * v[1]]
    }
    /// `exp` of a traceless matrix: `Ω² = −det(Ω) I`.
    fn exp_traceless(self) -> M2 {
        let [a, b, c, d] = self.0;
        let q = -(a * d - b * c);
        let (ch, sh) = if q.abs() < 1e-8 {
            (1.0 + q / 2.0 + q * q / 24.0, 1.0 + q / 6.0 + q * q / 120.0)
        } else if q > 0.0 {
            let r = q.sqrt();
            (r.cosh(), r.sinh() / r)
        } else {
            let r = (-q).sqrt();
            (r.cos(), r.sin() / r)
        };
        M2([ch + sh * a, sh * b, sh * c, ch + sh * d])
    }
}

const GAUSS_OFFSET: f64 = 0.387_298_334_620_741_7; // √15/10

/// Adaptive Magnus integrator for one coefficient function.
pub struct Integrator<Q: Fn(f64) -> f64> {
    q: Q,
    eps: f64,
    cfg: IntegratorConfig,
    h: f64,
    prufer: f64,
    pub stats: Stats,
}

impl<Q: Fn(f64) -> f64> Integrator<Q> {
    pub fn new(q: Q, eps: f64, cfg: IntegratorConfig) -> Result<Self> {
        if !(eps > 0.0) {
            return Err(Error::Domain(format!("ε must be positive, got {eps}")));
        }
        if !(cfg.tol >= 1e-12) && cfg.fixed_step.is_none() {
            return Err(Error::Domain(format!(
                "tolerance must be at least 1e-12, got {}",
                cfg.tol
            )));
        }
        Ok(Integrator {
            q,
            eps,
            h: cfg.h0.unwrap_or(eps / 10.0),
            cfg,
            prufer: 0.0,
            stats: Stats::default(),
        })
    }

    /// Total change of the Prüfer angle `θ = atan2(x, y)` since the last reset.
    /// Zeros of `x` are crossed with `θ` increasing, so the number of zeros on a
    /// run is the number of multiples of π passed.
    pub fn prufer_change(&self) -> f64 {
        self.prufer
    }

    pub fn reset_prufer(&mut self) {
        self.prufer = 0.0;
    }

    fn generator(&self, t: f64) -> M2 {
        M2([0.0, 1.0 / self.eps, -(self.q)(t) / self.eps, 0.0])
    }

    fn magnus(&self, t: f64, h: f64) -> M2 {
        let a1 = self.generator(t + h * (0.5 - GAUSS_OFFSET));
        let a2 = self.generator(t + h * 0.5);
        let a3 = self.generator(t + h * (0.5 + GAUSS_OFFSET));
        let al1 = a2.scale(h);
        let al2 = a3.add(a1.scale(-1.0)).scale(h * 15f64.sqrt() / 3.0);
        let al3 = a3.add(a2.scale(-2.0)).add(a1).scale(10.0 * h / 3.0);
        let c1 = al1.comm(al2);
        let c2 = al1.comm(al3.scale(2.0).add(c1)).scale(-1.0 / 60.0);
        let lhs = al1.scale(-20.0).add(al3.scale(-1.0)).add(c1);
        let omega = al1
            .add(al3.scale(1.0 / 12.0))
            .add(lhs.comm(al2.add(c2)).scale(1.0 / 240.0));
        omega.exp_traceless()
    }

    fn cap(&self, t: f64) -> f64 {
        0.5 * self.eps / (self.q)(t).abs().max(1.0)
    }

    fn accept(&mut self, v: &mut [f64; 2], log: &mut f64, new: [f64; 2]) {
        let before = v[0].atan2(v[1]);
        let after = new[0].atan2(new[1]);
        let mut d = after - before;
        if d > std::f64::consts::PI {
            d -= 2.0 * std::f64::consts::PI;
        } else if d < -std::f64::consts::PI {
            d += 2.0 * std::f64::consts::PI;
        }
        self.prufer += d;
        *v = new;
        let n = v[0].hypot(v[1]);
        if !(1e-3..=1e3).contains(&n) {
            v[0] /= n;
            v[1] /= n;
            *log += n.ln();
            self.stats.renorms += 1;
        }
        self.stats.steps += 1;
    }

    /// Advance `state` to `t1`.
    pub fn advance(&mut self, state: LogScaledState, t1: f64) -> Result<LogScaledState> {
        let mut v = [state.xh, state.yh];
        let mut log = state.log_mag;
        let mut t = state.t;
        let dir = if t1 >= t { 1.0 } else { -1.0 };
        if let Some(hf) = self.cfg.fixed_step {
            let n = ((t1 - t).abs() / hf).ceil().max(1.0) as usize;
            let h = (t1 - t) / n as f64;
            for k in 0..n {
                let new = self.magnus(t, h).apply(v);
                self.accept(&mut v, &mut log, new);
                t = state.t + (k + 1) as f64 * h;
            }
        } else {
            let start_steps = self.stats.steps;
            while (t1 - t) * dir > 0.0 {
                if self.stats.steps - start_steps > self.cfg.max_steps {
                    return Err(Error::Integration {
                        t,
                        h: self.h,
                        steps: self.stats.steps,
                        reason: "step budget exhausted".into(),
                    });
                }
                let mut h = self.h.abs().min(self.cap(t));
                let last = h >= (t1 - t).abs();
                if last {
                    h = (t1 - t).abs();
                }
                let hs = h * dir;
                let big = self.magnus(t, hs).apply(v);
                let mid = self.magnus(t, hs / 2.0).apply(v);
                let halves = self.magnus(t + hs / 2.0, hs / 2.0).apply(mid);
                let scale = halves[0].hypot(halves[1]).max(1e-300);
                let err = (big[0] - halves[0]).hypot(big[1] - halves[1]) / 63.0 / scale;
                let fac = if err > 0.0 {
                    0.9 * (self.cfg.tol / err).powf(1.0 / 7.0)
                } else {
                    2.0
                };
                if err <= self.cfg.tol {
                    // Richardson step: the estimate bounds the unextrapolated error.
                    let rich = [
                        halves[0] + (halves[0] - big[0]) / 63.0,
                        halves[1] + (halves[1] - big[1]) / 63.0,
                    ];
                    self.accept(&mut v, &mut log, rich);
                    t = if last { t1 } else { t + hs };
                    if !last || fac < 1.0 {
                        self.h = h * fac.clamp(0.2, 2.0);
                    }
                } else {
                    self.stats.rejected += 1;
                    self.h = h * fac.clamp(0.2, 1.0);
                    if self.h < 1e-14 * t.abs().max(1.0) {
                        return Err(Error::Integration {
                            t,
                            h: self.h,
                            steps: self.stats.steps,
                            reason: format!("step underflow with error estimate {err:e}"),
                        });
                    }
                }
            }
        }
        LogScaledState::from_parts(t1, self.eps, v[0], v[1], log)
    }

    /// Advance through every point of a monotone grid, returning the state at each.
    pub fn advance_grid(&mut self, mut state: LogScaledState, grid: &[f64]) -> Result<Vec<LogScaledState>> {
        let mut out = Vec::with_capacity(grid.len());
        for &t in grid {
            state = self.advance(state, t)?;
            out.push(state);
        }
        Ok(out)
    }
}

fn check_window(p: &ProblemSpec, a: f64, b: f64) -> Result<()> {
    let nu = p.nu0();
    if a.abs() > nu * (1.0 + 1e-12) || b.abs() > nu * (1.0 + 1e-12) {
        return Err(Error::Window(format!("[{a}, {b}] leaves [−{nu}, {nu}]")));
    }
    Ok(())
}

/// Integrate the problem from `state0` (at `state0.t`) to `t1`.
pub fn integrate(p: &ProblemSpec, eps: f64, state0: LogScaledState, t1: f64, tol: f64) -> Result<LogScaledState> {
    check_window(p, state0.t, t1)?;
    Integrator::new(|t| p.mu(t), eps, IntegratorConfig::new(tol))?.advance(state0, t1)
}

/// Integrate through a monotone grid starting from `state0`.
pub fn integrate_to_grid(
    p: &ProblemSpec,
    eps: f64,
    state0: LogScaledState,
    grid: &[f64],
    tol: f64,
) -> Result<Vec<LogScaledState>> {
    if let (Some(&a), Some(&b)) = (grid.first(), grid.last()) {
        check_window(p, state0.t, a)?;
        check_window(p, a, b)?;
    }
    Integrator::new(|t| p.mu(t), eps, IntegratorConfig::new(tol))?.advance_grid(state0, grid)
}

/// Canonical start for the unstable bundle: `(1, √(−μ(−ν₀)))` at `t = −ν₀`.
pub fn wu_start(p: &ProblemSpec, eps: f64) -> Result<LogScaledState> {
    let t0 = -p.nu0();
    let mu = p.mu(t0);
    if !(mu < 0.0) {
        return Err(Error::WrongSide(format!("μ(−ν₀) = {mu} is not negative")));
    }
    LogScaledState::from_xy(t0, eps, 1.0, (-mu).sqrt())
}

/// The canonical unstable solution sampled on an ascending grid in `[−ν₀, ν₀]`.
pub fn wu_reference(p: &ProblemSpec, eps: f64, grid: &[f64], tol: f64) -> Result<Vec<LogScaledState>> {
    integrate_to_grid(p, eps, wu_start(p, eps)?, grid, tol)
}

/// Slope `y/x` of the unstable bundle at `t < 0`, by forward integration from
/// `−ν₀`, where the forward flow attracts toward the slow manifold.
pub fn riccati_reference(p: &ProblemSpec, eps: f64, t: f64) -> Result<f64> {
    if !(t < 0.0 && t >= -p.nu0()) || !(p.mu(t) < 0.0) {
        return Err(Error::Window(format!(
            "t = {t} is outside the hyperbolic window [−{}, 0)",
            p.nu0()
        )));
    }
    let mut it = Integrator::new(|s| p.mu(s), eps, IntegratorConfig::new(1e-12))?;
    let s = it.advance(wu_start(p, eps)?, t)?;
    if it.prufer_change().abs() >= std::f64::consts::PI / 2.0 || s.xh.abs() < 1e-300 {
        return Err(Error::Integration {
            t,
            h: 0.0,
            steps: it.stats.steps,
            reason: "x changed sign: the slope left the attracting branch".into(),
        });
    }
    Ok(s.slope())
}

/// Least-squares slope of `log error` against `log ε`.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct RateFit {
    pub slope: f64,
    /// Half-width of the 95% confidence interval; `0` when the fit is exact or `n = 2`.
    pub half_width: f64,
    pub intercept: f64,
    pub n: usize,
}

pub fn rate_fit(pairs: &[(f64, f64)]) -> Result<RateFit> {
    if pairs.len() < 3 {
        return Err(Error::Fit(format!(
            "need at least 3 (ε, error) pairs, got {}",
            pairs.len()
        )));
    }
    if let Some(&(e, err)) = pairs.iter().find(|&&(e, err)| !(e > 0.0 && err > 0.0)) {
        return Err(Error::Fit(format!("nonpositive value in pair ({e}, {err})")));
    }
    let pts: Vec<(f64, f64)> = pairs.iter().map(|&(e, err)| (e.ln(), err.ln())).collect();
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    if !(sxx > 0.0) {
        return Err(Error::Fit("all ε values coincide".into()));
    }
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let rss: f64 = pts.iter().map(|p| (p.1 - intercept - slope * p.0).powi(2)).sum();
    let se = (rss / (n - 2.0) / sxx).sqrt();
    let tq = StudentsT::new(0.0, 1.0, n - 2.0)
        .map(|d| d.inverse_cdf(0.975))
        .unwrap_or(f64::NAN);
    Ok(RateFit {
        slope,
        half_width: se * tq,
        intercept,
        n: pts.len(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rotation_conserves_norm() {
        let eps = 0.01;
        let mut it = Integrator::new(|_| 1.0, eps, IntegratorConfig::new(1e-12)).unwrap();
        let s0 = LogScaledState::from_xy(0.0, eps, 1.0, 0.0).unwrap();
        let s1 = it.advance(s0, 10.0).unwrap();
        assert!(s1.log_mag.abs() < 1e-9, "{}", s1.log_mag);
        assert!((s1.xh - 1000f64.cos()).abs() < 1e-8);
        assert!((it.prufer_change() - 1000.0).abs() < 1e-8);
    }

    #[test]
    fn magnus_order_six() {
        let eps = 0.05;
        let q = |t: f64| 1.0 + 0.5 * t;
        let s0 = LogScaledState::from_xy(0.0, eps, 1.0, 0.0).unwrap();
        let exact = Integrator::new(q, eps, IntegratorConfig::fixed(1e-4))
            .unwrap()
            .advance(s0, 1.0)
            .unwrap();
        let e = |h: f64| {
            let s = Integrator::new(q, eps, IntegratorConfig::fixed(h))
                .unwrap()
                .advance(s0, 1.0)
                .unwrap();
            (s.xh - exact.xh).hypot(s.yh - exact.yh) + (s.log_mag - exact.log_mag).abs()
        };
        let (e1, e2) = (e(0.02), e(0.01));
        let order = (e1 / e2).log2();
        assert!(order > 5.5, "observed order {order}");
    }

    #[test]
    fn linearity_of_log() {
        let p = ProblemSpec::from_mu(vec![0.0, 1.0, 0.5], 0.5).unwrap();
        let a = LogScaledState::from_xy(-0.5, 0.01, 1.0, 0.3).unwrap();
        let b = LogScaledState::from_xy(-0.5, 0.01, 2.0, 0.6).unwrap();
        let sa = integrate(&p, 0.01, a, 0.3, 1e-11).unwrap();
        let sb = integrate(&p, 0.01, b, 0.3, 1e-11).unwrap();
        assert!((sb.log_mag - sa.log_mag - 2f64.ln()).abs() < 1e-12);
        assert_eq!((sa.xh, sa.yh), (sb.xh, sb.yh));
    }

    #[test]
    fn riccati_matches_series() {
        let p = ProblemSpec::from_mu(vec![0.0, 1.0], 5.0).unwrap();
        let eps = 1e-3;
        let u = riccati_reference(&p, eps, -1.0).unwrap();
        let series = 1.0 + eps / 4.0 - 5.0 / 32.0 * eps * eps;
        assert!((u - series).abs() < 2e-9, "{}", u - series);
    }

    #[test]
    fn rate_fit_examples() {
        let pairs: Vec<_> = [0.1, 0.05, 0.025]
            .iter()
            .map(|&e: &f64| (e, e.powf(2.0 / 3.0)))
            .collect();
        assert!((rate_fit(&pairs).unwrap().slope - 2.0 / 3.0).abs() < 1e-12);
        let pairs: Vec<_> = [0.1, 0.05, 0.025].iter().map(|&e| (e, 3.0 * e)).collect();
        assert!((rate_fit(&pairs).unwrap().slope - 1.0).abs() < 1e-12);
        assert!(rate_fit(&[(0.1, 1.0), (0.2, 0.0), (0.3, 1.0)]).is_err());
    }
}
