//! The unstable line bundle on `t < 0`.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::problem::ProblemSpec;
use crate::reference::{riccati_reference, LogScaledState};
use crate::series::riccati::hyp_riccati_coeffs;

/// The window is `[−ν₀, −GUARD·ε^{2/3}]`.
pub const GUARD: f64 = 3.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum SlopeMethod {
    /// Sum of the slow-manifold series to order `N`.
    Series(usize),
    /// Forward Riccati integration from `−ν₀`.
    Riccati,
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct SlopeValue {
    pub t: f64,
    pub eps: f64,
    pub h: f64,
    pub method: SlopeMethod,
}

/// Check `t ∈ [−ν₀, −GUARD·ε^{2/3}]`.
pub fn check_window(p: &ProblemSpec, t: f64, eps: f64) -> Result<()> {
    let edge = -GUARD * eps.powf(2.0 / 3.0);
    if t < -p.nu0() * (1.0 + 1e-12) {
        return Err(Error::Window(format!("t = {t} is left of −ν₀ = {}", -p.nu0())));
    }
    if t > edge || t >= 0.0 {
        return Err(Error::TurningRegion(format!(
            "t = {t} is inside the turning region (t > {edge}); use the blowup charts"
        )));
    }
    Ok(())
}

/// Slope `y/x` of the unstable bundle at `t`.
pub fn h_u(p: &ProblemSpec, t: f64, eps: f64, method: SlopeMethod) -> Result<SlopeValue> {
    check_window(p, t, eps)?;
    let h = match method {
        SlopeMethod::Series(n) => {
            if eps == 0.0 {
                (-p.mu(t)).sqrt()
            } else {
                hyp_riccati_coeffs(p, t, n)?.eval(eps)
            }
        }
        SlopeMethod::Riccati => riccati_reference(p, eps, t)?,
    };
    Ok(SlopeValue { t, eps, h, method })
}

/// Liouville–Green solution on the unstable bundle through `(t₀, x₀)`:
/// `x = (μ(t₀)/μ(t))^{1/4} exp(ε⁻¹∫_{t₀}^t √(−μ)) x₀`, `y = h_u(t) x` with the
/// first-order slope. The exponential is kept in `log_mag`.
///
/// Only the open hyperbolic side `[−ν₀, 0)` with `μ < 0` is required here; the
/// `ε^{2/3}` guard of [`h_u`] is left to callers that need the slope accuracy.
pub fn wu_state(p: &ProblemSpec, t: f64, t0: f64, x0: f64, eps: f64) -> Result<LogScaledState> {
    for s in [t, t0] {
        if !(s < 0.0 && s >= -p.nu0() * (1.0 + 1e-12) && p.mu(s) < 0.0) {
            return Err(Error::Window(format!(
                "t = {s} is outside the hyperbolic side [−{}, 0)",
                p.nu0()
            )));
        }
    }
    if x0 == 0.0 {
        return Err(Error::Domain("x₀ must be nonzero".into()));
    }
    let amp = (p.mu(t0) / p.mu(t)).powf(0.25);
    let growth = p.action(t0, t)? / eps;
    let h = hyp_riccati_coeffs(p, t, 1)?.eval(eps);
    LogScaledState::from_parts(t, eps, amp * x0, amp * x0 * h, growth)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::problem::catalog;

    #[test]
    fn slope_examples() {
        let p = ProblemSpec::from_mu(vec![0.0, 1.0], 2.0).unwrap();
        let h1 = h_u(&p, -1.0, 0.01, SlopeMethod::Series(1)).unwrap().h;
        assert!((h1 - 1.0025).abs() < 1e-15);
        let h2 = h_u(&p, -1.0, 0.01, SlopeMethod::Series(2)).unwrap().h;
        assert!((h2 - (1.0025 - 5.0 / 32.0 * 1e-4)).abs() < 1e-15);
        let h0 = h_u(&p, -1.0, 0.0, SlopeMethod::Series(3)).unwrap().h;
        assert_eq!(h0, 1.0);
    }

    #[test]
    fn turning_region_guard() {
        let p = catalog::linear();
        let e = h_u(&p, -0.05, 0.01, SlopeMethod::Series(1));
        assert!(matches!(e, Err(Error::TurningRegion(_))));
    }

    #[test]
    fn wu_state_examples() {
        let p = catalog::linear();
        let s = wu_state(&p, -0.3, -0.3, 2.0, 0.01).unwrap();
        let h = h_u(&p, -0.3, 0.01, SlopeMethod::Series(1)).unwrap().h;
        let (x, y) = s.xy().unwrap();
        assert!((x - 2.0).abs() < 1e-14 && (y - 2.0 * h).abs() < 1e-13);
        let s = wu_state(&p, -0.04, -0.25, 1.0, 0.01).unwrap();
        let amp = (0.25f64 / 0.04).powf(0.25);
        assert!((amp - 1.5811388300841898).abs() < 1e-15);
        let h: f64 = 0.2 + 0.01 / 0.16;
        let expect = 7.8 + (amp * (1.0 + h * h).sqrt()).ln();
        assert!((s.log_mag - expect).abs() < 1e-11, "{} vs {expect}", s.log_mag);
    }
}
