//! The coefficient function μ, potential wells, normalization and action integrals.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::poly::Poly;
use crate::quad;
use crate::series::jet::TaylorJet;
use crate::solve::bracketed_root;

/// Default half-width of the neighbourhood around the turning point.
pub const DEFAULT_NU0: f64 = 0.5;

const ACTION_TOL: f64 = 1e-13;

/// A well `V` at energy `E`, shifted so that the left turning point sits at `t = 0`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WellForm {
    pub v: Poly,
    pub energy: f64,
    /// Turning points of `V − E` in the original coordinate.
    pub t_minus: f64,
    pub t_plus: f64,
}

/// `ε²x″ + μ(t)x = 0` with `μ(0) = 0`, `μ′(0) > 0` on `[−ν₀, ν₀]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProblemSpec {
    mu: Poly,
    mu_hat: Poly,
    nu0: f64,
    well: Option<WellForm>,
}

/// JSON document accepted by [`ProblemSpec::from_json`].
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ProblemDoc {
    Mu {
        mu_poly: Vec<f64>,
        #[serde(default)]
        nu0: Option<f64>,
    },
    Well {
        v_poly: Vec<f64>,
        energy: f64,
        #[serde(default)]
        nu0: Option<f64>,
    },
}

/// Scalings that map a normalized problem back to the original one:
/// `t = t_scale·s`, `y = y_scale·y_n`, `μ(t) = μ_n(t/t_scale)/t_scale²`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NormalizationRecord {
    pub t_scale: f64,
    pub y_scale: f64,
    pub original: ProblemSpec,
}

impl NormalizationRecord {
    pub fn original_t(&self, s: f64) -> f64 {
        self.t_scale * s
    }

    pub fn normalized_t(&self, t: f64) -> f64 {
        t / self.t_scale
    }

    pub fn original_y(&self, y_n: f64) -> f64 {
        self.y_scale * y_n
    }

    /// Reconstruct the original μ at `t` from the normalized problem.
    pub fn denormalized_mu(&self, normalized: &ProblemSpec, t: f64) -> f64 {
        normalized.mu(t / self.t_scale) / (self.t_scale * self.t_scale)
    }
}

impl ProblemSpec {
    /// Build from μ coefficients, checking `μ(0) = 0`, `μ′(0) > 0` and that μ
    /// has no other zero in `0 < |t| ≤ ν₀`.
    pub fn from_mu(coeffs: Vec<f64>, nu0: f64) -> Result<Self> {
        let mut c = coeffs;
        if c.is_empty() {
            return Err(Error::InvalidProblem("empty μ polynomial".into()));
        }
        let scale = c.iter().map(|v| v.abs()).fold(0.0, f64::max);
        if c[0].abs() > 1e-14 * scale {
            return Err(Error::InvalidProblem(format!("μ(0) = {} ≠ 0", c[0])));
        }
        c[0] = 0.0;
        let p = Self::surrogate(c, nu0);
        p.validate()?;
        Ok(p)
    }

    /// Build from a well `V` and energy `E`; μ(t) = E − V(t + t₋(E)).
    pub fn from_well(v_coeffs: Vec<f64>, energy: f64, nu0: f64) -> Result<Self> {
        let v = Poly::new(v_coeffs);
        let (tm, tp) = turning_points(&v, energy)?;
        let mut c: Vec<f64> = v.shifted_coeffs(tm).iter().map(|x| -x).collect();
        c[0] = 0.0;
        let mut p = Self::surrogate(c, nu0);
        p.well = Some(WellForm {
            v,
            energy,
            t_minus: tm,
            t_plus: tp,
        });
        p.validate()?;
        Ok(p)
    }

    /// Build without checking the turning-point invariants (constant-coefficient
    /// surrogates and similar test problems).
    pub fn surrogate(coeffs: Vec<f64>, nu0: f64) -> Self {
        let mu = Poly::new(coeffs);
        let mu_hat = mu.div_t();
        ProblemSpec {
            mu,
            mu_hat,
            nu0,
            well: None,
        }
    }

    pub fn from_doc(doc: &ProblemDoc) -> Result<Self> {
        match doc {
            ProblemDoc::Mu { mu_poly, nu0 } => Self::from_mu(mu_poly.clone(), nu0.unwrap_or(DEFAULT_NU0)),
            ProblemDoc::Well { v_poly, energy, nu0 } => {
                Self::from_well(v_poly.clone(), *energy, nu0.unwrap_or(DEFAULT_NU0))
            }
        }
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let doc: ProblemDoc =
            serde_json::from_str(text).map_err(|e| Error::InvalidProblem(format!("bad problem JSON: {e}")))?;
        Self::from_doc(&doc)
    }

    fn validate(&self) -> Result<()> {
        if !(self.nu0 > 0.0) || !self.nu0.is_finite() {
            return Err(Error::InvalidProblem(format!("ν₀ = {} must be positive", self.nu0)));
        }
        if self.mu.coeffs()[0] != 0.0 {
            return Err(Error::InvalidProblem("μ(0) ≠ 0".into()));
        }
        let d = self.mu_prime0();
        if !(d > 0.0) {
            return Err(Error::InvalidProblem(format!("μ′(0) = {d} must be positive")));
        }
        // μ(t) = t μ̂(t), so μ ≠ 0 on 0 < |t| ≤ ν₀ iff μ̂ has no root on [−ν₀, ν₀].
        let pad = 1e-12 * self.nu0;
        if self.mu_hat.count_roots(-self.nu0 - pad, self.nu0) > 0 {
            return Err(Error::InvalidProblem(format!(
                "μ has a second zero within |t| ≤ ν₀ = {}",
                self.nu0
            )));
        }
        Ok(())
    }

    pub fn mu_poly(&self) -> &Poly {
        &self.mu
    }

    pub fn nu0(&self) -> f64 {
        self.nu0
    }

    pub fn with_nu0(&self, nu0: f64) -> Result<Self> {
        let mut p = self.clone();
        p.nu0 = nu0;
        p.validate()?;
        Ok(p)
    }

    pub fn well(&self) -> Option<&WellForm> {
        self.well.as_ref()
    }

    pub fn mu(&self, t: f64) -> f64 {
        self.mu.eval(t)
    }

    pub fn mu_prime0(&self) -> f64 {
        self.mu.coeffs().get(1).copied().unwrap_or(0.0)
    }

    /// Taylor jet of μ at `t` to order `k`; exact for polynomials.
    pub fn mu_jet(&self, t: f64, k: usize) -> TaylorJet<f64> {
        TaylorJet::new(t, self.mu.taylor(t, k))
    }

    /// μ̂(t) = μ(t)/t, continued by μ′(0) at 0.
    pub fn mu_hat(&self, t: f64) -> f64 {
        self.mu_hat.eval(t)
    }

    pub fn mu_hat_jet(&self, t: f64, k: usize) -> TaylorJet<f64> {
        TaylorJet::new(t, self.mu_hat.taylor(t, k))
    }

    /// ∫ₐᵇ √|μ(s)| ds; see [`action_poly`].
    pub fn action(&self, a: f64, b: f64) -> Result<f64> {
        action_poly(&self.mu, a, b)
    }

    /// The part of the action not captured by the Airy phase `(2/3)|t|^{3/2}`:
    /// `∫₀ᵗ √μ − (2/3)t^{3/2}` for `t ≥ 0` and `∫ₜ⁰ √(−μ) − (2/3)|t|^{3/2}` for `t < 0`.
    ///
    /// Computed as `∫₀^{√|t|} 2u²(√μ̂(±u²) − 1) du`, which has no cancellation.
    pub fn phase_correction(&self, t: f64) -> Result<f64> {
        let sign = if t < 0.0 { -1.0 } else { 1.0 };
        let top = t.abs().sqrt();
        if top == 0.0 {
            return Ok(0.0);
        }
        let bad = std::cell::Cell::new(None);
        let v = quad::integrate(
            |u| {
                let m = self.mu_hat(sign * u * u);
                if !(m > 0.0) {
                    bad.set(Some(sign * u * u));
                    return 0.0;
                }
                2.0 * u * u * (m - 1.0) / (m.sqrt() + 1.0)
            },
            0.0,
            top,
            ACTION_TOL,
        );
        if let Some(s) = bad.get() {
            return Err(Error::Domain(format!("μ̂({s}) ≤ 0 inside the phase-correction range")));
        }
        Ok(v)
    }

    /// Bring the problem to `μ′(0) = 1` by `t = α s`, `α = μ′(0)^{−1/3}`.
    pub fn normalize(&self) -> Result<(ProblemSpec, NormalizationRecord)> {
        let d = self.mu_prime0();
        if !(d > 0.0) {
            return Err(Error::InvalidProblem(format!("μ′(0) = {d} must be positive")));
        }
        let alpha = d.powf(-1.0 / 3.0);
        let mut c: Vec<f64> = self.mu.scale_arg(alpha).scale(alpha * alpha).coeffs().to_vec();
        c[0] = 0.0;
        c[1] = 1.0;
        let mut n = Self::surrogate(c, self.nu0 / alpha);
        if let Some(w) = &self.well {
            n.well = Some(WellForm {
                v: w.v.scale_arg(alpha).scale(alpha * alpha),
                energy: w.energy * alpha * alpha,
                t_minus: w.t_minus / alpha,
                t_plus: w.t_plus / alpha,
            });
        }
        Ok((
            n,
            NormalizationRecord {
                t_scale: alpha,
                y_scale: 1.0 / alpha,
                original: self.clone(),
            },
        ))
    }

    /// Whether `μ′(0) = 1` (to rounding).
    pub fn is_normalized(&self) -> bool {
        (self.mu_prime0() - 1.0).abs() <= 1e-12
    }
}

/// ∫ₐᵇ √|p(s)| ds for a polynomial that keeps its sign on `(a, b)`.
///
/// The interval is split at its midpoint and each half is mapped by
/// `s = endpoint ± σ²`, which turns simple-zero endpoint singularities into
/// smooth integrands; the halves are integrated adaptively.
pub fn action_poly(p: &Poly, a: f64, b: f64) -> Result<f64> {
    if a == b {
        return Ok(0.0);
    }
    let (lo, hi, sign) = if a < b { (a, b, 1.0) } else { (b, a, -1.0) };
    let w = hi - lo;
    let pad = 1e-9 * w;
    if p.count_roots(lo + pad, hi - pad) > 0 {
        return Err(Error::Domain(format!("integrand changes sign inside ({lo}, {hi})")));
    }
    let m = 0.5 * (lo + hi);
    let left = quad::integrate(
        |s| 2.0 * s * p.eval(lo + s * s).abs().sqrt(),
        0.0,
        (m - lo).sqrt(),
        ACTION_TOL,
    );
    let right = quad::integrate(
        |s| 2.0 * s * p.eval(hi - s * s).abs().sqrt(),
        0.0,
        (hi - m).sqrt(),
        ACTION_TOL,
    );
    Ok(sign * (left + right))
}

/// The two simple roots `t₋ < t₊` of `V − E` around the well minimum.
pub fn turning_points(v: &Poly, energy: f64) -> Result<(f64, f64)> {
    let w = v.sub(&Poly::new(vec![energy]));
    if w.degree() < 2 {
        return Err(Error::DegenerateWell("V must be at least quadratic".into()));
    }
    let r = w.cauchy_bound();
    let n = w.count_roots(-r, r);
    if n != 2 {
        return Err(Error::DegenerateWell(format!(
            "V − E has {n} distinct real roots, expected two simple ones (E = {energy})"
        )));
    }
    let samples = 4000;
    let (mut tmin, mut wmin) = (0.0, f64::INFINITY);
    for k in 0..=samples {
        let t = -r + 2.0 * r * k as f64 / samples as f64;
        let val = w.eval(t);
        if val < wmin {
            wmin = val;
            tmin = t;
        }
    }
    if !(wmin < 0.0) || !(w.eval(-r) > 0.0) || !(w.eval(r) > 0.0) {
        return Err(Error::DegenerateWell(format!(
            "no bracket around the well bottom at E = {energy}"
        )));
    }
    let dw = w.derivative();
    let polish = |t: f64| {
        let d = dw.eval(t);
        if d != 0.0 {
            let s = t - w.eval(t) / d;
            if (s - t).abs() < 1e-12 * (1.0 + t.abs()) {
                return s;
            }
        }
        t
    };
    let tm = polish(bracketed_root(|t| w.eval(t), -r, tmin, 1e-16)?);
    let tp = polish(bracketed_root(|t| w.eval(t), tmin, r, 1e-16)?);
    if dw.eval(tm).abs() == 0.0 || dw.eval(tp).abs() == 0.0 {
        return Err(Error::DegenerateWell("double root".into()));
    }
    Ok((tm, tp))
}

/// Fixed example problems used throughout the tests and the CLI.
pub mod catalog {
    use super::*;

    /// μ = t, the Airy case.
    pub fn linear() -> ProblemSpec {
        ProblemSpec::from_mu(vec![0.0, 1.0], DEFAULT_NU0).unwrap()
    }

    /// μ = t + t²/2.
    pub fn quadratic() -> ProblemSpec {
        ProblemSpec::from_mu(vec![0.0, 1.0, 0.5], DEFAULT_NU0).unwrap()
    }

    /// Harmonic well V = t².
    pub fn harmonic_well() -> Poly {
        Poly::new(vec![0.0, 0.0, 1.0])
    }

    /// Quartic-perturbed well V = t² + 0.1 t⁴.
    pub fn quartic_well() -> Poly {
        Poly::new(vec![0.0, 0.0, 1.0, 0.0, 0.1])
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn mu_jet_examples() {
        let lin = catalog::linear();
        assert_eq!(lin.mu_jet(-1.0, 2).coeffs, vec![-1.0, 1.0, 0.0]);
        let q = catalog::quadratic();
        assert_eq!(q.mu_jet(0.0, 2).coeffs, vec![0.0, 1.0, 0.5]);
        assert_eq!(q.mu_jet(1.0, 1).coeffs, vec![1.5, 2.0]);
    }

    #[test]
    fn mu_hat_examples() {
        assert_eq!(catalog::linear().mu_hat(3.7), 1.0);
        assert_eq!(catalog::quadratic().mu_hat(0.0), 1.0);
        assert_eq!(catalog::quadratic().mu_hat(1.0), 1.5);
    }

    #[test]
    fn action_examples() {
        let lin = ProblemSpec::from_mu(vec![0.0, 1.0], 1.0).unwrap();
        assert!((lin.action(0.0, 1.0).unwrap() - 2.0 / 3.0).abs() < 1e-13);
        assert_eq!(lin.action(0.0, 0.0).unwrap(), 0.0);
        let w = Poly::new(vec![1.0, 0.0, -1.0]);
        assert!((action_poly(&w, -1.0, 1.0).unwrap() - std::f64::consts::FRAC_PI_2).abs() < 1e-13);
        assert!(lin.action(-0.5, 0.5).is_err());
    }

    #[test]
    fn turning_point_examples() {
        let (a, b) = turning_points(&catalog::harmonic_well(), 1.0).unwrap();
        assert!((a + 1.0).abs() < 1e-14 && (b - 1.0).abs() < 1e-14);
        let tau = (-1.0 + 1.4f64.sqrt()) / 0.2;
        let (a, b) = turning_points(&catalog::quartic_well(), 1.0).unwrap();
        assert!((b - tau.sqrt()).abs() < 1e-13 && (a + tau.sqrt()).abs() < 1e-13);
        assert!((b - 0.957_120).abs() < 1e-6);
        assert!(matches!(
            turning_points(&catalog::harmonic_well(), 0.0),
            Err(Error::DegenerateWell(_))
        ));
    }

    #[test]
    fn normalize_examples() {
        let (n, rec) = catalog::linear().normalize().unwrap();
        assert_eq!(rec.t_scale, 1.0);
        assert_eq!(rec.y_scale, 1.0);
        assert_eq!(n.mu_poly(), catalog::linear().mu_poly());

        let four = ProblemSpec::from_mu(vec![0.0, 4.0], 0.5).unwrap();
        let (n, rec) = four.normalize().unwrap();
        assert_eq!(n.mu_prime0(), 1.0);
        for k in 0..=20 {
            let t = -0.5 + 0.05 * k as f64;
            assert!((rec.denormalized_mu(&n, t) - 4.0 * t).abs() < 1e-14);
        }

        let q = ProblemSpec::from_mu(vec![0.0, 2.0, 1.0], 0.5).unwrap();
        let (n, _) = q.normalize().unwrap();
        assert_eq!(n.mu_jet(0.0, 1).coeffs[1], 1.0);
    }

    #[test]
    fn invalid_problems_are_rejected() {
        assert!(ProblemSpec::from_mu(vec![0.0, -1.0], 0.5).is_err());
        assert!(ProblemSpec::from_mu(vec![0.1, 1.0], 0.5).is_err());
        // μ = t(1 − 4t) vanishes again at t = 1/4
        assert!(ProblemSpec::from_mu(vec![0.0, 1.0, -4.0], 0.5).is_err());
        assert!(ProblemSpec::from_mu(vec![0.0, 1.0, -4.0], 0.2).is_ok());
    }

    #[test]
    fn well_form_shifts_left_turning_point_to_origin() {
        let p = ProblemSpec::from_well(vec![0.0, 0.0, 1.0], 1.0, 0.5).unwrap();
        // E − (t − 1)² = 2t − t²
        let c = p.mu_poly().coeffs();
        assert!((c[1] - 2.0).abs() < 1e-14 && (c[2] + 1.0).abs() < 1e-14);
    }

    #[test]
    fn json_documents() {
        let p = ProblemSpec::from_json(r#"{"mu_poly": [0, 1, 0.5]}"#).unwrap();
        assert_eq!(p, catalog::quadratic());
        let w = ProblemSpec::from_json(r#"{"v_poly": [0, 0, 1], "energy": 1.0, "nu0": 0.4}"#).unwrap();
        assert_eq!(w.nu0(), 0.4);
        assert!(ProblemSpec::from_json("{").is_err());
    }

    #[test]
    fn phase_correction_vanishes_for_airy_case() {
        let lin = catalog::linear();
        assert_eq!(lin.phase_correction(0.3).unwrap(), 0.0);
        assert_eq!(lin.phase_correction(-0.3).unwrap(), 0.0);
        let q = catalog::quadratic();
        for &t in &[-0.4, -0.1, 0.05, 0.3] {
            let direct = if t > 0.0 {
                q.action(0.0, t).unwrap() - 2.0 / 3.0 * t.powf(1.5)
            } else {
                q.action(t, 0.0).unwrap() - 2.0 / 3.0 * (-t).powf(1.5)
            };
            assert!((q.phase_correction(t).unwrap() - direct).abs() < 1e-12);
        }
    }
}
