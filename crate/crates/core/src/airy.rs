//! Real-argument Airy functions.
//!
//! `|x| ≤ X_SWITCH` uses the Maclaurin series summed in double-double
//! arithmetic (the positive side cancels like `e^{2ζ}`); beyond it the
//! Poincaré expansions are summed up to their smallest term and the tail is
//! replaced by the Borel-summed remainder of the factorial late terms
//! (see [`borel_terminant`]).

use std::f64::consts::{FRAC_PI_4, PI};
use std::sync::OnceLock;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use twofloat::TwoFloat;

use crate::error::{Error, Result};
use crate::quad;

/// Argument magnitude at which evaluation switches from series to asymptotics.
pub const X_SWITCH: f64 = 6.5;
/// Band on which both methods are required to agree.
pub const OVERLAP_BAND: (f64, f64) = (5.5, 7.5);
/// Largest |x| accepted by [`airy_eval`].
pub const MAX_ARG: f64 = 200.0;

const AI0: (f64, f64) = (0.3550280538878172, 2.05233632436212e-17);
const MINUS_AIP0: (f64, f64) = (0.2588194037928068, -2.522243111610832e-17);
const SQRT3: (f64, f64) = (1.7320508075688772, 1.0035084221806903e-16);
const MAX_TERMS: usize = 80;

/// Ai, Ai′, Bi, Bi′ at one argument.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AiryQuad {
    pub ai: f64,
    pub aip: f64,
    pub bi: f64,
    pub bip: f64,
}

impl AiryQuad {
    /// `Ai·Bi′ − Ai′·Bi`, equal to `1/π`.
    pub fn wronskian(&self) -> f64 {
        self.ai * self.bip - self.aip * self.bi
    }
}

/// Exponentially scaled values: for `x > 0`, `Ai = ai·e^{−ζ}`, `Ai′ = aip·e^{−ζ}`,
/// `Bi = bi·e^{ζ}`, `Bi′ = bip·e^{ζ}` with `ζ = (2/3)x^{3/2}`; for `x ≤ 0`, `zeta = 0`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScaledAiry {
    pub ai: f64,
    pub aip: f64,
    pub bi: f64,
    pub bip: f64,
    pub zeta: f64,
}

fn dd(c: (f64, f64)) -> TwoFloat {
    TwoFloat::new_add(c.0, c.1)
}

/// Maclaurin series, summed in double-double arithmetic.
pub fn airy_series(x: f64) -> AiryQuad {
    let xd = TwoFloat::from(x);
    let x3 = xd * xd * xd;
    let tiny = 1e-34;

    let sum = |first: TwoFloat, k0: usize, den: &dyn Fn(usize) -> f64| {
        let mut term = first;
        let mut acc = first;
        let mut k = k0;
        loop {
            term = term * x3 / den(k);
            acc += term;
            if f64::from(term).abs() <= tiny * f64::from(acc).abs().max(1e-300) || k > 400 {
                break;
            }
            k += 1;
        }
        acc
    };

    let one = TwoFloat::from(1.0);
    let f = sum(one, 1, &|k| ((3 * k - 1) * (3 * k)) as f64);
    let g = sum(xd, 1, &|k| ((3 * k) * (3 * k + 1)) as f64);
    let fp = sum(xd * xd / 2.0, 2, &|k| ((3 * k - 3) * (3 * k - 1)) as f64);
    let gp = sum(one, 1, &|k| ((3 * k - 2) * (3 * k)) as f64);

    let c1 = dd(AI0);
    let c2 = dd(MINUS_AIP0);
    let s3 = dd(SQRT3);
    AiryQuad {
        ai: f64::from(c1 * f - c2 * g),
        aip: f64::from(c1 * fp - c2 * gp),
        bi: f64::from(s3 * (c1 * f + c2 * g)),
        bip: f64::from(s3 * (c1 * fp + c2 * gp)),
    }
}

fn asymptotic_coeffs() -> &'static (Vec<f64>, Vec<f64>) {
    static C: OnceLock<(Vec<f64>, Vec<f64>)> = OnceLock::new();
    C.get_or_init(|| {
        let mut u = vec![1.0];
        let mut v = vec![1.0];
        for k in 1..=MAX_TERMS {
            let kf = k as f64;
            let uk =
                u[k - 1] * (6.0 * kf - 5.0) * (6.0 * kf - 3.0) * (6.0 * kf - 1.0) / ((2.0 * kf - 1.0) * 216.0 * kf);
            u.push(uk);
            v.push(-(6.0 * kf + 1.0) / (6.0 * kf - 1.0) * uk);
        }
        (u, v)
    })
}

/// Direction of the factorial late terms `a_k ∼ C Γ(k) (σ/y)^k`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LateTerms {
    /// σ = −1: alternating, Borel-summable along the real axis.
    Alternating,
    /// σ = −i: terms rotate by a quarter turn.
    Rotating,
    /// σ = +1: same sign, summed as a principal value.
    SameSign,
}

fn ln_gamma_int(k: usize) -> f64 {
    (2..k).map(|j| (j as f64).ln()).sum()
}

/// Borel-summed tail factor `Λ` such that `Σ_{j≥0} a_{k+j} ≈ a_k Λ` when
/// `a_{k+j}/a_k = Γ(k+j)/Γ(k) (σ/y)^j`:
/// `Λ = Γ(k)^{−1} ∫₀^∞ e^{−s} s^{k−1} (1 − σ s/y)^{−1} ds`.
pub fn borel_terminant(k: usize, y: f64, kind: LateTerms) -> Complex64 {
    let k = k.max(1);
    let lg = ln_gamma_int(k);
    let km1 = (k - 1) as f64;
    let w = |s: f64| {
        if s <= 0.0 {
            if k == 1 {
                1.0
            } else {
                0.0
            }
        } else {
            (-s + km1 * s.ln() - lg).exp()
        }
    };
    let top = k as f64 + 40.0 + 12.0 * (k as f64).sqrt();
    let tol = 1e-12;
    match kind {
        LateTerms::Alternating => Complex64::new(quad::integrate(|s| w(s) / (1.0 + s / y), 0.0, top, tol), 0.0),
        LateTerms::Rotating => {
            quad::integrate_complex(
                |s| {
                    let r = s / y;
                    Complex64::new(1.0, -r) * (w(s) / (1.0 + r * r))
                },
                0.0,
                top,
                tol,
            )
            .0
        }
        LateTerms::SameSign => {
            let wy = w(y);
            let near = quad::integrate(|s| (w(s) - wy) / (1.0 - s / y), 0.0, 2.0 * y, tol);
            let far = if top > 2.0 * y {
                quad::integrate(|s| w(s) / (1.0 - s / y), 2.0 * y, top, tol)
            } else {
                0.0
            };
            Complex64::new(near + far, 0.0)
        }
    }
}

/// Sum `Σ c_k q^k` up to its smallest term and add the Borel tail.
fn resummed(c: &[f64], q: Complex64, y: f64, kind: LateTerms) -> Complex64 {
    let kmax = (y.floor() as usize).clamp(1, MAX_TERMS);
    let mut acc = Complex64::new(0.0, 0.0);
    let mut qk = Complex64::new(1.0, 0.0);
    for &ck in c.iter().take(kmax) {
        let term = qk * ck;
        acc += term;
        if term.norm() <= 1e-18 * acc.norm() {
            return acc;
        }
        qk *= q;
    }
    let next = qk * c[kmax];
    acc + next * borel_terminant(kmax, y, kind)
}

/// Asymptotic expansions for `|x| ≥ 1` (accurate for `|x| ≳ 5`), exponentially scaled.
pub fn airy_asymptotic_scaled(x: f64) -> Result<ScaledAiry> {
    if x.abs() < 1.0 {
        return Err(Error::Domain(format!(
            "asymptotic Airy expansion needs |x| ≥ 1, got {x}"
        )));
    }
    let (u, v) = asymptotic_coeffs();
    let z = x.abs();
    let zeta = 2.0 / 3.0 * z * z.sqrt();
    let y = 2.0 * zeta;
    let q4 = z.powf(0.25);
    let rpi = PI.sqrt();
    if x > 0.0 {
        let alt = Complex64::new(-1.0 / zeta, 0.0);
        let same = Complex64::new(1.0 / zeta, 0.0);
        let s_ai = resummed(u, alt, y, LateTerms::Alternating).re;
        let s_aip = resummed(v, alt, y, LateTerms::Alternating).re;
        let s_bi = resummed(u, same, y, LateTerms::SameSign).re;
        let s_bip = resummed(v, same, y, LateTerms::SameSign).re;
        Ok(ScaledAiry {
            ai: s_ai / (2.0 * rpi * q4),
            aip: -q4 * s_aip / (2.0 * rpi),
            bi: s_bi / (rpi * q4),
            bip: q4 * s_bip / rpi,
            zeta,
        })
    } else {
        let q = Complex64::new(0.0, -1.0 / zeta);
        let s = resummed(u, q, y, LateTerms::Rotating);
        let vv = resummed(v, q, y, LateTerms::Rotating);
        let phase = Complex64::from_polar(1.0, zeta + FRAC_PI_4);
        let w = Complex64::new(0.0, -1.0) * phase * s / (rpi * q4);
        let wp = -phase * vv * (q4 / rpi);
        Ok(ScaledAiry {
            ai: w.re,
            aip: wp.re,
            bi: -w.im,
            bip: -wp.im,
            zeta: 0.0,
        })
    }
}

/// Asymptotic expansions, unscaled.
pub fn airy_asymptotic(x: f64) -> Result<AiryQuad> {
    unscale(airy_asymptotic_scaled(x)?)
}

fn unscale(s: ScaledAiry) -> Result<AiryQuad> {
    if s.zeta > 700.0 {
        return Err(Error::Range(format!(
            "Bi overflows at ζ = {}; use airy_eval_scaled",
            s.zeta
        )));
    }
    let (d, g) = ((-s.zeta).exp(), s.zeta.exp());
    Ok(AiryQuad {
        ai: s.ai * d,
        aip: s.aip * d,
        bi: s.bi * g,
        bip: s.bip * g,
    })
}

/// Exponentially scaled Airy functions for any real `x`.
pub fn airy_eval_scaled(x: f64) -> Result<ScaledAiry> {
    if !x.is_finite() {
        return Err(Error::Domain(format!("non-finite Airy argument {x}")));
    }
    if x.abs() > X_SWITCH {
        return airy_asymptotic_scaled(x);
    }
    let a = airy_series(x);
    if x > 0.0 {
        let zeta = 2.0 / 3.0 * x * x.sqrt();
        let (g, d) = (zeta.exp(), (-zeta).exp());
        Ok(ScaledAiry {
            ai: a.ai * g,
            aip: a.aip * g,
            bi: a.bi * d,
            bip: a.bip * d,
            zeta,
        })
    } else {
        Ok(ScaledAiry {
            ai: a.ai,
            aip: a.aip,
            bi: a.bi,
            bip: a.bip,
            zeta: 0.0,
        })
    }
}

/// Ai, Ai′, Bi, Bi′ at `x` with `|x| ≤ 200`; positive arguments past
/// `ζ = 700` report a range error (see [`airy_eval_scaled`]).
pub fn airy_eval(x: f64) -> Result<AiryQuad> {
    if !(x.abs() <= MAX_ARG) {
        return Err(Error::Range(format!(
            "|x| = {} exceeds {MAX_ARG}; use airy_eval_scaled",
            x.abs()
        )));
    }
    if x.abs() <= X_SWITCH {
        Ok(airy_series(x))
    } else {
        airy_asymptotic(x)
    }
}

/// `((Ai − iBi)(x), (Ai′ − iBi′)(x))`.
pub fn ai_minus_ibi(x: f64) -> Result<(Complex64, Complex64)> {
    let a = airy_eval(x)?;
    Ok((Complex64::new(a.ai, -a.bi), Complex64::new(a.aip, -a.bip)))
}

/// Modulus and phase of `(Ai − iBi)(−x) = M e^{iθ}` for `x ≥ 1`, with θ on
/// the branch nearest the leading phase `(2/3)x^{3/2} − π/4`.
pub fn airy_osc(x: f64) -> Result<(f64, f64)> {
    if !(x >= 1.0) {
        return Err(Error::Domain(format!("airy_osc needs x ≥ 1, got {x}")));
    }
    let a = airy_eval(-x)?;
    let m = a.ai.hypot(a.bi);
    let raw = (-a.bi).atan2(a.ai);
    let lead = 2.0 / 3.0 * x * x.sqrt() - FRAC_PI_4;
    let turns = ((lead - raw) / (2.0 * PI)).round();
    Ok((m, raw + 2.0 * PI * turns))
}

/// Scale used for relative comparisons: the local envelope of the pair
/// `(value, derivative)` – `√(Ai² + Bi²)` and `√(Ai′² + Bi′²)` on the
/// oscillatory side, the magnitudes themselves elsewhere.
pub fn envelope(a: &AiryQuad, x: f64) -> (f64, f64, f64, f64) {
    if x < 0.0 {
        let m = a.ai.hypot(a.bi);
        let n = a.aip.hypot(a.bip);
        (m, n, m, n)
    } else {
        (a.ai.abs(), a.aip.abs(), a.bi.abs(), a.bip.abs())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rel(a: f64, b: f64) -> f64 {
        (a - b).abs() / b.abs()
    }

    #[test]
    fn closed_forms_at_zero() {
        let a = airy_eval(0.0).unwrap();
        assert!((a.ai - 0.355_028_053_887_817_2).abs() < 1e-16);
        assert!((a.aip + 0.258_819_403_792_806_8).abs() < 1e-16);
        assert!((a.bi - 3f64.sqrt() * a.ai).abs() < 1e-15);
        assert!((a.wronskian() - 1.0 / PI).abs() < 1e-16);
    }

    #[test]
    fn high_precision_values() {
        // 30-digit reference values
        let table: [(f64, [f64; 4]); 6] = [
            (
                -12.0,
                [
                    -0.066555175054373129474,
                    1.0231104533679707299,
                    -0.29571991207807305673,
                    -0.23673219783112331633,
                ],
            ),
            (
                -7.5,
                [
                    0.32177571638064787527,
                    0.31880950669855459621,
                    -0.11246348507649080638,
                    0.87780228154576092237,
                ],
            ),
            (
                -1.0,
                [
                    0.5355608832923521188,
                    -0.010160567116645209395,
                    0.10399738949694461189,
                    0.59237562642279235082,
                ],
            ),
            (
                2.0,
                [
                    0.034924130423274379135,
                    -0.053090384433653631704,
                    3.2980949999782147103,
                    4.1006820499328898894,
                ],
            ),
            (
                7.5,
                [
                    1.9172560675134307516e-7,
                    -5.3127139597205446848e-7,
                    303229.61511253340229,
                    819987.83535879962093,
                ],
            ),
            (
                25.0,
                [
                    8.1160268246913866838e-38,
                    -4.0660893372432810053e-37,
                    3.9220307780413817738e35,
                    1.957073508323330897e36,
                ],
            ),
        ];
        for (x, v) in table {
            let a = airy_eval(x).unwrap();
            let got = [a.ai, a.aip, a.bi, a.bip];
            for j in 0..4 {
                let scale = if x < 0.0 { v[j].abs().max(0.1) } else { v[j].abs() };
                assert!(
                    (got[j] - v[j]).abs() / scale < 1e-12,
                    "x = {x}, j = {j}: {} vs {}",
                    got[j],
                    v[j]
                );
            }
        }
    }

    #[test]
    fn series_and_asymptotics_agree_on_band() {
        for k in 0..=40 {
            let x = OVERLAP_BAND.0 + k as f64 * 0.05;
            for &s in &[-1.0, 1.0] {
                let a = airy_series(s * x);
                let b = airy_asymptotic(s * x).unwrap();
                let (ea, eap, eb, ebp) = envelope(&a, s * x);
                assert!((a.ai - b.ai).abs() / ea < 1e-9, "Ai at {}", s * x);
                assert!((a.aip - b.aip).abs() / eap < 1e-9, "Ai' at {}", s * x);
                assert!((a.bi - b.bi).abs() / eb < 1e-9, "Bi at {}", s * x);
                assert!((a.bip - b.bip).abs() / ebp < 1e-9, "Bi' at {}", s * x);
            }
        }
    }

    #[test]
    fn overflow_is_reported() {
        assert!(matches!(airy_eval(150.0), Err(Error::Range(_))));
        assert!(matches!(airy_eval(250.0), Err(Error::Range(_))));
        let s = airy_eval_scaled(150.0).unwrap();
        assert!(s.ai > 0.0 && s.bi > 0.0 && s.zeta > 1000.0);
    }

    #[test]
    fn osc_examples() {
        let (m, th) = airy_osc(25.0).unwrap();
        let lead_m = 1.0 / (PI.sqrt() * 25f64.powf(0.25));
        assert!(rel(m, lead_m) < 0.02);
        assert!((th - (2.0 / 3.0 * 125.0 - FRAC_PI_4)).abs() < 0.02);
        let (m1, th1) = airy_osc(1.0).unwrap();
        let a = airy_eval(-1.0).unwrap();
        assert!((m1 * th1.cos() - a.ai).abs() < 1e-10);
        assert!((m1 * th1.sin() + a.bi).abs() < 1e-10);
        assert!(airy_osc(0.5).is_err());
    }

    #[test]
    fn terminant_limits() {
        // For y ≫ k the tail factor tends to 1.
        let l = borel_terminant(3, 1e6, LateTerms::Alternating);
        assert!((l.re - 1.0).abs() < 1e-5);
        let r = borel_terminant(3, 1e6, LateTerms::Rotating);
        assert!((r - Complex64::new(1.0, 0.0)).norm() < 1e-5);
    }
}
