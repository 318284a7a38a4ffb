//! Slow-manifold series on either side of the turning point.
//!
//! Hyperbolic side (`μ < 0`): the slope `h = y/x` of the unstable bundle solves
//! `ε h′ = −μ − h²`. Elliptic side (`μ > 0`): with `λ = i√μ`, the
//! diagonalizing function `f` solves `ε f′ = λ(1 − f²) + ε λ⁻¹λ′ f`, and the
//! diagonal entry is `ν = λ f − ε λ⁻¹λ′`.

use num_complex::Complex64;

use super::eps::EpsSeries;
use super::jet::TaylorJet;
use crate::error::{Error, Result};
use crate::problem::ProblemSpec;

type CJet = TaylorJet<Complex64>;

const I: Complex64 = Complex64 { re: 0.0, im: 1.0 };

fn c(v: f64) -> Complex64 {
    Complex64::new(v, 0.0)
}

/// Jets of `h₀ … h_n` at `t`; `h_k` carries `n − k + extra` orders.
pub fn hyp_riccati_jets(p: &ProblemSpec, t: f64, n: usize, extra: usize) -> Result<Vec<TaylorJet<f64>>> {
    let mu = p.mu(t);
    if !(mu < 0.0) {
        return Err(Error::WrongSide(format!(
            "hyperbolic series needs μ(t) < 0; μ({t}) = {mu}"
        )));
    }
    let k = n + extra;
    let h0 = (-&p.mu_jet(t, k)).sqrt()?;
    let two_h0 = h0.scale(2.0);
    let mut h = vec![h0];
    for m in 1..=n {
        let mut acc = h[m - 1].derivative();
        for i in 1..m {
            acc = &acc + &(&h[i] * &h[m - i]);
        }
        h.push((-&acc).div(&two_h0)?);
    }
    Ok(h)
}

/// `[h₀ … h_N]` of the unstable slope at `t < 0`.
pub fn hyp_riccati_coeffs(p: &ProblemSpec, t: f64, n: usize) -> Result<EpsSeries<f64>> {
    let h = hyp_riccati_jets(p, t, n, 0)?;
    Ok(EpsSeries::new(h.iter().map(|j| j.value()).collect()))
}

/// Residual `ε h_N′ + μ + h_N²` of the truncated hyperbolic series.
pub fn hyp_residual(p: &ProblemSpec, t: f64, n: usize, eps: f64) -> Result<f64> {
    let h = hyp_riccati_jets(p, t, n, 1)?;
    let (mut v, mut d, mut e) = (0.0, 0.0, 1.0);
    for j in &h {
        v += j.coeffs[0] * e;
        d += j.coeffs[1] * e;
        e *= eps;
    }
    Ok(eps * d + p.mu(t) + v * v)
}

/// `λ = i√μ` as a jet of order `k`.
pub fn lambda_jet(p: &ProblemSpec, t: f64, k: usize) -> Result<CJet> {
    let mu = p.mu(t);
    if !(mu > 0.0) {
        return Err(Error::WrongSide(format!(
            "elliptic series needs μ(t) > 0; μ({t}) = {mu}"
        )));
    }
    Ok(p.mu_jet(t, k).sqrt()?.to_complex().scale(I))
}

/// Jets of `R₀ … R_n` at `t > 0`; `R_k` carries `n − k + extra` orders.
pub fn ell_riccati_jets(p: &ProblemSpec, t: f64, n: usize, extra: usize) -> Result<Vec<CJet>> {
    let k = n + extra + 1;
    let lam = lambda_jet(p, t, k)?;
    let inv = lam.recip()?;
    let dl = lam.derivative();
    let half_inv = inv.scale(c(0.5));
    let drift = (&(&inv * &inv) * &dl).scale(c(0.5));
    let mut r = vec![TaylorJet::constant(t, c(1.0), k)];
    for m in 1..=n {
        let prev = &r[m - 1];
        let mut acc = &(&drift * prev) - &(&half_inv * &prev.derivative());
        for l in 1..m {
            acc = &acc - &(&r[l] * &r[m - l]).scale(c(0.5));
        }
        r.push(acc);
    }
    Ok(r)
}

/// `[R₀ … R_N]` with `R₀ = 1`.
pub fn ell_riccati_coeffs(p: &ProblemSpec, t: f64, n: usize) -> Result<EpsSeries> {
    let r = ell_riccati_jets(p, t, n, 0)?;
    Ok(EpsSeries::new(r.iter().map(|j| j.value()).collect()))
}

/// Residual `ε f_N′ − λ(1 − f_N²) − ε λ⁻¹λ′ f_N` of the truncated elliptic series.
pub fn ell_residual(p: &ProblemSpec, t: f64, n: usize, eps: f64) -> Result<Complex64> {
    let r = ell_riccati_jets(p, t, n, 1)?;
    let lam = lambda_jet(p, t, 1)?;
    let (l0, l1) = (lam.coeffs[0], lam.coeffs[1]);
    let (mut f, mut df, mut e) = (c(0.0), c(0.0), 1.0);
    for j in &r {
        f += j.coeffs[0] * e;
        df += j.coeffs[1] * e;
        e *= eps;
    }
    Ok(df * eps - l0 * (c(1.0) - f * f) - f * (l1 / l0) * eps)
}

/// Jets of `ν₀ … ν_n`: `ν₀ = λ`, `ν₁ = λR₁ − λ⁻¹λ′`, `ν_k = λR_k` for `k ≥ 2`.
pub fn nu_jets(p: &ProblemSpec, t: f64, n: usize, extra: usize) -> Result<Vec<CJet>> {
    let r = ell_riccati_jets(p, t, n, extra)?;
    let lam = lambda_jet(p, t, n + extra + 1)?;
    let mut nu: Vec<CJet> = r.iter().map(|rk| &lam * rk).collect();
    if n >= 1 {
        let corr = lam.derivative().div(&lam)?;
        nu[1] = &nu[1] - &corr;
    }
    Ok(nu)
}

/// `[ν₀ … ν_N]` at `t > 0`.
pub fn nu_series(p: &ProblemSpec, t: f64, n: usize) -> Result<EpsSeries> {
    let nu = nu_jets(p, t, n, 0)?;
    Ok(EpsSeries::new(nu.iter().map(|j| j.value()).collect()))
}

/// Per-order residuals of `ν_odd = −(ε/2) d/dt log|ν_even|`.
///
/// For odd `m` the entry is `|ν_m + ½ (d/dt)[log g]_{m−1}|` with `g = −iν_even`
/// expanded as a series in ε whose coefficients are jets in t; for even `m`
/// it is `|Re ν_m|`, the odd content that must be absent at that order.
pub fn even_odd_check(p: &ProblemSpec, t: f64, n: usize) -> Result<Vec<f64>> {
    let nu = nu_jets(p, t, n, 2)?;
    let g: Vec<CJet> = (0..=n)
        .map(|k| {
            if k % 2 == 0 {
                nu[k].scale(-I)
            } else {
                TaylorJet::constant(t, c(0.0), nu[k].order())
            }
        })
        .collect();
    let mut l = vec![g[0].ln()?];
    for k in 1..n {
        let mut acc = g[k].clone();
        for j in 1..k {
            acc = &acc - &(&l[j] * &g[k - j]).scale(c(j as f64 / k as f64));
        }
        l.push(acc.div(&g[0])?);
    }
    Ok((0..=n)
        .map(|m| {
            let v = nu[m].value();
            if m % 2 == 0 {
                v.re.abs()
            } else {
                (v + l[m - 1].coeffs[1] * 0.5).norm()
            }
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::problem::catalog;

    #[test]
    fn hyperbolic_examples() {
        let lin = catalog::linear();
        let h = hyp_riccati_coeffs(&lin, -1.0, 2).unwrap();
        assert!((h.coeffs[0] - 1.0).abs() < 1e-15);
        assert!((h.coeffs[1] - 0.25).abs() < 1e-15);
        assert!((h.coeffs[2] + 5.0 / 32.0).abs() < 1e-15);
        let lin4 = ProblemSpec::from_mu(vec![0.0, 1.0], 5.0).unwrap();
        let h = hyp_riccati_coeffs(&lin4, -4.0, 1).unwrap();
        assert!((h.coeffs[0] - 2.0).abs() < 1e-15 && (h.coeffs[1] - 1.0 / 16.0).abs() < 1e-15);
        assert!(matches!(hyp_riccati_coeffs(&lin, 0.5, 2), Err(Error::WrongSide(_))));
    }

    #[test]
    fn elliptic_examples() {
        let lin = ProblemSpec::from_mu(vec![0.0, 1.0], 5.0).unwrap();
        let r = ell_riccati_coeffs(&lin, 1.0, 3).unwrap();
        assert_eq!(r.coeffs[0], c(1.0));
        assert!((r.coeffs[1] - Complex64::new(0.0, -0.25)).norm() < 1e-15);
        let r4 = ell_riccati_coeffs(&lin, 4.0, 1).unwrap();
        assert!((r4.coeffs[1] - Complex64::new(0.0, -1.0 / 32.0)).norm() < 1e-15);
        assert!(matches!(ell_riccati_coeffs(&lin, -1.0, 1), Err(Error::WrongSide(_))));
    }

    #[test]
    fn nu_examples() {
        let lin = ProblemSpec::from_mu(vec![0.0, 1.0], 5.0).unwrap();
        let nu = nu_series(&lin, 1.0, 2).unwrap();
        assert!((nu.coeffs[0] - I).norm() < 1e-15);
        assert!((nu.coeffs[1] - c(-0.25)).norm() < 1e-15);
        let nu4 = nu_series(&lin, 4.0, 1).unwrap();
        assert!((nu4.coeffs[1] - c(-1.0 / 16.0)).norm() < 1e-15);
        assert!((nu4.coeffs[0] - Complex64::new(0.0, 2.0)).norm() < 1e-15);
    }

    #[test]
    fn even_odd_identity_holds() {
        let lin = ProblemSpec::from_mu(vec![0.0, 1.0], 5.0).unwrap();
        let r = even_odd_check(&lin, 1.0, 1).unwrap();
        assert_eq!(r[0], 0.0);
        assert!(r[1] < 1e-15);
        let q = ProblemSpec::from_mu(vec![0.0, 1.0, 0.5], 1.5).unwrap();
        let r = even_odd_check(&q, 1.0, 5).unwrap();
        assert!(r.iter().all(|&v| v <= 1e-12), "{r:?}");
    }
}
