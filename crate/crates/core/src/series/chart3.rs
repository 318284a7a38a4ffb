//! The entry of the oscillatory chart: `B₀`, the `R_m(s)` family and the
//! double series in `(s, ε₃)` with `s = r₃²`.
//!
//! The chart equation for the diagonalizing function is
//! `(3/2)ε₃² f_{ε₃} − s ε₃ f_s = λ₃(s)(f² − 1) − ε₃ g(s) f`,
//! with `λ₃ = i√μ̂` and `g = ½(1 + 2sλ₃⁻¹λ₃′)`.

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

/// Coefficients `b₀ … b_L` of the formal solution of
/// `(3/2)ε²B₀′ = i(B₀² − 1) − ½εB₀`, `B₀(0) = 1`.
pub fn b0_coeffs(l: usize) -> EpsSeries {
    let mut b = vec![c(1.0)];
    for m in 1..=l {
        let w = 1.5 * (m as f64 - 1.0) + 0.5;
        let mut v = -I * 0.5 * w * b[m - 1];
        for j in 1..m {
            v -= b[j] * b[m - j] * 0.5;
        }
        b.push(v);
    }
    EpsSeries::new(b)
}

fn check_chart(p: &ProblemSpec, s: f64) -> Result<()> {
    if !p.is_normalized() {
        return Err(Error::InvalidProblem(
            "the chart-3 series needs μ′(0) = 1; normalize first".into(),
        ));
    }
    if s < 0.0 || !(p.mu_hat(s) > 0.0) {
        return Err(Error::Domain(format!(
            "chart-3 series needs s ≥ 0 with μ̂(s) > 0, got s = {s}"
        )));
    }
    Ok(())
}

/// `λ₃(s) = i√μ̂(s)` as a jet of order `k`.
pub fn lambda3_jet(p: &ProblemSpec, s: f64, k: usize) -> Result<CJet> {
    Ok(p.mu_hat_jet(s, k).sqrt()?.to_complex().scale(I))
}

/// `g(s) = ½ + s λ₃′/λ₃` as a jet of order `k`.
pub fn g3_jet(p: &ProblemSpec, s: f64, k: usize) -> Result<CJet> {
    let lam = lambda3_jet(p, s, k + 1)?;
    let ratio = lam.derivative().div(&lam.truncate(k))?;
    let sv = TaylorJet::variable(s, k);
    Ok((&sv * &ratio).add_scalar(c(0.5)))
}

/// Jets in `s` of `R₀ … R_{m}` at base `s`, each with at least `order` coefficients
/// beyond the constant, from
/// `R_m = −½Σ′R_lR_{m−l} + (2λ₃)⁻¹[(3/2)(m−1)R_{m−1} − sR′_{m−1} + gR_{m−1}]`.
pub fn chart3_r_jets(p: &ProblemSpec, s: f64, m: usize, order: usize) -> Result<Vec<CJet>> {
    check_chart(p, s)?;
    let k = m + order;
    let lam = lambda3_jet(p, s, k)?;
    let g = g3_jet(p, s, k)?;
    let inv2 = lam.recip()?.scale(c(0.5));
    let sv = TaylorJet::variable(s, k);
    let mut r = vec![TaylorJet::constant(s, c(1.0), k)];
    for n in 1..=m {
        let prev = &r[n - 1];
        let lin = &(&prev.scale(c(1.5 * (n as f64 - 1.0))) - &(&sv * &prev.derivative())) + &(&g * prev);
        let mut acc = &inv2 * &lin;
        for l in 1..n {
            acc = &acc - &(&r[l] * &r[n - l]).scale(c(0.5));
        }
        r.push(acc);
    }
    Ok(r)
}

/// Coefficients `c[l][m]` of `s^l ε₃^m` (`l < L`, `m ≤ K`) by matching the chart
/// equation order by order: `c₀₀ = 1`, `c_{l0} = 0` for `l ≥ 1`, and for `m ≥ 1`
/// `2λ₀c_{lm} = ((3/2)(m−1) − l)c_{l,m−1} + Σ_j g_j c_{l−j,m−1}
///            − Σ_{j≥1} λ_j [F²]_{l−j,m} − λ₀([F²]_{lm} − 2c_{lm})`.
pub fn chart3_double_coeffs(p: &ProblemSpec, l_max: usize, k_max: usize) -> Result<Vec<Vec<Complex64>>> {
    check_chart(p, 0.0)?;
    let lam = lambda3_jet(p, 0.0, l_max)?.coeffs;
    let g = g3_jet(p, 0.0, l_max)?.coeffs;
    let mut cm = vec![vec![c(0.0); k_max + 1]; l_max + 1];
    cm[0][0] = c(1.0);
    // sq[l][m] = [F²]_{l,m}
    let mut sq = vec![vec![c(0.0); k_max + 1]; l_max + 1];
    sq[0][0] = c(1.0);
    let square_entry = |cm: &Vec<Vec<Complex64>>, l: usize, m: usize| {
        let mut acc = c(0.0);
        for a in 0..=l {
            for b in 0..=m {
                acc += cm[a][b] * cm[l - a][m - b];
            }
        }
        acc
    };
    for m in 1..=k_max {
        for l in 0..=l_max {
            let mut rhs = cm[l][m - 1] * (1.5 * (m as f64 - 1.0) - l as f64);
            for j in 0..=l {
                rhs += g[j] * cm[l - j][m - 1];
            }
            for j in 1..=l {
                rhs -= lam[j] * sq[l - j][m];
            }
            // [F²]_{lm} without the two c_{lm}·c₀₀ terms; c_{lm} is still zero here.
            let rest = square_entry(&cm, l, m);
            rhs -= lam[0] * rest;
            cm[l][m] = rhs / (lam[0] * 2.0);
            sq[l][m] = square_entry(&cm, l, m);
        }
    }
    Ok(cm)
}

/// The quasi-solution `f(s, ε₃) = Σ_{l<L} B_l s^l + Σ_{m<M} (R_m(s) − Σ_{j<L} c_{jm}s^j) ε₃^m`
/// at a fixed `s = r²`.
#[derive(Debug, Clone)]
pub struct Chart3Series {
    pub s: f64,
    pub l: usize,
    pub m: usize,
    /// `c[l][m]` for `l < L`, `m ≤ K`; row `l` holds the coefficients of `B_l`.
    pub c: Vec<Vec<Complex64>>,
    /// Jets of `R₀ … R_{M−1}` at `s`.
    pub r: Vec<CJet>,
    lambda: Complex64,
    g: Complex64,
}

/// Default cap on the ε₃-order of the `B_l`.
pub const B_ORDER_CAP: usize = 20;

/// Build the double series at `r` with truncation orders `L`, `M` (`B_l` to order 20).
pub fn chart3_f_series(p: &ProblemSpec, r: f64, l: usize, m: usize) -> Result<Chart3Series> {
    chart3_f_series_capped(p, r, l, m, B_ORDER_CAP)
}

pub fn chart3_f_series_capped(p: &ProblemSpec, r: f64, l: usize, m: usize, k_cap: usize) -> Result<Chart3Series> {
    if l < 1 || m < 1 {
        return Err(Error::Domain("chart-3 truncation orders must be at least 1".into()));
    }
    let s = r * r;
    check_chart(p, s)?;
    let cm = chart3_double_coeffs(p, l - 1, k_cap.max(m))?;
    let rj = chart3_r_jets(p, s, m - 1, 1)?;
    let lambda = lambda3_jet(p, s, 0)?.value();
    let g = g3_jet(p, s, 0)?.value();
    Ok(Chart3Series {
        s,
        l,
        m,
        c: cm,
        r: rj,
        lambda,
        g,
    })
}

impl Chart3Series {
    /// `B_l(ε₃)` summed to the cap.
    pub fn b(&self, l: usize, eps3: f64) -> Complex64 {
        self.c[l].iter().rev().fold(c(0.0), |acc, &v| acc * eps3 + v)
    }

    fn b_deriv(&self, l: usize, eps3: f64) -> Complex64 {
        let row = &self.c[l];
        let mut acc = c(0.0);
        for k in (1..row.len()).rev() {
            acc = acc * eps3 + row[k] * k as f64;
        }
        acc
    }

    /// `(f, f_{ε₃}, f_s)` at `ε₃`.
    pub fn eval(&self, eps3: f64) -> (Complex64, Complex64, Complex64) {
        let s = self.s;
        let (mut f, mut fe, mut fs) = (c(0.0), c(0.0), c(0.0));
        let mut sl = 1.0;
        for l in 0..self.l {
            f += self.b(l, eps3) * sl;
            fe += self.b_deriv(l, eps3) * sl;
            if l >= 1 {
                fs += self.b(l, eps3) * (l as f64 * s.powi(l as i32 - 1));
            }
            sl *= s;
        }
        let mut em = 1.0;
        for m in 0..self.m {
            let mut poly = c(0.0);
            let mut dpoly = c(0.0);
            let mut sj = 1.0;
            for j in 0..self.l {
                poly += self.c[j][m] * sj;
                if j >= 1 {
                    dpoly += self.c[j][m] * (j as f64 * s.powi(j as i32 - 1));
                }
                sj *= s;
            }
            let val = self.r[m].coeffs[0] - poly;
            let dval = self.r[m].coeffs[1] - dpoly;
            f += val * em;
            fs += dval * em;
            if m >= 1 {
                fe += val * (m as f64 * eps3.powi(m as i32 - 1));
            }
            em *= eps3;
        }
        (f, fe, fs)
    }

    pub fn value(&self, eps3: f64) -> Complex64 {
        self.eval(eps3).0
    }

    pub fn d_eps3(&self, eps3: f64) -> Complex64 {
        self.eval(eps3).1
    }

    /// Residual of the chart equation at `(s, ε₃)`.
    pub fn residual(&self, eps3: f64) -> Complex64 {
        let (f, fe, fs) = self.eval(eps3);
        fe * (1.5 * eps3 * eps3) - fs * (self.s * eps3) - self.lambda * (f * f - 1.0) + f * (self.g * eps3)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::problem::catalog;

    #[test]
    fn b0_examples() {
        let b = b0_coeffs(4);
        assert_eq!(b.coeffs[0], c(1.0));
        assert!((b.coeffs[1] - Complex64::new(0.0, -0.25)).norm() < 1e-16);
        assert!((b.coeffs[2] - c(-7.0 / 32.0)).norm() < 1e-16);
        assert!((b.coeffs[3] - Complex64::new(0.0, 21.0 / 64.0)).norm() < 1e-15);
    }

    #[test]
    fn r_jets_at_origin_match_double_coefficients() {
        let q = catalog::quadratic();
        let cm = chart3_double_coeffs(&q, 5, 6).unwrap();
        let r = chart3_r_jets(&q, 0.0, 6, 6).unwrap();
        for m in 0..=6 {
            for l in 0..=5 {
                assert!((r[m].coeffs[l] - cm[l][m]).norm() < 1e-12, "l = {l}, m = {m}");
            }
        }
        let b = b0_coeffs(6);
        for m in 0..=6 {
            assert!((cm[0][m] - b.coeffs[m]).norm() < 1e-13);
        }
    }

    #[test]
    fn boundary_values() {
        let q = catalog::quadratic();
        for &r in &[0.0, 0.2, 0.5] {
            let f = chart3_f_series(&q, r, 4, 4).unwrap();
            assert!((f.value(0.0) - c(1.0)).norm() < 1e-14);
            let lam = lambda3_jet(&q, r * r, 1).unwrap();
            let expect = (c(1.0) + lam.coeffs[1] / lam.coeffs[0] * (2.0 * r * r)) / (lam.coeffs[0] * 4.0);
            assert!((f.d_eps3(0.0) - expect).norm() < 1e-14);
        }
        let f0 = chart3_f_series(&q, 0.0, 4, 4).unwrap();
        assert!((f0.d_eps3(0.0) - Complex64::new(0.0, -0.25)).norm() < 1e-15);
    }
}
