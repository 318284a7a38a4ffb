//! Truncated Taylor jets: `coeffs[j] = f^{(j)}(t*)/j!`.

use std::fmt::Debug;
use std::ops::{Add, Div, Mul, Neg, Sub};

use num_complex::Complex64;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Scalar field for jet coefficients (real or complex).
pub trait Scalar:
    Copy
    + Debug
    + PartialEq
    + Zero
    + One
    + From<f64>
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Neg<Output = Self>
    + Send
    + Sync
{
    fn sqrt_s(self) -> Self;
    fn ln_s(self) -> Self;
    fn powf_s(self, a: f64) -> Self;
    fn abs_s(self) -> f64;
}

impl Scalar for f64 {
    fn sqrt_s(self) -> Self {
        self.sqrt()
    }
    fn ln_s(self) -> Self {
        self.ln()
    }
    fn powf_s(self, a: f64) -> Self {
        self.powf(a)
    }
    fn abs_s(self) -> f64 {
        self.abs()
    }
}

impl Scalar for Complex64 {
    fn sqrt_s(self) -> Self {
        self.sqrt()
    }
    fn ln_s(self) -> Self {
        self.ln()
    }
    fn powf_s(self, a: f64) -> Self {
        self.powf(a)
    }
    fn abs_s(self) -> f64 {
        self.norm()
    }
}

/// A truncated Taylor expansion at `base`; the truncation order is `coeffs.len() − 1`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TaylorJet<T = f64> {
    pub base: f64,
    pub coeffs: Vec<T>,
}

impl<T: Scalar> TaylorJet<T> {
    pub fn new(base: f64, coeffs: Vec<T>) -> Self {
        assert!(!coeffs.is_empty(), "a jet needs at least one coefficient");
        TaylorJet { base, coeffs }
    }

    pub fn constant(base: f64, value: T, order: usize) -> Self {
        let mut coeffs = vec![T::zero(); order + 1];
        coeffs[0] = value;
        TaylorJet { base, coeffs }
    }

    /// The identity function `t` expanded at `base`.
    pub fn variable(base: f64, order: usize) -> Self {
        let mut j = Self::constant(base, T::from(base), order);
        if order >= 1 {
            j.coeffs[1] = T::one();
        }
        j
    }

    pub fn order(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn value(&self) -> T {
        self.coeffs[0]
    }

    /// `f^{(k)}(t*)`.
    pub fn derivative_value(&self, k: usize) -> T {
        let mut fact = 1.0;
        for j in 2..=k {
            fact *= j as f64;
        }
        self.coeffs.get(k).copied().unwrap_or_else(T::zero) * T::from(fact)
    }

    pub fn truncate(&self, order: usize) -> Self {
        let n = (order + 1).min(self.coeffs.len());
        TaylorJet::new(self.base, self.coeffs[..n].to_vec())
    }

    fn paired(&self, other: &Self) -> usize {
        debug_assert!(
            (self.base - other.base).abs() <= 1e-14 * (1.0 + self.base.abs()),
            "jets at different base points"
        );
        self.order().min(other.order())
    }

    pub fn scale(&self, k: T) -> Self {
        TaylorJet::new(self.base, self.coeffs.iter().map(|&c| c * k).collect())
    }

    pub fn add_scalar(&self, k: T) -> Self {
        let mut j = self.clone();
        j.coeffs[0] = j.coeffs[0] + k;
        j
    }

    /// Evaluate the truncated polynomial at `t`.
    pub fn eval(&self, t: f64) -> T {
        let h = T::from(t - self.base);
        self.coeffs.iter().rev().fold(T::zero(), |acc, &c| acc * h + c)
    }

    /// Term-by-term derivative; the order drops by one (an order-0 jet yields
    /// an order-0 zero jet, as nothing is known about the derivative).
    pub fn derivative(&self) -> Self {
        if self.coeffs.len() == 1 {
            return TaylorJet::constant(self.base, T::zero(), 0);
        }
        TaylorJet::new(
            self.base,
            self.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(k, &c)| c * T::from(k as f64))
                .collect(),
        )
    }

    pub fn recip(&self) -> Result<Self> {
        let one = TaylorJet::constant(self.base, T::one(), self.order());
        one.div(self)
    }

    pub fn div(&self, other: &Self) -> Result<Self> {
        let n = self.paired(other);
        let b0 = other.coeffs[0];
        if b0.abs_s() == 0.0 {
            return Err(Error::Domain("jet division by a jet with zero constant term".into()));
        }
        let mut q = vec![T::zero(); n + 1];
        for k in 0..=n {
            let mut acc = self.coeffs[k];
            for j in 0..k {
                acc = acc - q[j] * other.coeffs[k - j];
            }
            q[k] = acc / b0;
        }
        Ok(TaylorJet::new(self.base, q))
    }

    /// Square root via the convolution recurrence; the constant term must be nonzero.
    pub fn sqrt(&self) -> Result<Self> {
        let f0 = self.coeffs[0];
        if f0.abs_s() == 0.0 {
            return Err(Error::Domain("square root of a jet with zero constant term".into()));
        }
        let n = self.order();
        let mut g = vec![T::zero(); n + 1];
        g[0] = f0.sqrt_s();
        let two_g0 = g[0] + g[0];
        for k in 1..=n {
            let mut acc = self.coeffs[k];
            for j in 1..k {
                acc = acc - g[j] * g[k - j];
            }
            g[k] = acc / two_g0;
        }
        Ok(TaylorJet::new(self.base, g))
    }

    /// `f^α` via `f g′ = α f′ g`.
    pub fn powf(&self, alpha: f64) -> Result<Self> {
        let f0 = self.coeffs[0];
        if f0.abs_s() == 0.0 {
            return Err(Error::Domain("power of a jet with zero constant term".into()));
        }
        let n = self.order();
        let mut g = vec![T::zero(); n + 1];
        g[0] = f0.powf_s(alpha);
        for k in 1..=n {
            let mut acc = T::zero();
            for j in 1..=k {
                let w = alpha * j as f64 - (k - j) as f64;
                acc = acc + self.coeffs[j] * g[k - j] * T::from(w);
            }
            g[k] = acc / (f0 * T::from(k as f64));
        }
        Ok(TaylorJet::new(self.base, g))
    }

    /// Natural logarithm via `f g′ = f′`.
    pub fn ln(&self) -> Result<Self> {
        let f0 = self.coeffs[0];
        if f0.abs_s() == 0.0 {
            return Err(Error::Domain("logarithm of a jet with zero constant term".into()));
        }
        let n = self.order();
        let mut g = vec![T::zero(); n + 1];
        g[0] = f0.ln_s();
        for k in 1..=n {
            let mut acc = self.coeffs[k];
            for j in 1..k {
                acc = acc - g[j] * self.coeffs[k - j] * T::from(j as f64 / k as f64);
            }
            g[k] = acc / f0;
        }
        Ok(TaylorJet::new(self.base, g))
    }
}

impl TaylorJet<f64> {
    pub fn to_complex(&self) -> TaylorJet<Complex64> {
        TaylorJet::new(self.base, self.coeffs.iter().map(|&c| Complex64::new(c, 0.0)).collect())
    }
}

impl<T: Scalar> Add for &TaylorJet<T> {
    type Output = TaylorJet<T>;
    fn add(self, other: &TaylorJet<T>) -> TaylorJet<T> {
        let n = self.paired(other);
        TaylorJet::new(self.base, (0..=n).map(|k| self.coeffs[k] + other.coeffs[k]).collect())
    }
}

impl<T: Scalar> Sub for &TaylorJet<T> {
    type Output = TaylorJet<T>;
    fn sub(self, other: &TaylorJet<T>) -> TaylorJet<T> {
        let n = self.paired(other);
        TaylorJet::new(self.base, (0..=n).map(|k| self.coeffs[k] - other.coeffs[k]).collect())
    }
}

impl<T: Scalar> Mul for &TaylorJet<T> {
    type Output = TaylorJet<T>;
    fn mul(self, other: &TaylorJet<T>) -> TaylorJet<T> {
        let n = self.paired(other);
        let mut out = vec![T::zero(); n + 1];
        for i in 0..=n {
            for j in 0..=(n - i) {
                out[i + j] = out[i + j] + self.coeffs[i] * other.coeffs[j];
            }
        }
        TaylorJet::new(self.base, out)
    }
}

impl<T: Scalar> Neg for &TaylorJet<T> {
    type Output = TaylorJet<T>;
    fn neg(self) -> TaylorJet<T> {
        TaylorJet::new(self.base, self.coeffs.iter().map(|&c| -c).collect())
    }
}

/// Square root of a real jet with positive constant term.
pub fn jet_sqrt(j: &TaylorJet<f64>) -> Result<TaylorJet<f64>> {
    if !(j.coeffs[0] > 0.0) {
        return Err(Error::Domain(format!(
            "jet_sqrt needs a positive constant term, got {}",
            j.coeffs[0]
        )));
    }
    j.sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: &[f64], b: &[f64], tol: f64) -> bool {
        a.len() == b.len() && a.iter().zip(b).all(|(x, y)| (x - y).abs() <= tol)
    }

    #[test]
    fn sqrt_examples() {
        let j = TaylorJet::new(0.0, vec![1.0, 1.0, 0.0]);
        assert!(close(&jet_sqrt(&j).unwrap().coeffs, &[1.0, 0.5, -0.125], 1e-15));
        let c = TaylorJet::new(0.0, vec![4.0, 0.0]);
        assert!(close(&jet_sqrt(&c).unwrap().coeffs, &[2.0, 0.0], 0.0));
        // −μ for μ = t at t = −1
        let m = TaylorJet::new(-1.0, vec![1.0, -1.0]);
        assert!(close(&jet_sqrt(&m).unwrap().coeffs, &[1.0, -0.5], 1e-15));
        assert!(jet_sqrt(&TaylorJet::new(0.0, vec![-1.0, 0.0])).is_err());
        assert!(jet_sqrt(&TaylorJet::new(0.0, vec![0.0, 1.0])).is_err());
    }

    #[test]
    fn ring_ops_exact_on_polynomials() {
        let a = TaylorJet::new(0.5, vec![1.0, 2.0, 3.0, 0.0]);
        let b = TaylorJet::new(0.5, vec![2.0, -1.0, 0.0, 0.0]);
        let p = &a * &b;
        assert!(close(&p.coeffs, &[2.0, 3.0, 4.0, -3.0], 1e-15));
        let q = p.div(&b).unwrap();
        assert!(close(&q.coeffs, &a.coeffs, 1e-14));
        let d = a.derivative();
        assert!(close(&d.coeffs, &[2.0, 6.0, 0.0], 0.0));
    }

    #[test]
    fn powf_and_ln_are_consistent() {
        let a = TaylorJet::new(0.0, vec![2.0, 0.3, -0.1, 0.05, 0.01]);
        let l = a.ln().unwrap();
        let p = a.powf(0.75).unwrap();
        let lp = p.ln().unwrap();
        for k in 0..5 {
            assert!((lp.coeffs[k] - 0.75 * l.coeffs[k]).abs() < 1e-14);
        }
        let s = a.sqrt().unwrap();
        let h = a.powf(0.5).unwrap();
        assert!(close(&s.coeffs, &h.coeffs, 1e-15));
    }
}
