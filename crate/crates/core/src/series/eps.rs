//! Formal power series in the small parameter at a fixed evaluation point.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::jet::Scalar;

/// `Σ coeffs[m] ε^m`, truncated at `order = coeffs.len() − 1`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EpsSeries<T = Complex64> {
    pub coeffs: Vec<T>,
}

impl<T: Scalar> EpsSeries<T> {
    pub fn new(coeffs: Vec<T>) -> Self {
        EpsSeries { coeffs }
    }

    pub fn order(&self) -> usize {
        self.coeffs.len().saturating_sub(1)
    }

    pub fn get(&self, m: usize) -> T {
        self.coeffs.get(m).copied().unwrap_or_else(T::zero)
    }

    /// Horner evaluation of the full truncation.
    pub fn eval(&self, eps: f64) -> T {
        self.eval_to(eps, self.order())
    }

    /// Horner evaluation of `Σ_{m ≤ n} c_m ε^m`.
    pub fn eval_to(&self, eps: f64, n: usize) -> T {
        let e = T::from(eps);
        self.coeffs[..=n.min(self.order())]
            .iter()
            .rev()
            .fold(T::zero(), |acc, &c| acc * e + c)
    }
}

impl EpsSeries<f64> {
    pub fn to_complex(&self) -> EpsSeries<Complex64> {
        EpsSeries::new(self.coeffs.iter().map(|&c| Complex64::new(c, 0.0)).collect())
    }
}
