//! Optimal truncation of the divergent `B₀` series, optionally completed by
//! the Borel terminant of the first omitted term.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::eps::EpsSeries;
use crate::airy::{borel_terminant, LateTerms};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Truncation {
    /// Stop before the smallest term.
    Plain,
    /// Stop before the smallest term and add its terminant.
    Terminant,
}

/// Index `N ∈ [1, cap]` minimizing `|b_m| ε₃^m`.
pub fn optimal_index(b: &EpsSeries, eps3: f64, cap: usize) -> usize {
    let cap = cap.min(b.order()).max(1);
    let mut best = (1, f64::INFINITY);
    let mut e = 1.0;
    for m in 1..=cap {
        e *= eps3;
        let v = b.coeffs[m].norm() * e;
        if v < best.1 {
            best = (m, v);
        }
    }
    best.0
}

/// `B₀(ε₃)` from its coefficients. The late terms behave like `Γ(m)(−i/y)^m`
/// with `y = 4/(3ε₃)`, which fixes the terminant kind.
pub fn b0_sum(b: &EpsSeries, eps3: f64, cap: usize, trunc: Truncation) -> Complex64 {
    let n = optimal_index(b, eps3, cap);
    let mut acc = Complex64::new(0.0, 0.0);
    let mut e = 1.0;
    for m in 0..n {
        acc += b.coeffs[m] * e;
        e *= eps3;
    }
    if trunc == Truncation::Terminant {
        acc += b.coeffs[n] * e * borel_terminant(n, 4.0 / (3.0 * eps3), LateTerms::Rotating);
    }
    acc
}

/// `I(ε₃) = i Σ_{m≥2} b_m ε₃^{m−1}/(m−1)`, the exponent integral of `A₁`,
/// truncated consistently with [`b0_sum`].
pub fn b0_exponent_integral(b: &EpsSeries, eps3: f64, cap: usize, trunc: Truncation) -> Complex64 {
    let n = optimal_index(b, eps3, cap);
    let i = Complex64::new(0.0, 1.0);
    let mut acc = Complex64::new(0.0, 0.0);
    let mut e = eps3;
    for m in 2..n {
        acc += b.coeffs[m] * e / (m - 1) as f64;
        e *= eps3;
    }
    if trunc == Truncation::Terminant && n >= 2 {
        let k = n - 1;
        acc += b.coeffs[n] * e / k as f64 * borel_terminant(k, 4.0 / (3.0 * eps3), LateTerms::Rotating);
    }
    acc * i
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::series::chart3::b0_coeffs;

    #[test]
    fn optimal_index_moves_out_as_eps_shrinks() {
        let b = b0_coeffs(40);
        let n1 = optimal_index(&b, 0.3, 40);
        let n2 = optimal_index(&b, 0.05, 40);
        assert!(n2 > n1, "{n1} {n2}");
        assert!(n2 <= 40);
    }

    #[test]
    fn terminant_changes_little_at_small_eps() {
        let b = b0_coeffs(40);
        let a = b0_sum(&b, 0.05, 40, Truncation::Plain);
        let t = b0_sum(&b, 0.05, 40, Truncation::Terminant);
        assert!((a - t).norm() < 1e-8);
    }
}
