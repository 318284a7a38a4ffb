//! Dense real polynomials with ascending coefficients.

use serde::{Deserialize, Serialize};

/// `coeffs[k]` multiplies `t^k`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Poly {
    coeffs: Vec<f64>,
}

impl Poly {
    pub fn new(mut coeffs: Vec<f64>) -> Self {
        while coeffs.len() > 1 && *coeffs.last().unwrap() == 0.0 {
            coeffs.pop();
        }
        if coeffs.is_empty() {
            coeffs.push(0.0);
        }
        Poly { coeffs }
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|&c| c == 0.0)
    }

    pub fn eval(&self, t: f64) -> f64 {
        self.coeffs.iter().rev().fold(0.0, |acc, &c| acc * t + c)
    }

    pub fn derivative(&self) -> Poly {
        if self.coeffs.len() == 1 {
            return Poly::new(vec![0.0]);
        }
        Poly::new(
            self.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(k, &c)| k as f64 * c)
                .collect(),
        )
    }

    /// Coefficients of `q(x) = p(t + x)`, i.e. `p^{(j)}(t)/j!`, computed by
    /// repeated synthetic division.
    pub fn shifted_coeffs(&self, t: f64) -> Vec<f64> {
        let mut c = self.coeffs.clone();
        let n = c.len();
        for k in 0..n {
            for j in (k..n - 1).rev() {
                c[j] += t * c[j + 1];
            }
        }
        c
    }

    /// `q(x) = p(t + x)`.
    pub fn shift(&self, t: f64) -> Poly {
        Poly::new(self.shifted_coeffs(t))
    }

    /// Taylor coefficients at `t` up to order `k` (zero-padded past the degree).
    pub fn taylor(&self, t: f64, k: usize) -> Vec<f64> {
        let mut c = self.shifted_coeffs(t);
        c.resize(k + 1, 0.0);
        c
    }

    /// `q(s) = p(α s)`.
    pub fn scale_arg(&self, alpha: f64) -> Poly {
        let mut f = 1.0;
        Poly::new(
            self.coeffs
                .iter()
                .map(|&c| {
                    let v = c * f;
                    f *= alpha;
                    v
                })
                .collect(),
        )
    }

    pub fn scale(&self, k: f64) -> Poly {
        Poly::new(self.coeffs.iter().map(|&c| c * k).collect())
    }

    pub fn add(&self, other: &Poly) -> Poly {
        let n = self.coeffs.len().max(other.coeffs.len());
        Poly::new(
            (0..n)
                .map(|k| self.coeffs.get(k).unwrap_or(&0.0) + other.coeffs.get(k).unwrap_or(&0.0))
                .collect(),
        )
    }

    pub fn sub(&self, other: &Poly) -> Poly {
        self.add(&other.scale(-1.0))
    }

    /// Drop the constant term and lower every power by one: `(p(t) − p(0))/t`.
    pub fn div_t(&self) -> Poly {
        if self.coeffs.len() == 1 {
            return Poly::new(vec![0.0]);
        }
        Poly::new(self.coeffs[1..].to_vec())
    }

    /// Cauchy bound: every real root lies in `[−R, R]`.
    pub fn cauchy_bound(&self) -> f64 {
        let lead = *self.coeffs.last().unwrap();
        1.0 + self.coeffs[..self.coeffs.len() - 1]
            .iter()
            .map(|c| (c / lead).abs())
            .fold(0.0, f64::max)
    }

    fn trimmed(mut c: Vec<f64>) -> Vec<f64> {
        let scale = c.iter().map(|v| v.abs()).fold(0.0, f64::max);
        while c.len() > 1 && c.last().unwrap().abs() <= 1e-12 * scale {
            c.pop();
        }
        c
    }

    fn rem(a: &[f64], b: &[f64]) -> Vec<f64> {
        let mut r = a.to_vec();
        let db = b.len() - 1;
        let lead = b[db];
        while r.len() > db && r.len() > 0 {
            let k = r.len() - 1;
            let q = r[k] / lead;
            for j in 0..=db {
                r[k - db + j] -= q * b[j];
            }
            r.pop();
        }
        if r.is_empty() {
            r.push(0.0);
        }
        r
    }

    fn sturm_chain(&self) -> Vec<Vec<f64>> {
        let mut chain = vec![Self::trimmed(self.coeffs.clone())];
        let d = Self::trimmed(self.derivative().coeffs);
        if d.iter().all(|&c| c == 0.0) {
            return chain;
        }
        chain.push(d);
        loop {
            let n = chain.len();
            let r = Self::trimmed(Self::rem(&chain[n - 2], &chain[n - 1]));
            let scale = chain[n - 2].iter().map(|v| v.abs()).fold(0.0, f64::max);
            if r.len() == 1 && r[0].abs() <= 1e-12 * scale {
                break;
            }
            chain.push(r.iter().map(|v| -v).collect());
            if chain.last().unwrap().len() == 1 {
                break;
            }
        }
        chain
    }

    fn sign_changes(chain: &[Vec<f64>], t: f64) -> usize {
        let mut last = 0.0f64;
        let mut count = 0;
        for p in chain {
            let v = p.iter().rev().fold(0.0, |acc, &c| acc * t + c);
            if v != 0.0 {
                if last != 0.0 && (v > 0.0) != (last > 0.0) {
                    count += 1;
                }
                last = v;
            }
        }
        count
    }

    /// Number of distinct real roots in `(a, b]` (Sturm's theorem).
    pub fn count_roots(&self, a: f64, b: f64) -> usize {
        if self.degree() == 0 {
            return 0;
        }
        let chain = self.sturm_chain();
        Self::sign_changes(&chain, a).saturating_sub(Self::sign_changes(&chain, b))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn taylor_matches_hand_values() {
        let p = Poly::new(vec![0.0, 1.0, 0.5]);
        assert_eq!(p.taylor(1.0, 1), vec![1.5, 2.0]);
        assert_eq!(p.taylor(0.0, 2), vec![0.0, 1.0, 0.5]);
        assert_eq!(p.taylor(0.0, 4), vec![0.0, 1.0, 0.5, 0.0, 0.0]);
    }

    #[test]
    fn sturm_counts_roots() {
        // (t − 1)(t + 2)(t − 3)
        let p = Poly::new(vec![6.0, -5.0, -2.0, 1.0]);
        assert_eq!(p.count_roots(-10.0, 10.0), 3);
        assert_eq!(p.count_roots(0.0, 2.0), 1);
        assert_eq!(p.count_roots(1.5, 2.5), 0);
        assert_eq!(Poly::new(vec![1.0, 0.0, 1.0]).count_roots(-5.0, 5.0), 0);
    }

    #[test]
    fn scale_and_shift_round_trip() {
        let p = Poly::new(vec![0.3, -1.0, 2.0, 0.25]);
        let q = p.shift(0.7).shift(-0.7);
        for (a, b) in p.coeffs().iter().zip(q.coeffs()) {
            assert!((a - b).abs() < 1e-14);
        }
        let s = p.scale_arg(2.0);
        assert!((s.eval(0.5) - p.eval(1.0)).abs() < 1e-15);
    }
}
