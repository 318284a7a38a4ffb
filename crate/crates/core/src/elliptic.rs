//! The oscillatory side `t > 0`: quasi-diagonalization and Liouville–Green propagation.
//!
//! With `λ = i√μ` and the truncated `f_N`, the real state is
//! `x = 2 Re(f_N u)`, `y = 2 Re(λ u)`; the conjugate amplitude `v = ū` is implicit.

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::problem::ProblemSpec;
use crate::quad;
use crate::series::riccati::{ell_riccati_coeffs, nu_jets};

type C = Complex64;

/// `[[f_N, f̄_N], [λ, −λ]]` and its inverse at one point.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct Diagonalizer {
    pub t: f64,
    pub eps: f64,
    pub f: C,
    pub lambda: C,
    pub matrix: [[C; 2]; 2],
    pub inverse: [[C; 2]; 2],
}

pub fn diagonalize(p: &ProblemSpec, t: f64, eps: f64, n: usize) -> Result<Diagonalizer> {
    let mu = p.mu(t);
    if !(mu > 0.0) {
        return Err(Error::WrongSide(format!(
            "diagonalization needs μ(t) > 0; μ({t}) = {mu}"
        )));
    }
    let f = ell_riccati_coeffs(p, t, n.max(1))?.eval_to(eps, n);
    let lambda = C::new(0.0, mu.sqrt());
    let matrix = [[f, f.conj()], [lambda, -lambda]];
    let det = -lambda * (f + f.conj());
    if det.norm() == 0.0 {
        return Err(Error::Domain(format!("singular diagonalizer at t = {t}, ε = {eps}")));
    }
    let inverse = [[-lambda / det, -f.conj() / det], [-lambda / det, f / det]];
    Ok(Diagonalizer {
        t,
        eps,
        f,
        lambda,
        matrix,
        inverse,
    })
}

impl Diagonalizer {
    /// Amplitude `u` of a real state.
    pub fn to_u(&self, x: f64, y: f64) -> C {
        self.inverse[0][0] * x + self.inverse[0][1] * y
    }

    pub fn to_xy(&self, u: C) -> (f64, f64) {
        (2.0 * (self.f * u).re, 2.0 * (self.lambda * u).re)
    }
}

/// Complex amplitude at `t`, with the truncation order used for `f_N`.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct OscState {
    pub t: f64,
    pub eps: f64,
    pub n: usize,
    pub u: C,
}

impl OscState {
    pub fn from_xy(p: &ProblemSpec, t: f64, eps: f64, n: usize, x: f64, y: f64) -> Result<Self> {
        let d = diagonalize(p, t, eps, n)?;
        Ok(OscState {
            t,
            eps,
            n,
            u: d.to_u(x, y),
        })
    }

    pub fn xy(&self, p: &ProblemSpec) -> Result<(f64, f64)> {
        Ok(diagonalize(p, self.t, self.eps, self.n)?.to_xy(self.u))
    }

    /// `v`, which stays equal to `ū` for real data.
    pub fn v(&self) -> C {
        self.u.conj()
    }
}

/// `ε⁻¹∫_{t₀}^{t} ν_N(s, ε) ds`: `∫ν₀ = i·action`, `∫ν₁ = −¼ ln(μ(t)/μ(t₀))`, and the
/// higher orders by quadrature.
pub fn lg_exponent(p: &ProblemSpec, t0: f64, t: f64, eps: f64, n: usize) -> Result<C> {
    let mut acc = C::new(0.0, p.action(t0, t)? / eps);
    if n >= 1 {
        acc += -0.25 * (p.mu(t) / p.mu(t0)).ln();
    }
    if n >= 2 && t != t0 {
        let bad = std::cell::Cell::new(false);
        let (hi, _) = quad::integrate_complex(
            |s| match nu_jets(p, s, n, 0) {
                Ok(nu) => {
                    let mut e = eps;
                    let mut v = C::new(0.0, 0.0);
                    for k in 2..=n {
                        v += nu[k].value() * e;
                        e *= eps;
                    }
                    v
                }
                Err(_) => {
                    bad.set(true);
                    C::new(0.0, 0.0)
                }
            },
            t0,
            t,
            1e-13,
        );
        if bad.get() {
            return Err(Error::WrongSide("μ ≤ 0 inside the propagation interval".into()));
        }
        acc += hi;
    }
    Ok(acc)
}

/// Propagate along the diagonal, dropping the residual off-diagonal coupling.
pub fn lg_propagate(p: &ProblemSpec, state0: OscState, t: f64) -> Result<OscState> {
    let (lo, hi) = (state0.t.min(t), state0.t.max(t));
    if !(lo > 0.0) || p.mu(lo) <= 0.0 {
        return Err(Error::TurningRegion(format!(
            "the interval [{lo}, {hi}] touches the turning point; use the blowup charts"
        )));
    }
    if hi > p.nu0() * (1.0 + 1e-12) {
        return Err(Error::Window(format!("t = {hi} exceeds ν₀ = {}", p.nu0())));
    }
    if p.mu_poly().count_roots(lo, hi) > 0 {
        return Err(Error::WrongSide(format!("μ vanishes inside [{lo}, {hi}]")));
    }
    let expo = lg_exponent(p, state0.t, t, state0.eps, state0.n)?;
    Ok(OscState {
        t,
        u: state0.u * expo.exp(),
        ..state0
    })
}

/// `√μ x² + y²/√μ`, conserved by the propagator up to `1 + O(ε)`.
pub fn adiabatic_invariant(p: &ProblemSpec, t: f64, x: f64, y: f64) -> f64 {
    let s = p.mu(t).sqrt();
    s * x * x + y * y / s
}

#[cfg(test)]
mod tests {
    use super::*;

    fn lin() -> ProblemSpec {
        ProblemSpec::from_mu(vec![0.0, 1.0], 5.0).unwrap()
    }

    #[test]
    fn diagonalizer_examples() {
        let p = lin();
        let d = diagonalize(&p, 1.0, 0.0, 3).unwrap();
        assert_eq!(d.matrix[0], [C::new(1.0, 0.0), C::new(1.0, 0.0)]);
        assert_eq!(d.matrix[1], [C::new(0.0, 1.0), C::new(0.0, -1.0)]);
        let d = diagonalize(&p, 1.0, 0.1, 1).unwrap();
        assert!((d.f - C::new(1.0, -0.025)).norm() < 1e-15);
        let m = d.matrix;
        let v = d.inverse;
        for i in 0..2 {
            for j in 0..2 {
                let e = m[i][0] * v[0][j] + m[i][1] * v[1][j];
                let id = if i == j { 1.0 } else { 0.0 };
                assert!((e - id).norm() < 1e-13);
            }
        }
    }

    #[test]
    fn identity_and_rotation() {
        let p = lin();
        let s = OscState::from_xy(&p, 1.0, 0.01, 1, 0.3, -0.2).unwrap();
        let s2 = lg_propagate(&p, s, 1.0).unwrap();
        let (x, y) = s2.xy(&p).unwrap();
        assert!((x - 0.3).abs() < 1e-14 && (y + 0.2).abs() < 1e-14);

        let one = ProblemSpec::surrogate(vec![1.0], 10.0);
        let eps = 0.1;
        let s = OscState::from_xy(&one, 1.0, eps, 2, 1.0, 0.0).unwrap();
        let (x, y) = lg_propagate(&one, s, 3.0).unwrap().xy(&one).unwrap();
        let ang = 2.0 / eps;
        assert!((x - ang.cos()).abs() < 1e-12 && (y + ang.sin()).abs() < 1e-12);
    }

    #[test]
    fn amplitude_and_phase() {
        let p = lin();
        let e = lg_exponent(&p, 1.0, 4.0, 0.01, 1).unwrap();
        assert!((e.im - 100.0 * 2.0 / 3.0 * 7.0).abs() < 1e-9);
        assert!((e.re.exp() - 0.25f64.powf(0.25)).abs() < 1e-15);
    }

    #[test]
    fn turning_region_rejected() {
        let p = lin();
        let s = OscState::from_xy(&p, 1.0, 0.01, 1, 1.0, 0.0).unwrap();
        assert!(matches!(lg_propagate(&p, s, 0.0), Err(Error::TurningRegion(_))));
    }
}
