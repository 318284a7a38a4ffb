use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use turnpoint::problem::catalog;
use turnpoint::reference::{rate_fit, riccati_reference};
use turnpoint::series::chart3::{chart3_double_coeffs, chart3_r_jets};
use turnpoint::series::{b0_coeffs, chart3_f_series, ell_riccati_coeffs, hyp_riccati_coeffs};

type Q = BigRational;

fn q(n: i64, d: i64) -> Q {
    Q::new(n.into(), d.into())
}

/// Airy asymptotic coefficients `u_k = (2k+1)(2k+3)…(6k−1) / (216^k k!)`.
fn airy_u(k: usize) -> Q {
    let mut u = Q::one();
    for j in 0..2 * k {
        u *= q(2 * k as i64 + 1 + 2 * j as i64, 1);
    }
    for j in 1..=k {
        u /= q(216 * j as i64, 1);
    }
    u
}

/// `B₀ = Σ (−i)^m β_m ε^m` from `Ai(−z) − iBi(−z)`: with `ζ = 2/(3ε)`,
/// `B₀ = i√z F/F′ = U(ζ)/V(ζ)`, `U = Σ(−i)^k u_k ζ^{−k}`, `V = Σ(−i)^k v_k ζ^{−k}`,
/// `v_k = −(6k+1)/(6k−1) u_k`. The `(−i)^k` factors ride along, so the
/// division is carried out on real rationals.
fn beta_from_airy(order: usize) -> Vec<Q> {
    let scale = |k: usize| -> Q {
        let mut s = Q::one();
        for _ in 0..k {
            s *= q(3, 2);
        }
        s
    };
    let u: Vec<Q> = (0..=order).map(|k| airy_u(k) * scale(k)).collect();
    let v: Vec<Q> = (0..=order)
        .map(|k| {
            let k6 = 6 * k as i64;
            -airy_u(k) * q(k6 + 1, k6 - 1) * scale(k)
        })
        .collect();
    let mut beta: Vec<Q> = Vec::with_capacity(order + 1);
    for m in 0..=order {
        let mut acc = u[m].clone();
        for j in 1..=m {
            acc -= &v[j] * &beta[m - j];
        }
        beta.push(acc / &v[0]);
    }
    beta
}

#[test]
fn b0_matches_airy_asymptotic_coefficients() {
    let beta = beta_from_airy(16);
    assert!(beta[0].is_one());
    assert_eq!(beta[1], q(1, 4));
    assert_eq!(beta[2], q(7, 32));
    assert_eq!(beta[3], q(21, 64));
    let b = b0_coeffs(16);
    let mut rot = num_complex::Complex64::new(1.0, 0.0);
    for (m, bm) in beta.iter().enumerate() {
        assert!(!bm.is_zero());
        let want = rot * bm.to_f64().unwrap();
        assert!((b.coeffs[m] - want).norm() <= 1e-14 * want.norm(), "m = {m}");
        rot *= num_complex::Complex64::new(0.0, -1.0);
    }
}

#[test]
fn double_series_row_zero_is_b0() {
    let p = catalog::quadratic();
    let c = chart3_double_coeffs(&p, 2, 10).unwrap();
    let b = b0_coeffs(10);
    for m in 0..=10 {
        assert!((c[0][m] - b.coeffs[m]).norm() <= 1e-13 * b.coeffs[m].norm().max(1.0));
    }
}

#[test]
fn chart3_and_elliptic_series_agree_under_chart_change() {
    let p = catalog::quadratic();
    for t in [0.05, 0.2, 0.45] {
        let ell = ell_riccati_coeffs(&p, t, 4).unwrap();
        let r = chart3_r_jets(&p, t, 4, 0).unwrap();
        for m in 0..=4 {
            let scaled = ell.coeffs[m] * t.powf(1.5 * m as f64);
            assert!(
                (r[m].value() - scaled).norm() <= 1e-12 * scaled.norm().max(1e-3),
                "t = {t}, m = {m}"
            );
        }
        let d = chart3_f_series(&p, t.sqrt(), 1, 3).unwrap().d_eps3(0.0);
        let r1 = ell.coeffs[1] * t.powf(1.5);
        assert!((d - r1).norm() <= 1e-12 * r1.norm());
    }
}

#[test]
fn hyperbolic_series_matches_riccati_reference_to_next_order() {
    let p = catalog::quadratic();
    let eps = [0.02, 0.01, 0.005, 0.0025];
    for n in 1..=2 {
        let pairs: Vec<(f64, f64)> = eps
            .iter()
            .map(|&e| {
                let h = hyp_riccati_coeffs(&p, -0.3, n).unwrap().eval(e);
                (e, (h - riccati_reference(&p, e, -0.3).unwrap()).abs())
            })
            .collect();
        let fit = rate_fit(&pairs).unwrap();
        assert!(fit.slope >= n as f64 + 0.8, "N = {n}: slope {}", fit.slope);
    }
}
