//! Eigenvalues of `ε² x″ = (V(t) − E) x` in a single well: Bohr–Sommerfeld
//! quantization and a two-sided shooting reference.

use std::f64::consts::PI;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::par;
use crate::poly::Poly;
use crate::problem::{action_poly, turning_points};
use crate::reference::{Integrator, IntegratorConfig, LogScaledState};
use crate::solve::bracketed_root;

/// Minimum decay exponent `ε⁻¹∫√(V − E)` between a shooting start and its turning point.
pub const START_DECAY: f64 = 25.0;

#[derive(Debug, Clone, Copy, Serialize)]
pub struct EigenResult {
    pub n: usize,
    pub e_bs: f64,
    pub e_ref: f64,
    pub gap: f64,
    pub eps: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct BsSpectrum {
    pub energies: Vec<f64>,
    /// Set when some `E_n` with `n ≤ n_max` exceeded the energy cap.
    pub truncated: bool,
}

/// Location and value of the well bottom.
pub fn well_minimum(v: &Poly) -> Result<(f64, f64)> {
    let c = v.coeffs();
    let deg = v.degree();
    if deg < 2 || deg % 2 == 1 || !(c[deg] > 0.0) {
        return Err(Error::DegenerateWell(
            "V must have even degree and a positive leading coefficient".into(),
        ));
    }
    let dv = v.derivative();
    let r = dv.cauchy_bound() + 1.0;
    if dv.count_roots(-r, r) != 1 {
        return Err(Error::DegenerateWell("V′ must have exactly one real root".into()));
    }
    let t = bracketed_root(|t| dv.eval(t), -r, r, 1e-16)?;
    Ok((t, v.eval(t)))
}

/// `A(E) = ∫_{t₋}^{t₊} √(E − V)`.
pub fn action(v: &Poly, energy: f64) -> Result<f64> {
    let (a, b) = turning_points(v, energy)?;
    action_poly(&v.sub(&Poly::new(vec![energy])), a, b)
}

/// Solve `ε⁻¹A(E) = π(n + ½)` for `n = 0 … n_max`, stopping at the first `E_n > e_max`.
pub fn bs_energies(v: &Poly, eps: f64, n_max: usize, e_max: Option<f64>) -> Result<BsSpectrum> {
    if !(eps > 0.0) {
        return Err(Error::Domain(format!("ε = {eps} must be positive")));
    }
    let (_, vmin) = well_minimum(v)?;
    let cap = e_max.unwrap_or(f64::INFINITY);
    let ns: Vec<usize> = (0..=n_max).collect();
    let solved = par::map(&ns, |&n| -> Result<Option<f64>> {
        let target = PI * eps * (n as f64 + 0.5);
        let f = |e: f64| action(v, e).map(|a| a - target);
        let lo = vmin;
        let mut step = 2.0 * eps * (n as f64 + 1.0);
        let mut hi = vmin + step;
        while f(hi)? < 0.0 {
            if hi > cap {
                return Ok(None);
            }
            step *= 2.0;
            hi = vmin + step;
        }
        let mut frac = 0.1;
        let lo = loop {
            let e = lo + frac * (hi - lo);
            if matches!(f(e), Ok(val) if val < 0.0) {
                break e;
            }
            frac *= 0.1;
            if frac < 1e-9 {
                return Err(Error::RootFinding(format!("no lower bracket for n = {n}")));
            }
        };
        let e = bracketed_root(|e| f(e).unwrap_or(f64::NAN), lo, hi, 1e-15)?;
        Ok((e <= cap).then_some(e))
    });
    let mut energies = Vec::new();
    let mut truncated = false;
    for r in solved {
        match r? {
            Some(e) if !truncated => energies.push(e),
            _ => truncated = true,
        }
    }
    if energies.windows(2).any(|w| !(w[1] > w[0])) {
        return Err(Error::RootFinding("Bohr–Sommerfeld energies are not increasing".into()));
    }
    Ok(BsSpectrum { energies, truncated })
}

/// Result of shooting at one energy.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct Shot {
    pub energy: f64,
    /// `x̂_L ŷ_R − ŷ_L x̂_R` at the well bottom.
    pub mismatch: f64,
    /// Zeros of `x` on the left and right runs.
    pub zeros: usize,
}

/// Start points for the two decaying solutions, at least `2·max(ε^{2/3}, 0.05)`
/// beyond the turning points and deep enough that the decay exponent reaches
/// [`START_DECAY`].
pub fn shooting_starts(v: &Poly, eps: f64, energy: f64) -> Result<(f64, f64)> {
    let (tm, tp) = turning_points(v, energy)?;
    let w = v.sub(&Poly::new(vec![energy]));
    let base = 2.0 * eps.powf(2.0 / 3.0).max(0.05);
    let mut out = [0.0; 2];
    for (k, (tp_, dir)) in [(tm, -1.0), (tp, 1.0)].into_iter().enumerate() {
        let mut d = base;
        while action_poly(&w, tp_, tp_ + dir * d)?.abs() / eps < START_DECAY {
            d *= 1.5;
            if d > 1e6 {
                return Err(Error::Eigen {
                    n: 0,
                    reason: "no sufficiently deep shooting start".into(),
                });
            }
        }
        out[k] = tp_ + dir * d;
    }
    Ok((out[0], out[1]))
}

fn floor_pi(a: f64) -> i64 {
    (a / PI).floor() as i64
}

/// Shoot from fixed starts at energy `E` and match at `t_mid`.
pub fn shoot(v: &Poly, eps: f64, energy: f64, starts: (f64, f64), t_mid: f64, tol: f64) -> Result<Shot> {
    let q = |t: f64| energy - v.eval(t);
    let dv = v.derivative();
    let slope = |t: f64, sign: f64| {
        let g = v.eval(t) - energy;
        sign * g.sqrt() - eps * dv.eval(t) / (4.0 * g)
    };
    let run = |t0: f64, sign: f64| -> Result<(LogScaledState, i64)> {
        let mut it = Integrator::new(q, eps, IntegratorConfig::new(tol))?;
        let s0 = LogScaledState::from_xy(t0, eps, 1.0, slope(t0, sign))?;
        let th0 = s0.xh.atan2(s0.yh);
        let s = it.advance(s0, t_mid)?;
        let th1 = th0 + it.prufer_change();
        Ok((s, (floor_pi(th1) - floor_pi(th0)).abs()))
    };
    let (l, zl) = run(starts.0, 1.0)?;
    let (r, zr) = run(starts.1, -1.0)?;
    Ok(Shot {
        energy,
        mismatch: l.xh * r.yh - l.yh * r.xh,
        zeros: (zl + zr) as usize,
    })
}

/// Matching point: the well bottom shifted by a fixed irrational fraction of the
/// classically allowed half-width, so that nodes of symmetric eigenfunctions
/// never fall on it.
pub fn match_point(v: &Poly, t_min: f64, energy: f64) -> Result<f64> {
    let (tm, tp) = turning_points(v, energy)?;
    Ok(t_min + MATCH_SHIFT * 0.5 * (tp - tm))
}

/// Fractional shift of the matching point.
pub const MATCH_SHIFT: f64 = 0.1234;

fn refine_one(v: &Poly, eps: f64, n: usize, guess: f64, tol: f64) -> Result<f64> {
    let (t_min, vmin) = well_minimum(v)?;
    for widen in [1.0, 2.0, 4.0] {
        let lo = (guess - widen * eps).max(vmin + 1e-12 * eps);
        let hi = guess + widen * eps;
        let starts = shooting_starts(v, eps, hi)?;
        let t_mid = match_point(v, t_min, guess)?;
        let d = |e: f64| shoot(v, eps, e, starts, t_mid, tol);
        let pieces = if widen == 1.0 { 1 } else { 16 };
        let mut candidates = Vec::new();
        let grid: Vec<f64> = (0..=pieces)
            .map(|k| lo + (hi - lo) * k as f64 / pieces as f64)
            .collect();
        let vals = grid
            .iter()
            .map(|&e| d(e).map(|s| s.mismatch))
            .collect::<Result<Vec<_>>>()?;
        for k in 0..pieces {
            if vals[k] == 0.0 {
                candidates.push(grid[k]);
            } else if vals[k] * vals[k + 1] < 0.0 {
                candidates.push(bracketed_root(
                    |e| d(e).map(|s| s.mismatch).unwrap_or(f64::NAN),
                    grid[k],
                    grid[k + 1],
                    1e-15,
                )?);
            }
        }
        for e in candidates {
            if d(e)?.zeros == n {
                return Ok(e);
            }
        }
    }
    Err(Error::Eigen {
        n,
        reason: format!("no mismatch root with {n} oscillations near {guess}"),
    })
}

/// Shooting eigenvalues `E₀ … E_{n_max}`, bracketed by the Bohr–Sommerfeld values.
pub fn reference_energies(v: &Poly, eps: f64, n_max: usize, tol: f64) -> Result<Vec<f64>> {
    let bs = bs_energies(v, eps, n_max, None)?;
    let ns: Vec<usize> = (0..bs.energies.len()).collect();
    let out = par::map(&ns, |&n| refine_one(v, eps, n, bs.energies[n], tol))
        .into_iter()
        .collect::<Result<Vec<_>>>()?;
    if out.windows(2).any(|w| !(w[1] > w[0])) {
        return Err(Error::Eigen {
            n: 0,
            reason: "reference energies are not increasing".into(),
        });
    }
    Ok(out)
}

/// Both spectra side by side.
pub fn eigen_table(v: &Poly, eps: f64, n_max: usize, tol: f64) -> Result<Vec<EigenResult>> {
    let bs = bs_energies(v, eps, n_max, None)?.energies;
    let re = reference_energies(v, eps, n_max, tol)?;
    Ok(bs
        .iter()
        .zip(&re)
        .enumerate()
        .map(|(n, (&b, &r))| EigenResult {
            n,
            e_bs: b,
            e_ref: r,
            gap: (b - r).abs(),
            eps,
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::problem::catalog;

    #[test]
    fn harmonic_bs_is_exact() {
        let v = catalog::harmonic_well();
        let s = bs_energies(&v, 0.01, 5, None).unwrap();
        for (n, e) in s.energies.iter().enumerate() {
            let want = 0.01 * (2 * n + 1) as f64;
            assert!((e - want).abs() <= 1e-10 * want, "{n}: {e}");
        }
        let s = bs_energies(&v, 0.5, 0, None).unwrap();
        assert!((s.energies[0] - 0.5).abs() < 1e-10);
    }

    #[test]
    fn truncation_flag() {
        let s = bs_energies(&catalog::harmonic_well(), 0.1, 10, Some(0.55)).unwrap();
        assert!(s.truncated);
        assert_eq!(s.energies.len(), 3);
    }

    #[test]
    fn harmonic_reference() {
        let v = catalog::harmonic_well();
        let e = reference_energies(&v, 0.05, 3, 1e-12).unwrap();
        assert!((e[3] - 0.35).abs() < 1e-8, "{}", e[3]);
    }

    #[test]
    fn degenerate_wells_rejected() {
        assert!(well_minimum(&Poly::new(vec![0.0, 0.0, 0.0, 1.0])).is_err());
        assert!(well_minimum(&Poly::new(vec![0.0, 0.0, -1.0, 0.0, 1.0])).is_err());
    }
}
