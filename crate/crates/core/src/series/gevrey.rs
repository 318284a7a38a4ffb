//! Coefficient growth diagnostic: `|c_m| ≈ a·b^m·m!`.

use serde::Serialize;

use super::eps::EpsSeries;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, Serialize)]
pub struct GevreyFit {
    pub a: f64,
    pub b: f64,
    /// RMS residual of the log-linear fit.
    pub residual: f64,
    /// Number of nonzero coefficients used.
    pub used: usize,
}

fn ln_factorial(m: usize) -> f64 {
    (2..=m).map(|k| (k as f64).ln()).sum()
}

/// Least-squares fit of `ln(|c_m|/m!) ≈ ln a + m ln b` over the nonzero coefficients.
pub fn gevrey_fit<T: super::jet::Scalar>(series: &EpsSeries<T>) -> Result<GevreyFit> {
    if series.coeffs.len() < 8 {
        return Err(Error::Fit(format!(
            "need at least 8 coefficients, got {}",
            series.coeffs.len()
        )));
    }
    let pts: Vec<(f64, f64)> = series
        .coeffs
        .iter()
        .enumerate()
        .filter_map(|(m, c)| {
            let v = c.abs_s();
            (v > 0.0 && v.is_finite()).then(|| (m as f64, v.ln() - ln_factorial(m)))
        })
        .collect();
    if pts.len() < 3 {
        return Err(Error::Fit("fewer than 3 nonzero coefficients".into()));
    }
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let slope = sxy / sxx;
    let icpt = my - slope * mx;
    let rss: f64 = pts.iter().map(|p| (p.1 - icpt - slope * p.0).powi(2)).sum();
    Ok(GevreyFit {
        a: icpt.exp(),
        b: slope.exp(),
        residual: (rss / n).sqrt(),
        used: pts.len(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::series::chart3::b0_coeffs;

    fn factorials(scale: f64) -> EpsSeries<f64> {
        let mut c = vec![1.0];
        for m in 1..15 {
            c.push(c[m - 1] * m as f64 * scale);
        }
        EpsSeries::new(c)
    }

    #[test]
    fn exact_gevrey_series() {
        let f = gevrey_fit(&factorials(1.0)).unwrap();
        assert!((f.a - 1.0).abs() < 1e-10 && (f.b - 1.0).abs() < 1e-10);
        let f = gevrey_fit(&factorials(2.0)).unwrap();
        assert!((f.b - 2.0).abs() < 1e-10);
    }

    #[test]
    fn b0_is_gevrey_one() {
        let f = gevrey_fit(&b0_coeffs(20)).unwrap();
        assert!(f.a.is_finite() && f.b.is_finite());
        assert!(f.residual < 1.0, "{f:?}");
        assert!((f.b - 0.75).abs() < 0.25, "{f:?}");
    }

    #[test]
    fn too_short() {
        assert!(gevrey_fit(&EpsSeries::new(vec![1.0; 5])).is_err());
    }
}
