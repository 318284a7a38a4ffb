//! Bracketed scalar root finding (Brent's method from the `roots` crate).

use roots::{find_root_brent, Convergency};

use crate::error::{Error, Result};

struct XTol {
    tol: f64,
    max_iter: usize,
}

impl Convergency<f64> for XTol {
    fn is_root_found(&mut self, y: f64) -> bool {
        y == 0.0
    }
    fn is_converged(&mut self, x1: f64, x2: f64) -> bool {
        let m = x1.abs().max(x2.abs());
        (x1 - x2).abs() <= (self.tol * (1.0 + m)).max(4.0 * f64::EPSILON * m)
    }
    fn is_iteration_limit_reached(&mut self, iter: usize) -> bool {
        iter >= self.max_iter
    }
}

/// Root of `f` in `[a, b]` given a sign change, to relative tolerance `xtol`.
pub fn bracketed_root<F: FnMut(f64) -> f64>(f: F, a: f64, b: f64, xtol: f64) -> Result<f64> {
    let mut conv = XTol {
        tol: xtol,
        max_iter: 400,
    };
    find_root_brent(a, b, f, &mut conv).map_err(|e| Error::RootFinding(format!("{e:?} on [{a}, {b}]")))
}
