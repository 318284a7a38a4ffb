//! Uniform asymptotics for `ε²x″ + μ(t)x = 0` across a simple turning point.
//!
//! The crate is organised bottom-up:
//!
//! * [`problem`] holds the coefficient polynomial μ, wells `(V, E)`, turning
//!   points and action integrals.
//! * [`airy`] evaluates Ai, Bi and their derivatives on the real line.
//! * [`series`] carries the jet arithmetic and every formal recursion in ε.
//! * [`hyperbolic`] and [`elliptic`] treat the two sides away from `t = 0`.
//! * [`blowup`] implements the three directional charts around the turning point.
//! * [`approximant`] glues the charts into the uniform three-interval solution.
//! * [`reference`] is the independent high-accuracy integrator used as ground truth.
//! * [`eigen`] computes Bohr–Sommerfeld and shooting eigenvalues for a well.
//! * [`validation`] runs the acceptance checks shared by the CLI and the test suite.
//!
//! With the default `parallel` feature, sweeps over ε, n or sample grids run on
//! rayon; without it the same code paths run sequentially.

pub mod airy;
pub mod approximant;
pub mod blowup;
pub mod eigen;
pub mod elliptic;
pub mod error;
pub mod hyperbolic;
pub mod par;
pub mod poly;
pub mod problem;
pub mod quad;
pub mod reference;
pub mod series;
pub mod solve;
pub mod validation;

pub use error::{Error, Result};
pub use num_complex::Complex64;
