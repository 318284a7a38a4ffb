//! Jet arithmetic and the formal-series recursions.

pub mod chart3;
pub mod eps;
pub mod gevrey;
pub mod jet;
pub mod riccati;
pub mod truncation;

pub use chart3::{b0_coeffs, chart3_f_series, Chart3Series};
pub use eps::EpsSeries;
pub use gevrey::{gevrey_fit, GevreyFit};
pub use jet::{jet_sqrt, TaylorJet};
pub use riccati::{ell_riccati_coeffs, even_odd_check, hyp_riccati_coeffs, nu_series};
pub use truncation::Truncation;
