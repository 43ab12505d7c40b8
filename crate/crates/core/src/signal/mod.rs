//! Lock-in spectrum synthesis, multi-Lorentzian fitting and rank statistics.

pub mod fit;
pub mod lorentzian;
pub mod stats;

pub use fit::{fit_lorentzians, FitResult};
pub use lorentzian::{linear_grid, synthesize_spectrum, wrap_phase, LorentzianComponent, Spectrum};
pub use stats::{asymptotic_linear_fit, average_ranks, spearman};
