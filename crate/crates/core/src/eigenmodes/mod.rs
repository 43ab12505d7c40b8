//! Diffusion eigenmodes of spherical (Robin wall) and rectangular (Dirichlet wall) cells.

pub mod bessel;
pub mod boxcell;
pub mod catalog;
pub mod cell;
pub mod harmonics;
pub mod mode;
pub mod quadrature;
pub mod sphere;

pub use bessel::{spherical_jn, spherical_jn_derivative, BesselOrder};
pub use boxcell::solve_box_modes;
pub use catalog::{overlap_integral, solve_mode, CellIntegrator, ModeCatalog, ModeRow, SampledMode};
pub use cell::{robin_wall_factor, Cell};
pub use mode::{Mode, ModeIndex};
pub use quadrature::{QuadratureOrder, VolumeRule};
pub use sphere::{robin_roots, solve_sphere_roots, RobinRoot};
