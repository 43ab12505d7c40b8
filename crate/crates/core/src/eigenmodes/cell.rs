use crate::error::{domain, Result};

use super::quadrature::{QuadratureOrder, VolumeRule};

/// Cell geometry. Lengths in metres, positions relative to the cell centre.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Cell {
    /// Spherical cell with a Robin wall: mean free path `mean_free_path` and
    /// dimensionless wall parameter `wall_n`.
    Sphere { radius: f64, mean_free_path: f64, wall_n: f64 },
    /// Rectangular cell with Dirichlet walls.
    Box { edges: [f64; 3] },
}

impl Cell {
    pub fn sphere(radius: f64, mean_free_path: f64, wall_n: f64) -> Result<Self> {
        if !(radius > 0.0) || !radius.is_finite() {
            return Err(domain(format!("cell radius must be > 0, got {radius}")));
        }
        if !(mean_free_path >= 0.0) {
            return Err(domain(format!("mean free path must be >= 0, got {mean_free_path}")));
        }
        if !(wall_n > 0.0) {
            return Err(domain(format!("wall parameter N must be > 0, got {wall_n}")));
        }
        Ok(Cell::Sphere { radius, mean_free_path, wall_n })
    }

    pub fn cuboid(lx: f64, ly: f64, lz: f64) -> Result<Self> {
        for l in [lx, ly, lz] {
            if !(l > 0.0) || !l.is_finite() {
                return Err(domain(format!("box edges must be > 0, got {l}")));
            }
        }
        Ok(Cell::Box { edges: [lx, ly, lz] })
    }

    /// Radius of a sphere, half the smallest edge of a box.
    pub fn characteristic_length(&self) -> f64 {
        match *self {
            Cell::Sphere { radius, .. } => radius,
            Cell::Box { edges } => 0.5 * edges.iter().cloned().fold(f64::INFINITY, f64::min),
        }
    }

    /// Half extent along z.
    pub fn half_height(&self) -> f64 {
        match *self {
            Cell::Sphere { radius, .. } => radius,
            Cell::Box { edges } => 0.5 * edges[2],
        }
    }

    pub fn volume(&self) -> f64 {
        match *self {
            Cell::Sphere { radius, .. } => 4.0 / 3.0 * std::f64::consts::PI * radius.powi(3),
            Cell::Box { edges } => edges.iter().product(),
        }
    }

    pub fn contains(&self, p: [f64; 3]) -> bool {
        let tol = 1e-12 * self.characteristic_length();
        match *self {
            Cell::Sphere { radius, .. } => (p[0] * p[0] + p[1] * p[1] + p[2] * p[2]).sqrt() <= radius + tol,
            Cell::Box { edges } => (0..3).all(|i| p[i].abs() <= 0.5 * edges[i] + tol),
        }
    }

    /// Same cell with the radius replaced (sphere only; boxes are returned unchanged).
    pub fn with_radius(&self, r: f64) -> Result<Self> {
        match *self {
            Cell::Sphere { mean_free_path, wall_n, .. } => Cell::sphere(r, mean_free_path, wall_n),
            b => Ok(b),
        }
    }

    /// Right-hand side of the Robin condition at wavenumber `k`.
    pub fn robin_wall_factor(&self, k: f64) -> Result<f64> {
        match *self {
            Cell::Sphere { mean_free_path, wall_n, .. } => robin_wall_factor(wall_n, mean_free_path, k),
            Cell::Box { .. } => Err(domain("box cells have Dirichlet walls, no Robin factor")),
        }
    }

    /// Dimensionless wall parameter c with RHS = c * kR.
    pub fn robin_parameter(&self) -> Result<f64> {
        match *self {
            Cell::Sphere { radius, .. } => Ok(self.robin_wall_factor(1.0)? / radius),
            Cell::Box { .. } => Ok(0.0),
        }
    }

    pub fn volume_rule(&self, order: QuadratureOrder) -> Result<VolumeRule> {
        match *self {
            Cell::Sphere { radius, .. } => VolumeRule::ball(radius, order),
            Cell::Box { edges } => VolumeRule::cuboid(edges, order),
        }
    }

    /// Rule over the part of the cell with z in [z_lo, z_hi].
    pub fn slab_rule(&self, z_lo: f64, z_hi: f64, order: QuadratureOrder) -> Result<VolumeRule> {
        match *self {
            Cell::Sphere { radius, .. } => VolumeRule::ball_slab(radius, z_lo, z_hi, order),
            Cell::Box { edges } => VolumeRule::cuboid_slab(edges, z_lo, z_hi, order),
        }
    }
}

/// (2/3) (1 + e^(-1/N)) / (1 - e^(-1/N)) * lambda * k.
pub fn robin_wall_factor(wall_n: f64, mean_free_path: f64, k: f64) -> Result<f64> {
    if !(wall_n > 0.0) {
        return Err(domain(format!("wall parameter N must be > 0, got {wall_n}")));
    }
    let e = (-1.0 / wall_n).exp();
    let den = -(-1.0 / wall_n).exp_m1();
    Ok(2.0 / 3.0 * (1.0 + e) / den * mean_free_path * k)
}
