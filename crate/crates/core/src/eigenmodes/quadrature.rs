//! Gauss-Legendre rules and volume quadratures over the cell.

use std::f64::consts::PI;

use crate::error::{Error, Result};

/// Smallest order accepted along any axis.
pub const MIN_ORDER: usize = 4;

/// Nodes and weights of the n-point Gauss-Legendre rule on [-1, 1].
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut x = vec![0.0; n];
    let mut w = vec![0.0; n];
    let m = n.div_ceil(2);
    for i in 0..m {
        let mut z = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (p, d) = legendre_with_derivative(n, z);
            dp = d;
            let dz = p / d;
            z -= dz;
            if dz.abs() < 1e-16 {
                break;
            }
        }
        let (_, d) = legendre_with_derivative(n, z);
        if d != 0.0 {
            dp = d;
        }
        x[i] = -z;
        x[n - 1 - i] = z;
        let wi = 2.0 / ((1.0 - z * z) * dp * dp);
        w[i] = wi;
        w[n - 1 - i] = wi;
    }
    (x, w)
}

fn legendre_with_derivative(n: usize, z: f64) -> (f64, f64) {
    let (mut p0, mut p1) = (1.0, z);
    if n == 0 {
        return (1.0, 0.0);
    }
    for k in 2..=n {
        let p2 = ((2 * k - 1) as f64 * z * p1 - (k - 1) as f64 * p0) / k as f64;
        p0 = p1;
        p1 = p2;
    }
    let d = n as f64 * (z * p1 - p0) / (z * z - 1.0);
    (p1, d)
}

/// Gauss-Legendre rule mapped to [a, b].
pub fn gauss_legendre_on(n: usize, a: f64, b: f64) -> Vec<(f64, f64)> {
    let (x, w) = gauss_legendre(n);
    let h = 0.5 * (b - a);
    let c = 0.5 * (b + a);
    x.iter().zip(&w).map(|(&xi, &wi)| (c + h * xi, h * wi)).collect()
}

/// Per-axis orders of a product rule. For a sphere the axes are (r, cos theta, phi);
/// for a box they are (x, y, z).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct QuadratureOrder {
    pub radial: usize,
    pub polar: usize,
    pub azimuthal: usize,
}

impl Default for QuadratureOrder {
    fn default() -> Self {
        Self { radial: 64, polar: 32, azimuthal: 32 }
    }
}

impl QuadratureOrder {
    pub fn new(radial: usize, polar: usize, azimuthal: usize) -> Result<Self> {
        let q = Self { radial, polar, azimuthal };
        q.validate()?;
        Ok(q)
    }

    pub fn validate(&self) -> Result<()> {
        for (name, v) in [("radial", self.radial), ("polar", self.polar), ("azimuthal", self.azimuthal)] {
            if v < MIN_ORDER {
                return Err(Error::Config(format!("quadrature order {name}={v} below minimum {MIN_ORDER}")));
            }
        }
        Ok(())
    }

    pub fn doubled(&self) -> Self {
        Self { radial: 2 * self.radial, polar: 2 * self.polar, azimuthal: 2 * self.azimuthal }
    }
}

/// A weighted point set for integrating over a region of the cell. Positions are
/// Cartesian, relative to the cell centre, in metres.
#[derive(Debug, Clone)]
pub struct VolumeRule {
    pub points: Vec<[f64; 3]>,
    pub weights: Vec<f64>,
}

impl VolumeRule {
    /// Product rule over a ball of radius `radius`.
    pub fn ball(radius: f64, order: QuadratureOrder) -> Result<Self> {
        order.validate()?;
        let rs = gauss_legendre_on(order.radial, 0.0, radius);
        let cts = gauss_legendre_on(order.polar, -1.0, 1.0);
        let phis = gauss_legendre_on(order.azimuthal, 0.0, 2.0 * PI);
        let n = rs.len() * cts.len() * phis.len();
        let mut points = Vec::with_capacity(n);
        let mut weights = Vec::with_capacity(n);
        for &(r, wr) in &rs {
            for &(ct, wt) in &cts {
                let st = (1.0 - ct * ct).sqrt();
                for &(ph, wp) in &phis {
                    let (sp, cp) = ph.sin_cos();
                    points.push([r * st * cp, r * st * sp, r * ct]);
                    weights.push(wr * r * r * wt * wp);
                }
            }
        }
        Ok(Self { points, weights })
    }

    /// Product rule over the centred box with the given edge lengths.
    pub fn cuboid(edges: [f64; 3], order: QuadratureOrder) -> Result<Self> {
        order.validate()?;
        let ax = |n: usize, l: f64| gauss_legendre_on(n, -0.5 * l, 0.5 * l);
        Self::cuboid_region(ax(order.radial, edges[0]), ax(order.polar, edges[1]), ax(order.azimuthal, edges[2]))
    }

    fn cuboid_region(xs: Vec<(f64, f64)>, ys: Vec<(f64, f64)>, zs: Vec<(f64, f64)>) -> Result<Self> {
        let n = xs.len() * ys.len() * zs.len();
        let mut points = Vec::with_capacity(n);
        let mut weights = Vec::with_capacity(n);
        for &(x, wx) in &xs {
            for &(y, wy) in &ys {
                for &(z, wz) in &zs {
                    points.push([x, y, z]);
                    weights.push(wx * wy * wz);
                }
            }
        }
        Ok(Self { points, weights })
    }

    /// Part of a ball with z in [z_lo, z_hi]. Uses z = R sin(u) so that the
    /// disk radius R cos(u) stays smooth up to the poles; each disk is a polar
    /// product rule.
    pub fn ball_slab(radius: f64, z_lo: f64, z_hi: f64, order: QuadratureOrder) -> Result<Self> {
        order.validate()?;
        let lo = (z_lo / radius).clamp(-1.0, 1.0).asin();
        let hi = (z_hi / radius).clamp(-1.0, 1.0).asin();
        let mut points = Vec::new();
        let mut weights = Vec::new();
        if hi <= lo {
            return Ok(Self { points, weights });
        }
        let us = gauss_legendre_on(order.polar, lo, hi);
        let rho_unit = gauss_legendre_on(order.radial, 0.0, 1.0);
        let phis = gauss_legendre_on(order.azimuthal, 0.0, 2.0 * PI);
        for &(u, wu) in &us {
            let (su, cu) = u.sin_cos();
            let z = radius * su;
            let disk = radius * cu;
            let jac_z = radius * cu;
            for &(t, wt) in &rho_unit {
                let rho = disk * t;
                for &(ph, wp) in &phis {
                    let (sp, cp) = ph.sin_cos();
                    points.push([rho * cp, rho * sp, z]);
                    weights.push(wu * jac_z * wt * disk * rho * wp);
                }
            }
        }
        Ok(Self { points, weights })
    }

    /// Part of a centred box with z in [z_lo, z_hi].
    pub fn cuboid_slab(edges: [f64; 3], z_lo: f64, z_hi: f64, order: QuadratureOrder) -> Result<Self> {
        order.validate()?;
        let lo = z_lo.max(-0.5 * edges[2]);
        let hi = z_hi.min(0.5 * edges[2]);
        if hi <= lo {
            return Ok(Self { points: vec![], weights: vec![] });
        }
        Self::cuboid_region(
            gauss_legendre_on(order.radial, -0.5 * edges[0], 0.5 * edges[0]),
            gauss_legendre_on(order.azimuthal, -0.5 * edges[1], 0.5 * edges[1]),
            gauss_legendre_on(order.polar, lo, hi),
        )
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn integrate<F: Fn([f64; 3]) -> f64>(&self, f: F) -> f64 {
        self.points.iter().zip(&self.weights).map(|(&p, &w)| w * f(p)).sum()
    }

    /// Evaluate `f` at every node.
    pub fn sample<F: Fn([f64; 3]) -> f64>(&self, f: F) -> Vec<f64> {
        self.points.iter().map(|&p| f(p)).collect()
    }

    /// Weighted sum of a pointwise product of sampled fields.
    pub fn dot(&self, fields: &[&[f64]]) -> f64 {
        let mut acc = 0.0;
        for (i, &w) in self.weights.iter().enumerate() {
            let mut v = w;
            for f in fields {
                v *= f[i];
            }
            acc += v;
        }
        acc
    }
}
