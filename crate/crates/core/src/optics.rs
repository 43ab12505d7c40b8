//! Gaussian pump and probe beams and their overlaps with the diffusion modes.

use num_complex::Complex64;
use rayon::prelude::*;

use crate::eigenmodes::{overlap_integral, Cell, CellIntegrator, Mode, QuadratureOrder, SampledMode};
use crate::error::{domain, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Axis {
    X,
    Z,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BeamSpec {
    /// Propagation direction.
    pub axis: Axis,
    /// Gaussian rms waist (m).
    pub waist: f64,
    /// Transverse centre offset (m): (x, y) for a z beam, (y, z) for an x beam.
    pub offset: [f64; 2],
    /// Power (W).
    pub power: f64,
    /// Absorption coefficient along propagation (1/m).
    pub attenuation: f64,
}

impl BeamSpec {
    pub fn new(axis: Axis, waist: f64, power: f64) -> Result<Self> {
        let b = Self { axis, waist, offset: [0.0, 0.0], power, attenuation: 0.0 };
        b.validate()?;
        Ok(b)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.waist > 0.0) {
            return Err(domain(format!("beam waist must be > 0, got {}", self.waist)));
        }
        if !(self.power >= 0.0) {
            return Err(domain(format!("beam power must be >= 0, got {}", self.power)));
        }
        if !(self.attenuation >= 0.0) {
            return Err(domain(format!("attenuation must be >= 0, got {}", self.attenuation)));
        }
        Ok(())
    }

    /// P / (2 pi sigma^2) (W/m^2).
    pub fn peak_intensity(&self) -> f64 {
        self.power / (2.0 * std::f64::consts::PI * self.waist * self.waist)
    }

    /// Relative intensity at `p`: transverse Gaussian times exp(-alpha * depth),
    /// with depth measured from the entrance face of the cell.
    pub fn envelope(&self, p: [f64; 3], cell: &Cell) -> f64 {
        let (a, b, s, entry) = match self.axis {
            Axis::Z => (p[0], p[1], p[2], -cell.half_height()),
            Axis::X => (p[1], p[2], p[0], -entry_x(cell)),
        };
        let da = a - self.offset[0];
        let db = b - self.offset[1];
        let g = (-(da * da + db * db) / (2.0 * self.waist * self.waist)).exp();
        if self.attenuation == 0.0 {
            g
        } else {
            g * (-self.attenuation * (s - entry)).exp()
        }
    }
}

fn entry_x(cell: &Cell) -> f64 {
    match *cell {
        Cell::Sphere { radius, .. } => radius,
        Cell::Box { edges } => 0.5 * edges[0],
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SlitSpec {
    /// Slit width along z (m).
    pub width: f64,
    /// Slit centres z0 (m).
    pub positions: Vec<f64>,
}

impl SlitSpec {
    pub fn validate(&self, cell: &Cell) -> Result<()> {
        if !(self.width > 0.0) {
            return Err(domain(format!("slit width must be > 0, got {}", self.width)));
        }
        let h = cell.half_height();
        if let Some(z) = self.positions.iter().find(|z| !(z.abs() <= h * (1.0 + 1e-12))) {
            return Err(domain(format!("slit position {z} outside the cell (|z0| <= {h})")));
        }
        Ok(())
    }
}

/// A beam evaluated on the nodes of an integrator.
#[derive(Debug, Clone)]
pub struct BeamField {
    pub peak: f64,
    pub envelope: Vec<f64>,
}

impl BeamField {
    pub fn new(beam: &BeamSpec, integ: &CellIntegrator) -> Result<Self> {
        beam.validate()?;
        let cell = *integ.cell();
        Ok(Self { peak: beam.peak_intensity(), envelope: integ.field(|p| beam.envelope(p, &cell)) })
    }

    /// Integral of s_m times the relative beam envelope.
    pub fn projection(&self, s: &SampledMode, integ: &CellIntegrator) -> f64 {
        integ.rule().dot(&[&s.values, &self.envelope])
    }

    /// Integral of |s|^2 I over the integral of |s|^2 (W/m^2).
    pub fn effective_intensity(&self, s: &SampledMode, integ: &CellIntegrator) -> f64 {
        let num = integ.rule().dot(&[&s.values, &s.values, &self.envelope]);
        let den = integ.rule().dot(&[&s.values, &s.values]);
        self.peak * num / den
    }
}

fn require_z(beam: &BeamSpec) -> Result<()> {
    if beam.axis != Axis::Z {
        return Err(domain("pump beam must propagate along z"));
    }
    Ok(())
}

/// c_m: mode projection of the pump envelope.
pub fn pump_projection(beam: &BeamSpec, mode: &Mode, integ: &CellIntegrator) -> Result<f64> {
    require_z(beam)?;
    let s = integ.sample(mode)?;
    Ok(BeamField::new(beam, integ)?.projection(&s, integ))
}

/// Mode-weighted pump intensity seen by `mode` (W/m^2).
pub fn effective_intensity(beam: &BeamSpec, mode: &Mode, integ: &CellIntegrator) -> Result<f64> {
    require_z(beam)?;
    let s = integ.sample(mode)?;
    Ok(BeamField::new(beam, integ)?.effective_intensity(&s, integ))
}

/// Signal amplitude of `mode` behind a slit at each z0: the mode weighted by the
/// probe envelope, integrated over the slab |z - z0| <= width/2.
pub fn slit_image(mode: &Mode, probe: &BeamSpec, slit: &SlitSpec, order: QuadratureOrder) -> Result<Vec<f64>> {
    if probe.axis != Axis::X {
        return Err(domain("probe beam must propagate along x"));
    }
    probe.validate()?;
    let cell = *mode.cell();
    slit.validate(&cell)?;
    slit.positions
        .par_iter()
        .map(|&z0| {
            let rule = cell.slab_rule(z0 - 0.5 * slit.width, z0 + 0.5 * slit.width, order)?;
            Ok(rule.integrate(|p| mode.value(p) * probe.envelope(p, &cell)))
        })
        .collect()
}

/// J = -i gamma G times the integral of s1 z s2.
pub fn coupling_j(g: Complex64, gyro: f64, m1: &Mode, m2: &Mode, integ: &CellIntegrator) -> Result<Complex64> {
    let iz = overlap_integral(m1, m2, |p| p[2], integ)?;
    Ok(-Complex64::i() * gyro * g * iz)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GradientEstimate {
    /// Complex gradient amplitude (T/m).
    pub g: Complex64,
    /// d omega / d z0 (rad/s/m).
    pub frequency_slope: f64,
    /// d Gamma / d z0 (1/s/m).
    pub linewidth_slope: f64,
    /// Both profiles constant: G is reported as zero.
    pub flat: bool,
}

/// Gradient amplitude from imaged frequency and linewidth profiles.
///
/// A local perturbation i d_omega(z) - d_Gamma(z) of the mode generator equals
/// -i gamma G z, so G = -(d omega/dz + i d Gamma/dz) / gamma. A pure frequency
/// gradient gives real G and an imaginary (coherent exchange) coupling J.
pub fn estimate_g_from_imaging(z0: &[f64], omega: &[f64], linewidth: &[f64], gyro: f64) -> Result<GradientEstimate> {
    if z0.len() < 3 {
        return Err(domain(format!("need >= 3 scan positions, got {}", z0.len())));
    }
    if omega.len() != z0.len() || linewidth.len() != z0.len() {
        return Err(domain("profile lengths differ from the scan positions"));
    }
    if !(gyro != 0.0) {
        return Err(domain("gyromagnetic ratio must be nonzero"));
    }
    let flat_profile = |y: &[f64]| {
        let scale = y.iter().fold(0.0f64, |m, v| m.max(v.abs())).max(f64::MIN_POSITIVE);
        y.iter().all(|v| (v - y[0]).abs() <= 1e-12 * scale)
    };
    let so = ols_slope(z0, omega)?;
    let sg = ols_slope(z0, linewidth)?;
    if flat_profile(omega) && flat_profile(linewidth) {
        return Ok(GradientEstimate {
            g: Complex64::new(0.0, 0.0),
            frequency_slope: 0.0,
            linewidth_slope: 0.0,
            flat: true,
        });
    }
    Ok(GradientEstimate { g: -Complex64::new(so, sg) / gyro, frequency_slope: so, linewidth_slope: sg, flat: false })
}

fn ols_slope(x: &[f64], y: &[f64]) -> Result<f64> {
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let sxx: f64 = x.iter().map(|v| (v - mx).powi(2)).sum();
    if !(sxx > 0.0) {
        return Err(domain("scan positions must not all coincide"));
    }
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    Ok(sxy / sxx)
}
