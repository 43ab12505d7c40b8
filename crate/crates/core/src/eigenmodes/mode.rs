use std::fmt;
use std::str::FromStr;

use crate::error::{domain, Error, Result};

use super::bessel::BesselOrder;
use super::cell::Cell;
use super::harmonics::{check, orientation_label, parse_orientation, real_harmonic};

/// Mode label. Sphere modes print as `s{n}{l}{p}` (s000, s01z, s02c2),
/// box modes as `b{nx}{ny}{nz}` (or `b{nx}_{ny}_{nz}` when an index exceeds 9).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ModeIndex {
    Sphere { n: u32, l: u32, m: i32 },
    Box { nx: u32, ny: u32, nz: u32 },
}

impl ModeIndex {
    pub fn sphere(n: u32, l: u32, m: i32) -> Result<Self> {
        check(l, m)?;
        Ok(ModeIndex::Sphere { n, l, m })
    }

    pub fn cuboid(nx: u32, ny: u32, nz: u32) -> Result<Self> {
        if nx == 0 || ny == 0 || nz == 0 {
            return Err(domain("box mode indices start at 1"));
        }
        Ok(ModeIndex::Box { nx, ny, nz })
    }

    /// Orientation label for sphere modes, empty for box modes.
    pub fn orientation(&self) -> String {
        match *self {
            ModeIndex::Sphere { l, m, .. } => orientation_label(l, m),
            ModeIndex::Box { .. } => String::new(),
        }
    }
}

impl fmt::Display for ModeIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            ModeIndex::Sphere { n, l, m } => write!(f, "s{n}{l}{}", orientation_label(l, m)),
            ModeIndex::Box { nx, ny, nz } if nx < 10 && ny < 10 && nz < 10 => {
                write!(f, "b{nx}{ny}{nz}")
            }
            ModeIndex::Box { nx, ny, nz } => write!(f, "b{nx}_{ny}_{nz}"),
        }
    }
}

impl FromStr for ModeIndex {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = || domain(format!("cannot parse mode id '{s}'"));
        if let Some(rest) = s.strip_prefix('b') {
            let parts: Vec<u32> = if rest.contains('_') {
                rest.split('_').map(|p| p.parse().map_err(|_| bad())).collect::<Result<_>>()?
            } else {
                rest.chars().map(|c| c.to_digit(10).ok_or_else(bad)).collect::<Result<_>>()?
            };
            let [nx, ny, nz] = parts[..] else { return Err(bad()) };
            return ModeIndex::cuboid(nx, ny, nz);
        }
        let rest = s.strip_prefix('s').ok_or_else(bad)?;
        let bytes = rest.as_bytes();
        if bytes.len() < 3 || !rest.is_ascii() {
            return Err(bad());
        }
        let last = bytes[bytes.len() - 1];
        let label_len = if last.is_ascii_alphabetic() {
            1
        } else if bytes[bytes.len() - 2] == b'c' || bytes[bytes.len() - 2] == b's' {
            2
        } else {
            1
        };
        let (head, label) = rest.split_at(rest.len() - label_len);
        if head.len() < 2 {
            return Err(bad());
        }
        let (n, l) = head.split_at(head.len() - 1);
        let n: u32 = n.parse().map_err(|_| bad())?;
        let l: u32 = l.parse().map_err(|_| bad())?;
        let m = parse_orientation(l, label)?;
        ModeIndex::sphere(n, l, m)
    }
}

/// A normalized diffusion eigenmode.
#[derive(Debug, Clone, PartialEq)]
pub struct Mode {
    pub index: ModeIndex,
    /// Wavenumber (1/m).
    pub k: f64,
    /// D k^2 + Gamma (1/s).
    pub decay_rate: f64,
    /// Angular frequency (rad/s).
    pub frequency: f64,
    /// Prefactor giving unit L2 norm over the cell.
    pub norm: f64,
    cell: Cell,
}

impl Mode {
    /// Normalized mode for the given index and wavenumber. The decay rate is
    /// `diffusion * k^2 + gamma`.
    pub fn new(index: ModeIndex, k: f64, cell: Cell, diffusion: f64, gamma: f64) -> Result<Self> {
        if !(k > 0.0) {
            return Err(domain(format!("mode wavenumber must be > 0, got {k}")));
        }
        let norm = match (index, cell) {
            (ModeIndex::Sphere { l, .. }, Cell::Sphere { radius, .. }) => {
                1.0 / radial_norm_squared(l, k, radius)?.sqrt()
            }
            (ModeIndex::Box { .. }, Cell::Box { .. }) => (8.0 / cell.volume()).sqrt(),
            _ => return Err(domain("mode index does not match the cell geometry")),
        };
        Ok(Self { index, k, decay_rate: diffusion * k * k + gamma, frequency: 0.0, norm, cell })
    }

    pub fn cell(&self) -> &Cell {
        &self.cell
    }

    /// Same mode with a different frequency.
    pub fn with_frequency(mut self, omega: f64) -> Self {
        self.frequency = omega;
        self
    }

    /// Value at a Cartesian point relative to the cell centre. No bounds check.
    pub fn value(&self, p: [f64; 3]) -> f64 {
        match (self.index, self.cell) {
            (ModeIndex::Sphere { l, m, .. }, _) => {
                let r = (p[0] * p[0] + p[1] * p[1] + p[2] * p[2]).sqrt();
                let (ct, phi) = if r > 0.0 { ((p[2] / r).clamp(-1.0, 1.0), p[1].atan2(p[0])) } else { (1.0, 0.0) };
                let j = BesselOrder::new(l).expect("validated index").value(self.k * r);
                self.norm * j * real_harmonic(l, m, ct, phi)
            }
            (ModeIndex::Box { nx, ny, nz }, Cell::Box { edges }) => {
                let s = |n: u32, x: f64, l: f64| (n as f64 * std::f64::consts::PI * (x + 0.5 * l) / l).sin();
                self.norm * s(nx, p[0], edges[0]) * s(ny, p[1], edges[1]) * s(nz, p[2], edges[2])
            }
            _ => unreachable!("checked in Mode::new"),
        }
    }

    /// Value at spherical coordinates (r, theta, phi). Points outside the cell are a domain error.
    pub fn value_spherical(&self, r: f64, theta: f64, phi: f64) -> Result<f64> {
        let (st, ct) = theta.sin_cos();
        let (sp, cp) = phi.sin_cos();
        let p = [r * st * cp, r * st * sp, r * ct];
        if r < 0.0 || !self.cell.contains(p) {
            return Err(domain(format!("point (r={r}, theta={theta}, phi={phi}) outside the cell")));
        }
        Ok(self.value(p))
    }
}

/// Integral of j_l(k r)^2 r^2 over [0, R], using
/// R^3/2 [j_l'^2 + j_l j_l'/x + (1 - l(l+1)/x^2) j_l^2] with x = kR.
pub fn radial_norm_squared(l: u32, k: f64, radius: f64) -> Result<f64> {
    let o = BesselOrder::new(l)?;
    let x = k * radius;
    let (j, dj) = o.eval(x);
    let ll = (l * (l + 1)) as f64;
    let v = 0.5 * radius.powi(3) * (dj * dj + j * dj / x + (1.0 - ll / (x * x)) * j * j);
    if !(v > 0.0) {
        return Err(domain(format!("non-positive radial norm for l={l}, kR={x}")));
    }
    Ok(v)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::eigenmodes::quadrature::gauss_legendre_on;

    #[test]
    fn ids_round_trip() {
        for id in ["s000", "s01z", "s01x", "s01y", "s100", "s12z", "s02c2", "s03s3", "s120", "b111", "b131", "b1_12_3"]
        {
            let parsed: Result<ModeIndex> = id.parse();
            match parsed {
                Ok(m) => assert_eq!(m.to_string(), id),
                Err(_) => assert_eq!(id, "s120"), // l=2 needs an oriented label
            }
        }
        assert!("s05z".parse::<ModeIndex>().is_err());
        assert!("b011".parse::<ModeIndex>().is_err());
        assert!("x".parse::<ModeIndex>().is_err());
    }

    #[test]
    fn radial_norm_matches_quadrature() {
        let radius = 0.7;
        for l in 0..=3 {
            for &x in &[0.3, 2.0, 4.4934, 7.1, 11.0] {
                let k = x / radius;
                let o = BesselOrder::new(l).unwrap();
                let q: f64 =
                    gauss_legendre_on(80, 0.0, radius).iter().map(|&(r, w)| w * (o.value(k * r) * r).powi(2)).sum();
                let a = radial_norm_squared(l, k, radius).unwrap();
                assert!((a / q - 1.0).abs() < 1e-12, "l={l} x={x}: {a} vs {q}");
            }
        }
    }

    #[test]
    fn dirichlet_ground_mode_vanishes_at_wall() {
        let cell = Cell::sphere(0.01, 0.0, 1.0).unwrap();
        let m = Mode::new(ModeIndex::sphere(0, 0, 0).unwrap(), std::f64::consts::PI / 0.01, cell, 0.0, 0.0).unwrap();
        assert!(m.value_spherical(0.01, 0.3, 0.2).unwrap().abs() < 1e-12);
        assert!(m.value_spherical(0.0101, 0.3, 0.2).is_err());
    }

    #[test]
    fn z_dipole_vanishes_on_equator() {
        let cell = Cell::sphere(0.01, 0.0, 1.0).unwrap();
        let m = Mode::new(ModeIndex::sphere(0, 1, 0).unwrap(), 449.0, cell, 0.0, 0.0).unwrap();
        assert!(m.value_spherical(0.005, std::f64::consts::FRAC_PI_2, 1.0).unwrap().abs() < 1e-10);
    }

    #[test]
    fn decay_rate_is_dk2_plus_gamma() {
        let cell = Cell::cuboid(1.0, 1.0, 1.0).unwrap();
        let m = Mode::new(ModeIndex::cuboid(1, 1, 1).unwrap(), 2.0, cell, 3.0, 0.5).unwrap();
        assert_eq!(m.decay_rate, 12.5);
        let s = Cell::sphere(1.0, 0.0, 1.0).unwrap();
        assert!(Mode::new(ModeIndex::cuboid(1, 1, 1).unwrap(), 2.0, s, 1.0, 0.0).is_err());
    }
}
