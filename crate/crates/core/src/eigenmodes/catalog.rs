use crate::error::{domain, Result};

use super::boxcell::solve_box_modes;
use super::cell::Cell;
use super::mode::{Mode, ModeIndex};
use super::quadrature::{QuadratureOrder, VolumeRule};
use super::sphere::solve_sphere_roots;

/// Solve a single mode by index.
pub fn solve_mode(cell: &Cell, index: ModeIndex, diffusion: f64, gamma: f64) -> Result<Mode> {
    match index {
        ModeIndex::Sphere { n, l, .. } => {
            let k = solve_sphere_roots(cell, l, n as usize + 1)?[n as usize];
            Mode::new(index, k, *cell, diffusion, gamma)
        }
        ModeIndex::Box { nx, ny, nz } => {
            let Cell::Box { edges } = *cell else {
                return Err(domain("box mode index on a sphere cell"));
            };
            let k = std::f64::consts::PI
                * ((nx as f64 / edges[0]).powi(2) + (ny as f64 / edges[1]).powi(2) + (nz as f64 / edges[2]).powi(2))
                    .sqrt();
            Mode::new(index, k, *cell, diffusion, gamma)
        }
    }
}

/// One row of the exported mode table.
#[derive(Debug, Clone, PartialEq)]
pub struct ModeRow {
    pub id: String,
    pub n: u32,
    pub l: u32,
    pub p: String,
    pub kr: f64,
    pub k: f64,
    pub gamma: f64,
    pub norm: f64,
}

/// All modes of a cell up to a cutoff, sorted by wavenumber.
#[derive(Debug, Clone)]
pub struct ModeCatalog {
    cell: Cell,
    modes: Vec<Mode>,
}

impl ModeCatalog {
    /// Sphere: radial indices 0..count for every l <= l_max and every orientation.
    /// Box: the `count` lowest modes (l_max ignored).
    pub fn solve(cell: &Cell, l_max: u32, count: usize, diffusion: f64, gamma: f64) -> Result<Self> {
        let mut modes = Vec::new();
        match cell {
            Cell::Sphere { .. } => {
                if l_max > super::bessel::MAX_ORDER {
                    return Err(domain(format!("l_max={l_max} exceeds 3")));
                }
                for l in 0..=l_max {
                    let ks = solve_sphere_roots(cell, l, count)?;
                    for (n, &k) in ks.iter().enumerate() {
                        for m in -(l as i32)..=(l as i32) {
                            let idx = ModeIndex::sphere(n as u32, l, m)?;
                            modes.push(Mode::new(idx, k, *cell, diffusion, gamma)?);
                        }
                    }
                }
            }
            Cell::Box { .. } => {
                for (idx, k) in solve_box_modes(cell, count)? {
                    modes.push(Mode::new(idx, k, *cell, diffusion, gamma)?);
                }
            }
        }
        modes.sort_by(|a, b| a.k.total_cmp(&b.k).then(a.index.cmp(&b.index)));
        Ok(Self { cell: *cell, modes })
    }

    pub fn cell(&self) -> &Cell {
        &self.cell
    }

    pub fn modes(&self) -> &[Mode] {
        &self.modes
    }

    pub fn len(&self) -> usize {
        self.modes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.modes.is_empty()
    }

    pub fn get(&self, index: &ModeIndex) -> Option<&Mode> {
        self.modes.iter().find(|m| m.index == *index)
    }

    /// Rows with n, l, p = nx, ny, nz for box modes. kR uses the characteristic length.
    pub fn rows(&self) -> Vec<ModeRow> {
        let r = self.cell.characteristic_length();
        self.modes
            .iter()
            .map(|m| {
                let (n, l, p) = match m.index {
                    ModeIndex::Sphere { n, l, .. } => (n, l, m.index.orientation()),
                    ModeIndex::Box { nx, ny, nz } => (nx, ny, nz.to_string()),
                };
                ModeRow { id: m.index.to_string(), n, l, p, kr: m.k * r, k: m.k, gamma: m.decay_rate, norm: m.norm }
            })
            .collect()
    }
}

/// A quadrature rule bound to one cell.
#[derive(Debug, Clone)]
pub struct CellIntegrator {
    cell: Cell,
    order: QuadratureOrder,
    rule: VolumeRule,
}

/// Mode values at the nodes of a [`CellIntegrator`].
#[derive(Debug, Clone)]
pub struct SampledMode {
    pub mode: Mode,
    pub values: Vec<f64>,
}

impl CellIntegrator {
    pub fn new(cell: &Cell, order: QuadratureOrder) -> Result<Self> {
        Ok(Self { cell: *cell, order, rule: cell.volume_rule(order)? })
    }

    pub fn cell(&self) -> &Cell {
        &self.cell
    }

    pub fn order(&self) -> QuadratureOrder {
        self.order
    }

    pub fn rule(&self) -> &VolumeRule {
        &self.rule
    }

    pub fn sample(&self, mode: &Mode) -> Result<SampledMode> {
        if *mode.cell() != self.cell {
            return Err(domain(format!("mode {} was solved on a different cell", mode.index)));
        }
        Ok(SampledMode { mode: mode.clone(), values: self.rule.sample(|p| mode.value(p)) })
    }

    pub fn field<F: Fn([f64; 3]) -> f64>(&self, f: F) -> Vec<f64> {
        self.rule.sample(f)
    }
}

/// Integral of s1 * weight * s2 over the cell. Modes are real, so no conjugate appears.
pub fn overlap_integral<W: Fn([f64; 3]) -> f64>(
    m1: &Mode,
    m2: &Mode,
    weight: W,
    integrator: &CellIntegrator,
) -> Result<f64> {
    if m1.cell() != m2.cell() {
        return Err(domain("modes were solved on different cells"));
    }
    let a = integrator.sample(m1)?;
    let b = integrator.sample(m2)?;
    let w = integrator.field(weight);
    Ok(integrator.rule.dot(&[&a.values, &b.values, &w]))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn integ(cell: &Cell) -> CellIntegrator {
        CellIntegrator::new(cell, QuadratureOrder::default()).unwrap()
    }

    #[test]
    fn sphere_modes_orthonormal() {
        for &(mfp, n) in &[(0.0, 1.0), (2e-4, 1.0), (1e-3, 0.5)] {
            let cell = Cell::sphere(0.01, mfp, n).unwrap();
            let cat = ModeCatalog::solve(&cell, 2, 2, 1.0, 0.0).unwrap();
            let q = integ(&cell);
            let s: Vec<_> = cat.modes().iter().map(|m| q.sample(m).unwrap()).collect();
            for i in 0..s.len() {
                for j in 0..=i {
                    let v = q.rule().dot(&[&s[i].values, &s[j].values]);
                    let want = if i == j { 1.0 } else { 0.0 };
                    assert!((v - want).abs() < 1e-8, "{} {}: {v}", s[i].mode.index, s[j].mode.index);
                }
            }
        }
    }

    #[test]
    fn box_modes_orthonormal() {
        let cell = Cell::cuboid(4e-3, 4e-3, 2e-3).unwrap();
        let cat = ModeCatalog::solve(&cell, 0, 6, 1.0, 0.0).unwrap();
        let q = integ(&cell);
        for a in cat.modes() {
            for b in cat.modes() {
                let v = overlap_integral(a, b, |_| 1.0, &q).unwrap();
                let want = if a.index == b.index { 1.0 } else { 0.0 };
                assert!((v - want).abs() < 1e-8);
            }
        }
    }

    #[test]
    fn z_weight_parity() {
        let cell = Cell::sphere(0.01, 0.0, 1.0).unwrap();
        let d = 1.0;
        let s000 = solve_mode(&cell, "s000".parse().unwrap(), d, 0.0).unwrap();
        let s100 = solve_mode(&cell, "s100".parse().unwrap(), d, 0.0).unwrap();
        let s01z = solve_mode(&cell, "s01z".parse().unwrap(), d, 0.0).unwrap();
        let q = integ(&cell);
        assert!(overlap_integral(&s000, &s100, |p| p[2], &q).unwrap().abs() < 1e-10);
        let dip = overlap_integral(&s000, &s01z, |p| p[2], &q).unwrap();
        assert!(dip.abs() > 1e-4, "{dip}");
    }

    #[test]
    fn rows_carry_box_indices() {
        let cell = Cell::cuboid(4e-3, 4e-3, 2e-3).unwrap();
        let cat = ModeCatalog::solve(&cell, 0, 2, 1.0, 0.0).unwrap();
        let r = &cat.rows()[0];
        assert_eq!((r.n, r.l, r.p.as_str()), (1, 1, "1"));
        assert!((r.kr - r.k * 1e-3).abs() < 1e-12);
    }

    #[test]
    fn mismatched_cells_rejected() {
        let a = Cell::sphere(0.01, 0.0, 1.0).unwrap();
        let b = Cell::sphere(0.02, 0.0, 1.0).unwrap();
        let m = solve_mode(&a, "s000".parse().unwrap(), 1.0, 0.0).unwrap();
        assert!(integ(&b).sample(&m).is_err());
    }
}
