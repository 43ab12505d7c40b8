use std::f64::consts::PI;

use crate::error::{domain, Result};

use super::cell::Cell;
use super::mode::ModeIndex;

// Relative spacing below which two wavenumbers count as degenerate.
const TIE_TOL: f64 = 1e-12;

/// The `count` lowest Dirichlet modes of a box cell, sorted by k. Degenerate
/// modes are listed in descending lexicographic (nx, ny, nz) order, so the
/// excitation along x comes first: (2,1,1), (1,2,1), (1,1,2).
pub fn solve_box_modes(cell: &Cell, count: usize) -> Result<Vec<(ModeIndex, f64)>> {
    let Cell::Box { edges } = *cell else {
        return Err(domain("box modes requested for a sphere cell"));
    };
    if count == 0 {
        return Err(domain("mode count must be >= 1"));
    }
    // (n,1,1) for n = 1..=count already gives `count` modes, so no index beyond
    // `count` can be among the lowest.
    let n = count as u32;
    let mut all = Vec::with_capacity((n * n * n) as usize);
    for nx in 1..=n {
        for ny in 1..=n {
            for nz in 1..=n {
                let k = PI
                    * ((nx as f64 / edges[0]).powi(2)
                        + (ny as f64 / edges[1]).powi(2)
                        + (nz as f64 / edges[2]).powi(2))
                    .sqrt();
                all.push(((nx, ny, nz), k));
            }
        }
    }
    all.sort_by(|a, b| a.1.total_cmp(&b.1));
    let mut start = 0;
    while start < all.len() {
        let head = all[start].1;
        let mut end = start + 1;
        while end < all.len() && all[end].1 - head <= TIE_TOL * all[end].1 {
            end += 1;
        }
        all[start..end].sort_by_key(|a| std::cmp::Reverse(a.0));
        start = end;
    }
    all.truncate(count);
    Ok(all.into_iter().map(|((nx, ny, nz), k)| (ModeIndex::Box { nx, ny, nz }, k)).collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cube_ground_and_tie_break() {
        let l = 0.003;
        let c = Cell::cuboid(l, l, l).unwrap();
        let m = solve_box_modes(&c, 4).unwrap();
        assert!((m[0].1 - PI * 3f64.sqrt() / l).abs() < 1e-9);
        assert_eq!(m[0].0, ModeIndex::Box { nx: 1, ny: 1, nz: 1 });
        assert!((m[1].1 - PI * 6f64.sqrt() / l).abs() < 1e-9);
        assert_eq!(m[1].0, ModeIndex::Box { nx: 2, ny: 1, nz: 1 });
        assert_eq!(m[2].0, ModeIndex::Box { nx: 1, ny: 2, nz: 1 });
        assert_eq!(m[3].0, ModeIndex::Box { nx: 1, ny: 1, nz: 2 });
    }

    #[test]
    fn wafer_ground_mode() {
        let c = Cell::cuboid(4e-3, 4e-3, 2e-3).unwrap();
        let m = solve_box_modes(&c, 1).unwrap();
        let want = PI * (2.0f64 / 16.0 + 0.25).sqrt() * 1e3;
        assert!((m[0].1 - want).abs() < 1e-9 * want);
        assert!((m[0].1 * 1e-3 - 1.923825).abs() < 1e-6);
    }

    #[test]
    fn sorted_and_exhaustive() {
        let c = Cell::cuboid(1.0, 1.3, 0.7).unwrap();
        let m = solve_box_modes(&c, 30).unwrap();
        for w in m.windows(2) {
            assert!(w[1].1 >= w[0].1 * (1.0 - 1e-12));
        }
        // brute force over a larger index range
        let mut ks = vec![];
        for a in 1..=40 {
            for b in 1..=40 {
                for d in 1..=40 {
                    ks.push(PI * ((a as f64).powi(2) + (b as f64 / 1.3).powi(2) + (d as f64 / 0.7).powi(2)).sqrt());
                }
            }
        }
        ks.sort_by(f64::total_cmp);
        for (i, (_, k)) in m.iter().enumerate() {
            assert!((k - ks[i]).abs() < 1e-9);
        }
    }
}
