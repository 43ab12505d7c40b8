//! Robin-boundary roots of the sphere.
//!
//! The boundary condition -j_l(x)/j_l'(x) = c x (x = kR) has poles wherever j_l'
//! vanishes. We instead bracket the pole-free combination
//! F(x) = (j_l(x) + c x j_l'(x)) / (1 + c x), whose sign changes are exactly the
//! roots, so no pole crossing can be mistaken for one.

use std::f64::consts::PI;

use crate::error::{domain, Error, Result};

use super::bessel::BesselOrder;
use super::cell::Cell;

/// Step of the bracketing scan in units of kR.
pub const SCAN_STEP: f64 = 0.05;
const SCAN_START: f64 = 1e-9;
/// Roots with a normalized residual above this are rejected.
pub const RESIDUAL_LIMIT: f64 = 1e-10;

/// The scan stops at kR = (count + l + 2) pi. Robin roots never exceed the
/// Dirichlet zeros, and the n-th zero of j_l lies below (n + l/2 + 1) pi.
pub fn scan_window(l: u32, count: usize) -> f64 {
    (count as f64 + l as f64 + 2.0) * PI
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RobinRoot {
    /// kR
    pub x: f64,
    /// |j + c x j'| / ((1 + c x) sqrt(j^2 + j'^2)) at the root.
    pub residual: f64,
}

fn residual_fn(order: BesselOrder, c: f64, x: f64) -> f64 {
    let (j, dj) = order.eval(x);
    (j + c * x * dj) / (1.0 + c * x)
}

pub fn normalized_residual(l: u32, c: f64, x: f64) -> Result<f64> {
    let o = BesselOrder::new(l)?;
    let (j, dj) = o.eval(x);
    Ok(residual_fn(o, c, x).abs() / (j * j + dj * dj).sqrt())
}

/// The `count` smallest positive roots in x = kR for wall parameter `c` >= 0.
pub fn robin_roots(l: u32, c: f64, count: usize) -> Result<Vec<RobinRoot>> {
    let order = BesselOrder::new(l)?;
    if count == 0 {
        return Err(domain("root count must be >= 1"));
    }
    if !(c >= 0.0) || !c.is_finite() {
        return Err(domain(format!("wall parameter c must be finite and >= 0, got {c}")));
    }
    let f = |x: f64| residual_fn(order, c, x);
    let window = scan_window(l, count);
    let mut roots = Vec::with_capacity(count);
    let mut a = SCAN_START;
    let mut fa = f(a);
    while roots.len() < count {
        let b = (a + SCAN_STEP).min(window);
        let fb = f(b);
        if fa == 0.0 {
            roots.push(a);
        } else if fa * fb < 0.0 {
            roots.push(brent(&f, a, b, fa, fb)?);
        }
        if b >= window {
            break;
        }
        a = b;
        fa = fb;
    }
    if roots.len() < count {
        return Err(Error::Solver(format!(
            "found {} of {count} roots for l={l}, c={c} in scan window (0, {window:.4}] with step {SCAN_STEP}",
            roots.len()
        )));
    }
    roots
        .into_iter()
        .map(|x| {
            let residual = normalized_residual(l, c, x)?;
            if residual > RESIDUAL_LIMIT {
                return Err(Error::Solver(format!("root x={x} for l={l}, c={c} has residual {residual:e}")));
            }
            Ok(RobinRoot { x, residual })
        })
        .collect()
}

/// Wavenumbers (1/m) of the `count` lowest radial modes of order `l`.
pub fn solve_sphere_roots(cell: &Cell, l: u32, count: usize) -> Result<Vec<f64>> {
    let Cell::Sphere { radius, .. } = *cell else {
        return Err(domain("sphere roots requested for a box cell"));
    };
    let c = cell.robin_parameter()?;
    Ok(robin_roots(l, c, count)?.into_iter().map(|r| r.x / radius).collect())
}

fn brent<F: Fn(f64) -> f64>(f: &F, mut a: f64, mut b: f64, mut fa: f64, mut fb: f64) -> Result<f64> {
    if fa * fb > 0.0 {
        return Err(Error::Solver(format!("root not bracketed in [{a}, {b}]")));
    }
    let mut c = a;
    let mut fc = fa;
    let mut d = b - a;
    let mut e = d;
    for _ in 0..200 {
        if fb * fc > 0.0 {
            c = a;
            fc = fa;
            d = b - a;
            e = d;
        }
        if fc.abs() < fb.abs() {
            a = b;
            b = c;
            c = a;
            fa = fb;
            fb = fc;
            fc = fa;
        }
        let tol = 2.0 * f64::EPSILON * b.abs() + 0.5e-14 * b.abs();
        let m = 0.5 * (c - b);
        if m.abs() <= tol || fb == 0.0 {
            return Ok(b);
        }
        if e.abs() >= tol && fa.abs() > fb.abs() {
            let s = fb / fa;
            let (mut p, mut q);
            if a == c {
                p = 2.0 * m * s;
                q = 1.0 - s;
            } else {
                let qa = fa / fc;
                let r = fb / fc;
                p = s * (2.0 * m * qa * (qa - r) - (b - a) * (r - 1.0));
                q = (qa - 1.0) * (r - 1.0) * (s - 1.0);
            }
            if p > 0.0 {
                q = -q;
            } else {
                p = -p;
            }
            if 2.0 * p < (3.0 * m * q - (tol * q).abs()).min((e * q).abs()) {
                e = d;
                d = p / q;
            } else {
                d = m;
                e = m;
            }
        } else {
            d = m;
            e = m;
        }
        a = b;
        fa = fb;
        b += if d.abs() > tol { d } else { tol.copysign(m) };
        fb = f(b);
    }
    Err(Error::Solver(format!("Brent refinement did not converge near {b}")))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn bisect(f: impl Fn(f64) -> f64, mut a: f64, mut b: f64) -> f64 {
        for _ in 0..200 {
            let m = 0.5 * (a + b);
            if f(a) * f(m) <= 0.0 {
                b = m
            } else {
                a = m
            }
        }
        0.5 * (a + b)
    }

    #[test]
    fn dirichlet_l0_is_n_pi() {
        let r = robin_roots(0, 0.0, 5).unwrap();
        for (n, root) in r.iter().enumerate() {
            let want = (n + 1) as f64 * PI;
            assert!((root.x / want - 1.0).abs() < 1e-13, "{} vs {want}", root.x);
        }
    }

    #[test]
    fn dirichlet_l1_first_root() {
        let j1 = |x: f64| x.sin() / (x * x) - x.cos() / x;
        let want = bisect(j1, PI, 2.0 * PI);
        let got = robin_roots(1, 0.0, 1).unwrap()[0].x;
        assert!((got / want - 1.0).abs() < 1e-12);
    }

    #[test]
    fn neumann_limit_approaches_j0_prime_zero() {
        // j0'(x) = -j1(x); the first non-trivial zero is the first zero of j1.
        let j1 = |x: f64| x.sin() / (x * x) - x.cos() / x;
        let want = bisect(j1, PI, 2.0 * PI);
        let r = robin_roots(0, 1e9, 2).unwrap();
        // index 0 is the near-uniform mode with x ~ sqrt(3/c)
        assert!((r[0].x - (3.0f64 / 1e9).sqrt()).abs() < 1e-6);
        assert!((r[1].x - want).abs() < 1e-6, "{}", r[1].x);
    }

    #[test]
    fn roots_decrease_with_wall_parameter() {
        let mut last = vec![f64::INFINITY; 3];
        for i in 0..20 {
            let c = 0.05 * i as f64;
            let r: Vec<f64> = robin_roots(0, c, 3).unwrap().iter().map(|r| r.x).collect();
            for k in 0..3 {
                assert!(r[k] < last[k]);
            }
            last = r;
        }
    }

    #[test]
    fn residuals_are_small_for_all_orders() {
        for l in 0..=3 {
            for &c in &[0.0, 0.1, 0.5, 3.0, 100.0] {
                let r = robin_roots(l, c, 6).unwrap();
                for w in r.windows(2) {
                    assert!(w[1].x > w[0].x);
                }
                for root in &r {
                    assert!(root.residual < RESIDUAL_LIMIT);
                }
            }
        }
    }

    #[test]
    fn solves_cell_in_wavenumbers() {
        let cell = Cell::sphere(0.01, 0.0, 1.0).unwrap();
        let k = solve_sphere_roots(&cell, 0, 3).unwrap();
        assert!((k[0] * 0.01 - PI).abs() < 1e-12);
        assert!(solve_sphere_roots(&Cell::cuboid(1.0, 1.0, 1.0).unwrap(), 0, 1).is_err());
        assert!(robin_roots(4, 0.0, 1).is_err());
    }
}
