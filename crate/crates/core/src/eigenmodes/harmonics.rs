//! Real spherical harmonics up to l = 3 and their orientation labels.

use std::f64::consts::PI;

use crate::error::{domain, Result};

/// Real, orthonormal spherical harmonic S_lm(theta, phi).
///
/// m > 0 carries cos(m phi), m < 0 carries sin(|m| phi). No Condon-Shortley phase,
/// so S_11 is proportional to x / r and S_1,-1 to y / r.
pub fn real_harmonic(l: u32, m: i32, cos_theta: f64, phi: f64) -> f64 {
    let am = m.unsigned_abs();
    let k = normalization(l, am);
    let p = legendre(l, am, cos_theta);
    match m {
        0 => k * p,
        m if m > 0 => std::f64::consts::SQRT_2 * k * p * (m as f64 * phi).cos(),
        m => std::f64::consts::SQRT_2 * k * p * ((-m) as f64 * phi).sin(),
    }
}

pub(crate) fn check(l: u32, m: i32) -> Result<()> {
    if l > super::bessel::MAX_ORDER {
        return Err(domain(format!("angular order l={l} unsupported (max 3)")));
    }
    if m.unsigned_abs() > l {
        return Err(domain(format!("|m|={} exceeds l={l}", m.unsigned_abs())));
    }
    Ok(())
}

/// Orientation label: "0" for l = 0, "z"/"x"/"y" for the dipoles, "c{m}"/"s{m}" otherwise
/// (with "z" for every m = 0).
pub fn orientation_label(l: u32, m: i32) -> String {
    match (l, m) {
        (0, _) => "0".into(),
        (_, 0) => "z".into(),
        (1, 1) => "x".into(),
        (1, -1) => "y".into(),
        (_, m) if m > 0 => format!("c{m}"),
        (_, m) => format!("s{}", -m),
    }
}

/// Inverse of [`orientation_label`].
pub fn parse_orientation(l: u32, label: &str) -> Result<i32> {
    let m = match (l, label) {
        (0, "0") => 0,
        (l, "z") if l > 0 => 0,
        (1, "x") => 1,
        (1, "y") => -1,
        (l, s) if l > 1 && s.len() > 1 => {
            let v: i32 = s[1..].parse().map_err(|_| domain(format!("bad orientation label '{s}'")))?;
            match &s[..1] {
                "c" => v,
                "s" => -v,
                _ => return Err(domain(format!("bad orientation label '{s}'"))),
            }
        }
        _ => return Err(domain(format!("bad orientation label '{label}' for l={l}"))),
    };
    check(l, m)?;
    if m == 0 && l > 0 && label != "z" {
        return Err(domain(format!("bad orientation label '{label}'")));
    }
    Ok(m)
}

fn normalization(l: u32, m: u32) -> f64 {
    let fact = |n: u32| (1..=n).map(f64::from).product::<f64>();
    ((2 * l + 1) as f64 / (4.0 * PI) * fact(l - m) / fact(l + m)).sqrt()
}

// Associated Legendre P_l^m without the Condon-Shortley phase.
fn legendre(l: u32, m: u32, x: f64) -> f64 {
    let s = (1.0 - x * x).max(0.0).sqrt();
    match (l, m) {
        (0, 0) => 1.0,
        (1, 0) => x,
        (1, 1) => s,
        (2, 0) => 0.5 * (3.0 * x * x - 1.0),
        (2, 1) => 3.0 * x * s,
        (2, 2) => 3.0 * s * s,
        (3, 0) => 0.5 * (5.0 * x * x * x - 3.0 * x),
        (3, 1) => 1.5 * (5.0 * x * x - 1.0) * s,
        (3, 2) => 15.0 * x * s * s,
        (3, 3) => 15.0 * s * s * s,
        _ => unreachable!("checked by caller"),
    }
}
