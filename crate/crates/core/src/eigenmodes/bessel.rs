//! Spherical Bessel functions of the first kind for l = 0..=3.

use std::sync::atomic::{AtomicU64, Ordering};

use crate::error::{domain, Result};

/// Highest supported angular order.
pub const MAX_ORDER: u32 = 3;

// Below this argument the closed forms lose digits to cancellation.
const SERIES_CUTOFF: f64 = 2.0;
const SERIES_TERMS: usize = 30;

static FAULT_BITS: AtomicU64 = AtomicU64::new(0);

/// Perturb the cos(x)/x coefficient of the closed-form j_1 by `scale`, or restore
/// it with `None`. Only for exercising the self-test; process-wide.
#[doc(hidden)]
pub fn inject_fault(scale: Option<f64>) {
    FAULT_BITS.store(scale.map_or(0, f64::to_bits), Ordering::Relaxed);
}

fn j1_cos_coefficient() -> f64 {
    match FAULT_BITS.load(Ordering::Relaxed) {
        0 => 1.0,
        bits => f64::from_bits(bits),
    }
}

/// A validated spherical Bessel order. Evaluation through this type cannot fail.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BesselOrder(u32);

impl BesselOrder {
    pub fn new(l: u32) -> Result<Self> {
        if l > MAX_ORDER {
            return Err(domain(format!("spherical Bessel order {l} unsupported (max {MAX_ORDER})")));
        }
        Ok(Self(l))
    }

    pub fn l(self) -> u32 {
        self.0
    }

    /// j_l(x) for x >= 0.
    pub fn value(self, x: f64) -> f64 {
        let x = x.abs();
        if x < SERIES_CUTOFF {
            series(self.0, x, false)
        } else {
            closed(self.0, x)
        }
    }

    /// d j_l / dx.
    pub fn derivative(self, x: f64) -> f64 {
        let x = x.abs();
        if x < SERIES_CUTOFF {
            return series(self.0, x, true);
        }
        match self.0 {
            0 => -closed(1, x),
            l => closed(l - 1, x) - (l as f64 + 1.0) / x * closed(l, x),
        }
    }

    /// Both value and derivative.
    pub fn eval(self, x: f64) -> (f64, f64) {
        (self.value(x), self.derivative(x))
    }
}

/// j_l(x). Orders above 3 or negative arguments are domain errors.
pub fn spherical_jn(l: u32, x: f64) -> Result<f64> {
    check_arg(x)?;
    Ok(BesselOrder::new(l)?.value(x))
}

/// j_l'(x).
pub fn spherical_jn_derivative(l: u32, x: f64) -> Result<f64> {
    check_arg(x)?;
    Ok(BesselOrder::new(l)?.derivative(x))
}

fn check_arg(x: f64) -> Result<()> {
    if !(x >= 0.0) || !x.is_finite() {
        return Err(domain(format!("spherical Bessel argument {x} must be finite and >= 0")));
    }
    Ok(())
}

fn closed(l: u32, x: f64) -> f64 {
    let (s, c) = x.sin_cos();
    let ix = 1.0 / x;
    match l {
        0 => s * ix,
        1 => s * ix * ix - j1_cos_coefficient() * c * ix,
        2 => (3.0 * ix * ix - 1.0) * s * ix - 3.0 * c * ix * ix,
        3 => (15.0 * ix * ix * ix - 6.0 * ix) * s * ix - (15.0 * ix * ix - 1.0) * c * ix,
        _ => unreachable!("order validated by BesselOrder"),
    }
}

// j_l(x) = x^l sum_k (-x^2/2)^k / (k! (2l+2k+1)!!)
fn series(l: u32, x: f64, derivative: bool) -> f64 {
    let l = l as i32;
    let mut dfact = 1.0; // (2l+1)!!
    for i in 1..=l {
        dfact *= (2 * i + 1) as f64;
    }
    let mut coeff = 1.0 / dfact;
    let mut sum = 0.0;
    for k in 0..SERIES_TERMS as i32 {
        let p = l + 2 * k;
        let term = if derivative {
            if p == 0 {
                0.0
            } else {
                coeff * p as f64 * x.powi(p - 1)
            }
        } else {
            coeff * x.powi(p)
        };
        sum += term;
        if term.abs() < 1e-18 * sum.abs() && k > 2 {
            break;
        }
        coeff *= -0.5 / ((k + 1) as f64 * (2 * l + 2 * k + 3) as f64);
    }
    sum
}
