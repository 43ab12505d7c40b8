use std::f64::consts::PI;

use num_complex::Complex64 as C64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

use crate::error::{domain, Result};

/// One complex Lorentzian A e^(i phi) G / (G + i (f - f0)). G is the half width (Hz).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LorentzianComponent {
    pub amplitude: f64,
    pub linewidth: f64,
    pub center: f64,
    pub phase: f64,
}

/// Wrap into (-pi, pi].
pub fn wrap_phase(phi: f64) -> f64 {
    let mut p = phi.rem_euclid(2.0 * PI);
    if p > PI {
        p -= 2.0 * PI;
    }
    p
}

impl LorentzianComponent {
    /// Negative amplitudes are folded into the phase.
    pub fn new(amplitude: f64, linewidth: f64, center: f64, phase: f64) -> Result<Self> {
        if !(linewidth > 0.0) || !linewidth.is_finite() {
            return Err(domain(format!("linewidth must be > 0, got {linewidth}")));
        }
        if !amplitude.is_finite() || !center.is_finite() || !phase.is_finite() {
            return Err(domain("component parameters must be finite"));
        }
        let (a, p) = if amplitude < 0.0 { (-amplitude, phase + PI) } else { (amplitude, phase) };
        Ok(Self { amplitude: a, linewidth, center, phase: wrap_phase(p) })
    }

    pub fn value(&self, f: f64) -> C64 {
        let l = self.linewidth / C64::new(self.linewidth, f - self.center);
        C64::from_polar(self.amplitude, self.phase) * l
    }

    /// Full width at half maximum of |value|^2 (Hz).
    pub fn fwhm(&self) -> f64 {
        2.0 * self.linewidth
    }
}

/// Lock-in spectrum on a frequency grid (Hz).
#[derive(Debug, Clone, PartialEq)]
pub struct Spectrum {
    pub freq: Vec<f64>,
    pub x: Vec<f64>,
    pub y: Vec<f64>,
    /// Noise standard deviation per quadrature; 0 when unknown.
    pub noise: f64,
}

impl Spectrum {
    pub fn new(freq: Vec<f64>, x: Vec<f64>, y: Vec<f64>, noise: f64) -> Result<Self> {
        check_grid(&freq)?;
        if x.len() != freq.len() || y.len() != freq.len() {
            return Err(domain("X and Y must have the same length as the frequency grid"));
        }
        Ok(Self { freq, x, y, noise })
    }

    pub fn len(&self) -> usize {
        self.freq.len()
    }

    pub fn is_empty(&self) -> bool {
        self.freq.is_empty()
    }

    pub fn point(&self, i: usize) -> C64 {
        C64::new(self.x[i], self.y[i])
    }
}

fn check_grid(freq: &[f64]) -> Result<()> {
    if freq.is_empty() {
        return Err(domain("frequency grid is empty"));
    }
    if freq.windows(2).any(|w| !(w[1] > w[0])) {
        return Err(domain("frequency grid must be strictly increasing"));
    }
    Ok(())
}

/// Uniform grid of `n` points on [a, b].
pub fn linear_grid(a: f64, b: f64, n: usize) -> Vec<f64> {
    if n == 1 {
        return vec![a];
    }
    (0..n).map(|i| a + (b - a) * i as f64 / (n - 1) as f64).collect()
}

pub fn model(components: &[LorentzianComponent], background: C64, f: f64) -> C64 {
    components.iter().map(|c| c.value(f)).sum::<C64>() + background
}

/// Sum of components plus background, with seeded Gaussian noise of standard
/// deviation `noise` on X and Y.
pub fn synthesize_spectrum(
    components: &[LorentzianComponent],
    background: C64,
    grid: &[f64],
    noise: f64,
    seed: u64,
) -> Result<Spectrum> {
    check_grid(grid)?;
    if !(noise >= 0.0) {
        return Err(domain(format!("noise must be >= 0, got {noise}")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let dist = Normal::new(0.0, noise).map_err(|e| domain(e.to_string()))?;
    let mut x = Vec::with_capacity(grid.len());
    let mut y = Vec::with_capacity(grid.len());
    for &f in grid {
        let z = model(components, background, f);
        let (nx, ny) = if noise > 0.0 { (dist.sample(&mut rng), dist.sample(&mut rng)) } else { (0.0, 0.0) };
        x.push(z.re + nx);
        y.push(z.im + ny);
    }
    Spectrum::new(grid.to_vec(), x, y, noise)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn on_resonance_and_half_power() {
        let c = LorentzianComponent::new(2.0, 5.0, 1000.0, 0.0).unwrap();
        let bg = C64::new(0.1, -0.2);
        let s = synthesize_spectrum(&[c], bg, &[995.0, 1000.0, 1005.0], 0.0, 1).unwrap();
        assert!((s.point(1) - bg - 2.0).norm() < 1e-15);
        for i in [0, 2] {
            assert!(((s.point(i) - bg).norm() - 2.0 / 2f64.sqrt()).abs() < 1e-14);
        }
    }

    #[test]
    fn negative_amplitude_folds_into_phase() {
        let c = LorentzianComponent::new(-1.0, 1.0, 0.0, 0.5).unwrap();
        assert_eq!(c.amplitude, 1.0);
        assert!((c.phase - (0.5 - PI)).abs() < 1e-15);
        assert!((wrap_phase(PI) - PI).abs() < 1e-15);
        assert!((wrap_phase(-PI) - PI).abs() < 1e-15);
        assert!(LorentzianComponent::new(1.0, 0.0, 0.0, 0.0).is_err());
    }

    #[test]
    fn noise_is_seeded() {
        let c = LorentzianComponent::new(1.0, 5.0, 1000.0, 0.0).unwrap();
        let g = linear_grid(950.0, 1050.0, 101);
        let zero = C64::new(0.0, 0.0);
        let a = synthesize_spectrum(&[c], zero, &g, 0.01, 42).unwrap();
        let b = synthesize_spectrum(&[c], zero, &g, 0.01, 42).unwrap();
        let d = synthesize_spectrum(&[c], zero, &g, 0.01, 43).unwrap();
        assert_eq!(a, b);
        assert_ne!(a, d);
        assert!(synthesize_spectrum(&[c], zero, &[1.0, 1.0], 0.0, 1).is_err());
    }
}
