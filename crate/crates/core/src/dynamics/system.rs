use num_complex::Complex64 as C64;

use crate::error::{domain, Result};

/// Two coupled modes: d/dt c = M c + g with
/// M = [[E0 + Delta, J], [J, E0 - Delta]].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CoupledSystem {
    /// (i w1 - G1 + i w2 - G2) / 2
    pub e0: C64,
    /// (i w1 - G1 - i w2 + G2) / 2
    pub delta: C64,
    pub j: C64,
    pub gain: [C64; 2],
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModeAmplitudes {
    pub c: [C64; 2],
    /// Time (s).
    pub time: f64,
}

impl ModeAmplitudes {
    pub fn new(c1: C64, c2: C64) -> Self {
        Self { c: [c1, c2], time: 0.0 }
    }

    /// Everything in the first mode: c = (1, 0).
    pub fn first_mode() -> Self {
        Self::new(C64::new(1.0, 0.0), C64::new(0.0, 0.0))
    }

    pub fn norm_sqr(&self) -> f64 {
        self.c[0].norm_sqr() + self.c[1].norm_sqr()
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Eigenvalues {
    /// E0 +- sqrt(Delta^2 + J^2), descending real part, ties by descending imaginary part.
    pub values: [C64; 2],
    /// The pair has coalesced (exceptional point).
    pub coalesced: bool,
}

/// Relative size of sqrt(Delta^2 + J^2) below which the eigenvalues count as coalesced.
pub const COALESCENCE_TOL: f64 = 1e-12;

impl CoupledSystem {
    /// Frequencies in rad/s, linewidths in 1/s.
    pub fn build(omega1: f64, omega2: f64, gamma1: f64, gamma2: f64, j: C64, gain: [C64; 2]) -> Result<Self> {
        if !(gamma1 > 0.0 && gamma2 > 0.0) {
            return Err(domain(format!("linewidths must be > 0, got {gamma1}, {gamma2}")));
        }
        let a1 = C64::new(-gamma1, omega1);
        let a2 = C64::new(-gamma2, omega2);
        Ok(Self::from_diagonal(a1, a2, j, gain))
    }

    /// From the diagonal entries a_m = i w_m - G_m.
    pub fn from_diagonal(a1: C64, a2: C64, j: C64, gain: [C64; 2]) -> Self {
        Self { e0: 0.5 * (a1 + a2), delta: 0.5 * (a1 - a2), j, gain }
    }

    /// Diagonal entries (E0 + Delta, E0 - Delta).
    pub fn diagonal(&self) -> [C64; 2] {
        [self.e0 + self.delta, self.e0 - self.delta]
    }

    pub fn omega(&self) -> [f64; 2] {
        let d = self.diagonal();
        [d[0].im, d[1].im]
    }

    pub fn gamma(&self) -> [f64; 2] {
        let d = self.diagonal();
        [-d[0].re, -d[1].re]
    }

    pub fn matrix(&self) -> [[C64; 2]; 2] {
        let d = self.diagonal();
        [[d[0], self.j], [self.j, d[1]]]
    }

    pub fn has_gain(&self) -> bool {
        self.gain.iter().any(|g| g.norm() > 0.0)
    }

    pub fn without_gain(&self) -> Self {
        Self { gain: [C64::new(0.0, 0.0); 2], ..*self }
    }

    /// Exchange the mode labels.
    pub fn swapped(&self) -> Self {
        Self { delta: -self.delta, gain: [self.gain[1], self.gain[0]], ..*self }
    }

    /// Same system seen in a frame rotating at `omega` (rad/s).
    pub fn in_frame(&self, omega: f64) -> Self {
        Self { e0: self.e0 - C64::new(0.0, omega), ..*self }
    }

    /// mu = sqrt(Delta^2 + J^2), principal branch.
    pub fn mu(&self) -> C64 {
        (self.delta * self.delta + self.j * self.j).sqrt()
    }

    pub fn eigenvalues(&self) -> Eigenvalues {
        let mu = self.mu();
        let mut v = [self.e0 + mu, self.e0 - mu];
        let scale = v[0].norm() + v[1].norm();
        let tie = (v[0].re - v[1].re).abs() <= 1e-12 * scale;
        let swap = if tie { v[1].im > v[0].im } else { v[1].re > v[0].re };
        if swap {
            v.swap(0, 1);
        }
        Eigenvalues { values: v, coalesced: mu.norm() < COALESCENCE_TOL * self.e0.norm() }
    }

    /// Unit right eigenvector for eigenvalue `lambda`.
    pub fn eigenvector(&self, lambda: C64) -> [C64; 2] {
        let d = self.diagonal();
        // (M - lambda) v = 0: pick the better conditioned row.
        let r1 = [self.j, lambda - d[0]];
        let r2 = [lambda - d[1], self.j];
        let v = if r1[0].norm() + r1[1].norm() >= r2[0].norm() + r2[1].norm() { r1 } else { r2 };
        let n = (v[0].norm_sqr() + v[1].norm_sqr()).sqrt();
        if n == 0.0 {
            // M is a multiple of the identity: every vector is an eigenvector.
            return [C64::new(1.0, 0.0), C64::new(0.0, 0.0)];
        }
        [v[0] / n, v[1] / n]
    }

    pub(crate) fn apply(&self, c: &[C64; 2]) -> [C64; 2] {
        let d = self.diagonal();
        [d[0] * c[0] + self.j * c[1] + self.gain[0], self.j * c[0] + d[1] * c[1] + self.gain[1]]
    }
}
