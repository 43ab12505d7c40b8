//! Two-mode non-Hermitian dynamics, excitation numbers and pump sweeps.

pub mod propagate;
pub mod sweep;
pub mod system;

use std::f64::consts::PI;

pub use propagate::{driven_from_rest, evolve_closed_form, evolve_rk, RK_RTOL};
pub use sweep::{pump_sweep, Regime, SweepContext, SweepPoint, SweepScenario, SweepScenarioBuilder};
pub use system::{CoupledSystem, Eigenvalues, ModeAmplitudes, COALESCENCE_TOL};

use crate::signal::LorentzianComponent;

/// N = pi |A| Gamma, the frequency integral of |L(f)|^2 / |A| for the complex
/// Lorentzian with half width Gamma (Hz).
pub fn excitation_number(component: &LorentzianComponent) -> f64 {
    PI * component.amplitude.abs() * component.linewidth
}

#[cfg(test)]
mod tests {
    use super::*;

    // Gauss-Legendre on panels over f0 +- span linewidths
    fn numeric(c: &LorentzianComponent, span: f64) -> f64 {
        let (x, w) = (
            [-0.906_179_845_938_664, -0.538_469_310_105_683, 0.0, 0.538_469_310_105_683, 0.906_179_845_938_664],
            [
                0.236_926_885_056_189,
                0.478_628_670_499_366,
                0.568_888_888_888_889,
                0.478_628_670_499_366,
                0.236_926_885_056_189,
            ],
        );
        let panels = 20_000;
        let a = c.center - span * c.linewidth;
        let h = 2.0 * span * c.linewidth / panels as f64;
        let mut sum = 0.0;
        for p in 0..panels {
            let mid = a + (p as f64 + 0.5) * h;
            for i in 0..5 {
                sum += 0.5 * h * w[i] * c.value(mid + 0.5 * h * x[i]).norm_sqr();
            }
        }
        sum / c.amplitude
    }

    #[test]
    fn zero_and_linear_in_amplitude() {
        let z = LorentzianComponent::new(0.0, 10.0, 0.0, 0.0).unwrap();
        assert_eq!(excitation_number(&z), 0.0);
        let a = LorentzianComponent::new(1.0, 10.0, 5.0, 0.3).unwrap();
        let b = LorentzianComponent::new(3.0, 10.0, 5.0, 0.3).unwrap();
        assert!((excitation_number(&b) - 3.0 * excitation_number(&a)).abs() < 1e-12);
    }

    #[test]
    fn matches_numeric_integral() {
        let c = LorentzianComponent::new(1.0, 10.0, 100.0, 0.0).unwrap();
        let n = excitation_number(&c);
        // a window of +-K linewidths holds a fraction (2/pi) atan K
        for span in [50.0f64, 500.0] {
            let window = 2.0 / PI * span.atan();
            assert!((numeric(&c, span) / (n * window) - 1.0).abs() < 1e-4);
        }
        assert!((numeric(&c, 500.0) / n - 1.0).abs() < 5e-3);
    }
}
