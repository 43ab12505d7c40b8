//! Alkali vapor and buffer-gas model: density, diffusion, relaxation budget,
//! optical thickness, pump polarization and the dirty-wall radius.

use crate::eigenmodes::Cell;
use crate::error::{domain, Result};

/// Boltzmann constant (J/K).
pub const K_B: f64 = 1.380649e-23;
/// Pascal per torr.
pub const TORR: f64 = 133.322_368_421;
pub const P_REF_TORR: f64 = 760.0;
pub const T_REF: f64 = 273.15;
/// Density scale of the dirty-wall law (1/m^3).
pub const N_REF: f64 = 1e18;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GasSpec {
    /// Buffer gas pressure (torr).
    pub buffer_pressure: f64,
    /// Quench gas pressure (torr).
    pub quench_pressure: f64,
    /// log10 P[torr] = A - B/T.
    pub vapor_a: f64,
    pub vapor_b: f64,
    /// Diffusion coefficient at 760 torr and 273.15 K (m^2/s).
    pub d_ref: f64,
    /// On-resonance scattering cross-section (m^2).
    pub sigma: f64,
    /// Spin-exchange coefficient (normalized units).
    pub k_se: f64,
    /// Gyromagnetic ratio (rad/s/T).
    pub gyro: f64,
}

impl Default for GasSpec {
    /// Cesium in 500 torr neon with 20 torr N2. The vapor constants are the
    /// liquid-cesium fit log10 P[atm] = 4.165 - 3830/T shifted to torr.
    fn default() -> Self {
        Self {
            buffer_pressure: 500.0,
            quench_pressure: 20.0,
            vapor_a: 4.165 + P_REF_TORR.log10(),
            vapor_b: 3830.0,
            d_ref: 1.5e-5,
            sigma: 1e-16,
            k_se: 1.0,
            gyro: 2.0 * std::f64::consts::PI * 3.4986e9,
        }
    }
}

impl GasSpec {
    pub fn validate(&self) -> Result<()> {
        if !(self.buffer_pressure >= 0.0 && self.quench_pressure >= 0.0) {
            return Err(domain("gas pressures must be >= 0"));
        }
        if !(self.d_ref > 0.0) {
            return Err(domain(format!("D_ref must be > 0, got {}", self.d_ref)));
        }
        if !(self.sigma > 0.0) {
            return Err(domain(format!("cross-section must be > 0, got {}", self.sigma)));
        }
        Ok(())
    }
}

/// Relaxation rates (1/s) and the two dimensionless factors that weight them.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RateTable {
    pub sd_cs_ne: f64,
    pub sd_cs_n2: f64,
    pub sd_cs_cs: f64,
    pub se_cs_ne: f64,
    pub se_cs_cs: f64,
    pub pumping: f64,
    pub gradient: f64,
    /// Slowing-down factor.
    pub epsilon: f64,
    pub q_se: f64,
}

impl Default for RateTable {
    fn default() -> Self {
        Self {
            sd_cs_ne: 1.0,
            sd_cs_n2: 1.5,
            sd_cs_cs: 0.5,
            se_cs_ne: 0.0,
            se_cs_cs: 1.0,
            pumping: 0.5,
            gradient: 0.1,
            epsilon: 5.0,
            q_se: 5.0,
        }
    }
}

impl RateTable {
    pub fn validate(&self) -> Result<()> {
        let rates =
            [self.sd_cs_ne, self.sd_cs_n2, self.sd_cs_cs, self.se_cs_ne, self.se_cs_cs, self.pumping, self.gradient];
        if rates.iter().any(|r| !(*r >= 0.0)) {
            return Err(domain("relaxation rates must be >= 0"));
        }
        if !(self.epsilon > 0.0 && self.q_se > 0.0) {
            return Err(domain("epsilon and q_SE must be > 0"));
        }
        Ok(())
    }
}

/// Alkali number density (1/m^3) from the vapor-pressure law.
pub fn vapor_density(t: f64, gas: &GasSpec) -> Result<f64> {
    if !(t > 0.0) {
        return Err(domain(format!("temperature must be > 0 K, got {t}")));
    }
    let p_torr = 10f64.powf(gas.vapor_a - gas.vapor_b / t);
    Ok(p_torr * TORR / (K_B * t))
}

/// D = D_ref (760 torr / P_buffer) (T / 273.15 K)^1.5.
pub fn diffusion_coefficient(t: f64, gas: &GasSpec) -> Result<f64> {
    if !(gas.buffer_pressure > 0.0) {
        return Err(domain("diffusion needs a buffer pressure > 0"));
    }
    if !(t > 0.0) {
        return Err(domain(format!("temperature must be > 0 K, got {t}")));
    }
    Ok(gas.d_ref * (P_REF_TORR / gas.buffer_pressure) * (t / T_REF).powf(1.5))
}

pub fn total_decoherence_rate(r: &RateTable) -> f64 {
    (r.sd_cs_ne + r.sd_cs_n2 + r.sd_cs_cs + r.se_cs_ne + r.pumping) / r.epsilon + r.se_cs_cs / r.q_se + r.gradient
}

/// b0 = 2 N_A sigma R.
pub fn optical_thickness(density: f64, gas: &GasSpec, length: f64) -> f64 {
    2.0 * density * gas.sigma * length
}

/// p_A = P / (P + P_sat).
pub fn pump_polarization(power: f64, p_sat: f64) -> Result<f64> {
    if !(power >= 0.0) || !(p_sat > 0.0) {
        return Err(domain(format!("need P >= 0 and P_sat > 0, got P={power}, P_sat={p_sat}")));
    }
    Ok(power / (power + p_sat))
}

/// M = k_SE N_A p_A.
pub fn magnetization_proxy(gas: &GasSpec, density: f64, p_a: f64) -> f64 {
    gas.k_se * density * p_a
}

/// R / (1 + eta N_A(T) / N_REF). Box cells return their characteristic length.
pub fn effective_radius(t: f64, cell: &Cell, gas: &GasSpec, eta: f64) -> Result<f64> {
    if !(eta >= 0.0) {
        return Err(domain(format!("dirty-wall coefficient must be >= 0, got {eta}")));
    }
    Ok(cell.characteristic_length() / (1.0 + eta * vapor_density(t, gas)? / N_REF))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_constants_give_one_torr() {
        let g = GasSpec { vapor_a: 0.0, vapor_b: 0.0, ..Default::default() };
        let t = 300.0;
        assert!((vapor_density(t, &g).unwrap() - TORR / (K_B * t)).abs() < 1e-3);
    }

    #[test]
    fn density_hand_evaluation() {
        let g = GasSpec { vapor_a: 4.165, vapor_b: 3830.0, ..Default::default() };
        let t = 333.15;
        let want = 10f64.powf(4.165 - 3830.0 / 333.15) * 133.322368421 / (1.380649e-23 * 333.15);
        assert!((vapor_density(t, &g).unwrap() / want - 1.0).abs() < 1e-14);
        assert!(vapor_density(t + 10.0, &g).unwrap() > vapor_density(t, &g).unwrap());
    }

    #[test]
    fn default_density_is_physical() {
        // about 1e12 cm^-3 at 60 C
        let n = vapor_density(333.15, &GasSpec::default()).unwrap();
        assert!(n > 5e17 && n < 2e18, "{n}");
    }

    #[test]
    fn diffusion_scaling() {
        let g = GasSpec { buffer_pressure: 760.0, d_ref: 2e-5, ..Default::default() };
        assert!((diffusion_coefficient(T_REF, &g).unwrap() - 2e-5).abs() < 1e-20);
        let h = GasSpec { buffer_pressure: 380.0, ..g };
        assert!((diffusion_coefficient(T_REF, &h).unwrap() - 4e-5).abs() < 1e-19);
        let e = GasSpec { buffer_pressure: 500.0, ..g };
        let want = 2.0e-5 * (760.0 / 500.0) * (333.15f64 / 273.15).powf(1.5);
        assert!((diffusion_coefficient(333.15, &e).unwrap() - want).abs() < 1e-18);
        assert!((want - 4.09e-5).abs() < 0.01e-5);
        let z = GasSpec { buffer_pressure: 0.0, ..g };
        assert!(diffusion_coefficient(300.0, &z).is_err());
    }

    #[test]
    fn decoherence_budget() {
        let zero = RateTable {
            sd_cs_ne: 0.0,
            sd_cs_n2: 0.0,
            sd_cs_cs: 0.0,
            se_cs_ne: 0.0,
            se_cs_cs: 0.0,
            pumping: 0.0,
            gradient: 0.0,
            epsilon: 3.0,
            q_se: 2.0,
        };
        assert_eq!(total_decoherence_rate(&zero), 0.0);
        let ones = RateTable {
            sd_cs_ne: 1.0,
            sd_cs_n2: 1.0,
            sd_cs_cs: 1.0,
            se_cs_ne: 1.0,
            se_cs_cs: 1.0,
            pumping: 1.0,
            gradient: 1.0,
            epsilon: 1.0,
            q_se: 1.0,
        };
        assert_eq!(total_decoherence_rate(&ones), 7.0);
        let mixed = RateTable { epsilon: 2.0, q_se: 4.0, se_cs_cs: 8.0, gradient: 0.5, ..ones };
        // five unit rates inside the 1/epsilon bracket: 5/2 + 8/4 + 0.5
        assert_eq!(total_decoherence_rate(&mixed), 5.0);
        let no_pump = RateTable { pumping: 0.0, ..mixed };
        assert_eq!(total_decoherence_rate(&no_pump), 4.5);
        assert!((total_decoherence_rate(&RateTable::default()) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn thickness_and_polarization() {
        let g = GasSpec { sigma: 1e-13, ..Default::default() };
        assert_eq!(optical_thickness(0.0, &g, 0.01), 0.0);
        assert!((optical_thickness(1e17, &g, 0.01) - 200.0).abs() < 1e-9);
        assert_eq!(pump_polarization(0.0, 1e-3).unwrap(), 0.0);
        assert_eq!(pump_polarization(1e-3, 1e-3).unwrap(), 0.5);
        assert!((pump_polarization(9e-3, 1e-3).unwrap() - 0.9).abs() < 1e-15);
        assert!(pump_polarization(1.0, 0.0).is_err());
        let g2 = GasSpec { k_se: 2.0, ..Default::default() };
        assert_eq!(magnetization_proxy(&g2, 3.0, 0.5), 3.0);
    }

    #[test]
    fn dirty_wall_radius() {
        let cell = Cell::sphere(0.01, 0.0, 1.0).unwrap();
        let g = GasSpec::default();
        assert_eq!(effective_radius(333.15, &cell, &g, 0.0).unwrap(), 0.01);
        let eta = N_REF / vapor_density(333.15, &g).unwrap();
        assert!((effective_radius(333.15, &cell, &g, eta).unwrap() - 0.005).abs() < 1e-15);
        assert!(effective_radius(343.15, &cell, &g, 0.1).unwrap() < effective_radius(333.15, &cell, &g, 0.1).unwrap());
    }
}
