//! Pump-power sweep of the driven two-mode system.

use std::f64::consts::PI;
use std::fmt;

use num_complex::Complex64 as C64;
use rayon::prelude::*;

use super::propagate::driven_from_rest;
use super::system::CoupledSystem;
use crate::eigenmodes::{
    solve_box_modes, solve_mode, Cell, CellIntegrator, Mode, ModeIndex, QuadratureOrder, SampledMode,
};
use crate::error::{domain, Error, Result};
use crate::gas::{
    diffusion_coefficient, magnetization_proxy, optical_thickness, pump_polarization, total_decoherence_rate,
    vapor_density, GasSpec, RateTable, N_REF,
};
use crate::optics::{coupling_j, Axis, BeamField, BeamSpec};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Regime {
    Independent,
    Coupled,
}

impl Regime {
    pub fn classify(j_over_delta: f64) -> Self {
        if j_over_delta > 1.0 {
            Regime::Coupled
        } else {
            Regime::Independent
        }
    }
}

impl fmt::Display for Regime {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Regime::Independent => "independent",
            Regime::Coupled => "coupled",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepPoint {
    /// Pump power (W).
    pub power: f64,
    /// Excitation numbers.
    pub n: [f64; 2],
    /// Eigenfrequencies assigned to the two modes (Hz).
    pub frequency: [f64; 2],
    /// Eigen-linewidths assigned to the two modes (Hz, half width).
    pub linewidth: [f64; 2],
    /// Phase of each mode amplitude at the end of the drive (rad).
    pub phase: [f64; 2],
    /// |J| (1/s).
    pub j_abs: f64,
    pub j_over_delta: f64,
    pub regime: Regime,
    /// Uncoupled diagonal frequencies (Hz), before mixing by J.
    pub bare_frequency: [f64; 2],
    /// Uncoupled linewidths (Hz).
    pub bare_linewidth: [f64; 2],
    pub polarization: f64,
}

/// Everything a pump sweep needs. Build through [`SweepScenario::builder`].
#[derive(Debug, Clone, PartialEq)]
pub struct SweepScenario {
    pub cell: Cell,
    pub gas: GasSpec,
    pub rates: RateTable,
    /// Cell temperature (K).
    pub temperature: f64,
    /// Ascending pump powers (W).
    pub powers: Vec<f64>,
    /// Pump rms waist (m) and transverse offset (m).
    pub pump_waist: f64,
    pub pump_offset: [f64; 2],
    /// Pump saturation power (W).
    pub p_sat: f64,
    /// |J| = j_scale (N_A / N_REF) p_A (1/s).
    pub j_scale: f64,
    /// Field gradient amplitude (T/m); sets the phase of J.
    pub gradient: C64,
    /// Light shift per effective intensity (rad/s per W/m^2).
    pub kappa_shift: f64,
    /// Power broadening per effective intensity (1/s per W/m^2).
    pub kappa_broad: f64,
    /// Spin-exchange shift per unit M / N_REF (rad/s), opposite in sign to the light shift.
    pub kappa_se: f64,
    /// Gain per mode.
    pub eta: [f64; 2],
    /// Drive duration (s).
    pub t_int: f64,
    /// Larmor frequency (Hz).
    pub larmor: f64,
    /// Mode pair; `None` picks the default pair for the geometry.
    pub modes: Option<[ModeIndex; 2]>,
    pub order: QuadratureOrder,
}

#[derive(Debug, Clone, Default)]
pub struct SweepScenarioBuilder {
    pub cell: Option<Cell>,
    pub gas: Option<GasSpec>,
    pub rates: Option<RateTable>,
    pub temperature: Option<f64>,
    pub powers: Option<Vec<f64>>,
    pub pump_waist: Option<f64>,
    pub pump_offset: Option<[f64; 2]>,
    pub p_sat: Option<f64>,
    pub j_scale: Option<f64>,
    pub gradient: Option<C64>,
    pub kappa_shift: Option<f64>,
    pub kappa_broad: Option<f64>,
    pub kappa_se: Option<f64>,
    pub eta: Option<[f64; 2]>,
    pub t_int: Option<f64>,
    pub larmor: Option<f64>,
    pub modes: Option<[ModeIndex; 2]>,
    pub order: Option<QuadratureOrder>,
}

macro_rules! setters {
    ($($name:ident: $t:ty),* $(,)?) => {
        $(pub fn $name(mut self, v: $t) -> Self {
            self.$name = Some(v);
            self
        })*
    };
}

impl SweepScenarioBuilder {
    setters!(
        cell: Cell,
        gas: GasSpec,
        rates: RateTable,
        temperature: f64,
        powers: Vec<f64>,
        pump_waist: f64,
        pump_offset: [f64; 2],
        p_sat: f64,
        j_scale: f64,
        gradient: C64,
        kappa_shift: f64,
        kappa_broad: f64,
        kappa_se: f64,
        eta: [f64; 2],
        t_int: f64,
        larmor: f64,
        modes: [ModeIndex; 2],
        order: QuadratureOrder,
    );

    /// Gas, rates, offset, mode pair and quadrature order have defaults; the
    /// physical constants of the sweep do not.
    pub fn build(self) -> Result<SweepScenario> {
        let mut missing = Vec::new();
        macro_rules! need {
            ($name:ident, $key:literal) => {
                match self.$name {
                    Some(v) => v,
                    None => {
                        missing.push($key);
                        Default::default()
                    }
                }
            };
        }
        let cell: Option<Cell> = self.cell;
        if cell.is_none() {
            missing.push("cell");
        }
        let temperature = need!(temperature, "temperature");
        let powers: Vec<f64> = need!(powers, "sweep.powers");
        let pump_waist = need!(pump_waist, "pump.waist");
        let p_sat = need!(p_sat, "pump.p_sat");
        let j_scale = need!(j_scale, "couple.j_scale");
        let gradient: C64 = need!(gradient, "couple.gradient");
        let kappa_shift = need!(kappa_shift, "couple.kappa_shift");
        let kappa_broad = need!(kappa_broad, "couple.kappa_broad");
        let kappa_se = need!(kappa_se, "couple.kappa_se");
        let eta: [f64; 2] = need!(eta, "couple.eta");
        let t_int = need!(t_int, "couple.t_int");
        let larmor = need!(larmor, "couple.larmor");
        if !missing.is_empty() {
            return Err(Error::Config(format!("missing required keys: {}", missing.join(", "))));
        }
        let s = SweepScenario {
            cell: cell.unwrap(),
            gas: self.gas.unwrap_or_default(),
            rates: self.rates.unwrap_or_default(),
            temperature,
            powers,
            pump_waist,
            pump_offset: self.pump_offset.unwrap_or([0.0, 0.0]),
            p_sat,
            j_scale,
            gradient,
            kappa_shift,
            kappa_broad,
            kappa_se,
            eta,
            t_int,
            larmor,
            modes: self.modes,
            order: self.order.unwrap_or_default(),
        };
        s.validate()?;
        Ok(s)
    }
}

impl SweepScenario {
    pub fn builder() -> SweepScenarioBuilder {
        SweepScenarioBuilder::default()
    }

    pub fn validate(&self) -> Result<()> {
        self.gas.validate()?;
        self.rates.validate()?;
        if self.powers.is_empty() {
            return Err(domain("power grid is empty"));
        }
        if self.powers.iter().any(|p| !(*p >= 0.0)) {
            return Err(domain("pump powers must be >= 0"));
        }
        if self.powers.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(domain("power grid must be strictly ascending"));
        }
        if !(self.temperature > 0.0) {
            return Err(domain(format!("temperature must be > 0 K, got {}", self.temperature)));
        }
        if !(self.pump_waist > 0.0 && self.p_sat > 0.0) {
            return Err(domain("pump waist and saturation power must be > 0"));
        }
        if !(self.t_int > 0.0) {
            return Err(domain(format!("T_int must be > 0, got {}", self.t_int)));
        }
        if !(self.j_scale >= 0.0 && self.kappa_broad >= 0.0) {
            return Err(domain("j_scale and kappa_broad must be >= 0"));
        }
        Ok(())
    }

    /// The two modes of the sweep. A sphere uses the uniform-like s000 and the
    /// z dipole s01z. A box uses its lowest mode and the next one the centred pump
    /// can excite.
    pub fn mode_pair(&self) -> Result<[ModeIndex; 2]> {
        if let Some(m) = self.modes {
            return Ok(m);
        }
        match self.cell {
            Cell::Sphere { .. } => Ok([ModeIndex::sphere(0, 0, 0)?, ModeIndex::sphere(0, 1, 0)?]),
            Cell::Box { .. } => {
                let odd = |i: &ModeIndex| matches!(*i, ModeIndex::Box { nx, ny, nz } if nx % 2 == 1 && ny % 2 == 1 && nz % 2 == 1);
                let list = solve_box_modes(&self.cell, 64)?;
                let mut pick = list.iter().map(|(i, _)| *i).filter(odd);
                match (pick.next(), pick.next()) {
                    (Some(a), Some(b)) => Ok([a, b]),
                    _ => Err(domain("box has fewer than two pump-coupled modes in range")),
                }
            }
        }
    }
}

/// Per-scenario state shared by all power points.
pub struct SweepContext {
    pub scenario: SweepScenario,
    pub integrator: CellIntegrator,
    pub modes: [Mode; 2],
    samples: [SampledMode; 2],
    pub density: f64,
    pub diffusion: f64,
    /// Phase factor of J from the gradient geometry; zero when the geometry forbids coupling.
    pub j_phase: C64,
}

impl SweepContext {
    pub fn new(scenario: &SweepScenario) -> Result<Self> {
        scenario.validate()?;
        let s = scenario.clone();
        let density = vapor_density(s.temperature, &s.gas)?;
        let diffusion = diffusion_coefficient(s.temperature, &s.gas)?;
        let gamma0 = total_decoherence_rate(&s.rates);
        let [i1, i2] = s.mode_pair()?;
        let m1 = solve_mode(&s.cell, i1, diffusion, gamma0)?;
        let m2 = solve_mode(&s.cell, i2, diffusion, gamma0)?;
        let integrator = CellIntegrator::new(&s.cell, s.order)?;
        let j_geom = coupling_j(s.gradient, s.gas.gyro, &m1, &m2, &integrator)?;
        let scale = s.gas.gyro * s.gradient.norm() * s.cell.characteristic_length();
        let j_phase = if j_geom.norm() > 1e-10 * scale { j_geom / j_geom.norm() } else { C64::new(0.0, 0.0) };
        let samples = [integrator.sample(&m1)?, integrator.sample(&m2)?];
        Ok(Self { scenario: s, integrator, modes: [m1, m2], samples, density, diffusion, j_phase })
    }

    /// Integral of s1 z s2 over the cell (m).
    pub fn z_overlap(&self) -> f64 {
        let z = self.integrator.field(|p| p[2]);
        self.integrator.rule().dot(&[&self.samples[0].values, &self.samples[1].values, &z])
    }

    /// Coupled system and gains at pump power `power`.
    /// Sampled profiles of the two modes.
    pub fn samples(&self) -> &[SampledMode; 2] {
        &self.samples
    }

    /// Pump field at `power` and `waist` with bleached attenuation, and the polarization p_A.
    pub fn pump_field(&self, power: f64, waist: f64) -> Result<(BeamField, f64)> {
        let s = &self.scenario;
        let p_a = pump_polarization(power, s.p_sat)?;
        let length = s.cell.characteristic_length();
        let alpha = optical_thickness(self.density, &s.gas, length) / (2.0 * length) * (1.0 - p_a);
        let beam = BeamSpec { axis: Axis::Z, waist, offset: s.pump_offset, power, attenuation: alpha };
        Ok((BeamField::new(&beam, &self.integrator)?, p_a))
    }

    pub fn system_at(&self, power: f64) -> Result<(CoupledSystem, f64)> {
        let s = &self.scenario;
        let (field, p_a) = self.pump_field(power, s.pump_waist)?;
        let m_se = magnetization_proxy(&s.gas, self.density, p_a) / N_REF;
        let omega_l = 2.0 * PI * s.larmor;
        let mut diag = [C64::new(0.0, 0.0); 2];
        let mut gain = [C64::new(0.0, 0.0); 2];
        for k in 0..2 {
            let ieff = field.effective_intensity(&self.samples[k], &self.integrator);
            let c = field.projection(&self.samples[k], &self.integrator);
            let gamma = self.modes[k].decay_rate + s.kappa_broad * ieff;
            let omega = omega_l + s.kappa_shift * ieff - s.kappa_se * m_se;
            diag[k] = C64::new(-gamma, omega);
            gain[k] = C64::new(s.eta[k] * p_a * c, 0.0);
        }
        let j = self.j_phase * (s.j_scale * self.density / N_REF * p_a);
        Ok((CoupledSystem::from_diagonal(diag[0], diag[1], j, gain), p_a))
    }

    pub fn point(&self, power: f64) -> Result<SweepPoint> {
        let (sys, p_a) = self.system_at(power)?;
        let omega = sys.omega();
        let gamma = sys.gamma();
        let mut n = [0.0; 2];
        let mut phase = [0.0; 2];
        for k in 0..2 {
            // drive resonant with mode k
            let c = driven_from_rest(&sys.in_frame(omega[k]), self.scenario.t_int)?.c[k];
            n[k] = PI * c.norm() * gamma[k] / (2.0 * PI);
            phase[k] = if c.norm() > 0.0 { c.arg() } else { 0.0 };
        }
        let passive = sys.without_gain();
        let ev = passive.eigenvalues().values;
        let w0 = passive.eigenvector(ev[0])[0].norm_sqr();
        let w1 = passive.eigenvector(ev[1])[0].norm_sqr();
        let assigned = if w0 >= w1 { ev } else { [ev[1], ev[0]] };
        let delta = sys.delta.norm();
        let j_abs = sys.j.norm();
        let j_over_delta = if j_abs == 0.0 {
            0.0
        } else if delta == 0.0 {
            f64::INFINITY
        } else {
            j_abs / delta
        };
        let hz = |x: f64| x / (2.0 * PI);
        Ok(SweepPoint {
            power,
            n,
            frequency: [hz(assigned[0].im), hz(assigned[1].im)],
            linewidth: [hz(-assigned[0].re), hz(-assigned[1].re)],
            phase,
            j_abs,
            j_over_delta,
            regime: Regime::classify(j_over_delta),
            bare_frequency: [hz(omega[0]), hz(omega[1])],
            bare_linewidth: [hz(gamma[0]), hz(gamma[1])],
            polarization: p_a,
        })
    }
}

/// Run the sweep; points come back in power-grid order.
pub fn pump_sweep(scenario: &SweepScenario) -> Result<Vec<SweepPoint>> {
    let ctx = SweepContext::new(scenario)?;
    ctx.scenario.powers.par_iter().map(|&p| ctx.point(p)).collect()
}
