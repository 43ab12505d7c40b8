//! Release gate: orthogonality, parity, propagator and fit checks with timings.

use std::fmt;
use std::time::{Duration, Instant};

use num_complex::Complex64 as C64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::dynamics::{evolve_closed_form, evolve_rk, CoupledSystem, ModeAmplitudes};
use crate::eigenmodes::{Cell, CellIntegrator, ModeCatalog, ModeIndex, QuadratureOrder};
use crate::error::Result;
use crate::optics::{coupling_j, Axis, BeamField, BeamSpec};
use crate::signal::{fit_lorentzians, linear_grid, synthesize_spectrum, LorentzianComponent};

pub const OVERLAP_TOL: f64 = 1e-8;
pub const PARITY_TOL: f64 = 1e-10;
pub const PROPAGATOR_TOL: f64 = 1e-8;
pub const SEMIGROUP_TOL: f64 = 1e-10;
/// Relative tolerance of the RK oracle, two orders below the comparison tolerance.
pub const ORACLE_RTOL: f64 = 1e-12;

#[derive(Debug, Clone)]
pub struct Check {
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
    pub elapsed: Duration,
}

#[derive(Debug, Clone)]
pub struct Report {
    pub checks: Vec<Check>,
    pub total: Duration,
}

impl Report {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }
}

impl fmt::Display for Report {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for c in &self.checks {
            writeln!(
                f,
                "{} {:<14} {:>8.3} s  {}",
                if c.passed { "PASS" } else { "FAIL" },
                c.name,
                c.elapsed.as_secs_f64(),
                c.detail
            )?;
        }
        write!(f, "total {:.3} s, {}", self.total.as_secs_f64(), if self.passed() { "all passed" } else { "FAILED" })
    }
}

fn timed(name: &'static str, f: impl FnOnce() -> Result<(bool, String)>) -> Check {
    let t = Instant::now();
    let (passed, detail) = f().unwrap_or_else(|e| (false, format!("error: {e}")));
    Check { name, passed, detail, elapsed: t.elapsed() }
}

/// Largest |<s_i|s_j> - delta_ij| over sphere modes up to l = 2, two radial roots.
pub fn orthogonality() -> Result<(bool, String)> {
    let cell = Cell::sphere(0.01, 2e-4, 1.0)?;
    let cat = ModeCatalog::solve(&cell, 2, 2, 1.0, 0.0)?;
    let q = CellIntegrator::new(&cell, QuadratureOrder::default())?;
    let s: Vec<_> = cat.modes().iter().map(|m| q.sample(m)).collect::<Result<_>>()?;
    let mut worst = 0.0f64;
    for i in 0..s.len() {
        for j in 0..=i {
            let v = q.rule().dot(&[&s[i].values, &s[j].values]);
            worst = worst.max((v - if i == j { 1.0 } else { 0.0 }).abs());
        }
    }
    Ok((worst < OVERLAP_TOL, format!("{} modes, max deviation {worst:.2e}", s.len())))
}

/// Centred pump projections onto m != 0 modes and z-gradient couplings between
/// modes of equal z parity; both must vanish.
pub fn parity() -> Result<(bool, String)> {
    let cell = Cell::sphere(0.01, 2e-4, 1.0)?;
    let cat = ModeCatalog::solve(&cell, 2, 2, 1.0, 0.0)?;
    let q = CellIntegrator::new(&cell, QuadratureOrder::default())?;
    let pump = BeamSpec::new(Axis::Z, 0.004, 1e-3)?;
    let field = BeamField::new(&pump, &q)?;
    let mut worst_c = 0.0f64;
    let mut worst_j = 0.0f64;
    let z_parity = |i: &ModeIndex| match *i {
        ModeIndex::Sphere { l, m, .. } => (l as i32 - m.abs()) % 2,
        ModeIndex::Box { nz, .. } => ((nz + 1) % 2) as i32,
    };
    // a centred pump along z is axially symmetric, so every m != 0 projection
    // vanishes; measured relative to the fundamental mode's projection
    let c0 = field.projection(&q.sample(&cat.modes()[0])?, &q).abs();
    for m in cat.modes() {
        let ModeIndex::Sphere { m: mm, .. } = m.index else { continue };
        if mm != 0 {
            let s = q.sample(m)?;
            worst_c = worst_c.max(field.projection(&s, &q).abs() / c0);
        }
    }
    let g = C64::new(1e-9, 0.0);
    let gyro = 2.0 * std::f64::consts::PI * 3.4986e9;
    let modes = cat.modes();
    for a in modes {
        for b in modes {
            if z_parity(&a.index) == z_parity(&b.index) {
                let j = coupling_j(g, gyro, a, b, &q)?.norm() / (gyro * g.norm() * 0.01);
                worst_j = worst_j.max(j);
            }
        }
    }
    Ok((
        worst_c < PARITY_TOL && worst_j < PARITY_TOL,
        format!("max forbidden projection {worst_c:.2e}, max forbidden |J|/(gamma G R) {worst_j:.2e}"),
    ))
}

/// Closed form against RK on 100 random passive systems, plus the semigroup property.
pub fn propagator(seed: u64) -> Result<(bool, String)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut worst = 0.0f64;
    let mut worst_semi = 0.0f64;
    for _ in 0..100 {
        let g1 = rng.random_range(0.5..5.0);
        let g2 = rng.random_range(0.5..10.0);
        let j = C64::new(rng.random_range(-8.0..8.0), rng.random_range(-8.0..8.0));
        let s = CoupledSystem::build(
            rng.random_range(-20.0..20.0),
            rng.random_range(-20.0..20.0),
            g1,
            g2,
            j,
            [C64::new(0.0, 0.0); 2],
        )?;
        let c0 = ModeAmplitudes::new(
            C64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)),
            C64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)),
        );
        let t_end = 5.0 / g1;
        for i in 1..=4 {
            let t = t_end * i as f64 / 4.0;
            let a = evolve_closed_form(&s, &c0, t)?;
            let b = evolve_rk(&s, &c0, t, ORACLE_RTOL)?;
            let n = a.c[0].norm().max(a.c[1].norm());
            for k in 0..2 {
                worst = worst.max((a.c[k] - b.c[k]).norm() / n);
            }
        }
        let (t1, t2) = (rng.random_range(0.0..t_end), rng.random_range(0.0..t_end));
        let whole = evolve_closed_form(&s, &c0, t1 + t2)?;
        let split = evolve_closed_form(&s, &evolve_closed_form(&s, &c0, t1)?, t2)?;
        let n = whole.c[0].norm().max(whole.c[1].norm());
        for k in 0..2 {
            worst_semi = worst_semi.max((whole.c[k] - split.c[k]).norm() / n);
        }
    }
    Ok((
        worst < PROPAGATOR_TOL && worst_semi < SEMIGROUP_TOL,
        format!("max closed-form vs RK {worst:.2e}, max semigroup {worst_semi:.2e}"),
    ))
}

/// Two-Lorentzian synthetic spectra at 1% noise; median relative error over seeds.
pub fn fit_round_trip(seeds: u64) -> Result<(bool, String)> {
    let truth = [LorentzianComponent::new(1.0, 5.0, 1000.0, 0.0)?, LorentzianComponent::new(0.4, 10.0, 1002.0, 0.3)?];
    let grid = linear_grid(940.0, 1060.0, 2001);
    let mut errs = vec![Vec::new(); 8];
    for seed in 0..seeds {
        let s = synthesize_spectrum(&truth, C64::new(0.0, 0.0), &grid, 0.01, seed)?;
        let f = fit_lorentzians(&s, 2)?;
        for (k, (g, w)) in f.components.iter().zip(&truth).enumerate() {
            for (i, e) in parameter_errors(g, w).into_iter().enumerate() {
                errs[4 * k + i].push(e);
            }
        }
    }
    let medians: Vec<f64> = errs.iter_mut().map(|v| median(v)).collect();
    let worst = medians.iter().cloned().fold(0.0, f64::max);
    Ok((worst < 0.05, format!("{seeds} seeds, worst median parameter error {worst:.3}")))
}

/// Relative errors of (A, Gamma), centre error in linewidths, phase error in radians.
pub fn parameter_errors(got: &LorentzianComponent, want: &LorentzianComponent) -> [f64; 4] {
    [
        (got.amplitude / want.amplitude - 1.0).abs(),
        (got.linewidth / want.linewidth - 1.0).abs(),
        (got.center - want.center).abs() / want.linewidth,
        crate::signal::wrap_phase(got.phase - want.phase).abs(),
    ]
}

pub fn median(v: &mut [f64]) -> f64 {
    v.sort_by(f64::total_cmp);
    let n = v.len();
    if n == 0 {
        return f64::NAN;
    }
    if n % 2 == 1 {
        v[n / 2]
    } else {
        0.5 * (v[n / 2 - 1] + v[n / 2])
    }
}

/// Run every check.
pub fn run(seed: u64) -> Report {
    let start = Instant::now();
    let checks = vec![
        timed("orthogonality", orthogonality),
        timed("parity", parity),
        timed("propagator", || propagator(seed)),
        timed("fit", || fit_round_trip(20)),
    ];
    Report { checks, total: start.elapsed() }
}
