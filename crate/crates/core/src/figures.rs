//! Figure reproductions as CSV tables.

use std::f64::consts::PI;
use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use num_complex::Complex64 as C64;
use rayon::prelude::*;

use crate::config::Scenario;
use crate::dynamics::{pump_sweep, CoupledSystem, ModeAmplitudes, SweepContext, SweepPoint, SweepScenario};
use crate::eigenmodes::{robin_roots, solve_mode, Cell, ModeIndex};
use crate::error::{Error, Result};
use crate::gas::{diffusion_coefficient, effective_radius, total_decoherence_rate};
use crate::optics::{slit_image, Axis, BeamSpec};
use crate::output::{Cell as V, Table};
use crate::signal::{
    asymptotic_linear_fit, fit_lorentzians, linear_grid, spearman, synthesize_spectrum, wrap_phase, LorentzianComponent,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FigureTag {
    Fig2,
    Fig3,
    Fig4,
    Fig5,
    SupplBeam,
    SupplNoNeon,
}

impl FigureTag {
    pub const ALL: [FigureTag; 6] = [
        FigureTag::Fig2,
        FigureTag::Fig3,
        FigureTag::Fig4,
        FigureTag::Fig5,
        FigureTag::SupplBeam,
        FigureTag::SupplNoNeon,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            FigureTag::Fig2 => "fig2",
            FigureTag::Fig3 => "fig3",
            FigureTag::Fig4 => "fig4",
            FigureTag::Fig5 => "fig5",
            FigureTag::SupplBeam => "suppl-beam",
            FigureTag::SupplNoNeon => "suppl-noneon",
        }
    }
}

impl fmt::Display for FigureTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for FigureTag {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        FigureTag::ALL
            .into_iter()
            .find(|t| t.as_str() == s)
            .ok_or_else(|| Error::Config(format!("unknown figure tag '{s}'")))
    }
}

/// Named tables produced by one figure.
pub type Figure = Vec<(String, Table)>;

/// Measured slit-imaging ratios G2/G1 and G3/G1 with their uncertainties.
pub const MEASURED_GAMMA_RATIOS: [(f64, f64); 2] = [(4.4, 0.2), (9.6, 0.6)];

pub fn run_figure(tag: FigureTag, s: &Scenario) -> Result<Figure> {
    let ctx = |e: Error| Error::Config(format!("{tag}: {e}"));
    match tag {
        FigureTag::Fig2 => fig2(s),
        FigureTag::Fig3 => fig3(s),
        FigureTag::Fig4 => fig4(s),
        FigureTag::Fig5 => fig5(s),
        FigureTag::SupplBeam => suppl_beam(s),
        FigureTag::SupplNoNeon => suppl_noneon(s),
    }
    .map_err(|e| match e {
        Error::Io(_) | Error::Csv(_) => e,
        other => ctx(other),
    })
}

/// Run a figure and write its tables under `dir`.
pub fn write_figure(tag: FigureTag, s: &Scenario, dir: &Path) -> Result<Vec<PathBuf>> {
    run_figure(tag, s)?.iter().map(|(name, t)| t.write(dir, name, &s.hash)).collect()
}

fn mm(x: f64) -> f64 {
    x * 1e3
}

fn celsius(t: f64) -> f64 {
    t - 273.15
}

fn radial_modes(cell: &Cell, d: f64, g0: f64) -> Result<Vec<crate::eigenmodes::Mode>> {
    let ids: Vec<ModeIndex> = match cell {
        Cell::Sphere { .. } => (0..3).map(|n| ModeIndex::sphere(n, 0, 0)).collect::<Result<_>>()?,
        Cell::Box { .. } => vec![ModeIndex::cuboid(1, 1, 1)?, ModeIndex::cuboid(1, 1, 2)?, ModeIndex::cuboid(1, 1, 3)?],
    };
    ids.into_iter().map(|i| solve_mode(cell, i, d, g0)).collect()
}

/// Slit images, diffusion-rate ratios, temperature curves, wall scan and a
/// composite-line fit.
pub fn fig2(s: &Scenario) -> Result<Figure> {
    let d = diffusion_coefficient(s.temperature, &s.gas)?;
    let g0 = total_decoherence_rate(&s.rates);
    let modes = radial_modes(&s.cell, d, g0)?;
    let mut out = Figure::new();

    let mut t = Table::new(&[
        ("id", ""),
        ("kR", ""),
        ("k_per_m", "1/m"),
        ("gamma_diff_per_s", "1/s"),
        ("gamma_diff_ratio", ""),
        ("k_ratio", ""),
    ])
    .note("gamma_diff = D k^2; ratios relative to the first mode");
    let l = s.cell.characteristic_length();
    for m in &modes {
        let g = d * m.k * m.k;
        let g1 = d * modes[0].k * modes[0].k;
        t.push(vec![
            m.index.to_string().into(),
            (m.k * l).into(),
            m.k.into(),
            g.into(),
            (g / g1).into(),
            (m.k / modes[0].k).into(),
        ])?;
    }
    out.push(("fig2_modes.csv".into(), t));

    let probe = BeamSpec::new(Axis::X, s.probe_waist, 1.0)?;
    let images: Vec<Vec<f64>> = modes.iter().map(|m| slit_image(m, &probe, &s.slit, s.order)).collect::<Result<_>>()?;
    let mut t = Table::new(&[("z0_mm", "mm"), ("A1", "m^1.5"), ("A2", "m^1.5"), ("A3", "m^1.5")])
        .note(format!("modes {}, {}, {}", modes[0].index, modes[1].index, modes[2].index));
    for (i, z) in s.slit.positions.iter().enumerate() {
        t.push(vec![mm(*z).into(), images[0][i].into(), images[1][i].into(), images[2][i].into()])?;
    }
    out.push(("fig2_images.csv".into(), t));

    let mut t = Table::new(&[
        ("T_C", "C"),
        ("R_eff_mm", "mm"),
        ("D_m2_per_s", "m^2/s"),
        ("G1_per_s", "1/s"),
        ("G2_per_s", "1/s"),
        ("G3_per_s", "1/s"),
        ("G2_over_G1", ""),
    ]);
    for &temp in &s.temperatures {
        let r_eff = effective_radius(temp, &s.cell, &s.gas, s.wall_eta)?;
        let cell = s.cell.with_radius(r_eff)?;
        let dt = diffusion_coefficient(temp, &s.gas)?;
        let ms = radial_modes(&cell, dt, g0)?;
        t.push(vec![
            celsius(temp).into(),
            mm(r_eff).into(),
            dt.into(),
            ms[0].decay_rate.into(),
            ms[1].decay_rate.into(),
            ms[2].decay_rate.into(),
            (ms[1].decay_rate / ms[0].decay_rate).into(),
        ])?;
    }
    out.push(("fig2_temperature.csv".into(), t));

    out.push(("fig2_wall_scan.csv".into(), wall_scan(&s.wall_scan)?));

    // two-mode composite line with the first two modes' linewidths
    let g = [modes[0].decay_rate / (2.0 * PI), modes[1].decay_rate / (2.0 * PI)];
    let f0 = s.coupling.larmor;
    let truth =
        [LorentzianComponent::new(1.0, g[0], f0, 0.0)?, LorentzianComponent::new(0.4, g[1], f0 + 0.2 * g[0], 0.3)?];
    let grid = linear_grid(f0 - 12.0 * g[1], f0 + 12.0 * g[1], 2001);
    let spec = synthesize_spectrum(&truth, C64::new(0.0, 0.0), &grid, s.fit_noise, s.seed)?;
    let fit = fit_lorentzians(&spec, s.fit_components)?;
    let mut t = fit_table(&fit);
    t.notes.push(format!("synthetic spectrum: A = 1, 0.4; gamma_Hz = {}, {}; noise {}", g[0], g[1], s.fit_noise));
    out.push(("fig2_fit.csv".into(), t));
    Ok(out)
}

/// Diffusion-rate ratios of the first three l = 0 modes against the wall parameter c.
pub fn wall_scan(cs: &[f64]) -> Result<Table> {
    let mut t = Table::new(&[
        ("c", ""),
        ("kR1", ""),
        ("kR2", ""),
        ("kR3", ""),
        ("G2_over_G1", ""),
        ("G3_over_G1", ""),
        ("matches_measured", ""),
    ])
    .note("G_m/G_1 = (k_m/k_1)^2, diffusion-dominated; matches_measured: both ratios inside 4.4(2) and 9.6(6)");
    let rows: Vec<Result<[f64; 3]>> = cs
        .par_iter()
        .map(|&c| {
            let r = robin_roots(0, c, 3)?;
            Ok([r[0].x, r[1].x, r[2].x])
        })
        .collect();
    for (c, r) in cs.iter().zip(rows) {
        let x = r?;
        let q2 = (x[1] / x[0]).powi(2);
        let q3 = (x[2] / x[0]).powi(2);
        let ok = (q2 - MEASURED_GAMMA_RATIOS[0].0).abs() <= MEASURED_GAMMA_RATIOS[0].1
            && (q3 - MEASURED_GAMMA_RATIOS[1].0).abs() <= MEASURED_GAMMA_RATIOS[1].1;
        t.push(vec![
            (*c).into(),
            x[0].into(),
            x[1].into(),
            x[2].into(),
            q2.into(),
            q3.into(),
            V::from(ok.to_string()),
        ])?;
    }
    Ok(t)
}

pub fn fit_table(fit: &crate::signal::FitResult) -> Table {
    let mut t = Table::new(&[
        ("component_id", ""),
        ("A", "signal"),
        ("gamma_Hz", "Hz"),
        ("f0_Hz", "Hz"),
        ("phi_rad", "rad"),
        ("bg_re", "signal"),
        ("bg_im", "signal"),
        ("residual_rms", "signal"),
    ])
    .note("gamma_Hz is the Lorentzian half width; FWHM = 2 gamma_Hz");
    if fit.capacity_warning {
        t.notes.push("warning: more components than the grid can resolve".into());
    }
    for (i, c) in fit.components.iter().enumerate() {
        t.rows.push(vec![
            V::from((i + 1).to_string()),
            c.amplitude.into(),
            c.linewidth.into(),
            c.center.into(),
            c.phase.into(),
            fit.background.re.into(),
            fit.background.im.into(),
            fit.residual_rms.into(),
        ]);
    }
    t
}

/// Sweep table with the documented column set.
pub fn sweep_table(points: &[SweepPoint]) -> Table {
    let mut t = Table::new(&[
        ("P_mW", "mW"),
        ("N1", "arb"),
        ("N2", "arb"),
        ("f1_Hz", "Hz"),
        ("f2_Hz", "Hz"),
        ("G1_Hz", "Hz"),
        ("G2_Hz", "Hz"),
        ("phi1_rad", "rad"),
        ("phi2_rad", "rad"),
        ("J_over_Delta_abs", ""),
        ("regime_label", ""),
    ])
    .note("G_Hz are half widths (Gamma / 2 pi); FWHM = 2 G_Hz");
    for p in points {
        t.rows.push(vec![
            (p.power * 1e3).into(),
            p.n[0].into(),
            p.n[1].into(),
            p.frequency[0].into(),
            p.frequency[1].into(),
            p.linewidth[0].into(),
            p.linewidth[1].into(),
            p.phase[0].into(),
            p.phase[1].into(),
            p.j_over_delta.into(),
            V::from(p.regime.to_string()),
        ]);
    }
    t
}

/// Light shift and broadening against pump power, with tail fits.
pub fn fig3(s: &Scenario) -> Result<Figure> {
    let pts = pump_sweep(&s.sweep()?)?;
    let mut t = Table::new(&[
        ("P_mW", "mW"),
        ("f1_Hz", "Hz"),
        ("f2_Hz", "Hz"),
        ("G1_Hz", "Hz"),
        ("G2_Hz", "Hz"),
        ("f1_bare_Hz", "Hz"),
        ("f2_bare_Hz", "Hz"),
        ("G1_bare_Hz", "Hz"),
        ("G2_bare_Hz", "Hz"),
    ])
    .note("bare values exclude the mixing by J");
    for p in &pts {
        t.push(vec![
            (p.power * 1e3).into(),
            p.frequency[0].into(),
            p.frequency[1].into(),
            p.linewidth[0].into(),
            p.linewidth[1].into(),
            p.bare_frequency[0].into(),
            p.bare_frequency[1].into(),
            p.bare_linewidth[0].into(),
            p.bare_linewidth[1].into(),
        ])?;
    }
    let powers: Vec<f64> = pts.iter().map(|p| p.power * 1e3).collect();
    let mut fits = Table::new(&[("quantity", ""), ("slope_per_mW", "Hz/mW"), ("intercept", "Hz")])
        .note("ordinary least squares over the upper half of the power range");
    let mut slopes = [[0.0; 2]; 2];
    for (qi, (name, get)) in [
        ("f", (|p: &SweepPoint, k: usize| p.frequency[k]) as fn(&SweepPoint, usize) -> f64),
        ("G", |p: &SweepPoint, k: usize| p.linewidth[k]),
    ]
    .into_iter()
    .enumerate()
    {
        for (k, out) in slopes[qi].iter_mut().enumerate() {
            let v: Vec<f64> = pts.iter().map(|p| get(p, k)).collect();
            let (slope, icpt) = asymptotic_linear_fit(&powers, &v, 0.5)?;
            *out = slope;
            fits.push(vec![V::from(format!("{name}{}", k + 1)), slope.into(), icpt.into()])?;
        }
    }
    fits.push(vec!["f2_over_f1_slope".into(), (slopes[0][1] / slopes[0][0]).into(), V::from("")])?;
    fits.push(vec!["G2_over_G1_slope".into(), (slopes[1][1] / slopes[1][0]).into(), V::from("")])?;
    Ok(vec![("fig3.csv".into(), t), ("fig3_fits.csv".into(), fits)])
}

/// Mode displacement, |J|, |J/Delta| and frequency/phase splitting against power.
pub fn fig4(s: &Scenario) -> Result<Figure> {
    let sweep = s.sweep()?;
    let ctx = SweepContext::new(&sweep)?;
    let iz = ctx.z_overlap();
    let pts = pump_sweep(&sweep)?;
    let centroid = |v: [C64; 2]| 2.0 * (v[0].conj() * v[1]).re * iz / (v[0].norm_sqr() + v[1].norm_sqr());
    let rows: Vec<Result<[f64; 2]>> = sweep
        .powers
        .par_iter()
        .map(|&p| {
            let (sys, _) = ctx.system_at(p)?;
            let passive = sys.without_gain();
            let ev = passive.eigenvalues().values;
            let v = [passive.eigenvector(ev[0]), passive.eigenvector(ev[1])];
            // eigenvector dominated by mode 1 first
            let (a, b) = if v[0][0].norm_sqr() >= v[1][0].norm_sqr() { (v[0], v[1]) } else { (v[1], v[0]) };
            Ok([centroid(a), centroid(b)])
        })
        .collect();
    let mut t = Table::new(&[
        ("P_mW", "mW"),
        ("z1_mm", "mm"),
        ("z2_mm", "mm"),
        ("J_abs_per_s", "1/s"),
        ("J_over_Delta_abs", ""),
        ("df_Hz", "Hz"),
        ("dphi_rad", "rad"),
    ])
    .note("z_m: z centroid of the eigenmode profile; df = f2 - f1; dphi = phi2 - phi1 wrapped");
    for (p, r) in pts.iter().zip(rows) {
        let z = r?;
        t.push(vec![
            (p.power * 1e3).into(),
            mm(z[0]).into(),
            mm(z[1]).into(),
            p.j_abs.into(),
            p.j_over_delta.into(),
            (p.frequency[1] - p.frequency[0]).into(),
            wrap_phase(p.phase[1] - p.phase[0]).into(),
        ])?;
    }
    let mut tt = Table::new(&[("T_C", "C"), ("df_Hz", "Hz"), ("df_bare_Hz", "Hz")])
        .note(format!("frequency separation at P = {} mW", s.coupling.power * 1e3));
    let rows: Vec<Result<SweepPoint>> = s
        .temperatures
        .par_iter()
        .map(|&temp| {
            let mut sw = sweep.clone();
            sw.temperature = temp;
            sw.powers = vec![s.coupling.power];
            Ok(pump_sweep(&sw)?[0])
        })
        .collect();
    for (temp, r) in s.temperatures.iter().zip(rows) {
        let p = r?;
        tt.push(vec![
            celsius(*temp).into(),
            (p.frequency[1] - p.frequency[0]).into(),
            (p.bare_frequency[1] - p.bare_frequency[0]).into(),
        ])?;
    }
    Ok(vec![("fig4.csv".into(), t), ("fig4_temperature.csv".into(), tt)])
}

/// Spearman correlation of N1, N2 over the points selected by `keep`; `None`
/// when undefined or fewer than three points are selected.
pub fn segment_spearman(points: &[SweepPoint], keep: impl Fn(&SweepPoint) -> bool) -> Result<Option<f64>> {
    let sel: Vec<&SweepPoint> = points.iter().filter(|p| keep(p)).collect();
    if sel.len() < 3 {
        return Ok(None);
    }
    let a: Vec<f64> = sel.iter().map(|p| p.n[0]).collect();
    let b: Vec<f64> = sel.iter().map(|p| p.n[1]).collect();
    match spearman(&a, &b) {
        Ok(r) => Ok(Some(r)),
        Err(Error::Undefined(_)) => Ok(None),
        Err(e) => Err(e),
    }
}

/// Power above which the strongly anti-correlated segment is evaluated (W).
pub const HIGH_POWER: f64 = 0.8e-3;
/// Upper end of the low-power segment (W).
pub const LOW_POWER: f64 = 0.1e-3;

/// Named subset of sweep points.
type Segment = (&'static str, fn(&SweepPoint) -> bool);

fn spearman_table(points: &[SweepPoint]) -> Result<Table> {
    let mut t = Table::new(&[("segment", ""), ("n_points", ""), ("rho", "")]);
    let segs: [Segment; 3] =
        [("all", |_| true), ("P_gt_0.8mW", |p| p.power > HIGH_POWER), ("P_le_0.1mW", |p| p.power <= LOW_POWER)];
    for (name, f) in segs {
        let n = points.iter().filter(|p| f(p)).count();
        let rho = segment_spearman(points, f)?;
        t.push(vec![name.into(), (n as f64).into(), rho.map_or(V::from("undefined"), V::from)])?;
    }
    Ok(t)
}

/// Exchange trace for G2 = 2 G1, w1 = w2, |J| = 8 G1, c0 = (1, 0), until the
/// norm falls below 1% of its initial value.
pub fn exchange_trace(gamma1: f64, samples_per_period: usize) -> Result<Vec<(f64, ModeAmplitudes)>> {
    let j = C64::new(0.0, 8.0 * gamma1);
    let sys = CoupledSystem::build(0.0, 0.0, gamma1, 2.0 * gamma1, j, [C64::new(0.0, 0.0); 2])?;
    let c0 = ModeAmplitudes::first_mode();
    let dt = PI / j.norm() / samples_per_period as f64;
    let mut out = vec![(0.0, c0)];
    let mut k = 1;
    loop {
        let t = k as f64 * dt;
        let c = sys.evolve(&c0, t)?;
        out.push((t, c));
        if c.norm_sqr() < 0.01 * c0.norm_sqr() {
            break;
        }
        k += 1;
    }
    Ok(out)
}

pub fn fig5(s: &Scenario) -> Result<Figure> {
    let sweep = s.sweep()?;
    let pts = pump_sweep(&sweep)?;
    let mut t = sweep_table(&pts);
    t.columns.push(("N_diff_norm".into(), String::new()));
    for (row, p) in t.rows.iter_mut().zip(&pts) {
        let sum = p.n[0] + p.n[1];
        row.push(if sum > 0.0 { ((p.n[0] - p.n[1]) / sum).into() } else { 0.0.into() });
    }
    t.notes.push("N_diff_norm = (N1 - N2) / (N1 + N2)".into());
    let ctx = SweepContext::new(&sweep)?;
    let gamma1 = ctx.modes[0].decay_rate;
    let mut tr = Table::new(&[("t_s", "s"), ("c1_sq", ""), ("c2_sq", ""), ("norm_sq", "")])
        .note(format!("G1 = {gamma1} 1/s, G2 = 2 G1, w1 = w2, |J| = 8 G1, c0 = (1, 0)"));
    for (time, c) in exchange_trace(gamma1, 16)? {
        tr.push(vec![time.into(), c.c[0].norm_sqr().into(), c.c[1].norm_sqr().into(), c.norm_sqr().into()])?;
    }
    Ok(vec![("fig5.csv".into(), t), ("fig5_spearman.csv".into(), spearman_table(&pts)?), ("fig5_trace.csv".into(), tr)])
}

/// Pump projections and effective intensities of the two sweep modes against
/// the pump waist: rows of (waist, c1, c2, Ieff1, Ieff2).
pub fn waist_scan(sweep: &SweepScenario, waists: &[f64], power: f64) -> Result<Vec<[f64; 5]>> {
    let ctx = SweepContext::new(sweep)?;
    let [s1, s2] = ctx.samples();
    let q = &ctx.integrator;
    waists
        .par_iter()
        .map(|&w| {
            let (f, _) = ctx.pump_field(power, w)?;
            Ok([
                w,
                f.projection(s1, q),
                f.projection(s2, q),
                f.effective_intensity(s1, q),
                f.effective_intensity(s2, q),
            ])
        })
        .collect()
}

/// Lowest mode above the fundamental with the same symmetry: s100 or b113.
pub fn radial_partner(cell: &Cell) -> Result<[ModeIndex; 2]> {
    match cell {
        Cell::Sphere { .. } => Ok([ModeIndex::sphere(0, 0, 0)?, ModeIndex::sphere(1, 0, 0)?]),
        Cell::Box { .. } => Ok([ModeIndex::cuboid(1, 1, 1)?, ModeIndex::cuboid(1, 1, 3)?]),
    }
}

pub fn suppl_beam(s: &Scenario) -> Result<Figure> {
    let sweep = s.sweep()?;
    let rows = waist_scan(&sweep, &s.waist_scan, s.coupling.power)?;
    let mut radial = sweep.clone();
    radial.modes = Some(radial_partner(&s.cell)?);
    let radial_rows = waist_scan(&radial, &s.waist_scan, s.coupling.power)?;
    let ctx = SweepContext::new(&sweep)?;
    let mut t = Table::new(&[
        ("waist_mm", "mm"),
        ("c1", "m^1.5"),
        ("c2", "m^1.5"),
        ("Ieff1_W_m2", "W/m^2"),
        ("Ieff2_W_m2", "W/m^2"),
        ("Ieff2_over_Ieff1", ""),
        ("Ieff_radial_W_m2", "W/m^2"),
        ("Ieff_radial_over_Ieff1", ""),
    ])
    .note(format!(
        "pump power {} mW; modes 1, 2 = {}, {}; radial = {}",
        s.coupling.power * 1e3,
        ctx.modes[0].index,
        ctx.modes[1].index,
        radial.modes.unwrap()[1]
    ));
    for (r, q) in rows.iter().zip(&radial_rows) {
        t.push(vec![
            mm(r[0]).into(),
            r[1].into(),
            r[2].into(),
            r[3].into(),
            r[4].into(),
            (r[4] / r[3]).into(),
            q[4].into(),
            (q[4] / q[3]).into(),
        ])?;
    }
    let mut c = Table::new(&[("waist_mm", "mm"), ("rho_all", ""), ("rho_P_gt_0.8mW", "")])
        .note("pump sweeps at the narrow (x1) and wide (x10) beam");
    for w in [1e-3, 10e-3] {
        let mut sw = sweep.clone();
        sw.pump_waist = w;
        let pts = pump_sweep(&sw)?;
        let all = segment_spearman(&pts, |_| true)?;
        let hi = segment_spearman(&pts, |p| p.power > HIGH_POWER)?;
        let cell = |r: Option<f64>| r.map_or(V::from("undefined"), V::from);
        c.push(vec![mm(w).into(), cell(all), cell(hi)])?;
    }
    Ok(vec![("suppl_beam.csv".into(), t), ("suppl_beam_sweeps.csv".into(), c)])
}

pub fn suppl_noneon(s: &Scenario) -> Result<Figure> {
    let sweep = s.noneon_sweep()?;
    let pts = pump_sweep(&sweep)?;
    let mut t = sweep_table(&pts);
    let ctx = SweepContext::new(&sweep)?;
    t.notes.push(format!(
        "box cell {} x {} x {} mm, modes {} and {}",
        mm(s.noneon.edges[0]),
        mm(s.noneon.edges[1]),
        mm(s.noneon.edges[2]),
        ctx.modes[0].index,
        ctx.modes[1].index
    ));
    Ok(vec![("suppl_noneon.csv".into(), t), ("suppl_noneon_spearman.csv".into(), spearman_table(&pts)?)])
}

#[cfg(test)]
mod tests {
    use super::*;

    fn quick() -> Scenario {
        Scenario::from_text(
            "quad.radial = 24\nquad.polar = 16\nquad.azimuthal = 16\n\
             sweep.powers = 0, 0.05, 0.5, 1:1:7 mW\ntemperatures = 40, 80 C\nslit.positions = -5:5:5 mm\n\
             scan.waists = 1, 5 mm\nscan.wall_c = 0, 0.17",
        )
        .unwrap()
    }

    #[test]
    fn tags_round_trip() {
        for t in FigureTag::ALL {
            assert_eq!(t.as_str().parse::<FigureTag>().unwrap(), t);
        }
        assert!("fig9".parse::<FigureTag>().is_err());
    }

    #[test]
    fn dirichlet_ratios() {
        let s = Scenario::from_text("cell.mean_free_path = 0 mm").unwrap();
        let t = &fig2(&s).unwrap()[0].1;
        let ratio = |i: usize| match t.rows[i][4] {
            V::Num(v) => v,
            _ => panic!(),
        };
        assert!((ratio(1) - 4.0).abs() < 1e-9 && (ratio(2) - 9.0).abs() < 1e-9);
    }

    #[test]
    fn every_figure_runs() {
        let s = quick();
        for tag in FigureTag::ALL {
            let f = run_figure(tag, &s).unwrap();
            assert!(!f.is_empty());
            for (_, t) in &f {
                assert!(t.rows.iter().all(|r| r.len() == t.columns.len()));
            }
        }
    }

    #[test]
    fn exchange_trace_alternates() {
        let tr = exchange_trace(1.0, 16).unwrap();
        let last = tr.last().unwrap().1.norm_sqr();
        assert!(last < 0.01);
        let c2: Vec<f64> = tr.iter().map(|(_, c)| c.c[1].norm_sqr()).collect();
        let peaks = (1..c2.len() - 1).filter(|&i| c2[i] > c2[i - 1] && c2[i] >= c2[i + 1]).count();
        assert!(peaks >= 2);
    }
}
