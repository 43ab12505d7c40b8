//! Levenberg-Marquardt fit of a sum of complex Lorentzians plus a complex
//! background to joint X/Y lock-in data.
//!
//! Frequencies are shifted to the grid centre and scaled by the span, and the
//! signal by its largest magnitude, so the fit does not depend on either offset
//! or units. Linewidths are fitted through their logarithm to keep them positive.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64 as C64;

use super::lorentzian::{LorentzianComponent, Spectrum};
use crate::error::{domain, Error, Result};

pub const MAX_ITERATIONS: usize = 500;
pub const COST_RTOL: f64 = 1e-10;
const PARAMS_PER_COMPONENT: usize = 4;

#[derive(Debug, Clone, PartialEq)]
pub struct FitResult {
    /// Sorted by ascending linewidth, ties by centre.
    pub components: Vec<LorentzianComponent>,
    pub background: C64,
    /// RMS over all 2N real residuals, in signal units.
    pub residual_rms: f64,
    pub iterations: usize,
    pub cost_trace: Vec<f64>,
    /// More components were requested than the grid can resolve (n_points / 8).
    pub capacity_warning: bool,
}

struct Scaled {
    u: Vec<f64>,
    z: Vec<C64>,
    f_mid: f64,
    f_scale: f64,
    y_scale: f64,
}

impl Scaled {
    fn new(s: &Spectrum) -> Self {
        let lo = s.freq[0];
        let hi = *s.freq.last().unwrap();
        let f_mid = 0.5 * (lo + hi);
        let f_scale = if hi > lo { hi - lo } else { 1.0 };
        let y_scale = (0..s.len()).map(|i| s.point(i).norm()).fold(0.0, f64::max).max(f64::MIN_POSITIVE);
        Self {
            u: s.freq.iter().map(|f| (f - f_mid) / f_scale).collect(),
            z: (0..s.len()).map(|i| s.point(i) / y_scale).collect(),
            f_mid,
            f_scale,
            y_scale,
        }
    }
}

// p = [A, ln G, f0, phi] per component, then [bg_re, bg_im]
fn residuals(d: &Scaled, p: &[f64], n: usize) -> Vec<f64> {
    let mut r = Vec::with_capacity(2 * d.u.len());
    let bg = C64::new(p[PARAMS_PER_COMPONENT * n], p[PARAMS_PER_COMPONENT * n + 1]);
    let mut im = Vec::with_capacity(d.u.len());
    for (i, &u) in d.u.iter().enumerate() {
        let mut m = bg;
        for k in 0..n {
            let q = &p[PARAMS_PER_COMPONENT * k..];
            let g = q[1].exp();
            m += C64::from_polar(q[0], q[3]) * g / C64::new(g, u - q[2]);
        }
        let e = m - d.z[i];
        r.push(e.re);
        im.push(e.im);
    }
    r.extend(im);
    r
}

fn cost_of(r: &[f64]) -> f64 {
    0.5 * r.iter().map(|v| v * v).sum::<f64>()
}

fn jacobian(d: &Scaled, p: &[f64], n: usize) -> DMatrix<f64> {
    let np = PARAMS_PER_COMPONENT * n + 2;
    let m = d.u.len();
    let mut j = DMatrix::<f64>::zeros(2 * m, np);
    for (i, &u) in d.u.iter().enumerate() {
        for k in 0..n {
            let q = &p[PARAMS_PER_COMPONENT * k..];
            let (a, g, f0, phi) = (q[0], q[1].exp(), q[2], q[3]);
            let delta = u - f0;
            let den = C64::new(g, delta);
            let l = g / den;
            let e = C64::from_polar(1.0, phi);
            let den2 = den * den;
            let d_a = e * l;
            let d_lng = a * e * C64::new(0.0, delta) / den2 * g;
            let d_f0 = a * e * C64::new(0.0, g) / den2;
            let d_phi = C64::i() * a * e * l;
            for (c, v) in [d_a, d_lng, d_f0, d_phi].into_iter().enumerate() {
                j[(i, PARAMS_PER_COMPONENT * k + c)] = v.re;
                j[(m + i, PARAMS_PER_COMPONENT * k + c)] = v.im;
            }
        }
        j[(i, np - 2)] = 1.0;
        j[(m + i, np - 1)] = 1.0;
    }
    j
}

struct Outcome {
    params: Vec<f64>,
    cost: f64,
    iterations: usize,
    trace: Vec<f64>,
    converged: bool,
}

fn levenberg_marquardt(d: &Scaled, p0: Vec<f64>, n: usize) -> Outcome {
    let mut p = p0;
    let mut r = residuals(d, &p, n);
    let mut cost = cost_of(&r);
    let mut trace = vec![cost];
    let mut lambda = 1e-3;
    let tiny = 1e-30 * d.z.len() as f64;
    for it in 1..=MAX_ITERATIONS {
        if cost <= tiny {
            return Outcome { params: p, cost, iterations: it - 1, trace, converged: true };
        }
        let j = jacobian(d, &p, n);
        let jt = j.transpose();
        let a = &jt * &j;
        let g = &jt * DVector::from_vec(r.clone());
        let dmax = a.diagonal().max();
        loop {
            let mut aa = a.clone();
            for k in 0..aa.nrows() {
                aa[(k, k)] += lambda * a[(k, k)].max(1e-12 * dmax);
            }
            let step = aa.cholesky().map(|c| c.solve(&(-&g)));
            if let Some(step) = step {
                let trial: Vec<f64> = p.iter().zip(step.iter()).map(|(x, s)| x + s).collect();
                let rt = residuals(d, &trial, n);
                let ct = cost_of(&rt);
                if ct.is_finite() && ct < cost {
                    let rel = (cost - ct) / cost;
                    p = trial;
                    r = rt;
                    cost = ct;
                    trace.push(cost);
                    lambda = (lambda / 3.0).max(1e-15);
                    if rel < COST_RTOL {
                        return Outcome { params: p, cost, iterations: it, trace, converged: true };
                    }
                    break;
                }
            }
            lambda *= 4.0;
            if lambda > 1e16 {
                // no descent direction left at working precision
                return Outcome { params: p, cost, iterations: it, trace, converged: true };
            }
        }
    }
    Outcome { params: p, cost, iterations: MAX_ITERATIONS, trace, converged: false }
}

fn half_width(u: &[f64], m: &[f64], i0: usize) -> Option<f64> {
    let level = m[i0] / 2f64.sqrt();
    let cross = |range: &mut dyn Iterator<Item = usize>, step: isize| -> Option<f64> {
        for i in range {
            let j = (i as isize - step) as usize;
            if m[i] < level {
                let t = (m[j] - level) / (m[j] - m[i]);
                return Some((u[j] + t * (u[i] - u[j]) - u[i0]).abs());
            }
        }
        None
    };
    let right = cross(&mut ((i0 + 1)..u.len()), 1);
    let left = cross(&mut (0..i0).rev(), -1);
    match (left, right) {
        (Some(a), Some(b)) => Some(0.5 * (a + b)),
        (a, b) => a.or(b),
    }
}

fn initial_guesses(d: &Scaled, n: usize) -> Vec<Vec<f64>> {
    let m = d.u.len();
    let edge = (m / 20).max(1).min(m);
    let bg = (d.z[..edge].iter().sum::<C64>() + d.z[m - edge..].iter().sum::<C64>()) / (2 * edge) as f64;
    let mag: Vec<f64> = d.z.iter().map(|z| (z - bg).norm()).collect();
    let i0 = (0..m).max_by(|&a, &b| mag[a].total_cmp(&mag[b])).unwrap();
    let a0 = mag[i0];
    let phi0 = (d.z[i0] - bg).arg();
    let g0 = half_width(&d.u, &mag, i0).unwrap_or(0.25).max(1e-6);
    let f0 = d.u[i0];

    let mut starts = Vec::new();
    for widen in [0.0, 1.0] {
        let mut p = Vec::with_capacity(PARAMS_PER_COMPONENT * n + 2);
        for k in 0..n {
            let g = g0 * 2f64.powf(widen - k as f64);
            p.extend([a0 / n as f64, g.ln(), f0, phi0]);
        }
        p.extend([bg.re, bg.im]);
        starts.push(p);
    }
    if n > 1 {
        // greedy peak picking on the residual magnitude
        let mut resid: Vec<C64> = d.z.iter().map(|z| z - bg).collect();
        let mut p = Vec::with_capacity(PARAMS_PER_COMPONENT * n + 2);
        for _ in 0..n {
            let mg: Vec<f64> = resid.iter().map(|z| z.norm()).collect();
            let i = (0..m).max_by(|&a, &b| mg[a].total_cmp(&mg[b])).unwrap();
            let g = half_width(&d.u, &mg, i).unwrap_or(g0).max(1e-6);
            let (a, ph, fc) = (mg[i], resid[i].arg(), d.u[i]);
            for (k, z) in resid.iter_mut().enumerate() {
                *z -= C64::from_polar(a, ph) * g / C64::new(g, d.u[k] - fc);
            }
            p.extend([a, g.ln(), fc, ph]);
        }
        p.extend([bg.re, bg.im]);
        starts.push(p);
    }
    starts
}

/// Fit `n` Lorentzians plus a complex background.
pub fn fit_lorentzians(spectrum: &Spectrum, n: usize) -> Result<FitResult> {
    if n == 0 {
        return Err(domain("number of components must be >= 1"));
    }
    let np = PARAMS_PER_COMPONENT * n + 2;
    if 2 * spectrum.len() < np {
        return Err(domain(format!("{} points cannot constrain {np} parameters", spectrum.len())));
    }
    let d = Scaled::new(spectrum);
    let outcomes: Vec<Outcome> = initial_guesses(&d, n).into_iter().map(|p| levenberg_marquardt(&d, p, n)).collect();
    let best = outcomes.iter().filter(|o| o.converged).min_by(|a, b| a.cost.total_cmp(&b.cost));
    let Some(best) = best else {
        let o = outcomes.iter().min_by(|a, b| a.cost.total_cmp(&b.cost)).unwrap();
        return Err(Error::NotConverged {
            iterations: o.iterations,
            last_cost: o.cost,
            last_params: unscale_params(&d, &o.params, n),
            cost_trace: o.trace.clone(),
        });
    };
    let mut components = Vec::with_capacity(n);
    for k in 0..n {
        let q = &best.params[PARAMS_PER_COMPONENT * k..];
        components.push(LorentzianComponent::new(
            q[0] * d.y_scale,
            q[1].exp() * d.f_scale,
            d.f_mid + q[2] * d.f_scale,
            q[3],
        )?);
    }
    components.sort_by(|a, b| a.linewidth.total_cmp(&b.linewidth).then(a.center.total_cmp(&b.center)));
    let bg = C64::new(best.params[np - 2], best.params[np - 1]) * d.y_scale;
    Ok(FitResult {
        components,
        background: bg,
        residual_rms: (2.0 * best.cost / (2 * spectrum.len()) as f64).sqrt() * d.y_scale,
        iterations: best.iterations,
        cost_trace: best.trace.iter().map(|c| c * d.y_scale * d.y_scale).collect(),
        capacity_warning: n > spectrum.len() / 8,
    })
}

fn unscale_params(d: &Scaled, p: &[f64], n: usize) -> Vec<f64> {
    let mut out = Vec::with_capacity(p.len());
    for k in 0..n {
        let q = &p[PARAMS_PER_COMPONENT * k..];
        out.extend([q[0] * d.y_scale, q[1].exp() * d.f_scale, d.f_mid + q[2] * d.f_scale, q[3]]);
    }
    out.extend([p[p.len() - 2] * d.y_scale, p[p.len() - 1] * d.y_scale]);
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::signal::lorentzian::{linear_grid, synthesize_spectrum};

    fn comp(a: f64, g: f64, f0: f64, phi: f64) -> LorentzianComponent {
        LorentzianComponent::new(a, g, f0, phi).unwrap()
    }

    fn pair() -> Vec<LorentzianComponent> {
        vec![comp(1.0, 5.0, 1000.0, 0.0), comp(0.4, 10.0, 1002.0, 0.3)]
    }

    #[test]
    fn noise_free_single_component_is_exact() {
        let truth = comp(1.3, 4.0, 1000.5, -0.7);
        let bg = C64::new(0.05, -0.02);
        let s = synthesize_spectrum(&[truth], bg, &linear_grid(950.0, 1050.0, 401), 0.0, 0).unwrap();
        let f = fit_lorentzians(&s, 1).unwrap();
        let c = f.components[0];
        assert!((c.amplitude / truth.amplitude - 1.0).abs() < 1e-8);
        assert!((c.linewidth / truth.linewidth - 1.0).abs() < 1e-8);
        assert!((c.center - truth.center).abs() < 1e-8);
        assert!((c.phase - truth.phase).abs() < 1e-8);
        assert!((f.background - bg).norm() < 1e-8);
    }

    #[test]
    fn two_components_with_noise() {
        let grid = linear_grid(940.0, 1060.0, 2001);
        let s = synthesize_spectrum(&pair(), C64::new(0.0, 0.0), &grid, 0.002, 3).unwrap();
        let f = fit_lorentzians(&s, 2).unwrap();
        for (got, want) in f.components.iter().zip(pair()) {
            assert!((got.amplitude / want.amplitude - 1.0).abs() < 0.05);
            assert!((got.linewidth / want.linewidth - 1.0).abs() < 0.05);
        }
        assert!(f.residual_rms < 2.0 * 0.002);
        assert!(!f.capacity_warning);
    }

    #[test]
    fn two_component_model_beats_one() {
        let grid = linear_grid(940.0, 1060.0, 481);
        let s = synthesize_spectrum(&pair(), C64::new(0.0, 0.0), &grid, 1e-3, 9).unwrap();
        let one = fit_lorentzians(&s, 1).unwrap();
        let two = fit_lorentzians(&s, 2).unwrap();
        assert!(one.residual_rms >= 10.0 * two.residual_rms, "{} vs {}", one.residual_rms, two.residual_rms);
    }

    #[test]
    fn invariant_under_offset_and_rescaling() {
        let grid = linear_grid(940.0, 1060.0, 481);
        let s = synthesize_spectrum(&pair(), C64::new(0.01, 0.0), &grid, 0.005, 4).unwrap();
        let base = fit_lorentzians(&s, 2).unwrap();
        let shifted = Spectrum::new(
            s.freq.iter().map(|f| f + 5000.0).collect(),
            s.x.iter().map(|v| v * 7.0).collect(),
            s.y.iter().map(|v| v * 7.0).collect(),
            0.035,
        )
        .unwrap();
        let other = fit_lorentzians(&shifted, 2).unwrap();
        for (a, b) in base.components.iter().zip(&other.components) {
            assert!((b.amplitude / 7.0 - a.amplitude).abs() < 1e-6 * a.amplitude);
            assert!((b.linewidth - a.linewidth).abs() < 1e-6 * a.linewidth);
            assert!((b.center - 5000.0 - a.center).abs() < 1e-6 * a.linewidth);
            assert!((b.phase - a.phase).abs() < 1e-6);
        }
    }

    #[test]
    fn error_shrinks_with_noise() {
        let grid = linear_grid(940.0, 1060.0, 481);
        let mut last = f64::INFINITY;
        for noise in [1e-3, 1e-4, 1e-5] {
            let s = synthesize_spectrum(&pair(), C64::new(0.0, 0.0), &grid, noise, 21).unwrap();
            let f = fit_lorentzians(&s, 2).unwrap();
            let err = f
                .components
                .iter()
                .zip(pair())
                .map(|(g, w)| (g.linewidth / w.linewidth - 1.0).abs() + (g.amplitude / w.amplitude - 1.0).abs())
                .fold(0.0, f64::max);
            assert!(err < last, "noise {noise}: {err} !< {last}");
            last = err;
        }
    }

    #[test]
    fn capacity_warning_and_bad_requests() {
        let grid = linear_grid(990.0, 1010.0, 16);
        let s = synthesize_spectrum(&pair(), C64::new(0.0, 0.0), &grid, 0.0, 1).unwrap();
        if let Ok(f) = fit_lorentzians(&s, 3) {
            assert!(f.capacity_warning);
        }
        assert!(fit_lorentzians(&s, 0).is_err());
        let tiny = synthesize_spectrum(&pair(), C64::new(0.0, 0.0), &[1.0, 2.0], 0.0, 1).unwrap();
        assert!(fit_lorentzians(&tiny, 1).is_err());
    }
}
