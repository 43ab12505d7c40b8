use std::ffi::{c_char, CStr, CString};
use std::ptr;

use spindiff_ffi::*;

fn last_error() -> String {
    let mut buf = [0 as c_char; 256];
    let n = unsafe { spd_last_error(buf.as_mut_ptr(), buf.len()) };
    assert!(n > 0);
    unsafe { CStr::from_ptr(buf.as_ptr()) }.to_string_lossy().into_owned()
}

#[test]
fn robin_roots_dirichlet() {
    let mut out = [0.0; 3];
    assert_eq!(unsafe { spd_robin_roots(0, 0.0, 3, out.as_mut_ptr()) }, SpdStatus::Ok);
    for (i, x) in out.iter().enumerate() {
        let want = (i + 1) as f64 * std::f64::consts::PI;
        assert!((x / want - 1.0).abs() < 1e-10);
    }
    assert_eq!(unsafe { spd_robin_roots(7, 0.0, 3, out.as_mut_ptr()) }, SpdStatus::Domain);
    assert!(last_error().contains("domain"));
    assert_eq!(unsafe { spd_robin_roots(0, 0.0, 3, ptr::null_mut()) }, SpdStatus::NullPointer);
}

#[test]
fn scenario_errors_and_hash() {
    let mut s = ptr::null_mut();
    let bad = CString::new("cell.radius = 10 mm\nno.such.key = 1").unwrap();
    assert_eq!(unsafe { spd_scenario_from_text(bad.as_ptr(), &mut s) }, SpdStatus::Config);
    assert!(last_error().contains("no.such.key"));
    assert!(s.is_null());

    let mut a = ptr::null_mut();
    let mut b = ptr::null_mut();
    let empty = CString::new("").unwrap();
    assert_eq!(unsafe { spd_scenario_from_text(empty.as_ptr(), &mut a) }, SpdStatus::Ok);
    assert_eq!(unsafe { spd_scenario_default(&mut b) }, SpdStatus::Ok);
    let mut ha = [0 as c_char; 65];
    let mut hb = [0 as c_char; 65];
    unsafe {
        assert_eq!(spd_scenario_hash(a, ha.as_mut_ptr(), 65), SpdStatus::Ok);
        assert_eq!(spd_scenario_hash(b, hb.as_mut_ptr(), 65), SpdStatus::Ok);
        assert_eq!(spd_scenario_hash(b, hb.as_mut_ptr(), 64), SpdStatus::OutOfRange);
        assert_eq!(CStr::from_ptr(ha.as_ptr()), CStr::from_ptr(hb.as_ptr()));
        assert_eq!(CStr::from_ptr(ha.as_ptr()).to_bytes().len(), 64);
        spd_scenario_free(a);
        spd_scenario_free(b);
        spd_scenario_free(ptr::null_mut());
    }
}

#[test]
fn sweep_through_handles() {
    let text =
        CString::new("sweep.powers = 0, 1, 2, 4 mW\nquad.radial = 24\nquad.polar = 16\nquad.azimuthal = 16").unwrap();
    let mut s = ptr::null_mut();
    let mut w = ptr::null_mut();
    unsafe {
        assert_eq!(spd_scenario_from_text(text.as_ptr(), &mut s), SpdStatus::Ok);
        assert_eq!(spd_sweep_run(s, &mut w), SpdStatus::Ok);
        assert_eq!(spd_sweep_len(w), 4);
        let mut p = std::mem::zeroed::<SpdSweepPoint>();
        assert_eq!(spd_sweep_point(w, 0, &mut p), SpdStatus::Ok);
        assert_eq!(p.power, 0.0);
        assert_eq!(p.n, [0.0, 0.0]);
        assert_eq!(spd_sweep_point(w, 3, &mut p), SpdStatus::Ok);
        assert!((p.power - 4e-3).abs() < 1e-15);
        assert!(p.n[0] > 0.0 && p.n[1] > 0.0);
        assert_eq!(p.coupled, (p.j_over_delta > 1.0) as i32);
        assert_eq!(spd_sweep_point(w, 4, &mut p), SpdStatus::OutOfRange);
        spd_sweep_free(w);
        spd_scenario_free(s);
    }
}

#[test]
fn two_mode_evolution_matches_decoupled_exponential() {
    let m = SpdTwoMode { omega: [2.0, -3.0], gamma: [1.0, 0.5], j_re: 0.0, j_im: 0.0 };
    let mut c = [1.0, 0.0, 0.0, 1.0];
    assert_eq!(unsafe { spd_two_mode_evolve(&m, 0.5, c.as_mut_ptr()) }, SpdStatus::Ok);
    let e1 = num_complex::Complex64::new(-1.0, 2.0).scale(0.5).exp();
    assert!((c[0] - e1.re).abs() < 1e-14 && (c[1] - e1.im).abs() < 1e-14);
    let mut ev = [0.0; 4];
    let mut coalesced = -1;
    assert_eq!(unsafe { spd_two_mode_eigenvalues(&m, ev.as_mut_ptr(), &mut coalesced) }, SpdStatus::Ok);
    assert_eq!(coalesced, 0);
    let mut got = [(ev[0], ev[1]), (ev[2], ev[3])];
    got.sort_by(|a, b| a.0.total_cmp(&b.0));
    assert!((got[0].0 + 1.0).abs() < 1e-14 && (got[1].0 + 0.5).abs() < 1e-14);
    let bad = SpdTwoMode { gamma: [-1.0, 0.5], ..m };
    assert_eq!(unsafe { spd_two_mode_evolve(&bad, 0.5, c.as_mut_ptr()) }, SpdStatus::Domain);
}

#[test]
fn spearman_and_fit() {
    let a = [1.0, 2.0, 3.0, 4.0];
    let b = [10.0, 20.0, 25.0, 40.0];
    let mut rho = 0.0;
    assert_eq!(unsafe { spd_spearman(a.as_ptr(), b.as_ptr(), 4, &mut rho) }, SpdStatus::Ok);
    assert_eq!(rho, 1.0);
    let flat = [1.0; 4];
    assert_eq!(unsafe { spd_spearman(a.as_ptr(), flat.as_ptr(), 4, &mut rho) }, SpdStatus::Undefined);

    let n = 401;
    let f: Vec<f64> = (0..n).map(|i| 950.0 + 100.0 * i as f64 / (n - 1) as f64).collect();
    let (mut x, mut y) = (Vec::new(), Vec::new());
    for &fi in &f {
        let z = num_complex::Complex64::new(0.0, 0.3).exp() * 2.0 * 4.0 / num_complex::Complex64::new(4.0, fi - 1001.0);
        x.push(z.re);
        y.push(z.im);
    }
    let mut fit = ptr::null_mut();
    unsafe {
        assert_eq!(spd_fit_lorentzians(f.as_ptr(), x.as_ptr(), y.as_ptr(), n, 1, &mut fit), SpdStatus::Ok);
        assert_eq!(spd_fit_len(fit), 1);
        let mut c = std::mem::zeroed::<SpdLorentzian>();
        assert_eq!(spd_fit_component(fit, 0, &mut c), SpdStatus::Ok);
        assert!((c.amplitude - 2.0).abs() < 1e-8);
        assert!((c.linewidth - 4.0).abs() < 1e-8);
        assert!((c.center - 1001.0).abs() < 1e-8);
        assert!((c.phase - 0.3).abs() < 1e-8);
        let mut bg = [1.0; 2];
        let mut rms = 1.0;
        assert_eq!(spd_fit_summary(fit, bg.as_mut_ptr(), &mut rms), SpdStatus::Ok);
        assert!(bg[0].abs() < 1e-8 && bg[1].abs() < 1e-8 && rms < 1e-8);
        spd_fit_free(fit);
    }
}

#[test]
fn status_strings() {
    let s = |v: i32| unsafe { CStr::from_ptr(spd_status_str(v)) }.to_str().unwrap();
    assert_eq!(s(SpdStatus::Ok as i32), "ok");
    assert_eq!(s(SpdStatus::Panic as i32), "internal panic");
    assert_eq!(s(99), "unknown status");
    assert_eq!(s(-1), "unknown status");
}
