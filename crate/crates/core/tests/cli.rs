use std::path::Path;
use std::process::{Command, Output};

use num_complex::Complex64 as C64;
use spindiff::output::Table;
use spindiff::signal::{linear_grid, synthesize_spectrum, LorentzianComponent};

const QUICK: &str = "quad.radial = 24\nquad.polar = 16\nquad.azimuthal = 16\nsweep.powers = 0, 0.5, 1:1:4 mW\n";

fn spindiff(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_spindiff"))
        .current_dir(dir)
        .env_remove("SPINDIFF_OUT")
        .env_remove("SPINDIFF_CONFIG")
        .env_remove("SPINDIFF_THREADS")
        .args(args)
        .output()
        .unwrap()
}

fn header(path: &Path) -> (Vec<String>, String) {
    let text = std::fs::read_to_string(path).unwrap();
    let comments: Vec<String> = text.lines().take_while(|l| l.starts_with('#')).map(String::from).collect();
    let cols = text.lines().find(|l| !l.starts_with('#')).unwrap().to_string();
    (comments, cols)
}

fn setup() -> tempfile::TempDir {
    let d = tempfile::tempdir().unwrap();
    std::fs::write(d.path().join("quick.cfg"), QUICK).unwrap();
    d
}

#[test]
fn sweep_pump_columns() {
    let d = setup();
    let out = spindiff(d.path(), &["sweep-pump", "--config", "quick.cfg", "--out", "o"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let (comments, cols) = header(&d.path().join("o/sweep.csv"));
    assert_eq!(cols, "P_mW,N1,N2,f1_Hz,f2_Hz,G1_Hz,G2_Hz,phi1_rad,phi2_rad,J_over_Delta_abs,regime_label");
    assert!(comments[0].starts_with("# scenario_hash: ") && comments[0].len() == 17 + 64);
    assert!(comments[1].starts_with("# units: P_mW=mW, N1=arb"));
    let text = std::fs::read_to_string(d.path().join("o/sweep.csv")).unwrap();
    let rows: Vec<&str> = text.lines().filter(|l| !l.starts_with('#')).skip(1).collect();
    assert_eq!(rows.len(), 6);
    assert!(rows.iter().all(|r| r.ends_with(",coupled") || r.ends_with(",independent")));
}

#[test]
fn modes_image_couple_write_tables() {
    let d = setup();
    for (args, file) in [
        (vec!["modes"], "modes.csv"),
        (vec!["image", "--modes", "s000,s01z"], "image.csv"),
        (vec!["couple", "--samples", "20"], "couple.csv"),
    ] {
        let mut a = args.clone();
        a.extend(["--config", "quick.cfg", "--out", "o"]);
        let out = spindiff(d.path(), &a);
        assert!(out.status.success(), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
        assert!(d.path().join("o").join(file).exists());
    }
    let (_, cols) = header(&d.path().join("o/image.csv"));
    assert_eq!(cols, "z0_mm,s000,s01z");
    let (_, cols) = header(&d.path().join("o/modes.csv"));
    assert_eq!(cols, "id,n,l,p,kR,k_per_m,gamma_per_s,norm");
    assert!(d.path().join("o/couple_trace.csv").exists());
}

#[test]
fn fit_recovers_synthetic_spectrum() {
    let d = setup();
    let truth = [LorentzianComponent::new(2.0, 4.0, 1000.0, 0.5).unwrap()];
    let grid = linear_grid(950.0, 1050.0, 801);
    let s = synthesize_spectrum(&truth, C64::new(0.1, -0.05), &grid, 0.0, 0).unwrap();
    let mut t = Table::new(&[("freq_Hz", "Hz"), ("X", "V"), ("Y", "V")]);
    for i in 0..s.len() {
        t.push(vec![s.freq[i].into(), s.x[i].into(), s.y[i].into()]).unwrap();
    }
    t.write(d.path(), "spec.csv", "input").unwrap();
    let out = spindiff(d.path(), &["fit", "spec.csv", "--components", "1", "--out", "o"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let text = std::fs::read_to_string(d.path().join("o/fit.csv")).unwrap();
    assert!(text.contains("FWHM = 2 gamma_Hz"));
    let mut r = csv::ReaderBuilder::new().comment(Some(b'#')).from_reader(text.as_bytes());
    assert_eq!(
        r.headers().unwrap().iter().collect::<Vec<_>>(),
        ["component_id", "A", "gamma_Hz", "f0_Hz", "phi_rad", "bg_re", "bg_im", "residual_rms"]
    );
    let row: Vec<f64> = r.records().next().unwrap().unwrap().iter().map(|v| v.parse().unwrap()).collect();
    let want = [1.0, 2.0, 4.0, 1000.0, 0.5, 0.1, -0.05];
    for (g, w) in row.iter().zip(want) {
        assert!((g - w).abs() < 1e-7, "{row:?}");
    }
}

#[test]
fn unknown_keys_and_bad_tags_fail() {
    let d = setup();
    std::fs::write(d.path().join("bad.cfg"), "cell.radius = 10 mm\ncell.colour = red\nfoo = 1\n").unwrap();
    let out = spindiff(d.path(), &["modes", "--config", "bad.cfg"]);
    assert!(!out.status.success());
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("cell.colour (line 2)") && err.contains("foo (line 3)"), "{err}");

    std::fs::write(d.path().join("unit.cfg"), "cell.radius = 10 torr\n").unwrap();
    let out = spindiff(d.path(), &["modes", "--config", "unit.cfg"]);
    assert!(!out.status.success());
    assert!(String::from_utf8_lossy(&out.stderr).contains("line 1"));

    let out = spindiff(d.path(), &["figure", "fig7", "--config", "quick.cfg"]);
    assert!(!out.status.success());
    assert!(String::from_utf8_lossy(&out.stderr).contains("unknown figure tag"));
}

#[test]
fn env_and_seed_change_the_hash() {
    let d = setup();
    let hash = |extra_env: Option<(&str, &str)>, args: &[&str]| {
        let mut c = Command::new(env!("CARGO_BIN_EXE_spindiff"));
        c.current_dir(d.path()).env_remove("SPINDIFF_CELL__RADIUS");
        if let Some((k, v)) = extra_env {
            c.env(k, v);
        }
        let mut a = vec!["modes", "--config", "quick.cfg", "--out", "h"];
        a.extend(args);
        let out = c.args(&a).output().unwrap();
        assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
        header(&d.path().join("h/modes.csv")).0[0].clone()
    };
    let base = hash(None, &[]);
    assert_eq!(base, hash(None, &[]));
    assert_ne!(base, hash(Some(("SPINDIFF_CELL__RADIUS", "11 mm")), &[]));
    assert_ne!(base, hash(None, &["--seed", "9"]));
}

#[test]
fn selftest_fault_injection_exits_nonzero() {
    let d = setup();
    let out = spindiff(d.path(), &["selftest", "--inject-fault", "bessel"]);
    assert!(!out.status.success());
    let text = String::from_utf8_lossy(&out.stdout);
    assert!(text.contains("FAIL orthogonality"), "{text}");
    assert!(text.contains("total"));
}
