//! Compile a C client against the generated header and link it to the static library.

use std::path::{Path, PathBuf};
use std::process::Command;

fn header_dir() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("include")
}

fn c_compiler() -> String {
    std::env::var("CC").unwrap_or_else(|_| "cc".into())
}

const CLIENT: &str = r#"
#include <math.h>
#include <stdio.h>
#include "spindiff.h"

int main(void) {
    double roots[2];
    if (spd_robin_roots(0, 0.0, 2, roots) != SPD_STATUS_OK) return 1;
    if (fabs(roots[1] - 2.0 * M_PI) > 1e-9) return 2;
    SpdScenario *s = NULL;
    if (spd_scenario_from_text("bogus = 1", &s) != SPD_STATUS_CONFIG) return 3;
    char msg[128];
    if (spd_last_error(msg, sizeof msg) == 0) return 4;
    if (spd_scenario_default(&s) != SPD_STATUS_OK) return 5;
    char hash[65];
    if (spd_scenario_hash(s, hash, sizeof hash) != SPD_STATUS_OK) return 6;
    spd_scenario_free(s);
    SpdTwoMode m = {{0.0, 0.0}, {1.0, 2.0}, 0.0, 8.0};
    double ev[4];
    int32_t coalesced;
    if (spd_two_mode_eigenvalues(&m, ev, &coalesced) != SPD_STATUS_OK || coalesced) return 7;
    printf("%s %.6f\n", spd_status_str(SPD_STATUS_OK), roots[0]);
    return 0;
}
"#;

#[test]
fn header_parses_as_c() {
    let out = Command::new(c_compiler())
        .args(["-std=c11", "-Wall", "-Werror", "-fsyntax-only", "-x", "c"])
        .arg(header_dir().join("spindiff.h"))
        .output()
        .expect("C compiler available");
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
}

#[test]
fn c_client_links_and_runs() {
    // target/<profile>/deps/header-<hash> -> target/<profile>
    let exe = std::env::current_exe().unwrap();
    let profile_dir = exe.parent().and_then(Path::parent).unwrap();
    let lib = profile_dir.join("libspindiff_ffi.a");
    assert!(lib.exists(), "static library missing at {}", lib.display());
    let dir = tempfile::tempdir().unwrap();
    let src = dir.path().join("client.c");
    std::fs::write(&src, CLIENT).unwrap();
    let bin = dir.path().join("client");
    let out = Command::new(c_compiler())
        .args(["-std=c11", "-D_DEFAULT_SOURCE", "-Wall", "-Werror", "-I"])
        .arg(header_dir())
        .arg(&src)
        .arg(&lib)
        .args(["-lpthread", "-ldl", "-lm", "-o"])
        .arg(&bin)
        .output()
        .unwrap();
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let run = Command::new(&bin).output().unwrap();
    assert!(run.status.success(), "client exited with {:?}", run.status.code());
    assert_eq!(String::from_utf8_lossy(&run.stdout), "ok 3.141593\n");
}
