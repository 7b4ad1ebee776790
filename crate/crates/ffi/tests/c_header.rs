//! Compiles and runs a small C program against the generated header and
//! the static library.

use std::path::{Path, PathBuf};
use std::process::Command;

const PROGRAM: &str = r#"
#include <math.h>
#include <stdio.h>
#include "fockbloch.h"

int main(void) {
    FbModel *m = NULL;
    if (fb_model_parametric(1.0, 0.0, 0.0, &m) != FB_STATUS_OK) return 10;
    FbPropagation *r = NULL;
    FbIntegratorConfig cfg = fb_integrator_defaults();
    if (fb_propagate_vacuum(m, 2.0, 21, &cfg, &r) != FB_STATUS_OK) return 11;
    double p0[21];
    size_t n = 0;
    if (fb_propagation_series(r, 0, p0, 21, &n) != FB_STATUS_OK || n != 21) return 12;
    double c = cosh(2.0);
    if (fabs(p0[20] - 1.0 / (c * c)) > 1e-8) return 13;
    fb_propagation_free(r);
    fb_model_free(m);

    if (fb_model_driven(1.0, 0.0, 1.0, NULL) != FB_STATUS_NULL_POINTER) return 14;
    char msg[128];
    if (fb_last_error_message(msg, sizeof msg) == 0) return 15;
    printf("ok %s\n", fb_version());
    return 0;
}
"#;

fn target_dir() -> PathBuf {
    // target/<profile>/deps/<test-binary>
    let exe = std::env::current_exe().unwrap();
    exe.parent().unwrap().parent().unwrap().to_path_buf()
}

fn have(tool: &str) -> bool {
    Command::new(tool).arg("--version").output().is_ok()
}

#[test]
fn c_program_links_and_runs() {
    let lib = target_dir().join("libfockbloch_ffi.a");
    let include = Path::new(env!("CARGO_MANIFEST_DIR")).join("include");
    assert!(include.join("fockbloch.h").exists(), "header not generated");
    if !have("cc") || !lib.exists() {
        eprintln!("skipping: cc or {} unavailable", lib.display());
        return;
    }
    let dir = tempfile::tempdir().unwrap();
    let src = dir.path().join("main.c");
    let exe = dir.path().join("main");
    std::fs::write(&src, PROGRAM).unwrap();
    let status = Command::new("cc")
        .args(["-std=c99", "-Wall", "-Werror", "-o"])
        .arg(&exe)
        .arg(&src)
        .arg("-I")
        .arg(&include)
        .arg(&lib)
        .args(["-lm", "-lpthread", "-ldl"])
        .status()
        .unwrap();
    assert!(status.success(), "C compile failed");
    let out = Command::new(&exe).output().unwrap();
    assert!(out.status.success(), "C program exit {:?}", out.status.code());
    assert!(String::from_utf8_lossy(&out.stdout).starts_with("ok "));
}
