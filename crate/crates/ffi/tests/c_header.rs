//! Compiles a small C program against the generated header and static library.

use std::path::{Path, PathBuf};
use std::process::Command;

const PROGRAM: &str = r#"
#include <stdio.h>
#include "ionx.h"

int main(void) {
    IonxModel *m = NULL;
    if (ionx_model_new("grid=scaled\nsystem.d=25\nsystem.delta=20\n", &m) != IONX_STATUS_OK) return 10;
    size_t n = 0;
    ionx_model_compartments(m, &n);
    IonxState *eq = NULL;
    if (ionx_equilibrium(m, &eq) != IONX_STATUS_OK) return 11;
    double j = 1.0;
    ionx_exit_flux(m, eq, &j);
    IonxStatus bad = ionx_state_potential(eq, NULL, n);
    printf("%zu %.3e %d %s\n", n, j, (int)bad, ionx_last_error_message());
    ionx_state_free(eq);
    ionx_model_free(m);
    return 0;
}
"#;

fn has_cc() -> bool {
    Command::new("cc").arg("--version").output().is_ok()
}

fn static_lib() -> Option<PathBuf> {
    let tmp = Path::new(env!("CARGO_TARGET_TMPDIR"));
    let profile_dir = tmp
        .parent()?
        .join(if cfg!(debug_assertions) { "debug" } else { "release" });
    let lib = profile_dir.join("libionx_ffi.a");
    lib.exists().then_some(lib)
}

#[test]
fn header_is_valid_c() {
    if !has_cc() {
        eprintln!("cc not found, skipping");
        return;
    }
    let header = Path::new(env!("CARGO_MANIFEST_DIR")).join("include/ionx.h");
    let text = std::fs::read_to_string(&header).unwrap();
    for sym in [
        "ionx_model_new",
        "ionx_simulate",
        "ionx_last_error_message",
        "IONX_STATUS_BUFFER_TOO_SMALL",
    ] {
        assert!(text.contains(sym), "{sym} missing from header");
    }
    let status = Command::new("cc")
        .args(["-fsyntax-only", "-x", "c"])
        .arg(&header)
        .status()
        .unwrap();
    assert!(status.success());
}

#[test]
fn c_program_links_and_runs() {
    let (true, Some(lib)) = (has_cc(), static_lib()) else {
        eprintln!("cc or static library not available, skipping");
        return;
    };
    let dir = Path::new(env!("CARGO_TARGET_TMPDIR")).join("ffi_c_smoke");
    std::fs::create_dir_all(&dir).unwrap();
    let src = dir.join("smoke.c");
    let exe = dir.join("smoke");
    std::fs::write(&src, PROGRAM).unwrap();
    let include = Path::new(env!("CARGO_MANIFEST_DIR")).join("include");
    let out = Command::new("cc")
        .arg(&src)
        .arg("-I")
        .arg(&include)
        .arg(&lib)
        .args(["-lpthread", "-ldl", "-lm", "-o"])
        .arg(&exe)
        .output()
        .unwrap();
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let run = Command::new(&exe).output().unwrap();
    assert!(run.status.success(), "exit {:?}", run.status.code());
    let stdout = String::from_utf8(run.stdout).unwrap();
    let fields: Vec<&str> = stdout.split_whitespace().collect();
    assert!(fields[0].parse::<usize>().unwrap() > 0);
    assert!(fields[1].parse::<f64>().unwrap().abs() < 1e-9);
    assert_eq!(fields[2], "1");
    assert!(stdout.contains("buffer is null"));
}
