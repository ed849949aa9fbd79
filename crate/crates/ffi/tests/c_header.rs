//! Compiles a C program against the generated header and the static library.

use std::path::{Path, PathBuf};
use std::process::Command;

fn target_dir() -> PathBuf {
    // target/<profile>/deps/<test binary>
    let exe = std::env::current_exe().unwrap();
    exe.parent().unwrap().parent().unwrap().to_path_buf()
}

fn have_cc() -> bool {
    Command::new("cc").arg("--version").output().is_ok()
}

#[test]
fn header_declares_the_api() {
    let header = std::fs::read_to_string(Path::new(env!("CARGO_MANIFEST_DIR")).join("include/skcw.h")).unwrap();
    for name in [
        "typedef struct SkcwMatrix SkcwMatrix;",
        "SKCW_STATUS_OK = 0",
        "skcw_matrix_sample(",
        "skcw_matrix_sample_tilted(",
        "skcw_matrix_from_upper(",
        "skcw_matrix_free(",
        "skcw_log_partition(",
        "skcw_signed_cycle(",
        "skcw_chebyshev_lss(",
        "skcw_clt_targets(",
        "skcw_curie_weiss_tau(",
        "skcw_second_moment_target(",
        "skcw_catalan_psi(",
        "skcw_last_error_message(",
        "skcw_version(",
    ] {
        assert!(header.contains(name), "missing {name}");
    }
}

#[test]
fn c_program_links_and_runs() {
    if !have_cc() {
        eprintln!("cc not found, skipping");
        return;
    }
    let manifest = Path::new(env!("CARGO_MANIFEST_DIR"));
    let lib = target_dir().join("libskcw_ffi.a");
    assert!(lib.exists(), "static library not found at {}", lib.display());
    let out = Path::new(env!("CARGO_TARGET_TMPDIR")).join("skcw_smoke");
    let status = Command::new("cc")
        .arg(manifest.join("tests/c/smoke.c"))
        .arg("-I")
        .arg(manifest.join("include"))
        .arg(&lib)
        .args(["-lpthread", "-ldl", "-lm", "-o"])
        .arg(&out)
        .status()
        .unwrap();
    assert!(status.success(), "C compilation failed");
    let run = Command::new(&out).output().unwrap();
    assert!(run.status.success(), "exit {:?}", run.status.code());
    let stdout = String::from_utf8(run.stdout).unwrap();
    assert!(stdout.contains("0.0246531 0.0813410"), "{stdout}");
}
