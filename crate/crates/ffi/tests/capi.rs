use std::ffi::{CStr, CString};
use std::path::PathBuf;
use std::process::Command;
use std::ptr;

use eagle_tune_ffi::*;

fn last_error() -> String {
    let p = et_last_error_message();
    assert!(!p.is_null());
    unsafe { CStr::from_ptr(p) }.to_string_lossy().into_owned()
}

#[test]
fn lyapunov_worked_case_and_errors() {
    let a = [0.0, -1.0, 1.0, -1.0];
    let q = [1.0, 0.0, 0.0, 1.0];
    let mut p = [0.0; 3];
    assert_eq!(unsafe { et_solve_lyapunov(a.as_ptr(), q.as_ptr(), p.as_mut_ptr()) }, EtStatus::Ok);
    for (got, want) in p.iter().zip([1.5, -0.5, 1.0]) {
        assert!((got - want).abs() < 1e-12);
    }
    let unstable = [1.0, 0.0, 0.0, -1.0];
    let status = unsafe { et_solve_lyapunov(unstable.as_ptr(), q.as_ptr(), p.as_mut_ptr()) };
    assert_eq!(status, EtStatus::NotHurwitz);
    assert!(last_error().contains("Hurwitz"));
    let status = unsafe { et_solve_lyapunov(ptr::null(), q.as_ptr(), p.as_mut_ptr()) };
    assert_eq!(status, EtStatus::NullPointer);
}

#[test]
fn levy_density_value() {
    let mut v = 0.0;
    assert_eq!(unsafe { et_levy_density(2.0, 1.5, &mut v) }, EtStatus::Ok);
    assert!((v - 0.052895).abs() < 1e-5);
    assert_eq!(unsafe { et_levy_density(-1.0, 1.5, &mut v) }, EtStatus::InvalidArgument);
}

#[test]
fn benchmark_objective_and_run() {
    let name = CString::new("sphere").unwrap();
    let mut f = ptr::null_mut();
    assert_eq!(unsafe { et_objective_benchmark_new(name.as_ptr(), 2, -5.0, 5.0, &mut f) }, EtStatus::Ok);
    assert_eq!(unsafe { et_objective_dimension(f) }, 2);
    let mut v = 0.0;
    assert_eq!(unsafe { et_objective_evaluate(f, [3.0, 4.0].as_ptr(), 2, &mut v) }, EtStatus::Ok);
    assert_eq!(v, 25.0);
    assert_eq!(unsafe { et_objective_evaluate(f, [3.0].as_ptr(), 1, &mut v) }, EtStatus::InvalidArgument);

    let mut results = Vec::new();
    for _ in 0..2 {
        let mut r = ptr::null_mut();
        assert_eq!(unsafe { et_run(f, EtAlgorithm::EsFfa, 7, 0, &mut r) }, EtStatus::Ok);
        let mut x = [0.0; 2];
        let (mut best, mut evals) = (0.0, 0u64);
        let status = unsafe { et_result_best(r, x.as_mut_ptr(), 2, &mut best, &mut evals, ptr::null_mut()) };
        assert_eq!(status, EtStatus::Ok);
        assert!(evals <= 600 && best < 1e-2);
        results.push((x, best));
        unsafe { et_result_free(r) };
    }
    assert_eq!(results[0], results[1]);

    let mut r = ptr::null_mut();
    assert_eq!(unsafe { et_run(f, EtAlgorithm::Pso, 1, 10, &mut r) }, EtStatus::InvalidArgument);
    assert!(last_error().contains("budget"));
    unsafe { et_objective_free(f) };

    let bad = CString::new("ackley").unwrap();
    let mut g = ptr::null_mut();
    assert_eq!(unsafe { et_objective_benchmark_new(bad.as_ptr(), 2, -5.0, 5.0, &mut g) }, EtStatus::InvalidArgument);
    assert!(g.is_null());
}

#[test]
fn config_round_trip() {
    let text = CString::new("[experiment]\nobjective = \"sphere\"\nalgorithm = \"pso\"\n").unwrap();
    let mut c = ptr::null_mut();
    assert_eq!(unsafe { et_config_parse(text.as_ptr(), &mut c) }, EtStatus::Ok);
    assert_eq!(unsafe { et_config_set_seed(c, 11) }, EtStatus::Ok);
    let dir = tempfile::tempdir().unwrap();
    let out = CString::new(dir.path().to_str().unwrap()).unwrap();
    let mut r = ptr::null_mut();
    assert_eq!(unsafe { et_config_run(c, out.as_ptr(), &mut r) }, EtStatus::Ok);
    assert!(dir.path().join("summary.json").exists());
    let mut evals = 0u64;
    unsafe { et_result_best(r, ptr::null_mut(), 0, ptr::null_mut(), &mut evals, ptr::null_mut()) };
    assert_eq!(evals, 600);
    unsafe { et_result_free(r) };

    let mut f = ptr::null_mut();
    assert_eq!(unsafe { et_objective_from_config(c, &mut f) }, EtStatus::Ok);
    assert_eq!(unsafe { et_objective_dimension(f) }, 2);
    unsafe { et_objective_free(f) };
    unsafe { et_config_free(c) };

    let bad = CString::new("[pso]\npopulation = 1\n").unwrap();
    let mut c = ptr::null_mut();
    assert_eq!(unsafe { et_config_parse(bad.as_ptr(), &mut c) }, EtStatus::Config);
    assert!(last_error().contains("pso.population"));
    let missing = CString::new("/nonexistent/eagle.toml").unwrap();
    assert_eq!(unsafe { et_config_load(missing.as_ptr(), &mut c) }, EtStatus::Io);
}

#[test]
fn header_declares_api() {
    let header = std::fs::read_to_string(concat!(env!("CARGO_MANIFEST_DIR"), "/include/eagle_tune.h")).unwrap();
    for sym in [
        "et_last_error_message",
        "et_solve_lyapunov",
        "et_levy_density",
        "et_objective_benchmark_new",
        "et_objective_from_config",
        "et_objective_evaluate",
        "et_objective_free",
        "et_run",
        "et_result_best",
        "et_result_free",
        "et_config_parse",
        "et_config_load",
        "et_config_run",
        "et_config_free",
        "typedef struct EtObjective EtObjective",
    ] {
        assert!(header.contains(sym), "header lacks {sym}");
    }
}

const C_SMOKE: &str = r#"
#include <stdio.h>
#include "eagle_tune.h"

int main(void) {
    double a[4] = {0.0, -1.0, 1.0, -1.0}, q[4] = {1.0, 0.0, 0.0, 1.0}, p[3];
    if (et_solve_lyapunov(a, q, p) != ET_STATUS_OK) return 1;
    EtObjective *f = NULL;
    if (et_objective_benchmark_new("rastrigin", 2, -5.12, 5.12, &f) != ET_STATUS_OK) return 2;
    EtResult *r = NULL;
    if (et_run(f, ET_ALGORITHM_ES_PSO, 3, 0, &r) != ET_STATUS_OK) return 3;
    double x[2], best;
    uint64_t evals;
    if (et_result_best(r, x, 2, &best, &evals, NULL) != ET_STATUS_OK) return 4;
    printf("%.3f %.3f %.3f %llu\n", p[0], p[1], p[2], (unsigned long long)evals);
    et_result_free(r);
    et_objective_free(f);
    if (et_objective_evaluate(NULL, x, 2, &best) != ET_STATUS_NULL_POINTER) return 5;
    return et_last_error_message() == NULL ? 6 : 0;
}
"#;

/// Compiles a C program against the generated header and the static library.
/// Skipped when no C compiler or static archive is available.
#[test]
fn c_program_links_against_staticlib() {
    let exe = std::env::current_exe().unwrap();
    let profile_dir = exe.parent().and_then(|d| d.parent()).unwrap().to_path_buf();
    let lib = profile_dir.join("libeagle_tune_ffi.a");
    if !lib.exists() || Command::new("cc").arg("--version").output().is_err() {
        eprintln!("skipping: no static library at {} or no cc", lib.display());
        return;
    }
    let dir = tempfile::tempdir().unwrap();
    let src = dir.path().join("smoke.c");
    std::fs::write(&src, C_SMOKE).unwrap();
    let bin: PathBuf = dir.path().join("smoke");
    let include = concat!(env!("CARGO_MANIFEST_DIR"), "/include");
    let status = Command::new("cc")
        .args(["-std=c99", "-Wall", "-Werror", "-I", include])
        .arg(&src)
        .arg(&lib)
        .args(["-lpthread", "-ldl", "-lm", "-o"])
        .arg(&bin)
        .status()
        .unwrap();
    assert!(status.success(), "C compile failed");
    let out = Command::new(&bin).output().unwrap();
    assert!(out.status.success(), "C smoke exited with {:?}", out.status);
    assert_eq!(String::from_utf8_lossy(&out.stdout), "1.500 -0.500 1.000 600\n");
}
