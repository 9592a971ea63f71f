use std::ffi::CString;
use std::path::PathBuf;
use std::process::Command;
use std::ptr;

use expander_codes_ffi::*;

fn last_error() -> String {
    let mut buf = vec![0u8; 256];
    let n = unsafe { tc_last_error(buf.as_mut_ptr() as *mut _, buf.len()) };
    buf.truncate(n.min(255));
    String::from_utf8(buf).unwrap()
}

fn random_code(n: usize) -> *mut TcCode {
    let inner = CString::new("ehamming8").unwrap();
    let mut code = ptr::null_mut();
    let st = unsafe { tc_code_new_random(12, 8, n, 1, inner.as_ptr(), &mut code) };
    assert_eq!(st, TcStatus::Ok);
    code
}

#[test]
fn decode_round_trip() {
    let code = random_code(2000);
    let mut params = ptr::null_mut();
    unsafe {
        assert_eq!(tc_code_len(code), 2000);
        assert_eq!(tc_code_inner_distance(code), 4);
        assert_eq!(tc_params_new(code, 0.1, 0.8, 0, &mut params), TcStatus::Ok);
        assert!((tc_params_gamma_n(params) - 2000.0 * 0.2 / 23.2).abs() < 1e-9);

        let mut word = vec![0u8; 2000];
        for i in [3, 99, 500, 1200, 1999] {
            word[i] = 1;
        }
        let mut ok = true;
        assert_eq!(tc_code_is_codeword(code, word.as_ptr(), word.len(), &mut ok), TcStatus::Ok);
        assert!(!ok);

        let mut out = vec![7u8; 2000];
        assert_eq!(tc_decode(code, params, word.as_ptr(), 2000, out.as_mut_ptr()), TcStatus::Ok);
        assert!(out.iter().all(|&b| b == 0));

        let mut out = vec![7u8; 2000];
        assert_eq!(tc_decode_rand(code, params, 5, word.as_ptr(), 2000, out.as_mut_ptr()), TcStatus::Ok);
        assert!(out.iter().all(|&b| b == 0));

        tc_params_free(params);
        tc_code_free(code);
    }
}

#[test]
fn error_codes() {
    let code = random_code(200);
    let mut params = ptr::null_mut();
    unsafe {
        // delta too small for d0 = 4
        assert_eq!(tc_params_new(code, 0.1, 0.5, 0, &mut params), TcStatus::Infeasible);
        assert!(last_error().contains("d0"));
        assert_eq!(tc_params_new(ptr::null(), 0.1, 0.8, 0, &mut params), TcStatus::NullPointer);
        assert_eq!(tc_params_new(code, 0.1, 0.8, 0, &mut params), TcStatus::Ok);

        let bad = [2u8; 200];
        let mut out = vec![0u8; 200];
        assert_eq!(
            tc_decode(code, params, bad.as_ptr(), 200, out.as_mut_ptr()),
            TcStatus::InvalidArgument
        );
        let short = [0u8; 10];
        assert_eq!(
            tc_decode(code, params, short.as_ptr(), 10, out.as_mut_ptr()),
            TcStatus::InvalidArgument
        );

        // far outside the radius
        let far: Vec<u8> = (0..200).map(|i| (i % 3 == 0) as u8).collect();
        let st = tc_decode(code, params, far.as_ptr(), 200, out.as_mut_ptr());
        assert!(matches!(
            st,
            TcStatus::DecodeFailure | TcStatus::NoAcceptableBranch | TcStatus::SearchBudgetExhausted
        ));

        let missing = CString::new("/nonexistent/code.tanner").unwrap();
        let mut loaded = ptr::null_mut();
        assert_eq!(tc_code_load(missing.as_ptr(), &mut loaded), TcStatus::Io);
        assert!(loaded.is_null());

        let inner = CString::new("rep:x").unwrap();
        let mut other = ptr::null_mut();
        assert_eq!(tc_code_new_random(12, 8, 200, 1, inner.as_ptr(), &mut other), TcStatus::InvalidArgument);

        assert_eq!(tc_code_len(ptr::null()), 0);
        assert!(tc_params_gamma_n(ptr::null()) < 0.0);
        tc_code_free(ptr::null_mut());
        tc_params_free(params);
        tc_code_free(code);
    }
}

#[test]
fn header_declares_every_export() {
    let header = std::fs::read_to_string(concat!(env!("CARGO_MANIFEST_DIR"), "/include/expander_codes.h")).unwrap();
    for name in [
        "tc_last_error",
        "tc_code_load",
        "tc_code_new_random",
        "tc_code_free",
        "tc_code_len",
        "tc_code_inner_distance",
        "tc_code_is_codeword",
        "tc_params_new",
        "tc_params_free",
        "tc_params_gamma_n",
        "tc_decode",
        "tc_decode_rand",
        "typedef struct TcCode TcCode",
        "TC_STATUS_SEARCH_BUDGET_EXHAUSTED = 9",
    ] {
        assert!(header.contains(name), "{name} missing from header");
    }
}

/// Compiles and runs a C program against the header and the static library.
#[test]
fn c_program_links_and_decodes() {
    let manifest = PathBuf::from(env!("CARGO_MANIFEST_DIR"));
    // target/<profile>/deps/<test binary>
    let profile_dir = std::env::current_exe().unwrap().parent().unwrap().parent().unwrap().to_path_buf();
    let lib = profile_dir.join("libexpander_codes_ffi.a");
    assert!(lib.exists(), "static library not found at {}", lib.display());

    let dir = tempfile::tempdir().unwrap();
    let src = dir.path().join("main.c");
    let exe = dir.path().join("main");
    std::fs::write(
        &src,
        r#"
#include <stdio.h>
#include <string.h>
#include "expander_codes.h"

int main(void) {
    TcCode *code = NULL;
    TcParams *params = NULL;
    if (tc_code_new_random(12, 8, 400, 3, "ehamming8", &code) != TC_STATUS_OK) return 1;
    if (tc_params_new(code, 0.1, 0.8, 0, &params) != TC_STATUS_OK) return 2;
    size_t n = tc_code_len(code);
    uint8_t word[400], out[400];
    memset(word, 0, sizeof word);
    word[17] = 1;
    word[250] = 1;
    if (tc_decode(code, params, word, n, out) != TC_STATUS_OK) return 3;
    for (size_t i = 0; i < n; i++) if (out[i]) return 4;
    if (tc_params_new(code, 0.1, 0.1, 0, &params) != TC_STATUS_INFEASIBLE) return 5;
    char msg[128];
    if (tc_last_error(msg, sizeof msg) == 0) return 6;
    tc_params_free(params);
    tc_code_free(code);
    puts("ok");
    return 0;
}
"#,
    )
    .unwrap();
    let status = Command::new("cc")
        .arg(&src)
        .arg("-I")
        .arg(manifest.join("include"))
        .arg(&lib)
        .args(["-lpthread", "-ldl", "-lm", "-o"])
        .arg(&exe)
        .status()
        .expect("a C compiler is required for this test");
    assert!(status.success());
    let out = Command::new(&exe).output().unwrap();
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    assert_eq!(String::from_utf8_lossy(&out.stdout).trim(), "ok");
}
