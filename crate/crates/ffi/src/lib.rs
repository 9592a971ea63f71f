//! C ABI over `expander-codes`.
//!
//! Codes and decoder parameters are opaque handles created by `tc_*_new`/
//! `tc_*_load` functions and released with the matching `tc_*_free`. Words
//! cross the boundary as one byte per coordinate, each 0 or 1. Every fallible
//! call returns a [`TcStatus`]; the message of the last failure on the
//! calling thread is available through [`tc_last_error`].

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use expander_codes::decode::{
    derive_params, main_decode, randomized_decode, DecoderParams, RandDecodeConfig,
};
use expander_codes::harness::parse_inner_spec;
use expander_codes::tanner::Manifest;
use expander_codes::{BipartiteGraph, BitVector, Error, TannerCode};

/// Status codes returned by every fallible function.
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TcStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    Io = 3,
    Parse = 4,
    TooLarge = 5,
    Infeasible = 6,
    DecodeFailure = 7,
    NoAcceptableBranch = 8,
    SearchBudgetExhausted = 9,
    Abort = 10,
    Panic = 11,
}

/// A Tanner code.
pub struct TcCode(TannerCode);

/// Derived decoder constants.
pub struct TcParams(DecoderParams);

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).expect("nul bytes removed");
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn status_of(e: &Error) -> TcStatus {
    match e {
        Error::LengthMismatch { .. } | Error::InvalidParameter(_) | Error::ZeroDimension | Error::Generation(_) => {
            TcStatus::InvalidArgument
        }
        Error::TooLarge { .. } => TcStatus::TooLarge,
        Error::Parse { .. } => TcStatus::Parse,
        Error::Infeasible(_) => TcStatus::Infeasible,
        Error::NoAcceptableBranch => TcStatus::NoAcceptableBranch,
        Error::SearchBudgetExhausted(_) => TcStatus::SearchBudgetExhausted,
        Error::DecodeFailure => TcStatus::DecodeFailure,
        Error::Abort(_) => TcStatus::Abort,
        Error::Io(_) => TcStatus::Io,
    }
}

/// Runs `f`, recording any error or panic as the thread's last error.
fn guard(f: impl FnOnce() -> Result<(), (TcStatus, String)>) -> TcStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => TcStatus::Ok,
        Ok(Err((status, msg))) => {
            set_error(msg);
            status
        }
        Err(_) => {
            set_error("internal panic".into());
            TcStatus::Panic
        }
    }
}

fn lib(e: Error) -> (TcStatus, String) {
    (status_of(&e), e.to_string())
}

fn null(what: &str) -> (TcStatus, String) {
    (TcStatus::NullPointer, format!("{what} is null"))
}

unsafe fn str_arg<'a>(p: *const c_char, what: &str) -> Result<&'a str, (TcStatus, String)> {
    if p.is_null() {
        return Err(null(what));
    }
    CStr::from_ptr(p)
        .to_str()
        .map_err(|_| (TcStatus::InvalidArgument, format!("{what} is not utf-8")))
}

unsafe fn bits_arg(p: *const u8, len: usize) -> Result<BitVector, (TcStatus, String)> {
    if p.is_null() && len > 0 {
        return Err(null("word"));
    }
    let bytes = if len == 0 { &[][..] } else { std::slice::from_raw_parts(p, len) };
    if let Some(i) = bytes.iter().position(|&b| b > 1) {
        return Err((TcStatus::InvalidArgument, format!("word[{i}] is neither 0 nor 1")));
    }
    Ok(BitVector::from_bools(&bytes.iter().map(|&b| b == 1).collect::<Vec<_>>()))
}

unsafe fn write_bits(x: &BitVector, out: *mut u8) {
    for (i, b) in x.iter().enumerate() {
        *out.add(i) = b as u8;
    }
}

/// Copies the last error message of this thread into `buf` (nul-terminated,
/// truncated to `cap - 1` bytes) and returns its full length, or 0 if there
/// is none.
///
/// # Safety
/// `buf` must be null or point to `cap` writable bytes.
#[no_mangle]
pub unsafe extern "C" fn tc_last_error(buf: *mut c_char, cap: usize) -> usize {
    LAST_ERROR.with(|e| {
        let e = e.borrow();
        let Some(msg) = e.as_ref() else {
            return 0;
        };
        let bytes = msg.as_bytes();
        if !buf.is_null() && cap > 0 {
            let n = bytes.len().min(cap - 1);
            ptr::copy_nonoverlapping(bytes.as_ptr(), buf as *mut u8, n);
            *buf.add(n) = 0;
        }
        bytes.len()
    })
}

/// Loads a code from a `tanner v1` manifest.
///
/// # Safety
/// `path` must be a nul-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn tc_code_load(path: *const c_char, out: *mut *mut TcCode) -> TcStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        let path = str_arg(path, "path")?;
        let code = Manifest::load(path).map_err(lib)?;
        *out = Box::into_raw(Box::new(TcCode(code)));
        Ok(())
    })
}

/// Builds a code on a random `(c, d)`-biregular graph with `n` left vertices.
/// `inner` names the inner code: `parity:D`, `rep:D`, `hamming7`,
/// `ehamming8`, or a path to an inner-code file.
///
/// # Safety
/// `inner` must be a nul-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn tc_code_new_random(
    c: usize,
    d: usize,
    n: usize,
    graph_seed: u64,
    inner: *const c_char,
    out: *mut *mut TcCode,
) -> TcStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        let inner = parse_inner_spec(str_arg(inner, "inner")?).map_err(lib)?;
        let graph = BipartiteGraph::random_biregular(c, d, n, graph_seed).map_err(lib)?;
        let code = TannerCode::new(graph, inner).map_err(lib)?;
        *out = Box::into_raw(Box::new(TcCode(code)));
        Ok(())
    })
}

/// # Safety
/// `code` must be null or a handle from this library not yet freed.
#[no_mangle]
pub unsafe extern "C" fn tc_code_free(code: *mut TcCode) {
    if !code.is_null() {
        drop(Box::from_raw(code));
    }
}

/// Block length, or 0 for a null handle.
///
/// # Safety
/// `code` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn tc_code_len(code: *const TcCode) -> usize {
    code.as_ref().map_or(0, |c| c.0.len())
}

/// Minimum distance of the inner code, or 0 for a null handle.
///
/// # Safety
/// `code` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn tc_code_inner_distance(code: *const TcCode) -> usize {
    code.as_ref().map_or(0, |c| c.0.inner().distance())
}

/// Sets `*out` to whether `word` (length `len`) is a codeword.
///
/// # Safety
/// `code` must be a live handle, `word` must point to `len` bytes and `out`
/// must be valid.
#[no_mangle]
pub unsafe extern "C" fn tc_code_is_codeword(
    code: *const TcCode,
    word: *const u8,
    len: usize,
    out: *mut bool,
) -> TcStatus {
    guard(|| {
        let code = code.as_ref().ok_or_else(|| null("code"))?;
        if out.is_null() {
            return Err(null("out"));
        }
        let x = bits_arg(word, len)?;
        *out = code.0.is_codeword(&x).map_err(lib)?;
        Ok(())
    })
}

/// Derives decoder constants for `code` under claimed `(alpha, delta)`
/// expansion. `d0 == 0` uses the inner code's distance.
///
/// # Safety
/// `code` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn tc_params_new(
    code: *const TcCode,
    alpha: f64,
    delta: f64,
    d0: usize,
    out: *mut *mut TcParams,
) -> TcStatus {
    guard(|| {
        let code = &code.as_ref().ok_or_else(|| null("code"))?.0;
        if out.is_null() {
            return Err(null("out"));
        }
        let d0 = if d0 == 0 { code.inner().distance() } else { d0 };
        let g = code.graph();
        let p = derive_params(g.c(), g.d(), alpha, delta, d0, code.len()).map_err(lib)?;
        *out = Box::into_raw(Box::new(TcParams(p)));
        Ok(())
    })
}

/// # Safety
/// `params` must be null or a handle from this library not yet freed.
#[no_mangle]
pub unsafe extern "C" fn tc_params_free(params: *mut TcParams) {
    if !params.is_null() {
        drop(Box::from_raw(params));
    }
}

/// Guaranteed decoding radius `gamma n`, or a negative value for a null handle.
///
/// # Safety
/// `params` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn tc_params_gamma_n(params: *const TcParams) -> f64 {
    params
        .as_ref()
        .map_or(-1.0, |p| p.0.gamma * p.0.spec.n as f64)
}

unsafe fn decode_with(
    code: *const TcCode,
    params: *const TcParams,
    word: *const u8,
    len: usize,
    out: *mut u8,
    f: impl FnOnce(&TannerCode, &DecoderParams, &BitVector) -> expander_codes::Result<BitVector>,
) -> TcStatus {
    guard(|| {
        let code = &code.as_ref().ok_or_else(|| null("code"))?.0;
        let params = &params.as_ref().ok_or_else(|| null("params"))?.0;
        if out.is_null() {
            return Err(null("out"));
        }
        let x = bits_arg(word, len)?;
        let y = f(code, params, &x).map_err(lib)?;
        write_bits(&y, out);
        Ok(())
    })
}

/// Deterministic decoding of `word` into `out`, both of length `len`.
///
/// # Safety
/// Handles must be live; `word` and `out` must point to `len` bytes.
#[no_mangle]
pub unsafe extern "C" fn tc_decode(
    code: *const TcCode,
    params: *const TcParams,
    word: *const u8,
    len: usize,
    out: *mut u8,
) -> TcStatus {
    decode_with(code, params, word, len, out, main_decode)
}

/// Randomized decoding with the default iteration bound.
///
/// # Safety
/// Handles must be live; `word` and `out` must point to `len` bytes.
#[no_mangle]
pub unsafe extern "C" fn tc_decode_rand(
    code: *const TcCode,
    params: *const TcParams,
    seed: u64,
    word: *const u8,
    len: usize,
    out: *mut u8,
) -> TcStatus {
    decode_with(code, params, word, len, out, |c, p, x| {
        let cfg = RandDecodeConfig::from_params(p, seed)?;
        randomized_decode(c, p, &cfg, x)
    })
}
