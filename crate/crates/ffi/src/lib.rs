//! C ABI over the noisyrank core: opaque model handles, status codes, and
//! one entry point per algorithm. The generated header lives in
//! `include/noisyrank.h`.
//!
//! Conventions: every function returns an [`NrStatus`]; results come back
//! through out-pointers; rankings fill a caller-provided buffer of length
//! `nr_model_n(model)` in ascending strength order.

use std::ffi::CStr;
use std::os::raw::{c_char, c_double, c_int};
use std::path::Path;

use noisyrank::{
    binary_search_ranking, eval_err, is_eps_maximum, knockout, rank3, verify_properties, Arena,
    BsrConfig, Ctx, ElementId, Error, MergeRankBackend, PreferenceModel, RngFactory, Tally,
};

/// Opaque preference-model handle.
pub struct NrModel {
    inner: PreferenceModel,
}

/// Status code returned by every entry point.
#[repr(C)]
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum NrStatus {
    NrOk = 0,
    NrInvalidArgument = 1,
    NrIoError = 2,
    NrNullPointer = 3,
    NrInternal = 4,
}

/// Model property report with C-friendly booleans (0 or 1).
#[repr(C)]
#[derive(Clone, Copy, Debug)]
pub struct NrModelReport {
    pub sst_holds: c_int,
    pub sti_holds: c_int,
    pub gamma: c_double,
}

fn status_of(e: &Error) -> NrStatus {
    match e {
        Error::InvalidParameter(_) | Error::InvalidModel(_) => NrStatus::NrInvalidArgument,
        Error::Io { .. } => NrStatus::NrIoError,
    }
}

fn install(out: *mut *mut NrModel, model: Result<PreferenceModel, Error>) -> NrStatus {
    if out.is_null() {
        return NrStatus::NrNullPointer;
    }
    match model {
        Ok(inner) => {
            unsafe { *out = Box::into_raw(Box::new(NrModel { inner })) };
            NrStatus::NrOk
        }
        Err(e) => status_of(&e),
    }
}

/// Borrows the model behind a raw handle, or returns early with
/// `NrNullPointer`.
macro_rules! model_ref {
    ($ptr:expr) => {
        match unsafe { $ptr.as_ref() } {
            Some(m) => &m.inner,
            None => return NrStatus::NrNullPointer,
        }
    };
}

macro_rules! out_ref {
    ($ptr:expr) => {
        match unsafe { $ptr.as_mut() } {
            Some(p) => p,
            None => return NrStatus::NrNullPointer,
        }
    };
}

/// Creates an adjacent-gap model: every truly stronger element wins with
/// probability `p`.
#[no_mangle]
pub extern "C" fn nr_model_adjacent_gap(n: usize, p: c_double, out: *mut *mut NrModel) -> NrStatus {
    install(out, PreferenceModel::adjacent_gap(n, p))
}

/// Creates a single-gap model: element 1 wins with probability 0.6, all
/// other pairs with probability `0.5 + ptilde`.
#[no_mangle]
pub extern "C" fn nr_model_single_gap(
    n: usize,
    ptilde: c_double,
    out: *mut *mut NrModel,
) -> NrStatus {
    install(out, PreferenceModel::single_gap(n, ptilde))
}

/// Creates a Mallows model with dispersion `phi` in (0, 1).
#[no_mangle]
pub extern "C" fn nr_model_mallows(n: usize, phi: c_double, out: *mut *mut NrModel) -> NrStatus {
    install(out, PreferenceModel::mallows(n, phi))
}

/// Creates a Bradley-Terry-Luce model from `len` positive weights.
///
/// # Safety
/// `weights` must point to `len` readable doubles.
#[no_mangle]
pub unsafe extern "C" fn nr_model_btl(
    weights: *const c_double,
    len: usize,
    out: *mut *mut NrModel,
) -> NrStatus {
    if weights.is_null() {
        return NrStatus::NrNullPointer;
    }
    let w = std::slice::from_raw_parts(weights, len).to_vec();
    install(out, PreferenceModel::btl(w))
}

/// Loads an explicit probability matrix from a CSV file (n rows of n
/// comma-separated decimals).
///
/// # Safety
/// `path` must be a valid NUL-terminated string.
#[no_mangle]
pub unsafe extern "C" fn nr_model_matrix_csv(
    path: *const c_char,
    out: *mut *mut NrModel,
) -> NrStatus {
    if path.is_null() {
        return NrStatus::NrNullPointer;
    }
    let path = match CStr::from_ptr(path).to_str() {
        Ok(s) => s,
        Err(_) => return NrStatus::NrInvalidArgument,
    };
    install(out, PreferenceModel::matrix_from_csv(Path::new(path)))
}

/// Releases a model handle. Passing NULL is a no-op.
///
/// # Safety
/// `model` must have come from a constructor and not been freed before.
#[no_mangle]
pub unsafe extern "C" fn nr_model_free(model: *mut NrModel) {
    if !model.is_null() {
        drop(Box::from_raw(model));
    }
}

/// Number of elements in the model; 0 for a NULL handle.
#[no_mangle]
pub extern "C" fn nr_model_n(model: *const NrModel) -> usize {
    unsafe { model.as_ref() }.map_or(0, |m| m.inner.n())
}

/// Checks strong stochastic transitivity and the stochastic triangle
/// inequality over all triples, within slack `tol`.
#[no_mangle]
pub extern "C" fn nr_verify(
    model: *const NrModel,
    tol: c_double,
    out: *mut NrModelReport,
) -> NrStatus {
    let m = model_ref!(model);
    let out = out_ref!(out);
    match verify_properties(m, tol) {
        Ok(r) => {
            *out = NrModelReport {
                sst_holds: r.sst_holds.into(),
                sti_holds: r.sti_holds.into(),
                gamma: r.gamma,
            };
            NrStatus::NrOk
        }
        Err(e) => status_of(&e),
    }
}

/// Knockout maximum selection over all model elements. On success `*winner`
/// is the selected element id (1-based) and `*comparisons` the duel count.
#[no_mangle]
pub extern "C" fn nr_knockout(
    model: *const NrModel,
    eps: c_double,
    delta: c_double,
    gamma: c_double,
    seed: u64,
    winner: *mut usize,
    comparisons: *mut u64,
) -> NrStatus {
    let m = model_ref!(model);
    let winner = out_ref!(winner);
    let comparisons = out_ref!(comparisons);
    let tally = Tally::new();
    let mut arena = Arena::new(m);
    let input: Vec<ElementId> = (1..=m.n()).map(ElementId).collect();
    match knockout(
        &mut arena,
        &tally,
        &input,
        eps,
        delta,
        gamma,
        &RngFactory::new(seed),
    ) {
        Ok(w) => {
            *winner = w.0;
            *comparisons = tally.total();
            NrStatus::NrOk
        }
        Err(e) => status_of(&e),
    }
}

fn write_ranking_out(
    seq: &[ElementId],
    ranking: *mut usize,
    len: usize,
) -> Result<(), NrStatus> {
    if ranking.is_null() {
        return Err(NrStatus::NrNullPointer);
    }
    if len != seq.len() {
        return Err(NrStatus::NrInvalidArgument);
    }
    let out = unsafe { std::slice::from_raw_parts_mut(ranking, len) };
    for (slot, e) in out.iter_mut().zip(seq) {
        *slot = e.0;
    }
    Ok(())
}

/// Noisy merge-sort ranking of all model elements. `ranking` must hold
/// `len == nr_model_n(model)` slots and is filled ascending by strength.
///
/// # Safety
/// `ranking` must point to `len` writable `usize` slots.
#[no_mangle]
pub unsafe extern "C" fn nr_merge_rank(
    model: *const NrModel,
    eps: c_double,
    delta: c_double,
    seed: u64,
    ranking: *mut usize,
    len: usize,
    comparisons: *mut u64,
) -> NrStatus {
    let m = model_ref!(model);
    let comparisons = out_ref!(comparisons);
    let tally = Tally::new();
    let arena = Arena::new(m);
    let ctx = Ctx::new(&arena, &tally);
    let input: Vec<ElementId> = (1..=m.n()).map(ElementId).collect();
    match rank3(ctx, &input, eps, delta, &RngFactory::new(seed)) {
        Ok(r) => match write_ranking_out(&r.0, ranking, len) {
            Ok(()) => {
                *comparisons = tally.total();
                NrStatus::NrOk
            }
            Err(s) => s,
        },
        Err(e) => status_of(&e),
    }
}

/// Binary-search ranking of all model elements. `anchors == 0` uses the
/// `floor(n / (log2 n)^x)` formula; a positive value fixes the anchor
/// count. `ranking` must hold `len == nr_model_n(model)` slots.
///
/// # Safety
/// `ranking` must point to `len` writable `usize` slots.
#[no_mangle]
pub unsafe extern "C" fn nr_bsr(
    model: *const NrModel,
    eps: c_double,
    x: c_double,
    anchors: usize,
    seed: u64,
    ranking: *mut usize,
    len: usize,
    comparisons: *mut u64,
) -> NrStatus {
    let m = model_ref!(model);
    let comparisons = out_ref!(comparisons);
    let tally = Tally::new();
    let mut arena = Arena::new(m);
    let input: Vec<ElementId> = (1..=m.n()).map(ElementId).collect();
    let cfg = BsrConfig {
        eps,
        x,
        anchor_override: (anchors > 0).then_some(anchors),
    };
    match binary_search_ranking(
        &mut arena,
        &tally,
        &input,
        &cfg,
        &MergeRankBackend,
        &RngFactory::new(seed),
    ) {
        Ok(r) => match write_ranking_out(&r.ranking.0, ranking, len) {
            Ok(()) => {
                *comparisons = tally.total();
                NrStatus::NrOk
            }
            Err(s) => s,
        },
        Err(e) => status_of(&e),
    }
}

/// Error of an ordered sequence (ascending strength) under the true model;
/// the sequence is an eps-ranking iff the result is at most eps.
///
/// # Safety
/// `ranking` must point to `len` readable 1-based element ids.
#[no_mangle]
pub unsafe extern "C" fn nr_eval_err(
    model: *const NrModel,
    ranking: *const usize,
    len: usize,
    err: *mut c_double,
) -> NrStatus {
    let m = model_ref!(model);
    let err = out_ref!(err);
    if ranking.is_null() {
        return NrStatus::NrNullPointer;
    }
    let seq: Vec<ElementId> = std::slice::from_raw_parts(ranking, len)
        .iter()
        .map(|&i| ElementId(i))
        .collect();
    if seq.iter().any(|e| e.0 < 1 || e.0 > m.n()) {
        return NrStatus::NrInvalidArgument;
    }
    *err = eval_err(&seq, m);
    NrStatus::NrOk
}

/// True-model check that `element` is within `eps` of the strongest
/// element. `*result` is 1 or 0.
#[no_mangle]
pub extern "C" fn nr_is_eps_maximum(
    model: *const NrModel,
    element: usize,
    eps: c_double,
    result: *mut c_int,
) -> NrStatus {
    let m = model_ref!(model);
    let result = out_ref!(result);
    if element < 1 || element > m.n() {
        return NrStatus::NrInvalidArgument;
    }
    *result = is_eps_maximum(ElementId(element), m, eps).into();
    NrStatus::NrOk
}

#[cfg(test)]
mod tests {
    use super::*;

    fn make(n: usize, p: f64) -> *mut NrModel {
        let mut h: *mut NrModel = std::ptr::null_mut();
        assert_eq!(nr_model_adjacent_gap(n, p, &mut h), NrStatus::NrOk);
        h
    }

    #[test]
    fn constructor_validation_and_lifecycle() {
        let mut h: *mut NrModel = std::ptr::null_mut();
        assert_eq!(
            nr_model_adjacent_gap(4, 1.5, &mut h),
            NrStatus::NrInvalidArgument
        );
        assert_eq!(
            nr_model_adjacent_gap(4, 0.6, std::ptr::null_mut()),
            NrStatus::NrNullPointer
        );
        let h = make(4, 0.6);
        assert_eq!(nr_model_n(h), 4);
        unsafe { nr_model_free(h) };
        unsafe { nr_model_free(std::ptr::null_mut()) };
    }

    #[test]
    fn knockout_and_verify_through_the_abi() {
        let h = make(8, 0.6);
        let (mut winner, mut comparisons) = (0usize, 0u64);
        assert_eq!(
            nr_knockout(h, 0.05, 0.1, 1.0, 7, &mut winner, &mut comparisons),
            NrStatus::NrOk
        );
        assert!((1..=8).contains(&winner));
        assert!(comparisons > 0);

        let mut report = NrModelReport {
            sst_holds: 0,
            sti_holds: 0,
            gamma: 0.0,
        };
        assert_eq!(nr_verify(h, 1e-12, &mut report), NrStatus::NrOk);
        assert_eq!(report.sst_holds, 1);
        assert_eq!(report.sti_holds, 1);
        assert_eq!(report.gamma, 1.0);
        unsafe { nr_model_free(h) };
    }

    #[test]
    fn rankings_through_the_abi() {
        let h = make(8, 0.95);
        let mut ranking = [0usize; 8];
        let mut comparisons = 0u64;
        let st = unsafe {
            nr_merge_rank(h, 0.1, 0.1, 3, ranking.as_mut_ptr(), 8, &mut comparisons)
        };
        assert_eq!(st, NrStatus::NrOk);
        let mut sorted = ranking;
        sorted.sort();
        assert_eq!(sorted, [1, 2, 3, 4, 5, 6, 7, 8]);

        let mut err = f64::NAN;
        assert_eq!(
            unsafe { nr_eval_err(h, ranking.as_ptr(), 8, &mut err) },
            NrStatus::NrOk
        );
        assert!(err.is_finite());

        let st = unsafe {
            nr_bsr(h, 0.1, 3.0, 4, 5, ranking.as_mut_ptr(), 8, &mut comparisons)
        };
        assert_eq!(st, NrStatus::NrOk);
        let mut sorted = ranking;
        sorted.sort();
        assert_eq!(sorted, [1, 2, 3, 4, 5, 6, 7, 8]);

        // wrong buffer length is rejected before any write
        let st = unsafe {
            nr_merge_rank(h, 0.1, 0.1, 3, ranking.as_mut_ptr(), 7, &mut comparisons)
        };
        assert_eq!(st, NrStatus::NrInvalidArgument);
        unsafe { nr_model_free(h) };
    }

    #[test]
    fn eps_maximum_through_the_abi() {
        let h = make(8, 0.6);
        let mut flag = -1;
        assert_eq!(nr_is_eps_maximum(h, 1, 0.05, &mut flag), NrStatus::NrOk);
        assert_eq!(flag, 1);
        assert_eq!(nr_is_eps_maximum(h, 2, 0.05, &mut flag), NrStatus::NrOk);
        assert_eq!(flag, 0);
        assert_eq!(
            nr_is_eps_maximum(h, 9, 0.05, &mut flag),
            NrStatus::NrInvalidArgument
        );
        unsafe { nr_model_free(h) };
    }
}
