//! C ABI over the library's flagship queries: opaque frequency-set handles,
//! integer status codes, and a thread-local last-error message. The header
//! in include/thinset.h is regenerated on every build.
//!
//! Conventions: every fallible call returns a `ThinsetStatus`; outputs go
//! through pointers that are written only on `Ok`; string-returning calls
//! take a caller buffer and report the required capacity (including the
//! terminating NUL) so a too-small buffer can be retried.

use std::cell::RefCell;
use std::ffi::c_char;
use std::panic::{catch_unwind, AssertUnwindSafe};

use thinset_lab::codes::{exact_n, gv_greedy, WordOrder};
use thinset_lab::relations::relation_count;
use thinset_lab::riesz::sidon_constant_search;
use thinset_lab::spectrum::{FreqSet, GroupSpec};
use thinset_lab::subgauss::{
    entropy_integral, psi_norm, sg_constant, DiscreteDistribution, LambdaGrid,
};
use thinset_lab::Error;

/// Outcome of a C-ABI call. Nonzero means the output pointers were not
/// written; the detail is available from `thinset_last_error`.
#[repr(i32)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ThinsetStatus {
    Ok = 0,
    /// A required pointer argument was NULL.
    NullArgument = 1,
    /// Sampling grid too coarse for the requested spectrum.
    Alias = 2,
    /// Input outside the operation's domain.
    Domain = 3,
    /// Enumeration budget exhausted before the answer was certain.
    CapExceeded = 4,
    /// Input needed mean zero.
    MeanNotZero = 5,
    /// A documented precondition failed.
    Precondition = 6,
    /// The instance admits no solution.
    Infeasible = 7,
    /// An iterative solver stalled above its tolerance.
    ToleranceNotMet = 8,
    /// An internal certificate check failed.
    CertificateFailure = 9,
    /// A panic was caught at the boundary.
    Panic = 10,
}

/// Opaque handle for a finite frequency set.
pub struct ThinsetFreqSet {
    inner: FreqSet,
}

thread_local! {
    static LAST_ERROR: RefCell<String> = const { RefCell::new(String::new()) };
}

fn set_error(msg: impl Into<String>) {
    LAST_ERROR.with(|e| *e.borrow_mut() = msg.into());
}

fn fail(e: Error) -> ThinsetStatus {
    let status = match &e {
        Error::Alias { .. } => ThinsetStatus::Alias,
        Error::Domain(_) => ThinsetStatus::Domain,
        Error::CapExceeded { .. } => ThinsetStatus::CapExceeded,
        Error::MeanNotZero { .. } => ThinsetStatus::MeanNotZero,
        Error::Precondition(_) => ThinsetStatus::Precondition,
        Error::Infeasible(_) => ThinsetStatus::Infeasible,
        Error::ToleranceNotMet { .. } => ThinsetStatus::ToleranceNotMet,
        Error::CertificateFailure(_) => ThinsetStatus::CertificateFailure,
    };
    set_error(e.to_string());
    status
}

fn null_arg(which: &str) -> ThinsetStatus {
    set_error(format!("{which} must not be NULL"));
    ThinsetStatus::NullArgument
}

/// Runs a fallible body behind a panic guard so unwinds never cross the
/// C boundary.
fn guarded(f: impl FnOnce() -> ThinsetStatus) -> ThinsetStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(status) => status,
        Err(_) => {
            set_error("panic caught at the C boundary");
            ThinsetStatus::Panic
        }
    }
}

/// Copies `s` into `buf` (NUL-terminated, truncating) and returns the
/// capacity a full copy needs, including the NUL.
unsafe fn fill_buf(s: &str, buf: *mut c_char, cap: usize) -> usize {
    let bytes = s.as_bytes();
    if !buf.is_null() && cap > 0 {
        let n = bytes.len().min(cap - 1);
        std::ptr::copy_nonoverlapping(bytes.as_ptr().cast::<c_char>(), buf, n);
        *buf.add(n) = 0;
    }
    bytes.len() + 1
}

unsafe fn freqset_from_parts(
    group: GroupSpec,
    elems: *const i64,
    len: usize,
    out: *mut *mut ThinsetFreqSet,
) -> ThinsetStatus {
    if out.is_null() {
        return null_arg("out");
    }
    if elems.is_null() && len > 0 {
        return null_arg("elems");
    }
    let xs = if len == 0 {
        &[][..]
    } else {
        std::slice::from_raw_parts(elems, len)
    };
    guarded(|| match FreqSet::from_ints(group, xs) {
        Ok(set) => {
            *out = Box::into_raw(Box::new(ThinsetFreqSet { inner: set }));
            ThinsetStatus::Ok
        }
        Err(e) => fail(e),
    })
}

unsafe fn distribution_from_parts(
    values: *const f64,
    weights: *const f64,
    len: usize,
) -> Result<DiscreteDistribution, ThinsetStatus> {
    if values.is_null() {
        return Err(null_arg("values"));
    }
    if weights.is_null() {
        return Err(null_arg("weights"));
    }
    let vs = std::slice::from_raw_parts(values, len);
    let ws = std::slice::from_raw_parts(weights, len);
    let atoms = vs
        .iter()
        .zip(ws)
        .map(|(&v, &w)| (num_complex(v), w))
        .collect();
    DiscreteDistribution::new(atoms).map_err(fail)
}

fn num_complex(re: f64) -> thinset_lab::spectrum::Complex64 {
    thinset_lab::spectrum::Complex64::new(re, 0.0)
}

/// Writes the library version into `buf`; returns the needed capacity.
#[no_mangle]
pub unsafe extern "C" fn thinset_version(buf: *mut c_char, cap: usize) -> usize {
    fill_buf(env!("CARGO_PKG_VERSION"), buf, cap)
}

/// Writes the most recent error message on this thread into `buf`;
/// returns the needed capacity. Empty until a call fails.
#[no_mangle]
pub unsafe extern "C" fn thinset_last_error(buf: *mut c_char, cap: usize) -> usize {
    LAST_ERROR.with(|e| fill_buf(&e.borrow(), buf, cap))
}

/// Builds a frequency set of nonzero integers. On success `*out` owns the
/// handle; release it with `thinset_freqset_free`.
#[no_mangle]
pub unsafe extern "C" fn thinset_freqset_integers(
    elems: *const i64,
    len: usize,
    out: *mut *mut ThinsetFreqSet,
) -> ThinsetStatus {
    freqset_from_parts(GroupSpec::Integers, elems, len, out)
}

/// Builds a frequency set of nonzero residues modulo `modulus`.
#[no_mangle]
pub unsafe extern "C" fn thinset_freqset_cyclic(
    modulus: u64,
    elems: *const i64,
    len: usize,
    out: *mut *mut ThinsetFreqSet,
) -> ThinsetStatus {
    freqset_from_parts(GroupSpec::Cyclic { m: modulus }, elems, len, out)
}

/// Number of frequencies in the set; 0 for NULL.
#[no_mangle]
pub unsafe extern "C" fn thinset_freqset_len(set: *const ThinsetFreqSet) -> usize {
    if set.is_null() {
        0
    } else {
        (*set).inner.len()
    }
}

/// Releases a handle. NULL is a no-op.
#[no_mangle]
pub unsafe extern "C" fn thinset_freqset_free(set: *mut ThinsetFreqSet) {
    if !set.is_null() {
        drop(Box::from_raw(set));
    }
}

/// Exact number of signed {-1,0,1} relations summing to zero (the trivial
/// one included), enumerated under `cap`. `*out_quasi_independent` (when
/// non-NULL) is 1 iff the only relation is the trivial one.
#[no_mangle]
pub unsafe extern "C" fn thinset_relation_count(
    set: *const ThinsetFreqSet,
    cap: u64,
    out_count: *mut u64,
    out_quasi_independent: *mut i32,
) -> ThinsetStatus {
    if set.is_null() {
        return null_arg("set");
    }
    if out_count.is_null() {
        return null_arg("out_count");
    }
    guarded(|| match relation_count(&(*set).inner, cap as u128, false) {
        Ok(rep) => {
            // count <= cap <= u64::MAX on the Ok path, so the cast is lossless
            *out_count = rep.count as u64;
            if !out_quasi_independent.is_null() {
                *out_quasi_independent = i32::from(rep.count == 1);
            }
            ThinsetStatus::Ok
        }
        Err(e) => fail(e),
    })
}

/// Orlicz psi_a norm of the discrete real distribution with the given
/// atoms and weights (weights must sum to 1).
#[no_mangle]
pub unsafe extern "C" fn thinset_psi_norm(
    values: *const f64,
    weights: *const f64,
    len: usize,
    a: f64,
    out: *mut f64,
) -> ThinsetStatus {
    if out.is_null() {
        return null_arg("out");
    }
    guarded(|| {
        let d = match distribution_from_parts(values, weights, len) {
            Ok(d) => d,
            Err(status) => return status,
        };
        match psi_norm(&d, a) {
            Ok(v) => {
                *out = v;
                ThinsetStatus::Ok
            }
            Err(e) => fail(e),
        }
    })
}

/// Subgaussian constant of the discrete real distribution (mean zero
/// required), optimized over the default lambda grid.
#[no_mangle]
pub unsafe extern "C" fn thinset_sg_constant(
    values: *const f64,
    weights: *const f64,
    len: usize,
    out: *mut f64,
) -> ThinsetStatus {
    if out.is_null() {
        return null_arg("out");
    }
    guarded(|| {
        let d = match distribution_from_parts(values, weights, len) {
            Ok(d) => d,
            Err(status) => return status,
        };
        match sg_constant(&d, &LambdaGrid::default()) {
            Ok(v) => {
                *out = v;
                ThinsetStatus::Ok
            }
            Err(e) => fail(e),
        }
    })
}

/// Certified lower bound for the Sidon constant of the set, from the
/// interpolation dual over `samples` phase targets (exhaustive when the
/// set has at most 16 elements).
#[no_mangle]
pub unsafe extern "C" fn thinset_sidon_lower(
    set: *const ThinsetFreqSet,
    samples: usize,
    seed: u64,
    tol: f64,
    out: *mut f64,
) -> ThinsetStatus {
    if set.is_null() {
        return null_arg("set");
    }
    if out.is_null() {
        return null_arg("out");
    }
    guarded(
        || match sidon_constant_search(&(*set).inner, samples, seed, tol) {
            Ok(v) => {
                *out = v;
                ThinsetStatus::Ok
            }
            Err(e) => fail(e),
        },
    )
}

/// Stationary entropy integral of a cyclic-group frequency set, evaluated
/// exactly as a finite sum.
#[no_mangle]
pub unsafe extern "C" fn thinset_entropy_integral(
    set: *const ThinsetFreqSet,
    out: *mut f64,
) -> ThinsetStatus {
    if set.is_null() {
        return null_arg("set");
    }
    if out.is_null() {
        return null_arg("out");
    }
    guarded(|| match entropy_integral(&(*set).inner) {
        Ok(v) => {
            *out = v;
            ThinsetStatus::Ok
        }
        Err(e) => fail(e),
    })
}

/// Exact maximum size of a family of m-subsets of an n-point ground set
/// with pairwise intersections at most k.
#[no_mangle]
pub unsafe extern "C" fn thinset_codes_exact(
    n: usize,
    m: usize,
    k: usize,
    out: *mut u64,
) -> ThinsetStatus {
    if out.is_null() {
        return null_arg("out");
    }
    guarded(|| match exact_n(n, m, k) {
        Ok(v) => {
            *out = v;
            ThinsetStatus::Ok
        }
        Err(e) => fail(e),
    })
}

/// Size of the greedy lexicographic family for the same packing problem —
/// a certified lower bound for the maximum.
#[no_mangle]
pub unsafe extern "C" fn thinset_codes_greedy_size(
    n: usize,
    m: usize,
    k: usize,
    out: *mut u64,
) -> ThinsetStatus {
    if out.is_null() {
        return null_arg("out");
    }
    guarded(|| match gv_greedy(n, m, k, &WordOrder::Lex) {
        Ok(fam) => {
            *out = fam.len() as u64;
            ThinsetStatus::Ok
        }
        Err(e) => fail(e),
    })
}
