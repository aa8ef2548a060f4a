//! C interface to the divbench toolkit.
//!
//! Problems and sample sets cross the boundary as opaque handles. Every
//! fallible call returns a [`DbStatus`]; on failure the message is kept per
//! thread and read with [`db_last_error`]. Strings returned through `char**`
//! outputs are owned by the caller and released with [`db_string_free`].

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use divbench::diversity::{lna_best_of_shuffles, DistanceGraph};
use divbench::ising::io::{problem_from_json, problem_to_json, samples_from_jsonl, samples_to_jsonl};
use divbench::metrics::{ttd, Ttd};
use divbench::solvers::SolverSpec;
use divbench::topology::{generate, ChimeraGraph, DclParams, InstanceClass};
use divbench::{Error, IsingProblem, SampleSet, SpinConfiguration};

/// Opaque Ising problem.
pub struct DbProblem(IsingProblem);

/// Opaque sample set.
pub struct DbSampleSet(SampleSet);

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum DbStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    Format = 3,
    Io = 4,
    OutOfRange = 5,
    Internal = 6,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: impl Into<String>) {
    let msg = msg.into().replace('\0', " ");
    LAST_ERROR.with(|e| *e.borrow_mut() = CString::new(msg).ok());
}

fn status_of(err: &Error) -> DbStatus {
    match err {
        e if e.is_io() => DbStatus::Io,
        Error::Format { .. } | Error::Json(_) | Error::Csv(_) | Error::EnergyMismatch(_) => DbStatus::Format,
        _ => DbStatus::InvalidArgument,
    }
}

struct Fail(DbStatus, String);

impl From<Error> for Fail {
    fn from(e: Error) -> Self {
        Fail(status_of(&e), e.to_string())
    }
}

fn null(what: &str) -> Fail {
    Fail(DbStatus::NullPointer, format!("{what} is null"))
}

/// Runs `f`, converting errors and panics into a status code.
fn guard(f: impl FnOnce() -> Result<(), Fail>) -> DbStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => DbStatus::Ok,
        Ok(Err(Fail(status, msg))) => {
            set_error(msg);
            status
        }
        Err(_) => {
            set_error("internal panic");
            DbStatus::Internal
        }
    }
}

unsafe fn str_arg<'a>(p: *const c_char, what: &str) -> Result<&'a str, Fail> {
    if p.is_null() {
        return Err(null(what));
    }
    CStr::from_ptr(p)
        .to_str()
        .map_err(|_| Fail(DbStatus::InvalidArgument, format!("{what} is not valid UTF-8")))
}

unsafe fn handle<'a, T>(p: *const T, what: &str) -> Result<&'a T, Fail> {
    p.as_ref().ok_or_else(|| null(what))
}

unsafe fn write_out<T>(out: *mut T, value: T) -> Result<(), Fail> {
    if out.is_null() {
        return Err(null("output pointer"));
    }
    out.write(value);
    Ok(())
}

unsafe fn write_string(out: *mut *mut c_char, s: String) -> Result<(), Fail> {
    let c = CString::new(s).map_err(|_| Fail(DbStatus::Internal, "string contains NUL".into()))?;
    if out.is_null() {
        return Err(null("output pointer"));
    }
    out.write(c.into_raw());
    Ok(())
}

/// Message of the last failed call on this thread, or null. The pointer
/// stays valid until the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn db_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |s| s.as_ptr()))
}

/// Releases a string returned by this library. Null is ignored.
///
/// # Safety
/// `s` must come from this library and not have been freed.
#[no_mangle]
pub unsafe extern "C" fn db_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Parses a problem from its JSON document.
///
/// # Safety
/// `json` must be a NUL-terminated string and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn db_problem_from_json(json: *const c_char, out: *mut *mut DbProblem) -> DbStatus {
    guard(|| {
        let problem = problem_from_json(str_arg(json, "json")?)?;
        write_out(out, Box::into_raw(Box::new(DbProblem(problem))))
    })
}

/// Generates an instance of class `"ran1"`, `"ac3"` or `"dcl"` on the
/// Chimera graph of side `size` (DCL uses default parameters).
///
/// # Safety
/// `class_name` must be a NUL-terminated string and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn db_problem_generate(
    class_name: *const c_char,
    size: usize,
    seed: u64,
    out: *mut *mut DbProblem,
) -> DbStatus {
    guard(|| {
        let class: InstanceClass = str_arg(class_name, "class")?.parse()?;
        let chimera = ChimeraGraph::new(size)?;
        let problem = generate(class, &chimera, seed, &DclParams::default())?;
        write_out(out, Box::into_raw(Box::new(DbProblem(problem))))
    })
}

/// # Safety
/// `problem` must be a live handle or null.
#[no_mangle]
pub unsafe extern "C" fn db_problem_free(problem: *mut DbProblem) {
    if !problem.is_null() {
        drop(Box::from_raw(problem));
    }
}

/// Number of spins, or 0 for a null handle.
///
/// # Safety
/// `problem` must be a live handle or null.
#[no_mangle]
pub unsafe extern "C" fn db_problem_num_spins(problem: *const DbProblem) -> usize {
    problem.as_ref().map_or(0, |p| p.0.num_spins())
}

/// Energy of `len` spins given as ±1 values.
///
/// # Safety
/// `spins` must point to `len` readable bytes and `out` be writable.
#[no_mangle]
pub unsafe extern "C" fn db_problem_energy(
    problem: *const DbProblem,
    spins: *const i8,
    len: usize,
    out: *mut f64,
) -> DbStatus {
    guard(|| {
        let p = handle(problem, "problem")?;
        if spins.is_null() {
            return Err(null("spins"));
        }
        let config = SpinConfiguration::from_spins(std::slice::from_raw_parts(spins, len))?;
        write_out(out, p.0.energy(&config)?)
    })
}

/// Serializes the problem as JSON into a new string.
///
/// # Safety
/// `problem` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn db_problem_to_json(problem: *const DbProblem, out: *mut *mut c_char) -> DbStatus {
    guard(|| write_string(out, problem_to_json(&handle(problem, "problem")?.0)?))
}

/// Runs the solver described by `spec_json` (for example
/// `{"solver": "sa", "schedule": [0.1, 1.0, 3.0], "num_reads": 10}`). A
/// `budget_ns` of 0 means no limit.
///
/// # Safety
/// `problem` must be a live handle, `spec_json` NUL-terminated, `out` writable.
#[no_mangle]
pub unsafe extern "C" fn db_solve(
    problem: *const DbProblem,
    spec_json: *const c_char,
    seed: u64,
    budget_ns: u64,
    out: *mut *mut DbSampleSet,
) -> DbStatus {
    guard(|| {
        let p = handle(problem, "problem")?;
        let spec: SolverSpec = serde_json::from_str(str_arg(spec_json, "spec")?).map_err(Error::from)?;
        let solver = spec.prepare(&p.0, seed)?;
        let samples = solver.run(&p.0, seed, (budget_ns > 0).then_some(budget_ns))?;
        write_out(out, Box::into_raw(Box::new(DbSampleSet(samples))))
    })
}

/// Parses a JSON-lines sample file. `expected_spins` of 0 accepts any size.
///
/// # Safety
/// `text` must be NUL-terminated and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn db_samples_from_jsonl(
    text: *const c_char,
    expected_spins: usize,
    out: *mut *mut DbSampleSet,
) -> DbStatus {
    guard(|| {
        let set = samples_from_jsonl(str_arg(text, "text")?, (expected_spins > 0).then_some(expected_spins))?;
        write_out(out, Box::into_raw(Box::new(DbSampleSet(set))))
    })
}

/// # Safety
/// `samples` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn db_samples_to_jsonl(samples: *const DbSampleSet, out: *mut *mut c_char) -> DbStatus {
    guard(|| write_string(out, samples_to_jsonl(&handle(samples, "samples")?.0)?))
}

/// # Safety
/// `samples` must be a live handle or null.
#[no_mangle]
pub unsafe extern "C" fn db_samples_free(samples: *mut DbSampleSet) {
    if !samples.is_null() {
        drop(Box::from_raw(samples));
    }
}

/// Number of samples, or 0 for a null handle.
///
/// # Safety
/// `samples` must be a live handle or null.
#[no_mangle]
pub unsafe extern "C" fn db_samples_len(samples: *const DbSampleSet) -> usize {
    samples.as_ref().map_or(0, |s| s.0.len())
}

/// # Safety
/// `samples` must be a live handle or null.
#[no_mangle]
pub unsafe extern "C" fn db_samples_num_spins(samples: *const DbSampleSet) -> usize {
    samples.as_ref().map_or(0, |s| s.0.num_spins)
}

/// Energy and emission time of sample `index`. Either output may be null.
///
/// # Safety
/// `samples` must be a live handle; non-null outputs must be writable.
#[no_mangle]
pub unsafe extern "C" fn db_sample_info(
    samples: *const DbSampleSet,
    index: usize,
    energy: *mut f64,
    time_ns: *mut u64,
) -> DbStatus {
    guard(|| {
        let set = &handle(samples, "samples")?.0;
        let s = set.samples.get(index).ok_or_else(|| {
            Fail(DbStatus::OutOfRange, format!("sample {index} of {}", set.len()))
        })?;
        if !energy.is_null() {
            energy.write(s.energy);
        }
        if !time_ns.is_null() {
            time_ns.write(s.time_ns);
        }
        Ok(())
    })
}

/// Copies the ±1 spins of sample `index` into `buf`, which must hold
/// exactly the number of spins.
///
/// # Safety
/// `samples` must be a live handle and `buf` point to `len` writable bytes.
#[no_mangle]
pub unsafe extern "C" fn db_sample_spins(
    samples: *const DbSampleSet,
    index: usize,
    buf: *mut i8,
    len: usize,
) -> DbStatus {
    guard(|| {
        let set = &handle(samples, "samples")?.0;
        let s = set.samples.get(index).ok_or_else(|| {
            Fail(DbStatus::OutOfRange, format!("sample {index} of {}", set.len()))
        })?;
        if buf.is_null() {
            return Err(null("buf"));
        }
        if len != set.num_spins {
            return Err(Fail(
                DbStatus::InvalidArgument,
                format!("buffer holds {len} spins, samples have {}", set.num_spins),
            ));
        }
        let dst = std::slice::from_raw_parts_mut(buf, len);
        for (d, v) in dst.iter_mut().zip(s.config.spins()) {
            *d = v;
        }
        Ok(())
    })
}

/// Lower bound on the diversity of all samples at radius `radius`
/// (fraction of the spin count), best of `shuffles` greedy scans.
///
/// # Safety
/// `samples` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn db_diversity_lower_bound(
    samples: *const DbSampleSet,
    radius: f64,
    shuffles: usize,
    seed: u64,
    out: *mut usize,
) -> DbStatus {
    guard(|| {
        let set = &handle(samples, "samples")?.0;
        let graph = DistanceGraph::new(set.configs(), radius, set.num_spins)?;
        write_out(out, lna_best_of_shuffles(&graph, shuffles, seed)?)
    })
}

/// Time to diversity for success probability `p` over blocks of `n_runs`
/// runs of length `t_a_ns`. Writes infinity when `p` is 0.
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn db_ttd(p: f64, n_runs: u64, t_a_ns: f64, out: *mut f64) -> DbStatus {
    guard(|| {
        let value = match ttd(p, n_runs, t_a_ns)? {
            Ttd::Finite(t) => t,
            Ttd::Unbounded => f64::INFINITY,
        };
        write_out(out, value)
    })
}
