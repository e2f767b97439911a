// Licensed under the Apache License, Version 2.0 (the "License"); you may
// not use this file except in compliance with the License. You may obtain
// a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS, WITHOUT
// WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied. See the
// License for the specific language governing permissions and limitations
// under the License.

//! C interface.
//!
//! Instances and solutions are opaque handles owned by the caller and
//! released with their `_free` function. Every fallible call returns an
//! [`SoStatus`]; on failure [`so_last_error_message`] describes the error.
//! Strings returned through out-parameters are released with
//! [`so_string_free`].

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use subsidy_orient::error::Error;
use subsidy_orient::model::{Instance, Solution};
use subsidy_orient::{format, oracle, rational, solve, Algorithm};

/// Opaque instance handle.
pub struct SoInstance(Instance);

/// Opaque solution handle.
pub struct SoSolution(Solution);

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SoStatus {
    Ok = 0,
    Internal = 1,
    InvalidInput = 2,
    Precondition = 3,
    NullPointer = 4,
    Panic = 5,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: impl Into<String>) {
    let msg = msg.into().replace('\0', " ");
    LAST_ERROR.with(|e| *e.borrow_mut() = CString::new(msg).ok());
}

fn status_of(e: &Error) -> SoStatus {
    match e.exit_code() {
        2 => SoStatus::InvalidInput,
        3 => SoStatus::Precondition,
        _ => SoStatus::Internal,
    }
}

struct Fail(SoStatus);

impl From<Error> for Fail {
    fn from(e: Error) -> Self {
        set_error(e.to_string());
        Fail(status_of(&e))
    }
}

fn null() -> Fail {
    set_error("null pointer argument");
    Fail(SoStatus::NullPointer)
}

fn guard(f: impl FnOnce() -> Result<(), Fail>) -> SoStatus {
    LAST_ERROR.with(|e| *e.borrow_mut() = None);
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => SoStatus::Ok,
        Ok(Err(Fail(s))) => s,
        Err(_) => {
            set_error("panic inside subsidy-orient");
            SoStatus::Panic
        }
    }
}

unsafe fn str_arg<'a>(p: *const c_char) -> Result<&'a str, Fail> {
    if p.is_null() {
        return Err(null());
    }
    CStr::from_ptr(p)
        .to_str()
        .map_err(|_| Fail::from(Error::InvalidInput("string is not UTF-8".into())))
}

unsafe fn put<T>(out: *mut T, v: T) -> Result<(), Fail> {
    if out.is_null() {
        return Err(null());
    }
    out.write(v);
    Ok(())
}

unsafe fn put_string(out: *mut *mut c_char, s: String) -> Result<(), Fail> {
    let c = CString::new(s).map_err(|_| Fail::from(Error::Invariant("interior NUL".into())))?;
    put(out, c.into_raw())
}

unsafe fn deref<'a, T>(p: *const T) -> Result<&'a T, Fail> {
    p.as_ref().ok_or_else(null)
}

/// Parses an instance from JSON text.
///
/// # Safety
/// `json` must be a NUL-terminated string and `out` a writable pointer.
#[no_mangle]
pub unsafe extern "C" fn so_instance_from_json(
    json: *const c_char,
    out: *mut *mut SoInstance,
) -> SoStatus {
    guard(|| {
        let inst = format::instance_from_json(str_arg(json)?)?;
        put(out, Box::into_raw(Box::new(SoInstance(inst))))
    })
}

/// # Safety
/// `inst` must come from [`so_instance_from_json`] or be null.
#[no_mangle]
pub unsafe extern "C" fn so_instance_free(inst: *mut SoInstance) {
    if !inst.is_null() {
        drop(Box::from_raw(inst));
    }
}

/// # Safety
/// `inst` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn so_instance_agent_count(
    inst: *const SoInstance,
    out: *mut usize,
) -> SoStatus {
    guard(|| put(out, deref(inst)?.0.n_agents()))
}

/// # Safety
/// `inst` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn so_instance_edge_count(
    inst: *const SoInstance,
    out: *mut usize,
) -> SoStatus {
    guard(|| put(out, deref(inst)?.0.n_edges()))
}

/// Runs a solver. `algo` may be null for automatic selection.
///
/// # Safety
/// `inst` must be a live handle, `algo` null or NUL-terminated, `out` writable.
#[no_mangle]
pub unsafe extern "C" fn so_solve(
    inst: *const SoInstance,
    algo: *const c_char,
    out: *mut *mut SoSolution,
) -> SoStatus {
    guard(|| {
        let inst = deref(inst)?;
        let algo = if algo.is_null() {
            Algorithm::Auto
        } else {
            Algorithm::parse(str_arg(algo)?)?
        };
        let sol = solve(&inst.0, algo)?;
        put(out, Box::into_raw(Box::new(SoSolution(sol))))
    })
}

/// # Safety
/// `sol` must come from [`so_solve`] or be null.
#[no_mangle]
pub unsafe extern "C" fn so_solution_free(sol: *mut SoSolution) {
    if !sol.is_null() {
        drop(Box::from_raw(sol));
    }
}

/// Owner of `edge` in the solution.
///
/// # Safety
/// `sol` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn so_solution_owner(
    sol: *const SoSolution,
    edge: usize,
    out: *mut usize,
) -> SoStatus {
    guard(|| {
        let owners = deref(sol)?.0.orientation.owners();
        match owners.get(edge) {
            Some(&o) => put(out, o),
            None => Err(Error::InvalidInput(format!("edge {edge} out of range")).into()),
        }
    })
}

/// Payment of `agent` as a rational string.
///
/// # Safety
/// `sol` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn so_solution_payment(
    sol: *const SoSolution,
    agent: usize,
    out: *mut *mut c_char,
) -> SoStatus {
    guard(|| {
        let p = deref(sol)?.0.payments.as_slice();
        match p.get(agent) {
            Some(r) => put_string(out, rational::format(r)),
            None => Err(Error::InvalidInput(format!("agent {agent} out of range")).into()),
        }
    })
}

/// Total subsidy as a rational string.
///
/// # Safety
/// `sol` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn so_solution_total_subsidy(
    sol: *const SoSolution,
    out: *mut *mut c_char,
) -> SoStatus {
    guard(|| put_string(out, rational::format(&deref(sol)?.0.total_subsidy())))
}

/// # Safety
/// `sol` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn so_solution_to_json(
    sol: *const SoSolution,
    out: *mut *mut c_char,
) -> SoStatus {
    guard(|| put_string(out, format::solution_to_json(&deref(sol)?.0)))
}

/// Verifies a solution document against an instance. `report` may be null.
///
/// # Safety
/// `inst` must be a live handle, `solution_json` NUL-terminated and
/// `all_pass` writable.
#[no_mangle]
pub unsafe extern "C" fn so_verify(
    inst: *const SoInstance,
    solution_json: *const c_char,
    all_pass: *mut bool,
    report: *mut *mut c_char,
) -> SoStatus {
    guard(|| {
        let inst = deref(inst)?;
        let (owner, payments) = format::solution_parts_from_json(str_arg(solution_json)?)?;
        let r = oracle::verify_raw(&inst.0, &owner, &payments);
        put(all_pass, r.all_pass)?;
        if !report.is_null() {
            put_string(report, format::verify_report_to_json(&r))?;
        }
        Ok(())
    })
}

/// Exact minimum subsidy as a rational string.
///
/// # Safety
/// `inst` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn so_oracle_min_subsidy(
    inst: *const SoInstance,
    max_edges: usize,
    out: *mut *mut c_char,
) -> SoStatus {
    guard(|| {
        let r = oracle::brute_force_min_subsidy(&deref(inst)?.0, max_edges)?;
        put_string(out, rational::format(&r.min_total))
    })
}

/// Message for the last failed call on this thread, or null. The pointer
/// stays valid until the next call into this library on the same thread.
#[no_mangle]
pub extern "C" fn so_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// # Safety
/// `s` must come from this library or be null.
#[no_mangle]
pub unsafe extern "C" fn so_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}
