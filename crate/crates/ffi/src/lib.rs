//! C ABI over `rydberg-messenger`.
//!
//! Handles are opaque and owned by the caller once returned; release each with its
//! `_free` function. Every fallible call returns an [`RmStatus`]; on failure the
//! message is available from [`rm_last_error`] on the same thread.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};

use rydberg_messenger::arch::{decompose_cz, ArchitectureSpec, GateCounts, Variant};
use rydberg_messenger::cost::{self, CostParams};
use rydberg_messenger::ir::{parse_program, Coord, LogicalCircuit};
use rydberg_messenger::oracle::{standard_inputs, verify_decomposition};
use rydberg_messenger::schedule::{check_conflicts, schedule, ScheduleError, ScheduledProgram};

/// Status codes; the nonzero values match the command-line exit codes where they overlap.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RmStatus {
    Ok = 0,
    Parse = 2,
    Infeasible = 3,
    Verification = 4,
    Io = 5,
    InvalidArgument = 6,
    NullPointer = 7,
    Panic = 8,
}

/// Architecture parameters.
pub struct RmArch {
    inner: ArchitectureSpec,
}

/// Parsed logical circuit.
pub struct RmCircuit {
    inner: LogicalCircuit,
}

/// Scheduled physical program together with the architecture it was planned for.
pub struct RmSchedule {
    inner: ScheduledProgram,
    arch: ArchitectureSpec,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct RmGateCounts {
    pub n1: u32,
    pub n2_cz: u32,
    pub n2_swap: u32,
    pub nr: u32,
}

impl From<GateCounts> for RmGateCounts {
    fn from(c: GateCounts) -> Self {
        Self { n1: c.n1, n2_cz: c.n2_cz, n2_swap: c.n2_swap, nr: c.nr }
    }
}

impl From<RmGateCounts> for GateCounts {
    fn from(c: RmGateCounts) -> Self {
        GateCounts { n1: c.n1, n2_cz: c.n2_cz, n2_swap: c.n2_swap, nr: c.nr }
    }
}

/// Per-operation fidelities; `shuttle_kappa` and `p2` are unused by [`rm_logical_gate_fidelity`].
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RmCostParams {
    pub f1: f64,
    pub f2_cz: f64,
    pub f2_swap: f64,
    pub fr: f64,
    pub f_shuttle: f64,
    pub shuttle_kappa: f64,
    pub p2: f64,
}

impl From<RmCostParams> for CostParams {
    fn from(p: RmCostParams) -> Self {
        CostParams { f1: p.f1, f2_cz: p.f2_cz, f2_swap: p.f2_swap, fr: p.fr, f_shuttle: p.f_shuttle, shuttle_kappa: p.shuttle_kappa, p2: p.p2 }
    }
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_error(msg: impl ToString) {
    let text = msg.to_string().replace('\0', " ");
    LAST_ERROR.with(|e| *e.borrow_mut() = CString::new(text).expect("nul bytes removed"));
}

type FfiResult<T> = Result<T, (RmStatus, String)>;

fn fail<T>(status: RmStatus, msg: impl ToString) -> FfiResult<T> {
    Err((status, msg.to_string()))
}

/// Runs `body`, turning errors and panics into a status plus the thread's last error.
fn guard(body: impl FnOnce() -> FfiResult<()>) -> RmStatus {
    match catch_unwind(AssertUnwindSafe(body)) {
        Ok(Ok(())) => {
            set_error("");
            RmStatus::Ok
        }
        Ok(Err((status, msg))) => {
            set_error(msg);
            status
        }
        Err(_) => {
            set_error("internal panic");
            RmStatus::Panic
        }
    }
}

unsafe fn str_arg<'a>(p: *const c_char, name: &str) -> FfiResult<&'a str> {
    if p.is_null() {
        return fail(RmStatus::NullPointer, format!("{name} is null"));
    }
    CStr::from_ptr(p).to_str().or_else(|_| fail(RmStatus::InvalidArgument, format!("{name} is not UTF-8")))
}

unsafe fn ref_arg<'a, T>(p: *const T, name: &str) -> FfiResult<&'a T> {
    p.as_ref().ok_or_else(|| (RmStatus::NullPointer, format!("{name} is null")))
}

unsafe fn out_arg<'a, T>(p: *mut T, name: &str) -> FfiResult<&'a mut T> {
    p.as_mut().ok_or_else(|| (RmStatus::NullPointer, format!("{name} is null")))
}

/// Message for the most recent failed call on this thread; empty after a success.
/// The pointer stays valid until the next call on the same thread.
#[no_mangle]
pub extern "C" fn rm_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

/// Releases a string returned by this library.
///
/// # Safety
/// `s` must be null or a pointer obtained from this library that has not been freed.
#[no_mangle]
pub unsafe extern "C" fn rm_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Default architecture for `variant` (e.g. `"two-way-belt"`, `"tm"`) on an `L`×`L` lattice.
///
/// # Safety
/// `variant` must be a valid NUL-terminated string; `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn rm_arch_new(variant: *const c_char, lattice_size: u32, out: *mut *mut RmArch) -> RmStatus {
    guard(|| {
        let out = out_arg(out, "out")?;
        let v: Variant = str_arg(variant, "variant")?.parse().or_else(|e| fail(RmStatus::Parse, e))?;
        let inner = ArchitectureSpec::new(v, lattice_size);
        inner.validate().or_else(|e| fail(RmStatus::InvalidArgument, e))?;
        *out = Box::into_raw(Box::new(RmArch { inner }));
        Ok(())
    })
}

/// Architecture from `key=value` text.
///
/// # Safety
/// `text` must be a valid NUL-terminated string; `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn rm_arch_from_config(text: *const c_char, out: *mut *mut RmArch) -> RmStatus {
    guard(|| {
        let out = out_arg(out, "out")?;
        let inner = ArchitectureSpec::from_config(str_arg(text, "text")?).or_else(|e| fail(RmStatus::Parse, e))?;
        *out = Box::into_raw(Box::new(RmArch { inner }));
        Ok(())
    })
}

/// Sets the belt and throw speed in m/s.
///
/// # Safety
/// `arch` must be a live handle from `rm_arch_new` or `rm_arch_from_config`.
#[no_mangle]
pub unsafe extern "C" fn rm_arch_set_speed(arch: *mut RmArch, speed_mps: f64) -> RmStatus {
    guard(|| {
        let arch = out_arg(arch, "arch")?;
        if !(speed_mps.is_finite() && speed_mps > 0.0) {
            return fail(RmStatus::InvalidArgument, "speed must be positive");
        }
        arch.inner.speed = speed_mps;
        Ok(())
    })
}

/// # Safety
/// `arch` must be null or a live handle that is not used afterwards.
#[no_mangle]
pub unsafe extern "C" fn rm_arch_free(arch: *mut RmArch) {
    if !arch.is_null() {
        drop(Box::from_raw(arch));
    }
}

/// Gate counts of the compiled logical CZ between (r1,c1) and (r2,c2).
///
/// # Safety
/// `arch` must be a live handle; `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn rm_gate_counts(arch: *const RmArch, r1: u32, c1: u32, r2: u32, c2: u32, out: *mut RmGateCounts) -> RmStatus {
    guard(|| {
        let arch = ref_arg(arch, "arch")?;
        let out = out_arg(out, "out")?;
        let d = decompose_cz(&arch.inner, Coord::new(r1, c1), Coord::new(r2, c2)).or_else(|e| fail(RmStatus::InvalidArgument, e))?;
        *out = d.counts.into();
        Ok(())
    })
}

/// Checks the compiled CZ on the standard inputs. Writes the smallest branch fidelity to
/// `min_fidelity` and returns `RM_STATUS_VERIFICATION` if any branch fails.
///
/// # Safety
/// `arch` must be a live handle; `min_fidelity` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn rm_verify_pair(arch: *const RmArch, r1: u32, c1: u32, r2: u32, c2: u32, min_fidelity: *mut f64) -> RmStatus {
    guard(|| {
        let arch = ref_arg(arch, "arch")?;
        let out = out_arg(min_fidelity, "min_fidelity")?;
        let d = decompose_cz(&arch.inner, Coord::new(r1, c1), Coord::new(r2, c2)).or_else(|e| fail(RmStatus::InvalidArgument, e))?;
        let report = verify_decomposition(&d, &standard_inputs()).or_else(|e| fail(RmStatus::Verification, e))?;
        *out = report.min_fidelity();
        if !report.passed() {
            return fail(RmStatus::Verification, format!("{} branches failed", report.failures().count()));
        }
        Ok(())
    })
}

/// Parses program source (`lattice L` header, then `cz`/`h`/`z`/`x` lines).
///
/// # Safety
/// `source` must be a valid NUL-terminated string; `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn rm_circuit_parse(source: *const c_char, out: *mut *mut RmCircuit) -> RmStatus {
    guard(|| {
        let out = out_arg(out, "out")?;
        let inner = parse_program(str_arg(source, "source")?).or_else(|e| fail(RmStatus::Parse, e))?;
        *out = Box::into_raw(Box::new(RmCircuit { inner }));
        Ok(())
    })
}

/// # Safety
/// `circuit` must be null or a live handle that is not used afterwards.
#[no_mangle]
pub unsafe extern "C" fn rm_circuit_free(circuit: *mut RmCircuit) {
    if !circuit.is_null() {
        drop(Box::from_raw(circuit));
    }
}

/// Schedules `circuit` on `arch`; the circuit's lattice size takes precedence.
///
/// # Safety
/// `circuit` and `arch` must be live handles; `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn rm_schedule(circuit: *const RmCircuit, arch: *const RmArch, out: *mut *mut RmSchedule) -> RmStatus {
    guard(|| {
        let circuit = ref_arg(circuit, "circuit")?;
        let arch = ref_arg(arch, "arch")?;
        let out = out_arg(out, "out")?;
        let inner = schedule(&circuit.inner, &arch.inner).map_err(|e| match e {
            ScheduleError::Infeasible { .. } => (RmStatus::Infeasible, e.to_string()),
            _ => (RmStatus::InvalidArgument, e.to_string()),
        })?;
        let arch = ArchitectureSpec { lattice_size: circuit.inner.lattice_size.max(2), ..arch.inner.clone() };
        *out = Box::into_raw(Box::new(RmSchedule { inner, arch }));
        Ok(())
    })
}

/// # Safety
/// `schedule` must be a live handle; `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn rm_schedule_makespan(schedule: *const RmSchedule, out: *mut f64) -> RmStatus {
    guard(|| {
        *out_arg(out, "out")? = ref_arg(schedule, "schedule")?.inner.makespan;
        Ok(())
    })
}

/// # Safety
/// `schedule` must be a live handle; `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn rm_schedule_event_count(schedule: *const RmSchedule, out: *mut usize) -> RmStatus {
    guard(|| {
        *out_arg(out, "out")? = ref_arg(schedule, "schedule")?.inner.events.len();
        Ok(())
    })
}

/// Number of constraint violations found in the schedule; zero for any schedule this library produced.
///
/// # Safety
/// `schedule` must be a live handle; `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn rm_schedule_conflict_count(schedule: *const RmSchedule, out: *mut usize) -> RmStatus {
    guard(|| {
        let s = ref_arg(schedule, "schedule")?;
        *out_arg(out, "out")? = check_conflicts(&s.inner, &s.arch).len();
        Ok(())
    })
}

/// Event list as JSON lines. Release the string with `rm_string_free`.
///
/// # Safety
/// `schedule` must be a live handle; `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn rm_schedule_to_jsonl(schedule: *const RmSchedule, out: *mut *mut c_char) -> RmStatus {
    guard(|| {
        let text = ref_arg(schedule, "schedule")?.inner.events.to_jsonl();
        let out = out_arg(out, "out")?;
        *out = CString::new(text).or_else(|e| fail(RmStatus::InvalidArgument, e))?.into_raw();
        Ok(())
    })
}

/// # Safety
/// `schedule` must be null or a live handle that is not used afterwards.
#[no_mangle]
pub unsafe extern "C" fn rm_schedule_free(schedule: *mut RmSchedule) {
    if !schedule.is_null() {
        drop(Box::from_raw(schedule));
    }
}

/// Product of per-operation fidelities raised to their counts.
///
/// # Safety
/// `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn rm_logical_gate_fidelity(counts: RmGateCounts, params: RmCostParams, out: *mut f64) -> RmStatus {
    guard(|| {
        let out = out_arg(out, "out")?;
        let r = cost::logical_gate_fidelity(counts.into(), &params.into()).or_else(|e| fail(RmStatus::InvalidArgument, e))?;
        *out = r.fidelity;
        Ok(())
    })
}

/// SWAP-chain baseline for (r1,c1)-(r2,c2) on an `L`×`L` lattice: writes exp(-p2·L)
/// to `asymptotic` and (1-p2)^n2 to `exact`. Either output may be null.
///
/// # Safety
/// `asymptotic` and `exact` must each be null or valid pointers.
#[no_mangle]
pub unsafe extern "C" fn rm_neighbor_chain_fidelity(
    lattice_size: u32,
    r1: u32,
    c1: u32,
    r2: u32,
    c2: u32,
    p2: f64,
    asymptotic: *mut f64,
    exact: *mut f64,
) -> RmStatus {
    guard(|| {
        let f = cost::neighbor_chain_fidelity(lattice_size, Coord::new(r1, c1), Coord::new(r2, c2), p2)
            .or_else(|e| fail(RmStatus::InvalidArgument, e))?;
        if let Some(a) = asymptotic.as_mut() {
            *a = f.asymptotic;
        }
        if let Some(e) = exact.as_mut() {
            *e = f.exact;
        }
        Ok(())
    })
}
