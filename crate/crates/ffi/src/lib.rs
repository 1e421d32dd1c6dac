//! C ABI over the `pimanifold` engine.
//!
//! Instances are opaque handles owned by the caller and released with
//! [`pim_instance_free`]. Strings returned through `char **` out-parameters
//! are released with [`pim_string_free`]. Every fallible call returns a
//! [`PimStatus`]; on failure [`pim_last_error_message`] describes it.

use std::cell::RefCell;
use std::collections::BTreeMap;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};

use pimanifold::classifier::{classify, ClassLabel};
use pimanifold::examples::{build_section5, ExampleParams};
use pimanifold::pi_manifold::PiManifoldInstance;
use pimanifold::report::{build_report, to_json};
use pimanifold::spec_file::{emit_spec, parse_spec};
use pimanifold::tensor::{int, Rational};
use pimanifold::verify::{run_suites, Suite};
use pimanifold::Error;

/// Result codes of every fallible call.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PimStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidUtf8 = 2,
    ParseError = 3,
    ValidationError = 4,
    InvariantViolation = 5,
    InvalidArgument = 6,
    Internal = 7,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PimClass {
    F0 = 0,
    F1 = 1,
    F4 = 4,
    F5 = 5,
    F11 = 11,
    Unresolved = -1,
}

impl From<ClassLabel> for PimClass {
    fn from(l: ClassLabel) -> Self {
        match l {
            ClassLabel::F0 => PimClass::F0,
            ClassLabel::F1 => PimClass::F1,
            ClassLabel::F4 => PimClass::F4,
            ClassLabel::F5 => PimClass::F5,
            ClassLabel::F11 => PimClass::F11,
            ClassLabel::Unresolved => PimClass::Unresolved,
        }
    }
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PimSuite {
    Core = 0,
    Paper = 1,
    All = 2,
}

/// Classification summary. `theta_xi` is exact only when it fits `i64/i64`,
/// which `theta_xi_exact` reports.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PimClassification {
    pub label: PimClass,
    pub theta_xi_num: i64,
    pub theta_xi_den: i64,
    pub theta_xi_exact: bool,
    pub f4_prime: bool,
    pub para_sasaki: bool,
    pub paracontact: bool,
}

/// Opaque instance handle.
pub struct PimInstance {
    inner: PiManifoldInstance,
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_error(msg: impl Into<String>) {
    let msg = msg.into().replace('\0', " ");
    LAST_ERROR.with(|e| *e.borrow_mut() = CString::new(msg).expect("nul bytes removed"));
}

fn status_of(e: &Error) -> PimStatus {
    match e {
        Error::Parse { .. } => PimStatus::ParseError,
        Error::Validation { .. } | Error::SingularMetric | Error::NotSymmetric(..) => PimStatus::ValidationError,
        Error::LemmaViolation(_) | Error::NaturalityViolation(_) | Error::IdentityViolation(_) => {
            PimStatus::InvariantViolation
        }
        _ => PimStatus::InvalidArgument,
    }
}

/// Runs `body`, recording any error or panic.
fn guarded(body: impl FnOnce() -> Result<(), (PimStatus, String)>) -> PimStatus {
    match catch_unwind(AssertUnwindSafe(body)) {
        Ok(Ok(())) => {
            set_error("");
            PimStatus::Ok
        }
        Ok(Err((status, msg))) => {
            set_error(msg);
            status
        }
        Err(_) => {
            set_error("internal panic");
            PimStatus::Internal
        }
    }
}

fn engine(e: Error) -> (PimStatus, String) {
    (status_of(&e), e.to_string())
}

fn null(what: &str) -> (PimStatus, String) {
    (PimStatus::NullPointer, format!("`{what}` is null"))
}

unsafe fn instance_ref<'a>(p: *const PimInstance) -> Result<&'a PiManifoldInstance, (PimStatus, String)> {
    p.as_ref().map(|h| &h.inner).ok_or_else(|| null("instance"))
}

unsafe fn write_string(out: *mut *mut c_char, s: String) -> Result<(), (PimStatus, String)> {
    if out.is_null() {
        return Err(null("out"));
    }
    let c = CString::new(s).map_err(|_| (PimStatus::Internal, "string contains a nul byte".to_string()))?;
    *out = c.into_raw();
    Ok(())
}

fn ratio(num: i64, den: i64, name: &str) -> Result<Rational, (PimStatus, String)> {
    if den == 0 {
        return Err((PimStatus::InvalidArgument, format!("`{name}` has a zero denominator")));
    }
    Ok(int(num) / int(den))
}

/// Parses and validates a spec file given as NUL-terminated UTF-8.
///
/// # Safety
/// `text` must be a valid C string and `out` a writable pointer.
#[no_mangle]
pub unsafe extern "C" fn pim_instance_from_spec(text: *const c_char, out: *mut *mut PimInstance) -> PimStatus {
    guarded(|| {
        if text.is_null() {
            return Err(null("text"));
        }
        if out.is_null() {
            return Err(null("out"));
        }
        let text = CStr::from_ptr(text)
            .to_str()
            .map_err(|e| (PimStatus::InvalidUtf8, e.to_string()))?;
        let inner = parse_spec(text, &BTreeMap::new()).map_err(engine)?;
        *out = Box::into_raw(Box::new(PimInstance { inner }));
        Ok(())
    })
}

/// The five-dimensional example with `λ = lambda_num/lambda_den`, `μ = mu_num/mu_den`.
///
/// # Safety
/// `out` must be a writable pointer.
#[no_mangle]
pub unsafe extern "C" fn pim_instance_example(
    lambda_num: i64,
    lambda_den: i64,
    mu_num: i64,
    mu_den: i64,
    out: *mut *mut PimInstance,
) -> PimStatus {
    guarded(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        let params = ExampleParams::new(ratio(lambda_num, lambda_den, "lambda")?, ratio(mu_num, mu_den, "mu")?);
        *out = Box::into_raw(Box::new(PimInstance {
            inner: build_section5(&params),
        }));
        Ok(())
    })
}

/// Releases an instance; null is ignored.
///
/// # Safety
/// `instance` must come from this library and not be freed twice.
#[no_mangle]
pub unsafe extern "C" fn pim_instance_free(instance: *mut PimInstance) {
    if !instance.is_null() {
        drop(Box::from_raw(instance));
    }
}

/// Frame dimension, or 0 for null.
///
/// # Safety
/// `instance` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn pim_instance_dim(instance: *const PimInstance) -> usize {
    instance.as_ref().map_or(0, |h| h.inner.dim())
}

/// # Safety
/// `instance` must be a live handle and `out` a writable pointer.
#[no_mangle]
pub unsafe extern "C" fn pim_classify(instance: *const PimInstance, out: *mut PimClassification) -> PimStatus {
    guarded(|| {
        let inst = instance_ref(instance)?;
        if out.is_null() {
            return Err(null("out"));
        }
        let c = classify(inst).map_err(engine)?;
        let (num, den) = (i64::try_from(c.theta_xi.numer()), i64::try_from(c.theta_xi.denom()));
        let exact = num.is_ok() && den.is_ok();
        *out = PimClassification {
            label: c.label.into(),
            theta_xi_num: num.unwrap_or(0),
            theta_xi_den: den.unwrap_or(1),
            theta_xi_exact: exact,
            f4_prime: c.f4_prime,
            para_sasaki: c.para_sasaki,
            paracontact: c.paracontact,
        };
        Ok(())
    })
}

/// Runs the selected suites and writes the JSON report. `fatal_count`, when
/// not null, receives the number of hard invariants with a residual.
///
/// # Safety
/// `instance` must be a live handle; `out_json` must be writable;
/// `fatal_count` must be null or writable.
#[no_mangle]
pub unsafe extern "C" fn pim_verify_json(
    instance: *const PimInstance,
    suite: PimSuite,
    out_json: *mut *mut c_char,
    fatal_count: *mut usize,
) -> PimStatus {
    guarded(|| {
        let inst = instance_ref(instance)?;
        let suite = match suite {
            PimSuite::Core => Suite::Core,
            PimSuite::Paper => Suite::Paper,
            PimSuite::All => Suite::All,
        };
        let (analysis, reports) = run_suites(inst, suite).map_err(engine)?;
        let json = to_json(&build_report(inst, &analysis.classification, &reports));
        write_string(out_json, json)?;
        if !fatal_count.is_null() {
            *fatal_count = reports.iter().filter(|r| r.is_fatal()).count();
        }
        Ok(())
    })
}

/// Writes the instance as spec-file text.
///
/// # Safety
/// `instance` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn pim_emit_spec(instance: *const PimInstance, out: *mut *mut c_char) -> PimStatus {
    guarded(|| {
        let inst = instance_ref(instance)?;
        write_string(out, emit_spec(inst))
    })
}

/// Releases a string returned by this library; null is ignored.
///
/// # Safety
/// `s` must come from this library and not be freed twice.
#[no_mangle]
pub unsafe extern "C" fn pim_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Message of the last failed call on this thread, empty after a success.
/// Valid until the next call into the library on the same thread.
#[no_mangle]
pub extern "C" fn pim_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}
