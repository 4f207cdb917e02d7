//! C ABI for detcal.
//!
//! Probes and detectors are opaque heap handles created by the
//! `detcal_probe_*` and `detcal_detector_*` constructors and released with
//! the matching `*_free`. Every fallible call returns a [`DetcalStatus`]; on failure a
//! description is available from [`detcal_last_error_message`] on the same
//! thread. Output pointers are written only on success.
//!
//! The header `include/detcal.h` is regenerated by the build script.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};

use detcal::analysis::{default_threshold_eta, heralding_threshold};
use detcal::montecarlo::{validate_crb, EstimationRun};
use detcal::{crb_variance, fisher_information, DarkCount, DetectorModel, Efficiency, Error, FockMixture, Method, ProbeState};

/// Result code of every fallible call.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DetcalStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    Domain = 3,
    SingularOutcome = 4,
    ZeroInformation = 5,
    Divergent = 6,
    ConvergenceFailure = 7,
    BracketError = 8,
    NoThreshold = 9,
    BoundaryEstimate = 10,
    Panic = 11,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DetcalMethod {
    ClosedForm = 0,
    Quadrature = 1,
    FiniteDifference = 2,
}

impl From<Method> for DetcalMethod {
    fn from(m: Method) -> Self {
        match m {
            Method::ClosedForm => DetcalMethod::ClosedForm,
            Method::Quadrature => DetcalMethod::Quadrature,
            Method::FiniteDifference => DetcalMethod::FiniteDifference,
        }
    }
}

/// A Fisher value. When `divergent` is true, `value` is +∞.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DetcalFisher {
    pub value: f64,
    pub divergent: bool,
    pub method: DetcalMethod,
    pub error_estimate: f64,
}

/// Summary of a simulated calibration campaign.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DetcalCrbReport {
    pub mean_estimate: f64,
    pub empirical_variance: f64,
    pub crb: f64,
    pub ratio: f64,
    pub ratio_floor: f64,
    pub boundary_count: u32,
    pub bound_respected: bool,
}

/// Opaque probe state.
pub struct DetcalProbe(ProbeState);

/// Opaque detector model.
pub struct DetcalDetector(DetectorModel);

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_last_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).expect("interior NULs removed");
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn status_of(e: &Error) -> DetcalStatus {
    match e {
        Error::Domain(_) | Error::EnergyMismatch(_) | Error::Config(_) | Error::Io(_) => DetcalStatus::Domain,
        Error::SingularOutcome { .. } => DetcalStatus::SingularOutcome,
        Error::ZeroInformation => DetcalStatus::ZeroInformation,
        Error::Divergent => DetcalStatus::Divergent,
        Error::ConvergenceFailure { .. } => DetcalStatus::ConvergenceFailure,
        Error::BracketError { .. } => DetcalStatus::BracketError,
        Error::NoThreshold { .. } => DetcalStatus::NoThreshold,
        Error::BoundaryEstimate(_) => DetcalStatus::BoundaryEstimate,
    }
}

enum Failure {
    Null(&'static str),
    Invalid(String),
    Lib(Error),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Lib(e)
    }
}

/// Runs `f`, records any failure in the thread's last-error slot and maps it
/// to a status. Panics never cross the ABI.
fn guard(f: impl FnOnce() -> Result<(), Failure>) -> DetcalStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => {
            LAST_ERROR.with(|e| *e.borrow_mut() = None);
            DetcalStatus::Ok
        }
        Ok(Err(Failure::Null(what))) => {
            set_last_error(format!("null pointer passed for {what}"));
            DetcalStatus::NullPointer
        }
        Ok(Err(Failure::Invalid(msg))) => {
            set_last_error(msg);
            DetcalStatus::InvalidArgument
        }
        Ok(Err(Failure::Lib(e))) => {
            set_last_error(e.to_string());
            status_of(&e)
        }
        Err(_) => {
            set_last_error("internal panic".into());
            DetcalStatus::Panic
        }
    }
}

unsafe fn borrow<'a, T>(p: *const T, what: &'static str) -> Result<&'a T, Failure> {
    // SAFETY: caller guarantees `p` is null or a live handle from this library
    unsafe { p.as_ref() }.ok_or(Failure::Null(what))
}

unsafe fn write<T>(out: *mut T, value: T, what: &'static str) -> Result<(), Failure> {
    if out.is_null() {
        return Err(Failure::Null(what));
    }
    // SAFETY: non-null and, per the contract, valid for writes
    unsafe { out.write(value) };
    Ok(())
}

fn boxed_probe(out: *mut *mut DetcalProbe, probe: ProbeState) -> Result<(), Failure> {
    probe.validate()?;
    // SAFETY: checked for null inside `write`
    unsafe { write(out, Box::into_raw(Box::new(DetcalProbe(probe))), "out") }
}

fn boxed_detector(out: *mut *mut DetcalDetector, detector: DetectorModel) -> Result<(), Failure> {
    // SAFETY: checked for null inside `write`
    unsafe { write(out, Box::into_raw(Box::new(DetcalDetector(detector))), "out") }
}

/// Message of the last failed call on this thread, or NULL after a success.
/// The pointer stays valid until the next call into this library on the
/// same thread.
#[no_mangle]
pub extern "C" fn detcal_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(std::ptr::null(), |c| c.as_ptr()))
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn detcal_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Fock state |n⟩.
///
/// # Safety
/// `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn detcal_probe_fock(n: u32, out: *mut *mut DetcalProbe) -> DetcalStatus {
    guard(|| boxed_probe(out, ProbeState::fock(n)))
}

/// Coherent state of mean photon number `mean_photons`.
///
/// # Safety
/// `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn detcal_probe_coherent(mean_photons: f64, out: *mut *mut DetcalProbe) -> DetcalStatus {
    guard(|| boxed_probe(out, ProbeState::coherent(mean_photons)?))
}

/// Heralded single photon with heralding efficiency `xi`.
///
/// # Safety
/// `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn detcal_probe_heralded(xi: f64, out: *mut *mut DetcalProbe) -> DetcalStatus {
    guard(|| boxed_probe(out, ProbeState::heralded(xi)?))
}

/// Fock mixture `Σ weights[i] |photons[i]⟩⟨photons[i]|`; weights sum to 1.
///
/// # Safety
/// `photons` and `weights` must point to `len` readable elements; `out`
/// must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn detcal_probe_mixture(
    photons: *const u32,
    weights: *const f64,
    len: usize,
    out: *mut *mut DetcalProbe,
) -> DetcalStatus {
    guard(|| {
        if photons.is_null() || weights.is_null() {
            return Err(Failure::Null("photons/weights"));
        }
        // SAFETY: non-null and `len` elements long per the contract
        let (p, w) = unsafe { (std::slice::from_raw_parts(photons, len), std::slice::from_raw_parts(weights, len)) };
        let mixture = FockMixture::new(p.iter().copied().zip(w.iter().copied()))?;
        boxed_probe(out, ProbeState::mixture(mixture))
    })
}

/// Parses `fock:N`, `coherent:NBAR` or `heralded:XI`.
///
/// # Safety
/// `spec` must be a NUL-terminated string; `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn detcal_probe_parse(spec: *const c_char, out: *mut *mut DetcalProbe) -> DetcalStatus {
    guard(|| {
        if spec.is_null() {
            return Err(Failure::Null("spec"));
        }
        // SAFETY: non-null NUL-terminated string per the contract
        let s = unsafe { CStr::from_ptr(spec) }.to_str().map_err(|e| Failure::Invalid(format!("probe spec: {e}")))?;
        boxed_probe(out, s.parse()?)
    })
}

/// Mean photon number of a probe; NaN for a null handle.
///
/// # Safety
/// `probe` must be NULL or a live handle.
#[no_mangle]
pub unsafe extern "C" fn detcal_probe_mean_photons(probe: *const DetcalProbe) -> f64 {
    // SAFETY: null or live per the contract
    unsafe { probe.as_ref() }.map_or(f64::NAN, |p| p.0.mean_photon_number())
}

/// Releases a probe. NULL is ignored.
///
/// # Safety
/// `probe` must be NULL or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn detcal_probe_free(probe: *mut DetcalProbe) {
    if !probe.is_null() {
        // SAFETY: created by Box::into_raw in this library and freed once
        drop(unsafe { Box::from_raw(probe) });
    }
}

/// On/off detector with dark-count exponent `delta ≥ 0`.
///
/// # Safety
/// `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn detcal_detector_onoff(delta: f64, out: *mut *mut DetcalDetector) -> DetcalStatus {
    guard(|| boxed_detector(out, DetectorModel::onoff(DarkCount::new(delta)?)))
}

/// K-outcome photon-number-resolving detector, `k ≥ 2`.
///
/// # Safety
/// `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn detcal_detector_koutcome(k: u32, out: *mut *mut DetcalDetector) -> DetcalStatus {
    guard(|| boxed_detector(out, DetectorModel::koutcome(k)?))
}

/// Homodyne detector with default quadrature settings.
///
/// # Safety
/// `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn detcal_detector_homodyne(out: *mut *mut DetcalDetector) -> DetcalStatus {
    guard(|| boxed_detector(out, DetectorModel::homodyne()))
}

/// Releases a detector. NULL is ignored.
///
/// # Safety
/// `detector` must be NULL or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn detcal_detector_free(detector: *mut DetcalDetector) {
    if !detector.is_null() {
        // SAFETY: created by Box::into_raw in this library and freed once
        drop(unsafe { Box::from_raw(detector) });
    }
}

/// Fisher information of `probe` through `detector` at efficiency `eta`.
///
/// # Safety
/// Handles must be live; `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn detcal_fisher(
    probe: *const DetcalProbe,
    detector: *const DetcalDetector,
    eta: f64,
    out: *mut DetcalFisher,
) -> DetcalStatus {
    guard(|| {
        // SAFETY: null or live per the contract
        let (p, d) = unsafe { (borrow(probe, "probe")?, borrow(detector, "detector")?) };
        let r = fisher_information(&p.0, &d.0, Efficiency::new(eta)?)?;
        let result = DetcalFisher {
            value: r.value_or_inf(),
            divergent: r.is_divergent(),
            method: r.method.into(),
            error_estimate: r.error_estimate,
        };
        // SAFETY: checked for null inside `write`
        unsafe { write(out, result, "out") }
    })
}

/// Cramér–Rao variance bound `1/(trials·F)`.
///
/// # Safety
/// Handles must be live; `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn detcal_crb_variance(
    probe: *const DetcalProbe,
    detector: *const DetcalDetector,
    eta: f64,
    trials: u64,
    out: *mut f64,
) -> DetcalStatus {
    guard(|| {
        // SAFETY: null or live per the contract
        let (p, d) = unsafe { (borrow(probe, "probe")?, borrow(detector, "detector")?) };
        let f = fisher_information(&p.0, &d.0, Efficiency::new(eta)?)?;
        let v = crb_variance(&f, trials)?;
        // SAFETY: checked for null inside `write`
        unsafe { write(out, v, "out") }
    })
}

/// Heralding efficiency ξ* at which a heralded photon matches `reference`.
/// A NaN `eta` selects the default evaluation efficiency for the detector.
///
/// # Safety
/// Handles must be live; `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn detcal_heralding_threshold(
    detector: *const DetcalDetector,
    reference: *const DetcalProbe,
    eta: f64,
    out: *mut f64,
) -> DetcalStatus {
    guard(|| {
        // SAFETY: null or live per the contract
        let (d, r) = unsafe { (borrow(detector, "detector")?, borrow(reference, "reference")?) };
        let eta = if eta.is_nan() { default_threshold_eta(&d.0) } else { Efficiency::new(eta)? };
        let xi = heralding_threshold(&d.0, &r.0, eta)?;
        // SAFETY: checked for null inside `write`
        unsafe { write(out, xi, "out") }
    })
}

/// Simulates `replicates` experiments of `trials` shots and compares the
/// spread of the maximum-likelihood estimates with the Cramér–Rao bound.
///
/// # Safety
/// Handles must be live; `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn detcal_simulate_crb(
    probe: *const DetcalProbe,
    detector: *const DetcalDetector,
    eta: f64,
    trials: u64,
    replicates: u32,
    seed: u64,
    out: *mut DetcalCrbReport,
) -> DetcalStatus {
    guard(|| {
        // SAFETY: null or live per the contract
        let (p, d) = unsafe { (borrow(probe, "probe")?, borrow(detector, "detector")?) };
        let run = EstimationRun {
            probe: p.0.clone(),
            detector: d.0.clone(),
            eta_true: Efficiency::new(eta)?,
            trials,
            seed,
            replicates,
        };
        let r = validate_crb(&run)?;
        let report = DetcalCrbReport {
            mean_estimate: r.mean_estimate,
            empirical_variance: r.empirical_variance,
            crb: r.crb,
            ratio: r.ratio,
            ratio_floor: r.ratio_floor,
            boundary_count: r.boundary_count,
            bound_respected: r.bound_respected,
        };
        // SAFETY: checked for null inside `write`
        unsafe { write(out, report, "out") }
    })
}
