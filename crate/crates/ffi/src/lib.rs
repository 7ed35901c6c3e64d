//! C ABI over `nhse-core`.
//!
//! Every entry point returns an [`NhseStatus`]. On failure a message is kept
//! per thread and can be read with [`nhse_last_error_message`]. Handles are
//! opaque and owned by the caller once created; release them with the
//! matching `_free`.

use std::cell::RefCell;
use std::ffi::CString;
use std::os::raw::c_char;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use num_complex::Complex64;

use nhse_core::boundary::{boundary_determinant, CoefficientVariant};
use nhse_core::model::{build_bdg, validate_spec, Boundary, ModelSpec};
use nhse_core::nonbloch::{solve_beta, zak_phase, Band};
use nhse_core::spectra::{eigen_right, eigenvalues, skin_metrics, SkinOptions};
use nhse_core::symmetry::{default_candidates, theorem_verdict, VerdictKind};
use nhse_core::{Error, ErrorClass};

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum NhseStatus {
    Ok = 0,
    ConfigError = 1,
    NumericalError = 2,
    IoError = 3,
    NullPointer = 4,
    InvalidArgument = 5,
    Panic = 6,
}

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum NhseBoundary {
    Open = 0,
    Periodic = 1,
}

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum NhseVerdict {
    Blocked = 0,
    Expected = 1,
    InapplicableReducible = 2,
    NoSymmetryFound = 3,
}

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum NhseBand {
    Plus = 0,
    Minus = 1,
}

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum NhseVariant {
    Rederived = 0,
    AsPrinted = 1,
    DropLeadingOne = 2,
}

#[repr(C)]
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct NhseComplex {
    pub re: f64,
    pub im: f64,
}

impl From<Complex64> for NhseComplex {
    fn from(z: Complex64) -> Self {
        Self { re: z.re, im: z.im }
    }
}

/// Model parameters. `v` is the potential strength, `num_sites` the chain length.
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct NhseParams {
    pub t: f64,
    pub gamma: f64,
    pub delta: f64,
    pub v: f64,
    pub theta: f64,
    pub num_sites: usize,
    pub boundary: NhseBoundary,
}

#[repr(C)]
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct NhseSkin {
    pub skew: f64,
    pub accumulation: f64,
    pub edge_states: usize,
    pub skin_detected: bool,
}

/// Opaque validated model.
pub struct NhseModel {
    spec: ModelSpec,
}

/// Opaque eigenvalue list, sorted by real then imaginary part.
pub struct NhseSpectrum {
    values: Vec<Complex64>,
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_error(msg: String) {
    let msg = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = msg);
}

fn status_of(e: &Error) -> NhseStatus {
    match e.class() {
        ErrorClass::Config => NhseStatus::ConfigError,
        ErrorClass::Numerical => NhseStatus::NumericalError,
        ErrorClass::Io => NhseStatus::IoError,
    }
}

enum Fail {
    Core(Error),
    Null(&'static str),
    Arg(String),
}

impl From<Error> for Fail {
    fn from(e: Error) -> Self {
        Fail::Core(e)
    }
}

fn guard<F: FnOnce() -> Result<(), Fail>>(f: F) -> NhseStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => {
            set_error(String::new());
            NhseStatus::Ok
        }
        Ok(Err(Fail::Core(e))) => {
            set_error(e.to_string());
            status_of(&e)
        }
        Ok(Err(Fail::Null(name))) => {
            set_error(format!("`{name}` is null"));
            NhseStatus::NullPointer
        }
        Ok(Err(Fail::Arg(msg))) => {
            set_error(msg);
            NhseStatus::InvalidArgument
        }
        Err(_) => {
            set_error("internal panic".into());
            NhseStatus::Panic
        }
    }
}

unsafe fn deref<'a, T>(p: *const T, name: &'static str) -> Result<&'a T, Fail> {
    unsafe { p.as_ref() }.ok_or(Fail::Null(name))
}

unsafe fn out<'a, T>(p: *mut T, name: &'static str) -> Result<&'a mut T, Fail> {
    unsafe { p.as_mut() }.ok_or(Fail::Null(name))
}

/// Message for the last failing call on this thread, or an empty string.
/// The pointer stays valid until the next call on the same thread.
#[no_mangle]
pub extern "C" fn nhse_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

/// Defaults: t = 1, gamma = 1.5, delta = 0.5, no potential, 100 open sites.
#[no_mangle]
pub extern "C" fn nhse_params_default() -> NhseParams {
    let s = ModelSpec::default();
    NhseParams {
        t: s.t,
        gamma: s.gamma,
        delta: s.delta,
        v: s.big_v,
        theta: s.theta,
        num_sites: s.num_sites,
        boundary: NhseBoundary::Open,
    }
}

/// # Safety
/// `params` must point to a valid `NhseParams`, `model` to writable storage.
#[no_mangle]
pub unsafe extern "C" fn nhse_model_new(params: *const NhseParams, model: *mut *mut NhseModel) -> NhseStatus {
    guard(|| {
        let p = unsafe { deref(params, "params")? };
        let slot = unsafe { out(model, "model")? };
        *slot = ptr::null_mut();
        let spec = validate_spec(ModelSpec {
            t: p.t,
            gamma: p.gamma,
            delta: p.delta,
            big_v: p.v,
            theta: p.theta,
            num_sites: p.num_sites,
            boundary: match p.boundary {
                NhseBoundary::Open => Boundary::Obc,
                NhseBoundary::Periodic => Boundary::Pbc,
            },
        })?;
        *slot = Box::into_raw(Box::new(NhseModel { spec }));
        Ok(())
    })
}

/// # Safety
/// `model` must come from `nhse_model_new` and not be freed twice. Null is ignored.
#[no_mangle]
pub unsafe extern "C" fn nhse_model_free(model: *mut NhseModel) {
    if !model.is_null() {
        drop(unsafe { Box::from_raw(model) });
    }
}

/// Eigenvalues of the BdG matrix.
///
/// # Safety
/// `model` must be a live handle, `spectrum` writable.
#[no_mangle]
pub unsafe extern "C" fn nhse_spectrum_new(model: *const NhseModel, spectrum: *mut *mut NhseSpectrum) -> NhseStatus {
    guard(|| {
        let m = unsafe { deref(model, "model")? };
        let slot = unsafe { out(spectrum, "spectrum")? };
        *slot = ptr::null_mut();
        let mut values = eigenvalues(&build_bdg(&m.spec)?)?;
        values.sort_by(|a, b| a.re.total_cmp(&b.re).then(a.im.total_cmp(&b.im)));
        *slot = Box::into_raw(Box::new(NhseSpectrum { values }));
        Ok(())
    })
}

/// # Safety
/// `spectrum` must be a live handle or null.
#[no_mangle]
pub unsafe extern "C" fn nhse_spectrum_len(spectrum: *const NhseSpectrum) -> usize {
    unsafe { spectrum.as_ref() }.map_or(0, |s| s.values.len())
}

/// # Safety
/// `spectrum` must be a live handle, `value` writable.
#[no_mangle]
pub unsafe extern "C" fn nhse_spectrum_get(spectrum: *const NhseSpectrum, index: usize, value: *mut NhseComplex) -> NhseStatus {
    guard(|| {
        let s = unsafe { deref(spectrum, "spectrum")? };
        let v = unsafe { out(value, "value")? };
        let z = s.values.get(index).ok_or_else(|| Fail::Arg(format!("index {index} out of range 0..{}", s.values.len())))?;
        *v = (*z).into();
        Ok(())
    })
}

/// # Safety
/// `spectrum` must come from `nhse_spectrum_new` and not be freed twice. Null is ignored.
#[no_mangle]
pub unsafe extern "C" fn nhse_spectrum_free(spectrum: *mut NhseSpectrum) {
    if !spectrum.is_null() {
        drop(unsafe { Box::from_raw(spectrum) });
    }
}

/// Symmetry verdict over the default candidate set. `residual` receives NaN
/// when no candidate has reflection structure.
///
/// # Safety
/// `model` must be a live handle; `verdict` and `residual` writable.
#[no_mangle]
pub unsafe extern "C" fn nhse_model_verdict(
    model: *const NhseModel,
    tol: f64,
    verdict: *mut NhseVerdict,
    residual: *mut f64,
) -> NhseStatus {
    guard(|| {
        let m = unsafe { deref(model, "model")? };
        let kind_out = unsafe { out(verdict, "verdict")? };
        let res_out = unsafe { out(residual, "residual")? };
        let v = theorem_verdict(&build_bdg(&m.spec)?, &default_candidates(m.spec.num_sites)?, tol)?;
        *kind_out = match v.kind {
            VerdictKind::NhseBlocked => NhseVerdict::Blocked,
            VerdictKind::NhseExpected => NhseVerdict::Expected,
            VerdictKind::InapplicableReducible => NhseVerdict::InapplicableReducible,
            VerdictKind::NoSymmetryFound => NhseVerdict::NoSymmetryFound,
        };
        *res_out = v.residual.unwrap_or(f64::NAN);
        Ok(())
    })
}

/// Skin metrics of all BdG eigenstates.
///
/// # Safety
/// `model` must be a live handle, `skin` writable.
#[no_mangle]
pub unsafe extern "C" fn nhse_model_skin(
    model: *const NhseModel,
    ell: usize,
    w_edge: f64,
    tau_skin: f64,
    skin: *mut NhseSkin,
) -> NhseStatus {
    guard(|| {
        let m = unsafe { deref(model, "model")? };
        let dst = unsafe { out(skin, "skin")? };
        let pairs = eigen_right(&build_bdg(&m.spec)?)?;
        let r = skin_metrics(&pairs, m.spec.num_sites, SkinOptions { ell, w_edge, tau_skin })?;
        *dst = NhseSkin {
            skew: r.skew,
            accumulation: r.accumulation,
            edge_states: r.edge().count(),
            skin_detected: r.skin_detected,
        };
        Ok(())
    })
}

/// The four roots at `energy`, ordered (1+, 1-, 2-, 2+).
///
/// # Safety
/// `model` must be a live handle, `roots` must hold 4 values.
#[no_mangle]
pub unsafe extern "C" fn nhse_solve_beta(model: *const NhseModel, energy: NhseComplex, roots: *mut NhseComplex) -> NhseStatus {
    guard(|| {
        let m = unsafe { deref(model, "model")? };
        if roots.is_null() {
            return Err(Fail::Null("roots"));
        }
        let q = solve_beta(&m.spec, Complex64::new(energy.re, energy.im))?;
        let dst = unsafe { std::slice::from_raw_parts_mut(roots, 4) };
        for (d, b) in dst.iter_mut().zip(q.ordered()) {
            *d = b.into();
        }
        Ok(())
    })
}

/// # Safety
/// `model` must be a live handle, `phase` writable.
#[no_mangle]
pub unsafe extern "C" fn nhse_zak_phase(model: *const NhseModel, band: NhseBand, grid: usize, phase: *mut f64) -> NhseStatus {
    guard(|| {
        let m = unsafe { deref(model, "model")? };
        let dst = unsafe { out(phase, "phase")? };
        let band = match band {
            NhseBand::Plus => Band::Plus,
            NhseBand::Minus => Band::Minus,
        };
        *dst = zak_phase(&m.spec, band, grid)?.phase;
        Ok(())
    })
}

/// Normalized boundary determinant of a `sites`-long open chain at `energy`.
///
/// # Safety
/// `model` must be a live handle, `det` writable.
#[no_mangle]
pub unsafe extern "C" fn nhse_boundary_determinant(
    model: *const NhseModel,
    energy: NhseComplex,
    sites: usize,
    variant: NhseVariant,
    det: *mut NhseComplex,
) -> NhseStatus {
    guard(|| {
        let m = unsafe { deref(model, "model")? };
        let dst = unsafe { out(det, "det")? };
        let variant = match variant {
            NhseVariant::Rederived => CoefficientVariant::Rederived,
            NhseVariant::AsPrinted => CoefficientVariant::AsPrinted,
            NhseVariant::DropLeadingOne => CoefficientVariant::DropLeadingOne,
        };
        *dst = boundary_determinant(&m.spec, Complex64::new(energy.re, energy.im), sites, variant)?.into();
        Ok(())
    })
}
