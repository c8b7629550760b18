//! C ABI over the `ionx` simulator.
//!
//! Every function returns an [`IonxStatus`]; on failure a message is kept
//! per thread and can be read with [`ionx_last_error_message`]. Objects are
//! opaque handles created by `*_new`/`*_solve`/`*_simulate` functions and
//! released with the matching `*_free`. Passing a null handle to a free
//! function is allowed.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use ionx::config::RunConfig;
use ionx::netlist::export_netlist;
use ionx::solver::{BoundaryControl, DriveMode, FluxSeries, MembraneModel, SolveSettings, StateVector};
use ionx::{DriveSignal, Error};

/// Result of every call.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum IonxStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    OutOfDomain = 3,
    Shape = 4,
    Convergence = 5,
    StepTooSmall = 6,
    Precondition = 7,
    Parse = 8,
    Io = 9,
    BufferTooSmall = 10,
    Panic = 11,
}

/// How the left boundary is driven.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum IonxMode {
    Potentiostatic = 0,
    Galvanostatic = 1,
}

/// Columns of a flux series.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum IonxSeriesColumn {
    Tau = 0,
    ExitFlux = 1,
    TotalCurrent = 2,
    Drive = 3,
}

/// A membrane system on a grid, with solver settings.
pub struct IonxModel {
    model: MembraneModel,
    config: RunConfig,
}

/// Concentrations and potentials at one instant.
pub struct IonxState {
    state: StateVector,
}

/// Uniformly sampled exit flux and current.
pub struct IonxSeries {
    series: FluxSeries,
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_error(msg: &str) {
    let clean = msg.replace('\0', " ");
    LAST_ERROR.with(|e| *e.borrow_mut() = CString::new(clean).unwrap_or_default());
}

fn status_of(e: &Error) -> IonxStatus {
    match e {
        Error::InvalidParameter { .. } | Error::UnknownScenario { .. } => IonxStatus::InvalidArgument,
        Error::OutOfDomain { .. } => IonxStatus::OutOfDomain,
        Error::Shape(_) => IonxStatus::Shape,
        Error::Convergence { .. } => IonxStatus::Convergence,
        Error::StepTooSmall { .. } => IonxStatus::StepTooSmall,
        Error::Precondition(_) | Error::ZeroSpectrum(_) => IonxStatus::Precondition,
        Error::Parse(_) => IonxStatus::Parse,
        Error::Io(_) => IonxStatus::Io,
    }
}

struct Fail(IonxStatus, String);

impl From<Error> for Fail {
    fn from(e: Error) -> Self {
        Fail(status_of(&e), e.to_string())
    }
}

/// Runs `f`, recording any error or panic.
fn guard(f: impl FnOnce() -> Result<(), Fail>) -> IonxStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => {
            set_error("");
            IonxStatus::Ok
        }
        Ok(Err(Fail(status, msg))) => {
            set_error(&msg);
            status
        }
        Err(_) => {
            set_error("internal panic");
            IonxStatus::Panic
        }
    }
}

fn null(what: &str) -> Fail {
    Fail(IonxStatus::NullPointer, format!("{what} is null"))
}

unsafe fn borrow<'a, T>(p: *const T, what: &str) -> Result<&'a T, Fail> {
    p.as_ref().ok_or_else(|| null(what))
}

unsafe fn text<'a>(p: *const c_char, what: &str) -> Result<&'a str, Fail> {
    if p.is_null() {
        return Err(null(what));
    }
    CStr::from_ptr(p)
        .to_str()
        .map_err(|_| Fail(IonxStatus::InvalidArgument, format!("{what} is not UTF-8")))
}

unsafe fn emit<T>(out: *mut *mut T, value: T) -> Result<(), Fail> {
    if out.is_null() {
        return Err(null("output pointer"));
    }
    *out = Box::into_raw(Box::new(value));
    Ok(())
}

unsafe fn copy_out(src: &[f64], buf: *mut f64, len: usize) -> Result<(), Fail> {
    if buf.is_null() {
        return Err(null("buffer"));
    }
    if len < src.len() {
        return Err(Fail(
            IonxStatus::BufferTooSmall,
            format!("buffer holds {len} values, need {}", src.len()),
        ));
    }
    ptr::copy_nonoverlapping(src.as_ptr(), buf, src.len());
    Ok(())
}

fn drive_mode(mode: IonxMode, signal: DriveSignal) -> DriveMode {
    match mode {
        IonxMode::Potentiostatic => DriveMode::Potentiostatic(signal),
        IonxMode::Galvanostatic => DriveMode::Galvanostatic(signal),
    }
}

/// Message of the last failed call on this thread, or an empty string.
/// The pointer stays valid until the next call on the same thread.
#[no_mangle]
pub extern "C" fn ionx_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

/// Library version as a static string.
#[no_mangle]
pub extern "C" fn ionx_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Builds a model from `key=value` configuration text (see the CLI docs);
/// a null or empty text gives the reference system on the 480-compartment grid.
///
/// # Safety
/// `config` must be null or a NUL-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn ionx_model_new(config: *const c_char, out: *mut *mut IonxModel) -> IonxStatus {
    guard(|| {
        let mut cfg = RunConfig::default();
        if !config.is_null() {
            cfg.apply_text(text(config, "config")?)?;
        }
        cfg.validate()?;
        let model = MembraneModel::new(cfg.system.clone(), cfg.build_grid()?)?;
        emit(out, IonxModel { model, config: cfg })
    })
}

/// # Safety
/// `model` must be null or a handle from [`ionx_model_new`], not yet freed.
#[no_mangle]
pub unsafe extern "C" fn ionx_model_free(model: *mut IonxModel) {
    if !model.is_null() {
        drop(Box::from_raw(model));
    }
}

/// Number of compartments.
///
/// # Safety
/// Pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn ionx_model_compartments(model: *const IonxModel, out: *mut usize) -> IonxStatus {
    guard(|| {
        let m = borrow(model, "model")?;
        if out.is_null() {
            return Err(null("output pointer"));
        }
        *out = m.model.grid().len();
        Ok(())
    })
}

/// Compartment centres, `len >= compartments`.
///
/// # Safety
/// `buf` must hold `len` doubles.
#[no_mangle]
pub unsafe extern "C" fn ionx_model_centers(model: *const IonxModel, buf: *mut f64, len: usize) -> IonxStatus {
    guard(|| copy_out(borrow(model, "model")?.model.grid().centers(), buf, len))
}

fn settings(m: &IonxModel) -> &SolveSettings {
    &m.config.settings
}

/// Zero-current equilibrium.
///
/// # Safety
/// Pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn ionx_equilibrium(model: *const IonxModel, out: *mut *mut IonxState) -> IonxStatus {
    guard(|| {
        let m = borrow(model, "model")?;
        let state = m.model.equilibrium(settings(m))?;
        emit(out, IonxState { state })
    })
}

/// Steady state under a constant boundary potential or current `value`.
///
/// # Safety
/// Pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn ionx_steady_state(
    model: *const IonxModel,
    mode: IonxMode,
    value: f64,
    out: *mut *mut IonxState,
) -> IonxStatus {
    guard(|| {
        let m = borrow(model, "model")?;
        let control = match mode {
            IonxMode::Potentiostatic => BoundaryControl::Potential(value),
            IonxMode::Galvanostatic => BoundaryControl::Current(value),
        };
        let state = m.model.steady_state(control, settings(m))?;
        emit(out, IonxState { state })
    })
}

/// # Safety
/// `state` must be null or a live state handle.
#[no_mangle]
pub unsafe extern "C" fn ionx_state_free(state: *mut IonxState) {
    if !state.is_null() {
        drop(Box::from_raw(state));
    }
}

/// Concentration of `species` (0-based) in every compartment.
///
/// # Safety
/// `buf` must hold `len` doubles.
#[no_mangle]
pub unsafe extern "C" fn ionx_state_concentration(
    state: *const IonxState,
    species: usize,
    buf: *mut f64,
    len: usize,
) -> IonxStatus {
    guard(|| {
        let s = borrow(state, "state")?;
        let c = s
            .state
            .conc
            .get(species)
            .ok_or_else(|| Fail(IonxStatus::InvalidArgument, format!("species {species} out of range")))?;
        copy_out(c, buf, len)
    })
}

/// Potential in every compartment.
///
/// # Safety
/// `buf` must hold `len` doubles.
#[no_mangle]
pub unsafe extern "C" fn ionx_state_potential(state: *const IonxState, buf: *mut f64, len: usize) -> IonxStatus {
    guard(|| copy_out(&borrow(state, "state")?.state.phi, buf, len))
}

/// Cation flux leaving the membrane at `state`.
///
/// # Safety
/// Pointers must be valid and the state must belong to the model's grid.
#[no_mangle]
pub unsafe extern "C" fn ionx_exit_flux(model: *const IonxModel, state: *const IonxState, out: *mut f64) -> IonxStatus {
    guard(|| {
        let m = borrow(model, "model")?;
        let s = borrow(state, "state")?;
        if s.state.phi.len() != m.model.grid().len() || s.state.conc.len() != m.model.system().species_count() {
            return Err(Fail(IonxStatus::Shape, "state does not match model".into()));
        }
        if out.is_null() {
            return Err(null("output pointer"));
        }
        *out = m.model.exit_flux(&s.state);
        Ok(())
    })
}

/// Integrates from equilibrium under `drive` (e.g. `"step(5)"`) to `tau_end`.
///
/// # Safety
/// Pointers must be valid; `drive` must be NUL-terminated.
#[no_mangle]
pub unsafe extern "C" fn ionx_simulate(
    model: *const IonxModel,
    mode: IonxMode,
    drive: *const c_char,
    tau_end: f64,
    out: *mut *mut IonxSeries,
) -> IonxStatus {
    guard(|| {
        let m = borrow(model, "model")?;
        let signal: DriveSignal = text(drive, "drive")?.parse()?;
        let sim = m.model.simulate(&drive_mode(mode, signal), tau_end, settings(m))?;
        emit(out, IonxSeries { series: sim.series })
    })
}

/// # Safety
/// `series` must be null or a live series handle.
#[no_mangle]
pub unsafe extern "C" fn ionx_series_free(series: *mut IonxSeries) {
    if !series.is_null() {
        drop(Box::from_raw(series));
    }
}

/// Number of samples.
///
/// # Safety
/// Pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn ionx_series_len(series: *const IonxSeries, out: *mut usize) -> IonxStatus {
    guard(|| {
        let s = borrow(series, "series")?;
        if out.is_null() {
            return Err(null("output pointer"));
        }
        *out = s.series.len();
        Ok(())
    })
}

/// Copies one column into `buf`.
///
/// # Safety
/// `buf` must hold `len` doubles.
#[no_mangle]
pub unsafe extern "C" fn ionx_series_column(
    series: *const IonxSeries,
    column: IonxSeriesColumn,
    buf: *mut f64,
    len: usize,
) -> IonxStatus {
    guard(|| {
        let s = &borrow(series, "series")?.series;
        let col = match column {
            IonxSeriesColumn::Tau => &s.tau,
            IonxSeriesColumn::ExitFlux => &s.exit_flux,
            IonxSeriesColumn::TotalCurrent => &s.total_current,
            IonxSeriesColumn::Drive => &s.drive,
        };
        copy_out(col, buf, len)
    })
}

/// Netlist text linearized at equilibrium; free with [`ionx_string_free`].
///
/// # Safety
/// Pointers must be valid; `drive` must be NUL-terminated.
#[no_mangle]
pub unsafe extern "C" fn ionx_netlist(
    model: *const IonxModel,
    mode: IonxMode,
    drive: *const c_char,
    out: *mut *mut c_char,
) -> IonxStatus {
    guard(|| {
        let m = borrow(model, "model")?;
        let signal: DriveSignal = text(drive, "drive")?.parse()?;
        let eq = m.model.equilibrium(settings(m))?;
        let net = export_netlist(m.model.system(), m.model.grid(), &eq, &drive_mode(mode, signal))?;
        if out.is_null() {
            return Err(null("output pointer"));
        }
        *out = CString::new(net)
            .map_err(|_| Fail(IonxStatus::Io, "netlist contains NUL".into()))?
            .into_raw();
        Ok(())
    })
}

/// # Safety
/// `s` must be null or a string returned by this library.
#[no_mangle]
pub unsafe extern "C" fn ionx_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}
