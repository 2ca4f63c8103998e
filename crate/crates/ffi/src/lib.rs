//! C ABI over the channel simulator.
//!
//! Every function returns an [`MbqcStatus`]. On failure the thread's last
//! error message is available from [`mbqc_last_error`]. Channel runs are
//! held behind an opaque [`MbqcChannel`] handle released with
//! [`mbqc_channel_free`].

use std::cell::RefCell;
use std::ffi::{c_char, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use mbqc_channel::experiment::{cmd_cluster_fidelity, run_channel, ChannelRun, Engine, RunConfig};
use mbqc_channel::{ChannelMode, Error, NoiseSpec};

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum MbqcStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    NumericalFailure = 3,
    Panic = 4,
}

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum MbqcMode {
    Amplitude = 0,
    Phase = 1,
    Beta = 2,
}

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum MbqcEngine {
    Kraus = 0,
    Circuit = 1,
    Mbqc = 2,
}

/// Channel run settings. Start from [`mbqc_channel_config_default`].
#[repr(C)]
#[derive(Clone, Copy, Debug)]
pub struct MbqcChannelConfig {
    pub mode: MbqcMode,
    pub engine: MbqcEngine,
    /// Take the damping from `gamma`; otherwise from `alpha` and `beta`.
    pub use_gamma: bool,
    pub gamma: f64,
    pub alpha: f64,
    pub beta: f64,
    /// Keep only runs whose first two outcomes are `s1`, `s2`.
    pub postselect: bool,
    pub s1: u8,
    pub s2: u8,
    pub noise_v: f64,
    pub visibility: f64,
    /// Shots per measurement setting; 0 for exact expectations.
    pub shots: u64,
    pub seed: u64,
}

/// Opaque result of one channel run.
pub struct MbqcChannel {
    run: ChannelRun,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: impl Into<String>) {
    let text = msg.into().replace('\0', " ");
    LAST_ERROR.with(|e| *e.borrow_mut() = CString::new(text).ok());
}

fn status_of(err: &Error) -> MbqcStatus {
    if err.is_numerical() {
        MbqcStatus::NumericalFailure
    } else {
        MbqcStatus::InvalidArgument
    }
}

/// Runs `f`, converting errors and panics to status codes.
fn guard(f: impl FnOnce() -> Result<(), MbqcStatus>) -> MbqcStatus {
    LAST_ERROR.with(|e| *e.borrow_mut() = None);
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => MbqcStatus::Ok,
        Ok(Err(s)) => s,
        Err(_) => {
            set_error("internal panic");
            MbqcStatus::Panic
        }
    }
}

fn check<T>(r: mbqc_channel::Result<T>) -> Result<T, MbqcStatus> {
    r.map_err(|e| {
        set_error(e.to_string());
        status_of(&e)
    })
}

fn non_null<T>(p: *const T, name: &str) -> Result<(), MbqcStatus> {
    if p.is_null() {
        set_error(format!("{name} is null"));
        Err(MbqcStatus::NullPointer)
    } else {
        Ok(())
    }
}

fn noise(noise_v: f64, visibility: f64) -> NoiseSpec {
    NoiseSpec::white(noise_v).with_visibility(visibility)
}

fn run_config(c: &MbqcChannelConfig) -> RunConfig {
    let mode = match c.mode {
        MbqcMode::Amplitude => ChannelMode::Amplitude,
        MbqcMode::Phase => ChannelMode::Phase,
        MbqcMode::Beta => ChannelMode::Beta,
    };
    let engine = match c.engine {
        MbqcEngine::Kraus => Engine::Kraus,
        MbqcEngine::Circuit => Engine::Circuit,
        MbqcEngine::Mbqc => Engine::Mbqc,
    };
    let mut cfg = if c.use_gamma {
        RunConfig::with_gamma(mode, c.gamma, engine)
    } else {
        RunConfig::with_angles(mode, c.alpha, c.beta, engine)
    };
    cfg.postselect = c.postselect.then_some((c.s1, c.s2));
    cfg.noise = noise(c.noise_v, c.visibility);
    cfg.shots = (c.shots > 0).then_some(c.shots);
    cfg.seed = c.seed;
    cfg
}

fn copy_matrix(m: [[f64; 4]; 4], out: *mut f64) {
    for (k, v) in m.iter().flatten().enumerate() {
        // SAFETY: callers pass buffers of at least 16 doubles.
        unsafe { *out.add(k) = *v };
    }
}

/// Exact, ideal, mbqc-engine amplitude damping at Γ = 0.
#[no_mangle]
pub extern "C" fn mbqc_channel_config_default() -> MbqcChannelConfig {
    MbqcChannelConfig {
        mode: MbqcMode::Amplitude,
        engine: MbqcEngine::Mbqc,
        use_gamma: true,
        gamma: 0.0,
        alpha: 0.0,
        beta: 0.0,
        postselect: false,
        s1: 0,
        s2: 0,
        noise_v: 1.0,
        visibility: 1.0,
        shots: 0,
        seed: 0,
    }
}

/// Realises a channel and reconstructs its process matrix. On success
/// `*out` owns a handle to free with [`mbqc_channel_free`].
///
/// # Safety
/// `config` must point to a valid config and `out` to writable storage.
#[no_mangle]
pub unsafe extern "C" fn mbqc_channel_new(
    config: *const MbqcChannelConfig,
    out: *mut *mut MbqcChannel,
) -> MbqcStatus {
    guard(|| {
        non_null(config, "config")?;
        non_null(out, "out")?;
        let cfg = run_config(&*config);
        let run = check(run_channel(&cfg))?;
        *out = Box::into_raw(Box::new(MbqcChannel { run }));
        Ok(())
    })
}

/// Releases a handle. Null is accepted.
///
/// # Safety
/// `handle` must come from [`mbqc_channel_new`] and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn mbqc_channel_free(handle: *mut MbqcChannel) {
    if !handle.is_null() {
        drop(Box::from_raw(handle));
    }
}

/// Reconstructed χ as row-major real and imaginary parts, 16 doubles each,
/// in the Pauli order I, X, Y, Z.
///
/// # Safety
/// `re` and `im` must each hold 16 doubles.
#[no_mangle]
pub unsafe extern "C" fn mbqc_channel_chi(
    handle: *const MbqcChannel,
    re: *mut f64,
    im: *mut f64,
) -> MbqcStatus {
    guard(|| {
        non_null(handle, "handle")?;
        non_null(re, "re")?;
        non_null(im, "im")?;
        let chi = &(*handle).run.chi;
        copy_matrix(chi.real_part(), re);
        copy_matrix(chi.imag_part(), im);
        Ok(())
    })
}

/// χ of the ideal Kraus channel for the same parameters.
///
/// # Safety
/// `re` and `im` must each hold 16 doubles.
#[no_mangle]
pub unsafe extern "C" fn mbqc_channel_ideal_chi(
    handle: *const MbqcChannel,
    re: *mut f64,
    im: *mut f64,
) -> MbqcStatus {
    guard(|| {
        non_null(handle, "handle")?;
        non_null(re, "re")?;
        non_null(im, "im")?;
        let chi = &(*handle).run.ideal;
        copy_matrix(chi.real_part(), re);
        copy_matrix(chi.imag_part(), im);
        Ok(())
    })
}

/// Process fidelity against the ideal channel, and the bootstrap σ (NaN for
/// exact runs). `sigma` may be null.
///
/// # Safety
/// `fidelity` must be writable; `sigma` writable or null.
#[no_mangle]
pub unsafe extern "C" fn mbqc_channel_fidelity(
    handle: *const MbqcChannel,
    fidelity: *mut f64,
    sigma: *mut f64,
) -> MbqcStatus {
    guard(|| {
        non_null(handle, "handle")?;
        non_null(fidelity, "fidelity")?;
        let run = &(*handle).run;
        *fidelity = run.fidelity;
        if !sigma.is_null() {
            *sigma = run.bootstrap_sigma.unwrap_or(f64::NAN);
        }
        Ok(())
    })
}

/// Local-Pauli fidelity estimate of the noisy cluster resource, its exact
/// value, and the entanglement verdict. `shots` = 0 uses exact
/// expectations. `exact` and `gme` may be null.
///
/// # Safety
/// `estimate` must be writable; `exact` and `gme` writable or null.
#[no_mangle]
pub unsafe extern "C" fn mbqc_cluster_fidelity(
    noise_v: f64,
    visibility: f64,
    shots: u64,
    seed: u64,
    estimate: *mut f64,
    exact: *mut f64,
    gme: *mut bool,
) -> MbqcStatus {
    guard(|| {
        non_null(estimate, "estimate")?;
        let report = check(cmd_cluster_fidelity(
            &noise(noise_v, visibility),
            (shots > 0).then_some(shots),
            seed,
        ))?;
        *estimate = report.estimated_fidelity;
        if !exact.is_null() {
            *exact = report.exact_fidelity;
        }
        if !gme.is_null() {
            *gme = report.gme;
        }
        Ok(())
    })
}

/// Message for the last failure on this thread, or null. Valid until the
/// next call into this library from the same thread.
#[no_mangle]
pub extern "C" fn mbqc_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |s| s.as_ptr()))
}
