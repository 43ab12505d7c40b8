//! C ABI over the spindiff toolkit.
//!
//! Every fallible call returns an [`SpdStatus`]; the message of the last
//! failure on the calling thread is available through [`spd_last_error`].
//! Handles are opaque and must be released with their `_free` function.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::Path;
use std::ptr;

use num_complex::Complex64 as C64;
use spindiff::config::Scenario;
use spindiff::dynamics::{pump_sweep, CoupledSystem, ModeAmplitudes, Regime, SweepPoint};
use spindiff::eigenmodes::robin_roots;
use spindiff::figures::{write_figure, FigureTag};
use spindiff::signal::{fit_lorentzians, spearman, FitResult, Spectrum};
use spindiff::Error;

/// Result codes. Zero is success.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SpdStatus {
    Ok = 0,
    NullPointer = 1,
    Domain = 2,
    Solver = 3,
    Config = 4,
    Integration = 5,
    NotConverged = 6,
    Undefined = 7,
    Parse = 8,
    Io = 9,
    InvalidUtf8 = 10,
    OutOfRange = 11,
    Panic = 12,
}

impl From<&Error> for SpdStatus {
    fn from(e: &Error) -> Self {
        match e {
            Error::Domain(_) => SpdStatus::Domain,
            Error::Solver(_) => SpdStatus::Solver,
            Error::Config(_) => SpdStatus::Config,
            Error::Integration(_) => SpdStatus::Integration,
            Error::NotConverged { .. } => SpdStatus::NotConverged,
            Error::Undefined(_) => SpdStatus::Undefined,
            Error::Parse { .. } => SpdStatus::Parse,
            Error::Io(_) | Error::Csv(_) => SpdStatus::Io,
        }
    }
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).expect("interior NULs removed");
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn fail(status: SpdStatus, msg: impl Into<String>) -> SpdStatus {
    set_error(msg.into());
    status
}

/// Run `f`, mapping core errors and panics to status codes.
fn guard(f: impl FnOnce() -> Result<(), SpdStatus>) -> SpdStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => SpdStatus::Ok,
        Ok(Err(s)) => s,
        Err(p) => {
            let msg = p
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| p.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "panic".into());
            fail(SpdStatus::Panic, msg)
        }
    }
}

fn core<T>(r: spindiff::Result<T>) -> Result<T, SpdStatus> {
    r.map_err(|e| fail(SpdStatus::from(&e), e.to_string()))
}

fn non_null<T>(p: *const T, name: &str) -> Result<(), SpdStatus> {
    if p.is_null() {
        Err(fail(SpdStatus::NullPointer, format!("{name} is null")))
    } else {
        Ok(())
    }
}

unsafe fn str_arg<'a>(p: *const c_char, name: &str) -> Result<&'a str, SpdStatus> {
    non_null(p, name)?;
    CStr::from_ptr(p).to_str().map_err(|_| fail(SpdStatus::InvalidUtf8, format!("{name} is not UTF-8")))
}

unsafe fn slice_arg<'a>(p: *const f64, len: usize, name: &str) -> Result<&'a [f64], SpdStatus> {
    if len == 0 {
        return Ok(&[]);
    }
    non_null(p, name)?;
    Ok(std::slice::from_raw_parts(p, len))
}

/// Copy the last error message of this thread into `buf` (NUL-terminated,
/// truncated to `len`). Returns the full message length without the NUL, or 0
/// when there is none.
///
/// # Safety
/// `buf` must be null or point to `len` writable bytes.
#[no_mangle]
pub unsafe extern "C" fn spd_last_error(buf: *mut c_char, len: usize) -> usize {
    LAST_ERROR.with(|e| {
        let e = e.borrow();
        let Some(msg) = e.as_ref() else { return 0 };
        let bytes = msg.as_bytes();
        if !buf.is_null() && len > 0 {
            let n = bytes.len().min(len - 1);
            ptr::copy_nonoverlapping(bytes.as_ptr().cast(), buf, n);
            *buf.add(n) = 0;
        }
        bytes.len()
    })
}

/// Static description of a status code; "unknown status" for other values.
#[no_mangle]
pub extern "C" fn spd_status_str(status: i32) -> *const c_char {
    const TABLE: [&CStr; 13] = [
        c"ok",
        c"null pointer",
        c"domain error",
        c"solver error",
        c"configuration error",
        c"integration error",
        c"fit did not converge",
        c"undefined result",
        c"parse error",
        c"i/o error",
        c"invalid UTF-8",
        c"index out of range",
        c"internal panic",
    ];
    usize::try_from(status).ok().and_then(|i| TABLE.get(i)).copied().unwrap_or(c"unknown status").as_ptr()
}

/// Opaque validated scenario.
pub struct SpdScenario(Scenario);

/// Opaque pump-sweep result.
pub struct SpdSweep(Vec<SweepPoint>);

/// Opaque Lorentzian fit result.
pub struct SpdFit(FitResult);

fn put<T>(out: *mut *mut T, v: T) {
    // SAFETY: callers check `out` for null first
    unsafe { *out = Box::into_raw(Box::new(v)) };
}

/// Scenario with every key at its default.
///
/// # Safety
/// `out` must be a valid pointer to a handle slot.
#[no_mangle]
pub unsafe extern "C" fn spd_scenario_default(out: *mut *mut SpdScenario) -> SpdStatus {
    guard(|| {
        non_null(out, "out")?;
        put(out, SpdScenario(Scenario::default()));
        Ok(())
    })
}

/// Scenario from `key = value` text; unknown keys and bad units are errors.
///
/// # Safety
/// `text` must be a NUL-terminated string; `out` a valid handle slot.
#[no_mangle]
pub unsafe extern "C" fn spd_scenario_from_text(text: *const c_char, out: *mut *mut SpdScenario) -> SpdStatus {
    guard(|| {
        non_null(out, "out")?;
        let s = core(Scenario::from_text(str_arg(text, "text")?))?;
        put(out, SpdScenario(s));
        Ok(())
    })
}

/// Scenario from a file, with `SPINDIFF_` environment overrides applied.
///
/// # Safety
/// `path` must be a NUL-terminated string; `out` a valid handle slot.
#[no_mangle]
pub unsafe extern "C" fn spd_scenario_load(path: *const c_char, out: *mut *mut SpdScenario) -> SpdStatus {
    guard(|| {
        non_null(out, "out")?;
        let p = str_arg(path, "path")?;
        let s = core(Scenario::load(Some(Path::new(p))))?;
        put(out, SpdScenario(s));
        Ok(())
    })
}

/// # Safety
/// `s` must be null or a handle from an `spd_scenario_*` constructor, freed once.
#[no_mangle]
pub unsafe extern "C" fn spd_scenario_free(s: *mut SpdScenario) {
    if !s.is_null() {
        drop(Box::from_raw(s));
    }
}

/// Copy the 64-hex-digit scenario hash and a NUL into `buf` (at least 65 bytes).
///
/// # Safety
/// `s` must be a live scenario handle; `buf` must point to `len` writable bytes.
#[no_mangle]
pub unsafe extern "C" fn spd_scenario_hash(s: *const SpdScenario, buf: *mut c_char, len: usize) -> SpdStatus {
    guard(|| {
        non_null(s, "scenario")?;
        non_null(buf, "buf")?;
        let h = (*s).0.hash.as_bytes();
        if len <= h.len() {
            return Err(fail(SpdStatus::OutOfRange, format!("buffer of {len} bytes, need {}", h.len() + 1)));
        }
        ptr::copy_nonoverlapping(h.as_ptr().cast(), buf, h.len());
        *buf.add(h.len()) = 0;
        Ok(())
    })
}

/// Write the CSV tables of one figure (`fig2` ... `suppl-noneon`) into `dir`.
///
/// # Safety
/// `s` must be a live scenario handle; `tag` and `dir` NUL-terminated strings.
#[no_mangle]
pub unsafe extern "C" fn spd_figure_write(s: *const SpdScenario, tag: *const c_char, dir: *const c_char) -> SpdStatus {
    guard(|| {
        non_null(s, "scenario")?;
        let tag: FigureTag = core(str_arg(tag, "tag")?.parse())?;
        core(write_figure(tag, &(*s).0, Path::new(str_arg(dir, "dir")?)))?;
        Ok(())
    })
}

/// First `count` roots kR of the Robin condition j_l + c kR j_l' = 0, l <= 3.
///
/// # Safety
/// `out` must point to `count` writable doubles.
#[no_mangle]
pub unsafe extern "C" fn spd_robin_roots(l: u32, c: f64, count: usize, out: *mut f64) -> SpdStatus {
    guard(|| {
        non_null(out, "out")?;
        let roots = core(robin_roots(l, c, count))?;
        for (i, r) in roots.iter().enumerate() {
            *out.add(i) = r.x;
        }
        Ok(())
    })
}

/// One point of a pump sweep; frequencies and linewidths in Hz, power in W.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpdSweepPoint {
    pub power: f64,
    pub n: [f64; 2],
    pub frequency: [f64; 2],
    pub linewidth: [f64; 2],
    pub phase: [f64; 2],
    pub j_abs: f64,
    pub j_over_delta: f64,
    /// 1 when the modes are coupled (|J/Delta| > 1), else 0.
    pub coupled: i32,
}

impl From<&SweepPoint> for SpdSweepPoint {
    fn from(p: &SweepPoint) -> Self {
        Self {
            power: p.power,
            n: p.n,
            frequency: p.frequency,
            linewidth: p.linewidth,
            phase: p.phase,
            j_abs: p.j_abs,
            j_over_delta: p.j_over_delta,
            coupled: (p.regime == Regime::Coupled) as i32,
        }
    }
}

/// Run the scenario's pump sweep.
///
/// # Safety
/// `s` must be a live scenario handle; `out` a valid handle slot.
#[no_mangle]
pub unsafe extern "C" fn spd_sweep_run(s: *const SpdScenario, out: *mut *mut SpdSweep) -> SpdStatus {
    guard(|| {
        non_null(s, "scenario")?;
        non_null(out, "out")?;
        let sweep = core((*s).0.sweep())?;
        put(out, SpdSweep(core(pump_sweep(&sweep))?));
        Ok(())
    })
}

/// Number of points; 0 for a null handle.
///
/// # Safety
/// `w` must be null or a live sweep handle.
#[no_mangle]
pub unsafe extern "C" fn spd_sweep_len(w: *const SpdSweep) -> usize {
    if w.is_null() {
        0
    } else {
        (*w).0.len()
    }
}

/// # Safety
/// `w` must be a live sweep handle; `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn spd_sweep_point(w: *const SpdSweep, i: usize, out: *mut SpdSweepPoint) -> SpdStatus {
    guard(|| {
        non_null(w, "sweep")?;
        non_null(out, "out")?;
        let pts = &(*w).0;
        let p = pts.get(i).ok_or_else(|| fail(SpdStatus::OutOfRange, format!("point {i} of {}", pts.len())))?;
        *out = p.into();
        Ok(())
    })
}

/// # Safety
/// `w` must be null or a handle from [`spd_sweep_run`], freed once.
#[no_mangle]
pub unsafe extern "C" fn spd_sweep_free(w: *mut SpdSweep) {
    if !w.is_null() {
        drop(Box::from_raw(w));
    }
}

/// Two coupled modes: frequencies (rad/s), decay rates (1/s), complex J (1/s).
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpdTwoMode {
    pub omega: [f64; 2],
    pub gamma: [f64; 2],
    pub j_re: f64,
    pub j_im: f64,
}

impl SpdTwoMode {
    fn system(&self) -> spindiff::Result<CoupledSystem> {
        let j = C64::new(self.j_re, self.j_im);
        CoupledSystem::build(self.omega[0], self.omega[1], self.gamma[0], self.gamma[1], j, [C64::new(0.0, 0.0); 2])
    }
}

/// Free evolution of c0 = (re0 + i im0, re1 + i im1) for time `t`, written in
/// place into `c` as [re0, im0, re1, im1].
///
/// # Safety
/// `m` must be valid; `c` must point to 4 read-write doubles.
#[no_mangle]
pub unsafe extern "C" fn spd_two_mode_evolve(m: *const SpdTwoMode, t: f64, c: *mut f64) -> SpdStatus {
    guard(|| {
        non_null(m, "mode")?;
        non_null(c, "c")?;
        let sys = core((*m).system())?;
        let v = std::slice::from_raw_parts_mut(c, 4);
        let c0 = ModeAmplitudes::new(C64::new(v[0], v[1]), C64::new(v[2], v[3]));
        let r = core(sys.evolve(&c0, t))?;
        v.copy_from_slice(&[r.c[0].re, r.c[0].im, r.c[1].re, r.c[1].im]);
        Ok(())
    })
}

/// Eigenvalues of the two-mode matrix as [re0, im0, re1, im1]; `coalesced`
/// receives 1 at an exceptional point.
///
/// # Safety
/// `m` must be valid; `out` must point to 4 writable doubles; `coalesced` may be null.
#[no_mangle]
pub unsafe extern "C" fn spd_two_mode_eigenvalues(
    m: *const SpdTwoMode,
    out: *mut f64,
    coalesced: *mut i32,
) -> SpdStatus {
    guard(|| {
        non_null(m, "mode")?;
        non_null(out, "out")?;
        let sys = core((*m).system())?;
        let ev = sys.eigenvalues();
        std::slice::from_raw_parts_mut(out, 4).copy_from_slice(&[
            ev.values[0].re,
            ev.values[0].im,
            ev.values[1].re,
            ev.values[1].im,
        ]);
        if !coalesced.is_null() {
            *coalesced = ev.coalesced as i32;
        }
        Ok(())
    })
}

/// Spearman rank correlation with average ranks for ties.
///
/// # Safety
/// `a` and `b` must point to `n` doubles; `out` must be valid.
#[no_mangle]
pub unsafe extern "C" fn spd_spearman(a: *const f64, b: *const f64, n: usize, out: *mut f64) -> SpdStatus {
    guard(|| {
        non_null(out, "out")?;
        *out = core(spearman(slice_arg(a, n, "a")?, slice_arg(b, n, "b")?))?;
        Ok(())
    })
}

/// One fitted component: A e^(i phi) Gamma / (Gamma + i (f - f0)); Gamma is the half width.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpdLorentzian {
    pub amplitude: f64,
    pub linewidth: f64,
    pub center: f64,
    pub phase: f64,
}

/// Fit `n` Lorentzians plus a complex constant to X + iY on the grid `freq`.
///
/// # Safety
/// `freq`, `x`, `y` must point to `len` doubles; `out` a valid handle slot.
#[no_mangle]
pub unsafe extern "C" fn spd_fit_lorentzians(
    freq: *const f64,
    x: *const f64,
    y: *const f64,
    len: usize,
    n: usize,
    out: *mut *mut SpdFit,
) -> SpdStatus {
    guard(|| {
        non_null(out, "out")?;
        let spec = core(Spectrum::new(
            slice_arg(freq, len, "freq")?.to_vec(),
            slice_arg(x, len, "x")?.to_vec(),
            slice_arg(y, len, "y")?.to_vec(),
            0.0,
        ))?;
        put(out, SpdFit(core(fit_lorentzians(&spec, n))?));
        Ok(())
    })
}

/// # Safety
/// `f` must be null or a live fit handle.
#[no_mangle]
pub unsafe extern "C" fn spd_fit_len(f: *const SpdFit) -> usize {
    if f.is_null() {
        0
    } else {
        (*f).0.components.len()
    }
}

/// # Safety
/// `f` must be a live fit handle; `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn spd_fit_component(f: *const SpdFit, i: usize, out: *mut SpdLorentzian) -> SpdStatus {
    guard(|| {
        non_null(f, "fit")?;
        non_null(out, "out")?;
        let cs = &(*f).0.components;
        let c = cs.get(i).ok_or_else(|| fail(SpdStatus::OutOfRange, format!("component {i} of {}", cs.len())))?;
        *out = SpdLorentzian { amplitude: c.amplitude, linewidth: c.linewidth, center: c.center, phase: c.phase };
        Ok(())
    })
}

/// Background (re, im) and residual RMS of a fit.
///
/// # Safety
/// `f` must be a live fit handle; `background` must point to 2 doubles; `rms` may be null.
#[no_mangle]
pub unsafe extern "C" fn spd_fit_summary(f: *const SpdFit, background: *mut f64, rms: *mut f64) -> SpdStatus {
    guard(|| {
        non_null(f, "fit")?;
        non_null(background, "background")?;
        let r = &(*f).0;
        *background = r.background.re;
        *background.add(1) = r.background.im;
        if !rms.is_null() {
            *rms = r.residual_rms;
        }
        Ok(())
    })
}

/// # Safety
/// `f` must be null or a handle from [`spd_fit_lorentzians`], freed once.
#[no_mangle]
pub unsafe extern "C" fn spd_fit_free(f: *mut SpdFit) {
    if !f.is_null() {
        drop(Box::from_raw(f));
    }
}
