//! C ABI for `typical_clt`.
//!
//! Every fallible function returns a [`TcStatus`] and writes its result through
//! an out-pointer. On failure the message is kept per thread and can be read
//! with [`tc_last_error_message`]. Handles are opaque and must be released with
//! their `_free` function.

use std::cell::RefCell;
use std::ffi::{c_char, CStr};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use typical_clt::distributions::{empirical_cdf, kolmogorov_distance, mean_theta_distance, Budgets, MixtureCdf, Target};
use typical_clt::functionals::{maximal_lp_norm, MpStrategy};
use typical_clt::rng::seeded;
use typical_clt::sphere_law::{Direction, SphereCoordinateLaw};
use typical_clt::systems::SystemSpec;
use typical_clt::Error;

/// Result code of every fallible call.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TcStatus {
    Ok = 0,
    NullArgument = 1,
    Domain = 2,
    Config = 3,
    InsufficientData = 4,
    Unsupported = 5,
    Numeric = 6,
    FitUnavailable = 7,
    Io = 8,
    Panic = 9,
}

/// Marginal law of √n times one coordinate of a uniform point on the sphere.
pub struct TcSphereLaw(SphereCoordinateLaw);

/// A random vector `X` in `R^n`.
pub struct TcSystem(SystemSpec);

thread_local! {
    static LAST_ERROR: RefCell<String> = const { RefCell::new(String::new()) };
}

fn set_error(msg: String) {
    LAST_ERROR.with(|e| *e.borrow_mut() = msg);
}

fn status_of(err: &Error) -> TcStatus {
    match err {
        Error::Domain(_) => TcStatus::Domain,
        Error::Config(_) => TcStatus::Config,
        Error::InsufficientData(_) => TcStatus::InsufficientData,
        Error::Unsupported(_) => TcStatus::Unsupported,
        Error::Numeric { .. } => TcStatus::Numeric,
        Error::FitUnavailable { .. } => TcStatus::FitUnavailable,
        Error::Io(_) => TcStatus::Io,
    }
}

enum Failure {
    Null(&'static str),
    Lib(Error),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Lib(e)
    }
}

fn guard(f: impl FnOnce() -> Result<(), Failure>) -> TcStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => {
            set_error(String::new());
            TcStatus::Ok
        }
        Ok(Err(Failure::Null(name))) => {
            set_error(format!("null pointer passed as `{name}`"));
            TcStatus::NullArgument
        }
        Ok(Err(Failure::Lib(e))) => {
            set_error(e.to_string());
            status_of(&e)
        }
        Err(panic) => {
            let msg = panic
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| panic.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "unknown panic".into());
            set_error(format!("panic: {msg}"));
            TcStatus::Panic
        }
    }
}

unsafe fn as_ref<'a, T>(p: *const T, name: &'static str) -> Result<&'a T, Failure> {
    p.as_ref().ok_or(Failure::Null(name))
}

unsafe fn write<T>(p: *mut T, value: T, name: &'static str) -> Result<(), Failure> {
    if p.is_null() {
        return Err(Failure::Null(name));
    }
    p.write(value);
    Ok(())
}

unsafe fn slice<'a>(p: *const f64, len: usize, name: &'static str) -> Result<&'a [f64], Failure> {
    if len == 0 {
        return Ok(&[]);
    }
    if p.is_null() {
        return Err(Failure::Null(name));
    }
    Ok(std::slice::from_raw_parts(p, len))
}

unsafe fn string<'a>(p: *const c_char, name: &'static str) -> Result<&'a str, Failure> {
    if p.is_null() {
        return Err(Failure::Null(name));
    }
    CStr::from_ptr(p)
        .to_str()
        .map_err(|_| Failure::Lib(Error::Config(format!("`{name}` is not valid UTF-8"))))
}

/// Length in bytes of the last error message of this thread, without the NUL.
#[no_mangle]
pub extern "C" fn tc_last_error_length() -> usize {
    LAST_ERROR.with(|e| e.borrow().len())
}

/// Copies the last error message of this thread into `buf` (truncated and
/// NUL-terminated when `cap > 0`). Returns the full message length.
///
/// # Safety
/// `buf` must be null or point to `cap` writable bytes.
#[no_mangle]
pub unsafe extern "C" fn tc_last_error_message(buf: *mut c_char, cap: usize) -> usize {
    LAST_ERROR.with(|e| {
        let msg = e.borrow();
        if !buf.is_null() && cap > 0 {
            let n = msg.len().min(cap - 1);
            ptr::copy_nonoverlapping(msg.as_ptr().cast::<c_char>(), buf, n);
            *buf.add(n) = 0;
        }
        msg.len()
    })
}

/// Creates the sphere marginal law for dimension `n >= 2`.
///
/// # Safety
/// `out` must be a valid pointer to a handle slot.
#[no_mangle]
pub unsafe extern "C" fn tc_sphere_law_new(n: usize, out: *mut *mut TcSphereLaw) -> TcStatus {
    guard(|| {
        let law = SphereCoordinateLaw::new(n)?;
        write(out, Box::into_raw(Box::new(TcSphereLaw(law))), "out")
    })
}

/// # Safety
/// `law` must be null or a handle from [`tc_sphere_law_new`] not yet freed.
#[no_mangle]
pub unsafe extern "C" fn tc_sphere_law_free(law: *mut TcSphereLaw) {
    if !law.is_null() {
        drop(Box::from_raw(law));
    }
}

/// Density `φ_n(x)`.
///
/// # Safety
/// `law` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn tc_sphere_law_density(law: *const TcSphereLaw, x: f64, out: *mut f64) -> TcStatus {
    guard(|| write(out, as_ref(law, "law")?.0.density(x), "out"))
}

/// Distribution function `Φ_n(x)`.
///
/// # Safety
/// `law` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn tc_sphere_law_cdf(law: *const TcSphereLaw, x: f64, out: *mut f64) -> TcStatus {
    guard(|| write(out, as_ref(law, "law")?.0.cdf(x), "out"))
}

/// Characteristic function `J_n(t)`.
///
/// # Safety
/// `law` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn tc_sphere_law_jn(law: *const TcSphereLaw, t: f64, out: *mut f64) -> TcStatus {
    guard(|| write(out, as_ref(law, "law")?.0.charfn_jn(t)?, "out"))
}

/// Creates a system by catalog name (`trigonometric`, `walsh`,
/// `fixed-norm-rademacher`, `gaussian-anisotropic`, `iid-<base>`).
///
/// # Safety
/// `name` must be a NUL-terminated string and `out` a valid handle slot.
#[no_mangle]
pub unsafe extern "C" fn tc_system_new(name: *const c_char, n: usize, out: *mut *mut TcSystem) -> TcStatus {
    guard(|| {
        let spec = SystemSpec::from_name(string(name, "name")?, n)?;
        write(out, Box::into_raw(Box::new(TcSystem(spec))), "out")
    })
}

/// Creates a centered Gaussian system with diagonal covariance `eigenvalues`.
///
/// # Safety
/// `eigenvalues` must point to `len` readable doubles and `out` be a valid handle slot.
#[no_mangle]
pub unsafe extern "C" fn tc_system_new_gaussian(
    eigenvalues: *const f64,
    len: usize,
    out: *mut *mut TcSystem,
) -> TcStatus {
    guard(|| {
        let spec = SystemSpec::gaussian_anisotropic(slice(eigenvalues, len, "eigenvalues")?.to_vec())?;
        write(out, Box::into_raw(Box::new(TcSystem(spec))), "out")
    })
}

/// # Safety
/// `system` must be null or a handle from a `tc_system_new*` call not yet freed.
#[no_mangle]
pub unsafe extern "C" fn tc_system_free(system: *mut TcSystem) {
    if !system.is_null() {
        drop(Box::from_raw(system));
    }
}

/// Dimension of the system, or 0 for a null handle.
///
/// # Safety
/// `system` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn tc_system_dim(system: *const TcSystem) -> usize {
    system.as_ref().map_or(0, |s| s.0.n())
}

/// Draws `count` values of `⟨X, θ⟩` into `out`. `theta` is normalized first.
///
/// # Safety
/// `theta` must point to `dim` doubles and `out` to `count` writable doubles.
#[no_mangle]
pub unsafe extern "C" fn tc_system_weighted_sums(
    system: *const TcSystem,
    theta: *const f64,
    dim: usize,
    count: usize,
    seed: u64,
    out: *mut f64,
) -> TcStatus {
    guard(|| {
        let spec = &as_ref(system, "system")?.0;
        if dim != spec.n() {
            return Err(Error::Domain(format!("theta has {dim} coordinates, system has {}", spec.n())).into());
        }
        let theta = Direction::from_unnormalized(slice(theta, dim, "theta")?.to_vec())?;
        if count > 0 && out.is_null() {
            return Err(Failure::Null("out"));
        }
        let sums = spec.weighted_sums(&theta, count, &mut seeded(seed))?;
        ptr::copy_nonoverlapping(sums.as_ptr(), out, count);
        Ok(())
    })
}

/// Maximal `L^p` norm of `⟨X, θ⟩` over directions. Closed form where known,
/// otherwise a search; `lower_bound` is set when the value comes from a search.
///
/// # Safety
/// `system` must be a live handle; `value` writable; `lower_bound` null or writable.
#[no_mangle]
pub unsafe extern "C" fn tc_maximal_lp_norm(
    system: *const TcSystem,
    p: f64,
    seed: u64,
    value: *mut f64,
    lower_bound: *mut bool,
) -> TcStatus {
    guard(|| {
        let est = maximal_lp_norm(&as_ref(system, "system")?.0, p, MpStrategy::Analytic, seed)?;
        write(value, est.value, "value")?;
        if !lower_bound.is_null() {
            *lower_bound = est.lower_bound;
        }
        Ok(())
    })
}

/// Kolmogorov distance between the empirical CDF of `samples` and Φ.
///
/// # Safety
/// `samples` must point to `len` doubles and `out` be writable.
#[no_mangle]
pub unsafe extern "C" fn tc_kolmogorov_to_normal(samples: *const f64, len: usize, out: *mut f64) -> TcStatus {
    guard(|| {
        let step = empirical_cdf(slice(samples, len, "samples")?)?;
        write(out, kolmogorov_distance(&step, &MixtureCdf::standard_normal()).rho, "out")
    })
}

/// Mean over `theta_budget` random directions of the Kolmogorov distance from
/// the law of `⟨X, θ⟩` to `target` (`"F"`, `"phi"` or `"G"`).
///
/// # Safety
/// `system` must be a live handle, `target` NUL-terminated, `mean` writable
/// and `se` null or writable.
#[no_mangle]
#[allow(clippy::too_many_arguments)]
pub unsafe extern "C" fn tc_mean_theta_distance(
    system: *const TcSystem,
    target: *const c_char,
    theta_budget: usize,
    per_theta: usize,
    radial: usize,
    seed: u64,
    mean: *mut f64,
    se: *mut f64,
) -> TcStatus {
    guard(|| {
        let spec = &as_ref(system, "system")?.0;
        let target = Target::from_name(string(target, "target")?)?;
        let budgets = Budgets { theta: theta_budget, per_theta, radial };
        let d = mean_theta_distance(spec, target, budgets, seed)?;
        write(mean, d.mean.value, "mean")?;
        if !se.is_null() {
            *se = d.mean.se;
        }
        Ok(())
    })
}
