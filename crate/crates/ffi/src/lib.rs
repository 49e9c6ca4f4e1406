//! C ABI over the `jeft` transforms.
//!
//! Every entry point returns a [`JeftStatus`]. On failure a description is
//! available from [`jeft_last_error`] on the calling thread. Grids and
//! functions are opaque handles released with their `_free` function.
//! Coordinate arrays hold `dim` doubles, where `dim` is 2 for `H2` and 3 for
//! `H3`.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use num_complex::Complex64;

use jeft::geometry::{BoundaryPoint, GridSizes, SphereSize};
use jeft::testfns::{bump, suite, BumpSpec, TestFunction};
use jeft::transforms::{
    helgason_transform, jeft_composed, jeft_direct, poisson_transform, spherical_transform, InteriorFunction,
};
use jeft::verify::{run_one, Check, VerifyConfig};
use jeft::{Error, Model, ModelParams, Point, QuadratureGrid, SpectralParam};

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum JeftStatus {
    Ok = 0,
    NullPointer = 1,
    Domain = 2,
    Size = 3,
    NotRadial = 4,
    StencilOutOfDomain = 5,
    Config = 6,
    Io = 7,
    Panic = 8,
}

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum JeftModel {
    H2 = 2,
    H3 = 3,
}

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum JeftMethod {
    Direct = 0,
    Composed = 1,
}

#[repr(C)]
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct JeftComplex {
    pub re: f64,
    pub im: f64,
}

impl From<Complex64> for JeftComplex {
    fn from(z: Complex64) -> Self {
        Self { re: z.re, im: z.im }
    }
}

/// Quadrature grid handle.
pub struct JeftGrid {
    grid: QuadratureGrid,
}

/// Test-function handle.
pub struct JeftFunction {
    f: TestFunction,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn status_of(e: &Error) -> JeftStatus {
    match e {
        Error::Domain(_) => JeftStatus::Domain,
        Error::Size(_) => JeftStatus::Size,
        Error::NotRadial(_) => JeftStatus::NotRadial,
        Error::StencilOutOfDomain { .. } => JeftStatus::StencilOutOfDomain,
        Error::Config(_) => JeftStatus::Config,
        Error::Io(_) | Error::Json(_) => JeftStatus::Io,
    }
}

struct Fail(JeftStatus, String);

impl From<Error> for Fail {
    fn from(e: Error) -> Self {
        Fail(status_of(&e), e.to_string())
    }
}

fn null(what: &str) -> Fail {
    Fail(JeftStatus::NullPointer, format!("{what} is null"))
}

fn guard<F: FnOnce() -> Result<(), Fail>>(body: F) -> JeftStatus {
    match catch_unwind(AssertUnwindSafe(body)) {
        Ok(Ok(())) => JeftStatus::Ok,
        Ok(Err(Fail(status, msg))) => {
            set_error(msg);
            status
        }
        Err(_) => {
            set_error("internal panic".into());
            JeftStatus::Panic
        }
    }
}

fn model_of(m: JeftModel) -> Model {
    match m {
        JeftModel::H2 => Model::H2,
        JeftModel::H3 => Model::H3,
    }
}

unsafe fn borrow<'a, T>(p: *const T, what: &str) -> Result<&'a T, Fail> {
    p.as_ref().ok_or_else(|| null(what))
}

unsafe fn write<T>(out: *mut T, value: T, what: &str) -> Result<(), Fail> {
    if out.is_null() {
        return Err(null(what));
    }
    out.write(value);
    Ok(())
}

unsafe fn coords<'a>(p: *const f64, dim: usize, what: &str) -> Result<&'a [f64], Fail> {
    if p.is_null() {
        return Err(null(what));
    }
    Ok(std::slice::from_raw_parts(p, dim))
}

fn lambda_of(l: JeftComplex) -> SpectralParam {
    SpectralParam::complex(l.re, l.im)
}

/// Message of the last failure on this thread, or null. The pointer stays
/// valid until the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn jeft_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// Library version as a static string.
#[no_mangle]
pub extern "C" fn jeft_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Grid with default node counts.
///
/// # Safety
/// `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn jeft_grid_new(
    model: JeftModel,
    radius: f64,
    lambda_max: f64,
    out: *mut *mut JeftGrid,
) -> JeftStatus {
    jeft_grid_new_sized(model, radius, lambda_max, 0, 0, 0, 0, out)
}

/// Grid with explicit node counts; zero keeps the default. `nb_polar` is the
/// circle size in `H2`; `nb_azimuth` is ignored there.
///
/// # Safety
/// `out` must be valid for writes.
#[no_mangle]
#[allow(clippy::too_many_arguments)]
pub unsafe extern "C" fn jeft_grid_new_sized(
    model: JeftModel,
    radius: f64,
    lambda_max: f64,
    nr: usize,
    nb_polar: usize,
    nb_azimuth: usize,
    nlambda: usize,
    out: *mut *mut JeftGrid,
) -> JeftStatus {
    guard(|| {
        let m = model_of(model);
        let mut sizes = GridSizes::defaults(m);
        if nr > 0 {
            sizes.radial = nr;
        }
        if nlambda > 0 {
            sizes.spectral = nlambda;
        }
        if nb_polar > 0 {
            sizes.boundary = match m {
                Model::H2 => SphereSize::Circle(nb_polar),
                Model::H3 => SphereSize::Sphere { polar: nb_polar, azimuth: nb_azimuth.max(1) },
            };
        }
        let grid = QuadratureGrid::build(ModelParams::new(m, radius, lambda_max)?, sizes)?;
        write(out, Box::into_raw(Box::new(JeftGrid { grid })), "out")
    })
}

/// # Safety
/// `grid` must come from `jeft_grid_new*` and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn jeft_grid_free(grid: *mut JeftGrid) {
    if !grid.is_null() {
        drop(Box::from_raw(grid));
    }
}

/// Suite member `index` (0 to 4) scaled to the grid's radius.
///
/// # Safety
/// `grid` must be a live handle and `out` valid for writes.
#[no_mangle]
pub unsafe extern "C" fn jeft_function_suite(grid: *const JeftGrid, index: usize, out: *mut *mut JeftFunction) -> JeftStatus {
    guard(|| {
        let g = borrow(grid, "grid")?;
        let f = suite(g.grid.params())?
            .into_iter()
            .nth(index)
            .ok_or_else(|| Fail(JeftStatus::Domain, format!("suite index {index} out of range")))?;
        write(out, Box::into_raw(Box::new(JeftFunction { f })), "out")
    })
}

/// Flat bump of the given support and amplitude about `center`.
///
/// # Safety
/// `grid` must be a live handle, `center` must hold `dim` doubles and `out`
/// must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn jeft_function_bump(
    grid: *const JeftGrid,
    center: *const f64,
    support: f64,
    amplitude: f64,
    out: *mut *mut JeftFunction,
) -> JeftStatus {
    guard(|| {
        let g = borrow(grid, "grid")?;
        let c = Point::new(coords(center, g.grid.model().dim(), "center")?)?;
        let b = bump(BumpSpec { support, center: c, amplitude }, g.grid.params())?;
        write(out, Box::into_raw(Box::new(JeftFunction { f: TestFunction::single("bump", b) })), "out")
    })
}

/// # Safety
/// `f` must come from a `jeft_function_*` constructor and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn jeft_function_free(f: *mut JeftFunction) {
    if !f.is_null() {
        drop(Box::from_raw(f));
    }
}

/// # Safety
/// `f` must be a live handle, `x` must hold `dim` doubles, `out` valid for writes.
#[no_mangle]
pub unsafe extern "C" fn jeft_function_eval(f: *const JeftFunction, x: *const f64, out: *mut f64) -> JeftStatus {
    guard(|| {
        let f = borrow(f, "function")?;
        let p = Point::new(coords(x, f.f.dim(), "x")?)?;
        write(out, f.f.eval(&p), "out")
    })
}

/// Spherical function `φ_λ(r)`.
///
/// # Safety
/// `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn jeft_spherical_function(model: JeftModel, lambda: JeftComplex, r: f64, out: *mut JeftComplex) -> JeftStatus {
    guard(|| {
        let ev = jeft::specfun::SphericalEvaluator::with_defaults(model_of(model));
        write(out, ev.eval(lambda_of(lambda), r)?.into(), "out")
    })
}

/// Plancherel density `|c(λ)|⁻²` with the library's normalization.
///
/// # Safety
/// `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn jeft_plancherel_density(model: JeftModel, lambda: f64, out: *mut f64) -> JeftStatus {
    guard(|| write(out, jeft::specfun::plancherel_density(lambda, model_of(model))?, "out"))
}

/// Spherical transform `f̂(λ)` of a radial function.
///
/// # Safety
/// Handles must be live and `out` valid for writes.
#[no_mangle]
pub unsafe extern "C" fn jeft_spherical_transform(
    grid: *const JeftGrid,
    f: *const JeftFunction,
    lambda: JeftComplex,
    out: *mut JeftComplex,
) -> JeftStatus {
    guard(|| {
        let (g, f) = (borrow(grid, "grid")?, borrow(f, "function")?);
        write(out, spherical_transform(&f.f, &g.grid, lambda_of(lambda))?.into(), "out")
    })
}

/// Helgason transform `f̃(λ, b)`.
///
/// # Safety
/// Handles must be live, `b` must hold `dim` doubles, `out` valid for writes.
#[no_mangle]
pub unsafe extern "C" fn jeft_helgason(
    grid: *const JeftGrid,
    f: *const JeftFunction,
    lambda: JeftComplex,
    b: *const f64,
    out: *mut JeftComplex,
) -> JeftStatus {
    guard(|| {
        let (g, f) = (borrow(grid, "grid")?, borrow(f, "function")?);
        let b = BoundaryPoint::new(coords(b, g.grid.model().dim(), "b")?)?;
        write(out, helgason_transform(&f.f, &g.grid, lambda_of(lambda), &b)?.into(), "out")
    })
}

/// Joint-eigenspace transform `f^△(λ, x)`.
///
/// # Safety
/// Handles must be live, `x` must hold `dim` doubles, `out` valid for writes.
#[no_mangle]
pub unsafe extern "C" fn jeft_transform(
    grid: *const JeftGrid,
    f: *const JeftFunction,
    lambda: JeftComplex,
    x: *const f64,
    method: JeftMethod,
    out: *mut JeftComplex,
) -> JeftStatus {
    guard(|| {
        let (g, f) = (borrow(grid, "grid")?, borrow(f, "function")?);
        let x = Point::new(coords(x, g.grid.model().dim(), "x")?)?;
        let v = match method {
            JeftMethod::Direct => jeft_direct(&f.f, &g.grid, lambda_of(lambda), &x)?,
            JeftMethod::Composed => jeft_composed(&f.f, &g.grid, lambda_of(lambda), &x)?,
        };
        write(out, v.into(), "out")
    })
}

/// Poisson transform of the constant boundary function one, `φ_λ(d(o, x))`.
///
/// # Safety
/// `grid` must be live, `x` must hold `dim` doubles, `out` valid for writes.
#[no_mangle]
pub unsafe extern "C" fn jeft_poisson_constant(
    grid: *const JeftGrid,
    lambda: JeftComplex,
    x: *const f64,
    out: *mut JeftComplex,
) -> JeftStatus {
    guard(|| {
        let g = borrow(grid, "grid")?;
        let x = Point::new(coords(x, g.grid.model().dim(), "x")?)?;
        let one = |_: &BoundaryPoint| Complex64::new(1.0, 0.0);
        write(out, poisson_transform(&one, &g.grid, lambda_of(lambda), &x)?.into(), "out")
    })
}

/// Runs one named verification check. `reduced` selects small grids.
/// Writes the measured error and whether the check succeeded.
///
/// # Safety
/// `check` must be a nul-terminated string; outputs valid for writes.
#[no_mangle]
pub unsafe extern "C" fn jeft_verify(
    model: JeftModel,
    check: *const c_char,
    reduced: bool,
    out_error: *mut f64,
    out_success: *mut bool,
) -> JeftStatus {
    guard(|| {
        if check.is_null() {
            return Err(null("check"));
        }
        let name = CStr::from_ptr(check)
            .to_str()
            .map_err(|_| Fail(JeftStatus::Config, "check name is not UTF-8".into()))?;
        let check: Check = name.parse()?;
        let m = model_of(model);
        let config = if reduced { VerifyConfig::reduced(m) } else { VerifyConfig::defaults(m) };
        let report = run_one(&config, check)?;
        write(out_error, report.max_rel_error, "out_error")?;
        write(out_success, report.succeeded(), "out_success")
    })
}
