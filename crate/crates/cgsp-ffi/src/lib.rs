//! C ABI for the coupled-pair generator: opaque handles, integer error codes,
//! caller-owned output buffers. The matching header lives in
//! `include/cgsp.h` and is kept in sync by the `header_matches_exports` test.

use std::ffi::{c_char, c_double, c_int};
use std::panic::{catch_unwind, AssertUnwindSafe};

use cgsp::error::Error;
use cgsp::grid::FrequencyGrid;
use cgsp::model::{CorrelationFamily, CorrelationModel, TargetModels};
use cgsp::spectrum::{SpectralPath, SpectralTriple};
use cgsp::synth::{child_seed, SynthesisPlan};

pub const CGSP_OK: c_int = 0;
pub const CGSP_ERR_INVALID: c_int = 1;
pub const CGSP_ERR_INFEASIBLE: c_int = 2;
pub const CGSP_ERR_SYNTHESIS: c_int = 3;
pub const CGSP_ERR_NULL: c_int = 4;
pub const CGSP_ERR_PANIC: c_int = 5;

pub const CGSP_COUPLING_NONE: c_int = 0;
pub const CGSP_COUPLING_GAUSSIAN: c_int = 1;
pub const CGSP_COUPLING_EXPONENTIAL: c_int = 2;
pub const CGSP_COUPLING_DAMPED_HARMONIC: c_int = 3;

/// Opaque generator handle: a validated synthesis plan plus its master seed.
pub struct CgspGenerator {
    plan: SynthesisPlan,
    master_seed: u64,
    max_coherence: f64,
    cross_scale: f64,
}

fn error_code(err: &Error) -> c_int {
    if err.is_infeasible_target() {
        CGSP_ERR_INFEASIBLE
    } else {
        CGSP_ERR_INVALID
    }
}

fn build_generator(
    side: u64,
    dim: u32,
    targets: TargetModels,
    cross_scale: f64,
    seed: u64,
    out: *mut *mut CgspGenerator,
) -> c_int {
    if out.is_null() {
        return CGSP_ERR_NULL;
    }
    let result = catch_unwind(AssertUnwindSafe(|| -> Result<CgspGenerator, Error> {
        let grid = FrequencyGrid::new(side as usize, dim as usize)?;
        let unit = SpectralTriple::from_models(&targets, &grid, SpectralPath::Fft)?;
        let scale = if cross_scale > 0.0 {
            cross_scale
        } else {
            let bound = unit.max_cross_scale();
            if bound.is_finite() {
                (0.999 * bound).min(1.0)
            } else {
                1.0
            }
        };
        let triple =
            SpectralTriple::from_models(&targets.scale_cross(scale), &grid, SpectralPath::Fft)?;
        let max_coherence = triple.feasibility().max_coherence;
        let plan = SynthesisPlan::new(triple)?;
        Ok(CgspGenerator {
            plan,
            master_seed: seed,
            max_coherence,
            cross_scale: scale,
        })
    }));
    match result {
        Ok(Ok(generator)) => {
            // SAFETY: `out` checked non-null above; caller owns the box
            unsafe { *out = Box::into_raw(Box::new(generator)) };
            CGSP_OK
        }
        Ok(Err(err)) => error_code(&err),
        Err(_) => CGSP_ERR_PANIC,
    }
}

/// Create a generator for two power-law sequences (or fields when `dim` = 2)
/// with a power-law coupling. `cross_scale <= 0` picks the largest feasible
/// cross amplitude automatically.
///
/// # Safety
/// `out` must point to writable storage for one pointer.
#[no_mangle]
pub unsafe extern "C" fn cgsp_generator_power_law(
    side: u64,
    dim: u32,
    gxx: c_double,
    gyy: c_double,
    gxy: c_double,
    cross_scale: c_double,
    seed: u64,
    out: *mut *mut CgspGenerator,
) -> c_int {
    let targets = (|| -> Result<TargetModels, Error> {
        TargetModels::new(
            CorrelationModel::power_law(gxx, 1.0)?,
            CorrelationModel::power_law(gyy, 1.0)?,
            CorrelationModel::power_law(gxy, 1.0)?,
        )
    })();
    match targets {
        Ok(t) => build_generator(side, dim, t, cross_scale, seed, out),
        Err(err) => error_code(&err),
    }
}

/// Create a generator for two coupled white noises. `coupling` is one of the
/// `CGSP_COUPLING_*` constants; `param1` is the gaussian width or the decay
/// rate, `param2` the damped-harmonic frequency.
///
/// # Safety
/// `out` must point to writable storage for one pointer.
#[no_mangle]
pub unsafe extern "C" fn cgsp_generator_coupled_white(
    side: u64,
    dim: u32,
    coupling: c_int,
    param1: c_double,
    param2: c_double,
    cross_scale: c_double,
    seed: u64,
    out: *mut *mut CgspGenerator,
) -> c_int {
    let targets = (|| -> Result<TargetModels, Error> {
        let family = match coupling {
            CGSP_COUPLING_NONE => CorrelationFamily::White,
            CGSP_COUPLING_GAUSSIAN => CorrelationFamily::Gaussian { width: param1 },
            CGSP_COUPLING_EXPONENTIAL => CorrelationFamily::Exponential { decay: param1 },
            CGSP_COUPLING_DAMPED_HARMONIC => CorrelationFamily::DampedHarmonic {
                decay: param1,
                frequency: param2,
            },
            _ => {
                return Err(Error::InvalidParameter(format!(
                    "unknown coupling {coupling}"
                )))
            }
        };
        let amplitude = if coupling == CGSP_COUPLING_NONE {
            0.0
        } else {
            1.0
        };
        TargetModels::new(
            CorrelationModel::white(1.0)?,
            CorrelationModel::white(1.0)?,
            CorrelationModel::new(family, amplitude)?,
        )
    })();
    match targets {
        Ok(t) => build_generator(side, dim, t, cross_scale, seed, out),
        Err(err) => error_code(&err),
    }
}

/// Number of points per output array (`side^dim`).
///
/// # Safety
/// `generator` must be a live pointer from a `cgsp_generator_*` constructor.
#[no_mangle]
pub unsafe extern "C" fn cgsp_generator_points(generator: *const CgspGenerator) -> u64 {
    if generator.is_null() {
        return 0;
    }
    (*generator).plan.grid().len() as u64
}

/// Maximum pointwise coherence of the (scaled) target triple.
///
/// # Safety
/// `generator` must be a live pointer from a `cgsp_generator_*` constructor.
#[no_mangle]
pub unsafe extern "C" fn cgsp_generator_max_coherence(generator: *const CgspGenerator) -> c_double {
    if generator.is_null() {
        return f64::NAN;
    }
    (*generator).max_coherence
}

/// Cross-amplitude multiplier that was applied (useful with automatic scaling).
///
/// # Safety
/// `generator` must be a live pointer from a `cgsp_generator_*` constructor.
#[no_mangle]
pub unsafe extern "C" fn cgsp_generator_cross_scale(generator: *const CgspGenerator) -> c_double {
    if generator.is_null() {
        return f64::NAN;
    }
    (*generator).cross_scale
}

/// Synthesize realization `index` into caller buffers of
/// `cgsp_generator_points()` doubles each. Deterministic: the same
/// (seed, index) always yields the same pair, in any call order.
///
/// # Safety
/// `generator` must be live; `x_out` and `y_out` must each point to
/// `cgsp_generator_points()` writable doubles and must not alias.
#[no_mangle]
pub unsafe extern "C" fn cgsp_generator_synthesize(
    generator: *const CgspGenerator,
    index: u64,
    x_out: *mut c_double,
    y_out: *mut c_double,
) -> c_int {
    if generator.is_null() || x_out.is_null() || y_out.is_null() {
        return CGSP_ERR_NULL;
    }
    let gen_ref = &*generator;
    let n = gen_ref.plan.grid().len();
    let result = catch_unwind(AssertUnwindSafe(|| {
        gen_ref
            .plan
            .synthesize(child_seed(gen_ref.master_seed, index))
    }));
    match result {
        Ok(Ok(pair)) => {
            std::ptr::copy_nonoverlapping(pair.x.as_ptr(), x_out, n);
            std::ptr::copy_nonoverlapping(pair.y.as_ptr(), y_out, n);
            CGSP_OK
        }
        Ok(Err(_)) => CGSP_ERR_SYNTHESIS,
        Err(_) => CGSP_ERR_PANIC,
    }
}

/// Release a generator. Null is a no-op.
///
/// # Safety
/// `generator` must be null or a pointer returned by a constructor, not yet
/// freed.
#[no_mangle]
pub unsafe extern "C" fn cgsp_generator_free(generator: *mut CgspGenerator) {
    if !generator.is_null() {
        drop(Box::from_raw(generator));
    }
}

/// Static name for an error code.
#[no_mangle]
pub extern "C" fn cgsp_error_name(code: c_int) -> *const c_char {
    let name: &'static [u8] = match code {
        CGSP_OK => b"ok\0",
        CGSP_ERR_INVALID => b"invalid argument\0",
        CGSP_ERR_INFEASIBLE => b"infeasible target\0",
        CGSP_ERR_SYNTHESIS => b"synthesis failed\0",
        CGSP_ERR_NULL => b"null pointer\0",
        CGSP_ERR_PANIC => b"internal panic\0",
        _ => b"unknown error\0",
    };
    name.as_ptr() as *const c_char
}

/// Static library version string.
#[no_mangle]
pub extern "C" fn cgsp_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr() as *const c_char
}
