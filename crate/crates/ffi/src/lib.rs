//! C interface to `cubmp`.
//!
//! Objects are opaque handles created by `cubmp_*` constructors and released
//! with the matching `*_free` function. Every fallible call returns a
//! [`CubmpStatus`]; on failure a message for the calling thread is available
//! from [`cubmp_last_error`]. Grids are row-major `double` arrays and
//! compact multifiltrations are slice-major `uint32_t` arrays.

use std::cell::RefCell;
use std::ffi::{c_char, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use cubmp::filtration::{CompactMultiFiltration, LevelGrid};
use cubmp::metrics::{wasserstein, Essentials};
use cubmp::multipers::{slice_compact, SlicedDiagrams};
use cubmp::persistence::{compute_pd, default_sentinel, Dims, HomologyDim, PersistenceDiagram};
use cubmp::vectorize::{psi_mp, Aggregator, MPVectorization, VectorizationParams, Weights};
use cubmp::{Error, ValueGrid};

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CubmpStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    ShapeMismatch = 3,
    NotMonotone = 4,
    BufferTooSmall = 5,
    Internal = 6,
}

/// Values of the `dims` argument of [`cubmp_compute_pd`].
pub const CUBMP_DIMS_ZERO: u32 = 0;
pub const CUBMP_DIMS_ONE: u32 = 1;
pub const CUBMP_DIMS_BOTH: u32 = 2;

/// Values of the `aggregate` argument of [`cubmp_psi_mp`].
pub const CUBMP_AGGREGATE_FLATTEN: u32 = 0;
pub const CUBMP_AGGREGATE_MEAN: u32 = 1;

/// A persistence diagram.
pub struct CubmpDiagram(PersistenceDiagram);

/// Per-slice diagrams of a compact multifiltration.
pub struct CubmpSliced(SlicedDiagrams);

/// An `M x 2 x q` vectorization with its aggregate.
pub struct CubmpVectorization(MPVectorization);

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: impl Into<String>) {
    let msg = CString::new(msg.into().replace('\0', " ")).expect("no interior nul");
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(msg));
}

fn status_of(e: &Error) -> CubmpStatus {
    match e {
        Error::ShapeMismatch { .. } | Error::EmptyGrid | Error::Dimension(_) | Error::CoordOutOfRange { .. } => {
            CubmpStatus::ShapeMismatch
        }
        Error::NotMonotone { .. } => CubmpStatus::NotMonotone,
        _ => CubmpStatus::InvalidArgument,
    }
}

struct Failure(CubmpStatus, String);

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure(status_of(&e), e.to_string())
    }
}

fn fail(status: CubmpStatus, msg: &str) -> Failure {
    Failure(status, msg.to_string())
}

/// Runs `f`, converting errors and panics into status codes.
fn guard(f: impl FnOnce() -> Result<(), Failure>) -> CubmpStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => {
            LAST_ERROR.with(|e| *e.borrow_mut() = None);
            CubmpStatus::Ok
        }
        Ok(Err(Failure(status, msg))) => {
            set_error(msg);
            status
        }
        Err(_) => {
            set_error("internal panic");
            CubmpStatus::Internal
        }
    }
}

/// # Safety
/// `p` must be null or valid for `len` reads.
unsafe fn slice_in<'a, T>(p: *const T, len: usize) -> Result<&'a [T], Failure> {
    if len == 0 {
        return Ok(&[]);
    }
    if p.is_null() {
        return Err(fail(CubmpStatus::NullPointer, "null input buffer"));
    }
    Ok(std::slice::from_raw_parts(p, len))
}

/// # Safety
/// `p` must be null or a live handle created by this library.
unsafe fn handle<'a, T>(p: *const T) -> Result<&'a T, Failure> {
    p.as_ref().ok_or_else(|| fail(CubmpStatus::NullPointer, "null handle"))
}

fn out_ptr<T>(p: *mut T) -> Result<*mut T, Failure> {
    if p.is_null() {
        Err(fail(CubmpStatus::NullPointer, "null output pointer"))
    } else {
        Ok(p)
    }
}

fn dims_of(d: u32) -> Result<Dims, Failure> {
    match d {
        CUBMP_DIMS_ZERO => Ok(Dims::Zero),
        CUBMP_DIMS_ONE => Ok(Dims::One),
        CUBMP_DIMS_BOTH => Ok(Dims::Both),
        _ => Err(fail(CubmpStatus::InvalidArgument, "unknown dims selector")),
    }
}

fn dim_of(d: u32) -> Result<HomologyDim, Failure> {
    HomologyDim::from_index(d as usize).ok_or_else(|| fail(CubmpStatus::InvalidArgument, "dimension must be 0 or 1"))
}

/// Message describing the last failed call on this thread, or null. Valid
/// until the next call into the library from the same thread.
#[no_mangle]
pub extern "C" fn cubmp_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |s| s.as_ptr()))
}

/// Library version as a static nul-terminated string.
#[no_mangle]
pub extern "C" fn cubmp_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Sublevel persistence diagram of a `height x width` grid. A sentinel is
/// chosen above the grid maximum.
///
/// # Safety
/// `values` must hold `height * width` doubles and `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn cubmp_compute_pd(
    values: *const f64,
    height: usize,
    width: usize,
    dims: u32,
    out: *mut *mut CubmpDiagram,
) -> CubmpStatus {
    guard(|| {
        let out = out_ptr(out)?;
        let len = height
            .checked_mul(width)
            .ok_or_else(|| fail(CubmpStatus::ShapeMismatch, "grid too large"))?;
        let grid = ValueGrid::new(height, width, slice_in(values, len)?.to_vec())?;
        let pd = compute_pd(&grid, dims_of(dims)?, default_sentinel(&grid))?;
        *out = Box::into_raw(Box::new(CubmpDiagram(pd)));
        Ok(())
    })
}

/// # Safety
/// `diagram` must be null or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn cubmp_diagram_free(diagram: *mut CubmpDiagram) {
    if !diagram.is_null() {
        drop(Box::from_raw(diagram));
    }
}

/// Number of pairs of dimension `dim` (0 or 1).
///
/// # Safety
/// `diagram` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn cubmp_diagram_len(diagram: *const CubmpDiagram, dim: u32, out: *mut usize) -> CubmpStatus {
    guard(|| {
        let out = out_ptr(out)?;
        *out = handle(diagram)?.0.pairs(dim_of(dim)?).len();
        Ok(())
    })
}

/// Copies the births and deaths of dimension `dim` into caller buffers of
/// `capacity` entries. Essential deaths are `INFINITY`.
///
/// # Safety
/// `births` and `deaths` must be writable for `capacity` doubles.
#[no_mangle]
pub unsafe extern "C" fn cubmp_diagram_pairs(
    diagram: *const CubmpDiagram,
    dim: u32,
    births: *mut f64,
    deaths: *mut f64,
    capacity: usize,
) -> CubmpStatus {
    guard(|| {
        let pairs = handle(diagram)?.0.pairs(dim_of(dim)?);
        if pairs.len() > capacity {
            return Err(fail(CubmpStatus::BufferTooSmall, "capacity below pair count"));
        }
        if pairs.is_empty() {
            return Ok(());
        }
        let (births, deaths) = (out_ptr(births)?, out_ptr(deaths)?);
        for (i, p) in pairs.iter().enumerate() {
            *births.add(i) = p.birth;
            *deaths.add(i) = p.death;
        }
        Ok(())
    })
}

/// `W_p` between one dimension of two diagrams; `p` may be `INFINITY` for
/// the bottleneck distance. Essential pairs are ignored unless
/// `clip_essentials` is non-zero, in which case infinite deaths become
/// `clip_level`.
///
/// # Safety
/// Both handles must be live and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn cubmp_wasserstein(
    a: *const CubmpDiagram,
    b: *const CubmpDiagram,
    dim: u32,
    p: f64,
    clip_essentials: i32,
    clip_level: f64,
    out: *mut f64,
) -> CubmpStatus {
    guard(|| {
        let out = out_ptr(out)?;
        let dim = dim_of(dim)?;
        let essentials = if clip_essentials != 0 {
            Essentials::Clip(clip_level)
        } else {
            Essentials::Exclude
        };
        let (a, b) = (handle(a)?, handle(b)?);
        *out = wasserstein(&a.0.bars(dim), &b.0.bars(dim), p, essentials)?.cost;
        Ok(())
    })
}

/// Slices a compact multifiltration given as `num_slices` level grids of
/// `height x width`, each level in `0..=num_levels`. Levels must not
/// increase from one slice to the next.
///
/// # Safety
/// `levels` must hold `num_slices * height * width` values.
#[no_mangle]
pub unsafe extern "C" fn cubmp_slice_compact(
    levels: *const u32,
    num_slices: usize,
    height: usize,
    width: usize,
    num_levels: u32,
    out: *mut *mut CubmpSliced,
) -> CubmpStatus {
    guard(|| {
        let out = out_ptr(out)?;
        let per = height
            .checked_mul(width)
            .ok_or_else(|| fail(CubmpStatus::ShapeMismatch, "grid too large"))?;
        let total = per
            .checked_mul(num_slices)
            .ok_or_else(|| fail(CubmpStatus::ShapeMismatch, "grid too large"))?;
        if per == 0 || num_slices == 0 {
            return Err(fail(CubmpStatus::ShapeMismatch, "empty multifiltration"));
        }
        let data = slice_in(levels, total)?;
        let grids = data
            .chunks(per)
            .map(|c| LevelGrid::new(height, width, c.to_vec()))
            .collect::<Result<Vec<_>, _>>()?;
        let mut cmf = CompactMultiFiltration::new(num_levels, grids)?;
        cmf.validate()?;
        *out = Box::into_raw(Box::new(CubmpSliced(slice_compact(&cmf, None)?)));
        Ok(())
    })
}

/// # Safety
/// `sliced` must be null or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn cubmp_sliced_free(sliced: *mut CubmpSliced) {
    if !sliced.is_null() {
        drop(Box::from_raw(sliced));
    }
}

/// # Safety
/// `sliced` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn cubmp_sliced_num_slices(sliced: *const CubmpSliced, out: *mut usize) -> CubmpStatus {
    guard(|| {
        let out = out_ptr(out)?;
        *out = handle(sliced)?.0.num_slices();
        Ok(())
    })
}

/// A copy of the diagram of slice `index`, to be freed with
/// [`cubmp_diagram_free`].
///
/// # Safety
/// `sliced` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn cubmp_sliced_diagram(
    sliced: *const CubmpSliced,
    index: usize,
    out: *mut *mut CubmpDiagram,
) -> CubmpStatus {
    guard(|| {
        let out = out_ptr(out)?;
        let pd = handle(sliced)?
            .0
            .slices
            .get(index)
            .ok_or_else(|| fail(CubmpStatus::InvalidArgument, "slice index out of range"))?;
        *out = Box::into_raw(Box::new(CubmpDiagram(pd.clone())));
        Ok(())
    })
}

/// Weighted tent vectorization of every slice at the `num_samples` sample
/// times, with weight exponent `weight`.
///
/// # Safety
/// `samples` must hold `num_samples` doubles; handles and `out` as usual.
#[no_mangle]
pub unsafe extern "C" fn cubmp_psi_mp(
    sliced: *const CubmpSliced,
    samples: *const f64,
    num_samples: usize,
    weight: f64,
    aggregate: u32,
    out: *mut *mut CubmpVectorization,
) -> CubmpStatus {
    guard(|| {
        let out = out_ptr(out)?;
        let aggregator = match aggregate {
            CUBMP_AGGREGATE_FLATTEN => Aggregator::Flatten,
            CUBMP_AGGREGATE_MEAN => Aggregator::MeanOverSlices,
            _ => return Err(fail(CubmpStatus::InvalidArgument, "unknown aggregate selector")),
        };
        let params = VectorizationParams::new(
            slice_in(samples, num_samples)?.to_vec(),
            Weights::Scalar(weight),
            aggregator,
        )?;
        *out = Box::into_raw(Box::new(CubmpVectorization(psi_mp(&handle(sliced)?.0, &params)?)));
        Ok(())
    })
}

/// # Safety
/// `v` must be null or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn cubmp_vectorization_free(v: *mut CubmpVectorization) {
    if !v.is_null() {
        drop(Box::from_raw(v));
    }
}

/// Writes `[M, 2, q]` to `shape`.
///
/// # Safety
/// `shape` must be writable for three values.
#[no_mangle]
pub unsafe extern "C" fn cubmp_vectorization_shape(v: *const CubmpVectorization, shape: *mut usize) -> CubmpStatus {
    guard(|| {
        let shape = out_ptr(shape)?;
        for (i, &n) in handle(v)?.0.shape.iter().enumerate() {
            *shape.add(i) = n;
        }
        Ok(())
    })
}

unsafe fn copy_out(src: &[f64], dst: *mut f64, capacity: usize, len: *mut usize) -> Result<(), Failure> {
    *out_ptr(len)? = src.len();
    if src.len() > capacity {
        return Err(fail(CubmpStatus::BufferTooSmall, "capacity below value count"));
    }
    if !src.is_empty() {
        ptr::copy_nonoverlapping(src.as_ptr(), out_ptr(dst)?, src.len());
    }
    Ok(())
}

/// Copies the row-major `M x 2 x q` values; `len` receives the count even
/// when the buffer is too small.
///
/// # Safety
/// `dst` must be writable for `capacity` doubles and `len` writable.
#[no_mangle]
pub unsafe extern "C" fn cubmp_vectorization_values(
    v: *const CubmpVectorization,
    dst: *mut f64,
    capacity: usize,
    len: *mut usize,
) -> CubmpStatus {
    guard(|| copy_out(&handle(v)?.0.values, dst, capacity, len))
}

/// Copies the aggregated vector, as [`cubmp_vectorization_values`].
///
/// # Safety
/// As for [`cubmp_vectorization_values`].
#[no_mangle]
pub unsafe extern "C" fn cubmp_vectorization_aggregate(
    v: *const CubmpVectorization,
    dst: *mut f64,
    capacity: usize,
    len: *mut usize,
) -> CubmpStatus {
    guard(|| copy_out(&handle(v)?.0.aggregate, dst, capacity, len))
}
