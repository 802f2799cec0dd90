//! C interface to the pavecrack pipeline.
//!
//! Images, masks and configurations are opaque heap handles created by the
//! `*_load`, `*_from_*` and `*_default` functions and released with the
//! matching `*_free`. Every fallible call returns a [`PcStatus`]; on failure
//! `pc_last_error_message` describes the error for the calling thread.
//!
//! No function panics across the boundary: panics are caught and reported
//! as `PC_STATUS_PANIC`.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::PathBuf;
use std::ptr;

use pavecrack::pipeline::detect;
use pavecrack::raster::pgm::{load_mask, load_pgm, save_pgm};
use pavecrack::{evaluate, BinaryMask, Error, GrayImage, PipelineConfig};

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PcStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    Io = 3,
    Format = 4,
    DimensionMismatch = 5,
    InvalidParameter = 6,
    Config = 7,
    EmptySet = 8,
    Panic = 9,
}

/// Grayscale image with intensities in `[0, 1]`.
pub struct PcImage {
    inner: GrayImage,
}

/// Binary crack mask.
pub struct PcMask {
    inner: BinaryMask,
}

/// Pipeline parameters.
pub struct PcConfig {
    inner: PipelineConfig,
}

/// Scores of a detected mask against a reference mask.
#[repr(C)]
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct PcEvalReport {
    /// Directed Hausdorff distance from detected to reference.
    pub h_ab: f64,
    /// Directed Hausdorff distance from reference to detected.
    pub h_ba: f64,
    pub hausdorff: f64,
    /// Buffered-match similarity in `[0, 100]`.
    pub sm: f64,
    pub tau: f64,
    pub detected_count: usize,
    pub reference_count: usize,
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_last_error(msg: &str) {
    let msg = CString::new(msg.replace('\0', " ")).expect("interior nul removed");
    LAST_ERROR.with(|e| *e.borrow_mut() = msg);
}

struct Failure(PcStatus, String);

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let status = match &e {
            Error::Io { .. } => PcStatus::Io,
            Error::Pgm { .. } | Error::InvalidImage(_) => PcStatus::Format,
            Error::DimensionMismatch { .. } => PcStatus::DimensionMismatch,
            Error::InvalidParameter(_) | Error::OutOfBounds { .. } => PcStatus::InvalidParameter,
            Error::Config(_) => PcStatus::Config,
            Error::EmptySet => PcStatus::EmptySet,
            Error::Stage { .. } => match e.kind() {
                "invalid_parameter" => PcStatus::InvalidParameter,
                "dimension_mismatch" => PcStatus::DimensionMismatch,
                _ => PcStatus::InvalidArgument,
            },
        };
        Failure(status, e.to_string())
    }
}

fn null(what: &str) -> Failure {
    Failure(PcStatus::NullPointer, format!("{what} is null"))
}

/// Runs `f`, converting errors and panics into a status code.
fn guard(f: impl FnOnce() -> Result<(), Failure>) -> PcStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => {
            set_last_error("");
            PcStatus::Ok
        }
        Ok(Err(Failure(status, msg))) => {
            set_last_error(&msg);
            status
        }
        Err(payload) => {
            let msg = payload
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| payload.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "unknown panic".into());
            set_last_error(&format!("panic: {msg}"));
            PcStatus::Panic
        }
    }
}

unsafe fn path_arg(path: *const c_char) -> Result<PathBuf, Failure> {
    if path.is_null() {
        return Err(null("path"));
    }
    CStr::from_ptr(path)
        .to_str()
        .map(PathBuf::from)
        .map_err(|_| Failure(PcStatus::InvalidArgument, "path is not valid UTF-8".into()))
}

unsafe fn put<T>(out: *mut *mut T, value: T) -> Result<(), Failure> {
    *out = Box::into_raw(Box::new(value));
    Ok(())
}

unsafe fn check_out<T>(out: *mut *mut T) -> Result<(), Failure> {
    if out.is_null() {
        return Err(null("output pointer"));
    }
    *out = ptr::null_mut();
    Ok(())
}

unsafe fn borrow<'a, T>(p: *const T, what: &str) -> Result<&'a T, Failure> {
    p.as_ref().ok_or_else(|| null(what))
}

/// Message of the last failed call on this thread, or an empty string.
/// Valid until the next pavecrack call on the same thread.
#[no_mangle]
pub extern "C" fn pc_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

/// Loads a P2/P5 PGM file.
///
/// # Safety
/// `path` must be a nul-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn pc_image_load_pgm(path: *const c_char, out: *mut *mut PcImage) -> PcStatus {
    guard(|| {
        check_out(out)?;
        let img = load_pgm(path_arg(path)?)?;
        put(out, PcImage { inner: img })
    })
}

/// Builds an image from `width * height` row-major 8-bit levels.
///
/// # Safety
/// `data` must point to `len` readable bytes and `out` be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn pc_image_from_u8(
    width: usize,
    height: usize,
    data: *const u8,
    len: usize,
    out: *mut *mut PcImage,
) -> PcStatus {
    guard(|| {
        check_out(out)?;
        if data.is_null() {
            return Err(null("data"));
        }
        if width.checked_mul(height) != Some(len) {
            return Err(Failure(
                PcStatus::InvalidArgument,
                format!("buffer of {len} bytes does not match {width}x{height}"),
            ));
        }
        let levels = std::slice::from_raw_parts(data, len);
        let img = GrayImage::from_levels(width, height, levels)?;
        put(out, PcImage { inner: img })
    })
}

/// # Safety
/// `image` must be null or a handle from this library not yet freed.
#[no_mangle]
pub unsafe extern "C" fn pc_image_free(image: *mut PcImage) {
    if !image.is_null() {
        drop(Box::from_raw(image));
    }
}

/// # Safety
/// `image` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn pc_image_width(image: *const PcImage) -> usize {
    image.as_ref().map_or(0, |i| i.inner.width())
}

/// # Safety
/// `image` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn pc_image_height(image: *const PcImage) -> usize {
    image.as_ref().map_or(0, |i| i.inner.height())
}

/// Loads a PGM as a mask; nonzero pixels are foreground.
///
/// # Safety
/// `path` must be a nul-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn pc_mask_load_pgm(path: *const c_char, out: *mut *mut PcMask) -> PcStatus {
    guard(|| {
        check_out(out)?;
        let m = load_mask(path_arg(path)?)?;
        put(out, PcMask { inner: m })
    })
}

/// Writes the mask as a binary PGM with foreground 255.
///
/// # Safety
/// `mask` must be a live handle and `path` a nul-terminated string.
#[no_mangle]
pub unsafe extern "C" fn pc_mask_save_pgm(mask: *const PcMask, path: *const c_char) -> PcStatus {
    guard(|| {
        let m = borrow(mask, "mask")?;
        save_pgm(&m.inner, path_arg(path)?)?;
        Ok(())
    })
}

/// # Safety
/// `mask` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn pc_mask_width(mask: *const PcMask) -> usize {
    mask.as_ref().map_or(0, |m| m.inner.width())
}

/// # Safety
/// `mask` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn pc_mask_height(mask: *const PcMask) -> usize {
    mask.as_ref().map_or(0, |m| m.inner.height())
}

/// Number of foreground pixels.
///
/// # Safety
/// `mask` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn pc_mask_count(mask: *const PcMask) -> usize {
    mask.as_ref().map_or(0, |m| m.inner.count())
}

/// Copies the mask row-major into `buf` as 0/1 bytes.
///
/// # Safety
/// `mask` must be a live handle and `buf` point to `len` writable bytes.
#[no_mangle]
pub unsafe extern "C" fn pc_mask_copy_bits(mask: *const PcMask, buf: *mut u8, len: usize) -> PcStatus {
    guard(|| {
        let m = borrow(mask, "mask")?;
        if buf.is_null() {
            return Err(null("buffer"));
        }
        let bits = m.inner.bits();
        if len != bits.len() {
            return Err(Failure(
                PcStatus::InvalidArgument,
                format!("buffer holds {len} bytes, mask has {} pixels", bits.len()),
            ));
        }
        let dst = std::slice::from_raw_parts_mut(buf, len);
        for (d, &b) in dst.iter_mut().zip(bits) {
            *d = u8::from(b);
        }
        Ok(())
    })
}

/// # Safety
/// `mask` must be null or a handle from this library not yet freed.
#[no_mangle]
pub unsafe extern "C" fn pc_mask_free(mask: *mut PcMask) {
    if !mask.is_null() {
        drop(Box::from_raw(mask));
    }
}

/// # Safety
/// `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn pc_config_default(out: *mut *mut PcConfig) -> PcStatus {
    guard(|| {
        check_out(out)?;
        put(
            out,
            PcConfig {
                inner: PipelineConfig::default(),
            },
        )
    })
}

/// Loads a TOML configuration file; missing keys take their defaults.
///
/// # Safety
/// `path` must be a nul-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn pc_config_load(path: *const c_char, out: *mut *mut PcConfig) -> PcStatus {
    guard(|| {
        check_out(out)?;
        let cfg = PipelineConfig::load(path_arg(path)?)?;
        put(out, PcConfig { inner: cfg })
    })
}

/// Parses a TOML configuration from a string.
///
/// # Safety
/// `text` must be a nul-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn pc_config_from_toml(text: *const c_char, out: *mut *mut PcConfig) -> PcStatus {
    guard(|| {
        check_out(out)?;
        if text.is_null() {
            return Err(null("text"));
        }
        let text = CStr::from_ptr(text)
            .to_str()
            .map_err(|_| Failure(PcStatus::InvalidArgument, "config is not valid UTF-8".into()))?;
        let cfg = PipelineConfig::from_toml_str(text)?;
        put(out, PcConfig { inner: cfg })
    })
}

/// # Safety
/// `config` must be null or a handle from this library not yet freed.
#[no_mangle]
pub unsafe extern "C" fn pc_config_free(config: *mut PcConfig) {
    if !config.is_null() {
        drop(Box::from_raw(config));
    }
}

/// Runs the full detection pipeline. A null `config` uses the defaults.
///
/// # Safety
/// `image` must be a live handle, `config` null or a live handle, and `out`
/// a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn pc_detect(
    image: *const PcImage,
    config: *const PcConfig,
    out: *mut *mut PcMask,
) -> PcStatus {
    guard(|| {
        check_out(out)?;
        let img = borrow(image, "image")?;
        let default;
        let cfg = match config.as_ref() {
            Some(c) => &c.inner,
            None => {
                default = PipelineConfig::default();
                &default
            }
        };
        let det = detect(&img.inner, cfg)?;
        put(out, PcMask { inner: det.mask })
    })
}

/// Scores `detected` against `reference` with search radius `tau`.
///
/// # Safety
/// Both masks must be live handles and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn pc_evaluate(
    detected: *const PcMask,
    reference: *const PcMask,
    tau: f64,
    out: *mut PcEvalReport,
) -> PcStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("output pointer"));
        }
        let a = borrow(detected, "detected")?;
        let b = borrow(reference, "reference")?;
        let r = evaluate(&a.inner, &b.inner, tau)?;
        *out = PcEvalReport {
            h_ab: r.h_ab,
            h_ba: r.h_ba,
            hausdorff: r.hausdorff,
            sm: r.sm,
            tau: r.tau,
            detected_count: r.detected_count,
            reference_count: r.reference_count,
        };
        Ok(())
    })
}
