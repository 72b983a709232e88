//! C ABI over `schurprod`.
//!
//! Handles (`SpLink`, `SpProduct`) are opaque and owned by the caller once
//! returned; release them with the matching `*_free`. Every fallible call
//! returns an [`SpStatus`]; on failure `sp_last_error` describes the problem
//! for the calling thread.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use schurprod::counting::{IndexCounter, Semantics};
use schurprod::ensemble::{EntryDistribution, ProductEnsemble};
use schurprod::faer::Mat;
use schurprod::linkfn::{delta, joint_injectivity, linear_admissible};
use schurprod::moments::{circular_star_moment, empirical_star_moment};
use schurprod::partitions::{catalan, Partition};
use schurprod::spectrum::{eigenvalues, esm_stats};
use schurprod::{Error, LinkFunction, Word};

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SpStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    ParseError = 3,
    BudgetExceeded = 4,
    DimensionMismatch = 5,
    SolverError = 6,
    UnknownMoments = 7,
    BufferTooSmall = 8,
    Overflow = 9,
    Panic = 10,
}

/// Entry laws accepted where a `uint32_t dist` parameter is taken.
#[repr(u32)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SpDistribution {
    Gaussian = 0,
    Rademacher = 1,
    Uniform = 2,
}

pub struct SpLink(LinkFunction);

pub struct SpProduct(ProductEnsemble);

#[repr(C)]
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct SpSpectrumStats {
    pub n: usize,
    pub mean_abs_sq: f64,
    pub disk_fraction_1: f64,
    pub disk_fraction_1_05: f64,
    pub disk_fraction_1_1: f64,
    pub radial_ks: f64,
    pub angular_max_dev: f64,
    pub spectral_radius: f64,
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_error(msg: &str) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = c);
}

fn status_of(e: &Error) -> SpStatus {
    match e {
        Error::InvalidArgument(_) => SpStatus::InvalidArgument,
        Error::Parse(_) => SpStatus::ParseError,
        Error::BudgetExceeded(_) => SpStatus::BudgetExceeded,
        Error::DimensionMismatch { .. } => SpStatus::DimensionMismatch,
        Error::Solver(_) => SpStatus::SolverError,
        Error::UnknownMoments(_) => SpStatus::UnknownMoments,
    }
}

struct Failure(SpStatus, String);

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure(status_of(&e), e.to_string())
    }
}

fn null(what: &str) -> Failure {
    Failure(SpStatus::NullPointer, format!("{what} is null"))
}

fn guard<F: FnOnce() -> Result<(), Failure>>(f: F) -> SpStatus {
    // handles are only read inside the closure, so nothing is left half-updated by a panic
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => {
            set_error("");
            SpStatus::Ok
        }
        Ok(Err(Failure(status, msg))) => {
            set_error(&msg);
            status
        }
        Err(_) => {
            set_error("internal panic");
            SpStatus::Panic
        }
    }
}

unsafe fn str_arg<'a>(p: *const c_char, what: &str) -> Result<&'a str, Failure> {
    if p.is_null() {
        return Err(null(what));
    }
    CStr::from_ptr(p)
        .to_str()
        .map_err(|_| Failure(SpStatus::ParseError, format!("{what} is not valid UTF-8")))
}

unsafe fn ref_arg<'a, T>(p: *const T, what: &str) -> Result<&'a T, Failure> {
    p.as_ref().ok_or_else(|| null(what))
}

unsafe fn out_arg<'a, T>(p: *mut T, what: &str) -> Result<&'a mut T, Failure> {
    p.as_mut().ok_or_else(|| null(what))
}

fn dist_arg(d: u32) -> Result<EntryDistribution, Failure> {
    match d {
        0 => Ok(EntryDistribution::StandardGaussian),
        1 => Ok(EntryDistribution::Rademacher),
        2 => Ok(EntryDistribution::UniformCentered),
        _ => Err(Failure(SpStatus::InvalidArgument, format!("unknown distribution code {d}"))),
    }
}

fn parse<T: std::str::FromStr<Err = Error>>(s: &str) -> Result<T, Failure> {
    s.parse::<T>().map_err(Failure::from)
}

/// Message for the last failed call on this thread; empty after a success.
/// The pointer stays valid until the next call on the same thread.
#[no_mangle]
pub extern "C" fn sp_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn sp_version() -> *const c_char {
    static VERSION: &str = concat!(env!("CARGO_PKG_VERSION"), "\0");
    VERSION.as_ptr().cast()
}

/// Parses a link name such as `toeplitz`, `linear:2,3,0` or `poly:i^2+j,i+j^2`.
///
/// # Safety
/// `name` must be a NUL-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn sp_link_parse(name: *const c_char, out: *mut *mut SpLink) -> SpStatus {
    guard(|| {
        let out = out_arg(out, "out")?;
        *out = ptr::null_mut();
        let link: LinkFunction = parse(str_arg(name, "name")?)?;
        *out = Box::into_raw(Box::new(SpLink(link)));
        Ok(())
    })
}

/// # Safety
/// `link` must come from `sp_link_parse` and not be used afterwards. Null is ignored.
#[no_mangle]
pub unsafe extern "C" fn sp_link_free(link: *mut SpLink) {
    if !link.is_null() {
        drop(Box::from_raw(link));
    }
}

/// Writes the coordinates of `L(i, j)` (1-based) into `out[0..cap]`; `written`
/// receives the number of coordinates even when `cap` is too small.
///
/// # Safety
/// `out` must have room for `cap` values; `link` and `written` must be valid.
#[no_mangle]
pub unsafe extern "C" fn sp_link_eval(
    link: *const SpLink,
    i: usize,
    j: usize,
    out: *mut i64,
    cap: usize,
    written: *mut usize,
) -> SpStatus {
    guard(|| {
        let link = ref_arg(link, "link")?;
        let written = out_arg(written, "written")?;
        if i == 0 || j == 0 {
            return Err(Failure(SpStatus::InvalidArgument, "indices are 1-based".into()));
        }
        let v = link.0.eval(i, j);
        *written = v.len();
        if v.len() > cap {
            return Err(Failure(SpStatus::BufferTooSmall, format!("need {} coordinates", v.len())));
        }
        if out.is_null() {
            return Err(null("out"));
        }
        ptr::copy_nonoverlapping(v.as_ptr(), out, v.len());
        Ok(())
    })
}

/// Δ_L on `[1,n]²`.
///
/// # Safety
/// `link` and `out` must be valid pointers.
#[no_mangle]
pub unsafe extern "C" fn sp_link_delta(link: *const SpLink, n: usize, out: *mut usize) -> SpStatus {
    guard(|| {
        let link = ref_arg(link, "link")?;
        *out_arg(out, "out")? = delta(&link.0, n);
        Ok(())
    })
}

/// Whether `(i, j) ↦ (L_X(i,j), L_Y(i,j))` is injective on `[1,n]²`.
///
/// # Safety
/// All pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn sp_joint_injective(lx: *const SpLink, ly: *const SpLink, n: usize, out: *mut bool) -> SpStatus {
    guard(|| {
        let (lx, ly) = (ref_arg(lx, "lx")?, ref_arg(ly, "ly")?);
        *out_arg(out, "out")? = joint_injectivity(&lx.0, &ly.0, n).injective;
        Ok(())
    })
}

/// Admissibility of the linear pair `(a i + b j + e, c i + d j + f)`.
///
/// # Safety
/// `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn sp_linear_admissible(a: i64, b: i64, c: i64, d: i64, out: *mut bool) -> SpStatus {
    guard(|| {
        *out_arg(out, "out")? = linear_admissible(a, b, c, d, 0, 0).admissible;
        Ok(())
    })
}

/// Product ensemble `X ⊙ Y`; `dist_x`, `dist_y` are `SpDistribution` codes.
///
/// # Safety
/// `lx`, `ly` and `out` must be valid pointers; the links are copied.
#[no_mangle]
pub unsafe extern "C" fn sp_product_new(
    lx: *const SpLink,
    ly: *const SpLink,
    dist_x: u32,
    dist_y: u32,
    out: *mut *mut SpProduct,
) -> SpStatus {
    guard(|| {
        let out = out_arg(out, "out")?;
        *out = ptr::null_mut();
        let (lx, ly) = (ref_arg(lx, "lx")?, ref_arg(ly, "ly")?);
        let e = ProductEnsemble::new(lx.0.clone(), ly.0.clone(), dist_arg(dist_x)?, dist_arg(dist_y)?);
        *out = Box::into_raw(Box::new(SpProduct(e)));
        Ok(())
    })
}

/// # Safety
/// `product` must come from `sp_product_new` and not be used afterwards. Null is ignored.
#[no_mangle]
pub unsafe extern "C" fn sp_product_free(product: *mut SpProduct) {
    if !product.is_null() {
        drop(Box::from_raw(product));
    }
}

/// Samples one `n × n` realization into `out` (row-major, `len ≥ n²`).
///
/// # Safety
/// `out` must have room for `len` doubles.
#[no_mangle]
pub unsafe extern "C" fn sp_product_sample(
    product: *const SpProduct,
    n: usize,
    seed: u64,
    out: *mut f64,
    len: usize,
) -> SpStatus {
    guard(|| {
        let product = ref_arg(product, "product")?;
        let cells = n.checked_mul(n).ok_or_else(|| Failure(SpStatus::Overflow, "n² overflows".into()))?;
        if len < cells {
            return Err(Failure(SpStatus::BufferTooSmall, format!("need {cells} doubles")));
        }
        if out.is_null() {
            return Err(null("out"));
        }
        let m = product.0.sample(n, seed);
        let dst = std::slice::from_raw_parts_mut(out, cells);
        for i in 0..n {
            for j in 0..n {
                dst[i * n + j] = m.entries[(i, j)];
            }
        }
        Ok(())
    })
}

/// Limiting *-moment of a circular element for a word over `1` and `*`.
///
/// # Safety
/// `word` must be NUL-terminated and `out` valid.
#[no_mangle]
pub unsafe extern "C" fn sp_circular_star_moment(word: *const c_char, out: *mut u64) -> SpStatus {
    guard(|| {
        let w: Word = parse(str_arg(word, "word")?)?;
        *out_arg(out, "out")? = circular_star_moment(&w)?;
        Ok(())
    })
}

/// Catalan number `C_m`; 0 when it does not fit in 64 bits.
#[no_mangle]
pub extern "C" fn sp_catalan(m: u32) -> u64 {
    catch_unwind(|| catalan(m)).unwrap_or(0)
}

/// Monte-Carlo estimate of `n^{-1-k/2} E tr(M^{ε1}⋯M^{εk})`.
///
/// # Safety
/// All pointers must be valid; `word` NUL-terminated.
#[no_mangle]
pub unsafe extern "C" fn sp_empirical_star_moment(
    product: *const SpProduct,
    n: usize,
    word: *const c_char,
    trials: usize,
    seed: u64,
    mean: *mut f64,
    std_error: *mut f64,
) -> SpStatus {
    guard(|| {
        let product = ref_arg(product, "product")?;
        let w: Word = parse(str_arg(word, "word")?)?;
        let (mean, std_error) = (out_arg(mean, "mean")?, out_arg(std_error, "std_error")?);
        let est = empirical_star_moment(&product.0, n, &w, trials, seed)?;
        *mean = est.mean;
        *std_error = est.std_error;
        Ok(())
    })
}

/// `#([π_x]_X ∩ [π_y]_Y)` on `[n]^k`. With `closure` set, tuples whose induced
/// partitions are coarser than `π_x`, `π_y` are counted too. Partitions use the
/// `1,4/2,3` text form.
///
/// # Safety
/// All pointers must be valid; strings NUL-terminated.
#[no_mangle]
pub unsafe extern "C" fn sp_count_constrained(
    lx: *const SpLink,
    ly: *const SpLink,
    word: *const c_char,
    pi_x: *const c_char,
    pi_y: *const c_char,
    n: usize,
    closure: bool,
    out: *mut u64,
) -> SpStatus {
    guard(|| {
        let (lx, ly) = (ref_arg(lx, "lx")?, ref_arg(ly, "ly")?);
        let w: Word = parse(str_arg(word, "word")?)?;
        let px: Partition = parse(str_arg(pi_x, "pi_x")?)?;
        let py: Partition = parse(str_arg(pi_y, "pi_y")?)?;
        let out = out_arg(out, "out")?;
        let semantics = if closure { Semantics::Closure } else { Semantics::Exact };
        let c = IndexCounter::new(&lx.0, &ly.0, &w, n)?.count(&px, &py, semantics)?;
        *out = u64::try_from(c).map_err(|_| Failure(SpStatus::Overflow, "count exceeds 64 bits".into()))?;
        Ok(())
    })
}

/// Eigenvalues of a real `n × n` row-major matrix into `re[0..n]`, `im[0..n]`.
///
/// # Safety
/// `m` must hold `n²` doubles; `re` and `im` room for `n` each.
#[no_mangle]
pub unsafe extern "C" fn sp_eigenvalues(m: *const f64, n: usize, re: *mut f64, im: *mut f64) -> SpStatus {
    guard(|| {
        let eigs = solve(m, n)?;
        if re.is_null() || im.is_null() {
            return Err(null("re/im"));
        }
        for (k, z) in eigs.iter().enumerate() {
            *re.add(k) = z.re;
            *im.add(k) = z.im;
        }
        Ok(())
    })
}

/// Spectral statistics of the spectrum of `scale · m` for a real row-major matrix.
///
/// # Safety
/// `m` must hold `n²` doubles and `out` be valid.
#[no_mangle]
pub unsafe extern "C" fn sp_spectrum_stats(m: *const f64, n: usize, scale: f64, out: *mut SpSpectrumStats) -> SpStatus {
    guard(|| {
        let out = out_arg(out, "out")?;
        let s = esm_stats(&solve(m, n)?, scale)?;
        *out = SpSpectrumStats {
            n: s.n,
            mean_abs_sq: s.mean_abs_sq,
            disk_fraction_1: s.disk_fraction_1,
            disk_fraction_1_05: s.disk_fraction_1_05,
            disk_fraction_1_1: s.disk_fraction_1_1,
            radial_ks: s.radial_ks,
            angular_max_dev: s.angular_max_dev,
            spectral_radius: s.spectral_radius,
        };
        Ok(())
    })
}

unsafe fn solve(m: *const f64, n: usize) -> Result<Vec<schurprod::spectrum::c64>, Failure> {
    if m.is_null() {
        return Err(null("m"));
    }
    let cells = n.checked_mul(n).ok_or_else(|| Failure(SpStatus::Overflow, "n² overflows".into()))?;
    let src = std::slice::from_raw_parts(m, cells);
    let mat = Mat::from_fn(n, n, |i, j| src[i * n + j]);
    Ok(eigenvalues(mat.as_ref())?)
}
