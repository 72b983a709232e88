use std::ffi::{CStr, CString};
use std::ptr;

use schurprod_ffi::*;

fn cs(s: &str) -> CString {
    CString::new(s).unwrap()
}

fn last_error() -> String {
    unsafe { CStr::from_ptr(sp_last_error()) }.to_string_lossy().into_owned()
}

unsafe fn link(name: &str) -> *mut SpLink {
    let mut out = ptr::null_mut();
    assert_eq!(sp_link_parse(cs(name).as_ptr(), &mut out), SpStatus::Ok);
    out
}

#[test]
fn link_round_trip() {
    unsafe {
        let t = link("toeplitz");
        let mut buf = [0i64; 2];
        let mut written = 0;
        assert_eq!(sp_link_eval(t, 5, 2, buf.as_mut_ptr(), 2, &mut written), SpStatus::Ok);
        assert_eq!((written, buf[0]), (1, 3));
        let mut d = 0;
        assert_eq!(sp_link_delta(t, 32, &mut d), SpStatus::Ok);
        assert_eq!(d, 1);

        let poly = link("poly:i^2+j,i+j^2");
        assert_eq!(sp_link_eval(poly, 2, 3, buf.as_mut_ptr(), 1, &mut written), SpStatus::BufferTooSmall);
        assert_eq!(written, 2);
        assert_eq!(sp_link_eval(poly, 2, 3, buf.as_mut_ptr(), 2, &mut written), SpStatus::Ok);
        assert_eq!(buf, [7, 11]);
        sp_link_free(poly);
        sp_link_free(t);
        sp_link_free(ptr::null_mut());
    }
}

#[test]
fn errors_are_reported() {
    unsafe {
        let mut out = ptr::null_mut();
        assert_eq!(sp_link_parse(cs("circulant").as_ptr(), &mut out), SpStatus::ParseError);
        assert!(out.is_null());
        assert!(last_error().contains("circulant"));
        assert_eq!(sp_link_parse(ptr::null(), &mut out), SpStatus::NullPointer);
        let mut m = 0u64;
        assert_eq!(sp_circular_star_moment(cs("1*").as_ptr(), &mut m), SpStatus::Ok);
        assert_eq!(last_error(), "");
        assert_eq!(sp_circular_star_moment(cs("1x").as_ptr(), &mut m), SpStatus::ParseError);
    }
}

#[test]
fn moments_and_counts() {
    unsafe {
        let mut m = 0u64;
        assert_eq!(sp_circular_star_moment(cs("1*1*1*").as_ptr(), &mut m), SpStatus::Ok);
        assert_eq!(m, 5);
        assert_eq!(sp_catalan(6), 132);

        let (t, h) = (link("toeplitz"), link("hankel"));
        let mut c = 0u64;
        let args = (cs("1*1*"), cs("1,2/3,4"));
        assert_eq!(sp_count_constrained(t, h, args.0.as_ptr(), args.1.as_ptr(), args.1.as_ptr(), 16, false, &mut c), SpStatus::Ok);
        assert_eq!(c, 3840);
        assert_eq!(sp_count_constrained(t, h, args.0.as_ptr(), args.1.as_ptr(), args.1.as_ptr(), 16, true, &mut c), SpStatus::Ok);
        assert_eq!(c, 4096);
        assert_eq!(
            sp_count_constrained(t, h, args.0.as_ptr(), args.1.as_ptr(), args.1.as_ptr(), 500, false, &mut c),
            SpStatus::BudgetExceeded
        );

        let mut inj = false;
        assert_eq!(sp_joint_injective(t, h, 20, &mut inj), SpStatus::Ok);
        assert!(inj);
        let mut adm = true;
        assert_eq!(sp_linear_admissible(1, 1, 0, 1, &mut adm), SpStatus::Ok);
        assert!(!adm);

        let mut prod = ptr::null_mut();
        assert_eq!(sp_product_new(t, h, SpDistribution::Rademacher as u32, SpDistribution::Rademacher as u32, &mut prod), SpStatus::Ok);
        let (mut mean, mut se) = (0.0, 0.0);
        assert_eq!(sp_empirical_star_moment(prod, 20, cs("1*").as_ptr(), 5, 1, &mut mean, &mut se), SpStatus::Ok);
        assert_eq!(mean, 1.0);
        let mut bad = ptr::null_mut();
        assert_eq!(sp_product_new(t, h, 7, 0, &mut bad), SpStatus::InvalidArgument);
        sp_product_free(prod);
        sp_link_free(t);
        sp_link_free(h);
    }
}

#[test]
fn sampling_and_spectrum() {
    unsafe {
        let (t, h) = (link("toeplitz"), link("hankel"));
        let mut prod = ptr::null_mut();
        assert_eq!(sp_product_new(t, h, 0, 0, &mut prod), SpStatus::Ok);
        let n = 30;
        let mut buf = vec![0.0; n * n];
        assert_eq!(sp_product_sample(prod, n, 4, buf.as_mut_ptr(), buf.len() - 1), SpStatus::BufferTooSmall);
        assert_eq!(sp_product_sample(prod, n, 4, buf.as_mut_ptr(), buf.len()), SpStatus::Ok);
        let mut again = vec![0.0; n * n];
        sp_product_sample(prod, n, 4, again.as_mut_ptr(), again.len());
        assert_eq!(buf, again);

        let mut stats = SpSpectrumStats::default();
        assert_eq!(sp_spectrum_stats(buf.as_ptr(), n, 1.0 / (n as f64).sqrt(), &mut stats), SpStatus::Ok);
        assert_eq!(stats.n, n);
        assert!((0.0..=1.0).contains(&stats.radial_ks));

        let (mut re, mut im) = (vec![0.0; n], vec![0.0; n]);
        assert_eq!(sp_eigenvalues(buf.as_ptr(), n, re.as_mut_ptr(), im.as_mut_ptr()), SpStatus::Ok);
        let trace: f64 = (0..n).map(|i| buf[i * n + i]).sum();
        assert!((re.iter().sum::<f64>() - trace).abs() < 1e-8);
        sp_product_free(prod);
        sp_link_free(t);
        sp_link_free(h);
    }
}

#[test]
fn version_string() {
    let v = unsafe { CStr::from_ptr(sp_version()) }.to_str().unwrap();
    assert_eq!(v, env!("CARGO_PKG_VERSION"));
}

#[test]
fn header_lists_the_api() {
    let header = std::fs::read_to_string(concat!(env!("CARGO_MANIFEST_DIR"), "/include/schurprod.h")).unwrap();
    for name in ["sp_link_parse", "sp_count_constrained", "sp_spectrum_stats", "SP_STATUS_BUDGET_EXCEEDED", "SP_DISTRIBUTION_GAUSSIAN", "SpSpectrumStats"] {
        assert!(header.contains(name), "{name} missing from header");
    }
}
