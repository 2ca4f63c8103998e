use std::ffi::CStr;
use std::ptr;

use mbqc_channel_ffi::*;

fn run(config: &MbqcChannelConfig) -> *mut MbqcChannel {
    let mut h = ptr::null_mut();
    assert_eq!(unsafe { mbqc_channel_new(config, &mut h) }, MbqcStatus::Ok);
    assert!(!h.is_null());
    h
}

#[test]
fn beta_point_matches_ideal() {
    let mut cfg = mbqc_channel_config_default();
    cfg.mode = MbqcMode::Beta;
    cfg.use_gamma = false;
    cfg.alpha = 0.3;
    cfg.beta = 1.2;
    let h = run(&cfg);
    let (mut re, mut im, mut ire, mut iim) = ([0.0; 16], [0.0; 16], [0.0; 16], [0.0; 16]);
    unsafe {
        assert_eq!(
            mbqc_channel_chi(h, re.as_mut_ptr(), im.as_mut_ptr()),
            MbqcStatus::Ok
        );
        assert_eq!(
            mbqc_channel_ideal_chi(h, ire.as_mut_ptr(), iim.as_mut_ptr()),
            MbqcStatus::Ok
        );
    }
    for k in 0..16 {
        assert!((re[k] - ire[k]).abs() < 1e-9 && (im[k] - iim[k]).abs() < 1e-9);
    }
    let trace: f64 = (0..4).map(|i| re[5 * i]).sum();
    assert!((trace - 1.0).abs() < 1e-9);
    let (mut f, mut s) = (0.0, 0.0);
    assert_eq!(
        unsafe { mbqc_channel_fidelity(h, &mut f, &mut s) },
        MbqcStatus::Ok
    );
    assert!((f - 1.0).abs() < 1e-9);
    assert!(s.is_nan());
    unsafe { mbqc_channel_free(h) };
}

#[test]
fn sampled_run_reports_sigma() {
    let mut cfg = mbqc_channel_config_default();
    cfg.gamma = 0.5;
    cfg.noise_v = 0.6053;
    cfg.shots = 2000;
    cfg.seed = 5;
    let h = run(&cfg);
    let (mut f, mut s) = (0.0, 0.0);
    assert_eq!(
        unsafe { mbqc_channel_fidelity(h, &mut f, &mut s) },
        MbqcStatus::Ok
    );
    assert!(f < 1.0 && s > 0.0);
    unsafe { mbqc_channel_free(h) };
}

#[test]
fn invalid_config_sets_message() {
    let mut cfg = mbqc_channel_config_default();
    cfg.mode = MbqcMode::Beta;
    let mut h = ptr::null_mut();
    assert_eq!(
        unsafe { mbqc_channel_new(&cfg, &mut h) },
        MbqcStatus::InvalidArgument
    );
    assert!(h.is_null());
    let msg = unsafe { CStr::from_ptr(mbqc_last_error()) }
        .to_str()
        .unwrap();
    assert!(msg.contains("beta"), "{msg}");

    cfg = mbqc_channel_config_default();
    cfg.gamma = 1.0;
    cfg.postselect = true;
    cfg.s1 = 3;
    assert_eq!(
        unsafe { mbqc_channel_new(&cfg, &mut h) },
        MbqcStatus::InvalidArgument
    );
}

#[test]
fn null_pointers_are_rejected() {
    let cfg = mbqc_channel_config_default();
    assert_eq!(
        unsafe { mbqc_channel_new(&cfg, ptr::null_mut()) },
        MbqcStatus::NullPointer
    );
    assert_eq!(
        unsafe { mbqc_channel_new(ptr::null(), ptr::null_mut()) },
        MbqcStatus::NullPointer
    );
    let mut f = 0.0;
    assert_eq!(
        unsafe { mbqc_channel_fidelity(ptr::null(), &mut f, ptr::null_mut()) },
        MbqcStatus::NullPointer
    );
    unsafe { mbqc_channel_free(ptr::null_mut()) };
    assert!(!mbqc_last_error().is_null());
    assert_eq!(
        unsafe {
            mbqc_cluster_fidelity(
                1.0,
                1.0,
                0,
                0,
                ptr::null_mut(),
                ptr::null_mut(),
                ptr::null_mut(),
            )
        },
        MbqcStatus::NullPointer
    );
}

#[test]
fn cluster_witness() {
    let (mut f, mut exact, mut gme) = (0.0, 0.0, false);
    assert_eq!(
        unsafe { mbqc_cluster_fidelity(0.6053, 1.0, 0, 0, &mut f, &mut exact, &mut gme) },
        MbqcStatus::Ok
    );
    assert!((f - 0.63).abs() < 1e-3 && (exact - f).abs() < 1e-12 && gme);
    assert_eq!(
        unsafe { mbqc_cluster_fidelity(0.4, 1.0, 0, 0, &mut f, ptr::null_mut(), &mut gme) },
        MbqcStatus::Ok
    );
    assert!(!gme);
    assert_eq!(
        unsafe { mbqc_cluster_fidelity(1.5, 1.0, 0, 0, &mut f, ptr::null_mut(), ptr::null_mut()) },
        MbqcStatus::InvalidArgument
    );
    assert!(!mbqc_last_error().is_null());
}

#[test]
fn header_declares_the_api() {
    let header = std::fs::read_to_string(concat!(
        env!("CARGO_MANIFEST_DIR"),
        "/include/mbqc_channel.h"
    ))
    .unwrap();
    for name in [
        "mbqc_channel_new",
        "mbqc_channel_free",
        "mbqc_channel_chi",
        "mbqc_channel_ideal_chi",
        "mbqc_channel_fidelity",
        "mbqc_cluster_fidelity",
        "mbqc_last_error",
        "MBQC_STATUS_NUMERICAL_FAILURE",
        "typedef struct MbqcChannel MbqcChannel",
    ] {
        assert!(header.contains(name), "{name} missing from header");
    }
}
