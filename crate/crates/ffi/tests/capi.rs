use std::ffi::{CStr, CString};
use std::ptr;

use interchange_ffi::*;

fn last_error() -> String {
    unsafe { CStr::from_ptr(ic_last_error_message()) }.to_string_lossy().into_owned()
}

#[test]
fn graph_round_trip_through_text() {
    unsafe {
        let mut g = ptr::null_mut();
        assert_eq!(ic_graph_sample(20, 3, 7, IcSampler::Auto, &mut g), IcStatus::Ok);
        assert_eq!((ic_graph_n(g), ic_graph_d(g), ic_graph_num_edges(g)), (20, 3, 30));
        let mut text = ptr::null_mut();
        assert_eq!(ic_graph_to_text(g, &mut text), IcStatus::Ok);
        let mut h = ptr::null_mut();
        assert_eq!(ic_graph_from_text(text, &mut h), IcStatus::Ok);
        for i in 0..30 {
            let (mut a, mut b, mut c, mut d) = (0, 0, 0, 0);
            assert_eq!(ic_graph_edge(g, i, &mut a, &mut b), IcStatus::Ok);
            assert_eq!(ic_graph_edge(h, i, &mut c, &mut d), IcStatus::Ok);
            assert_eq!((a, b), (c, d));
            assert!(a < b);
        }
        let (mut a, mut b) = (0, 0);
        assert_eq!(ic_graph_edge(g, 30, &mut a, &mut b), IcStatus::Precondition);
        ic_string_free(text);
        ic_graph_free(g);
        ic_graph_free(h);
    }
}

#[test]
fn errors_carry_category_and_message() {
    unsafe {
        let mut g = ptr::null_mut();
        assert_eq!(ic_graph_sample(5, 3, 1, IcSampler::Rejection, &mut g), IcStatus::Precondition);
        assert!(g.is_null());
        assert!(!last_error().is_empty());
        let bad = CString::new("3 2\n0 1\n").unwrap();
        assert_eq!(ic_graph_from_text(bad.as_ptr(), &mut g), IcStatus::Config);
        assert!(last_error().contains("line"));
        assert_eq!(ic_graph_complete(3, ptr::null_mut()), IcStatus::NullPointer);
        let mut t = 0.0;
        assert_eq!(ic_critical_time(1.0, 4.0, &mut t), IcStatus::Precondition);
        let mut c5 = ptr::null_mut();
        assert_eq!(ic_graph_cycle(9, &mut c5), IcStatus::Ok);
        let mut chain = ptr::null_mut();
        assert_eq!(ic_chain_build(c5, 40320, &mut chain), IcStatus::Resource);
        ic_graph_free(c5);
    }
}

#[test]
fn state_tracks_cycles() {
    unsafe {
        let mut g = ptr::null_mut();
        assert_eq!(ic_graph_complete(4, &mut g), IcStatus::Ok);
        let mut s = ptr::null_mut();
        assert_eq!(ic_state_identity(g, &mut s), IcStatus::Ok);
        assert_eq!(ic_state_num_cycles(s), 4);
        let mut d = IcDelta::default();
        assert_eq!(ic_state_apply_transposition(s, 0, 1, &mut d), IcStatus::Ok);
        assert_eq!((d.kind, d.cycles_before, d.cycles_after), (-1, 4, 3));
        assert_eq!(ic_state_same_cycle_edges(s), 1);
        assert_eq!(ic_state_apply_transposition(s, 0, 1, &mut d), IcStatus::Ok);
        assert_eq!(d.kind, 1);
        assert_eq!(ic_state_apply_edge(s, 0, ptr::null_mut()), IcStatus::Ok);
        assert_eq!(ic_state_apply_edge(s, 6, ptr::null_mut()), IcStatus::Precondition);
        let mut image = [0u32; 4];
        assert_eq!(ic_state_image(s, image.as_mut_ptr(), 4), IcStatus::Ok);
        assert_eq!(image, [1, 0, 2, 3]);
        assert_eq!(ic_state_image(s, image.as_mut_ptr(), 3), IcStatus::Precondition);
        assert_eq!(ic_state_largest_cycle(s), 2);
        ic_state_free(s);
        ic_graph_free(g);
    }
}

#[test]
fn bounds_and_estimators() {
    unsafe {
        let mut v = 0.0;
        assert_eq!(ic_critical_time(2.0, 7.0, &mut v), IcStatus::Ok);
        assert!((v - 4.0 * 2f64.ln()).abs() < 1e-12);
        assert_eq!(ic_stirring_interval_bound(10.0, 0.5, 1.0, &mut v), IcStatus::Ok);
        assert!((v - 2.0 / 14.0).abs() < 1e-12);
        assert_eq!(ic_theorem1_pointwise_bound(2, 10.0, 0.5, 1.0, &mut v), IcStatus::Ok);
        assert_eq!(ic_theorem2_integral_bound(2.0, 10.0, 0.5, 0.0, 1.0, &mut v), IcStatus::Ok);

        let mut g = ptr::null_mut();
        assert_eq!(ic_graph_complete(2, &mut g), IcStatus::Ok);
        let mut e = IcEstimate::default();
        assert_eq!(ic_estimate_log_partition(g, 2.0, 0.0, 10, 1, &mut e), IcStatus::Ok);
        assert_eq!(e.value, 2.0 * 2f64.ln());
        assert_eq!(e.replicas, 10);
        assert_eq!(ic_estimate_weighted_prob(g, 2.0, 1.0, 0.9, 1, 1, &mut e), IcStatus::Precondition);
        assert_eq!(ic_estimate_weighted_prob(g, 2.0, 1.0, 0.9, 4000, 1, &mut e), IcStatus::Ok);
        assert!(e.value > 0.2 && e.value < 0.35);
        assert_eq!(ic_estimate_weighted_time_integral(g, 1.0, 0.0, 1.0, 0.9, 64, 1000, 3, &mut e), IcStatus::Ok);

        let mut chain = ptr::null_mut();
        assert_eq!(ic_chain_build(g, 40320, &mut chain), IcStatus::Ok);
        assert_eq!(ic_chain_partition(chain, 2.0, 1.0, &mut v), IcStatus::Ok);
        assert!((v - (3.0 + (-2.0f64).exp())).abs() < 1e-12);
        assert_eq!(ic_chain_mean_cycles(chain, 0.0, &mut v), IcStatus::Ok);
        assert_eq!(v, 2.0);
        assert_eq!(ic_chain_weighted_prob(chain, 2.0, 1.0, 0.9, &mut v), IcStatus::Ok);
        ic_chain_free(chain);
        ic_graph_free(g);
    }
}

#[test]
fn version_string() {
    let v = unsafe { CStr::from_ptr(ic_version()) }.to_str().unwrap();
    assert_eq!(v, env!("CARGO_PKG_VERSION"));
}
