use std::ffi::{CStr, CString};
use std::process::Command;
use std::ptr;

use gnnlogic_ffi::*;

fn owned(s: *mut std::ffi::c_char) -> String {
    let out = unsafe { CStr::from_ptr(s) }.to_str().unwrap().to_string();
    unsafe { acr_string_free(s) };
    out
}

#[test]
fn order_pipeline() {
    unsafe {
        let mut g = ptr::null_mut();
        assert_eq!(acr_graph_order(5, &mut g), AcrStatus::Ok);
        let mut n = 0;
        assert_eq!(acr_graph_num_vertices(g, &mut n), AcrStatus::Ok);
        assert_eq!(n, 5);
        let mut ok = false;
        assert_eq!(acr_is_strict_linear_order(g, &mut ok), AcrStatus::Ok);
        assert!(ok);
        let mut hom = 0;
        assert_eq!(acr_count_p2(g, &mut hom), AcrStatus::Ok);
        assert_eq!(hom, 10);

        let mut net = ptr::null_mut();
        assert_eq!(acr_net_linear_order(&mut net), AcrStatus::Ok);
        let mut bits = [false; 5];
        assert_eq!(acr_net_run_all(net, g, bits.as_mut_ptr(), 5), AcrStatus::Ok);
        assert_eq!(bits, [true; 5]);
        assert_eq!(acr_net_run_all(net, g, bits.as_mut_ptr(), 4), AcrStatus::InvalidArgument);

        let mut gg = ptr::null_mut();
        assert_eq!(acr_gadgetise(g, &mut gg), AcrStatus::Ok);
        let mut gnet = ptr::null_mut();
        assert_eq!(acr_net_gadget_order(&mut gnet), AcrStatus::Ok);
        let mut accepted = false;
        assert_eq!(acr_net_run(gnet, gg, 0, &mut accepted), AcrStatus::Ok);
        assert!(accepted);
        assert_eq!(acr_net_run(gnet, gg, 99, &mut accepted), AcrStatus::OutOfRange);
        assert!(!acr_last_error().is_null());

        acr_net_free(gnet);
        acr_graph_free(gg);
        acr_net_free(net);
        acr_graph_free(g);
    }
}

#[test]
fn text_round_trips_and_formulas() {
    unsafe {
        let src = CString::new("fgr 1\nmode directed\nn 3\nd 1\nf 0 1\nf 1 0\nf 2 0\ne 0 1\ne 1 2\n").unwrap();
        let mut g = ptr::null_mut();
        assert_eq!(acr_graph_parse(src.as_ptr(), &mut g), AcrStatus::Ok, "{:?}", CStr::from_ptr(acr_last_error()));
        let mut text = ptr::null_mut();
        assert_eq!(acr_graph_write(g, &mut text), AcrStatus::Ok);
        let written = owned(text);
        let mut g2 = ptr::null_mut();
        let c = CString::new(written.clone()).unwrap();
        assert_eq!(acr_graph_parse(c.as_ptr(), &mut g2), AcrStatus::Ok);

        let fsrc = CString::new("<>=1 <>=1 T").unwrap();
        let mut f = ptr::null_mut();
        assert_eq!(acr_formula_parse(fsrc.as_ptr(), &mut f), AcrStatus::Ok);
        let mut printed = ptr::null_mut();
        assert_eq!(acr_formula_print(f, &mut printed), AcrStatus::Ok);
        assert_eq!(owned(printed), "<>=1 <>=1 T");
        let mut sat = false;
        assert_eq!(acr_formula_eval(f, g, 0, &mut sat), AcrStatus::Ok);
        assert!(sat);

        let mut net = ptr::null_mut();
        assert_eq!(acr_formula_compile(f, 1, &mut net), AcrStatus::Ok);
        let mut ntext = ptr::null_mut();
        assert_eq!(acr_net_write(net, &mut ntext), AcrStatus::Ok);
        let nsrc = CString::new(owned(ntext)).unwrap();
        let mut net2 = ptr::null_mut();
        assert_eq!(acr_net_parse(nsrc.as_ptr(), &mut net2), AcrStatus::Ok);
        let mut bits = [false; 3];
        assert_eq!(acr_net_run_all(net2, g, bits.as_mut_ptr(), 3), AcrStatus::Ok);
        assert_eq!(bits, [true, false, false]);

        let mut same = false;
        assert_eq!(acr_bisimilar(g, 0, g2, 0, 2, 1, AcrGlobalMode::Exact as u32, 0, &mut same), AcrStatus::Ok);
        assert!(same);
        assert_eq!(acr_bisimilar(g, 0, g2, 1, 2, 1, AcrGlobalMode::Capped as u32, 2, &mut same), AcrStatus::Ok);
        assert!(!same);
        assert_eq!(acr_bisimilar(g, 0, g2, 1, 2, 1, 7, 0, &mut same), AcrStatus::InvalidArgument);

        for h in [g, g2] {
            acr_graph_free(h);
        }
        acr_formula_free(f);
        acr_net_free(net);
        acr_net_free(net2);
    }
}

#[test]
fn errors_are_reported() {
    unsafe {
        let mut f = ptr::null_mut();
        let bad = CString::new("(p1 &").unwrap();
        assert_eq!(acr_formula_parse(bad.as_ptr(), &mut f), AcrStatus::Parse);
        let msg = CStr::from_ptr(acr_last_error()).to_str().unwrap();
        assert!(msg.contains("syntax error"), "{msg}");
        assert_eq!(acr_formula_parse(ptr::null(), &mut f), AcrStatus::NullPointer);
        let invalid = [0xffu8, 0];
        assert_eq!(acr_formula_parse(invalid.as_ptr().cast(), &mut f), AcrStatus::InvalidUtf8);
        assert_eq!(acr_graph_order(3, ptr::null_mut()), AcrStatus::NullPointer);
        let mut g = ptr::null_mut();
        assert_ne!(acr_graph_order(0, &mut g), AcrStatus::Ok);
        acr_graph_free(ptr::null_mut());
        acr_string_free(ptr::null_mut());
    }
}

#[test]
fn header_is_valid_c() {
    let dir = env!("CARGO_MANIFEST_DIR");
    let Ok(status) = Command::new("cc")
        .args(["-fsyntax-only", "-Wall", "-Werror", "-x", "c", &format!("{dir}/include/gnnlogic.h")])
        .status()
    else {
        eprintln!("no C compiler available; header check skipped");
        return;
    };
    assert!(status.success());
}
