use std::ffi::{CStr, CString};
use std::ptr;

use digred_ffi::*;

const TWO_CYCLE: &str = "structure C2\ndomain 0 1\nrelation R 2\ntuple 0 1\ntuple 1 0\nend\n";
const ODD: &str = "instance X\ndomain a b c\nrelation R 2\ntuple a b\ntuple b c\ntuple c a\nend\n";
const EVEN: &str = "instance X\ndomain a b\nrelation R 2\ntuple a b\ntuple b a\nend\n";

fn parse(src: &str) -> *mut DigredStructure {
    let c = CString::new(src).unwrap();
    let mut out = ptr::null_mut();
    assert_eq!(
        unsafe { digred_structure_parse(c.as_ptr(), &mut out) },
        DigredStatus::Ok
    );
    out
}

fn last_error() -> String {
    let p = digred_last_error();
    assert!(!p.is_null());
    let s = unsafe { CStr::from_ptr(p) }.to_str().unwrap().to_string();
    unsafe { digred_string_free(p) };
    s
}

#[test]
fn stats_of_two_cycle() {
    let a = parse(TWO_CYCLE);
    let mut r = ptr::null_mut();
    let mut stats = DigredStats::default();
    unsafe {
        assert_eq!(digred_reduction_new(a, &mut r), DigredStatus::Ok);
        assert_eq!(digred_reduction_stats(r, &mut stats), DigredStatus::Ok);
    }
    assert_eq!(
        (stats.vertices, stats.edges, stats.height, stats.matches),
        (24, 24, 4, 1)
    );
    let mut g = ptr::null_mut();
    unsafe {
        assert_eq!(digred_reduction_digraph(r, &mut g), DigredStatus::Ok);
        assert_eq!(digred_digraph_vertex_count(g), 24);
        digred_digraph_free(g);
        digred_reduction_free(r);
        digred_structure_free(a);
    }
}

#[test]
fn forward_reverse_and_solve_agree() {
    let a = parse(TWO_CYCLE);
    let mut r = ptr::null_mut();
    unsafe { assert_eq!(digred_reduction_new(a, &mut r), DigredStatus::Ok) };
    for (src, want) in [(ODD, DigredStatus::No), (EVEN, DigredStatus::Ok)] {
        let x = parse(src);
        let mut g = ptr::null_mut();
        let mut b = ptr::null_mut();
        let mut how = DigredShortcut::FixedYes;
        unsafe {
            assert_eq!(digred_solve(x, a), want);
            assert_eq!(digred_forward(x, &mut g), DigredStatus::Ok);
            assert_eq!(digred_solve_digraph(g, r), want);
            assert_eq!(digred_reverse(r, g, &mut b, &mut how), DigredStatus::Ok);
            assert_eq!(how, DigredShortcut::Assembled);
            assert_eq!(digred_solve(b, a), want);
            digred_structure_free(b);
            digred_digraph_free(g);
            digred_structure_free(x);
        }
    }
    unsafe {
        digred_reduction_free(r);
        digred_structure_free(a);
    }
}

#[test]
fn serialize_round_trips() {
    let a = parse(TWO_CYCLE);
    let mut s = ptr::null_mut();
    unsafe { assert_eq!(digred_structure_serialize(a, &mut s), DigredStatus::Ok) };
    let text = unsafe { CStr::from_ptr(s) }.to_str().unwrap().to_string();
    let b = parse(&text);
    assert_eq!(unsafe { digred_structure_size(b) }, 2);

    let mut r = ptr::null_mut();
    let mut g = ptr::null_mut();
    let mut gs = ptr::null_mut();
    unsafe {
        digred_reduction_new(a, &mut r);
        digred_reduction_digraph(r, &mut g);
        assert_eq!(digred_digraph_serialize(g, &mut gs), DigredStatus::Ok);
        let mut g2 = ptr::null_mut();
        assert_eq!(digred_digraph_parse(gs, &mut g2), DigredStatus::Ok);
        assert_eq!(digred_digraph_vertex_count(g2), 24);
        digred_digraph_free(g2);
        digred_string_free(gs);
        digred_digraph_free(g);
        digred_reduction_free(r);
        digred_string_free(s);
        digred_structure_free(a);
        digred_structure_free(b);
    }
}

#[test]
fn errors_are_reported() {
    let bad = CString::new("structure S\ndomain 0\nrelation R 2\ntuple 0 9\nend\n").unwrap();
    let mut out = ptr::null_mut();
    assert_eq!(
        unsafe { digred_structure_parse(bad.as_ptr(), &mut out) },
        DigredStatus::Parse
    );
    assert!(out.is_null());
    assert!(last_error().contains('9'));

    assert_eq!(
        unsafe { digred_structure_parse(ptr::null(), &mut out) },
        DigredStatus::NullPointer
    );
    let a = parse(TWO_CYCLE);
    assert_eq!(
        unsafe { digred_reduction_new(a, ptr::null_mut()) },
        DigredStatus::NullPointer
    );
    assert_eq!(
        unsafe { digred_solve(ptr::null(), a) },
        DigredStatus::NullPointer
    );

    // reversal needs a template without constant tuples
    let trivial = parse("structure T\ndomain 0 1\nrelation R 2\ntuple 0 0\ntuple 0 1\nend\n");
    let mut r = ptr::null_mut();
    let mut g = ptr::null_mut();
    let mut b = ptr::null_mut();
    unsafe {
        assert_eq!(digred_reduction_new(trivial, &mut r), DigredStatus::Ok);
        digred_reduction_digraph(r, &mut g);
        assert_eq!(
            digred_reverse(r, g, &mut b, ptr::null_mut()),
            DigredStatus::Precondition
        );
        digred_digraph_free(g);
        digred_reduction_free(r);
        digred_structure_free(trivial);
        digred_structure_free(a);
        digred_string_free(ptr::null_mut());
    }
}

#[test]
fn header_lists_the_api() {
    let h =
        std::fs::read_to_string(concat!(env!("CARGO_MANIFEST_DIR"), "/include/digred.h")).unwrap();
    for f in [
        "digred_structure_parse",
        "digred_reduction_new",
        "digred_forward",
        "digred_reverse",
        "digred_solve",
        "digred_last_error",
        "digred_string_free",
        "typedef struct DigredStructure DigredStructure",
    ] {
        assert!(h.contains(f), "{f}");
    }
    let v = unsafe { CStr::from_ptr(digred_version()) };
    assert_eq!(v.to_str().unwrap(), env!("CARGO_PKG_VERSION"));
}
