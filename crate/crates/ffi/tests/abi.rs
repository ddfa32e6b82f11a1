use std::ffi::{CStr, CString};
use std::ptr;

use ergm_ffi::*;

fn last_error() -> String {
    unsafe { CStr::from_ptr(ergm_last_error()) }.to_string_lossy().into_owned()
}

#[test]
fn graph_roundtrip_through_snapshot() {
    unsafe {
        let pairs: [usize; 6] = [0, 1, 1, 2, 2, 0];
        let mut g = ptr::null_mut();
        assert_eq!(ergm_graph_from_edges(4, pairs.as_ptr(), 3, &mut g), ErgmStatus::Ok);
        let mut m = 0usize;
        assert_eq!(ergm_graph_edge_count(g, &mut m), ErgmStatus::Ok);
        assert_eq!(m, 3);

        let mut len = 0usize;
        assert_eq!(ergm_graph_to_snapshot(g, ptr::null_mut(), 0, &mut len), ErgmStatus::Ok);
        let mut small = vec![0u8; len - 1];
        assert_eq!(ergm_graph_to_snapshot(g, small.as_mut_ptr(), small.len(), &mut len), ErgmStatus::BufferTooSmall);
        let mut buf = vec![0u8; len];
        assert_eq!(ergm_graph_to_snapshot(g, buf.as_mut_ptr(), buf.len(), &mut len), ErgmStatus::Ok);
        assert_eq!(&buf[..4], b"ERGX");

        let mut h = ptr::null_mut();
        assert_eq!(ergm_graph_from_snapshot(buf.as_ptr(), buf.len(), &mut h), ErgmStatus::Ok);
        let mut present = false;
        assert_eq!(ergm_graph_has_edge(h, 2, 0, &mut present), ErgmStatus::Ok);
        assert!(present);
        assert_eq!(ergm_graph_has_edge(h, 3, 0, &mut present), ErgmStatus::Ok);
        assert!(!present);

        buf[0] = b'X';
        let mut bad = ptr::null_mut();
        assert_eq!(ergm_graph_from_snapshot(buf.as_ptr(), buf.len(), &mut bad), ErgmStatus::Snapshot);
        assert!(bad.is_null());
        assert!(last_error().contains("magic"), "{}", last_error());

        ergm_graph_free(g);
        ergm_graph_free(h);
    }
}

#[test]
fn snapshot_files() {
    let dir = tempfile::tempdir().unwrap();
    let path = CString::new(dir.path().join("g.ergx").to_str().unwrap()).unwrap();
    unsafe {
        let mut g = ptr::null_mut();
        assert_eq!(ergm_graph_gnp(30, 0.3, 7, 0, &mut g), ErgmStatus::Ok);
        assert_eq!(ergm_graph_write_snapshot(g, path.as_ptr()), ErgmStatus::Ok);
        let mut h = ptr::null_mut();
        assert_eq!(ergm_graph_read_snapshot(path.as_ptr(), &mut h), ErgmStatus::Ok);
        let (mut a, mut b) = (0usize, 0usize);
        ergm_graph_edge_count(g, &mut a);
        ergm_graph_edge_count(h, &mut b);
        assert_eq!(a, b);
        let missing = CString::new(dir.path().join("none.ergx").to_str().unwrap()).unwrap();
        let mut z = ptr::null_mut();
        assert_eq!(ergm_graph_read_snapshot(missing.as_ptr(), &mut z), ErgmStatus::Io);
        ergm_graph_free(g);
        ergm_graph_free(h);
    }
}

#[test]
fn argument_errors() {
    unsafe {
        let mut g = ptr::null_mut();
        assert_eq!(ergm_graph_new_empty(0, &mut g), ErgmStatus::InvalidArgument);
        assert_eq!(ergm_graph_new_empty(5, ptr::null_mut()), ErgmStatus::NullPointer);
        assert_eq!(ergm_graph_new_empty(5, &mut g), ErgmStatus::Ok);
        let mut changed = false;
        assert_eq!(ergm_graph_set_edge(g, 1, 1, true, &mut changed), ErgmStatus::InvalidArgument);
        assert_eq!(ergm_graph_set_edge(g, 1, 9, true, &mut changed), ErgmStatus::InvalidArgument);
        assert!(last_error().contains("out of range"), "{}", last_error());
        assert_eq!(ergm_graph_set_edge(g, 1, 3, true, &mut changed), ErgmStatus::Ok);
        assert!(changed);
        assert_eq!(ergm_graph_set_edge(g, 3, 1, true, ptr::null_mut()), ErgmStatus::Ok);
        let mut d = 0usize;
        assert_eq!(ergm_graph_degree(g, 3, &mut d), ErgmStatus::Ok);
        assert_eq!(d, 1);
        assert_eq!(ergm_graph_n(ptr::null(), &mut d), ErgmStatus::NullPointer);
        let mut x = 0.0;
        let bad = CString::new("pentagram").unwrap();
        assert_eq!(ergm_hom_density(g, bad.as_ptr(), &mut x), ErgmStatus::InvalidArgument);
        let mut m = ptr::null_mut();
        assert_eq!(ergm_model_edge_triangle(6, -1.0, 1.0, &mut m), ErgmStatus::Ok);
        assert_eq!(ergm_hamiltonian(m, g, &mut x), ErgmStatus::InvalidArgument);
        ergm_model_free(m);
        ergm_graph_free(g);
        ergm_graph_free(ptr::null_mut());
    }
}

#[test]
fn densities_and_conditionals() {
    unsafe {
        let pairs: [usize; 6] = [0, 1, 1, 2, 2, 0];
        let mut g = ptr::null_mut();
        ergm_graph_from_edges(3, pairs.as_ptr(), 3, &mut g);
        let tri = CString::new("triangle").unwrap();
        let mut t = 0.0;
        assert_eq!(ergm_hom_density(g, tri.as_ptr(), &mut t), ErgmStatus::Ok);
        assert!((t - 6.0 / 27.0).abs() < 1e-15);

        // edge-only model: conditional probability is σ(2β₀) whatever the graph
        let beta = [0.7f64];
        let mut m = ptr::null_mut();
        assert_eq!(ergm_model_new(3, beta.as_ptr(), 1, ptr::null(), 0, &mut m), ErgmStatus::Ok);
        let mut p = 0.0;
        assert_eq!(ergm_conditional_prob(m, g, 0, 2, &mut p), ErgmStatus::Ok);
        assert!((p - 1.0 / (1.0 + (-1.4f64).exp())).abs() < 1e-14, "{p}");
        ergm_model_free(m);

        let specs = [CString::new("triangle").unwrap(), CString::new("k_star:2").unwrap()];
        let ptrs: Vec<_> = specs.iter().map(|s| s.as_ptr()).collect();
        let beta = [0.1, 0.2, 0.3];
        assert_eq!(ergm_model_new(3, beta.as_ptr(), 3, ptrs.as_ptr(), 2, &mut m), ErgmStatus::Ok);
        ergm_model_free(m);
        assert_eq!(ergm_model_new(3, beta.as_ptr(), 3, ptrs.as_ptr(), 1, &mut m), ErgmStatus::InvalidArgument);
        ergm_graph_free(g);
    }
}

#[test]
fn landscape_and_tergm() {
    unsafe {
        let mut m = ptr::null_mut();
        ergm_model_edge_triangle(10, -1.8, 2.0, &mut m);
        let mut s = ErgmLandscape { regime: ErgmRegime::High, num_maxima: 0, p_star: 0.0, endpoint_supremum: 0.0 };
        let mut maxima = [ErgmLocalMax { p: 0.0, value: 0.0, second: 0.0, is_global: false, is_degenerate: false }; 4];
        assert_eq!(ergm_landscape_analyze(m, &mut s, maxima.as_mut_ptr(), maxima.len()), ErgmStatus::Ok);
        assert_eq!(s.regime, ErgmRegime::Low);
        assert_eq!(s.num_maxima, 2);
        assert!((s.p_star - 0.999_773_960_712_445_2).abs() < 1e-9, "{}", s.p_star);
        assert!(maxima[..2].iter().any(|m| m.is_global));
        assert_eq!(ergm_landscape_analyze(m, &mut s, ptr::null_mut(), 0), ErgmStatus::Ok);
        ergm_model_free(m);

        let mut sol = ErgmTergmSolution { p1: 0.0, p2: 0.0, q: 0.0 };
        assert_eq!(ergm_solve_tergm(-1.8, 2.0, &mut sol), ErgmStatus::Ok);
        assert!((sol.q - 0.044_554_300_947_563_99).abs() < 1e-9);
        assert_eq!(ergm_solve_tergm(1.5, 0.1, &mut sol), ErgmStatus::NoSolution);
    }
}

#[test]
fn chain_is_reproducible() {
    unsafe {
        let mut m = ptr::null_mut();
        ergm_model_edge_triangle(20, -0.5, 0.8, &mut m);
        let mut g = ptr::null_mut();
        ergm_graph_gnp(20, 0.3, 1, 0, &mut g);
        let run = |seed: u64| {
            let mut c = ptr::null_mut();
            assert_eq!(ergm_chain_new(m, g, seed, 3, &mut c), ErgmStatus::Ok);
            let (mut u, mut v, mut present) = (0usize, 0usize, false);
            assert_eq!(ergm_chain_step(c, &mut u, &mut v, &mut present), ErgmStatus::Ok);
            assert!(u < v && v < 20);
            assert_eq!(ergm_chain_run(c, 4999), ErgmStatus::Ok);
            let mut steps = 0u64;
            ergm_chain_steps(c, &mut steps);
            assert_eq!(steps, 5000);
            let mut out = ptr::null_mut();
            assert_eq!(ergm_chain_graph(c, &mut out), ErgmStatus::Ok);
            let mut len = 0usize;
            ergm_graph_to_snapshot(out, ptr::null_mut(), 0, &mut len);
            let mut buf = vec![0u8; len];
            ergm_graph_to_snapshot(out, buf.as_mut_ptr(), len, &mut len);
            ergm_graph_free(out);
            ergm_chain_free(c);
            buf
        };
        assert_eq!(run(11), run(11));
        assert_ne!(run(11), run(12));
        ergm_graph_free(g);
        ergm_model_free(m);
    }
}

#[test]
fn version_string() {
    let v = unsafe { CStr::from_ptr(ergm_version()) }.to_str().unwrap();
    assert_eq!(v, env!("CARGO_PKG_VERSION"));
}

#[test]
fn header_declares_every_export() {
    let header = std::fs::read_to_string(concat!(env!("CARGO_MANIFEST_DIR"), "/include/ergm.h")).unwrap();
    let src = std::fs::read_to_string(concat!(env!("CARGO_MANIFEST_DIR"), "/src/lib.rs")).unwrap();
    let exports: Vec<&str> = src
        .lines()
        .filter_map(|l| l.split("extern \"C\" fn ").nth(1))
        .map(|rest| rest.split('(').next().unwrap())
        .collect();
    assert!(exports.len() > 20);
    for name in exports {
        assert!(header.contains(&format!("{name}(")), "{name} missing from header");
    }
}

#[test]
fn header_compiles_as_c() {
    let Ok(cc) = which_cc() else { return };
    let dir = tempfile::tempdir().unwrap();
    let src = dir.path().join("t.c");
    std::fs::write(&src, "#include \"ergm.h\"\nint main(void){ErgmGraph*g=0;return ergm_graph_new_empty(3,&g);}\n").unwrap();
    let status = std::process::Command::new(cc)
        .args(["-std=c99", "-Wall", "-Werror", "-fsyntax-only", "-I"])
        .arg(concat!(env!("CARGO_MANIFEST_DIR"), "/include"))
        .arg(&src)
        .status()
        .unwrap();
    assert!(status.success());
}

fn which_cc() -> Result<&'static str, ()> {
    for cc in ["cc", "gcc", "clang"] {
        if std::process::Command::new(cc).arg("--version").output().is_ok() {
            return Ok(cc);
        }
    }
    Err(())
}
