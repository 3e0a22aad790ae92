use std::ffi::CStr;
use std::path::{Path, PathBuf};
use std::process::Command;
use std::ptr;

use slfib_ffi::*;

fn last_error() -> String {
    let p = slfib_last_error();
    assert!(!p.is_null());
    unsafe { CStr::from_ptr(p) }.to_string_lossy().into_owned()
}

fn disc(h: f64) -> *mut SlfibGrid {
    let mut g = ptr::null_mut();
    assert_eq!(slfib_grid_new_ellipse(1.0, 1.0, h, &mut g), SlfibStatus::Ok);
    g
}

fn trig(cos: &[f64], sin: &[f64]) -> *mut SlfibBoundary {
    let mut phi = ptr::null_mut();
    let st = unsafe { slfib_boundary_new_trig(cos.as_ptr(), cos.len(), sin.as_ptr(), sin.len(), &mut phi) };
    assert_eq!(st, SlfibStatus::Ok);
    phi
}

#[test]
fn version_and_errors() {
    let v = unsafe { CStr::from_ptr(slfib_version()) };
    assert_eq!(v.to_str().unwrap(), env!("CARGO_PKG_VERSION"));

    let mut g = ptr::null_mut();
    assert_eq!(slfib_grid_new_ellipse(-1.0, 1.0, 0.1, &mut g), SlfibStatus::InvalidArgument);
    assert!(g.is_null());
    assert!(last_error().contains("semi-axes"));
    assert_eq!(slfib_grid_new_ellipse(1.0, 1.0, 0.1, ptr::null_mut()), SlfibStatus::NullPointer);
    // a successful call clears the message
    let g = disc(0.1);
    assert!(slfib_last_error().is_null());
    unsafe { slfib_grid_free(g) };
    unsafe { slfib_grid_free(ptr::null_mut()) };
}

#[test]
fn bilinear_data_is_reproduced() {
    let (alpha, beta, gamma) = (0.3, -0.2, 0.7);
    let g = disc(0.1);
    // trace of γx + βy + αxy on the unit circle
    let phi = trig(&[0.0, gamma], &[0.0, beta, 0.5 * alpha]);
    let mut sol = ptr::null_mut();
    let opts = slfib_solve_options_default();
    assert_eq!(unsafe { slfib_solve(g, phi, 1.0, &opts, &mut sol) }, SlfibStatus::Ok);
    let n = unsafe { slfib_grid_value_count(g) };
    let (mut xs, mut ys, mut f) = (vec![0.0; n], vec![0.0; n], vec![0.0; n]);
    unsafe {
        assert_eq!(slfib_grid_positions(g, xs.as_mut_ptr(), ys.as_mut_ptr(), n), SlfibStatus::Ok);
        assert_eq!(slfib_solution_field(sol, SlfibFieldKind::Potential, f.as_mut_ptr(), n), SlfibStatus::Ok);
        assert_eq!(slfib_solution_a(sol), 1.0);
        assert!(!slfib_solution_is_singular(sol));
    }
    for k in 0..n {
        let exact = gamma * xs[k] + beta * ys[k] + alpha * xs[k] * ys[k];
        assert!((f[k] - exact).abs() < 1e-8, "node {k}: {} vs {exact}", f[k]);
    }
    unsafe {
        assert_eq!(slfib_solution_field(sol, SlfibFieldKind::V, f.as_mut_ptr(), 3), SlfibStatus::BufferTooSmall);
        slfib_solution_free(sol);
        slfib_boundary_free(phi);
        slfib_grid_free(g);
    }
}

#[test]
fn singular_solution_and_singularities() {
    let g = disc(0.1);
    let phi = trig(&[0.0, 0.0, 1.0], &[]);
    let mut opts = slfib_solve_options_default();
    opts.a_floor = 1e-3;
    let mut sol = ptr::null_mut();
    unsafe {
        assert_eq!(slfib_solve(g, phi, 0.0, &opts, &mut sol), SlfibStatus::Ok);
        assert!(slfib_solution_is_singular(sol));
        assert_eq!(slfib_solution_a(sol), 1e-3);
        let mut line = true;
        let mut count = 0;
        let mut recs = [SlfibSingularity {
            b: 0.0,
            multiplicity: 0,
            kind: SlfibSingularityKind::Increasing,
        }; 4];
        let st = slfib_find_singularities(sol, 1e-3, &mut line, recs.as_mut_ptr(), recs.len(), &mut count);
        assert_eq!(st, SlfibStatus::Ok);
        assert!(!line);
        assert!(count >= 1);
        assert!(recs[..count].iter().all(|r| r.multiplicity >= 1));
        let st = slfib_find_singularities(sol, 1e-3, &mut line, ptr::null_mut(), 0, &mut count);
        assert_eq!(st, SlfibStatus::BufferTooSmall);
        slfib_solution_free(sol);
        slfib_boundary_free(phi);
        slfib_grid_free(g);
    }
}

#[test]
fn lift_and_fibration_map() {
    let p = slfib_lift_point(1.0, 0.0, 2.0, 5.0, 0.0, 0.0);
    let [a1, b1, a2, b2, x, u] = p.coords;
    assert!((a1 * a1 + b1 * b1 - 5.0).abs() < 1e-12 && (a2 * a2 + b2 * b2 - 5.0).abs() < 1e-12);
    assert_eq!((x, u), (1.0, 2.0));

    let q = SlfibPoint {
        coords: [0.0, 0.0, 0.0, 0.0, 0.3, -1.1],
    };
    let (mut a, mut br, mut bi) = (f64::NAN, f64::NAN, f64::NAN);
    assert_eq!(unsafe { slfib_fibration_map(&q, &mut a, &mut br, &mut bi) }, SlfibStatus::Ok);
    assert_eq!((a, br, bi), (0.0, 0.3, -1.1));
    assert_eq!(
        unsafe { slfib_fibration_map(ptr::null(), &mut a, &mut br, &mut bi) },
        SlfibStatus::NullPointer
    );
}

fn target_dir() -> PathBuf {
    // tests run from target/<profile>/deps
    let exe = std::env::current_exe().unwrap();
    exe.parent().unwrap().parent().unwrap().to_path_buf()
}

#[test]
fn header_matches_exports() {
    let header = std::fs::read_to_string(Path::new(env!("CARGO_MANIFEST_DIR")).join("include/slfib.h")).unwrap();
    for sym in [
        "slfib_last_error",
        "slfib_grid_new_ellipse",
        "slfib_boundary_new_trig",
        "slfib_solve",
        "slfib_solution_field",
        "slfib_find_singularities",
        "slfib_lift_point",
        "slfib_fibration_map",
        "typedef struct SlfibSolution SlfibSolution;",
        "SLFIB_STATUS_OK = 0",
    ] {
        assert!(header.contains(sym), "header lacks {sym}");
    }
}

#[test]
fn c_program_links_against_static_library() {
    let lib = target_dir().join("libslfib_ffi.a");
    if !lib.is_file() {
        eprintln!("skipping: {} not built", lib.display());
        return;
    }
    let dir = Path::new(env!("CARGO_MANIFEST_DIR"));
    let tmp = tempfile::tempdir().unwrap();
    let exe = tmp.path().join("c_smoke");
    let cc = Command::new("cc")
        .arg(dir.join("tests/c_smoke.c"))
        .arg("-I")
        .arg(dir.join("include"))
        .arg(&lib)
        .args(["-lpthread", "-ldl", "-lm", "-o"])
        .arg(&exe)
        .output();
    let Ok(cc) = cc else {
        eprintln!("skipping: no C compiler");
        return;
    };
    assert!(cc.status.success(), "{}", String::from_utf8_lossy(&cc.stderr));
    let run = Command::new(&exe).output().unwrap();
    assert!(run.status.success(), "{}", String::from_utf8_lossy(&run.stderr));
    assert!(String::from_utf8_lossy(&run.stdout).starts_with("values "));
}
