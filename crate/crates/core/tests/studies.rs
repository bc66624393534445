use std::process::Command;

use dpg_elasticity::dpg::SolverOptions;
use dpg_elasticity::material::{problem_lshape, problem_smooth_square, LameParams};
use dpg_elasticity::study::{locking_ratios, run_convergence, run_locking, run_lshape, RefinementMode, CSV_HEADER};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_dpg-elasticity"))
}

#[test]
fn convergence_records_are_monotone() {
    let p = problem_smooth_square(LameParams::new(1.0, 1.0).unwrap());
    let r = run_convergence(&p, 0, 0, 4, true, &SolverOptions::default()).unwrap();
    assert_eq!(r.len(), 4);
    assert!(r[0].eoc_u.is_nan());
    for w in r.windows(2) {
        assert!(w[1].ndof > w[0].ndof);
        assert!(w[1].hmax < w[0].hmax);
        assert!(w[1].err_u < w[0].err_u);
    }
    for rec in &r {
        for e in [rec.err_u, rec.err_post, rec.err_proj, rec.err_gap, rec.eta] {
            assert!(e >= 0.0);
        }
        assert!(rec.err_u_aug.is_nan());
    }
    let last = r.last().unwrap();
    // supercloseness: the gap converges one order faster than the error
    assert!(last.eoc_gap >= last.eoc_u + 0.7);
}

#[test]
fn augmented_column_only_for_j1() {
    let p = problem_smooth_square(LameParams::new(1.0, 1.0).unwrap());
    let r = run_convergence(&p, 0, 1, 2, false, &SolverOptions::default()).unwrap();
    assert!(r.iter().all(|x| x.err_u_aug == x.err_u));
    assert!(r.iter().all(|x| x.err_post.is_nan()));
}

#[test]
fn convergence_requires_exact_solution() {
    let p = problem_lshape(1.0, 0.4).unwrap();
    assert!(run_convergence(&p, 0, 0, 2, false, &SolverOptions::default()).is_err());
}

#[test]
fn locking_smoke() {
    let runs = run_locking(&[0.3, 0.4999], 1e5, 1, 0, 3, false, &SolverOptions::default()).unwrap();
    assert_eq!(runs.len(), 2);
    let ratios = locking_ratios(&runs);
    assert!(*ratios.last().unwrap() <= 3.0);
    assert!(run_locking(&[0.5], 1e5, 1, 0, 2, false, &SolverOptions::default()).is_err());
}

#[test]
fn lshape_uniform_records() {
    let p = problem_lshape(1.0, 0.4).unwrap();
    let s = run_lshape(&p, RefinementMode::Uniform, 0.5, 3, 0, 0, false, &SolverOptions::default()).unwrap();
    assert_eq!(s.records.len(), 3);
    assert!(s.records.iter().all(|r| r.err_u.is_nan() && r.eta > 0.0));
    assert!(s.slope < 0.0);
}

#[test]
fn cli_convergence_csv_is_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let mut outputs = Vec::new();
    for name in ["a.csv", "b.csv"] {
        let path = dir.path().join(name);
        let status = bin()
            .args(["convergence", "--problem", "smooth-square", "--k", "0", "--j", "0", "--levels", "3", "--post", "--out"])
            .arg(&path)
            .status()
            .unwrap();
        assert!(status.success());
        outputs.push(std::fs::read(&path).unwrap());
    }
    assert_eq!(outputs[0], outputs[1]);
    let text = String::from_utf8(outputs.pop().unwrap()).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next().unwrap(), CSV_HEADER);
    assert_eq!(lines.count(), 3);
    assert!(!text.contains('\r'));
}

#[test]
fn cli_global_flags_and_errors() {
    let out = bin()
        .args(["--solver", "cg", "--tol", "1e-11", "--threads", "1"])
        .args(["lshape", "--mode", "adaptive", "--theta", "0.5", "--steps", "3", "--k", "0", "--j", "0"])
        .output()
        .unwrap();
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    assert_eq!(text.lines().count(), 4);

    let out = bin()
        .args(["locking", "--nu", "0.3,0.49", "--E", "1e5", "--k", "0", "--j", "1", "--levels", "2"])
        .output()
        .unwrap();
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.starts_with("nu,level,"));
    assert_eq!(text.lines().count(), 5);

    let bad = bin()
        .args(["convergence", "--problem", "disk", "--k", "0", "--levels", "2"])
        .output()
        .unwrap();
    assert!(!bad.status.success());
    let bad = bin()
        .args(["convergence", "--problem", "smooth-square", "--k", "0", "--j", "2", "--levels", "2"])
        .output()
        .unwrap();
    assert!(!bad.status.success());
}
