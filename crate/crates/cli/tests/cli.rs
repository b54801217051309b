//! End-to-end runs of the binary.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use laguerre_dg::coupled::{rest_ghost, run_simulation, CoupledState};
use laguerre_dg::dg::project_dg;
use laguerre_dg_cli::scenario::{CoupledRun, Damping, Physics};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_laguerre-dg"))
}

fn configs() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("examples/configs")
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn read(dir: &Path, name: &str) -> String {
    fs::read_to_string(dir.join(name)).unwrap_or_else(|e| panic!("{name}: {e}"))
}

#[test]
fn modal_spectrum_example() {
    let tmp = tempfile::tempdir().unwrap();
    let out = tmp.path().to_str().unwrap();
    let o = run(&[
        "spectrum", "--form", "weak_modal", "--basis", "functions", "--direction", "outflow", "--beta", "1",
        "--M", "50", "--u", "-1", "--output", out,
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let csv = read(tmp.path(), "spectrum.csv");
    let mut lines = csv.lines();
    assert_eq!(lines.next(), Some("re,im"));
    let rows: Vec<&str> = lines.collect();
    assert_eq!(rows.len(), 51);
    assert!(rows.iter().all(|&r| r == "-5.00000000e-1,0.00000000e0"), "{rows:?}");
    let summary = read(tmp.path(), "summary.txt");
    assert!(summary.contains("\"stable\": true") && summary.contains("\"max_real_part\": -5.00000000e-1"));

    // the shipped config gives the same files
    let tmp2 = tempfile::tempdir().unwrap();
    let cfg = configs().join("modal_spectrum.toml");
    let o = run(&["run", "--config", cfg.to_str().unwrap(), "--output", tmp2.path().to_str().unwrap()]);
    assert!(o.status.success());
    assert_eq!(csv, read(tmp2.path(), "spectrum.csv"));
}

#[test]
fn rule_example() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = configs().join("rule.toml");
    let o = run(&["run", "--config", cfg.to_str().unwrap(), "--output", tmp.path().to_str().unwrap()]);
    assert!(o.status.success());
    assert_eq!(read(tmp.path(), "rule.csv"), "node,weight\n1.00000000e0,1.00000000e0\n");

    let o = run(&["rule", "--nodes", "glr", "--beta", "2", "--M", "4", "--output", tmp.path().to_str().unwrap()]);
    assert!(o.status.success());
    let csv = read(tmp.path(), "rule.csv");
    assert_eq!(csv.lines().count(), 6);
    assert!(csv.lines().nth(1).unwrap().starts_with("0.00000000e0,"));
}

#[test]
fn runs_are_deterministic_and_manifests_replay() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    let c = tempfile::tempdir().unwrap();
    let cfg = configs().join("table4.toml");
    let small = "rows=[{modes=10, cells=40, steps=60, beta=0.0035714285714285713}, {modes=12, cells=40, steps=60, beta=0.004}]";
    for (dir, jobs) in [(&a, "1"), (&b, "2")] {
        let o = run(&[
            "run", "--config", cfg.to_str().unwrap(), "--override", small, "--override", "final_time=300.0",
            "--jobs", jobs, "--output", dir.path().to_str().unwrap(),
        ]);
        assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    }
    let manifest = a.path().join("manifest.toml");
    let o = run(&["run", "--config", manifest.to_str().unwrap(), "--output", c.path().to_str().unwrap()]);
    assert!(o.status.success());
    for name in ["results.csv", "snapshot_0.csv", "snapshot_1.csv", "manifest.toml"] {
        let first = fs::read(a.path().join(name)).unwrap();
        assert_eq!(first, fs::read(b.path().join(name)).unwrap(), "{name} differs across jobs");
        assert_eq!(first, fs::read(c.path().join(name)).unwrap(), "{name} differs on replay");
    }
}

#[test]
fn bad_configs_exit_with_2() {
    let tmp = tempfile::tempdir().unwrap();
    let out = tmp.path().to_str().unwrap();
    let cfg = configs().join("table4.toml");
    let cases: [&[&str]; 4] = [
        &["run", "--config", cfg.to_str().unwrap(), "--override", "bogus=1", "--output", out],
        &["spectrum", "--M", "500", "--output", out],
        &["spectrum", "--direction", "inflow", "--u", "-1", "--output", out],
        &["run", "--config", "/nonexistent.toml", "--output", out],
    ];
    for args in cases {
        let o = run(args);
        assert_eq!(o.status.code(), Some(2), "{args:?}: {}", String::from_utf8_lossy(&o.stderr));
    }
}

#[test]
fn blow_up_exits_with_3_and_keeps_the_last_good_state() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = configs().join("table4.toml");
    // CFL far above the RK3 limit
    let o = run(&[
        "run", "--config", cfg.to_str().unwrap(), "--override",
        "rows=[{modes=10, cells=100, steps=400, beta=0.0035714285714285713}]", "--override", "final_time=2e6",
        "--output", tmp.path().to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(3), "{}", String::from_utf8_lossy(&o.stderr));
    let snap = read(tmp.path(), "last_good.csv");
    assert!(snap.starts_with("x,h,u\n") && snap.lines().count() > 1);
}

/// The absorption config with N = 40, Nx = 400. At the configured final time the
/// left-going crest is still inside, so the bound is checked once both
/// crests have had time to leave: twice that time.
#[test]
fn damped_layer_empties_the_finite_domain() {
    let physics = Physics::default();
    let run = CoupledRun {
        physics,
        damping: Some(Damping::default()),
        length: 10_000.0,
        cells: 400,
        degree: 1,
        modes: 40,
        beta: 1.0 / 280.0,
    };
    let (problem, _) = run.problem(rest_ghost(2)).unwrap();
    let bump = |x: f64| (-((x - 7500.0) / 500.0).powi(2)).exp();
    let dg = project_dg(|k, x| if k == 0 { bump(x) } else { 0.0 }, 2, &problem.mesh, 1).unwrap();
    let shift = problem.mesh.right();
    let semi = problem.modal.project(|k, z| if k == 0 { bump(shift + z) } else { 0.0 }, 2, shift).unwrap();
    let y0 = problem.join(&CoupledState { dg, semi, t: 0.0 });
    let energy = |y: &[f64]| -> f64 {
        let s = problem.split(y, 0.0).unwrap();
        (0..problem.mesh.len())
            .map(|m| {
                let dz = problem.mesh.sizes()[m];
                let h: f64 = s.dg.modes(m, 0).iter().map(|v| v * v).sum();
                let u: f64 = s.dg.modes(m, 1).iter().map(|v| v * v).sum();
                0.5 * dz * (physics.grav * h + physics.depth * u)
            })
            .sum()
    };
    let e0 = energy(&y0);
    let t = 10_000.0 / (2.0 * physics.speed());
    let dt = t / 600.0;
    let y = run_simulation(&problem, y0, 0.0, dt, 1200, |_, _, _| {}).unwrap();
    let e = energy(&y);
    assert!(e < 1e-4 * e0, "{e} vs {e0}");
}
