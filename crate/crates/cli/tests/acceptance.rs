//! Acceptance suite: one PASS/FAIL line per criterion (and per sub-check),
//! with the measured numbers next to the bound.
//!
//! Runs without the libtest harness. It exits 0 after printing the report so
//! the rest of the workspace tests still run; set `ACCEPTANCE_STRICT=1` to
//! exit 1 when any line fails.

use std::path::Path;
use std::process::ExitCode;
use std::time::{Duration, Instant};

use laguerre_dg::advection::{assemble, Direction, Form, SchemeVariant};
use laguerre_dg::basis::{BasisKind, BasisSpec};
use laguerre_dg::linalg::Matrix;
use laguerre_dg::modal::{ModalDiscretization, ModalState};
use laguerre_dg::quadrature::{build_rule, NodeKind};
use laguerre_dg::spectrum::{classify, eigenvalues, DEFAULT_STABILITY_TOL};
use laguerre_dg::swe::{swe_system, SweConfig};
use laguerre_dg::system::{flux_split, HyperbolicSystem};
use laguerre_dg::time::rk3_step;
use laguerre_dg_cli::config::{self, Scenario};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use BasisKind::{LaguerreFunctions as Fun, LaguerrePolynomials as Poly};

#[derive(Default)]
struct Report {
    failed: usize,
}

impl Report {
    fn line(&mut self, id: &str, pass: bool, what: &str) {
        if !pass {
            self.failed += 1;
        }
        println!("{} {id:<4} {what}", if pass { "PASS" } else { "FAIL" });
    }

    /// Runs `f`, prints its sub-check lines, then the criterion line with
    /// the runtime against its budget.
    fn criterion(&mut self, id: &str, title: &str, budget: Duration, f: impl FnOnce(&mut Vec<(bool, String)>)) {
        let start = Instant::now();
        let mut checks = Vec::new();
        f(&mut checks);
        let took = start.elapsed();
        for (i, (pass, what)) in checks.iter().enumerate() {
            self.line(&format!("{id}.{}", i + 1), *pass, what);
        }
        let all = checks.iter().all(|c| c.0);
        let in_time = took <= budget;
        self.line(
            id,
            all && in_time,
            &format!(
                "{title} ({} of {} sub-checks, {:.1} s of {} s)",
                checks.iter().filter(|c| c.0).count(),
                checks.len(),
                took.as_secs_f64(),
                budget.as_secs()
            ),
        );
    }
}

fn load(name: &str) -> Scenario {
    let path = Path::new(env!("CARGO_MANIFEST_DIR")).join("examples/configs").join(name);
    let text = std::fs::read_to_string(&path).expect("config present");
    config::load(&text, &[]).expect("config valid").scenario
}

fn variant(form: Form, basis: BasisKind, nodes: NodeKind, u: f64) -> SchemeVariant<f64> {
    let dir = if u > 0.0 {
        Direction::Inflow { boundary_value: 0.0 }
    } else {
        Direction::Outflow
    };
    SchemeVariant::new(form, basis, nodes, dir)
}

const BETAS: [f64; 3] = [0.5, 1.0, 2.0];
const MODES: [usize; 3] = [10, 25, 50];

fn criterion_1(out: &mut Vec<(bool, String)>) {
    let stable = [
        (Form::StrongCollocation, Fun, NodeKind::Glr),
        (Form::WeakNodal, Fun, NodeKind::Glr),
        (Form::WeakNodal, Poly, NodeKind::Glr),
        (Form::WeakModal, Fun, NodeKind::Glr),
        (Form::WeakModal, Poly, NodeKind::Glr),
    ];
    for (form, basis, nodes) in stable {
        for u in [1.0, -1.0] {
            let mut bad = Vec::new();
            let mut worst = f64::NEG_INFINITY;
            for beta in BETAS {
                for m in MODES {
                    let v = variant(form, basis, nodes, u);
                    let r = classify(&assemble(&v, beta, m, u).unwrap(), DEFAULT_STABILITY_TOL).unwrap();
                    worst = worst.max(r.max_real_part);
                    if !r.stable {
                        bad.push(format!("beta={beta} M={m}"));
                    }
                }
            }
            let label = variant(form, basis, nodes, u).label();
            out.push((
                bad.is_empty(),
                format!("{label} stable on all 9 (beta, M): max Re = {worst:.3e}{}", unstable_list(&bad)),
            ));
        }
    }
    let mut bad = Vec::new();
    let mut least = f64::INFINITY;
    for beta in BETAS {
        for m in MODES {
            let v = variant(Form::StrongCollocation, Poly, NodeKind::Glr, -1.0);
            let r = classify(&assemble(&v, beta, m, -1.0).unwrap(), DEFAULT_STABILITY_TOL).unwrap();
            least = least.min(r.max_real_part);
            if r.stable {
                bad.push(format!("beta={beta} M={m}"));
            }
        }
    }
    out.push((
        bad.is_empty(),
        format!("StrongCollocation/Polynomials outflow unstable on all 9: smallest max Re = {least:.3e}"),
    ));
    for basis in [Fun, Poly] {
        let mut bad = Vec::new();
        let mut least = f64::INFINITY;
        for beta in BETAS {
            for m in MODES {
                let v = variant(Form::WeakNodal, basis, NodeKind::Gl, -1.0);
                let r = classify(&assemble(&v, beta, m, -1.0).unwrap(), DEFAULT_STABILITY_TOL).unwrap();
                least = least.min(r.spectral_radius);
                if r.spectral_radius < 1e10 {
                    bad.push(format!("beta={beta} M={m} rho={:.2e}", r.spectral_radius));
                }
            }
        }
        out.push((
            bad.is_empty(),
            format!("WeakNodal/{basis:?}/Gl outflow spectral radius >= 1e10: smallest {least:.3e}{}", unstable_list(&bad)),
        ));
    }
}

fn unstable_list(bad: &[String]) -> String {
    if bad.is_empty() {
        String::new()
    } else {
        format!("; failing at {}", bad.join(", "))
    }
}

fn criterion_2(out: &mut Vec<(bool, String)>) {
    let mut worst = [0.0f64; 3];
    for beta in BETAS {
        for m in MODES {
            for u in [1.0f64, -1.0] {
                let cases = [
                    (0, Fun, -beta * u.abs() / 2.0),
                    (if u > 0.0 { 1 } else { 2 }, Poly, if u > 0.0 { -beta * u } else { 0.0 }),
                ];
                for (slot, basis, want) in cases {
                    let op = assemble(&variant(Form::WeakModal, basis, NodeKind::Glr, u), beta, m, u).unwrap();
                    for z in eigenvalues(op.matrix()).unwrap() {
                        worst[slot] = worst[slot].max((z - Complex64::new(want, 0.0)).norm());
                    }
                }
            }
        }
    }
    out.push((worst[0] <= 1e-12, format!("WeakModal/Functions all -beta|u|/2: max deviation {:.2e} (<= 1e-12)", worst[0])));
    out.push((worst[1] <= 1e-12, format!("WeakModal/Polynomials inflow all -beta u: max deviation {:.2e} (<= 1e-12)", worst[1])));
    out.push((worst[2] <= 1e-12, format!("WeakModal/Polynomials outflow all 0: max deviation {:.2e} (<= 1e-12)", worst[2])));
}

fn criterion_3(out: &mut Vec<(bool, String)>) {
    let fact = |k: i32| (1..=k).map(f64::from).product::<f64>();
    let gl = build_rule(NodeKind::Gl, Poly, 1.0, 7).unwrap();
    let worst = (0..=15)
        .map(|k| (gl.integrate(|z: f64| z.powi(k)) - fact(k)).abs() / fact(k))
        .fold(0.0, f64::max);
    out.push((worst <= 1e-10, format!("GL M=7 beta=1 moments k! for k <= 15: max rel error {worst:.2e} (<= 1e-10)")));
    let mut worst = 0.0f64;
    for beta in BETAS {
        let glr = build_rule(NodeKind::Glr, Poly, beta, 10).unwrap();
        for k in 0..=20 {
            let exact = fact(k) / beta.powi(k + 1);
            worst = worst.max((glr.integrate(|z: f64| z.powi(k)) - exact).abs() / exact);
        }
    }
    out.push((worst <= 1e-10, format!("GLR M=10 exact to degree 20: max rel error {worst:.2e} (<= 1e-10)")));
}

fn criterion_4(out: &mut Vec<(bool, String)>) {
    let err = |dt: f64| {
        let n = (1.0 / dt).round() as usize;
        let mut y = vec![1.0];
        for s in 0..n {
            y = rk3_step(|_, v: &[f64]| Ok(vec![-v[0]]), &y, s as f64 * dt, dt).unwrap();
        }
        (y[0] - (-1.0f64).exp()).abs()
    };
    let e: Vec<f64> = [0.1, 0.05, 0.025, 0.0125].iter().map(|&dt| err(dt)).collect();
    let ratios: Vec<f64> = e.windows(2).map(|w| w[0] / w[1]).collect();
    let ok = ratios.iter().all(|r| (7.0..=9.0).contains(r));
    out.push((ok, format!("y' = -y on [0, 1], error ratios {ratios:.3?} in [7, 9]")));
}

fn criterion_5(out: &mut Vec<(bool, String)>) {
    let Scenario::Convergence(c) = load("convergence.toml") else {
        panic!("convergence.toml holds a convergence scenario")
    };
    let results: Vec<(f64, f64)> = c.cells.iter().map(|&n| c.run_one(n).unwrap()).collect();
    let orders: Vec<f64> = c.rows(&results).iter().filter_map(|r| r.order).collect();
    let ok = orders.len() >= 3 && orders.iter().all(|&p| p >= 1.9);
    out.push((ok, format!("p=1 DG, cells {:?}: L2 orders {orders:.3?} (>= 1.9)", c.cells)));
}

const INGOING_REFERENCE: [[f64; 6]; 4] = [
    [7.37e-3, 7.37e-3, 8.49e-3, 8.48e-3, 1.10e-2, 1.10e-2],
    [1.58e-2, 1.57e-2, 1.70e-2, 1.70e-2, 1.96e-2, 1.96e-2],
    [3.67e-2, 3.65e-2, 4.14e-2, 4.12e-2, 5.11e-2, 5.09e-2],
    [7.81e-2, 7.78e-2, 8.33e-2, 8.30e-2, 8.57e-2, 8.54e-2],
];

fn criterion_6(out: &mut Vec<(bool, String)>) {
    let Scenario::CouplingValidation(c) = load("table1.toml") else {
        panic!("table1.toml holds a coupling validation scenario")
    };
    let mut ingoing = 0;
    for row in &c.rows {
        let r = c.run_row(row).unwrap();
        // E1(eta), E1(u), E2(eta), E2(u), Einf(eta), Einf(u)
        let got = [r.eta.e1, r.u.e1, r.eta.e2, r.u.e2, r.eta.einf, r.u.einf];
        let tag = format!("x0={} h1={} sigma={}", row.x0, row.h1, row.sigma);
        if r.relative {
            let expected = INGOING_REFERENCE[ingoing];
            ingoing += 1;
            let ok = got.iter().zip(&expected).all(|(g, p)| *g >= p / 3.0 && *g <= p * 3.0);
            out.push((
                ok,
                format!(
                    "ingoing {tag}: relative E1(eta) = {:.3e}, E1(u) = {:.3e}, Einf(eta) = {:.3e}; reference {:.2e}, {:.2e}, {:.2e} (within x3)",
                    got[0], got[1], got[4], expected[0], expected[1], expected[4]
                ),
            ));
        } else {
            let worst = got.iter().copied().fold(0.0, f64::max);
            out.push((worst <= 1e-3, format!("outgoing {tag}: largest absolute error {worst:.3e} (<= 1e-3)")));
        }
    }
}

fn criterion_7(out: &mut Vec<(bool, String)>) {
    let Scenario::GaussianAbsorption(g) = load("table4.toml") else {
        panic!("table4.toml holds a gaussian absorption scenario")
    };
    for row in &g.rows {
        let r = g.run_row(row).unwrap();
        let ok = r.rho <= 1e-2 && r.eta_residual <= 1e-2;
        out.push((
            ok,
            format!(
                "N={} Nx={} steps={}: rho = {:.3e} (<= 1e-2), max |eta - ref| = {:.3e} m (<= 1e-2)",
                row.modes, row.cells, row.steps, r.rho, r.eta_residual
            ),
        ));
    }
}

fn criterion_8(out: &mut Vec<(bool, String)>) {
    for (file, n) in [("table2.toml", 30), ("table3.toml", 15)] {
        let Scenario::Wavetrain(w) = load(file) else {
            panic!("{file} holds a wavetrain scenario")
        };
        assert_eq!(w.modes, n);
        for row in w.rows.iter().filter(|r| r.wavenumber == 30.0 && r.amplitude <= 0.05) {
            let r = w.run_row(row).unwrap();
            out.push((
                r.energy <= 1e-5,
                format!(
                    "N={n}, A={} k={} beta={}: E_EN = {:.3e} (<= 1e-5)",
                    row.amplitude, row.wavenumber, row.beta, r.energy
                ),
            ));
        }
    }
}

fn criterion_9(out: &mut Vec<(bool, String)>) {
    let mut rng = ChaCha8Rng::seed_from_u64(9);

    // modal rhs against the dense Kronecker form
    let mut worst = 0.0f64;
    for (depth, vel, beta, m) in [(1.0, 0.0, 0.0025, 180), (10.0, 1.5, 1.0, 20), (3.0, -2.0, 0.3, 40), (2.0, 4.0, 0.7, 12)] {
        let sys = swe_system(SweConfig::new(depth, vel, 9.81)).unwrap();
        let spec = BasisSpec::functions(beta, m).unwrap();
        let n = m + 1;
        let q: Vec<f64> = (0..2 * n).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let g = [rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)];
        let got = ModalDiscretization::new(spec)
            .unwrap()
            .rhs(&sys, &ModalState::from_coeffs(2, spec, 0.0, q.clone()).unwrap(), &g)
            .unwrap();
        let a = sys.flux(&q, 0.0);
        let b = sys.source(&q, 0.0);
        let (plus, minus) = flux_split(&a, &sys.eigen(&q, 0.0).unwrap()).unwrap();
        let tri = |i: usize, j: usize| if i == j { 0.5 } else if j < i { 1.0 } else { 0.0 };
        let big = Matrix::from_fn(2 * n, 2 * n, |r, c| {
            let (k, i, l, j) = (r / n, r % n, c / n, c % n);
            -beta * a[(k, l)] * tri(i, j) + beta * minus[(k, l)] + if i == j { b[(k, l)] } else { 0.0 }
        });
        let mut want = big.mul_vec(&q).unwrap();
        let pg = plus.mul_vec(&g).unwrap();
        for k in 0..2 {
            want[k * n..(k + 1) * n].iter_mut().for_each(|v| *v += beta * pg[k]);
        }
        let scale = want.iter().fold(1.0f64, |s, v| s.max(v.abs()));
        worst = worst.max(got.iter().zip(&want).map(|(x, y)| (x - y).abs() / scale).fold(0.0, f64::max));
    }
    out.push((worst <= 1e-10, format!("modal rhs vs dense Kronecker oracle: max rel difference {worst:.2e} (<= 1e-10)")));

    // eigensolver: trace and determinant
    let (mut wt, mut wd) = (0.0f64, 0.0f64);
    for n in [3, 5, 8, 8, 8, 12, 20] {
        let a = Matrix::from_fn(n, n, |_, _| rng.gen_range(-1.0..1.0));
        let ev = eigenvalues(&a).unwrap();
        let trace: f64 = (0..n).map(|i| a[(i, i)]).sum();
        let det = a.lu().unwrap().determinant();
        let sum: Complex64 = ev.iter().sum();
        let prod: Complex64 = ev.iter().product();
        wt = wt.max((sum - trace).norm() / trace.abs().max(1.0));
        wd = wd.max((prod - det).norm() / det.abs());
    }
    out.push((wt <= 1e-9 && wd <= 1e-9, format!("eigenvalue sum vs trace {wt:.2e}, product vs determinant {wd:.2e} (<= 1e-9)")));

    // derivative expansions against central differences
    let mut worst = 0.0f64;
    for kind in [Fun, Poly] {
        for beta in BETAS {
            let spec = BasisSpec::new(kind, beta, 12).unwrap();
            for i in 0..=12 {
                let c = match kind {
                    Fun => spec.laguerre_fun_derivative_expansion(i).unwrap(),
                    Poly => spec.laguerre_poly_derivative_expansion(i).unwrap(),
                };
                for _ in 0..10 {
                    let z = rng.gen_range(0.05..10.0) / beta;
                    let h = 1e-5 / beta;
                    let fd = (spec.eval(i, z + h).unwrap() - spec.eval(i, z - h).unwrap()) / (2.0 * h);
                    let ex: f64 = c.iter().enumerate().map(|(k, ck)| ck * spec.eval(k, z).unwrap()).sum();
                    let scale = spec.eval_all(z).unwrap().iter().fold(fd.abs(), |s, v| s.max(beta * v.abs()));
                    worst = worst.max((fd - ex).abs() / scale.max(1e-12));
                }
            }
        }
    }
    out.push((worst <= 1e-6, format!("derivative expansions vs finite differences: max rel difference {worst:.2e} (<= 1e-6)")));
}

fn main() -> ExitCode {
    let mut report = Report::default();
    let s = Duration::from_secs;
    report.criterion("1", "stability verdicts over beta, M and direction", s(30), criterion_1);
    report.criterion("2", "exact weak modal spectra", s(1), criterion_2);
    report.criterion("3", "quadrature exactness", s(1), criterion_3);
    report.criterion("4", "RK3 order", s(1), criterion_4);
    report.criterion("5", "DG convergence", s(30), criterion_5);
    report.criterion("6", "coupling validation", s(300), criterion_6);
    report.criterion("7", "Gaussian absorption", s(300), criterion_7);
    report.criterion("8", "wavetrain energy error", s(600), criterion_8);
    report.criterion("9", "oracle equivalences", s(30), criterion_9);
    println!("acceptance: {} failing line(s)", report.failed);
    let strict = std::env::var("ACCEPTANCE_STRICT").is_ok_and(|v| v == "1");
    if strict && report.failed > 0 {
        ExitCode::FAILURE
    } else {
        ExitCode::SUCCESS
    }
}
