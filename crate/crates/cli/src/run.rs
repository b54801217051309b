//! Executes a validated config and writes its outputs under one directory.

use std::fs;
use std::path::{Path, PathBuf};

use laguerre_dg::advection::{assemble, Direction, SchemeVariant};
use laguerre_dg::quadrature::build_rule;
use laguerre_dg::spectrum::classify;
use rayon::prelude::*;

use crate::config::{DirectionName, ExperimentConfig, OperatorParams, Scenario};
use crate::output::{num, write_csv, write_numeric, write_snapshot};
use crate::scenario::Damping;
use crate::CliError;

/// Files written and one-line messages for the terminal.
#[derive(Debug, Default)]
pub struct Report {
    pub files: Vec<PathBuf>,
    pub lines: Vec<String>,
}

impl Report {
    fn file(&mut self, p: PathBuf) {
        self.files.push(p);
    }
}

pub fn operator(p: &OperatorParams) -> Result<laguerre_dg::SemiDiscreteOperator, CliError> {
    let direction = match p.direction {
        DirectionName::Inflow => Direction::Inflow {
            boundary_value: p.boundary_value,
        },
        DirectionName::Outflow => Direction::Outflow,
    };
    let variant = SchemeVariant::new(p.form.into(), p.basis.into(), p.nodes.into(), direction);
    Ok(assemble(&variant, p.beta, p.modes, p.velocity)?)
}

/// Maps `f` over `items` on `jobs` threads, keeping input order. The first
/// failure in input order wins and its snapshot, if any, goes to
/// `last_good.csv`.
fn fan_out<I: Sync, R: Send>(
    items: &[I],
    jobs: usize,
    out: &Path,
    f: impl Fn(&I) -> Result<R, CliError> + Sync,
) -> Result<Vec<R>, CliError> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(jobs.max(1))
        .build()
        .map_err(|e| CliError::Config(format!("cannot start {jobs} worker threads: {e}")))?;
    let results: Vec<Result<R, CliError>> = pool.install(|| items.par_iter().map(&f).collect());
    let mut ok = Vec::with_capacity(results.len());
    for r in results {
        match r {
            Ok(v) => ok.push(v),
            Err(e) => {
                if let CliError::Numerical {
                    snapshot: Some(s), ..
                } = &e
                {
                    write_snapshot(&out.join("last_good.csv"), s, None)?;
                }
                return Err(e);
            }
        }
    }
    Ok(ok)
}

fn damping_cols(d: &Damping) -> [String; 2] {
    [num(d.l0.unwrap_or(f64::NAN)), num(d.sigma.unwrap_or(f64::NAN))]
}

pub fn execute(cfg: &ExperimentConfig, out: &Path, jobs: usize) -> Result<Report, CliError> {
    cfg.validate()?;
    fs::create_dir_all(out)?;
    let mut report = Report::default();
    let manifest = out.join("manifest.toml");
    fs::write(&manifest, cfg.manifest()?)?;
    report.file(manifest);

    match &cfg.scenario {
        Scenario::Rule(r) => {
            let rule = build_rule(r.nodes.into(), r.basis.into(), r.beta, r.modes)?;
            let rows: Vec<Vec<f64>> = rule
                .nodes()
                .iter()
                .zip(rule.weights())
                .map(|(&z, &w)| vec![z, w])
                .collect();
            let p = out.join("rule.csv");
            write_numeric(&p, &["node", "weight"], &rows)?;
            report.file(p);
        }
        Scenario::Operator(o) => {
            let op = operator(o)?;
            let a = op.matrix();
            let header: Vec<String> = (0..a.cols()).map(|j| format!("c{j}")).collect();
            let header: Vec<&str> = header.iter().map(String::as_str).collect();
            let rows: Vec<Vec<f64>> = (0..a.rows()).map(|i| a.row(i).to_vec()).collect();
            let p = out.join("operator.csv");
            write_numeric(&p, &header, &rows)?;
            report.file(p);
            let rows: Vec<Vec<f64>> = op.forcing().iter().map(|&g| vec![g]).collect();
            let p = out.join("forcing.csv");
            write_numeric(&p, &["g"], &rows)?;
            report.file(p);
            report
                .lines
                .push(format!("dim = {}, dof_offset = {}", op.dim(), op.dof_offset()));
        }
        Scenario::Spectrum(s) => {
            let op = operator(&s.operator())?;
            let rep = classify(&op, s.tol)?;
            let rows: Vec<Vec<f64>> = rep.eigenvalues.iter().map(|z| vec![z.re, z.im]).collect();
            let p = out.join("spectrum.csv");
            write_numeric(&p, &["re", "im"], &rows)?;
            report.file(p);
            let line = format!(
                "{{\"max_real_part\": {}, \"spectral_radius\": {}, \"stable\": {}}}",
                num(rep.max_real_part),
                num(rep.spectral_radius),
                rep.stable
            );
            let p = out.join("summary.txt");
            fs::write(&p, format!("{line}\n"))?;
            report.file(p);
            report.lines.push(line);
        }
        Scenario::CouplingValidation(c) => {
            let results = fan_out(&c.rows, jobs, out, |r| c.run_row(r))?;
            let mut rows = Vec::new();
            for (i, r) in results.iter().enumerate() {
                let kind = if r.relative { "ingoing" } else { "outgoing" };
                let mut row = vec![kind.to_string(), num(r.row.x0), num(r.row.h1), num(r.row.sigma)];
                row.push(r.row.steps.to_string());
                for e in [&r.eta, &r.u] {
                    row.extend([num(e.e1), num(e.e2), num(e.einf)]);
                }
                row.push(num(r.cfl));
                rows.push(row);
                write_snapshot(&out.join(format!("snapshot_{i}.csv")), &r.coupled, Some(&r.layer))?;
                write_snapshot(&out.join(format!("reference_{i}.csv")), &r.reference, None)?;
                report.lines.push(format!(
                    "{kind} h1={} sigma={}: E1(eta)={} E1(u)={}",
                    r.row.h1,
                    r.row.sigma,
                    num(r.eta.e1),
                    num(r.u.e1)
                ));
            }
            let p = out.join("results.csv");
            let header = [
                "case", "x0", "h1", "sigma", "steps", "e1_eta", "e2_eta", "einf_eta", "e1_u", "e2_u", "einf_u", "cfl",
            ];
            write_csv(&p, &header, &rows)?;
            report.file(p);
        }
        Scenario::Wavetrain(w) => {
            let results = fan_out(&w.rows, jobs, out, |r| w.run_row(r))?;
            let mut rows = Vec::new();
            for (i, r) in results.iter().enumerate() {
                let mut row = vec![num(r.row.amplitude), num(r.row.wavenumber), r.row.cells.to_string()];
                row.extend([num(r.row.beta), r.steps.to_string()]);
                for e in [&r.eta, &r.u] {
                    row.extend([num(e.e1), num(e.e2), num(e.einf)]);
                }
                row.push(num(r.energy));
                row.extend(damping_cols(&r.damping));
                rows.push(row);
                write_snapshot(&out.join(format!("snapshot_{i}.csv")), &r.coupled, Some(&r.layer))?;
                write_snapshot(&out.join(format!("reference_{i}.csv")), &r.reference, None)?;
                report.lines.push(format!(
                    "A={} k={} beta={}: E_EN={}",
                    r.row.amplitude,
                    r.row.wavenumber,
                    r.row.beta,
                    num(r.energy)
                ));
            }
            let p = out.join("results.csv");
            let header = [
                "amplitude", "k", "cells", "beta", "steps", "e1_eta", "e2_eta", "einf_eta", "e1_u", "e2_u", "einf_u",
                "energy", "l0", "sigma_damping",
            ];
            write_csv(&p, &header, &rows)?;
            report.file(p);
        }
        Scenario::GaussianAbsorption(g) => {
            let results = fan_out(&g.rows, jobs, out, |r| g.run_row(r))?;
            let mut rows = Vec::new();
            for (i, r) in results.iter().enumerate() {
                let mut row = vec![r.row.modes.to_string(), r.row.cells.to_string(), r.row.steps.to_string()];
                row.extend([num(r.row.beta), num(r.eta_residual), num(r.u_residual)]);
                row.extend([num(r.energy.sqrt()), num(r.energy_wall.sqrt()), num(r.rho)]);
                row.extend(damping_cols(&r.damping));
                rows.push(row);
                write_snapshot(&out.join(format!("snapshot_{i}.csv")), &r.coupled, Some(&r.layer))?;
                report.lines.push(format!(
                    "N={} Nx={}: max|eta-ref|={} rho={}",
                    r.row.modes,
                    r.row.cells,
                    num(r.eta_residual),
                    num(r.rho)
                ));
            }
            let p = out.join("results.csv");
            let header = [
                "modes", "cells", "steps", "beta", "eta_residual", "u_residual", "sqrt_energy", "sqrt_energy_wall",
                "rho", "l0", "sigma_damping",
            ];
            write_csv(&p, &header, &rows)?;
            report.file(p);
        }
        Scenario::Convergence(c) => {
            let results = fan_out(&c.cells, jobs, out, |&n| c.run_one(n))?;
            let rows: Vec<Vec<String>> = c
                .rows(&results)
                .iter()
                .map(|r| {
                    vec![
                        r.cells.to_string(),
                        num(r.dz),
                        num(r.l2_error),
                        r.order.map(num).unwrap_or_default(),
                    ]
                })
                .collect();
            let p = out.join("results.csv");
            write_csv(&p, &["cells", "dz", "l2_error", "order"], &rows)?;
            report.file(p);
        }
    }
    Ok(report)
}
