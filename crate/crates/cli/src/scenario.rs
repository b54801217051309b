//! Runners behind every scenario: spectra and rules from the library, and the
//! shallow water experiments built from the coupled and single-domain DG
//! solvers.

use std::sync::Arc;

use laguerre_dg::basis::BasisSpec;
use laguerre_dg::coupled::{
    cfl_number, rest_ghost, run_simulation, CoupledProblem, DgProblem, Ghost, RunFailure,
};
use laguerre_dg::dg::{project_dg, DGState, Mesh1D};
use laguerre_dg::diagnostics::{energy_error, error_norms, reflection_ratio, ErrorReport};
use laguerre_dg::modal::{reconstruct, ModalDiscretization, ModalState};
use laguerre_dg::quadrature::gauss_legendre;
use laguerre_dg::swe::{swe_system, SigmoidDamping, SweConfig, SweSystem};
use laguerre_dg::system::{ConstantSystem, HyperbolicSystem};
use serde::{Deserialize, Serialize};

use crate::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct Physics {
    pub depth: f64,
    pub velocity: f64,
    pub grav: f64,
}

impl Default for Physics {
    fn default() -> Self {
        Self {
            depth: 1.0,
            velocity: 0.0,
            grav: 9.81,
        }
    }
}

impl Physics {
    pub fn speed(&self) -> f64 {
        (self.grav * self.depth).sqrt()
    }

    fn system(&self, damping: Option<SigmoidDamping<f64>>) -> Result<SweSystem<f64>, CliError> {
        let mut cfg = SweConfig::new(self.depth, self.velocity, self.grav);
        cfg.damping = damping;
        Ok(swe_system(cfg)?)
    }
}

/// Sigmoid parameters; `l0` defaults to the last GLR node of the layer and
/// `sigma` to `l0 / 20`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct Damping {
    pub dgamma: f64,
    pub l0: Option<f64>,
    pub alpha: f64,
    pub sigma: Option<f64>,
}

impl Default for Damping {
    fn default() -> Self {
        Self {
            dgamma: 0.1,
            l0: None,
            alpha: 0.25,
            sigma: None,
        }
    }
}

impl Damping {
    /// Fills the defaults that depend on the layer's node span.
    pub fn resolve(&self, last_node: f64) -> Self {
        let l0 = self.l0.unwrap_or(last_node);
        Self {
            l0: Some(l0),
            sigma: Some(self.sigma.unwrap_or(l0 / 20.0)),
            ..*self
        }
    }

    fn sigmoid(&self, last_node: f64) -> Result<SigmoidDamping<f64>, CliError> {
        let r = self.resolve(last_node);
        Ok(SigmoidDamping::new(
            r.dgamma,
            r.l0.expect("resolved"),
            r.alpha,
            r.sigma.expect("resolved"),
        )?)
    }
}

/// Cell-centre samples of `h` and `u` on the finite domain.
#[derive(Debug, Clone, PartialEq)]
pub struct Fields {
    pub x: Vec<f64>,
    pub h: Vec<f64>,
    pub u: Vec<f64>,
}

impl Fields {
    fn from_dg(mesh: &Mesh1D<f64>, state: &DGState<f64>, cells: usize) -> Self {
        let mut v = state.center_values();
        let u = v.pop().expect("two components");
        let h = v.pop().expect("two components");
        Self {
            x: mesh.centers()[..cells].to_vec(),
            h: h[..cells].to_vec(),
            u: u[..cells].to_vec(),
        }
    }

    fn from_flat(mesh: &Mesh1D<f64>, y: &[f64], degree: usize) -> Self {
        let n = mesh.len() * 2 * (degree + 1);
        match DGState::from_coeffs(mesh.len(), 2, degree, y[..n].to_vec()) {
            Ok(s) => Self::from_dg(mesh, &s, mesh.len()),
            Err(_) => Self {
                x: mesh.centers().to_vec(),
                h: vec![f64::NAN; mesh.len()],
                u: vec![f64::NAN; mesh.len()],
            },
        }
    }
}

/// Initial free-surface bump `h1 exp(−((x − x0)/σ)²)` at rest.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Gaussian {
    pub h1: f64,
    pub x0: f64,
    pub sigma: f64,
}

impl Gaussian {
    pub fn eval(&self, k: usize, x: f64) -> f64 {
        if k == 0 {
            let s = (x - self.x0) / self.sigma;
            self.h1 * (-s * s).exp()
        } else {
            0.0
        }
    }
}

fn failure(mesh: &Mesh1D<f64>, degree: usize, f: RunFailure<f64>) -> CliError {
    CliError::Numerical {
        message: f.to_string(),
        snapshot: Some(Fields::from_flat(mesh, &f.last_good, degree)),
    }
}

/// Single-domain DG run on `[0, length]`.
pub struct DgRun {
    pub physics: Physics,
    pub length: f64,
    pub cells: usize,
    pub degree: usize,
}

impl DgRun {
    pub fn mesh(&self) -> Result<Mesh1D<f64>, CliError> {
        Ok(Mesh1D::uniform(0.0, self.length, self.cells)?)
    }

    pub fn run(
        &self,
        init: impl Fn(usize, f64) -> f64,
        left: Ghost<f64>,
        right: Ghost<f64>,
        dt: f64,
        steps: usize,
    ) -> Result<(Mesh1D<f64>, DGState<f64>), CliError> {
        let mesh = self.mesh()?;
        let sys: Arc<dyn HyperbolicSystem<f64>> = Arc::new(self.physics.system(None)?);
        let problem = DgProblem::new(sys, mesh.clone(), self.degree, left, right)?;
        let y0 = project_dg(init, 2, &mesh, self.degree)?.into_coeffs();
        let y = run_simulation(&problem, y0, 0.0, dt, steps, |_, _, _| {})
            .map_err(|f| failure(&mesh, self.degree, f))?;
        let state = problem.state(&y)?;
        Ok((mesh, state))
    }
}

/// DG on `[0, length]` coupled to a Laguerre layer beyond `length`.
pub struct CoupledRun {
    pub physics: Physics,
    pub damping: Option<Damping>,
    pub length: f64,
    pub cells: usize,
    pub degree: usize,
    pub modes: usize,
    pub beta: f64,
}

pub struct CoupledOutcome {
    pub mesh: Mesh1D<f64>,
    pub dg: DGState<f64>,
    pub layer: ModalState<f64>,
    pub cfl: f64,
    pub damping: Option<Damping>,
    layer_nodes: Vec<f64>,
}

impl CoupledRun {
    pub fn problem(&self, left: Ghost<f64>) -> Result<(CoupledProblem<f64>, Option<Damping>), CliError> {
        let mesh = Mesh1D::uniform(0.0, self.length, self.cells)?;
        let modal = ModalDiscretization::new(BasisSpec::functions(self.beta, self.modes)?)?;
        let last = *modal.rule().nodes().last().expect("non-empty rule");
        let damping = self.damping.map(|d| d.resolve(last));
        let sigmoid = match self.damping {
            Some(d) => Some(d.sigmoid(last)?),
            None => None,
        };
        let interior: Arc<dyn HyperbolicSystem<f64>> = Arc::new(self.physics.system(None)?);
        let layer: Arc<dyn HyperbolicSystem<f64>> = Arc::new(self.physics.system(sigmoid)?);
        Ok((
            CoupledProblem::new(interior, layer, mesh, self.degree, modal, left)?,
            damping,
        ))
    }

    pub fn run(
        &self,
        init: impl Fn(usize, f64) -> f64,
        left: Ghost<f64>,
        dt: f64,
        steps: usize,
    ) -> Result<CoupledOutcome, CliError> {
        let (problem, damping) = self.problem(left)?;
        let dg0 = project_dg(&init, 2, &problem.mesh, self.degree)?;
        let shift = problem.mesh.right();
        let layer0 = problem.modal.project(|k, z| init(k, shift + z), 2, shift)?;
        let state = laguerre_dg::coupled::CoupledState {
            dg: dg0,
            semi: layer0,
            t: 0.0,
        };
        let y0 = problem.join(&state);
        let cfl = cfl_number(&problem, dt);
        let y = run_simulation(&problem, y0, 0.0, dt, steps, |_, _, _| {})
            .map_err(|f| failure(&problem.mesh, self.degree, f))?;
        let end = problem.split(&y, dt * steps as f64)?;
        Ok(CoupledOutcome {
            layer_nodes: problem.modal.rule().nodes().iter().map(|z| shift + z).collect(),
            mesh: problem.mesh.clone(),
            dg: end.dg,
            layer: end.semi,
            cfl,
            damping,
        })
    }
}

impl CoupledOutcome {
    pub fn fields(&self) -> Fields {
        Fields::from_dg(&self.mesh, &self.dg, self.mesh.len())
    }

    /// Layer reconstructed at its GLR nodes.
    pub fn layer_fields(&self) -> Result<Fields, CliError> {
        let mut v = reconstruct(&self.layer, &self.layer_nodes)?;
        let u = v.pop().expect("two components");
        let h = v.pop().expect("two components");
        Ok(Fields {
            x: self.layer_nodes.clone(),
            h,
            u,
        })
    }
}

/// Wall ghost `(h, −u)`.
pub fn wall_ghost() -> Ghost<f64> {
    Arc::new(|_, q: &[f64]| vec![q[0], -q[1]])
}

/// Velocity Dirichlet ghost driven by `u_b(t)`.
pub fn velocity_ghost(physics: Physics, u_b: impl Fn(f64) -> f64 + Send + Sync + 'static) -> Result<Ghost<f64>, CliError> {
    let sys = physics.system(None)?;
    Ok(Arc::new(move |t, q: &[f64]| sys.velocity_ghost(u_b(t), q)))
}

// ---------------------------------------------------------------------------
// Coupling validation

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CouplingRow {
    pub x0: f64,
    pub h1: f64,
    pub sigma: f64,
    pub steps: usize,
    pub final_time: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CouplingValidation {
    pub domain_length: f64,
    pub cells: usize,
    #[serde(default = "one")]
    pub degree: usize,
    pub modes: usize,
    pub beta: f64,
    pub reference_length: f64,
    #[serde(default)]
    pub physics: Physics,
    pub rows: Vec<CouplingRow>,
}

fn one() -> usize {
    1
}

#[derive(Debug, Clone, PartialEq)]
pub struct CouplingResult {
    pub row: CouplingRow,
    /// Relative norms when the pulse starts in the layer, absolute otherwise.
    pub relative: bool,
    pub eta: ErrorReport<f64>,
    pub u: ErrorReport<f64>,
    pub cfl: f64,
    pub coupled: Fields,
    pub layer: Fields,
    pub reference: Fields,
}

impl CouplingValidation {
    pub fn validate(&self) -> Result<(), CliError> {
        positive("domain_length", self.domain_length)?;
        positive("beta", self.beta)?;
        nonzero("cells", self.cells)?;
        if self.reference_length < self.domain_length {
            return Err(CliError::Config(
                "reference_length must cover the finite domain".into(),
            ));
        }
        for r in &self.rows {
            positive("sigma", r.sigma)?;
            positive("final_time", r.final_time)?;
            nonzero("steps", r.steps)?;
        }
        Ok(())
    }

    pub fn run_row(&self, row: &CouplingRow) -> Result<CouplingResult, CliError> {
        let ic = Gaussian {
            h1: row.h1,
            x0: row.x0,
            sigma: row.sigma,
        };
        let dt = row.final_time / row.steps as f64;
        let coupled = CoupledRun {
            physics: self.physics,
            damping: None,
            length: self.domain_length,
            cells: self.cells,
            degree: self.degree,
            modes: self.modes,
            beta: self.beta,
        }
        .run(move |k, x| ic.eval(k, x), rest_ghost(2), dt, row.steps)?;
        let dx = self.domain_length / self.cells as f64;
        let reference = DgRun {
            physics: self.physics,
            length: self.reference_length,
            cells: (self.reference_length / dx).round() as usize,
            degree: self.degree,
        };
        let (rmesh, rstate) = reference.run(move |k, x| ic.eval(k, x), rest_ghost(2), rest_ghost(2), dt, row.steps)?;
        let reference = Fields::from_dg(&rmesh, &rstate, self.cells);
        let fields = coupled.fields();
        let relative = row.x0 > self.domain_length;
        Ok(CouplingResult {
            row: *row,
            relative,
            eta: error_norms(&fields.h, &reference.h, relative)?,
            u: error_norms(&fields.u, &reference.u, relative)?,
            cfl: coupled.cfl,
            coupled: fields,
            layer: coupled.layer_fields()?,
            reference,
        })
    }
}

// ---------------------------------------------------------------------------
// Wavetrain

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WavetrainRow {
    pub amplitude: f64,
    pub wavenumber: f64,
    pub cells: usize,
    pub beta: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Wavetrain {
    pub domain_length: f64,
    #[serde(default = "one")]
    pub degree: usize,
    pub modes: usize,
    pub final_time: f64,
    pub reference_length: f64,
    pub cfl: f64,
    #[serde(default)]
    pub physics: Physics,
    #[serde(default)]
    pub damping: Damping,
    pub rows: Vec<WavetrainRow>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct WavetrainResult {
    pub row: WavetrainRow,
    pub eta: ErrorReport<f64>,
    pub u: ErrorReport<f64>,
    pub energy: f64,
    pub steps: usize,
    pub damping: Damping,
    pub coupled: Fields,
    pub layer: Fields,
    pub reference: Fields,
}

impl Wavetrain {
    pub fn validate(&self) -> Result<(), CliError> {
        positive("domain_length", self.domain_length)?;
        positive("final_time", self.final_time)?;
        positive("cfl", self.cfl)?;
        if self.reference_length < self.domain_length {
            return Err(CliError::Config(
                "reference_length must cover the finite domain".into(),
            ));
        }
        for r in &self.rows {
            positive("beta", r.beta)?;
            positive("wavenumber", r.wavenumber)?;
            nonzero("cells", r.cells)?;
        }
        Ok(())
    }

    /// Forcing period: the wave with wavelength `domain_length / k`.
    pub fn period(&self, row: &WavetrainRow) -> f64 {
        self.domain_length / row.wavenumber / self.physics.speed()
    }

    pub fn run_row(&self, row: &WavetrainRow) -> Result<WavetrainResult, CliError> {
        let dx = self.domain_length / row.cells as f64;
        let speed = self.physics.speed() + self.physics.velocity.abs();
        let steps = (self.final_time * speed / (self.cfl * dx)).ceil() as usize;
        let dt = self.final_time / steps as f64;
        let (a, tau) = (row.amplitude, self.period(row));
        let forcing = move |t: f64| a * (2.0 * std::f64::consts::PI * t / tau).sin();
        let coupled = CoupledRun {
            physics: self.physics,
            damping: Some(self.damping),
            length: self.domain_length,
            cells: row.cells,
            degree: self.degree,
            modes: self.modes,
            beta: row.beta,
        }
        .run(|_, _| 0.0, velocity_ghost(self.physics, forcing)?, dt, steps)?;
        let reference = DgRun {
            physics: self.physics,
            length: self.reference_length,
            cells: (self.reference_length / dx).round() as usize,
            degree: self.degree,
        };
        let (rmesh, rstate) = reference.run(|_, _| 0.0, velocity_ghost(self.physics, forcing)?, rest_ghost(2), dt, steps)?;
        let reference = Fields::from_dg(&rmesh, &rstate, row.cells);
        let fields = coupled.fields();
        let energy = energy_error(
            &fields.h,
            &reference.h,
            &fields.u,
            &reference.u,
            self.physics.grav,
            self.physics.depth,
        )?;
        Ok(WavetrainResult {
            row: *row,
            eta: error_norms(&fields.h, &reference.h, true)?,
            u: error_norms(&fields.u, &reference.u, true)?,
            energy,
            steps,
            damping: coupled.damping.unwrap_or(self.damping),
            coupled: fields,
            layer: coupled.layer_fields()?,
            reference,
        })
    }
}

// ---------------------------------------------------------------------------
// Gaussian absorption

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AbsorptionRow {
    pub modes: usize,
    pub cells: usize,
    pub steps: usize,
    pub beta: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GaussianAbsorption {
    pub domain_length: f64,
    #[serde(default = "one")]
    pub degree: usize,
    pub x0: f64,
    pub sigma: f64,
    pub h1: f64,
    /// Defaults to `domain_length / (2 √(gH))`.
    pub final_time: Option<f64>,
    pub reference_length: f64,
    #[serde(default)]
    pub physics: Physics,
    #[serde(default)]
    pub damping: Damping,
    pub rows: Vec<AbsorptionRow>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct AbsorptionResult {
    pub row: AbsorptionRow,
    pub eta_residual: f64,
    pub u_residual: f64,
    pub energy: f64,
    pub energy_wall: f64,
    pub rho: f64,
    pub damping: Damping,
    pub coupled: Fields,
    pub layer: Fields,
    pub reference: Fields,
}

impl GaussianAbsorption {
    pub fn validate(&self) -> Result<(), CliError> {
        positive("domain_length", self.domain_length)?;
        positive("sigma", self.sigma)?;
        if let Some(t) = self.final_time {
            positive("final_time", t)?;
        }
        if self.reference_length < self.domain_length {
            return Err(CliError::Config(
                "reference_length must cover the finite domain".into(),
            ));
        }
        for r in &self.rows {
            positive("beta", r.beta)?;
            nonzero("cells", r.cells)?;
            nonzero("steps", r.steps)?;
        }
        Ok(())
    }

    pub fn final_time(&self) -> f64 {
        self.final_time
            .unwrap_or(self.domain_length / (2.0 * self.physics.speed()))
    }

    pub fn run_row(&self, row: &AbsorptionRow) -> Result<AbsorptionResult, CliError> {
        let ic = Gaussian {
            h1: self.h1,
            x0: self.x0,
            sigma: self.sigma,
        };
        let dt = self.final_time() / row.steps as f64;
        let coupled = CoupledRun {
            physics: self.physics,
            damping: Some(self.damping),
            length: self.domain_length,
            cells: row.cells,
            degree: self.degree,
            modes: row.modes,
            beta: row.beta,
        }
        .run(move |k, x| ic.eval(k, x), rest_ghost(2), dt, row.steps)?;
        let dx = self.domain_length / row.cells as f64;
        let open = DgRun {
            physics: self.physics,
            length: self.reference_length,
            cells: (self.reference_length / dx).round() as usize,
            degree: self.degree,
        };
        let (rmesh, rstate) = open.run(move |k, x| ic.eval(k, x), rest_ghost(2), rest_ghost(2), dt, row.steps)?;
        let reference = Fields::from_dg(&rmesh, &rstate, row.cells);
        let walled = DgRun {
            physics: self.physics,
            length: self.domain_length,
            cells: row.cells,
            degree: self.degree,
        };
        let (wmesh, wstate) = walled.run(move |k, x| ic.eval(k, x), rest_ghost(2), wall_ghost(), dt, row.steps)?;
        let wall = Fields::from_dg(&wmesh, &wstate, row.cells);
        let fields = coupled.fields();
        let (g, hh) = (self.physics.grav, self.physics.depth);
        let energy = energy_error(&fields.h, &reference.h, &fields.u, &reference.u, g, hh)?;
        let energy_wall = energy_error(&wall.h, &reference.h, &wall.u, &reference.u, g, hh)?;
        let max_diff = |a: &[f64], b: &[f64]| a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max);
        Ok(AbsorptionResult {
            row: *row,
            eta_residual: max_diff(&fields.h, &reference.h),
            u_residual: max_diff(&fields.u, &reference.u),
            energy,
            energy_wall,
            rho: reflection_ratio(energy, energy_wall)?,
            damping: coupled.damping.unwrap_or(self.damping),
            coupled: fields,
            layer: coupled.layer_fields()?,
            reference,
        })
    }
}

// ---------------------------------------------------------------------------
// DG convergence

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Convergence {
    pub speed: f64,
    pub length: f64,
    pub degree: usize,
    pub final_time: f64,
    pub cfl: f64,
    pub cells: Vec<usize>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConvergenceRow {
    pub cells: usize,
    pub dz: f64,
    pub l2_error: f64,
    /// Observed order against the previous row.
    pub order: Option<f64>,
}

impl Convergence {
    pub fn validate(&self) -> Result<(), CliError> {
        positive("speed", self.speed)?;
        positive("length", self.length)?;
        positive("final_time", self.final_time)?;
        positive("cfl", self.cfl)?;
        if self.cells.is_empty() || self.cells.contains(&0) {
            return Err(CliError::Config("cells must be a list of positive counts".into()));
        }
        Ok(())
    }

    fn exact(&self, z: f64, t: f64) -> f64 {
        (2.0 * std::f64::consts::PI * (z - self.speed * t) / self.length).sin()
    }

    /// L² error of advecting a sine wave with its exact inflow trace.
    pub fn run_one(&self, cells: usize) -> Result<(f64, f64), CliError> {
        let mesh = Mesh1D::uniform(0.0, self.length, cells)?;
        let sys: Arc<dyn HyperbolicSystem<f64>> = Arc::new(ConstantSystem::scalar(self.speed, 0.0));
        let this = self.clone();
        let inflow: Ghost<f64> = Arc::new(move |t, _| vec![this.exact(0.0, t)]);
        let problem = DgProblem::new(sys, mesh.clone(), self.degree, inflow, rest_ghost(1))?;
        let dz = self.length / cells as f64;
        let steps = (self.final_time * self.speed / (self.cfl * dz)).ceil() as usize;
        let dt = self.final_time / steps as f64;
        let y0 = project_dg(|_, z| self.exact(z, 0.0), 1, &mesh, self.degree)?.into_coeffs();
        let y = run_simulation(&problem, y0, 0.0, dt, steps, |_, _, _| {})
            .map_err(|f| CliError::Numerical {
                message: f.to_string(),
                snapshot: None,
            })?;
        let state = problem.state(&y)?;
        let (xi, w) = gauss_legendre::<f64>(self.degree + 3)?;
        let mut err = 0.0;
        for m in 0..mesh.len() {
            let (c, h) = (mesh.centers()[m], mesh.sizes()[m]);
            for (&x, &wg) in xi.iter().zip(&w) {
                let e = state.eval_local(m, x)[0] - self.exact(c + 0.5 * h * x, self.final_time);
                err += 0.5 * h * wg * e * e;
            }
        }
        Ok((dz, err.sqrt()))
    }

    pub fn rows(&self, results: &[(f64, f64)]) -> Vec<ConvergenceRow> {
        results
            .iter()
            .enumerate()
            .map(|(i, &(dz, e))| ConvergenceRow {
                cells: self.cells[i],
                dz,
                l2_error: e,
                order: (i > 0).then(|| {
                    let (dz0, e0) = results[i - 1];
                    (e0 / e).ln() / (dz0 / dz).ln()
                }),
            })
            .collect()
    }
}

fn positive(name: &str, v: f64) -> Result<(), CliError> {
    if v > 0.0 && v.is_finite() {
        Ok(())
    } else {
        Err(CliError::Config(format!("{name} must be positive, got {v}")))
    }
}

fn nonzero(name: &str, v: usize) -> Result<(), CliError> {
    if v > 0 {
        Ok(())
    } else {
        Err(CliError::Config(format!("{name} must be at least 1")))
    }
}
