//! Split-domain solver: modal DG on `[x_left, L]`, weak modal Laguerre on
//! `[L, ∞)`, exchanging traces at every right-hand side evaluation.
//!
//! The DG side sees the Laguerre trace `Σ_j q_{k,j}` as the exterior state of
//! its last face. The Laguerre side receives the DG trace as its Dirichlet
//! vector `g`, which only enters through `A⁺`.

use std::fmt;
use std::sync::Arc;

use crate::dg::{trace_at_left, trace_at_right, DGState, DgDiscretization, Mesh1D};
use crate::error::{check_dim, Error, Result};
use crate::modal::{trace_at_origin, ModalDiscretization, ModalState};
use crate::real::Real;
use crate::system::HyperbolicSystem;
use crate::time::rk3_step;

/// Exterior state at a mesh end from the time and the interior trace.
pub type Ghost<T> = Arc<dyn Fn(T, &[T]) -> Vec<T> + Send + Sync>;

/// Ghost that is always the zero state.
pub fn rest_ghost<T: Real>(dim: usize) -> Ghost<T> {
    Arc::new(move |_, _| vec![T::zero(); dim])
}

/// A method-of-lines system `y' = f(t, y)` over a flat state vector.
pub trait Semidiscrete<T: Real> {
    fn len(&self) -> usize;

    fn rhs(&self, t: T, y: &[T]) -> Result<Vec<T>>;

    /// Largest characteristic speed over the smallest cell, used for CFL
    /// numbers.
    fn speed_over_size(&self) -> T;
}

/// DG alone, closed by ghost states at both ends.
pub struct DgProblem<T: Real> {
    pub system: Arc<dyn HyperbolicSystem<T>>,
    pub mesh: Mesh1D<T>,
    pub disc: DgDiscretization<T>,
    pub left: Ghost<T>,
    pub right: Ghost<T>,
}

impl<T: Real> DgProblem<T> {
    pub fn new(
        system: Arc<dyn HyperbolicSystem<T>>,
        mesh: Mesh1D<T>,
        degree: usize,
        left: Ghost<T>,
        right: Ghost<T>,
    ) -> Result<Self> {
        Ok(Self {
            system,
            mesh,
            disc: DgDiscretization::new(degree)?,
            left,
            right,
        })
    }

    pub fn state(&self, y: &[T]) -> Result<DGState<T>> {
        DGState::from_coeffs(self.mesh.len(), self.system.dim(), self.disc.degree(), y.to_vec())
    }
}

impl<T: Real> Semidiscrete<T> for DgProblem<T> {
    fn len(&self) -> usize {
        self.mesh.len() * self.system.dim() * (self.disc.degree() + 1)
    }

    fn rhs(&self, t: T, y: &[T]) -> Result<Vec<T>> {
        let state = self.state(y)?;
        let lg = (self.left)(t, &trace_at_left(&state));
        let rg = (self.right)(t, &trace_at_right(&state));
        self.disc.rhs(self.system.as_ref(), &self.mesh, &state, &lg, &rg)
    }

    fn speed_over_size(&self) -> T {
        max_speed(self.system.as_ref()) / min_size(&self.mesh)
    }
}

fn max_speed<T: Real>(sys: &dyn HyperbolicSystem<T>) -> T {
    let probe = vec![T::zero(); sys.dim()];
    sys.eigen(&probe, T::zero())
        .map(|e| e.values.iter().fold(T::zero(), |m, l| m.max(l.abs())))
        .unwrap_or(T::zero())
}

fn min_size<T: Real>(mesh: &Mesh1D<T>) -> T {
    mesh.sizes().iter().copied().fold(T::infinity(), T::min)
}

/// DG and Laguerre coefficients at time `t`.
#[derive(Debug, Clone, PartialEq)]
pub struct CoupledState<T> {
    pub dg: DGState<T>,
    pub semi: ModalState<T>,
    pub t: T,
}

/// DG on the mesh, Laguerre beyond its right end.
pub struct CoupledProblem<T: Real> {
    /// System on the finite domain.
    pub interior: Arc<dyn HyperbolicSystem<T>>,
    /// System on the semi-infinite layer, evaluated in the local coordinate.
    pub layer: Arc<dyn HyperbolicSystem<T>>,
    pub mesh: Mesh1D<T>,
    pub dg: DgDiscretization<T>,
    pub modal: ModalDiscretization<T>,
    pub left: Ghost<T>,
}

impl<T: Real> CoupledProblem<T> {
    pub fn new(
        interior: Arc<dyn HyperbolicSystem<T>>,
        layer: Arc<dyn HyperbolicSystem<T>>,
        mesh: Mesh1D<T>,
        degree: usize,
        modal: ModalDiscretization<T>,
        left: Ghost<T>,
    ) -> Result<Self> {
        check_dim(interior.dim(), layer.dim())?;
        Ok(Self {
            interior,
            layer,
            mesh,
            dg: DgDiscretization::new(degree)?,
            modal,
            left,
        })
    }

    fn dg_len(&self) -> usize {
        self.mesh.len() * self.interior.dim() * (self.dg.degree() + 1)
    }

    pub fn split(&self, y: &[T], t: T) -> Result<CoupledState<T>> {
        check_dim(self.len(), y.len())?;
        let (a, b) = y.split_at(self.dg_len());
        let d = self.interior.dim();
        Ok(CoupledState {
            dg: DGState::from_coeffs(self.mesh.len(), d, self.dg.degree(), a.to_vec())?,
            semi: ModalState::from_coeffs(d, *self.modal.spec(), self.mesh.right(), b.to_vec())?,
            t,
        })
    }

    pub fn join(&self, state: &CoupledState<T>) -> Vec<T> {
        let mut y = state.dg.coeffs().to_vec();
        y.extend_from_slice(state.semi.coeffs());
        y
    }
}

/// Derivatives of both sub-states with traces exchanged at time `t`.
pub fn coupled_rhs<T: Real>(
    problem: &CoupledProblem<T>,
    state: &CoupledState<T>,
    t: T,
) -> Result<(Vec<T>, Vec<T>)> {
    let dg_trace = trace_at_right(&state.dg);
    let layer_trace = trace_at_origin(&state.semi);
    let lg = (problem.left)(t, &trace_at_left(&state.dg));
    let ddg = problem
        .dg
        .rhs(problem.interior.as_ref(), &problem.mesh, &state.dg, &lg, &layer_trace)?;
    let dsemi = problem.modal.rhs(problem.layer.as_ref(), &state.semi, &dg_trace)?;
    Ok((ddg, dsemi))
}

impl<T: Real> Semidiscrete<T> for CoupledProblem<T> {
    fn len(&self) -> usize {
        self.dg_len() + self.interior.dim() * self.modal.spec().len()
    }

    fn rhs(&self, t: T, y: &[T]) -> Result<Vec<T>> {
        let state = self.split(y, t)?;
        let (mut a, b) = coupled_rhs(self, &state, t)?;
        a.extend(b);
        Ok(a)
    }

    fn speed_over_size(&self) -> T {
        max_speed(self.interior.as_ref()) / min_size(&self.mesh)
    }
}

/// `Δt · max|λ| / min Δz`.
pub fn cfl_number<T: Real, P: Semidiscrete<T> + ?Sized>(problem: &P, dt: T) -> T {
    dt * problem.speed_over_size()
}

/// A run aborted by a numerical failure, with the last finite state.
#[derive(Debug, Clone)]
pub struct RunFailure<T> {
    pub error: Error,
    pub last_good: Vec<T>,
    pub time: T,
    pub step: usize,
}

impl<T: Real> fmt::Display for RunFailure<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} (after {} steps, t = {})", self.error, self.step, self.time)
    }
}

impl<T: Real> std::error::Error for RunFailure<T> {}

/// Advances `n_steps` RK3 steps of size `dt` from `(t0, y0)`. `observe` is
/// called with `(step, t, y)` after the initial state and after every step.
pub fn run_simulation<T: Real, P: Semidiscrete<T> + ?Sized>(
    problem: &P,
    y0: Vec<T>,
    t0: T,
    dt: T,
    n_steps: usize,
    mut observe: impl FnMut(usize, T, &[T]),
) -> std::result::Result<Vec<T>, RunFailure<T>> {
    let fail = |error, last_good, time, step| RunFailure {
        error,
        last_good,
        time,
        step,
    };
    if y0.len() != problem.len() {
        let e = Error::DimensionMismatch {
            expected: problem.len(),
            found: y0.len(),
        };
        return Err(fail(e, y0, t0, 0));
    }
    let mut y = y0;
    observe(0, t0, &y);
    for step in 0..n_steps {
        let t = t0 + dt * T::of(step);
        match rk3_step(|s, v| problem.rhs(s, v), &y, t, dt) {
            Ok(next) => y = next,
            Err(e) => return Err(fail(e, y, t, step)),
        }
        observe(step + 1, t + dt, &y);
    }
    Ok(y)
}
