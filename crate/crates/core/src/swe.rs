//! Linearized shallow water equations with optional Rayleigh damping,
//!
//! ```text
//! h_t + U h_z + H u_z + γ h = 0
//! u_t + g h_z + U u_z + γ u = 0
//! ```
//!
//! and the ghost states used to close them at the ends of a DG mesh.

use crate::error::{Error, Result};
use crate::linalg::Matrix;
use crate::real::Real;
use crate::system::{Eigen, HyperbolicSystem};

/// `γ(x) = Δγ / (1 + exp((α L0 − x) / σ))`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SigmoidDamping<T> {
    pub dgamma: T,
    pub l0: T,
    pub alpha: T,
    pub sigma: T,
}

impl<T: Real> SigmoidDamping<T> {
    pub fn new(dgamma: T, l0: T, alpha: T, sigma: T) -> Result<Self> {
        if !(dgamma >= T::zero() && dgamma.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "damping amplitude must be non-negative, got {dgamma}"
            )));
        }
        if !(sigma > T::zero() && sigma.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "sigmoid steepness must be positive, got {sigma}"
            )));
        }
        if !(l0.is_finite() && alpha.is_finite()) {
            return Err(Error::InvalidParameter("sigmoid position must be finite".into()));
        }
        Ok(Self {
            dgamma,
            l0,
            alpha,
            sigma,
        })
    }

    pub fn gamma(&self, x: T) -> T {
        sigmoid_gamma(self, x)
    }
}

/// Sigmoid damping profile; saturates cleanly where the exponential
/// overflows.
pub fn sigmoid_gamma<T: Real>(d: &SigmoidDamping<T>, x: T) -> T {
    let e = ((d.alpha * d.l0 - x) / d.sigma).exp();
    if e.is_infinite() {
        T::zero()
    } else {
        d.dgamma / (T::one() + e)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweConfig<T> {
    /// Reference depth `H`.
    pub depth: T,
    /// Reference velocity `U`.
    pub velocity: T,
    pub grav: T,
    pub damping: Option<SigmoidDamping<T>>,
}

impl<T: Real> SweConfig<T> {
    pub fn new(depth: T, velocity: T, grav: T) -> Self {
        Self {
            depth,
            velocity,
            grav,
            damping: None,
        }
    }

    pub fn with_damping(mut self, damping: SigmoidDamping<T>) -> Self {
        self.damping = Some(damping);
        self
    }

    pub fn wave_speed(&self) -> T {
        (self.grav * self.depth).sqrt()
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.depth > T::zero() && self.depth.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "reference depth must be positive, got {}",
                self.depth
            )));
        }
        if !(self.grav > T::zero() && self.grav.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "gravity must be positive, got {}",
                self.grav
            )));
        }
        if !(self.velocity.abs() < self.wave_speed()) {
            return Err(Error::Configuration(format!(
                "flow must be subcritical: |U| = {} but sqrt(gH) = {}",
                self.velocity.abs(),
                self.wave_speed()
            )));
        }
        Ok(())
    }
}

/// `A = [[U, H], [g, U]]`, `B = −γ(z) I`.
#[derive(Debug, Clone)]
pub struct SweSystem<T> {
    cfg: SweConfig<T>,
    a: Matrix<T>,
    eigen: Eigen<T>,
}

impl<T: Real> SweSystem<T> {
    pub fn config(&self) -> &SweConfig<T> {
        &self.cfg
    }

    pub fn gamma(&self, z: T) -> T {
        self.cfg.damping.map_or(T::zero(), |d| d.gamma(z))
    }

    /// Characteristic variables `(u − (c/H) h, u + (c/H) h)`, travelling with
    /// `U − c` and `U + c`.
    pub fn riemann_invariants(&self, q: &[T]) -> (T, T) {
        let r = self.cfg.wave_speed() / self.cfg.depth;
        (q[1] - r * q[0], q[1] + r * q[0])
    }

    /// Ghost state imposing `u = u_b` at a left boundary: the outgoing
    /// invariant is taken from the interior and `h` chosen so that the
    /// upwind state carries `u_b`.
    pub fn velocity_ghost(&self, u_b: T, interior: &[T]) -> Vec<T> {
        let (r_minus, _) = self.riemann_invariants(interior);
        let h = (u_b - r_minus) * self.cfg.depth / self.cfg.wave_speed();
        vec![h, u_b]
    }

    /// Rigid wall: mirrored velocity.
    pub fn wall_ghost(&self, interior: &[T]) -> Vec<T> {
        vec![interior[0], -interior[1]]
    }
}

pub fn swe_system<T: Real>(cfg: SweConfig<T>) -> Result<SweSystem<T>> {
    cfg.validate()?;
    let (hh, uu, g) = (cfg.depth, cfg.velocity, cfg.grav);
    let c = cfg.wave_speed();
    let a = Matrix::from_rows(&[&[uu, hh], &[g, uu]]);
    let vectors = Matrix::from_rows(&[&[hh, hh], &[-c, c]]);
    let s = T::one() / (T::two() * hh * c);
    let inverse = Matrix::from_rows(&[&[c * s, -hh * s], &[c * s, hh * s]]);
    Ok(SweSystem {
        cfg,
        a,
        eigen: Eigen {
            vectors,
            values: vec![uu - c, uu + c],
            inverse,
        },
    })
}

impl<T: Real> HyperbolicSystem<T> for SweSystem<T> {
    fn dim(&self) -> usize {
        2
    }

    fn flux(&self, _q: &[T], _z: T) -> Matrix<T> {
        self.a.clone()
    }

    fn source(&self, _q: &[T], z: T) -> Matrix<T> {
        let g = -self.gamma(z);
        Matrix::from_diagonal(&[g, g])
    }

    fn eigen(&self, _q: &[T], _z: T) -> Result<Eigen<T>> {
        Ok(self.eigen.clone())
    }

    fn flux_dz(&self, _q: &[T], _z: T) -> Option<Matrix<T>> {
        Some(Matrix::zeros(2, 2))
    }

    fn flux_is_constant(&self) -> bool {
        true
    }

    fn is_constant(&self) -> bool {
        self.cfg.damping.is_none()
    }
}
