//! Scaled-Laguerre spectral discretizations of hyperbolic problems on
//! `[0, ∞)`, their eigenvalue stability analysis, and a modal DG scheme on a
//! finite interval coupled to a modal Laguerre absorbing layer.
//!
//! Everything is generic over [`Real`] (`f32` or `f64`); the aliases below fix
//! the scalar for the common case.

pub mod advection;
pub mod basis;
pub mod coupled;
pub mod dg;
pub mod diagnostics;
pub mod error;
pub mod linalg;
pub mod modal;
pub mod quadrature;
pub mod real;
pub mod spectrum;
pub mod swe;
pub mod system;
pub mod time;

pub use error::{Error, Result};
pub use real::Real;

pub type Matrix = linalg::Matrix<f64>;
pub type BasisSpec = basis::BasisSpec<f64>;
pub type QuadratureRule = quadrature::QuadratureRule<f64>;
pub type SchemeVariant = advection::SchemeVariant<f64>;
pub type SemiDiscreteOperator = advection::SemiDiscreteOperator<f64>;
pub type SpectrumReport = spectrum::SpectrumReport<f64>;
pub type ModalState = modal::ModalState<f64>;
pub type Mesh1D = dg::Mesh1D<f64>;
pub type DGState = dg::DGState<f64>;
pub type CoupledState = coupled::CoupledState<f64>;
pub type SweConfig = swe::SweConfig<f64>;
pub type SigmoidDamping = swe::SigmoidDamping<f64>;
pub type ErrorReport = diagnostics::ErrorReport<f64>;

pub type Matrix32 = linalg::Matrix<f32>;
pub type BasisSpec32 = basis::BasisSpec<f32>;
pub type QuadratureRule32 = quadrature::QuadratureRule<f32>;
