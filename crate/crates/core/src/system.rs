//! Linear hyperbolic systems `q_t + A(z) q_z = B(z) q` and the
//! characteristic flux splitting `A = A⁺ + A⁻`.

use crate::error::{check_dim, Error, Result};
use crate::linalg::Matrix;
use crate::real::Real;

/// `A = V diag(λ) V⁻¹` with real `λ`.
#[derive(Debug, Clone)]
pub struct Eigen<T> {
    pub vectors: Matrix<T>,
    pub values: Vec<T>,
    pub inverse: Matrix<T>,
}

impl<T: Real> Eigen<T> {
    /// Computes `V⁻¹` and checks that the factors are conformant.
    pub fn new(vectors: Matrix<T>, values: Vec<T>) -> Result<Self> {
        if !vectors.is_square() {
            return Err(Error::DimensionMismatch {
                expected: vectors.rows(),
                found: vectors.cols(),
            });
        }
        check_dim(vectors.rows(), values.len())?;
        if values.iter().any(|l| !l.is_finite()) {
            return Err(Error::NotHyperbolic(
                "characteristic speeds must be real and finite".into(),
            ));
        }
        let inverse = vectors
            .inverse()
            .map_err(|_| Error::NotHyperbolic("eigenvector matrix is singular".into()))?;
        Ok(Self {
            vectors,
            values,
            inverse,
        })
    }

    /// `V f(Λ) V⁻¹`.
    pub fn compose(&self, f: impl Fn(T) -> T) -> Matrix<T> {
        let d = self.values.len();
        let fl: Vec<T> = self.values.iter().map(|&l| f(l)).collect();
        Matrix::from_fn(d, d, |i, j| {
            (0..d)
                .map(|k| self.vectors[(i, k)] * fl[k] * self.inverse[(k, j)])
                .sum()
        })
    }

    pub fn reconstruct(&self) -> Matrix<T> {
        self.compose(|l| l)
    }
}

/// Coefficients of a `d`-component linear hyperbolic system.
///
/// `z` is whatever coordinate the discretization evaluates in: the physical
/// coordinate on the finite domain and the local distance from the interface
/// on the semi-infinite one.
pub trait HyperbolicSystem<T: Real>: Send + Sync {
    fn dim(&self) -> usize;

    /// `A(q, z)`.
    fn flux(&self, q: &[T], z: T) -> Matrix<T>;

    /// `B(q, z)`.
    fn source(&self, q: &[T], z: T) -> Matrix<T>;

    fn eigen(&self, q: &[T], z: T) -> Result<Eigen<T>>;

    /// `∂A/∂z`, when known in closed form.
    fn flux_dz(&self, _q: &[T], _z: T) -> Option<Matrix<T>> {
        None
    }

    /// `A` independent of `z` and `q`.
    fn flux_is_constant(&self) -> bool {
        self.is_constant()
    }

    /// Both `A` and `B` independent of `z` and `q`.
    fn is_constant(&self) -> bool {
        false
    }
}

/// `(A⁺, A⁻)` with `λ⁺ = max(λ, 0)` and `λ⁻ = min(λ, 0)`.
pub fn flux_split<T: Real>(a: &Matrix<T>, eig: &Eigen<T>) -> Result<(Matrix<T>, Matrix<T>)> {
    check_dim(a.rows(), eig.values.len())?;
    let plus = eig.compose(|l| l.max(T::zero()));
    let minus = eig.compose(|l| l.min(T::zero()));
    let scale = a.max_abs().max(T::one());
    let mismatch = (0..a.rows())
        .flat_map(|i| (0..a.cols()).map(move |j| (i, j)))
        .map(|(i, j)| (plus[(i, j)] + minus[(i, j)] - a[(i, j)]).abs())
        .fold(T::zero(), T::max);
    if mismatch > T::lit(1e-8) * scale {
        return Err(Error::NotHyperbolic(format!(
            "eigendecomposition does not reproduce A (mismatch {mismatch:e})"
        )));
    }
    Ok((plus, minus))
}

/// Upwind flux `A⁺ q⁻ + A⁻ q⁺`.
pub fn upwind_flux<T: Real>(plus: &Matrix<T>, minus: &Matrix<T>, left: &[T], right: &[T]) -> Vec<T> {
    let d = left.len();
    (0..d)
        .map(|k| {
            (0..d)
                .map(|l| plus[(k, l)] * left[l] + minus[(k, l)] * right[l])
                .sum()
        })
        .collect()
}

/// System with fixed `A` and `B`, diagonalized once at construction.
#[derive(Debug, Clone)]
pub struct ConstantSystem<T> {
    a: Matrix<T>,
    b: Matrix<T>,
    eigen: Eigen<T>,
}

impl<T: Real> ConstantSystem<T> {
    /// `V` and `Λ` are supplied by the caller; they must reproduce `A` to
    /// relative `1e-10`.
    pub fn new(a: Matrix<T>, b: Matrix<T>, vectors: Matrix<T>, values: Vec<T>) -> Result<Self> {
        let eigen = Eigen::new(vectors, values)?;
        check_dim(eigen.values.len(), a.rows())?;
        check_dim(a.rows(), b.rows())?;
        check_dim(a.rows(), b.cols())?;
        let back = eigen.reconstruct();
        let scale = a.max_abs().max(T::min_positive_value());
        let tol = T::lit(1e-10).max(T::epsilon() * T::lit(64.0));
        if (&back - &a).max_abs() > tol * scale {
            return Err(Error::NotHyperbolic(
                "supplied eigendecomposition does not reproduce A".into(),
            ));
        }
        Ok(Self { a, b, eigen })
    }

    /// Scalar equation `q_t + u q_z = b q`.
    pub fn scalar(u: T, b: T) -> Self {
        let one = Matrix::identity(1);
        Self {
            a: Matrix::from_diagonal(&[u]),
            b: Matrix::from_diagonal(&[b]),
            eigen: Eigen {
                vectors: one.clone(),
                values: vec![u],
                inverse: one,
            },
        }
    }
}

impl<T: Real> HyperbolicSystem<T> for ConstantSystem<T> {
    fn dim(&self) -> usize {
        self.a.rows()
    }

    fn flux(&self, _q: &[T], _z: T) -> Matrix<T> {
        self.a.clone()
    }

    fn source(&self, _q: &[T], _z: T) -> Matrix<T> {
        self.b.clone()
    }

    fn eigen(&self, _q: &[T], _z: T) -> Result<Eigen<T>> {
        Ok(self.eigen.clone())
    }

    fn flux_dz(&self, _q: &[T], _z: T) -> Option<Matrix<T>> {
        Some(Matrix::zeros(self.a.rows(), self.a.rows()))
    }

    fn is_constant(&self) -> bool {
        true
    }
}
