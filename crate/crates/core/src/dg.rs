//! Modal discontinuous Galerkin on a finite interval with the normalized
//! Legendre basis `φ_l = √(2l+1) P_l(ξ)` and characteristic upwind fluxes.
//!
//! Per element `m` and mode `i`,
//!
//! ```text
//! Δz q'_i = A Σ_j K_ij q_j − (F*_{m+½} φ_i(1) − F*_{m−½} φ_i(−1)) + ∫ B q φ_i dz
//! ```
//!
//! with `K_ij = ∫ φ_j dφ_i/dξ dξ = 2√((2i+1)(2j+1))` when `j < i` and `i + j`
//! is odd, zero otherwise.

use crate::basis::legendre_all;
use crate::error::{check_dim, Error, Result};
use crate::linalg::Matrix;
use crate::quadrature::gauss_legendre;
use crate::real::Real;
use crate::system::{flux_split, HyperbolicSystem};

#[derive(Debug, Clone, PartialEq)]
pub struct Mesh1D<T> {
    left: T,
    centers: Vec<T>,
    sizes: Vec<T>,
}

impl<T: Real> Mesh1D<T> {
    /// `n` equal elements on `[left, left + length]`.
    pub fn uniform(left: T, length: T, n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidParameter("mesh needs at least one element".into()));
        }
        if !(length > T::zero() && length.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "domain length must be positive, got {length}"
            )));
        }
        let dz = length / T::of(n);
        let centers = (0..n).map(|m| left + dz * (T::of(m) + T::half())).collect();
        Ok(Self {
            left,
            centers,
            sizes: vec![dz; n],
        })
    }

    /// Elements from explicit sizes, laid out left to right from `left`.
    pub fn from_sizes(left: T, sizes: Vec<T>) -> Result<Self> {
        if sizes.is_empty() || sizes.iter().any(|&s| !(s > T::zero() && s.is_finite())) {
            return Err(Error::InvalidParameter("element sizes must be positive".into()));
        }
        let mut edge = left;
        let centers = sizes
            .iter()
            .map(|&s| {
                let c = edge + T::half() * s;
                edge += s;
                c
            })
            .collect();
        Ok(Self {
            left,
            centers,
            sizes,
        })
    }

    pub fn len(&self) -> usize {
        self.sizes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sizes.is_empty()
    }

    pub fn left(&self) -> T {
        self.left
    }

    pub fn right(&self) -> T {
        self.centers[self.len() - 1] + T::half() * self.sizes[self.len() - 1]
    }

    pub fn length(&self) -> T {
        self.sizes.iter().copied().sum()
    }

    pub fn centers(&self) -> &[T] {
        &self.centers
    }

    pub fn sizes(&self) -> &[T] {
        &self.sizes
    }

    /// Element containing `z`, with faces assigned to the right element
    /// except at the domain end.
    pub fn locate(&self, z: T) -> Option<usize> {
        if z < self.left || z > self.right() {
            return None;
        }
        let m = self
            .centers
            .iter()
            .zip(&self.sizes)
            .position(|(&c, &s)| z < c + T::half() * s)
            .unwrap_or(self.len() - 1);
        Some(m)
    }
}

/// Coefficients `q^{(j)}_{k,m}` stored as `[(m · d + k) · (p + 1) + j]`.
#[derive(Debug, Clone, PartialEq)]
pub struct DGState<T> {
    coeffs: Vec<T>,
    elements: usize,
    dim: usize,
    degree: usize,
}

impl<T: Real> DGState<T> {
    pub fn zeros(elements: usize, dim: usize, degree: usize) -> Self {
        Self {
            coeffs: vec![T::zero(); elements * dim * (degree + 1)],
            elements,
            dim,
            degree,
        }
    }

    pub fn from_coeffs(elements: usize, dim: usize, degree: usize, coeffs: Vec<T>) -> Result<Self> {
        check_dim(elements * dim * (degree + 1), coeffs.len())?;
        if coeffs.iter().any(|c| !c.is_finite()) {
            return Err(Error::NonFinite("DG coefficients".into()));
        }
        Ok(Self {
            coeffs,
            elements,
            dim,
            degree,
        })
    }

    pub fn elements(&self) -> usize {
        self.elements
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn coeffs(&self) -> &[T] {
        &self.coeffs
    }

    pub fn coeffs_mut(&mut self) -> &mut [T] {
        &mut self.coeffs
    }

    pub fn into_coeffs(self) -> Vec<T> {
        self.coeffs
    }

    #[inline]
    fn offset(&self, m: usize, k: usize) -> usize {
        (m * self.dim + k) * (self.degree + 1)
    }

    /// Modes of component `k` on element `m`.
    pub fn modes(&self, m: usize, k: usize) -> &[T] {
        let o = self.offset(m, k);
        &self.coeffs[o..o + self.degree + 1]
    }

    /// Solution of element `m` at reference coordinate `ξ ∈ [−1, 1]`.
    pub fn eval_local(&self, m: usize, xi: T) -> Vec<T> {
        let phi = normalized_legendre(self.degree, xi);
        (0..self.dim)
            .map(|k| self.modes(m, k).iter().zip(&phi).map(|(&c, &p)| c * p).sum())
            .collect()
    }

    /// Solution at `z`; `None` outside the mesh.
    pub fn eval(&self, mesh: &Mesh1D<T>, z: T) -> Option<Vec<T>> {
        let m = mesh.locate(z)?;
        let xi = T::two() * (z - mesh.centers()[m]) / mesh.sizes()[m];
        Some(self.eval_local(m, xi.max(-T::one()).min(T::one())))
    }

    /// Values at the element centres, indexed `[component][element]`.
    pub fn center_values(&self) -> Vec<Vec<T>> {
        let mut out = vec![Vec::with_capacity(self.elements); self.dim];
        for m in 0..self.elements {
            for (k, v) in self.eval_local(m, T::zero()).into_iter().enumerate() {
                out[k].push(v);
            }
        }
        out
    }
}

/// `√(2l+1) P_l(ξ)` for `l = 0..=p`.
pub fn normalized_legendre<T: Real>(p: usize, xi: T) -> Vec<T> {
    legendre_all(p, xi)
        .into_iter()
        .enumerate()
        .map(|(l, v)| v * T::of(2 * l + 1).sqrt())
        .collect()
}

/// Trace of the last element at the right end of the mesh.
pub fn trace_at_right<T: Real>(state: &DGState<T>) -> Vec<T> {
    state.eval_local(state.elements() - 1, T::one())
}

/// Trace of the first element at the left end of the mesh.
pub fn trace_at_left<T: Real>(state: &DGState<T>) -> Vec<T> {
    state.eval_local(0, -T::one())
}

/// Elementwise L² projection with a `(p + 2)`-point Gauss–Legendre rule.
pub fn project_dg<T: Real>(f: impl Fn(usize, T) -> T, dim: usize, mesh: &Mesh1D<T>, p: usize) -> Result<DGState<T>> {
    let (xi, w) = gauss_legendre::<T>(p + 2)?;
    let tables: Vec<Vec<T>> = xi.iter().map(|&x| normalized_legendre(p, x)).collect();
    let mut state = DGState::<T>::zeros(mesh.len(), dim, p);
    for m in 0..mesh.len() {
        let (c, h) = (mesh.centers()[m], mesh.sizes()[m]);
        for k in 0..dim {
            let o = state.offset(m, k);
            for (g, (&x, &wg)) in xi.iter().zip(&w).enumerate() {
                let v = f(k, c + T::half() * h * x) * wg * T::half();
                for j in 0..=p {
                    state.coeffs[o + j] += v * tables[g][j];
                }
            }
        }
    }
    if state.coeffs.iter().any(|c: &T| !c.is_finite()) {
        return Err(Error::NonFinite("projected DG state".into()));
    }
    Ok(state)
}

/// Precomputed volume and face tables for degree `p`.
#[derive(Debug, Clone)]
pub struct DgDiscretization<T> {
    degree: usize,
    /// `K_ij = ∫ φ_j dφ_i/dξ dξ`.
    stiffness: Matrix<T>,
    face_right: Vec<T>,
    face_left: Vec<T>,
    gauss_nodes: Vec<T>,
    gauss_weights: Vec<T>,
    /// `φ_j(ξ_g)`, rows are Gauss points.
    gauss_phi: Matrix<T>,
}

impl<T: Real> DgDiscretization<T> {
    pub fn new(degree: usize) -> Result<Self> {
        let n = degree + 1;
        let stiffness = Matrix::from_fn(n, n, |i, j| {
            if j < i && (i + j) % 2 == 1 {
                T::two() * T::of((2 * i + 1) * (2 * j + 1)).sqrt()
            } else {
                T::zero()
            }
        });
        let face_right = (0..n).map(|i| T::of(2 * i + 1).sqrt()).collect();
        let face_left = (0..n)
            .map(|i| {
                let s = T::of(2 * i + 1).sqrt();
                if i % 2 == 0 {
                    s
                } else {
                    -s
                }
            })
            .collect();
        let (gauss_nodes, gauss_weights) = gauss_legendre::<T>(degree + 2)?;
        let gauss_phi = Matrix::from_fn(gauss_nodes.len(), n, |g, j| {
            normalized_legendre(degree, gauss_nodes[g])[j]
        });
        Ok(Self {
            degree,
            stiffness,
            face_right,
            face_left,
            gauss_nodes,
            gauss_weights,
            gauss_phi,
        })
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    fn face_value_into(&self, state: &DGState<T>, m: usize, phi: &[T], out: &mut [T]) {
        for (k, v) in out.iter_mut().enumerate() {
            let mut acc = T::zero();
            for (&c, &p) in state.modes(m, k).iter().zip(phi) {
                acc += c * p;
            }
            *v = acc;
        }
    }

    /// Time derivative of every coefficient, laid out like
    /// [`DGState::coeffs`]. `left_exterior` and `right_exterior` are the
    /// ghost states beyond the two ends of the mesh.
    pub fn rhs<S: HyperbolicSystem<T> + ?Sized>(
        &self,
        sys: &S,
        mesh: &Mesh1D<T>,
        state: &DGState<T>,
        left_exterior: &[T],
        right_exterior: &[T],
    ) -> Result<Vec<T>> {
        let d = sys.dim();
        let n = self.degree + 1;
        check_dim(d, state.dim())?;
        check_dim(mesh.len(), state.elements())?;
        check_dim(self.degree, state.degree())?;
        check_dim(d, left_exterior.len())?;
        check_dim(d, right_exterior.len())?;
        if !sys.flux_is_constant() {
            return Err(Error::Unsupported(
                "DG volume terms assume a constant flux matrix".into(),
            ));
        }
        let ne = mesh.len();
        let zero = T::zero();
        let probe = vec![zero; d];
        let a = sys.flux(&probe, mesh.left());
        let (plus, minus) = flux_split(&a, &sys.eigen(&probe, mesh.left())?)?;

        // face fluxes, face f between elements f−1 and f, flat [f · d + k]
        let mut fluxes = vec![zero; (ne + 1) * d];
        let mut lhs = left_exterior.to_vec();
        let mut rhs = vec![zero; d];
        for f in 0..=ne {
            if f > 0 {
                self.face_value_into(state, f - 1, &self.face_right, &mut lhs);
            }
            if f == ne {
                rhs.copy_from_slice(right_exterior);
            } else {
                self.face_value_into(state, f, &self.face_left, &mut rhs);
            }
            for k in 0..d {
                let mut acc = zero;
                for l in 0..d {
                    acc += plus[(k, l)] * lhs[l] + minus[(k, l)] * rhs[l];
                }
                fluxes[f * d + k] = acc;
            }
        }

        let mut out = vec![zero; state.coeffs().len()];
        let b_const = if sys.is_constant() {
            Some(sys.source(&probe, mesh.left()))
        } else {
            None
        };
        // per-element scratch, [k · n + j]
        let mut aq = vec![zero; d * n];
        let mut src = vec![zero; d * n];
        for m in 0..ne {
            let h = mesh.sizes()[m];
            let inv_h = T::one() / h;
            let q = &state.coeffs()[state.offset(m, 0)..state.offset(m, 0) + d * n];
            for k in 0..d {
                for j in 0..n {
                    let mut acc = zero;
                    for l in 0..d {
                        acc += a[(k, l)] * q[l * n + j];
                    }
                    aq[k * n + j] = acc;
                }
            }
            match &b_const {
                Some(b) => {
                    for k in 0..d {
                        for i in 0..n {
                            let mut acc = zero;
                            for l in 0..d {
                                acc += b[(k, l)] * q[l * n + i];
                            }
                            src[k * n + i] = acc * h;
                        }
                    }
                }
                None => {
                    src.iter_mut().for_each(|v| *v = zero);
                    let c = mesh.centers()[m];
                    for (g, &xi) in self.gauss_nodes.iter().enumerate() {
                        let q = state.eval_local(m, xi);
                        let bq = sys.source(&q, c + T::half() * h * xi).mul_vec(&q)?;
                        let w = self.gauss_weights[g] * T::half() * h;
                        for k in 0..d {
                            for i in 0..n {
                                src[k * n + i] += w * bq[k] * self.gauss_phi[(g, i)];
                            }
                        }
                    }
                }
            }
            for k in 0..d {
                let o = state.offset(m, k);
                for i in 0..n {
                    let mut vol = zero;
                    for j in 0..i {
                        vol += self.stiffness[(i, j)] * aq[k * n + j];
                    }
                    let face = fluxes[(m + 1) * d + k] * self.face_right[i] - fluxes[m * d + k] * self.face_left[i];
                    out[o + i] = (vol - face + src[k * n + i]) * inv_h;
                }
            }
        }
        Ok(out)
    }
}

/// One-shot DG right-hand side.
pub fn dg_rhs<T: Real, S: HyperbolicSystem<T> + ?Sized>(
    sys: &S,
    mesh: &Mesh1D<T>,
    state: &DGState<T>,
    left_exterior: &[T],
    right_exterior: &[T],
) -> Result<Vec<T>> {
    DgDiscretization::new(state.degree())?.rhs(sys, mesh, state, left_exterior, right_exterior)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::system::ConstantSystem;

    #[test]
    fn p0_is_first_order_upwind() {
        let mesh = Mesh1D::uniform(0.0f64, 1.0, 4).unwrap();
        let q = vec![1.0, 3.0, 2.0, -1.0];
        let state = DGState::from_coeffs(4, 1, 0, q.clone()).unwrap();
        let sys = ConstantSystem::scalar(2.0, 0.0);
        let out = dg_rhs(&sys, &mesh, &state, &[0.5], &[7.0]).unwrap();
        let mut prev = 0.5;
        for m in 0..4 {
            let expect = -2.0 * (q[m] - prev) / 0.25;
            assert!((out[m] - expect).abs() < 1e-13);
            prev = q[m];
        }
    }

    #[test]
    fn traces_for_linear_elements() {
        let state = DGState::from_coeffs(2, 1, 1, vec![0.0, 0.0, 1.0, 0.25]).unwrap();
        let t = trace_at_right(&state)[0];
        assert!((t - (1.0 + 3f64.sqrt() * 0.25)).abs() < 1e-15);
        let p0 = DGState::from_coeffs(3, 1, 0, vec![1.0, 2.0, 4.5]).unwrap();
        assert_eq!(trace_at_right(&p0), vec![4.5]);
    }

    #[test]
    fn constant_projection() {
        let mesh = Mesh1D::uniform(-1.0f64, 3.0, 5).unwrap();
        let s = project_dg(|_, _| 2.5, 1, &mesh, 2).unwrap();
        for m in 0..5 {
            let c = s.modes(m, 0);
            assert!((c[0] - 2.5).abs() < 1e-14 && c[1].abs() < 1e-14 && c[2].abs() < 1e-14);
        }
    }

    #[test]
    fn mesh_layout() {
        let mesh = Mesh1D::uniform(0.0f64, 10.0, 4).unwrap();
        assert_eq!(mesh.centers(), &[1.25, 3.75, 6.25, 8.75]);
        assert!((mesh.length() - 10.0).abs() < 1e-14);
        assert_eq!(mesh.locate(2.5), Some(1));
        assert_eq!(mesh.locate(10.0), Some(3));
        assert_eq!(mesh.locate(10.5), None);
        assert!(Mesh1D::uniform(0.0f64, 1.0, 0).is_err());
    }
}
