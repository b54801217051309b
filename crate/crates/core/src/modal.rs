//! Weak modal scaled-Laguerre-function discretization of a hyperbolic system
//! on `[L, ∞)`.
//!
//! With `S_k = Σ_j q_{k,j}` the trace at the origin and `g` the Dirichlet
//! data, the semi-discrete system reads
//!
//! ```text
//! q'_{k,i} / β = [A⁺ g + A⁻ S]_k
//!              + Σ_l ∫ q_l a_kl ∂_z L̂_i + Σ_l ∫ q_l L̂_i ∂_z a_kl + Σ_l ∫ b_kl q_l L̂_i
//! ```
//!
//! For constant `A` the first integral collapses to
//! `−β [A (q_i / 2 + Σ_{j<i} q_j)]_k`; otherwise every integral is evaluated
//! with the Gauss–Laguerre–Radau rule on the same `M + 1` nodes, which is
//! exact whenever the coefficients are polynomial of low enough degree.

use crate::basis::{laguerre_fun_all, BasisKind, BasisSpec};
use crate::error::{check_dim, Error, Result};
use crate::linalg::Matrix;
use crate::quadrature::{build_rule, NodeKind, QuadratureRule};
use crate::real::Real;
use crate::system::{flux_split, HyperbolicSystem};

/// Modal coefficients `q_{k,j}`, stored component-major.
#[derive(Debug, Clone, PartialEq)]
pub struct ModalState<T> {
    coeffs: Vec<T>,
    dim: usize,
    spec: BasisSpec<T>,
    origin_shift: T,
}

impl<T: Real> ModalState<T> {
    pub fn zeros(dim: usize, spec: BasisSpec<T>, origin_shift: T) -> Result<Self> {
        Self::from_coeffs(dim, spec, origin_shift, vec![T::zero(); dim * spec.len()])
    }

    pub fn from_coeffs(dim: usize, spec: BasisSpec<T>, origin_shift: T, coeffs: Vec<T>) -> Result<Self> {
        if spec.kind() != BasisKind::LaguerreFunctions {
            return Err(Error::Configuration(
                "modal states are expanded in scaled Laguerre functions".into(),
            ));
        }
        check_dim(dim * spec.len(), coeffs.len())?;
        if coeffs.iter().any(|c| !c.is_finite()) {
            return Err(Error::NonFinite("modal coefficients".into()));
        }
        Ok(Self {
            coeffs,
            dim,
            spec,
            origin_shift,
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn modes(&self) -> usize {
        self.spec.len()
    }

    pub fn spec(&self) -> &BasisSpec<T> {
        &self.spec
    }

    pub fn origin_shift(&self) -> T {
        self.origin_shift
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

    pub fn component(&self, k: usize) -> &[T] {
        let n = self.modes();
        &self.coeffs[k * n..(k + 1) * n]
    }

    pub fn get(&self, k: usize, j: usize) -> T {
        self.coeffs[k * self.modes() + j]
    }
}

/// Value at the origin of the semi-infinite domain, `Σ_j q_{k,j}` per
/// component.
pub fn trace_at_origin<T: Real>(state: &ModalState<T>) -> Vec<T> {
    (0..state.dim())
        .map(|k| state.component(k).iter().copied().sum())
        .collect()
}

/// Evaluates the series at physical coordinates `x ≥ origin_shift`.
/// Result is indexed `[component][point]`.
pub fn reconstruct<T: Real>(state: &ModalState<T>, x_points: &[T]) -> Result<Vec<Vec<T>>> {
    let beta = state.spec().beta();
    let m = state.spec().max_index();
    let mut out = vec![Vec::with_capacity(x_points.len()); state.dim()];
    for &x in x_points {
        let z = x - state.origin_shift();
        if !(z >= T::zero()) {
            return Err(Error::Domain {
                what: "local coordinate",
                value: z.to_f64().unwrap_or(f64::NAN),
                reason: "points must lie at or beyond the interface",
            });
        }
        let phi = laguerre_fun_all(m, beta * z);
        for (k, col) in out.iter_mut().enumerate() {
            col.push(
                state
                    .component(k)
                    .iter()
                    .zip(&phi)
                    .map(|(&c, &p)| c * p)
                    .sum(),
            );
        }
    }
    Ok(out)
}

/// `q_{k,j} = β Σ_l ω̂_l f_k(z_l) L̂_j(z_l)` on a GLR function rule, where
/// `f(k, z)` takes the local coordinate `z = x − origin_shift`.
pub fn project<T: Real>(
    f: impl Fn(usize, T) -> T,
    dim: usize,
    spec: BasisSpec<T>,
    rule: &QuadratureRule<T>,
    origin_shift: T,
) -> Result<ModalState<T>> {
    check_rule(&spec, rule)?;
    let n = spec.len();
    let beta = spec.beta();
    let mut coeffs = vec![T::zero(); dim * n];
    for (&z, &w) in rule.nodes().iter().zip(rule.weights()) {
        let phi = laguerre_fun_all(spec.max_index(), beta * z);
        for k in 0..dim {
            let fw = beta * w * f(k, z);
            for (j, &p) in phi.iter().enumerate() {
                coeffs[k * n + j] += fw * p;
            }
        }
    }
    ModalState::from_coeffs(dim, spec, origin_shift, coeffs)
}

fn check_rule<T: Real>(spec: &BasisSpec<T>, rule: &QuadratureRule<T>) -> Result<()> {
    if rule.node_kind() != NodeKind::Glr
        || rule.basis_kind() != BasisKind::LaguerreFunctions
        || spec.kind() != BasisKind::LaguerreFunctions
    {
        return Err(Error::Configuration(
            "modal projection needs a Gauss–Laguerre–Radau rule for Laguerre functions".into(),
        ));
    }
    if rule.beta() != spec.beta() || rule.max_index() != spec.max_index() {
        return Err(Error::Configuration(format!(
            "rule (beta = {}, M = {}) does not match basis (beta = {}, M = {})",
            rule.beta(),
            rule.max_index(),
            spec.beta(),
            spec.max_index()
        )));
    }
    Ok(())
}

/// Precomputed tables for repeated right-hand side evaluations.
#[derive(Debug, Clone)]
pub struct ModalDiscretization<T> {
    spec: BasisSpec<T>,
    rule: QuadratureRule<T>,
    /// `L̂_j(z_l)`, rows are nodes.
    phi: Matrix<T>,
    /// `∂_z L̂_i(z_l)`, rows are nodes.
    dphi: Matrix<T>,
}

impl<T: Real> ModalDiscretization<T> {
    pub fn new(spec: BasisSpec<T>) -> Result<Self> {
        if spec.kind() != BasisKind::LaguerreFunctions {
            return Err(Error::Configuration(
                "the modal scheme is built on scaled Laguerre functions".into(),
            ));
        }
        let rule = build_rule(
            NodeKind::Glr,
            BasisKind::LaguerreFunctions,
            spec.beta(),
            spec.max_index(),
        )?;
        let beta = spec.beta();
        let n = spec.len();
        let mut phi = Matrix::zeros(n, n);
        let mut dphi = Matrix::zeros(n, n);
        for (l, &z) in rule.nodes().iter().enumerate() {
            let vals = laguerre_fun_all(spec.max_index(), beta * z);
            let mut partial = T::zero();
            for i in 0..n {
                phi[(l, i)] = vals[i];
                dphi[(l, i)] = -beta * (T::half() * vals[i] + partial);
                partial += vals[i];
            }
        }
        Ok(Self {
            spec,
            rule,
            phi,
            dphi,
        })
    }

    pub fn spec(&self) -> &BasisSpec<T> {
        &self.spec
    }

    pub fn rule(&self) -> &QuadratureRule<T> {
        &self.rule
    }

    pub fn project(&self, f: impl Fn(usize, T) -> T, dim: usize, origin_shift: T) -> Result<ModalState<T>> {
        project(f, dim, self.spec, &self.rule, origin_shift)
    }

    /// Nodal values `q_k(z_l)`, indexed `[node][component]`.
    fn nodal_values(&self, state: &ModalState<T>) -> Vec<Vec<T>> {
        let n = self.spec.len();
        (0..n)
            .map(|l| {
                let row = self.phi.row(l);
                (0..state.dim())
                    .map(|k| state.component(k).iter().zip(row).map(|(&c, &p)| c * p).sum())
                    .collect()
            })
            .collect()
    }

    /// Time derivative of every coefficient, laid out like
    /// [`ModalState::coeffs`].
    pub fn rhs<S: HyperbolicSystem<T> + ?Sized>(
        &self,
        sys: &S,
        state: &ModalState<T>,
        boundary_g: &[T],
    ) -> Result<Vec<T>> {
        let d = sys.dim();
        check_dim(d, state.dim())?;
        check_dim(d, boundary_g.len())?;
        check_dim(self.spec.len(), state.modes())?;
        if state.spec().beta() != self.spec.beta() {
            return Err(Error::Configuration("state and discretization use different beta".into()));
        }
        let n = self.spec.len();
        let beta = self.spec.beta();
        let weights = self.rule.weights();
        let zero = T::zero();
        let mut out = vec![zero; d * n];

        // boundary term at the local origin
        let trace = trace_at_origin(state);
        let a0 = sys.flux(&trace, zero);
        let (plus, minus) = flux_split(&a0, &sys.eigen(&trace, zero)?)?;
        let bnd: Vec<T> = (0..d)
            .map(|k| {
                (0..d)
                    .map(|l| plus[(k, l)] * boundary_g[l] + minus[(k, l)] * trace[l])
                    .sum::<T>()
                    * beta
            })
            .collect();
        for k in 0..d {
            out[k * n..(k + 1) * n].iter_mut().for_each(|o| *o = bnd[k]);
        }

        let nodal = if sys.flux_is_constant() && sys.is_constant() {
            None
        } else {
            Some(self.nodal_values(state))
        };

        if sys.flux_is_constant() {
            // −β A (q_i / 2 + Σ_{j<i} q_j)
            let mut partial = vec![zero; d];
            for i in 0..n {
                let v: Vec<T> = (0..d).map(|l| T::half() * state.get(l, i) + partial[l]).collect();
                for k in 0..d {
                    let av: T = (0..d).map(|l| a0[(k, l)] * v[l]).sum();
                    out[k * n + i] -= beta * av;
                }
                for l in 0..d {
                    partial[l] += state.get(l, i);
                }
            }
        } else {
            let nodal = nodal.as_ref().expect("nodal values computed");
            let h = T::lit(1e-6) / beta;
            for (l, &z) in self.rule.nodes().iter().enumerate() {
                let q = &nodal[l];
                let a = sys.flux(q, z);
                let az = match sys.flux_dz(q, z) {
                    Some(m) => m,
                    None => {
                        let lo = (z - h).max(zero);
                        let hi = z + h;
                        (&sys.flux(q, hi) - &sys.flux(q, lo)).scale(T::one() / (hi - lo))
                    }
                };
                let aq = a.mul_vec(q)?;
                let azq = az.mul_vec(q)?;
                let bw = beta * weights[l];
                for k in 0..d {
                    for i in 0..n {
                        out[k * n + i] += bw * (aq[k] * self.dphi[(l, i)] + azq[k] * self.phi[(l, i)]);
                    }
                }
            }
        }

        if sys.is_constant() {
            let b = sys.source(&trace, zero);
            for i in 0..n {
                for k in 0..d {
                    let bq: T = (0..d).map(|l| b[(k, l)] * state.get(l, i)).sum();
                    out[k * n + i] += bq;
                }
            }
        } else {
            let nodal = nodal.as_ref().expect("nodal values computed");
            for (l, &z) in self.rule.nodes().iter().enumerate() {
                let bq = sys.source(&nodal[l], z).mul_vec(&nodal[l])?;
                let bw = beta * weights[l];
                for k in 0..d {
                    if bq[k] == zero {
                        continue;
                    }
                    let s = bw * bq[k];
                    for i in 0..n {
                        out[k * n + i] += s * self.phi[(l, i)];
                    }
                }
            }
        }
        Ok(out)
    }
}

/// One-shot right-hand side; builds the tables on every call, so prefer
/// [`ModalDiscretization::rhs`] inside time loops.
pub fn modal_rhs<T: Real, S: HyperbolicSystem<T> + ?Sized>(
    sys: &S,
    state: &ModalState<T>,
    boundary_g: &[T],
) -> Result<Vec<T>> {
    ModalDiscretization::new(*state.spec())?.rhs(sys, state, boundary_g)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn trace_examples() {
        let spec = BasisSpec::functions(1.0f64, 2).unwrap();
        let s = ModalState::from_coeffs(1, spec, 0.0, vec![1.0, -1.0, 0.5]).unwrap();
        assert_eq!(trace_at_origin(&s), vec![0.5]);
        let z = ModalState::zeros(2, spec, 0.0).unwrap();
        assert_eq!(trace_at_origin(&z), vec![0.0, 0.0]);
    }

    #[test]
    fn reconstruct_first_mode_at_origin() {
        let spec = BasisSpec::functions(0.7f64, 4).unwrap();
        let mut s = ModalState::zeros(1, spec, 3.0).unwrap();
        s.coeffs_mut()[0] = 1.0;
        assert_eq!(reconstruct(&s, &[3.0]).unwrap(), vec![vec![1.0]]);
        assert!(reconstruct(&s, &[2.0]).is_err());
    }

    #[test]
    fn projection_of_a_basis_function() {
        let spec = BasisSpec::functions(1.5f64, 6).unwrap();
        let disc = ModalDiscretization::new(spec).unwrap();
        let s = disc
            .project(|_, z| spec.laguerre_fun_eval(2, z).unwrap(), 1, 0.0)
            .unwrap();
        for (j, &c) in s.coeffs().iter().enumerate() {
            let e = if j == 2 { 1.0 } else { 0.0 };
            assert!((c - e).abs() < 1e-10, "{j}: {c}");
        }
    }

    #[test]
    fn polynomial_spec_is_rejected() {
        let spec = BasisSpec::polynomials(1.0f64, 3).unwrap();
        assert!(ModalState::zeros(1, spec, 0.0).is_err());
        assert!(ModalDiscretization::new(spec).is_err());
    }
}
