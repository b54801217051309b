//! Semi-discrete operators `dq/dt = A q + g` for the scalar advection
//! equation `q_t + u q_z = 0` on `[0, ∞)`, for every combination of
//! formulation, Laguerre family, node family and boundary direction.
//!
//! Nodal operators are written with the diagonal weight matrix `Ω` of the
//! classical scaled weights, `D` the differentiation matrix of the chosen
//! cardinal basis and `h` the cardinal values at the origin:
//!
//! | variant | inflow (`u > 0`) | outflow (`u < 0`) |
//! |---|---|---|
//! | strong, GLR | `−u D_M`, `g_i = −u q_L D_{i0}` | `−u D` |
//! | weak nodal, GL | `u Ω⁻¹DΩ − c I`, `g = u q_L Ω⁻¹h` | `u Ω⁻¹hhᵀ + u Ω⁻¹DΩ − c I` |
//! | weak nodal, GLR | `u Ω_M⁻¹D_MΩ_M − c I`, `g_i = ω_0 u q_L D_{i0}/ω_i` | `(u/ω_0) e_0e_0ᵀ + u Ω⁻¹DΩ − c I` |
//! | weak modal, functions | `−βu L½`, `g = βu q_L 1` | `βu L½ᵀ` |
//! | weak modal, polynomials | `−βu L₁`, `g = βu q_L 1` | `βu U₀` |
//!
//! with `c = βu` for Laguerre polynomials and `0` for functions, `L½` lower
//! triangular with `½` on the diagonal and ones below, `L₁` lower triangular
//! ones and `U₀` strictly upper triangular ones. `X_M` drops the first row
//! and column (the boundary node, whose value is the inflow datum).

use crate::basis::BasisKind;
use crate::error::{check_dim, Error, Result};
use crate::linalg::Matrix;
use crate::quadrature::{build_diff_matrix, build_rule, NodeKind};
use crate::real::Real;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Form {
    StrongCollocation,
    WeakNodal,
    WeakModal,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Direction<T> {
    /// `u > 0`, Dirichlet value `q(0, t) = q_L`.
    Inflow { boundary_value: T },
    /// `u < 0`, nothing prescribed.
    Outflow,
}

impl<T> Direction<T> {
    pub fn is_inflow(&self) -> bool {
        matches!(self, Direction::Inflow { .. })
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SchemeVariant<T> {
    pub form: Form,
    pub basis: BasisKind,
    /// Ignored for the modal form.
    pub nodes: NodeKind,
    pub direction: Direction<T>,
}

impl<T: Real> SchemeVariant<T> {
    pub fn new(form: Form, basis: BasisKind, nodes: NodeKind, direction: Direction<T>) -> Self {
        Self {
            form,
            basis,
            nodes,
            direction,
        }
    }

    /// Human-readable tag, e.g. `WeakNodal/LaguerreFunctions/Glr/outflow`.
    pub fn label(&self) -> String {
        let dir = if self.direction.is_inflow() {
            "inflow"
        } else {
            "outflow"
        };
        match self.form {
            Form::WeakModal => format!("{:?}/{:?}/{dir}", self.form, self.basis),
            _ => format!("{:?}/{:?}/{:?}/{dir}", self.form, self.basis, self.nodes),
        }
    }
}

/// The pair `(A, g)`; `dof_offset` is 1 when the boundary value `q_0` has
/// been eliminated so the unknowns are `q_1, …, q_M`.
#[derive(Debug, Clone)]
pub struct SemiDiscreteOperator<T> {
    matrix: Matrix<T>,
    forcing: Vec<T>,
    dof_offset: usize,
}

impl<T: Real> SemiDiscreteOperator<T> {
    pub fn new(matrix: Matrix<T>, forcing: Vec<T>, dof_offset: usize) -> Result<Self> {
        if !matrix.is_square() {
            return Err(Error::DimensionMismatch {
                expected: matrix.rows(),
                found: matrix.cols(),
            });
        }
        check_dim(matrix.rows(), forcing.len())?;
        Ok(Self {
            matrix,
            forcing,
            dof_offset,
        })
    }

    pub fn matrix(&self) -> &Matrix<T> {
        &self.matrix
    }

    pub fn forcing(&self) -> &[T] {
        &self.forcing
    }

    pub fn dof_offset(&self) -> usize {
        self.dof_offset
    }

    pub fn dim(&self) -> usize {
        self.forcing.len()
    }

    /// `A q + g`. The operators are autonomous, `t` is accepted for use as an
    /// ODE right-hand side.
    pub fn apply(&self, q: &[T], _t: T) -> Result<Vec<T>> {
        let mut out = self.matrix.mul_vec(q)?;
        out.iter_mut().zip(&self.forcing).for_each(|(o, &g)| *o += g);
        Ok(out)
    }
}

/// Assembles `(A, g)` for `variant` with scaling `beta`, truncation `m` and
/// advection speed `u`.
pub fn assemble<T: Real>(
    variant: &SchemeVariant<T>,
    beta: T,
    m: usize,
    u: T,
) -> Result<SemiDiscreteOperator<T>> {
    match variant.direction {
        Direction::Inflow { .. } if !(u > T::zero()) => {
            return Err(Error::Configuration(format!(
                "inflow boundary needs u > 0, got u = {u}"
            )))
        }
        Direction::Outflow if !(u < T::zero()) => {
            return Err(Error::Configuration(format!(
                "outflow boundary needs u < 0, got u = {u}"
            )))
        }
        _ => {}
    }
    if !(beta > T::zero() && beta.is_finite()) {
        return Err(Error::InvalidParameter(format!(
            "scaling beta must be positive and finite, got {beta}"
        )));
    }
    match variant.form {
        Form::WeakModal => Ok(weak_modal(variant, beta, m, u)),
        Form::StrongCollocation => strong_collocation(variant, beta, m, u),
        Form::WeakNodal => weak_nodal(variant, beta, m, u),
    }
}

fn weak_modal<T: Real>(variant: &SchemeVariant<T>, beta: T, m: usize, u: T) -> SemiDiscreteOperator<T> {
    let n = m + 1;
    let bu = beta * u;
    let (matrix, forcing) = match (variant.basis, variant.direction) {
        (BasisKind::LaguerreFunctions, Direction::Inflow { boundary_value }) => (
            Matrix::from_fn(n, n, |i, j| {
                if i == j {
                    -bu * T::half()
                } else if j < i {
                    -bu
                } else {
                    T::zero()
                }
            }),
            vec![bu * boundary_value; n],
        ),
        (BasisKind::LaguerreFunctions, Direction::Outflow) => (
            Matrix::from_fn(n, n, |i, j| {
                if i == j {
                    bu * T::half()
                } else if j > i {
                    bu
                } else {
                    T::zero()
                }
            }),
            vec![T::zero(); n],
        ),
        (BasisKind::LaguerrePolynomials, Direction::Inflow { boundary_value }) => (
            Matrix::from_fn(n, n, |i, j| if j <= i { -bu } else { T::zero() }),
            vec![bu * boundary_value; n],
        ),
        (BasisKind::LaguerrePolynomials, Direction::Outflow) => (
            Matrix::from_fn(n, n, |i, j| if j > i { bu } else { T::zero() }),
            vec![T::zero(); n],
        ),
    };
    SemiDiscreteOperator {
        matrix,
        forcing,
        dof_offset: 0,
    }
}

fn strong_collocation<T: Real>(
    variant: &SchemeVariant<T>,
    beta: T,
    m: usize,
    u: T,
) -> Result<SemiDiscreteOperator<T>> {
    if variant.nodes != NodeKind::Glr {
        return Err(Error::Unsupported(
            "strong collocation needs Gauss–Laguerre–Radau nodes".into(),
        ));
    }
    let rule = build_rule(NodeKind::Glr, variant.basis, beta, m)?;
    let d = build_diff_matrix(&rule).into_matrix();
    Ok(match variant.direction {
        Direction::Inflow { boundary_value } => {
            let forcing = (1..=m).map(|i| -u * boundary_value * d[(i, 0)]).collect();
            SemiDiscreteOperator {
                matrix: d.trailing(1).scale(-u),
                forcing,
                dof_offset: 1,
            }
        }
        Direction::Outflow => SemiDiscreteOperator {
            matrix: d.scale(-u),
            forcing: vec![T::zero(); m + 1],
            dof_offset: 0,
        },
    })
}

fn weak_nodal<T: Real>(
    variant: &SchemeVariant<T>,
    beta: T,
    m: usize,
    u: T,
) -> Result<SemiDiscreteOperator<T>> {
    let rule = build_rule(variant.nodes, variant.basis, beta, m)?;
    let d = build_diff_matrix(&rule).into_matrix();
    let log_w = rule.log_classical_weights();
    let n = m + 1;
    let shift = match variant.basis {
        BasisKind::LaguerrePolynomials => beta * u,
        BasisKind::LaguerreFunctions => T::zero(),
    };
    // u Ω⁻¹ D Ω − shift·I, formed through log-weight ratios
    let similar = Matrix::from_fn(n, n, |i, j| {
        let v = u * d[(i, j)] * (log_w[j] - log_w[i]).exp();
        if i == j {
            v - shift
        } else {
            v
        }
    });
    Ok(match (variant.nodes, variant.direction) {
        (NodeKind::Gl, Direction::Inflow { boundary_value }) => {
            let h = rule.cardinal_values_at_origin();
            let forcing = (0..n)
                .map(|i| u * boundary_value * h[i] * (-log_w[i]).exp())
                .collect();
            SemiDiscreteOperator {
                matrix: similar,
                forcing,
                dof_offset: 0,
            }
        }
        (NodeKind::Gl, Direction::Outflow) => {
            let h = rule.cardinal_values_at_origin();
            let matrix = Matrix::from_fn(n, n, |i, j| {
                similar[(i, j)] + u * h[i] * h[j] * (-log_w[i]).exp()
            });
            SemiDiscreteOperator {
                matrix,
                forcing: vec![T::zero(); n],
                dof_offset: 0,
            }
        }
        (NodeKind::Glr, Direction::Inflow { boundary_value }) => {
            let forcing = (1..=m)
                .map(|i| u * boundary_value * d[(i, 0)] * (log_w[0] - log_w[i]).exp())
                .collect();
            SemiDiscreteOperator {
                matrix: similar.trailing(1),
                forcing,
                dof_offset: 1,
            }
        }
        (NodeKind::Glr, Direction::Outflow) => {
            let mut matrix = similar;
            matrix[(0, 0)] += u * (-log_w[0]).exp();
            SemiDiscreteOperator {
                matrix,
                forcing: vec![T::zero(); n],
                dof_offset: 0,
            }
        }
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::basis::laguerre_fun;
    use crate::spectrum::eigenvalues;

    fn variant(form: Form, basis: BasisKind, nodes: NodeKind, dir: Direction<f64>) -> SchemeVariant<f64> {
        SchemeVariant::new(form, basis, nodes, dir)
    }

    #[test]
    fn modal_functions_inflow_example() {
        let v = variant(
            Form::WeakModal,
            BasisKind::LaguerreFunctions,
            NodeKind::Glr,
            Direction::Inflow { boundary_value: 2.0 },
        );
        let op = assemble(&v, 1.0, 3, 1.0).unwrap();
        let a = op.matrix();
        for i in 0..4 {
            for j in 0..4 {
                let expect = if i == j { -0.5 } else if j < i { -1.0 } else { 0.0 };
                assert_eq!(a[(i, j)], expect);
            }
        }
        assert_eq!(op.forcing(), &[2.0, 2.0, 2.0, 2.0]);
        assert_eq!(op.dof_offset(), 0);
    }

    #[test]
    fn modal_polynomials_outflow_is_nilpotent() {
        let v = variant(Form::WeakModal, BasisKind::LaguerrePolynomials, NodeKind::Gl, Direction::Outflow);
        let op = assemble(&v, 1.0, 2, -1.0).unwrap();
        let a = op.matrix();
        for i in 0..3 {
            for j in 0..3 {
                let expect = if j > i { -1.0 } else { 0.0 };
                assert_eq!(a[(i, j)], expect);
            }
        }
        assert!(eigenvalues(a).unwrap().iter().all(|z| z.norm() == 0.0));
        assert!(op.forcing().iter().all(|&g| g == 0.0));
    }

    #[test]
    fn strong_outflow_is_the_differentiation_matrix() {
        let v = variant(Form::StrongCollocation, BasisKind::LaguerreFunctions, NodeKind::Glr, Direction::Outflow);
        let op = assemble(&v, 1.0, 5, -1.0).unwrap();
        let rule = build_rule::<f64>(NodeKind::Glr, BasisKind::LaguerreFunctions, 1.0, 5).unwrap();
        let samples: Vec<f64> = rule.nodes().iter().map(|&z| laguerre_fun(2, z)).collect();
        let out = op.apply(&samples, 0.0).unwrap();
        for (i, &z) in rule.nodes().iter().enumerate() {
            let exact = -laguerre_fun(0, z) - laguerre_fun(1, z) - 0.5 * laguerre_fun(2, z);
            assert!((out[i] - exact).abs() < 1e-8);
        }
    }

    #[test]
    fn dof_layout() {
        for form in [Form::StrongCollocation, Form::WeakNodal] {
            let v = variant(form, BasisKind::LaguerreFunctions, NodeKind::Glr, Direction::Inflow { boundary_value: 1.0 });
            let op = assemble(&v, 1.0, 8, 1.0).unwrap();
            assert_eq!((op.dim(), op.dof_offset()), (8, 1));
            let v = variant(form, BasisKind::LaguerreFunctions, NodeKind::Glr, Direction::Outflow);
            let op = assemble(&v, 1.0, 8, -1.0).unwrap();
            assert_eq!((op.dim(), op.dof_offset()), (9, 0));
        }
        let v = variant(Form::WeakNodal, BasisKind::LaguerrePolynomials, NodeKind::Gl, Direction::Inflow { boundary_value: 1.0 });
        assert_eq!(assemble(&v, 1.0, 8, 1.0).unwrap().dim(), 9);
    }

    #[test]
    fn configuration_errors() {
        let inflow = variant(Form::WeakModal, BasisKind::LaguerreFunctions, NodeKind::Glr, Direction::Inflow { boundary_value: 0.0 });
        assert!(matches!(assemble(&inflow, 1.0, 4, -1.0), Err(Error::Configuration(_))));
        assert!(matches!(assemble(&inflow, 1.0, 4, 0.0), Err(Error::Configuration(_))));
        let outflow = variant(Form::WeakModal, BasisKind::LaguerreFunctions, NodeKind::Glr, Direction::Outflow);
        assert!(matches!(assemble(&outflow, 1.0, 4, 1.0), Err(Error::Configuration(_))));
        let strong_gl = variant(Form::StrongCollocation, BasisKind::LaguerreFunctions, NodeKind::Gl, Direction::Outflow);
        assert!(matches!(assemble(&strong_gl, 1.0, 4, -1.0), Err(Error::Unsupported(_))));
    }

    #[test]
    fn apply_examples() {
        let zero = SemiDiscreteOperator::new(Matrix::<f64>::zeros(3, 3), vec![0.0; 3], 0).unwrap();
        assert_eq!(zero.apply(&[1.0, -2.0, 3.0], 0.0).unwrap(), vec![0.0; 3]);

        // single active mode e_0 with q_L = 0: -βu/2 on mode 0, -βu on the rest
        let v = variant(Form::WeakModal, BasisKind::LaguerreFunctions, NodeKind::Glr, Direction::Inflow { boundary_value: 0.0 });
        let op = assemble(&v, 2.0, 4, 1.5).unwrap();
        let out = op.apply(&[1.0, 0.0, 0.0, 0.0, 0.0], 0.0).unwrap();
        assert_eq!(out, vec![-1.5, -3.0, -3.0, -3.0, -3.0]);

        assert!(zero.apply(&[1.0], 0.0).is_err());
    }

    #[test]
    fn apply_matches_dense_product() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        let a = Matrix::from_fn(6, 6, |_, _| rng.gen_range(-1.0..1.0));
        let g: Vec<f64> = (0..6).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let q: Vec<f64> = (0..6).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let op = SemiDiscreteOperator::new(a.clone(), g.clone(), 0).unwrap();
        let out = op.apply(&q, 0.3).unwrap();
        for i in 0..6 {
            let mut s = g[i];
            for j in 0..6 {
                s += a[(i, j)] * q[j];
            }
            assert!((out[i] - s).abs() < 1e-13);
        }
    }
}
