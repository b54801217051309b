//! Scaled Gauss–Laguerre (GL) and Gauss–Laguerre–Radau (GLR) rules, their
//! Lagrange cardinal functions and differentiation matrices.
//!
//! Nodes are computed for the unit scaling and mapped with `z = x / β`.
//! GL nodes come from the Jacobi matrix (Golub–Welsch) and are polished with
//! Newton on `L_{M+1}`. GLR nodes are `0` plus the `M` zeros of
//! `L'_{M+1}`, each isolated between two consecutive GL nodes (Rolle) and
//! found by bracketed Newton. Weights use the closed forms
//!
//! * GL:  `w_k = x_k / ((M+2)^2 L_{M+2}(x_k)^2)`
//! * GLR: `w_0 = 1/(M+1)`, `w_k = 1 / ((M+1) L_M(x_k)^2)`
//!
//! evaluated through Laguerre *functions*, which gives the `e^{x}`-absorbed
//! weights directly and keeps everything finite up to `M = 200`.

use crate::basis::{laguerre_fun, laguerre_fun_all, legendre_all, BasisKind};
use crate::error::{Error, Result};
use crate::linalg::Matrix;
use crate::real::Real;

/// Largest truncation index for which rules are built.
pub const MAX_SUPPORTED_M: usize = 200;

const NEWTON_MAX_ITER: usize = 100;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum NodeKind {
    /// Gauss–Laguerre: `M + 1` interior nodes.
    Gl,
    /// Gauss–Laguerre–Radau: the origin plus `M` interior nodes.
    Glr,
}

/// A scaled GL/GLR rule attached to one Laguerre family.
///
/// `weights` follow the family: for Laguerre functions they absorb the
/// exponential so that `Σ ω̂_l f(z_l) ≈ ∫ f dz`; for polynomials they are
/// the classical ones with `Σ ω_l p(z_l) ≈ ∫ p e^{-βz} dz`. The classical
/// weights are kept (in log form) for both families since the weak nodal
/// operators are written in terms of them.
#[derive(Debug, Clone)]
pub struct QuadratureRule<T> {
    node_kind: NodeKind,
    basis_kind: BasisKind,
    beta: T,
    nodes: Vec<T>,
    weights: Vec<T>,
    log_classical_weights: Vec<T>,
    // barycentric normalizers c_i = Π_{k≠i} (z_i − z_k), as (sign, ln|c_i|)
    bary_sign: Vec<T>,
    bary_log: Vec<T>,
}

impl<T: Real> QuadratureRule<T> {
    pub fn node_kind(&self) -> NodeKind {
        self.node_kind
    }

    pub fn basis_kind(&self) -> BasisKind {
        self.basis_kind
    }

    pub fn beta(&self) -> T {
        self.beta
    }

    /// Highest node index `M`.
    pub fn max_index(&self) -> usize {
        self.nodes.len() - 1
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn nodes(&self) -> &[T] {
        &self.nodes
    }

    pub fn weights(&self) -> &[T] {
        &self.weights
    }

    /// Weights for `∫ f e^{-βz} dz`, whatever the family. These underflow to
    /// zero for very large nodes; use [`Self::log_classical_weights`] when
    /// forming ratios.
    pub fn classical_weights(&self) -> Vec<T> {
        self.log_classical_weights.iter().map(|w| w.exp()).collect()
    }

    pub fn log_classical_weights(&self) -> &[T] {
        &self.log_classical_weights
    }

    /// Weights for plain integrals `∫ f dz` (the `e^{βz}`-absorbed ones).
    pub fn function_weights(&self) -> Vec<T> {
        self.log_classical_weights
            .iter()
            .zip(&self.nodes)
            .map(|(&lw, &z)| (lw + self.beta * z).exp())
            .collect()
    }

    /// Applies the rule to samples of an integrand at the nodes.
    pub fn integrate(&self, f: impl Fn(T) -> T) -> T {
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(|(&z, &w)| w * f(z))
            .sum()
    }

    fn envelope_exponent(&self, z: T, zj: T) -> T {
        match self.basis_kind {
            BasisKind::LaguerreFunctions => -self.beta * (z - zj) * T::half(),
            BasisKind::LaguerrePolynomials => T::zero(),
        }
    }

    /// Cardinal function `ĥ^β_j` (functions) or `h^β_j` (polynomials) at `z`.
    pub fn lagrange_cardinal_eval(&self, j: usize, z: T) -> Result<T> {
        let m = self.max_index();
        if j > m {
            return Err(Error::IndexOutOfRange { index: j, max: m });
        }
        let zj = self.nodes[j];
        let mut log_mag = self.envelope_exponent(z, zj) - self.bary_log[j];
        let mut sign = self.bary_sign[j];
        for (k, &zk) in self.nodes.iter().enumerate() {
            if k == j {
                continue;
            }
            let d = z - zk;
            if d == T::zero() {
                return Ok(T::zero());
            }
            log_mag += d.abs().ln();
            if d < T::zero() {
                sign = -sign;
            }
        }
        Ok(sign * log_mag.exp())
    }

    /// Values of all cardinal functions at the origin.
    pub fn cardinal_values_at_origin(&self) -> Vec<T> {
        (0..self.len())
            .map(|j| self.lagrange_cardinal_eval(j, T::zero()).expect("index in range"))
            .collect()
    }
}

/// `D_β` with entries `(i, j)` equal to the derivative of the `j`-th cardinal
/// function at node `i`.
#[derive(Debug, Clone)]
pub struct DiffMatrix<T>(Matrix<T>);

impl<T: Real> DiffMatrix<T> {
    pub fn matrix(&self) -> &Matrix<T> {
        &self.0
    }

    pub fn into_matrix(self) -> Matrix<T> {
        self.0
    }

    pub fn apply(&self, v: &[T]) -> Result<Vec<T>> {
        self.0.mul_vec(v)
    }
}

/// Builds the scaled rule with `M + 1` nodes.
pub fn build_rule<T: Real>(
    node_kind: NodeKind,
    basis_kind: BasisKind,
    beta: T,
    m: usize,
) -> Result<QuadratureRule<T>> {
    if !(beta > T::zero() && beta.is_finite()) {
        return Err(Error::InvalidParameter(format!(
            "scaling beta must be positive and finite, got {beta}"
        )));
    }
    if m > MAX_SUPPORTED_M {
        return Err(Error::Construction(format!(
            "M = {m} exceeds the supported maximum {MAX_SUPPORTED_M}"
        )));
    }
    let (x, log_w): (Vec<T>, Vec<T>) = match node_kind {
        NodeKind::Gl => unit_gauss_laguerre(m)?,
        NodeKind::Glr => {
            if m < 1 {
                return Err(Error::Construction(
                    "a Radau rule needs M >= 1".to_string(),
                ));
            }
            unit_gauss_laguerre_radau(m)?
        }
    };
    let log_beta = beta.ln();
    let nodes: Vec<T> = x.iter().map(|&xi| xi / beta).collect();
    // log_w holds the absorbed (function) weights of the unit rule
    let log_classical_weights: Vec<T> = log_w
        .iter()
        .zip(&x)
        .map(|(&lw, &xi)| lw - xi - log_beta)
        .collect();
    let weights = match basis_kind {
        BasisKind::LaguerreFunctions => log_w.iter().map(|&lw| (lw - log_beta).exp()).collect(),
        BasisKind::LaguerrePolynomials => log_classical_weights.iter().map(|w| w.exp()).collect(),
    };
    let (bary_sign, bary_log) = barycentric_normalizers(&nodes);
    Ok(QuadratureRule {
        node_kind,
        basis_kind,
        beta,
        nodes,
        weights,
        log_classical_weights,
        bary_sign,
        bary_log,
    })
}

fn barycentric_normalizers<T: Real>(nodes: &[T]) -> (Vec<T>, Vec<T>) {
    let n = nodes.len();
    let mut sign = vec![T::one(); n];
    let mut log = vec![T::zero(); n];
    for i in 0..n {
        for k in 0..n {
            if k == i {
                continue;
            }
            let d = nodes[i] - nodes[k];
            log[i] += d.abs().ln();
            if d < T::zero() {
                sign[i] = -sign[i];
            }
        }
    }
    (sign, log)
}

/// Differentiation matrix of the rule's cardinal basis.
pub fn build_diff_matrix<T: Real>(rule: &QuadratureRule<T>) -> DiffMatrix<T> {
    let z = &rule.nodes;
    let n = z.len();
    let mut d = Matrix::zeros(n, n);
    for i in 0..n {
        let mut direct_diag = T::zero();
        for j in 0..n {
            if i == j {
                continue;
            }
            let dz = z[i] - z[j];
            direct_diag += T::one() / dz;
            let log_ratio = rule.bary_log[i] - rule.bary_log[j];
            let poly = rule.bary_sign[i] * rule.bary_sign[j] * log_ratio.exp() / dz;
            d[(i, j)] = match rule.basis_kind {
                BasisKind::LaguerrePolynomials => poly,
                BasisKind::LaguerreFunctions => {
                    rule.bary_sign[i] * rule.bary_sign[j]
                        * (log_ratio - rule.beta * dz * T::half()).exp()
                        / dz
                }
            };
        }
        // Direct diagonal rather than the negative row sum: off-diagonal
        // polynomial entries reach 1e36 at M = 50 and the cancellation would
        // swamp the diagonal, wrecking every spectrum built from D.
        d[(i, i)] = match rule.basis_kind {
            BasisKind::LaguerrePolynomials => direct_diag,
            BasisKind::LaguerreFunctions => direct_diag - rule.beta * T::half(),
        };
    }
    DiffMatrix(d)
}

fn newton_tolerance<T: Real>() -> T {
    T::lit(1e-14).max(T::lit(16.0) * T::epsilon())
}

/// Unit GL nodes (zeros of `L_{m+1}`) and the logs of their absorbed weights.
fn unit_gauss_laguerre<T: Real>(m: usize) -> Result<(Vec<T>, Vec<T>)> {
    let n = m + 1;
    let diag: Vec<T> = (0..n).map(|k| T::of(2 * k + 1)).collect();
    let off: Vec<T> = (1..n).map(T::of).collect();
    let mut x = symmetric_tridiagonal_eigenvalues(&diag, &off)?;
    x.sort_by(|a, b| a.partial_cmp(b).expect("finite eigenvalues"));
    let tol = newton_tolerance::<T>();
    for xi in x.iter_mut() {
        *xi = newton_polish(*xi, tol, |t| {
            // L_n / L_n' with L_n' = n (L_n - L_{n-1}) / x, in function form
            let v = laguerre_fun_all(n, t);
            t * v[n] / (T::of(n) * (v[n] - v[n - 1]))
        })?;
    }
    let np1 = T::of(n + 1);
    let log_w = x
        .iter()
        .map(|&xi| {
            let l = laguerre_fun(n + 1, xi);
            xi.ln() - T::two() * (np1.ln() + l.abs().ln())
        })
        .collect();
    Ok((x, log_w))
}

/// Unit GLR nodes (`0` and the zeros of `L'_{m+1}`) and absorbed log-weights.
fn unit_gauss_laguerre_radau<T: Real>(m: usize) -> Result<(Vec<T>, Vec<T>)> {
    let n = m + 1;
    let (gl, _) = unit_gauss_laguerre::<T>(m)?;
    let mut x = Vec::with_capacity(n);
    x.push(T::zero());
    let nf = T::of(n);
    // F(t) = e^{-t/2} L_n'(t) and Newton step for L_n' using the Laguerre ODE
    // t L'' + (1 - t) L' + n L = 0
    let f_and_step = |t: T| {
        let v = laguerre_fun_all(n, t);
        let f = nf * (v[n] - v[n - 1]) / t;
        let second = ((t - T::one()) * f - nf * v[n]) / t;
        (f, f / second)
    };
    for w in gl.windows(2) {
        x.push(bracketed_newton(w[0], w[1], f_and_step)?);
    }
    let mf = T::of(m + 1);
    let log_w = x
        .iter()
        .map(|&xi| {
            if xi == T::zero() {
                -mf.ln()
            } else {
                let l = laguerre_fun(m, xi);
                -(mf.ln() + T::two() * l.abs().ln())
            }
        })
        .collect();
    Ok((x, log_w))
}

fn newton_polish<T: Real>(mut x: T, tol: T, step: impl Fn(T) -> T) -> Result<T> {
    let mut last = T::infinity();
    for _ in 0..NEWTON_MAX_ITER {
        let dx = step(x);
        if !dx.is_finite() {
            return Err(Error::Construction(format!(
                "Newton step not finite near x = {x}"
            )));
        }
        x -= dx;
        let rel = dx.abs() / x.abs().max(T::one());
        if rel <= tol {
            return Ok(x);
        }
        // stalled at the roundoff floor of the polynomial evaluation
        if rel >= last && rel < T::epsilon().sqrt() {
            return Ok(x);
        }
        last = rel;
    }
    Err(Error::Construction(format!(
        "Newton iteration did not converge near x = {x}"
    )))
}

/// Root of `f` in `(lo, hi)` where `f` changes sign; Newton steps that leave
/// the bracket are replaced by bisection.
fn bracketed_newton<T: Real>(
    mut lo: T,
    mut hi: T,
    f_and_step: impl Fn(T) -> (T, T),
) -> Result<T> {
    let (f_lo, _) = f_and_step(lo);
    let (f_hi, _) = f_and_step(hi);
    if f_lo == T::zero() {
        return Ok(lo);
    }
    if f_hi == T::zero() {
        return Ok(hi);
    }
    if f_lo.signum() == f_hi.signum() {
        return Err(Error::Construction(format!(
            "no sign change of L' in [{lo}, {hi}]"
        )));
    }
    let lo_sign = f_lo.signum();
    let tol = newton_tolerance::<T>();
    let mut x = (lo + hi) * T::half();
    for _ in 0..NEWTON_MAX_ITER {
        let (f, step) = f_and_step(x);
        if f == T::zero() {
            return Ok(x);
        }
        if f.signum() == lo_sign {
            lo = x;
        } else {
            hi = x;
        }
        let mut next = x - step;
        if !(next > lo && next < hi) || !next.is_finite() {
            next = (lo + hi) * T::half();
        }
        let dx = (next - x).abs();
        x = next;
        if dx <= tol * x.abs().max(T::one()) || (hi - lo) <= tol * x.abs() {
            return Ok(x);
        }
    }
    Err(Error::Construction(format!(
        "bracketed Newton did not converge in [{lo}, {hi}]"
    )))
}

/// Gauss–Legendre rule with `n` points on `[-1, 1]`.
pub fn gauss_legendre<T: Real>(n: usize) -> Result<(Vec<T>, Vec<T>)> {
    if n == 0 {
        return Err(Error::Construction("Gauss–Legendre needs n >= 1".into()));
    }
    let diag = vec![T::zero(); n];
    let off: Vec<T> = (1..n)
        .map(|k| {
            let kf = T::of(k);
            kf / (T::lit(4.0) * kf * kf - T::one()).sqrt()
        })
        .collect();
    let mut x = symmetric_tridiagonal_eigenvalues(&diag, &off)?;
    x.sort_by(|a, b| a.partial_cmp(b).expect("finite eigenvalues"));
    let nf = T::of(n);
    let deriv = |t: T| {
        let p = legendre_all(n, t);
        (p[n], nf * (t * p[n] - p[n - 1]) / (t * t - T::one()))
    };
    let mut w = Vec::with_capacity(n);
    for xi in x.iter_mut() {
        *xi = newton_polish(*xi, newton_tolerance::<T>(), |t| {
            let (p, dp) = deriv(t);
            p / dp
        })?;
        let (_, dp) = deriv(*xi);
        w.push(T::two() / ((T::one() - *xi * *xi) * dp * dp));
    }
    Ok((x, w))
}

/// Eigenvalues of the symmetric tridiagonal matrix with diagonal `diag` and
/// sub/super-diagonal `off`, by implicit QL with Wilkinson shifts.
pub(crate) fn symmetric_tridiagonal_eigenvalues<T: Real>(diag: &[T], off: &[T]) -> Result<Vec<T>> {
    let n = diag.len();
    let mut d = diag.to_vec();
    let mut e = vec![T::zero(); n];
    e[..n.saturating_sub(1)].copy_from_slice(&off[..n.saturating_sub(1)]);
    for l in 0..n {
        let mut iter = 0;
        loop {
            let mut m = l;
            while m + 1 < n {
                let dd = d[m].abs() + d[m + 1].abs();
                if e[m].abs() <= T::epsilon() * dd {
                    break;
                }
                m += 1;
            }
            if m == l {
                break;
            }
            iter += 1;
            if iter > 60 {
                return Err(Error::NoConvergence(
                    "tridiagonal QL exceeded 60 sweeps".into(),
                ));
            }
            let mut g = (d[l + 1] - d[l]) / (T::two() * e[l]);
            let mut r = g.hypot(T::one());
            g = d[m] - d[l] + e[l] / (g + r.abs() * g.signum());
            let (mut s, mut c, mut p) = (T::one(), T::one(), T::zero());
            let mut i = m;
            let mut underflow = false;
            while i > l {
                i -= 1;
                let f = s * e[i];
                let b = c * e[i];
                r = f.hypot(g);
                e[i + 1] = r;
                if r == T::zero() {
                    d[i + 1] -= p;
                    e[m] = T::zero();
                    underflow = true;
                    break;
                }
                s = f / r;
                c = g / r;
                g = d[i + 1] - p;
                r = (d[i] - g) * s + T::two() * c * b;
                p = s * r;
                d[i + 1] = g + p;
                g = c * r - b;
            }
            if underflow {
                continue;
            }
            d[l] -= p;
            e[l] = g;
            e[m] = T::zero();
        }
    }
    Ok(d)
}
