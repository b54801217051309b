//! Scaled Laguerre polynomials and functions on `[0, ∞)` and the normalized
//! Legendre basis used inside DG elements.
//!
//! With `x = βz`, the scaled Laguerre polynomial is `L^β_j(z) = L_j(x)` and the
//! scaled Laguerre function is `L̂^β_j(z) = e^{-x/2} L_j(x)`, so that
//! `L̂^β_j(0) = 1` for every `j` and the functions are orthogonal with unit
//! weight: `∫ L̂^β_i L̂^β_j dz = δ_ij / β`.

use crate::error::{Error, Result};
use crate::real::Real;

/// Which Laguerre family a discretization expands in.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum BasisKind {
    LaguerreFunctions,
    LaguerrePolynomials,
}

/// Family, scaling `β` and truncation index `M` of a Laguerre expansion.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BasisSpec<T> {
    kind: BasisKind,
    beta: T,
    max_index: usize,
}

impl<T: Real> BasisSpec<T> {
    pub fn new(kind: BasisKind, beta: T, max_index: usize) -> Result<Self> {
        if !(beta > T::zero() && beta.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "scaling beta must be positive and finite, got {beta}"
            )));
        }
        Ok(Self {
            kind,
            beta,
            max_index,
        })
    }

    pub fn functions(beta: T, max_index: usize) -> Result<Self> {
        Self::new(BasisKind::LaguerreFunctions, beta, max_index)
    }

    pub fn polynomials(beta: T, max_index: usize) -> Result<Self> {
        Self::new(BasisKind::LaguerrePolynomials, beta, max_index)
    }

    pub fn kind(&self) -> BasisKind {
        self.kind
    }

    pub fn beta(&self) -> T {
        self.beta
    }

    /// Highest retained index `M`; the expansion has `M + 1` terms.
    pub fn max_index(&self) -> usize {
        self.max_index
    }

    pub fn len(&self) -> usize {
        self.max_index + 1
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    fn check(&self, j: usize, z: T) -> Result<()> {
        if j > self.max_index {
            return Err(Error::IndexOutOfRange {
                index: j,
                max: self.max_index,
            });
        }
        if !(z >= T::zero()) || z.is_infinite() {
            return Err(Error::Domain {
                what: "z",
                value: z.to_f64().unwrap_or(f64::NAN),
                reason: "Laguerre bases live on [0, inf)",
            });
        }
        Ok(())
    }

    /// `L^β_j(z)`, the degree-`j` Laguerre polynomial at `βz`.
    pub fn laguerre_poly_eval(&self, j: usize, z: T) -> Result<T> {
        self.check(j, z)?;
        Ok(laguerre_poly(j, self.beta * z))
    }

    /// `L̂^β_j(z) = e^{-βz/2} L_j(βz)`.
    pub fn laguerre_fun_eval(&self, j: usize, z: T) -> Result<T> {
        self.check(j, z)?;
        Ok(laguerre_fun(j, self.beta * z))
    }

    /// Evaluates the member of this spec's family.
    pub fn eval(&self, j: usize, z: T) -> Result<T> {
        match self.kind {
            BasisKind::LaguerreFunctions => self.laguerre_fun_eval(j, z),
            BasisKind::LaguerrePolynomials => self.laguerre_poly_eval(j, z),
        }
    }

    /// All `M + 1` members of the family at `z`.
    pub fn eval_all(&self, z: T) -> Result<Vec<T>> {
        self.check(0, z)?;
        let x = self.beta * z;
        Ok(match self.kind {
            BasisKind::LaguerreFunctions => laguerre_fun_all(self.max_index, x),
            BasisKind::LaguerrePolynomials => laguerre_poly_all(self.max_index, x),
        })
    }

    /// Coefficients `c_k` with `d/dz L̂^β_i = Σ_{k≤i} c_k L̂^β_k`:
    /// `c_i = -β/2` and `c_k = -β` below.
    pub fn laguerre_fun_derivative_expansion(&self, i: usize) -> Result<Vec<T>> {
        if i > self.max_index {
            return Err(Error::IndexOutOfRange {
                index: i,
                max: self.max_index,
            });
        }
        let mut c = vec![-self.beta; i + 1];
        c[i] = -self.beta * T::half();
        Ok(c)
    }

    /// Coefficients with `d/dz L^β_i = Σ_{k<i} c_k L^β_k`, all equal to `-β`.
    /// For `i = 0` the derivative vanishes and `[0]` is returned.
    pub fn laguerre_poly_derivative_expansion(&self, i: usize) -> Result<Vec<T>> {
        if i > self.max_index {
            return Err(Error::IndexOutOfRange {
                index: i,
                max: self.max_index,
            });
        }
        if i == 0 {
            return Ok(vec![T::zero()]);
        }
        Ok(vec![-self.beta; i])
    }
}

// Rescaling threshold for the three-term recurrence; 2^64 keeps headroom in f32.
fn rescale_threshold<T: Real>() -> T {
    T::lit(18446744073709551616.0)
}

/// Runs the Laguerre recurrence up to degree `n` at `x`, calling `emit(k, p_k, s_k)`
/// where the true value is `p_k · e^{s_k}`. The running exponent absorbs the
/// growth of `L_k(x)` for large `x` so nothing overflows.
fn laguerre_recurrence<T: Real>(n: usize, x: T, mut emit: impl FnMut(usize, T, T)) {
    let big = rescale_threshold::<T>();
    let log_big = big.ln();
    let mut scale = T::zero();
    let mut prev = T::one();
    emit(0, prev, scale);
    if n == 0 {
        return;
    }
    let mut cur = T::one() - x;
    emit(1, cur, scale);
    for k in 1..n {
        let kf = T::of(k);
        let next = ((T::of(2 * k + 1) - x) * cur - kf * prev) / (kf + T::one());
        prev = cur;
        cur = next;
        if cur.abs() > big {
            cur = cur / big;
            prev = prev / big;
            scale += log_big;
        }
        emit(k + 1, cur, scale);
    }
}

/// Unscaled Laguerre polynomial `L_n(x)`.
pub fn laguerre_poly<T: Real>(n: usize, x: T) -> T {
    let mut out = T::zero();
    laguerre_recurrence(n, x, |k, p, s| {
        if k == n {
            out = p * s.exp();
        }
    });
    out
}

/// Unscaled Laguerre function `e^{-x/2} L_n(x)`, bounded by one in magnitude.
pub fn laguerre_fun<T: Real>(n: usize, x: T) -> T {
    let mut out = T::zero();
    laguerre_recurrence(n, x, |k, p, s| {
        if k == n {
            out = p * (s - x * T::half()).exp();
        }
    });
    out
}

/// `L_0(x), …, L_n(x)`.
pub fn laguerre_poly_all<T: Real>(n: usize, x: T) -> Vec<T> {
    let mut out = Vec::with_capacity(n + 1);
    laguerre_recurrence(n, x, |_, p, s| out.push(p * s.exp()));
    out
}

/// `e^{-x/2} L_k(x)` for `k = 0, …, n`.
pub fn laguerre_fun_all<T: Real>(n: usize, x: T) -> Vec<T> {
    let mut out = Vec::with_capacity(n + 1);
    let half_x = x * T::half();
    laguerre_recurrence(n, x, |_, p, s| out.push(p * (s - half_x).exp()));
    out
}

/// Legendre polynomials `P_0(ξ), …, P_p(ξ)` by the Bonnet recurrence.
pub fn legendre_all<T: Real>(p: usize, xi: T) -> Vec<T> {
    let mut out = Vec::with_capacity(p + 1);
    out.push(T::one());
    if p >= 1 {
        out.push(xi);
    }
    for k in 1..p {
        let kf = T::of(k);
        let next = (T::of(2 * k + 1) * xi * out[k] - kf * out[k - 1]) / (kf + T::one());
        out.push(next);
    }
    out
}

pub fn legendre<T: Real>(l: usize, xi: T) -> T {
    legendre_all(l, xi)[l]
}

/// Normalized DG basis `φ_l(z) = √(2l+1) P_l(2(z − z_m)/Δz)` on the element
/// centred at `center` with width `dz`; `∫ φ_p φ_q dz = Δz δ_pq`.
pub fn legendre_dg_basis_eval<T: Real>(center: T, dz: T, l: usize, z: T) -> Result<T> {
    if !(dz > T::zero()) {
        return Err(Error::InvalidParameter(format!(
            "element size must be positive, got {dz}"
        )));
    }
    let xi = T::two() * (z - center) / dz;
    // admit roundoff from computing the endpoint coordinates
    let slack = T::one() + T::lit(64.0) * T::epsilon();
    if !(xi.abs() <= slack) {
        return Err(Error::Domain {
            what: "z",
            value: z.to_f64().unwrap_or(f64::NAN),
            reason: "outside the element",
        });
    }
    Ok(T::of(2 * l + 1).sqrt() * legendre(l, xi))
}

#[cfg(test)]
mod tests {
    use super::*;

    // L_n(x) = Σ C(n,k) (-x)^k / k!
    fn series(n: usize, x: f64) -> f64 {
        let mut binom = 1.0;
        let mut fact = 1.0;
        let mut sum = 0.0;
        for k in 0..=n {
            if k > 0 {
                binom *= (n - k + 1) as f64 / k as f64;
                fact *= k as f64;
            }
            sum += binom * (-x).powi(k as i32) / fact;
        }
        sum
    }

    #[test]
    fn poly_eval_examples() {
        let s = BasisSpec::<f64>::polynomials(1.0, 10).unwrap();
        assert_eq!(s.laguerre_poly_eval(0, 5.0).unwrap(), 1.0);
        let s2 = BasisSpec::<f64>::polynomials(2.0, 10).unwrap();
        assert!(s2.laguerre_poly_eval(1, 0.5).unwrap().abs() < 1e-15);
        let v = s.laguerre_poly_eval(5, 2.0).unwrap();
        assert!((v - series(5, 2.0)).abs() < 1e-13, "{v} vs {}", series(5, 2.0));
    }

    #[test]
    fn fun_eval_examples() {
        let s = BasisSpec::functions(1.0, 10).unwrap();
        assert_eq!(s.laguerre_fun_eval(7, 0.0).unwrap(), 1.0);
        assert!((s.laguerre_fun_eval(0, 4f64.ln()).unwrap() - 0.5).abs() < 1e-15);
        let s = BasisSpec::functions(0.5, 3).unwrap();
        let expected = (-1.0f64).exp() * series(3, 2.0);
        assert!((s.laguerre_fun_eval(3, 4.0).unwrap() - expected).abs() < 1e-14);
    }

    #[test]
    fn eval_errors() {
        let s = BasisSpec::functions(1.0, 3).unwrap();
        assert_eq!(
            s.laguerre_fun_eval(4, 1.0).unwrap_err(),
            Error::IndexOutOfRange { index: 4, max: 3 }
        );
        assert!(matches!(
            s.laguerre_poly_eval(1, -0.1),
            Err(Error::Domain { .. })
        ));
        assert!(BasisSpec::functions(0.0, 3).is_err());
        assert!(BasisSpec::functions(-1.0, 3).is_err());
    }

    #[test]
    fn derivative_expansion_examples() {
        let s = BasisSpec::functions(1.0, 5).unwrap();
        assert_eq!(s.laguerre_fun_derivative_expansion(0).unwrap(), vec![-0.5]);
        let s2 = BasisSpec::functions(2.0, 5).unwrap();
        assert_eq!(
            s2.laguerre_fun_derivative_expansion(2).unwrap(),
            vec![-2.0, -2.0, -1.0]
        );
        let p = BasisSpec::polynomials(1.0, 5).unwrap();
        assert_eq!(p.laguerre_poly_derivative_expansion(0).unwrap(), vec![0.0]);
        let p3 = BasisSpec::polynomials(3.0, 5).unwrap();
        assert_eq!(
            p3.laguerre_poly_derivative_expansion(2).unwrap(),
            vec![-3.0, -3.0]
        );
        assert!(s.laguerre_fun_derivative_expansion(6).is_err());
    }

    fn central_difference(f: impl Fn(f64) -> f64, z: f64) -> f64 {
        let h = 1e-5;
        (f(z + h) - f(z - h)) / (2.0 * h)
    }

    #[test]
    fn fun_derivative_matches_finite_difference() {
        let s = BasisSpec::functions(1.0, 4).unwrap();
        let c = s.laguerre_fun_derivative_expansion(4).unwrap();
        let z = 1.3;
        let recon: f64 = c
            .iter()
            .enumerate()
            .map(|(k, ck)| ck * s.laguerre_fun_eval(k, z).unwrap())
            .sum();
        let fd = central_difference(|z| s.laguerre_fun_eval(4, z).unwrap(), z);
        assert!((recon - fd).abs() < 1e-7, "{recon} vs {fd}");
    }

    #[test]
    fn poly_derivative_matches_finite_difference() {
        let s = BasisSpec::polynomials(1.0, 5).unwrap();
        let c = s.laguerre_poly_derivative_expansion(5).unwrap();
        let z = 0.7;
        let recon: f64 = c
            .iter()
            .enumerate()
            .map(|(k, ck)| ck * s.laguerre_poly_eval(k, z).unwrap())
            .sum();
        let fd = central_difference(|z| s.laguerre_poly_eval(5, z).unwrap(), z);
        assert!((recon - fd).abs() < 1e-7, "{recon} vs {fd}");
    }

    #[test]
    fn large_degree_does_not_overflow() {
        // |L̂_n(x)| <= 1 on [0, ∞)
        for &x in &[10.0f64, 300.0, 900.0, 2000.0] {
            for n in [150usize, 200, 400] {
                let v: f64 = laguerre_fun(n, x);
                assert!(v.is_finite() && v.abs() <= 1.0 + 1e-10, "n={n} x={x} v={v}");
            }
        }
    }

    #[test]
    fn all_matches_single() {
        let all = laguerre_fun_all(30, 17.5f64);
        for (k, v) in all.iter().enumerate() {
            assert!((v - laguerre_fun(k, 17.5)).abs() < 1e-15);
        }
    }

    #[test]
    fn legendre_dg_examples() {
        assert_eq!(legendre_dg_basis_eval(0.5, 1.0, 0, 0.2).unwrap(), 1.0);
        let v = legendre_dg_basis_eval(0.0, 2.0, 1, 0.5).unwrap();
        assert!((v - 3f64.sqrt() * 0.5).abs() < 1e-15);
        assert!(legendre_dg_basis_eval(0.0, 2.0, 1, 1.5).is_err());
        // element endpoints are admitted
        assert!(legendre_dg_basis_eval(0.3, 0.2, 2, 0.4).is_ok());
    }

    #[test]
    fn f32_instantiation() {
        let s = BasisSpec::<f32>::functions(1.0, 8).unwrap();
        assert_eq!(s.laguerre_fun_eval(8, 0.0).unwrap(), 1.0);
        let v = s.laguerre_poly_eval(3, 1.5).unwrap();
        assert!((v as f64 - series(3, 1.5)).abs() < 1e-5);
    }
}
