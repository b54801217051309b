//! Error norms, energy error and reflection ratio.
//!
//! Norms are sample means so that values do not grow with the number of
//! cells: `𝓔₁ = Σ|e|/N`, `𝓔₂ = (Σe²/N)^½`, `𝓔_∞ = max|e|`. Relative norms
//! divide by the same norm of the reference, where the normalization cancels.

use crate::error::{check_dim, Error, Result};
use crate::real::Real;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ErrorReport<T> {
    pub e1: T,
    pub e2: T,
    pub einf: T,
    pub relative: bool,
}

fn norms<T: Real>(v: impl Iterator<Item = T> + Clone, n: usize) -> (T, T, T) {
    let nn = T::of(n.max(1));
    let l1 = v.clone().map(|x| x.abs()).sum::<T>() / nn;
    let l2 = (v.clone().map(|x| x * x).sum::<T>() / nn).sqrt();
    let linf = v.map(|x| x.abs()).fold(T::zero(), T::max);
    (l1, l2, linf)
}

pub fn error_norms<T: Real>(num: &[T], reference: &[T], relative: bool) -> Result<ErrorReport<T>> {
    check_dim(reference.len(), num.len())?;
    let n = num.len();
    let (e1, e2, einf) = norms(num.iter().zip(reference).map(|(&a, &b)| a - b), n);
    if !relative {
        return Ok(ErrorReport {
            e1,
            e2,
            einf,
            relative,
        });
    }
    let (r1, r2, rinf) = norms(reference.iter().copied(), n);
    if !(r1 > T::zero() && r2 > T::zero() && rinf > T::zero()) {
        return Err(Error::InvalidParameter(
            "relative error requested against a zero reference".into(),
        ));
    }
    Ok(ErrorReport {
        e1: e1 / r1,
        e2: e2 / r2,
        einf: einf / rinf,
        relative,
    })
}

/// `(1/N) Σ ½ [g (h − h_ref)² + H (u − u_ref)²]`.
pub fn energy_error<T: Real>(h: &[T], h_ref: &[T], u: &[T], u_ref: &[T], grav: T, depth: T) -> Result<T> {
    let n = h.len();
    check_dim(n, h_ref.len())?;
    check_dim(n, u.len())?;
    check_dim(n, u_ref.len())?;
    if n == 0 {
        return Err(Error::InvalidParameter("energy error of an empty sample".into()));
    }
    let s: T = (0..n)
        .map(|i| {
            let dh = h[i] - h_ref[i];
            let du = u[i] - u_ref[i];
            T::half() * (grav * dh * dh + depth * du * du)
        })
        .sum();
    Ok(s / T::of(n))
}

/// `ρ = (𝓔_EN / 𝓔^W_EN)^½`.
pub fn reflection_ratio<T: Real>(e_en: T, e_en_wall: T) -> Result<T> {
    if !(e_en_wall > T::zero()) {
        return Err(Error::InvalidParameter(format!(
            "wall energy error must be positive, got {e_en_wall}"
        )));
    }
    if !(e_en >= T::zero()) {
        return Err(Error::InvalidParameter(format!(
            "energy error must be non-negative, got {e_en}"
        )));
    }
    Ok((e_en / e_en_wall).sqrt())
}
