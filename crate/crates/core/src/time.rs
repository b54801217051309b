//! Three-stage Runge–Kutta step
//!
//! ```text
//! K1 = f(t, q)
//! K2 = f(t + Δt, q + Δt K1)
//! K3 = f(t + Δt/2, q + Δt/4 (K1 + K2))
//! q ← q + Δt/6 (K1 + K2 + 4 K3)
//! ```

use crate::error::{check_dim, Error, Result};
use crate::real::Real;

fn blow_up<T: Real>(t: T, stage: usize) -> Error {
    Error::BlowUp {
        time: t.to_f64().unwrap_or(f64::NAN),
        stage,
    }
}

fn checked<T: Real>(k: Vec<T>, n: usize, t: T, stage: usize) -> Result<Vec<T>> {
    check_dim(n, k.len())?;
    if k.iter().all(|v| v.is_finite()) {
        Ok(k)
    } else {
        Err(blow_up(t, stage))
    }
}

pub fn rk3_step<T: Real>(
    mut f: impl FnMut(T, &[T]) -> Result<Vec<T>>,
    q: &[T],
    t: T,
    dt: T,
) -> Result<Vec<T>> {
    if !(dt > T::zero()) {
        return Err(Error::InvalidParameter(format!("time step must be positive, got {dt}")));
    }
    let n = q.len();
    let k1 = checked(f(t, q)?, n, t, 1)?;
    let y: Vec<T> = q.iter().zip(&k1).map(|(&a, &b)| a + dt * b).collect();
    let k2 = checked(f(t + dt, &y)?, n, t + dt, 2)?;
    let quarter = dt * T::lit(0.25);
    let y: Vec<T> = (0..n).map(|i| q[i] + quarter * (k1[i] + k2[i])).collect();
    let k3 = checked(f(t + T::half() * dt, &y)?, n, t + T::half() * dt, 3)?;
    let sixth = dt / T::lit(6.0);
    let four = T::lit(4.0);
    let out: Vec<T> = (0..n)
        .map(|i| q[i] + sixth * (k1[i] + k2[i] + four * k3[i]))
        .collect();
    if out.iter().all(|v| v.is_finite()) {
        Ok(out)
    } else {
        Err(blow_up(t + dt, 4))
    }
}
