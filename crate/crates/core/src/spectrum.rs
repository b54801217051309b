//! Eigenvalues of dense real matrices and stability classification of
//! semi-discrete operators.
//!
//! The solver balances the matrix, reduces it to upper Hessenberg form with
//! Householder reflections and runs the Francis double-shift QR iteration.

use num_complex::Complex;

use crate::advection::SemiDiscreteOperator;
use crate::error::{Error, Result};
use crate::linalg::Matrix;
use crate::real::Real;

/// Default relative threshold on `max Re λ` below which an operator counts as stable.
pub const DEFAULT_STABILITY_TOL: f64 = 1e-8;

const MAX_QR_ITER_PER_EIGENVALUE: usize = 100;

#[derive(Debug, Clone)]
pub struct SpectrumReport<T> {
    pub eigenvalues: Vec<Complex<T>>,
    pub max_real_part: T,
    pub spectral_radius: T,
    pub stable: bool,
}

/// All eigenvalues of `a`, counted with multiplicity and sorted by real then
/// imaginary part.
pub fn eigenvalues<T: Real>(a: &Matrix<T>) -> Result<Vec<Complex<T>>> {
    if !a.is_square() {
        return Err(Error::DimensionMismatch {
            expected: a.rows(),
            found: a.cols(),
        });
    }
    if !a.is_finite() {
        return Err(Error::NonFinite("matrix has NaN or infinite entries".into()));
    }
    let n = a.rows();
    if n == 0 {
        return Ok(Vec::new());
    }
    let (active, mut ev) = isolate(a);
    if !active.is_empty() {
        let mut h: Vec<Vec<T>> = active
            .iter()
            .map(|&i| active.iter().map(|&j| a[(i, j)]).collect())
            .collect();
        balance(&mut h);
        to_hessenberg(&mut h);
        ev.extend(hessenberg_qr(&mut h)?);
    }
    ev.sort_by(|x, y| {
        x.re.partial_cmp(&y.re)
            .unwrap_or(std::cmp::Ordering::Equal)
            .then(x.im.partial_cmp(&y.im).unwrap_or(std::cmp::Ordering::Equal))
    });
    Ok(ev)
}

/// Summarizes the spectrum of `a`. Stable iff
/// `max Re λ ≤ tol · max(1, spectral radius)`.
pub fn analyze<T: Real>(a: &Matrix<T>, tol: T) -> Result<SpectrumReport<T>> {
    let eigenvalues = eigenvalues(a)?;
    let max_real_part = eigenvalues
        .iter()
        .map(|z| z.re)
        .fold(T::neg_infinity(), T::max);
    let spectral_radius = eigenvalues.iter().map(|z| z.norm()).fold(T::zero(), T::max);
    let stable = max_real_part <= tol * spectral_radius.max(T::one());
    Ok(SpectrumReport {
        eigenvalues,
        max_real_part,
        spectral_radius,
        stable,
    })
}

pub fn classify<T: Real>(op: &SemiDiscreteOperator<T>, tol: T) -> Result<SpectrumReport<T>> {
    analyze(op.matrix(), tol)
}

// Permutation step of balancing: a row (or column) whose off-diagonal
// entries vanish inside the active block exposes its diagonal entry as an
// eigenvalue, and the rest of the block keeps the remaining ones. Triangular
// matrices are resolved exactly this way, which matters for the defective
// modal operators where QR would scatter the repeated eigenvalue.
fn isolate<T: Real>(a: &Matrix<T>) -> (Vec<usize>, Vec<Complex<T>>) {
    let mut active: Vec<usize> = (0..a.rows()).collect();
    let mut ev = Vec::new();
    loop {
        let found = active.iter().position(|&i| {
            let row = active.iter().all(|&j| j == i || a[(i, j)] == T::zero());
            let col = active.iter().all(|&j| j == i || a[(j, i)] == T::zero());
            row || col
        });
        match found {
            Some(k) => {
                let i = active.remove(k);
                ev.push(Complex::new(a[(i, i)], T::zero()));
            }
            None => return (active, ev),
        }
    }
}

// Parlett–Reinsch balancing with powers of two, so no rounding is introduced.
fn balance<T: Real>(a: &mut [Vec<T>]) {
    let n = a.len();
    let radix = T::two();
    let sqrdx = radix * radix;
    let mut done = false;
    while !done {
        done = true;
        for i in 0..n {
            let mut c = T::zero();
            let mut r = T::zero();
            for j in 0..n {
                if j != i {
                    c += a[j][i].abs();
                    r += a[i][j].abs();
                }
            }
            if c == T::zero() || r == T::zero() {
                continue;
            }
            let s = c + r;
            let mut f = T::one();
            let mut g = r / radix;
            while c < g {
                f *= radix;
                c *= sqrdx;
            }
            g = r * radix;
            while c > g {
                f /= radix;
                c /= sqrdx;
            }
            if (c + r) / f < T::lit(0.95) * s {
                done = false;
                let ginv = T::one() / f;
                for j in 0..n {
                    a[i][j] *= ginv;
                }
                for row in a.iter_mut() {
                    row[i] *= f;
                }
            }
        }
    }
}

// Householder reduction to upper Hessenberg form (similarity transform).
fn to_hessenberg<T: Real>(a: &mut [Vec<T>]) {
    let n = a.len();
    if n < 3 {
        return;
    }
    let mut v = vec![T::zero(); n];
    for m in 1..n - 1 {
        let scale: T = (m..n).map(|i| a[i][m - 1].abs()).sum();
        if scale == T::zero() {
            continue;
        }
        let mut h = T::zero();
        for i in (m..n).rev() {
            v[i] = a[i][m - 1] / scale;
            h += v[i] * v[i];
        }
        let g = if v[m] > T::zero() { -h.sqrt() } else { h.sqrt() };
        h -= v[m] * g;
        v[m] -= g;
        for j in m..n {
            let f = (m..n).rev().map(|i| v[i] * a[i][j]).sum::<T>() / h;
            for i in m..n {
                a[i][j] -= f * v[i];
            }
        }
        for row in a.iter_mut() {
            let f = (m..n).rev().map(|j| v[j] * row[j]).sum::<T>() / h;
            for j in m..n {
                row[j] -= f * v[j];
            }
        }
        a[m][m - 1] = scale * g;
        for row in a.iter_mut().skip(m + 1) {
            row[m - 1] = T::zero();
        }
    }
}

fn sign<T: Real>(a: T, b: T) -> T {
    if b >= T::zero() {
        a.abs()
    } else {
        -a.abs()
    }
}

// Francis double-shift QR on an upper Hessenberg matrix (EISPACK hqr
// lineage). Indices are 1-based internally to follow the classic layout.
#[allow(unused_assignments)]
fn hessenberg_qr<T: Real>(h: &mut [Vec<T>]) -> Result<Vec<Complex<T>>> {
    let n = h.len();
    let at = |a: &[Vec<T>], i: usize, j: usize| a[i - 1][j - 1];
    macro_rules! set {
        ($i:expr, $j:expr, $v:expr) => {{
            let v = $v;
            h[$i - 1][$j - 1] = v;
        }};
    }
    let mut wr = vec![T::zero(); n + 1];
    let mut wi = vec![T::zero(); n + 1];
    let mut anorm = T::zero();
    for i in 1..=n {
        for j in (i.max(2) - 1)..=n {
            anorm += at(h, i, j).abs();
        }
    }
    let eps = T::epsilon();
    let mut nn = n;
    let mut t = T::zero();
    let (mut p, mut q, mut r) = (T::zero(), T::zero(), T::zero());
    let (mut x, mut y, mut z, mut w) = (T::zero(), T::zero(), T::zero(), T::zero());
    while nn >= 1 {
        let mut its = 0;
        loop {
            let mut l = nn;
            while l >= 2 {
                let mut s = at(h, l - 1, l - 1).abs() + at(h, l, l).abs();
                if s == T::zero() {
                    s = anorm;
                }
                if at(h, l, l - 1).abs() <= eps * s {
                    set!(l, l - 1, T::zero());
                    break;
                }
                l -= 1;
            }
            x = at(h, nn, nn);
            if l == nn {
                wr[nn] = x + t;
                wi[nn] = T::zero();
                nn -= 1;
            } else {
                y = at(h, nn - 1, nn - 1);
                w = at(h, nn, nn - 1) * at(h, nn - 1, nn);
                if l == nn - 1 {
                    p = T::half() * (y - x);
                    q = p * p + w;
                    z = q.abs().sqrt();
                    x += t;
                    if q >= T::zero() {
                        z = p + sign(z, p);
                        wr[nn - 1] = x + z;
                        wr[nn] = x + z;
                        if z != T::zero() {
                            wr[nn] = x - w / z;
                        }
                        wi[nn - 1] = T::zero();
                        wi[nn] = T::zero();
                    } else {
                        wr[nn - 1] = x + p;
                        wr[nn] = x + p;
                        wi[nn - 1] = -z;
                        wi[nn] = z;
                    }
                    nn -= 2;
                } else {
                    if its == MAX_QR_ITER_PER_EIGENVALUE {
                        return Err(Error::NoConvergence(format!(
                            "QR iteration stalled with {nn} eigenvalues left"
                        )));
                    }
                    if its > 0 && its % 10 == 0 {
                        // exceptional shift
                        t += x;
                        for i in 1..=nn {
                            let v = at(h, i, i) - x;
                            set!(i, i, v);
                        }
                        let s = at(h, nn, nn - 1).abs() + at(h, nn - 1, nn - 2).abs();
                        x = T::lit(0.75) * s;
                        y = x;
                        w = T::lit(-0.4375) * s * s;
                    }
                    its += 1;
                    let mut m = nn - 2;
                    loop {
                        z = at(h, m, m);
                        r = x - z;
                        let s0 = y - z;
                        p = (r * s0 - w) / at(h, m + 1, m) + at(h, m, m + 1);
                        q = at(h, m + 1, m + 1) - z - r - s0;
                        r = at(h, m + 2, m + 1);
                        let s = p.abs() + q.abs() + r.abs();
                        p /= s;
                        q /= s;
                        r /= s;
                        if m == l {
                            break;
                        }
                        let u = at(h, m, m - 1).abs() * (q.abs() + r.abs());
                        let v = p.abs()
                            * (at(h, m - 1, m - 1).abs() + z.abs() + at(h, m + 1, m + 1).abs());
                        if u <= eps * v {
                            break;
                        }
                        m -= 1;
                    }
                    for i in m + 2..=nn {
                        set!(i, i - 2, T::zero());
                        if i != m + 2 {
                            set!(i, i - 3, T::zero());
                        }
                    }
                    let mut k = m;
                    while k + 1 <= nn {
                        if k != m {
                            p = at(h, k, k - 1);
                            q = at(h, k + 1, k - 1);
                            r = if k != nn - 1 { at(h, k + 2, k - 1) } else { T::zero() };
                            x = p.abs() + q.abs() + r.abs();
                            if x != T::zero() {
                                p /= x;
                                q /= x;
                                r /= x;
                            }
                        }
                        let s = sign((p * p + q * q + r * r).sqrt(), p);
                        if s != T::zero() {
                            if k == m {
                                if l != m {
                                    let v = -at(h, k, k - 1);
                                    set!(k, k - 1, v);
                                }
                            } else {
                                set!(k, k - 1, -s * x);
                            }
                            p += s;
                            x = p / s;
                            y = q / s;
                            z = r / s;
                            q /= p;
                            r /= p;
                            for j in k..=nn {
                                p = at(h, k, j) + q * at(h, k + 1, j);
                                if k != nn - 1 {
                                    p += r * at(h, k + 2, j);
                                    let v = at(h, k + 2, j) - p * z;
                                    set!(k + 2, j, v);
                                }
                                let v = at(h, k + 1, j) - p * y;
                                set!(k + 1, j, v);
                                let v = at(h, k, j) - p * x;
                                set!(k, j, v);
                            }
                            let mmin = nn.min(k + 3);
                            for i in l..=mmin {
                                p = x * at(h, i, k) + y * at(h, i, k + 1);
                                if k != nn - 1 {
                                    p += z * at(h, i, k + 2);
                                    let v = at(h, i, k + 2) - p * r;
                                    set!(i, k + 2, v);
                                }
                                let v = at(h, i, k + 1) - p * q;
                                set!(i, k + 1, v);
                                let v = at(h, i, k) - p;
                                set!(i, k, v);
                            }
                        }
                        k += 1;
                    }
                }
            }
            if nn == 0 || l + 1 >= nn {
                break;
            }
        }
    }
    Ok((1..=n).map(|i| Complex::new(wr[i], wi[i])).collect())
}
