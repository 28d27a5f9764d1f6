//! Dense eigen-decomposition of real matrices.
//!
//! Eigenvalues come from a Householder reduction to upper Hessenberg form
//! followed by the implicitly double-shifted (Francis) QR iteration.
//! Eigenvectors are recovered afterwards by inverse iteration on the original
//! matrix, one per eigenvalue; for a complex-conjugate pair only the member
//! with positive imaginary part is iterated and its partner is the conjugate
//! vector, so conjugate closure of the eigenvector matrix holds exactly.

use std::cmp::Ordering;

use num_complex::Complex;
use serde::{Deserialize, Serialize};

use super::matrix::{norm2, CMatrix, Lu, Matrix};
use crate::error::{Error, Result};
use crate::scalar::Real;

/// Sweeps allowed per eigenvalue in the QR iteration.
const MAX_QR_SWEEPS_PER_EIGENVALUE: usize = 60;
const INVERSE_ITERATION_STEPS: usize = 4;

/// Eigenvalues with eigenvector matrix `G` and its inverse `H`.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(bound = "S: Real")]
pub struct Spectrum<S> {
    /// Sorted by descending real part; a conjugate pair is adjacent with the
    /// positive-imaginary member first.
    pub eigenvalues: Vec<Complex<S>>,
    /// Columns are unit eigenvectors.
    pub vectors: CMatrix<S>,
    /// `vectors^{-1}`; all zero when `vectors` is singular.
    pub inverse: CMatrix<S>,
    /// Minimum pairwise eigenvalue distance exceeded the tolerance.
    pub diagonalizable: bool,
    /// `|G|_F |H|_F`, infinite when `G` is singular.
    pub cond_g: S,
    pub min_gap: S,
}

impl<S: Real> Spectrum<S> {
    pub fn n(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn max_real_part(&self) -> S {
        self.eigenvalues
            .iter()
            .map(|l| l.re)
            .fold(S::neg_infinity(), S::max)
    }

    /// `G diag(lambda) H`.
    pub fn reconstruct(&self) -> CMatrix<S> {
        let d = CMatrix::from_diagonal(&self.eigenvalues);
        &(&self.vectors * &d) * &self.inverse
    }
}

/// Reduces `a` to upper Hessenberg form by Householder similarity transforms.
pub fn hessenberg<S: Real>(a: &Matrix<S>) -> Matrix<S> {
    let n = a.rows();
    let mut h = a.clone();
    if n < 3 {
        return h;
    }
    let mut ort = vec![S::zero(); n];
    let high = n - 1;
    for m in 1..high {
        let scale: S = (m..=high).map(|i| h[(i, m - 1)].abs()).sum();
        if scale == S::zero() {
            continue;
        }
        let mut hh = S::zero();
        for i in (m..=high).rev() {
            ort[i] = h[(i, m - 1)] / scale;
            hh += ort[i] * ort[i];
        }
        let mut g = hh.sqrt();
        if ort[m] > S::zero() {
            g = -g;
        }
        hh -= ort[m] * g;
        ort[m] -= g;
        for j in m..n {
            let mut f = S::zero();
            for i in (m..=high).rev() {
                f += ort[i] * h[(i, j)];
            }
            f /= hh;
            for i in m..=high {
                h[(i, j)] -= f * ort[i];
            }
        }
        for i in 0..=high {
            let mut f = S::zero();
            for j in (m..=high).rev() {
                f += ort[j] * h[(i, j)];
            }
            f /= hh;
            for j in m..=high {
                h[(i, j)] -= f * ort[j];
            }
        }
        h[(m, m - 1)] = scale * g;
        for i in m + 1..=high {
            h[(i, m - 1)] = S::zero();
        }
    }
    h
}

/// Eigenvalues of an upper Hessenberg matrix by the Francis double-shift QR
/// iteration, in deflation order.
#[allow(unused_assignments)]
pub fn hessenberg_eigenvalues<S: Real>(hess: &Matrix<S>) -> Result<Vec<Complex<S>>> {
    let nn = hess.rows();
    let mut h = hess.clone();
    let mut d = vec![S::zero(); nn];
    let mut e = vec![S::zero(); nn];
    if nn == 0 {
        return Ok(Vec::new());
    }
    let eps = S::epsilon();
    let two = S::lit(2.0);
    let mut exshift = S::zero();
    let (mut p, mut q, mut r, mut s, mut z) = (S::zero(), S::zero(), S::zero(), S::zero(), S::zero());
    let (mut x, mut y, mut w);

    let mut norm = S::zero();
    for i in 0..nn {
        for j in i.saturating_sub(1)..nn {
            norm += h[(i, j)].abs();
        }
    }
    if !norm.is_finite() {
        return Err(Error::NonFiniteEntry("matrix"));
    }

    let mut n = nn as isize - 1;
    let mut iter = 0usize;
    let mut total = 0usize;
    let budget = MAX_QR_SWEEPS_PER_EIGENVALUE * nn.max(1);
    while n >= 0 {
        let nu = n as usize;
        let mut l = nu;
        while l > 0 {
            s = h[(l - 1, l - 1)].abs() + h[(l, l)].abs();
            if s == S::zero() {
                s = norm;
            }
            if h[(l, l - 1)].abs() < eps * s {
                break;
            }
            l -= 1;
        }

        if l == nu {
            h[(nu, nu)] += exshift;
            d[nu] = h[(nu, nu)];
            e[nu] = S::zero();
            n -= 1;
            iter = 0;
        } else if l + 1 == nu {
            w = h[(nu, nu - 1)] * h[(nu - 1, nu)];
            p = (h[(nu - 1, nu - 1)] - h[(nu, nu)]) / two;
            q = p * p + w;
            z = q.abs().sqrt();
            h[(nu, nu)] += exshift;
            h[(nu - 1, nu - 1)] += exshift;
            x = h[(nu, nu)];
            if q >= S::zero() {
                z = if p >= S::zero() { p + z } else { p - z };
                d[nu - 1] = x + z;
                d[nu] = d[nu - 1];
                if z != S::zero() {
                    d[nu] = x - w / z;
                }
                e[nu - 1] = S::zero();
                e[nu] = S::zero();
            } else {
                d[nu - 1] = x + p;
                d[nu] = x + p;
                e[nu - 1] = z;
                e[nu] = -z;
            }
            n -= 2;
            iter = 0;
        } else {
            x = h[(nu, nu)];
            y = S::zero();
            w = S::zero();
            if l < nu {
                y = h[(nu - 1, nu - 1)];
                w = h[(nu, nu - 1)] * h[(nu - 1, nu)];
            }
            // exceptional shifts
            if iter == 10 {
                exshift += x;
                for i in 0..=nu {
                    h[(i, i)] -= x;
                }
                s = h[(nu, nu - 1)].abs() + h[(nu - 1, nu - 2)].abs();
                x = S::lit(0.75) * s;
                y = x;
                w = S::lit(-0.4375) * s * s;
            }
            if iter == 30 {
                s = (y - x) / two;
                s = s * s + w;
                if s > S::zero() {
                    s = s.sqrt();
                    if y < x {
                        s = -s;
                    }
                    s = x - w / ((y - x) / two + s);
                    for i in 0..=nu {
                        h[(i, i)] -= s;
                    }
                    exshift += s;
                    x = S::lit(0.964);
                    y = x;
                    w = x;
                }
            }
            iter += 1;
            total += 1;
            if total > budget {
                return Err(Error::ConvergenceFailure(format!(
                    "QR iteration exceeded {budget} sweeps"
                )));
            }

            let mut m = nu - 2;
            loop {
                z = h[(m, m)];
                r = x - z;
                s = y - z;
                p = (r * s - w) / h[(m + 1, m)] + h[(m, m + 1)];
                q = h[(m + 1, m + 1)] - z - r - s;
                r = h[(m + 2, m + 1)];
                s = p.abs() + q.abs() + r.abs();
                p /= s;
                q /= s;
                r /= s;
                if m == l {
                    break;
                }
                if h[(m, m - 1)].abs() * (q.abs() + r.abs())
                    < eps * (p.abs() * (h[(m - 1, m - 1)].abs() + z.abs() + h[(m + 1, m + 1)].abs()))
                {
                    break;
                }
                m -= 1;
            }
            for i in m + 2..=nu {
                h[(i, i - 2)] = S::zero();
                if i > m + 2 {
                    h[(i, i - 3)] = S::zero();
                }
            }

            for k in m..nu {
                let notlast = k != nu - 1;
                if k != m {
                    p = h[(k, k - 1)];
                    q = h[(k + 1, k - 1)];
                    r = if notlast { h[(k + 2, k - 1)] } else { S::zero() };
                    x = p.abs() + q.abs() + r.abs();
                    if x == S::zero() {
                        continue;
                    }
                    p /= x;
                    q /= x;
                    r /= x;
                }
                s = (p * p + q * q + r * r).sqrt();
                if p < S::zero() {
                    s = -s;
                }
                if s != S::zero() {
                    if k != m {
                        h[(k, k - 1)] = -s * x;
                    } else if l != m {
                        h[(k, k - 1)] = -h[(k, k - 1)];
                    }
                    p += s;
                    x = p / s;
                    y = q / s;
                    z = r / s;
                    q /= p;
                    r /= p;
                    for j in k..nn {
                        p = h[(k, j)] + q * h[(k + 1, j)];
                        if notlast {
                            p += r * h[(k + 2, j)];
                            h[(k + 2, j)] -= p * z;
                        }
                        h[(k, j)] -= p * x;
                        h[(k + 1, j)] -= p * y;
                    }
                    for i in 0..=nu.min(k + 3) {
                        p = x * h[(i, k)] + y * h[(i, k + 1)];
                        if notlast {
                            p += z * h[(i, k + 2)];
                            h[(i, k + 2)] -= p * r;
                        }
                        h[(i, k)] -= p;
                        h[(i, k + 1)] -= p * q;
                    }
                }
            }
        }
    }
    Ok(d.into_iter().zip(e).map(|(re, im)| Complex::new(re, im)).collect())
}

/// Orders eigenvalues by descending real part with conjugate pairs adjacent
/// (positive imaginary part first); ties in the real part are broken by
/// descending imaginary magnitude.
pub fn sort_eigenvalues<S: Real>(values: &mut Vec<Complex<S>>) {
    // Group into real singletons and conjugate pairs first so that pairs stay
    // together regardless of ties with other eigenvalues.
    let mut reps: Vec<Complex<S>> = Vec::with_capacity(values.len());
    let mut pending: Vec<Complex<S>> = values.iter().copied().filter(|z| z.im < S::zero()).collect();
    for z in values.iter().filter(|z| z.im >= S::zero()) {
        reps.push(*z);
        if z.im > S::zero() {
            // drop the matching conjugate from the pending list
            if let Some(pos) = pending
                .iter()
                .enumerate()
                .min_by(|a, b| {
                    (a.1 - z.conj())
                        .norm()
                        .partial_cmp(&(b.1 - z.conj()).norm())
                        .unwrap_or(Ordering::Equal)
                })
                .map(|(i, _)| i)
            {
                pending.swap_remove(pos);
            }
        }
    }
    // unmatched negative-imaginary values (should not happen for real input)
    reps.extend(pending.into_iter().map(|z| z.conj()));
    reps.sort_by(|a, b| {
        b.re.partial_cmp(&a.re)
            .unwrap_or(Ordering::Equal)
            .then(b.im.partial_cmp(&a.im).unwrap_or(Ordering::Equal))
    });
    values.clear();
    for z in reps {
        values.push(z);
        if z.im > S::zero() {
            values.push(z.conj());
        }
    }
}

/// Sorted eigenvalues of a real square matrix.
pub fn eigenvalues<S: Real>(a: &Matrix<S>) -> Result<Vec<Complex<S>>> {
    if !a.is_square() {
        return Err(Error::DimensionMismatch(format!(
            "eigenvalues of a {}x{} matrix",
            a.rows(),
            a.cols()
        )));
    }
    if !a.is_finite() {
        return Err(Error::NonFiniteEntry("matrix"));
    }
    let mut vals = hessenberg_eigenvalues(&hessenberg(a))?;
    sort_eigenvalues(&mut vals);
    Ok(vals)
}

fn pairwise_min_gap<S: Real>(vals: &[Complex<S>]) -> S {
    let mut gap = S::infinity();
    for i in 0..vals.len() {
        for j in i + 1..vals.len() {
            gap = gap.min((vals[i] - vals[j]).norm());
        }
    }
    gap
}

/// Deterministic, index-dependent start vector for inverse iteration.
fn start_vector<S: Real>(n: usize, idx: usize) -> Vec<Complex<S>> {
    (0..n)
        .map(|i| {
            let base = if i == idx % n.max(1) { 1.0 } else { 0.0 };
            let jitter = ((i * 7 + idx * 13 + 3) % 17) as f64 / 17.0;
            Complex::new(S::lit(base + 0.25 * jitter + 0.05), S::zero())
        })
        .collect()
}

/// Unit eigenvector for `lambda` by inverse iteration on `a - lambda I`.
pub fn inverse_iteration<S: Real>(a: &Matrix<S>, lambda: Complex<S>, idx: usize) -> Vec<Complex<S>> {
    let n = a.rows();
    let scale = a.frobenius_norm().max(S::one());
    let shift = lambda + Complex::new(scale * S::epsilon() * S::lit(8.0), S::zero());
    let mut shifted = a.to_complex();
    for i in 0..n {
        shifted[(i, i)] -= shift;
    }
    let lu = Lu::new(&shifted, true).expect("square by construction");
    let mut v = start_vector::<S>(n, idx);
    for _ in 0..INVERSE_ITERATION_STEPS {
        let y = lu.solve_vec(&v);
        let nrm = norm2(&y);
        if !nrm.is_finite() || nrm == S::zero() {
            break;
        }
        v = y.into_iter().map(|c| c / nrm).collect();
    }
    normalize_phase(&mut v);
    if lambda.im == S::zero() {
        for c in v.iter_mut() {
            c.im = S::zero();
        }
        let nrm = norm2(&v);
        if nrm > S::zero() {
            for c in v.iter_mut() {
                *c = *c / nrm;
            }
        }
    }
    v
}

/// Scales to unit norm with the largest-modulus component real and positive.
fn normalize_phase<S: Real>(v: &mut [Complex<S>]) {
    let Some(big) = v
        .iter()
        .copied()
        .max_by(|a, b| a.norm().partial_cmp(&b.norm()).unwrap_or(Ordering::Equal))
    else {
        return;
    };
    if big.norm() == S::zero() {
        return;
    }
    let phase = big.conj() / big.norm();
    let nrm = norm2(v);
    for c in v.iter_mut() {
        *c = *c * phase / nrm;
    }
}

/// Full eigen-decomposition `A = G diag(lambda) G^{-1}`.
///
/// Never fails for repeated eigenvalues: `diagonalizable` is false when the
/// minimum pairwise gap is at most `spec_tol`, and `G`, `H` are still filled
/// from inverse iteration with distinct start vectors.
pub fn spectrum<S: Real>(a: &Matrix<S>, spec_tol: S) -> Result<Spectrum<S>> {
    let vals = eigenvalues(a)?;
    let n = vals.len();
    let mut g = CMatrix::zeros(n, n);
    let mut idx = 0;
    while idx < n {
        let lambda = vals[idx];
        let v = inverse_iteration(a, lambda, idx);
        g.set_column(idx, &v);
        if lambda.im > S::zero() && idx + 1 < n {
            let conj: Vec<_> = v.iter().map(|c| c.conj()).collect();
            g.set_column(idx + 1, &conj);
            idx += 2;
        } else {
            idx += 1;
        }
    }
    let min_gap = pairwise_min_gap(&vals);
    let (inverse, cond_g) = match g.inverse() {
        Ok(h) if h.is_finite() => {
            let c = g.frobenius_norm() * h.frobenius_norm();
            (h, c)
        }
        _ => (CMatrix::zeros(n, n), S::infinity()),
    };
    Ok(Spectrum {
        eigenvalues: vals,
        vectors: g,
        inverse,
        diagonalizable: min_gap > spec_tol && cond_g.is_finite(),
        cond_g,
        min_gap,
    })
}

/// Eigen-decomposition of a symmetric matrix by cyclic Jacobi rotations.
/// Returns eigenvalues in ascending order and the matching orthonormal
/// eigenvectors as columns.
pub fn symmetric_eigen<S: Real>(m: &Matrix<S>) -> Result<(Vec<S>, Matrix<S>)> {
    if !m.is_square() {
        return Err(Error::DimensionMismatch(format!(
            "symmetric eigenproblem of a {}x{} matrix",
            m.rows(),
            m.cols()
        )));
    }
    if !m.is_finite() {
        return Err(Error::NonFiniteEntry("matrix"));
    }
    let n = m.rows();
    let mut a = m.symmetric_part();
    let mut v = Matrix::<S>::identity(n);
    let total = a.frobenius_norm();
    let two = S::lit(2.0);
    let mut converged = n <= 1;
    for _sweep in 0..100 {
        let off: S = (0..n)
            .flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j)))
            .map(|(i, j)| a[(i, j)] * a[(i, j)])
            .sum::<S>()
            .sqrt();
        if off <= S::epsilon() * total.max(S::min_positive_value()) || off == S::zero() {
            converged = true;
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                let apq = a[(p, q)];
                if apq == S::zero() {
                    continue;
                }
                let theta = (a[(q, q)] - a[(p, p)]) / (two * apq);
                let t = theta.signum() / (theta.abs() + (theta * theta + S::one()).sqrt());
                let c = S::one() / (t * t + S::one()).sqrt();
                let s = t * c;
                for k in 0..n {
                    let akp = a[(k, p)];
                    let akq = a[(k, q)];
                    a[(k, p)] = c * akp - s * akq;
                    a[(k, q)] = s * akp + c * akq;
                }
                for k in 0..n {
                    let apk = a[(p, k)];
                    let aqk = a[(q, k)];
                    a[(p, k)] = c * apk - s * aqk;
                    a[(q, k)] = s * apk + c * aqk;
                }
                for k in 0..n {
                    let vkp = v[(k, p)];
                    let vkq = v[(k, q)];
                    v[(k, p)] = c * vkp - s * vkq;
                    v[(k, q)] = s * vkp + c * vkq;
                }
            }
        }
    }
    if !converged {
        return Err(Error::ConvergenceFailure("Jacobi sweeps exhausted".into()));
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| a[(i, i)].partial_cmp(&a[(j, j)]).unwrap_or(Ordering::Equal));
    let vals = order.iter().map(|&i| a[(i, i)]).collect();
    let vecs = Matrix::from_fn(n, n, |r, c| v[(r, order[c])]);
    Ok((vals, vecs))
}

/// Largest eigenvalue of `(M + M^T)/2` with a unit eigenvector.
pub fn top_symmetric_eigenpair<S: Real>(m: &Matrix<S>) -> Result<(S, Vec<S>)> {
    let (vals, vecs) = symmetric_eigen(m)?;
    let n = vals.len();
    if n == 0 {
        return Err(Error::DimensionMismatch("empty matrix".into()));
    }
    Ok((vals[n - 1], vecs.column(n - 1)))
}

/// Largest eigenvalue of the symmetric part of `m`.
pub fn max_sym_eigenvalue<S: Real>(m: &Matrix<S>) -> Result<S> {
    top_symmetric_eigenpair(m).map(|(l, _)| l)
}
