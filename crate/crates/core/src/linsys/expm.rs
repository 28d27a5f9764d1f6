//! Matrix exponential by scaling and squaring with a [13/13] Padé approximant.


use super::matrix::Matrix;
use crate::error::{Error, Result};
use crate::scalar::Real;

// Coefficients of the diagonal [13/13] Padé approximant to exp.
const PADE13: [f64; 14] = [
    64764752532480000.0,
    32382376266240000.0,
    7771770303897600.0,
    1187353796428800.0,
    129060195264000.0,
    10559470521600.0,
    670442572800.0,
    33522128640.0,
    1323241920.0,
    40840800.0,
    960960.0,
    16380.0,
    182.0,
    1.0,
];

/// Largest 1-norm for which the [13/13] approximant is accurate to unit roundoff.
const THETA_13: f64 = 5.371920351148152;

/// More squarings than this cannot produce a representable result.
const MAX_SQUARINGS: i32 = 1100;

/// `exp(A t)`.
pub fn matrix_exponential<S: Real>(a: &Matrix<S>, t: S) -> Result<Matrix<S>> {
    if !a.is_square() {
        return Err(Error::DimensionMismatch(format!(
            "exponential of a {}x{} matrix",
            a.rows(),
            a.cols()
        )));
    }
    if !t.is_finite() || !a.is_finite() {
        return Err(Error::NonFiniteEntry("exponential argument"));
    }
    let n = a.rows();
    let at = a.scale(t);
    let norm = at.norm_one();
    if norm == S::zero() {
        return Ok(Matrix::identity(n));
    }
    let theta = S::lit(THETA_13);
    let squarings = if norm > theta {
        (norm / theta).log2().ceil().to_i32().unwrap_or(i32::MAX)
    } else {
        0
    };
    if squarings > MAX_SQUARINGS {
        return Err(Error::OverflowRisk {
            norm: norm.to_f64_lossy(),
        });
    }
    let scaled = at.scale(S::lit(2.0).powi(-squarings));
    let mut r = pade13(&scaled)?;
    for _ in 0..squarings {
        r = &r * &r;
        if !r.is_finite() {
            return Err(Error::OverflowRisk {
                norm: norm.to_f64_lossy(),
            });
        }
    }
    if !r.is_finite() {
        return Err(Error::OverflowRisk {
            norm: norm.to_f64_lossy(),
        });
    }
    Ok(r)
}

fn pade13<S: Real>(a: &Matrix<S>) -> Result<Matrix<S>> {
    let n = a.rows();
    let b: Vec<S> = PADE13.iter().map(|&c| S::lit(c)).collect();
    let id = Matrix::<S>::identity(n);
    let a2 = a * a;
    let a4 = &a2 * &a2;
    let a6 = &a4 * &a2;

    let lin = |c6: S, c4: S, c2: S, c0: S| -> Matrix<S> {
        let mut m = a6.scale(c6);
        m = &m + &a4.scale(c4);
        m = &m + &a2.scale(c2);
        if c0 != S::zero() {
            m = &m + &id.scale(c0);
        }
        m
    };

    let u_inner = &(&a6 * &lin(b[13], b[11], b[9], S::zero())) + &lin(b[7], b[5], b[3], b[1]);
    let u = a * &u_inner;
    let v = &(&a6 * &lin(b[12], b[10], b[8], S::zero())) + &lin(b[6], b[4], b[2], b[0]);

    let p = &v + &u;
    let q = &v - &u;
    q.solve(&p).map_err(|_| Error::ConvergenceFailure("singular Padé denominator".into()))
}

/// Truncated Taylor series with `terms` terms; slow, used as a reference.
pub fn exp_taylor<S: Real>(a: &Matrix<S>, t: S, terms: usize) -> Matrix<S> {
    let n = a.rows();
    let at = a.scale(t);
    let mut term = Matrix::<S>::identity(n);
    let mut sum = term.clone();
    for k in 1..terms {
        term = (&term * &at).scale(S::one() / S::from_count(k));
        sum = &sum + &term;
    }
    sum
}
