use serde::{Deserialize, Serialize};

use super::matrix::Matrix;
use crate::error::{Error, Result};
use crate::scalar::Real;

/// `x' = A x + P u` with a projection `P`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(bound = "S: Real")]
pub struct LinearPortSystem<S> {
    a: Matrix<S>,
    p: Matrix<S>,
}

impl<S: Real> LinearPortSystem<S> {
    /// Validates shapes, finiteness and `|P^2 - P|_F <= proj_tol max(1, |P|_F)`.
    pub fn new(a: Matrix<S>, p: Matrix<S>, proj_tol: S) -> Result<Self> {
        if !(proj_tol > S::zero()) {
            return Err(Error::InvalidParameter("proj_tol must be positive".into()));
        }
        if !a.is_square() || !p.is_square() || a.rows() != p.rows() {
            return Err(Error::DimensionMismatch(format!(
                "A is {}x{}, P is {}x{}",
                a.rows(),
                a.cols(),
                p.rows(),
                p.cols()
            )));
        }
        if a.rows() == 0 {
            return Err(Error::DimensionMismatch("state dimension must be positive".into()));
        }
        if !a.is_finite() {
            return Err(Error::NonFiniteEntry("A"));
        }
        if !p.is_finite() {
            return Err(Error::NonFiniteEntry("P"));
        }
        let residual = (&(&p * &p) - &p).frobenius_norm();
        let bound = proj_tol * p.frobenius_norm().max(S::one());
        if residual > bound {
            return Err(Error::NotAProjection {
                residual: residual.to_f64_lossy(),
                bound: bound.to_f64_lossy(),
            });
        }
        Ok(Self { a, p })
    }

    /// Every coordinate is a port (`P = I`).
    pub fn all_ports(a: Matrix<S>) -> Result<Self> {
        let n = a.rows();
        Self::new(a, Matrix::identity(n), S::lit(1e-10))
    }

    #[inline]
    pub fn a(&self) -> &Matrix<S> {
        &self.a
    }

    #[inline]
    pub fn p(&self) -> &Matrix<S> {
        &self.p
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.a.rows()
    }

    pub fn is_identity_projection(&self, tol: S) -> bool {
        (&self.p - &Matrix::identity(self.n())).max_abs() <= tol
    }

    /// `|P - P^T|_F`.
    pub fn projection_asymmetry(&self) -> S {
        (&self.p - &self.p.transpose()).frobenius_norm()
    }

    /// `|(I - P) v| / |v|`, the distance of `v` from the image of `P`.
    pub fn image_residual(&self, v: &[S]) -> S {
        let pv = self.p.matvec(v);
        let num: S = v
            .iter()
            .zip(&pv)
            .map(|(&x, &y)| (x - y) * (x - y))
            .sum::<S>()
            .sqrt();
        let den: S = v.iter().map(|&x| x * x).sum::<S>().sqrt();
        if den == S::zero() {
            S::infinity()
        } else {
            num / den
        }
    }
}

/// States of a forced solution on a time grid.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(bound = "S: Real")]
pub struct Trajectory<S> {
    pub times: Vec<S>,
    pub states: Vec<Vec<S>>,
    pub horizon: S,
}

impl<S: Real> Trajectory<S> {
    pub fn final_state(&self) -> &[S] {
        self.states.last().expect("trajectory has at least one state")
    }
}
