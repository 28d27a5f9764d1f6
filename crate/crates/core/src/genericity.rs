//! Membership tests for the generic matrix sets `N` and `M`, the orthogonal
//! port transform, and statistical probes of density and openness.

use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linsys::{spectrum, LinearPortSystem, Matrix, Spectrum};
use crate::serde_ext::extended_f64;

pub const DEFAULT_GENERIC_TOL: f64 = 1e-8;

/// Serialized as `{"re": .., "im": ..}`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ComplexValue {
    pub re: f64,
    pub im: f64,
}

impl From<Complex64> for ComplexValue {
    fn from(z: Complex64) -> Self {
        Self { re: z.re, im: z.im }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GenericityReport {
    pub in_n: bool,
    pub in_m: bool,
    #[serde(with = "extended_f64")]
    pub min_eig_gap: f64,
    pub min_abs_eig: f64,
    /// `Re l1 - max Re` over the spectrum without `l1` and its conjugate;
    /// infinite when nothing remains.
    #[serde(with = "extended_f64")]
    pub dominance_gap: f64,
    /// `g11 h11` of the transformed matrix, zero when `M` was not evaluated.
    pub g11h11: ComplexValue,
    /// `|G|_F |H|_F` of the transformed matrix.
    #[serde(with = "extended_f64")]
    pub cond_g: f64,
    /// Orthogonal port transform; the identity for plain `N` tests.
    pub q: Matrix<f64>,
    pub tol: f64,
    pub notes: Vec<String>,
}

/// Householder reflector `Q` with `Q v = e1` for a unit vector `v`.
fn reflector_to_e1(v: &[f64]) -> Matrix<f64> {
    let n = v.len();
    let tail: f64 = v[1..].iter().map(|x| x * x).sum();
    if tail == 0.0 && v[0] > 0.0 {
        return Matrix::identity(n);
    }
    // w = v - e1, with v1 - 1 evaluated without cancellation when v1 > 0
    let mut w = v.to_vec();
    w[0] = if v[0] > 0.0 { -tail / (1.0 + v[0]) } else { v[0] - 1.0 };
    let ww: f64 = w.iter().map(|x| x * x).sum();
    Matrix::from_fn(n, n, |i, j| {
        let id = if i == j { 1.0 } else { 0.0 };
        id - 2.0 * w[i] * w[j] / ww
    })
}

/// Picks the largest-norm column `v` of `P` (normalised) and returns the
/// reflector `Q` with `Q v = e1` together with `(Q A Q^T, Q P Q^T)`.
pub fn port_transform(sys: &LinearPortSystem<f64>) -> Result<(Matrix<f64>, LinearPortSystem<f64>)> {
    let v = port_direction(sys)?;
    let q = reflector_to_e1(&v);
    let qt = q.transpose();
    let a = &(&q * sys.a()) * &qt;
    let p = &(&q * sys.p()) * &qt;
    let transformed = LinearPortSystem::new(a, p, 1e-8)?;
    Ok((q, transformed))
}

/// Unit vector in `im P` used by [`port_transform`].
pub fn port_direction(sys: &LinearPortSystem<f64>) -> Result<Vec<f64>> {
    let p = sys.p();
    let mut best = (0usize, 0.0f64);
    for j in 0..p.cols() {
        let nrm = p.column(j).iter().map(|x| x * x).sum::<f64>().sqrt();
        if nrm > best.1 {
            best = (j, nrm);
        }
    }
    if best.1 <= f64::MIN_POSITIVE {
        return Err(Error::ZeroProjection);
    }
    Ok(p.column(best.0).iter().map(|x| x / best.1).collect())
}

struct SpectralGaps {
    min_abs: f64,
    min_gap: f64,
    dominance: f64,
}

fn gaps(spec: &Spectrum<f64>) -> SpectralGaps {
    let vals = &spec.eigenvalues;
    let min_abs = vals.iter().map(|l| l.norm()).fold(f64::INFINITY, f64::min);
    let skip = if vals.len() > 1 && vals[0].im != 0.0 && vals[1] == vals[0].conj() {
        2
    } else {
        1
    };
    let rest = vals
        .iter()
        .skip(skip)
        .map(|l| l.re)
        .fold(f64::NEG_INFINITY, f64::max);
    let dominance = if vals.is_empty() { f64::INFINITY } else { vals[0].re - rest };
    SpectralGaps {
        min_abs,
        min_gap: spec.min_gap,
        dominance,
    }
}

fn n_report(spec: &Spectrum<f64>, tol: f64, q: Matrix<f64>) -> GenericityReport {
    let g = gaps(spec);
    let mut notes = Vec::new();
    if g.dominance.is_infinite() {
        notes.push("dominance gap over an empty remainder is +inf".to_string());
    }
    GenericityReport {
        in_n: g.min_abs > tol && g.min_gap > tol && g.dominance > tol,
        in_m: false,
        min_eig_gap: g.min_gap,
        min_abs_eig: g.min_abs,
        dominance_gap: g.dominance,
        g11h11: ComplexValue { re: 0.0, im: 0.0 },
        cond_g: spec.cond_g,
        q,
        tol,
        notes,
    }
}

/// Invertible, `n` distinct eigenvalues, and a strictly dominant real part.
pub fn in_generic_n(a: &Matrix<f64>, tol: f64) -> Result<GenericityReport> {
    let spec = spectrum(a, tol)?;
    Ok(n_report(&spec, tol, Matrix::identity(a.rows())))
}

/// `N` membership of the port-transformed matrix plus `|g11 h11| > tol cond(G)`.
pub fn in_generic_m(sys: &LinearPortSystem<f64>, tol: f64) -> Result<GenericityReport> {
    let (q, transformed) = port_transform(sys)?;
    let spec = spectrum(transformed.a(), tol)?;
    let mut report = n_report(&spec, tol, q);
    let prod = spec.vectors[(0, 0)] * spec.inverse[(0, 0)];
    report.g11h11 = prod.into();
    let product_ok = spec.cond_g.is_finite() && prod.norm() > tol * spec.cond_g;
    if !product_ok {
        report.notes.push("g11 h11 vanishes at the tolerance".to_string());
    }
    if spec.eigenvalues.len() > 1 && spec.eigenvalues[0].im != 0.0 {
        report
            .notes
            .push("dominant eigenvalue taken with positive imaginary part".to_string());
    }
    report.in_m = report.in_n && product_ok;
    Ok(report)
}

fn gaussian_matrix(n: usize, rng: &mut ChaCha8Rng) -> Matrix<f64> {
    Matrix::from_fn(n, n, |_, _| StandardNormal.sample(rng))
}

fn first_port(n: usize) -> Matrix<f64> {
    Matrix::from_fn(n, n, |i, j| if i == 0 && j == 0 { 1.0 } else { 0.0 })
}

fn sample_rng(seed: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}

/// The `index`-th sample of [`sample_density_m`]: standard Gaussian `A`
/// with `P = diag(1, 0, ..)`.
pub fn sample_system(n: usize, seed: u64, index: u64) -> Result<LinearPortSystem<f64>> {
    let mut rng = sample_rng(seed, index);
    LinearPortSystem::new(gaussian_matrix(n, &mut rng), first_port(n), 1e-12)
}

/// Fraction of standard Gaussian matrices that lie in `M` for `P = diag(1, 0, ..)`.
pub fn sample_density_m(n: usize, samples: usize, seed: u64, tol: f64) -> Result<f64> {
    if n == 0 || samples == 0 {
        return Err(Error::InvalidParameter("n and samples must be positive".into()));
    }
    let mut hits = 0usize;
    for i in 0..samples {
        let sys = sample_system(n, seed, i as u64)?;
        if in_generic_m(&sys, tol).map(|r| r.in_m).unwrap_or(false) {
            hits += 1;
        }
    }
    Ok(hits as f64 / samples as f64)
}

/// Perturbs `A` by `trials` random `E` with `|E|_F = radius` and counts how
/// many perturbed systems are still in `M` at tolerance `tol`.
pub fn openness_probe(
    sys: &LinearPortSystem<f64>,
    radius: f64,
    tol: f64,
    trials: usize,
    seed: u64,
) -> Result<usize> {
    let n = sys.n();
    let mut kept = 0;
    for i in 0..trials {
        let mut rng = sample_rng(seed, i as u64);
        let e = gaussian_matrix(n, &mut rng);
        let scale = radius / e.frobenius_norm();
        let perturbed = LinearPortSystem::new(sys.a() + &e.scale(scale), sys.p().clone(), 1e-8)?;
        if in_generic_m(&perturbed, tol)?.in_m {
            kept += 1;
        }
    }
    Ok(kept)
}
