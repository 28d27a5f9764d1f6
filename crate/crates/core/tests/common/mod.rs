#![allow(dead_code)]

use locact::linsys::{LinearPortSystem, Matrix};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn uniform_matrix(rng: &mut ChaCha8Rng, n: usize, lo: f64, hi: f64) -> Matrix<f64> {
    Matrix::from_fn(n, n, |_, _| rng.gen_range(lo..hi))
}

pub fn gaussian_matrix(rng: &mut ChaCha8Rng, n: usize) -> Matrix<f64> {
    Matrix::from_fn(n, n, |_, _| rng.sample(StandardNormal))
}

pub fn first_port(n: usize) -> Matrix<f64> {
    Matrix::from_fn(n, n, |i, j| if i == 0 && j == 0 { 1.0 } else { 0.0 })
}

pub fn port_system(a: Matrix<f64>) -> LinearPortSystem<f64> {
    let n = a.rows();
    LinearPortSystem::new(a, first_port(n), 1e-12).unwrap()
}

/// Composite trapezoid rule with `n` panels.
pub fn trapezoid_oracle(f: impl Fn(f64) -> f64, a: f64, b: f64, n: usize) -> f64 {
    let h = (b - a) / n as f64;
    let mut s = 0.5 * (f(a) + f(b));
    for i in 1..n {
        s += f(a + h * i as f64);
    }
    s * h
}

/// `e^{1/(t^2 - 1)}` on `(-1, 1)`, written out independently of the library.
pub fn bump(t: f64) -> f64 {
    if t.abs() < 1.0 {
        (1.0 / (t * t - 1.0)).exp()
    } else {
        0.0
    }
}

/// Square matrices of size `1..=max_n` with entries in `[lo, hi)`.
pub fn square(max_n: usize, lo: f64, hi: f64) -> impl Strategy<Value = Matrix<f64>> {
    (1..=max_n).prop_flat_map(move |n| {
        prop::collection::vec(lo..hi, n * n).prop_map(move |d| Matrix::from_fn(n, n, |i, j| d[i * n + j]))
    })
}

pub fn norm(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

pub fn dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).powi(2)).sum::<f64>().sqrt()
}

pub fn cases(n: u32) -> ProptestConfig {
    ProptestConfig {
        cases: n,
        failure_persistence: None,
        ..ProptestConfig::default()
    }
}
