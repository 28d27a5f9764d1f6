//! Gauss–Legendre quadrature, fixed and adaptive.


use crate::scalar::Real;

/// Nodes and weights of the `n`-point Gauss–Legendre rule on `[-1, 1]`.
pub fn gauss_legendre<S: Real>(n: usize) -> (Vec<S>, Vec<S>) {
    assert!(n >= 1, "at least one node");
    let mut nodes = vec![S::zero(); n];
    let mut weights = vec![S::zero(); n];
    let nf = n as f64;
    for i in 0..n.div_ceil(2) {
        // Tricomi initial guess, then Newton on P_n in f64.
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (nf + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (p, d) = legendre(n, x);
            dp = d;
            let dx = p / d;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        let (_, d) = legendre(n, x);
        if d != 0.0 {
            dp = d;
        }
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        nodes[i] = S::lit(-x);
        nodes[n - 1 - i] = S::lit(x);
        weights[i] = S::lit(w);
        weights[n - 1 - i] = S::lit(w);
    }
    (nodes, weights)
}

fn legendre(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    if n == 0 {
        return (1.0, 0.0);
    }
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    let d = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

/// Fixed-order Gauss–Legendre rule mapped onto arbitrary intervals.
#[derive(Clone, Debug)]
pub struct GaussLegendre<S> {
    nodes: Vec<S>,
    weights: Vec<S>,
}

impl<S: Real> GaussLegendre<S> {
    pub fn new(n: usize) -> Self {
        let (nodes, weights) = gauss_legendre(n);
        Self { nodes, weights }
    }

    pub fn integrate(&self, f: &impl Fn(S) -> S, a: S, b: S) -> S {
        let half = S::lit(0.5);
        let mid = half * (a + b);
        let rad = half * (b - a);
        rad * self
            .nodes
            .iter()
            .zip(&self.weights)
            .map(|(&x, &w)| w * f(mid + rad * x))
            .sum::<S>()
    }

    /// Adaptive bisection until the one-panel and two-panel estimates agree to `tol`.
    pub fn integrate_adaptive(&self, f: &impl Fn(S) -> S, a: S, b: S, tol: S) -> S {
        let whole = self.integrate(f, a, b);
        self.refine(f, a, b, whole, tol, 0)
    }

    fn refine(&self, f: &impl Fn(S) -> S, a: S, b: S, whole: S, tol: S, depth: u32) -> S {
        let mid = S::lit(0.5) * (a + b);
        let left = self.integrate(f, a, mid);
        let right = self.integrate(f, mid, b);
        let both = left + right;
        if (both - whole).abs() <= tol || depth >= 40 {
            return both;
        }
        let half_tol = tol * S::lit(0.5);
        self.refine(f, a, mid, left, half_tol, depth + 1)
            + self.refine(f, mid, b, right, half_tol, depth + 1)
    }
}

/// Composite trapezoid rule on a sampled grid.
pub fn trapezoid<S: Real>(times: &[S], values: &[S]) -> S {
    let half = S::lit(0.5);
    times
        .windows(2)
        .zip(values.windows(2))
        .map(|(t, v)| half * (t[1] - t[0]) * (v[0] + v[1]))
        .fold(S::zero(), |a, b| a + b)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn weights_sum_to_two() {
        for n in [1, 2, 5, 10, 20] {
            let (_, w) = gauss_legendre::<f64>(n);
            assert!((w.iter().sum::<f64>() - 2.0).abs() < 1e-13, "n = {n}");
        }
    }

    #[test]
    fn exact_for_polynomials() {
        let gl = GaussLegendre::<f64>::new(5);
        // degree 9 is integrated exactly by a 5-point rule
        let v = gl.integrate(&|x: f64| x.powi(9) + x.powi(8), 0.0, 1.0);
        assert!((v - (0.1 + 1.0 / 9.0)).abs() < 1e-14);
    }

    #[test]
    fn adaptive_handles_kink() {
        let gl = GaussLegendre::<f64>::new(7);
        let v = gl.integrate_adaptive(&|x: f64| x.abs(), -1.0, 2.0, 1e-12);
        assert!((v - 2.5).abs() < 1e-11);
    }

    #[test]
    fn trapezoid_linear() {
        let t = [0.0f64, 0.5, 2.0];
        let v = [0.0, 0.5, 2.0];
        assert!((trapezoid(&t, &v) - 2.0).abs() < 1e-15);
    }
}
