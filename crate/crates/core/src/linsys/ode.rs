//! Fixed-step classical Runge–Kutta integration of `x' = A x + P u(t)`, `x(0) = 0`.
//!
//! The grid is uniform between the signal's jump points; a step never
//! straddles a jump and the first stage of each segment uses the right limit
//! of the signal. The port energy `\int <x, P u> dt` can be carried along as
//! one extra state so that it is integrated with the same order.


use super::matrix::dot;
use super::system::{LinearPortSystem, Trajectory};
use crate::error::{Error, Result};
use crate::scalar::Real;
use crate::signals::Signal;

/// Output of [`integrate`].
#[derive(Clone, Debug)]
pub struct ForcedSolution<S> {
    pub trajectory: Trajectory<S>,
    /// `<x(t_i), P u(t_i)>` on the grid (left-continuous signal values).
    pub integrand: Vec<S>,
    /// `\int_0^T <x, P u> dt` integrated jointly with the state.
    pub energy: S,
}

/// Grid on `[0, horizon]` with about `steps` uniform steps, refined so that
/// every breakpoint is a grid node. Returns the nodes and, for each step,
/// whether it starts a new segment.
fn grid<S: Real>(horizon: S, steps: usize, breakpoints: &[S]) -> (Vec<S>, Vec<bool>) {
    let mut cuts: Vec<S> = vec![S::zero()];
    for &b in breakpoints {
        if b > *cuts.last().expect("non-empty") && b < horizon {
            cuts.push(b);
        }
    }
    cuts.push(horizon);
    let mut nodes = vec![S::zero()];
    let mut starts = Vec::new();
    let total = S::from_count(steps);
    for seg in cuts.windows(2) {
        let (lo, hi) = (seg[0], seg[1]);
        let m = ((hi - lo) / horizon * total).ceil().to_usize().unwrap_or(1).max(1);
        let h = (hi - lo) / S::from_count(m);
        for i in 1..=m {
            starts.push(i == 1);
            nodes.push(if i == m { hi } else { lo + h * S::from_count(i) });
        }
    }
    (nodes, starts)
}

fn check_inputs<S: Real>(sys: &LinearPortSystem<S>, u: &Signal<S>, horizon: S) -> Result<()> {
    if u.dim() != sys.n() {
        return Err(Error::DimensionMismatch(format!(
            "signal has dimension {} but the system has {}",
            u.dim(),
            sys.n()
        )));
    }
    if !(horizon > S::zero()) || !horizon.is_finite() {
        return Err(Error::InvalidParameter(format!("horizon {horizon} must be positive")));
    }
    let uh = u.horizon();
    if horizon > uh * (S::one() + S::epsilon() * S::lit(64.0)) {
        return Err(Error::SignalDomainError {
            t: horizon.to_f64_lossy(),
            horizon: uh.to_f64_lossy(),
        });
    }
    Ok(())
}

/// Integrates the forced system and the port energy on `[0, horizon]`.
pub fn integrate<S: Real>(
    sys: &LinearPortSystem<S>,
    u: &Signal<S>,
    horizon: S,
    steps: usize,
) -> Result<ForcedSolution<S>> {
    check_inputs(sys, u, horizon)?;
    if steps < 1 {
        return Err(Error::InvalidParameter("at least one step required".into()));
    }
    let n = sys.n();
    let a = sys.a();
    let p = sys.p();
    let (nodes, starts) = grid(horizon, steps, &u.breakpoints());

    let mut pu = vec![S::zero(); n];
    let mut ax = vec![S::zero(); n];
    // f(t, y) for y = (x, w): returns (A x + P u, <x, P u>)
    let mut rhs = |t: S, right: bool, x: &[S], dx: &mut [S]| -> Result<S> {
        let uv = u.eval_limit(t, right)?;
        p.matvec_into(&uv, &mut pu);
        a.matvec_into(x, &mut ax);
        for i in 0..n {
            dx[i] = ax[i] + pu[i];
        }
        Ok(dot(x, &pu))
    };

    let mut x = vec![S::zero(); n];
    let mut energy = S::zero();
    let mut states = Vec::with_capacity(nodes.len());
    let mut integrand = Vec::with_capacity(nodes.len());
    states.push(x.clone());
    integrand.push(S::zero());

    let (mut k1, mut k2, mut k3, mut k4) = (vec![S::zero(); n], vec![S::zero(); n], vec![S::zero(); n], vec![S::zero(); n]);
    let mut tmp = vec![S::zero(); n];
    let half = S::lit(0.5);
    let sixth = S::one() / S::lit(6.0);
    let two = S::lit(2.0);

    for (i, step) in nodes.windows(2).enumerate() {
        let (t0, t1) = (step[0], step[1]);
        let h = t1 - t0;
        let tm = t0 + half * h;
        let e1 = rhs(t0, starts[i], &x, &mut k1)?;
        for j in 0..n {
            tmp[j] = x[j] + half * h * k1[j];
        }
        let e2 = rhs(tm, false, &tmp, &mut k2)?;
        for j in 0..n {
            tmp[j] = x[j] + half * h * k2[j];
        }
        let e3 = rhs(tm, false, &tmp, &mut k3)?;
        for j in 0..n {
            tmp[j] = x[j] + h * k3[j];
        }
        let e4 = rhs(t1, false, &tmp, &mut k4)?;
        for j in 0..n {
            x[j] += h * sixth * (k1[j] + two * k2[j] + two * k3[j] + k4[j]);
        }
        energy += h * sixth * (e1 + two * e2 + two * e3 + e4);

        let uv = u.eval(t1)?;
        integrand.push(dot(&x, &p.matvec(&uv)));
        states.push(x.clone());
    }

    Ok(ForcedSolution {
        trajectory: Trajectory {
            times: nodes,
            states,
            horizon,
        },
        integrand,
        energy,
    })
}

/// Zero-initial-state solution of `x' = A x + P u(t)` on a uniform grid.
pub fn solve_forced<S: Real>(
    sys: &LinearPortSystem<S>,
    u: &Signal<S>,
    horizon: S,
    steps: usize,
) -> Result<Trajectory<S>> {
    if steps < 2 {
        return Err(Error::InvalidParameter("solve_forced needs at least two steps".into()));
    }
    integrate(sys, u, horizon, steps).map(|s| s.trajectory)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linsys::matrix::Matrix;
    use crate::signals::{mollifier, TwoPulse};

    fn scalar(a: f64) -> LinearPortSystem<f64> {
        LinearPortSystem::new(Matrix::from_diagonal(&[a]), Matrix::identity(1), 1e-10).unwrap()
    }

    #[test]
    fn zero_input_stays_at_rest() {
        let sys = LinearPortSystem::all_ports(Matrix::from_rows(&[vec![1.0, 2.0], vec![-3.0, 0.5]]).unwrap()).unwrap();
        let u = Signal::sampled(vec![0.0, 2.0], vec![vec![0.0, 0.0], vec![0.0, 0.0]]).unwrap();
        let tr = solve_forced(&sys, &u, 2.0, 50).unwrap();
        assert!(tr.states.iter().all(|s| s.iter().all(|&v| v == 0.0)));
    }

    #[test]
    fn constant_input_integrates() {
        let u = Signal::sampled(vec![0.0, 1.0], vec![vec![1.0], vec![1.0]]).unwrap();
        let tr = solve_forced(&scalar(0.0), &u, 1.0, 10).unwrap();
        assert!((tr.final_state()[0] - 1.0).abs() < 1e-14);
        assert_eq!(tr.times[0], 0.0);
        assert_eq!(*tr.times.last().unwrap(), 1.0);
    }

    #[test]
    fn mollifier_witness_solution() {
        let u = Signal::mollifier_real(1.0, vec![1.0], 1.0).unwrap();
        let tr = solve_forced(&scalar(1.0), &u, 1.0, 400).unwrap();
        assert!(tr.final_state()[0].abs() < 1e-9);
        let mid = tr.states[tr.times.iter().position(|&t| (t - 0.5).abs() < 1e-12).unwrap()][0];
        let expected = 0.5 * mollifier(0.0) * 0.5f64.exp();
        assert!((mid - expected).abs() < 1e-9);
        assert!((expected - 0.3033).abs() < 1e-4);
    }

    #[test]
    fn grid_contains_breakpoints() {
        let p = TwoPulse::new(1.0, 1.0, 1.0, 3.0, vec![1.0]).unwrap();
        let u = Signal::TwoPulse(p);
        let tr = solve_forced(&scalar(-1.0), &u, 3.0, 30).unwrap();
        assert!(tr.times.contains(&1.0) && tr.times.contains(&2.0));
        assert!(tr.times.windows(2).all(|w| w[1] > w[0]));
        // exact: x(1) = 1 - e^{-1}
        let i = tr.times.iter().position(|&t| t == 1.0).unwrap();
        let err = (tr.states[i][0] - (1.0 - (-1f64).exp())).abs();
        assert!(err < 1e-6, "err {err}");
    }

    #[test]
    fn horizon_beyond_signal_rejected() {
        let u = Signal::mollifier_real(1.0, vec![1.0], 1.0).unwrap();
        assert!(matches!(
            solve_forced(&scalar(1.0), &u, 2.0, 10),
            Err(Error::SignalDomainError { .. })
        ));
        assert!(matches!(
            solve_forced(&scalar(1.0), &u, 1.0, 1),
            Err(Error::InvalidParameter(_))
        ));
    }
}
