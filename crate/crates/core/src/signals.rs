//! Input-signal families for port systems.
//!
//! All signals live on a finite horizon `[0, T]` and evaluating them outside
//! of it is an error. The smooth families are built from the Friedrichs
//! mollifier `rho(t) = exp(1/(t^2 - 1))` on `(-1, 1)`.

use std::sync::OnceLock;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linsys::matrix::norm2;
use crate::quadrature::GaussLegendre;
use crate::scalar::Real;

/// The Friedrichs mollifier, exactly zero for `|t| >= 1`.
pub fn mollifier<S: Real>(t: S) -> S {
    if t.abs() >= S::one() {
        return S::zero();
    }
    (S::one() / (t * t - S::one())).exp()
}

/// Derivative of [`mollifier`]: `-2t / (t^2 - 1)^2 * rho(t)` inside `(-1, 1)`.
pub fn mollifier_derivative<S: Real>(t: S) -> S {
    if t.abs() >= S::one() {
        return S::zero();
    }
    let d = t * t - S::one();
    -(t + t) / (d * d) * (S::one() / d).exp()
}

fn mollifier_mass_f64() -> f64 {
    static MASS: OnceLock<f64> = OnceLock::new();
    *MASS.get_or_init(|| {
        GaussLegendre::<f64>::new(20).integrate_adaptive(&mollifier, -1.0, 1.0, 1e-15)
    })
}

/// `\int_{-1}^{1} rho`.
pub fn mollifier_mass<S: Real>() -> S {
    S::lit(mollifier_mass_f64())
}

/// Cumulative distribution of the normalised mollifier, `\int_{-1}^{s} rho / mass`.
pub fn mollifier_cdf<S: Real>(s: S) -> S {
    if s <= -S::one() {
        return S::zero();
    }
    if s >= S::one() {
        return S::one();
    }
    let gl = GaussLegendre::<S>::new(10);
    let tol = S::epsilon() * S::lit(16.0);
    let (area, mass) = if s <= S::zero() {
        (gl.integrate_adaptive(&mollifier, -S::one(), s, tol), mollifier_mass::<S>())
    } else {
        // integrate the shorter tail for accuracy near s = 1
        let tail = gl.integrate_adaptive(&mollifier, s, S::one(), tol);
        let mass = mollifier_mass::<S>();
        (mass - tail, mass)
    };
    (area / mass).max(S::zero()).min(S::one())
}

/// Scalar profile `a chi_[0,1/k] + b chi_[T-1/k,T]` along a unit direction.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(bound = "S: Real")]
pub struct TwoPulse<S> {
    pub a: S,
    pub b: S,
    pub k: S,
    pub horizon: S,
    pub direction: Vec<S>,
}

impl<S: Real> TwoPulse<S> {
    /// Validates `T > 0`, `k >= 2/T` and normalises `direction`.
    pub fn new(a: S, b: S, k: S, horizon: S, direction: Vec<S>) -> Result<Self> {
        if !(horizon > S::zero()) || !horizon.is_finite() {
            return Err(Error::InvalidParameter(format!("horizon {horizon} must be positive")));
        }
        let min_k = S::lit(2.0) / horizon;
        if !(k >= min_k * (S::one() - S::epsilon() * S::lit(4.0))) {
            return Err(Error::PulseOverlap {
                k: k.to_f64_lossy(),
                min_k: min_k.to_f64_lossy(),
            });
        }
        let nrm = norm2(&direction);
        if !(nrm > S::zero()) || !nrm.is_finite() {
            return Err(Error::InvalidParameter("pulse direction must be nonzero".into()));
        }
        Ok(Self {
            a,
            b,
            k,
            horizon,
            direction: direction.into_iter().map(|x| x / nrm).collect(),
        })
    }

    pub fn width(&self) -> S {
        S::one() / self.k
    }

    /// Scalar profile; at jumps `from_right` selects the right limit,
    /// otherwise the left-continuous value.
    pub fn profile(&self, t: S, from_right: bool) -> S {
        let w = self.width();
        let late = self.horizon - w;
        if from_right {
            let mut v = S::zero();
            if t >= late {
                v = self.b;
            } else if t < w {
                v = self.a;
            }
            v
        } else if t <= w {
            self.a
        } else if t > late {
            self.b
        } else {
            S::zero()
        }
    }
}

/// A parametric input signal `u : [0, T] -> R^n`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "variant", bound = "S: Real")]
pub enum Signal<S> {
    /// Discontinuous two-pulse signal.
    TwoPulse(TwoPulse<S>),
    /// `rho'(2t/T - 1) e^{lambda t} v`.
    MollifierReal { lambda: S, v: Vec<S>, horizon: S },
    /// `h'(t) e^{alpha t} (sin(beta t) v1 + cos(beta t) v2)` with `h(t) = rho((t - t0)/eps)`.
    MollifierComplex {
        alpha: S,
        beta: S,
        v1: Vec<S>,
        v2: Vec<S>,
        t0: S,
        eps: S,
        horizon: S,
    },
    /// Two-pulse profile convolved with the normalised mollifier of width `smoothing`.
    MollifiedTwoPulse { base: TwoPulse<S>, smoothing: S },
    /// `phi'(t) w - phi(t) A w` with `phi(t) = rho(2t/T - 1)`; drives the
    /// state along `x(t) = phi(t) w` when every coordinate is a port.
    Tracking { w: Vec<S>, aw: Vec<S>, horizon: S },
    /// Piecewise-linear interpolation of samples; `times` start at 0.
    Sampled { times: Vec<S>, values: Vec<Vec<S>> },
}

impl<S: Real> Signal<S> {
    pub fn mollifier_real(lambda: S, v: Vec<S>, horizon: S) -> Result<Self> {
        check_horizon(horizon)?;
        Ok(Signal::MollifierReal { lambda, v, horizon })
    }

    #[allow(clippy::too_many_arguments)]
    pub fn mollifier_complex(
        alpha: S,
        beta: S,
        v1: Vec<S>,
        v2: Vec<S>,
        t0: S,
        eps: S,
        horizon: S,
    ) -> Result<Self> {
        check_horizon(horizon)?;
        if v1.len() != v2.len() {
            return Err(Error::DimensionMismatch("v1 and v2 differ in length".into()));
        }
        if !(eps > S::zero()) || t0 - eps < S::zero() || t0 + eps > horizon {
            return Err(Error::InvalidParameter(format!(
                "mollifier window [{}, {}] must lie in [0, {horizon}] with positive width",
                t0 - eps,
                t0 + eps
            )));
        }
        Ok(Signal::MollifierComplex {
            alpha,
            beta,
            v1,
            v2,
            t0,
            eps,
            horizon,
        })
    }

    pub fn tracking(w: Vec<S>, aw: Vec<S>, horizon: S) -> Result<Self> {
        check_horizon(horizon)?;
        if w.len() != aw.len() {
            return Err(Error::DimensionMismatch("w and Aw differ in length".into()));
        }
        Ok(Signal::Tracking { w, aw, horizon })
    }

    pub fn sampled(times: Vec<S>, values: Vec<Vec<S>>) -> Result<Self> {
        if times.len() < 2 || times.len() != values.len() {
            return Err(Error::InvalidParameter(
                "sampled signal needs at least two knots and one value per knot".into(),
            ));
        }
        if times[0] != S::zero() || times.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(Error::InvalidParameter(
                "sample times must start at 0 and increase strictly".into(),
            ));
        }
        let n = values[0].len();
        if values.iter().any(|v| v.len() != n) {
            return Err(Error::DimensionMismatch("sample values differ in length".into()));
        }
        Ok(Signal::Sampled { times, values })
    }

    pub fn horizon(&self) -> S {
        match self {
            Signal::TwoPulse(p) => p.horizon,
            Signal::MollifierReal { horizon, .. }
            | Signal::MollifierComplex { horizon, .. }
            | Signal::Tracking { horizon, .. } => *horizon,
            Signal::MollifiedTwoPulse { base, .. } => base.horizon,
            Signal::Sampled { times, .. } => *times.last().expect("validated non-empty"),
        }
    }

    pub fn dim(&self) -> usize {
        match self {
            Signal::TwoPulse(p) | Signal::MollifiedTwoPulse { base: p, .. } => p.direction.len(),
            Signal::MollifierReal { v, .. } => v.len(),
            Signal::MollifierComplex { v1, .. } => v1.len(),
            Signal::Tracking { w, .. } => w.len(),
            Signal::Sampled { values, .. } => values[0].len(),
        }
    }

    /// Interior points where the signal jumps; integrators must not step across them.
    pub fn breakpoints(&self) -> Vec<S> {
        match self {
            Signal::TwoPulse(p) => {
                let w = p.width();
                let late = p.horizon - w;
                let mut pts = vec![w];
                if late > w {
                    pts.push(late);
                }
                pts.retain(|&t| t > S::zero() && t < p.horizon);
                pts
            }
            _ => Vec::new(),
        }
    }

    pub fn eval(&self, t: S) -> Result<Vec<S>> {
        self.eval_limit(t, false)
    }

    /// Value at `t`, taking the right limit at jumps when `from_right` is set.
    pub fn eval_limit(&self, t: S, from_right: bool) -> Result<Vec<S>> {
        let horizon = self.horizon();
        let slack = horizon * S::epsilon() * S::lit(64.0);
        if !(t >= -slack && t <= horizon + slack) {
            return Err(Error::SignalDomainError {
                t: t.to_f64_lossy(),
                horizon: horizon.to_f64_lossy(),
            });
        }
        let t = t.max(S::zero()).min(horizon);
        let two = S::lit(2.0);
        Ok(match self {
            Signal::TwoPulse(p) => {
                let c = p.profile(t, from_right);
                p.direction.iter().map(|&d| c * d).collect()
            }
            Signal::MollifierReal { lambda, v, horizon } => {
                let c = mollifier_derivative(two * t / *horizon - S::one()) * (*lambda * t).exp();
                v.iter().map(|&x| c * x).collect()
            }
            Signal::MollifierComplex {
                alpha,
                beta,
                v1,
                v2,
                t0,
                eps,
                ..
            } => {
                let hp = mollifier_derivative((t - *t0) / *eps) / *eps;
                if hp == S::zero() {
                    vec![S::zero(); v1.len()]
                } else {
                    let g = hp * (*alpha * t).exp();
                    let (s, c) = (*beta * t).sin_cos();
                    v1.iter().zip(v2).map(|(&a, &b)| g * (s * a + c * b)).collect()
                }
            }
            Signal::MollifiedTwoPulse { base, smoothing } => {
                let c = smoothed_profile(base, *smoothing, t);
                base.direction.iter().map(|&d| c * d).collect()
            }
            Signal::Tracking { w, aw, horizon } => {
                let s = two * t / *horizon - S::one();
                let dphi = two / *horizon * mollifier_derivative(s);
                let phi = mollifier(s);
                w.iter().zip(aw).map(|(&x, &y)| dphi * x - phi * y).collect()
            }
            Signal::Sampled { times, values } => {
                let idx = match times.binary_search_by(|x| x.partial_cmp(&t).expect("finite")) {
                    Ok(i) => return Ok(values[i].clone()),
                    Err(i) => i.max(1).min(times.len() - 1),
                };
                let (t0, t1) = (times[idx - 1], times[idx]);
                let f = (t - t0) / (t1 - t0);
                values[idx - 1]
                    .iter()
                    .zip(&values[idx])
                    .map(|(&a, &b)| a + f * (b - a))
                    .collect()
            }
        })
    }
}

fn check_horizon<S: Real>(horizon: S) -> Result<()> {
    if horizon > S::zero() && horizon.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!("horizon {horizon} must be positive")))
    }
}

fn smoothed_profile<S: Real>(base: &TwoPulse<S>, eps: S, t: S) -> S {
    // (chi_[c,d] * rho_eps)(t) = Phi((t - c)/eps) - Phi((t - d)/eps)
    let window = |c: S, d: S| mollifier_cdf((t - c) / eps) - mollifier_cdf((t - d) / eps);
    let w = base.width();
    let mut v = S::zero();
    if base.a != S::zero() {
        v += base.a * window(S::zero(), w);
    }
    if base.b != S::zero() {
        v += base.b * window(base.horizon - w, base.horizon);
    }
    v
}

/// Continuous approximation of a two-pulse signal by mollifier convolution.
///
/// Requires `0 < eps < 1/(2k)` and `eps < (T - 2/k)/2` so the smoothed pulses
/// stay disjoint and keep a plateau.
pub fn mollify_two_pulse<S: Real>(base: &TwoPulse<S>, eps: S) -> Result<Signal<S>> {
    let w = base.width();
    let two = S::lit(2.0);
    let gap = base.horizon - two * w;
    if !(eps > S::zero()) || !(eps < w / two) || !(eps < gap / two) {
        return Err(Error::SmoothingTooWide {
            width: eps.to_f64_lossy(),
        });
    }
    Ok(Signal::MollifiedTwoPulse {
        base: base.clone(),
        smoothing: eps,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn mollifier_values() {
        assert!((mollifier(0.0f64) - (-1f64).exp()).abs() < 1e-16);
        assert_eq!(mollifier(1.0f64), 0.0);
        assert_eq!(mollifier(-1.0f64), 0.0);
        assert!((mollifier(0.5f64) - (-4.0f64 / 3.0).exp()).abs() < 1e-16);
    }

    #[test]
    fn mollifier_derivative_values() {
        assert_eq!(mollifier_derivative(0.0f64), 0.0);
        assert_eq!(mollifier_derivative(1.0f64), 0.0);
        let expected = -1.0 / 0.5625 * (-4.0f64 / 3.0).exp();
        assert!((mollifier_derivative(0.5f64) - expected).abs() < 1e-15);
        assert!((expected + 0.46862).abs() < 1e-5);
        let h = 1e-6;
        let fd = (mollifier(0.5 + h) - mollifier(0.5 - h)) / (2.0 * h);
        assert!((fd - expected).abs() < 1e-7);
    }

    #[test]
    fn mass_and_cdf() {
        let z: f64 = mollifier_mass();
        assert!((z - 0.443_993_816_168_079_4).abs() < 1e-13);
        assert_eq!(mollifier_cdf(-1.5f64), 0.0);
        assert_eq!(mollifier_cdf(1.0f64), 1.0);
        assert!((mollifier_cdf(0.0f64) - 0.5).abs() < 1e-14);
        assert!((mollifier_cdf(0.3f64) + mollifier_cdf(-0.3f64) - 1.0).abs() < 1e-13);
    }

    #[test]
    fn two_pulse_evaluation() {
        let e1 = vec![1.0, 0.0, 0.0];
        let p = TwoPulse::new(1.0, 1.0, 1.0, 2.0, e1.clone()).unwrap();
        let s = Signal::TwoPulse(p);
        assert_eq!(s.eval(0.5).unwrap(), vec![1.0, 0.0, 0.0]);
        let gap = Signal::TwoPulse(TwoPulse::new(1.0, 1.0, 1.0, 3.0, e1).unwrap());
        assert_eq!(gap.eval(1.5).unwrap(), vec![0.0; 3]);
    }

    #[test]
    fn two_pulse_jump_conventions() {
        let p = TwoPulse::new(2.0, -1.0, 1.0, 4.0, vec![1.0]).unwrap();
        assert_eq!(p.profile(1.0, false), 2.0);
        assert_eq!(p.profile(1.0, true), 0.0);
        assert_eq!(p.profile(3.0, false), 0.0);
        assert_eq!(p.profile(3.0, true), -1.0);
        assert_eq!(p.profile(4.0, false), -1.0);
        assert_eq!(p.profile(0.0, false), 2.0);
        assert_eq!(Signal::TwoPulse(p).breakpoints(), vec![1.0, 3.0]);
    }

    #[test]
    fn overlapping_pulses_rejected() {
        let err = TwoPulse::new(1.0, 1.0, 0.5, 2.0, vec![1.0]).unwrap_err();
        assert!(matches!(err, Error::PulseOverlap { .. }));
    }

    #[test]
    fn evaluation_outside_horizon_fails() {
        let s = Signal::mollifier_real(1.0, vec![1.0], 1.0).unwrap();
        assert!(matches!(s.eval(1.5), Err(Error::SignalDomainError { .. })));
        assert!(matches!(s.eval(-0.1), Err(Error::SignalDomainError { .. })));
        assert_eq!(s.eval(0.5).unwrap(), vec![0.0]);
    }

    #[test]
    fn mollified_plateau_and_gap() {
        let base = TwoPulse::new(1.0f64, 1.0, 1.0, 4.0, vec![1.0]).unwrap();
        let s = mollify_two_pulse(&base, 0.1).unwrap();
        assert!((s.eval(0.5).unwrap()[0] - 1.0).abs() < 1e-14);
        assert_eq!(s.eval(2.0).unwrap()[0], 0.0);
        assert!((s.eval(3.5).unwrap()[0] - 1.0).abs() < 1e-14);
    }

    #[test]
    fn smoothing_width_checked() {
        let base = TwoPulse::new(1.0, 1.0, 1.0, 4.0, vec![1.0]).unwrap();
        assert!(matches!(mollify_two_pulse(&base, 0.6), Err(Error::SmoothingTooWide { .. })));
        assert!(matches!(mollify_two_pulse(&base, 0.0), Err(Error::SmoothingTooWide { .. })));
        let tight = TwoPulse::new(1.0, 1.0, 1.0, 2.1, vec![1.0]).unwrap();
        assert!(matches!(mollify_two_pulse(&tight, 0.06), Err(Error::SmoothingTooWide { .. })));
    }

    #[test]
    fn sampled_interpolates() {
        let s = Signal::sampled(vec![0.0, 1.0, 3.0], vec![vec![0.0], vec![2.0], vec![0.0]]).unwrap();
        assert_eq!(s.eval(0.5).unwrap(), vec![1.0]);
        assert_eq!(s.eval(2.0).unwrap(), vec![1.0]);
        assert_eq!(s.eval(3.0).unwrap(), vec![0.0]);
        assert!(Signal::sampled(vec![0.0, 0.0], vec![vec![1.0], vec![1.0]]).is_err());
    }

    #[test]
    fn json_tagging() {
        let s = Signal::mollifier_real(1.0, vec![1.0, 0.0], 2.0).unwrap();
        let j = serde_json::to_value(&s).unwrap();
        assert_eq!(j["variant"], "MollifierReal");
        let back: Signal<f64> = serde_json::from_value(j).unwrap();
        assert_eq!(back, s);
        let p = Signal::TwoPulse(TwoPulse::new(1.0, -1.0, 1.0, 3.0, vec![1.0]).unwrap());
        let j = serde_json::to_value(&p).unwrap();
        assert_eq!(j["variant"], "TwoPulse");
        assert_eq!(j["k"], 1.0);
    }
}
