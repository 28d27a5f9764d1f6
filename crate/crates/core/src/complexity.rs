//! Rational complexity functions `Y(s)`: reduction, poles, residues, the
//! real part on the imaginary axis, and the four-condition edge-of-chaos test.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::genericity::ComplexValue;
use crate::linsys::{eigenvalues, Matrix};
use crate::serde_ext::extended_f64;

pub const DEFAULT_COEFF_TOL: f64 = 1e-14;
pub const DEFAULT_CLUSTER_TOL: f64 = 1e-6;
pub const DEFAULT_ON_AXIS_TOL: f64 = 1e-7;

/// Horner evaluation of an ascending-degree real polynomial at a complex point.
pub fn poly_eval(c: &[f64], s: Complex64) -> Complex64 {
    c.iter().rev().fold(Complex64::new(0.0, 0.0), |acc, &k| acc * s + k)
}

pub fn poly_derivative(c: &[f64]) -> Vec<f64> {
    if c.len() <= 1 {
        return vec![0.0];
    }
    c.iter().enumerate().skip(1).map(|(i, &k)| i as f64 * k).collect()
}

/// Drops high-degree coefficients with `|c| <= tol * max|c|`. The zero
/// polynomial comes back as `[0.0]`.
pub fn poly_trim(c: &[f64], tol: f64) -> Vec<f64> {
    let scale = c.iter().fold(0.0f64, |m, x| m.max(x.abs()));
    let mut out = c.to_vec();
    while out.len() > 1 && out.last().is_some_and(|x| x.abs() <= tol * scale) {
        out.pop();
    }
    if out.is_empty() || scale == 0.0 {
        return vec![0.0];
    }
    out
}

fn degree(c: &[f64]) -> usize {
    c.len().saturating_sub(1)
}

fn is_zero_poly(c: &[f64]) -> bool {
    c.iter().all(|&x| x == 0.0)
}

/// Roots of a trimmed polynomial from the eigenvalues of its companion matrix.
pub fn poly_roots(c: &[f64]) -> Result<Vec<Complex64>> {
    let n = degree(c);
    match n {
        0 => Ok(Vec::new()),
        1 => Ok(vec![Complex64::new(-c[0] / c[1], 0.0)]),
        _ => {
            let lead = c[n];
            let comp = Matrix::from_fn(n, n, |i, j| {
                let sub = if i == j + 1 { 1.0 } else { 0.0 };
                if j == n - 1 {
                    sub - c[i] / lead
                } else {
                    sub
                }
            });
            eigenvalues(&comp)
        }
    }
}

/// Long division `num = q den + r`, returning `(q, r)`.
pub fn poly_divide(num: &[f64], den: &[f64]) -> (Vec<f64>, Vec<f64>) {
    let dn = degree(den);
    let nn = degree(num);
    if nn < dn {
        return (vec![0.0], num.to_vec());
    }
    let mut rem = num.to_vec();
    let mut q = vec![0.0; nn - dn + 1];
    for k in (0..=nn - dn).rev() {
        let coef = rem[k + dn] / den[dn];
        q[k] = coef;
        for (j, &d) in den.iter().enumerate() {
            rem[k + j] -= coef * d;
        }
        rem[k + dn] = 0.0;
    }
    rem.truncate(dn.max(1));
    (q, rem)
}

fn cauchy_bound(c: &[f64]) -> f64 {
    let n = degree(c);
    if n == 0 {
        return 1.0;
    }
    1.0 + c[..n].iter().fold(0.0f64, |m, x| m.max((x / c[n]).abs()))
}

#[derive(Deserialize)]
struct RawRational {
    num: Vec<f64>,
    den: Vec<f64>,
}

impl TryFrom<RawRational> for RationalFunction {
    type Error = Error;
    fn try_from(raw: RawRational) -> Result<Self> {
        RationalFunction::new(raw.num, raw.den)
    }
}

/// `Y(s) = num(s) / den(s)` with real ascending-degree coefficients.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawRational")]
pub struct RationalFunction {
    num: Vec<f64>,
    den: Vec<f64>,
}

impl RationalFunction {
    /// Trims negligible leading coefficients; no cancellation is performed.
    pub fn new(num: Vec<f64>, den: Vec<f64>) -> Result<Self> {
        Self::with_coeff_tol(num, den, DEFAULT_COEFF_TOL)
    }

    pub fn with_coeff_tol(num: Vec<f64>, den: Vec<f64>, coeff_tol: f64) -> Result<Self> {
        if num.iter().any(|x| !x.is_finite()) {
            return Err(Error::NonFiniteEntry("numerator"));
        }
        if den.iter().any(|x| !x.is_finite()) {
            return Err(Error::NonFiniteEntry("denominator"));
        }
        let den = poly_trim(&den, coeff_tol);
        if is_zero_poly(&den) {
            return Err(Error::ZeroDenominator);
        }
        Ok(Self {
            num: poly_trim(&num, coeff_tol),
            den,
        })
    }

    pub fn num(&self) -> &[f64] {
        &self.num
    }

    pub fn den(&self) -> &[f64] {
        &self.den
    }

    pub fn eval(&self, s: Complex64) -> Complex64 {
        poly_eval(&self.num, s) / poly_eval(&self.den, s)
    }

    /// Cancels common numerator/denominator roots closer than `cluster_tol`.
    /// Returns the reduced function and the cancelled roots (one entry per
    /// conjugate pair, upper half-plane representative).
    pub fn reduce(&self, cluster_tol: f64) -> Result<(Self, Vec<Complex64>)> {
        if is_zero_poly(&self.num) {
            return Ok((Self { num: vec![0.0], den: vec![1.0] }, Vec::new()));
        }
        let mut num = self.num.clone();
        let mut den = self.den.clone();
        let mut cancelled = Vec::new();
        loop {
            if degree(&num) == 0 || degree(&den) == 0 {
                break;
            }
            let nr = poly_roots(&num)?;
            let dr = poly_roots(&den)?;
            let common = nr.iter().filter(|r| r.im >= -cluster_tol).find_map(|r| {
                dr.iter()
                    .find(|d| (*r - **d).norm() <= cluster_tol)
                    .map(|d| (r + d) * 0.5)
            });
            let Some(r) = common else { break };
            let factor = if r.im.abs() <= cluster_tol {
                vec![-r.re, 1.0]
            } else {
                vec![r.norm_sqr(), -2.0 * r.re, 1.0]
            };
            num = poly_divide(&num, &factor).0;
            den = poly_divide(&den, &factor).0;
            cancelled.push(if r.im.abs() <= cluster_tol {
                Complex64::new(r.re, 0.0)
            } else {
                Complex64::new(r.re, r.im.abs())
            });
        }
        Ok((Self { num, den }, cancelled))
    }

    /// `1e4` times the larger Cauchy root bound of numerator and denominator.
    pub fn default_omega_max(&self) -> f64 {
        1e4 * cauchy_bound(&self.num).max(cauchy_bound(&self.den))
    }

    /// `lim Re Y(i w)` as `w -> infinity`, from the polynomial part of `Y`.
    pub fn axis_limit(&self) -> f64 {
        let (q, _) = poly_divide(&self.num, &self.den);
        let scale = q.iter().fold(0.0f64, |m, x| m.max(x.abs()));
        let top = (2..q.len())
            .step_by(2)
            .rfind(|&j| q[j].abs() > 1e-12 * scale);
        match top {
            Some(j) => {
                let sign = if (j / 2) % 2 == 0 { 1.0 } else { -1.0 };
                (sign * q[j]).signum() * f64::INFINITY
            }
            None => q[0],
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Pole {
    pub location: ComplexValue,
    pub multiplicity: usize,
}

impl Pole {
    pub fn z(&self) -> Complex64 {
        Complex64::new(self.location.re, self.location.im)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PoleSet {
    pub poles: Vec<Pole>,
    pub on_axis_tol: f64,
}

impl PoleSet {
    pub fn total_multiplicity(&self) -> usize {
        self.poles.iter().map(|p| p.multiplicity).sum()
    }

    pub fn on_axis(&self) -> impl Iterator<Item = &Pole> {
        self.poles.iter().filter(move |p| p.location.re.abs() <= self.on_axis_tol)
    }
}

/// Denominator roots grouped by single linkage at distance `cluster_tol`;
/// each group is reported at its centroid. Expects a reduced function.
pub fn poles(rf: &RationalFunction, cluster_tol: f64) -> Result<PoleSet> {
    let roots = poly_roots(&rf.den)?;
    let n = roots.len();
    let mut label: Vec<usize> = (0..n).collect();
    for i in 0..n {
        for j in 0..i {
            if (roots[i] - roots[j]).norm() <= cluster_tol {
                let (from, to) = (label[i], label[j]);
                for l in label.iter_mut() {
                    if *l == from {
                        *l = to;
                    }
                }
            }
        }
    }
    let mut groups: Vec<usize> = label.clone();
    groups.sort_unstable();
    groups.dedup();
    let mut out: Vec<Pole> = groups
        .into_iter()
        .map(|g| {
            let members: Vec<Complex64> = (0..n).filter(|&i| label[i] == g).map(|i| roots[i]).collect();
            let mean = members.iter().sum::<Complex64>() / members.len() as f64;
            Pole {
                location: mean.into(),
                multiplicity: members.len(),
            }
        })
        .collect();
    out.sort_by(|a, b| {
        b.location
            .re
            .total_cmp(&a.location.re)
            .then(b.location.im.total_cmp(&a.location.im))
    });
    Ok(PoleSet {
        poles: out,
        on_axis_tol: DEFAULT_ON_AXIS_TOL,
    })
}

/// `num(p) / den'(p)` at a simple root `p` of the denominator.
pub fn residue_at_simple_pole(rf: &RationalFunction, p: Complex64) -> Result<Complex64> {
    let r = p.norm();
    let mag = |c: &[f64]| c.iter().enumerate().map(|(i, x)| x.abs() * r.powi(i as i32)).sum::<f64>();
    let dprime = poly_derivative(&rf.den);
    let d = poly_eval(&rf.den, p);
    let dp = poly_eval(&dprime, p);
    if d.norm() > 1e-8 * mag(&rf.den).max(f64::MIN_POSITIVE) || dp.norm() <= 1e-8 * mag(&dprime) {
        return Err(Error::NotASimplePole);
    }
    Ok(poly_eval(&rf.num, p) / dp)
}

/// Smallest sampled value of `Re Y(i w)` and the limit as `w -> infinity`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct AxisMinimum {
    #[serde(with = "extended_f64")]
    pub omega: f64,
    #[serde(with = "extended_f64")]
    pub value: f64,
    #[serde(with = "extended_f64")]
    pub asymptote: f64,
}

impl AxisMinimum {
    pub fn infimum(&self) -> f64 {
        self.value.min(self.asymptote)
    }
}

fn golden_min(f: &impl Fn(f64) -> f64, mut a: f64, mut b: f64) -> (f64, f64) {
    let g = 0.5 * (5f64.sqrt() - 1.0);
    let mut c = b - g * (b - a);
    let mut d = a + g * (b - a);
    let (mut fc, mut fd) = (f(c), f(d));
    for _ in 0..80 {
        if fc < fd {
            b = d;
            d = c;
            fd = fc;
            c = b - g * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + g * (b - a);
            fd = f(d);
        }
        if b - a <= 1e-13 * (1.0 + b.abs()) {
            break;
        }
    }
    if fc < fd {
        (c, fc)
    } else {
        (d, fd)
    }
}

/// Minimises `Re Y(i w)` over `w >= 0` (the function is even in `w`) on a
/// mixed logarithmic and linear grid of about `grid` points up to
/// `omega_max`, skipping small windows around poles on the axis, then
/// refines the best sample by golden-section search.
pub fn min_real_on_axis(rf: &RationalFunction, omega_max: f64, grid: usize) -> Result<AxisMinimum> {
    if !(omega_max > 0.0) || !omega_max.is_finite() || grid < 2 {
        return Err(Error::InvalidParameter(format!(
            "need omega_max > 0 and grid >= 2 (got {omega_max}, {grid})"
        )));
    }
    let (reduced, _) = rf.reduce(DEFAULT_CLUSTER_TOL)?;
    let pset = poles(&reduced, DEFAULT_CLUSTER_TOL)?;
    let axis: Vec<f64> = pset.on_axis().map(|p| p.location.im.abs()).collect();
    let excluded = |w: f64| axis.iter().any(|&wp| (w - wp).abs() <= 1e-6 * (1.0 + wp));
    let re_y = |w: f64| {
        let v = reduced.eval(Complex64::new(0.0, w)).re;
        if v.is_finite() {
            v
        } else {
            f64::INFINITY
        }
    };

    let n_log = grid / 2;
    let n_lin = grid - n_log;
    let lo = omega_max * 1e-9;
    let mut ws: Vec<f64> = Vec::with_capacity(grid + 16);
    ws.push(0.0);
    for k in 0..n_log {
        let f = k as f64 / (n_log.max(2) - 1) as f64;
        ws.push(lo * (omega_max / lo).powf(f));
    }
    for k in 1..=n_lin {
        ws.push(omega_max * k as f64 / n_lin as f64);
    }
    let zeros = poly_roots(&reduced.num)?;
    let features = zeros.iter().map(|z| z.im).chain(pset.poles.iter().map(|p| p.location.im));
    ws.extend(features.map(f64::abs).filter(|&w| w <= omega_max));
    ws.sort_by(f64::total_cmp);
    ws.dedup();
    ws.retain(|&w| !excluded(w));

    let values: Vec<f64> = ws.iter().map(|&w| re_y(w)).collect();
    let asymptote = reduced.axis_limit();
    let Some((k, _)) = values.iter().enumerate().min_by(|a, b| a.1.total_cmp(b.1)) else {
        return Ok(AxisMinimum {
            omega: f64::NAN,
            value: f64::INFINITY,
            asymptote,
        });
    };
    let (mut omega, mut value) = (ws[k], values[k]);
    let a = if k > 0 { ws[k - 1] } else { ws[k] };
    let b = if k + 1 < ws.len() { ws[k + 1] } else { ws[k] };
    if b > a && !axis.iter().any(|&wp| wp >= a && wp <= b) {
        let (w, v) = golden_min(&re_y, a, b);
        if v < value {
            omega = w;
            value = v;
        }
    }
    Ok(AxisMinimum { omega, value, asymptote })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct EdgeTolerances {
    pub on_axis_tol: f64,
    pub resid_tol: f64,
    pub axis_val_tol: f64,
    pub cluster_tol: f64,
    pub grid: usize,
    /// `None` selects [`RationalFunction::default_omega_max`].
    pub omega_max: Option<f64>,
}

impl Default for EdgeTolerances {
    fn default() -> Self {
        Self {
            on_axis_tol: DEFAULT_ON_AXIS_TOL,
            resid_tol: 1e-9,
            axis_val_tol: 1e-10,
            cluster_tol: DEFAULT_CLUSTER_TOL,
            grid: 4096,
            omega_max: None,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct AxisResidue {
    pub pole: ComplexValue,
    pub residue: ComplexValue,
    pub positive_real: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EdgeEvidence {
    pub unstable_pole: Option<ComplexValue>,
    pub multiple_axis_pole: Option<Pole>,
    pub axis_residues: Vec<AxisResidue>,
    pub axis_minimum: AxisMinimum,
    pub poles: Vec<Pole>,
    pub cancelled_roots: Vec<ComplexValue>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EdgeClassification {
    pub cond_i: bool,
    pub cond_ii: bool,
    pub cond_iii: bool,
    pub cond_iv: bool,
    pub locally_active: bool,
    pub edge_of_chaos: bool,
    pub evidence: EdgeEvidence,
}

/// Evaluates conditions (i)-(iv) on the reduced function.
pub fn edge_of_chaos_classify(rf: &RationalFunction, tols: &EdgeTolerances) -> Result<EdgeClassification> {
    let (reduced, cancelled) = rf.reduce(tols.cluster_tol)?;
    let mut pset = poles(&reduced, tols.cluster_tol)?;
    pset.on_axis_tol = tols.on_axis_tol;

    let unstable_pole = pset
        .poles
        .iter()
        .find(|p| p.location.re > tols.on_axis_tol)
        .map(|p| p.location);
    let multiple_axis_pole = pset.on_axis().find(|p| p.multiplicity >= 2).copied();
    let mut axis_residues = Vec::new();
    for p in pset.on_axis().filter(|p| p.multiplicity == 1) {
        let res = residue_at_simple_pole(&reduced, p.z())?;
        axis_residues.push(AxisResidue {
            pole: p.location,
            residue: res.into(),
            positive_real: res.im.abs() <= tols.resid_tol && res.re >= -tols.resid_tol,
        });
    }
    let omega_max = tols.omega_max.unwrap_or_else(|| reduced.default_omega_max());
    let axis_minimum = min_real_on_axis(&reduced, omega_max, tols.grid)?;

    let cond_i = unstable_pole.is_some();
    let cond_ii = multiple_axis_pole.is_some();
    let cond_iii = axis_residues.iter().any(|r| !r.positive_real);
    let cond_iv = axis_minimum.infimum() < -tols.axis_val_tol;
    Ok(EdgeClassification {
        cond_i,
        cond_ii,
        cond_iii,
        cond_iv,
        locally_active: cond_i || cond_ii || cond_iii || cond_iv,
        edge_of_chaos: cond_iv && !cond_i && !cond_ii && !cond_iii,
        evidence: EdgeEvidence {
            unstable_pole,
            multiple_axis_pole,
            axis_residues,
            axis_minimum,
            poles: pset.poles,
            cancelled_roots: cancelled.into_iter().map(Into::into).collect(),
        },
    })
}

/// Complexity function of the dissipative FitzHugh–Nagumo cell linearised at
/// an equilibrium with port coordinate `x_d`. Coefficients are returned as
/// given by the formula, without cancellation.
pub fn fhn_complexity_from_state(x_d: f64, beta: f64, xi: f64) -> Result<RationalFunction> {
    let k = x_d * x_d - 1.0;
    RationalFunction::new(vec![xi * beta * k + xi, xi * beta + k, 1.0], vec![xi * beta, 1.0])
}

/// As [`fhn_complexity_from_state`], with `x_d` the equilibrium of the model
/// at dissipation `mu` reached by Newton from `(-1, -0.6)`.
pub fn fhn_complexity_function(mu: f64, beta: f64, gamma: f64, xi: f64) -> Result<RationalFunction> {
    for (name, v) in [("mu", mu), ("beta", beta), ("gamma", gamma), ("xi", xi)] {
        if !v.is_finite() {
            return Err(Error::InvalidParameter(format!("{name} must be finite")));
        }
    }
    let sys = crate::nonlinear::fhn_system(mu, beta, gamma, xi);
    let eq = crate::nonlinear::find_equilibrium(&sys, &[-1.0, -0.6], 1e-10, 100)
        .map_err(|e| Error::EquilibriumNotFound(e.to_string()))?;
    fhn_complexity_from_state(eq.x_star[0], beta, xi)
}
