//! Local activity of `x' = A x + P u`: the energy functional
//! `W_T(u) = \int_0^T <x, P u> dt` with `x(0) = 0`, witness signals that make
//! it negative, passivity certificates, and the overall classifier.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::genericity::{in_generic_m, port_direction, port_transform};
use crate::linsys::matrix::{dot, norm2};
use crate::linsys::{integrate, max_sym_eigenvalue, spectrum, top_symmetric_eigenpair, LinearPortSystem, Matrix, Spectrum};
use crate::signals::{mollify_two_pulse, Signal, TwoPulse};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct WitnessSearchConfig {
    /// Upper end of the horizon scan; `None` means `200 / max(Re l1, 0.1)`.
    pub t_max: Option<f64>,
    pub t_scan_step: f64,
    pub quad_steps_per_unit_time: usize,
    pub min_quad_steps: usize,
    pub cert_tol: f64,
    pub eigvec_in_imp_tol: f64,
    pub spec_tol: f64,
    pub generic_tol: f64,
    pub sym_tol: f64,
    pub imag_tol: f64,
    pub random_trials: usize,
    pub seed: u64,
}

impl Default for WitnessSearchConfig {
    fn default() -> Self {
        Self {
            t_max: None,
            t_scan_step: 0.05,
            quad_steps_per_unit_time: 200,
            min_quad_steps: 400,
            cert_tol: 1e-9,
            eigvec_in_imp_tol: 1e-8,
            spec_tol: 1e-8,
            generic_tol: 1e-8,
            sym_tol: 1e-12,
            imag_tol: 1e-8,
            random_trials: 256,
            seed: 0,
        }
    }
}

impl WitnessSearchConfig {
    pub fn validate(&self) -> Result<()> {
        let positive = [
            ("t_scan_step", self.t_scan_step),
            ("cert_tol", self.cert_tol),
            ("eigvec_in_imp_tol", self.eigvec_in_imp_tol),
            ("spec_tol", self.spec_tol),
            ("generic_tol", self.generic_tol),
            ("sym_tol", self.sym_tol),
            ("imag_tol", self.imag_tol),
            ("t_max", self.t_max.unwrap_or(1.0)),
        ];
        for (name, v) in positive {
            if !(v > 0.0) || !v.is_finite() {
                return Err(Error::InvalidParameter(format!("{name} must be positive, got {v}")));
            }
        }
        if self.quad_steps_per_unit_time == 0 || self.min_quad_steps == 0 {
            return Err(Error::InvalidParameter("quadrature step counts must be positive".into()));
        }
        Ok(())
    }

    /// Integration steps used for a horizon `t`.
    pub fn steps_for(&self, t: f64) -> usize {
        ((self.quad_steps_per_unit_time as f64 * t).ceil() as usize).max(self.min_quad_steps)
    }

    fn horizon_limit(&self, lead_re: f64) -> f64 {
        self.t_max.unwrap_or(200.0 / lead_re.max(0.1))
    }
}

/// `W` with the step-halving discrepancy as error estimate.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct EnergyEstimate {
    #[serde(rename = "W")]
    pub w: f64,
    pub err: f64,
}

impl EnergyEstimate {
    /// `W < -err`.
    pub fn is_verified_negative(&self) -> bool {
        self.w < -self.err.abs()
    }
}

/// `W_T(u)` integrated jointly with the state by RK4 at `steps` and `2 steps`;
/// returns the finer value.
pub fn energy_integral(
    sys: &LinearPortSystem<f64>,
    u: &Signal<f64>,
    horizon: f64,
    steps: usize,
) -> Result<EnergyEstimate> {
    let coarse = integrate(sys, u, horizon, steps)?.energy;
    let fine = integrate(sys, u, horizon, 2 * steps)?.energy;
    if !fine.is_finite() {
        return Err(Error::OverflowRisk { norm: fine.abs() });
    }
    Ok(EnergyEstimate {
        w: fine,
        err: (fine - coarse).abs(),
    })
}

fn phi1_neg(z: Complex64) -> Complex64 {
    // (1 - e^{-z}) / z
    if z.norm() < 0.5 {
        let mut term = Complex64::new(1.0, 0.0);
        let mut sum = term;
        for j in 1..30 {
            term = -term * z / (j as f64 + 1.0);
            sum += term;
        }
        sum
    } else {
        (1.0 - (-z).exp()) / z
    }
}

fn phi2(z: Complex64) -> Complex64 {
    // (e^z - 1 - z) / z^2
    if z.norm() < 0.5 {
        let mut term = Complex64::new(0.5, 0.0);
        let mut sum = term;
        for j in 3..32 {
            term = term * z / j as f64;
            sum += term;
        }
        sum
    } else {
        (z.exp() - 1.0 - z) / (z * z)
    }
}

/// `\int_0^T \int_0^t e^{l (t - s)} u1(s) u1(t) ds dt` for the two-pulse profile.
pub fn two_pulse_kernel(lambda: Complex64, a: f64, b: f64, k: f64, horizon: f64) -> Complex64 {
    let z = lambda / k;
    let k2 = k * k;
    let p = phi1_neg(z);
    (a * a + b * b) / k2 * phi2(z) + a * b / k2 * (lambda * horizon).exp() * p * p
}

/// Closed-form `W_T` of the two-pulse signal along `e1` for a diagonalizable
/// system with `e1` in the port image. `port_row_g` is the first row of `G`,
/// `port_col_h` the first column of `H`.
#[allow(clippy::too_many_arguments)]
pub fn two_pulse_energy_closed_form(
    spec: &Spectrum<f64>,
    port_row_g: &[Complex64],
    port_col_h: &[Complex64],
    a: f64,
    b: f64,
    k: f64,
    horizon: f64,
    imag_tol: f64,
) -> Result<f64> {
    if !spec.diagonalizable {
        return Err(Error::NotDiagonalizable { gap: spec.min_gap });
    }
    let n = spec.n();
    if port_row_g.len() != n || port_col_h.len() != n {
        return Err(Error::DimensionMismatch("port row/column length differs from n".into()));
    }
    let scale = spec.eigenvalues.iter().map(|l| l.norm()).fold(1.0, f64::max);
    if let Some(l) = spec.eigenvalues.iter().find(|l| l.norm() <= f64::EPSILON * scale) {
        return Err(Error::ZeroEigenvalue { modulus: l.norm() });
    }
    if !(k >= 2.0 / horizon * (1.0 - 4.0 * f64::EPSILON)) {
        return Err(Error::PulseOverlap { k, min_k: 2.0 / horizon });
    }
    let mut total = Complex64::new(0.0, 0.0);
    let mut magnitude = 0.0;
    for l in 0..n {
        let term = port_row_g[l] * port_col_h[l] * two_pulse_kernel(spec.eigenvalues[l], a, b, k, horizon);
        magnitude += term.norm();
        total += term;
    }
    if total.im.abs() > imag_tol * (1.0 + magnitude) {
        return Err(Error::ConjugateAsymmetry { imag: total.im });
    }
    Ok(total.re)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum WitnessRoute {
    /// `x(t) = phi(t) w` along the top eigenvector of the symmetric part.
    Tracking { sym_eig: f64 },
    RealEigen { lambda: f64 },
    ComplexEigen { alpha: f64, beta: f64, t0: f64, eps: f64 },
    TwoPulseGeneric { a: f64, closed_form: f64, smoothing: f64 },
    RandomSearch { trial: usize },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Witness {
    pub signal: Signal<f64>,
    #[serde(rename = "T")]
    pub horizon: f64,
    #[serde(rename = "W")]
    pub energy: f64,
    pub quadrature_error_estimate: f64,
    pub route: WitnessRoute,
}

impl Witness {
    fn verified(
        sys: &LinearPortSystem<f64>,
        signal: Signal<f64>,
        horizon: f64,
        steps: usize,
        route: WitnessRoute,
    ) -> Result<Self> {
        let e = energy_integral(sys, &signal, horizon, steps)?;
        Ok(Self {
            signal,
            horizon,
            energy: e.w,
            quadrature_error_estimate: e.err,
            route,
        })
    }

    pub fn is_verified(&self) -> bool {
        self.energy < -self.quadrature_error_estimate.abs()
    }
}

fn residual_scale(a: &Matrix<f64>) -> f64 {
    a.frobenius_norm().max(1.0)
}

fn check_in_image(sys: &LinearPortSystem<f64>, v: &[f64], tol: f64) -> Result<()> {
    let residual = sys.image_residual(v);
    if residual > tol {
        return Err(Error::EigvecNotInImP { residual });
    }
    Ok(())
}

/// The mollifier witness for a positive real eigenpair `(lambda, v)` with `v` in `im P`.
pub fn witness_real_eigen(
    sys: &LinearPortSystem<f64>,
    lambda: f64,
    v: &[f64],
    horizon: f64,
    cfg: &WitnessSearchConfig,
) -> Result<Witness> {
    if !(lambda > 0.0) {
        return Err(Error::NonPositiveEigenvalue(lambda));
    }
    if v.len() != sys.n() {
        return Err(Error::DimensionMismatch(format!("eigenvector has length {}", v.len())));
    }
    let av = sys.a().matvec(v);
    let residual = av.iter().zip(v).map(|(x, y)| (x - lambda * y).powi(2)).sum::<f64>().sqrt();
    if residual > cfg.spec_tol * norm2(v) * residual_scale(sys.a()) {
        return Err(Error::EigpairMismatch { residual });
    }
    check_in_image(sys, v, cfg.eigvec_in_imp_tol)?;
    let signal = Signal::mollifier_real(lambda, v.to_vec(), horizon)?;
    let steps = cfg.steps_for(horizon).max((100.0 * lambda * horizon).ceil() as usize);
    Witness::verified(sys, signal, horizon, steps, WitnessRoute::RealEigen { lambda })
}

/// Normalised slope `e^{-2 alpha t} g'(t)` with `g(t) = e^{2 alpha t} |sin(bt) v1 + cos(bt) v2|^2`.
pub fn growth_slope(alpha: f64, beta: f64, v1: &[f64], v2: &[f64], t: f64) -> f64 {
    let (s, c) = (beta * t).sin_cos();
    let mut sq = 0.0;
    let mut cross = 0.0;
    for (&p, &q) in v1.iter().zip(v2) {
        let x = s * p + c * q;
        let dx = beta * (c * p - s * q);
        sq += x * x;
        cross += x * dx;
    }
    2.0 * alpha * sq + 2.0 * cross
}

/// `g(t) = e^{2 alpha t} |sin(beta t) v1 + cos(beta t) v2|^2`.
pub fn growth_function(alpha: f64, beta: f64, v1: &[f64], v2: &[f64], t: f64) -> f64 {
    let (s, c) = (beta * t).sin_cos();
    let sq: f64 = v1.iter().zip(v2).map(|(&p, &q)| (s * p + c * q).powi(2)).sum();
    (2.0 * alpha * t).exp() * sq
}

/// Picks `t0` maximising the slope of `g` over one period and the widest
/// window `(t0 - eps, t0 + eps)` on which the slope stays positive.
pub fn select_mollifier_window(alpha: f64, beta: f64, v1: &[f64], v2: &[f64]) -> Result<(f64, f64)> {
    let half = std::f64::consts::PI / beta.abs();
    let slope = |t: f64| growth_slope(alpha, beta, v1, v2, t);
    const GRID: usize = 1024;
    let (mut t0, mut best) = (half, f64::NEG_INFINITY);
    for i in 0..GRID {
        let t = half + half * i as f64 / GRID as f64;
        let s = slope(t);
        if s > best {
            best = s;
            t0 = t;
        }
    }
    if !(best > 0.0) {
        return Err(Error::NoPositiveSlopeFound);
    }
    let reach = |dir: f64| -> f64 {
        let step = half / 4096.0;
        let mut inside = 0.0;
        while inside < half {
            let next = (inside + step).min(half);
            if slope(t0 + dir * next) <= 0.0 {
                let (mut lo, mut hi) = (inside, next);
                for _ in 0..60 {
                    let mid = 0.5 * (lo + hi);
                    if slope(t0 + dir * mid) > 0.0 {
                        lo = mid;
                    } else {
                        hi = mid;
                    }
                }
                return lo;
            }
            inside = next;
        }
        half
    };
    let eps = 0.9 * reach(-1.0).min(reach(1.0));
    if !(eps > 0.0) {
        return Err(Error::NoPositiveSlopeFound);
    }
    Ok((t0, eps))
}

/// The mollifier witness for an unstable complex pair `alpha + i beta` with
/// eigenvector `v1 + i v2`, both parts in `im P`.
pub fn witness_complex_eigen(
    sys: &LinearPortSystem<f64>,
    alpha: f64,
    beta: f64,
    v1: &[f64],
    v2: &[f64],
    horizon_hint: f64,
    cfg: &WitnessSearchConfig,
) -> Result<Witness> {
    if beta == 0.0 || !beta.is_finite() {
        return Err(Error::InvalidParameter("beta must be nonzero".into()));
    }
    if !(alpha > 0.0) {
        return Err(Error::NonPositiveEigenvalue(alpha));
    }
    let n = sys.n();
    if v1.len() != n || v2.len() != n {
        return Err(Error::DimensionMismatch("eigenvector parts must have length n".into()));
    }
    let (av1, av2) = (sys.a().matvec(v1), sys.a().matvec(v2));
    let mut residual = 0.0;
    for i in 0..n {
        residual += (av1[i] - (alpha * v1[i] - beta * v2[i])).powi(2);
        residual += (av2[i] - (beta * v1[i] + alpha * v2[i])).powi(2);
    }
    let residual = residual.sqrt();
    let vnorm = (dot(v1, v1) + dot(v2, v2)).sqrt();
    if residual > cfg.spec_tol * vnorm * residual_scale(sys.a()) {
        return Err(Error::EigpairMismatch { residual });
    }
    check_in_image(sys, v1, cfg.eigvec_in_imp_tol)?;
    check_in_image(sys, v2, cfg.eigvec_in_imp_tol)?;
    let (t0, eps) = select_mollifier_window(alpha, beta, v1, v2)?;
    let horizon = horizon_hint.max(t0 + eps);
    let signal = Signal::mollifier_complex(alpha, beta, v1.to_vec(), v2.to_vec(), t0, eps, horizon)?;
    let steps = cfg
        .steps_for(horizon)
        .max((200.0 * horizon / eps).ceil() as usize)
        .max((100.0 * (alpha + beta.abs()) * horizon).ceil() as usize);
    Witness::verified(
        sys,
        signal,
        horizon,
        steps,
        WitnessRoute::ComplexEigen { alpha, beta, t0, eps },
    )
}

/// Two-pulse data of a port-transformed system, ready for the closed form.
pub struct PortSpectrum {
    pub spectrum: Spectrum<f64>,
    pub port_row_g: Vec<Complex64>,
    pub port_col_h: Vec<Complex64>,
}

impl PortSpectrum {
    /// Requires `e1` to be a port of `sys`.
    pub fn new(sys: &LinearPortSystem<f64>, spec_tol: f64) -> Result<Self> {
        let spectrum = spectrum(sys.a(), spec_tol)?;
        let port_row_g = spectrum.vectors.row(0).to_vec();
        let port_col_h = spectrum.inverse.column(0);
        Ok(Self {
            spectrum,
            port_row_g,
            port_col_h,
        })
    }

    pub fn energy(&self, a: f64, b: f64, k: f64, horizon: f64, imag_tol: f64) -> Result<f64> {
        two_pulse_energy_closed_form(
            &self.spectrum,
            &self.port_row_g,
            &self.port_col_h,
            a,
            b,
            k,
            horizon,
            imag_tol,
        )
    }
}

const MAX_SMOOTHING_HALVINGS: usize = 6;

/// Constructive search for systems in the generic set: port transform,
/// closed-form scan over `(a, T)` for the two-pulse signal with `k = b = 1`,
/// then mollification and re-verification by quadrature.
pub fn witness_two_pulse_generic(sys: &LinearPortSystem<f64>, cfg: &WitnessSearchConfig) -> Result<Witness> {
    cfg.validate()?;
    let direction = port_direction(sys)?;
    let (_, transformed) = port_transform(sys)?;
    let ps = PortSpectrum::new(&transformed, cfg.generic_tol)?;
    let lead = ps.spectrum.max_real_part();
    if !(lead > 0.0) {
        return Err(Error::NoUnstableEigenvalue(lead));
    }
    let report = in_generic_m(sys, cfg.generic_tol)?;
    if !report.in_m {
        return Err(Error::NotInGenericSet(format!(
            "min|l| = {:e}, min gap = {:e}, dominance = {:e}, |g11 h11| = {:e}",
            report.min_abs_eig,
            report.min_eig_gap,
            report.dominance_gap,
            (report.g11h11.re.powi(2) + report.g11h11.im.powi(2)).sqrt()
        )));
    }
    let t_max = cfg.horizon_limit(lead);
    let count = ((t_max - 2.0) / cfg.t_scan_step + 1e-9).floor().max(0.0) as usize;
    let (mut best_w, mut best_t) = (f64::INFINITY, 2.0);
    for i in 0..=count {
        let horizon = 2.0 + i as f64 * cfg.t_scan_step;
        for a in [-1.0, 1.0] {
            let closed = ps.energy(a, 1.0, 1.0, horizon, cfg.imag_tol)?;
            if !closed.is_finite() {
                continue;
            }
            if closed < best_w {
                best_w = closed;
                best_t = horizon;
            }
            if closed >= 0.0 || horizon <= 2.0 {
                continue;
            }
            let base = TwoPulse::new(a, 1.0, 1.0, horizon, direction.clone())?;
            let mut eps = (0.1f64).min((horizon - 2.0) / 4.0);
            for _ in 0..=MAX_SMOOTHING_HALVINGS {
                let signal = mollify_two_pulse(&base, eps)?;
                let steps = cfg.steps_for(horizon).max((10.0 * horizon / eps).ceil() as usize);
                let w = Witness::verified(
                    sys,
                    signal,
                    horizon,
                    steps,
                    WitnessRoute::TwoPulseGeneric {
                        a,
                        closed_form: closed,
                        smoothing: eps,
                    },
                )?;
                if w.is_verified() {
                    return Ok(w);
                }
                eps *= 0.5;
            }
        }
    }
    Err(Error::ScanExhausted { t_max, best_w, best_t })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum CertificateKind {
    /// `(A + A^T)/2` is negative semidefinite and `P = I`.
    SymANegSemidef,
    /// `sym(P A)` is negative semidefinite for an orthogonal projection `P`.
    SymPANegSemidef,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Certificate {
    pub kind: CertificateKind,
    pub max_eig: f64,
}

/// Passivity from `max eig sym(P A) <= cert_tol`; only for orthogonal projections.
pub fn passivity_certificate(sys: &LinearPortSystem<f64>, cert_tol: f64, sym_tol: f64) -> Result<Option<Certificate>> {
    let asymmetry = sys.projection_asymmetry();
    if asymmetry > sym_tol * sys.p().frobenius_norm().max(1.0) {
        return Err(Error::NonOrthogonalProjection { asymmetry });
    }
    let max_eig = max_sym_eigenvalue(&(sys.p() * sys.a()))?;
    Ok((max_eig <= cert_tol).then_some(Certificate {
        kind: CertificateKind::SymPANegSemidef,
        max_eig,
    }))
}

/// For `P = I`: drives the state along `x(t) = phi(t) w`, `phi(t) = rho(2t/T - 1)`,
/// where `w` is the top eigenvector of the symmetric part, so that
/// `W = -<A w, w> \int phi^2 < 0`.
pub fn witness_tracking(sys: &LinearPortSystem<f64>, cfg: &WitnessSearchConfig) -> Result<Witness> {
    if !sys.is_identity_projection(cfg.sym_tol) {
        return Err(Error::InvalidParameter("tracking witness needs P = I".into()));
    }
    let (mu, w) = top_symmetric_eigenpair(&sys.a().symmetric_part())?;
    if !(mu > 0.0) {
        return Err(Error::NonPositiveEigenvalue(mu));
    }
    let aw = sys.a().matvec(&w);
    let mut best = (f64::INFINITY, 1.0);
    let mut horizon = 1.0;
    while horizon <= cfg.t_max.unwrap_or(64.0).max(1.0) {
        let signal = Signal::tracking(w.clone(), aw.clone(), horizon)?;
        let steps = cfg.steps_for(horizon).max((100.0 * residual_scale(sys.a()) * horizon).ceil() as usize);
        let wit = Witness::verified(sys, signal, horizon, steps, WitnessRoute::Tracking { sym_eig: mu })?;
        if wit.is_verified() {
            return Ok(wit);
        }
        if wit.energy < best.0 {
            best = (wit.energy, horizon);
        }
        horizon *= 2.0;
    }
    Err(Error::ScanExhausted {
        t_max: horizon / 2.0,
        best_w: best.0,
        best_t: best.1,
    })
}

/// Seeded search over `rho'(2t/T - 1) e^{lambda t} v` with random `lambda`,
/// `v` and escalating `T`, keeping the first quadrature-verified negative `W`.
pub fn witness_random_search(sys: &LinearPortSystem<f64>, cfg: &WitnessSearchConfig) -> Result<Witness> {
    let n = sys.n();
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let rate = residual_scale(sys.a());
    let t_cap = cfg.t_max.unwrap_or(64.0);
    let mut best = (f64::INFINITY, 0.0);
    for trial in 0..cfg.random_trials {
        let horizon = (0.5 * 2f64.powi((trial % 8) as i32)).min(t_cap);
        let lambda = rng.gen_range(-2.0..2.0) * rate;
        let raw: Vec<f64> = (0..n).map(|_| rng.sample(StandardNormal)).collect();
        let v = sys.p().matvec(&raw);
        if norm2(&v) == 0.0 || (lambda * horizon).abs() > 50.0 {
            continue;
        }
        let signal = Signal::mollifier_real(lambda, v, horizon)?;
        let steps = cfg.steps_for(horizon).max((100.0 * rate * horizon).ceil() as usize);
        let wit = Witness::verified(sys, signal, horizon, steps, WitnessRoute::RandomSearch { trial })?;
        if wit.is_verified() {
            return Ok(wit);
        }
        if wit.energy < best.0 {
            best = (wit.energy, horizon);
        }
    }
    Err(Error::ScanExhausted {
        t_max: t_cap,
        best_w: best.0,
        best_t: best.1,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum ActivityStatus {
    Active,
    Passive,
    Inconclusive,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ActivityVerdict {
    pub status: ActivityStatus,
    pub witness: Option<Witness>,
    pub certificate: Option<Certificate>,
    pub notes: String,
}

impl ActivityVerdict {
    fn active(witness: Witness, notes: Vec<String>) -> Self {
        Self {
            status: ActivityStatus::Active,
            witness: Some(witness),
            certificate: None,
            notes: notes.join("; "),
        }
    }

    fn passive(certificate: Certificate, notes: Vec<String>) -> Self {
        Self {
            status: ActivityStatus::Passive,
            witness: None,
            certificate: Some(certificate),
            notes: notes.join("; "),
        }
    }

    fn inconclusive(notes: Vec<String>) -> Self {
        Self {
            status: ActivityStatus::Inconclusive,
            witness: None,
            certificate: None,
            notes: notes.join("; "),
        }
    }
}

type Route<'a> = (&'static str, Box<dyn Fn() -> Result<Witness> + 'a>);

/// Witness constructors from unstable eigenpairs whose vectors lie in `im P`.
fn eigen_routes<'a>(
    sys: &'a LinearPortSystem<f64>,
    spec: &Spectrum<f64>,
    cfg: &'a WitnessSearchConfig,
) -> Vec<Route<'a>> {
    let mut routes: Vec<Route<'a>> = Vec::new();
    for (l, lambda) in spec.eigenvalues.iter().enumerate() {
        if lambda.re <= cfg.cert_tol || lambda.im < 0.0 {
            continue;
        }
        let col = spec.vectors.column(l);
        let re: Vec<f64> = col.iter().map(|z| z.re).collect();
        if lambda.im == 0.0 {
            let lam = lambda.re;
            routes.push(("real eigenvalue", Box::new(move || witness_real_eigen(sys, lam, &re, 1.0, cfg))));
        } else {
            let im: Vec<f64> = col.iter().map(|z| z.im).collect();
            let (alpha, beta) = (lambda.re, lambda.im);
            routes.push((
                "complex eigenvalue",
                Box::new(move || witness_complex_eigen(sys, alpha, beta, &re, &im, 0.0, cfg)),
            ));
        }
    }
    routes
}

fn first_witness(routes: Vec<Route<'_>>, notes: &mut Vec<String>) -> Option<Witness> {
    for (name, route) in routes {
        match route() {
            Ok(w) if w.is_verified() => {
                notes.push(format!("witness from {name} route"));
                return Some(w);
            }
            Ok(w) => notes.push(format!(
                "{name} route: W = {:e} not below error {:e}",
                w.energy, w.quadrature_error_estimate
            )),
            Err(e) => notes.push(format!("{name} route: {e}")),
        }
    }
    None
}

/// Decision procedure: the symmetric-part test when `P = I`, the
/// `sym(P A)` certificate for orthogonal `P`, then witness constructions.
/// Anything unresolved is reported as inconclusive.
pub fn classify_activity(sys: &LinearPortSystem<f64>, cfg: &WitnessSearchConfig) -> ActivityVerdict {
    let mut notes = Vec::new();
    if let Err(e) = cfg.validate() {
        return ActivityVerdict::inconclusive(vec![e.to_string()]);
    }
    let spec = match spectrum(sys.a(), cfg.spec_tol) {
        Ok(s) => Some(s),
        Err(e) => {
            notes.push(format!("spectrum: {e}"));
            None
        }
    };
    let unstable = spec.as_ref().is_some_and(|s| s.max_real_part() > 0.0);

    if sys.is_identity_projection(cfg.sym_tol) {
        let m = match max_sym_eigenvalue(sys.a()) {
            Ok(m) => m,
            Err(e) => {
                notes.push(format!("symmetric part: {e}"));
                return ActivityVerdict::inconclusive(notes);
            }
        };
        if m <= cfg.cert_tol {
            notes.push("all coordinates are ports and A is dissipative".into());
            return ActivityVerdict::passive(
                Certificate {
                    kind: CertificateKind::SymANegSemidef,
                    max_eig: m,
                },
                notes,
            );
        }
        notes.push(format!("max eigenvalue of sym(A) is {m:e} > 0"));
        let mut routes: Vec<Route<'_>> = Vec::new();
        if let (true, Some(s)) = (unstable, spec.as_ref()) {
            routes.extend(eigen_routes(sys, s, cfg));
        }
        routes.push(("tracking", Box::new(|| witness_tracking(sys, cfg))));
        routes.push(("random search", Box::new(|| witness_random_search(sys, cfg))));
        return match first_witness(routes, &mut notes) {
            Some(w) => ActivityVerdict::active(w, notes),
            None => ActivityVerdict::inconclusive(notes),
        };
    }

    match passivity_certificate(sys, cfg.cert_tol, cfg.sym_tol) {
        Ok(Some(c)) => {
            notes.push("sym(PA) is negative semidefinite".into());
            return ActivityVerdict::passive(c, notes);
        }
        Ok(None) => notes.push("sym(PA) has a positive eigenvalue; certificate fails".into()),
        Err(e) => notes.push(format!("certificate: {e}")),
    }

    let mut routes: Vec<Route<'_>> = Vec::new();
    if let Some(s) = spec.as_ref() {
        routes.extend(eigen_routes(sys, s, cfg));
    }
    if unstable {
        routes.push(("generic two-pulse", Box::new(|| witness_two_pulse_generic(sys, cfg))));
    } else {
        notes.push("A has no eigenvalue with positive real part".into());
    }
    match first_witness(routes, &mut notes) {
        Some(w) => ActivityVerdict::active(w, notes),
        None => {
            notes.push("no witness and no certificate; the general projection case is undecided".into());
            ActivityVerdict::inconclusive(notes)
        }
    }
}
