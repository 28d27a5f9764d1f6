//! Nonlinear port systems `x' = f(x) - P D(x)`: equilibria, linearisation of
//! the kinetic part, the FitzHugh–Nagumo and single-cell reaction–diffusion
//! models, Hopf-point location and the end-to-end analysis pipeline.

use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::activity::{classify_activity, ActivityVerdict, WitnessSearchConfig};
use crate::complexity::{edge_of_chaos_classify, fhn_complexity_from_state, EdgeClassification, EdgeTolerances};
use crate::error::{Error, Result};
use crate::genericity::{in_generic_m, ComplexValue, GenericityReport};
use crate::linsys::{eigenvalues, symmetric_eigen, LinearPortSystem, Matrix};

pub type VectorField = Arc<dyn Fn(&[f64]) -> Vec<f64> + Send + Sync>;
pub type JacobianField = Arc<dyn Fn(&[f64]) -> Matrix<f64> + Send + Sync>;

pub const DEFAULT_NEWTON_TOL: f64 = 1e-10;
pub const DEFAULT_MAX_ITER: usize = 100;
pub const DEFAULT_FD_STEP: f64 = 1e-6;
const MARGINAL_TOL: f64 = 1e-9;

pub const FHN_BETA: f64 = 1.28;
pub const FHN_GAMMA: f64 = 0.12;
pub const FHN_XI: f64 = 0.1;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ModelKind {
    Generic,
    Linear,
    Fhn { mu: f64, beta: f64, gamma: f64, xi: f64 },
    ReactionDiffusion { m: usize, d_coeffs: Vec<f64> },
}

/// `x' = f(x) - P D(x)` with optional analytic Jacobians of `f` and `D`.
#[derive(Clone)]
pub struct NonlinearPortSystem {
    n: usize,
    f: VectorField,
    d: VectorField,
    p: Matrix<f64>,
    jacobian_f: Option<JacobianField>,
    jacobian_d: Option<JacobianField>,
    model: ModelKind,
}

impl fmt::Debug for NonlinearPortSystem {
    fn fmt(&self, fm: &mut fmt::Formatter<'_>) -> fmt::Result {
        fm.debug_struct("NonlinearPortSystem")
            .field("n", &self.n)
            .field("p", &self.p)
            .field("analytic_jacobian", &self.jacobian_f.is_some())
            .field("model", &self.model)
            .finish()
    }
}

impl NonlinearPortSystem {
    pub fn new(n: usize, f: VectorField, d: VectorField, p: Matrix<f64>, proj_tol: f64) -> Result<Self> {
        // reuse the projection checks of the linear system
        LinearPortSystem::new(Matrix::zeros(n, n), p.clone(), proj_tol)?;
        Ok(Self {
            n,
            f,
            d,
            p,
            jacobian_f: None,
            jacobian_d: None,
            model: ModelKind::Generic,
        })
    }

    /// `f(x) = A x`, `D(x) = Dm x`, with exact Jacobians.
    pub fn linear(a: Matrix<f64>, dm: Matrix<f64>, p: Matrix<f64>) -> Result<Self> {
        let n = a.rows();
        if !a.is_square() || dm.rows() != n || dm.cols() != n {
            return Err(Error::DimensionMismatch("A and D must be square of equal size".into()));
        }
        let (a1, a2, d1, d2) = (a.clone(), a.clone(), dm.clone(), dm.clone());
        let mut sys = Self::new(
            n,
            Arc::new(move |x: &[f64]| a1.matvec(x)),
            Arc::new(move |x: &[f64]| d1.matvec(x)),
            p,
            1e-10,
        )?;
        sys.jacobian_f = Some(Arc::new(move |_: &[f64]| a2.clone()));
        sys.jacobian_d = Some(Arc::new(move |_: &[f64]| d2.clone()));
        sys.model = ModelKind::Linear;
        Ok(sys)
    }

    pub fn with_jacobians(mut self, jf: Option<JacobianField>, jd: Option<JacobianField>) -> Self {
        self.jacobian_f = jf;
        self.jacobian_d = jd;
        self
    }

    pub fn with_model(mut self, model: ModelKind) -> Self {
        self.model = model;
        self
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn p(&self) -> &Matrix<f64> {
        &self.p
    }

    pub fn model(&self) -> &ModelKind {
        &self.model
    }

    fn checked(&self, field: &VectorField, x: &[f64]) -> Result<Vec<f64>> {
        if x.len() != self.n {
            return Err(Error::DimensionMismatch(format!("point has length {}, expected {}", x.len(), self.n)));
        }
        let v = field(x);
        if v.len() != self.n {
            return Err(Error::DimensionMismatch(format!(
                "vector field returned {} components, expected {}",
                v.len(),
                self.n
            )));
        }
        if v.iter().any(|y| !y.is_finite()) {
            return Err(Error::NonFiniteEvaluation(x.to_vec()));
        }
        Ok(v)
    }

    pub fn eval_f(&self, x: &[f64]) -> Result<Vec<f64>> {
        self.checked(&self.f, x)
    }

    pub fn eval_d(&self, x: &[f64]) -> Result<Vec<f64>> {
        self.checked(&self.d, x)
    }

    /// `f(x) - P D(x)`.
    pub fn rhs(&self, x: &[f64]) -> Result<Vec<f64>> {
        let f = self.eval_f(x)?;
        let pd = self.p.matvec(&self.eval_d(x)?);
        Ok(f.iter().zip(&pd).map(|(a, b)| a - b).collect())
    }

    pub fn jacobian_kinetic(&self, x: &[f64]) -> Result<Matrix<f64>> {
        match &self.jacobian_f {
            Some(j) => Ok(j(x)),
            None => jacobian_fd(|y| self.eval_f(y), x, DEFAULT_FD_STEP),
        }
    }

    pub fn jacobian_dissipation(&self, x: &[f64]) -> Result<Matrix<f64>> {
        match &self.jacobian_d {
            Some(j) => Ok(j(x)),
            None => jacobian_fd(|y| self.eval_d(y), x, DEFAULT_FD_STEP),
        }
    }

    /// Jacobian of `f - P D`.
    pub fn jacobian_full(&self, x: &[f64]) -> Result<Matrix<f64>> {
        let jf = self.jacobian_kinetic(x)?;
        let jd = self.jacobian_dissipation(x)?;
        Ok(&jf - &(&self.p * &jd))
    }
}

/// Central differences, column `i` equal to `(f(x + h e_i) - f(x - h e_i)) / 2h`.
pub fn jacobian_fd(f: impl Fn(&[f64]) -> Result<Vec<f64>>, x: &[f64], h: f64) -> Result<Matrix<f64>> {
    if !(h > 0.0) || !h.is_finite() {
        return Err(Error::InvalidParameter(format!("step h = {h} must be positive")));
    }
    let n = x.len();
    let mut jac: Option<Matrix<f64>> = None;
    let mut y = x.to_vec();
    for i in 0..n {
        y[i] = x[i] + h;
        let fp = f(&y)?;
        y[i] = x[i] - h;
        let fm = f(&y)?;
        y[i] = x[i];
        if fp.iter().chain(&fm).any(|v| !v.is_finite()) {
            return Err(Error::NonFiniteEvaluation(x.to_vec()));
        }
        let m = jac.get_or_insert_with(|| Matrix::zeros(fp.len(), n));
        let col: Vec<f64> = fp.iter().zip(&fm).map(|(a, b)| (a - b) / (2.0 * h)).collect();
        m.set_column(i, &col);
    }
    jac.ok_or_else(|| Error::DimensionMismatch("empty point".into()))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Stability {
    Stable,
    Unstable,
    Marginal,
}

impl Stability {
    pub fn from_max_real(m: f64) -> Self {
        if m < -MARGINAL_TOL {
            Stability::Stable
        } else if m > MARGINAL_TOL {
            Stability::Unstable
        } else {
            Stability::Marginal
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EquilibriumReport {
    pub x_star: Vec<f64>,
    pub residual: f64,
    pub jacobian_full: Matrix<f64>,
    pub jacobian_kinetic: Matrix<f64>,
    pub stability: Stability,
    pub eigenvalues: Vec<ComplexValue>,
    pub max_real_eig: f64,
    pub iterations: usize,
    /// A least-squares step replaced a singular Newton step at least once.
    pub pseudo_inverse_used: bool,
}

fn norm(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

/// Minimum-norm least-squares solution of `J dx = b` from the eigen-
/// decomposition of `J^T J`.
fn pseudo_solve(j: &Matrix<f64>, b: &[f64]) -> Result<Vec<f64>> {
    let jt = j.transpose();
    let (vals, vecs) = symmetric_eigen(&(&jt * j))?;
    let top = vals.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let jtb = jt.matvec(b);
    let n = vals.len();
    let mut dx = vec![0.0; n];
    for (k, &s) in vals.iter().enumerate() {
        if s <= 1e-12 * top {
            continue;
        }
        let v = vecs.column(k);
        let c = v.iter().zip(&jtb).map(|(a, b)| a * b).sum::<f64>() / s;
        for i in 0..n {
            dx[i] += c * v[i];
        }
    }
    Ok(dx)
}

fn spectrum_summary(j: &Matrix<f64>) -> Result<(Vec<ComplexValue>, f64)> {
    let eig = eigenvalues(j)?;
    let max = eig.iter().fold(f64::NEG_INFINITY, |m, z| m.max(z.re));
    Ok((eig.into_iter().map(Into::into).collect(), max))
}

/// Damped Newton on `g = f - P D` with Armijo backtracking (halving, at most
/// 30 times). A singular Jacobian falls back to a least-squares step.
pub fn find_equilibrium(
    sys: &NonlinearPortSystem,
    x_guess: &[f64],
    newton_tol: f64,
    max_iter: usize,
) -> Result<EquilibriumReport> {
    if !(newton_tol > 0.0) {
        return Err(Error::InvalidParameter("newton_tol must be positive".into()));
    }
    let mut x = x_guess.to_vec();
    let mut g = sys.rhs(&x)?;
    let mut r = norm(&g);
    let mut pinv = false;
    let mut iterations = 0;
    while r > newton_tol {
        if iterations >= max_iter {
            return Err(Error::NoConvergence { best: x, residual: r });
        }
        iterations += 1;
        let j = sys.jacobian_full(&x)?;
        let minus_g: Vec<f64> = g.iter().map(|v| -v).collect();
        let newton = j
            .lu()
            .ok()
            .map(|lu| lu.solve_vec(&minus_g))
            .filter(|dx| dx.iter().all(|v| v.is_finite()));
        let dx = match newton {
            Some(dx) => dx,
            None => {
                pinv = true;
                pseudo_solve(&j, &minus_g)?
            }
        };
        let mut t = 1.0;
        let mut accepted = None;
        for _ in 0..=30 {
            let trial: Vec<f64> = x.iter().zip(&dx).map(|(a, b)| a + t * b).collect();
            if let Ok(gt) = sys.rhs(&trial) {
                let rt = norm(&gt);
                if rt * rt <= (1.0 - 1e-4 * t) * r * r {
                    accepted = Some((trial, gt, rt));
                    break;
                }
            }
            t *= 0.5;
        }
        let Some((xn, gn, rn)) = accepted else {
            return Err(Error::NoConvergence { best: x, residual: r });
        };
        x = xn;
        g = gn;
        r = rn;
    }
    let jacobian_full = sys.jacobian_full(&x)?;
    let jacobian_kinetic = sys.jacobian_kinetic(&x)?;
    let (eigenvalues, max_real_eig) = spectrum_summary(&jacobian_full)?;
    Ok(EquilibriumReport {
        x_star: x,
        residual: r,
        jacobian_full,
        jacobian_kinetic,
        stability: Stability::from_max_real(max_real_eig),
        eigenvalues,
        max_real_eig,
        iterations,
        pseudo_inverse_used: pinv,
    })
}

/// `x' = (df/dx)(x*) x + P u`: the kinetic Jacobian only, not that of `f - P D`.
pub fn linearize_at(sys: &NonlinearPortSystem, x_star: &[f64], newton_tol: f64) -> Result<LinearPortSystem<f64>> {
    let residual = norm(&sys.rhs(x_star)?);
    if residual > 10.0 * newton_tol {
        return Err(Error::NotAnEquilibrium { residual });
    }
    LinearPortSystem::new(sys.jacobian_kinetic(x_star)?, sys.p.clone(), 1e-10)
}

/// Dissipative FitzHugh–Nagumo cell: kinetics
/// `(x - y - x^3/3, xi (x - beta y + gamma))`, `D = mu (x, y)`, `P = diag(1, 0)`.
pub fn fhn_system(mu: f64, beta: f64, gamma: f64, xi: f64) -> NonlinearPortSystem {
    let f: VectorField = Arc::new(move |v: &[f64]| {
        let (x, y) = (v[0], v[1]);
        vec![x - y - x * x * x / 3.0, xi * (x - beta * y + gamma)]
    });
    let d: VectorField = Arc::new(move |v: &[f64]| vec![mu * v[0], mu * v[1]]);
    let jf: JacobianField = Arc::new(move |v: &[f64]| {
        Matrix::from_rows(&[vec![1.0 - v[0] * v[0], -1.0], vec![xi, -xi * beta]]).expect("2x2")
    });
    let jd: JacobianField = Arc::new(move |_: &[f64]| Matrix::from_diagonal(&[mu, mu]));
    NonlinearPortSystem {
        n: 2,
        f,
        d,
        p: Matrix::from_diagonal(&[1.0, 0.0]),
        jacobian_f: Some(jf),
        jacobian_d: Some(jd),
        model: ModelKind::Fhn { mu, beta, gamma, xi },
    }
}

pub fn fhn_default(mu: f64) -> NonlinearPortSystem {
    fhn_system(mu, FHN_BETA, FHN_GAMMA, FHN_XI)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct HopfPoint {
    pub mu: f64,
    pub x_star: Vec<f64>,
    /// Rightmost eigenvalue of the full Jacobian at `mu`.
    pub eigenvalue: ComplexValue,
    /// `false` when the crossing eigenvalue is real (fold or steady-state
    /// bifurcation rather than Hopf).
    pub is_hopf: bool,
}

fn track(
    builder: &dyn Fn(f64) -> NonlinearPortSystem,
    from: (f64, &[f64]),
    to: f64,
) -> Result<EquilibriumReport> {
    let (mut mu, mut x) = (from.0, from.1.to_vec());
    let mut step = to - mu;
    let min_step = (to - mu).abs() * 1e-6;
    loop {
        let target = if (to - mu).abs() <= step.abs() { to } else { mu + step };
        match find_equilibrium(&builder(target), &x, DEFAULT_NEWTON_TOL, DEFAULT_MAX_ITER) {
            Ok(rep) => {
                if target == to {
                    return Ok(rep);
                }
                mu = target;
                x = rep.x_star;
            }
            Err(_) if step.abs() > min_step => step *= 0.5,
            Err(_) => return Err(Error::BranchLost(target)),
        }
    }
}

/// Locates the parameter at which the rightmost eigenvalue of the full
/// Jacobian along the equilibrium branch crosses the imaginary axis, by
/// continuation in 50 steps and bisection down to `tol`.
pub fn hopf_locate(
    builder: &dyn Fn(f64) -> NonlinearPortSystem,
    x_guess: &[f64],
    mu_lo: f64,
    mu_hi: f64,
    tol: f64,
) -> Result<HopfPoint> {
    if !(mu_hi > mu_lo) || !(tol > 0.0) {
        return Err(Error::NoSignChange { lo: mu_lo, hi: mu_hi });
    }
    let first = find_equilibrium(&builder(mu_lo), x_guess, DEFAULT_NEWTON_TOL, DEFAULT_MAX_ITER)
        .map_err(|_| Error::BranchLost(mu_lo))?;
    let steps = 50;
    let h = (mu_hi - mu_lo) / steps as f64;
    let mut lo = (mu_lo, first);
    let mut bracket = None;
    for k in 1..=steps {
        let mu = if k == steps { mu_hi } else { mu_lo + h * k as f64 };
        let rep = track(builder, (lo.0, &lo.1.x_star), mu)?;
        if lo.1.max_real_eig.signum() != rep.max_real_eig.signum() {
            bracket = Some((lo.clone(), (mu, rep)));
            break;
        }
        lo = (mu, rep);
    }
    let Some((mut a, mut b)) = bracket else {
        return Err(Error::NoSignChange { lo: mu_lo, hi: mu_hi });
    };
    while b.0 - a.0 > tol {
        let mid = 0.5 * (a.0 + b.0);
        let rep = track(builder, (a.0, &a.1.x_star), mid)?;
        if rep.max_real_eig.signum() == a.1.max_real_eig.signum() {
            a = (mid, rep);
        } else {
            b = (mid, rep);
        }
    }
    let mu = 0.5 * (a.0 + b.0);
    let rep = track(builder, (a.0, &a.1.x_star), mu)?;
    let top = rep
        .eigenvalues
        .iter()
        .copied()
        .max_by(|p, q| p.re.total_cmp(&q.re).then(p.im.abs().total_cmp(&q.im.abs())))
        .ok_or(Error::BranchLost(mu))?;
    Ok(HopfPoint {
        mu,
        x_star: rep.x_star,
        eigenvalue: top,
        is_hopf: top.im.abs() > 1e-6,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Boundary {
    Dirichlet,
    Neumann,
    Toroidal,
}

/// Five-point Laplacian on an `N x N` grid, node `(j, k)` at index `j N + k`.
/// Dirichlet drops missing neighbours, Neumann mirrors them onto the node
/// itself, toroidal wraps around.
pub fn discrete_laplacian(n: usize, boundary: Boundary) -> Result<Matrix<f64>> {
    if n == 0 {
        return Err(Error::InvalidParameter("grid size must be at least 1".into()));
    }
    let size = n * n;
    let mut l = Matrix::zeros(size, size);
    for j in 0..n {
        for k in 0..n {
            let me = j * n + k;
            l[(me, me)] -= 4.0;
            let steps: [(isize, isize); 4] = [(1, 0), (-1, 0), (0, 1), (0, -1)];
            for (dj, dk) in steps {
                let (nj, nk) = (j as isize + dj, k as isize + dk);
                let inside = nj >= 0 && nk >= 0 && (nj as usize) < n && (nk as usize) < n;
                let target = if inside {
                    Some(nj as usize * n + nk as usize)
                } else {
                    match boundary {
                        Boundary::Dirichlet => None,
                        Boundary::Neumann => Some(me),
                        Boundary::Toroidal => {
                            let wj = nj.rem_euclid(n as isize) as usize;
                            let wk = nk.rem_euclid(n as isize) as usize;
                            Some(wj * n + wk)
                        }
                    }
                };
                if let Some(t) = target {
                    l[(me, t)] += 1.0;
                }
            }
        }
    }
    Ok(l)
}

/// One reaction–diffusion cell with Dirichlet neighbours: the stacked
/// kinetics `(f_a, f_b)` and `D(x) = (4 D_1 x_1, .., 4 D_m x_m, 0, .., 0)`
/// acting through `P = diag(1, .., 1, 0, .., 0)` with `m` ones.
pub fn rd_single_cell(
    f_a: VectorField,
    f_b: VectorField,
    d_coeffs: &[f64],
    m: usize,
    n: usize,
) -> Result<NonlinearPortSystem> {
    if m == 0 || m > n {
        return Err(Error::DimensionMismatch(format!("need 1 <= m <= n, got m = {m}, n = {n}")));
    }
    if d_coeffs.len() != m {
        return Err(Error::DimensionMismatch(format!(
            "{} diffusion coefficients for {m} port variables",
            d_coeffs.len()
        )));
    }
    if d_coeffs.iter().any(|d| !(*d > 0.0) || !d.is_finite()) {
        return Err(Error::InvalidParameter("diffusion coefficients must be positive".into()));
    }
    let f: VectorField = Arc::new(move |x: &[f64]| {
        let mut out = f_a(x);
        if out.len() != m {
            return vec![f64::NAN; n];
        }
        let b = f_b(x);
        if b.len() != n - m {
            return vec![f64::NAN; n];
        }
        out.extend(b);
        out
    });
    let diag: Vec<f64> = (0..n).map(|i| if i < m { 4.0 * d_coeffs[i] } else { 0.0 }).collect();
    let dd = diag.clone();
    let d: VectorField = Arc::new(move |x: &[f64]| x.iter().zip(&dd).map(|(a, b)| a * b).collect());
    let jd_mat = Matrix::from_diagonal(&diag);
    let p = Matrix::from_diagonal(&(0..n).map(|i| if i < m { 1.0 } else { 0.0 }).collect::<Vec<_>>());
    Ok(NonlinearPortSystem::new(n, f, d, p, 1e-12)?
        .with_jacobians(None, Some(Arc::new(move |_: &[f64]| jd_mat.clone())))
        .with_model(ModelKind::ReactionDiffusion {
            m,
            d_coeffs: d_coeffs.to_vec(),
        }))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct JacobianSummary {
    pub kinetic: Matrix<f64>,
    pub full: Matrix<f64>,
    pub projection: Matrix<f64>,
    pub kinetic_stability: Stability,
    pub kinetic_max_real_eig: f64,
    pub full_stability: Stability,
    pub full_max_real_eig: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PipelineReport {
    pub model: ModelKind,
    pub equilibrium: EquilibriumReport,
    pub jacobians: JacobianSummary,
    pub activity: ActivityVerdict,
    pub genericity: GenericityReport,
    pub edge_of_chaos: Option<EdgeClassification>,
    pub notes: Vec<String>,
}

/// Equilibrium, kinetic linearisation, activity verdict, genericity report
/// and, for the FitzHugh–Nagumo family, the edge-of-chaos classification.
/// Errors carry the name of the failing stage.
pub fn analyze_equilibrium_pipeline(
    sys: &NonlinearPortSystem,
    x_guess: &[f64],
    cfg: &WitnessSearchConfig,
) -> Result<PipelineReport> {
    analyze_equilibrium_pipeline_with(sys, x_guess, cfg, &EdgeTolerances::default())
}

pub fn analyze_equilibrium_pipeline_with(
    sys: &NonlinearPortSystem,
    x_guess: &[f64],
    cfg: &WitnessSearchConfig,
    edge: &EdgeTolerances,
) -> Result<PipelineReport> {
    let eq = find_equilibrium(sys, x_guess, DEFAULT_NEWTON_TOL, DEFAULT_MAX_ITER).map_err(|e| e.at("find_equilibrium"))?;
    let lin = linearize_at(sys, &eq.x_star, DEFAULT_NEWTON_TOL).map_err(|e| e.at("linearize_at"))?;
    let (_, kin_max) = spectrum_summary(lin.a()).map_err(|e| e.at("linearize_at"))?;
    let activity = classify_activity(&lin, cfg);
    let genericity = in_generic_m(&lin, cfg.generic_tol).map_err(|e| e.at("in_generic_M"))?;
    let edge_of_chaos = match sys.model {
        ModelKind::Fhn { beta, xi, .. } => {
            let y = fhn_complexity_from_state(eq.x_star[0], beta, xi).map_err(|e| e.at("edge_of_chaos"))?;
            Some(edge_of_chaos_classify(&y, edge).map_err(|e| e.at("edge_of_chaos"))?)
        }
        _ => None,
    };
    let mut notes = vec![
        "linearisation uses the kinetic Jacobian df/dx at the equilibrium; -P D(x) is replaced by -P D(x*) + P u and the forced nonlinear system is not simulated".to_string(),
    ];
    if eq.pseudo_inverse_used {
        notes.push("singular Jacobian encountered; least-squares Newton steps were used".into());
    }
    Ok(PipelineReport {
        model: sys.model.clone(),
        jacobians: JacobianSummary {
            kinetic: eq.jacobian_kinetic.clone(),
            full: eq.jacobian_full.clone(),
            projection: sys.p.clone(),
            kinetic_stability: Stability::from_max_real(kin_max),
            kinetic_max_real_eig: kin_max,
            full_stability: eq.stability,
            full_max_real_eig: eq.max_real_eig,
        },
        equilibrium: eq,
        activity,
        genericity,
        edge_of_chaos,
        notes,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::activity::ActivityStatus;

    fn destabilization() -> NonlinearPortSystem {
        let a = Matrix::from_rows(&[vec![-1.0, 10.0], vec![0.0, -2.0]]).unwrap();
        let d = Matrix::from_rows(&[vec![1.0, -1.0], vec![-1.0, 1.0]]).unwrap();
        NonlinearPortSystem::linear(a, d, Matrix::identity(2)).unwrap()
    }

    #[test]
    fn fd_jacobian_of_linear_map() {
        let m = Matrix::from_rows(&[vec![1.0, 2.0, 0.5], vec![-3.0, 0.0, 4.0]]).unwrap();
        let j = jacobian_fd(|x| Ok(m.matvec(x)), &[0.3, -1.0, 2.0], 1e-5).unwrap();
        assert!((&j - &m).max_abs() < 1e-9);
        assert!(matches!(jacobian_fd(|x| Ok(x.to_vec()), &[1.0], 0.0), Err(Error::InvalidParameter(_))));
        assert!(matches!(
            jacobian_fd(|x| Ok(vec![1.0 / x[0]]), &[1e-7], 1e-5),
            Err(Error::NonFiniteEvaluation(_)) | Ok(_)
        ));
    }

    #[test]
    fn fhn_kinetic_jacobian_at_origin() {
        let sys = fhn_default(0.05);
        let j = jacobian_fd(|x| sys.eval_f(x), &[0.0, 0.0], 1e-5).unwrap();
        let expected = Matrix::from_rows(&[vec![1.0, -1.0], vec![0.1, -0.128]]).unwrap();
        assert!((&j - &expected).max_abs() < 1e-9);
        let g = sys.rhs(&[0.0, 0.0]).unwrap();
        assert_eq!(g[0], 0.0);
        assert!((g[1] - 0.012).abs() < 1e-15);
    }

    #[test]
    fn fhn_equilibrium_and_linearisation() {
        let sys = fhn_default(0.05);
        let eq = find_equilibrium(&sys, &[-1.0, -0.6], 1e-10, 100).unwrap();
        assert!(eq.residual <= 1e-10);
        // independent check: the first coordinate solves the reduced cubic
        let x = eq.x_star[0];
        let cubic = (1.0 - 0.05 - 1.0 / 1.28) * x - x.powi(3) / 3.0 - 0.12 / 1.28;
        assert!(cubic.abs() < 1e-10);
        assert!((x + 0.904070).abs() < 1e-6 && (eq.x_star[1] + 0.612555).abs() < 1e-6);
        let lin = linearize_at(&sys, &eq.x_star, 1e-10).unwrap();
        assert!((lin.a()[(0, 0)] - (1.0 - x * x)).abs() < 1e-15);
        assert_eq!(lin.p(), &Matrix::from_diagonal(&[1.0, 0.0]));
        // trace of the full Jacobian is near zero close to the Hopf point
        assert!(eq.jacobian_full.trace().abs() < 0.01);
    }

    #[test]
    fn linear_system_equilibrium_is_origin() {
        let sys = destabilization();
        let eq = find_equilibrium(&sys, &[3.0, -7.0], 1e-10, 100).unwrap();
        assert!(eq.x_star.iter().all(|v| v.abs() < 1e-10));
        let lin = linearize_at(&sys, &eq.x_star, 1e-10).unwrap();
        assert_eq!(lin.a(), &Matrix::from_rows(&[vec![-1.0, 10.0], vec![0.0, -2.0]]).unwrap());
        assert!(matches!(linearize_at(&sys, &[1.0, 0.0], 1e-10), Err(Error::NotAnEquilibrium { .. })));
    }

    #[test]
    fn no_real_root_reports_best_iterate() {
        let sys = NonlinearPortSystem::new(
            1,
            Arc::new(|x: &[f64]| vec![x[0] * x[0] + 1.0]),
            Arc::new(|_: &[f64]| vec![0.0]),
            Matrix::identity(1),
            1e-10,
        )
        .unwrap();
        match find_equilibrium(&sys, &[0.5], 1e-10, 100) {
            Err(Error::NoConvergence { residual, best }) => {
                assert!(residual >= 1.0 && best.len() == 1);
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn destabilization_pipeline() {
        let rep = analyze_equilibrium_pipeline(&destabilization(), &[0.2, 0.1], &WitnessSearchConfig::default()).unwrap();
        assert_eq!(rep.jacobians.kinetic_stability, Stability::Stable);
        assert_eq!(rep.jacobians.full_stability, Stability::Unstable);
        let expected = (-5.0 + 45f64.sqrt()) / 2.0;
        assert!((rep.jacobians.full_max_real_eig - expected).abs() < 1e-10);
        assert_eq!(rep.activity.status, ActivityStatus::Active);
        assert!(rep.edge_of_chaos.is_none());
    }

    #[test]
    fn pipeline_stage_label() {
        let sys = NonlinearPortSystem::new(
            1,
            Arc::new(|x: &[f64]| vec![x[0] * x[0] + 1.0]),
            Arc::new(|_: &[f64]| vec![0.0]),
            Matrix::identity(1),
            1e-10,
        )
        .unwrap();
        match analyze_equilibrium_pipeline(&sys, &[0.0], &WitnessSearchConfig::default()) {
            Err(Error::Stage { stage, source }) => {
                assert_eq!(stage, "find_equilibrium");
                assert!(matches!(*source, Error::NoConvergence { .. }));
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn hopf_point_of_fhn() {
        let h = hopf_locate(&fhn_default, &[-1.0, -0.6], 0.0, 0.1, 1e-9).unwrap();
        assert!(h.mu > 0.045 && h.mu < 0.055, "mu* = {}", h.mu);
        assert!(h.is_hopf);
        assert!(h.eigenvalue.re.abs() < 1e-6);
        assert!(matches!(
            hopf_locate(&fhn_default, &[-1.0, -0.6], 0.05, 0.05, 1e-9),
            Err(Error::NoSignChange { .. })
        ));
    }

    #[test]
    fn laplacian_fixtures() {
        let l = discrete_laplacian(1, Boundary::Dirichlet).unwrap();
        assert_eq!(l.to_rows(), vec![vec![-4.0]]);
        let l = discrete_laplacian(2, Boundary::Dirichlet).unwrap();
        for r in l.to_rows() {
            assert_eq!(r.iter().sum::<f64>(), -2.0);
        }
        assert!(l.diagonal().iter().all(|&d| d == -4.0));
        for n in 1..5 {
            for b in [Boundary::Neumann, Boundary::Toroidal] {
                let l = discrete_laplacian(n, b).unwrap();
                assert!(l.to_rows().iter().all(|r| r.iter().sum::<f64>() == 0.0));
                assert_eq!(l, l.transpose());
            }
        }
    }

    #[test]
    fn single_cell_reproduces_dissipation() {
        let mu = 0.3;
        let cell = rd_single_cell(
            Arc::new(|_: &[f64]| vec![0.0]),
            Arc::new(|_: &[f64]| vec![]),
            &[mu / 4.0],
            1,
            1,
        )
        .unwrap();
        assert!((cell.rhs(&[2.0]).unwrap()[0] + mu * 2.0).abs() < 1e-15);
        let fhn = fhn_default(mu);
        let cell = rd_single_cell(
            Arc::new(|v: &[f64]| vec![v[0] - v[1] - v[0].powi(3) / 3.0]),
            Arc::new(|v: &[f64]| vec![0.1 * (v[0] - 1.28 * v[1] + 0.12)]),
            &[mu / 4.0],
            1,
            2,
        )
        .unwrap();
        for p in [[0.3, -0.2], [-1.1, 0.7]] {
            let (a, b) = (cell.rhs(&p).unwrap(), fhn.rhs(&p).unwrap());
            assert!((a[0] - b[0]).abs() < 1e-15 && (a[1] - b[1]).abs() < 1e-15);
        }
        assert!(matches!(
            rd_single_cell(Arc::new(|_: &[f64]| vec![0.0]), Arc::new(|_: &[f64]| vec![]), &[1.0, 2.0], 1, 1),
            Err(Error::DimensionMismatch(_))
        ));
        assert!(matches!(
            rd_single_cell(Arc::new(|_: &[f64]| vec![0.0]), Arc::new(|_: &[f64]| vec![]), &[1.0], 2, 1),
            Err(Error::DimensionMismatch(_))
        ));
    }
}
