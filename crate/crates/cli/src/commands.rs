use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::sync::Arc;

use clap::Args;
use serde::Deserialize;
use serde_json::{json, Value};

use locact::activity::{classify_activity, ActivityStatus};
use locact::genericity::{in_generic_m, sample_density_m};
use locact::linsys::io::parse_matrix;
use locact::linsys::{integrate, LinearPortSystem, Matrix};
use locact::nonlinear::{
    analyze_equilibrium_pipeline_with, discrete_laplacian, fhn_system, find_equilibrium, hopf_locate, rd_single_cell,
    Boundary, NonlinearPortSystem, VectorField, DEFAULT_MAX_ITER, DEFAULT_NEWTON_TOL, FHN_BETA, FHN_GAMMA, FHN_XI,
};
use locact::quadrature::trapezoid;

use crate::overrides::Tolerances;

pub enum Failure {
    Input(String),
}

impl<E: std::fmt::Display> From<E> for Failure {
    fn from(e: E) -> Self {
        Failure::Input(e.to_string())
    }
}

pub struct Outcome {
    json: Value,
    code: u8,
}

impl Outcome {
    pub fn ok(json: Value) -> Self {
        Self { json, code: 0 }
    }
}

type Run = Result<Outcome, Failure>;

pub fn finish(outcome: Run, output: Option<&Path>) -> ExitCode {
    let (json, code) = match outcome {
        Ok(o) => (o.json, o.code),
        Err(Failure::Input(msg)) => (json!({ "error": msg }), 2),
    };
    let text = serde_json::to_string_pretty(&json).expect("report serializes") + "\n";
    let written = match output {
        Some(p) if code != 2 => fs::write(p, &text),
        _ => std::io::stdout().write_all(text.as_bytes()),
    };
    match written {
        Ok(()) => ExitCode::from(code),
        Err(e) => {
            eprintln!("cannot write report: {e}");
            ExitCode::from(2)
        }
    }
}

#[derive(Args, Debug, Clone)]
pub struct LinearInput {
    /// State matrix A, as JSON `{"n": .., "rows": ..}` or text (`n`, then rows).
    #[arg(long)]
    pub matrix: PathBuf,
    /// Projection P; the identity when omitted.
    #[arg(long)]
    pub projection: Option<PathBuf>,
}

fn read(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| Failure::Input(format!("{}: {e}", path.display())))
}

fn load_system(input: &LinearInput) -> Result<LinearPortSystem<f64>, Failure> {
    let a = parse_matrix(&read(&input.matrix)?)?;
    let p = match &input.projection {
        Some(path) => parse_matrix(&read(path)?)?,
        None => Matrix::identity(a.rows()),
    };
    Ok(LinearPortSystem::new(a, p, 1e-10)?)
}

fn value_or_error<T: serde::Serialize, E: std::fmt::Display>(r: Result<T, E>) -> Value {
    match r {
        Ok(v) => serde_json::to_value(v).expect("report serializes"),
        Err(e) => json!({ "error": e.to_string() }),
    }
}

pub fn analyze(input: &LinearInput, tols: &Tolerances) -> Run {
    let sys = load_system(input)?;
    let verdict = classify_activity(&sys, &tols.witness);
    let genericity = value_or_error(in_generic_m(&sys, tols.witness.generic_tol));
    Ok(Outcome::ok(json!({ "activity": verdict, "genericity": genericity })))
}

fn fmt(v: f64) -> String {
    format!("{v:e}")
}

pub fn witness(input: &LinearInput, csv_path: Option<&Path>, tols: &Tolerances) -> Run {
    let sys = load_system(input)?;
    let verdict = classify_activity(&sys, &tols.witness);
    let Some(w) = verdict.witness.as_ref().filter(|_| verdict.status == ActivityStatus::Active) else {
        return Ok(Outcome {
            json: json!({ "activity": verdict }),
            code: 3,
        });
    };
    let sol = integrate(&sys, &w.signal, w.horizon, tols.witness.steps_for(w.horizon))?;
    let n = sys.n();
    let times = &sol.trajectory.times;
    let trapz = trapezoid(times, &sol.integrand);
    if let Some(path) = csv_path {
        let mut out = csv::Writer::from_path(path)?;
        let mut header = vec!["t".to_string()];
        header.extend((1..=n).map(|i| format!("x{i}")));
        header.extend((1..=n).map(|i| format!("u{i}")));
        header.push("integrand".into());
        out.write_record(&header)?;
        for (k, &t) in times.iter().enumerate() {
            let u = w.signal.eval(t)?;
            let mut row = vec![fmt(t)];
            row.extend(sol.trajectory.states[k].iter().map(|&v| fmt(v)));
            row.extend(u.iter().map(|&v| fmt(v)));
            row.push(fmt(sol.integrand[k]));
            out.write_record(&row)?;
        }
        out.flush()?;
    }
    Ok(Outcome::ok(json!({
        "activity": verdict,
        "csv": csv_path.map(|p| p.display().to_string()),
        "samples": times.len(),
        "trapezoid_energy": trapz,
    })))
}

#[derive(Args, Debug, Clone)]
pub struct FhnArgs {
    #[arg(long, default_value_t = 0.05, allow_hyphen_values = true)]
    pub mu: f64,
    #[arg(long, default_value_t = FHN_BETA, allow_hyphen_values = true)]
    pub beta: f64,
    #[arg(long, default_value_t = FHN_GAMMA, allow_hyphen_values = true)]
    pub gamma: f64,
    #[arg(long, default_value_t = FHN_XI, allow_hyphen_values = true)]
    pub xi: f64,
    /// Newton starting point `x,y`.
    #[arg(long, default_value = "-1,-0.6", allow_hyphen_values = true)]
    pub guess: String,
    /// Sweep the dissipation over `lo:hi:steps` (inclusive, evenly spaced).
    #[arg(long, allow_hyphen_values = true)]
    pub sweep: Option<String>,
    /// CSV file for the sweep table.
    #[arg(long)]
    pub csv: Option<PathBuf>,
    /// Bisection width for the Hopf point.
    #[arg(long, default_value_t = 1e-9)]
    pub hopf_tol: f64,
}

fn parse_list(s: &str) -> Result<Vec<f64>, Failure> {
    s.split(',')
        .map(|t| t.trim().parse::<f64>().map_err(|e| Failure::Input(format!("bad number {t:?}: {e}"))))
        .collect()
}

fn parse_sweep(s: &str) -> Result<(f64, f64, usize), Failure> {
    let parts: Vec<&str> = s.split(':').collect();
    let bad = || Failure::Input(format!("sweep {s:?} must be lo:hi:steps with hi > lo and steps >= 2"));
    if parts.len() != 3 {
        return Err(bad());
    }
    let lo: f64 = parts[0].parse().map_err(|_| bad())?;
    let hi: f64 = parts[1].parse().map_err(|_| bad())?;
    let steps: usize = parts[2].parse().map_err(|_| bad())?;
    if hi <= lo || steps < 2 || !lo.is_finite() || !hi.is_finite() {
        return Err(bad());
    }
    Ok((lo, hi, steps))
}

pub fn fhn(a: &FhnArgs, tols: &Tolerances) -> Run {
    for (name, v) in [("mu", a.mu), ("beta", a.beta), ("gamma", a.gamma), ("xi", a.xi)] {
        if !v.is_finite() {
            return Err(Failure::Input(format!("{name} must be finite")));
        }
    }
    let guess = parse_list(&a.guess)?;
    if guess.len() != 2 {
        return Err(Failure::Input("guess must have two components".into()));
    }
    let (beta, gamma, xi) = (a.beta, a.gamma, a.xi);
    let Some(sweep) = &a.sweep else {
        let sys = fhn_system(a.mu, beta, gamma, xi);
        let report = analyze_equilibrium_pipeline_with(&sys, &guess, &tols.witness, &tols.edge)?;
        return Ok(Outcome::ok(serde_json::to_value(report)?));
    };
    let (lo, hi, steps) = parse_sweep(sweep)?;
    let mut rows = Vec::with_capacity(steps);
    let mut x = guess.clone();
    for k in 0..steps {
        let mu = lo + (hi - lo) * k as f64 / (steps - 1) as f64;
        let sys = fhn_system(mu, beta, gamma, xi);
        let row = match find_equilibrium(&sys, &x, DEFAULT_NEWTON_TOL, DEFAULT_MAX_ITER) {
            Ok(eq) => {
                x = eq.x_star.clone();
                let edge = analyze_equilibrium_pipeline_with(&sys, &eq.x_star, &tols.witness, &tols.edge)
                    .ok()
                    .and_then(|r| r.edge_of_chaos)
                    .map(|e| e.edge_of_chaos);
                json!({
                    "mu": mu,
                    "x_d": eq.x_star[0],
                    "y_d": eq.x_star[1],
                    "max_re_eig_full": eq.max_real_eig,
                    "edge_of_chaos": edge,
                    "error": null,
                })
            }
            Err(e) => json!({
                "mu": mu, "x_d": null, "y_d": null, "max_re_eig_full": null,
                "edge_of_chaos": null, "error": e.to_string(),
            }),
        };
        rows.push(row);
    }
    let builder = move |mu: f64| fhn_system(mu, beta, gamma, xi);
    let hopf = value_or_error(hopf_locate(&builder, &guess, lo, hi, a.hopf_tol));
    if let Some(path) = &a.csv {
        let mut out = csv::Writer::from_path(path)?;
        let cols = ["mu", "x_d", "y_d", "max_re_eig_full", "edge_of_chaos", "error"];
        out.write_record(cols)?;
        for r in &rows {
            let cells: Vec<String> = cols
                .iter()
                .map(|c| match &r[*c] {
                    Value::Null => String::new(),
                    Value::String(s) => s.clone(),
                    v => v.to_string(),
                })
                .collect();
            out.write_record(&cells)?;
        }
        out.flush()?;
    }
    Ok(Outcome::ok(json!({ "sweep": rows, "hopf": hopf })))
}

#[derive(Deserialize, Debug)]
#[serde(tag = "type", rename_all = "snake_case", deny_unknown_fields)]
enum Kinetics {
    Fhn {
        #[serde(default = "default_beta")]
        beta: f64,
        #[serde(default = "default_gamma")]
        gamma: f64,
        #[serde(default = "default_xi")]
        xi: f64,
    },
    Linear {
        a: Vec<Vec<f64>>,
    },
}

fn default_beta() -> f64 {
    FHN_BETA
}
fn default_gamma() -> f64 {
    FHN_GAMMA
}
fn default_xi() -> f64 {
    FHN_XI
}

#[derive(Deserialize, Debug)]
#[serde(deny_unknown_fields)]
struct Lattice {
    size: usize,
    boundary: Boundary,
}

impl Default for Lattice {
    fn default() -> Self {
        Self {
            size: 1,
            boundary: Boundary::Dirichlet,
        }
    }
}

#[derive(Deserialize, Debug)]
#[serde(deny_unknown_fields)]
struct CellSpec {
    m: usize,
    n: usize,
    d_coeffs: Vec<f64>,
    kinetics: Kinetics,
    #[serde(default)]
    lattice: Lattice,
    #[serde(default)]
    guesses: Vec<Vec<f64>>,
}

fn build_cell(spec: &CellSpec) -> Result<NonlinearPortSystem, Failure> {
    let (m, n) = (spec.m, spec.n);
    let (f_a, f_b): (VectorField, VectorField) = match &spec.kinetics {
        Kinetics::Fhn { beta, gamma, xi } => {
            if (m, n) != (1, 2) {
                return Err(Failure::Input("fhn kinetics need m = 1 and n = 2".into()));
            }
            let (beta, gamma, xi) = (*beta, *gamma, *xi);
            (
                Arc::new(|v: &[f64]| vec![v[0] - v[1] - v[0].powi(3) / 3.0]),
                Arc::new(move |v: &[f64]| vec![xi * (v[0] - beta * v[1] + gamma)]),
            )
        }
        Kinetics::Linear { a } => {
            let a = Matrix::from_rows(a)?;
            if a.rows() != n || a.cols() != n {
                return Err(Failure::Input(format!("linear kinetics must be {n}x{n}")));
            }
            let top = a.clone();
            (
                Arc::new(move |v: &[f64]| top.matvec(v)[..m].to_vec()),
                Arc::new(move |v: &[f64]| a.matvec(v)[m..].to_vec()),
            )
        }
    };
    Ok(rd_single_cell(f_a, f_b, &spec.d_coeffs, m, n)?)
}

pub fn rd_cell(path: &Path, tols: &Tolerances) -> Run {
    let spec: CellSpec = serde_json::from_str(&read(path)?)?;
    if spec.m == 0 || spec.m > spec.n {
        return Err(Failure::Input(format!("need 1 <= m <= n, got m = {}, n = {}", spec.m, spec.n)));
    }
    let sys = build_cell(&spec)?;
    let lap = discrete_laplacian(spec.lattice.size, spec.lattice.boundary)?;
    let row_sums: Vec<f64> = lap.to_rows().iter().map(|r| r.iter().sum()).collect();
    let guesses = if spec.guesses.is_empty() {
        vec![vec![0.0; spec.n]]
    } else {
        spec.guesses.clone()
    };
    let mut reports = Vec::new();
    for g in &guesses {
        if g.len() != spec.n {
            return Err(Failure::Input(format!("guess {g:?} does not have {} components", spec.n)));
        }
        let r = analyze_equilibrium_pipeline_with(&sys, g, &tols.witness, &tols.edge);
        reports.push(json!({ "guess": g, "report": value_or_error(r) }));
    }
    Ok(Outcome::ok(json!({
        "lattice": { "size": spec.lattice.size, "boundary": spec.lattice.boundary, "laplacian": lap, "row_sums": row_sums },
        "port_diffusion": spec.d_coeffs.iter().map(|d| -4.0 * d).collect::<Vec<_>>(),
        "reports": reports,
    })))
}

pub fn genericity(n: usize, samples: usize, seed: u64, tols: &Tolerances) -> Run {
    let tol = tols.witness.generic_tol;
    let fraction = sample_density_m(n, samples, seed, tol)?;
    Ok(Outcome::ok(json!({ "n": n, "samples": samples, "seed": seed, "fraction": fraction, "tol": tol })))
}

pub fn tolerance_listing() -> Value {
    let t = Tolerances::default();
    let mut w = serde_json::to_value(&t.witness).expect("serializes");
    if let Some(m) = w.as_object_mut() {
        m.remove("seed");
    }
    json!({ "witness": w, "edge": t.edge })
}
