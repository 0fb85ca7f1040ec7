use std::f64::consts::{PI, TAU};
use std::fmt;
use std::str::FromStr;

use argmin::core::{CostFunction, Executor, Gradient, State, TerminationReason, TerminationStatus};
use argmin::solver::linesearch::MoreThuenteLineSearch;
use argmin::solver::quasinewton::LBFGS;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use super::data::TomographyData;
use super::objective::{predicted_moduli, Objective, Residual};
use super::visibility::VisibilityTerms;
use crate::error::{Error, Result};
use crate::linalg::{matrix_fidelity, ComplexMatrix};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum GradientMode {
    Analytic,
    FiniteDifference,
}

impl fmt::Display for GradientMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            GradientMode::Analytic => "analytic",
            GradientMode::FiniteDifference => "finite-difference",
        })
    }
}

impl FromStr for GradientMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "analytic" => Ok(Self::Analytic),
            "finite-difference" | "fd" => Ok(Self::FiniteDifference),
            other => Err(Error::Argument(format!("unknown gradient mode `{other}`"))),
        }
    }
}

#[derive(Clone, Debug)]
pub struct ReconstructionConfig {
    /// Independent random starts; the lowest objective wins.
    pub restarts: usize,
    pub max_iterations: u64,
    /// Weight of the visibility residuals.
    pub lambda: f64,
    pub gradient: GradientMode,
    /// Fit one scalar multiplying every predicted visibility.
    pub fit_visibility_scale: bool,
    pub seed: u64,
    /// L-BFGS memory.
    pub history: usize,
}

impl Default for ReconstructionConfig {
    fn default() -> Self {
        Self {
            restarts: 8,
            max_iterations: 3000,
            lambda: 1.0,
            gradient: GradientMode::Analytic,
            fit_visibility_scale: false,
            seed: 0,
            history: 10,
        }
    }
}

#[derive(Clone, Debug)]
pub struct ReconstructionResult {
    /// Gauge-fixed: first row and first column non-negative real.
    pub unitary_estimate: ComplexMatrix,
    /// Efficiencies normalized so the best output has efficiency one.
    pub input_loss: Vec<f64>,
    pub output_loss: Vec<f64>,
    pub visibility_scale: Option<f64>,
    /// Final objective value of the winning start.
    pub objective: f64,
    pub iterations: u64,
    pub converged: bool,
    pub best_restart: usize,
    /// Mean absolute visibility residual over the fitted records.
    pub visibility_mae: f64,
    /// Fidelity between measured and predicted moduli matrices.
    pub moduli_fidelity: f64,
    /// Set by callers that know the ground truth.
    pub fidelity_vs_truth: Option<f64>,
}

struct Problem<'a> {
    objective: Objective<'a>,
    mode: GradientMode,
}

impl CostFunction for Problem<'_> {
    type Param = Vec<f64>;
    type Output = f64;

    fn cost(&self, x: &Self::Param) -> std::result::Result<f64, argmin::core::Error> {
        let f = self.objective.value(x);
        if !f.is_finite() {
            // the line search cannot recover from this; end the start here
            return Err(argmin::core::Error::msg("non-finite objective"));
        }
        Ok(f)
    }
}

impl Gradient for Problem<'_> {
    type Param = Vec<f64>;
    type Gradient = Vec<f64>;

    fn gradient(&self, x: &Self::Param) -> std::result::Result<Vec<f64>, argmin::core::Error> {
        Ok(match self.mode {
            GradientMode::Analytic => self.objective.value_and_gradient(x).1,
            GradientMode::FiniteDifference => self.objective.finite_difference_gradient(x, 1e-7),
        })
    }
}

struct Attempt {
    x: Vec<f64>,
    cost: f64,
    iterations: u64,
    converged: bool,
}

fn start_point(obj: &Objective<'_>, seed: u64, index: usize) -> Vec<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed.wrapping_add(index as u64));
    let m = obj.data.modes();
    let mut x = Vec::with_capacity(obj.dimension());
    for _ in 0..obj.mesh.rotations() {
        x.push(rng.gen_range(0.0..PI));
        x.push(rng.gen_range(0.0..TAU));
    }
    // column sums of the moduli estimate the input efficiencies
    for i in 0..m {
        let col: f64 = (0..m).map(|k| obj.data.modulus(k, i)).sum();
        x.push(col.max(1e-12).ln());
    }
    x.extend(std::iter::repeat_n(0.0, m));
    if obj.fit_scale {
        x.push(1.0);
    }
    x
}

fn minimize(obj: &Objective<'_>, config: &ReconstructionConfig, x0: Vec<f64>) -> Result<Attempt> {
    let fallback = Attempt {
        cost: obj.value(&x0),
        x: x0.clone(),
        iterations: 0,
        converged: false,
    };
    let problem = Problem {
        objective: obj.clone(),
        mode: config.gradient,
    };
    let solver = LBFGS::new(MoreThuenteLineSearch::new(), config.history)
        .with_tolerance_grad(1e-12)
        .and_then(|s| s.with_tolerance_cost(1e-15))
        .map_err(|e| Error::Argument(e.to_string()))?;
    let run = Executor::new(problem, solver)
        .configure(|s| s.param(x0).max_iters(config.max_iterations).target_cost(0.0))
        .run();
    // the solver keeps no partial state on error; fall back to the start
    let Ok(res) = run else { return Ok(fallback) };
    let state = res.state();
    let converged = !matches!(
        state.get_termination_status(),
        TerminationStatus::Terminated(TerminationReason::MaxItersReached)
    );
    match state.get_best_param() {
        Some(x) if state.get_best_cost() <= fallback.cost => Ok(Attempt {
            x: x.clone(),
            cost: state.get_best_cost(),
            iterations: state.get_iter(),
            converged,
        }),
        _ => Ok(fallback),
    }
}

/// Rough fit on coincidence-rate residuals, then refinement on the
/// visibility residuals themselves.
fn run_start(obj: &Objective<'_>, config: &ReconstructionConfig, index: usize) -> Result<Attempt> {
    let x0 = start_point(obj, config.seed, index);
    let rough = minimize(&obj.clone().with_residual(Residual::Rate), config, x0)?;
    let mut fine = minimize(obj, config, rough.x)?;
    fine.iterations += rough.iterations;
    Ok(fine)
}

/// Fits a unitary and loss vectors to the measurements by least squares
/// over a rotation mesh, keeping the best of several random starts.
pub fn reconstruct(data: &TomographyData, config: &ReconstructionConfig) -> Result<ReconstructionResult> {
    if config.restarts == 0 {
        return Err(Error::Argument("at least one optimizer start is required".into()));
    }
    if !(config.lambda >= 0.0 && config.lambda.is_finite()) {
        return Err(Error::Argument(
            "visibility weight must be finite and non-negative".into(),
        ));
    }
    let obj = Objective::new(data, config.lambda, config.fit_visibility_scale);
    let attempts: Vec<Attempt> = (0..config.restarts)
        .into_par_iter()
        .map(|i| run_start(&obj, config, i))
        .collect::<Result<_>>()?;
    let (best_restart, best) = attempts
        .iter()
        .enumerate()
        .min_by(|a, b| a.1.cost.total_cmp(&b.1.cost))
        .expect("at least one start");
    if !best.cost.is_finite() {
        return Err(Error::Degenerate("optimizer produced a non-finite objective".into()));
    }

    let cand = obj.candidate(&best.x);
    let visibility_mae = visibility_mae(&cand.unitary, cand.scale, data);
    let moduli_fidelity = matrix_fidelity(
        &data.moduli_matrix(),
        &predicted_moduli(&cand.unitary, &cand.input_eff, &cand.output_eff),
    )?;

    // only products of input and output efficiencies are observable
    let top = cand.output_eff.iter().cloned().fold(0.0, f64::max);
    let output_loss = cand.output_eff.iter().map(|o| (o / top).clamp(0.0, 1.0)).collect();
    let input_loss = cand.input_eff.iter().map(|n| (n * top).clamp(0.0, 1.0)).collect();

    Ok(ReconstructionResult {
        unitary_estimate: gauge_fix(&cand.unitary),
        input_loss,
        output_loss,
        visibility_scale: config.fit_visibility_scale.then_some(cand.scale),
        objective: best.cost,
        iterations: best.iterations,
        converged: best.converged,
        best_restart,
        visibility_mae,
        moduli_fidelity,
        fidelity_vs_truth: None,
    })
}

fn visibility_mae(u: &ComplexMatrix, scale: f64, data: &TomographyData) -> f64 {
    let (sum, n) = data.visibilities().iter().fold((0.0, 0usize), |(sum, n), r| {
        let ((i, j), (k, l)) = (r.inputs, r.outputs);
        match VisibilityTerms::new(u[(k, i)], u[(l, j)], u[(k, j)], u[(l, i)]).value() {
            Some(v) => (sum + (scale * v - r.value).abs(), n + 1),
            None => (sum, n),
        }
    });
    if n == 0 {
        0.0
    } else {
        sum / n as f64
    }
}

/// Multiplies columns then rows by phases so that the first row and the
/// first column become non-negative reals.
pub fn gauge_fix(u: &ComplexMatrix) -> ComplexMatrix {
    let unit = |z: Complex64| {
        if z.norm() > 0.0 {
            z.conj() / z.norm()
        } else {
            Complex64::new(1.0, 0.0)
        }
    };
    let cols: Vec<Complex64> = (0..u.cols()).map(|c| unit(u[(0, c)])).collect();
    let mut out = ComplexMatrix::from_fn(u.rows(), u.cols(), |r, c| u[(r, c)] * cols[c]);
    for r in 1..u.rows() {
        let ph = unit(out[(r, 0)]);
        for c in 0..u.cols() {
            out[(r, c)] *= ph;
        }
    }
    out
}
