//! Weighted Levenberg–Marquardt fit of the fidelity decay `F(ε)`.
//!
//! Both models depend on the widths only through `u = (ε/ε₂)² + ε/ε₁`, which
//! is linear in the rates `q = 1/ε₂²` and `r = 1/ε₁`. The fit runs in
//! `(baseline, q, r)` with `q, r >= 0`, so a width may come out infinite when
//! its term is not supported by the data.

use nalgebra::{Matrix3, Vector3};
use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};

const MAX_ITERATIONS: usize = 200;
const REL_TOLERANCE: f64 = 1e-8;
const MAX_DAMPING: f64 = 1e15;
const BASELINE_CEILING: f64 = 1.0 - 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DecayModel {
    /// `b + (1 - b) exp[-(ε/ε₂)² - ε/ε₁]`
    ExpGauss,
    /// `b + (1 - b) / sqrt((ε/ε₂)² + ε/ε₁ + 1)`
    Algebraic,
}

impl DecayModel {
    pub fn name(&self) -> &'static str {
        match self {
            DecayModel::ExpGauss => "exp_gauss",
            DecayModel::Algebraic => "algebraic",
        }
    }

    /// Decay factor `g(u)` and its derivative.
    fn shape(&self, u: f64) -> (f64, f64) {
        match self {
            DecayModel::ExpGauss => {
                let e = (-u).exp();
                (e, -e)
            }
            DecayModel::Algebraic => {
                let s = 1.0 / (u + 1.0).sqrt();
                (s, -0.5 * s * s * s)
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DecayParams {
    /// `f_bas` or `g_bas`.
    pub baseline: f64,
    pub eps2: f64,
    pub eps1: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FitPoint {
    pub epsilon: f64,
    pub value: f64,
    pub sigma: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FitResult {
    pub model: DecayModel,
    pub params: DecayParams,
    /// One-sigma uncertainties of `params`.
    pub sigma: DecayParams,
    /// `sqrt(Σ (F_i - f(ε_i))² / σ_i²)`.
    pub residual_norm: f64,
    pub chi2_reduced: f64,
    pub iterations: usize,
}

pub fn eval_decay_model(model: DecayModel, params: &DecayParams, epsilon: f64) -> f64 {
    let u = (epsilon / params.eps2).powi(2) + epsilon / params.eps1;
    params.baseline + (1.0 - params.baseline) * model.shape(u).0
}

struct Problem<'a> {
    model: DecayModel,
    points: &'a [FitPoint],
}

impl Problem<'_> {
    fn value(&self, x: &Vector3<f64>, eps: f64) -> f64 {
        let u = x[1] * eps * eps + x[2] * eps;
        x[0] + (1.0 - x[0]) * self.model.shape(u).0
    }

    fn cost(&self, x: &Vector3<f64>) -> f64 {
        self.points.iter().map(|p| ((p.value - self.value(x, p.epsilon)) / p.sigma).powi(2)).sum()
    }

    /// Weighted normal matrix `JᵀWJ` and gradient `JᵀW(F - f)`.
    fn normal_equations(&self, x: &Vector3<f64>) -> (Matrix3<f64>, Vector3<f64>) {
        let mut a = Matrix3::zeros();
        let mut g = Vector3::zeros();
        for p in self.points {
            let e = p.epsilon;
            let u = x[1] * e * e + x[2] * e;
            let (s, ds) = self.model.shape(u);
            let du = (1.0 - x[0]) * ds;
            let row = Vector3::new(1.0 - s, du * e * e, du * e);
            let w = 1.0 / (p.sigma * p.sigma);
            a += row * row.transpose() * w;
            g += row * (w * (p.value - (x[0] + (1.0 - x[0]) * s)));
        }
        (a, g)
    }
}

fn project(x: Vector3<f64>) -> Vector3<f64> {
    Vector3::new(x[0].clamp(0.0, BASELINE_CEILING), x[1].max(0.0), x[2].max(0.0))
}

fn initial_guess(points: &[FitPoint]) -> Vector3<f64> {
    let base = points.iter().map(|p| p.value).fold(f64::INFINITY, f64::min).clamp(0.0, 0.9);
    let half = 0.5 * (1.0 + base);
    let median = points[points.len() / 2].epsilon;
    let mut width = points.iter().find(|p| p.value < half).map_or(median, |p| p.epsilon);
    if !(width > 0.0) {
        width = if median > 0.0 { median } else { points[points.len() - 1].epsilon };
    }
    Vector3::new(base, 1.0 / (width * width), 1.0 / width)
}

/// Fits `model` to `points` weighted by `1/σ²`.
///
/// Steps are only accepted when they lower the weighted residual. The
/// iteration stops when no parameter moves by more than `1e-8` relative, or
/// when the damping grows so large that no descent step remains. After 200
/// iterations [`Error::NonConvergence`] is returned with the best fit found.
pub fn fit_decay(points: &[FitPoint], model: DecayModel) -> Result<FitResult> {
    if points.len() < 4 {
        return Err(domain(format!("need at least 4 points to fit, got {}", points.len())));
    }
    for p in points {
        if !(p.sigma > 0.0 && p.sigma.is_finite()) {
            return Err(domain(format!("point at ε = {} has invalid sigma {}", p.epsilon, p.sigma)));
        }
        if !(p.epsilon >= 0.0 && p.epsilon.is_finite() && p.value.is_finite()) {
            return Err(domain(format!("invalid point ({}, {})", p.epsilon, p.value)));
        }
    }
    let first = points[0].value;
    if points.iter().all(|p| p.value == first) {
        return Err(Error::DegenerateData(format!("all {} values equal {first}", points.len())));
    }
    let mut sorted = points.to_vec();
    sorted.sort_by(|a, b| {
        a.epsilon.total_cmp(&b.epsilon).then(a.value.total_cmp(&b.value)).then(a.sigma.total_cmp(&b.sigma))
    });
    let problem = Problem { model, points: &sorted };

    let mut x = initial_guess(&sorted);
    let mut cost = problem.cost(&x);
    let mut lambda = 1e-3;
    let mut converged = false;
    let mut iterations = 0;
    while iterations < MAX_ITERATIONS {
        iterations += 1;
        let (a, g) = problem.normal_equations(&x);
        let floor = 1e-12 * a.diagonal().max().max(1e-300);
        let scale = a.diagonal().map(|d| d.max(floor));
        let accepted = loop {
            let damped = a + Matrix3::from_diagonal(&(scale * lambda));
            let step = damped.cholesky().map(|c| c.solve(&g));
            if let Some(step) = step {
                let trial = project(x + step);
                let trial_cost = problem.cost(&trial);
                if trial_cost < cost {
                    break Some((trial, trial_cost));
                }
            }
            lambda *= 10.0;
            if lambda > MAX_DAMPING {
                break None;
            }
        };
        let Some((trial, trial_cost)) = accepted else {
            converged = true;
            break;
        };
        let small = (0..3).all(|j| (trial[j] - x[j]).abs() <= REL_TOLERANCE * (x[j].abs() + REL_TOLERANCE));
        x = trial;
        cost = trial_cost;
        lambda = (lambda / 10.0).max(1e-12);
        if small {
            converged = true;
            break;
        }
    }

    let result = summarize(&problem, &x, cost, iterations);
    if converged {
        Ok(result)
    } else {
        Err(Error::NonConvergence { iterations, best: Box::new(result) })
    }
}

fn summarize(problem: &Problem, x: &Vector3<f64>, cost: f64, iterations: usize) -> FitResult {
    let dof = problem.points.len() as f64 - 3.0;
    let chi2_reduced = cost / dof;
    let (a, _) = problem.normal_equations(x);
    let var = a.try_inverse().map(|inv| inv.diagonal() * chi2_reduced).unwrap_or_else(|| Vector3::repeat(f64::NAN));
    let (b, q, r) = (x[0], x[1], x[2]);
    let params = DecayParams { baseline: b, eps2: 1.0 / q.sqrt(), eps1: 1.0 / r };
    let sd = var.map(|v| v.max(0.0).sqrt());
    let sigma = DecayParams { baseline: sd[0], eps2: 0.5 * q.powf(-1.5) * sd[1], eps1: sd[2] / (r * r) };
    FitResult { model: problem.model, params, sigma, residual_norm: cost.sqrt(), chi2_reduced, iterations }
}
