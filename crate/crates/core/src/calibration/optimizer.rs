use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::problem::{CalibrationProblem, Evaluation};
use super::space::ParamSpace;
use super::variant::ModelVariant;
use crate::error::{Error, Result};
use crate::hjm::WgParams;

/// One accepted step of a run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TraceEntry {
    pub iteration: usize,
    pub objective: f64,
    pub damping: f64,
}

/// Outcome of a single start.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StartOutcome {
    pub start_index: usize,
    pub start: Vec<f64>,
    pub theta: Vec<f64>,
    pub objective: f64,
    pub iterations: usize,
    pub evaluations: usize,
    pub converged: bool,
    pub failed_cells: Vec<usize>,
}

/// Best run of a calibration.
#[derive(Debug, Clone, PartialEq)]
pub struct CalibrationResult {
    pub variant: ModelVariant,
    pub params: WgParams,
    pub theta: Vec<f64>,
    pub names: Vec<String>,
    /// Sum of squared relative price errors.
    pub chi2: f64,
    /// Relative price residuals per quote, in quote order.
    pub residuals: Vec<f64>,
    pub trace: Vec<TraceEntry>,
    pub starts: Vec<StartOutcome>,
    pub best_start: usize,
    /// `chi2` divided by a reference run's `chi2`, when one is supplied.
    pub normalized_chi2: Option<f64>,
}

impl CalibrationResult {
    pub fn normalize_against(&mut self, baseline_chi2: f64) {
        self.normalized_chi2 = Some(self.chi2 / baseline_chi2);
    }
}

/// Default start grid over mean reversions and volatility levels.
fn grid_starts(space: &ParamSpace, count: usize) -> Vec<Vec<f64>> {
    const LAMBDAS: [(f64, f64); 4] = [(0.001, 0.01), (0.01, 0.5), (0.01, 5.0), (0.1, 1.0)];
    const HS: [(f64, f64); 2] = [(0.006, 0.02), (0.012, 0.04)];
    let mut out = Vec::new();
    for &(l1, l2) in &LAMBDAS {
        for &(h1, h2) in &HS {
            let p = WgParams::two_factor([l1, l2], [h1, h2], [0.1, 0.5], -0.8, 1.2, 1.3, 0.6)
                .expect("grid parameters are valid");
            let mut th = space.from_params(&p).expect("ordered grid point");
            space.project(&mut th);
            out.push(th);
        }
    }
    out.truncate(count);
    out
}

/// Uniform draws in the box, using a log scale for `h`.
fn random_starts(space: &ParamSpace, count: usize, seed: u64) -> Vec<Vec<f64>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|_| {
            space
                .names()
                .iter()
                .zip(space.bounds())
                .map(|(n, b)| {
                    let u: f64 = rng.random();
                    if n.starts_with('h') && b.lo > 0.0 {
                        (b.lo.ln() + u * (b.hi.ln() - b.lo.ln())).exp()
                    } else {
                        b.lo + u * (b.hi - b.lo)
                    }
                })
                .collect()
        })
        .collect()
}

/// All start points of a problem in the order they are reported.
pub fn start_points(prob: &CalibrationProblem) -> Vec<Vec<f64>> {
    let space = prob.space();
    let s = prob.settings();
    let mut pts: Vec<Vec<f64>> = prob.extra_starts().to_vec();
    pts.extend(grid_starts(space, s.grid_starts));
    pts.extend(random_starts(space, s.random_starts, s.seed));
    for p in &mut pts {
        space.project(p);
    }
    pts
}

struct Lm<'a> {
    prob: &'a CalibrationProblem,
    evaluations: usize,
}

impl Lm<'_> {
    fn eval(&mut self, theta: &[f64]) -> Evaluation {
        self.evaluations += 1;
        self.prob.evaluate(theta)
    }

    /// Central-difference Jacobian, one-sided at the bounds.
    fn jacobian(&mut self, theta: &[f64], r0: &[f64]) -> DMatrix<f64> {
        let m = r0.len();
        let n = theta.len();
        let bounds = self.prob.space().bounds().to_vec();
        let mut jac = DMatrix::zeros(m, n);
        let mut th = theta.to_vec();
        for j in 0..n {
            let h = 1e-6 * (1.0 + theta[j].abs());
            let up = (theta[j] + h).min(bounds[j].hi);
            let dn = (theta[j] - h).max(bounds[j].lo);
            let (ru, rd) = (
                if up > theta[j] {
                    th[j] = up;
                    Some(self.eval(&th).residuals)
                } else {
                    None
                },
                if dn < theta[j] {
                    th[j] = dn;
                    Some(self.eval(&th).residuals)
                } else {
                    None
                },
            );
            th[j] = theta[j];
            match (ru, rd) {
                (Some(u), Some(d)) => {
                    for i in 0..m {
                        jac[(i, j)] = (u[i] - d[i]) / (up - dn);
                    }
                }
                (Some(u), None) => {
                    for i in 0..m {
                        jac[(i, j)] = (u[i] - r0[i]) / (up - theta[j]);
                    }
                }
                (None, Some(d)) => {
                    for i in 0..m {
                        jac[(i, j)] = (r0[i] - d[i]) / (theta[j] - dn);
                    }
                }
                (None, None) => {}
            }
        }
        jac
    }

    /// Projected Levenberg-Marquardt with Marquardt diagonal scaling.
    fn run(&mut self, start: &[f64], start_index: usize, trace: &mut Vec<TraceEntry>) -> StartOutcome {
        let space = self.prob.space();
        let settings = self.prob.settings().clone();
        let bounds = space.bounds().to_vec();
        let n = start.len();
        let mut theta = start.to_vec();
        let mut cur = self.eval(&theta);
        let mut mu = 1e-3;
        let mut converged = false;
        let mut iterations = 0;
        trace.push(TraceEntry { iteration: 0, objective: cur.objective, damping: mu });

        while iterations < settings.max_iters {
            iterations += 1;
            let jac = self.jacobian(&theta, &cur.residuals);
            let r = DVector::from_column_slice(&cur.residuals);
            let g = jac.tr_mul(&r);
            let a = jac.tr_mul(&jac);

            // Coordinates pinned at a bound with the gradient pointing out
            // of the box are held fixed for this iteration.
            let free: Vec<usize> = (0..n)
                .filter(|&j| {
                    let at_lo = theta[j] <= bounds[j].lo && g[j] > 0.0;
                    let at_hi = theta[j] >= bounds[j].hi && g[j] < 0.0;
                    !(at_lo || at_hi)
                })
                .collect();
            let gnorm = free.iter().map(|&j| g[j].abs()).fold(0.0, f64::max);
            if free.is_empty() || gnorm <= 1e-14 * (1.0 + cur.objective) {
                converged = true;
                break;
            }

            let k = free.len();
            let mut accepted = false;
            for _ in 0..30 {
                let mut sys = DMatrix::zeros(k, k);
                let mut rhs = DVector::zeros(k);
                for (p, &i) in free.iter().enumerate() {
                    rhs[p] = -g[i];
                    for (q, &j) in free.iter().enumerate() {
                        sys[(p, q)] = a[(i, j)];
                    }
                    sys[(p, p)] += mu * a[(i, i)].max(1e-12);
                }
                let step = match sys.clone().cholesky() {
                    Some(c) => c.solve(&rhs),
                    None => {
                        mu *= 10.0;
                        continue;
                    }
                };
                let mut trial = theta.clone();
                for (p, &i) in free.iter().enumerate() {
                    trial[i] += step[p];
                }
                space.project(&mut trial);
                if trial == theta {
                    break;
                }
                let next = self.eval(&trial);
                if next.objective.is_finite() && next.objective < cur.objective {
                    let decrease = (cur.objective - next.objective) / cur.objective.max(1e-300);
                    theta = trial;
                    cur = next;
                    mu = (mu / 3.0).max(1e-12);
                    accepted = true;
                    trace.push(TraceEntry { iteration: iterations, objective: cur.objective, damping: mu });
                    if decrease < settings.tolerance {
                        converged = true;
                    }
                    break;
                }
                mu *= 4.0;
                if mu > 1e16 {
                    break;
                }
            }
            if !accepted {
                converged = true;
                break;
            }
            if converged {
                break;
            }
        }
        StartOutcome {
            start_index,
            start: start.to_vec(),
            theta,
            objective: cur.objective,
            iterations,
            evaluations: self.evaluations,
            converged,
            failed_cells: cur.failed_cells,
        }
    }
}

/// Runs projected Levenberg-Marquardt from one start point.
pub fn minimize_from(prob: &CalibrationProblem, start: &[f64]) -> (StartOutcome, Vec<TraceEntry>) {
    let mut lm = Lm { prob, evaluations: 0 };
    let mut trace = Vec::new();
    let mut s = start.to_vec();
    prob.space().project(&mut s);
    let out = lm.run(&s, 0, &mut trace);
    (out, trace)
}

/// Multistart least-squares fit. Starts run concurrently and the best
/// objective wins, ties broken by start index.
pub fn calibrate(prob: &CalibrationProblem) -> Result<CalibrationResult> {
    let starts = start_points(prob);
    if starts.is_empty() {
        return Err(Error::CalibrationFailed("no start points".into()));
    }
    let runs: Vec<(StartOutcome, Vec<TraceEntry>)> = starts
        .par_iter()
        .enumerate()
        .map(|(i, s)| {
            let mut lm = Lm { prob, evaluations: 0 };
            let mut trace = Vec::new();
            let out = lm.run(s, i, &mut trace);
            (out, trace)
        })
        .collect();

    let best = runs
        .iter()
        .enumerate()
        .filter(|(_, (o, _))| o.objective.is_finite() && o.failed_cells.is_empty())
        .min_by(|(i, (a, _)), (j, (b, _))| a.objective.total_cmp(&b.objective).then(i.cmp(j)))
        .map(|(i, _)| i);
    let Some(best) = best else {
        let diag: Vec<String> = runs
            .iter()
            .map(|(o, _)| format!("start {}: objective {} failed cells {:?}", o.start_index, o.objective, o.failed_cells))
            .collect();
        return Err(Error::CalibrationFailed(diag.join("; ")));
    };
    let (out, trace) = runs[best].clone();
    let params = prob.space().to_params(&out.theta)?;
    let eval = prob.evaluate(&out.theta);
    Ok(CalibrationResult {
        variant: prob.variant(),
        params,
        theta: out.theta.clone(),
        names: prob.space().names().iter().map(|s| s.to_string()).collect(),
        chi2: eval.objective,
        residuals: eval.residuals,
        trace,
        starts: runs.into_iter().map(|(o, _)| o).collect(),
        best_start: best,
        normalized_chi2: None,
    })
}

/// Embeds an eta-free fit into the weighted variant's coordinates with
/// `eta = 0`, copying the shared coordinates bit for bit so the objective
/// is unchanged at the embedded point.
pub fn embed_without_eta(result: &CalibrationResult, target: &ParamSpace) -> Result<Vec<f64>> {
    target
        .names()
        .iter()
        .map(|n| {
            if n.starts_with("eta") {
                return Ok(0.0);
            }
            result
                .names
                .iter()
                .position(|m| m == n)
                .map(|i| result.theta[i])
                .ok_or_else(|| Error::InvalidParams(format!("coordinate {n} missing from source fit")))
        })
        .collect()
}
