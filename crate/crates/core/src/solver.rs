//! DCA, adaptive boosted DCA and the skipping variant, each wrapped in the
//! μ (and τ) continuation loop.

use std::fmt;
use std::str::FromStr;
use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matrix::{CenterMatrix, Matrix};
use crate::model::ProblemInstance;

/// Step size below which the skipping variant ends a stage outright.
const SKIP_STEP_EPS: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Variant {
    Dca,
    Abdca,
    AbdcaSkip,
}

impl Variant {
    pub const ALL: [Variant; 3] = [Variant::Dca, Variant::Abdca, Variant::AbdcaSkip];

    pub fn as_str(self) -> &'static str {
        match self {
            Variant::Dca => "dca",
            Variant::Abdca => "abdca",
            Variant::AbdcaSkip => "abdca-skip",
        }
    }
}

impl fmt::Display for Variant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Variant {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "dca" => Ok(Variant::Dca),
            "abdca" | "bdca" => Ok(Variant::Abdca),
            "abdca-skip" | "abdca_skip" | "skip" => Ok(Variant::AbdcaSkip),
            other => Err(Error::InvalidParameter(format!(
                "unknown variant {other:?}; expected dca, abdca or abdca-skip"
            ))),
        }
    }
}

/// Function tested in the Armijo condition.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Merit {
    /// `f_F`
    TrueObjective,
    /// `f_τ` at the current τ; identical to `f_F` without constraints.
    PenalizedObjective,
    /// `f_{τ,μ}` at the current stage.
    SmoothedObjective,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolverParams {
    pub alpha: f64,
    pub beta: f64,
    pub gamma: f64,
    pub delta: f64,
    pub sigma: f64,
    pub mu0: f64,
    pub mu_f: f64,
    pub tau0: f64,
    pub tau_f: f64,
    pub lambda_start: f64,
    pub lambda_f: f64,
    pub lambda_skip: usize,
    /// Inner iteration cap per stage.
    pub n_max: usize,
    pub tol: f64,
    /// `None` picks the true objective without constraints and the
    /// penalized objective with them.
    pub merit: Option<Merit>,
    pub lambda_min_guard: f64,
    /// Also store `f_{τ,μ}` of every iterate in the trace.
    pub record_smoothed: bool,
}

impl Default for SolverParams {
    fn default() -> Self {
        Self {
            alpha: 0.05,
            beta: 0.01,
            gamma: 2.0,
            delta: 0.5,
            sigma: 10.0,
            mu0: 1.0,
            mu_f: 1e-6,
            tau0: 1.0,
            tau_f: 1e8,
            lambda_start: 1.0,
            lambda_f: 1e-3,
            lambda_skip: 30,
            n_max: 5000,
            tol: 1e-6,
            merit: None,
            lambda_min_guard: 1e-10,
            record_smoothed: false,
        }
    }
}

impl SolverParams {
    pub fn validate(&self) -> Result<()> {
        fn check(ok: bool, msg: &str) -> Result<()> {
            if ok {
                Ok(())
            } else {
                Err(Error::InvalidParameter(msg.to_string()))
            }
        }
        let finite = [
            self.alpha,
            self.beta,
            self.gamma,
            self.delta,
            self.sigma,
            self.mu0,
            self.mu_f,
            self.tau0,
            self.tau_f,
            self.lambda_start,
            self.lambda_f,
            self.tol,
            self.lambda_min_guard,
        ];
        check(
            finite.iter().all(|v| v.is_finite()),
            "solver parameters must be finite",
        )?;
        check(self.alpha > 0.0, "alpha must be positive")?;
        check(
            self.beta > 0.0 && self.beta < 1.0,
            "beta must lie in (0, 1)",
        )?;
        check(self.gamma > 1.0, "gamma must exceed 1")?;
        check(
            self.delta > 0.0 && self.delta < 1.0,
            "delta must lie in (0, 1)",
        )?;
        check(self.sigma > 1.0, "sigma must exceed 1")?;
        check(
            self.mu_f > 0.0 && self.mu0 > self.mu_f,
            "need mu0 > mu_f > 0",
        )?;
        check(
            self.tau0 > 0.0 && self.tau_f > self.tau0,
            "need tau_f > tau0 > 0",
        )?;
        check(
            self.lambda_f > 0.0 && self.lambda_start > self.lambda_f,
            "need lambda_start > lambda_f > 0",
        )?;
        check(self.lambda_skip >= 1, "lambda_skip must be at least 1")?;
        check(self.n_max >= 1, "n_max must be at least 1")?;
        check(self.tol > 0.0, "tol must be positive")?;
        check(
            self.lambda_min_guard > 0.0,
            "lambda_min_guard must be positive",
        )?;
        Ok(())
    }

    pub fn merit_for(&self, p: &ProblemInstance) -> Merit {
        self.merit.unwrap_or(if p.is_constrained() {
            Merit::PenalizedObjective
        } else {
            Merit::TrueObjective
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TraceRow {
    pub stage: usize,
    pub iter: usize,
    pub mu: f64,
    pub tau: f64,
    pub lambda_trial: f64,
    pub lambda_accepted: f64,
    pub backtracks: usize,
    /// Merit value at the new iterate.
    pub f_value: f64,
    /// `‖X_{p+1} − X_p‖_F`
    pub step_fro: f64,
    pub skipped: bool,
    pub wall_ns: u64,
    /// Merit at `Z_p` when a line search ran.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub merit_at_z: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub smoothed_value: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StageRecord {
    pub stage: usize,
    pub mu: f64,
    pub tau: f64,
    pub iterations: usize,
    /// Stopped on the step criterion rather than the iteration cap.
    pub converged: bool,
    pub final_step: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolverReport {
    pub variant: Variant,
    pub centers: CenterMatrix,
    /// `f_F` at the final centers.
    pub value: f64,
    pub total_iterations: usize,
    pub stages: Vec<StageRecord>,
    pub trace: Vec<TraceRow>,
}

impl SolverReport {
    pub fn final_stage(&self) -> Option<&StageRecord> {
        self.stages.last()
    }
}

/// Result of one DCA step: `Z = ∇G*(Y)` with `Y ∈ ∂H(X)`.
#[derive(Debug, Clone)]
pub struct DcaStep {
    pub z: CenterMatrix,
    pub y: Matrix,
}

pub fn dca_step(p: &ProblemInstance, x: &CenterMatrix, mu: f64, tau: f64) -> Result<DcaStep> {
    if !(mu > 0.0 && mu.is_finite()) {
        return Err(Error::InvalidParameter(format!(
            "mu must be positive, got {mu}"
        )));
    }
    if !(tau >= 0.0 && tau.is_finite()) {
        return Err(Error::InvalidParameter(format!(
            "tau must be nonnegative, got {tau}"
        )));
    }
    p.check_centers(x)?;
    Ok(dca_step_unchecked(p, x, mu, tau))
}

fn dca_step_unchecked(p: &ProblemInstance, x: &CenterMatrix, mu: f64, tau: f64) -> DcaStep {
    let mut y = p.grad_h1_unchecked(x, mu);
    y.add_assign(&p.subgrad_h2_unchecked(x));
    let tau = if p.is_constrained() { tau } else { 0.0 };
    if tau > 0.0 {
        y.add_assign(&p.grad_htau_unchecked(x, tau));
    }
    let z = p.grad_g_conj_unchecked(&y, mu, tau);
    DcaStep { z, y }
}

/// Trial step from the last (at most two) `(trial, accepted)` pairs, oldest
/// first.
pub fn adaptive_trial(history: &[(f64, f64)], gamma: f64, lambda_start: f64) -> f64 {
    match history {
        [.., (t2, l2), (t1, l1)] => {
            if l1 == t1 && l2 == t2 {
                gamma * l1
            } else {
                *l1
            }
        }
        _ => lambda_start,
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LineSearch {
    pub lambda: f64,
    pub backtracks: usize,
    pub f_start: f64,
    pub f_end: f64,
}

/// Backtracking on `f(Z + λd) ≤ f(Z) − αλ²‖d‖²` over `λ ∈ {λ̄, βλ̄, β²λ̄, …}`.
///
/// Gives up with `λ = 0` once `λ` drops below `guard`. A zero trial or zero
/// direction returns `λ = 0` without evaluating anything but `f(Z)`.
pub fn armijo_search(
    mut f: impl FnMut(&Matrix) -> f64,
    z: &Matrix,
    d: &Matrix,
    trial: f64,
    alpha: f64,
    beta: f64,
    guard: f64,
) -> LineSearch {
    let f_start = f(z);
    let dd = d.dot(d);
    let mut lambda = trial;
    let mut backtracks = 0;
    if lambda > 0.0 && dd > 0.0 {
        while lambda >= guard {
            let trial_point = z.add_scaled(lambda, d);
            let f_new = f(&trial_point);
            if f_new <= f_start - alpha * lambda * lambda * dd {
                return LineSearch {
                    lambda,
                    backtracks,
                    f_start,
                    f_end: f_new,
                };
            }
            lambda *= beta;
            backtracks += 1;
        }
    }
    LineSearch {
        lambda: 0.0,
        backtracks,
        f_start,
        f_end: f_start,
    }
}

fn merit_value(p: &ProblemInstance, merit: Merit, x: &Matrix, mu: f64, tau: f64) -> f64 {
    match merit {
        Merit::TrueObjective => p.objective_unchecked(x),
        Merit::PenalizedObjective => p.penalized_unchecked(x, tau),
        Merit::SmoothedObjective => p.smoothed_unchecked(x, mu, tau),
    }
}

/// Line-search state of the skipping variant.
#[derive(Debug, Default)]
struct SkipState {
    suppressed: bool,
    skipped_since: usize,
}

pub fn solve(
    p: &ProblemInstance,
    x0: &CenterMatrix,
    params: &SolverParams,
    variant: Variant,
) -> Result<SolverReport> {
    params.validate()?;
    p.check_centers(x0)?;
    let merit = params.merit_for(p);
    let constrained = p.is_constrained();

    let mut x = x0.clone();
    let mut mu = params.mu0;
    let mut tau = if constrained { params.tau0 } else { 0.0 };
    let mut trace: Vec<TraceRow> = Vec::new();
    let mut stages = Vec::new();
    let mut total = 0;

    let mut stage = 0;
    while mu > params.mu_f && (!constrained || tau < params.tau_f) {
        let mut history: Vec<(f64, f64)> = Vec::with_capacity(2);
        let mut skip = SkipState::default();
        let mut iterations = 0;
        let mut converged = false;
        let mut final_step = f64::NAN;

        for iter in 0..params.n_max {
            let started = Instant::now();
            let z = dca_step_unchecked(p, &x, mu, tau).z;
            let d = z.sub(&x);
            let d_norm = d.fro_norm();

            let mut row = TraceRow {
                stage,
                iter,
                mu,
                tau,
                lambda_trial: 0.0,
                lambda_accepted: 0.0,
                backtracks: 0,
                f_value: f64::NAN,
                step_fro: 0.0,
                skipped: false,
                wall_ns: 0,
                merit_at_z: None,
                smoothed_value: None,
            };
            let mut stop = false;
            let search = |trial: f64, row: &mut TraceRow| {
                let ls = armijo_search(
                    |m| merit_value(p, merit, m, mu, tau),
                    &z,
                    &d,
                    trial,
                    params.alpha,
                    params.beta,
                    params.lambda_min_guard,
                );
                row.lambda_trial = trial;
                row.lambda_accepted = ls.lambda;
                row.backtracks = ls.backtracks;
                row.merit_at_z = Some(ls.f_start);
                ls.lambda
            };

            let next = match variant {
                Variant::Dca => z,
                Variant::Abdca => {
                    if d_norm == 0.0 {
                        stop = true;
                        z
                    } else {
                        let trial = adaptive_trial(&history, params.gamma, params.lambda_start);
                        let lambda = search(trial, &mut row);
                        push_history(&mut history, (trial, lambda));
                        z.add_scaled(lambda, &d)
                    }
                }
                Variant::AbdcaSkip => {
                    if d_norm <= SKIP_STEP_EPS {
                        stop = true;
                        z
                    } else if skip.suppressed {
                        row.skipped = true;
                        skip.skipped_since += 1;
                        if skip.skipped_since + 1 >= params.lambda_skip {
                            // the next iteration probes from a fresh history
                            skip.suppressed = false;
                            history.clear();
                        }
                        z
                    } else {
                        let trial = adaptive_trial(&history, params.gamma, params.lambda_start);
                        let lambda = search(trial, &mut row);
                        push_history(&mut history, (trial, lambda));
                        if lambda < params.lambda_f {
                            skip.skipped_since = 0;
                            skip.suppressed = params.lambda_skip > 1;
                            if !skip.suppressed {
                                history.clear();
                            }
                        }
                        z.add_scaled(lambda, &d)
                    }
                }
            };

            let step = next.fro_dist(&x);
            row.step_fro = step;
            row.f_value = merit_value(p, merit, &next, mu, tau);
            if params.record_smoothed {
                row.smoothed_value = Some(p.smoothed_unchecked(&next, mu, tau));
            }
            row.wall_ns = started.elapsed().as_nanos() as u64;
            let finite = next.is_finite() && row.f_value.is_finite();
            trace.push(row);
            iterations += 1;
            total += 1;
            if !finite {
                return Err(Error::NonFiniteObjective {
                    stage,
                    iteration: iter,
                    trace,
                });
            }
            x = next;
            final_step = step;
            if stop || step < params.tol {
                converged = true;
                break;
            }
        }

        stages.push(StageRecord {
            stage,
            mu,
            tau,
            iterations,
            converged,
            final_step,
        });
        mu *= params.delta;
        if constrained {
            tau *= params.sigma;
        }
        stage += 1;
    }

    Ok(SolverReport {
        variant,
        value: p.objective_unchecked(&x),
        centers: x,
        total_iterations: total,
        stages,
        trace,
    })
}

fn push_history(history: &mut Vec<(f64, f64)>, pair: (f64, f64)) {
    if history.len() == 2 {
        history.remove(0);
    }
    history.push(pair);
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gauge::GaugeSet;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn pts(rows: &[[f64; 2]]) -> Matrix {
        Matrix::from_rows(rows).unwrap()
    }

    fn triangle(k: usize) -> ProblemInstance {
        ProblemInstance::new(
            pts(&[[0.0, 0.0], [1.0, 0.0], [0.0, 1.0]]),
            k,
            GaugeSet::euclidean(),
        )
        .unwrap()
    }

    fn square(gauge: GaugeSet) -> ProblemInstance {
        ProblemInstance::new(
            pts(&[[0.0, 0.0], [1.0, 0.0], [0.0, 1.0], [1.0, 1.0]]),
            2,
            gauge,
        )
        .unwrap()
    }

    #[test]
    fn params_validation() {
        assert!(SolverParams::default().validate().is_ok());
        let bad = [
            SolverParams {
                beta: 1.0,
                ..Default::default()
            },
            SolverParams {
                gamma: 1.0,
                ..Default::default()
            },
            SolverParams {
                delta: 0.0,
                ..Default::default()
            },
            SolverParams {
                sigma: 0.5,
                ..Default::default()
            },
            SolverParams {
                mu_f: 2.0,
                ..Default::default()
            },
            SolverParams {
                tau_f: 0.5,
                ..Default::default()
            },
            SolverParams {
                lambda_f: 2.0,
                ..Default::default()
            },
            SolverParams {
                lambda_skip: 0,
                ..Default::default()
            },
            SolverParams {
                alpha: f64::NAN,
                ..Default::default()
            },
        ];
        for p in bad {
            assert!(
                matches!(p.validate(), Err(Error::InvalidParameter(_))),
                "{p:?}"
            );
        }
    }

    #[test]
    fn variant_parsing() {
        for v in Variant::ALL {
            assert_eq!(v.as_str().parse::<Variant>().unwrap(), v);
        }
        assert!("newton".parse::<Variant>().is_err());
    }

    #[test]
    fn adaptive_trial_examples() {
        assert_eq!(adaptive_trial(&[], 2.0, 1.0), 1.0);
        assert_eq!(adaptive_trial(&[(1.0, 1.0)], 2.0, 0.3), 0.3);
        assert_eq!(adaptive_trial(&[(1.0, 1.0), (2.0, 2.0)], 2.0, 1.0), 4.0);
        assert_eq!(adaptive_trial(&[(1.0, 1.0), (2.0, 0.5)], 2.0, 1.0), 0.5);
        assert_eq!(adaptive_trial(&[(1.0, 0.1), (0.1, 0.1)], 2.0, 1.0), 0.1);
    }

    #[test]
    fn armijo_examples() {
        let z = Matrix::from_vec(1, 1, vec![1.0]).unwrap();
        let d = Matrix::from_vec(1, 1, vec![-1.0]).unwrap();
        let sq = |m: &Matrix| m[(0, 0)] * m[(0, 0)];
        let ls = armijo_search(sq, &z, &d, 1.0, 0.05, 0.01, 1e-10);
        assert_eq!((ls.lambda, ls.backtracks), (1.0, 0));

        // increasing along d: guard trips
        let up = Matrix::from_vec(1, 1, vec![1.0]).unwrap();
        let ls = armijo_search(sq, &z, &up, 1.0, 0.05, 0.01, 1e-10);
        assert_eq!(ls.lambda, 0.0);
        assert!(ls.backtracks <= 6);
        assert_eq!(ls.f_end, ls.f_start);

        // too long a trial backtracks once
        let ls = armijo_search(sq, &z, &d, 5.0, 0.05, 0.1, 1e-10);
        assert_eq!((ls.lambda, ls.backtracks), (0.5, 1));
        let ls = armijo_search(sq, &z, &d, 0.0, 0.05, 0.1, 1e-10);
        assert_eq!((ls.lambda, ls.backtracks), (0.0, 0));
    }

    #[test]
    fn dca_step_centroid_when_y_vanishes() {
        let p = ProblemInstance::new(
            pts(&[[0.0, 0.0], [1.0, 0.0], [0.0, 1.0]]),
            1,
            GaugeSet::euclidean(),
        )
        .unwrap();
        let x = pts(&[[0.3, 0.3]]);
        let step = dca_step(&p, &x, 10.0, 0.0).unwrap();
        assert_eq!(step.y, Matrix::zeros(1, 2));
        assert!((step.z[(0, 0)] - 1.0 / 3.0).abs() < 1e-15);
    }

    #[test]
    fn dca_step_stationary_at_global_solution() {
        let p = triangle(2);
        for x in [
            pts(&[[0.0, 0.0], [0.5, 0.5]]),
            pts(&[[1.0, 0.0], [0.0, 0.5]]),
        ] {
            let z = dca_step(&p, &x, 1e-6, 0.0).unwrap().z;
            assert!(z.fro_dist(&x) <= 1e-4);
        }
    }

    /// Plain gradient descent on `f_μ` for a single center.
    fn minimize_smoothed_by_gd(p: &ProblemInstance, mu: f64) -> Matrix {
        let mut x = pts(&[[0.0, 0.0]]);
        let lip = p.num_points() as f64 / mu;
        for _ in 0..20000 {
            let mut g = p.grad_g(&x, mu, 0.0).unwrap();
            g.add_assign(&{
                let mut h = p.grad_h1(&x, mu).unwrap();
                h.scale(-1.0);
                h
            });
            x = x.add_scaled(-1.0 / lip, &g);
        }
        x
    }

    #[test]
    fn dca_fixed_point_matches_smoothed_minimizer() {
        let p = ProblemInstance::new(
            pts(&[[0.0, 0.0], [4.0, 0.0], [0.0, 3.0], [5.0, 5.0]]),
            1,
            GaugeSet::euclidean(),
        )
        .unwrap();
        let mu = 0.1;
        let mut x = pts(&[[1.0, 1.0]]);
        for _ in 0..20000 {
            x = dca_step(&p, &x, mu, 0.0).unwrap().z;
        }
        let gd = minimize_smoothed_by_gd(&p, mu);
        assert!(x.fro_dist(&gd) < 1e-8, "{x:?} vs {gd:?}");
    }

    #[test]
    fn triangle_abdca_reaches_a_stationary_value() {
        let p = triangle(2);
        let params = SolverParams {
            delta: 0.8,
            ..Default::default()
        };
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let mut global = 0;
        for _ in 0..10 {
            let x0: Vec<f64> = (0..4).map(|_| rng.gen_range(0.0..0.5)).collect();
            let x0 = Matrix::from_vec(2, 2, x0).unwrap();
            let r = solve(&p, &x0, &params, Variant::Abdca).unwrap();
            // the other stationary value: one center at a¹, one between a² and a³
            let local = (r.value - 2f64.sqrt()).abs() < 1e-4;
            assert!((r.value - 1.0).abs() < 1e-4 || local, "{}", r.value);
            global += usize::from(!local);
            assert_eq!(r.trace.len(), r.total_iterations);
        }
        assert!(global >= 5);
    }

    #[test]
    fn square_linf_reaches_one_and_a_half() {
        let p = square(GaugeSet::linf());
        let params = SolverParams::default();
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let mut hits = 0;
        for _ in 0..10 {
            let x0: Vec<f64> = (0..4).map(|_| rng.gen_range(0.0..1.0)).collect();
            let r = solve(
                &p,
                &Matrix::from_vec(2, 2, x0).unwrap(),
                &params,
                Variant::Abdca,
            )
            .unwrap();
            assert!(r.value >= 1.5 - 1e-9);
            if (r.value - 1.5).abs() < 1e-4 {
                hits += 1;
            }
        }
        assert!(hits > 0);
    }

    #[test]
    fn dca_equals_abdca_with_zero_trials() {
        let p = square(GaugeSet::euclidean());
        let params = SolverParams::default();
        let x0 = pts(&[[0.1, 0.2], [0.7, 0.4]]);
        let report = solve(&p, &x0, &params, Variant::Dca).unwrap();

        let mut x = x0.clone();
        let mut iterates = Vec::new();
        let mut mu = params.mu0;
        while mu > params.mu_f {
            for _ in 0..params.n_max {
                let z = dca_step(&p, &x, mu, 0.0).unwrap().z;
                let d = z.sub(&x);
                let ls = armijo_search(
                    |m| p.objective_true(m).unwrap(),
                    &z,
                    &d,
                    0.0,
                    0.05,
                    0.01,
                    1e-10,
                );
                let next = z.add_scaled(ls.lambda, &d);
                let step = next.fro_dist(&x);
                x = next;
                iterates.push(step);
                if step < params.tol {
                    break;
                }
            }
            mu *= params.delta;
        }
        assert_eq!(x, report.centers);
        let steps: Vec<f64> = report.trace.iter().map(|r| r.step_fro).collect();
        assert_eq!(steps, iterates);
    }

    #[test]
    fn skip_variant_records_probes() {
        let p = triangle(2);
        let params = SolverParams {
            lambda_skip: 5,
            ..Default::default()
        };
        let x0 = pts(&[[0.1, 0.3], [0.2, 0.1]]);
        let r = solve(&p, &x0, &params, Variant::AbdcaSkip).unwrap();
        for stage in r.trace.chunk_by(|a, b| a.stage == b.stage) {
            let mut run = 0;
            for row in stage {
                if row.skipped {
                    run += 1;
                    assert!(run < params.lambda_skip);
                } else {
                    run = 0;
                }
            }
        }
    }

    #[test]
    fn non_finite_input_rejected() {
        let p = triangle(2);
        let x0 = pts(&[[f64::NAN, 0.0], [0.0, 0.0]]);
        assert!(solve(&p, &x0, &SolverParams::default(), Variant::Dca).is_err());
    }
}
