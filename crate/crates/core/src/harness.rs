//! Seeded multi-start comparison of the solver variants.

use std::collections::hash_map::DefaultHasher;
use std::hash::{Hash, Hasher};
use std::io::Write;
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::io::fmt_f64;
use crate::matrix::CenterMatrix;
use crate::model::ProblemInstance;
use crate::solver::{solve, SolverParams, Variant};

/// Share of failed runs above which a comparison is marked invalid.
pub const MAX_FAILURE_RATE: f64 = 0.05;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InitBox {
    pub lo: Vec<f64>,
    pub hi: Vec<f64>,
}

impl InitBox {
    pub fn new(lo: Vec<f64>, hi: Vec<f64>) -> Result<Self> {
        if lo.len() != hi.len() {
            return Err(Error::ShapeMismatch {
                expected: format!("{} upper bounds", lo.len()),
                found: hi.len().to_string(),
            });
        }
        if lo
            .iter()
            .zip(&hi)
            .any(|(l, h)| !(l.is_finite() && h.is_finite() && l <= h))
        {
            return Err(Error::InvalidParameter(
                "init box needs finite bounds with lo <= hi".into(),
            ));
        }
        Ok(Self { lo, hi })
    }

    /// `[lo, hi]^n`
    pub fn cube(n: usize, lo: f64, hi: f64) -> Result<Self> {
        Self::new(vec![lo; n], vec![hi; n])
    }

    pub fn bounding(p: &ProblemInstance) -> Self {
        let (lo, hi) = p
            .points()
            .bounding_box()
            .expect("instances have at least two points");
        Self { lo, hi }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CompareConfig {
    pub runs: usize,
    pub seed: u64,
    /// `None` uses the bounding box of the demand points.
    pub init_box: Option<InitBox>,
    pub variants: Vec<Variant>,
    pub params: SolverParams,
}

impl CompareConfig {
    pub fn new(runs: usize, seed: u64, params: SolverParams) -> Self {
        Self {
            runs,
            seed,
            init_box: None,
            variants: Variant::ALL.to_vec(),
            params,
        }
    }

    pub fn validate(&self, p: &ProblemInstance) -> Result<()> {
        if self.runs == 0 {
            return Err(Error::InvalidParameter("runs must be at least 1".into()));
        }
        if self.variants.is_empty() {
            return Err(Error::InvalidParameter("no variants selected".into()));
        }
        if let Some(b) = &self.init_box {
            InitBox::new(b.lo.clone(), b.hi.clone())?;
            if b.lo.len() != p.dim() {
                return Err(Error::ShapeMismatch {
                    expected: format!("init box of dimension {}", p.dim()),
                    found: b.lo.len().to_string(),
                });
            }
        }
        self.params.validate()
    }
}

/// Uniform `k × n` start drawn from `init_box`; a pure function of
/// `(seed, run_index)`.
pub fn random_init(
    p: &ProblemInstance,
    init_box: &InitBox,
    seed: u64,
    run_index: u64,
) -> CenterMatrix {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(run_index);
    let n = p.dim();
    let mut x = CenterMatrix::zeros(p.k(), n);
    for l in 0..p.k() {
        for (j, v) in x.row_mut(l).iter_mut().enumerate() {
            let (lo, hi) = (init_box.lo[j], init_box.hi[j]);
            *v = lo + (hi - lo) * rng.gen::<f64>();
        }
    }
    x
}

pub fn matrix_hash(x: &CenterMatrix) -> u64 {
    let mut h = DefaultHasher::new();
    x.shape().hash(&mut h);
    for v in x.as_slice() {
        v.to_bits().hash(&mut h);
    }
    h.finish()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VariantOutcome {
    pub variant: Variant,
    pub x0_hash: u64,
    pub iterations: usize,
    pub value: f64,
    /// Largest distance of a final center from its constraint sets.
    pub max_violation: f64,
    pub time_ns: u64,
    pub error: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunRecord {
    pub run_index: u64,
    pub x0_hash: u64,
    pub outcomes: Vec<VariantOutcome>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VariantSummary {
    pub variant: Variant,
    pub runs: usize,
    pub failures: usize,
    pub mean_iters: f64,
    pub mean_time_ns: f64,
    pub mean_value: f64,
    pub best_value: f64,
    /// DCA mean ÷ this variant's mean; `None` when DCA was not run.
    pub iter_ratio: Option<f64>,
    pub time_ratio: Option<f64>,
}

/// Accepted step lengths of one solve, in iteration order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LambdaTrace {
    pub variant: Variant,
    pub run_index: u64,
    /// `(stage, iter, lambda_trial, lambda_accepted, skipped)`
    pub steps: Vec<(usize, usize, f64, f64, bool)>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CompareReport {
    pub runs: Vec<RunRecord>,
    pub summary: Vec<VariantSummary>,
    /// Traces from run 0.
    pub lambda_traces: Vec<LambdaTrace>,
    /// False when more than 5% of any variant's runs failed.
    pub valid: bool,
}

impl CompareReport {
    pub fn summary_for(&self, variant: Variant) -> Option<&VariantSummary> {
        self.summary.iter().find(|s| s.variant == variant)
    }
}

/// Runs every variant from the same start for each run index.
pub fn compare(p: &ProblemInstance, cfg: &CompareConfig) -> Result<CompareReport> {
    cfg.validate(p)?;
    let init_box = cfg.init_box.clone().unwrap_or_else(|| InitBox::bounding(p));

    let per_run: Vec<(RunRecord, Vec<LambdaTrace>)> = (0..cfg.runs as u64)
        .into_par_iter()
        .map(|run_index| {
            let x0 = random_init(p, &init_box, cfg.seed, run_index);
            let x0_hash = matrix_hash(&x0);
            let mut traces = Vec::new();
            let outcomes = cfg
                .variants
                .iter()
                .map(|&variant| {
                    let started = Instant::now();
                    let result = solve(p, &x0, &cfg.params, variant);
                    let time_ns = started.elapsed().as_nanos() as u64;
                    match result {
                        Ok(report) => {
                            if run_index == 0 {
                                traces.push(LambdaTrace {
                                    variant,
                                    run_index,
                                    steps: report
                                        .trace
                                        .iter()
                                        .map(|r| {
                                            (
                                                r.stage,
                                                r.iter,
                                                r.lambda_trial,
                                                r.lambda_accepted,
                                                r.skipped,
                                            )
                                        })
                                        .collect(),
                                });
                            }
                            VariantOutcome {
                                variant,
                                x0_hash,
                                iterations: report.total_iterations,
                                value: report.value,
                                max_violation: p.max_violation(&report.centers),
                                time_ns,
                                error: None,
                            }
                        }
                        Err(e) => VariantOutcome {
                            variant,
                            x0_hash,
                            iterations: 0,
                            value: f64::NAN,
                            max_violation: f64::NAN,
                            time_ns,
                            error: Some(e.to_string()),
                        },
                    }
                })
                .collect();
            (
                RunRecord {
                    run_index,
                    x0_hash,
                    outcomes,
                },
                traces,
            )
        })
        .collect();

    let mut runs = Vec::with_capacity(per_run.len());
    let mut lambda_traces = Vec::new();
    for (record, traces) in per_run {
        runs.push(record);
        lambda_traces.extend(traces);
    }

    let mut summary: Vec<VariantSummary> = cfg
        .variants
        .iter()
        .map(|&variant| {
            let ok: Vec<&VariantOutcome> = runs
                .iter()
                .flat_map(|r| &r.outcomes)
                .filter(|o| o.variant == variant && o.error.is_none())
                .collect();
            let count = ok.len().max(1) as f64;
            VariantSummary {
                variant,
                runs: runs.len(),
                failures: runs.len() - ok.len(),
                mean_iters: ok.iter().map(|o| o.iterations as f64).sum::<f64>() / count,
                mean_time_ns: ok.iter().map(|o| o.time_ns as f64).sum::<f64>() / count,
                mean_value: ok.iter().map(|o| o.value).sum::<f64>() / count,
                best_value: ok.iter().map(|o| o.value).fold(f64::INFINITY, f64::min),
                iter_ratio: None,
                time_ratio: None,
            }
        })
        .collect();
    if let Some(base) = summary.iter().find(|s| s.variant == Variant::Dca).cloned() {
        for s in &mut summary {
            s.iter_ratio = Some(base.mean_iters / s.mean_iters);
            s.time_ratio = Some(base.mean_time_ns / s.mean_time_ns);
        }
    }
    let valid = summary
        .iter()
        .all(|s| s.failures as f64 <= MAX_FAILURE_RATE * s.runs as f64);
    Ok(CompareReport {
        runs,
        summary,
        lambda_traces,
        valid,
    })
}

pub const RATIO_HEADER: &str =
    "dataset,gauge,m,n,k,variant,mean_iters,mean_time_ns,iter_ratio,time_ratio";

/// One row per variant in the ratio-table layout.
pub fn write_ratio_csv<W: Write>(
    mut out: W,
    dataset: &str,
    p: &ProblemInstance,
    report: &CompareReport,
    with_header: bool,
) -> Result<()> {
    if with_header {
        writeln!(out, "{RATIO_HEADER}")?;
    }
    let opt = |v: Option<f64>| v.map(fmt_f64).unwrap_or_default();
    for s in &report.summary {
        writeln!(
            out,
            "{},{},{},{},{},{},{},{},{},{}",
            dataset,
            p.gauge().kind(),
            p.num_points(),
            p.dim(),
            p.k(),
            s.variant,
            fmt_f64(s.mean_iters),
            fmt_f64(s.mean_time_ns),
            opt(s.iter_ratio),
            opt(s.time_ratio)
        )?;
    }
    Ok(())
}
