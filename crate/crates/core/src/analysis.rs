//! Structure of candidate solutions: natural clustering, level index sets,
//! the local-optimality certificate, a single-source solver and an
//! exhaustive global oracle for small instances.
//!
//! Point and center indices are 0-based throughout.

use std::collections::HashMap;

use minilp::{ComparisonOp, OptimizationDirection, Problem};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gauge::{GaugeKind, GaugeSet};
use crate::matrix::{dist2, CenterMatrix, Matrix};
use crate::model::ProblemInstance;

/// Largest `k^m` the oracle accepts.
pub const ORACLE_LIMIT: f64 = 1e6;
const SINGLE_SOURCE_MAX_ITER: usize = 100_000;
/// Top-two gauge distances closer than this are flagged as ambiguous.
const AMBIGUITY_BAND: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Clustering {
    /// `A^ℓ`: disjoint, covering, earlier centers win ties.
    pub clusters: Vec<Vec<usize>>,
    /// `A[x^ℓ]`: points for which `x^ℓ` is a nearest center.
    pub attraction: Vec<Vec<usize>>,
    /// `L_i`: centers whose attraction set contains point `i`.
    pub level_sets: Vec<Vec<usize>>,
    /// Points whose two smallest center distances differ but by less than
    /// the ambiguity band.
    pub ambiguous: Vec<usize>,
}

fn center_distances(p: &ProblemInstance, x: &CenterMatrix, a: &[f64], out: &mut [f64]) {
    for (o, c) in out.iter_mut().zip(x.row_iter()) {
        *o = p.gauge().value_between(c, a);
    }
}

pub fn natural_clustering(p: &ProblemInstance, x: &CenterMatrix) -> Result<Clustering> {
    p.check_centers(x)?;
    let k = p.k();
    let mut attraction = vec![Vec::new(); k];
    let mut clusters = vec![Vec::new(); k];
    let mut level_sets = Vec::with_capacity(p.num_points());
    let mut ambiguous = Vec::new();
    let mut rho = vec![0.0; k];
    for (i, a) in p.points().row_iter().enumerate() {
        center_distances(p, x, a, &mut rho);
        let best = rho.iter().copied().fold(f64::INFINITY, f64::min);
        let level: Vec<usize> = (0..k).filter(|&l| rho[l] == best).collect();
        for &l in &level {
            attraction[l].push(i);
        }
        clusters[level[0]].push(i);
        let runner_up = rho
            .iter()
            .copied()
            .filter(|&v| v > best)
            .fold(f64::INFINITY, f64::min);
        if runner_up - best < AMBIGUITY_BAND {
            ambiguous.push(i);
        }
        level_sets.push(level);
    }
    Ok(Clustering {
        clusters,
        attraction,
        level_sets,
        ambiguous,
    })
}

/// `L_i` via the maximizers of `h_{i,ℓ}(X) = Σ_{r≠ℓ} ρ_F(x^r − a^i)`.
pub fn level_sets_by_h(p: &ProblemInstance, x: &CenterMatrix) -> Result<Vec<Vec<usize>>> {
    p.check_centers(x)?;
    let k = p.k();
    let mut rho = vec![0.0; k];
    let mut h = vec![0.0; k];
    Ok(p.points()
        .row_iter()
        .map(|a| {
            center_distances(p, x, a, &mut rho);
            for (l, hl) in h.iter_mut().enumerate() {
                *hl = (0..k).filter(|&r| r != l).map(|r| rho[r]).sum();
            }
            let top = h.iter().copied().fold(f64::NEG_INFINITY, f64::max);
            (0..k).filter(|&l| h[l] == top).collect()
        })
        .collect())
}

/// `L_i` via attraction membership.
pub fn level_sets_by_attraction(p: &ProblemInstance, x: &CenterMatrix) -> Result<Vec<Vec<usize>>> {
    Ok(natural_clustering(p, x)?.level_sets)
}

/// Both routes to `L_i`; `InvalidInput` if they disagree.
pub fn level_index_sets(p: &ProblemInstance, x: &CenterMatrix) -> Result<Vec<Vec<usize>>> {
    let by_h = level_sets_by_h(p, x)?;
    let by_attraction = level_sets_by_attraction(p, x)?;
    if by_h != by_attraction {
        let i = by_h
            .iter()
            .zip(&by_attraction)
            .position(|(a, b)| a != b)
            .unwrap_or(0);
        return Err(Error::InvalidInput(format!(
            "level sets disagree at point {i}: {:?} vs {:?}",
            by_h[i], by_attraction[i]
        )));
    }
    Ok(by_h)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SingleSource {
    pub x: Vec<f64>,
    pub value: f64,
    /// Certified lower bound on the optimal value.
    pub lower_bound: f64,
    pub iterations: usize,
}

/// Minimizes `Σ ρ_F(x − a)` over the given points.
///
/// ℓ1 and planar ℓ∞ are solved exactly through medians, ℓ∞ in higher
/// dimension as a linear program, and ℓ2 by Weiszfeld iterations with an
/// anchor test at data points until a dual bound closes the gap to
/// `tol · max(1, value)`.
pub fn single_source_solve(points: &[&[f64]], gauge: &GaugeSet, tol: f64) -> Result<SingleSource> {
    let Some(first) = points.first() else {
        return Err(Error::InvalidInput(
            "single-source problem needs at least one point".into(),
        ));
    };
    let n = first.len();
    if points.iter().any(|a| a.len() != n) {
        return Err(Error::ShapeMismatch {
            expected: format!("points of dimension {n}"),
            found: "ragged point set".into(),
        });
    }
    if tol.is_nan() || tol <= 0.0 {
        return Err(Error::InvalidParameter(format!(
            "tol must be positive, got {tol}"
        )));
    }
    let value_at = |x: &[f64]| {
        points
            .iter()
            .map(|a| gauge.value_between(x, a))
            .sum::<f64>()
    };
    let exact = |x: Vec<f64>| {
        let value = value_at(&x);
        SingleSource {
            x,
            value,
            lower_bound: value,
            iterations: 0,
        }
    };
    match gauge.kind() {
        GaugeKind::L1 => Ok(exact(
            (0..n)
                .map(|j| median(points.iter().map(|a| a[j])))
                .collect(),
        )),
        GaugeKind::LInf if n == 1 => Ok(exact(vec![median(points.iter().map(|a| a[0]))])),
        GaugeKind::LInf if n == 2 => {
            let u = median(points.iter().map(|a| a[0] + a[1]));
            let v = median(points.iter().map(|a| a[0] - a[1]));
            Ok(exact(vec![0.5 * (u + v), 0.5 * (u - v)]))
        }
        GaugeKind::LInf => linf_by_lp(points, gauge).map(exact),
        GaugeKind::Euclidean => weiszfeld(points, gauge, tol),
    }
}

/// Midpoint of the middle order statistics.
fn median(values: impl Iterator<Item = f64>) -> f64 {
    let mut v: Vec<f64> = values.collect();
    v.sort_by(f64::total_cmp);
    let m = v.len();
    if m % 2 == 1 {
        v[m / 2]
    } else {
        0.5 * (v[m / 2 - 1] + v[m / 2])
    }
}

fn linf_by_lp(points: &[&[f64]], gauge: &GaugeSet) -> Result<Vec<f64>> {
    let n = points[0].len();
    let mut lp = Problem::new(OptimizationDirection::Minimize);
    let free = (f64::NEG_INFINITY, f64::INFINITY);
    let x: Vec<_> = (0..n).map(|_| lp.add_var(0.0, free)).collect();
    for a in points {
        let t = lp.add_var(1.0 / gauge.radius(), (0.0, f64::INFINITY));
        for (j, &xj) in x.iter().enumerate() {
            lp.add_constraint([(t, 1.0), (xj, -1.0)], ComparisonOp::Ge, -a[j]);
            lp.add_constraint([(t, 1.0), (xj, 1.0)], ComparisonOp::Ge, a[j]);
        }
    }
    let sol = lp
        .solve()
        .map_err(|e| Error::InvalidInput(format!("linear program failed: {e}")))?;
    Ok(x.iter().map(|&v| *sol.var_value(v)).collect())
}

/// Lower bound `Σ⟨u_i, x − a_i⟩` from subgradients `u_i ∈ F°` balanced to
/// sum to zero. Points within `eps` of `x` share the residual force.
fn euclidean_dual_bound(points: &[&[f64]], x: &[f64], gauge: &GaugeSet, eps: f64) -> f64 {
    let n = x.len();
    let m = points.len();
    let mut u = vec![vec![0.0; n]; m];
    let mut coincident = Vec::new();
    let mut force = vec![0.0; n];
    for (i, a) in points.iter().enumerate() {
        let d = dist2(x, a);
        if d <= eps {
            coincident.push(i);
        } else {
            for j in 0..n {
                u[i][j] = (x[j] - a[j]) / d;
                force[j] += u[i][j];
            }
        }
    }
    if !coincident.is_empty() {
        let eta = coincident.len() as f64;
        let fnorm = crate::matrix::norm2(&force);
        let scale = if fnorm <= eta { 1.0 / eta } else { 1.0 / fnorm };
        for &i in &coincident {
            for j in 0..n {
                u[i][j] = -force[j] * scale;
            }
        }
    }
    let mut mean = vec![0.0; n];
    for ui in &u {
        mean.iter_mut()
            .zip(ui)
            .for_each(|(s, v)| *s += v / m as f64);
    }
    let mut worst: f64 = 1.0;
    for ui in &mut u {
        ui.iter_mut().zip(&mean).for_each(|(v, s)| *v -= s);
        worst = worst.max(crate::matrix::norm2(ui));
    }
    let bound: f64 = u
        .iter()
        .zip(points)
        .map(|(ui, a)| {
            ui.iter()
                .zip(x.iter().zip(*a))
                .map(|(v, (xj, aj))| v * (xj - aj))
                .sum::<f64>()
        })
        .sum();
    bound / worst / gauge.radius()
}

fn weiszfeld(points: &[&[f64]], gauge: &GaugeSet, tol: f64) -> Result<SingleSource> {
    let n = points[0].len();
    let m = points.len() as f64;
    let value_at = |x: &[f64]| {
        points
            .iter()
            .map(|a| gauge.value_between(x, a))
            .sum::<f64>()
    };
    let scale = 1.0
        + points
            .iter()
            .flat_map(|a| a.iter())
            .fold(0.0f64, |s, v| s.max(v.abs()));
    let eps = 1e-14 * scale;

    let certify = |x: &[f64], iterations: usize| -> Option<SingleSource> {
        let value = value_at(x);
        let lower_bound = euclidean_dual_bound(points, x, gauge, eps);
        (value - lower_bound <= tol * value.max(1.0)).then(|| SingleSource {
            x: x.to_vec(),
            value,
            lower_bound,
            iterations,
        })
    };
    let nearest_point = |x: &[f64]| -> Vec<f64> {
        points
            .iter()
            .min_by(|a, b| dist2(x, a).total_cmp(&dist2(x, b)))
            .map(|a| a.to_vec())
            .unwrap_or_default()
    };

    let mut x: Vec<f64> = (0..n)
        .map(|j| points.iter().map(|a| a[j]).sum::<f64>() / m)
        .collect();
    let mut best = (value_at(&x), x.clone());
    let mut num = vec![0.0; n];
    for it in 0..SINGLE_SOURCE_MAX_ITER {
        if let Some(done) = certify(&x, it) {
            return Ok(done);
        }
        if it % 50 == 0 {
            if let Some(done) = certify(&nearest_point(&x), it) {
                return Ok(done);
            }
        }
        num.iter_mut().for_each(|v| *v = 0.0);
        let mut den = 0.0;
        let mut eta = 0.0;
        let mut force = vec![0.0; n];
        for a in points {
            let d = dist2(&x, a);
            if d <= eps {
                eta += 1.0;
                continue;
            }
            for j in 0..n {
                num[j] += a[j] / d;
                force[j] += (a[j] - x[j]) / d;
            }
            den += 1.0 / d;
        }
        if den == 0.0 {
            // every point coincides with x
            break;
        }
        let t: Vec<f64> = num.iter().map(|v| v / den).collect();
        if eta == 0.0 {
            x = t;
        } else {
            let r = crate::matrix::norm2(&force);
            if r <= eta {
                break;
            }
            let w = eta / r;
            x = t
                .iter()
                .zip(&x)
                .map(|(tj, xj)| (1.0 - w) * tj + w * xj)
                .collect();
        }
        let v = value_at(&x);
        if v < best.0 {
            best = (v, x.clone());
        }
    }
    if let Some(done) = certify(&best.1, SINGLE_SOURCE_MAX_ITER) {
        return Ok(done);
    }
    let gap = best.0 - euclidean_dual_bound(points, &best.1, gauge, eps);
    Err(Error::SingleSourceNotConverged {
        tol,
        iterations: SINGLE_SOURCE_MAX_ITER,
        gap,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CertificateStatus {
    Local,
    NotLocal,
    /// Some `L_i` has several elements, so the criterion does not apply.
    Inconclusive,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Certificate {
    pub status: CertificateStatus,
    pub is_singleton: Vec<bool>,
    /// `φ^ℓ_F(x^ℓ) − min φ^ℓ_F` on `A[x^ℓ]`; `None` for an empty attraction set.
    pub per_center_residual: Vec<Option<f64>>,
    pub value: f64,
    pub tol: f64,
    pub ambiguous: Vec<usize>,
}

impl Certificate {
    pub fn is_local(&self) -> bool {
        self.status == CertificateStatus::Local
    }
}

/// Tests whether every center optimally serves its attraction set, given
/// that every demand point has a unique nearest center.
pub fn local_certificate(p: &ProblemInstance, x: &CenterMatrix, tol: f64) -> Result<Certificate> {
    if tol.is_nan() || tol <= 0.0 {
        return Err(Error::InvalidParameter(format!(
            "tol must be positive, got {tol}"
        )));
    }
    let clustering = natural_clustering(p, x)?;
    let is_singleton: Vec<bool> = clustering.level_sets.iter().map(|l| l.len() == 1).collect();
    let mut within = true;
    let mut per_center_residual = Vec::with_capacity(p.k());
    for (l, set) in clustering.attraction.iter().enumerate() {
        if set.is_empty() {
            per_center_residual.push(None);
            continue;
        }
        let pts: Vec<&[f64]> = set.iter().map(|&i| p.points().row(i)).collect();
        let phi: f64 = pts
            .iter()
            .map(|a| p.gauge().value_between(x.row(l), a))
            .sum();
        let best = single_source_solve(&pts, p.gauge(), tol * 1e-2)?;
        let residual = phi - best.lower_bound.min(best.value);
        if residual > tol * phi.max(1.0) {
            within = false;
        }
        per_center_residual.push(Some(residual));
    }
    let status = if !is_singleton.iter().all(|&s| s) {
        CertificateStatus::Inconclusive
    } else if within {
        CertificateStatus::Local
    } else {
        CertificateStatus::NotLocal
    };
    Ok(Certificate {
        status,
        is_singleton,
        per_center_residual,
        value: p.objective_unchecked(x),
        tol,
        ambiguous: clustering.ambiguous,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GlobalSolution {
    pub centers: CenterMatrix,
    /// `f_F` at `centers`.
    pub value: f64,
    /// Certified lower bound on the global optimum.
    pub lower_bound: f64,
    /// The optimal partition, as point index lists.
    pub partition: Vec<Vec<usize>>,
    pub partitions_checked: usize,
}

/// Exhaustive search over all partitions of the points into exactly `k`
/// nonempty clusters, each served by its single-source optimum.
pub fn brute_force_global(p: &ProblemInstance, tol: f64) -> Result<GlobalSolution> {
    let (m, k) = (p.num_points(), p.k());
    let combinations = (k as f64).powi(m as i32);
    if combinations > ORACLE_LIMIT || m > 63 {
        return Err(Error::SizeGuard {
            k,
            m,
            limit: ORACLE_LIMIT,
        });
    }

    let mut partitions: Vec<Vec<u64>> = Vec::new();
    for_each_partition(m, k, |labels| {
        let mut masks = vec![0u64; k];
        for (i, &b) in labels.iter().enumerate() {
            masks[b] |= 1 << i;
        }
        partitions.push(masks);
    });
    let mut masks: Vec<u64> = partitions.iter().flatten().copied().collect();
    masks.sort_unstable();
    masks.dedup();

    let solved: Vec<(u64, SingleSource)> = masks
        .par_iter()
        .map(|&mask| {
            let pts: Vec<&[f64]> = (0..m)
                .filter(|i| mask >> i & 1 == 1)
                .map(|i| p.points().row(i))
                .collect();
            single_source_solve(&pts, p.gauge(), tol).map(|s| (mask, s))
        })
        .collect::<Result<_>>()?;
    let table: HashMap<u64, SingleSource> = solved.into_iter().collect();

    let cost = |masks: &[u64]| masks.iter().map(|b| table[b].value).sum::<f64>();
    let bound = |masks: &[u64]| masks.iter().map(|b| table[b].lower_bound).sum::<f64>();
    let best = partitions
        .iter()
        .min_by(|a, b| cost(a).total_cmp(&cost(b)))
        .expect("k <= m guarantees at least one partition");
    let lower_bound = partitions
        .iter()
        .map(|q| bound(q))
        .fold(f64::INFINITY, f64::min);

    let rows: Vec<Vec<f64>> = best.iter().map(|b| table[b].x.clone()).collect();
    let centers = Matrix::from_rows(&rows)?;
    let partition = best
        .iter()
        .map(|b| (0..m).filter(|i| b >> i & 1 == 1).collect())
        .collect();
    Ok(GlobalSolution {
        value: p.objective_unchecked(&centers),
        centers,
        lower_bound,
        partition,
        partitions_checked: partitions.len(),
    })
}

/// Calls `f` with the block labels of every partition of `0..m` into
/// exactly `k` nonempty blocks (restricted growth strings).
fn for_each_partition(m: usize, k: usize, mut f: impl FnMut(&[usize])) {
    fn rec(labels: &mut Vec<usize>, used: usize, m: usize, k: usize, f: &mut impl FnMut(&[usize])) {
        let i = labels.len();
        if i == m {
            if used == k {
                f(labels);
            }
            return;
        }
        // not enough points left to open the remaining blocks
        if k - used > m - i {
            return;
        }
        for b in 0..used.min(k) {
            labels.push(b);
            rec(labels, used, m, k, f);
            labels.pop();
        }
        if used < k {
            labels.push(used);
            rec(labels, used + 1, m, k, f);
            labels.pop();
        }
    }
    rec(&mut Vec::with_capacity(m), 0, m, k, &mut f);
}
