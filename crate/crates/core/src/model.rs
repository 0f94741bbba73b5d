//! Problem data, objectives, the DC split and the (smoothed) derivatives used
//! by the DCA family.
//!
//! With `ρ = ρ_F` and centers `x¹..xᵏ`, the objective is
//! `f(X) = Σ_i min_ℓ ρ(xˡ − aⁱ) = g(X) − h(X)` where
//! `g = Σ_i Σ_ℓ ρ(xˡ − aⁱ)` and `h = Σ_i max_r Σ_{ℓ≠r} ρ(xˡ − aⁱ)`.
//! Smoothing replaces each term of `g` by `ρ_μ`; the convex part `G_μ` is the
//! quadratic `(1/2μ)ΣΣ‖xˡ − aⁱ‖²` and the rest moves into `H¹_μ`.
//!
//! For constraints `xˡ ∈ ⋂_j Ω_jˡ` the penalty `(τ/2)ΣΣ d(xˡ; Ω_jˡ)²` is split
//! as `(τq/2)Σ‖xˡ‖² − (τ/2)ΣΣ φ_Ω(xˡ)`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gauge::GaugeSet;
use crate::matrix::{CenterMatrix, Matrix};
use crate::sets::ConvexRegion;

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ProblemInstance {
    points: Matrix,
    k: usize,
    gauge: GaugeSet,
    /// One list per center; empty when unconstrained.
    constraints: Vec<Vec<ConvexRegion>>,
    /// `k × n`, every row equal to `Σ_i aⁱ`.
    b: Matrix,
}

/// Values of the two convex parts of `f = g − h`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DcParts {
    pub g: f64,
    pub h: f64,
}

impl ProblemInstance {
    pub fn new(points: Matrix, k: usize, gauge: GaugeSet) -> Result<Self> {
        let (m, n) = points.shape();
        if m < 2 {
            return Err(Error::InvalidInput(format!(
                "need at least 2 demand points, got {m}"
            )));
        }
        if n == 0 {
            return Err(Error::InvalidInput("demand points have dimension 0".into()));
        }
        if k < 1 || k > m {
            return Err(Error::InvalidInput(format!(
                "center count must satisfy 1 <= k <= m = {m}, got {k}"
            )));
        }
        if !points.is_finite() {
            return Err(Error::InvalidInput("demand points must be finite".into()));
        }
        let sum = points.column_sum();
        let mut b = Matrix::zeros(k, n);
        for l in 0..k {
            b.row_mut(l).copy_from_slice(&sum);
        }
        Ok(Self {
            points,
            k,
            gauge,
            constraints: Vec::new(),
            b,
        })
    }

    /// Attaches per-center constraint lists. Every center must carry the same
    /// number of regions; an all-empty list means unconstrained.
    pub fn with_constraints(mut self, constraints: Vec<Vec<ConvexRegion>>) -> Result<Self> {
        if constraints.iter().all(Vec::is_empty) {
            self.constraints = Vec::new();
            return Ok(self);
        }
        if constraints.len() != self.k {
            return Err(Error::ShapeMismatch {
                expected: format!("{} constraint lists", self.k),
                found: format!("{}", constraints.len()),
            });
        }
        let q = constraints[0].len();
        for (l, list) in constraints.iter().enumerate() {
            if list.len() != q {
                return Err(Error::InvalidInput(format!(
                    "every center needs the same number of regions: center {} has {}, center 1 has {q}",
                    l + 1,
                    list.len()
                )));
            }
            if let Some(r) = list.iter().find(|r| r.dim() != self.dim()) {
                return Err(Error::ShapeMismatch {
                    expected: format!("regions of dimension {}", self.dim()),
                    found: format!("dimension {}", r.dim()),
                });
            }
        }
        self.constraints = constraints;
        Ok(self)
    }

    pub fn points(&self) -> &Matrix {
        &self.points
    }

    pub fn num_points(&self) -> usize {
        self.points.rows()
    }

    pub fn dim(&self) -> usize {
        self.points.cols()
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn gauge(&self) -> &GaugeSet {
        &self.gauge
    }

    pub fn constraints(&self) -> &[Vec<ConvexRegion>] {
        &self.constraints
    }

    /// Regions per center.
    pub fn q(&self) -> usize {
        self.constraints.first().map_or(0, Vec::len)
    }

    pub fn is_constrained(&self) -> bool {
        self.q() > 0
    }

    pub fn b(&self) -> &Matrix {
        &self.b
    }

    pub fn check_centers(&self, x: &CenterMatrix) -> Result<()> {
        if x.shape() != (self.k, self.dim()) {
            return Err(Error::ShapeMismatch {
                expected: format!("{}x{} center matrix", self.k, self.dim()),
                found: format!("{}x{}", x.rows(), x.cols()),
            });
        }
        if !x.is_finite() {
            return Err(Error::InvalidInput(
                "center matrix has non-finite entries".into(),
            ));
        }
        Ok(())
    }

    /// `f_F(X) = Σ_i min_ℓ ρ_F(xˡ − aⁱ)`
    pub fn objective_true(&self, x: &CenterMatrix) -> Result<f64> {
        self.check_centers(x)?;
        Ok(self.objective_unchecked(x))
    }

    pub(crate) fn objective_unchecked(&self, x: &CenterMatrix) -> f64 {
        self.points
            .row_iter()
            .map(|a| {
                x.row_iter()
                    .map(|c| self.gauge.value_between(c, a))
                    .fold(f64::INFINITY, f64::min)
            })
            .sum()
    }

    /// `Σ_ℓ Σ_j d(xˡ; Ω_jˡ)²`
    pub fn penalty(&self, x: &CenterMatrix) -> f64 {
        self.constraints
            .iter()
            .enumerate()
            .flat_map(|(l, list)| {
                list.iter().map(move |r| {
                    let d = r.distance(x.row(l));
                    d * d
                })
            })
            .sum()
    }

    /// Largest distance of any center to any of its regions.
    pub fn max_violation(&self, x: &CenterMatrix) -> f64 {
        self.constraints
            .iter()
            .enumerate()
            .flat_map(|(l, list)| list.iter().map(move |r| r.distance(x.row(l))))
            .fold(0.0, f64::max)
    }

    /// `f_τ(X) = f_F(X) + (τ/2) Σ_ℓ Σ_j d(xˡ; Ω_jˡ)²`
    pub fn objective_penalized(&self, x: &CenterMatrix, tau: f64) -> Result<f64> {
        if !(tau > 0.0 && tau.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "tau must be positive, got {tau}"
            )));
        }
        self.check_centers(x)?;
        Ok(self.penalized_unchecked(x, tau))
    }

    pub(crate) fn penalized_unchecked(&self, x: &CenterMatrix, tau: f64) -> f64 {
        let f = self.objective_unchecked(x);
        if self.is_constrained() {
            f + 0.5 * tau * self.penalty(x)
        } else {
            f
        }
    }

    /// `(g, h)` of the exact DC decomposition; `g − h = f_F`.
    pub fn dc_components(&self, x: &CenterMatrix) -> Result<DcParts> {
        self.check_centers(x)?;
        let mut g = 0.0;
        let mut h = 0.0;
        let mut rho = vec![0.0; self.k];
        for a in self.points.row_iter() {
            for (l, c) in x.row_iter().enumerate() {
                rho[l] = self.gauge.value_between(c, a);
            }
            g += rho.iter().sum::<f64>();
            h += max_leave_one_out(&rho);
        }
        Ok(DcParts { g, h })
    }

    /// `H²(X) = Σ_i max_r Σ_{ℓ≠r} ρ_F(xˡ − aⁱ)`
    pub fn h2_value(&self, x: &CenterMatrix) -> f64 {
        let mut rho = vec![0.0; self.k];
        self.points
            .row_iter()
            .map(|a| {
                for (l, c) in x.row_iter().enumerate() {
                    rho[l] = self.gauge.value_between(c, a);
                }
                max_leave_one_out(&rho)
            })
            .sum()
    }

    /// `H¹_μ(X) = (μ/2) Σ_i Σ_ℓ d((xˡ − aⁱ)/μ; F°)²`
    pub fn h1_value(&self, x: &CenterMatrix, mu: f64) -> f64 {
        let mut z = vec![0.0; self.dim()];
        let mut sum = 0.0;
        for a in self.points.row_iter() {
            for c in x.row_iter() {
                for ((zj, cj), aj) in z.iter_mut().zip(c).zip(a) {
                    *zj = (cj - aj) / mu;
                }
                let d = self.gauge.polar_distance(&z);
                sum += d * d;
            }
        }
        0.5 * mu * sum
    }

    /// `G_{τ,μ}(X) = (1/2μ) ΣΣ ‖xˡ − aⁱ‖² + (τq/2) Σ ‖xˡ‖²`
    pub fn g_value(&self, x: &CenterMatrix, mu: f64, tau: f64) -> f64 {
        let mut quad = 0.0;
        for a in self.points.row_iter() {
            for c in x.row_iter() {
                quad += c.iter().zip(a).map(|(u, v)| (u - v) * (u - v)).sum::<f64>();
            }
        }
        quad / (2.0 * mu) + 0.5 * tau * self.q() as f64 * x.dot(x)
    }

    /// `H_τ(X) = (τ/2) Σ_ℓ Σ_j φ_Ω(xˡ)`
    pub fn htau_value(&self, x: &CenterMatrix, tau: f64) -> f64 {
        let s: f64 = self
            .constraints
            .iter()
            .enumerate()
            .flat_map(|(l, list)| list.iter().map(move |r| r.phi(x.row(l))))
            .sum();
        0.5 * tau * s
    }

    /// `f_μ` (τ = 0) or `f_{τ,μ}` (τ > 0).
    ///
    /// Evaluated in the cancellation-free form
    /// `Σ_i Σ_ℓ ρ_μ(xˡ − aⁱ) − H²(X) + (τ/2) ΣΣ d(xˡ; Ω)²`, which equals
    /// `G_{τ,μ} − H_{τ,μ}` exactly in real arithmetic.
    pub fn smoothed_objective(&self, x: &CenterMatrix, mu: f64, tau: f64) -> Result<f64> {
        check_mu_tau(mu, tau)?;
        self.check_centers(x)?;
        Ok(self.smoothed_unchecked(x, mu, tau))
    }

    pub(crate) fn smoothed_unchecked(&self, x: &CenterMatrix, mu: f64, tau: f64) -> f64 {
        let n = self.dim();
        let mut z = vec![0.0; n];
        let mut rho = vec![0.0; self.k];
        let mut total = 0.0;
        for a in self.points.row_iter() {
            for (l, c) in x.row_iter().enumerate() {
                for ((zj, cj), aj) in z.iter_mut().zip(c).zip(a) {
                    *zj = cj - aj;
                }
                total += self.gauge.smoothed_value(&z, mu);
                rho[l] = self.gauge.value(&z);
            }
            total -= max_leave_one_out(&rho);
        }
        if tau > 0.0 && self.is_constrained() {
            total += 0.5 * tau * self.penalty(x);
        }
        total
    }

    /// `∇G_{τ,μ}(X) = (m/μ)X − B/μ + τqX`
    pub fn grad_g(&self, x: &CenterMatrix, mu: f64, tau: f64) -> Result<Matrix> {
        check_mu_tau(mu, tau)?;
        self.check_centers(x)?;
        let m = self.num_points() as f64;
        let coef = m / mu + tau * self.q() as f64;
        let mut out = x.clone();
        out.scale(coef);
        out.add_assign(&{
            let mut nb = self.b.clone();
            nb.scale(-1.0 / mu);
            nb
        });
        Ok(out)
    }

    /// `∇G*_{τ,μ}(Y) = (B + μY)/(m + μτq)`; inverse of [`Self::grad_g`].
    pub fn grad_g_conj(&self, y: &Matrix, mu: f64, tau: f64) -> Result<CenterMatrix> {
        check_mu_tau(mu, tau)?;
        if y.shape() != self.b.shape() {
            return Err(Error::ShapeMismatch {
                expected: format!("{}x{}", self.k, self.dim()),
                found: format!("{}x{}", y.rows(), y.cols()),
            });
        }
        Ok(self.grad_g_conj_unchecked(y, mu, tau))
    }

    pub(crate) fn grad_g_conj_unchecked(&self, y: &Matrix, mu: f64, tau: f64) -> CenterMatrix {
        let denom = self.num_points() as f64 + mu * tau * self.q() as f64;
        let mut z = self.b.add_scaled(mu, y);
        z.scale(1.0 / denom);
        z
    }

    /// `∇H¹_μ(X)`: row ℓ is `Σ_i [(xˡ − aⁱ)/μ − P((xˡ − aⁱ)/μ; F°)]`.
    pub fn grad_h1(&self, x: &CenterMatrix, mu: f64) -> Result<Matrix> {
        check_mu_tau(mu, 0.0)?;
        self.check_centers(x)?;
        Ok(self.grad_h1_unchecked(x, mu))
    }

    pub(crate) fn grad_h1_unchecked(&self, x: &CenterMatrix, mu: f64) -> Matrix {
        let n = self.dim();
        let mut out = Matrix::zeros(self.k, n);
        let mut z = vec![0.0; n];
        let mut p = vec![0.0; n];
        for l in 0..self.k {
            let c = x.row(l);
            let row = out.row_mut(l);
            for a in self.points.row_iter() {
                for ((zj, cj), aj) in z.iter_mut().zip(c).zip(a) {
                    *zj = (cj - aj) / mu;
                }
                self.gauge.polar_projection_into(&z, &mut p);
                for ((r, zj), pj) in row.iter_mut().zip(&z).zip(&p) {
                    *r += zj - pj;
                }
            }
        }
        out
    }

    /// One subgradient of `H²` at `X`, `Σ_i V_i`.
    ///
    /// For each demand point the leave-one-out maximizer `ℓ*` is the nearest
    /// center (smallest index on ties); row `ℓ*` of `V_i` is zero and every
    /// other row `j` is a subgradient of `ρ_F` at `xʲ − aⁱ` (zero if equal).
    pub fn subgrad_h2(&self, x: &CenterMatrix) -> Result<Matrix> {
        self.check_centers(x)?;
        Ok(self.subgrad_h2_unchecked(x))
    }

    pub(crate) fn subgrad_h2_unchecked(&self, x: &CenterMatrix) -> Matrix {
        let n = self.dim();
        let mut out = Matrix::zeros(self.k, n);
        if self.k == 1 {
            return out;
        }
        let mut z = vec![0.0; n];
        let mut v = vec![0.0; n];
        for a in self.points.row_iter() {
            let nearest = nearest_center(&self.gauge, x, a);
            for j in (0..self.k).filter(|&j| j != nearest) {
                for ((zj, cj), aj) in z.iter_mut().zip(x.row(j)).zip(a) {
                    *zj = cj - aj;
                }
                self.gauge.subgradient_into(&z, &mut v);
                out.row_mut(j)
                    .iter_mut()
                    .zip(&v)
                    .for_each(|(o, vj)| *o += vj);
            }
        }
        out
    }

    /// `∇H_τ(X) = τU`, row ℓ being `τ Σ_j P(xˡ; Ω_jˡ)`.
    pub fn grad_htau(&self, x: &CenterMatrix, tau: f64) -> Result<Matrix> {
        check_mu_tau(1.0, tau)?;
        self.check_centers(x)?;
        Ok(self.grad_htau_unchecked(x, tau))
    }

    pub(crate) fn grad_htau_unchecked(&self, x: &CenterMatrix, tau: f64) -> Matrix {
        let n = self.dim();
        let mut out = Matrix::zeros(self.k, n);
        if tau == 0.0 {
            return out;
        }
        let mut p = vec![0.0; n];
        for (l, list) in self.constraints.iter().enumerate() {
            for region in list {
                region.project_into(x.row(l), &mut p);
                out.row_mut(l)
                    .iter_mut()
                    .zip(&p)
                    .for_each(|(o, pj)| *o += tau * pj);
            }
        }
        out
    }
}

fn check_mu_tau(mu: f64, tau: f64) -> Result<()> {
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
    Ok(())
}

/// `max_r Σ_{ℓ≠r} v_ℓ`, summed directly per `r`.
fn max_leave_one_out(v: &[f64]) -> f64 {
    if v.len() <= 1 {
        return 0.0;
    }
    (0..v.len())
        .map(|r| {
            v.iter()
                .enumerate()
                .filter(|&(l, _)| l != r)
                .map(|(_, x)| x)
                .sum::<f64>()
        })
        .fold(f64::NEG_INFINITY, f64::max)
}

/// Index of the center nearest to `a` in gauge distance; smallest on ties.
pub(crate) fn nearest_center(gauge: &GaugeSet, x: &CenterMatrix, a: &[f64]) -> usize {
    let mut best = 0;
    let mut best_val = f64::INFINITY;
    for (l, c) in x.row_iter().enumerate() {
        let v = gauge.value_between(c, a);
        if v < best_val {
            best_val = v;
            best = l;
        }
    }
    best
}
