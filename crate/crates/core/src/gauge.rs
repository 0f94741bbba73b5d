//! Minkowski gauges of scaled norm balls.
//!
//! A [`GaugeSet`] is `F = r·B` where `B` is the closed unit ball of the
//! Euclidean, ℓ1 or ℓ∞ norm. Its gauge is `ρ_F(x) = ‖x‖/r` in that norm and its
//! polar set is `F° = (1/r)·B*` with `B*` the unit ball of the dual norm.
//!
//! Adding a kind means supplying the gauge value, one subgradient, the
//! Euclidean projection onto the polar set and the two sup-norms.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matrix::{dot, norm2};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum GaugeKind {
    #[serde(rename = "l2")]
    Euclidean,
    L1,
    #[serde(rename = "linf")]
    LInf,
}

impl GaugeKind {
    pub const ALL: [GaugeKind; 3] = [GaugeKind::Euclidean, GaugeKind::L1, GaugeKind::LInf];

    /// Kind of the polar of the unit ball.
    pub fn dual(self) -> GaugeKind {
        match self {
            GaugeKind::Euclidean => GaugeKind::Euclidean,
            GaugeKind::L1 => GaugeKind::LInf,
            GaugeKind::LInf => GaugeKind::L1,
        }
    }

    fn norm(self, x: &[f64]) -> f64 {
        match self {
            GaugeKind::Euclidean => norm2(x),
            GaugeKind::L1 => x.iter().map(|v| v.abs()).sum(),
            GaugeKind::LInf => x.iter().fold(0.0, |m, v| f64::max(m, v.abs())),
        }
    }
}

impl fmt::Display for GaugeKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            GaugeKind::Euclidean => "l2",
            GaugeKind::L1 => "l1",
            GaugeKind::LInf => "linf",
        })
    }
}

impl FromStr for GaugeKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "l2" | "euclidean" => Ok(GaugeKind::Euclidean),
            "l1" | "taxicab" => Ok(GaugeKind::L1),
            "linf" | "max" => Ok(GaugeKind::LInf),
            other => Err(Error::InvalidInput(format!("unknown gauge kind `{other}`"))),
        }
    }
}

/// The compact convex set `F = radius · (unit ball of kind)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GaugeSet {
    kind: GaugeKind,
    radius: f64,
}

impl GaugeSet {
    pub fn new(kind: GaugeKind, radius: f64) -> Result<Self> {
        if !(radius.is_finite() && radius > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "gauge radius must be finite and positive, got {radius}"
            )));
        }
        Ok(Self { kind, radius })
    }

    pub fn unit(kind: GaugeKind) -> Self {
        Self { kind, radius: 1.0 }
    }

    pub fn euclidean() -> Self {
        Self::unit(GaugeKind::Euclidean)
    }

    pub fn l1() -> Self {
        Self::unit(GaugeKind::L1)
    }

    pub fn linf() -> Self {
        Self::unit(GaugeKind::LInf)
    }

    pub fn kind(&self) -> GaugeKind {
        self.kind
    }

    pub fn radius(&self) -> f64 {
        self.radius
    }

    /// The polar set `F°`, itself a scaled norm ball.
    pub fn polar(&self) -> GaugeSet {
        GaugeSet {
            kind: self.kind.dual(),
            radius: 1.0 / self.radius,
        }
    }

    /// `ρ_F(x)`. Hot-path variant without input validation.
    #[inline]
    pub fn value(&self, x: &[f64]) -> f64 {
        self.kind.norm(x) / self.radius
    }

    /// `ρ_F(x)`, rejecting non-finite input.
    pub fn try_value(&self, x: &[f64]) -> Result<f64> {
        ensure_finite(x)?;
        Ok(self.value(x))
    }

    /// `ρ_F(x − a)` without allocating.
    #[inline]
    pub fn value_between(&self, x: &[f64], a: &[f64]) -> f64 {
        let norm = match self.kind {
            GaugeKind::Euclidean => x
                .iter()
                .zip(a)
                .map(|(u, v)| (u - v) * (u - v))
                .sum::<f64>()
                .sqrt(),
            GaugeKind::L1 => x.iter().zip(a).map(|(u, v)| (u - v).abs()).sum(),
            GaugeKind::LInf => x
                .iter()
                .zip(a)
                .fold(0.0, |m, (u, v)| f64::max(m, (u - v).abs())),
        };
        norm / self.radius
    }

    /// Gauge of the polar set, `ρ_{F°}(v)`; `v ∈ F°` iff this is at most 1.
    pub fn polar_value(&self, v: &[f64]) -> f64 {
        self.kind.dual().norm(v) * self.radius
    }

    /// Writes one element of `∂ρ_F(x)` into `out`.
    ///
    /// Ties are broken deterministically: the zero vector at `x = 0`, a zero
    /// coordinate for ℓ1 where `x_j = 0`, and all weight on the smallest index
    /// of maximal `|x_j|` for ℓ∞.
    pub fn subgradient_into(&self, x: &[f64], out: &mut [f64]) {
        debug_assert_eq!(x.len(), out.len());
        out.iter_mut().for_each(|v| *v = 0.0);
        let inv_r = 1.0 / self.radius;
        match self.kind {
            GaugeKind::Euclidean => {
                let nrm = norm2(x);
                if nrm > 0.0 {
                    let s = inv_r / nrm;
                    out.iter_mut().zip(x).for_each(|(o, v)| *o = v * s);
                }
            }
            GaugeKind::L1 => {
                for (o, v) in out.iter_mut().zip(x) {
                    if *v > 0.0 {
                        *o = inv_r;
                    } else if *v < 0.0 {
                        *o = -inv_r;
                    }
                }
            }
            GaugeKind::LInf => {
                let mut best = 0usize;
                let mut best_abs = 0.0;
                for (j, v) in x.iter().enumerate() {
                    if v.abs() > best_abs {
                        best_abs = v.abs();
                        best = j;
                    }
                }
                if best_abs > 0.0 {
                    out[best] = inv_r * x[best].signum();
                }
            }
        }
    }

    pub fn subgradient(&self, x: &[f64]) -> Result<Vec<f64>> {
        ensure_finite(x)?;
        let mut out = vec![0.0; x.len()];
        self.subgradient_into(x, &mut out);
        Ok(out)
    }

    /// Euclidean projection of `y` onto `F°`, written into `out`.
    pub fn polar_projection_into(&self, y: &[f64], out: &mut [f64]) {
        debug_assert_eq!(y.len(), out.len());
        let s = 1.0 / self.radius;
        match self.kind {
            // polar: Euclidean ball of radius 1/r
            GaugeKind::Euclidean => {
                let nrm = norm2(y);
                let t = if nrm > s { s / nrm } else { 1.0 };
                out.iter_mut().zip(y).for_each(|(o, v)| *o = v * t);
            }
            // polar: ℓ∞ ball (box) of radius 1/r
            GaugeKind::L1 => {
                out.iter_mut().zip(y).for_each(|(o, v)| *o = v.clamp(-s, s));
            }
            // polar: ℓ1 ball of radius 1/r
            GaugeKind::LInf => project_l1_ball(y, s, out),
        }
    }

    pub fn polar_projection(&self, y: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; y.len()];
        self.polar_projection_into(y, &mut out);
        out
    }

    /// `d(y; F°)`
    pub fn polar_distance(&self, y: &[f64]) -> f64 {
        let p = self.polar_projection(y);
        crate::matrix::dist2(y, &p)
    }

    /// `(‖F‖, ‖F°‖)`, the largest Euclidean norms attained on `F` and `F°` in ℝⁿ.
    pub fn norms(&self, n: usize) -> (f64, f64) {
        let sqrt_n = (n as f64).sqrt();
        let r = self.radius;
        match self.kind {
            GaugeKind::Euclidean => (r, 1.0 / r),
            GaugeKind::L1 => (r, sqrt_n / r),
            GaugeKind::LInf => (r * sqrt_n, 1.0 / r),
        }
    }

    /// Nesterov smoothing of the gauge,
    /// `ρ_μ(z) = ‖z‖²/(2μ) − (μ/2)·d(z/μ; F°)² = max_{u∈F°} ⟨u, z⟩ − (μ/2)‖u‖²`.
    pub fn smoothed_value(&self, z: &[f64], mu: f64) -> f64 {
        let scaled: Vec<f64> = z.iter().map(|v| v / mu).collect();
        let mut proj = vec![0.0; z.len()];
        self.polar_projection_into(&scaled, &mut proj);
        // the max_u form is better conditioned than the difference of squares
        dot(&proj, z) - 0.5 * mu * dot(&proj, &proj)
    }
}

impl fmt::Display for GaugeSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.radius == 1.0 {
            write!(f, "{}", self.kind)
        } else {
            write!(f, "{}(r={})", self.kind, self.radius)
        }
    }
}

fn ensure_finite(x: &[f64]) -> Result<()> {
    if x.iter().all(|v| v.is_finite()) {
        Ok(())
    } else {
        Err(Error::InvalidInput(
            "vector contains non-finite entries".into(),
        ))
    }
}

/// Projection onto `{x : ‖x‖₁ ≤ s}` by the sort-based simplex scheme.
pub(crate) fn project_l1_ball(y: &[f64], s: f64, out: &mut [f64]) {
    let l1: f64 = y.iter().map(|v| v.abs()).sum();
    if l1 <= s {
        out.copy_from_slice(y);
        return;
    }
    let mut u: Vec<f64> = y.iter().map(|v| v.abs()).collect();
    u.sort_unstable_by(|a, b| b.total_cmp(a));
    let mut cumsum = 0.0;
    let mut theta = 0.0;
    for (j, uj) in u.iter().enumerate() {
        cumsum += uj;
        let t = (cumsum - s) / (j + 1) as f64;
        if uj - t > 0.0 {
            theta = t;
        } else {
            break;
        }
    }
    for (o, v) in out.iter_mut().zip(y) {
        *o = v.signum() * (v.abs() - theta).max(0.0);
    }
}
