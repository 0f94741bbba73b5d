//! Convex constraint regions for the penalized formulation.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matrix::{dist2, dot};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum ConvexRegion {
    Ball { center: Vec<f64>, radius: f64 },
    Box { lo: Vec<f64>, hi: Vec<f64> },
}

impl ConvexRegion {
    pub fn ball(center: Vec<f64>, radius: f64) -> Result<Self> {
        if !(radius.is_finite() && radius > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "ball radius must be finite and positive, got {radius}"
            )));
        }
        if center.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidInput("ball center must be finite".into()));
        }
        Ok(ConvexRegion::Ball { center, radius })
    }

    pub fn boxed(lo: Vec<f64>, hi: Vec<f64>) -> Result<Self> {
        if lo.len() != hi.len() {
            return Err(Error::ShapeMismatch {
                expected: format!("{} upper bounds", lo.len()),
                found: format!("{}", hi.len()),
            });
        }
        if lo
            .iter()
            .zip(&hi)
            .any(|(l, h)| !(l.is_finite() && h.is_finite() && l <= h))
        {
            return Err(Error::InvalidParameter(
                "box bounds must be finite with lo <= hi componentwise".into(),
            ));
        }
        Ok(ConvexRegion::Box { lo, hi })
    }

    pub fn dim(&self) -> usize {
        match self {
            ConvexRegion::Ball { center, .. } => center.len(),
            ConvexRegion::Box { lo, .. } => lo.len(),
        }
    }

    /// Nearest point of the region, written into `out`.
    pub fn project_into(&self, x: &[f64], out: &mut [f64]) {
        match self {
            ConvexRegion::Ball { center, radius } => {
                let d = dist2(x, center);
                if d <= *radius {
                    out.copy_from_slice(x);
                } else {
                    let t = radius / d;
                    for ((o, xi), ci) in out.iter_mut().zip(x).zip(center) {
                        *o = ci + t * (xi - ci);
                    }
                }
            }
            ConvexRegion::Box { lo, hi } => {
                for (((o, xi), l), h) in out.iter_mut().zip(x).zip(lo).zip(hi) {
                    *o = xi.clamp(*l, *h);
                }
            }
        }
    }

    pub fn project(&self, x: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; x.len()];
        self.project_into(x, &mut out);
        out
    }

    /// `d(x; Ω)`
    pub fn distance(&self, x: &[f64]) -> f64 {
        match self {
            ConvexRegion::Ball { center, radius } => (dist2(x, center) - radius).max(0.0),
            ConvexRegion::Box { lo, hi } => x
                .iter()
                .zip(lo)
                .zip(hi)
                .map(|((xi, l), h)| {
                    let e = (l - xi).max(xi - h).max(0.0);
                    e * e
                })
                .sum::<f64>()
                .sqrt(),
        }
    }

    pub fn contains(&self, x: &[f64]) -> bool {
        self.distance(x) == 0.0
    }

    /// `φ_Ω(x) = 2 sup{⟨x, w⟩ − ½‖w‖² : w ∈ Ω} = ‖x‖² − d(x; Ω)²`.
    ///
    /// Convex, with `∇(½φ_Ω)(x) = P(x; Ω)`.
    pub fn phi(&self, x: &[f64]) -> f64 {
        let d = self.distance(x);
        dot(x, x) - d * d
    }
}
