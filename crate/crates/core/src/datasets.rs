//! Synthetic instances.

use std::f64::consts::TAU;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::matrix::Matrix;
use crate::sets::ConvexRegion;

/// Four disks of demand points around a central feasible disk.
#[derive(Debug, Clone, PartialEq)]
pub struct FourCircles {
    pub points_per_circle: usize,
    /// Distance of each data disk's center from the origin.
    pub offset: f64,
    pub circle_radius: f64,
    pub constraint_radius: f64,
}

impl Default for FourCircles {
    fn default() -> Self {
        Self {
            points_per_circle: 250,
            offset: 6.0,
            circle_radius: 2.0,
            constraint_radius: 2.5,
        }
    }
}

impl FourCircles {
    /// Data disk centers at `(±offset, 0)` and `(0, ±offset)`.
    pub fn circle_centers(&self) -> [[f64; 2]; 4] {
        let d = self.offset;
        [[d, 0.0], [0.0, d], [-d, 0.0], [0.0, -d]]
    }

    /// `4 · points_per_circle` points, uniform by area within each disk.
    pub fn points(&self, seed: u64) -> Matrix {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut data = Vec::with_capacity(8 * self.points_per_circle);
        for c in self.circle_centers() {
            for _ in 0..self.points_per_circle {
                let r = self.circle_radius * rng.gen::<f64>().sqrt();
                let t = TAU * rng.gen::<f64>();
                data.push(c[0] + r * t.cos());
                data.push(c[1] + r * t.sin());
            }
        }
        Matrix::from_vec(4 * self.points_per_circle, 2, data).expect("sizes agree")
    }

    /// The disk at the origin that every center must lie in.
    pub fn constraint(&self) -> ConvexRegion {
        ConvexRegion::ball(vec![0.0, 0.0], self.constraint_radius).expect("positive radius")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matrix::dist2;

    #[test]
    fn points_fall_inside_their_disks() {
        let circles = FourCircles::default();
        let pts = circles.points(3);
        assert_eq!(pts.shape(), (1000, 2));
        for (i, a) in pts.row_iter().enumerate() {
            let c = circles.circle_centers()[i / circles.points_per_circle];
            assert!(dist2(a, &c) <= circles.circle_radius + 1e-12);
            assert!(!circles.constraint().contains(a));
        }
        assert_eq!(circles.points(3), pts);
        assert_ne!(circles.points(4), pts);
    }
}
