//! The modulus `tau`, the lattice `Z + Z tau`, and the centered fundamental cell.
//!
//! Every point handed to the evaluators is first reduced to the cell
//! `{ r + s tau : r, s in (-1/2, 1/2] }`, which for rectangular moduli is the
//! rectangle centered at the origin. Half-periods on the upper and right edges
//! are their own representatives.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Slack used when testing `Re tau` against 0 and 1/2.
pub const CLASSIFICATION_EPS: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TorusShape {
    Rectangular,
    Rhombus,
    General,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TorusModulus {
    tau: Complex64,
    shape: TorusShape,
}

impl TorusModulus {
    pub fn new(tau: Complex64) -> Result<Self> {
        classify(tau)
    }

    pub fn tau(&self) -> Complex64 {
        self.tau
    }

    pub fn shape(&self) -> TorusShape {
        self.shape
    }

    pub fn is_rectangular(&self) -> bool {
        self.shape == TorusShape::Rectangular
    }

    pub fn require_rectangular(&self) -> Result<()> {
        if self.is_rectangular() {
            Ok(())
        } else {
            Err(Error::RectangularRequired {
                re: self.tau.re,
                im: self.tau.im,
            })
        }
    }

    pub fn half_periods(&self) -> HalfPeriods {
        half_periods(self.tau)
    }

    /// Coordinates `(r, s)` with `z = r + s tau`.
    pub fn coords(&self, z: Complex64) -> (f64, f64) {
        let s = z.im / self.tau.im;
        (z.re - s * self.tau.re, s)
    }

    pub fn from_coords(&self, r: f64, s: f64) -> Complex64 {
        Complex64::new(r, 0.0) + self.tau * s
    }

    pub fn reduce(&self, z: Complex64) -> TorusPoint {
        let (r, s) = self.coords(z);
        let (r, s) = (wrap_half(r), wrap_half(s));
        let z = self.from_coords(r, s);
        TorusPoint {
            z,
            r,
            s,
            dist_to_lattice: self.stencil_distance(z),
        }
    }

    /// Distance from an already reduced point to the nearest lattice point.
    fn stencil_distance(&self, z: Complex64) -> f64 {
        let mut best = f64::INFINITY;
        for m in -1..=1 {
            for n in -1..=1 {
                let w = Complex64::new(m as f64, 0.0) + self.tau * n as f64;
                best = best.min((z - w).norm());
            }
        }
        best
    }

    /// Distance between two points of the torus.
    pub fn torus_distance(&self, z1: Complex64, z2: Complex64) -> f64 {
        self.reduce(z1 - z2).dist_to_lattice
    }

    /// The lattice translate of `z` closest to `target`.
    pub fn nearest_representative(&self, z: Complex64, target: Complex64) -> Complex64 {
        let d = self.reduce(z - target).z;
        let mut best = target + d;
        let mut best_dist = d.norm();
        for m in -1..=1 {
            for n in -1..=1 {
                let cand = d + Complex64::new(m as f64, 0.0) + self.tau * n as f64;
                if cand.norm() < best_dist {
                    best_dist = cand.norm();
                    best = target + cand;
                }
            }
        }
        best
    }
}

/// Maps `x` into `(-1/2, 1/2]`.
fn wrap_half(x: f64) -> f64 {
    let shifted = x - (x - 0.5).ceil();
    if shifted <= -0.5 {
        shifted + 1.0
    } else {
        shifted
    }
}

pub fn classify(tau: Complex64) -> Result<TorusModulus> {
    if !(tau.im > 0.0) || !tau.re.is_finite() || !tau.im.is_finite() {
        return Err(Error::NonPositiveImaginaryPart(tau.im));
    }
    let shape = if tau.re.abs() < CLASSIFICATION_EPS {
        TorusShape::Rectangular
    } else if (tau.re - 0.5).abs() < CLASSIFICATION_EPS {
        TorusShape::Rhombus
    } else {
        TorusShape::General
    };
    Ok(TorusModulus { tau, shape })
}

/// Reduces `z` modulo `Z + Z tau`. Callers must pass `Im tau > 0`.
pub fn reduce(z: Complex64, tau: Complex64) -> TorusPoint {
    TorusModulus {
        tau,
        shape: TorusShape::General,
    }
    .reduce(z)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HalfPeriods {
    pub w1_half: Complex64,
    pub w2_half: Complex64,
    pub w3_half: Complex64,
}

impl HalfPeriods {
    /// `k` in 1..=3.
    pub fn get(&self, k: usize) -> Complex64 {
        match k {
            1 => self.w1_half,
            2 => self.w2_half,
            3 => self.w3_half,
            _ => panic!("half-period index {k} out of range"),
        }
    }

    pub fn all(&self) -> [Complex64; 3] {
        [self.w1_half, self.w2_half, self.w3_half]
    }
}

pub fn half_periods(tau: Complex64) -> HalfPeriods {
    let w1_half = Complex64::new(0.5, 0.0);
    let w2_half = tau * 0.5;
    HalfPeriods {
        w1_half,
        w2_half,
        w3_half: w1_half + w2_half,
    }
}

/// A point of the torus in the centered cell.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TorusPoint {
    pub z: Complex64,
    pub r: f64,
    pub s: f64,
    pub dist_to_lattice: f64,
}

impl TorusPoint {
    pub fn x1(&self) -> f64 {
        self.z.re
    }

    pub fn x2(&self) -> f64 {
        self.z.im
    }
}

/// The four pieces of the boundary path of the quarter cell, traversed from
/// the origin along the real axis, up the right edge, left along the top edge
/// and back down the imaginary axis.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BoundarySegment {
    /// `(0, w1/2]`
    RealAxis,
    /// `[w1/2, w3/2]`
    RightEdge,
    /// `[w3/2, w2/2]`
    TopEdge,
    /// `[w2/2, 0)`
    ImaginaryAxis,
}

impl BoundarySegment {
    pub const ALL: [BoundarySegment; 4] = [
        BoundarySegment::RealAxis,
        BoundarySegment::RightEdge,
        BoundarySegment::TopEdge,
        BoundarySegment::ImaginaryAxis,
    ];

    pub fn endpoints(&self, tau: Complex64) -> (Complex64, Complex64) {
        let hp = half_periods(tau);
        let zero = Complex64::new(0.0, 0.0);
        match self {
            BoundarySegment::RealAxis => (zero, hp.w1_half),
            BoundarySegment::RightEdge => (hp.w1_half, hp.w3_half),
            BoundarySegment::TopEdge => (hp.w3_half, hp.w2_half),
            BoundarySegment::ImaginaryAxis => (hp.w2_half, zero),
        }
    }

    /// `t z2 + (1 - t) z1` for `t` in `[0, 1]`.
    pub fn point(&self, tau: Complex64, t: f64) -> Complex64 {
        let (z1, z2) = self.endpoints(tau);
        z2 * t + z1 * (1.0 - t)
    }
}

/// The concatenated boundary path parameterized by `u` in `[0, 4]`.
pub fn boundary_path_point(tau: Complex64, u: f64) -> (BoundarySegment, Complex64) {
    let idx = (u.floor() as isize).clamp(0, 3) as usize;
    let seg = BoundarySegment::ALL[idx];
    (seg, seg.point(tau, u - idx as f64))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn classify_examples() {
        assert_eq!(
            classify(c(0.0, 1.0)).unwrap().shape(),
            TorusShape::Rectangular
        );
        let rho = c(0.5, 3f64.sqrt() / 2.0);
        assert_eq!(classify(rho).unwrap().shape(), TorusShape::Rhombus);
        assert_eq!(classify(c(0.3, 0.9)).unwrap().shape(), TorusShape::General);
        assert!(matches!(
            classify(c(0.2, 0.0)),
            Err(Error::NonPositiveImaginaryPart(_))
        ));
        assert!(classify(c(0.2, -1.0)).is_err());
    }

    #[test]
    fn reduce_examples() {
        let tau = c(0.0, 1.0);
        let p = reduce(c(1.3, 0.2), tau);
        assert_abs_diff_eq!(p.z.re, 0.3, epsilon = 1e-14);
        assert_abs_diff_eq!(p.z.im, 0.2, epsilon = 1e-14);
        for tau in [c(0.0, 1.0), c(0.5, 1.3), c(0.3, 0.9)] {
            let w3 = half_periods(tau).w3_half;
            let p = reduce(w3, tau);
            assert_abs_diff_eq!((p.z - w3).norm(), 0.0, epsilon = 1e-14);
        }
    }

    #[test]
    fn half_period_examples() {
        let hp = half_periods(c(0.0, 2.0));
        assert_eq!(hp.w1_half, c(0.5, 0.0));
        assert_eq!(hp.w2_half, c(0.0, 1.0));
        assert_eq!(hp.w3_half, c(0.5, 1.0));
        let hp = half_periods(c(0.0, 1.0));
        assert_eq!(hp.all(), [c(0.5, 0.0), c(0.0, 0.5), c(0.5, 0.5)]);
        let hp = half_periods(c(0.37, 1.21));
        assert!((hp.w3_half - hp.w1_half - hp.w2_half).norm() < 1e-15);
    }

    #[test]
    fn distance_uses_nearest_translate() {
        let tau = c(0.0, 1.0);
        let p = reduce(c(0.45, 0.45), tau);
        assert_abs_diff_eq!(
            p.dist_to_lattice,
            (2.0 * 0.45f64 * 0.45).sqrt(),
            epsilon = 1e-14
        );
        let p = reduce(c(0.9, 0.0), tau);
        assert_abs_diff_eq!(p.dist_to_lattice, 0.1, epsilon = 1e-14);
    }

    #[test]
    fn boundary_path_runs_through_half_periods() {
        let tau = c(0.0, 1.5);
        let hp = half_periods(tau);
        assert_eq!(boundary_path_point(tau, 1.0).1, hp.w1_half);
        assert_eq!(boundary_path_point(tau, 2.0).1, hp.w3_half);
        assert_eq!(boundary_path_point(tau, 3.0).1, hp.w2_half);
        assert_eq!(boundary_path_point(tau, 4.0).1, c(0.0, 0.0));
    }
}
