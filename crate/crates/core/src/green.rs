//! Derivatives of the Green function `G(z | tau)` of `-Δ` on the torus.
//!
//! Only derivatives are computed: the additive constant of `G` never enters.
//! With `z = x1 + i x2 = r + s tau`,
//!
//! ```text
//! -4 pi G_z(z) = zeta(z) - eta1 z + 2 pi i Im z / Im tau = zeta(z) - r eta1 - s eta2
//! 2 pi G_x1x1  = Re(eta1 + wp(z))
//! 2 pi G_x1x2  = -Im(eta1 + wp(z))
//! 2 pi G_x2x2  = 2 pi / Im tau - Re(eta1 + wp(z))
//! ```
//!
//! and the Wirtinger convention `G_z = (G_x1 - i G_x2) / 2`.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::elliptic::Weierstrass;
use crate::error::Result;
use crate::lattice::TorusPoint;
use crate::par;

const I: Complex64 = Complex64 { re: 0.0, im: 1.0 };

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GreenDerivatives {
    pub gz: Complex64,
    pub gx1: f64,
    pub gx2: f64,
    pub gx1x1: f64,
    pub gx1x2: f64,
    pub gx2x2: f64,
}

impl GreenDerivatives {
    pub fn trace(&self) -> f64 {
        self.gx1x1 + self.gx2x2
    }
}

/// `G_z` from the first closed form, on the reduced representative.
pub fn green_dz(w: &Weierstrass, z: Complex64) -> Result<Complex64> {
    let p = w.reduce(z);
    let zeta = w.zeta(p.z)?;
    Ok(gz_from_zeta(w, p.z, zeta))
}

pub(crate) fn gz_from_zeta(w: &Weierstrass, z: Complex64, zeta: Complex64) -> Complex64 {
    let d = w.data();
    let tau = w.tau();
    let minus_4pi_gz = zeta - d.eta1 * z + I * (2.0 * PI * z.im / tau.im);
    minus_4pi_gz / (-4.0 * PI)
}

/// `G_z` from the lattice-coordinate form `zeta(z) - r eta1 - s eta2`.
pub fn green_dz_lattice_form(w: &Weierstrass, z: Complex64) -> Result<Complex64> {
    let d = w.data();
    let zeta = w.zeta(z)?;
    let (r, s) = w.modulus().coords(z);
    Ok((zeta - d.eta1 * r - d.eta2 * s) / (-4.0 * PI))
}

pub fn green_derivatives(w: &Weierstrass, z: Complex64) -> Result<GreenDerivatives> {
    let p = w.reduce(z);
    let t = w.eval(p.z)?;
    let gz = gz_from_zeta(w, p.z, t.zeta);
    Ok(assemble(w, gz, t.wp))
}

pub(crate) fn assemble(w: &Weierstrass, gz: Complex64, wp: Complex64) -> GreenDerivatives {
    let s = w.data().eta1 + wp;
    let two_pi = 2.0 * PI;
    GreenDerivatives {
        gz,
        gx1: 2.0 * gz.re,
        gx2: -2.0 * gz.im,
        gx1x1: s.re / two_pi,
        gx1x2: -s.im / two_pi,
        gx2x2: 1.0 / w.tau().im - s.re / two_pi,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SignCondition {
    /// `G_x1 < 0` for `x1 in (0, 1/2)`.
    Gx1NegativeRight,
    /// `G_x1 > 0` for `x1 in (-1/2, 0)`.
    Gx1PositiveLeft,
    /// `G_x2 < 0` for `x2 in (0, |tau|/2)`.
    Gx2NegativeUpper,
    /// `G_x2 > 0` for `x2 in (-|tau|/2, 0)`.
    Gx2PositiveLower,
}

impl SignCondition {
    pub const ALL: [SignCondition; 4] = [
        SignCondition::Gx1NegativeRight,
        SignCondition::Gx1PositiveLeft,
        SignCondition::Gx2NegativeUpper,
        SignCondition::Gx2PositiveLower,
    ];
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SignViolation {
    pub condition: SignCondition,
    pub z: Complex64,
    pub value: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SignRegionReport {
    pub samples_per_condition: usize,
    pub margin: f64,
    pub checked: usize,
    pub violations: Vec<SignViolation>,
}

/// Distance kept from the symmetry lines `x_j in {0, +-half side}`, where the
/// derivatives vanish and the strict inequalities degenerate.
pub const SIGN_MARGIN: f64 = 1e-3;

/// Samples each open half-cell on a low-discrepancy sequence and checks the
/// strict sign of `G_x1` or `G_x2` there. Rectangular moduli only.
pub fn sign_region_check(w: &Weierstrass, n_samples: usize) -> Result<SignRegionReport> {
    w.modulus().require_rectangular()?;
    let height = w.tau().im;
    let guard = w.config().pole_guard;
    let records = par::map_range(SignCondition::ALL.len() * n_samples, |idx| {
        let cond = SignCondition::ALL[idx / n_samples];
        let (u, v) = halton2(idx % n_samples + 1);
        let along = SIGN_MARGIN + u * (0.5 - 2.0 * SIGN_MARGIN);
        let across = -0.5 + SIGN_MARGIN + v * (1.0 - 2.0 * SIGN_MARGIN);
        let z = match cond {
            SignCondition::Gx1NegativeRight => Complex64::new(along, across * height),
            SignCondition::Gx1PositiveLeft => Complex64::new(-along, across * height),
            SignCondition::Gx2NegativeUpper => Complex64::new(across, along * height),
            SignCondition::Gx2PositiveLower => Complex64::new(across, -along * height),
        };
        if z.norm() <= guard {
            return None;
        }
        let g = green_derivatives(w, z).ok()?;
        let (value, ok) = match cond {
            SignCondition::Gx1NegativeRight => (g.gx1, g.gx1 < 0.0),
            SignCondition::Gx1PositiveLeft => (g.gx1, g.gx1 > 0.0),
            SignCondition::Gx2NegativeUpper => (g.gx2, g.gx2 < 0.0),
            SignCondition::Gx2PositiveLower => (g.gx2, g.gx2 > 0.0),
        };
        Some((cond, z, value, ok))
    });
    let checked = records.iter().flatten().count();
    let violations = records
        .into_iter()
        .flatten()
        .filter(|r| !r.3)
        .map(|(condition, z, value, _)| SignViolation {
            condition,
            z,
            value,
        })
        .collect();
    Ok(SignRegionReport {
        samples_per_condition: n_samples,
        margin: SIGN_MARGIN,
        checked,
        violations,
    })
}

/// Point `i` of the 2-D Halton sequence (bases 2 and 3).
pub fn halton2(i: usize) -> (f64, f64) {
    (radical_inverse(i, 2), radical_inverse(i, 3))
}

fn radical_inverse(mut i: usize, base: usize) -> f64 {
    let inv = 1.0 / base as f64;
    let mut f = inv;
    let mut r = 0.0;
    while i > 0 {
        r += (i % base) as f64 * f;
        i /= base;
        f *= inv;
    }
    r
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CriticalPointSearch {
    pub points: Vec<TorusPoint>,
    pub seeds: usize,
    pub converged: usize,
    pub failed: usize,
}

/// Seed spacing of the critical-point sweep.
pub const CRITICAL_GRID: usize = 200;
pub const CRITICAL_DEDUP: f64 = 1e-6;
pub const CRITICAL_TOL: f64 = 1e-10;

/// Zeros of `G_z` found by Newton on `(G_x1, G_x2)` from a uniform seed grid.
/// The Jacobian is the closed-form Hessian.
pub fn green_critical_points(w: &Weierstrass) -> CriticalPointSearch {
    green_critical_points_with(w, CRITICAL_GRID)
}

pub fn green_critical_points_with(w: &Weierstrass, grid: usize) -> CriticalPointSearch {
    let m = *w.modulus();
    let guard = w.config().pole_guard;
    let results = par::map_range(grid * grid, |idx| {
        let (i, j) = (idx / grid, idx % grid);
        let r = -0.5 + (i as f64 + 0.5) / grid as f64;
        let s = -0.5 + (j as f64 + 0.5) / grid as f64;
        let z0 = m.from_coords(r, s);
        if m.reduce(z0).dist_to_lattice <= guard.max(1e-2) {
            return None;
        }
        Some(newton_critical(w, z0))
    });
    let seeds = results.iter().flatten().count();
    let mut found: Vec<TorusPoint> = Vec::new();
    let mut failed = 0;
    let mut converged = 0;
    for r in results.into_iter().flatten() {
        match r {
            Some(p) => {
                converged += 1;
                if !found
                    .iter()
                    .any(|q| m.torus_distance(q.z, p.z) < CRITICAL_DEDUP)
                {
                    found.push(p);
                }
            }
            None => failed += 1,
        }
    }
    found.sort_by(|a, b| {
        let ka = (round_key(a.r), round_key(a.s));
        let kb = (round_key(b.r), round_key(b.s));
        ka.cmp(&kb)
    });
    CriticalPointSearch {
        points: found,
        seeds,
        converged,
        failed,
    }
}

fn round_key(x: f64) -> i64 {
    (x * 1e8).round() as i64
}

fn newton_critical(w: &Weierstrass, z0: Complex64) -> Option<TorusPoint> {
    let mut z = z0;
    // Near-flat directions on tall or wide cells make the residual alone a
    // poor convergence test, so the last Newton step must also be negligible.
    let mut last_step = f64::INFINITY;
    for _ in 0..60 {
        let g = green_derivatives(w, z).ok()?;
        if g.gz.norm() == 0.0 {
            last_step = 0.0;
            break;
        }
        // Solve H d = -grad for the 2x2 symmetric Hessian.
        let det = g.gx1x1 * g.gx2x2 - g.gx1x2 * g.gx1x2;
        if det.abs() < 1e-300 {
            return None;
        }
        let d1 = -(g.gx2x2 * g.gx1 - g.gx1x2 * g.gx2) / det;
        let d2 = -(-g.gx1x2 * g.gx1 + g.gx1x1 * g.gx2) / det;
        let mut step = Complex64::new(d1, d2);
        last_step = step.norm();
        let cap = 0.1 * w.tau().im.min(1.0);
        if step.norm() > cap {
            step *= cap / step.norm();
        }
        z = w.reduce(z + step).z;
        if last_step <= 1e-14 {
            break;
        }
    }
    let g = green_derivatives(w, z).ok()?;
    (g.gz.norm() < CRITICAL_TOL && last_step <= 1e-10).then(|| w.reduce(z))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::elliptic::EvalConfig;

    #[test]
    fn halton_is_in_unit_square() {
        for i in 1..200 {
            let (u, v) = halton2(i);
            assert!((0.0..1.0).contains(&u) && (0.0..1.0).contains(&v));
        }
        assert_eq!(halton2(1), (0.5, 1.0 / 3.0));
    }

    #[test]
    fn gz_vanishes_at_half_periods() {
        for tau in [Complex64::new(0.0, 1.0), Complex64::new(0.5, 1.3)] {
            let w = Weierstrass::new(tau, EvalConfig::default()).unwrap();
            for h in w.half_periods().all() {
                assert!(green_dz(&w, h).unwrap().norm() < 1e-13);
            }
        }
    }

    #[test]
    fn sign_examples_on_square_torus() {
        let w = Weierstrass::new(Complex64::new(0.0, 1.0), EvalConfig::default()).unwrap();
        let g = green_derivatives(&w, Complex64::new(0.25, 0.1)).unwrap();
        assert!(g.gx1 < 0.0);
        let g = green_derivatives(&w, Complex64::new(0.1, 0.25)).unwrap();
        assert!(g.gx2 < 0.0);
        for x in [0.05, 0.2, 0.37, -0.41] {
            let g = green_derivatives(&w, Complex64::new(x, 0.0)).unwrap();
            assert!(g.gx2.abs() < 1e-14);
        }
    }

    #[test]
    fn hessian_at_w1_half() {
        let w = Weierstrass::new(Complex64::new(0.0, 1.5), EvalConfig::default()).unwrap();
        let d = *w.data();
        let g = green_derivatives(&w, Complex64::new(0.5, 0.0)).unwrap();
        assert!((2.0 * PI * g.gx1x1 - (d.eta1 + d.e1).re).abs() < 1e-12);
        let g = green_derivatives(&w, Complex64::new(0.0, 0.3)).unwrap();
        assert!(g.gx1x2.abs() < 1e-13);
        let g = green_derivatives(&w, Complex64::new(0.3, 0.0)).unwrap();
        assert!(g.gx1x2.abs() < 1e-13);
    }
}
