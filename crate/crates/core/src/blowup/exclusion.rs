//! Numerical checks of the arguments confining solutions on rectangular
//! cells: no solution has a point on a coordinate axis, partners share the
//! sign of at least one coordinate, and the level set `{wp' in i R+}` off the
//! negative imaginary axis lies in the upper half of the cell.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::elliptic::Weierstrass;
use crate::error::Result;
use crate::green::{green_dz, halton2};

use super::partners::partner_points;

/// Green residuals on the axes below this count as a violation.
pub const AXIS_RESIDUAL_MIN: f64 = 1e-8;

/// Coordinates within this distance of `0` or of a cell edge count as having
/// either sign.
pub const SIGN_SLACK: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PairSample {
    pub a: Complex64,
    pub b: Complex64,
    pub value: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExclusionReport {
    pub axis_samples: usize,
    /// Smallest `|G_z(a) + G_z(b)|` over axis points `a` and their partners.
    pub axis_min_residual: f64,
    pub axis_violations: Vec<PairSample>,
    pub sign_samples: usize,
    pub sign_violations: Vec<PairSample>,
    pub curve_samples: usize,
    pub curve_violations: Vec<Complex64>,
}

impl ExclusionReport {
    pub fn passed(&self) -> bool {
        self.axis_violations.is_empty()
            && self.sign_violations.is_empty()
            && self.curve_violations.is_empty()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExclusionSizes {
    /// Samples on each of the four open half-axes.
    pub per_half_axis: usize,
    /// Interior points `a` for the partner sign condition.
    pub interior: usize,
    /// Points of the level set `{wp' in i R+}`.
    pub curve: usize,
}

/// Runs all three checks with `n_samples` points each (split evenly over the
/// four half-axes for the axis check).
pub fn axis_exclusion_check(w: &Weierstrass, n_samples: usize) -> Result<ExclusionReport> {
    axis_exclusion_check_with(
        w,
        ExclusionSizes {
            per_half_axis: n_samples.div_ceil(4),
            interior: n_samples,
            curve: n_samples,
        },
    )
}

pub fn axis_exclusion_check_with(
    w: &Weierstrass,
    sizes: ExclusionSizes,
) -> Result<ExclusionReport> {
    w.modulus().require_rectangular()?;
    let n = sizes.per_half_axis.max(1);
    let height = w.tau().im;
    let guard = 10.0 * w.config().pole_guard;

    // (i) the four open half-axes.
    let mut axis_points = Vec::with_capacity(4 * n);
    for k in 0..n {
        let t = (k as f64 + 0.5) / n as f64;
        let x = guard + t * (0.5 - 2.0 * guard);
        let y = guard + t * (0.5 * height - 2.0 * guard);
        axis_points.extend([
            Complex64::new(x, 0.0),
            Complex64::new(-x, 0.0),
            Complex64::new(0.0, y),
            Complex64::new(0.0, -y),
        ]);
    }
    let mut axis_min_residual = f64::INFINITY;
    let mut axis_violations = Vec::new();
    for &a in &axis_points {
        let set = partner_points(w, a)?;
        let ga = green_dz(w, a)?;
        for b in &set.partners {
            let res = (ga + green_dz(w, b.z)?).norm();
            axis_min_residual = axis_min_residual.min(res);
            if res < AXIS_RESIDUAL_MIN {
                axis_violations.push(PairSample {
                    a,
                    b: b.z,
                    value: res,
                });
            }
        }
    }

    // (ii) interior samples: x1(a) x1(b) >= 0 or x2(a) x2(b) >= 0.
    let mut sign_violations = Vec::new();
    let mut sign_samples = 0;
    for i in 0..sizes.interior {
        let (u, v) = halton2(i + 1);
        let a = w.modulus().from_coords(u - 0.5, v - 0.5);
        if w.reduce(a).dist_to_lattice < guard {
            continue;
        }
        let set = partner_points(w, a)?;
        for b in &set.partners {
            sign_samples += 1;
            let s1 = signed_product(a.re, b.z.re, 0.5);
            let s2 = signed_product(a.im, b.z.im, 0.5 * height);
            if s1 < 0.0 && s2 < 0.0 {
                sign_violations.push(PairSample {
                    a,
                    b: b.z,
                    value: s1.max(s2),
                });
            }
        }
    }

    // (iii) the level set {wp' in i R+}.
    let roots = wp_prime_level_points(w, sizes.curve);
    let curve_violations = roots
        .iter()
        .copied()
        .filter(|z| {
            let on_neg_imag_axis = z.re.abs() <= SIGN_SLACK && z.im < 0.0;
            !on_neg_imag_axis && z.im <= SIGN_SLACK
        })
        .collect();

    Ok(ExclusionReport {
        axis_samples: axis_points.len(),
        axis_min_residual,
        axis_violations,
        sign_samples,
        sign_violations,
        curve_samples: roots.len(),
        curve_violations,
    })
}

/// `x * y`, or `0` when either coordinate sits on an axis or on the cell edge
/// `±half` (where both signs represent the same point).
fn signed_product(x: f64, y: f64, half: f64) -> f64 {
    let ambiguous = |c: f64| c.abs() <= SIGN_SLACK || (c.abs() - half).abs() <= SIGN_SLACK;
    if ambiguous(x) || ambiguous(y) {
        0.0
    } else {
        x * y
    }
}

/// Reduced solutions of `wp'(z) = i s` for a geometric range of `s > 0`,
/// collected until `n_points` are found (each level has three on the torus).
pub fn wp_prime_level_points(w: &Weierstrass, n_points: usize) -> Vec<Complex64> {
    let m = w.modulus();
    let scale = w.data().g2.norm().powf(0.75).max(1.0);
    let n_levels = n_points.div_ceil(3).max(1);
    // Seed grid with roughly square spacing on elongated cells.
    let aspect = w.tau().im;
    let seeds_r = (10.0 * (1.0 / aspect).max(1.0)).ceil() as usize;
    let seeds_s = (10.0 * aspect.max(1.0)).ceil() as usize;
    let mut out = Vec::with_capacity(n_points);
    for l in 0..n_levels {
        let expo = -3.0 + 6.0 * (l as f64 + 0.5) / n_levels as f64;
        let target = Complex64::new(0.0, scale * 10f64.powf(expo));
        let mut level: Vec<Complex64> = Vec::with_capacity(3);
        'seed: for i in 0..seeds_r {
            for j in 0..seeds_s {
                let z0 = m.from_coords(
                    -0.5 + (i as f64 + 0.5) / seeds_r as f64,
                    -0.5 + (j as f64 + 0.5) / seeds_s as f64,
                );
                if let Some(z) = newton_wp_prime(w, target, z0) {
                    let z = w.reduce(z).z;
                    if !level.iter().any(|&p| m.torus_distance(p, z) < 1e-8) {
                        level.push(z);
                    }
                }
                if level.len() == 3 {
                    break 'seed;
                }
            }
        }
        out.extend(level);
        if out.len() >= n_points {
            break;
        }
    }
    out.truncate(n_points);
    out
}

fn newton_wp_prime(w: &Weierstrass, target: Complex64, z0: Complex64) -> Option<Complex64> {
    let g2 = w.data().g2;
    let cap = 0.1 * w.tau().im.min(1.0);
    let mut z = z0;
    for _ in 0..80 {
        let t = w.eval(z).ok()?;
        let f = t.wp_prime - target;
        if f.norm() <= 1e-12 * (1.0 + target.norm()) {
            return Some(z);
        }
        let d = t.wp * t.wp * 6.0 - g2 * 0.5;
        if d.norm() == 0.0 {
            return None;
        }
        let mut h = -f / d;
        if h.norm() > cap {
            h *= cap / h.norm();
        }
        z += h;
    }
    None
}
