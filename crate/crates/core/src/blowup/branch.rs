//! The partner branches along the right edge `a in [w1/2, w3/2]` of a
//! rectangular cell, the functions `f = wp(a) + wp(b(a))` and
//! `H = G_x2(a) + G_x2(b(a))`, and the critical-value constants `B±`, `A+`.
//!
//! Branch identity comes from continuation out of the known endpoint values,
//! never from the sign of the square root in `conjugate_wp_values`.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::elliptic::{LatticeData, Weierstrass, WpTriple};
use crate::error::{Error, Result};
use crate::green::{assemble, gz_from_zeta, GreenDerivatives};

use super::partners::conjugate_wp_values;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BranchId {
    /// The trivial branch `b = -a`.
    B1,
    /// Runs along `Re b = -1/2` from `-w3/2` through `-q+` to `-w1/2`.
    B2,
    /// Runs along the imaginary axis from `w2/2` down to `2q+` and back.
    B3,
}

impl BranchId {
    pub fn name(&self) -> &'static str {
        match self {
            BranchId::B1 => "b1",
            BranchId::B2 => "b2",
            BranchId::B3 => "b3",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BranchSample {
    /// Path parameter in `[0, 1]`: `a = 1/2 + i t Im(tau) / 2`.
    pub t: f64,
    pub a: Complex64,
    /// Continued (unreduced) branch value.
    pub b: Complex64,
    pub wp_a: f64,
    pub wp_b: f64,
    pub f: f64,
    pub h: f64,
    /// `dH/dx2` from the closed form.
    pub h_prime: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BranchPath {
    pub branch_id: BranchId,
    pub samples: Vec<BranchSample>,
}

/// `b'(a) = (2 wp(a) + wp(b)) / (wp(a) + 2 wp(b))`.
pub fn branch_derivative(pa: Complex64, pb: Complex64) -> Result<Complex64> {
    let den = pa + pb * 2.0;
    if den.norm() <= 1e-14 * (1.0 + pa.norm() + pb.norm()) {
        return Err(Error::DegenerateDenominator(den.norm()));
    }
    Ok((pa * 2.0 + pb) / den)
}

fn green_at(w: &Weierstrass, z: Complex64) -> Result<(WpTriple, GreenDerivatives)> {
    let p = w.reduce(z);
    let t = w.eval(p.z)?;
    Ok((t, assemble(w, gz_from_zeta(w, p.z, t.zeta), t.wp)))
}

/// `H = G_x2(a) + G_x2(b)` and `dH/dx2` for `a` moving up the right edge,
/// where `b` moves by `i b' dx2`.
pub fn h_and_hprime(w: &Weierstrass, a: Complex64, b: Complex64) -> Result<(f64, f64)> {
    let (ta, ga) = green_at(w, a)?;
    let (tb, gb) = green_at(w, b)?;
    let bp = branch_derivative(ta.wp, tb.wp)?;
    let h = ga.gx2 + gb.gx2;
    let hp = ga.gx2x2 - gb.gx1x2 * bp.im + gb.gx2x2 * bp.re;
    Ok((h, hp))
}

fn edge_point(w: &Weierstrass, t: f64) -> Complex64 {
    Complex64::new(0.5, 0.5 * t * w.tau().im)
}

/// Moves a branch from `b_prev` (at the previous `a`) to the new `a`: both
/// roots of the partner quadratic are inverted from the predicted position,
/// and among the preimages with `wp'(b) = -wp'(a)` the one closest to the
/// prediction wins. The sign test matters on tall cells, where `b` and `-b`
/// nearly coincide in `wp` and in position near the start of a branch.
fn continue_to(w: &Weierstrass, ta: &WpTriple, pred: Complex64) -> Result<Complex64> {
    let m = w.modulus();
    let mut best: Option<(f64, Complex64)> = None;
    let mut last_err = None;
    for target in conjugate_wp_values(ta.wp, w.data().g2) {
        match w.preimage(target, Some(pred)) {
            Ok(z) => {
                let d = w.wp_prime(z)?;
                let matches = (d + ta.wp_prime).norm();
                let opposite = (d - ta.wp_prime).norm();
                let ambiguous = (matches - opposite).abs() <= 1e-9 * (1.0 + d.norm());
                let signs: &[f64] = if ambiguous {
                    &[1.0, -1.0]
                } else if matches <= opposite {
                    &[1.0]
                } else {
                    &[-1.0]
                };
                for c in signs.iter().map(|&s| z * s) {
                    let lifted = m.nearest_representative(c, pred);
                    let d = (lifted - pred).norm();
                    if best.map_or(true, |(bd, _)| d < bd) {
                        best = Some((d, lifted));
                    }
                }
            }
            Err(e) => last_err = Some(e),
        }
    }
    match (best, last_err) {
        (Some((_, b)), _) => Ok(b),
        (None, Some(e)) => Err(e),
        (None, None) => unreachable!(),
    }
}

fn sample(
    w: &Weierstrass,
    t: f64,
    a: Complex64,
    ta: &WpTriple,
    b: Complex64,
) -> Result<BranchSample> {
    let tb = w.eval(w.reduce(b).z)?;
    let (h, h_prime) = h_and_hprime(w, a, b)?;
    Ok(BranchSample {
        t,
        a,
        b,
        wp_a: ta.wp.re,
        wp_b: tb.wp.re,
        f: (ta.wp + tb.wp).re,
        h,
        h_prime,
    })
}

/// Branch value at `a = w1/2`.
fn start_value(w: &Weierstrass, id: BranchId) -> Complex64 {
    let hp = w.half_periods();
    match id {
        BranchId::B1 => -hp.w1_half,
        BranchId::B2 => -hp.w3_half,
        BranchId::B3 => hp.w2_half,
    }
}

/// Follows a branch along `n_samples` uniformly spaced points of the right
/// edge, from `w1/2` to `w3/2`.
pub fn trace_branch(w: &Weierstrass, id: BranchId, n_samples: usize) -> Result<BranchPath> {
    w.modulus().require_rectangular()?;
    if n_samples < 2 {
        return Err(Error::InvalidArgument(
            "trace_branch needs at least 2 samples".into(),
        ));
    }
    let mut samples = Vec::with_capacity(n_samples);
    let mut b = start_value(w, id);
    let mut prev: Option<(Complex64, Complex64)> = None;
    for k in 0..n_samples {
        let t = k as f64 / (n_samples - 1) as f64;
        let a = edge_point(w, t);
        let ta = w.eval(a)?;
        if id == BranchId::B1 {
            b = -a;
        } else if let Some((a_prev, b_prev)) = prev {
            b = step_branch(w, a_prev, b_prev, a, &ta, k)?;
        }
        samples.push(sample(w, t, a, &ta, b)?);
        prev = Some((a, b));
    }
    Ok(BranchPath {
        branch_id: id,
        samples,
    })
}

/// Largest predicted `|db|` per continuation step, relative to `min(1, Im tau)`.
const MAX_BRANCH_STEP: f64 = 0.02;

/// One continuation step with the jump guard
/// `|db| <= 10 |da| max(1, |b'|)`; steps whose predicted `|db|` is too large
/// are bisected.
fn step_branch(
    w: &Weierstrass,
    a_prev: Complex64,
    b_prev: Complex64,
    a: Complex64,
    ta: &WpTriple,
    index: usize,
) -> Result<Complex64> {
    advance(w, a_prev, b_prev, a, ta, index, 0)
}

fn advance(
    w: &Weierstrass,
    a_prev: Complex64,
    b_prev: Complex64,
    a: Complex64,
    ta: &WpTriple,
    index: usize,
    depth: u32,
) -> Result<Complex64> {
    let pa_prev = w.wp(a_prev)?;
    let pb_prev = w.wp(w.reduce(b_prev).z)?;
    let slope = branch_derivative(pa_prev, pb_prev).unwrap_or(Complex64::new(1.0, 0.0));
    let da = a - a_prev;
    let cap = MAX_BRANCH_STEP * w.tau().im.min(1.0);
    if (slope * da).norm() > cap && depth < 40 {
        let mid = (a_prev + a) * 0.5;
        let tm = w.eval(mid)?;
        let bm = advance(w, a_prev, b_prev, mid, &tm, index, depth + 1)?;
        return advance(w, mid, bm, a, ta, index, depth + 1);
    }
    let b = continue_to(w, ta, b_prev + slope * da)?;
    let step = (b - b_prev).norm();
    let bound = 10.0 * da.norm() * slope.norm().max(1.0);
    if step > bound {
        return Err(Error::BranchJump { index, step, bound });
    }
    Ok(b)
}

/// The branch sample at path parameter `t`, continued from the closest
/// sample of `path`.
pub fn branch_point(w: &Weierstrass, path: &BranchPath, t: f64) -> Result<BranchSample> {
    let from = path
        .samples
        .iter()
        .min_by(|x, y| (x.t - t).abs().total_cmp(&(y.t - t).abs()))
        .ok_or_else(|| Error::InvalidArgument("empty branch path".into()))?;
    if path.branch_id == BranchId::B1 {
        let a = edge_point(w, t);
        let ta = w.eval(a)?;
        return sample(w, t, a, &ta, -a);
    }
    if from.t == t {
        return Ok(*from);
    }
    sample_at(w, from, t)
}

/// Branch value and sample at an arbitrary `t`, continued from a nearby sample.
fn sample_at(w: &Weierstrass, from: &BranchSample, t: f64) -> Result<BranchSample> {
    let a = edge_point(w, t);
    let ta = w.eval(a)?;
    // Sub-steps keep the continuation within its step bound.
    let n = ((t - from.t).abs() * 400.0).ceil().max(1.0) as usize;
    let (mut a_prev, mut b_prev) = (from.a, from.b);
    for j in 1..=n {
        let tj = from.t + (t - from.t) * j as f64 / n as f64;
        let aj = edge_point(w, tj);
        let tj_eval = if j == n { ta } else { w.eval(aj)? };
        b_prev = step_branch(w, a_prev, b_prev, aj, &tj_eval, j)?;
        a_prev = aj;
    }
    sample(w, t, a, &ta, b_prev)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Thresholds {
    pub b_plus: f64,
    pub b_minus: f64,
    pub a_plus_coef: f64,
    /// Points of the right edge where `wp(a) = (B+ ± sqrt(B+^2 - 4 A+)) / 2`.
    pub a_plus: Complex64,
    pub a_minus: Complex64,
}

/// `B± = (-eta1~ ± sqrt(eta1~^2 + 2 g2 / 3)) / 2`, the roots of
/// `f^2 + eta1~ f - g2/6 = 0` satisfied by `f2` at the critical points of `H2`;
/// `A+ = -(B+^2 + 3 eta1~ B+) / 2` is `wp(a) wp(b2(a))` there.
pub fn thresholds_from(ld: &LatticeData) -> (f64, f64, f64) {
    let et = ld.eta1_tilde.re;
    let g2 = ld.g2.re;
    let disc = (et * et + 2.0 * g2 / 3.0).sqrt();
    let bp = 0.5 * (-et + disc);
    let bm = 0.5 * (-et - disc);
    let ap = -(bp * bp + 3.0 * et * bp) / 2.0;
    (bp, bm, ap)
}

pub fn thresholds(w: &Weierstrass) -> Result<Thresholds> {
    w.modulus().require_rectangular()?;
    let (bp, bm, ap) = thresholds_from(w.data());
    let disc = bp * bp - 4.0 * ap;
    if disc < 0.0 {
        return Err(Error::ConvergenceFailure {
            what: "critical values of H2 are not real",
            residual: disc,
        });
    }
    let hp = w.half_periods();
    let hi = 0.5 * (bp + disc.sqrt());
    let lo = 0.5 * (bp - disc.sqrt());
    Ok(Thresholds {
        b_plus: bp,
        b_minus: bm,
        a_plus_coef: ap,
        a_plus: w.bracketed_on_segment(hp.w1_half, hp.w3_half, hi)?,
        a_minus: w.bracketed_on_segment(hp.w1_half, hp.w3_half, lo)?,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HZeroCount {
    pub branch_id: BranchId,
    /// Zeros of `H` as points of the right edge, endpoints included.
    pub h_zeros: Vec<Complex64>,
    /// Interior zeros of `dH/dx2`.
    pub hprime_zeros: Vec<Complex64>,
    pub n_samples: usize,
}

/// Values of `|H|` at the edge endpoints below this count as zeros there
/// (`G_x2` vanishes identically on both horizontal symmetry lines).
const ENDPOINT_ZERO: f64 = 1e-10;

/// Locates the zeros of `H` and `dH/dx2` on a branch by a sign-change scan
/// over `n_samples` points followed by bisection.
pub fn count_h_zeros(w: &Weierstrass, id: BranchId, n_samples: usize) -> Result<HZeroCount> {
    let path = trace_branch(w, id, n_samples)?;
    let s = &path.samples;
    let step = 1.0 / (n_samples - 1) as f64;

    let mut h_t = Vec::new();
    for end in [&s[0], &s[s.len() - 1]] {
        if end.h.abs() <= ENDPOINT_ZERO {
            h_t.push(end.t);
        }
    }
    // Interior scan; endpoint samples are excluded since their sign is noise.
    let interior = &s[1..s.len() - 1];
    for pair in interior.windows(2) {
        if pair[0].h == 0.0 {
            h_t.push(pair[0].t);
        } else if pair[0].h.signum() != pair[1].h.signum() && pair[1].h != 0.0 {
            h_t.push(bisect(w, &pair[0], pair[1].t, |x| x.h)?);
        }
    }
    let mut hp_t = Vec::new();
    for pair in interior.windows(2) {
        if pair[0].h_prime.signum() != pair[1].h_prime.signum() {
            hp_t.push(bisect(w, &pair[0], pair[1].t, |x| x.h_prime)?);
        }
    }
    for list in [&mut h_t, &mut hp_t] {
        list.sort_by(f64::total_cmp);
        if let Some(p) = list.windows(2).find(|p| p[1] - p[0] < 3.0 * step) {
            return Err(Error::ResolutionTooCoarse {
                first: p[0],
                second: p[1],
            });
        }
    }
    Ok(HZeroCount {
        branch_id: id,
        h_zeros: h_t.iter().map(|&t| edge_point(w, t)).collect(),
        hprime_zeros: hp_t.iter().map(|&t| edge_point(w, t)).collect(),
        n_samples,
    })
}

fn bisect(
    w: &Weierstrass,
    left: &BranchSample,
    t_right: f64,
    g: impl Fn(&BranchSample) -> f64,
) -> Result<f64> {
    let (mut lo, mut hi) = (left.t, t_right);
    let sign_lo = g(left).signum();
    while hi - lo > 1e-13 {
        let mid = 0.5 * (lo + hi);
        let v = g(&sample_at(w, left, mid)?);
        if v == 0.0 {
            return Ok(mid);
        }
        if v.signum() == sign_lo {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}
