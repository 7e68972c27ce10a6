//! Grid search for solutions `(a, b)` of the full system on an arbitrary
//! modulus, and the scan over the rhombus family `tau = 1/2 + i b`.
//!
//! For each grid point `a` of the half cell `s in [0, 1/2]` both partners
//! `b(a)` are computed, so `wp'(a) + wp'(b) = 0` holds by construction and only
//! `G_z(a) + G_z(b(a))` remains. Grid minima of its modulus are polished by a
//! damped Newton iteration in the two real coordinates of `a`, with `b`
//! continued from its previous value.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::elliptic::{Weierstrass, WpTriple};
use crate::error::{Error, Result};
use crate::green::{assemble, gz_from_zeta, GreenDerivatives};
use crate::lattice::TorusModulus;
use crate::par;

use super::partners::{conjugate_wp_values, residuals, Residuals};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SearchParams {
    /// Grid points per axis over the half cell.
    pub grid_n: usize,
    /// Metric form of the exclusions `a ∉ {-a, ±b}` and of the pole guard.
    pub excl_radius: f64,
    /// Bound on each residual for a pair to be accepted.
    pub accept_tol: f64,
    /// Number of grid minima handed to the Newton polisher.
    pub n_polish: usize,
    /// Floors below this trigger one refinement of the grid to `2 * grid_n`.
    pub refine_below: f64,
    /// Grid residuals enter the floor only at this exclusion distance or more;
    /// closer in they vanish linearly towards the excluded configurations.
    pub floor_radius: f64,
}

impl Default for SearchParams {
    fn default() -> Self {
        SearchParams {
            grid_n: 400,
            excl_radius: 1e-3,
            accept_tol: 1e-10,
            n_polish: 50,
            refine_below: 1e-3,
            floor_radius: 0.05,
        }
    }
}

impl SearchParams {
    pub fn validate(&self) -> Result<()> {
        if self.grid_n < 4 {
            return Err(Error::InvalidArgument("grid_n must be at least 4".into()));
        }
        if !(self.excl_radius > 0.0 && self.accept_tol > 0.0 && self.floor_radius > 0.0) {
            return Err(Error::InvalidArgument("tolerances must be positive".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PairStatus {
    SolutionsFound,
    NoSolutionEvidence,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SolvedPair {
    pub a: Complex64,
    pub b: Complex64,
    pub residual_green: f64,
    pub residual_wp: f64,
    pub residual_zeta: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PolishOutcome {
    Accepted,
    /// Converged into one of the excluded configurations.
    Excluded,
    /// Stalled at a positive residual.
    Stalled,
    Failed,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PolishedCandidate {
    pub start_a: Complex64,
    pub start_residual: f64,
    pub a: Complex64,
    pub b: Complex64,
    pub residual: f64,
    pub relative_residual: f64,
    pub exclusion_distance: f64,
    pub iterations: usize,
    pub outcome: PolishOutcome,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LandscapeCell {
    pub a: Complex64,
    /// Which root of the partner quadratic attains the minimum.
    pub branch: usize,
    pub min_res_green: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PairReport {
    pub tau: Complex64,
    pub status: PairStatus,
    pub pairs: Vec<SolvedPair>,
    /// Smallest relative residual `|G_z(a) + G_z(b)| / (|G_z(a)| + |G_z(b)|)`
    /// over stalled polished candidates and grid points at least
    /// `floor_radius` from the excluded configurations; `None` when solutions
    /// were found.
    pub floor: Option<f64>,
    /// The same minimum for the absolute residual `|G_z(a) + G_z(b)|`.
    pub floor_abs: Option<f64>,
    pub search_params: SearchParams,
    /// Grid actually used (after a possible refinement).
    pub grid_used: usize,
    pub candidates: Vec<PolishedCandidate>,
    #[serde(skip)]
    pub landscape: Vec<LandscapeCell>,
}

/// `a`, its partner `b` and the ingredients needed for the Newton step.
#[derive(Debug, Clone, Copy)]
struct PairState {
    a: Complex64,
    b: Complex64,
    ta: WpTriple,
    tb: WpTriple,
    ga: GreenDerivatives,
    gb: GreenDerivatives,
}

impl PairState {
    fn f(&self) -> Complex64 {
        self.ga.gz + self.gb.gz
    }
}

fn green_at(w: &Weierstrass, z: Complex64) -> Result<(WpTriple, GreenDerivatives)> {
    let p = w.reduce(z);
    let t = w.eval(p.z)?;
    let gz = gz_from_zeta(w, p.z, t.zeta);
    Ok((t, assemble(w, gz, t.wp)))
}

/// Smallest of the torus distances measuring `a = -a`, `a = b`, `a = -b` and
/// the distances of `a`, `b` to the lattice.
pub fn exclusion_distance(m: &TorusModulus, a: Complex64, b: Complex64) -> f64 {
    let two_a = m.reduce(a * 2.0).dist_to_lattice;
    two_a
        .min(m.torus_distance(a, b))
        .min(m.torus_distance(a, -b))
        .min(m.reduce(a).dist_to_lattice)
        .min(m.reduce(b).dist_to_lattice)
}

/// Both partners of `a` (including `-a` when it solves the quadratic).
fn both_partners(w: &Weierstrass, a: Complex64, ta: &WpTriple) -> Vec<Result<Complex64>> {
    conjugate_wp_values(ta.wp, w.data().g2)
        .iter()
        .map(|&target| {
            if (target - ta.wp).norm() <= 1e-12 * (1.0 + ta.wp.norm()) {
                return Ok(w.reduce(-a).z);
            }
            w.wp_inverse(target, -ta.wp_prime, None).map(|p| p.z)
        })
        .collect()
}

/// Continues the partner branch from `b_prev` (a partner of the previous `a`)
/// to the new `a`, choosing the root whose preimage lies closest to `b_prev`.
pub(crate) fn continue_partner(
    w: &Weierstrass,
    a: Complex64,
    ta: &WpTriple,
    b_prev: Complex64,
) -> Result<Complex64> {
    let m = w.modulus();
    let mut best: Option<(f64, Complex64)> = None;
    let mut last_err = None;
    for target in conjugate_wp_values(ta.wp, w.data().g2) {
        let cand = if (target - ta.wp).norm() <= 1e-12 * (1.0 + ta.wp.norm()) {
            Ok(w.reduce(-a))
        } else {
            w.wp_inverse(target, -ta.wp_prime, Some(b_prev))
        };
        match cand {
            Ok(p) => {
                let lifted = m.nearest_representative(p.z, b_prev);
                let d = (lifted - b_prev).norm();
                if best.map_or(true, |(bd, _)| d < bd) {
                    best = Some((d, lifted));
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

fn pair_state(w: &Weierstrass, a: Complex64, b: Complex64) -> Result<PairState> {
    let (ta, ga) = green_at(w, a)?;
    let (tb, gb) = green_at(w, b)?;
    Ok(PairState {
        a,
        b,
        ta,
        tb,
        ga,
        gb,
    })
}

/// Real Jacobian of `F(a) = G_z(a) + G_z(b(a))` with respect to `(Re a, Im a)`,
/// using `b'(a) = -wp''(a) / wp''(b)`.
fn jacobian(w: &Weierstrass, st: &PairState) -> Option<[[f64; 2]; 2]> {
    let g2 = w.data().g2;
    let wpp_a = st.ta.wp * st.ta.wp * 6.0 - g2 * 0.5;
    let wpp_b = st.tb.wp * st.tb.wp * 6.0 - g2 * 0.5;
    if wpp_b.norm() == 0.0 {
        return None;
    }
    let bp = -wpp_a / wpp_b;
    // dG_z / dx1 and dG_z / dx2 at a point, from the Hessian.
    let d1 = |g: &GreenDerivatives| Complex64::new(0.5 * g.gx1x1, -0.5 * g.gx1x2);
    let d2 = |g: &GreenDerivatives| Complex64::new(0.5 * g.gx1x2, -0.5 * g.gx2x2);
    // da = dx1 moves b by bp; da = i dx2 moves b by i bp.
    let col1 = d1(&st.ga) + d1(&st.gb) * bp.re + d2(&st.gb) * bp.im;
    let ibp = Complex64::new(0.0, 1.0) * bp;
    let col2 = d2(&st.ga) + d1(&st.gb) * ibp.re + d2(&st.gb) * ibp.im;
    Some([[col1.re, col2.re], [col1.im, col2.im]])
}

const POLISH_ITERS: usize = 60;

fn polish(
    w: &Weierstrass,
    start_a: Complex64,
    start_b: Complex64,
    params: &SearchParams,
) -> PolishedCandidate {
    let m = w.modulus();
    let mut out = PolishedCandidate {
        start_a,
        start_residual: f64::NAN,
        a: start_a,
        b: start_b,
        residual: f64::INFINITY,
        relative_residual: f64::INFINITY,
        exclusion_distance: exclusion_distance(m, start_a, start_b),
        iterations: 0,
        outcome: PolishOutcome::Failed,
    };
    let mut st = match pair_state(w, start_a, start_b) {
        Ok(s) => s,
        Err(_) => return out,
    };
    out.start_residual = st.f().norm();
    let cap = 0.05 * w.tau().im.min(1.0);
    let mut stalled = false;
    for it in 0..POLISH_ITERS {
        out.iterations = it;
        let f = st.f();
        let fnorm = f.norm();
        if fnorm < params.accept_tol * 1e-3 {
            break;
        }
        if exclusion_distance(m, st.a, st.b) < 0.5 * params.excl_radius {
            break;
        }
        let jac = match jacobian(w, &st) {
            Some(j) => j,
            None => break,
        };
        let det = jac[0][0] * jac[1][1] - jac[0][1] * jac[1][0];
        if det == 0.0 || !det.is_finite() {
            stalled = true;
            break;
        }
        let dx1 = -(jac[1][1] * f.re - jac[0][1] * f.im) / det;
        let dx2 = -(-jac[1][0] * f.re + jac[0][0] * f.im) / det;
        let mut step = Complex64::new(dx1, dx2);
        if step.norm() > cap {
            step *= cap / step.norm();
        }
        let mut lambda = 1.0;
        let mut accepted = None;
        for _ in 0..12 {
            let a_new = st.a + step * lambda;
            let trial = continue_partner(w, a_new, &w.eval(a_new).unwrap_or(st.ta), st.b).and_then(
                |b_new| {
                    let db = (b_new - st.b).norm();
                    let bound = 10.0 * (step * lambda).norm() * (1.0 + branch_slope(w, &st));
                    if db > bound {
                        Err(Error::BranchJump {
                            index: it,
                            step: db,
                            bound,
                        })
                    } else {
                        pair_state(w, a_new, b_new)
                    }
                },
            );
            if let Ok(s) = trial {
                if s.f().norm() < fnorm * (1.0 - 1e-4 * lambda) {
                    accepted = Some(s);
                    break;
                }
            }
            lambda *= 0.5;
        }
        match accepted {
            Some(s) => {
                let moved = (s.a - st.a).norm();
                st = s;
                if moved < 1e-15 {
                    break;
                }
            }
            None => {
                stalled = true;
                break;
            }
        }
    }
    out.a = st.a;
    out.b = st.b;
    out.exclusion_distance = exclusion_distance(m, st.a, st.b);
    out.relative_residual = relative_residual(st.ga.gz, st.gb.gz);
    let res = residuals(w, st.a, st.b);
    out.residual = match res {
        Ok(r) => r.res_green + r.res_wp,
        Err(_) => st.f().norm(),
    };
    out.outcome = if out.exclusion_distance <= params.excl_radius {
        PolishOutcome::Excluded
    } else if matches!(res, Ok(r) if accepted(&r, params)) {
        PolishOutcome::Accepted
    } else if stalled || out.residual.is_finite() {
        PolishOutcome::Stalled
    } else {
        PolishOutcome::Failed
    };
    out
}

fn branch_slope(w: &Weierstrass, st: &PairState) -> f64 {
    let g2 = w.data().g2;
    let wpp_a = st.ta.wp * st.ta.wp * 6.0 - g2 * 0.5;
    let wpp_b = st.tb.wp * st.tb.wp * 6.0 - g2 * 0.5;
    if wpp_b.norm() == 0.0 {
        f64::INFINITY
    } else {
        (wpp_a / wpp_b).norm()
    }
}

fn accepted(r: &Residuals, params: &SearchParams) -> bool {
    r.res_green <= params.accept_tol
        && r.res_wp <= params.accept_tol
        && r.res_zeta <= params.accept_tol
}

/// One grid evaluation: the two partner residuals at `a`.
#[derive(Debug, Clone, Copy)]
struct GridEval {
    a: Complex64,
    best: Option<(usize, Complex64, f64)>,
    /// Smallest relative and absolute residuals over partners at least
    /// `floor_radius` from exclusion.
    far: f64,
    far_abs: f64,
}

/// `|G_z(a) + G_z(b)| / (|G_z(a)| + |G_z(b)|)`: insensitive to the
/// exponential flattening of `G` across tall cells.
fn relative_residual(ga: Complex64, gb: Complex64) -> f64 {
    let scale = ga.norm() + gb.norm();
    if scale == 0.0 {
        0.0
    } else {
        (ga + gb).norm() / scale
    }
}

fn landscape(w: &Weierstrass, n: usize, params: &SearchParams) -> Vec<GridEval> {
    let m = *w.modulus();
    let guard = params.excl_radius.max(w.config().pole_guard);
    par::map_range(n * n, |idx| {
        let (i, j) = (idx / n, idx % n);
        let r = -0.5 + (i as f64 + 0.5) / n as f64;
        let s = (j as f64 + 0.5) / (2 * n) as f64;
        let a = m.from_coords(r, s);
        let mut best = None;
        let mut far = f64::INFINITY;
        let mut far_abs = f64::INFINITY;
        if m.reduce(a).dist_to_lattice > guard {
            if let Ok((ta, ga)) = green_at(w, a) {
                for (k, b) in both_partners(w, a, &ta).into_iter().enumerate() {
                    let Ok(b) = b else { continue };
                    let ex = exclusion_distance(&m, a, b);
                    if ex <= params.excl_radius {
                        continue;
                    }
                    let Ok((_, gb)) = green_at(w, b) else {
                        continue;
                    };
                    let res = (ga.gz + gb.gz).norm();
                    if ex >= params.floor_radius {
                        far = far.min(relative_residual(ga.gz, gb.gz));
                        far_abs = far_abs.min(res);
                    }
                    if best.map_or(true, |(_, _, r)| res < r) {
                        best = Some((k, b, res));
                    }
                }
            }
        }
        GridEval {
            a,
            best,
            far,
            far_abs,
        }
    })
}

/// Grid indices whose residual is no larger than any of the 8 neighbours.
fn local_minima(grid: &[GridEval], n: usize) -> Vec<usize> {
    let value = |i: isize, j: isize| -> Option<f64> {
        if j < 0 || j >= n as isize {
            return None;
        }
        let i = i.rem_euclid(n as isize) as usize;
        grid[i * n + j as usize].best.map(|b| b.2)
    };
    (0..n * n)
        .filter(|&idx| {
            let (i, j) = ((idx / n) as isize, (idx % n) as isize);
            let Some(v) = value(i, j) else { return false };
            for di in -1..=1 {
                for dj in -1..=1 {
                    if di == 0 && dj == 0 {
                        continue;
                    }
                    if let Some(u) = value(i + di, j + dj) {
                        if u < v {
                            return false;
                        }
                    }
                }
            }
            true
        })
        .collect()
}

/// Searches the cell for solutions of the full system.
pub fn solve_pair_system(w: &Weierstrass, params: &SearchParams) -> Result<PairReport> {
    params.validate()?;
    let first = solve_on_grid(w, params, params.grid_n);
    if first.status == PairStatus::NoSolutionEvidence
        && first.floor.map_or(false, |f| f < params.refine_below)
    {
        log::info!(
            "floor {:.3e} below {:.1e}; refining grid to {}",
            first.floor.unwrap_or(f64::NAN),
            params.refine_below,
            2 * params.grid_n
        );
        return Ok(solve_on_grid(w, params, 2 * params.grid_n));
    }
    Ok(first)
}

fn solve_on_grid(w: &Weierstrass, params: &SearchParams, n: usize) -> PairReport {
    let m = *w.modulus();
    let grid = landscape(w, n, params);
    let mut minima = local_minima(&grid, n);
    minima.sort_by(|&x, &y| {
        let vx = grid[x].best.map_or(f64::INFINITY, |b| b.2);
        let vy = grid[y].best.map_or(f64::INFINITY, |b| b.2);
        vx.total_cmp(&vy).then(x.cmp(&y))
    });
    minima.truncate(params.n_polish);
    let candidates: Vec<PolishedCandidate> = par::map_slice(&minima, |&idx| {
        let g = grid[idx];
        let (_, b, _) = g.best.expect("minima have a value");
        polish(w, g.a, b, params)
    });

    let mut pairs: Vec<SolvedPair> = Vec::new();
    for c in candidates
        .iter()
        .filter(|c| c.outcome == PolishOutcome::Accepted)
    {
        for (a, b) in [(c.a, c.b), (-c.a, -c.b), (c.b, c.a), (-c.b, -c.a)] {
            let (a, b) = (m.reduce(a).z, m.reduce(b).z);
            if pairs
                .iter()
                .any(|p| m.torus_distance(p.a, a) < 1e-7 && m.torus_distance(p.b, b) < 1e-7)
            {
                continue;
            }
            if let Ok(r) = residuals(w, a, b) {
                pairs.push(SolvedPair {
                    a,
                    b,
                    residual_green: r.res_green,
                    residual_wp: r.res_wp,
                    residual_zeta: r.res_zeta,
                });
            }
        }
    }
    pairs.sort_by(|p, q| {
        (p.a.re, p.a.im, p.b.re, p.b.im)
            .partial_cmp(&(q.a.re, q.a.im, q.b.re, q.b.im))
            .unwrap_or(std::cmp::Ordering::Equal)
    });

    let status = if pairs.is_empty() {
        PairStatus::NoSolutionEvidence
    } else {
        PairStatus::SolutionsFound
    };
    let (floor, floor_abs) = if pairs.is_empty() {
        let stalled: Vec<&PolishedCandidate> = candidates
            .iter()
            .filter(|c| c.outcome == PolishOutcome::Stalled)
            .collect();
        let rel = stalled.iter().map(|c| c.relative_residual);
        let abs = stalled.iter().map(|c| c.residual);
        (
            Some(
                grid.iter()
                    .map(|g| g.far)
                    .chain(rel)
                    .fold(f64::INFINITY, f64::min),
            ),
            Some(
                grid.iter()
                    .map(|g| g.far_abs)
                    .chain(abs)
                    .fold(f64::INFINITY, f64::min),
            ),
        )
    } else {
        (None, None)
    };
    let landscape = grid
        .iter()
        .map(|g| LandscapeCell {
            a: g.a,
            branch: g.best.map_or(0, |b| b.0),
            min_res_green: g.best.map_or(f64::NAN, |b| b.2),
        })
        .collect();
    PairReport {
        tau: w.tau(),
        status,
        pairs,
        floor,
        floor_abs,
        search_params: *params,
        grid_used: n,
        candidates,
        landscape,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScanPoint {
    pub b: f64,
    pub status: PairStatus,
    pub n_pairs: usize,
    pub floor: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ThresholdReport {
    pub points: Vec<ScanPoint>,
    /// Largest `b` without solutions below the first `b` with solutions.
    pub bracket_low: Option<f64>,
    /// Smallest `b` with solutions.
    pub bracket_high: Option<f64>,
    /// Solvability changed more than once along the scan.
    pub inconsistent: bool,
    pub resolution: f64,
}

pub const THRESHOLD_RESOLUTION: f64 = 1e-3;

/// Solves the system along `tau = 1/2 + i b` for `b` on a uniform grid, then
/// bisects the first no-solution / solution transition down to
/// `THRESHOLD_RESOLUTION`.
pub fn scan_rhombus_threshold(
    b_min: f64,
    b_max: f64,
    n_b: usize,
    params: &SearchParams,
    cfg: crate::elliptic::EvalConfig,
) -> Result<ThresholdReport> {
    if !(b_min >= 3f64.sqrt() / 2.0 - 1e-12 && b_min < b_max && n_b >= 2) {
        return Err(Error::InvalidArgument(format!(
            "need sqrt(3)/2 <= b_min < b_max and n_b >= 2 (got {b_min}, {b_max}, {n_b})"
        )));
    }
    let solve_at = |b: f64| -> Result<ScanPoint> {
        let w = Weierstrass::new(Complex64::new(0.5, b), cfg)?;
        let rep = solve_pair_system(&w, params)?;
        log::info!("b = {b:.6}: {:?}, {} pairs", rep.status, rep.pairs.len());
        Ok(ScanPoint {
            b,
            status: rep.status,
            n_pairs: rep.pairs.len(),
            floor: rep.floor,
        })
    };
    let bs: Vec<f64> = (0..n_b)
        .map(|k| b_min + (b_max - b_min) * k as f64 / (n_b - 1) as f64)
        .collect();
    let mut points = Vec::with_capacity(n_b);
    for &b in &bs {
        points.push(solve_at(b)?);
    }
    let found = |p: &ScanPoint| p.status == PairStatus::SolutionsFound;
    let changes = points
        .windows(2)
        .filter(|w| found(&w[0]) != found(&w[1]))
        .count();
    let inconsistent = changes > 1 || points.first().map_or(false, |p| found(p)) && changes > 0;
    let first_found = points.iter().position(|p| found(p));
    let (mut lo, mut hi) = match first_found {
        Some(0) => (None, Some(points[0].b)),
        Some(k) => (Some(points[k - 1].b), Some(points[k].b)),
        None => (points.last().map(|p| p.b), None),
    };
    if let (Some(l), Some(h)) = (lo, hi) {
        let (mut l, mut h) = (l, h);
        while h - l > THRESHOLD_RESOLUTION {
            let mid = 0.5 * (l + h);
            let p = solve_at(mid)?;
            if found(&p) {
                h = mid;
            } else {
                l = mid;
            }
            points.push(p);
        }
        lo = Some(l);
        hi = Some(h);
    }
    points.sort_by(|x, y| x.b.total_cmp(&y.b));
    Ok(ThresholdReport {
        points,
        bracket_low: lo,
        bracket_high: hi,
        inconsistent,
        resolution: THRESHOLD_RESOLUTION,
    })
}
