//! Verification suites: each check measures one identity or structural claim
//! on a given modulus and records the measured values against a tolerance.
//!
//! The identity suite applies to every modulus; the hexagonal suite to
//! `tau = e^{i pi/3}`; the structure suite (boundary behaviour, partner
//! branches, `H` zeros, sign regions, exclusions) to rectangular moduli.

use std::collections::BTreeMap;
use std::f64::consts::PI;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::blowup::{
    axis_exclusion_check_with, branch_derivative, branch_point, conjugate_wp_values, count_h_zeros,
    partner_points, residuals, thresholds, trace_branch, BranchId, ExclusionSizes,
};
use crate::elliptic::{EvalConfig, Weierstrass};
use crate::error::Result;
use crate::green::{
    green_critical_points, green_derivatives, green_dz, green_dz_lattice_form, sign_region_check,
};
use crate::lattice::{BoundarySegment, TorusShape};
use crate::oracle::LatticeSumOracle;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CheckStatus {
    Pass,
    Fail,
    /// Search-style outcome: numerical evidence rather than a verified claim.
    Evidence,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckRecord {
    pub check_id: String,
    /// The mathematical statement the check verifies.
    pub paper_anchor: String,
    pub tau: Complex64,
    pub status: CheckStatus,
    pub measured: BTreeMap<String, f64>,
    pub tolerance: f64,
}

impl CheckRecord {
    pub fn new(
        check_id: &str,
        anchor: &str,
        tau: Complex64,
        measured: &[(&str, f64)],
        tolerance: f64,
        pass: bool,
    ) -> Self {
        CheckRecord {
            check_id: check_id.to_string(),
            paper_anchor: anchor.to_string(),
            tau,
            status: if pass {
                CheckStatus::Pass
            } else {
                CheckStatus::Fail
            },
            measured: measured.iter().map(|(k, v)| (k.to_string(), *v)).collect(),
            tolerance,
        }
    }

    /// A record whose measured value must not exceed `tolerance`.
    fn bound(id: &str, anchor: &str, tau: Complex64, name: &str, value: f64, tol: f64) -> Self {
        Self::new(id, anchor, tau, &[(name, value)], tol, value <= tol)
    }

    /// A failed record for a computation that raised an error.
    pub fn error(check_id: &str, anchor: &str, tau: Complex64, err: &crate::Error) -> Self {
        log::warn!("{check_id} at tau = {tau}: {err}");
        CheckRecord::new(check_id, anchor, tau, &[], 0.0, false)
    }

    pub fn passed(&self) -> bool {
        self.status != CheckStatus::Fail
    }
}

/// Sample counts of the suites.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SuiteSizes {
    pub cubic: usize,
    pub addition: usize,
    pub duplication: usize,
    pub oracle: usize,
    pub oracle_box: i64,
    pub symmetry: usize,
    pub boundary: usize,
    pub path: usize,
    pub h_scan: usize,
    pub partners: usize,
    pub sign: usize,
    pub interior: usize,
    pub curve: usize,
    pub per_half_axis: usize,
}

impl Default for SuiteSizes {
    fn default() -> Self {
        SuiteSizes::scaled(1000)
    }
}

impl SuiteSizes {
    /// Sizes proportional to `n` (the default is `n = 1000`).
    pub fn scaled(n: usize) -> Self {
        let n = n.max(20);
        SuiteSizes {
            cubic: n,
            addition: n / 10,
            duplication: n / 5,
            oracle: n / 20,
            oracle_box: 60,
            symmetry: n / 10,
            boundary: n,
            path: n / 2,
            h_scan: (2 * n / 5).max(50),
            partners: n / 5,
            sign: 2 * n,
            interior: 2 * n,
            curve: n / 2,
            per_half_axis: n / 20,
        }
    }
}

pub const CUBIC_TOL: f64 = 1e-9;
pub const LEGENDRE_TOL: f64 = 1e-10;
pub const ADDITION_TOL: f64 = 1e-9;
pub const DUPLICATION_TOL: f64 = 1e-9;
pub const ORACLE_TOL: f64 = 1e-8;
pub const G2_HEX_TOL: f64 = 1e-10;
pub const HOMOGENEITY_TOL: f64 = 1e-9;
pub const CRITICAL_MATCH_TOL: f64 = 1e-8;
pub const BRANCH_TOL: f64 = 1e-8;
pub const APRIME_TOL: f64 = 1e-6;
pub const DERIVATIVE_FD_TOL: f64 = 1e-4;

/// Minimum distance to the lattice of randomly sampled points.
const SAMPLE_GUARD: f64 = 0.05;

fn random_point(w: &Weierstrass, rng: &mut ChaCha8Rng, guard: f64) -> Complex64 {
    loop {
        let z = w
            .modulus()
            .from_coords(rng.gen_range(-0.5..0.5), rng.gen_range(-0.5..0.5));
        if w.reduce(z).dist_to_lattice > guard {
            return z;
        }
    }
}

pub fn hexagonal_tau() -> Complex64 {
    Complex64::new(0.5, 3f64.sqrt() / 2.0)
}

/// Suite seed mixed with the modulus so that each `tau` gets its own stream.
fn rng_for(seed: u64, tau: Complex64) -> ChaCha8Rng {
    let mix = tau.re.to_bits().rotate_left(17) ^ tau.im.to_bits();
    ChaCha8Rng::seed_from_u64(seed ^ mix)
}

/// Identities valid for every modulus.
pub fn identity_suite(w: &Weierstrass, sizes: &SuiteSizes, seed: u64) -> Vec<CheckRecord> {
    let tau = w.tau();
    let d = *w.data();
    let mut rng = rng_for(seed, tau);
    let mut out = Vec::new();

    // Cubic relation wp'^2 = 4 wp^3 - g2 wp - g3.
    let mut worst = 0.0f64;
    let mut failed = None;
    for _ in 0..sizes.cubic {
        let z = random_point(w, &mut rng, SAMPLE_GUARD);
        match w.eval(z) {
            Ok(t) => {
                let rhs = t.wp * t.wp * t.wp * 4.0 - d.g2 * t.wp - d.g3;
                let r = (t.wp_prime * t.wp_prime - rhs).norm() / (1.0 + t.wp.norm().powi(3));
                worst = worst.max(r);
            }
            Err(e) => failed = Some(e),
        }
    }
    out.push(match failed {
        Some(e) => CheckRecord::error(
            "cubic_relation",
            "cubic differential equation of wp",
            tau,
            &e,
        ),
        None => CheckRecord::bound(
            "cubic_relation",
            "cubic differential equation of wp",
            tau,
            "max_normalized_residual",
            worst,
            CUBIC_TOL,
        ),
    });

    // Vieta relations among the half-period values.
    let vieta = (d.e1 + d.e2 + d.e3)
        .norm()
        .max((d.e1 * d.e2 + d.e1 * d.e3 + d.e2 * d.e3 + d.g2 / 4.0).norm() / (1.0 + d.g2.norm()))
        .max((d.e1 * d.e2 * d.e3 - d.g3 / 4.0).norm() / (1.0 + d.g3.norm()));
    out.push(CheckRecord::bound(
        "half_period_values_vieta",
        "e1+e2+e3=0, e1e2+e1e3+e2e3=-g2/4",
        tau,
        "max_residual",
        vieta,
        CUBIC_TOL,
    ));

    let legendre = (d.eta1 * tau - d.eta2 - Complex64::new(0.0, 2.0 * PI)).norm();
    out.push(CheckRecord::bound(
        "legendre_relation",
        "Legendre relation eta1 tau - eta2 = 2 pi i",
        tau,
        "residual",
        legendre,
        LEGENDRE_TOL,
    ));

    let quasi = w
        .zeta(Complex64::new(0.5, 0.0))
        .map(|z| (z * 2.0 - d.eta1).norm());
    out.push(match quasi {
        Ok(r) => CheckRecord::bound(
            "eta1_from_zeta",
            "quasi-periodicity zeta(z+1) = zeta(z) + eta1",
            tau,
            "residual",
            r,
            LEGENDRE_TOL,
        ),
        Err(e) => CheckRecord::error(
            "eta1_from_zeta",
            "quasi-periodicity zeta(z+1) = zeta(z) + eta1",
            tau,
            &e,
        ),
    });

    // zeta(u+v) - zeta(u) - zeta(v) = (wp'(u) - wp'(v)) / (2 (wp(u) - wp(v))).
    let mut worst = 0.0f64;
    let mut done = 0;
    while done < sizes.addition {
        let u = random_point(w, &mut rng, SAMPLE_GUARD);
        let v = random_point(w, &mut rng, SAMPLE_GUARD);
        if w.reduce(u + v).dist_to_lattice < SAMPLE_GUARD {
            continue;
        }
        let (Ok(tu), Ok(tv), Ok(zuv)) = (w.eval(u), w.eval(v), w.zeta(u + v)) else {
            continue;
        };
        let den = tu.wp - tv.wp;
        if den.norm() < 1e-2 * (1.0 + tu.wp.norm()) {
            continue;
        }
        let rhs = (tu.wp_prime - tv.wp_prime) / (den * 2.0);
        let lhs = zuv - tu.zeta - tv.zeta;
        worst = worst.max((lhs - rhs).norm() / (1.0 + rhs.norm()));
        done += 1;
    }
    out.push(CheckRecord::bound(
        "zeta_addition",
        "addition formula for zeta",
        tau,
        "max_normalized_residual",
        worst,
        ADDITION_TOL,
    ));

    // Duplication wp(2z) + 2 wp(z) = (wp''(z) / wp'(z))^2 / 4.
    let mut worst = 0.0f64;
    let mut done = 0;
    while done < sizes.duplication {
        let z = random_point(w, &mut rng, SAMPLE_GUARD);
        if w.reduce(z * 2.0).dist_to_lattice < SAMPLE_GUARD {
            continue;
        }
        if let Ok(r) = w.duplication_check(z) {
            worst = worst.max(r);
            done += 1;
        }
    }
    out.push(CheckRecord::bound(
        "duplication_formula",
        "duplication formula wp(2z) + 2 wp(z) = (wp''/wp')^2 / 4",
        tau,
        "max_normalized_residual",
        worst,
        DUPLICATION_TOL,
    ));

    // Independent lattice sums.
    let oracle = LatticeSumOracle::new(tau, sizes.oracle_box);
    let mut worst = 0.0f64;
    for _ in 0..sizes.oracle {
        let z = random_point(w, &mut rng, SAMPLE_GUARD);
        let (wp_o, zeta_o) = oracle.wp_zeta(z);
        if let Ok(t) = w.eval(z) {
            worst = worst
                .max((t.wp - wp_o).norm() / (1.0 + wp_o.norm()))
                .max((t.zeta - zeta_o).norm() / (1.0 + zeta_o.norm()));
        } else {
            worst = f64::INFINITY;
        }
    }
    let consts = (oracle.eta1 - d.eta1)
        .norm()
        .max((oracle.g2 - d.g2).norm() / (1.0 + d.g2.norm()))
        .max((oracle.g3 - d.g3).norm() / (1.0 + d.g3.norm()));
    out.push(CheckRecord::new(
        "lattice_sum_oracle",
        "lattice-sum definition of wp and zeta",
        tau,
        &[
            ("max_relative_deviation", worst),
            ("max_constant_deviation", consts),
        ],
        ORACLE_TOL,
        worst <= ORACLE_TOL && consts <= ORACLE_TOL,
    ));

    // The two closed forms of G_z agree; the Hessian matches finite differences.
    let mut worst_forms = 0.0f64;
    let mut worst_fd = 0.0f64;
    let h = 1e-5;
    for _ in 0..sizes.symmetry {
        let z = random_point(w, &mut rng, SAMPLE_GUARD);
        let (Ok(g1), Ok(g2)) = (green_dz(w, z), green_dz_lattice_form(w, z)) else {
            worst_forms = f64::INFINITY;
            continue;
        };
        worst_forms = worst_forms.max((g1 - g2).norm());
        let grads = |p: Complex64| green_derivatives(w, p).map(|g| (g.gx1, g.gx2));
        if let (Ok(g), Ok(px), Ok(mx), Ok(py), Ok(my)) = (
            green_derivatives(w, z),
            grads(z + h),
            grads(z - h),
            grads(z + Complex64::new(0.0, h)),
            grads(z - Complex64::new(0.0, h)),
        ) {
            let fd11 = (px.0 - mx.0) / (2.0 * h);
            let fd12 = (py.0 - my.0) / (2.0 * h);
            let fd22 = (py.1 - my.1) / (2.0 * h);
            let scale = 1.0 + g.gx1x1.abs().max(g.gx1x2.abs()).max(g.gx2x2.abs());
            let dev = (fd11 - g.gx1x1)
                .abs()
                .max((fd12 - g.gx1x2).abs())
                .max((fd22 - g.gx2x2).abs());
            worst_fd = worst_fd.max(dev / scale);
        }
    }
    out.push(CheckRecord::bound(
        "green_closed_forms",
        "two closed forms of G_z",
        tau,
        "max_deviation",
        worst_forms,
        LEGENDRE_TOL,
    ));
    out.push(CheckRecord::bound(
        "green_hessian_fd",
        "closed-form Hessian of G",
        tau,
        "max_relative_deviation",
        worst_fd,
        1e-6,
    ));

    // Near the hexagonal modulus g2 vanishes to first order in |tau - rho|.
    let rho = hexagonal_tau();
    let dist = (tau - rho).norm();
    if dist < 1e-3 {
        let tol = if dist < 1e-12 {
            G2_HEX_TOL
        } else {
            G2_HEX_TOL + 2.0 * dist * g2_slope(w.config(), rho)
        };
        out.push(CheckRecord::bound(
            "g2_vanishes_hexagonal",
            "g2 vanishes at the hexagonal modulus",
            tau,
            "abs_g2",
            d.g2.norm(),
            tol,
        ));
    }
    out
}

/// `|dg2/dtau|` at `tau` by central differences.
fn g2_slope(cfg: &EvalConfig, tau: Complex64) -> f64 {
    let h = 1e-5;
    let g = |t: Complex64| crate::elliptic::lattice_data(t, *cfg).map(|d| d.g2);
    match (
        g(tau + Complex64::new(0.0, h)),
        g(tau - Complex64::new(0.0, h)),
    ) {
        (Ok(p), Ok(m)) => ((p - m) / (2.0 * h)).norm(),
        _ => f64::INFINITY,
    }
}

/// Checks specific to `tau = e^{i pi / 3}`.
pub fn hexagonal_suite(cfg: EvalConfig, sizes: &SuiteSizes, seed: u64) -> Result<Vec<CheckRecord>> {
    let rho = hexagonal_tau();
    let w = Weierstrass::new(rho, cfg)?;
    let d = *w.data();
    let mut rng = rng_for(seed, rho);
    let mut out = vec![CheckRecord::bound(
        "g2_vanishes_hexagonal",
        "g2 vanishes at the hexagonal modulus",
        rho,
        "abs_g2",
        d.g2.norm(),
        G2_HEX_TOL,
    )];

    let mut worst_wp = 0.0f64;
    let mut worst_g = 0.0f64;
    for _ in 0..sizes.symmetry {
        let z = random_point(&w, &mut rng, SAMPLE_GUARD);
        let (a, b) = (w.wp(z)?, w.wp(rho * z)?);
        worst_wp = worst_wp.max((a - rho * rho * b).norm() / (1.0 + a.norm()));
        let (ga, gb) = (green_dz(&w, z)?, green_dz(&w, rho * z)?);
        worst_g = worst_g.max((ga - rho * gb).norm());
    }
    out.push(CheckRecord::bound(
        "wp_rotation_homogeneity",
        "wp(z|rho) = rho^2 wp(rho z|rho)",
        rho,
        "max_relative_deviation",
        worst_wp,
        HOMOGENEITY_TOL,
    ));
    out.push(CheckRecord::bound(
        "green_rotation_symmetry",
        "rho G_z(rho z|rho) = G_z(z|rho)",
        rho,
        "max_deviation",
        worst_g,
        HOMOGENEITY_TOL,
    ));

    let search = green_critical_points(&w);
    let hp = w.half_periods();
    let third = (hp.w3_half * 2.0) / 3.0;
    let expected = [hp.w1_half, hp.w2_half, hp.w3_half, third, -third];
    let m = w.modulus();
    let worst = expected
        .iter()
        .map(|e| {
            search
                .points
                .iter()
                .map(|p| m.torus_distance(p.z, *e))
                .fold(f64::INFINITY, f64::min)
        })
        .fold(0.0, f64::max);
    let count = search.points.len();
    out.push(CheckRecord::new(
        "green_critical_points_hexagonal",
        "exactly five critical points of G at the hexagonal modulus",
        rho,
        &[("count", count as f64), ("max_distance_to_expected", worst)],
        CRITICAL_MATCH_TOL,
        count == 5 && worst <= CRITICAL_MATCH_TOL,
    ));
    Ok(out)
}

/// Structural facts on rectangular moduli: monotone boundary values, the
/// ordering of `e_k` and `±sqrt(g2/12)`, the partner branches, the zero sets of
/// `H` and `H'`, the Green sign regions and the exclusion arguments.
/// Non-rectangular moduli yield one failed `rectangular_required` record.
pub fn structure_suite(w: &Weierstrass, sizes: &SuiteSizes, seed: u64) -> Vec<CheckRecord> {
    let tau = w.tau();
    if w.modulus().shape() != TorusShape::Rectangular {
        let err = crate::Error::RectangularRequired {
            re: tau.re,
            im: tau.im,
        };
        return vec![CheckRecord::error(
            "rectangular_required",
            "structure of rectangular tori",
            tau,
            &err,
        )];
    }
    let mut out = Vec::new();
    let mut push = |r: Result<Vec<CheckRecord>>, id: &str, anchor: &str| match r {
        Ok(v) => out.extend(v),
        Err(e) => out.push(CheckRecord::error(id, anchor, tau, &e)),
    };
    push(
        boundary_checks(w, sizes),
        "boundary",
        "wp one to one along the boundary path",
    );
    push(
        inflection_checks(w),
        "inflection_points",
        "inflection points q+ and q-",
    );
    push(
        partner_checks(w, sizes, seed),
        "partners",
        "two partners b != -a",
    );
    push(
        branch_checks(w, sizes),
        "branches",
        "analytic branches b2 and b3",
    );
    push(h_checks(w, sizes), "h_zeros", "zero sets of H2 and H3");
    push(
        region_checks(w, sizes),
        "sign_regions",
        "sign regions of G_x1 and G_x2",
    );
    out
}

fn boundary_checks(w: &Weierstrass, sizes: &SuiteSizes) -> Result<Vec<CheckRecord>> {
    let tau = w.tau();
    let d = *w.data();
    let g2 = d.g2.re;
    let per = (sizes.boundary / 4).max(2);
    let mut max_imag = 0.0f64;
    let mut monotone = true;
    let mut prev = f64::INFINITY;
    let mut min_disc = f64::INFINITY;
    for (k, seg) in BoundarySegment::ALL.iter().enumerate() {
        for j in 0..per {
            let t = (j as f64 + 0.5) / per as f64;
            let z = seg.point(tau, t);
            let v = w.wp(z)?;
            max_imag = max_imag.max(v.im.abs() / (1.0 + v.norm()));
            if v.re >= prev {
                monotone = false;
            }
            prev = v.re;
            // g2 - 3 wp^2 > 0 on the right and top edges.
            if k == 1 || k == 2 {
                min_disc = min_disc.min(g2 - 3.0 * v.re * v.re);
            }
        }
    }
    let s = (g2 / 12.0).sqrt();
    let (e1, e2, e3) = (d.e1.re, d.e2.re, d.e3.re);
    let chain_gap = (-s - e2).min(e3 + s).min(s - e3).min(e1 - s);
    let realness = [d.g2, d.g3, d.e1, d.e2, d.e3, d.eta1]
        .iter()
        .map(|c| c.im.abs() / (1.0 + c.norm()))
        .fold(0.0, f64::max);
    Ok(vec![
        CheckRecord::new(
            "boundary_one_to_one",
            "wp one to one from the boundary path onto the real line",
            tau,
            &[
                ("max_relative_imag", max_imag),
                ("strictly_decreasing", monotone as u8 as f64),
            ],
            1e-12,
            monotone && max_imag <= 1e-12,
        ),
        CheckRecord::bound(
            "rectangular_constants_real",
            "g2, g3, e_k, eta1 real on rectangular tori",
            tau,
            "max_relative_imag",
            realness,
            1e-12,
        ),
        CheckRecord::new(
            "half_period_value_chain",
            "e2 < -sqrt(g2/12) < e3 < sqrt(g2/12) < e1",
            tau,
            &[("min_gap", chain_gap), ("g2", g2)],
            0.0,
            chain_gap > 0.0 && g2 > 0.0,
        ),
        CheckRecord::new(
            "partner_discriminant_on_boundary",
            "g2 - 3 wp(a)^2 > 0 on the boundary",
            tau,
            &[("min_value", min_disc)],
            0.0,
            min_disc > 0.0,
        ),
    ])
}

fn inflection_checks(w: &Weierstrass) -> Result<Vec<CheckRecord>> {
    let tau = w.tau();
    let d = *w.data();
    let height = tau.im;
    let root = (d.g2.re / 12.0).sqrt();
    let mut out = Vec::new();
    let (Some(qp), Some(qm)) = (d.q_plus, d.q_minus) else {
        return Err(crate::Error::ConvergenceFailure {
            what: "inflection points",
            residual: f64::NAN,
        });
    };
    let qp_ok = (qp.re - 0.5).abs() < 1e-14 && qp.im > 0.0 && qp.im < 0.5 * height;
    out.push(CheckRecord::new(
        "q_plus_on_right_edge",
        "q+ in (w1/2, w3/2)",
        tau,
        &[("q_plus_re", qp.re), ("q_plus_im", qp.im)],
        0.0,
        qp_ok,
    ));
    let qm_ok = (qm.im - 0.5 * height).abs() < 1e-14 && qm.re > 0.0 && qm.re < 0.5;
    out.push(CheckRecord::new(
        "q_minus_on_top_edge",
        "q- in (w2/2, w3/2)",
        tau,
        &[("q_minus_re", qm.re), ("q_minus_im", qm.im)],
        0.0,
        qm_ok,
    ));
    let wpp = w.wp_prime2(qp)?.norm().max(w.wp_prime2(qm)?.norm()) / (1.0 + d.g2.norm());
    out.push(CheckRecord::bound(
        "inflection_wp_second_derivative",
        "wp''(q+-) = 0",
        tau,
        "max_normalized_abs",
        wpp,
        1e-12,
    ));

    // 2q+ recovered by inverting wp(2q+) = -2 wp(q+) with the sign of wp'(2q+).
    let target = Complex64::new(-2.0 * root, 0.0);
    let hint = w.wp_prime(qp * 2.0)?;
    let two_q = w.wp_inverse(target, hint, None)?;
    let direct = w.reduce(qp * 2.0);
    let on_axis = two_q.z.re.abs() < 1e-12 && two_q.z.im > 0.0 && two_q.z.im < 0.5 * height;
    out.push(CheckRecord::new(
        "two_q_plus_on_imaginary_axis",
        "2q+ in (0, w2/2)",
        tau,
        &[
            ("two_q_plus_im", two_q.z.im),
            ("deviation_from_doubling", (two_q.z - direct.z).norm()),
        ],
        BRANCH_TOL,
        on_axis && (two_q.z - direct.z).norm() <= BRANCH_TOL,
    ));

    let dev_p = (w.wp(qp * 2.0)?.re + 2.0 * root).abs() / (1.0 + root);
    let dev_m = (w.wp(qm * 2.0)?.re - 2.0 * root).abs() / (1.0 + root);
    let above_e1 = 2.0 * root - d.e1.re;
    out.push(CheckRecord::new(
        "wp_at_doubled_inflection_points",
        "wp(2q+-) = -2 wp(q+-) = -+sqrt(g2/3), sqrt(g2/3) > e1",
        tau,
        &[
            ("dev_plus", dev_p),
            ("dev_minus", dev_m),
            ("sqrt_g2_over_3_minus_e1", above_e1),
        ],
        1e-10,
        dev_p <= 1e-10 && dev_m <= 1e-10 && above_e1 > 0.0,
    ));

    // wp'' > 0 on the negative real half-axis.
    let min_wpp = (1..200)
        .map(|k| {
            w.wp_prime2(Complex64::new(-0.5 * k as f64 / 200.0, 0.0))
                .map(|v| v.re)
        })
        .collect::<Result<Vec<f64>>>()?
        .into_iter()
        .fold(f64::INFINITY, f64::min);
    out.push(CheckRecord::new(
        "wp_second_derivative_positive_on_real_axis",
        "wp''(x) > 0 for x in (-1/2, 0)",
        tau,
        &[("min_value", min_wpp)],
        0.0,
        min_wpp > 0.0,
    ));
    Ok(out)
}

fn partner_checks(w: &Weierstrass, sizes: &SuiteSizes, seed: u64) -> Result<Vec<CheckRecord>> {
    let tau = w.tau();
    let d = *w.data();
    let mut rng = rng_for(seed.wrapping_add(1), tau);
    let mut wrong_count = 0usize;
    let mut worst_alg = 0.0f64;
    let mut worst_wp = 0.0f64;
    let mut worst_zeta = 0.0f64;
    for _ in 0..sizes.partners {
        let a = random_point(w, &mut rng, SAMPLE_GUARD);
        let set = partner_points(w, a)?;
        if set.partners.len() != 2 {
            wrong_count += 1;
        }
        let pa = w.wp(a)?;
        for b in &set.partners {
            let pb = w.wp(b.z)?;
            let alg = pa * pa + pa * pb + pb * pb - d.g2 / 4.0;
            worst_alg = worst_alg.max(alg.norm() / (1.0 + pa.norm_sqr() + pb.norm_sqr()));
            let r = residuals(w, a, b.z)?;
            // Where wp'(b) is small, b is ill-determined by wp(b) and the
            // attainable wp' residual grows like |wp''(b)| / |wp'(b)|.
            let tb = w.eval(b.z)?;
            let wpp_b = (tb.wp * tb.wp * 6.0 - d.g2 * 0.5).norm();
            let cond = 1e-5 * (1.0 + tb.wp.norm()) * wpp_b / tb.wp_prime.norm().max(1e-300);
            let scale = 1.0 + w.wp_prime(a)?.norm() + cond;
            worst_wp = worst_wp.max(r.res_wp / scale);
            worst_zeta = worst_zeta.max(r.res_zeta / scale);
        }
    }
    let mut out = vec![
        CheckRecord::new(
            "partner_count",
            "two distinct partners b != -a for generic a",
            tau,
            &[
                ("samples", sizes.partners as f64),
                ("wrong_count", wrong_count as f64),
            ],
            0.0,
            wrong_count == 0,
        ),
        CheckRecord::new(
            "partner_algebraic_relation",
            "wp(a)^2 + wp(a) wp(b) + wp(b)^2 = g2/4",
            tau,
            &[
                ("max_normalized_residual", worst_alg),
                ("max_res_wp", worst_wp),
                ("max_res_zeta", worst_zeta),
            ],
            1e-10,
            worst_alg <= 1e-10 && worst_wp <= 1e-10 && worst_zeta <= 1e-9,
        ),
    ];

    let hp = w.half_periods();
    let set = partner_points(w, hp.w1_half)?;
    let m = w.modulus();
    let has = |z: Complex64| {
        set.partners
            .iter()
            .any(|p| m.torus_distance(p.z, z) < 1e-12)
    };
    out.push(CheckRecord::new(
        "half_period_partners",
        "partners of w1/2 are w2/2 and w3/2",
        tau,
        &[("count", set.partners.len() as f64)],
        1e-12,
        set.partners.len() == 2 && has(hp.w2_half) && has(hp.w3_half),
    ));

    // Small |a|: partners close to e^{±i pi/3} a.
    let a = Complex64::from_polar(0.02, 0.7);
    let set = partner_points(w, a)?;
    let rot = Complex64::from_polar(1.0, PI / 3.0);
    let worst = set
        .partners
        .iter()
        .map(|b| {
            let d1 = (b.z - a * rot).norm();
            let d2 = (b.z - a * rot.conj()).norm();
            d1.min(d2) / a.norm()
        })
        .fold(0.0, f64::max);
    out.push(CheckRecord::new(
        "partners_near_origin",
        "b(a) = e^{+-i pi/3} a (1 + O(|a|))",
        tau,
        &[
            ("max_relative_deviation", worst),
            ("count", set.partners.len() as f64),
        ],
        0.05,
        set.partners.len() == 2 && worst <= 0.05,
    ));

    let roots = conjugate_wp_values(d.e1, d.g2);
    let dev = (roots[0] + roots[1] + d.e1).norm() + (roots[0] * roots[1] - d.e2 * d.e3).norm();
    out.push(CheckRecord::bound(
        "conjugate_values_of_e1",
        "wp(b) = (-wp(a) +- sqrt(g2 - 3 wp(a)^2)) / 2",
        tau,
        "residual",
        dev / (1.0 + d.g2.norm()),
        1e-12,
    ));
    Ok(out)
}

fn branch_checks(w: &Weierstrass, sizes: &SuiteSizes) -> Result<Vec<CheckRecord>> {
    let tau = w.tau();
    let d = *w.data();
    let hp = w.half_periods();
    let m = w.modulus();
    let height = tau.im;
    let qp = d.q_plus.ok_or(crate::Error::ConvergenceFailure {
        what: "inflection points",
        residual: f64::NAN,
    })?;
    let t_q = qp.im / (0.5 * height);
    let n = sizes.path.max(10);
    let b2 = trace_branch(w, BranchId::B2, n)?;
    let b3 = trace_branch(w, BranchId::B3, n)?;
    let mut out = Vec::new();

    let b2_q = branch_point(w, &b2, t_q)?;
    let b3_q = branch_point(w, &b3, t_q)?;
    let first = |p: &crate::blowup::BranchPath| p.samples[0];
    let last = |p: &crate::blowup::BranchPath| p.samples[p.samples.len() - 1];
    let endpoints = [
        (
            "b2_at_w1_half",
            "b2(w1/2) = -w3/2",
            first(&b2).b,
            -hp.w3_half,
        ),
        ("b2_at_q_plus", "b2(q+) = -q+", b2_q.b, -qp),
        (
            "b2_at_w3_half",
            "b2(w3/2) = -w1/2",
            last(&b2).b,
            -hp.w1_half,
        ),
        ("b3_at_w1_half", "b3(w1/2) = w2/2", first(&b3).b, hp.w2_half),
        ("b3_at_q_plus", "b3(q+) = 2q+", b3_q.b, qp * 2.0),
        ("b3_at_w3_half", "b3(w3/2) = w2/2", last(&b3).b, hp.w2_half),
    ];
    for (id, anchor, got, want) in endpoints {
        out.push(CheckRecord::bound(
            id,
            anchor,
            tau,
            "torus_distance",
            m.torus_distance(got, want),
            BRANCH_TOL,
        ));
    }

    // b2 on the line Re b = -1/2 between -w3/2 and -w1/2; b3 on the imaginary
    // axis between 2q+ and w2/2.
    let b2_dev = b2
        .samples
        .iter()
        .map(|s| {
            let off = (s.b.re + 0.5).abs();
            let below = (s.b.im - 0.0).max(0.0) + (-0.5 * height - s.b.im).max(0.0);
            off + below
        })
        .fold(0.0, f64::max);
    let two_q = 2.0 * qp.im;
    let b3_dev = b3
        .samples
        .iter()
        .map(|s| {
            let r = w.reduce(s.b).z;
            r.re.abs() + (two_q - r.im).max(0.0) + (r.im - 0.5 * height).max(0.0)
        })
        .fold(0.0, f64::max);
    out.push(CheckRecord::bound(
        "b2_range",
        "b2(a) on the segment [-w3/2, -w1/2]",
        tau,
        "max_deviation",
        b2_dev,
        BRANCH_TOL,
    ));
    out.push(CheckRecord::bound(
        "b3_range",
        "b3(a) on the segment [2q+, w2/2]",
        tau,
        "max_deviation",
        b3_dev,
        BRANCH_TOL,
    ));

    // f2 between -e2 and 2 wp(q+), maximal at q+; f3 strictly decreasing
    // from -e3 to -e1.
    let two_wpq = (d.g2.re / 3.0).sqrt();
    let slack = 1e-10 * (1.0 + two_wpq);
    let f2_min = b2.samples.iter().map(|s| s.f).fold(f64::INFINITY, f64::min);
    let f2_max = b2
        .samples
        .iter()
        .map(|s| s.f)
        .fold(f64::NEG_INFINITY, f64::max);
    let argmax = b2
        .samples
        .iter()
        .max_by(|x, y| x.f.total_cmp(&y.f))
        .map(|s| s.t)
        .unwrap_or(f64::NAN);
    let step = 1.0 / (n - 1) as f64;
    out.push(CheckRecord::new(
        "f2_bounds",
        "-e2 <= wp(a) + wp(b2(a)) <= 2 wp(q+)",
        tau,
        &[
            ("f2_min", f2_min),
            ("f2_max", f2_max),
            ("minus_e2", -d.e2.re),
            ("two_wp_q_plus", two_wpq),
            ("f2_at_q_plus", b2_q.f),
        ],
        slack,
        f2_min >= -d.e2.re - slack
            && f2_max <= two_wpq + slack
            && (b2_q.f - two_wpq).abs() <= slack
            && (argmax - t_q).abs() <= step,
    ));
    let f3_decreasing = b3.samples.windows(2).all(|p| p[1].f < p[0].f);
    let f3_start = first(&b3).f;
    let f3_end = last(&b3).f;
    let f3_tol = 1e-10 * (1.0 + d.e1.norm());
    out.push(CheckRecord::new(
        "f3_monotone",
        "wp(a) + wp(b3(a)) strictly monotone from -e3 to -e1",
        tau,
        &[
            ("strictly_decreasing", f3_decreasing as u8 as f64),
            ("f3_start_plus_e3", f3_start + d.e3.re),
            ("f3_end_plus_e1", f3_end + d.e1.re),
        ],
        f3_tol,
        f3_decreasing && (f3_start + d.e3.re).abs() <= f3_tol && (f3_end + d.e1.re).abs() <= f3_tol,
    ));

    // b' from the closed form against central differences of the branch.
    let mut worst = 0.0f64;
    let dt = 1e-6;
    let stride = (n / 50).max(1);
    for s in b2.samples.iter().skip(1).step_by(stride) {
        if s.t + dt > 1.0 {
            continue;
        }
        let plus = branch_point(w, &b2, s.t + dt)?;
        let minus = branch_point(w, &b2, s.t - dt)?;
        let fd = (plus.b - minus.b) / (plus.a - minus.a);
        let exact = branch_derivative(Complex64::new(s.wp_a, 0.0), Complex64::new(s.wp_b, 0.0))?;
        worst = worst.max((fd - exact).norm() / (1.0 + exact.norm()));
    }
    out.push(CheckRecord::bound(
        "branch_derivative_fd",
        "b'(a) = (2 wp(a) + wp(b)) / (wp(a) + 2 wp(b))",
        tau,
        "max_relative_deviation",
        worst,
        DERIVATIVE_FD_TOL,
    ));
    Ok(out)
}

fn h_checks(w: &Weierstrass, sizes: &SuiteSizes) -> Result<Vec<CheckRecord>> {
    let tau = w.tau();
    let d = *w.data();
    let height = tau.im;
    let qp = d.q_plus.unwrap_or(Complex64::new(f64::NAN, f64::NAN));
    let th = thresholds(w)?;
    let mut out = Vec::new();

    let vieta = (th.b_plus + th.b_minus + d.eta1_tilde.re).abs()
        + (th.b_plus * th.b_minus + d.g2.re / 6.0).abs() / (1.0 + d.g2.re);
    out.push(CheckRecord::new(
        "critical_values_b_plus_minus",
        "B+ > 0 > B-, B+ >= -e2, B+ + B- = -eta1~, B+ B- = -g2/6",
        tau,
        &[
            ("b_plus", th.b_plus),
            ("b_minus", th.b_minus),
            ("minus_e2", -d.e2.re),
            ("vieta_residual", vieta),
        ],
        1e-12,
        th.b_plus > 0.0 && th.b_minus < 0.0 && th.b_plus >= -d.e2.re && vieta <= 1e-12,
    ));

    let n = sizes.h_scan.max(20);
    let h2 = count_h_zeros(w, BranchId::B2, n)?;
    let expected = [0.0, qp.im, 0.5 * height];
    let h2_dev = if h2.h_zeros.len() == 3 {
        h2.h_zeros
            .iter()
            .zip(expected)
            .map(|(z, e)| (z.im - e).abs())
            .fold(0.0, f64::max)
    } else {
        f64::INFINITY
    };
    out.push(CheckRecord::new(
        "h2_zeros",
        "H2 vanishes exactly at w1/2, q+, w3/2",
        tau,
        &[
            ("count", h2.h_zeros.len() as f64),
            ("max_deviation", h2_dev),
        ],
        BRANCH_TOL,
        h2.h_zeros.len() == 3 && h2_dev <= BRANCH_TOL,
    ));
    let mut predicted = [th.a_plus.im, th.a_minus.im];
    predicted.sort_by(f64::total_cmp);
    let hp_dev = if h2.hprime_zeros.len() == 2 {
        h2.hprime_zeros
            .iter()
            .zip(predicted)
            .map(|(z, e)| (z.im - e).abs())
            .fold(0.0, f64::max)
    } else {
        f64::INFINITY
    };
    out.push(CheckRecord::new(
        "h2_prime_zeros",
        "H2' has exactly two zeros a+ and a-",
        tau,
        &[
            ("count", h2.hprime_zeros.len() as f64),
            ("max_deviation_from_a_pm", hp_dev),
        ],
        APRIME_TOL,
        h2.hprime_zeros.len() == 2 && hp_dev <= APRIME_TOL,
    ));

    let h3 = count_h_zeros(w, BranchId::B3, n)?;
    let endpoints_only = h3.h_zeros.len() == 2
        && h3.h_zeros[0].im.abs() < 1e-12
        && (h3.h_zeros[1].im - 0.5 * height).abs() < 1e-12;
    out.push(CheckRecord::new(
        "h3_zeros",
        "H3 vanishes only at the endpoints",
        tau,
        &[("count", h3.h_zeros.len() as f64)],
        0.0,
        endpoints_only,
    ));
    out.push(CheckRecord::new(
        "h3_prime_zeros",
        "H3' has exactly one zero",
        tau,
        &[("count", h3.hprime_zeros.len() as f64)],
        0.0,
        h3.hprime_zeros.len() == 1,
    ));
    Ok(out)
}

fn region_checks(w: &Weierstrass, sizes: &SuiteSizes) -> Result<Vec<CheckRecord>> {
    let tau = w.tau();
    let signs = sign_region_check(w, sizes.sign)?;
    let excl = axis_exclusion_check_with(
        w,
        ExclusionSizes {
            per_half_axis: sizes.per_half_axis.max(1),
            interior: sizes.interior,
            curve: sizes.curve,
        },
    )?;
    let crit = green_critical_points(w);
    let hp = w.half_periods();
    let all_half = hp.all().iter().all(|h| {
        crit.points
            .iter()
            .any(|p| w.modulus().torus_distance(p.z, *h) < CRITICAL_MATCH_TOL)
    });
    Ok(vec![
        CheckRecord::new(
            "green_sign_regions",
            "strict signs of G_x1 and G_x2 on the open half-cells",
            tau,
            &[
                ("samples_per_condition", signs.samples_per_condition as f64),
                ("checked", signs.checked as f64),
                ("violations", signs.violations.len() as f64),
            ],
            signs.margin,
            signs.violations.is_empty(),
        ),
        CheckRecord::new(
            "axis_exclusion",
            "neither a nor b on the coordinate axes",
            tau,
            &[
                ("samples", excl.axis_samples as f64),
                ("min_green_residual", excl.axis_min_residual),
                ("violations", excl.axis_violations.len() as f64),
            ],
            crate::blowup::exclusion::AXIS_RESIDUAL_MIN,
            excl.axis_violations.is_empty(),
        ),
        CheckRecord::new(
            "partner_sign_condition",
            "x1 or x2 coordinates of a and b share a sign",
            tau,
            &[
                ("samples", excl.sign_samples as f64),
                ("violations", excl.sign_violations.len() as f64),
            ],
            crate::blowup::exclusion::SIGN_SLACK,
            excl.sign_violations.is_empty(),
        ),
        CheckRecord::new(
            "level_curve_containment",
            "{wp' in iR+} off iR- lies in {x2 > 0}",
            tau,
            &[
                ("samples", excl.curve_samples as f64),
                ("violations", excl.curve_violations.len() as f64),
            ],
            crate::blowup::exclusion::SIGN_SLACK,
            excl.curve_violations.is_empty() && excl.curve_samples >= sizes.curve,
        ),
        CheckRecord::new(
            "green_critical_points_rectangular",
            "critical points of G on rectangular tori are the half-periods",
            tau,
            &[("count", crit.points.len() as f64)],
            CRITICAL_MATCH_TOL,
            crit.points.len() == 3 && all_half,
        ),
    ])
}
