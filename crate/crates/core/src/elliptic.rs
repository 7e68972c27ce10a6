//! Weierstrass `wp`, `wp'`, `wp''` and `zeta` for the lattice `Z + Z tau`.
//!
//! Evaluation uses the nome expansion with `q = exp(2 pi i tau)`:
//!
//! ```text
//! wp(z)   = pi^2 csc^2(pi z) - eta1 - 4 pi^2 sum_k k (x_k + y_k) / (1 - q^k)
//! wp'(z)  = -2 pi^3 cot(pi z) csc^2(pi z) - 8 i pi^3 sum_k k^2 (x_k - y_k) / (1 - q^k)
//! zeta(z) = eta1 z + pi cot(pi z) - 2 pi i sum_k (x_k - y_k) / (1 - q^k)
//! ```
//!
//! where `x_k = exp(2 pi i k (tau + z))`, `y_k = exp(2 pi i k (tau - z))` and
//! `eta1 = pi^2 E2(tau) / 3`. On the centered cell `|Im z| <= Im tau / 2`, so
//! every term decays at least like `exp(-pi k Im tau)`.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lattice::{half_periods, HalfPeriods, TorusModulus, TorusPoint};

const I: Complex64 = Complex64 { re: 0.0, im: 1.0 };

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EvalConfig {
    pub rel_tol: f64,
    pub pole_guard: f64,
    pub max_terms: usize,
}

impl Default for EvalConfig {
    fn default() -> Self {
        EvalConfig {
            rel_tol: 1e-14,
            pole_guard: 1e-4,
            max_terms: 400,
        }
    }
}

impl EvalConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.rel_tol >= 1e-14) {
            return Err(Error::InvalidArgument(format!(
                "rel_tol {} below 1e-14",
                self.rel_tol
            )));
        }
        if !(self.pole_guard > 0.0) {
            return Err(Error::InvalidArgument("pole_guard must be positive".into()));
        }
        if self.max_terms == 0 {
            return Err(Error::InvalidArgument("max_terms must be positive".into()));
        }
        Ok(())
    }
}

/// Per-modulus constants.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LatticeData {
    pub g2: Complex64,
    pub g3: Complex64,
    pub e1: Complex64,
    pub e2: Complex64,
    pub e3: Complex64,
    pub eta1: Complex64,
    pub eta2: Complex64,
    /// Solution of `wp(q+) = +sqrt(g2/12)`; on rectangular tori it lies on the right edge.
    pub q_plus: Option<Complex64>,
    /// Solution of `wp(q-) = -sqrt(g2/12)`; on rectangular tori it lies on the top edge.
    pub q_minus: Option<Complex64>,
    /// `eta1 - 2 pi / Im tau`.
    pub eta1_tilde: Complex64,
}

impl LatticeData {
    pub fn e(&self, k: usize) -> Complex64 {
        match k {
            1 => self.e1,
            2 => self.e2,
            3 => self.e3,
            _ => panic!("half-period index {k} out of range"),
        }
    }
}

/// `wp`, `wp'` and `zeta` at one point, sharing the series terms.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WpTriple {
    pub wp: Complex64,
    pub wp_prime: Complex64,
    pub zeta: Complex64,
}

/// Evaluator for a fixed modulus. Construction computes and caches the
/// lattice constants; afterwards every method is a pure function.
#[derive(Debug, Clone)]
pub struct Weierstrass {
    modulus: TorusModulus,
    cfg: EvalConfig,
    // 1 / (1 - q^k) for k = 1..
    inv_one_minus_qk: Vec<Complex64>,
    data: LatticeData,
    seed_table: Vec<(Complex64, Complex64)>,
}

impl Weierstrass {
    pub fn new(tau: Complex64, cfg: EvalConfig) -> Result<Self> {
        cfg.validate()?;
        let modulus = TorusModulus::new(tau)?;
        let q = (I * 2.0 * PI * tau).exp();
        let mut inv_one_minus_qk = Vec::with_capacity(cfg.max_terms);
        let mut qk = Complex64::new(1.0, 0.0);
        let mut s1 = Complex64::new(0.0, 0.0);
        let mut s3 = Complex64::new(0.0, 0.0);
        let mut s5 = Complex64::new(0.0, 0.0);
        let mut converged = false;
        for k in 1..=cfg.max_terms {
            qk *= q;
            let d = (Complex64::new(1.0, 0.0) - qk).inv();
            inv_one_minus_qk.push(d);
            let kf = k as f64;
            let t = qk * d;
            s1 += t * kf;
            s3 += t * kf.powi(3);
            s5 += t * kf.powi(5);
            // The point series decays like |q|^(k/2) on the cell, slower than
            // the Eisenstein sums, so the table runs until that tail is negligible.
            if qk.norm().sqrt() * kf * kf * 8.0 * PI.powi(3) < 1e-3 * f64::EPSILON {
                converged = true;
                break;
            }
        }
        if !converged {
            return Err(Error::ConvergenceFailure {
                what: "Eisenstein series",
                residual: qk.norm(),
            });
        }
        let pi2 = PI * PI;
        let eta1 = (Complex64::new(1.0, 0.0) - s1 * 24.0) * (pi2 / 3.0);
        let g2 = (Complex64::new(1.0, 0.0) + s3 * 240.0) * (4.0 * pi2 * pi2 / 3.0);
        let g3 = (Complex64::new(1.0, 0.0) - s5 * 504.0) * (8.0 * pi2 * pi2 * pi2 / 27.0);
        let eta2 = eta1 * tau - I * 2.0 * PI;
        let nan = Complex64::new(f64::NAN, f64::NAN);
        let mut w = Weierstrass {
            modulus,
            cfg,
            inv_one_minus_qk,
            data: LatticeData {
                g2,
                g3,
                e1: nan,
                e2: nan,
                e3: nan,
                eta1,
                eta2,
                q_plus: None,
                q_minus: None,
                eta1_tilde: eta1 - 2.0 * PI / tau.im,
            },
            seed_table: Vec::new(),
        };
        let hp = w.half_periods();
        w.data.e1 = w.series(hp.w1_half)?.wp;
        w.data.e2 = w.series(hp.w2_half)?.wp;
        w.data.e3 = w.series(hp.w3_half)?.wp;
        w.seed_table = w.build_seed_table()?;
        let (qp, qm) = w.inflection_points()?;
        w.data.q_plus = qp;
        w.data.q_minus = qm;
        Ok(w)
    }

    pub fn modulus(&self) -> &TorusModulus {
        &self.modulus
    }

    pub fn tau(&self) -> Complex64 {
        self.modulus.tau()
    }

    pub fn config(&self) -> &EvalConfig {
        &self.cfg
    }

    pub fn data(&self) -> &LatticeData {
        &self.data
    }

    pub fn half_periods(&self) -> HalfPeriods {
        half_periods(self.tau())
    }

    pub fn reduce(&self, z: Complex64) -> TorusPoint {
        self.modulus.reduce(z)
    }

    fn guard(&self, p: &TorusPoint) -> Result<()> {
        if p.dist_to_lattice > self.cfg.pole_guard {
            Ok(())
        } else {
            Err(Error::TooCloseToPole {
                dist: p.dist_to_lattice,
                guard: self.cfg.pole_guard,
            })
        }
    }

    /// Series evaluation at a point of the centered cell (no pole check).
    fn series(&self, z: Complex64) -> Result<WpTriple> {
        let tau = self.tau();
        let piz = z * PI;
        let (s, c) = (piz.sin(), piz.cos());
        let inv_s = s.inv();
        let csc2 = inv_s * inv_s;
        let pi2 = PI * PI;
        let pi3 = pi2 * PI;
        let mut wp = csc2 * pi2 - self.data.eta1;
        let mut wp_prime = c * csc2 * inv_s * (-2.0 * pi3);
        let mut zeta = self.data.eta1 * z + c * inv_s * PI;
        let scale = 1.0 + wp.norm() + wp_prime.norm() + zeta.norm();

        let x1 = (I * 2.0 * PI * (tau + z)).exp();
        let y1 = (I * 2.0 * PI * (tau - z)).exp();
        let (mut xk, mut yk) = (x1, y1);
        let mut sum_wp = Complex64::new(0.0, 0.0);
        let mut sum_wpp = Complex64::new(0.0, 0.0);
        let mut sum_zeta = Complex64::new(0.0, 0.0);
        let mut converged = false;
        let mut last = f64::INFINITY;
        for (k0, d) in self.inv_one_minus_qk.iter().enumerate() {
            let kf = (k0 + 1) as f64;
            let plus = (xk + yk) * d;
            let minus = (xk - yk) * d;
            sum_wp += plus * kf;
            sum_wpp += minus * (kf * kf);
            sum_zeta += minus;
            last = (xk.norm() + yk.norm()) * kf * kf * 8.0 * pi3;
            if last < self.cfg.rel_tol * 1e-2 * scale {
                converged = true;
                break;
            }
            xk *= x1;
            yk *= y1;
        }
        if !converged {
            return Err(Error::ConvergenceFailure {
                what: "nome series",
                residual: last / scale,
            });
        }
        wp -= sum_wp * (4.0 * pi2);
        wp_prime -= I * sum_wpp * (8.0 * pi3);
        zeta -= I * sum_zeta * (2.0 * PI);
        Ok(WpTriple { wp, wp_prime, zeta })
    }

    /// `wp`, `wp'`, and `zeta` at `z` (any representative).
    pub fn eval(&self, z: Complex64) -> Result<WpTriple> {
        let p = self.reduce(z);
        self.guard(&p)?;
        let mut t = self.series(p.z)?;
        // zeta is only quasi-periodic: undo the reduction z = p.z + m + n tau.
        let (m, n) = self.lattice_offset(z, p.z);
        t.zeta += self.data.eta1 * m + self.data.eta2 * n;
        Ok(t)
    }

    fn lattice_offset(&self, z: Complex64, reduced: Complex64) -> (f64, f64) {
        let (r, s) = self.modulus.coords(z - reduced);
        (r.round(), s.round())
    }

    pub fn wp(&self, z: Complex64) -> Result<Complex64> {
        Ok(self.eval(z)?.wp)
    }

    pub fn wp_prime(&self, z: Complex64) -> Result<Complex64> {
        Ok(self.eval(z)?.wp_prime)
    }

    /// `6 wp^2 - g2 / 2`.
    pub fn wp_prime2(&self, z: Complex64) -> Result<Complex64> {
        let p = self.wp(z)?;
        Ok(p * p * 6.0 - self.data.g2 * 0.5)
    }

    pub fn zeta(&self, z: Complex64) -> Result<Complex64> {
        Ok(self.eval(z)?.zeta)
    }

    /// `|wp(2z) + 2 wp(z) - (wp''(z) / wp'(z))^2 / 4|`, normalized by the
    /// magnitude of the terms.
    pub fn duplication_check(&self, z: Complex64) -> Result<f64> {
        let t = self.eval(z)?;
        let wp2z = self.wp(z * 2.0)?;
        if t.wp_prime.norm() == 0.0 {
            return Err(Error::InvalidArgument("wp'(z) = 0".into()));
        }
        let wpp = t.wp * t.wp * 6.0 - self.data.g2 * 0.5;
        let ratio = wpp / t.wp_prime;
        let rhs = ratio * ratio * 0.25;
        let lhs = wp2z + t.wp * 2.0;
        Ok((lhs - rhs).norm() / (1.0 + wp2z.norm() + 2.0 * t.wp.norm() + rhs.norm()))
    }

    fn build_seed_table(&self) -> Result<Vec<(Complex64, Complex64)>> {
        let n = 24;
        let mut table = Vec::with_capacity(n * n / 2);
        // wp is even, so half of the cell (s > 0 or s = 0, r > 0) suffices.
        for i in 0..n {
            for j in 0..=n / 2 {
                let r = -0.5 + (i as f64 + 0.5) / n as f64;
                let s = j as f64 / n as f64;
                let z = self.modulus.from_coords(r, s);
                let p = self.reduce(z);
                if p.dist_to_lattice < 0.05 {
                    continue;
                }
                table.push((p.z, self.series(p.z)?.wp));
            }
        }
        Ok(table)
    }

    fn inflection_points(&self) -> Result<(Option<Complex64>, Option<Complex64>)> {
        let g2 = self.data.g2;
        let hp = self.half_periods();
        if self.modulus.is_rectangular() {
            let target = (g2.re / 12.0).sqrt();
            // Right edge: wp decreases from e1 to e3 as Im z grows.
            let qp = self.bracketed_on_segment(hp.w1_half, hp.w3_half, target)?;
            // Top edge: wp decreases from e3 to e2 as Re z shrinks.
            let qm = self.bracketed_on_segment(hp.w3_half, hp.w2_half, -target)?;
            return Ok((Some(qp), Some(qm)));
        }
        let root = (g2 / 12.0).sqrt();
        let qp = self
            .preimage(root, Some((hp.w1_half + hp.w3_half) * 0.5))
            .ok()
            .map(|z| self.reduce(z).z);
        let qm = self
            .preimage(-root, Some((hp.w2_half + hp.w3_half) * 0.5))
            .ok()
            .map(|z| self.reduce(z).z);
        Ok((qp, qm))
    }

    /// Solves `wp(z) = target` on the straight segment `[z1, z2]`, along which
    /// `wp` is real and strictly decreasing (rectangular moduli only).
    pub(crate) fn bracketed_on_segment(
        &self,
        z1: Complex64,
        z2: Complex64,
        target: f64,
    ) -> Result<Complex64> {
        let dir = z2 - z1;
        let f = |t: f64| -> Result<(f64, f64)> {
            let tr = self.eval(z1 + dir * t)?;
            Ok((tr.wp.re - target, (tr.wp_prime * dir).re))
        };
        let (mut lo, mut hi) = (0.0f64, 1.0f64);
        let (flo, _) = f(lo)?;
        let (fhi, _) = f(hi)?;
        if !(flo >= 0.0 && fhi <= 0.0) {
            return Err(Error::ConvergenceFailure {
                what: "segment inversion bracket",
                residual: flo.min(-fhi),
            });
        }
        let mut t = 0.5;
        for _ in 0..200 {
            let (ft, dft) = f(t)?;
            if ft == 0.0 {
                return Ok(z1 + dir * t);
            }
            if ft > 0.0 {
                lo = t;
            } else {
                hi = t;
            }
            let newton = t - ft / dft;
            t = if dft < 0.0 && newton > lo && newton < hi {
                newton
            } else {
                0.5 * (lo + hi)
            };
            if hi - lo < 1e-15 || (ft.abs() < 1e-15 * (1.0 + target.abs()) && hi - lo < 1e-6) {
                let (ft, dft) = f(t)?;
                if dft != 0.0 {
                    let polished = t - ft / dft;
                    if polished >= lo && polished <= hi {
                        t = polished;
                    }
                }
                return Ok(z1 + dir * t);
            }
        }
        Err(Error::ConvergenceFailure {
            what: "segment inversion",
            residual: hi - lo,
        })
    }

    /// Some preimage of `w` under `wp` (either of `+-z`).
    pub fn preimage(&self, w: Complex64, seed: Option<Complex64>) -> Result<Complex64> {
        if !(w.re.is_finite() && w.im.is_finite()) {
            return Err(Error::InvalidArgument(
                "wp_inverse target is not finite".into(),
            ));
        }
        let hp = self.half_periods();
        for k in 1..=3 {
            let ek = self.data.e(k);
            if (w - ek).norm() <= 1e-13 * (1.0 + ek.norm()) {
                return Ok(hp.get(k));
            }
        }
        let tol = 1e-13 * (1.0 + w.norm());
        let mut best: Option<(Complex64, f64)> = None;
        let mut try_seed = |s: Complex64| -> Option<Complex64> {
            match self.newton_wp(w, s) {
                Some((z, res)) if res <= tol => Some(z),
                Some((z, res)) => {
                    if best.map_or(true, |(_, r)| res < r) {
                        best = Some((z, res));
                    }
                    None
                }
                None => None,
            }
        };
        if let Some(z) = seed.and_then(&mut try_seed) {
            return Ok(z);
        }
        if let Some(s) = carlson_rf(w - self.data.e1, w - self.data.e2, w - self.data.e3) {
            if let Some(z) = try_seed(s) {
                return Ok(z);
            }
        }
        let mut ranked: Vec<(f64, Complex64)> = self
            .seed_table
            .iter()
            .map(|&(z, v)| ((v - w).norm() / (1.0 + v.norm()), z))
            .collect();
        ranked.sort_by(|a, b| a.0.total_cmp(&b.0));
        for &(_, z) in ranked.iter().take(6) {
            if let Some(z) = try_seed(z) {
                return Ok(z);
            }
        }
        Err(Error::ConvergenceFailure {
            what: "wp inversion",
            residual: best.map_or(f64::INFINITY, |b| b.1),
        })
    }

    /// Finds `z` with `wp(z) = w`, choosing between the two preimages `+-z`
    /// the one whose `wp'` is closer to `sign_hint`.
    pub fn wp_inverse(
        &self,
        w: Complex64,
        sign_hint: Complex64,
        seed: Option<Complex64>,
    ) -> Result<TorusPoint> {
        let hp = self.half_periods();
        let z = self.preimage(w, seed)?;
        let d = self.eval(z)?.wp_prime;
        let keep = (d - sign_hint).norm();
        let flip = (d + sign_hint).norm();
        let scale = 1.0 + d.norm() + sign_hint.norm();
        let near_half_period = hp
            .all()
            .iter()
            .any(|&h| self.modulus.torus_distance(z, h) < 1e-6);
        if (keep - flip).abs() <= 1e-9 * scale && !near_half_period {
            return Err(Error::AmbiguousBranch {
                wp_prime_abs: d.norm(),
            });
        }
        Ok(if keep <= flip {
            self.reduce(z)
        } else {
            self.reduce(-z)
        })
    }

    /// Newton iteration on `wp(z) = w` using the local quadratic model so that
    /// targets next to a half-period (double roots of `wp - e_k`) still converge
    /// quickly. Returns the final iterate and its residual.
    fn newton_wp(&self, w: Complex64, seed: Complex64) -> Option<(Complex64, f64)> {
        let mut z = seed;
        let max_step = 0.25 * self.tau().im.min(1.0);
        let mut extra = 0;
        for _ in 0..60 {
            let t = self.eval(z).ok()?;
            let f = t.wp - w;
            let res = f.norm();
            if res <= 1e-14 * (1.0 + w.norm()) || !res.is_finite() {
                extra += 1;
                if extra > 1 || !res.is_finite() {
                    return res.is_finite().then_some((z, res));
                }
            }
            let p2 = t.wp * t.wp * 6.0 - self.data.g2 * 0.5;
            let disc = (t.wp_prime * t.wp_prime - p2 * f * 2.0).sqrt();
            let den = if (t.wp_prime + disc).norm() >= (t.wp_prime - disc).norm() {
                t.wp_prime + disc
            } else {
                t.wp_prime - disc
            };
            if den.norm() == 0.0 {
                return None;
            }
            let mut h = -f * 2.0 / den;
            if h.norm() > max_step {
                h *= max_step / h.norm();
            }
            z += h;
            if h.norm() < 1e-15 * (1.0 + z.norm()) {
                break;
            }
        }
        let res = (self.eval(z).ok()?.wp - w).norm();
        Some((z, res))
    }
}

/// Carlson's symmetric integral `R_F(x, y, z)` by the duplication algorithm.
/// With `x, y, z = w - e_k` it returns a preimage of `w` under `wp`.
pub(crate) fn carlson_rf(x: Complex64, y: Complex64, z: Complex64) -> Option<Complex64> {
    let (mut x, mut y, mut z) = (x, y, z);
    let zeros = [x, y, z].iter().filter(|v| v.norm() == 0.0).count();
    if zeros > 1
        || ![x, y, z]
            .iter()
            .all(|v| v.re.is_finite() && v.im.is_finite())
    {
        return None;
    }
    for _ in 0..100 {
        let a = (x + y + z) / 3.0;
        let dev = (a - x).norm().max((a - y).norm()).max((a - z).norm());
        if dev <= 1e-3 * a.norm() {
            let dx = (a - x) / a;
            let dy = (a - y) / a;
            let dz = -(dx + dy);
            let e2 = dx * dy - dz * dz;
            let e3 = dx * dy * dz;
            let series = Complex64::new(1.0, 0.0) - e2 / 10.0 + e3 / 14.0 + e2 * e2 / 24.0
                - e2 * e3 * (3.0 / 44.0);
            return Some(series / a.sqrt());
        }
        let (sx, sy, sz) = (x.sqrt(), y.sqrt(), z.sqrt());
        let lambda = sx * sy + sx * sz + sy * sz;
        x = (x + lambda) * 0.25;
        y = (y + lambda) * 0.25;
        z = (z + lambda) * 0.25;
    }
    None
}

/// Builds the evaluator for `tau` and returns its constants.
pub fn lattice_data(tau: Complex64, cfg: EvalConfig) -> Result<LatticeData> {
    Ok(*Weierstrass::new(tau, cfg)?.data())
}
