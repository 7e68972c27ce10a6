use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::elliptic::Weierstrass;
use crate::error::{Error, Result};
use crate::green::gz_from_zeta;
use crate::lattice::TorusPoint;

/// Relative slack used to recognise the degenerate points `±q±` and `±2q±`.
pub const DEGENERACY_EPS: f64 = 1e-9;

/// Minimum torus distance for two partners (or a partner and `-a`) to count
/// as distinct.
pub const PARTNER_DEDUP: f64 = 1e-7;

/// The two roots `w` of `wp(a)^2 + wp(a) w + w^2 - g2/4 = 0`, i.e.
/// `(-wp(a) ± sqrt(g2 - 3 wp(a)^2)) / 2` with the principal square root.
pub fn conjugate_wp_values(pa: Complex64, g2: Complex64) -> [Complex64; 2] {
    let root = (g2 - pa * pa * 3.0).sqrt();
    [(-pa + root) * 0.5, (-pa - root) * 0.5]
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Degeneracy {
    Generic,
    /// `a` is one of `±q±`: one root of the quadratic is `wp(a)` itself and
    /// its preimage is `-a`.
    AtQ,
    /// `a` is one of `±2q±`: the two roots coincide.
    At2Q,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PartnerSet {
    pub a: TorusPoint,
    pub partners: Vec<TorusPoint>,
    pub degenerate_flag: Degeneracy,
}

pub fn classify_degeneracy(pa: Complex64, g2: Complex64) -> Degeneracy {
    let scale = 1.0 + g2.norm() + 3.0 * pa.norm_sqr();
    if (g2 - pa * pa * 3.0).norm() <= DEGENERACY_EPS * scale {
        Degeneracy::At2Q
    } else if (pa * pa * 12.0 - g2).norm() <= DEGENERACY_EPS * scale {
        Degeneracy::AtQ
    } else {
        Degeneracy::Generic
    }
}

/// Solutions `b != -a` of `wp'(a) + wp'(b) = 0`.
pub fn partner_points(w: &Weierstrass, a: Complex64) -> Result<PartnerSet> {
    let ap = w.reduce(a);
    let t = w.eval(ap.z)?;
    let m = w.modulus();
    let hp = w.half_periods();

    // wp'(a) = 0: the partners are the other two half-periods.
    if let Some(k) = (1..=3).find(|&k| m.torus_distance(ap.z, hp.get(k)) < 1e-12) {
        let partners = (1..=3)
            .filter(|&j| j != k)
            .map(|j| w.reduce(hp.get(j)))
            .collect();
        return Ok(PartnerSet {
            a: ap,
            partners,
            degenerate_flag: Degeneracy::Generic,
        });
    }

    let g2 = w.data().g2;
    let flag = classify_degeneracy(t.wp, g2);
    let roots = conjugate_wp_values(t.wp, g2);
    let targets: Vec<Complex64> = match flag {
        Degeneracy::At2Q => vec![-t.wp * 0.5],
        _ => roots.to_vec(),
    };
    let scale = 1.0 + t.wp.norm();
    let mut partners: Vec<TorusPoint> = Vec::with_capacity(2);
    for target in targets {
        if (target - t.wp).norm() <= 1e-7 * scale {
            // This root is wp(a); with wp'(b) = -wp'(a) its preimage is -a.
            continue;
        }
        let b = w.wp_inverse(target, -t.wp_prime, None)?;
        if m.torus_distance(b.z, -ap.z) < PARTNER_DEDUP {
            continue;
        }
        if partners
            .iter()
            .any(|p| m.torus_distance(p.z, b.z) < PARTNER_DEDUP)
        {
            continue;
        }
        partners.push(b);
    }
    Ok(PartnerSet {
        a: ap,
        partners,
        degenerate_flag: flag,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Residuals {
    pub res_green: f64,
    pub res_wp: f64,
    pub res_zeta: f64,
}

/// Minimum separation below which a pair counts as one of the excluded
/// configurations in `residuals`.
pub const EXACT_EXCLUSION: f64 = 1e-12;

pub fn residuals(w: &Weierstrass, a: Complex64, b: Complex64) -> Result<Residuals> {
    let m = w.modulus();
    if m.torus_distance(a, -a) < EXACT_EXCLUSION {
        return Err(Error::DegeneratePair("a = -a"));
    }
    if m.torus_distance(a, b) < EXACT_EXCLUSION {
        return Err(Error::DegeneratePair("a = b"));
    }
    if m.torus_distance(a, -b) < EXACT_EXCLUSION {
        return Err(Error::DegeneratePair("a = -b"));
    }
    let ta = w.eval(a)?;
    let tb = w.eval(b)?;
    let tab = w.eval(a - b)?;
    let ra = w.reduce(a);
    let rb = w.reduce(b);
    let gza = gz_from_zeta(w, ra.z, w.zeta(ra.z)?);
    let gzb = gz_from_zeta(w, rb.z, w.zeta(rb.z)?);
    Ok(Residuals {
        res_green: (gza + gzb).norm(),
        res_wp: (ta.wp_prime + tb.wp_prime).norm(),
        res_zeta: (ta.zeta - tb.zeta - tab.zeta).norm(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::elliptic::EvalConfig;

    fn square() -> Weierstrass {
        Weierstrass::new(Complex64::new(0.0, 1.0), EvalConfig::default()).unwrap()
    }

    #[test]
    fn conjugates_of_e1_are_e2_e3() {
        let w = square();
        let d = *w.data();
        let mut got = conjugate_wp_values(d.e1, d.g2);
        got.sort_by(|x, y| x.re.total_cmp(&y.re));
        assert!((got[0] - d.e2).norm() < 1e-12);
        assert!((got[1] - d.e3).norm() < 1e-12);
    }

    #[test]
    fn conjugates_at_inflection_value() {
        let g2 = Complex64::new(189.07, 0.0);
        let p = (g2 / 12.0).sqrt();
        let got = conjugate_wp_values(p, g2);
        assert!((got[0] - p).norm() < 1e-12);
        assert!((got[1] + p * 2.0).norm() < 1e-12);
    }

    #[test]
    fn half_period_partners() {
        let w = square();
        let hp = w.half_periods();
        let set = partner_points(&w, hp.w1_half).unwrap();
        assert_eq!(set.partners.len(), 2);
        assert!(set
            .partners
            .iter()
            .any(|p| (p.z - hp.w2_half).norm() < 1e-14));
        assert!(set
            .partners
            .iter()
            .any(|p| (p.z - hp.w3_half).norm() < 1e-14));
    }

    #[test]
    fn excluded_pairs_are_rejected() {
        let w = square();
        let a = Complex64::new(0.2, 0.1);
        assert!(matches!(residuals(&w, a, a), Err(Error::DegeneratePair(_))));
        assert!(matches!(
            residuals(&w, a, -a),
            Err(Error::DegeneratePair(_))
        ));
        let h = Complex64::new(0.5, 0.0);
        assert!(matches!(
            residuals(&w, h, Complex64::new(0.1, 0.3)),
            Err(Error::DegeneratePair(_))
        ));
    }
}
