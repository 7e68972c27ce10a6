mod common;

use common::*;
use num_complex::Complex64;
use proptest::prelude::*;
use torus_blowup::blowup::{conjugate_wp_values, residuals};
use torus_blowup::elliptic::{EvalConfig, Weierstrass};
use torus_blowup::green::green_dz;

fn modulus() -> impl Strategy<Value = Complex64> {
    (-0.5f64..0.5, 0.5f64..2.5).prop_map(|(x, y)| c(x, y))
}

fn unit() -> impl Strategy<Value = (f64, f64)> {
    (-0.5f64..0.5, -0.5f64..0.5)
}

fn point(tau: Complex64, (r, s): (f64, f64)) -> Complex64 {
    c(r, 0.0) + tau * s
}

fn far_from_lattice(ww: &Weierstrass, z: Complex64) -> bool {
    ww.reduce(z).dist_to_lattice > 0.05
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn cubic_relation_holds(tau in modulus(), u in unit()) {
        let ww = Weierstrass::new(tau, EvalConfig::default()).unwrap();
        let z = point(tau, u);
        prop_assume!(far_from_lattice(&ww, z));
        let t = ww.eval(z).unwrap();
        let d = ww.data();
        let rhs = t.wp * t.wp * t.wp * 4.0 - d.g2 * t.wp - d.g3;
        let lhs = t.wp_prime * t.wp_prime;
        prop_assert!((lhs - rhs).norm() <= 1e-10 * (1.0 + lhs.norm()));
    }

    #[test]
    fn zeta_addition_holds(tau in modulus(), u in unit(), v in unit()) {
        let ww = Weierstrass::new(tau, EvalConfig::default()).unwrap();
        let (x, y) = (point(tau, u), point(tau, v));
        prop_assume!(far_from_lattice(&ww, x) && far_from_lattice(&ww, y));
        prop_assume!(far_from_lattice(&ww, x + y) && far_from_lattice(&ww, x - y));
        let (tx, ty) = (ww.eval(x).unwrap(), ww.eval(y).unwrap());
        let lhs = ww.zeta(x + y).unwrap() - tx.zeta - ty.zeta;
        let rhs = (tx.wp_prime - ty.wp_prime) / (tx.wp - ty.wp) * 0.5;
        prop_assert!((lhs - rhs).norm() <= 1e-8 * (1.0 + rhs.norm()));
    }

    #[test]
    fn reduction_preserves_values(tau in modulus(), u in unit(), m in -3i32..3, n in -3i32..3) {
        let ww = Weierstrass::new(tau, EvalConfig::default()).unwrap();
        let z = point(tau, u);
        prop_assume!(far_from_lattice(&ww, z));
        let shifted = z + m as f64 + tau * n as f64;
        prop_assert!(rel(ww.wp(shifted).unwrap(), ww.wp(z).unwrap()) < 1e-11);
        let g = green_dz(&ww, z).unwrap();
        prop_assert!((green_dz(&ww, shifted).unwrap() - g).norm() < 1e-11 * (1.0 + g.norm()));
    }

    #[test]
    fn inverse_round_trips(tau in modulus(), u in unit()) {
        let ww = Weierstrass::new(tau, EvalConfig::default()).unwrap();
        let z = point(tau, u);
        prop_assume!(far_from_lattice(&ww, z));
        let t = ww.eval(z).unwrap();
        prop_assume!(t.wp_prime.norm() > 1e-3);
        let back = ww.wp_inverse(t.wp, t.wp_prime, None).unwrap();
        prop_assert!(ww.modulus().torus_distance(back.z, z) < 1e-8);
    }

    #[test]
    fn conjugate_roots_solve_quadratic(re in -5.0f64..5.0, im in -5.0f64..5.0, g2 in -10.0f64..10.0) {
        let p = c(re, im);
        let g2 = c(g2, 0.0);
        for root in conjugate_wp_values(p, g2) {
            let q = p * p + p * root + root * root - g2 / 4.0;
            prop_assert!(q.norm() < 1e-11 * (1.0 + p.norm_sqr() + g2.norm()));
        }
    }

    #[test]
    fn residuals_are_symmetric(tau in modulus(), u in unit(), v in unit()) {
        let ww = Weierstrass::new(tau, EvalConfig::default()).unwrap();
        let (a, b) = (point(tau, u), point(tau, v));
        prop_assume!(torus_blowup::blowup::exclusion_distance(ww.modulus(), a, b) > 0.05);
        let r = residuals(&ww, a, b).unwrap();
        let s = residuals(&ww, b, a).unwrap();
        prop_assert!((r.res_green - s.res_green).abs() < 1e-12 * (1.0 + r.res_green));
        prop_assert!((r.res_wp - s.res_wp).abs() < 1e-12 * (1.0 + r.res_wp));
    }
}
