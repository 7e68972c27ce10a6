mod common;

use std::f64::consts::PI;

use common::*;
use torus_blowup::green::{
    green_critical_points_with, green_derivatives, green_dz, green_dz_lattice_form, halton2,
    sign_region_check,
};

#[test]
fn green_dz_vanishes_at_half_periods() {
    for tau in moduli() {
        let ww = w(tau);
        for h in ww.half_periods().all() {
            assert!(green_dz(&ww, h).unwrap().norm() < 1e-12, "{tau} {h}");
        }
    }
}

#[test]
fn green_dz_is_odd_and_periodic() {
    for tau in moduli() {
        let ww = w(tau);
        for z in random_points(&ww, 50, 20, 0.05) {
            let g = green_dz(&ww, z).unwrap();
            assert!((green_dz(&ww, -z).unwrap() + g).norm() < 1e-12 * (1.0 + g.norm()));
            assert!((green_dz(&ww, z + 1.0).unwrap() - g).norm() < 1e-12 * (1.0 + g.norm()));
            assert!((green_dz(&ww, z + tau).unwrap() - g).norm() < 1e-12 * (1.0 + g.norm()));
        }
    }
}

#[test]
fn closed_forms_agree() {
    for tau in moduli() {
        let ww = w(tau);
        for z in random_points(&ww, 50, 21, 0.05) {
            let p = ww.reduce(z).z;
            let a = green_dz(&ww, p).unwrap();
            let b = green_dz_lattice_form(&ww, p).unwrap();
            assert!((a - b).norm() < 1e-12 * (1.0 + a.norm()), "{tau} {z}");
        }
    }
}

#[test]
fn green_dz_rotation_symmetry_at_rho() {
    let ww = w(rho());
    for z in random_points(&ww, 50, 22, 0.05) {
        // G(rho z) = G(z), so G_z(rho z) rho = G_z(z).
        let lhs = green_dz(&ww, rho() * z).unwrap() * rho();
        let rhs = green_dz(&ww, z).unwrap();
        assert!((lhs - rhs).norm() < 1e-11 * (1.0 + rhs.norm()), "{z}");
    }
}

#[test]
fn hessian_examples() {
    for tau in rectangular() {
        let ww = w(tau);
        let d = *ww.data();
        let g = green_derivatives(&ww, c(0.5, 0.0)).unwrap();
        assert!((2.0 * PI * g.gx1x1 - (d.eta1.re + d.e1.re)).abs() < 1e-11);
        for t in [0.1, 0.2, 0.35, 0.45] {
            for z in [
                c(t, 0.0),
                c(0.0, t * tau.im),
                c(0.5, t * tau.im),
                c(t, 0.5 * tau.im),
            ] {
                let g = green_derivatives(&ww, z).unwrap();
                assert!(g.gx1x2.abs() < 1e-11 * (1.0 + g.gx1x1.abs()), "{tau} {z}");
            }
        }
    }
    for tau in moduli() {
        let ww = w(tau);
        for z in random_points(&ww, 30, 23, 0.05) {
            let g = green_derivatives(&ww, z).unwrap();
            assert!((g.trace() - 1.0 / tau.im).abs() < 1e-12 * (1.0 + g.gx1x1.abs()));
            assert!((g.gx1 - 2.0 * g.gz.re).abs() < 1e-15 && (g.gx2 + 2.0 * g.gz.im).abs() < 1e-15);
        }
    }
}

#[test]
fn gradient_matches_finite_differences_of_gz() {
    let ww = w(c(0.2, 1.1));
    let h = 1e-6;
    for z in random_points(&ww, 30, 24, 0.1) {
        let g = green_derivatives(&ww, z).unwrap();
        let gp = green_derivatives(&ww, z + h).unwrap();
        let gm = green_derivatives(&ww, z - h).unwrap();
        let fd = (gp.gx1 - gm.gx1) / (2.0 * h);
        assert!((fd - g.gx1x1).abs() < 1e-5 * (1.0 + g.gx1x1.abs()), "{z}");
    }
}

#[test]
fn sign_regions_hold_on_rectangular_tori() {
    for tau in rectangular() {
        let rep = sign_region_check(&w(tau), 300).unwrap();
        assert_eq!(rep.checked, 4 * 300);
        assert!(
            rep.violations.is_empty(),
            "{tau}: {:?}",
            rep.violations.first()
        );
    }
    assert!(sign_region_check(&w(rho()), 10).is_err());
}

#[test]
fn critical_points_square_and_hexagonal() {
    let square = w(c(0.0, 1.0));
    let found = green_critical_points_with(&square, 60);
    assert_eq!(found.points.len(), 3);
    for h in square.half_periods().all() {
        assert!(found
            .points
            .iter()
            .any(|p| square.modulus().torus_distance(p.z, h) < 1e-8));
    }

    let hex = w(rho());
    let found = green_critical_points_with(&hex, 60);
    assert_eq!(found.points.len(), 5);
    let third = (c(1.0, 0.0) + rho()) / 3.0;
    for z in [third, -third] {
        assert!(found
            .points
            .iter()
            .any(|p| hex.modulus().torus_distance(p.z, z) < 1e-8));
    }
}

#[test]
fn halton_points_lie_in_unit_square_and_are_distinct() {
    let pts: Vec<(f64, f64)> = (1..200).map(halton2).collect();
    assert!(pts
        .iter()
        .all(|&(x, y)| (0.0..1.0).contains(&x) && (0.0..1.0).contains(&y)));
    for (i, p) in pts.iter().enumerate() {
        assert!(pts[i + 1..].iter().all(|q| q != p));
    }
}
