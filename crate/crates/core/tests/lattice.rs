mod common;

use common::*;
use torus_blowup::lattice::{
    boundary_path_point, classify, half_periods, reduce, BoundarySegment, TorusShape,
};
use torus_blowup::Error;

#[test]
fn classify_examples() {
    assert_eq!(
        classify(c(0.0, 1.0)).unwrap().shape(),
        TorusShape::Rectangular
    );
    assert_eq!(classify(rho()).unwrap().shape(), TorusShape::Rhombus);
    assert_eq!(classify(c(0.3, 0.9)).unwrap().shape(), TorusShape::General);
}

#[test]
fn classify_rejects_lower_half_plane() {
    for tau in [c(0.0, 0.0), c(0.2, -1.0)] {
        assert!(matches!(
            classify(tau),
            Err(Error::NonPositiveImaginaryPart(_))
        ));
    }
    assert!(matches!(
        classify(c(0.3, 0.9)).unwrap().require_rectangular(),
        Err(Error::RectangularRequired { .. })
    ));
}

#[test]
fn reduce_examples() {
    let p = reduce(c(1.3, 0.2), c(0.0, 1.0));
    assert!((p.z - c(0.3, 0.2)).norm() < 1e-15);
    for tau in moduli() {
        let hp = half_periods(tau);
        let p = reduce(hp.w3_half, tau);
        assert!((p.z - hp.w3_half).norm() < 1e-15, "{tau}");
    }
}

#[test]
fn reduce_commutes_with_negation() {
    for tau in moduli() {
        let ww = w(tau);
        let m = ww.modulus();
        for z in random_points(&ww, 100, 3, 1e-3) {
            let a = m.reduce(-z).z;
            let b = -m.reduce(z).z;
            assert!(m.torus_distance(a, b) < 1e-14, "{tau} {z}");
        }
    }
}

#[test]
fn reduce_lands_in_centered_cell() {
    for tau in moduli() {
        let ww = w(tau);
        let m = ww.modulus();
        for z in random_points(&ww, 50, 4, 0.0) {
            let shifted = z + 3.0 - tau * 2.0;
            let p = m.reduce(shifted);
            assert!(p.r > -0.5 && p.r <= 0.5 && p.s > -0.5 && p.s <= 0.5);
            let (dr, ds) = m.coords(shifted - p.z);
            assert!((dr - dr.round()).abs() < 1e-12 && (ds - ds.round()).abs() < 1e-12);
            assert!((m.reduce(p.z).z - p.z).norm() < 1e-14);
        }
    }
}

#[test]
fn half_period_examples() {
    let hp = half_periods(c(0.0, 2.0));
    assert_eq!(
        (hp.w1_half, hp.w2_half, hp.w3_half),
        (c(0.5, 0.0), c(0.0, 1.0), c(0.5, 1.0))
    );
    let hp = half_periods(c(0.0, 1.0));
    assert_eq!(
        (hp.w1_half, hp.w2_half, hp.w3_half),
        (c(0.5, 0.0), c(0.0, 0.5), c(0.5, 0.5))
    );
    for tau in moduli() {
        let hp = half_periods(tau);
        assert!((hp.w3_half - hp.w1_half - hp.w2_half).norm() < 1e-15);
    }
}

#[test]
fn boundary_path_is_closed_and_piecewise_linear() {
    let tau = c(0.0, 1.5);
    let hp = half_periods(tau);
    let (s0, a) = boundary_path_point(tau, 1.0);
    assert_eq!(s0, BoundarySegment::RightEdge);
    assert!((a - hp.w1_half).norm() < 1e-15);
    for seg in BoundarySegment::ALL {
        let (z1, z2) = seg.endpoints(tau);
        let mid = seg.point(tau, 0.5);
        assert!((mid - (z1 + z2) * 0.5).norm() < 1e-15);
    }
}
