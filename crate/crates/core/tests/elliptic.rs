mod common;

use std::f64::consts::PI;

use common::*;
use torus_blowup::elliptic::{lattice_data, EvalConfig, Weierstrass};
use torus_blowup::oracle::LatticeSumOracle;
use torus_blowup::Error;

#[test]
fn wp_at_half_is_e1_and_matches_oracle() {
    let ww = w(c(0.0, 1.0));
    let e1 = ww.wp(c(0.5, 0.0)).unwrap();
    assert!(e1.re > 0.0 && e1.im.abs() < 1e-13);
    assert!(rel(e1, ww.data().e1) < 1e-14);
    let oracle = LatticeSumOracle::new(c(0.0, 1.0), 60);
    let (wp_o, _) = oracle.wp_zeta(c(0.5, 0.0));
    assert!(rel(e1, wp_o) < 1e-12, "{e1} vs {wp_o}");
}

#[test]
fn wp_is_even_and_doubly_periodic() {
    for tau in moduli() {
        let ww = w(tau);
        for z in random_points(&ww, 100, 10, 0.05) {
            let p = ww.wp(z).unwrap();
            assert!(rel(ww.wp(-z).unwrap(), p) < 1e-12, "{tau} {z}");
            assert!(rel(ww.wp(z + 1.0).unwrap(), p) < 1e-12);
            assert!(rel(ww.wp(z + tau).unwrap(), p) < 1e-12);
        }
    }
}

#[test]
fn wp_conjugation_symmetry_on_rectangular_tori() {
    for tau in rectangular() {
        let ww = w(tau);
        for z in random_points(&ww, 50, 11, 0.05) {
            assert!(rel(ww.wp(z.conj()).unwrap(), ww.wp(z).unwrap().conj()) < 1e-12);
        }
    }
}

#[test]
fn wp_rejects_points_at_poles() {
    let ww = w(c(0.0, 1.0));
    for z in [c(0.0, 0.0), c(1.0, 1e-6), c(0.0, 1.0)] {
        assert!(matches!(ww.wp(z), Err(Error::TooCloseToPole { .. })), "{z}");
    }
    assert!(matches!(
        Weierstrass::new(c(0.0, -1.0), EvalConfig::default()),
        Err(Error::NonPositiveImaginaryPart(_))
    ));
}

#[test]
fn wp_prime_vanishes_at_half_periods() {
    for tau in moduli() {
        let ww = w(tau);
        let scale = 1.0 + ww.data().g2.norm().powf(0.75);
        for h in ww.half_periods().all() {
            assert!(ww.wp_prime(h).unwrap().norm() < 1e-11 * scale, "{tau} {h}");
        }
    }
}

#[test]
fn wp_prime_is_odd_and_near_minus_two_over_z_cubed() {
    for tau in moduli() {
        let ww = w(tau);
        for z in random_points(&ww, 50, 12, 0.05) {
            assert!(rel(ww.wp_prime(-z).unwrap(), -ww.wp_prime(z).unwrap()) < 1e-12);
        }
        for k in 0..8 {
            let z = c(0.0, 0.0) + num_complex::Complex64::from_polar(0.01, 0.3 + k as f64);
            let d = ww.wp_prime(z).unwrap();
            let lead = -2.0 / (z * z * z);
            assert!((d - lead).norm() / lead.norm() < 1e-3, "{tau} {z}");
        }
    }
}

#[test]
fn wp_prime_real_or_imaginary_on_boundary_of_rectangular_cell() {
    let tau = c(0.0, 1.5);
    let ww = w(tau);
    for k in 1..20 {
        let t = k as f64 / 20.0;
        let real_axis = ww.wp_prime(c(0.5 * t, 0.0)).unwrap();
        let top = ww.wp_prime(c(0.5 * t, 0.75)).unwrap();
        let imag_axis = ww.wp_prime(c(0.0, 0.75 * t)).unwrap();
        let right = ww.wp_prime(c(0.5, 0.75 * t)).unwrap();
        assert!(real_axis.im.abs() < 1e-10 * (1.0 + real_axis.norm()));
        assert!(top.im.abs() < 1e-10 * (1.0 + top.norm()));
        assert!(imag_axis.re.abs() < 1e-10 * (1.0 + imag_axis.norm()));
        assert!(right.re.abs() < 1e-10 * (1.0 + right.norm()));
    }
}

#[test]
fn wp_prime2_examples() {
    for tau in rectangular() {
        let ww = w(tau);
        let d = ww.data();
        let qp = d.q_plus.unwrap();
        assert!(ww.wp_prime2(qp).unwrap().norm() < 1e-11 * (1.0 + d.g2.norm()));
        for k in 1..50 {
            let x = -0.5 * k as f64 / 50.0;
            assert!(ww.wp_prime2(c(x, 0.0)).unwrap().re > 0.0);
        }
        let h = 1e-5;
        for z in random_points(&ww, 100, 13, 0.1) {
            let fd = (ww.wp_prime(z + h).unwrap() - ww.wp_prime(z - h).unwrap()) / (2.0 * h);
            let exact = ww.wp_prime2(z).unwrap();
            assert!(
                (fd - exact).norm() / (1.0 + exact.norm()) < 1e-6,
                "{tau} {z}"
            );
        }
    }
}

#[test]
fn zeta_examples() {
    for tau in moduli() {
        let ww = w(tau);
        let d = *ww.data();
        assert!(
            rel(ww.zeta(c(0.5, 0.0)).unwrap(), d.eta1 * 0.5) < 1e-13,
            "{tau}"
        );
        for z in random_points(&ww, 50, 14, 0.05) {
            let zz = ww.zeta(z).unwrap();
            assert!(rel(ww.zeta(-z).unwrap(), -zz) < 1e-12);
            assert!(rel(ww.zeta(z + 1.0).unwrap(), zz + d.eta1) < 1e-12);
            assert!(rel(ww.zeta(z + tau).unwrap(), zz + d.eta2) < 1e-12);
        }
    }
    let ww = w(c(0.0, 1.0));
    for k in 1..10 {
        assert!(ww.zeta(c(0.05 * k as f64, 0.0)).unwrap().im.abs() < 1e-12);
    }
}

#[test]
fn lattice_data_examples() {
    let d = *w(c(0.0, 1.0)).data();
    assert!(d.g3.norm() < 1e-12 && d.e3.norm() < 1e-12);
    assert!((d.e2 + d.e1).norm() < 1e-12);
    assert!((d.eta1 - PI).norm() < 1e-13);
    assert!(w(rho()).data().g2.norm() < 1e-10);

    let d = *w(c(0.0, 1.5)).data();
    let s = (d.g2.re / 12.0).sqrt();
    assert!(d.e2.re < -s && -s < d.e3.re && d.e3.re < s && s < d.e1.re);
}

#[test]
fn lattice_data_invariants() {
    for tau in moduli() {
        let d = lattice_data(tau, EvalConfig::default()).unwrap();
        let scale = 1.0 + d.g2.norm() + d.g3.norm();
        assert!((d.e1 + d.e2 + d.e3).norm() < 1e-12 * scale);
        assert!((d.e1 * d.e2 + d.e1 * d.e3 + d.e2 * d.e3 + d.g2 / 4.0).norm() < 1e-11 * scale);
        assert!((d.e1 * d.e2 * d.e3 - d.g3 / 4.0).norm() < 1e-11 * scale);
        assert!((d.eta1 * tau - d.eta2 - c(0.0, 2.0 * PI)).norm() < 1e-10);
        assert!((d.eta1_tilde - d.eta1 + 2.0 * PI / tau.im).norm() < 1e-13);
    }
}

#[test]
fn invalid_configurations_are_rejected() {
    let bad = [
        EvalConfig {
            rel_tol: 1e-16,
            ..EvalConfig::default()
        },
        EvalConfig {
            pole_guard: 0.0,
            ..EvalConfig::default()
        },
        EvalConfig {
            max_terms: 0,
            ..EvalConfig::default()
        },
    ];
    for cfg in bad {
        assert!(Weierstrass::new(c(0.0, 1.0), cfg).is_err());
    }
}

#[test]
fn wp_inverse_examples() {
    let ww = w(c(0.0, 1.0));
    let d = *ww.data();
    let z = ww
        .wp_inverse(d.e1, c(0.0, 0.0), Some(c(0.49, 0.01)))
        .unwrap();
    assert!(ww.modulus().torus_distance(z.z, c(0.5, 0.0)) < 1e-12);

    // 2q+ from wp(2q+) with the sign of wp' there.
    let qp = d.q_plus.unwrap();
    let two_q = ww.reduce(qp * 2.0).z;
    let target = ww.wp(two_q).unwrap();
    let z = ww
        .wp_inverse(target, ww.wp_prime(two_q).unwrap(), None)
        .unwrap();
    assert!((z.z - two_q).norm() < 1e-10);
    assert!(z.z.re.abs() < 1e-12 && z.z.im > 0.0 && z.z.im < 0.5);
}

#[test]
fn wp_inverse_selects_the_hinted_sign() {
    for tau in moduli() {
        let ww = w(tau);
        for z in random_points(&ww, 40, 15, 0.05) {
            let t = ww.eval(z).unwrap();
            for hint in [t.wp_prime, -t.wp_prime] {
                let p = ww.wp_inverse(t.wp, hint, None).unwrap();
                let d = ww.wp_prime(p.z).unwrap();
                assert!(rel(ww.wp(p.z).unwrap(), t.wp) < 1e-11);
                assert!((d - hint).norm() < (d + hint).norm(), "{tau} {z}");
            }
        }
    }
}

#[test]
fn wp_inverse_traverses_boundary_path_monotonically() {
    // Decreasing real targets trace the boundary path from 0 back to 0.
    let tau = c(0.0, 1.0);
    let ww = w(tau);
    let d = *ww.data();
    let targets: Vec<f64> = (0..=60)
        .map(|k| {
            let u = k as f64 / 60.0;
            let lo = d.e2.re - 50.0;
            let hi = d.e1.re + 50.0;
            hi + (lo - hi) * u
        })
        .collect();
    let mut last_u = -1.0;
    for v in targets {
        let seed = None;
        let z = ww.preimage(c(v, 0.0), seed).unwrap();
        let z = ww.reduce(z).z;
        // Map to the boundary representative in the first quadrant.
        let z = c(z.re.abs(), z.im.abs());
        let u = if z.im < 1e-9 {
            z.re / 0.5
        } else if (z.re - 0.5).abs() < 1e-9 {
            1.0 + z.im / 0.5
        } else if (z.im - 0.5).abs() < 1e-9 {
            2.0 + (0.5 - z.re) / 0.5
        } else {
            assert!(z.re.abs() < 1e-9, "{v} -> {z}");
            3.0 + (0.5 - z.im) / 0.5
        };
        assert!(u >= last_u - 1e-9, "target {v}: u {u} < {last_u}");
        last_u = u;
    }
}

#[test]
fn duplication_examples() {
    for tau in moduli() {
        let ww = w(tau);
        for z in random_points(&ww, 200, 16, 0.05) {
            if ww.reduce(z * 2.0).dist_to_lattice < 0.05 {
                continue;
            }
            assert!(ww.duplication_check(z).unwrap() < 1e-9, "{tau} {z}");
        }
    }
    for tau in rectangular() {
        let ww = w(tau);
        let d = *ww.data();
        let root = (d.g2.re / 3.0).sqrt();
        let qp = d.q_plus.unwrap();
        let qm = d.q_minus.unwrap();
        assert!((ww.wp(qp * 2.0).unwrap().re + root).abs() < 1e-10 * (1.0 + root));
        assert!((ww.wp(qm * 2.0).unwrap().re - root).abs() < 1e-10 * (1.0 + root));
        assert!(root > d.e1.re);
    }
}

#[test]
fn oracle_agreement_across_moduli() {
    for tau in moduli() {
        let ww = w(tau);
        let oracle = LatticeSumOracle::new(tau, 60);
        assert!((oracle.eta1 - ww.data().eta1).norm() < 1e-10, "{tau}");
        for z in random_points(&ww, 20, 17, 0.05) {
            let (p, zt) = oracle.wp_zeta(z);
            let t = ww.eval(z).unwrap();
            assert!(rel(t.wp, p) < 1e-9 && rel(t.zeta, zt) < 1e-9, "{tau} {z}");
        }
    }
}
