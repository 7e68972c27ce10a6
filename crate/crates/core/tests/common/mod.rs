#![allow(dead_code)]

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use torus_blowup::elliptic::{EvalConfig, Weierstrass};

pub fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

pub fn w(tau: Complex64) -> Weierstrass {
    Weierstrass::new(tau, EvalConfig::default()).unwrap()
}

pub fn rho() -> Complex64 {
    c(0.5, 3f64.sqrt() / 2.0)
}

/// Moduli exercised by most tests: rectangular, rhombus and general.
pub fn moduli() -> Vec<Complex64> {
    vec![
        c(0.0, 1.0),
        c(0.0, 0.6),
        c(0.0, 1.5),
        c(0.0, 2.0),
        c(0.5, 0.9),
        c(0.5, 1.3),
        rho(),
        c(0.3, 0.9),
    ]
}

pub fn rectangular() -> Vec<Complex64> {
    vec![c(0.0, 0.6), c(0.0, 1.0), c(0.0, 1.5), c(0.0, 2.0)]
}

/// `n` points of the centered cell at least `guard` from the lattice.
pub fn random_points(w: &Weierstrass, n: usize, seed: u64, guard: f64) -> Vec<Complex64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::with_capacity(n);
    while out.len() < n {
        let z = w
            .modulus()
            .from_coords(rng.gen_range(-0.5..0.5), rng.gen_range(-0.5..0.5));
        if w.reduce(z).dist_to_lattice > guard {
            out.push(z);
        }
    }
    out
}

pub fn rel(a: Complex64, b: Complex64) -> f64 {
    (a - b).norm() / (1.0 + b.norm())
}
