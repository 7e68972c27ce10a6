//! Slow reference evaluators built from truncated lattice sums, independent
//! of the nome series used by `elliptic`.
//!
//! The box `|m|, |n| <= N` is symmetric under `w -> -w`, so the odd terms of
//! the tail expansion cancel and the remaining tail is
//! `sum_{j} (2j + 1) z^{2j} T_{2j+2}` for `wp` and `-sum_j z^{2j+1} T_{2j+2}`
//! for `zeta`, where `T_k = G_k - G_k(box)`. The full Eisenstein sums `G_k`
//! come from summing rows in closed form,
//! `sum_m (x + m)^{-k}` being a polynomial in `csc^2(pi x)`.

use std::f64::consts::PI;

use num_complex::Complex64;

/// Default half-width of the summation box.
pub const DEFAULT_BOX: i64 = 300;

fn csc2(x: Complex64) -> Complex64 {
    let s = (x * PI).sin();
    Complex64::new(1.0, 0.0) / (s * s)
}

/// `sum_m (x + m)^{-k}` for `k` in {2, 4, 6, 8}, `x` not an integer.
fn row_sum(x: Complex64, k: u32) -> Complex64 {
    let c = csc2(x);
    let p2 = PI * PI;
    match k {
        2 => c * p2,
        4 => (c * c * 3.0 - c * 2.0) * (p2 * p2 / 3.0),
        6 => (c * c * c * 15.0 - c * c * 15.0 + c * 2.0) * (p2 * p2 * p2 / 15.0),
        8 => {
            (c * c * c * c * 315.0 - c * c * c * 420.0 + c * c * 126.0 - c * 4.0)
                * (p2 * p2 * p2 * p2 / 315.0)
        }
        _ => panic!("unsupported row-sum order {k}"),
    }
}

/// `2 zeta_R(k)` for even `k`.
fn zeta_even(k: u32) -> f64 {
    let p2 = PI * PI;
    match k {
        2 => p2 / 6.0,
        4 => p2 * p2 / 90.0,
        6 => p2 * p2 * p2 / 945.0,
        8 => p2 * p2 * p2 * p2 / 9450.0,
        _ => panic!("unsupported order {k}"),
    }
}

/// Eisenstein sum `G_k = sum' (m + n tau)^{-k}`, rows summed first.
pub fn eisenstein(tau: Complex64, k: u32) -> Complex64 {
    let mut s = Complex64::new(2.0 * zeta_even(k), 0.0);
    for n in 1.. {
        let term = row_sum(tau * n as f64, k) * 2.0;
        s += term;
        if term.norm() <= 1e-18 * s.norm() || n > 10_000 {
            break;
        }
    }
    s
}

pub struct LatticeSumOracle {
    tau: Complex64,
    n_box: i64,
    /// Tails `T_4, T_6, T_8`.
    tails: [Complex64; 3],
    /// `G_2` with rows summed first, equal to `eta1`.
    pub eta1: Complex64,
    pub g2: Complex64,
    pub g3: Complex64,
}

impl LatticeSumOracle {
    pub fn new(tau: Complex64, n_box: i64) -> Self {
        let mut boxed = [Complex64::new(0.0, 0.0); 3];
        for m in -n_box..=n_box {
            for n in -n_box..=n_box {
                if m == 0 && n == 0 {
                    continue;
                }
                let w = Complex64::new(m as f64, 0.0) + tau * n as f64;
                let w2 = Complex64::new(1.0, 0.0) / (w * w);
                let w4 = w2 * w2;
                boxed[0] += w4;
                boxed[1] += w4 * w2;
                boxed[2] += w4 * w4;
            }
        }
        let g4 = eisenstein(tau, 4);
        let g6 = eisenstein(tau, 6);
        let g8 = eisenstein(tau, 8);
        LatticeSumOracle {
            tau,
            n_box,
            tails: [g4 - boxed[0], g6 - boxed[1], g8 - boxed[2]],
            eta1: eisenstein(tau, 2),
            g2: g4 * 60.0,
            g3: g6 * 140.0,
        }
    }

    pub fn tau(&self) -> Complex64 {
        self.tau
    }

    /// `(wp(z), zeta(z))` for `z` near the origin cell.
    pub fn wp_zeta(&self, z: Complex64) -> (Complex64, Complex64) {
        let one = Complex64::new(1.0, 0.0);
        let mut wp = one / (z * z);
        let mut zeta = one / z;
        let nb = self.n_box;
        for m in -nb..=nb {
            for n in -nb..=nb {
                if m == 0 && n == 0 {
                    continue;
                }
                let w = Complex64::new(m as f64, 0.0) + self.tau * n as f64;
                let d = one / (z - w);
                let iw = one / w;
                wp += d * d - iw * iw;
                zeta += d + iw + z * iw * iw;
            }
        }
        let z2 = z * z;
        let [t4, t6, t8] = self.tails;
        wp += z2 * t4 * 3.0 + z2 * z2 * t6 * 5.0 + z2 * z2 * z2 * t8 * 7.0;
        zeta -= z2 * z * t4 + z2 * z2 * z * t6 + z2 * z2 * z2 * z * t8;
        (wp, zeta)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn row_sums_match_direct_sums() {
        let x = Complex64::new(0.3, 0.2);
        for k in [2u32, 4, 6, 8] {
            let n = 20000i64;
            let direct: Complex64 = (-n..=n)
                .map(|m| (x + m as f64).powi(-(k as i32)))
                .sum::<Complex64>()
                // Tail beyond |m| = n, to leading order.
                + 2.0 / ((k - 1) as f64 * (n as f64 + 0.5).powi(k as i32 - 1));
            let closed = row_sum(x, k);
            assert!((direct - closed).norm() < 1e-7 * closed.norm(), "k={k}");
        }
    }

    #[test]
    fn square_lattice_constants() {
        let o = LatticeSumOracle::new(Complex64::new(0.0, 1.0), 20);
        assert!((o.eta1 - PI).norm() < 1e-12);
        assert!(o.g3.norm() < 1e-10);
        assert!((o.g2.re - 189.072_720_129_233_83).abs() < 1e-9);
    }
}
