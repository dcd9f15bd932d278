//! Seeded, reproducible random inputs.
//!
//! The generator is pinned so trajectories and check runs are bit-for-bit
//! reproducible given a seed: ChaCha8 seeded via `seed_from_u64`, with
//! standard-normal variates from the rand_distr ziggurat sampler. Entries are
//! drawn row-major, real part before imaginary part, first matrix first.
//!
//! State generators rescale the whole draw to unit Frobenius norm: the flows
//! here are cubic, and raw normal draws generically blow up well before the
//! horizons the verification suites integrate over. Every identity checked by
//! the suites is scale-invariant, so normalization costs nothing.

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::flows::{BHTState, HoloState, NahmTriple};
use crate::superalg::SuperMatrix;
use crate::{CMatrix, C64};

/// Generator identification printed in every CLI output header.
pub const RNG_SPEC: &str =
    "ChaCha8(seed_from_u64)+StandardNormal(ziggurat); rand_chacha 0.3, rand_distr 0.4";

pub fn rng_from_seed(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Matrix with independent standard-normal real and imaginary parts.
pub fn random_cmatrix<R: Rng>(rng: &mut R, rows: usize, cols: usize) -> CMatrix {
    let mut m = CMatrix::zeros(rows, cols);
    for i in 0..rows {
        for j in 0..cols {
            let re: f64 = rng.sample(StandardNormal);
            let im: f64 = rng.sample(StandardNormal);
            m[(i, j)] = C64::new(re, im);
        }
    }
    m
}

fn normalize_pair(a: CMatrix, b: CMatrix) -> (CMatrix, CMatrix) {
    let norm = (a.norm_squared() + b.norm_squared()).sqrt();
    if norm == 0.0 {
        return (a, b);
    }
    (a / C64::new(norm, 0.0), b / C64::new(norm, 0.0))
}

/// Unit-Frobenius-norm BHT state: A is n x m, B is m x n.
pub fn random_bht_state<R: Rng>(rng: &mut R, n: usize, m: usize) -> BHTState {
    let a = random_cmatrix(rng, n, m);
    let b = random_cmatrix(rng, m, n);
    let (a, b) = normalize_pair(a, b);
    BHTState::new(a, b).expect("shapes consistent by construction")
}

/// Unit-norm odd element of gl(n|m).
pub fn random_odd<R: Rng>(rng: &mut R, n: usize, m: usize) -> SuperMatrix {
    let s = random_bht_state(rng, n, m);
    SuperMatrix::odd(s.a, s.b).expect("shapes consistent by construction")
}

/// Unit-norm even element of gl(n|m).
pub fn random_even<R: Rng>(rng: &mut R, n: usize, m: usize) -> SuperMatrix {
    let (u, v) = normalize_pair(random_cmatrix(rng, n, n), random_cmatrix(rng, m, m));
    SuperMatrix::even(u, v).expect("shapes consistent by construction")
}

/// Unit-norm holomorphic state (A0, A1, B0, B1).
pub fn random_holo_state<R: Rng>(rng: &mut R, n: usize, m: usize) -> HoloState {
    let a0 = random_cmatrix(rng, n, m);
    let a1 = random_cmatrix(rng, n, m);
    let b0 = random_cmatrix(rng, m, n);
    let b1 = random_cmatrix(rng, m, n);
    let norm = (a0.norm_squared() + a1.norm_squared() + b0.norm_squared() + b1.norm_squared())
        .sqrt()
        .max(f64::MIN_POSITIVE);
    let s = C64::new(1.0 / norm, 0.0);
    HoloState::new(a0 * s, a1 * s, b0 * s, b1 * s).expect("shapes consistent by construction")
}

/// Anti-Hermitian k x k matrix, unit Frobenius norm.
pub fn random_anti_hermitian<R: Rng>(rng: &mut R, k: usize) -> CMatrix {
    let g = random_cmatrix(rng, k, k);
    let anti = (&g - g.adjoint()) * C64::new(0.5, 0.0);
    let norm = anti.norm();
    if norm == 0.0 {
        anti
    } else {
        anti / C64::new(norm, 0.0)
    }
}

/// Unit-norm anti-Hermitian Nahm triple of size k.
pub fn random_nahm_triple<R: Rng>(rng: &mut R, k: usize) -> NahmTriple {
    let t1 = random_anti_hermitian(rng, k);
    let t2 = random_anti_hermitian(rng, k);
    let t3 = random_anti_hermitian(rng, k);
    NahmTriple::new(t1, t2, t3).expect("shapes consistent by construction")
}

/// Haar-ish unitary from the QR factor of a normal draw.
pub fn random_unitary<R: Rng>(rng: &mut R, k: usize) -> CMatrix {
    random_cmatrix(rng, k, k).qr().q()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn seeded_draws_are_reproducible() {
        let a = random_cmatrix(&mut rng_from_seed(99), 3, 2);
        let b = random_cmatrix(&mut rng_from_seed(99), 3, 2);
        assert_eq!(a, b);
    }

    #[test]
    fn states_have_unit_norm() {
        let mut rng = rng_from_seed(5);
        let s = random_bht_state(&mut rng, 3, 2);
        let total = (s.a.norm_squared() + s.b.norm_squared()).sqrt();
        assert!((total - 1.0).abs() < 1e-12);
    }

    #[test]
    fn unitary_is_unitary() {
        let mut rng = rng_from_seed(6);
        let q = random_unitary(&mut rng, 4);
        let defect = &q.adjoint() * &q - CMatrix::identity(4, 4);
        assert!(crate::matkit::max_abs(&defect) < 1e-12);
    }

    #[test]
    fn anti_hermitian_is_anti_hermitian() {
        let mut rng = rng_from_seed(7);
        let u = random_anti_hermitian(&mut rng, 3);
        assert!(crate::matkit::max_abs(&(&u + u.adjoint())) < 1e-14);
    }
}
