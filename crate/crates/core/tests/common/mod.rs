#![allow(dead_code)]

use num_complex::Complex64 as C64;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use tomoprob::qudit_prob::QubitTriple;
use tomoprob::statespace::{CMatrix, DensityMatrix, ToleranceConfig};

/// Ginibre-ensemble density matrix: Hermitian, unit-trace and positive
/// semidefinite by construction.
pub fn random_density(n: usize, rng: &mut ChaCha8Rng) -> DensityMatrix {
    let a = CMatrix::from_fn(n, n, |_, _| {
        C64::new(StandardNormal.sample(rng), StandardNormal.sample(rng))
    });
    let mut m = &a * a.adjoint();
    let tr: f64 = (0..n).map(|j| m[(j, j)].re).sum();
    m /= C64::new(tr, 0.0);
    DensityMatrix::new(m, &ToleranceConfig::default()).unwrap()
}

/// Uniform sample from the admissible Bloch ball by rejection.
pub fn random_admissible_triple(rng: &mut ChaCha8Rng) -> QubitTriple {
    loop {
        let t = QubitTriple::new(
            rng.random_range(0.0..1.0),
            rng.random_range(0.0..1.0),
            rng.random_range(0.0..1.0),
        )
        .unwrap();
        if t.ball_margin() <= 0.25 {
            return t;
        }
    }
}

pub fn seeded(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}
