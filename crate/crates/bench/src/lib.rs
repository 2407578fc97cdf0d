//! Workloads shared by the benchmarks.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use wittlift_core::{Algebra, Field, MultiIndex, WeylK};

pub fn algebra(n: usize, p: u32) -> Algebra {
    Algebra::new(n, Field::prime(p).expect("prime")).expect("valid parameters")
}

/// A seeded element with `terms` monomials of degree at most `max_deg`.
pub fn random_element(alg: &Algebra, seed: u64, terms: usize, max_deg: u32) -> WeylK {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let k = alg.field();
    let ts: Vec<_> = (0..terms)
        .map(|_| {
            let mut m = MultiIndex::zero(alg.nvars());
            for _ in 0..rng.gen_range(1..=max_deg) {
                m[rng.gen_range(0..alg.nvars())] += 1;
            }
            (m, k.from_int(rng.gen_range(1..k.p() as i64)))
        })
        .collect();
    WeylK::from_terms(alg, ts)
}
