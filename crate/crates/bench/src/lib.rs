//! Fixtures shared by the benchmarks.

use alphastep::harness::random_roots;
use alphastep::Polynomial;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// A seeded random polynomial of degree `d` with roots in the unit disk.
pub fn fixture(d: usize) -> Polynomial {
    let mut rng = ChaCha8Rng::seed_from_u64(0xBE7C + d as u64);
    Polynomial::from_roots(&random_roots(&mut rng, d, 0.05)).expect("separated roots")
}
