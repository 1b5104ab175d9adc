//! Shared inputs for the criterion benches.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use rodlab::critical::{family_point, make_critical, CriticalParams, FamilyParams};
use rodlab::variational::StiefelPoint;
use rodlab::Parity;

/// A seeded random Stiefel point with frequencies up to `max_freq`.
pub fn random_point(seed: u64, max_freq: i32) -> StiefelPoint {
    StiefelPoint::random(&mut ChaCha8Rng::seed_from_u64(seed), Parity::Odd, max_freq).expect("valid frequency range")
}

/// A generic critical point with `(c, d) = (7, 3)`.
pub fn critical_point() -> StiefelPoint {
    make_critical(&CriticalParams::random_normal_form(&mut ChaCha8Rng::seed_from_u64(1), 7)).expect("normal form")
}

/// The trefoil member of the `(2, 1)` family.
pub fn trefoil() -> StiefelPoint {
    family_point(&FamilyParams::new(2, 1, 0.2)).expect("valid family")
}
