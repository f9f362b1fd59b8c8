//! Workloads shared by the criterion benches.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use wsync_core::fixtures::{random_value1_pa, random_word_exact};
use wsync_core::{lift, twin, TwinPa, Value1Instance, Word};

/// Twin automaton of a seeded random 6-state, 3-letter instance and a
/// random word of `len` letters over its alphabet.
pub fn twin_workload(seed: u64, len: usize) -> (TwinPa, Word) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let b = Value1Instance::new(random_value1_pa(&mut rng, 6, 3, 8)).expect("generated instance");
    let c = twin(&lift(&b).expect("lift")).expect("twin");
    let w = random_word_exact(&mut rng, c.pa().alphabet(), len);
    (c, w)
}
