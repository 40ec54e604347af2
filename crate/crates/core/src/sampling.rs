use rand::{Rng, SeedableRng};

use crate::tensor::CubicForm;

/// Entries i.i.d. uniform on `[-scale, scale]` over sorted triples.
pub fn random_tensor<R: Rng + ?Sized>(n: usize, scale: f64, rng: &mut R) -> CubicForm {
    let mut h = CubicForm::zeros(n).expect("supported dimension");
    for a in 0..n {
        for b in a..n {
            for c in b..n {
                h.set(a, b, c, rng.random_range(-scale..=scale));
            }
        }
    }
    h
}

/// SplitMix64 finalizer, used to derive independent per-sample seeds.
pub fn mix_seed(seed: u64, index: u64) -> u64 {
    let mut z = seed.wrapping_add(index.wrapping_add(1).wrapping_mul(0x9E37_79B9_7F4A_7C15));
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// [`random_tensor`] driven by a ChaCha8 stream seeded with `seed`.
pub fn seeded_tensor(n: usize, scale: f64, seed: u64) -> CubicForm {
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    random_tensor(n, scale, &mut rng)
}
