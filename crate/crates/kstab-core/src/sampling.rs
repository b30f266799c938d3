//! Deterministic sample generators for audits and property tests. Seeds are
//! derived from stable string hashes so identical inputs give identical
//! sample streams across runs and platforms.

use crate::model::ToricFanoModel;
use crate::pl::AffinePiece;
use crate::rational::{rat, Ratio};
use crate::vector::QVec;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// FNV-1a over the bytes; stable across platforms and runs.
pub fn seed_from(label: &str, salt: u64) -> u64 {
    let mut h: u64 = 0xcbf29ce484222325;
    for b in label.bytes() {
        h ^= b as u64;
        h = h.wrapping_mul(0x100000001b3);
    }
    h ^ salt
}

pub fn rng(label: &str, salt: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed_from(label, salt))
}

/// A rational with numerator in `[-span, span]` and denominator in
/// `[1, max_den]`.
pub fn random_ratio(rng: &mut ChaCha8Rng, span: i64, max_den: i64) -> Ratio {
    let den = rng.gen_range(1..=max_den);
    let num = rng.gen_range(-span * den..=span * den);
    rat(num, den)
}

pub fn random_qvec(rng: &mut ChaCha8Rng, dim: usize, span: i64, max_den: i64) -> QVec {
    QVec((0..dim).map(|_| random_ratio(rng, span, max_den)).collect())
}

/// Random convex PL data: a max of 2..=4 affine pieces with small rational
/// gradients and constants.
pub fn random_convex_pieces(rng: &mut ChaCha8Rng, dim: usize) -> Vec<AffinePiece> {
    let count = rng.gen_range(2..=4);
    (0..count)
        .map(|_| AffinePiece {
            gradient: random_qvec(rng, dim, 2, 3),
            constant: random_ratio(rng, 1, 2),
        })
        .collect()
}

/// Random convex PL data guaranteed non-affine on the model (at least two
/// active cells), for tests that need a genuine kink.
pub fn random_kinked_pieces(rng: &mut ChaCha8Rng, model: &ToricFanoModel) -> Vec<AffinePiece> {
    loop {
        let pieces = random_convex_pieces(rng, model.dim());
        if let Ok(f) =
            crate::pl::PlConvexFunction::new(model.polytope().clone(), pieces.clone())
        {
            if !f.is_affine() {
                return pieces;
            }
        }
    }
}
