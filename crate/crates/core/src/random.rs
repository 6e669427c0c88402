//! Seeded random words and automorphisms for fuzzing and sampling.

use rand::Rng;

use crate::automorphism::{symmetric_generator_set, Automorphism, GeneratorWord};
use crate::word::{CyclicWord, Letter, ReducedWord};

fn random_letter<R: Rng + ?Sized>(rank: usize, rng: &mut R) -> Letter {
    Letter::new(rng.gen_range(1..=rank), rng.gen_bool(0.5))
}

/// Uniform reduced word of exactly `len` letters.
pub fn random_reduced_word<R: Rng + ?Sized>(rank: usize, len: usize, rng: &mut R) -> ReducedWord {
    let mut letters: Vec<Letter> = Vec::with_capacity(len);
    while letters.len() < len {
        let l = random_letter(rank, rng);
        if letters.last() != Some(&l.inverse()) {
            letters.push(l);
        }
    }
    ReducedWord::from_reduced_unchecked(rank, letters)
}

/// Cyclically reduced word of exactly `len` letters.
pub fn random_cyclic_word<R: Rng + ?Sized>(rank: usize, len: usize, rng: &mut R) -> CyclicWord {
    loop {
        let w = random_reduced_word(rank, len, rng);
        if w.is_cyclically_reduced() {
            return CyclicWord::of(&w);
        }
        if len >= 2 {
            // resample the last letter
            let mut letters = w.letters().to_vec();
            let prev = letters[len - 2];
            let first = letters[0];
            let choices: Vec<Letter> = (1..=rank)
                .flat_map(|g| [Letter::new(g, false), Letter::new(g, true)])
                .filter(|&l| l != prev.inverse() && l != first.inverse())
                .collect();
            letters[len - 1] = choices[rng.gen_range(0..choices.len())];
            return CyclicWord::of(&ReducedWord::from_reduced_unchecked(rank, letters));
        }
    }
}

/// Product of `steps` uniformly chosen elements of `Y ∪ Y^-1`.
pub fn random_generator_word<R: Rng + ?Sized>(
    rank: usize,
    steps: usize,
    rng: &mut R,
) -> (GeneratorWord, Automorphism) {
    let gens = symmetric_generator_set(rank).expect("rank >= 2");
    let word = GeneratorWord((0..steps).map(|_| gens[rng.gen_range(0..gens.len())]).collect());
    let phi = word.evaluate(rank).expect("generators are valid");
    (word, phi)
}
