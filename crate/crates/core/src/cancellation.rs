//! Bounded-cancellation constants and the certified constant `C` with
//! `alpha_tilde(g[w]) <= alpha_tilde([w]) + C` for every generator `g`.
//!
//! For an automorphism `phi` the cancellation between `phi(u)` and
//! `phi(v)` (for `uv` reduced) is the longest common prefix of
//! `phi(u)^-1` and `phi(v)`. The search enumerates suffix words `u` and
//! prefix words `v` of length at most `L`, sorts the prefix images, and
//! finds the best partner of each suffix image by binary search, so the
//! cost is linear in the number of boundary words rather than in the
//! number of pairs.

use std::collections::{BTreeMap, BTreeSet};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::automorphism::{symmetric_generator_set, Automorphism, Generator};
use crate::random::random_cyclic_word;
use crate::word::{CyclicWord, Letter, ReducedWord};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum CancellationError {
    #[error("search depth must be at least 1")]
    ZeroDepth,
    #[error("rank must be at least 2, got {0}")]
    RankTooSmall(usize),
    #[error("cyclic constant not certified after {doublings} doublings ({violations} violations at C = {constant})")]
    NotCertified {
        constant: usize,
        doublings: usize,
        violations: usize,
    },
}

/// All nonempty reduced words of length at most `max_len`, shortest first.
pub fn reduced_words_up_to(rank: usize, max_len: usize) -> Vec<ReducedWord> {
    let alphabet: Vec<Letter> = (1..=rank)
        .flat_map(|g| [Letter::new(g, false), Letter::new(g, true)])
        .collect();
    let mut out: Vec<Vec<Letter>> = Vec::new();
    let mut layer: Vec<Vec<Letter>> = vec![Vec::new()];
    for _ in 0..max_len {
        let mut next = Vec::with_capacity(layer.len() * (2 * rank - 1));
        for w in &layer {
            for &l in &alphabet {
                if w.last() != Some(&l.inverse()) {
                    let mut x = w.clone();
                    x.push(l);
                    next.push(x);
                }
            }
        }
        out.extend(next.iter().cloned());
        layer = next;
    }
    out.into_iter()
        .map(|l| ReducedWord::from_reduced_unchecked(rank, l))
        .collect()
}

/// Every conjugacy class of cyclic length `1..=max_len`, in canonical order.
pub fn cyclic_words_up_to(rank: usize, max_len: usize) -> Vec<CyclicWord> {
    let set: BTreeSet<CyclicWord> = reduced_words_up_to(rank, max_len)
        .into_iter()
        .filter(|w| w.is_cyclically_reduced())
        .map(|w| CyclicWord::of(&w))
        .collect();
    set.into_iter().collect()
}

fn lcp(a: &[Letter], b: &[Letter]) -> usize {
    a.iter().zip(b).take_while(|(x, y)| x == y).count()
}

fn best_partner(sorted: &[&[Letter]], query: &[Letter]) -> usize {
    let pos = sorted.partition_point(|s| *s < query);
    let mut best = 0;
    if pos < sorted.len() {
        best = lcp(sorted[pos], query);
    }
    if pos > 0 {
        best = best.max(lcp(sorted[pos - 1], query));
    }
    best
}

/// `bcc_estimate(phi, d)` for every `d = 1..=depth`.
pub fn bcc_profile(phi: &Automorphism, depth: usize) -> Result<Vec<usize>, CancellationError> {
    if depth == 0 {
        return Err(CancellationError::ZeroDepth);
    }
    // Letters go to letters: images of reduced words stay reduced.
    if phi.images().iter().all(|w| w.len() == 1) {
        return Ok(vec![0; depth]);
    }
    let rank = phi.rank();
    let words = reduced_words_up_to(rank, depth);
    let images: Vec<ReducedWord> = words.par_iter().map(|w| phi.apply_unchecked(w)).collect();
    let inverse_images: Vec<ReducedWord> = images.par_iter().map(|w| w.invert()).collect();
    let alphabet: Vec<Letter> = (1..=rank)
        .flat_map(|g| [Letter::new(g, false), Letter::new(g, true)])
        .collect();

    let profile = (1..=depth)
        .map(|d| {
            alphabet
                .par_iter()
                .map(|&y| {
                    // prefix words v starting with y
                    let mut b: Vec<&[Letter]> = words
                        .iter()
                        .zip(&images)
                        .filter(|(v, _)| v.len() <= d && v.letters()[0] == y)
                        .map(|(_, img)| img.letters())
                        .collect();
                    b.sort_unstable();
                    b.dedup();
                    // suffix words u whose last letter is not y^-1
                    words
                        .iter()
                        .zip(&inverse_images)
                        .filter(|(u, _)| u.len() <= d && *u.letters().last().unwrap() != y.inverse())
                        .map(|(_, inv)| best_partner(&b, inv.letters()))
                        .max()
                        .unwrap_or(0)
                })
                .max()
                .unwrap_or(0)
        })
        .collect();
    Ok(profile)
}

/// Largest cancellation `|phi(u)| + |phi(v)| - |phi(uv)|) / 2` over
/// reduced `uv` with `|u|, |v| <= depth`.
pub fn bcc_estimate(phi: &Automorphism, depth: usize) -> Result<usize, CancellationError> {
    Ok(*bcc_profile(phi, depth)?.last().expect("depth >= 1"))
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CancellationCertificate {
    /// Constant that passed every check.
    pub constant: usize,
    pub doublings: usize,
    pub exhaustive_max_len: usize,
    pub exhaustive_words: usize,
    pub samples: usize,
    pub max_len: usize,
    pub seed: u64,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CancellationReport {
    pub rank: usize,
    pub search_depth: usize,
    /// Estimated `C(g)` for every `g` in `Y ∪ Y^-1`.
    pub per_generator: BTreeMap<String, usize>,
    /// `C(g)` at depths `1..=search_depth`.
    pub profiles: BTreeMap<String, Vec<usize>>,
    /// `C_g = 2 max(C(g), C(g^-1))` for each Dehn twist in `Y`.
    pub symmetrized: BTreeMap<String, usize>,
    /// Max of `C_g` over Dehn twists: the constant for straight words.
    pub lemma1_word_constant: usize,
    /// Constant for cyclic words; twice the word constant before
    /// certification, possibly doubled again by [`certify`].
    pub lemma1_cyclic_constant: usize,
    /// Every profile is constant over its last three depths.
    pub stabilized: bool,
    pub certification: Option<CancellationCertificate>,
}

pub fn lemma1_constants(rank: usize, depth: usize) -> Result<CancellationReport, CancellationError> {
    if rank < 2 {
        return Err(CancellationError::RankTooSmall(rank));
    }
    let gens = symmetric_generator_set(rank).map_err(|_| CancellationError::RankTooSmall(rank))?;
    let mut profiles = BTreeMap::new();
    let mut by_gen: BTreeMap<Generator, usize> = BTreeMap::new();
    for g in &gens {
        let phi = g.automorphism(rank).expect("generator in range");
        let p = bcc_profile(&phi, depth)?;
        by_gen.insert(*g, *p.last().unwrap());
        profiles.insert(g.to_string(), p);
    }
    let mut symmetrized = BTreeMap::new();
    for g in gens.iter().filter(|g| matches!(g, Generator::Twist { .. })) {
        let c = 2 * by_gen[g].max(by_gen[&g.inverse()]);
        symmetrized.insert(g.to_string(), c);
    }
    let word_constant = symmetrized.values().copied().max().unwrap_or(0);
    let stabilized = depth >= 3
        && profiles
            .values()
            .all(|p: &Vec<usize>| p[depth - 3] == p[depth - 1]);
    Ok(CancellationReport {
        rank,
        search_depth: depth,
        per_generator: by_gen.iter().map(|(g, c)| (g.to_string(), *c)).collect(),
        profiles,
        symmetrized,
        lemma1_word_constant: word_constant,
        lemma1_cyclic_constant: 2 * word_constant,
        stabilized,
        certification: None,
    })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Violation {
    pub generator: String,
    pub word: String,
    pub image: String,
    pub before: usize,
    pub after: usize,
    pub constant: usize,
}

/// Checks `alpha_tilde(g[w]) <= alpha_tilde([w]) + constant` for every
/// listed generator and word.
pub fn check_words(
    generators: &[(String, Automorphism)],
    words: &[CyclicWord],
    constant: usize,
) -> Vec<Violation> {
    words
        .par_iter()
        .flat_map_iter(|c| {
            let before = c.alpha_tilde();
            generators.iter().filter_map(move |(label, g)| {
                let image = g.apply_cyclic_unchecked(c);
                let after = image.alpha_tilde();
                (after > before + constant).then(|| Violation {
                    generator: label.clone(),
                    word: c.representative().to_string(),
                    image: image.representative().to_string(),
                    before,
                    after,
                    constant,
                })
            })
        })
        .collect()
}

pub fn labelled_generators(rank: usize) -> Vec<(String, Automorphism)> {
    symmetric_generator_set(rank)
        .expect("rank >= 2")
        .into_iter()
        .map(|g| (g.to_string(), g.automorphism(rank).expect("in range")))
        .collect()
}

/// `samples` random cyclic words of length `1..=max_len`.
pub fn sample_cyclic_words(rank: usize, samples: usize, max_len: usize, seed: u64) -> Vec<CyclicWord> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..samples)
        .map(|_| {
            let len = rng.gen_range(1..=max_len.max(1));
            random_cyclic_word(rank, len, &mut rng)
        })
        .collect()
}

/// Random-sample check over `Y ∪ Y^-1`.
pub fn verify_lemma1(rank: usize, constant: usize, samples: usize, max_len: usize, seed: u64) -> Vec<Violation> {
    let words = sample_cyclic_words(rank, samples, max_len, seed);
    check_words(&labelled_generators(rank), &words, constant)
}

/// Exhaustive check over every cyclic word of length `<= max_len`.
pub fn verify_lemma1_exhaustive(rank: usize, constant: usize, max_len: usize) -> Vec<Violation> {
    let words = cyclic_words_up_to(rank, max_len);
    check_words(&labelled_generators(rank), &words, constant)
}

/// A violation of the bound with `constant - 1`, if the search finds one.
/// `None` means `constant` may not be sharp.
pub fn sharpness_witness(
    rank: usize,
    constant: usize,
    exhaustive_max_len: usize,
    samples: usize,
    max_len: usize,
    seed: u64,
) -> Option<Violation> {
    let c = constant.checked_sub(1)?;
    verify_lemma1_exhaustive(rank, c, exhaustive_max_len)
        .into_iter()
        .next()
        .or_else(|| verify_lemma1(rank, c, samples, max_len, seed).into_iter().next())
}

#[derive(Clone, Copy, Debug)]
pub struct CertifyConfig {
    pub exhaustive_max_len: usize,
    pub samples: usize,
    pub max_len: usize,
    pub seed: u64,
    pub max_doublings: usize,
}

impl Default for CertifyConfig {
    fn default() -> Self {
        CertifyConfig {
            exhaustive_max_len: 8,
            samples: 10_000,
            max_len: 40,
            seed: 0,
            max_doublings: 3,
        }
    }
}

/// Runs the checks on the cyclic constant, doubling it while violations
/// remain.
pub fn certify(report: &mut CancellationReport, cfg: &CertifyConfig) -> Result<(), CancellationError> {
    let gens = labelled_generators(report.rank);
    let mut words = cyclic_words_up_to(report.rank, cfg.exhaustive_max_len);
    let exhaustive_words = words.len();
    words.extend(sample_cyclic_words(report.rank, cfg.samples, cfg.max_len, cfg.seed));
    let mut constant = report.lemma1_cyclic_constant;
    for doublings in 0..=cfg.max_doublings {
        let violations = check_words(&gens, &words, constant);
        if violations.is_empty() {
            report.lemma1_cyclic_constant = constant;
            report.certification = Some(CancellationCertificate {
                constant,
                doublings,
                exhaustive_max_len: cfg.exhaustive_max_len,
                exhaustive_words,
                samples: cfg.samples,
                max_len: cfg.max_len,
                seed: cfg.seed,
            });
            return Ok(());
        }
        if doublings == cfg.max_doublings {
            return Err(CancellationError::NotCertified {
                constant,
                doublings,
                violations: violations.len(),
            });
        }
        constant = (2 * constant).max(1);
    }
    unreachable!()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::random::random_reduced_word;

    fn aut(images: &[&str]) -> Automorphism {
        Automorphism::parse(images.len(), images).unwrap()
    }

    // Reference: every pair (u, v) with uv reduced, no boundary tricks.
    fn brute_bcc(phi: &Automorphism, depth: usize) -> usize {
        let words = reduced_words_up_to(phi.rank(), depth);
        let mut best = 0;
        for u in &words {
            let fu = phi.apply(u).unwrap();
            for v in &words {
                if u.cancellation_count(v).unwrap() > 0 {
                    continue;
                }
                let fv = phi.apply(v).unwrap();
                best = best.max(fu.cancellation_count(&fv).unwrap());
            }
        }
        best
    }

    #[test]
    fn identity_has_no_cancellation() {
        assert_eq!(bcc_estimate(&Automorphism::identity(2), 5).unwrap(), 0);
    }

    #[test]
    fn twist_constant_matches_pair_search() {
        let t = aut(&["ab", "b"]);
        assert_eq!(brute_bcc(&t, 4), 1);
        assert_eq!(bcc_estimate(&t, 6).unwrap(), 1);
        // witness: u = a, v = B gives ab · B
        let u = ReducedWord::parse(2, "a").unwrap();
        let v = ReducedWord::parse(2, "B").unwrap();
        assert_eq!(t.apply(&u).unwrap().cancellation_count(&t.apply(&v).unwrap()).unwrap(), 1);
    }

    #[test]
    fn boundary_search_agrees_with_pair_search() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..12 {
            let (_, phi) = crate::random::random_generator_word(2, 4, &mut rng);
            for d in 1..=3 {
                assert_eq!(bcc_estimate(&phi, d).unwrap(), brute_bcc(&phi, d), "{phi} at {d}");
            }
        }
    }

    #[test]
    fn permutations_and_inversions_cancel_nothing() {
        for n in 2..=3 {
            for g in symmetric_generator_set(n).unwrap() {
                if !g.is_twist() {
                    assert_eq!(bcc_estimate(&g.automorphism(n).unwrap(), 6).unwrap(), 0);
                }
            }
        }
    }

    #[test]
    fn profile_is_monotone_and_below_ceiling() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        for _ in 0..6 {
            let (_, phi) = crate::random::random_generator_word(2, 5, &mut rng);
            let p = bcc_profile(&phi, 5).unwrap();
            assert!(p.windows(2).all(|w| w[0] <= w[1]));
            for (d, c) in p.iter().enumerate() {
                assert!(*c <= phi.max_image_length() * (d + 1));
            }
        }
    }

    #[test]
    fn rank_two_report() {
        let r = lemma1_constants(2, 6).unwrap();
        assert_eq!(r.per_generator["twist(1,2)"], 1);
        assert_eq!(r.per_generator["twist_inverse(2,1)"], 1);
        assert_eq!(r.per_generator["permutation(1,2)"], 0);
        assert_eq!(r.per_generator["inversion(2)"], 0);
        assert_eq!(r.lemma1_word_constant, 2);
        assert_eq!(r.lemma1_cyclic_constant, 4);
        assert!(r.stabilized);
        let small = lemma1_constants(2, 4).unwrap();
        for (k, v) in &small.per_generator {
            assert!(*v <= r.per_generator[k]);
        }
        assert_eq!(lemma1_constants(1, 4), Err(CancellationError::RankTooSmall(1)));
        assert_eq!(bcc_profile(&aut(&["ab", "b"]), 0), Err(CancellationError::ZeroDepth));
    }

    #[test]
    fn identity_generator_never_violates() {
        let gens = vec![("identity".to_string(), Automorphism::identity(2))];
        let words = cyclic_words_up_to(2, 6);
        assert!(check_words(&gens, &words, 0).is_empty());
    }

    #[test]
    fn zero_constant_is_violated() {
        // twist(1,2) sends [aB^2]... somewhere with more repetition
        assert!(!verify_lemma1_exhaustive(2, 0, 5).is_empty());
    }

    #[test]
    fn straight_word_alpha_moves_by_at_most_c_g() {
        let r = lemma1_constants(2, 6).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        for g in symmetric_generator_set(2).unwrap() {
            let phi = g.automorphism(2).unwrap();
            let c_g = if g.is_twist() { r.lemma1_word_constant } else { 0 };
            for _ in 0..2000 {
                let len = rng.gen_range(1..=30);
                let w = random_reduced_word(2, len, &mut rng);
                let a = w.alpha();
                let b = phi.apply(&w).unwrap().alpha();
                assert!(b + c_g >= a && b <= a + c_g, "{g}: {w} {a} -> {b}");
            }
        }
    }

    #[test]
    fn certification_records_constant() {
        let mut r = lemma1_constants(2, 5).unwrap();
        let cfg = CertifyConfig {
            exhaustive_max_len: 6,
            samples: 500,
            max_len: 20,
            seed: 1,
            max_doublings: 3,
        };
        certify(&mut r, &cfg).unwrap();
        let cert = r.certification.clone().unwrap();
        assert_eq!(cert.constant, r.lemma1_cyclic_constant);
        assert!(cert.exhaustive_words > 0);
    }
}
