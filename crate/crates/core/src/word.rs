//! Freely reduced words, cyclic words (necklaces) and the subword-power
//! statistics `alpha` / `alpha_tilde`.
//!
//! Letters are signed generator indices: `x_i` is `+i`, `x_i^-1` is `-i`.
//! The text encoding uses `a..z` for generators and `A..Z` for their
//! inverses, so it only covers rank at most 26; the integer encoding has no
//! such limit.

use std::cmp::Ordering;
use std::fmt;

use serde::{Deserialize, Serialize, Serializer};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum WordError {
    #[error("rank mismatch: {0} vs {1}")]
    RankMismatch(usize, usize),
    #[error("generator {generator} is outside rank {rank}")]
    OutOfRank { generator: usize, rank: usize },
    #[error("invalid letter {0:?}")]
    InvalidChar(char),
    #[error("0 is not a letter")]
    ZeroLetter,
    #[error("text encoding supports rank at most 26, got {0}")]
    RankTooLargeForText(usize),
}

/// A generator or the inverse of a generator.
///
/// The total order is `a < A < b < B < ...`, which fixes the canonical
/// rotation of cyclic words.
#[derive(Clone, Copy, PartialEq, Eq, Hash)]
pub struct Letter(i32);

impl Letter {
    /// `generator` is 1-based.
    pub fn new(generator: usize, inverse: bool) -> Letter {
        assert!(generator >= 1, "generators are numbered from 1");
        let g = generator as i32;
        Letter(if inverse { -g } else { g })
    }

    pub fn from_int(x: i32) -> Result<Letter, WordError> {
        if x == 0 {
            Err(WordError::ZeroLetter)
        } else {
            Ok(Letter(x))
        }
    }

    pub fn from_char(c: char) -> Result<Letter, WordError> {
        match c {
            'a'..='z' => Ok(Letter::new((c as u8 - b'a') as usize + 1, false)),
            'A'..='Z' => Ok(Letter::new((c as u8 - b'A') as usize + 1, true)),
            _ => Err(WordError::InvalidChar(c)),
        }
    }

    /// 1-based generator number.
    #[inline]
    pub fn generator(self) -> usize {
        self.0.unsigned_abs() as usize
    }

    /// 0-based generator index.
    #[inline]
    pub fn index(self) -> usize {
        self.generator() - 1
    }

    #[inline]
    pub fn is_inverse(self) -> bool {
        self.0 < 0
    }

    #[inline]
    pub fn inverse(self) -> Letter {
        Letter(-self.0)
    }

    #[inline]
    pub fn to_int(self) -> i32 {
        self.0
    }

    /// Position in the order `a < A < b < B < ...`.
    #[inline]
    pub fn key(self) -> u32 {
        (self.index() as u32) * 2 + u32::from(self.is_inverse())
    }

    pub fn to_char(self) -> Option<char> {
        if self.generator() > 26 {
            return None;
        }
        let base = if self.is_inverse() { b'A' } else { b'a' };
        Some((base + self.index() as u8) as char)
    }
}

impl Ord for Letter {
    fn cmp(&self, other: &Self) -> Ordering {
        self.key().cmp(&other.key())
    }
}

impl PartialOrd for Letter {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Debug for Letter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.to_char() {
            Some(c) => write!(f, "{c}"),
            None => write!(f, "{}", self.0),
        }
    }
}

/// Pushes `letter` onto a reduced stack, cancelling against the top.
#[inline]
pub(crate) fn push_reduced(stack: &mut Vec<Letter>, letter: Letter) {
    if stack.last() == Some(&letter.inverse()) {
        stack.pop();
    } else {
        stack.push(letter);
    }
}

/// An element of `F_n` as a freely reduced word.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ReducedWord {
    rank: usize,
    letters: Vec<Letter>,
}

impl ReducedWord {
    pub fn identity(rank: usize) -> ReducedWord {
        ReducedWord {
            rank,
            letters: Vec::new(),
        }
    }

    /// The word `x_generator` (1-based).
    pub fn generator(rank: usize, generator: usize) -> Result<ReducedWord, WordError> {
        ReducedWord::from_letters(rank, [Letter::new(generator, false)])
    }

    /// Freely reduces an arbitrary letter sequence.
    pub fn from_letters<I>(rank: usize, letters: I) -> Result<ReducedWord, WordError>
    where
        I: IntoIterator<Item = Letter>,
    {
        let mut stack = Vec::new();
        for l in letters {
            if l.generator() > rank {
                return Err(WordError::OutOfRank {
                    generator: l.generator(),
                    rank,
                });
            }
            push_reduced(&mut stack, l);
        }
        Ok(ReducedWord {
            rank,
            letters: stack,
        })
    }

    /// Caller guarantees the letters are reduced and within rank.
    pub(crate) fn from_reduced_unchecked(rank: usize, letters: Vec<Letter>) -> ReducedWord {
        debug_assert!(letters.windows(2).all(|w| w[0] != w[1].inverse()));
        ReducedWord { rank, letters }
    }

    pub fn parse(rank: usize, text: &str) -> Result<ReducedWord, WordError> {
        if rank > 26 {
            return Err(WordError::RankTooLargeForText(rank));
        }
        let letters = text
            .chars()
            .filter(|c| !c.is_whitespace() && *c != '1')
            .map(Letter::from_char)
            .collect::<Result<Vec<_>, _>>()?;
        ReducedWord::from_letters(rank, letters)
    }

    pub fn from_ints(rank: usize, ints: &[i32]) -> Result<ReducedWord, WordError> {
        let letters = ints
            .iter()
            .map(|&x| Letter::from_int(x))
            .collect::<Result<Vec<_>, _>>()?;
        ReducedWord::from_letters(rank, letters)
    }

    /// The same word viewed in a free group of larger rank.
    pub fn lift_rank(&self, rank: usize) -> Result<ReducedWord, WordError> {
        if rank < self.rank {
            return Err(WordError::RankMismatch(self.rank, rank));
        }
        Ok(ReducedWord {
            rank,
            letters: self.letters.clone(),
        })
    }

    pub fn to_ints(&self) -> Vec<i32> {
        self.letters.iter().map(|l| l.to_int()).collect()
    }

    /// Text form; `None` when the rank exceeds the alphabet.
    pub fn to_text(&self) -> Option<String> {
        if self.rank > 26 {
            return None;
        }
        self.letters.iter().map(|l| l.to_char()).collect()
    }

    #[inline]
    pub fn rank(&self) -> usize {
        self.rank
    }

    #[inline]
    pub fn letters(&self) -> &[Letter] {
        &self.letters
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.letters.len()
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.letters.is_empty()
    }

    fn check_rank(&self, other: &ReducedWord) -> Result<(), WordError> {
        if self.rank != other.rank {
            Err(WordError::RankMismatch(self.rank, other.rank))
        } else {
            Ok(())
        }
    }

    /// Free reduction of `self · other`.
    pub fn concat(&self, other: &ReducedWord) -> Result<ReducedWord, WordError> {
        self.check_rank(other)?;
        Ok(self.concat_unchecked(other))
    }

    pub(crate) fn concat_unchecked(&self, other: &ReducedWord) -> ReducedWord {
        let c = common_cancellation(&self.letters, &other.letters);
        let mut letters = Vec::with_capacity(self.len() + other.len() - 2 * c);
        letters.extend_from_slice(&self.letters[..self.len() - c]);
        letters.extend_from_slice(&other.letters[c..]);
        ReducedWord {
            rank: self.rank,
            letters,
        }
    }

    pub fn invert(&self) -> ReducedWord {
        ReducedWord {
            rank: self.rank,
            letters: self.letters.iter().rev().map(|l| l.inverse()).collect(),
        }
    }

    /// Number of letter pairs cancelled when forming `self · other`.
    pub fn cancellation_count(&self, other: &ReducedWord) -> Result<usize, WordError> {
        self.check_rank(other)?;
        Ok(common_cancellation(&self.letters, &other.letters))
    }

    pub fn power(&self, p: usize) -> ReducedWord {
        let mut out = ReducedWord::identity(self.rank);
        for _ in 0..p {
            out = out.concat_unchecked(self);
        }
        out
    }

    /// Conjugate `x^-1 · self · x`.
    pub fn conjugate_by(&self, x: &ReducedWord) -> Result<ReducedWord, WordError> {
        self.check_rank(x)?;
        Ok(x.invert().concat_unchecked(self).concat_unchecked(x))
    }

    /// Splits `self = conjugator · core · conjugator^-1` with `core`
    /// cyclically reduced.
    pub fn cyclic_reduce(&self) -> CyclicReduction {
        let l = &self.letters;
        let mut peel = 0;
        while 2 * peel + 1 < l.len() && l[peel] == l[l.len() - 1 - peel].inverse() {
            peel += 1;
        }
        let core = ReducedWord {
            rank: self.rank,
            letters: l[peel..l.len() - peel].to_vec(),
        };
        let conjugator = ReducedWord {
            rank: self.rank,
            letters: l[..peel].to_vec(),
        };
        CyclicReduction {
            necklace: CyclicWord::from_cyclically_reduced(self.rank, core.letters.clone()),
            core,
            conjugator,
        }
    }

    pub fn is_cyclically_reduced(&self) -> bool {
        match (self.letters.first(), self.letters.last()) {
            (Some(&f), Some(&l)) => self.len() == 1 || f != l.inverse(),
            _ => true,
        }
    }

    /// Largest `p` such that some subword equals `u^p` for a nonempty `u`;
    /// `alpha` of the empty word is 0.
    pub fn alpha(&self) -> usize {
        max_power(&self.letters)
    }
}

impl fmt::Display for ReducedWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.to_text() {
            Some(t) => f.write_str(&t),
            None => write!(f, "{:?}", self.to_ints()),
        }
    }
}

impl fmt::Debug for ReducedWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "ReducedWord({:?})", self.to_string())
    }
}

impl Serialize for ReducedWord {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        match self.to_text() {
            Some(t) => s.serialize_str(&t),
            None => self.to_ints().serialize(s),
        }
    }
}

/// Serialized form of a word before its rank is known.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum WordRepr {
    Text(String),
    Ints(Vec<i32>),
}

impl WordRepr {
    pub fn into_word(self, rank: usize) -> Result<ReducedWord, WordError> {
        match self {
            WordRepr::Text(t) => ReducedWord::parse(rank, &t),
            WordRepr::Ints(v) => ReducedWord::from_ints(rank, &v),
        }
    }
}

/// Length of the cancellation between two reduced letter sequences.
#[inline]
pub(crate) fn common_cancellation(u: &[Letter], v: &[Letter]) -> usize {
    u.iter()
        .rev()
        .zip(v.iter())
        .take_while(|(a, b)| **a == b.inverse())
        .count()
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CyclicReduction {
    pub necklace: CyclicWord,
    pub core: ReducedWord,
    pub conjugator: ReducedWord,
}

/// A conjugacy class, stored as the least rotation of a cyclically reduced
/// word.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct CyclicWord {
    rank: usize,
    letters: Vec<Letter>,
}

impl CyclicWord {
    pub fn empty(rank: usize) -> CyclicWord {
        CyclicWord {
            rank,
            letters: Vec::new(),
        }
    }

    pub(crate) fn from_cyclically_reduced(rank: usize, mut letters: Vec<Letter>) -> CyclicWord {
        let start = least_rotation(&letters);
        letters.rotate_left(start);
        CyclicWord { rank, letters }
    }

    /// The conjugacy class of `w`.
    pub fn of(w: &ReducedWord) -> CyclicWord {
        w.cyclic_reduce().necklace
    }

    pub fn parse(rank: usize, text: &str) -> Result<CyclicWord, WordError> {
        Ok(CyclicWord::of(&ReducedWord::parse(rank, text)?))
    }

    #[inline]
    pub fn rank(&self) -> usize {
        self.rank
    }

    #[inline]
    pub fn letters(&self) -> &[Letter] {
        &self.letters
    }

    /// Cyclic length.
    #[inline]
    pub fn len(&self) -> usize {
        self.letters.len()
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.letters.is_empty()
    }

    /// The canonical rotation as an element of `F_n`.
    pub fn representative(&self) -> ReducedWord {
        ReducedWord::from_reduced_unchecked(self.rank, self.letters.clone())
    }

    /// Every rotation; the empty necklace has the single empty rotation.
    pub fn rotations(&self) -> impl Iterator<Item = ReducedWord> + '_ {
        (0..self.letters.len().max(1)).map(move |r| {
            let mut l = self.letters.clone();
            if !l.is_empty() {
                l.rotate_left(r);
            }
            ReducedWord::from_reduced_unchecked(self.rank, l)
        })
    }

    pub fn invert(&self) -> CyclicWord {
        CyclicWord::from_cyclically_reduced(
            self.rank,
            self.letters.iter().rev().map(|l| l.inverse()).collect(),
        )
    }

    /// Max of `alpha` over all rotations.
    pub fn alpha_tilde(&self) -> usize {
        max_cyclic_power(&self.letters)
    }
}

impl fmt::Display for CyclicWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}]", self.representative())
    }
}

impl fmt::Debug for CyclicWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "CyclicWord({self})")
    }
}

impl Serialize for CyclicWord {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        self.representative().serialize(s)
    }
}

/// Start index of the lexicographically least rotation.
pub fn least_rotation<T: Ord>(s: &[T]) -> usize {
    let n = s.len();
    if n < 2 {
        return 0;
    }
    let (mut i, mut j, mut k) = (0usize, 1usize, 0usize);
    while i < n && j < n && k < n {
        match s[(i + k) % n].cmp(&s[(j + k) % n]) {
            Ordering::Equal => k += 1,
            Ordering::Greater => {
                i += k + 1;
                if i <= j {
                    i = j + 1;
                }
                k = 0;
            }
            Ordering::Less => {
                j += k + 1;
                if j <= i {
                    j = i + 1;
                }
                k = 0;
            }
        }
    }
    i.min(j)
}

/// Largest `p` such that `s` contains a factor `u^p` with `u` nonempty.
///
/// For each period `d` a maximal run of `r` positions with `s[i] == s[i+d]`
/// is a factor of length `r + d` with period `d`, i.e. `floor((r+d)/d)`
/// full copies.
pub fn max_power<T: PartialEq>(s: &[T]) -> usize {
    let n = s.len();
    if n == 0 {
        return 0;
    }
    let mut best = 1;
    for d in 1..=n / 2 {
        if n / d <= best {
            break;
        }
        let mut run = 0;
        for i in 0..n - d {
            if s[i] == s[i + d] {
                run += 1;
                best = best.max((run + d) / d);
            } else {
                run = 0;
            }
        }
    }
    best
}

/// `max_power` taken over every rotation of `s`: factors are cyclic
/// windows of length at most `s.len()`.
pub fn max_cyclic_power<T: PartialEq>(s: &[T]) -> usize {
    let n = s.len();
    if n == 0 {
        return 0;
    }
    let mut best = 1;
    for d in 1..=n {
        if n / d <= best {
            break;
        }
        let matches: Vec<bool> = (0..n).map(|i| s[i] == s[(i + d) % n]).collect();
        let run = match matches.iter().position(|m| !m) {
            None => n,
            Some(start) => {
                let mut longest = 0;
                let mut cur = 0;
                for t in 1..=n {
                    if matches[(start + t) % n] {
                        cur += 1;
                        longest = longest.max(cur);
                    } else {
                        cur = 0;
                    }
                }
                longest
            }
        };
        best = best.max((run + d).min(n) / d);
    }
    best
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn w(s: &str) -> ReducedWord {
        ReducedWord::parse(3, s).unwrap()
    }

    // Independent reference: naive stack reduction on raw integer lists.
    fn stack_reduce(xs: &[i32]) -> Vec<i32> {
        let mut out: Vec<i32> = Vec::new();
        for &x in xs {
            if out.last() == Some(&-x) {
                out.pop();
            } else {
                out.push(x);
            }
        }
        out
    }

    // Independent reference: try every start and every period.
    fn brute_alpha(s: &[i32]) -> usize {
        let n = s.len();
        let mut best = 0;
        for start in 0..n {
            for d in 1..=n - start {
                let mut p = 1;
                while start + (p + 1) * d <= n
                    && s[start + p * d..start + (p + 1) * d] == s[start..start + d]
                {
                    p += 1;
                }
                best = best.max(p);
            }
        }
        best
    }

    fn brute_alpha_tilde(s: &[i32]) -> usize {
        (0..s.len().max(1))
            .map(|r| {
                let mut t = s.to_vec();
                if !t.is_empty() {
                    t.rotate_left(r);
                }
                brute_alpha(&t)
            })
            .max()
            .unwrap_or(0)
    }

    #[test]
    fn concat_examples() {
        assert!(w("ab").concat(&w("BA")).unwrap().is_empty());
        assert_eq!(w("ab").concat(&w("b")).unwrap(), w("abb"));
        // abA · aB: A·a cancels, then b·B, leaving a.
        assert_eq!(stack_reduce(&[1, 2, -1, 1, -2]), vec![1]);
        assert_eq!(w("abA").concat(&w("aB")).unwrap(), w("a"));
    }

    #[test]
    fn rank_mismatch_is_an_error() {
        let u = ReducedWord::parse(2, "ab").unwrap();
        let v = ReducedWord::parse(3, "c").unwrap();
        assert_eq!(u.concat(&v), Err(WordError::RankMismatch(2, 3)));
        assert!(u.cancellation_count(&v).is_err());
        assert!(ReducedWord::parse(2, "c").is_err());
    }

    #[test]
    fn invert_examples() {
        assert_eq!(w("").invert(), w(""));
        assert_eq!(w("ab").invert(), w("BA"));
        assert_eq!(w("aBa").invert(), w("AbA"));
    }

    #[test]
    fn cancellation_examples() {
        assert_eq!(w("ab").cancellation_count(&w("BA")).unwrap(), 2);
        assert_eq!(w("ab").cancellation_count(&w("b")).unwrap(), 0);
        assert_eq!(stack_reduce(&[1, 2, -2, -2, -1]), vec![1, -2, -1]);
        assert_eq!(w("ab").cancellation_count(&w("BBA")).unwrap(), 1);
    }

    #[test]
    fn cyclic_reduce_examples() {
        let r = w("abA").cyclic_reduce();
        assert_eq!(r.core, w("b"));
        assert_eq!(r.conjugator, w("a"));
        assert_eq!(r.necklace, CyclicWord::parse(3, "b").unwrap());

        let r = w("ab").cyclic_reduce();
        assert_eq!(r.core, w("ab"));
        assert!(r.conjugator.is_empty());

        let r = w("aabAA").cyclic_reduce();
        assert_eq!(r.core, w("b"));
        assert_eq!(r.conjugator, w("aa"));

        assert!(w("").cyclic_reduce().necklace.is_empty());
    }

    #[test]
    fn alpha_examples() {
        assert_eq!(ReducedWord::parse(2, "baaaa").unwrap().alpha(), 4);
        assert_eq!(w("a").alpha(), 1);
        assert_eq!(brute_alpha(&[1, 2, 1, 2, 1]), 2);
        assert_eq!(w("ababa").alpha(), 2);
        assert_eq!(w("").alpha(), 0);
    }

    #[test]
    fn alpha_tilde_examples() {
        assert_eq!(CyclicWord::parse(2, "ba").unwrap().alpha_tilde(), 1);
        assert_eq!(brute_alpha_tilde(&[2, 1, 1, 1, 1]), 4);
        assert_eq!(CyclicWord::parse(2, "baaaa").unwrap().alpha_tilde(), 4);
        assert_eq!(CyclicWord::empty(2).alpha_tilde(), 0);
        // the wrap-around joins the two a-runs of "aabaa" into a^4
        assert_eq!(CyclicWord::parse(2, "aabaa").unwrap().alpha_tilde(), 4);
        assert_eq!(w("aabaa").alpha(), 2);
    }

    #[test]
    fn canonical_rotation_uses_letter_order() {
        // a < A < b < B
        let c = CyclicWord::parse(2, "bA").unwrap();
        assert_eq!(c.representative(), ReducedWord::parse(2, "Ab").unwrap());
        let c = CyclicWord::parse(2, "Bab").unwrap();
        assert_eq!(c.representative(), ReducedWord::parse(2, "a").unwrap());
    }

    #[test]
    fn integer_encoding_lifts_rank_limit() {
        let big = ReducedWord::from_ints(30, &[30, -2, 2, 5]).unwrap();
        assert_eq!(big.to_ints(), vec![30, 5]);
        assert!(big.to_text().is_none());
        assert_eq!(serde_json::to_string(&big).unwrap(), "[30,5]");
        assert!(ReducedWord::from_ints(3, &[0]).is_err());
        let small = WordRepr::Text("aB".into()).into_word(2).unwrap();
        assert_eq!(serde_json::to_string(&small).unwrap(), "\"aB\"");
    }

    fn letters(rank: usize, max_len: usize) -> impl Strategy<Value = Vec<i32>> {
        let r = rank as i32;
        prop::collection::vec((1..=r, any::<bool>()), 0..=max_len)
            .prop_map(|v| v.into_iter().map(|(g, inv)| if inv { -g } else { g }).collect())
    }

    fn reduced(rank: usize, max_len: usize) -> impl Strategy<Value = ReducedWord> {
        letters(rank, max_len).prop_map(move |v| ReducedWord::from_ints(rank, &v).unwrap())
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(2000))]

        #[test]
        fn reduction_matches_stack_oracle(xs in letters(3, 200)) {
            let r = ReducedWord::from_ints(3, &xs).unwrap();
            prop_assert_eq!(r.to_ints(), stack_reduce(&xs));
        }

        #[test]
        fn reduction_order_independent(xs in letters(2, 60), split in 0usize..60) {
            let split = split.min(xs.len());
            let left = ReducedWord::from_ints(2, &xs[..split]).unwrap();
            let right = ReducedWord::from_ints(2, &xs[split..]).unwrap();
            prop_assert_eq!(left.concat(&right).unwrap(), ReducedWord::from_ints(2, &xs).unwrap());
        }

        #[test]
        fn concat_length_identity(u in reduced(3, 30), v in reduced(3, 30)) {
            let c = u.cancellation_count(&v).unwrap();
            let uv = u.concat(&v).unwrap();
            prop_assert_eq!(uv.len(), u.len() + v.len() - 2 * c);
            prop_assert!(u.concat(&u.invert()).unwrap().is_empty());
            prop_assert_eq!(u.invert().invert(), u.clone());
        }

        #[test]
        fn concat_associative(u in reduced(2, 20), v in reduced(2, 20), x in reduced(2, 20)) {
            let a = u.concat(&v).unwrap().concat(&x).unwrap();
            let b = u.concat(&v.concat(&x).unwrap()).unwrap();
            prop_assert_eq!(a, b);
        }

        #[test]
        fn cyclic_reduce_decomposes(u in reduced(3, 40)) {
            let r = u.cyclic_reduce();
            let back = r.conjugator.concat(&r.core).unwrap().concat(&r.conjugator.invert()).unwrap();
            prop_assert_eq!(back, u.clone());
            prop_assert!(r.core.is_cyclically_reduced());
            let again = r.core.cyclic_reduce();
            prop_assert!(again.conjugator.is_empty());
            prop_assert_eq!(again.core, r.core);
        }

        #[test]
        fn necklace_is_conjugacy_invariant(u in reduced(3, 30), x in reduced(3, 10)) {
            let conj = x.concat(&u).unwrap().concat(&x.invert()).unwrap();
            prop_assert_eq!(CyclicWord::of(&conj), CyclicWord::of(&u));
        }

        #[test]
        fn alpha_matches_brute_force(u in reduced(2, 40)) {
            prop_assert_eq!(u.alpha(), brute_alpha(&u.to_ints()));
            prop_assert_eq!(u.alpha(), u.invert().alpha());
        }

        #[test]
        fn alpha_tilde_matches_brute_force(u in reduced(2, 30)) {
            let c = CyclicWord::of(&u);
            prop_assert_eq!(c.alpha_tilde(), brute_alpha_tilde(&c.representative().to_ints()));
            prop_assert_eq!(c.alpha_tilde(), c.invert().alpha_tilde());
            for r in c.rotations() {
                prop_assert_eq!(CyclicWord::of(&r).alpha_tilde(), c.alpha_tilde());
            }
        }

        #[test]
        fn alpha_of_powers(u in reduced(3, 8), p in 1usize..12) {
            prop_assume!(!u.is_empty() && u.is_cyclically_reduced());
            prop_assert!(u.power(p).alpha() >= p);
        }

        #[test]
        fn least_rotation_is_least(xs in prop::collection::vec(0u8..3, 0..20)) {
            let start = least_rotation(&xs);
            let mut best = xs.clone();
            for r in 0..xs.len() {
                let mut t = xs.clone();
                t.rotate_left(r);
                best = best.min(t);
            }
            let mut got = xs.clone();
            got.rotate_left(start);
            prop_assert_eq!(got, best);
        }
    }
}
