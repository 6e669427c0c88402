//! Automorphisms of `F_n` given by the images of the generators.
//!
//! Composition convention: `compose(phi, psi)` is `phi ∘ psi`, so
//! `compose(phi, psi).apply(w) == phi.apply(psi.apply(w))`. A
//! [`GeneratorWord`] `[g_1, ..., g_m]` evaluates to `g_1 ∘ ... ∘ g_m`.

use std::collections::{HashMap, HashSet, VecDeque};
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::matrix::IntMatrix;
use crate::word::{common_cancellation, push_reduced, CyclicWord, Letter, ReducedWord, WordError, WordRepr};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum AutError {
    #[error(transparent)]
    Word(#[from] WordError),
    #[error("expected {expected} images, got {got}")]
    ImageCount { expected: usize, got: usize },
    #[error("images do not form a basis (Nielsen reduction stalled at total length {total_length})")]
    NotAnAutomorphism { total_length: usize },
    #[error("generator sets are defined for rank at least 2, got {0}")]
    RankTooSmall(usize),
    #[error("generator index out of range for rank {rank}: {generator}")]
    BadGenerator { generator: Generator, rank: usize },
    #[error("conjugation plateau exceeded {0} states")]
    PlateauTooLarge(usize),
}

/// One element of the generating set `Y` or of `Y^-1`. Indices are
/// 1-based, matching `x_1, ..., x_n`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(tag = "op", rename_all = "snake_case")]
pub enum Generator {
    /// Swap `x_i` and `x_j`.
    Permutation { i: usize, j: usize },
    /// `x_i -> x_i^-1`.
    Inversion { i: usize },
    /// Dehn twist `x_i -> x_i x_j`.
    Twist { i: usize, j: usize },
    /// `x_i -> x_i x_j^-1`, the inverse of `Twist { i, j }`.
    TwistInverse { i: usize, j: usize },
}

impl Generator {
    pub fn inverse(self) -> Generator {
        match self {
            Generator::Twist { i, j } => Generator::TwistInverse { i, j },
            Generator::TwistInverse { i, j } => Generator::Twist { i, j },
            g => g,
        }
    }

    pub fn is_twist(self) -> bool {
        matches!(self, Generator::Twist { .. } | Generator::TwistInverse { .. })
    }

    fn check(self, rank: usize) -> Result<(), AutError> {
        let ok = |x: usize| (1..=rank).contains(&x);
        let valid = match self {
            Generator::Inversion { i } => ok(i),
            Generator::Permutation { i, j }
            | Generator::Twist { i, j }
            | Generator::TwistInverse { i, j } => ok(i) && ok(j) && i != j,
        };
        if valid {
            Ok(())
        } else {
            Err(AutError::BadGenerator {
                generator: self,
                rank,
            })
        }
    }

    /// Replaces the image tuple of `phi` by that of `phi ∘ self`.
    pub(crate) fn apply_right(self, images: &mut [ReducedWord]) {
        match self {
            Generator::Permutation { i, j } => images.swap(i - 1, j - 1),
            Generator::Inversion { i } => images[i - 1] = images[i - 1].invert(),
            Generator::Twist { i, j } => {
                images[i - 1] = images[i - 1].concat_unchecked(&images[j - 1]);
            }
            Generator::TwistInverse { i, j } => {
                let inv = images[j - 1].invert();
                images[i - 1] = images[i - 1].concat_unchecked(&inv);
            }
        }
    }

    pub fn automorphism(self, rank: usize) -> Result<Automorphism, AutError> {
        self.check(rank)?;
        let mut images = Automorphism::identity(rank).images;
        self.apply_right(&mut images);
        Ok(Automorphism { rank, images })
    }
}

impl fmt::Display for Generator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Generator::Permutation { i, j } => write!(f, "permutation({i},{j})"),
            Generator::Inversion { i } => write!(f, "inversion({i})"),
            Generator::Twist { i, j } => write!(f, "twist({i},{j})"),
            Generator::TwistInverse { i, j } => write!(f, "twist_inverse({i},{j})"),
        }
    }
}

/// The generating set `Y`: transpositions, inversions and right Dehn
/// twists `x_i -> x_i x_j`.
pub fn generator_set(rank: usize) -> Result<Vec<Generator>, AutError> {
    if rank < 2 {
        return Err(AutError::RankTooSmall(rank));
    }
    let mut out = Vec::new();
    for i in 1..=rank {
        for j in i + 1..=rank {
            out.push(Generator::Permutation { i, j });
        }
    }
    for i in 1..=rank {
        out.push(Generator::Inversion { i });
    }
    for i in 1..=rank {
        for j in 1..=rank {
            if i != j {
                out.push(Generator::Twist { i, j });
            }
        }
    }
    Ok(out)
}

/// `Y ∪ Y^-1` without repetitions (permutations and inversions are
/// involutions).
pub fn symmetric_generator_set(rank: usize) -> Result<Vec<Generator>, AutError> {
    let mut out = generator_set(rank)?;
    let twists: Vec<Generator> = out.iter().filter(|g| g.is_twist()).map(|g| g.inverse()).collect();
    out.extend(twists);
    Ok(out)
}

/// A product `g_1 ∘ ... ∘ g_m` of generators.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct GeneratorWord(pub Vec<Generator>);

impl GeneratorWord {
    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn evaluate(&self, rank: usize) -> Result<Automorphism, AutError> {
        let mut images = Automorphism::identity(rank).images;
        for g in &self.0 {
            g.check(rank)?;
            g.apply_right(&mut images);
        }
        Ok(Automorphism { rank, images })
    }

    pub fn inverse(&self) -> GeneratorWord {
        GeneratorWord(self.0.iter().rev().map(|g| g.inverse()).collect())
    }
}

/// An automorphism of `F_n`, stored as the tuple `(phi(x_1), ..., phi(x_n))`.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Automorphism {
    rank: usize,
    images: Vec<ReducedWord>,
}

#[derive(Serialize, Deserialize)]
struct AutomorphismJson {
    rank: usize,
    images: Vec<WordRepr>,
}

impl Automorphism {
    pub fn identity(rank: usize) -> Automorphism {
        Automorphism {
            rank,
            images: (1..=rank)
                .map(|i| ReducedWord::from_reduced_unchecked(rank, vec![Letter::new(i, false)]))
                .collect(),
        }
    }

    /// Checks that the images form a basis of `F_n`.
    pub fn new(rank: usize, images: Vec<ReducedWord>) -> Result<Automorphism, AutError> {
        if images.len() != rank {
            return Err(AutError::ImageCount {
                expected: rank,
                got: images.len(),
            });
        }
        if let Some(w) = images.iter().find(|w| w.rank() != rank) {
            return Err(WordError::RankMismatch(rank, w.rank()).into());
        }
        let phi = Automorphism { rank, images };
        nielsen_reduce(&phi.images)?;
        Ok(phi)
    }

    /// Caller guarantees the images form a basis.
    pub(crate) fn from_images_unchecked(rank: usize, images: Vec<ReducedWord>) -> Automorphism {
        Automorphism { rank, images }
    }

    pub fn parse(rank: usize, images: &[&str]) -> Result<Automorphism, AutError> {
        let images = images
            .iter()
            .map(|s| ReducedWord::parse(rank, s))
            .collect::<Result<Vec<_>, _>>()?;
        Automorphism::new(rank, images)
    }

    /// Inner automorphism `w -> c w c^-1`.
    pub fn inner(c: &ReducedWord) -> Automorphism {
        let rank = c.rank();
        let ci = c.invert();
        let images = Automorphism::identity(rank)
            .images
            .iter()
            .map(|x| c.concat_unchecked(x).concat_unchecked(&ci))
            .collect();
        Automorphism { rank, images }
    }

    pub fn from_json(text: &str) -> Result<Automorphism, crate::Error> {
        let raw: AutomorphismJson = serde_json::from_str(text)?;
        Automorphism::from_repr(raw.rank, raw.images).map_err(Into::into)
    }

    pub(crate) fn from_repr(rank: usize, images: Vec<WordRepr>) -> Result<Automorphism, AutError> {
        let images = images
            .into_iter()
            .map(|r| r.into_word(rank))
            .collect::<Result<Vec<_>, _>>()?;
        Automorphism::new(rank, images)
    }

    #[inline]
    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn images(&self) -> &[ReducedWord] {
        &self.images
    }

    pub fn total_length(&self) -> usize {
        self.images.iter().map(|w| w.len()).sum()
    }

    pub fn max_image_length(&self) -> usize {
        self.images.iter().map(|w| w.len()).max().unwrap_or(0)
    }

    fn check_rank(&self, rank: usize) -> Result<(), AutError> {
        if self.rank != rank {
            Err(WordError::RankMismatch(self.rank, rank).into())
        } else {
            Ok(())
        }
    }

    pub(crate) fn apply_letters(&self, letters: &[Letter]) -> Vec<Letter> {
        let mut stack = Vec::new();
        for &l in letters {
            let img = &self.images[l.index()];
            if l.is_inverse() {
                for &x in img.letters().iter().rev() {
                    push_reduced(&mut stack, x.inverse());
                }
            } else {
                for &x in img.letters() {
                    push_reduced(&mut stack, x);
                }
            }
        }
        stack
    }

    pub(crate) fn apply_unchecked(&self, w: &ReducedWord) -> ReducedWord {
        ReducedWord::from_reduced_unchecked(self.rank, self.apply_letters(w.letters()))
    }

    /// `[[phi(w)]]`: substitute and freely reduce.
    pub fn apply(&self, w: &ReducedWord) -> Result<ReducedWord, AutError> {
        self.check_rank(w.rank())?;
        Ok(self.apply_unchecked(w))
    }

    /// Action on conjugacy classes.
    pub fn apply_cyclic(&self, c: &CyclicWord) -> Result<CyclicWord, AutError> {
        self.check_rank(c.rank())?;
        Ok(self.apply_cyclic_unchecked(c))
    }

    pub(crate) fn apply_cyclic_unchecked(&self, c: &CyclicWord) -> CyclicWord {
        CyclicWord::of(&self.apply_unchecked(&c.representative()))
    }

    /// `self ∘ other`.
    pub fn compose(&self, other: &Automorphism) -> Result<Automorphism, AutError> {
        self.check_rank(other.rank)?;
        Ok(self.compose_unchecked(other))
    }

    pub(crate) fn compose_unchecked(&self, other: &Automorphism) -> Automorphism {
        Automorphism {
            rank: self.rank,
            images: other.images.iter().map(|w| self.apply_unchecked(w)).collect(),
        }
    }

    pub fn power(&self, k: usize) -> Automorphism {
        let mut acc = Automorphism::identity(self.rank);
        for _ in 0..k {
            acc = self.compose_unchecked(&acc);
        }
        acc
    }

    pub fn inverse(&self) -> Result<Automorphism, AutError> {
        let moves = nielsen_reduce(&self.images)?;
        GeneratorWord(moves).evaluate(self.rank)
    }

    /// A word in `Y ∪ Y^-1` evaluating exactly to `self` in `Aut(F_n)`.
    pub fn nielsen_decompose(&self) -> Result<GeneratorWord, AutError> {
        let moves = nielsen_reduce(&self.images)?;
        Ok(GeneratorWord(moves).inverse())
    }

    /// The conjugate `c^-1 phi(x_i) c` of every image.
    fn conjugated_images(images: &[ReducedWord], c: &ReducedWord) -> Vec<ReducedWord> {
        let ci = c.invert();
        images
            .iter()
            .map(|w| ci.concat_unchecked(w).concat_unchecked(c))
            .collect()
    }

    /// Conjugation-canonical representative of the outer class.
    pub fn outer_canonical(&self) -> Result<OuterClass, AutError> {
        outer_canonical_images(self.rank, &self.images, PLATEAU_CAP).map(|images| OuterClass {
            rank: self.rank,
            images,
        })
    }

    pub fn outer_equal(&self, other: &Automorphism) -> Result<bool, AutError> {
        self.check_rank(other.rank)?;
        Ok(self.outer_canonical()? == other.outer_canonical()?)
    }

    /// Entry `(j, i)` is the exponent sum of `x_j` in `phi(x_i)`: columns
    /// are images, so composition maps to matrix product.
    pub fn abelianization_matrix(&self) -> IntMatrix {
        let mut m = IntMatrix::zero(self.rank);
        for (i, w) in self.images.iter().enumerate() {
            for l in w.letters() {
                let delta = if l.is_inverse() { -1 } else { 1 };
                let cur = m.get(l.index(), i);
                m.set(l.index(), i, cur + delta);
            }
        }
        m
    }

    /// Extends by `x_{n+1} -> x_{n+1}` and returns the class in `Out(F_{n+1})`.
    pub fn embed_aut_to_out(&self) -> Result<OuterClass, AutError> {
        let rank = self.rank + 1;
        let mut images = self
            .images
            .iter()
            .map(|w| w.lift_rank(rank))
            .collect::<Result<Vec<_>, _>>()?;
        images.push(ReducedWord::generator(rank, rank)?);
        Automorphism { rank, images }.outer_canonical()
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("automorphism serializes")
    }
}

impl Serialize for Automorphism {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        use serde::ser::SerializeStruct;
        let mut st = s.serialize_struct("Automorphism", 2)?;
        st.serialize_field("rank", &self.rank)?;
        st.serialize_field("images", &self.images)?;
        st.end()
    }
}

impl<'de> Deserialize<'de> for Automorphism {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let raw = AutomorphismJson::deserialize(d)?;
        Automorphism::from_repr(raw.rank, raw.images).map_err(serde::de::Error::custom)
    }
}

impl fmt::Display for Automorphism {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, w) in self.images.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            let x = ReducedWord::generator(self.rank, i + 1).map_err(|_| fmt::Error)?;
            write!(f, "{x}->{w}")?;
        }
        write!(f, ")")
    }
}

impl fmt::Debug for Automorphism {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Automorphism{self}")
    }
}

/// An element of `Out(F_n)`: the image tuple conjugated to minimal total
/// length, lexicographically least among the minimizers.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub struct OuterClass {
    rank: usize,
    images: Vec<ReducedWord>,
}

impl OuterClass {
    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn images(&self) -> &[ReducedWord] {
        &self.images
    }

    pub fn total_length(&self) -> usize {
        self.images.iter().map(|w| w.len()).sum()
    }

    /// The canonical representative in `Aut(F_n)`.
    pub fn to_automorphism(&self) -> Automorphism {
        Automorphism::from_images_unchecked(self.rank, self.images.clone())
    }

    pub fn is_identity(&self) -> bool {
        self.to_automorphism() == Automorphism::identity(self.rank)
    }

    /// The representatives of minimal total length in increasing order,
    /// the canonical one first. At most `cap` are returned.
    pub fn minimal_representatives(&self, cap: usize) -> Result<Vec<Automorphism>, AutError> {
        let mut all: Vec<Vec<ReducedWord>> = minimal_plateau(self.rank, &self.images, PLATEAU_CAP)?
            .into_iter()
            .collect();
        all.sort();
        all.truncate(cap);
        Ok(all
            .into_iter()
            .map(|images| Automorphism::from_images_unchecked(self.rank, images))
            .collect())
    }

    /// Canonical form of `self ∘ g`.
    pub fn right_multiply(&self, g: Generator) -> Result<OuterClass, AutError> {
        g.check(self.rank)?;
        let mut images = self.images.clone();
        g.apply_right(&mut images);
        Automorphism::from_images_unchecked(self.rank, images).outer_canonical()
    }
}

impl Serialize for OuterClass {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        self.to_automorphism().serialize(s)
    }
}

pub const PLATEAU_CAP: usize = 1_000_000;

fn outer_canonical_images(
    rank: usize,
    images: &[ReducedWord],
    cap: usize,
) -> Result<Vec<ReducedWord>, AutError> {
    let plateau = minimal_plateau(rank, images, cap)?;
    Ok(plateau.into_iter().min().expect("plateau is nonempty"))
}

/// Every conjugate of minimal total length.
fn minimal_plateau(
    rank: usize,
    images: &[ReducedWord],
    cap: usize,
) -> Result<HashSet<Vec<ReducedWord>>, AutError> {
    let letters: Vec<ReducedWord> = (1..=rank)
        .flat_map(|g| [Letter::new(g, false), Letter::new(g, true)])
        .map(|l| ReducedWord::from_reduced_unchecked(rank, vec![l]))
        .collect();
    let total = |t: &[ReducedWord]| t.iter().map(|w| w.len()).sum::<usize>();

    // Displacement sums are convex on the Cayley tree, so steepest descent
    // over single-letter conjugations reaches the global minimum.
    let mut cur = images.to_vec();
    let mut cur_total = total(&cur);
    loop {
        let best = letters
            .iter()
            .map(|x| Automorphism::conjugated_images(&cur, x))
            .map(|t| (total(&t), t))
            .min_by_key(|(len, _)| *len)
            .expect("rank >= 1");
        if best.0 < cur_total {
            cur_total = best.0;
            cur = best.1;
        } else {
            break;
        }
    }

    // The minimizing set is a subtree; walk all of it.
    let mut seen: HashSet<Vec<ReducedWord>> = HashSet::new();
    let mut queue = VecDeque::new();
    seen.insert(cur.clone());
    queue.push_back(cur);
    while let Some(t) = queue.pop_front() {
        for x in &letters {
            let next = Automorphism::conjugated_images(&t, x);
            if total(&next) == cur_total && !seen.contains(&next) {
                if seen.len() >= cap {
                    return Err(AutError::PlateauTooLarge(cap));
                }
                seen.insert(next.clone());
                queue.push_back(next);
            }
        }
    }
    Ok(seen)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
enum MoveKind {
    /// `w_i <- w_i w_j`
    RightPlus,
    /// `w_i <- w_i w_j^-1`
    RightMinus,
    /// `w_i <- w_j w_i`
    LeftPlus,
    /// `w_i <- w_j^-1 w_i`
    LeftMinus,
}

const MOVE_KINDS: [MoveKind; 4] = [
    MoveKind::RightPlus,
    MoveKind::RightMinus,
    MoveKind::LeftPlus,
    MoveKind::LeftMinus,
];

/// Elementary Nielsen move on an image tuple (0-based indices).
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
struct NielsenMove {
    kind: MoveKind,
    i: usize,
    j: usize,
}

impl NielsenMove {
    /// New length of `w_i`, computed without building the word.
    fn new_length(self, t: &[ReducedWord], inv: &[ReducedWord]) -> usize {
        let (wi, wj) = (&t[self.i], &t[self.j]);
        let c = match self.kind {
            MoveKind::RightPlus => common_cancellation(wi.letters(), wj.letters()),
            MoveKind::RightMinus => common_cancellation(wi.letters(), inv[self.j].letters()),
            MoveKind::LeftPlus => common_cancellation(wj.letters(), wi.letters()),
            MoveKind::LeftMinus => common_cancellation(inv[self.j].letters(), wi.letters()),
        };
        wi.len() + wj.len() - 2 * c
    }

    /// The same move as right-composition by generators.
    fn generators(self) -> Vec<Generator> {
        let (i, j) = (self.i + 1, self.j + 1);
        match self.kind {
            MoveKind::RightPlus => vec![Generator::Twist { i, j }],
            MoveKind::RightMinus => vec![Generator::TwistInverse { i, j }],
            MoveKind::LeftPlus => vec![
                Generator::Inversion { i },
                Generator::TwistInverse { i, j },
                Generator::Inversion { i },
            ],
            MoveKind::LeftMinus => vec![
                Generator::Inversion { i },
                Generator::Twist { i, j },
                Generator::Inversion { i },
            ],
        }
    }

    fn apply(self, t: &mut [ReducedWord]) {
        for g in self.generators() {
            g.apply_right(t);
        }
    }
}

fn all_moves(rank: usize) -> Vec<NielsenMove> {
    let mut out = Vec::new();
    for kind in MOVE_KINDS {
        for i in 0..rank {
            for j in 0..rank {
                if i != j {
                    out.push(NielsenMove { kind, i, j });
                }
            }
        }
    }
    out
}

/// The move with the largest strict length reduction, ties going to the
/// least `(kind, i, j)`.
fn best_reducing_move(t: &[ReducedWord], moves: &[NielsenMove]) -> Option<NielsenMove> {
    let inv: Vec<ReducedWord> = t.iter().map(|w| w.invert()).collect();
    let mut best: Option<(usize, NielsenMove)> = None;
    for &m in moves {
        let old = t[m.i].len();
        let new = m.new_length(t, &inv);
        if new < old {
            let gain = old - new;
            if best.map_or(true, |(g, _)| gain > g) {
                best = Some((gain, m));
            }
        }
    }
    best.map(|(_, m)| m)
}

const LENGTH_PLATEAU_CAP: usize = 20_000;

/// Length-preserving moves from a stalled tuple, searching for a tuple that
/// admits a strictly reducing move. Returns the moves leading there.
fn escape_plateau(t: &[ReducedWord], moves: &[NielsenMove]) -> Option<Vec<NielsenMove>> {
    let total = |t: &[ReducedWord]| t.iter().map(|w| w.len()).sum::<usize>();
    let target = total(t);
    let mut parent: HashMap<Vec<ReducedWord>, Option<(Vec<ReducedWord>, NielsenMove)>> = HashMap::new();
    parent.insert(t.to_vec(), None);
    let mut queue = VecDeque::from([t.to_vec()]);
    while let Some(state) = queue.pop_front() {
        if best_reducing_move(&state, moves).is_some() {
            let mut path = Vec::new();
            let mut cur = state;
            while let Some(Some((prev, m))) = parent.get(&cur) {
                path.push(*m);
                cur = prev.clone();
            }
            path.reverse();
            return Some(path);
        }
        for &m in moves {
            let mut next = state.clone();
            m.apply(&mut next);
            if total(&next) == target && !parent.contains_key(&next) {
                if parent.len() >= LENGTH_PLATEAU_CAP {
                    return None;
                }
                parent.insert(next.clone(), Some((state.clone(), m)));
                queue.push_back(next);
            }
        }
    }
    None
}

/// Greedy Nielsen reduction. Returns generators `g_1, ..., g_m` with
/// `phi ∘ g_1 ∘ ... ∘ g_m = id`.
fn nielsen_reduce(images: &[ReducedWord]) -> Result<Vec<Generator>, AutError> {
    let rank = images.len();
    let moves = all_moves(rank);
    let mut t = images.to_vec();
    let mut out = Vec::new();
    let total = |t: &[ReducedWord]| t.iter().map(|w| w.len()).sum::<usize>();
    while total(&t) > rank {
        if let Some(m) = best_reducing_move(&t, &moves) {
            m.apply(&mut t);
            out.extend(m.generators());
            continue;
        }
        match escape_plateau(&t, &moves) {
            Some(path) if !path.is_empty() => {
                for m in path {
                    m.apply(&mut t);
                    out.extend(m.generators());
                }
            }
            _ => {
                return Err(AutError::NotAnAutomorphism {
                    total_length: total(&t),
                })
            }
        }
    }
    // Now a signed permutation of the basis, or not a basis at all.
    let mut seen = vec![false; rank];
    for w in &t {
        if w.len() != 1 || std::mem::replace(&mut seen[w.letters()[0].index()], true) {
            return Err(AutError::NotAnAutomorphism {
                total_length: total(&t),
            });
        }
    }
    for i in 0..rank {
        if t[i].letters()[0].is_inverse() {
            let g = Generator::Inversion { i: i + 1 };
            g.apply_right(&mut t);
            out.push(g);
        }
    }
    for i in 0..rank {
        let j = (0..rank)
            .find(|&j| t[j].letters()[0].index() == i)
            .expect("signed permutation");
        if j != i {
            let g = Generator::Permutation {
                i: i.min(j) + 1,
                j: i.max(j) + 1,
            };
            g.apply_right(&mut t);
            out.push(g);
        }
    }
    debug_assert_eq!(t, Automorphism::identity(rank).images);
    Ok(out)
}
