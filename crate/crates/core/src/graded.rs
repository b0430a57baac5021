//! Graded vector spaces over `Q`, basis words in symmetric and exterior
//! powers, Koszul signs and the shift isomorphism between `Λ^k C` and
//! `S^k(C[-1])`.
//!
//! Degrees follow the homological convention `C[n]_d = C_{d+n}`: a generator
//! of degree `e` in `C` has degree `e - n` in `C[n]`. A [`Word`] records the
//! `n` it lives over in its `shift` field.

use alloc::collections::BTreeMap;
use alloc::string::String;
use alloc::vec::Vec;
use core::cmp::Ordering;
use core::fmt::Write as _;

use num_traits::{One, Zero};
use thiserror::Error;

use crate::rational::Q;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GradedError {
    #[error("duplicate generator name `{0}`")]
    DuplicateGenerator(String),
    #[error("unknown generator `{0}`")]
    UnknownGenerator(String),
    #[error("generator index {0} out of range")]
    UnknownIndex(usize),
    #[error("permutation has {perm} entries but {degrees} degrees were given")]
    LengthMismatch { perm: usize, degrees: usize },
    #[error("not a permutation of 0..{0}")]
    NotAPermutation(usize),
    #[error("expected a {expected:?} word")]
    WrongKind { expected: WordKind },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Generator {
    pub name: String,
    pub degree: i64,
}

/// Finite graded basis. Construction order is the canonical letter order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GradedSpace {
    generators: Vec<Generator>,
    index: BTreeMap<String, usize>,
}

impl GradedSpace {
    pub fn new<I, S>(generators: I) -> Result<Self, GradedError>
    where
        I: IntoIterator<Item = (S, i64)>,
        S: Into<String>,
    {
        let mut gens = Vec::new();
        let mut index = BTreeMap::new();
        for (name, degree) in generators {
            let name = name.into();
            if index.insert(name.clone(), gens.len()).is_some() {
                return Err(GradedError::DuplicateGenerator(name));
            }
            gens.push(Generator { name, degree });
        }
        Ok(GradedSpace {
            generators: gens,
            index,
        })
    }

    pub fn len(&self) -> usize {
        self.generators.len()
    }

    pub fn is_empty(&self) -> bool {
        self.generators.is_empty()
    }

    pub fn generators(&self) -> &[Generator] {
        &self.generators
    }

    pub fn degree(&self, i: usize) -> i64 {
        self.generators[i].degree
    }

    pub fn name(&self, i: usize) -> &str {
        &self.generators[i].name
    }

    pub fn index_of(&self, name: &str) -> Result<usize, GradedError> {
        self.index
            .get(name)
            .copied()
            .ok_or_else(|| GradedError::UnknownGenerator(name.into()))
    }

    /// Degree of generator `i` viewed in `C[shift]`.
    #[inline]
    pub fn shifted_degree(&self, i: usize, shift: i64) -> i64 {
        self.generators[i].degree - shift
    }

    fn check_letters(&self, letters: &[usize]) -> Result<(), GradedError> {
        match letters.iter().find(|&&l| l >= self.len()) {
            Some(&l) => Err(GradedError::UnknownIndex(l)),
            None => Ok(()),
        }
    }

    pub fn word_degree(&self, w: &Word) -> i64 {
        w.letters
            .iter()
            .map(|&l| self.shifted_degree(l, w.shift))
            .sum()
    }

    /// Build a word from generator names (not normalized).
    pub fn letters_from_names<S: AsRef<str>>(
        &self,
        names: &[S],
    ) -> Result<Vec<usize>, GradedError> {
        names.iter().map(|n| self.index_of(n.as_ref())).collect()
    }

    pub fn format_word(&self, w: &Word) -> String {
        if w.letters.is_empty() {
            return String::from("1");
        }
        let sep = match w.kind {
            WordKind::Symmetric => "·",
            WordKind::Exterior => "∧",
        };
        let mut s = String::new();
        for (i, &l) in w.letters.iter().enumerate() {
            if i > 0 {
                s.push_str(sep);
            }
            s.push_str(self.name(l));
        }
        s
    }

    pub fn format_element(&self, e: &Element) -> String {
        if e.is_zero() {
            return String::from("0");
        }
        let mut s = String::new();
        for (i, (w, c)) in e.iter().enumerate() {
            if i > 0 {
                s.push_str(" + ");
            }
            let _ = write!(s, "({}) {}", c, self.format_word(w));
        }
        s
    }

    /// All canonical (sorted, nonzero) words of a given length.
    pub fn canonical_words(&self, kind: WordKind, shift: i64, len: usize) -> Vec<Word> {
        let mut out = Vec::new();
        let mut cur = Vec::with_capacity(len);
        self.enumerate_words(kind, shift, len, 0, &mut cur, &mut out);
        out
    }

    /// Canonical words of every length `1..=max_len`, shortest first.
    pub fn canonical_words_up_to(&self, kind: WordKind, shift: i64, max_len: usize) -> Vec<Word> {
        (1..=max_len)
            .flat_map(|k| self.canonical_words(kind, shift, k))
            .collect()
    }

    fn enumerate_words(
        &self,
        kind: WordKind,
        shift: i64,
        len: usize,
        start: usize,
        cur: &mut Vec<usize>,
        out: &mut Vec<Word>,
    ) {
        if cur.len() == len {
            out.push(Word {
                kind,
                letters: cur.clone(),
                shift,
            });
            return;
        }
        for g in start..self.len() {
            if cur.last() == Some(&g) && repeat_vanishes(kind, self.shifted_degree(g, shift)) {
                continue;
            }
            cur.push(g);
            self.enumerate_words(kind, shift, len, g, cur, out);
            cur.pop();
        }
    }

    /// Product in `S(C[shift])` or `Λ(C[shift])`: concatenate and normalize.
    pub fn mul(&self, a: &Element, b: &Element) -> Element {
        let mut out = Element::zero();
        for (wa, ca) in a.iter() {
            for (wb, cb) in b.iter() {
                debug_assert_eq!(wa.kind, wb.kind);
                debug_assert!(wa.letters.is_empty() || wb.letters.is_empty() || wa.shift == wb.shift);
                let shift = if wa.letters.is_empty() { wb.shift } else { wa.shift };
                let mut letters = Vec::with_capacity(wa.len() + wb.len());
                letters.extend_from_slice(&wa.letters);
                letters.extend_from_slice(&wb.letters);
                if let Some((neg, w)) = normalize_unchecked(self, wa.kind, letters, shift) {
                    let c = ca * cb;
                    out.add_term(w, if neg { -c } else { c });
                }
            }
        }
        out
    }
}

/// Whether a repeated letter of the given (shifted) degree kills the word.
#[inline]
fn repeat_vanishes(kind: WordKind, degree: i64) -> bool {
    match kind {
        WordKind::Symmetric => degree.rem_euclid(2) == 1,
        WordKind::Exterior => degree.rem_euclid(2) == 0,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum WordKind {
    Symmetric,
    Exterior,
}

/// A monomial `c_1⋯c_k` (symmetric) or `c_1∧⋯∧c_k` (exterior) over `C[shift]`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Word {
    pub kind: WordKind,
    pub letters: Vec<usize>,
    pub shift: i64,
}

impl Word {
    pub fn symmetric(letters: Vec<usize>, shift: i64) -> Self {
        Word {
            kind: WordKind::Symmetric,
            letters,
            shift,
        }
    }

    pub fn exterior(letters: Vec<usize>, shift: i64) -> Self {
        Word {
            kind: WordKind::Exterior,
            letters,
            shift,
        }
    }

    pub fn len(&self) -> usize {
        self.letters.len()
    }

    pub fn is_empty(&self) -> bool {
        self.letters.is_empty()
    }
}

impl Ord for Word {
    fn cmp(&self, other: &Self) -> Ordering {
        self.kind
            .cmp(&other.kind)
            .then(self.shift.cmp(&other.shift))
            .then(self.letters.len().cmp(&other.letters.len()))
            .then_with(|| self.letters.cmp(&other.letters))
    }
}

impl PartialOrd for Word {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

#[inline]
fn parity(d: i64) -> bool {
    d.rem_euclid(2) == 1
}

/// Koszul sign of the rearrangement `c_1⋯c_k ↦ c_{ρ(1)}⋯c_{ρ(k)}`.
///
/// `perm[p]` is the (0-based) index of the factor placed at position `p`.
/// The exponent is the sum of `|c_a||c_b|` over every pair of factors whose
/// relative order is reversed.
pub fn koszul_sign(perm: &[usize], degrees: &[i64]) -> Result<i8, GradedError> {
    if perm.len() != degrees.len() {
        return Err(GradedError::LengthMismatch {
            perm: perm.len(),
            degrees: degrees.len(),
        });
    }
    let k = perm.len();
    let mut seen = alloc::vec![false; k];
    for &p in perm {
        if p >= k || seen[p] {
            return Err(GradedError::NotAPermutation(k));
        }
        seen[p] = true;
    }
    Ok(if koszul_negative(perm, |i| parity(degrees[i])) {
        -1
    } else {
        1
    })
}

/// Parity form of [`koszul_sign`] with no validation; `odd(i)` gives the
/// parity of factor `i`.
#[inline]
pub(crate) fn koszul_negative(perm: &[usize], odd: impl Fn(usize) -> bool) -> bool {
    let mut neg = false;
    for p in 0..perm.len() {
        if !odd(perm[p]) {
            continue;
        }
        for q in p + 1..perm.len() {
            if perm[p] > perm[q] && odd(perm[q]) {
                neg = !neg;
            }
        }
    }
    neg
}

/// Result of bringing a word to canonical form.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Normalized {
    Zero,
    Word { sign: i8, word: Word },
}

/// Stable-sort the letters, accumulating the Koszul sign (and, for exterior
/// words, the permutation sign). Repeated odd letters kill a symmetric word,
/// repeated even letters kill an exterior word.
pub fn normalize_word(
    space: &GradedSpace,
    kind: WordKind,
    letters: &[usize],
    shift: i64,
) -> Result<Normalized, GradedError> {
    space.check_letters(letters)?;
    Ok(match normalize_unchecked(space, kind, letters.to_vec(), shift) {
        None => Normalized::Zero,
        Some((neg, word)) => Normalized::Word {
            sign: if neg { -1 } else { 1 },
            word,
        },
    })
}

/// Insertion sort by adjacent transpositions; each swap of two letters
/// contributes `|a||b|` (plus one for exterior words).
pub(crate) fn normalize_unchecked(
    space: &GradedSpace,
    kind: WordKind,
    mut letters: Vec<usize>,
    shift: i64,
) -> Option<(bool, Word)> {
    let mut neg = false;
    for i in 1..letters.len() {
        let mut j = i;
        while j > 0 && letters[j - 1] > letters[j] {
            let a = parity(space.shifted_degree(letters[j - 1], shift));
            let b = parity(space.shifted_degree(letters[j], shift));
            if (a && b) ^ (kind == WordKind::Exterior) {
                neg = !neg;
            }
            letters.swap(j - 1, j);
            j -= 1;
        }
    }
    for w in letters.windows(2) {
        if w[0] == w[1] && repeat_vanishes(kind, space.shifted_degree(w[0], shift)) {
            return None;
        }
    }
    Some((neg, Word { kind, letters, shift }))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ShiftDirection {
    /// `(Λ^k C)[-k] → S^k(C[-1])`
    ToSymmetric,
    /// `S^k(C[-1]) → (Λ^k C)[-k]`
    ToExterior,
}

/// The shift isomorphism `σ_k(c_1∧⋯∧c_k) = (-1)^{Σ(k-i)|c_i|} c_1⋯c_k`,
/// with `|c_i|` the degree in the exterior side's space.
///
/// An exterior word over `C[s]` maps to a symmetric word over `C[s-1]`; the
/// inverse direction undoes it. The result is normalized.
pub fn sigma_shift(
    space: &GradedSpace,
    word: &Word,
    direction: ShiftDirection,
) -> Result<Normalized, GradedError> {
    space.check_letters(&word.letters)?;
    let (expected, target, ext_shift) = match direction {
        ShiftDirection::ToSymmetric => (WordKind::Exterior, WordKind::Symmetric, word.shift),
        ShiftDirection::ToExterior => (WordKind::Symmetric, WordKind::Exterior, word.shift + 1),
    };
    if word.kind != expected {
        return Err(GradedError::WrongKind { expected });
    }
    let sigma_neg = sigma_sign_negative(space, &word.letters, ext_shift);
    let new_shift = match direction {
        ShiftDirection::ToSymmetric => word.shift - 1,
        ShiftDirection::ToExterior => word.shift + 1,
    };
    Ok(
        match normalize_unchecked(space, target, word.letters.clone(), new_shift) {
            None => Normalized::Zero,
            Some((neg, w)) => Normalized::Word {
                sign: if neg ^ sigma_neg { -1 } else { 1 },
                word: w,
            },
        },
    )
}

/// Parity of `Σ_i (k-i)|c_i|` with degrees taken in `C[ext_shift]`.
pub(crate) fn sigma_sign_negative(space: &GradedSpace, letters: &[usize], ext_shift: i64) -> bool {
    let k = letters.len();
    let mut neg = false;
    for (i, &l) in letters.iter().enumerate() {
        // 0-based i ↦ exponent (k - (i+1))
        let e = (k - 1 - i) as i64 * space.shifted_degree(l, ext_shift);
        if parity(e) {
            neg = !neg;
        }
    }
    neg
}

/// Finite linear combination of canonical words with nonzero coefficients.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Element {
    terms: BTreeMap<Word, Q>,
}

impl Element {
    pub fn zero() -> Self {
        Element::default()
    }

    pub fn from_term(w: Word, c: Q) -> Self {
        let mut e = Element::zero();
        e.add_term(w, c);
        e
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Word, &Q)> {
        self.terms.iter()
    }

    pub fn words(&self) -> impl Iterator<Item = &Word> {
        self.terms.keys()
    }

    pub fn coeff(&self, w: &Word) -> Q {
        self.terms.get(w).cloned().unwrap_or_else(Q::zero)
    }

    /// Add `c·w`; `w` must already be canonical.
    pub fn add_term(&mut self, w: Word, c: Q) {
        if c.is_zero() {
            return;
        }
        match self.terms.entry(w) {
            alloc::collections::btree_map::Entry::Vacant(v) => {
                v.insert(c);
            }
            alloc::collections::btree_map::Entry::Occupied(mut o) => {
                *o.get_mut() += c;
                if o.get().is_zero() {
                    o.remove();
                }
            }
        }
    }

    pub fn add_scaled(&mut self, other: &Element, c: &Q) {
        if c.is_zero() {
            return;
        }
        for (w, x) in other.iter() {
            self.add_term(w.clone(), x * c);
        }
    }

    pub fn add_assign(&mut self, other: &Element) {
        self.add_scaled(other, &Q::one());
    }

    pub fn sub_assign(&mut self, other: &Element) {
        self.add_scaled(other, &-Q::one());
    }

    pub fn scaled(&self, c: &Q) -> Element {
        let mut out = Element::zero();
        out.add_scaled(self, c);
        out
    }

    pub fn neg(&self) -> Element {
        self.scaled(&-Q::one())
    }

    pub fn sub(&self, other: &Element) -> Element {
        let mut out = self.clone();
        out.sub_assign(other);
        out
    }

    /// Keep only the terms satisfying `keep`.
    pub fn filter(&self, mut keep: impl FnMut(&Word) -> bool) -> Element {
        Element {
            terms: self
                .terms
                .iter()
                .filter(|(w, _)| keep(w))
                .map(|(w, c)| (w.clone(), c.clone()))
                .collect(),
        }
    }

    /// Terms whose word has exactly `len` letters.
    pub fn component(&self, len: usize) -> Element {
        self.filter(|w| w.len() == len)
    }
}

impl FromIterator<(Word, Q)> for Element {
    fn from_iter<T: IntoIterator<Item = (Word, Q)>>(iter: T) -> Self {
        let mut e = Element::zero();
        for (w, c) in iter {
            e.add_term(w, c);
        }
        e
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ElementDegree {
    /// The zero element has every degree.
    Any,
    Homogeneous(i64),
    Mixed,
}

pub fn element_degree(space: &GradedSpace, e: &Element) -> ElementDegree {
    let mut deg = None;
    for w in e.words() {
        let d = space.word_degree(w);
        match deg {
            None => deg = Some(d),
            Some(x) if x != d => return ElementDegree::Mixed,
            _ => {}
        }
    }
    match deg {
        None => ElementDegree::Any,
        Some(d) => ElementDegree::Homogeneous(d),
    }
}
