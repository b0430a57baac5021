//! L∞ algebras through the bar construction.
//!
//! An L∞ structure of degree `d` on `C` is stored as operations
//! `ℓ_k: S^k(V) → V` of degree `-1`, where `V = C[-d-1]`. The codifferential
//! `ℓ̂` on the reduced symmetric coalgebra `S(V)` is assembled from them by
//! [`hat_extend`]; the L∞ relations are the single equation `ℓ̂∘ℓ̂ = 0`.

mod coalgebra;
mod coderivation;
mod relations;

pub use coalgebra::{coproduct, Tensor};
pub use coderivation::{
    check_coleibniz, coderivation_commutator, hat_extend, linear_part, materialize,
    reconstruct_from_linear_part, ColeibnizFailure, HatExtension, OpsCoderivation, SymEndo,
    WordMap,
};
pub use relations::{check_linfty, lambda_eval, unfolded_relation, LInftyReport, Residual};

use alloc::collections::BTreeMap;
use alloc::string::String;
use alloc::vec::Vec;

use thiserror::Error;

use crate::graded::{
    normalize_unchecked, Element, GradedError, GradedSpace, Word, WordKind,
};
use crate::rational::Q;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LInftyError {
    #[error(transparent)]
    Graded(#[from] GradedError),
    #[error("table key `{key}` has {found} letters, expected {arity}")]
    ArityMismatch {
        key: String,
        arity: usize,
        found: usize,
    },
    #[error("table key `{0}` is zero in the symmetric power")]
    ZeroKey(String),
    #[error("value of `{key}` is not a linear combination of single letters")]
    NonLinearValue { key: String },
    #[error("entry `{key}`: output degree {found}, expected {expected}")]
    DegreeMismatch {
        key: String,
        expected: i64,
        found: i64,
    },
    #[error("operation of arity {arity} has degree {found}, structure maps need degree -1")]
    OpDegree { arity: usize, found: i64 },
    #[error("arity must be positive")]
    ZeroArity,
    #[error("{found} filtration weights for {expected} generators")]
    WeightCount { expected: usize, found: usize },
    #[error("input is not a coderivation: co-Leibniz fails on `{word}`")]
    NotCoderivation { word: String },
}

/// A multilinear map `S^k(V) → W` of fixed degree, stored sparsely on
/// canonical symmetric words.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MultilinearOp {
    arity: usize,
    degree: i64,
    table: BTreeMap<Word, Element>,
}

impl MultilinearOp {
    pub fn zero(arity: usize, degree: i64) -> Self {
        MultilinearOp {
            arity,
            degree,
            table: BTreeMap::new(),
        }
    }

    /// Build from `(input letters, output)` pairs.
    ///
    /// Keys are normalized (their sign is folded into the value); outputs
    /// must be combinations of single letters of `target` over
    /// `C[target_shift]` with degree `input degree + degree`.
    #[allow(clippy::too_many_arguments)]
    pub fn new<I>(
        source: &GradedSpace,
        source_shift: i64,
        target: &GradedSpace,
        target_shift: i64,
        arity: usize,
        degree: i64,
        entries: I,
    ) -> Result<Self, LInftyError>
    where
        I: IntoIterator<Item = (Vec<usize>, Element)>,
    {
        if arity == 0 {
            return Err(LInftyError::ZeroArity);
        }
        let mut op = MultilinearOp::zero(arity, degree);
        for (letters, value) in entries {
            let raw = Word::symmetric(letters.clone(), source_shift);
            if letters.len() != arity {
                return Err(LInftyError::ArityMismatch {
                    key: source.format_word(&raw),
                    arity,
                    found: letters.len(),
                });
            }
            if let Some(&bad) = letters.iter().find(|&&l| l >= source.len()) {
                return Err(GradedError::UnknownIndex(bad).into());
            }
            let (neg, key) =
                match normalize_unchecked(source, WordKind::Symmetric, letters, source_shift) {
                    Some(x) => x,
                    None => {
                        if value.is_zero() {
                            continue;
                        }
                        return Err(LInftyError::ZeroKey(source.format_word(&raw)));
                    }
                };
            let in_deg = source.word_degree(&key);
            for w in value.words() {
                if w.len() != 1 || w.kind != WordKind::Symmetric || w.shift != target_shift {
                    return Err(LInftyError::NonLinearValue {
                        key: source.format_word(&key),
                    });
                }
                if w.letters[0] >= target.len() {
                    return Err(GradedError::UnknownIndex(w.letters[0]).into());
                }
                let out_deg = target.word_degree(w);
                if out_deg != in_deg + degree {
                    return Err(LInftyError::DegreeMismatch {
                        key: source.format_word(&key),
                        expected: in_deg + degree,
                        found: out_deg,
                    });
                }
            }
            let value = if neg { value.neg() } else { value };
            op.accumulate(key, &value);
        }
        Ok(op)
    }

    /// Build from an already canonical table; zero values are dropped.
    pub fn from_table(arity: usize, degree: i64, table: BTreeMap<Word, Element>) -> Self {
        MultilinearOp {
            arity,
            degree,
            table: table.into_iter().filter(|(_, v)| !v.is_zero()).collect(),
        }
    }

    /// Add `value` to the entry at a canonical key without validation.
    pub(crate) fn accumulate(&mut self, key: Word, value: &Element) {
        let slot = self.table.entry(key.clone()).or_default();
        slot.add_assign(value);
        if slot.is_zero() {
            self.table.remove(&key);
        }
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    pub fn degree(&self) -> i64 {
        self.degree
    }

    pub fn table(&self) -> &BTreeMap<Word, Element> {
        &self.table
    }

    pub fn is_zero(&self) -> bool {
        self.table.is_empty()
    }

    /// Value on a canonical key.
    pub fn get(&self, key: &Word) -> Option<&Element> {
        self.table.get(key)
    }

    /// Value on an arbitrary letter sequence of the source.
    pub fn eval_letters(&self, source: &GradedSpace, letters: &[usize], shift: i64) -> Element {
        if letters.len() != self.arity {
            return Element::zero();
        }
        match normalize_unchecked(source, WordKind::Symmetric, letters.to_vec(), shift) {
            None => Element::zero(),
            Some((neg, key)) => match self.table.get(&key) {
                None => Element::zero(),
                Some(v) if neg => v.neg(),
                Some(v) => v.clone(),
            },
        }
    }

    /// Multilinear extension to an element of `S^k` (other lengths give 0).
    pub fn eval(&self, input: &Element) -> Element {
        let mut out = Element::zero();
        for (w, c) in input.iter() {
            if w.len() != self.arity {
                continue;
            }
            if let Some(v) = self.table.get(w) {
                out.add_scaled(v, c);
            }
        }
        out
    }

    /// Overwrite one entry; used to build deliberately broken fixtures.
    pub fn set_entry(&mut self, key: Word, value: Element) {
        if value.is_zero() {
            self.table.remove(&key);
        } else {
            self.table.insert(key, value);
        }
    }
}

/// A (possibly filtered) L∞ algebra of degree `d` on a finite graded space.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LInftyAlgebra {
    space: GradedSpace,
    degree: i64,
    ops: BTreeMap<usize, MultilinearOp>,
    weights: Vec<i64>,
}

impl LInftyAlgebra {
    /// `ops` are the bar-side maps `ℓ_k`; all must have degree `-1`.
    pub fn new(
        space: GradedSpace,
        degree: i64,
        ops: impl IntoIterator<Item = MultilinearOp>,
        weights: Option<Vec<i64>>,
    ) -> Result<Self, LInftyError> {
        let weights = weights.unwrap_or_else(|| alloc::vec![0; space.len()]);
        if weights.len() != space.len() {
            return Err(LInftyError::WeightCount {
                expected: space.len(),
                found: weights.len(),
            });
        }
        let mut map = BTreeMap::new();
        for op in ops {
            if op.degree != -1 {
                return Err(LInftyError::OpDegree {
                    arity: op.arity,
                    found: op.degree,
                });
            }
            if !op.is_zero() {
                map.insert(op.arity, op);
            }
        }
        Ok(LInftyAlgebra {
            space,
            degree,
            ops: map,
            weights,
        })
    }

    /// Build from the operations `λ_k: Λ^k(C[-d]) → C[-d]` (degree `k-2`),
    /// converting through `ℓ_k = σ_1∘λ_k∘σ_k⁻¹`.
    ///
    /// Each entry is `(arity, input letters, output)`, the output being a
    /// list of `(generator, coefficient)`.
    pub fn from_lambda<I>(
        space: GradedSpace,
        degree: i64,
        entries: I,
        weights: Option<Vec<i64>>,
    ) -> Result<Self, LInftyError>
    where
        I: IntoIterator<Item = (usize, Vec<usize>, Vec<(usize, Q)>)>,
    {
        let ext_shift = -degree;
        let bar_shift = ext_shift - 1;
        let mut by_arity: BTreeMap<usize, Vec<(Vec<usize>, Element)>> = BTreeMap::new();
        for (arity, letters, out) in entries {
            if letters.len() != arity {
                let w = Word::exterior(letters.clone(), ext_shift);
                return Err(LInftyError::ArityMismatch {
                    key: space.format_word(&w),
                    arity,
                    found: letters.len(),
                });
            }
            if let Some(&bad) = letters.iter().find(|&&l| l >= space.len()) {
                return Err(GradedError::UnknownIndex(bad).into());
            }
            // λ(c_1∧⋯∧c_k) = y  ⇒  ℓ(σ_k(c_1∧⋯∧c_k)) = ȳ, and σ_k(c∧) = s·c̄_1⋯c̄_k
            let s = crate::graded::sigma_sign_negative(&space, &letters, ext_shift);
            let mut value = Element::zero();
            for (g, c) in out {
                if g >= space.len() {
                    return Err(GradedError::UnknownIndex(g).into());
                }
                value.add_term(Word::symmetric(alloc::vec![g], bar_shift), c);
            }
            if s {
                value = value.neg();
            }
            by_arity.entry(arity).or_default().push((letters, value));
        }
        let mut ops = Vec::new();
        for (arity, entries) in by_arity {
            ops.push(MultilinearOp::new(
                &space, bar_shift, &space, bar_shift, arity, -1, entries,
            )?);
        }
        LInftyAlgebra::new(space, degree, ops, weights)
    }

    pub fn space(&self) -> &GradedSpace {
        &self.space
    }

    pub fn degree(&self) -> i64 {
        self.degree
    }

    /// The `n` of `V = C[n]` on which the `ℓ_k` act: `-(d+1)`.
    pub fn bar_shift(&self) -> i64 {
        -(self.degree + 1)
    }

    /// Shift of the space carrying the degree-0 operations `λ_k`: `-d`.
    pub fn lambda_shift(&self) -> i64 {
        -self.degree
    }

    pub fn ops(&self) -> impl Iterator<Item = &MultilinearOp> {
        self.ops.values()
    }

    pub fn op(&self, arity: usize) -> Option<&MultilinearOp> {
        self.ops.get(&arity)
    }

    pub fn op_mut(&mut self, arity: usize) -> Option<&mut MultilinearOp> {
        self.ops.get_mut(&arity)
    }

    pub fn max_arity(&self) -> usize {
        self.ops.keys().next_back().copied().unwrap_or(0)
    }

    pub fn weights(&self) -> &[i64] {
        &self.weights
    }

    pub fn weight(&self, g: usize) -> i64 {
        self.weights[g]
    }

    pub fn set_weights(&mut self, weights: Vec<i64>) -> Result<(), LInftyError> {
        if weights.len() != self.space.len() {
            return Err(LInftyError::WeightCount {
                expected: self.space.len(),
                found: weights.len(),
            });
        }
        self.weights = weights;
        Ok(())
    }

    /// Filtration weight of a word: sum of its letters' weights.
    pub fn word_weight(&self, w: &Word) -> i64 {
        w.letters.iter().map(|&l| self.weights[l]).sum()
    }

    /// Single letter `x̄` of `V`.
    pub fn bar_letter(&self, g: usize) -> Word {
        Word::symmetric(alloc::vec![g], self.bar_shift())
    }

    /// Canonical basis words of `S^{≤max_len}(V)`.
    pub fn bar_words(&self, max_len: usize) -> Vec<Word> {
        self.space
            .canonical_words_up_to(WordKind::Symmetric, self.bar_shift(), max_len)
    }

    /// `ℓ̂` on one canonical word.
    pub fn hat(&self, w: &Word) -> Element {
        let mut out = Element::zero();
        for op in self.ops.values() {
            if op.arity <= w.len() {
                out.add_assign(&hat_extend(&self.space, op, w));
            }
        }
        out
    }

    pub fn hat_elem(&self, e: &Element) -> Element {
        let mut out = Element::zero();
        for (w, c) in e.iter() {
            out.add_scaled(&self.hat(w), c);
        }
        out
    }

    /// `ℓ_k` applied to the symmetric product of the given bar elements.
    pub fn ell(&self, inputs: &[&Element]) -> Element {
        let k = inputs.len();
        let Some(op) = self.ops.get(&k) else {
            return Element::zero();
        };
        let mut prod = match inputs.first() {
            Some(e) => (*e).clone(),
            None => return Element::zero(),
        };
        for e in &inputs[1..] {
            prod = self.space.mul(&prod, e);
        }
        op.eval(&prod)
    }
}

impl SymEndo for LInftyAlgebra {
    fn degree(&self) -> i64 {
        -1
    }

    fn apply_word(&self, w: &Word) -> Element {
        self.hat(w)
    }
}
