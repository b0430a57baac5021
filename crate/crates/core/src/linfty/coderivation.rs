//! Coderivations of `S(V)`: extension of multilinear maps, the co-Leibniz
//! rule, commutators, and recovery from linear parts.

use alloc::collections::BTreeMap;
use alloc::vec::Vec;

use num_traits::One;

use super::coalgebra::{coproduct, coproduct_elem, sub_word, Tensor};
use super::{LInftyError, MultilinearOp};
use crate::combinat::{complement, subsets};
use crate::graded::{koszul_negative, Element, GradedSpace, Word, WordKind};
use crate::rational::Q;

/// A homogeneous linear endomorphism of `S(V)`, given on canonical words.
pub trait SymEndo {
    fn degree(&self) -> i64;

    fn apply_word(&self, w: &Word) -> Element;

    fn apply(&self, e: &Element) -> Element {
        let mut out = Element::zero();
        for (w, c) in e.iter() {
            out.add_scaled(&self.apply_word(w), c);
        }
        out
    }
}

/// `ℓ̂_k(c_1⋯c_r) = Σ_I ε · ℓ_k(c_I) c_J` over the `k`-subsets `I`.
///
/// The output of `op` must live in the same space as `w`.
pub fn hat_extend(space: &GradedSpace, op: &MultilinearOp, w: &Word) -> Element {
    let r = w.len();
    let k = op.arity();
    let mut out = Element::zero();
    if r < k {
        return out;
    }
    for i in subsets(r, k) {
        let Some(value) = op.get(&sub_word(w, &i)) else {
            continue;
        };
        let j = complement(r, &i);
        let mut perm = i.clone();
        perm.extend_from_slice(&j);
        let neg = koszul_negative(&perm, |p| {
            space.shifted_degree(w.letters[p], w.shift).rem_euclid(2) == 1
        });
        let sign = if neg { -Q::one() } else { Q::one() };
        if j.is_empty() {
            out.add_scaled(value, &sign);
        } else {
            let rest = Element::from_term(sub_word(w, &j), sign);
            out.add_assign(&space.mul(value, &rest));
        }
    }
    out
}

/// `ℓ̂_k` for a single borrowed operation.
pub struct HatExtension<'a> {
    pub space: &'a GradedSpace,
    pub op: &'a MultilinearOp,
}

impl SymEndo for HatExtension<'_> {
    fn degree(&self) -> i64 {
        self.op.degree()
    }

    fn apply_word(&self, w: &Word) -> Element {
        hat_extend(self.space, self.op, w)
    }
}

/// The coderivation `Σ_k ĝ_k` built from a family of linear parts.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OpsCoderivation {
    space: GradedSpace,
    degree: i64,
    ops: BTreeMap<usize, MultilinearOp>,
}

impl OpsCoderivation {
    pub fn ops(&self) -> impl Iterator<Item = &MultilinearOp> {
        self.ops.values()
    }
}

impl SymEndo for OpsCoderivation {
    fn degree(&self) -> i64 {
        self.degree
    }

    fn apply_word(&self, w: &Word) -> Element {
        let mut out = Element::zero();
        for op in self.ops.values() {
            out.add_assign(&hat_extend(&self.space, op, w));
        }
        out
    }
}

/// An endomorphism tabulated on all canonical words up to some length;
/// longer words map to zero.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WordMap {
    pub degree: i64,
    pub table: BTreeMap<Word, Element>,
}

impl SymEndo for WordMap {
    fn degree(&self) -> i64 {
        self.degree
    }

    fn apply_word(&self, w: &Word) -> Element {
        self.table.get(w).cloned().unwrap_or_default()
    }
}

/// Tabulate `d` on every canonical word of length `≤ max_len` over `C[shift]`.
pub fn materialize(
    space: &GradedSpace,
    shift: i64,
    d: &impl SymEndo,
    max_len: usize,
) -> WordMap {
    let table = space
        .canonical_words_up_to(WordKind::Symmetric, shift, max_len)
        .into_iter()
        .map(|w| {
            let v = d.apply_word(&w);
            (w, v)
        })
        .filter(|(_, v)| !v.is_zero())
        .collect();
    WordMap {
        degree: d.degree(),
        table,
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ColeibnizFailure {
    pub word: Word,
    /// `ΔD(w) - (D⊗1 + 1⊗D)Δ(w)`
    pub residual: Tensor,
}

/// Check `Δ∘D = (D⊗1 + 1⊗D)∘Δ` on all canonical words up to `max_len`;
/// returns the first word where it fails.
pub fn check_coleibniz(
    space: &GradedSpace,
    shift: i64,
    d: &impl SymEndo,
    max_len: usize,
) -> Option<ColeibnizFailure> {
    for w in space.canonical_words_up_to(WordKind::Symmetric, shift, max_len) {
        let lhs = coproduct_elem(space, &d.apply_word(&w));
        let delta = coproduct(space, &w);
        let mut rhs = delta.map_factor_elem(space, 0, d.degree(), |u| d.apply_word(u));
        rhs.add_scaled(
            &delta.map_factor_elem(space, 1, d.degree(), |u| d.apply_word(u)),
            &Q::one(),
        );
        let residual = lhs.sub(&rhs);
        if !residual.is_zero() {
            return Some(ColeibnizFailure { word: w, residual });
        }
    }
    None
}

fn require_coderivation(
    space: &GradedSpace,
    shift: i64,
    d: &impl SymEndo,
    max_len: usize,
) -> Result<(), LInftyError> {
    match check_coleibniz(space, shift, d, max_len) {
        None => Ok(()),
        Some(f) => Err(LInftyError::NotCoderivation {
            word: space.format_word(&f.word),
        }),
    }
}

/// `[D_1, D_2] = D_1∘D_2 - (-1)^{|D_1||D_2|} D_2∘D_1`, tabulated up to `max_len`.
///
/// Both inputs are checked against the co-Leibniz rule first.
pub fn coderivation_commutator(
    space: &GradedSpace,
    shift: i64,
    d1: &impl SymEndo,
    d2: &impl SymEndo,
    max_len: usize,
) -> Result<WordMap, LInftyError> {
    require_coderivation(space, shift, d1, max_len)?;
    require_coderivation(space, shift, d2, max_len)?;
    let odd = (d1.degree() * d2.degree()).rem_euclid(2) == 1;
    let mut table = BTreeMap::new();
    for w in space.canonical_words_up_to(WordKind::Symmetric, shift, max_len) {
        let mut v = d1.apply(&d2.apply_word(&w));
        let back = d2.apply(&d1.apply_word(&w));
        if odd {
            v.add_assign(&back);
        } else {
            v.sub_assign(&back);
        }
        if !v.is_zero() {
            table.insert(w, v);
        }
    }
    Ok(WordMap {
        degree: d1.degree() + d2.degree(),
        table,
    })
}

/// `π_1∘D` restricted to each `S^k`, `k ≤ max_len`.
pub fn linear_part(
    space: &GradedSpace,
    shift: i64,
    d: &impl SymEndo,
    max_len: usize,
) -> Vec<MultilinearOp> {
    (1..=max_len)
        .filter_map(|k| {
            let mut op = MultilinearOp::zero(k, d.degree());
            for w in space.canonical_words(WordKind::Symmetric, shift, k) {
                let v = d.apply_word(&w).component(1);
                if !v.is_zero() {
                    op.accumulate(w, &v);
                }
            }
            (!op.is_zero()).then_some(op)
        })
        .collect()
}

/// The unique coderivation with the given linear parts.
pub fn reconstruct_from_linear_part(
    space: &GradedSpace,
    degree: i64,
    ops: impl IntoIterator<Item = MultilinearOp>,
) -> OpsCoderivation {
    OpsCoderivation {
        space: space.clone(),
        degree,
        ops: ops
            .into_iter()
            .filter(|op| !op.is_zero())
            .map(|op| (op.arity(), op))
            .collect(),
    }
}

#[cfg(test)]
mod tests {
    use alloc::vec;
    use alloc::vec::Vec;
    use super::*;
    use crate::rational::q;

    fn space() -> GradedSpace {
        GradedSpace::new([("x", 0), ("y", 0), ("z", 1)]).unwrap()
    }

    fn letter(g: usize) -> Element {
        Element::from_term(Word::symmetric(vec![g], 0), q(1))
    }

    /// Degree-0 arity-1 map with x ↦ y, y ↦ 2x (over C[0]).
    fn op1() -> MultilinearOp {
        let s = space();
        MultilinearOp::new(
            &s,
            0,
            &s,
            0,
            1,
            0,
            [(vec![0], letter(1)), (vec![1], letter(0).scaled(&q(2)))],
        )
        .unwrap()
    }

    #[test]
    fn short_words_vanish() {
        let s = space();
        let op = MultilinearOp::new(&s, 0, &s, 0, 2, 0, [(vec![0, 1], letter(0))]).unwrap();
        assert!(hat_extend(&s, &op, &Word::symmetric(vec![0], 0)).is_zero());
        let full = hat_extend(&s, &op, &Word::symmetric(vec![0, 1], 0));
        assert_eq!(full, letter(0));
    }

    #[test]
    fn leibniz_unfolding() {
        let s = space();
        let got = hat_extend(&s, &op1(), &Word::symmetric(vec![0, 1], 0));
        // ℓ(x)·y + x·ℓ(y) = y·y + 2 x·x
        let mut want = Element::zero();
        want.add_term(Word::symmetric(vec![1, 1], 0), q(1));
        want.add_term(Word::symmetric(vec![0, 0], 0), q(2));
        assert_eq!(got, want);
    }

    #[test]
    fn extensions_are_coderivations() {
        let s = space();
        let op = op1();
        let h = HatExtension { space: &s, op: &op };
        assert!(check_coleibniz(&s, 0, &h, 4).is_none());
        let zero = MultilinearOp::zero(2, -1);
        let h = HatExtension { space: &s, op: &zero };
        assert!(check_coleibniz(&s, 0, &h, 4).is_none());
    }

    #[test]
    fn corruption_is_located() {
        let s = space();
        let op = op1();
        let mut m = materialize(&s, 0, &HatExtension { space: &s, op: &op }, 3);
        let bad = Word::symmetric(vec![0, 1], 0);
        m.table.insert(bad.clone(), letter(0).neg());
        let f = check_coleibniz(&s, 0, &m, 3).unwrap();
        assert_eq!(f.word, bad);
    }

    #[test]
    fn linear_part_round_trip() {
        let s = space();
        let d = reconstruct_from_linear_part(&s, 0, [op1()]);
        let parts = linear_part(&s, 0, &d, 3);
        assert_eq!(parts, vec![op1()]);
        let zero = reconstruct_from_linear_part(&s, 0, Vec::new());
        assert!(materialize(&s, 0, &zero, 3).table.is_empty());
    }
}
