//! L∞ morphisms: components `f_k: S^k(V) → V'` of degree 0 and the induced
//! coalgebra map `e^f`.

use alloc::collections::BTreeMap;
use alloc::vec::Vec;

use num_traits::One;
use thiserror::Error;

use crate::combinat::set_partitions;
use crate::graded::{koszul_negative, Element, GradedSpace, Word, WordKind};
use crate::linfty::{coproduct, LInftyAlgebra, MultilinearOp, Residual, Tensor};
use crate::rational::Q;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum MorphismError {
    #[error("source has degree {source_degree}, target has degree {target_degree}")]
    DegreeMismatch { source_degree: i64, target_degree: i64 },
    #[error("component f_{arity} has degree {found}, expected 0")]
    ComponentDegree { arity: usize, found: i64 },
    #[error("components of a composite must chain: target of the first is not the source of the second")]
    NotComposable,
}

/// `e^f` on one word: a sum over unordered set partitions of its letters.
///
/// Blocks are taken in order of their smallest position, which fixes one
/// representative per unordered partition; the `1/(r!k_1!⋯k_r!)` weights
/// of the permutation sum exactly cancel the repetitions. The empty word
/// maps to the empty word.
pub fn exp_morphism(
    source: &GradedSpace,
    target: &GradedSpace,
    target_shift: i64,
    components: &BTreeMap<usize, MultilinearOp>,
    w: &Word,
) -> Element {
    let mut out = Element::zero();
    for blocks in set_partitions(w.len()) {
        let perm: Vec<usize> = blocks.iter().flatten().copied().collect();
        let neg = koszul_negative(&perm, |p| {
            source.shifted_degree(w.letters[p], w.shift).rem_euclid(2) == 1
        });
        let mut prod = Element::from_term(
            Word::symmetric(Vec::new(), target_shift),
            if neg { -Q::one() } else { Q::one() },
        );
        for b in &blocks {
            let Some(f) = components.get(&b.len()) else {
                prod = Element::zero();
                break;
            };
            let key = Word {
                kind: WordKind::Symmetric,
                letters: b.iter().map(|&p| w.letters[p]).collect(),
                shift: w.shift,
            };
            let Some(v) = f.get(&key) else {
                prod = Element::zero();
                break;
            };
            prod = target.mul(&prod, v);
            if prod.is_zero() {
                break;
            }
        }
        out.add_assign(&prod);
    }
    out
}

/// An L∞ morphism between algebras of the same degree.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LInftyMorphism {
    source: LInftyAlgebra,
    target: LInftyAlgebra,
    components: BTreeMap<usize, MultilinearOp>,
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct MorphismReport {
    pub words_checked: usize,
    /// Nonzero values of `e^f∘ℓ̂ - ℓ̂'∘e^f`.
    pub residuals: Vec<Residual>,
}

impl MorphismReport {
    pub fn passed(&self) -> bool {
        self.residuals.is_empty()
    }
}

impl LInftyMorphism {
    pub fn new(
        source: LInftyAlgebra,
        target: LInftyAlgebra,
        components: impl IntoIterator<Item = MultilinearOp>,
    ) -> Result<Self, MorphismError> {
        if source.degree() != target.degree() {
            return Err(MorphismError::DegreeMismatch {
                source_degree: source.degree(),
                target_degree: target.degree(),
            });
        }
        let mut map = BTreeMap::new();
        for f in components {
            if f.degree() != 0 {
                return Err(MorphismError::ComponentDegree {
                    arity: f.arity(),
                    found: f.degree(),
                });
            }
            if !f.is_zero() {
                map.insert(f.arity(), f);
            }
        }
        Ok(LInftyMorphism {
            source,
            target,
            components: map,
        })
    }

    /// `f_1 = id`, no higher components.
    pub fn identity(alg: &LInftyAlgebra) -> Self {
        let space = alg.space();
        let table = (0..space.len())
            .map(|g| {
                let w = alg.bar_letter(g);
                (w.clone(), Element::from_term(w, Q::one()))
            })
            .collect();
        LInftyMorphism {
            source: alg.clone(),
            target: alg.clone(),
            components: [(1, MultilinearOp::from_table(1, 0, table))]
                .into_iter()
                .filter(|(_, f)| !f.is_zero())
                .collect(),
        }
    }

    pub fn source(&self) -> &LInftyAlgebra {
        &self.source
    }

    pub fn target(&self) -> &LInftyAlgebra {
        &self.target
    }

    pub fn component(&self, k: usize) -> Option<&MultilinearOp> {
        self.components.get(&k)
    }

    pub fn component_mut(&mut self, k: usize) -> Option<&mut MultilinearOp> {
        self.components.get_mut(&k)
    }

    pub fn components(&self) -> impl Iterator<Item = &MultilinearOp> {
        self.components.values()
    }

    pub fn max_arity(&self) -> usize {
        self.components.keys().next_back().copied().unwrap_or(0)
    }

    /// `e^f` on a canonical source word (the empty word allowed).
    pub fn exp_word(&self, w: &Word) -> Element {
        exp_morphism(
            self.source.space(),
            self.target.space(),
            self.target.bar_shift(),
            &self.components,
            w,
        )
    }

    pub fn exp(&self, e: &Element) -> Element {
        let mut out = Element::zero();
        for (w, c) in e.iter() {
            out.add_scaled(&self.exp_word(w), c);
        }
        out
    }

    /// `π_1∘e^f`, i.e. `Σ_k f_k` applied to each length-`k` component.
    pub fn linear(&self, e: &Element) -> Element {
        let mut out = Element::zero();
        for (w, c) in e.iter() {
            if let Some(v) = self.components.get(&w.len()).and_then(|f| f.get(w)) {
                out.add_scaled(v, c);
            }
        }
        out
    }

    /// `e^g∘e^f` as a morphism `h` with `e^h = e^g∘e^f`, components up to
    /// `max_arity` read off as `h_k = π_1∘e^g∘e^f` on `S^k`.
    pub fn compose(&self, g: &LInftyMorphism, max_arity: usize) -> Result<Self, MorphismError> {
        if self.target != g.source {
            return Err(MorphismError::NotComposable);
        }
        let mut comps = Vec::new();
        for k in 1..=max_arity {
            let table: BTreeMap<Word, Element> = self
                .source
                .space()
                .canonical_words(WordKind::Symmetric, self.source.bar_shift(), k)
                .into_iter()
                .map(|w| {
                    let v = g.linear(&self.exp_word(&w));
                    (w, v)
                })
                .collect();
            comps.push(MultilinearOp::from_table(k, 0, table));
        }
        LInftyMorphism::new(self.source.clone(), g.target.clone(), comps)
    }
}

/// Evaluate `e^f ℓ̂ - ℓ̂' e^f` on every canonical source word of length
/// `≤ max_len`.
pub fn check_morphism(phi: &LInftyMorphism, max_len: usize) -> MorphismReport {
    let mut report = MorphismReport::default();
    for w in phi.source.bar_words(max_len) {
        report.words_checked += 1;
        let lhs = phi.exp(&phi.source.hat(&w));
        let rhs = phi.target.hat_elem(&phi.exp_word(&w));
        let value = lhs.sub(&rhs);
        if !value.is_zero() {
            report.residuals.push(Residual { word: w, value });
        }
    }
    report
}

/// `Δ'∘e^f - (e^f⊗e^f)∘Δ` on one word; zero for every component family.
pub fn coalgebra_defect(phi: &LInftyMorphism, w: &Word) -> Tensor {
    let tspace = phi.target.space();
    let image = phi.exp_word(w);
    let mut lhs = Tensor::zero();
    for (u, c) in image.iter() {
        lhs.add_scaled(&coproduct(tspace, u), c);
    }
    let delta = coproduct(phi.source.space(), w);
    let rhs = delta
        .map_factor_elem(tspace, 0, 0, |u| phi.exp_word(u))
        .map_factor_elem(tspace, 1, 0, |u| phi.exp_word(u));
    lhs.sub(&rhs)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::q;
    use alloc::vec;

    fn space() -> GradedSpace {
        GradedSpace::new([("x", 0), ("y", 0), ("z", 1)]).unwrap()
    }

    fn abelian() -> LInftyAlgebra {
        LInftyAlgebra::new(space(), -1, Vec::new(), None).unwrap()
    }

    #[test]
    fn identity_is_identity() {
        let alg = abelian();
        let id = LInftyMorphism::identity(&alg);
        for w in alg.bar_words(4) {
            assert_eq!(id.exp_word(&w), Element::from_term(w.clone(), q(1)));
        }
        assert!(check_morphism(&id, 4).passed());
    }

    #[test]
    fn two_letter_expansion() {
        // d = -1 puts V = C[0], so x, y stay even
        let alg = abelian();
        let s = alg.space().clone();
        let l = |g: usize| Element::from_term(alg.bar_letter(g), q(1));
        let f1 = MultilinearOp::new(&s, 0, &s, 0, 1, 0, [(vec![0], l(1)), (vec![1], l(0))]).unwrap();
        let f2 = MultilinearOp::new(&s, 0, &s, 0, 2, 0, [(vec![0, 1], l(0).scaled(&q(3)))]).unwrap();
        let phi = LInftyMorphism::new(alg.clone(), alg.clone(), [f1, f2]).unwrap();
        let got = phi.exp_word(&Word::symmetric(vec![0, 1], 0));
        let mut want = l(0).scaled(&q(3));
        want.add_term(Word::symmetric(vec![0, 1], 0), q(1));
        assert_eq!(got, want);
        for w in alg.bar_words(4) {
            assert!(coalgebra_defect(&phi, &w).is_zero());
        }
    }
}
