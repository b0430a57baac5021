//! The coproduct on `S(V)` and finite tensor powers of it.

use alloc::collections::BTreeMap;
use alloc::vec::Vec;

use num_traits::{One, Zero};

use crate::combinat::{complement, subsets};
use crate::graded::{koszul_negative, Element, GradedSpace, Word};
use crate::rational::Q;

/// A finite linear combination of tensors `w_1 ⊗ ⋯ ⊗ w_m` of canonical words.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Tensor {
    terms: BTreeMap<Vec<Word>, Q>,
}

impl Tensor {
    pub fn zero() -> Self {
        Tensor::default()
    }

    /// One-factor tensors are just elements.
    pub fn from_element(e: &Element) -> Self {
        let mut t = Tensor::zero();
        for (w, c) in e.iter() {
            t.add_term(alloc::vec![w.clone()], c.clone());
        }
        t
    }

    pub fn add_term(&mut self, factors: Vec<Word>, c: Q) {
        if c.is_zero() {
            return;
        }
        let slot = self.terms.entry(factors).or_insert_with(Q::zero);
        *slot += c;
        if slot.is_zero() {
            self.terms.retain(|_, v| !v.is_zero());
        }
    }

    pub fn add_scaled(&mut self, other: &Tensor, c: &Q) {
        for (f, x) in other.iter() {
            self.add_term(f.clone(), x * c);
        }
    }

    pub fn sub(&self, other: &Tensor) -> Tensor {
        let mut out = self.clone();
        out.add_scaled(other, &-Q::one());
        out
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

    pub fn iter(&self) -> impl Iterator<Item = (&Vec<Word>, &Q)> {
        self.terms.iter()
    }

    pub fn coeff(&self, factors: &[Word]) -> Q {
        self.terms.get(factors).cloned().unwrap_or_else(Q::zero)
    }

    /// Replace factor `i` by `f(factor)`, a tensor of any length, with the
    /// Koszul sign `(-1)^{|f|·(|w_1|+⋯+|w_{i-1}|)}` for passing `f` across
    /// the earlier factors.
    pub fn map_factor(
        &self,
        space: &GradedSpace,
        i: usize,
        f_degree: i64,
        mut f: impl FnMut(&Word) -> Tensor,
    ) -> Tensor {
        let mut out = Tensor::zero();
        for (factors, c) in self.iter() {
            let before: i64 = factors[..i].iter().map(|w| space.word_degree(w)).sum();
            let c = if (f_degree * before).rem_euclid(2) == 1 {
                -c.clone()
            } else {
                c.clone()
            };
            for (img, x) in f(&factors[i]).iter() {
                let mut nf = Vec::with_capacity(factors.len() + img.len());
                nf.extend_from_slice(&factors[..i]);
                nf.extend(img.iter().cloned());
                nf.extend_from_slice(&factors[i + 1..]);
                out.add_term(nf, &c * x);
            }
        }
        out
    }

    /// Same as [`Tensor::map_factor`] for maps landing in a single factor.
    pub fn map_factor_elem(
        &self,
        space: &GradedSpace,
        i: usize,
        f_degree: i64,
        mut f: impl FnMut(&Word) -> Element,
    ) -> Tensor {
        self.map_factor(space, i, f_degree, |w| Tensor::from_element(&f(w)))
    }

    /// `τ(a ⊗ b) = (-1)^{|a||b|} b ⊗ a` on two-factor tensors.
    pub fn swap(&self, space: &GradedSpace) -> Tensor {
        let mut out = Tensor::zero();
        for (factors, c) in self.iter() {
            debug_assert_eq!(factors.len(), 2);
            let (a, b) = (&factors[0], &factors[1]);
            let odd = (space.word_degree(a) * space.word_degree(b)).rem_euclid(2) == 1;
            out.add_term(
                alloc::vec![b.clone(), a.clone()],
                if odd { -c.clone() } else { c.clone() },
            );
        }
        out
    }
}

/// `Δ(c_1⋯c_r) = Σ ±c_I ⊗ c_J` over ordered splittings into nonempty parts.
///
/// Summing over subsets is the same as the sum over all of `S_r` divided by
/// `r_1!(r-r_1)!`; each subset carries the Koszul sign of `I ++ J`.
pub fn coproduct(space: &GradedSpace, w: &Word) -> Tensor {
    let r = w.len();
    let mut out = Tensor::zero();
    for k in 1..r {
        for i in subsets(r, k) {
            let j = complement(r, &i);
            let mut perm = i.clone();
            perm.extend_from_slice(&j);
            let neg = koszul_negative(&perm, |p| {
                space.shifted_degree(w.letters[p], w.shift).rem_euclid(2) == 1
            });
            let left = sub_word(w, &i);
            let right = sub_word(w, &j);
            out.add_term(alloc::vec![left, right], if neg { -Q::one() } else { Q::one() });
        }
    }
    out
}

/// `Δ` extended linearly to elements.
pub(crate) fn coproduct_elem(space: &GradedSpace, e: &Element) -> Tensor {
    let mut out = Tensor::zero();
    for (w, c) in e.iter() {
        out.add_scaled(&coproduct(space, w), c);
    }
    out
}

/// Letters of `w` at the given (sorted) positions; canonical when `w` is.
pub(crate) fn sub_word(w: &Word, positions: &[usize]) -> Word {
    Word {
        kind: w.kind,
        letters: positions.iter().map(|&p| w.letters[p]).collect(),
        shift: w.shift,
    }
}
