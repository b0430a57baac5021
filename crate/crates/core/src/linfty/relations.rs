//! The L∞ relations: `ℓ̂∘ℓ̂ = 0`, and the same relations unfolded into the
//! `λ_k` language as an independent cross-check of the sign dictionary.

use alloc::vec::Vec;

use super::LInftyAlgebra;
use crate::combinat::permutations;
use crate::graded::{
    koszul_negative, normalize_unchecked, sigma_sign_negative, Element, Word, WordKind,
};
use crate::rational::inv_factorial;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Residual {
    pub word: Word,
    pub value: Element,
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct LInftyReport {
    pub words_checked: usize,
    /// Nonzero values of `ℓ̂∘ℓ̂`, in word order.
    pub residuals: Vec<Residual>,
    /// Words on which `π_1ℓ̂ℓ̂` differs from the unfolded relation.
    pub cross_check_mismatches: Vec<Residual>,
}

impl LInftyReport {
    pub fn passed(&self) -> bool {
        self.residuals.is_empty() && self.cross_check_mismatches.is_empty()
    }

    pub fn first_failure(&self) -> Option<&Residual> {
        self.residuals.first()
    }
}

/// Evaluate `ℓ̂∘ℓ̂` on every canonical word of length `≤ max_len`, and
/// compare its linear part with [`unfolded_relation`].
pub fn check_linfty(alg: &LInftyAlgebra, max_len: usize) -> LInftyReport {
    let mut report = LInftyReport::default();
    let space = alg.space();
    for w in alg.bar_words(max_len) {
        report.words_checked += 1;
        let value = alg.hat_elem(&alg.hat(&w));
        let linear = value.component(1);
        // ℓ̂ℓ̂(c̄_1⋯c̄_k) = s_k σ_1 Rel_k(c_1∧⋯∧c_k)
        let s = sigma_sign_negative(space, &w.letters, alg.lambda_shift());
        let rel = to_bar(alg, &unfolded_relation(alg, &w.letters));
        let expected = if s { rel.neg() } else { rel };
        if linear != expected {
            report.cross_check_mismatches.push(Residual {
                word: w.clone(),
                value: linear.sub(&expected),
            });
        }
        if !value.is_zero() {
            report.residuals.push(Residual { word: w, value });
        }
    }
    report
}

/// `λ_k(c_1∧⋯∧c_k)` as a combination of single letters over `C[-d]`,
/// read off the `ℓ_k` table through `ℓ_k = σ_1∘λ_k∘σ_k⁻¹`.
pub fn lambda_eval(alg: &LInftyAlgebra, letters: &[usize]) -> Element {
    let space = alg.space();
    let ext = alg.lambda_shift();
    let Some(op) = alg.op(letters.len()) else {
        return Element::zero();
    };
    let Some((perm_neg, canon)) =
        normalize_unchecked(space, WordKind::Exterior, letters.to_vec(), ext)
    else {
        return Element::zero();
    };
    // σ_k(canon) = s · c̄_1⋯c̄_k, already sorted, hence canonical
    let s = sigma_sign_negative(space, &canon.letters, ext);
    let key = Word::symmetric(canon.letters, alg.bar_shift());
    let Some(v) = op.get(&key) else {
        return Element::zero();
    };
    let mut out = Element::zero();
    for (w, c) in v.iter() {
        let c = if perm_neg ^ s { -c.clone() } else { c.clone() };
        out.add_term(Word::exterior(w.letters.clone(), ext), c);
    }
    out
}

/// The `k`-th quadratic relation
/// `Rel_k(c_1,…,c_k) = σ_1⁻¹ π_1 ℓ̂ℓ̂ σ_k(c_1∧⋯∧c_k)` written out through the
/// `λ_j` as a sum over all of `S_k` with factorial weights, as in the
/// classical unfolded form. The result lives in `C[-d]`.
pub fn unfolded_relation(alg: &LInftyAlgebra, letters: &[usize]) -> Element {
    let space = alg.space();
    let ext = alg.lambda_shift();
    let bar = alg.bar_shift();
    let k = letters.len();
    let mut sum = Element::zero();
    for rho in permutations(k) {
        let eps = koszul_negative(&rho, |p| {
            space.shifted_degree(letters[p], bar).rem_euclid(2) == 1
        });
        let ordered: Vec<usize> = rho.iter().map(|&p| letters[p]).collect();
        for k1 in 1..=k {
            let k2 = k - k1 + 1;
            let inner_letters = &ordered[..k1];
            let inner = lambda_eval(alg, inner_letters);
            if inner.is_zero() {
                continue;
            }
            let weight = inv_factorial(k1) * inv_factorial(k - k1);
            let s1 = sigma_sign_negative(space, inner_letters, ext);
            for (y, cy) in inner.iter() {
                let mut outer_letters = Vec::with_capacity(k2);
                outer_letters.push(y.letters[0]);
                outer_letters.extend_from_slice(&ordered[k1..]);
                let s2 = sigma_sign_negative(space, &outer_letters, ext);
                let outer = lambda_eval(alg, &outer_letters);
                let mut c = cy * &weight;
                if eps ^ s1 ^ s2 {
                    c = -c;
                }
                sum.add_scaled(&outer, &c);
            }
        }
    }
    let s = sigma_sign_negative(space, letters, ext);
    if s {
        sum.neg()
    } else {
        sum
    }
}

/// `σ_1` on single-letter elements of `C[-d]`.
fn to_bar(alg: &LInftyAlgebra, e: &Element) -> Element {
    e.iter()
        .map(|(w, c)| (Word::symmetric(w.letters.clone(), alg.bar_shift()), c.clone()))
        .collect()
}
