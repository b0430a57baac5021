//! Filtered L∞ algebras: truncated elements of the completion, Maurer-Cartan
//! elements, twisted differentials, pushforward along morphisms, and the two
//! moduli-space equations with their explicit signs.
//!
//! Elements of `C` are stored in bar form `c̄ ∈ V` (for single letters `σ_1`
//! has no sign, so the coefficients agree). The filtration level of a word is
//! the sum of the weights of its letters.

use alloc::collections::BTreeMap;
use alloc::string::String;
use alloc::vec::Vec;

use num_traits::One;
use thiserror::Error;

use crate::graded::{Element, Word, WordKind};
use crate::linfty::{lambda_eval, LInftyAlgebra};
use crate::morphism::LInftyMorphism;
use crate::rational::{inv_factorial, Q};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FilteredError {
    #[error("term `{word}` is not a single generator of the bar space")]
    NotLinear { word: String },
    #[error("term `{word}` declared at level {declared} but has weight {actual}")]
    LevelMismatch {
        word: String,
        declared: i64,
        actual: i64,
    },
    #[error("term `{word}` has level {level}, below F_{required}")]
    BelowFiltration {
        word: String,
        level: i64,
        required: i64,
    },
    #[error("term `{word}` has degree {found}, expected {expected}")]
    WrongDegree {
        word: String,
        expected: i64,
        found: i64,
    },
    #[error("the algebra does not respect its filtration")]
    NotFiltered(Vec<FiltrationViolation>),
    #[error("the morphism does not respect the filtrations")]
    MorphismNotFiltered(Vec<FiltrationViolation>),
    #[error("element is not Maurer-Cartan up to level {trunc}")]
    NotMaurerCartan {
        trunc: i64,
        residual: FilteredElement,
    },
    #[error("source identity fails up to level {trunc}")]
    SourceIdentity { trunc: i64, defect: Element },
    #[error("dimension must be at least 1, got {0}")]
    Dimension(i64),
}

/// Truncation `x mod F_K` of an element of the completion, bucketed by level.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FilteredElement {
    levels: BTreeMap<i64, Element>,
    trunc: i64,
}

impl FilteredElement {
    pub fn zero(trunc: i64) -> Self {
        FilteredElement {
            levels: BTreeMap::new(),
            trunc,
        }
    }

    /// Bucket a bar-form element by weight, dropping levels `≥ trunc`.
    pub fn from_element(
        alg: &LInftyAlgebra,
        e: &Element,
        trunc: i64,
    ) -> Result<Self, FilteredError> {
        let mut out = FilteredElement::zero(trunc);
        for (w, c) in e.iter() {
            check_letter(alg, w)?;
            out.push(alg.word_weight(w), w.clone(), c.clone());
        }
        Ok(out)
    }

    /// Build from explicitly levelled terms; each level must equal the weight
    /// of its word.
    pub fn from_terms(
        alg: &LInftyAlgebra,
        terms: impl IntoIterator<Item = (i64, Word, Q)>,
        trunc: i64,
    ) -> Result<Self, FilteredError> {
        let mut out = FilteredElement::zero(trunc);
        for (level, w, c) in terms {
            check_letter(alg, &w)?;
            let actual = alg.word_weight(&w);
            if actual != level {
                return Err(FilteredError::LevelMismatch {
                    word: alg.space().format_word(&w),
                    declared: level,
                    actual,
                });
            }
            out.push(level, w, c);
        }
        Ok(out)
    }

    fn push(&mut self, level: i64, w: Word, c: Q) {
        if level >= self.trunc {
            return;
        }
        let slot = self.levels.entry(level).or_default();
        slot.add_term(w, c);
        if slot.is_zero() {
            self.levels.remove(&level);
        }
    }

    pub fn trunc(&self) -> i64 {
        self.trunc
    }

    pub fn is_zero(&self) -> bool {
        self.levels.is_empty()
    }

    pub fn levels(&self) -> &BTreeMap<i64, Element> {
        &self.levels
    }

    pub fn level(&self, k: i64) -> Element {
        self.levels.get(&k).cloned().unwrap_or_default()
    }

    pub fn min_level(&self) -> Option<i64> {
        self.levels.keys().next().copied()
    }

    /// All levels summed back into one element.
    pub fn element(&self) -> Element {
        let mut e = Element::zero();
        for v in self.levels.values() {
            e.add_assign(v);
        }
        e
    }

    /// Sum, truncated at the smaller of the two orders.
    pub fn add(&self, other: &FilteredElement) -> FilteredElement {
        let trunc = self.trunc.min(other.trunc);
        let mut out = self.truncated(trunc);
        for (&k, v) in &other.levels {
            for (w, c) in v.iter() {
                out.push(k, w.clone(), c.clone());
            }
        }
        out
    }

    pub fn scaled(&self, c: &Q) -> FilteredElement {
        let mut out = FilteredElement::zero(self.trunc);
        for (&k, v) in &self.levels {
            for (w, x) in v.iter() {
                out.push(k, w.clone(), x * c);
            }
        }
        out
    }

    pub fn sub(&self, other: &FilteredElement) -> FilteredElement {
        self.add(&other.scaled(&-Q::one()))
    }

    pub fn truncated(&self, trunc: i64) -> FilteredElement {
        FilteredElement {
            levels: self
                .levels
                .iter()
                .filter(|(k, _)| **k < trunc)
                .map(|(k, v)| (*k, v.clone()))
                .collect(),
            trunc: trunc.min(self.trunc),
        }
    }
}

fn check_letter(alg: &LInftyAlgebra, w: &Word) -> Result<(), FilteredError> {
    if w.len() != 1 || w.kind != WordKind::Symmetric || w.shift != alg.bar_shift() {
        return Err(FilteredError::NotLinear {
            word: alg.space().format_word(w),
        });
    }
    Ok(())
}

/// Energy class data: Maslov index, energy in units of `ℏ`, and a label.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HomotopyClassLabel {
    pub class: ClassId,
    pub maslov: i64,
    pub energy: Q,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ClassId {
    /// Integer vector of degrees for a product torus.
    Torus(Vec<i64>),
    Opaque(String),
}

impl HomotopyClassLabel {
    pub fn torus(degrees: Vec<i64>, energy: Q) -> Self {
        let maslov = 2 * degrees.iter().sum::<i64>();
        HomotopyClassLabel {
            class: ClassId::Torus(degrees),
            maslov,
            energy,
        }
    }

    /// Class sum; Maslov index and energy add. Opaque labels combine to an
    /// opaque label.
    pub fn add(&self, other: &HomotopyClassLabel) -> HomotopyClassLabel {
        let class = match (&self.class, &other.class) {
            (ClassId::Torus(a), ClassId::Torus(b)) if a.len() == b.len() => {
                ClassId::Torus(a.iter().zip(b).map(|(x, y)| x + y).collect())
            }
            (a, b) => ClassId::Opaque(alloc::format!("{}+{}", describe(a), describe(b))),
        };
        HomotopyClassLabel {
            class,
            maslov: self.maslov + other.maslov,
            energy: &self.energy + &other.energy,
        }
    }

    /// Degree of a `k`-chain of the loop-space component of this class.
    pub fn shifted_degree(&self, k: i64) -> i64 {
        k - self.maslov
    }

    /// `⌊E/ℏ⌋`, with `E` already in units of `ℏ`.
    pub fn level(&self) -> i64 {
        let f = self.energy.floor();
        i64::try_from(f.to_integer()).unwrap_or(i64::MAX)
    }
}

fn describe(c: &ClassId) -> String {
    match c {
        ClassId::Torus(v) => alloc::format!("{:?}", v),
        ClassId::Opaque(s) => s.clone(),
    }
}

/// An entry of some `ℓ_k` whose output drops below the sum of input weights.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FiltrationViolation {
    pub arity: usize,
    pub input: Word,
    pub output: Word,
}

/// Check `ℓ_k(F_{d_1},…,F_{d_k}) ⊂ F_{d_1+⋯+d_k}` entry by entry.
pub fn check_filtered(alg: &LInftyAlgebra) -> Vec<FiltrationViolation> {
    let mut out = Vec::new();
    for op in alg.ops() {
        for (key, value) in op.table() {
            let need = alg.word_weight(key);
            for w in value.words() {
                if alg.word_weight(w) < need {
                    out.push(FiltrationViolation {
                        arity: op.arity(),
                        input: key.clone(),
                        output: w.clone(),
                    });
                }
            }
        }
    }
    out
}

/// Same check for the components of a morphism.
pub fn check_filtered_morphism(phi: &LInftyMorphism) -> Vec<FiltrationViolation> {
    let mut out = Vec::new();
    for f in phi.components() {
        for (key, value) in f.table() {
            let need = phi.source().word_weight(key);
            for w in value.words() {
                if phi.target().word_weight(w) < need {
                    out.push(FiltrationViolation {
                        arity: f.arity(),
                        input: key.clone(),
                        output: w.clone(),
                    });
                }
            }
        }
    }
    out
}

fn require_filtered(alg: &LInftyAlgebra) -> Result<(), FilteredError> {
    let v = check_filtered(alg);
    if v.is_empty() {
        Ok(())
    } else {
        Err(FilteredError::NotFiltered(v))
    }
}

/// Drop every word of weight `≥ trunc`.
pub fn truncate_weight(alg: &LInftyAlgebra, e: &Element, trunc: i64) -> Element {
    e.filter(|w| alg.word_weight(w) < trunc)
}

fn unit(shift: i64) -> Element {
    Element::from_term(Word::symmetric(Vec::new(), shift), Q::one())
}

/// Powers `ā^0, ā^1, …` in `S(V)`, truncated; stops once a power vanishes.
fn powers(alg: &LInftyAlgebra, a: &Element, trunc: i64, max: usize) -> Vec<Element> {
    let mut out = alloc::vec![unit(alg.bar_shift())];
    for k in 1..=max {
        let next = truncate_weight(alg, &alg.space().mul(&out[k - 1], a), trunc);
        if next.is_zero() {
            break;
        }
        out.push(next);
    }
    out
}

/// `e^{ā} = Σ_{k≥0} ā^k/k!` mod `F_trunc`, including the unit.
pub fn exp_bar(alg: &LInftyAlgebra, a: &FilteredElement, trunc: i64) -> Element {
    let mut out = Element::zero();
    for (k, p) in powers(alg, &a.element(), trunc, trunc.max(0) as usize)
        .iter()
        .enumerate()
    {
        out.add_scaled(p, &inv_factorial(k));
    }
    out
}

fn require_f1_degree0(alg: &LInftyAlgebra, a: &FilteredElement) -> Result<(), FilteredError> {
    for (&level, e) in a.levels() {
        for w in e.words() {
            if level < 1 {
                return Err(FilteredError::BelowFiltration {
                    word: alg.space().format_word(w),
                    level,
                    required: 1,
                });
            }
            let deg = alg.space().word_degree(w);
            if deg != 0 {
                return Err(FilteredError::WrongDegree {
                    word: alg.space().format_word(w),
                    expected: -alg.degree() - 1,
                    found: deg - alg.degree() - 1,
                });
            }
        }
    }
    Ok(())
}

/// `Σ_{k≥1} 1/k! ℓ_k(ā,…,ā)` mod `F_trunc`.
///
/// `a` must lie in `F_1` with `ā` of degree 0 in `V` (degree `-d-1` in `C`),
/// which makes the sum finite below every level.
pub fn mc_residual(
    alg: &LInftyAlgebra,
    a: &FilteredElement,
    trunc: i64,
) -> Result<FilteredElement, FilteredError> {
    require_filtered(alg)?;
    require_f1_degree0(alg, a)?;
    let pw = powers(alg, &a.element(), trunc, alg.max_arity());
    let mut sum = Element::zero();
    for (k, p) in pw.iter().enumerate().skip(1) {
        if let Some(op) = alg.op(k) {
            sum.add_scaled(&op.eval(p), &inv_factorial(k));
        }
    }
    FilteredElement::from_element(alg, &sum, trunc)
}

/// `ℓ̂^a(b̄) = Σ_{k≥1} 1/(k-1)! ℓ_k(b̄,ā,…,ā)` without checking that `a` is
/// Maurer-Cartan.
pub fn twisted_diff_unchecked(
    alg: &LInftyAlgebra,
    a: &FilteredElement,
    b: &FilteredElement,
    trunc: i64,
) -> FilteredElement {
    let pw = powers(alg, &a.element(), trunc, alg.max_arity());
    let b = b.element();
    let mut sum = Element::zero();
    for (j, p) in pw.iter().enumerate() {
        let Some(op) = alg.op(j + 1) else { continue };
        let input = truncate_weight(alg, &alg.space().mul(&b, p), trunc);
        sum.add_scaled(&op.eval(&input), &inv_factorial(j));
    }
    FilteredElement::from_element(alg, &sum, trunc).expect("structure maps land in V")
}

/// The twisted differential; rejects `a` unless it is Maurer-Cartan mod
/// `F_trunc`.
pub fn twisted_diff(
    alg: &LInftyAlgebra,
    a: &FilteredElement,
    b: &FilteredElement,
    trunc: i64,
) -> Result<FilteredElement, FilteredError> {
    let r = mc_residual(alg, a, trunc)?;
    if !r.is_zero() {
        return Err(FilteredError::NotMaurerCartan { trunc, residual: r });
    }
    Ok(twisted_diff_unchecked(alg, a, b, trunc))
}

/// `ℓ̂(b̄e^{ā}) - ℓ̂^a(b̄)e^{ā}` mod `F_trunc`, restricted to words of length
/// `≤ max_len`. Zero when `a` is Maurer-Cartan.
pub fn lemma_defect(
    alg: &LInftyAlgebra,
    a: &FilteredElement,
    b: &FilteredElement,
    trunc: i64,
    max_len: usize,
) -> Element {
    let ea = exp_bar(alg, a, trunc);
    let s = alg.space();
    let lhs = truncate_weight(alg, &alg.hat_elem(&s.mul(&b.element(), &ea)), trunc);
    let tb = twisted_diff_unchecked(alg, a, b, trunc).element();
    let rhs = truncate_weight(alg, &s.mul(&tb, &ea), trunc);
    lhs.sub(&rhs).filter(|w| w.len() <= max_len)
}

/// `ℓ̂(b̄e^{ā}) - c̄e^{ā}` mod `F_trunc`.
pub fn pair_defect(
    alg: &LInftyAlgebra,
    a: &FilteredElement,
    b: &FilteredElement,
    c: &FilteredElement,
    trunc: i64,
) -> Element {
    let ea = exp_bar(alg, a, trunc);
    let s = alg.space();
    let lhs = truncate_weight(alg, &alg.hat_elem(&s.mul(&b.element(), &ea)), trunc);
    let rhs = truncate_weight(alg, &s.mul(&c.element(), &ea), trunc);
    lhs.sub(&rhs)
}

/// `Σ_{k≥1} 1/(k-1)! f_k(x̄,ȳ,…,ȳ)` mod `F_trunc`.
fn push_linear(
    phi: &LInftyMorphism,
    x: &Element,
    y_powers: &[Element],
    trunc: i64,
) -> FilteredElement {
    let src = phi.source();
    let mut sum = Element::zero();
    for (j, p) in y_powers.iter().enumerate() {
        let input = truncate_weight(src, &src.space().mul(x, p), trunc);
        sum.add_scaled(&phi.linear(&input), &inv_factorial(j));
    }
    FilteredElement::from_element(phi.target(), &sum, trunc).expect("components land in V'")
}

fn require_filtered_morphism(phi: &LInftyMorphism) -> Result<(), FilteredError> {
    let v = check_filtered_morphism(phi);
    if v.is_empty() {
        Ok(())
    } else {
        Err(FilteredError::MorphismNotFiltered(v))
    }
}

/// `ā' = Σ_{k≥1} 1/k! f_k(ā,…,ā)`, re-verified to be Maurer-Cartan in the
/// target.
pub fn pushforward_mc(
    phi: &LInftyMorphism,
    a: &FilteredElement,
    trunc: i64,
) -> Result<FilteredElement, FilteredError> {
    require_filtered_morphism(phi)?;
    let r = mc_residual(phi.source(), a, trunc)?;
    if !r.is_zero() {
        return Err(FilteredError::NotMaurerCartan { trunc, residual: r });
    }
    let a2 = pushforward_unchecked(phi, a, trunc);
    let r2 = mc_residual(phi.target(), &a2, trunc)?;
    if !r2.is_zero() {
        return Err(FilteredError::NotMaurerCartan { trunc, residual: r2 });
    }
    Ok(a2)
}

/// `Σ 1/k! f_k(ā,…,ā)` with no checks.
pub fn pushforward_unchecked(
    phi: &LInftyMorphism,
    a: &FilteredElement,
    trunc: i64,
) -> FilteredElement {
    let src = phi.source();
    let pw = powers(src, &a.element(), trunc, phi.max_arity());
    let mut sum = Element::zero();
    for (k, p) in pw.iter().enumerate().skip(1) {
        sum.add_scaled(&phi.linear(p), &inv_factorial(k));
    }
    FilteredElement::from_element(phi.target(), &sum, trunc).expect("components land in V'")
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PushedPair {
    pub a: FilteredElement,
    pub b: FilteredElement,
    pub c: FilteredElement,
    /// `ℓ̂'(b̄'e^{ā'}) - c̄'e^{ā'}`; zero when the transport worked.
    pub target_defect: Element,
}

/// Transport a triple with `ℓ̂(b̄e^{ā}) = c̄e^{ā}` along `phi`.
pub fn pushforward_pair(
    phi: &LInftyMorphism,
    a: &FilteredElement,
    b: &FilteredElement,
    c: &FilteredElement,
    trunc: i64,
) -> Result<PushedPair, FilteredError> {
    let src = phi.source();
    let defect = pair_defect(src, a, b, c, trunc);
    if !defect.is_zero() {
        return Err(FilteredError::SourceIdentity { trunc, defect });
    }
    let a2 = pushforward_mc(phi, a, trunc)?;
    let pw = powers(src, &a.element(), trunc, phi.max_arity());
    let b2 = push_linear(phi, &b.element(), &pw, trunc);
    let c2 = push_linear(phi, &c.element(), &pw, trunc);
    let target_defect = pair_defect(phi.target(), &a2, &b2, &c2, trunc);
    Ok(PushedPair {
        a: a2,
        b: b2,
        c: c2,
        target_defect,
    })
}

/// `e^f(x̄e^{ȳ}) - (Σ 1/(k-1)! f_k(x̄,ȳ,…))·e^{Σ 1/r! f_r(ȳ,…)}` mod
/// `F_trunc`, on words of length `≤ max_len`.
pub fn exp_identity_defect(
    phi: &LInftyMorphism,
    x: &FilteredElement,
    y: &FilteredElement,
    trunc: i64,
    max_len: usize,
) -> Element {
    let src = phi.source();
    let tgt = phi.target();
    let ey = exp_bar(src, y, trunc);
    let lhs = truncate_weight(tgt, &phi.exp(&src.space().mul(&x.element(), &ey)), trunc);
    let pw = powers(src, &y.element(), trunc, phi.max_arity());
    let x2 = push_linear(phi, &x.element(), &pw, trunc);
    let y2 = pushforward_unchecked(phi, y, trunc);
    let rhs = truncate_weight(tgt, &tgt.space().mul(&x2.element(), &exp_bar(tgt, &y2, trunc)), trunc);
    lhs.sub(&rhs).filter(|w| w.len() <= max_len)
}

/// `(-1)^{(k-1)k/2}`
pub fn fukaya1_sign(k: usize) -> i8 {
    if ((k * k.saturating_sub(1)) / 2).is_multiple_of(2) {
        1
    } else {
        -1
    }
}

/// `(-1)^{(k-2)(k-1)/2}` for `k ≥ 1`.
pub fn fukaya2_sign(k: usize) -> i8 {
    let k = k as i64;
    if ((k - 2) * (k - 1) / 2).rem_euclid(2) == 0 {
        1
    } else {
        -1
    }
}

/// `α^{∧k}` in `Λ(C[-d])` mod `F_trunc`.
fn wedge_power(alg: &LInftyAlgebra, x: &Element, k: usize, trunc: i64) -> Element {
    let ext = alg.lambda_shift();
    let s = alg.space();
    let mut p = Element::from_term(Word::exterior(Vec::new(), ext), Q::one());
    for _ in 0..k {
        p = s.mul(&p, x).filter(|w| alg.word_weight(w) < trunc);
    }
    p
}

fn to_exterior(alg: &LInftyAlgebra, e: &Element) -> Element {
    e.iter()
        .map(|(w, c)| (Word::exterior(w.letters.clone(), alg.lambda_shift()), c.clone()))
        .collect()
}

fn from_exterior(alg: &LInftyAlgebra, e: &Element) -> Element {
    e.iter()
        .map(|(w, c)| (Word::symmetric(w.letters.clone(), alg.bar_shift()), c.clone()))
        .collect()
}

fn lambda_on(alg: &LInftyAlgebra, e: &Element) -> Element {
    let mut out = Element::zero();
    for (w, c) in e.iter() {
        out.add_scaled(&lambda_eval(alg, &w.letters), c);
    }
    out
}

fn require_degree(
    alg: &LInftyAlgebra,
    x: &FilteredElement,
    expected: i64,
) -> Result<(), FilteredError> {
    for w in x.element().words() {
        let found = alg.space().degree(w.letters[0]);
        if found != expected {
            return Err(FilteredError::WrongDegree {
                word: alg.space().format_word(w),
                expected,
                found,
            });
        }
    }
    Ok(())
}

/// The dimension `n` belonging to an algebra of degree `d = 1 - n`.
pub fn dimension_of(alg: &LInftyAlgebra) -> i64 {
    1 - alg.degree()
}

/// `Σ_k (-1)^{(k-1)k/2}/k! λ_k(α,…,α)` mod `F_trunc`, evaluated on the `λ`
/// side of the dictionary. `α` must lie in `F_1` and have degree `n-2`.
pub fn verify_fukaya1(
    alg: &LInftyAlgebra,
    alpha: &FilteredElement,
    trunc: i64,
) -> Result<FilteredElement, FilteredError> {
    require_filtered(alg)?;
    let n = dimension_of(alg);
    require_degree(alg, alpha, n - 2)?;
    require_f1_degree0(alg, alpha)?;
    let x = to_exterior(alg, &alpha.element());
    let mut sum = Element::zero();
    for k in 1..=alg.max_arity() {
        let p = wedge_power(alg, &x, k, trunc);
        if p.is_zero() {
            break;
        }
        let c = inv_factorial(k) * Q::from_integer(fukaya1_sign(k).into());
        sum.add_scaled(&lambda_on(alg, &p), &c);
    }
    FilteredElement::from_element(alg, &from_exterior(alg, &sum), trunc)
}

/// `Σ_k (-1)^{(k-2)(k-1)/2}/(k-1)! λ_k(β,α,…,α) - L` mod `F_trunc`.
pub fn verify_fukaya2(
    alg: &LInftyAlgebra,
    alpha: &FilteredElement,
    beta: &FilteredElement,
    l_chain: &FilteredElement,
    trunc: i64,
) -> Result<FilteredElement, FilteredError> {
    require_filtered(alg)?;
    let n = dimension_of(alg);
    require_degree(alg, alpha, n - 2)?;
    require_f1_degree0(alg, alpha)?;
    require_degree(alg, beta, n + 1)?;
    require_degree(alg, l_chain, n)?;
    let x = to_exterior(alg, &alpha.element());
    let b = to_exterior(alg, &beta.element());
    let mut sum = Element::zero();
    for k in 1..=alg.max_arity() {
        let p = wedge_power(alg, &x, k - 1, trunc);
        let input = alg.space().mul(&b, &p).filter(|w| alg.word_weight(w) < trunc);
        if input.is_zero() {
            continue;
        }
        let c = inv_factorial(k - 1) * Q::from_integer(fukaya2_sign(k).into());
        sum.add_scaled(&lambda_on(alg, &input), &c);
    }
    let lhs = FilteredElement::from_element(alg, &from_exterior(alg, &sum), trunc)?;
    Ok(lhs.sub(l_chain))
}

/// Bounds on Maslov indices forced by homology living in degrees `0..=n`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DegreeConstraints {
    pub n: i64,
    /// `[2, n+1]` for the class `a` of the `β'` term.
    pub mu_a: (i64, i64),
    pub mu_a_even: Vec<i64>,
    /// `[2-n, 2]` for the classes `a_i` of the `α'` terms.
    pub mu_ai: (i64, i64),
    pub mu_ai_even: Vec<i64>,
}

/// Interval arithmetic on the geometric degrees `n+1-μ(a)` and
/// `n-2+μ(a_i)`, both required to lie in `[0, n]`, with even Maslov indices.
pub fn degree_constraints(n: i64) -> Result<DegreeConstraints, FilteredError> {
    if n < 1 {
        return Err(FilteredError::Dimension(n));
    }
    // 0 ≤ n+1-μ ≤ n
    let (raw_lo, hi) = (1, n + 1);
    let evens = |lo: i64, hi: i64| (lo..=hi).filter(|m| m % 2 == 0).collect::<Vec<_>>();
    let mu_a_even = evens(raw_lo, hi);
    let lo = mu_a_even[0];
    // 0 ≤ n-2+μ ≤ n
    let mu_ai = (2 - n, 2);
    Ok(DegreeConstraints {
        n,
        mu_a: (lo, hi),
        mu_a_even,
        mu_ai,
        mu_ai_even: evens(mu_ai.0, mu_ai.1),
    })
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MaslovVerdict {
    /// `μ(a) = Σ μ(a_i)`
    pub total: i64,
    pub all_nonpositive: bool,
    /// The total is outside the allowed range for `μ(a)`.
    pub contradiction: bool,
    /// Some `a_i` with `μ(a_i) = 2` appears.
    pub has_index_two: bool,
}

/// Test a hypothetical list `μ(a_1),…,μ(a_{k-1})` against the constraints.
pub fn maslov_verdict(n: i64, mus: &[i64]) -> Result<MaslovVerdict, FilteredError> {
    let c = degree_constraints(n)?;
    let total = mus.iter().sum();
    Ok(MaslovVerdict {
        total,
        all_nonpositive: mus.iter().all(|&m| m <= 0),
        contradiction: total < c.mu_a.0 || total > c.mu_a.1,
        has_index_two: mus.contains(&2),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sign_tables() {
        let s1: Vec<i8> = (1..=4).map(fukaya1_sign).collect();
        let s2: Vec<i8> = (1..=4).map(fukaya2_sign).collect();
        assert_eq!(s1, alloc::vec![1, -1, -1, 1]);
        assert_eq!(s2, alloc::vec![1, 1, -1, -1]);
    }

    #[test]
    fn constraints() {
        let c = degree_constraints(3).unwrap();
        assert_eq!(c.mu_a, (2, 4));
        assert_eq!(c.mu_ai, (-1, 2));
        assert_eq!(c.mu_ai_even, alloc::vec![0, 2]);
        let c = degree_constraints(1).unwrap();
        assert_eq!(c.mu_a, (2, 2));
        assert!(degree_constraints(0).is_err());
        let v = maslov_verdict(3, &[0, -2, 0]).unwrap();
        assert!(v.all_nonpositive && v.contradiction);
        let v = maslov_verdict(3, &[2, 0]).unwrap();
        assert!(!v.contradiction && v.has_index_two);
    }
}
