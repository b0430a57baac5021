//! Homotopy transfer of an L∞ structure to the homology of `ℓ_1`.
//!
//! A contraction `(ι, π, h)` with `ιπ - id = ℓ_1 h + h ℓ_1` and the side
//! conditions `hι = 0`, `πh = 0`, `hh = 0` is read off one exact Gaussian
//! elimination per block. The structure `ℓ'` on `H` and the morphism
//! `f: H → C` with `f_1 = ι` are then built arity by arity: writing
//! `U_n = Σ_{j≥2} ℓ_j((e^f)_j) - Σ_{2≤k<n} f_{n-k+1}∘ℓ̂'_k` on `S^n(H)`, the
//! intertwining equation in arity `n` is `ιℓ'_n - ℓ_1 f_n = U_n`, solved by
//! `ℓ'_n = πU_n` and `f_n = hU_n`.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use num_traits::Zero;

use crate::graded::{Element, GradedSpace, Word, WordKind};
use crate::linalg::Matrix;
use crate::linfty::{LInftyAlgebra, MultilinearOp};
use crate::morphism::LInftyMorphism;
use crate::rational::Q;

/// The contraction data on `V`, one generator of `H` per homology class.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Contraction {
    /// Cycle representative (in `V`) of each homology generator.
    pub iota: Vec<Element>,
    /// `π` on each generator of `V`, as coordinates on the `H` generators.
    pub pi: Vec<Vec<(usize, Q)>>,
    /// `h` on each generator of `V`.
    pub h: Vec<Element>,
}

impl Contraction {
    pub fn apply_pi(&self, e: &Element) -> Vec<(usize, Q)> {
        let mut acc: BTreeMap<usize, Q> = BTreeMap::new();
        for (w, c) in e.iter() {
            debug_assert_eq!(w.len(), 1);
            for (j, x) in &self.pi[w.letters[0]] {
                *acc.entry(*j).or_insert_with(Q::zero) += x * c;
            }
        }
        acc.into_iter().filter(|(_, v)| !v.is_zero()).collect()
    }

    pub fn apply_h(&self, e: &Element) -> Element {
        let mut out = Element::zero();
        for (w, c) in e.iter() {
            out.add_scaled(&self.h[w.letters[0]], c);
        }
        out
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Transfer {
    pub homology: LInftyAlgebra,
    pub inclusion: LInftyMorphism,
    pub contraction: Contraction,
}

/// Transfer `alg` to the homology of its `ℓ_1`, computing `ℓ'_k` and `f_k`
/// for `k ≤ max_arity`.
///
/// When `ℓ_1` preserves filtration weights exactly, the elimination runs per
/// `(degree, weight)` block so every map respects the filtration; otherwise
/// per degree, and each homology generator gets the least weight in the
/// support of its representative.
pub fn homotopy_transfer(alg: &LInftyAlgebra, max_arity: usize) -> Transfer {
    let space = alg.space();
    let bar = alg.bar_shift();
    let n = space.len();
    let l1 = alg.op(1);
    let d_of = |g: usize| -> Element {
        l1.map(|op| op.get(&alg.bar_letter(g)).cloned().unwrap_or_default())
            .unwrap_or_default()
    };
    let by_weight = (0..n).all(|g| {
        d_of(g)
            .words()
            .all(|w| alg.weight(w.letters[0]) == alg.weight(g))
    });
    let block_of = |g: usize| -> (i64, i64) {
        let deg = space.shifted_degree(g, bar);
        (deg, if by_weight { alg.weight(g) } else { 0 })
    };
    let mut blocks: BTreeMap<(i64, i64), Vec<usize>> = BTreeMap::new();
    for g in 0..n {
        blocks.entry(block_of(g)).or_default().push(g);
    }

    // kernel of ℓ_1 and the complement B' in each block
    let mut kernels: BTreeMap<(i64, i64), Vec<Vec<Q>>> = BTreeMap::new();
    let mut bprime: BTreeMap<(i64, i64), Vec<usize>> = BTreeMap::new();
    for (key, gens) in &blocks {
        let m = l1_matrix(&gens[..], n, &d_of);
        let ker = m.kernel();
        let mut chosen: Vec<Vec<Q>> = ker.clone();
        let mut comp = Vec::new();
        for (pos, _) in gens.iter().enumerate() {
            let mut e = alloc::vec![Q::zero(); gens.len()];
            e[pos] = Q::from_integer(1.into());
            let mut trial = chosen.clone();
            trial.push(e.clone());
            if Matrix::from_columns(gens.len(), &trial).rank() == trial.len() {
                chosen = trial;
                comp.push(pos);
            }
        }
        kernels.insert(*key, ker);
        bprime.insert(*key, comp);
    }

    let mut iota: Vec<Element> = Vec::new();
    let mut h_weights: Vec<i64> = Vec::new();
    let mut h_degrees: Vec<i64> = Vec::new();
    let mut pi: Vec<Vec<(usize, Q)>> = alloc::vec![Vec::new(); n];
    let mut h: Vec<Element> = alloc::vec![Element::zero(); n];

    for (key, gens) in &blocks {
        let local = |g: usize| gens.iter().position(|&x| x == g);
        // B: images of B' from the block one degree up with the same weight
        let up = (key.0 + 1, key.1);
        let mut b_cols: Vec<Vec<Q>> = Vec::new();
        let mut b_pre: Vec<usize> = Vec::new();
        if let (Some(up_gens), Some(up_comp)) = (blocks.get(&up), bprime.get(&up)) {
            for &pos in up_comp {
                let g = up_gens[pos];
                let img = d_of(g);
                let mut col = alloc::vec![Q::zero(); gens.len()];
                for (w, c) in img.iter() {
                    let i = local(w.letters[0]).expect("ℓ_1 leaves its block");
                    col[i] = c.clone();
                }
                b_cols.push(col);
                b_pre.push(g);
            }
        }
        // H': kernel vectors independent modulo B
        let mut basis = b_cols.clone();
        let mut hp_cols = Vec::new();
        for v in &kernels[key] {
            let mut trial = basis.clone();
            trial.push(v.clone());
            if Matrix::from_columns(gens.len(), &trial).rank() == trial.len() {
                basis = trial;
                hp_cols.push(v.clone());
            }
        }
        let comp = &bprime[key];
        for &pos in comp {
            let mut e = alloc::vec![Q::zero(); gens.len()];
            e[pos] = Q::from_integer(1.into());
            basis.push(e);
        }
        let m = Matrix::from_columns(gens.len(), &basis);
        let inv = m.inverse().expect("contraction basis is square and invertible");

        let h_base = iota.len();
        for col in &hp_cols {
            let mut rep = Element::zero();
            let mut wmin = i64::MAX;
            for (i, c) in col.iter().enumerate() {
                if !c.is_zero() {
                    rep.add_term(alg.bar_letter(gens[i]), c.clone());
                    wmin = wmin.min(alg.weight(gens[i]));
                }
            }
            iota.push(rep);
            h_weights.push(wmin);
            h_degrees.push(key.0 + bar);
        }
        let nb = b_cols.len();
        let nh = hp_cols.len();
        for (i, &g) in gens.iter().enumerate() {
            // coordinates of the standard vector e_g in the basis [B | H' | B']
            let coords: Vec<Q> = (0..gens.len()).map(|r| inv[(r, i)].clone()).collect();
            pi[g] = (0..nh)
                .filter(|&j| !coords[nb + j].is_zero())
                .map(|j| (h_base + j, coords[nb + j].clone()))
                .collect();
            let mut hv = Element::zero();
            for (j, &pre) in b_pre.iter().enumerate() {
                hv.add_term(alg.bar_letter(pre), -coords[j].clone());
            }
            h[g] = hv;
        }
    }

    let names: Vec<String> = (0..iota.len()).map(|i| format!("h{}", i)).collect();
    let hspace = GradedSpace::new(names.iter().cloned().zip(h_degrees.iter().copied()))
        .expect("fresh generator names are distinct");
    let contraction = Contraction { iota, pi, h };

    let hbar = bar;
    let hletter = |j: usize| Word::symmetric(alloc::vec![j], hbar);
    let f1_table: BTreeMap<Word, Element> = contraction
        .iota
        .iter()
        .enumerate()
        .map(|(j, rep)| (hletter(j), rep.clone()))
        .collect();
    let mut fs: BTreeMap<usize, MultilinearOp> = BTreeMap::new();
    fs.insert(1, MultilinearOp::from_table(1, 0, f1_table));
    let mut ls: BTreeMap<usize, MultilinearOp> = BTreeMap::new();

    let empty_h = || {
        LInftyAlgebra::new(hspace.clone(), alg.degree(), Vec::new(), Some(h_weights.clone()))
            .expect("weights match generators")
    };

    for arity in 2..=max_arity {
        let current_h = LInftyAlgebra::new(
            hspace.clone(),
            alg.degree(),
            ls.values().cloned(),
            Some(h_weights.clone()),
        )
        .expect("transferred operations have degree -1");
        let current_f = LInftyMorphism::new(current_h.clone(), alg.clone(), fs.values().cloned())
            .expect("components have degree 0");
        let mut l_table = BTreeMap::new();
        let mut f_table = BTreeMap::new();
        for w in hspace.canonical_words(WordKind::Symmetric, hbar, arity) {
            let ef = current_f.exp_word(&w);
            let higher = ef.filter(|u| u.len() >= 2);
            let mut u = alg.hat_elem(&higher).component(1);
            let lower = current_f.linear(&current_h.hat(&w));
            u.sub_assign(&lower);
            let p: Element = contraction
                .apply_pi(&u)
                .into_iter()
                .map(|(j, c)| (hletter(j), c))
                .collect();
            let fv = contraction.apply_h(&u);
            if !p.is_zero() {
                l_table.insert(w.clone(), p);
            }
            if !fv.is_zero() {
                f_table.insert(w, fv);
            }
        }
        let l_op = MultilinearOp::from_table(arity, -1, l_table);
        if !l_op.is_zero() {
            ls.insert(arity, l_op);
        }
        let f_op = MultilinearOp::from_table(arity, 0, f_table);
        if !f_op.is_zero() {
            fs.insert(arity, f_op);
        }
    }

    let homology = if ls.is_empty() {
        empty_h()
    } else {
        LInftyAlgebra::new(hspace, alg.degree(), ls.into_values(), Some(h_weights))
            .expect("transferred operations have degree -1")
    };
    let inclusion = LInftyMorphism::new(homology.clone(), alg.clone(), fs.into_values())
        .expect("components have degree 0");
    Transfer {
        homology,
        inclusion,
        contraction,
    }
}

/// Columns of `ℓ_1` on the block generators, as vectors over all of `V`.
fn l1_matrix(gens: &[usize], n: usize, d_of: &impl Fn(usize) -> Element) -> Matrix {
    let cols: Vec<Vec<Q>> = gens
        .iter()
        .map(|&g| {
            let mut col = alloc::vec![Q::zero(); n];
            for (w, c) in d_of(g).iter() {
                col[w.letters[0]] = c.clone();
            }
            col
        })
        .collect();
    Matrix::from_columns(n, &cols)
}
