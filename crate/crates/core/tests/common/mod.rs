//! Fixtures shared by the integration tests: small Lie algebras, random
//! filtered dg Lie algebras of endomorphisms, their Maurer-Cartan elements,
//! and random (not necessarily valid) L∞ tables.
#![allow(dead_code)]

use disklab_core::filtered::FilteredElement;
use disklab_core::graded::{Element, GradedSpace, Word};
use disklab_core::linalg::Matrix;
use disklab_core::linfty::{LInftyAlgebra, MultilinearOp};
use disklab_core::morphism::LInftyMorphism;
use disklab_core::rational::{q, Q};
use num_traits::Zero;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Algebra with every operation zero.
pub fn abelian() -> LInftyAlgebra {
    let space = GradedSpace::new([("x", 0), ("y", 1), ("z", -1)]).unwrap();
    LInftyAlgebra::new(space, 0, Vec::new(), Some(vec![1, 1, 2])).unwrap()
}

/// `sl(2)` in degree 0: `[h,e] = 2e`, `[h,f] = -2f`, `[e,f] = h`.
pub fn sl2() -> LInftyAlgebra {
    let space = GradedSpace::new([("e", 0), ("f", 0), ("h", 0)]).unwrap();
    LInftyAlgebra::from_lambda(
        space,
        0,
        [
            (2, vec![2, 0], vec![(0, q(2))]),
            (2, vec![2, 1], vec![(1, q(-2))]),
            (2, vec![0, 1], vec![(2, q(1))]),
        ],
        None,
    )
    .unwrap()
}

/// Three-dimensional dg Lie algebra: `x, y` in degree 0, `z` in degree -1,
/// `∂x = z`, `[x,y] = y`, `[x,z] = z`.
pub fn dglie() -> LInftyAlgebra {
    let space = GradedSpace::new([("x", 0), ("y", 0), ("z", -1)]).unwrap();
    LInftyAlgebra::from_lambda(
        space,
        0,
        [
            (1, vec![0], vec![(2, q(1))]),
            (2, vec![0, 1], vec![(1, q(1))]),
            (2, vec![0, 2], vec![(2, q(1))]),
        ],
        Some(vec![1, 1, 1]),
    )
    .unwrap()
}

/// `sl(2)` with `[h,f] = -3f`, which breaks the Jacobi identity: the
/// Jacobiator of `e, f, h` is `h`.
pub fn broken_sl2() -> LInftyAlgebra {
    let space = GradedSpace::new([("e", 0), ("f", 0), ("h", 0)]).unwrap();
    LInftyAlgebra::from_lambda(
        space,
        0,
        [
            (2, vec![2, 0], vec![(0, q(2))]),
            (2, vec![2, 1], vec![(1, q(-3))]),
            (2, vec![0, 1], vec![(2, q(1))]),
        ],
        None,
    )
    .unwrap()
}

/// dg Lie algebra with a vanishing product on homology but a nonzero
/// triple Massey product: `a, b, c, v` in degree 0, `u, w` in degree 1,
/// `∂u = v`, `[a,b] = v`, `[u,c] = w`. Homology is spanned by `a, b, c, w`
/// and the transferred `ℓ_3(a,b,c)` is a nonzero multiple of `w`.
pub fn massey() -> LInftyAlgebra {
    let space = GradedSpace::new([("a", 0), ("b", 0), ("c", 0), ("v", 0), ("u", 1), ("w", 1)]).unwrap();
    LInftyAlgebra::from_lambda(
        space,
        0,
        [
            (1, vec![4], vec![(3, q(1))]),
            (2, vec![0, 1], vec![(3, q(1))]),
            (2, vec![4, 2], vec![(5, q(1))]),
        ],
        Some(vec![1, 1, 1, 2, 2, 3]),
    )
    .unwrap()
}

/// A filtered dg Lie algebra of endomorphisms of a small graded space `W`.
///
/// `W` has basis `w_0, …` with degrees `deg` and levels `lev`. The algebra is
/// spanned by the elementary maps `E_ij: w_j ↦ w_i` with `lev_i > lev_j`
/// (closed under composition, so a Lie subalgebra for the graded
/// commutator). `E_ij` has degree `deg_i - deg_j` and weight `lev_i - lev_j`.
/// The differential is `[δ, ·]` for a square-zero `δ` of degree -1 that keeps
/// levels; `δ` itself is not in the algebra, which lets the homology be
/// nonzero. Generators are a random basis change of the `E_ij` inside each
/// `(degree, weight)` block.
#[derive(Debug, Clone)]
pub struct EndModel {
    pub deg: Vec<i64>,
    pub lev: Vec<i64>,
    pub pairs: Vec<(usize, usize)>,
    /// Column `a` holds generator `a` in `E` coordinates.
    pub basis: Matrix,
    pub basis_inv: Matrix,
    pub delta: Matrix,
    pub alg: LInftyAlgebra,
}

impl EndModel {
    pub fn dim(&self) -> usize {
        self.deg.len()
    }

    /// An endomorphism of `W` as coordinates on the `E_ij` (must lie in the span).
    pub fn e_coords(&self, m: &Matrix) -> Vec<Q> {
        let n = self.dim();
        let mut rest = m.clone();
        let coords: Vec<Q> = self
            .pairs
            .iter()
            .map(|&(i, j)| {
                let c = m[(i, j)].clone();
                rest[(i, j)] = Q::zero();
                c
            })
            .collect();
        for i in 0..n {
            for j in 0..n {
                assert!(rest[(i, j)].is_zero(), "endomorphism leaves the model");
            }
        }
        coords
    }

    pub fn from_e_coords(&self, v: &[Q]) -> Matrix {
        let n = self.dim();
        let mut m = Matrix::zeros(n, n);
        for (p, &(i, j)) in self.pairs.iter().enumerate() {
            m[(i, j)] = v[p].clone();
        }
        m
    }

    /// Bar-form element for an endomorphism in the span.
    pub fn element_of(&self, m: &Matrix) -> Element {
        let g = self.basis_inv.mul_vec(&self.e_coords(m));
        let mut e = Element::zero();
        for (a, c) in g.into_iter().enumerate() {
            e.add_term(self.alg.bar_letter(a), c);
        }
        e
    }

    pub fn generator_matrix(&self, a: usize) -> Matrix {
        self.from_e_coords(&self.basis.column(a))
    }
}

fn graded_commutator(a: &Matrix, da: i64, b: &Matrix, db: i64) -> Matrix {
    let ab = a.mul(b);
    let ba = b.mul(a);
    let sign = if (da * db).rem_euclid(2) == 1 { q(1) } else { q(-1) };
    let mut out = ab;
    for i in 0..out.rows() {
        for j in 0..out.cols() {
            let v = &ba[(i, j)] * &sign;
            out[(i, j)] += v;
        }
    }
    out
}

fn small(rng: &mut ChaCha8Rng) -> Q {
    q(rng.gen_range(-2..=2))
}

fn nonzero(rng: &mut ChaCha8Rng) -> Q {
    loop {
        let x = small(rng);
        if !x.is_zero() {
            return x;
        }
    }
}

/// Random model with at most `max_gens` generators and a nonzero
/// differential when `want_differential` is set.
pub fn random_end_model(rng: &mut ChaCha8Rng, max_gens: usize, want_differential: bool) -> EndModel {
    loop {
        let n = rng.gen_range(2..=5);
        let deg: Vec<i64> = (0..n).map(|_| rng.gen_range(-1..=1)).collect();
        let lev: Vec<i64> = (0..n).map(|_| rng.gen_range(0..=3)).collect();
        let mut pairs = Vec::new();
        for i in 0..n {
            for j in 0..n {
                if lev[i] > lev[j] {
                    pairs.push((i, j));
                }
            }
        }
        if pairs.is_empty() || pairs.len() > max_gens {
            continue;
        }
        let mut delta = Matrix::zeros(n, n);
        for i in 0..n {
            for j in 0..n {
                if lev[i] == lev[j] && i != j && deg[i] - deg[j] == -1 && rng.gen_bool(0.7) {
                    delta[(i, j)] = nonzero(rng);
                }
            }
        }
        let sq = delta.mul(&delta);
        if (0..n).any(|i| (0..n).any(|j| !sq[(i, j)].is_zero())) {
            continue;
        }
        let has_d = (0..n).any(|i| (0..n).any(|j| !delta[(i, j)].is_zero()));
        if want_differential && !has_d {
            continue;
        }
        return build_model(rng, deg, lev, pairs, delta);
    }
}

fn build_model(
    rng: &mut ChaCha8Rng,
    deg: Vec<i64>,
    lev: Vec<i64>,
    pairs: Vec<(usize, usize)>,
    delta: Matrix,
) -> EndModel {
    let np = pairs.len();
    let key = |p: usize| {
        let (i, j) = pairs[p];
        (deg[i] - deg[j], lev[i] - lev[j])
    };
    // block-diagonal random change of basis
    let basis = loop {
        let mut m = Matrix::zeros(np, np);
        for a in 0..np {
            for b in 0..np {
                if key(a) == key(b) {
                    m[(a, b)] = if a == b { nonzero(rng) } else { small(rng) };
                }
            }
        }
        if m.inverse().is_some() {
            break m;
        }
    };
    let basis_inv = basis.inverse().unwrap();
    let names: Vec<String> = (0..np).map(|a| format!("g{a}")).collect();
    let degrees: Vec<i64> = (0..np).map(|a| key(a).0).collect();
    let weights: Vec<i64> = (0..np).map(|a| key(a).1).collect();
    let space = GradedSpace::new(names.iter().cloned().zip(degrees.iter().copied())).unwrap();
    let mut model = EndModel {
        deg,
        lev,
        pairs,
        basis,
        basis_inv,
        delta,
        alg: LInftyAlgebra::new(space.clone(), 0, Vec::new(), Some(weights.clone())).unwrap(),
    };
    let to_g = |model: &EndModel, m: &Matrix| -> Vec<(usize, Q)> {
        let g = model.basis_inv.mul_vec(&model.e_coords(m));
        g.into_iter().enumerate().filter(|(_, c)| !c.is_zero()).collect()
    };
    let mut entries = Vec::new();
    for a in 0..np {
        let ga = model.generator_matrix(a);
        let d = graded_commutator(&model.delta, -1, &ga, degrees[a]);
        entries.push((1, vec![a], to_g(&model, &d)));
        for b in a..np {
            let gb = model.generator_matrix(b);
            let br = graded_commutator(&ga, degrees[a], &gb, degrees[b]);
            let out = to_g(&model, &br);
            if !out.is_empty() {
                entries.push((2, vec![a, b], out));
            }
        }
    }
    model.alg = LInftyAlgebra::from_lambda(space, 0, entries, Some(weights)).unwrap();
    model
}

/// `a = δ - gδg⁻¹` for a random unipotent degree-0 `g = 1 + N` raising the
/// level; satisfies `[δ,a] - ½[a,a] = 0`, i.e. it is Maurer-Cartan.
pub fn random_mc(rng: &mut ChaCha8Rng, model: &EndModel, trunc: i64) -> FilteredElement {
    let n = model.dim();
    let mut g = Matrix::identity(n);
    for &(i, j) in &model.pairs {
        if model.deg[i] == model.deg[j] {
            g[(i, j)] = small(rng);
        }
    }
    let gi = g.inverse().unwrap();
    let conj = g.mul(&model.delta).mul(&gi);
    let mut a = model.delta.clone();
    for i in 0..n {
        for j in 0..n {
            let v = conj[(i, j)].clone();
            a[(i, j)] -= v;
        }
    }
    FilteredElement::from_element(&model.alg, &model.element_of(&a), trunc).unwrap()
}

/// Random element of the model supported on generators of the given degree
/// (any degree when `None`) with weight at least `min_weight`.
pub fn random_element(
    rng: &mut ChaCha8Rng,
    alg: &LInftyAlgebra,
    degree: Option<i64>,
    min_weight: i64,
    trunc: i64,
) -> FilteredElement {
    let mut e = Element::zero();
    for g in 0..alg.space().len() {
        if degree.is_none_or(|d| alg.space().degree(g) == d) && alg.weight(g) >= min_weight {
            e.add_term(alg.bar_letter(g), small(rng));
        }
    }
    FilteredElement::from_element(alg, &e, trunc).unwrap()
}

/// Random `ℓ_1, ℓ_2, ℓ_3` tables of degree -1 on at most `max_gens`
/// generators; the relations need not hold.
pub fn random_tables(rng: &mut ChaCha8Rng, max_gens: usize) -> LInftyAlgebra {
    let n = rng.gen_range(1..=max_gens);
    let d = rng.gen_range(-2..=1);
    let degrees: Vec<i64> = (0..n).map(|_| rng.gen_range(-2..=2)).collect();
    let names: Vec<String> = (0..n).map(|i| format!("x{i}")).collect();
    let space = GradedSpace::new(names.into_iter().zip(degrees.iter().copied())).unwrap();
    let bar = -(d + 1);
    let mut ops = Vec::new();
    for k in 1..=3usize {
        let mut entries = Vec::new();
        for key in space.canonical_words(disklab_core::graded::WordKind::Symmetric, bar, k) {
            let out_deg = space.word_degree(&key) - 1;
            let mut v = Element::zero();
            for g in 0..n {
                if space.shifted_degree(g, bar) == out_deg && rng.gen_bool(0.5) {
                    v.add_term(Word::symmetric(vec![g], bar), small(rng));
                }
            }
            if !v.is_zero() {
                entries.push((key.letters.clone(), v));
            }
        }
        ops.push(MultilinearOp::new(&space, bar, &space, bar, k, -1, entries).unwrap());
    }
    LInftyAlgebra::new(space, d, ops, None).unwrap()
}

/// `Ad_g` for `g = 1 + N` with `N` a random degree-0 cycle of the model
/// (`[δ, N] = 0`), a strict filtered automorphism. `None` when the model
/// has no nonzero degree-0 cycle.
pub fn ad_morphism(rng: &mut ChaCha8Rng, model: &EndModel) -> Option<LInftyMorphism> {
    let n = model.dim();
    let even: Vec<usize> = (0..model.pairs.len())
        .filter(|&p| {
            let (i, j) = model.pairs[p];
            model.deg[i] == model.deg[j]
        })
        .collect();
    // columns: δE_p - E_pδ flattened
    let cols: Vec<Vec<Q>> = even
        .iter()
        .map(|&p| {
            let mut e = Matrix::zeros(n, n);
            let (i, j) = model.pairs[p];
            e[(i, j)] = q(1);
            let c = graded_commutator(&model.delta, -1, &e, 0);
            (0..n * n).map(|k| c[(k / n, k % n)].clone()).collect()
        })
        .collect();
    let kernel = Matrix::from_columns(n * n, &cols).kernel();
    if kernel.is_empty() {
        return None;
    }
    let mut g = Matrix::identity(n);
    for v in &kernel {
        let c = nonzero(rng);
        for (k, &p) in even.iter().enumerate() {
            let (i, j) = model.pairs[p];
            let x = &v[k] * &c;
            g[(i, j)] += x;
        }
    }
    let gi = g.inverse().unwrap();
    let s = model.alg.space();
    let bar = model.alg.bar_shift();
    let entries: Vec<(Vec<usize>, Element)> = (0..s.len())
        .map(|a| {
            let img = g.mul(&model.generator_matrix(a)).mul(&gi);
            (vec![a], model.element_of(&img))
        })
        .collect();
    let f1 = MultilinearOp::new(s, bar, s, bar, 1, 0, entries).unwrap();
    Some(LInftyMorphism::new(model.alg.clone(), model.alg.clone(), [f1]).unwrap())
}

/// A Maurer-Cartan element of `alg` found by random search among
/// combinations of generators in bar degree 0 and weight `≥ 1`.
pub fn search_mc(rng: &mut ChaCha8Rng, alg: &LInftyAlgebra, trunc: i64, tries: usize) -> Option<FilteredElement> {
    let deg = alg.bar_shift();
    let gens: Vec<usize> = (0..alg.space().len())
        .filter(|&g| alg.space().degree(g) == deg && alg.weight(g) >= 1 && alg.weight(g) < trunc)
        .collect();
    if gens.is_empty() {
        return None;
    }
    for _ in 0..tries {
        // sparse random supports find solutions far more often than dense ones
        let mut e = Element::zero();
        for &g in &gens {
            if rng.gen_bool(0.5) {
                e.add_term(alg.bar_letter(g), small(rng));
            }
        }
        if e.is_zero() {
            continue;
        }
        let a = FilteredElement::from_element(alg, &e, trunc).unwrap();
        if disklab_core::filtered::mc_residual(alg, &a, trunc).is_ok_and(|r| r.is_zero()) {
            return Some(a);
        }
    }
    None
}

/// Two-level toy model for `n = 2` (`d = -1`): degree-0 generators `a1`
/// (level 1) and `a2` (level 2), `q` in degree -1, `b, b1` in degree 3 and
/// `l, m` in degree 2, with `λ_1 a2 = q`, `λ_2(a1,a1) = q`, `λ_1 b = l`,
/// `λ_1 b1 = m`, `λ_2(b,a1) = m`.
pub struct Toy {
    pub alg: LInftyAlgebra,
}

pub fn toy() -> Toy {
    let space = GradedSpace::new([("a1", 0), ("a2", 0), ("q", -1), ("b", 3), ("b1", 3), ("l", 2), ("m", 2)]).unwrap();
    let alg = LInftyAlgebra::from_lambda(
        space,
        -1,
        [
            (1, vec![1], vec![(2, q(1))]),
            (2, vec![0, 0], vec![(2, q(1))]),
            (1, vec![3], vec![(5, q(1))]),
            (1, vec![4], vec![(6, q(1))]),
            (2, vec![3, 0], vec![(6, q(1))]),
        ],
        Some(vec![1, 2, 2, 1, 2, 1, 2]),
    )
    .unwrap();
    Toy { alg }
}

impl Toy {
    pub fn elem(&self, terms: &[(usize, Q)]) -> FilteredElement {
        let s = self.alg.bar_shift();
        let t = terms.iter().map(|(g, c)| (self.alg.weight(*g), Word::symmetric(vec![*g], s), c.clone()));
        FilteredElement::from_terms(&self.alg, t, 3).unwrap()
    }

    pub fn alpha(&self, x: &Q) -> FilteredElement {
        self.elem(&[(0, q(1)), (1, x.clone())])
    }

    pub fn beta(&self, y: &Q) -> FilteredElement {
        self.elem(&[(3, q(1)), (4, y.clone())])
    }
}

/// Solve an affine equation `r(t) = r(0) + t(r(1) - r(0)) = 0` on its
/// coefficient vector.
pub fn solve_affine(r0: &FilteredElement, r1: &FilteredElement, n: usize) -> Q {
    let vec_of = |e: &FilteredElement| {
        let mut v = vec![Q::zero(); n];
        for (w, c) in e.element().iter() {
            v[w.letters[0]] += c;
        }
        v
    };
    let (v0, v1) = (vec_of(r0), vec_of(r1));
    let slope: Vec<Vec<Q>> = vec![v1.iter().zip(&v0).map(|(a, b)| a - b).collect()];
    let rhs: Vec<Q> = v0.iter().map(|x| -x).collect();
    Matrix::from_columns(n, &slope).solve(&rhs).expect("consistent")[0].clone()
}

