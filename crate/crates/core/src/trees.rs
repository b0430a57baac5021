//! Trees, tree homomorphisms, stable trees of holomorphic disks and the
//! boundary of the `(1,1)` moduli space of the Clifford-type torus
//! `T² ⊂ C²`.

use alloc::collections::{BTreeMap, BTreeSet, VecDeque};
use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::PI;

// float methods for no_std; unused when a dependency links std
#[allow(unused_imports)]
use num_traits::Float;
use thiserror::Error;

use crate::disks::{torus_energy, winding_number, BlaschkeConfig, DiskError, Mobius, TorusClass, C64};
use crate::filtered::ClassId;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TreeAxiom {
    Symmetric,
    Antireflexive,
    Connected,
    NoCycles,
}

impl core::fmt::Display for TreeAxiom {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        f.write_str(match self {
            TreeAxiom::Symmetric => "symmetric",
            TreeAxiom::Antireflexive => "antireflexive",
            TreeAxiom::Connected => "connected",
            TreeAxiom::NoCycles => "no cycles",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum TreeError {
    #[error("a tree needs at least one vertex")]
    Empty,
    #[error("vertex {vertex} out of range for {n} vertices")]
    VertexOutOfRange { vertex: usize, n: usize },
    #[error("axiom violated: {0}")]
    Axiom(TreeAxiom),
    #[error("{a} and {b} are not adjacent")]
    NotAnEdge { a: usize, b: usize },
    #[error("equivalence search is limited to {max} vertices, got {found}")]
    SearchBound { max: usize, found: usize },
    #[error("sequence does not leave compact sets: |psi(0)| = {modulus}")]
    NotEscaping { modulus: f64 },
    #[error("the hyperbolic family needs a second fixed point w != 1")]
    DegenerateFamily,
    #[error(transparent)]
    Disk(#[from] DiskError),
}

/// Check the four tree axioms on an edge relation `E ⊂ T×T`, in order.
pub fn validate_relation(n: usize, rel: &[(usize, usize)]) -> Result<(), TreeError> {
    if n == 0 {
        return Err(TreeError::Empty);
    }
    for &(a, b) in rel {
        for v in [a, b] {
            if v >= n {
                return Err(TreeError::VertexOutOfRange { vertex: v, n });
            }
        }
    }
    let set: BTreeSet<(usize, usize)> = rel.iter().copied().collect();
    if set.iter().any(|&(a, b)| !set.contains(&(b, a))) {
        return Err(TreeError::Axiom(TreeAxiom::Symmetric));
    }
    if set.iter().any(|&(a, b)| a == b) {
        return Err(TreeError::Axiom(TreeAxiom::Antireflexive));
    }
    let mut adj = vec![Vec::new(); n];
    for &(a, b) in &set {
        adj[a].push(b);
    }
    if component(&adj, 0, None).len() != n {
        return Err(TreeError::Axiom(TreeAxiom::Connected));
    }
    if has_cycle(&adj) {
        return Err(TreeError::Axiom(TreeAxiom::NoCycles));
    }
    Ok(())
}

/// Vertices reachable from `start`, optionally without crossing the
/// directed edge `skip`.
fn component(adj: &[Vec<usize>], start: usize, skip: Option<(usize, usize)>) -> BTreeSet<usize> {
    let mut seen = BTreeSet::from([start]);
    let mut queue = VecDeque::from([start]);
    while let Some(v) = queue.pop_front() {
        for &u in &adj[v] {
            if skip == Some((v, u)) || skip == Some((u, v)) {
                continue;
            }
            if seen.insert(u) {
                queue.push_back(u);
            }
        }
    }
    seen
}

/// Depth-first search for a cycle in a simple undirected graph.
fn has_cycle(adj: &[Vec<usize>]) -> bool {
    let n = adj.len();
    let mut seen = vec![false; n];
    for root in 0..n {
        if seen[root] {
            continue;
        }
        seen[root] = true;
        let mut stack = vec![(root, usize::MAX)];
        while let Some((v, parent)) = stack.pop() {
            for &u in &adj[v] {
                if u == parent {
                    continue;
                }
                if seen[u] {
                    return true;
                }
                seen[u] = true;
                stack.push((u, v));
            }
        }
    }
    false
}

/// A finite tree on vertices `0..n`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Tree {
    adj: Vec<Vec<usize>>,
}

impl Tree {
    /// From unordered edges; each `{a, b}` enters the relation both ways.
    pub fn new(n: usize, edges: &[(usize, usize)]) -> Result<Self, TreeError> {
        let rel: Vec<(usize, usize)> = edges.iter().flat_map(|&(a, b)| [(a, b), (b, a)]).collect();
        Self::from_relation(n, &rel)
    }

    pub fn from_relation(n: usize, rel: &[(usize, usize)]) -> Result<Self, TreeError> {
        validate_relation(n, rel)?;
        let mut adj = vec![BTreeSet::new(); n];
        for &(a, b) in rel {
            adj[a].insert(b);
        }
        Ok(Tree {
            adj: adj.into_iter().map(|s| s.into_iter().collect()).collect(),
        })
    }

    pub fn single() -> Self {
        Tree { adj: vec![Vec::new()] }
    }

    /// `0 - 1 - ⋯ - (n-1)`.
    pub fn path(n: usize) -> Result<Self, TreeError> {
        let edges: Vec<_> = (1..n).map(|i| (i - 1, i)).collect();
        Self::new(n, &edges)
    }

    pub fn len(&self) -> usize {
        self.adj.len()
    }

    pub fn is_empty(&self) -> bool {
        self.adj.is_empty()
    }

    pub fn neighbors(&self, v: usize) -> &[usize] {
        &self.adj[v]
    }

    pub fn has_edge(&self, a: usize, b: usize) -> bool {
        a < self.len() && self.adj[a].binary_search(&b).is_ok()
    }

    /// Unordered edges `(a, b)` with `a < b`.
    pub fn edges(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        for (a, nb) in self.adj.iter().enumerate() {
            out.extend(nb.iter().filter(|&&b| a < b).map(|&b| (a, b)));
        }
        out
    }
}

/// `T_{αβ}`: the component of `β` once the edge `αβ` is removed.
pub fn subtree(t: &Tree, a: usize, b: usize) -> Result<BTreeSet<usize>, TreeError> {
    if !t.has_edge(a, b) {
        return Err(TreeError::NotAnEdge { a, b });
    }
    Ok(component(&t.adj, b, Some((a, b))))
}

/// Every preimage `f⁻¹(α')` spans a (nonempty) subtree, and adjacent
/// vertices map to adjacent or equal vertices.
pub fn is_tree_hom(f: &[usize], t: &Tree, t2: &Tree) -> bool {
    if f.len() != t.len() || f.iter().any(|&v| v >= t2.len()) {
        return false;
    }
    for (a, nb) in t.adj.iter().enumerate() {
        for &b in nb {
            if f[a] != f[b] && !t2.has_edge(f[a], f[b]) {
                return false;
            }
        }
    }
    for target in 0..t2.len() {
        let pre: Vec<usize> = (0..t.len()).filter(|&v| f[v] == target).collect();
        let Some(&start) = pre.first() else {
            return false;
        };
        // connected inside the induced subgraph; acyclic comes for free
        let mut seen = BTreeSet::from([start]);
        let mut queue = VecDeque::from([start]);
        while let Some(v) = queue.pop_front() {
            for &u in &t.adj[v] {
                if f[u] == target && seen.insert(u) {
                    queue.push_back(u);
                }
            }
        }
        if seen.len() != pre.len() {
            return false;
        }
    }
    true
}

pub fn is_tree_iso(f: &[usize], t: &Tree, t2: &Tree) -> bool {
    t.len() == t2.len() && is_tree_hom(f, t, t2) && f.iter().collect::<BTreeSet<_>>().len() == f.len()
}

/// Homotopy data attached to a disk: class label, Maslov index and energy.
#[derive(Debug, Clone, PartialEq)]
pub struct VertexClass {
    pub id: ClassId,
    pub mu: i64,
    pub energy: f64,
}

impl VertexClass {
    pub fn torus(class: &TorusClass) -> Self {
        VertexClass {
            id: ClassId::Torus(class.degrees().to_vec()),
            mu: class.maslov(),
            energy: torus_energy(class),
        }
    }

    pub fn constant(dim: usize) -> Self {
        VertexClass {
            id: ClassId::Torus(vec![0; dim]),
            mu: 0,
            energy: 0.0,
        }
    }

    fn matches(&self, other: &VertexClass) -> bool {
        self.id == other.id
            && self.mu == other.mu
            && (self.energy - other.energy).abs() <= 1e-12 * self.energy.abs().max(1.0)
    }
}

/// One disk of a stable tree. `map` optionally gives `u_α` as a product of
/// Blaschke factors, one per coordinate of `C^n`.
#[derive(Debug, Clone, PartialEq)]
pub struct DiskVertex {
    pub class: VertexClass,
    pub constant: bool,
    pub map: Option<Vec<BlaschkeConfig>>,
}

impl DiskVertex {
    fn eval(&self, z: C64) -> Option<Vec<C64>> {
        let map = self.map.as_ref()?;
        map.iter().map(|b| b.eval(z).ok()).collect()
    }
}

/// A tree of disks with nodal points `z_{αβ}` per directed edge and one
/// boundary marked point `z_0` on the disk `α_0`.
#[derive(Debug, Clone, PartialEq)]
pub struct StableDiskTree {
    pub tree: Tree,
    pub vertices: Vec<DiskVertex>,
    pub nodal: BTreeMap<(usize, usize), C64>,
    pub marked_vertex: usize,
    pub marked_point: C64,
}

/// Tolerances for stable-tree checks.
pub const POINT_TOL: f64 = 1e-8;
pub const UNIT_TOL: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq)]
pub enum StableViolation {
    VertexCount { tree: usize, vertices: usize },
    MarkedVertex { vertex: usize },
    MissingNodal { from: usize, to: usize },
    NodalOffEdge { from: usize, to: usize },
    OffCircle { vertex: usize, modulus: f64 },
    /// Two special points on one disk coincide.
    Coinciding { vertex: usize },
    /// A constant disk with fewer than three special points.
    Unstable { vertex: usize, special: usize },
    /// `u_α(z_{αβ}) ≠ u_β(z_{βα})`.
    Mismatch { from: usize, to: usize, residual: f64 },
    ConstantMapVaries { vertex: usize },
    MapShape { vertex: usize },
}

impl StableDiskTree {
    /// Special points of `α`: nodal points towards its neighbours, then the
    /// marked point if `α = α_0`.
    pub fn special_points(&self, v: usize) -> Vec<C64> {
        let mut out: Vec<C64> = self
            .tree
            .neighbors(v)
            .iter()
            .filter_map(|&b| self.nodal.get(&(v, b)).copied())
            .collect();
        if v == self.marked_vertex {
            out.push(self.marked_point);
        }
        out
    }
}

/// Check the combinatorial stable-tree conditions and, where maps are
/// given, the matching of nodal values to [`POINT_TOL`].
pub fn validate_stable_tree(st: &StableDiskTree) -> Vec<StableViolation> {
    let mut out = Vec::new();
    let n = st.tree.len();
    if st.vertices.len() != n {
        out.push(StableViolation::VertexCount {
            tree: n,
            vertices: st.vertices.len(),
        });
        return out;
    }
    if st.marked_vertex >= n {
        out.push(StableViolation::MarkedVertex {
            vertex: st.marked_vertex,
        });
        return out;
    }
    for &(from, to) in st.nodal.keys() {
        if !st.tree.has_edge(from, to) {
            out.push(StableViolation::NodalOffEdge { from, to });
        }
    }
    for (a, b) in st.tree.edges() {
        for (from, to) in [(a, b), (b, a)] {
            if !st.nodal.contains_key(&(from, to)) {
                out.push(StableViolation::MissingNodal { from, to });
            }
        }
    }
    let dims: BTreeSet<usize> = st.vertices.iter().filter_map(|v| v.map.as_ref().map(Vec::len)).collect();
    for (v, vert) in st.vertices.iter().enumerate() {
        let pts = st.special_points(v);
        for p in &pts {
            if (p.norm() - 1.0).abs() > UNIT_TOL {
                out.push(StableViolation::OffCircle {
                    vertex: v,
                    modulus: p.norm(),
                });
            }
        }
        let coincide = (0..pts.len()).any(|i| (i + 1..pts.len()).any(|j| (pts[i] - pts[j]).norm() <= POINT_TOL));
        if coincide {
            out.push(StableViolation::Coinciding { vertex: v });
        }
        if vert.constant && pts.len() < 3 {
            out.push(StableViolation::Unstable {
                vertex: v,
                special: pts.len(),
            });
        }
        if let Some(map) = &vert.map {
            if dims.len() > 1 {
                out.push(StableViolation::MapShape { vertex: v });
            }
            if vert.constant && map.iter().any(|b| b.degree() > 0) {
                out.push(StableViolation::ConstantMapVaries { vertex: v });
            }
        }
    }
    if dims.len() <= 1 {
        for (a, b) in st.tree.edges() {
            let (Some(za), Some(zb)) = (st.nodal.get(&(a, b)), st.nodal.get(&(b, a))) else {
                continue;
            };
            let (Some(ua), Some(ub)) = (st.vertices[a].eval(*za), st.vertices[b].eval(*zb)) else {
                continue;
            };
            let residual = sup_dist(&ua, &ub);
            if residual > POINT_TOL {
                out.push(StableViolation::Mismatch { from: a, to: b, residual });
            }
        }
    }
    out
}

fn sup_dist(a: &[C64], b: &[C64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max)
}

/// `Σ_α E(u_α)`.
pub fn tree_energy(st: &StableDiskTree) -> f64 {
    st.vertices.iter().map(|v| v.class.energy).sum()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct VertexDim {
    pub special: usize,
    pub mu: i64,
    /// `n - 3 + r_α + μ(α)`.
    pub dim: i64,
}

/// Dimension of the stratum of `k`-noded trees, directly and re-derived
/// from per-vertex dimensions minus `kn` matching conditions.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StratumDim {
    pub value: i64,
    pub vertices: Vec<VertexDim>,
    pub special_total: usize,
    pub constraints: i64,
    pub traced: i64,
}

impl StratumDim {
    pub fn agrees(&self) -> bool {
        self.value == self.traced && self.special_total == 2 * (self.vertices.len() - 1) + 1
    }
}

/// [`stratum_dim_split`] with all of `μ` on the marked disk.
pub fn stratum_dim(n: i64, mu: i64, k: usize) -> StratumDim {
    let mut mus = vec![0; k + 1];
    mus[0] = mu;
    stratum_dim_split(n, &mus)
}

/// Stratum of a chain of `mus.len()` disks, disk `α` in a class of Maslov
/// index `mus[α]` and the marked point on disk 0.
pub fn stratum_dim_split(n: i64, mus: &[i64]) -> StratumDim {
    let k = mus.len().saturating_sub(1);
    let mu: i64 = mus.iter().sum();
    let vertices: Vec<VertexDim> = mus
        .iter()
        .enumerate()
        .map(|(a, &m)| {
            let nodes = usize::from(a > 0) + usize::from(a < k);
            let special = nodes + usize::from(a == 0);
            VertexDim {
                special,
                mu: m,
                dim: n - 3 + special as i64 + m,
            }
        })
        .collect();
    let constraints = k as i64 * n;
    StratumDim {
        value: n - 2 + mu - k as i64,
        special_total: vertices.iter().map(|v| v.special).sum(),
        traced: vertices.iter().map(|v| v.dim).sum::<i64>() - constraints,
        vertices,
        constraints,
    }
}

/// A tree isomorphism together with disk automorphisms `φ_α` realizing an
/// equivalence.
#[derive(Debug, Clone, PartialEq)]
pub struct Equivalence {
    pub iso: Vec<usize>,
    pub maps: Vec<Mobius>,
}

pub const MAX_SEARCH_VERTICES: usize = 8;
/// Boundary points used to compare `u'_{f(α)}∘φ_α` with `u_α`.
pub const CONJUGACY_SAMPLES: usize = 16;

/// Search for an equivalence `a → b`. `Ok(None)` means no tree isomorphism
/// admits matching automorphisms at the search resolution.
pub fn equivalent_stable_trees(a: &StableDiskTree, b: &StableDiskTree) -> Result<Option<Equivalence>, TreeError> {
    let n = a.tree.len();
    for found in [n, b.tree.len()] {
        if found > MAX_SEARCH_VERTICES {
            return Err(TreeError::SearchBound {
                max: MAX_SEARCH_VERTICES,
                found,
            });
        }
    }
    if n != b.tree.len() || a.vertices.len() != n || b.vertices.len() != n {
        return Ok(None);
    }
    let mut f = Vec::with_capacity(n);
    let mut used = vec![false; n];
    Ok(search_iso(a, b, &mut f, &mut used))
}

fn search_iso(a: &StableDiskTree, b: &StableDiskTree, f: &mut Vec<usize>, used: &mut [bool]) -> Option<Equivalence> {
    let n = a.tree.len();
    let v = f.len();
    if v == n {
        let maps = (0..n).map(|x| solve_vertex(a, b, f, x)).collect::<Option<Vec<_>>>()?;
        return Some(Equivalence { iso: f.clone(), maps });
    }
    for cand in 0..n {
        if used[cand] {
            continue;
        }
        let (va, vb) = (&a.vertices[v], &b.vertices[cand]);
        if va.constant != vb.constant
            || !va.class.matches(&vb.class)
            || (v == a.marked_vertex) != (cand == b.marked_vertex)
            || (0..v).any(|u| a.tree.has_edge(u, v) != b.tree.has_edge(f[u], cand))
        {
            continue;
        }
        f.push(cand);
        used[cand] = true;
        // cheap per-vertex solve before going deeper
        let ok = (0..=v).all(|x| vertex_ready(a, f, x).is_none_or(|_| solve_vertex(a, b, f, x).is_some()));
        if ok {
            if let Some(e) = search_iso(a, b, f, used) {
                return Some(e);
            }
        }
        f.pop();
        used[cand] = false;
    }
    None
}

/// `Some(())` once every neighbour of `x` has been assigned.
fn vertex_ready(a: &StableDiskTree, f: &[usize], x: usize) -> Option<()> {
    a.tree.neighbors(x).iter().all(|&y| y < f.len()).then_some(())
}

fn solve_vertex(a: &StableDiskTree, b: &StableDiskTree, f: &[usize], x: usize) -> Option<Mobius> {
    let mut cons = Vec::new();
    for &y in a.tree.neighbors(x) {
        cons.push((*a.nodal.get(&(x, y))?, *b.nodal.get(&(f[x], f[y]))?));
    }
    if x == a.marked_vertex {
        cons.push((a.marked_point, b.marked_point));
    }
    let src = &a.vertices[x];
    let dst = &b.vertices[f[x]];
    let maps = match (&src.map, &dst.map) {
        (Some(u), Some(v)) if u.len() == v.len() => Some((u, v)),
        (Some(_), Some(_)) => return None,
        _ => None,
    };
    let resid = |phi: &Mobius| conjugacy_residual(phi, maps);
    solve_automorphism(&cons, &resid)
}

/// `u(z_k) - v(φ(z_k))` at the sample points, as complex differences. `None`
/// when a sample leaves the disk.
fn conjugacy_residual(phi: &Mobius, maps: Option<(&Vec<BlaschkeConfig>, &Vec<BlaschkeConfig>)>) -> Option<Vec<C64>> {
    let Some((u, v)) = maps else {
        return Some(Vec::new());
    };
    let mut out = Vec::with_capacity(CONJUGACY_SAMPLES * u.len());
    for k in 0..CONJUGACY_SAMPLES {
        let z = unit(2.0 * PI * k as f64 / CONJUGACY_SAMPLES as f64);
        let w = phi.eval(z);
        for (bu, bv) in u.iter().zip(v) {
            out.push(bu.eval(z).ok()? - bv.eval(w).ok()?);
        }
    }
    Some(out)
}

fn sup_norm(r: &[C64]) -> f64 {
    r.iter().map(|x| x.norm()).fold(0.0, f64::max)
}

fn unit(theta: f64) -> C64 {
    C64::new(theta.cos(), theta.sin())
}

/// Angle of `z` in `[0, 2π)`.
fn angle(z: C64) -> f64 {
    let a = z.arg();
    if a < 0.0 {
        a + 2.0 * PI
    } else {
        a
    }
}

type Residual<'a> = dyn Fn(&Mobius) -> Option<Vec<C64>> + 'a;

/// Find `φ ∈ Aut(D)` with `φ(p_i) = q_i` for the constraint pairs and a
/// conjugacy residual within `POINT_TOL`. Three or more constraints determine
/// `φ`; with fewer, the extra boundary images are fitted by a coarse grid
/// followed by Levenberg-Marquardt.
fn solve_automorphism(cons: &[(C64, C64)], resid: &Residual) -> Option<Mobius> {
    let accept = |phi: &Mobius| {
        phi.is_disk_automorphism(POINT_TOL)
            && cons.iter().all(|(p, q)| (phi.eval(*p) - q).norm() <= POINT_TOL)
            && resid(phi).is_some_and(|r| sup_norm(&r) <= POINT_TOL)
    };
    match cons.len() {
        0 => {
            // unreachable for valid data: every disk carries a nodal or the
            // marked point
            let id = Mobius::identity();
            accept(&id).then_some(id)
        }
        1 => {
            let (p, q) = cons[0];
            let src = [p, p * unit(2.0 * PI / 3.0), p * unit(4.0 * PI / 3.0)];
            let build = |t: &[f64]| {
                if !(0.0 < t[0] && t[0] < t[1] && t[1] < 1.0) {
                    return None;
                }
                Mobius::from_three_points(src, [q, q * unit(2.0 * PI * t[0]), q * unit(2.0 * PI * t[1])]).ok()
            };
            fit(2, &build, resid, &[1.0 / 3.0, 2.0 / 3.0]).filter(|phi| accept(phi))
        }
        2 => {
            let (p1, q1) = cons[0];
            let (p2, q2) = cons[1];
            let arc_p = angle(p2 / p1);
            let arc_q = angle(q2 / q1);
            let src = [p1, p1 * unit(0.5 * arc_p), p2];
            let build = |t: &[f64]| {
                if !(0.0 < t[0] && t[0] < 1.0) {
                    return None;
                }
                Mobius::from_three_points(src, [q1, q1 * unit(t[0] * arc_q), q2]).ok()
            };
            fit(1, &build, resid, &[0.5]).filter(|phi| accept(phi))
        }
        _ => {
            let phi = Mobius::from_three_points([cons[0].0, cons[1].0, cons[2].0], [cons[0].1, cons[1].1, cons[2].1]).ok()?;
            accept(&phi).then_some(phi)
        }
    }
}

const GRID: usize = 48;
const FIT_KEEP: usize = 4;
const LM_ITERATIONS: usize = 60;

/// Minimize the conjugacy residual of `build(t)` over `t ∈ (0,1)^dim`: the
/// default point first, then the best few cells of a coarse grid, each
/// polished by Levenberg-Marquardt on the squared residual.
fn fit(dim: usize, build: &dyn Fn(&[f64]) -> Option<Mobius>, resid: &Residual, default: &[f64]) -> Option<Mobius> {
    let eval = |t: &[f64]| -> Option<(Vec<f64>, Mobius)> {
        let phi = build(t)?;
        let r = resid(&phi)?;
        Some((r.iter().flat_map(|c| [c.re, c.im]).collect(), phi))
    };
    let sq = |r: &[f64]| r.iter().map(|x| x * x).sum::<f64>();
    if let Some((r, phi)) = eval(default) {
        if r.chunks(2).all(|c| c[0].hypot(c[1]) <= POINT_TOL * 0.1) {
            return Some(phi);
        }
    }
    let mut cells: Vec<(f64, Vec<f64>)> = Vec::new();
    for idx in 0..GRID.pow(dim as u32) {
        let mut t = Vec::with_capacity(dim);
        let mut r = idx;
        for _ in 0..dim {
            t.push((r % GRID) as f64 / GRID as f64 + 0.5 / GRID as f64);
            r /= GRID;
        }
        if let Some((res, _)) = eval(&t) {
            cells.push((sq(&res), t));
        }
    }
    cells.sort_by(|x, y| x.0.total_cmp(&y.0));
    cells.truncate(FIT_KEEP);
    let mut best: Option<(f64, Mobius)> = None;
    for (_, t0) in cells {
        if let Some((t, e)) = levenberg_marquardt(dim, &eval, t0) {
            if best.as_ref().is_none_or(|b| e < b.0) {
                best = eval(&t).map(|(_, phi)| (e, phi));
            }
        }
        if best.as_ref().is_some_and(|b| b.0 <= (POINT_TOL * 0.1).powi(2)) {
            break;
        }
    }
    best.map(|b| b.1)
}

/// Damped Gauss-Newton with a forward-difference Jacobian, `dim ≤ 2`.
fn levenberg_marquardt(
    dim: usize,
    eval: &dyn Fn(&[f64]) -> Option<(Vec<f64>, Mobius)>,
    mut t: Vec<f64>,
) -> Option<(Vec<f64>, f64)> {
    let sq = |r: &[f64]| r.iter().map(|x| x * x).sum::<f64>();
    let (mut r, _) = eval(&t)?;
    let mut e = sq(&r);
    let mut lambda = 1e-3;
    for _ in 0..LM_ITERATIONS {
        if e <= 1e-30 {
            break;
        }
        let h = 1e-7;
        let mut jac: Vec<Vec<f64>> = Vec::with_capacity(dim);
        for i in 0..dim {
            let mut tp = t.clone();
            tp[i] += h;
            let Some((rp, _)) = eval(&tp).or_else(|| {
                tp[i] = t[i] - h;
                eval(&tp).map(|(rm, phi)| (rm.iter().zip(&r).map(|(m, x)| 2.0 * x - m).collect(), phi))
            }) else {
                return Some((t, e));
            };
            jac.push(rp.iter().zip(&r).map(|(p, x)| (p - x) / h).collect());
        }
        // normal equations (JᵀJ + λ diag) δ = -Jᵀr
        let mut a = [[0.0f64; 2]; 2];
        let mut g = [0.0f64; 2];
        for i in 0..dim {
            g[i] = jac[i].iter().zip(&r).map(|(x, y)| x * y).sum();
            for k in 0..dim {
                a[i][k] = jac[i].iter().zip(&jac[k]).map(|(x, y)| x * y).sum();
            }
        }
        let mut improved = false;
        for _ in 0..12 {
            let mut m = a;
            for i in 0..dim {
                m[i][i] += lambda * a[i][i].max(1e-12);
            }
            let step: Vec<f64> = if dim == 1 {
                vec![-g[0] / m[0][0]]
            } else {
                let det = m[0][0] * m[1][1] - m[0][1] * m[1][0];
                if det.abs() < f64::MIN_POSITIVE {
                    lambda *= 10.0;
                    continue;
                }
                vec![
                    -(m[1][1] * g[0] - m[0][1] * g[1]) / det,
                    -(m[0][0] * g[1] - m[1][0] * g[0]) / det,
                ]
            };
            let cand: Vec<f64> = t.iter().zip(&step).map(|(x, d)| x + d).collect();
            if let Some((rc, _)) = eval(&cand) {
                let ec = sq(&rc);
                if ec < e {
                    t = cand;
                    r = rc;
                    e = ec;
                    lambda = (lambda * 0.3).max(1e-12);
                    improved = true;
                    break;
                }
            }
            lambda *= 10.0;
        }
        if !improved {
            break;
        }
    }
    Some((t, e))
}

/// The hyperbolic one-parameter family in `Aut(D, 1)` through the fixed
/// points `1` and `w`: `ψ_n = M⁻¹∘h_{-rate·n}∘M` with `M(1) = 1` and
/// `M(w) = -1`. Positive rates push the disk towards `w`, negative rates
/// towards 1.
#[derive(Debug, Clone, PartialEq)]
pub struct PsiFamily {
    w: C64,
    rate: f64,
    conj: Mobius,
}

impl PsiFamily {
    pub fn hyperbolic(w: C64, rate: f64) -> Result<Self, TreeError> {
        if (w.norm() - 1.0).abs() > UNIT_TOL || (w - C64::new(1.0, 0.0)).norm() < 1e-6 {
            return Err(TreeError::DegenerateFamily);
        }
        let one = C64::new(1.0, 0.0);
        let mid = unit(0.5 * angle(w));
        let conj = Mobius::from_three_points([one, w, mid], [one, -one, C64::i()])?;
        Ok(PsiFamily { w, rate, conj })
    }

    /// `ψ_n = id` for every `n`.
    pub fn constant_identity() -> Self {
        PsiFamily {
            w: C64::new(-1.0, 0.0),
            rate: 0.0,
            conj: Mobius::identity(),
        }
    }

    pub fn w(&self) -> C64 {
        self.w
    }

    pub fn rate(&self) -> f64 {
        self.rate
    }

    pub fn at(&self, n: u32) -> Mobius {
        let h = Mobius::hyperbolic(-self.rate * n as f64);
        self.conj.inverse().compose(&h).compose(&self.conj)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LimitCase {
    /// `ψ_n → w` away from 1 and `ψ_n⁻¹ → 1` away from `w`.
    First,
    /// `ψ_n → 1` away from `w` and `ψ_n⁻¹ → w` away from 1.
    Second,
}

/// Limit of `u_n(z) = (z_1 φ_{1,n}(z), z_2 φ_{2,n}(z))` in the `(1,1)` class
/// on `T² ⊂ C²` as a two-disk stable tree. Vertex 0 is `u'_∞` in class
/// `(1,0)`, vertex 1 is `u''_∞` in class `(0,1)`.
#[derive(Debug, Clone, PartialEq)]
pub struct GromovT2 {
    pub case: LimitCase,
    pub w: C64,
    pub tree: StableDiskTree,
    /// `|u_marked(1) - (z_1, z_2)|`: the marked point keeps its value.
    pub marked_residual: f64,
    /// `|u'_∞(z_{01}) - u''_∞(z_{10})|`.
    pub node_residual: f64,
    /// Gap between consecutive ends when the two boundary loops are
    /// traversed from the node.
    pub loop_gap: f64,
    /// Winding numbers of the concatenated loop in each coordinate.
    pub windings: Vec<i64>,
    pub energy: f64,
    /// Largest distance of `u'_N, u''_N` from their limits on `|z| ≤ 0.9`.
    pub convergence: f64,
    /// `1 - |ψ_N(0)|`.
    pub escape: f64,
}

impl GromovT2 {
    pub fn matching_holds(&self, tol: f64) -> bool {
        self.marked_residual <= tol
            && self.node_residual <= tol
            && self.loop_gap <= tol
            && self.windings == [1, 1]
            && validate_stable_tree(&self.tree).is_empty()
    }
}

/// `|ψ_N(0)|` must be at least this close to 1.
pub const ESCAPE_TOL: f64 = 1e-6;

/// Extract the limit of the `(1,1)` disks `u'_n(z) = (z_1 z, z_2 ψ_n(z))`,
/// `u''_n(z) = (z_1 ψ_n⁻¹(z), z_2 z)` at step `steps` of the family.
pub fn gromov_limit_t2(z1: C64, z2: C64, family: &PsiFamily, steps: u32) -> Result<GromovT2, TreeError> {
    let psi = family.at(steps);
    let inv = psi.inverse();
    let zero = C64::new(0.0, 0.0);
    let one = C64::new(1.0, 0.0);
    let modulus = psi.eval(zero).norm();
    if modulus < 1.0 - ESCAPE_TOL {
        return Err(TreeError::NotEscaping { modulus });
    }
    // the fixed point other than 1 and whether it attracts
    let w = psi
        .fixed_points()
        .into_iter()
        .max_by(|x, y| (x - one).norm().total_cmp(&(y - one).norm()))
        .ok_or(TreeError::DegenerateFamily)?;
    let w = w / w.norm();
    let case = if psi.derivative(w).norm() < 1.0 {
        LimitCase::First
    } else {
        LimitCase::Second
    };
    let (psi_lim, inv_lim) = match case {
        LimitCase::First => (w, one),
        LimitCase::Second => (one, w),
    };
    let disk = |zeros: Vec<C64>, rot: C64| BlaschkeConfig::new(zeros, rot);
    let u1 = vec![disk(vec![zero], z1)?, disk(Vec::new(), z2 * psi_lim)?];
    let u2 = vec![disk(Vec::new(), z1 * inv_lim)?, disk(vec![zero], z2)?];
    let (node0, node1, marked_vertex) = match case {
        LimitCase::First => (one, w, 1),
        LimitCase::Second => (w, one, 0),
    };
    let class = |d: Vec<i64>| VertexClass::torus(&TorusClass::unit(d));
    let tree = StableDiskTree {
        tree: Tree::path(2)?,
        vertices: vec![
            DiskVertex {
                class: class(vec![1, 0]),
                constant: false,
                map: Some(u1.clone()),
            },
            DiskVertex {
                class: class(vec![0, 1]),
                constant: false,
                map: Some(u2.clone()),
            },
        ],
        nodal: BTreeMap::from([((0, 1), node0), ((1, 0), node1)]),
        marked_vertex,
        marked_point: one,
    };
    let eval = |u: &[BlaschkeConfig], z: C64| -> Result<Vec<C64>, DiskError> { u.iter().map(|b| b.eval(z)).collect() };
    let marked_map = if marked_vertex == 0 { &u1 } else { &u2 };
    let marked_residual = sup_dist(&eval(marked_map, one)?, &[z1, z2]);
    let node_residual = sup_dist(&eval(&u1, node0)?, &eval(&u2, node1)?);

    // traverse u' from its node, then u'' from its node
    let m = 256;
    let mut lp: Vec<Vec<C64>> = Vec::with_capacity(2 * m);
    for (u, start) in [(&u1, node0), (&u2, node1)] {
        for k in 0..m {
            lp.push(eval(u, start * unit(2.0 * PI * k as f64 / m as f64))?);
        }
    }
    let end0 = eval(&u1, node0 * unit(2.0 * PI))?;
    let end1 = eval(&u2, node1 * unit(2.0 * PI))?;
    let loop_gap = sup_dist(&end0, &lp[m]).max(sup_dist(&end1, &lp[0]));
    let windings = (0..2)
        .map(|c| {
            let coord: Vec<C64> = lp.iter().map(|p| p[c]).collect();
            winding_number(&coord)
        })
        .collect::<Result<Vec<_>, _>>()?;

    let mut convergence = 0.0f64;
    for r in [0.0, 0.45, 0.9] {
        for k in 0..32 {
            let z = unit(2.0 * PI * k as f64 / 32.0) * r;
            let a = [z1 * z, z2 * psi.eval(z)];
            let b = [z1 * inv.eval(z), z2 * z];
            convergence = convergence.max(sup_dist(&a, &eval(&u1, z)?));
            convergence = convergence.max(sup_dist(&b, &eval(&u2, z)?));
        }
    }
    Ok(GromovT2 {
        case,
        w,
        energy: tree_energy(&tree),
        tree,
        marked_residual,
        node_residual,
        loop_gap,
        windings,
        convergence,
        escape: 1.0 - modulus,
    })
}
