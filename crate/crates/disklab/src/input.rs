//! JSON and CSV input formats.
//!
//! Coefficients are exact rationals written as strings (`"3/2"`) or JSON
//! integers. Complex numbers are `[re, im]` pairs.

use std::collections::{BTreeMap, BTreeSet};
use std::fs;
use std::path::{Path, PathBuf};

use disklab_core::disks::{BlaschkeConfig, LagrangianFrameLoop, TorusClass, C64};
use disklab_core::filtered::{ClassId, FilteredElement};
use disklab_core::graded::{Element, GradedSpace, Word};
use disklab_core::linfty::{LInftyAlgebra, MultilinearOp};
use disklab_core::rational::{parse_q, Q};
use disklab_core::trees::{DiskVertex, StableDiskTree, Tree, VertexClass};
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Any problem with user input; maps to exit code 2.
#[derive(Debug, Error)]
pub enum InputError {
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error("{path}: line {line}, column {column}: {msg}")]
    Json { path: PathBuf, line: usize, column: usize, msg: String },
    #[error("{path}: {msg}")]
    Csv { path: PathBuf, msg: String },
    #[error("{path}: {msg}")]
    Invalid { path: PathBuf, msg: String },
    #[error("{0}")]
    Argument(String),
}

fn invalid(path: &Path, msg: impl ToString) -> InputError {
    InputError::Invalid { path: path.to_path_buf(), msg: msg.to_string() }
}

pub fn read_json<T: DeserializeOwned>(path: &Path) -> Result<T, InputError> {
    let text = fs::read_to_string(path).map_err(|source| InputError::Io { path: path.to_path_buf(), source })?;
    serde_json::from_str(&text).map_err(|e| InputError::Json {
        path: path.to_path_buf(),
        line: e.line(),
        column: e.column(),
        msg: e.to_string(),
    })
}

/// An exact coefficient: a JSON integer or a `"p/q"` string.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Coeff {
    Int(i64),
    Text(String),
}

impl Coeff {
    fn value(&self) -> Option<Q> {
        match self {
            Coeff::Int(n) => Some(Q::from_integer((*n).into())),
            Coeff::Text(s) => parse_q(s),
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct GeneratorSpec {
    pub name: String,
    pub degree: i64,
    #[serde(default)]
    pub weight: i64,
}

/// One table entry: the operation on `inputs` is the combination `output`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct EntrySpec {
    pub inputs: Vec<String>,
    pub output: Vec<(String, Coeff)>,
}

/// An L∞ algebra of degree `degree`. `ops` are the bar-side maps `ℓ_k` on
/// symmetric words of `C[-d-1]`; `lambda_ops` are the maps `λ_k` on
/// `Λ^k(C[-d])`. Both may be given; entries add up.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct AlgebraSpec {
    pub degree: i64,
    pub generators: Vec<GeneratorSpec>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub ops: Vec<EntrySpec>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub lambda_ops: Vec<EntrySpec>,
}

fn letters(space: &GradedSpace, names: &[String], path: &Path) -> Result<Vec<usize>, InputError> {
    names.iter().map(|n| space.index_of(n).map_err(|e| invalid(path, e))).collect()
}

fn output(space: &GradedSpace, out: &[(String, Coeff)], path: &Path) -> Result<Vec<(usize, Q)>, InputError> {
    out.iter()
        .map(|(n, c)| {
            let g = space.index_of(n).map_err(|e| invalid(path, e))?;
            let c = c.value().ok_or_else(|| invalid(path, format!("bad coefficient {c:?} for `{n}`")))?;
            Ok((g, c))
        })
        .collect()
}

impl AlgebraSpec {
    pub fn build(&self, path: &Path) -> Result<LInftyAlgebra, InputError> {
        let space = GradedSpace::new(self.generators.iter().map(|g| (g.name.clone(), g.degree)))
            .map_err(|e| invalid(path, e))?;
        let weights = self.generators.iter().map(|g| g.weight).collect();
        let mut lambda = Vec::new();
        for e in &self.lambda_ops {
            let l = letters(&space, &e.inputs, path)?;
            lambda.push((l.len(), l, output(&space, &e.output, path)?));
        }
        let from_lambda =
            LInftyAlgebra::from_lambda(space.clone(), self.degree, lambda, None).map_err(|e| invalid(path, e))?;
        let shift = from_lambda.bar_shift();
        let mut by_arity: BTreeMap<usize, Vec<(Vec<usize>, Element)>> = BTreeMap::new();
        for e in &self.ops {
            let l = letters(&space, &e.inputs, path)?;
            let mut value = Element::zero();
            for (g, c) in output(&space, &e.output, path)? {
                value.add_term(Word::symmetric(vec![g], shift), c);
            }
            by_arity.entry(l.len()).or_default().push((l, value));
        }
        let mut ops = Vec::new();
        let arities: BTreeSet<usize> =
            by_arity.keys().copied().chain(from_lambda.ops().map(|o| o.arity())).collect();
        for k in arities {
            let mut op = MultilinearOp::new(&space, shift, &space, shift, k, -1, by_arity.remove(&k).unwrap_or_default())
                .map_err(|e| invalid(path, e))?;
            if let Some(l) = from_lambda.op(k) {
                for (key, v) in l.table() {
                    let mut sum = op.get(key).cloned().unwrap_or_else(Element::zero);
                    sum.add_assign(v);
                    op.set_entry(key.clone(), sum);
                }
            }
            ops.push(op);
        }
        LInftyAlgebra::new(space, self.degree, ops, Some(weights)).map_err(|e| invalid(path, e))
    }

    /// Bar-form description of an algebra, as read back by [`AlgebraSpec::build`].
    pub fn describe(alg: &LInftyAlgebra) -> Self {
        let space = alg.space();
        let generators = (0..space.len())
            .map(|g| GeneratorSpec { name: space.name(g).to_string(), degree: space.degree(g), weight: alg.weight(g) })
            .collect();
        let mut ops = Vec::new();
        for op in alg.ops() {
            for (key, value) in op.table() {
                ops.push(EntrySpec {
                    inputs: key.letters.iter().map(|&l| space.name(l).to_string()).collect(),
                    output: value
                        .iter()
                        .map(|(w, c)| (space.name(w.letters[0]).to_string(), Coeff::Text(format_coeff(c))))
                        .collect(),
                });
            }
        }
        AlgebraSpec { degree: alg.degree(), generators, ops, lambda_ops: Vec::new() }
    }
}

pub fn format_coeff(c: &Q) -> String {
    if c.is_integer() {
        c.numer().to_string()
    } else {
        format!("{}/{}", c.numer(), c.denom())
    }
}

pub fn load_algebra(path: &Path) -> Result<LInftyAlgebra, InputError> {
    read_json::<AlgebraSpec>(path)?.build(path)
}

/// A linear combination of generators, read as an element of the bar space
/// and bucketed by filtration weight.
#[derive(Debug, Clone, Deserialize)]
pub struct ElementSpec {
    pub terms: Vec<(String, Coeff)>,
}

pub fn load_element(path: &Path, alg: &LInftyAlgebra, trunc: i64) -> Result<FilteredElement, InputError> {
    let spec: ElementSpec = read_json(path)?;
    let mut e = Element::zero();
    for (g, c) in output(alg.space(), &spec.terms, path)? {
        e.add_term(alg.bar_letter(g), c);
    }
    FilteredElement::from_element(alg, &e, trunc).map_err(|err| invalid(path, err))
}

fn complex(p: [f64; 2]) -> C64 {
    C64::new(p[0], p[1])
}

/// A loop of `n×n` unitary frames, each row-major as `[re, im]` pairs.
#[derive(Debug, Clone, Deserialize)]
pub struct FramesSpec {
    pub n: usize,
    pub frames: Vec<Vec<[f64; 2]>>,
}

/// Frames from JSON, or from CSV with one frame per row of `2n²`
/// interleaved real and imaginary parts.
pub fn load_frames(path: &Path) -> Result<LagrangianFrameLoop, InputError> {
    let (n, frames) = if is_csv(path) {
        let rows = read_csv_rows(path)?;
        let width = rows.first().map_or(0, Vec::len);
        let n = (width / 2).isqrt();
        if width == 0 || 2 * n * n != width {
            return Err(InputError::Csv { path: path.to_path_buf(), msg: format!("row width {width} is not 2n²") });
        }
        let frames = rows.iter().map(|r| r.chunks(2).map(|c| C64::new(c[0], c[1])).collect()).collect();
        (n, frames)
    } else {
        let spec: FramesSpec = read_json(path)?;
        (spec.n, spec.frames.into_iter().map(|f| f.into_iter().map(complex).collect()).collect())
    };
    LagrangianFrameLoop::new(n, frames).map_err(|e| invalid(path, e))
}

/// Boundary samples `(θ, u)` for the Stokes bound, from CSV rows
/// `theta,re,im` or JSON `{"samples": [[theta, re, im], ...]}`.
pub fn load_samples(path: &Path) -> Result<Vec<(f64, C64)>, InputError> {
    let rows = if is_csv(path) {
        read_csv_rows(path)?
    } else {
        #[derive(Deserialize)]
        struct S {
            samples: Vec<[f64; 3]>,
        }
        read_json::<S>(path)?.samples.into_iter().map(|r| r.to_vec()).collect()
    };
    rows.iter()
        .enumerate()
        .map(|(i, r)| match r[..] {
            [t, re, im] => Ok((t, C64::new(re, im))),
            _ => Err(InputError::Csv { path: path.to_path_buf(), msg: format!("row {}: expected 3 fields", i + 1) }),
        })
        .collect()
}

fn is_csv(path: &Path) -> bool {
    path.extension().is_some_and(|e| e.eq_ignore_ascii_case("csv"))
}

/// Numeric CSV rows; a header line is skipped when its first field does not
/// parse as a number.
fn read_csv_rows(path: &Path) -> Result<Vec<Vec<f64>>, InputError> {
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(false)
        .trim(csv::Trim::All)
        .comment(Some(b'#'))
        .from_path(path)
        .map_err(|e| InputError::Csv { path: path.to_path_buf(), msg: e.to_string() })?;
    let mut rows = Vec::new();
    for (i, rec) in rdr.records().enumerate() {
        let rec = rec.map_err(|e| InputError::Csv { path: path.to_path_buf(), msg: e.to_string() })?;
        let line = rec.position().map_or(i as u64 + 1, |p| p.line());
        if i == 0 && rec.get(0).is_some_and(|f| f.parse::<f64>().is_err()) {
            continue;
        }
        let row = rec
            .iter()
            .enumerate()
            .map(|(col, f)| {
                f.parse::<f64>().map_err(|_| InputError::Csv {
                    path: path.to_path_buf(),
                    msg: format!("line {line}, field {}: `{f}` is not a number", col + 1),
                })
            })
            .collect::<Result<Vec<_>, _>>()?;
        if rows.first().is_some_and(|r: &Vec<f64>| r.len() != row.len()) {
            return Err(InputError::Csv { path: path.to_path_buf(), msg: format!("line {line}: ragged row") });
        }
        rows.push(row);
    }
    if rows.is_empty() {
        return Err(InputError::Csv { path: path.to_path_buf(), msg: "no data rows".into() });
    }
    Ok(rows)
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct BlaschkeSpec {
    #[serde(default)]
    pub zeros: Vec<[f64; 2]>,
    pub rotation: [f64; 2],
}

impl BlaschkeSpec {
    pub fn build(&self) -> Result<BlaschkeConfig, disklab_core::disks::DiskError> {
        BlaschkeConfig::new(self.zeros.iter().copied().map(complex).collect(), complex(self.rotation))
    }

    pub fn describe(b: &BlaschkeConfig) -> Self {
        BlaschkeSpec {
            zeros: b.zeros().iter().map(|z| [z.re, z.im]).collect(),
            rotation: [b.rotation().re, b.rotation().im],
        }
    }
}

pub fn load_blaschke(path: &Path) -> Result<BlaschkeConfig, InputError> {
    read_json::<BlaschkeSpec>(path)?.build().map_err(|e| invalid(path, e))
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct VertexSpec {
    /// Torus class `(d_1,…,d_n)`; all zero for a constant disk.
    pub degrees: Vec<i64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub radii: Option<Vec<f64>>,
    #[serde(default)]
    pub constant: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub map: Option<Vec<BlaschkeSpec>>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct NodalSpec {
    pub from: usize,
    pub to: usize,
    pub point: [f64; 2],
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct MarkedSpec {
    pub vertex: usize,
    pub point: [f64; 2],
}

/// A stable tree of disks.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TreeSpec {
    pub vertices: Vec<VertexSpec>,
    #[serde(default)]
    pub edges: Vec<(usize, usize)>,
    #[serde(default)]
    pub nodal: Vec<NodalSpec>,
    pub marked: MarkedSpec,
}

impl TreeSpec {
    pub fn build(&self, path: &Path) -> Result<StableDiskTree, InputError> {
        let tree = Tree::new(self.vertices.len(), &self.edges).map_err(|e| invalid(path, e))?;
        let vertices = self
            .vertices
            .iter()
            .enumerate()
            .map(|(i, v)| {
                let radii = v.radii.clone().unwrap_or_else(|| vec![1.0; v.degrees.len()]);
                let class = TorusClass::new(v.degrees.clone(), radii).map_err(|e| invalid(path, format!("vertex {i}: {e}")))?;
                let map = v
                    .map
                    .as_ref()
                    .map(|m| m.iter().map(BlaschkeSpec::build).collect::<Result<Vec<_>, _>>())
                    .transpose()
                    .map_err(|e| invalid(path, format!("vertex {i}: {e}")))?;
                Ok(DiskVertex { class: VertexClass::torus(&class), constant: v.constant, map })
            })
            .collect::<Result<Vec<_>, InputError>>()?;
        let mut nodal = BTreeMap::new();
        for n in &self.nodal {
            if nodal.insert((n.from, n.to), complex(n.point)).is_some() {
                return Err(invalid(path, format!("duplicate nodal point {} -> {}", n.from, n.to)));
            }
        }
        Ok(StableDiskTree {
            tree,
            vertices,
            nodal,
            marked_vertex: self.marked.vertex,
            marked_point: complex(self.marked.point),
        })
    }

    pub fn describe(st: &StableDiskTree) -> Self {
        TreeSpec {
            vertices: st
                .vertices
                .iter()
                .map(|v| {
                    let degrees = match &v.class.id {
                        ClassId::Torus(d) => d.clone(),
                        ClassId::Opaque(_) => Vec::new(),
                    };
                    VertexSpec {
                        degrees,
                        radii: None,
                        constant: v.constant,
                        map: v.map.as_ref().map(|m| m.iter().map(BlaschkeSpec::describe).collect()),
                    }
                })
                .collect(),
            edges: st.tree.edges(),
            nodal: st
                .nodal
                .iter()
                .map(|(&(from, to), z)| NodalSpec { from, to, point: [z.re, z.im] })
                .collect(),
            marked: MarkedSpec { vertex: st.marked_vertex, point: [st.marked_point.re, st.marked_point.im] },
        }
    }
}

pub fn load_tree(path: &Path) -> Result<StableDiskTree, InputError> {
    read_json::<TreeSpec>(path)?.build(path)
}
