//! Numerical geometry of holomorphic disks with Lagrangian boundary:
//! Maslov index of frame loops, taming, energy of torus classes, Blaschke
//! products and their degenerations, the Stokes-type boundary bound.
//!
//! Everything here is `f64` with explicit tolerances. Integer invariants
//! are only rounded when they sit within [`INTEGER_TOL`] of an integer.

use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::PI;

use num_complex::Complex;
// float methods for no_std; unused when a dependency links std
#[allow(unused_imports)]
use num_traits::Float;
use thiserror::Error;

pub type C64 = Complex<f64>;

/// Tolerance for algebraic identities (unitarity, `J² = -1`).
pub const ALGEBRAIC_TOL: f64 = 1e-10;
/// Distance to an integer below which a winding number is rounded.
pub const INTEGER_TOL: f64 = 1e-6;
/// Largest modulus of an interior Blaschke zero.
pub const INTERIOR_TOL: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum DiskError {
    #[error("empty loop")]
    EmptyLoop,
    #[error("frame {index} is not {n}x{n}")]
    FrameShape { index: usize, n: usize },
    #[error("frame {index} is not unitary (defect {defect:e})")]
    NotUnitary { index: usize, defect: f64 },
    #[error("phase jump of {jump} rad between samples {index} and {next}: loop is undersampled")]
    Undersampled { index: usize, next: usize, jump: f64 },
    #[error("winding {value} is not within {INTEGER_TOL:e} of an integer")]
    NotInteger { value: f64 },
    #[error("sample {index} vanishes, no phase")]
    ZeroSample { index: usize },
    #[error("matrix is {rows}x{cols}, expected square of even size {expected}")]
    MatrixShape { rows: usize, cols: usize, expected: usize },
    #[error("J^2 + 1 has size {defect:e}")]
    NotComplexStructure { defect: f64 },
    #[error("omega is not antisymmetric (defect {defect:e})")]
    NotAntisymmetric { defect: f64 },
    #[error("omega is singular")]
    SingularOmega,
    #[error("zero {index} at {re}+{im}i is not in the open disk")]
    ZeroNotInterior { index: usize, re: f64, im: f64 },
    #[error("rotation has modulus {modulus}, expected 1")]
    RotationNotUnit { modulus: f64 },
    #[error("point has modulus {modulus} > 1")]
    OutsideDisk { modulus: f64 },
    #[error("degrees and radii differ in length ({degrees} vs {radii})")]
    ClassShape { degrees: usize, radii: usize },
    #[error("radius {index} is not positive")]
    NonPositiveRadius { index: usize },
    #[error("sampling too coarse: {reason}")]
    StokesUndersampled { reason: &'static str },
    #[error("sample {index} has modulus {modulus} > 1")]
    SampleOutsideDisk { index: usize, modulus: f64 },
    #[error("angles must increase strictly inside [0, 2pi) (sample {index})")]
    AnglesNotIncreasing { index: usize },
    #[error("need at least two steps with the same number of zeros")]
    SequenceShape,
    #[error("zero {index} moved by {step:e} in the last step; not converged")]
    NotConvergent { index: usize, step: f64 },
    #[error("Moebius data degenerate")]
    DegenerateMobius,
}

fn unit(theta: f64) -> C64 {
    C64::new(theta.cos(), theta.sin())
}

/// Determinant of an `n×n` row-major complex matrix, by elimination with
/// partial pivoting.
pub fn complex_det(n: usize, m: &[C64]) -> C64 {
    let mut a = m.to_vec();
    let mut det = C64::new(1.0, 0.0);
    for c in 0..n {
        let p = (c..n)
            .max_by(|&i, &j| a[i * n + c].norm().total_cmp(&a[j * n + c].norm()))
            .unwrap_or(c);
        if a[p * n + c].norm() == 0.0 {
            return C64::new(0.0, 0.0);
        }
        if p != c {
            for j in 0..n {
                a.swap(p * n + j, c * n + j);
            }
            det = -det;
        }
        let piv = a[c * n + c];
        det *= piv;
        for i in c + 1..n {
            let f = a[i * n + c] / piv;
            for j in c..n {
                let v = a[c * n + j] * f;
                a[i * n + j] -= v;
            }
        }
    }
    det
}

/// Total winding of a closed sampled loop in `C \ {0}` around the origin,
/// unwrapped sample by sample. Jumps of `π` or more are rejected.
pub fn winding_number(samples: &[C64]) -> Result<i64, DiskError> {
    let total = unwrapped_phase(samples)?;
    round_winding(total / (2.0 * PI))
}

fn unwrapped_phase(samples: &[C64]) -> Result<f64, DiskError> {
    if samples.is_empty() {
        return Err(DiskError::EmptyLoop);
    }
    if let Some(index) = samples.iter().position(|z| z.norm() == 0.0) {
        return Err(DiskError::ZeroSample { index });
    }
    let m = samples.len();
    let mut total = 0.0;
    for k in 0..m {
        let next = (k + 1) % m;
        let jump = (samples[next] / samples[k]).arg();
        if jump.abs() >= PI * (1.0 - 1e-12) {
            return Err(DiskError::Undersampled { index: k, next, jump });
        }
        total += jump;
    }
    Ok(total)
}

fn round_winding(x: f64) -> Result<i64, DiskError> {
    let r = x.round();
    if (x - r).abs() > INTEGER_TOL {
        return Err(DiskError::NotInteger { value: x });
    }
    Ok(r as i64)
}

/// A closed loop of unitary frames, each spanning a Lagrangian subspace
/// `U·R^n ⊂ C^n`. Frames are row-major `n×n`.
#[derive(Debug, Clone, PartialEq)]
pub struct LagrangianFrameLoop {
    n: usize,
    frames: Vec<Vec<C64>>,
}

impl LagrangianFrameLoop {
    pub fn new(n: usize, frames: Vec<Vec<C64>>) -> Result<Self, DiskError> {
        if frames.is_empty() || n == 0 {
            return Err(DiskError::EmptyLoop);
        }
        for (index, u) in frames.iter().enumerate() {
            if u.len() != n * n {
                return Err(DiskError::FrameShape { index, n });
            }
            let defect = unitarity_defect(n, u);
            if defect > ALGEBRAIC_TOL {
                return Err(DiskError::NotUnitary { index, defect });
            }
        }
        Ok(LagrangianFrameLoop { n, frames })
    }

    /// The same frame `m` times.
    pub fn constant(n: usize, frame: Vec<C64>, m: usize) -> Result<Self, DiskError> {
        Self::new(n, vec![frame; m])
    }

    /// Tangent lines `i·e^{idθ}` of the circle `S¹ ⊂ C` along its degree-`d`
    /// cover, sampled at `m` points.
    pub fn circle(d: i64, m: usize) -> Self {
        let frames = (0..m)
            .map(|k| {
                let theta = 2.0 * PI * k as f64 / m as f64;
                vec![C64::i() * unit(d as f64 * theta)]
            })
            .collect();
        LagrangianFrameLoop { n: 1, frames }
    }

    /// Boundary frames of a torus class `(d_1,…,d_n)` on the product torus.
    pub fn torus(degrees: &[i64], m: usize) -> Self {
        let loops: Vec<_> = degrees.iter().map(|&d| Self::circle(d, m)).collect();
        Self::block_diagonal(&loops).expect("circle loops share a sample count")
    }

    /// Frame-wise block sum of loops with equal sample counts.
    pub fn block_diagonal(loops: &[LagrangianFrameLoop]) -> Result<Self, DiskError> {
        let m = loops.first().map_or(0, |l| l.len());
        if m == 0 || loops.iter().any(|l| l.len() != m) {
            return Err(DiskError::EmptyLoop);
        }
        let n: usize = loops.iter().map(|l| l.n).sum();
        let frames = (0..m)
            .map(|k| {
                let mut u = vec![C64::new(0.0, 0.0); n * n];
                let mut off = 0;
                for l in loops {
                    for i in 0..l.n {
                        for j in 0..l.n {
                            u[(off + i) * n + off + j] = l.frames[k][i * l.n + j];
                        }
                    }
                    off += l.n;
                }
                u
            })
            .collect();
        Ok(LagrangianFrameLoop { n, frames })
    }

    /// Traverse `self`, then `other`. Both must start at the same frame.
    pub fn concat(&self, other: &LagrangianFrameLoop) -> Result<Self, DiskError> {
        if self.n != other.n {
            return Err(DiskError::FrameShape { index: self.len(), n: self.n });
        }
        let mut frames = self.frames.clone();
        frames.extend(other.frames.iter().cloned());
        Ok(LagrangianFrameLoop { n: self.n, frames })
    }

    /// The loop traversed backwards, starting at the same frame.
    pub fn reversed(&self) -> Self {
        let mut frames = self.frames.clone();
        frames[1..].reverse();
        LagrangianFrameLoop { n: self.n, frames }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn len(&self) -> usize {
        self.frames.len()
    }

    pub fn is_empty(&self) -> bool {
        self.frames.is_empty()
    }

    pub fn frames(&self) -> &[Vec<C64>] {
        &self.frames
    }

    /// `det²` of every frame.
    pub fn det_squared(&self) -> Vec<C64> {
        self.frames
            .iter()
            .map(|u| {
                let d = complex_det(self.n, u);
                d * d
            })
            .collect()
    }
}

fn unitarity_defect(n: usize, u: &[C64]) -> f64 {
    let mut worst = 0.0f64;
    for i in 0..n {
        for j in 0..n {
            let mut s = C64::new(0.0, 0.0);
            for k in 0..n {
                s += u[k * n + i].conj() * u[k * n + j];
            }
            if i == j {
                s -= 1.0;
            }
            worst = worst.max(s.norm());
        }
    }
    worst
}

/// Winding number of `det²` along the loop.
pub fn maslov_index(lp: &LagrangianFrameLoop) -> Result<i64, DiskError> {
    winding_number(&lp.det_squared())
}

/// A real `2n×2n` matrix with `J² = -1`, row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct AlmostComplexStructure {
    dim: usize,
    j: Vec<f64>,
}

impl AlmostComplexStructure {
    pub fn new(dim: usize, j: Vec<f64>) -> Result<Self, DiskError> {
        if !dim.is_multiple_of(2) || dim == 0 || j.len() != dim * dim {
            return Err(DiskError::MatrixShape {
                rows: dim,
                cols: j.len().checked_div(dim).unwrap_or(0),
                expected: dim + dim % 2,
            });
        }
        let sq = mat_mul(dim, &j, &j);
        let mut defect = 0.0f64;
        for i in 0..dim {
            for k in 0..dim {
                let want = if i == k { -1.0 } else { 0.0 };
                defect = defect.max((sq[i * dim + k] - want).abs());
            }
        }
        if defect > ALGEBRAIC_TOL {
            return Err(DiskError::NotComplexStructure { defect });
        }
        Ok(AlmostComplexStructure { dim, j })
    }

    /// `J_0` on `C^n = R^{2n}`, coordinates `(x_1, y_1, …)`.
    pub fn standard(n: usize) -> Self {
        let dim = 2 * n;
        let mut j = vec![0.0; dim * dim];
        for b in 0..n {
            j[(2 * b + 1) * dim + 2 * b] = 1.0;
            j[(2 * b) * dim + 2 * b + 1] = -1.0;
        }
        AlmostComplexStructure { dim, j }
    }

    pub fn negated(&self) -> Self {
        AlmostComplexStructure {
            dim: self.dim,
            j: self.j.iter().map(|x| -x).collect(),
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn matrix(&self) -> &[f64] {
        &self.j
    }
}

/// `J_α = (J_0 0; A J_0)` on `C^2` with `A = diag(α, -α)`.
pub fn j_alpha(alpha: f64) -> AlmostComplexStructure {
    let mut j = AlmostComplexStructure::standard(2).j;
    j[2 * 4] = alpha;
    j[3 * 4 + 1] = -alpha;
    AlmostComplexStructure::new(4, j).expect("J_alpha squares to -1 for every alpha")
}

/// The standard symplectic form on `R^{2n}` scaled blockwise:
/// `scales[b]·ω_0` on the `b`-th complex coordinate.
pub fn scaled_standard_omega(scales: &[f64]) -> Vec<f64> {
    let dim = 2 * scales.len();
    let mut w = vec![0.0; dim * dim];
    for (b, s) in scales.iter().enumerate() {
        w[(2 * b) * dim + 2 * b + 1] = *s;
        w[(2 * b + 1) * dim + 2 * b] = -*s;
    }
    w
}

pub fn standard_omega(n: usize) -> Vec<f64> {
    scaled_standard_omega(&vec![1.0; n])
}

fn mat_mul(n: usize, a: &[f64], b: &[f64]) -> Vec<f64> {
    let mut out = vec![0.0; n * n];
    for i in 0..n {
        for k in 0..n {
            let x = a[i * n + k];
            if x != 0.0 {
                for j in 0..n {
                    out[i * n + j] += x * b[k * n + j];
                }
            }
        }
    }
    out
}

fn real_det(n: usize, m: &[f64]) -> f64 {
    let c: Vec<C64> = m.iter().map(|&x| C64::new(x, 0.0)).collect();
    complex_det(n, &c).re
}

/// `g_J(v,w) = ½(ω(v,Jw) + ω(w,Jv))` as a symmetric matrix.
pub fn taming_metric(j: &AlmostComplexStructure, omega: &[f64]) -> Result<Vec<f64>, DiskError> {
    let n = j.dim;
    if omega.len() != n * n {
        return Err(DiskError::MatrixShape {
            rows: omega.len() / n.max(1),
            cols: n,
            expected: n,
        });
    }
    let mut defect = 0.0f64;
    let mut scale = 0.0f64;
    for i in 0..n {
        for k in 0..n {
            defect = defect.max((omega[i * n + k] + omega[k * n + i]).abs());
            scale = scale.max(omega[i * n + k].abs());
        }
    }
    if defect > ALGEBRAIC_TOL * scale.max(1.0) {
        return Err(DiskError::NotAntisymmetric { defect });
    }
    if scale == 0.0 || real_det(n, omega).abs() <= 1e-12 * scale.powi(n as i32) {
        return Err(DiskError::SingularOmega);
    }
    let oj = mat_mul(n, omega, &j.j);
    let mut g = vec![0.0; n * n];
    for i in 0..n {
        for k in 0..n {
            g[i * n + k] = 0.5 * (oj[i * n + k] + oj[k * n + i]);
        }
    }
    Ok(g)
}

/// Whether `ω(v, Jv) > 0` for all `v ≠ 0`, decided by a Cholesky
/// factorization of `g_J`.
pub fn is_tamed(j: &AlmostComplexStructure, omega: &[f64]) -> Result<bool, DiskError> {
    let g = taming_metric(j, omega)?;
    Ok(is_positive_definite(j.dim, &g))
}

/// Cholesky test with a relative pivot floor.
pub fn is_positive_definite(n: usize, g: &[f64]) -> bool {
    let scale = g.iter().fold(0.0f64, |m, x| m.max(x.abs())).max(f64::MIN_POSITIVE);
    let mut l = vec![0.0; n * n];
    for i in 0..n {
        for k in 0..=i {
            let mut s = g[i * n + k];
            for p in 0..k {
                s -= l[i * n + p] * l[k * n + p];
            }
            if i == k {
                if s <= 1e-12 * scale {
                    return false;
                }
                l[i * n + i] = s.sqrt();
            } else {
                l[i * n + k] = s / l[k * n + k];
            }
        }
    }
    true
}

/// A class in `π_2(C^n, T^n)` for the product torus of circles of the given
/// radii.
#[derive(Debug, Clone, PartialEq)]
pub struct TorusClass {
    degrees: Vec<i64>,
    radii: Vec<f64>,
}

impl TorusClass {
    pub fn new(degrees: Vec<i64>, radii: Vec<f64>) -> Result<Self, DiskError> {
        if degrees.len() != radii.len() {
            return Err(DiskError::ClassShape {
                degrees: degrees.len(),
                radii: radii.len(),
            });
        }
        if let Some(index) = radii.iter().position(|r| r.partial_cmp(&0.0) != Some(core::cmp::Ordering::Greater)) {
            return Err(DiskError::NonPositiveRadius { index });
        }
        Ok(TorusClass { degrees, radii })
    }

    /// Unit radii.
    pub fn unit(degrees: Vec<i64>) -> Self {
        let radii = vec![1.0; degrees.len()];
        TorusClass { degrees, radii }
    }

    pub fn degrees(&self) -> &[i64] {
        &self.degrees
    }

    pub fn radii(&self) -> &[f64] {
        &self.radii
    }

    pub fn maslov(&self) -> i64 {
        2 * self.degrees.iter().sum::<i64>()
    }
}

/// `E = π Σ d_i r_i²`.
pub fn torus_energy(class: &TorusClass) -> f64 {
    PI * class
        .degrees
        .iter()
        .zip(&class.radii)
        .map(|(&d, r)| d as f64 * r * r)
        .sum::<f64>()
}

/// Smallest positive energy among the given classes.
pub fn min_energy(classes: &[TorusClass]) -> Option<f64> {
    classes
        .iter()
        .map(torus_energy)
        .filter(|e| *e > 0.0)
        .min_by(f64::total_cmp)
}

/// Finite Blaschke product `z ↦ ρ Π e^{-iθ_j}(z - z_j)/(1 - z̄_j z)` with
/// `θ_j = arg((1 - z_j)/(1 - z̄_j))`, so that `φ(1) = ρ`.
#[derive(Debug, Clone, PartialEq)]
pub struct BlaschkeConfig {
    zeros: Vec<C64>,
    rotation: C64,
    /// `e^{-iθ_j}` per zero.
    phases: Vec<C64>,
}

impl BlaschkeConfig {
    pub fn new(zeros: Vec<C64>, rotation: C64) -> Result<Self, DiskError> {
        for (index, z) in zeros.iter().enumerate() {
            if z.norm() > 1.0 - INTERIOR_TOL {
                return Err(DiskError::ZeroNotInterior {
                    index,
                    re: z.re,
                    im: z.im,
                });
            }
        }
        if (rotation.norm() - 1.0).abs() > ALGEBRAIC_TOL {
            return Err(DiskError::RotationNotUnit {
                modulus: rotation.norm(),
            });
        }
        let one = C64::new(1.0, 0.0);
        let phases = zeros
            .iter()
            .map(|z| unit(-((one - z) / (one - z.conj())).arg()))
            .collect();
        Ok(BlaschkeConfig {
            zeros,
            rotation,
            phases,
        })
    }

    /// The constant map with value `rotation`.
    pub fn constant(rotation: C64) -> Result<Self, DiskError> {
        Self::new(Vec::new(), rotation)
    }

    pub fn degree(&self) -> usize {
        self.zeros.len()
    }

    pub fn zeros(&self) -> &[C64] {
        &self.zeros
    }

    pub fn rotation(&self) -> C64 {
        self.rotation
    }

    fn factor(&self, j: usize, z: C64) -> C64 {
        let zj = self.zeros[j];
        self.phases[j] * (z - zj) / (C64::new(1.0, 0.0) - zj.conj() * z)
    }

    fn factor_derivative(&self, j: usize, z: C64) -> C64 {
        let zj = self.zeros[j];
        let den = C64::new(1.0, 0.0) - zj.conj() * z;
        self.phases[j] * (1.0 - zj.norm_sqr()) / (den * den)
    }

    /// `φ(z)` for `|z| ≤ 1`.
    pub fn eval(&self, z: C64) -> Result<C64, DiskError> {
        check_closed_disk(z)?;
        Ok(self.eval_unchecked(z))
    }

    fn eval_unchecked(&self, z: C64) -> C64 {
        (0..self.degree()).fold(self.rotation, |acc, j| acc * self.factor(j, z))
    }

    /// `φ'(z)` for `|z| ≤ 1`, by the product rule.
    pub fn derivative(&self, z: C64) -> Result<C64, DiskError> {
        check_closed_disk(z)?;
        Ok(self.derivative_unchecked(z))
    }

    fn derivative_unchecked(&self, z: C64) -> C64 {
        let d = self.degree();
        let f: Vec<C64> = (0..d).map(|j| self.factor(j, z)).collect();
        let mut total = C64::new(0.0, 0.0);
        for j in 0..d {
            let mut term = self.factor_derivative(j, z);
            for (i, fi) in f.iter().enumerate() {
                if i != j {
                    term *= fi;
                }
            }
            total += term;
        }
        total * self.rotation
    }

    /// `φ(e^{2πik/m})`, `k = 0..m`.
    pub fn boundary(&self, m: usize) -> Vec<C64> {
        (0..m)
            .map(|k| self.eval_unchecked(unit(2.0 * PI * k as f64 / m as f64)))
            .collect()
    }

    /// `φ∘ψ_c`, again normalized at 1: zeros `ψ_c⁻¹(z_j)`, same rotation
    /// since `ψ_c(1) = 1`.
    pub fn precompose_psi(&self, c: C64) -> Result<Self, DiskError> {
        let inv = Mobius::psi(c)?.inverse();
        let zeros = self.zeros.iter().map(|&z| inv.eval(z)).collect();
        Self::new(zeros, self.rotation)
    }
}

fn check_closed_disk(z: C64) -> Result<(), DiskError> {
    if z.norm() > 1.0 + ALGEBRAIC_TOL {
        return Err(DiskError::OutsideDisk { modulus: z.norm() });
    }
    Ok(())
}

/// Outcome of [`energy_identity_check`].
#[derive(Debug, Clone, PartialEq)]
pub struct EnergyReport {
    /// `∫_D u*ω`, integrand `ω(∂_s u, ∂_t u)`.
    pub topological: f64,
    /// `∫_D ½|du|²`.
    pub l2: f64,
    pub difference: f64,
    /// `π·degree`.
    pub expected: f64,
    /// `½∮ Im(ū du)` over the boundary, for comparison.
    pub boundary: f64,
    pub converged: bool,
    /// Radial panels and angular points at the last refinement.
    pub panels: usize,
    pub angles: usize,
}

#[allow(clippy::excessive_precision)]
const GAUSS8: [(f64, f64); 8] = [
    (-0.960_289_856_497_536_3, 0.101_228_536_290_376_3),
    (-0.796_666_477_413_626_7, 0.222_381_034_453_374_5),
    (-0.525_532_409_916_329_0, 0.313_706_645_877_887_3),
    (-0.183_434_642_495_649_8, 0.362_683_783_378_362_0),
    (0.183_434_642_495_649_8, 0.362_683_783_378_362_0),
    (0.525_532_409_916_329_0, 0.313_706_645_877_887_3),
    (0.796_666_477_413_626_7, 0.222_381_034_453_374_5),
    (0.960_289_856_497_536_3, 0.101_228_536_290_376_3),
];

/// Composite 8-point Gauss-Legendre in `r` times trapezoid in `θ` of two
/// integrands at once, with the polar Jacobian.
fn disk_quadrature<F: Fn(C64) -> (f64, f64)>(f: &F, panels: usize, angles: usize) -> (f64, f64) {
    let h = 1.0 / panels as f64;
    let dtheta = 2.0 * PI / angles as f64;
    let (mut a, mut b) = (0.0, 0.0);
    for p in 0..panels {
        let mid = (p as f64 + 0.5) * h;
        for (x, w) in GAUSS8 {
            let r = mid + 0.5 * h * x;
            let (mut sa, mut sb) = (0.0, 0.0);
            for k in 0..angles {
                let (fa, fb) = f(unit(k as f64 * dtheta) * r);
                sa += fa;
                sb += fb;
            }
            a += 0.5 * h * w * r * sa * dtheta;
            b += 0.5 * h * w * r * sb * dtheta;
        }
    }
    (a, b)
}

const QUAD_TOL: f64 = 1e-8;
const QUAD_MAX_LEVELS: usize = 7;

/// Topological and `L²` energy of `u = φ` over the unit disk, with
/// `∂_s u = φ'` and `∂_t u = iφ'` in coordinates `z = s + it`. Refines until
/// two successive levels agree to `1e-8` in both integrals.
pub fn energy_identity_check(cfg: &BlaschkeConfig) -> EnergyReport {
    let integrand = |z: C64| {
        let us = cfg.derivative_unchecked(z);
        let ut = C64::i() * us;
        ((us.conj() * ut).im, 0.5 * (us.norm_sqr() + ut.norm_sqr()))
    };
    let (mut panels, mut angles) = (2, 32);
    let mut prev = disk_quadrature(&integrand, panels, angles);
    let mut converged = false;
    for _ in 0..QUAD_MAX_LEVELS {
        panels *= 2;
        angles *= 2;
        let next = disk_quadrature(&integrand, panels, angles);
        let done = (next.0 - prev.0).abs() < QUAD_TOL && (next.1 - prev.1).abs() < QUAD_TOL;
        prev = next;
        if done {
            converged = true;
            break;
        }
    }
    let m = angles;
    let mut boundary = 0.0;
    for k in 0..m {
        let z = unit(2.0 * PI * k as f64 / m as f64);
        let u = cfg.eval_unchecked(z);
        let du = cfg.derivative_unchecked(z) * C64::i() * z;
        boundary += (u.conj() * du).im;
    }
    boundary *= 0.5 * 2.0 * PI / m as f64;
    EnergyReport {
        topological: prev.0,
        l2: prev.1,
        difference: prev.0 - prev.1,
        expected: PI * cfg.degree() as f64,
        boundary,
        converged,
        panels,
        angles,
    }
}

/// Smallest sample count and largest gap accepted by [`stokes_bound`].
pub const STOKES_MIN_SAMPLES: usize = 16;
pub const STOKES_MAX_GAP: f64 = PI / 8.0;
/// Largest accepted change of `u_2` between neighbouring samples.
pub const STOKES_MAX_STEP: f64 = 0.5;

/// `(1/π)|∫_0^{2π} (cos θ + sin θ J_0) u_2(e^{iθ}) dθ|`, i.e.
/// `(1/π)|∫ e^{iθ} u_2 dθ|`, by the periodic trapezoid rule on the given
/// angles.
pub fn stokes_bound(samples: &[(f64, C64)]) -> Result<f64, DiskError> {
    if samples.len() < STOKES_MIN_SAMPLES {
        return Err(DiskError::StokesUndersampled {
            reason: "fewer than 16 samples",
        });
    }
    for (index, &(theta, u)) in samples.iter().enumerate() {
        if !(0.0..2.0 * PI).contains(&theta) || (index > 0 && theta <= samples[index - 1].0) {
            return Err(DiskError::AnglesNotIncreasing { index });
        }
        if u.norm() > 1.0 + 1e-12 {
            return Err(DiskError::SampleOutsideDisk {
                index,
                modulus: u.norm(),
            });
        }
    }
    let m = samples.len();
    let mut acc = C64::new(0.0, 0.0);
    for k in 0..m {
        let (t0, u0) = samples[k];
        let (mut t1, u1) = samples[(k + 1) % m];
        if k + 1 == m {
            t1 += 2.0 * PI;
        }
        let gap = t1 - t0;
        if gap > STOKES_MAX_GAP + 1e-12 {
            return Err(DiskError::StokesUndersampled {
                reason: "angular gap wider than pi/8",
            });
        }
        if (u1 - u0).norm() > STOKES_MAX_STEP {
            return Err(DiskError::StokesUndersampled {
                reason: "boundary values jump by more than 0.5",
            });
        }
        acc += (unit(t0) * u0 + unit(t1) * u1) * (0.5 * gap);
    }
    Ok(acc.norm() / PI)
}

/// `n - 2 + μ`.
pub fn expected_dim(n: i64, mu: i64) -> i64 {
    n - 2 + mu
}

/// Real dimension of degree-`d` Blaschke products modulo `Aut(D,1)`: `2d`
/// for the zeros and 1 for the rotation, less the 2-dimensional group.
pub fn blaschke_moduli_dim(d: i64) -> i64 {
    2 * (d - 1) + 1
}

/// Limit of a sequence of Blaschke configurations.
#[derive(Debug, Clone, PartialEq)]
pub struct Degeneration {
    /// Zeros whose limit lies on the circle.
    pub phantom: usize,
    pub phantom_limits: Vec<C64>,
    /// The naive pointwise limit away from the phantom points.
    pub limit: BlaschkeConfig,
}

impl Degeneration {
    pub fn limit_degree(&self) -> usize {
        self.limit.degree()
    }
}

/// Cauchy tolerance on the last step of each zero sequence.
pub const CAUCHY_TOL: f64 = 1e-8;
/// Limits with modulus at least `1 - PHANTOM_TOL` count as boundary zeros.
pub const PHANTOM_TOL: f64 = 1e-6;

/// Classify the zeros of a convergent sequence of configurations
/// (`steps[n][j]` is zero `j` at step `n`). A phantom zero `z_j → ζ ∈ S¹`
/// contributes a unit constant to the limit, absorbed into the rotation.
pub fn degeneration_detect(steps: &[Vec<C64>], rotation: C64) -> Result<Degeneration, DiskError> {
    let Some((last, rest)) = steps.split_last() else {
        return Err(DiskError::SequenceShape);
    };
    let Some(prev) = rest.last() else {
        return Err(DiskError::SequenceShape);
    };
    if steps.iter().any(|s| s.len() != last.len()) {
        return Err(DiskError::SequenceShape);
    }
    for (index, (a, b)) in last.iter().zip(prev).enumerate() {
        let step = (a - b).norm();
        if step >= CAUCHY_TOL {
            return Err(DiskError::NotConvergent { index, step });
        }
    }
    let current = BlaschkeConfig::new(last.clone(), rotation)?;
    let mut interior = Vec::new();
    let mut phantom_limits = Vec::new();
    let mut rot = rotation;
    for (j, &z) in last.iter().enumerate() {
        if z.norm() >= 1.0 - PHANTOM_TOL {
            phantom_limits.push(z / z.norm());
            // value of the factor at 0, i.e. its (near-)constant limit
            let c = current.factor(j, C64::new(0.0, 0.0));
            rot *= c / c.norm();
        } else {
            interior.push(z);
        }
    }
    Ok(Degeneration {
        phantom: phantom_limits.len(),
        phantom_limits,
        limit: BlaschkeConfig::new(interior, rot)?,
    })
}

/// A Möbius transformation `z ↦ (az + b)/(cz + d)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Mobius {
    pub a: C64,
    pub b: C64,
    pub c: C64,
    pub d: C64,
}

impl Mobius {
    pub fn identity() -> Self {
        let (o, z) = (C64::new(1.0, 0.0), C64::new(0.0, 0.0));
        Mobius { a: o, b: z, c: z, d: o }
    }

    /// `z ↦ e^{iθ}(z - p)/(1 - p̄z)` for `|p| < 1`.
    pub fn disk(theta: f64, p: C64) -> Result<Self, DiskError> {
        if p.norm() >= 1.0 {
            return Err(DiskError::OutsideDisk { modulus: p.norm() });
        }
        let e = unit(theta);
        Ok(Mobius {
            a: e,
            b: -e * p,
            c: -p.conj(),
            d: C64::new(1.0, 0.0),
        })
    }

    pub fn rotation(theta: f64) -> Self {
        Mobius {
            a: unit(theta),
            ..Mobius::identity()
        }
    }

    /// `ψ_c(z) = ((1 + c̄)/(1 + c))·(z + c)/(1 + c̄z)`, an element of
    /// `Aut(D, 1)` with `ψ_c(0) = c(1 + c̄)/(1 + c)`.
    pub fn psi(c: C64) -> Result<Self, DiskError> {
        if c.norm() >= 1.0 {
            return Err(DiskError::OutsideDisk { modulus: c.norm() });
        }
        let one = C64::new(1.0, 0.0);
        let k = (one + c.conj()) / (one + c);
        Ok(Mobius {
            a: k,
            b: k * c,
            c: c.conj(),
            d: one,
        })
    }

    /// `h_t(z) = (z + tanh t)/(1 + z tanh t)`, fixing `±1`.
    pub fn hyperbolic(t: f64) -> Self {
        let s = C64::new(t.tanh(), 0.0);
        let one = C64::new(1.0, 0.0);
        Mobius { a: one, b: s, c: s, d: one }
    }

    pub fn eval(&self, z: C64) -> C64 {
        (self.a * z + self.b) / (self.c * z + self.d)
    }

    pub fn derivative(&self, z: C64) -> C64 {
        let den = self.c * z + self.d;
        (self.a * self.d - self.b * self.c) / (den * den)
    }

    pub fn inverse(&self) -> Self {
        Mobius {
            a: self.d,
            b: -self.b,
            c: -self.c,
            d: self.a,
        }
    }

    /// `self ∘ other`.
    pub fn compose(&self, other: &Mobius) -> Self {
        Mobius {
            a: self.a * other.a + self.b * other.c,
            b: self.a * other.b + self.b * other.d,
            c: self.c * other.a + self.d * other.c,
            d: self.c * other.b + self.d * other.d,
        }
    }

    /// The unique Möbius map with `z_i ↦ w_i` for distinct `z_i` and
    /// distinct `w_i`, via cross-ratios.
    pub fn from_three_points(z: [C64; 3], w: [C64; 3]) -> Result<Self, DiskError> {
        let s = cross_ratio_map(z)?;
        let t = cross_ratio_map(w)?;
        Ok(t.inverse().compose(&s))
    }

    /// Fixed points: roots of `cz² + (d - a)z - b`.
    pub fn fixed_points(&self) -> Vec<C64> {
        let eps = 1e-14 * (self.a.norm() + self.d.norm());
        if self.c.norm() <= eps {
            if (self.d - self.a).norm() <= eps {
                return Vec::new();
            }
            return vec![self.b / (self.d - self.a)];
        }
        let bq = self.d - self.a;
        let disc = (bq * bq + self.c * self.b * 4.0).sqrt();
        vec![(-bq + disc) / (self.c * 2.0), (-bq - disc) / (self.c * 2.0)]
    }

    /// Whether the map preserves the unit disk: `|M(0)| < 1` and the
    /// sampled boundary stays on the circle to `tol`.
    pub fn is_disk_automorphism(&self, tol: f64) -> bool {
        if self.eval(C64::new(0.0, 0.0)).norm() >= 1.0 {
            return false;
        }
        (0..16).all(|k| (self.eval(unit(2.0 * PI * k as f64 / 16.0)).norm() - 1.0).abs() <= tol)
    }
}

/// `z ↦ (z - z_1)(z_2 - z_3)/((z - z_3)(z_2 - z_1))`, sending the points to
/// `0, 1, ∞`.
fn cross_ratio_map(z: [C64; 3]) -> Result<Mobius, DiskError> {
    let [z1, z2, z3] = z;
    let sep = 1e-12;
    if (z1 - z2).norm() < sep || (z2 - z3).norm() < sep || (z1 - z3).norm() < sep {
        return Err(DiskError::DegenerateMobius);
    }
    let p = z2 - z3;
    let q = z2 - z1;
    Ok(Mobius {
        a: p,
        b: -z1 * p,
        c: q,
        d: -z3 * q,
    })
}
