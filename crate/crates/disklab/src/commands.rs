//! One function per subcommand, each producing a [`Report`].

use std::f64::consts::PI;
use std::fs;
use std::path::Path;

use disklab_core::disks::{
    energy_identity_check, maslov_index, stokes_bound, BlaschkeConfig, DiskError, C64,
};
use disklab_core::filtered::{
    degree_constraints, maslov_verdict, mc_residual, twisted_diff_unchecked, verify_fukaya1, verify_fukaya2,
    FilteredElement, FilteredError,
};
use disklab_core::linfty::{check_linfty, LInftyAlgebra};
use disklab_core::morphism::check_morphism;
use disklab_core::transfer::homotopy_transfer;
use disklab_core::trees::{
    equivalent_stable_trees, gromov_limit_t2, validate_stable_tree, PsiFamily, StableViolation,
};
use serde_json::{json, Value};

use crate::input::{self, AlgebraSpec, BlaschkeSpec, InputError, TreeSpec};
use crate::report::{Report, Residual};
use crate::Command;

pub fn run(cmd: &Command) -> Result<Report, InputError> {
    match cmd {
        Command::Check { alg, max_len } => check(&alg.alg, *max_len),
        Command::Transfer { alg, max_len, out } => transfer(&alg.alg, *max_len, out.as_deref()),
        Command::McVerify { alg, elem, trunc } => mc_verify(&alg.alg, elem, *trunc),
        Command::Twist { alg, elem, arg, trunc } => twist(&alg.alg, elem, arg, *trunc),
        Command::FukayaCheck { alg, alpha, beta, chain, trunc } => {
            fukaya_check(&alg.alg, alpha, beta.as_deref().zip(chain.as_deref()), *trunc)
        }
        Command::DegreeConstraints { n, mus } => degree_constraints_cmd(*n, mus.as_deref()),
        Command::Maslov { frames, expect } => maslov(frames, *expect),
        Command::DiskDemo { config, degree, tol, csv } => disk_demo(config.as_deref(), *degree, *tol, csv.as_deref()),
        Command::Stokes { samples, tol } => stokes(samples, *tol),
        Command::TreeValidate { tree } => tree_validate(tree),
        Command::TreeEqual { a, b } => tree_equal(a, b),
        Command::GromovT2 { z1, z2, w, rate, steps, tol, csv } => {
            gromov_t2(*z1, *z2, *w, *rate, *steps, *tol, csv.as_deref())
        }
    }
}

fn filtered_input(path: &Path) -> impl Fn(FilteredError) -> InputError + '_ {
    move |e| InputError::Invalid { path: path.to_path_buf(), msg: e.to_string() }
}

fn write_output(path: &Path, text: &str) -> Result<(), InputError> {
    fs::write(path, text).map_err(|source| InputError::Io { path: path.to_path_buf(), source })
}

/// One residual per nonzero filtration level.
fn level_residuals(alg: &LInftyAlgebra, e: &FilteredElement, prefix: &str) -> Vec<Residual> {
    e.levels()
        .iter()
        .map(|(k, v)| Residual::exact(format!("{prefix}level {k}"), alg.space().format_element(v)))
        .collect()
}

fn check(path: &Path, max_len: usize) -> Result<Report, InputError> {
    let alg = input::load_algebra(path)?;
    let r = check_linfty(&alg, max_len);
    let s = alg.space();
    let mut residuals: Vec<Residual> = r
        .residuals
        .iter()
        .map(|x| Residual::exact(s.format_word(&x.word), s.format_element(&x.value)))
        .collect();
    residuals.extend(
        r.cross_check_mismatches
            .iter()
            .map(|x| Residual::exact(format!("cross-check {}", s.format_word(&x.word)), s.format_element(&x.value))),
    );
    let result = json!({ "words_checked": r.words_checked, "max_len": max_len });
    Ok(Report::from_residuals("check", residuals, Some(result)))
}

fn transfer(path: &Path, max_len: usize, out: Option<&Path>) -> Result<Report, InputError> {
    let alg = input::load_algebra(path)?;
    let t = homotopy_transfer(&alg, max_len);
    let h = &t.homology;
    let s = h.space();
    let mut residuals: Vec<Residual> = check_linfty(h, max_len)
        .residuals
        .iter()
        .map(|x| Residual::exact(format!("homology {}", s.format_word(&x.word)), s.format_element(&x.value)))
        .collect();
    // morphism residuals sit on words of the homology, valued in the input
    let target = alg.space();
    residuals.extend(check_morphism(&t.inclusion, max_len).residuals.iter().map(|x| {
        Residual::exact(format!("morphism {}", s.format_word(&x.word)), target.format_element(&x.value))
    }));
    let spec = AlgebraSpec::describe(h);
    if let Some(out) = out {
        let text = serde_json::to_string_pretty(&spec).expect("algebra serializes");
        write_output(out, &(text + "\n"))?;
    }
    let result = json!({
        "homology": spec,
        "dimension": s.len(),
        "inclusion_arity": t.inclusion.max_arity(),
    });
    Ok(Report::from_residuals("transfer", residuals, Some(result)))
}

fn mc_verify(path: &Path, elem: &Path, trunc: i64) -> Result<Report, InputError> {
    let alg = input::load_algebra(path)?;
    let a = input::load_element(elem, &alg, trunc)?;
    let r = mc_residual(&alg, &a, trunc).map_err(filtered_input(elem))?;
    let result = json!({ "trunc": trunc, "element": alg.space().format_element(&a.element()) });
    Ok(Report::from_residuals("mc-verify", level_residuals(&alg, &r, ""), Some(result)))
}

fn twist(path: &Path, elem: &Path, arg: &Path, trunc: i64) -> Result<Report, InputError> {
    let alg = input::load_algebra(path)?;
    let a = input::load_element(elem, &alg, trunc)?;
    let b = input::load_element(arg, &alg, trunc)?;
    let mc = mc_residual(&alg, &a, trunc).map_err(filtered_input(elem))?;
    let once = twisted_diff_unchecked(&alg, &a, &b, trunc);
    let twice = twisted_diff_unchecked(&alg, &a, &once, trunc);
    let mut residuals = level_residuals(&alg, &mc, "maurer-cartan ");
    residuals.extend(level_residuals(&alg, &twice, "square "));
    let result = json!({
        "trunc": trunc,
        "twisted": alg.space().format_element(&once.element()),
    });
    Ok(Report::from_residuals("twist", residuals, Some(result)))
}

fn fukaya_check(path: &Path, alpha: &Path, second: Option<(&Path, &Path)>, trunc: i64) -> Result<Report, InputError> {
    let alg = input::load_algebra(path)?;
    let a = input::load_element(alpha, &alg, trunc)?;
    let r1 = verify_fukaya1(&alg, &a, trunc).map_err(filtered_input(alpha))?;
    let mut residuals = level_residuals(&alg, &r1, "first equation ");
    if let Some((beta, chain)) = second {
        let b = input::load_element(beta, &alg, trunc)?;
        let l = input::load_element(chain, &alg, trunc)?;
        let r2 = verify_fukaya2(&alg, &a, &b, &l, trunc).map_err(filtered_input(beta))?;
        residuals.extend(level_residuals(&alg, &r2, "second equation "));
    }
    let result = json!({ "trunc": trunc, "n": disklab_core::filtered::dimension_of(&alg), "second": second.is_some() });
    Ok(Report::from_residuals("fukaya-check", residuals, Some(result)))
}

fn degree_constraints_cmd(n: i64, mus: Option<&[i64]>) -> Result<Report, InputError> {
    let c = degree_constraints(n).map_err(|e| InputError::Argument(e.to_string()))?;
    let mut result = json!({
        "n": n,
        "mu_a": [c.mu_a.0, c.mu_a.1],
        "mu_a_even": c.mu_a_even,
        "mu_ai": [c.mu_ai.0, c.mu_ai.1],
        "mu_ai_even": c.mu_ai_even,
    });
    let mut residuals = Vec::new();
    if let Some(mus) = mus {
        let v = maslov_verdict(n, mus).map_err(|e| InputError::Argument(e.to_string()))?;
        result["verdict"] = json!({
            "total": v.total,
            "all_nonpositive": v.all_nonpositive,
            "contradiction": v.contradiction,
            "has_index_two": v.has_index_two,
        });
        if v.contradiction {
            residuals.push(Residual::exact(
                "mu(a)",
                format!("{} outside [{}, {}]", v.total, c.mu_a.0, c.mu_a.1),
            ));
        }
    }
    Ok(Report::from_residuals("degree-constraints", residuals, Some(result)))
}

fn maslov(path: &Path, expect: Option<i64>) -> Result<Report, InputError> {
    let lp = input::load_frames(path)?;
    let samples = lp.len();
    match maslov_index(&lp) {
        Ok(mu) => {
            let mut residuals = Vec::new();
            if let Some(e) = expect.filter(|e| *e != mu) {
                residuals.push(Residual::exact("maslov", format!("{mu}, expected {e}")));
            }
            let result = json!({ "maslov": mu, "n": lp.n(), "samples": samples });
            Ok(Report::from_residuals("maslov", residuals, Some(result)))
        }
        // a numerical verdict on valid input, not an input error
        Err(e @ (DiskError::Undersampled { .. } | DiskError::NotInteger { .. } | DiskError::ZeroSample { .. })) => {
            let result = json!({ "n": lp.n(), "samples": samples });
            Ok(Report::from_residuals("maslov", vec![Residual::exact("winding", e.to_string())], Some(result)))
        }
        Err(e) => Err(InputError::Invalid { path: path.to_path_buf(), msg: e.to_string() }),
    }
}

fn disk_demo(config: Option<&Path>, degree: Option<usize>, tol: f64, csv: Option<&Path>) -> Result<Report, InputError> {
    let cfg = match (config, degree) {
        (Some(p), _) => input::load_blaschke(p)?,
        (None, Some(d)) => {
            let zeros = (0..d).map(|j| C64::from_polar(0.5, 2.0 * PI * j as f64 / d as f64)).collect();
            BlaschkeConfig::new(zeros, C64::new(1.0, 0.0)).expect("zeros inside the disk")
        }
        (None, None) => return Err(InputError::Argument("give --config or --degree".into())),
    };
    let r = energy_identity_check(&cfg);
    let mut residuals = Vec::new();
    let rel = if r.l2 > 0.0 { r.difference.abs() / r.l2 } else { r.difference.abs() };
    if rel > tol {
        residuals.push(Residual::float("topological - l2 (relative)", rel));
    }
    let off = (r.topological - r.expected).abs();
    if off > tol {
        residuals.push(Residual::float("topological - pi d", off));
    }
    if !r.converged {
        residuals.push(Residual::exact("quadrature", "did not converge"));
    }
    if let Some(path) = csv {
        let m = 256;
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(["theta", "re", "im"]).expect("in-memory write");
        for (k, z) in cfg.boundary(m).iter().enumerate() {
            let t = 2.0 * PI * k as f64 / m as f64;
            w.write_record([t.to_string(), z.re.to_string(), z.im.to_string()]).expect("in-memory write");
        }
        let bytes = w.into_inner().expect("in-memory write");
        write_output(path, &String::from_utf8(bytes).expect("ascii"))?;
    }
    let result = json!({
        "config": BlaschkeSpec::describe(&cfg),
        "degree": cfg.degree(),
        "topological": r.topological,
        "l2": r.l2,
        "difference": r.difference,
        "expected": r.expected,
        "boundary": r.boundary,
        "converged": r.converged,
        "panels": r.panels,
        "angles": r.angles,
    });
    Ok(Report::from_residuals("disk-demo", residuals, Some(result)))
}

fn stokes(path: &Path, tol: f64) -> Result<Report, InputError> {
    let samples = input::load_samples(path)?;
    let bound = stokes_bound(&samples).map_err(|e| InputError::Invalid { path: path.to_path_buf(), msg: e.to_string() })?;
    let mut residuals = Vec::new();
    if bound > 2.0 + tol {
        residuals.push(Residual::float("bound - 2", bound - 2.0));
    }
    let result = json!({ "bound": bound, "samples": samples.len() });
    Ok(Report::from_residuals("stokes", residuals, Some(result)))
}

fn violation(v: &StableViolation) -> Residual {
    use StableViolation::*;
    match v {
        VertexCount { tree, vertices } => Residual::exact("vertices", format!("{vertices} disks for {tree} tree vertices")),
        MarkedVertex { vertex } => Residual::exact("marked", format!("vertex {vertex} out of range")),
        MissingNodal { from, to } => Residual::exact(format!("edge {from}->{to}"), "missing nodal point"),
        NodalOffEdge { from, to } => Residual::exact(format!("nodal {from}->{to}"), "not an edge"),
        OffCircle { vertex, modulus } => Residual::float(format!("vertex {vertex} |z| - 1"), modulus - 1.0),
        Coinciding { vertex } => Residual::exact(format!("vertex {vertex}"), "special points coincide"),
        Unstable { vertex, special } => {
            Residual::exact(format!("vertex {vertex}"), format!("constant disk with {special} special points"))
        }
        Mismatch { from, to, residual } => Residual::float(format!("edge {from}-{to} matching"), *residual),
        ConstantMapVaries { vertex } => Residual::exact(format!("vertex {vertex}"), "constant disk has a nonconstant map"),
        MapShape { vertex } => Residual::exact(format!("vertex {vertex}"), "map has the wrong number of coordinates"),
    }
}

fn tree_validate(path: &Path) -> Result<Report, InputError> {
    let st = input::load_tree(path)?;
    let residuals = validate_stable_tree(&st).iter().map(violation).collect();
    let result = json!({ "vertices": st.tree.len(), "energy": disklab_core::trees::tree_energy(&st) });
    Ok(Report::from_residuals("tree-validate", residuals, Some(result)))
}

/// A disk automorphism in the form `e^{iθ}(z - p)/(1 - p̄z)`.
fn mobius_json(m: &disklab_core::disks::Mobius) -> Value {
    let p = -m.b / m.a;
    let theta = (m.a / m.d).arg();
    json!({ "theta": theta, "p": [p.re, p.im] })
}

fn tree_equal(a: &Path, b: &Path) -> Result<Report, InputError> {
    let ta = input::load_tree(a)?;
    let tb = input::load_tree(b)?;
    let found = equivalent_stable_trees(&ta, &tb).map_err(|e| InputError::Argument(e.to_string()))?;
    Ok(match found {
        Some(e) => {
            let maps: Vec<Value> = e.maps.iter().map(mobius_json).collect();
            Report::from_residuals("tree-equal", Vec::new(), Some(json!({ "iso": e.iso, "maps": maps })))
        }
        None => Report::from_residuals(
            "tree-equal",
            vec![Residual::exact("search", "no equivalence found")],
            Some(json!({ "iso": Value::Null })),
        ),
    })
}

#[allow(clippy::too_many_arguments)]
fn gromov_t2(z1: f64, z2: f64, w: f64, rate: f64, steps: u32, tol: f64, csv: Option<&Path>) -> Result<Report, InputError> {
    let (z1, z2) = (C64::from_polar(1.0, z1), C64::from_polar(1.0, z2));
    let family = PsiFamily::hyperbolic(C64::from_polar(1.0, w), rate).map_err(|e| InputError::Argument(e.to_string()))?;
    let g = gromov_limit_t2(z1, z2, &family, steps).map_err(|e| InputError::Argument(e.to_string()))?;
    let mut residuals = Vec::new();
    for (name, v) in [("marked point", g.marked_residual), ("node", g.node_residual), ("loop gap", g.loop_gap)] {
        if v > tol {
            residuals.push(Residual::float(name, v));
        }
    }
    if g.windings != [1, 1] {
        residuals.push(Residual::exact("windings", format!("{:?}", g.windings)));
    }
    residuals.extend(validate_stable_tree(&g.tree).iter().map(violation));
    if let Some(path) = csv {
        let m = 256;
        let mut wr = csv::Writer::from_writer(Vec::new());
        wr.write_record(["t", "re1", "im1", "re2", "im2"]).expect("in-memory write");
        let nodes = [g.tree.nodal[&(0, 1)], g.tree.nodal[&(1, 0)]];
        for (v, start) in nodes.iter().enumerate() {
            let map = g.tree.vertices[v].map.as_ref().expect("limit disks carry maps");
            for k in 0..m {
                let z = start * C64::from_polar(1.0, 2.0 * PI * k as f64 / m as f64);
                let u: Vec<C64> = map.iter().map(|b| b.eval(z).expect("boundary point")).collect();
                let t = v as f64 + k as f64 / m as f64;
                wr.write_record([t, u[0].re, u[0].im, u[1].re, u[1].im].map(|x| x.to_string()))
                    .expect("in-memory write");
            }
        }
        let bytes = wr.into_inner().expect("in-memory write");
        write_output(path, &String::from_utf8(bytes).expect("ascii"))?;
    }
    let case = match g.case {
        disklab_core::trees::LimitCase::First => "first",
        disklab_core::trees::LimitCase::Second => "second",
    };
    let result = json!({
        "case": case,
        "w": [g.w.re, g.w.im],
        "energy": g.energy,
        "windings": g.windings,
        "convergence": g.convergence,
        "escape": g.escape,
        "marked_residual": g.marked_residual,
        "node_residual": g.node_residual,
        "loop_gap": g.loop_gap,
        "tree": TreeSpec::describe(&g.tree),
    });
    Ok(Report::from_residuals("gromov-t2", residuals, Some(result)))
}
