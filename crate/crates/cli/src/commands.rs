use std::path::Path as FsPath;

use anyhow::{Context, Result};
use rayon::prelude::*;
use serde_json::{json, to_value, Value};

use exelkit::corpus::{all_graph_fixtures, matrix_fixtures};
use exelkit::correspondence::{compact_operator_frame, gns_correspondence, katsura_ideal, quiver_dimension_check};
use exelkit::cp::{analyze, quiver, support_relation};
use exelkit::exel::{
    classify_system, compute_ideals, covariance_span_check, enumerate_regular_endomorphisms,
    multiplicative_domain_truncated, truncated_shift_map, truncated_transfer_matrix,
};
use exelkit::graph::{basis_paths, check_lambda_conditions, check_lambda_lazy, classify_lazy, enumerate_boundary};
use exelkit::rep::{
    boundary_representation, build_u, gauge_grading, redundancy_test, truncated_representation,
    verify_with_transfer_weights, ScaledOperator, Window,
};
use exelkit::DiagElement;

use crate::input::{self, Input};
use crate::{Outcome, Settings, WindowArg};

/// Runs `f` on every input, in parallel, keeping input order. One input gives
/// its report unchanged; several give an array of `{input, report}`.
pub fn each(inputs: &[String], f: impl Fn(&str) -> Result<Outcome> + Sync) -> Result<Outcome> {
    let results: Vec<Result<Outcome>> = inputs.par_iter().map(|i| f(i)).collect();
    let mut outs = Vec::with_capacity(results.len());
    for r in results {
        outs.push(r?);
    }
    if outs.len() == 1 {
        return Ok(outs.pop().expect("one outcome"));
    }
    let negative = outs.iter().any(|o| o.negative);
    let report = inputs.iter().zip(outs).map(|(i, o)| json!({"input": i, "report": o.report})).collect();
    Ok(Outcome { report: Value::Array(report), negative })
}

fn ok(report: Value) -> Result<Outcome> {
    Ok(Outcome { report, negative: false })
}

pub fn check_lambda(name: &str, s: &Settings) -> Result<Outcome> {
    match input::load(name, s.policy)? {
        Input::Lazy(g) => {
            let cond = check_lambda_lazy(&g, s.budget);
            let negative = cond.linf.is_failure() || cond.c0.is_failure();
            let report = json!({
                "graph": g.name(),
                "classification": classify_lazy(&g, s.budget),
                "conditions": cond,
            });
            Ok(Outcome { report, negative })
        }
        other => {
            let g = other.graph()?;
            let w = input::weights(&g, &s.lambda, s.policy)?;
            let atlas = enumerate_boundary(&g.graph, s.depth_or(3));
            ok(json!({
                "graph": g.name,
                "classification": g.graph.classify_vertices(),
                "conditions": check_lambda_conditions(&g.graph, &w),
                "boundary": atlas.to_doc(&g.graph),
            }))
        }
    }
}

pub fn classify(name: &str, s: &Settings) -> Result<Outcome> {
    let g = input::load(name, s.policy)?.graph()?;
    let w = input::weights(&g, &s.lambda, s.policy)?;
    let c = classify_system(&g.graph, &w, s.depth_or(3))?;
    // A system that is not a corner is a classification, not a failure.
    let negative = !c.is_exel || !c.is_regular;
    Ok(Outcome { report: to_value(c)?, negative })
}

pub fn ideals(name: &str, s: &Settings) -> Result<Outcome> {
    let g = input::load(name, s.policy)?.graph()?;
    let w = input::weights(&g, &s.lambda, s.policy)?;
    let span = covariance_span_check(&g.graph, s.depth_or(3));
    let negative = !span.equal;
    let report = json!({
        "ideals": compute_ideals(&g.graph, &w, s.depth_or(3))?,
        "covariance_span": span,
        "multiplicative_domain": multiplicative_domain_truncated(&g.graph, &w, s.depth_or(3))?,
    });
    Ok(Outcome { report, negative })
}

pub fn represent(name: &str, s: &Settings) -> Result<Outcome> {
    let g = input::load(name, s.policy)?.graph()?;
    let w = input::weights(&g, &s.lambda, s.policy)?;
    let rep = if g.graph.has_cycle() {
        let window = match s.window {
            WindowArg::Boundary => Window::Boundary,
            WindowArg::Fock => Window::Fock,
        };
        truncated_representation(&g.graph, s.depth_or(3), window)
    } else {
        boundary_representation(&g.graph)?
    };
    // Identities are checked one level inside a truncated window.
    let check_depth = if rep.is_exact() { s.depth_or(3) } else { s.depth_or(3).saturating_sub(1) };
    let verification = verify_with_transfer_weights(&rep, &w, &w, check_depth)?;
    let negative = if rep.is_exact() {
        !verification.all_pass
    } else {
        verification.checks.iter().any(|c| !c.residual_on_frontier)
    };
    let u = ScaledOperator::u(&rep, &w);
    let redundancies: Vec<Value> = basis_paths(&g.graph, check_depth)
        .into_iter()
        .map(|p| {
            let a = DiagElement::projection(&g.graph, p.clone());
            let r = redundancy_test(&rep, &u, &a, check_depth);
            json!({"element": format!("q_{}", p.display(&g.graph)), "k_exists": r.k_exists, "member": r.member, "k_is_zero": r.k_is_zero})
        })
        .collect();
    let report = json!({
        "graph": g.name,
        "exact": rep.is_exact(),
        "representation": rep.to_doc(),
        "u": build_u(&rep, &w),
        "verification": verification,
        "grading": gauge_grading(&verification),
        "redundancies": redundancies,
    });
    Ok(Outcome { report, negative })
}

pub fn cp_analyze(name: &str, s: &Settings) -> Result<Outcome> {
    let (name, m) = input::load(name, s.policy)?.matrix()?;
    ok(json!({"matrix": name, "analysis": analyze(&m)?, "support_relation": support_relation(&m)}))
}

pub fn cp_quiver(name: &str, s: &Settings) -> Result<Outcome> {
    let (name, m) = input::load(name, s.policy)?.matrix()?;
    ok(json!({
        "matrix": name,
        "quiver": quiver(&m),
        "dimension_check": quiver_dimension_check(&m)?,
        "openness": "vacuously true (discrete)",
    }))
}

pub fn cp_correspondence(name: &str, s: &Settings) -> Result<Outcome> {
    let (_, m) = input::load(name, s.policy)?.matrix()?;
    let c = gns_correspondence(&m)?;
    let mut report = to_value(c.report())?;
    let obj = report.as_object_mut().context("report is an object")?;
    obj.insert("katsura_ideal".into(), to_value(katsura_ideal(&m)?)?);
    obj.insert("compact_operators".into(), to_value(compact_operator_frame(&c)?)?);
    ok(report)
}

pub fn enumerate_regular(name: &str, s: &Settings) -> Result<Outcome> {
    let (report, negative) = match input::load(name, s.policy)? {
        Input::Matrix { name, matrix } => {
            let r = enumerate_regular_endomorphisms(&matrix)?;
            let negative = r.endomorphisms.is_empty();
            (json!({"matrix": name, "result": r}), negative)
        }
        other => {
            let g = other.graph()?;
            let w = input::weights(&g, &s.lambda, s.policy)?;
            // Depth 1 unless given: the smallest truncation where `L` is visible.
            let depth = s.depth.unwrap_or(1);
            let (atoms, m) = truncated_transfer_matrix(&g.graph, &w, depth)?;
            let r = enumerate_regular_endomorphisms(&m)?;
            let shift = truncated_shift_map(&g.graph, depth);
            let matches: Vec<bool> = r.endomorphisms.iter().map(|e| Some(&e.point_map) == shift.as_ref()).collect();
            let negative = r.endomorphisms.is_empty();
            let report = json!({
                "graph": g.name,
                "depth": depth,
                "atoms": atoms.iter().map(|p| p.display(&g.graph)).collect::<Vec<_>>(),
                "transfer_matrix": m.to_strings(),
                "shift": shift,
                "result": r,
                "matches_shift": matches,
            });
            (report, negative)
        }
    };
    Ok(Outcome { report, negative })
}

pub fn fixtures_list() -> Result<Outcome> {
    let graphs: Vec<Value> = all_graph_fixtures()
        .par_iter()
        .map(|f| {
            let c = classify_system(&f.graph, &f.weights, 2).ok();
            json!({
                "name": f.name,
                "kind": "graph",
                "vertices": f.graph.vertex_count(),
                "edges": f.graph.edge_count(),
                "acyclic": f.acyclic,
                "regular": c.as_ref().map(|c| c.is_regular),
                "corner": c.as_ref().map(|c| c.is_corner),
            })
        })
        .collect();
    let matrices = matrix_fixtures().into_iter().map(|m| json!({"name": m.name, "kind": "matrix", "n": m.matrix.n()}));
    ok(Value::Array(graphs.into_iter().chain(matrices).collect()))
}

pub fn fixtures_export(dir: &FsPath) -> Result<Outcome> {
    std::fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
    let mut written = Vec::new();
    for f in all_graph_fixtures() {
        let path = dir.join(format!("{}.json", f.name));
        std::fs::write(&path, serde_json::to_string_pretty(&f.document())? + "\n")?;
        written.push(path.display().to_string());
    }
    for m in matrix_fixtures() {
        let path = dir.join(format!("{}.json", m.name));
        std::fs::write(&path, serde_json::to_string_pretty(&m.matrix.to_strings())? + "\n")?;
        written.push(path.display().to_string());
    }
    ok(json!({"written": written}))
}
