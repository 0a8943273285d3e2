//! Fast reflexive-graph commands. Every entry point first cross-checks the
//! hard-coded classifier picture against the computed classifier, so a drift
//! between the two implementations shows up as an internal error.

use std::path::Path;

use serde_json::json;
use xilab_core::rgraph::{
    calibration_counterexample, classify_lightly_dense, cohesion, is_leibniz, is_lightly_dense,
    nonsingular_fast, pullback_subgraph, sierpinski_check, sigma_fast, to_dot,
    verify_classifier_picture, xi_top_subgraph, EdgeImage, GraphMap, ReflexiveGraph, Subgraph,
    XI_LOOP,
};
use xilab_core::SizeGuard;

use crate::io::{load_graph, load_graph_map, load_subgraph};
use crate::report::Report;
use crate::{compute_fail, CmdFail};

/// The correctness anchor for the fast path: the computed classifier must be
/// the one-node picture with exactly the loops named loop and non-loop.
fn check_classifier_anchor() -> Result<(), CmdFail> {
    let pic = verify_classifier_picture().map_err(compute_fail)?;
    let expected = pic.node_count == 1
        && pic.degenerate_count == 1
        && pic.nondegenerate_edges == ["loop", "non-loop"]
        && pic.all_nondegenerate_are_loops;
    if !expected {
        return Err(CmdFail::Internal(format!(
            "classifier picture drifted from the one-node two-loop form: {pic:?}"
        )));
    }
    Ok(())
}

fn edge_label(f: &GraphMap, e: usize) -> &'static str {
    match f.edge_map()[e] {
        EdgeImage::Edge(j) if j == XI_LOOP => "loop",
        EdgeImage::Edge(_) => "non-loop",
        EdgeImage::Degenerate(_) => "total",
    }
}

pub fn sigma(graph: &Path, skip_degenerate: bool) -> Result<Report, CmdFail> {
    check_classifier_anchor()?;
    let g = load_graph(graph)?;
    let s = sigma_fast(&g);
    let mut report = Report::new("rgraph sigma", "measurement-labels");
    report.line(format!(
        "graph: {} nodes, {} non-degenerate edges",
        g.node_count(),
        g.edge_count()
    ));
    let mut labels = Vec::new();
    let mut dot = String::from("digraph G {\n  rankdir=LR;\n");
    for n in g.nodes() {
        dot.push_str(&format!("  \"{n}\";\n"));
    }
    for e in 0..g.edge_count() {
        let label = edge_label(&s, e);
        let edge = &g.edges()[e];
        report.line(format!(
            "  edge {} ({} -> {}): {label}",
            edge.id,
            g.nodes()[edge.src],
            g.nodes()[edge.tgt]
        ));
        labels.push(json!({ "edge": edge.id.to_string(), "kernel": label }));
        dot.push_str(&format!(
            "  \"{}\" -> \"{}\" [label=\"{}: {label}\"];\n",
            g.nodes()[edge.src],
            g.nodes()[edge.tgt],
            edge.id
        ));
    }
    if !skip_degenerate {
        for n in g.nodes() {
            dot.push_str(&format!(
                "  \"{n}\" -> \"{n}\" [label=\"~{n}\", style=dotted];\n"
            ));
        }
    }
    dot.push_str("}\n");
    report.json = json!({ "labels": labels });
    report.dot = Some(dot);
    Ok(report)
}

pub fn nonsingular(map: &Path) -> Result<Report, CmdFail> {
    check_classifier_anchor()?;
    let f = load_graph_map(map)?;
    let witness = nonsingular_fast(&f);
    let mut report = Report::new("rgraph nonsingular", "nonsingular-map");
    match &witness {
        None => report.line("verdict: non-singular"),
        Some(e) => {
            report.line("verdict: singular");
            let i = f.source().edge_index(e).expect("witness edge exists");
            let kind = if f.source().is_loop(i) { "loop" } else { "non-loop" };
            report.line(format!("  witness: {kind} edge {e} lands on a coarser kernel"));
        }
    }
    report.pass = witness.is_none();
    report.json = json!({
        "nonsingular": witness.is_none(),
        "witness": witness.as_ref().map(|e| e.to_string()),
    });
    Ok(report)
}

pub fn leibniz(graph: &Path, skip_degenerate: bool) -> Result<Report, CmdFail> {
    check_classifier_anchor()?;
    let g = load_graph(graph)?;
    let data = cohesion(&g);
    let mut report = Report::new("rgraph leibniz", "leibniz-cohesion");
    report.line(format!("points: {}", data.points.len()));
    report.line(format!("components: {}", data.components.len()));
    for (i, comp) in data.components.iter().enumerate() {
        let names: Vec<String> = comp.iter().map(|&n| g.nodes()[n].to_string()).collect();
        report.line(format!("  component {i}: {}", names.join(", ")));
    }
    let core_edges: Vec<String> = data
        .leibniz_core
        .edges()
        .iter()
        .map(|&e| g.edges()[e].id.to_string())
        .collect();
    report.line(format!(
        "core: all {} nodes and {} loop edge{}{}{}",
        g.node_count(),
        core_edges.len(),
        if core_edges.len() == 1 { "" } else { "s" },
        if core_edges.is_empty() { "" } else { ": " },
        core_edges.join(", ")
    ));
    report.line(format!(
        "points match components: {}",
        if is_leibniz(&g) { "yes" } else { "no" }
    ));
    report.json = json!({
        "points": data.points.iter().map(|n| n.to_string()).collect::<Vec<_>>(),
        "components": data.components.iter()
            .map(|comp| comp.iter().map(|&n| g.nodes()[n].to_string()).collect::<Vec<_>>())
            .collect::<Vec<_>>(),
        "core": data.leibniz_core.to_raw(),
        "leibniz": is_leibniz(&g),
    });
    report.dot = Some(to_dot(
        &materialize(&data.leibniz_core).map_err(compute_fail)?,
        !skip_degenerate,
    ));
    Ok(report)
}

/// A subgraph as a standalone graph, for rendering.
fn materialize(u: &Subgraph) -> xilab_core::Result<ReflexiveGraph> {
    let g = u.ambient();
    let nodes: Vec<_> = u.nodes().iter().map(|&n| g.nodes()[n].clone()).collect();
    let index_of = |n: usize| u.nodes().iter().position(|&m| m == n).expect("endpoint kept");
    let edges = u
        .edges()
        .iter()
        .map(|&e| xilab_core::rgraph::GEdge {
            id: g.edges()[e].id.clone(),
            src: index_of(g.edges()[e].src),
            tgt: index_of(g.edges()[e].tgt),
        })
        .collect();
    ReflexiveGraph::new(nodes, edges)
}

pub fn classify(graph: &Path, subgraph: &Path) -> Result<Report, CmdFail> {
    check_classifier_anchor()?;
    let g = load_graph(graph)?;
    let u = load_subgraph(&g, subgraph)?;
    let mut report = Report::new("rgraph classify", "lightly-dense-classifier");
    report.line(format!(
        "subgraph: {} of {} nodes, {} of {} edges",
        u.nodes().len(),
        g.node_count(),
        u.edges().len(),
        g.edge_count()
    ));
    let chi = match classify_lightly_dense(&u) {
        Ok(chi) => chi,
        Err(e @ xilab_core::Error::NotLightlyDense { .. }) => {
            debug_assert!(!is_lightly_dense(&u));
            report.line(format!("verdict: {e}"));
            report.pass = false;
            report.json = json!({ "lightly_dense": false, "witness": e.to_string() });
            return Ok(report);
        }
        Err(e) => return Err(compute_fail(e)),
    };
    report.line("verdict: lightly dense");
    for e in 0..g.edge_count() {
        report.line(format!(
            "  edge {}: {}",
            g.edges()[e].id,
            edge_label(&chi, e)
        ));
    }
    // The defining properties of the classifying map double as internal
    // cross-checks here.
    if !xilab_core::rgraph::has_discrete_fibers(&chi) {
        return Err(CmdFail::Internal(
            "classifying map lost its discrete fibers".to_string(),
        ));
    }
    let pulled = pullback_subgraph(&chi, &xi_top_subgraph()).map_err(compute_fail)?;
    if pulled != u {
        return Err(CmdFail::Internal(
            "pulling the distinguished loop back does not recover the subgraph".to_string(),
        ));
    }
    report.line("discrete fibers: ok");
    report.line("pullback recovers the subgraph: ok");
    report.json = json!({
        "lightly_dense": true,
        "classifying_map": chi.to_raw(),
        "discrete_fibers": true,
        "pullback_recovers_subgraph": true,
    });
    Ok(report)
}

pub fn sierpinski(bound: usize, guard: &SizeGuard) -> Result<Report, CmdFail> {
    check_classifier_anchor()?;
    let r = sierpinski_check(bound, guard).map_err(compute_fail)?;
    let mut report = Report::new("rgraph sierpinski", "sierpinski-identification");
    report.line(format!("node bound: {}", r.node_bound));
    report.line(format!("graphs enumerated (up to isomorphism): {}", r.graph_count));
    report.line(format!("graphs with loops only: {}", r.loops_only_count));
    report.line(format!(
        "non-singular map to the loop exists iff loops only, and is unique: {}",
        verdict(r.existence_and_uniqueness_ok)
    ));
    report.line(format!(
        "maps over the loop match loop-preserving maps ({} pairs, {} maps): {}",
        r.hom_pairs_checked,
        r.maps_checked,
        verdict(r.correspondence_ok)
    ));
    report.pass = r.all_ok;
    report.json = serde_json::to_value(&r)
        .map_err(|e| CmdFail::Internal(format!("report serialization: {e}")))?;
    Ok(report)
}

pub fn calibration(guard: &SizeGuard) -> Result<Report, CmdFail> {
    check_classifier_anchor()?;
    let r = calibration_counterexample(guard).map_err(compute_fail)?;
    let mut report = Report::new("rgraph calibration", "descent-counterexample");
    report.line(format!(
        "kernel pair of the collapse is the arrow plus two points: {}",
        verdict(r.kernel_pair_is_arrow_plus_two_points)
    ));
    report.line(format!(
        "collapse is epi: {}",
        verdict(r.descent.along_is_epi)
    ));
    report.line(format!(
        "pulled-back projection is non-singular: {}",
        verdict(r.descent.pulled_back_nonsingular)
    ));
    report.line(format!(
        "collapse itself is singular: {}",
        verdict(!r.descent.base_nonsingular)
    ));
    for w in &r.descent.base_defect {
        report.line(format!("  defect: {w}"));
    }
    report.line(format!(
        "descent fails, so non-singular maps are not a calibration: {}",
        verdict(!r.descent.descent_holds)
    ));
    report.pass = r.reproduces_counterexample;
    report.json = serde_json::to_value(&r)
        .map_err(|e| CmdFail::Internal(format!("report serialization: {e}")))?;
    Ok(report)
}

fn verdict(ok: bool) -> &'static str {
    if ok {
        "ok"
    } else {
        "FAIL"
    }
}
