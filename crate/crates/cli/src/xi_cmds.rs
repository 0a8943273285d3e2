//! Commands around the local state classifier: computing it, measuring
//! presheaves into it, listing points, and manipulating probes.

use std::path::{Path, PathBuf};

use serde_json::json;
use xilab_core::fincat::same_site;
use xilab_core::lsc::{all_probes, intersect, sigma as sigma_map, Probe};
use xilab_core::rgraph::{convert_back, delta1_site, to_dot};
use xilab_core::SizeGuard;

use crate::io::{load_presheaf, load_probe, load_site, load_xi};
use crate::report::Report;
use crate::{compute_fail, CmdFail};

pub fn xi(category: &str, skip_degenerate: bool, guard: &SizeGuard) -> Result<Report, CmdFail> {
    let (label, site) = load_site(category, guard)?;
    let xi = load_xi(&site, guard)?;
    let mut report = Report::new("xi", "local-state-classifier");
    report.line(format!("site: {label}"));
    let mut objects = Vec::new();
    for c in 0..site.object_count() {
        let names: Vec<&str> = (0..xi.congruences(c).len()).map(|i| xi.name(c, i)).collect();
        report.line(format!(
            "{}: {} congruence{}: {}",
            site.objects()[c],
            names.len(),
            if names.len() == 1 { "" } else { "s" },
            names.join(", ")
        ));
        objects.push(json!({
            "object": site.objects()[c].to_string(),
            "congruences": names,
        }));
    }
    report.json = json!({ "site": label, "objects": objects });
    // Only presheaves on the edge site draw as reflexive graphs.
    if same_site(&site, delta1_site()) {
        let g = convert_back(xi.presheaf()).map_err(compute_fail)?;
        report.dot = Some(to_dot(&g, !skip_degenerate));
    }
    Ok(report)
}

pub fn sigma(category: &str, presheaf: &Path, guard: &SizeGuard) -> Result<Report, CmdFail> {
    let (label, site) = load_site(category, guard)?;
    let xi = load_xi(&site, guard)?;
    let x = load_presheaf(&site, presheaf, guard)?;
    let s = sigma_map(&xi, &x).map_err(compute_fail)?;
    let mut report = Report::new("sigma", "measurement");
    report.line(format!("site: {label}"));
    let mut labels = Vec::new();
    for c in 0..site.object_count() {
        report.line(format!("{}:", site.objects()[c]));
        for e in 0..x.size(c) {
            let name = xi.name(c, s.comp(c, e));
            report.line(format!("  {} -> {}", x.elem(c, e), name));
            labels.push(json!({
                "object": site.objects()[c].to_string(),
                "element": x.elem(c, e).to_string(),
                "kernel": name,
            }));
        }
    }
    report.json = json!({ "site": label, "labels": labels });
    Ok(report)
}

pub fn points(category: &str, presheaf: &Path, guard: &SizeGuard) -> Result<Report, CmdFail> {
    let (label, site) = load_site(category, guard)?;
    let x = load_presheaf(&site, presheaf, guard)?;
    let pts = xilab_core::lsc::points(&x, guard).map_err(compute_fail)?;
    let mut report = Report::new("points", "points");
    report.line(format!("site: {label}"));
    report.line(format!("points: {}", pts.len()));
    let mut rows = Vec::new();
    for (i, p) in pts.iter().enumerate() {
        let values: Vec<String> = (0..site.object_count())
            .map(|c| format!("{}={}", site.objects()[c], x.elem(c, p.comp(c, 0))))
            .collect();
        report.line(format!("  point {i}: {}", values.join(", ")));
        rows.push(json!(values));
    }
    report.json = json!({ "site": label, "count": pts.len(), "points": rows });
    Ok(report)
}

fn probe_json(p: &Probe) -> serde_json::Value {
    json!({ "selection": p.to_raw(), "saturated": p.is_saturated() })
}

pub fn probes_enumerate(category: &str, guard: &SizeGuard) -> Result<Report, CmdFail> {
    let (label, site) = load_site(category, guard)?;
    let xi = load_xi(&site, guard)?;
    let probes = all_probes(&xi, guard).map_err(compute_fail)?;
    let mut report = Report::new("probes enumerate", "probes");
    report.line(format!("site: {label}"));
    report.line(format!("probes: {}", probes.len()));
    let mut csv = String::from("index,probe,saturated\n");
    let mut rows = Vec::new();
    for (i, p) in probes.iter().enumerate() {
        let mark = if p.is_saturated() { " [saturated]" } else { "" };
        report.line(format!("  P{i}{mark}: {}", p.display_name()));
        csv.push_str(&format!("{i},{},{}\n", p.display_name(), p.is_saturated()));
        rows.push(probe_json(p));
    }
    report.json = json!({ "site": label, "probes": rows });
    report.csv = Some(csv);
    Ok(report)
}

pub fn probes_saturate(category: &str, probe: &Path, guard: &SizeGuard) -> Result<Report, CmdFail> {
    let (label, site) = load_site(category, guard)?;
    let xi = load_xi(&site, guard)?;
    let p = load_probe(&xi, probe)?;
    let saturated = p.saturate();
    let mut report = Report::new("probes saturate", "probe-saturation");
    report.line(format!("site: {label}"));
    report.line(format!("probe: {}", p.display_name()));
    report.line(format!("saturation: {}", saturated.display_name()));
    report.json = json!({
        "site": label,
        "probe": probe_json(&p),
        "saturation": probe_json(&saturated),
    });
    Ok(report)
}

pub fn probes_intersect(
    category: &str,
    probes: &[PathBuf],
    guard: &SizeGuard,
) -> Result<Report, CmdFail> {
    let (label, site) = load_site(category, guard)?;
    let xi = load_xi(&site, guard)?;
    let loaded: Vec<Probe> = probes
        .iter()
        .map(|path| load_probe(&xi, path))
        .collect::<Result<_, _>>()?;
    let meet = intersect(&loaded).map_err(compute_fail)?;
    let mut report = Report::new("probes intersect", "probe-intersection");
    report.line(format!("site: {label}"));
    for p in &loaded {
        report.line(format!("probe: {}", p.display_name()));
    }
    report.line(format!("intersection: {}", meet.display_name()));
    report.json = json!({
        "site": label,
        "probes": loaded.iter().map(probe_json).collect::<Vec<_>>(),
        "intersection": probe_json(&meet),
    });
    Ok(report)
}
