//! Commands about sites themselves: validation, the catalog listing, and
//! the identity-colimit/terminal-object comparison.

use serde_json::json;
use xilab_core::fincat::{catalog, validate_category, CATALOG_NAMES};
use xilab_core::SizeGuard;

use crate::io::load_site_raw;
use crate::report::Report;
use crate::CmdFail;

pub fn cat_validate(category: &str, guard: &SizeGuard) -> Result<Report, CmdFail> {
    let raw = load_site_raw(category)?;
    let site = validate_category(&raw, guard).map_err(|e| CmdFail::Usage(e.to_string()))?;
    let terminal = site.terminal_object();
    let mut report = Report::new("cat-validate", "category-validation");
    report.line(format!("category: {category}"));
    report.line(format!("objects: {}", site.object_count()));
    report.line(format!("morphisms: {}", site.mor_count()));
    report.line("identity and associativity laws: ok");
    report.line(format!(
        "terminal object: {}",
        terminal.as_ref().map_or("none".to_string(), |t| t.to_string())
    ));
    report.json = json!({
        "category": category,
        "objects": site.object_count(),
        "morphisms": site.mor_count(),
        "laws_ok": true,
        "terminal_object": terminal.as_ref().map(|t| t.to_string()),
    });
    Ok(report)
}

pub fn cat_catalog() -> Result<Report, CmdFail> {
    let mut report = Report::new("cat-catalog", "catalog-listing");
    let mut rows = Vec::new();
    let mut csv = String::from("name,objects,morphisms,terminal_object\n");
    for name in CATALOG_NAMES {
        let site = catalog(name).map_err(|e| CmdFail::Internal(e.to_string()))?;
        let terminal = site
            .terminal_object()
            .map_or("none".to_string(), |t| t.to_string());
        report.line(format!(
            "{name}: {} objects, {} morphisms, terminal {terminal}",
            site.object_count(),
            site.mor_count()
        ));
        csv.push_str(&format!(
            "{name},{},{},{terminal}\n",
            site.object_count(),
            site.mor_count()
        ));
        rows.push(json!({
            "name": name,
            "objects": site.object_count(),
            "morphisms": site.mor_count(),
            "terminal_object": terminal,
        }));
    }
    report.json = json!({ "sites": rows });
    report.csv = Some(csv);
    Ok(report)
}

pub fn colimit_identity(category: &str, guard: &SizeGuard) -> Result<Report, CmdFail> {
    let (label, site) = crate::io::load_site(category, guard)?;
    let colimit = site.identity_colimit();
    let terminal = site.terminal_object();
    let colimit_vertex = colimit.as_ref().map(|c| c.vertex.clone());
    if colimit_vertex != terminal {
        // Their agreement is a theorem about every finite category, so a
        // mismatch can only be a bug in one of the two searches.
        return Err(CmdFail::Internal(format!(
            "identity colimit {:?} disagrees with terminal object {:?} on {label}",
            colimit_vertex.map(|v| v.to_string()),
            terminal.map(|t| t.to_string()),
        )));
    }
    let mut report = Report::new("colimit-identity", "identity-colimit");
    report.line(format!("category: {label}"));
    match &colimit {
        Some(c) => {
            report.line(format!("identity colimit: {}", c.vertex));
            for (o, leg) in &c.legs {
                report.line(format!("  leg {o}: {leg}"));
            }
        }
        None => report.line("identity colimit: none"),
    }
    report.line(format!(
        "terminal object: {}",
        terminal.as_ref().map_or("none".to_string(), |t| t.to_string())
    ));
    report.line("agreement: ok");
    report.json = json!({
        "category": label,
        "identity_colimit": colimit.as_ref().map(|c| json!({
            "vertex": c.vertex.to_string(),
            "legs": c.legs.iter()
                .map(|(o, m)| (o.to_string(), m.to_string()))
                .collect::<std::collections::BTreeMap<_, _>>(),
        })),
        "terminal_object": terminal.as_ref().map(|t| t.to_string()),
        "agree": true,
    });
    Ok(report)
}
