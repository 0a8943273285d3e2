//! Commands for the calculus of non-singular maps: the defect test, the
//! coreflection into the petit topos, its hom-sets, and cartesianness.

use std::path::Path;

use serde_json::json;
use xilab_core::nonsing::{
    coreflect as core_coreflect, is_cartesian_wrt, is_nonsingular, petit_hom as core_petit_hom,
};
use xilab_core::presheaf::NatTrans;
use xilab_core::SizeGuard;

use crate::io::{load_map, load_presheaf, load_probe, load_site, load_xi};
use crate::report::Report;
use crate::{compute_fail, CmdFail};

pub fn nonsingular(category: &str, map: &Path, guard: &SizeGuard) -> Result<Report, CmdFail> {
    let (label, site) = load_site(category, guard)?;
    let f = load_map(&site, map, guard)?;
    let defect = is_nonsingular(&f).map_err(compute_fail)?;
    let mut report = Report::new("nonsingular", "nonsingular-map");
    report.line(format!("site: {label}"));
    report.line(format!("verdict: {}", if defect.is_empty() { "non-singular" } else { "singular" }));
    for w in defect.witnesses() {
        report.line(format!("  {w}"));
    }
    if defect.truncated() {
        report.line("  (more witnesses exist)");
    }
    report.pass = defect.is_empty();
    report.json = json!({
        "site": label,
        "nonsingular": defect.is_empty(),
        "witnesses": defect.witnesses().iter().map(|w| json!({
            "object": w.object.to_string(),
            "element": w.element.to_string(),
            "kernel_of_element": w.kernel_of_element.to_string(),
            "kernel_of_image": w.kernel_of_image.to_string(),
        })).collect::<Vec<_>>(),
        "truncated": defect.truncated(),
    });
    Ok(report)
}

pub fn coreflect(category: &str, map: &Path, guard: &SizeGuard) -> Result<Report, CmdFail> {
    let (label, site) = load_site(category, guard)?;
    let f = load_map(&site, map, guard)?;
    let coref = core_coreflect(&f).map_err(compute_fail)?;
    let mut report = Report::new("coreflect", "coreflection");
    report.line(format!("site: {label}"));
    let mut kept = Vec::new();
    for c in 0..site.object_count() {
        let names: Vec<String> = coref
            .sub
            .selection(c)
            .iter()
            .map(|&e| f.source().elem(c, e).to_string())
            .collect();
        report.line(format!(
            "{}: keeps {} of {} elements: {}",
            site.objects()[c],
            names.len(),
            f.source().size(c),
            if names.is_empty() {
                "-".to_string()
            } else {
                names.join(", ")
            }
        ));
        kept.push(json!({
            "object": site.objects()[c].to_string(),
            "kept": names,
            "of": f.source().size(c),
        }));
    }
    let restricted_ok = is_nonsingular(&coref.restricted)
        .map_err(compute_fail)?
        .is_empty();
    if !restricted_ok {
        return Err(CmdFail::Internal(
            "restriction to the coreflection is still singular".to_string(),
        ));
    }
    report.line("restriction is non-singular: ok");
    report.json = json!({
        "site": label,
        "kept": kept,
        "restricted": coref.restricted.to_raw(),
    });
    Ok(report)
}

pub fn petit_hom(
    category: &str,
    presheaves: &[std::path::PathBuf],
    guard: &SizeGuard,
) -> Result<Report, CmdFail> {
    let [x_path, y_path] = presheaves else {
        return Err(CmdFail::Usage(
            "petit-hom needs exactly two --presheaf files: source, then target".to_string(),
        ));
    };
    let (label, site) = load_site(category, guard)?;
    let x = load_presheaf(&site, x_path, guard)?;
    let y = load_presheaf(&site, y_path, guard)?;
    let maps = core_petit_hom(&x, &y, guard).map_err(compute_fail)?;
    let mut report = Report::new("petit-hom", "petit-hom");
    report.line(format!("site: {label}"));
    report.line(format!("non-singular maps: {}", maps.len()));
    let mut rows = Vec::new();
    for (i, f) in maps.iter().enumerate() {
        report.line(format!("  map {i}: {}", describe_map(f)));
        rows.push(json!(f.to_raw().components));
    }
    report.json = json!({ "site": label, "count": maps.len(), "maps": rows });
    Ok(report)
}

pub fn cartesian(
    category: &str,
    map: &Path,
    probe: &Path,
    guard: &SizeGuard,
) -> Result<Report, CmdFail> {
    let (label, site) = load_site(category, guard)?;
    let f = load_map(&site, map, guard)?;
    let xi = load_xi(&site, guard)?;
    let p = load_probe(&xi, probe)?;
    if !p.is_saturated() {
        return Err(CmdFail::Usage(format!(
            "probe {} is not saturated, so it has no skeleton comonad; \
             saturate it first",
            p.display_name()
        )));
    }
    let verdict = is_cartesian_wrt(&p, &f).map_err(compute_fail)?;
    let mut report = Report::new("cartesian", "cartesian-maps");
    report.line(format!("site: {label}"));
    report.line(format!("probe: {}", p.display_name()));
    report.line(format!(
        "cartesian: {}",
        if verdict.cartesian { "yes" } else { "no" }
    ));
    if let Some((o, e)) = &verdict.witness {
        report.line(format!(
            "  witness: element {e} of {o} lies over the target skeleton but outside the source skeleton"
        ));
    }
    report.pass = verdict.cartesian;
    report.json = json!({
        "site": label,
        "probe": p.to_raw(),
        "cartesian": verdict.cartesian,
        "witness": verdict.witness.as_ref().map(|(o, e)| json!({
            "object": o.to_string(),
            "element": e.to_string(),
        })),
    });
    Ok(report)
}

/// Compact one-line rendering of a map's component tables.
fn describe_map(f: &NatTrans) -> String {
    let site = f.source().site();
    (0..site.object_count())
        .map(|c| {
            let assignments: Vec<String> = (0..f.source().size(c))
                .map(|e| {
                    format!(
                        "{}->{}",
                        f.source().elem(c, e),
                        f.target().elem(c, f.comp(c, e))
                    )
                })
                .collect();
            if assignments.is_empty() {
                format!("{}: -", site.objects()[c])
            } else {
                format!("{}: {}", site.objects()[c], assignments.join(" "))
            }
        })
        .collect::<Vec<_>>()
        .join(" | ")
}
