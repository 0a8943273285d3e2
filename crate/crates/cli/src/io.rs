//! Input loading. Everything a command reads is either a catalog name or a
//! JSON file in the formats of docs/formats.md; every problem found here is
//! a usage error.

use std::path::Path;
use std::sync::Arc;

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use xilab_core::fincat::{catalog, catalog_raw, validate_category, FiniteCategory, CATALOG_NAMES};
use xilab_core::lsc::{build_xi, Probe, RawProbe, Xi};
use xilab_core::presheaf::{NatTrans, Presheaf, RawNatTrans, RawPresheaf};
use xilab_core::rgraph::{GraphMap, RawGraph, RawGraphMap, RawSubgraph, ReflexiveGraph, Subgraph};
use xilab_core::SizeGuard;

use crate::CmdFail;

/// On-disk shape of a reflexive-graph map: the two graphs plus the name
/// tables, self-contained in one file.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RawGraphMapFile {
    pub source: RawGraph,
    pub target: RawGraph,
    #[serde(flatten)]
    pub map: RawGraphMap,
}

pub fn read_json<T: DeserializeOwned>(path: &Path) -> Result<T, CmdFail> {
    let bytes = std::fs::read(path)
        .map_err(|e| CmdFail::Usage(format!("cannot read {}: {e}", path.display())))?;
    serde_json::from_slice(&bytes)
        .map_err(|e| CmdFail::Usage(format!("{} is not valid: {e}", path.display())))
}

fn usage(e: xilab_core::Error) -> CmdFail {
    CmdFail::Usage(e.to_string())
}

/// A `--category` value is a catalog name or a path to a category file.
pub fn load_site(
    value: &str,
    guard: &SizeGuard,
) -> Result<(String, Arc<FiniteCategory>), CmdFail> {
    if CATALOG_NAMES.contains(&value) {
        return Ok((value.to_string(), catalog(value).map_err(usage)?));
    }
    let path = Path::new(value);
    if !path.exists() {
        return Err(CmdFail::Usage(format!(
            "{value:?} is neither a catalog site ({}) nor a file",
            CATALOG_NAMES.join(", ")
        )));
    }
    let raw = read_json(path)?;
    let site = validate_category(&raw, guard).map_err(usage)?;
    Ok((value.to_string(), site))
}

/// Raw form of a `--category` value, for validation reports.
pub fn load_site_raw(value: &str) -> Result<xilab_core::fincat::RawCategory, CmdFail> {
    if CATALOG_NAMES.contains(&value) {
        return catalog_raw(value).map_err(usage);
    }
    let path = Path::new(value);
    if !path.exists() {
        return Err(CmdFail::Usage(format!(
            "{value:?} is neither a catalog site ({}) nor a file",
            CATALOG_NAMES.join(", ")
        )));
    }
    read_json(path)
}

pub fn load_xi(site: &Arc<FiniteCategory>, guard: &SizeGuard) -> Result<Xi, CmdFail> {
    build_xi(site, guard).map_err(crate::compute_fail)
}

pub fn load_presheaf(
    site: &Arc<FiniteCategory>,
    path: &Path,
    guard: &SizeGuard,
) -> Result<Presheaf, CmdFail> {
    let raw: RawPresheaf = read_json(path)?;
    Presheaf::from_raw(site, &raw, guard).map_err(usage)
}

pub fn load_map(
    site: &Arc<FiniteCategory>,
    path: &Path,
    guard: &SizeGuard,
) -> Result<NatTrans, CmdFail> {
    let raw: RawNatTrans = read_json(path)?;
    NatTrans::from_raw(site, &raw, guard).map_err(usage)
}

pub fn load_probe(xi: &Xi, path: &Path) -> Result<Probe, CmdFail> {
    let raw: RawProbe = read_json(path)?;
    Probe::from_raw(xi, &raw).map_err(usage)
}

pub fn load_graph(path: &Path) -> Result<ReflexiveGraph, CmdFail> {
    let raw: RawGraph = read_json(path)?;
    ReflexiveGraph::from_raw(&raw).map_err(usage)
}

pub fn load_graph_map(path: &Path) -> Result<GraphMap, CmdFail> {
    let raw: RawGraphMapFile = read_json(path)?;
    let source = ReflexiveGraph::from_raw(&raw.source).map_err(usage)?;
    let target = ReflexiveGraph::from_raw(&raw.target).map_err(usage)?;
    GraphMap::from_raw(&source, &target, &raw.map).map_err(usage)
}

pub fn load_subgraph(ambient: &ReflexiveGraph, path: &Path) -> Result<Subgraph, CmdFail> {
    let raw: RawSubgraph = read_json(path)?;
    Subgraph::from_raw(ambient, &raw).map_err(usage)
}
