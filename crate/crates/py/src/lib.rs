//! Python bindings for the presheaf-topos workbench.
//!
//! Exposes the main types as classes (`Site`, `Presheaf`, `PresheafMap`,
//! `Classifier`, `Probe`, `Graph`, `GraphMap`) plus module functions that
//! return whole verification reports as JSON strings. All computations are
//! exact and deterministic; the element budget honors `XI_LAB_GUARD` just
//! like the CLI.
//!
//! Usage from Python:
//!
//!     import xilab
//!     clf = xilab.Site.catalog("delta1").classifier()
//!     clf.congruence_names("[1]")   # ['non-loop', 'loop', 'total']

use std::collections::BTreeMap;
use std::sync::Arc;

use pyo3::exceptions::{PyRuntimeError, PyValueError};
use pyo3::prelude::*;

use xilab_core::error::Error as CoreError;
use xilab_core::fincat::{catalog, validate_category, FiniteCategory, RawCategory, CATALOG_NAMES};
use xilab_core::guard::SizeGuard;
use xilab_core::lsc::{self, build_xi, Xi};
use xilab_core::nonsing::{coreflect, is_cartesian_wrt, is_nonsingular, petit_hom};
use xilab_core::presheaf::{
    enumerate_presheaves, hom_set, terminal, NatTrans, Presheaf as CorePresheaf, RawNatTrans,
    RawPresheaf,
};
use xilab_core::rgraph::{
    self, classify_lightly_dense, cohesion, convert, convert_map, sigma_fast, to_dot, EdgeImage,
    GraphMap as CoreGraphMap, RawEdge, RawGraph, RawGraphMap, RawSubgraph, ReflexiveGraph,
    Subgraph, XI_LOOP,
};
use xilab_core::shell::{check_shell_axioms, roundtrip_census, skeleton, ShellSample};

fn guard() -> SizeGuard {
    SizeGuard::from_env()
}

/// Internal errors are invariant violations; everything else blames the input.
fn py_err(e: CoreError) -> PyErr {
    match e {
        CoreError::Internal { .. } => PyRuntimeError::new_err(e.to_string()),
        _ => PyValueError::new_err(e.to_string()),
    }
}

fn json_err(e: serde_json::Error) -> PyErr {
    PyValueError::new_err(format!("invalid JSON: {e}"))
}

fn to_json<T: serde::Serialize>(value: &T) -> PyResult<String> {
    serde_json::to_string_pretty(value)
        .map_err(|e| PyRuntimeError::new_err(format!("report serialization failed: {e}")))
}

fn require_same_site(a: &Arc<FiniteCategory>, b: &Arc<FiniteCategory>) -> PyResult<()> {
    if xilab_core::fincat::same_site(a, b) {
        Ok(())
    } else {
        Err(PyValueError::new_err(
            "the arguments live over different sites",
        ))
    }
}

/// A validated finite category, the site all presheaves index over.
#[pyclass(frozen)]
struct Site {
    inner: Arc<FiniteCategory>,
}

#[pymethods]
impl Site {
    /// Load one of the built-in sites by name; see `catalog_names()`.
    #[staticmethod]
    fn catalog(name: &str) -> PyResult<Site> {
        Ok(Site {
            inner: catalog(name).map_err(py_err)?,
        })
    }

    /// Validate a category given as JSON (objects, morphisms, composition).
    #[staticmethod]
    fn from_json(text: &str) -> PyResult<Site> {
        let raw: RawCategory = serde_json::from_str(text).map_err(json_err)?;
        Ok(Site {
            inner: validate_category(&raw, &guard()).map_err(py_err)?,
        })
    }

    fn to_json(&self) -> PyResult<String> {
        to_json(&self.inner.to_raw())
    }

    fn objects(&self) -> Vec<String> {
        self.inner.objects().iter().map(|o| o.as_str().to_string()).collect()
    }

    /// (name, source object, target object) for every morphism.
    fn morphisms(&self) -> Vec<(String, String, String)> {
        self.inner
            .mors()
            .iter()
            .map(|m| {
                (
                    m.id.as_str().to_string(),
                    self.inner.objects()[m.src].as_str().to_string(),
                    self.inner.objects()[m.dst].as_str().to_string(),
                )
            })
            .collect()
    }

    fn object_count(&self) -> usize {
        self.inner.object_count()
    }

    fn morphism_count(&self) -> usize {
        self.inner.mor_count()
    }

    fn terminal_object(&self) -> Option<String> {
        self.inner.terminal_object().map(|o| o.as_str().to_string())
    }

    /// Vertex of the colimit of the identity functor, when it exists.
    /// Always equals the terminal object on the catalog sites.
    fn identity_colimit_vertex(&self) -> Option<String> {
        self.inner
            .identity_colimit()
            .map(|c| c.vertex.as_str().to_string())
    }

    /// Compute the local state classifier over this site.
    fn classifier(&self) -> PyResult<Classifier> {
        Ok(Classifier {
            xi: build_xi(&self.inner, &guard()).map_err(py_err)?,
        })
    }

    fn terminal_presheaf(&self) -> Presheaf {
        Presheaf {
            inner: terminal(&self.inner),
        }
    }

    /// Every presheaf with at most `bound` elements per object, up to
    /// carrier renaming.
    #[pyo3(signature = (bound=2))]
    fn presheaves(&self, bound: usize) -> PyResult<Vec<Presheaf>> {
        Ok(enumerate_presheaves(&self.inner, bound, &guard())
            .map_err(py_err)?
            .into_iter()
            .map(|inner| Presheaf { inner })
            .collect())
    }

    fn __repr__(&self) -> String {
        format!(
            "Site({} objects, {} morphisms)",
            self.inner.object_count(),
            self.inner.mor_count()
        )
    }
}

/// A presheaf over a fixed site: named elements per object plus an action
/// table for every morphism.
#[pyclass(frozen)]
struct Presheaf {
    inner: CorePresheaf,
}

#[pymethods]
impl Presheaf {
    /// Load a presheaf from JSON ({"carrier": {...}, "action": [...]}).
    #[staticmethod]
    fn from_json(site: &Site, text: &str) -> PyResult<Presheaf> {
        let raw: RawPresheaf = serde_json::from_str(text).map_err(json_err)?;
        Ok(Presheaf {
            inner: CorePresheaf::from_raw(&site.inner, &raw, &guard()).map_err(py_err)?,
        })
    }

    fn to_json(&self) -> PyResult<String> {
        to_json(&self.inner.to_raw())
    }

    fn site(&self) -> Site {
        Site {
            inner: self.inner.site().clone(),
        }
    }

    fn carrier(&self, object: &str) -> PyResult<Vec<String>> {
        let o = self
            .inner
            .site()
            .object_index(&object.into())
            .ok_or_else(|| PyValueError::new_err(format!("unknown object {object:?}")))?;
        Ok(self
            .inner
            .carrier(o)
            .iter()
            .map(|e| e.as_str().to_string())
            .collect())
    }

    fn total_size(&self) -> usize {
        self.inner.total_size()
    }

    /// Global points, each as an object -> element dictionary.
    fn points(&self) -> PyResult<Vec<BTreeMap<String, String>>> {
        let site = self.inner.site();
        let pts = lsc::points(&self.inner, &guard()).map_err(py_err)?;
        Ok(pts
            .iter()
            .map(|t| {
                (0..site.object_count())
                    .map(|o| {
                        (
                            site.objects()[o].as_str().to_string(),
                            self.inner.elem(o, t.comp(o, 0)).as_str().to_string(),
                        )
                    })
                    .collect()
            })
            .collect())
    }

    /// Every natural transformation into `other`.
    fn hom(&self, other: &Presheaf) -> PyResult<Vec<PresheafMap>> {
        require_same_site(self.inner.site(), other.inner.site())?;
        Ok(hom_set(&self.inner, &other.inner, &guard())
            .map_err(py_err)?
            .into_iter()
            .map(|inner| PresheafMap { inner })
            .collect())
    }

    /// Only the non-singular maps into `other`: the hom-set of the petit topos.
    fn petit_hom(&self, other: &Presheaf) -> PyResult<Vec<PresheafMap>> {
        require_same_site(self.inner.site(), other.inner.site())?;
        Ok(petit_hom(&self.inner, &other.inner, &guard())
            .map_err(py_err)?
            .into_iter()
            .map(|inner| PresheafMap { inner })
            .collect())
    }

    fn __repr__(&self) -> String {
        format!("Presheaf({} elements)", self.inner.total_size())
    }
}

/// A natural transformation between presheaves over the same site.
#[pyclass(frozen)]
struct PresheafMap {
    inner: NatTrans,
}

#[pymethods]
impl PresheafMap {
    /// Load a self-contained map from JSON ({"source", "target", "components"}).
    #[staticmethod]
    fn from_json(site: &Site, text: &str) -> PyResult<PresheafMap> {
        let raw: RawNatTrans = serde_json::from_str(text).map_err(json_err)?;
        Ok(PresheafMap {
            inner: NatTrans::from_raw(&site.inner, &raw, &guard()).map_err(py_err)?,
        })
    }

    fn to_json(&self) -> PyResult<String> {
        to_json(&self.inner.to_raw())
    }

    fn source(&self) -> Presheaf {
        Presheaf {
            inner: self.inner.source().clone(),
        }
    }

    fn target(&self) -> Presheaf {
        Presheaf {
            inner: self.inner.target().clone(),
        }
    }

    /// self after other, i.e. the composite self . other.
    fn compose(&self, other: &PresheafMap) -> PyResult<PresheafMap> {
        Ok(PresheafMap {
            inner: self.inner.compose(&other.inner).map_err(py_err)?,
        })
    }

    /// True when every element's kernel is preserved exactly.
    fn is_nonsingular(&self) -> PyResult<bool> {
        Ok(is_nonsingular(&self.inner).map_err(py_err)?.is_empty())
    }

    /// Human-readable witnesses of singularity; empty for non-singular maps.
    fn singularity_witnesses(&self) -> PyResult<Vec<String>> {
        Ok(is_nonsingular(&self.inner)
            .map_err(py_err)?
            .witnesses()
            .iter()
            .map(|w| w.to_string())
            .collect())
    }

    /// The largest non-singular restriction, as (inclusion, restricted map).
    /// The inclusion's source is the coreflected subpresheaf.
    fn coreflect(&self) -> PyResult<(PresheafMap, PresheafMap)> {
        let c = coreflect(&self.inner).map_err(py_err)?;
        Ok((
            PresheafMap { inner: c.inclusion },
            PresheafMap { inner: c.restricted },
        ))
    }

    fn __repr__(&self) -> String {
        format!(
            "PresheafMap({} -> {} elements)",
            self.inner.source().total_size(),
            self.inner.target().total_size()
        )
    }
}

/// The local state classifier of a site: at each object, all congruences on
/// the incoming-arrow presheaf, ordered and named.
#[pyclass(frozen)]
struct Classifier {
    xi: Xi,
}

#[pymethods]
impl Classifier {
    fn site(&self) -> Site {
        Site {
            inner: self.xi.site().clone(),
        }
    }

    fn presheaf(&self) -> Presheaf {
        Presheaf {
            inner: self.xi.presheaf().clone(),
        }
    }

    /// Congruence names at one object, coarsest ("total") last.
    fn congruence_names(&self, object: &str) -> PyResult<Vec<String>> {
        let site = self.xi.site();
        let o = site
            .object_index(&object.into())
            .ok_or_else(|| PyValueError::new_err(format!("unknown object {object:?}")))?;
        Ok((0..self.xi.congruences(o).len())
            .map(|i| self.xi.name(o, i).to_string())
            .collect())
    }

    /// The singularity measurement of a presheaf: object -> element -> label.
    fn sigma(&self, x: &Presheaf) -> PyResult<BTreeMap<String, BTreeMap<String, String>>> {
        require_same_site(self.xi.site(), x.inner.site())?;
        let t = lsc::sigma(&self.xi, &x.inner).map_err(py_err)?;
        let site = self.xi.site();
        Ok((0..site.object_count())
            .map(|o| {
                (
                    site.objects()[o].as_str().to_string(),
                    (0..x.inner.size(o))
                        .map(|i| {
                            (
                                x.inner.elem(o, i).as_str().to_string(),
                                self.xi.name(o, t.comp(o, i)).to_string(),
                            )
                        })
                        .collect(),
                )
            })
            .collect())
    }

    /// Build a probe from an object -> congruence names selection. The
    /// selection must be closed under restriction along all morphisms.
    fn probe(&self, selection: BTreeMap<String, Vec<String>>) -> PyResult<Probe> {
        Ok(Probe {
            inner: lsc::Probe::from_raw(&self.xi, &selection).map_err(py_err)?,
        })
    }

    /// Every probe, i.e. every subpresheaf of the classifier.
    fn probes(&self) -> PyResult<Vec<Probe>> {
        Ok(lsc::all_probes(&self.xi, &guard())
            .map_err(py_err)?
            .into_iter()
            .map(|inner| Probe { inner })
            .collect())
    }

    /// The probe selecting everything; always saturated.
    fn full_probe(&self) -> Probe {
        Probe {
            inner: lsc::Probe::all(&self.xi),
        }
    }

    fn __repr__(&self) -> String {
        format!(
            "Classifier({} congruences)",
            self.xi.presheaf().total_size()
        )
    }
}

/// A subpresheaf of the classifier: one congruence selection per object,
/// closed under restriction.
#[pyclass(frozen)]
struct Probe {
    inner: lsc::Probe,
}

#[pymethods]
impl Probe {
    fn selection(&self) -> BTreeMap<String, Vec<String>> {
        self.inner.to_raw()
    }

    /// Saturated means upward closed in the kernel order at every object;
    /// exactly the saturated probes induce skeleton comonads.
    fn is_saturated(&self) -> bool {
        self.inner.is_saturated()
    }

    fn saturate(&self) -> Probe {
        Probe {
            inner: self.inner.saturate(),
        }
    }

    fn intersect(&self, other: &Probe) -> PyResult<Probe> {
        Ok(Probe {
            inner: lsc::intersect(&[self.inner.clone(), other.inner.clone()])
                .map_err(py_err)?,
        })
    }

    /// The part of `x` this probe keeps, as (skeleton, inclusion into x).
    /// Requires a saturated probe to be comonadic, but computes either way.
    fn skeleton(&self, x: &Presheaf) -> PyResult<(Presheaf, PresheafMap)> {
        require_same_site(self.inner.xi().site(), x.inner.site())?;
        let (sk, incl) = skeleton(&self.inner, &x.inner).map_err(py_err)?;
        Ok((Presheaf { inner: sk }, PresheafMap { inner: incl }))
    }

    /// Whether the map interacts with this probe's skeletons by pullback.
    /// Raises ValueError on unsaturated probes: no comonad, no question.
    fn is_cartesian(&self, f: &PresheafMap) -> PyResult<bool> {
        require_same_site(self.inner.xi().site(), f.inner.source().site())?;
        Ok(is_cartesian_wrt(&self.inner, &f.inner)
            .map_err(py_err)?
            .cartesian)
    }

    fn __repr__(&self) -> String {
        format!("Probe({})", self.inner.display_name())
    }
}

/// A finite reflexive graph: nodes plus named non-degenerate edges. Each
/// node implicitly carries its degenerate loop, written "~node".
#[pyclass(frozen)]
struct Graph {
    inner: ReflexiveGraph,
}

impl Graph {
    fn subgraph(&self, nodes: Vec<String>, edges: Vec<String>) -> PyResult<Subgraph> {
        let raw = RawSubgraph { nodes, edges };
        Subgraph::from_raw(&self.inner, &raw).map_err(py_err)
    }
}

#[pymethods]
impl Graph {
    /// Build a graph from node names and (edge id, source, target) triples.
    #[new]
    fn new(nodes: Vec<String>, edges: Vec<(String, String, String)>) -> PyResult<Graph> {
        let raw = RawGraph {
            nodes,
            edges: edges
                .into_iter()
                .map(|(id, src, tgt)| RawEdge { id, src, tgt })
                .collect(),
        };
        Ok(Graph {
            inner: ReflexiveGraph::from_raw(&raw).map_err(py_err)?,
        })
    }

    #[staticmethod]
    fn from_json(text: &str) -> PyResult<Graph> {
        let raw: RawGraph = serde_json::from_str(text).map_err(json_err)?;
        Ok(Graph {
            inner: ReflexiveGraph::from_raw(&raw).map_err(py_err)?,
        })
    }

    fn to_json(&self) -> PyResult<String> {
        to_json(&self.inner.to_raw())
    }

    /// k nodes, no edges.
    #[staticmethod]
    fn discrete(k: usize) -> Graph {
        Graph {
            inner: ReflexiveGraph::discrete(k),
        }
    }

    /// k nodes, one edge in each direction between every ordered pair.
    #[staticmethod]
    fn codiscrete(k: usize) -> Graph {
        Graph {
            inner: ReflexiveGraph::codiscrete(k),
        }
    }

    fn nodes(&self) -> Vec<String> {
        self.inner
            .nodes()
            .iter()
            .map(|n| n.as_str().to_string())
            .collect()
    }

    fn edges(&self) -> Vec<(String, String, String)> {
        self.inner
            .edges()
            .iter()
            .map(|e| {
                (
                    e.id.as_str().to_string(),
                    self.inner.nodes()[e.src].as_str().to_string(),
                    self.inner.nodes()[e.tgt].as_str().to_string(),
                )
            })
            .collect()
    }

    /// The measurement of every non-degenerate edge: "loop" or "non-loop".
    fn sigma(&self) -> BTreeMap<String, String> {
        let f = sigma_fast(&self.inner);
        self.inner
            .edges()
            .iter()
            .enumerate()
            .map(|(e, edge)| {
                let label = match f.edge_map()[e] {
                    EdgeImage::Edge(XI_LOOP) => "loop",
                    EdgeImage::Edge(_) => "non-loop",
                    EdgeImage::Degenerate(_) => "total",
                };
                (edge.id.as_str().to_string(), label.to_string())
            })
            .collect()
    }

    /// Nodes with no non-degenerate loop: the discrete reflection misses
    /// exactly these when cohesion fails.
    fn points(&self) -> Vec<String> {
        let data = cohesion(&self.inner);
        data.points
            .iter()
            .map(|n| n.as_str().to_string())
            .collect()
    }

    /// Connected components as sorted node-name lists.
    fn components(&self) -> Vec<Vec<String>> {
        cohesion(&self.inner)
            .components
            .iter()
            .map(|c| {
                c.iter()
                    .map(|&n| self.inner.nodes()[n].as_str().to_string())
                    .collect()
            })
            .collect()
    }

    /// The largest subgraph on which points and components agree, as
    /// (node names, edge names).
    fn leibniz_core(&self) -> (Vec<String>, Vec<String>) {
        let core = rgraph::leibniz_core(&self.inner);
        let nodes = core
            .nodes()
            .iter()
            .map(|&n| self.inner.nodes()[n].as_str().to_string())
            .collect();
        let edges = core
            .edges()
            .iter()
            .map(|&e| self.inner.edges()[e].id.as_str().to_string())
            .collect();
        (nodes, edges)
    }

    fn is_leibniz(&self) -> bool {
        rgraph::is_leibniz(&self.inner)
    }

    /// Lightly dense subgraphs contain all loops at their nodes and no
    /// edges between distinct nodes; only these are classified.
    fn is_lightly_dense(&self, nodes: Vec<String>, edges: Vec<String>) -> PyResult<bool> {
        Ok(rgraph::is_lightly_dense(&self.subgraph(nodes, edges)?))
    }

    /// The unique discrete-fiber classifying map of a lightly dense
    /// subgraph, into the one-node classifier graph.
    fn classify(&self, nodes: Vec<String>, edges: Vec<String>) -> PyResult<GraphMap> {
        Ok(GraphMap {
            inner: classify_lightly_dense(&self.subgraph(nodes, edges)?).map_err(py_err)?,
        })
    }

    #[pyo3(signature = (include_degenerate=false))]
    fn to_dot(&self, include_degenerate: bool) -> String {
        to_dot(&self.inner, include_degenerate)
    }

    /// The same graph as a presheaf over the one-object edge site.
    fn to_presheaf(&self) -> Presheaf {
        Presheaf {
            inner: convert(&self.inner),
        }
    }

    fn __repr__(&self) -> String {
        format!(
            "Graph({} nodes, {} edges)",
            self.inner.node_count(),
            self.inner.edge_count()
        )
    }
}

/// A homomorphism of reflexive graphs; edges may degenerate onto nodes.
#[pyclass(frozen)]
struct GraphMap {
    inner: CoreGraphMap,
}

#[pymethods]
impl GraphMap {
    /// Build a map from node and edge assignments by name; "~node" denotes
    /// the degenerate edge on a node.
    #[new]
    fn new(
        source: &Graph,
        target: &Graph,
        nodes: BTreeMap<String, String>,
        edges: BTreeMap<String, String>,
    ) -> PyResult<GraphMap> {
        let raw = RawGraphMap { nodes, edges };
        Ok(GraphMap {
            inner: CoreGraphMap::from_raw(&source.inner, &target.inner, &raw).map_err(py_err)?,
        })
    }

    fn source(&self) -> Graph {
        Graph {
            inner: self.inner.source().clone(),
        }
    }

    fn target(&self) -> Graph {
        Graph {
            inner: self.inner.target().clone(),
        }
    }

    fn node_images(&self) -> BTreeMap<String, String> {
        self.inner.to_raw().nodes
    }

    fn edge_images(&self) -> BTreeMap<String, String> {
        self.inner.to_raw().edges
    }

    fn is_nonsingular(&self) -> bool {
        rgraph::nonsingular_fast(&self.inner).is_none()
    }

    /// The first edge whose kernel coarsens under the map, if any.
    fn singular_witness(&self) -> Option<String> {
        rgraph::nonsingular_fast(&self.inner).map(|e| e.as_str().to_string())
    }

    /// The same map as a natural transformation over the edge site.
    fn to_presheaf_map(&self) -> PresheafMap {
        PresheafMap {
            inner: convert_map(&self.inner),
        }
    }

    fn __repr__(&self) -> String {
        format!(
            "GraphMap({} -> {} nodes)",
            self.inner.source().node_count(),
            self.inner.target().node_count()
        )
    }
}

/// Names accepted by `Site.catalog`.
#[pyfunction]
fn catalog_names() -> Vec<String> {
    CATALOG_NAMES.iter().map(|n| n.to_string()).collect()
}

/// The one-node graph with a single non-degenerate loop.
#[pyfunction]
fn loop_graph() -> Graph {
    Graph {
        inner: rgraph::loop_graph(),
    }
}

/// Two nodes joined by one edge.
#[pyfunction]
fn generic_arrow() -> Graph {
    Graph {
        inner: rgraph::generic_arrow(),
    }
}

/// The singular collapse of the arrow onto the loop.
#[pyfunction]
fn collapse_to_loop() -> GraphMap {
    GraphMap {
        inner: rgraph::collapse_to_loop(),
    }
}

/// Checks that the classifier of the edge site is the one-node graph with
/// loops "loop" and "non-loop"; the report is returned as JSON.
#[pyfunction]
fn classifier_picture_json() -> PyResult<String> {
    to_json(&rgraph::verify_classifier_picture().map_err(py_err)?)
}

/// Full probe/coherent-family round-trip census over a site; JSON report.
#[pyfunction]
#[pyo3(signature = (site, bound=3, label="site"))]
fn census_json(site: &Site, bound: usize, label: &str) -> PyResult<String> {
    to_json(&roundtrip_census(&site.inner, label, bound, &guard()).map_err(py_err)?)
}

/// Shell axiom reports for every probe of a site, checked against all
/// presheaves with at most `bound` elements per object; JSON list.
#[pyfunction]
#[pyo3(signature = (site, bound=2))]
fn shell_axioms_json(site: &Site, bound: usize) -> PyResult<String> {
    let g = guard();
    let xi = build_xi(&site.inner, &g).map_err(py_err)?;
    let probes = lsc::all_probes(&xi, &g).map_err(py_err)?;
    let presheaves = enumerate_presheaves(&site.inner, bound, &g).map_err(py_err)?;
    let sample = ShellSample::generate(presheaves, &g).map_err(py_err)?;
    let rows = probes
        .iter()
        .map(|p| check_shell_axioms(p, &sample, &g))
        .collect::<xilab_core::Result<Vec<_>>>()
        .map_err(py_err)?;
    to_json(&rows)
}

/// Identifies the classifier of the edge site with the Sierpinski object by
/// exhaustive comparison over all graphs up to `node_bound` nodes; JSON.
#[pyfunction]
#[pyo3(signature = (node_bound=3))]
fn sierpinski_json(node_bound: usize) -> PyResult<String> {
    to_json(&rgraph::sierpinski_check(node_bound, &guard()).map_err(py_err)?)
}

/// Reproduces the descent failure showing non-singular maps are not a
/// calibration; JSON report.
#[pyfunction]
fn calibration_json() -> PyResult<String> {
    to_json(&rgraph::calibration_counterexample(&guard()).map_err(py_err)?)
}

#[pymodule]
fn xilab(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<Site>()?;
    m.add_class::<Presheaf>()?;
    m.add_class::<PresheafMap>()?;
    m.add_class::<Classifier>()?;
    m.add_class::<Probe>()?;
    m.add_class::<Graph>()?;
    m.add_class::<GraphMap>()?;
    m.add_function(wrap_pyfunction!(catalog_names, m)?)?;
    m.add_function(wrap_pyfunction!(loop_graph, m)?)?;
    m.add_function(wrap_pyfunction!(generic_arrow, m)?)?;
    m.add_function(wrap_pyfunction!(collapse_to_loop, m)?)?;
    m.add_function(wrap_pyfunction!(classifier_picture_json, m)?)?;
    m.add_function(wrap_pyfunction!(census_json, m)?)?;
    m.add_function(wrap_pyfunction!(shell_axioms_json, m)?)?;
    m.add_function(wrap_pyfunction!(sierpinski_json, m)?)?;
    m.add_function(wrap_pyfunction!(calibration_json, m)?)?;
    Ok(())
}
