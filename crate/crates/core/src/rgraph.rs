//! Reflexive graphs: the direct description of presheaves on the edge site.
//!
//! A reflexive graph stores nodes and non-degenerate edges; the degenerate
//! edge on each node is implicit and materializes as "~node" when the graph
//! is converted to a presheaf. This module carries the fast graph-level
//! versions of the measurement and of non-singularity (cross-checked against
//! the presheaf implementations), the connectedness/points structure with the
//! Leibniz core, the classifier of lightly dense subgraphs, and the two
//! headline computations on this site: the Sierpinski identification of maps
//! into the loop and the failure of descent for non-singular maps.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::sync::{Arc, OnceLock};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fincat::{catalog, id_newtype, same_site, FiniteCategory};
use crate::guard::SizeGuard;
use crate::lsc::{build_xi, Xi};
use crate::nonsing::{calibration_descent_check, DescentReport, PullbackSquare};
use crate::presheaf::{
    are_isomorphic, coproduct, kernel_pair, terminal, Dsu, ElemId, NatTrans, Presheaf,
    Subpresheaf,
};

id_newtype!(NodeId);
id_newtype!(EdgeId);

/// A non-degenerate edge; endpoints are node indices.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct GEdge {
    pub id: EdgeId,
    pub src: usize,
    pub tgt: usize,
}

/// A finite reflexive graph. Only non-degenerate edges are stored; each node
/// implicitly carries its degenerate edge, named by prefixing the node with
/// '~' wherever a name is required.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ReflexiveGraph {
    nodes: Vec<NodeId>,
    edges: Vec<GEdge>,
}

/// On-disk graph shape; degenerate edges are implied, one per node.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RawGraph {
    pub nodes: Vec<String>,
    pub edges: Vec<RawEdge>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RawEdge {
    pub id: String,
    pub src: String,
    pub tgt: String,
}

impl ReflexiveGraph {
    pub fn new(nodes: Vec<NodeId>, edges: Vec<GEdge>) -> Result<ReflexiveGraph> {
        let mut seen = BTreeSet::new();
        for n in &nodes {
            if !seen.insert(n.as_str()) {
                return Err(Error::DuplicateId { id: n.to_string() });
            }
        }
        let mut seen = BTreeSet::new();
        for e in &edges {
            if e.id.as_str().starts_with('~') {
                return Err(Error::MalformedGraph {
                    detail: format!("edge id {} uses the reserved '~' prefix", e.id),
                });
            }
            if !seen.insert(e.id.as_str()) {
                return Err(Error::DuplicateId { id: e.id.to_string() });
            }
            if e.src >= nodes.len() || e.tgt >= nodes.len() {
                return Err(Error::MalformedGraph {
                    detail: format!("edge {} has an endpoint outside the node set", e.id),
                });
            }
        }
        Ok(ReflexiveGraph { nodes, edges })
    }

    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn nodes(&self) -> &[NodeId] {
        &self.nodes
    }

    pub fn edges(&self) -> &[GEdge] {
        &self.edges
    }

    pub fn node_index(&self, id: &NodeId) -> Option<usize> {
        self.nodes.iter().position(|n| n == id)
    }

    pub fn edge_index(&self, id: &EdgeId) -> Option<usize> {
        self.edges.iter().position(|e| &e.id == id)
    }

    pub fn is_loop(&self, e: usize) -> bool {
        self.edges[e].src == self.edges[e].tgt
    }

    /// Loop edges based at the given node.
    pub fn loops_at(&self, n: usize) -> Vec<usize> {
        (0..self.edges.len())
            .filter(|&e| self.is_loop(e) && self.edges[e].src == n)
            .collect()
    }

    /// Only degenerate edges: nodes n0..n{k-1} and nothing else.
    pub fn discrete(k: usize) -> ReflexiveGraph {
        ReflexiveGraph {
            nodes: (0..k).map(|i| NodeId(format!("n{i}"))).collect(),
            edges: Vec::new(),
        }
    }

    /// One edge per ordered pair of nodes; the diagonal pairs are the
    /// degenerate edges, so the stored edges are the off-diagonal pairs.
    pub fn codiscrete(k: usize) -> ReflexiveGraph {
        let nodes: Vec<NodeId> = (0..k).map(|i| NodeId(format!("n{i}"))).collect();
        let mut edges = Vec::new();
        for s in 0..k {
            for t in 0..k {
                if s != t {
                    edges.push(GEdge {
                        id: EdgeId(format!("a{s}{t}")),
                        src: s,
                        tgt: t,
                    });
                }
            }
        }
        ReflexiveGraph { nodes, edges }
    }

    pub fn from_raw(raw: &RawGraph) -> Result<ReflexiveGraph> {
        let nodes: Vec<NodeId> = raw.nodes.iter().map(|n| NodeId(n.clone())).collect();
        let mut edges = Vec::with_capacity(raw.edges.len());
        for e in &raw.edges {
            let src = nodes
                .iter()
                .position(|n| n.as_str() == e.src)
                .ok_or_else(|| Error::MalformedGraph {
                    detail: format!("edge {} starts at unknown node {}", e.id, e.src),
                })?;
            let tgt = nodes
                .iter()
                .position(|n| n.as_str() == e.tgt)
                .ok_or_else(|| Error::MalformedGraph {
                    detail: format!("edge {} ends at unknown node {}", e.id, e.tgt),
                })?;
            edges.push(GEdge {
                id: EdgeId(e.id.clone()),
                src,
                tgt,
            });
        }
        ReflexiveGraph::new(nodes, edges)
    }

    pub fn to_raw(&self) -> RawGraph {
        RawGraph {
            nodes: self.nodes.iter().map(|n| n.to_string()).collect(),
            edges: self
                .edges
                .iter()
                .map(|e| RawEdge {
                    id: e.id.to_string(),
                    src: self.nodes[e.src].to_string(),
                    tgt: self.nodes[e.tgt].to_string(),
                })
                .collect(),
        }
    }
}

/// DOT rendering; degenerate edges are dotted, mirroring hand-drawn pictures.
pub fn to_dot(g: &ReflexiveGraph, include_degenerate: bool) -> String {
    let mut out = String::from("digraph G {\n  rankdir=LR;\n");
    for n in &g.nodes {
        out.push_str(&format!("  \"{n}\";\n"));
    }
    for e in &g.edges {
        out.push_str(&format!(
            "  \"{}\" -> \"{}\" [label=\"{}\"];\n",
            g.nodes[e.src], g.nodes[e.tgt], e.id
        ));
    }
    if include_degenerate {
        for n in &g.nodes {
            out.push_str(&format!(
                "  \"{n}\" -> \"{n}\" [label=\"~{n}\", style=dotted];\n"
            ));
        }
    }
    out.push_str("}\n");
    out
}

/// Where a non-degenerate edge lands under a graph map.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EdgeImage {
    Edge(usize),
    Degenerate(usize),
}

/// A homomorphism of reflexive graphs. Degenerate edges are carried along
/// automatically; `edge_map` records the images of the stored edges only.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GraphMap {
    source: ReflexiveGraph,
    target: ReflexiveGraph,
    node_map: Vec<usize>,
    edge_map: Vec<EdgeImage>,
}

/// On-disk graph map shape: node and edge assignments by name, with "~node"
/// denoting the degenerate edge on a node.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RawGraphMap {
    pub nodes: BTreeMap<String, String>,
    pub edges: BTreeMap<String, String>,
}

impl GraphMap {
    pub fn new(
        source: ReflexiveGraph,
        target: ReflexiveGraph,
        node_map: Vec<usize>,
        edge_map: Vec<EdgeImage>,
    ) -> Result<GraphMap> {
        if node_map.len() != source.node_count() || edge_map.len() != source.edge_count() {
            return Err(Error::MalformedGraph {
                detail: "graph map tables do not match the source carrier".to_string(),
            });
        }
        if node_map.iter().any(|&n| n >= target.node_count()) {
            return Err(Error::MalformedGraph {
                detail: "graph map sends a node outside the target".to_string(),
            });
        }
        for (e, img) in edge_map.iter().enumerate() {
            let (s, t) = (node_map[source.edges[e].src], node_map[source.edges[e].tgt]);
            let ok = match img {
                EdgeImage::Edge(j) => {
                    *j < target.edge_count()
                        && target.edges[*j].src == s
                        && target.edges[*j].tgt == t
                }
                EdgeImage::Degenerate(n) => s == *n && t == *n,
            };
            if !ok {
                return Err(Error::MalformedGraph {
                    detail: format!(
                        "edge {} maps incompatibly with its endpoints",
                        source.edges[e].id
                    ),
                });
            }
        }
        Ok(GraphMap {
            source,
            target,
            node_map,
            edge_map,
        })
    }

    pub fn identity(g: &ReflexiveGraph) -> GraphMap {
        GraphMap {
            source: g.clone(),
            target: g.clone(),
            node_map: (0..g.node_count()).collect(),
            edge_map: (0..g.edge_count()).map(EdgeImage::Edge).collect(),
        }
    }

    pub fn source(&self) -> &ReflexiveGraph {
        &self.source
    }

    pub fn target(&self) -> &ReflexiveGraph {
        &self.target
    }

    pub fn node_map(&self) -> &[usize] {
        &self.node_map
    }

    pub fn edge_map(&self) -> &[EdgeImage] {
        &self.edge_map
    }

    pub fn from_raw(
        source: &ReflexiveGraph,
        target: &ReflexiveGraph,
        raw: &RawGraphMap,
    ) -> Result<GraphMap> {
        let mut node_map = Vec::with_capacity(source.node_count());
        for n in source.nodes() {
            let img = raw.nodes.get(n.as_str()).ok_or_else(|| Error::MalformedGraph {
                detail: format!("node {n} has no assignment"),
            })?;
            let ix = target
                .node_index(&NodeId(img.clone()))
                .ok_or_else(|| Error::MalformedGraph {
                    detail: format!("node {n} maps to unknown node {img}"),
                })?;
            node_map.push(ix);
        }
        let mut edge_map = Vec::with_capacity(source.edge_count());
        for e in source.edges() {
            let img = raw
                .edges
                .get(e.id.as_str())
                .ok_or_else(|| Error::MalformedGraph {
                    detail: format!("edge {} has no assignment", e.id),
                })?;
            let image = if let Some(node) = img.strip_prefix('~') {
                let ix = target
                    .node_index(&NodeId(node.to_string()))
                    .ok_or_else(|| Error::MalformedGraph {
                        detail: format!("edge {} maps to unknown degenerate {img}", e.id),
                    })?;
                EdgeImage::Degenerate(ix)
            } else {
                let ix = target
                    .edge_index(&EdgeId(img.clone()))
                    .ok_or_else(|| Error::MalformedGraph {
                        detail: format!("edge {} maps to unknown edge {img}", e.id),
                    })?;
                EdgeImage::Edge(ix)
            };
            edge_map.push(image);
        }
        GraphMap::new(source.clone(), target.clone(), node_map, edge_map)
    }

    pub fn to_raw(&self) -> RawGraphMap {
        let nodes = self
            .source
            .nodes()
            .iter()
            .enumerate()
            .map(|(i, n)| (n.to_string(), self.target.nodes[self.node_map[i]].to_string()))
            .collect();
        let edges = self
            .source
            .edges()
            .iter()
            .enumerate()
            .map(|(e, ge)| {
                let img = match self.edge_map[e] {
                    EdgeImage::Edge(j) => self.target.edges[j].id.to_string(),
                    EdgeImage::Degenerate(n) => format!("~{}", self.target.nodes[n]),
                };
                (ge.id.to_string(), img)
            })
            .collect();
        RawGraphMap { nodes, edges }
    }
}

/// Cached indices into the edge site: objects [0] < [1], morphisms
/// bang < c0 < c1 < d0 < d1 < id0 < id1.
struct Delta1Ix {
    o0: usize,
    o1: usize,
    bang: usize,
    c0: usize,
    c1: usize,
    d0: usize,
    d1: usize,
    id0: usize,
    id1: usize,
}

pub fn delta1_site() -> &'static Arc<FiniteCategory> {
    static SITE: OnceLock<Arc<FiniteCategory>> = OnceLock::new();
    SITE.get_or_init(|| catalog("delta1").expect("the catalog has the edge site"))
}

fn ix() -> &'static Delta1Ix {
    static IX: OnceLock<Delta1Ix> = OnceLock::new();
    IX.get_or_init(|| {
        let site = delta1_site();
        let m = |name: &str| site.mor_index(&name.into()).expect("edge site morphism");
        Delta1Ix {
            o0: site.object_index(&"[0]".into()).expect("edge site object"),
            o1: site.object_index(&"[1]".into()).expect("edge site object"),
            bang: m("bang"),
            c0: m("c0"),
            c1: m("c1"),
            d0: m("d0"),
            d1: m("d1"),
            id0: m("id0"),
            id1: m("id1"),
        }
    })
}

/// The local state classifier of the edge site, built once.
pub fn delta1_xi() -> &'static Xi {
    static XI: OnceLock<Xi> = OnceLock::new();
    XI.get_or_init(|| {
        build_xi(delta1_site(), &SizeGuard::default()).expect("classifier for the edge site")
    })
}

/// Index of the 'loop' edge in [`xi_graph`].
pub const XI_LOOP: usize = 0;
/// Index of the 'non-loop' edge in [`xi_graph`].
pub const XI_NONLOOP: usize = 1;

/// The classifier as a picture: one node with two non-degenerate loops.
pub fn xi_graph() -> &'static ReflexiveGraph {
    static G: OnceLock<ReflexiveGraph> = OnceLock::new();
    G.get_or_init(|| {
        ReflexiveGraph::new(
            vec![NodeId("pt".to_string())],
            vec![
                GEdge {
                    id: EdgeId("loop".to_string()),
                    src: 0,
                    tgt: 0,
                },
                GEdge {
                    id: EdgeId("non-loop".to_string()),
                    src: 0,
                    tgt: 0,
                },
            ],
        )
        .expect("the classifier picture is a valid graph")
    })
}

/// What the computed classifier of the edge site looks like as a graph.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ClassifierPicture {
    pub node_count: usize,
    pub degenerate_count: usize,
    pub nondegenerate_edges: Vec<String>,
    pub all_nondegenerate_are_loops: bool,
}

/// Cross-checks the computed classifier against the hard-coded picture:
/// one node, one degenerate edge, and the two loops 'loop' and 'non-loop'.
pub fn verify_classifier_picture() -> Result<ClassifierPicture> {
    let xi = delta1_xi();
    let g = convert_back(xi.presheaf())?;
    let mut names: Vec<String> = g.edges().iter().map(|e| e.id.to_string()).collect();
    names.sort();
    let pic = ClassifierPicture {
        node_count: g.node_count(),
        degenerate_count: g.node_count(),
        nondegenerate_edges: names,
        all_nondegenerate_are_loops: (0..g.edge_count()).all(|e| g.is_loop(e)),
    };
    let matches = pic.node_count == 1
        && pic.nondegenerate_edges == ["loop", "non-loop"]
        && pic.all_nondegenerate_are_loops
        && are_isomorphic(&convert(xi_graph()), xi.presheaf()).is_some();
    if !matches {
        return Err(Error::internal(format!(
            "computed classifier does not match the one-node two-loop picture: {pic:?}"
        )));
    }
    Ok(pic)
}

/// The isomorphism from the converted classifier picture to the computed
/// classifier, matching elements by name: the node and its degenerate edge
/// to 'total', and the two loops to their namesakes.
pub fn classifier_renaming() -> NatTrans {
    let xi = delta1_xi();
    let ix = ix();
    let at1 = |name: &str| {
        xi.index_of_name(ix.o1, name)
            .expect("the classifier has this congruence")
    };
    let mut comps = vec![Vec::new(); 2];
    comps[ix.o0] = vec![0];
    comps[ix.o1] = vec![at1("total"), at1("loop"), at1("non-loop")];
    NatTrans::new(convert(xi_graph()), xi.presheaf().clone(), comps)
        .expect("the renaming is natural")
}

/// The generic arrow: two nodes joined by one edge.
pub fn generic_arrow() -> ReflexiveGraph {
    ReflexiveGraph::new(
        vec![NodeId("s".to_string()), NodeId("t".to_string())],
        vec![GEdge {
            id: EdgeId("a".to_string()),
            src: 0,
            tgt: 1,
        }],
    )
    .expect("the generic arrow is a valid graph")
}

/// One node carrying one non-degenerate loop.
pub fn loop_graph() -> ReflexiveGraph {
    ReflexiveGraph::new(
        vec![NodeId("v".to_string())],
        vec![GEdge {
            id: EdgeId("l".to_string()),
            src: 0,
            tgt: 0,
        }],
    )
    .expect("the loop is a valid graph")
}

/// The quotient collapsing the generic arrow onto the loop.
pub fn collapse_to_loop() -> GraphMap {
    GraphMap::new(
        generic_arrow(),
        loop_graph(),
        vec![0, 0],
        vec![EdgeImage::Edge(0)],
    )
    .expect("the collapse is a valid graph map")
}

/// Presents a graph as a presheaf on the edge site. Carrier order: nodes as
/// given; at [1] first the degenerate edges "~node" in node order, then the
/// stored edges.
pub fn convert(g: &ReflexiveGraph) -> Presheaf {
    let site = delta1_site();
    let ix = ix();
    let n = g.node_count();
    let mut carrier = vec![Vec::new(); 2];
    carrier[ix.o0] = g.nodes.iter().map(|v| ElemId(v.to_string())).collect();
    let mut edges: Vec<ElemId> = g.nodes.iter().map(|v| ElemId(format!("~{v}"))).collect();
    edges.extend(g.edges.iter().map(|e| ElemId(e.id.to_string())));
    carrier[ix.o1] = edges;

    let src_of = |e: usize| if e < n { e } else { g.edges[e - n].src };
    let tgt_of = |e: usize| if e < n { e } else { g.edges[e - n].tgt };
    let e_total = n + g.edge_count();
    let mut action = vec![Vec::new(); site.mor_count()];
    action[ix.bang] = (0..n).collect();
    action[ix.c0] = (0..e_total).map(src_of).collect();
    action[ix.c1] = (0..e_total).map(tgt_of).collect();
    action[ix.d0] = (0..e_total).map(src_of).collect();
    action[ix.d1] = (0..e_total).map(tgt_of).collect();
    action[ix.id0] = (0..n).collect();
    action[ix.id1] = (0..e_total).collect();
    Presheaf::new(Arc::clone(site), carrier, action)
        .expect("a validated graph is a presheaf on the edge site")
}

/// Recovers a graph from a presheaf on the edge site; the degenerate edges
/// (the image of the node inclusion) lose their element names.
pub fn convert_back(p: &Presheaf) -> Result<ReflexiveGraph> {
    if !same_site(p.site(), delta1_site()) {
        return Err(Error::NotOverDelta1);
    }
    let ix = ix();
    let nodes: Vec<NodeId> = p
        .carrier(ix.o0)
        .iter()
        .map(|e| NodeId(e.to_string()))
        .collect();
    let mut degenerate = vec![false; p.size(ix.o1)];
    for v in 0..p.size(ix.o0) {
        degenerate[p.act(ix.bang, v)] = true;
    }
    let mut edges = Vec::new();
    for e in 0..p.size(ix.o1) {
        if degenerate[e] {
            continue;
        }
        edges.push(GEdge {
            id: EdgeId(p.elem(ix.o1, e).to_string()),
            src: p.act(ix.d0, e),
            tgt: p.act(ix.d1, e),
        });
    }
    ReflexiveGraph::new(nodes, edges)
}

/// Presents a graph map as a natural transformation between the converted
/// presheaves.
pub fn convert_map(f: &GraphMap) -> NatTrans {
    let xs = convert(&f.source);
    let ys = convert(&f.target);
    let ix = ix();
    let tn = f.target.node_count();
    let mut comps = vec![Vec::new(); 2];
    comps[ix.o0] = f.node_map.clone();
    let mut at_edges: Vec<usize> = f.node_map.clone();
    at_edges.extend(f.edge_map.iter().map(|img| match img {
        EdgeImage::Edge(j) => tn + j,
        EdgeImage::Degenerate(v) => *v,
    }));
    comps[ix.o1] = at_edges;
    NatTrans::new(xs, ys, comps).expect("a validated graph map is natural")
}

/// Recovers a graph map from a natural transformation on the edge site.
pub fn convert_map_back(t: &NatTrans) -> Result<GraphMap> {
    let source = convert_back(t.source())?;
    let target = convert_back(t.target())?;
    let ix = ix();
    // Element index bookkeeping for the target: which elements at [1] are
    // degenerate (and on which node), and the graph index of the rest.
    let p = t.target();
    let mut owner: Vec<Option<usize>> = vec![None; p.size(ix.o1)];
    for v in 0..p.size(ix.o0) {
        owner[p.act(ix.bang, v)] = Some(v);
    }
    let mut edge_of: Vec<Option<usize>> = vec![None; p.size(ix.o1)];
    let mut next = 0usize;
    for e in 0..p.size(ix.o1) {
        if owner[e].is_none() {
            edge_of[e] = Some(next);
            next += 1;
        }
    }
    let q = t.source();
    let mut src_degenerate = vec![false; q.size(ix.o1)];
    for v in 0..q.size(ix.o0) {
        src_degenerate[q.act(ix.bang, v)] = true;
    }
    let node_map: Vec<usize> = (0..q.size(ix.o0)).map(|v| t.comp(ix.o0, v)).collect();
    let mut edge_map = Vec::new();
    for e in 0..q.size(ix.o1) {
        if src_degenerate[e] {
            continue;
        }
        let img = t.comp(ix.o1, e);
        edge_map.push(match owner[img] {
            Some(v) => EdgeImage::Degenerate(v),
            None => EdgeImage::Edge(edge_of[img].expect("non-degenerate image is an edge")),
        });
    }
    GraphMap::new(source, target, node_map, edge_map)
}

/// The measurement at graph level: every node to the point, loops to 'loop',
/// other non-degenerate edges to 'non-loop'.
pub fn sigma_fast(g: &ReflexiveGraph) -> GraphMap {
    let edge_map = (0..g.edge_count())
        .map(|e| EdgeImage::Edge(if g.is_loop(e) { XI_LOOP } else { XI_NONLOOP }))
        .collect();
    GraphMap::new(
        g.clone(),
        xi_graph().clone(),
        vec![0; g.node_count()],
        edge_map,
    )
    .expect("the labeling is a valid graph map")
}

/// The singularity test at graph level: a map is non-singular iff it sends
/// loops to non-degenerate loops and non-loops to non-loops. Returns the
/// first offending edge, if any.
pub fn nonsingular_fast(f: &GraphMap) -> Option<EdgeId> {
    for (e, img) in f.edge_map.iter().enumerate() {
        let bad = match img {
            // Collapsing any non-degenerate edge coarsens its kernel.
            EdgeImage::Degenerate(_) => true,
            // An image of a loop is automatically a loop; a non-loop must
            // not become one.
            EdgeImage::Edge(j) => !f.source.is_loop(e) && f.target.is_loop(*j),
        };
        if bad {
            return Some(f.source.edges[e].id.clone());
        }
    }
    None
}

/// Whether no non-degenerate edge collapses to a degenerate one.
pub fn has_discrete_fibers(f: &GraphMap) -> bool {
    f.edge_map
        .iter()
        .all(|img| matches!(img, EdgeImage::Edge(_)))
}

/// A subgraph: a set of nodes, the implied degenerate edges, and a set of
/// non-degenerate edges whose endpoints are selected.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Subgraph {
    ambient: ReflexiveGraph,
    nodes: BTreeSet<usize>,
    edges: BTreeSet<usize>,
}

/// On-disk subgraph shape: node and edge names within a named ambient.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RawSubgraph {
    pub nodes: Vec<String>,
    pub edges: Vec<String>,
}

impl Subgraph {
    pub fn new(
        ambient: &ReflexiveGraph,
        nodes: BTreeSet<usize>,
        edges: BTreeSet<usize>,
    ) -> Result<Subgraph> {
        if nodes.iter().any(|&n| n >= ambient.node_count())
            || edges.iter().any(|&e| e >= ambient.edge_count())
        {
            return Err(Error::MalformedGraph {
                detail: "subgraph selects outside the ambient graph".to_string(),
            });
        }
        for &e in &edges {
            if !nodes.contains(&ambient.edges[e].src) || !nodes.contains(&ambient.edges[e].tgt) {
                return Err(Error::MalformedGraph {
                    detail: format!(
                        "subgraph keeps edge {} without its endpoints",
                        ambient.edges[e].id
                    ),
                });
            }
        }
        Ok(Subgraph {
            ambient: ambient.clone(),
            nodes,
            edges,
        })
    }

    pub fn full(ambient: &ReflexiveGraph) -> Subgraph {
        Subgraph {
            ambient: ambient.clone(),
            nodes: (0..ambient.node_count()).collect(),
            edges: (0..ambient.edge_count()).collect(),
        }
    }

    /// All nodes, no non-degenerate edges.
    pub fn discrete(ambient: &ReflexiveGraph) -> Subgraph {
        Subgraph {
            ambient: ambient.clone(),
            nodes: (0..ambient.node_count()).collect(),
            edges: BTreeSet::new(),
        }
    }

    pub fn ambient(&self) -> &ReflexiveGraph {
        &self.ambient
    }

    pub fn nodes(&self) -> &BTreeSet<usize> {
        &self.nodes
    }

    pub fn edges(&self) -> &BTreeSet<usize> {
        &self.edges
    }

    pub fn from_raw(ambient: &ReflexiveGraph, raw: &RawSubgraph) -> Result<Subgraph> {
        let mut nodes = BTreeSet::new();
        for n in &raw.nodes {
            nodes.insert(ambient.node_index(&NodeId(n.clone())).ok_or_else(|| {
                Error::MalformedGraph {
                    detail: format!("subgraph names unknown node {n}"),
                }
            })?);
        }
        let mut edges = BTreeSet::new();
        for e in &raw.edges {
            edges.insert(ambient.edge_index(&EdgeId(e.clone())).ok_or_else(|| {
                Error::MalformedGraph {
                    detail: format!("subgraph names unknown edge {e}"),
                }
            })?);
        }
        Subgraph::new(ambient, nodes, edges)
    }

    pub fn to_raw(&self) -> RawSubgraph {
        RawSubgraph {
            nodes: self
                .nodes
                .iter()
                .map(|&n| self.ambient.nodes[n].to_string())
                .collect(),
            edges: self
                .edges
                .iter()
                .map(|&e| self.ambient.edges[e].id.to_string())
                .collect(),
        }
    }

    /// The same selection inside the converted presheaf.
    pub fn to_subpresheaf(&self) -> Subpresheaf {
        let p = convert(&self.ambient);
        let ix = ix();
        let n = self.ambient.node_count();
        let mut sel = vec![BTreeSet::new(); 2];
        sel[ix.o0] = self.nodes.clone();
        sel[ix.o1] = self
            .nodes
            .iter()
            .copied()
            .chain(self.edges.iter().map(|e| n + e))
            .collect();
        Subpresheaf::new(p, sel).expect("an endpoint-closed subgraph is a subpresheaf")
    }
}

/// The points, components, and Leibniz core of a graph.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CohesionData {
    /// The nodes; the discrete part of the graph.
    pub points: Vec<NodeId>,
    /// Partition of node indices by edge connectivity, blocks named by least
    /// member, each block sorted.
    pub components: Vec<Vec<usize>>,
    /// All nodes, their degenerate edges, and the non-degenerate loops.
    pub leibniz_core: Subgraph,
}

pub fn cohesion(g: &ReflexiveGraph) -> CohesionData {
    let mut dsu = Dsu::new(g.node_count());
    for e in g.edges() {
        dsu.union(e.src, e.tgt);
    }
    let mut blocks: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
    for v in 0..g.node_count() {
        blocks.entry(dsu.find(v)).or_default().push(v);
    }
    CohesionData {
        points: g.nodes.clone(),
        components: blocks.into_values().collect(),
        leibniz_core: leibniz_core(g),
    }
}

/// The subgraph of all nodes and all loop edges.
pub fn leibniz_core(g: &ReflexiveGraph) -> Subgraph {
    Subgraph {
        ambient: g.clone(),
        nodes: (0..g.node_count()).collect(),
        edges: (0..g.edge_count()).filter(|&e| g.is_loop(e)).collect(),
    }
}

/// Whether the canonical points-to-components map is a bijection, i.e. the
/// graph consists of loops only.
pub fn is_leibniz(g: &ReflexiveGraph) -> bool {
    let c = cohesion(g);
    c.points.len() == c.components.len()
}

/// A subgraph is lightly dense when it keeps every node and none of its
/// edges joins distinct nodes.
pub fn is_lightly_dense(u: &Subgraph) -> bool {
    lightly_dense_witness(u).is_none()
}

fn lightly_dense_witness(u: &Subgraph) -> Option<String> {
    let g = &u.ambient;
    if let Some(v) = (0..g.node_count()).find(|v| !u.nodes.contains(v)) {
        return Some(format!("node {} is missing", g.nodes[v]));
    }
    if let Some(&e) = u.edges.iter().find(|&&e| !g.is_loop(e)) {
        return Some(format!("edge {} joins distinct nodes", g.edges[e].id));
    }
    None
}

/// The subgraph of the classifier picture carrying the 'loop' edge.
pub fn xi_top_subgraph() -> Subgraph {
    Subgraph {
        ambient: xi_graph().clone(),
        nodes: BTreeSet::from([0]),
        edges: BTreeSet::from([XI_LOOP]),
    }
}

/// The preimage of a subgraph of the target: nodes over selected nodes, and
/// edges whose image edge (or degenerate owner) is selected.
pub fn pullback_subgraph(f: &GraphMap, v: &Subgraph) -> Result<Subgraph> {
    if v.ambient != f.target {
        return Err(Error::SiteMismatch);
    }
    let nodes: BTreeSet<usize> = (0..f.source.node_count())
        .filter(|&n| v.nodes.contains(&f.node_map[n]))
        .collect();
    let edges: BTreeSet<usize> = (0..f.source.edge_count())
        .filter(|&e| match f.edge_map[e] {
            EdgeImage::Edge(j) => v.edges.contains(&j),
            EdgeImage::Degenerate(n) => v.nodes.contains(&n),
        })
        .collect();
    Subgraph::new(&f.source, nodes, edges)
}

/// The classifying map of a lightly dense subgraph: loops kept by `u` go to
/// 'loop', every other non-degenerate edge to 'non-loop'. It is the unique
/// map with discrete fibers pulling the 'loop' subgraph back to `u`.
pub fn classify_lightly_dense(u: &Subgraph) -> Result<GraphMap> {
    if let Some(witness) = lightly_dense_witness(u) {
        return Err(Error::NotLightlyDense { witness });
    }
    let g = &u.ambient;
    let edge_map = (0..g.edge_count())
        .map(|e| {
            EdgeImage::Edge(if g.is_loop(e) && u.edges.contains(&e) {
                XI_LOOP
            } else {
                XI_NONLOOP
            })
        })
        .collect();
    GraphMap::new(
        g.clone(),
        xi_graph().clone(),
        vec![0; g.node_count()],
        edge_map,
    )
    .map_err(|e| Error::internal(format!("classifying labels are not a graph map: {e}")))
}

/// Every subgraph: each node subset together with each subset of the edges
/// it encloses.
pub fn all_subgraphs(g: &ReflexiveGraph, guard: &SizeGuard) -> Result<Vec<Subgraph>> {
    let mut out = Vec::new();
    for node_mask in 0..(1usize << g.node_count()) {
        let nodes: BTreeSet<usize> =
            (0..g.node_count()).filter(|n| node_mask & (1 << n) != 0).collect();
        let inside: Vec<usize> = (0..g.edge_count())
            .filter(|&e| nodes.contains(&g.edges[e].src) && nodes.contains(&g.edges[e].tgt))
            .collect();
        for edge_mask in 0..(1usize << inside.len()) {
            let edges: BTreeSet<usize> = inside
                .iter()
                .enumerate()
                .filter(|(i, _)| edge_mask & (1 << i) != 0)
                .map(|(_, &e)| e)
                .collect();
            out.push(Subgraph {
                ambient: g.clone(),
                nodes: nodes.clone(),
                edges,
            });
            guard.check_elements(out.len(), "subgraph enumeration")?;
        }
    }
    Ok(out)
}

/// Every graph homomorphism between two graphs.
pub fn all_graph_maps(
    x: &ReflexiveGraph,
    y: &ReflexiveGraph,
    guard: &SizeGuard,
) -> Result<Vec<GraphMap>> {
    if x.node_count() > 0 && y.node_count() == 0 {
        return Ok(Vec::new());
    }
    let mut total: usize = 1;
    for _ in 0..x.node_count() {
        total = total.saturating_mul(y.node_count());
    }
    guard.check_elements(total, "node assignments of a graph hom-set")?;

    let mut out = Vec::new();
    let mut node_map = vec![0usize; x.node_count()];
    loop {
        // Candidate images per edge under this node assignment.
        let mut cands: Vec<Vec<EdgeImage>> = Vec::with_capacity(x.edge_count());
        let mut feasible = true;
        for e in x.edges() {
            let (s, t) = (node_map[e.src], node_map[e.tgt]);
            let mut c: Vec<EdgeImage> = (0..y.edge_count())
                .filter(|&j| y.edges[j].src == s && y.edges[j].tgt == t)
                .map(EdgeImage::Edge)
                .collect();
            if s == t {
                c.push(EdgeImage::Degenerate(s));
            }
            if c.is_empty() {
                feasible = false;
                break;
            }
            cands.push(c);
        }
        if feasible {
            let mut pick = vec![0usize; x.edge_count()];
            loop {
                let edge_map: Vec<EdgeImage> =
                    pick.iter().enumerate().map(|(e, &i)| cands[e][i]).collect();
                out.push(GraphMap {
                    source: x.clone(),
                    target: y.clone(),
                    node_map: node_map.clone(),
                    edge_map,
                });
                guard.check_elements(out.len(), "graph hom-set")?;
                let mut i = 0;
                while i < pick.len() {
                    pick[i] += 1;
                    if pick[i] < cands[i].len() {
                        break;
                    }
                    pick[i] = 0;
                    i += 1;
                }
                if i == pick.len() {
                    break;
                }
            }
        }
        let mut i = 0;
        while i < node_map.len() {
            node_map[i] += 1;
            if node_map[i] < y.node_count() {
                break;
            }
            node_map[i] = 0;
            i += 1;
        }
        if i == node_map.len() {
            break;
        }
    }
    Ok(out)
}

/// Node invariant used to cut the permutation search: loop count, non-loop
/// out-degree, non-loop in-degree.
fn node_invariants(n: usize, edges: &[(usize, usize)]) -> Vec<(usize, usize, usize)> {
    let mut inv = vec![(0usize, 0usize, 0usize); n];
    for &(s, t) in edges {
        if s == t {
            inv[s].0 += 1;
        } else {
            inv[s].1 += 1;
            inv[t].2 += 1;
        }
    }
    inv
}

/// The least relabeling of an edge multiset over all node permutations whose
/// relabeling sorts the node invariants. Isomorphic edge multisets produce
/// the same set of candidate relabelings, so this is a canonical form, and
/// the invariant classes cut the permutation count to a product of
/// factorials of class sizes.
fn canonical_edges(n: usize, edges: &[(usize, usize)]) -> Vec<(usize, usize)> {
    let inv = node_invariants(n, edges);
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by_key(|&v| inv[v]);
    let mut best: Option<Vec<(usize, usize)>> = None;
    let mut perm = vec![usize::MAX; n];
    let mut used = vec![false; n];
    // Fill new labels in increasing order; slot k takes any unused node
    // whose invariant matches the k-th entry of the sorted invariant list.
    fn go(
        slot: usize,
        order: &[usize],
        inv: &[(usize, usize, usize)],
        perm: &mut Vec<usize>,
        used: &mut Vec<bool>,
        edges: &[(usize, usize)],
        best: &mut Option<Vec<(usize, usize)>>,
    ) {
        let n = order.len();
        if slot == n {
            let mut relabeled: Vec<(usize, usize)> =
                edges.iter().map(|&(s, t)| (perm[s], perm[t])).collect();
            relabeled.sort_unstable();
            if best.as_ref().map(|b| relabeled < *b).unwrap_or(true) {
                *best = Some(relabeled);
            }
            return;
        }
        let want = inv[order[slot]];
        for u in 0..n {
            if !used[u] && inv[u] == want {
                used[u] = true;
                perm[u] = slot;
                go(slot + 1, order, inv, perm, used, edges, best);
                used[u] = false;
            }
        }
    }
    go(0, &order, &inv, &mut perm, &mut used, edges, &mut best);
    best.unwrap_or_default()
}

/// All reflexive graphs with at most `node_bound` nodes and `edge_bound`
/// non-degenerate edges, one per isomorphism class, deterministically named
/// n0../a0...
pub fn enumerate_graphs(
    node_bound: usize,
    edge_bound: usize,
    guard: &SizeGuard,
) -> Result<Vec<ReflexiveGraph>> {
    let mut out = Vec::new();
    for n in 0..=node_bound {
        let max_m = if n == 0 { 0 } else { edge_bound };
        // Multisets of ordered pairs, generated in nondecreasing order.
        let pairs: Vec<(usize, usize)> = (0..n)
            .flat_map(|s| (0..n).map(move |t| (s, t)))
            .collect();
        for m in 0..=max_m {
            let mut combos: usize = 1;
            for i in 0..m {
                combos = combos.saturating_mul(pairs.len() + i) / (i + 1);
            }
            guard.check_elements(combos, "edge multisets in the graph census")?;
            let mut stack: Vec<(usize, Vec<(usize, usize)>)> = vec![(0, Vec::new())];
            while let Some((from, chosen)) = stack.pop() {
                if chosen.len() == m {
                    if canonical_edges(n, &chosen) == chosen {
                        let nodes = (0..n).map(|i| NodeId(format!("n{i}"))).collect();
                        let edges = chosen
                            .iter()
                            .enumerate()
                            .map(|(i, &(s, t))| GEdge {
                                id: EdgeId(format!("a{i}")),
                                src: s,
                                tgt: t,
                            })
                            .collect();
                        out.push(ReflexiveGraph { nodes, edges });
                        guard.check_elements(out.len(), "graph census")?;
                    }
                    continue;
                }
                for i in (from..pairs.len()).rev() {
                    let mut next = chosen.clone();
                    next.push(pairs[i]);
                    stack.push((i, next));
                }
            }
        }
    }
    Ok(out)
}

/// Whether two graphs are isomorphic, via canonical relabelings.
pub fn are_graph_isomorphic(g: &ReflexiveGraph, h: &ReflexiveGraph) -> bool {
    if g.node_count() != h.node_count() || g.edge_count() != h.edge_count() {
        return false;
    }
    let ge: Vec<(usize, usize)> = g.edges.iter().map(|e| (e.src, e.tgt)).collect();
    let he: Vec<(usize, usize)> = h.edges.iter().map(|e| (e.src, e.tgt)).collect();
    canonical_edges(g.node_count(), &ge) == canonical_edges(h.node_count(), &he)
}

/// What the identification of maps-over-the-loop verified.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SierpinskiReport {
    pub node_bound: usize,
    pub graph_count: usize,
    pub loops_only_count: usize,
    /// A non-singular map into the loop exists iff the graph is loops-only,
    /// and is then unique.
    pub existence_and_uniqueness_ok: bool,
    pub hom_pairs_checked: usize,
    pub maps_checked: usize,
    /// Between loops-only graphs, the non-singular maps are exactly the
    /// loop-preserving ones, matching the count of commuting pairs of a node
    /// function and a loop function.
    pub correspondence_ok: bool,
    pub all_ok: bool,
}

fn preserves_loops(f: &GraphMap) -> bool {
    (0..f.source.edge_count()).all(|e| {
        !f.source.is_loop(e)
            || matches!(f.edge_map[e], EdgeImage::Edge(j) if f.target.is_loop(j))
    })
}

/// Enumerates graphs up to the bound and verifies the two facts identifying
/// maps over the loop with pairs (node set, loops over it): a non-singular
/// map into the loop exists iff the graph consists of loops only (uniquely
/// so), and between such graphs the non-singular maps are exactly the
/// loop-preserving ones.
pub fn sierpinski_check(node_bound: usize, guard: &SizeGuard) -> Result<SierpinskiReport> {
    let graphs = enumerate_graphs(node_bound, node_bound, guard)?;
    let l = loop_graph();

    let mut existence_ok = true;
    let mut loops_only: Vec<&ReflexiveGraph> = Vec::new();
    let mut maps_checked = 0usize;
    for g in &graphs {
        let ns_count = all_graph_maps(g, &l, guard)?
            .iter()
            .filter(|f| nonsingular_fast(f).is_none())
            .count();
        let expected = if is_leibniz(g) {
            loops_only.push(g);
            1
        } else {
            0
        };
        existence_ok &= ns_count == expected;
    }

    let mut correspondence_ok = true;
    let mut pairs = 0usize;
    for x in &loops_only {
        for y in &loops_only {
            pairs += 1;
            let maps = all_graph_maps(x, y, guard)?;
            maps_checked += maps.len();
            let ns: Vec<&GraphMap> =
                maps.iter().filter(|f| nonsingular_fast(f).is_none()).collect();
            let lp: Vec<&GraphMap> = maps.iter().filter(|f| preserves_loops(f)).collect();
            correspondence_ok &= ns == lp;
            // Independent count: a commuting pair of a node function and a
            // loop function over it.
            let mut pair_count = 0usize;
            let mut node_map = vec![0usize; x.node_count()];
            if y.node_count() > 0 || x.node_count() == 0 {
                loop {
                    let mut prod = 1usize;
                    for e in 0..x.edge_count() {
                        prod *= y.loops_at(node_map[x.edges()[e].src]).len();
                    }
                    pair_count += prod;
                    let mut i = 0;
                    while i < node_map.len() {
                        node_map[i] += 1;
                        if node_map[i] < y.node_count() {
                            break;
                        }
                        node_map[i] = 0;
                        i += 1;
                    }
                    if i == node_map.len() {
                        break;
                    }
                }
            }
            correspondence_ok &= ns.len() == pair_count;
        }
    }

    let all_ok = existence_ok && correspondence_ok;
    Ok(SierpinskiReport {
        node_bound,
        graph_count: graphs.len(),
        loops_only_count: loops_only.len(),
        existence_and_uniqueness_ok: existence_ok,
        hom_pairs_checked: pairs,
        maps_checked,
        correspondence_ok,
        all_ok,
    })
}

/// What the descent counterexample reproduced.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CalibrationReport {
    /// The kernel pair of the collapse is the arrow plus two extra points.
    pub kernel_pair_is_arrow_plus_two_points: bool,
    pub descent: DescentReport,
    pub reproduces_counterexample: bool,
}

/// Builds the collapse of the generic arrow onto the loop, takes its kernel
/// pair, and checks that the top projection is non-singular while the base
/// map is not: non-singularity does not descend along epimorphisms.
pub fn calibration_counterexample(guard: &SizeGuard) -> Result<CalibrationReport> {
    let q = convert_map(&collapse_to_loop());
    let kp = kernel_pair(&q, guard)?;
    let a = convert(&generic_arrow());
    let one = terminal(delta1_site());
    let (a_plus_one, _, _) = coproduct(&a, &one)?;
    let (a_plus_two, _, _) = coproduct(&a_plus_one, &one)?;
    let kernel_pair_matches = are_isomorphic(&kp.apex, &a_plus_two).is_some();
    let descent = calibration_descent_check(
        &PullbackSquare {
            pulled_back: kp.right,
            over: kp.left,
            along: q.clone(),
            base: q,
        },
        guard,
    )?;
    let reproduces = kernel_pair_matches
        && descent.along_is_epi
        && descent.pulled_back_nonsingular
        && !descent.base_nonsingular
        && !descent.descent_holds;
    Ok(CalibrationReport {
        kernel_pair_is_arrow_plus_two_points: kernel_pair_matches,
        descent,
        reproduces_counterexample: reproduces,
    })
}

impl fmt::Display for ReflexiveGraph {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "graph with {} node(s):", self.node_count())?;
        for n in &self.nodes {
            write!(f, " {n}")?;
        }
        writeln!(f)?;
        for e in &self.edges {
            writeln!(f, "  {}: {} -> {}", e.id, self.nodes[e.src], self.nodes[e.tgt])?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lsc::{quotient_by_congruence, sigma, Probe};
    use crate::nonsing::is_nonsingular;
    use crate::presheaf::{enumerate_presheaves, hom_set, representable};
    use crate::shell::skeleton_selection;

    fn guard() -> SizeGuard {
        SizeGuard::default()
    }

    fn node(n: &str) -> NodeId {
        NodeId(n.to_string())
    }

    fn edge(id: &str, src: usize, tgt: usize) -> GEdge {
        GEdge {
            id: EdgeId(id.to_string()),
            src,
            tgt,
        }
    }

    #[test]
    fn graph_validation_rejects_malformed() {
        let dup_node = ReflexiveGraph::new(vec![node("v"), node("v")], vec![]);
        assert!(matches!(dup_node, Err(Error::DuplicateId { .. })));
        let dup_edge = ReflexiveGraph::new(
            vec![node("v")],
            vec![edge("a", 0, 0), edge("a", 0, 0)],
        );
        assert!(matches!(dup_edge, Err(Error::DuplicateId { .. })));
        let reserved = ReflexiveGraph::new(vec![node("v")], vec![edge("~a", 0, 0)]);
        assert!(matches!(reserved, Err(Error::MalformedGraph { .. })));
        let dangling = ReflexiveGraph::new(vec![node("v")], vec![edge("a", 0, 1)]);
        assert!(matches!(dangling, Err(Error::MalformedGraph { .. })));
    }

    #[test]
    fn graph_map_validation_checks_endpoints() {
        let a = generic_arrow();
        let l = loop_graph();
        // The edge cannot collapse while its endpoints stay apart.
        let bad = GraphMap::new(a.clone(), a.clone(), vec![0, 1], vec![EdgeImage::Degenerate(0)]);
        assert!(matches!(bad, Err(Error::MalformedGraph { .. })));
        let short = GraphMap::new(a.clone(), l.clone(), vec![0], vec![EdgeImage::Edge(0)]);
        assert!(matches!(short, Err(Error::MalformedGraph { .. })));
        let ok = GraphMap::new(a, l, vec![0, 0], vec![EdgeImage::Degenerate(0)]);
        assert!(ok.is_ok());
    }

    #[test]
    fn subgraph_requires_endpoint_closure() {
        let a = generic_arrow();
        let no_endpoints = Subgraph::new(&a, BTreeSet::from([0]), BTreeSet::from([0]));
        assert!(matches!(no_endpoints, Err(Error::MalformedGraph { .. })));
        assert!(Subgraph::new(&a, BTreeSet::from([0, 1]), BTreeSet::from([0])).is_ok());
        assert_eq!(Subgraph::full(&a).edges().len(), 1);
        assert!(Subgraph::discrete(&a).edges().is_empty());
    }

    #[test]
    fn convert_matches_known_presheaves() {
        let site = delta1_site();
        let rep = representable(site, &"[1]".into()).unwrap();
        assert!(are_isomorphic(&convert(&generic_arrow()), &rep).is_some());

        let xi = delta1_xi();
        let o1 = ix().o1;
        let loop_ix = xi.index_of_name(o1, "loop").unwrap();
        let (l_quotient, _) = quotient_by_congruence(xi.congruence(o1, loop_ix)).unwrap();
        assert!(are_isomorphic(&convert(&loop_graph()), &l_quotient).is_some());

        let pt = convert(&ReflexiveGraph::discrete(1));
        assert!(are_isomorphic(&pt, &terminal(site)).is_some());

        let b = convert(&ReflexiveGraph::codiscrete(2));
        assert_eq!(b.size(ix().o0), 2);
        assert_eq!(b.size(ix().o1), 4);
    }

    #[test]
    fn convert_roundtrips_exactly() {
        for g in [
            generic_arrow(),
            loop_graph(),
            ReflexiveGraph::discrete(3),
            ReflexiveGraph::codiscrete(2),
        ] {
            assert_eq!(convert_back(&convert(&g)).unwrap(), g);
        }
    }

    #[test]
    fn convert_back_covers_every_small_presheaf() {
        let site = delta1_site();
        for p in enumerate_presheaves(site, 2, &guard()).unwrap() {
            let g = convert_back(&p).unwrap();
            assert!(are_isomorphic(&convert(&g), &p).is_some());
        }
        let elsewhere = terminal(&catalog("terminal").unwrap());
        assert!(matches!(convert_back(&elsewhere), Err(Error::NotOverDelta1)));
    }

    #[test]
    fn graph_maps_roundtrip_through_presheaf_maps() {
        let a = generic_arrow();
        let l = loop_graph();
        let degenerating =
            GraphMap::new(a.clone(), l, vec![0, 0], vec![EdgeImage::Degenerate(0)]).unwrap();
        for f in [
            GraphMap::identity(&a),
            collapse_to_loop(),
            degenerating,
            sigma_fast(&ReflexiveGraph::codiscrete(2)),
        ] {
            assert_eq!(convert_map_back(&convert_map(&f)).unwrap(), f);
        }
    }

    #[test]
    fn classifier_picture_is_one_node_with_two_loops() {
        let pic = verify_classifier_picture().unwrap();
        assert_eq!(pic.node_count, 1);
        assert_eq!(pic.degenerate_count, 1);
        assert_eq!(pic.nondegenerate_edges, vec!["loop", "non-loop"]);
        assert!(pic.all_nondegenerate_are_loops);
        assert!(xi_graph().is_loop(XI_LOOP) && xi_graph().is_loop(XI_NONLOOP));
    }

    #[test]
    fn sigma_fast_agrees_with_the_measurement() {
        let xi = delta1_xi();
        let iso = classifier_renaming();
        for g in enumerate_graphs(3, 3, &guard()).unwrap() {
            let fast = iso.compose(&convert_map(&sigma_fast(&g))).unwrap();
            let slow = sigma(xi, &convert(&g)).unwrap();
            assert_eq!(fast, slow, "measurement mismatch on {g}");
        }
    }

    #[test]
    fn nonsingular_fast_agrees_with_kernel_comparison() {
        let graphs = enumerate_graphs(2, 2, &guard()).unwrap();
        let mut maps = 0usize;
        let mut singular = 0usize;
        for x in &graphs {
            for y in &graphs {
                for f in all_graph_maps(x, y, &guard()).unwrap() {
                    let fast = nonsingular_fast(&f).is_none();
                    let slow = is_nonsingular(&convert_map(&f)).unwrap().is_empty();
                    assert_eq!(fast, slow, "singularity mismatch between {x} and {y}");
                    maps += 1;
                    singular += usize::from(!fast);
                }
            }
        }
        assert!(maps > 500, "exhaustive check covered only {maps} maps");
        assert!(singular > 0);
    }

    #[test]
    fn nonsingular_fast_fixtures() {
        assert_eq!(nonsingular_fast(&GraphMap::identity(&generic_arrow())), None);
        assert_eq!(
            nonsingular_fast(&collapse_to_loop()),
            Some(EdgeId("a".to_string()))
        );
        let squash = GraphMap::new(
            loop_graph(),
            loop_graph(),
            vec![0],
            vec![EdgeImage::Degenerate(0)],
        )
        .unwrap();
        assert_eq!(nonsingular_fast(&squash), Some(EdgeId("l".to_string())));
        // The collapse keeps fibers discrete even though it is singular.
        assert!(has_discrete_fibers(&collapse_to_loop()));
        assert!(!has_discrete_fibers(&squash));
    }

    #[test]
    fn cohesion_fixtures() {
        let l = cohesion(&loop_graph());
        assert_eq!((l.points.len(), l.components.len()), (1, 1));
        assert!(is_leibniz(&loop_graph()));

        let d = cohesion(&ReflexiveGraph::discrete(3));
        assert_eq!((d.points.len(), d.components.len()), (3, 3));
        assert!(is_leibniz(&ReflexiveGraph::discrete(3)));

        let a = cohesion(&generic_arrow());
        assert_eq!((a.points.len(), a.components.len()), (2, 1));
        assert_eq!(a.components, vec![vec![0, 1]]);
        assert!(!is_leibniz(&generic_arrow()));

        let b = cohesion(&ReflexiveGraph::codiscrete(2));
        assert_eq!((b.points.len(), b.components.len()), (2, 1));
        assert!(!is_leibniz(&ReflexiveGraph::codiscrete(2)));

        assert!(is_leibniz(&ReflexiveGraph::discrete(0)));
    }

    #[test]
    fn leibniz_core_is_the_loop_probe_skeleton() {
        let xi = delta1_xi();
        let d = ix();
        let mut sel = vec![BTreeSet::new(); 2];
        sel[d.o0] = BTreeSet::from([0]);
        sel[d.o1] = BTreeSet::from([
            xi.index_of_name(d.o1, "total").unwrap(),
            xi.index_of_name(d.o1, "loop").unwrap(),
        ]);
        let probe = Probe::new(xi, sel).unwrap();
        for g in enumerate_graphs(3, 3, &guard()).unwrap() {
            let skel = skeleton_selection(&probe, &convert(&g)).unwrap();
            assert_eq!(skel, leibniz_core(&g).to_subpresheaf(), "core mismatch on {g}");
        }
    }

    #[test]
    fn lightly_dense_fixtures() {
        assert!(is_lightly_dense(&Subgraph::full(&loop_graph())));
        assert!(is_lightly_dense(&Subgraph::discrete(&generic_arrow())));
        assert!(!is_lightly_dense(&Subgraph::full(&generic_arrow())));
        let missing_node =
            Subgraph::new(&generic_arrow(), BTreeSet::from([0]), BTreeSet::new()).unwrap();
        assert!(!is_lightly_dense(&missing_node));
        match classify_lightly_dense(&Subgraph::full(&generic_arrow())) {
            Err(Error::NotLightlyDense { witness }) => assert!(witness.contains('a')),
            other => panic!("expected a light-density failure, got {other:?}"),
        }
    }

    #[test]
    fn classifying_maps_have_discrete_fibers_and_recover_the_subgraph() {
        for g in enumerate_graphs(3, 3, &guard()).unwrap() {
            let loops: Vec<usize> = (0..g.edge_count()).filter(|&e| g.is_loop(e)).collect();
            let all_nodes: BTreeSet<usize> = (0..g.node_count()).collect();
            for mask in 0..(1usize << loops.len()) {
                let kept: BTreeSet<usize> = loops
                    .iter()
                    .enumerate()
                    .filter(|(i, _)| mask & (1 << i) != 0)
                    .map(|(_, &e)| e)
                    .collect();
                let u = Subgraph::new(&g, all_nodes.clone(), kept).unwrap();
                assert!(is_lightly_dense(&u));
                let chi = classify_lightly_dense(&u).unwrap();
                assert!(has_discrete_fibers(&chi));
                assert_eq!(pullback_subgraph(&chi, &xi_top_subgraph()).unwrap(), u);
                let is_core = u == leibniz_core(&g);
                assert_eq!(chi == sigma_fast(&g), is_core);
            }
        }
    }

    #[test]
    fn classifying_maps_are_unique() {
        for g in enumerate_graphs(2, 2, &guard()).unwrap() {
            let loops: Vec<usize> = (0..g.edge_count()).filter(|&e| g.is_loop(e)).collect();
            let all_nodes: BTreeSet<usize> = (0..g.node_count()).collect();
            let maps = all_graph_maps(&g, xi_graph(), &guard()).unwrap();
            for mask in 0..(1usize << loops.len()) {
                let kept: BTreeSet<usize> = loops
                    .iter()
                    .enumerate()
                    .filter(|(i, _)| mask & (1 << i) != 0)
                    .map(|(_, &e)| e)
                    .collect();
                let u = Subgraph::new(&g, all_nodes.clone(), kept).unwrap();
                let chi = classify_lightly_dense(&u).unwrap();
                let classifying: Vec<&GraphMap> = maps
                    .iter()
                    .filter(|h| {
                        has_discrete_fibers(h)
                            && pullback_subgraph(h, &xi_top_subgraph()).unwrap() == u
                    })
                    .collect();
                assert_eq!(classifying, vec![&chi], "uniqueness fails on {g}");
            }
        }
    }

    #[test]
    fn light_density_is_not_stable_under_discrete_fiber_maps() {
        let q = collapse_to_loop();
        assert!(has_discrete_fibers(&q));
        let u = Subgraph::full(&loop_graph());
        assert!(is_lightly_dense(&u));
        let pulled = pullback_subgraph(&q, &u).unwrap();
        assert_eq!(pulled, Subgraph::full(&generic_arrow()));
        assert!(!is_lightly_dense(&pulled));
    }

    #[test]
    fn all_subgraphs_counts() {
        assert_eq!(all_subgraphs(&generic_arrow(), &guard()).unwrap().len(), 5);
        assert_eq!(all_subgraphs(&loop_graph(), &guard()).unwrap().len(), 3);
        let b = all_subgraphs(&ReflexiveGraph::codiscrete(2), &guard()).unwrap();
        assert_eq!(b.len(), 7);
        // Matches the subpresheaf count of the converted graph.
        let subs =
            crate::presheaf::enumerate_subpresheaves(&convert(&generic_arrow()), &guard()).unwrap();
        assert_eq!(subs.len(), 5);
    }

    #[test]
    fn census_counts_match_hand_enumeration() {
        assert_eq!(enumerate_graphs(1, 1, &guard()).unwrap().len(), 3);
        assert_eq!(enumerate_graphs(2, 1, &guard()).unwrap().len(), 6);
        let g22 = enumerate_graphs(2, 2, &guard()).unwrap();
        assert_eq!(g22.len(), 13);
        for (i, x) in g22.iter().enumerate() {
            for y in &g22[i + 1..] {
                assert!(!are_graph_isomorphic(x, y), "duplicate class: {x} vs {y}");
                assert!(are_isomorphic(&convert(x), &convert(y)).is_none());
            }
        }
    }

    #[test]
    fn census_agrees_with_the_presheaf_census() {
        let graphs = enumerate_graphs(3, 3, &guard()).unwrap();
        let small = graphs
            .iter()
            .filter(|g| g.node_count() + g.edge_count() <= 3)
            .count();
        let presheaves = enumerate_presheaves(delta1_site(), 3, &guard()).unwrap();
        assert_eq!(small, presheaves.len());
        assert_eq!(small, 8);
    }

    #[test]
    fn graph_isomorphism_ignores_names_and_order() {
        let b = ReflexiveGraph::codiscrete(2);
        let renamed = ReflexiveGraph::new(
            vec![node("x"), node("y")],
            vec![edge("back", 1, 0), edge("forth", 0, 1)],
        )
        .unwrap();
        assert!(are_graph_isomorphic(&b, &renamed));
        assert!(!are_graph_isomorphic(&b, &generic_arrow()));
        // Same shape statistics, different structure: a loop with a tail
        // versus a loop and a separate edge need 3 nodes to distinguish.
        let tailed = ReflexiveGraph::new(
            vec![node("u"), node("v"), node("w")],
            vec![edge("l", 0, 0), edge("t", 0, 1)],
        )
        .unwrap();
        let apart = ReflexiveGraph::new(
            vec![node("u"), node("v"), node("w")],
            vec![edge("l", 0, 0), edge("t", 1, 2)],
        )
        .unwrap();
        assert!(!are_graph_isomorphic(&tailed, &apart));
    }

    #[test]
    fn graph_hom_sets_match_presheaf_hom_sets() {
        let graphs = enumerate_graphs(2, 1, &guard()).unwrap();
        for x in &graphs {
            for y in &graphs {
                let fast = all_graph_maps(x, y, &guard()).unwrap();
                let slow = hom_set(&convert(x), &convert(y), &guard()).unwrap();
                assert_eq!(fast.len(), slow.len(), "hom count mismatch: {x} to {y}");
            }
        }
        assert_eq!(all_graph_maps(&generic_arrow(), &loop_graph(), &guard()).unwrap().len(), 2);
        assert_eq!(all_graph_maps(&loop_graph(), &generic_arrow(), &guard()).unwrap().len(), 2);
    }

    #[test]
    fn guards_cut_off_large_enumerations() {
        assert!(matches!(
            enumerate_graphs(5, 5, &guard()),
            Err(Error::SizeGuardExceeded { .. })
        ));
        assert!(matches!(
            all_graph_maps(
                &ReflexiveGraph::discrete(7),
                &ReflexiveGraph::codiscrete(4),
                &guard()
            ),
            Err(Error::SizeGuardExceeded { .. })
        ));
    }

    #[test]
    fn sierpinski_identification_holds_up_to_three_nodes() {
        let report = sierpinski_check(3, &guard()).unwrap();
        assert!(report.all_ok);
        assert!(report.existence_and_uniqueness_ok);
        assert!(report.correspondence_ok);
        assert_eq!(report.loops_only_count, 18);
        assert_eq!(report.hom_pairs_checked, 18 * 18);
        assert!(report.maps_checked > report.hom_pairs_checked);
    }

    #[test]
    fn calibration_counterexample_reproduces() {
        let report = calibration_counterexample(&guard()).unwrap();
        assert!(report.kernel_pair_is_arrow_plus_two_points);
        assert!(report.descent.along_is_epi);
        assert!(report.descent.pulled_back_nonsingular);
        assert!(!report.descent.base_nonsingular);
        assert!(!report.descent.descent_holds);
        assert!(report.reproduces_counterexample);
    }

    #[test]
    fn dot_rendering_shows_edges_and_optional_degenerates() {
        let with = to_dot(&generic_arrow(), true);
        assert!(with.contains("\"s\" -> \"t\" [label=\"a\"]"));
        assert!(with.contains("style=dotted"));
        let without = to_dot(&generic_arrow(), false);
        assert!(!without.contains("dotted"));
    }

    #[test]
    fn raw_forms_roundtrip() {
        let g = ReflexiveGraph::codiscrete(2);
        assert_eq!(ReflexiveGraph::from_raw(&g.to_raw()).unwrap(), g);

        let bad = RawGraph {
            nodes: vec!["v".to_string()],
            edges: vec![RawEdge {
                id: "a".to_string(),
                src: "v".to_string(),
                tgt: "w".to_string(),
            }],
        };
        assert!(matches!(
            ReflexiveGraph::from_raw(&bad),
            Err(Error::MalformedGraph { .. })
        ));

        let a = generic_arrow();
        let l = loop_graph();
        let f = GraphMap::new(a.clone(), l.clone(), vec![0, 0], vec![EdgeImage::Degenerate(0)])
            .unwrap();
        let raw = f.to_raw();
        assert_eq!(raw.edges.get("a").map(String::as_str), Some("~v"));
        assert_eq!(GraphMap::from_raw(&a, &l, &raw).unwrap(), f);

        let u = leibniz_core(&ReflexiveGraph::codiscrete(2));
        assert_eq!(Subgraph::from_raw(&u.ambient, &u.to_raw()).unwrap(), u);
    }
}
