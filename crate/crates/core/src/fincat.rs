//! Finite categories presented by explicit composition tables.
//!
//! A category here is a flat datum: objects, morphisms with endpoints, an
//! identity per object, and a total composition table over composable pairs.
//! Validation checks the table exhaustively (identity laws, associativity over
//! all composable triples), so everything downstream may assume the laws hold.
//!
//! Identifiers are opaque strings; every ordering used for determinism is
//! lexicographic on identifiers.

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::guard::SizeGuard;

macro_rules! id_newtype {
    ($name:ident) => {
        #[derive(
            Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize, Default,
        )]
        #[serde(transparent)]
        pub struct $name(pub String);

        impl fmt::Display for $name {
            fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                self.0.fmt(f)
            }
        }

        impl From<&str> for $name {
            fn from(s: &str) -> Self {
                $name(s.to_string())
            }
        }

        impl From<String> for $name {
            fn from(s: String) -> Self {
                $name(s)
            }
        }

        impl $name {
            pub fn as_str(&self) -> &str {
                &self.0
            }
        }
    };
}

id_newtype!(ObjId);
id_newtype!(MorId);

pub(crate) use id_newtype;

/// On-disk category description. See `docs/formats.md`.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq, Eq)]
pub struct RawCategory {
    pub objects: Vec<String>,
    pub morphisms: Vec<RawMorphism>,
    pub identities: BTreeMap<String, String>,
    pub composition: Vec<RawComposite>,
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq, Eq)]
pub struct RawMorphism {
    pub id: String,
    pub src: String,
    pub dst: String,
}

/// One table entry: `g` after `f` equals `result`.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq, Eq)]
pub struct RawComposite {
    pub g: String,
    pub f: String,
    pub result: String,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MorInfo {
    pub id: MorId,
    pub src: usize,
    pub dst: usize,
}

/// A validated finite category. Construction goes through [`validate_category`],
/// so all instances satisfy the category laws.
#[derive(Debug, PartialEq, Eq)]
pub struct FiniteCategory {
    objects: Vec<ObjId>,
    mors: Vec<MorInfo>,
    identity: Vec<usize>,
    /// comp[g][f] = Some(g∘f) exactly when src(g) = dst(f).
    comp: Vec<Vec<Option<usize>>>,
    /// homs[a][b]: morphism indices a → b, ascending (hence lexicographic).
    homs: Vec<Vec<Vec<usize>>>,
}

/// Exhaustive classification of one morphism.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct MorphismClass {
    pub mono: bool,
    pub epi: bool,
    pub iso: bool,
    pub split_mono: bool,
}

/// A colimit of the identity functor: vertex plus one leg per object.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct IdentityColimit {
    pub vertex: ObjId,
    pub legs: BTreeMap<ObjId, MorId>,
}

impl FiniteCategory {
    pub fn objects(&self) -> &[ObjId] {
        &self.objects
    }

    pub fn object_count(&self) -> usize {
        self.objects.len()
    }

    pub fn mor_count(&self) -> usize {
        self.mors.len()
    }

    pub fn mor(&self, m: usize) -> &MorInfo {
        &self.mors[m]
    }

    pub fn mors(&self) -> &[MorInfo] {
        &self.mors
    }

    pub fn object_index(&self, o: &ObjId) -> Option<usize> {
        self.objects.binary_search(o).ok()
    }

    pub fn object_index_or_err(&self, o: &ObjId) -> Result<usize> {
        self.object_index(o)
            .ok_or_else(|| Error::UnknownObject { id: o.clone() })
    }

    pub fn mor_index(&self, m: &MorId) -> Option<usize> {
        self.mors.binary_search_by(|mi| mi.id.cmp(m)).ok()
    }

    pub fn mor_index_or_err(&self, m: &MorId) -> Result<usize> {
        self.mor_index(m)
            .ok_or_else(|| Error::UnknownMorphism { id: m.clone() })
    }

    pub fn identity_of(&self, o: usize) -> usize {
        self.identity[o]
    }

    pub fn is_identity(&self, m: usize) -> bool {
        self.identity[self.mors[m].src] == m
    }

    /// g∘f when src(g) = dst(f).
    pub fn compose(&self, g: usize, f: usize) -> Option<usize> {
        self.comp[g][f]
    }

    pub fn hom(&self, a: usize, b: usize) -> &[usize] {
        &self.homs[a][b]
    }

    /// All morphisms with codomain `c`, ascending.
    pub fn arrows_into(&self, c: usize) -> Vec<usize> {
        (0..self.mors.len())
            .filter(|&m| self.mors[m].dst == c)
            .collect()
    }

    /// All morphisms with domain `a`, ascending.
    pub fn arrows_out_of(&self, a: usize) -> Vec<usize> {
        (0..self.mors.len())
            .filter(|&m| self.mors[m].src == a)
            .collect()
    }

    pub fn classify_morphism(&self, m: &MorId) -> Result<MorphismClass> {
        let f = self.mor_index_or_err(m)?;
        let (src, dst) = (self.mors[f].src, self.mors[f].dst);

        let mut mono = true;
        'mono: for x in 0..self.objects.len() {
            for &g1 in self.hom(x, src) {
                for &g2 in self.hom(x, src) {
                    if g1 != g2 && self.compose(f, g1) == self.compose(f, g2) {
                        mono = false;
                        break 'mono;
                    }
                }
            }
        }

        let mut epi = true;
        'epi: for y in 0..self.objects.len() {
            for &g1 in self.hom(dst, y) {
                for &g2 in self.hom(dst, y) {
                    if g1 != g2 && self.compose(g1, f) == self.compose(g2, f) {
                        epi = false;
                        break 'epi;
                    }
                }
            }
        }

        let split_mono = self
            .hom(dst, src)
            .iter()
            .any(|&r| self.compose(r, f) == Some(self.identity[src]));

        let iso = self.hom(dst, src).iter().any(|&g| {
            self.compose(g, f) == Some(self.identity[src])
                && self.compose(f, g) == Some(self.identity[dst])
        });

        Ok(MorphismClass {
            mono,
            epi,
            iso,
            split_mono,
        })
    }

    /// Least object receiving exactly one morphism from every object, if any.
    pub fn terminal_object(&self) -> Option<ObjId> {
        (0..self.objects.len())
            .find(|&t| (0..self.objects.len()).all(|x| self.hom(x, t).len() == 1))
            .map(|t| self.objects[t].clone())
    }

    /// Colimit of the identity functor, by exhaustive cocone search.
    ///
    /// A cocone is a vertex `v` with legs μ_X : X → v satisfying μ_Y ∘ f = μ_X
    /// for every f : X → Y; it is colimiting when every cocone factors through
    /// it by a unique mediating morphism. Idempotents make the uniqueness
    /// requirement essential: a cocone whose mediators are ambiguous is not a
    /// colimit even if it is the only cocone.
    pub fn identity_colimit(&self) -> Option<IdentityColimit> {
        let cocones = self.identity_cocones();
        for (v, legs) in &cocones {
            let colimiting = cocones.iter().all(|(w, nus)| {
                let mediators = self
                    .hom(*v, *w)
                    .iter()
                    .filter(|&&h| (0..self.objects.len()).all(|x| self.compose(h, legs[x]) == Some(nus[x])))
                    .count();
                mediators == 1
            });
            if colimiting {
                return Some(IdentityColimit {
                    vertex: self.objects[*v].clone(),
                    legs: self
                        .objects
                        .iter()
                        .cloned()
                        .zip(legs.iter().map(|&m| self.mors[m].id.clone()))
                        .collect(),
                });
            }
        }
        None
    }

    /// All cocones under the identity functor, in (vertex, legs) lexicographic order.
    fn identity_cocones(&self) -> Vec<(usize, Vec<usize>)> {
        let n = self.objects.len();
        let mut out = Vec::new();
        for v in 0..n {
            let mut legs: Vec<usize> = Vec::with_capacity(n);
            self.cocone_search(v, &mut legs, &mut out);
        }
        out
    }

    fn cocone_search(&self, v: usize, legs: &mut Vec<usize>, out: &mut Vec<(usize, Vec<usize>)>) {
        let n = self.objects.len();
        if legs.len() == n {
            out.push((v, legs.clone()));
            return;
        }
        let x = legs.len();
        'cand: for &mu in self.hom(x, v) {
            // Commutation against every morphism whose endpoints are both assigned.
            for m in 0..self.mors.len() {
                let (a, b) = (self.mors[m].src, self.mors[m].dst);
                if a == x && b <= x {
                    let mu_b = if b == x { mu } else { legs[b] };
                    if self.compose(mu_b, m) != Some(mu) {
                        continue 'cand;
                    }
                }
                if b == x && a < x {
                    if self.compose(mu, m) != Some(legs[a]) {
                        continue 'cand;
                    }
                }
            }
            legs.push(mu);
            self.cocone_search(v, legs, out);
            legs.pop();
        }
    }

    pub fn to_raw(&self) -> RawCategory {
        let mut composition = Vec::new();
        for g in 0..self.mors.len() {
            for f in 0..self.mors.len() {
                if let Some(r) = self.comp[g][f] {
                    composition.push(RawComposite {
                        g: self.mors[g].id.0.clone(),
                        f: self.mors[f].id.0.clone(),
                        result: self.mors[r].id.0.clone(),
                    });
                }
            }
        }
        RawCategory {
            objects: self.objects.iter().map(|o| o.0.clone()).collect(),
            morphisms: self
                .mors
                .iter()
                .map(|m| RawMorphism {
                    id: m.id.0.clone(),
                    src: self.objects[m.src].0.clone(),
                    dst: self.objects[m.dst].0.clone(),
                })
                .collect(),
            identities: self
                .objects
                .iter()
                .enumerate()
                .map(|(i, o)| (o.0.clone(), self.mors[self.identity[i]].id.0.clone()))
                .collect(),
            composition,
        }
    }
}

/// Validate a raw table into a category, checking every law exhaustively.
pub fn validate_category(raw: &RawCategory, guard: &SizeGuard) -> Result<Arc<FiniteCategory>> {
    guard.check_morphisms(raw.morphisms.len())?;

    let mut objects: Vec<ObjId> = raw.objects.iter().map(|s| ObjId(s.clone())).collect();
    objects.sort();
    for w in objects.windows(2) {
        if w[0] == w[1] {
            return Err(Error::DuplicateId { id: w[0].0.clone() });
        }
    }
    let obj_index = |name: &str| -> Result<usize> {
        objects
            .binary_search(&ObjId(name.to_string()))
            .map_err(|_| Error::UnknownObject {
                id: ObjId(name.to_string()),
            })
    };

    let mut mors: Vec<MorInfo> = Vec::with_capacity(raw.morphisms.len());
    for m in &raw.morphisms {
        mors.push(MorInfo {
            id: MorId(m.id.clone()),
            src: obj_index(&m.src)?,
            dst: obj_index(&m.dst)?,
        });
    }
    mors.sort_by(|a, b| a.id.cmp(&b.id));
    for w in mors.windows(2) {
        if w[0].id == w[1].id {
            return Err(Error::DuplicateId {
                id: w[0].id.0.clone(),
            });
        }
    }
    let mor_index = |name: &str| -> Result<usize> {
        mors.binary_search_by(|mi| mi.id.0.as_str().cmp(name))
            .map_err(|_| Error::UnknownMorphism {
                id: MorId(name.to_string()),
            })
    };

    let mut identity = vec![usize::MAX; objects.len()];
    for (o, obj) in objects.iter().enumerate() {
        let missing = || Error::MissingIdentity {
            object: obj.clone(),
        };
        let name = raw.identities.get(&obj.0).ok_or_else(missing)?;
        let m = mor_index(name).map_err(|_| missing())?;
        if mors[m].src != o || mors[m].dst != o {
            return Err(missing());
        }
        identity[o] = m;
    }

    let n = mors.len();
    let mut comp: Vec<Vec<Option<usize>>> = vec![vec![None; n]; n];
    for entry in &raw.composition {
        let g = mor_index(&entry.g)?;
        let f = mor_index(&entry.f)?;
        let r = mor_index(&entry.result)?;
        let ill = |detail: &str| Error::IllTypedComposite {
            g: mors[g].id.clone(),
            f: mors[f].id.clone(),
            detail: detail.to_string(),
        };
        if mors[g].src != mors[f].dst {
            return Err(ill("g and f are not composable"));
        }
        if mors[r].src != mors[f].src || mors[r].dst != mors[g].dst {
            return Err(ill("result endpoints do not match"));
        }
        if let Some(prev) = comp[g][f] {
            if prev != r {
                return Err(ill("conflicting entries for the same pair"));
            }
        }
        comp[g][f] = Some(r);
    }

    // Totality over composable pairs.
    for g in 0..n {
        for f in 0..n {
            if mors[g].src == mors[f].dst && comp[g][f].is_none() {
                return Err(Error::MissingComposite {
                    g: mors[g].id.clone(),
                    f: mors[f].id.clone(),
                });
            }
        }
    }

    // Identity laws.
    for f in 0..n {
        let (src, dst) = (mors[f].src, mors[f].dst);
        if comp[identity[dst]][f] != Some(f) {
            return Err(Error::IdentityLawViolation {
                id: mors[identity[dst]].id.clone(),
                f: mors[f].id.clone(),
            });
        }
        if comp[f][identity[src]] != Some(f) {
            return Err(Error::IdentityLawViolation {
                id: mors[identity[src]].id.clone(),
                f: mors[f].id.clone(),
            });
        }
    }

    // Associativity over all composable triples.
    for h in 0..n {
        for g in 0..n {
            if mors[h].src != mors[g].dst {
                continue;
            }
            let hg = comp[h][g].unwrap();
            for f in 0..n {
                if mors[g].src != mors[f].dst {
                    continue;
                }
                let gf = comp[g][f].unwrap();
                if comp[h][gf] != comp[hg][f] {
                    return Err(Error::NonAssociative {
                        f: mors[f].id.clone(),
                        g: mors[g].id.clone(),
                        h: mors[h].id.clone(),
                    });
                }
            }
        }
    }

    let mut homs = vec![vec![Vec::new(); objects.len()]; objects.len()];
    for (i, m) in mors.iter().enumerate() {
        homs[m.src][m.dst].push(i);
    }

    Ok(Arc::new(FiniteCategory {
        objects,
        mors,
        identity,
        comp,
        homs,
    }))
}

pub const CATALOG_NAMES: [&str; 5] = [
    "delta1",
    "parallel_pair",
    "terminal",
    "walking_arrow",
    "walking_idempotent",
];

/// Named sites used throughout the fixtures and reports.
pub fn catalog(name: &str) -> Result<Arc<FiniteCategory>> {
    let raw = catalog_raw(name)?;
    validate_category(&raw, &SizeGuard::default())
}

pub fn catalog_raw(name: &str) -> Result<RawCategory> {
    match name {
        "terminal" => Ok(build_raw(&["*"], &[("id", "*", "*")], &[("*", "id")], &[])),
        "walking_arrow" => Ok(build_raw(
            &["a", "b"],
            &[("ida", "a", "a"), ("idb", "b", "b"), ("f", "a", "b")],
            &[("a", "ida"), ("b", "idb")],
            &[],
        )),
        "parallel_pair" => Ok(build_raw(
            &["e", "v"],
            &[
                ("ide", "e", "e"),
                ("idv", "v", "v"),
                ("s", "v", "e"),
                ("t", "v", "e"),
            ],
            &[("e", "ide"), ("v", "idv")],
            &[],
        )),
        "delta1" => Ok(build_raw(
            &["[0]", "[1]"],
            &[
                ("id0", "[0]", "[0]"),
                ("id1", "[1]", "[1]"),
                ("d0", "[0]", "[1]"),
                ("d1", "[0]", "[1]"),
                ("bang", "[1]", "[0]"),
                ("c0", "[1]", "[1]"),
                ("c1", "[1]", "[1]"),
            ],
            &[("[0]", "id0"), ("[1]", "id1")],
            &[
                ("bang", "d0", "id0"),
                ("bang", "d1", "id0"),
                ("d0", "bang", "c0"),
                ("d1", "bang", "c1"),
                ("bang", "c0", "bang"),
                ("bang", "c1", "bang"),
                ("c0", "d0", "d0"),
                ("c0", "d1", "d0"),
                ("c1", "d0", "d1"),
                ("c1", "d1", "d1"),
                ("c0", "c0", "c0"),
                ("c0", "c1", "c0"),
                ("c1", "c0", "c1"),
                ("c1", "c1", "c1"),
            ],
        )),
        "walking_idempotent" => Ok(build_raw(
            &["o"],
            &[("ido", "o", "o"), ("e", "o", "o")],
            &[("o", "ido")],
            &[("e", "e", "e")],
        )),
        other => Err(Error::UnknownCatalogName {
            name: other.to_string(),
        }),
    }
}

/// Assemble a raw category, filling in all identity composites.
fn build_raw(
    objects: &[&str],
    morphisms: &[(&str, &str, &str)],
    identities: &[(&str, &str)],
    composites: &[(&str, &str, &str)],
) -> RawCategory {
    let ids: BTreeMap<&str, &str> = identities.iter().cloned().collect();
    let mut composition: Vec<RawComposite> = composites
        .iter()
        .map(|(g, f, r)| RawComposite {
            g: g.to_string(),
            f: f.to_string(),
            result: r.to_string(),
        })
        .collect();
    for (m, src, dst) in morphisms {
        let src_id = ids[src];
        let dst_id = ids[dst];
        composition.push(RawComposite {
            g: dst_id.to_string(),
            f: m.to_string(),
            result: m.to_string(),
        });
        if (dst_id, *m) != (*m, src_id) {
            composition.push(RawComposite {
                g: m.to_string(),
                f: src_id.to_string(),
                result: m.to_string(),
            });
        }
    }
    composition.sort_by(|a, b| (&a.g, &a.f).cmp(&(&b.g, &b.f)));
    composition.dedup();
    RawCategory {
        objects: objects.iter().map(|s| s.to_string()).collect(),
        morphisms: morphisms
            .iter()
            .map(|(id, src, dst)| RawMorphism {
                id: id.to_string(),
                src: src.to_string(),
                dst: dst.to_string(),
            })
            .collect(),
        identities: identities
            .iter()
            .map(|(o, m)| (o.to_string(), m.to_string()))
            .collect(),
        composition,
    }
}

/// Structural equality of sites, with a pointer fast path.
pub fn same_site(a: &Arc<FiniteCategory>, b: &Arc<FiniteCategory>) -> bool {
    Arc::ptr_eq(a, b) || **a == **b
}
