//! Finite presheaves: contravariant set-valued functors on a finite category,
//! given by explicit carriers and action tables.
//!
//! For a morphism f : a → b the action table maps X(b) → X(a), written x·f.
//! Validation checks x·id = x and (x·g)·f = x·(g∘f) over every composable
//! pair, so constructed presheaves are genuine functors. Natural
//! transformations are checked against every morphism.

mod enumerate;
mod limits;

pub(crate) use limits::Dsu;
mod omega;

pub use enumerate::{enumerate_presheaves, enumerate_subpresheaves};
pub use limits::{
    coequalizer, coproduct, equalizer, image_factorization, is_pullback_square, kernel_pair,
    mediate_into, product, pullback, quotient_by_relation, Span,
};
pub use omega::{characteristic, omega, Omega};

use std::collections::{BTreeMap, BTreeSet};
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fincat::{id_newtype, same_site, FiniteCategory, MorId, MorphismClass, ObjId};
use crate::guard::SizeGuard;

use std::fmt;

id_newtype!(ElemId);

#[derive(Debug, PartialEq, Eq)]
struct PshData {
    site: Arc<FiniteCategory>,
    carrier: Vec<Vec<ElemId>>,
    /// Per morphism m (f : a → b): table of length |X(b)| with values in X(a).
    action: Vec<Vec<usize>>,
}

/// An immutable presheaf; cloning is cheap and shares the data.
#[derive(Debug, Clone)]
pub struct Presheaf {
    data: Arc<PshData>,
}

impl PartialEq for Presheaf {
    fn eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.data, &other.data)
            || (same_site(&self.data.site, &other.data.site)
                && self.data.carrier == other.data.carrier
                && self.data.action == other.data.action)
    }
}

impl Eq for Presheaf {}

/// On-disk presheaf description. Identity-action entries may be omitted.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq, Eq)]
pub struct RawPresheaf {
    pub carrier: BTreeMap<String, Vec<String>>,
    pub action: Vec<RawAction>,
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq, Eq)]
pub struct RawAction {
    pub element: String,
    pub morphism: String,
    pub result: String,
}

impl Presheaf {
    pub fn site(&self) -> &Arc<FiniteCategory> {
        &self.data.site
    }

    pub fn carrier(&self, o: usize) -> &[ElemId] {
        &self.data.carrier[o]
    }

    pub fn size(&self, o: usize) -> usize {
        self.data.carrier[o].len()
    }

    pub fn total_size(&self) -> usize {
        self.data.carrier.iter().map(|c| c.len()).sum()
    }

    pub fn elem(&self, o: usize, i: usize) -> &ElemId {
        &self.data.carrier[o][i]
    }

    pub fn elem_index(&self, o: usize, e: &ElemId) -> Option<usize> {
        self.data.carrier[o].iter().position(|x| x == e)
    }

    /// x·f for the morphism with index `m`; `x` lives at the codomain of `m`.
    pub fn act(&self, m: usize, x: usize) -> usize {
        self.data.action[m][x]
    }

    pub fn action_table(&self, m: usize) -> &[usize] {
        &self.data.action[m]
    }

    /// Construct with a full functoriality check.
    pub fn new(
        site: Arc<FiniteCategory>,
        carrier: Vec<Vec<ElemId>>,
        action: Vec<Vec<usize>>,
    ) -> Result<Presheaf> {
        let p = Presheaf {
            data: Arc::new(PshData {
                site,
                carrier,
                action,
            }),
        };
        p.validate()?;
        Ok(p)
    }

    /// Construct from a computed, already-correct datum. Checked in debug builds.
    pub(crate) fn new_unchecked(
        site: Arc<FiniteCategory>,
        carrier: Vec<Vec<ElemId>>,
        action: Vec<Vec<usize>>,
    ) -> Presheaf {
        let p = Presheaf {
            data: Arc::new(PshData {
                site,
                carrier,
                action,
            }),
        };
        debug_assert!(p.validate().is_ok(), "{:?}", p.validate());
        p
    }

    fn validate(&self) -> Result<()> {
        let site = &self.data.site;
        if self.data.carrier.len() != site.object_count() {
            return Err(Error::MalformedPresheaf {
                detail: "carrier does not cover all objects".to_string(),
            });
        }
        if self.data.action.len() != site.mor_count() {
            return Err(Error::MalformedPresheaf {
                detail: "action does not cover all morphisms".to_string(),
            });
        }
        for (o, elems) in self.data.carrier.iter().enumerate() {
            let mut seen = BTreeSet::new();
            for e in elems {
                if !seen.insert(e) {
                    return Err(Error::MalformedPresheaf {
                        detail: format!(
                            "duplicate element {e} at {}",
                            site.objects()[o]
                        ),
                    });
                }
            }
        }
        for m in 0..site.mor_count() {
            let (a, b) = (site.mor(m).src, site.mor(m).dst);
            let table = &self.data.action[m];
            if table.len() != self.size(b) {
                return Err(Error::MalformedPresheaf {
                    detail: format!("action table for {} has wrong length", site.mor(m).id),
                });
            }
            if table.iter().any(|&v| v >= self.size(a)) {
                return Err(Error::MalformedPresheaf {
                    detail: format!("action table for {} has out-of-range value", site.mor(m).id),
                });
            }
            if site.is_identity(m) && table.iter().enumerate().any(|(i, &v)| i != v) {
                let x = table.iter().enumerate().find(|(i, v)| *i != **v).unwrap().0;
                return Err(Error::FunctorialityViolation {
                    object: site.objects()[b].clone(),
                    element: self.elem(b, x).clone(),
                    f: site.mor(m).id.clone(),
                    g: site.mor(m).id.clone(),
                });
            }
        }
        // (x·g)·f = x·(g∘f) for every composable pair g : b → c, f : a → b.
        for g in 0..site.mor_count() {
            for f in 0..site.mor_count() {
                let Some(gf) = site.compose(g, f) else {
                    continue;
                };
                let c = site.mor(g).dst;
                for x in 0..self.size(c) {
                    if self.act(f, self.act(g, x)) != self.act(gf, x) {
                        return Err(Error::FunctorialityViolation {
                            object: site.objects()[c].clone(),
                            element: self.elem(c, x).clone(),
                            f: site.mor(f).id.clone(),
                            g: site.mor(g).id.clone(),
                        });
                    }
                }
            }
        }
        Ok(())
    }

    pub fn from_raw(
        site: &Arc<FiniteCategory>,
        raw: &RawPresheaf,
        guard: &SizeGuard,
    ) -> Result<Presheaf> {
        let mut carrier: Vec<Vec<ElemId>> = Vec::with_capacity(site.object_count());
        for o in site.objects() {
            let elems = raw.carrier.get(o.as_str()).ok_or_else(|| {
                Error::MalformedPresheaf {
                    detail: format!("no carrier entry for object {o}"),
                }
            })?;
            carrier.push(elems.iter().map(|e| ElemId(e.clone())).collect());
        }
        guard.check_elements(carrier.iter().map(|c| c.len()).sum(), "presheaf carrier")?;

        let find = |o: usize, name: &str| -> Result<usize> {
            carrier[o]
                .iter()
                .position(|e| e.as_str() == name)
                .ok_or_else(|| Error::UnknownElement {
                    object: site.objects()[o].clone(),
                    element: ElemId(name.to_string()),
                })
        };

        let mut action: Vec<Vec<Option<usize>>> = (0..site.mor_count())
            .map(|m| vec![None; carrier[site.mor(m).dst].len()])
            .collect();
        for entry in &raw.action {
            let m = site.mor_index_or_err(&MorId(entry.morphism.clone()))?;
            let (a, b) = (site.mor(m).src, site.mor(m).dst);
            let x = find(b, &entry.element)?;
            let y = find(a, &entry.result)?;
            if let Some(prev) = action[m][x] {
                if prev != y {
                    return Err(Error::MalformedPresheaf {
                        detail: format!(
                            "conflicting action entries for element {} along {}",
                            entry.element, entry.morphism
                        ),
                    });
                }
            }
            action[m][x] = Some(y);
        }
        let mut tables: Vec<Vec<usize>> = Vec::with_capacity(action.len());
        for (m, table) in action.into_iter().enumerate() {
            let is_id = site.is_identity(m);
            let mut out = Vec::with_capacity(table.len());
            for (x, v) in table.into_iter().enumerate() {
                match v {
                    Some(y) => out.push(y),
                    None if is_id => out.push(x),
                    None => {
                        return Err(Error::MalformedPresheaf {
                            detail: format!(
                                "missing action entry for element {} along {}",
                                self_elem_name(&carrier, site, m, x),
                                site.mor(m).id
                            ),
                        })
                    }
                }
            }
            tables.push(out);
        }
        Presheaf::new(Arc::clone(site), carrier, tables)
    }

    pub fn to_raw(&self) -> RawPresheaf {
        let site = self.site();
        let carrier = site
            .objects()
            .iter()
            .enumerate()
            .map(|(o, name)| {
                (
                    name.0.clone(),
                    self.carrier(o).iter().map(|e| e.0.clone()).collect(),
                )
            })
            .collect();
        let mut action = Vec::new();
        for m in 0..site.mor_count() {
            if site.is_identity(m) {
                continue;
            }
            let b = site.mor(m).dst;
            let a = site.mor(m).src;
            for x in 0..self.size(b) {
                action.push(RawAction {
                    element: self.elem(b, x).0.clone(),
                    morphism: site.mor(m).id.0.clone(),
                    result: self.elem(a, self.act(m, x)).0.clone(),
                });
            }
        }
        RawPresheaf {
            carrier,
            action,
        }
    }
}

fn self_elem_name(
    carrier: &[Vec<ElemId>],
    site: &FiniteCategory,
    m: usize,
    x: usize,
) -> String {
    carrier[site.mor(m).dst][x].0.clone()
}

/// The terminal presheaf: one element everywhere.
pub fn terminal(site: &Arc<FiniteCategory>) -> Presheaf {
    let carrier = vec![vec![ElemId("*".to_string())]; site.object_count()];
    let action = (0..site.mor_count()).map(|_| vec![0]).collect();
    Presheaf::new_unchecked(Arc::clone(site), carrier, action)
}

/// The empty presheaf.
pub fn initial(site: &Arc<FiniteCategory>) -> Presheaf {
    let carrier = vec![Vec::new(); site.object_count()];
    let action = (0..site.mor_count()).map(|_| Vec::new()).collect();
    Presheaf::new_unchecked(Arc::clone(site), carrier, action)
}

/// The representable presheaf C(-, c): carrier at d is hom(d, c), action is
/// precomposition. Element names are the morphism identifiers.
pub fn representable(site: &Arc<FiniteCategory>, c: &ObjId) -> Result<Presheaf> {
    let ci = site.object_index_or_err(c)?;
    let carrier: Vec<Vec<ElemId>> = (0..site.object_count())
        .map(|d| {
            site.hom(d, ci)
                .iter()
                .map(|&t| ElemId(site.mor(t).id.0.clone()))
                .collect()
        })
        .collect();
    let mut action = Vec::with_capacity(site.mor_count());
    for m in 0..site.mor_count() {
        let (a, b) = (site.mor(m).src, site.mor(m).dst);
        let table = site
            .hom(b, ci)
            .iter()
            .map(|&t| {
                let tf = site.compose(t, m).expect("composable by construction");
                site.hom(a, ci).iter().position(|&u| u == tf).unwrap()
            })
            .collect();
        action.push(table);
    }
    Ok(Presheaf::new_unchecked(
        Arc::clone(site),
        carrier,
        action,
    ))
}

/// A natural transformation between presheaves on the same site.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NatTrans {
    source: Presheaf,
    target: Presheaf,
    comps: Vec<Vec<usize>>,
}

/// On-disk map description: source and target presheaves plus components.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq, Eq)]
pub struct RawNatTrans {
    pub source: RawPresheaf,
    pub target: RawPresheaf,
    pub components: BTreeMap<String, BTreeMap<String, String>>,
}

impl NatTrans {
    pub fn new(source: Presheaf, target: Presheaf, comps: Vec<Vec<usize>>) -> Result<NatTrans> {
        if !same_site(source.site(), target.site()) {
            return Err(Error::SiteMismatch);
        }
        let site = Arc::clone(source.site());
        if comps.len() != site.object_count() {
            return Err(Error::MalformedPresheaf {
                detail: "component list does not cover all objects".to_string(),
            });
        }
        for o in 0..site.object_count() {
            if comps[o].len() != source.size(o) {
                return Err(Error::MalformedPresheaf {
                    detail: format!("component at {} has wrong length", site.objects()[o]),
                });
            }
            if comps[o].iter().any(|&v| v >= target.size(o)) {
                return Err(Error::MalformedPresheaf {
                    detail: format!("component at {} has out-of-range value", site.objects()[o]),
                });
            }
        }
        for m in 0..site.mor_count() {
            let (a, b) = (site.mor(m).src, site.mor(m).dst);
            for x in 0..source.size(b) {
                if comps[a][source.act(m, x)] != target.act(m, comps[b][x]) {
                    return Err(Error::NaturalityViolation {
                        object: site.objects()[b].clone(),
                        element: source.elem(b, x).clone(),
                        morphism: site.mor(m).id.clone(),
                    });
                }
            }
        }
        Ok(NatTrans {
            source,
            target,
            comps,
        })
    }

    pub(crate) fn new_unchecked(
        source: Presheaf,
        target: Presheaf,
        comps: Vec<Vec<usize>>,
    ) -> NatTrans {
        debug_assert!(
            NatTrans::new(source.clone(), target.clone(), comps.clone()).is_ok(),
            "{:?}",
            NatTrans::new(source.clone(), target.clone(), comps.clone())
        );
        NatTrans {
            source,
            target,
            comps,
        }
    }

    pub fn identity(x: &Presheaf) -> NatTrans {
        let comps = (0..x.site().object_count())
            .map(|o| (0..x.size(o)).collect())
            .collect();
        NatTrans {
            source: x.clone(),
            target: x.clone(),
            comps,
        }
    }

    pub fn source(&self) -> &Presheaf {
        &self.source
    }

    pub fn target(&self) -> &Presheaf {
        &self.target
    }

    pub fn comp(&self, o: usize, x: usize) -> usize {
        self.comps[o][x]
    }

    pub fn components(&self) -> &[Vec<usize>] {
        &self.comps
    }

    /// g ∘ f (this = g).
    pub fn compose(&self, f: &NatTrans) -> Result<NatTrans> {
        if f.target != self.source {
            return Err(Error::IllTypedDiagram {
                detail: "composition endpoints do not match".to_string(),
            });
        }
        let comps = (0..self.comps.len())
            .map(|o| f.comps[o].iter().map(|&x| self.comps[o][x]).collect())
            .collect();
        Ok(NatTrans {
            source: f.source.clone(),
            target: self.target.clone(),
            comps,
        })
    }

    pub fn from_raw(
        site: &Arc<FiniteCategory>,
        raw: &RawNatTrans,
        guard: &SizeGuard,
    ) -> Result<NatTrans> {
        let source = Presheaf::from_raw(site, &raw.source, guard)?;
        let target = Presheaf::from_raw(site, &raw.target, guard)?;
        let mut comps = Vec::with_capacity(site.object_count());
        for o in 0..site.object_count() {
            let name = &site.objects()[o];
            let table = raw.components.get(name.as_str());
            let mut row = Vec::with_capacity(source.size(o));
            for x in 0..source.size(o) {
                let ex = source.elem(o, x);
                let img = table.and_then(|t| t.get(ex.as_str())).ok_or_else(|| {
                    Error::MalformedPresheaf {
                        detail: format!("missing component for element {ex} at {name}"),
                    }
                })?;
                let y = target.elem_index(o, &ElemId(img.clone())).ok_or_else(|| {
                    Error::UnknownElement {
                        object: name.clone(),
                        element: ElemId(img.clone()),
                    }
                })?;
                row.push(y);
            }
            comps.push(row);
        }
        NatTrans::new(source, target, comps)
    }

    pub fn to_raw(&self) -> RawNatTrans {
        let site = self.source.site();
        let mut components = BTreeMap::new();
        for o in 0..site.object_count() {
            let mut table = BTreeMap::new();
            for x in 0..self.source.size(o) {
                table.insert(
                    self.source.elem(o, x).0.clone(),
                    self.target.elem(o, self.comps[o][x]).0.clone(),
                );
            }
            components.insert(site.objects()[o].0.clone(), table);
        }
        RawNatTrans {
            source: self.source.to_raw(),
            target: self.target.to_raw(),
            components,
        }
    }
}

/// Pointwise classification; split monos are found by exhaustive retraction
/// search, so this is exact and only suitable for desk-sized inputs.
pub fn morphism_class(f: &NatTrans, guard: &SizeGuard) -> Result<MorphismClass> {
    let site = f.source().site();
    let mut mono = true;
    let mut epi = true;
    for o in 0..site.object_count() {
        let mut hit = vec![false; f.target().size(o)];
        for x in 0..f.source().size(o) {
            let y = f.comp(o, x);
            if hit[y] {
                mono = false;
            }
            hit[y] = true;
        }
        if hit.iter().any(|h| !h) {
            epi = false;
        }
    }
    let iso = mono && epi;
    let split_mono = if iso {
        true
    } else if !mono {
        false
    } else {
        hom_set(f.target(), f.source(), guard)?
            .iter()
            .any(|r| r.compose(f).map(|rf| rf == NatTrans::identity(f.source())).unwrap_or(false))
    };
    Ok(MorphismClass {
        mono,
        epi,
        iso,
        split_mono,
    })
}

/// Every natural transformation X → Y, in lexicographic order of component
/// choices. Backtracking with incremental naturality pruning.
pub fn hom_set(x: &Presheaf, y: &Presheaf, guard: &SizeGuard) -> Result<Vec<NatTrans>> {
    if !same_site(x.site(), y.site()) {
        return Err(Error::SiteMismatch);
    }
    let site = x.site();
    let slots: Vec<(usize, usize)> = (0..site.object_count())
        .flat_map(|o| (0..x.size(o)).map(move |i| (o, i)))
        .collect();
    let mut slot_of = vec![Vec::new(); site.object_count()];
    for (s, &(o, i)) in slots.iter().enumerate() {
        debug_assert_eq!(slot_of[o].len(), i);
        slot_of[o].push(s);
    }
    let mut images: Vec<Option<usize>> = vec![None; slots.len()];
    let mut out = Vec::new();
    search_homs(
        site,
        x,
        y,
        &slots,
        &slot_of,
        &mut images,
        0,
        &mut out,
        guard,
    )?;
    Ok(out)
}

#[allow(clippy::too_many_arguments)]
fn search_homs(
    site: &Arc<FiniteCategory>,
    x: &Presheaf,
    y: &Presheaf,
    slots: &[(usize, usize)],
    slot_of: &[Vec<usize>],
    images: &mut Vec<Option<usize>>,
    at: usize,
    out: &mut Vec<NatTrans>,
    guard: &SizeGuard,
) -> Result<()> {
    if at == slots.len() {
        guard.check_elements(out.len() + 1, "hom-set enumeration")?;
        let comps = (0..site.object_count())
            .map(|o| slot_of[o].iter().map(|&s| images[s].unwrap()).collect())
            .collect();
        out.push(NatTrans {
            source: x.clone(),
            target: y.clone(),
            comps,
        });
        return Ok(());
    }
    let (b, xi) = slots[at];
    'cand: for img in 0..y.size(b) {
        // Naturality against already-assigned slots in both directions.
        for m in 0..site.mor_count() {
            if site.mor(m).dst == b {
                let a = site.mor(m).src;
                let s = slot_of[a][x.act(m, xi)];
                if let Some(assigned) = images[s] {
                    if y.act(m, img) != assigned {
                        continue 'cand;
                    }
                } else if s == at {
                    // m acts x ↦ x within the same slot (endomorphism fixing xi).
                    if y.act(m, img) != img {
                        continue 'cand;
                    }
                }
            }
            if site.mor(m).src == b {
                let c = site.mor(m).dst;
                for xc in 0..x.size(c) {
                    if x.act(m, xc) == xi {
                        if let Some(assigned) = images[slot_of[c][xc]] {
                            if y.act(m, assigned) != img {
                                continue 'cand;
                            }
                        }
                    }
                }
            }
        }
        images[at] = Some(img);
        search_homs(site, x, y, slots, slot_of, images, at + 1, out, guard)?;
        images[at] = None;
    }
    Ok(())
}

/// First isomorphism X ≅ Y in lexicographic order, if any.
pub fn are_isomorphic(x: &Presheaf, y: &Presheaf) -> Option<NatTrans> {
    if !same_site(x.site(), y.site()) {
        return None;
    }
    let site = x.site();
    if (0..site.object_count()).any(|o| x.size(o) != y.size(o)) {
        return None;
    }
    let slots: Vec<(usize, usize)> = (0..site.object_count())
        .flat_map(|o| (0..x.size(o)).map(move |i| (o, i)))
        .collect();
    let mut slot_of = vec![Vec::new(); site.object_count()];
    for (s, &(o, i)) in slots.iter().enumerate() {
        debug_assert_eq!(slot_of[o].len(), i);
        slot_of[o].push(s);
    }
    let mut images = vec![None; slots.len()];
    let mut used: Vec<Vec<bool>> = (0..site.object_count())
        .map(|o| vec![false; y.size(o)])
        .collect();
    search_iso(site, x, y, &slots, &slot_of, &mut images, &mut used, 0).map(|comps| NatTrans {
        source: x.clone(),
        target: y.clone(),
        comps,
    })
}

#[allow(clippy::too_many_arguments)]
fn search_iso(
    site: &Arc<FiniteCategory>,
    x: &Presheaf,
    y: &Presheaf,
    slots: &[(usize, usize)],
    slot_of: &[Vec<usize>],
    images: &mut Vec<Option<usize>>,
    used: &mut Vec<Vec<bool>>,
    at: usize,
) -> Option<Vec<Vec<usize>>> {
    if at == slots.len() {
        return Some(
            (0..site.object_count())
                .map(|o| slot_of[o].iter().map(|&s| images[s].unwrap()).collect())
                .collect(),
        );
    }
    let (b, xi) = slots[at];
    'cand: for img in 0..y.size(b) {
        if used[b][img] {
            continue;
        }
        for m in 0..site.mor_count() {
            if site.mor(m).dst == b {
                let a = site.mor(m).src;
                let s = slot_of[a][x.act(m, xi)];
                if let Some(assigned) = images[s] {
                    if y.act(m, img) != assigned {
                        continue 'cand;
                    }
                } else if s == at && y.act(m, img) != img {
                    continue 'cand;
                }
            }
            if site.mor(m).src == b {
                let c = site.mor(m).dst;
                for xc in 0..x.size(c) {
                    if x.act(m, xc) == xi {
                        if let Some(assigned) = images[slot_of[c][xc]] {
                            if y.act(m, assigned) != img {
                                continue 'cand;
                            }
                        }
                    }
                }
            }
        }
        images[at] = Some(img);
        used[b][img] = true;
        if let Some(found) = search_iso(site, x, y, slots, slot_of, images, used, at + 1) {
            return Some(found);
        }
        images[at] = None;
        used[b][img] = false;
    }
    None
}

/// The transformation C(-, c) → X picking out the figure `x` at `c`
/// (component at d: t ↦ x·t).
pub fn yoneda(x: &Presheaf, c: &ObjId, elem: &ElemId) -> Result<NatTrans> {
    let site = x.site();
    let ci = site.object_index_or_err(c)?;
    let xi = x
        .elem_index(ci, elem)
        .ok_or_else(|| Error::UnknownElement {
            object: c.clone(),
            element: elem.clone(),
        })?;
    let rep = representable(site, c)?;
    let comps = (0..site.object_count())
        .map(|d| {
            site.hom(d, ci)
                .iter()
                .map(|&t| x.act(t, xi))
                .collect()
        })
        .collect();
    Ok(NatTrans::new_unchecked(rep, x.clone(), comps))
}

/// A subpresheaf: a per-object selection closed under the action.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Subpresheaf {
    ambient: Presheaf,
    sel: Vec<BTreeSet<usize>>,
}

impl Subpresheaf {
    pub fn new(ambient: Presheaf, sel: Vec<BTreeSet<usize>>) -> Result<Subpresheaf> {
        let site = Arc::clone(ambient.site());
        if sel.len() != site.object_count() {
            return Err(Error::MalformedPresheaf {
                detail: "selection does not cover all objects".to_string(),
            });
        }
        for (o, s) in sel.iter().enumerate() {
            if s.iter().any(|&i| i >= ambient.size(o)) {
                return Err(Error::MalformedPresheaf {
                    detail: format!("selection at {} is out of range", site.objects()[o]),
                });
            }
        }
        for m in 0..site.mor_count() {
            let (a, b) = (site.mor(m).src, site.mor(m).dst);
            for &x in &sel[b] {
                if !sel[a].contains(&ambient.act(m, x)) {
                    return Err(Error::MalformedPresheaf {
                        detail: format!(
                            "selection is not closed: {}·{} falls outside",
                            ambient.elem(b, x),
                            site.mor(m).id
                        ),
                    });
                }
            }
        }
        Ok(Subpresheaf { ambient, sel })
    }

    pub(crate) fn new_unchecked(ambient: Presheaf, sel: Vec<BTreeSet<usize>>) -> Subpresheaf {
        debug_assert!(
            Subpresheaf::new(ambient.clone(), sel.clone()).is_ok(),
            "{:?}",
            Subpresheaf::new(ambient.clone(), sel.clone())
        );
        Subpresheaf { ambient, sel }
    }

    pub fn full(ambient: &Presheaf) -> Subpresheaf {
        let sel = (0..ambient.site().object_count())
            .map(|o| (0..ambient.size(o)).collect())
            .collect();
        Subpresheaf {
            ambient: ambient.clone(),
            sel,
        }
    }

    pub fn empty(ambient: &Presheaf) -> Subpresheaf {
        Subpresheaf {
            ambient: ambient.clone(),
            sel: vec![BTreeSet::new(); ambient.site().object_count()],
        }
    }

    pub fn ambient(&self) -> &Presheaf {
        &self.ambient
    }

    pub fn selection(&self, o: usize) -> &BTreeSet<usize> {
        &self.sel[o]
    }

    pub fn selections(&self) -> &[BTreeSet<usize>] {
        &self.sel
    }

    pub fn contains(&self, o: usize, i: usize) -> bool {
        self.sel[o].contains(&i)
    }

    pub fn is_full(&self) -> bool {
        (0..self.sel.len()).all(|o| self.sel[o].len() == self.ambient.size(o))
    }

    pub fn total_size(&self) -> usize {
        self.sel.iter().map(|s| s.len()).sum()
    }

    pub fn is_contained_in(&self, other: &Subpresheaf) -> bool {
        self.ambient == other.ambient
            && self
                .sel
                .iter()
                .zip(&other.sel)
                .all(|(a, b)| a.is_subset(b))
    }

    /// Realize as a presheaf with its inclusion. Element names are kept.
    pub fn to_presheaf(&self) -> (Presheaf, NatTrans) {
        let site = self.ambient.site();
        let index: Vec<Vec<usize>> = self.sel.iter().map(|s| s.iter().copied().collect()).collect();
        let carrier = (0..site.object_count())
            .map(|o| {
                index[o]
                    .iter()
                    .map(|&i| self.ambient.elem(o, i).clone())
                    .collect()
            })
            .collect();
        let position = |o: usize, i: usize| index[o].binary_search(&i).unwrap();
        let action = (0..site.mor_count())
            .map(|m| {
                let (a, b) = (site.mor(m).src, site.mor(m).dst);
                index[b]
                    .iter()
                    .map(|&i| position(a, self.ambient.act(m, i)))
                    .collect()
            })
            .collect();
        let sub = Presheaf::new_unchecked(Arc::clone(site), carrier, action);
        let comps = (0..site.object_count())
            .map(|o| index[o].clone())
            .collect();
        let incl = NatTrans::new_unchecked(sub.clone(), self.ambient.clone(), comps);
        (sub, incl)
    }

    /// Preimage along f of a subpresheaf of f's target.
    pub fn preimage(f: &NatTrans, sub: &Subpresheaf) -> Result<Subpresheaf> {
        if sub.ambient() != f.target() {
            return Err(Error::IllTypedDiagram {
                detail: "subpresheaf is not of the map's target".to_string(),
            });
        }
        let site = f.source().site();
        let sel = (0..site.object_count())
            .map(|o| {
                (0..f.source().size(o))
                    .filter(|&x| sub.contains(o, f.comp(o, x)))
                    .collect()
            })
            .collect();
        Ok(Subpresheaf::new_unchecked(f.source().clone(), sel))
    }

    /// Direct image of f as a subpresheaf of its target.
    pub fn image_of(f: &NatTrans) -> Subpresheaf {
        let site = f.source().site();
        let sel = (0..site.object_count())
            .map(|o| (0..f.source().size(o)).map(|x| f.comp(o, x)).collect())
            .collect();
        Subpresheaf::new_unchecked(f.target().clone(), sel)
    }
}

impl fmt::Display for Subpresheaf {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let site = self.ambient.site();
        let mut first = true;
        write!(f, "{{")?;
        for o in 0..site.object_count() {
            if !first {
                write!(f, "; ")?;
            }
            first = false;
            let names: Vec<&str> = self.sel[o]
                .iter()
                .map(|&i| self.ambient.elem(o, i).as_str())
                .collect();
            write!(f, "{}:{{{}}}", site.objects()[o], names.join(","))?;
        }
        write!(f, "}}")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fincat::catalog;

    fn delta1() -> Arc<FiniteCategory> {
        catalog("delta1").unwrap()
    }

    #[test]
    fn representable_at_1_is_the_generic_arrow() {
        let site = delta1();
        let a = representable(&site, &"[1]".into()).unwrap();
        let o0 = site.object_index(&"[0]".into()).unwrap();
        let o1 = site.object_index(&"[1]".into()).unwrap();
        assert_eq!(a.size(o0), 2);
        assert_eq!(a.size(o1), 3);
        // Carrier names are morphism identifiers, ascending.
        let names: Vec<&str> = a.carrier(o1).iter().map(|e| e.as_str()).collect();
        assert_eq!(names, vec!["c0", "c1", "id1"]);
        // Degenerate elements are exactly the bang-images of the two points.
        let bang = site.mor_index(&"bang".into()).unwrap();
        let deg: BTreeSet<usize> = (0..a.size(o0)).map(|n| a.act(bang, n)).collect();
        assert_eq!(deg.len(), 2);
        let id1 = a.elem_index(o1, &"id1".into()).unwrap();
        assert!(!deg.contains(&id1));
    }

    #[test]
    fn representable_at_0_is_terminal() {
        let site = delta1();
        let r = representable(&site, &"[0]".into()).unwrap();
        let t = terminal(&site);
        assert!(are_isomorphic(&r, &t).is_some());
    }

    #[test]
    fn raw_roundtrip_preserves_presheaf() {
        let site = delta1();
        let a = representable(&site, &"[1]".into()).unwrap();
        let again = Presheaf::from_raw(&site, &a.to_raw(), &SizeGuard::default()).unwrap();
        assert_eq!(a, again);
    }

    #[test]
    fn broken_action_is_rejected() {
        let site = delta1();
        let a = representable(&site, &"[1]".into()).unwrap();
        let mut raw = a.to_raw();
        // Send id1·d0 somewhere inconsistent with id1·c0 = c0 followed by c0·d0.
        for entry in &mut raw.action {
            if entry.element == "id1" && entry.morphism == "d0" {
                entry.result = "d1".to_string();
            }
        }
        let err = Presheaf::from_raw(&site, &raw, &SizeGuard::default()).unwrap_err();
        assert!(matches!(err, Error::FunctorialityViolation { .. }), "{err:?}");
    }

    #[test]
    fn missing_action_entry_is_rejected() {
        let site = delta1();
        let a = representable(&site, &"[1]".into()).unwrap();
        let mut raw = a.to_raw();
        raw.action.retain(|e| !(e.element == "id1" && e.morphism == "d0"));
        assert!(matches!(
            Presheaf::from_raw(&site, &raw, &SizeGuard::default()),
            Err(Error::MalformedPresheaf { .. })
        ));
    }

    #[test]
    fn duplicate_element_rejected() {
        let site = catalog("terminal").unwrap();
        let raw = RawPresheaf {
            carrier: [("*".to_string(), vec!["x".to_string(), "x".to_string()])]
                .into_iter()
                .collect(),
            action: vec![],
        };
        assert!(matches!(
            Presheaf::from_raw(&site, &raw, &SizeGuard::default()),
            Err(Error::MalformedPresheaf { .. })
        ));
    }

    #[test]
    fn carrier_guard_enforced() {
        let site = catalog("terminal").unwrap();
        let raw = RawPresheaf {
            carrier: [(
                "*".to_string(),
                (0..20).map(|i| format!("x{i}")).collect(),
            )]
            .into_iter()
            .collect(),
            action: (0..0).map(|_| unreachable!()).collect::<Vec<RawAction>>(),
        };
        let tight = SizeGuard {
            max_morphisms: 64,
            max_total_elements: 10,
        };
        assert!(matches!(
            Presheaf::from_raw(&site, &raw, &tight),
            Err(Error::SizeGuardExceeded { .. })
        ));
    }

    #[test]
    fn yoneda_counts_match_carrier() {
        // Natural maps C(-,c) → X biject with X(c).
        let site = delta1();
        let x = representable(&site, &"[1]".into()).unwrap();
        for (c, expected) in [("[0]", 2), ("[1]", 3)] {
            let rep = representable(&site, &c.into()).unwrap();
            let homs = hom_set(&rep, &x, &SizeGuard::default()).unwrap();
            assert_eq!(homs.len(), expected, "{c}");
            let ci = site.object_index(&c.into()).unwrap();
            for e in x.carrier(ci) {
                let y = yoneda(&x, &c.into(), e).unwrap();
                assert!(homs.contains(&y));
            }
        }
    }

    #[test]
    fn naturality_violation_detected() {
        let site = delta1();
        let a = representable(&site, &"[1]".into()).unwrap();
        let t = terminal(&site);
        // Swap a component of the valid "pick the d0 point" map to break naturality.
        let o0 = site.object_index(&"[0]".into()).unwrap();
        let o1 = site.object_index(&"[1]".into()).unwrap();
        let d0 = a.elem_index(o0, &"d0".into()).unwrap();
        let d1 = a.elem_index(o0, &"d1".into()).unwrap();
        let c0 = a.elem_index(o1, &"c0".into()).unwrap();
        let mut comps = vec![Vec::new(); 2];
        comps[o0] = vec![d0];
        comps[o1] = vec![c0];
        let bad = NatTrans::new(t.clone(), a.clone(), {
            let mut c = comps.clone();
            c[o0] = vec![d1];
            c
        });
        assert!(matches!(bad, Err(Error::NaturalityViolation { .. })));
        assert!(NatTrans::new(t, a, comps).is_ok());
    }

    #[test]
    fn subpresheaf_closure_checked() {
        let site = delta1();
        let a = representable(&site, &"[1]".into()).unwrap();
        let o0 = site.object_index(&"[0]".into()).unwrap();
        let o1 = site.object_index(&"[1]".into()).unwrap();
        let id1 = a.elem_index(o1, &"id1".into()).unwrap();
        // The generic edge without its endpoints is not closed; with the
        // endpoints it still misses their degenerate edges.
        let mut sel = vec![BTreeSet::new(), BTreeSet::new()];
        sel[o1].insert(id1);
        assert!(Subpresheaf::new(a.clone(), sel.clone()).is_err());
        sel[o0].insert(0);
        sel[o0].insert(1);
        assert!(Subpresheaf::new(a.clone(), sel.clone()).is_err());
        sel[o1].insert(a.elem_index(o1, &"c0".into()).unwrap());
        sel[o1].insert(a.elem_index(o1, &"c1".into()).unwrap());
        assert!(Subpresheaf::new(a.clone(), sel).is_ok());
    }

    #[test]
    fn subpresheaf_realizes_with_inclusion_mono() {
        let site = delta1();
        let a = representable(&site, &"[1]".into()).unwrap();
        let full = Subpresheaf::full(&a);
        let (p, incl) = full.to_presheaf();
        assert_eq!(p, a);
        let class = morphism_class(&incl, &SizeGuard::default()).unwrap();
        assert!(class.mono && class.iso);
    }

    #[test]
    fn hom_set_terminal_counts_points() {
        // Maps 1 → C(-,[1]) are the global points: exactly one (the node pair
        // d0/d1 fails naturality against bang unless the edge is degenerate).
        let site = delta1();
        let a = representable(&site, &"[1]".into()).unwrap();
        let pts = hom_set(&terminal(&site), &a, &SizeGuard::default()).unwrap();
        assert_eq!(pts.len(), 2);
    }

    #[test]
    fn iso_search_finds_relabeling() {
        let site = delta1();
        let a = representable(&site, &"[1]".into()).unwrap();
        let mut raw = a.to_raw();
        for (_, elems) in raw.carrier.iter_mut() {
            for e in elems.iter_mut() {
                *e = format!("z_{e}");
            }
        }
        for entry in &mut raw.action {
            entry.element = format!("z_{}", entry.element);
            entry.result = format!("z_{}", entry.result);
        }
        let b = Presheaf::from_raw(&site, &raw, &SizeGuard::default()).unwrap();
        assert!(are_isomorphic(&a, &b).is_some());
        assert!(a != b);
    }

    #[test]
    fn morphism_class_of_quotient_style_map() {
        let site = delta1();
        let a = representable(&site, &"[1]".into()).unwrap();
        let t = terminal(&site);
        let bang_comps = (0..site.object_count())
            .map(|o| vec![0; a.size(o)])
            .collect();
        let bang = NatTrans::new(a.clone(), t.clone(), bang_comps).unwrap();
        let class = morphism_class(&bang, &SizeGuard::default()).unwrap();
        assert!(class.epi && !class.mono && !class.iso && !class.split_mono);
    }
}
