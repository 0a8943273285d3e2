//! The local state classifier: congruences on representables, the classifier
//! presheaf Ξ built from them, the singularity measurement σ, and probes.
//!
//! A congruence with apex c is a family of equivalence relations on the
//! hom-sets Hom(d, c), stable under precomposition. They are enumerated by
//! brute force over per-object partitions, ordered with the diagonal first
//! and the total congruence last. Ξ(c) is that list; restriction along f is
//! e ↦ e·f. σ sends a figure to its kernel. A probe is a restriction-closed
//! selection of congruences, which is the same thing as a subpresheaf of Ξ.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::fincat::{catalog, same_site, FiniteCategory, ObjId};
use crate::guard::SizeGuard;
use crate::presheaf::{
    enumerate_subpresheaves, hom_set, quotient_by_relation, representable, terminal, ElemId,
    NatTrans, Presheaf, Subpresheaf,
};

/// An equivalence relation on every Hom(d, apex), stable under precomposition.
/// Blocks hold global morphism indices; the partition is kept canonical
/// (blocks internally ascending, ordered by least element).
#[derive(Debug, Clone)]
pub struct Congruence {
    site: Arc<FiniteCategory>,
    apex: usize,
    parts: Vec<Vec<Vec<usize>>>,
}

impl PartialEq for Congruence {
    fn eq(&self, other: &Self) -> bool {
        same_site(&self.site, &other.site) && self.apex == other.apex && self.parts == other.parts
    }
}

impl Eq for Congruence {}

impl Congruence {
    pub fn site(&self) -> &Arc<FiniteCategory> {
        &self.site
    }

    pub fn apex(&self) -> usize {
        self.apex
    }

    pub fn blocks(&self, d: usize) -> &[Vec<usize>] {
        &self.parts[d]
    }

    pub fn total_block_count(&self) -> usize {
        self.parts.iter().map(|p| p.len()).sum()
    }

    fn canonicalize(parts: &mut [Vec<Vec<usize>>]) {
        for p in parts.iter_mut() {
            for block in p.iter_mut() {
                block.sort_unstable();
            }
            p.sort();
        }
    }

    /// Build from a per-object grouping of Hom(d, apex) computed by a key.
    fn from_key<K: Ord>(
        site: &Arc<FiniteCategory>,
        apex: usize,
        mut key: impl FnMut(usize, usize) -> K,
    ) -> Congruence {
        let mut parts = Vec::with_capacity(site.object_count());
        for d in 0..site.object_count() {
            let mut groups: BTreeMap<K, Vec<usize>> = BTreeMap::new();
            for &t in site.hom(d, apex) {
                groups.entry(key(d, t)).or_default().push(t);
            }
            parts.push(groups.into_values().collect());
        }
        let mut c = Congruence {
            site: Arc::clone(site),
            apex,
            parts,
        };
        Self::canonicalize(&mut c.parts);
        c
    }

    pub fn diagonal(site: &Arc<FiniteCategory>, apex: usize) -> Congruence {
        Congruence::from_key(site, apex, |_, t| t)
    }

    pub fn total(site: &Arc<FiniteCategory>, apex: usize) -> Congruence {
        Congruence::from_key(site, apex, |_, _| 0usize)
    }

    pub fn block_of(&self, d: usize, t: usize) -> usize {
        self.parts[d]
            .iter()
            .position(|b| b.binary_search(&t).is_ok())
            .expect("morphism belongs to some block")
    }

    pub fn related(&self, d: usize, t1: usize, t2: usize) -> bool {
        self.block_of(d, t1) == self.block_of(d, t2)
    }

    /// Stability: t₁ ~ t₂ at d implies t₁∘h ~ t₂∘h at d' for every h: d'→d.
    pub fn is_stable(&self) -> bool {
        for d in 0..self.site.object_count() {
            for block in &self.parts[d] {
                let lead = block[0];
                for &t in &block[1..] {
                    for h in 0..self.site.mor_count() {
                        if self.site.mor(h).dst != d {
                            continue;
                        }
                        let d2 = self.site.mor(h).src;
                        let lh = self.site.compose(lead, h).expect("composable");
                        let th = self.site.compose(t, h).expect("composable");
                        if !self.related(d2, lh, th) {
                            return false;
                        }
                    }
                }
            }
        }
        true
    }

    /// e·f for f: b → apex: relates t₁, t₂ at d iff f∘t₁ ~ f∘t₂ in e.
    pub fn restrict(&self, f: usize) -> Congruence {
        assert_eq!(self.site.mor(f).dst, self.apex, "restriction must target the apex");
        let b = self.site.mor(f).src;
        let site = Arc::clone(&self.site);
        Congruence::from_key(&site, b, |d, t| {
            let ft = self.site.compose(f, t).expect("composable");
            self.block_of(d, ft)
        })
    }

    /// Common refinement: relates exactly the pairs both congruences relate.
    pub fn meet(&self, other: &Congruence) -> Congruence {
        assert_eq!(self.apex, other.apex, "meet needs a shared apex");
        let site = Arc::clone(&self.site);
        Congruence::from_key(&site, self.apex, |d, t| {
            (self.block_of(d, t), other.block_of(d, t))
        })
    }

    /// Relation inclusion: every pair related here is related in `other`.
    pub fn leq(&self, other: &Congruence) -> bool {
        self.parts.iter().enumerate().all(|(d, p)| {
            p.iter().all(|block| {
                let lead = other.block_of(d, block[0]);
                block[1..].iter().all(|&t| other.block_of(d, t) == lead)
            })
        })
    }
}

impl fmt::Display for Congruence {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first_obj = true;
        for d in 0..self.site.object_count() {
            if self.parts[d].is_empty() {
                continue;
            }
            if !first_obj {
                write!(f, ";")?;
            }
            first_obj = false;
            write!(f, "{}:", self.site.objects()[d])?;
            for block in &self.parts[d] {
                let names: Vec<&str> =
                    block.iter().map(|&t| self.site.mor(t).id.as_str()).collect();
                write!(f, "{{{}}}", names.join(","))?;
            }
        }
        Ok(())
    }
}

/// The kernel of a figure: relates t₁, t₂ iff x·t₁ = x·t₂.
pub fn kernel_of_figure(x: &Presheaf, c: usize, elem: usize) -> Congruence {
    let site = Arc::clone(x.site());
    Congruence::from_key(&site, c, |_, t| x.act(t, elem))
}

/// All partitions of {0, .., n-1} as restricted growth strings, lexicographic.
fn partitions_of(n: usize) -> Vec<Vec<Vec<usize>>> {
    fn go(rgs: &mut Vec<usize>, max: usize, n: usize, out: &mut Vec<Vec<Vec<usize>>>) {
        if rgs.len() == n {
            let blocks = max + 1;
            let mut part = vec![Vec::new(); blocks];
            for (i, &b) in rgs.iter().enumerate() {
                part[b].push(i);
            }
            out.push(part);
            return;
        }
        for b in 0..=(max + 1).min(rgs.len()) {
            rgs.push(b);
            go(rgs, max.max(b), n, out);
            rgs.pop();
        }
    }
    if n == 0 {
        return vec![Vec::new()];
    }
    let mut out = Vec::new();
    let mut rgs = vec![0usize];
    go(&mut rgs, 0, n, &mut out);
    out
}

fn bell(n: usize) -> usize {
    // Small-n Bell numbers via the triangle; guards keep n tiny.
    let mut row = vec![1usize];
    for _ in 0..n {
        let mut next = vec![*row.last().unwrap()];
        for &v in &row {
            let s = next.last().unwrap().saturating_add(v);
            next.push(s);
        }
        row = next;
    }
    row[0]
}

/// Every congruence with the given apex, ordered by total block count
/// descending (diagonal first, total last) then lexicographically.
pub fn enumerate_congruences(
    site: &Arc<FiniteCategory>,
    apex: &ObjId,
    guard: &SizeGuard,
) -> Result<Vec<Congruence>> {
    let c = site.object_index_or_err(apex)?;
    let mut space: usize = 1;
    for d in 0..site.object_count() {
        space = space.saturating_mul(bell(site.hom(d, c).len()));
    }
    guard.check_elements(space, "congruence enumeration")?;

    let per_object: Vec<Vec<Vec<Vec<usize>>>> = (0..site.object_count())
        .map(|d| {
            let hom = site.hom(d, c);
            partitions_of(hom.len())
                .into_iter()
                .map(|part| {
                    part.into_iter()
                        .map(|block| block.into_iter().map(|i| hom[i]).collect())
                        .collect()
                })
                .collect()
        })
        .collect();

    let mut out = Vec::new();
    let mut choice = vec![0usize; site.object_count()];
    loop {
        let mut parts: Vec<Vec<Vec<usize>>> = (0..site.object_count())
            .map(|d| per_object[d][choice[d]].clone())
            .collect();
        Congruence::canonicalize(&mut parts);
        let cand = Congruence {
            site: Arc::clone(site),
            apex: c,
            parts,
        };
        if cand.is_stable() {
            out.push(cand);
        }
        let mut i = site.object_count();
        let done = loop {
            if i == 0 {
                break true;
            }
            i -= 1;
            if choice[i] + 1 < per_object[i].len() {
                choice[i] += 1;
                for ch in choice.iter_mut().skip(i + 1) {
                    *ch = 0;
                }
                break false;
            }
        };
        if done {
            break;
        }
    }
    out.sort_by(|a, b| {
        b.total_block_count()
            .cmp(&a.total_block_count())
            .then_with(|| a.parts.cmp(&b.parts))
    });
    Ok(out)
}

/// Quotient of the representable at the apex by the congruence; classes are
/// named by their least member.
pub fn quotient_by_congruence(e: &Congruence) -> Result<(Presheaf, NatTrans)> {
    let site = e.site();
    let apex_name = site.objects()[e.apex()].clone();
    let rep = representable(site, &apex_name)?;
    let mut pairs = Vec::new();
    for d in 0..site.object_count() {
        let hom = site.hom(d, e.apex());
        let pos = |t: usize| hom.iter().position(|&u| u == t).unwrap();
        for block in e.blocks(d) {
            for w in block.windows(2) {
                pairs.push((d, pos(w[0]), pos(w[1])));
            }
        }
    }
    let (q, proj) = quotient_by_relation(&rep, &pairs)?;
    debug_assert!((0..site.object_count()).all(|d| q.size(d) == e.blocks(d).len()));
    Ok((q, proj))
}

struct XiData {
    site: Arc<FiniteCategory>,
    presheaf: Presheaf,
    congs: Vec<Vec<Congruence>>,
    top: Vec<usize>,
    diag: Vec<usize>,
}

/// The local state classifier: Ξ(c) is the congruence list at c, restriction
/// is e·f, with the total congruence as top. Cheap to clone.
#[derive(Clone)]
pub struct Xi {
    data: Arc<XiData>,
}

impl fmt::Debug for Xi {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Xi")
            .field("presheaf", &self.data.presheaf)
            .finish()
    }
}

impl PartialEq for Xi {
    fn eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.data, &other.data) || self.data.presheaf == other.data.presheaf
    }
}

impl Eq for Xi {}

fn is_edge_site(site: &Arc<FiniteCategory>) -> bool {
    catalog("delta1").map(|d| same_site(site, &d)).unwrap_or(false)
}

/// Build Ξ with named elements: "diag", "total", and "e{index}" otherwise.
/// On the reflexive-graph site the three edges take their pictorial names:
/// the diagonal is the kernel of a non-loop edge ("non-loop") and the middle
/// congruence is the kernel of a loop ("loop").
pub fn build_xi(site: &Arc<FiniteCategory>, guard: &SizeGuard) -> Result<Xi> {
    let mut congs = Vec::with_capacity(site.object_count());
    for c in site.objects() {
        congs.push(enumerate_congruences(site, c, guard)?);
    }
    guard.check_elements(congs.iter().map(|c| c.len()).sum(), "classifier carrier")?;

    let edge_site = is_edge_site(site);
    let mut carrier = Vec::with_capacity(site.object_count());
    let mut top = Vec::with_capacity(site.object_count());
    let mut diag = Vec::with_capacity(site.object_count());
    for (c, list) in congs.iter().enumerate() {
        let total = Congruence::total(site, c);
        let diagonal = Congruence::diagonal(site, c);
        let mut names = Vec::with_capacity(list.len());
        for (i, e) in list.iter().enumerate() {
            let on_edges = edge_site && site.objects()[c].as_str() == "[1]";
            let name = if *e == total {
                "total".to_string()
            } else if *e == diagonal {
                if on_edges { "non-loop" } else { "diag" }.to_string()
            } else if on_edges && list.len() == 3 {
                "loop".to_string()
            } else {
                format!("e{i:03}")
            };
            names.push(ElemId(name));
        }
        top.push(list.iter().position(|e| *e == total).ok_or_else(|| {
            Error::Internal {
                detail: format!("total congruence missing at {}", site.objects()[c]),
            }
        })?);
        diag.push(list.iter().position(|e| *e == diagonal).ok_or_else(|| {
            Error::Internal {
                detail: format!("diagonal congruence missing at {}", site.objects()[c]),
            }
        })?);
        carrier.push(names);
    }

    let mut action = Vec::with_capacity(site.mor_count());
    for m in 0..site.mor_count() {
        let (a, b) = (site.mor(m).src, site.mor(m).dst);
        let mut table = Vec::with_capacity(congs[b].len());
        for e in &congs[b] {
            let r = e.restrict(m);
            let idx = congs[a].iter().position(|e2| *e2 == r).ok_or_else(|| {
                Error::Internal {
                    detail: format!(
                        "restriction along {} leaves the congruence list",
                        site.mor(m).id
                    ),
                }
            })?;
            table.push(idx);
        }
        action.push(table);
    }
    let presheaf = Presheaf::new(Arc::clone(site), carrier, action)?;
    Ok(Xi {
        data: Arc::new(XiData {
            site: Arc::clone(site),
            presheaf,
            congs,
            top,
            diag,
        }),
    })
}

impl Xi {
    pub fn site(&self) -> &Arc<FiniteCategory> {
        &self.data.site
    }

    pub fn presheaf(&self) -> &Presheaf {
        &self.data.presheaf
    }

    pub fn congruences(&self, c: usize) -> &[Congruence] {
        &self.data.congs[c]
    }

    pub fn congruence(&self, c: usize, i: usize) -> &Congruence {
        &self.data.congs[c][i]
    }

    pub fn name(&self, c: usize, i: usize) -> &str {
        self.data.presheaf.elem(c, i).as_str()
    }

    pub fn index_of(&self, e: &Congruence) -> Option<usize> {
        self.data.congs[e.apex()].iter().position(|x| x == e)
    }

    pub fn index_of_name(&self, c: usize, name: &str) -> Option<usize> {
        self.data.presheaf.elem_index(c, &ElemId(name.to_string()))
    }

    pub fn top_index(&self, c: usize) -> usize {
        self.data.top[c]
    }

    pub fn diag_index(&self, c: usize) -> usize {
        self.data.diag[c]
    }

    /// The point 1 → Ξ selecting the total congruence everywhere.
    pub fn top_point(&self) -> NatTrans {
        let t = terminal(&self.data.site);
        let comps = (0..self.data.site.object_count())
            .map(|c| vec![self.data.top[c]])
            .collect();
        NatTrans::new_unchecked(t, self.data.presheaf.clone(), comps)
    }

    /// Index of meet(e_i, e_j) at apex c.
    pub fn meet_index(&self, c: usize, i: usize, j: usize) -> usize {
        let m = self.data.congs[c][i].meet(&self.data.congs[c][j]);
        self.index_of(&m).expect("meets of stable congruences are stable")
    }

    pub fn leq(&self, c: usize, i: usize, j: usize) -> bool {
        self.data.congs[c][i].leq(&self.data.congs[c][j])
    }
}

/// The singularity measurement: x ↦ kernel of x, natural in X.
pub fn sigma(xi: &Xi, x: &Presheaf) -> Result<NatTrans> {
    if !same_site(xi.site(), x.site()) {
        return Err(Error::SiteMismatch);
    }
    let site = xi.site();
    let mut comps = Vec::with_capacity(site.object_count());
    for c in 0..site.object_count() {
        let mut row = Vec::with_capacity(x.size(c));
        for e in 0..x.size(c) {
            let k = kernel_of_figure(x, c, e);
            let idx = xi.index_of(&k).ok_or_else(|| Error::Internal {
                detail: format!("kernel of {} is not in the classifier", x.elem(c, e)),
            })?;
            row.push(idx);
        }
        comps.push(row);
    }
    NatTrans::new(x.clone(), xi.presheaf().clone(), comps)
}

/// Exhaustive list of global elements 1 → X.
pub fn points(x: &Presheaf, guard: &SizeGuard) -> Result<Vec<NatTrans>> {
    hom_set(&terminal(x.site()), x, guard)
}

/// A restriction-closed selection of congruences; the same data as a
/// subpresheaf of Ξ.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Probe {
    xi: Xi,
    sel: Vec<BTreeSet<usize>>,
}

/// On-disk probe: object name → congruence names.
pub type RawProbe = BTreeMap<String, Vec<String>>;

impl Probe {
    pub fn new(xi: &Xi, sel: Vec<BTreeSet<usize>>) -> Result<Probe> {
        let site = xi.site();
        if sel.len() != site.object_count() {
            return Err(Error::MalformedPresheaf {
                detail: "probe selection does not cover all objects".to_string(),
            });
        }
        for (c, s) in sel.iter().enumerate() {
            if s.iter().any(|&i| i >= xi.congruences(c).len()) {
                return Err(Error::MalformedPresheaf {
                    detail: format!("probe selection at {} is out of range", site.objects()[c]),
                });
            }
        }
        for c in 0..site.object_count() {
            for &i in &sel[c] {
                for m in site.arrows_into(c) {
                    let a = site.mor(m).src;
                    let r = xi.presheaf().act(m, i);
                    if !sel[a].contains(&r) {
                        return Err(Error::NotClosedUnderRestriction {
                            congruence: xi.name(c, i).to_string(),
                            morphism: site.mor(m).id.clone(),
                        });
                    }
                }
            }
        }
        Ok(Probe {
            xi: xi.clone(),
            sel,
        })
    }

    pub(crate) fn new_unchecked(xi: &Xi, sel: Vec<BTreeSet<usize>>) -> Probe {
        debug_assert!(Probe::new(xi, sel.clone()).is_ok());
        Probe {
            xi: xi.clone(),
            sel,
        }
    }

    pub fn xi(&self) -> &Xi {
        &self.xi
    }

    pub fn selection(&self, c: usize) -> &BTreeSet<usize> {
        &self.sel[c]
    }

    pub fn contains(&self, c: usize, i: usize) -> bool {
        self.sel[c].contains(&i)
    }

    pub fn contains_congruence(&self, e: &Congruence) -> bool {
        self.xi
            .index_of(e)
            .map(|i| self.sel[e.apex()].contains(&i))
            .unwrap_or(false)
    }

    pub fn has_empty_selection(&self) -> bool {
        self.sel.iter().any(|s| s.is_empty())
    }

    pub fn all(xi: &Xi) -> Probe {
        let sel = (0..xi.site().object_count())
            .map(|c| (0..xi.congruences(c).len()).collect())
            .collect();
        Probe {
            xi: xi.clone(),
            sel,
        }
    }

    pub fn total_only(xi: &Xi) -> Probe {
        let sel = (0..xi.site().object_count())
            .map(|c| [xi.top_index(c)].into_iter().collect())
            .collect();
        Probe::new_unchecked(xi, sel)
    }

    pub fn from_raw(xi: &Xi, raw: &RawProbe) -> Result<Probe> {
        let site = xi.site();
        let mut sel = vec![BTreeSet::new(); site.object_count()];
        for (obj, names) in raw {
            let c = site.object_index_or_err(&ObjId(obj.clone()))?;
            for name in names {
                let i = xi.index_of_name(c, name).ok_or_else(|| Error::UnknownElement {
                    object: site.objects()[c].clone(),
                    element: ElemId(name.clone()),
                })?;
                sel[c].insert(i);
            }
        }
        Probe::new(xi, sel)
    }

    pub fn to_raw(&self) -> RawProbe {
        let site = self.xi.site();
        (0..site.object_count())
            .map(|c| {
                (
                    site.objects()[c].0.clone(),
                    self.sel[c].iter().map(|&i| self.xi.name(c, i).to_string()).collect(),
                )
            })
            .collect()
    }

    /// Canonical display: "obj:name,name|obj:-" with "-" for empty.
    pub fn display_name(&self) -> String {
        let site = self.xi.site();
        (0..site.object_count())
            .map(|c| {
                let names: Vec<&str> =
                    self.sel[c].iter().map(|&i| self.xi.name(c, i)).collect();
                if names.is_empty() {
                    format!("{}:-", site.objects()[c])
                } else {
                    format!("{}:{}", site.objects()[c], names.join(","))
                }
            })
            .collect::<Vec<_>>()
            .join("|")
    }

    /// Saturated: with e also every congruence containing e is selected.
    pub fn is_saturated(&self) -> bool {
        let site = self.xi.site();
        (0..site.object_count()).all(|c| {
            self.sel[c].iter().all(|&i| {
                (0..self.xi.congruences(c).len())
                    .all(|j| !self.xi.leq(c, i, j) || self.sel[c].contains(&j))
            })
        })
    }

    /// The least saturated probe containing this one: upper closure.
    pub fn saturate(&self) -> Probe {
        let site = self.xi.site();
        let sel = (0..site.object_count())
            .map(|c| {
                (0..self.xi.congruences(c).len())
                    .filter(|&j| self.sel[c].iter().any(|&i| self.xi.leq(c, i, j)))
                    .collect()
            })
            .collect();
        Probe::new_unchecked(&self.xi, sel)
    }

    pub fn to_subpresheaf(&self) -> Subpresheaf {
        Subpresheaf::new_unchecked(self.xi.presheaf().clone(), self.sel.clone())
    }

    pub fn from_subpresheaf(xi: &Xi, sub: &Subpresheaf) -> Result<Probe> {
        if sub.ambient() != xi.presheaf() {
            return Err(Error::SiteMismatch);
        }
        Ok(Probe {
            xi: xi.clone(),
            sel: sub.selections().to_vec(),
        })
    }
}

/// Pointwise intersection of a nonempty family of probes.
pub fn intersect(probes: &[Probe]) -> Result<Probe> {
    let Some((first, rest)) = probes.split_first() else {
        return Err(Error::IllTypedDiagram {
            detail: "intersection needs at least one probe".to_string(),
        });
    };
    let mut sel = first.sel.clone();
    for p in rest {
        if p.xi != first.xi {
            return Err(Error::SiteMismatch);
        }
        for (c, s) in sel.iter_mut().enumerate() {
            *s = s.intersection(&p.sel[c]).copied().collect();
        }
    }
    Ok(Probe::new_unchecked(&first.xi, sel))
}

/// Every probe, in subpresheaf enumeration order.
pub fn all_probes(xi: &Xi, guard: &SizeGuard) -> Result<Vec<Probe>> {
    Ok(enumerate_subpresheaves(xi.presheaf(), guard)?
        .iter()
        .map(|sub| Probe::from_subpresheaf(xi, sub).expect("same ambient"))
        .collect())
}

/// Recover a probe from a coherent family: select e iff the family marks the
/// whole quotient of the representable by e.
pub fn probe_from_coherent(
    xi: &Xi,
    beta: &crate::shell::CoherentFamilyOracle,
) -> Result<Probe> {
    let site = xi.site();
    let mut sel = vec![BTreeSet::new(); site.object_count()];
    for c in 0..site.object_count() {
        for (i, e) in xi.congruences(c).iter().enumerate() {
            let (q, _) = quotient_by_congruence(e)?;
            let sub = beta.assign(&q)?;
            if sub.ambient() != &q {
                return Err(Error::OracleInconsistent {
                    detail: "family answered with a subpresheaf of a different object"
                        .to_string(),
                });
            }
            if sub.is_full() {
                sel[c].insert(i);
            }
        }
    }
    Probe::new(xi, sel).map_err(|e| Error::OracleInconsistent {
        detail: format!("family induces a non-closed selection: {e}"),
    })
}
