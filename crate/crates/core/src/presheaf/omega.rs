//! The subobject classifier: sieves, the top point, and characteristic maps.
//!
//! A sieve on c is a set of morphisms into c closed under precomposition.
//! Ω(c) is the set of all sieves on c, ordered by size then label, with
//! restriction S·f = {g | f∘g ∈ S}. The classifier property is exercised in
//! tests by pulling the top point back along characteristic maps.

use std::collections::{BTreeMap, BTreeSet};
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::fincat::FiniteCategory;
use crate::guard::SizeGuard;
use crate::presheaf::{terminal, ElemId, NatTrans, Presheaf, Subpresheaf};

/// The classifier presheaf together with its sieve table and top point.
#[derive(Debug, Clone)]
pub struct Omega {
    presheaf: Presheaf,
    /// Per object: the sieves, each a set of morphism indices.
    sieves: Vec<Vec<BTreeSet<usize>>>,
    maximal: Vec<usize>,
}

impl Omega {
    pub fn presheaf(&self) -> &Presheaf {
        &self.presheaf
    }

    pub fn sieve(&self, o: usize, i: usize) -> &BTreeSet<usize> {
        &self.sieves[o][i]
    }

    pub fn sieve_count(&self, o: usize) -> usize {
        self.sieves[o].len()
    }

    pub fn sieve_index(&self, o: usize, sieve: &BTreeSet<usize>) -> Option<usize> {
        self.sieves[o].iter().position(|s| s == sieve)
    }

    pub fn maximal_index(&self, o: usize) -> usize {
        self.maximal[o]
    }

    /// The point 1 → Ω selecting the maximal sieve everywhere.
    pub fn top(&self) -> NatTrans {
        let site = self.presheaf.site();
        let t = terminal(site);
        let comps = (0..site.object_count())
            .map(|o| vec![self.maximal[o]])
            .collect();
        NatTrans::new_unchecked(t, self.presheaf.clone(), comps)
    }
}

fn sieve_label(site: &FiniteCategory, sieve: &BTreeSet<usize>) -> String {
    let names: Vec<&str> = sieve.iter().map(|&m| site.mor(m).id.as_str()).collect();
    format!("{{{}}}", names.join(","))
}

fn is_sieve(site: &FiniteCategory, c: usize, set: &BTreeSet<usize>) -> bool {
    debug_assert!(set.iter().all(|&f| site.mor(f).dst == c));
    for &f in set {
        let a = site.mor(f).src;
        for g in site.arrows_into(a) {
            let fg = site.compose(f, g).expect("composable by construction");
            if !set.contains(&fg) {
                return false;
            }
        }
    }
    true
}

/// Build Ω for the site by brute-force sieve enumeration.
pub fn omega(site: &Arc<FiniteCategory>, guard: &SizeGuard) -> Result<Omega> {
    let mut sieves: Vec<Vec<BTreeSet<usize>>> = Vec::with_capacity(site.object_count());
    for c in 0..site.object_count() {
        let arrows = site.arrows_into(c);
        let n = arrows.len();
        let space = 1usize.checked_shl(n as u32).unwrap_or(usize::MAX);
        guard.check_elements(space, "sieve enumeration")?;
        let mut found: Vec<BTreeSet<usize>> = Vec::new();
        for mask in 0..space {
            let set: BTreeSet<usize> = (0..n)
                .filter(|i| mask & (1 << i) != 0)
                .map(|i| arrows[i])
                .collect();
            if is_sieve(site, c, &set) {
                found.push(set);
            }
        }
        found.sort_by(|a, b| {
            (a.len(), sieve_label(site, a)).cmp(&(b.len(), sieve_label(site, b)))
        });
        sieves.push(found);
    }
    guard.check_elements(sieves.iter().map(|s| s.len()).sum(), "classifier carrier")?;

    let index: Vec<BTreeMap<&BTreeSet<usize>, usize>> = sieves
        .iter()
        .map(|per| per.iter().enumerate().map(|(i, s)| (s, i)).collect())
        .collect();
    let carrier: Vec<Vec<ElemId>> = sieves
        .iter()
        .map(|per| per.iter().map(|s| ElemId(sieve_label(site, s))).collect())
        .collect();
    let mut action = Vec::with_capacity(site.mor_count());
    for m in 0..site.mor_count() {
        let (a, b) = (site.mor(m).src, site.mor(m).dst);
        let mut table = Vec::with_capacity(sieves[b].len());
        for s in &sieves[b] {
            let restricted: BTreeSet<usize> = site
                .arrows_into(a)
                .iter()
                .copied()
                .filter(|&g| s.contains(&site.compose(m, g).expect("composable")))
                .collect();
            table.push(*index[a].get(&restricted).ok_or_else(|| Error::Internal {
                detail: format!(
                    "restriction of a sieve along {} is not a sieve",
                    site.mor(m).id
                ),
            })?);
        }
        action.push(table);
    }
    let presheaf = Presheaf::new_unchecked(Arc::clone(site), carrier, action);
    let maximal = (0..site.object_count())
        .map(|c| {
            let all: BTreeSet<usize> = site.arrows_into(c).iter().copied().collect();
            sieves[c].iter().position(|s| *s == all).expect("maximal sieve exists")
        })
        .collect();
    Ok(Omega {
        presheaf,
        sieves,
        maximal,
    })
}

/// The characteristic map of a subpresheaf: x ↦ {f | x·f lands inside}.
pub fn characteristic(omega: &Omega, sub: &Subpresheaf) -> Result<NatTrans> {
    let x = sub.ambient();
    let site = x.site();
    let mut comps = Vec::with_capacity(site.object_count());
    for c in 0..site.object_count() {
        let mut row = Vec::with_capacity(x.size(c));
        for xi in 0..x.size(c) {
            let sieve: BTreeSet<usize> = site
                .arrows_into(c)
                .iter()
                .copied()
                .filter(|&f| sub.contains(site.mor(f).src, x.act(f, xi)))
                .collect();
            let idx = omega.sieve_index(c, &sieve).ok_or_else(|| Error::Internal {
                detail: format!(
                    "figure kernel sieve of {} is missing from the classifier",
                    x.elem(c, xi)
                ),
            })?;
            row.push(idx);
        }
        comps.push(row);
    }
    NatTrans::new(x.clone(), omega.presheaf.clone(), comps)
}
