//! Exhaustive enumeration of presheaves and subpresheaves within bounds.
//!
//! Presheaf enumeration backtracks over action tables for non-identity
//! morphisms, pruning with every composition constraint whose three tables
//! are already fixed, then dedupes up to isomorphism by minimizing over all
//! per-object carrier permutations. Output order is deterministic: carrier
//! sizes in lexicographic order, then the canonical action tuple.

use std::collections::BTreeSet;
use std::sync::Arc;

use crate::error::Result;
use crate::fincat::FiniteCategory;
use crate::guard::SizeGuard;
use crate::presheaf::{ElemId, Presheaf, Subpresheaf};

/// All presheaves with every carrier of size ≤ `bound`, up to isomorphism.
pub fn enumerate_presheaves(
    site: &Arc<FiniteCategory>,
    bound: usize,
    guard: &SizeGuard,
) -> Result<Vec<Presheaf>> {
    let n_obj = site.object_count();
    let mut size_space: usize = 1;
    for _ in 0..n_obj {
        size_space = size_space.saturating_mul(bound + 1);
    }
    guard.check_elements(size_space, "presheaf size vectors")?;

    let non_identity: Vec<usize> = (0..site.mor_count())
        .filter(|&m| !site.is_identity(m))
        .collect();

    let mut out = Vec::new();
    let mut sizes = vec![0usize; n_obj];
    loop {
        let mut canon: BTreeSet<Vec<Vec<usize>>> = BTreeSet::new();
        let mut tables: Vec<Option<Vec<usize>>> = vec![None; site.mor_count()];
        for m in 0..site.mor_count() {
            if site.is_identity(m) {
                tables[m] = Some((0..sizes[site.mor(m).dst]).collect());
            }
        }
        search_tables(site, &sizes, &non_identity, 0, &mut tables, &mut |full| {
            canon.insert(canonical_form(site, &sizes, full));
        })?;
        for form in canon {
            out.push(materialize(site, &sizes, &form));
        }
        // Advance the size vector lexicographically (last object fastest).
        let mut i = n_obj;
        loop {
            if i == 0 {
                return Ok(out);
            }
            i -= 1;
            if sizes[i] < bound {
                sizes[i] += 1;
                for s in sizes.iter_mut().skip(i + 1) {
                    *s = 0;
                }
                break;
            }
        }
    }
}

fn search_tables(
    site: &FiniteCategory,
    sizes: &[usize],
    remaining: &[usize],
    at: usize,
    tables: &mut Vec<Option<Vec<usize>>>,
    emit: &mut impl FnMut(&[Option<Vec<usize>>]),
) -> Result<()> {
    if at == remaining.len() {
        emit(tables);
        return Ok(());
    }
    let m = remaining[at];
    let (a, b) = (site.mor(m).src, site.mor(m).dst);
    let (na, nb) = (sizes[a], sizes[b]);
    // All functions X(b) → X(a), counted in base nb... base na digits.
    let mut table = vec![0usize; nb];
    if na == 0 && nb > 0 {
        return Ok(());
    }
    loop {
        tables[m] = Some(table.clone());
        if composition_consistent(site, tables, m) {
            search_tables(site, sizes, remaining, at + 1, tables, emit)?;
        }
        tables[m] = None;
        let mut i = nb;
        loop {
            if i == 0 {
                return Ok(());
            }
            i -= 1;
            if table[i] + 1 < na {
                table[i] += 1;
                for v in table.iter_mut().skip(i + 1) {
                    *v = 0;
                }
                break;
            }
        }
    }
}

/// Check every composition identity all three of whose tables are fixed and
/// which involves the just-assigned morphism.
fn composition_consistent(
    site: &FiniteCategory,
    tables: &[Option<Vec<usize>>],
    just: usize,
) -> bool {
    for g in 0..site.mor_count() {
        let Some(tg) = tables[g].as_ref() else { continue };
        for f in 0..site.mor_count() {
            let Some(gf) = site.compose(g, f) else { continue };
            if g != just && f != just && gf != just {
                continue;
            }
            let (Some(tf), Some(tgf)) = (tables[f].as_ref(), tables[gf].as_ref()) else {
                continue;
            };
            // X(g∘f) = X(f) ∘ X(g).
            for x in 0..tg.len() {
                if tf[tg[x]] != tgf[x] {
                    return false;
                }
            }
        }
    }
    true
}

/// Minimal action tuple over simultaneous per-object carrier permutations.
fn canonical_form(
    site: &FiniteCategory,
    sizes: &[usize],
    tables: &[Option<Vec<usize>>],
) -> Vec<Vec<usize>> {
    let perms_per_obj: Vec<Vec<Vec<usize>>> =
        sizes.iter().map(|&n| permutations(n)).collect();
    let mut best: Option<Vec<Vec<usize>>> = None;
    let mut choice = vec![0usize; sizes.len()];
    loop {
        let relabeled: Vec<Vec<usize>> = (0..site.mor_count())
            .map(|m| {
                let (a, b) = (site.mor(m).src, site.mor(m).dst);
                let pa = &perms_per_obj[a][choice[a]];
                let pb = &perms_per_obj[b][choice[b]];
                let t = tables[m].as_ref().unwrap();
                // Element j of the new carrier at b is old element pb^{-1}(j);
                // build via forward application instead: new[pb[x]] = pa[t[x]].
                let mut out = vec![0usize; t.len()];
                for (x, &tx) in t.iter().enumerate() {
                    out[pb[x]] = pa[tx];
                }
                out
            })
            .collect();
        if best.as_ref().map(|b| relabeled < *b).unwrap_or(true) {
            best = Some(relabeled);
        }
        let mut i = sizes.len();
        loop {
            if i == 0 {
                return best.unwrap();
            }
            i -= 1;
            if choice[i] + 1 < perms_per_obj[i].len() {
                choice[i] += 1;
                for c in choice.iter_mut().skip(i + 1) {
                    *c = 0;
                }
                break;
            }
        }
    }
}

fn permutations(n: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur: Vec<usize> = (0..n).collect();
    heap_permute(&mut cur, n, &mut out);
    out.sort();
    out
}

fn heap_permute(cur: &mut Vec<usize>, k: usize, out: &mut Vec<Vec<usize>>) {
    if k <= 1 {
        out.push(cur.clone());
        return;
    }
    for i in 0..k {
        heap_permute(cur, k - 1, out);
        if k % 2 == 0 {
            cur.swap(i, k - 1);
        } else {
            cur.swap(0, k - 1);
        }
    }
}

fn materialize(site: &Arc<FiniteCategory>, sizes: &[usize], form: &[Vec<usize>]) -> Presheaf {
    let carrier = sizes
        .iter()
        .map(|&n| (0..n).map(|i| ElemId(format!("e{i}"))).collect())
        .collect();
    Presheaf::new_unchecked(Arc::clone(site), carrier, form.to_vec())
}

/// All subpresheaves of `x`, ordered by per-object selection masks.
pub fn enumerate_subpresheaves(x: &Presheaf, guard: &SizeGuard) -> Result<Vec<Subpresheaf>> {
    let site = x.site();
    let mut space: usize = 1;
    for o in 0..site.object_count() {
        space = space.saturating_mul(
            1usize
                .checked_shl(x.size(o) as u32)
                .unwrap_or(usize::MAX),
        );
    }
    guard.check_elements(space, "subpresheaf enumeration")?;
    let n_obj = site.object_count();
    let mut masks = vec![0usize; n_obj];
    let mut out = Vec::new();
    loop {
        let sel: Vec<BTreeSet<usize>> = (0..n_obj)
            .map(|o| {
                (0..x.size(o))
                    .filter(|i| masks[o] & (1usize << i) != 0)
                    .collect()
            })
            .collect();
        if closed_selection(x, &sel) {
            out.push(Subpresheaf::new_unchecked(x.clone(), sel));
        }
        let mut i = n_obj;
        loop {
            if i == 0 {
                return Ok(out);
            }
            i -= 1;
            if masks[i] + 1 < (1usize << x.size(i)) {
                masks[i] += 1;
                for m in masks.iter_mut().skip(i + 1) {
                    *m = 0;
                }
                break;
            }
        }
    }
}

fn closed_selection(x: &Presheaf, sel: &[BTreeSet<usize>]) -> bool {
    let site = x.site();
    for m in 0..site.mor_count() {
        let (a, b) = (site.mor(m).src, site.mor(m).dst);
        for &i in &sel[b] {
            if !sel[a].contains(&x.act(m, i)) {
                return false;
            }
        }
    }
    true
}
