//! Finite limits and colimits of presheaves, computed pointwise.
//!
//! Everything here is exact: products and pullbacks are carved out of
//! explicit pair carriers, quotients close a seed relation under the action
//! with a union-find, and image factorizations split a map through its
//! pointwise image. Pair elements are named "(x,y)", coproduct elements
//! "0:x" / "1:y", and quotient classes by their least member.

use std::sync::Arc;

use crate::error::{Error, Result};
use crate::fincat::same_site;
use crate::guard::SizeGuard;
use crate::presheaf::{are_isomorphic, ElemId, NatTrans, Presheaf, Subpresheaf};

/// A two-legged cone: `left : apex → X`, `right : apex → Y`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Span {
    pub apex: Presheaf,
    pub left: NatTrans,
    pub right: NatTrans,
}

/// Binary product with projections. Elements are pairs "(x,y)".
pub fn product(x: &Presheaf, y: &Presheaf, guard: &SizeGuard) -> Result<Span> {
    if !same_site(x.site(), y.site()) {
        return Err(Error::SiteMismatch);
    }
    let site = Arc::clone(x.site());
    let total: usize = (0..site.object_count()).map(|o| x.size(o) * y.size(o)).sum();
    guard.check_elements(total, "product carrier")?;
    let mut carrier = Vec::with_capacity(site.object_count());
    for o in 0..site.object_count() {
        let mut elems = Vec::with_capacity(x.size(o) * y.size(o));
        for xi in 0..x.size(o) {
            for yi in 0..y.size(o) {
                elems.push(ElemId(format!("({},{})", x.elem(o, xi), y.elem(o, yi))));
            }
        }
        carrier.push(elems);
    }
    let pair = |o: usize, xi: usize, yi: usize| xi * y.size(o) + yi;
    let mut action = Vec::with_capacity(site.mor_count());
    for m in 0..site.mor_count() {
        let (a, b) = (site.mor(m).src, site.mor(m).dst);
        let mut table = Vec::with_capacity(x.size(b) * y.size(b));
        for xi in 0..x.size(b) {
            for yi in 0..y.size(b) {
                table.push(pair(a, x.act(m, xi), y.act(m, yi)));
            }
        }
        action.push(table);
    }
    let apex = Presheaf::new_unchecked(site.clone(), carrier, action);
    let mut p1 = Vec::with_capacity(site.object_count());
    let mut p2 = Vec::with_capacity(site.object_count());
    for o in 0..site.object_count() {
        let mut c1 = Vec::new();
        let mut c2 = Vec::new();
        for xi in 0..x.size(o) {
            for yi in 0..y.size(o) {
                c1.push(xi);
                c2.push(yi);
            }
        }
        p1.push(c1);
        p2.push(c2);
    }
    Ok(Span {
        left: NatTrans::new_unchecked(apex.clone(), x.clone(), p1),
        right: NatTrans::new_unchecked(apex.clone(), y.clone(), p2),
        apex,
    })
}

/// Equalizer of a parallel pair, as the evident subpresheaf with inclusion.
pub fn equalizer(f: &NatTrans, g: &NatTrans) -> Result<(Presheaf, NatTrans)> {
    if f.source() != g.source() || f.target() != g.target() {
        return Err(Error::IllTypedDiagram {
            detail: "equalizer needs a parallel pair".to_string(),
        });
    }
    let x = f.source();
    let site = x.site();
    let sel = (0..site.object_count())
        .map(|o| {
            (0..x.size(o))
                .filter(|&i| f.comp(o, i) == g.comp(o, i))
                .collect()
        })
        .collect();
    // Closed automatically: naturality makes agreement stable under the action.
    let sub = Subpresheaf::new_unchecked(x.clone(), sel);
    Ok(sub.to_presheaf())
}

/// Pullback of `f : X → Z` against `g : Y → Z`; legs land in X and Y.
pub fn pullback(f: &NatTrans, g: &NatTrans, guard: &SizeGuard) -> Result<Span> {
    if f.target() != g.target() {
        return Err(Error::IllTypedDiagram {
            detail: "pullback needs a shared target".to_string(),
        });
    }
    let prod = product(f.source(), g.source(), guard)?;
    let (eq, incl) = equalizer(&f.compose(&prod.left)?, &g.compose(&prod.right)?)?;
    Ok(Span {
        left: prod.left.compose(&incl)?,
        right: prod.right.compose(&incl)?,
        apex: eq,
    })
}

/// Kernel pair of `f`: the pullback of `f` against itself.
pub fn kernel_pair(f: &NatTrans, guard: &SizeGuard) -> Result<Span> {
    pullback(f, f, guard)
}

/// Binary coproduct with injections. Elements are tagged "0:x" / "1:y".
pub fn coproduct(x: &Presheaf, y: &Presheaf) -> Result<(Presheaf, NatTrans, NatTrans)> {
    if !same_site(x.site(), y.site()) {
        return Err(Error::SiteMismatch);
    }
    let site = Arc::clone(x.site());
    let mut carrier = Vec::with_capacity(site.object_count());
    for o in 0..site.object_count() {
        let mut elems: Vec<ElemId> = x
            .carrier(o)
            .iter()
            .map(|e| ElemId(format!("0:{e}")))
            .collect();
        elems.extend(y.carrier(o).iter().map(|e| ElemId(format!("1:{e}"))));
        carrier.push(elems);
    }
    let mut action = Vec::with_capacity(site.mor_count());
    for m in 0..site.mor_count() {
        let (a, b) = (site.mor(m).src, site.mor(m).dst);
        let mut table: Vec<usize> = (0..x.size(b)).map(|i| x.act(m, i)).collect();
        table.extend((0..y.size(b)).map(|i| y.act(m, i) + x.size(a)));
        action.push(table);
    }
    let apex = Presheaf::new_unchecked(site.clone(), carrier, action);
    let i1 = (0..site.object_count())
        .map(|o| (0..x.size(o)).collect())
        .collect();
    let i2 = (0..site.object_count())
        .map(|o| (0..y.size(o)).map(|i| i + x.size(o)).collect())
        .collect();
    Ok((
        apex.clone(),
        NatTrans::new_unchecked(x.clone(), apex.clone(), i1),
        NatTrans::new_unchecked(y.clone(), apex, i2),
    ))
}

pub(crate) struct Dsu {
    parent: Vec<usize>,
}

impl Dsu {
    pub(crate) fn new(n: usize) -> Dsu {
        Dsu {
            parent: (0..n).collect(),
        }
    }

    pub(crate) fn find(&mut self, i: usize) -> usize {
        if self.parent[i] != i {
            let r = self.find(self.parent[i]);
            self.parent[i] = r;
        }
        self.parent[i]
    }

    pub(crate) fn union(&mut self, i: usize, j: usize) -> bool {
        let (ri, rj) = (self.find(i), self.find(j));
        if ri == rj {
            return false;
        }
        // Keep the smaller index as representative so classes are named by
        // their least member.
        let (lo, hi) = (ri.min(rj), ri.max(rj));
        self.parent[hi] = lo;
        true
    }
}

/// Quotient of `x` by the smallest action-compatible equivalence containing
/// the seed pairs `(object, i, j)`. Classes are represented and named by
/// their least member.
pub fn quotient_by_relation(
    x: &Presheaf,
    pairs: &[(usize, usize, usize)],
) -> Result<(Presheaf, NatTrans)> {
    let site = Arc::clone(x.site());
    let mut dsu: Vec<Dsu> = (0..site.object_count()).map(|o| Dsu::new(x.size(o))).collect();
    for &(o, i, j) in pairs {
        if o >= site.object_count() || i >= x.size(o) || j >= x.size(o) {
            return Err(Error::MalformedPresheaf {
                detail: "quotient seed pair out of range".to_string(),
            });
        }
        dsu[o].union(i, j);
    }
    // Close under the action: identified elements must stay identified after
    // restriction along every morphism.
    loop {
        let mut changed = false;
        for m in 0..site.mor_count() {
            let (a, b) = (site.mor(m).src, site.mor(m).dst);
            for i in 0..x.size(b) {
                for j in (i + 1)..x.size(b) {
                    if dsu[b].find(i) == dsu[b].find(j)
                        && dsu[a].union(x.act(m, i), x.act(m, j))
                    {
                        changed = true;
                    }
                }
            }
        }
        if !changed {
            break;
        }
    }
    let mut reps: Vec<Vec<usize>> = Vec::with_capacity(site.object_count());
    let mut class_of: Vec<Vec<usize>> = Vec::with_capacity(site.object_count());
    for o in 0..site.object_count() {
        let mut rep_list = Vec::new();
        let mut cls = vec![usize::MAX; x.size(o)];
        for i in 0..x.size(o) {
            if dsu[o].find(i) == i {
                cls[i] = rep_list.len();
                rep_list.push(i);
            }
        }
        for i in 0..x.size(o) {
            let r = dsu[o].find(i);
            cls[i] = cls[r];
        }
        reps.push(rep_list);
        class_of.push(cls);
    }
    let carrier = (0..site.object_count())
        .map(|o| reps[o].iter().map(|&r| x.elem(o, r).clone()).collect())
        .collect();
    let action = (0..site.mor_count())
        .map(|m| {
            let (a, b) = (site.mor(m).src, site.mor(m).dst);
            reps[b]
                .iter()
                .map(|&r| class_of[a][x.act(m, r)])
                .collect()
        })
        .collect();
    let quot = Presheaf::new_unchecked(site.clone(), carrier, action);
    let comps = (0..site.object_count())
        .map(|o| class_of[o].clone())
        .collect();
    let proj = NatTrans::new_unchecked(x.clone(), quot.clone(), comps);
    Ok((quot, proj))
}

/// Coequalizer of a parallel pair: quotient of the shared target by f(x) ~ g(x).
pub fn coequalizer(f: &NatTrans, g: &NatTrans) -> Result<(Presheaf, NatTrans)> {
    if f.source() != g.source() || f.target() != g.target() {
        return Err(Error::IllTypedDiagram {
            detail: "coequalizer needs a parallel pair".to_string(),
        });
    }
    let site = f.source().site();
    let mut pairs = Vec::new();
    for o in 0..site.object_count() {
        for i in 0..f.source().size(o) {
            pairs.push((o, f.comp(o, i), g.comp(o, i)));
        }
    }
    quotient_by_relation(f.target(), &pairs)
}

/// Factor `f` as an epi onto its pointwise image followed by a mono.
pub fn image_factorization(f: &NatTrans) -> (Presheaf, NatTrans, NatTrans) {
    let image = Subpresheaf::image_of(f);
    let (img, mono) = image.to_presheaf();
    let site = f.source().site();
    let comps = (0..site.object_count())
        .map(|o| {
            (0..f.source().size(o))
                .map(|x| {
                    let y = f.comp(o, x);
                    img.elem_index(o, f.target().elem(o, y)).unwrap()
                })
                .collect()
        })
        .collect();
    let epi = NatTrans::new_unchecked(f.source().clone(), img.clone(), comps);
    (img, epi, mono)
}

/// Whether the commuting square
///
/// ```text
///        top
///     W -----> X
///     |        |
/// left|        | right
///     v        v
///     Y -----> Z
///       bottom
/// ```
///
/// is a pullback: the mediator into the canonical pullback of (right, bottom)
/// must be an isomorphism. A non-commuting square is an ill-typed diagram.
pub fn is_pullback_square(
    top: &NatTrans,
    left: &NatTrans,
    right: &NatTrans,
    bottom: &NatTrans,
    guard: &SizeGuard,
) -> Result<bool> {
    if top.source() != left.source()
        || top.target() != right.source()
        || left.target() != bottom.source()
        || right.target() != bottom.target()
    {
        return Err(Error::IllTypedDiagram {
            detail: "square corners do not line up".to_string(),
        });
    }
    if right.compose(top)? != bottom.compose(left)? {
        return Err(Error::IllTypedDiagram {
            detail: "square does not commute".to_string(),
        });
    }
    let canonical = pullback(right, bottom, guard)?;
    let mediator = mediate_into(&canonical, top, left)?;
    Ok(are_isomorphic(mediator.source(), mediator.target()).is_some()
        && is_bijective(&mediator))
}

fn is_bijective(f: &NatTrans) -> bool {
    let site = f.source().site();
    (0..site.object_count()).all(|o| {
        if f.source().size(o) != f.target().size(o) {
            return false;
        }
        let mut hit = vec![false; f.target().size(o)];
        for x in 0..f.source().size(o) {
            hit[f.comp(o, x)] = true;
        }
        hit.into_iter().all(|h| h)
    })
}

/// The unique map into a canonical pullback span induced by a commuting cone
/// (`to_x`, `to_y`) over the same cospan.
pub fn mediate_into(span: &Span, to_x: &NatTrans, to_y: &NatTrans) -> Result<NatTrans> {
    if to_x.source() != to_y.source()
        || to_x.target() != span.left.target()
        || to_y.target() != span.right.target()
    {
        return Err(Error::IllTypedDiagram {
            detail: "cone legs do not match the span".to_string(),
        });
    }
    let w = to_x.source();
    let site = w.site();
    let mut comps = Vec::with_capacity(site.object_count());
    for o in 0..site.object_count() {
        let mut row = Vec::with_capacity(w.size(o));
        for wi in 0..w.size(o) {
            let hits: Vec<usize> = (0..span.apex.size(o))
                .filter(|&p| {
                    span.left.comp(o, p) == to_x.comp(o, wi)
                        && span.right.comp(o, p) == to_y.comp(o, wi)
                })
                .collect();
            match hits.as_slice() {
                [p] => row.push(*p),
                _ => {
                    return Err(Error::Internal {
                        detail: format!(
                            "mediator is not unique: {} candidates for {} at {}",
                            hits.len(),
                            w.elem(o, wi),
                            site.objects()[o]
                        ),
                    })
                }
            }
        }
        comps.push(row);
    }
    NatTrans::new(w.clone(), span.apex.clone(), comps)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fincat::catalog;
    use crate::presheaf::{hom_set, morphism_class, representable, terminal};

    fn arrow() -> (Arc<crate::fincat::FiniteCategory>, Presheaf) {
        let site = catalog("delta1").unwrap();
        let a = representable(&site, &"[1]".into()).unwrap();
        (site, a)
    }

    #[test]
    fn product_with_terminal_is_identity_shaped() {
        let (site, a) = arrow();
        let t = terminal(&site);
        let span = product(&a, &t, &SizeGuard::default()).unwrap();
        assert!(are_isomorphic(&span.apex, &a).is_some());
        // The left projection is the iso.
        let class = morphism_class(&span.left, &SizeGuard::default()).unwrap();
        assert!(class.iso);
    }

    #[test]
    fn product_universal_property_by_exhaustion() {
        let (site, a) = arrow();
        let guard = SizeGuard::default();
        let span = product(&a, &a, &guard).unwrap();
        // Cones from the terminal presheaf: pairs of points, counted exactly.
        let t = terminal(&site);
        let cones_x = hom_set(&t, &a, &guard).unwrap();
        let into_product = hom_set(&t, &span.apex, &guard).unwrap();
        assert_eq!(into_product.len(), cones_x.len() * cones_x.len());
        // Each map into the product is determined by its two projections.
        let mut seen = std::collections::BTreeSet::new();
        for h in &into_product {
            let l = span.left.compose(h).unwrap();
            let r = span.right.compose(h).unwrap();
            let li = cones_x.iter().position(|c| *c == l).unwrap();
            let ri = cones_x.iter().position(|c| *c == r).unwrap();
            assert!(seen.insert((li, ri)));
        }
    }

    #[test]
    fn equalizer_of_identical_pair_is_everything() {
        let (_, a) = arrow();
        let id = NatTrans::identity(&a);
        let (eq, incl) = equalizer(&id, &id).unwrap();
        assert_eq!(eq.total_size(), a.total_size());
        assert!(morphism_class(&incl, &SizeGuard::default()).unwrap().iso);
    }

    #[test]
    fn kernel_pair_of_collapse_counts_pairs() {
        // Collapsing the generic arrow to the terminal object has kernel pair
        // A × A at every object.
        let (site, a) = arrow();
        let t = terminal(&site);
        let comps = (0..site.object_count()).map(|o| vec![0; a.size(o)]).collect();
        let bang = NatTrans::new(a.clone(), t, comps).unwrap();
        let kp = kernel_pair(&bang, &SizeGuard::default()).unwrap();
        for o in 0..site.object_count() {
            assert_eq!(kp.apex.size(o), a.size(o) * a.size(o));
        }
    }

    #[test]
    fn coproduct_injections_are_split_monos() {
        let (site, a) = arrow();
        let t = terminal(&site);
        let (apex, i1, i2) = coproduct(&a, &t).unwrap();
        let o1 = site.object_index(&"[1]".into()).unwrap();
        assert_eq!(apex.size(o1), a.size(o1) + 1);
        let guard = SizeGuard::default();
        assert!(morphism_class(&i1, &guard).unwrap().split_mono);
        assert!(morphism_class(&i2, &guard).unwrap().split_mono);
        assert_eq!(apex.elem(o1, 0).as_str(), "0:c0");
        assert_eq!(apex.elem(o1, 3).as_str(), "1:*");
    }

    #[test]
    fn quotient_closes_under_action() {
        // Identifying the two points of the generic arrow forces nothing else,
        // but identifying id1 with a degenerate edge collapses the points too.
        let (site, a) = arrow();
        let o0 = site.object_index(&"[0]".into()).unwrap();
        let o1 = site.object_index(&"[1]".into()).unwrap();
        let id1 = a.elem_index(o1, &"id1".into()).unwrap();
        let c0 = a.elem_index(o1, &"c0".into()).unwrap();
        let (q, proj) = quotient_by_relation(&a, &[(o1, id1, c0)]).unwrap();
        // id1·d1 = d1 and c0·d1 = d0 get identified, then c1 ~ id1 follows.
        assert_eq!(q.size(o0), 1);
        assert_eq!(q.size(o1), 1);
        let class = morphism_class(&proj, &SizeGuard::default()).unwrap();
        assert!(class.epi);
    }

    #[test]
    fn quotient_reps_are_least_members() {
        let (site, a) = arrow();
        let o1 = site.object_index(&"[1]".into()).unwrap();
        let c0 = a.elem_index(o1, &"c0".into()).unwrap();
        let c1 = a.elem_index(o1, &"c1".into()).unwrap();
        let (q, _) = quotient_by_relation(&a, &[(o1, c0, c1)]).unwrap();
        // Collapsing the two degenerate edges identifies the two points.
        let names: Vec<&str> = q.carrier(o1).iter().map(|e| e.as_str()).collect();
        assert_eq!(names, vec!["c0", "id1"]);
        let o0 = site.object_index(&"[0]".into()).unwrap();
        assert_eq!(q.size(o0), 1);
        assert_eq!(q.elem(o0, 0).as_str(), "d0");
    }

    #[test]
    fn coequalizer_of_two_points_is_loop_maker() {
        // Coequalizing the two points of the generic arrow gives one node and
        // the edge becomes a loop; nothing else is identified.
        let (site, a) = arrow();
        let t = terminal(&site);
        let pts = hom_set(&t, &a, &SizeGuard::default()).unwrap();
        assert_eq!(pts.len(), 2);
        let (q, proj) = coequalizer(&pts[0], &pts[1]).unwrap();
        let o0 = site.object_index(&"[0]".into()).unwrap();
        let o1 = site.object_index(&"[1]".into()).unwrap();
        assert_eq!(q.size(o0), 1);
        assert_eq!(q.size(o1), 2);
        assert!(morphism_class(&proj, &SizeGuard::default()).unwrap().epi);
    }

    #[test]
    fn image_factorization_splits_epi_mono() {
        let (site, a) = arrow();
        let t = terminal(&site);
        let pts = hom_set(&t, &a, &SizeGuard::default()).unwrap();
        let (img, e, m) = image_factorization(&pts[0]);
        assert_eq!(img.total_size(), site.object_count());
        let guard = SizeGuard::default();
        assert!(morphism_class(&e, &guard).unwrap().epi);
        assert!(morphism_class(&m, &guard).unwrap().mono);
        assert_eq!(m.compose(&e).unwrap(), pts[0]);
    }

    #[test]
    fn pullback_square_detection() {
        let (site, a) = arrow();
        let t = terminal(&site);
        let guard = SizeGuard::default();
        let comps = (0..site.object_count()).map(|o| vec![0; a.size(o)]).collect();
        let bang = NatTrans::new(a.clone(), t.clone(), comps).unwrap();
        let kp = kernel_pair(&bang, &guard).unwrap();
        let glued_top = bang.compose(&kp.left).unwrap();
        let glued_bottom = bang.compose(&kp.right).unwrap();
        assert_eq!(glued_top, glued_bottom);
        // The kernel-pair square itself is a pullback.
        assert!(is_pullback_square(&kp.left, &kp.right, &bang, &bang, &guard).unwrap());
        // The degenerate square with both legs the diagonal is not.
        let diag = mediate_into(&kp, &NatTrans::identity(&a), &NatTrans::identity(&a)).unwrap();
        let back = kp.left.compose(&diag).unwrap();
        assert_eq!(back, NatTrans::identity(&a));
        assert!(!is_pullback_square(
            &NatTrans::identity(&a),
            &NatTrans::identity(&a),
            &bang,
            &bang,
            &guard
        )
        .unwrap());
    }

}
