//! Non-singular maps and the coreflection onto them.
//!
//! A map f: X -> Y is non-singular when it preserves the kernel of every
//! figure, i.e. the singularity measurements satisfy sigma_X = sigma_Y . f.
//! Kernels can only grow along a map, so [`is_nonsingular`] reports the
//! elements where growth is strict. For a fixed target the non-singular maps
//! into it form a coreflective subcategory of the slice; [`coreflect`] cuts an
//! arbitrary map down to its largest non-singular restriction. The remaining
//! operations supply the calculus around this notion: hom-sets of
//! non-singular maps, cartesianness of shells along a map, and the descent
//! test that non-singularity of a pulled-back map would impose on its base.

use std::fmt;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::fincat::ObjId;
use crate::guard::SizeGuard;
use crate::lsc::{kernel_of_figure, Congruence, Probe};
use crate::presheaf::{
    hom_set, is_pullback_square, morphism_class, ElemId, NatTrans, Presheaf, Subpresheaf,
};
use crate::shell::skeleton_selection;

/// How many defect witnesses a report retains before truncating.
const WITNESS_CAP: usize = 16;

/// One element whose kernel the map fails to preserve.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DefectWitness {
    pub object: ObjId,
    pub element: ElemId,
    pub kernel_of_element: Congruence,
    pub kernel_of_image: Congruence,
}

impl fmt::Display for DefectWitness {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "element {} of {}: kernel {} grows to {}",
            self.element, self.object, self.kernel_of_element, self.kernel_of_image
        )
    }
}

/// The outcome of testing a map for non-singularity.
///
/// Empty witnesses iff the map is non-singular; at most [`WITNESS_CAP`]
/// witnesses are kept, with `truncated` recording whether more exist.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SingularityDefect {
    witnesses: Vec<DefectWitness>,
    truncated: bool,
}

impl SingularityDefect {
    pub fn is_empty(&self) -> bool {
        self.witnesses.is_empty()
    }

    pub fn witnesses(&self) -> &[DefectWitness] {
        &self.witnesses
    }

    pub fn truncated(&self) -> bool {
        self.truncated
    }
}

impl fmt::Display for SingularityDefect {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.witnesses.is_empty() {
            return write!(f, "non-singular");
        }
        writeln!(f, "singular ({} witness(es)):", self.witnesses.len())?;
        for w in &self.witnesses {
            writeln!(f, "  {w}")?;
        }
        if self.truncated {
            writeln!(f, "  ... further witnesses omitted")?;
        }
        Ok(())
    }
}

/// Compares the kernel of every figure with the kernel of its image.
///
/// The kernel of x always refines the kernel of f(x); a violation of that lax
/// inequality is an internal error, never a defect.
pub fn is_nonsingular(f: &NatTrans) -> Result<SingularityDefect> {
    let x = f.source();
    let y = f.target();
    let site = x.site();
    let mut witnesses = Vec::new();
    let mut truncated = false;
    for c in 0..site.object_count() {
        for e in 0..x.size(c) {
            let kx = kernel_of_figure(x, c, e);
            let kfx = kernel_of_figure(y, c, f.comp(c, e));
            if kx == kfx {
                continue;
            }
            if !kx.leq(&kfx) {
                return Err(Error::internal(format!(
                    "kernel of {} at {} does not refine the kernel of its image",
                    x.elem(c, e),
                    site.objects()[c]
                )));
            }
            if witnesses.len() == WITNESS_CAP {
                truncated = true;
                break;
            }
            witnesses.push(DefectWitness {
                object: site.objects()[c].clone(),
                element: x.elem(c, e).clone(),
                kernel_of_element: kx,
                kernel_of_image: kfx,
            });
        }
    }
    Ok(SingularityDefect {
        witnesses,
        truncated,
    })
}

/// The largest non-singular restriction of a map.
#[derive(Debug, Clone)]
pub struct Coreflection {
    /// The elements of the source whose kernels the map preserves.
    pub sub: Subpresheaf,
    /// The (regular mono) counit into the original source.
    pub inclusion: NatTrans,
    /// The restricted map; always non-singular.
    pub restricted: NatTrans,
}

/// Restricts f: X -> Y to the subpresheaf where sigma_X and sigma_Y . f
/// agree, i.e. the equalizer of the two measurements.
///
/// The restriction is couniversal: any g: W -> X with f . g non-singular
/// factors uniquely through the inclusion.
pub fn coreflect(f: &NatTrans) -> Result<Coreflection> {
    let x = f.source();
    let y = f.target();
    let site = x.site();
    let mut sel = Vec::with_capacity(site.object_count());
    for c in 0..site.object_count() {
        sel.push(
            (0..x.size(c))
                .filter(|&e| kernel_of_figure(x, c, e) == kernel_of_figure(y, c, f.comp(c, e)))
                .collect(),
        );
    }
    // Naturality of the measurements makes the selection closed; a closure
    // failure here is a bug, not bad input.
    let sub = Subpresheaf::new(x.clone(), sel)
        .map_err(|e| Error::internal(format!("kernel equalizer is not closed: {e}")))?;
    let (x_prime, inclusion) = sub.to_presheaf();
    let restricted = f.compose(&inclusion)?;
    let defect = is_nonsingular(&restricted)?;
    if !defect.is_empty() {
        return Err(Error::internal(
            "coreflected map is still singular".to_string(),
        ));
    }
    debug_assert_eq!(x_prime, *restricted.source());
    Ok(Coreflection {
        sub,
        inclusion,
        restricted,
    })
}

/// Every non-singular map X -> Y, by exhaustive enumeration and filtering.
pub fn petit_hom(x: &Presheaf, y: &Presheaf, guard: &SizeGuard) -> Result<Vec<NatTrans>> {
    let mut out = Vec::new();
    for f in hom_set(x, y, guard)? {
        if is_nonsingular(&f)?.is_empty() {
            out.push(f);
        }
    }
    Ok(out)
}

/// Whether the shell of a saturated probe is cartesian at a map.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CartesianReport {
    pub cartesian: bool,
    /// An element of the source outside its skeleton whose image is
    /// skeletal, when the square fails to be a pullback.
    pub witness: Option<(ObjId, ElemId)>,
}

/// Tests whether the naturality square of the P-skeleton at f is a pullback.
///
/// For saturated P the skeleton of the source always sits inside the
/// preimage of the target's skeleton; the square is a pullback exactly when
/// the two coincide.
pub fn is_cartesian_wrt(p: &Probe, f: &NatTrans) -> Result<CartesianReport> {
    if !p.is_saturated() {
        return Err(Error::NotSaturated { witness: None });
    }
    let sk_x = skeleton_selection(p, f.source())?;
    let sk_y = skeleton_selection(p, f.target())?;
    let pre = Subpresheaf::preimage(f, &sk_y)?;
    if !sk_x.is_contained_in(&pre) {
        return Err(Error::internal(
            "skeleton escapes the preimage of the target skeleton".to_string(),
        ));
    }
    let site = f.source().site();
    for c in 0..site.object_count() {
        if let Some(&e) = pre.selection(c).difference(sk_x.selection(c)).next() {
            return Ok(CartesianReport {
                cartesian: false,
                witness: Some((site.objects()[c].clone(), f.source().elem(c, e).clone())),
            });
        }
    }
    Ok(CartesianReport {
        cartesian: true,
        witness: None,
    })
}

/// A commuting square
///
/// ```text
///         pulled_back
///       W ----------> V
///       |             |
///  over |             | along
///       v             v
///       X ---base---> Y
/// ```
///
/// presented to the descent check; `along` is the (epi)morphism pulled back
/// along, `base` the map whose non-singularity is in question.
#[derive(Debug, Clone)]
pub struct PullbackSquare {
    pub pulled_back: NatTrans,
    pub over: NatTrans,
    pub along: NatTrans,
    pub base: NatTrans,
}

/// What the descent test observed on one pullback square.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct DescentReport {
    pub along_is_epi: bool,
    pub pulled_back_nonsingular: bool,
    pub base_nonsingular: bool,
    /// False exactly when the pulled-back map is non-singular but the base
    /// map is not.
    pub descent_holds: bool,
    /// Rendered defect witnesses of the base map, empty when non-singular.
    pub base_defect: Vec<String>,
}

/// Tests whether non-singularity descends along the given square.
///
/// Descent would demand that a non-singular pulled-back map forces the base
/// map to be non-singular; the report records whether that holds here.
pub fn calibration_descent_check(
    square: &PullbackSquare,
    guard: &SizeGuard,
) -> Result<DescentReport> {
    if !is_pullback_square(
        &square.pulled_back,
        &square.over,
        &square.along,
        &square.base,
        guard,
    )? {
        return Err(Error::NotAPullback {
            detail: "descent check requires a pullback square".to_string(),
        });
    }
    let along_is_epi = morphism_class(&square.along, guard)?.epi;
    let pulled = is_nonsingular(&square.pulled_back)?;
    let base = is_nonsingular(&square.base)?;
    Ok(DescentReport {
        along_is_epi,
        pulled_back_nonsingular: pulled.is_empty(),
        base_nonsingular: base.is_empty(),
        descent_holds: !pulled.is_empty() || base.is_empty(),
        base_defect: base.witnesses().iter().map(|w| w.to_string()).collect(),
    })
}
