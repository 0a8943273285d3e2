//! Crate-wide error type.
//!
//! Every failure carries the identifiers needed to locate the offending datum;
//! `Internal` is reserved for violated mathematical invariants (facts the code
//! relies on, not user input problems) and maps to a distinct process exit code
//! in the CLI.

use thiserror::Error;

use crate::fincat::{MorId, ObjId};
use crate::presheaf::ElemId;

#[derive(Debug, Clone, Error, PartialEq, Eq)]
pub enum Error {
    #[error("object {object} has no identity morphism")]
    MissingIdentity { object: ObjId },

    #[error("composition is not associative at h={h}, g={g}, f={f}")]
    NonAssociative { f: MorId, g: MorId, h: MorId },

    #[error("ill-typed composite g={g}, f={f}: {detail}")]
    IllTypedComposite { g: MorId, f: MorId, detail: String },

    #[error("identity law fails: {id} composed with {f}")]
    IdentityLawViolation { id: MorId, f: MorId },

    #[error("composable pair g={g}, f={f} has no entry in the composition table")]
    MissingComposite { g: MorId, f: MorId },

    #[error("unknown morphism {id}")]
    UnknownMorphism { id: MorId },

    #[error("unknown object {id}")]
    UnknownObject { id: ObjId },

    #[error("duplicate identifier {id}")]
    DuplicateId { id: String },

    #[error("unknown catalog name {name:?}")]
    UnknownCatalogName { name: String },

    #[error("functoriality fails at element {element} of {object}: acting by {f} then {g} disagrees with the composite")]
    FunctorialityViolation {
        object: ObjId,
        element: ElemId,
        f: MorId,
        g: MorId,
    },

    #[error("malformed presheaf: {detail}")]
    MalformedPresheaf { detail: String },

    #[error("naturality fails at element {element} of {object} along {morphism}")]
    NaturalityViolation {
        object: ObjId,
        element: ElemId,
        morphism: MorId,
    },

    #[error("unknown element {element} at object {object}")]
    UnknownElement { object: ObjId, element: ElemId },

    #[error("ill-typed diagram: {detail}")]
    IllTypedDiagram { detail: String },

    #[error("size guard exceeded: {detail}")]
    SizeGuardExceeded { detail: String },

    #[error("invalid congruence: {detail}")]
    InvalidCongruence { detail: String },

    #[error("selection is not closed under restriction: {congruence} along {morphism}")]
    NotClosedUnderRestriction { congruence: String, morphism: MorId },

    #[error("inputs live over different sites")]
    SiteMismatch,

    #[error("coherent-family oracle is inconsistent: {detail}")]
    OracleInconsistent { detail: String },

    #[error("probe is not saturated{}", witness.as_ref().map(|(o, e)| format!(" (witness: element {e} of {o} maps outside the skeleton)")).unwrap_or_default())]
    NotSaturated { witness: Option<(ObjId, ElemId)> },

    #[error("square is not a pullback: {detail}")]
    NotAPullback { detail: String },

    #[error("subgraph is not lightly dense: {witness}")]
    NotLightlyDense { witness: String },

    #[error("presheaf is not over the reflexive-graph site")]
    NotOverDelta1,

    #[error("malformed graph: {detail}")]
    MalformedGraph { detail: String },

    #[error("unsupported output for this input: {detail}")]
    UnsupportedFormat { detail: String },

    #[error("internal invariant violated: {detail}")]
    Internal { detail: String },
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub fn internal(detail: impl Into<String>) -> Self {
        Error::Internal {
            detail: detail.into(),
        }
    }
}
