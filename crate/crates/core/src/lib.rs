//! Exact computations in finite presheaf toposes: finite categories,
//! presheaves with their limits and colimits, the local state classifier Ξ
//! with its singularity measurement σ, probes and the skeletons they cut
//! out, non-singular maps with their coreflections, and the reflexive-graph
//! view where all of it becomes pictures.
//!
//! Everything is computed by exhaustive search over explicit finite data;
//! size guards keep the search spaces honest. Results are deterministic:
//! identical inputs produce identical carriers, names, and orderings.

pub mod error;
pub mod fincat;
pub mod guard;
pub mod lsc;
pub mod nonsing;
pub mod presheaf;
pub mod rgraph;
pub mod sample;
pub mod shell;

pub use error::{Error, Result};
pub use guard::SizeGuard;
