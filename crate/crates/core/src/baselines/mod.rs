//! Comparison baselines: the Shortest Path Heuristic and an exact
//! Dreyfus–Wagner solver for small terminal sets.

mod exact;
mod sph;

pub use exact::{exact_dreyfus_wagner, ExactError, MAX_EXACT_TERMINALS};
pub use sph::{sph, sph_from};
