//! Idempotents: refinement, equivalence, splitting, lifting and the
//! sum-ring witnesses for vanishing classes.

pub mod k0;
pub mod lift;
pub mod pm;
pub mod refine;
pub mod split;
pub mod sumring;

pub use k0::{k0_trivialize, K0Transcript};
pub use lift::{idempotent_lift, Lift};
pub use pm::{pm_polynomial, satisfies_pm_conditions};
pub use refine::{
    idempotent_equivalence, idempotent_refine, near_idempotent_equivalence, norm_valuation, EquivalenceWitness,
    Refinement,
};
pub use split::{column_projection, finite_rank_reduce, idempotent_split, ColumnProjection, RankReport, SplitResult};
pub use sumring::{sum_ring_generators, RelationFailure, SumRing};
