//! Wrapper subset search.
//!
//! [`beam_search`] keeps the `k` best subsets of each size while growing
//! them one feature at a time; [`forward_selection`] is the width-1 case.
//! [`exhaustive_search`] enumerates every subset of the target size and
//! serves as the reference for small problems.
//!
//! Candidates are ranked by (score ascending, subset lexicographic
//! ascending). Children reached from several parents are deduplicated before
//! they are scored. A candidate whose evaluation fails is dropped and
//! recorded in the trace; a step where every candidate fails aborts.

mod beam;
mod evaluator;
mod exhaustive;
mod trace;

pub use beam::{beam_search, beam_search_with, forward_selection, forward_selection_with, SearchOutcome};
pub use evaluator::{Evaluator, PreparedEvaluator, Scoring, SubsetScorer};
pub use exhaustive::{exhaustive_search, exhaustive_search_with, DEFAULT_EXHAUSTIVE_BUDGET};
pub use trace::{BeamState, SearchTrace, StepRecord};
