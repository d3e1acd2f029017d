//! Trust-sensitive belief revision over finite propositional signatures.
//!
//! An agent holds beliefs as a set of states together with a faithful
//! ordering over all states. Reports from other agents are first widened
//! according to how far the receiving agent trusts the source (a state
//! partition, or a pseudometric thresholded into partitions) and only then
//! used for ordinary minimal-change revision.
//!
//! Ranks and distances are generic over unsigned integer types through
//! [`Weight`]; the aliases at the crate root fix them to `u32`, which is
//! what the scenario runner and the command-line tool use.

pub mod error;
pub mod formula;
pub mod logic;
pub mod metric;
pub mod partition;
pub mod revision;
pub mod scenario;
pub mod weight;

pub use error::{Axiom, Error, Result};
pub use formula::{parse_formula, Formula};
pub use logic::{
    all_states, dnf_of_stateset, holds, models, prop_of_state, BeliefState, Signature, State,
    StateSet, DEFAULT_ATOM_CAP,
};
pub use metric::{ThresholdMode, DEFAULT_METRIC_ATOM_CAP};
pub use partition::{expand, is_refinement, trust_expansion, StatePartition};
pub use revision::{agm_revise, multi_revise, trust_revise, Report};
pub use weight::Weight;

/// Faithful ordering with `u32` ranks.
pub type FaithfulOrder = revision::FaithfulOrder<u32>;
/// Faithful ordering with `u64` ranks.
pub type WideFaithfulOrder = revision::FaithfulOrder<u64>;
/// Trust pseudometric with `u32` distances.
pub type TrustMetric = metric::TrustMetric<u32>;
/// Trust pseudometric with `u64` distances.
pub type WideTrustMetric = metric::TrustMetric<u64>;
/// Pseudometric trust space with `u32` distances.
pub type TrustSpace = metric::PseudometricTrustSpace<u32>;
