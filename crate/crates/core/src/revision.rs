//! Faithful orderings and the revision operators built on them.

use crate::error::{Error, Result};
use crate::formula::Formula;
use crate::logic::{models, BeliefState, Signature, State, StateSet};
use crate::partition::StatePartition;
use crate::weight::Weight;

/// A total preorder over states, given as ranks, whose rank-0 states are
/// exactly the models of the current beliefs.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FaithfulOrder<W = u32> {
    beliefs: BeliefState,
    ranks: Vec<W>,
}

impl<W: Weight> FaithfulOrder<W> {
    /// Rank 0 on the belief models, 1 everywhere else.
    pub fn two_level(beliefs: &BeliefState) -> Self {
        let k = beliefs.states();
        let ranks = (0..k.signature().state_count())
            .map(|i| {
                if k.contains_index(i) {
                    W::zero()
                } else {
                    W::one()
                }
            })
            .collect();
        FaithfulOrder {
            beliefs: beliefs.clone(),
            ranks,
        }
    }

    /// Rank is the least Hamming distance to a belief model.
    pub fn dalal(beliefs: &BeliefState) -> Self {
        let k: Vec<usize> = beliefs.states().indices().collect();
        let ranks = (0..beliefs.signature().state_count())
            .map(|s| {
                let d = k
                    .iter()
                    .map(|&m| (s ^ m).count_ones() as usize)
                    .min()
                    .expect("beliefs are nonempty");
                W::from_count(d)
            })
            .collect();
        FaithfulOrder {
            beliefs: beliefs.clone(),
            ranks,
        }
    }

    /// Validates a user-supplied ranking. Ranks are shifted so the least is 0.
    pub fn explicit<I>(beliefs: &BeliefState, ranks: I) -> Result<Self>
    where
        I: IntoIterator<Item = (State, W)>,
    {
        let sig = beliefs.signature();
        let mut table: Vec<Option<W>> = vec![None; sig.state_count()];
        for (s, r) in ranks {
            sig.check_same(s.signature())?;
            table[s.index()] = Some(r);
        }
        let mut dense = Vec::with_capacity(table.len());
        for (i, r) in table.into_iter().enumerate() {
            dense.push(r.ok_or_else(|| Error::IncompleteRanking {
                missing: sig.state(i).to_string(),
            })?);
        }
        let min = dense.iter().copied().min().expect("at least two states");
        for r in &mut dense {
            *r = *r - min;
        }
        let k = beliefs.states();
        for (i, r) in dense.iter().enumerate() {
            let minimal = r.is_zero();
            if minimal != k.contains_index(i) {
                let reason = if minimal {
                    "state outside the beliefs is minimal"
                } else {
                    "belief model is not minimal"
                };
                return Err(Error::FaithfulnessViolation {
                    state: sig.state(i).to_string(),
                    rank: (*r + min).to_string(),
                    reason: reason.into(),
                });
            }
        }
        Ok(FaithfulOrder {
            beliefs: beliefs.clone(),
            ranks: dense,
        })
    }

    pub fn beliefs(&self) -> &BeliefState {
        &self.beliefs
    }

    pub fn signature(&self) -> &Signature {
        self.beliefs.signature()
    }

    pub fn rank(&self, s: &State) -> W {
        self.ranks[s.index()]
    }

    pub fn rank_of_index(&self, index: usize) -> W {
        self.ranks[index]
    }

    pub fn ranks(&self) -> &[W] {
        &self.ranks
    }

    /// The members of `set` with least rank. Empty only if `set` is.
    pub fn minimal(&self, set: &StateSet) -> StateSet {
        let Some(min) = set.indices().map(|i| self.ranks[i]).min() else {
            return StateSet::empty(set.signature());
        };
        StateSet::from_indices(
            set.signature(),
            set.indices().filter(|&i| self.ranks[i] == min),
        )
    }

    fn revise_set(&self, set: &StateSet) -> Result<BeliefState> {
        BeliefState::new(self.minimal(set))
    }
}

/// A formula labelled with the agent that reported it.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Report {
    pub source: String,
    pub formula: Formula,
}

impl Report {
    pub fn new(source: impl Into<String>, formula: Formula) -> Self {
        Report {
            source: source.into(),
            formula,
        }
    }
}

pub(crate) fn satisfiable_models(sig: &Signature, f: &Formula) -> Result<StateSet> {
    let m = models(sig, f);
    if m.is_empty() {
        Err(Error::UnsatisfiableInput(format!(
            "`{}` has no models",
            f.display(sig)
        )))
    } else {
        Ok(m)
    }
}

/// Plain AGM revision: the least-ranked models of `f`.
pub fn agm_revise<W: Weight>(order: &FaithfulOrder<W>, f: &Formula) -> Result<BeliefState> {
    let m = satisfiable_models(order.signature(), f)?;
    order.revise_set(&m)
}

/// Revision by a report from a source trusted according to `partition`:
/// minimize over the partition's expansion of `f` instead of its models.
pub fn trust_revise<W: Weight>(
    order: &FaithfulOrder<W>,
    partition: &StatePartition,
    f: &Formula,
) -> Result<BeliefState> {
    order.signature().check_same(partition.signature())?;
    let m = satisfiable_models(order.signature(), f)?;
    order.revise_set(&partition.expand_set(&m))
}

/// Revision by simultaneous reports, each widened by its source's
/// partition; minimizes over the intersection of the expansions.
///
/// An empty intersection is reported as [`Error::ConflictingReports`].
pub fn multi_revise<'a, W, I>(order: &FaithfulOrder<W>, reports: I) -> Result<BeliefState>
where
    W: Weight,
    I: IntoIterator<Item = (&'a Formula, &'a StatePartition)>,
{
    let sig = order.signature();
    let mut count = 0;
    let mut candidates = StateSet::full(sig);
    for (f, partition) in reports {
        sig.check_same(partition.signature())?;
        let m = satisfiable_models(sig, f)?;
        candidates.intersect_with(&partition.expand_set(&m));
        count += 1;
    }
    if count == 0 {
        return Err(Error::EmptyReports);
    }
    if candidates.is_empty() {
        return Err(Error::ConflictingReports { reports: count });
    }
    order.revise_set(&candidates)
}
