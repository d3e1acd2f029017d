//! Declarative scenarios: agents, who trusts whom and how, and a sequence
//! of report events replayed against evolving beliefs.
//!
//! ```text
//! signature sick diam
//! agent A belief: !sick & diam order: dalal
//! trust A D partition: {sick,diam} {sick} | {diam} {}
//! trust A S metric: specialist.metric
//! report D A: sick & !diam
//! batch A: D: sick ; J: !diam
//! reset A belief: !sick & diam
//! ```
//!
//! `mode strict|closure` selects how metrics are thresholded (default
//! strict). An explicit order is written `order: explicit:<path>` with an
//! optional `fallback: dalal|two_level` used once the beliefs move away
//! from the ones the table was written for.

mod load;
mod run;
mod trace;

use std::collections::BTreeMap;
use std::fmt;
use std::fs;
use std::path::Path;

pub use load::{
    load_scenario, load_scenario_file, load_scenario_with, parse_rank_table, LoadOptions,
};
pub use run::run_scenario;
pub use trace::{parse_structured_trace, render_trace, Mechanism, Trace, TraceFormat, TraceRecord};

use crate::error::{Error, Result};
use crate::formula::Formula;
use crate::logic::{BeliefState, Signature};
use crate::metric::ThresholdMode;
use crate::partition::StatePartition;
use crate::revision::Report;
use crate::{FaithfulOrder, TrustMetric};

/// Orders that can be rebuilt from any belief state.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BaseOrder {
    TwoLevel,
    Dalal,
}

impl BaseOrder {
    pub fn build(self, beliefs: &BeliefState) -> FaithfulOrder {
        match self {
            BaseOrder::TwoLevel => FaithfulOrder::two_level(beliefs),
            BaseOrder::Dalal => FaithfulOrder::dalal(beliefs),
        }
    }
}

impl std::str::FromStr for BaseOrder {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "two_level" => Ok(BaseOrder::TwoLevel),
            "dalal" => Ok(BaseOrder::Dalal),
            other => Err(Error::Directive(format!(
                "unknown order `{other}` (expected two_level, dalal or explicit:<path>)"
            ))),
        }
    }
}

impl fmt::Display for BaseOrder {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            BaseOrder::TwoLevel => "two_level",
            BaseOrder::Dalal => "dalal",
        })
    }
}

/// How an agent's faithful order is obtained.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum OrderKind {
    Base(BaseOrder),
    /// A ranking valid for the agent's initial beliefs only.
    Explicit {
        order: FaithfulOrder,
        fallback: Option<BaseOrder>,
    },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AgentDecl {
    pub name: String,
    pub beliefs: BeliefState,
    pub order: OrderKind,
}

impl AgentDecl {
    /// The order for `beliefs`, or `None` if the declared kind cannot
    /// produce one (explicit table, moved beliefs, no fallback).
    pub fn order_for(&self, beliefs: &BeliefState) -> Option<FaithfulOrder> {
        match &self.order {
            OrderKind::Base(kind) => Some(kind.build(beliefs)),
            OrderKind::Explicit { order, .. } if order.beliefs() == beliefs => Some(order.clone()),
            OrderKind::Explicit { fallback, .. } => fallback.map(|k| k.build(beliefs)),
        }
    }
}

/// What an observer knows about a source's reliability.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum TrustSpec {
    Partition(StatePartition),
    Metric(TrustMetric),
}

/// Trust entries keyed by `(observer, source)`.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct TrustStore {
    entries: BTreeMap<(String, String), TrustSpec>,
}

impl TrustStore {
    pub fn insert(&mut self, observer: &str, source: &str, spec: TrustSpec) -> Result<()> {
        let key = (observer.to_string(), source.to_string());
        if self.entries.contains_key(&key) {
            return Err(Error::DuplicateTrust {
                observer: key.0,
                reporter: key.1,
            });
        }
        self.entries.insert(key, spec);
        Ok(())
    }

    pub fn get(&self, observer: &str, source: &str) -> Result<&TrustSpec> {
        self.entries
            .get(&(observer.to_string(), source.to_string()))
            .ok_or_else(|| Error::UnknownTrust {
                observer: observer.to_string(),
                reporter: source.to_string(),
            })
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, &str, &TrustSpec)> {
        self.entries
            .iter()
            .map(|((o, s), spec)| (o.as_str(), s.as_str(), spec))
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Event {
    Report {
        source: String,
        target: String,
        formula: Formula,
    },
    Batch {
        target: String,
        reports: Vec<Report>,
    },
    Reset {
        target: String,
        beliefs: BeliefState,
    },
}

impl Event {
    pub fn target(&self) -> &str {
        match self {
            Event::Report { target, .. }
            | Event::Batch { target, .. }
            | Event::Reset { target, .. } => target,
        }
    }
}

/// An event together with its source line, echoed into the trace.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EventDecl {
    pub line: usize,
    pub text: String,
    pub event: Event,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Scenario {
    pub signature: Signature,
    pub mode: ThresholdMode,
    pub agents: Vec<AgentDecl>,
    pub trust: TrustStore,
    pub events: Vec<EventDecl>,
}

impl Scenario {
    pub fn agent(&self, name: &str) -> Option<&AgentDecl> {
        self.agents.iter().find(|a| a.name == name)
    }

    /// Every agent named by an `agent` or `trust` line, sorted.
    pub fn agent_names(&self) -> Vec<&str> {
        let mut names: Vec<&str> = self.agents.iter().map(|a| a.name.as_str()).collect();
        for (o, s, _) in self.trust.iter() {
            names.push(o);
            names.push(s);
        }
        names.sort_unstable();
        names.dedup();
        names
    }

    pub fn partition_count(&self) -> usize {
        self.trust
            .iter()
            .filter(|(_, _, t)| matches!(t, TrustSpec::Partition(_)))
            .count()
    }

    pub fn metric_count(&self) -> usize {
        self.trust.len() - self.partition_count()
    }
}

pub(crate) fn read_file(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|e| Error::Io {
        path: path.display().to_string(),
        message: e.to_string(),
    })
}
