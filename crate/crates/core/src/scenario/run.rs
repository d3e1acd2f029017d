use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::formula::Formula;
use crate::logic::BeliefState;
use crate::metric::{multi_revise_metric, pseudometric_revise};
use crate::partition::StatePartition;
use crate::revision::{multi_revise, trust_revise};
use crate::{FaithfulOrder, TrustMetric};

use super::{AgentDecl, Event, Mechanism, Scenario, Trace, TraceRecord, TrustSpec};

struct AgentState<'a> {
    decl: &'a AgentDecl,
    beliefs: BeliefState,
    /// `None` once an explicit table no longer applies and there is no fallback.
    order: Option<FaithfulOrder>,
}

struct Outcome {
    mechanism: Mechanism,
    threshold: Option<u32>,
    beliefs: BeliefState,
}

/// Replays the scenario's events in order. Event failures are recorded and
/// leave the target's beliefs unchanged.
pub fn run_scenario(sc: &Scenario) -> Trace {
    let mut agents: BTreeMap<&str, AgentState<'_>> = sc
        .agents
        .iter()
        .map(|decl| {
            (
                decl.name.as_str(),
                AgentState {
                    decl,
                    beliefs: decl.beliefs.clone(),
                    order: decl.order_for(&decl.beliefs),
                },
            )
        })
        .collect();

    let mut trace = Trace::default();
    for (k, ev) in sc.events.iter().enumerate() {
        let target = ev.event.target();
        let outcome = match agents.get(target) {
            None => Err((None, Error::UnknownAgent(target.to_string()))),
            Some(agent) => apply(sc, agent, &ev.event),
        };
        let record = match outcome {
            Ok(out) => {
                let agent = agents.get_mut(target).expect("looked up above");
                agent.order = agent.decl.order_for(&out.beliefs);
                agent.beliefs = out.beliefs;
                let states = agent.beliefs.states();
                TraceRecord {
                    event: k + 1,
                    target: target.to_string(),
                    mechanism: Some(out.mechanism),
                    threshold: out.threshold,
                    result_states: states.literals(),
                    result_dnf: Some(agent.beliefs.to_formula().render(&sc.signature)),
                    error: None,
                    input: ev.text.clone(),
                }
            }
            Err((mechanism, e)) => TraceRecord {
                event: k + 1,
                target: target.to_string(),
                mechanism,
                threshold: None,
                result_states: Vec::new(),
                result_dnf: None,
                error: Some(e.to_string()),
                input: ev.text.clone(),
            },
        };
        trace.records.push(record);
    }
    trace
}

type Failure = (Option<Mechanism>, Error);

fn apply(
    sc: &Scenario,
    agent: &AgentState<'_>,
    event: &Event,
) -> std::result::Result<Outcome, Failure> {
    let name = agent.decl.name.as_str();
    let order = || {
        agent
            .order
            .as_ref()
            .ok_or_else(|| (None, Error::StaleExplicitOrder(name.to_string())))
    };
    match event {
        Event::Reset { beliefs, .. } => Ok(Outcome {
            mechanism: Mechanism::Reset,
            threshold: None,
            beliefs: beliefs.clone(),
        }),
        Event::Report {
            source, formula, ..
        } => {
            let order = order()?;
            match sc.trust.get(name, source).map_err(|e| (None, e))? {
                TrustSpec::Partition(p) => trust_revise(order, p, formula)
                    .map(|beliefs| Outcome {
                        mechanism: Mechanism::Partition,
                        threshold: None,
                        beliefs,
                    })
                    .map_err(|e| (Some(Mechanism::Partition), e)),
                TrustSpec::Metric(d) => pseudometric_revise(order, d, formula, sc.mode)
                    .map(|beliefs| Outcome {
                        mechanism: Mechanism::Metric,
                        threshold: d.min_nontrivial_threshold(),
                        beliefs,
                    })
                    .map_err(|e| (Some(Mechanism::Metric), e)),
            }
        }
        Event::Batch { reports, .. } => {
            let order = order()?;
            let specs = reports
                .iter()
                .map(|r| sc.trust.get(name, &r.source).map(|t| (&r.formula, t)))
                .collect::<Result<Vec<_>>>()
                .map_err(|e| (None, e))?;
            let partitions: Vec<(&Formula, &StatePartition)> = specs
                .iter()
                .filter_map(|(f, t)| match t {
                    TrustSpec::Partition(p) => Some((*f, p)),
                    TrustSpec::Metric(_) => None,
                })
                .collect();
            let metrics: Vec<(&Formula, &TrustMetric)> = specs
                .iter()
                .filter_map(|(f, t)| match t {
                    TrustSpec::Metric(d) => Some((*f, d)),
                    TrustSpec::Partition(_) => None,
                })
                .collect();
            if metrics.is_empty() {
                multi_revise(order, partitions)
                    .map(|beliefs| Outcome {
                        mechanism: Mechanism::Partition,
                        threshold: None,
                        beliefs,
                    })
                    .map_err(|e| (Some(Mechanism::Partition), e))
            } else if partitions.is_empty() {
                multi_revise_metric(order, metrics, sc.mode)
                    .map(|(m, beliefs)| Outcome {
                        mechanism: Mechanism::Metric,
                        threshold: Some(m),
                        beliefs,
                    })
                    .map_err(|e| (Some(Mechanism::Metric), e))
            } else {
                Err((
                    None,
                    Error::MixedTrustKinds {
                        target: name.to_string(),
                    },
                ))
            }
        }
    }
}
