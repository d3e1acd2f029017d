//! Graded trust as integer pseudometrics over states.
//!
//! A larger distance between two states means more trust in the source's
//! ability to tell them apart. Thresholding a metric at `i` groups states
//! closer than or equal to `i`; the groups coarsen as `i` grows, and
//! conflicting reports are reconciled at the least threshold where their
//! widened readings intersect.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use log::warn;
use petgraph::unionfind::UnionFind;

use crate::error::{Axiom, Error, Result};
use crate::formula::Formula;
use crate::logic::{BeliefState, Signature, State, StateSet, DEFAULT_ATOM_CAP};
use crate::partition::StatePartition;
use crate::revision::{satisfiable_models, FaithfulOrder};
use crate::weight::Weight;

/// Default atom cap for metrics; validation is cubic in the state count.
pub const DEFAULT_METRIC_ATOM_CAP: usize = 8;

/// How a threshold turns a metric into a partition.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Hash)]
pub enum ThresholdMode {
    /// Cells are the balls `{t : d(s,t) <= i}`; fails unless the balls
    /// coincide, i.e. the relation `d <= i` is transitive.
    #[default]
    Strict,
    /// Cells are connected components of the graph with edges `d <= i`.
    Closure,
}

impl FromStr for ThresholdMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "strict" => Ok(ThresholdMode::Strict),
            "closure" => Ok(ThresholdMode::Closure),
            other => Err(Error::Directive(format!(
                "unknown threshold mode `{other}` (expected strict or closure)"
            ))),
        }
    }
}

impl fmt::Display for ThresholdMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ThresholdMode::Strict => "strict",
            ThresholdMode::Closure => "closure",
        })
    }
}

/// A validated pseudometric over the states of a signature.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TrustMetric<W = u32> {
    sig: Signature,
    n: usize,
    dist: Vec<W>,
}

impl<W: Weight> TrustMetric<W> {
    /// Builds a metric from one entry per unordered pair of distinct states.
    /// Self-distances may be listed but must be zero.
    pub fn from_entries<I>(sig: &Signature, entries: I) -> Result<Self>
    where
        I: IntoIterator<Item = (State, State, W)>,
    {
        Self::from_entries_with_cap(sig, entries, DEFAULT_METRIC_ATOM_CAP)
    }

    pub fn from_entries_with_cap<I>(sig: &Signature, entries: I, cap: usize) -> Result<Self>
    where
        I: IntoIterator<Item = (State, State, W)>,
    {
        check_cap(sig, cap)?;
        let n = sig.state_count();
        let mut table: Vec<Option<W>> = vec![None; n * n];
        for (s, t, d) in entries {
            sig.check_same(s.signature())?;
            sig.check_same(t.signature())?;
            let (i, j) = (s.index(), t.index());
            if i == j {
                if !d.is_zero() {
                    return Err(Error::NonzeroDiagonal {
                        state: s.to_string(),
                    });
                }
                continue;
            }
            if table[i * n + j].is_some() {
                return Err(Error::DuplicatePair {
                    a: s.to_string(),
                    b: t.to_string(),
                });
            }
            table[i * n + j] = Some(d);
            table[j * n + i] = Some(d);
        }
        let order = StateSet::full(sig).display_indices();
        for (a, &i) in order.iter().enumerate() {
            for &j in &order[a + 1..] {
                if table[i * n + j].is_none() {
                    return Err(Error::MissingPair {
                        a: sig.state(i).to_string(),
                        b: sig.state(j).to_string(),
                    });
                }
            }
        }
        let dist = table
            .into_iter()
            .map(|d| d.unwrap_or_else(W::zero))
            .collect();
        let m = TrustMetric {
            sig: sig.clone(),
            n,
            dist,
        };
        m.check_triangle()?;
        Ok(m)
    }

    /// Builds a metric from a full distance function over state indices,
    /// checking every axiom.
    pub fn from_fn(sig: &Signature, mut d: impl FnMut(usize, usize) -> W) -> Result<Self> {
        Self::from_fn_with_cap(sig, &mut d, DEFAULT_METRIC_ATOM_CAP)
    }

    pub fn from_fn_with_cap(
        sig: &Signature,
        d: &mut dyn FnMut(usize, usize) -> W,
        cap: usize,
    ) -> Result<Self> {
        check_cap(sig, cap)?;
        let n = sig.state_count();
        let mut dist = Vec::with_capacity(n * n);
        for i in 0..n {
            for j in 0..n {
                dist.push(d(i, j));
            }
        }
        let m = TrustMetric {
            sig: sig.clone(),
            n,
            dist,
        };
        let order = StateSet::full(sig).display_indices();
        for &i in &order {
            if !m.at(i, i).is_zero() {
                return Err(Error::NonzeroDiagonal {
                    state: sig.state(i).to_string(),
                });
            }
        }
        for &i in &order {
            for &j in &order {
                if m.at(i, j) != m.at(j, i) {
                    return Err(Error::AxiomViolation {
                        axiom: Axiom::Symmetry,
                        x: sig.state(i).to_string(),
                        y: sig.state(j).to_string(),
                        z: sig.state(i).to_string(),
                    });
                }
            }
        }
        m.check_triangle()?;
        Ok(m)
    }

    /// The metric that distinguishes nothing.
    pub fn zero(sig: &Signature) -> Self {
        let n = sig.state_count();
        TrustMetric {
            sig: sig.clone(),
            n,
            dist: vec![W::zero(); n * n],
        }
    }

    fn check_triangle(&self) -> Result<()> {
        let order = StateSet::full(&self.sig).display_indices();
        for &x in &order {
            for &y in &order {
                let xy = self.at(x, y);
                for &z in &order {
                    if self.at(x, z) > xy.saturating_add(self.at(y, z)) {
                        return Err(Error::AxiomViolation {
                            axiom: Axiom::Triangle,
                            x: self.sig.state(x).to_string(),
                            y: self.sig.state(y).to_string(),
                            z: self.sig.state(z).to_string(),
                        });
                    }
                }
            }
        }
        Ok(())
    }

    /// Parses the metric file format: a `signature` line followed by
    /// `<state> <state> <distance>` lines; `#` starts a comment.
    pub fn parse(text: &str) -> Result<Self> {
        Self::parse_with_caps(text, DEFAULT_ATOM_CAP, DEFAULT_METRIC_ATOM_CAP)
    }

    pub fn parse_with_caps(text: &str, atom_cap: usize, metric_cap: usize) -> Result<Self> {
        let mut sig = None;
        let mut entries = Vec::new();
        let mut last_line = 0;
        for (no, raw) in text.lines().enumerate() {
            let line_no = no + 1;
            last_line = line_no;
            let line = strip_comment(raw).trim();
            if line.is_empty() {
                continue;
            }
            let Some(sig) = &sig else {
                let rest = line.strip_prefix("signature").ok_or_else(|| {
                    Error::Directive("metric file must start with `signature`".into())
                        .at_line(line_no)
                })?;
                sig = Some(
                    Signature::parse(rest, atom_cap.max(metric_cap))
                        .map_err(|e| e.at_line(line_no))?,
                );
                continue;
            };
            entries.push(parse_entry::<W>(line, sig).map_err(|e| e.at_line(line_no))?);
        }
        let sig = sig.ok_or_else(|| {
            Error::Directive("metric file has no `signature` line".into()).at_line(last_line.max(1))
        })?;
        Self::from_entries_with_cap(&sig, entries, metric_cap)
    }

    pub fn signature(&self) -> &Signature {
        &self.sig
    }

    fn at(&self, i: usize, j: usize) -> W {
        self.dist[i * self.n + j]
    }

    pub fn distance(&self, s: &State, t: &State) -> W {
        self.at(s.index(), t.index())
    }

    pub fn distance_by_index(&self, i: usize, j: usize) -> W {
        self.at(i, j)
    }

    pub fn max_distance(&self) -> W {
        self.dist.iter().copied().max().unwrap_or_else(W::zero)
    }

    /// 0 followed by every distinct distance, ascending. The threshold
    /// partition only changes at these values.
    pub fn breakpoints(&self) -> Vec<W> {
        let mut v = self.dist.clone();
        v.push(W::zero());
        v.sort_unstable();
        v.dedup();
        v
    }

    /// Groups states within distance `threshold` of one another.
    pub fn threshold_partition(&self, threshold: W, mode: ThresholdMode) -> Result<StatePartition> {
        match mode {
            ThresholdMode::Strict => self.strict_partition(threshold),
            ThresholdMode::Closure => Ok(self.closure_partition(threshold)),
        }
    }

    fn strict_partition(&self, threshold: W) -> Result<StatePartition> {
        let order = StateSet::full(&self.sig).display_indices();
        for &x in &order {
            for &y in &order {
                if self.at(x, y) > threshold {
                    continue;
                }
                for &z in &order {
                    if self.at(y, z) <= threshold && self.at(x, z) > threshold {
                        return Err(Error::ThresholdNotTransitive {
                            threshold: threshold.to_string(),
                            x: self.sig.state(x).to_string(),
                            y: self.sig.state(y).to_string(),
                            z: self.sig.state(z).to_string(),
                        });
                    }
                }
            }
        }
        // Transitive: the ball of each state is its cell; label by least member.
        let labels: Vec<usize> = (0..self.n)
            .map(|s| {
                (0..self.n)
                    .find(|&t| self.at(s, t) <= threshold)
                    .expect("d(s,s) = 0")
            })
            .collect();
        Ok(StatePartition::from_labels(&self.sig, &labels))
    }

    fn closure_partition(&self, threshold: W) -> StatePartition {
        let mut uf = UnionFind::<usize>::new(self.n);
        for i in 0..self.n {
            for j in i + 1..self.n {
                if self.at(i, j) <= threshold {
                    uf.union(i, j);
                }
            }
        }
        StatePartition::from_labels(&self.sig, &uf.into_labeling())
    }

    /// Least threshold whose partition is not the one-cell partition, or
    /// `None` when the metric is identically zero.
    pub fn min_nontrivial_threshold(&self) -> Option<W> {
        self.breakpoints()
            .into_iter()
            .find(|&i| !self.closure_partition(i).is_trivial())
    }
}

fn check_cap(sig: &Signature, cap: usize) -> Result<()> {
    if sig.len() > cap {
        return Err(Error::SignatureTooLarge {
            atoms: sig.len(),
            cap,
        });
    }
    if sig.len() > DEFAULT_METRIC_ATOM_CAP {
        warn!(
            "metric over {} atoms exceeds the default cap of {}; validation is cubic in the state count",
            sig.len(),
            DEFAULT_METRIC_ATOM_CAP
        );
    }
    Ok(())
}

pub(crate) fn strip_comment(line: &str) -> &str {
    match line.find('#') {
        Some(i) => &line[..i],
        None => line,
    }
}

fn parse_entry<W: Weight>(line: &str, sig: &Signature) -> Result<(State, State, W)> {
    let states = line
        .rfind('}')
        .map(|i| (&line[..=i], line[i + 1..].trim()))
        .ok_or_else(|| Error::Syntax {
            column: 1,
            expected: "`<state> <state> <distance>`".into(),
            found: format!("`{line}`"),
        })?;
    let pair = sig.parse_state_list(states.0)?;
    if pair.len() != 2 {
        return Err(Error::Syntax {
            column: 1,
            expected: "two state literals".into(),
            found: format!("{} literals", pair.len()),
        });
    }
    let d = states.1.parse::<W>().map_err(|_| Error::Syntax {
        column: line.len() - states.1.len() + 1,
        expected: "natural number distance".into(),
        found: if states.1.is_empty() {
            "end of line".into()
        } else {
            format!("`{}`", states.1)
        },
    })?;
    let mut it = pair.into_iter();
    let (s, t) = (it.next().unwrap(), it.next().unwrap());
    Ok((s, t, d))
}

/// Each source agent's metric, as held by one observing agent.
#[derive(Debug, Clone)]
pub struct PseudometricTrustSpace<W = u32> {
    sig: Signature,
    metrics: BTreeMap<String, TrustMetric<W>>,
}

impl<W: Weight> PseudometricTrustSpace<W> {
    pub fn new(sig: &Signature) -> Self {
        PseudometricTrustSpace {
            sig: sig.clone(),
            metrics: BTreeMap::new(),
        }
    }

    pub fn insert(&mut self, source: impl Into<String>, metric: TrustMetric<W>) -> Result<()> {
        self.sig.check_same(metric.signature())?;
        self.metrics.insert(source.into(), metric);
        Ok(())
    }

    pub fn get(&self, source: &str) -> Option<&TrustMetric<W>> {
        self.metrics.get(source)
    }

    pub fn signature(&self) -> &Signature {
        &self.sig
    }

    /// Resolves reports labelled by source name against this space.
    pub fn multi_revise(
        &self,
        order: &FaithfulOrder<W>,
        reports: &[crate::revision::Report],
        mode: ThresholdMode,
    ) -> Result<(W, BeliefState)> {
        let mut pairs = Vec::with_capacity(reports.len());
        for r in reports {
            let m = self
                .get(&r.source)
                .ok_or_else(|| Error::UnknownAgent(r.source.clone()))?;
            pairs.push((&r.formula, m));
        }
        multi_revise_metric(order, pairs, mode)
    }
}

/// Trust-sensitive revision using the finest nontrivial threshold
/// partition of `metric`. A metric that distinguishes nothing leaves the
/// beliefs unchanged.
pub fn pseudometric_revise<W: Weight>(
    order: &FaithfulOrder<W>,
    metric: &TrustMetric<W>,
    f: &Formula,
    mode: ThresholdMode,
) -> Result<BeliefState> {
    order.signature().check_same(metric.signature())?;
    let m = satisfiable_models(order.signature(), f)?;
    match metric.min_nontrivial_threshold() {
        Some(t) => {
            let partition = metric.threshold_partition(t, mode)?;
            BeliefState::new(order.minimal(&partition.expand_set(&m)))
        }
        None => Ok(order.beliefs().clone()),
    }
}

fn intersect_at<W: Weight>(
    sig: &Signature,
    reports: &[(StateSet, &TrustMetric<W>)],
    threshold: W,
    mode: ThresholdMode,
) -> Result<StateSet> {
    let mut acc = StateSet::full(sig);
    for (m, metric) in reports {
        acc.intersect_with(&metric.threshold_partition(threshold, mode)?.expand_set(m));
    }
    Ok(acc)
}

fn prepare<'a, W, I>(sig: &Signature, reports: I) -> Result<Vec<(StateSet, &'a TrustMetric<W>)>>
where
    W: Weight,
    I: IntoIterator<Item = (&'a Formula, &'a TrustMetric<W>)>,
{
    let mut out = Vec::new();
    for (f, metric) in reports {
        sig.check_same(metric.signature())?;
        out.push((satisfiable_models(sig, f)?, metric));
    }
    if out.is_empty() {
        return Err(Error::EmptyReports);
    }
    Ok(out)
}

fn least_threshold<W: Weight>(
    sig: &Signature,
    reports: &[(StateSet, &TrustMetric<W>)],
    mode: ThresholdMode,
) -> Result<(W, StateSet)> {
    let mut candidates: Vec<W> = reports.iter().flat_map(|(_, d)| d.breakpoints()).collect();
    candidates.sort_unstable();
    candidates.dedup();
    for t in candidates {
        let acc = intersect_at(sig, reports, t, mode)?;
        if !acc.is_empty() {
            return Ok((t, acc));
        }
    }
    unreachable!("at the largest distance every expansion is the full state space")
}

/// Least threshold at which the widened readings of all reports share a state.
pub fn resolve_threshold<'a, W, I>(sig: &Signature, reports: I, mode: ThresholdMode) -> Result<W>
where
    W: Weight,
    I: IntoIterator<Item = (&'a Formula, &'a TrustMetric<W>)>,
{
    let prepared = prepare(sig, reports)?;
    least_threshold(sig, &prepared, mode).map(|(t, _)| t)
}

/// Revision by simultaneous reports from metric-trusted sources, resolved
/// at the least consistent threshold. Returns that threshold with the result.
pub fn multi_revise_metric<'a, W, I>(
    order: &FaithfulOrder<W>,
    reports: I,
    mode: ThresholdMode,
) -> Result<(W, BeliefState)>
where
    W: Weight,
    I: IntoIterator<Item = (&'a Formula, &'a TrustMetric<W>)>,
{
    let sig = order.signature();
    let prepared = prepare(sig, reports)?;
    let (t, candidates) = least_threshold(sig, &prepared, mode)?;
    Ok((t, BeliefState::new(order.minimal(&candidates))?))
}
