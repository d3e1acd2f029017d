use std::path::Path;

use crate::error::{Error, Result};
use crate::formula::parse_formula;
use crate::logic::{is_identifier, BeliefState, Signature, State, DEFAULT_ATOM_CAP};
use crate::metric::{strip_comment, ThresholdMode, DEFAULT_METRIC_ATOM_CAP};
use crate::partition::StatePartition;
use crate::revision::Report;
use crate::{FaithfulOrder, TrustMetric};

use super::{
    read_file, AgentDecl, BaseOrder, Event, EventDecl, OrderKind, Scenario, TrustSpec, TrustStore,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct LoadOptions {
    pub atom_cap: usize,
    pub metric_atom_cap: usize,
}

impl Default for LoadOptions {
    fn default() -> Self {
        LoadOptions {
            atom_cap: DEFAULT_ATOM_CAP,
            metric_atom_cap: DEFAULT_METRIC_ATOM_CAP,
        }
    }
}

/// Loads a scenario; referenced files are resolved against `base_dir`.
pub fn load_scenario(text: &str, base_dir: &Path) -> Result<Scenario> {
    load_scenario_with(text, LoadOptions::default(), &mut |p| {
        read_file(&base_dir.join(p))
    })
}

pub fn load_scenario_file(path: &Path, options: LoadOptions) -> Result<Scenario> {
    let text = read_file(path)?;
    let base = path.parent().unwrap_or(Path::new("."));
    load_scenario_with(&text, options, &mut |p| read_file(&base.join(p)))
}

/// Loads a scenario, fetching referenced files through `resolve`.
pub fn load_scenario_with(
    text: &str,
    options: LoadOptions,
    resolve: &mut dyn FnMut(&str) -> Result<String>,
) -> Result<Scenario> {
    let mut loader = Loader {
        options,
        resolve,
        sig: None,
        mode: ThresholdMode::default(),
        agents: Vec::new(),
        trust: TrustStore::default(),
        events: Vec::new(),
    };
    let mut last = 0;
    for (no, raw) in text.lines().enumerate() {
        last = no + 1;
        let line = strip_comment(raw).trim();
        if line.is_empty() {
            continue;
        }
        loader
            .directive(line, no + 1)
            .map_err(|e| e.at_line(no + 1))?;
    }
    let sig = loader.sig.ok_or_else(|| {
        Error::Directive("scenario has no `signature` line".into()).at_line(last.max(1))
    })?;
    Ok(Scenario {
        signature: sig,
        mode: loader.mode,
        agents: loader.agents,
        trust: loader.trust,
        events: loader.events,
    })
}

struct Loader<'r> {
    options: LoadOptions,
    resolve: &'r mut dyn FnMut(&str) -> Result<String>,
    sig: Option<Signature>,
    mode: ThresholdMode,
    agents: Vec<AgentDecl>,
    trust: TrustStore,
    events: Vec<EventDecl>,
}

fn split_keyword(line: &str) -> (&str, &str) {
    match line.split_once(char::is_whitespace) {
        Some((k, rest)) => (k, rest.trim()),
        None => (line, ""),
    }
}

fn agent_name(name: &str) -> Result<String> {
    if is_identifier(name) {
        Ok(name.to_string())
    } else {
        Err(Error::Directive(format!(
            "`{name}` is not a valid agent name"
        )))
    }
}

/// Splits `text` at the first occurrence of `label:`.
fn split_label<'a>(text: &'a str, label: &str) -> Option<(&'a str, &'a str)> {
    let tag = format!("{label}:");
    let i = text.find(&tag)?;
    Some((text[..i].trim(), text[i + tag.len()..].trim()))
}

fn expect_label<'a>(text: &'a str, label: &str, directive: &str) -> Result<(&'a str, &'a str)> {
    split_label(text, label)
        .ok_or_else(|| Error::Directive(format!("`{directive}` needs `{label}:`")))
}

impl Loader<'_> {
    fn sig(&self) -> Result<&Signature> {
        self.sig
            .as_ref()
            .ok_or_else(|| Error::Directive("`signature` must come first".into()))
    }

    fn directive(&mut self, line: &str, line_no: usize) -> Result<()> {
        let (keyword, rest) = split_keyword(line);
        match keyword {
            "signature" => {
                if self.sig.is_some() {
                    return Err(Error::Directive("`signature` given twice".into()));
                }
                self.sig = Some(Signature::parse(rest, self.options.atom_cap)?);
            }
            "mode" => self.mode = rest.parse()?,
            "agent" => self.agent(rest)?,
            "trust" => self.trust_entry(rest)?,
            "report" => {
                let usage =
                    || Error::Directive("`report` needs `<source> <target>: <formula>`".into());
                let (head, formula) = rest.split_once(':').ok_or_else(usage)?;
                let parts: Vec<&str> = head.split_whitespace().collect();
                let [source, target] = parts[..] else {
                    return Err(usage());
                };
                let formula = parse_formula(formula, self.sig()?)?;
                self.push_event(
                    line,
                    line_no,
                    Event::Report {
                        source: agent_name(source)?,
                        target: agent_name(target)?,
                        formula,
                    },
                );
            }
            "batch" => {
                let (target, body) = rest.split_once(':').ok_or_else(|| {
                    Error::Directive("`batch` needs `<target>: <source>: <formula> ; …`".into())
                })?;
                let mut reports = Vec::new();
                for item in body.split(';') {
                    let (source, formula) = item.split_once(':').ok_or_else(|| {
                        Error::Directive(format!(
                            "batch item `{}` needs `<source>: <formula>`",
                            item.trim()
                        ))
                    })?;
                    reports.push(Report::new(
                        agent_name(source.trim())?,
                        parse_formula(formula, self.sig()?)?,
                    ));
                }
                self.push_event(
                    line,
                    line_no,
                    Event::Batch {
                        target: agent_name(target.trim())?,
                        reports,
                    },
                );
            }
            "reset" => {
                let (target, formula) = expect_label(rest, "belief", "reset")?;
                let sig = self.sig()?;
                let beliefs = BeliefState::from_formula(sig, &parse_formula(formula, sig)?)?;
                self.push_event(
                    line,
                    line_no,
                    Event::Reset {
                        target: agent_name(target)?,
                        beliefs,
                    },
                );
            }
            other => return Err(Error::Directive(format!("unknown directive `{other}`"))),
        }
        Ok(())
    }

    fn push_event(&mut self, line: &str, line_no: usize, event: Event) {
        self.events.push(EventDecl {
            line: line_no,
            text: line.to_string(),
            event,
        });
    }

    fn agent(&mut self, rest: &str) -> Result<()> {
        let (name, after) = expect_label(rest, "belief", "agent")?;
        let name = agent_name(name)?;
        if self.agents.iter().any(|a| a.name == name) {
            return Err(Error::DuplicateAgent(name));
        }
        let (formula, order_text) = expect_label(after, "order", "agent")?;
        let sig = self.sig()?.clone();
        let beliefs = BeliefState::from_formula(&sig, &parse_formula(formula, &sig)?)?;
        let (order_spec, fallback) = match split_label(order_text, "fallback") {
            Some((spec, kind)) => (spec, Some(kind.parse::<BaseOrder>()?)),
            None => (order_text, None),
        };
        let order = match order_spec.strip_prefix("explicit:") {
            Some(path) => {
                let path = path.trim();
                let table = (self.resolve)(path)
                    .and_then(|text| parse_rank_table(&text, &sig))
                    .map_err(|e| in_file(path, e))?;
                OrderKind::Explicit {
                    order: FaithfulOrder::explicit(&beliefs, table)?,
                    fallback,
                }
            }
            None => {
                if fallback.is_some() {
                    return Err(Error::Directive(
                        "`fallback:` only applies to explicit orders".into(),
                    ));
                }
                OrderKind::Base(order_spec.parse()?)
            }
        };
        self.agents.push(AgentDecl {
            name,
            beliefs,
            order,
        });
        Ok(())
    }

    fn trust_entry(&mut self, rest: &str) -> Result<()> {
        let usage = || {
            Error::Directive(
                "`trust` needs `<observer> <source> partition: …` or `metric: <path>`".into(),
            )
        };
        let (head, kind, body) = if let Some((h, b)) = split_label(rest, "partition") {
            (h, "partition", b)
        } else if let Some((h, b)) = split_label(rest, "metric") {
            (h, "metric", b)
        } else {
            return Err(usage());
        };
        let parts: Vec<&str> = head.split_whitespace().collect();
        let [observer, source] = parts[..] else {
            return Err(usage());
        };
        let sig = self.sig()?.clone();
        let spec = if kind == "partition" {
            TrustSpec::Partition(StatePartition::parse(body, &sig)?)
        } else {
            let (atom_cap, metric_cap) = (self.options.atom_cap, self.options.metric_atom_cap);
            let metric = (self.resolve)(body)
                .and_then(|text| TrustMetric::parse_with_caps(&text, atom_cap, metric_cap))
                .map_err(|e| in_file(body, e))?;
            sig.check_same(metric.signature())?;
            TrustSpec::Metric(metric)
        };
        self.trust
            .insert(&agent_name(observer)?, &agent_name(source)?, spec)
    }
}

fn in_file(path: &str, e: Error) -> Error {
    match e {
        e @ Error::Io { .. } => e,
        e => Error::InFile {
            path: path.to_string(),
            source: Box::new(e),
        },
    }
}

/// Parses an explicit ranking: one `<state> <rank>` per line, with an
/// optional leading `signature` line that must match `sig`.
pub fn parse_rank_table(text: &str, sig: &Signature) -> Result<Vec<(State, u32)>> {
    let mut out = Vec::new();
    for (no, raw) in text.lines().enumerate() {
        let line = strip_comment(raw).trim();
        if line.is_empty() {
            continue;
        }
        let parsed = (|| {
            if let Some(rest) = line.strip_prefix("signature") {
                sig.check_same(&Signature::parse(rest, sig.len().max(1))?)?;
                return Ok(None);
            }
            let close = line.rfind('}').ok_or_else(|| Error::Syntax {
                column: 1,
                expected: "`<state> <rank>`".into(),
                found: format!("`{line}`"),
            })?;
            let state = sig.parse_state(&line[..=close])?;
            let rank_text = line[close + 1..].trim();
            let rank = rank_text.parse::<u32>().map_err(|_| Error::Syntax {
                column: close + 2,
                expected: "natural number rank".into(),
                found: format!("`{rank_text}`"),
            })?;
            Ok(Some((state, rank)))
        })()
        .map_err(|e: Error| e.at_line(no + 1))?;
        out.extend(parsed);
    }
    Ok(out)
}
