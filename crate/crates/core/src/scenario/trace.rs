use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Which revision machinery handled an event.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mechanism {
    Partition,
    Metric,
    Reset,
}

impl Mechanism {
    fn as_str(self) -> &'static str {
        match self {
            Mechanism::Partition => "partition",
            Mechanism::Metric => "metric",
            Mechanism::Reset => "reset",
        }
    }
}

/// Outcome of one event. Field order is the structured output order.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TraceRecord {
    pub event: usize,
    pub target: String,
    pub mechanism: Option<Mechanism>,
    pub threshold: Option<u32>,
    pub result_states: Vec<String>,
    pub result_dnf: Option<String>,
    pub error: Option<String>,
    pub input: String,
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Trace {
    pub records: Vec<TraceRecord>,
}

impl Trace {
    pub fn errors(&self) -> impl Iterator<Item = &TraceRecord> {
        self.records.iter().filter(|r| r.error.is_some())
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub enum TraceFormat {
    #[default]
    Text,
    /// One JSON object per line, after a header line.
    Structured,
}

impl std::str::FromStr for TraceFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "text" => Ok(TraceFormat::Text),
            "structured" => Ok(TraceFormat::Structured),
            other => Err(Error::Directive(format!(
                "unknown trace format `{other}` (expected text or structured)"
            ))),
        }
    }
}

#[derive(Serialize, Deserialize)]
struct Header {
    trace: String,
    version: u32,
    events: usize,
}

const TRACE_TAG: &str = "trustrev";
const TRACE_VERSION: u32 = 1;

pub fn render_trace(trace: &Trace, format: TraceFormat) -> String {
    let mut out = String::new();
    match format {
        TraceFormat::Text => {
            let _ = writeln!(out, "# trustrev trace: {} events", trace.records.len());
            for r in &trace.records {
                let _ = writeln!(out, "{}", text_line(r));
            }
        }
        TraceFormat::Structured => {
            let header = Header {
                trace: TRACE_TAG.into(),
                version: TRACE_VERSION,
                events: trace.records.len(),
            };
            out.push_str(&serde_json::to_string(&header).expect("header serializes"));
            out.push('\n');
            for r in &trace.records {
                out.push_str(&serde_json::to_string(r).expect("record serializes"));
                out.push('\n');
            }
        }
    }
    out
}

fn text_line(r: &TraceRecord) -> String {
    let mut line = format!("[{}] {}", r.event, r.input);
    if let Some(m) = r.mechanism {
        let _ = write!(line, " | mechanism: {}", m.as_str());
        if m == Mechanism::Metric {
            match r.threshold {
                Some(t) => {
                    let _ = write!(line, " m={t}");
                }
                None => line.push_str(" m=none"),
            }
        }
    }
    match &r.error {
        Some(e) => {
            let _ = write!(line, " | error: {e}");
        }
        None => {
            let _ = write!(
                line,
                " | result: {} | dnf: {}",
                r.result_states.join(" "),
                r.result_dnf.as_deref().unwrap_or("false")
            );
        }
    }
    line
}

/// Parses the structured rendering back into a trace.
pub fn parse_structured_trace(text: &str) -> Result<Trace> {
    let bad = |line: usize, message: String| {
        Error::Directive(format!("structured trace: {message}")).at_line(line)
    };
    let mut lines = text
        .lines()
        .enumerate()
        .filter(|(_, l)| !l.trim().is_empty());
    let (_, first) = lines
        .next()
        .ok_or_else(|| bad(1, "missing header".into()))?;
    let header: Header = serde_json::from_str(first).map_err(|e| bad(1, e.to_string()))?;
    if header.trace != TRACE_TAG || header.version != TRACE_VERSION {
        return Err(bad(1, "unrecognized header".into()));
    }
    let mut records = Vec::new();
    for (no, line) in lines {
        records.push(serde_json::from_str(line).map_err(|e| bad(no + 1, e.to_string()))?);
    }
    if records.len() != header.events {
        return Err(bad(
            text.lines().count(),
            format!(
                "header announces {} events, found {}",
                header.events,
                records.len()
            ),
        ));
    }
    Ok(Trace { records })
}
