use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde_json::json;
use trustrev::metric::pseudometric_revise;
use trustrev::scenario::{
    load_scenario_file, parse_rank_table, render_trace, run_scenario, LoadOptions, TraceFormat,
};
use trustrev::{
    agm_revise, expand, parse_formula, trust_expansion, BeliefState, Error, FaithfulOrder,
    Signature, StatePartition, ThresholdMode, TrustMetric, DEFAULT_ATOM_CAP,
    DEFAULT_METRIC_ATOM_CAP,
};

#[derive(Parser)]
#[command(name = "trustrev", version, about = "Trust-sensitive belief revision")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone, Copy)]
struct Caps {
    /// Largest accepted signature.
    #[arg(long, default_value_t = DEFAULT_ATOM_CAP, global = true)]
    atom_cap: usize,
    /// Largest signature accepted for metrics (a warning is logged above the default).
    #[arg(long, default_value_t = DEFAULT_METRIC_ATOM_CAP, global = true)]
    metric_atom_cap: usize,
}

#[derive(Subcommand)]
enum Command {
    /// Revise beliefs by a single formula.
    Revise(ReviseArgs),
    /// Print the expansion of a formula through a partition.
    Expand(ExpandArgs),
    /// Validate a partition or metric file.
    Check {
        #[command(subcommand)]
        what: CheckCommand,
    },
    /// Work with scenario files.
    Scenario {
        #[command(subcommand)]
        what: ScenarioCommand,
    },
}

#[derive(Clone, Debug)]
enum OrderArg {
    TwoLevel,
    Dalal,
    Explicit(PathBuf),
}

fn parse_order(s: &str) -> Result<OrderArg, String> {
    match s {
        "two_level" => Ok(OrderArg::TwoLevel),
        "dalal" => Ok(OrderArg::Dalal),
        _ => match s.strip_prefix("explicit:") {
            Some(path) if !path.is_empty() => Ok(OrderArg::Explicit(path.into())),
            _ => Err("expected two_level, dalal or explicit:<path>".into()),
        },
    }
}

#[derive(Args)]
struct ReviseArgs {
    /// Atoms, separated by spaces or commas. May be omitted when a partition
    /// or metric file declares one.
    #[arg(long)]
    signature: Option<String>,
    #[arg(long)]
    beliefs: String,
    #[arg(long, value_parser = parse_order)]
    order: OrderArg,
    #[arg(long, conflicts_with = "metric")]
    partition: Option<PathBuf>,
    #[arg(long)]
    metric: Option<PathBuf>,
    #[arg(long)]
    formula: String,
    #[arg(long, default_value_t = ThresholdMode::Strict)]
    mode: ThresholdMode,
    #[arg(long, default_value = "text")]
    format: TraceFormat,
    #[command(flatten)]
    caps: Caps,
}

#[derive(Args)]
struct ExpandArgs {
    #[arg(long)]
    signature: Option<String>,
    #[arg(long)]
    partition: PathBuf,
    #[arg(long)]
    formula: String,
    #[command(flatten)]
    caps: Caps,
}

#[derive(Subcommand)]
enum CheckCommand {
    Partition {
        path: PathBuf,
        #[arg(long)]
        signature: Option<String>,
        #[command(flatten)]
        caps: Caps,
    },
    Metric {
        path: PathBuf,
        /// Print the threshold partition at this distance.
        #[arg(long)]
        threshold: Option<u32>,
        #[arg(long, default_value_t = ThresholdMode::Strict)]
        mode: ThresholdMode,
        #[command(flatten)]
        caps: Caps,
    },
}

#[derive(Subcommand)]
enum ScenarioCommand {
    Run {
        path: PathBuf,
        #[arg(long, default_value = "text")]
        format: TraceFormat,
        /// Write the trace here instead of stdout.
        #[arg(long)]
        trace: Option<PathBuf>,
        /// Exit with status 2 if any event failed.
        #[arg(long)]
        strict_events: bool,
        #[command(flatten)]
        caps: Caps,
    },
}

/// Exit status 2: the input was understood but rejected.
struct Semantic(Error);

impl From<Error> for Semantic {
    fn from(e: Error) -> Self {
        Semantic(e)
    }
}

type Outcome = Result<String, Semantic>;

fn read(path: &Path) -> Result<String, Error> {
    std::fs::read_to_string(path).map_err(|e| Error::Io {
        path: path.display().to_string(),
        message: e.to_string(),
    })
}

fn in_file(path: &Path, e: Error) -> Error {
    match e {
        e @ Error::Io { .. } => e,
        e => Error::InFile {
            path: path.display().to_string(),
            source: Box::new(e),
        },
    }
}

fn signature_arg(text: &Option<String>, caps: Caps) -> Result<Option<Signature>, Error> {
    text.as_deref()
        .map(|t| Signature::parse(t, caps.atom_cap))
        .transpose()
}

fn load_partition(
    path: &Path,
    sig: Option<&Signature>,
    caps: Caps,
) -> Result<StatePartition, Error> {
    read(path)
        .and_then(|text| StatePartition::parse_file(&text, sig, caps.atom_cap))
        .map_err(|e| in_file(path, e))
}

fn load_metric(path: &Path, sig: Option<&Signature>, caps: Caps) -> Result<TrustMetric, Error> {
    let metric = read(path)
        .and_then(|text| TrustMetric::parse_with_caps(&text, caps.atom_cap, caps.metric_atom_cap))
        .map_err(|e| in_file(path, e))?;
    if let Some(sig) = sig {
        sig.check_same(metric.signature())?;
    }
    Ok(metric)
}

fn no_signature() -> Error {
    Error::Directive("no signature: pass --signature or use a file that declares one".into())
}

fn revise(args: ReviseArgs) -> Outcome {
    let caps = args.caps;
    let given = signature_arg(&args.signature, caps)?;
    let partition = match &args.partition {
        Some(p) => Some(load_partition(p, given.as_ref(), caps)?),
        None => None,
    };
    let metric = match &args.metric {
        Some(p) => Some(load_metric(p, given.as_ref(), caps)?),
        None => None,
    };
    let sig = given
        .or_else(|| partition.as_ref().map(|p| p.signature().clone()))
        .or_else(|| metric.as_ref().map(|m| m.signature().clone()))
        .ok_or_else(no_signature)?;

    let beliefs = BeliefState::from_formula(&sig, &parse_formula(&args.beliefs, &sig)?)?;
    let order = match &args.order {
        OrderArg::TwoLevel => FaithfulOrder::two_level(&beliefs),
        OrderArg::Dalal => FaithfulOrder::dalal(&beliefs),
        OrderArg::Explicit(path) => {
            let table = read(path)
                .and_then(|text| parse_rank_table(&text, &sig))
                .map_err(|e| in_file(path, e))?;
            FaithfulOrder::explicit(&beliefs, table)?
        }
    };
    let f = parse_formula(&args.formula, &sig)?;

    let (mechanism, threshold, result) = match (&partition, &metric) {
        (Some(p), _) => ("partition", None, trustrev::trust_revise(&order, p, &f)?),
        (None, Some(d)) => (
            "metric",
            d.min_nontrivial_threshold(),
            pseudometric_revise(&order, d, &f, args.mode)?,
        ),
        (None, None) => ("agm", None, agm_revise(&order, &f)?),
    };
    let states = result.states().literals();
    let dnf = result.to_formula().render(&sig);
    Ok(match args.format {
        TraceFormat::Structured => {
            let record = json!({
                "mechanism": mechanism,
                "threshold": threshold,
                "result_states": states,
                "result_dnf": dnf,
            });
            format!("{record}\n")
        }
        TraceFormat::Text => {
            let mut out = String::new();
            if metric.is_some() {
                match threshold {
                    Some(m) => out.push_str(&format!("m={m}\n")),
                    None => out.push_str("m=none\n"),
                }
            }
            out.push_str(&format!("result: {}\ndnf: {dnf}\n", states.join(" ")));
            out
        }
    })
}

fn expand_cmd(args: ExpandArgs) -> Outcome {
    let given = signature_arg(&args.signature, args.caps)?;
    let partition = load_partition(&args.partition, given.as_ref(), args.caps)?;
    let sig = partition.signature();
    let f = parse_formula(&args.formula, sig)?;
    let set = expand(&partition, &f);
    Ok(format!(
        "expansion: {}\ndnf: {}\n",
        set,
        trust_expansion(&partition, &f).render(sig)
    ))
}

fn check(what: CheckCommand) -> Outcome {
    match what {
        CheckCommand::Partition {
            path,
            signature,
            caps,
        } => {
            let given = signature_arg(&signature, caps)?;
            let p = load_partition(&path, given.as_ref(), caps)?;
            Ok(format!("ok, {} cells\n", p.len()))
        }
        CheckCommand::Metric {
            path,
            threshold,
            mode,
            caps,
        } => {
            let d = load_metric(&path, None, caps)?;
            Ok(match threshold {
                Some(i) => format!("{}\n", d.threshold_partition(i, mode)?),
                None => match d.min_nontrivial_threshold() {
                    Some(m) => format!("ok, min_nontrivial_threshold={m}\n"),
                    None => "ok, min_nontrivial_threshold=none\n".to_string(),
                },
            })
        }
    }
}

fn scenario(what: ScenarioCommand) -> Outcome {
    let ScenarioCommand::Run {
        path,
        format,
        trace: out_path,
        strict_events,
        caps,
    } = what;
    let options = LoadOptions {
        atom_cap: caps.atom_cap,
        metric_atom_cap: caps.metric_atom_cap,
    };
    let sc = load_scenario_file(&path, options).map_err(|e| in_file(&path, e))?;
    let trace = run_scenario(&sc);
    let rendered = render_trace(&trace, format);
    let stdout = match &out_path {
        Some(p) => {
            std::fs::write(p, &rendered).map_err(|e| Error::Io {
                path: p.display().to_string(),
                message: e.to_string(),
            })?;
            String::new()
        }
        None => rendered,
    };
    if strict_events {
        if let Some(first) = trace.errors().next() {
            print!("{stdout}");
            return Err(Semantic(Error::Directive(format!(
                "event {} failed: {}",
                first.event,
                first.error.as_deref().unwrap_or_default()
            ))));
        }
    }
    Ok(stdout)
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(1)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    let outcome = match cli.command {
        Command::Revise(args) => revise(args),
        Command::Expand(args) => expand_cmd(args),
        Command::Check { what } => check(what),
        Command::Scenario { what } => scenario(what),
    };
    match outcome {
        Ok(text) => {
            let mut out = std::io::stdout().lock();
            let _ = out.write_all(text.as_bytes());
            ExitCode::SUCCESS
        }
        Err(Semantic(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
