//! The `rsa` command line: assess rule files against traces, answer point
//! queries, poke around in a small REPL, and convert step listings.
//!
//! ```text
//! rsa assess  --rules rules.ltl --trace trace.json [--format json] [--oracle-check]
//! rsa assess  --rules rules.ltl --kripke k.json --run run.txt [--start-time 0]
//! rsa query   --rules rules.ltl --trace trace.json <rule> <node> <t0> <t>
//! rsa repl    --rules rules.ltl --trace trace.json [--script cmds.txt]
//! rsa convert --from-listing steps.txt [--allow-gaps] [--gap-labels a,b] [--out trace.json]
//! ```
//!
//! A rules file holds one formula per line; blank lines and `#` comments
//! are ignored, and rules are numbered from 1 in file order. The trace
//! comes either from a trace JSON file or from a Kripke structure plus a
//! run through it (exactly one of the two). The node argument is a dotted
//! address; pass an empty string (`""`) for the root.
//!
//! Exit codes: 0 on success, 2 for any input problem (unreadable files,
//! parse errors, invalid runs, out-of-range queries), 3 when
//! `--oracle-check` finds the status engine disagreeing with the reference
//! evaluator.

use std::io::{BufRead, Write};
use std::path::{Path, PathBuf};

use clap::error::ErrorKind;
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use crate::formula::{FormulaTree, NodeAddress};
use crate::query::{self, ScanEntry};
use crate::semantics;
use crate::status::{assess, StatusTable};
use crate::trace::{run_from_str, trace_from_listing, Kripke, LabelSet, Time, Trace};

/// Top-level argument grammar for the `rsa` binary.
#[derive(Debug, Parser)]
#[command(
    name = "rsa",
    version,
    about = "Assess the status of LTL rules over finite traces"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Assess every rule and report its root status and change points
    Assess(AssessArgs),
    /// Answer one query: rule, node address, suffix start t0, time t
    Query(QueryArgs),
    /// Interactive queries over one loaded session
    Repl(ReplArgs),
    /// Convert a step listing to a trace JSON file
    Convert(ConvertArgs),
}

/// Where the trace comes from: a trace file, or a structure plus a run.
#[derive(Debug, Args)]
struct InputArgs {
    /// Rules file: one formula per line, '#' comments allowed
    #[arg(long)]
    rules: PathBuf,
    /// Trace JSON file
    #[arg(long)]
    trace: Option<PathBuf>,
    /// Kripke structure JSON file (requires --run)
    #[arg(long, requires = "run", conflicts_with = "trace")]
    kripke: Option<PathBuf>,
    /// Run file: whitespace-separated state names (requires --kripke)
    #[arg(long, requires = "kripke", conflicts_with = "trace")]
    run: Option<PathBuf>,
    /// Start time of the trace induced from --run
    #[arg(long, default_value_t = 0)]
    start_time: Time,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, ValueEnum)]
enum OutputFormat {
    #[default]
    Text,
    Json,
}

#[derive(Debug, Args)]
struct AssessArgs {
    #[command(flatten)]
    input: InputArgs,
    /// Output format
    #[arg(long, value_enum, default_value_t)]
    format: OutputFormat,
    /// Re-check every verdict against the reference evaluator
    #[arg(long)]
    oracle_check: bool,
}

#[derive(Debug, Args)]
struct QueryArgs {
    #[command(flatten)]
    input: InputArgs,
    /// Output format
    #[arg(long, value_enum, default_value_t)]
    format: OutputFormat,
    /// Re-check every verdict against the reference evaluator
    #[arg(long)]
    oracle_check: bool,
    /// Rule number (1-based file order)
    rule: usize,
    /// Node address ("" for the root, "1.2" for a subformula)
    node: String,
    /// Suffix start
    t0: Time,
    /// Queried time (t0 <= t <= end of trace)
    t: Time,
}

#[derive(Debug, Args)]
struct ReplArgs {
    #[command(flatten)]
    input: InputArgs,
    /// Read commands from this file instead of stdin
    #[arg(long)]
    script: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct ConvertArgs {
    /// Step listing file
    #[arg(long)]
    from_listing: PathBuf,
    /// Fill (...) elisions instead of rejecting them
    #[arg(long)]
    allow_gaps: bool,
    /// Comma-separated labels for filled steps (default: none)
    #[arg(long, requires = "allow_gaps")]
    gap_labels: Option<String>,
    /// Write the trace JSON here instead of stdout
    #[arg(long)]
    out: Option<PathBuf>,
}

/// Errors that end a command, sorted by exit code.
enum CliError {
    /// Anything wrong with what the user handed us: exit code 2.
    Input(String),
    /// The status engine and the reference evaluator disagree: exit code 3.
    Consistency(String),
}

impl CliError {
    fn input(context: &str, error: impl std::fmt::Display) -> Self {
        CliError::Input(format!("{context}: {error}"))
    }
}

/// Parse arguments from the process environment and run. Returns the exit
/// code for `main` to pass on.
pub fn run() -> i32 {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(err) => {
            let code = match err.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => 2,
            };
            let _ = err.print();
            return code;
        }
    };
    let result = match cli.command {
        Command::Assess(args) => cmd_assess(args),
        Command::Query(args) => cmd_query(args),
        Command::Repl(args) => cmd_repl(args),
        Command::Convert(args) => cmd_convert(args),
    };
    match result {
        Ok(()) => 0,
        Err(CliError::Input(message)) => {
            eprintln!("error: {message}");
            2
        }
        Err(CliError::Consistency(message)) => {
            eprintln!("consistency failure: {message}");
            3
        }
    }
}

/// A loaded rule set and trace with every rule already assessed. Rule i
/// (1-based) lives at `tables[i - 1]`.
struct Session {
    trace: Trace,
    tables: Vec<StatusTable>,
}

impl Session {
    fn load(input: &InputArgs) -> Result<Self, CliError> {
        let trace = load_trace(input)?;
        let rules = load_rules(&input.rules)?;
        let tables = rules.iter().map(|tree| assess(tree, &trace)).collect();
        Ok(Session { trace, tables })
    }

    fn table(&self, rule: usize) -> Result<&StatusTable, CliError> {
        if rule == 0 || rule > self.tables.len() {
            return Err(CliError::Input(format!(
                "rule {rule} out of range; the rules file defines {} rule(s), numbered from 1",
                self.tables.len()
            )));
        }
        Ok(&self.tables[rule - 1])
    }

    /// Compare every verdict in every table against the reference
    /// evaluator; any disagreement is a crate bug, not an input problem.
    fn oracle_check(&self) -> Result<(), CliError> {
        for (i, table) in self.tables.iter().enumerate() {
            let tree = table.tree();
            for id in tree.post_order() {
                for t0 in self.trace.start_time()..=self.trace.end_time() {
                    let violated = table.quad_by_id(id, t0).unwrap().is_violated();
                    let holds = semantics::evaluate(&self.trace, tree, id, t0);
                    if violated == holds {
                        return Err(CliError::Consistency(format!(
                            "rule {} node {} at t0={}: engine reports {}, reference evaluation reports {}",
                            i + 1,
                            tree.node(id).address(),
                            t0,
                            if violated { "violated" } else { "not violated" },
                            if holds { "satisfied" } else { "not satisfied" },
                        )));
                    }
                }
            }
        }
        Ok(())
    }
}

fn load_rules(path: &Path) -> Result<Vec<FormulaTree>, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::input(&path.display().to_string(), e))?;
    let mut rules = Vec::new();
    for (line_no, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let tree = FormulaTree::parse(line).map_err(|e| {
            CliError::Input(format!("{}:{}: {e}", path.display(), line_no + 1))
        })?;
        rules.push(tree);
    }
    if rules.is_empty() {
        return Err(CliError::Input(format!(
            "{}: no rules found",
            path.display()
        )));
    }
    Ok(rules)
}

fn load_trace(input: &InputArgs) -> Result<Trace, CliError> {
    match (&input.trace, &input.kripke, &input.run) {
        (Some(trace_path), None, None) => {
            Trace::load(trace_path).map_err(|e| CliError::Input(e.to_string()))
        }
        (None, Some(kripke_path), Some(run_path)) => {
            let kripke = Kripke::load(kripke_path).map_err(|e| CliError::Input(e.to_string()))?;
            let text = std::fs::read_to_string(run_path)
                .map_err(|e| CliError::input(&run_path.display().to_string(), e))?;
            let run = run_from_str(&text);
            kripke
                .induce_trace(&run, input.start_time)
                .map_err(|e| CliError::input(&run_path.display().to_string(), e))
        }
        _ => Err(CliError::Input(
            "provide either --trace FILE or --kripke FILE --run FILE".to_string(),
        )),
    }
}

/// Per-rule block of the JSON assessment report.
#[derive(Serialize)]
struct AssessReport {
    rule: usize,
    source: String,
    t0: Time,
    active: Vec<Time>,
    satisfied: Vec<Time>,
    inactive: Vec<Time>,
    violated: Vec<Time>,
    interesting: Vec<Time>,
}

fn cmd_assess(args: AssessArgs) -> Result<(), CliError> {
    let session = Session::load(&args.input)?;
    if args.oracle_check {
        session.oracle_check()?;
    }
    let start = session.trace.start_time();
    let root = NodeAddress::root();
    let mut reports = Vec::new();
    for (i, table) in session.tables.iter().enumerate() {
        let quad = table.root_quad(start).unwrap();
        let interesting = query::interesting_times(table, &root).expect("root always resolves");
        reports.push(AssessReport {
            rule: i + 1,
            source: table.tree().source().to_string(),
            t0: start,
            active: quad.active.times(),
            satisfied: quad.satisfied.times(),
            inactive: quad.inactive.times(),
            violated: quad.violated.times(),
            interesting: interesting.times(),
        });
    }
    match args.format {
        OutputFormat::Json => {
            println!(
                "{}",
                serde_json::to_string_pretty(&reports).expect("report serialization")
            );
        }
        OutputFormat::Text => {
            for (report, table) in reports.iter().zip(&session.tables) {
                let quad = table.root_quad(start).unwrap();
                println!("Rule {}: {}", report.rule, report.source);
                println!(
                    "  at t0={start}: active={} satisfied={} inactive={} violated={}",
                    quad.active, quad.satisfied, quad.inactive, quad.violated
                );
                let interesting =
                    query::interesting_times(table, &root).expect("root always resolves");
                println!("  interesting times: {interesting}");
            }
        }
    }
    Ok(())
}

fn parse_node_address(text: &str) -> Result<NodeAddress, CliError> {
    // REPL and script lines have no shell to strip quotes, so accept a
    // quoted form there; "" is the conventional way to name the root.
    let trimmed = text.trim_matches('"');
    NodeAddress::parse(trimmed).map_err(|e| CliError::Input(e.to_string()))
}

fn cmd_query(args: QueryArgs) -> Result<(), CliError> {
    let session = Session::load(&args.input)?;
    if args.oracle_check {
        session.oracle_check()?;
    }
    let table = session.table(args.rule)?;
    let address = parse_node_address(&args.node)?;
    let result = query::query_status(table, args.rule, &address, args.t0, args.t)
        .map_err(|e| CliError::Input(e.to_string()))?;
    match args.format {
        OutputFormat::Json => println!(
            "{}",
            serde_json::to_string_pretty(&result).expect("result serialization")
        ),
        OutputFormat::Text => println!("{}", result.text),
    }
    Ok(())
}

fn cmd_convert(args: ConvertArgs) -> Result<(), CliError> {
    let text = std::fs::read_to_string(&args.from_listing)
        .map_err(|e| CliError::input(&args.from_listing.display().to_string(), e))?;
    let gap_fill = if args.allow_gaps {
        let mut labels = LabelSet::new();
        if let Some(csv) = &args.gap_labels {
            for part in csv.split(',') {
                let label = part.trim();
                if label.is_empty() {
                    continue;
                }
                if !crate::formula::is_valid_label(label) {
                    return Err(CliError::Input(format!(
                        "--gap-labels: invalid label {label:?}"
                    )));
                }
                labels.insert(label.to_string());
            }
        }
        Some(labels)
    } else {
        None
    };
    let trace = trace_from_listing(&text, gap_fill.as_ref())
        .map_err(|e| CliError::input(&args.from_listing.display().to_string(), e))?;
    match &args.out {
        Some(path) => trace
            .save(path)
            .map_err(|e| CliError::Input(e.to_string()))?,
        None => print!("{}", trace.to_json_string()),
    }
    Ok(())
}

fn cmd_repl(args: ReplArgs) -> Result<(), CliError> {
    let session = Session::load(&args.input)?;
    let stdout = std::io::stdout();
    match &args.script {
        Some(path) => {
            let text = std::fs::read_to_string(path)
                .map_err(|e| CliError::input(&path.display().to_string(), e))?;
            for line in text.lines() {
                if !repl_line(&session, line, &mut stdout.lock()) {
                    break;
                }
            }
        }
        None => {
            let stdin = std::io::stdin();
            let mut out = stdout.lock();
            loop {
                write!(out, "rsa> ").ok();
                out.flush().ok();
                let mut line = String::new();
                match stdin.lock().read_line(&mut line) {
                    Ok(0) | Err(_) => break,
                    Ok(_) => {}
                }
                if !repl_line(&session, &line, &mut out) {
                    break;
                }
            }
        }
    }
    Ok(())
}

const REPL_HELP: &str = "\
commands:
  query <rule> <node> <t0> <t>   status of a node at time t, read from t0
  tau <rule> <node> <t0>         the node's four time sets at suffix start t0
  interesting <rule> <node>      times where the node newly turns active or violated
  scan <t>                       satisfied G-rule bodies at instant t
  help                           this text
  quit                           leave";

/// Execute one REPL line. Returns false when the session should end.
fn repl_line(session: &Session, line: &str, out: &mut impl Write) -> bool {
    match eval_repl_line(session, line) {
        Ok(ReplOutcome::Quit) => false,
        Ok(ReplOutcome::Text(text)) => {
            if !text.is_empty() {
                writeln!(out, "{text}").ok();
            }
            true
        }
        Err(CliError::Input(message)) | Err(CliError::Consistency(message)) => {
            writeln!(out, "error: {message}").ok();
            true
        }
    }
}

enum ReplOutcome {
    Text(String),
    Quit,
}

fn eval_repl_line(session: &Session, line: &str) -> Result<ReplOutcome, CliError> {
    let words: Vec<&str> = line.split_whitespace().collect();
    let text = match words.as_slice() {
        [] => String::new(),
        ["#", ..] => String::new(),
        ["quit"] | ["exit"] => return Ok(ReplOutcome::Quit),
        ["help"] => REPL_HELP.to_string(),
        ["query", rule, node, t0, t] => {
            let table = session.table(parse_number(rule, "rule")?)?;
            let address = parse_node_address(node)?;
            let result = query::query_status(
                table,
                parse_number(rule, "rule")?,
                &address,
                parse_number(t0, "t0")?,
                parse_number(t, "t")?,
            )
            .map_err(|e| CliError::Input(e.to_string()))?;
            result.text
        }
        ["tau", rule, node, t0] => {
            let rule: usize = parse_number(rule, "rule")?;
            let table = session.table(rule)?;
            let address = parse_node_address(node)?;
            let t0: Time = parse_number(t0, "t0")?;
            let quad = table
                .quad(&address, t0)
                .ok_or_else(|| {
                    CliError::Input(format!(
                        "no quad for node \"{address}\" at t0={t0}; addresses come from the rule, t0 from the trace range"
                    ))
                })?;
            format!(
                "{} at t0={t0}: active={} satisfied={} inactive={} violated={}",
                rule_node_label(rule, &address),
                quad.active,
                quad.satisfied,
                quad.inactive,
                quad.violated
            )
        }
        ["interesting", rule, node] => {
            let rule: usize = parse_number(rule, "rule")?;
            let table = session.table(rule)?;
            let address = parse_node_address(node)?;
            let times = query::interesting_times(table, &address)
                .map_err(|e| CliError::Input(e.to_string()))?;
            format!(
                "{} interesting times: {times}",
                rule_node_label(rule, &address)
            )
        }
        ["scan", t] => {
            let t: Time = parse_number(t, "t")?;
            let entries = query::scan_globals(&session.tables, t, true)
                .map_err(|e| CliError::Input(e.to_string()))?;
            let mut lines = Vec::new();
            for entry in entries {
                match entry {
                    ScanEntry::Hit(result) => lines.push(result.text),
                    ScanEntry::SkippedNonGlobal { rule } => {
                        lines.push(format!("Rule {rule} skipped: its root is not 'G'"))
                    }
                }
            }
            if lines.is_empty() {
                format!("nothing satisfied at t={t}")
            } else {
                lines.join("\n")
            }
        }
        _ => {
            return Err(CliError::Input(format!(
                "unrecognized command {:?}; try 'help'",
                line.trim()
            )))
        }
    };
    Ok(ReplOutcome::Text(text))
}

fn rule_node_label(rule: usize, address: &NodeAddress) -> String {
    if address.is_root() {
        format!("Rule {rule}")
    } else {
        format!("Rule {rule}.{address}")
    }
}

fn parse_number<T: std::str::FromStr>(word: &str, what: &str) -> Result<T, CliError> {
    word.parse()
        .map_err(|_| CliError::Input(format!("invalid {what} {word:?}")))
}
