//! The `ag` command-line tool: validate annotation tables, convert corpus
//! label files into them, run queries and print segment reports.
//!
//! A graph on disk is a pair of files sharing a base path: `base.arc` and
//! `base.time`. Commands accept the base path or either file. All results
//! go to standard output, diagnostics to standard error. Exit codes: 0 on
//! success, 1 when data is at fault (validation violations, conversion
//! failures, evaluation problems), 2 for usage errors and unreadable
//! files.

use std::collections::BTreeSet;
use std::fmt::Write as _;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};

use ag_core::ingest::{
    self, align_syntax, apply_eq_classes, combine_layers, parse_arc_rows, parse_class_file,
    parse_time_rows, parse_treebank, read_end_time_labels, read_point_events,
    read_start_end_labels, strip_decorations, write_native, Layer,
};
use ag_core::{
    emit_csv, emit_emu, eval_example_suite, eval_query, graph::validate_tables, group_report,
    parse_query, segment_table, AnnotationGraph, Config, MatchSet, SuiteResult,
};

#[derive(Parser)]
#[command(
    name = "ag",
    about = "Annotation graphs: validation, conversion, query and reports",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct CommonArgs {
    /// Configuration file (hierarchy, rules, classes, levels).
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Sample rate in Hz; overrides the configuration default.
    #[arg(long, global = true, value_parser = clap::value_parser!(u32).range(1..))]
    rate: Option<u32>,
    /// Utterance id; defaults to the graph file's base name.
    #[arg(long, global = true)]
    utterance: Option<String>,
}

#[derive(Subcommand)]
enum Command {
    /// Check annotation tables against the well-formedness conditions.
    Validate {
        /// Graph base paths (or .arc/.time files).
        #[arg(required = true)]
        graphs: Vec<String>,
        #[command(flatten)]
        common: CommonArgs,
    },
    /// Convert corpus label files into a native table pair.
    Convert {
        /// Typed inputs: native:PATH, end-time:LABEL:PATH,
        /// point-event:LABEL:PATH, start-end:LABEL:PATH, treebank:PATH.
        #[arg(long = "in", required = true)]
        inputs: Vec<String>,
        /// Output base path; writes OUT.arc and OUT.time.
        #[arg(short, long)]
        output: String,
        /// Unify equal-time boundary nodes across layers.
        #[arg(long)]
        merge_boundaries: bool,
        /// Sidecar file assigning equivalence classes to arcs
        /// (`<selector> <class>` per line; selectors: id:N, TYPE:CONTENT,
        /// TYPE:CONTENT:K).
        #[arg(long)]
        classes: Option<PathBuf>,
        /// Case-fold and strip trailing punctuation when aligning tree
        /// leaves against words.
        #[arg(long)]
        normalize_leaves: bool,
        #[command(flatten)]
        common: CommonArgs,
    },
    /// Evaluate a query and print a segment table.
    Query {
        /// Graph base path (or .arc/.time file).
        graph: String,
        /// Query text, e.g. "[Phoneme=vowel -> Phoneme=stop]".
        query: String,
        /// Output format.
        #[arg(long, value_enum, default_value_t = Format::Emu)]
        format: Format,
        /// Emit one table per distinct arc bound to this term index.
        #[arg(long)]
        group: Option<usize>,
        /// Dump each match as an arc-relation table instead of a report.
        #[arg(long)]
        subgraphs: bool,
        /// Database name for the table header; defaults to the graph
        /// file's base name.
        #[arg(long)]
        database: Option<String>,
        #[command(flatten)]
        common: CommonArgs,
    },
    /// Run the built-in example queries and print their results.
    Examples {
        /// Graph base path (or .arc/.time file).
        graph: String,
        /// Database name for table headers.
        #[arg(long)]
        database: Option<String>,
        #[command(flatten)]
        common: CommonArgs,
    },
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Emu,
    Csv,
}

/// A command failure carrying its exit code.
enum Failure {
    /// Broken input data: exit 1.
    Data(String),
    /// Unusable invocation or unreadable file: exit 2.
    Usage(String),
}

impl Failure {
    fn code(&self) -> i32 {
        match self {
            Failure::Data(_) => 1,
            Failure::Usage(_) => 2,
        }
    }

    fn message(&self) -> &str {
        match self {
            Failure::Data(m) | Failure::Usage(m) => m,
        }
    }
}

type CmdResult = Result<(), Failure>;

/// Runs the tool with explicit streams; returns the exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let rendered = e.render().to_string();
            return match e.kind() {
                clap::error::ErrorKind::DisplayHelp | clap::error::ErrorKind::DisplayVersion => {
                    let _ = write!(out, "{rendered}");
                    0
                }
                _ => {
                    let _ = write!(err, "{rendered}");
                    2
                }
            };
        }
    };
    let result = match cli.command {
        Command::Validate { graphs, common } => cmd_validate(&graphs, &common, out, err),
        Command::Convert {
            inputs,
            output,
            merge_boundaries,
            classes,
            normalize_leaves,
            common,
        } => cmd_convert(
            &inputs,
            &output,
            merge_boundaries,
            classes.as_deref(),
            normalize_leaves,
            &common,
        ),
        Command::Query {
            graph,
            query,
            format,
            group,
            subgraphs,
            database,
            common,
        } => cmd_query(
            &graph,
            &query,
            format,
            group,
            subgraphs,
            database.as_deref(),
            &common,
            out,
            err,
        ),
        Command::Examples {
            graph,
            database,
            common,
        } => cmd_examples(&graph, database.as_deref(), &common, out),
    };
    match result {
        Ok(()) => 0,
        Err(failure) => {
            let _ = writeln!(err, "error: {}", failure.message());
            failure.code()
        }
    }
}

fn load_config(common: &CommonArgs) -> Result<Config, Failure> {
    match &common.config {
        None => Ok(Config::default()),
        Some(path) => {
            let text = read_file(path)?;
            Config::parse(&text).map_err(|e| Failure::Data(format!("{}: {e}", path.display())))
        }
    }
}

fn read_file(path: &Path) -> Result<String, Failure> {
    std::fs::read_to_string(path)
        .map_err(|e| Failure::Usage(format!("cannot read {}: {e}", path.display())))
}

/// Resolves a graph argument to its `.arc`/`.time` pair.
fn graph_paths(arg: &str) -> (PathBuf, PathBuf) {
    let path = Path::new(arg);
    match path.extension().and_then(|e| e.to_str()) {
        Some("arc") => (path.to_path_buf(), path.with_extension("time")),
        Some("time") => (path.with_extension("arc"), path.to_path_buf()),
        _ => (
            PathBuf::from(format!("{arg}.arc")),
            PathBuf::from(format!("{arg}.time")),
        ),
    }
}

fn base_name(arg: &str) -> String {
    let (arc_path, _) = graph_paths(arg);
    arc_path
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| arg.to_string())
}

fn load_graph(arg: &str, config: &Config, common: &CommonArgs) -> Result<AnnotationGraph, Failure> {
    let (arc_path, time_path) = graph_paths(arg);
    let arc_text = read_file(&arc_path)?;
    let time_text = read_file(&time_path)?;
    let rate = common.rate.unwrap_or(config.sample_rate);
    let utterance = common.utterance.clone().unwrap_or_else(|| base_name(arg));
    ingest::read_native(&arc_text, &time_text, rate, &utterance)
        .map_err(|e| Failure::Data(format!("{arg}: {e}")))
}

fn cmd_validate(
    graphs: &[String],
    _common: &CommonArgs,
    out: &mut dyn Write,
    err: &mut dyn Write,
) -> CmdResult {
    // Load file contents up front so IO problems take precedence, then
    // validate the graphs concurrently, reporting in input order.
    let mut texts = Vec::new();
    for arg in graphs {
        let (arc_path, time_path) = graph_paths(arg);
        texts.push((arg, read_file(&arc_path)?, read_file(&time_path)?));
    }

    let reports: Vec<Result<String, String>> = std::thread::scope(|scope| {
        let handles: Vec<_> = texts
            .iter()
            .map(|(arg, arc_text, time_text)| {
                scope.spawn(move || validate_one(arg, arc_text, time_text))
            })
            .collect();
        handles.into_iter().map(|h| h.join().unwrap()).collect()
    });

    let mut clean = true;
    for report in reports {
        match report {
            Ok(line) => {
                let _ = writeln!(out, "{line}");
            }
            Err(diagnostics) => {
                clean = false;
                let _ = writeln!(err, "{diagnostics}");
            }
        }
    }
    if clean {
        Ok(())
    } else {
        Err(Failure::Data("validation failed".to_string()))
    }
}

fn validate_one(arg: &str, arc_text: &str, time_text: &str) -> Result<String, String> {
    let arcs = match parse_arc_rows(arc_text) {
        Ok(arcs) => arcs,
        Err(e) => return Err(format!("{arg}: {e}")),
    };
    let times = match parse_time_rows(time_text) {
        Ok(times) => times,
        Err(e) => return Err(format!("{arg}: {e}")),
    };
    let report = validate_tables(&arcs, &times);
    if report.is_empty() {
        Ok(format!("{arg}: OK"))
    } else {
        let mut text = String::new();
        for v in &report.violations {
            let _ = writeln!(text, "{arg}: {}: {}", v.kind, v.message);
        }
        Err(text.trim_end().to_string())
    }
}

enum InputKind {
    Native(PathBuf),
    EndTime(String, PathBuf),
    PointEvent(String, PathBuf),
    StartEnd(String, PathBuf),
    Treebank(PathBuf),
}

fn parse_input_spec(spec: &str) -> Result<InputKind, Failure> {
    let usage = || {
        Failure::Usage(format!(
            "bad input spec `{spec}`; expected native:PATH, end-time:LABEL:PATH, \
             point-event:LABEL:PATH, start-end:LABEL:PATH or treebank:PATH"
        ))
    };
    let (kind, rest) = spec.split_once(':').ok_or_else(usage)?;
    match kind {
        "native" => Ok(InputKind::Native(PathBuf::from(rest))),
        "treebank" => Ok(InputKind::Treebank(PathBuf::from(rest))),
        "end-time" | "point-event" | "start-end" => {
            let (label, path) = rest.split_once(':').ok_or_else(usage)?;
            if label.is_empty() || path.is_empty() {
                return Err(usage());
            }
            let (label, path) = (label.to_string(), PathBuf::from(path));
            Ok(match kind {
                "end-time" => InputKind::EndTime(label, path),
                "point-event" => InputKind::PointEvent(label, path),
                _ => InputKind::StartEnd(label, path),
            })
        }
        _ => Err(usage()),
    }
}

fn cmd_convert(
    inputs: &[String],
    output: &str,
    merge_boundaries: bool,
    classes: Option<&Path>,
    normalize_leaves: bool,
    common: &CommonArgs,
) -> CmdResult {
    let config = load_config(common)?;
    let rate = common.rate.unwrap_or(config.sample_rate);
    let data = |path: &PathBuf, result: Result<Layer, ingest::IngestError>| {
        result.map_err(|e| Failure::Data(format!("{}: {e}", path.display())))
    };

    let mut layers: Vec<Layer> = Vec::new();
    let mut trees = Vec::new();
    for spec in inputs {
        match parse_input_spec(spec)? {
            InputKind::Native(path) => {
                let (arc_path, time_path) = graph_paths(&path.to_string_lossy());
                let arcs = parse_arc_rows(&read_file(&arc_path)?)
                    .map_err(|e| Failure::Data(format!("{}: {e}", arc_path.display())))?;
                let times = parse_time_rows(&read_file(&time_path)?)
                    .map_err(|e| Failure::Data(format!("{}: {e}", time_path.display())))?;
                layers.push(Layer { arcs, times });
            }
            InputKind::EndTime(label, path) => {
                let text = read_file(&path)?;
                let mut layer = data(&path, read_end_time_labels(&text, &label, rate))?;
                strip_decorations(&mut layer, &config.strip);
                layers.push(layer);
            }
            InputKind::PointEvent(label, path) => {
                let text = read_file(&path)?;
                let mut layer = data(&path, read_point_events(&text, &label, rate))?;
                strip_decorations(&mut layer, &config.strip);
                layers.push(layer);
            }
            InputKind::StartEnd(label, path) => {
                let text = read_file(&path)?;
                let layer = data(&path, read_start_end_labels(&text, &label))?;
                layers.push(layer);
            }
            InputKind::Treebank(path) => {
                let text = read_file(&path)?;
                trees.extend(
                    parse_treebank(&text)
                        .map_err(|e| Failure::Data(format!("{}: {e}", path.display())))?,
                );
            }
        }
    }

    let combined = combine_layers(&layers, merge_boundaries);
    let utterance = common
        .utterance
        .clone()
        .unwrap_or_else(|| base_name(output));
    let mut graph = AnnotationGraph::build(combined.arcs, combined.times, rate, &utterance)
        .map_err(|e| Failure::Data(e.to_string()))?;
    if !trees.is_empty() {
        graph = align_syntax(
            &graph,
            &trees,
            &config.levels.word,
            &config.levels.syntax,
            normalize_leaves,
        )
        .map_err(|e| Failure::Data(e.to_string()))?;
    }
    if let Some(path) = classes {
        let text = read_file(path)?;
        let assignments = parse_class_file(&text)
            .map_err(|e| Failure::Data(format!("{}: {e}", path.display())))?;
        graph = apply_eq_classes(&graph, &assignments)
            .map_err(|e| Failure::Data(format!("{}: {e}", path.display())))?;
    }
    let report = graph.validate();
    if !report.is_empty() {
        return Err(Failure::Data(format!(
            "converted graph is ill-formed:\n{report}"
        )));
    }

    let (arc_text, time_text) = write_native(&graph);
    let (arc_path, time_path) = graph_paths(output);
    std::fs::write(&arc_path, arc_text)
        .map_err(|e| Failure::Usage(format!("cannot write {}: {e}", arc_path.display())))?;
    std::fs::write(&time_path, time_text)
        .map_err(|e| Failure::Usage(format!("cannot write {}: {e}", time_path.display())))?;
    Ok(())
}

#[allow(clippy::too_many_arguments)]
fn cmd_query(
    graph_arg: &str,
    query_text: &str,
    format: Format,
    group: Option<usize>,
    subgraphs: bool,
    database: Option<&str>,
    common: &CommonArgs,
    out: &mut dyn Write,
    err: &mut dyn Write,
) -> CmdResult {
    let config = load_config(common)?;
    let graph = load_graph(graph_arg, &config, common)?;
    let ast = parse_query(query_text).map_err(|e| {
        let column = query_text
            .get(..e.pos)
            .map_or(e.pos, |prefix| prefix.chars().count());
        let mut message = format!("{e}\n  {query_text}\n  ");
        for _ in 0..column {
            message.push(' ');
        }
        message.push('^');
        Failure::Usage(message)
    })?;
    let mut ms = eval_query(&graph, &ast, &config.query);
    // Report the query as the user wrote it.
    ms.query = query_text.to_string();
    let database = database
        .map(str::to_string)
        .unwrap_or_else(|| base_name(graph_arg));

    if subgraphs {
        return dump_subgraphs(&graph, &ms, out);
    }

    let emit = |table: &ag_core::SegmentTable| match format {
        Format::Emu => emit_emu(table),
        Format::Csv => emit_csv(table),
    };
    let tables = match group {
        Some(term) => {
            group_report(&ms, term, &database).map_err(|e| Failure::Data(e.to_string()))?
        }
        None => vec![segment_table(&ms, &database)],
    };
    for (i, table) in tables.iter().enumerate() {
        if i > 0 {
            let _ = writeln!(out);
        }
        let _ = write!(out, "{}", emit(table));
        for skipped in &table.skipped {
            let _ = writeln!(
                err,
                "warning: match {} anchored on arc {} has no times; row skipped",
                skipped.index, skipped.anchor
            );
        }
    }
    Ok(())
}

fn dump_subgraphs(graph: &AnnotationGraph, ms: &MatchSet<'_>, out: &mut dyn Write) -> CmdResult {
    for (i, m) in ms.matches.iter().enumerate() {
        let ids: BTreeSet<_> = m.bindings.iter().copied().collect();
        let table = graph
            .subgraph(&ids)
            .map_err(|e| Failure::Data(e.to_string()))?;
        if i > 0 {
            let _ = writeln!(out);
        }
        let _ = writeln!(out, "# match {}", i + 1);
        for a in &table.arcs {
            let _ = writeln!(
                out,
                "{}\t{}\t{}\t{}\t{}\t{}",
                a.id,
                a.src,
                a.dst,
                a.type_label,
                a.content_label,
                a.eq_class.as_deref().unwrap_or("")
            );
        }
        let _ = writeln!(out, "# times");
        for (node, time) in &table.times {
            let _ = writeln!(out, "{node}\t{time}");
        }
    }
    Ok(())
}

fn cmd_examples(
    graph_arg: &str,
    database: Option<&str>,
    common: &CommonArgs,
    out: &mut dyn Write,
) -> CmdResult {
    let config = load_config(common)?;
    let graph = load_graph(graph_arg, &config, common)?;
    let database = database
        .map(str::to_string)
        .unwrap_or_else(|| base_name(graph_arg));
    let outcomes = eval_example_suite(&graph, &config.query, &config.levels)
        .map_err(|e| Failure::Data(e.to_string()))?;
    for (i, outcome) in outcomes.iter().enumerate() {
        if i > 0 {
            let _ = writeln!(out);
        }
        match &outcome.result {
            SuiteResult::Flat(ms) => {
                let _ = writeln!(out, "{}: {}", outcome.name, plural(ms.len(), "match"));
                let table = segment_table(ms, &database);
                let _ = write!(out, "{}", emit_emu(&table));
            }
            SuiteResult::Grouped(groups) => {
                let _ = writeln!(out, "{}: {}", outcome.name, plural(groups.len(), "group"));
                for (k, group) in groups.iter().enumerate() {
                    let _ = writeln!(out, "group {}: {}", k + 1, plural(group.len(), "match"));
                    let table = segment_table(group, &database);
                    let _ = write!(out, "{}", emit_emu(&table));
                }
            }
        }
    }
    Ok(())
}

fn plural(n: usize, noun: &str) -> String {
    if n == 1 {
        format!("1 {noun}")
    } else {
        format!(
            "{n} {noun}{}",
            if noun.ends_with("ch") { "es" } else { "s" }
        )
    }
}
