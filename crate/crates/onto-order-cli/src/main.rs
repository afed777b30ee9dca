//! `onto-order`: class-order diagnostics over instance-of/subclass-of dumps.
//!
//! One graph load per invocation; every subcommand writes deterministic CSV
//! (or QuickStatements / JSON) to `-o` (default stdout), with progress and
//! ingest statistics on stderr. Exit codes: 0 success, 1 usage error, 2 data
//! error.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::fs;
use std::io::{BufReader, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};

use onto_order::census::{self, ClassDef, ClassSelector};
use onto_order::fixed_order::{self, MetaclassFinding, OrderAssignment, UniversalOrderClasses};
use onto_order::fixes;
use onto_order::graph::OntoGraph;
use onto_order::ids::{EntityId, RawEdge};
use onto_order::ingest::{self, InputFormat};
use onto_order::loops::{self, LoopKind, LoopRecord};
use onto_order::min_order;
use onto_order::reports::{self, ReportMeta, ReportTable, ResultSet};
use onto_order::split_order::{self, SplitPair};

#[derive(Parser)]
#[command(
    name = "onto-order",
    version,
    about = "Detect class-order problems in instance-of/subclass-of ontologies",
    disable_help_subcommand = true
)]
struct Cli {
    /// Worker threads (default: available cores; env ONTO_ORDER_THREADS).
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Count classes under the four definitions.
    Census(CensusArgs),
    /// Derive fixed orders, conflicts, and metaclass findings.
    Orders(OrdersArgs),
    /// Minimum-order level sets from instance chains.
    MinOrder(MinOrderArgs),
    /// Split-order pair detection, exclusion, histogram.
    SplitOrder(SplitOrderArgs),
    /// Instance-loop detection and affected classes.
    Loops(LoopsArgs),
    /// QuickStatements batch proposals from a loops report.
    EmitFixes(EmitFixesArgs),
    /// Three-way diff of two result-set files.
    Diff(DiffArgs),
    /// Instance counts per direct subclass of a root class.
    CountBySubclass(CountBySubclassArgs),
    /// Run every analysis off one graph load into an output directory.
    All(AllArgs),
}

#[derive(Args)]
struct InputArgs {
    /// Edge dump to ingest.
    #[arg(short = 'i', long)]
    input: PathBuf,
    /// Input format (default: by extension, `.nt` means N-Triples).
    #[arg(long, value_enum)]
    format: Option<FormatArg>,
}

#[derive(Clone, Copy, ValueEnum)]
enum FormatArg {
    Tsv,
    Nt,
}

#[derive(Args)]
struct OutputArg {
    /// Output path; `-` writes to stdout.
    #[arg(short = 'o', long, default_value = "-")]
    output: String,
}

#[derive(Clone, Copy, ValueEnum)]
enum DefArg {
    Any,
    Instance,
    Subsuper,
    Classclass,
}

impl DefArg {
    fn selector(self) -> ClassSelector {
        match self {
            DefArg::Any => ClassSelector::AnyOf,
            DefArg::Instance => ClassSelector::HasInstance,
            DefArg::Subsuper => ClassSelector::HasSubOrSuper,
            DefArg::Classclass => ClassSelector::InstanceOfClassClass,
        }
    }

    fn as_str(self) -> &'static str {
        match self {
            DefArg::Any => "any",
            DefArg::Instance => "instance",
            DefArg::Subsuper => "subsuper",
            DefArg::Classclass => "classclass",
        }
    }
}

#[derive(Args)]
struct CensusArgs {
    #[command(flatten)]
    input: InputArgs,
    #[command(flatten)]
    out: OutputArg,
    /// Class-of-classes id for the instance-of-class definition.
    #[arg(long, default_value = "Q16889133")]
    class_class: EntityId,
}

#[derive(Args)]
struct OrdersArgs {
    #[command(flatten)]
    input: InputArgs,
    #[command(flatten)]
    out: OutputArg,
    /// Universal-class override, TSV `order<TAB>Qid`.
    #[arg(long)]
    seeds: Option<PathBuf>,
    /// Only entities with two or more derived orders.
    #[arg(long)]
    conflicts_only: bool,
    /// Metaclass statements to check, TSV `Qs<TAB>P2445|P8225<TAB>Qo`.
    #[arg(long)]
    metaclass_edges: Option<PathBuf>,
    /// Where the metaclass findings CSV goes (required with
    /// --metaclass-edges).
    #[arg(long, requires = "metaclass_edges")]
    metaclass_out: Option<String>,
}

#[derive(Args)]
struct MinOrderArgs {
    #[command(flatten)]
    input: InputArgs,
    #[command(flatten)]
    out: OutputArg,
    /// Class definition for level 1.
    #[arg(long, value_enum, default_value = "any")]
    def: DefArg,
    /// Deepest level to compute.
    #[arg(long, default_value_t = 6)]
    max_level: usize,
    /// Dump the members of one level instead of the counts.
    #[arg(long)]
    members: Option<usize>,
    #[arg(long, default_value = "Q16889133")]
    class_class: EntityId,
}

#[derive(Args)]
struct SplitOrderArgs {
    #[command(flatten)]
    input: InputArgs,
    #[command(flatten)]
    out: OutputArg,
    /// Emit the raw pair set instead of the reduced one.
    #[arg(long, conflicts_with = "reduced")]
    raw: bool,
    /// Emit the reduced pair set (the default).
    #[arg(long)]
    reduced: bool,
    /// Emit the witness-count histogram per split-order class.
    #[arg(long, conflicts_with_all = ["classes_only"])]
    histogram: bool,
    /// Emit only the distinct split-order classes.
    #[arg(long)]
    classes_only: bool,
    /// Iterate exclusion to a fixed point instead of one pass.
    #[arg(long)]
    exclude_fixpoint: bool,
    /// Spill raw pair enumeration to sorted runs under this directory
    /// (raw output only).
    #[arg(long)]
    spill_dir: Option<PathBuf>,
    /// Pairs held in memory per spill run.
    #[arg(long, default_value_t = 4_000_000, requires = "spill_dir")]
    spill_run_size: usize,
}

#[derive(Args)]
struct LoopsArgs {
    #[command(flatten)]
    input: InputArgs,
    #[command(flatten)]
    out: OutputArg,
    /// Only two-hop (and longer) typing cycles.
    #[arg(long)]
    two_hop: bool,
    /// Only self loops.
    #[arg(long, conflicts_with = "two_hop")]
    self_only: bool,
    /// Two-hop detection on raw P31 edges, without subclass closure.
    #[arg(long)]
    direct_only: bool,
    /// Compute the classes poisoned by the seed entities instead.
    #[arg(long, requires = "seeds")]
    affected: bool,
    /// Seed file for --affected: one Qid per line.
    #[arg(long)]
    seeds: Option<PathBuf>,
    /// Emit only the distinct loop members, one per line (feeds --seeds).
    #[arg(long, conflicts_with = "affected")]
    members_only: bool,
}

#[derive(Args)]
struct EmitFixesArgs {
    /// Loops report (CSV `kind,members,edges`) to break.
    #[arg(long)]
    loops: PathBuf,
    /// Members judged legitimate, one Qid per line; their loops are kept.
    #[arg(long)]
    keep: Option<PathBuf>,
    /// Edge dump for validating that removals exist (optional).
    #[arg(short = 'i', long)]
    input: Option<PathBuf>,
    /// Input format (default: by extension).
    #[arg(long, value_enum)]
    format: Option<FormatArg>,
    #[command(flatten)]
    out: OutputArg,
}

#[derive(Args)]
struct DiffArgs {
    /// Baseline result-set file.
    a: PathBuf,
    /// Comparison result-set file.
    b: PathBuf,
    #[command(flatten)]
    out: OutputArg,
}

#[derive(Args)]
struct CountBySubclassArgs {
    #[command(flatten)]
    input: InputArgs,
    #[command(flatten)]
    out: OutputArg,
    /// Root class whose direct subclasses are tallied.
    #[arg(long)]
    root: EntityId,
}

#[derive(Args)]
struct AllArgs {
    #[command(flatten)]
    input: InputArgs,
    /// Output directory for the CSVs and report envelope.
    #[arg(short = 'o', long)]
    out_dir: PathBuf,
    #[arg(long, value_enum, default_value = "any")]
    def: DefArg,
    #[arg(long, default_value_t = 6)]
    max_level: usize,
    #[arg(long, default_value = "Q16889133")]
    class_class: EntityId,
    /// Universal-class override, TSV `order<TAB>Qid`.
    #[arg(long)]
    seeds: Option<PathBuf>,
    /// Loop members judged legitimate, one Qid per line.
    #[arg(long)]
    keep: Option<PathBuf>,
    /// Record per-stage timings in the envelope (breaks byte determinism).
    #[arg(long)]
    timings: bool,
}

enum CliError {
    Usage(String),
    Data(String),
}

impl CliError {
    fn code(&self) -> u8 {
        match self {
            CliError::Usage(_) => 1,
            CliError::Data(_) => 2,
        }
    }

    fn message(&self) -> &str {
        match self {
            CliError::Usage(m) | CliError::Data(m) => m,
        }
    }
}

fn data_err<E: std::fmt::Display>(context: &str) -> impl Fn(E) -> CliError + '_ {
    move |e| CliError::Data(format!("{context}: {e}"))
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            // Help and version are successful exits; bad usage is code 1.
            if e.use_stderr() {
                eprint!("{e}");
                return ExitCode::from(1);
            }
            print!("{e}");
            return ExitCode::SUCCESS;
        }
    };

    init_threads(cli.threads);

    let result = match cli.cmd {
        Cmd::Census(args) => run_census(args),
        Cmd::Orders(args) => run_orders(args),
        Cmd::MinOrder(args) => run_min_order(args),
        Cmd::SplitOrder(args) => run_split_order(args),
        Cmd::Loops(args) => run_loops(args),
        Cmd::EmitFixes(args) => run_emit_fixes(args),
        Cmd::Diff(args) => run_diff(args),
        Cmd::CountBySubclass(args) => run_count_by_subclass(args),
        Cmd::All(args) => run_all(args),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("onto-order: {}", e.message());
            ExitCode::from(e.code())
        }
    }
}

#[cfg(feature = "parallel")]
fn init_threads(flag: Option<usize>) {
    let threads = flag.or_else(|| {
        std::env::var("ONTO_ORDER_THREADS")
            .ok()
            .and_then(|v| v.parse().ok())
    });
    if let Some(n) = threads {
        let _ = rayon::ThreadPoolBuilder::new()
            .num_threads(n.max(1))
            .build_global();
    }
}

#[cfg(not(feature = "parallel"))]
fn init_threads(_flag: Option<usize>) {}

fn detect_format(path: &Path, flag: Option<FormatArg>) -> InputFormat {
    match flag {
        Some(FormatArg::Tsv) => InputFormat::Tsv,
        Some(FormatArg::Nt) => InputFormat::NTriples,
        None => match path.extension().and_then(|e| e.to_str()) {
            Some("nt") | Some("ntriples") => InputFormat::NTriples,
            _ => InputFormat::Tsv,
        },
    }
}

struct Loaded {
    graph: OntoGraph,
    input_digest: String,
}

fn load_graph(input: &Path, format: Option<FormatArg>) -> Result<Loaded, CliError> {
    let format = detect_format(input, format);
    let bytes = fs::read(input).map_err(data_err(&format!("reading {}", input.display())))?;
    let input_digest = format!("fnv1a64:{:016x}", onto_order::fnv1a64(&bytes));
    let parsed = ingest::parse_edge_file(BufReader::new(&bytes[..]), format)
        .map_err(data_err("parsing input"))?;
    eprintln!(
        "ingest: {} lines read, {} skipped, {} edges",
        parsed.stats.lines_read,
        parsed.stats.lines_skipped,
        parsed.edges.len()
    );
    let graph = OntoGraph::build(&parsed.edges, &parsed.labels);
    eprintln!("graph: {} entities", graph.n_entities());
    Ok(Loaded { graph, input_digest })
}

fn write_output(target: &str, bytes: &[u8]) -> Result<(), CliError> {
    if target == "-" {
        std::io::stdout()
            .write_all(bytes)
            .map_err(data_err("writing stdout"))
    } else {
        fs::write(target, bytes).map_err(data_err(&format!("writing {target}")))
    }
}

fn label_of(g: &OntoGraph, e: EntityId) -> String {
    g.label(e).unwrap_or_default().to_owned()
}

fn read_to_string(path: &Path) -> Result<String, CliError> {
    fs::read_to_string(path).map_err(data_err(&format!("reading {}", path.display())))
}

fn load_seeds(path: Option<&PathBuf>) -> Result<UniversalOrderClasses, CliError> {
    match path {
        None => Ok(UniversalOrderClasses::default()),
        Some(p) => {
            UniversalOrderClasses::from_tsv(&read_to_string(p)?).map_err(data_err("parsing seeds"))
        }
    }
}

fn load_id_list(path: &Path) -> Result<Vec<EntityId>, CliError> {
    Ok(ResultSet::from_lines("ids", &read_to_string(path)?)
        .ids()
        .to_vec())
}

// ---- table builders shared by the subcommands and `all` ----

fn census_table(g: &OntoGraph, class_class: EntityId) -> ReportTable {
    let counts = census::census_counts(g, class_class);
    let mut t = ReportTable::new("census", &["definition", "count"]);
    for (name, count) in [
        ("instance", counts.has_instance),
        ("subsuper", counts.has_sub_or_super),
        ("classclass", counts.instance_of_class_class),
        ("any", counts.any_of),
    ] {
        t.push_row(vec![name.to_owned(), count.to_string()]);
    }
    t
}

fn orders_table(a: &OrderAssignment, conflicts_only: bool) -> ReportTable {
    let mut t = ReportTable::new("orders", &["entity", "orders", "witness"]);
    let rows: Vec<(EntityId, fixed_order::OrderSet)> = if conflicts_only {
        fixed_order::order_conflicts(a)
    } else {
        a.entries()
    };
    for (e, set) in rows {
        let witnesses: Vec<String> = set
            .iter()
            .map(|k| match a.witness(e, k) {
                Some(w) => w.to_string(),
                None => String::new(),
            })
            .collect();
        t.push_row(vec![e.to_string(), set.to_string(), witnesses.join(";")]);
    }
    t
}

fn metaclass_table(findings: &[MetaclassFinding]) -> ReportTable {
    let mut t = ReportTable::new(
        "metaclass",
        &[
            "subject",
            "property",
            "object",
            "status",
            "expected",
            "subject_orders",
            "object_orders",
        ],
    );
    for f in findings {
        t.push_row(vec![
            f.edge.subject.to_string(),
            f.edge.property.to_string(),
            f.edge.object.to_string(),
            f.status.to_string(),
            f.expected.to_owned(),
            f.subject_orders.to_string(),
            f.object_orders.to_string(),
        ]);
    }
    t
}

fn min_order_table(levels: &min_order::MinOrderLevels) -> ReportTable {
    let mut t = ReportTable::new("min-order", &["level", "count"]);
    for (i, count) in levels.counts().iter().enumerate() {
        t.push_row(vec![(i + 1).to_string(), count.to_string()]);
    }
    t
}

fn split_pairs_table(pairs: &[SplitPair], name: &str) -> ReportTable {
    let mut t = ReportTable::new(name, &["c", "s", "case"]);
    for p in pairs {
        t.push_row(vec![
            p.c.to_string(),
            p.s.to_string(),
            p.case.as_str().to_owned(),
        ]);
    }
    t
}

fn split_classes_table(g: &OntoGraph, pairs: &[SplitPair]) -> ReportTable {
    let mut t = ReportTable::new("split-classes", &["class", "label"]);
    for s in split_order::split_classes(pairs) {
        t.push_row(vec![s.to_string(), label_of(g, s)]);
    }
    t
}

fn split_histogram_table(g: &OntoGraph, pairs: &[SplitPair]) -> ReportTable {
    let mut t = ReportTable::new(
        "split-histogram",
        &["cumulative", "count", "classId", "label", "samples"],
    );
    for row in split_order::split_histogram(pairs) {
        let samples: Vec<String> = row.samples.iter().map(|c| c.to_string()).collect();
        t.push_row(vec![
            row.cumulative.to_string(),
            row.count.to_string(),
            row.class.to_string(),
            label_of(g, row.class),
            samples.join(";"),
        ]);
    }
    t
}

fn loops_table(records: &[LoopRecord]) -> ReportTable {
    let mut t = ReportTable::new("loops", &["kind", "members", "edges"]);
    for rec in records {
        let members: Vec<String> = rec.members.iter().map(|m| m.to_string()).collect();
        let edges: Vec<String> = rec.edges.iter().map(|e| e.to_string()).collect();
        t.push_row(vec![
            rec.kind.as_str().to_owned(),
            members.join(";"),
            edges.join(";"),
        ]);
    }
    t
}

fn affected_table(g: &OntoGraph, affected: &[EntityId]) -> ReportTable {
    let mut t = ReportTable::new("affected", &["class", "label"]);
    for &e in affected {
        t.push_row(vec![e.to_string(), label_of(g, e)]);
    }
    t
}

fn count_by_subclass_table(g: &OntoGraph, root: EntityId) -> Result<ReportTable, CliError> {
    let rows = census::count_by_subclass(g, root).map_err(data_err("count-by-subclass"))?;
    let mut t = ReportTable::new("count-by-subclass", &["count", "subclass", "label"]);
    for r in rows {
        t.push_row(vec![
            r.count.to_string(),
            r.subclass.to_string(),
            label_of(g, r.subclass),
        ]);
    }
    Ok(t)
}

fn all_loop_records(g: &OntoGraph, direct_only: bool) -> Vec<LoopRecord> {
    let mut records = loops::find_self_loops(g);
    records.extend(two_hop_records(g, direct_only));
    records
}

fn two_hop_records(g: &OntoGraph, direct_only: bool) -> Vec<LoopRecord> {
    let mut records = if direct_only {
        loops::find_two_hop_loops_direct(g)
    } else {
        loops::find_two_hop_loops(g)
    };
    records.extend(loops::find_longer_loops(g));
    records
}

// ---- subcommands ----

fn run_census(args: CensusArgs) -> Result<(), CliError> {
    let loaded = load_graph(&args.input.input, args.input.format)?;
    let table = census_table(&loaded.graph, args.class_class);
    write_output(&args.out.output, table.to_csv().as_bytes())
}

fn run_orders(args: OrdersArgs) -> Result<(), CliError> {
    let loaded = load_graph(&args.input.input, args.input.format)?;
    let seeds = load_seeds(args.seeds.as_ref())?;
    let assignment = fixed_order::derive_orders(&loaded.graph, &seeds);
    eprintln!("orders: {} entities assigned", assignment.len());

    if let Some(metaclass_path) = &args.metaclass_edges {
        let edges = fixed_order::parse_metaclass_tsv(&read_to_string(metaclass_path)?)
            .map_err(data_err("parsing metaclass edges"))?;
        let findings = fixed_order::check_metaclass_edges(&loaded.graph, &assignment, &edges);
        let out = args
            .metaclass_out
            .as_deref()
            .ok_or_else(|| CliError::Usage("--metaclass-edges requires --metaclass-out".into()))?;
        write_output(out, metaclass_table(&findings).to_csv().as_bytes())?;
    }

    let table = orders_table(&assignment, args.conflicts_only);
    write_output(&args.out.output, table.to_csv().as_bytes())
}

fn run_min_order(args: MinOrderArgs) -> Result<(), CliError> {
    let loaded = load_graph(&args.input.input, args.input.format)?;
    let def = ClassDef::with_class_class(args.def.selector(), args.class_class);
    let levels = min_order::min_order_levels(&loaded.graph, def, args.max_level)
        .map_err(|e| CliError::Usage(e.to_string()))?;
    match args.members {
        None => write_output(
            &args.out.output,
            min_order_table(&levels).to_csv().as_bytes(),
        ),
        Some(level) => {
            if level < 1 || level > levels.max_level() {
                return Err(CliError::Usage(format!(
                    "--members level must be within 1..={}",
                    levels.max_level()
                )));
            }
            // Entity first so the dump feeds straight into `diff`.
            let mut t = ReportTable::new("min-order-members", &["entity", "level", "label"]);
            for &e in levels.level(level) {
                t.push_row(vec![
                    e.to_string(),
                    level.to_string(),
                    label_of(&loaded.graph, e),
                ]);
            }
            write_output(&args.out.output, t.to_csv().as_bytes())
        }
    }
}

fn run_split_order(args: SplitOrderArgs) -> Result<(), CliError> {
    let loaded = load_graph(&args.input.input, args.input.format)?;
    let g = &loaded.graph;

    if let Some(dir) = &args.spill_dir {
        if !args.raw {
            return Err(CliError::Usage(
                "--spill-dir streams the raw pair set; pass --raw".into(),
            ));
        }
        let spilled = split_order::spill::split_pairs_raw_spilled(g, dir, args.spill_run_size)
            .map_err(data_err("spilling pairs"))?;
        eprintln!(
            "split-order: {} raw pairs in {} runs",
            spilled.total_pairs(),
            spilled.run_count()
        );
        let mut csv = String::from("c,s,case\n");
        for pair in spilled.iter().map_err(data_err("merging runs"))? {
            let p = pair.map_err(data_err("merging runs"))?;
            let _ = writeln!(csv, "{},{},{}", p.c, p.s, p.case.as_str());
        }
        return write_output(&args.out.output, csv.as_bytes());
    }

    let raw = split_order::split_pairs_raw(g);
    eprintln!("split-order: {} raw pairs", raw.len());
    let pairs = if args.raw {
        raw
    } else if args.exclude_fixpoint {
        split_order::split_reduced_fixpoint(g, &raw).0
    } else {
        split_order::split_reduced(g, &raw).0
    };

    let table = if args.histogram {
        split_histogram_table(g, &pairs)
    } else if args.classes_only {
        split_classes_table(g, &pairs)
    } else {
        split_pairs_table(&pairs, "split-pairs")
    };
    write_output(&args.out.output, table.to_csv().as_bytes())
}

fn run_loops(args: LoopsArgs) -> Result<(), CliError> {
    let loaded = load_graph(&args.input.input, args.input.format)?;
    let g = &loaded.graph;

    if args.affected {
        let seeds = load_id_list(args.seeds.as_ref().expect("clap enforces --seeds"))?;
        let affected =
            loops::loop_affected_classes(g, &seeds).map_err(data_err("affected classes"))?;
        return write_output(
            &args.out.output,
            affected_table(g, &affected).to_csv().as_bytes(),
        );
    }

    let records = if args.two_hop {
        two_hop_records(g, args.direct_only)
    } else if args.self_only {
        loops::find_self_loops(g)
    } else {
        all_loop_records(g, args.direct_only)
    };
    eprintln!("loops: {} records", records.len());
    if args.members_only {
        let mut members: Vec<EntityId> = records
            .iter()
            .flat_map(|r| r.members.iter().copied())
            .collect();
        members.sort_unstable();
        members.dedup();
        let mut out = String::from("member\n");
        for m in members {
            let _ = writeln!(out, "{m}");
        }
        return write_output(&args.out.output, out.as_bytes());
    }
    write_output(&args.out.output, loops_table(&records).to_csv().as_bytes())
}

/// Parses a loops report back into records.
fn parse_loops_csv(text: &str) -> Result<Vec<LoopRecord>, CliError> {
    let mut records = Vec::new();
    for (i, line) in text.lines().enumerate() {
        if i == 0 || line.trim().is_empty() {
            continue;
        }
        let parsed = (|| {
            let mut fields = line.split(',');
            let kind = LoopKind::from_name(fields.next()?)?;
            let members: Option<Vec<EntityId>> =
                fields.next()?.split(';').map(|m| m.parse().ok()).collect();
            let edges: Option<Vec<RawEdge>> =
                fields.next()?.split(';').map(parse_edge_token).collect();
            if fields.next().is_some() {
                return None;
            }
            Some(LoopRecord {
                kind,
                members: members?,
                edges: edges?,
            })
        })();
        match parsed {
            Some(rec) => records.push(rec),
            None => {
                return Err(CliError::Data(format!(
                    "malformed loops report line {}: `{line}`",
                    i + 1
                )))
            }
        }
    }
    Ok(records)
}

fn parse_edge_token(token: &str) -> Option<RawEdge> {
    let mut parts = token.split(' ');
    let subject: EntityId = parts.next()?.parse().ok()?;
    let kind = match parts.next()? {
        "P31" => onto_order::ids::EdgeKind::InstanceOf,
        "P279" => onto_order::ids::EdgeKind::SubclassOf,
        _ => return None,
    };
    let object: EntityId = parts.next()?.parse().ok()?;
    if parts.next().is_some() {
        return None;
    }
    Some(RawEdge::new(subject, kind, object))
}

fn run_emit_fixes(args: EmitFixesArgs) -> Result<(), CliError> {
    let records = parse_loops_csv(&read_to_string(&args.loops)?)?;
    let keep = match &args.keep {
        Some(path) => load_id_list(path)?,
        None => Vec::new(),
    };
    let statements = match &args.input {
        Some(input) => {
            let loaded = load_graph(input, args.format)?;
            fixes::propose_loop_breaks(&loaded.graph, &records, &keep)
        }
        None => fixes::propose_loop_breaks_unchecked(&records, &keep),
    };
    eprintln!("emit-fixes: {} statements", statements.len());
    write_output(
        &args.out.output,
        fixes::emit_quickstatements(&statements).as_bytes(),
    )
}

fn run_diff(args: DiffArgs) -> Result<(), CliError> {
    let a = ResultSet::from_lines("a", &read_to_string(&args.a)?);
    let b = ResultSet::from_lines("b", &read_to_string(&args.b)?);
    let d = reports::diff_sets(&a, &b);
    eprintln!(
        "diff: {} only in {}, {} only in {}, {} in both",
        d.only_a.len(),
        args.a.display(),
        d.only_b.len(),
        args.b.display(),
        d.both.len()
    );
    let mut t = ReportTable::new("diff", &["which", "entity"]);
    for (which, ids) in [
        ("only_a", &d.only_a),
        ("only_b", &d.only_b),
        ("both", &d.both),
    ] {
        for e in ids {
            t.push_row(vec![which.to_owned(), e.to_string()]);
        }
    }
    write_output(&args.out.output, t.to_csv().as_bytes())
}

fn run_count_by_subclass(args: CountBySubclassArgs) -> Result<(), CliError> {
    let loaded = load_graph(&args.input.input, args.input.format)?;
    let table = count_by_subclass_table(&loaded.graph, args.root)?;
    write_output(&args.out.output, table.to_csv().as_bytes())
}

fn run_all(args: AllArgs) -> Result<(), CliError> {
    fs::create_dir_all(&args.out_dir)
        .map_err(data_err(&format!("creating {}", args.out_dir.display())))?;
    let mut timings: BTreeMap<String, u64> = BTreeMap::new();
    let mut mark = Instant::now();
    let stage = |name: &str, timings: &mut BTreeMap<String, u64>, mark: &mut Instant| {
        timings.insert(name.to_owned(), mark.elapsed().as_millis() as u64);
        eprintln!("all: {name} done");
        *mark = Instant::now();
    };

    let loaded = load_graph(&args.input.input, args.input.format)?;
    let g = &loaded.graph;
    let seeds = load_seeds(args.seeds.as_ref())?;
    let keep = match &args.keep {
        Some(path) => load_id_list(path)?,
        None => Vec::new(),
    };
    stage("ingest", &mut timings, &mut mark);

    let census = census_table(g, args.class_class);
    stage("census", &mut timings, &mut mark);

    let assignment = fixed_order::derive_orders(g, &seeds);
    let orders = orders_table(&assignment, false);
    let conflicts = {
        let mut table = orders_table(&assignment, true);
        table.name = "order-conflicts".into();
        table
    };
    stage("orders", &mut timings, &mut mark);

    let def = ClassDef::with_class_class(args.def.selector(), args.class_class);
    let levels = min_order::min_order_levels(g, def, args.max_level)
        .map_err(|e| CliError::Usage(e.to_string()))?;
    let min_order_t = min_order_table(&levels);
    stage("min-order", &mut timings, &mut mark);

    let raw = split_order::split_pairs_raw(g);
    let (reduced, _) = split_order::split_reduced(g, &raw);
    let split_pairs = split_pairs_table(&reduced, "split-pairs");
    let split_classes = split_classes_table(g, &reduced);
    let split_hist = split_histogram_table(g, &reduced);
    stage("split-order", &mut timings, &mut mark);

    let records = all_loop_records(g, false);
    let loops_t = loops_table(&records);
    let bad_members: Vec<EntityId> = {
        let keep_set: std::collections::BTreeSet<EntityId> = keep.iter().copied().collect();
        let mut members: Vec<EntityId> = records
            .iter()
            .flat_map(|r| r.members.iter().copied())
            .filter(|m| !keep_set.contains(m))
            .collect();
        members.sort_unstable();
        members.dedup();
        members
    };
    let affected =
        loops::loop_affected_classes(g, &bad_members).map_err(data_err("affected classes"))?;
    let affected_t = affected_table(g, &affected);
    let statements = fixes::propose_loop_breaks(g, &records, &keep);
    let batch = fixes::emit_quickstatements(&statements);
    stage("loops", &mut timings, &mut mark);

    let tables = vec![
        census,
        orders,
        conflicts,
        min_order_t,
        split_pairs,
        split_classes,
        split_hist,
        loops_t,
        affected_t,
    ];
    for table in &tables {
        let path = args.out_dir.join(format!("{}.csv", table.name));
        fs::write(&path, table.to_csv())
            .map_err(data_err(&format!("writing {}", path.display())))?;
    }
    fs::write(args.out_dir.join("fixes.qs"), &batch).map_err(data_err("writing fixes.qs"))?;

    let config = serde_json::json!({
        "input": args.input.input.display().to_string(),
        "def": args.def.as_str(),
        "max_level": args.max_level,
        "class_class": args.class_class.to_string(),
        "seeds": seeds
            .seeds()
            .iter()
            .map(|(k, id)| format!("{k}:{id}"))
            .collect::<Vec<_>>(),
        "keep": keep.iter().map(|e| e.to_string()).collect::<Vec<_>>(),
    });
    let mut meta = ReportMeta {
        input_digest: loaded.input_digest.clone(),
        config,
        timings_ms: None,
    };
    if args.timings {
        meta.timings_ms = Some(timings);
    }
    let report = reports::write_report(&tables, &meta);
    fs::write(args.out_dir.join("report.json"), report).map_err(data_err("writing report.json"))?;
    eprintln!("all: report written to {}", args.out_dir.display());
    Ok(())
}
