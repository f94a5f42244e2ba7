mod input;

use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::{Duration, Instant};

use clap::{Parser, Subcommand, ValueEnum};
use input::{load_operand, usage, CliError, Degrees, Input, Loaded, OrderRange};
use lrgraph::analyze::verify_structure;
use lrgraph::dot::write_dot;
use lrgraph::families::{catalog, gap_check, table_family, CatalogQuery, TableFamilySpec};
use lrgraph::graph6::write_graph6;
use lrgraph::refine::{distinguishing_iteration, run_colour_refinement, Distinguishing};
use lrgraph::search::{cross_validate, enumerate, find_long_refinement, Budget, DegreeFilter, Found, SearchError, SearchSpec};
use lrgraph::strings::{construct, extract_string, parse, realize, Family, RealizeError};
use lrgraph::Graph;
use serde_json::json;

#[derive(Parser, Debug)]
#[command(name = "lr", version, about = "Colour Refinement traces and long-refinement graphs")]
struct Cli {
    /// Output format; each command has its own default
    #[arg(long, global = true, value_enum)]
    format: Option<Format>,
    /// Worker threads for search
    #[arg(long, global = true, env = "LR_THREADS")]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
enum Format {
    Json,
    Graph6,
    Dot,
    Table,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Run Colour Refinement and report the iteration number
    Refine {
        #[command(flatten)]
        input: Input,
        /// Print the full trace, one JSON record per iteration
        #[arg(long, short)]
        verbose: bool,
    },
    /// Evaluate the ten structural checks on the refinement trace
    Analyze {
        #[command(flatten)]
        input: Input,
    },
    /// First iteration at which Colour Refinement tells two graphs apart.
    /// Operands are graph6, `-`, `file:PATH`, `string:TEXT` or `g6:TEXT`
    Distinguish {
        g: String,
        h: String,
        /// Exit with status 4 if the graphs are first distinguished at iteration max(|G|,|H|) - 1
        #[arg(long)]
        assert_not_last: bool,
    },
    /// Long-refinement strings
    #[command(subcommand)]
    String(StringCommand),
    /// Graphs of the {3,4} table families
    Family {
        #[arg(long)]
        table: u8,
        #[arg(long, default_value_t = 1)]
        variant: u8,
        #[arg(long)]
        k: usize,
    },
    /// Known long-refinement graphs in an order range
    Catalog {
        /// Inclusive order range A..B
        #[arg(long, default_value = "1..40")]
        order: OrderRange,
        /// Exact degree set, e.g. 2,3
        #[arg(long)]
        degrees: Option<Degrees>,
        /// Write provenance JSON to this file
        #[arg(long)]
        sidecar: Option<PathBuf>,
        /// Directory with transcribed sporadic graphs (<id>.g6)
        #[arg(long)]
        sporadic_dir: Option<PathBuf>,
    },
    /// Exhaustive search for long-refinement graphs
    Search(SearchArgs),
    /// Orders without a known long-refinement graph
    GapCheck {
        #[arg(long, default_value_t = 60)]
        max: usize,
        #[arg(long, default_value = "2,3")]
        degrees: Degrees,
    },
}

#[derive(Subcommand, Debug)]
enum StringCommand {
    /// Build the graph of a string and verify it
    Realize { text: String },
    /// Recover the string of a {2,3} long-refinement graph
    Extract {
        #[command(flatten)]
        input: Input,
    },
    /// Expand a string family at parameter k
    Family {
        id: String,
        #[arg(long)]
        k: usize,
    },
}

#[derive(clap::Args, Debug)]
struct SearchArgs {
    /// Order of the graphs
    #[arg(long, conflicts_with = "order")]
    n: Option<usize>,
    /// Inclusive order range A..B
    #[arg(long)]
    order: Option<OrderRange>,
    #[arg(long)]
    degrees: Degrees,
    /// Which degree sets are kept
    #[arg(long, value_enum, default_value_t = FilterArg::Two)]
    filter: FilterArg,
    /// Include disconnected graphs
    #[arg(long)]
    disconnected: bool,
    /// Emit every graph, not only long-refinement ones
    #[arg(long)]
    all: bool,
    /// Compare against the catalog instead of listing graphs
    #[arg(long, conflicts_with_all = ["all", "disconnected", "filter"])]
    cross_validate: bool,
    /// Stop after this many search nodes
    #[arg(long)]
    max_nodes: Option<u64>,
    /// Stop after this many seconds
    #[arg(long)]
    max_seconds: Option<f64>,
}

#[derive(ValueEnum, Debug, Clone, Copy)]
enum FilterArg {
    /// Exactly two distinct degrees, both listed
    Two,
    /// Degrees among those listed
    Subset,
    /// Only the maximum listed degree bounds the search
    Max,
}

fn emit(text: &str) -> Result<(), CliError> {
    let mut out = std::io::stdout().lock();
    out.write_all(text.as_bytes()).and_then(|_| out.flush()).map_err(|e| CliError::Io(format!("stdout: {e}")))
}

fn emit_line(text: impl std::fmt::Display) -> Result<(), CliError> {
    emit(&format!("{text}\n"))
}

fn unsupported(format: Format, cmd: &str) -> CliError {
    usage(format!("{cmd} does not support --format {}", format.to_possible_value().map_or("?".into(), |v| v.get_name().to_string())))
}

fn json_line(v: serde_json::Value) -> Result<(), CliError> {
    emit_line(v)
}

fn pretty(v: &impl serde::Serialize) -> Result<(), CliError> {
    emit_line(serde_json::to_string_pretty(v).map_err(|e| CliError::Io(e.to_string()))?)
}

fn dot(g: &Graph, c: Option<&lrgraph::Colouring>) -> Result<(), CliError> {
    emit(&write_dot(g, c).map_err(usage)?)
}

fn cmd_refine(graphs: Vec<Loaded>, verbose: bool, format: Format) -> Result<(), CliError> {
    for Loaded { label, graph } in graphs {
        let t = run_colour_refinement(&graph);
        let lr = graph.n() >= 1 && t.iteration_number + 1 == graph.n();
        match format {
            Format::Table => {
                emit_line(format!("{label}: n={} iteration_number {} long_refinement={lr}", graph.n(), t.iteration_number))?;
                if verbose {
                    emit(&t.to_json_lines())?;
                }
            }
            Format::Json => {
                let mut v = json!({
                    "input": label,
                    "n": graph.n(),
                    "iteration_number": t.iteration_number,
                    "long_refinement": lr,
                });
                if verbose {
                    v["trace"] = serde_json::to_value(&t).map_err(|e| CliError::Io(e.to_string()))?;
                }
                json_line(v)?;
            }
            Format::Graph6 => emit_line(write_graph6(&graph))?,
            Format::Dot => dot(&graph, Some(t.final_partition()))?,
        }
    }
    Ok(())
}

fn cmd_analyze(graphs: Vec<Loaded>, format: Format) -> Result<(), CliError> {
    for Loaded { label, graph } in graphs {
        let r = verify_structure(&graph);
        match format {
            Format::Table => {
                emit_line(format!("{label}: n={}", graph.n()))?;
                emit(&r.render_table())?;
                let passed = r.checks.iter().filter(|c| c.status != lrgraph::analyze::CheckStatus::Fail && c.status != lrgraph::analyze::CheckStatus::Skipped).count();
                emit_line(format!("{passed}/10 checks passed"))?;
            }
            Format::Json => json_line(json!({ "input": label, "n": graph.n(), "report": r }))?,
            f => return Err(unsupported(f, "analyze")),
        }
    }
    Ok(())
}

fn cmd_distinguish(g: &str, h: &str, assert_not_last: bool, format: Format) -> Result<(), CliError> {
    if g == "-" && h == "-" {
        return Err(usage("stdin can supply only one operand"));
    }
    let (a, b) = (load_operand(g)?, load_operand(h)?);
    let result = distinguishing_iteration(&a.graph, &b.graph);
    match format {
        Format::Table => match result {
            Distinguishing::Iteration(i) => emit_line(i)?,
            Distinguishing::Equivalent => emit_line("equivalent")?,
        },
        Format::Json => json_line(json!({ "g": a.label, "h": b.label, "result": result }))?,
        f => return Err(unsupported(f, "distinguish")),
    }
    let n = a.graph.n().max(b.graph.n());
    // the bound holds from three vertices on
    if assert_not_last && n >= 3 && result == Distinguishing::Iteration(n - 1) {
        return Err(CliError::Assertion(format!("graphs first distinguished at iteration {} = n - 1", n - 1)));
    }
    Ok(())
}

fn cmd_string(cmd: StringCommand, format: Option<Format>) -> Result<(), CliError> {
    match cmd {
        StringCommand::Realize { text } => {
            let s = parse(&text).map_err(|e| usage(format!("string: {e}")))?;
            // a string that builds but is not long-refinement is reported, not rejected
            let (graph, error) = match realize(&s) {
                Ok(r) => (r.graph, None),
                Err(e @ RealizeError::DegreeResidual { .. }) => return Err(usage(format!("{s}: {e}"))),
                Err(e) => (construct(&s).map_err(|e| usage(format!("{s}: {e}")))?.graph, Some(e.to_string())),
            };
            let report = verify_structure(&graph);
            match format.unwrap_or(Format::Table) {
                Format::Table => {
                    emit_line(write_graph6(&graph))?;
                    emit_line(format!("{s}: n={}", graph.n()))?;
                    if let Some(e) = &error {
                        emit_line(format!("not valid: {e}"))?;
                    }
                    emit(&report.render_table())?;
                }
                Format::Json => json_line(json!({
                    "string": s.to_string(),
                    "graph6": write_graph6(&graph),
                    "n": graph.n(),
                    "valid": error.is_none(),
                    "error": error,
                    "report": report,
                }))?,
                Format::Graph6 => emit_line(write_graph6(&graph))?,
                Format::Dot => dot(&graph, None)?,
            }
        }
        StringCommand::Extract { input } => {
            let Loaded { label, graph } = input.load_one()?;
            let s = extract_string(&graph).map_err(|e| usage(format!("{label}: {e}")))?;
            match format.unwrap_or(Format::Table) {
                Format::Table => emit_line(&s)?,
                Format::Json => json_line(json!({ "input": label, "string": s.to_string(), "unicode": s.to_unicode() }))?,
                f => return Err(unsupported(f, "string extract")),
            }
        }
        StringCommand::Family { id, k } => {
            let f = Family::from_id(&id).map_err(usage)?;
            let s = f.expand(k);
            match format.unwrap_or(Format::Table) {
                Format::Table => emit_line(&s)?,
                Format::Json => json_line(json!({ "family": f.id(), "k": k, "string": s.to_string(), "order": s.order() }))?,
                Format::Graph6 => emit_line(write_graph6(&realize(&s).map_err(usage)?.graph))?,
                Format::Dot => dot(&realize(&s).map_err(usage)?.graph, None)?,
            }
        }
    }
    Ok(())
}

fn cmd_family(table: u8, variant: u8, k: usize, format: Format) -> Result<(), CliError> {
    let g = table_family(TableFamilySpec { table, variant, k }).map_err(usage)?;
    match format {
        Format::Graph6 => emit_line(write_graph6(&g)),
        Format::Json => json_line(json!({
            "table": table, "variant": variant, "k": k, "n": g.n(),
            "degrees": g.degree_set(), "graph6": write_graph6(&g),
        })),
        Format::Dot => dot(&g, None),
        Format::Table => emit_line(format!("table {table} variant {variant} k={k}: n={} {}", g.n(), write_graph6(&g))),
    }
}

fn cmd_catalog(
    order: OrderRange,
    degrees: Option<Degrees>,
    sidecar: Option<PathBuf>,
    sporadic_dir: Option<PathBuf>,
    format: Format,
) -> Result<(), CliError> {
    let mut q = CatalogQuery::new(order.lo, order.hi);
    if let Some(d) = &degrees {
        q = q.degrees(&d.0);
    }
    q.sporadic_dir = sporadic_dir;
    let cat = catalog(&q).map_err(|e| match e {
        lrgraph::families::CatalogError::Sporadic { .. } => CliError::Io(e.to_string()),
        _ => usage(e),
    })?;
    let provenance = json!({
        "entries": cat.entries.iter().map(|e| json!({
            "graph6": write_graph6(&e.graph),
            "order": e.order,
            "degrees": e.degrees,
            "provenance": e.provenance,
            "aliases": e.aliases,
            "canonical": e.canonical,
        })).collect::<Vec<_>>(),
        "unavailable": cat.unavailable,
    });
    if let Some(p) = &sidecar {
        let text = serde_json::to_string_pretty(&provenance).map_err(|e| CliError::Io(e.to_string()))?;
        std::fs::write(p, text + "\n").map_err(|e| CliError::Io(format!("{}: {e}", p.display())))?;
    }
    match format {
        Format::Graph6 => {
            for e in &cat.entries {
                emit_line(write_graph6(&e.graph))?;
            }
        }
        Format::Json => pretty(&provenance)?,
        Format::Table => {
            for e in &cat.entries {
                emit_line(format!("{:>3}  {:<6} {}  {}", e.order, e.degrees.to_string(), write_graph6(&e.graph), e.provenance))?;
            }
        }
        f => return Err(unsupported(f, "catalog")),
    }
    if !cat.unavailable.is_empty() {
        let ids: Vec<&str> = cat.unavailable.iter().map(|s| s.id).collect();
        eprintln!("# {} figure-only graphs not available: {}", ids.len(), ids.join(", "));
    }
    Ok(())
}

fn budget(a: &SearchArgs) -> Result<Budget, CliError> {
    let max_time = match a.max_seconds {
        Some(s) if !(s.is_finite() && s >= 0.0) => return Err(usage("--max-seconds must be a non-negative number")),
        Some(s) => Some(Duration::from_secs_f64(s)),
        None => None,
    };
    Ok(Budget { max_nodes: a.max_nodes, max_time })
}

fn cmd_search(a: SearchArgs, format: Option<Format>) -> Result<(), CliError> {
    let b = budget(&a)?;
    let (lo, hi) = match (a.n, a.order) {
        (Some(n), None) => (n, n),
        (None, Some(r)) => (r.lo, r.hi),
        _ => return Err(usage("give --n or --order")),
    };
    if a.cross_validate {
        let cv = cross_validate(lo, hi, &a.degrees.0, b).map_err(|e| match e {
            lrgraph::search::CrossValidateError::Search(SearchError::BudgetExceeded { .. }) => CliError::Budget(e.to_string()),
            _ => usage(e),
        })?;
        match format.unwrap_or(Format::Json) {
            Format::Json => pretty(&cv)?,
            Format::Table => {
                for o in &cv.orders {
                    emit_line(format!(
                        "{:>3}  found {:>3}  catalogued {:>3}  {}",
                        o.order,
                        o.found,
                        o.catalogued,
                        if o.missing_from_catalog.is_empty() && o.missing_from_search.is_empty() { "ok" } else { "MISMATCH" }
                    ))?;
                    for g in &o.missing_from_catalog {
                        emit_line(format!("     not in catalog: {g}"))?;
                    }
                    for g in &o.missing_from_search {
                        emit_line(format!("     not found by search: {g}"))?;
                    }
                }
                emit_line(format!("{}: equal = {}", cv.degrees, cv.equal))?;
            }
            f => return Err(unsupported(f, "search --cross-validate")),
        }
        return Ok(());
    }
    let filter = match a.filter {
        FilterArg::Two => DegreeFilter::TwoDegrees,
        FilterArg::Subset => DegreeFilter::Subset,
        FilterArg::Max => DegreeFilter::MaxDegree,
    };
    let format = format.unwrap_or(Format::Graph6);
    if !matches!(format, Format::Graph6 | Format::Json) {
        return Err(unsupported(format, "search"));
    }
    let what = if a.all { "graphs" } else { "long-refinement graphs" };
    let start = Instant::now();
    let mut results = Vec::new();
    let mut exceeded = None;
    for n in lo..=hi {
        let spec = SearchSpec::new(n, &a.degrees.0).filter(filter).connected(!a.disconnected).budget(b);
        let r = if a.all { enumerate(&spec) } else { find_long_refinement(&spec) };
        let (found, done) = match r {
            Ok(f) => (f, true),
            Err(SearchError::BudgetExceeded { partial, nodes, elapsed }) => {
                exceeded = Some(format!("order {n} after {nodes} nodes and {elapsed:.2?}; {} partial results", partial.len()));
                (partial, false)
            }
            Err(e) => return Err(usage(e)),
        };
        if format == Format::Graph6 {
            emit(&lrgraph::search::to_graph6_lines(&found))?;
        }
        eprintln!("# n={n} degrees {{{}}}: {} {what}{}", join(&a.degrees.0), found.len(), if done { "" } else { " (incomplete)" });
        results.push((n, found, done));
        if !done {
            break;
        }
    }
    if format == Format::Json {
        let orders: Vec<_> = results
            .iter()
            .map(|(n, found, done): &(usize, Vec<Found>, bool)| {
                json!({ "n": n, "complete": done, "count": found.len(), "graphs": found.iter().map(|f| write_graph6(&f.graph)).collect::<Vec<_>>() })
            })
            .collect();
        pretty(&json!({
            "degrees": a.degrees.0,
            "connected": !a.disconnected,
            "long_refinement_only": !a.all,
            "elapsed_ms": start.elapsed().as_millis() as u64,
            "orders": orders,
        }))?;
    }
    match exceeded {
        Some(m) => Err(CliError::Budget(m)),
        None => Ok(()),
    }
}

fn join(d: &[usize]) -> String {
    d.iter().map(usize::to_string).collect::<Vec<_>>().join(",")
}

fn cmd_gap_check(max: usize, degrees: Degrees, format: Format) -> Result<(), CliError> {
    let r = gap_check(max, &degrees.0).map_err(usage)?;
    match format {
        Format::Table => {
            emit_line(format!("orders 1..={max} without a known long-refinement graph with degrees {}:", r.degrees))?;
            emit_line(join(&r.gaps))?;
            if !r.unavailable.is_empty() {
                emit_line(format!("{} figure-only graphs with these degrees are not available; gaps may be overstated", r.unavailable.len()))?;
            }
            Ok(())
        }
        Format::Json => pretty(&r),
        f => Err(unsupported(f, "gap-check")),
    }
}

fn run(cli: Cli) -> Result<(), CliError> {
    if let Some(t) = cli.threads {
        rayon::ThreadPoolBuilder::new().num_threads(t).build_global().map_err(usage)?;
    }
    let f = cli.format;
    match cli.command {
        Command::Refine { input, verbose } => cmd_refine(input.load()?, verbose, f.unwrap_or(Format::Table)),
        Command::Analyze { input } => cmd_analyze(input.load()?, f.unwrap_or(Format::Table)),
        Command::Distinguish { g, h, assert_not_last } => cmd_distinguish(&g, &h, assert_not_last, f.unwrap_or(Format::Table)),
        Command::String(cmd) => cmd_string(cmd, f),
        Command::Family { table, variant, k } => cmd_family(table, variant, k, f.unwrap_or(Format::Graph6)),
        Command::Catalog { order, degrees, sidecar, sporadic_dir } => {
            cmd_catalog(order, degrees, sidecar, sporadic_dir, f.unwrap_or(Format::Graph6))
        }
        Command::Search(a) => cmd_search(a, f),
        Command::GapCheck { max, degrees } => cmd_gap_check(max, degrees, f.unwrap_or(Format::Table)),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 1 } else { 0 });
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("{e}");
            ExitCode::from(e.code())
        }
    }
}
