//! The `netpoint` command line: load a network and an event file, run one
//! analysis, and emit tidy CSV (or JSON, or SVG) plus a JSON metadata
//! sidecar describing the estimator conventions. All commands are pure
//! pipelines — identical inputs, seed and flags give byte-identical output
//! regardless of thread count.
//!
//! Exit codes: 0 success, 1 usage, 2 input parsing or validation,
//! 3 statistically infeasible request (for example too few events).

use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use crate::geostat::{
    self, GeostatError, GridSpec, VertexAttributeMatrix,
};
use crate::graph::{DegreeMode, EdgeKind, GraphError, NetworkGraph};
use crate::intensity::{
    count_on_edge, slice_counts, EventRecord, EventSet, IntensityError, IntensityTable, TimeGrid,
};
use crate::io::{self, IngestError, IngestReport};
use crate::second_order::{
    self, KCurve, KDirection, KernelSpec, PartialSelector, SecondOrderError,
};
use crate::sim::{simulate_poisson, SimError, SimulationSpec};
use crate::svg;

/// A command failure carrying its process exit code.
#[derive(Debug)]
pub enum CliError {
    /// Bad flags or flag values — exit 1.
    Usage(String),
    /// Input files that do not parse or validate — exit 2.
    Input(String),
    /// A computation the data cannot support — exit 3.
    Infeasible(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 1,
            CliError::Input(_) => 2,
            CliError::Infeasible(_) => 3,
        }
    }

    pub fn message(&self) -> &str {
        match self {
            CliError::Usage(m) | CliError::Input(m) | CliError::Infeasible(m) => m,
        }
    }
}

impl From<IngestError> for CliError {
    fn from(e: IngestError) -> Self {
        match e {
            IngestError::BadTolerance { .. } => CliError::Usage(e.to_string()),
            other => CliError::Input(other.to_string()),
        }
    }
}

impl From<GraphError> for CliError {
    fn from(e: GraphError) -> Self {
        CliError::Input(e.to_string())
    }
}

impl From<IntensityError> for CliError {
    fn from(e: IntensityError) -> Self {
        match e {
            IntensityError::MissingTime { .. }
            | IntensityError::IsolatedVertex { .. }
            | IntensityError::EmptyIncidenceSet { .. }
            | IntensityError::NotAPath
            | IntensityError::CutoffBeforeGrid { .. } => CliError::Infeasible(e.to_string()),
            IntensityError::BadTimeGrid => CliError::Usage(e.to_string()),
            other => CliError::Input(other.to_string()),
        }
    }
}

impl From<SecondOrderError> for CliError {
    fn from(e: SecondOrderError) -> Self {
        match e {
            SecondOrderError::BadBandwidth { .. } => CliError::Usage(e.to_string()),
            SecondOrderError::TooFewEvents { .. } | SecondOrderError::EmptyEdgeSelection => {
                CliError::Infeasible(e.to_string())
            }
            other => CliError::Input(other.to_string()),
        }
    }
}

impl From<GeostatError> for CliError {
    fn from(e: GeostatError) -> Self {
        match e {
            GeostatError::BadBandwidth { .. } | GeostatError::BadCut { .. } => {
                CliError::Usage(e.to_string())
            }
            GeostatError::TooFewRows { .. }
            | GeostatError::EmptyAttributeMatrix
            | GeostatError::IsolatedVertex { .. } => CliError::Infeasible(e.to_string()),
            other => CliError::Input(other.to_string()),
        }
    }
}

impl From<SimError> for CliError {
    fn from(e: SimError) -> Self {
        CliError::Usage(e.to_string())
    }
}

#[derive(Parser)]
#[command(
    name = "netpoint",
    version,
    about = "Point pattern analysis on spatial networks",
    max_term_width = 100
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Load a network (and optionally events) and report what was found.
    Validate(ValidateArgs),
    /// Degree statistics, length totals and event counts.
    Summary(SummaryArgs),
    /// Edgewise and vertex neighborhood intensities.
    Intensity(IntensityArgs),
    /// K functions: graph (hop) variants and the metric variant.
    Kfun(KfunArgs),
    /// Metric pair correlation function.
    Pcf(PcfArgs),
    /// Event counts per edge within consecutive time slices.
    Slices(SlicesArgs),
    /// Ward clustering of vertices on neighborhood intensity profiles.
    Cluster(ClusterArgs),
    /// Kernel-smoothed intensity surface on a planar grid.
    Smooth(SmoothArgs),
    /// Simulate a Poisson pattern on the network.
    Simulate(SimulateArgs),
}

#[derive(Args)]
struct GraphArg {
    /// Network source: a .geojson file, a directory containing vertices.csv
    /// and edges.csv, or a path prefix expanded to <prefix>_vertices.csv and
    /// <prefix>_edges.csv.
    #[arg(long)]
    graph: PathBuf,
}

#[derive(Args)]
struct EventsArg {
    /// Planar event CSV with columns x,y and optional mark,time.
    #[arg(long)]
    events: PathBuf,
    /// Maximum snapping distance from an event to the network.
    #[arg(long, default_value_t = 0.5)]
    tolerance: f64,
    /// Keep only events carrying this mark.
    #[arg(long)]
    mark: Option<String>,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Csv,
    Json,
    Svg,
}

#[derive(Args)]
struct OutputArgs {
    /// Write the output here (a .meta.json sidecar appears next to it);
    /// stdout otherwise.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    format: Format,
}

#[derive(Args)]
struct ValidateArgs {
    #[command(flatten)]
    graph: GraphArg,
    #[arg(long)]
    events: Option<PathBuf>,
    #[arg(long, default_value_t = 0.5)]
    tolerance: f64,
    /// Write the full ingest report as JSON.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct SummaryArgs {
    #[command(flatten)]
    graph: GraphArg,
    #[arg(long)]
    events: Option<PathBuf>,
    #[arg(long, default_value_t = 0.5)]
    tolerance: f64,
    #[arg(long)]
    mark: Option<String>,
    #[command(flatten)]
    output: OutputArgs,
}

#[derive(Args)]
struct IntensityArgs {
    #[command(flatten)]
    graph: GraphArg,
    #[command(flatten)]
    events: EventsArg,
    #[command(flatten)]
    output: OutputArgs,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum KfunVariant {
    /// Hop-based K ignoring all arrow directions.
    Graph,
    /// Hop-based K along direction-preserving routes.
    Directed,
    /// Hop-based K against direction-preserving routes.
    DirectedBackward,
    /// Hop-based K restricted to undirected edges.
    PartialUndirected,
    /// Partially directed K, forward selector.
    PartialForward,
    /// Partially directed K, backward selector.
    PartialBackward,
    /// Metric K over shortest-path distances.
    Linear,
}

#[derive(Args)]
struct KfunArgs {
    #[command(flatten)]
    graph: GraphArg,
    #[command(flatten)]
    events: EventsArg,
    #[arg(long, value_enum, default_value_t = KfunVariant::Graph)]
    variant: KfunVariant,
    /// Hop radii as an inclusive integer range a:b.
    #[arg(long, default_value = "0:5")]
    xi: String,
    /// Metric radii as a:b:step (required for --variant linear).
    #[arg(long)]
    r: Option<String>,
    #[command(flatten)]
    output: OutputArgs,
}

#[derive(Args)]
struct PcfArgs {
    #[command(flatten)]
    graph: GraphArg,
    #[command(flatten)]
    events: EventsArg,
    /// Metric radii as a:b:step.
    #[arg(long)]
    r: String,
    /// Kernel bandwidth; defaults to 0.15 times the largest radius.
    #[arg(long)]
    bandwidth: Option<f64>,
    #[command(flatten)]
    output: OutputArgs,
}

#[derive(Args)]
struct SlicesArgs {
    #[command(flatten)]
    graph: GraphArg,
    #[command(flatten)]
    events: EventsArg,
    /// Time breakpoints t0,t1,… defining left-closed slices [t_i, t_{i+1}).
    #[arg(long)]
    grid: String,
    #[command(flatten)]
    output: OutputArgs,
}

#[derive(Args)]
struct ClusterArgs {
    #[command(flatten)]
    graph: GraphArg,
    #[command(flatten)]
    events: EventsArg,
    /// Number of clusters to cut the dendrogram into.
    #[arg(long, default_value_t = 4)]
    k: usize,
    #[command(flatten)]
    output: OutputArgs,
}

#[derive(Args)]
struct SmoothArgs {
    #[command(flatten)]
    graph: GraphArg,
    #[command(flatten)]
    events: EventsArg,
    /// Kernel bandwidth; defaults to a tenth of the bounding-box diagonal.
    #[arg(long)]
    bandwidth: Option<f64>,
    /// Grid resolution as nx,ny (or one number for both).
    #[arg(long, default_value = "200,200")]
    resolution: String,
    #[command(flatten)]
    output: OutputArgs,
}

#[derive(Args)]
struct SimulateArgs {
    #[command(flatten)]
    graph: GraphArg,
    /// Expected events per unit length.
    #[arg(long)]
    rate: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Mark distribution as name:prob,name:prob (probabilities sum to 1).
    #[arg(long)]
    marks: Option<String>,
    /// Uniform event times from t0:t1.
    #[arg(long)]
    time_range: Option<String>,
    #[command(flatten)]
    output: OutputArgs,
}

/// Entry point for the binary: parse, dispatch, map failures to exit codes.
pub fn run() -> i32 {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(err) => {
            let code = if err.use_stderr() { 1 } else { 0 };
            let _ = err.print();
            return code;
        }
    };
    init_thread_pool();
    match execute(cli.command) {
        Ok(stdout_text) => {
            print!("{stdout_text}");
            0
        }
        Err(err) => {
            eprintln!("error: {}", err.message());
            err.exit_code()
        }
    }
}

/// Honor NETPOINT_THREADS when the parallel runtime is compiled in.
fn init_thread_pool() {
    #[cfg(feature = "parallel")]
    if let Some(n) = std::env::var("NETPOINT_THREADS")
        .ok()
        .and_then(|text| text.parse::<usize>().ok())
        .filter(|&n| n > 0)
    {
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    }
}

/// Run one parsed command; the returned string is the stdout payload.
fn execute(command: Command) -> Result<String, CliError> {
    match command {
        Command::Validate(args) => cmd_validate(args),
        Command::Summary(args) => cmd_summary(args),
        Command::Intensity(args) => cmd_intensity(args),
        Command::Kfun(args) => cmd_kfun(args),
        Command::Pcf(args) => cmd_pcf(args),
        Command::Slices(args) => cmd_slices(args),
        Command::Cluster(args) => cmd_cluster(args),
        Command::Smooth(args) => cmd_smooth(args),
        Command::Simulate(args) => cmd_simulate(args),
    }
}

/// Run the CLI against an explicit argument list (argv[0] included);
/// returns the stdout payload. Lets tests drive commands in-process.
pub fn run_args<I, S>(args: I) -> Result<String, CliError>
where
    I: IntoIterator<Item = S>,
    S: Into<std::ffi::OsString> + Clone,
{
    let cli = Cli::try_parse_from(args).map_err(|e| CliError::Usage(e.to_string()))?;
    execute(cli.command)
}

fn load_graph(path: &Path) -> Result<(NetworkGraph, IngestReport), CliError> {
    if path.extension().is_some_and(|e| e.eq_ignore_ascii_case("geojson")) {
        return Ok(io::load_network_geojson(path)?);
    }
    if path.is_dir() {
        return Ok(io::load_network(&path.join("vertices.csv"), &path.join("edges.csv"))?);
    }
    let prefix = path.as_os_str().to_string_lossy();
    let vertices = PathBuf::from(format!("{prefix}_vertices.csv"));
    let edges = PathBuf::from(format!("{prefix}_edges.csv"));
    if vertices.exists() && edges.exists() {
        return Ok(io::load_network(&vertices, &edges)?);
    }
    Err(CliError::Input(format!(
        "cannot locate a network at '{}': expected a .geojson file, a directory with \
         vertices.csv and edges.csv, or a prefix with _vertices.csv and _edges.csv",
        path.display()
    )))
}

/// Load, snap and (optionally) mark-filter the event file.
fn load_events_onto(
    graph: &NetworkGraph,
    args: &EventsArg,
) -> Result<(EventSet, IngestReport), CliError> {
    let raw = io::load_events(&args.events)?;
    let (set, report) = io::snap_events(graph, &raw, args.tolerance)?;
    let set = match &args.mark {
        Some(mark) => filter_by_mark(graph, &set, mark)?,
        None => set,
    };
    Ok((set, report))
}

fn filter_by_mark(
    graph: &NetworkGraph,
    set: &EventSet,
    mark: &str,
) -> Result<EventSet, CliError> {
    let kept: Vec<EventRecord> = set
        .events()
        .iter()
        .filter(|e| e.mark.as_deref() == Some(mark))
        .cloned()
        .collect();
    Ok(EventSet::new(graph, kept)?)
}

fn fmt(v: f64) -> String {
    format!("{v}")
}

fn csv_cell(s: &str) -> String {
    if s.contains(',') || s.contains('"') || s.contains('\n') {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

/// A tidy result table; cells are pre-formatted at full float precision.
struct Table {
    columns: Vec<&'static str>,
    rows: Vec<Vec<String>>,
}

impl Table {
    fn csv(&self) -> String {
        let mut out = self.columns.join(",");
        out.push('\n');
        for row in &self.rows {
            let cells: Vec<String> = row.iter().map(|c| csv_cell(c)).collect();
            out.push_str(&cells.join(","));
            out.push('\n');
        }
        out
    }

    fn json(&self, meta: &Value) -> String {
        let payload = json!({
            "meta": meta,
            "columns": self.columns,
            "rows": self.rows,
        });
        let mut text = serde_json::to_string_pretty(&payload).expect("serializable payload");
        text.push('\n');
        text
    }
}

fn sidecar_path(path: &Path) -> PathBuf {
    PathBuf::from(format!("{}.meta.json", path.display()))
}

fn write_file(path: &Path, text: &str) -> Result<(), CliError> {
    std::fs::write(path, text)
        .map_err(|e| CliError::Input(format!("{}: {e}", path.display())))
}

/// Route a rendered result to stdout or to --out plus its metadata sidecar.
fn deliver(
    output: &OutputArgs,
    table: Table,
    meta: Value,
    svg: Option<String>,
) -> Result<String, CliError> {
    let main_text = match output.format {
        Format::Csv => table.csv(),
        Format::Json => table.json(&meta),
        Format::Svg => svg.ok_or_else(|| {
            CliError::Usage("--format svg is not available for this command".to_string())
        })?,
    };
    match &output.out {
        Some(path) => {
            write_file(path, &main_text)?;
            let sidecar = sidecar_path(path);
            let mut meta_text =
                serde_json::to_string_pretty(&meta).expect("serializable metadata");
            meta_text.push('\n');
            write_file(&sidecar, &meta_text)?;
            Ok(format!("wrote {} and {}\n", path.display(), sidecar.display()))
        }
        None => Ok(main_text),
    }
}

fn cmd_validate(args: ValidateArgs) -> Result<String, CliError> {
    let (graph, mut report) = load_graph(&args.graph.graph)?;
    let mut text = io::describe_network(&graph, &report);
    if let Some(events_path) = &args.events {
        let raw = io::load_events(events_path)?;
        let (_, snap_report) = io::snap_events(&graph, &raw, args.tolerance)?;
        text.push_str(&format!(
            "events: {} read, {} snapped, {} rejected\n",
            snap_report.events_read,
            snap_report.snapped,
            snap_report.rejected.len()
        ));
        for r in &snap_report.rejected {
            text.push_str(&format!("  row {}: {}\n", r.row, r.reason));
        }
        report.merge(snap_report);
    }
    text.push_str("ok\n");
    if let Some(out) = &args.out {
        let mut json_text =
            serde_json::to_string_pretty(&report).expect("serializable report");
        json_text.push('\n');
        write_file(out, &json_text)?;
    }
    Ok(text)
}

fn cmd_summary(args: SummaryArgs) -> Result<String, CliError> {
    let (graph, report) = load_graph(&args.graph.graph)?;
    let undirected = graph
        .edges()
        .iter()
        .filter(|e| e.kind == EdgeKind::Undirected)
        .count();
    let n = graph.vertex_count();
    let degree_sum: usize =
        (0..n).map(|v| graph.degree(v, DegreeMode::Complete).unwrap()).sum();
    let mut rows: Vec<Vec<String>> = vec![
        vec!["vertices".into(), n.to_string()],
        vec!["edges".into(), graph.edge_count().to_string()],
        vec!["undirected_edges".into(), undirected.to_string()],
        vec!["directed_edges".into(), (graph.edge_count() - undirected).to_string()],
        vec!["isolated_vertices".into(), report.isolated_vertices.len().to_string()],
        vec!["total_length".into(), fmt(graph.total_length())],
        vec![
            "mean_degree".into(),
            fmt(if n == 0 { 0.0 } else { degree_sum as f64 / n as f64 }),
        ],
        vec![
            "min_degree".into(),
            graph.degree_min(DegreeMode::Complete).map_or_else(String::new, |d| d.to_string()),
        ],
        vec![
            "max_degree".into(),
            graph.degree_max(DegreeMode::Complete).map_or_else(String::new, |d| d.to_string()),
        ],
    ];
    for (degree, count) in io::degree_histogram(&graph, DegreeMode::Complete) {
        rows.push(vec![format!("degree_histogram_{degree}"), count.to_string()]);
    }
    if let Some(events_path) = &args.events {
        let events_arg = EventsArg {
            events: events_path.clone(),
            tolerance: args.tolerance,
            mark: args.mark.clone(),
        };
        let (set, snap_report) = load_events_onto(&graph, &events_arg)?;
        rows.push(vec!["events_read".into(), snap_report.events_read.to_string()]);
        rows.push(vec!["events_snapped".into(), snap_report.snapped.to_string()]);
        rows.push(vec!["events_rejected".into(), snap_report.rejected.len().to_string()]);
        rows.push(vec!["events_analyzed".into(), set.len().to_string()]);
        rows.push(vec![
            "global_intensity".into(),
            fmt(set.len() as f64 / graph.total_length()),
        ]);
    }
    let meta = json!({
        "command": "summary",
        "degree_mode": "all incident edges regardless of direction",
        "mark": args.mark,
        "units": "events per unit edge length",
    });
    let table = Table { columns: vec!["statistic", "value"], rows };
    deliver(&args.output, table, meta, None)
}

fn cmd_intensity(args: IntensityArgs) -> Result<String, CliError> {
    let (graph, _) = load_graph(&args.graph.graph)?;
    let (events, _) = load_events_onto(&graph, &args.events)?;
    // Events are already restricted to --mark, so compute unfiltered here.
    let table_data = IntensityTable::compute(&graph, &events, None)?;
    let mark_cell = args.events.mark.clone().unwrap_or_default();
    let mut rows = Vec::new();
    for (e, value) in table_data.edges.iter().enumerate() {
        let edge = graph.edge(e).unwrap();
        rows.push(vec![
            "edge".into(),
            e.to_string(),
            mark_cell.clone(),
            fmt(edge.length),
            count_on_edge(&events, e, None)?.to_string(),
            fmt(*value),
        ]);
    }
    for (v, value) in table_data.vertices.iter().enumerate() {
        rows.push(vec![
            "vertex".into(),
            v.to_string(),
            mark_cell.clone(),
            String::new(),
            String::new(),
            value.map_or_else(String::new, fmt),
        ]);
    }
    let meta = json!({
        "command": "intensity",
        "mark": args.events.mark,
        "units": "events per unit edge length",
        "edge_estimator": "event count divided by edge length",
        "vertex_estimator": "mean edge intensity over undirected incident edges; empty when none",
    });
    let svg_text = svg::network_svg(
        &graph,
        "edgewise intensity",
        Some(&table_data.edges),
        None,
    );
    let table = Table {
        columns: vec!["scope", "id", "mark", "length", "count", "intensity"],
        rows,
    };
    deliver(&args.output, table, meta, Some(svg_text))
}

fn parse_xi_range(text: &str) -> Result<Vec<usize>, CliError> {
    let usage =
        || CliError::Usage(format!("--xi wants an integer range a:b, got '{text}'"));
    let (a, b) = text.split_once(':').ok_or_else(usage)?;
    let a: usize = a.trim().parse().map_err(|_| usage())?;
    let b: usize = b.trim().parse().map_err(|_| usage())?;
    if b < a {
        return Err(usage());
    }
    Ok((a..=b).collect())
}

fn parse_r_range(text: &str) -> Result<Vec<f64>, CliError> {
    let usage = || CliError::Usage(format!("--r wants a range a:b:step, got '{text}'"));
    let parts: Vec<&str> = text.split(':').collect();
    if parts.len() != 3 {
        return Err(usage());
    }
    let a: f64 = parts[0].trim().parse().map_err(|_| usage())?;
    let b: f64 = parts[1].trim().parse().map_err(|_| usage())?;
    let step: f64 = parts[2].trim().parse().map_err(|_| usage())?;
    if !a.is_finite() || !b.is_finite() || !(step > 0.0) || !step.is_finite() || b < a {
        return Err(usage());
    }
    let mut out = Vec::new();
    let mut k = 0u64;
    loop {
        let v = a + k as f64 * step;
        if v > b + 1e-9 * step {
            break;
        }
        out.push(v);
        k += 1;
    }
    Ok(out)
}

fn curve_table(curve: &KCurve) -> Table {
    Table {
        columns: vec!["x", "k"],
        rows: curve
            .xs
            .iter()
            .zip(&curve.values)
            .map(|(x, k)| vec![fmt(*x), fmt(*k)])
            .collect(),
    }
}

fn curve_points(curve: &KCurve) -> Vec<(f64, f64)> {
    curve.xs.iter().copied().zip(curve.values.iter().copied()).collect()
}

fn cmd_kfun(args: KfunArgs) -> Result<String, CliError> {
    let (graph, _) = load_graph(&args.graph.graph)?;
    let (events, _) = load_events_onto(&graph, &args.events)?;
    let (curve, abscissa, direction) = match args.variant {
        KfunVariant::Linear => {
            let rs = parse_r_range(args.r.as_deref().ok_or_else(|| {
                CliError::Usage("--variant linear needs --r a:b:step".to_string())
            })?)?;
            (
                second_order::k_linear(&graph, &events, &rs)?,
                "shortest-path length along the network",
                "none",
            )
        }
        variant => {
            let xis = parse_xi_range(&args.xi)?;
            let hops = "edge hops between host edges (0 = same edge, 1 = sharing a vertex)";
            match variant {
                KfunVariant::Graph => (
                    second_order::k_graph(&graph, &events, &xis)?,
                    hops,
                    "ignores arrow directions",
                ),
                KfunVariant::Directed => (
                    second_order::k_graph_directed(&graph, &events, &xis, KDirection::Forward)?,
                    hops,
                    "direction-preserving routes, source to target",
                ),
                KfunVariant::DirectedBackward => (
                    second_order::k_graph_directed(&graph, &events, &xis, KDirection::Backward)?,
                    hops,
                    "direction-preserving routes, target to source",
                ),
                KfunVariant::PartialUndirected => (
                    second_order::k_graph_partial(
                        &graph,
                        &events,
                        &xis,
                        PartialSelector::UndirectedOnly,
                    )?,
                    hops,
                    "undirected edges only",
                ),
                KfunVariant::PartialForward => (
                    second_order::k_graph_partial(&graph, &events, &xis, PartialSelector::Forward)?,
                    hops,
                    "direction-preserving routes, source to target",
                ),
                KfunVariant::PartialBackward => (
                    second_order::k_graph_partial(
                        &graph,
                        &events,
                        &xis,
                        PartialSelector::Backward,
                    )?,
                    hops,
                    "direction-preserving routes, target to source",
                ),
                KfunVariant::Linear => unreachable!(),
            }
        }
    };
    let meta = json!({
        "command": "kfun",
        "variant": format!("{:?}", curve.variant),
        "mark": args.events.mark,
        "events": curve.n,
        "normalizer": curve.normalizer,
        "abscissa": abscissa,
        "direction": direction,
    });
    let points = curve_points(&curve);
    let svg_text = svg::curve_svg(
        "K function",
        "distance",
        "K",
        &[svg::Series { label: "K", points: &points }],
    );
    deliver(&args.output, curve_table(&curve), meta, Some(svg_text))
}

fn cmd_pcf(args: PcfArgs) -> Result<String, CliError> {
    let (graph, _) = load_graph(&args.graph.graph)?;
    let (events, _) = load_events_onto(&graph, &args.events)?;
    let rs = parse_r_range(&args.r)?;
    let bandwidth = args
        .bandwidth
        .unwrap_or_else(|| second_order::default_pcf_bandwidth(&rs));
    let kernel = KernelSpec::epanechnikov(bandwidth)?;
    let curve = second_order::pcf_linear(&graph, &events, &rs, kernel, None)?;
    let meta = json!({
        "command": "pcf",
        "mark": args.events.mark,
        "events": curve.n,
        "kernel": "epanechnikov",
        "bandwidth": curve.kernel.bandwidth,
        "skipped_pairs": curve.skipped_pairs,
        "intensity": "uniform: event count over total network length",
        "abscissa": "shortest-path length along the network",
    });
    let points: Vec<(f64, f64)> =
        curve.xs.iter().copied().zip(curve.values.iter().copied()).collect();
    let svg_text = svg::curve_svg(
        "pair correlation",
        "distance",
        "g",
        &[svg::Series { label: "g", points: &points }],
    );
    let table = Table {
        columns: vec!["r", "g"],
        rows: curve
            .xs
            .iter()
            .zip(&curve.values)
            .map(|(r, g)| vec![fmt(*r), fmt(*g)])
            .collect(),
    };
    deliver(&args.output, table, meta, Some(svg_text))
}

fn parse_time_grid(text: &str) -> Result<TimeGrid, CliError> {
    let breaks: Result<Vec<f64>, _> =
        text.split(',').map(|t| t.trim().parse::<f64>()).collect();
    let breaks = breaks
        .map_err(|_| CliError::Usage(format!("--grid wants numbers t0,t1,…, got '{text}'")))?;
    TimeGrid::new(breaks).map_err(|e| CliError::Usage(e.to_string()))
}

fn cmd_slices(args: SlicesArgs) -> Result<String, CliError> {
    let (graph, _) = load_graph(&args.graph.graph)?;
    let (events, _) = load_events_onto(&graph, &args.events)?;
    let grid = parse_time_grid(&args.grid)?;
    let mut rows = Vec::new();
    let mut excluded_total = 0usize;
    for e in 0..graph.edge_count() {
        let counts = slice_counts(&events, &grid, e)?;
        excluded_total += counts.excluded;
        for (slice, count) in counts.per_slice.iter().enumerate() {
            rows.push(vec![
                e.to_string(),
                slice.to_string(),
                fmt(grid.breaks()[slice]),
                fmt(grid.breaks()[slice + 1]),
                count.to_string(),
            ]);
        }
    }
    let mut totals = vec![0usize; grid.slices()];
    for row in &rows {
        let slice: usize = row[1].parse().unwrap();
        let count: usize = row[4].parse().unwrap();
        totals[slice] += count;
    }
    let meta = json!({
        "command": "slices",
        "mark": args.events.mark,
        "breaks": grid.breaks(),
        "rule": "left-closed: time t falls in slice i when t_i <= t < t_{i+1}",
        "excluded_outside_window": excluded_total,
        "per_slice_totals": totals,
    });
    let points: Vec<(f64, f64)> = totals
        .iter()
        .enumerate()
        .map(|(i, &c)| (grid.breaks()[i], c as f64))
        .collect();
    let svg_text = svg::curve_svg(
        "events per time slice",
        "slice start",
        "count",
        &[svg::Series { label: "total", points: &points }],
    );
    let table = Table {
        columns: vec!["edge", "slice", "start", "end", "count"],
        rows,
    };
    deliver(&args.output, table, meta, Some(svg_text))
}

fn cmd_cluster(args: ClusterArgs) -> Result<String, CliError> {
    let (graph, _) = load_graph(&args.graph.graph)?;
    let (events, _) = load_events_onto(&graph, &args.events)?;
    let attrs = VertexAttributeMatrix::from_neighborhood_intensities(&graph, &events)?;
    let dendrogram = geostat::ward_cluster(&attrs)?;
    let labels = dendrogram.cut(args.k)?;
    let rows = labels
        .iter()
        .enumerate()
        .map(|(v, label)| vec![v.to_string(), label.to_string()])
        .collect();
    let merges: Vec<Value> = dendrogram
        .merges()
        .iter()
        .map(|m| json!({"a": m.a, "b": m.b, "height": m.height, "size": m.size}))
        .collect();
    let meta = json!({
        "command": "cluster",
        "k": args.k,
        "mark": args.events.mark,
        "channels": attrs.labels(),
        "linkage": "ward (minimum within-cluster variance increase)",
        "distance": "squared euclidean between vertex attribute rows",
        "merges": merges,
    });
    let svg_text = svg::network_svg(&graph, "vertex clusters", None, Some(&labels));
    let table = Table { columns: vec!["vertex", "label"], rows };
    deliver(&args.output, table, meta, Some(svg_text))
}

fn parse_resolution(text: &str) -> Result<(usize, usize), CliError> {
    let usage = || {
        CliError::Usage(format!("--resolution wants nx,ny or a single number, got '{text}'"))
    };
    let parts: Vec<&str> = text.split(',').collect();
    match parts.as_slice() {
        [n] => {
            let n: usize = n.trim().parse().map_err(|_| usage())?;
            if n == 0 {
                return Err(usage());
            }
            Ok((n, n))
        }
        [nx, ny] => {
            let nx: usize = nx.trim().parse().map_err(|_| usage())?;
            let ny: usize = ny.trim().parse().map_err(|_| usage())?;
            if nx == 0 || ny == 0 {
                return Err(usage());
            }
            Ok((nx, ny))
        }
        _ => Err(usage()),
    }
}

fn cmd_smooth(args: SmoothArgs) -> Result<String, CliError> {
    let (graph, _) = load_graph(&args.graph.graph)?;
    let (events, _) = load_events_onto(&graph, &args.events)?;
    let attrs = VertexAttributeMatrix::from_neighborhood_intensities(&graph, &events)?;
    let (nx, ny) = parse_resolution(&args.resolution)?;
    let grid = GridSpec { nx, ny, bounds: None };
    let bandwidth = args
        .bandwidth
        .unwrap_or_else(|| geostat::default_smooth_bandwidth(&graph));
    let kernel = KernelSpec::gaussian(bandwidth)?;
    let field = geostat::smooth_field(&graph, &attrs, &grid, kernel)?;
    let mut rows = Vec::new();
    for (channel, label) in attrs.labels().iter().enumerate() {
        for (iy, y) in field.ys.iter().enumerate() {
            for (ix, x) in field.xs.iter().enumerate() {
                rows.push(vec![
                    fmt(*x),
                    fmt(*y),
                    label.clone(),
                    fmt(field.values[channel][iy * field.xs.len() + ix]),
                ]);
            }
        }
    }
    let meta = json!({
        "command": "smooth",
        "mark": args.events.mark,
        "channels": attrs.labels(),
        "kernel": "gaussian on planar distance to vertices",
        "bandwidth": field.bandwidth,
        "estimator": "kernel-weighted mean of vertex neighborhood intensities; nearest vertex where all weights vanish",
        "nx": nx,
        "ny": ny,
    });
    let svg_text = svg::heatmap_svg(
        "smoothed intensity",
        &field.xs,
        &field.ys,
        &field.values[0],
    );
    let table = Table {
        columns: vec!["x", "y", "channel", "value"],
        rows,
    };
    deliver(&args.output, table, meta, Some(svg_text))
}

fn parse_marks(text: &str) -> Result<Vec<(String, f64)>, CliError> {
    let usage = || {
        CliError::Usage(format!("--marks wants name:prob,name:prob…, got '{text}'"))
    };
    text.split(',')
        .map(|part| {
            let (name, prob) = part.split_once(':').ok_or_else(usage)?;
            let prob: f64 = prob.trim().parse().map_err(|_| usage())?;
            Ok((name.trim().to_string(), prob))
        })
        .collect()
}

fn parse_time_range(text: &str) -> Result<(f64, f64), CliError> {
    let usage = || CliError::Usage(format!("--time-range wants t0:t1, got '{text}'"));
    let (a, b) = text.split_once(':').ok_or_else(usage)?;
    let a: f64 = a.trim().parse().map_err(|_| usage())?;
    let b: f64 = b.trim().parse().map_err(|_| usage())?;
    Ok((a, b))
}

fn cmd_simulate(args: SimulateArgs) -> Result<String, CliError> {
    let (graph, _) = load_graph(&args.graph.graph)?;
    let mut spec = SimulationSpec::new(args.rate, args.seed);
    if let Some(marks) = &args.marks {
        spec.marks = Some(parse_marks(marks)?);
    }
    if let Some(range) = &args.time_range {
        spec.time_range = Some(parse_time_range(range)?);
    }
    let events = simulate_poisson(&graph, &spec)?;
    let mut rows = Vec::new();
    for ev in events.events() {
        let (x, y) = crate::metric::point_coords(&graph, ev.position)
            .map_err(|e| CliError::Input(e.to_string()))?;
        rows.push(vec![
            fmt(x),
            fmt(y),
            ev.mark.clone().unwrap_or_default(),
            ev.time.map(fmt).unwrap_or_default(),
        ]);
    }
    let meta = json!({
        "command": "simulate",
        "rate": args.rate,
        "seed": args.seed,
        "events": events.len(),
        "total_length": graph.total_length(),
        "law": "per edge, count Poisson(rate x length), positions uniform on the edge",
    });
    let table = Table { columns: vec!["x", "y", "mark", "time"], rows };
    deliver(&args.output, table, meta, None)
}
