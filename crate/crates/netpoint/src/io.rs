//! File ingest and serialization: network CSVs (vertices `id,x,y`; edges
//! `id,tail,head,kind[,length][,wkt_polyline]` with kind U or D), event CSVs
//! (`x,y[,mark][,time]`), an optional GeoJSON network reader, orthogonal
//! snapping of planar events onto edges, and full-precision writers that
//! round-trip a network bit-exactly.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::Path;

use serde::Serialize;
use thiserror::Error;

use crate::graph::{
    DegreeMode, Edge, EdgeKind, EdgeSpec, GraphError, NetworkGraph, SpatialVertex, VertexId,
};
use crate::intensity::{EventRecord, EventSet, IntensityError};
use crate::metric::{point_coords, NetPoint};

#[derive(Debug, Error)]
pub enum IngestError {
    #[error("{path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("{path}:{row}: {message}")]
    Parse { path: String, row: usize, message: String },
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error(transparent)]
    Intensity(#[from] IntensityError),
    #[error("snap tolerance must be positive and finite, got {tolerance}")]
    BadTolerance { tolerance: f64 },
}

impl IngestError {
    fn io(path: &Path, source: std::io::Error) -> Self {
        IngestError::Io { path: path.display().to_string(), source }
    }

    fn parse(path: &Path, row: usize, message: impl Into<String>) -> Self {
        IngestError::Parse { path: path.display().to_string(), row, message: message.into() }
    }
}

/// A planar event as read from file, before snapping.
#[derive(Debug, Clone, PartialEq)]
pub struct RawEvent {
    pub row: usize,
    pub x: f64,
    pub y: f64,
    pub mark: Option<String>,
    pub time: Option<f64>,
}

/// An event the snapper refused, with the file row and the reason.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RejectedEvent {
    pub row: usize,
    pub x: f64,
    pub y: f64,
    pub reason: String,
}

/// What ingest saw: row counts, snap outcomes (events read = snapped +
/// rejected) and the vertices no edge touches.
#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct IngestReport {
    pub vertices_read: usize,
    pub edges_read: usize,
    pub events_read: usize,
    pub snapped: usize,
    pub rejected: Vec<RejectedEvent>,
    pub isolated_vertices: Vec<VertexId>,
}

impl IngestReport {
    /// Fold another report's counts into this one.
    pub fn merge(&mut self, other: IngestReport) {
        self.vertices_read += other.vertices_read;
        self.edges_read += other.edges_read;
        self.events_read += other.events_read;
        self.snapped += other.snapped;
        self.rejected.extend(other.rejected);
        self.isolated_vertices.extend(other.isolated_vertices);
        self.isolated_vertices.sort_unstable();
        self.isolated_vertices.dedup();
    }
}

fn reader_for(path: &Path) -> Result<csv::Reader<std::fs::File>, IngestError> {
    csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .from_path(path)
        .map_err(|e| match e.into_kind() {
            csv::ErrorKind::Io(io) => IngestError::io(path, io),
            other => IngestError::parse(path, 1, format!("{other:?}")),
        })
    }

/// Column slots by header name (case-insensitive); `None` when absent.
fn column_index(headers: &csv::StringRecord, name: &str) -> Option<usize> {
    headers.iter().position(|h| h.eq_ignore_ascii_case(name))
}

fn require_column(
    path: &Path,
    headers: &csv::StringRecord,
    name: &str,
) -> Result<usize, IngestError> {
    column_index(headers, name)
        .ok_or_else(|| IngestError::parse(path, 1, format!("missing required column '{name}'")))
}

fn record_row(record: &csv::StringRecord, fallback: usize) -> usize {
    record.position().map(|p| p.line() as usize).unwrap_or(fallback)
}

fn parse_field<T: std::str::FromStr>(
    path: &Path,
    row: usize,
    name: &str,
    value: &str,
) -> Result<T, IngestError> {
    value
        .parse()
        .map_err(|_| IngestError::parse(path, row, format!("cannot parse {name} from '{value}'")))
}

fn optional_field(record: &csv::StringRecord, idx: Option<usize>) -> Option<String> {
    idx.and_then(|i| record.get(i))
        .map(str::to_string)
        .filter(|s| !s.is_empty())
}

/// Parse `LINESTRING (x y, x y, …)`.
fn parse_wkt_linestring(text: &str) -> Option<Vec<(f64, f64)>> {
    let body = text
        .trim()
        .strip_prefix("LINESTRING")
        .or_else(|| text.trim().strip_prefix("linestring"))?
        .trim()
        .strip_prefix('(')?
        .strip_suffix(')')?;
    let mut points = Vec::new();
    for pair in body.split(',') {
        let mut nums = pair.split_whitespace();
        let x: f64 = nums.next()?.parse().ok()?;
        let y: f64 = nums.next()?.parse().ok()?;
        if nums.next().is_some() {
            return None;
        }
        points.push((x, y));
    }
    if points.len() < 2 {
        None
    } else {
        Some(points)
    }
}

fn format_wkt_linestring(points: &[(f64, f64)]) -> String {
    let mut out = String::from("LINESTRING (");
    for (i, (x, y)) in points.iter().enumerate() {
        if i > 0 {
            out.push_str(", ");
        }
        let _ = write!(out, "{x} {y}");
    }
    out.push(')');
    out
}

fn load_vertices(path: &Path) -> Result<(Vec<SpatialVertex>, Vec<usize>), IngestError> {
    let mut reader = reader_for(path)?;
    let headers = reader
        .headers()
        .map_err(|e| IngestError::parse(path, 1, e.to_string()))?
        .clone();
    let id_col = require_column(path, &headers, "id")?;
    let x_col = require_column(path, &headers, "x")?;
    let y_col = require_column(path, &headers, "y")?;
    let mut vertices = Vec::new();
    let mut rows = Vec::new();
    for (i, record) in reader.records().enumerate() {
        let record = record.map_err(|e| IngestError::parse(path, i + 2, e.to_string()))?;
        let row = record_row(&record, i + 2);
        let id = parse_field(path, row, "id", record.get(id_col).unwrap_or(""))?;
        let x = parse_field(path, row, "x", record.get(x_col).unwrap_or(""))?;
        let y = parse_field(path, row, "y", record.get(y_col).unwrap_or(""))?;
        vertices.push(SpatialVertex::new(id, x, y));
        rows.push(row);
    }
    Ok((vertices, rows))
}

fn load_edges(path: &Path) -> Result<(Vec<EdgeSpec>, Vec<usize>), IngestError> {
    let mut reader = reader_for(path)?;
    let headers = reader
        .headers()
        .map_err(|e| IngestError::parse(path, 1, e.to_string()))?
        .clone();
    let id_col = require_column(path, &headers, "id")?;
    let tail_col = require_column(path, &headers, "tail")?;
    let head_col = require_column(path, &headers, "head")?;
    let kind_col = require_column(path, &headers, "kind")?;
    let length_col = column_index(&headers, "length");
    let wkt_col = column_index(&headers, "wkt_polyline");
    let mut specs = Vec::new();
    let mut rows = Vec::new();
    for (i, record) in reader.records().enumerate() {
        let record = record.map_err(|e| IngestError::parse(path, i + 2, e.to_string()))?;
        let row = record_row(&record, i + 2);
        let kind = match record.get(kind_col).unwrap_or("") {
            "U" | "u" => EdgeKind::Undirected,
            "D" | "d" => EdgeKind::Directed,
            other => {
                return Err(IngestError::parse(
                    path,
                    row,
                    format!("edge kind must be U or D, got '{other}'"),
                ))
            }
        };
        let length = match optional_field(&record, length_col) {
            Some(text) => Some(parse_field(path, row, "length", &text)?),
            None => None,
        };
        let geometry = match optional_field(&record, wkt_col) {
            Some(text) => Some(parse_wkt_linestring(&text).ok_or_else(|| {
                IngestError::parse(path, row, format!("cannot parse wkt_polyline '{text}'"))
            })?),
            None => None,
        };
        specs.push(EdgeSpec {
            id: parse_field(path, row, "id", record.get(id_col).unwrap_or(""))?,
            tail: parse_field(path, row, "tail", record.get(tail_col).unwrap_or(""))?,
            head: parse_field(path, row, "head", record.get(head_col).unwrap_or(""))?,
            kind,
            geometry,
            length,
        });
        rows.push(row);
    }
    Ok((specs, rows))
}

/// Translate a build failure into a file-positioned parse error where the
/// failing row is known.
fn build_error_with_rows(
    edges_path: &Path,
    vertices_path: &Path,
    specs: &[EdgeSpec],
    edge_rows: &[usize],
    vertex_rows: &[usize],
    err: GraphError,
) -> IngestError {
    let row_of_edge = |edge: usize| {
        specs
            .iter()
            .position(|s| s.id == edge)
            .and_then(|slot| edge_rows.get(slot))
            .copied()
    };
    match &err {
        GraphError::DuplicateEdge { first, second } => {
            let (r1, r2) = (row_of_edge(*first), row_of_edge(*second));
            IngestError::parse(
                edges_path,
                r2.unwrap_or(0),
                format!(
                    "edge {second} repeats the vertex pair of edge {first} (rows {} and {})",
                    r1.unwrap_or(0),
                    r2.unwrap_or(0)
                ),
            )
        }
        GraphError::SelfLoop { edge }
        | GraphError::DanglingReference { edge, .. }
        | GraphError::NonPositiveLength { edge }
        | GraphError::GeometryMismatch { edge }
        | GraphError::PartiallyDirectedCycle { edge }
        | GraphError::DuplicateEdgeId { edge } => match row_of_edge(*edge) {
            Some(row) => IngestError::parse(edges_path, row, err.to_string()),
            None => IngestError::Graph(err),
        },
        GraphError::NonFiniteCoordinate { vertex } | GraphError::DuplicateVertexId { vertex } => {
            match vertex_rows.get(*vertex).copied() {
                Some(row) => IngestError::parse(vertices_path, row, err.to_string()),
                None => IngestError::Graph(err),
            }
        }
        _ => IngestError::Graph(err),
    }
}

/// Load and validate a network from a vertex CSV and an edge CSV.
pub fn load_network(
    vertices_path: &Path,
    edges_path: &Path,
) -> Result<(NetworkGraph, IngestReport), IngestError> {
    let (vertices, vertex_rows) = load_vertices(vertices_path)?;
    let (specs, edge_rows) = load_edges(edges_path)?;
    let graph = NetworkGraph::build(vertices, specs.clone()).map_err(|err| {
        build_error_with_rows(edges_path, vertices_path, &specs, &edge_rows, &vertex_rows, err)
    })?;
    let report = IngestReport {
        vertices_read: graph.vertex_count(),
        edges_read: graph.edge_count(),
        isolated_vertices: isolated_vertices(&graph),
        ..IngestReport::default()
    };
    Ok((graph, report))
}

/// Vertices with no incident edge of any kind.
pub fn isolated_vertices(graph: &NetworkGraph) -> Vec<VertexId> {
    (0..graph.vertex_count())
        .filter(|&v| graph.degree(v, DegreeMode::Complete).unwrap() == 0)
        .collect()
}

/// Load a network from a GeoJSON FeatureCollection: Point features carry
/// vertices (`id` property), LineString features carry edges (`id`, `tail`,
/// `head`, optional `kind` U/D, optional `length`); the line coordinates
/// become the edge geometry.
pub fn load_network_geojson(path: &Path) -> Result<(NetworkGraph, IngestReport), IngestError> {
    let text = std::fs::read_to_string(path).map_err(|e| IngestError::io(path, e))?;
    let root: serde_json::Value = serde_json::from_str(&text)
        .map_err(|e| IngestError::parse(path, e.line(), e.to_string()))?;
    let features = root
        .get("features")
        .and_then(|f| f.as_array())
        .ok_or_else(|| IngestError::parse(path, 1, "expected a FeatureCollection"))?;
    let mut vertices = Vec::new();
    let mut specs = Vec::new();
    for (i, feature) in features.iter().enumerate() {
        let geometry = feature.get("geometry").unwrap_or(&serde_json::Value::Null);
        let props = feature.get("properties").unwrap_or(&serde_json::Value::Null);
        let bad = |msg: String| IngestError::parse(path, i + 1, msg);
        let prop_usize = |name: &str| -> Result<usize, IngestError> {
            props
                .get(name)
                .and_then(|v| v.as_u64())
                .map(|v| v as usize)
                .ok_or_else(|| bad(format!("feature {i} needs integer property '{name}'")))
        };
        match geometry.get("type").and_then(|t| t.as_str()) {
            Some("Point") => {
                let coords = geometry
                    .get("coordinates")
                    .and_then(|c| c.as_array())
                    .ok_or_else(|| bad("point without coordinates".into()))?;
                if coords.len() < 2 {
                    return Err(bad("point needs two coordinates".into()));
                }
                vertices.push(SpatialVertex::new(
                    prop_usize("id")?,
                    coords[0].as_f64().unwrap_or(f64::NAN),
                    coords[1].as_f64().unwrap_or(f64::NAN),
                ));
            }
            Some("LineString") => {
                let coords = geometry
                    .get("coordinates")
                    .and_then(|c| c.as_array())
                    .ok_or_else(|| bad("linestring without coordinates".into()))?;
                let mut geometry_points = Vec::with_capacity(coords.len());
                for c in coords {
                    let pair = c.as_array().ok_or_else(|| bad("bad coordinate pair".into()))?;
                    if pair.len() < 2 {
                        return Err(bad("bad coordinate pair".into()));
                    }
                    geometry_points.push((
                        pair[0].as_f64().unwrap_or(f64::NAN),
                        pair[1].as_f64().unwrap_or(f64::NAN),
                    ));
                }
                let kind = match props.get("kind").and_then(|k| k.as_str()).unwrap_or("U") {
                    "U" | "u" => EdgeKind::Undirected,
                    "D" | "d" => EdgeKind::Directed,
                    other => return Err(bad(format!("edge kind must be U or D, got '{other}'"))),
                };
                specs.push(EdgeSpec {
                    id: prop_usize("id")?,
                    tail: prop_usize("tail")?,
                    head: prop_usize("head")?,
                    kind,
                    geometry: Some(geometry_points),
                    length: props.get("length").and_then(|l| l.as_f64()),
                });
            }
            _ => {
                return Err(bad(format!("feature {i} has unsupported geometry")));
            }
        }
    }
    let graph = NetworkGraph::build(vertices, specs)?;
    let report = IngestReport {
        vertices_read: graph.vertex_count(),
        edges_read: graph.edge_count(),
        isolated_vertices: isolated_vertices(&graph),
        ..IngestReport::default()
    };
    Ok((graph, report))
}

/// Read planar events: columns `x,y` with optional `mark` and `time`.
pub fn load_events(path: &Path) -> Result<Vec<RawEvent>, IngestError> {
    let mut reader = reader_for(path)?;
    let headers = reader
        .headers()
        .map_err(|e| IngestError::parse(path, 1, e.to_string()))?
        .clone();
    let x_col = require_column(path, &headers, "x")?;
    let y_col = require_column(path, &headers, "y")?;
    let mark_col = column_index(&headers, "mark");
    let time_col = column_index(&headers, "time");
    let mut events = Vec::new();
    for (i, record) in reader.records().enumerate() {
        let record = record.map_err(|e| IngestError::parse(path, i + 2, e.to_string()))?;
        let row = record_row(&record, i + 2);
        let time = match optional_field(&record, time_col) {
            Some(text) => Some(parse_field(path, row, "time", &text)?),
            None => None,
        };
        events.push(RawEvent {
            row,
            x: parse_field(path, row, "x", record.get(x_col).unwrap_or(""))?,
            y: parse_field(path, row, "y", record.get(y_col).unwrap_or(""))?,
            mark: optional_field(&record, mark_col),
            time,
        });
    }
    Ok(events)
}

/// Closest point to (x, y) on an edge: (planar distance, metric offset).
fn project_onto_edge(graph: &NetworkGraph, edge: &Edge, x: f64, y: f64) -> (f64, f64) {
    let polyline: Vec<(f64, f64)> = match &edge.geometry {
        Some(g) => g.clone(),
        None => {
            let t = graph.vertex(edge.tail).unwrap();
            let h = graph.vertex(edge.head).unwrap();
            vec![(t.x, t.y), (h.x, h.y)]
        }
    };
    let mut geo_total = 0.0;
    let mut best = (f64::INFINITY, 0.0);
    for w in polyline.windows(2) {
        let (ax, ay) = w[0];
        let (bx, by) = w[1];
        let (dx, dy) = (bx - ax, by - ay);
        let seg_len2 = dx * dx + dy * dy;
        let t = if seg_len2 > 0.0 {
            (((x - ax) * dx + (y - ay) * dy) / seg_len2).clamp(0.0, 1.0)
        } else {
            0.0
        };
        let (px, py) = (ax + t * dx, ay + t * dy);
        let dist = ((x - px).powi(2) + (y - py).powi(2)).sqrt();
        if dist < best.0 {
            best = (dist, geo_total + t * seg_len2.sqrt());
        }
        geo_total += seg_len2.sqrt();
    }
    let geo_offset = best.1;
    let metric_offset = if geo_total > 0.0 {
        (geo_offset / geo_total * edge.length).clamp(0.0, edge.length)
    } else {
        0.0
    };
    (best.0, metric_offset)
}

/// Snap planar events onto their nearest edges. Events farther than
/// `tolerance` from every edge are rejected and reported; exact distance
/// ties go to the lowest edge id.
pub fn snap_events(
    graph: &NetworkGraph,
    raw: &[RawEvent],
    tolerance: f64,
) -> Result<(EventSet, IngestReport), IngestError> {
    if !(tolerance > 0.0) || !tolerance.is_finite() {
        return Err(IngestError::BadTolerance { tolerance });
    }
    let mut snapped = Vec::new();
    let mut rejected = Vec::new();
    for event in raw {
        let mut best: Option<(f64, usize, f64)> = None;
        for edge in graph.edges() {
            let (dist, offset) = project_onto_edge(graph, edge, event.x, event.y);
            if best.is_none_or(|(d, _, _)| dist < d) {
                best = Some((dist, edge.id, offset));
            }
        }
        match best {
            Some((dist, edge, offset)) if dist <= tolerance => {
                snapped.push(EventRecord {
                    position: NetPoint::new(edge, offset),
                    mark: event.mark.clone(),
                    time: event.time,
                });
            }
            Some((dist, _, _)) => rejected.push(RejectedEvent {
                row: event.row,
                x: event.x,
                y: event.y,
                reason: format!("distance {dist} to the nearest edge exceeds {tolerance}"),
            }),
            None => rejected.push(RejectedEvent {
                row: event.row,
                x: event.x,
                y: event.y,
                reason: "network has no edges".to_string(),
            }),
        }
    }
    let report = IngestReport {
        events_read: raw.len(),
        snapped: snapped.len(),
        rejected,
        ..IngestReport::default()
    };
    let set = EventSet::new(graph, snapped)?;
    Ok((set, report))
}

fn write_text(path: &Path, text: &str) -> Result<(), IngestError> {
    std::fs::write(path, text).map_err(|e| IngestError::io(path, e))
}

/// Serialize the network back to the two-CSV form at full float precision.
pub fn save_network(
    graph: &NetworkGraph,
    vertices_path: &Path,
    edges_path: &Path,
) -> Result<(), IngestError> {
    let mut vtext = String::from("id,x,y\n");
    for v in graph.vertices() {
        let _ = writeln!(vtext, "{},{},{}", v.id, v.x, v.y);
    }
    write_text(vertices_path, &vtext)?;
    let mut etext = String::from("id,tail,head,kind,length,wkt_polyline\n");
    for e in graph.edges() {
        let kind = match e.kind {
            EdgeKind::Undirected => "U",
            EdgeKind::Directed => "D",
        };
        let wkt = e
            .geometry
            .as_ref()
            .map(|g| format!("\"{}\"", format_wkt_linestring(g)))
            .unwrap_or_default();
        let _ = writeln!(etext, "{},{},{},{},{},{}", e.id, e.tail, e.head, kind, e.length, wkt);
    }
    write_text(edges_path, &etext)
}

/// Serialize events with planar coordinates interpolated from their network
/// positions; `mark` and `time` columns are left empty where absent.
pub fn save_events(
    graph: &NetworkGraph,
    events: &EventSet,
    path: &Path,
) -> Result<(), IngestError> {
    let mut text = String::from("x,y,mark,time\n");
    for ev in events.events() {
        let (x, y) = point_coords(graph, ev.position).map_err(IntensityError::from)?;
        let mark = ev.mark.as_deref().unwrap_or("");
        let time = ev.time.map(|t| t.to_string()).unwrap_or_default();
        let _ = writeln!(text, "{x},{y},{mark},{time}");
    }
    write_text(path, &text)
}

/// A human-readable validation summary for one loaded network.
pub fn describe_network(graph: &NetworkGraph, report: &IngestReport) -> String {
    let undirected = graph
        .edges()
        .iter()
        .filter(|e| e.kind == EdgeKind::Undirected)
        .count();
    let mut text = String::new();
    let _ = writeln!(
        text,
        "network: {} vertices, {} edges ({} undirected, {} directed)",
        graph.vertex_count(),
        graph.edge_count(),
        undirected,
        graph.edge_count() - undirected
    );
    let _ = writeln!(text, "total length: {}", graph.total_length());
    if report.isolated_vertices.is_empty() {
        let _ = writeln!(text, "isolated vertices: none");
    } else {
        let _ = writeln!(
            text,
            "isolated vertices: {} ({:?})",
            report.isolated_vertices.len(),
            report.isolated_vertices
        );
    }
    text
}

/// Degree histogram under a degree mode, as degree → vertex count.
pub fn degree_histogram(graph: &NetworkGraph, mode: DegreeMode) -> BTreeMap<usize, usize> {
    let mut histogram = BTreeMap::new();
    for v in 0..graph.vertex_count() {
        *histogram.entry(graph.degree(v, mode).unwrap()).or_insert(0) += 1;
    }
    histogram
}

#[cfg(test)]
mod tests {
    use super::*;
    use tempfile::TempDir;

    fn write(dir: &TempDir, name: &str, contents: &str) -> std::path::PathBuf {
        let path = dir.path().join(name);
        std::fs::write(&path, contents).unwrap();
        path
    }

    fn square_files(dir: &TempDir) -> (std::path::PathBuf, std::path::PathBuf) {
        let v = write(dir, "vertices.csv", "id,x,y\n0,0,0\n1,1,0\n2,1,1\n3,0,1\n");
        let e = write(
            dir,
            "edges.csv",
            "id,tail,head,kind\n0,0,1,U\n1,1,2,U\n2,2,3,U\n3,3,0,U\n",
        );
        (v, e)
    }

    #[test]
    fn loads_the_square() {
        let dir = TempDir::new().unwrap();
        let (v, e) = square_files(&dir);
        let (graph, report) = load_network(&v, &e).unwrap();
        assert_eq!(graph.vertex_count(), 4);
        assert_eq!(graph.edge_count(), 4);
        assert_eq!(report.vertices_read, 4);
        assert!(report.isolated_vertices.is_empty());
    }

    #[test]
    fn reports_dangling_reference_with_row() {
        let dir = TempDir::new().unwrap();
        let v = write(&dir, "v.csv", "id,x,y\n0,0,0\n1,1,0\n");
        let e = write(&dir, "e.csv", "id,tail,head,kind\n0,0,1,U\n1,1,9,U\n");
        let err = load_network(&v, &e).unwrap_err();
        match err {
            IngestError::Parse { row, message, .. } => {
                assert_eq!(row, 3);
                assert!(message.contains("unknown vertex 9"), "{message}");
            }
            other => panic!("unexpected error {other:?}"),
        }
    }

    #[test]
    fn reports_duplicate_edge_with_both_rows() {
        let dir = TempDir::new().unwrap();
        let v = write(&dir, "v.csv", "id,x,y\n0,0,0\n1,1,0\n");
        let e = write(&dir, "e.csv", "id,tail,head,kind\n0,0,1,U\n1,1,0,D\n");
        let err = load_network(&v, &e).unwrap_err();
        match err {
            IngestError::Parse { row, message, .. } => {
                assert_eq!(row, 3);
                assert!(message.contains("rows 2 and 3"), "{message}");
            }
            other => panic!("unexpected error {other:?}"),
        }
    }

    #[test]
    fn bad_kind_is_a_parse_error() {
        let dir = TempDir::new().unwrap();
        let v = write(&dir, "v.csv", "id,x,y\n0,0,0\n1,1,0\n");
        let e = write(&dir, "e.csv", "id,tail,head,kind\n0,0,1,X\n");
        assert!(matches!(load_network(&v, &e), Err(IngestError::Parse { row: 2, .. })));
    }

    #[test]
    fn missing_column_points_at_the_header() {
        let dir = TempDir::new().unwrap();
        let v = write(&dir, "v.csv", "id,x\n0,0\n");
        let e = write(&dir, "e.csv", "id,tail,head,kind\n");
        assert!(matches!(load_network(&v, &e), Err(IngestError::Parse { row: 1, .. })));
    }

    #[test]
    fn wkt_and_length_columns() {
        let dir = TempDir::new().unwrap();
        let v = write(&dir, "v.csv", "id,x,y\n0,0,0\n1,2,0\n2,5,5\n");
        let e = write(
            &dir,
            "e.csv",
            "id,tail,head,kind,length,wkt_polyline\n\
             0,0,1,U,,\"LINESTRING (0 0, 1 0, 1 1, 2 1, 2 0)\"\n\
             1,1,2,D,7.25,\n",
        );
        let (graph, _) = load_network(&v, &e).unwrap();
        assert_eq!(graph.edge(0).unwrap().length, 4.0);
        assert_eq!(graph.edge(1).unwrap().length, 7.25);
        assert_eq!(graph.edge(1).unwrap().kind, EdgeKind::Directed);
    }

    #[test]
    fn network_round_trips_bit_exactly() {
        let dir = TempDir::new().unwrap();
        let v = write(
            &dir,
            "v.csv",
            "id,x,y\n0,0.1,0.30000000000000004\n1,2.7182818284590455,0\n2,5,5\n",
        );
        let e = write(
            &dir,
            "e.csv",
            "id,tail,head,kind,length,wkt_polyline\n\
             0,0,1,U,1.4142135623730951,\n\
             1,1,2,D,,\n",
        );
        let (graph, _) = load_network(&v, &e).unwrap();
        let v2 = dir.path().join("v2.csv");
        let e2 = dir.path().join("e2.csv");
        save_network(&graph, &v2, &e2).unwrap();
        let (again, _) = load_network(&v2, &e2).unwrap();
        assert_eq!(graph.vertices(), again.vertices());
        for (a, b) in graph.edges().iter().zip(again.edges()) {
            assert_eq!(a.tail, b.tail);
            assert_eq!(a.kind, b.kind);
            assert_eq!(a.length.to_bits(), b.length.to_bits());
        }
    }

    #[test]
    fn geometry_survives_the_round_trip() {
        let dir = TempDir::new().unwrap();
        let v = write(&dir, "v.csv", "id,x,y\n0,0,0\n1,2,0\n");
        let e = write(
            &dir,
            "e.csv",
            "id,tail,head,kind,length,wkt_polyline\n0,0,1,U,,\"LINESTRING (0 0, 1 0.5, 2 0)\"\n",
        );
        let (graph, _) = load_network(&v, &e).unwrap();
        let v2 = dir.path().join("v2.csv");
        let e2 = dir.path().join("e2.csv");
        save_network(&graph, &v2, &e2).unwrap();
        let (again, _) = load_network(&v2, &e2).unwrap();
        assert_eq!(graph.edge(0).unwrap().geometry, again.edge(0).unwrap().geometry);
        assert_eq!(
            graph.edge(0).unwrap().length.to_bits(),
            again.edge(0).unwrap().length.to_bits()
        );
    }

    #[test]
    fn snaps_onto_the_nearest_edge() {
        let dir = TempDir::new().unwrap();
        let (v, e) = square_files(&dir);
        let (graph, _) = load_network(&v, &e).unwrap();
        let raw = vec![RawEvent { row: 2, x: 0.5, y: 0.1, mark: None, time: None }];
        let (events, report) = snap_events(&graph, &raw, 0.2).unwrap();
        assert_eq!(report.snapped, 1);
        let p = events.events()[0].position;
        assert_eq!(p.edge, 0);
        assert!((p.offset - 0.5).abs() < 1e-12);
    }

    #[test]
    fn equidistant_snap_takes_the_lower_edge_id() {
        let dir = TempDir::new().unwrap();
        let (v, e) = square_files(&dir);
        let (graph, _) = load_network(&v, &e).unwrap();
        // The square's center is 0.5 from all four edges.
        let raw = vec![RawEvent { row: 2, x: 0.5, y: 0.5, mark: None, time: None }];
        let (events, _) = snap_events(&graph, &raw, 1.0).unwrap();
        assert_eq!(events.events()[0].position.edge, 0);
    }

    #[test]
    fn far_events_are_rejected_with_reasons() {
        let dir = TempDir::new().unwrap();
        let (v, e) = square_files(&dir);
        let (graph, _) = load_network(&v, &e).unwrap();
        let raw = vec![
            RawEvent { row: 2, x: 0.5, y: 0.05, mark: None, time: None },
            RawEvent { row: 3, x: 5.0, y: 5.0, mark: None, time: None },
        ];
        let (events, report) = snap_events(&graph, &raw, 0.2).unwrap();
        assert_eq!(events.len(), 1);
        assert_eq!(report.events_read, 2);
        assert_eq!(report.snapped, 1);
        assert_eq!(report.rejected.len(), 1);
        assert_eq!(report.rejected[0].row, 3);
        assert_eq!(report.snapped + report.rejected.len(), report.events_read);
    }

    #[test]
    fn snapping_is_idempotent() {
        let dir = TempDir::new().unwrap();
        let (v, e) = square_files(&dir);
        let (graph, _) = load_network(&v, &e).unwrap();
        let raw = vec![RawEvent { row: 2, x: 0.37, y: -0.08, mark: None, time: None }];
        let (events, _) = snap_events(&graph, &raw, 0.5).unwrap();
        let p = events.events()[0].position;
        let (x, y) = point_coords(&graph, p).unwrap();
        let again = vec![RawEvent { row: 2, x, y, mark: None, time: None }];
        let (events2, _) = snap_events(&graph, &again, 0.5).unwrap();
        let q = events2.events()[0].position;
        assert_eq!(p.edge, q.edge);
        assert!((p.offset - q.offset).abs() < 1e-9);
    }

    #[test]
    fn snap_projects_onto_polyline_geometry() {
        let dir = TempDir::new().unwrap();
        let v = write(&dir, "v.csv", "id,x,y\n0,0,0\n1,2,0\n");
        let e = write(
            &dir,
            "e.csv",
            "id,tail,head,kind,length,wkt_polyline\n0,0,1,U,,\"LINESTRING (0 0, 1 0, 1 1, 2 1, 2 0)\"\n",
        );
        let (graph, _) = load_network(&v, &e).unwrap();
        // Nearest polyline point to (1.5, 1.2) lies on the (1,1)→(2,1) leg.
        let raw = vec![RawEvent { row: 2, x: 1.5, y: 1.2, mark: None, time: None }];
        let (events, _) = snap_events(&graph, &raw, 0.5).unwrap();
        let p = events.events()[0].position;
        assert!((p.offset - 2.5).abs() < 1e-12);
    }

    #[test]
    fn events_load_with_marks_and_times() {
        let dir = TempDir::new().unwrap();
        let path = write(
            &dir,
            "events.csv",
            "x,y,mark,time\n0.5,0.1,theft,3.5\n0.2,0.9,,\n",
        );
        let events = load_events(&path).unwrap();
        assert_eq!(events.len(), 2);
        assert_eq!(events[0].mark.as_deref(), Some("theft"));
        assert_eq!(events[0].time, Some(3.5));
        assert_eq!(events[1].mark, None);
        assert_eq!(events[1].time, None);
    }

    #[test]
    fn events_round_trip_through_planar_coordinates() {
        let dir = TempDir::new().unwrap();
        let (v, e) = square_files(&dir);
        let (graph, _) = load_network(&v, &e).unwrap();
        let raw = vec![RawEvent {
            row: 2,
            x: 0.25,
            y: 0.0,
            mark: Some("m".into()),
            time: Some(1.5),
        }];
        let (events, _) = snap_events(&graph, &raw, 0.1).unwrap();
        let path = dir.path().join("out.csv");
        save_events(&graph, &events, &path).unwrap();
        let loaded = load_events(&path).unwrap();
        assert_eq!(loaded.len(), 1);
        assert!((loaded[0].x - 0.25).abs() < 1e-12);
        assert_eq!(loaded[0].mark.as_deref(), Some("m"));
        assert_eq!(loaded[0].time, Some(1.5));
    }

    #[test]
    fn geojson_network_loads() {
        let dir = TempDir::new().unwrap();
        let path = write(
            &dir,
            "net.geojson",
            r#"{
              "type": "FeatureCollection",
              "features": [
                {"type": "Feature", "geometry": {"type": "Point", "coordinates": [0, 0]}, "properties": {"id": 0}},
                {"type": "Feature", "geometry": {"type": "Point", "coordinates": [1, 0]}, "properties": {"id": 1}},
                {"type": "Feature", "geometry": {"type": "LineString", "coordinates": [[0, 0], [1, 0]]}, "properties": {"id": 0, "tail": 0, "head": 1, "kind": "D"}}
              ]
            }"#,
        );
        let (graph, report) = load_network_geojson(&path).unwrap();
        assert_eq!(graph.vertex_count(), 2);
        assert_eq!(graph.edge(0).unwrap().kind, EdgeKind::Directed);
        assert_eq!(graph.edge(0).unwrap().length, 1.0);
        assert_eq!(report.edges_read, 1);
    }

    #[test]
    fn isolated_vertices_are_listed() {
        let dir = TempDir::new().unwrap();
        let v = write(&dir, "v.csv", "id,x,y\n0,0,0\n1,1,0\n2,9,9\n");
        let e = write(&dir, "e.csv", "id,tail,head,kind\n0,0,1,U\n");
        let (_, report) = load_network(&v, &e).unwrap();
        assert_eq!(report.isolated_vertices, vec![2]);
    }

    #[test]
    fn degree_histogram_of_the_square() {
        let dir = TempDir::new().unwrap();
        let (v, e) = square_files(&dir);
        let (graph, _) = load_network(&v, &e).unwrap();
        let histogram = degree_histogram(&graph, DegreeMode::Undirected);
        assert_eq!(histogram.get(&2), Some(&4));
        assert_eq!(histogram.len(), 1);
    }

    #[test]
    fn wkt_parser_rejects_junk() {
        assert!(parse_wkt_linestring("LINESTRING (0 0, 1 1)").is_some());
        assert!(parse_wkt_linestring("LINESTRING (0 0)").is_none());
        assert!(parse_wkt_linestring("POLYGON ((0 0))").is_none());
        assert!(parse_wkt_linestring("LINESTRING (0 0, 1)").is_none());
    }
}
