//! Counting measures and intensity estimators for events on a network:
//! per-edge counts and rates, neighborhood/path/directional/combined
//! averages, and counting over time slices.
//!
//! The base estimator is events-per-unit-length on an edge; everything else
//! is an arithmetic mean of edge rates over some incident edge set. All
//! estimators accept an optional mark filter so marked patterns can be
//! decomposed per category.

use thiserror::Error;

use crate::graph::{EdgeId, GraphError, NetworkGraph, SequenceClass, VertexEdgeSequence, VertexId};
use crate::metric::{MetricError, NetPoint};

#[derive(Debug, Error, PartialEq)]
pub enum IntensityError {
    #[error(transparent)]
    Metric(#[from] MetricError),
    #[error("unknown edge {edge}")]
    UnknownEdge { edge: EdgeId },
    #[error("unknown vertex {vertex}")]
    UnknownVertex { vertex: VertexId },
    #[error("vertex {vertex} has no undirected incident edges")]
    IsolatedVertex { vertex: VertexId },
    #[error("sequence does not classify as a path")]
    NotAPath,
    #[error("vertex {vertex} has no incident edges on the requested side")]
    EmptyIncidenceSet { vertex: VertexId },
    #[error("event {index} carries no timestamp")]
    MissingTime { index: usize },
    #[error("event {index} has a negative or non-finite timestamp")]
    BadTime { index: usize },
    #[error("time grid needs at least two strictly increasing non-negative breakpoints")]
    BadTimeGrid,
    #[error("cutoff {t} lies before the grid start {start}")]
    CutoffBeforeGrid { t: f64, start: f64 },
}

/// One observed event: a network position, an optional category mark and an
/// optional occurrence time.
#[derive(Debug, Clone, PartialEq)]
pub struct EventRecord {
    pub position: NetPoint,
    pub mark: Option<String>,
    pub time: Option<f64>,
}

impl EventRecord {
    pub fn at(edge: EdgeId, offset: f64) -> Self {
        EventRecord { position: NetPoint::new(edge, offset), mark: None, time: None }
    }

    pub fn with_mark(mut self, mark: &str) -> Self {
        self.mark = Some(mark.to_string());
        self
    }

    pub fn with_time(mut self, time: f64) -> Self {
        self.time = Some(time);
        self
    }
}

/// A validated event list with a per-edge index and the observed category
/// set. Duplicate positions are allowed — the pattern need not be simple.
#[derive(Debug, Clone)]
pub struct EventSet {
    events: Vec<EventRecord>,
    per_edge: Vec<Vec<usize>>,
    categories: Vec<String>,
}

impl EventSet {
    /// Validate positions and times against the graph and index the events.
    pub fn new(graph: &NetworkGraph, events: Vec<EventRecord>) -> Result<Self, IntensityError> {
        let mut per_edge: Vec<Vec<usize>> = vec![Vec::new(); graph.edge_count()];
        for (i, ev) in events.iter().enumerate() {
            let edge = graph
                .edges()
                .get(ev.position.edge)
                .ok_or(MetricError::UnknownEdge { edge: ev.position.edge })?;
            if !ev.position.offset.is_finite()
                || ev.position.offset < 0.0
                || ev.position.offset > edge.length
            {
                return Err(MetricError::InvalidOffset {
                    edge: ev.position.edge,
                    offset: ev.position.offset,
                    length: edge.length,
                }
                .into());
            }
            if let Some(t) = ev.time {
                if !t.is_finite() || t < 0.0 {
                    return Err(IntensityError::BadTime { index: i });
                }
            }
            per_edge[ev.position.edge].push(i);
        }
        let mut categories: Vec<String> =
            events.iter().filter_map(|e| e.mark.clone()).collect();
        categories.sort();
        categories.dedup();
        Ok(EventSet { events, per_edge, categories })
    }

    pub fn events(&self) -> &[EventRecord] {
        &self.events
    }

    pub fn len(&self) -> usize {
        self.events.len()
    }

    pub fn is_empty(&self) -> bool {
        self.events.is_empty()
    }

    /// Indices of the events hosted on edge `e`.
    pub fn on_edge(&self, e: EdgeId) -> Result<&[usize], IntensityError> {
        self.per_edge
            .get(e)
            .map(|v| v.as_slice())
            .ok_or(IntensityError::UnknownEdge { edge: e })
    }

    /// Distinct marks observed, sorted.
    pub fn categories(&self) -> &[String] {
        &self.categories
    }

    pub fn positions(&self) -> Vec<NetPoint> {
        self.events.iter().map(|e| e.position).collect()
    }

    fn matches(&self, index: usize, mark: Option<&str>) -> bool {
        match mark {
            None => true,
            Some(m) => self.events[index].mark.as_deref() == Some(m),
        }
    }
}

/// Number of events hosted on edge `e`, optionally restricted to one mark.
pub fn count_on_edge(
    events: &EventSet,
    e: EdgeId,
    mark: Option<&str>,
) -> Result<usize, IntensityError> {
    Ok(events.on_edge(e)?.iter().filter(|&&i| events.matches(i, mark)).count())
}

/// Events per unit length on edge `e`.
pub fn edge_intensity(
    graph: &NetworkGraph,
    events: &EventSet,
    e: EdgeId,
    mark: Option<&str>,
) -> Result<f64, IntensityError> {
    let edge = graph.edge(e).map_err(|_| IntensityError::UnknownEdge { edge: e })?;
    Ok(count_on_edge(events, e, mark)? as f64 / edge.length)
}

fn mean_over_edges(
    graph: &NetworkGraph,
    events: &EventSet,
    edges: &[EdgeId],
    mark: Option<&str>,
) -> Result<f64, IntensityError> {
    let sum: f64 = edges
        .iter()
        .map(|&e| edge_intensity(graph, events, e, mark))
        .sum::<Result<f64, _>>()?;
    Ok(sum / edges.len() as f64)
}

fn graph_err(err: GraphError) -> IntensityError {
    match err {
        GraphError::UnknownVertex { vertex } => IntensityError::UnknownVertex { vertex },
        GraphError::UnknownEdge { edge } => IntensityError::UnknownEdge { edge },
        _ => IntensityError::NotAPath,
    }
}

/// Mean edge intensity over the undirected edges incident to `v`.
pub fn neighborhood_intensity(
    graph: &NetworkGraph,
    events: &EventSet,
    v: VertexId,
    mark: Option<&str>,
) -> Result<f64, IntensityError> {
    let incident = graph.undirected_edges(v).map_err(graph_err)?;
    if incident.is_empty() {
        return Err(IntensityError::IsolatedVertex { vertex: v });
    }
    mean_over_edges(graph, events, incident, mark)
}

/// Mean edge intensity along a path's edges. The sequence must classify as
/// a path with at least one edge.
pub fn path_intensity(
    graph: &NetworkGraph,
    events: &EventSet,
    path: &VertexEdgeSequence,
    mark: Option<&str>,
) -> Result<f64, IntensityError> {
    if graph.classify_sequence(path) != SequenceClass::Path || path.is_empty() {
        return Err(IntensityError::NotAPath);
    }
    mean_over_edges(graph, events, &path.edges, mark)
}

/// Total event counts on the arcs arriving at and departing from `v`.
pub fn directional_counts(
    graph: &NetworkGraph,
    events: &EventSet,
    v: VertexId,
    mark: Option<&str>,
) -> Result<(usize, usize), IntensityError> {
    let count = |edges: &[EdgeId]| -> Result<usize, IntensityError> {
        edges.iter().map(|&e| count_on_edge(events, e, mark)).sum()
    };
    let incoming = count(graph.incoming_edges(v).map_err(graph_err)?)?;
    let outgoing = count(graph.outgoing_edges(v).map_err(graph_err)?)?;
    Ok((incoming, outgoing))
}

/// Which directed side of a vertex a directional estimate covers.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    In,
    Out,
}

/// Mean edge intensity over the arcs on one side of `v`.
pub fn directional_intensity(
    graph: &NetworkGraph,
    events: &EventSet,
    v: VertexId,
    side: Side,
    mark: Option<&str>,
) -> Result<f64, IntensityError> {
    let edges = match side {
        Side::In => graph.incoming_edges(v).map_err(graph_err)?,
        Side::Out => graph.outgoing_edges(v).map_err(graph_err)?,
    };
    if edges.is_empty() {
        return Err(IntensityError::EmptyIncidenceSet { vertex: v });
    }
    mean_over_edges(graph, events, edges, mark)
}

/// Which incident edge roles a combined intensity averages over.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum UnionSelector {
    /// Undirected, incoming and outgoing edges together.
    Complete,
    ParentsChildren,
    NeighborsChildren,
    NeighborsParents,
}

/// Mean edge intensity over the union of the selected incident edge sets,
/// each edge counted once.
pub fn complete_intensity(
    graph: &NetworkGraph,
    events: &EventSet,
    v: VertexId,
    selector: UnionSelector,
    mark: Option<&str>,
) -> Result<f64, IntensityError> {
    let undirected = graph.undirected_edges(v).map_err(graph_err)?;
    let incoming = graph.incoming_edges(v).map_err(graph_err)?;
    let outgoing = graph.outgoing_edges(v).map_err(graph_err)?;
    let mut union: Vec<EdgeId> = match selector {
        UnionSelector::Complete => {
            undirected.iter().chain(incoming).chain(outgoing).copied().collect()
        }
        UnionSelector::ParentsChildren => incoming.iter().chain(outgoing).copied().collect(),
        UnionSelector::NeighborsChildren => undirected.iter().chain(outgoing).copied().collect(),
        UnionSelector::NeighborsParents => undirected.iter().chain(incoming).copied().collect(),
    };
    union.sort_unstable();
    union.dedup();
    if union.is_empty() {
        return Err(IntensityError::EmptyIncidenceSet { vertex: v });
    }
    mean_over_edges(graph, events, &union, mark)
}

/// Ordered breakpoints t_0 < t_1 < … < t_n delimiting n left-closed time
/// slices [t_i, t_{i+1}).
#[derive(Debug, Clone, PartialEq)]
pub struct TimeGrid {
    breaks: Vec<f64>,
}

impl TimeGrid {
    pub fn new(breaks: Vec<f64>) -> Result<Self, IntensityError> {
        let increasing = breaks.windows(2).all(|w| w[0] < w[1]);
        let sane = breaks.iter().all(|t| t.is_finite() && *t >= 0.0);
        if breaks.len() < 2 || !increasing || !sane {
            return Err(IntensityError::BadTimeGrid);
        }
        Ok(TimeGrid { breaks })
    }

    pub fn breaks(&self) -> &[f64] {
        &self.breaks
    }

    /// Number of slices: one fewer than the breakpoints.
    pub fn slices(&self) -> usize {
        self.breaks.len() - 1
    }

    /// Slice index holding `t` under the left-closed rule t_i ≤ t < t_{i+1};
    /// `None` when `t` falls outside the grid.
    pub fn slice_of(&self, t: f64) -> Option<usize> {
        let idx = self.breaks.partition_point(|&b| b <= t);
        if idx == 0 || idx == self.breaks.len() {
            None
        } else {
            Some(idx - 1)
        }
    }

    pub fn start(&self) -> f64 {
        self.breaks[0]
    }

    pub fn end(&self) -> f64 {
        *self.breaks.last().unwrap()
    }
}

/// Per-slice counts on one edge, plus how many of its events fell outside
/// the grid window.
#[derive(Debug, Clone, PartialEq)]
pub struct SliceCounts {
    pub per_slice: Vec<usize>,
    pub excluded: usize,
}

impl SliceCounts {
    pub fn total_in_window(&self) -> usize {
        self.per_slice.iter().sum()
    }
}

fn require_times(events: &EventSet) -> Result<(), IntensityError> {
    for (i, ev) in events.events().iter().enumerate() {
        if ev.time.is_none() {
            return Err(IntensityError::MissingTime { index: i });
        }
    }
    Ok(())
}

/// Count the events on edge `e` per time slice. Events timed before the
/// grid start or at/after its end are excluded and tallied, not errors.
pub fn slice_counts(
    events: &EventSet,
    grid: &TimeGrid,
    e: EdgeId,
) -> Result<SliceCounts, IntensityError> {
    require_times(events)?;
    let mut per_slice = vec![0usize; grid.slices()];
    let mut excluded = 0usize;
    for &i in events.on_edge(e)? {
        let t = events.events()[i].time.unwrap();
        match grid.slice_of(t) {
            Some(slice) => per_slice[slice] += 1,
            None => excluded += 1,
        }
    }
    Ok(SliceCounts { per_slice, excluded })
}

/// Number of events on edge `e` in slices wholly completed before time `t`.
pub fn cumulative_count(
    events: &EventSet,
    grid: &TimeGrid,
    e: EdgeId,
    t: f64,
) -> Result<usize, IntensityError> {
    if !(t >= grid.start()) {
        return Err(IntensityError::CutoffBeforeGrid { t, start: grid.start() });
    }
    let counts = slice_counts(events, grid, e)?;
    let complete = grid.breaks().iter().skip(1).filter(|&&b| b <= t).count();
    Ok(counts.per_slice.iter().take(complete).sum())
}

/// Edge and vertex intensities over the whole graph, optionally restricted
/// to one mark. Vertex entries are `None` for isolated vertices.
#[derive(Debug, Clone, PartialEq)]
pub struct IntensityTable {
    pub mark: Option<String>,
    pub edges: Vec<f64>,
    pub vertices: Vec<Option<f64>>,
}

impl IntensityTable {
    pub fn compute(
        graph: &NetworkGraph,
        events: &EventSet,
        mark: Option<&str>,
    ) -> Result<Self, IntensityError> {
        let edges = (0..graph.edge_count())
            .map(|e| edge_intensity(graph, events, e, mark))
            .collect::<Result<Vec<_>, _>>()?;
        let vertices = (0..graph.vertex_count())
            .map(|v| match neighborhood_intensity(graph, events, v, mark) {
                Ok(value) => Ok(Some(value)),
                Err(IntensityError::IsolatedVertex { .. }) => Ok(None),
                Err(other) => Err(other),
            })
            .collect::<Result<Vec<_>, _>>()?;
        Ok(IntensityTable { mark: mark.map(|m| m.to_string()), edges, vertices })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{EdgeKind, EdgeSpec, NetworkGraph, SpatialVertex};

    fn spec_with_length(id: usize, tail: usize, head: usize, length: f64) -> EdgeSpec {
        EdgeSpec {
            id,
            tail,
            head,
            kind: EdgeKind::Undirected,
            geometry: None,
            length: Some(length),
        }
    }

    /// Star around vertex 0 with spokes of length 1, 1, 2, 4.
    fn star() -> NetworkGraph {
        NetworkGraph::build(
            vec![
                SpatialVertex::new(0, 0.0, 0.0),
                SpatialVertex::new(1, 1.0, 0.0),
                SpatialVertex::new(2, 0.0, 1.0),
                SpatialVertex::new(3, -1.0, 0.0),
                SpatialVertex::new(4, 0.0, -1.0),
                SpatialVertex::new(5, 3.0, 3.0),
            ],
            vec![
                spec_with_length(0, 0, 1, 1.0),
                spec_with_length(1, 0, 2, 1.0),
                spec_with_length(2, 0, 3, 2.0),
                spec_with_length(3, 0, 4, 4.0),
            ],
        )
        .unwrap()
    }

    fn set(graph: &NetworkGraph, events: Vec<EventRecord>) -> EventSet {
        EventSet::new(graph, events).unwrap()
    }

    #[test]
    fn counts_per_edge_and_per_mark() {
        let g = star();
        let ev = set(
            &g,
            vec![
                EventRecord::at(0, 0.5).with_mark("a"),
                EventRecord::at(0, 0.25).with_mark("b"),
                EventRecord::at(0, 0.75).with_mark("a"),
                EventRecord::at(1, 0.5),
            ],
        );
        assert_eq!(count_on_edge(&ev, 0, None).unwrap(), 3);
        assert_eq!(count_on_edge(&ev, 0, Some("a")).unwrap(), 2);
        assert_eq!(count_on_edge(&ev, 3, None).unwrap(), 0);
        assert_eq!(ev.categories(), ["a", "b"]);
        assert!(matches!(
            count_on_edge(&ev, 9, None),
            Err(IntensityError::UnknownEdge { edge: 9 })
        ));
    }

    #[test]
    fn empty_set_counts_zero() {
        let g = star();
        let ev = set(&g, vec![]);
        assert_eq!(count_on_edge(&ev, 0, None).unwrap(), 0);
        assert_eq!(edge_intensity(&g, &ev, 0, None).unwrap(), 0.0);
    }

    #[test]
    fn edge_intensity_divides_by_length() {
        let g = star();
        // Three events on the length-2 spoke.
        let ev = set(
            &g,
            vec![EventRecord::at(2, 0.1), EventRecord::at(2, 1.0), EventRecord::at(2, 1.9)],
        );
        assert!((edge_intensity(&g, &ev, 2, None).unwrap() - 1.5).abs() < 1e-12);
    }

    #[test]
    fn invalid_event_positions_are_rejected() {
        let g = star();
        let err = EventSet::new(&g, vec![EventRecord::at(0, 1.5)]).unwrap_err();
        assert!(matches!(err, IntensityError::Metric(MetricError::InvalidOffset { .. })));
        let err = EventSet::new(&g, vec![EventRecord::at(7, 0.0)]).unwrap_err();
        assert!(matches!(err, IntensityError::Metric(MetricError::UnknownEdge { edge: 7 })));
        let err = EventSet::new(&g, vec![EventRecord::at(0, 0.5).with_time(-1.0)]).unwrap_err();
        assert_eq!(err, IntensityError::BadTime { index: 0 });
    }

    #[test]
    fn neighborhood_intensity_averages_spokes() {
        let g = star();
        // Spoke intensities 0, 1, 2, 3: lengths 1, 1, 2, 4 with 0, 1, 4, 12 events.
        let mut events = Vec::new();
        for _ in 0..1 {
            events.push(EventRecord::at(1, 0.5));
        }
        for _ in 0..4 {
            events.push(EventRecord::at(2, 1.0));
        }
        for _ in 0..12 {
            events.push(EventRecord::at(3, 2.0));
        }
        let ev = set(&g, events);
        assert!((neighborhood_intensity(&g, &ev, 0, None).unwrap() - 1.5).abs() < 1e-12);
        assert_eq!(neighborhood_intensity(&g, &set(&g, vec![]), 0, None).unwrap(), 0.0);
        assert_eq!(
            neighborhood_intensity(&g, &ev, 5, None).unwrap_err(),
            IntensityError::IsolatedVertex { vertex: 5 }
        );
    }

    fn path_graph() -> NetworkGraph {
        NetworkGraph::build(
            vec![
                SpatialVertex::new(0, 0.0, 0.0),
                SpatialVertex::new(1, 1.0, 0.0),
                SpatialVertex::new(2, 2.0, 0.0),
                SpatialVertex::new(3, 3.0, 0.0),
            ],
            vec![
                spec_with_length(0, 0, 1, 1.0),
                spec_with_length(1, 1, 2, 1.0),
                spec_with_length(2, 2, 3, 1.0),
            ],
        )
        .unwrap()
    }

    #[test]
    fn path_intensity_means_the_edge_rates() {
        let g = path_graph();
        let mut events = vec![EventRecord::at(0, 0.5)];
        events.extend(std::iter::repeat_n(EventRecord::at(1, 0.5), 2));
        events.extend(std::iter::repeat_n(EventRecord::at(2, 0.5), 3));
        let ev = set(&g, events);
        let path = VertexEdgeSequence::new(vec![0, 1, 2, 3], vec![0, 1, 2]).unwrap();
        assert!((path_intensity(&g, &ev, &path, None).unwrap() - 2.0).abs() < 1e-12);

        let single = VertexEdgeSequence::new(vec![1, 2], vec![1]).unwrap();
        assert!((path_intensity(&g, &ev, &single, None).unwrap() - 2.0).abs() < 1e-12);

        let empty_edges = set(&g, vec![]);
        assert_eq!(path_intensity(&g, &empty_edges, &path, None).unwrap(), 0.0);
    }

    #[test]
    fn non_paths_are_rejected() {
        let g = path_graph();
        let ev = set(&g, vec![]);
        let walk = VertexEdgeSequence::new(vec![0, 1, 0, 1], vec![0, 0, 0]).unwrap();
        assert_eq!(path_intensity(&g, &ev, &walk, None).unwrap_err(), IntensityError::NotAPath);
        let trivial = VertexEdgeSequence::new(vec![0], vec![]).unwrap();
        assert_eq!(path_intensity(&g, &ev, &trivial, None).unwrap_err(), IntensityError::NotAPath);
    }

    /// a→b→c with an undirected spur b~d; all unit lengths.
    fn mixed_chain() -> NetworkGraph {
        NetworkGraph::build(
            vec![
                SpatialVertex::new(0, 0.0, 0.0),
                SpatialVertex::new(1, 1.0, 0.0),
                SpatialVertex::new(2, 2.0, 0.0),
                SpatialVertex::new(3, 1.0, 1.0),
            ],
            vec![
                EdgeSpec::directed(0, 0, 1),
                EdgeSpec::directed(1, 1, 2),
                EdgeSpec::undirected(2, 1, 3),
            ],
        )
        .unwrap()
    }

    #[test]
    fn directional_counts_split_sides() {
        let g = mixed_chain();
        let mut events = Vec::new();
        events.extend(std::iter::repeat_n(EventRecord::at(0, 0.5), 4));
        events.push(EventRecord::at(1, 0.5));
        let ev = set(&g, events);
        assert_eq!(directional_counts(&g, &ev, 1, None).unwrap(), (4, 1));
        // The spur vertex has only an undirected incidence.
        assert_eq!(directional_counts(&g, &ev, 3, None).unwrap(), (0, 0));
    }

    #[test]
    fn directional_counts_at_a_sink() {
        let g = NetworkGraph::build(
            vec![
                SpatialVertex::new(0, 0.0, 0.0),
                SpatialVertex::new(1, 1.0, 0.0),
                SpatialVertex::new(2, 0.0, 1.0),
                SpatialVertex::new(3, 1.0, 1.0),
            ],
            vec![EdgeSpec::directed(0, 1, 0), EdgeSpec::directed(1, 2, 0), EdgeSpec::directed(2, 3, 0)],
        )
        .unwrap();
        let events = (0..3)
            .flat_map(|e| std::iter::repeat_n(EventRecord::at(e, 0.5), 2))
            .collect();
        let ev = set(&g, events);
        assert_eq!(directional_counts(&g, &ev, 0, None).unwrap(), (6, 0));
    }

    #[test]
    fn directional_intensity_means_each_side() {
        // Two in-arcs of length 1 with 2 and 4 events, one out-arc with 1 event
        // on length 2.
        let g = NetworkGraph::build(
            vec![
                SpatialVertex::new(0, 0.0, 0.0),
                SpatialVertex::new(1, 1.0, 0.0),
                SpatialVertex::new(2, 0.0, 1.0),
                SpatialVertex::new(3, 2.0, 2.0),
            ],
            vec![
                spec_with_directed_length(0, 1, 0, 1.0),
                spec_with_directed_length(1, 2, 0, 1.0),
                spec_with_directed_length(2, 0, 3, 2.0),
            ],
        )
        .unwrap();
        let mut events = Vec::new();
        events.extend(std::iter::repeat_n(EventRecord::at(0, 0.5), 2));
        events.extend(std::iter::repeat_n(EventRecord::at(1, 0.5), 4));
        events.push(EventRecord::at(2, 1.0));
        let ev = set(&g, events);
        assert!((directional_intensity(&g, &ev, 0, Side::In, None).unwrap() - 3.0).abs() < 1e-12);
        assert!((directional_intensity(&g, &ev, 0, Side::Out, None).unwrap() - 0.5).abs() < 1e-12);
        assert_eq!(
            directional_intensity(&g, &ev, 3, Side::Out, None).unwrap_err(),
            IntensityError::EmptyIncidenceSet { vertex: 3 }
        );
    }

    fn spec_with_directed_length(id: usize, tail: usize, head: usize, length: f64) -> EdgeSpec {
        EdgeSpec { id, tail, head, kind: EdgeKind::Directed, geometry: None, length: Some(length) }
    }

    /// Vertex 0 with one in-arc (intensity 1), one out-arc (3) and one
    /// undirected edge (2); all unit lengths.
    fn three_role_hub() -> (NetworkGraph, EventSet) {
        let g = NetworkGraph::build(
            vec![
                SpatialVertex::new(0, 0.0, 0.0),
                SpatialVertex::new(1, 1.0, 0.0),
                SpatialVertex::new(2, 0.0, 1.0),
                SpatialVertex::new(3, -1.0, 0.0),
            ],
            vec![
                spec_with_directed_length(0, 1, 0, 1.0),
                spec_with_directed_length(1, 0, 2, 1.0),
                spec_with_length(2, 0, 3, 1.0),
            ],
        )
        .unwrap();
        let mut events = vec![EventRecord::at(0, 0.5)];
        events.extend(std::iter::repeat_n(EventRecord::at(1, 0.5), 3));
        events.extend(std::iter::repeat_n(EventRecord::at(2, 0.5), 2));
        let ev = EventSet::new(&g, events).unwrap();
        (g, ev)
    }

    #[test]
    fn complete_intensity_selects_unions() {
        let (g, ev) = three_role_hub();
        let at = |sel| complete_intensity(&g, &ev, 0, sel, None).unwrap();
        assert!((at(UnionSelector::Complete) - 2.0).abs() < 1e-12);
        assert!((at(UnionSelector::NeighborsChildren) - 2.5).abs() < 1e-12);
        assert!((at(UnionSelector::ParentsChildren) - 2.0).abs() < 1e-12);
        assert!((at(UnionSelector::NeighborsParents) - 1.5).abs() < 1e-12);
    }

    #[test]
    fn complete_intensity_degenerates_to_neighborhood() {
        let g = star();
        let ev = set(&g, vec![EventRecord::at(0, 0.5), EventRecord::at(2, 1.5)]);
        for v in 0..5 {
            let combined = complete_intensity(&g, &ev, v, UnionSelector::Complete, None).unwrap();
            let plain = neighborhood_intensity(&g, &ev, v, None).unwrap();
            assert!((combined - plain).abs() < 1e-12);
        }
        assert_eq!(
            complete_intensity(&g, &ev, 5, UnionSelector::Complete, None).unwrap_err(),
            IntensityError::EmptyIncidenceSet { vertex: 5 }
        );
    }

    #[test]
    fn time_grid_validation() {
        assert!(TimeGrid::new(vec![0.0, 4.0, 8.0]).is_ok());
        assert_eq!(TimeGrid::new(vec![0.0]).unwrap_err(), IntensityError::BadTimeGrid);
        assert_eq!(TimeGrid::new(vec![4.0, 4.0]).unwrap_err(), IntensityError::BadTimeGrid);
        assert_eq!(TimeGrid::new(vec![-1.0, 4.0]).unwrap_err(), IntensityError::BadTimeGrid);
    }

    #[test]
    fn slice_counts_partition_the_window() {
        let g = path_graph();
        let ev = set(
            &g,
            vec![
                EventRecord::at(0, 0.1).with_time(1.0),
                EventRecord::at(0, 0.2).with_time(5.0),
                EventRecord::at(0, 0.3).with_time(9.0),
            ],
        );
        let grid = TimeGrid::new(vec![0.0, 4.0, 8.0, 12.0]).unwrap();
        let counts = slice_counts(&ev, &grid, 0).unwrap();
        assert_eq!(counts.per_slice, vec![1, 1, 1]);
        assert_eq!(counts.excluded, 0);
    }

    #[test]
    fn boundary_times_go_right() {
        let g = path_graph();
        let ev = set(&g, vec![EventRecord::at(0, 0.1).with_time(4.0)]);
        let grid = TimeGrid::new(vec![0.0, 4.0, 8.0, 12.0]).unwrap();
        let counts = slice_counts(&ev, &grid, 0).unwrap();
        assert_eq!(counts.per_slice, vec![0, 1, 0]);
    }

    #[test]
    fn out_of_window_events_are_excluded_not_fatal() {
        let g = path_graph();
        let ev = set(
            &g,
            vec![
                EventRecord::at(0, 0.1).with_time(0.5),
                EventRecord::at(0, 0.2).with_time(2.0),
                EventRecord::at(0, 0.3).with_time(12.0),
            ],
        );
        let grid = TimeGrid::new(vec![1.0, 4.0, 12.0]).unwrap();
        let counts = slice_counts(&ev, &grid, 0).unwrap();
        assert_eq!(counts.per_slice, vec![1, 0]);
        assert_eq!(counts.excluded, 2);
        assert_eq!(counts.total_in_window(), 1);
    }

    #[test]
    fn missing_times_error() {
        let g = path_graph();
        let ev = set(&g, vec![EventRecord::at(0, 0.1)]);
        let grid = TimeGrid::new(vec![0.0, 1.0]).unwrap();
        assert_eq!(
            slice_counts(&ev, &grid, 0).unwrap_err(),
            IntensityError::MissingTime { index: 0 }
        );
    }

    #[test]
    fn cumulative_counts_whole_slices() {
        let g = path_graph();
        let ev = set(
            &g,
            vec![
                EventRecord::at(0, 0.1).with_time(1.0),
                EventRecord::at(0, 0.2).with_time(5.0),
                EventRecord::at(0, 0.3).with_time(9.0),
            ],
        );
        let grid = TimeGrid::new(vec![0.0, 4.0, 8.0, 12.0]).unwrap();
        assert_eq!(cumulative_count(&ev, &grid, 0, 8.0).unwrap(), 2);
        assert_eq!(cumulative_count(&ev, &grid, 0, 0.0).unwrap(), 0);
        assert_eq!(cumulative_count(&ev, &grid, 0, 100.0).unwrap(), 3);
        // Mid-slice cutoffs only count completed slices.
        assert_eq!(cumulative_count(&ev, &grid, 0, 7.0).unwrap(), 1);
        assert!(matches!(
            cumulative_count(&ev, &grid, 0, -1.0),
            Err(IntensityError::CutoffBeforeGrid { .. })
        ));
    }

    #[test]
    fn marked_decomposition_sums_to_total() {
        let g = star();
        let ev = set(
            &g,
            vec![
                EventRecord::at(0, 0.1).with_mark("a"),
                EventRecord::at(0, 0.2).with_mark("b"),
                EventRecord::at(0, 0.3).with_mark("a"),
                EventRecord::at(2, 0.5).with_mark("b"),
            ],
        );
        for e in 0..4 {
            let total = edge_intensity(&g, &ev, e, None).unwrap();
            let by_mark: f64 = ev
                .categories()
                .iter()
                .map(|m| edge_intensity(&g, &ev, e, Some(m)).unwrap())
                .sum();
            assert!((total - by_mark).abs() < 1e-12);
        }
    }

    #[test]
    fn intensity_table_covers_graph() {
        let g = star();
        let ev = set(&g, vec![EventRecord::at(0, 0.5), EventRecord::at(3, 1.0)]);
        let table = IntensityTable::compute(&g, &ev, None).unwrap();
        assert_eq!(table.edges.len(), 4);
        assert_eq!(table.vertices.len(), 6);
        assert!(table.vertices[5].is_none());
        assert!((table.edges[0] - 1.0).abs() < 1e-12);
        assert!((table.vertices[0].unwrap() - (1.0 + 0.0 + 0.0 + 0.25) / 4.0).abs() < 1e-12);
    }
}
