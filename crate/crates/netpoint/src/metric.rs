//! Exact geometry of the metric network: shortest-path distances between
//! points on edges, metric discs as per-edge sub-intervals, and the number
//! of points lying at an exact distance (the disc boundary count).
//!
//! Every edge is an interval of its metric length and a point is an offset
//! from the edge tail. Distances ignore edge orientation. The workhorse is
//! [`DistanceField`]: one Dijkstra pass from a source point, after which the
//! distance to any vertex or point, the disc of any radius and its boundary
//! count all come in closed form — per edge, the distance function is the
//! lower envelope of at most three linear pieces, so discs and boundary
//! points are solved exactly rather than sampled.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use thiserror::Error;

use crate::graph::{Direction, EdgeId, NetworkGraph, VertexId};

/// Slack used when comparing metric distances for exact equality.
pub const DIST_EPS: f64 = 1e-9;

#[derive(Debug, Error, PartialEq)]
pub enum MetricError {
    #[error("unknown edge {edge}")]
    UnknownEdge { edge: EdgeId },
    #[error("offset {offset} is outside edge {edge} of length {length}")]
    InvalidOffset { edge: EdgeId, offset: f64, length: f64 },
    #[error("radius must be non-negative, got {radius}")]
    NegativeRadius { radius: f64 },
}

/// A point on the network: an offset from the tail of an edge, in metric
/// length units, with `0 <= offset <= length` of that edge.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NetPoint {
    pub edge: EdgeId,
    pub offset: f64,
}

impl NetPoint {
    pub fn new(edge: EdgeId, offset: f64) -> Self {
        NetPoint { edge, offset }
    }
}

/// Validate a point against a graph, returning its host edge length.
fn host_length(graph: &NetworkGraph, p: NetPoint) -> Result<f64, MetricError> {
    let edge = graph
        .edges()
        .get(p.edge)
        .ok_or(MetricError::UnknownEdge { edge: p.edge })?;
    if !p.offset.is_finite() || p.offset < 0.0 || p.offset > edge.length {
        return Err(MetricError::InvalidOffset {
            edge: p.edge,
            offset: p.offset,
            length: edge.length,
        });
    }
    Ok(edge.length)
}

/// Planar coordinates of a network point, interpolated along the edge
/// geometry (or the straight segment between the endpoints). Offsets are
/// interpreted proportionally, so edges whose metric length was given
/// explicitly still map onto their drawn shape.
pub fn point_coords(graph: &NetworkGraph, p: NetPoint) -> Result<(f64, f64), MetricError> {
    let length = host_length(graph, p)?;
    let edge = graph.edge(p.edge).unwrap();
    let frac = (p.offset / length).clamp(0.0, 1.0);
    match &edge.geometry {
        None => {
            let t = graph.vertex(edge.tail).unwrap();
            let h = graph.vertex(edge.head).unwrap();
            Ok((t.x + frac * (h.x - t.x), t.y + frac * (h.y - t.y)))
        }
        Some(geom) => {
            let seg_len = |w: &[(f64, f64)]| {
                ((w[1].0 - w[0].0).powi(2) + (w[1].1 - w[0].1).powi(2)).sqrt()
            };
            let total: f64 = geom.windows(2).map(seg_len).sum();
            let mut remaining = frac * total;
            for w in geom.windows(2) {
                let l = seg_len(w);
                if remaining <= l || l == total {
                    let s = if l > 0.0 { remaining / l } else { 0.0 };
                    return Ok((
                        w[0].0 + s * (w[1].0 - w[0].0),
                        w[0].1 + s * (w[1].1 - w[0].1),
                    ));
                }
                remaining -= l;
            }
            Ok(*geom.last().unwrap())
        }
    }
}

/// Sorted, pairwise-disjoint closed sub-intervals of a single edge.
#[derive(Debug, Clone, PartialEq)]
pub struct SubIntervalSet {
    intervals: Vec<(f64, f64)>,
}

impl SubIntervalSet {
    /// Normalize raw intervals: drop empty ones, sort, merge overlaps.
    pub fn new(mut raw: Vec<(f64, f64)>) -> Self {
        raw.retain(|&(a, b)| b > a);
        raw.sort_by(|x, y| x.partial_cmp(y).unwrap());
        let mut intervals: Vec<(f64, f64)> = Vec::with_capacity(raw.len());
        for (a, b) in raw {
            match intervals.last_mut() {
                Some(last) if a <= last.1 => last.1 = last.1.max(b),
                _ => intervals.push((a, b)),
            }
        }
        SubIntervalSet { intervals }
    }

    pub fn empty() -> Self {
        SubIntervalSet { intervals: Vec::new() }
    }

    pub fn intervals(&self) -> &[(f64, f64)] {
        &self.intervals
    }

    pub fn is_empty(&self) -> bool {
        self.intervals.is_empty()
    }

    /// Total length covered.
    pub fn measure(&self) -> f64 {
        self.intervals.iter().map(|&(a, b)| b - a).sum()
    }

    /// Whether `t` lies in one of the closed intervals.
    pub fn contains(&self, t: f64) -> bool {
        self.intervals.iter().any(|&(a, b)| a <= t && t <= b)
    }
}

/// A metric disc: for each edge, the sub-intervals within the radius.
#[derive(Debug, Clone)]
pub struct NetworkDisc {
    per_edge: Vec<SubIntervalSet>,
}

impl NetworkDisc {
    pub fn per_edge(&self) -> &[SubIntervalSet] {
        &self.per_edge
    }

    pub fn on_edge(&self, e: EdgeId) -> Option<&SubIntervalSet> {
        self.per_edge.get(e)
    }

    /// Total metric length of the disc.
    pub fn measure(&self) -> f64 {
        self.per_edge.iter().map(|s| s.measure()).sum()
    }

    pub fn contains(&self, p: NetPoint) -> bool {
        self.per_edge.get(p.edge).is_some_and(|s| s.contains(p.offset))
    }
}

#[derive(Debug, PartialEq)]
struct HeapEntry {
    dist: f64,
    vertex: VertexId,
}

impl Eq for HeapEntry {}

impl Ord for HeapEntry {
    // Reversed on distance so BinaryHeap pops the nearest vertex first.
    fn cmp(&self, other: &Self) -> Ordering {
        other
            .dist
            .partial_cmp(&self.dist)
            .unwrap()
            .then_with(|| other.vertex.cmp(&self.vertex))
    }
}

impl PartialOrd for HeapEntry {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Shortest-path distances from one fixed source point to the whole network.
#[derive(Debug, Clone)]
pub struct DistanceField<'g> {
    graph: &'g NetworkGraph,
    source: NetPoint,
    vertex_dist: Vec<f64>,
}

impl<'g> DistanceField<'g> {
    /// Run Dijkstra from `source`, seeding both endpoints of its host edge
    /// with the partial-edge distances.
    pub fn new(graph: &'g NetworkGraph, source: NetPoint) -> Result<Self, MetricError> {
        let length = host_length(graph, source)?;
        let mut vertex_dist = vec![f64::INFINITY; graph.vertex_count()];
        let mut heap = BinaryHeap::new();
        let host = graph.edge(source.edge).unwrap();
        for (v, d) in [(host.tail, source.offset), (host.head, length - source.offset)] {
            if d < vertex_dist[v] {
                vertex_dist[v] = d;
                heap.push(HeapEntry { dist: d, vertex: v });
            }
        }
        while let Some(HeapEntry { dist, vertex }) = heap.pop() {
            if dist > vertex_dist[vertex] {
                continue;
            }
            for (w, e) in graph.steps_from(vertex, Direction::Any) {
                let next = dist + graph.edges()[e].length;
                if next < vertex_dist[w] {
                    vertex_dist[w] = next;
                    heap.push(HeapEntry { dist: next, vertex: w });
                }
            }
        }
        Ok(DistanceField { graph, source, vertex_dist })
    }

    pub fn source(&self) -> NetPoint {
        self.source
    }

    /// Distance to a vertex; infinite when unreachable.
    pub fn vertex_distance(&self, v: VertexId) -> f64 {
        self.vertex_dist.get(v).copied().unwrap_or(f64::INFINITY)
    }

    pub fn vertex_distances(&self) -> &[f64] {
        &self.vertex_dist
    }

    /// Shortest-path distance to another point; infinite when the target
    /// sits in a different component.
    pub fn distance_to(&self, q: NetPoint) -> Result<f64, MetricError> {
        let length = host_length(self.graph, q)?;
        let edge = self.graph.edge(q.edge).unwrap();
        let mut best = if q.edge == self.source.edge {
            (q.offset - self.source.offset).abs()
        } else {
            f64::INFINITY
        };
        best = best.min(self.vertex_dist[edge.tail] + q.offset);
        best = best.min(self.vertex_dist[edge.head] + (length - q.offset));
        Ok(best)
    }

    /// The distance function restricted to one edge: lower envelope of the
    /// linear pieces entering from either endpoint, plus the direct piece on
    /// the source's own edge.
    fn edge_profile(&self, e: EdgeId, t: f64) -> f64 {
        let edge = &self.graph.edges()[e];
        let mut d = self.vertex_dist[edge.tail] + t;
        d = d.min(self.vertex_dist[edge.head] + (edge.length - t));
        if e == self.source.edge {
            d = d.min((t - self.source.offset).abs());
        }
        d
    }

    /// The metric disc of `radius` around the source.
    pub fn disc(&self, radius: f64) -> Result<NetworkDisc, MetricError> {
        if !(radius >= 0.0) {
            return Err(MetricError::NegativeRadius { radius });
        }
        let per_edge = self
            .graph
            .edges()
            .iter()
            .map(|edge| {
                let mut raw = Vec::with_capacity(3);
                let da = self.vertex_dist[edge.tail];
                let db = self.vertex_dist[edge.head];
                if da < radius {
                    raw.push((0.0, (radius - da).min(edge.length)));
                }
                if db < radius {
                    raw.push(((edge.length - (radius - db)).max(0.0), edge.length));
                }
                if edge.id == self.source.edge {
                    raw.push((
                        (self.source.offset - radius).max(0.0),
                        (self.source.offset + radius).min(edge.length),
                    ));
                }
                SubIntervalSet::new(raw)
            })
            .collect();
        Ok(NetworkDisc { per_edge })
    }

    /// Number of network points at distance exactly `radius` from the source
    /// (up to [`DIST_EPS`]): vertices at that distance, counted once each,
    /// plus interior edge points where the distance profile crosses it.
    pub fn circumference(&self, radius: f64) -> Result<usize, MetricError> {
        if !(radius >= 0.0) {
            return Err(MetricError::NegativeRadius { radius });
        }
        let mut count = self
            .vertex_dist
            .iter()
            .filter(|&&d| (d - radius).abs() <= DIST_EPS)
            .count();
        for edge in self.graph.edges() {
            let da = self.vertex_dist[edge.tail];
            let db = self.vertex_dist[edge.head];
            let mut candidates: Vec<f64> = Vec::with_capacity(4);
            if da.is_finite() {
                candidates.push(radius - da);
            }
            if db.is_finite() {
                candidates.push(edge.length - (radius - db));
            }
            if edge.id == self.source.edge {
                candidates.push(self.source.offset - radius);
                candidates.push(self.source.offset + radius);
            }
            candidates.retain(|&t| {
                t > DIST_EPS
                    && t < edge.length - DIST_EPS
                    && (self.edge_profile(edge.id, t) - radius).abs() <= DIST_EPS
            });
            candidates.sort_by(|a, b| a.partial_cmp(b).unwrap());
            candidates.dedup_by(|a, b| (*a - *b).abs() <= DIST_EPS);
            count += candidates.len();
        }
        Ok(count)
    }
}

/// One-off shortest-path distance between two points.
pub fn net_distance(graph: &NetworkGraph, p: NetPoint, q: NetPoint) -> Result<f64, MetricError> {
    DistanceField::new(graph, p)?.distance_to(q)
}
