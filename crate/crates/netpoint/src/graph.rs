//! Spatial network graphs: coordinated vertices joined by undirected or
//! directed edges, validated as simple chain graphs (no loops, no parallel
//! edges, no partially directed cycle).
//!
//! All queries are pure reads over an immutable graph, so a built
//! [`NetworkGraph`] can be shared freely across threads.

use std::collections::VecDeque;

use thiserror::Error;

/// Dense vertex index, contiguous from 0.
pub type VertexId = usize;
/// Dense edge index, contiguous from 0.
pub type EdgeId = usize;

#[derive(Debug, Error, PartialEq)]
pub enum GraphError {
    #[error("edge {edge} is a self loop")]
    SelfLoop { edge: EdgeId },
    #[error("edges {first} and {second} join the same vertex pair")]
    DuplicateEdge { first: EdgeId, second: EdgeId },
    #[error("directed edge {edge} lies on a partially directed cycle")]
    PartiallyDirectedCycle { edge: EdgeId },
    #[error("edge {edge} references unknown vertex {vertex}")]
    DanglingReference { edge: EdgeId, vertex: VertexId },
    #[error("unknown vertex {vertex}")]
    UnknownVertex { vertex: VertexId },
    #[error("unknown edge {edge}")]
    UnknownEdge { edge: EdgeId },
    #[error("vertex {vertex} has a non-finite coordinate")]
    NonFiniteCoordinate { vertex: VertexId },
    #[error("vertex ids must be contiguous from 0: expected {expected}, found {found}")]
    NonContiguousVertexIds { expected: usize, found: usize },
    #[error("duplicate vertex id {vertex}")]
    DuplicateVertexId { vertex: VertexId },
    #[error("edge ids must be contiguous from 0: expected {expected}, found {found}")]
    NonContiguousEdgeIds { expected: usize, found: usize },
    #[error("duplicate edge id {edge}")]
    DuplicateEdgeId { edge: EdgeId },
    #[error("edge {edge} has non-positive length")]
    NonPositiveLength { edge: EdgeId },
    #[error("edge {edge} geometry does not start at its tail and end at its head")]
    GeometryMismatch { edge: EdgeId },
    #[error("sequence needs exactly one more vertex than edges: {vertices} vertices, {edges} edges")]
    MalformedSequence { vertices: usize, edges: usize },
}

/// A network vertex pinned to fixed planar coordinates.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpatialVertex {
    pub id: VertexId,
    pub x: f64,
    pub y: f64,
}

impl SpatialVertex {
    pub fn new(id: VertexId, x: f64, y: f64) -> Self {
        SpatialVertex { id, x, y }
    }

    pub fn coords(&self) -> (f64, f64) {
        (self.x, self.y)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum EdgeKind {
    Undirected,
    Directed,
}

/// Raw edge descriptor handed to [`NetworkGraph::build`].
///
/// `length` overrides the derived length when present; otherwise the length
/// comes from the polyline geometry, or failing that from the Euclidean
/// distance between the endpoint coordinates.
#[derive(Debug, Clone, PartialEq)]
pub struct EdgeSpec {
    pub id: EdgeId,
    pub tail: VertexId,
    pub head: VertexId,
    pub kind: EdgeKind,
    pub geometry: Option<Vec<(f64, f64)>>,
    pub length: Option<f64>,
}

impl EdgeSpec {
    pub fn undirected(id: EdgeId, tail: VertexId, head: VertexId) -> Self {
        EdgeSpec { id, tail, head, kind: EdgeKind::Undirected, geometry: None, length: None }
    }

    pub fn directed(id: EdgeId, tail: VertexId, head: VertexId) -> Self {
        EdgeSpec { id, tail, head, kind: EdgeKind::Directed, geometry: None, length: None }
    }
}

/// A validated edge: an interval of positive length joining two vertices.
#[derive(Debug, Clone, PartialEq)]
pub struct Edge {
    pub id: EdgeId,
    pub tail: VertexId,
    pub head: VertexId,
    pub kind: EdgeKind,
    /// Planar polyline from tail to head, when the segment is not straight.
    pub geometry: Option<Vec<(f64, f64)>>,
    pub length: f64,
}

impl Edge {
    /// The endpoint opposite `v`, if `v` is an endpoint at all.
    pub fn opposite(&self, v: VertexId) -> Option<VertexId> {
        if v == self.tail {
            Some(self.head)
        } else if v == self.head {
            Some(self.tail)
        } else {
            None
        }
    }

    pub fn joins(&self, a: VertexId, b: VertexId) -> bool {
        (self.tail == a && self.head == b) || (self.tail == b && self.head == a)
    }
}

/// Traversal rule for directed edges.
///
/// `Any` ignores orientation, `Forward` walks directed edges tail to head
/// only, `Backward` head to tail only. Undirected edges are always
/// traversable both ways.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Direction {
    Any,
    Forward,
    Backward,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DegreeMode {
    Undirected,
    In,
    Out,
    /// Number of vertices adjacent through any edge role: |ne ∪ pa ∪ ch|.
    Complete,
}

/// Options for [`NetworkGraph::build_with`].
#[derive(Debug, Clone, Copy, Default)]
pub struct BuildOptions {
    /// Square derived edge lengths (lengths given explicitly are kept as-is).
    pub squared_lengths: bool,
}

#[derive(Debug, Clone, Default)]
struct Incidence {
    undirected: Vec<EdgeId>,
    incoming: Vec<EdgeId>,
    outgoing: Vec<EdgeId>,
}

/// An immutable spatial network graph with a per-vertex incidence index.
#[derive(Debug, Clone)]
pub struct NetworkGraph {
    vertices: Vec<SpatialVertex>,
    edges: Vec<Edge>,
    incidence: Vec<Incidence>,
}

const COORD_EPS: f64 = 1e-9;

impl NetworkGraph {
    /// Validate and index a graph. See [`NetworkGraph::build_with`].
    pub fn build(vertices: Vec<SpatialVertex>, edges: Vec<EdgeSpec>) -> Result<Self, GraphError> {
        Self::build_with(vertices, edges, &BuildOptions::default())
    }

    /// Validate and index a graph.
    ///
    /// Rejects self loops, repeated unordered vertex pairs, references to
    /// unknown vertices and any partially directed cycle (a cycle that
    /// traverses undirected edges freely and directed edges only tail to
    /// head, containing at least one directed edge).
    pub fn build_with(
        vertices: Vec<SpatialVertex>,
        edges: Vec<EdgeSpec>,
        options: &BuildOptions,
    ) -> Result<Self, GraphError> {
        let n = vertices.len();
        let mut seen = vec![false; n];
        for (slot, v) in vertices.iter().enumerate() {
            if v.id >= n {
                return Err(GraphError::NonContiguousVertexIds { expected: slot, found: v.id });
            }
            if seen[v.id] {
                return Err(GraphError::DuplicateVertexId { vertex: v.id });
            }
            seen[v.id] = true;
            if !v.x.is_finite() || !v.y.is_finite() {
                return Err(GraphError::NonFiniteCoordinate { vertex: v.id });
            }
        }
        let mut ordered_vertices: Vec<Option<SpatialVertex>> = vec![None; n];
        for v in vertices {
            ordered_vertices[v.id] = Some(v);
        }
        let vertices: Vec<SpatialVertex> = ordered_vertices.into_iter().map(|v| v.unwrap()).collect();

        let m = edges.len();
        let mut ordered_edges: Vec<Option<Edge>> = (0..m).map(|_| None).collect();
        for (slot, spec) in edges.into_iter().enumerate() {
            if spec.id >= m {
                return Err(GraphError::NonContiguousEdgeIds { expected: slot, found: spec.id });
            }
            if ordered_edges[spec.id].is_some() {
                return Err(GraphError::DuplicateEdgeId { edge: spec.id });
            }
            for &v in [spec.tail, spec.head].iter() {
                if v >= n {
                    return Err(GraphError::DanglingReference { edge: spec.id, vertex: v });
                }
            }
            if spec.tail == spec.head {
                return Err(GraphError::SelfLoop { edge: spec.id });
            }
            let slot = spec.id;
            let edge = Self::resolve_edge(&vertices, spec, options)?;
            ordered_edges[slot] = Some(edge);
        }
        let edges: Vec<Edge> = ordered_edges.into_iter().map(|e| e.unwrap()).collect();

        // Simplicity: at most one edge per unordered vertex pair.
        let mut by_pair: std::collections::HashMap<(VertexId, VertexId), EdgeId> =
            std::collections::HashMap::new();
        for e in &edges {
            let key = (e.tail.min(e.head), e.tail.max(e.head));
            if let Some(&first) = by_pair.get(&key) {
                return Err(GraphError::DuplicateEdge { first, second: e.id });
            }
            by_pair.insert(key, e.id);
        }

        let mut incidence = vec![Incidence::default(); n];
        for e in &edges {
            match e.kind {
                EdgeKind::Undirected => {
                    incidence[e.tail].undirected.push(e.id);
                    incidence[e.head].undirected.push(e.id);
                }
                EdgeKind::Directed => {
                    incidence[e.tail].outgoing.push(e.id);
                    incidence[e.head].incoming.push(e.id);
                }
            }
        }

        let graph = NetworkGraph { vertices, edges, incidence };
        graph.reject_partially_directed_cycles()?;
        Ok(graph)
    }

    fn resolve_edge(
        vertices: &[SpatialVertex],
        spec: EdgeSpec,
        options: &BuildOptions,
    ) -> Result<Edge, GraphError> {
        let tail = &vertices[spec.tail];
        let head = &vertices[spec.head];
        if let Some(geom) = &spec.geometry {
            if geom.len() < 2 {
                return Err(GraphError::GeometryMismatch { edge: spec.id });
            }
            let first = geom[0];
            let last = geom[geom.len() - 1];
            let matches = |p: (f64, f64), v: &SpatialVertex| {
                (p.0 - v.x).abs() <= COORD_EPS && (p.1 - v.y).abs() <= COORD_EPS
            };
            if !matches(first, tail) || !matches(last, head) {
                return Err(GraphError::GeometryMismatch { edge: spec.id });
            }
            if geom.iter().any(|p| !p.0.is_finite() || !p.1.is_finite()) {
                return Err(GraphError::GeometryMismatch { edge: spec.id });
            }
        }
        let derived = match &spec.geometry {
            Some(geom) => geom
                .windows(2)
                .map(|w| ((w[1].0 - w[0].0).powi(2) + (w[1].1 - w[0].1).powi(2)).sqrt())
                .sum::<f64>(),
            None => ((head.x - tail.x).powi(2) + (head.y - tail.y).powi(2)).sqrt(),
        };
        let derived = if options.squared_lengths { derived * derived } else { derived };
        let length = spec.length.unwrap_or(derived);
        if !(length > 0.0) || !length.is_finite() {
            return Err(GraphError::NonPositiveLength { edge: spec.id });
        }
        Ok(Edge {
            id: spec.id,
            tail: spec.tail,
            head: spec.head,
            kind: spec.kind,
            geometry: spec.geometry,
            length,
        })
    }

    /// For every directed edge (u, v): if u is reachable from v along a
    /// semi-directed walk, that walk closed by the edge is a partially
    /// directed cycle.
    fn reject_partially_directed_cycles(&self) -> Result<(), GraphError> {
        for e in &self.edges {
            if e.kind == EdgeKind::Directed {
                let reach = self.hop_distances_from(e.head, Direction::Forward);
                if reach[e.tail].is_some() {
                    return Err(GraphError::PartiallyDirectedCycle { edge: e.id });
                }
            }
        }
        Ok(())
    }

    pub fn vertex_count(&self) -> usize {
        self.vertices.len()
    }

    /// Number of edges: the size |E| of the network graph.
    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn vertices(&self) -> &[SpatialVertex] {
        &self.vertices
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn vertex(&self, v: VertexId) -> Result<&SpatialVertex, GraphError> {
        self.vertices.get(v).ok_or(GraphError::UnknownVertex { vertex: v })
    }

    pub fn edge(&self, e: EdgeId) -> Result<&Edge, GraphError> {
        self.edges.get(e).ok_or(GraphError::UnknownEdge { edge: e })
    }

    /// Total metric length |L| over all edges.
    pub fn total_length(&self) -> f64 {
        self.edges.iter().map(|e| e.length).sum()
    }

    fn check_vertex(&self, v: VertexId) -> Result<(), GraphError> {
        if v < self.vertices.len() {
            Ok(())
        } else {
            Err(GraphError::UnknownVertex { vertex: v })
        }
    }

    /// Undirected edge ids incident to `v`.
    pub fn undirected_edges(&self, v: VertexId) -> Result<&[EdgeId], GraphError> {
        self.check_vertex(v)?;
        Ok(&self.incidence[v].undirected)
    }

    /// Directed edge ids arriving at `v`.
    pub fn incoming_edges(&self, v: VertexId) -> Result<&[EdgeId], GraphError> {
        self.check_vertex(v)?;
        Ok(&self.incidence[v].incoming)
    }

    /// Directed edge ids departing from `v`.
    pub fn outgoing_edges(&self, v: VertexId) -> Result<&[EdgeId], GraphError> {
        self.check_vertex(v)?;
        Ok(&self.incidence[v].outgoing)
    }

    /// Every edge id incident to `v` regardless of role.
    pub fn incident_edges(&self, v: VertexId) -> Result<Vec<EdgeId>, GraphError> {
        self.check_vertex(v)?;
        let inc = &self.incidence[v];
        let mut all: Vec<EdgeId> =
            inc.undirected.iter().chain(&inc.incoming).chain(&inc.outgoing).copied().collect();
        all.sort_unstable();
        Ok(all)
    }

    /// ne(v): vertices joined to `v` by an undirected edge.
    pub fn neighbors(&self, v: VertexId) -> Result<Vec<VertexId>, GraphError> {
        self.check_vertex(v)?;
        let mut out: Vec<VertexId> = self.incidence[v]
            .undirected
            .iter()
            .filter_map(|&e| self.edges[e].opposite(v))
            .collect();
        out.sort_unstable();
        out.dedup();
        Ok(out)
    }

    /// pa(v): tails of directed edges arriving at `v`.
    pub fn parents(&self, v: VertexId) -> Result<Vec<VertexId>, GraphError> {
        self.check_vertex(v)?;
        let mut out: Vec<VertexId> =
            self.incidence[v].incoming.iter().map(|&e| self.edges[e].tail).collect();
        out.sort_unstable();
        out.dedup();
        Ok(out)
    }

    /// ch(v): heads of directed edges departing from `v`.
    pub fn children(&self, v: VertexId) -> Result<Vec<VertexId>, GraphError> {
        self.check_vertex(v)?;
        let mut out: Vec<VertexId> =
            self.incidence[v].outgoing.iter().map(|&e| self.edges[e].head).collect();
        out.sort_unstable();
        out.dedup();
        Ok(out)
    }

    /// Vertices other than `v` that share at least one child with `v`.
    pub fn coparents(&self, v: VertexId) -> Result<Vec<VertexId>, GraphError> {
        let mut out: Vec<VertexId> = Vec::new();
        for c in self.children(v)? {
            out.extend(self.parents(c)?);
        }
        out.retain(|&u| u != v);
        out.sort_unstable();
        out.dedup();
        Ok(out)
    }

    /// family(v) = pa(v) ∪ ch(v).
    pub fn family(&self, v: VertexId) -> Result<Vec<VertexId>, GraphError> {
        let mut out = self.parents(v)?;
        out.extend(self.children(v)?);
        out.sort_unstable();
        out.dedup();
        Ok(out)
    }

    pub fn degree(&self, v: VertexId, mode: DegreeMode) -> Result<usize, GraphError> {
        self.check_vertex(v)?;
        let inc = &self.incidence[v];
        Ok(match mode {
            DegreeMode::Undirected => inc.undirected.len(),
            DegreeMode::In => inc.incoming.len(),
            DegreeMode::Out => inc.outgoing.len(),
            DegreeMode::Complete => {
                let mut adj = self.neighbors(v)?;
                adj.extend(self.family(v)?);
                adj.sort_unstable();
                adj.dedup();
                adj.len()
            }
        })
    }

    /// Minimum degree over all vertices under `mode`; `None` on an empty graph.
    pub fn degree_min(&self, mode: DegreeMode) -> Option<usize> {
        (0..self.vertices.len()).map(|v| self.degree(v, mode).unwrap()).min()
    }

    /// Maximum degree over all vertices under `mode`; `None` on an empty graph.
    pub fn degree_max(&self, mode: DegreeMode) -> Option<usize> {
        (0..self.vertices.len()).map(|v| self.degree(v, mode).unwrap()).max()
    }

    /// Classify an alternating vertex-edge sequence against this graph.
    ///
    /// Incidence ignores edge orientation: a sequence may traverse directed
    /// edges either way.
    pub fn classify_sequence(&self, seq: &VertexEdgeSequence) -> SequenceClass {
        if seq.vertices.iter().any(|&v| v >= self.vertices.len()) {
            return SequenceClass::Invalid;
        }
        classify_with(seq, |e| self.edges.get(e).map(|edge| (edge.tail, edge.head)))
    }

    /// Hop distances (in edges) from `source` to every vertex under the
    /// direction rule; `None` marks unreachable vertices.
    pub fn hop_distances_from(&self, source: VertexId, direction: Direction) -> Vec<Option<usize>> {
        let mut dist = vec![None; self.vertices.len()];
        if source >= self.vertices.len() {
            return dist;
        }
        dist[source] = Some(0);
        let mut queue = VecDeque::new();
        queue.push_back(source);
        while let Some(v) = queue.pop_front() {
            let d = dist[v].unwrap();
            for (w, _) in self.steps_from(v, direction) {
                if dist[w].is_none() {
                    dist[w] = Some(d + 1);
                    queue.push_back(w);
                }
            }
        }
        dist
    }

    /// d_G(u, v): minimum number of edges over admissible walks, or `None`
    /// when `v` is unreachable from `u`.
    pub fn hop_distance(
        &self,
        u: VertexId,
        v: VertexId,
        direction: Direction,
    ) -> Result<Option<usize>, GraphError> {
        self.check_vertex(u)?;
        self.check_vertex(v)?;
        Ok(self.hop_distances_from(u, direction)[v])
    }

    /// Vertices one admissible step away from `v`, with the edge taken.
    pub fn steps_from(
        &self,
        v: VertexId,
        direction: Direction,
    ) -> impl Iterator<Item = (VertexId, EdgeId)> + '_ {
        let inc = &self.incidence[v];
        let undirected = inc.undirected.iter().map(move |&e| (self.edges[e].opposite(v).unwrap(), e));
        let (fwd, bwd): (&[EdgeId], &[EdgeId]) = match direction {
            Direction::Any => (&inc.outgoing, &inc.incoming),
            Direction::Forward => (&inc.outgoing, &[]),
            Direction::Backward => (&inc.incoming, &[]),
        };
        let along = fwd.iter().map(move |&e| {
            let edge = &self.edges[e];
            (if edge.tail == v { edge.head } else { edge.tail }, e)
        });
        let against = bwd.iter().map(move |&e| {
            let edge = &self.edges[e];
            (if edge.head == v { edge.tail } else { edge.head }, e)
        });
        undirected.chain(along).chain(against)
    }

    /// Edges reachable from `v` along admissible walks of at most `xi` edges.
    ///
    /// An edge belongs to the ξ-order neighborhood when it is traversable
    /// away from one of its endpoints at hop distance ≤ ξ − 1. Order 0 is
    /// empty and order 1 holds the edges leaving `v` itself.
    pub fn khop_neighborhood(
        &self,
        v: VertexId,
        xi: usize,
        direction: Direction,
    ) -> Result<Vec<EdgeId>, GraphError> {
        self.check_vertex(v)?;
        if xi == 0 {
            return Ok(Vec::new());
        }
        let dist = self.hop_distances_from(v, direction);
        let within = |w: VertexId| matches!(dist[w], Some(d) if d < xi);
        let mut out: Vec<EdgeId> = self
            .edges
            .iter()
            .filter(|e| match (e.kind, direction) {
                (EdgeKind::Undirected, _) | (_, Direction::Any) => {
                    within(e.tail) || within(e.head)
                }
                (EdgeKind::Directed, Direction::Forward) => within(e.tail),
                (EdgeKind::Directed, Direction::Backward) => within(e.head),
            })
            .map(|e| e.id)
            .collect();
        out.sort_unstable();
        Ok(out)
    }
}

/// Alternating vertex-edge sequence (v₀, e₁, v₁, …, e_k, v_k) of length k.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VertexEdgeSequence {
    pub vertices: Vec<VertexId>,
    pub edges: Vec<EdgeId>,
}

impl VertexEdgeSequence {
    pub fn new(vertices: Vec<VertexId>, edges: Vec<EdgeId>) -> Result<Self, GraphError> {
        if vertices.len() != edges.len() + 1 {
            return Err(GraphError::MalformedSequence {
                vertices: vertices.len(),
                edges: edges.len(),
            });
        }
        Ok(VertexEdgeSequence { vertices, edges })
    }

    /// Number of edges traversed.
    pub fn len(&self) -> usize {
        self.edges.len()
    }

    pub fn is_empty(&self) -> bool {
        self.edges.is_empty()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SequenceClass {
    Walk,
    Trail,
    Path,
    Cycle,
    Invalid,
}

/// Classify a sequence given only edge incidence, most specific class first:
/// Path, Cycle (closed path), Trail (no repeated edge), Walk.
///
/// The incidence closure decouples classification from graph validation, so
/// sequences over structures a [`NetworkGraph`] rejects (parallel edges, say)
/// can still be classified.
pub fn classify_with<F>(seq: &VertexEdgeSequence, endpoints: F) -> SequenceClass
where
    F: Fn(EdgeId) -> Option<(VertexId, VertexId)>,
{
    if seq.vertices.len() != seq.edges.len() + 1 {
        return SequenceClass::Invalid;
    }
    for (i, &e) in seq.edges.iter().enumerate() {
        let (a, b) = match endpoints(e) {
            Some(pair) => pair,
            None => return SequenceClass::Invalid,
        };
        let (u, v) = (seq.vertices[i], seq.vertices[i + 1]);
        if !((a == u && b == v) || (a == v && b == u)) {
            return SequenceClass::Invalid;
        }
    }
    let k = seq.edges.len();
    if k == 0 {
        return SequenceClass::Path;
    }
    let mut edge_ids = seq.edges.clone();
    edge_ids.sort_unstable();
    edge_ids.dedup();
    if edge_ids.len() < seq.edges.len() {
        return SequenceClass::Walk;
    }
    let closed = seq.vertices[0] == seq.vertices[k];
    let body = if closed { &seq.vertices[..k] } else { &seq.vertices[..] };
    let mut vertex_ids = body.to_vec();
    vertex_ids.sort_unstable();
    vertex_ids.dedup();
    if vertex_ids.len() == body.len() {
        if closed {
            SequenceClass::Cycle
        } else {
            SequenceClass::Path
        }
    } else {
        SequenceClass::Trail
    }
}
