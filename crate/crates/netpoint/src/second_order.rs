//! Second-order summaries of a point pattern on a network: K functions over
//! the graph (undirected, directed, partially directed) and over the metric
//! network, plus the metric pair correlation function.
//!
//! Graph variants measure pair separation in edge hops between the events'
//! host edges: 0 on a shared edge, 1 when the host edges meet at a vertex,
//! and so on. The directed variants only count a pair when a
//! direction-preserving route (directed edges tail to head, undirected edges
//! either way) connects the host edges. Metric variants use exact
//! shortest-path distances from [`crate::metric`].

use std::collections::VecDeque;

use thiserror::Error;

use crate::exec;
use crate::graph::{EdgeId, EdgeKind, NetworkGraph};
use crate::intensity::EventSet;
use crate::metric::{DistanceField, MetricError, NetPoint};

#[derive(Debug, Error, PartialEq)]
pub enum SecondOrderError {
    #[error("need at least 2 events, got {n}")]
    TooFewEvents { n: usize },
    #[error("no edges admissible under the selector")]
    EmptyEdgeSelection,
    #[error("bandwidth must be positive and finite, got {bandwidth}")]
    BadBandwidth { bandwidth: f64 },
    #[error("expected {expected} per-event intensity values, got {got}")]
    IntensityLengthMismatch { expected: usize, got: usize },
    #[error(transparent)]
    Metric(#[from] MetricError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum KVariant {
    GraphUndirected,
    GraphForward,
    GraphBackward,
    GraphPartial,
    LinearNetwork,
}

/// An estimated K curve: strictly increasing abscissa (edge hops or metric
/// radii), one estimate per abscissa, the event count and the normalizer.
#[derive(Debug, Clone, PartialEq)]
pub struct KCurve {
    pub variant: KVariant,
    pub xs: Vec<f64>,
    pub values: Vec<f64>,
    pub n: usize,
    pub normalizer: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum KDirection {
    Forward,
    Backward,
}

/// Admissible edge set for the partially directed K function.
///
/// `UndirectedOnly` restricts host edges, route edges and the normalizer to
/// undirected edges; `Forward`/`Backward` admit every edge and coincide with
/// the directed K function.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PartialSelector {
    UndirectedOnly,
    Forward,
    Backward,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum RouteRule {
    /// Host edges adjacent whenever they share a vertex.
    AnyDirection,
    /// Leave a directed edge only at its head, enter only at its tail.
    DirectionPreserving,
    /// Traverse undirected edges only.
    UndirectedOnly,
}

/// Edge-to-edge adjacency under a traversal rule: `adj[e]` lists the edges
/// a route on `e` can continue onto.
fn edge_adjacency(graph: &NetworkGraph, rule: RouteRule) -> Vec<Vec<EdgeId>> {
    graph
        .edges()
        .iter()
        .map(|e| {
            let exits: Vec<usize> = match (rule, e.kind) {
                (RouteRule::DirectionPreserving, EdgeKind::Directed) => vec![e.head],
                (RouteRule::UndirectedOnly, EdgeKind::Directed) => vec![],
                _ => vec![e.tail, e.head],
            };
            let mut next: Vec<EdgeId> = Vec::new();
            for w in exits {
                match rule {
                    RouteRule::AnyDirection => {
                        next.extend(graph.incident_edges(w).unwrap());
                    }
                    RouteRule::DirectionPreserving => {
                        next.extend(graph.undirected_edges(w).unwrap());
                        next.extend(graph.outgoing_edges(w).unwrap());
                    }
                    RouteRule::UndirectedOnly => {
                        next.extend(graph.undirected_edges(w).unwrap());
                    }
                }
            }
            next.sort_unstable();
            next.dedup();
            next.retain(|&f| f != e.id);
            next
        })
        .collect()
}

/// Hop distances from `source` to every edge over an edge adjacency; `None`
/// marks unreachable edges. A source inadmissible under the rule (directed,
/// under undirected-only) reaches nothing, itself included.
fn edge_hop_distances(
    adjacency: &[Vec<EdgeId>],
    source: EdgeId,
    source_admissible: bool,
) -> Vec<Option<usize>> {
    let mut dist = vec![None; adjacency.len()];
    if !source_admissible {
        return dist;
    }
    dist[source] = Some(0);
    let mut queue = VecDeque::new();
    queue.push_back(source);
    while let Some(e) = queue.pop_front() {
        let d = dist[e].unwrap();
        for &f in &adjacency[e] {
            if dist[f].is_none() {
                dist[f] = Some(d + 1);
                queue.push_back(f);
            }
        }
    }
    dist
}

/// Events per host edge, host list sorted.
fn host_multiplicities(events: &EventSet) -> Vec<(EdgeId, usize)> {
    let mut hosts: Vec<(EdgeId, usize)> = Vec::new();
    for i in 0..events.len() {
        hosts.push((events.events()[i].position.edge, 1));
    }
    hosts.sort_unstable();
    let mut grouped: Vec<(EdgeId, usize)> = Vec::new();
    for (e, c) in hosts {
        match grouped.last_mut() {
            Some(last) if last.0 == e => last.1 += c,
            _ => grouped.push((e, c)),
        }
    }
    grouped
}

/// Count ordered event pairs by route distance between host edges.
///
/// `pair_distance(g, h)` gives the route distance used for an event on host
/// `g` paired with one on host `h`. Returns cumulative counts aligned with
/// `xis`.
fn cumulative_pair_counts(
    hosts: &[(EdgeId, usize)],
    xis: &[usize],
    pair_distance: impl Fn(usize, usize) -> Option<usize> + Sync,
) -> Vec<usize> {
    let rows: Vec<Vec<usize>> = exec::map_indices(hosts.len(), |a| {
        let mut counts = vec![0usize; xis.len()];
        for b in 0..hosts.len() {
            let multiplicity = if a == b {
                hosts[a].1 * (hosts[a].1 - 1)
            } else {
                hosts[a].1 * hosts[b].1
            };
            if multiplicity == 0 {
                continue;
            }
            if let Some(d) = pair_distance(a, b) {
                // One slot per requested ξ; xis is sorted so a partition
                // point marks where the pair starts counting.
                let start = xis.partition_point(|&xi| xi < d);
                for count in counts.iter_mut().skip(start) {
                    *count += multiplicity;
                }
            }
        }
        counts
    });
    let mut total = vec![0usize; xis.len()];
    for row in rows {
        for (t, c) in total.iter_mut().zip(row) {
            *t += c;
        }
    }
    total
}

fn prepare_xis(xis: &[usize]) -> Vec<usize> {
    let mut xs = xis.to_vec();
    xs.sort_unstable();
    xs.dedup();
    xs
}

/// Distance rows from each distinct host edge under a rule; row slots
/// follow the host order, columns are raw edge ids.
struct HostRoutes {
    rows: Vec<Vec<Option<usize>>>,
}

impl HostRoutes {
    fn compute(
        graph: &NetworkGraph,
        hosts: &[(EdgeId, usize)],
        rule: RouteRule,
    ) -> Self {
        let adjacency = edge_adjacency(graph, rule);
        let sources: Vec<EdgeId> = hosts.iter().map(|&(e, _)| e).collect();
        let rows = exec::map_collect(&sources, |&e| {
            let admissible = rule != RouteRule::UndirectedOnly
                || graph.edges()[e].kind == EdgeKind::Undirected;
            edge_hop_distances(&adjacency, e, admissible)
        });
        HostRoutes { rows }
    }

    /// Route distance from host in slot `a` to the edge hosting slot `b`.
    fn distance(&self, a: usize, host_b: EdgeId) -> Option<usize> {
        self.rows[a][host_b]
    }
}

/// How one hop-based curve counts pairs: its label, its normalizing edge
/// count, the admissible routes, the route direction, and whether hosts
/// themselves must be undirected.
struct CurveSpec {
    variant: KVariant,
    normalizer: f64,
    rule: RouteRule,
    backward: bool,
    admissible_hosts_only: bool,
}

fn graph_curve(
    graph: &NetworkGraph,
    events: &EventSet,
    xis: &[usize],
    spec: CurveSpec,
) -> Result<KCurve, SecondOrderError> {
    let n = events.len();
    if n < 2 {
        return Err(SecondOrderError::TooFewEvents { n });
    }
    let xs = prepare_xis(xis);
    let hosts = host_multiplicities(events);
    let routes = HostRoutes::compute(graph, &hosts, spec.rule);
    let counts = cumulative_pair_counts(&hosts, &xs, |a, b| {
        if spec.admissible_hosts_only {
            let host_b = hosts[b].0;
            if graph.edges()[host_b].kind != EdgeKind::Undirected {
                return None;
            }
        }
        if spec.backward {
            routes.distance(b, hosts[a].0)
        } else {
            routes.distance(a, hosts[b].0)
        }
    });
    let scale = spec.normalizer / (n as f64 * (n as f64 - 1.0));
    Ok(KCurve {
        variant: spec.variant,
        xs: xs.iter().map(|&x| x as f64).collect(),
        values: counts.iter().map(|&c| scale * c as f64).collect(),
        n,
        normalizer: spec.normalizer,
    })
}

/// Graph K function: normalized count of ordered event pairs whose host
/// edges lie within ξ hops, ignoring edge orientation.
pub fn k_graph(
    graph: &NetworkGraph,
    events: &EventSet,
    xis: &[usize],
) -> Result<KCurve, SecondOrderError> {
    graph_curve(
        graph,
        events,
        xis,
        CurveSpec {
            variant: KVariant::GraphUndirected,
            normalizer: graph.edge_count() as f64,
            rule: RouteRule::AnyDirection,
            backward: false,
            admissible_hosts_only: false,
        },
    )
}

/// Directed graph K function: a pair (i, j) counts when a
/// direction-preserving route of at most ξ hops runs from i's host edge to
/// j's (`Forward`) or from j's to i's (`Backward`).
pub fn k_graph_directed(
    graph: &NetworkGraph,
    events: &EventSet,
    xis: &[usize],
    direction: KDirection,
) -> Result<KCurve, SecondOrderError> {
    graph_curve(
        graph,
        events,
        xis,
        CurveSpec {
            variant: match direction {
                KDirection::Forward => KVariant::GraphForward,
                KDirection::Backward => KVariant::GraphBackward,
            },
            normalizer: graph.edge_count() as f64,
            rule: RouteRule::DirectionPreserving,
            backward: direction == KDirection::Backward,
            admissible_hosts_only: false,
        },
    )
}

/// Partially directed graph K function, normalized by the number of
/// admissible edges. See [`PartialSelector`] for the admissible sets.
pub fn k_graph_partial(
    graph: &NetworkGraph,
    events: &EventSet,
    xis: &[usize],
    selector: PartialSelector,
) -> Result<KCurve, SecondOrderError> {
    let n = events.len();
    if n < 2 {
        return Err(SecondOrderError::TooFewEvents { n });
    }
    let admissible = match selector {
        PartialSelector::UndirectedOnly => graph
            .edges()
            .iter()
            .filter(|e| e.kind == EdgeKind::Undirected)
            .count(),
        PartialSelector::Forward | PartialSelector::Backward => graph.edge_count(),
    };
    if admissible == 0 {
        return Err(SecondOrderError::EmptyEdgeSelection);
    }
    let spec = match selector {
        PartialSelector::UndirectedOnly => CurveSpec {
            variant: KVariant::GraphPartial,
            normalizer: admissible as f64,
            rule: RouteRule::UndirectedOnly,
            backward: false,
            admissible_hosts_only: true,
        },
        PartialSelector::Forward | PartialSelector::Backward => CurveSpec {
            variant: KVariant::GraphPartial,
            normalizer: admissible as f64,
            rule: RouteRule::DirectionPreserving,
            backward: selector == PartialSelector::Backward,
            admissible_hosts_only: false,
        },
    };
    graph_curve(graph, events, xis, spec)
}

/// All ordered pair distances d(x_i, x_j), i ≠ j, sorted ascending.
/// Unreachable pairs carry infinity.
fn sorted_pair_distances(
    graph: &NetworkGraph,
    positions: &[NetPoint],
) -> Result<Vec<f64>, SecondOrderError> {
    let rows: Vec<Result<Vec<f64>, MetricError>> = exec::map_indices(positions.len(), |i| {
        let field = DistanceField::new(graph, positions[i])?;
        positions
            .iter()
            .enumerate()
            .filter(|&(j, _)| j != i)
            .map(|(_, &q)| field.distance_to(q))
            .collect()
    });
    let mut all = Vec::with_capacity(positions.len() * positions.len().saturating_sub(1));
    for row in rows {
        all.extend(row?);
    }
    all.sort_by(|a, b| a.partial_cmp(b).unwrap());
    Ok(all)
}

/// Metric network K function: normalized count of ordered event pairs
/// within shortest-path distance r, scaled by the total network length.
pub fn k_linear(
    graph: &NetworkGraph,
    events: &EventSet,
    rs: &[f64],
) -> Result<KCurve, SecondOrderError> {
    let n = events.len();
    if n < 2 {
        return Err(SecondOrderError::TooFewEvents { n });
    }
    let mut xs: Vec<f64> = rs.iter().copied().filter(|r| r.is_finite()).collect();
    xs.sort_by(|a, b| a.partial_cmp(b).unwrap());
    xs.dedup();
    let distances = sorted_pair_distances(graph, &events.positions())?;
    let scale = graph.total_length() / (n as f64 * (n as f64 - 1.0));
    let values = xs
        .iter()
        .map(|&r| scale * distances.partition_point(|&d| d <= r) as f64)
        .collect();
    Ok(KCurve {
        variant: KVariant::LinearNetwork,
        xs,
        values,
        n,
        normalizer: graph.total_length(),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum KernelFamily {
    Epanechnikov,
    Gaussian,
    Box,
}

/// A smoothing kernel with its bandwidth; evaluates the scaled density
/// κ_h(u) = κ(u/h)/h.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KernelSpec {
    pub family: KernelFamily,
    pub bandwidth: f64,
}

impl KernelSpec {
    pub fn new(family: KernelFamily, bandwidth: f64) -> Result<Self, SecondOrderError> {
        if !(bandwidth > 0.0) || !bandwidth.is_finite() {
            return Err(SecondOrderError::BadBandwidth { bandwidth });
        }
        Ok(KernelSpec { family, bandwidth })
    }

    pub fn epanechnikov(bandwidth: f64) -> Result<Self, SecondOrderError> {
        Self::new(KernelFamily::Epanechnikov, bandwidth)
    }

    pub fn gaussian(bandwidth: f64) -> Result<Self, SecondOrderError> {
        Self::new(KernelFamily::Gaussian, bandwidth)
    }

    pub fn evaluate(&self, u: f64) -> f64 {
        let z = u / self.bandwidth;
        match self.family {
            KernelFamily::Epanechnikov => {
                if z.abs() <= 1.0 {
                    0.75 * (1.0 - z * z) / self.bandwidth
                } else {
                    0.0
                }
            }
            KernelFamily::Gaussian => {
                (-0.5 * z * z).exp() / (self.bandwidth * (2.0 * std::f64::consts::PI).sqrt())
            }
            KernelFamily::Box => {
                if z.abs() <= 1.0 {
                    0.5 / self.bandwidth
                } else {
                    0.0
                }
            }
        }
    }
}

/// Default pair correlation bandwidth: 0.15 times the largest radius asked
/// for (falling back to 0.15 when every radius is 0).
pub fn default_pcf_bandwidth(rs: &[f64]) -> f64 {
    let max = rs.iter().copied().filter(|r| r.is_finite()).fold(0.0f64, f64::max);
    if max > 0.0 {
        0.15 * max
    } else {
        0.15
    }
}

/// An estimated pair correlation curve. `skipped_pairs` counts ordered pairs
/// dropped because no network point sits at exactly their separation (a
/// zero boundary count would otherwise divide by zero).
#[derive(Debug, Clone, PartialEq)]
pub struct PcfCurve {
    pub xs: Vec<f64>,
    pub values: Vec<f64>,
    pub kernel: KernelSpec,
    pub n: usize,
    pub skipped_pairs: usize,
}

/// Metric pair correlation function.
///
/// For each radius r, sums κ(d(x_i, x_j) − r) over ordered pairs, weighting
/// each pair by the reciprocal of its intensities and of the number of
/// network points at exactly the pair's separation, then scales by the
/// reciprocal summed inverse intensity. Defaults to the homogeneous
/// estimate λ̂ = n/|L| for every event when no intensities are supplied.
pub fn pcf_linear(
    graph: &NetworkGraph,
    events: &EventSet,
    rs: &[f64],
    kernel: KernelSpec,
    intensity: Option<&[f64]>,
) -> Result<PcfCurve, SecondOrderError> {
    let n = events.len();
    if n < 2 {
        return Err(SecondOrderError::TooFewEvents { n });
    }
    if !(kernel.bandwidth > 0.0) || !kernel.bandwidth.is_finite() {
        return Err(SecondOrderError::BadBandwidth { bandwidth: kernel.bandwidth });
    }
    let lambda: Vec<f64> = match intensity {
        Some(values) => {
            if values.len() != n {
                return Err(SecondOrderError::IntensityLengthMismatch {
                    expected: n,
                    got: values.len(),
                });
            }
            values.to_vec()
        }
        None => vec![n as f64 / graph.total_length(); n],
    };
    let positions = events.positions();
    // Pair terms (separation, weight); weight folds in both intensities and
    // the boundary count at that separation.
    type PairTerms = (Vec<(f64, f64)>, usize);
    let rows: Vec<Result<PairTerms, MetricError>> = exec::map_indices(n, |i| {
            let field = DistanceField::new(graph, positions[i])?;
            let mut terms = Vec::with_capacity(n - 1);
            let mut skipped = 0usize;
            for (j, &q) in positions.iter().enumerate() {
                if j == i {
                    continue;
                }
                let d = field.distance_to(q)?;
                if !d.is_finite() {
                    skipped += 1;
                    continue;
                }
                let m = field.circumference(d)?;
                if m == 0 {
                    skipped += 1;
                    continue;
                }
                terms.push((d, 1.0 / (lambda[i] * lambda[j] * m as f64)));
            }
            Ok((terms, skipped))
        });
    let mut terms: Vec<(f64, f64)> = Vec::new();
    let mut skipped_pairs = 0usize;
    for row in rows {
        let (t, s) = row?;
        terms.extend(t);
        skipped_pairs += s;
    }
    let prefactor = 1.0 / lambda.iter().map(|l| 1.0 / l).sum::<f64>();
    let mut xs: Vec<f64> = rs.iter().copied().filter(|r| r.is_finite()).collect();
    xs.sort_by(|a, b| a.partial_cmp(b).unwrap());
    xs.dedup();
    let values = xs
        .iter()
        .map(|&r| {
            prefactor
                * terms
                    .iter()
                    .map(|&(d, w)| kernel.evaluate(d - r) * w)
                    .sum::<f64>()
        })
        .collect();
    Ok(PcfCurve { xs, values, kernel, n, skipped_pairs })
}
