//! Vertex-attribute statistics: neighborhood-conditional summaries, planar
//! kernel smoothing of vertex values onto a grid, and Ward hierarchical
//! clustering of attribute rows.
//!
//! The bridge from point patterns is [`VertexAttributeMatrix::from_neighborhood_intensities`],
//! which turns per-category neighborhood intensities into one attribute row
//! per vertex; isolated vertices carry explicit zeros.

use thiserror::Error;

use crate::exec;
use crate::graph::{NetworkGraph, VertexId};
use crate::intensity::{self, EventSet, IntensityError};
use crate::second_order::KernelSpec;

#[derive(Debug, Error, PartialEq)]
pub enum GeostatError {
    #[error("need at least 2 rows to cluster, got {rows}")]
    TooFewRows { rows: usize },
    #[error("attribute matrix has no rows or no channels")]
    EmptyAttributeMatrix,
    #[error("bandwidth must be positive and finite, got {bandwidth}")]
    BadBandwidth { bandwidth: f64 },
    #[error("unknown vertex {vertex}")]
    UnknownVertex { vertex: VertexId },
    #[error("vertex {vertex} has no undirected incident edges")]
    IsolatedVertex { vertex: VertexId },
    #[error("no channel {channel} in a matrix of {channels} channels")]
    UnknownChannel { channel: usize, channels: usize },
    #[error("expected {expected} rows, got {got}")]
    RowCountMismatch { expected: usize, got: usize },
    #[error("value at row {row}, channel {channel} is not finite")]
    NonFiniteValue { row: usize, channel: usize },
    #[error("cut size {k} outside 1..={rows}")]
    BadCut { k: usize, rows: usize },
}

/// One finite attribute row per vertex, one column per channel; row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct VertexAttributeMatrix {
    rows: usize,
    channels: usize,
    values: Vec<f64>,
    labels: Vec<String>,
}

impl VertexAttributeMatrix {
    pub fn new(rows: usize, channels: usize, values: Vec<f64>) -> Result<Self, GeostatError> {
        let labels = (0..channels).map(|c| format!("c{c}")).collect();
        Self::with_labels(rows, values, labels)
    }

    pub fn with_labels(
        rows: usize,
        values: Vec<f64>,
        labels: Vec<String>,
    ) -> Result<Self, GeostatError> {
        let channels = labels.len();
        if rows == 0 || channels == 0 {
            return Err(GeostatError::EmptyAttributeMatrix);
        }
        if values.len() != rows * channels {
            return Err(GeostatError::RowCountMismatch {
                expected: rows * channels,
                got: values.len(),
            });
        }
        for (i, v) in values.iter().enumerate() {
            if !v.is_finite() {
                return Err(GeostatError::NonFiniteValue {
                    row: i / channels,
                    channel: i % channels,
                });
            }
        }
        Ok(VertexAttributeMatrix { rows, channels, values, labels })
    }

    pub fn from_rows(rows: Vec<Vec<f64>>) -> Result<Self, GeostatError> {
        let n = rows.len();
        let channels = rows.first().map(|r| r.len()).unwrap_or(0);
        if rows.iter().any(|r| r.len() != channels) {
            return Err(GeostatError::RowCountMismatch {
                expected: channels,
                got: rows.iter().map(|r| r.len()).find(|&l| l != channels).unwrap_or(0),
            });
        }
        Self::new(n, channels, rows.into_iter().flatten().collect())
    }

    /// Per-category neighborhood intensities as vertex attributes: one
    /// channel per observed mark (a single unlabeled channel when the
    /// pattern carries no marks), zeros on isolated vertices.
    pub fn from_neighborhood_intensities(
        graph: &NetworkGraph,
        events: &EventSet,
    ) -> Result<Self, GeostatError> {
        let categories: Vec<Option<String>> = if events.categories().is_empty() {
            vec![None]
        } else {
            events.categories().iter().cloned().map(Some).collect()
        };
        let mut values = Vec::with_capacity(graph.vertex_count() * categories.len());
        for v in 0..graph.vertex_count() {
            for cat in &categories {
                let value =
                    match intensity::neighborhood_intensity(graph, events, v, cat.as_deref()) {
                        Ok(x) => x,
                        Err(IntensityError::IsolatedVertex { .. }) => 0.0,
                        Err(_) => unreachable!("vertex ids are dense"),
                    };
                values.push(value);
            }
        }
        let labels = categories
            .into_iter()
            .map(|c| c.unwrap_or_else(|| "all".to_string()))
            .collect();
        Self::with_labels(graph.vertex_count(), values, labels)
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn channels(&self) -> usize {
        self.channels
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn get(&self, row: usize, channel: usize) -> f64 {
        self.values[row * self.channels + channel]
    }

    pub fn row(&self, row: usize) -> &[f64] {
        &self.values[row * self.channels..(row + 1) * self.channels]
    }

    fn check_channel(&self, channel: usize) -> Result<(), GeostatError> {
        if channel < self.channels {
            Ok(())
        } else {
            Err(GeostatError::UnknownChannel { channel, channels: self.channels })
        }
    }
}

/// Mean of a channel over the undirected neighbors of `v`.
pub fn neighborhood_conditional_mean(
    graph: &NetworkGraph,
    attrs: &VertexAttributeMatrix,
    v: VertexId,
    channel: usize,
) -> Result<f64, GeostatError> {
    attrs.check_channel(channel)?;
    if attrs.rows() != graph.vertex_count() {
        return Err(GeostatError::RowCountMismatch {
            expected: graph.vertex_count(),
            got: attrs.rows(),
        });
    }
    let neighbors = graph
        .neighbors(v)
        .map_err(|_| GeostatError::UnknownVertex { vertex: v })?;
    if neighbors.is_empty() {
        return Err(GeostatError::IsolatedVertex { vertex: v });
    }
    let sum: f64 = neighbors.iter().map(|&u| attrs.get(u, channel)).sum();
    Ok(sum / neighbors.len() as f64)
}

/// Population variance of a channel over the undirected neighbors of `v` —
/// a dispersion diagnostic to go with the conditional mean.
pub fn neighborhood_conditional_variance(
    graph: &NetworkGraph,
    attrs: &VertexAttributeMatrix,
    v: VertexId,
    channel: usize,
) -> Result<f64, GeostatError> {
    let mean = neighborhood_conditional_mean(graph, attrs, v, channel)?;
    let neighbors = graph.neighbors(v).unwrap();
    let sum: f64 = neighbors
        .iter()
        .map(|&u| (attrs.get(u, channel) - mean).powi(2))
        .sum();
    Ok(sum / neighbors.len() as f64)
}

/// A regular planar query lattice. Without explicit bounds the graph's
/// vertex bounding box is used.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridSpec {
    pub nx: usize,
    pub ny: usize,
    /// (xmin, ymin, xmax, ymax)
    pub bounds: Option<(f64, f64, f64, f64)>,
}

impl Default for GridSpec {
    fn default() -> Self {
        GridSpec { nx: 200, ny: 200, bounds: None }
    }
}

impl GridSpec {
    pub fn square(n: usize) -> Self {
        GridSpec { nx: n, ny: n, bounds: None }
    }
}

fn axis(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    if n == 1 {
        return vec![(lo + hi) / 2.0];
    }
    (0..n)
        .map(|i| lo + i as f64 * (hi - lo) / (n - 1) as f64)
        .collect()
}

/// Vertex attributes smoothed onto a planar grid; `values[channel]` is
/// row-major over the lattice (`iy * xs.len() + ix`).
#[derive(Debug, Clone, PartialEq)]
pub struct SmoothedField {
    pub xs: Vec<f64>,
    pub ys: Vec<f64>,
    pub values: Vec<Vec<f64>>,
    pub bandwidth: f64,
}

impl SmoothedField {
    pub fn value(&self, channel: usize, ix: usize, iy: usize) -> f64 {
        self.values[channel][iy * self.xs.len() + ix]
    }
}

/// Bounding box of the vertex coordinates; `None` on an empty graph.
pub fn bounding_box(graph: &NetworkGraph) -> Option<(f64, f64, f64, f64)> {
    let first = graph.vertices().first()?;
    let mut bb = (first.x, first.y, first.x, first.y);
    for v in graph.vertices() {
        bb.0 = bb.0.min(v.x);
        bb.1 = bb.1.min(v.y);
        bb.2 = bb.2.max(v.x);
        bb.3 = bb.3.max(v.y);
    }
    Some(bb)
}

/// Default smoothing bandwidth: a tenth of the bounding-box diagonal
/// (1.0 when the vertices are coincident).
pub fn default_smooth_bandwidth(graph: &NetworkGraph) -> f64 {
    let diag = bounding_box(graph)
        .map(|(x0, y0, x1, y1)| ((x1 - x0).powi(2) + (y1 - y0).powi(2)).sqrt())
        .unwrap_or(0.0);
    if diag > 0.0 {
        0.1 * diag
    } else {
        1.0
    }
}

/// Normalized kernel average of every attribute channel at each grid point,
/// weighted by planar distance to the vertices. Where a compact kernel gives
/// every vertex zero weight, the nearest vertex's value is used (lowest id
/// on ties), keeping each output inside the channel's value range.
pub fn smooth_field(
    graph: &NetworkGraph,
    attrs: &VertexAttributeMatrix,
    grid: &GridSpec,
    kernel: KernelSpec,
) -> Result<SmoothedField, GeostatError> {
    if graph.vertex_count() == 0 {
        return Err(GeostatError::EmptyAttributeMatrix);
    }
    if attrs.rows() != graph.vertex_count() {
        return Err(GeostatError::RowCountMismatch {
            expected: graph.vertex_count(),
            got: attrs.rows(),
        });
    }
    if !(kernel.bandwidth > 0.0) || !kernel.bandwidth.is_finite() {
        return Err(GeostatError::BadBandwidth { bandwidth: kernel.bandwidth });
    }
    if grid.nx == 0 || grid.ny == 0 {
        return Err(GeostatError::EmptyAttributeMatrix);
    }
    let (x0, y0, x1, y1) = grid
        .bounds
        .or_else(|| bounding_box(graph))
        .expect("vertex count checked above");
    let xs = axis(x0, x1, grid.nx);
    let ys = axis(y0, y1, grid.ny);
    let channels = attrs.channels();
    let per_point: Vec<Vec<f64>> = exec::map_indices(grid.nx * grid.ny, |idx| {
        let (ix, iy) = (idx % grid.nx, idx / grid.nx);
        let (qx, qy) = (xs[ix], ys[iy]);
        let mut weights = Vec::with_capacity(graph.vertex_count());
        let mut total = 0.0;
        let mut nearest = (0usize, f64::INFINITY);
        for v in graph.vertices() {
            let dist = ((v.x - qx).powi(2) + (v.y - qy).powi(2)).sqrt();
            if dist < nearest.1 {
                nearest = (v.id, dist);
            }
            let w = kernel.evaluate(dist);
            weights.push(w);
            total += w;
        }
        if total > 0.0 {
            (0..channels)
                .map(|c| {
                    weights
                        .iter()
                        .enumerate()
                        .map(|(v, w)| w * attrs.get(v, c))
                        .sum::<f64>()
                        / total
                })
                .collect()
        } else {
            (0..channels).map(|c| attrs.get(nearest.0, c)).collect()
        }
    });
    let mut values = vec![Vec::with_capacity(per_point.len()); channels];
    for point in &per_point {
        for (c, &v) in point.iter().enumerate() {
            values[c].push(v);
        }
    }
    Ok(SmoothedField { xs, ys, values, bandwidth: kernel.bandwidth })
}

/// One agglomeration step: clusters `a` and `b` (scipy-style ids — originals
/// 0..n, the i-th merge creating id n+i) joined at `height`, forming a
/// cluster of `size` rows.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Merge {
    pub a: usize,
    pub b: usize,
    pub height: f64,
    pub size: usize,
}

/// The full Ward merge history over n rows.
#[derive(Debug, Clone, PartialEq)]
pub struct Dendrogram {
    n: usize,
    merges: Vec<Merge>,
}

impl Dendrogram {
    pub fn merges(&self) -> &[Merge] {
        &self.merges
    }

    pub fn observations(&self) -> usize {
        self.n
    }

    /// Labels after undoing the last k−1 merges: exactly k clusters, labeled
    /// 0..k in first-row-occurrence order.
    pub fn cut(&self, k: usize) -> Result<Vec<usize>, GeostatError> {
        if k == 0 || k > self.n {
            return Err(GeostatError::BadCut { k, rows: self.n });
        }
        let mut parent: Vec<usize> = (0..self.n + self.merges.len()).collect();
        fn find(parent: &mut [usize], mut x: usize) -> usize {
            while parent[x] != x {
                parent[x] = parent[parent[x]];
                x = parent[x];
            }
            x
        }
        for (i, m) in self.merges.iter().take(self.n - k).enumerate() {
            let target = self.n + i;
            let ra = find(&mut parent, m.a);
            let rb = find(&mut parent, m.b);
            parent[ra] = target;
            parent[rb] = target;
        }
        let mut labels = Vec::with_capacity(self.n);
        let mut relabel: Vec<(usize, usize)> = Vec::new();
        for row in 0..self.n {
            let root = find(&mut parent, row);
            let label = match relabel.iter().find(|&&(r, _)| r == root) {
                Some(&(_, l)) => l,
                None => {
                    let l = relabel.len();
                    relabel.push((root, l));
                    l
                }
            };
            labels.push(label);
        }
        Ok(labels)
    }
}

/// Squared Euclidean distance between two attribute rows.
fn row_dist2(attrs: &VertexAttributeMatrix, i: usize, j: usize) -> f64 {
    attrs
        .row(i)
        .iter()
        .zip(attrs.row(j))
        .map(|(a, b)| (a - b) * (a - b))
        .sum()
}

/// Agglomerative Ward clustering via the Lance–Williams recurrence on
/// squared Euclidean distances.
///
/// Heights are the Ward dissimilarity at merge time,
/// D(A, B) = 2·|A|·|B|/(|A|+|B|) · ‖centroid(A) − centroid(B)‖², which the
/// recurrence maintains exactly; singleton pairs start at the plain squared
/// distance. Each step merges the globally closest pair, ties broken by the
/// lowest (a, b) id pair, so the history is fully deterministic.
pub fn ward_cluster(attrs: &VertexAttributeMatrix) -> Result<Dendrogram, GeostatError> {
    let n = attrs.rows();
    if n < 2 {
        return Err(GeostatError::TooFewRows { rows: n });
    }
    // Dense symmetric dissimilarity over scipy-style cluster ids; inactive
    // ids keep stale rows that are never read.
    let total = 2 * n - 1;
    let mut dist = vec![f64::INFINITY; total * total];
    let at = |a: usize, b: usize| a * total + b;
    for i in 0..n {
        for j in (i + 1)..n {
            let d = row_dist2(attrs, i, j);
            dist[at(i, j)] = d;
            dist[at(j, i)] = d;
        }
    }
    let mut active: Vec<usize> = (0..n).collect();
    let mut size = vec![1usize; total];
    // Cached best partner per active cluster: (distance, partner id).
    let mut best: Vec<Option<(f64, usize)>> = vec![None; total];
    let scan_best = |dist: &[f64], active: &[usize], c: usize| -> Option<(f64, usize)> {
        active
            .iter()
            .filter(|&&o| o != c)
            .map(|&o| (dist[at(c, o)], o))
            .min_by(|x, y| x.partial_cmp(y).unwrap())
    };
    for c in &active {
        best[*c] = scan_best(&dist, &active, *c);
    }
    let mut merges = Vec::with_capacity(n - 1);
    for step in 0..n - 1 {
        // Globally closest pair; the per-cluster cache orders ties by
        // partner id, and the outer scan resolves remaining ties by the
        // lower cluster id, together yielding the lowest (a, b) pair.
        let (mut a, mut b, mut h) = (usize::MAX, usize::MAX, f64::INFINITY);
        for &c in &active {
            if let Some((d, partner)) = best[c] {
                let (lo, hi) = (c.min(partner), c.max(partner));
                if (d, lo, hi) < (h, a, b) {
                    h = d;
                    a = lo;
                    b = hi;
                }
            }
        }
        let merged = n + step;
        size[merged] = size[a] + size[b];
        merges.push(Merge { a, b, height: h, size: size[merged] });
        active.retain(|&c| c != a && c != b);
        // Lance–Williams update for the Ward criterion.
        let (na, nb) = (size[a] as f64, size[b] as f64);
        for &x in &active {
            let nx = size[x] as f64;
            let d = ((na + nx) * dist[at(a, x)] + (nb + nx) * dist[at(b, x)]
                - nx * h)
                / (na + nb + nx);
            dist[at(merged, x)] = d;
            dist[at(x, merged)] = d;
        }
        for &x in &active {
            match best[x] {
                Some((_, partner)) if partner == a || partner == b => {
                    let mut with_merged = active.clone();
                    with_merged.push(merged);
                    best[x] = scan_best(&dist, &with_merged, x);
                }
                Some((d, _)) if dist[at(x, merged)] < d => {
                    best[x] = Some((dist[at(x, merged)], merged));
                }
                _ => {}
            }
        }
        active.push(merged);
        best[merged] = scan_best(&dist, &active, merged);
    }
    Ok(Dendrogram { n, merges })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{EdgeSpec, SpatialVertex};
    use crate::intensity::EventRecord;
    use crate::second_order::KernelFamily;

    fn column(values: &[f64]) -> VertexAttributeMatrix {
        VertexAttributeMatrix::from_rows(values.iter().map(|&v| vec![v]).collect()).unwrap()
    }

    #[test]
    fn matrix_validation() {
        assert!(VertexAttributeMatrix::new(2, 2, vec![1.0, 2.0, 3.0, 4.0]).is_ok());
        assert!(matches!(
            VertexAttributeMatrix::new(2, 2, vec![1.0, 2.0]),
            Err(GeostatError::RowCountMismatch { .. })
        ));
        assert!(matches!(
            VertexAttributeMatrix::new(1, 2, vec![1.0, f64::NAN]),
            Err(GeostatError::NonFiniteValue { row: 0, channel: 1 })
        ));
        assert!(matches!(
            VertexAttributeMatrix::new(0, 2, vec![]),
            Err(GeostatError::EmptyAttributeMatrix)
        ));
    }

    fn path_graph() -> NetworkGraph {
        NetworkGraph::build(
            vec![
                SpatialVertex::new(0, 0.0, 0.0),
                SpatialVertex::new(1, 1.0, 0.0),
                SpatialVertex::new(2, 2.0, 0.0),
                SpatialVertex::new(3, 5.0, 5.0),
            ],
            vec![EdgeSpec::undirected(0, 0, 1), EdgeSpec::undirected(1, 1, 2)],
        )
        .unwrap()
    }

    #[test]
    fn conditional_mean_over_neighbors() {
        let g = path_graph();
        let attrs = column(&[2.0, 9.0, 4.0, 0.0]);
        assert!((neighborhood_conditional_mean(&g, &attrs, 1, 0).unwrap() - 3.0).abs() < 1e-12);
        assert!((neighborhood_conditional_mean(&g, &attrs, 0, 0).unwrap() - 9.0).abs() < 1e-12);
        assert_eq!(
            neighborhood_conditional_mean(&g, &attrs, 3, 0).unwrap_err(),
            GeostatError::IsolatedVertex { vertex: 3 }
        );
        assert!(matches!(
            neighborhood_conditional_mean(&g, &attrs, 0, 5),
            Err(GeostatError::UnknownChannel { .. })
        ));
    }

    #[test]
    fn conditional_mean_of_constant_field_is_constant() {
        let g = path_graph();
        let attrs = column(&[7.5; 4]);
        for v in 0..3 {
            assert!(
                (neighborhood_conditional_mean(&g, &attrs, v, 0).unwrap() - 7.5).abs() < 1e-12
            );
        }
    }

    #[test]
    fn conditional_variance_spreads() {
        let g = path_graph();
        let attrs = column(&[2.0, 9.0, 4.0, 0.0]);
        // Neighbors of 1 hold {2, 4}: mean 3, population variance 1.
        assert!((neighborhood_conditional_variance(&g, &attrs, 1, 0).unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn intensity_matrix_has_category_channels() {
        let g = path_graph();
        let ev = EventSet::new(
            &g,
            vec![
                EventRecord::at(0, 0.5).with_mark("x"),
                EventRecord::at(1, 0.5).with_mark("y"),
                EventRecord::at(1, 0.7).with_mark("x"),
            ],
        )
        .unwrap();
        let attrs = VertexAttributeMatrix::from_neighborhood_intensities(&g, &ev).unwrap();
        assert_eq!(attrs.labels(), ["x", "y"]);
        assert_eq!(attrs.rows(), 4);
        // Vertex 0 touches only edge 0: one "x" event on unit length.
        assert!((attrs.get(0, 0) - 1.0).abs() < 1e-12);
        assert!((attrs.get(0, 1) - 0.0).abs() < 1e-12);
        // Isolated vertex 3 carries zeros.
        assert_eq!(attrs.row(3), &[0.0, 0.0]);
    }

    #[test]
    fn smoother_reproduces_constant_field() {
        let g = path_graph();
        let attrs = column(&[5.0; 4]);
        let kernel = KernelSpec::gaussian(1.0).unwrap();
        let field = smooth_field(&g, &attrs, &GridSpec::square(20), kernel).unwrap();
        for v in &field.values[0] {
            assert!((v - 5.0).abs() < 1e-12);
        }
    }

    #[test]
    fn smoother_midpoint_of_two_vertices_is_their_mean() {
        let g = NetworkGraph::build(
            vec![SpatialVertex::new(0, 0.0, 0.0), SpatialVertex::new(1, 2.0, 0.0)],
            vec![EdgeSpec::undirected(0, 0, 1)],
        )
        .unwrap();
        let attrs = column(&[0.0, 10.0]);
        let kernel = KernelSpec::gaussian(0.7).unwrap();
        // 3x3 grid over the bbox puts the center point exactly at (1, 0).
        let grid = GridSpec { nx: 3, ny: 3, bounds: Some((0.0, -1.0, 2.0, 1.0)) };
        let field = smooth_field(&g, &attrs, &grid, kernel).unwrap();
        assert!((field.value(0, 1, 1) - 5.0).abs() < 1e-12);
    }

    #[test]
    fn smoother_matches_hand_computed_weights() {
        let g = NetworkGraph::build(
            vec![
                SpatialVertex::new(0, 0.0, 0.0),
                SpatialVertex::new(1, 1.0, 0.0),
                SpatialVertex::new(2, 0.0, 2.0),
            ],
            vec![EdgeSpec::undirected(0, 0, 1), EdgeSpec::undirected(1, 0, 2)],
        )
        .unwrap();
        let attrs = column(&[1.0, 3.0, 7.0]);
        let kernel = KernelSpec::gaussian(1.0).unwrap();
        let grid = GridSpec { nx: 1, ny: 1, bounds: Some((0.5, 0.5, 0.5, 0.5)) };
        let field = smooth_field(&g, &attrs, &grid, kernel).unwrap();
        let w = |d2: f64| (-0.5 * d2).exp() / (2.0 * std::f64::consts::PI).sqrt();
        let (w0, w1, w2) = (w(0.5), w(0.5), w(2.5));
        let expected = (w0 * 1.0 + w1 * 3.0 + w2 * 7.0) / (w0 + w1 + w2);
        assert!((field.value(0, 0, 0) - expected).abs() < 1e-12);
    }

    #[test]
    fn smoother_far_corner_falls_back_to_nearest_vertex() {
        let g = path_graph();
        let attrs = column(&[1.0, 2.0, 3.0, 9.0]);
        let kernel = KernelSpec::new(KernelFamily::Box, 0.25).unwrap();
        let grid = GridSpec { nx: 2, ny: 1, bounds: Some((-40.0, 0.0, -30.0, 0.0)) };
        let field = smooth_field(&g, &attrs, &grid, kernel).unwrap();
        // Both query points are out of kernel range of every vertex; vertex 0
        // is nearest.
        assert_eq!(field.values[0], vec![1.0, 1.0]);
    }

    #[test]
    fn smoother_output_stays_in_range() {
        let g = path_graph();
        let attrs = column(&[1.0, 2.0, 3.0, 9.0]);
        let kernel = KernelSpec::gaussian(0.5).unwrap();
        let field = smooth_field(&g, &attrs, &GridSpec::square(15), kernel).unwrap();
        for v in &field.values[0] {
            assert!((1.0..=9.0).contains(v));
        }
    }

    #[test]
    fn ward_separated_pairs() {
        let attrs = column(&[0.0, 0.1, 10.0, 10.1]);
        let dendrogram = ward_cluster(&attrs).unwrap();
        let labels = dendrogram.cut(2).unwrap();
        assert_eq!(labels, vec![0, 0, 1, 1]);
        // First two merges join the tight pairs at squared distance 0.01.
        assert!((dendrogram.merges()[0].height - 0.01).abs() < 1e-12);
        assert!((dendrogram.merges()[1].height - 0.01).abs() < 1e-12);
    }

    #[test]
    fn ward_merge_ids_follow_numbering() {
        let attrs = column(&[0.0, 0.1, 10.0, 10.1]);
        let dendrogram = ward_cluster(&attrs).unwrap();
        let m = dendrogram.merges();
        // The tight pairs merge first (in either order — their squared gaps
        // differ only in the last float bits), then the two pair-clusters,
        // which were assigned ids 4 and 5.
        let mut first_two = [(m[0].a, m[0].b), (m[1].a, m[1].b)];
        first_two.sort();
        assert_eq!(first_two, [(0, 1), (2, 3)]);
        assert_eq!((m[2].a, m[2].b), (4, 5));
        assert_eq!(m[2].size, 4);
    }

    #[test]
    fn ward_heights_are_nondecreasing() {
        let values: Vec<f64> = (0..12).map(|i| ((i * 37 + 11) % 17) as f64 * 0.3).collect();
        let dendrogram = ward_cluster(&column(&values)).unwrap();
        for w in dendrogram.merges().windows(2) {
            assert!(w[0].height <= w[1].height + 1e-12);
        }
    }

    #[test]
    fn cut_extremes() {
        let attrs = column(&[0.0, 1.0, 5.0]);
        let dendrogram = ward_cluster(&attrs).unwrap();
        assert_eq!(dendrogram.cut(3).unwrap(), vec![0, 1, 2]);
        assert_eq!(dendrogram.cut(1).unwrap(), vec![0, 0, 0]);
        assert!(matches!(dendrogram.cut(0), Err(GeostatError::BadCut { .. })));
        assert!(matches!(dendrogram.cut(4), Err(GeostatError::BadCut { .. })));
    }

    #[test]
    fn ward_needs_two_rows() {
        let attrs = column(&[1.0]);
        assert_eq!(ward_cluster(&attrs).unwrap_err(), GeostatError::TooFewRows { rows: 1 });
    }

    #[test]
    fn ward_singleton_heights_are_squared_distances() {
        let attrs = column(&[0.0, 3.0]);
        let dendrogram = ward_cluster(&attrs).unwrap();
        assert!((dendrogram.merges()[0].height - 9.0).abs() < 1e-12);
    }
}
