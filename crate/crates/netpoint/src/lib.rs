//! Point pattern analysis on spatial networks.
//!
//! A network here is a planar graph whose vertices carry coordinates and
//! whose edges — undirected or directed — carry positive metric lengths.
//! Events live at metric positions on edges. On top of that this crate
//! provides:
//!
//! - graph construction and validation, degree/adjacency queries, walk
//!   classification and hop-distance neighborhoods ([`graph`]);
//! - exact shortest-path metric geometry: distances between edge points,
//!   metric discs and their boundary point counts ([`metric`]);
//! - intensity estimators over edges, neighborhoods, paths, directional
//!   and combined incidence sets, plus temporal slicing ([`intensity`]);
//! - second-order summaries: graph K functions (undirected, directed and
//!   partially directed variants), the geodesic K function and the pair
//!   correlation function ([`second_order`]);
//! - vertex-attribute tooling: Ward clustering, grid smoothing and
//!   neighborhood statistics ([`geostat`]);
//! - reproducible Poisson simulation of events on a network ([`sim`]);
//! - CSV/GeoJSON ingest with snapping, CSV/JSON/SVG output and the `netpoint`
//!   command line ([`io`], [`cli`]).
//!
//! Heavy loops run on rayon when the default `parallel` feature is on and
//! fall back to plain iterators without it; results are identical either way.

// Validations use `!(x > 0.0)` so NaN fails them too.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cli;
pub mod exec;
pub mod geostat;
pub mod graph;
pub mod intensity;
pub mod io;
pub mod metric;
pub mod second_order;
pub mod sim;
pub mod svg;

pub use geostat::{
    Dendrogram, GeostatError, GridSpec, Merge, SmoothedField, VertexAttributeMatrix,
};
pub use graph::{
    BuildOptions, DegreeMode, Direction, Edge, EdgeId, EdgeKind, EdgeSpec, GraphError,
    NetworkGraph, SequenceClass, SpatialVertex, VertexEdgeSequence, VertexId,
};
pub use intensity::{
    EventRecord, EventSet, IntensityError, IntensityTable, Side, SliceCounts, TimeGrid,
    UnionSelector,
};
pub use io::{IngestError, IngestReport, RawEvent, RejectedEvent};
pub use metric::{DistanceField, MetricError, NetPoint, SubIntervalSet};
pub use sim::{SimError, SimulationSpec};
pub use second_order::{
    KCurve, KDirection, KVariant, KernelFamily, KernelSpec, PartialSelector, PcfCurve,
    SecondOrderError,
};
