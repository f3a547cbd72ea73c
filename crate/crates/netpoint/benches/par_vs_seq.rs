//! Parallel-versus-sequential timings for the three heaviest kernels:
//! pairwise metric distances (k_linear), grid smoothing and simulation.
//!
//! With the default `parallel` feature each benchmark runs twice — on the
//! default rayon pool and inside a single-thread pool — so one report shows
//! the spread. Compile with `--no-default-features` to time the plain
//! sequential code path instead.

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};

use netpoint::geostat::{
    default_smooth_bandwidth, smooth_field, GridSpec, VertexAttributeMatrix,
};
use netpoint::second_order::{k_linear, KernelSpec};
use netpoint::sim::{simulate_poisson, SimulationSpec};
use netpoint::{EdgeSpec, EventSet, NetworkGraph, SpatialVertex};

/// An n-by-n unit grid network.
fn grid_graph(n: usize) -> NetworkGraph {
    let mut vertices = Vec::new();
    for row in 0..n {
        for col in 0..n {
            vertices.push(SpatialVertex::new(row * n + col, col as f64, row as f64));
        }
    }
    let mut edges = Vec::new();
    for row in 0..n {
        for col in 0..n {
            let v = row * n + col;
            if col + 1 < n {
                edges.push(EdgeSpec::undirected(edges.len(), v, v + 1));
            }
            if row + 1 < n {
                edges.push(EdgeSpec::undirected(edges.len(), v, v + n));
            }
        }
    }
    NetworkGraph::build(vertices, edges).unwrap()
}

fn events_on(graph: &NetworkGraph, rate: f64) -> EventSet {
    simulate_poisson(graph, &SimulationSpec::new(rate, 42)).unwrap()
}

/// Run `work` on the default pool and again on one thread, under the same
/// benchmark group, so the two modes appear side by side.
fn bench_both<F: Fn() + Sync>(c: &mut Criterion, name: &str, work: F) {
    let mut group = c.benchmark_group(name);
    group.sample_size(10);
    #[cfg(feature = "parallel")]
    {
        group.bench_function(BenchmarkId::from_parameter("parallel"), |b| b.iter(&work));
        let single = rayon::ThreadPoolBuilder::new()
            .num_threads(1)
            .build()
            .unwrap();
        group.bench_function(BenchmarkId::from_parameter("single-thread"), |b| {
            b.iter(|| single.install(&work))
        });
    }
    #[cfg(not(feature = "parallel"))]
    group.bench_function(BenchmarkId::from_parameter("sequential"), |b| b.iter(&work));
    group.finish();
}

fn bench_k_linear(c: &mut Criterion) {
    let graph = grid_graph(12);
    let events = events_on(&graph, 0.6);
    let rs: Vec<f64> = (0..=20).map(|i| i as f64 * 0.5).collect();
    bench_both(c, "k_linear", || {
        k_linear(&graph, &events, &rs).unwrap();
    });
}

fn bench_smooth(c: &mut Criterion) {
    let graph = grid_graph(12);
    let events = events_on(&graph, 0.6);
    let attrs = VertexAttributeMatrix::from_neighborhood_intensities(&graph, &events).unwrap();
    let grid = GridSpec { nx: 64, ny: 64, bounds: None };
    let kernel = KernelSpec::gaussian(default_smooth_bandwidth(&graph)).unwrap();
    bench_both(c, "smooth_field", || {
        smooth_field(&graph, &attrs, &grid, kernel).unwrap();
    });
}

fn bench_simulate(c: &mut Criterion) {
    let graph = grid_graph(25);
    let spec = SimulationSpec::new(4.0, 7);
    bench_both(c, "simulate_poisson", || {
        simulate_poisson(&graph, &spec).unwrap();
    });
}

criterion_group!(benches, bench_k_linear, bench_smooth, bench_simulate);
criterion_main!(benches);
