use netpoint::{EdgeSpec, EventRecord, EventSet, NetworkGraph, SpatialVertex};
use netpoint::second_order::{k_graph_directed, KDirection};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let graph = NetworkGraph::build(
        vec![
            SpatialVertex::new(0, 0.0, 0.0),
            SpatialVertex::new(1, 1.0, 0.0),
            SpatialVertex::new(2, 1.0, 1.0),
        ],
        vec![EdgeSpec::undirected(0, 0, 1), EdgeSpec::directed(1, 1, 2)],
    )?;
    let events = EventSet::new(&graph, vec![
        EventRecord::at(0, 0.3),
        EventRecord::at(1, 0.5),
        EventRecord::at(1, 0.9),
    ])?;
    let k = k_graph_directed(&graph, &events, &[0, 1, 2], KDirection::Forward)?;
    println!("{:?}", k.values);
    Ok(())
}
