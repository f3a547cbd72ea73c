//! Homogeneous Poisson simulation of events on a network.
//!
//! Each edge draws from its own RNG stream keyed by (seed, edge id), so the
//! result depends only on the spec — never on thread count or scheduling.
//! Per edge, the event count is Poisson(rate × length) and positions are
//! uniform along the edge; marks and times are drawn per event when the
//! spec asks for them.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Poisson};
use thiserror::Error;

use crate::exec;
use crate::graph::NetworkGraph;
use crate::intensity::{EventRecord, EventSet};

#[derive(Debug, Error, PartialEq)]
pub enum SimError {
    #[error("rate must be finite and non-negative, got {rate}")]
    BadRate { rate: f64 },
    #[error("mark probabilities must be non-negative and sum to 1, got sum {sum}")]
    BadMarkDistribution { sum: f64 },
    #[error("invalid time range [{start}, {end}]")]
    BadTimeRange { start: f64, end: f64 },
}

/// What to simulate: a rate in events per unit length, a seed, and optional
/// mark/time sampling.
#[derive(Debug, Clone, PartialEq)]
pub struct SimulationSpec {
    pub rate: f64,
    pub seed: u64,
    /// Categories with their probabilities; must sum to 1.
    pub marks: Option<Vec<(String, f64)>>,
    /// Event times drawn uniformly from this closed range.
    pub time_range: Option<(f64, f64)>,
}

impl SimulationSpec {
    pub fn new(rate: f64, seed: u64) -> Self {
        SimulationSpec { rate, seed, marks: None, time_range: None }
    }

    fn validate(&self) -> Result<(), SimError> {
        if !self.rate.is_finite() || self.rate < 0.0 {
            return Err(SimError::BadRate { rate: self.rate });
        }
        if let Some(marks) = &self.marks {
            let sum: f64 = marks.iter().map(|(_, p)| p).sum();
            if marks.iter().any(|(_, p)| !(*p >= 0.0)) || (sum - 1.0).abs() > 1e-9 {
                return Err(SimError::BadMarkDistribution { sum });
            }
        }
        if let Some((start, end)) = self.time_range {
            if !start.is_finite() || !end.is_finite() || start < 0.0 || end < start {
                return Err(SimError::BadTimeRange { start, end });
            }
        }
        Ok(())
    }
}

/// Simulate a Poisson pattern on the network. Identical spec and graph give
/// identical output, in any execution mode.
pub fn simulate_poisson(
    graph: &NetworkGraph,
    spec: &SimulationSpec,
) -> Result<EventSet, SimError> {
    spec.validate()?;
    let per_edge: Vec<Vec<EventRecord>> = exec::map_collect(graph.edges(), |edge| {
        let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
        rng.set_stream(edge.id as u64);
        let lambda = spec.rate * edge.length;
        let count = if lambda > 0.0 {
            Poisson::new(lambda).expect("positive mean").sample(&mut rng) as usize
        } else {
            0
        };
        (0..count)
            .map(|_| {
                let mut event = EventRecord::at(edge.id, rng.gen_range(0.0..=edge.length));
                if let Some(marks) = &spec.marks {
                    let mut u: f64 = rng.gen_range(0.0..1.0);
                    let mut chosen = &marks.last().expect("validated non-empty").0;
                    for (mark, p) in marks {
                        if u < *p {
                            chosen = mark;
                            break;
                        }
                        u -= p;
                    }
                    event.mark = Some(chosen.clone());
                }
                if let Some((start, end)) = spec.time_range {
                    event.time = Some(rng.gen_range(start..=end));
                }
                event
            })
            .collect()
    });
    let events: Vec<EventRecord> = per_edge.into_iter().flatten().collect();
    Ok(EventSet::new(graph, events).expect("simulated events are valid by construction"))
}
