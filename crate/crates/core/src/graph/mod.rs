//! Revealed-entry sampling and the bipartite observation graph.

mod components;
mod giant;
mod observations;

pub use components::{connected_components, ComponentLabeling, ComponentSize, UnionFind};
pub use giant::{giant_component_bisection, giant_component_fixed_point, GiantComponentSolution, SolveMethod};
pub use observations::{observation_count, sample_positions, Adjacency, ObservationSet};
