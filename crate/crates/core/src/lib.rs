//! Cohesion-based clustering for finite metric spaces.
//!
//! A distance matrix is turned into a *cohesion* matrix (double-centred,
//! sign-flipped); sets with nonnegative internal cohesion are clusters. On
//! top of that sit a greedy hierarchical algorithm maximizing modularity and
//! the K-sets / dual K-sets partitional algorithms driven by the triangular
//! distance.

pub mod cohesion;
pub mod datagen;
pub mod error;
pub mod eval;
pub mod graphs;
pub mod hierarchical;
pub mod io;
pub mod ksets;
pub mod matrix;
pub mod metric;
pub mod partition;

pub use cohesion::{
    cohesion_from_similarity, cohesion_matrix, cohesion_point, cohesion_sets, dual_distance,
    dual_distance_checked, graph_cohesion, is_cluster, theorem1_statements, validate_cohesion,
    ClusterReport, CohesionMatrix, DiagonalPolicy,
};
pub use error::{Error, Result};
pub use eval::{nmi, ContingencyTable};
pub use graphs::{
    epsilon_graph, euclidean_distance, geodesic_distance, geodesic_distance_filled,
    resistance_distance, Graph, Unreachable,
};
pub use hierarchical::{
    modularity, run_hierarchical, run_hierarchical_forced, MergeEvent, MergePolicy, MergeTree,
};
pub use ksets::{
    normalized_modularity, run_dual_ksets, run_ksets, triangular_distance,
    triangular_distance_cohesion, Init, KSetsRun, MoveRecord,
};
pub use matrix::SquareMatrix;
pub use metric::{
    avg_distance, rel_distance_point, rel_distance_sets, rel_distance_to_point, validate_metric,
    Axiom, DistanceMatrix, PointSet, ValidationReport, TOLERANCE,
};
pub use partition::Partition;
