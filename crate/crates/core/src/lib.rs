//! Average shortest path length reduction by edge addition.
//!
//! The crate provides an undirected simple [`Graph`] with hop-count
//! shortest paths, four random network models, node measures (degree,
//! betweenness, random-walk accessibility), seven strategies that add one
//! edge at a time, and a batch driver that runs every strategy on many
//! seeded model instances and aggregates the resulting trajectories.
//!
//! ```
//! use aspl_core::{gen_er, run_strategy, StrategyConfig, StrategyKind};
//!
//! let g = gen_er(200, 0.03, 7).unwrap().largest_connected_component().0;
//! let cfg = StrategyConfig { budget: 5, ..StrategyConfig::new(StrategyKind::Accessibility1, 7) };
//! let run = run_strategy(&g, &cfg).unwrap();
//! assert_eq!(run.trajectory.len(), 6);
//! assert!(run.trajectory[5] <= run.trajectory[0]);
//! ```

pub mod error;
pub mod experiment;
pub mod generators;
pub mod graph;
pub mod io;
pub mod measures;
pub mod rng;
pub mod strategies;

pub use error::{ExperimentError, GraphError, IoError};
pub use experiment::{
    pearson, run_plan, scatter_data, summarize, ExperimentPlan, InstanceInfo, PlanOutput, RunManifest,
    ScatterSeries, SummaryRow, SummaryTable, Trajectory,
};
pub use generators::{gen_ba, gen_er, gen_wax, gen_ws, Generated, ModelKind, ModelParams};
pub use graph::{Coordinates, DistanceRow, Graph, UNREACHABLE};
pub use io::{ingest_openflights, load_edge_list, AirportNetwork, IngestOptions};
pub use measures::{
    accessibility, betweenness, degree_stats, walk_distribution, MeasureKind, MeasureVector,
    WalkDistribution,
};
pub use strategies::{propose_edge, propose_edge_excluding, run_strategy, MeasureCache, StrategyConfig, StrategyKind, StrategyRun};
