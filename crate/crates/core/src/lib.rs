//! Integer multiflow on planar acyclic digraphs with the Eulerian condition.
//!
//! The crate is `no_std` (it needs `alloc`). It contains the combinatorial
//! embedding layer, instance normalization, the Jordan-curve side tests,
//! routing-scheme enumeration, the topological-routing solver and a
//! brute-force oracle used to cross-check it.
//!
//! A typical run:
//!
//! ```
//! use eulerflow_core::{EmbeddedDigraph, Instance, Demand, VertexId, ArcId, solver};
//!
//! // u -> v with a demand asking for one path from u to v.
//! let graph = EmbeddedDigraph::new(
//!     2,
//!     vec![(VertexId(0), VertexId(1))],
//!     vec![vec![ArcId(0)], vec![ArcId(0)]],
//! )
//! .unwrap();
//! let demand = Demand { tail: VertexId(1), head: VertexId(0), request: 1 };
//! let instance = Instance::new(graph, vec![1], vec![demand]).unwrap();
//! let report = solver::solve(&instance, &solver::SolverConfig::default()).unwrap();
//! assert!(report.verdict.is_feasible());
//! ```
#![no_std]
#![warn(missing_debug_implementations)]

extern crate alloc;

pub mod cyclic;
pub mod embedding;
pub mod geometry;
mod ids;
pub mod oracle;
pub mod preprocess;
pub mod scheme;
pub mod solver;

pub use embedding::{Behaviour, Dart, EmbeddedDigraph, EmbeddingViolation, Face, FaceKey, Faces, Side};
pub use ids::{ArcId, DemandId, VertexId};
pub use preprocess::{Demand, Instance, InstanceError, NormalizeError, NormalizedInstance};
pub use solver::{Solution, Verdict};
