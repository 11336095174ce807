//! Deterministic distributed matching algorithms on a round-synchronous
//! message-passing simulator.
//!
//! The crate is organized in layers:
//!
//! * [`graph`] — immutable simple graphs with stable node/edge identifiers,
//!   plus the structural transforms (degree-2 decomposition, bipartite double
//!   cover, path/cycle extraction) the algorithms are built on.
//! * [`sim`] — the synchronous execution engine for node programs, with
//!   round, message and message-size accounting.
//! * [`subroutines`] — symmetry breaking: palette reduction coloring, maximal
//!   matching on colored bounded-degree graphs, and the directed-run
//!   orientation used when rounding long paths and cycles.
//! * [`fractional`] — greedy construction of dyadic fractional matchings and
//!   b-matchings.
//! * [`rounding`] — the phase-by-phase rounding of a fractional assignment to
//!   near-integrality and the constant-round integralization.
//! * [`suite`] — the end-to-end algorithms (constant-factor, (2+eps),
//!   maximal, eps-maximal, weighted, b-matching, edge dominating set).
//! * [`oracles`] — independent exact solvers and validity checkers used to
//!   verify every approximation claim at small scale.

pub mod fractional;
pub mod graph;
pub mod oracles;
pub mod rounding;
pub mod sim;
pub mod subroutines;
pub mod suite;

pub use graph::{EdgeId, Graph, NodeId};
pub use sim::RoundTrace;
