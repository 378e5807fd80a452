//! Exact computation in Culler–Vogtmann Outer space.
//!
//! The crate covers marked metric graphs and the `Out(F_N)` action, the
//! Lipschitz stretching factor computed from candidate loops, exact
//! minimization of an automorphism's displacement over a simplex, breadth
//! first exploration of the minimally displaced set, and the finite-order
//! model graphs whose unique fixed point is checked simplex by simplex.
//!
//! All metric values are exact rationals.

pub mod displacement;
pub mod error;
pub mod explorer;
pub mod finite_order;
pub mod free_group;
pub mod graph;
pub mod lipschitz;
pub mod lp;
pub mod marked;
pub mod rational;
pub mod samples;
pub mod text;

pub use displacement::{MinimizationResult, RatioSystem};
pub use error::{Error, Result};
pub use explorer::{Census, ExploreLimits, SimplexCensusEntry};
pub use finite_order::FiniteOrderModel;
pub use free_group::{AutoPair, CyclicWord, Letter, Word};
pub use graph::{CandidateKind, CandidateLoop, EdgePath, Forest, Graph, GraphIso, HalfEdge};
pub use lipschitz::StretchResult;
pub use marked::{CVPoint, MarkedGraph, SimplexRef};
pub use rational::Rational;
pub use text::Workspace;
