//! Reductions between fixed-template CSPs and digraph CSPs.
//!
//! A finite relational structure `A` is turned into a balanced digraph
//! `D(A)` whose CSP is equivalent to that of `A`. The crate builds `D(A)`,
//! translates instances in both directions, lifts polymorphisms from `A` to
//! `D(A)`, and checks everything against a complete homomorphism solver.

pub mod dbuild;
pub mod dot;
pub mod error;
pub mod fixtures;
pub mod forward;
pub mod gen;
pub mod lift;
pub mod model;
pub mod reverse;
pub mod rng;
pub mod singleton;
pub mod solver;
pub mod text;
pub mod verify;

pub use error::{Error, Result};
pub use model::{DVertex, Digraph, Positions, Relation, Role, Structure};
