//! Network design with safe and unsafe edges.
//!
//! An edge set is (p,q)-flex-connected for a pair of vertices when the pair
//! stays p-edge-connected after any q unsafe edges fail. The crate provides
//! exact feasibility checks, cut-family machinery, a primal-dual cover for
//! uncrossable families, a 5-approximation for (2,2) single-pair instances,
//! staged augmentation for spanning (p,q) instances, an LP relaxation with
//! separation oracles, exact desk-scale optima, and a text instance format.

pub mod cover;
pub mod cuts;
pub mod error;
pub mod fgc;
pub mod flex_st;
pub mod flow;
pub mod format;
pub mod graph;
pub mod instances;
pub mod lp;
pub mod oracle;
mod search;
pub mod steiner;

pub use error::{FlexError, Result};
pub use graph::{
    check_feasible, Cost, Cut, EdgeId, EdgeSet, Feasibility, FlexGraph, Requirement, Safety, Scope,
    Solution, Vertex, VertexSet,
};
