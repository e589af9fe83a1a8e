//! Exact inversion numbers and tournament minimum rank.
//!
//! The crate computes `inv(D)`, the minimum number of vertex-set inversions
//! that make an oriented graph acyclic, and `tmr(T)`, the minimum rank over
//! the two-element field of a symmetric matrix whose off-diagonal ones mark
//! arcs whose reversal makes a tournament transitive. Every value comes with
//! a certificate that can be replayed independently.
//!
//! Modules:
//!
//! * [`digraph`]: oriented graphs, tournaments, inversion, dijoin, n-join;
//! * [`gf2`]: bit-packed matrices over GF(2), symmetric factorization,
//!   full-rank principal submatrices, block elimination;
//! * [`decycling`]: decycling predicates, family/matrix conversions and
//!   certificates;
//! * [`search`]: branch-and-prune solvers for `inv` and `tmr`;
//! * [`constructions`]: dijoin families, block-diagonal matrices, extension
//!   of an oriented graph to a tournament;
//! * [`explorer`]: isomorphism-class enumeration, theorem verification and
//!   conjecture scans;
//! * [`cli`]: the command-line front end.

pub mod cli;
pub mod constructions;
pub mod decycling;
pub mod digraph;
pub mod error;
pub mod explorer;
pub mod gf2;
pub mod search;

pub use decycling::{Certificate, CertificateKind};
pub use digraph::{OrientedGraph, Tournament, VertexFamily};
pub use error::{Error, Result};
pub use gf2::{MatGF2, SymMatGF2};
pub use search::{SearchBudget, SearchError};
