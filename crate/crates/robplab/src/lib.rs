//! Workbench for read-once branching programs over monotone 2-CNF formulas.
//!
//! The crate groups together:
//!
//! * [`graph`] / [`cnf`] — graphs, the monotone 2-CNF correspondence `phi(G)`,
//!   vertex covers and cut matchings;
//! * [`mw`] — matching width of permutations and graphs (exact subset DP,
//!   seeded local search, falsification harness);
//! * [`family`] — the hard instance family `T_r(P_q)`: binary-tree products,
//!   canonical tree decompositions and the matching-width bound formula;
//! * [`bp`] — edge-labelled branching programs (single-root, single-leaf),
//!   structural checks, a frontier-based OBDD builder and t-node extraction;
//! * [`circuit`] — structural validators for decomposable and decision
//!   circuits;
//! * [`transform`] — cleaning, uniformization and conversions between the
//!   edge-labelled and the traditional node-labelled models;
//! * [`bounds`] — the lower-bound engine: `f(x)`, t-covers, the random
//!   orientation oracle, cover certificates and the separation calculator;
//! * [`io`] — PACE `.gr`/`.td`, DIMACS `.cnf` and the branching-program text
//!   format;
//! * [`verify`] — the property suites behind `robplab verify`.

#![forbid(unsafe_code)]

pub mod bitset;
pub mod bounds;
pub mod bp;
pub mod circuit;
pub mod cnf;
pub mod error;
pub mod family;
pub mod graph;
pub mod io;
pub mod mw;
pub mod transform;
pub mod verify;

pub use bitset::VarSet;
pub use bounds::{f_const, CoverCertificate, CoverFamily, OrientationSample};
pub use bp::{Nrobp, TraditionalNrobp};
pub use cnf::{CnfFormula, Literal, LiteralSet};
pub use error::{Error, Result};
pub use family::{ProductGraph, TreeDecomposition, TreeGraph};
pub use graph::{Graph, Matching};
pub use mw::{MwResult, Permutation};
