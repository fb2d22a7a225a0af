//! Trace algebras and generalised reactive processes.
//!
//! The crate is organised bottom-up:
//!
//! - [`algebra`]: the abstract trace-algebra interface (a cancellative monoid
//!   with no inverses), the derived prefix order and subtraction, and an
//!   executable law suite that can be run against any model.
//! - [`models`]: three concrete models. Finite event sequences, nonnegative
//!   exact rationals, and piecewise-polynomial timed traces.
//! - [`relation`]: a finite-universe relational engine. Predicates are sets of
//!   bindings; sequential composition, conditional, assignment, refinement,
//!   lattice operations and fixed points are all computed extensionally.
//! - [`reactive`]: the healthiness conditions R1, R2c, R3 and R, the healthy
//!   lattice, the trace-contribution form and executable theorem checks.
//! - [`merge`]: parallel-by-merge, merge healthiness (R2m, Rm) and an
//!   interleaving merge.
//! - [`dsl`]: a small predicate language that denotes into [`relation`].
//! - [`suite`]: configurable law and theorem suites producing JSON reports.

pub mod algebra;
pub mod dsl;
pub mod merge;
pub mod models;
pub mod reactive;
pub mod relation;
pub mod seed;
pub mod suite;

pub use algebra::{check_laws, LawReport, Mode, TraceModel};
pub use models::{Event, EventSeq, NonNegRat, Poly, Segment, TimedTrace};
pub use relation::{Alphabet, Domain, Predicate, Value};
