//! The guide's chapters, included as documentation so that `cargo test`
//! compiles and runs every listing.

#[doc = include_str!("../../../book/src/introduction.md")]
pub mod introduction {}
#[doc = include_str!("../../../book/src/trace-algebras.md")]
pub mod trace_algebras {}
#[doc = include_str!("../../../book/src/timed-traces.md")]
pub mod timed_traces {}
#[doc = include_str!("../../../book/src/predicates.md")]
pub mod predicates {}
#[doc = include_str!("../../../book/src/reactive.md")]
pub mod reactive {}
#[doc = include_str!("../../../book/src/parallel.md")]
pub mod parallel {}
#[doc = include_str!("../../../book/src/language.md")]
pub mod language {}
#[doc = include_str!("../../../book/src/cli.md")]
pub mod cli {}
