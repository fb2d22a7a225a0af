//! Concrete trace models: event sequences, nonnegative rationals and
//! piecewise-polynomial timed traces.

pub mod poly;
pub mod rat;
pub mod seq;
pub mod timed;

pub use poly::Poly;
pub use rat::{NonNegRat, RatError, RatModel};
pub use seq::{Event, EventSeq, SeqModel};
pub use timed::{closure_check, is_well_formed, PiecewiseFn, Segment, Signature, TimedModel, TimedTrace, TimedTraceError};
