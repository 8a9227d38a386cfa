//! Curve pairs, surgery and bicorn sequences, train tracks, and electrified graphs,
//! all at desk scale with exact arithmetic.

pub mod coarse;
pub mod curvepair;
mod dsu;
pub mod generate;
pub mod models;
pub mod surface;
pub mod traintrack;

pub use num_rational::Ratio;

/// Exact rational used for weights and half-integer metric quantities.
pub type Q = Ratio<i64>;
