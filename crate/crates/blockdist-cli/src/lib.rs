//! Experiment harness for the block-distance library: scaling ladders with
//! log-log exponent fits, empirical-versus-predicted comparison, and the
//! seeded invariant suite. The `blockdist` binary is a thin shell over these
//! modules.

pub mod checks;
pub mod compare;
pub mod config;
pub mod scaling;
