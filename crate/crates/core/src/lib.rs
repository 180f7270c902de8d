//! Sampling graphs with prescribed degrees (and two-class joint degree
//! constraints) with switch-type Markov chains, plus the exact small-instance
//! machinery used to check stability, distance and canonical-path claims.

pub mod canonical;
pub mod chains;
pub mod graphcore;
pub mod realize;
pub mod stability;
pub mod statespace;
