//! Simulation and numerical verification toolkit for Markov additive
//! processes and the real self-similar Markov processes they generate.

// `!(x > 0.0)` style guards also reject NaN
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod engine;
pub mod entrance;
pub mod error;
pub mod fixtures;
pub mod fluctuation;
pub mod lamperti;
pub mod model;
pub mod quad;
pub mod report;
pub mod sim;
pub mod stats;
pub mod verify;

pub use error::{Error, Result};
pub use model::*;
pub use engine::{run_replicated, SeedPlan, Stream};
pub use stats::{ks_distance, Atom, ComplexStat, EmpiricalMeasure, SummaryStat};
