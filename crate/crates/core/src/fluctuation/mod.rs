//! Fluctuation theory estimators: ladder processes, potentials, overshoots,
//! splitting at the maximum and the harmonic function for the process
//! killed below zero.

pub mod conditioned;
pub mod harmonic;
pub mod ladder;
pub mod occupation;
pub mod overshoot;
pub mod potential;
pub mod renewal;
pub mod tightness;
pub mod wiener_hopf;

pub use conditioned::*;
pub use harmonic::*;
pub use ladder::*;
pub use occupation::*;
pub use overshoot::*;
pub use potential::*;
pub use renewal::*;
pub use tightness::*;
pub use wiener_hopf::*;
