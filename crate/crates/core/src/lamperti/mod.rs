//! The Lamperti-Kiu time change between MAPs and real self-similar Markov
//! processes.

pub mod clock;
pub mod exit;
pub mod rssmp;
pub mod scaling;

pub use exit::{
    check_mu_consistency, estimate_mu_eps, exit_from, exit_law_from, exit_moment_scaling, first_exit, halving_schedule,
    ConsistencyReport, ExitOutcome, ExitSample, ExitScalingReport, MuEpsReport, EXIT_CAP,
};
pub use rssmp::{simulate_rssmp, state_of_sign, to_rssmp, RssmpEvent, RssmpPath, RssmpStatus, ScalingIndex};
pub use scaling::{check_scaling, rssmp_marginals, ScalingReport};
