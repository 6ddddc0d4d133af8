//! Exact-in-law event-driven simulation of MAP paths.

pub mod bridge;
pub mod passage;
pub mod path;
pub mod skeleton;
pub mod transform;
pub mod splitting;
pub mod walker;

pub use passage::{first_passage, first_passage_up, run_to_passage, CrossingMode, Direction, PassageOutcome, PassageSample};
pub use path::{simulate_path, simulate_path_with, Cause, MapPath, PathEvent, PathOptions, TerminalStatus};
pub use skeleton::{skeleton_chain, SkeletonSample};
pub use splitting::{sample_at_exponential_horizon, sample_with_exposure, ArgmaxTie, SplittingSample};
pub use transform::{check_increment_duality, check_law_consistency, empirical_transform, terminal_sample, TransformEntry, TransformReport};
pub use walker::{Segment, Step, StepEnd, Walker};
