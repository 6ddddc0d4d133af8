//! Seeded replication with per-replicate counter-based streams.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub type Stream = ChaCha8Rng;

/// Master seed plus replicate count. Replicate `k` always gets the same
/// stream regardless of scheduling.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SeedPlan {
    pub master: u64,
    pub replicates: u64,
}

fn splitmix(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

impl SeedPlan {
    pub fn new(master: u64, replicates: u64) -> Self {
        SeedPlan { master, replicates }
    }

    /// Stream for replicate `index`: key from the master seed, ChaCha stream
    /// id from the index.
    pub fn stream(&self, index: u64) -> Stream {
        let mut rng = ChaCha8Rng::seed_from_u64(self.master);
        rng.set_stream(index);
        rng
    }

    /// Independent plan for a named sub-experiment.
    pub fn derive(&self, tag: &str) -> SeedPlan {
        let h = tag
            .bytes()
            .fold(splitmix(self.master), |h, b| splitmix(h ^ u64::from(b)));
        SeedPlan {
            master: h,
            replicates: self.replicates,
        }
    }

    pub fn with_replicates(&self, replicates: u64) -> SeedPlan {
        SeedPlan {
            master: self.master,
            replicates,
        }
    }
}

/// Runs `task(index, stream)` for every replicate in parallel and returns
/// results in index order. The first failing index (lowest) is reported.
pub fn run_replicated<T, F>(plan: &SeedPlan, task: F) -> Result<Vec<T>>
where
    T: Send,
    F: Fn(u64, &mut Stream) -> Result<T> + Sync,
{
    let results: Vec<Result<T>> = (0..plan.replicates)
        .into_par_iter()
        .map(|k| {
            let mut rng = plan.stream(k);
            task(k, &mut rng)
        })
        .collect();
    let mut out = Vec::with_capacity(results.len());
    for (k, r) in results.into_iter().enumerate() {
        match r {
            Ok(v) => out.push(v),
            Err(e) => {
                return Err(Error::Replicate {
                    index: k as u64,
                    source: Box::new(e),
                })
            }
        }
    }
    Ok(out)
}

/// As [`run_replicated`] on a dedicated pool with a fixed worker count.
pub fn run_replicated_on<T, F>(plan: &SeedPlan, workers: usize, task: F) -> Result<Vec<T>>
where
    T: Send,
    F: Fn(u64, &mut Stream) -> Result<T> + Sync,
{
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers)
        .build()
        .map_err(|e| Error::InvalidArgument(e.to_string()))?;
    let task = &task;
    pool.install(|| run_replicated(plan, task))
}
