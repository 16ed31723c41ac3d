pub mod graph;
pub mod stp;
pub mod flow;
pub mod baselines;
pub mod hms3po;
pub mod ms3po;

use rand::SeedableRng;

/// Random number generator used by every stochastic solver.
pub type SolverRng = rand_chacha::ChaCha8Rng;

pub fn seeded_rng(seed: u64) -> SolverRng {
    SolverRng::seed_from_u64(seed)
}
