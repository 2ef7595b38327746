//! Better/best-response dynamics in finite and smooth games, analysed through
//! nearby contractive maps.
//!
//! The crate is organised around six pieces:
//!
//! * [`game`]: finite and smooth game representations, deviation gains, the
//!   maximum pairwise difference between games, potential residuals, ε-Nash sets
//!   and sampled Lipschitz estimates.
//! * [`dynamics`]: sequential better/best response and simultaneous best
//!   response, trajectories, cycle detection, the near-potential cycle check and
//!   responses to noisy estimates of the current profile.
//! * [`contraction`]: fitting a contractive proxy to a dynamics map, Banach
//!   iteration, and the trap radii derived from the proxy.
//! * [`repeated`]: the multilinear potential extension, exact second-order
//!   residuals, the improvement bound for simultaneous best response and the
//!   potential level sets that eventually trap the path of play.
//! * [`cournot`]: the Cournot duopoly application and its experiment harness.
//! * [`io`] and [`cli`]: file formats, reports and the command-line entry point.

pub mod cli;
pub mod contraction;
pub mod cournot;
pub mod dynamics;
pub mod error;
pub mod game;
pub mod io;
pub mod repeated;
pub mod rootfind;
pub mod verify;

pub use error::{Error, Result};

/// Euclidean distance between two equally long coordinate vectors.
pub fn distance(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y) * (x - y))
        .sum::<f64>()
        .sqrt()
}

pub fn norm(a: &[f64]) -> f64 {
    a.iter().map(|x| x * x).sum::<f64>().sqrt()
}

/// Seed of the `index`-th independent stream derived from a run seed.
pub fn stream_seed(seed: u64, index: u64) -> u64 {
    use rand::{RngCore, SeedableRng};
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng.next_u64()
}
