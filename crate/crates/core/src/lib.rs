//! Content delivery for a cache-enabled multi-antenna (MISO) downlink.
//!
//! Three delivery schemes share one Maddah-Ali/Niesen style placement:
//!
//! 1. coded caching on top of max-min fair multicast beamforming,
//! 2. joint zero-forcing and coded caching with chunks combined in the
//!    complex (signal) field,
//! 3. the same with chunks combined in the finite (data) field by XOR.
//!
//! The crate evaluates the finite-SNR symmetric rate of each scheme on a
//! channel realization ([`rates`]), runs both zero-forcing delivery
//! algorithms at symbol level and checks that every user reconstructs its
//! file ([`delivery`]), and provides the combinatorial bookkeeping they
//! share ([`combinatorics`]).
//!
//! The crate is `no_std` and only needs `alloc`. Monte Carlo sweeps, file
//! formats and the command line live in the `cc-miso` crate.

#![no_std]

extern crate alloc;
#[cfg(test)]
extern crate std;

pub mod beamforming;
pub mod channel;
pub mod combinatorics;
pub mod config;
pub mod delivery;
mod error;
pub mod linalg;
pub mod rates;

pub use beamforming::{BeamSolver, BeamVector, SdrOptions};
pub use channel::{ChannelMatrix, SignalBlock};
pub use combinatorics::{binomial, enumerate_subsets, IndexCounter, Subset, SubfileId};
pub use config::SystemConfig;
pub use error::{Error, Result};
pub use num_complex::Complex64;
pub use rates::{RateReport, Scheme};
