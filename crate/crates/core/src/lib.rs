//! Product-state (Holevo) capacities of qubit channels.
//!
//! The crate covers the amplitude-damping and depolarizing qubit channels,
//! the maximizing input ensembles, and the sup-min capacity of a convex
//! combination of two memoryless channels. Every optimized value can be
//! checked against the brute-force ensemble search in [`oracle`].
//!
//! All entropies and capacities are reported in bits.
//!
//! Module map:
//!
//! - [`linalg2`]: 2×2 Hermitian algebra, qubit states, ensembles and entropies
//! - [`channels`]: the channels as executable maps
//! - [`capacity`]: Holevo χ, the amplitude-damping χ(a) curve and its solver
//! - [`mixtures`]: capacities of two-channel convex combinations
//! - [`oracle`]: exhaustive search over discretized ensembles
//! - [`search`]: bracketing root finder and golden-section maximizer

#![forbid(unsafe_code)]

pub mod capacity;
pub mod channels;
pub mod error;
pub mod linalg2;
pub mod mixtures;
pub mod oracle;
pub mod search;

pub use capacity::{CapacityResult, Method};
pub use channels::{Channel, MixedChannelPair};
pub use error::{Error, Result};
pub use linalg2::{Complex, Ensemble, Herm2, QubitState};
pub use mixtures::{MinBranch, MinimaxResult};
pub use oracle::{OracleConfig, OracleOutcome};
