//! Capacitated sum-of-radii clustering.
//!
//! Given `n` points in a finite metric space, a hard capacity `U_p` for every
//! point and a cluster budget `k`, pick `k` distinct centers and assign every
//! point to one of them without exceeding any center's capacity, minimising
//! the sum (or the `L_p` norm) of the cluster radii.
//!
//! The crate provides:
//!
//! - [`uniform`]: a randomized `3(1+ε)`-approximation for uniform capacities
//!   (`(2^{2p-1}+1)^{1/p}(1+ε)` for `L_p` objectives), built from a covering
//!   phase, a flow-based grouping step and a matching-based redistribution
//!   of overflow points.
//! - [`nonuniform`]: a randomized approximation for arbitrary capacities whose
//!   ratio is `max(3(1+2α), 5+2/α)`, minimised to `4+√13` at
//!   `α = (1+√13)/6`.
//! - [`oracle`]: an exact brute-force solver used as ground truth at desk
//!   scale.
//! - [`gen`]: random instance families and the vertex-cover hardness gadget.
//! - [`bench`]: a config-driven sweep that checks approximation ratios
//!   against the oracle and writes CSV.

pub mod bench;
pub mod driver;
pub mod error;
pub mod flow;
pub mod format;
pub mod gen;
pub mod guess;
pub mod model;
pub mod nonuniform;
pub mod oracle;
pub mod profiles;
pub mod uniform;

pub use error::{Error, Result};
pub use model::{Ball, Clustering, Instance, MetricSpace, Objective};
