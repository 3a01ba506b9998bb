//! Clustering- and outlier-aware graph convolutional autoencoder (CO-GCN)
//! for partitioning a monolith application's class-dependency graph into
//! candidate microservices and ranking refactor-candidate classes.
//!
//! The crate is `no_std` (with `alloc`); all IO, file formats and the
//! command-line front end live in the companion `cogcn-cli` crate.
//!
//! Module map:
//!
//! * [`matrix`]: dense `f64` linear algebra, activations, Glorot init
//! * [`rng`]: portable seedable random number generator
//! * [`adam`]: ADAM optimizer with stepped learning-rate decay
//! * [`gradcheck`]: central finite-difference gradient oracle
//! * [`graph`]: monolith description to attributed graph conversion
//! * [`gcn`]: encoder/decoder forward passes, losses and exact gradients
//! * [`trainer`]: pre-training, k-means++ and the alternating loop
//! * [`partition`]: cluster assignments shared by trainer and metrics
//! * [`metrics`]: modularity, structural modularity, 1-NED and IFN
//! * [`synth`]: planted-partition generators and the ARI oracle

#![no_std]

extern crate alloc;
#[cfg(test)]
extern crate std;

pub mod adam;
pub mod gcn;
pub mod gradcheck;
pub mod graph;
pub mod matrix;
pub mod metrics;
pub mod partition;
pub mod rng;
pub mod synth;
pub mod trainer;

pub use matrix::DenseMatrix;
pub use partition::Partition;
