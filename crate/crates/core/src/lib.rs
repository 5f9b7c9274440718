//! Granular-ball generation and ball-based classification.
//!
//! A granular ball covers a subset of labelled samples with a center (the
//! mean of the contributing points) and a radius (their mean distance to the
//! center). This crate builds ball sets with the attention-driven splitter
//! ([`granulation::granulate`]), with the original 2-means splitter kept as a
//! baseline ([`granulation::granulate_kmeans_baseline`]), and classifies
//! queries against a ball set ([`classify`]).
//!
//! Every computation is deterministic: identical inputs produce bit-identical
//! ball sets, and all randomness (fold assignment, label noise, the k-means
//! baseline) is drawn from explicitly seeded generators.
//!
//! The crate is `no_std` + `alloc`. The default `std` feature only adds
//! wall-clock timing to granulation and cross-validation reports.
#![cfg_attr(not(feature = "std"), no_std)]
#![deny(rustdoc::broken_intra_doc_links)]

extern crate alloc;

pub mod ball;
pub mod classify;
pub mod counter;
pub mod dataset;
pub mod error;
pub mod eval;
pub mod geometry;
pub mod granulation;
pub mod normalize;

mod clock;

pub use ball::{BallId, BallOrigin, GranularBall};
pub use classify::{BallClassifier, DistanceRule, Prediction};
pub use counter::DistanceCounter;
pub use dataset::{Dataset, Label, Sample};
pub use error::{Error, Result};
pub use granulation::{GranulationConfig, GranulationResult, Method};
pub use normalize::NormalizationParams;

/// Seed used wherever a caller does not supply one.
pub const DEFAULT_SEED: u64 = 42;
