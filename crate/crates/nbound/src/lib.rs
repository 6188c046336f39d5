//! Tight, conservative bounding predictors for n-dimensional occupancy.
//!
//! The crate fits classic geometric primitives (boxes, spheres, ellipsoids,
//! k-DOPs, BVHs) and gradient-trained models (sine-activated MLPs, early-exit
//! nets, value grids, learnable k-DOP offsets) to binary occupancy indicators
//! over `[0,1]^n`, then evaluates them on point/ray/plane/box queries with
//! false-positive-rate, throughput and break-even-cost metrics.
//!
//! "Conservative" means zero false negatives: a predictor may over-cover the
//! object (false positives cost time) but must never miss a query region the
//! object actually touches. Classic fits achieve this by construction; the
//! trained models are driven there by an asymmetric loss whose
//! false-negative weight escalates until no misses remain.
//!
//! Core math is generic over the scalar type via [`scalar::Real`]
//! (`f32`/`f64`); the `*64` aliases below are the concrete types used by the
//! CLI and file formats.

pub mod error;
pub mod evaluation;
pub mod geometry;
pub mod indicator;
pub mod io;
pub mod model;
pub mod nnet;
pub mod query;
pub mod rng;
pub mod scalar;
pub mod training;
pub mod vecn;

pub use error::{Error, Result};
pub use scalar::Real;
pub use vecn::MAX_DIM;

pub type Region64 = query::Region<f64>;
pub type QueryOracle64 = query::QueryOracle<f64>;
pub type Mlp64 = nnet::Mlp<f64>;
pub type EarlyExitNet64 = nnet::EarlyExitNet<f64>;
pub type ReluField64 = nnet::ReluField<f64>;
pub type LearnableKDop64 = nnet::LearnableKDop<f64>;
pub type Model64 = model::Model<f64>;
