//! Conservative training: the asymmetric loss, its step-wise weight
//! schedule, Adam, and the training loops with miss-free early stopping.

mod adam;
mod config;
mod hierarchy;
mod loss;
mod schedule;
mod trainer;

pub use adam::{Adam, AdamParams};
pub use config::TrainConfig;
pub use hierarchy::{train_hierarchy, IndicatorTree, ModelTree};
pub use loss::{clamp_prob, weighted_bce, weighted_bce_grad, weighted_bce_logit_grad, LossWeights};
pub use schedule::{DimProfile, ScheduleState};
pub use trainer::{
    loss_batch, train, train_early, train_kdop, BatchStats, IterRecord, KdopOutcome, TrainOutcome,
    TrainingStats, ValidationRecord, WindowRecord,
};
