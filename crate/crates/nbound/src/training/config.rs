//! Training configuration with desk-scale defaults, loadable from a flat
//! `key = value` file.

use std::path::Path;

use super::adam::AdamParams;
use crate::error::{Error, Result};

/// All knobs of the training loops.
///
/// Defaults are desk-scale: batches of 8192 with scheduling windows every
/// 2000 iterations. [`TrainConfig::paper_scale`] switches to the full-size
/// 200000-sample batches with 10000-iteration windows.
#[derive(Clone, Debug, PartialEq)]
pub struct TrainConfig {
    /// Adam learning rate.
    pub lr: f64,
    /// Regions sampled per iteration.
    pub batch: usize,
    /// Hard iteration cap; reaching it flags the run non-convergent.
    pub max_iters: u64,
    /// Scheduling window length in iterations.
    pub step_every: u64,
    /// Consecutive clean windows required before stopping.
    pub stop_patience: u32,
    /// Conservative output shift applied at the decision threshold.
    pub eps: f64,
    /// Swap the asymmetry: drive false positives (not negatives) to zero.
    pub invert: bool,
    /// Fix alpha = beta = 1 and disable the schedule (ablation mode).
    pub symmetric: bool,
    pub seed: u64,
    pub adam: AdamParams,
    /// L1+L2 strength ramps linearly from 0 to this value.
    pub reg_lambda_max: f64,
    /// Scheduling windows over which the regularization ramp runs.
    pub reg_ramp_windows: u32,
    /// Oracle samples per region while training.
    pub train_samples_per_region: usize,
    /// Oracle samples per region for evaluation runs.
    pub eval_samples_per_region: usize,
    /// Hidden resample size checked before a stop is accepted.
    pub validation_n: u64,
    /// Sine activation frequency of hidden layers.
    pub omega: f64,
    /// Positional encoding depth (0 disables it).
    pub pe_depth: usize,
    /// k-DOP plane count (0 picks the 4n default).
    pub kdop_planes: usize,
    /// Initial slab-sigmoid temperature.
    pub kdop_tau: f64,
    /// Temperature growth factor per scheduling window.
    pub kdop_tau_growth: f64,
    pub kdop_tau_max: f64,
    /// Outward margin added when hardening trained slab offsets.
    pub kdop_margin: f64,
}

impl Default for TrainConfig {
    fn default() -> Self {
        Self {
            lr: 1e-3,
            batch: 8192,
            max_iters: 200_000,
            step_every: 2000,
            stop_patience: 6,
            eps: 1e-5,
            invert: false,
            symmetric: false,
            seed: 0,
            adam: AdamParams::default(),
            reg_lambda_max: 5e-7,
            reg_ramp_windows: 10,
            train_samples_per_region: 64,
            eval_samples_per_region: 128,
            validation_n: 1_000_000,
            omega: 1.0,
            pe_depth: 0,
            kdop_planes: 0,
            kdop_tau: 25.0,
            kdop_tau_growth: 1.5,
            kdop_tau_max: 400.0,
            kdop_margin: 1e-3,
        }
    }
}

impl TrainConfig {
    /// The full-size configuration: 200000-sample batches, windows every
    /// 10000 iterations.
    pub fn paper_scale() -> Self {
        Self {
            batch: 200_000,
            step_every: 10_000,
            ..Self::default()
        }
    }

    pub fn from_file(path: impl AsRef<Path>) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        Self::from_str_kv(&text)
    }

    /// Parses `key = value` lines; `#` starts a comment.
    pub fn from_str_kv(text: &str) -> Result<Self> {
        let mut cfg = Self::default();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| {
                Error::Config(format!("line {}: expected `key = value`", lineno + 1))
            })?;
            cfg.set(key.trim(), value.trim())
                .map_err(|e| Error::Config(format!("line {}: {e}", lineno + 1)))?;
        }
        Ok(cfg)
    }

    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        fn num<T: std::str::FromStr>(key: &str, v: &str) -> Result<T> {
            v.parse()
                .map_err(|_| Error::Config(format!("bad value for {key}: {v:?}")))
        }
        match key {
            "lr" => self.lr = num(key, value)?,
            "batch" => self.batch = num(key, value)?,
            "max_iters" => self.max_iters = num(key, value)?,
            "step_every" => self.step_every = num(key, value)?,
            "stop_patience" => self.stop_patience = num(key, value)?,
            "eps" => self.eps = num(key, value)?,
            "invert" => self.invert = num(key, value)?,
            "symmetric" => self.symmetric = num(key, value)?,
            "seed" => self.seed = num(key, value)?,
            "adam_beta1" => self.adam.beta1 = num(key, value)?,
            "adam_beta2" => self.adam.beta2 = num(key, value)?,
            "adam_eps" => self.adam.eps = num(key, value)?,
            "reg_lambda_max" => self.reg_lambda_max = num(key, value)?,
            "reg_ramp_windows" => self.reg_ramp_windows = num(key, value)?,
            "train_samples_per_region" => self.train_samples_per_region = num(key, value)?,
            "eval_samples_per_region" => self.eval_samples_per_region = num(key, value)?,
            "validation_n" => self.validation_n = num(key, value)?,
            "omega" => self.omega = num(key, value)?,
            "pe_depth" => self.pe_depth = num(key, value)?,
            "kdop_planes" => self.kdop_planes = num(key, value)?,
            "kdop_tau" => self.kdop_tau = num(key, value)?,
            "kdop_tau_growth" => self.kdop_tau_growth = num(key, value)?,
            "kdop_tau_max" => self.kdop_tau_max = num(key, value)?,
            "kdop_margin" => self.kdop_margin = num(key, value)?,
            other => return Err(Error::Config(format!("unknown config key {other:?}"))),
        }
        if self.batch == 0 || self.step_every == 0 {
            return Err(Error::Config("batch and step_every must be nonzero".into()));
        }
        Ok(())
    }
}
