//! Training loops: conservative single-output models, the two-headed
//! early-exit net, and gradient-found k-DOP offsets.
//!
//! One iteration samples a batch of uniform query regions, labels them with
//! the oracle, and takes an Adam step on the weighted cross-entropy.
//! Scheduling windows of `step_every` iterations drive the asymmetry: a
//! window that still contains misses escalates the miss-side weight. A run
//! stops once `stop_patience` consecutive windows are miss-free *and* a
//! hidden resample of `validation_n` fresh regions confirms zero misses;
//! hitting the iteration cap instead returns the model flagged
//! non-convergent, and the caller decides what to do with it.
//!
//! Training is single-threaded and deterministic: region and label streams
//! are ChaCha substreams keyed by `(seed, iteration)`.

use std::time::Instant;

use super::adam::Adam;
use super::config::TrainConfig;
use super::loss::{weighted_bce, LossWeights};
use super::schedule::{DimProfile, ScheduleState};
use crate::error::{Error, Result};
use crate::geometry::KDop;
use crate::nnet::{threshold_hit, EarlyExitNet, FieldNet, LearnableKDop};
use crate::query::{uniform_region, QueryKind, QueryOracle, Region};
use crate::rng::{mix, stream};
use crate::scalar::Real;
use crate::vecn;

const SEED_REGIONS: u64 = 0x5247_494f;
const SEED_ORACLE: u64 = 0x4f52_4143;
const SEED_VALIDATION: u64 = 0x5641_4c49;

#[derive(Clone, Debug, Default)]
pub struct BatchStats {
    pub loss: f64,
    pub fn_count: u64,
    pub fp_count: u64,
}

#[derive(Clone, Debug)]
pub struct IterRecord {
    pub iteration: u64,
    pub alpha: f64,
    pub beta: f64,
    pub loss: f64,
    pub fn_count: u64,
    pub fp_count: u64,
}

#[derive(Clone, Debug)]
pub struct WindowRecord {
    pub window: u32,
    pub end_iteration: u64,
    pub alpha: f64,
    pub beta: f64,
    /// Pre-normalization schedule weights, for auditing either reading of
    /// the schedule.
    pub raw_grow: f64,
    pub raw_shrink: f64,
    pub fn_count: u64,
    pub fp_count: u64,
    pub mean_loss: f64,
}

#[derive(Clone, Copy, Debug)]
pub struct ValidationRecord {
    pub scanned: u64,
    pub misses: u64,
}

#[derive(Clone, Debug, Default)]
pub struct TrainingStats {
    pub iters: Vec<IterRecord>,
    pub windows: Vec<WindowRecord>,
    pub validation: Option<ValidationRecord>,
    pub iterations: u64,
    pub train_seconds: f64,
}

impl TrainingStats {
    /// Per-iteration log: `iteration,alpha,beta,loss,fn,fp`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("iteration,alpha,beta,loss,fn,fp\n");
        for r in &self.iters {
            out.push_str(&format!(
                "{},{},{},{},{},{}\n",
                r.iteration, r.alpha, r.beta, r.loss, r.fn_count, r.fp_count
            ));
        }
        out
    }
}

#[derive(Clone, Debug)]
pub struct TrainOutcome<M> {
    pub model: M,
    pub stats: TrainingStats,
    /// False when the iteration cap was reached before a validated stop;
    /// such a model is not certified conservative.
    pub converged: bool,
}

/// One labeled batch: accumulates the weighted-BCE value and parameter
/// gradient (mean over the batch, plus L1+L2 at `lambda`), and counts the
/// batch confusion under the `eps`-shifted threshold. `on_positive` sees
/// every region the oracle labeled 1.
#[allow(clippy::too_many_arguments)]
pub fn loss_batch<R: Real, M: FieldNet<R>>(
    model: &M,
    scratch: &mut M::Scratch,
    oracle: &QueryOracle<R>,
    kind: QueryKind,
    seed: u64,
    iteration: u64,
    batch: usize,
    weights: &LossWeights<R>,
    eps: R,
    lambda: R,
    grads: &mut [R],
    mut on_positive: impl FnMut(&Region<R>),
) -> BatchStats {
    grads.fill(R::zero());
    let dim = oracle.dim();
    let mut rng_regions = stream(mix(seed, SEED_REGIONS), iteration);
    let mut rng_labels = stream(mix(seed, SEED_ORACLE), iteration);
    let scale = R::from_f((batch as f64).recip());
    let mut enc: Vec<R> = Vec::with_capacity(kind.encoded_len(dim));
    let mut stats = BatchStats::default();
    let mut loss = R::zero();
    for _ in 0..batch {
        let region = uniform_region::<R>(&mut rng_regions, kind, dim);
        let y = oracle.label(&mut rng_labels, &region);
        if y {
            on_positive(&region);
        }
        region.encode_into(&mut enc);
        let yhat = model.forward(&enc, scratch);
        loss = loss + weighted_bce(yhat, y, weights);
        model.backward_bce(scratch, yhat, y, weights.alpha, weights.beta, scale, grads);
        let predicted = threshold_hit(yhat, eps);
        if y && !predicted {
            stats.fn_count += 1;
        } else if !y && predicted {
            stats.fp_count += 1;
        }
    }
    loss = loss * scale;
    if lambda > R::zero() {
        let two = R::from_f(2.0);
        let mut reg = R::zero();
        for (g, &p) in grads.iter_mut().zip(model.params()) {
            reg = reg + p.abs() + p * p;
            *g = *g + lambda * (p.signum() + two * p);
        }
        loss = loss + lambda * reg;
    }
    stats.loss = loss.to_f();
    stats
}

/// Counts critical misses of `predict` on a hidden resample; stops at the
/// first miss. A critical miss is a false negative, or a false positive in
/// inverted mode.
fn run_validation<R: Real>(
    mut predict: impl FnMut(&Region<R>) -> bool,
    oracle: &QueryOracle<R>,
    kind: QueryKind,
    n: u64,
    seed: u64,
    invert: bool,
) -> ValidationRecord {
    let dim = oracle.dim();
    for i in 0..n {
        let region = uniform_region::<R>(&mut stream(mix(seed, 1), i), kind, dim);
        let y = oracle.label(&mut stream(mix(seed, 2), i), &region);
        let p = predict(&region);
        let miss = if invert { p && !y } else { y && !p };
        if miss {
            return ValidationRecord {
                scanned: i + 1,
                misses: 1,
            };
        }
    }
    ValidationRecord {
        scanned: n,
        misses: 0,
    }
}

fn reg_lambda(cfg: &TrainConfig, windows_done: u32) -> f64 {
    if cfg.reg_ramp_windows == 0 {
        return cfg.reg_lambda_max;
    }
    cfg.reg_lambda_max * (windows_done as f64 / cfg.reg_ramp_windows as f64).min(1.0)
}

/// Window-level progress on stderr when `NBOUND_TRAIN_LOG` is set.
fn log_window(rec: &WindowRecord) {
    if std::env::var_os("NBOUND_TRAIN_LOG").is_some() {
        eprintln!(
            "window {} @ iter {}: alpha={:.2} fn={} fp={} loss={:.5}",
            rec.window, rec.end_iteration, rec.alpha, rec.fn_count, rec.fp_count, rec.mean_loss
        );
    }
}

#[derive(Default)]
struct WindowAccum {
    fn_count: u64,
    fp_count: u64,
    loss_sum: f64,
    iters: u64,
}

impl WindowAccum {
    fn add(&mut self, b: &BatchStats) {
        self.fn_count += b.fn_count;
        self.fp_count += b.fp_count;
        self.loss_sum += b.loss;
        self.iters += 1;
    }
    fn reset(&mut self) {
        *self = Self::default();
    }
}

/// Trains a single-output model to answer `kind` queries against `oracle`
/// conservatively (or inverse-conservatively with `cfg.invert`).
pub fn train<R: Real, M: FieldNet<R>>(
    mut model: M,
    oracle: &QueryOracle<R>,
    kind: QueryKind,
    cfg: &TrainConfig,
) -> Result<TrainOutcome<M>> {
    let dim = oracle.dim();
    let expected = kind.encoded_len(dim);
    if model.input_dim() != expected {
        return Err(Error::DimMismatch {
            expected,
            got: model.input_dim(),
        });
    }
    let started = Instant::now();
    let mut sched = ScheduleState::new(DimProfile::from_dim(dim)?);
    let mut adam = Adam::new(model.params().len(), cfg.adam);
    let mut grads = vec![R::zero(); model.params().len()];
    let mut scratch = model.make_scratch();
    let eff_eps = R::from_f(if cfg.invert { -cfg.eps } else { cfg.eps });
    let lr = R::from_f(cfg.lr);
    let mut stats = TrainingStats::default();
    let mut win = WindowAccum::default();
    let mut clean_streak = 0u32;
    let mut validation_attempts = 0u64;
    let mut converged = false;

    for iteration in 0..cfg.max_iters {
        let sched_w: LossWeights<R> = if cfg.symmetric {
            LossWeights::symmetric()
        } else {
            sched.weights()
        };
        let applied = if cfg.invert { sched_w.flipped() } else { sched_w };
        let lambda = R::from_f(reg_lambda(cfg, stats.windows.len() as u32));
        let bs = loss_batch(
            &model, &mut scratch, oracle, kind, cfg.seed, iteration, cfg.batch, &applied,
            eff_eps, lambda, &mut grads, |_| {},
        );
        adam.step(model.params_mut(), &grads, lr);
        stats.iters.push(IterRecord {
            iteration,
            alpha: applied.alpha.to_f(),
            beta: applied.beta.to_f(),
            loss: bs.loss,
            fn_count: bs.fn_count,
            fp_count: bs.fp_count,
        });
        win.add(&bs);
        stats.iterations = iteration + 1;

        if (iteration + 1) % cfg.step_every == 0 {
            let misses = if cfg.invert { win.fp_count } else { win.fn_count };
            stats.windows.push(WindowRecord {
                window: stats.windows.len() as u32,
                end_iteration: iteration,
                alpha: applied.alpha.to_f(),
                beta: applied.beta.to_f(),
                raw_grow: sched.raw().0,
                raw_shrink: sched.raw().1,
                fn_count: win.fn_count,
                fp_count: win.fp_count,
                mean_loss: win.loss_sum / win.iters as f64,
            });
            log_window(stats.windows.last().unwrap());
            if !cfg.symmetric {
                sched.step::<R>(misses > 0);
            }
            if misses == 0 {
                clean_streak += 1;
            } else {
                clean_streak = 0;
            }
            win.reset();

            if clean_streak >= cfg.stop_patience {
                let vseed = mix(cfg.seed, SEED_VALIDATION ^ validation_attempts);
                validation_attempts += 1;
                let mut enc: Vec<R> = Vec::new();
                let record = run_validation(
                    |r| {
                        r.encode_into(&mut enc);
                        threshold_hit(model.forward(&enc, &mut scratch), eff_eps)
                    },
                    oracle,
                    kind,
                    cfg.validation_n,
                    vseed,
                    cfg.invert,
                );
                stats.validation = Some(record);
                if record.misses == 0 {
                    converged = true;
                    break;
                }
                clean_streak = 0;
                if !cfg.symmetric {
                    sched.step::<R>(true);
                }
            }
        }
    }
    stats.train_seconds = started.elapsed().as_secs_f64();
    Ok(TrainOutcome {
        model,
        stats,
        converged,
    })
}

/// Trains the two-headed early-exit net: the late head approximates the
/// query conservatively; the early head approximates its negation with the
/// asymmetry flipped, so the *combined* predictor never misses. Stopping
/// requires miss-free windows of the combined predictor plus validation.
pub fn train_early<R: Real>(
    mut net: EarlyExitNet<R>,
    oracle: &QueryOracle<R>,
    kind: QueryKind,
    cfg: &TrainConfig,
) -> Result<TrainOutcome<EarlyExitNet<R>>> {
    if cfg.invert {
        return Err(Error::Invalid(
            "inverted mode is not defined for early-exit nets".into(),
        ));
    }
    let dim = oracle.dim();
    let expected = kind.encoded_len(dim);
    if net.input_dim() != expected {
        return Err(Error::DimMismatch {
            expected,
            got: net.input_dim(),
        });
    }
    let started = Instant::now();
    let profile = DimProfile::from_dim(dim)?;
    let mut late_sched = ScheduleState::new(profile);
    let mut early_sched = ScheduleState::new(profile);
    let mut adam_late = Adam::new(net.late().params().len(), cfg.adam);
    let mut adam_early = Adam::new(net.early().params().len(), cfg.adam);
    let mut grads_late = vec![R::zero(); net.late().params().len()];
    let mut grads_early = vec![R::zero(); net.early().params().len()];
    let mut scratch = net.make_scratch();
    let eps = R::from_f(cfg.eps);
    let lr = R::from_f(cfg.lr);
    let scale = R::from_f((cfg.batch as f64).recip());
    let mut stats = TrainingStats::default();
    let mut win = WindowAccum::default();
    let mut win_late_fn = 0u64;
    let mut win_early_miss = 0u64;
    let mut clean_streak = 0u32;
    let mut validation_attempts = 0u64;
    let mut converged = false;
    let mut enc: Vec<R> = Vec::with_capacity(expected);

    for iteration in 0..cfg.max_iters {
        let w_late: LossWeights<R> = if cfg.symmetric {
            LossWeights::symmetric()
        } else {
            late_sched.weights()
        };
        // The early head learns the negated query; its conservative
        // direction punishes claiming "miss" on occupied regions, which is
        // the flipped orientation.
        let w_early: LossWeights<R> = if cfg.symmetric {
            LossWeights::symmetric()
        } else {
            early_sched.weights::<R>().flipped()
        };
        grads_late.fill(R::zero());
        grads_early.fill(R::zero());
        let mut rng_regions = stream(mix(cfg.seed, SEED_REGIONS), iteration);
        let mut rng_labels = stream(mix(cfg.seed, SEED_ORACLE), iteration);
        let mut bs = BatchStats::default();
        let mut loss = R::zero();
        for _ in 0..cfg.batch {
            let region = uniform_region::<R>(&mut rng_regions, kind, dim);
            let y = oracle.label(&mut rng_labels, &region);
            region.encode_into(&mut enc);
            let (e, l) = net.forward_both(&enc, &mut scratch);
            loss = loss + weighted_bce(l, y, &w_late) + weighted_bce(e, !y, &w_early);
            net.late()
                .backward_bce(&mut scratch.late, l, y, w_late.alpha, w_late.beta, scale, &mut grads_late);
            net.early().backward_bce(
                &mut scratch.early,
                e,
                !y,
                w_early.alpha,
                w_early.beta,
                scale,
                &mut grads_early,
            );
            let early_fired = threshold_hit(e, -eps);
            let predicted = if early_fired {
                false
            } else {
                threshold_hit(l, eps)
            };
            if y && !predicted {
                bs.fn_count += 1;
            } else if !y && predicted {
                bs.fp_count += 1;
            }
            if y && early_fired {
                win_early_miss += 1;
            }
            if y && !threshold_hit(l, eps) {
                win_late_fn += 1;
            }
        }
        let lambda = R::from_f(reg_lambda(cfg, stats.windows.len() as u32));
        if lambda > R::zero() {
            let two = R::from_f(2.0);
            for (g, &p) in grads_late.iter_mut().zip(net.late().params()) {
                loss = loss + lambda * (p.abs() + p * p);
                *g = *g + lambda * (p.signum() + two * p);
            }
            for (g, &p) in grads_early.iter_mut().zip(net.early().params()) {
                loss = loss + lambda * (p.abs() + p * p);
                *g = *g + lambda * (p.signum() + two * p);
            }
        }
        bs.loss = (loss * scale).to_f();
        adam_late.step(net.late_mut().params_mut(), &grads_late, lr);
        adam_early.step(net.early_mut().params_mut(), &grads_early, lr);
        stats.iters.push(IterRecord {
            iteration,
            alpha: w_late.alpha.to_f(),
            beta: w_late.beta.to_f(),
            loss: bs.loss,
            fn_count: bs.fn_count,
            fp_count: bs.fp_count,
        });
        win.add(&bs);
        stats.iterations = iteration + 1;

        if (iteration + 1) % cfg.step_every == 0 {
            stats.windows.push(WindowRecord {
                window: stats.windows.len() as u32,
                end_iteration: iteration,
                alpha: w_late.alpha.to_f(),
                beta: w_late.beta.to_f(),
                raw_grow: late_sched.raw().0,
                raw_shrink: late_sched.raw().1,
                fn_count: win.fn_count,
                fp_count: win.fp_count,
                mean_loss: win.loss_sum / win.iters as f64,
            });
            log_window(stats.windows.last().unwrap());
            let combined_clean = win.fn_count == 0;
            if !cfg.symmetric {
                late_sched.step::<R>(win_late_fn > 0);
                early_sched.step::<R>(win_early_miss > 0);
            }
            if combined_clean {
                clean_streak += 1;
            } else {
                clean_streak = 0;
            }
            win.reset();
            win_late_fn = 0;
            win_early_miss = 0;

            if clean_streak >= cfg.stop_patience {
                let vseed = mix(cfg.seed, SEED_VALIDATION ^ validation_attempts);
                validation_attempts += 1;
                let record = run_validation(
                    |r| {
                        r.encode_into(&mut enc);
                        net.predict(&enc, eps, &mut scratch).0
                    },
                    oracle,
                    kind,
                    cfg.validation_n,
                    vseed,
                    false,
                );
                stats.validation = Some(record);
                if record.misses == 0 {
                    converged = true;
                    break;
                }
                clean_streak = 0;
                if !cfg.symmetric {
                    late_sched.step::<R>(true);
                    early_sched.step::<R>(true);
                }
            }
        }
    }
    stats.train_seconds = started.elapsed().as_secs_f64();
    Ok(TrainOutcome {
        model: net,
        stats,
        converged,
    })
}

#[derive(Clone, Debug)]
pub struct KdopOutcome<R: Real> {
    /// The production primitive: trained offsets hardened back into exact
    /// slab intervals.
    pub hardened: KDop<R>,
    pub smooth: LearnableKDop<R>,
    pub stats: TrainingStats,
    pub converged: bool,
}

/// Optimizes k-DOP slab offsets with the asymmetric loss on point queries,
/// then hardens them: each interval is expanded to cover every positive
/// training sample plus `cfg.kdop_margin`, and clipped against `cap` (a
/// conservative corner-projection fit) when one is supplied, so the result
/// never exceeds it.
pub fn train_kdop<R: Real>(
    mut model: LearnableKDop<R>,
    oracle: &QueryOracle<R>,
    cfg: &TrainConfig,
    cap: Option<&KDop<R>>,
) -> Result<KdopOutcome<R>> {
    if cfg.invert {
        return Err(Error::Invalid(
            "inverted mode is not defined for learnable k-DOPs".into(),
        ));
    }
    let dim = oracle.dim();
    if model.input_dim() != dim {
        return Err(Error::DimMismatch {
            expected: dim,
            got: model.input_dim(),
        });
    }
    let kind = QueryKind::Point;
    let started = Instant::now();
    let mut sched = ScheduleState::new(DimProfile::from_dim(dim)?);
    let mut adam = Adam::new(model.params().len(), cfg.adam);
    let mut grads = vec![R::zero(); model.params().len()];
    let mut scratch = model.make_scratch();
    let eps = R::from_f(cfg.eps);
    let lr = R::from_f(cfg.lr);
    let k = model.n_directions();
    let dirs = model.directions_flat().to_vec();
    let mut extents = vec![(R::infinity(), R::neg_infinity()); k];
    let margin = R::from_f(cfg.kdop_margin);
    let mut stats = TrainingStats::default();
    let mut win = WindowAccum::default();
    let mut clean_streak = 0u32;
    let mut validation_attempts = 0u64;
    let mut converged = false;
    let mut hardened: Option<KDop<R>> = None;

    for iteration in 0..cfg.max_iters {
        let sched_w: LossWeights<R> = if cfg.symmetric {
            LossWeights::symmetric()
        } else {
            sched.weights()
        };
        let lambda = R::from_f(reg_lambda(cfg, stats.windows.len() as u32));
        let extents_ref = &mut extents;
        let bs = loss_batch(
            &model,
            &mut scratch,
            oracle,
            kind,
            cfg.seed,
            iteration,
            cfg.batch,
            &sched_w,
            eps,
            lambda,
            &mut grads,
            |region| {
                let p = region.first();
                for (i, ext) in extents_ref.iter_mut().enumerate() {
                    let proj = vecn::dot(&dirs[i * dim..(i + 1) * dim], p);
                    ext.0 = ext.0.min(proj);
                    ext.1 = ext.1.max(proj);
                }
            },
        );
        adam.step(model.params_mut(), &grads, lr);
        stats.iters.push(IterRecord {
            iteration,
            alpha: sched_w.alpha.to_f(),
            beta: sched_w.beta.to_f(),
            loss: bs.loss,
            fn_count: bs.fn_count,
            fp_count: bs.fp_count,
        });
        win.add(&bs);
        stats.iterations = iteration + 1;

        if (iteration + 1) % cfg.step_every == 0 {
            stats.windows.push(WindowRecord {
                window: stats.windows.len() as u32,
                end_iteration: iteration,
                alpha: sched_w.alpha.to_f(),
                beta: sched_w.beta.to_f(),
                raw_grow: sched.raw().0,
                raw_shrink: sched.raw().1,
                fn_count: win.fn_count,
                fp_count: win.fp_count,
                mean_loss: win.loss_sum / win.iters as f64,
            });
            log_window(stats.windows.last().unwrap());
            let misses = win.fn_count;
            if !cfg.symmetric {
                sched.step::<R>(misses > 0);
            }
            if misses == 0 {
                clean_streak += 1;
            } else {
                clean_streak = 0;
            }
            win.reset();
            // Sharpen the slab sigmoids toward the hard interval test.
            let tau = (model.temperature().to_f() * cfg.kdop_tau_growth).min(cfg.kdop_tau_max);
            model.set_temperature(R::from_f(tau));

            if clean_streak >= cfg.stop_patience {
                if extents.iter().any(|&(lo, hi)| lo > hi) {
                    return Err(Error::EmptyIndicator);
                }
                let candidate = model.harden(&extents, margin, cap)?;
                let vseed = mix(cfg.seed, SEED_VALIDATION ^ validation_attempts);
                validation_attempts += 1;
                let record = run_validation(
                    |r| candidate.test(r),
                    oracle,
                    kind,
                    cfg.validation_n,
                    vseed,
                    false,
                );
                stats.validation = Some(record);
                if record.misses == 0 {
                    hardened = Some(candidate);
                    converged = true;
                    break;
                }
                clean_streak = 0;
                if !cfg.symmetric {
                    sched.step::<R>(true);
                }
            }
        }
    }
    if extents.iter().any(|&(lo, hi)| lo > hi) {
        return Err(Error::EmptyIndicator);
    }
    let hardened = match hardened {
        Some(h) => h,
        None => model.harden(&extents, margin, cap)?,
    };
    stats.train_seconds = started.elapsed().as_secs_f64();
    Ok(KdopOutcome {
        hardened,
        smooth: model,
        stats,
        converged,
    })
}

use crate::geometry::Primitive;

#[cfg(test)]
mod tests {
    use super::*;
    use crate::indicator::{GridIndicator, ProceduralIndicator};
    use crate::nnet::Mlp;
    use std::sync::Arc;

    fn fast_cfg(seed: u64) -> TrainConfig {
        TrainConfig {
            batch: 512,
            step_every: 200,
            max_iters: 40_000,
            validation_n: 100_000,
            seed,
            ..TrainConfig::default()
        }
    }

    fn grid_oracle(g: GridIndicator, s: usize) -> QueryOracle<f64> {
        QueryOracle::new(Arc::new(g), s)
    }

    #[test]
    fn loss_batch_on_empty_indicator_has_no_false_negatives() {
        let oracle = grid_oracle(GridIndicator::zeros(&[8, 8]).unwrap(), 64);
        let model = Mlp::<f64>::for_query(2, QueryKind::Point, 3, 1.0, 0);
        let mut scratch = model.make_scratch();
        let mut grads = vec![0.0; model.params().len()];
        let w = LossWeights::symmetric();
        for iter in 0..5 {
            let bs = loss_batch(
                &model, &mut scratch, &oracle, QueryKind::Point, 7, iter, 256, &w, 1e-5, 0.0,
                &mut grads, |_| {},
            );
            assert_eq!(bs.fn_count, 0);
        }
    }

    #[test]
    fn loss_batch_on_full_indicator_has_no_false_positives() {
        let mut g = GridIndicator::zeros(&[8, 8]).unwrap();
        for c in 0..64 {
            g.set_cell(c, true);
        }
        let oracle = grid_oracle(g, 64);
        let model = Mlp::<f64>::for_query(2, QueryKind::Point, 3, 1.0, 0);
        let mut scratch = model.make_scratch();
        let mut grads = vec![0.0; model.params().len()];
        let w = LossWeights::symmetric();
        let bs = loss_batch(
            &model, &mut scratch, &oracle, QueryKind::Point, 7, 0, 256, &w, 1e-5, 0.0,
            &mut grads, |_| {},
        );
        assert_eq!(bs.fp_count, 0);
    }

    #[test]
    fn loss_batch_is_deterministic_per_seed() {
        let disk = ProceduralIndicator::disk(&[0.5f64, 0.5], 0.3).unwrap();
        let g = GridIndicator::rasterize(&disk, &[16, 16]).unwrap();
        let oracle = grid_oracle(g, 64);
        let model = Mlp::<f64>::for_query(2, QueryKind::Point, 5, 1.0, 0);
        let mut scratch = model.make_scratch();
        let w = LossWeights::new(3.0, 1.0);
        let mut g1 = vec![0.0; model.params().len()];
        let mut g2 = vec![0.0; model.params().len()];
        let a = loss_batch(
            &model, &mut scratch, &oracle, QueryKind::Point, 11, 4, 512, &w, 1e-5, 1e-7,
            &mut g1, |_| {},
        );
        let b = loss_batch(
            &model, &mut scratch, &oracle, QueryKind::Point, 11, 4, 512, &w, 1e-5, 1e-7,
            &mut g2, |_| {},
        );
        assert_eq!(a.loss.to_bits(), b.loss.to_bits());
        assert_eq!(a.fn_count, b.fn_count);
        assert_eq!(g1.iter().map(|v| v.to_bits()).collect::<Vec<_>>(),
                   g2.iter().map(|v| v.to_bits()).collect::<Vec<_>>());
    }

    #[test]
    fn training_a_halfspace_reaches_zero_misses_with_low_fp() {
        // Small net, fast config: the classic smoke test of the pipeline.
        let hs = ProceduralIndicator::halfspace(&[1.0f64, 0.0], 0.5).unwrap();
        let g = GridIndicator::rasterize(&hs, &[32, 32]).unwrap();
        let oracle = grid_oracle(g.clone(), 64);
        let model = Mlp::<f64>::new(&[2, 8, 1], 21, 1.0, None);
        let out = train(model, &oracle, QueryKind::Point, &fast_cfg(13)).unwrap();
        assert!(out.converged, "training did not converge");

        // Held-out check: zero misses, FP under 10%.
        let mut scratch = out.model.make_scratch();
        let mut fn_count = 0u64;
        let mut fp = 0u64;
        let mut neg = 0u64;
        let mut enc = Vec::new();
        for i in 0..100_000u64 {
            let r = uniform_region::<f64>(&mut stream(1717, i), QueryKind::Point, 2);
            let y = oracle.label(&mut stream(1718, i), &r);
            r.encode_into(&mut enc);
            let p = threshold_hit(out.model.forward(&enc, &mut scratch), 1e-5);
            if y && !p {
                fn_count += 1;
            }
            if !y {
                neg += 1;
                if p {
                    fp += 1;
                }
            }
        }
        assert_eq!(fn_count, 0, "held-out false negatives");
        assert!((fp as f64) < 0.10 * neg as f64, "fp rate too high: {fp}/{neg}");
    }

    #[test]
    fn fixed_seed_reproduces_identical_parameters() {
        let disk = ProceduralIndicator::disk(&[0.5f64, 0.5], 0.3).unwrap();
        let g = GridIndicator::rasterize(&disk, &[16, 16]).unwrap();
        let cfg = TrainConfig {
            batch: 256,
            step_every: 100,
            max_iters: 300,
            stop_patience: 2,
            validation_n: 2_000,
            seed: 99,
            ..TrainConfig::default()
        };
        let run = |_: ()| {
            let oracle = grid_oracle(g.clone(), 32);
            let model = Mlp::<f64>::new(&[2, 8, 1], 33, 1.0, None);
            train(model, &oracle, QueryKind::Point, &cfg).unwrap()
        };
        let a = run(());
        let b = run(());
        assert_eq!(a.stats.iterations, b.stats.iterations);
        for (x, y) in a.model.params().iter().zip(b.model.params()) {
            assert_eq!(x.to_bits(), y.to_bits());
        }
    }

    #[test]
    fn schedule_stays_fixed_in_symmetric_mode() {
        let disk = ProceduralIndicator::disk(&[0.5f64, 0.5], 0.3).unwrap();
        let g = GridIndicator::rasterize(&disk, &[16, 16]).unwrap();
        let oracle = grid_oracle(g, 32);
        let cfg = TrainConfig {
            batch: 128,
            step_every: 50,
            max_iters: 500,
            stop_patience: u32::MAX, // never stop early; we only inspect logs
            validation_n: 1000,
            symmetric: true,
            seed: 5,
            ..TrainConfig::default()
        };
        let model = Mlp::<f64>::new(&[2, 8, 1], 6, 1.0, None);
        let out = train(model, &oracle, QueryKind::Point, &cfg).unwrap();
        assert!(!out.converged);
        for r in &out.stats.iters {
            assert_eq!(r.alpha, 1.0);
            assert_eq!(r.beta, 1.0);
        }
    }

    #[test]
    fn kdop_training_recovers_a_halfspace_slab() {
        let hs = ProceduralIndicator::halfspace(&[1.0f64, 0.0], 0.6).unwrap();
        let g = GridIndicator::rasterize(&hs, &[32, 32]).unwrap();
        let oracle = grid_oracle(g.clone(), 64);
        let dirs = crate::geometry::default_directions::<f64>(2, 4).unwrap();
        let model = LearnableKDop::covering_domain(2, dirs, 25.0);
        let cap = crate::geometry::fit_kdop::<f64>(&g, 8).unwrap();
        let cfg = TrainConfig {
            batch: 1024,
            step_every: 250,
            max_iters: 30_000,
            validation_n: 100_000,
            seed: 8,
            ..TrainConfig::default()
        };
        let out = train_kdop(model, &oracle, &cfg, Some(&cap)).unwrap();
        assert!(out.converged);
        // The x-axis slab must cover the occupied band [0, 0.625] (the grid
        // cells through x = 0.6) within a cell of the analytic cutoff.
        let (lo, hi) = out.hardened.interval(0);
        assert!(lo <= 0.0 + 1e-9, "lo = {lo}");
        assert!((hi - 0.625).abs() < 1.0 / 32.0 + 2e-3, "hi = {hi}");
        // And it passes the conservativeness contract on cell centers.
        for cell in g.occupied_cells() {
            let c = g.cell_center::<f64>(&cell);
            assert!(out.hardened.test_point(&c[..2]));
        }
    }
}
