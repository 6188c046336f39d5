//! Hierarchies of trained bounding models over a user-supplied tree of
//! indicators. Each node carries the union indicator of its subtree and
//! gets its own model (schedules reset per node); queries descend only into
//! children whose node model answers positive.
//!
//! Higher levels bound the *indicator*, not the lower-level models, so a
//! pruned query can return 0 where an unpruned OR over leaf models would
//! return a false positive; on oracle-positive regions both agree when all
//! node models are conservative.

use std::sync::Arc;

use super::config::TrainConfig;
use super::trainer::{train, TrainOutcome};
use crate::error::{Error, Result};
use crate::indicator::Indicator;
use crate::nnet::{threshold_hit, FieldNet, Mlp};
use crate::query::{QueryKind, QueryOracle, Region};
use crate::rng::mix;
use crate::scalar::Real;

pub struct IndicatorTree<R: Real> {
    pub indicator: Arc<dyn Indicator<R>>,
    pub children: Vec<IndicatorTree<R>>,
}

impl<R: Real> IndicatorTree<R> {
    pub fn leaf(indicator: Arc<dyn Indicator<R>>) -> Self {
        Self {
            indicator,
            children: Vec::new(),
        }
    }

    pub fn node(indicator: Arc<dyn Indicator<R>>, children: Vec<IndicatorTree<R>>) -> Self {
        Self {
            indicator,
            children,
        }
    }
}

pub struct ModelTree<R: Real> {
    pub model: Mlp<R>,
    pub eps: R,
    pub children: Vec<ModelTree<R>>,
}

impl<R: Real> ModelTree<R> {
    fn node_hit(&self, region: &Region<R>) -> bool {
        let mut scratch = self.model.make_scratch();
        let enc = region.encode();
        threshold_hit(self.model.forward(&enc, &mut scratch), self.eps)
    }

    /// Pruned descent: a node answering 0 cuts off its whole subtree.
    pub fn test(&self, region: &Region<R>) -> bool {
        if !self.node_hit(region) {
            return false;
        }
        if self.children.is_empty() {
            return true;
        }
        self.children.iter().any(|c| c.test(region))
    }

    /// Unpruned reference: OR over the leaf models only.
    pub fn flat_test(&self, region: &Region<R>) -> bool {
        if self.children.is_empty() {
            return self.node_hit(region);
        }
        self.children.iter().any(|c| c.flat_test(region))
    }

    pub fn n_nodes(&self) -> usize {
        1 + self.children.iter().map(|c| c.n_nodes()).sum::<usize>()
    }
}

/// Trains one model per tree node on that node's indicator. Node training
/// failures abort the build (a non-convergent node cannot certify its
/// subtree).
pub fn train_hierarchy<R: Real>(
    tree: &IndicatorTree<R>,
    kind: QueryKind,
    cfg: &TrainConfig,
    make_model: &mut dyn FnMut(u64) -> Mlp<R>,
) -> Result<ModelTree<R>> {
    let mut next_id = 0u64;
    train_node(tree, kind, cfg, make_model, &mut next_id)
}

fn train_node<R: Real>(
    tree: &IndicatorTree<R>,
    kind: QueryKind,
    cfg: &TrainConfig,
    make_model: &mut dyn FnMut(u64) -> Mlp<R>,
    next_id: &mut u64,
) -> Result<ModelTree<R>> {
    let id = *next_id;
    *next_id += 1;
    let oracle = QueryOracle::new(tree.indicator.clone(), cfg.train_samples_per_region);
    let node_cfg = TrainConfig {
        seed: mix(cfg.seed, id),
        ..cfg.clone()
    };
    let TrainOutcome {
        model, converged, ..
    } = train(make_model(id), &oracle, kind, &node_cfg)?;
    if !converged {
        return Err(Error::NotConverged {
            node: Some(id.to_string()),
        });
    }
    let mut children = Vec::with_capacity(tree.children.len());
    for child in &tree.children {
        children.push(train_node(child, kind, cfg, make_model, next_id)?);
    }
    Ok(ModelTree {
        model,
        eps: R::from_f(cfg.eps),
        children,
    })
}
