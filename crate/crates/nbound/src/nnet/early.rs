//! Early-exit bounding net: a one-layer inverse-conservative head that
//! certifies "certainly not hit" cheaply, in front of the full network.
//!
//! Both heads read the same region encoding. The early head approximates the
//! *negated* query (1 where the region certainly misses); when it fires, the
//! full network is skipped. Its false "miss" claims are the combined
//! predictor's false negatives, so training drives them to zero with the
//! same escalating asymmetry as the main loss, weights flipped.

use super::mlp::{Mlp, MlpScratch};
use super::{threshold_hit, FieldNet};
use crate::query::QueryKind;
use crate::rng::mix;
use crate::scalar::Real;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Exit {
    Early,
    Late,
}

#[derive(Clone, Debug, PartialEq)]
pub struct EarlyExitNet<R: Real> {
    /// Single affine layer + sigmoid on the region encoding.
    early: Mlp<R>,
    /// The full bounding MLP.
    late: Mlp<R>,
}

#[derive(Clone, Debug)]
pub struct EarlyScratch<R: Real> {
    pub early: MlpScratch<R>,
    pub late: MlpScratch<R>,
}

impl<R: Real> EarlyExitNet<R> {
    pub fn new(early: Mlp<R>, late: Mlp<R>) -> Self {
        assert_eq!(early.input_dim(), late.input_dim());
        assert_eq!(early.n_layers(), 1, "early head is a single layer");
        Self { early, late }
    }

    pub fn for_query(dim: usize, kind: QueryKind, seed: u64, omega: R, pe_depth: usize) -> Self {
        let late = Mlp::for_query(dim, kind, mix(seed, 0), omega, pe_depth);
        let raw_in = kind.encoded_len(dim);
        let early = Mlp::new(&[raw_in, 1], mix(seed, 1), omega, None);
        Self { early, late }
    }

    pub fn early(&self) -> &Mlp<R> {
        &self.early
    }

    pub fn late(&self) -> &Mlp<R> {
        &self.late
    }

    pub fn early_mut(&mut self) -> &mut Mlp<R> {
        &mut self.early
    }

    pub fn late_mut(&mut self) -> &mut Mlp<R> {
        &mut self.late
    }

    pub fn input_dim(&self) -> usize {
        self.early.input_dim()
    }

    pub fn make_scratch(&self) -> EarlyScratch<R> {
        EarlyScratch {
            early: self.early.make_scratch(),
            late: self.late.make_scratch(),
        }
    }

    /// Both head outputs (early: miss confidence, late: hit estimate).
    pub fn forward_both(&self, x: &[R], s: &mut EarlyScratch<R>) -> (R, R) {
        let e = self.early.forward(x, &mut s.early);
        let l = self.late.forward(x, &mut s.late);
        (e, l)
    }

    /// Early head first: if it confidently claims "no hit" (its output
    /// shifted *against* claiming misses by `eps`), return negative without
    /// touching the late path. Otherwise the late path decides.
    pub fn predict(&self, x: &[R], eps: R, s: &mut EarlyScratch<R>) -> (bool, Exit) {
        let e = self.early.forward(x, &mut s.early);
        if threshold_hit(e, -eps) {
            return (false, Exit::Early);
        }
        let l = self.late.forward(x, &mut s.late);
        (threshold_hit(l, eps), Exit::Late)
    }

    /// Multiply-accumulate cost of the path taken.
    pub fn cost_units(&self, exit: Exit) -> u64 {
        match exit {
            Exit::Early => self.early.cost_units(),
            Exit::Late => self.early.cost_units() + self.late.cost_units(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn saturated_early(bias: f64) -> EarlyExitNet<f64> {
        let mut net = EarlyExitNet::for_query(2, QueryKind::Point, 3, 1.0, 0);
        let n = net.early.param_count();
        for p in net.early_mut().params_mut().iter_mut() {
            *p = 0.0;
        }
        net.early_mut().params_mut()[n - 1] = bias;
        net
    }

    #[test]
    fn saturated_positive_early_head_skips_the_late_path() {
        let net = saturated_early(40.0); // sigmoid ~ 1: "certainly no hit"
        let mut s = net.make_scratch();
        let (hit, exit) = net.predict(&[0.4, 0.6], 1e-5, &mut s);
        assert!(!hit);
        assert_eq!(exit, Exit::Early);
    }

    #[test]
    fn saturated_negative_early_head_defers_to_the_late_path() {
        let net = saturated_early(-40.0); // sigmoid ~ 0: cannot certify a miss
        let mut s = net.make_scratch();
        let (_, exit) = net.predict(&[0.4, 0.6], 1e-5, &mut s);
        assert_eq!(exit, Exit::Late);
    }

    #[test]
    fn early_exit_is_cheaper_than_the_full_path() {
        let net = EarlyExitNet::<f64>::for_query(2, QueryKind::Point, 3, 1.0, 0);
        assert!(net.cost_units(Exit::Early) < net.cost_units(Exit::Late));
        // The late path costs one extra thin layer over the plain net.
        assert_eq!(
            net.cost_units(Exit::Late),
            net.late.cost_units() + net.early.cost_units()
        );
    }

    #[test]
    fn heads_share_the_region_encoding_width() {
        for kind in QueryKind::ALL {
            let net = EarlyExitNet::<f64>::for_query(3, kind, 9, 1.0, 0);
            assert_eq!(net.input_dim(), kind.encoded_len(3));
        }
    }
}
