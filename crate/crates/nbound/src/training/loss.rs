//! Asymmetrically weighted binary cross-entropy.
//!
//! The conservative training objective prices a missed intersection (false
//! negative) at `alpha` and a spurious one (false positive) at `beta`; the
//! surrogate below keeps gradients smooth while the schedule drives
//! `alpha/beta` toward infinity, which is what eventually forces zero
//! misses.

use crate::scalar::Real;

/// Clamp bound keeping `ln` finite at saturated predictions.
pub const PROB_CLAMP: f64 = 1e-7;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LossWeights<R: Real> {
    /// Cost of a false negative (applied to the `y = 1` term).
    pub alpha: R,
    /// Cost of a false positive (applied to the `y = 0` term).
    pub beta: R,
}

impl<R: Real> LossWeights<R> {
    pub fn new(alpha: R, beta: R) -> Self {
        assert!(
            alpha > R::zero() && beta > R::zero() && alpha.is_finite() && beta.is_finite(),
            "loss weights must be finite and positive"
        );
        Self { alpha, beta }
    }

    pub fn symmetric() -> Self {
        Self::new(R::one(), R::one())
    }

    /// Swapped roles, used by inverted (zero-false-positive) training and by
    /// the early head, whose conservative direction is reversed.
    pub fn flipped(&self) -> Self {
        Self {
            alpha: self.beta,
            beta: self.alpha,
        }
    }

    pub fn ratio(&self) -> f64 {
        (self.alpha / self.beta).to_f()
    }
}

#[inline]
pub fn clamp_prob<R: Real>(yhat: R) -> R {
    yhat.max(R::from_f(PROB_CLAMP)).min(R::from_f(1.0 - PROB_CLAMP))
}

/// `-[alpha y ln(yhat) + beta (1-y) ln(1-yhat)]` with `yhat` clamped away
/// from 0 and 1.
#[inline]
pub fn weighted_bce<R: Real>(yhat: R, y: bool, w: &LossWeights<R>) -> R {
    let yc = clamp_prob(yhat);
    if y {
        -(w.alpha * yc.ln())
    } else {
        -(w.beta * (R::one() - yc).ln())
    }
}

/// `d weighted_bce / d yhat`, evaluated at the clamped prediction.
#[inline]
pub fn weighted_bce_grad<R: Real>(yhat: R, y: bool, w: &LossWeights<R>) -> R {
    let yc = clamp_prob(yhat);
    if y {
        -(w.alpha / yc)
    } else {
        w.beta / (R::one() - yc)
    }
}

/// `d weighted_bce / d logit` for sigmoid-headed models, fused so saturated
/// outputs keep a useful gradient.
#[inline]
pub fn weighted_bce_logit_grad<R: Real>(yhat: R, y: bool, w: &LossWeights<R>) -> R {
    if y {
        -(w.alpha * (R::one() - yhat))
    } else {
        w.beta * yhat
    }
}
