//! Tiny differentiable models over encoded query regions: sine-activated
//! MLPs with a sigmoid head, an early-exit variant, a clamped-interpolation
//! value grid, and learnable k-DOP offsets. All expose flat parameter
//! buffers, reverse-mode gradients and deterministic initialization.

mod early;
mod encoding;
pub mod gradcheck;
mod learnable_kdop;
mod mlp;
mod relu_field;

pub use early::{EarlyExitNet, EarlyScratch, Exit};
pub use encoding::PositionalEncoding;
pub use learnable_kdop::{KdopScratch, LearnableKDop};
pub use mlp::{hidden_width, Mlp, MlpScratch};
pub use relu_field::{FieldScratch, ReluField};

use crate::scalar::Real;

/// Classification threshold with the conservativeness shift: positive iff
/// `output + eps >= 1/2`, evaluated as `output >= 1/2 - eps` so the decimal
/// threshold examples land exactly at float granularity. A negative `eps`
/// shifts the other way (used by inverted-mode models).
#[inline]
pub fn threshold_hit<R: Real>(output: R, eps: R) -> bool {
    output >= R::from_f(0.5) - eps
}

/// A differentiable scalar-output model over flat region encodings.
///
/// `forward` caches everything `backward` needs in the scratch; `backward`
/// accumulates `upstream * d(output)/d(params)` into `grads`, which must
/// have `params().len()` entries.
pub trait FieldNet<R: Real>: Send + Sync {
    type Scratch: Send;

    fn make_scratch(&self) -> Self::Scratch;

    /// Length of the flat region encoding this model consumes.
    fn input_dim(&self) -> usize;

    fn params(&self) -> &[R];
    fn params_mut(&mut self) -> &mut [R];

    /// Occupancy estimate in `[0,1]`; inputs must be finite.
    fn forward(&self, x: &[R], scratch: &mut Self::Scratch) -> R;

    fn backward(&self, scratch: &mut Self::Scratch, upstream: R, grads: &mut [R]);

    /// Accumulates `scale * d/d(params)` of the weighted binary
    /// cross-entropy `-[alpha y ln(out) + beta (1-y) ln(1-out)]` at the
    /// cached forward pass whose output was `yhat`.
    ///
    /// The default chains through the clamped probability; sigmoid-headed
    /// models override it with the fused logit form, which keeps a useful
    /// gradient when the output saturates.
    fn backward_bce(
        &self,
        scratch: &mut Self::Scratch,
        yhat: R,
        y: bool,
        alpha: R,
        beta: R,
        scale: R,
        grads: &mut [R],
    ) {
        let clamp = R::from_f(1e-7);
        let yc = yhat.max(clamp).min(R::one() - clamp);
        let g = if y {
            -(alpha / yc)
        } else {
            beta / (R::one() - yc)
        };
        self.backward(scratch, g * scale, grads);
    }

    /// Multiply-accumulate count of one forward pass, the unit in which
    /// early-exit savings are measured.
    fn cost_units(&self) -> u64;
}
