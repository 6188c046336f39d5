//! Exact, arbitrarily-sampleable n-dimensional occupancy indicators over the
//! normalized domain `[0,1]^n`.
//!
//! An indicator answers "is this point inside or on the object" with a hard
//! 0/1; points outside the domain are defined to be free space. Indicators
//! are immutable after construction and safe to evaluate concurrently.

mod animated;
mod grid;
mod procedural;

pub use animated::{make_rotation_sequence, AnimatedIndicator};
pub use grid::GridIndicator;
pub use procedural::ProceduralIndicator;

use crate::scalar::Real;

/// Binary occupancy oracle over `[0,1]^dim`.
///
/// `eval` must be pure and deterministic. Passing a point of the wrong
/// dimension is a programmer error and panics.
pub trait Indicator<R: Real>: Send + Sync {
    fn dim(&self) -> usize;

    /// 1 inside and on the surface, 0 elsewhere (including outside `[0,1]^n`).
    fn eval(&self, x: &[R]) -> bool;
}

impl<R: Real, T: Indicator<R> + ?Sized> Indicator<R> for &T {
    fn dim(&self) -> usize {
        (**self).dim()
    }
    fn eval(&self, x: &[R]) -> bool {
        (**self).eval(x)
    }
}

impl<R: Real, T: Indicator<R> + ?Sized> Indicator<R> for std::sync::Arc<T> {
    fn dim(&self) -> usize {
        (**self).dim()
    }
    fn eval(&self, x: &[R]) -> bool {
        (**self).eval(x)
    }
}
