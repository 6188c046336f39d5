//! Time-varying 4D indicator built by rotating a 3D grid about the domain
//! center, one full turn over the step sequence.

use super::{GridIndicator, Indicator};
use crate::error::{Error, Result};
use crate::scalar::Real;

#[derive(Clone, Debug)]
pub struct AnimatedIndicator {
    base: GridIndicator,
    steps: usize,
    /// Rotation axis index; the other two spatial axes span the rotation plane.
    axis: usize,
}

impl AnimatedIndicator {
    pub fn new(base: GridIndicator, steps: usize, axis: usize) -> Result<Self> {
        if base.dim() != 3 {
            return Err(Error::DimMismatch {
                expected: 3,
                got: base.dim(),
            });
        }
        if steps == 0 {
            return Err(Error::Invalid("rotation sequence needs steps >= 1".into()));
        }
        if axis > 2 {
            return Err(Error::Invalid("rotation axis must be 0, 1 or 2".into()));
        }
        Ok(Self { base, steps, axis })
    }

    pub fn base(&self) -> &GridIndicator {
        &self.base
    }

    pub fn steps(&self) -> usize {
        self.steps
    }
}

/// Rotation sequence around the x-axis, matching the 4D evaluation data.
pub fn make_rotation_sequence(base: GridIndicator, steps: usize) -> Result<AnimatedIndicator> {
    AnimatedIndicator::new(base, steps, 0)
}

impl<R: Real> Indicator<R> for AnimatedIndicator {
    fn dim(&self) -> usize {
        4
    }

    /// Samples the base grid at the query point rotated backwards by the
    /// quantized time step's angle (nearest-neighbor resampling via the grid
    /// lookup). Rotated samples that leave the grid are free space.
    fn eval(&self, x: &[R]) -> bool {
        assert_eq!(x.len(), 4, "point dimension mismatch");
        let t = x[3].to_f();
        if !(0.0..=1.0).contains(&t) {
            return false;
        }
        let step = ((t * self.steps as f64).floor() as usize).min(self.steps - 1);
        let angle = -std::f64::consts::TAU * step as f64 / self.steps as f64;
        let (sin, cos) = angle.sin_cos();

        let (u, v) = match self.axis {
            0 => (1, 2),
            1 => (0, 2),
            _ => (0, 1),
        };
        let mut p = [x[0].to_f(), x[1].to_f(), x[2].to_f()];
        let (du, dv) = (p[u] - 0.5, p[v] - 0.5);
        p[u] = 0.5 + cos * du - sin * dv;
        p[v] = 0.5 + sin * du + cos * dv;

        let q = [R::from_f(p[0]), R::from_f(p[1]), R::from_f(p[2])];
        self.base.eval(&q)
    }
}
