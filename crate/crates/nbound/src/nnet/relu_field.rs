//! Trainable value grid with clamped multilinear interpolation: piecewise-
//! multilinear occupancy that trains in seconds because a lookup touches
//! only `2^d` vertices.

use super::FieldNet;
use crate::scalar::Real;

#[derive(Clone, Debug, PartialEq)]
pub struct ReluField<R: Real> {
    /// Vertices per axis (axis 0 slowest in the flat value buffer).
    resolution: Vec<usize>,
    values: Vec<R>,
}

#[derive(Clone, Debug)]
pub struct FieldScratch<R: Real> {
    /// Flat index and interpolation weight of each touched vertex.
    corners: Vec<(usize, R)>,
    /// Pre-clamp interpolated value.
    pre: R,
}

impl<R: Real> ReluField<R> {
    /// Neutral init: every vertex at 0.5, so everything starts predicted
    /// occupied (conservative) and no clamp region is dead at the outset.
    pub fn new(resolution: &[usize]) -> Self {
        assert!(!resolution.is_empty() && resolution.len() <= 8);
        assert!(resolution.iter().all(|&r| r >= 2), "need at least 2 vertices per axis");
        let n: usize = resolution.iter().product();
        Self {
            resolution: resolution.to_vec(),
            values: vec![R::from_f(0.5); n],
        }
    }

    pub fn resolution(&self) -> &[usize] {
        &self.resolution
    }

    pub fn values(&self) -> &[R] {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut [R] {
        &mut self.values
    }

    pub fn from_values(resolution: &[usize], values: Vec<R>) -> Self {
        let n: usize = resolution.iter().product();
        assert_eq!(values.len(), n);
        Self {
            resolution: resolution.to_vec(),
            values,
        }
    }

    fn flat_stride(&self) -> Vec<usize> {
        let d = self.resolution.len();
        let mut stride = vec![1usize; d];
        for a in (0..d.saturating_sub(1)).rev() {
            stride[a] = stride[a + 1] * self.resolution[a + 1];
        }
        stride
    }
}

impl<R: Real> FieldNet<R> for ReluField<R> {
    type Scratch = FieldScratch<R>;

    fn make_scratch(&self) -> FieldScratch<R> {
        FieldScratch {
            corners: Vec::with_capacity(1 << self.resolution.len()),
            pre: R::zero(),
        }
    }

    fn input_dim(&self) -> usize {
        self.resolution.len()
    }

    fn params(&self) -> &[R] {
        &self.values
    }

    fn params_mut(&mut self) -> &mut [R] {
        &mut self.values
    }

    /// Multilinear interpolation of the vertex values at `x` (clamped to the
    /// unit cube), then clamped to `[0,1]`. At a vertex this returns exactly
    /// the clamped vertex value.
    fn forward(&self, x: &[R], scratch: &mut FieldScratch<R>) -> R {
        let d = self.resolution.len();
        assert_eq!(x.len(), d, "input width mismatch");
        assert!(x.iter().all(|v| v.is_finite()), "non-finite model input");
        let stride = self.flat_stride();
        let mut base = [0usize; 8];
        let mut frac = [R::zero(); 8];
        for a in 0..d {
            let cells = (self.resolution[a] - 1) as f64;
            let u = (x[a].to_f().clamp(0.0, 1.0)) * cells;
            let i = (u.floor() as usize).min(self.resolution[a] - 2);
            base[a] = i;
            frac[a] = R::from_f(u - i as f64);
        }
        scratch.corners.clear();
        let mut pre = R::zero();
        for mask in 0..(1usize << d) {
            let mut idx = 0usize;
            let mut w = R::one();
            for a in 0..d {
                if mask >> a & 1 == 1 {
                    idx += (base[a] + 1) * stride[a];
                    w = w * frac[a];
                } else {
                    idx += base[a] * stride[a];
                    w = w * (R::one() - frac[a]);
                }
            }
            scratch.corners.push((idx, w));
            pre = pre + w * self.values[idx];
        }
        scratch.pre = pre;
        pre.max(R::zero()).min(R::one())
    }

    /// Clamp subgradient: zero outside the open interval (0, 1).
    fn backward(&self, scratch: &mut FieldScratch<R>, upstream: R, grads: &mut [R]) {
        if scratch.pre <= R::zero() || scratch.pre >= R::one() {
            return;
        }
        for &(idx, w) in &scratch.corners {
            grads[idx] = grads[idx] + upstream * w;
        }
    }

    fn cost_units(&self) -> u64 {
        1 << self.resolution.len()
    }
}
