//! k-DOP slab offsets as a differentiable model: the hard interval test is
//! relaxed into a product of temperature-scaled sigmoids so the offsets can
//! be found by gradient descent, then hardened back into a standard k-DOP.

use super::FieldNet;
use crate::error::Result;
use crate::geometry::KDop;
use crate::scalar::Real;
use crate::vecn;

#[derive(Clone, Debug, PartialEq)]
pub struct LearnableKDop<R: Real> {
    dim: usize,
    /// Fixed unit directions, `k x dim` row-major.
    dirs: Vec<R>,
    /// Learnable `(lo, hi)` pairs, interleaved: `[lo_0, hi_0, lo_1, ...]`.
    offsets: Vec<R>,
    /// Sigmoid sharpness; raised during training to approach the hard test.
    temperature: R,
}

#[derive(Clone, Debug)]
pub struct KdopScratch<R: Real> {
    /// Per slab: (projection, sigmoid at lo side, sigmoid at hi side).
    slabs: Vec<(R, R, R)>,
    output: R,
}

impl<R: Real> LearnableKDop<R> {
    /// Starts with every slab covering the whole domain's projection range
    /// plus a pad, so the initial model predicts "hit" everywhere (sigmoid
    /// margins are only 0.5 right at a slab face) and training shrinks.
    pub fn covering_domain(dim: usize, dirs: Vec<R>, temperature: R) -> Self {
        assert!(dirs.len() % dim == 0 && !dirs.is_empty());
        let k = dirs.len() / dim;
        let pad = R::from_f(0.15);
        let mut offsets = Vec::with_capacity(2 * k);
        for i in 0..k {
            let d = &dirs[i * dim..(i + 1) * dim];
            // Support interval of the unit cube along d.
            let mut lo = R::zero();
            let mut hi = R::zero();
            for &c in d {
                if c > R::zero() {
                    hi = hi + c;
                } else {
                    lo = lo + c;
                }
            }
            offsets.push(lo - pad);
            offsets.push(hi + pad);
        }
        Self {
            dim,
            dirs,
            offsets,
            temperature,
        }
    }

    pub fn from_parts(dim: usize, dirs: Vec<R>, offsets: Vec<R>, temperature: R) -> Self {
        assert_eq!(dirs.len() / dim * 2, offsets.len());
        Self {
            dim,
            dirs,
            offsets,
            temperature,
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn n_directions(&self) -> usize {
        self.dirs.len() / self.dim
    }

    pub fn directions_flat(&self) -> &[R] {
        &self.dirs
    }

    pub fn offsets(&self) -> &[R] {
        &self.offsets
    }

    pub fn temperature(&self) -> R {
        self.temperature
    }

    pub fn set_temperature(&mut self, t: R) {
        self.temperature = t;
    }

    pub fn direction(&self, i: usize) -> &[R] {
        &self.dirs[i * self.dim..(i + 1) * self.dim]
    }

    /// Hardens the trained offsets into a standard k-DOP:
    /// each slab is expanded to cover the positive-sample projection extents
    /// (plus an outward `margin`), and optionally intersected with a known
    /// conservative bound (the corner-projection fit) so it never exceeds it.
    pub fn harden(
        &self,
        sample_extents: &[(R, R)],
        margin: R,
        cap: Option<&KDop<R>>,
    ) -> Result<KDop<R>> {
        let k = self.n_directions();
        assert_eq!(sample_extents.len(), k);
        let mut intervals = Vec::with_capacity(k);
        for i in 0..k {
            let (trained_lo, trained_hi) = (self.offsets[2 * i], self.offsets[2 * i + 1]);
            let (slo, shi) = sample_extents[i];
            let mut lo = trained_lo.min(slo - margin);
            let mut hi = trained_hi.max(shi + margin);
            if let Some(cap) = cap {
                let (clo, chi) = cap.interval(i);
                lo = lo.max(clo);
                hi = hi.min(chi);
                if lo > hi {
                    lo = clo;
                    hi = chi;
                }
            }
            intervals.push((lo, hi));
        }
        KDop::new(self.dim, self.dirs.clone(), intervals)
    }
}

impl<R: Real> FieldNet<R> for LearnableKDop<R> {
    type Scratch = KdopScratch<R>;

    fn make_scratch(&self) -> KdopScratch<R> {
        KdopScratch {
            slabs: Vec::with_capacity(self.n_directions()),
            output: R::zero(),
        }
    }

    fn input_dim(&self) -> usize {
        self.dim
    }

    fn params(&self) -> &[R] {
        &self.offsets
    }

    fn params_mut(&mut self) -> &mut [R] {
        &mut self.offsets
    }

    /// Product of per-slab margins: `prod_i s(t(p_i - lo_i)) s(t(hi_i - p_i))`.
    fn forward(&self, x: &[R], scratch: &mut KdopScratch<R>) -> R {
        assert_eq!(x.len(), self.dim, "input width mismatch");
        assert!(x.iter().all(|v| v.is_finite()), "non-finite model input");
        let t = self.temperature;
        scratch.slabs.clear();
        let mut y = R::one();
        for i in 0..self.n_directions() {
            let p = vecn::dot(self.direction(i), x);
            let s_lo = super::mlp::sigmoid(t * (p - self.offsets[2 * i]));
            let s_hi = super::mlp::sigmoid(t * (self.offsets[2 * i + 1] - p));
            scratch.slabs.push((p, s_lo, s_hi));
            y = y * s_lo * s_hi;
        }
        scratch.output = y;
        y
    }

    fn backward(&self, scratch: &mut KdopScratch<R>, upstream: R, grads: &mut [R]) {
        let t = self.temperature;
        let y = scratch.output;
        for (i, &(_, s_lo, s_hi)) in scratch.slabs.iter().enumerate() {
            // d y / d lo_i = y (1 - s_lo) (-t);  d y / d hi_i = y (1 - s_hi) t
            grads[2 * i] = grads[2 * i] - upstream * y * (R::one() - s_lo) * t;
            grads[2 * i + 1] = grads[2 * i + 1] + upstream * y * (R::one() - s_hi) * t;
        }
    }

    fn cost_units(&self) -> u64 {
        (self.n_directions() * (self.dim + 4)) as u64
    }
}
