//! Multilayer perceptron with sinusoidal hidden activations and a sigmoid
//! output, optionally behind a positional encoding.
//!
//! Parameters live in one flat buffer (per layer: row-major weights, then
//! biases) so the optimizer, serializer and gradient checker all see the
//! same layout.

use rand::Rng;

use super::{FieldNet, PositionalEncoding};
use crate::query::QueryKind;
use crate::rng::stream;
use crate::scalar::Real;

/// Hidden width used for each indicator dimension (two hidden layers each).
pub fn hidden_width(dim: usize) -> usize {
    match dim {
        2 => 25,
        3 => 50,
        4 => 75,
        _ => 25 * (dim.max(2) - 1),
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Mlp<R: Real> {
    /// Layer widths, input first, output (always 1) last.
    dims: Vec<usize>,
    params: Vec<R>,
    /// Sine activation frequency for hidden layers.
    omega: R,
    encoding: Option<PositionalEncoding>,
}

#[derive(Clone, Debug)]
pub struct MlpScratch<R: Real> {
    encoded: Vec<R>,
    preacts: Vec<Vec<R>>,
    acts: Vec<Vec<R>>,
    delta: Vec<R>,
    delta_prev: Vec<R>,
}

impl<R: Real> Mlp<R> {
    /// Random init: weights and biases uniform in `±1/sqrt(fan_in)` drawn
    /// from a ChaCha stream of `seed`, layer by layer.
    pub fn new(dims: &[usize], seed: u64, omega: R, encoding: Option<PositionalEncoding>) -> Self {
        let mut net = Self::zeroed(dims, omega, encoding);
        let mut rng = stream(seed, 0);
        for l in 0..net.n_layers() {
            let fan_in = net.dims[l];
            let bound = (fan_in as f64).sqrt().recip();
            let (w, b) = net.layer_ranges(l);
            for i in w.chain(b) {
                net.params[i] = R::from_f(rng.gen_range(-bound..bound));
            }
        }
        net
    }

    /// All-zero parameters: outputs exactly 0.5 everywhere.
    pub fn zeroed(dims: &[usize], omega: R, encoding: Option<PositionalEncoding>) -> Self {
        assert!(dims.len() >= 2, "need at least input and output widths");
        assert_eq!(*dims.last().unwrap(), 1, "output layer must be scalar");
        if let Some(pe) = &encoding {
            assert_eq!(dims[0] % (1 + pe.depth()), 0, "encoded width mismatch");
        }
        let n_params: usize = dims.windows(2).map(|w| (w[0] + 1) * w[1]).sum();
        Self {
            dims: dims.to_vec(),
            params: vec![R::zero(); n_params],
            omega,
            encoding,
        }
    }

    /// The architecture used for the evaluation tables: input `n` (doubled
    /// for extended queries), two sine hidden layers of [`hidden_width`],
    /// sigmoid scalar output.
    pub fn for_query(dim: usize, kind: QueryKind, seed: u64, omega: R, pe_depth: usize) -> Self {
        let raw_in = kind.encoded_len(dim);
        let w = hidden_width(dim);
        let (encoding, d0) = if pe_depth > 0 {
            let pe = PositionalEncoding::new(pe_depth);
            (Some(pe), pe.encoded_len(raw_in))
        } else {
            (None, raw_in)
        };
        Self::new(&[d0, w, w, 1], seed, omega, encoding)
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn omega(&self) -> R {
        self.omega
    }

    pub fn encoding(&self) -> Option<&PositionalEncoding> {
        self.encoding.as_ref()
    }

    pub fn n_layers(&self) -> usize {
        self.dims.len() - 1
    }

    pub fn param_count(&self) -> usize {
        self.params.len()
    }

    /// (weight index range, bias index range) of layer `l`.
    fn layer_ranges(&self, l: usize) -> (std::ops::Range<usize>, std::ops::Range<usize>) {
        let mut off = 0;
        for k in 0..l {
            off += (self.dims[k] + 1) * self.dims[k + 1];
        }
        let n_w = self.dims[l] * self.dims[l + 1];
        let n_b = self.dims[l + 1];
        (off..off + n_w, off + n_w..off + n_w + n_b)
    }

    /// Logit (pre-sigmoid output) of the cached forward pass.
    pub fn cached_logit(&self, scratch: &MlpScratch<R>) -> R {
        scratch.preacts[self.n_layers() - 1][0]
    }

    /// Backward pass seeded at the output logit instead of the sigmoid
    /// output, fusing the cross-entropy gradient without saturation.
    pub fn backward_from_logit(&self, scratch: &mut MlpScratch<R>, dloss_dlogit: R, grads: &mut [R]) {
        self.backprop(scratch, dloss_dlogit, grads);
    }

    /// Shared backprop driven by the output-layer delta.
    fn backprop(&self, scratch: &mut MlpScratch<R>, out_delta: R, grads: &mut [R]) {
        assert_eq!(grads.len(), self.params.len());
        let n_layers = self.n_layers();
        scratch.delta.clear();
        scratch.delta.push(out_delta);
        for l in (0..n_layers).rev() {
            let (w_range, b_range) = self.layer_ranges(l);
            let input: &[R] = if l == 0 {
                &scratch.encoded
            } else {
                &scratch.acts[l - 1]
            };
            let (n_in, n_out) = (self.dims[l], self.dims[l + 1]);
            let w = &self.params[w_range.clone()];
            for j in 0..n_out {
                let dj = scratch.delta[j];
                let row = &mut grads[w_range.start + j * n_in..w_range.start + (j + 1) * n_in];
                for i in 0..n_in {
                    row[i] = row[i] + dj * input[i];
                }
                grads[b_range.start + j] = grads[b_range.start + j] + dj;
            }
            if l > 0 {
                // delta_prev = (W^T delta) .* omega cos(omega z_{l-1})
                let z_prev = &scratch.preacts[l - 1];
                scratch.delta_prev.clear();
                scratch.delta_prev.resize(n_in, R::zero());
                for j in 0..n_out {
                    let dj = scratch.delta[j];
                    let row = &w[j * n_in..(j + 1) * n_in];
                    for i in 0..n_in {
                        scratch.delta_prev[i] = scratch.delta_prev[i] + row[i] * dj;
                    }
                }
                for i in 0..n_in {
                    scratch.delta_prev[i] =
                        scratch.delta_prev[i] * self.omega * (self.omega * z_prev[i]).cos();
                }
                std::mem::swap(&mut scratch.delta, &mut scratch.delta_prev);
            }
        }
    }
}

impl<R: Real> FieldNet<R> for Mlp<R> {
    type Scratch = MlpScratch<R>;

    fn make_scratch(&self) -> MlpScratch<R> {
        MlpScratch {
            encoded: Vec::with_capacity(self.dims[0]),
            preacts: self.dims[1..].iter().map(|&d| vec![R::zero(); d]).collect(),
            acts: self.dims[1..].iter().map(|&d| vec![R::zero(); d]).collect(),
            delta: Vec::new(),
            delta_prev: Vec::new(),
        }
    }

    fn input_dim(&self) -> usize {
        match &self.encoding {
            Some(pe) => self.dims[0] / (1 + pe.depth()),
            None => self.dims[0],
        }
    }

    fn params(&self) -> &[R] {
        &self.params
    }

    fn params_mut(&mut self) -> &mut [R] {
        &mut self.params
    }

    fn forward(&self, x: &[R], scratch: &mut MlpScratch<R>) -> R {
        assert_eq!(x.len(), self.input_dim(), "input width mismatch");
        assert!(x.iter().all(|v| v.is_finite()), "non-finite model input");
        match &self.encoding {
            Some(pe) => pe.encode(x, &mut scratch.encoded),
            None => {
                scratch.encoded.clear();
                scratch.encoded.extend_from_slice(x);
            }
        }
        let n_layers = self.n_layers();
        for l in 0..n_layers {
            let (w_range, b_range) = self.layer_ranges(l);
            let (n_in, n_out) = (self.dims[l], self.dims[l + 1]);
            let w = &self.params[w_range];
            let b = &self.params[b_range];
            let (done, todo) = scratch.acts.split_at_mut(l);
            let input: &[R] = if l == 0 {
                &scratch.encoded
            } else {
                &done[l - 1]
            };
            let z = &mut scratch.preacts[l];
            let a = &mut todo[0];
            for j in 0..n_out {
                let row = &w[j * n_in..(j + 1) * n_in];
                let mut acc = b[j];
                for i in 0..n_in {
                    acc = acc + row[i] * input[i];
                }
                z[j] = acc;
                a[j] = if l + 1 == n_layers {
                    sigmoid(acc)
                } else {
                    (self.omega * acc).sin()
                };
            }
        }
        scratch.acts[n_layers - 1][0]
    }

    fn backward(&self, scratch: &mut MlpScratch<R>, upstream: R, grads: &mut [R]) {
        let out = scratch.acts[self.n_layers() - 1][0];
        self.backprop(scratch, upstream * out * (R::one() - out), grads);
    }

    fn backward_bce(
        &self,
        scratch: &mut MlpScratch<R>,
        yhat: R,
        y: bool,
        alpha: R,
        beta: R,
        scale: R,
        grads: &mut [R],
    ) {
        // Fused through the sigmoid: d loss / d logit.
        let dz = if y {
            -(alpha * (R::one() - yhat))
        } else {
            beta * yhat
        };
        self.backprop(scratch, dz * scale, grads);
    }

    fn cost_units(&self) -> u64 {
        self.dims.windows(2).map(|w| (w[0] * w[1]) as u64).sum()
    }
}

/// Numerically stable logistic function.
#[inline]
pub(crate) fn sigmoid<R: Real>(z: R) -> R {
    if z >= R::zero() {
        (R::one() + (-z).exp()).recip()
    } else {
        let e = z.exp();
        e / (R::one() + e)
    }
}
