//! Fourier positional encoding of coordinate inputs.

use crate::scalar::Real;

/// Maps each input coordinate `c` to `depth` features — `sin` and `cos` at
/// octave frequencies `2^f * pi`, `f = 0 .. depth/2` — appended after the
/// raw input, so the encoded width is `m + m * depth`. Depth 8 turns a 2D
/// point into an 18-dimensional input.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct PositionalEncoding {
    depth: usize,
}

impl PositionalEncoding {
    pub fn new(depth: usize) -> Self {
        assert!(depth >= 2 && depth % 2 == 0, "encoding depth must be even");
        Self { depth }
    }

    pub fn depth(&self) -> usize {
        self.depth
    }

    pub fn encoded_len(&self, input_len: usize) -> usize {
        input_len + input_len * self.depth
    }

    pub fn encode<R: Real>(&self, x: &[R], out: &mut Vec<R>) {
        out.clear();
        out.extend_from_slice(x);
        for &c in x {
            let mut freq = R::PI();
            for _ in 0..self.depth / 2 {
                let arg = freq * c;
                out.push(arg.sin());
                out.push(arg.cos());
                freq = freq + freq;
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn depth_8_on_2d_point_is_18_dimensional() {
        let pe = PositionalEncoding::new(8);
        assert_eq!(pe.encoded_len(2), 18);
        let mut out = Vec::new();
        pe.encode(&[0.0f64, 0.0], &mut out);
        assert_eq!(out.len(), 18);
        // At the origin every sin is 0 and every cos is 1.
        assert_eq!(&out[..2], &[0.0, 0.0]);
        for pair in out[2..].chunks(2) {
            assert_eq!(pair, &[0.0, 1.0]);
        }
    }

    #[test]
    fn frequencies_are_octaves_of_pi() {
        let pe = PositionalEncoding::new(4);
        let mut out = Vec::new();
        pe.encode(&[0.25f64], &mut out);
        assert_eq!(out.len(), 5);
        assert!((out[1] - (std::f64::consts::PI * 0.25).sin()).abs() < 1e-15);
        assert!((out[2] - (std::f64::consts::PI * 0.25).cos()).abs() < 1e-15);
        assert!((out[3] - (std::f64::consts::PI * 0.5).sin()).abs() < 1e-15);
        assert!((out[4] - (std::f64::consts::PI * 0.5).cos()).abs() < 1e-15);
    }
}
