//! Tiny fixed-capacity vector helpers for spatial dimensions up to [`MAX_DIM`].

use crate::scalar::Real;

/// Highest spatial dimension the toolkit supports (4D = animated 3D).
pub const MAX_DIM: usize = 4;

#[inline]
pub fn dot<R: Real>(a: &[R], b: &[R]) -> R {
    debug_assert_eq!(a.len(), b.len());
    let mut acc = R::zero();
    for (x, y) in a.iter().zip(b) {
        acc = acc + *x * *y;
    }
    acc
}

#[inline]
pub fn norm2<R: Real>(a: &[R]) -> R {
    dot(a, a)
}

#[inline]
pub fn norm<R: Real>(a: &[R]) -> R {
    norm2(a).sqrt()
}

#[inline]
pub fn sub<R: Real>(a: &[R], b: &[R], out: &mut [R]) {
    for i in 0..a.len() {
        out[i] = a[i] - b[i];
    }
}

/// Copies `src` into a zero-padded fixed array.
#[inline]
pub fn pad<R: Real>(src: &[R]) -> [R; MAX_DIM] {
    debug_assert!(src.len() <= MAX_DIM);
    let mut out = [R::zero(); MAX_DIM];
    out[..src.len()].copy_from_slice(src);
    out
}
