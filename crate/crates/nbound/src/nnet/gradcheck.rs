//! Central finite-difference gradient checking.

use crate::scalar::Real;

/// Central finite differences of `f` around `params` with step `h`.
pub fn finite_difference<R: Real>(params: &[R], h: f64, mut f: impl FnMut(&[R]) -> R) -> Vec<R> {
    let h = R::from_f(h);
    let mut p = params.to_vec();
    let mut grads = Vec::with_capacity(p.len());
    for i in 0..p.len() {
        let orig = p[i];
        p[i] = orig + h;
        let fp = f(&p);
        p[i] = orig - h;
        let fm = f(&p);
        p[i] = orig;
        grads.push((fp - fm) / (h + h));
    }
    grads
}

/// Worst relative disagreement `|a - b| / max(|a|, |b|, floor)` over all
/// entries. The floor keeps near-zero gradients (where the finite-difference
/// noise floor dominates) from reporting spurious relative errors.
pub fn max_relative_error<R: Real>(analytic: &[R], numeric: &[R], floor: f64) -> f64 {
    assert_eq!(analytic.len(), numeric.len());
    let floor = R::from_f(floor);
    let mut worst = 0.0f64;
    for (&a, &n) in analytic.iter().zip(numeric) {
        let denom = a.abs().max(n.abs()).max(floor);
        worst = worst.max(((a - n).abs() / denom).to_f());
    }
    worst
}
