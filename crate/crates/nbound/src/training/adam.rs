//! Adam optimizer over flat parameter buffers.

use crate::scalar::Real;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct AdamParams {
    pub beta1: f64,
    pub beta2: f64,
    pub eps: f64,
}

impl Default for AdamParams {
    fn default() -> Self {
        Self {
            beta1: 0.9,
            beta2: 0.999,
            eps: 1e-8,
        }
    }
}

#[derive(Clone, Debug)]
pub struct Adam<R: Real> {
    m: Vec<R>,
    v: Vec<R>,
    t: u64,
    hp: AdamParams,
}

impl<R: Real> Adam<R> {
    pub fn new(n_params: usize, hp: AdamParams) -> Self {
        Self {
            m: vec![R::zero(); n_params],
            v: vec![R::zero(); n_params],
            t: 0,
            hp,
        }
    }

    pub fn step(&mut self, params: &mut [R], grads: &[R], lr: R) {
        assert_eq!(params.len(), self.m.len());
        assert_eq!(grads.len(), self.m.len());
        self.t += 1;
        let b1 = R::from_f(self.hp.beta1);
        let b2 = R::from_f(self.hp.beta2);
        let eps = R::from_f(self.hp.eps);
        let one = R::one();
        let corr1 = one - R::from_f(self.hp.beta1.powi(self.t as i32));
        let corr2 = one - R::from_f(self.hp.beta2.powi(self.t as i32));
        for i in 0..params.len() {
            let g = grads[i];
            self.m[i] = b1 * self.m[i] + (one - b1) * g;
            self.v[i] = b2 * self.v[i] + (one - b2) * g * g;
            let m_hat = self.m[i] / corr1;
            let v_hat = self.v[i] / corr2;
            params[i] = params[i] - lr * m_hat / (v_hat.sqrt() + eps);
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn descends_a_quadratic() {
        // minimize (x - 3)^2 + (y + 1)^2
        let mut p = vec![0.0f64, 0.0];
        let mut adam = Adam::new(2, AdamParams::default());
        for _ in 0..3000 {
            let g = vec![2.0 * (p[0] - 3.0), 2.0 * (p[1] + 1.0)];
            adam.step(&mut p, &g, 0.01);
        }
        assert!((p[0] - 3.0).abs() < 1e-3);
        assert!((p[1] + 1.0).abs() < 1e-3);
    }

    #[test]
    fn first_step_moves_by_roughly_the_learning_rate() {
        let mut p = vec![0.0f64];
        let mut adam = Adam::new(1, AdamParams::default());
        adam.step(&mut p, &[123.0], 1e-3);
        assert!((p[0] + 1e-3).abs() < 1e-9);
    }
}
