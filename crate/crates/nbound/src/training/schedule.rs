//! Step-wise asymmetry schedule.
//!
//! Every scheduling window with remaining misses bumps the asymmetry: the
//! miss-side weight grows by 0.2 while the other side shrinks by harmonic
//! decrements whose base depends on the indicator dimension (1/20, 1/40,
//! 1/60, ... in 2D; 1/100, ... in 3D; 1/200, ... in 4D — higher dimensions
//! need a larger degree of asymmetry). Weights are renormalized so
//! `min(alpha, beta) = 1` and the ratio never decreases. Clean windows
//! leave the weights untouched.

use super::loss::LossWeights;
use crate::error::{Error, Result};
use crate::scalar::Real;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum DimProfile {
    D2,
    D3,
    D4,
}

impl DimProfile {
    pub fn from_dim(dim: usize) -> Result<Self> {
        match dim {
            2 => Ok(Self::D2),
            3 => Ok(Self::D3),
            4 => Ok(Self::D4),
            other => Err(Error::Invalid(format!(
                "no schedule profile for dimension {other}"
            ))),
        }
    }

    /// Base of the harmonic decrement sequence `1/(base * k)`.
    pub fn decrement_base(self) -> f64 {
        match self {
            Self::D2 => 20.0,
            Self::D3 => 100.0,
            Self::D4 => 200.0,
        }
    }
}

#[derive(Clone, Debug)]
pub struct ScheduleState {
    profile: DimProfile,
    /// Number of triggered (miss-bearing) windows so far.
    triggered: u32,
    /// Raw escalating weight: `1 + 0.2 * triggered`.
    grow: f64,
    /// Raw shrinking weight: `1 - sum_k 1/(base k)`, floored.
    shrink: f64,
}

const SHRINK_FLOOR: f64 = 0.05;

impl ScheduleState {
    pub fn new(profile: DimProfile) -> Self {
        Self {
            profile,
            triggered: 0,
            grow: 1.0,
            shrink: 1.0,
        }
    }

    pub fn triggered(&self) -> u32 {
        self.triggered
    }

    /// Raw (grow, shrink) pair before renormalization, for auditability.
    pub fn raw(&self) -> (f64, f64) {
        (self.grow, self.shrink)
    }

    pub fn ratio(&self) -> f64 {
        self.grow / self.shrink
    }

    /// Current weights with the escalating side on `alpha` (false-negative
    /// cost) and `min(alpha, beta) = 1`.
    pub fn weights<R: Real>(&self) -> LossWeights<R> {
        LossWeights::new(R::from_f(self.ratio()), R::one())
    }

    /// Advances the schedule at the end of a window: weights change only if
    /// the window still had misses.
    pub fn step<R: Real>(&mut self, window_had_misses: bool) -> LossWeights<R> {
        if window_had_misses {
            self.triggered += 1;
            self.grow += 0.2;
            self.shrink =
                (self.shrink - 1.0 / (self.profile.decrement_base() * self.triggered as f64))
                    .max(SHRINK_FLOOR);
        }
        self.weights()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn clean_windows_leave_weights_unchanged() {
        let mut s = ScheduleState::new(DimProfile::D2);
        let before = s.weights::<f64>();
        for _ in 0..5 {
            let after = s.step::<f64>(false);
            assert_eq!(before, after);
        }
        assert_eq!(s.triggered(), 0);
    }

    #[test]
    fn first_three_triggers_apply_the_2d_decrements() {
        let mut s = ScheduleState::new(DimProfile::D2);
        s.step::<f64>(true);
        let (g, k) = s.raw();
        assert!((g - 1.2).abs() < 1e-12);
        assert!((k - (1.0 - 1.0 / 20.0)).abs() < 1e-12);
        s.step::<f64>(true);
        assert!((s.raw().1 - (1.0 - 1.0 / 20.0 - 1.0 / 40.0)).abs() < 1e-12);
        s.step::<f64>(true);
        assert!((s.raw().1 - (1.0 - 1.0 / 20.0 - 1.0 / 40.0 - 1.0 / 60.0)).abs() < 1e-12);
        assert_eq!(s.triggered(), 3);
    }

    #[test]
    fn higher_dimensions_escalate_more_gently_per_step() {
        let mut s3 = ScheduleState::new(DimProfile::D3);
        let mut s4 = ScheduleState::new(DimProfile::D4);
        s3.step::<f64>(true);
        s4.step::<f64>(true);
        assert!((s3.raw().1 - (1.0 - 1.0 / 100.0)).abs() < 1e-12);
        assert!((s4.raw().1 - (1.0 - 1.0 / 200.0)).abs() < 1e-12);
    }

    #[test]
    fn ratio_is_monotone_nondecreasing() {
        let mut s = ScheduleState::new(DimProfile::D2);
        let mut last = s.ratio();
        let pattern = [true, false, true, true, false, false, true];
        for miss in pattern {
            s.step::<f64>(miss);
            assert!(s.ratio() >= last);
            last = s.ratio();
        }
        // Renormalization keeps beta pinned at 1.
        let w = s.weights::<f64>();
        assert_eq!(w.beta, 1.0);
        assert!(w.alpha >= 1.0);
    }
}
