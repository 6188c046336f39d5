//! Break-even cost model: when does a slower-but-tighter bounding method
//! pay off?
//!
//! Testing `N` queries with bounding method `i` costs
//! `N t_i + p_i N t`, where `t` is the cost of a full geometry test behind
//! every false positive. Method A beats method B when
//! `t_a + p_a t < t_b + p_b t`; solving for `t` gives the threshold
//! `(t_b - t_a) / (p_a - p_b)`, interpreted on either side depending on the
//! sign of `p_a - p_b`.

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CostModel {
    /// Per-query time of method A.
    pub t_a: f64,
    /// Per-query time of method B.
    pub t_b: f64,
    /// False-positive rate of method A.
    pub p_a: f64,
    /// False-positive rate of method B.
    pub p_b: f64,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Verdict {
    /// A is tighter but slower: it wins when the geometry test costs more
    /// than the threshold.
    AWinsAbove(f64),
    /// A is looser but faster: it wins when the geometry test costs less
    /// than the threshold.
    AWinsBelow(f64),
    /// Same false-positive rate, A cheaper: A wins for every `t > 0`.
    AlwaysA,
    /// Same false-positive rate, A costlier: A never wins.
    AlwaysB,
    /// Identical cost curves.
    Tie,
}

fn check(cm: &CostModel) -> Result<()> {
    let vals = [cm.t_a, cm.t_b, cm.p_a, cm.p_b];
    if vals.iter().any(|v| *v < 0.0 || !v.is_finite()) {
        return Err(Error::Invalid(
            "cost model needs finite, non-negative times and rates".into(),
        ));
    }
    Ok(())
}

/// The geometry-test cost threshold `(t_b - t_a) / (p_a - p_b)`.
///
/// Equal false-positive rates return the `+inf` sentinel; the sign of
/// `t_b - t_a` then decides the always/never verdict (see [`verdict`]).
pub fn breakeven_ratio(cm: &CostModel) -> Result<f64> {
    check(cm)?;
    if cm.p_a == cm.p_b {
        return Ok(f64::INFINITY);
    }
    Ok((cm.t_b - cm.t_a) / (cm.p_a - cm.p_b))
}

pub fn verdict(cm: &CostModel) -> Result<Verdict> {
    check(cm)?;
    if cm.p_a == cm.p_b {
        return Ok(match cm.t_a.partial_cmp(&cm.t_b).unwrap() {
            std::cmp::Ordering::Less => Verdict::AlwaysA,
            std::cmp::Ordering::Greater => Verdict::AlwaysB,
            std::cmp::Ordering::Equal => Verdict::Tie,
        });
    }
    let threshold = (cm.t_b - cm.t_a) / (cm.p_a - cm.p_b);
    if cm.p_a < cm.p_b {
        Ok(Verdict::AWinsAbove(threshold))
    } else {
        Ok(Verdict::AWinsBelow(threshold))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn worked_example_five_times_slower_but_three_times_tighter() {
        // t_a = 5 t_b, p_a = 0.1, p_b = 0.3: A pays off once the geometry
        // test is at least 20x the bounding query.
        let cm = CostModel {
            t_a: 5.0,
            t_b: 1.0,
            p_a: 0.1,
            p_b: 0.3,
        };
        let ratio = breakeven_ratio(&cm).unwrap();
        assert!((ratio - 20.0).abs() < 1e-12);
        assert_eq!(verdict(&cm).unwrap(), Verdict::AWinsAbove(ratio));
    }

    #[test]
    fn equal_times_make_the_tighter_method_always_win() {
        let cm = CostModel {
            t_a: 1.0,
            t_b: 1.0,
            p_a: 0.1,
            p_b: 0.3,
        };
        assert_eq!(breakeven_ratio(&cm).unwrap(), 0.0);
        // Threshold 0: A wins for any positive geometry cost.
        assert_eq!(verdict(&cm).unwrap(), Verdict::AWinsAbove(0.0));
    }

    #[test]
    fn equal_rates_hit_the_infinity_sentinel() {
        let mut cm = CostModel {
            t_a: 1.0,
            t_b: 2.0,
            p_a: 0.2,
            p_b: 0.2,
        };
        assert_eq!(breakeven_ratio(&cm).unwrap(), f64::INFINITY);
        assert_eq!(verdict(&cm).unwrap(), Verdict::AlwaysA);
        cm.t_a = 3.0;
        assert_eq!(verdict(&cm).unwrap(), Verdict::AlwaysB);
        cm.t_a = 2.0;
        assert_eq!(verdict(&cm).unwrap(), Verdict::Tie);
    }

    #[test]
    fn negative_inputs_are_rejected() {
        let cm = CostModel {
            t_a: -1.0,
            t_b: 1.0,
            p_a: 0.1,
            p_b: 0.2,
        };
        assert!(breakeven_ratio(&cm).is_err());
    }

    proptest! {
        /// On the predicted side of the threshold the total-cost inequality
        /// holds exactly.
        #[test]
        fn threshold_separates_the_cost_curves(
            t_a in 0.01f64..100.0, t_b in 0.01f64..100.0,
            p_a in 0.0f64..1.0, p_b in 0.0f64..1.0,
            lift in 0.01f64..10.0,
        ) {
            prop_assume!((p_a - p_b).abs() > 1e-9);
            let cm = CostModel { t_a, t_b, p_a, p_b };
            let threshold = breakeven_ratio(&cm).unwrap();
            let total = |t_i: f64, p_i: f64, t: f64| t_i + p_i * t;
            if p_a < p_b {
                // A wins for t above the threshold.
                let t = threshold.max(0.0) * (1.0 + lift) + lift;
                prop_assert!(total(t_a, p_a, t) < total(t_b, p_b, t));
            } else {
                // A wins for t below the threshold (when it is positive).
                if threshold > 0.0 {
                    let t = threshold / (1.0 + lift);
                    prop_assert!(total(t_a, p_a, t) < total(t_b, p_b, t));
                }
                // and loses above it.
                let t = threshold.max(0.0) * (1.0 + lift) + lift;
                prop_assert!(total(t_a, p_a, t) > total(t_b, p_b, t));
            }
        }
    }
}
