//! Ground-truth query labels: a region is positive iff at least one of its
//! samples hits the indicator.

use std::sync::Arc;

use rand::Rng;

use super::{sample_region_into, QueryKind, Region};
use crate::indicator::Indicator;
use crate::scalar::Real;
use crate::vecn::MAX_DIM;

/// Default samples per region while training.
pub const TRAIN_SAMPLES: usize = 64;
/// Default samples per region during evaluation.
pub const EVAL_SAMPLES: usize = 128;

/// Sampled `any()` oracle over an indicator.
#[derive(Clone)]
pub struct QueryOracle<R: Real> {
    indicator: Arc<dyn Indicator<R>>,
    samples_per_region: usize,
}

impl<R: Real> QueryOracle<R> {
    pub fn new(indicator: Arc<dyn Indicator<R>>, samples_per_region: usize) -> Self {
        assert!(samples_per_region >= 1);
        Self {
            indicator,
            samples_per_region,
        }
    }

    pub fn dim(&self) -> usize {
        self.indicator.dim()
    }

    pub fn samples_per_region(&self) -> usize {
        self.samples_per_region
    }

    pub fn indicator(&self) -> &Arc<dyn Indicator<R>> {
        &self.indicator
    }

    /// Labels a region: 1 iff any sampled point hits the indicator.
    /// Point queries bypass sampling — the oracle equals the indicator there.
    pub fn label(&self, rng: &mut impl Rng, region: &Region<R>) -> bool {
        debug_assert_eq!(region.dim(), self.indicator.dim());
        if region.kind() == QueryKind::Point {
            return self.indicator.eval(region.first());
        }
        let mut pts: Vec<[R; MAX_DIM]> = Vec::with_capacity(self.samples_per_region);
        sample_region_into(rng, region, self.samples_per_region, &mut pts);
        pts.iter()
            .any(|p| self.indicator.eval(&p[..region.dim()]))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::indicator::{GridIndicator, ProceduralIndicator};
    use crate::query::uniform_region;
    use crate::rng::stream;

    fn full_grid(dim: usize) -> GridIndicator {
        let shape = vec![4; dim];
        let mut g = GridIndicator::zeros(&shape).unwrap();
        for c in 0..g.n_cells() {
            g.set_cell(c, true);
        }
        g
    }

    #[test]
    fn fully_occupied_grid_labels_every_domain_ray_positive() {
        let oracle = QueryOracle::<f64>::new(Arc::new(full_grid(2)), 64);
        let mut rng = stream(31, 0);
        for i in 0..200 {
            let r = uniform_region(&mut stream(31, 100 + i), QueryKind::Ray, 2);
            assert!(oracle.label(&mut rng, &r));
        }
    }

    #[test]
    fn empty_grid_labels_everything_negative() {
        let oracle = QueryOracle::<f64>::new(Arc::new(GridIndicator::zeros(&[4, 4]).unwrap()), 64);
        let mut rng = stream(32, 0);
        for kind in QueryKind::ALL {
            for i in 0..100 {
                let r = uniform_region(&mut stream(32, 100 + i), kind, 2);
                assert!(!oracle.label(&mut rng, &r));
            }
        }
    }

    #[test]
    fn disk_ray_labels_match_analytic_intersection() {
        // Disk radius 0.25 at the center: the ray along y=0.5 passes through
        // the center; the ray along y=0.05 stays 0.45 away from it.
        let disk = ProceduralIndicator::disk(&[0.5f64, 0.5], 0.25).unwrap();
        let oracle = QueryOracle::new(Arc::new(disk), 128);
        let mut rng = stream(33, 0);
        let hit = Region::ray(&[0.0f64, 0.5], &[1.0, 0.0]).unwrap();
        let miss = Region::ray(&[0.0f64, 0.05], &[1.0, 0.0]).unwrap();
        assert!(oracle.label(&mut rng, &hit));
        assert!(!oracle.label(&mut rng, &miss));
    }

    #[test]
    fn point_oracle_equals_indicator() {
        let disk = ProceduralIndicator::disk(&[0.5f64, 0.5], 0.25).unwrap();
        let oracle = QueryOracle::new(Arc::new(disk.clone()), 64);
        let mut rng = stream(34, 0);
        for i in 0..1000 {
            let r = uniform_region::<f64>(&mut stream(34, 10 + i), QueryKind::Point, 2);
            assert_eq!(oracle.label(&mut rng, &r), crate::indicator::Indicator::<f64>::eval(&disk, r.first()));
        }
    }

    #[test]
    fn oracle_is_monotone_in_the_indicator() {
        // A's occupied set contains B's; with identical rng streams the
        // labels are pointwise ordered.
        let mut small = GridIndicator::zeros(&[8, 8]).unwrap();
        for i in 2..5 {
            for j in 2..5 {
                small.set(&[i, j], true);
            }
        }
        let mut big = small.clone();
        for i in 0..8 {
            big.set(&[i, 6], true);
        }
        let oracle_small = QueryOracle::<f64>::new(Arc::new(small), 64);
        let oracle_big = QueryOracle::<f64>::new(Arc::new(big), 64);
        for kind in QueryKind::ALL {
            for i in 0..500u64 {
                let r = uniform_region(&mut stream(35, i), kind, 2);
                let a = oracle_big.label(&mut stream(36, i), &r);
                let b = oracle_small.label(&mut stream(36, i), &r);
                assert!(a >= b, "superset indicator lost a positive at {r:?}");
            }
        }
    }

    #[test]
    fn nested_sample_sets_never_flip_positive_to_negative() {
        // Build nested sample sets explicitly: any() over the first s
        // elements of one stratified draw is monotone in s.
        let disk = ProceduralIndicator::disk(&[0.5f64, 0.5], 0.2).unwrap();
        let mut rng = stream(37, 0);
        for i in 0..300u64 {
            let r = uniform_region::<f64>(&mut stream(37, 1000 + i), QueryKind::Ray, 2);
            let pts = sample_region_into_vec(&mut rng, &r, 256);
            let mut seen = false;
            for s in [32usize, 64, 128, 256] {
                let any = pts[..s.min(pts.len())]
                    .iter()
                    .any(|p| crate::indicator::Indicator::<f64>::eval(&disk, &p[..2]));
                assert!(any >= seen, "label flipped from 1 to 0 as s grew");
                seen = seen || any;
            }
        }
    }

    fn sample_region_into_vec(
        rng: &mut impl Rng,
        r: &Region<f64>,
        s: usize,
    ) -> Vec<[f64; MAX_DIM]> {
        let mut v = Vec::new();
        sample_region_into(rng, r, s, &mut v);
        v
    }
}
