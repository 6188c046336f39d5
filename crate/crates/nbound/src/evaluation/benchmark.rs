//! Throughput benchmarking of bounding predictors.
//!
//! Absolute times are machine-specific; only ratios and orderings between
//! methods measured on the same machine are meaningful. Runs are pinned to
//! one thread, warm-up passes are excluded, and the median over repeats is
//! the headline number.

use std::time::Instant;

use super::measure::TimeStats;
use crate::model::BoundingModel;
use crate::query::{uniform_region, QueryKind, Region};
use crate::rng::{mix, stream, unit};
use crate::scalar::Real;
use crate::vecn::MAX_DIM;

/// Pre-generated uniform query stream.
pub fn uniform_query_stream<R: Real>(
    kind: QueryKind,
    dim: usize,
    n: usize,
    seed: u64,
) -> Vec<Region<R>> {
    (0..n as u64)
        .map(|i| uniform_region(&mut stream(seed, i), kind, dim))
        .collect()
}

/// Forward-facing 3D rays: origins uniform on the z = 0 face, directions
/// uniform on the +z hemisphere.
pub fn forward_facing_rays<R: Real>(n: usize, seed: u64) -> Vec<Region<R>> {
    (0..n as u64)
        .map(|i| {
            let mut rng = stream(seed, i);
            let origin = [unit::<R>(&mut rng), unit::<R>(&mut rng), R::zero()];
            let mut dir = [R::zero(); MAX_DIM];
            crate::rng::unit_vector(&mut rng, 3, &mut dir);
            if dir[2] < R::zero() {
                dir[2] = -dir[2];
            }
            Region::ray(&origin, &dir[..3]).expect("unit direction")
        })
        .collect()
}

/// Times full passes of the predictor over `queries`, `repeats` times
/// (after 2 warm-up passes), single-threaded.
pub fn benchmark<R: Real>(
    model: &dyn BoundingModel<R>,
    queries: &[Region<R>],
    repeats: usize,
) -> TimeStats {
    assert!(!queries.is_empty());
    let repeats = repeats.max(1);
    let mut tester = model.tester();
    let mut sink = 0u64;
    for _ in 0..2 {
        for q in queries {
            sink = sink.wrapping_add(tester(q) as u64);
        }
    }
    let mut per_query: Vec<f64> = Vec::with_capacity(repeats);
    let mut total = 0.0;
    for _ in 0..repeats {
        let t0 = Instant::now();
        for q in queries {
            sink = sink.wrapping_add(tester(q) as u64);
        }
        let ns = t0.elapsed().as_nanos() as f64;
        total += ns;
        per_query.push(ns / queries.len() as f64);
    }
    std::hint::black_box(sink);
    per_query.sort_by(|a, b| a.partial_cmp(b).unwrap());
    TimeStats {
        total_ns: total,
        mean_ns_per_query: total / (repeats * queries.len()) as f64,
        median_ns_per_query: per_query[per_query.len() / 2],
    }
}

/// Convenience: benchmark on a fresh uniform stream.
pub fn benchmark_uniform<R: Real>(
    model: &dyn BoundingModel<R>,
    kind: QueryKind,
    n: usize,
    repeats: usize,
    seed: u64,
) -> TimeStats {
    let queries = uniform_query_stream::<R>(kind, model.dim(), n, mix(seed, 0xbe9c));
    benchmark(model, &queries, repeats)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::fit_aabb;
    use crate::indicator::{GridIndicator, ProceduralIndicator};
    use crate::model::{BoundingModel, NnPredictor};
    use crate::nnet::Mlp;

    #[test]
    fn forward_facing_rays_start_on_the_floor_and_point_up() {
        let rays = forward_facing_rays::<f64>(500, 3);
        for r in &rays {
            assert_eq!(r.kind(), QueryKind::Ray);
            assert_eq!(r.first()[2], 0.0);
            assert!(r.second()[2] >= 0.0);
        }
    }

    #[test]
    fn repeated_benchmarks_agree_within_tolerance() {
        let disk = ProceduralIndicator::disk(&[0.5f64, 0.5], 0.3).unwrap();
        let g = GridIndicator::rasterize(&disk, &[16, 16]).unwrap();
        let aabb = fit_aabb::<f64>(&g).unwrap();
        let queries = uniform_query_stream::<f64>(QueryKind::Point, 2, 50_000, 5);
        let a = benchmark(&aabb, &queries, 15);
        let b = benchmark(&aabb, &queries, 15);
        let ratio = a.median_ns_per_query / b.median_ns_per_query;
        assert!(
            (0.8..=1.25).contains(&ratio),
            "medians diverged: {} vs {}",
            a.median_ns_per_query,
            b.median_ns_per_query
        );
    }

    #[test]
    fn box_test_is_faster_than_a_network_forward() {
        // Ordering only; the margin is enormous (a 3D point test against
        // two corners vs a 50x50 MLP).
        let ball = ProceduralIndicator::disk(&[0.5f64, 0.5, 0.5], 0.3).unwrap();
        let g = GridIndicator::rasterize(&ball, &[16, 16, 16]).unwrap();
        let aabb = fit_aabb::<f64>(&g).unwrap();
        let nn = NnPredictor {
            net: Mlp::<f64>::for_query(3, QueryKind::Point, 3, 1.0, 0),
            dim: 3,
            query: QueryKind::Point,
            eps: 1e-5,
            seed: 3,
        };
        let queries = uniform_query_stream::<f64>(QueryKind::Point, 3, 20_000, 9);
        let t_box = benchmark(&aabb, &queries, 9);
        let t_nn = benchmark(&nn, &queries, 9);
        assert!(
            t_box.median_ns_per_query < t_nn.median_ns_per_query,
            "{} vs {}",
            t_box.median_ns_per_query,
            t_nn.median_ns_per_query
        );
    }
}
