//! Monte-Carlo confusion measurement of a predictor against the oracle.

use std::sync::atomic::{AtomicU64, Ordering};
use std::time::Instant;

use crate::error::{Error, Result};
use crate::model::BoundingModel;
use crate::query::{uniform_region, QueryKind, QueryOracle, Region};
use crate::rng::{mix, stream};
use crate::scalar::Real;

/// What to measure: an actual predictor, or the oracle echoed back at
/// itself (a sanity subject with zero error by construction).
#[derive(Clone, Copy)]
pub enum Subject<'a, R: Real> {
    Predictor(&'a dyn BoundingModel<R>),
    OracleEcho,
}

#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct TimeStats {
    pub total_ns: f64,
    pub mean_ns_per_query: f64,
    pub median_ns_per_query: f64,
}

/// Confusion counts and rates for one (method, indicator, query) cell.
#[derive(Clone, Debug)]
pub struct EvalReport {
    pub method: String,
    pub indicator_id: String,
    pub query: QueryKind,
    pub n: u64,
    pub tp: u64,
    pub tn: u64,
    pub fp: u64,
    pub fn_count: u64,
    pub time: TimeStats,
}

impl EvalReport {
    /// False positives relative to the oracle-negative population (an
    /// always-positive predictor scores 1).
    pub fn fp_rate(&self) -> f64 {
        let neg = self.fp + self.tn;
        if neg == 0 {
            0.0
        } else {
            self.fp as f64 / neg as f64
        }
    }

    /// False negatives relative to the oracle-positive population.
    pub fn fn_rate(&self) -> f64 {
        let pos = self.fn_count + self.tp;
        if pos == 0 {
            0.0
        } else {
            self.fn_count as f64 / pos as f64
        }
    }

    pub const CSV_HEADER: &'static str =
        "method,indicator,query,n,fp,fn,tp,tn,fp_rate,fn_rate,median_ns_per_query";

    pub fn csv_row(&self) -> String {
        format!(
            "{},{},{},{},{},{},{},{},{},{},{}",
            self.method,
            self.indicator_id,
            self.query,
            self.n,
            self.fp,
            self.fn_count,
            self.tp,
            self.tn,
            self.fp_rate(),
            self.fn_rate(),
            self.time.median_ns_per_query,
        )
    }
}

#[derive(Default, Clone, Copy)]
struct ChunkResult {
    tp: u64,
    tn: u64,
    fp: u64,
    fn_count: u64,
    predictor_ns: f64,
    queries: u64,
}

/// Worker cap from `NBOUND_THREADS`, defaulting to the machine parallelism.
fn worker_count() -> Result<usize> {
    match std::env::var("NBOUND_THREADS") {
        Ok(v) => {
            let n: usize = v
                .parse()
                .map_err(|_| Error::Config(format!("bad NBOUND_THREADS value {v:?}")))?;
            Ok(n.max(1))
        }
        Err(_) => Ok(std::thread::available_parallelism()
            .map(|n| n.get())
            .unwrap_or(1)),
    }
}

const CHUNK: u64 = 16_384;

/// Measures `subject` on `n` uniform queries of `kind`.
///
/// Counts are deterministic given `seed`: query `i` draws its region and
/// its oracle labels from ChaCha substreams keyed by `(seed, i)`, so
/// results do not depend on how chunks are sharded across workers (capped
/// by `NBOUND_THREADS`). Predictor wall time is measured around batched
/// predictor calls only.
pub fn measure<R: Real>(
    subject: Subject<R>,
    oracle: &QueryOracle<R>,
    kind: QueryKind,
    n: u64,
    seed: u64,
) -> Result<EvalReport> {
    if n == 0 {
        return Err(Error::Invalid("measure needs n >= 1".into()));
    }
    if let Subject::Predictor(model) = subject {
        if model.dim() != oracle.dim() {
            return Err(Error::DimMismatch {
                expected: oracle.dim(),
                got: model.dim(),
            });
        }
        if let Some(expected) = model.query_kind() {
            if expected != kind {
                return Err(Error::QueryMismatch {
                    expected,
                    got: kind,
                });
            }
        }
    }

    let n_chunks = n.div_ceil(CHUNK);
    let workers = worker_count()?.min(n_chunks as usize).max(1);
    let mut results = vec![ChunkResult::default(); n_chunks as usize];
    let started = Instant::now();

    if workers == 1 {
        for (c, slot) in results.iter_mut().enumerate() {
            *slot = run_chunk(subject, oracle, kind, n, seed, c as u64);
        }
    } else {
        let next = AtomicU64::new(0);
        // Chunks are claimed dynamically; counts only depend on the chunk
        // index, so the schedule cannot change the totals.
        let merged = std::thread::scope(|scope| {
            let mut handles = Vec::with_capacity(workers);
            for _ in 0..workers {
                let next = &next;
                handles.push(scope.spawn(move || {
                    let mut local: Vec<(usize, ChunkResult)> = Vec::new();
                    loop {
                        let c = next.fetch_add(1, Ordering::Relaxed);
                        if c >= n_chunks {
                            break;
                        }
                        local.push((c as usize, run_chunk(subject, oracle, kind, n, seed, c)));
                    }
                    local
                }));
            }
            let mut merged: Vec<(usize, ChunkResult)> = Vec::new();
            for h in handles {
                merged.extend(h.join().expect("measure worker panicked"));
            }
            merged
        });
        for (c, r) in merged {
            results[c] = r;
        }
    }

    let mut report = EvalReport {
        method: match subject {
            Subject::Predictor(_) => "predictor".into(),
            Subject::OracleEcho => "oracle".into(),
        },
        indicator_id: String::new(),
        query: kind,
        n,
        tp: 0,
        tn: 0,
        fp: 0,
        fn_count: 0,
        time: TimeStats::default(),
    };
    let mut chunk_means: Vec<f64> = Vec::with_capacity(results.len());
    let mut total_pred_ns = 0.0;
    for r in &results {
        report.tp += r.tp;
        report.tn += r.tn;
        report.fp += r.fp;
        report.fn_count += r.fn_count;
        total_pred_ns += r.predictor_ns;
        if r.queries > 0 {
            chunk_means.push(r.predictor_ns / r.queries as f64);
        }
    }
    chunk_means.sort_by(|a, b| a.partial_cmp(b).unwrap());
    report.time = TimeStats {
        total_ns: started.elapsed().as_nanos() as f64,
        mean_ns_per_query: total_pred_ns / n as f64,
        median_ns_per_query: chunk_means[chunk_means.len() / 2],
    };
    debug_assert_eq!(report.tp + report.tn + report.fp + report.fn_count, n);
    Ok(report)
}

fn run_chunk<R: Real>(
    subject: Subject<R>,
    oracle: &QueryOracle<R>,
    kind: QueryKind,
    n: u64,
    seed: u64,
    chunk: u64,
) -> ChunkResult {
    let start = chunk * CHUNK;
    let end = (start + CHUNK).min(n);
    let dim = oracle.dim();
    let region_family = mix(seed, 0x5245_4749);
    let label_family = mix(seed, 0x4c41_4245);

    let mut regions: Vec<Region<R>> = Vec::with_capacity((end - start) as usize);
    let mut labels: Vec<bool> = Vec::with_capacity(regions.capacity());
    for i in start..end {
        let region = uniform_region::<R>(&mut stream(region_family, i), kind, dim);
        labels.push(oracle.label(&mut stream(label_family, i), &region));
        regions.push(region);
    }

    let mut out = ChunkResult {
        queries: end - start,
        ..Default::default()
    };
    let mut predictions: Vec<bool> = Vec::with_capacity(regions.len());
    match subject {
        Subject::Predictor(model) => {
            let mut tester = model.tester();
            let t0 = Instant::now();
            for region in &regions {
                predictions.push(tester(region));
            }
            out.predictor_ns = t0.elapsed().as_nanos() as f64;
        }
        Subject::OracleEcho => {
            let t0 = Instant::now();
            predictions.extend_from_slice(&labels);
            out.predictor_ns = t0.elapsed().as_nanos() as f64;
        }
    }
    for (p, y) in predictions.iter().zip(&labels) {
        match (y, p) {
            (true, true) => out.tp += 1,
            (true, false) => out.fn_count += 1,
            (false, true) => out.fp += 1,
            (false, false) => out.tn += 1,
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{fit_aabb, Aabb};
    use crate::indicator::{GridIndicator, ProceduralIndicator};
    use std::sync::Arc;

    struct AlwaysYes;
    impl BoundingModel<f64> for AlwaysYes {
        fn dim(&self) -> usize {
            2
        }
        fn tester(&self) -> crate::model::BoxTester<'_, f64> {
            Box::new(|_| true)
        }
    }

    fn disk_oracle(r: f64) -> QueryOracle<f64> {
        let disk = ProceduralIndicator::disk(&[0.5, 0.5], r).unwrap();
        QueryOracle::new(Arc::new(disk), 128)
    }

    #[test]
    fn always_positive_predictor_has_full_fp_rate_and_no_misses() {
        let oracle = disk_oracle(0.25);
        let rep = measure(
            Subject::Predictor(&AlwaysYes),
            &oracle,
            QueryKind::Point,
            50_000,
            7,
        )
        .unwrap();
        assert_eq!(rep.fn_count, 0);
        assert_eq!(rep.fp_rate(), 1.0);
        assert_eq!(rep.fn_rate(), 0.0);
    }

    #[test]
    fn oracle_echo_is_error_free() {
        let oracle = disk_oracle(0.25);
        for kind in QueryKind::ALL {
            let rep = measure(Subject::OracleEcho, &oracle, kind, 20_000, 11).unwrap();
            assert_eq!(rep.fp, 0);
            assert_eq!(rep.fn_count, 0);
            assert_eq!(rep.tp + rep.tn, 20_000);
        }
    }

    #[test]
    fn aabb_on_centered_disk_matches_the_analytic_fp_rate() {
        // Box [0.25,0.75]^2 over a disk of radius 0.25:
        // fp_rate = (0.25 - pi/16) / (1 - pi/16) ~ 0.06478.
        let oracle = disk_oracle(0.25);
        let aabb = Aabb::new(&[0.25f64, 0.25], &[0.75, 0.75]).unwrap();
        let n = 200_000;
        let rep = measure(Subject::Predictor(&aabb), &oracle, QueryKind::Point, n, 13).unwrap();
        let expected = (0.25 - std::f64::consts::PI / 16.0) / (1.0 - std::f64::consts::PI / 16.0);
        let sigma = (expected * (1.0 - expected) / (n as f64 * (1.0 - 0.196))).sqrt();
        assert_eq!(rep.fn_count, 0);
        assert!(
            (rep.fp_rate() - expected).abs() < 4.0 * sigma,
            "fp_rate {} vs analytic {expected}",
            rep.fp_rate()
        );
    }

    #[test]
    fn counts_are_deterministic_and_thread_independent() {
        let disk = ProceduralIndicator::disk(&[0.5f64, 0.5], 0.3).unwrap();
        let g = GridIndicator::rasterize(&disk, &[16, 16]).unwrap();
        let aabb = fit_aabb::<f64>(&g).unwrap();
        let oracle = QueryOracle::<f64>::new(Arc::new(g), 64);
        let run = |threads: &str| {
            std::env::set_var("NBOUND_THREADS", threads);
            let rep = measure(
                Subject::Predictor(&aabb),
                &oracle,
                QueryKind::Ray,
                40_000,
                17,
            )
            .unwrap();
            std::env::remove_var("NBOUND_THREADS");
            (rep.tp, rep.tn, rep.fp, rep.fn_count)
        };
        assert_eq!(run("1"), run("2"));
    }

    #[test]
    fn mismatches_are_typed_errors() {
        let oracle = disk_oracle(0.2);
        struct Mismatched;
        impl BoundingModel<f64> for Mismatched {
            fn dim(&self) -> usize {
                3
            }
            fn tester(&self) -> crate::model::BoxTester<'_, f64> {
                Box::new(|_| true)
            }
        }
        assert!(matches!(
            measure(
                Subject::Predictor(&Mismatched),
                &oracle,
                QueryKind::Point,
                10,
                1
            ),
            Err(Error::DimMismatch { .. })
        ));

        struct PointOnly;
        impl BoundingModel<f64> for PointOnly {
            fn dim(&self) -> usize {
                2
            }
            fn query_kind(&self) -> Option<QueryKind> {
                Some(QueryKind::Point)
            }
            fn tester(&self) -> crate::model::BoxTester<'_, f64> {
                Box::new(|_| true)
            }
        }
        assert!(matches!(
            measure(
                Subject::Predictor(&PointOnly),
                &oracle,
                QueryKind::Ray,
                10,
                1
            ),
            Err(Error::QueryMismatch { .. })
        ));
    }

    #[test]
    fn nested_predictors_order_their_error_rates() {
        // Inner box within outer box: fp grows with the positive set while
        // fn shrinks.
        let oracle = disk_oracle(0.2);
        let inner = Aabb::new(&[0.35f64, 0.35], &[0.65, 0.65]).unwrap();
        let outer = Aabb::new(&[0.25f64, 0.25], &[0.8, 0.8]).unwrap();
        let a = measure(Subject::Predictor(&outer), &oracle, QueryKind::Point, 50_000, 3).unwrap();
        let b = measure(Subject::Predictor(&inner), &oracle, QueryKind::Point, 50_000, 3).unwrap();
        assert!(a.fp >= b.fp);
        assert!(a.fn_count <= b.fn_count);
    }
}
