//! Method x indicator x query-type evaluation grids with CSV output.

use std::sync::Arc;

use super::benchmark::{benchmark, uniform_query_stream};
use super::measure::{measure, EvalReport, Subject};
use crate::error::Result;
use crate::geometry::{build_bvh, fit_aabb, fit_aaelli, fit_kdop, fit_obox, fit_oelli, fit_sphere};
use crate::indicator::GridIndicator;
use crate::model::{MethodKind, Model};
use crate::query::{QueryKind, QueryOracle};
use crate::rng::mix;
use crate::scalar::Real;

/// A column of the report grid: either a classic method fit per indicator,
/// or a fixed (typically trained) model evaluated against every indicator.
pub enum MethodSource<R: Real> {
    Classic(MethodKind),
    Fixed { name: String, model: Arc<Model<R>> },
}

impl<R: Real> MethodSource<R> {
    fn name(&self) -> String {
        match self {
            Self::Classic(kind) => kind.as_str().into(),
            Self::Fixed { name, .. } => name.clone(),
        }
    }
}

#[derive(Clone, Debug)]
pub struct CellFailure {
    pub method: String,
    pub indicator_id: String,
    pub query: QueryKind,
    pub error: String,
}

#[derive(Clone, Debug, Default)]
pub struct GridReport {
    pub rows: Vec<EvalReport>,
    pub failures: Vec<CellFailure>,
}

/// Stable per-cell seed so report rows reproduce standalone `measure` runs.
pub fn cell_seed(base: u64, method: &str, indicator: &str, kind: QueryKind) -> u64 {
    let mut h = 0xcbf2_9ce4_8422_2325u64; // FNV-1a
    for b in method
        .bytes()
        .chain([0])
        .chain(indicator.bytes())
        .chain([0])
        .chain(kind.as_str().bytes())
    {
        h ^= b as u64;
        h = h.wrapping_mul(0x0000_0100_0000_01b3);
    }
    mix(base, h)
}

pub struct GridReportSpec<'a, R: Real> {
    pub methods: &'a [MethodSource<R>],
    pub indicators: &'a [(String, GridIndicator)],
    pub kinds: &'a [QueryKind],
    pub n: u64,
    pub seed: u64,
    pub oracle_samples: usize,
    /// Queries per timing run; 0 skips the timing column.
    pub bench_queries: usize,
    pub bench_repeats: usize,
}

fn fit_classic<R: Real>(kind: MethodKind, grid: &GridIndicator) -> Result<Model<R>> {
    Ok(match kind {
        MethodKind::Aabb => Model::Aabb(fit_aabb(grid)?),
        MethodKind::Obox => Model::Obox(fit_obox(grid)?),
        MethodKind::Sphere => Model::Sphere(fit_sphere(grid)?),
        MethodKind::AaElli => Model::AaElli(fit_aaelli(grid)?),
        MethodKind::OElli => Model::OElli(fit_oelli(grid)?),
        MethodKind::Kdop => Model::Kdop(fit_kdop(grid, 4 * grid.dim())?),
        MethodKind::Bvh => Model::Bvh(build_bvh(grid, 1)?),
        other => {
            return Err(crate::Error::Invalid(format!(
                "method '{other}' needs a trained model file"
            )))
        }
    })
}

/// Evaluates every (method, indicator, query) cell; per-cell failures are
/// recorded, not fatal.
pub fn grid_report<R: Real>(spec: &GridReportSpec<R>) -> GridReport {
    let mut report = GridReport::default();
    for source in spec.methods {
        let method_name = source.name();
        for (indicator_id, grid) in spec.indicators {
            let model: Result<Arc<Model<R>>> = match source {
                MethodSource::Classic(kind) => fit_classic(*kind, grid).map(Arc::new),
                MethodSource::Fixed { model, .. } => Ok(model.clone()),
            };
            let oracle = QueryOracle::<R>::new(Arc::new(grid.clone()), spec.oracle_samples);
            for &kind in spec.kinds {
                let seed = cell_seed(spec.seed, &method_name, indicator_id, kind);
                let outcome = model.as_ref().map_err(|e| e.to_string()).and_then(|m| {
                    measure(Subject::Predictor(m.as_ref()), &oracle, kind, spec.n, seed)
                        .map_err(|e| e.to_string())
                        .map(|rep| (m.clone(), rep))
                });
                match outcome {
                    Ok((m, mut rep)) => {
                        rep.method = method_name.clone();
                        rep.indicator_id = indicator_id.clone();
                        if spec.bench_queries > 0 {
                            let queries = uniform_query_stream::<R>(
                                kind,
                                grid.dim(),
                                spec.bench_queries,
                                mix(seed, 0xbe9c),
                            );
                            rep.time = benchmark(m.as_ref(), &queries, spec.bench_repeats);
                        }
                        report.rows.push(rep);
                    }
                    Err(error) => report.failures.push(CellFailure {
                        method: method_name.clone(),
                        indicator_id: indicator_id.clone(),
                        query: kind,
                        error,
                    }),
                }
            }
        }
    }
    report
}

impl GridReport {
    /// `method,indicator,query,n,fp,fn,tp,tn,fp_rate,fn_rate,median_ns_per_query`
    pub fn to_csv(&self) -> String {
        let mut out = String::from(EvalReport::CSV_HEADER);
        out.push('\n');
        for row in &self.rows {
            out.push_str(&row.csv_row());
            out.push('\n');
        }
        out
    }

    /// Rank-plot data: per (method, query) the indicators sorted by
    /// ascending false-positive rate.
    pub fn rank_csv(&self) -> String {
        let mut out = String::from("method,query,rank,indicator,fp_rate\n");
        let mut keys: Vec<(String, QueryKind)> = Vec::new();
        for row in &self.rows {
            let key = (row.method.clone(), row.query);
            if !keys.contains(&key) {
                keys.push(key);
            }
        }
        for (method, query) in keys {
            let mut cells: Vec<&EvalReport> = self
                .rows
                .iter()
                .filter(|r| r.method == method && r.query == query)
                .collect();
            cells.sort_by(|a, b| a.fp_rate().partial_cmp(&b.fp_rate()).unwrap());
            for (rank, cell) in cells.iter().enumerate() {
                out.push_str(&format!(
                    "{},{},{},{},{}\n",
                    method,
                    query,
                    rank,
                    cell.indicator_id,
                    cell.fp_rate()
                ));
            }
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::indicator::ProceduralIndicator;

    fn grids() -> Vec<(String, GridIndicator)> {
        let disk = ProceduralIndicator::disk(&[0.5f64, 0.5], 0.3).unwrap();
        vec![(
            "disk16".into(),
            GridIndicator::rasterize(&disk, &[16, 16]).unwrap(),
        )]
    }

    #[test]
    fn two_methods_one_indicator_four_queries_gives_eight_rows() {
        let methods = [
            MethodSource::<f64>::Classic(MethodKind::Aabb),
            MethodSource::<f64>::Classic(MethodKind::Sphere),
        ];
        let report = grid_report(&GridReportSpec {
            methods: &methods,
            indicators: &grids(),
            kinds: &QueryKind::ALL,
            n: 2000,
            seed: 5,
            oracle_samples: 32,
            bench_queries: 0,
            bench_repeats: 0,
        });
        assert_eq!(report.rows.len(), 8);
        assert!(report.failures.is_empty());
        let csv = report.to_csv();
        assert_eq!(csv.lines().count(), 9);
        assert!(csv.starts_with("method,indicator,query,"));
    }

    #[test]
    fn rows_match_standalone_measure_with_the_same_seed() {
        let methods = [MethodSource::<f64>::Classic(MethodKind::Aabb)];
        let indicators = grids();
        let report = grid_report(&GridReportSpec {
            methods: &methods,
            indicators: &indicators,
            kinds: &[QueryKind::Point],
            n: 5000,
            seed: 31,
            oracle_samples: 32,
            bench_queries: 0,
            bench_repeats: 0,
        });
        let row = &report.rows[0];
        let oracle = QueryOracle::<f64>::new(Arc::new(indicators[0].1.clone()), 32);
        let aabb = fit_aabb::<f64>(&indicators[0].1).unwrap();
        let seed = cell_seed(31, "aabb", "disk16", QueryKind::Point);
        let solo = measure(
            Subject::Predictor(&aabb),
            &oracle,
            QueryKind::Point,
            5000,
            seed,
        )
        .unwrap();
        assert_eq!((row.tp, row.tn, row.fp, row.fn_count), (solo.tp, solo.tn, solo.fp, solo.fn_count));
    }

    #[test]
    fn rank_rows_are_sorted_ascending() {
        let disk_small = ProceduralIndicator::disk(&[0.5f64, 0.5], 0.15).unwrap();
        let disk_large = ProceduralIndicator::disk(&[0.5f64, 0.5], 0.4).unwrap();
        let indicators = vec![
            (
                "small".to_string(),
                GridIndicator::rasterize(&disk_small, &[16, 16]).unwrap(),
            ),
            (
                "large".to_string(),
                GridIndicator::rasterize(&disk_large, &[16, 16]).unwrap(),
            ),
        ];
        let methods = [MethodSource::<f64>::Classic(MethodKind::Sphere)];
        let report = grid_report(&GridReportSpec {
            methods: &methods,
            indicators: &indicators,
            kinds: &[QueryKind::Point],
            n: 3000,
            seed: 3,
            oracle_samples: 32,
            bench_queries: 0,
            bench_repeats: 0,
        });
        let rank = report.rank_csv();
        let rates: Vec<f64> = rank
            .lines()
            .skip(1)
            .map(|l| l.rsplit(',').next().unwrap().parse().unwrap())
            .collect();
        assert_eq!(rates.len(), 2);
        assert!(rates[0] <= rates[1]);
    }

    #[test]
    fn untrained_method_names_are_recorded_failures() {
        let methods = [MethodSource::<f64>::Classic(MethodKind::Nn)];
        let report = grid_report(&GridReportSpec {
            methods: &methods,
            indicators: &grids(),
            kinds: &[QueryKind::Point],
            n: 100,
            seed: 1,
            oracle_samples: 16,
            bench_queries: 0,
            bench_repeats: 0,
        });
        assert!(report.rows.is_empty());
        assert_eq!(report.failures.len(), 1);
    }
}
