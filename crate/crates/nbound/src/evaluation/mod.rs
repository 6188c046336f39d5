//! Monte-Carlo false-positive/false-negative measurement, throughput
//! benchmarking, the break-even cost model, and report grids.

mod benchmark;
mod cost;
mod measure;
mod report;

pub use benchmark::{benchmark, benchmark_uniform, forward_facing_rays, uniform_query_stream};
pub use cost::{breakeven_ratio, verdict, CostModel, Verdict};
pub use measure::{measure, EvalReport, Subject, TimeStats};
pub use report::{cell_seed, grid_report, CellFailure, GridReport, GridReportSpec, MethodSource};
