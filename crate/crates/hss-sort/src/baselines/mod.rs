//! Comparison partitioners: sample sort (regular and random-block
//! sampling), single-stage AMS scanning, HykSort-style per-interval
//! sampling, classical histogram sort probe refinement, and the
//! line-algorithm analysis of one-sample interval shrinkage.

mod ams;
mod histsort;
mod hyksort;
mod line;
mod samplesort;

pub use ams::{
    ams_draw_sample, ams_partition, ams_partition_direct, ams_partition_into,
    ams_practical_sample_estimate, ams_sampling_prob, ams_scan, AmsLogBase, ScanResult,
};
pub use histsort::{histogramsort_classic_partition, HistSortError, ProbeSpace};
pub use hyksort::hyksort_partition;
pub use line::{line_cdf, line_rounds_for_tail, line_rounds_until, line_tail_estimate};
pub use samplesort::{regular_sample, samplesort_splitters, SampleMethod};
