//! Partition-based parallel sorting algorithms on a simulated BSP machine.
//!
//! The crate implements Histogram Sort with Sampling (HSS) together with the
//! classical baselines it is usually compared against: sample sort with
//! regular and random sampling, single-stage AMS sort with its scanning
//! splitter selection, HykSort-style per-interval sampling, and classical
//! histogram sort with domain-bisection probes. All of them run over a
//! deterministic simulated BSP machine ([`bsp::Machine`]) with `p` virtual
//! processors, so splitter quality, sample sizes, round counts, and
//! communication charges can be measured and compared reproducibly on a
//! single host.
//!
//! Modules:
//! - [`keyspace`]: input generation, duplicate tagging, ground-truth ranks.
//! - [`bsp`]: the simulated machine, collectives, and the cost ledger.
//! - [`partition`]: shared partition primitives (target ranges, histograms,
//!   balance metrics, exact-split adjustment, approximate ranks).
//! - [`hss`]: the HSS partitioner and full sort pipeline.
//! - [`baselines`]: the comparison partitioners and the line-algorithm
//!   analysis of HykSort sampling.
//! - [`driver`]: experiment orchestration, multi-stage sorting, cost
//!   predictions, and CSV emission for the `psbench` binary.
//!
//! See the crate examples (`cargo run --release -p hss-sort --example ...`)
//! for one runnable program per major capability.

pub mod baselines;
pub mod bsp;
pub mod driver;
pub mod hss;
pub mod keyspace;
pub mod partition;

pub use bsp::{CostReport, Machine};
pub use keyspace::{DistributedInput, DistributionKind, TaggedKey};
pub use partition::SplitterSet;
