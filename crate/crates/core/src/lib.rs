// SPDX-License-Identifier: MIT OR Apache-2.0

//! Wild Binary Segmentation (WBS) and standard Binary Segmentation (BS) for
//! multiple change-point detection in piecewise-constant signals with
//! i.i.d. Gaussian noise.
//!
//! All indices exposed by this crate are 1-based. A change-point at `b`
//! means the left segment ends at `b` and the right one starts at `b + 1`.
//!
//! The main entry points are [`segmentation::binseg`], [`segmentation::wbs`]
//! and [`selection::ssic_select`]; [`harness::run_benchmark`] drives the
//! Monte-Carlo comparison of methods on the bundled test signals.

#![forbid(unsafe_code)]

pub mod error;
pub mod harness;
pub mod pipeline;
pub mod seed;
pub mod segmentation;
pub mod selection;
pub mod signals;
pub mod stats;

pub use error::{Result, WildsegError};
pub use harness::{mse, run_benchmark, BenchmarkConfig, BenchmarkReport, CellReport, ModelSpec};
pub use pipeline::{run_detection, Detection, MethodSpec, StoppingRule};
pub use segmentation::{
    binseg, detect, draw_intervals, fit_means, recommended_m, refine_locations, wbs,
    ChangePointSet, DetectionParams, IntervalSet, Method, PathNode, RefinedLocations, SolutionPath,
    ThresholdMapRow,
};
pub use selection::{
    default_threshold, mad_sigma, residual_variance, residual_variance_drop, ssic_select,
    ModelScore, SsicParams, SsicSelection, ThresholdSpec,
};
pub use signals::{
    add_noise, linear_trend_signal, motivating_signal, random_signal, test_signal,
    PiecewiseConstantSignal, SimulationConfig, TestSignal, TrendPiece, TrendSignal,
};
pub use stats::{
    contrast_vector, cusum, cusum_argmax, least_squares_one_cp_oracle, CusumPeak, Interval,
    PrefixSums, TimeSeries,
};
