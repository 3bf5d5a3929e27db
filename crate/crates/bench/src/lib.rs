// SPDX-License-Identifier: MIT OR Apache-2.0

//! Shared inputs for the criterion benchmarks.

use wildseg_core::{add_noise, test_signal, TestSignal, TimeSeries};

/// Noisy blocks signal truncated or tiled to length `len`.
pub fn blocks_series(len: usize, seed: u64) -> TimeSeries {
    let (blocks, sigma) = test_signal(TestSignal::Blocks);
    let base = blocks.values();
    let f: Vec<f64> = base.iter().copied().cycle().take(len).collect();
    add_noise(&f, sigma, seed).expect("finite signal")
}
