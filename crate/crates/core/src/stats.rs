// SPDX-License-Identifier: MIT OR Apache-2.0

//! CUSUM contrast statistics over 1-based closed intervals.
//!
//! For an interval `[s, e]` with `n = e - s + 1` and a split `s <= b < e`,
//! the statistic is the inner product of `(X_s, ..., X_e)` with a two-level
//! contrast vector that sums to zero and has unit Euclidean norm. Its
//! absolute maximiser over `b` is the least-squares single change-point fit.

use serde::{Deserialize, Serialize};

use crate::error::{Result, WildsegError};

/// Observed series `X_1, ..., X_T`. Values are finite.
#[derive(Debug, Clone, PartialEq)]
pub struct TimeSeries {
    values: Vec<f64>,
}

impl TimeSeries {
    pub fn new(values: Vec<f64>) -> Result<Self> {
        if let Some(pos) = values.iter().position(|v| !v.is_finite()) {
            return Err(WildsegError::invalid_input(format!(
                "non-finite value at index {}",
                pos + 1
            )));
        }
        Ok(Self { values })
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Value at 1-based index `t`.
    pub fn at(&self, t: usize) -> f64 {
        self.values[t - 1]
    }

    /// Values on the closed 1-based interval.
    pub fn slice(&self, iv: Interval) -> &[f64] {
        &self.values[iv.start() - 1..iv.end()]
    }

    pub(crate) fn require_detectable(&self) -> Result<()> {
        if self.len() < 2 {
            return Err(WildsegError::invalid_input(format!(
                "series length must be >= 2; got {}",
                self.len()
            )));
        }
        Ok(())
    }

    pub fn into_inner(self) -> Vec<f64> {
        self.values
    }
}

impl TryFrom<Vec<f64>> for TimeSeries {
    type Error = WildsegError;

    fn try_from(values: Vec<f64>) -> Result<Self> {
        Self::new(values)
    }
}

/// Cumulative sums `S_0 = 0, S_t = X_1 + ... + X_t`.
///
/// Accumulated with Neumaier compensation so that `S_b - S_{s-1}` stays
/// accurate on long series.
#[derive(Debug, Clone)]
pub struct PrefixSums {
    sums: Vec<f64>,
}

impl PrefixSums {
    pub fn new(x: &TimeSeries) -> Self {
        Self::from_slice(x.values())
    }

    pub(crate) fn from_slice(values: &[f64]) -> Self {
        let mut sums = Vec::with_capacity(values.len() + 1);
        sums.push(0.0);
        let mut acc = 0.0_f64;
        let mut comp = 0.0_f64;
        for &v in values {
            let t = acc + v;
            if acc.abs() >= v.abs() {
                comp += (acc - t) + v;
            } else {
                comp += (v - t) + acc;
            }
            acc = t;
            sums.push(acc + comp);
        }
        Self { sums }
    }

    /// Series length `T`.
    pub fn len(&self) -> usize {
        self.sums.len() - 1
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// `S_t`, with `S_0 = 0`.
    pub fn cumulative(&self, t: usize) -> f64 {
        self.sums[t]
    }

    /// Sum of `X_a..=X_b` (1-based, inclusive).
    #[inline]
    pub fn range_sum(&self, a: usize, b: usize) -> f64 {
        self.sums[b] - self.sums[a - 1]
    }
}

impl From<&TimeSeries> for PrefixSums {
    fn from(x: &TimeSeries) -> Self {
        Self::new(x)
    }
}

/// Closed 1-based interval `[s, e]` with `s < e`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(into = "(usize, usize)", try_from = "(usize, usize)")]
pub struct Interval {
    s: usize,
    e: usize,
}

impl Interval {
    pub fn new(s: usize, e: usize) -> Result<Self> {
        if s < 1 || s >= e {
            return Err(WildsegError::precondition(format!(
                "interval requires 1 <= s < e; got ({s}, {e})"
            )));
        }
        Ok(Self { s, e })
    }

    /// Interval checked against a series of length `len`.
    pub fn within(s: usize, e: usize, len: usize) -> Result<Self> {
        let iv = Self::new(s, e)?;
        if e > len {
            return Err(WildsegError::precondition(format!(
                "interval ({s}, {e}) exceeds series length {len}"
            )));
        }
        Ok(iv)
    }

    pub(crate) fn new_unchecked(s: usize, e: usize) -> Self {
        debug_assert!(1 <= s && s < e);
        Self { s, e }
    }

    pub fn start(&self) -> usize {
        self.s
    }

    pub fn end(&self) -> usize {
        self.e
    }

    /// Number of points `e - s + 1`.
    pub fn len(&self) -> usize {
        self.e - self.s + 1
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn contains(&self, other: &Interval) -> bool {
        self.s <= other.s && other.e <= self.e
    }

    fn check_split(&self, b: usize) -> Result<()> {
        if b < self.s || b >= self.e {
            return Err(WildsegError::precondition(format!(
                "split {b} outside [{}, {})",
                self.s, self.e
            )));
        }
        Ok(())
    }
}

impl From<Interval> for (usize, usize) {
    fn from(iv: Interval) -> Self {
        (iv.s, iv.e)
    }
}

impl TryFrom<(usize, usize)> for Interval {
    type Error = WildsegError;

    fn try_from((s, e): (usize, usize)) -> Result<Self> {
        Self::new(s, e)
    }
}

/// Location and size of the largest absolute CUSUM on an interval.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CusumPeak {
    pub b: usize,
    pub magnitude: f64,
    pub signed_value: f64,
}

/// CUSUM value without bounds checks. `s <= b < e <= T` must hold.
#[inline]
pub(crate) fn cusum_unchecked(sums: &PrefixSums, s: usize, e: usize, b: usize) -> f64 {
    let n_left = (b - s + 1) as f64;
    let n_right = (e - b) as f64;
    let n = (e - s + 1) as f64;
    let left_mean = sums.range_sum(s, b) / n_left;
    let right_mean = sums.range_sum(b + 1, e) / n_right;
    (n_left * n_right / n).sqrt() * (left_mean - right_mean)
}

#[inline]
pub(crate) fn argmax_unchecked(sums: &PrefixSums, s: usize, e: usize) -> CusumPeak {
    let mut best = CusumPeak {
        b: s,
        magnitude: f64::NEG_INFINITY,
        signed_value: 0.0,
    };
    for b in s..e {
        let v = cusum_unchecked(sums, s, e, b);
        let m = v.abs();
        if m > best.magnitude {
            best = CusumPeak {
                b,
                magnitude: m,
                signed_value: v,
            };
        }
    }
    best
}

fn check_bounds(sums: &PrefixSums, iv: Interval) -> Result<()> {
    if iv.end() > sums.len() {
        return Err(WildsegError::precondition(format!(
            "interval ({}, {}) exceeds series length {}",
            iv.start(),
            iv.end(),
            sums.len()
        )));
    }
    Ok(())
}

/// CUSUM statistic of the data on `iv` split after `b`.
pub fn cusum(sums: &PrefixSums, iv: Interval, b: usize) -> Result<f64> {
    check_bounds(sums, iv)?;
    iv.check_split(b)?;
    Ok(cusum_unchecked(sums, iv.start(), iv.end(), b))
}

/// The contrast weights `psi` with `<psi, X_s..X_e>` equal to the CUSUM.
pub fn contrast_vector(iv: Interval, b: usize) -> Result<Vec<f64>> {
    iv.check_split(b)?;
    let n = iv.len() as f64;
    let n_left = (b - iv.start() + 1) as f64;
    let n_right = (iv.end() - b) as f64;
    let w_left = (n_right / (n * n_left)).sqrt();
    let w_right = -(n_left / (n * n_right)).sqrt();
    Ok((iv.start()..=iv.end())
        .map(|t| if t <= b { w_left } else { w_right })
        .collect())
}

/// Split maximising `|CUSUM|` on `iv`; the smallest `b` wins ties.
pub fn cusum_argmax(sums: &PrefixSums, iv: Interval) -> Result<CusumPeak> {
    check_bounds(sums, iv)?;
    Ok(argmax_unchecked(sums, iv.start(), iv.end()))
}

/// Brute-force single change-point least-squares fit on `iv`.
///
/// For every candidate split the two segment means and the residual sum of
/// squares are computed directly from the data. Returns the minimising split,
/// smallest on ties. Quadratic in the interval length; meant as a reference
/// for [`cusum_argmax`].
pub fn least_squares_one_cp_oracle(x: &TimeSeries, iv: Interval) -> Result<usize> {
    if iv.end() > x.len() {
        return Err(WildsegError::precondition(format!(
            "interval ({}, {}) exceeds series length {}",
            iv.start(),
            iv.end(),
            x.len()
        )));
    }
    let data = x.slice(iv);
    let mut best_b = iv.start();
    let mut best_rss = f64::INFINITY;
    for split in 1..data.len() {
        let (left, right) = data.split_at(split);
        let rss = segment_rss(left) + segment_rss(right);
        if rss < best_rss {
            best_rss = rss;
            best_b = iv.start() + split - 1;
        }
    }
    Ok(best_b)
}

fn segment_rss(values: &[f64]) -> f64 {
    let mean = values.iter().sum::<f64>() / values.len() as f64;
    values.iter().map(|v| (v - mean) * (v - mean)).sum()
}
