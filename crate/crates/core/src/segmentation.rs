// SPDX-License-Identifier: MIT OR Apache-2.0

//! Binary segmentation and wild binary segmentation.
//!
//! Both algorithms recurse over scopes `[s, e]`: pick the largest absolute
//! CUSUM among the candidate intervals contained in the scope, keep it if it
//! exceeds the threshold, split the scope after the chosen location and
//! recurse on both halves. BS uses only the scope itself as candidate; WBS
//! uses a fixed set of randomly drawn intervals, optionally together with
//! the scope itself (augmentation).
//!
//! A run records every detection as a [`PathNode`] carrying its survival
//! threshold, the largest threshold at which the node would still be
//! detected. Running once at threshold zero therefore yields the change-point
//! sets for every threshold through [`SolutionPath::apply_threshold`].

use std::fmt;
use std::str::FromStr;

use rand::Rng as _;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Result, WildsegError};
use crate::seed::rng_from_seed;
use crate::signals::PiecewiseConstantSignal;
use crate::stats::{argmax_unchecked, CusumPeak, Interval, PrefixSums, TimeSeries};

/// Below this many intervals the CUSUM scan runs on the calling thread.
const PARALLEL_SCAN_MIN: usize = 256;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    Bs,
    Wbs,
}

impl Method {
    pub fn name(self) -> &'static str {
        match self {
            Method::Bs => "bs",
            Method::Wbs => "wbs",
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Method {
    type Err = WildsegError;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "bs" => Ok(Method::Bs),
            "wbs" => Ok(Method::Wbs),
            other => Err(WildsegError::invalid_input(format!(
                "unknown method '{other}' (expected bs or wbs)"
            ))),
        }
    }
}

/// Configuration of a single detection run.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DetectionParams {
    pub method: Method,
    /// Number of random intervals (WBS only).
    pub m: usize,
    /// Also consider the whole current scope as a candidate interval.
    pub augment: bool,
    pub seed: u64,
    pub zeta: f64,
}

impl Default for DetectionParams {
    fn default() -> Self {
        Self {
            method: Method::Wbs,
            m: 5000,
            augment: true,
            seed: 0,
            zeta: 0.0,
        }
    }
}

impl DetectionParams {
    pub fn validate(&self) -> Result<()> {
        if self.zeta.is_nan() || self.zeta < 0.0 {
            return Err(WildsegError::invalid_input(format!(
                "threshold must be >= 0; got {}",
                self.zeta
            )));
        }
        if self.method == Method::Wbs && self.m == 0 && !self.augment {
            return Err(WildsegError::invalid_input(
                "WBS with M = 0 requires augmentation, otherwise no candidate interval exists",
            ));
        }
        Ok(())
    }
}

/// Random intervals `[s_m, e_m]`, `m = 1..=M`, over a series of length `T`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct IntervalSet {
    intervals: Vec<Interval>,
    seed: u64,
    #[serde(rename = "T")]
    len: usize,
}

impl IntervalSet {
    pub fn intervals(&self) -> &[Interval] {
        &self.intervals
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    /// Length of the series the intervals were drawn for.
    pub fn series_len(&self) -> usize {
        self.len
    }

    pub fn len(&self) -> usize {
        self.intervals.len()
    }

    pub fn is_empty(&self) -> bool {
        self.intervals.is_empty()
    }
}

/// Draws `m` intervals with both endpoints uniform on `1..=len`.
///
/// Endpoints are swapped into order and the pair is redrawn when they
/// coincide, so the result is uniform over `{(s, e) : s < e}` and has
/// exactly `m` members.
pub fn draw_intervals(len: usize, m: usize, seed: u64) -> Result<IntervalSet> {
    if len < 2 {
        return Err(WildsegError::invalid_input(format!(
            "need T >= 2 to draw intervals; got {len}"
        )));
    }
    let mut rng = rng_from_seed(seed);
    let mut intervals = Vec::with_capacity(m);
    while intervals.len() < m {
        let a = rng.random_range(1..=len);
        let b = rng.random_range(1..=len);
        if a == b {
            continue;
        }
        intervals.push(Interval::new_unchecked(a.min(b), a.max(b)));
    }
    Ok(IntervalSet {
        intervals,
        seed,
        len,
    })
}

/// Number of draws sufficient, with high probability, for every pair of
/// neighbouring change-points at spacing `delta` to be isolated by some
/// drawn interval: `ceil(9 T^2 / delta^2 * ln(T^2 / delta))`.
pub fn recommended_m(len: usize, delta: usize) -> Result<usize> {
    if delta < 2 || delta > len {
        return Err(WildsegError::invalid_input(format!(
            "spacing must satisfy 2 <= delta <= T; got delta = {delta}, T = {len}"
        )));
    }
    let t = len as f64;
    let d = delta as f64;
    Ok((9.0 * t * t / (d * d) * (t * t / d).ln()).ceil() as usize)
}

/// Sorted, distinct change-point locations in `1..=T-1`.
#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(transparent)]
pub struct ChangePointSet {
    locations: Vec<usize>,
}

impl ChangePointSet {
    pub fn new(locations: Vec<usize>, len: usize) -> Result<Self> {
        let mut prev = 0;
        for &loc in &locations {
            if loc <= prev || loc >= len {
                return Err(WildsegError::invalid_input(format!(
                    "change-points must be strictly increasing within [1, {}]",
                    len.saturating_sub(1)
                )));
            }
            prev = loc;
        }
        Ok(Self { locations })
    }

    pub fn empty() -> Self {
        Self::default()
    }

    fn from_unsorted(mut locations: Vec<usize>) -> Self {
        locations.sort_unstable();
        locations.dedup();
        Self { locations }
    }

    pub fn as_slice(&self) -> &[usize] {
        &self.locations
    }

    pub fn len(&self) -> usize {
        self.locations.len()
    }

    pub fn is_empty(&self) -> bool {
        self.locations.is_empty()
    }

    pub fn contains(&self, loc: usize) -> bool {
        self.locations.binary_search(&loc).is_ok()
    }

    pub fn is_subset_of(&self, other: &ChangePointSet) -> bool {
        self.locations.iter().all(|&l| other.contains(l))
    }

    pub fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        self.locations.iter().copied()
    }

    pub fn into_vec(self) -> Vec<usize> {
        self.locations
    }

    fn check_against(&self, len: usize) -> Result<()> {
        match self.locations.last() {
            Some(&last) if last >= len => Err(WildsegError::invalid_input(format!(
                "change-point {last} out of range for series of length {len}"
            ))),
            _ => Ok(()),
        }
    }
}

/// One detection on the solution path.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PathNode {
    pub location: usize,
    pub magnitude: f64,
    pub generating_interval: Interval,
    pub scope: Interval,
    /// `min(magnitude, parent's survival threshold)`.
    pub survival_threshold: f64,
    /// Index into [`SolutionPath::nodes`] of the node whose split created
    /// this node's scope.
    pub parent: Option<usize>,
    /// Position in detection order (equal to the node's index).
    pub order: usize,
}

/// What produced a path.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PathFingerprint {
    pub method: Method,
    pub m: usize,
    pub seed: u64,
    pub augment: bool,
    /// Threshold the recursion was run at; thresholds below it cannot
    /// recover nodes that were never visited.
    pub zeta: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolutionPath {
    nodes: Vec<PathNode>,
    #[serde(rename = "T")]
    len: usize,
    fingerprint: PathFingerprint,
}

/// Threshold range over which a change-point is detected.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ThresholdMapRow {
    pub location: usize,
    pub zeta_low: f64,
    pub zeta_high: f64,
}

impl SolutionPath {
    pub fn nodes(&self) -> &[PathNode] {
        &self.nodes
    }

    pub fn series_len(&self) -> usize {
        self.len
    }

    pub fn fingerprint(&self) -> &PathFingerprint {
        &self.fingerprint
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// Change-points still detected at threshold `zeta`.
    pub fn apply_threshold(&self, zeta: f64) -> ChangePointSet {
        ChangePointSet::from_unsorted(
            self.nodes
                .iter()
                .filter(|n| n.survival_threshold > zeta)
                .map(|n| n.location)
                .collect(),
        )
    }

    /// Node indices by decreasing survival threshold, detection order on ties.
    pub fn ranked(&self) -> Vec<usize> {
        let mut idx: Vec<usize> = (0..self.nodes.len()).collect();
        idx.sort_by(|&a, &b| {
            self.nodes[b]
                .survival_threshold
                .total_cmp(&self.nodes[a].survival_threshold)
                .then(self.nodes[a].order.cmp(&self.nodes[b].order))
        });
        idx
    }

    /// Nested models `C_0 = {}, C_1, ..., C_K`; `C_k` holds the `k` highest
    /// ranked nodes. Truncated at the path length.
    pub fn prefixes(&self, max_k: usize) -> Vec<ChangePointSet> {
        let ranked = self.ranked();
        let top = max_k.min(ranked.len());
        let mut out = Vec::with_capacity(top + 1);
        out.push(ChangePointSet::empty());
        let mut current = Vec::with_capacity(top);
        for &i in &ranked[..top] {
            current.push(self.nodes[i].location);
            out.push(ChangePointSet::from_unsorted(current.clone()));
        }
        out
    }

    /// Vertical-line data of a time-threshold plot, sorted by location.
    pub fn time_threshold_map(&self, zeta_min: f64, zeta_max: f64) -> Result<Vec<ThresholdMapRow>> {
        if !(zeta_min >= 0.0 && zeta_min < zeta_max) {
            return Err(WildsegError::invalid_input(format!(
                "threshold range must satisfy 0 <= min < max; got [{zeta_min}, {zeta_max}]"
            )));
        }
        let mut rows: Vec<ThresholdMapRow> = self
            .nodes
            .iter()
            .filter(|n| n.survival_threshold > zeta_min)
            .map(|n| ThresholdMapRow {
                location: n.location,
                zeta_low: zeta_min,
                zeta_high: n.survival_threshold.min(zeta_max),
            })
            .collect();
        rows.sort_by_key(|r| r.location);
        Ok(rows)
    }
}

/// A sampled interval together with its CUSUM maximiser.
#[derive(Debug, Clone, Copy)]
struct Candidate {
    interval: Interval,
    peak: CusumPeak,
}

struct Scope {
    interval: Interval,
    parent: Option<usize>,
    parent_survival: f64,
    /// Indices into the ranked candidate list, all contained in `interval`,
    /// in rank order.
    candidates: Vec<u32>,
}

/// Shared recursion for BS and WBS.
///
/// `ranked` holds the sampled candidates by decreasing magnitude with the
/// original draw order kept among equals, so the first candidate contained
/// in a scope is the winner with the smallest index `m`. The augmented
/// scope candidate (index 0) wins ties against sampled ones.
fn grow_path(
    sums: &PrefixSums,
    ranked: &[Candidate],
    augment: bool,
    zeta: f64,
    fingerprint: PathFingerprint,
) -> SolutionPath {
    let len = sums.len();
    let mut nodes: Vec<PathNode> = Vec::new();
    let mut stack = vec![Scope {
        interval: Interval::new_unchecked(1, len),
        parent: None,
        parent_survival: f64::INFINITY,
        candidates: (0..ranked.len() as u32).collect(),
    }];

    while let Some(scope) = stack.pop() {
        let (s, e) = (scope.interval.start(), scope.interval.end());
        let mut best: Option<(Interval, CusumPeak)> = None;
        if augment {
            best = Some((scope.interval, argmax_unchecked(sums, s, e)));
        }
        if let Some(&first) = scope.candidates.first() {
            let c = ranked[first as usize];
            if best.is_none_or(|(_, p)| c.peak.magnitude > p.magnitude) {
                best = Some((c.interval, c.peak));
            }
        }
        let Some((generating_interval, peak)) = best else {
            continue;
        };
        if peak.magnitude <= zeta {
            continue;
        }

        let order = nodes.len();
        let survival = peak.magnitude.min(scope.parent_survival);
        nodes.push(PathNode {
            location: peak.b,
            magnitude: peak.magnitude,
            generating_interval,
            scope: scope.interval,
            survival_threshold: survival,
            parent: scope.parent,
            order,
        });

        let b = peak.b;
        let (left, right): (Vec<u32>, Vec<u32>) = {
            let mut left = Vec::new();
            let mut right = Vec::new();
            for &i in &scope.candidates {
                let iv = ranked[i as usize].interval;
                if iv.end() <= b {
                    left.push(i);
                } else if iv.start() > b {
                    right.push(i);
                }
            }
            (left, right)
        };
        // Right pushed first so the left half is explored first.
        if b + 1 < e {
            stack.push(Scope {
                interval: Interval::new_unchecked(b + 1, e),
                parent: Some(order),
                parent_survival: survival,
                candidates: right,
            });
        }
        if b > s {
            stack.push(Scope {
                interval: Interval::new_unchecked(s, b),
                parent: Some(order),
                parent_survival: survival,
                candidates: left,
            });
        }
    }

    SolutionPath {
        nodes,
        len,
        fingerprint,
    }
}

/// Standard binary segmentation at threshold `zeta`.
pub fn binseg(x: &TimeSeries, zeta: f64) -> Result<SolutionPath> {
    x.require_detectable()?;
    let params = DetectionParams {
        method: Method::Bs,
        m: 0,
        augment: true,
        seed: 0,
        zeta,
    };
    params.validate()?;
    let sums = PrefixSums::new(x);
    Ok(grow_path(
        &sums,
        &[],
        true,
        zeta,
        PathFingerprint {
            method: Method::Bs,
            m: 0,
            seed: 0,
            augment: true,
            zeta,
        },
    ))
}

/// Wild binary segmentation over a given interval set at `params.zeta`.
///
/// `params.method`, `params.m` and `params.seed` are not consulted for the
/// computation; the fingerprint records the interval set actually used.
pub fn wbs(
    x: &TimeSeries,
    params: &DetectionParams,
    intervals: &IntervalSet,
) -> Result<SolutionPath> {
    x.require_detectable()?;
    params.validate()?;
    if intervals.series_len() != x.len() {
        return Err(WildsegError::invalid_input(format!(
            "intervals drawn for T = {} but series has length {}",
            intervals.series_len(),
            x.len()
        )));
    }
    if intervals.is_empty() && !params.augment {
        return Err(WildsegError::invalid_input(
            "WBS with no intervals requires augmentation",
        ));
    }
    let sums = PrefixSums::new(x);
    let scan = |iv: &Interval| Candidate {
        interval: *iv,
        peak: argmax_unchecked(&sums, iv.start(), iv.end()),
    };
    let mut ranked: Vec<Candidate> = if intervals.len() >= PARALLEL_SCAN_MIN {
        intervals.intervals().par_iter().map(scan).collect()
    } else {
        intervals.intervals().iter().map(scan).collect()
    };
    // Stable: equal magnitudes keep draw order.
    ranked.sort_by(|a, b| b.peak.magnitude.total_cmp(&a.peak.magnitude));

    Ok(grow_path(
        &sums,
        &ranked,
        params.augment,
        params.zeta,
        PathFingerprint {
            method: Method::Wbs,
            m: intervals.len(),
            seed: intervals.seed(),
            augment: params.augment,
            zeta: params.zeta,
        },
    ))
}

/// Runs the configured method, drawing intervals from `params.seed` for WBS.
pub fn detect(x: &TimeSeries, params: &DetectionParams) -> Result<SolutionPath> {
    params.validate()?;
    match params.method {
        Method::Bs => binseg(x, params.zeta),
        Method::Wbs => {
            x.require_detectable()?;
            let intervals = draw_intervals(x.len(), params.m, params.seed)?;
            wbs(x, params, &intervals)
        }
    }
}

/// Result of [`refine_locations`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RefinedLocations {
    pub change_points: ChangePointSet,
    /// Refined locations produced by more than one input location.
    pub collisions: Vec<usize>,
}

/// Re-estimates each location by maximising the CUSUM between the
/// midpoints of its two neighbouring segments.
pub fn refine_locations(x: &TimeSeries, cps: &ChangePointSet) -> Result<RefinedLocations> {
    x.require_detectable()?;
    cps.check_against(x.len())?;
    let len = x.len();
    let sums = PrefixSums::new(x);
    let bounds: Vec<usize> = std::iter::once(0)
        .chain(cps.iter())
        .chain(std::iter::once(len))
        .collect();
    let mut refined: Vec<usize> = bounds
        .windows(3)
        .map(|w| {
            let s = ((w[0] + 1 + w[1]) / 2).max(1);
            let e = ((w[1] + 1 + w[2]) / 2).min(len);
            argmax_unchecked(&sums, s, e).b
        })
        .collect();
    refined.sort_unstable();
    let mut collisions: Vec<usize> = refined
        .windows(2)
        .filter(|w| w[0] == w[1])
        .map(|w| w[0])
        .collect();
    collisions.dedup();
    Ok(RefinedLocations {
        change_points: ChangePointSet::from_unsorted(refined),
        collisions,
    })
}

/// Piecewise-constant least-squares fit: segment means between change-points.
pub fn fit_means(x: &TimeSeries, cps: &ChangePointSet) -> Result<PiecewiseConstantSignal> {
    if x.is_empty() {
        return Err(WildsegError::invalid_input("empty series"));
    }
    cps.check_against(x.len())?;
    let mut start = 1;
    let mut levels = Vec::with_capacity(cps.len() + 1);
    for end in cps.iter().chain(std::iter::once(x.len())) {
        // Shifting by the first value makes a constant segment exact.
        let seg = &x.values()[start - 1..end];
        let pivot = seg[0];
        let shift: f64 = seg.iter().map(|v| v - pivot).sum();
        levels.push(pivot + shift / seg.len() as f64);
        start = end + 1;
    }
    Ok(PiecewiseConstantSignal::fitted(
        x.len(),
        cps.as_slice().to_vec(),
        levels,
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::signals::{add_noise, test_signal, TestSignal};
    use proptest::prelude::*;

    fn ts(v: &[f64]) -> TimeSeries {
        TimeSeries::new(v.to_vec()).unwrap()
    }

    fn wbs_params(zeta: f64, m: usize, augment: bool, seed: u64) -> DetectionParams {
        DetectionParams {
            method: Method::Wbs,
            m,
            augment,
            seed,
            zeta,
        }
    }

    /// Direct recursive transcription of the WBS pseudocode, scanning the
    /// whole interval list per scope. Used to cross-check the ranked engine.
    fn naive_wbs(x: &TimeSeries, intervals: &[Interval], augment: bool, zeta: f64) -> Vec<usize> {
        fn rec(
            sums: &PrefixSums,
            intervals: &[Interval],
            augment: bool,
            zeta: f64,
            s: usize,
            e: usize,
            out: &mut Vec<usize>,
        ) {
            if e <= s {
                return;
            }
            let mut best: Option<CusumPeak> = None;
            if augment {
                best = Some(argmax_unchecked(sums, s, e));
            }
            for iv in intervals {
                if iv.start() >= s && iv.end() <= e {
                    let p = argmax_unchecked(sums, iv.start(), iv.end());
                    if best.is_none_or(|b| p.magnitude > b.magnitude) {
                        best = Some(p);
                    }
                }
            }
            if let Some(p) = best {
                if p.magnitude > zeta {
                    out.push(p.b);
                    rec(sums, intervals, augment, zeta, s, p.b, out);
                    rec(sums, intervals, augment, zeta, p.b + 1, e, out);
                }
            }
        }
        let sums = PrefixSums::new(x);
        let mut out = Vec::new();
        rec(&sums, intervals, augment, zeta, 1, x.len(), &mut out);
        out.sort_unstable();
        out
    }

    #[test]
    fn draw_intervals_trivial_and_deterministic() {
        let set = draw_intervals(2, 3, 99).unwrap();
        assert_eq!(set.len(), 3);
        assert!(set
            .intervals()
            .iter()
            .all(|iv| (iv.start(), iv.end()) == (1, 2)));

        let a = draw_intervals(100, 5000, 7).unwrap();
        assert_eq!(a, draw_intervals(100, 5000, 7).unwrap());
        assert_ne!(a, draw_intervals(100, 5000, 8).unwrap());
        assert!(a
            .intervals()
            .iter()
            .all(|iv| iv.start() < iv.end() && iv.end() <= 100));
        assert!(draw_intervals(1, 3, 0).is_err());
        assert!(draw_intervals(10, 0, 0).unwrap().is_empty());
    }

    #[test]
    fn recommended_m_values() {
        assert_eq!(recommended_m(1000, 1000).unwrap(), 63);
        assert_eq!(recommended_m(1000, 100).unwrap(), 8290);
        assert!(recommended_m(1000, 1).is_err());
        assert!(recommended_m(1000, 1001).is_err());
        // delta = T grows like 9 ln T
        let m = recommended_m(100_000, 100_000).unwrap();
        assert_eq!(m, (9.0 * 1e5f64.ln()).ceil() as usize);
    }

    #[test]
    fn binseg_single_step() {
        let path = binseg(&ts(&[0.0, 0.0, 0.0, 1.0, 1.0, 1.0]), 0.5).unwrap();
        assert_eq!(path.apply_threshold(0.5).as_slice(), &[3]);
        assert_eq!(path.len(), 1);
        let node = path.nodes()[0];
        assert!((node.magnitude - 3.0 / 6f64.sqrt()).abs() < 1e-15);
        assert_eq!(node.survival_threshold, node.magnitude);
        assert_eq!(node.parent, None);
    }

    #[test]
    fn constant_input_yields_nothing() {
        let x = ts(&[3.0; 40]);
        assert!(binseg(&x, 1e-9).unwrap().is_empty());
        let iv = draw_intervals(40, 200, 1).unwrap();
        assert!(wbs(&x, &wbs_params(1e-9, 200, true, 1), &iv)
            .unwrap()
            .is_empty());
        assert!(wbs(&x, &wbs_params(1e-9, 200, false, 1), &iv)
            .unwrap()
            .is_empty());
    }

    #[test]
    fn binseg_recovers_noiseless_blocks() {
        let (blocks, _) = test_signal(TestSignal::Blocks);
        let x = TimeSeries::new(blocks.values()).unwrap();
        let path = binseg(&x, 1e-6).unwrap();
        assert_eq!(
            path.apply_threshold(1e-6).as_slice(),
            blocks.change_points()
        );
    }

    #[test]
    fn wbs_recovers_noiseless_teeth() {
        let (teeth, _) = test_signal(TestSignal::Teeth10);
        let x = TimeSeries::new(teeth.values()).unwrap();
        let params = wbs_params(0.2, 5000, true, 3);
        let path = detect(&x, &params).unwrap();
        assert_eq!(path.apply_threshold(0.2).as_slice(), teeth.change_points());
    }

    #[test]
    fn wbs_rejects_inconsistent_inputs() {
        let x = ts(&[0.0, 1.0, 0.0, 1.0]);
        let iv = draw_intervals(5, 10, 0).unwrap();
        assert!(wbs(&x, &wbs_params(0.0, 10, true, 0), &iv).is_err());
        let empty = draw_intervals(4, 0, 0).unwrap();
        assert!(wbs(&x, &wbs_params(0.0, 0, false, 0), &empty).is_err());
        assert!(detect(&ts(&[1.0]), &DetectionParams::default()).is_err());
        assert!(binseg(&x, -1.0).is_err());
        assert!(binseg(&x, f64::NAN).is_err());
    }

    #[test]
    fn ranked_engine_matches_naive_recursion() {
        for seed in 0..40u64 {
            let (sig, _) = test_signal(TestSignal::Teeth10);
            let x = add_noise(&sig.values(), 0.4, seed).unwrap();
            let iv = draw_intervals(x.len(), 300, seed + 1000).unwrap();
            for augment in [true, false] {
                for zeta in [0.0, 0.5, 1.0, 2.0] {
                    let fast = wbs(&x, &wbs_params(zeta, 300, augment, 0), &iv).unwrap();
                    let slow = naive_wbs(&x, iv.intervals(), augment, zeta);
                    assert_eq!(fast.apply_threshold(zeta).into_vec(), slow);
                }
            }
        }
    }

    #[test]
    fn node_invariants_hold() {
        let (sig, _) = test_signal(TestSignal::Mix);
        let x = add_noise(&sig.values(), 4.0, 5).unwrap();
        let path = detect(&x, &wbs_params(0.0, 1000, true, 5)).unwrap();
        let mut locs: Vec<usize> = path.nodes().iter().map(|n| n.location).collect();
        locs.sort_unstable();
        locs.dedup();
        assert_eq!(locs.len(), path.len());
        for (i, n) in path.nodes().iter().enumerate() {
            assert_eq!(n.order, i);
            assert!(n.scope.start() <= n.location && n.location < n.scope.end());
            assert!(n.scope.contains(&n.generating_interval));
            assert!(n.survival_threshold <= n.magnitude);
            let parent_survival = n
                .parent
                .map_or(f64::INFINITY, |p| path.nodes()[p].survival_threshold);
            assert_eq!(n.survival_threshold, n.magnitude.min(parent_survival));
            if let Some(p) = n.parent {
                let parent = path.nodes()[p];
                assert!(p < i);
                assert!(parent.scope.contains(&n.scope));
                let left =
                    n.scope.end() == parent.location && n.scope.start() == parent.scope.start();
                let right =
                    n.scope.start() == parent.location + 1 && n.scope.end() == parent.scope.end();
                assert!(left || right);
            }
        }
    }

    #[test]
    fn prefixes_follow_survival_order() {
        let mk = |location, survival, order| PathNode {
            location,
            magnitude: survival,
            generating_interval: Interval::new(1, 100).unwrap(),
            scope: Interval::new(1, 100).unwrap(),
            survival_threshold: survival,
            parent: None,
            order,
        };
        let path = SolutionPath {
            nodes: vec![mk(40, 5.0, 0), mk(10, 3.0, 1), mk(70, 1.0, 2)],
            len: 100,
            fingerprint: PathFingerprint {
                method: Method::Wbs,
                m: 0,
                seed: 0,
                augment: true,
                zeta: 0.0,
            },
        };
        let p = path.prefixes(2);
        assert_eq!(p.len(), 3);
        assert!(p[0].is_empty());
        assert_eq!(p[1].as_slice(), &[40]);
        assert_eq!(p[2].as_slice(), &[10, 40]);
        assert_eq!(path.prefixes(0), vec![ChangePointSet::empty()]);
        assert_eq!(path.prefixes(10).len(), 4);
        assert_eq!(path.prefixes(3)[2], path.apply_threshold(2.0));

        assert!(path.apply_threshold(f64::INFINITY).is_empty());
        assert_eq!(path.apply_threshold(0.0).as_slice(), &[10, 40, 70]);

        let map = path.time_threshold_map(0.0, 4.0).unwrap();
        assert_eq!(map.len(), 3);
        assert_eq!(
            map[0],
            ThresholdMapRow {
                location: 10,
                zeta_low: 0.0,
                zeta_high: 3.0
            }
        );
        assert_eq!(map[1].zeta_high, 4.0);
        assert!(path.time_threshold_map(2.0, 1.0).is_err());
        assert_eq!(path.time_threshold_map(3.5, 5.0).unwrap().len(), 1);
    }

    #[test]
    fn empty_path_has_empty_map() {
        let path = binseg(&ts(&[1.0; 10]), 0.0).unwrap();
        assert!(path.time_threshold_map(0.0, 5.0).unwrap().is_empty());
        assert_eq!(path.prefixes(5), vec![ChangePointSet::empty()]);
    }

    #[test]
    fn refine_examples() {
        let x = ts(&[1.0; 30]);
        let r = refine_locations(&x, &ChangePointSet::empty()).unwrap();
        assert!(r.change_points.is_empty() && r.collisions.is_empty());

        let mut step = vec![0.0; 50];
        step.extend(vec![2.0; 50]);
        let x = ts(&step);
        let cps = ChangePointSet::new(vec![48], 100).unwrap();
        let r = refine_locations(&x, &cps).unwrap();
        assert_eq!(r.change_points.as_slice(), &[50]);
    }

    #[test]
    fn refinement_fixes_exact_noiseless_estimates() {
        for name in TestSignal::ALL {
            let (sig, _) = test_signal(name);
            let x = TimeSeries::new(sig.values()).unwrap();
            let cps = ChangePointSet::new(sig.change_points().to_vec(), sig.len()).unwrap();
            let r = refine_locations(&x, &cps).unwrap();
            assert_eq!(r.change_points, cps, "{name}");
        }
    }

    #[test]
    fn fit_means_examples() {
        let x = ts(&[0.0, 0.0, 2.0, 2.0]);
        let f = fit_means(&x, &ChangePointSet::new(vec![2], 4).unwrap()).unwrap();
        assert_eq!(f.levels(), &[0.0, 2.0]);
        let f = fit_means(&x, &ChangePointSet::empty()).unwrap();
        assert_eq!(f.levels(), &[1.0]);
        assert_eq!(f.values(), vec![1.0; 4]);
        assert!(fit_means(&x, &ChangePointSet::new(vec![4], 5).unwrap()).is_err());
    }

    #[test]
    fn change_point_set_validation() {
        assert!(ChangePointSet::new(vec![3, 2], 10).is_err());
        assert!(ChangePointSet::new(vec![0], 10).is_err());
        assert!(ChangePointSet::new(vec![10], 10).is_err());
        let c = ChangePointSet::new(vec![2, 5], 10).unwrap();
        assert!(c.contains(5) && !c.contains(4));
        assert_eq!(serde_json::to_string(&c).unwrap(), "[2,5]");
    }

    #[test]
    fn identical_inputs_give_identical_paths() {
        let (sig, sigma) = test_signal(TestSignal::Fms);
        let x = add_noise(&sig.values(), sigma, 12).unwrap();
        let params = wbs_params(0.0, 2000, true, 77);
        assert_eq!(detect(&x, &params).unwrap(), detect(&x, &params).unwrap());
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        #[test]
        fn threshold_sets_are_nested(seed in 0u64..10_000, z1 in 0.0f64..4.0, z2 in 0.0f64..4.0) {
            let (sig, sigma) = test_signal(TestSignal::Teeth10);
            let x = add_noise(&sig.values(), sigma, seed).unwrap();
            let path = detect(&x, &wbs_params(0.0, 500, true, seed)).unwrap();
            let (lo, hi) = if z1 < z2 { (z1, z2) } else { (z2, z1) };
            prop_assert!(path.apply_threshold(hi).is_subset_of(&path.apply_threshold(lo)));
        }

        #[test]
        fn refined_locations_stay_strictly_increasing(seed in 0u64..10_000, k in 1usize..12) {
            let (sig, sigma) = test_signal(TestSignal::Mix);
            let x = add_noise(&sig.values(), sigma, seed).unwrap();
            let path = detect(&x, &wbs_params(0.0, 300, true, seed)).unwrap();
            let cps = path.prefixes(k).pop().unwrap();
            let r = refine_locations(&x, &cps).unwrap();
            prop_assert!(r.collisions.is_empty());
            prop_assert_eq!(r.change_points.len(), cps.len());
        }

        #[test]
        fn locations_are_affine_invariant(seed in 0u64..10_000, a in 0.5f64..20.0, c in -5.0f64..5.0) {
            let (sig, sigma) = test_signal(TestSignal::Fms);
            let x = add_noise(&sig.values(), sigma, seed).unwrap();
            let y = TimeSeries::new(x.values().iter().map(|v| a * v + c).collect()).unwrap();
            let zeta = 0.3 * (2.0 * (x.len() as f64).ln()).sqrt();
            let px = detect(&x, &wbs_params(zeta, 500, true, seed)).unwrap();
            let py = detect(&y, &wbs_params(a * zeta, 500, true, seed)).unwrap();
            prop_assert_eq!(px.apply_threshold(zeta), py.apply_threshold(a * zeta));
        }
    }
}
