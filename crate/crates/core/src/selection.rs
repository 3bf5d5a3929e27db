// SPDX-License-Identifier: MIT OR Apache-2.0

//! Stopping rules: noise-scale estimation, the default threshold and the
//! strengthened Schwarz information criterion (sSIC) over path prefixes.

use serde::{Deserialize, Serialize};

use crate::error::{Result, WildsegError};
use crate::segmentation::{fit_means, ChangePointSet, SolutionPath};
use crate::stats::TimeSeries;

/// Gaussian consistency constant of the median absolute deviation.
pub const MAD_CONSTANT: f64 = 1.4826;

fn median_in_place(values: &mut [f64]) -> f64 {
    values.sort_unstable_by(f64::total_cmp);
    let n = values.len();
    if n % 2 == 1 {
        values[n / 2]
    } else {
        0.5 * (values[n / 2 - 1] + values[n / 2])
    }
}

/// Robust noise sd from first differences:
/// `1.4826 * median(|d - median(d)|)` with `d_i = (x_{i+1} - x_i) / sqrt(2)`.
///
/// A zero estimate is returned as is.
pub fn mad_sigma(x: &TimeSeries) -> Result<f64> {
    if x.len() < 3 {
        return Err(WildsegError::invalid_input(format!(
            "noise estimation needs T >= 3; got {}",
            x.len()
        )));
    }
    let mut d: Vec<f64> = x
        .values()
        .windows(2)
        .map(|w| (w[1] - w[0]) / std::f64::consts::SQRT_2)
        .collect();
    let center = median_in_place(&mut d);
    let mut dev: Vec<f64> = d.iter().map(|v| (v - center).abs()).collect();
    Ok(MAD_CONSTANT * median_in_place(&mut dev))
}

/// Inputs of the threshold `sigma * C * sqrt(2 ln T)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ThresholdSpec {
    pub c: f64,
    pub sigma: f64,
    #[serde(rename = "T")]
    pub len: usize,
}

impl ThresholdSpec {
    pub fn new(c: f64, sigma: f64, len: usize) -> Result<Self> {
        if !(c > 0.0 && c.is_finite()) {
            return Err(WildsegError::invalid_input(format!(
                "C must be > 0; got {c}"
            )));
        }
        if !(sigma >= 0.0 && sigma.is_finite()) {
            return Err(WildsegError::invalid_input(format!(
                "sigma must be >= 0; got {sigma}"
            )));
        }
        if len < 2 {
            return Err(WildsegError::invalid_input(format!(
                "T must be >= 2; got {len}"
            )));
        }
        Ok(Self { c, sigma, len })
    }
}

pub fn default_threshold(spec: &ThresholdSpec) -> f64 {
    spec.sigma * spec.c * (2.0 * (spec.len as f64).ln()).sqrt()
}

/// Error-free sum: `a + b == s + err` exactly.
fn two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    let bb = s - a;
    (s, (a - (s - bb)) + (b - bb))
}

/// Double-double accumulator.
#[derive(Debug, Clone, Copy, Default)]
struct Compensated {
    hi: f64,
    lo: f64,
}

impl Compensated {
    fn add(&mut self, value: f64, err: f64) {
        let (s, e) = two_sum(self.hi, value);
        self.hi = s;
        self.lo += e + err;
    }

    fn value(self) -> f64 {
        self.hi + self.lo
    }
}

/// Adds `(v - f)^2` for every point, with the squared residuals kept exact
/// up to double-double precision. `sign` is +1 or -1.
fn accumulate_rss(acc: &mut Compensated, x: &[f64], fitted: &[f64], sign: f64) {
    for (&v, &f) in x.iter().zip(fitted) {
        let (d, d_err) = two_sum(v, -f);
        let sq = d * d;
        let sq_err = d.mul_add(d, -sq) + 2.0 * d * d_err + d_err * d_err;
        acc.add(sign * sq, sign * sq_err);
    }
}

/// Maximum-likelihood residual variance of the segment-mean fit.
pub fn residual_variance(x: &TimeSeries, cps: &ChangePointSet) -> Result<f64> {
    let fit = fit_means(x, cps)?;
    let mut acc = Compensated::default();
    accumulate_rss(&mut acc, x.values(), &fit.values(), 1.0);
    Ok(acc.value() / x.len() as f64)
}

/// `residual_variance(coarse) - residual_variance(fine)`, summed point by
/// point before rounding. Subtracting two rounded variances loses all
/// relative accuracy once the drop nears `1e-16` times the variance.
pub fn residual_variance_drop(
    x: &TimeSeries,
    coarse: &ChangePointSet,
    fine: &ChangePointSet,
) -> Result<f64> {
    let coarse_fit = fit_means(x, coarse)?.values();
    let fine_fit = fit_means(x, fine)?.values();
    let mut acc = Compensated::default();
    accumulate_rss(&mut acc, x.values(), &coarse_fit, 1.0);
    accumulate_rss(&mut acc, x.values(), &fine_fit, -1.0);
    Ok(acc.value() / x.len() as f64)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SsicParams {
    pub alpha: f64,
    /// Largest model size considered.
    pub k: usize,
}

impl Default for SsicParams {
    fn default() -> Self {
        Self { alpha: 1.01, k: 20 }
    }
}

impl SsicParams {
    pub fn validate(&self) -> Result<()> {
        if !(self.alpha > 1.0 && self.alpha.is_finite()) {
            return Err(WildsegError::invalid_input(format!(
                "alpha must be > 1; got {}",
                self.alpha
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ModelScore {
    pub k: usize,
    pub sigma2_hat: f64,
    /// `(T/2) ln sigma2_hat + k (ln T)^alpha`; `-inf` for a perfect fit.
    pub ssic: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SsicSelection {
    pub k_hat: usize,
    pub change_points: ChangePointSet,
    pub scores: Vec<ModelScore>,
    /// The minimiser sits at the largest size evaluated while the path had
    /// further candidates; a larger `K` might select more.
    pub boundary_hit: bool,
}

/// Picks the path prefix minimising sSIC; the smallest `k` wins ties.
pub fn ssic_select(
    x: &TimeSeries,
    path: &SolutionPath,
    params: &SsicParams,
) -> Result<SsicSelection> {
    params.validate()?;
    x.require_detectable()?;
    if path.series_len() != x.len() {
        return Err(WildsegError::invalid_input(format!(
            "path built for T = {} but series has length {}",
            path.series_len(),
            x.len()
        )));
    }
    let len = x.len() as f64;
    let penalty = len.ln().powf(params.alpha);
    let prefixes = path.prefixes(params.k);
    let mut scores = Vec::with_capacity(prefixes.len());
    for (k, cps) in prefixes.iter().enumerate() {
        let sigma2_hat = residual_variance(x, cps)?;
        let ssic = if sigma2_hat > 0.0 {
            0.5 * len * sigma2_hat.ln() + k as f64 * penalty
        } else {
            f64::NEG_INFINITY
        };
        scores.push(ModelScore {
            k,
            sigma2_hat,
            ssic,
        });
    }
    let k_hat = scores.iter().fold(0, |best, s| {
        if s.ssic < scores[best].ssic {
            s.k
        } else {
            best
        }
    });
    let boundary_hit = k_hat == params.k && path.len() > params.k;
    Ok(SsicSelection {
        k_hat,
        change_points: prefixes[k_hat].clone(),
        scores,
        boundary_hit,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::segmentation::{detect, DetectionParams};
    use crate::signals::{add_noise, motivating_signal, test_signal, TestSignal};
    use crate::stats::{cusum, Interval, PrefixSums};

    fn ts(v: &[f64]) -> TimeSeries {
        TimeSeries::new(v.to_vec()).unwrap()
    }

    #[test]
    fn mad_degenerate_cases() {
        assert_eq!(mad_sigma(&ts(&[2.0; 10])).unwrap(), 0.0);
        let ramp: Vec<f64> = (0..50).map(|i| 0.5 * i as f64).collect();
        assert_eq!(mad_sigma(&ts(&ramp)).unwrap(), 0.0);
        assert!(mad_sigma(&ts(&[1.0, 2.0])).is_err());
    }

    #[test]
    fn mad_small_hand_example() {
        // d = (1, 2, 4) / sqrt2, median 2/sqrt2, deviations (1, 0, 2)/sqrt2.
        let got = mad_sigma(&ts(&[0.0, 1.0, 3.0, 7.0])).unwrap();
        let want = MAD_CONSTANT * 1.0 / std::f64::consts::SQRT_2;
        assert!((got - want).abs() < 1e-15);
    }

    #[test]
    fn mad_is_consistent_for_gaussian_noise() {
        let x = add_noise(&vec![0.0; 100_000], 1.0, 2024).unwrap();
        let s = mad_sigma(&x).unwrap();
        assert!((0.98..=1.02).contains(&s), "sigma hat {s}");
    }

    #[test]
    fn threshold_values() {
        let z = default_threshold(&ThresholdSpec::new(1.0, 1.0, 2000).unwrap());
        assert!((z - 3.898_949_207).abs() < 1e-8, "{z}");
        assert_eq!(
            default_threshold(&ThresholdSpec::new(1.0, 0.0, 2000).unwrap()),
            0.0
        );
        assert!(ThresholdSpec::new(0.0, 1.0, 10).is_err());
        assert!(ThresholdSpec::new(1.0, -1.0, 10).is_err());
        assert!(ThresholdSpec::new(1.0, 1.0, 1).is_err());

        let base = default_threshold(&ThresholdSpec::new(1.0, 1.0, 100).unwrap());
        assert!(default_threshold(&ThresholdSpec::new(1.1, 1.0, 100).unwrap()) > base);
        assert!(default_threshold(&ThresholdSpec::new(1.0, 1.1, 100).unwrap()) > base);
        assert!(default_threshold(&ThresholdSpec::new(1.0, 1.0, 101).unwrap()) > base);
    }

    #[test]
    fn residual_variance_examples() {
        assert_eq!(
            residual_variance(&ts(&[0.0, 2.0, 0.0, 2.0]), &ChangePointSet::empty()).unwrap(),
            1.0
        );
        let x = ts(&[1.0, 1.0, 5.0, 5.0, 5.0]);
        let cps = ChangePointSet::new(vec![2], 5).unwrap();
        assert_eq!(residual_variance(&x, &cps).unwrap(), 0.0);
    }

    #[test]
    fn noiseless_signals_fit_exactly() {
        let mut signals: Vec<_> = TestSignal::ALL.iter().map(|&t| test_signal(t).0).collect();
        signals.push(motivating_signal());
        for f in signals {
            let x = TimeSeries::new(f.values()).unwrap();
            let cps = ChangePointSet::new(f.change_points().to_vec(), f.len()).unwrap();
            assert_eq!(fit_means(&x, &cps).unwrap().levels(), f.levels());
            assert_eq!(residual_variance(&x, &cps).unwrap(), 0.0);
        }
    }

    #[test]
    fn first_split_reduces_variance_by_squared_cusum() {
        let (sig, sigma) = test_signal(TestSignal::Fms);
        let x = add_noise(&sig.values(), sigma, 4).unwrap();
        let sums = PrefixSums::new(&x);
        let full = Interval::new(1, x.len()).unwrap();
        let peak = crate::stats::cusum_argmax(&sums, full).unwrap();
        let v0 = residual_variance(&x, &ChangePointSet::empty()).unwrap();
        let v1 =
            residual_variance(&x, &ChangePointSet::new(vec![peak.b], x.len()).unwrap()).unwrap();
        let drop = cusum(&sums, full, peak.b).unwrap().powi(2) / x.len() as f64;
        assert!(((v0 - v1) - drop).abs() <= 1e-9 * drop);
        let fine = ChangePointSet::new(vec![peak.b], x.len()).unwrap();
        let direct = residual_variance_drop(&x, &ChangePointSet::empty(), &fine).unwrap();
        assert!((direct - drop).abs() <= 1e-12 * drop);
    }

    #[test]
    fn zero_residual_wins_via_sentinel() {
        let mut f = vec![0.0; 30];
        f.extend(vec![3.0; 30]);
        f.extend(vec![-1.0; 40]);
        let x = ts(&f);
        let path = crate::segmentation::binseg(&x, 0.0).unwrap();
        let sel = ssic_select(&x, &path, &SsicParams::default()).unwrap();
        assert_eq!(sel.k_hat, 2);
        assert_eq!(sel.change_points.as_slice(), &[30, 60]);
        assert_eq!(sel.scores[2].ssic, f64::NEG_INFINITY);
    }

    #[test]
    fn pure_noise_selects_empty_model() {
        let hits = (0..100u64)
            .filter(|&seed| {
                let x = add_noise(&vec![0.0; 500], 1.0, seed).unwrap();
                let params = DetectionParams {
                    m: 1000,
                    seed,
                    ..DetectionParams::default()
                };
                let path = detect(&x, &params).unwrap();
                ssic_select(&x, &path, &SsicParams::default())
                    .unwrap()
                    .k_hat
                    == 0
            })
            .count();
        assert!(hits >= 95, "k_hat = 0 in {hits}/100");
    }

    #[test]
    fn selection_is_scale_invariant() {
        let (sig, sigma) = test_signal(TestSignal::Fms);
        for seed in 0..10u64 {
            let x = add_noise(&sig.values(), sigma, seed).unwrap();
            let y = TimeSeries::new(x.values().iter().map(|v| 7.5 * v).collect()).unwrap();
            let params = DetectionParams {
                m: 1000,
                seed,
                ..DetectionParams::default()
            };
            let sx =
                ssic_select(&x, &detect(&x, &params).unwrap(), &SsicParams::default()).unwrap();
            let sy =
                ssic_select(&y, &detect(&y, &params).unwrap(), &SsicParams::default()).unwrap();
            assert_eq!(sx.k_hat, sy.k_hat);
            assert_eq!(sx.change_points, sy.change_points);
        }
    }

    #[test]
    fn scores_are_monotone_and_boundary_reported() {
        let (sig, sigma) = test_signal(TestSignal::Fms);
        let x = add_noise(&sig.values(), sigma, 9).unwrap();
        let path = detect(
            &x,
            &DetectionParams {
                m: 2000,
                seed: 9,
                ..DetectionParams::default()
            },
        )
        .unwrap();
        let sel = ssic_select(&x, &path, &SsicParams { alpha: 1.01, k: 20 }).unwrap();
        assert_eq!(sel.scores.len(), 21);
        assert!(sel
            .scores
            .windows(2)
            .all(|w| w[1].sigma2_hat <= w[0].sigma2_hat * (1.0 + 1e-12)));

        let small = ssic_select(&x, &path, &SsicParams { alpha: 1.01, k: 2 }).unwrap();
        assert_eq!(small.k_hat, 2);
        assert!(small.boundary_hit);
        assert!(ssic_select(&x, &path, &SsicParams { alpha: 1.0, k: 2 }).is_err());
    }
}
