// SPDX-License-Identifier: MIT OR Apache-2.0

//! Test signals, random piecewise-constant signals, linear-trend profiles
//! and Gaussian noise injection.

use std::fmt;
use std::str::FromStr;

use rand::Rng as _;
use rand_distr::{Distribution, Normal, Poisson, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::error::{Result, WildsegError};
use crate::seed::rng_from_seed;
use crate::stats::TimeSeries;

/// Piecewise-constant mean `f_t`. Segment `i` (0-based) covers
/// `eta_i + 1 ..= eta_{i+1}` with `eta_0 = 0` and `eta_{N+1} = T`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PiecewiseConstantSignal {
    #[serde(rename = "T")]
    len: usize,
    change_points: Vec<usize>,
    values: Vec<f64>,
}

impl PiecewiseConstantSignal {
    /// Validated constructor. Adjacent segment values must differ.
    pub fn new(len: usize, change_points: Vec<usize>, values: Vec<f64>) -> Result<Self> {
        Self::check_layout(len, &change_points, &values)?;
        if let Some(w) = values.windows(2).position(|w| w[0] == w[1]) {
            return Err(WildsegError::invalid_input(format!(
                "no jump at change-point {}",
                change_points[w]
            )));
        }
        Ok(Self {
            len,
            change_points,
            values,
        })
    }

    /// Fitted signals may have equal neighbouring levels.
    pub(crate) fn fitted(len: usize, change_points: Vec<usize>, values: Vec<f64>) -> Self {
        debug_assert!(Self::check_layout(len, &change_points, &values).is_ok());
        Self {
            len,
            change_points,
            values,
        }
    }

    fn check_layout(len: usize, change_points: &[usize], values: &[f64]) -> Result<()> {
        if len < 1 {
            return Err(WildsegError::invalid_input("signal length must be >= 1"));
        }
        if values.len() != change_points.len() + 1 {
            return Err(WildsegError::invalid_input(format!(
                "{} change-points need {} values; got {}",
                change_points.len(),
                change_points.len() + 1,
                values.len()
            )));
        }
        let mut prev = 0;
        for &cp in change_points {
            if cp <= prev || cp >= len {
                return Err(WildsegError::invalid_input(format!(
                    "change-points must be strictly increasing within [1, {}]",
                    len - 1
                )));
            }
            prev = cp;
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(WildsegError::invalid_input("segment values must be finite"));
        }
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn change_points(&self) -> &[usize] {
        &self.change_points
    }

    /// Segment levels, one more than there are change-points.
    pub fn levels(&self) -> &[f64] {
        &self.values
    }

    /// Evaluates `f_1, ..., f_T`.
    pub fn values(&self) -> Vec<f64> {
        let mut out = Vec::with_capacity(self.len);
        let mut start = 0;
        for (i, &level) in self.values.iter().enumerate() {
            let end = self.change_points.get(i).copied().unwrap_or(self.len);
            out.extend(std::iter::repeat_n(level, end - start));
            start = end;
        }
        out
    }
}

/// The five standard test signals.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TestSignal {
    Blocks,
    Fms,
    Mix,
    Teeth10,
    Stairs10,
}

impl TestSignal {
    pub const ALL: [TestSignal; 5] = [
        TestSignal::Blocks,
        TestSignal::Fms,
        TestSignal::Mix,
        TestSignal::Teeth10,
        TestSignal::Stairs10,
    ];

    pub fn name(self) -> &'static str {
        match self {
            TestSignal::Blocks => "blocks",
            TestSignal::Fms => "fms",
            TestSignal::Mix => "mix",
            TestSignal::Teeth10 => "teeth10",
            TestSignal::Stairs10 => "stairs10",
        }
    }
}

impl fmt::Display for TestSignal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for TestSignal {
    type Err = WildsegError;

    fn from_str(s: &str) -> Result<Self> {
        TestSignal::ALL
            .into_iter()
            .find(|t| t.name() == s)
            .ok_or_else(|| WildsegError::invalid_input(format!("unknown test signal '{s}'")))
    }
}

/// Returns the named signal and its standard noise level.
pub fn test_signal(name: TestSignal) -> (PiecewiseConstantSignal, f64) {
    let every_ten = |count: usize| (1..=count).map(|i| 10 * i + 1).collect::<Vec<_>>();
    let (len, cps, values, sigma) = match name {
        TestSignal::Blocks => (
            2048,
            vec![205, 267, 308, 472, 512, 820, 902, 1332, 1557, 1598, 1659],
            vec![
                0.0, 14.64, -3.66, 7.32, -7.32, 10.98, -4.39, 3.29, 19.03, 7.68, 15.37, 0.0,
            ],
            10.0,
        ),
        TestSignal::Fms => (
            497,
            vec![139, 226, 243, 300, 309, 333],
            vec![-0.18, 0.08, 1.07, -0.53, 0.16, -0.69, -0.16],
            0.3,
        ),
        TestSignal::Mix => (
            560,
            vec![11, 21, 41, 61, 91, 121, 161, 201, 251, 301, 361, 421, 491],
            vec![
                7.0, -7.0, 6.0, -6.0, 5.0, -5.0, 4.0, -4.0, 3.0, -3.0, 2.0, -2.0, 1.0, -1.0,
            ],
            4.0,
        ),
        TestSignal::Teeth10 => (
            140,
            every_ten(13),
            (0..14).map(|i| (i % 2) as f64).collect(),
            0.4,
        ),
        TestSignal::Stairs10 => (150, every_ten(14), (1..=15).map(f64::from).collect(), 0.3),
    };
    let signal = PiecewiseConstantSignal::new(len, cps, values)
        .expect("bundled test signals are well formed");
    (signal, sigma)
}

/// Three close change-points (130, 150, 170) in a series of length 300:
/// a short up-down excursion that a CUSUM over the whole series barely
/// sees. Levels are `0, 1, -1, 0`.
pub fn motivating_signal() -> PiecewiseConstantSignal {
    PiecewiseConstantSignal::new(300, vec![130, 150, 170], vec![0.0, 1.0, -1.0, 0.0])
        .expect("motivating signal is well formed")
}

/// Random signal recipe: Poisson number of change-points at uniform
/// locations with Gaussian jump heights.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimulationConfig {
    pub n_avg: f64,
    pub sigma2_jmp: f64,
    #[serde(rename = "T")]
    pub len: usize,
    pub noise_sigma: f64,
    pub seed: u64,
}

impl SimulationConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.n_avg >= 0.0 && self.n_avg.is_finite()) {
            return Err(WildsegError::invalid_input("n_avg must be finite and >= 0"));
        }
        if !(self.sigma2_jmp > 0.0 && self.sigma2_jmp.is_finite()) {
            return Err(WildsegError::invalid_input("sigma2_jmp must be > 0"));
        }
        if !(self.noise_sigma >= 0.0 && self.noise_sigma.is_finite()) {
            return Err(WildsegError::invalid_input("noise_sigma must be >= 0"));
        }
        if self.len < 2 {
            return Err(WildsegError::invalid_input("T must be >= 2"));
        }
        Ok(())
    }
}

/// Draws a random piecewise-constant signal.
///
/// Locations are `floor(u * T)` for `u ~ U(0, 1)`, redrawn when they hit
/// `0` or an existing location, so every change-point is distinct. The
/// count is capped at `T - 1`. The first level is 0.
pub fn random_signal(config: &SimulationConfig) -> Result<PiecewiseConstantSignal> {
    config.validate()?;
    let mut rng = rng_from_seed(config.seed);
    let len = config.len;
    let count = if config.n_avg == 0.0 {
        0
    } else {
        let pois = Poisson::new(config.n_avg)
            .map_err(|e| WildsegError::invalid_input(format!("poisson rate: {e}")))?;
        let draw: f64 = pois.sample(&mut rng);
        (draw as usize).min(len - 1)
    };

    let mut cps: Vec<usize> = Vec::with_capacity(count);
    while cps.len() < count {
        let u: f64 = rng.random();
        let idx = (u * len as f64).floor() as usize;
        if idx < 1 || idx > len - 1 || cps.contains(&idx) {
            continue;
        }
        cps.push(idx);
    }
    cps.sort_unstable();

    let jump = Normal::new(0.0, config.sigma2_jmp.sqrt())
        .map_err(|e| WildsegError::invalid_input(format!("jump distribution: {e}")))?;
    let mut values = Vec::with_capacity(count + 1);
    let mut level = 0.0;
    values.push(level);
    for _ in 0..count {
        level += jump.sample(&mut rng);
        values.push(level);
    }
    Ok(PiecewiseConstantSignal::fitted(len, cps, values))
}

/// One linear piece starting at 1-based index `start`:
/// `f_t = intercept + slope * (t - start)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TrendPiece {
    pub start: usize,
    pub intercept: f64,
    pub slope: f64,
}

/// Piecewise-linear mean. Pieces tile `1..=T` in order of `start`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrendSignal {
    #[serde(rename = "T")]
    len: usize,
    pieces: Vec<TrendPiece>,
}

impl TrendSignal {
    pub fn new(len: usize, pieces: Vec<TrendPiece>) -> Result<Self> {
        if len < 1 {
            return Err(WildsegError::invalid_input("trend length must be >= 1"));
        }
        match pieces.first() {
            Some(p) if p.start == 1 => {}
            _ => return Err(WildsegError::invalid_input("first piece must start at 1")),
        }
        if pieces.windows(2).any(|w| w[1].start <= w[0].start) || pieces.last().unwrap().start > len
        {
            return Err(WildsegError::invalid_input(
                "piece starts must be strictly increasing within [1, T]",
            ));
        }
        if pieces
            .iter()
            .any(|p| !p.intercept.is_finite() || !p.slope.is_finite())
        {
            return Err(WildsegError::invalid_input(
                "piece parameters must be finite",
            ));
        }
        Ok(Self { len, pieces })
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn pieces(&self) -> &[TrendPiece] {
        &self.pieces
    }
}

/// Evaluates a piecewise-linear profile at `t = 1..=T`.
pub fn linear_trend_signal(spec: &TrendSignal) -> Vec<f64> {
    let mut out = Vec::with_capacity(spec.len);
    let mut piece = 0;
    for t in 1..=spec.len {
        while piece + 1 < spec.pieces.len() && spec.pieces[piece + 1].start <= t {
            piece += 1;
        }
        let p = &spec.pieces[piece];
        out.push(p.intercept + p.slope * (t - p.start) as f64);
    }
    out
}

/// `X_t = f_t + sigma * Z_t` with `Z_t` i.i.d. standard normal.
pub fn add_noise(f: &[f64], sigma: f64, seed: u64) -> Result<TimeSeries> {
    if !(sigma >= 0.0 && sigma.is_finite()) {
        return Err(WildsegError::invalid_input(format!(
            "noise sigma must be finite and >= 0; got {sigma}"
        )));
    }
    if sigma == 0.0 {
        return TimeSeries::new(f.to_vec());
    }
    let mut rng = rng_from_seed(seed);
    let noisy = f
        .iter()
        .map(|&v| {
            let z: f64 = StandardNormal.sample(&mut rng);
            v + sigma * z
        })
        .collect();
    TimeSeries::new(noisy)
}

/// JSON descriptor of a signal: length, change-points, levels and noise sd.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SignalDescriptor {
    #[serde(rename = "T")]
    pub len: usize,
    pub change_points: Vec<usize>,
    pub values: Vec<f64>,
    pub sigma: f64,
}

impl SignalDescriptor {
    pub fn new(signal: &PiecewiseConstantSignal, sigma: f64) -> Self {
        Self {
            len: signal.len(),
            change_points: signal.change_points().to_vec(),
            values: signal.levels().to_vec(),
            sigma,
        }
    }
}

/// Single-column CSV, one value per line, no header.
pub fn to_csv(values: &[f64]) -> String {
    let mut out = String::with_capacity(values.len() * 8);
    for v in values {
        out.push_str(&v.to_string());
        out.push('\n');
    }
    out
}
