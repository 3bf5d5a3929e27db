// SPDX-License-Identifier: MIT OR Apache-2.0

//! Monte-Carlo comparison of methods on test signals.
//!
//! Every replication regenerates the noise, runs each method on the same
//! noisy series with its own interval draw, and records `N_hat - N` and the
//! mean-square error of the fitted segment means. Results are aggregated
//! per (model, method) cell into a histogram of `N_hat - N` over
//! `{<=-3, -2, -1, 0, 1, 2, >=3}`, six-number summaries and mean MSE.

use std::fmt::Write as _;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Result, WildsegError};
use crate::pipeline::{run_detection, MethodSpec};
use crate::seed::{derive_seed, label_hash};
use crate::segmentation::fit_means;
use crate::signals::{
    add_noise, random_signal, test_signal, PiecewiseConstantSignal, SimulationConfig, TestSignal,
};

const SIGNAL_TAG: &str = "signal";

/// Mean-square error `T^-1 sum (f_t - f_hat_t)^2`.
pub fn mse(f: &[f64], f_hat: &[f64]) -> Result<f64> {
    if f.len() != f_hat.len() {
        return Err(WildsegError::invalid_input(format!(
            "length mismatch: {} vs {}",
            f.len(),
            f_hat.len()
        )));
    }
    if f.is_empty() {
        return Err(WildsegError::invalid_input("mse of empty vectors"));
    }
    let sum: f64 = f.iter().zip(f_hat).map(|(a, b)| (a - b) * (a - b)).sum();
    Ok(sum / f.len() as f64)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum ModelSpec {
    /// A bundled test signal; `sigma` overrides its standard noise level.
    Named {
        signal: TestSignal,
        sigma: Option<f64>,
    },
    /// A fresh random signal per replication.
    Random {
        id: String,
        config: SimulationConfig,
    },
}

impl ModelSpec {
    pub fn named(signal: TestSignal) -> Self {
        ModelSpec::Named {
            signal,
            sigma: None,
        }
    }

    pub fn id(&self) -> String {
        match self {
            ModelSpec::Named {
                signal,
                sigma: None,
            } => signal.name().to_string(),
            ModelSpec::Named {
                signal,
                sigma: Some(s),
            } => format!("{signal}-sd{s}"),
            ModelSpec::Random { id, .. } => id.clone(),
        }
    }

    fn realise(&self, base_seed: u64, replication: u64) -> Result<(PiecewiseConstantSignal, f64)> {
        match self {
            ModelSpec::Named { signal, sigma } => {
                let (f, default_sigma) = test_signal(*signal);
                Ok((f, sigma.unwrap_or(default_sigma)))
            }
            ModelSpec::Random { id, config } => {
                let seed = derive_seed(&[
                    base_seed,
                    label_hash(id),
                    replication,
                    label_hash(SIGNAL_TAG),
                    config.seed,
                ]);
                let f = random_signal(&SimulationConfig {
                    seed,
                    ..config.clone()
                })?;
                Ok((f, config.noise_sigma))
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BenchmarkConfig {
    pub models: Vec<ModelSpec>,
    pub methods: Vec<MethodSpec>,
    pub replications: usize,
    pub base_seed: u64,
    /// Random intervals per WBS run.
    pub m: usize,
}

impl BenchmarkConfig {
    pub fn new(models: Vec<ModelSpec>, methods: Vec<MethodSpec>) -> Self {
        Self {
            models,
            methods,
            replications: 100,
            base_seed: 0,
            m: 5000,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.replications < 1 {
            return Err(WildsegError::invalid_input("replications must be >= 1"));
        }
        if self.models.is_empty() || self.methods.is_empty() {
            return Err(WildsegError::invalid_input(
                "benchmark needs at least one model and one method",
            ));
        }
        for m in &self.methods {
            m.validate()?;
        }
        for model in &self.models {
            if let ModelSpec::Random { config, .. } = model {
                config.validate()?;
            }
        }
        Ok(())
    }
}

/// Six-number summary; quartiles use linear interpolation between order
/// statistics (`(n - 1) p` positions).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Summary {
    pub min: f64,
    pub q1: f64,
    pub median: f64,
    pub mean: f64,
    pub q3: f64,
    pub max: f64,
}

impl Summary {
    pub fn of(values: &[i64]) -> Option<Self> {
        if values.is_empty() {
            return None;
        }
        let mut sorted: Vec<f64> = values.iter().map(|&v| v as f64).collect();
        sorted.sort_by(f64::total_cmp);
        let quantile = |p: f64| {
            let h = (sorted.len() - 1) as f64 * p;
            let lo = h.floor() as usize;
            let hi = (lo + 1).min(sorted.len() - 1);
            sorted[lo] + (h - lo as f64) * (sorted[hi] - sorted[lo])
        };
        Some(Self {
            min: sorted[0],
            q1: quantile(0.25),
            median: quantile(0.5),
            mean: sorted.iter().sum::<f64>() / sorted.len() as f64,
            q3: quantile(0.75),
            max: sorted[sorted.len() - 1],
        })
    }
}

/// Histogram bin labels, in column order.
pub const BIN_LABELS: [&str; 7] = [
    "bin_le_m3",
    "bin_m2",
    "bin_m1",
    "bin_0",
    "bin_p1",
    "bin_p2",
    "bin_ge3",
];

fn bin_index(diff: i64) -> usize {
    (diff.clamp(-3, 3) + 3) as usize
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CellReport {
    pub model: String,
    pub method: String,
    /// Counts of `N_hat - N` per bin in [`BIN_LABELS`] order.
    pub histogram: [usize; 7],
    pub summary: Option<Summary>,
    pub mean_mse: Option<f64>,
    /// Replications whose run failed; excluded from every aggregate.
    pub failed: usize,
    pub failures: Vec<String>,
    /// `N_hat - N` per successful replication, in replication order.
    pub differences: Vec<i64>,
}

impl CellReport {
    pub fn exact_count(&self) -> usize {
        self.histogram[3]
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportMetadata {
    pub base_seed: u64,
    pub replications: usize,
    pub m: usize,
    /// All methods of a replication see the same noisy series.
    pub shared_noise: bool,
    pub seed_scheme: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BenchmarkReport {
    pub metadata: ReportMetadata,
    pub cells: Vec<CellReport>,
}

impl BenchmarkReport {
    pub fn cell(&self, model: &str, method: &str) -> Option<&CellReport> {
        self.cells
            .iter()
            .find(|c| c.model == model && c.method == method)
    }

    /// Distribution table: one row per cell with bin counts and mean MSE.
    pub fn distribution_csv(&self) -> String {
        let mut out = format!("model,method,{},mean_mse\n", BIN_LABELS.join(","));
        for c in &self.cells {
            let bins: Vec<String> = c.histogram.iter().map(usize::to_string).collect();
            let _ = writeln!(
                out,
                "{},{},{},{}",
                c.model,
                c.method,
                bins.join(","),
                fmt_opt(c.mean_mse)
            );
        }
        out
    }

    /// Summary table: six-number summary of `N_hat - N` per cell.
    pub fn summary_csv(&self) -> String {
        let mut out = String::from("model,method,min,q1,median,mean,q3,max\n");
        for c in &self.cells {
            let cols = match c.summary {
                Some(s) => [s.min, s.q1, s.median, s.mean, s.q3, s.max]
                    .iter()
                    .map(f64::to_string)
                    .collect::<Vec<_>>()
                    .join(","),
                None => ["NA"; 6].join(","),
            };
            let _ = writeln!(out, "{},{},{cols}", c.model, c.method);
        }
        out
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }
}

fn fmt_opt(v: Option<f64>) -> String {
    v.map_or_else(|| "NA".to_string(), |v| v.to_string())
}

type Outcome = std::result::Result<(i64, f64), String>;

fn replicate(config: &BenchmarkConfig, model: &ModelSpec, r: u64) -> Vec<Outcome> {
    let model_hash = label_hash(&model.id());
    let realised = model.realise(config.base_seed, r).and_then(|(f, sigma)| {
        let noise_seed = derive_seed(&[config.base_seed, model_hash, r]);
        let truth = f.values();
        let x = add_noise(&truth, sigma, noise_seed)?;
        Ok((f, truth, x))
    });
    let (f, truth, x) = match realised {
        Ok(v) => v,
        Err(e) => return vec![Err(e.to_string()); config.methods.len()],
    };
    config
        .methods
        .iter()
        .map(|spec| {
            let seed = derive_seed(&[config.base_seed, model_hash, r, label_hash(&spec.id())]);
            let detection =
                run_detection(&x, spec, config.m, seed, None).map_err(|e| e.to_string())?;
            let fitted = fit_means(&x, &detection.change_points).map_err(|e| e.to_string())?;
            let err = mse(&truth, &fitted.values()).map_err(|e| e.to_string())?;
            let diff = detection.change_points.len() as i64 - f.change_points().len() as i64;
            Ok((diff, err))
        })
        .collect()
}

/// Runs every (model, method) cell. Deterministic given the config;
/// replications run in parallel.
pub fn run_benchmark(config: &BenchmarkConfig) -> Result<BenchmarkReport> {
    config.validate()?;
    let mut cells = Vec::with_capacity(config.models.len() * config.methods.len());
    for model in &config.models {
        let outcomes: Vec<Vec<Outcome>> = (0..config.replications as u64)
            .into_par_iter()
            .map(|r| replicate(config, model, r))
            .collect();
        for (j, spec) in config.methods.iter().enumerate() {
            let mut histogram = [0usize; 7];
            let mut differences = Vec::with_capacity(config.replications);
            let mut failures = Vec::new();
            let mut mse_sum = 0.0;
            for (r, rep) in outcomes.iter().enumerate() {
                match &rep[j] {
                    Ok((diff, err)) => {
                        histogram[bin_index(*diff)] += 1;
                        differences.push(*diff);
                        mse_sum += err;
                    }
                    Err(msg) => failures.push(format!("replication {r}: {msg}")),
                }
            }
            let ok = differences.len();
            cells.push(CellReport {
                model: model.id(),
                method: spec.id(),
                histogram,
                summary: Summary::of(&differences),
                mean_mse: (ok > 0).then(|| mse_sum / ok as f64),
                failed: failures.len(),
                failures,
                differences,
            });
        }
    }
    Ok(BenchmarkReport {
        metadata: ReportMetadata {
            base_seed: config.base_seed,
            replications: config.replications,
            m: config.m,
            shared_noise: true,
            seed_scheme: "noise: mix(base, model, r); intervals: mix(base, model, r, method)"
                .into(),
        },
        cells,
    })
}
