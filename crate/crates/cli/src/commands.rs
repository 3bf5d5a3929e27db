// SPDX-License-Identifier: MIT OR Apache-2.0

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use anyhow::{Context, Result};
use wildseg_core::seed::{derive_seed, label_hash};
use wildseg_core::signals::{to_csv, SignalDescriptor};
use wildseg_core::{
    add_noise, detect, fit_means, motivating_signal, random_signal, refine_locations,
    run_benchmark, test_signal, BenchmarkConfig, DetectionParams, Method, MethodSpec, ModelSpec,
    SimulationConfig, SsicParams, StoppingRule, TestSignal,
};

use crate::input::read_series;
use crate::output::{DetectOutput, MethodInfo, PathEntry, TruthOutput, SCHEMA_VERSION};
use crate::{BenchArgs, DetectArgs, SimulateArgs, Stopping, TtmapArgs, UsageError};

/// Writes to `path`, or to standard output when there is none.
fn emit(path: Option<&Path>, contents: &str) -> Result<()> {
    match path {
        Some(p) => fs::write(p, contents).with_context(|| format!("writing {}", p.display())),
        None => {
            print!("{contents}");
            Ok(())
        }
    }
}

fn to_json<T: serde::Serialize>(value: &T) -> Result<String> {
    let mut s = serde_json::to_string_pretty(value)?;
    s.push('\n');
    Ok(s)
}

pub fn detect_cmd(args: &DetectArgs) -> Result<()> {
    let stopping = match args.stopping {
        Stopping::Ssic => {
            if args.c.is_some() {
                return Err(UsageError::new("--C applies only to --stopping threshold").into());
            }
            StoppingRule::Ssic(SsicParams {
                alpha: args.alpha.unwrap_or(SsicParams::default().alpha),
                k: args.k.unwrap_or(SsicParams::default().k),
            })
        }
        Stopping::Threshold => {
            if args.alpha.is_some() || args.k.is_some() {
                return Err(
                    UsageError::new("--alpha and --K apply only to --stopping ssic").into(),
                );
            }
            StoppingRule::Threshold {
                c: args.c.unwrap_or(1.0),
            }
        }
    };
    let method = Method::from(args.method);
    let spec = MethodSpec {
        method,
        stopping,
        augment: args.augment,
    };
    spec.validate()
        .map_err(|e| UsageError::new(e.to_string()))?;

    let x = read_series(&args.input)?;
    let run = wildseg_core::run_detection(&x, &spec, args.m, args.seed, args.sigma)?;

    let mut warnings = Vec::new();
    let mut change_points = run.change_points.clone();
    if args.refine {
        let refined = refine_locations(&x, &change_points)?;
        for loc in &refined.collisions {
            warnings.push(format!(
                "refinement merged several change-points into location {loc}"
            ));
        }
        change_points = refined.change_points;
    }
    let boundary_hit = run.ssic.as_ref().map(|s| s.boundary_hit);
    if boundary_hit == Some(true) {
        warnings.push("sSIC minimum at the largest model size; consider a larger --K".into());
    }
    let fit = fit_means(&x, &change_points)?;

    let (c, alpha, k) = match stopping {
        StoppingRule::Threshold { c } => (Some(c), None, None),
        StoppingRule::Ssic(p) => (None, Some(p.alpha), Some(p.k)),
        StoppingRule::Fixed { .. } => (None, None, None),
    };
    let out = DetectOutput {
        schema_version: SCHEMA_VERSION.to_string(),
        len: x.len(),
        change_points: change_points.into_vec(),
        fitted_means: fit.levels().to_vec(),
        sigma_hat: run.sigma_hat,
        method: MethodInfo {
            method: method.to_string(),
            stopping: args.stopping.name().to_string(),
            c,
            alpha,
            k,
            m: run.path.fingerprint().m,
            seed: args.seed,
            augment: args.augment,
            zeta: run.zeta,
        },
        solution_path: run.path.nodes().iter().map(PathEntry::from).collect(),
        k_hat: run.ssic.as_ref().map(|s| s.k_hat),
        boundary_hit,
        refined: args.refine,
        warnings,
    };
    for w in &out.warnings {
        eprintln!("warning: {w}");
    }
    emit(args.out.as_deref(), &to_json(&out)?)
}

/// Default noise for the motivating example; its levels differ by 1 or 2.
const MOTIVATING_SIGMA: f64 = 0.3;

pub fn simulate_cmd(args: &SimulateArgs) -> Result<()> {
    let random_flags = args.navg.is_some() || args.sjmp2.is_some() || args.len.is_some();
    let (name, signal, default_sigma) = if args.model == "random" {
        let (Some(n_avg), Some(sigma2_jmp), Some(len)) = (args.navg, args.sjmp2, args.len) else {
            return Err(UsageError::new("--model random needs --navg, --sjmp2 and --T").into());
        };
        let config = SimulationConfig {
            n_avg,
            sigma2_jmp,
            len,
            noise_sigma: args.sigma.unwrap_or(1.0),
            seed: derive_seed(&[args.seed, label_hash("signal")]),
        };
        config
            .validate()
            .map_err(|e| UsageError::new(e.to_string()))?;
        ("random".to_string(), random_signal(&config)?, 1.0)
    } else if args.model == "motivating" {
        if random_flags {
            return Err(
                UsageError::new("--navg, --sjmp2 and --T apply only to --model random").into(),
            );
        }
        (
            "motivating".to_string(),
            motivating_signal(),
            MOTIVATING_SIGMA,
        )
    } else {
        let model: TestSignal = args
            .model
            .parse()
            .map_err(|e: wildseg_core::WildsegError| UsageError::new(e.to_string()))?;
        if random_flags {
            return Err(
                UsageError::new("--navg, --sjmp2 and --T apply only to --model random").into(),
            );
        }
        let (f, sigma) = test_signal(model);
        (model.to_string(), f, sigma)
    };
    let sigma = args.sigma.unwrap_or(default_sigma);
    if !(sigma >= 0.0 && sigma.is_finite()) {
        return Err(UsageError::new(format!("--sigma must be >= 0; got {sigma}")).into());
    }
    let x = add_noise(&signal.values(), sigma, args.seed)?;

    if let Some(path) = &args.truth {
        let truth = TruthOutput {
            schema_version: SCHEMA_VERSION.to_string(),
            model: name,
            seed: args.seed,
            signal: SignalDescriptor::new(&signal, sigma),
        };
        emit(Some(path), &to_json(&truth)?)?;
    }
    emit(args.out.as_deref(), &to_csv(x.values()))
}

/// `name`, `name:sigma`, or `random:navg:sjmp2:T[:sigma]`.
fn parse_model(token: &str) -> Result<ModelSpec, UsageError> {
    let bad = |why: &str| UsageError::new(format!("model '{token}': {why}"));
    let parts: Vec<&str> = token.split(':').collect();
    let num = |s: &str| s.parse::<f64>().map_err(|_| bad("expected a number"));
    if parts[0] == "random" {
        if !(4..=5).contains(&parts.len()) {
            return Err(bad("expected random:navg:sjmp2:T[:sigma]"));
        }
        let len: usize = parts[3].parse().map_err(|_| bad("T must be an integer"))?;
        let noise_sigma = parts.get(4).map(|s| num(s)).transpose()?.unwrap_or(1.0);
        return Ok(ModelSpec::Random {
            id: token.replace(':', "-"),
            config: SimulationConfig {
                n_avg: num(parts[1])?,
                sigma2_jmp: num(parts[2])?,
                len,
                noise_sigma,
                seed: 0,
            },
        });
    }
    let signal: TestSignal = parts[0].parse().map_err(|_| bad("unknown model"))?;
    match parts.as_slice() {
        [_] => Ok(ModelSpec::named(signal)),
        [_, s] => Ok(ModelSpec::Named {
            signal,
            sigma: Some(num(s)?),
        }),
        _ => Err(bad("expected name or name:sigma")),
    }
}

pub fn bench_cmd(args: &BenchArgs) -> Result<()> {
    let models = args
        .models
        .iter()
        .map(|t| parse_model(t))
        .collect::<Result<Vec<_>, _>>()?;
    let methods = args
        .methods
        .iter()
        .map(|t| t.parse::<MethodSpec>())
        .collect::<Result<Vec<_>, _>>()
        .map_err(|e| UsageError::new(e.to_string()))?;
    let config = BenchmarkConfig {
        models,
        methods,
        replications: args.reps,
        base_seed: args.seed,
        m: args.m,
    };
    config
        .validate()
        .map_err(|e| UsageError::new(e.to_string()))?;
    let report = run_benchmark(&config)?;
    match &args.out_dir {
        Some(dir) => {
            fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
            emit(
                Some(&dir.join("distribution.csv")),
                &report.distribution_csv(),
            )?;
            emit(Some(&dir.join("summary.csv")), &report.summary_csv())?;
            emit(Some(&dir.join("report.json")), &report.to_json())?;
            for cell in report.cells.iter().filter(|c| c.failed > 0) {
                eprintln!(
                    "warning: {} / {}: {} failed replications",
                    cell.model, cell.method, cell.failed
                );
            }
            Ok(())
        }
        None => emit(None, &report.distribution_csv()),
    }
}

pub fn ttmap_cmd(args: &TtmapArgs) -> Result<()> {
    if !(args.zeta_min >= 0.0 && args.zeta_min < args.zeta_max) {
        return Err(UsageError::new("need 0 <= --zeta-min < --zeta-max").into());
    }
    let x = read_series(&args.input)?;
    let path = detect(
        &x,
        &DetectionParams {
            method: Method::Wbs,
            m: args.m,
            augment: args.augment,
            seed: args.seed,
            zeta: 0.0,
        },
    )?;
    let mut csv = String::from("location,zeta_low,zeta_high\n");
    for row in path.time_threshold_map(args.zeta_min, args.zeta_max)? {
        writeln!(csv, "{},{},{}", row.location, row.zeta_low, row.zeta_high)?;
    }
    emit(args.out.as_deref(), &csv)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn model_tokens() {
        assert_eq!(parse_model("fms").unwrap().id(), "fms");
        assert_eq!(parse_model("teeth10:0.2").unwrap().id(), "teeth10-sd0.2");
        let r = parse_model("random:4:2:500").unwrap();
        assert_eq!(r.id(), "random-4-2-500");
        assert!(parse_model("random:4:2").is_err());
        assert!(parse_model("pelt").is_err());
        assert!(parse_model("fms:0.1:2").is_err());
    }
}
