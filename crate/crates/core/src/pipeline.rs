// SPDX-License-Identifier: MIT OR Apache-2.0

//! Detection method plus stopping rule, run end to end on one series.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Result, WildsegError};
use crate::segmentation::{detect, ChangePointSet, DetectionParams, Method, SolutionPath};
use crate::selection::{
    default_threshold, mad_sigma, ssic_select, SsicParams, SsicSelection, ThresholdSpec,
};
use crate::stats::TimeSeries;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "rule", rename_all = "lowercase")]
pub enum StoppingRule {
    /// `zeta = sigma_hat * C * sqrt(2 ln T)`.
    Threshold {
        c: f64,
    },
    /// A fixed threshold, independent of the noise level.
    Fixed {
        zeta: f64,
    },
    Ssic(SsicParams),
}

/// A method/stopping-rule combination such as `wbs-ssic` or `bs-c1.3`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MethodSpec {
    pub method: Method,
    pub stopping: StoppingRule,
    pub augment: bool,
}

impl MethodSpec {
    pub fn new(method: Method, stopping: StoppingRule) -> Self {
        Self {
            method,
            stopping,
            augment: true,
        }
    }

    /// Stable identifier, also accepted by [`FromStr`].
    pub fn id(&self) -> String {
        let rule = match self.stopping {
            StoppingRule::Threshold { c } => format!("c{c}"),
            StoppingRule::Fixed { zeta } => format!("z{zeta}"),
            StoppingRule::Ssic(p) if p == SsicParams::default() => "ssic".to_string(),
            StoppingRule::Ssic(p) => format!("ssic{}k{}", p.alpha, p.k),
        };
        let suffix = if self.augment { "" } else { "-noaug" };
        format!("{}-{rule}{suffix}", self.method)
    }
}

impl fmt::Display for MethodSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.id())
    }
}

impl FromStr for MethodSpec {
    type Err = WildsegError;

    /// `<bs|wbs>-<ssic|c<C>|z<zeta>|ssic<alpha>k<K>>[-noaug]`.
    fn from_str(s: &str) -> Result<Self> {
        let bad = || WildsegError::invalid_input(format!("cannot parse method spec '{s}'"));
        let (body, augment) = match s.strip_suffix("-noaug") {
            Some(b) => (b, false),
            None => (s, true),
        };
        let (method, rule) = body.split_once('-').ok_or_else(bad)?;
        let method: Method = method.parse()?;
        let number = |t: &str| t.parse::<f64>().map_err(|_| bad());
        let stopping = if rule == "ssic" {
            StoppingRule::Ssic(SsicParams::default())
        } else if let Some(rest) = rule.strip_prefix("ssic") {
            let (alpha, k) = rest.split_once('k').ok_or_else(bad)?;
            StoppingRule::Ssic(SsicParams {
                alpha: number(alpha)?,
                k: k.parse().map_err(|_| bad())?,
            })
        } else if let Some(c) = rule.strip_prefix('c') {
            StoppingRule::Threshold { c: number(c)? }
        } else if let Some(z) = rule.strip_prefix('z') {
            StoppingRule::Fixed { zeta: number(z)? }
        } else {
            return Err(bad());
        };
        let spec = MethodSpec {
            method,
            stopping,
            augment,
        };
        spec.validate()?;
        Ok(spec)
    }
}

impl MethodSpec {
    pub fn validate(&self) -> Result<()> {
        match self.stopping {
            StoppingRule::Threshold { c } if !(c > 0.0 && c.is_finite()) => Err(
                WildsegError::invalid_input(format!("C must be > 0; got {c}")),
            ),
            StoppingRule::Fixed { zeta } if !(zeta >= 0.0 && zeta.is_finite()) => Err(
                WildsegError::invalid_input(format!("threshold must be >= 0; got {zeta}")),
            ),
            StoppingRule::Ssic(p) => p.validate(),
            _ => Ok(()),
        }
    }
}

/// Everything a detection run produced.
#[derive(Debug, Clone, PartialEq)]
pub struct Detection {
    pub change_points: ChangePointSet,
    pub path: SolutionPath,
    /// Noise scale used or estimated; `None` when the rule never needed it.
    pub sigma_hat: Option<f64>,
    /// Threshold the change-points were read off at (zero for sSIC).
    pub zeta: f64,
    pub ssic: Option<SsicSelection>,
}

/// Runs `spec` on `x` with `m` random intervals drawn from `seed`.
///
/// `sigma` overrides the MAD noise estimate. Threshold stopping refuses to
/// run when the noise scale is zero.
pub fn run_detection(
    x: &TimeSeries,
    spec: &MethodSpec,
    m: usize,
    seed: u64,
    sigma: Option<f64>,
) -> Result<Detection> {
    spec.validate()?;
    let noise = || -> Result<f64> {
        match sigma {
            Some(s) => Ok(s),
            None => mad_sigma(x),
        }
    };
    let (zeta, sigma_hat) = match spec.stopping {
        StoppingRule::Threshold { c } => {
            let s = noise()?;
            if s == 0.0 {
                return Err(WildsegError::invalid_input(
                    "estimated noise scale is 0; threshold stopping would accept every split \
                     (supply sigma or use sSIC)",
                ));
            }
            (
                default_threshold(&ThresholdSpec::new(c, s, x.len())?),
                Some(s),
            )
        }
        StoppingRule::Fixed { zeta } => (zeta, None),
        StoppingRule::Ssic(_) => (0.0, if x.len() >= 3 { noise().ok() } else { sigma }),
    };
    let params = DetectionParams {
        method: spec.method,
        m: if spec.method == Method::Wbs { m } else { 0 },
        augment: spec.augment,
        seed,
        zeta,
    };
    let path = detect(x, &params)?;
    let (change_points, ssic) = match spec.stopping {
        StoppingRule::Ssic(p) => {
            let sel = ssic_select(x, &path, &p)?;
            (sel.change_points.clone(), Some(sel))
        }
        _ => (path.apply_threshold(zeta), None),
    };
    Ok(Detection {
        change_points,
        path,
        sigma_hat,
        zeta,
        ssic,
    })
}
