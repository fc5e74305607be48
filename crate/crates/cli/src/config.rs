//! Command configuration: schedules, the source of `delta`, and paths.

use std::path::PathBuf;
use std::str::FromStr;

use dyngibbs::models::{regime_delta, Model};
use dyngibbs::mrf::DEFAULT_DEGREE_CAP;
use dyngibbs::{dobrushin_check, MrfInstance, PowerLaw, ScheduleFns};

use crate::error::{fail, ExitKind};

/// Parses `a`, `a*n^b`, `a*n^b*L^c` (any order of factors, `log` accepted
/// for `L`, bare `n` or `L` meaning exponent 1).
pub fn parse_power_law(s: &str) -> anyhow::Result<PowerLaw> {
    let (mut a, mut b, mut c) = (None, 0.0, 0.0);
    for factor in s.split('*').map(str::trim) {
        let (base, exp) = match factor.split_once('^') {
            Some((base, e)) => (base.trim(), Some(e.trim())),
            None => (factor, None),
        };
        let exp = match exp {
            Some(e) => e
                .parse::<f64>()
                .map_err(|_| fail(ExitKind::Usage, format!("bad exponent {e:?} in {s:?}")))?,
            None => 1.0,
        };
        match base {
            "n" => b += exp,
            "L" | "log" => c += exp,
            num => {
                let x: f64 = num
                    .parse()
                    .map_err(|_| fail(ExitKind::Usage, format!("bad factor {factor:?} in {s:?}")))?;
                if a.is_some() {
                    return Err(fail(ExitKind::Usage, format!("two constants in {s:?}")));
                }
                a = Some(x.powf(exp));
            }
        }
    }
    PowerLaw::new(a.unwrap_or(1.0), b, c).map_err(|e| fail(ExitKind::Usage, e.to_string()))
}

/// `N=...,eps=...`, each side a power law in `n`.
pub fn parse_schedule(s: &str) -> anyhow::Result<ScheduleFns> {
    let (mut count, mut eps) = (None, None);
    for part in s.split(',') {
        let (key, value) = part
            .split_once('=')
            .ok_or_else(|| fail(ExitKind::Usage, format!("schedule entry {part:?} lacks '='")))?;
        let law = parse_power_law(value)?;
        match key.trim() {
            "N" => count = Some(law),
            "eps" => eps = Some(law),
            other => return Err(fail(ExitKind::Usage, format!("unknown schedule key {other:?}"))),
        }
    }
    match (count, eps) {
        (Some(c), Some(e)) => Ok(ScheduleFns::new(c, e)),
        _ => Err(fail(ExitKind::Usage, "schedule needs both N= and eps=")),
    }
}

/// Where the contraction gap `delta` comes from.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum DeltaSource {
    Given(f64),
    /// Exact Dobrushin influence of the instance.
    Check,
    /// Closed-form regime of a standard model.
    Model(Model),
}

impl FromStr for DeltaSource {
    type Err = anyhow::Error;

    fn from_str(s: &str) -> anyhow::Result<Self> {
        if s == "check" {
            return Ok(Self::Check);
        }
        if let Some(x) = s.strip_prefix("given:") {
            let d: f64 = x
                .parse()
                .map_err(|_| fail(ExitKind::Usage, format!("bad delta {x:?}")))?;
            if !(d > 0.0 && d < 1.0) {
                return Err(fail(ExitKind::Usage, format!("delta must lie in (0, 1), got {d}")));
            }
            return Ok(Self::Given(d));
        }
        if let Some(m) = s.strip_prefix("model:") {
            let model = m.parse::<Model>().map_err(|e| fail(ExitKind::Usage, e.to_string()))?;
            return Ok(Self::Model(model));
        }
        Err(fail(
            ExitKind::Usage,
            format!("delta must be given:X, check or model:NAME, got {s:?}"),
        ))
    }
}

impl DeltaSource {
    /// `delta` certified for `inst`. Fails with a regime violation when the
    /// instance has no positive contraction.
    pub fn resolve(&self, inst: &MrfInstance) -> anyhow::Result<f64> {
        match *self {
            Self::Given(d) => Ok(d),
            Self::Check => {
                let r = dobrushin_check(inst, DEFAULT_DEGREE_CAP)
                    .map_err(|e| fail(ExitKind::Regime, format!("cannot certify delta: {e}")))?;
                if r.satisfied {
                    Ok(r.delta)
                } else {
                    Err(fail(
                        ExitKind::Regime,
                        format!("Dobrushin condition fails: max influence {:.6}", 1.0 - r.delta),
                    ))
                }
            }
            Self::Model(m) => regime_delta(m, inst).map_err(|e| fail(ExitKind::Regime, e.to_string())),
        }
    }
}

/// Largest `n` the schedule is checked up to, given the starting size.
pub fn schedule_range_end(n: usize) -> usize {
    (4 * n).max(1024)
}

pub fn check_schedule(fns: &ScheduleFns, n: usize) -> anyhow::Result<()> {
    let r = fns.check(1..=schedule_range_end(n));
    if r.passed {
        Ok(())
    } else {
        Err(fail(
            ExitKind::Usage,
            format!(
                "schedule rejected: C1 = {:.3}, C2 = {:.3}, values in range: {}",
                r.c1, r.c2, r.in_range
            ),
        ))
    }
}

/// Inputs shared by `run` and `bench`.
#[derive(Debug, Clone)]
pub struct RunConfig {
    pub instance: PathBuf,
    pub updates: Option<PathBuf>,
    pub schedule: ScheduleFns,
    pub delta: DeltaSource,
    pub seed: u64,
    pub queries: Option<PathBuf>,
    pub out: PathBuf,
    pub threads: Option<usize>,
}
