//! Single runs, parameter sweeps and the velocity-error Monte Carlo study.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;

use mmrelay_core::scenario::{dbm_to_watt, kmh_to_mps};
use mmrelay_core::ScenarioConfig;

use crate::config::HarnessConfig;
use crate::error::{ConfigError, HarnessError};
use crate::records::{aggregate, RunRecord};
use crate::schemes::{run_trial, Scheme};

/// Sweepable quantity. Values are given in the units of [`Param::unit`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Param {
    Relays,
    CellWidth,
    Speed,
    PowerBudget,
    SigmaV,
}

impl Param {
    pub const ALL: [Param; 5] = [
        Param::Relays,
        Param::CellWidth,
        Param::Speed,
        Param::PowerBudget,
        Param::SigmaV,
    ];

    /// Name used in result files and figure ids.
    pub fn name(self) -> &'static str {
        match self {
            Param::Relays => "M",
            Param::CellWidth => "dl",
            Param::Speed => "v",
            Param::PowerBudget => "PT",
            Param::SigmaV => "sigma_v",
        }
    }

    pub fn unit(self) -> &'static str {
        match self {
            Param::Relays => "count",
            Param::CellWidth => "m",
            Param::Speed => "km/h",
            Param::PowerBudget => "dBm",
            Param::SigmaV => "m/s",
        }
    }

    pub fn parse(text: &str) -> Option<Param> {
        match text {
            "M" | "m" => Some(Param::Relays),
            "dl" | "d_l" => Some(Param::CellWidth),
            "v" => Some(Param::Speed),
            "PT" | "P_T" | "p_t" => Some(Param::PowerBudget),
            "sigma_v" => Some(Param::SigmaV),
            _ => None,
        }
    }

    /// Scenario at this sweep value. Velocity error leaves the scenario as is.
    pub fn apply(self, base: &ScenarioConfig, value: f64) -> Result<ScenarioConfig, String> {
        let mut cfg = base.clone();
        match self {
            Param::Relays => {
                if value < 1.0 || value.fract() != 0.0 {
                    return Err(format!("relay count {value} is not a positive integer"));
                }
                cfg.relays = value as usize;
            }
            Param::CellWidth => cfg.cell_width = value,
            Param::Speed => cfg.speed = kmh_to_mps(value),
            Param::PowerBudget => cfg.power_budget = dbm_to_watt(value),
            Param::SigmaV => {}
        }
        cfg.validate().map_err(|e| e.to_string())?;
        Ok(cfg)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepSpec {
    pub param: Param,
    pub values: Vec<f64>,
    pub schemes: Vec<Scheme>,
    pub trials: usize,
    pub seed: u64,
}

impl SweepSpec {
    pub fn validate(&self) -> Result<(), ConfigError> {
        if self.values.is_empty() {
            return Err(ConfigError::Invalid("sweep value list is empty".into()));
        }
        if self.values.iter().any(|v| !v.is_finite()) {
            return Err(ConfigError::Invalid("sweep values must be finite".into()));
        }
        if self.schemes.is_empty() {
            return Err(ConfigError::Invalid("scheme list is empty".into()));
        }
        if self.trials == 0 {
            return Err(ConfigError::Invalid("trials must be at least 1".into()));
        }
        Ok(())
    }
}

/// RNG of one trial: the master seed picks the key, the point and trial
/// indices pick the stream.
pub fn trial_rng(seed: u64, point: usize, trial: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(((point as u64) << 32) | trial as u64);
    rng
}

/// Separate stream for velocity-error draws so the shared fading and random
/// draws do not depend on the error level.
fn velocity_rng(seed: u64, point: usize, trial: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream((1 << 63) | ((point as u64) << 32) | trial as u64);
    rng
}

fn one_point(
    hc: &HarnessConfig,
    scenario: &Result<ScenarioConfig, String>,
    param: &str,
    value: Option<f64>,
    trial: usize,
    plan_speed: impl FnOnce(&ScenarioConfig) -> f64,
    mut rng: ChaCha8Rng,
) -> Vec<RunRecord> {
    let hash = match scenario {
        Ok(s) => HarnessConfig {
            scenario: s.clone(),
            ..hc.clone()
        }
        .hash(),
        Err(_) => hc.hash(),
    };
    let failed = |msg: &str| {
        hc.schemes
            .iter()
            .map(|&s| RunRecord::failure(&hash, s, param, value, trial, msg))
            .collect()
    };
    match scenario {
        Ok(truth) => {
            let v_hat = plan_speed(truth);
            match run_trial(hc, truth, v_hat, &mut rng) {
                Ok(t) => RunRecord::from_trial(&hash, param, value, trial, &t),
                Err(e) => failed(&e.to_string()),
            }
        }
        Err(msg) => failed(msg),
    }
}

/// Mean rows for each (value, scheme) group, in value then scheme order.
fn aggregates(rows: &[RunRecord], values: usize, schemes: &[Scheme]) -> Vec<RunRecord> {
    let mut out = Vec::new();
    let per_point = rows.len() / values.max(1);
    for chunk in rows.chunks(per_point.max(1)) {
        for s in schemes {
            let group: Vec<RunRecord> = chunk.iter().filter(|r| r.scheme == s.name()).cloned().collect();
            out.extend(aggregate(&group));
        }
    }
    out
}

/// All configured schemes on the scenario as given, trial 0.
pub fn run_scenario(hc: &HarnessConfig) -> Result<Vec<RunRecord>, HarnessError> {
    crate::config::validate(hc)?;
    let scenario = Ok(hc.scenario.clone());
    Ok(one_point(
        hc,
        &scenario,
        "none",
        None,
        0,
        |s| s.speed,
        trial_rng(hc.scenario.seed, 0, 0),
    ))
}

/// One row per (value, trial, scheme), then one mean row per (value, scheme).
/// Points run in parallel; row order does not depend on scheduling.
pub fn sweep(hc: &HarnessConfig, spec: &SweepSpec) -> Result<Vec<RunRecord>, HarnessError> {
    spec.validate()?;
    if spec.param == Param::SigmaV {
        let hc = HarnessConfig {
            schemes: spec.schemes.clone(),
            scenario: ScenarioConfig {
                seed: spec.seed,
                ..hc.scenario.clone()
            },
            ..hc.clone()
        };
        return monte_carlo_velocity_error(&hc, &spec.values, spec.trials);
    }
    let hc = HarnessConfig {
        schemes: spec.schemes.clone(),
        ..hc.clone()
    };
    let param = spec.param.name();
    let tasks: Vec<(usize, usize)> = (0..spec.values.len())
        .flat_map(|p| (0..spec.trials).map(move |t| (p, t)))
        .collect();
    let rows: Vec<RunRecord> = tasks
        .par_iter()
        .map(|&(p, t)| {
            let value = spec.values[p];
            let scenario = spec.param.apply(&hc.scenario, value);
            one_point(
                &hc,
                &scenario,
                param,
                Some(value),
                t,
                |s| s.speed,
                trial_rng(spec.seed, p, t),
            )
        })
        .collect::<Vec<_>>()
        .into_iter()
        .flatten()
        .collect();
    let means = aggregates(&rows, spec.values.len(), &hc.schemes);
    Ok(rows.into_iter().chain(means).collect())
}

/// Velocity-error study. Each trial draws `v_e = |N(0, sigma^2)|`, plans
/// every scheme for `v + v_e` and evaluates under `v`. Fading and random
/// draws depend only on the trial index, so `sigma = 0` reproduces
/// [`run_scenario`] exactly in trial 0.
pub fn monte_carlo_velocity_error(
    hc: &HarnessConfig,
    sigmas: &[f64],
    trials: usize,
) -> Result<Vec<RunRecord>, HarnessError> {
    crate::config::validate(hc)?;
    if trials == 0 {
        return Err(ConfigError::Invalid("trials must be at least 1".into()).into());
    }
    if sigmas.is_empty() || sigmas.iter().any(|s| !(*s >= 0.0 && s.is_finite())) {
        return Err(ConfigError::Invalid("sigma_v values must be finite and nonnegative".into()).into());
    }
    let seed = hc.scenario.seed;
    let tasks: Vec<(usize, usize)> = (0..sigmas.len())
        .flat_map(|p| (0..trials).map(move |t| (p, t)))
        .collect();
    let scenario = Ok(hc.scenario.clone());
    let rows: Vec<RunRecord> = tasks
        .par_iter()
        .map(|&(p, t)| {
            let sigma = sigmas[p];
            let plan_speed = |s: &ScenarioConfig| {
                let z: f64 = velocity_rng(seed, p, t).sample(StandardNormal);
                s.speed + sigma * z.abs()
            };
            one_point(
                hc,
                &scenario,
                Param::SigmaV.name(),
                Some(sigma),
                t,
                plan_speed,
                trial_rng(seed, 0, t),
            )
        })
        .collect::<Vec<_>>()
        .into_iter()
        .flatten()
        .collect();
    let means = aggregates(&rows, sigmas.len(), &hc.schemes);
    Ok(rows.into_iter().chain(means).collect())
}

/// True when any optimizer row failed to converge.
pub fn any_unconverged(rows: &[RunRecord]) -> bool {
    rows.iter().any(|r| !r.is_aggregate() && r.unconverged())
}
