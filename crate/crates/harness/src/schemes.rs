//! One trial of every allocation scheme on a single scenario.

use std::time::Instant;

use mmrelay_core::allocators::{
    average_alloc, constant_alloc, csi_alloc, random_alloc, ChannelSnapshot,
};
use mmrelay_core::metrics::{evaluate, ChannelGrid, FadingTrace, MetricsRecord};
use mmrelay_core::optimizer::{Problem, Solution};
use mmrelay_core::radio::FadingModel;
use mmrelay_core::scenario::{segment_boundaries, DataFloor};
use mmrelay_core::{AllocationMatrix, ScenarioConfig};
use rand_chacha::ChaCha8Rng;

use crate::config::{FadingMode, HarnessConfig};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Scheme {
    Optimized,
    Constant,
    Average,
    Random,
    Csi,
}

impl Scheme {
    pub const ALL: [Scheme; 5] = [
        Scheme::Optimized,
        Scheme::Constant,
        Scheme::Average,
        Scheme::Random,
        Scheme::Csi,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Scheme::Optimized => "optimized",
            Scheme::Constant => "constant",
            Scheme::Average => "average",
            Scheme::Random => "random",
            Scheme::Csi => "csi",
        }
    }

    pub fn from_name(name: &str) -> Option<Scheme> {
        Scheme::ALL.into_iter().find(|s| s.name() == name)
    }

    /// Comma-separated names; order is normalized and duplicates dropped.
    pub fn parse_list(text: &str) -> Result<Vec<Scheme>, String> {
        let mut out = Vec::new();
        for name in text.split(',').map(str::trim).filter(|s| !s.is_empty()) {
            let s = Scheme::from_name(name).ok_or_else(|| format!("unknown scheme {name:?}"))?;
            out.push(s);
        }
        out.sort();
        out.dedup();
        if out.is_empty() {
            return Err("scheme list is empty".into());
        }
        Ok(out)
    }
}

/// Solver diagnostics attached to the optimized scheme's result.
#[derive(Debug, Clone, PartialEq)]
pub struct SolverSummary {
    pub converged: bool,
    pub cycles: usize,
    pub residual: f64,
    pub kkt: f64,
}

impl From<&Solution> for SolverSummary {
    fn from(s: &Solution) -> Self {
        SolverSummary {
            converged: s.converged,
            cycles: s.cycles,
            residual: s.final_residual,
            kkt: s.kkt.max(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SchemeOutcome {
    pub scheme: Scheme,
    pub result: Result<MetricsRecord, String>,
    pub solver: Option<SolverSummary>,
    pub allocation: Option<AllocationMatrix>,
    pub wall_time_s: f64,
}

/// Shared inputs of one trial.
#[derive(Debug, Clone)]
pub struct Trial {
    pub d_min: f64,
    pub plan_speed: f64,
    pub outcomes: Vec<SchemeOutcome>,
}

/// Plans every scheme for `plan_speed` and evaluates the plans under the
/// kinematics of `truth`. Fading and the random allocation are drawn from
/// `rng` once and shared by all schemes. Only the CSI scheme sees the fading
/// realization when planning.
pub fn run_trial(
    hc: &HarnessConfig,
    truth: &ScenarioConfig,
    plan_speed: f64,
    rng: &mut ChaCha8Rng,
) -> Result<Trial, mmrelay_core::Error> {
    let plan = ScenarioConfig {
        speed: plan_speed,
        ..truth.clone()
    };
    plan.validate()?;
    let quad = &hc.solver.quadrature;

    let fading = match hc.fading {
        FadingMode::None => FadingTrace::none(truth),
        FadingMode::Rician => {
            let model = FadingModel::from_k_factor(truth.rician_k_db, 1.0)?;
            FadingTrace::sample(truth, &model, rng)
        }
    };
    let random = random_alloc(&plan, rng);

    // The planner sees the deterministic channel; fading only enters evaluation.
    let sched = segment_boundaries(&plan)?;
    let plan_grid = ChannelGrid::new(&plan, &sched, quad)?;
    let eval_grid = if plan_speed == truth.speed && hc.fading == FadingMode::None {
        plan_grid.clone()
    } else {
        ChannelGrid::with_fading(truth, &sched, quad, &fading)?
    };
    let d_min = match plan.data_floor {
        DataFloor::FractionOfAverage(rho) => rho * plan_grid.total_data(&average_alloc(&plan))?,
        DataFloor::Explicit(bits) => bits,
    };

    let mut outcomes = Vec::with_capacity(hc.schemes.len());
    for &scheme in &hc.schemes {
        let start = Instant::now();
        let mut solver = None;
        let planned: Result<AllocationMatrix, String> = match scheme {
            Scheme::Constant => Ok(constant_alloc(&plan)),
            Scheme::Average => Ok(average_alloc(&plan)),
            Scheme::Random => Ok(random.clone()),
            Scheme::Csi => ChannelSnapshot::with_fading(&plan, &sched, &fading)
                .and_then(|snap| csi_alloc(&plan, &snap, hc.csi_alpha))
                .map_err(|e| e.to_string()),
            Scheme::Optimized => {
                Problem::with_grid(&plan, &sched, plan_grid.clone(), d_min, hc.solver.budget_mode)
                    .and_then(|pr| pr.solve(&average_alloc(&plan), &hc.solver))
                    .map(|sol| {
                        solver = Some(SolverSummary::from(&sol));
                        sol.allocation
                    })
                    .map_err(|e| e.to_string())
            }
        };
        let result = planned
            .clone()
            .and_then(|p| evaluate(&p, &eval_grid, truth, &sched).map_err(|e| e.to_string()));
        outcomes.push(SchemeOutcome {
            scheme,
            result,
            solver,
            allocation: planned.ok(),
            wall_time_s: start.elapsed().as_secs_f64(),
        });
    }
    Ok(Trial {
        d_min,
        plan_speed,
        outcomes,
    })
}
