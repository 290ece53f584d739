//! Baseline power allocators and the validation contract every allocation
//! (including the solver's output) must satisfy.

use std::fmt;

use rand::Rng;
use rand_distr::Exp1;

use crate::error::{Error, Result};
use crate::metrics::{AllocationMatrix, FadingTrace};
use crate::radio::channel_power_gain;
use crate::scenario::{mr_rrh_distance, mrs_in_cell, ScenarioConfig, SegmentSchedule};

/// Exponent of the CSI-weighted allocator.
pub const DEFAULT_CSI_ALPHA: f64 = 0.2;

/// Linear channel power gains `|h_ij|^2` sampled at each segment midpoint.
#[derive(Debug, Clone, PartialEq)]
pub struct ChannelSnapshot {
    gains: AllocationMatrix,
}

impl ChannelSnapshot {
    pub fn deterministic(cfg: &ScenarioConfig, sched: &SegmentSchedule) -> Result<Self> {
        Self::with_fading(cfg, sched, &FadingTrace::none(cfg))
    }

    pub fn with_fading(
        cfg: &ScenarioConfig,
        sched: &SegmentSchedule,
        fading: &FadingTrace,
    ) -> Result<Self> {
        let mut gains = AllocationMatrix::zeros(cfg);
        let entries: Vec<_> = gains.active_entries().collect();
        for (i, j) in entries {
            let (a, b) = sched.interval(j);
            let d = mr_rrh_distance(cfg, i, 0.5 * (a + b))?;
            gains.set(i, j, channel_power_gain(d, fading.get(i, j), cfg)?);
        }
        Ok(ChannelSnapshot { gains })
    }

    /// Snapshot from explicit gains. Inactive entries are ignored.
    pub fn from_gains(gains: AllocationMatrix) -> Self {
        ChannelSnapshot { gains }
    }

    pub fn gain(&self, relay: usize, segment: usize) -> f64 {
        self.gains.get(relay, segment)
    }
}

/// `P_T / M` on every active entry.
pub fn constant_alloc(cfg: &ScenarioConfig) -> AllocationMatrix {
    let share = cfg.power_budget / cfg.relays as f64;
    AllocationMatrix::from_active_fn(cfg, |_, _| share)
}

/// `P_T` split equally among the relays inside the cell in each segment.
pub fn average_alloc(cfg: &ScenarioConfig) -> AllocationMatrix {
    AllocationMatrix::from_active_fn(cfg, |_, j| {
        cfg.power_budget / mrs_in_cell(cfg, j).expect("segment in range") as f64
    })
}

/// Each column is a uniform point on the simplex scaled to `P_T`, drawn by
/// normalizing exponential spacings.
pub fn random_alloc<R: Rng + ?Sized>(cfg: &ScenarioConfig, rng: &mut R) -> AllocationMatrix {
    let mut p = AllocationMatrix::zeros(cfg);
    for j in 0..p.segments() {
        let rows: Vec<usize> = (0..p.relays()).filter(|&i| p.is_active(i, j)).collect();
        let draws: Vec<f64> = rows.iter().map(|_| rng.sample::<f64, _>(Exp1)).collect();
        let total: f64 = draws.iter().sum();
        let mut assigned = 0.0;
        for (k, (&i, e)) in rows.iter().zip(&draws).enumerate() {
            // last entry takes the remainder so the column sums to P_T
            let w = if k + 1 == rows.len() {
                (cfg.power_budget - assigned).max(0.0)
            } else {
                cfg.power_budget * e / total
            };
            assigned += w;
            p.set(i, j, w);
        }
    }
    p
}

/// Inverse channel weighting: `P_ij = P_T (|h_ij|^2)^-a / sum_k (|h_kj|^2)^-a`.
pub fn csi_alloc(
    cfg: &ScenarioConfig,
    snapshot: &ChannelSnapshot,
    alpha: f64,
) -> Result<AllocationMatrix> {
    if !(alpha > 0.0 && alpha.is_finite()) {
        return Err(Error::Domain(format!("csi exponent {alpha}")));
    }
    let mut p = AllocationMatrix::zeros(cfg);
    for j in 0..p.segments() {
        let rows: Vec<usize> = (0..p.relays()).filter(|&i| p.is_active(i, j)).collect();
        let mut weights = Vec::with_capacity(rows.len());
        for &i in &rows {
            let g = snapshot.gain(i, j);
            if !(g > 0.0) {
                return Err(Error::Domain(format!(
                    "channel gain {g} for relay {i} in segment {j}"
                )));
            }
            weights.push(g.powf(-alpha));
        }
        let total: f64 = weights.iter().sum();
        for (&i, w) in rows.iter().zip(weights) {
            p.set(i, j, cfg.power_budget * w / total);
        }
    }
    Ok(p)
}

#[derive(Debug, Clone, PartialEq)]
pub enum Violation {
    Shape { rows: usize, cols: usize },
    InactivePower { relay: usize, segment: usize, watts: f64 },
    Negative { relay: usize, segment: usize, watts: f64 },
    Budget { segment: usize, column_sum: f64, budget: f64 },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::Shape { rows, cols } => write!(f, "matrix shape {rows}x{cols}"),
            Violation::InactivePower {
                relay,
                segment,
                watts,
            } => write!(f, "relay {relay} has {watts} W in inactive segment {segment}"),
            Violation::Negative {
                relay,
                segment,
                watts,
            } => write!(f, "relay {relay} has negative power {watts} W in segment {segment}"),
            Violation::Budget {
                segment,
                column_sum,
                budget,
            } => write!(f, "segment {segment} uses {column_sum} W of a {budget} W budget"),
        }
    }
}

/// Lists every way `p` breaks the mask, sign or per-segment budget rules.
pub fn validate_alloc(p: &AllocationMatrix, cfg: &ScenarioConfig, tol: f64) -> Vec<Violation> {
    if p.check_shape(cfg).is_err() {
        return vec![Violation::Shape {
            rows: p.relays(),
            cols: p.segments(),
        }];
    }
    let mut out = Vec::new();
    for i in 0..p.relays() {
        for j in 0..p.segments() {
            let w = p.get(i, j);
            if !p.is_active(i, j) && w != 0.0 {
                out.push(Violation::InactivePower {
                    relay: i,
                    segment: j,
                    watts: w,
                });
            } else if w < 0.0 || w.is_nan() {
                out.push(Violation::Negative {
                    relay: i,
                    segment: j,
                    watts: w,
                });
            }
        }
    }
    for j in 0..p.segments() {
        let s = p.column_sum(j);
        if s > cfg.power_budget + tol {
            out.push(Violation::Budget {
                segment: j,
                column_sum: s,
                budget: cfg.power_budget,
            });
        }
    }
    out
}
