//! Energy, delivered data, energy and spectral efficiency, and the data
//! gradient used by the solver.
//!
//! Delivered data is the time integral of the Shannon rate over each active
//! (relay, segment) cell, evaluated with composite Simpson quadrature. The
//! SNR per watt at each node does not depend on the allocation, so
//! [`ChannelGrid`] tabulates it once and every data or gradient evaluation
//! is a weighted sum of `log2(1 + P g)` terms.

use std::f64::consts::LN_2;

use rand::Rng;

use crate::error::{Error, Result};
use crate::radio::{snr_db, FadingModel, LinkConstants};
use crate::scenario::{
    is_active, mr_rrh_distance, watt_to_dbm, ScenarioConfig, SegmentSchedule,
};

/// Transmit powers (W) for every relay and segment, with the activity mask
/// implied by the scenario.
#[derive(Debug, Clone, PartialEq)]
pub struct AllocationMatrix {
    relays: usize,
    segments: usize,
    power: Vec<f64>,
    mask: Vec<bool>,
}

impl AllocationMatrix {
    pub fn zeros(cfg: &ScenarioConfig) -> Self {
        let relays = cfg.relays;
        let segments = cfg.segments();
        let mask = (0..relays)
            .flat_map(|i| (0..segments).map(move |j| (i, j)))
            .map(|(i, j)| is_active(cfg, i, j))
            .collect();
        AllocationMatrix {
            relays,
            segments,
            power: vec![0.0; relays * segments],
            mask,
        }
    }

    /// Builds a matrix by evaluating `f(relay, segment)` on active entries.
    pub fn from_active_fn(cfg: &ScenarioConfig, mut f: impl FnMut(usize, usize) -> f64) -> Self {
        let mut p = Self::zeros(cfg);
        for i in 0..p.relays {
            for j in 0..p.segments {
                if p.is_active(i, j) {
                    p.power[i * p.segments + j] = f(i, j);
                }
            }
        }
        p
    }

    pub fn relays(&self) -> usize {
        self.relays
    }

    pub fn segments(&self) -> usize {
        self.segments
    }

    pub fn is_active(&self, relay: usize, segment: usize) -> bool {
        self.mask[relay * self.segments + segment]
    }

    pub fn get(&self, relay: usize, segment: usize) -> f64 {
        self.power[relay * self.segments + segment]
    }

    /// Sets an entry. Writing to an inactive entry is allowed so that
    /// validation can be exercised on malformed matrices.
    pub fn set(&mut self, relay: usize, segment: usize, watts: f64) {
        self.power[relay * self.segments + segment] = watts;
    }

    /// Row-major view of all entries.
    pub fn as_slice(&self) -> &[f64] {
        &self.power
    }

    pub fn as_mut_slice(&mut self) -> &mut [f64] {
        &mut self.power
    }

    pub fn mask(&self) -> &[bool] {
        &self.mask
    }

    /// `(relay, segment)` pairs of the active entries in row-major order.
    pub fn active_entries(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        (0..self.relays)
            .flat_map(move |i| (0..self.segments).map(move |j| (i, j)))
            .filter(move |&(i, j)| self.is_active(i, j))
    }

    pub fn column_sum(&self, segment: usize) -> f64 {
        (0..self.relays).map(|i| self.get(i, segment)).sum()
    }

    pub fn column_sums(&self) -> Vec<f64> {
        (0..self.segments).map(|j| self.column_sum(j)).collect()
    }

    pub fn scaled(&self, factor: f64) -> Self {
        let mut out = self.clone();
        out.power.iter_mut().for_each(|p| *p *= factor);
        out
    }

    /// Reflection through the traversal midpoint: relay `i` in segment `j`
    /// maps to relay `M-1-i` in segment `S-1-j`.
    pub fn mirrored(&self) -> Self {
        let mut out = self.clone();
        for i in 0..self.relays {
            for j in 0..self.segments {
                out.power[i * self.segments + j] =
                    self.get(self.relays - 1 - i, self.segments - 1 - j);
            }
        }
        out
    }

    pub fn check_shape(&self, cfg: &ScenarioConfig) -> Result<()> {
        if self.relays != cfg.relays || self.segments != cfg.segments() {
            return Err(Error::ShapeMismatch {
                expected_rows: cfg.relays,
                expected_cols: cfg.segments(),
                rows: self.relays,
                cols: self.segments,
            });
        }
        Ok(())
    }
}

/// Total energy, `sum_j T_j * sum_i P_ij` (J).
pub fn total_energy(p: &AllocationMatrix, sched: &SegmentSchedule) -> Result<f64> {
    if p.segments() != sched.segments() {
        return Err(Error::ShapeMismatch {
            expected_rows: p.relays(),
            expected_cols: sched.segments(),
            rows: p.relays(),
            cols: p.segments(),
        });
    }
    Ok(sched
        .durations()
        .iter()
        .enumerate()
        .map(|(j, t)| t * p.column_sum(j))
        .sum())
}

pub fn energy_efficiency(data: f64, energy: f64) -> Result<f64> {
    if energy == 0.0 {
        return Err(Error::ZeroEnergy);
    }
    Ok(data / energy)
}

/// Delivered data per unit bandwidth per unit traversal time (bit/s/Hz).
pub fn spectral_efficiency(data: f64, cfg: &ScenarioConfig, sched: &SegmentSchedule) -> f64 {
    let per_hz = if cfg.rate_in_bits {
        data / cfg.bandwidth
    } else {
        data
    };
    per_hz / sched.total_time()
}

/// Composite Simpson rule with a fixed even number of subintervals per
/// segment.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Quadrature {
    subintervals: usize,
}

impl Default for Quadrature {
    fn default() -> Self {
        Quadrature { subintervals: 32 }
    }
}

impl Quadrature {
    pub fn simpson(subintervals: usize) -> Result<Self> {
        if subintervals < 2 || subintervals % 2 != 0 {
            return Err(Error::Domain(format!(
                "simpson subinterval count {subintervals}"
            )));
        }
        Ok(Quadrature { subintervals })
    }

    pub fn subintervals(&self) -> usize {
        self.subintervals
    }

    /// Nodes and weights on `[a, b]`.
    pub fn nodes(&self, a: f64, b: f64) -> (Vec<f64>, Vec<f64>) {
        let n = self.subintervals;
        let h = (b - a) / n as f64;
        let nodes = (0..=n).map(|k| a + h * k as f64).collect();
        let weights = (0..=n)
            .map(|k| {
                let c = if k == 0 || k == n {
                    1.0
                } else if k % 2 == 1 {
                    4.0
                } else {
                    2.0
                };
                c * h / 3.0
            })
            .collect();
        (nodes, weights)
    }
}

/// Block fading attenuation (dB) per relay and segment.
#[derive(Debug, Clone, PartialEq)]
pub struct FadingTrace {
    segments: usize,
    attenuation_db: Vec<f64>,
}

impl FadingTrace {
    pub fn none(cfg: &ScenarioConfig) -> Self {
        FadingTrace {
            segments: cfg.segments(),
            attenuation_db: vec![0.0; cfg.relays * cfg.segments()],
        }
    }

    /// Draws one envelope per (relay, segment) cell, row-major.
    pub fn sample<R: Rng + ?Sized>(cfg: &ScenarioConfig, model: &FadingModel, rng: &mut R) -> Self {
        let attenuation_db = (0..cfg.relays * cfg.segments())
            .map(|_| model.sample_attenuation_db(rng))
            .collect();
        FadingTrace {
            segments: cfg.segments(),
            attenuation_db,
        }
    }

    pub fn get(&self, relay: usize, segment: usize) -> f64 {
        self.attenuation_db[relay * self.segments + segment]
    }
}

/// Data delivered to relay `relay` during segment `segment` at constant
/// power `watts`, integrated directly from the SNR model.
pub fn segment_data(
    watts: f64,
    relay: usize,
    segment: usize,
    cfg: &ScenarioConfig,
    sched: &SegmentSchedule,
    quad: &Quadrature,
) -> Result<f64> {
    if !is_active(cfg, relay, segment) {
        return Err(Error::InactiveEntry { relay, segment });
    }
    if watts < 0.0 {
        return Err(Error::NegativePower(watts));
    }
    if watts == 0.0 {
        return Ok(0.0);
    }
    let consts = LinkConstants::from_config(cfg)?;
    let tx_dbm = watt_to_dbm(watts);
    let (a, b) = sched.interval(segment);
    let (nodes, weights) = quad.nodes(a, b);
    let mut acc = 0.0;
    for (t, w) in nodes.into_iter().zip(weights) {
        let d = mr_rrh_distance(cfg, relay, t)?;
        let snr = snr_db(tx_dbm, d, 0.0, &consts, cfg)?;
        acc += w * (1.0 + 10f64.powf(snr / 10.0)).log2();
    }
    Ok(rate_scale(cfg) * acc)
}

fn rate_scale(cfg: &ScenarioConfig) -> f64 {
    if cfg.rate_in_bits {
        cfg.bandwidth
    } else {
        1.0
    }
}

#[derive(Debug, Clone)]
struct CellNodes {
    weights: Vec<f64>,
    /// Linear SNR per watt of transmit power at each node.
    gain: Vec<f64>,
}

/// Per-node SNR-per-watt tables for every active (relay, segment) cell.
///
/// The geometry (`cfg`) and the time grid (`sched`) are independent inputs:
/// a plan built for one speed can be evaluated against the kinematics of
/// another by pairing that plan's schedule with the true configuration.
#[derive(Debug, Clone)]
pub struct ChannelGrid {
    relays: usize,
    segments: usize,
    scale: f64,
    cells: Vec<Option<CellNodes>>,
}

impl ChannelGrid {
    pub fn new(cfg: &ScenarioConfig, sched: &SegmentSchedule, quad: &Quadrature) -> Result<Self> {
        Self::with_fading(cfg, sched, quad, &FadingTrace::none(cfg))
    }

    pub fn with_fading(
        cfg: &ScenarioConfig,
        sched: &SegmentSchedule,
        quad: &Quadrature,
        fading: &FadingTrace,
    ) -> Result<Self> {
        if sched.segments() != cfg.segments() {
            return Err(Error::ShapeMismatch {
                expected_rows: cfg.relays,
                expected_cols: cfg.segments(),
                rows: cfg.relays,
                cols: sched.segments(),
            });
        }
        let consts = LinkConstants::from_config(cfg)?;
        let one_watt_dbm = watt_to_dbm(1.0);
        let segments = cfg.segments();
        let mut cells = Vec::with_capacity(cfg.relays * segments);
        for i in 0..cfg.relays {
            for j in 0..segments {
                if !is_active(cfg, i, j) {
                    cells.push(None);
                    continue;
                }
                let (a, b) = sched.interval(j);
                let (nodes, weights) = quad.nodes(a, b);
                let gamma = fading.get(i, j);
                let gain = nodes
                    .iter()
                    .map(|&t| {
                        let d = mr_rrh_distance(cfg, i, t)?;
                        Ok(10f64.powf(snr_db(one_watt_dbm, d, gamma, &consts, cfg)? / 10.0))
                    })
                    .collect::<Result<Vec<_>>>()?;
                cells.push(Some(CellNodes { weights, gain }));
            }
        }
        Ok(ChannelGrid {
            relays: cfg.relays,
            segments,
            scale: rate_scale(cfg),
            cells,
        })
    }

    fn cell(&self, relay: usize, segment: usize) -> Option<&CellNodes> {
        self.cells[relay * self.segments + segment].as_ref()
    }

    /// Data of one cell at constant power `watts`; inactive cells give 0.
    pub fn entry_data(&self, relay: usize, segment: usize, watts: f64) -> f64 {
        match self.cell(relay, segment) {
            Some(c) if watts > 0.0 => {
                let acc: f64 = c
                    .weights
                    .iter()
                    .zip(&c.gain)
                    .map(|(w, g)| w * (watts * g).ln_1p())
                    .sum();
                self.scale * acc / LN_2
            }
            _ => 0.0,
        }
    }

    /// Derivative of [`Self::entry_data`] with respect to `watts`.
    pub fn entry_derivative(&self, relay: usize, segment: usize, watts: f64) -> f64 {
        match self.cell(relay, segment) {
            Some(c) => {
                let acc: f64 = c
                    .weights
                    .iter()
                    .zip(&c.gain)
                    .map(|(w, g)| w * g / (1.0 + watts.max(0.0) * g))
                    .sum();
                self.scale * acc / LN_2
            }
            None => 0.0,
        }
    }

    /// Second derivative of [`Self::entry_data`] with respect to `watts`.
    pub fn entry_curvature(&self, relay: usize, segment: usize, watts: f64) -> f64 {
        match self.cell(relay, segment) {
            Some(c) => {
                let acc: f64 = c
                    .weights
                    .iter()
                    .zip(&c.gain)
                    .map(|(w, g)| {
                        let q = 1.0 + watts.max(0.0) * g;
                        -w * g * g / (q * q)
                    })
                    .sum();
                self.scale * acc / LN_2
            }
            None => 0.0,
        }
    }

    fn check(&self, p: &AllocationMatrix) -> Result<()> {
        if p.relays() != self.relays || p.segments() != self.segments {
            return Err(Error::ShapeMismatch {
                expected_rows: self.relays,
                expected_cols: self.segments,
                rows: p.relays(),
                cols: p.segments(),
            });
        }
        Ok(())
    }

    pub fn total_data(&self, p: &AllocationMatrix) -> Result<f64> {
        Ok(self.data_by_segment(p)?.iter().sum())
    }

    /// Delivered data summed over relays, per segment.
    pub fn data_by_segment(&self, p: &AllocationMatrix) -> Result<Vec<f64>> {
        self.check(p)?;
        let mut out = vec![0.0; self.segments];
        for i in 0..self.relays {
            for (j, acc) in out.iter_mut().enumerate() {
                let w = p.get(i, j);
                if w < 0.0 {
                    return Err(Error::NegativePower(w));
                }
                *acc += self.entry_data(i, j, w);
            }
        }
        Ok(out)
    }

    /// `dD/dP_ij` for every entry; inactive entries are 0.
    pub fn grad_total_data(&self, p: &AllocationMatrix) -> Result<Vec<f64>> {
        self.check(p)?;
        let mut grad = vec![0.0; self.relays * self.segments];
        for i in 0..self.relays {
            for j in 0..self.segments {
                grad[i * self.segments + j] = self.entry_derivative(i, j, p.get(i, j));
            }
        }
        Ok(grad)
    }
}

/// Convenience wrapper building a deterministic grid with default quadrature.
pub fn total_data(p: &AllocationMatrix, cfg: &ScenarioConfig, sched: &SegmentSchedule) -> Result<f64> {
    ChannelGrid::new(cfg, sched, &Quadrature::default())?.total_data(p)
}

pub fn grad_total_data(
    p: &AllocationMatrix,
    cfg: &ScenarioConfig,
    sched: &SegmentSchedule,
) -> Result<Vec<f64>> {
    ChannelGrid::new(cfg, sched, &Quadrature::default())?.grad_total_data(p)
}

#[derive(Debug, Clone, PartialEq)]
pub struct MetricsRecord {
    /// J
    pub energy: f64,
    /// bits (or bit/s/Hz·s when the bandwidth factor is off)
    pub data: f64,
    /// bits/J; NaN when the energy is zero
    pub energy_efficiency: f64,
    /// bit/s/Hz
    pub spectral_efficiency: f64,
    pub energy_by_segment: Vec<f64>,
    pub data_by_segment: Vec<f64>,
}

/// Evaluates `p` against a channel grid. Energy uses the durations of
/// `sched`, which must be the schedule the plan was built on.
pub fn evaluate(
    p: &AllocationMatrix,
    grid: &ChannelGrid,
    cfg: &ScenarioConfig,
    sched: &SegmentSchedule,
) -> Result<MetricsRecord> {
    let data_by_segment = grid.data_by_segment(p)?;
    let energy_by_segment: Vec<f64> = sched
        .durations()
        .iter()
        .enumerate()
        .map(|(j, t)| t * p.column_sum(j))
        .collect();
    let energy = total_energy(p, sched)?;
    let data: f64 = data_by_segment.iter().sum();
    Ok(MetricsRecord {
        energy,
        data,
        energy_efficiency: energy_efficiency(data, energy).unwrap_or(f64::NAN),
        spectral_efficiency: spectral_efficiency(data, cfg, sched),
        energy_by_segment,
        data_by_segment,
    })
}
