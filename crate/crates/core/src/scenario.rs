//! Train and cell geometry plus the three-phase traversal timeline.
//!
//! The track is the x axis. The cell covers `[0, d_l]` and the radio head sits
//! abeam the cell midpoint at a perpendicular offset `d0`. The head relay
//! reaches `x = 0` at `t = 0` and relay `i` (0-based) trails it by
//! `i * d_MR`.
//!
//! Segments are numbered from 0. With `M` relays and `N` location bins there
//! are `2M + N - 2` segments: the first `M - 1` cover relays entering, the
//! next `N` cover the bins with every relay in the cell, and the last `M - 1`
//! cover relays leaving. Relay `i` is served in segments `i ..= i + M + N - 2`.

use std::ops::RangeInclusive;

use crate::error::{Error, Result};

/// Converts km/h to m/s.
pub fn kmh_to_mps(kmh: f64) -> f64 {
    kmh / 3.6
}

/// Converts dBm to watts.
pub fn dbm_to_watt(dbm: f64) -> f64 {
    10f64.powf(dbm / 10.0) / 1000.0
}

/// Converts watts to dBm. Zero power maps to negative infinity.
pub fn watt_to_dbm(watt: f64) -> f64 {
    10.0 * (watt * 1000.0).log10()
}

/// How the data floor `D_min` of the optimization is chosen.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum DataFloor {
    /// `D_min = rho * D(average allocation)`, `rho` in `(0, 1]`.
    FractionOfAverage(f64),
    /// Explicit floor in the same units as delivered data.
    Explicit(f64),
}

impl Default for DataFloor {
    fn default() -> Self {
        DataFloor::FractionOfAverage(0.8)
    }
}

/// Physical and policy parameters of one traversal, in SI linear units
/// except where the field name says dB.
#[derive(Debug, Clone, PartialEq)]
pub struct ScenarioConfig {
    /// Perpendicular distance from the radio head to the rail (m).
    pub rail_offset: f64,
    /// Cell coverage width along the track, `d_l` (m).
    pub cell_width: f64,
    /// Spacing between adjacent relays, `d_MR` (m).
    pub relay_spacing: f64,
    /// Number of relays `M`.
    pub relays: usize,
    /// Number of stage-two location bins `N`.
    pub bins: usize,
    /// Train speed (m/s).
    pub speed: f64,
    /// Per-segment transmit power budget `P_T` (W).
    pub power_budget: f64,
    /// System bandwidth (Hz).
    pub bandwidth: f64,
    pub noise_figure_db: f64,
    pub path_loss_exponent: f64,
    /// Carrier wavelength (m).
    pub wavelength: f64,
    pub shadowing_db: f64,
    /// Half-power beamwidth (degrees).
    pub beamwidth_deg: f64,
    /// Rician K-factor used when fading is switched on (dB).
    pub rician_k_db: f64,
    pub data_floor: DataFloor,
    /// Multiply the Shannon rate by the bandwidth so data is in bits.
    /// When false, data is in bit/s/Hz times seconds.
    pub rate_in_bits: bool,
    pub seed: u64,
}

impl ScenarioConfig {
    /// The reference scenario: four relays, 200 m cell, 300 km/h, 40 dBm
    /// budget and the remaining radio constants at their nominal values.
    pub fn reference() -> Self {
        ScenarioConfig {
            rail_offset: 20.0,
            cell_width: 200.0,
            relay_spacing: 25.0,
            relays: 4,
            bins: 6,
            speed: kmh_to_mps(300.0),
            power_budget: dbm_to_watt(40.0),
            bandwidth: 2.16e9,
            noise_figure_db: 6.0,
            path_loss_exponent: 2.0,
            wavelength: 0.005,
            shadowing_db: 10.0,
            beamwidth_deg: 30.0,
            rician_k_db: 10.0,
            data_floor: DataFloor::default(),
            rate_in_bits: true,
            seed: 1,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let positive = [
            ("rail offset", self.rail_offset),
            ("cell width", self.cell_width),
            ("relay spacing", self.relay_spacing),
            ("speed", self.speed),
            ("power budget", self.power_budget),
            ("bandwidth", self.bandwidth),
            ("path loss exponent", self.path_loss_exponent),
            ("wavelength", self.wavelength),
        ];
        for (name, value) in positive {
            if !(value.is_finite() && value > 0.0) {
                return Err(Error::InvalidConfig(format!(
                    "{name} must be positive and finite, got {value}"
                )));
            }
        }
        if self.relays == 0 {
            return Err(Error::InvalidConfig("relay count must be at least 1".into()));
        }
        if self.bins == 0 {
            return Err(Error::InvalidConfig("bin count must be at least 1".into()));
        }
        if !(self.beamwidth_deg > 0.0 && self.beamwidth_deg < 180.0) {
            return Err(Error::InvalidConfig(format!(
                "beamwidth must lie in (0, 180) degrees, got {}",
                self.beamwidth_deg
            )));
        }
        let train_span = (self.relays - 1) as f64 * self.relay_spacing;
        if self.cell_width <= train_span {
            return Err(Error::InvalidConfig(format!(
                "cell width {} m must exceed (M-1)*d_MR = {} m",
                self.cell_width, train_span
            )));
        }
        match self.data_floor {
            DataFloor::FractionOfAverage(rho) if !(rho > 0.0 && rho <= 1.0) => {
                return Err(Error::InvalidConfig(format!(
                    "data floor fraction must lie in (0, 1], got {rho}"
                )));
            }
            DataFloor::Explicit(bits) if !(bits.is_finite() && bits >= 0.0) => {
                return Err(Error::InvalidConfig(format!(
                    "explicit data floor must be nonnegative, got {bits}"
                )));
            }
            _ => {}
        }
        Ok(())
    }

    /// Number of segments, `2M + N - 2`.
    pub fn segments(&self) -> usize {
        2 * self.relays + self.bins - 2
    }

    /// Number of segments each relay is served in, `M + N - 1`.
    pub fn active_len(&self) -> usize {
        self.relays + self.bins - 1
    }

    /// Time from the head relay entering to the tail relay leaving (s).
    pub fn traversal_time(&self) -> f64 {
        (self.cell_width + (self.relays - 1) as f64 * self.relay_spacing) / self.speed
    }

    /// Along-track coordinate of the radio head.
    pub fn rrh_position(&self) -> f64 {
        self.cell_width / 2.0
    }
}

/// Segment boundaries `t_0 .. t_{2M+N-2}` and the durations between them.
#[derive(Debug, Clone, PartialEq)]
pub struct SegmentSchedule {
    boundaries: Vec<f64>,
    durations: Vec<f64>,
}

impl SegmentSchedule {
    pub fn boundaries(&self) -> &[f64] {
        &self.boundaries
    }

    pub fn durations(&self) -> &[f64] {
        &self.durations
    }

    pub fn segments(&self) -> usize {
        self.durations.len()
    }

    pub fn total_time(&self) -> f64 {
        *self.boundaries.last().expect("schedule has boundaries")
    }

    /// Start and end time of segment `j`.
    pub fn interval(&self, j: usize) -> (f64, f64) {
        (self.boundaries[j], self.boundaries[j + 1])
    }

    /// Segment containing time `t`, using half-open intervals. The final
    /// boundary belongs to the last segment.
    pub fn segment_at(&self, t: f64) -> Option<usize> {
        if t < 0.0 || t > self.total_time() {
            return None;
        }
        let k = self.boundaries.partition_point(|&b| b <= t);
        Some(k.saturating_sub(1).min(self.segments() - 1))
    }
}

/// Builds the segment schedule from the closed-form boundary times.
pub fn segment_boundaries(cfg: &ScenarioConfig) -> Result<SegmentSchedule> {
    cfg.validate()?;
    let m = cfg.relays;
    let n = cfg.bins;
    let (d_mr, d_l, v) = (cfg.relay_spacing, cfg.cell_width, cfg.speed);
    let last = 2 * m + n - 2;

    let mut boundaries = Vec::with_capacity(last + 1);
    boundaries.push(0.0);
    for i in 1..=last {
        let t = if i < m {
            i as f64 * d_mr / v
        } else if i < m + n {
            let a = ((n + m - i - 1) * (m - 1)) as f64;
            let b = (i + 1 - m) as f64;
            (a * d_mr + b * d_l) / (v * n as f64)
        } else {
            let c = (i + 1 - m - n) as f64;
            (c * d_mr + d_l) / v
        };
        boundaries.push(t);
    }
    let durations = boundaries.windows(2).map(|w| w[1] - w[0]).collect();
    Ok(SegmentSchedule {
        boundaries,
        durations,
    })
}

/// Along-track position of the head relay at time `t`.
pub fn head_position(cfg: &ScenarioConfig, t: f64) -> f64 {
    cfg.speed * t
}

fn check_relay(cfg: &ScenarioConfig, relay: usize) -> Result<()> {
    if relay >= cfg.relays {
        return Err(Error::IndexOutOfRange {
            what: "relay",
            index: relay,
            len: cfg.relays,
        });
    }
    Ok(())
}

/// Position of relay `relay` (0-based, 0 is the head) at time `t`.
pub fn mr_position(cfg: &ScenarioConfig, relay: usize, t: f64) -> Result<f64> {
    check_relay(cfg, relay)?;
    Ok(head_position(cfg, t) - relay as f64 * cfg.relay_spacing)
}

/// Distance from the radio head to a point on the track.
pub fn rrh_distance_at(cfg: &ScenarioConfig, x: f64) -> f64 {
    cfg.rail_offset.hypot(x - cfg.rrh_position())
}

pub fn mr_rrh_distance(cfg: &ScenarioConfig, relay: usize, t: f64) -> Result<f64> {
    Ok(rrh_distance_at(cfg, mr_position(cfg, relay, t)?))
}

/// Number of relays inside the cell during segment `segment`.
pub fn mrs_in_cell(cfg: &ScenarioConfig, segment: usize) -> Result<usize> {
    let s = cfg.segments();
    if segment >= s {
        return Err(Error::IndexOutOfRange {
            what: "segment",
            index: segment,
            len: s,
        });
    }
    let m = cfg.relays;
    let n = cfg.bins;
    Ok(if segment + 1 < m {
        segment + 1
    } else if segment + 1 < m + n {
        m
    } else {
        2 * m + n - segment - 2
    })
}

/// Segments in which `relay` is inside the cell.
pub fn active_segments(cfg: &ScenarioConfig, relay: usize) -> Result<RangeInclusive<usize>> {
    check_relay(cfg, relay)?;
    Ok(relay..=relay + cfg.relays + cfg.bins - 2)
}

/// Whether `relay` is served in `segment`. Out-of-range indices are inactive.
pub fn is_active(cfg: &ScenarioConfig, relay: usize, segment: usize) -> bool {
    relay < cfg.relays && segment >= relay && segment <= relay + cfg.relays + cfg.bins - 2
}
