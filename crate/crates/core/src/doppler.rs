//! Doppler estimation from received-power fingerprints.
//!
//! A window of `2L + 1` RSRP samples taken every `x_s` meters along the track
//! identifies the position of the head relay, including which side of the
//! radio head it is on. The table maps each training window to the relative
//! Doppler shift `f_d / f_dmax`, which does not depend on speed; the estimate
//! is rescaled by the (possibly estimated) speed at query time.

use std::fmt::Write as _;

use rand::Rng;
use rand_distr::{Distribution, Normal};

use crate::error::{Error, Result};
use crate::radio::{max_antenna_gain, path_loss};
use crate::scenario::{rrh_distance_at, ScenarioConfig};

pub const DEFAULT_SPACING: f64 = 1.0;
pub const DEFAULT_HALF_WINDOW: usize = 5;

/// Received power (dBm) at track position `x` for the head relay, with
/// `gamma_db` of extra attenuation.
pub fn rsrp_at(cfg: &ScenarioConfig, x: f64, gamma_db: f64) -> Result<f64> {
    let g0 = max_antenna_gain(cfg.beamwidth_deg)?;
    let d = rrh_distance_at(cfg, x);
    let pl = path_loss(d, cfg.wavelength, cfg.path_loss_exponent)?;
    let p_dbm = 10.0 * (cfg.power_budget * 1e3).log10();
    Ok(p_dbm + 2.0 * g0 - cfg.shadowing_db - pl - gamma_db)
}

/// `v / lambda`, the largest Doppler shift at speed `v`.
pub fn max_doppler(cfg: &ScenarioConfig) -> f64 {
    cfg.speed / cfg.wavelength
}

/// Cosine of the angle between the direction of travel and the line of
/// sight to the radio head at position `x`.
pub fn relative_doppler(cfg: &ScenarioConfig, x: f64) -> f64 {
    (cfg.rrh_position() - x) / rrh_distance_at(cfg, x)
}

/// Doppler shift (Hz) at position `x`, positive while approaching the head.
pub fn true_doppler(cfg: &ScenarioConfig, x: f64) -> f64 {
    max_doppler(cfg) * relative_doppler(cfg, x)
}

#[derive(Debug, Clone, PartialEq)]
pub struct RsrpWindow {
    pub center: f64,
    pub spacing: f64,
    pub values: Vec<f64>,
}

impl RsrpWindow {
    /// Noiseless window of `2 * half + 1` samples around `center`.
    pub fn noiseless(cfg: &ScenarioConfig, center: f64, spacing: f64, half: usize) -> Result<Self> {
        if !(spacing > 0.0) {
            return Err(Error::Domain(format!("sample spacing {spacing}")));
        }
        let values = (0..=2 * half)
            .map(|k| rsrp_at(cfg, center + (k as f64 - half as f64) * spacing, 0.0))
            .collect::<Result<_>>()?;
        Ok(RsrpWindow {
            center,
            spacing,
            values,
        })
    }

    /// Copy with independent Gaussian attenuation of `std_db` on each sample.
    pub fn with_noise<R: Rng + ?Sized>(&self, std_db: f64, rng: &mut R) -> Result<Self> {
        let normal = Normal::new(0.0, std_db).map_err(|e| Error::Domain(e.to_string()))?;
        Ok(RsrpWindow {
            values: self.values.iter().map(|v| v - normal.sample(rng)).collect(),
            ..self.clone()
        })
    }

    pub fn half_len(&self) -> usize {
        self.values.len() / 2
    }

    /// Sample positions, oldest first.
    pub fn positions(&self) -> Vec<f64> {
        let half = self.half_len() as f64;
        (0..self.values.len())
            .map(|k| self.center + (k as f64 - half) * self.spacing)
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TableEntry {
    pub position: f64,
    pub relative_doppler: f64,
    pub window: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DopplerTable {
    spacing: f64,
    half: usize,
    entries: Vec<TableEntry>,
}

/// Samples the track at `x_k = k * spacing` for `k < floor(d_l / spacing)`
/// and keeps every center whose full window lies on sampled positions.
pub fn build_table(cfg: &ScenarioConfig, spacing: f64, half: usize) -> Result<DopplerTable> {
    if !(spacing > 0.0 && spacing.is_finite()) {
        return Err(Error::Domain(format!("sample spacing {spacing}")));
    }
    let n = (cfg.cell_width / spacing).floor() as usize;
    if n < 2 * half + 1 {
        return Err(Error::Domain(format!(
            "{n} track samples cannot hold a {}-sample window",
            2 * half + 1
        )));
    }
    let samples: Vec<f64> = (0..n)
        .map(|k| rsrp_at(cfg, k as f64 * spacing, 0.0))
        .collect::<Result<_>>()?;
    let entries = (half..n - half)
        .map(|k| {
            let x = k as f64 * spacing;
            TableEntry {
                position: x,
                relative_doppler: relative_doppler(cfg, x),
                window: samples[k - half..=k + half].to_vec(),
            }
        })
        .collect();
    Ok(DopplerTable {
        spacing,
        half,
        entries,
    })
}

impl DopplerTable {
    pub fn spacing(&self) -> f64 {
        self.spacing
    }

    pub fn half_len(&self) -> usize {
        self.half
    }

    pub fn window_len(&self) -> usize {
        2 * self.half + 1
    }

    pub fn entries(&self) -> &[TableEntry] {
        &self.entries
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Entry whose window is closest in Euclidean distance; ties go to the
    /// earlier position.
    pub fn nearest(&self, values: &[f64]) -> Result<&TableEntry> {
        if self.entries.is_empty() {
            return Err(Error::EmptyTable);
        }
        if values.len() != self.window_len() {
            return Err(Error::WindowLength {
                expected: self.window_len(),
                got: values.len(),
            });
        }
        let mut best = (f64::INFINITY, 0);
        for (k, e) in self.entries.iter().enumerate() {
            let d: f64 = e.window.iter().zip(values).map(|(a, b)| (a - b) * (a - b)).sum();
            if d < best.0 {
                best = (d, k);
            }
        }
        Ok(&self.entries[best.1])
    }

    /// Tab-separated text: a header comment, then one row per entry with
    /// position, relative Doppler and the window samples.
    pub fn to_text(&self) -> String {
        let mut out = format!(
            "# doppler-table v1 spacing={} half_window={}\n# position\tf_rel\trsrp...\n",
            self.spacing, self.half
        );
        for e in &self.entries {
            write!(out, "{}\t{}", e.position, e.relative_doppler).unwrap();
            for v in &e.window {
                write!(out, "\t{v}").unwrap();
            }
            out.push('\n');
        }
        out
    }

    pub fn from_text(text: &str) -> Result<Self> {
        let mut spacing = None;
        let mut half = None;
        let mut entries = Vec::new();
        for (idx, line) in text.lines().enumerate() {
            let lineno = idx + 1;
            let err = |msg: String| Error::TableParse { line: lineno, msg };
            let line = line.trim();
            if line.is_empty() {
                continue;
            }
            if let Some(comment) = line.strip_prefix('#') {
                for tok in comment.split_whitespace() {
                    if let Some(v) = tok.strip_prefix("spacing=") {
                        spacing = Some(v.parse::<f64>().map_err(|e| err(e.to_string()))?);
                    } else if let Some(v) = tok.strip_prefix("half_window=") {
                        half = Some(v.parse::<usize>().map_err(|e| err(e.to_string()))?);
                    }
                }
                continue;
            }
            let (Some(_), Some(half)) = (spacing, half) else {
                return Err(err("data row before the header".into()));
            };
            let fields: Vec<f64> = line
                .split_whitespace()
                .map(|f| f.parse::<f64>().map_err(|e| err(format!("{f:?}: {e}"))))
                .collect::<Result<_>>()?;
            if fields.len() != 2 * half + 3 {
                return Err(err(format!(
                    "expected {} fields, found {}",
                    2 * half + 3,
                    fields.len()
                )));
            }
            if !(-1.0..=1.0).contains(&fields[1]) {
                return Err(err(format!("relative doppler {} outside [-1, 1]", fields[1])));
            }
            entries.push(TableEntry {
                position: fields[0],
                relative_doppler: fields[1],
                window: fields[2..].to_vec(),
            });
        }
        match (spacing, half) {
            (Some(spacing), Some(half)) => Ok(DopplerTable {
                spacing,
                half,
                entries,
            }),
            _ => Err(Error::TableParse {
                line: 1,
                msg: "missing spacing/half_window header".into(),
            }),
        }
    }
}

/// Relative Doppler of the best-matching table entry.
pub fn estimate_relative(table: &DopplerTable, window: &RsrpWindow) -> Result<f64> {
    Ok(table.nearest(&window.values)?.relative_doppler)
}

/// Doppler estimate (Hz), scaled by the speed in `cfg`.
pub fn estimate_doppler(table: &DopplerTable, window: &RsrpWindow, cfg: &ScenarioConfig) -> Result<f64> {
    Ok(estimate_relative(table, window)? * max_doppler(cfg))
}
