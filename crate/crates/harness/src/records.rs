//! Result rows and their CSV form.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::HarnessError;
use crate::schemes::{Scheme, Trial};

/// First line of every results file.
pub const CSV_HEADER_COMMENT: &str = "# mmrelay-runs v1";

/// Trial label of rows averaged over trials.
pub const MEAN_TRIAL: &str = "mean";

/// One scheme evaluated at one sweep point and trial.
///
/// Metric fields are empty when the point failed; `error` then says why.
/// Wall time is kept in memory only so result files stay reproducible.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunRecord {
    pub scenario_hash: String,
    pub scheme: String,
    pub param: String,
    pub value: Option<f64>,
    pub trial: String,
    pub energy_j: Option<f64>,
    pub data_bits: Option<f64>,
    pub ee_bits_per_j: Option<f64>,
    pub se_bps_hz: Option<f64>,
    pub d_min_bits: Option<f64>,
    pub meets_floor: Option<bool>,
    pub converged: Option<bool>,
    pub cycles: Option<usize>,
    pub residual: Option<f64>,
    pub kkt: Option<f64>,
    pub v_plan_mps: Option<f64>,
    pub error: String,
    #[serde(skip)]
    pub wall_time_s: f64,
}

/// Relative shortfall below `D_min` still counted as meeting it; matches the
/// solver's data-constraint tolerance.
pub const FLOOR_TOLERANCE: f64 = 1e-3;

impl RunRecord {
    fn blank(hash: &str, scheme: &str, param: &str, value: Option<f64>, trial: String) -> Self {
        RunRecord {
            scenario_hash: hash.to_string(),
            scheme: scheme.to_string(),
            param: param.to_string(),
            value,
            trial,
            energy_j: None,
            data_bits: None,
            ee_bits_per_j: None,
            se_bps_hz: None,
            d_min_bits: None,
            meets_floor: None,
            converged: None,
            cycles: None,
            residual: None,
            kkt: None,
            v_plan_mps: None,
            error: String::new(),
            wall_time_s: 0.0,
        }
    }

    /// Row describing a point that failed before any scheme ran.
    pub fn failure(
        hash: &str,
        scheme: Scheme,
        param: &str,
        value: Option<f64>,
        trial: usize,
        error: &str,
    ) -> Self {
        RunRecord {
            error: sanitize(error),
            ..Self::blank(hash, scheme.name(), param, value, trial.to_string())
        }
    }

    pub fn from_trial(
        hash: &str,
        param: &str,
        value: Option<f64>,
        trial_index: usize,
        trial: &Trial,
    ) -> Vec<Self> {
        trial
            .outcomes
            .iter()
            .map(|o| {
                let mut r = Self::blank(hash, o.scheme.name(), param, value, trial_index.to_string());
                r.d_min_bits = Some(trial.d_min);
                r.v_plan_mps = Some(trial.plan_speed);
                r.wall_time_s = o.wall_time_s;
                if let Some(s) = &o.solver {
                    r.converged = Some(s.converged);
                    r.cycles = Some(s.cycles);
                    r.residual = Some(s.residual);
                    r.kkt = Some(s.kkt);
                }
                match &o.result {
                    Ok(m) => {
                        r.energy_j = Some(m.energy);
                        r.data_bits = Some(m.data);
                        r.ee_bits_per_j = Some(m.energy_efficiency);
                        r.se_bps_hz = Some(m.spectral_efficiency);
                        r.meets_floor = Some(m.data >= trial.d_min * (1.0 - FLOOR_TOLERANCE));
                    }
                    Err(e) => r.error = sanitize(e),
                }
                r
            })
            .collect()
    }

    pub fn is_aggregate(&self) -> bool {
        self.trial == MEAN_TRIAL
    }

    pub fn ok(&self) -> bool {
        self.error.is_empty() && self.energy_j.is_some()
    }

    pub fn unconverged(&self) -> bool {
        self.converged == Some(false)
    }
}

fn sanitize(msg: &str) -> String {
    msg.replace(['\n', '\r'], " ")
}

fn mean(values: impl Iterator<Item = f64>) -> Option<f64> {
    let (sum, n) = values.fold((0.0, 0usize), |(s, n), v| (s + v, n + 1));
    (n > 0).then(|| sum / n as f64)
}

/// Mean over the successful trials of one (point, scheme) group. The energy
/// efficiency of the mean row is mean data over mean energy, so every row
/// satisfies `EE = D / E`.
pub fn aggregate(rows: &[RunRecord]) -> Option<RunRecord> {
    let first = rows.first()?;
    let mut out = RunRecord::blank(
        &first.scenario_hash,
        &first.scheme,
        &first.param,
        first.value,
        MEAN_TRIAL.to_string(),
    );
    let good: Vec<&RunRecord> = rows.iter().filter(|r| r.ok()).collect();
    if good.is_empty() {
        out.error = rows
            .iter()
            .find(|r| !r.error.is_empty())
            .map_or_else(|| "no successful trials".into(), |r| r.error.clone());
        return Some(out);
    }
    let pick = |f: fn(&RunRecord) -> Option<f64>| mean(good.iter().filter_map(|r| f(r)));
    out.energy_j = pick(|r| r.energy_j);
    out.data_bits = pick(|r| r.data_bits);
    out.ee_bits_per_j = match (out.data_bits, out.energy_j) {
        (Some(d), Some(e)) if e > 0.0 => Some(d / e),
        _ => None,
    };
    out.se_bps_hz = pick(|r| r.se_bps_hz);
    out.d_min_bits = pick(|r| r.d_min_bits);
    out.v_plan_mps = pick(|r| r.v_plan_mps);
    out.meets_floor = Some(good.iter().all(|r| r.meets_floor == Some(true)));
    if good.iter().any(|r| r.converged.is_some()) {
        out.converged = Some(good.iter().all(|r| r.converged == Some(true)));
        out.cycles = good.iter().filter_map(|r| r.cycles).max();
        out.residual = good.iter().filter_map(|r| r.residual).reduce(f64::max);
        out.kkt = good.iter().filter_map(|r| r.kkt).reduce(f64::max);
    }
    if good.len() < rows.len() {
        out.error = format!("{} of {} trials failed", rows.len() - good.len(), rows.len());
    }
    out.wall_time_s = rows.iter().map(|r| r.wall_time_s).sum();
    Some(out)
}

pub fn to_csv(rows: &[RunRecord]) -> Result<String, HarnessError> {
    let mut w = csv::Writer::from_writer(Vec::new());
    for r in rows {
        w.serialize(r)?;
    }
    let body = w.into_inner().map_err(|e| HarnessError::Csv(e.into_error().into()))?;
    let mut out = String::from(CSV_HEADER_COMMENT);
    out.push('\n');
    out.push_str(&String::from_utf8(body).expect("csv output is utf-8"));
    Ok(out)
}

pub fn from_csv(text: &str) -> Result<Vec<RunRecord>, HarnessError> {
    match text.lines().next() {
        Some(CSV_HEADER_COMMENT) => {}
        other => {
            return Err(HarnessError::Usage(format!(
                "not a results file (first line {:?}, expected {CSV_HEADER_COMMENT:?})",
                other.unwrap_or("")
            )))
        }
    }
    let mut r = csv::ReaderBuilder::new()
        .comment(Some(b'#'))
        .from_reader(text.as_bytes());
    Ok(r.deserialize().collect::<Result<Vec<RunRecord>, _>>()?)
}

pub fn write_csv(path: &Path, rows: &[RunRecord]) -> Result<(), HarnessError> {
    let text = to_csv(rows)?;
    std::fs::write(path, text).map_err(|e| HarnessError::Io {
        path: path.to_path_buf(),
        source: e,
    })
}

pub fn read_csv(path: &Path) -> Result<Vec<RunRecord>, HarnessError> {
    let text = std::fs::read_to_string(path).map_err(|e| HarnessError::Io {
        path: path.to_path_buf(),
        source: e,
    })?;
    from_csv(&text)
}
