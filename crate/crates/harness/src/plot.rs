//! Plot-ready series files built from the mean rows of a results file.
//!
//! A figure id has the form `<metric>-vs-<param>`, for example `E-vs-dl` or
//! `EE-vs-M`. Output is `<id>.dat` (whitespace separated, `x` then one column
//! per scheme) and `<id>.manifest` describing the axes.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use crate::error::HarnessError;
use crate::experiments::Param;
use crate::records::RunRecord;
use crate::schemes::Scheme;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Metric {
    Energy,
    EnergyEfficiency,
    SpectralEfficiency,
}

impl Metric {
    pub fn name(self) -> &'static str {
        match self {
            Metric::Energy => "E",
            Metric::EnergyEfficiency => "EE",
            Metric::SpectralEfficiency => "SE",
        }
    }

    pub fn unit(self) -> &'static str {
        match self {
            Metric::Energy => "J",
            Metric::EnergyEfficiency => "bits/J",
            Metric::SpectralEfficiency => "bits/s/Hz",
        }
    }

    fn get(self, r: &RunRecord) -> Option<f64> {
        match self {
            Metric::Energy => r.energy_j,
            Metric::EnergyEfficiency => r.ee_bits_per_j,
            Metric::SpectralEfficiency => r.se_bps_hz,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Figure {
    pub metric: Metric,
    pub param: Param,
}

impl Figure {
    pub fn parse(id: &str) -> Result<Figure, HarnessError> {
        let unknown = || HarnessError::UnknownFigure(id.to_string());
        let (m, p) = id.split_once("-vs-").ok_or_else(unknown)?;
        let metric = [Metric::Energy, Metric::EnergyEfficiency, Metric::SpectralEfficiency]
            .into_iter()
            .find(|x| x.name() == m)
            .ok_or_else(unknown)?;
        let param = Param::ALL
            .into_iter()
            .find(|x| x.name() == p)
            .ok_or_else(unknown)?;
        Ok(Figure { metric, param })
    }

    pub fn id(self) -> String {
        format!("{}-vs-{}", self.metric.name(), self.param.name())
    }
}

/// Paths of the two files written for one figure.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PlotFiles {
    pub data: PathBuf,
    pub manifest: PathBuf,
}

/// Series text and manifest text for `figure`. Cells with no value are `nan`.
pub fn render(rows: &[RunRecord], figure: Figure) -> Result<(String, String), HarnessError> {
    let means: Vec<&RunRecord> = rows
        .iter()
        .filter(|r| r.is_aggregate() && r.param == figure.param.name())
        .collect();
    if means.is_empty() {
        return Err(HarnessError::Usage(format!(
            "no mean rows for parameter {} in the results",
            figure.param.name()
        )));
    }
    let schemes: Vec<Scheme> = Scheme::ALL
        .into_iter()
        .filter(|s| means.iter().any(|r| r.scheme == s.name()))
        .collect();
    // keyed by the bit pattern so equal values share a row; sorted numerically below
    let mut table: BTreeMap<u64, (f64, BTreeMap<&str, Option<f64>>)> = BTreeMap::new();
    for r in &means {
        let Some(x) = r.value else { continue };
        table
            .entry(x.to_bits())
            .or_insert_with(|| (x, BTreeMap::new()))
            .1
            .insert(r.scheme.as_str(), figure.metric.get(r));
    }
    let mut points: Vec<_> = table.into_values().collect();
    points.sort_by(|a, b| a.0.total_cmp(&b.0));

    let mut dat = String::from("# x");
    for s in &schemes {
        dat.push(' ');
        dat.push_str(s.name());
    }
    dat.push('\n');
    for (x, cells) in &points {
        write!(dat, "{x}").unwrap();
        for s in &schemes {
            match cells.get(s.name()).copied().flatten() {
                Some(v) => write!(dat, " {v:e}").unwrap(),
                None => dat.push_str(" nan"),
            }
        }
        dat.push('\n');
    }

    let mut manifest = String::new();
    writeln!(manifest, "figure = {}", figure.id()).unwrap();
    writeln!(manifest, "x_label = {}", figure.param.name()).unwrap();
    writeln!(manifest, "x_unit = {}", figure.param.unit()).unwrap();
    writeln!(manifest, "y_label = {}", figure.metric.name()).unwrap();
    writeln!(manifest, "y_unit = {}", figure.metric.unit()).unwrap();
    let names: Vec<&str> = schemes.iter().map(|s| s.name()).collect();
    writeln!(manifest, "columns = x {}", names.join(" ")).unwrap();
    writeln!(manifest, "points = {}", points.len()).unwrap();
    writeln!(manifest, "units = J bits/J bits/s/Hz").unwrap();
    Ok((dat, manifest))
}

/// Writes `<id>.dat` and `<id>.manifest` into `out_dir`.
pub fn emit_plot_data(
    rows: &[RunRecord],
    figure_id: &str,
    out_dir: &Path,
) -> Result<PlotFiles, HarnessError> {
    let figure = Figure::parse(figure_id)?;
    let (dat, manifest) = render(rows, figure)?;
    let files = PlotFiles {
        data: out_dir.join(format!("{}.dat", figure.id())),
        manifest: out_dir.join(format!("{}.manifest", figure.id())),
    };
    for (path, text) in [(&files.data, dat), (&files.manifest, manifest)] {
        std::fs::write(path, text).map_err(|e| HarnessError::Io {
            path: path.clone(),
            source: e,
        })?;
    }
    Ok(files)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::records::MEAN_TRIAL;

    fn mean_row(scheme: &str, param: &str, x: f64, e: f64) -> RunRecord {
        RunRecord {
            scenario_hash: "h".into(),
            scheme: scheme.into(),
            param: param.into(),
            value: Some(x),
            trial: MEAN_TRIAL.into(),
            energy_j: Some(e),
            data_bits: Some(2.0 * e),
            ee_bits_per_j: Some(2.0),
            se_bps_hz: Some(0.5),
            d_min_bits: None,
            meets_floor: Some(true),
            converged: None,
            cycles: None,
            residual: None,
            kkt: None,
            v_plan_mps: None,
            error: String::new(),
            wall_time_s: 0.0,
        }
    }

    #[test]
    fn figure_ids() {
        let f = Figure::parse("EE-vs-M").unwrap();
        assert_eq!((f.metric, f.param), (Metric::EnergyEfficiency, Param::Relays));
        assert_eq!(Figure::parse("SE-vs-sigma_v").unwrap().id(), "SE-vs-sigma_v");
        for bad in ["E-vs-x", "Q-vs-M", "E_vs_M", ""] {
            assert!(matches!(Figure::parse(bad), Err(HarnessError::UnknownFigure(_))));
        }
    }

    #[test]
    fn series_layout() {
        let mut rows = Vec::new();
        for x in [240.0, 140.0, 200.0] {
            for s in Scheme::ALL {
                rows.push(mean_row(s.name(), "dl", x, x / 10.0));
            }
        }
        rows.push(mean_row("constant", "v", 300.0, 1.0));
        let (dat, manifest) = render(&rows, Figure::parse("E-vs-dl").unwrap()).unwrap();
        let lines: Vec<&str> = dat.lines().collect();
        assert_eq!(lines[0], "# x optimized constant average random csi");
        assert_eq!(lines.len(), 4);
        assert!(lines[1].starts_with("140 "));
        assert_eq!(lines[3].split_whitespace().count(), 6);
        assert!(manifest.contains("y_unit = J"));
        assert!(manifest.contains("units = J bits/J bits/s/Hz"));
        assert!(render(&rows, Figure::parse("E-vs-M").unwrap()).is_err());
    }
}
