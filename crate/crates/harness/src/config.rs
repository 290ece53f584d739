//! Flat `key = value` scenario files.
//!
//! ```text
//! # reference scenario
//! m = 4
//! n = 6
//! d_l = 200
//! d_mr = 25
//! d0 = 20
//! v_kmh = 300
//! p_t_dbm = 40
//! ```
//!
//! Lines starting with `#` and blank lines are ignored, as is anything after
//! a `#` on a value line. Keys not listed in [`KEYS`] are rejected.

use std::fmt::Write as _;
use std::hash::Hasher;
use std::path::Path;

use fnv::FnvHasher;
use mmrelay_core::allocators::DEFAULT_CSI_ALPHA;
use mmrelay_core::metrics::Quadrature;
use mmrelay_core::optimizer::{BudgetMode, SolverOptions, StepRule};
use mmrelay_core::scenario::{dbm_to_watt, kmh_to_mps, DataFloor};
use mmrelay_core::ScenarioConfig;

use crate::error::{ConfigError, HarnessError};
use crate::schemes::Scheme;

/// Every accepted key with a one-line description.
pub const KEYS: &[(&str, &str)] = &[
    ("m", "number of mobile relays (required)"),
    ("n", "number of location bins (required)"),
    ("d_l", "cell width in m (required)"),
    ("d_mr", "relay spacing in m (required)"),
    ("d0", "track-to-radio-head offset in m (required)"),
    ("v_kmh", "train speed in km/h (this or v_mps required)"),
    ("v_mps", "train speed in m/s"),
    ("p_t_dbm", "per-segment power budget in dBm (this or p_t_w required)"),
    ("p_t_w", "per-segment power budget in W"),
    ("bandwidth_hz", "channel bandwidth"),
    ("noise_figure_db", "receiver noise figure"),
    ("path_loss_exponent", "path loss exponent n"),
    ("wavelength_m", "carrier wavelength"),
    ("shadowing_db", "shadowing margin"),
    ("beamwidth_deg", "half-power beamwidth of both antennas"),
    ("rician_k_db", "Rician K-factor"),
    ("fading", "none | rician"),
    ("rho", "data floor as a fraction of the average scheme's data"),
    ("d_min_bits", "explicit data floor, overrides rho"),
    ("rate_in_bits", "true: rates in bit/s; false: bit/s/Hz"),
    ("seed", "master RNG seed"),
    ("sigma0", "initial penalty factor"),
    ("penalty_growth", "penalty growth factor"),
    ("step", "backtracking | spectral | fixed"),
    ("alpha", "initial (backtracking) or constant (fixed) step size"),
    ("tolerance", "residual and gradient tolerance"),
    ("max_cycles", "outer cycle cap"),
    ("max_inner", "inner iteration cap"),
    ("budget", "inequality | equality"),
    ("quadrature", "Simpson subintervals per segment (even)"),
    ("csi_alpha", "exponent of the CSI allocator"),
    ("schemes", "comma-separated subset of optimized,constant,average,random,csi"),
    ("trials", "trials per sweep point"),
];

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FadingMode {
    None,
    Rician,
}

/// Everything a run needs besides the sweep axis.
#[derive(Debug, Clone, PartialEq)]
pub struct HarnessConfig {
    pub scenario: ScenarioConfig,
    pub solver: SolverOptions,
    pub fading: FadingMode,
    pub csi_alpha: f64,
    pub schemes: Vec<Scheme>,
    pub trials: usize,
}

impl HarnessConfig {
    /// The reference scenario with every optional key at its default.
    pub fn reference() -> Self {
        HarnessConfig {
            scenario: ScenarioConfig::reference(),
            solver: SolverOptions::default(),
            fading: FadingMode::None,
            csi_alpha: DEFAULT_CSI_ALPHA,
            schemes: Scheme::ALL.to_vec(),
            trials: 1,
        }
    }

    pub fn load(path: &Path) -> Result<Self, HarnessError> {
        let text = std::fs::read_to_string(path).map_err(|e| HarnessError::Io {
            path: path.to_path_buf(),
            source: e,
        })?;
        Ok(parse(&text)?)
    }

    /// Stable digest of the resolved configuration (FNV-1a, 64 bit).
    pub fn hash(&self) -> String {
        let mut h = FnvHasher::default();
        h.write(self.canonical().as_bytes());
        format!("{:016x}", h.finish())
    }

    /// Fully resolved configuration in file syntax.
    pub fn canonical(&self) -> String {
        let s = &self.scenario;
        let o = &self.solver;
        let mut out = String::new();
        let mut kv = |k: &str, v: String| writeln!(out, "{k} = {v}").unwrap();
        kv("m", s.relays.to_string());
        kv("n", s.bins.to_string());
        kv("d_l", s.cell_width.to_string());
        kv("d_mr", s.relay_spacing.to_string());
        kv("d0", s.rail_offset.to_string());
        kv("v_mps", s.speed.to_string());
        kv("p_t_w", s.power_budget.to_string());
        kv("bandwidth_hz", s.bandwidth.to_string());
        kv("noise_figure_db", s.noise_figure_db.to_string());
        kv("path_loss_exponent", s.path_loss_exponent.to_string());
        kv("wavelength_m", s.wavelength.to_string());
        kv("shadowing_db", s.shadowing_db.to_string());
        kv("beamwidth_deg", s.beamwidth_deg.to_string());
        kv("rician_k_db", s.rician_k_db.to_string());
        kv(
            "fading",
            match self.fading {
                FadingMode::None => "none",
                FadingMode::Rician => "rician",
            }
            .into(),
        );
        match s.data_floor {
            DataFloor::FractionOfAverage(r) => kv("rho", r.to_string()),
            DataFloor::Explicit(b) => kv("d_min_bits", b.to_string()),
        }
        kv("rate_in_bits", s.rate_in_bits.to_string());
        kv("seed", s.seed.to_string());
        kv("sigma0", o.initial_penalty.to_string());
        kv("penalty_growth", o.penalty_growth.to_string());
        match o.step {
            StepRule::Backtracking { initial } => {
                kv("step", "backtracking".into());
                kv("alpha", initial.to_string());
            }
            StepRule::Fixed(a) => {
                kv("step", "fixed".into());
                kv("alpha", a.to_string());
            }
            StepRule::Spectral => kv("step", "spectral".into()),
        }
        kv("tolerance", o.tolerance.to_string());
        kv("max_cycles", o.max_cycles.to_string());
        kv("max_inner", o.max_inner_iterations.to_string());
        kv(
            "budget",
            match o.budget_mode {
                BudgetMode::Inequality => "inequality",
                BudgetMode::Equality => "equality",
            }
            .into(),
        );
        kv("quadrature", o.quadrature.subintervals().to_string());
        kv("csi_alpha", self.csi_alpha.to_string());
        kv(
            "schemes",
            self.schemes.iter().map(|s| s.name()).collect::<Vec<_>>().join(","),
        );
        kv("trials", self.trials.to_string());
        out
    }
}

struct Entry<'a> {
    line: usize,
    value: &'a str,
}

fn number<T: std::str::FromStr>(key: &str, e: &Entry) -> Result<T, ConfigError>
where
    T::Err: std::fmt::Display,
{
    e.value.parse::<T>().map_err(|err| ConfigError::Value {
        line: e.line,
        key: key.to_string(),
        msg: format!("{:?}: {err}", e.value),
    })
}

fn boolean(key: &str, e: &Entry) -> Result<bool, ConfigError> {
    match e.value.to_ascii_lowercase().as_str() {
        "true" | "yes" | "1" => Ok(true),
        "false" | "no" | "0" => Ok(false),
        other => Err(ConfigError::Value {
            line: e.line,
            key: key.to_string(),
            msg: format!("expected true or false, got {other:?}"),
        }),
    }
}

pub fn parse(text: &str) -> Result<HarnessConfig, ConfigError> {
    let mut entries: Vec<(&str, Entry)> = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let content = raw.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        let Some((key, value)) = content.split_once('=') else {
            return Err(ConfigError::Syntax {
                line,
                msg: format!("expected key = value, got {content:?}"),
            });
        };
        let key = key.trim();
        let value = value.trim();
        if !KEYS.iter().any(|(k, _)| *k == key) {
            return Err(ConfigError::UnknownKey {
                line,
                key: key.to_string(),
            });
        }
        if let Some((_, prev)) = entries.iter().find(|(k, _)| *k == key) {
            return Err(ConfigError::Duplicate {
                line,
                key: key.to_string(),
                first: prev.line,
            });
        }
        if value.is_empty() {
            return Err(ConfigError::Value {
                line,
                key: key.to_string(),
                msg: "empty value".into(),
            });
        }
        entries.push((key, Entry { line, value }));
    }
    let get = |key: &str| entries.iter().find(|(k, _)| *k == key).map(|(_, e)| e);
    let required = |key: &'static str| get(key).ok_or(ConfigError::Missing(key.to_string()));
    let one_of = |a: &'static str, b: &'static str| -> Result<(&'static str, &Entry), ConfigError> {
        match (get(a), get(b)) {
            (Some(e), None) => Ok((a, e)),
            (None, Some(e)) => Ok((b, e)),
            (Some(_), Some(e)) => Err(ConfigError::Value {
                line: e.line,
                key: b.to_string(),
                msg: format!("conflicts with {a}"),
            }),
            (None, None) => Err(ConfigError::Missing(format!("{a} or {b}"))),
        }
    };

    let mut cfg = HarnessConfig::reference();
    let s = &mut cfg.scenario;
    s.relays = number("m", required("m")?)?;
    s.bins = number("n", required("n")?)?;
    s.cell_width = number("d_l", required("d_l")?)?;
    s.relay_spacing = number("d_mr", required("d_mr")?)?;
    s.rail_offset = number("d0", required("d0")?)?;
    s.speed = match one_of("v_kmh", "v_mps")? {
        ("v_kmh", e) => kmh_to_mps(number("v_kmh", e)?),
        (k, e) => number(k, e)?,
    };
    s.power_budget = match one_of("p_t_dbm", "p_t_w")? {
        ("p_t_dbm", e) => dbm_to_watt(number("p_t_dbm", e)?),
        (k, e) => number(k, e)?,
    };

    macro_rules! opt_num {
        ($key:literal, $field:expr) => {
            if let Some(e) = get($key) {
                $field = number($key, e)?;
            }
        };
    }
    opt_num!("bandwidth_hz", s.bandwidth);
    opt_num!("noise_figure_db", s.noise_figure_db);
    opt_num!("path_loss_exponent", s.path_loss_exponent);
    opt_num!("wavelength_m", s.wavelength);
    opt_num!("shadowing_db", s.shadowing_db);
    opt_num!("beamwidth_deg", s.beamwidth_deg);
    opt_num!("rician_k_db", s.rician_k_db);
    opt_num!("seed", s.seed);
    if let Some(e) = get("rate_in_bits") {
        s.rate_in_bits = boolean("rate_in_bits", e)?;
    }
    if let Some(e) = get("rho") {
        s.data_floor = DataFloor::FractionOfAverage(number("rho", e)?);
    }
    if let Some(e) = get("d_min_bits") {
        s.data_floor = DataFloor::Explicit(number("d_min_bits", e)?);
    }
    if let Some(e) = get("fading") {
        cfg.fading = match e.value {
            "none" => FadingMode::None,
            "rician" => FadingMode::Rician,
            other => {
                return Err(ConfigError::Value {
                    line: e.line,
                    key: "fading".into(),
                    msg: format!("expected none or rician, got {other:?}"),
                })
            }
        };
    }

    let o = &mut cfg.solver;
    opt_num!("sigma0", o.initial_penalty);
    opt_num!("penalty_growth", o.penalty_growth);
    opt_num!("tolerance", o.tolerance);
    opt_num!("max_cycles", o.max_cycles);
    opt_num!("max_inner", o.max_inner_iterations);
    let alpha = get("alpha").map(|e| number::<f64>("alpha", e)).transpose()?;
    if let Some(e) = get("step") {
        o.step = match e.value {
            "backtracking" => StepRule::Backtracking {
                initial: alpha.unwrap_or(1.0),
            },
            "spectral" => StepRule::Spectral,
            "fixed" => StepRule::Fixed(alpha.ok_or_else(|| ConfigError::Value {
                line: e.line,
                key: "step".into(),
                msg: "fixed steps need an alpha".into(),
            })?),
            other => {
                return Err(ConfigError::Value {
                    line: e.line,
                    key: "step".into(),
                    msg: format!("expected backtracking, spectral or fixed, got {other:?}"),
                })
            }
        };
    } else if let Some(a) = alpha {
        o.step = StepRule::Backtracking { initial: a };
    }
    if let Some(e) = get("budget") {
        o.budget_mode = match e.value {
            "inequality" => BudgetMode::Inequality,
            "equality" => BudgetMode::Equality,
            other => {
                return Err(ConfigError::Value {
                    line: e.line,
                    key: "budget".into(),
                    msg: format!("expected inequality or equality, got {other:?}"),
                })
            }
        };
    }
    if let Some(e) = get("quadrature") {
        o.quadrature = Quadrature::simpson(number("quadrature", e)?).map_err(|err| ConfigError::Value {
            line: e.line,
            key: "quadrature".into(),
            msg: err.to_string(),
        })?;
    }
    opt_num!("csi_alpha", cfg.csi_alpha);
    opt_num!("trials", cfg.trials);
    if let Some(e) = get("schemes") {
        cfg.schemes = Scheme::parse_list(e.value).map_err(|msg| ConfigError::Value {
            line: e.line,
            key: "schemes".into(),
            msg,
        })?;
    }

    validate(&cfg)?;
    Ok(cfg)
}

/// Cross-field checks after parsing.
pub fn validate(cfg: &HarnessConfig) -> Result<(), ConfigError> {
    cfg.scenario
        .validate()
        .map_err(|e| ConfigError::Invalid(e.to_string()))?;
    cfg.solver
        .validate()
        .map_err(|e| ConfigError::Invalid(e.to_string()))?;
    if cfg.schemes.is_empty() {
        return Err(ConfigError::Invalid("scheme list is empty".into()));
    }
    if cfg.trials == 0 {
        return Err(ConfigError::Invalid("trials must be at least 1".into()));
    }
    if !(cfg.csi_alpha > 0.0 && cfg.csi_alpha.is_finite()) {
        return Err(ConfigError::Invalid(format!("csi_alpha {}", cfg.csi_alpha)));
    }
    Ok(())
}
