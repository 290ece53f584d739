//! Physical-layer models: directional antenna, path loss, thermal noise,
//! received SNR and Rician envelope fading.
//!
//! All dB quantities are combined additively; linear powers are converted
//! at the boundary (`snr_db` takes dBm).

use std::f64::consts::PI;

use rand::Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::error::{Error, Result};
use crate::scenario::ScenarioConfig;

/// Speed of light (m/s).
pub const SPEED_OF_LIGHT: f64 = 299_792_458.0;

/// Thermal noise density at room temperature (dBm/Hz).
const THERMAL_FLOOR_DBM_HZ: f64 = -174.0;

/// Boresight gain of the Gaussian-main-lobe antenna model (dB).
pub fn max_antenna_gain(beamwidth_deg: f64) -> Result<f64> {
    if !(beamwidth_deg > 0.0 && beamwidth_deg < 180.0) {
        return Err(Error::Domain(format!("beamwidth {beamwidth_deg} deg")));
    }
    let half = (beamwidth_deg / 2.0).to_radians();
    Ok(10.0 * (1.6162 / half.sin()).powi(2).log10())
}

/// Constant sidelobe level (dB). The beamwidth enters the logarithm in degrees.
pub fn sidelobe_gain(beamwidth_deg: f64) -> Result<f64> {
    if !(beamwidth_deg > 0.0) {
        return Err(Error::Domain(format!("beamwidth {beamwidth_deg} deg")));
    }
    Ok(-0.4111 * beamwidth_deg.ln() - 10.579)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AntennaPattern {
    pub beamwidth_deg: f64,
    pub main_lobe_deg: f64,
    pub max_gain_db: f64,
    pub sidelobe_db: f64,
}

impl AntennaPattern {
    pub fn new(beamwidth_deg: f64) -> Result<Self> {
        Ok(AntennaPattern {
            beamwidth_deg,
            main_lobe_deg: 2.6 * beamwidth_deg,
            max_gain_db: max_antenna_gain(beamwidth_deg)?,
            sidelobe_db: sidelobe_gain(beamwidth_deg)?,
        })
    }

    /// Gain at off-boresight angle `theta_deg` in `[0, 180]`.
    pub fn gain(&self, theta_deg: f64) -> Result<f64> {
        if !(0.0..=180.0).contains(&theta_deg) {
            return Err(Error::Domain(format!("antenna angle {theta_deg} deg")));
        }
        if theta_deg <= self.main_lobe_deg / 2.0 {
            let u = 2.0 * theta_deg / self.beamwidth_deg;
            Ok(self.max_gain_db - 3.01 * u * u)
        } else {
            Ok(self.sidelobe_db)
        }
    }
}

/// Free-space style path loss `10 n log10(4 pi d / lambda)` in dB.
pub fn path_loss(distance: f64, wavelength: f64, exponent: f64) -> Result<f64> {
    if !(distance > 0.0) {
        return Err(Error::Domain(format!("distance {distance} m")));
    }
    if !(wavelength > 0.0) {
        return Err(Error::Domain(format!("wavelength {wavelength} m")));
    }
    Ok(10.0 * exponent * (4.0 * PI * distance / wavelength).log10())
}

pub fn noise_power_dbm(bandwidth: f64, noise_figure_db: f64) -> f64 {
    THERMAL_FLOOR_DBM_HZ + 10.0 * bandwidth.log10() + noise_figure_db
}

/// Distance-independent link budget terms, `C = G_tx + G_rx - xi - P_noise`.
///
/// Both ends are assumed beam-aligned, so each gain is the boresight gain.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LinkConstants {
    pub tx_gain_db: f64,
    pub rx_gain_db: f64,
    pub shadowing_db: f64,
    pub noise_dbm: f64,
    pub aggregate_db: f64,
}

impl LinkConstants {
    pub fn from_config(cfg: &ScenarioConfig) -> Result<Self> {
        let g0 = max_antenna_gain(cfg.beamwidth_deg)?;
        let noise_dbm = noise_power_dbm(cfg.bandwidth, cfg.noise_figure_db);
        Ok(LinkConstants {
            tx_gain_db: g0,
            rx_gain_db: g0,
            shadowing_db: cfg.shadowing_db,
            noise_dbm,
            aggregate_db: g0 + g0 - cfg.shadowing_db - noise_dbm,
        })
    }
}

/// Received SNR in dB for transmit power `tx_dbm` at distance `distance`.
///
/// `fading_db` is an attenuation: positive values lower the SNR.
pub fn snr_db(
    tx_dbm: f64,
    distance: f64,
    fading_db: f64,
    consts: &LinkConstants,
    cfg: &ScenarioConfig,
) -> Result<f64> {
    let pl = path_loss(distance, cfg.wavelength, cfg.path_loss_exponent)?;
    Ok(tx_dbm - pl - fading_db + consts.aggregate_db)
}

/// Channel power gain `|h|^2` (linear) from the dB channel model
/// `h = -PL - xi - gamma`.
pub fn channel_power_gain(distance: f64, fading_db: f64, cfg: &ScenarioConfig) -> Result<f64> {
    let pl = path_loss(distance, cfg.wavelength, cfg.path_loss_exponent)?;
    Ok(10f64.powf((-pl - cfg.shadowing_db - fading_db) / 10.0))
}

/// Rician envelope: magnitude of a complex Gaussian with mean `los`
/// and per-component standard deviation `scatter`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FadingModel {
    pub los: f64,
    pub scatter: f64,
}

impl FadingModel {
    pub fn new(los: f64, scatter: f64) -> Result<Self> {
        if !(los >= 0.0 && los.is_finite()) || !(scatter > 0.0 && scatter.is_finite()) {
            return Err(Error::Domain(format!(
                "rician parameters A={los}, sigma={scatter}"
            )));
        }
        Ok(FadingModel { los, scatter })
    }

    /// Parameterizes by K-factor (dB) and mean power `E[r^2]`.
    pub fn from_k_factor(k_db: f64, mean_power: f64) -> Result<Self> {
        let k = 10f64.powf(k_db / 10.0);
        let los = (k / (k + 1.0) * mean_power).sqrt();
        let scatter = (mean_power / (2.0 * (k + 1.0))).sqrt();
        Self::new(los, scatter)
    }

    pub fn k_factor(&self) -> f64 {
        self.los * self.los / (2.0 * self.scatter * self.scatter)
    }

    pub fn mean_power(&self) -> f64 {
        self.los * self.los + 2.0 * self.scatter * self.scatter
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        sample_rician_envelope(self, rng)
    }

    /// Envelope sample expressed as a dB attenuation relative to the RMS
    /// envelope, `-20 log10(r / r_rms)`.
    pub fn sample_attenuation_db<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        let r = self.sample(rng);
        -20.0 * (r / self.mean_power().sqrt()).log10()
    }

    /// Envelope density `r/s^2 exp(-(r^2 + A^2)/2s^2) I0(rA/s^2)`, evaluated
    /// with the exponentially scaled Bessel function to avoid overflow.
    pub fn pdf(&self, r: f64) -> f64 {
        if r < 0.0 {
            return 0.0;
        }
        let s2 = self.scatter * self.scatter;
        let z = r * self.los / s2;
        let d = r - self.los;
        r / s2 * (-d * d / (2.0 * s2)).exp() * bessel_i0_scaled(z)
    }

    /// Distribution function by composite Simpson integration of [`pdf`](Self::pdf).
    pub fn cdf(&self, r: f64) -> f64 {
        if r <= 0.0 {
            return 0.0;
        }
        let n = 2000;
        let h = r / n as f64;
        let mut acc = self.pdf(0.0) + self.pdf(r);
        for k in 1..n {
            let w = if k % 2 == 1 { 4.0 } else { 2.0 };
            acc += w * self.pdf(k as f64 * h);
        }
        (acc * h / 3.0).min(1.0)
    }
}

/// `exp(-|x|) I0(x)`, polynomial approximations with relative error below
/// 2e-7.
pub fn bessel_i0_scaled(x: f64) -> f64 {
    let ax = x.abs();
    if ax < 3.75 {
        let t = (ax / 3.75).powi(2);
        let i0 = 1.0
            + t * (3.5156229
                + t * (3.0899424 + t * (1.2067492 + t * (0.2659732 + t * (0.0360768 + t * 0.0045813)))));
        i0 * (-ax).exp()
    } else {
        let t = 3.75 / ax;
        let p = 0.39894228
            + t * (0.01328592
                + t * (0.00225319
                    + t * (-0.00157565
                        + t * (0.00916281
                            + t * (-0.02057706 + t * (0.02635537 + t * (-0.01647633 + t * 0.00392377)))))));
        p / ax.sqrt()
    }
}

pub fn sample_rician_envelope<R: Rng + ?Sized>(model: &FadingModel, rng: &mut R) -> f64 {
    let i: f64 = rng.sample(StandardNormal);
    let q: f64 = StandardNormal.sample(rng);
    (model.los + model.scatter * i).hypot(model.scatter * q)
}
