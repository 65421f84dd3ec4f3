//! Atmospheric propagation: refractive-index structure profile, Fried
//! parameter, scintillation indices for horizontal and slant optical paths,
//! stratospheric attenuation, RF path loss and HAPS geometry.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::quad::{integrate_with_breaks, QuadConfig};

/// Distance exponent of the plane-wave Rytov variance.
pub const RYTOV_DISTANCE_EXPONENT: f64 = 11.0 / 6.0;

/// Beam-wander scaling constant at 1550 nm.
pub const BEAM_WANDER_CR: f64 = PI;

/// Geometry and turbulence description of one optical hop.
///
/// Slant paths use `h_low`, `h_high` and `zenith_deg`; horizontal paths use
/// `link_length` with a constant structure parameter `cn2_nominal`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TurbulencePath {
    pub h_low: f64,
    pub h_high: f64,
    pub zenith_deg: f64,
    pub wind_speed: f64,
    pub cn2_nominal: f64,
    pub wavelength: f64,
    pub beam_radius_tx: f64,
    /// Phase-front radius of curvature; `f64::INFINITY` for a collimated beam.
    pub phase_front_radius: f64,
    pub link_length: f64,
    pub distance_exponent: f64,
}

impl TurbulencePath {
    /// Horizontal hop of length `link_length` (m) through constant `cn2`.
    pub fn horizontal(link_length: f64, cn2: f64, wavelength: f64) -> Self {
        TurbulencePath {
            h_low: 0.0,
            h_high: 0.0,
            zenith_deg: 0.0,
            wind_speed: 0.0,
            cn2_nominal: cn2,
            wavelength,
            beam_radius_tx: 0.02,
            phase_front_radius: f64::INFINITY,
            link_length,
            distance_exponent: RYTOV_DISTANCE_EXPONENT,
        }
    }

    /// Slant hop between altitudes `h_low` and `h_high` (m).
    pub fn slant(
        h_low: f64,
        h_high: f64,
        zenith_deg: f64,
        wind_speed: f64,
        cn2_nominal: f64,
        wavelength: f64,
    ) -> Self {
        TurbulencePath {
            h_low,
            h_high,
            zenith_deg,
            wind_speed,
            cn2_nominal,
            wavelength,
            beam_radius_tx: 0.02,
            phase_front_radius: f64::INFINITY,
            link_length: 0.0,
            distance_exponent: RYTOV_DISTANCE_EXPONENT,
        }
    }

    pub fn with_beam_radius(mut self, w0: f64) -> Self {
        self.beam_radius_tx = w0;
        self
    }

    pub fn with_phase_front_radius(mut self, f0: f64) -> Self {
        self.phase_front_radius = f0;
        self
    }

    pub fn with_distance_exponent(mut self, exponent: f64) -> Self {
        self.distance_exponent = exponent;
        self
    }

    pub fn wave_number(&self) -> f64 {
        2.0 * PI / self.wavelength
    }

    pub fn sec_zenith(&self) -> f64 {
        1.0 / self.zenith_deg.to_radians().cos()
    }

    /// Propagation distance along a slant path (flat Earth).
    pub fn slant_length(&self) -> f64 {
        (self.h_high - self.h_low) * self.sec_zenith()
    }

    fn validate_common(&self) -> Result<()> {
        if !(self.wavelength > 0.0) {
            return Err(Error::invalid("wavelength must be positive"));
        }
        if !(self.cn2_nominal >= 0.0) {
            return Err(Error::invalid("cn2_nominal must be non-negative"));
        }
        Ok(())
    }

    pub fn validate_horizontal(&self) -> Result<()> {
        self.validate_common()?;
        if !(self.link_length > 0.0) {
            return Err(Error::invalid(
                "link_length must be positive for a horizontal path",
            ));
        }
        Ok(())
    }

    pub fn validate_slant(&self) -> Result<()> {
        self.validate_common()?;
        if !(self.h_low >= 0.0 && self.h_high > self.h_low) {
            return Err(Error::invalid("slant path needs h_high > h_low >= 0"));
        }
        if !(0.0..90.0).contains(&self.zenith_deg) {
            return Err(Error::invalid("zenith angle must lie in [0, 90) degrees"));
        }
        if !(self.beam_radius_tx > 0.0) {
            return Err(Error::invalid("beam_radius_tx must be positive"));
        }
        if !(self.wind_speed >= 0.0) {
            return Err(Error::invalid("wind_speed must be non-negative"));
        }
        if self.phase_front_radius.is_nan() || self.phase_front_radius == 0.0 {
            return Err(Error::invalid("phase_front_radius must be non-zero"));
        }
        Ok(())
    }
}

/// High-altitude rms wind speed `u = √(v² + 30.69 v + 348.91)`.
pub fn u_rms(wind_speed: f64) -> f64 {
    (wind_speed * wind_speed + 30.69 * wind_speed + 348.91).sqrt()
}

/// Refractive-index structure parameter `Cn²(h)` in m^(-2/3).
pub fn cn2_profile(h: f64, path: &TurbulencePath) -> f64 {
    let u = u_rms(path.wind_speed);
    0.00594 * (u / 27.0).powi(2) * (1e-5 * h).powi(10) * (-h / 1000.0).exp()
        + 2.7e-16 * (-h / 1500.0).exp()
        + path.cn2_nominal * (-h / 100.0).exp()
}

fn altitude_quad_config() -> QuadConfig {
    QuadConfig {
        abs_tol: 0.0,
        rel_tol: 1e-10,
        max_intervals: 4000,
    }
}

/// Breakpoints that resolve the 100 m, 1.5 km and 10 km scales of the profile.
fn altitude_breaks(h_low: f64, h_high: f64) -> Vec<f64> {
    let mut pts = vec![h_low, h_high];
    let mut d = 50.0;
    while h_low + d < h_high {
        pts.push(h_low + d);
        d *= 2.0;
    }
    for h in [
        300.0, 1000.0, 3000.0, 5000.0, 10_000.0, 15_000.0, 20_000.0, 30_000.0,
    ] {
        if h > h_low && h < h_high {
            pts.push(h);
        }
    }
    pts.sort_by(f64::total_cmp);
    pts.dedup();
    pts
}

fn altitude_integral<F: Fn(f64) -> f64>(path: &TurbulencePath, what: &str, f: F) -> Result<f64> {
    let breaks = altitude_breaks(path.h_low, path.h_high);
    integrate_with_breaks(f, &breaks, &altitude_quad_config())
        .map(|r| r.value)
        .map_err(|e| e.context(what))
}

/// `∫ Cn²(h) dh` between the two terminal altitudes.
pub fn cn2_integral(path: &TurbulencePath) -> Result<f64> {
    path.validate_slant()?;
    altitude_integral(path, "Cn2 altitude integral", |h| cn2_profile(h, path))
}

/// Fried parameter `r0 = [0.42 sec(ξ) K² ∫Cn²]^(-3/5)` in metres.
pub fn fried_parameter(path: &TurbulencePath) -> Result<f64> {
    let k = path.wave_number();
    let integral = cn2_integral(path)?;
    Ok((0.42 * path.sec_zenith() * k * k * integral).powf(-0.6))
}

/// Gaussian-beam parameters at the receiver plane of a hop of length `length`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BeamParameters {
    pub theta0: f64,
    pub lambda0: f64,
    /// Beam radius at the receiver (m).
    pub w: f64,
    pub theta: f64,
}

pub fn beam_parameters(path: &TurbulencePath, length: f64) -> BeamParameters {
    let w0 = path.beam_radius_tx;
    let theta0 = 1.0 - length / path.phase_front_radius;
    let lambda0 = 2.0 * length / (path.wave_number() * w0 * w0);
    let denom = theta0 * theta0 + lambda0 * lambda0;
    BeamParameters {
        theta0,
        lambda0,
        w: w0 * denom.sqrt(),
        theta: theta0 / denom,
    }
}

fn beam_wander_from_r0(path: &TurbulencePath, r0: f64) -> f64 {
    let w0 = path.beam_radius_tx;
    let dh = path.h_high - path.h_low;
    let sec = path.sec_zenith();
    let q = (BEAM_WANDER_CR * w0 / r0).powi(2);
    0.54 * dh
        * dh
        * sec
        * sec
        * (path.wavelength / (2.0 * w0)).powi(2)
        * (2.0 * w0 / r0).powf(5.0 / 3.0)
        * (1.0 - (q / (1.0 + q)).powf(1.0 / 6.0))
}

/// Beam-wander induced pointing variance `σ_pe²` (m²) of an uplink beam.
pub fn beam_wander_variance(path: &TurbulencePath) -> Result<f64> {
    let r0 = fried_parameter(path)?;
    Ok(beam_wander_from_r0(path, r0))
}

/// Plane-wave scintillation index of a horizontal hop,
/// `1.23 Cn² K^(7/6) L^e` with `e = path.distance_exponent`.
pub fn scintillation_horizontal(path: &TurbulencePath) -> f64 {
    1.23 * path.cn2_nominal
        * path.wave_number().powf(7.0 / 6.0)
        * path.link_length.powf(path.distance_exponent)
}

/// Weak-turbulence uplink Rytov variance `σ_Bu²`.
pub fn rytov_uplink(path: &TurbulencePath) -> Result<f64> {
    path.validate_slant()?;
    let dh = path.h_high - path.h_low;
    let re_i56 = (5.0 * PI / 12.0).cos();
    let mu3u = altitude_integral(path, "uplink turbulence moment", |h| {
        let eps = 1.0 - (h - path.h_low) / dh;
        let e = (eps * (1.0 - eps)).max(0.0);
        cn2_profile(h, path) * e.powf(5.0 / 6.0) * re_i56
    })?;
    Ok(8.7
        * mu3u
        * path.wave_number().powf(7.0 / 6.0)
        * dh.powf(5.0 / 6.0)
        * path.sec_zenith().powf(11.0 / 6.0))
}

/// Scintillation index of a slant uplink: beam-wander pointing term plus the
/// extended-beam Rytov term.
pub fn scintillation_uplink(path: &TurbulencePath) -> Result<f64> {
    let s2 = rytov_uplink(path)?;
    let r0 = fried_parameter(path)?;
    let length = path.slant_length();
    let beam = beam_parameters(path, length);
    let sigma_pe2 = beam_wander_from_r0(path, r0);
    let alpha_pe = sigma_pe2.sqrt() / length;
    let dh = path.h_high - path.h_low;
    let sec = path.sec_zenith();
    let pointing = 5.95
        * dh
        * dh
        * sec
        * sec
        * (2.0 * path.beam_radius_tx / r0).powf(5.0 / 3.0)
        * (alpha_pe / beam.w).powi(2);
    let s125 = s2.powf(6.0 / 5.0);
    let rytov = (0.49 * s2 / (1.0 + (1.11 + beam.theta) * s125).powf(7.0 / 6.0)
        + 0.51 * s2 / (1.0 + 0.69 * s125).powf(5.0 / 6.0))
    .exp_m1();
    Ok(pointing + rytov)
}

/// Weak-turbulence downlink Rytov variance `σ_Bd²`.
pub fn rytov_downlink(path: &TurbulencePath) -> Result<f64> {
    path.validate_slant()?;
    let integral = altitude_integral(path, "downlink turbulence moment", |h| {
        cn2_profile(h, path) * (h - path.h_low).max(0.0).powf(5.0 / 6.0)
    })?;
    Ok(2.25 * path.wave_number().powf(7.0 / 6.0) * path.sec_zenith().powf(11.0 / 6.0) * integral)
}

/// Aperture-averaged scintillation index of a slant downlink received by an
/// aperture of diameter `aperture_diameter` (m).
pub fn scintillation_downlink(path: &TurbulencePath, aperture_diameter: f64) -> Result<f64> {
    if !(aperture_diameter >= 0.0) {
        return Err(Error::invalid("aperture diameter must be non-negative"));
    }
    let s2 = rytov_downlink(path)?;
    let d2 =
        path.wave_number() * aperture_diameter * aperture_diameter / (4.0 * path.slant_length());
    let s125 = s2.powf(6.0 / 5.0);
    let v = 0.49 * s2 / (1.0 + 0.18 * d2 + 0.56 * s125).powf(7.0 / 6.0)
        + 0.51 * s2 * (1.0 + 0.69 * s125).powf(-5.0 / 6.0) / (1.0 + 0.90 * d2 + 0.62 * d2 * s125);
    Ok(v.exp_m1())
}

/// Beer–Lambert attenuation `exp(−φ L)` with `φ` per metre and `L` in metres.
pub fn stratospheric_attenuation(phi: f64, distance: f64) -> f64 {
    (-phi * distance).exp()
}

/// RF link budget between two terminals.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PathLossBudget {
    pub gain_tx_dbi: f64,
    pub gain_rx_dbi: f64,
    pub freq_ghz: f64,
    pub distance_km: f64,
    #[serde(default)]
    pub rain_loss_db: f64,
    #[serde(default)]
    pub gas_loss_db: f64,
}

impl PathLossBudget {
    pub fn new(gain_tx_dbi: f64, gain_rx_dbi: f64, freq_ghz: f64, distance_km: f64) -> Self {
        PathLossBudget {
            gain_tx_dbi,
            gain_rx_dbi,
            freq_ghz,
            distance_km,
            rain_loss_db: 0.0,
            gas_loss_db: 0.0,
        }
    }

    pub fn free_space_loss_db(&self) -> f64 {
        92.45 + 20.0 * self.freq_ghz.log10() + 20.0 * self.distance_km.log10()
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.freq_ghz > 0.0 && self.distance_km > 0.0) {
            return Err(Error::invalid(
                "path loss needs positive frequency and distance",
            ));
        }
        Ok(())
    }
}

/// Net link gain `F = G_T + G_R − L_F − L_R − L_A` in dB.
pub fn path_loss_db(budget: &PathLossBudget) -> Result<f64> {
    budget.validate()?;
    Ok(budget.gain_tx_dbi + budget.gain_rx_dbi
        - budget.free_space_loss_db()
        - budget.rain_loss_db
        - budget.gas_loss_db)
}

/// Ground distance between two HAPS that see the same satellite at zenith
/// angle `zenith_deg` on opposite sides (flat Earth), in metres.
pub fn haps_separation(h_haps: f64, h_sat: f64, zenith_deg: f64) -> Result<f64> {
    if !(h_sat > h_haps) {
        return Err(Error::invalid("satellite must be above the HAPS"));
    }
    if !(0.0..90.0).contains(&zenith_deg) {
        return Err(Error::invalid("zenith angle must lie in [0, 90) degrees"));
    }
    Ok(2.0 * (h_sat - h_haps) * zenith_deg.to_radians().tan())
}
