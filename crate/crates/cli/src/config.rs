//! TOML run configuration and its conversion into a core [`Scenario`].
//!
//! Angles are in degrees, link distances in km, powers in dBm and SNRs in dB.
//! Apertures, beam radii and jitter are in metres.

use std::path::Path;

use anyhow::{anyhow, bail, Context, Result};
use rffso_core::atmosphere::{
    scintillation_downlink, scintillation_horizontal, scintillation_uplink,
    stratospheric_attenuation, TurbulencePath,
};
use rffso_core::channels::{
    ew_moment, EwChannel, EwParams, PointingError, ShadowedRicianChannel, Shadowing,
};
use rffso_core::metrics::Modulation;
use rffso_core::montecarlo::McConfig;
use rffso_core::scenario::CdfRoute;
use rffso_core::series::SeriesControl;
use rffso_core::units::{db_to_linear, dbm_to_watts};
use rffso_core::{Hop, Scenario, ScenarioKind};
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Config {
    pub scenario: ScenarioSection,
    pub uplink: RfSection,
    pub downlink: RfSection,
    #[serde(default)]
    pub fso: Vec<FsoSection>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub powers: Option<PowerSection>,
    pub sweep: SweepSection,
    #[serde(default)]
    pub mc: McSection,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioSection {
    pub kind: ScenarioKind,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub time_slots: Option<u32>,
    pub n_users: usize,
    #[serde(rename = "gamma_out_dB", default = "default_gamma_out")]
    pub gamma_out_db: f64,
    #[serde(default = "default_modulation")]
    pub modulation: Modulation,
    #[serde(default)]
    pub ber_method: BerMethod,
    #[serde(default)]
    pub route: CdfRoute,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub series_max_terms: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub series_rel_tol: Option<f64>,
}

fn default_gamma_out() -> f64 {
    7.0
}

fn default_modulation() -> Modulation {
    Modulation::Cbpsk
}

/// Analytic route for the `ber` metric.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum BerMethod {
    #[default]
    ClosedForm,
    Quadrature,
}

/// A shadowed-Rician link, by preset name or explicit `(m, b, omega)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RfSection {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub shadowing: Option<Shadowing>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub m: Option<u32>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub b: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub omega: Option<f64>,
    #[serde(rename = "avg_snr_dB")]
    pub avg_snr_db: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FsoModel {
    /// HAPS-to-HAPS link with constant Cn² over `distance_km`.
    Horizontal,
    /// HAPS-to-satellite slant path.
    Uplink,
    /// Satellite-to-HAPS slant path with aperture averaging.
    Downlink,
    /// EW parameters or a scintillation index given directly.
    Explicit,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FsoSection {
    pub model: FsoModel,
    #[serde(rename = "avg_snr_dB")]
    pub avg_snr_db: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub distance_km: Option<f64>,
    /// Structure parameter: constant Cn² for horizontal hops, ground-level
    /// C₀ for slant hops.
    #[serde(default = "default_cn2")]
    pub cn2: f64,
    #[serde(default = "default_wavelength")]
    pub wavelength_nm: f64,
    /// Absorption coefficient (1/m); horizontal hops default to 1e-5.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub phi_per_m: Option<f64>,
    /// Fixed attenuation factor; overrides `phi_per_m`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub attenuation: Option<f64>,
    #[serde(default = "default_h_haps")]
    pub h_haps_km: f64,
    #[serde(default = "default_h_sat")]
    pub h_sat_km: f64,
    #[serde(default = "default_zenith")]
    pub zenith_deg: f64,
    #[serde(default = "default_wind")]
    pub wind_speed_mps: f64,
    #[serde(default = "default_beam_radius")]
    pub beam_radius_m: f64,
    #[serde(default)]
    pub aperture_diameter_m: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub scintillation_index: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub alpha: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub beta: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub eta: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub pointing: Option<PointingSection>,
}

fn default_cn2() -> f64 {
    1e-18
}
fn default_wavelength() -> f64 {
    1550.0
}
fn default_h_haps() -> f64 {
    18.0
}
fn default_h_sat() -> f64 {
    500.0
}
fn default_zenith() -> f64 {
    70.0
}
fn default_wind() -> f64 {
    65.0
}
fn default_beam_radius() -> f64 {
    0.02
}

/// Zero-boresight pointing error. The beam width at the receiver is given
/// directly or from a full divergence angle over the hop length.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PointingSection {
    pub aperture_radius_m: f64,
    pub jitter_m: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub beam_width_m: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub divergence_deg: Option<f64>,
}

/// Transmit power of each node in chain order (one per hop). With
/// `gain_to_noise_dB` set, each hop's average SNR is its transmitter power
/// plus that ratio and the `avg_snr_dB` entries are ignored.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PowerSection {
    #[serde(rename = "nodes_dBm")]
    pub nodes_dbm: Vec<f64>,
    #[serde(
        rename = "gain_to_noise_dB",
        default,
        skip_serializing_if = "Option::is_none"
    )]
    pub gain_to_noise_db: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum SweepVariable {
    #[serde(rename = "avg_snr_per_hop_dB")]
    AvgSnrPerHopDb,
    #[serde(rename = "P_G_dBm")]
    GroundPowerDbm,
    #[serde(rename = "aperture_diameter")]
    ApertureDiameter,
    #[serde(rename = "haps_distance_km")]
    HapsDistanceKm,
    #[serde(rename = "n_users")]
    NUsers,
}

impl SweepVariable {
    pub fn name(self) -> &'static str {
        match self {
            SweepVariable::AvgSnrPerHopDb => "avg_snr_per_hop_dB",
            SweepVariable::GroundPowerDbm => "P_G_dBm",
            SweepVariable::ApertureDiameter => "aperture_diameter",
            SweepVariable::HapsDistanceKm => "haps_distance_km",
            SweepVariable::NUsers => "n_users",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MetricKind {
    Op,
    OpAsymptotic,
    Ber,
    Capacity,
    CapacityUb,
    Ee,
}

impl std::str::FromStr for MetricKind {
    type Err = anyhow::Error;

    fn from_str(s: &str) -> Result<Self> {
        Ok(match s.trim() {
            "op" => MetricKind::Op,
            "op_asymptotic" => MetricKind::OpAsymptotic,
            "ber" => MetricKind::Ber,
            "capacity" => MetricKind::Capacity,
            "capacity_ub" => MetricKind::CapacityUb,
            "ee" => MetricKind::Ee,
            other => bail!(
                "unknown metric '{other}' (expected op, op_asymptotic, ber, capacity, capacity_ub or ee)"
            ),
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepSection {
    pub variable: SweepVariable,
    pub start: f64,
    pub stop: f64,
    pub step: f64,
    pub metrics: Vec<MetricKind>,
}

impl SweepSection {
    pub fn validate(&self) -> Result<()> {
        if !(self.start < self.stop) {
            bail!(
                "sweep: start ({}) must be below stop ({})",
                self.start,
                self.stop
            );
        }
        if !(self.step > 0.0) {
            bail!("sweep: step must be positive, got {}", self.step);
        }
        if self.metrics.is_empty() {
            bail!("sweep: metrics must not be empty");
        }
        Ok(())
    }

    /// `start, start + step, ...` up to and including `stop`.
    pub fn points(&self) -> Vec<f64> {
        let n = ((self.stop - self.start) / self.step + 1e-9).floor() as usize + 1;
        (0..n)
            .map(|k| {
                let x = self.start + k as f64 * self.step;
                // drop accumulated binary noise such as 0.15000000000000002
                format!("{x:.12e}").parse().unwrap_or(x)
            })
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct McSection {
    #[serde(default = "default_true")]
    pub enabled: bool,
    #[serde(default = "default_samples")]
    pub samples: u64,
    #[serde(default = "default_seed")]
    pub seed: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub workers: Option<usize>,
    #[serde(default = "default_ci")]
    pub ci_level: f64,
}

impl Default for McSection {
    fn default() -> Self {
        McSection {
            enabled: true,
            samples: default_samples(),
            seed: default_seed(),
            workers: None,
            ci_level: default_ci(),
        }
    }
}

fn default_true() -> bool {
    true
}
fn default_samples() -> u64 {
    1_000_000
}
fn default_seed() -> u64 {
    0x5eed
}
fn default_ci() -> f64 {
    0.95
}

impl McSection {
    pub fn to_core(&self) -> McConfig {
        let mut cfg = McConfig::new(self.samples, self.seed);
        cfg.ci_level = self.ci_level;
        if let Some(w) = self.workers {
            cfg.workers = w;
        }
        cfg
    }
}

impl Config {
    pub fn from_toml(text: &str) -> Result<Self> {
        let cfg: Config = toml::from_str(text)?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .with_context(|| format!("cannot read config {}", path.display()))?;
        Self::from_toml(&text).with_context(|| format!("invalid config {}", path.display()))
    }

    pub fn to_toml(&self) -> Result<String> {
        Ok(toml::to_string(self)?)
    }

    /// Checks everything that does not depend on the sweep point, then
    /// builds the scenario at every sweep point.
    pub fn validate(&self) -> Result<()> {
        self.sweep.validate()?;
        if self.mc.enabled {
            self.mc.to_core().validate().context("mc")?;
        }
        if let Some(p) = &self.powers {
            if p.gain_to_noise_db.is_some() && self.sweep.variable == SweepVariable::AvgSnrPerHopDb
            {
                bail!("powers: gain_to_noise_dB fixes the hop SNRs and cannot be combined with an avg_snr_per_hop_dB sweep");
            }
        } else if self.sweep.variable == SweepVariable::GroundPowerDbm {
            bail!("sweep: P_G_dBm needs a [powers] section");
        }
        if self.metrics_need_powers() && self.powers.is_none() {
            bail!("metric ee needs a [powers] section");
        }
        for x in self.sweep.points() {
            self.scenario_at(x)?;
        }
        Ok(())
    }

    fn metrics_need_powers(&self) -> bool {
        self.sweep.metrics.contains(&MetricKind::Ee)
    }

    /// Copy of the configuration with the sweep variable set to `x`.
    pub fn at_point(&self, x: f64) -> Result<Config> {
        let mut c = self.clone();
        match self.sweep.variable {
            SweepVariable::AvgSnrPerHopDb => {
                c.uplink.avg_snr_db = x;
                c.downlink.avg_snr_db = x;
                c.fso.iter_mut().for_each(|f| f.avg_snr_db = x);
            }
            SweepVariable::GroundPowerDbm => {
                let p = c
                    .powers
                    .as_mut()
                    .ok_or_else(|| anyhow!("sweep: P_G_dBm needs a [powers] section"))?;
                match p.nodes_dbm.first_mut() {
                    Some(g) => *g = x,
                    None => bail!("powers: nodes_dBm is empty"),
                }
            }
            SweepVariable::ApertureDiameter => {
                let mut hit = false;
                for f in c.fso.iter_mut().filter(|f| f.model == FsoModel::Downlink) {
                    f.aperture_diameter_m = x;
                    hit = true;
                }
                if !hit {
                    bail!("sweep: aperture_diameter needs an fso hop with model = \"downlink\"");
                }
            }
            SweepVariable::HapsDistanceKm => {
                let mut hit = false;
                for f in c.fso.iter_mut().filter(|f| f.model == FsoModel::Horizontal) {
                    f.distance_km = Some(x);
                    hit = true;
                }
                if !hit {
                    bail!("sweep: haps_distance_km needs an fso hop with model = \"horizontal\"");
                }
            }
            SweepVariable::NUsers => {
                if x < 1.0 || x.fract() != 0.0 {
                    bail!("sweep: n_users must take positive integer values, got {x}");
                }
                c.scenario.n_users = x as usize;
            }
        }
        Ok(c)
    }

    pub fn scenario_at(&self, x: f64) -> Result<Scenario> {
        self.at_point(x)?
            .scenario()
            .with_context(|| format!("{} = {x}", self.sweep.variable.name()))
    }

    /// Builds the relay chain `uplink (rf) → fso... → downlink (multicast)`.
    pub fn scenario(&self) -> Result<Scenario> {
        let s = &self.scenario;
        let n_hops = self.fso.len() + 2;
        let snr_db: Vec<f64> = match &self.powers {
            Some(PowerSection {
                nodes_dbm,
                gain_to_noise_db: Some(g2n),
            }) => {
                if nodes_dbm.len() != n_hops {
                    bail!(
                        "powers: nodes_dBm has {} entries for {n_hops} hops",
                        nodes_dbm.len()
                    );
                }
                nodes_dbm.iter().map(|p| p + g2n).collect()
            }
            _ => std::iter::once(self.uplink.avg_snr_db)
                .chain(self.fso.iter().map(|f| f.avg_snr_db))
                .chain(std::iter::once(self.downlink.avg_snr_db))
                .collect(),
        };

        let uplink = self.uplink.channel(snr_db[0]).context("uplink")?;
        let mut hops = vec![Hop::Rf(uplink)];
        for (i, f) in self.fso.iter().enumerate() {
            hops.push(Hop::Fso(
                f.channel(snr_db[i + 1])
                    .with_context(|| format!("fso hop {}", i + 1))?,
            ));
        }
        if s.n_users == 0 {
            bail!("scenario: n_users must be at least 1");
        }
        let user = self
            .downlink
            .channel(snr_db[n_hops - 1])
            .context("downlink")?;
        hops.push(Hop::Multicast(vec![user; s.n_users]));

        let time_slots = match (s.time_slots, s.kind.time_slots()) {
            (Some(t), _) => t,
            (None, Some(t)) => t,
            (None, None) => bail!("scenario: kind = \"custom\" needs time_slots"),
        };
        let mut series = SeriesControl::default();
        if let Some(n) = s.series_max_terms {
            series.max_terms = n;
        }
        if let Some(t) = s.series_rel_tol {
            series.rel_tol = t;
        }
        let powers = match &self.powers {
            Some(p) => {
                if p.nodes_dbm.len() != n_hops {
                    bail!(
                        "powers: nodes_dBm has {} entries for {n_hops} hops",
                        p.nodes_dbm.len()
                    );
                }
                p.nodes_dbm.iter().map(|&d| dbm_to_watts(d)).collect()
            }
            None => vec![1.0; n_hops],
        };
        let sc = Scenario {
            kind: s.kind,
            hops,
            time_slots,
            powers,
            route: s.route,
            series,
        };
        sc.validate().map_err(|e| anyhow!("scenario: {e}"))?;
        Ok(sc)
    }
}

impl RfSection {
    pub fn channel(&self, avg_snr_db: f64) -> Result<ShadowedRicianChannel> {
        let g = db_to_linear(avg_snr_db);
        match (self.shadowing, self.m, self.b, self.omega) {
            (Some(p), None, None, None) => Ok(ShadowedRicianChannel::from_preset(p, g)),
            (None, Some(m), Some(b), Some(omega)) => {
                Ok(ShadowedRicianChannel::new(m, b, omega, g)?)
            }
            _ => bail!("give either shadowing (heavy, average, light) or all of m, b and omega"),
        }
    }
}

impl FsoSection {
    fn wavelength(&self) -> f64 {
        self.wavelength_nm * 1e-9
    }

    fn distance(&self) -> Result<f64> {
        match self.distance_km {
            Some(d) if d > 0.0 => Ok(d * 1e3),
            Some(d) => bail!("distance_km must be positive, got {d}"),
            None => bail!("model = \"horizontal\" needs distance_km"),
        }
    }

    fn slant_path(&self) -> TurbulencePath {
        TurbulencePath::slant(
            self.h_haps_km * 1e3,
            self.h_sat_km * 1e3,
            self.zenith_deg,
            self.wind_speed_mps,
            self.cn2,
            self.wavelength(),
        )
        .with_beam_radius(self.beam_radius_m)
    }

    /// Turbulence parameters, default attenuation and hop length (m).
    fn turbulence(&self) -> Result<(EwParams, f64, Option<f64>)> {
        let fit = |s2: f64| rffso_core::channels::ew_fit(s2);
        Ok(match self.model {
            FsoModel::Horizontal => {
                let l = self.distance()?;
                let path = TurbulencePath::horizontal(l, self.cn2, self.wavelength());
                path.validate_horizontal()?;
                let att = stratospheric_attenuation(self.phi_per_m.unwrap_or(1e-5), l);
                (fit(scintillation_horizontal(&path))?, att, Some(l))
            }
            FsoModel::Uplink => {
                let path = self.slant_path();
                (
                    fit(scintillation_uplink(&path)?)?,
                    1.0,
                    Some(path.slant_length()),
                )
            }
            FsoModel::Downlink => {
                let path = self.slant_path();
                let s2 = scintillation_downlink(&path, self.aperture_diameter_m)?;
                (fit(s2)?, 1.0, Some(path.slant_length()))
            }
            FsoModel::Explicit => {
                let p = match (self.scintillation_index, self.alpha, self.beta) {
                    (Some(s2), None, None) => fit(s2)?,
                    (None, Some(alpha), Some(beta)) => {
                        let eta = match self.eta {
                            Some(e) => e,
                            None => 1.0 / ew_moment(alpha, beta, 1.0, 1.0)?,
                        };
                        EwParams { alpha, beta, eta }
                    }
                    _ => bail!("model = \"explicit\" needs scintillation_index or alpha and beta"),
                };
                let att = match self.phi_per_m {
                    Some(phi) => stratospheric_attenuation(phi, self.distance()?),
                    None => 1.0,
                };
                (p, att, self.distance_km.map(|d| d * 1e3))
            }
        })
    }

    pub fn channel(&self, avg_snr_db: f64) -> Result<EwChannel> {
        let (params, att, length) = self.turbulence()?;
        let att = self.attenuation.unwrap_or(att);
        let mut ch = EwChannel::new(params, att, db_to_linear(avg_snr_db))?;
        if let Some(p) = &self.pointing {
            let width = match (p.beam_width_m, p.divergence_deg) {
                (Some(w), None) => w,
                (None, Some(theta)) => {
                    let l = length
                        .ok_or_else(|| anyhow!("pointing: divergence_deg needs a hop length"))?;
                    theta.to_radians() * l
                }
                _ => bail!("pointing: give exactly one of beam_width_m and divergence_deg"),
            };
            ch = ch.with_pointing(
                PointingError::new(p.aperture_radius_m, width, p.jitter_m).context("pointing")?,
            );
        }
        Ok(ch)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const BASE: &str = r#"
[scenario]
kind = "s1"
n_users = 3

[uplink]
shadowing = "average"
avg_snr_dB = 20

[downlink]
shadowing = "heavy"
avg_snr_dB = 20

[[fso]]
model = "horizontal"
avg_snr_dB = 20
distance_km = 100

[sweep]
variable = "avg_snr_per_hop_dB"
start = 0
stop = 10
step = 5
metrics = ["op"]
"#;

    #[test]
    fn parses_and_builds() {
        let c = Config::from_toml(BASE).unwrap();
        let sc = c.scenario_at(10.0).unwrap();
        assert_eq!(sc.hops.len(), 3);
        assert_eq!(sc.time_slots, 3);
        assert_eq!(sc.users().len(), 3);
        assert_eq!(c.sweep.points(), vec![0.0, 5.0, 10.0]);
        match &sc.hops[1] {
            Hop::Fso(f) => {
                assert!((f.attenuation - (-1f64).exp()).abs() < 1e-15);
                assert!((f.avg_snr - 10.0).abs() < 1e-12);
            }
            _ => panic!("expected fso hop"),
        }
    }

    #[test]
    fn sweep_points_include_stop() {
        let s = SweepSection {
            variable: SweepVariable::AvgSnrPerHopDb,
            start: 0.0,
            stop: 1.0,
            step: 0.1,
            metrics: vec![MetricKind::Op],
        };
        let p = s.points();
        assert_eq!(p.len(), 11);
        assert_eq!(p[3], 0.3);
    }

    #[test]
    fn rejects_mixed_shadowing_parameters() {
        let text = BASE.replace("shadowing = \"average\"", "shadowing = \"average\"\nm = 3");
        assert!(Config::from_toml(&text).is_err());
    }

    #[test]
    fn parse_error_has_line_number() {
        let text = BASE.replace("n_users = 3", "n_users = three");
        let msg = format!("{:#}", Config::from_toml(&text).unwrap_err());
        assert!(msg.contains("line 4"), "{msg}");
    }

    #[test]
    fn power_derived_snr() {
        let text = format!("{BASE}\n[powers]\nnodes_dBm = [30, 20, 10]\ngain_to_noise_dB = -10\n")
            .replace("avg_snr_per_hop_dB", "P_G_dBm");
        let c = Config::from_toml(&text).unwrap();
        let sc = c.scenario_at(5.0).unwrap();
        assert!((sc.powers[0] - dbm_to_watts(5.0)).abs() < 1e-15);
        match &sc.hops[0] {
            Hop::Rf(rf) => assert!((rf.avg_snr - db_to_linear(-5.0)).abs() < 1e-12),
            _ => panic!("expected rf hop"),
        }
        assert!((sc.users()[0].avg_snr - 1.0).abs() < 1e-12);
    }

    #[test]
    fn n_users_sweep_needs_integers() {
        let text = BASE
            .replace("avg_snr_per_hop_dB", "n_users")
            .replace("start = 0", "start = 1")
            .replace("step = 5", "step = 1.5");
        assert!(Config::from_toml(&text).is_err());
    }
}
