//! Decode-and-forward relay chains with a best-user multicast terminal stage.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::channels::{EwChannel, ShadowedRicianChannel};
use crate::error::{Error, Result};
use crate::series::SeriesControl;

/// One hop of a relay chain.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "lowercase")]
pub enum Hop {
    Rf(ShadowedRicianChannel),
    Fso(EwChannel),
    /// Terminal stage: the best of `N` independent user links.
    Multicast(Vec<ShadowedRicianChannel>),
}

/// A CDF value with the bookkeeping of any truncated series behind it.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CdfValue {
    pub value: f64,
    /// Largest number of series terms used by any hop (0 when none).
    pub terms: usize,
    pub converged: bool,
}

impl CdfValue {
    fn exact(value: f64) -> Self {
        CdfValue {
            value,
            terms: 0,
            converged: true,
        }
    }
}

/// How optical hop CDFs are evaluated.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CdfRoute {
    /// Closed-form EW CDF; quadrature over the pointing factor when present.
    #[default]
    Exact,
    /// Truncated binomial / Meijer-G series under the scenario's
    /// [`SeriesControl`].
    Series,
}

impl Hop {
    pub fn label(&self) -> &'static str {
        match self {
            Hop::Rf(_) => "rf",
            Hop::Fso(_) => "fso",
            Hop::Multicast(_) => "multicast",
        }
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            Hop::Rf(c) => c.validate(),
            Hop::Fso(c) => c.validate(),
            Hop::Multicast(users) => {
                if users.is_empty() {
                    return Err(Error::invalid("multicast stage needs at least one user"));
                }
                users.iter().try_for_each(|u| u.validate())
            }
        }
    }

    pub fn cdf(&self, gamma: f64, route: CdfRoute, ctrl: &SeriesControl) -> Result<CdfValue> {
        match self {
            Hop::Rf(c) => Ok(CdfValue::exact(c.cdf(gamma))),
            Hop::Multicast(users) => Ok(CdfValue::exact(multicast_cdf(users, gamma))),
            Hop::Fso(c) => match route {
                CdfRoute::Exact => Ok(CdfValue::exact(c.cdf_snr(gamma)?)),
                CdfRoute::Series => {
                    let s = c.cdf_snr_series(gamma, ctrl)?;
                    Ok(CdfValue {
                        value: s.value.clamp(0.0, 1.0),
                        terms: s.terms,
                        converged: s.converged,
                    })
                }
            },
        }
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        match self {
            Hop::Rf(c) => c.sample(rng),
            Hop::Fso(c) => c.sample_snr(rng),
            Hop::Multicast(users) => users
                .iter()
                .map(|u| u.sample(rng))
                .fold(f64::NEG_INFINITY, f64::max),
        }
    }

    /// Mean SNR of the hop; for the multicast stage, the largest user mean.
    pub fn mean_snr(&self) -> Result<f64> {
        match self {
            Hop::Rf(c) => Ok(c.mean_snr()),
            Hop::Fso(c) => c.mean_snr(),
            Hop::Multicast(users) => Ok(users
                .iter()
                .map(|u| u.mean_snr())
                .fold(f64::NEG_INFINITY, f64::max)),
        }
    }

    pub fn set_avg_snr(&mut self, avg_snr: f64) {
        match self {
            Hop::Rf(c) => c.avg_snr = avg_snr,
            Hop::Fso(c) => c.avg_snr = avg_snr,
            Hop::Multicast(users) => users.iter_mut().for_each(|u| u.avg_snr = avg_snr),
        }
    }
}

/// CDF of the best of independent users, `Π F_i(γ)`.
pub fn multicast_cdf(users: &[ShadowedRicianChannel], gamma: f64) -> f64 {
    users.iter().map(|u| u.cdf(gamma)).product()
}

/// Architecture of a relay chain.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ScenarioKind {
    /// Ground → HAPS (RF) → HAPS (FSO) → multicast users (RF).
    S1,
    /// Ground → HAPS (RF) → satellite (FSO) → HAPS (FSO) → multicast users (RF).
    S2,
    /// Any other chain of hops.
    Custom,
}

impl ScenarioKind {
    pub fn time_slots(self) -> Option<u32> {
        match self {
            ScenarioKind::S1 => Some(3),
            ScenarioKind::S2 => Some(4),
            ScenarioKind::Custom => None,
        }
    }
}

/// A decode-and-forward chain: the end-to-end SNR is the minimum over hops.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Scenario {
    pub kind: ScenarioKind,
    pub hops: Vec<Hop>,
    pub time_slots: u32,
    /// Per-node transmit powers in watts, in chain order.
    pub powers: Vec<f64>,
    #[serde(default)]
    pub route: CdfRoute,
    #[serde(default)]
    pub series: SeriesControl,
}

impl Scenario {
    pub fn s1(
        uplink: ShadowedRicianChannel,
        fso: EwChannel,
        users: Vec<ShadowedRicianChannel>,
    ) -> Self {
        Scenario {
            kind: ScenarioKind::S1,
            hops: vec![Hop::Rf(uplink), Hop::Fso(fso), Hop::Multicast(users)],
            time_slots: 3,
            powers: vec![1.0; 3],
            route: CdfRoute::default(),
            series: SeriesControl::default(),
        }
    }

    pub fn s2(
        uplink: ShadowedRicianChannel,
        fso_up: EwChannel,
        fso_down: EwChannel,
        users: Vec<ShadowedRicianChannel>,
    ) -> Self {
        Scenario {
            kind: ScenarioKind::S2,
            hops: vec![
                Hop::Rf(uplink),
                Hop::Fso(fso_up),
                Hop::Fso(fso_down),
                Hop::Multicast(users),
            ],
            time_slots: 4,
            powers: vec![1.0; 4],
            route: CdfRoute::default(),
            series: SeriesControl::default(),
        }
    }

    pub fn custom(hops: Vec<Hop>, time_slots: u32) -> Self {
        let n = hops.len();
        Scenario {
            kind: ScenarioKind::Custom,
            hops,
            time_slots,
            powers: vec![1.0; n],
            route: CdfRoute::default(),
            series: SeriesControl::default(),
        }
    }

    pub fn with_powers(mut self, powers: Vec<f64>) -> Self {
        self.powers = powers;
        self
    }

    pub fn with_route(mut self, route: CdfRoute) -> Self {
        self.route = route;
        self
    }

    pub fn with_series(mut self, series: SeriesControl) -> Self {
        self.series = series;
        self
    }

    /// Sets the same average SNR on every hop and user.
    pub fn with_avg_snr(mut self, avg_snr: f64) -> Self {
        self.hops.iter_mut().for_each(|h| h.set_avg_snr(avg_snr));
        self
    }

    pub fn users(&self) -> &[ShadowedRicianChannel] {
        self.hops
            .iter()
            .find_map(|h| match h {
                Hop::Multicast(u) => Some(u.as_slice()),
                _ => None,
            })
            .unwrap_or(&[])
    }

    pub fn fso_hops(&self) -> impl Iterator<Item = &EwChannel> {
        self.hops.iter().filter_map(|h| match h {
            Hop::Fso(c) => Some(c),
            _ => None,
        })
    }

    pub fn validate(&self) -> Result<()> {
        if self.hops.is_empty() {
            return Err(Error::invalid("scenario has no hops"));
        }
        let pattern: Vec<&str> = self.hops.iter().map(|h| h.label()).collect();
        match self.kind {
            ScenarioKind::S1 if pattern != ["rf", "fso", "multicast"] => {
                return Err(Error::invalid("s1 must be rf -> fso -> multicast"));
            }
            ScenarioKind::S2 if pattern != ["rf", "fso", "fso", "multicast"] => {
                return Err(Error::invalid("s2 must be rf -> fso -> fso -> multicast"));
            }
            _ => {}
        }
        if let Some(n) = self.kind.time_slots() {
            if self.time_slots != n {
                return Err(Error::invalid(format!(
                    "{:?} uses {n} time slots, got {}",
                    self.kind, self.time_slots
                )));
            }
        }
        if self.time_slots == 0 {
            return Err(Error::invalid("time_slots must be positive"));
        }
        if self.powers.iter().any(|p| !(*p >= 0.0) || !p.is_finite()) {
            return Err(Error::invalid(
                "transmit powers must be finite and non-negative",
            ));
        }
        for (i, h) in self.hops.iter().enumerate() {
            h.validate()
                .map_err(|e| e.context(format!("hop {i} ({})", h.label())))?;
        }
        Ok(())
    }

    /// Per-hop CDF values at `gamma`.
    pub fn hop_cdfs(&self, gamma: f64) -> Result<Vec<CdfValue>> {
        self.hops
            .iter()
            .enumerate()
            .map(|(i, h)| {
                h.cdf(gamma, self.route, &self.series)
                    .map_err(|e| e.context(format!("hop {i} ({})", h.label())))
            })
            .collect()
    }

    /// CDF of the end-to-end SNR, `1 − Π (1 − F_i(γ))`.
    pub fn system_cdf(&self, gamma: f64) -> Result<CdfValue> {
        if gamma <= 0.0 {
            return Ok(CdfValue::exact(0.0));
        }
        let hops = self.hop_cdfs(gamma)?;
        let log_survival: f64 = hops.iter().map(|c| (-c.value).ln_1p()).sum();
        Ok(CdfValue {
            value: (-log_survival.exp_m1()).clamp(0.0, 1.0),
            terms: hops.iter().map(|c| c.terms).max().unwrap_or(0),
            converged: hops.iter().all(|c| c.converged),
        })
    }

    /// The same CDF written out by inclusion–exclusion,
    /// `Σ_{S ≠ ∅} (−1)^{|S|+1} Π_{i∈S} F_i`.
    pub fn system_cdf_expanded(&self, gamma: f64) -> Result<f64> {
        let f: Vec<f64> = self.hop_cdfs(gamma)?.iter().map(|c| c.value).collect();
        let n = f.len();
        let mut total = 0.0;
        for mask in 1u32..(1 << n) {
            let mut prod = 1.0;
            for (i, fi) in f.iter().enumerate() {
                if mask & (1 << i) != 0 {
                    prod *= fi;
                }
            }
            let sign = if mask.count_ones() % 2 == 1 {
                1.0
            } else {
                -1.0
            };
            total += sign * prod;
        }
        Ok(total)
    }

    /// Draws one end-to-end SNR: the minimum over independent hop draws.
    pub fn system_sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        self.hops
            .iter()
            .map(|h| h.sample(rng))
            .fold(f64::INFINITY, f64::min)
    }
}
