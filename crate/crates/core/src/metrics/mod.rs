//! Performance metrics of a relay [`Scenario`](crate::scenario::Scenario):
//! outage probability, high-SNR asymptotics, bit error rate, ergodic-capacity
//! upper bound and energy efficiency.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub mod ber;
pub mod capacity;
pub mod outage;

pub use ber::{
    ber_closed_form, ber_quadrature, conditional_bep, stretched_laplace, stretched_laplace_meijer,
};
pub use capacity::{energy_efficiency, ergodic_capacity_ub, ew_mean_snr_series, total_power};
pub use outage::{asymptotic_op, diversity_order, outage_probability};

/// How a metric value was obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Method {
    ClosedForm,
    Asymptotic,
    Quadrature,
    MonteCarlo,
}

impl Method {
    pub fn name(self) -> &'static str {
        match self {
            Method::ClosedForm => "closed-form",
            Method::Asymptotic => "asymptotic",
            Method::Quadrature => "quadrature",
            Method::MonteCarlo => "monte-carlo",
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// A metric value with its provenance and accuracy bookkeeping.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MetricResult {
    pub value: f64,
    pub method: Method,
    /// Series terms used (analytic methods).
    pub terms_used: Option<usize>,
    /// Whether every truncated series met its tolerance before the cap.
    pub converged: bool,
    /// Samples used (Monte Carlo).
    pub samples_used: Option<u64>,
    /// Confidence-interval half-width (Monte Carlo).
    pub ci_halfwidth: Option<f64>,
    /// Set when a Monte Carlo probability estimate is below 1e-6.
    pub unreliable: bool,
}

impl MetricResult {
    pub fn analytic(value: f64, method: Method) -> Self {
        MetricResult {
            value,
            method,
            terms_used: None,
            converged: true,
            samples_used: None,
            ci_halfwidth: None,
            unreliable: false,
        }
    }

    pub fn with_terms(mut self, terms: usize, converged: bool) -> Self {
        self.terms_used = Some(terms);
        self.converged = converged;
        self
    }

    pub fn monte_carlo(value: f64, samples: u64, ci_halfwidth: f64) -> Self {
        MetricResult {
            value,
            method: Method::MonteCarlo,
            terms_used: None,
            converged: true,
            samples_used: Some(samples),
            ci_halfwidth: Some(ci_halfwidth),
            unreliable: false,
        }
    }
}

/// Binary modulations described by the conditional error probability
/// `Γ(u, vγ) / (2Γ(u))`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum Modulation {
    /// Coherent binary frequency-shift keying.
    Cbfsk,
    /// Coherent binary phase-shift keying.
    Cbpsk,
    /// Non-coherent binary frequency-shift keying.
    Nbfsk,
    /// Differential binary phase-shift keying.
    Dbpsk,
}

impl Modulation {
    pub const ALL: [Modulation; 4] = [
        Modulation::Cbfsk,
        Modulation::Cbpsk,
        Modulation::Nbfsk,
        Modulation::Dbpsk,
    ];

    /// `(u, v)` of the conditional error probability.
    pub fn params(self) -> (f64, f64) {
        match self {
            Modulation::Cbfsk => (0.5, 0.5),
            Modulation::Cbpsk => (0.5, 1.0),
            Modulation::Nbfsk => (1.0, 0.5),
            Modulation::Dbpsk => (1.0, 1.0),
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Modulation::Cbfsk => "CBFSK",
            Modulation::Cbpsk => "CBPSK",
            Modulation::Nbfsk => "NBFSK",
            Modulation::Dbpsk => "DBPSK",
        }
    }
}

impl std::str::FromStr for Modulation {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Modulation::ALL
            .into_iter()
            .find(|m| m.name().eq_ignore_ascii_case(s))
            .ok_or_else(|| Error::invalid(format!("unknown modulation '{s}'")))
    }
}
