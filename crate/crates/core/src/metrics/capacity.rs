//! Ergodic-capacity upper bound `(1/n) log₂(1 + E[γ₀])` and energy
//! efficiency.

use super::{Method, MetricResult};
use crate::channels::EwChannel;
use crate::error::{Error, Result};
use crate::scenario::{CdfRoute, Hop, Scenario};
use crate::series::{sum_series, SeriesControl, SeriesSum};
use crate::specfun::{binomial_real, ln_gamma};

/// Mean SNR of an optical hop from the survival integral of its binomial
/// series, `A Γ(1+2/β) Σ_{ρ≥1} C(α,ρ) (−1)^{ρ+1} ρ^{−2/β} E[I_p²]` with
/// `A = (η I^a)² γ̄`.
pub fn ew_mean_snr_series(ch: &EwChannel, ctrl: &SeriesControl) -> Result<SeriesSum> {
    ch.validate()?;
    let expo = 2.0 / ch.beta;
    let scale = (ch.eta * ch.attenuation).powi(2) * ch.avg_snr;
    let pref = scale * ln_gamma(1.0 + expo).exp() * ch.pointing.map_or(1.0, |p| p.moment(2.0));
    let s = sum_series(1, ctrl, |rho| {
        let sign = if rho % 2 == 1 { 1.0 } else { -1.0 };
        sign * binomial_real(ch.alpha, rho as u32) * (rho as f64).powf(-expo)
    });
    Ok(SeriesSum {
        value: pref * s.value,
        ..s
    })
}

/// `(1/n) log₂(1 + min_i E[γ_i])`, with the multicast stage contributing
/// its best user's mean. Optical means follow the scenario's CDF route.
pub fn ergodic_capacity_ub(sc: &Scenario) -> Result<MetricResult> {
    sc.validate()?;
    let mut mean = f64::INFINITY;
    let mut terms = 0;
    let mut converged = true;
    for (i, hop) in sc.hops.iter().enumerate() {
        let m = match (hop, sc.route) {
            (Hop::Fso(c), CdfRoute::Series) => {
                let s = ew_mean_snr_series(c, &sc.series)?;
                terms = terms.max(s.terms);
                converged &= s.converged;
                s.value
            }
            _ => hop.mean_snr()?,
        };
        if !(m >= 0.0) || !m.is_finite() {
            return Err(Error::no_convergence(
                format!("mean SNR of hop {i} ({})", hop.label()),
                m,
            ));
        }
        mean = mean.min(m);
    }
    let value = (1.0 + mean).log2() / sc.time_slots as f64;
    Ok(MetricResult::analytic(value, Method::ClosedForm).with_terms(terms, converged))
}

/// Average transmit power per slot, `(1/n) Σ P_i` (W).
pub fn total_power(sc: &Scenario) -> f64 {
    sc.powers.iter().sum::<f64>() / sc.time_slots as f64
}

/// Capacity upper bound per unit power (bit/s/Hz/W).
pub fn energy_efficiency(sc: &Scenario) -> Result<MetricResult> {
    let p = total_power(sc);
    if !(p > 0.0) {
        return Err(Error::invalid(
            "energy efficiency needs a positive total power",
        ));
    }
    let c = ergodic_capacity_ub(sc)?;
    Ok(MetricResult {
        value: c.value / p,
        ..c
    })
}
