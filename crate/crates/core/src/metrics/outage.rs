//! Outage probability, its high-SNR asymptote and the diversity order.

use super::{Method, MetricResult};
use crate::error::Result;
use crate::scenario::{Hop, Scenario};
use crate::units::db_to_linear;

/// `P_out = P(γ₀ ≤ γ_out)` from the system CDF.
pub fn outage_probability(sc: &Scenario, gamma_out_db: f64) -> Result<MetricResult> {
    sc.validate()?;
    let c = sc.system_cdf(db_to_linear(gamma_out_db))?;
    Ok(MetricResult::analytic(c.value, Method::ClosedForm).with_terms(c.terms, c.converged))
}

/// Leading-order outage: the sum of each hop's small-SNR CDF term
/// (`ϑγ/γ̄` for RF, `Π ϑ_i γ/γ̄_i` for the multicast stage, and the
/// turbulence/pointing power law for optical hops), capped at 1.
pub fn asymptotic_op(sc: &Scenario, gamma_out_db: f64) -> Result<MetricResult> {
    sc.validate()?;
    let g = db_to_linear(gamma_out_db);
    let mut total = 0.0;
    for (i, hop) in sc.hops.iter().enumerate() {
        let term = match hop {
            Hop::Rf(c) => c.cdf_low_snr_slope() * g,
            Hop::Multicast(users) => users.iter().map(|u| u.cdf_low_snr_slope() * g).product(),
            Hop::Fso(c) => c
                .cdf_snr_asymptotic(g)
                .map_err(|e| e.context(format!("hop {i} (fso)")))?,
        };
        total += term;
    }
    Ok(MetricResult::analytic(total.min(1.0), Method::Asymptotic))
}

/// High-SNR slope of the outage curve: the smallest per-hop exponent
/// (1 per RF hop, `N` for the multicast stage, `αβ/2` per optical hop, or
/// `min(αβ, g²)/2` with pointing error).
pub fn diversity_order(sc: &Scenario) -> f64 {
    sc.hops
        .iter()
        .map(|h| match h {
            Hop::Rf(_) => 1.0,
            Hop::Multicast(users) => users.len() as f64,
            Hop::Fso(c) => c.low_snr_exponent(),
        })
        .fold(f64::INFINITY, f64::min)
}
