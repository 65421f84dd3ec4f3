//! Average bit error rate of binary modulations,
//! `P_e = v^u / (2Γ(u)) ∫ γ^{u−1} e^{−vγ} F(γ) dγ`.
//!
//! The closed form expands the end-to-end survival function into terms
//! `γ^q e^{−rγ} e^{−c γ^{β/2}}`, each of which integrates to a stretched
//! Laplace transform evaluated as a Fox-H (Mellin–Barnes) integral.

use std::cell::RefCell;
use std::collections::BTreeMap;

use num_complex::Complex64;

use super::{Method, MetricResult, Modulation};
use crate::channels::{EwChannel, ShadowedRicianChannel};
use crate::error::{Error, Result};
use crate::quad::{integrate_with_breaks, QuadConfig};
use crate::scenario::{Hop, Scenario};
use crate::series::{sum_series, SeriesControl};
use crate::specfun::{
    binomial_real, contour_abscissa, erfc, gamma_q, ln_gamma, ln_gamma_complex, meijer_g,
    vertical_line_integral, MeijerGSpec,
};

/// Conditional error probability `Γ(u, vγ) / (2Γ(u))`.
pub fn conditional_bep(u: f64, v: f64, gamma: f64) -> f64 {
    let x = v * gamma.max(0.0);
    if u == 1.0 {
        0.5 * (-x).exp()
    } else if u == 0.5 {
        0.5 * erfc(x.sqrt())
    } else {
        0.5 * gamma_q(u, x).unwrap_or(f64::NAN)
    }
}

/// `J(w, s, c, β) = ∫_0^∞ x^{w−1} e^{−s x} e^{−c x^{β/2}} dx` for `w, s > 0`,
/// `c ≥ 0`, `β > 0`.
pub fn stretched_laplace(w: f64, s: f64, c: f64, beta: f64) -> Result<f64> {
    stretched_laplace_with_error(w, s, c, beta).map(|(v, _)| v)
}

fn stretched_laplace_with_error(w: f64, s: f64, c: f64, beta: f64) -> Result<(f64, f64)> {
    if !(w > 0.0 && s > 0.0 && c >= 0.0 && beta > 0.0) {
        return Err(Error::invalid(format!(
            "stretched Laplace transform needs w, s, β > 0 and c ≥ 0 (w={w}, s={s}, c={c}, β={beta})"
        )));
    }
    if c == 0.0 {
        return Ok(((ln_gamma(w) - w * s.ln()).exp(), 0.0));
    }
    let (ln_c, ln_s) = (c.ln(), s.ln());
    let half = 0.5 * beta;
    let kernel = |t: Complex64| {
        ln_gamma_complex(t) + ln_gamma_complex(w - half * t) - t * ln_c + (half * t - w) * ln_s
    };
    let abscissa = contour_abscissa(&kernel, 0.0, w / half);
    vertical_line_integral(kernel, abscissa)
}

/// The same transform for integer `β` through
/// `π^{−1/2} (2π)^{(1−β)/2} β^{w−1/2} s^{−w}
///  G^{2,β}_{β,2}(c² β^β / (4 s^β) | (k−w)/β, k = 1..β; 0, 1/2)`.
pub fn stretched_laplace_meijer(w: f64, s: f64, c: f64, beta: u32) -> Result<f64> {
    if beta == 0 {
        return Err(Error::invalid("integer β must be positive"));
    }
    if c == 0.0 {
        return stretched_laplace(w, s, 0.0, beta as f64);
    }
    let b = beta as f64;
    let a: Vec<f64> = (1..=beta).map(|k| (k as f64 - w) / b).collect();
    let z = (2.0 * c.ln() + b * b.ln() - 4f64.ln() - b * s.ln()).exp();
    let g = meijer_g(&MeijerGSpec::new(2, beta as usize, a, vec![0.0, 0.5], z))?;
    let ln_pref = -0.5 * std::f64::consts::PI.ln()
        + 0.5 * (1.0 - b) * (2.0 * std::f64::consts::PI).ln()
        + (w - 0.5) * b.ln()
        - w * s.ln();
    Ok(ln_pref.exp() * g)
}

/// `(v^u / (2Γ(u))) ∫ γ^{u−1} e^{−vγ} F(γ) dγ` by adaptive quadrature in
/// `t = γ^u`, which removes the `γ^{−1/2}` endpoint singularity.
fn kernel_average<F>(u: f64, v: f64, cdf: F) -> Result<f64>
where
    F: Fn(f64) -> f64,
{
    let gamma_max = 45.0 / v;
    let breaks_gamma = [
        0.0, 1e-6, 1e-4, 1e-3, 1e-2, 0.03, 0.1, 0.3, 1.0, 2.0, 4.0, 8.0, 16.0, gamma_max,
    ];
    let breaks: Vec<f64> = breaks_gamma
        .iter()
        .filter(|g| **g <= gamma_max)
        .map(|g| g.powf(u))
        .collect();
    let f = |t: f64| {
        let g = t.powf(1.0 / u);
        (-v * g).exp() * cdf(g)
    };
    let cfg = QuadConfig {
        abs_tol: 1e-11,
        rel_tol: 1e-10,
        max_intervals: 4000,
    };
    let r = integrate_with_breaks(f, &breaks, &cfg)?;
    let ln_pref = u * v.ln() - ln_gamma(u) - (2.0 * u).ln();
    Ok(ln_pref.exp() * r.value)
}

/// BER by adaptive quadrature of the system CDF against the modulation
/// kernel. Valid for any scenario the CDF supports.
pub fn ber_quadrature(sc: &Scenario, modulation: Modulation) -> Result<MetricResult> {
    sc.validate()?;
    let (u, v) = modulation.params();
    let err: RefCell<Option<Error>> = RefCell::new(None);
    let value = kernel_average(u, v, |g| match sc.system_cdf(g) {
        Ok(c) => c.value,
        Err(e) => {
            err.borrow_mut().get_or_insert(e);
            f64::NAN
        }
    });
    if let Some(e) = err.into_inner() {
        return Err(e.context("BER quadrature"));
    }
    Ok(MetricResult::analytic(
        value?.clamp(0.0, 0.5),
        Method::Quadrature,
    ))
}

/// `Σ coef γ^q e^{−rate γ}`, keyed by `(q, rate)`.
#[derive(Debug, Clone, Default)]
struct ExpPoly {
    terms: BTreeMap<(u32, u64), f64>,
}

impl ExpPoly {
    fn one() -> Self {
        let mut p = ExpPoly::default();
        p.add(0, 0.0, 1.0);
        p
    }

    fn add(&mut self, q: u32, rate: f64, coef: f64) {
        *self.terms.entry((q, rate.to_bits())).or_insert(0.0) += coef;
    }

    fn mul(&self, other: &ExpPoly) -> ExpPoly {
        let mut out = ExpPoly::default();
        for (&(q1, r1), &c1) in &self.terms {
            for (&(q2, r2), &c2) in &other.terms {
                out.add(q1 + q2, f64::from_bits(r1) + f64::from_bits(r2), c1 * c2);
            }
        }
        out
    }

    fn scale(mut self, k: f64) -> ExpPoly {
        self.terms.values_mut().for_each(|c| *c *= k);
        self
    }

    fn extend(&mut self, other: &ExpPoly) {
        for (&(q, r), &c) in &other.terms {
            self.add(q, f64::from_bits(r), c);
        }
    }

    fn iter(&self) -> impl Iterator<Item = (u32, f64, f64)> + '_ {
        self.terms
            .iter()
            .map(|(&(q, r), &c)| (q, f64::from_bits(r), c))
    }
}

fn rf_survival(c: &ShadowedRicianChannel) -> ExpPoly {
    let psi = c.constants().psi;
    let mut p = ExpPoly::default();
    for (q, cq) in c.survival_coefficients().into_iter().enumerate() {
        p.add(q as u32, psi, cq);
    }
    p
}

/// `1 − Π_g (1 − S_g)^{n_g}` over groups of identical users, expanded as
/// `−Σ_{k ≠ 0} Π_g C(n_g, k_g) (−S_g)^{k_g}`.
fn multicast_survival(users: &[ShadowedRicianChannel]) -> ExpPoly {
    let mut groups: Vec<(ShadowedRicianChannel, u32)> = Vec::new();
    for u in users {
        match groups.iter_mut().find(|(g, _)| g == u) {
            Some((_, n)) => *n += 1,
            None => groups.push((*u, 1)),
        }
    }
    // (1 − S)^n for each group, then their product.
    let mut product = ExpPoly::one();
    for (ch, n) in &groups {
        let s = rf_survival(ch);
        let mut power = ExpPoly::one();
        let mut expansion = ExpPoly::default();
        for k in 0..=*n {
            if k > 0 {
                power = power.mul(&s);
            }
            let coef = binomial_real(*n as f64, k) * if k % 2 == 0 { 1.0 } else { -1.0 };
            expansion.extend(&power.clone().scale(coef));
        }
        product = product.mul(&expansion);
    }
    let mut out = ExpPoly::one();
    out.extend(&product.scale(-1.0));
    out.terms.retain(|_, c| *c != 0.0);
    out
}

/// Compositions of `n` into `k` positive parts.
fn compositions(n: u32, k: usize, out: &mut Vec<Vec<u32>>, prefix: &mut Vec<u32>) {
    if k == 0 {
        if n == 0 {
            out.push(prefix.clone());
        }
        return;
    }
    let remaining = (k - 1) as u32;
    if n < remaining + 1 {
        return;
    }
    for first in 1..=(n - remaining) {
        prefix.push(first);
        compositions(n - first, k - 1, out, prefix);
        prefix.pop();
    }
}

/// Closed-form BER: survival expansion of the RF and multicast stages times
/// the binomial series of every optical hop, integrated term by term.
///
/// Any number of users is supported. Optical hops must share one `β` and
/// have no pointing error; otherwise [`Error::Unsupported`] is returned and
/// [`ber_quadrature`] should be used. The optical series is summed in
/// shells of constant `Σρ` under the scenario's [`SeriesControl`].
pub fn ber_closed_form(sc: &Scenario, modulation: Modulation) -> Result<MetricResult> {
    sc.validate()?;
    let (u, v) = modulation.params();

    let mut poly = ExpPoly::one();
    let mut optical: Vec<&EwChannel> = Vec::new();
    for hop in &sc.hops {
        match hop {
            Hop::Rf(c) => poly = poly.mul(&rf_survival(c)),
            Hop::Multicast(users) => poly = poly.mul(&multicast_survival(users)),
            Hop::Fso(c) => {
                if c.pointing.is_some() {
                    return Err(Error::Unsupported(
                        "closed-form BER with pointing error; use quadrature".into(),
                    ));
                }
                optical.push(c);
            }
        }
    }
    let beta = optical.first().map_or(2.0, |c| c.beta);
    if optical.iter().any(|c| (c.beta - beta).abs() > 1e-12 * beta) {
        return Err(Error::Unsupported(
            "closed-form BER needs equal β on every optical hop; use quadrature".into(),
        ));
    }
    // e^{−ρ (γ/A)^{β/2}} = e^{−ρ A^{−β/2} γ^{β/2}}, A = (η I^a)² γ̄
    let scales: Vec<f64> = optical
        .iter()
        .map(|c| ((c.eta * c.attenuation).powi(2) * c.avg_snr).powf(-0.5 * beta))
        .collect();

    let terms: Vec<(u32, f64, f64)> = poly.iter().filter(|t| t.2 != 0.0).collect();
    let abs_total = RefCell::new(0.0);
    let err_total = RefCell::new(0.0);
    let integrate_terms = |c: f64| -> Result<f64> {
        let mut acc = 0.0;
        for &(q, rate, coef) in &terms {
            let (j, e) = stretched_laplace_with_error(u + q as f64, v + rate, c, beta)?;
            acc += coef * j;
            *abs_total.borrow_mut() += (coef * j).abs();
            *err_total.borrow_mut() += (coef * e).abs();
        }
        Ok(acc)
    };

    let (survival_integral, terms_used, converged) = if optical.is_empty() {
        (integrate_terms(0.0)?, 0, true)
    } else {
        let k = optical.len();
        let mut first_err: Option<Error> = None;
        let ctrl: SeriesControl = sc.series;
        let sum = sum_series(0, &ctrl, |i| {
            if first_err.is_some() {
                return 0.0;
            }
            let mut shell = Vec::new();
            compositions((k + i) as u32, k, &mut shell, &mut Vec::new());
            let mut total = 0.0;
            for rho in shell {
                let mut weight = 1.0;
                let mut c = 0.0;
                for ((ch, r), scale) in optical.iter().zip(&rho).zip(&scales) {
                    let sign = if r % 2 == 1 { 1.0 } else { -1.0 };
                    weight *= sign * binomial_real(ch.alpha, *r);
                    c += *r as f64 * scale;
                }
                if weight == 0.0 {
                    continue;
                }
                match integrate_terms(c) {
                    Ok(x) => total += weight * x,
                    Err(e) => {
                        first_err = Some(e);
                        return 0.0;
                    }
                }
            }
            total
        });
        if let Some(e) = first_err {
            return Err(e.context("closed-form BER"));
        }
        (sum.value, sum.terms, sum.converged)
    };

    let ln_pref = u * v.ln() - ln_gamma(u) - 2f64.ln();
    let pref = ln_pref.exp();
    let rounding = abs_total.into_inner() * pref * 1e-15 + err_total.into_inner() * pref;
    let value = 0.5 - pref * survival_integral;
    if !value.is_finite() || rounding > 1e-7 {
        return Err(Error::no_convergence(
            "closed-form BER (cancellation in the survival expansion)",
            rounding,
        ));
    }
    Ok(
        MetricResult::analytic(value.clamp(0.0, 0.5), Method::ClosedForm)
            .with_terms(terms_used, converged),
    )
}
