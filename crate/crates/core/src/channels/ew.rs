//! Exponentiated-Weibull irradiance fading, optionally compounded with
//! pointing-error fading.

use rand::Rng;
use rand_distr::Open01;
use serde::{Deserialize, Serialize};

use super::pointing::{PointingError, PointingParams};
use crate::error::{Error, Result};
use crate::quad::{integrate_semi_infinite, integrate_with_breaks, QuadConfig};
use crate::series::{sum_series, SeriesControl, SeriesSum};
use crate::specfun::{binomial_real, ln_gamma, ln_upper_gamma, meijer_g, MeijerGSpec};

/// Shape `(α, β)` and scale `η` of an exponentiated-Weibull law.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EwParams {
    pub alpha: f64,
    pub beta: f64,
    pub eta: f64,
}

impl EwParams {
    pub fn validate(&self) -> Result<()> {
        let ok = |x: f64| x > 0.0 && x.is_finite();
        if !(ok(self.alpha) && ok(self.beta) && ok(self.eta)) {
            return Err(Error::invalid("EW parameters must be positive and finite"));
        }
        Ok(())
    }
}

/// Fits `(α, β, η)` to a scintillation index with the aperture-averaging
/// expressions `α = 7.220 σ^{2/3} / Γ(2.487 σ^{1/3} − 0.104)`,
/// `β = 1.012 (α σ²)^{−13/25} + 0.142`, and `η` normalising `E[I] = 1`.
pub fn ew_fit(scintillation_index: f64) -> Result<EwParams> {
    let s2 = scintillation_index;
    if !(s2 > 0.0) || !s2.is_finite() {
        return Err(Error::invalid("scintillation index must be positive"));
    }
    let gamma_arg = 2.487 * s2.powf(1.0 / 6.0) - 0.104;
    let alpha = 7.220 * s2.powf(1.0 / 3.0) / ln_gamma(gamma_arg).exp();
    let beta = 1.012 * (alpha * s2).powf(-13.0 / 25.0) + 0.142;
    let mean = ew_moment(alpha, beta, 1.0, 1.0).map_err(|e| e.context("EW scale normalisation"))?;
    let p = EwParams {
        alpha,
        beta,
        eta: 1.0 / mean,
    };
    p.validate()?;
    Ok(p)
}

/// `E[I^k] = α η^k ∫_0^∞ t^{k/β} e^{−t} (1 − e^{−t})^{α−1} dt` by quadrature.
pub fn ew_moment(alpha: f64, beta: f64, eta: f64, k: f64) -> Result<f64> {
    let expo = k / beta;
    if !(expo + alpha > 0.0) {
        return Err(Error::invalid("EW moment diverges: need k/β + α > 0"));
    }
    let f = |t: f64| {
        if t <= 0.0 {
            return 0.0;
        }
        let one_minus = -(-t).exp_m1();
        (expo * t.ln() - t + (alpha - 1.0) * one_minus.ln()).exp()
    };
    let cfg = QuadConfig::new(0.0, 1e-11);
    let head = integrate_with_breaks(f, &[0.0, 1e-10, 1e-6, 1e-3, 0.1, 1.0], &cfg)?;
    let tail = integrate_semi_infinite(f, 1.0, &cfg)?;
    Ok(alpha * eta.powf(k) * (head.value + tail.value))
}

/// The same moment from `α η^k Γ(1+k/β) Σ_j (−1)^j C(α−1, j) / (j+1)^{1+k/β}`.
/// The series is summed until its terms drop below `1e-14` of the sum, using
/// the mean of consecutive partial sums for alternating tails.
pub fn ew_moment_series(alpha: f64, beta: f64, eta: f64, k: f64) -> Result<f64> {
    let p = 1.0 + k / beta;
    let mut sum = 0.0;
    let mut prev_sum = 0.0;
    let mut coef = 1.0;
    for j in 0..2_000_000u32 {
        if j > 0 {
            coef *= -(alpha - 1.0 - (j - 1) as f64) / j as f64;
        }
        let t = coef / (j as f64 + 1.0).powf(p);
        prev_sum = sum;
        sum += t;
        if t == 0.0 || t.abs() < 1e-14 * sum.abs() {
            return Ok(alpha * eta.powf(k) * ln_gamma(p).exp() * sum);
        }
    }
    let averaged = 0.5 * (sum + prev_sum);
    if (sum - prev_sum).abs() < 1e-9 * averaged.abs() {
        return Ok(alpha * eta.powf(k) * ln_gamma(p).exp() * averaged);
    }
    Err(Error::no_convergence(
        "EW moment series",
        (sum - prev_sum) / averaged,
    ))
}

/// How the pointing-error CDF series evaluates its Meijer-G factors.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum MeijerRoute {
    /// Residue reduction to incomplete gamma functions (log-space).
    #[default]
    Residues,
    /// Numerical Mellin–Barnes contour; only practical for moderate `g²/β`.
    Contour,
}

/// Exponentiated-Weibull optical hop: turbulence `(α, β, η)`, deterministic
/// attenuation and optional pointing error, at average SNR `γ̄`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EwChannel {
    pub alpha: f64,
    pub beta: f64,
    pub eta: f64,
    pub attenuation: f64,
    pub avg_snr: f64,
    pub pointing: Option<PointingError>,
}

impl EwChannel {
    pub fn new(params: EwParams, attenuation: f64, avg_snr: f64) -> Result<Self> {
        let ch = EwChannel {
            alpha: params.alpha,
            beta: params.beta,
            eta: params.eta,
            attenuation,
            avg_snr,
            pointing: None,
        };
        ch.validate()?;
        Ok(ch)
    }

    pub fn from_scintillation(
        scintillation_index: f64,
        attenuation: f64,
        avg_snr: f64,
    ) -> Result<Self> {
        Self::new(ew_fit(scintillation_index)?, attenuation, avg_snr)
    }

    pub fn with_pointing(mut self, pointing: PointingError) -> Self {
        self.pointing = Some(pointing);
        self
    }

    pub fn with_avg_snr(mut self, avg_snr: f64) -> Self {
        self.avg_snr = avg_snr;
        self
    }

    pub fn params(&self) -> EwParams {
        EwParams {
            alpha: self.alpha,
            beta: self.beta,
            eta: self.eta,
        }
    }

    pub fn pointing_params(&self) -> Option<PointingParams> {
        self.pointing.map(|p| p.params())
    }

    pub fn validate(&self) -> Result<()> {
        self.params().validate()?;
        if !(self.attenuation > 0.0 && self.attenuation <= 1.0) {
            return Err(Error::invalid("attenuation must lie in (0, 1]"));
        }
        if !(self.avg_snr > 0.0) || !self.avg_snr.is_finite() {
            return Err(Error::invalid("average SNR must be positive and finite"));
        }
        if let Some(p) = &self.pointing {
            p.validate()?;
        }
        Ok(())
    }

    /// Turbulence-only irradiance CDF `[1 − exp(−(x/η)^β)]^α`.
    pub fn irradiance_cdf(&self, x: f64) -> f64 {
        if x <= 0.0 {
            return 0.0;
        }
        ew_unit_cdf(self.alpha, self.beta, x / self.eta)
    }

    /// Turbulence-only irradiance density.
    pub fn irradiance_pdf(&self, x: f64) -> f64 {
        if x <= 0.0 {
            return 0.0;
        }
        let (a, b, e) = (self.alpha, self.beta, self.eta);
        let y = (x / e).powf(b);
        let one_minus = -(-y).exp_m1();
        (a * b / e) * (x / e).powf(b - 1.0) * (-y).exp() * one_minus.powf(a - 1.0)
    }

    /// `√(γ/γ̄) / (η I^a)`, the turbulence argument of the SNR CDF.
    fn normalized(&self, gamma: f64) -> f64 {
        (gamma / self.avg_snr).sqrt() / (self.eta * self.attenuation)
    }

    /// SNR CDF without series truncation. Without pointing error this is
    /// the closed form `[1 − exp(−(γ/((η I^a)² γ̄))^{β/2})]^α`; with pointing
    /// error it is [`EwChannel::cdf_snr_quadrature`], because the Meijer-G
    /// series converges slowly where the CDF is small and `α` is not an
    /// integer.
    pub fn cdf_snr(&self, gamma: f64) -> Result<f64> {
        if gamma <= 0.0 {
            return Ok(0.0);
        }
        match self.pointing {
            None => Ok(ew_unit_cdf(self.alpha, self.beta, self.normalized(gamma))),
            Some(_) => self.cdf_snr_quadrature(gamma),
        }
    }

    /// SNR CDF through its series expansion: the binomial series
    /// `Σ_ρ C(α, ρ) (−1)^ρ exp(−ρ y)` without pointing error, or the
    /// Meijer-G series (residue route) with it.
    pub fn cdf_snr_series(&self, gamma: f64, ctrl: &SeriesControl) -> Result<SeriesSum> {
        self.cdf_snr_series_with(gamma, ctrl, MeijerRoute::Residues)
    }

    pub fn cdf_snr_series_with(
        &self,
        gamma: f64,
        ctrl: &SeriesControl,
        route: MeijerRoute,
    ) -> Result<SeriesSum> {
        if gamma <= 0.0 {
            return Ok(SeriesSum {
                value: 0.0,
                terms: 0,
                converged: true,
            });
        }
        let x = self.normalized(gamma);
        match self.pointing_params() {
            None => {
                let y = x.powf(self.beta);
                let s = sum_series(0, ctrl, |rho| {
                    let e = (-(rho as f64) * y).exp();
                    if e == 0.0 {
                        return 0.0;
                    }
                    let sign = if rho % 2 == 0 { 1.0 } else { -1.0 };
                    sign * binomial_real(self.alpha, rho as u32) * e
                });
                Ok(s)
            }
            Some(pp) => self.pointing_series(x / pp.a0, &pp, ctrl, route),
        }
    }

    fn pointing_series(
        &self,
        r: f64,
        pp: &PointingParams,
        ctrl: &SeriesControl,
        route: MeijerRoute,
    ) -> Result<SeriesSum> {
        let g2 = pp.g2();
        let t1 = g2 / self.beta;
        let ln_r = r.ln();
        let mut failure = None;
        let s = sum_series(0, ctrl, |i| {
            if failure.is_some() {
                return 0.0;
            }
            let c = binomial_real(self.alpha - 1.0, i as u32);
            if c == 0.0 {
                return 0.0;
            }
            let sign = if i % 2 == 0 { 1.0 } else { -1.0 };
            let ip1 = i as f64 + 1.0;
            let t3 = ip1 * r.powf(self.beta);
            let bracket = match route {
                MeijerRoute::Residues => {
                    // (1 − e^{−T3})/(1+i) + r^{g²} (1+i)^{T1−1} Γ(1−T1, T3)
                    let first = -(-t3).exp_m1() / ip1;
                    let second = ln_upper_gamma(1.0 - t1, t3)
                        .map(|lg| (g2 * ln_r + lg + (t1 - 1.0) * ip1.ln()).exp());
                    second.map(|s| first + s)
                }
                MeijerRoute::Contour => {
                    // T1 r^{g²} (1+i)^{T1−1} G^{2,1}_{2,3}(T3 | 1−T1, 1; 0, 1−T1, −T1)
                    let spec =
                        MeijerGSpec::new(2, 1, vec![1.0 - t1, 1.0], vec![0.0, 1.0 - t1, -t1], t3);
                    meijer_g(&spec).map(|g| t1 * (g2 * ln_r + (t1 - 1.0) * ip1.ln()).exp() * g)
                }
            };
            match bracket {
                Ok(b) => sign * self.alpha * c * b,
                Err(e) => {
                    failure = Some(e);
                    0.0
                }
            }
        });
        if let Some(e) = failure {
            return Err(e.context("pointing-error CDF series"));
        }
        Ok(SeriesSum {
            value: s.value.clamp(0.0, 1.0),
            ..s
        })
    }

    /// SNR CDF by one-dimensional quadrature over the pointing factor:
    /// with `I_p = A0 e^{−t/g²}`, `t ~ Exp(1)`,
    /// `F(γ) = ∫ e^{−t} F_t(r e^{t/g²}) dt`.
    pub fn cdf_snr_quadrature(&self, gamma: f64) -> Result<f64> {
        if gamma <= 0.0 {
            return Ok(0.0);
        }
        let x = self.normalized(gamma);
        let Some(pp) = self.pointing_params() else {
            return Ok(ew_unit_cdf(self.alpha, self.beta, x));
        };
        let r = x / pp.a0;
        let g2 = pp.g2();
        let f = |t: f64| (-t).exp() * ew_unit_cdf(self.alpha, self.beta, r * (t / g2).exp());
        let cfg = QuadConfig::new(1e-15, 1e-10);
        Ok(integrate_semi_infinite(f, 0.0, &cfg)?.value.clamp(0.0, 1.0))
    }

    /// Exponent `d` of the small-SNR law `F(γ) ∝ γ^d`.
    pub fn low_snr_exponent(&self) -> f64 {
        let ab = self.alpha * self.beta;
        match self.pointing_params() {
            None => ab / 2.0,
            Some(pp) => ab.min(pp.g2()) / 2.0,
        }
    }

    /// Leading small-SNR term of the CDF.
    pub fn cdf_snr_asymptotic(&self, gamma: f64) -> Result<f64> {
        if gamma <= 0.0 {
            return Ok(0.0);
        }
        let x = self.normalized(gamma);
        let ab = self.alpha * self.beta;
        match self.pointing_params() {
            None => Ok(x.powf(ab)),
            Some(pp) => {
                let g2 = pp.g2();
                if g2 > ab {
                    Ok((x / pp.a0).powf(ab) * g2 / (g2 - ab))
                } else {
                    // (z/A0)^{g²} E[I_t^{−g²}] with the turbulence scale η
                    let m = ew_moment(self.alpha, self.beta, 1.0, -g2)?;
                    Ok(((x / pp.a0).ln() * g2).exp() * m)
                }
            }
        }
    }

    /// `E[γ] = γ̄ (I^a)² E[I_t²] E[I_p²]`.
    pub fn mean_snr(&self) -> Result<f64> {
        let it2 = ew_moment(self.alpha, self.beta, self.eta, 2.0)?;
        let ip2 = self.pointing.map_or(1.0, |p| p.moment(2.0));
        Ok(self.avg_snr * self.attenuation * self.attenuation * it2 * ip2)
    }

    /// Turbulence irradiance by inversion, `η (−ln(1 − U^{1/α}))^{1/β}`.
    pub fn sample_turbulence<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        let u: f64 = rng.sample(Open01);
        ew_quantile(self.alpha, self.beta, self.eta, u)
    }

    /// Composite irradiance `I^a I^t I^p`.
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        let it = self.sample_turbulence(rng);
        let ip = self.pointing.map_or(1.0, |p| p.sample(rng));
        self.attenuation * it * ip
    }

    pub fn sample_snr<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        let i = self.sample(rng);
        self.avg_snr * i * i
    }
}

/// `[1 − exp(−x^β)]^α` evaluated in log space.
pub(crate) fn ew_unit_cdf(alpha: f64, beta: f64, x: f64) -> f64 {
    if x <= 0.0 {
        return 0.0;
    }
    let y = x.powf(beta);
    let ln_one_minus = if y > 0.7 {
        (-(-y).exp()).ln_1p()
    } else {
        (-(-y).exp_m1()).ln()
    };
    (alpha * ln_one_minus).exp()
}

/// Inverse of the EW CDF at probability `u`.
pub fn ew_quantile(alpha: f64, beta: f64, eta: f64, u: f64) -> f64 {
    // 1 − u^{1/α} = −expm1(ln u / α)
    let one_minus = -(u.ln() / alpha).exp_m1();
    eta * (-one_minus.ln()).powf(1.0 / beta)
}
