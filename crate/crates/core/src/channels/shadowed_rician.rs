//! Shadowed-Rician RF fading with integer Nakagami shadowing severity.

use rand::Rng;
use rand_distr::{Distribution, Gamma, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::specfun::pochhammer;

/// Land-mobile satellite shadowing presets `(m, b, Ω)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Shadowing {
    Heavy,
    Average,
    Light,
}

impl Shadowing {
    pub fn params(self) -> (u32, f64, f64) {
        match self {
            Shadowing::Heavy => (1, 0.063, 8.94e-4),
            Shadowing::Average => (10, 0.126, 0.835),
            Shadowing::Light => (19, 0.158, 1.29),
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Shadowing::Heavy => "heavy",
            Shadowing::Average => "average",
            Shadowing::Light => "light",
        }
    }
}

impl std::str::FromStr for Shadowing {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "heavy" | "fhs" => Ok(Shadowing::Heavy),
            "average" | "avg" | "as" => Ok(Shadowing::Average),
            "light" | "ils" => Ok(Shadowing::Light),
            other => Err(Error::invalid(format!(
                "unknown shadowing preset '{other}'"
            ))),
        }
    }
}

/// Derived constants of the shadowed-Rician law.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SrConstants {
    /// `ϑ = (1/2b) (2bm / (2bm + Ω))^m`
    pub theta: f64,
    /// `ς = 1 / 2b`
    pub varsigma: f64,
    /// `δ = Ω / (2b (2bm + Ω))`
    pub delta: f64,
    /// `ψ = (ς − δ) / γ̄`
    pub psi: f64,
}

/// Shadowed-Rician SNR `γ = γ̄ |h|²`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ShadowedRicianChannel {
    pub m: u32,
    pub b: f64,
    pub omega: f64,
    pub avg_snr: f64,
}

impl ShadowedRicianChannel {
    pub fn new(m: u32, b: f64, omega: f64, avg_snr: f64) -> Result<Self> {
        let ch = ShadowedRicianChannel {
            m,
            b,
            omega,
            avg_snr,
        };
        ch.validate()?;
        Ok(ch)
    }

    pub fn from_preset(preset: Shadowing, avg_snr: f64) -> Self {
        let (m, b, omega) = preset.params();
        ShadowedRicianChannel {
            m,
            b,
            omega,
            avg_snr,
        }
    }

    /// Accepts a real-valued severity but rejects non-integers: the finite
    /// sums of the density and CDF only hold for integer `m`.
    pub fn with_real_m(m: f64, b: f64, omega: f64, avg_snr: f64) -> Result<Self> {
        if !(m >= 1.0) || m != m.floor() || m > u32::MAX as f64 {
            return Err(Error::invalid(format!(
                "shadowed-Rician m must be a positive integer, got {m}"
            )));
        }
        Self::new(m as u32, b, omega, avg_snr)
    }

    pub fn with_avg_snr(mut self, avg_snr: f64) -> Self {
        self.avg_snr = avg_snr;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.m < 1 {
            return Err(Error::invalid("shadowed-Rician m must be >= 1"));
        }
        if !(self.b > 0.0) {
            return Err(Error::invalid("shadowed-Rician b must be positive"));
        }
        if !(self.omega >= 0.0) {
            return Err(Error::invalid("shadowed-Rician omega must be non-negative"));
        }
        if !(self.avg_snr > 0.0) || !self.avg_snr.is_finite() {
            return Err(Error::invalid("average SNR must be positive and finite"));
        }
        Ok(())
    }

    pub fn constants(&self) -> SrConstants {
        let m = self.m as f64;
        let two_b = 2.0 * self.b;
        let denom = two_b * m + self.omega;
        let theta = (two_b * m / denom).powf(m) / two_b;
        let varsigma = 1.0 / two_b;
        let delta = self.omega / (two_b * denom);
        SrConstants {
            theta,
            varsigma,
            delta,
            psi: (varsigma - delta) / self.avg_snr,
        }
    }

    /// `ϑ (1−m)_j (−δ)^j`, which is non-negative for every `j`.
    fn coefficient(&self, c: &SrConstants, j: u32) -> f64 {
        c.theta * pochhammer(1.0 - self.m as f64, j) * (-c.delta).powi(j as i32)
    }

    pub fn pdf(&self, gamma: f64) -> f64 {
        if gamma < 0.0 {
            return 0.0;
        }
        let c = self.constants();
        let mut sum = 0.0;
        let mut fact = 1.0;
        for j in 0..self.m {
            if j > 0 {
                fact *= j as f64;
            }
            let a = self.coefficient(&c, j) / (self.avg_snr.powi(j as i32 + 1) * fact * fact);
            sum += a * gamma.powi(j as i32);
        }
        sum * (-c.psi * gamma).exp()
    }

    /// Mixture weights `w_j` of `F(γ) = Σ w_j P(j+1, ψγ)`; they are positive
    /// and sum to one.
    pub fn mixture_weights(&self) -> Vec<f64> {
        let c = self.constants();
        let x = c.psi * self.avg_snr;
        let mut fact = 1.0;
        (0..self.m)
            .map(|j| {
                if j > 0 {
                    fact *= j as f64;
                }
                self.coefficient(&c, j) / (fact * x.powi(j as i32 + 1))
            })
            .collect()
    }

    /// CDF as a positive mixture of Erlang CDFs; free of cancellation.
    pub fn cdf(&self, gamma: f64) -> f64 {
        if gamma <= 0.0 {
            return 0.0;
        }
        let x = self.constants().psi * gamma;
        let w = self.mixture_weights();
        let mut sum = 0.0;
        for (j, wj) in w.iter().enumerate() {
            sum += wj * erlang_cdf(j as u32 + 1, x);
        }
        sum.clamp(0.0, 1.0)
    }

    pub fn ccdf(&self, gamma: f64) -> f64 {
        if gamma <= 0.0 {
            return 1.0;
        }
        let x = self.constants().psi * gamma;
        let w = self.mixture_weights();
        let mut sum = 0.0;
        for (j, wj) in w.iter().enumerate() {
            sum += wj * (1.0 - erlang_cdf(j as u32 + 1, x));
        }
        sum.clamp(0.0, 1.0)
    }

    /// Survival polynomial coefficients `c_q` of
    /// `1 − F(γ) = e^{−ψγ} Σ_q c_q γ^q`, summed over `l ≥ q`.
    pub fn survival_coefficients(&self) -> Vec<f64> {
        let c = self.constants();
        let mut out = vec![0.0; self.m as usize];
        let mut l_fact = 1.0;
        for l in 0..self.m {
            if l > 0 {
                l_fact *= l as f64;
            }
            let base = self.coefficient(&c, l) / (self.avg_snr.powi(l as i32 + 1) * l_fact);
            let mut q_fact = 1.0;
            for q in 0..=l {
                if q > 0 {
                    q_fact *= q as f64;
                }
                out[q as usize] += base / (q_fact * c.psi.powi((l - q) as i32 + 1));
            }
        }
        out
    }

    /// CDF from the double finite sum `1 − Σ_l Σ_q (…) γ^q e^{−ψγ}`.
    pub fn cdf_double_sum(&self, gamma: f64) -> f64 {
        if gamma <= 0.0 {
            return 0.0;
        }
        let psi = self.constants().psi;
        let poly: f64 = self
            .survival_coefficients()
            .iter()
            .enumerate()
            .map(|(q, cq)| cq * gamma.powi(q as i32))
            .sum();
        1.0 - poly * (-psi * gamma).exp()
    }

    /// `E[γ] = γ̄ (2b + Ω)`.
    pub fn mean_snr(&self) -> f64 {
        self.avg_snr * (2.0 * self.b + self.omega)
    }

    /// `E[γ]` from the moment of the density series,
    /// `Σ_j ϑ(1−m)_j(−δ)^j (j+1)! / (γ̄^{j+1} (j!)² ψ^{j+2})`.
    pub fn mean_snr_series(&self) -> f64 {
        let c = self.constants();
        let mut fact = 1.0;
        (0..self.m)
            .map(|j| {
                if j > 0 {
                    fact *= j as f64;
                }
                self.coefficient(&c, j) * (j as f64 + 1.0)
                    / (self.avg_snr.powi(j as i32 + 1) * fact * c.psi.powi(j as i32 + 2))
            })
            .sum()
    }

    /// Small-SNR behaviour `F(γ) ≈ ϑ γ / γ̄`.
    pub fn cdf_low_snr_slope(&self) -> f64 {
        self.constants().theta / self.avg_snr
    }

    /// Draws `|h|²` from the composite model: Nakagami-m line-of-sight power
    /// `A² ~ Gamma(m, Ω/m)` plus complex Gaussian scatter of total power `2b`.
    pub fn sample_power<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        let los = if self.omega > 0.0 {
            let m = self.m as f64;
            Gamma::new(m, self.omega / m)
                .expect("validated shape and scale")
                .sample(rng)
                .sqrt()
        } else {
            0.0
        };
        let s = self.b.sqrt();
        let re: f64 = rng.sample(StandardNormal);
        let im: f64 = rng.sample(StandardNormal);
        let x = los + s * re;
        let y = s * im;
        x * x + y * y
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        self.avg_snr * self.sample_power(rng)
    }
}

/// Erlang CDF `P(n, x)` for integer shape `n ≥ 1`.
pub(crate) fn erlang_cdf(n: u32, x: f64) -> f64 {
    if x <= 0.0 {
        return 0.0;
    }
    let nf = n as f64;
    if x < nf + 1.0 {
        // e^{-x} x^n / n! Σ_k x^k / ((n+1)…(n+k))
        let mut term = 1.0;
        let mut sum = 1.0;
        let mut k = 1.0;
        while term > 1e-17 * sum {
            term *= x / (nf + k);
            sum += term;
            k += 1.0;
        }
        let ln_lead = -x + nf * x.ln() - crate::specfun::ln_gamma(nf + 1.0);
        (ln_lead.exp() * sum).min(1.0)
    } else {
        // 1 − e^{-x} Σ_{k<n} x^k / k!
        let mut term = 1.0;
        let mut sum = 1.0;
        for k in 1..n {
            term *= x / k as f64;
            sum += term;
        }
        (1.0 - (-x).exp() * sum).max(0.0)
    }
}
