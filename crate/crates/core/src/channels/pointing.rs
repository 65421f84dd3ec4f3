//! Zero-boresight pointing-error fading of a Gaussian beam on a circular
//! aperture.

use std::f64::consts::PI;

use rand::Rng;
use rand_distr::Open01;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::specfun::{bessel_i0, erf};

/// Radial jitter with Rayleigh-distributed displacement and no boresight
/// offset.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PointingError {
    /// Receiver aperture radius `a` (m).
    pub aperture_radius: f64,
    /// Beam waist at the receiver `w_z` (m).
    pub beam_width: f64,
    /// Jitter standard deviation `σ_s` (m).
    pub jitter_sigma: f64,
}

/// `(A0, w_eq, g)` derived from a [`PointingError`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PointingParams {
    pub a0: f64,
    pub w_eq: f64,
    pub g: f64,
}

impl PointingParams {
    pub fn g2(&self) -> f64 {
        self.g * self.g
    }
}

impl PointingError {
    pub fn new(aperture_radius: f64, beam_width: f64, jitter_sigma: f64) -> Result<Self> {
        let pe = PointingError {
            aperture_radius,
            beam_width,
            jitter_sigma,
        };
        pe.validate()?;
        Ok(pe)
    }

    /// Beam width from a full divergence angle `divergence` (rad) over
    /// `distance` (m): `w_z = θ L`.
    pub fn from_divergence(
        aperture_radius: f64,
        divergence: f64,
        distance: f64,
        jitter_sigma: f64,
    ) -> Result<Self> {
        Self::new(aperture_radius, divergence * distance, jitter_sigma)
    }

    pub fn validate(&self) -> Result<()> {
        let ok = |x: f64| x > 0.0 && x.is_finite();
        if !(ok(self.aperture_radius) && ok(self.beam_width) && ok(self.jitter_sigma)) {
            return Err(Error::invalid(
                "pointing error needs positive aperture radius, beam width and jitter",
            ));
        }
        Ok(())
    }

    pub fn params(&self) -> PointingParams {
        let v = (PI / 2.0).sqrt() * self.aperture_radius / self.beam_width;
        let ev = erf(v);
        let a0 = ev * ev;
        let w_eq2 = self.beam_width * self.beam_width * PI.sqrt() * ev / (2.0 * v * (-v * v).exp());
        let w_eq = w_eq2.sqrt();
        PointingParams {
            a0,
            w_eq,
            g: w_eq / (2.0 * self.jitter_sigma),
        }
    }

    /// Density of the pointing factor `I_p ∈ (0, A0]`; the Bessel factor is
    /// identically one because the boresight offset is zero.
    pub fn pdf(&self, ip: f64) -> f64 {
        let p = self.params();
        if ip <= 0.0 || ip > p.a0 {
            return 0.0;
        }
        let s: f64 = 0.0;
        let g2 = p.g2();
        let sig2 = self.jitter_sigma * self.jitter_sigma;
        let bessel_arg = s / sig2 * (-p.w_eq * p.w_eq * (ip / p.a0).ln() / 2.0).sqrt();
        let ln = g2.ln() - s * s / (2.0 * sig2) + (g2 - 1.0) * ip.ln() - g2 * p.a0.ln();
        ln.exp() * bessel_i0(bessel_arg)
    }

    /// `P(I_p ≤ x) = (x / A0)^{g²}`.
    pub fn cdf(&self, ip: f64) -> f64 {
        let p = self.params();
        if ip <= 0.0 {
            0.0
        } else if ip >= p.a0 {
            1.0
        } else {
            (p.g2() * (ip / p.a0).ln()).exp()
        }
    }

    /// `E[I_p^k] = A0^k g² / (g² + k)`.
    pub fn moment(&self, k: f64) -> f64 {
        let p = self.params();
        p.a0.powf(k) * p.g2() / (p.g2() + k)
    }

    /// Draws a Rayleigh radial displacement `r` and returns
    /// `A0 exp(−2 r² / w_eq²)`.
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        let p = self.params();
        let u: f64 = rng.sample(Open01);
        let r = self.jitter_sigma * (-2.0 * u.ln()).sqrt();
        p.a0 * (-2.0 * r * r / (p.w_eq * p.w_eq)).exp()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quad::{integrate, QuadConfig};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn moderate() -> PointingError {
        PointingError::new(0.05, 0.25, 0.08).unwrap()
    }

    #[test]
    fn wide_aperture_collects_everything() {
        let p = PointingError::new(50.0, 1.0, 0.1).unwrap().params();
        assert!((p.a0 - 1.0).abs() < 1e-12);
    }

    #[test]
    fn narrow_jitter_is_deterministic() {
        let pe = PointingError::new(0.05, 0.25, 1e-7).unwrap();
        let p = pe.params();
        assert!(p.g > 1e5);
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..100 {
            assert!((pe.sample(&mut rng) / p.a0 - 1.0).abs() < 1e-9);
        }
    }

    #[test]
    fn divergence_geometry_golden() {
        // 225 µrad divergence over the 70° slant from 500 km to 18 km,
        // 5 cm aperture radius, 10 cm jitter
        let length = 482e3 / 70f64.to_radians().cos();
        let pe = PointingError::from_divergence(0.05, 225e-6, length, 0.1).unwrap();
        let p = pe.params();
        // reference: independent evaluation of the same definitions
        let v = (PI / 2.0).sqrt() * 0.05 / (225e-6 * length);
        let a0 = libm::erf(v).powi(2);
        assert!(((p.a0 - a0) / a0).abs() < 1e-12);
        assert!(((p.a0 - 4.0 * v * v / PI) / p.a0).abs() < 1e-6);
        assert!(((p.w_eq - 225e-6 * length) / p.w_eq).abs() < 1e-6);
    }

    #[test]
    fn pdf_normalised_and_moments() {
        let pe = moderate();
        let p = pe.params();
        let cfg = QuadConfig::new(1e-12, 1e-10);
        let mass = integrate(|x| pe.pdf(x), 0.0, p.a0, &cfg).unwrap().value;
        assert!((mass - 1.0).abs() < 1e-8);
        let m1 = integrate(|x| x * pe.pdf(x), 0.0, p.a0, &cfg).unwrap().value;
        assert!((m1 - pe.moment(1.0)).abs() < 1e-10);
        assert!((pe.moment(1.0) - p.a0 * p.g2() / (p.g2() + 1.0)).abs() < 1e-15);
        assert!(
            (pe.cdf(0.5 * p.a0)
                - integrate(|x| pe.pdf(x), 0.0, 0.5 * p.a0, &cfg)
                    .unwrap()
                    .value)
                .abs()
                < 1e-9
        );
    }

    #[test]
    fn sampler_range_and_mean() {
        let pe = moderate();
        let p = pe.params();
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let n = 200_000;
        let mut acc = 0.0;
        for _ in 0..n {
            let x = pe.sample(&mut rng);
            assert!(x > 0.0 && x <= p.a0);
            acc += x;
        }
        let want = pe.moment(1.0);
        assert!((acc / n as f64 - want).abs() < 0.005 * want);
    }

    #[test]
    fn invalid_rejected() {
        assert!(PointingError::new(0.0, 1.0, 1.0).is_err());
        assert!(PointingError::new(1.0, -1.0, 1.0).is_err());
    }
}
