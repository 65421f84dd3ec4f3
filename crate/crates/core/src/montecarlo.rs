//! Seeded Monte Carlo estimators for outage, BER and ergodic capacity.
//!
//! Samples are drawn in fixed chunks of 2^16. Chunk `k` owns ChaCha8 stream
//! `k` under the master seed, and chunk results are reduced in chunk order,
//! so the estimate depends only on `(master_seed, samples)` and not on the
//! number of worker threads.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::metrics::{conditional_bep, MetricResult, Modulation};
use crate::scenario::Scenario;
use crate::specfun::erfc;
use crate::units::db_to_linear;

/// Samples per RNG substream.
pub const CHUNK_SIZE: u64 = 1 << 16;

/// Probabilities below this are flagged unreliable.
pub const RELIABILITY_FLOOR: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct McConfig {
    pub samples: u64,
    pub master_seed: u64,
    pub workers: usize,
    pub ci_level: f64,
}

impl Default for McConfig {
    fn default() -> Self {
        McConfig {
            samples: 1_000_000,
            master_seed: 0x5eed,
            workers: std::thread::available_parallelism().map_or(1, |n| n.get()),
            ci_level: 0.95,
        }
    }
}

impl McConfig {
    pub fn new(samples: u64, master_seed: u64) -> Self {
        McConfig {
            samples,
            master_seed,
            ..Default::default()
        }
    }

    pub fn with_workers(mut self, workers: usize) -> Self {
        self.workers = workers;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.samples < 1000 {
            return Err(Error::invalid("Monte Carlo needs at least 1000 samples"));
        }
        if self.workers == 0 {
            return Err(Error::invalid("Monte Carlo needs at least one worker"));
        }
        if !(self.ci_level > 0.0 && self.ci_level < 1.0) {
            return Err(Error::invalid("confidence level must lie in (0, 1)"));
        }
        Ok(())
    }

    /// Two-sided normal critical value for `ci_level`.
    pub fn z(&self) -> f64 {
        normal_quantile(0.5 + 0.5 * self.ci_level)
    }
}

/// Sample mean and unbiased variance of a statistic.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct McEstimate {
    pub mean: f64,
    pub variance: f64,
    pub samples: u64,
}

impl McEstimate {
    pub fn std_error(&self) -> f64 {
        (self.variance / self.samples as f64).sqrt()
    }
}

/// The RNG of chunk `k`.
pub fn chunk_rng(master_seed: u64, k: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(master_seed);
    rng.set_stream(k);
    rng
}

/// Mean of `stat(draw(rng))` over `cfg.samples` draws.
pub fn mc_estimate<D, S>(cfg: &McConfig, draw: D, stat: S) -> Result<McEstimate>
where
    D: Fn(&mut ChaCha8Rng) -> f64 + Sync,
    S: Fn(f64) -> f64 + Sync,
{
    cfg.validate()?;
    let n = cfg.samples;
    let chunks = n.div_ceil(CHUNK_SIZE);
    let run_chunk = |k: u64| {
        let mut rng = chunk_rng(cfg.master_seed, k);
        let len = CHUNK_SIZE.min(n - k * CHUNK_SIZE);
        // Welford within the chunk
        let (mut mean, mut m2) = (0.0, 0.0);
        for i in 0..len {
            let x = stat(draw(&mut rng));
            let d = x - mean;
            mean += d / (i + 1) as f64;
            m2 += d * (x - mean);
        }
        (len, mean, m2)
    };
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(cfg.workers)
        .build()
        .map_err(|e| Error::Unsupported(format!("thread pool: {e}")))?;
    let parts: Vec<(u64, f64, f64)> =
        pool.install(|| (0..chunks).into_par_iter().map(run_chunk).collect());
    // Chan et al. pairwise merge, in chunk order.
    let (mut count, mut mean, mut m2) = (0u64, 0.0, 0.0);
    for (nb, mb, m2b) in parts {
        let total = count + nb;
        let d = mb - mean;
        mean += d * nb as f64 / total as f64;
        m2 += m2b + d * d * (count as f64) * (nb as f64) / total as f64;
        count = total;
    }
    if !mean.is_finite() {
        return Err(Error::no_convergence(
            "Monte Carlo estimate (non-finite statistic)",
            mean,
        ));
    }
    Ok(McEstimate {
        mean,
        variance: if count > 1 {
            m2 / (count - 1) as f64
        } else {
            0.0
        },
        samples: count,
    })
}

/// Fraction of end-to-end SNR draws at or below `γ_out`, with a binomial
/// confidence interval.
pub fn mc_outage(sc: &Scenario, gamma_out_db: f64, cfg: &McConfig) -> Result<MetricResult> {
    sc.validate()?;
    let threshold = db_to_linear(gamma_out_db);
    let est = mc_estimate(
        cfg,
        |rng| sc.system_sample(rng),
        |g| if g <= threshold { 1.0 } else { 0.0 },
    )?;
    // the statistic is an indicator, so the mean is an exact count ratio
    let hits = (est.mean * est.samples as f64).round();
    let p = hits / est.samples as f64;
    let half = cfg.z() * (p * (1.0 - p) / est.samples as f64).sqrt();
    let mut r = MetricResult::monte_carlo(p, est.samples, half);
    r.unreliable = p < RELIABILITY_FLOOR;
    Ok(r)
}

/// Average conditional error probability over end-to-end SNR draws.
pub fn mc_ber(sc: &Scenario, modulation: Modulation, cfg: &McConfig) -> Result<MetricResult> {
    sc.validate()?;
    let (u, v) = modulation.params();
    let est = mc_estimate(
        cfg,
        |rng| sc.system_sample(rng),
        |g| conditional_bep(u, v, g),
    )?;
    let mut r = MetricResult::monte_carlo(est.mean, est.samples, cfg.z() * est.std_error());
    r.unreliable = est.mean < RELIABILITY_FLOOR;
    Ok(r)
}

/// `(1/n) E[log₂(1 + γ₀)]`.
pub fn mc_capacity(sc: &Scenario, cfg: &McConfig) -> Result<MetricResult> {
    sc.validate()?;
    let slots = sc.time_slots as f64;
    let est = mc_estimate(
        cfg,
        |rng| sc.system_sample(rng),
        |g| g.ln_1p() / std::f64::consts::LN_2 / slots,
    )?;
    Ok(MetricResult::monte_carlo(
        est.mean,
        est.samples,
        cfg.z() * est.std_error(),
    ))
}

/// Kolmogorov–Smirnov distance between a sample and a continuous CDF.
pub fn ks_distance<F: Fn(f64) -> f64>(samples: &mut [f64], cdf: F) -> f64 {
    samples.sort_by(|a, b| a.total_cmp(b));
    let n = samples.len() as f64;
    samples
        .iter()
        .enumerate()
        .map(|(i, &x)| {
            let f = cdf(x);
            (f - i as f64 / n).abs().max(((i + 1) as f64 / n - f).abs())
        })
        .fold(0.0, f64::max)
}

/// Standard normal quantile: Acklam's rational approximation refined by one
/// Halley step.
pub fn normal_quantile(p: f64) -> f64 {
    if !(p > 0.0 && p < 1.0) {
        return if p == 0.0 {
            f64::NEG_INFINITY
        } else if p == 1.0 {
            f64::INFINITY
        } else {
            f64::NAN
        };
    }
    const A: [f64; 6] = [
        -3.969683028665376e1,
        2.209460984245205e2,
        -2.759285104469687e2,
        1.383_577_518_672_69e2,
        -3.066479806614716e1,
        2.506628277459239,
    ];
    const B: [f64; 5] = [
        -5.447609879822406e1,
        1.615858368580409e2,
        -1.556989798598866e2,
        6.680131188771972e1,
        -1.328068155288572e1,
    ];
    const C: [f64; 6] = [
        -7.784894002430293e-3,
        -3.223964580411365e-1,
        -2.400758277161838,
        -2.549732539343734,
        4.374664141464968,
        2.938163982698783,
    ];
    const D: [f64; 4] = [
        7.784695709041462e-3,
        3.224671290700398e-1,
        2.445134137142996,
        3.754408661907416,
    ];
    let lower = 0.02425;
    let x = if p < lower {
        let q = (-2.0 * p.ln()).sqrt();
        (((((C[0] * q + C[1]) * q + C[2]) * q + C[3]) * q + C[4]) * q + C[5])
            / ((((D[0] * q + D[1]) * q + D[2]) * q + D[3]) * q + 1.0)
    } else if p <= 1.0 - lower {
        let q = p - 0.5;
        let r = q * q;
        (((((A[0] * r + A[1]) * r + A[2]) * r + A[3]) * r + A[4]) * r + A[5]) * q
            / (((((B[0] * r + B[1]) * r + B[2]) * r + B[3]) * r + B[4]) * r + 1.0)
    } else {
        let q = (-2.0 * (1.0 - p).ln()).sqrt();
        -(((((C[0] * q + C[1]) * q + C[2]) * q + C[3]) * q + C[4]) * q + C[5])
            / ((((D[0] * q + D[1]) * q + D[2]) * q + D[3]) * q + 1.0)
    };
    let e = 0.5 * erfc(-x / std::f64::consts::SQRT_2) - p;
    let u = e * (2.0 * std::f64::consts::PI).sqrt() * (0.5 * x * x).exp();
    x - u / (1.0 + 0.5 * x * u)
}
