//! Batched Monte Carlo estimation with batch-means standard errors.

use alloc::vec;
use alloc::vec::Vec;

#[allow(unused_imports)]
use num_traits::Float;

use crate::error::{Error, Result};
use crate::rng::{RngStream, StreamRng};

/// Default seed of the verification runs.
pub const DEFAULT_SEED: u64 = 0xE4DE17;

/// Sample size, seed and batching of a Monte Carlo run.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct McConfig {
    pub n_samples: usize,
    pub seed: u64,
    /// Number of batches; batch `b` draws from stream `(seed, b)`.
    pub n_streams: usize,
    /// Draw half of each batch from the complemented generator.
    pub antithetic: bool,
}

impl Default for McConfig {
    fn default() -> Self {
        McConfig { n_samples: 100_000, seed: DEFAULT_SEED, n_streams: 128, antithetic: false }
    }
}

impl McConfig {
    pub fn with_samples(n_samples: usize, seed: u64) -> Self {
        McConfig { n_samples, seed, ..Self::default() }
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_samples < 1000 {
            return Err(Error::InvalidArgument("n_samples must be at least 1000"));
        }
        if self.n_streams == 0 || self.n_streams > self.n_samples {
            return Err(Error::InvalidArgument("n_streams must lie in 1..=n_samples"));
        }
        Ok(())
    }

    fn batch_size(&self, b: usize) -> usize {
        let base = self.n_samples / self.n_streams;
        base + usize::from(b < self.n_samples % self.n_streams)
    }
}

/// Mean and batch-means standard error.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Estimate {
    pub mean: f64,
    pub se: f64,
    pub n: usize,
    pub batches: usize,
    /// `false` when the standard error could not be formed (fewer than two
    /// batches, or non-finite).
    pub converged: bool,
    /// Largest batch-mean deviation from the mean in units of the batch
    /// standard deviation.
    pub max_batch_z: f64,
}

impl Estimate {
    /// A deterministic value.
    pub fn exact(value: f64) -> Self {
        Estimate { mean: value, se: 0.0, n: 0, batches: 0, converged: true, max_batch_z: 0.0 }
    }

    /// `c · self`.
    pub fn scaled(&self, c: f64) -> Self {
        Estimate { mean: self.mean * c, se: self.se * c.abs(), ..*self }
    }

    /// Batch means more than five batch standard deviations from the mean.
    pub fn heavy_tailed(&self) -> bool {
        self.max_batch_z > 5.0
    }

    /// `|self − other| ≤ k·√(se₁² + se₂²)`.
    pub fn agrees_with(&self, other: &Estimate, k: f64) -> bool {
        (self.mean - other.mean).abs() <= k * self.se.hypot(other.se)
    }

    /// `|self − value| ≤ k·se`.
    pub fn agrees_with_value(&self, value: f64, k: f64) -> bool {
        (self.mean - value).abs() <= k * self.se
    }
}

/// Per-batch sums of each statistic.
#[derive(Clone, Debug, PartialEq)]
pub struct BatchSums {
    pub n: usize,
    pub sums: Vec<f64>,
}

/// Executes independent batches; results must be returned in batch order.
pub trait BatchRunner: Sync {
    fn run_batches(&self, n_batches: usize, job: &(dyn Fn(usize) -> Result<BatchSums> + Sync)) -> Vec<Result<BatchSums>>;
}

/// Runs batches one after another.
#[derive(Clone, Copy, Debug, Default)]
pub struct Serial;

impl BatchRunner for Serial {
    fn run_batches(&self, n_batches: usize, job: &(dyn Fn(usize) -> Result<BatchSums> + Sync)) -> Vec<Result<BatchSums>> {
        (0..n_batches).map(job).collect()
    }
}

/// Estimates `m` expectations jointly; `sample` fills one value per
/// statistic from a single draw.
pub fn estimate_many<R, F>(cfg: &McConfig, runner: &R, m: usize, sample: F) -> Result<Vec<Estimate>>
where
    R: BatchRunner + ?Sized,
    F: Fn(&mut StreamRng, &mut [f64]) -> Result<()> + Sync,
{
    cfg.validate()?;
    if m == 0 {
        return Err(Error::InvalidArgument("no statistics requested"));
    }
    let job = |b: usize| -> Result<BatchSums> {
        let n = cfg.batch_size(b);
        let stream = RngStream::new(cfg.seed, b as u64);
        let mut sums = vec![0.0; m];
        let mut buf = vec![0.0; m];
        let mut draw = |rng: &mut StreamRng, count: usize, sums: &mut [f64]| -> Result<()> {
            for _ in 0..count {
                sample(rng, &mut buf)?;
                for (s, &x) in sums.iter_mut().zip(&buf) {
                    if !x.is_finite() {
                        return Err(Error::MomentDivergence("non-finite sample value"));
                    }
                    *s += x;
                }
            }
            Ok(())
        };
        if cfg.antithetic {
            // odd remainder draws come from the plain generator
            let half = n / 2;
            let mut plain = stream.rng();
            draw(&mut plain, half, &mut sums)?;
            draw(&mut stream.antithetic_rng(), half, &mut sums)?;
            draw(&mut plain, n - 2 * half, &mut sums)?;
        } else {
            draw(&mut stream.rng(), n, &mut sums)?;
        }
        Ok(BatchSums { n, sums })
    };
    let batches = runner.run_batches(cfg.n_streams, &job).into_iter().collect::<Result<Vec<_>>>()?;
    Ok((0..m).map(|i| combine(&batches, i)).collect())
}

/// Single-statistic form of [`estimate_many`].
pub fn estimate<R, F>(cfg: &McConfig, runner: &R, sample: F) -> Result<Estimate>
where
    R: BatchRunner + ?Sized,
    F: Fn(&mut StreamRng) -> Result<f64> + Sync,
{
    let v = estimate_many(cfg, runner, 1, |rng, out| {
        out[0] = sample(rng)?;
        Ok(())
    })?;
    Ok(v[0])
}

fn combine(batches: &[BatchSums], i: usize) -> Estimate {
    let n: usize = batches.iter().map(|b| b.n).sum();
    let total: f64 = batches.iter().map(|b| b.sums[i]).sum();
    let mean = total / n as f64;
    let bcount = batches.len();
    if bcount < 2 {
        return Estimate { mean, se: f64::NAN, n, batches: bcount, converged: false, max_batch_z: 0.0 };
    }
    // size-weighted batch means
    let mut ss = 0.0;
    let mut max_dev: f64 = 0.0;
    for b in batches {
        let mb = b.sums[i] / b.n as f64;
        let d = mb - mean;
        ss += b.n as f64 * d * d;
        max_dev = max_dev.max(d.abs() * (b.n as f64).sqrt());
    }
    // per-sample variance estimated from batch means
    let var_unit = ss / (bcount - 1) as f64;
    let se = (var_unit / n as f64).sqrt();
    let sd_unit = var_unit.sqrt();
    let max_batch_z = if sd_unit > 0.0 { max_dev / sd_unit } else { 0.0 };
    Estimate { mean, se, n, batches: bcount, converged: se.is_finite(), max_batch_z }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::Rng;
    use rand_distr::{Distribution, StandardNormal};

    #[test]
    fn uniform_mean() {
        let cfg = McConfig::with_samples(100_000, 3);
        let e = estimate(&cfg, &Serial, |r| Ok(r.random::<f64>())).unwrap();
        assert!(e.converged);
        assert!(e.agrees_with_value(0.5, 4.0));
        // uniform variance 1/12
        let want_se = (1.0f64 / 12.0 / 1e5).sqrt();
        assert!((e.se / want_se - 1.0).abs() < 0.2, "{} vs {}", e.se, want_se);
        assert!(!e.heavy_tailed());
    }

    #[test]
    fn deterministic_and_batch_order_independent_of_runner() {
        let cfg = McConfig::with_samples(10_000, 9);
        let f = |r: &mut StreamRng| -> Result<f64> { Ok(StandardNormal.sample(r)) };
        let a = estimate(&cfg, &Serial, f).unwrap();
        let b = estimate(&cfg, &Serial, f).unwrap();
        assert_eq!(a, b);
        struct Reversed;
        impl BatchRunner for Reversed {
            fn run_batches(&self, n: usize, job: &(dyn Fn(usize) -> Result<BatchSums> + Sync)) -> Vec<Result<BatchSums>> {
                let mut v: Vec<_> = (0..n).rev().map(job).collect();
                v.reverse();
                v
            }
        }
        assert_eq!(estimate(&cfg, &Reversed, f).unwrap(), a);
    }

    #[test]
    fn antithetic_cancels_linear_statistic() {
        let cfg = McConfig { antithetic: true, ..McConfig::with_samples(10_240, 1) };
        let e = estimate(&cfg, &Serial, |r| Ok(r.random::<f64>() - 0.5)).unwrap();
        assert!(e.mean.abs() < 1e-12);
    }

    #[test]
    fn config_validation() {
        assert!(McConfig::with_samples(999, 0).validate().is_err());
        assert!(McConfig { n_streams: 0, ..McConfig::default() }.validate().is_err());
        let single = McConfig { n_streams: 1, ..McConfig::with_samples(1000, 0) };
        let e = estimate(&single, &Serial, |r| Ok(r.random::<f64>())).unwrap();
        assert!(!e.converged);
    }

    #[test]
    fn heavy_tail_flagged() {
        // infinite variance: U^(-0.9)
        let cfg = McConfig::with_samples(200_000, 5);
        let e = estimate(&cfg, &Serial, |r| Ok(r.random::<f64>().powf(-0.9))).unwrap();
        assert!(e.heavy_tailed(), "z = {}", e.max_batch_z);
    }

    #[test]
    fn non_finite_sample_is_an_error() {
        let cfg = McConfig::with_samples(1000, 0);
        assert!(matches!(estimate(&cfg, &Serial, |_| Ok(f64::INFINITY)), Err(Error::MomentDivergence(_))));
    }
}
