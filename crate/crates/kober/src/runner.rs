use kober_core::mc::{BatchRunner, BatchSums};
use kober_core::Result;
use rayon::prelude::*;

/// Runs Monte Carlo batches on the rayon pool. Batch results come back in
/// batch order, so estimates do not depend on the thread count.
#[derive(Clone, Copy, Debug, Default)]
pub struct Parallel;

impl BatchRunner for Parallel {
    fn run_batches(&self, n_batches: usize, job: &(dyn Fn(usize) -> Result<BatchSums> + Sync)) -> Vec<Result<BatchSums>> {
        (0..n_batches).into_par_iter().map(job).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use kober_core::mc::{estimate, McConfig, Serial};
    use rand::Rng;

    #[test]
    fn matches_serial() {
        let cfg = McConfig::with_samples(20_000, 11);
        let f = |r: &mut kober_core::rng::StreamRng| Ok(r.random::<f64>().powi(2));
        assert_eq!(estimate(&cfg, &Parallel, f).unwrap(), estimate(&cfg, &Serial, f).unwrap());
    }
}
