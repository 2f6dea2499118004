//! Monte Carlo cross-checks for the analytic routines.
//!
//! Randomness comes from ChaCha12 keyed by `McConfig::seed`. Draws are split
//! into fixed batches of [`BATCH`]; batch `k` reads ChaCha stream `k`, so the
//! merged estimate is the same for any thread count. Beta variates are
//! formed as `X/(X+Y)` from two Gamma variates (Marsaglia–Tsang squeeze, with
//! the `U^{1/a}` boost for shapes below one). Posterior shapes here are
//! always at least 1.

use rand::distr::weighted::WeightedIndex;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha12Rng;
use rand_distr::{Distribution, Gamma};
use rayon::prelude::*;

use crate::binom::{SignificanceQuery, TrialObservation};
use crate::bivariate::BivariateDesign;
use crate::contdist::DiscreteDistribution;
use crate::error::{domain, Error, Result};

pub const BATCH: u64 = 1 << 16;
pub const MIN_DRAWS: u64 = 1_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct McConfig {
    pub seed: u64,
    pub draws: u64,
}

impl Default for McConfig {
    fn default() -> Self {
        Self {
            seed: 0x5eed_1234,
            draws: 1_000_000,
        }
    }
}

impl McConfig {
    pub fn new(seed: u64, draws: u64) -> Result<Self> {
        let cfg = Self { seed, draws };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        if self.draws < MIN_DRAWS {
            return Err(domain(format!(
                "draws = {} is below the minimum of {MIN_DRAWS}",
                self.draws
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct McEstimate {
    pub value: f64,
    pub std_err: f64,
    pub draws: u64,
}

impl McEstimate {
    fn from_hits(hits: u64, draws: u64) -> Self {
        let value = hits as f64 / draws as f64;
        Self {
            value,
            std_err: (value * (1.0 - value) / draws as f64).sqrt(),
            draws,
        }
    }

    /// |value - reference| in units of std_err (infinite for a zero
    /// std_err unless the values coincide).
    pub fn z_score(&self, reference: f64) -> f64 {
        let d = (self.value - reference).abs();
        if d == 0.0 {
            0.0
        } else {
            d / self.std_err
        }
    }
}

fn stream(seed: u64, index: u64) -> ChaCha12Rng {
    let mut rng = ChaCha12Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}

pub(crate) struct BetaSampler {
    x: Gamma<f64>,
    y: Gamma<f64>,
}

impl BetaSampler {
    pub(crate) fn new(a: f64, b: f64) -> Result<Self> {
        let g = |s: f64| Gamma::new(s, 1.0).map_err(|e| domain(format!("gamma shape {s}: {e}")));
        Ok(Self { x: g(a)?, y: g(b)? })
    }

    pub(crate) fn posterior(obs: &TrialObservation) -> Result<Self> {
        let (a, b) = obs.posterior_shape();
        Self::new(a, b)
    }

    pub(crate) fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        let x = self.x.sample(rng);
        let y = self.y.sample(rng);
        x / (x + y)
    }
}

/// Counts successes of `trial` over `draws` attempts, batch by batch.
fn count_hits<F>(cfg: &McConfig, trial: F) -> Result<McEstimate>
where
    F: Fn(&mut ChaCha12Rng) -> bool + Sync,
{
    cfg.validate()?;
    let batches = cfg.draws.div_ceil(BATCH);
    let hits: u64 = (0..batches)
        .into_par_iter()
        .map(|k| {
            let mut rng = stream(cfg.seed, k);
            let n = BATCH.min(cfg.draws - k * BATCH);
            (0..n).filter(|_| trial(&mut rng)).count() as u64
        })
        .sum();
    Ok(McEstimate::from_hits(hits, cfg.draws))
}

/// Fraction of posterior draws Q with Q ≥ Q0.
pub fn mc_significance(query: &SignificanceQuery, cfg: &McConfig) -> Result<McEstimate> {
    let sampler = BetaSampler::posterior(&query.obs)?;
    let q0 = query.q0();
    count_hits(cfg, |rng| sampler.sample(rng) >= q0)
}

/// Fraction of independent posterior pairs (Q, Π) with Q ≥ Π + δ.
pub fn mc_superiority(design: &BivariateDesign, cfg: &McConfig) -> Result<McEstimate> {
    let test = BetaSampler::posterior(&design.test)?;
    let control = BetaSampler::posterior(&design.control)?;
    let delta = design.delta();
    count_hits(cfg, |rng| {
        let q = test.sample(rng);
        let pi = control.sample(rng);
        q >= pi + delta
    })
}

/// Largest histogram returned by [`mc_mean_distribution`].
pub const DEFAULT_HISTOGRAM_CAP: usize = 1 << 22;

/// Empirical distribution of `repetitions` sample means, each over `n`
/// draws from `base`, on the lattice of step `base.step() / n` trimmed to
/// the occupied range. Repetition `r` reads ChaCha stream `r`.
pub fn mc_mean_distribution(
    base: &DiscreteDistribution,
    n: u64,
    repetitions: u64,
    cfg: &McConfig,
) -> Result<DiscreteDistribution> {
    if n == 0 || repetitions == 0 {
        return Err(domain("n and repetitions must be positive"));
    }
    let index = WeightedIndex::new(base.mass()).map_err(|e| domain(format!("base masses: {e}")))?;
    let sums: Vec<u64> = (0..repetitions)
        .into_par_iter()
        .map(|r| {
            let mut rng = stream(cfg.seed, r);
            (0..n).map(|_| index.sample(&mut rng) as u64).sum()
        })
        .collect();
    let lo = *sums.iter().min().expect("repetitions > 0");
    let hi = *sums.iter().max().expect("repetitions > 0");
    let width = (hi - lo + 1) as usize;
    if width > DEFAULT_HISTOGRAM_CAP {
        return Err(Error::Overflow(format!(
            "histogram of {width} bins exceeds cap {DEFAULT_HISTOGRAM_CAP}"
        )));
    }
    let mut counts = vec![0u64; width];
    for s in &sums {
        counts[(s - lo) as usize] += 1;
    }
    let step = base.step() / n as f64;
    DiscreteDistribution::new(
        base.origin() + lo as f64 * step,
        step,
        counts
            .iter()
            .map(|&c| c as f64 / repetitions as f64)
            .collect(),
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::binom::significance;
    use crate::bivariate::superiority_exact;
    use crate::contdist::mean_sampling_distribution;

    fn query(q: f64, m: f64, q0: f64) -> SignificanceQuery {
        SignificanceQuery::new(TrialObservation::new(q, m).unwrap(), q0).unwrap()
    }

    #[test]
    fn config_validation() {
        assert!(McConfig::new(1, 999).is_err());
        assert!(McConfig::new(1, 1000).is_ok());
        assert_eq!(McConfig::default().draws, 1_000_000);
    }

    #[test]
    fn significance_examples() {
        let cfg = McConfig::default();
        let est = mc_significance(&query(154.0 / 162.0, 162.0, 0.95), &cfg).unwrap();
        assert!(est.z_score(0.428_894_049_556_500_6) < 3.0);
        assert!((est.value - 0.429).abs() < 3.0 * est.std_err + 5e-4);
        for seed in [0, 7, 99] {
            let est = mc_significance(&query(0.3, 10.0, 0.0), &McConfig::new(seed, 5000).unwrap())
                .unwrap();
            assert_eq!(est.value, 1.0);
        }
        let q = query(0.61, 35.0, 0.5);
        let est = mc_significance(&q, &cfg).unwrap();
        assert!(est.z_score(significance(&q).unwrap()) < 3.0);
    }

    #[test]
    fn superiority_examples() {
        let cfg = McConfig::new(11, 200_000).unwrap();
        let sym = BivariateDesign::from_parts(0.4, 60.0, 0.4, 60.0, 0.0).unwrap();
        assert!(mc_superiority(&sym, &cfg).unwrap().z_score(0.5) < 3.0);
        let small = BivariateDesign::from_parts(0.6, 10.0, 0.4, 10.0, 0.0).unwrap();
        let exact = superiority_exact(&small).unwrap();
        assert!(mc_superiority(&small, &cfg).unwrap().z_score(exact) < 3.0);
    }

    #[test]
    fn deterministic_across_thread_counts() {
        let q = query(0.45, 522.0, 0.4);
        let cfg = McConfig::new(42, 300_001).unwrap();
        let run = |threads| {
            rayon::ThreadPoolBuilder::new()
                .num_threads(threads)
                .build()
                .unwrap()
                .install(|| mc_significance(&q, &cfg).unwrap())
        };
        let one = run(1);
        assert_eq!(one.value.to_bits(), run(4).value.to_bits());
        assert_eq!(one, mc_significance(&q, &cfg).unwrap());
        assert_ne!(
            one,
            mc_significance(&q, &McConfig::new(43, 300_001).unwrap()).unwrap()
        );
    }

    #[test]
    fn coverage_over_seeds() {
        let q = query(0.7, 40.0, 0.6);
        let truth = significance(&q).unwrap();
        let inside = (0..100u64)
            .filter(|&s| {
                let est = mc_significance(&q, &McConfig::new(1000 + s, 20_000).unwrap()).unwrap();
                (est.value - truth).abs() <= 2.0 * est.std_err
            })
            .count();
        assert!(inside >= 90, "{inside}/100");
    }

    #[test]
    fn beta_sampler_mean() {
        let obs = TrialObservation::new(0.37, 23.5).unwrap();
        let sampler = BetaSampler::posterior(&obs).unwrap();
        let mut rng = stream(5, 0);
        let n = 200_000;
        let xs: Vec<f64> = (0..n).map(|_| sampler.sample(&mut rng)).collect();
        let mean = xs.iter().sum::<f64>() / n as f64;
        let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1) as f64;
        let (a, b) = obs.posterior_shape();
        assert!((mean - a / (a + b)).abs() < 4.0 * (var / n as f64).sqrt());
        // shapes across the documented range
        for &(a, b) in &[(0.6, 0.7), (1.0, 1999.0), (1500.0, 3.0)] {
            let s = BetaSampler::new(a, b).unwrap();
            let mut rng = stream(9, 1);
            let m = (0..50_000).map(|_| s.sample(&mut rng)).sum::<f64>() / 50_000.0;
            let sd = (a * b / ((a + b).powi(2) * (a + b + 1.0))).sqrt();
            assert!((m - a / (a + b)).abs() < 4.0 * sd / 50_000f64.sqrt());
        }
    }

    #[test]
    fn roulette_histograms() {
        let wheel = DiscreteDistribution::uniform(0.0, 1.0, 37).unwrap();
        let cfg = McConfig::default();
        let one = mc_mean_distribution(&wheel, 1_000_000, 1, &cfg).unwrap();
        assert_eq!(one.len(), 1);
        assert!((one.mean() - 18.0).abs() < 3.0 * 10.677 / 1000.0);

        let casinos = mc_mean_distribution(&wheel, 1000, 100, &cfg).unwrap();
        let sd = casinos.variance().sqrt() * (100.0f64 / 99.0).sqrt();
        assert!((sd - 0.33).abs() < 0.1, "{sd}");
        let exact = mean_sampling_distribution(&wheel, 1000).unwrap();
        let se = exact.variance().sqrt() / 10.0;
        assert!((casinos.mean() - exact.mean()).abs() < 3.0 * se);
    }
}
