//! Seeded Monte Carlo oracle: drop node pairs in the disk, push their
//! separation through the channel and tabulate what the receiver sees.
//!
//! The sample index space is cut into fixed chunks of [`CHUNK_SIZE`]. Chunk
//! `k` draws from a ChaCha8 generator seeded with the run seed and switched to
//! stream `k`, so each chunk's samples depend only on `(seed, k)`. Chunks may
//! run on any number of workers and are merged in index order; the result is
//! bit-identical for every worker count.
//!
//! Samples are kept as log-concentrations so that deep attenuation does not
//! collapse them to zero.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::analytic::SignalDistribution;
use crate::channel::ChannelParams;
use crate::error::{Error, Result};
use crate::geometry::{sample_pair_distance, DiskRegion};
use crate::quadrature::{integrate, QuadratureOptions};
use crate::scalar::Scalar;

pub const DEFAULT_SAMPLES: u64 = 100_000;
pub const DEFAULT_BINS: usize = 100;
pub const DEFAULT_REPLICATES: usize = 20;
pub const CHUNK_SIZE: u64 = 8192;
/// Bin counts are `u32`.
pub const MAX_SAMPLES: u64 = u32::MAX as u64;

/// How to run one simulation.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SimulationConfig {
    pub n_samples: u64,
    pub seed: u64,
    pub n_bins: usize,
    /// Worker threads; `None` uses the global rayon pool.
    pub workers: Option<usize>,
}

impl SimulationConfig {
    pub fn new(n_samples: u64, seed: u64, n_bins: usize) -> Self {
        Self {
            n_samples,
            seed,
            n_bins,
            workers: None,
        }
    }

    pub fn with_workers(mut self, workers: usize) -> Self {
        self.workers = Some(workers);
        self
    }
}

impl Default for SimulationConfig {
    fn default() -> Self {
        Self::new(DEFAULT_SAMPLES, 0, DEFAULT_BINS)
    }
}

/// Histogram and empirical CDF of simulated received concentrations.
#[derive(Debug, Clone, PartialEq)]
pub struct EmpiricalDistribution<T> {
    bin_edges: Vec<T>,
    bin_probabilities: Vec<T>,
    log_samples: Vec<T>,
    sample_count: u64,
    seed: u64,
}

impl<T: Scalar> EmpiricalDistribution<T> {
    /// `n_bins + 1` ascending edges spanning the analytic support.
    /// Builds the histogram and ECDF from log-concentrations. The histogram
    /// has `n_bins` equal-width bins over `support` (linear concentration);
    /// samples outside it land in the end bins.
    pub fn from_log_samples(
        mut log_samples: Vec<T>,
        support: (T, T),
        n_bins: usize,
        seed: u64,
    ) -> Result<Self> {
        let n = log_samples.len() as u64;
        if n == 0 {
            return Err(Error::InvalidParameter {
                name: "n_samples",
                value: 0.0,
                reason: "must be at least one",
            });
        }
        if n > MAX_SAMPLES {
            return Err(Error::Capacity {
                requested: n,
                capacity: MAX_SAMPLES,
            });
        }
        if n_bins < 2 {
            return Err(Error::InvalidParameter {
                name: "n_bins",
                value: n_bins as f64,
                reason: "must be at least two",
            });
        }
        let (y_min, y_max) = support;
        if !(y_max > y_min && y_min >= T::zero()) {
            return Err(Error::Precondition(format!(
                "histogram range [{}, {}] is empty",
                y_min, y_max
            )));
        }
        if log_samples.iter().any(|v| v.is_nan()) {
            return Err(Error::Precondition("NaN sample".into()));
        }
        log_samples.sort_by(|a, b| a.partial_cmp(b).unwrap());

        let width = (y_max - y_min) / T::from_count(n_bins as u64);
        let bin_edges: Vec<T> = (0..=n_bins)
            .map(|i| {
                if i == n_bins {
                    y_max
                } else {
                    y_min + width * T::from_count(i as u64)
                }
            })
            .collect();

        let mut counts = vec![0u32; n_bins];
        for &s in &log_samples {
            let offset = ((s.exp() - y_min) / width).floor();
            let idx = offset
                .to_usize()
                .unwrap_or(if offset > T::zero() { n_bins - 1 } else { 0 })
                .min(n_bins - 1);
            counts[idx] += 1;
        }
        let total = T::from_count(n);
        let bin_probabilities = counts
            .iter()
            .map(|&c| T::from_count(c as u64) / total)
            .collect();

        Ok(Self {
            bin_edges,
            bin_probabilities,
            log_samples,
            sample_count: n,
            seed,
        })
    }

    pub fn bin_edges(&self) -> &[T] {
        &self.bin_edges
    }

    pub fn bin_probabilities(&self) -> &[T] {
        &self.bin_probabilities
    }

    /// Probability per bin divided by bin width.
    pub fn bin_densities(&self) -> Vec<T> {
        self.bin_probabilities
            .iter()
            .zip(self.bin_edges.windows(2))
            .map(|(&p, e)| p / (e[1] - e[0]))
            .collect()
    }

    pub fn bin_centers(&self) -> Vec<T> {
        self.bin_edges
            .windows(2)
            .map(|e| T::lit(0.5) * (e[0] + e[1]))
            .collect()
    }

    /// Sorted natural logs of every simulated concentration.
    pub fn log_samples(&self) -> &[T] {
        &self.log_samples
    }

    pub fn sample_count(&self) -> u64 {
        self.sample_count
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    /// `(y, P(Y <= y))` at each distinct sampled concentration.
    pub fn ecdf_points(&self) -> Vec<(T, T)> {
        let n = T::from_count(self.sample_count);
        let mut points: Vec<(T, T)> = Vec::new();
        for (i, &s) in self.log_samples.iter().enumerate() {
            let y = s.exp();
            let p = T::from_count(i as u64 + 1) / n;
            match points.last_mut() {
                Some(last) if last.0 == y => last.1 = p,
                _ => points.push((y, p)),
            }
        }
        points
    }

    /// Fraction of samples with `ln y <= s`.
    pub fn ecdf_log(&self, s: T) -> T {
        let count = self.log_samples.partition_point(|&v| v <= s);
        T::from_count(count as u64) / T::from_count(self.sample_count)
    }

    /// Fraction of samples with concentration at most `y`.
    pub fn ecdf(&self, y: T) -> T {
        let count = self.log_samples.partition_point(|&v| v.exp() <= y);
        T::from_count(count as u64) / T::from_count(self.sample_count)
    }

    /// Fraction of samples with `ln y >= s`.
    pub fn exceedance_log(&self, s: T) -> T {
        let below = self.log_samples.partition_point(|&v| v < s);
        T::from_count((self.log_samples.len() - below) as u64) / T::from_count(self.sample_count)
    }
}

fn chunk_log_samples<T: Scalar>(
    params: &ChannelParams<T>,
    region: &DiskRegion<T>,
    seed: u64,
    chunk: u64,
    len: u64,
) -> Result<Vec<T>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(chunk);
    (0..len)
        .map(|_| params.log_response(sample_pair_distance(region, &mut rng).value()))
        .collect()
}

/// Runs the oracle on the global worker pool.
pub fn simulate<T: Scalar>(
    params: &ChannelParams<T>,
    region: &DiskRegion<T>,
    n_samples: u64,
    seed: u64,
    n_bins: usize,
) -> Result<EmpiricalDistribution<T>> {
    simulate_with(
        params,
        region,
        &SimulationConfig::new(n_samples, seed, n_bins),
    )
}

pub fn simulate_with<T: Scalar>(
    params: &ChannelParams<T>,
    region: &DiskRegion<T>,
    config: &SimulationConfig,
) -> Result<EmpiricalDistribution<T>> {
    let n = config.n_samples;
    if n == 0 {
        return Err(Error::InvalidParameter {
            name: "n_samples",
            value: 0.0,
            reason: "must be at least one",
        });
    }
    if n > MAX_SAMPLES {
        return Err(Error::Capacity {
            requested: n,
            capacity: MAX_SAMPLES,
        });
    }
    if config.n_bins < 2 {
        return Err(Error::InvalidParameter {
            name: "n_bins",
            value: config.n_bins as f64,
            reason: "must be at least two",
        });
    }

    let chunks = n.div_ceil(CHUNK_SIZE);
    let run = || -> Result<Vec<Vec<T>>> {
        (0..chunks)
            .into_par_iter()
            .map(|k| {
                let len = CHUNK_SIZE.min(n - k * CHUNK_SIZE);
                chunk_log_samples(params, region, config.seed, k, len)
            })
            .collect()
    };
    let per_chunk = match config.workers {
        Some(workers) => rayon::ThreadPoolBuilder::new()
            .num_threads(workers.max(1))
            .build()
            .map_err(|e| Error::Precondition(format!("cannot start worker pool: {e}")))?
            .install(run)?,
        None => run()?,
    };

    let log_samples: Vec<T> = per_chunk.into_iter().flatten().collect();
    let support = SignalDistribution::new(*params, *region)?.support();
    EmpiricalDistribution::from_log_samples(log_samples, support, config.n_bins, config.seed)
}

/// `sup |ECDF(y) - F(y)|` over the distinct sampled concentrations.
pub fn ks_statistic<T: Scalar, F: Fn(T) -> T>(
    emp: &EmpiricalDistribution<T>,
    analytic_cdf: F,
) -> T {
    emp.ecdf_points()
        .into_iter()
        .map(|(y, p)| (p - analytic_cdf(y)).abs())
        .fold(T::zero(), T::max)
}

/// Same statistic with the analytic CDF given as a function of `ln y`.
pub fn ks_statistic_log<T: Scalar, F: Fn(T) -> T>(
    emp: &EmpiricalDistribution<T>,
    analytic_cdf_log: F,
) -> T {
    let values: Vec<T> = emp
        .log_samples
        .iter()
        .map(|&s| analytic_cdf_log(s))
        .collect();
    ks_statistic_from_values(emp, &values)
}

/// Same statistic given the analytic CDF already evaluated at each entry of
/// [`EmpiricalDistribution::log_samples`].
pub fn ks_statistic_from_values<T: Scalar>(
    emp: &EmpiricalDistribution<T>,
    cdf_at_samples: &[T],
) -> T {
    assert_eq!(cdf_at_samples.len(), emp.log_samples.len());
    let n = T::from_count(emp.sample_count);
    let samples = &emp.log_samples;
    let mut worst = T::zero();
    for i in 0..samples.len() {
        // Evaluate at the last copy of each distinct value.
        if i + 1 < samples.len() && samples[i + 1] == samples[i] {
            continue;
        }
        let ecdf = T::from_count(i as u64 + 1) / n;
        worst = worst.max((ecdf - cdf_at_samples[i]).abs());
    }
    worst
}

/// `sum over bins |p_bin - integral of pdf over the bin|`, plus whatever
/// analytic mass lies outside the histogram range (taken as `1 - sum of
/// bin masses`, so `pdf` is assumed normalized). In `[0, 2]`; disjoint
/// supports give 2.
pub fn l1_distance<T: Scalar, F: Fn(T) -> T>(
    emp: &EmpiricalDistribution<T>,
    analytic_pdf: F,
) -> Result<T> {
    let opts = QuadratureOptions::default();
    let masses = emp
        .bin_edges
        .windows(2)
        .map(|e| {
            if e[0] > T::zero() {
                // Log substitution keeps steep low-concentration bins cheap.
                integrate(
                    |s: T| {
                        let y = s.exp();
                        analytic_pdf(y) * y
                    },
                    e[0].ln(),
                    e[1].ln(),
                    &opts,
                )
            } else {
                integrate(&analytic_pdf, e[0], e[1], &opts)
            }
            .map(|i| i.value)
        })
        .collect::<Result<Vec<T>>>()?;
    Ok(l1_distance_from_masses(emp, &masses))
}

/// L1 distance against precomputed analytic bin masses, counted as in
/// [`l1_distance`].
pub fn l1_distance_from_masses<T: Scalar>(emp: &EmpiricalDistribution<T>, masses: &[T]) -> T {
    assert_eq!(masses.len(), emp.bin_probabilities.len());
    let inside = masses.iter().fold(T::zero(), |acc, &m| acc + m);
    let outside = (T::one() - inside).max(T::zero());
    emp.bin_probabilities
        .iter()
        .zip(masses)
        .fold(outside, |acc, (&p, &m)| acc + (p - m).abs())
}

/// Spread of a statistic over replicated runs.
#[derive(Debug, Clone, PartialEq)]
pub struct ReplicateSummary<T> {
    pub values: Vec<T>,
    pub min: T,
    pub median: T,
    pub max: T,
}

impl<T: Scalar> ReplicateSummary<T> {
    pub fn from_values(values: Vec<T>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::Precondition("no replicate values".into()));
        }
        let mut sorted = values.clone();
        sorted.sort_by(|a, b| a.partial_cmp(b).unwrap());
        let k = sorted.len();
        let median = if k % 2 == 1 {
            sorted[k / 2]
        } else {
            T::lit(0.5) * (sorted[k / 2 - 1] + sorted[k / 2])
        };
        Ok(Self {
            min: sorted[0],
            median,
            max: sorted[k - 1],
            values,
        })
    }
}

/// Repeats the simulation for `seeds.len()` seeds and reports the KS
/// statistic of each replicate against the analytic distribution.
pub fn replicate_ks<T: Scalar>(
    dist: &SignalDistribution<T>,
    n_samples: u64,
    n_bins: usize,
    seeds: &[u64],
) -> Result<ReplicateSummary<T>> {
    let values = seeds
        .iter()
        .map(|&seed| {
            let emp = simulate(dist.params(), dist.region(), n_samples, seed, n_bins)?;
            let cdf = dist.cdf_log_sorted(emp.log_samples())?;
            Ok(ks_statistic_from_values(&emp, &cdf))
        })
        .collect::<Result<Vec<T>>>()?;
    ReplicateSummary::from_values(values)
}
