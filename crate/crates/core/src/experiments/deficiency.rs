use serde::{Deserialize, Serialize};

use crate::dist::DistributionSpec;
use crate::error::{invalid, Result};
use crate::matrix::{HybridRank, RankPath};
use crate::par::{fold_chunks, Execution};
use crate::rng::RngStream;
use crate::stats::{wilson_interval, Z95};

/// How matrices are produced.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TrialMode {
    /// Trial `t` samples from the stream `(master_seed, t)`.
    #[default]
    MonteCarlo,
    /// Trial `t` is the matrix whose entries are the base-`|support|`
    /// digits of `t`; `trials` must equal `|support|^(n^2)`.
    Enumerate,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RankTrialConfig {
    pub dist: DistributionSpec,
    pub n: usize,
    pub k_max: usize,
    pub trials: u64,
    pub master_seed: u64,
    /// Rank the centered matrix `A - E[A]` instead of `A`.
    pub center_entries: bool,
    /// Also tally the other variant (raw when centered and vice versa).
    #[serde(default)]
    pub record_both: bool,
    #[serde(default)]
    pub mode: TrialMode,
}

impl RankTrialConfig {
    pub fn new(dist: DistributionSpec, n: usize, k_max: usize, trials: u64, master_seed: u64) -> Self {
        Self { dist, n, k_max, trials, master_seed, center_entries: false, record_both: false, mode: TrialMode::MonteCarlo }
    }

    /// Configuration enumerating every matrix once.
    pub fn enumerate(dist: DistributionSpec, n: usize, k_max: usize) -> Result<Self> {
        let trials = enumeration_size(dist.atoms().len(), n)?;
        Ok(Self { mode: TrialMode::Enumerate, ..Self::new(dist, n, k_max, trials, 0) })
    }

    pub fn validate(&self) -> Result<()> {
        if self.n == 0 {
            return Err(invalid("n must be at least 1"));
        }
        if self.k_max == 0 || self.k_max > self.n {
            return Err(invalid(format!("need 1 <= k_max <= n, got k_max = {}, n = {}", self.k_max, self.n)));
        }
        if self.trials == 0 {
            return Err(invalid("trials must be at least 1"));
        }
        self.dist.integer_values()?;
        if self.mode == TrialMode::Enumerate {
            let want = enumeration_size(self.dist.atoms().len(), self.n)?;
            if self.trials != want {
                return Err(invalid(format!("enumeration needs trials = |support|^(n^2) = {want}, got {}", self.trials)));
            }
        }
        Ok(())
    }
}

pub(crate) fn enumeration_size(support: usize, n: usize) -> Result<u64> {
    (support as u64)
        .checked_pow((n * n) as u32)
        .filter(|&s| s <= super::ENUMERATION_BUDGET)
        .ok_or_else(|| crate::Error::BudgetExceeded(format!("{support}^({n}^2) matrices exceed the enumeration budget")))
}

/// Trial counts by deficiency `d = n - rank`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DeficiencyHistogram {
    pub n: usize,
    pub trials: u64,
    pub centered: bool,
    /// `counts[d]` for `d = 0..=n`.
    pub counts: Vec<u64>,
}

/// One `(n, k)` line: trials with `rank <= n - k`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DeficiencyRow {
    pub n: usize,
    pub k: usize,
    pub trials: u64,
    pub successes: u64,
    pub p_hat: f64,
    pub wilson_lo: f64,
    pub wilson_hi: f64,
}

impl DeficiencyHistogram {
    pub fn new(n: usize, centered: bool) -> Self {
        Self { n, trials: 0, centered, counts: vec![0; n + 1] }
    }

    /// Number of trials with deficiency at least `k`.
    pub fn at_least(&self, k: usize) -> u64 {
        self.counts.iter().skip(k).sum()
    }

    pub fn p_hat(&self, k: usize) -> f64 {
        self.at_least(k) as f64 / self.trials as f64
    }

    pub fn row(&self, k: usize) -> DeficiencyRow {
        let successes = self.at_least(k);
        let (wilson_lo, wilson_hi) = wilson_interval(successes, self.trials, Z95);
        DeficiencyRow { n: self.n, k, trials: self.trials, successes, p_hat: self.p_hat(k), wilson_lo, wilson_hi }
    }

    /// Rows for `k = 1..=k_max`.
    pub fn rows(&self, k_max: usize) -> Vec<DeficiencyRow> {
        (1..=k_max.min(self.n)).map(|k| self.row(k)).collect()
    }

    /// `P(rank <= n - k)` is nonincreasing in `k`, checked on counts.
    pub fn is_monotone(&self) -> bool {
        (1..=self.n).all(|k| self.at_least(k) <= self.at_least(k - 1))
    }

    fn merge(&mut self, other: &Self) {
        self.trials += other.trials;
        self.counts.iter_mut().zip(&other.counts).for_each(|(a, b)| *a += b);
    }
}

/// How many ranks were settled by each path of the hybrid engine.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct PathCounts {
    pub certified: u64,
    pub agreed: u64,
    pub fallback: u64,
}

impl PathCounts {
    fn add(&mut self, p: RankPath) {
        match p {
            RankPath::Certified => self.certified += 1,
            RankPath::Agreed => self.agreed += 1,
            RankPath::Fallback => self.fallback += 1,
        }
    }

    fn merge(&mut self, o: &Self) {
        self.certified += o.certified;
        self.agreed += o.agreed;
        self.fallback += o.fallback;
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RankTrialResult {
    pub config: RankTrialConfig,
    pub primes: [u64; 2],
    /// Histogram of the variant selected by `center_entries`.
    pub histogram: DeficiencyHistogram,
    /// The other variant, when `record_both` is set.
    pub alternate: Option<DeficiencyHistogram>,
    pub paths: PathCounts,
}

impl RankTrialResult {
    pub fn rows(&self) -> Vec<DeficiencyRow> {
        self.histogram.rows(self.config.k_max)
    }
}

/// The two primes of a run, drawn from a stream reserved for that purpose.
pub fn run_primes(master_seed: u64) -> HybridRank {
    HybridRank::random(&mut RngStream::new(master_seed, u64::MAX).rng())
}

const CHUNK: u64 = 4096;

struct Acc {
    main: DeficiencyHistogram,
    alt: Option<DeficiencyHistogram>,
    paths: PathCounts,
    idx: Vec<usize>,
    entries: Vec<i64>,
    scratch: Vec<u64>,
}

/// Tallies `n - rank(A)` over `trials` matrices. Ranks come from the hybrid
/// modular engine with exact fallback, so every rank is exact. Results are
/// identical for sequential and parallel execution.
pub fn estimate_deficiency(config: &RankTrialConfig, exec: Execution) -> Result<RankTrialResult> {
    config.validate()?;
    let n = config.n;
    let raw = config.dist.integer_values()?;
    let centered = config.dist.centered_integer_values()?;
    let (main_vals, alt_vals) = if config.center_entries { (&centered, &raw) } else { (&raw, &centered) };
    let engine = run_primes(config.master_seed);
    let support = config.dist.atoms().len();
    let fresh = || Acc {
        main: DeficiencyHistogram::new(n, config.center_entries),
        alt: config.record_both.then(|| DeficiencyHistogram::new(n, !config.center_entries)),
        paths: PathCounts::default(),
        idx: vec![0; n * n],
        entries: vec![0; n * n],
        scratch: Vec::with_capacity(n * n),
    };
    let acc = fold_chunks(
        exec,
        config.trials,
        CHUNK,
        fresh,
        |mut acc, t| {
            match config.mode {
                TrialMode::MonteCarlo => {
                    let mut rng = RngStream::new(config.master_seed, t).rng();
                    acc.idx.iter_mut().for_each(|i| *i = config.dist.sample_index(&mut rng));
                }
                TrialMode::Enumerate => {
                    let mut rest = t;
                    for i in acc.idx.iter_mut() {
                        *i = (rest % support as u64) as usize;
                        rest /= support as u64;
                    }
                }
            }
            let Acc { main, alt, paths, idx, entries, scratch } = &mut acc;
            entries.iter_mut().zip(idx.iter()).for_each(|(e, &i)| *e = main_vals[i]);
            let (rank, path) = engine.rank_i64_with(entries, n, n, scratch);
            paths.add(path);
            main.counts[n - rank] += 1;
            main.trials += 1;
            if let Some(alt) = alt {
                entries.iter_mut().zip(idx.iter()).for_each(|(e, &i)| *e = alt_vals[i]);
                let (rank, path) = engine.rank_i64_with(entries, n, n, scratch);
                paths.add(path);
                alt.counts[n - rank] += 1;
                alt.trials += 1;
            }
            acc
        },
        |mut a, b| {
            a.main.merge(&b.main);
            if let (Some(x), Some(y)) = (a.alt.as_mut(), b.alt.as_ref()) {
                x.merge(y);
            }
            a.paths.merge(&b.paths);
            a
        },
    );
    Ok(RankTrialResult { config: config.clone(), primes: engine.primes, histogram: acc.main, alternate: acc.alt, paths: acc.paths })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn enumeration_small_cases() {
        let r = estimate_deficiency(&RankTrialConfig::enumerate(DistributionSpec::rademacher(), 2, 2).unwrap(), Execution::Sequential).unwrap();
        assert_eq!(r.histogram.counts, vec![8, 8, 0]);
        assert_eq!(r.histogram.p_hat(1), 0.5);
        let b = DistributionSpec::bernoulli(0.5).unwrap();
        let r = estimate_deficiency(&RankTrialConfig::enumerate(b, 2, 2).unwrap(), Execution::Sequential).unwrap();
        assert_eq!(r.histogram.at_least(1), 10);
        assert_eq!(r.histogram.at_least(2), 1);
    }

    #[test]
    fn sign_matrices_are_never_zero() {
        let cfg = RankTrialConfig::new(DistributionSpec::rademacher(), 3, 3, 2000, 5);
        let r = estimate_deficiency(&cfg, Execution::Sequential).unwrap();
        assert_eq!(r.histogram.at_least(3), 0);
        assert!(r.histogram.is_monotone());
        assert_eq!(r.histogram.trials, 2000);
    }

    #[test]
    fn sequential_equals_parallel() {
        let mut cfg = RankTrialConfig::new(DistributionSpec::bernoulli(0.5).unwrap(), 4, 3, 10_000, 9);
        cfg.record_both = true;
        let a = estimate_deficiency(&cfg, Execution::Sequential).unwrap();
        let b = estimate_deficiency(&cfg, Execution::Parallel).unwrap();
        assert_eq!(a, b);
        // centered Bernoulli(1/2) is a multiple of a sign matrix: rank-one
        // perturbation moves the deficiency by at most one
        assert!(a.alternate.is_some());
    }

    #[test]
    fn rejects_bad_configs() {
        let d = DistributionSpec::rademacher();
        assert!(RankTrialConfig::new(d.clone(), 3, 4, 10, 0).validate().is_err());
        assert!(RankTrialConfig::new(d.clone(), 3, 0, 10, 0).validate().is_err());
        assert!(RankTrialConfig::new(d.clone(), 3, 1, 0, 0).validate().is_err());
        assert!(RankTrialConfig::enumerate(d, 6, 1).is_err());
    }
}
