use rand::seq::index;
use serde::{Deserialize, Serialize};

use super::deficiency::run_primes;
use crate::dist::DistributionSpec;
use crate::error::{invalid, Error, Result};
use crate::matrix::{exact_rank, sample_int_matrix, IntMatrix};
use crate::par::{map_indexed, Execution};
use crate::rng::RngStream;

/// Largest number of column subsets an exhaustive audit may visit.
pub const QGT_EXHAUSTIVE_BUDGET: u64 = 1_000_000;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct QgtConfig {
    /// Rows of the design, and the size of each column subset.
    pub m: usize,
    /// Columns of the design.
    pub n: usize,
    pub q: f64,
    /// Rows forced to agree in the adversarial construction.
    pub k_probe: usize,
    pub sample_submatrices: u64,
    pub exhaustive: bool,
    /// Constant `C_q` of the threshold `ceil(C_q ln n)`.
    pub c_q: f64,
    pub master_seed: u64,
}

impl QgtConfig {
    pub fn validate(&self) -> Result<()> {
        if self.m == 0 || self.m > self.n {
            return Err(invalid(format!("need 1 <= m <= n, got m = {}, n = {}", self.m, self.n)));
        }
        if !(self.q > 0.0 && self.q < 1.0) {
            return Err(invalid(format!("q must lie in (0, 1), got {}", self.q)));
        }
        if !(self.c_q > 0.0) {
            return Err(invalid("C_q must be positive"));
        }
        if self.exhaustive {
            let c = binomial(self.n as u64, self.m as u64);
            if c.is_none_or(|c| c > QGT_EXHAUSTIVE_BUDGET) {
                return Err(Error::BudgetExceeded(format!("C({}, {}) column subsets exceed {QGT_EXHAUSTIVE_BUDGET}", self.n, self.m)));
            }
        } else if self.sample_submatrices == 0 {
            return Err(invalid("sample_submatrices must be at least 1"));
        }
        Ok(())
    }

    /// `ceil(C_q ln n)`.
    pub fn threshold(&self) -> usize {
        (self.c_q * (self.n as f64).ln()).ceil() as usize
    }
}

fn binomial(n: u64, k: u64) -> Option<u64> {
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc * (n - i) as u128 / (i + 1) as u128;
        if acc > u64::MAX as u128 {
            return None;
        }
    }
    Some(acc as u64)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct QgtReport {
    pub m: usize,
    pub n: usize,
    pub subsets: u64,
    pub min_rank: usize,
    pub max_deficiency: usize,
    /// `counts[d]`: subsets with `m - rank = d`.
    pub deficiency_counts: Vec<u64>,
    pub threshold: usize,
    pub within_threshold: bool,
    pub worst_columns: Vec<usize>,
}

/// Samples a Bernoulli(q) design `A` (`m x n`) and audits its `m x m`
/// column submatrices.
pub fn qgt_min_rank(config: &QgtConfig, exec: Execution) -> Result<QgtReport> {
    config.validate()?;
    let a = sample_int_matrix(&DistributionSpec::bernoulli(config.q)?, config.m, config.n, RngStream::new(config.master_seed, 0))?;
    qgt_min_rank_on(&a, config, exec)
}

/// Minimum rank over sampled (or all) `m`-column subsets of a given design.
/// Ranks are over the rationals.
pub fn qgt_min_rank_on(a: &IntMatrix, config: &QgtConfig, exec: Execution) -> Result<QgtReport> {
    config.validate()?;
    let (m, n) = (config.m, config.n);
    if a.rows() != m || a.cols() != n {
        return Err(Error::DimensionMismatch(format!("design is {}x{}, config says {m}x{n}", a.rows(), a.cols())));
    }
    let entries = a.to_i64().ok_or_else(|| invalid("design entries must fit in i64"))?;
    let subsets: Vec<Vec<usize>> = if config.exhaustive {
        combinations(n, m)
    } else {
        let base = RngStream::new(config.master_seed, 1);
        map_indexed(exec, config.sample_submatrices as usize, |s| {
            let mut cols = index::sample(&mut base.child(s as u64).rng(), n, m).into_vec();
            cols.sort_unstable();
            cols
        })
    };
    let engine = run_primes(config.master_seed);
    let entries = &entries;
    let ranks = map_indexed(exec, subsets.len(), |s| {
        let cols = &subsets[s];
        let sub: Vec<i64> = (0..m).flat_map(|r| cols.iter().map(move |&c| entries[r * n + c])).collect();
        engine.rank_i64(&sub, m, m).0
    });
    let mut deficiency_counts = vec![0u64; m + 1];
    let mut worst = 0;
    for (i, &r) in ranks.iter().enumerate() {
        deficiency_counts[m - r] += 1;
        if r < ranks[worst] {
            worst = i;
        }
    }
    let min_rank = ranks[worst];
    let threshold = config.threshold();
    Ok(QgtReport {
        m,
        n,
        subsets: subsets.len() as u64,
        min_rank,
        max_deficiency: m - min_rank,
        deficiency_counts,
        threshold,
        within_threshold: m - min_rank <= threshold,
        worst_columns: subsets[worst].clone(),
    })
}

/// All `m`-subsets of `0..n` in lexicographic order.
fn combinations(n: usize, m: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut c: Vec<usize> = (0..m).collect();
    loop {
        out.push(c.clone());
        let Some(i) = (0..m).rev().find(|&i| c[i] < n - m + i) else { break };
        c[i] += 1;
        for j in i + 1..m {
            c[j] = c[j - 1] + 1;
        }
    }
    out
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AdversarialReport {
    pub k: usize,
    /// Columns whose first `k` entries are all one.
    pub j: Vec<usize>,
    pub j_size: usize,
    pub reaches_m: bool,
    /// `m - rank` of the submatrix on the first `m` columns of `J`.
    pub deficiency: Option<usize>,
    /// `deficiency >= k - 1` (the first `k` rows of that submatrix coincide).
    pub planted_ok: Option<bool>,
}

/// The set `J` of columns that are all ones on the first `k` rows, and the
/// rank of the design restricted to `m` of them.
pub fn qgt_adversarial(a: &IntMatrix, k: usize) -> Result<AdversarialReport> {
    let m = a.rows();
    if k == 0 || k >= m {
        return Err(invalid(format!("need 1 <= k < m, got k = {k}, m = {m}")));
    }
    let one = num_bigint::BigInt::from(1);
    let j: Vec<usize> = (0..a.cols()).filter(|&c| (0..k).all(|r| *a.get(r, c) == one)).collect();
    let reaches_m = j.len() >= m;
    let deficiency = if reaches_m { Some(m - exact_rank(&a.select_columns(&j[..m])?)) } else { None };
    Ok(AdversarialReport { k, j_size: j.len(), j, reaches_m, deficiency, planted_ok: deficiency.map(|d| d + 1 >= k) })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AdversarialFrequency {
    pub m: usize,
    pub n: usize,
    pub q: f64,
    pub k: usize,
    pub matrices: u64,
    /// Designs with `|J| >= m`.
    pub reached: u64,
    pub frequency: f64,
    /// `n q^k`.
    pub expected_j: f64,
    /// `n q^k >= 10 m`.
    pub sizing_ok: bool,
    /// `P(Bin(n, q^k) >= m)`.
    pub binomial_tail: f64,
    /// Every design with `|J| >= m` had deficiency at least `k - 1`.
    pub planted_ok: bool,
}

/// Runs the adversarial construction on `matrices` independent designs.
pub fn adversarial_frequency(config: &QgtConfig, matrices: u64, exec: Execution) -> Result<AdversarialFrequency> {
    config.validate()?;
    let QgtConfig { m, n, q, k_probe: k, master_seed, .. } = *config;
    let dist = DistributionSpec::bernoulli(q)?;
    let base = RngStream::new(master_seed, 2);
    let reports = map_indexed(exec, matrices as usize, |t| {
        sample_int_matrix(&dist, m, n, base.child(t as u64)).and_then(|a| qgt_adversarial(&a, k))
    })
    .into_iter()
    .collect::<Result<Vec<_>>>()?;
    let reached = reports.iter().filter(|r| r.reaches_m).count() as u64;
    let planted_ok = reports.iter().all(|r| r.planted_ok.unwrap_or(true));
    let pk = q.powi(k as i32);
    let expected_j = n as f64 * pk;
    Ok(AdversarialFrequency {
        m,
        n,
        q,
        k,
        matrices,
        reached,
        frequency: reached as f64 / matrices.max(1) as f64,
        expected_j,
        sizing_ok: expected_j >= 10.0 * m as f64,
        binomial_tail: binomial_upper_tail(n as u64, pk, m as u64),
        planted_ok,
    })
}

/// `P(Bin(n, p) >= m)`, summing the lower terms in log space.
fn binomial_upper_tail(n: u64, p: f64, m: u64) -> f64 {
    let mut log_term = n as f64 * (-p).ln_1p();
    let ratio = (p / (1.0 - p)).ln();
    let mut below = 0.0;
    for j in 0..m.min(n + 1) {
        below += log_term.exp();
        log_term += ((n - j) as f64 / (j + 1) as f64).ln() + ratio;
    }
    (1.0 - below).clamp(0.0, 1.0)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cfg(m: usize, n: usize) -> QgtConfig {
        QgtConfig { m, n, q: 0.5, k_probe: 2, sample_submatrices: 50, exhaustive: false, c_q: 4.0, master_seed: 3 }
    }

    #[test]
    fn square_design_has_one_subset() {
        let mut c = cfg(6, 6);
        c.exhaustive = true;
        let a = sample_int_matrix(&DistributionSpec::bernoulli(0.5).unwrap(), 6, 6, RngStream::new(1, 1)).unwrap();
        let r = qgt_min_rank_on(&a, &c, Execution::Sequential).unwrap();
        assert_eq!(r.subsets, 1);
        assert_eq!(r.min_rank, exact_rank(&a));
    }

    #[test]
    fn duplicated_columns_are_detected() {
        let mut rows = vec![vec![0i64; 5]; 3];
        for (r, row) in rows.iter_mut().enumerate() {
            row[0] = 1;
            row[1] = 1;
            row[2 + r] = 1;
        }
        let a = IntMatrix::from_rows(&rows).unwrap();
        let mut c = cfg(3, 5);
        c.exhaustive = true;
        let r = qgt_min_rank_on(&a, &c, Execution::Sequential).unwrap();
        assert_eq!(r.subsets, 10);
        assert!(r.max_deficiency >= 1);
        assert_eq!(r.deficiency_counts.iter().sum::<u64>(), 10);
    }

    #[test]
    fn all_ones_rows_give_full_j() {
        let m = 5;
        let n = 9;
        let k = 3;
        let rows: Vec<Vec<i64>> = (0..m).map(|r| (0..n).map(|c| if r < k { 1 } else { ((r * c) % 2) as i64 }).collect()).collect();
        let a = IntMatrix::from_rows(&rows).unwrap();
        let rep = qgt_adversarial(&a, k).unwrap();
        assert_eq!(rep.j, (0..n).collect::<Vec<_>>());
        assert!(rep.reaches_m);
        assert!(rep.deficiency.unwrap() + 1 >= k);
        assert!(qgt_adversarial(&a, m).is_err());
    }

    #[test]
    fn combinations_count() {
        assert_eq!(combinations(5, 2).len(), 10);
        assert_eq!(combinations(4, 4), vec![vec![0, 1, 2, 3]]);
        assert_eq!(binomial(60, 12), Some(1_399_358_844_975));
    }

    #[test]
    fn binomial_tail_values() {
        assert!((binomial_upper_tail(4, 0.5, 1) - 15.0 / 16.0).abs() < 1e-14);
        assert!((binomial_upper_tail(4, 0.5, 4) - 1.0 / 16.0).abs() < 1e-14);
        assert_eq!(binomial_upper_tail(4, 0.5, 0), 1.0);
    }
}
