use std::collections::BTreeMap;

use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use super::deficiency::enumeration_size;
use crate::dist::DistributionSpec;
use crate::error::{invalid, Result};
use crate::matrix::{is_prime, HybridRank};
use crate::par::{fold_chunks, Execution};

/// Largest number of matrices an exhaustive run may visit.
pub const ENUMERATION_BUDGET: u64 = 1 << 32;

const MAX_N: usize = 4;

/// Exact deficiency law of an `n x n` matrix with i.i.d. integer entries.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExactDeficiency {
    pub n: usize,
    pub centered: bool,
    pub support: usize,
    pub matrices: u64,
    /// Number of matrices with deficiency `d`, unweighted.
    pub matrix_counts: Vec<u64>,
    /// `P(n - rank = d)` as exact rationals.
    #[serde(with = "rational_strings")]
    pub probabilities: Vec<BigRational>,
}

impl ExactDeficiency {
    /// `P(rank <= n - k)`.
    pub fn at_least(&self, k: usize) -> BigRational {
        self.probabilities.iter().skip(k).fold(BigRational::zero(), |s, p| s + p)
    }
}

mod rational_strings {
    use num_rational::BigRational;
    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    pub fn serialize<S: Serializer>(v: &[BigRational], s: S) -> Result<S::Ok, S::Error> {
        v.iter().map(|r| r.to_string()).collect::<Vec<_>>().serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<BigRational>, D::Error> {
        Vec::<String>::deserialize(d)?
            .iter()
            .map(|t| t.parse().map_err(|e| serde::de::Error::custom(format!("bad rational `{t}`: {e}"))))
            .collect()
    }
}

/// Deterministic prime pair for enumeration: the two largest primes below
/// 2^61.
fn fixed_engine() -> HybridRank {
    let mut found = Vec::with_capacity(2);
    let mut c = (1u64 << 61) - 1;
    while found.len() < 2 {
        if is_prime(c) {
            found.push(c);
        }
        c -= 2;
    }
    HybridRank::new([found[0], found[1]]).expect("primes")
}

pub fn exhaustive_deficiency(dist: &DistributionSpec, n: usize) -> Result<ExactDeficiency> {
    exhaustive_deficiency_with(dist, n, false, Execution::default())
}

/// Visits all `|support|^(n^2)` matrices and weights each deficiency by
/// `prod_i p_i^{c_i}`, where `c_i` counts the entries equal to atom `i`.
pub fn exhaustive_deficiency_with(dist: &DistributionSpec, n: usize, centered: bool, exec: Execution) -> Result<ExactDeficiency> {
    if n == 0 || n > MAX_N {
        return Err(invalid(format!("exhaustive enumeration needs 1 <= n <= {MAX_N}, got {n}")));
    }
    let values = if centered { dist.centered_integer_values()? } else { dist.integer_values()? };
    let support = values.len();
    let total = enumeration_size(support, n)?;
    let engine = fixed_engine();
    let nn = n * n;
    // key: (deficiency, atom counts) -> number of matrices
    type Tally = BTreeMap<(usize, Vec<u8>), u64>;
    let tally = fold_chunks(
        exec,
        total,
        1 << 14,
        || (Tally::new(), vec![0i64; nn], vec![0u8; support], Vec::with_capacity(nn)),
        |(mut tally, mut entries, mut counts, mut scratch), t| {
            counts.iter_mut().for_each(|c| *c = 0);
            let mut rest = t;
            for e in entries.iter_mut() {
                let i = (rest % support as u64) as usize;
                rest /= support as u64;
                *e = values[i];
                counts[i] += 1;
            }
            let (rank, _) = engine.rank_i64_with(&entries, n, n, &mut scratch);
            *tally.entry((n - rank, counts.clone())).or_insert(0) += 1;
            (tally, entries, counts, scratch)
        },
        |(mut a, e, c, s), (b, _, _, _)| {
            for (k, v) in b {
                *a.entry(k).or_insert(0) += v;
            }
            (a, e, c, s)
        },
    )
    .0;
    let probs = dist.exact_probs();
    let mut matrix_counts = vec![0u64; n + 1];
    let mut probabilities = vec![BigRational::zero(); n + 1];
    for ((d, counts), m) in tally {
        matrix_counts[d] += m;
        let w = counts
            .iter()
            .zip(&probs)
            .fold(BigRational::one(), |acc, (&c, p)| acc * num_traits::pow(p.clone(), c as usize));
        probabilities[d] += w * BigRational::from_integer(m.into());
    }
    Ok(ExactDeficiency { n, centered, support, matrices: total, matrix_counts, probabilities })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn r(a: i64, b: i64) -> BigRational {
        BigRational::new(a.into(), b.into())
    }

    #[test]
    fn rademacher_small() {
        let d = DistributionSpec::rademacher();
        let e = exhaustive_deficiency(&d, 2).unwrap();
        assert_eq!(e.matrix_counts, vec![8, 8, 0]);
        assert_eq!(e.at_least(1), r(1, 2));
        let e = exhaustive_deficiency(&d, 3).unwrap();
        assert_eq!(e.matrix_counts, vec![192, 288, 32, 0]);
        assert_eq!(e.at_least(1), r(320, 512));
    }

    #[test]
    fn bernoulli_small() {
        let d = DistributionSpec::bernoulli(0.5).unwrap();
        assert_eq!(exhaustive_deficiency(&d, 1).unwrap().at_least(1), r(1, 2));
        let e = exhaustive_deficiency(&d, 2).unwrap();
        assert_eq!(e.matrix_counts, vec![6, 9, 1]);
        assert_eq!(e.at_least(1), r(10, 16));
    }

    #[test]
    fn weights_follow_atom_probabilities() {
        // Bernoulli(1/4), n = 1: singular iff the entry is 0
        let d = DistributionSpec::bernoulli(0.25).unwrap();
        let e = exhaustive_deficiency(&d, 1).unwrap();
        assert_eq!(e.at_least(1), r(3, 4));
        let e = exhaustive_deficiency(&d, 2).unwrap();
        let total = e.probabilities.iter().fold(BigRational::zero(), |s, p| s + p);
        assert_eq!(total, r(1, 1));
    }

    #[test]
    fn budget_and_size_limits() {
        let d = DistributionSpec::uniform_int(3).unwrap();
        assert!(matches!(exhaustive_deficiency(&d, 4), Err(crate::Error::BudgetExceeded(_))));
        assert!(exhaustive_deficiency(&DistributionSpec::rademacher(), 5).is_err());
    }
}
