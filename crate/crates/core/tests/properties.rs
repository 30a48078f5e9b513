use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use ranklab::bounds::{lattice_ball_bound, lattice_ball_count};
use ranklab::experiments::DeficiencyHistogram;
use ranklab::geometry::{ao_check, classify, dist_to_sparse, Compressibility, SparsityParams};
use ranklab::lcd::dist_to_lattice;
use ranklab::matrix::{exact_rank, hs_norm, modular_rank, op_norm, singular_values, HybridRank};
use ranklab::par::{fold_chunks, map_indexed};
use ranklab::rounding::{random_round_with, sparse_round_with};
use ranklab::stats::{wilson_interval, Z95};
use ranklab::{Execution, IntMatrix, RealMatrix};

/// Two fixed primes just below 2^61.
const PRIMES: [u64; 2] = [2_305_843_009_213_693_951, 2_305_843_009_213_693_921];

fn int_matrix(max_dim: usize, bound: i64) -> impl Strategy<Value = IntMatrix> {
    (1..=max_dim, 1..=max_dim).prop_flat_map(move |(r, c)| {
        prop::collection::vec(-bound..=bound, r * c).prop_map(move |e| IntMatrix::from_i64(r, c, &e).unwrap())
    })
}

/// Matrices of low rank: products of thin random factors.
fn low_rank_matrix() -> impl Strategy<Value = IntMatrix> {
    (1usize..=7, 1usize..=7, 1usize..=3).prop_flat_map(|(r, c, k)| {
        (prop::collection::vec(-3i64..=3, r * k), prop::collection::vec(-3i64..=3, k * c)).prop_map(move |(a, b)| {
            let e: Vec<i64> = (0..r * c).map(|ij| (0..k).map(|t| a[(ij / c) * k + t] * b[t * c + ij % c]).sum()).collect();
            IntMatrix::from_i64(r, c, &e).unwrap()
        })
    })
}

fn real_matrix(max_dim: usize) -> impl Strategy<Value = RealMatrix> {
    (1..=max_dim, 1..=max_dim).prop_flat_map(|(r, c)| {
        prop::collection::vec(-10.0f64..10.0, r * c).prop_map(move |d| RealMatrix::new(r, c, d).unwrap())
    })
}

fn vector(max_len: usize) -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(-5.0f64..5.0, 1..=max_len)
}

fn unit_vector(max_len: usize) -> impl Strategy<Value = Vec<f64>> {
    vector(max_len).prop_filter_map("nonzero", |v| {
        let n = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        (n > 1e-6).then(|| v.iter().map(|x| x / n).collect())
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn rank_is_transpose_invariant(a in int_matrix(8, 4)) {
        prop_assert_eq!(exact_rank(&a), exact_rank(&a.transpose()));
    }

    #[test]
    fn rank_is_invariant_under_row_operations(a in int_matrix(7, 3), i in 0usize..7, j in 0usize..7, c in -5i64..=5) {
        let rows = a.rows();
        let (i, j) = (i % rows, j % rows);
        let mut e = a.to_i64().unwrap();
        if i != j {
            for col in 0..a.cols() {
                e[i * a.cols() + col] += c * e[j * a.cols() + col];
            }
        } else {
            // Scaling by a nonzero integer.
            let s = if c == 0 { 2 } else { c };
            for col in 0..a.cols() {
                e[i * a.cols() + col] *= s;
            }
        }
        let b = IntMatrix::from_i64(rows, a.cols(), &e).unwrap();
        prop_assert_eq!(exact_rank(&a), exact_rank(&b));
    }

    #[test]
    fn modular_rank_never_exceeds_exact_rank(a in int_matrix(8, 50), p in prop::sample::select(vec![2u64, 3, 5, 7, 101, PRIMES[0]])) {
        prop_assert!(modular_rank(&a, p).unwrap() <= exact_rank(&a));
    }

    #[test]
    fn hybrid_rank_is_exact(a in int_matrix(9, 3)) {
        let engine = HybridRank::new(PRIMES).unwrap();
        prop_assert_eq!(engine.rank(&a).0, exact_rank(&a));
    }

    #[test]
    fn hybrid_rank_is_exact_on_low_rank_products(a in low_rank_matrix()) {
        let engine = HybridRank::new(PRIMES).unwrap();
        let r = exact_rank(&a);
        prop_assert_eq!(engine.rank(&a).0, r);
        prop_assert!(r <= 3);
    }

    #[test]
    fn singular_values_are_sorted_and_match_norms(a in real_matrix(8)) {
        let s = singular_values(&a).unwrap();
        prop_assert_eq!(s.len(), a.rows().min(a.cols()));
        prop_assert!(s.windows(2).all(|w| w[0] >= w[1]));
        prop_assert!(s.iter().all(|&x| x >= 0.0));
        let hs = s.iter().map(|x| x * x).sum::<f64>().sqrt();
        prop_assert!((hs - hs_norm(&a)).abs() <= 1e-9 * (1.0 + hs));
        let op = op_norm(&a, 1e-12).unwrap();
        prop_assert!((op - s[0]).abs() <= 1e-6 * (1.0 + op));
        prop_assert!(op <= hs_norm(&a) + 1e-9);
    }

    #[test]
    fn dist_to_sparse_is_monotone(x in vector(20)) {
        let n = x.len();
        let norm = x.iter().map(|v| v * v).sum::<f64>().sqrt();
        let d: Vec<f64> = (0..=n + 1).map(|s| dist_to_sparse(&x, s)).collect();
        prop_assert!((d[0] - norm).abs() <= 1e-12 * (1.0 + norm));
        prop_assert!(d.windows(2).all(|w| w[1] <= w[0]));
        prop_assert_eq!(d[n], 0.0);
        prop_assert_eq!(d[n + 1], 0.0);
    }

    #[test]
    fn classification_agrees_with_distance(x in unit_vector(16), s in 1usize..16, tau in 0.01f64..1.5) {
        prop_assume!(s <= x.len());
        let c = classify(&x, SparsityParams::new(s, tau).unwrap()).unwrap();
        let compressible = dist_to_sparse(&x, s) <= tau;
        prop_assert_eq!(c == Compressibility::Compressible, compressible);
    }

    #[test]
    fn random_round_is_on_grid_and_close(x in vector(30), delta in 0.01f64..2.0, seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let p = random_round_with(&x, delta, &mut rng).unwrap();
        prop_assert_eq!(p.pitch, delta);
        for (v, xi) in p.values().iter().zip(&x) {
            prop_assert!((v - xi).abs() <= delta * (1.0 + 1e-12));
        }
    }

    #[test]
    fn sparse_round_is_close(x in unit_vector(30), tau in 0.05f64..0.95, seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let p = sparse_round_with(&x, tau, &mut rng).unwrap();
        let vals = p.values();
        prop_assert_eq!(vals.len(), x.len());
        prop_assert!((p.pitch - tau / (x.len() as f64).sqrt()).abs() <= 1e-15);
        for (v, xi) in vals.iter().zip(&x) {
            prop_assert!((v - xi).abs() <= p.pitch * (1.0 + 1e-12));
        }
    }

    #[test]
    fn lattice_distance_is_periodic_and_bounded(y in vector(12), shift in prop::collection::vec(-4i32..=4, 12)) {
        let d = dist_to_lattice(&y);
        prop_assert!(d <= (y.len() as f64).sqrt() / 2.0 + 1e-12);
        let moved: Vec<f64> = y.iter().zip(&shift).map(|(a, s)| a + f64::from(*s)).collect();
        prop_assert!((dist_to_lattice(&moved) - d).abs() <= 1e-9);
    }

    #[test]
    fn axis_vectors_are_almost_orthogonal_for_any_nu(n in 1usize..10, nu in 0.0f64..0.9) {
        let vecs: Vec<Vec<f64>> = (0..n).map(|i| { let mut e = vec![0.0; n]; e[i] = 3.0; e }).collect();
        let sys = ao_check(&vecs, nu).unwrap();
        prop_assert!(sys.is_certified());
        prop_assert!((sys.s_min - 1.0).abs() < 1e-9 && (sys.s_max - 1.0).abs() < 1e-9);
    }

    /// `C = 2` is too small in low dimension (n = 4, R = sqrt 15 has 1257
    /// points against a bound of 1189.7); `C = 3` covers n <= 4, R <= 20.
    #[test]
    fn lattice_count_below_bound(n in 1usize..=4, r in 0.0f64..20.0) {
        let count = lattice_ball_count(n, r).unwrap() as f64;
        let bound = lattice_ball_bound(n, r, 3.0).unwrap();
        prop_assert!(count.ln() <= bound.log_value.as_f64() + 1e-12);
    }

    #[test]
    fn wilson_interval_brackets_estimate(trials in 1u64..100_000, frac in 0.0f64..=1.0) {
        let s = ((trials as f64) * frac).floor() as u64;
        let (lo, hi) = wilson_interval(s, trials, Z95);
        let p = s as f64 / trials as f64;
        prop_assert!((0.0..=1.0).contains(&lo) && (0.0..=1.0).contains(&hi));
        prop_assert!(lo <= p + 1e-12 && p <= hi + 1e-12);
    }

    #[test]
    fn deficiency_tail_is_monotone(counts in prop::collection::vec(0u64..1000, 1..8)) {
        let n = counts.len() - 1;
        let mut h = DeficiencyHistogram::new(n, false);
        h.trials = counts.iter().sum();
        h.counts = counts;
        prop_assert!(h.is_monotone());
        prop_assert!((0..n).all(|k| h.at_least(k) >= h.at_least(k + 1)));
    }

    #[test]
    fn parallel_fold_equals_sequential(len in 0u64..5000, chunk in 1u64..300) {
        let f = |exec| fold_chunks(exec, len, chunk, Vec::new, |mut acc: Vec<u64>, i| { acc.push(i * i % 97); acc }, |mut a, b| { a.extend(b); a });
        let seq = f(Execution::Sequential);
        prop_assert_eq!(seq.len() as u64, len);
        prop_assert_eq!(seq, f(Execution::Parallel));
        let m = |exec| map_indexed(exec, len as usize, |i| i * 3);
        prop_assert_eq!(m(Execution::Sequential), m(Execution::Parallel));
    }
}
