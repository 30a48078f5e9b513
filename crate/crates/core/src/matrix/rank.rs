//! Rank over the rationals (fraction-free elimination) and over prime fields.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{Signed, ToPrimitive, Zero};
use rand::Rng;
use serde::{Deserialize, Serialize};

use super::IntMatrix;
use crate::error::{Error, Result};

/// Rank over Q by Bareiss fraction-free elimination.
///
/// Pivot: largest absolute value in the current column, lowest row index on
/// ties. Every intermediate entry is a minor of the input, so all divisions
/// are exact.
pub fn exact_rank(a: &IntMatrix) -> usize {
    bareiss_rank(a.entries().to_vec(), a.rows(), a.cols())
}

pub fn exact_rank_i64(entries: &[i64], rows: usize, cols: usize) -> usize {
    assert_eq!(entries.len(), rows * cols, "shape");
    bareiss_rank(entries.iter().map(|&x| BigInt::from(x)).collect(), rows, cols)
}

fn bareiss_rank(mut m: Vec<BigInt>, rows: usize, cols: usize) -> usize {
    let mut prev = BigInt::from(1);
    let mut rank = 0;
    for c in 0..cols {
        if rank == rows {
            break;
        }
        let mut best: Option<usize> = None;
        for r in rank..rows {
            let v = &m[r * cols + c];
            if v.is_zero() {
                continue;
            }
            match best {
                Some(b) if m[b * cols + c].abs() >= v.abs() => {}
                _ => best = Some(r),
            }
        }
        let Some(p) = best else { continue };
        if p != rank {
            for j in 0..cols {
                m.swap(p * cols + j, rank * cols + j);
            }
        }
        let pivot = m[rank * cols + c].clone();
        for r in rank + 1..rows {
            let factor = m[r * cols + c].clone();
            for j in c + 1..cols {
                let v = &pivot * &m[r * cols + j] - &factor * &m[rank * cols + j];
                let (q, rem) = v.div_rem(&prev);
                debug_assert!(rem.is_zero(), "Bareiss division must be exact");
                m[r * cols + j] = q;
            }
            m[r * cols + c] = BigInt::zero();
        }
        prev = pivot;
        rank += 1;
    }
    rank
}

/// Deterministic Miller–Rabin for all 64-bit integers.
pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    const BASES: [u64; 12] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37];
    for &b in &BASES {
        if n.is_multiple_of(b) {
            return n == b;
        }
    }
    let s = (n - 1).trailing_zeros();
    let d = (n - 1) >> s;
    'witness: for &a in &BASES {
        let mut x = pow_mod(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mul_mod(x, x, n);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

#[inline]
fn mul_mod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

fn pow_mod(mut b: u64, mut e: u64, m: u64) -> u64 {
    let mut acc = 1 % m;
    b %= m;
    while e > 0 {
        if e & 1 == 1 {
            acc = mul_mod(acc, b, m);
        }
        b = mul_mod(b, b, m);
        e >>= 1;
    }
    acc
}

/// Uniformly random odd prime in `[2^(bits-1), 2^bits)`, `3 <= bits <= 63`.
pub fn random_prime<R: Rng + ?Sized>(rng: &mut R, bits: u32) -> u64 {
    assert!((3..=63).contains(&bits), "bits out of range");
    let lo = 1u64 << (bits - 1);
    loop {
        let c = (rng.random_range(lo..lo << 1)) | 1;
        if is_prime(c) {
            return c;
        }
    }
}

/// Montgomery arithmetic for an odd modulus below 2^63.
#[derive(Clone, Copy, Debug)]
struct Montgomery {
    p: u64,
    neg_inv: u64,
}

impl Montgomery {
    fn new(p: u64) -> Self {
        debug_assert!(p % 2 == 1 && p < 1 << 63);
        let mut inv = p;
        for _ in 0..6 {
            inv = inv.wrapping_mul(2u64.wrapping_sub(p.wrapping_mul(inv)));
        }
        Self { p, neg_inv: inv.wrapping_neg() }
    }

    /// `a * b * 2^-64 mod p`.
    #[inline(always)]
    fn mul(&self, a: u64, b: u64) -> u64 {
        let t = a as u128 * b as u128;
        let m = (t as u64).wrapping_mul(self.neg_inv);
        let u = ((t + m as u128 * self.p as u128) >> 64) as u64;
        if u >= self.p { u - self.p } else { u }
    }

    #[inline(always)]
    fn sub(&self, a: u64, b: u64) -> u64 {
        if a >= b { a - b } else { a + self.p - b }
    }
}

/// Rank over GF(p) of a matrix of residues in `[0, p)`. The buffer is
/// overwritten.
pub fn rank_mod_p(m: &mut [u64], rows: usize, cols: usize, p: u64) -> usize {
    assert_eq!(m.len(), rows * cols, "shape");
    if p == 2 {
        return rank_mod_small(m, rows, cols, 2);
    }
    let mont = Montgomery::new(p);
    let mut rank = 0;
    for c in 0..cols {
        if rank == rows {
            break;
        }
        let Some(piv) = (rank..rows).find(|&r| m[r * cols + c] != 0) else { continue };
        if piv != rank {
            for j in c..cols {
                m.swap(piv * cols + j, rank * cols + j);
            }
        }
        let pv = m[rank * cols + c];
        let (top, bottom) = m.split_at_mut((rank + 1) * cols);
        let prow = &top[rank * cols..];
        for row in bottom.chunks_exact_mut(cols) {
            let f = row[c];
            if f == 0 {
                continue;
            }
            // row <- (pv * row - f * prow) / 2^64: a unit multiple of a
            // fraction-free update, so zero patterns and rank are unchanged.
            for j in c + 1..cols {
                row[j] = mont.sub(mont.mul(pv, row[j]), mont.mul(f, prow[j]));
            }
            row[c] = 0;
        }
        rank += 1;
    }
    rank
}

fn rank_mod_small(m: &mut [u64], rows: usize, cols: usize, p: u64) -> usize {
    let mut rank = 0;
    for c in 0..cols {
        if rank == rows {
            break;
        }
        let Some(piv) = (rank..rows).find(|&r| !m[r * cols + c].is_multiple_of(p)) else { continue };
        for j in 0..cols {
            m.swap(piv * cols + j, rank * cols + j);
        }
        let inv = pow_mod(m[rank * cols + c], p - 2, p);
        for r in rank + 1..rows {
            let f = mul_mod(m[r * cols + c], inv, p);
            for j in c..cols {
                let sub = mul_mod(f, m[rank * cols + j], p);
                m[r * cols + j] = (m[r * cols + j] + p - sub) % p;
            }
        }
        rank += 1;
    }
    rank
}

/// Rank of `a` over the field with `prime` elements.
pub fn modular_rank(a: &IntMatrix, prime: u64) -> Result<usize> {
    if !is_prime(prime) || prime >= 1 << 63 {
        return Err(Error::NotPrime(prime));
    }
    let pb = BigInt::from(prime);
    let mut buf: Vec<u64> = a
        .entries()
        .iter()
        .map(|x| x.mod_floor(&pb).to_u64().expect("residue fits"))
        .collect();
    Ok(rank_mod_p(&mut buf, a.rows(), a.cols(), prime))
}

#[inline]
fn reduce_i64(x: i64, p: u64) -> u64 {
    (x as i128).rem_euclid(p as i128) as u64
}

/// log2 of a bound on |minor| for every square minor: the smaller of the
/// row-norm and column-norm Hadamard products, rows/columns of norm below 1
/// counted as 1.
pub fn hadamard_log2_bound(entries: &[i64], rows: usize, cols: usize) -> f64 {
    let row_sum: f64 = (0..rows)
        .map(|r| {
            let s: f64 = entries[r * cols..(r + 1) * cols].iter().map(|&x| (x as f64).powi(2)).sum();
            0.5 * s.max(1.0).log2()
        })
        .sum();
    let col_sum: f64 = (0..cols)
        .map(|c| {
            let s: f64 = (0..rows).map(|r| (entries[r * cols + c] as f64).powi(2)).sum();
            0.5 * s.max(1.0).log2()
        })
        .sum();
    row_sum.min(col_sum)
}

/// How a hybrid rank was settled.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum RankPath {
    /// Every minor is smaller than the first prime, so the modular rank is exact.
    Certified,
    /// Both primes returned the same rank.
    Agreed,
    /// The primes disagreed; exact elimination decided.
    Fallback,
}

/// Monte Carlo rank engine: two random ~61-bit primes, exact fallback.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct HybridRank {
    pub primes: [u64; 2],
}

impl HybridRank {
    pub fn new(primes: [u64; 2]) -> Result<Self> {
        for p in primes {
            if !is_prime(p) || !(3..1 << 63).contains(&p) {
                return Err(Error::NotPrime(p));
            }
        }
        Ok(Self { primes })
    }

    /// Two distinct random 61-bit primes.
    pub fn random<R: Rng + ?Sized>(rng: &mut R) -> Self {
        let a = random_prime(rng, 61);
        let b = loop {
            let b = random_prime(rng, 61);
            if b != a {
                break b;
            }
        };
        Self { primes: [a, b] }
    }

    pub fn rank_i64(&self, entries: &[i64], rows: usize, cols: usize) -> (usize, RankPath) {
        let mut scratch = Vec::with_capacity(entries.len());
        self.rank_i64_with(entries, rows, cols, &mut scratch)
    }

    /// As [`rank_i64`](Self::rank_i64) with a caller-owned scratch buffer.
    pub fn rank_i64_with(&self, entries: &[i64], rows: usize, cols: usize, scratch: &mut Vec<u64>) -> (usize, RankPath) {
        let [p1, p2] = self.primes;
        let mut run = |p: u64| {
            scratch.clear();
            scratch.extend(entries.iter().map(|&x| reduce_i64(x, p)));
            rank_mod_p(scratch, rows, cols, p)
        };
        let r1 = run(p1);
        if hadamard_log2_bound(entries, rows, cols) < (p1.min(p2) as f64).log2() - 1.0 {
            return (r1, RankPath::Certified);
        }
        let r2 = run(p2);
        if r1 == r2 {
            (r1, RankPath::Agreed)
        } else {
            (exact_rank_i64(entries, rows, cols), RankPath::Fallback)
        }
    }

    pub fn rank(&self, a: &IntMatrix) -> (usize, RankPath) {
        match a.to_i64() {
            Some(e) => self.rank_i64(&e, a.rows(), a.cols()),
            None => {
                let r1 = modular_rank(a, self.primes[0]).expect("validated prime");
                let r2 = modular_rank(a, self.primes[1]).expect("validated prime");
                if r1 == r2 {
                    (r1, RankPath::Agreed)
                } else {
                    (exact_rank(a), RankPath::Fallback)
                }
            }
        }
    }
}
