//! Unbiased random rounding onto scaled integer lattices, and the joint
//! rounding of an almost orthogonal tuple used to approximate kernel
//! vectors by net points.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};
use crate::geometry::{ao_check, AoSystem};
use crate::matrix::{norm2, RealMatrix};
use crate::par::{map_indexed, Execution};
use crate::rng::RngStream;

/// A point `pitch * coords` of the lattice `pitch Z^n`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LatticePoint {
    pub pitch: f64,
    pub coords: Vec<i64>,
}

impl LatticePoint {
    pub fn values(&self) -> Vec<f64> {
        self.coords.iter().map(|&c| c as f64 * self.pitch).collect()
    }

    pub fn support(&self) -> usize {
        self.coords.iter().filter(|&&c| c != 0).count()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "mode", rename_all = "snake_case")]
pub enum RoundingSpec {
    /// Pitch `delta`.
    Plain { delta: f64 },
    /// Pitch `tau / sqrt(n)`, magnitudes rounded toward zero first.
    Sparse { tau: f64 },
}

impl RoundingSpec {
    pub fn round<R: Rng + ?Sized>(&self, x: &[f64], rng: &mut R) -> Result<LatticePoint> {
        match *self {
            RoundingSpec::Plain { delta } => random_round_with(x, delta, rng),
            RoundingSpec::Sparse { tau } => sparse_round_with(x, tau, rng),
        }
    }
}

/// Quotients within this distance of an integer are treated as lattice
/// points, so inputs already on the grid round to themselves.
const SNAP: f64 = 1e-12;

fn check_input(x: &[f64], pitch: f64) -> Result<()> {
    if !(pitch.is_finite() && pitch > 0.0) {
        return Err(invalid(format!("lattice pitch must be positive, got {pitch}")));
    }
    if let Some(bad) = x.iter().find(|v| !v.is_finite() || (*v / pitch).abs() >= 9.0e15) {
        return Err(invalid(format!("coordinate {bad} cannot be rounded at pitch {pitch}")));
    }
    Ok(())
}

/// Rounds `|q|` down, then up with probability equal to the remainder.
fn round_magnitude<R: Rng + ?Sized>(q: f64, rng: &mut R) -> i64 {
    let m = q.abs();
    let floor = m.floor();
    let frac = m - floor;
    let mag = if frac <= SNAP {
        floor
    } else if 1.0 - frac <= SNAP || rng.random::<f64>() < frac {
        floor + 1.0
    } else {
        floor
    };
    if q < 0.0 { -(mag as i64) } else { mag as i64 }
}

/// Each coordinate goes to one of its two neighbours in `delta Z`, the upper
/// one with probability `(x_i - delta floor(x_i / delta)) / delta`, so the
/// result is unbiased and within `delta` of `x` coordinatewise.
pub fn random_round(x: &[f64], delta: f64, stream: RngStream) -> Result<LatticePoint> {
    random_round_with(x, delta, &mut stream.rng())
}

pub fn random_round_with<R: Rng + ?Sized>(x: &[f64], delta: f64, rng: &mut R) -> Result<LatticePoint> {
    check_input(x, delta)?;
    // Rounding |x| toward zero then away from zero with the remainder
    // probability is the same two-point law as floor/ceil on x itself.
    let coords = x.iter().map(|&xi| round_magnitude(xi / delta, rng)).collect();
    Ok(LatticePoint { pitch: delta, coords })
}

/// Rounding onto the `(tau / sqrt n)`-grid: magnitudes go down to the grid,
/// then one pitch up with the unbiasing probability. Coordinates smaller
/// than one pitch vanish unless promoted; `|v - x| <= tau` always.
pub fn sparse_round(x: &[f64], tau: f64, stream: RngStream) -> Result<LatticePoint> {
    sparse_round_with(x, tau, &mut stream.rng())
}

pub fn sparse_round_with<R: Rng + ?Sized>(x: &[f64], tau: f64, rng: &mut R) -> Result<LatticePoint> {
    if !(tau > 0.0 && tau < 1.0) {
        return Err(invalid(format!("tau must lie in (0, 1), got {tau}")));
    }
    if x.is_empty() {
        return Ok(LatticePoint { pitch: tau, coords: Vec::new() });
    }
    let pitch = tau / (x.len() as f64).sqrt();
    random_round_with(x, pitch, rng)
}

/// Measured margins of one joint rounding of a tuple.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ApproxRecord {
    pub try_index: u64,
    pub delta: f64,
    /// Threshold `2 K delta n` on `|B(u_j - v_j)|`.
    pub b_threshold: f64,
    pub rounded: Vec<LatticePoint>,
    /// `|u_j - v_j|_inf`.
    pub linf: Vec<f64>,
    /// `|B(u_j - v_j)|_2`.
    pub b_norms: Vec<f64>,
    /// Certificate of the rounded tuple at level `1/4`; `None` if some
    /// `u_j` rounded to zero.
    pub ao: Option<AoSystem>,
}

/// Slack on floating comparisons against `delta`.
const LINF_SLACK: f64 = 1e-12;

impl ApproxRecord {
    pub fn ao_ok(&self) -> bool {
        self.ao.as_ref().is_some_and(AoSystem::is_certified)
    }

    pub fn linf_ok(&self) -> bool {
        self.linf.iter().all(|&d| d <= self.delta * (1.0 + LINF_SLACK))
    }

    pub fn b_ok(&self) -> bool {
        self.b_norms.iter().all(|&d| d <= self.b_threshold)
    }

    pub fn accepted(&self) -> bool {
        self.ao_ok() && self.linf_ok() && self.b_ok()
    }

    /// Distance of the AO certificate from failing, positive when certified.
    pub fn ao_margin(&self) -> f64 {
        self.ao.as_ref().map_or(f64::NEG_INFINITY, |a| (a.s_min - (1.0 - a.nu)).min(1.0 + a.nu - a.s_max))
    }

    /// Recomputes every condition from the rounded points, independent of
    /// the values stored in the record.
    pub fn verify(&self, b: &RealMatrix, vectors: &[Vec<f64>], k_subgauss: f64) -> Result<bool> {
        if self.rounded.len() != vectors.len() {
            return Ok(false);
        }
        let n = b.cols() as f64;
        let threshold = 2.0 * k_subgauss * self.delta * n;
        let us: Vec<Vec<f64>> = self.rounded.iter().map(LatticePoint::values).collect();
        for (u, v) in us.iter().zip(vectors) {
            let diff: Vec<f64> = u.iter().zip(v).map(|(a, b)| a - b).collect();
            if diff.iter().any(|d| d.abs() > self.delta * (1.0 + LINF_SLACK)) {
                return Ok(false);
            }
            if norm2(&b.mul_vec(&diff)?) > threshold {
                return Ok(false);
            }
        }
        if us.iter().any(|u| norm2(u) == 0.0) {
            return Ok(false);
        }
        Ok(ao_check(&us, 0.25)?.is_certified())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "outcome", rename_all = "snake_case")]
pub enum ApproxOutcome {
    Accepted { record: ApproxRecord, tries: u64 },
    Exhausted { tries: u64, best_ao_margin: f64, best_b_norm: f64 },
}

/// Parameters shared by every try of [`approx_tuple`].
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ApproxConfig {
    pub delta: f64,
    /// Subgaussian constant `K` of the entries of `B`.
    pub k_subgauss: f64,
    pub max_tries: u64,
}

/// One joint rounding `u_j = random_round(v_j, delta)` of the tuple, drawn
/// from the child stream `try_index` of `stream`.
pub fn approx_trial(b: &RealMatrix, vectors: &[Vec<f64>], config: ApproxConfig, stream: RngStream, try_index: u64) -> Result<ApproxRecord> {
    let n = b.cols();
    if vectors.iter().any(|v| v.len() != n) {
        return Err(crate::Error::DimensionMismatch(format!("tuple vectors must have length {n}")));
    }
    let mut rng = stream.child(try_index).rng();
    let rounded = vectors
        .iter()
        .map(|v| random_round_with(v, config.delta, &mut rng))
        .collect::<Result<Vec<_>>>()?;
    let us: Vec<Vec<f64>> = rounded.iter().map(LatticePoint::values).collect();
    let mut linf = Vec::with_capacity(us.len());
    let mut b_norms = Vec::with_capacity(us.len());
    for (u, v) in us.iter().zip(vectors) {
        let diff: Vec<f64> = u.iter().zip(v).map(|(a, b)| a - b).collect();
        linf.push(diff.iter().fold(0.0f64, |m, d| m.max(d.abs())));
        b_norms.push(norm2(&b.mul_vec(&diff)?));
    }
    let ao = if us.iter().any(|u| norm2(u) == 0.0) { None } else { Some(ao_check(&us, 0.25)?) };
    Ok(ApproxRecord {
        try_index,
        delta: config.delta,
        b_threshold: 2.0 * config.k_subgauss * config.delta * n as f64,
        rounded,
        linf,
        b_norms,
        ao,
    })
}

const TRY_CHUNK: u64 = 32;

/// Rejection-samples joint roundings until one keeps the tuple
/// `1/4`-almost orthogonal, within `delta` in sup norm, and with
/// `|B(u_j - v_j)| <= 2 K delta n` for every `j`. Tries run in chunks; the
/// accepted try is always the lowest accepting index.
pub fn approx_tuple(b: &RealMatrix, vectors: &[Vec<f64>], config: ApproxConfig, stream: RngStream) -> Result<ApproxOutcome> {
    if !(config.delta > 0.0) || !(config.k_subgauss > 0.0) {
        return Err(invalid("delta and K must be positive"));
    }
    if vectors.is_empty() {
        return Err(invalid("empty tuple"));
    }
    let mut best_ao_margin = f64::NEG_INFINITY;
    let mut best_b_norm = f64::INFINITY;
    let mut start = 0;
    while start < config.max_tries {
        let len = TRY_CHUNK.min(config.max_tries - start);
        let records = map_indexed(Execution::default(), len as usize, |i| approx_trial(b, vectors, config, stream, start + i as u64));
        for rec in records {
            let rec = rec?;
            if rec.accepted() {
                let tries = rec.try_index + 1;
                return Ok(ApproxOutcome::Accepted { record: rec, tries });
            }
            best_ao_margin = best_ao_margin.max(rec.ao_margin());
            best_b_norm = best_b_norm.min(rec.b_norms.iter().copied().fold(0.0, f64::max));
        }
        start += len;
    }
    Ok(ApproxOutcome::Exhausted { tries: config.max_tries, best_ao_margin, best_b_norm })
}
