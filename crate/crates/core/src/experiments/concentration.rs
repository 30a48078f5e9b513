use serde::{Deserialize, Serialize};

use crate::bounds::extract_params;
use crate::dist::DistributionSpec;
use crate::error::{invalid, Result};
use crate::matrix::{op_norm, RealMatrix};
use crate::par::{fold_chunks, Execution};
use crate::rng::RngStream;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConcentrationConfig {
    pub dist: DistributionSpec,
    pub n: usize,
    pub trials: u64,
    pub master_seed: u64,
    /// Constants `C` of the operator-norm events `|Q| >= C sqrt n`.
    pub op_constants: Vec<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OpNormEvent {
    pub c: f64,
    pub threshold: f64,
    pub count: u64,
    pub frequency: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConcentrationReport {
    pub n: usize,
    pub trials: u64,
    pub k_subgauss: f64,
    /// `2 K n`.
    pub hs_threshold: f64,
    /// Trials with `|A|_HS >= 2 K n`.
    pub hs_events: u64,
    pub max_hs: f64,
    /// Events `|A - E A| >= C sqrt n`, one per constant.
    pub op_events: Vec<OpNormEvent>,
    pub max_op: f64,
}

const OP_TOL: f64 = 1e-10;

/// Empirical frequencies of the Hilbert-Schmidt event on `A` and the
/// operator-norm events on the centered matrix `Q = A - E A`.
pub fn concentration_audit(config: &ConcentrationConfig, exec: Execution) -> Result<ConcentrationReport> {
    let ConcentrationConfig { dist, n, trials, master_seed, op_constants } = config;
    let n = *n;
    if n == 0 || *trials == 0 {
        return Err(invalid("n and trials must be at least 1"));
    }
    if op_constants.iter().any(|c| !(*c > 0.0)) {
        return Err(invalid("operator-norm constants must be positive"));
    }
    let k = extract_params(dist, 0.0)?.k_subgauss;
    let hs_threshold = 2.0 * k * n as f64;
    let mean = dist.mean();
    let sqrt_n = (n as f64).sqrt();
    let thresholds: Vec<f64> = op_constants.iter().map(|c| c * sqrt_n).collect();
    struct Acc {
        hs: u64,
        max_hs: f64,
        op: Vec<u64>,
        max_op: f64,
    }
    let acc = fold_chunks(
        exec,
        *trials,
        1024,
        || Acc { hs: 0, max_hs: 0.0, op: vec![0; thresholds.len()], max_op: 0.0 },
        |mut acc, t| {
            let mut rng = RngStream::new(*master_seed, t).rng();
            let data: Vec<f64> = (0..n * n).map(|_| dist.sample(&mut rng)).collect();
            let hs = data.iter().map(|x| x * x).sum::<f64>().sqrt();
            acc.max_hs = acc.max_hs.max(hs);
            if hs >= hs_threshold {
                acc.hs += 1;
            }
            let q = RealMatrix::new(n, n, data.iter().map(|x| x - mean).collect()).expect("finite entries");
            let op = op_norm(&q, OP_TOL).expect("positive tolerance");
            acc.max_op = acc.max_op.max(op);
            for (c, th) in acc.op.iter_mut().zip(&thresholds) {
                if op >= *th {
                    *c += 1;
                }
            }
            acc
        },
        |mut a, b| {
            a.hs += b.hs;
            a.max_hs = a.max_hs.max(b.max_hs);
            a.max_op = a.max_op.max(b.max_op);
            a.op.iter_mut().zip(&b.op).for_each(|(x, y)| *x += y);
            a
        },
    );
    let op_events = op_constants
        .iter()
        .zip(&thresholds)
        .zip(&acc.op)
        .map(|((&c, &threshold), &count)| OpNormEvent { c, threshold, count, frequency: count as f64 / *trials as f64 })
        .collect();
    Ok(ConcentrationReport { n, trials: *trials, k_subgauss: k, hs_threshold, hs_events: acc.hs, max_hs: acc.max_hs, op_events, max_op: acc.max_op })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rademacher_hs_event_is_impossible() {
        let cfg = ConcentrationConfig {
            dist: DistributionSpec::rademacher(),
            n: 10,
            trials: 2000,
            master_seed: 1,
            op_constants: vec![1.0, 2.0, 3.0],
        };
        let r = concentration_audit(&cfg, Execution::Sequential).unwrap();
        assert_eq!(r.hs_events, 0);
        assert!((r.max_hs - 10.0).abs() < 1e-12);
        let counts: Vec<u64> = r.op_events.iter().map(|e| e.count).collect();
        assert!(counts.windows(2).all(|w| w[0] >= w[1]), "{counts:?}");
    }
}
