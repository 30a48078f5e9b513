use std::collections::BTreeMap;

use rand::Rng;
use serde::{Deserialize, Serialize};

use super::deficiency::run_primes;
use crate::bounds::RegimeParams;
use crate::dist::DistributionSpec;
use crate::error::{invalid, Result};
use crate::geometry::{classify, Compressibility, SparsityParams};
use crate::lcd::{default_grid_step, lcd_vector, LcdParams};
use crate::matrix::{norm2, orthonormal_complement, sample_int_matrix, HybridRank, IntMatrix};
use crate::par::{map_indexed, Execution};
use crate::rng::RngStream;
use crate::util::ext_f64;

/// Largest `n` accepted by the probe.
pub const KERNEL_PROBE_MAX_N: usize = 200;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct KernelProbeConfig {
    pub dist: DistributionSpec,
    pub n: usize,
    /// `B` has `n - k` rows.
    pub k: usize,
    pub trials: u64,
    pub master_seed: u64,
    pub regime: RegimeParams,
    /// Constant `C` of the LCD threshold `exp(C n / k)`.
    pub lcd_c: f64,
    pub samples_per_trial: usize,
    /// LCD parameters; defaults to `(L, alpha)` of the regime.
    pub lcd_params: Option<LcdParams>,
    /// Upper end of the LCD scan, capped at the threshold. Defaults to four
    /// times the cutoff `L / alpha`.
    pub search_cap: Option<f64>,
}

impl KernelProbeConfig {
    pub fn new(dist: DistributionSpec, n: usize, k: usize, trials: u64, master_seed: u64, regime: RegimeParams) -> Self {
        Self { dist, n, k, trials, master_seed, regime, lcd_c: 1.0, samples_per_trial: 4, lcd_params: None, search_cap: None }
    }

    fn params(&self) -> Result<LcdParams> {
        match self.lcd_params {
            Some(p) => Ok(p),
            None => LcdParams::new(self.regime.L(), self.regime.alpha()),
        }
    }

    /// `ln` of the LCD threshold `exp(C n / k)`; infinite for `k = 0`.
    pub fn ln_threshold(&self) -> f64 {
        if self.k == 0 { f64::INFINITY } else { self.lcd_c * self.n as f64 / self.k as f64 }
    }
}

/// What one matrix `B` revealed.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MatrixProbe {
    pub kernel_dim: usize,
    pub float_kernel_dim: usize,
    pub compressible: usize,
    pub incompressible: usize,
    /// LCD upper brackets of the sampled kernel directions.
    pub lcd_uppers: Vec<f64>,
    /// Samples whose LCD witness lies below the threshold.
    pub violations: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct KernelProbeReport {
    pub n: usize,
    pub k: usize,
    pub trials: u64,
    /// Trials by exact kernel dimension.
    pub kernel_dims: BTreeMap<usize, u64>,
    /// Fraction of trials with kernel dimension exactly `k`.
    pub generic_fraction: f64,
    pub no_kernel_trials: u64,
    pub compressible_samples: u64,
    pub incompressible_samples: u64,
    pub lcd_samples: u64,
    #[serde(with = "ext_f64")]
    pub min_lcd_upper: f64,
    pub violating_samples: u64,
    pub trials_with_violation: u64,
    pub ln_threshold: f64,
    pub lcd_params: LcdParams,
    pub search_bound: f64,
    pub regime: RegimeParams,
}

fn search_bound(config: &KernelProbeConfig, params: LcdParams) -> f64 {
    let cap = config.search_cap.unwrap_or(4.0 * params.cutoff(1.0));
    cap.min(config.ln_threshold().exp())
}

/// Kernel of one `(n - k) x n` integer matrix: exact dimension from the
/// hybrid rank, a floating orthonormal basis, and sampled unit kernel
/// vectors classified and run through the LCD scan.
pub fn probe_matrix(b: &IntMatrix, config: &KernelProbeConfig, engine: &HybridRank, stream: RngStream) -> Result<MatrixProbe> {
    let n = b.cols();
    let params = config.params()?;
    let (rank, _) = engine.rank(b);
    let kernel_dim = n - rank;
    let rows = b.to_real().row_vectors();
    let (_, basis) = orthonormal_complement(&rows, n, 1e-9);
    let mut out = MatrixProbe {
        kernel_dim,
        float_kernel_dim: basis.len(),
        compressible: 0,
        incompressible: 0,
        lcd_uppers: Vec::new(),
        violations: 0,
    };
    if basis.is_empty() {
        return Ok(out);
    }
    let tau = config.regime.tau();
    let s = ((tau * tau * n as f64).floor() as usize).clamp(1, n);
    let sparsity = SparsityParams::new(s, tau.powi(4))?;
    let bound = search_bound(config, params);
    let mut rng = stream.rng();
    for _ in 0..config.samples_per_trial {
        let x = loop {
            let coef: Vec<f64> = (0..basis.len()).map(|_| rng.random_range(-1.0..1.0)).collect();
            let mut x = vec![0.0; n];
            for (c, v) in coef.iter().zip(&basis) {
                x.iter_mut().zip(v).for_each(|(xi, vi)| *xi += c * vi);
            }
            let nx = norm2(&x);
            if nx > 1e-3 {
                break x.into_iter().map(|v| v / nx).collect::<Vec<f64>>();
            }
        };
        match classify(&x, sparsity)? {
            Compressibility::Compressible => out.compressible += 1,
            Compressibility::Incompressible => out.incompressible += 1,
        }
        if bound > params.cutoff(1.0) {
            let est = lcd_vector(&x, params, bound, default_grid_step(bound))?;
            if est.has_witness() {
                out.violations += 1;
            }
            out.lcd_uppers.push(est.upper);
        }
    }
    Ok(out)
}

/// Observational probe of the kernels of random `(n - k) x n` matrices.
pub fn kernel_structure_probe(config: &KernelProbeConfig, exec: Execution) -> Result<KernelProbeReport> {
    let n = config.n;
    if n == 0 || n > KERNEL_PROBE_MAX_N {
        return Err(invalid(format!("probe needs 1 <= n <= {KERNEL_PROBE_MAX_N}, got {n}")));
    }
    if config.k > n || config.trials == 0 || config.samples_per_trial == 0 {
        return Err(invalid("need k <= n, trials >= 1 and samples_per_trial >= 1"));
    }
    if config.regime.n() != n || config.regime.k() != config.k.max(1) {
        return Err(invalid("regime parameters must use the probe's n and k"));
    }
    let params = config.params()?;
    let engine = run_primes(config.master_seed);
    let probes = map_indexed(exec, config.trials as usize, |t| {
        let stream = RngStream::new(config.master_seed, t as u64);
        let b = sample_int_matrix(&config.dist, n - config.k, n, stream.child(0))?;
        probe_matrix(&b, config, &engine, stream.child(1))
    })
    .into_iter()
    .collect::<Result<Vec<_>>>()?;
    let mut kernel_dims = BTreeMap::new();
    for p in &probes {
        *kernel_dims.entry(p.kernel_dim).or_insert(0) += 1;
    }
    let count = |f: &dyn Fn(&MatrixProbe) -> usize| probes.iter().map(|p| f(p) as u64).sum::<u64>();
    Ok(KernelProbeReport {
        n,
        k: config.k,
        trials: config.trials,
        generic_fraction: kernel_dims.get(&config.k).copied().unwrap_or(0) as f64 / config.trials as f64,
        kernel_dims,
        no_kernel_trials: probes.iter().filter(|p| p.kernel_dim == 0).count() as u64,
        compressible_samples: count(&|p| p.compressible),
        incompressible_samples: count(&|p| p.incompressible),
        lcd_samples: count(&|p| p.lcd_uppers.len()),
        min_lcd_upper: probes.iter().flat_map(|p| p.lcd_uppers.iter().copied()).fold(f64::INFINITY, f64::min),
        violating_samples: count(&|p| p.violations),
        trials_with_violation: probes.iter().filter(|p| p.violations > 0).count() as u64,
        ln_threshold: config.ln_threshold(),
        lcd_params: params,
        search_bound: search_bound(config, params),
        regime: config.regime.clone(),
    })
}
