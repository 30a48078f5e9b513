//! Monte Carlo and exhaustive experiments: rank-deficiency probabilities,
//! decay-shape fits, concentration audits, submatrix ranks of group-testing
//! designs, and kernel-structure probes.

mod concentration;
mod deficiency;
mod exhaustive;
mod fit;
mod kernel;
mod qgt;

pub use concentration::{concentration_audit, ConcentrationConfig, ConcentrationReport, OpNormEvent};
pub use deficiency::{
    estimate_deficiency, run_primes, DeficiencyHistogram, DeficiencyRow, PathCounts, RankTrialConfig, RankTrialResult, TrialMode,
};
pub use exhaustive::{exhaustive_deficiency, exhaustive_deficiency_with, ExactDeficiency, ENUMERATION_BUDGET};
pub use fit::{decay_shape_fit, fit_points, FitPoint, FitReport};
pub use kernel::{kernel_structure_probe, probe_matrix, KernelProbeConfig, KernelProbeReport, MatrixProbe};
pub use qgt::{
    adversarial_frequency, qgt_adversarial, qgt_min_rank, qgt_min_rank_on, AdversarialFrequency, AdversarialReport, QgtConfig,
    QgtReport, QGT_EXHAUSTIVE_BUDGET,
};
