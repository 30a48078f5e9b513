//! Command-line surface. Every valued option carries a default so that the
//! resolved configuration echoed in the run summary is complete.

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

/// Seed used when none is given; never derived from the clock.
pub const DEFAULT_SEED: u64 = 20_240_601;

#[derive(Debug, Parser)]
#[command(name = "ranklab", version, about = "Rank deficiency of random matrices: experiments, estimators and bounds")]
#[command(args_override_self = true, propagate_version = true)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
    Both,
}

/// Options shared by every subcommand.
#[derive(Clone, Debug, Args, Serialize)]
pub struct Common {
    /// Flat `key = value` file; its entries act as flags placed before the
    /// command-line flags, so the command line wins (optional)
    #[arg(long, default_value = "", hide_default_value = true)]
    pub config: String,
    /// Master seed of every random stream
    #[arg(long, default_value_t = DEFAULT_SEED)]
    pub seed: u64,
    /// Worker threads; 0 uses all available cores
    #[arg(long, default_value_t = 0)]
    pub threads: usize,
    /// Directory receiving the result files and the run summary
    #[arg(long, default_value = "ranklab-out")]
    pub out_dir: PathBuf,
    /// Result files to write next to the JSON run summary
    #[arg(long, value_enum, default_value_t = Format::Both)]
    pub format: Format,
}

#[derive(Debug, Subcommand)]
#[command(rename_all = "kebab-case")]
pub enum Command {
    /// Estimate P(rank <= n - k) by Monte Carlo or full enumeration
    RankProb(RankProbArgs),
    /// Exact deficiency law by enumeration of all matrices (n <= 4)
    Exhaustive(ExhaustiveArgs),
    /// Least-squares fit of -ln P(rank <= n - k) against k n
    DecayFit(DecayFitArgs),
    /// Least common denominator bracket of a vector or small matrix
    Lcd(LcdArgs),
    /// Greedy extraction of an almost orthogonal system from candidates
    AoExtract(AoExtractArgs),
    /// Empirical behaviour of random lattice rounding
    RoundDemo(RoundDemoArgs),
    /// Minimum rank over m-column submatrices of a Bernoulli design
    QgtAudit(QgtAuditArgs),
    /// Frequency of the all-ones-rows construction in Bernoulli designs
    QgtAdversarial(QgtAdversarialArgs),
    /// Kernel dimension, compressibility and LCD of random kernels
    KernelProbe(KernelProbeArgs),
    /// Evaluate a closed-form bound in log domain
    BoundsEval(BoundsEvalArgs),
    /// Frequencies of the Hilbert-Schmidt and operator-norm events
    ConcentrationAudit(ConcentrationArgs),
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::RankProb(_) => "rank-prob",
            Command::Exhaustive(_) => "exhaustive",
            Command::DecayFit(_) => "decay-fit",
            Command::Lcd(_) => "lcd",
            Command::AoExtract(_) => "ao-extract",
            Command::RoundDemo(_) => "round-demo",
            Command::QgtAudit(_) => "qgt-audit",
            Command::QgtAdversarial(_) => "qgt-adversarial",
            Command::KernelProbe(_) => "kernel-probe",
            Command::BoundsEval(_) => "bounds-eval",
            Command::ConcentrationAudit(_) => "concentration-audit",
        }
    }

    pub fn common(&self) -> &Common {
        match self {
            Command::RankProb(a) => &a.common,
            Command::Exhaustive(a) => &a.common,
            Command::DecayFit(a) => &a.common,
            Command::Lcd(a) => &a.common,
            Command::AoExtract(a) => &a.common,
            Command::RoundDemo(a) => &a.common,
            Command::QgtAudit(a) => &a.common,
            Command::QgtAdversarial(a) => &a.common,
            Command::KernelProbe(a) => &a.common,
            Command::BoundsEval(a) => &a.common,
            Command::ConcentrationAudit(a) => &a.common,
        }
    }

    /// The resolved configuration as JSON.
    pub fn config_json(&self) -> serde_json::Value {
        let v = match self {
            Command::RankProb(a) => serde_json::to_value(a),
            Command::Exhaustive(a) => serde_json::to_value(a),
            Command::DecayFit(a) => serde_json::to_value(a),
            Command::Lcd(a) => serde_json::to_value(a),
            Command::AoExtract(a) => serde_json::to_value(a),
            Command::RoundDemo(a) => serde_json::to_value(a),
            Command::QgtAudit(a) => serde_json::to_value(a),
            Command::QgtAdversarial(a) => serde_json::to_value(a),
            Command::KernelProbe(a) => serde_json::to_value(a),
            Command::BoundsEval(a) => serde_json::to_value(a),
            Command::ConcentrationAudit(a) => serde_json::to_value(a),
        };
        v.expect("argument structs serialize")
    }
}

#[derive(Debug, Args, Serialize)]
pub struct RankProbArgs {
    /// Entry law: rademacher, bernoulli(q), centered-bernoulli(q), uniform(a) or atoms: v:p,...
    #[arg(long, default_value = "rademacher")]
    pub dist: String,
    /// Matrix size
    #[arg(long, default_value_t = 10)]
    pub n: usize,
    /// Largest deficiency k reported
    #[arg(long, default_value_t = 2)]
    pub k_max: usize,
    /// Monte Carlo trials (ignored with --exhaustive)
    #[arg(long, default_value_t = 100_000)]
    pub trials: u64,
    /// Enumerate every matrix once instead of sampling
    #[arg(long)]
    pub exhaustive: bool,
    /// Rank the centered matrix A - E[A]
    #[arg(long)]
    pub center: bool,
    /// Also tally the other (raw or centered) variant, reported in JSON
    #[arg(long)]
    pub both: bool,
    #[command(flatten)]
    #[serde(flatten)]
    pub common: Common,
}

#[derive(Debug, Args, Serialize)]
pub struct ExhaustiveArgs {
    /// Entry law with integer atoms
    #[arg(long, default_value = "rademacher")]
    pub dist: String,
    /// Matrix size, at most 4
    #[arg(long, default_value_t = 3)]
    pub n: usize,
    /// Rank the centered matrix A - E[A]
    #[arg(long)]
    pub center: bool,
    #[command(flatten)]
    #[serde(flatten)]
    pub common: Common,
}

#[derive(Debug, Args, Serialize)]
pub struct DecayFitArgs {
    /// rank-prob CSV to fit; when empty, a fresh Monte Carlo run is made (optional)
    #[arg(long, default_value = "", hide_default_value = true)]
    pub input: String,
    /// Entry law (fresh runs)
    #[arg(long, default_value = "rademacher")]
    pub dist: String,
    /// Matrix size (fresh runs)
    #[arg(long, default_value_t = 6)]
    pub n: usize,
    /// Largest deficiency k fitted
    #[arg(long, default_value_t = 3)]
    pub k_max: usize,
    /// Monte Carlo trials (fresh runs)
    #[arg(long, default_value_t = 1_000_000)]
    pub trials: u64,
    /// Rank the centered matrix A - E[A] (fresh runs)
    #[arg(long)]
    pub center: bool,
    #[command(flatten)]
    #[serde(flatten)]
    pub common: Common,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum VectorKind {
    /// Normalized all-ones vector
    Ones,
    /// First standard basis vector
    E1,
    /// Random unit vector from the seed
    Random,
}

#[derive(Debug, Args, Serialize)]
pub struct LcdArgs {
    /// Built-in vector, used when --matrix is empty
    #[arg(long, value_enum, default_value_t = VectorKind::Ones)]
    pub vector: VectorKind,
    /// Dimension of the built-in vector
    #[arg(long, default_value_t = 100)]
    pub n: usize,
    /// Matrix file (rows cols header, one row per line) for the m >= 1 search; overrides --vector (optional)
    #[arg(long, default_value = "", hide_default_value = true)]
    pub matrix: String,
    /// Parameter L of the LCD condition
    #[arg(long = "L", default_value_t = 2.0)]
    pub l: f64,
    /// Parameter alpha of the LCD condition
    #[arg(long, default_value_t = 0.25)]
    pub alpha: f64,
    /// Upper end of the search
    #[arg(long, default_value_t = 20.0)]
    pub bound: f64,
    /// Scan step; 0 uses a thousandth of the bound
    #[arg(long, default_value_t = 0.0)]
    pub grid: f64,
    /// Random directions for matrix searches
    #[arg(long, default_value_t = 64)]
    pub budget: usize,
    #[command(flatten)]
    #[serde(flatten)]
    pub common: Common,
}

#[derive(Debug, Args, Serialize)]
pub struct AoExtractArgs {
    /// Candidate file, one vector per row; when empty, random candidates are generated (optional)
    #[arg(long, default_value = "", hide_default_value = true)]
    pub candidates: String,
    /// Orthonormal basis of E, one vector per row; when empty, E is the whole space (optional)
    #[arg(long, default_value = "", hide_default_value = true)]
    pub basis: String,
    /// Size l of the system
    #[arg(long, default_value_t = 4)]
    pub l: usize,
    /// Distance below which a point counts as a candidate
    #[arg(long, default_value_t = 1e-6)]
    pub proximity_eps: f64,
    /// Coefficient vectors sampled in the condition-(b) audit
    #[arg(long, default_value_t = 1024)]
    pub theta_samples: usize,
    /// Random candidates generated when no file is given
    #[arg(long, default_value_t = 200)]
    pub count: usize,
    /// Dimension of the random subspace E
    #[arg(long, default_value_t = 12)]
    pub dim_e: usize,
    /// Ambient dimension of random candidates
    #[arg(long, default_value_t = 40)]
    pub ambient: usize,
    #[command(flatten)]
    #[serde(flatten)]
    pub common: Common,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum RoundMode {
    /// Pitch delta
    Plain,
    /// Pitch tau / sqrt(n), magnitudes rounded toward zero first
    Sparse,
}

#[derive(Debug, Args, Serialize)]
pub struct RoundDemoArgs {
    /// Dimension of the random input vector
    #[arg(long, default_value_t = 50)]
    pub n: usize,
    /// Lattice pitch in plain mode
    #[arg(long, default_value_t = 0.1)]
    pub delta: f64,
    /// Rounding mode
    #[arg(long, value_enum, default_value_t = RoundMode::Plain)]
    pub mode: RoundMode,
    /// tau of the sparse mode
    #[arg(long, default_value_t = 0.2)]
    pub tau: f64,
    /// Independent roundings
    #[arg(long, default_value_t = 100_000)]
    pub draws: u64,
    #[command(flatten)]
    #[serde(flatten)]
    pub common: Common,
}

#[derive(Debug, Args, Serialize)]
pub struct QgtAuditArgs {
    /// Rows of the design and size of each column subset
    #[arg(long, default_value_t = 12)]
    pub m: usize,
    /// Columns of the design
    #[arg(long, default_value_t = 60)]
    pub n: usize,
    /// Probability of a one
    #[arg(long, default_value_t = 0.5)]
    pub q: f64,
    /// Sampled column subsets
    #[arg(long, default_value_t = 10_000)]
    pub samples: u64,
    /// Visit every subset (at most 10^6 of them)
    #[arg(long)]
    pub exhaustive: bool,
    /// Constant C_q of the threshold ceil(C_q ln n)
    #[arg(long, default_value_t = 4.0)]
    pub c_q: f64,
    #[command(flatten)]
    #[serde(flatten)]
    pub common: Common,
}

#[derive(Debug, Args, Serialize)]
pub struct QgtAdversarialArgs {
    /// Rows of the design
    #[arg(long, default_value_t = 10)]
    pub m: usize,
    /// Columns of the design
    #[arg(long, default_value_t = 4000)]
    pub n: usize,
    /// Probability of a one
    #[arg(long, default_value_t = 0.5)]
    pub q: f64,
    /// Rows forced to be all ones on J
    #[arg(long, default_value_t = 5)]
    pub k: usize,
    /// Independent designs
    #[arg(long, default_value_t = 1000)]
    pub matrices: u64,
    #[command(flatten)]
    #[serde(flatten)]
    pub common: Common,
}

#[derive(Debug, Args, Serialize)]
pub struct KernelProbeArgs {
    /// Entry law with integer atoms
    #[arg(long, default_value = "uniform(100)")]
    pub dist: String,
    /// Columns of B
    #[arg(long, default_value_t = 60)]
    pub n: usize,
    /// B has n - k rows
    #[arg(long, default_value_t = 3)]
    pub k: usize,
    /// Random matrices
    #[arg(long, default_value_t = 100)]
    pub trials: u64,
    /// Unit kernel vectors sampled per matrix
    #[arg(long, default_value_t = 4)]
    pub samples: usize,
    /// Compressibility parameter tau of the regime
    #[arg(long, default_value_t = 0.5)]
    pub tau: f64,
    /// Parameter rho of the regime
    #[arg(long, default_value_t = 0.5)]
    pub rho: f64,
    /// Parameter delta of the regime, at most rho
    #[arg(long, default_value_t = 0.1)]
    pub delta: f64,
    /// Anti-concentration parameter p of the regime
    #[arg(long, default_value_t = 0.5)]
    pub p: f64,
    /// Constant C of the LCD threshold exp(C n / k)
    #[arg(long, default_value_t = 1.0)]
    pub lcd_c: f64,
    /// LCD parameter L; 0 uses sqrt(k / p) from the regime
    #[arg(long = "L", default_value_t = 0.0)]
    pub l: f64,
    /// LCD parameter alpha; 0 uses tau^4 / 4 from the regime
    #[arg(long, default_value_t = 0.0)]
    pub alpha: f64,
    /// Upper end of the LCD scan; 0 uses four times L / alpha
    #[arg(long, default_value_t = 0.0)]
    pub search_cap: f64,
    #[command(flatten)]
    #[serde(flatten)]
    pub common: Common,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Formula {
    /// K and p of --dist, with the rescale threshold below --p-floor
    Params,
    /// L, alpha, r, R from n, k, tau, rho, delta, p
    Regime,
    /// Small-ball bound via the LCD of V and det(V V^T)^(1/2)
    SbpLcd,
    /// Small-ball bound for a projection, via the subspace LCD
    SbpProj,
    /// (C M t)^(m n)
    Tensorization,
    /// Exact lattice count in B(0, R) (n <= 4) next to (2 + C R / sqrt n)^n
    Lattice,
    /// Net cardinality bound for the levels --d
    Net,
    /// exp(-c l n)
    Compressible,
    /// exp(-l n)
    MatrixV,
}

#[derive(Debug, Args, Serialize)]
pub struct BoundsEvalArgs {
    /// Bound to evaluate
    #[arg(long, value_enum, default_value_t = Formula::SbpLcd)]
    pub formula: Formula,
    /// Entry law (params)
    #[arg(long, default_value = "rademacher")]
    pub dist: String,
    /// Floor on p for the rescale report (params)
    #[arg(long, default_value_t = 0.5)]
    pub p_floor: f64,
    /// Dimension m (sbp-lcd, sbp-proj, tensorization)
    #[arg(long, default_value_t = 1.0)]
    pub m: f64,
    /// LCD parameter L (sbp-lcd, sbp-proj)
    #[arg(long = "L", default_value_t = 1.0)]
    pub l: f64,
    /// LCD parameter alpha (sbp-lcd, sbp-proj)
    #[arg(long, default_value_t = 1.0)]
    pub alpha: f64,
    /// det(V V^T)^(1/2) (sbp-lcd)
    #[arg(long, default_value_t = 1.0)]
    pub det_sqrt: f64,
    /// LCD value D, or inf (sbp-lcd, sbp-proj)
    #[arg(long = "D", default_value_t = 10.0)]
    pub d: f64,
    /// Scale t (sbp-lcd, sbp-proj, tensorization)
    #[arg(long, default_value_t = 0.5)]
    pub t: f64,
    /// Absolute constant C
    #[arg(long = "C", default_value_t = 1.0)]
    pub c: f64,
    /// Anti-concentration p; 0 skips the L >= sqrt(m/p) check (sbp-*, regime)
    #[arg(long, default_value_t = 0.0)]
    pub p: f64,
    /// Constant M (tensorization)
    #[arg(long = "M", default_value_t = 1.0)]
    pub big_m: f64,
    /// Dimension n
    #[arg(long, default_value_t = 10)]
    pub n: usize,
    /// Radius R (lattice, net)
    #[arg(long = "R", default_value_t = 2.0)]
    pub big_r: f64,
    /// Comma-separated levels d_j (net)
    #[arg(long = "d", default_value = "1")]
    pub levels: String,
    /// rho (net, regime)
    #[arg(long, default_value_t = 0.5)]
    pub rho: f64,
    /// r (net)
    #[arg(long, default_value_t = 0.01)]
    pub r: f64,
    /// delta (net, regime)
    #[arg(long, default_value_t = 0.1)]
    pub delta: f64,
    /// Tuple size l (compressible, matrix-v)
    #[arg(long, default_value_t = 1)]
    pub l_tuple: usize,
    /// Constant c (compressible)
    #[arg(long = "c-small", default_value_t = 1.0)]
    pub c_small: f64,
    /// Deficiency k (regime)
    #[arg(long, default_value_t = 2)]
    pub k: usize,
    /// tau (regime)
    #[arg(long, default_value_t = 0.5)]
    pub tau: f64,
    #[command(flatten)]
    #[serde(flatten)]
    pub common: Common,
}

#[derive(Debug, Args, Serialize)]
pub struct ConcentrationArgs {
    /// Entry law
    #[arg(long, default_value = "rademacher")]
    pub dist: String,
    /// Matrix size
    #[arg(long, default_value_t = 10)]
    pub n: usize,
    /// Random matrices
    #[arg(long, default_value_t = 100_000)]
    pub trials: u64,
    /// Comma-separated constants C of the events |A - E A| >= C sqrt n
    #[arg(long = "C", default_value = "1,2,3,4")]
    pub c: String,
    #[command(flatten)]
    #[serde(flatten)]
    pub common: Common,
}
