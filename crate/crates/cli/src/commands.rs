//! One function per subcommand: build the core configuration, run it and
//! shape the results into a CSV body and a JSON document.

use serde::Serialize;
use serde_json::json;

use ranklab::bounds::{
    compressible_event_bound, extract_params, lattice_ball_bound, lattice_ball_count, matrix_v_event_bound,
    net_cardinality_bound, sbp_lcd_bound, sbp_proj_bound, tensorization_bound, BoundReport, NetInputs, RegimeParams,
    SbpInputs, LATTICE_EXACT_DIM_CAP,
};
use ranklab::experiments::{
    adversarial_frequency, concentration_audit, decay_shape_fit, estimate_deficiency, exhaustive_deficiency_with,
    fit_points, kernel_structure_probe, qgt_min_rank, ConcentrationConfig, FitPoint, KernelProbeConfig, QgtConfig,
    RankTrialConfig,
};
use ranklab::geometry::{greedy_ao_extract, ExtractionConfig};
use ranklab::lcd::{default_grid_step, lcd_matrix, lcd_vector, LcdParams};
use ranklab::matrix::sample_real_matrix;
use ranklab::matrix::{axpy, norm2, Frame};
use ranklab::par::fold_chunks;
use ranklab::rounding::RoundingSpec;
use ranklab::{DistributionSpec, Execution, RealMatrix, RngStream};

use crate::args::*;
use crate::error::CliError;
use crate::output::Outputs;

type Res = Result<Outputs, CliError>;

fn dist(spec: &str) -> Result<DistributionSpec, CliError> {
    spec.parse::<DistributionSpec>().map_err(CliError::from)
}

fn read_file(path: &str) -> Result<String, CliError> {
    std::fs::read_to_string(path).map_err(|e| CliError::Config(format!("cannot read {path}: {e}")))
}

fn parse_list(s: &str, what: &str) -> Result<Vec<f64>, CliError> {
    s.split(',')
        .map(|t| {
            t.trim()
                .parse::<f64>()
                .map_err(|_| CliError::Config(format!("{what}: `{t}` is not a number")))
        })
        .collect()
}

pub fn run(cmd: &Command, exec: Execution) -> Res {
    match cmd {
        Command::RankProb(a) => rank_prob(a, exec),
        Command::Exhaustive(a) => exhaustive(a, exec),
        Command::DecayFit(a) => decay_fit(a, exec),
        Command::Lcd(a) => lcd(a),
        Command::AoExtract(a) => ao_extract(a),
        Command::RoundDemo(a) => round_demo(a, exec),
        Command::QgtAudit(a) => qgt_audit(a, exec),
        Command::QgtAdversarial(a) => qgt_adversarial(a, exec),
        Command::KernelProbe(a) => kernel_probe(a, exec),
        Command::BoundsEval(a) => bounds_eval(a),
        Command::ConcentrationAudit(a) => concentration(a, exec),
    }
}

fn rank_prob(a: &RankProbArgs, exec: Execution) -> Res {
    let d = dist(&a.dist)?;
    let mut cfg = if a.exhaustive {
        RankTrialConfig::enumerate(d, a.n, a.k_max)?
    } else {
        RankTrialConfig::new(d, a.n, a.k_max, a.trials, a.common.seed)
    };
    cfg.center_entries = a.center;
    cfg.record_both = a.both;
    let result = estimate_deficiency(&cfg, exec)?;
    Outputs::new(&result.rows(), &result)
}

#[derive(Serialize)]
struct ExactRow {
    n: usize,
    k: usize,
    matrices: u64,
    successes: u64,
    p_exact: String,
    p_hat: f64,
}

fn exhaustive(a: &ExhaustiveArgs, exec: Execution) -> Res {
    let law = exhaustive_deficiency_with(&dist(&a.dist)?, a.n, a.center, exec)?;
    let rows: Vec<ExactRow> = (0..=a.n)
        .map(|k| {
            let successes = law.matrix_counts.iter().skip(k).sum();
            ExactRow {
                n: a.n,
                k,
                matrices: law.matrices,
                successes,
                p_exact: law.at_least(k).to_string(),
                p_hat: successes as f64 / law.matrices as f64,
            }
        })
        .collect();
    Outputs::new(&rows, &law)
}

#[derive(Serialize)]
struct FitRow {
    k: usize,
    kn: f64,
    p_hat: f64,
    neg_log_p: f64,
    residual: f64,
}

#[derive(serde::Deserialize)]
struct InputRow {
    n: usize,
    k: usize,
    p_hat: f64,
}

fn decay_fit(a: &DecayFitArgs, exec: Execution) -> Res {
    let report = if a.input.is_empty() {
        let mut cfg = RankTrialConfig::new(dist(&a.dist)?, a.n, a.k_max, a.trials, a.common.seed);
        cfg.center_entries = a.center;
        let result = estimate_deficiency(&cfg, exec)?;
        decay_shape_fit(&result.histogram, a.k_max)?
    } else {
        let text = read_file(&a.input)?;
        let mut rdr = csv::Reader::from_reader(text.as_bytes());
        let mut points = Vec::new();
        let mut zero = Vec::new();
        for (i, rec) in rdr.deserialize::<InputRow>().enumerate() {
            let r = rec.map_err(|e| CliError::Config(format!("{} row {}: {e}", a.input, i + 1)))?;
            if r.k == 0 || r.k > a.k_max {
                continue;
            }
            if r.p_hat > 0.0 {
                points.push(FitPoint { k: r.k, kn: (r.k * r.n) as f64, p_hat: r.p_hat, neg_log_p: -r.p_hat.ln() });
            } else {
                zero.push(r.k);
            }
        }
        let mut rep = fit_points(points)?;
        rep.zero_count_k = zero;
        rep
    };
    let rows: Vec<FitRow> = report
        .points
        .iter()
        .zip(&report.residuals)
        .map(|(p, &residual)| FitRow { k: p.k, kn: p.kn, p_hat: p.p_hat, neg_log_p: p.neg_log_p, residual })
        .collect();
    Outputs::new(&rows, &report)
}

/// A unit vector with i.i.d. entries drawn uniformly from a fine integer grid.
fn random_unit(n: usize, stream: RngStream) -> Result<Vec<f64>, CliError> {
    let grid = DistributionSpec::uniform_int(1 << 20)?;
    let m = sample_real_matrix(&grid, 1, n, stream)?;
    let x = m.row(0);
    let norm = norm2(x);
    if norm == 0.0 {
        return Err(CliError::Runtime("sampled the zero vector".into()));
    }
    Ok(x.iter().map(|v| v / norm).collect())
}

#[derive(Serialize)]
struct LcdRow {
    m: usize,
    n: usize,
    upper: f64,
    lower: f64,
    grid_step: f64,
    upper_certified: bool,
    lower_heuristic: bool,
}

fn lcd(a: &LcdArgs) -> Res {
    let params = LcdParams::new(a.l, a.alpha)?;
    let grid = if a.grid > 0.0 { a.grid } else { default_grid_step(a.bound) };
    let stream = RngStream::new(a.common.seed, 0);
    let (m, n, est) = if a.matrix.is_empty() {
        if a.n == 0 {
            return Err(CliError::Config("n must be at least 1".into()));
        }
        let v = match a.vector {
            VectorKind::Ones => vec![1.0 / (a.n as f64).sqrt(); a.n],
            VectorKind::E1 => {
                let mut v = vec![0.0; a.n];
                v[0] = 1.0;
                v
            }
            VectorKind::Random => random_unit(a.n, stream)?,
        };
        (1, a.n, lcd_vector(&v, params, a.bound, grid)?)
    } else {
        let v = RealMatrix::from_text(&read_file(&a.matrix)?)?;
        let est = if v.rows() == 1 {
            lcd_vector(v.row(0), params, a.bound, grid)?
        } else {
            lcd_matrix(&v, params, a.bound, a.budget, stream)?
        };
        (v.rows(), v.cols(), est)
    };
    let row = LcdRow {
        m,
        n,
        upper: est.upper,
        lower: est.lower,
        grid_step: est.grid_step,
        upper_certified: est.upper_certified,
        lower_heuristic: est.lower_heuristic,
    };
    Outputs::new(&[row], &est)
}

/// Orthonormal basis of the span of `rows`.
fn orthonormalize(rows: Vec<Vec<f64>>) -> Result<Vec<Vec<f64>>, CliError> {
    let mut frame = Frame::new(rows.first().map_or(0, Vec::len));
    for v in &rows {
        if !frame.push(v, 1e-9) {
            return Err(CliError::Runtime("random basis is degenerate".into()));
        }
    }
    Ok(frame.into_basis())
}

fn ao_extract(a: &AoExtractArgs) -> Res {
    let config = ExtractionConfig { l: a.l, proximity_eps: a.proximity_eps, theta_samples: a.theta_samples };
    let grid = DistributionSpec::uniform_int(1 << 20)?;
    let (candidates, basis) = if a.candidates.is_empty() {
        if a.dim_e == 0 || a.dim_e > a.ambient || a.count == 0 {
            return Err(CliError::Config(format!(
                "need 1 <= dim-e <= ambient and count >= 1, got dim-e = {}, ambient = {}, count = {}",
                a.dim_e, a.ambient, a.count
            )));
        }
        let raw = sample_real_matrix(&grid, a.dim_e, a.ambient, RngStream::new(a.common.seed, 0))?;
        let basis = orthonormalize(raw.row_vectors())?;
        let coeffs = sample_real_matrix(&grid, a.count, a.dim_e, RngStream::new(a.common.seed, 1))?;
        let candidates = coeffs
            .row_vectors()
            .into_iter()
            .map(|c| {
                let mut v = vec![0.0; a.ambient];
                for (ci, b) in c.iter().zip(&basis) {
                    axpy(*ci / f64::from(1u32 << 20), b, &mut v);
                }
                v
            })
            .collect::<Vec<_>>();
        (candidates, basis)
    } else {
        let candidates = RealMatrix::from_text(&read_file(&a.candidates)?)?.row_vectors();
        let n = candidates.first().map_or(0, Vec::len);
        let basis = if a.basis.is_empty() {
            (0..n)
                .map(|i| {
                    let mut e = vec![0.0; n];
                    e[i] = 1.0;
                    e
                })
                .collect()
        } else {
            RealMatrix::from_text(&read_file(&a.basis)?)?.row_vectors()
        };
        (candidates, basis)
    };
    let result = greedy_ao_extract(&candidates, &basis, config)?;
    Outputs::new(&result.trace, &result)
}

#[derive(Serialize)]
struct RoundRow {
    i: usize,
    x: f64,
    mean_rounded: f64,
    bias: f64,
}

#[derive(Serialize)]
struct RoundStats {
    n: usize,
    mode: RoundMode,
    pitch: f64,
    draws: u64,
    max_abs_bias: f64,
    max_linf_error: f64,
    mean_support: f64,
    max_support: usize,
}

struct RoundAcc {
    sums: Vec<f64>,
    max_linf: f64,
    support_sum: u64,
    max_support: usize,
}

fn round_demo(a: &RoundDemoArgs, exec: Execution) -> Res {
    if a.draws == 0 {
        return Err(CliError::Config("draws must be at least 1".into()));
    }
    if a.n == 0 {
        return Err(CliError::Config("n must be at least 1".into()));
    }
    let x = random_unit(a.n, RngStream::new(a.common.seed, 0))?;
    let spec = match a.mode {
        RoundMode::Plain => RoundingSpec::Plain { delta: a.delta },
        RoundMode::Sparse => RoundingSpec::Sparse { tau: a.tau },
    };
    let base = RngStream::new(a.common.seed, 1);
    let pitch = spec.round(&x, &mut base.child(0).rng())?.pitch;
    let n = a.n;
    let acc = fold_chunks(
        exec,
        a.draws,
        1024,
        || RoundAcc { sums: vec![0.0; n], max_linf: 0.0, support_sum: 0, max_support: 0 },
        |mut acc, i| {
            let p = spec.round(&x, &mut base.child(i).rng()).expect("parameters validated by the first draw");
            let vals = p.values();
            for ((s, v), xi) in acc.sums.iter_mut().zip(&vals).zip(&x) {
                *s += v;
                acc.max_linf = acc.max_linf.max((v - xi).abs());
            }
            let sup = p.support();
            acc.support_sum += sup as u64;
            acc.max_support = acc.max_support.max(sup);
            acc
        },
        |mut l, r| {
            l.sums.iter_mut().zip(&r.sums).for_each(|(a, b)| *a += b);
            l.max_linf = l.max_linf.max(r.max_linf);
            l.support_sum += r.support_sum;
            l.max_support = l.max_support.max(r.max_support);
            l
        },
    );
    let draws = a.draws as f64;
    let rows: Vec<RoundRow> = x
        .iter()
        .zip(&acc.sums)
        .enumerate()
        .map(|(i, (&xi, s))| RoundRow { i, x: xi, mean_rounded: s / draws, bias: s / draws - xi })
        .collect();
    let stats = RoundStats {
        n,
        mode: a.mode,
        pitch,
        draws: a.draws,
        max_abs_bias: rows.iter().map(|r| r.bias.abs()).fold(0.0, f64::max),
        max_linf_error: acc.max_linf,
        mean_support: acc.support_sum as f64 / draws,
        max_support: acc.max_support,
    };
    Outputs::new(&rows, &stats)
}

#[derive(Serialize)]
struct CountRow {
    deficiency: usize,
    count: u64,
}

fn qgt_audit(a: &QgtAuditArgs, exec: Execution) -> Res {
    let cfg = QgtConfig {
        m: a.m,
        n: a.n,
        q: a.q,
        k_probe: 1,
        sample_submatrices: a.samples,
        exhaustive: a.exhaustive,
        c_q: a.c_q,
        master_seed: a.common.seed,
    };
    let report = qgt_min_rank(&cfg, exec)?;
    let rows: Vec<CountRow> = report
        .deficiency_counts
        .iter()
        .enumerate()
        .map(|(deficiency, &count)| CountRow { deficiency, count })
        .collect();
    Outputs::new(&rows, &report)
}

#[derive(Serialize)]
struct AdversarialRow {
    m: usize,
    n: usize,
    q: f64,
    k: usize,
    matrices: u64,
    reached: u64,
    frequency: f64,
    expected_j: f64,
    binomial_tail: f64,
    sizing_ok: bool,
    planted_ok: bool,
}

fn qgt_adversarial(a: &QgtAdversarialArgs, exec: Execution) -> Res {
    let cfg = QgtConfig {
        m: a.m,
        n: a.n,
        q: a.q,
        k_probe: a.k,
        sample_submatrices: 1,
        exhaustive: false,
        c_q: 1.0,
        master_seed: a.common.seed,
    };
    let f = adversarial_frequency(&cfg, a.matrices, exec)?;
    let row = AdversarialRow {
        m: f.m,
        n: f.n,
        q: f.q,
        k: f.k,
        matrices: f.matrices,
        reached: f.reached,
        frequency: f.frequency,
        expected_j: f.expected_j,
        binomial_tail: f.binomial_tail,
        sizing_ok: f.sizing_ok,
        planted_ok: f.planted_ok,
    };
    Outputs::new(&[row], &f)
}

#[derive(Serialize)]
struct KernelRow {
    kernel_dim: usize,
    trials: u64,
}

fn kernel_probe(a: &KernelProbeArgs, exec: Execution) -> Res {
    let regime = RegimeParams::new(a.n, a.k.max(1), a.tau, a.rho, a.delta, a.p)?;
    let mut cfg = KernelProbeConfig::new(dist(&a.dist)?, a.n, a.k, a.trials, a.common.seed, regime.clone());
    cfg.lcd_c = a.lcd_c;
    cfg.samples_per_trial = a.samples;
    if a.l > 0.0 || a.alpha > 0.0 {
        let l = if a.l > 0.0 { a.l } else { regime.L() };
        let alpha = if a.alpha > 0.0 { a.alpha } else { regime.alpha() };
        cfg.lcd_params = Some(LcdParams::new(l, alpha)?);
    }
    if a.search_cap > 0.0 {
        cfg.search_cap = Some(a.search_cap);
    }
    let report = kernel_structure_probe(&cfg, exec)?;
    let rows: Vec<KernelRow> =
        report.kernel_dims.iter().map(|(&kernel_dim, &trials)| KernelRow { kernel_dim, trials }).collect();
    Outputs::new(&rows, &report)
}

#[derive(Serialize)]
struct BoundRow {
    formula_id: String,
    log_value: String,
    value: f64,
}

impl From<&BoundReport> for BoundRow {
    fn from(r: &BoundReport) -> Self {
        BoundRow { formula_id: r.formula_id.clone(), log_value: r.log_value.to_string(), value: r.value() }
    }
}

fn bound_outputs(report: BoundReport) -> Res {
    Outputs::new(&[BoundRow::from(&report)], &report)
}

fn bounds_eval(a: &BoundsEvalArgs) -> Res {
    let sbp = || -> Result<SbpInputs, CliError> {
        if a.m < 1.0 || a.m.fract() != 0.0 {
            return Err(CliError::Config(format!("m must be a positive integer, got {}", a.m)));
        }
        Ok(SbpInputs {
            m: a.m as usize,
            l: a.l,
            alpha: a.alpha,
            d: a.d,
            t: a.t,
            c: a.c,
            p: (a.p > 0.0).then_some(a.p),
        })
    };
    match a.formula {
        Formula::Params => {
            let p = extract_params(&dist(&a.dist)?, a.p_floor)?;
            #[derive(Serialize)]
            struct Row {
                k_subgauss: f64,
                p: f64,
                mean: f64,
                p_floor: f64,
                rescale_threshold: Option<f64>,
            }
            let row = Row {
                k_subgauss: p.k_subgauss,
                p: p.p,
                mean: p.mean,
                p_floor: p.p_floor,
                rescale_threshold: p.rescale_threshold,
            };
            Outputs::new(&[row], &p)
        }
        Formula::Regime => {
            let p = if a.p > 0.0 { a.p } else { 0.5 };
            let r = RegimeParams::new(a.n, a.k, a.tau, a.rho, a.delta, p)?;
            #[derive(Serialize)]
            #[allow(non_snake_case)]
            struct Row {
                n: usize,
                k: usize,
                tau: f64,
                rho: f64,
                delta: f64,
                p: f64,
                L: f64,
                alpha: f64,
                r: f64,
                ln_R: f64,
            }
            let row = Row {
                n: r.n(),
                k: r.k(),
                tau: r.tau(),
                rho: r.rho(),
                delta: r.delta(),
                p: r.p(),
                L: r.L(),
                alpha: r.alpha(),
                r: r.r(),
                ln_R: r.ln_R(),
            };
            Outputs::new(&[row], &r)
        }
        Formula::SbpLcd => bound_outputs(sbp_lcd_bound(&sbp()?, a.det_sqrt)?),
        Formula::SbpProj => bound_outputs(sbp_proj_bound(&sbp()?)?),
        Formula::Tensorization => bound_outputs(tensorization_bound(a.m, a.big_m, a.t, a.n, a.c)?),
        Formula::Lattice => {
            let report = lattice_ball_bound(a.n, a.big_r, a.c)?;
            let exact = if a.n <= LATTICE_EXACT_DIM_CAP { Some(lattice_ball_count(a.n, a.big_r)?) } else { None };
            #[derive(Serialize)]
            struct Row {
                formula_id: String,
                log_value: String,
                value: f64,
                exact_count: Option<u64>,
            }
            let b = BoundRow::from(&report);
            let row = Row { formula_id: b.formula_id, log_value: b.log_value, value: b.value, exact_count: exact };
            Outputs::new(&[row], &json!({ "bound": report, "exact_count": exact }))
        }
        Formula::Net => {
            let inputs = NetInputs {
                d: parse_list(&a.levels, "--d")?,
                n: a.n,
                rho: a.rho,
                r: a.r,
                big_r: a.big_r,
                delta: a.delta,
                c: a.c,
            };
            bound_outputs(net_cardinality_bound(&inputs)?)
        }
        Formula::Compressible => bound_outputs(compressible_event_bound(a.l_tuple, a.n, a.c_small)?),
        Formula::MatrixV => bound_outputs(matrix_v_event_bound(a.l_tuple, a.n)?),
    }
}

#[derive(Serialize)]
struct EventRow {
    event: &'static str,
    c: Option<f64>,
    threshold: f64,
    count: u64,
    frequency: f64,
}

fn concentration(a: &ConcentrationArgs, exec: Execution) -> Res {
    let cfg = ConcentrationConfig {
        dist: dist(&a.dist)?,
        n: a.n,
        trials: a.trials,
        master_seed: a.common.seed,
        op_constants: parse_list(&a.c, "--C")?,
    };
    let r = concentration_audit(&cfg, exec)?;
    let mut rows = vec![EventRow {
        event: "hilbert_schmidt",
        c: None,
        threshold: r.hs_threshold,
        count: r.hs_events,
        frequency: r.hs_events as f64 / r.trials as f64,
    }];
    rows.extend(r.op_events.iter().map(|e| EventRow {
        event: "operator_norm",
        c: Some(e.c),
        threshold: e.threshold,
        count: e.count,
        frequency: e.frequency,
    }));
    Outputs::new(&rows, &r)
}
