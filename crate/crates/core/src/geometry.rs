//! Compressible vectors, almost orthogonal systems and the greedy extraction
//! of an almost orthogonal system from a finite candidate set.

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::matrix::{dot, norm2, singular_values, Frame, RealMatrix, SVD_DIM_CAP};

/// Euclidean distance from `x` to the `s`-sparse vectors: the norm of `x`
/// with its `s` largest-magnitude coordinates removed.
pub fn dist_to_sparse(x: &[f64], s: usize) -> f64 {
    if s >= x.len() {
        return 0.0;
    }
    let mut mags: Vec<(f64, usize)> = x.iter().map(|v| v.abs()).zip(0..).collect();
    // largest first; equal magnitudes keep the lower index
    mags.sort_by(|a, b| b.0.total_cmp(&a.0).then(a.1.cmp(&b.1)));
    mags[s..].iter().map(|(m, _)| m * m).sum::<f64>().sqrt()
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SparsityParams {
    pub s: usize,
    pub tau: f64,
}

impl SparsityParams {
    /// `s >= 1` and `tau > 0`. Values `tau >= 1` are accepted and make every
    /// unit vector compressible.
    pub fn new(s: usize, tau: f64) -> Result<Self> {
        if s == 0 {
            return Err(invalid("sparsity budget s must be at least 1"));
        }
        if !(tau.is_finite() && tau > 0.0) {
            return Err(invalid(format!("tau must be positive, got {tau}")));
        }
        Ok(Self { s, tau })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Compressibility {
    Compressible,
    Incompressible,
}

const SPHERE_TOL: f64 = 1e-9;

/// Whether the unit vector `x` is within `tau` of `Sparse(s)`.
pub fn classify(x: &[f64], params: SparsityParams) -> Result<Compressibility> {
    let norm = norm2(x);
    if (norm - 1.0).abs() > SPHERE_TOL {
        return Err(Error::NotOnSphere(norm));
    }
    if params.s > x.len() {
        return Err(invalid(format!("s = {} exceeds dimension {}", params.s, x.len())));
    }
    Ok(if dist_to_sparse(x, params.s) <= params.tau {
        Compressibility::Compressible
    } else {
        Compressibility::Incompressible
    })
}

/// Singular-value certificate of an `l`-tuple of nonzero vectors.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AoSystem {
    pub vectors: Vec<Vec<f64>>,
    pub nu: f64,
    /// Extreme singular values of the matrix with columns `v_j / |v_j|`.
    pub s_min: f64,
    pub s_max: f64,
}

/// Slack applied to both singular-value inequalities.
pub const AO_SLACK: f64 = 1e-9;

impl AoSystem {
    /// `1 - nu <= s_min` and `s_max <= 1 + nu`, up to [`AO_SLACK`].
    pub fn is_certified(&self) -> bool {
        self.s_min >= 1.0 - self.nu - AO_SLACK && self.s_max <= 1.0 + self.nu + AO_SLACK
    }

    pub fn len(&self) -> usize {
        self.vectors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vectors.is_empty()
    }
}

fn check_tuple(vectors: &[Vec<f64>]) -> Result<usize> {
    let n = vectors.first().map(Vec::len).ok_or_else(|| invalid("empty tuple"))?;
    if vectors.iter().any(|v| v.len() != n) {
        return Err(Error::DimensionMismatch("vectors of unequal length".into()));
    }
    if let Some(i) = vectors.iter().position(|v| norm2(v) == 0.0) {
        return Err(Error::ZeroVector(i));
    }
    if vectors.len() > SVD_DIM_CAP {
        return Err(Error::TooLargeForSvd { got: vectors.len(), cap: SVD_DIM_CAP });
    }
    Ok(n)
}

fn normalized_columns(vectors: &[Vec<f64>]) -> Result<RealMatrix> {
    let cols: Vec<Vec<f64>> = vectors
        .iter()
        .map(|v| {
            let n = norm2(v);
            v.iter().map(|x| x / n).collect()
        })
        .collect();
    RealMatrix::from_columns(&cols)
}

/// Computes the almost-orthogonality certificate of `vectors` at level `nu`.
/// The returned system may or may not be certified; see
/// [`AoSystem::is_certified`].
pub fn ao_check(vectors: &[Vec<f64>], nu: f64) -> Result<AoSystem> {
    check_tuple(vectors)?;
    let w = normalized_columns(vectors)?;
    let sv = singular_values(&w)?;
    let s_max = sv[0];
    // n < l forces s_l = 0
    let s_min = if w.rows() < w.cols() { 0.0 } else { *sv.last().expect("nonempty") };
    Ok(AoSystem { vectors: vectors.to_vec(), nu, s_min, s_max })
}

/// Largest `|<u_i, u_j>|` over distinct normalized vectors.
pub fn max_pairwise_cosine(vectors: &[Vec<f64>]) -> f64 {
    let mut worst = 0.0f64;
    for i in 0..vectors.len() {
        for j in i + 1..vectors.len() {
            let c = dot(&vectors[i], &vectors[j]) / (norm2(&vectors[i]) * norm2(&vectors[j]));
            worst = worst.max(c.abs());
        }
    }
    worst
}

/// Outcome of checking the triangular criterion for almost orthogonality.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TriangularReport {
    pub nu: f64,
    /// `|P_{span(v_1..v_j)} v_{j+1}| / |v_{j+1}|` for `j = 1..l-1`.
    pub projection_ratios: Vec<f64>,
    /// `nu / sqrt(l)`.
    pub ratio_threshold: f64,
    pub hypothesis_met: bool,
    /// Certificate at level `2 nu`.
    pub ao: AoSystem,
    pub ao_holds: bool,
    /// `ln det(V^T V)^{1/2}`.
    pub log_det_sqrt: f64,
    /// `ln (2^{-l} prod |v_j|)`.
    pub log_det_lower_bound: f64,
    pub det_holds: bool,
}

impl TriangularReport {
    /// Both conclusions hold, or the hypothesis was not met.
    pub fn consistent(&self) -> bool {
        !self.hypothesis_met || (self.ao_holds && self.det_holds)
    }
}

/// If every `v_{j+1}` projects onto `span(v_1..v_j)` with norm at most
/// `(nu / sqrt l) |v_{j+1}|`, the tuple should be `2 nu`-almost orthogonal
/// and `det(V^T V)^{1/2} >= 2^{-l} prod |v_j|`. Measures all three.
pub fn triangular_ao_bound_check(vectors: &[Vec<f64>], nu: f64) -> Result<TriangularReport> {
    if !(0.0..=0.25).contains(&nu) {
        return Err(invalid(format!("nu must lie in [0, 1/4], got {nu}")));
    }
    let n = check_tuple(vectors)?;
    let l = vectors.len();
    let ratio_threshold = nu / (l as f64).sqrt();
    let mut frame = Frame::new(n);
    let mut projection_ratios = Vec::with_capacity(l.saturating_sub(1));
    for (j, v) in vectors.iter().enumerate() {
        if j > 0 {
            projection_ratios.push(frame.projection_norm(v) / norm2(v));
        }
        frame.push(v, 0.0);
    }
    // tiny relative slack for rounding in the projection
    let hypothesis_met = projection_ratios.iter().all(|&r| r <= ratio_threshold * (1.0 + 1e-12));
    let ao = ao_check(vectors, 2.0 * nu)?;
    let ao_holds = ao.is_certified();
    let v = RealMatrix::from_columns(vectors)?;
    let sv = singular_values(&v)?;
    let log_det_sqrt = if n < l { f64::NEG_INFINITY } else { sv.iter().map(|s| s.ln()).sum() };
    let log_det_lower_bound = -(l as f64) * std::f64::consts::LN_2 + vectors.iter().map(|v| norm2(v).ln()).sum::<f64>();
    let det_holds = log_det_sqrt >= log_det_lower_bound - 1e-9;
    Ok(TriangularReport {
        nu,
        projection_ratios,
        ratio_threshold,
        hypothesis_met,
        ao,
        ao_holds,
        log_det_sqrt,
        log_det_lower_bound,
        det_holds,
    })
}

/// One step of the greedy construction.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TraceStep {
    pub index: usize,
    pub norm: f64,
    /// Projection onto the span of the previously chosen vectors.
    pub projection_norm: f64,
    /// `|v_prev| / (16 sqrt l)`; zero for the first pick.
    pub threshold: f64,
}

/// Sampled check that `sum theta_i v_i` stays away from every candidate for
/// `|theta| <= 1 / (20 sqrt l)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConditionBAudit {
    pub samples: usize,
    pub theta_radius: f64,
    pub violations: usize,
    pub min_distance: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "branch", rename_all = "snake_case")]
pub enum Extraction {
    /// `l` candidates forming a `1/8`-almost orthogonal system.
    System { ao: AoSystem, indices: Vec<usize>, condition_b: ConditionBAudit },
    /// The eligible set ran empty: an orthonormal basis of a subspace of `E`
    /// of dimension `dim E - l`, orthogonal to the vectors chosen so far.
    Subspace { basis_f: Vec<Vec<f64>>, chosen: Vec<usize> },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExtractionResult {
    pub extraction: Extraction,
    pub trace: Vec<TraceStep>,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExtractionConfig {
    pub l: usize,
    pub proximity_eps: f64,
    pub theta_samples: usize,
}

impl ExtractionConfig {
    pub fn new(l: usize) -> Self {
        Self { l, proximity_eps: 1e-6, theta_samples: 1024 }
    }
}

/// Greedy minimal-norm construction of an almost orthogonal system inside
/// `E = span(basis_e)` from a finite candidate set `W`.
///
/// Step one takes the shortest candidate. Step `j + 1` takes the shortest
/// remaining candidate `v` with `|v| >= |v_j|` and
/// `|P_{span(v_1..v_j)} v| <= |v_j| / (16 sqrt l)`; ties go to the lower
/// index. When no candidate qualifies, the orthogonal complement of the
/// chosen vectors inside `E` supplies the subspace branch.
pub fn greedy_ao_extract(candidates: &[Vec<f64>], basis_e: &[Vec<f64>], config: ExtractionConfig) -> Result<ExtractionResult> {
    let ExtractionConfig { l, proximity_eps, theta_samples } = config;
    let k = basis_e.len();
    let n = basis_e.first().map(Vec::len).ok_or_else(|| invalid("basis of E is empty"))?;
    if l == 0 || l >= k {
        return Err(invalid(format!("need 1 <= l < dim E, got l = {l}, dim E = {k}")));
    }
    if candidates.is_empty() {
        return Err(invalid("candidate set is empty"));
    }
    if basis_e.iter().chain(candidates).any(|v| v.len() != n) {
        return Err(Error::DimensionMismatch(format!("all vectors must have length {n}")));
    }
    for (i, a) in basis_e.iter().enumerate() {
        for (j, b) in basis_e.iter().enumerate().skip(i) {
            let want = if i == j { 1.0 } else { 0.0 };
            if (dot(a, b) - want).abs() > 1e-8 {
                return Err(invalid("basis of E is not orthonormal"));
            }
        }
    }
    let mut e_frame = Frame::new(n);
    for b in basis_e {
        e_frame.push(b, 0.0);
    }
    let norms: Vec<f64> = candidates.iter().map(|c| norm2(c)).collect();
    for (index, c) in candidates.iter().enumerate() {
        if norms[index] == 0.0 {
            return Err(Error::ZeroVector(index));
        }
        let distance = norm2(&e_frame.residual(c));
        if distance > proximity_eps {
            return Err(Error::NotInSubspace { index, distance });
        }
    }

    let mut order: Vec<usize> = (0..candidates.len()).collect();
    order.sort_by(|&a, &b| norms[a].total_cmp(&norms[b]).then(a.cmp(&b)));
    let first = order[0];
    let mut chosen = vec![first];
    let mut taken = vec![false; candidates.len()];
    taken[first] = true;
    let mut frame = Frame::new(n);
    frame.push(&candidates[first], 0.0);
    let mut trace = vec![TraceStep { index: first, norm: norms[first], projection_norm: 0.0, threshold: 0.0 }];
    let scale = 1.0 / (16.0 * (l as f64).sqrt());

    while chosen.len() < l {
        let last_norm = norms[*chosen.last().expect("nonempty")];
        let threshold = last_norm * scale;
        let pick = order
            .iter()
            .copied()
            .filter(|&i| !taken[i] && norms[i] >= last_norm)
            .map(|i| (i, frame.projection_norm(&candidates[i])))
            .find(|&(_, p)| p <= threshold);
        let Some((index, projection_norm)) = pick else {
            let basis_f = complement_in(&frame, basis_e, k - l);
            return Ok(ExtractionResult { extraction: Extraction::Subspace { basis_f, chosen }, trace });
        };
        taken[index] = true;
        chosen.push(index);
        frame.push(&candidates[index], 0.0);
        trace.push(TraceStep { index, norm: norms[index], projection_norm, threshold });
    }

    let vectors: Vec<Vec<f64>> = chosen.iter().map(|&i| candidates[i].clone()).collect();
    let ao = ao_check(&vectors, 0.125)?;
    let condition_b = audit_condition_b(&vectors, candidates, &norms, &order, proximity_eps, theta_samples);
    Ok(ExtractionResult { extraction: Extraction::System { ao, indices: chosen, condition_b }, trace })
}

fn complement_in(chosen: &Frame, basis_e: &[Vec<f64>], want: usize) -> Vec<Vec<f64>> {
    let mut frame = chosen.clone();
    let start = frame.len();
    for b in basis_e {
        if frame.len() - start == want {
            break;
        }
        frame.push(b, 1e-10);
    }
    frame.into_basis().split_off(start)
}

fn audit_condition_b(
    vectors: &[Vec<f64>],
    candidates: &[Vec<f64>],
    norms: &[f64],
    order: &[usize],
    eps: f64,
    samples: usize,
) -> ConditionBAudit {
    let l = vectors.len();
    let n = vectors[0].len();
    let theta_radius = 1.0 / (20.0 * (l as f64).sqrt());
    let sorted_norms: Vec<f64> = order.iter().map(|&i| norms[i]).collect();
    let mut violations = 0;
    let mut min_distance = f64::INFINITY;
    let seq = QuasiRandom::new(l + 1);
    for t in 0..samples {
        let theta = seq.ball_point(t as u64 + 1, theta_radius);
        let mut w = vec![0.0; n];
        for (th, v) in theta.iter().zip(vectors) {
            w.iter_mut().zip(v).for_each(|(wi, vi)| *wi += th * vi);
        }
        let d = nearest_candidate_distance(&w, candidates, &sorted_norms, order);
        min_distance = min_distance.min(d);
        if d <= eps {
            violations += 1;
        }
    }
    ConditionBAudit { samples, theta_radius, violations, min_distance }
}

/// Distance from `w` to the closest candidate, scanning outward from `|w|`
/// in norm order and stopping once `| |w| - |c| |` exceeds the best so far.
fn nearest_candidate_distance(w: &[f64], candidates: &[Vec<f64>], sorted_norms: &[f64], order: &[usize]) -> f64 {
    let wn = norm2(w);
    let pos = sorted_norms.partition_point(|&x| x < wn);
    let mut best = f64::INFINITY;
    let dist = |i: usize| -> f64 {
        w.iter().zip(&candidates[order[i]]).map(|(a, b)| (a - b) * (a - b)).sum::<f64>().sqrt()
    };
    let mut up = pos;
    let mut down = pos;
    loop {
        let up_gap = sorted_norms.get(up).map(|&x| x - wn);
        let down_gap = if down > 0 { Some(wn - sorted_norms[down - 1]) } else { None };
        let next = match (up_gap, down_gap) {
            (Some(u), Some(d)) => Some(if u <= d { (true, u) } else { (false, d) }),
            (Some(u), None) => Some((true, u)),
            (None, Some(d)) => Some((false, d)),
            (None, None) => None,
        };
        let Some((is_up, gap)) = next else { break };
        if gap > best {
            break;
        }
        if is_up {
            best = best.min(dist(up));
            up += 1;
        } else {
            down -= 1;
            best = best.min(dist(down));
        }
    }
    best
}

/// Additive recurrence `frac(1/2 + k alpha)` with the generalized golden
/// ratio of dimension `d`.
pub(crate) struct QuasiRandom {
    alpha: Vec<f64>,
}

impl QuasiRandom {
    pub(crate) fn new(d: usize) -> Self {
        let mut phi = 2.0f64;
        for _ in 0..64 {
            phi = (1.0 + phi).powf(1.0 / (d as f64 + 1.0));
        }
        let alpha = (1..=d).map(|i| phi.powi(-(i as i32)).fract()).collect();
        Self { alpha }
    }

    pub(crate) fn point(&self, k: u64) -> Vec<f64> {
        self.alpha.iter().map(|a| (0.5 + k as f64 * a).fract()).collect()
    }

    /// Point of the ball of radius `r` in dimension `d - 1`: the first
    /// `d - 1` coordinates give a direction, the last one the radius.
    pub(crate) fn ball_point(&self, k: u64, r: f64) -> Vec<f64> {
        let p = self.point(k);
        let (dir, rad) = p.split_at(p.len() - 1);
        let mut v: Vec<f64> = dir.iter().map(|x| 2.0 * x - 1.0).collect();
        let nv = norm2(&v);
        if nv == 0.0 {
            v[0] = 1.0;
        } else {
            v.iter_mut().for_each(|x| *x /= nv);
        }
        let radius = r * rad[0].powf(1.0 / v.len() as f64);
        v.iter_mut().for_each(|x| *x *= radius);
        v
    }
}
