//! Distribution parameters, the coupled regime parameters, and closed-form
//! bounds evaluated in log domain.

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::dist::DistributionSpec;
use crate::error::{invalid, Result};
use crate::util::ext_f64;

/// Natural log of a nonnegative bound, with the infinite cases explicit.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LogValue {
    Finite(f64),
    /// The bound is zero.
    NegInfinity,
    /// The bound is vacuous.
    PosInfinity,
}

impl LogValue {
    pub fn from_f64(x: f64) -> Self {
        if x == f64::NEG_INFINITY {
            LogValue::NegInfinity
        } else if x == f64::INFINITY {
            LogValue::PosInfinity
        } else {
            debug_assert!(!x.is_nan(), "log bound evaluated to NaN");
            LogValue::Finite(x)
        }
    }

    pub fn as_f64(self) -> f64 {
        match self {
            LogValue::Finite(x) => x,
            LogValue::NegInfinity => f64::NEG_INFINITY,
            LogValue::PosInfinity => f64::INFINITY,
        }
    }
}

impl fmt::Display for LogValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            LogValue::Finite(x) => write!(f, "{x}"),
            LogValue::NegInfinity => f.write_str("-inf"),
            LogValue::PosInfinity => f.write_str("inf"),
        }
    }
}

/// A bound with the inputs it was evaluated at.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BoundReport {
    pub formula_id: String,
    pub log_value: LogValue,
    pub inputs: BTreeMap<String, f64>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub warnings: Vec<String>,
}

impl BoundReport {
    fn new(formula_id: &str, log_value: f64, inputs: &[(&str, f64)]) -> Self {
        Self {
            formula_id: formula_id.to_owned(),
            log_value: LogValue::from_f64(log_value),
            inputs: inputs.iter().map(|&(k, v)| (k.to_owned(), v)).collect(),
            warnings: Vec::new(),
        }
    }

    /// The bound itself, `exp(log_value)`; may under- or overflow.
    pub fn value(&self) -> f64 {
        self.log_value.as_f64().exp()
    }
}

/// `L(xi, t) = sup_y P(|xi - y| <= t)`, exact for finite support: the best
/// closed window of width `2t` can be slid until its left edge sits on an
/// atom.
pub fn levy_concentration(dist: &DistributionSpec, t: f64) -> Result<f64> {
    if !(t >= 0.0) {
        return Err(invalid(format!("window radius must be nonnegative, got {t}")));
    }
    let atoms = dist.atoms();
    let mut best = 0.0f64;
    let mut hi = 0;
    let mut mass = 0.0;
    for lo in 0..atoms.len() {
        if hi < lo {
            hi = lo;
            mass = 0.0;
        }
        while hi < atoms.len() && atoms[hi].value - atoms[lo].value <= 2.0 * t {
            mass += atoms[hi].prob;
            hi += 1;
        }
        best = best.max(mass);
        mass -= atoms[lo].prob;
    }
    Ok(best.min(1.0))
}

/// Subgaussian and anti-concentration parameters of an entry law.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ParamExtraction {
    /// Solution of `E exp(xi^2 / K^2) = 2`.
    pub k_subgauss: f64,
    /// `1 - L(xi, 1)`.
    pub p: f64,
    pub mean: f64,
    pub p_floor: f64,
    /// When `p < p_floor`: every scale `sigma > rescale_threshold` gives
    /// `1 - L(sigma xi, 1) >= p_floor`, and no smaller scale does. `inf`
    /// when no scale reaches the floor.
    #[serde(with = "ext_f64_opt", default, skip_serializing_if = "Option::is_none")]
    pub rescale_threshold: Option<f64>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub warnings: Vec<String>,
}

mod ext_f64_opt {
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(x: &Option<f64>, s: S) -> Result<S::Ok, S::Error> {
        match x {
            Some(v) => super::ext_f64::serialize(v, s),
            None => s.serialize_none(),
        }
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Option<f64>, D::Error> {
        #[derive(Deserialize)]
        struct W(#[serde(with = "super::ext_f64")] f64);
        Ok(Option::<W>::deserialize(d)?.map(|w| w.0))
    }
}

/// Bisection width for `K`.
pub const K_TOLERANCE: f64 = 1e-12;

/// `ln E exp(xi^2 / K^2)`, by log-sum-exp.
fn log_mgf_sq(dist: &DistributionSpec, k: f64) -> f64 {
    let terms: Vec<f64> = dist
        .atoms()
        .iter()
        .filter(|a| a.prob > 0.0)
        .map(|a| a.prob.ln() + (a.value / k).powi(2))
        .collect();
    let m = terms.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    m + terms.iter().map(|t| (t - m).exp()).sum::<f64>().ln()
}

/// Exact `K` and `p` for a finite-support law, plus the rescaling needed to
/// bring `p` up to `p_floor` when it falls short.
pub fn extract_params(dist: &DistributionSpec, p_floor: f64) -> Result<ParamExtraction> {
    if !(0.0..=1.0).contains(&p_floor) {
        return Err(invalid(format!("p floor must lie in [0, 1], got {p_floor}")));
    }
    let target = std::f64::consts::LN_2;
    let scale = dist.atoms().iter().fold(0.0f64, |m, a| m.max(a.value.abs()));
    // ln E exp(xi^2/K^2) decreases in K from +inf to 0; bracket then bisect
    let (mut lo, mut hi) = (scale, scale);
    while log_mgf_sq(dist, lo) <= target {
        lo *= 0.5;
    }
    while log_mgf_sq(dist, hi) > target {
        hi *= 2.0;
    }
    while hi - lo >= K_TOLERANCE {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if log_mgf_sq(dist, mid) > target {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let k_subgauss = 0.5 * (lo + hi);
    let levy = levy_concentration(dist, 1.0)?;
    let p = 1.0 - levy;
    let mut warnings = Vec::new();
    let mean = dist.mean();
    if mean.abs() > 1e-12 {
        warnings.push(format!("entries are not centered (mean {mean})"));
    }
    let rescale_threshold = (p < p_floor).then(|| {
        let t = levy_breakpoint(dist, 1.0 - p_floor);
        if t == 0.0 {
            warnings.push(format!("no scale reaches p >= {p_floor}: largest atom has mass above {}", 1.0 - p_floor));
            f64::INFINITY
        } else {
            1.0 / t
        }
    });
    Ok(ParamExtraction { k_subgauss, p, mean, p_floor, rescale_threshold, warnings })
}

/// Smallest window radius `t` with `L(xi, t) > cap`. `L(xi, .)` is a
/// nondecreasing step function whose jumps sit at half the pairwise atom
/// gaps, and closed windows make it right-continuous there.
fn levy_breakpoint(dist: &DistributionSpec, cap: f64) -> f64 {
    let atoms = dist.atoms();
    let mut radii: Vec<f64> = vec![0.0];
    for i in 0..atoms.len() {
        for j in i + 1..atoms.len() {
            radii.push(0.5 * (atoms[j].value - atoms[i].value));
        }
    }
    radii.sort_by(f64::total_cmp);
    radii.dedup();
    radii
        .into_iter()
        .find(|&t| levy_concentration(dist, t).expect("nonnegative radius") > cap)
        .unwrap_or(f64::INFINITY)
}

/// The coupled parameters `L = sqrt(k/p)`, `alpha = tau^4/4`, `r = tau/16`
/// and `R = exp(rho^2 n / (4 L^2))`, with `delta <= rho`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RegimeParams {
    n: usize,
    k: usize,
    tau: f64,
    rho: f64,
    delta: f64,
    p: f64,
    #[serde(rename = "L")]
    l: f64,
    alpha: f64,
    r: f64,
    /// `R`, which overflows for moderate `n`; `ln_R` is always finite.
    #[serde(rename = "R", with = "ext_f64")]
    big_r: f64,
    #[serde(rename = "ln_R")]
    ln_big_r: f64,
}

impl RegimeParams {
    pub fn new(n: usize, k: usize, tau: f64, rho: f64, delta: f64, p: f64) -> Result<Self> {
        let mut out = Self { n, k, tau, rho, delta, p, l: 0.0, alpha: 0.0, r: 0.0, big_r: 0.0, ln_big_r: 0.0 };
        out.recompute()?;
        Ok(out)
    }

    fn recompute(&mut self) -> Result<()> {
        if self.n == 0 || self.k == 0 {
            return Err(invalid("n and k must be at least 1"));
        }
        if !(self.tau > 0.0 && self.tau < 1.0) {
            return Err(invalid(format!("tau must lie in (0, 1), got {}", self.tau)));
        }
        if !(self.p > 0.0 && self.p <= 1.0) {
            return Err(invalid(format!("p must lie in (0, 1], got {}", self.p)));
        }
        if !(self.rho > 0.0 && self.rho.is_finite()) {
            return Err(invalid(format!("rho must be positive, got {}", self.rho)));
        }
        if !(self.delta > 0.0 && self.delta <= self.rho) {
            return Err(invalid(format!("need 0 < delta <= rho, got delta = {}, rho = {}", self.delta, self.rho)));
        }
        self.l = (self.k as f64 / self.p).sqrt();
        self.alpha = self.tau.powi(4) / 4.0;
        self.r = self.tau / 16.0;
        self.ln_big_r = self.rho * self.rho * self.n as f64 / (4.0 * self.l * self.l);
        self.big_r = self.ln_big_r.exp();
        Ok(())
    }

    fn set(&mut self, f: impl FnOnce(&mut Self)) -> Result<()> {
        let saved = self.clone();
        f(self);
        self.recompute().inspect_err(|_| *self = saved)
    }

    pub fn set_n(&mut self, n: usize) -> Result<()> {
        self.set(|s| s.n = n)
    }
    pub fn set_k(&mut self, k: usize) -> Result<()> {
        self.set(|s| s.k = k)
    }
    pub fn set_tau(&mut self, tau: f64) -> Result<()> {
        self.set(|s| s.tau = tau)
    }
    pub fn set_rho(&mut self, rho: f64) -> Result<()> {
        self.set(|s| s.rho = rho)
    }
    pub fn set_delta(&mut self, delta: f64) -> Result<()> {
        self.set(|s| s.delta = delta)
    }
    pub fn set_p(&mut self, p: f64) -> Result<()> {
        self.set(|s| s.p = p)
    }

    pub fn n(&self) -> usize {
        self.n
    }
    pub fn k(&self) -> usize {
        self.k
    }
    pub fn tau(&self) -> f64 {
        self.tau
    }
    pub fn rho(&self) -> f64 {
        self.rho
    }
    pub fn delta(&self) -> f64 {
        self.delta
    }
    pub fn p(&self) -> f64 {
        self.p
    }
    #[allow(non_snake_case)]
    pub fn L(&self) -> f64 {
        self.l
    }
    pub fn alpha(&self) -> f64 {
        self.alpha
    }
    pub fn r(&self) -> f64 {
        self.r
    }
    #[allow(non_snake_case)]
    pub fn R(&self) -> f64 {
        self.big_r
    }
    #[allow(non_snake_case)]
    pub fn ln_R(&self) -> f64 {
        self.ln_big_r
    }
}

/// Inputs shared by the two small-ball bounds. Absolute constants are
/// caller-supplied (default 1).
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SbpInputs {
    pub m: usize,
    #[serde(rename = "L")]
    pub l: f64,
    pub alpha: f64,
    /// LCD; may be `+inf`.
    #[serde(with = "ext_f64")]
    pub d: f64,
    pub t: f64,
    pub c: f64,
    /// When given, the hypothesis `L >= sqrt(m/p)` is checked.
    pub p: Option<f64>,
}

impl SbpInputs {
    fn validate(&self) -> Result<()> {
        if self.m == 0 {
            return Err(invalid("m must be at least 1"));
        }
        if !(self.l > 0.0 && self.alpha > 0.0 && self.c > 0.0) {
            return Err(invalid("L, alpha and C must be positive"));
        }
        if !(self.d > 0.0) {
            return Err(invalid(format!("LCD must be positive, got {}", self.d)));
        }
        if !(self.t >= 0.0 && self.t.is_finite()) {
            return Err(invalid(format!("t must be nonnegative, got {}", self.t)));
        }
        Ok(())
    }

    /// `m ln(C L / (alpha sqrt m)) + m ln(t + sqrt m / D)`.
    fn log_common(&self) -> f64 {
        let m = self.m as f64;
        let tail = self.t + m.sqrt() / self.d;
        if tail == 0.0 {
            return f64::NEG_INFINITY;
        }
        m * (self.c * self.l / (self.alpha * m.sqrt())).ln() + m * tail.ln()
    }

    fn inputs(&self) -> Vec<(&'static str, f64)> {
        let mut v = vec![("m", self.m as f64), ("L", self.l), ("alpha", self.alpha), ("D", self.d), ("t", self.t), ("C", self.c)];
        if let Some(p) = self.p {
            v.push(("p", p));
        }
        v
    }

    fn warnings(&self) -> Vec<String> {
        match self.p {
            Some(p) if self.l < (self.m as f64 / p).sqrt() => {
                vec![format!("L = {} is below sqrt(m/p) = {}", self.l, (self.m as f64 / p).sqrt())]
            }
            _ => Vec::new(),
        }
    }
}

/// Small-ball bound for `V^T xi` at scale `t sqrt m` in terms of the LCD of
/// `V` and `det(V V^T)^{1/2}`.
pub fn sbp_lcd_bound(inputs: &SbpInputs, det_sqrt: f64) -> Result<BoundReport> {
    inputs.validate()?;
    if !(det_sqrt > 0.0) {
        return Err(invalid(format!("det^(1/2) must be positive, got {det_sqrt}")));
    }
    let mut fields = inputs.inputs();
    fields.push(("det_sqrt", det_sqrt));
    let mut rep = BoundReport::new("sbp_lcd", inputs.log_common() - det_sqrt.ln(), &fields);
    rep.warnings = inputs.warnings();
    Ok(rep)
}

/// Small-ball bound for the projection of `xi` onto a subspace of dimension
/// `m` in terms of the subspace LCD.
pub fn sbp_proj_bound(inputs: &SbpInputs) -> Result<BoundReport> {
    inputs.validate()?;
    let mut rep = BoundReport::new("sbp_proj", inputs.log_common(), &inputs.inputs());
    rep.warnings = inputs.warnings();
    Ok(rep)
}

/// `P(sum Y_j <= n t) <= (C M t)^{m n}`.
pub fn tensorization_bound(m: f64, big_m: f64, t: f64, n: usize, c: f64) -> Result<BoundReport> {
    if !(m > 0.0 && big_m > 0.0 && c > 0.0 && n > 0) || !(t >= 0.0) {
        return Err(invalid("tensorization inputs must be positive"));
    }
    let log = if t == 0.0 { f64::NEG_INFINITY } else { m * n as f64 * (c * big_m * t).ln() };
    Ok(BoundReport::new("tensorization", log, &[("m", m), ("M", big_m), ("t", t), ("n", n as f64), ("C", c)]))
}

/// Largest dimension for exact lattice-point enumeration.
pub const LATTICE_EXACT_DIM_CAP: usize = 4;

/// `|Z^n ∩ B(0, R)|` by enumeration, for `n <= 4`.
pub fn lattice_ball_count(n: usize, radius: f64) -> Result<u64> {
    if n == 0 || n > LATTICE_EXACT_DIM_CAP {
        return Err(invalid(format!("exact lattice count needs 1 <= n <= {LATTICE_EXACT_DIM_CAP}, got {n}")));
    }
    if !(radius >= 0.0 && radius.is_finite()) {
        return Err(invalid(format!("radius must be finite and nonnegative, got {radius}")));
    }
    let r2 = radius * radius;
    let b = radius.floor() as i64;
    fn count(dims: usize, budget: f64, b: i64) -> u64 {
        if dims == 0 {
            return 1;
        }
        (-b..=b)
            .filter(|x| ((x * x) as f64) <= budget)
            .map(|x| count(dims - 1, budget - (x * x) as f64, b))
            .sum()
    }
    Ok(count(n, r2, b))
}

/// `n ln(2 + C R / sqrt n)`.
pub fn lattice_ball_bound(n: usize, radius: f64, c: f64) -> Result<BoundReport> {
    if n == 0 || !(radius >= 0.0) || !(c > 0.0) {
        return Err(invalid("lattice bound needs n >= 1, R >= 0, C > 0"));
    }
    let nf = n as f64;
    let log = nf * (2.0 + c * radius / nf.sqrt()).ln();
    Ok(BoundReport::new("lattice_ball", log, &[("n", nf), ("R", radius), ("C", c)]))
}

/// Inputs of the net cardinality bound.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NetInputs {
    pub d: Vec<f64>,
    pub n: usize,
    pub rho: f64,
    pub r: f64,
    #[serde(rename = "R", with = "ext_f64")]
    pub big_r: f64,
    pub delta: f64,
    pub c: f64,
}

/// `l n ln(C rho / (r delta)) + n sum_j ln(d_j / sqrt n)`, for
/// `d_j in [r sqrt n, R]`.
pub fn net_cardinality_bound(inputs: &NetInputs) -> Result<BoundReport> {
    let NetInputs { d, n, rho, r, big_r, delta, c } = inputs;
    if *n == 0 || d.is_empty() {
        return Err(invalid("need n >= 1 and at least one d_j"));
    }
    if !(*rho > 0.0 && *r > 0.0 && *delta > 0.0 && *c > 0.0) {
        return Err(invalid("rho, r, delta and C must be positive"));
    }
    let sn = (*n as f64).sqrt();
    let lo = r * sn;
    if let Some((j, dj)) = d.iter().enumerate().find(|(_, &dj)| !(dj >= lo && dj <= *big_r)) {
        return Err(invalid(format!("d_{j} = {dj} outside [r sqrt n, R] = [{lo}, {big_r}]")));
    }
    let l = d.len() as f64;
    let nf = *n as f64;
    let log = l * nf * (c * rho / (r * delta)).ln() + nf * d.iter().map(|dj| (dj / sn).ln()).sum::<f64>();
    Ok(BoundReport::new(
        "net_cardinality",
        log,
        &[("l", l), ("n", nf), ("rho", *rho), ("r", *r), ("R", *big_r), ("delta", *delta), ("C", *c)],
    ))
}

/// `-c l n`.
pub fn compressible_event_bound(l: usize, n: usize, c: f64) -> Result<BoundReport> {
    if l > n {
        return Err(invalid(format!("need l <= n, got l = {l}, n = {n}")));
    }
    let log = -c * l as f64 * n as f64;
    Ok(BoundReport::new("compressible_event", log + 0.0, &[("l", l as f64), ("n", n as f64), ("c", c)]))
}

/// `-l n`.
pub fn matrix_v_event_bound(l: usize, n: usize) -> Result<BoundReport> {
    if l > n {
        return Err(invalid(format!("need l <= n, got l = {l}, n = {n}")));
    }
    let log = -(l as f64) * n as f64;
    Ok(BoundReport::new("matrix_v_event", log + 0.0, &[("l", l as f64), ("n", n as f64)]))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rademacher_params() {
        let r = DistributionSpec::rademacher();
        let ex = extract_params(&r, 0.5).unwrap();
        assert!((ex.k_subgauss - 1.0 / std::f64::consts::LN_2.sqrt()).abs() < 1e-11);
        assert_eq!(ex.p, 0.0);
        assert_eq!(ex.rescale_threshold, Some(1.0));
        let scaled = r.scaled(1.5).unwrap();
        assert_eq!(levy_concentration(&scaled, 1.0).unwrap(), 0.5);
    }

    #[test]
    fn levy_examples() {
        let r = DistributionSpec::rademacher();
        assert_eq!(levy_concentration(&r, 0.0).unwrap(), 0.5);
        assert_eq!(levy_concentration(&r, 0.5).unwrap(), 0.5);
        assert_eq!(levy_concentration(&r, 1.0).unwrap(), 1.0);
        let b = DistributionSpec::bernoulli(0.3).unwrap();
        assert!((levy_concentration(&b, 0.4).unwrap() - 0.7).abs() < 1e-15);
        let u = DistributionSpec::uniform_int(3).unwrap();
        assert!((levy_concentration(&u, 1.0).unwrap() - 3.0 / 7.0).abs() < 1e-15);
    }

    #[test]
    fn unreachable_floor() {
        let b = DistributionSpec::bernoulli(0.9).unwrap();
        let ex = extract_params(&b, 0.5).unwrap();
        assert_eq!(ex.rescale_threshold, Some(f64::INFINITY));
        assert!(!ex.warnings.is_empty());
    }

    #[test]
    fn regime_equations() {
        let mut g = RegimeParams::new(100, 4, 0.5, 0.1, 0.05, 0.5).unwrap();
        assert_eq!(g.L(), (8.0f64).sqrt());
        assert_eq!(g.alpha(), 0.5f64.powi(4) / 4.0);
        assert_eq!(g.r(), 0.5 / 16.0);
        assert!((g.ln_R() - 0.01 * 100.0 / 32.0).abs() < 1e-15);
        g.set_k(9).unwrap();
        assert_eq!(g.L(), 18.0f64.sqrt());
        assert!(g.set_delta(0.2).is_err());
        assert_eq!(g.delta(), 0.05);
        assert!(RegimeParams::new(10, 1, 1.0, 0.1, 0.05, 0.5).is_err());
    }

    #[test]
    fn sbp_examples() {
        let inp = SbpInputs { m: 1, l: 1.0, alpha: 1.0, d: 10.0, t: 0.5, c: 1.0, p: None };
        let rep = sbp_lcd_bound(&inp, 1.0).unwrap();
        assert!((rep.value() - 0.6).abs() < 1e-12);
        let zero = SbpInputs { t: 0.0, d: f64::INFINITY, ..inp };
        assert_eq!(sbp_lcd_bound(&zero, 1.0).unwrap().log_value, LogValue::NegInfinity);
        assert_eq!(sbp_proj_bound(&zero).unwrap().log_value, LogValue::NegInfinity);
        assert!(sbp_lcd_bound(&inp, 0.0).is_err());
        let warn = SbpInputs { m: 4, l: 1.0, p: Some(0.5), ..inp };
        assert_eq!(sbp_proj_bound(&warn).unwrap().warnings.len(), 1);
    }

    #[test]
    fn tensorization_examples() {
        let r = tensorization_bound(2.0, 0.5, 0.2, 3, 2.0).unwrap();
        assert!((r.log_value.as_f64() - 6.0 * 0.2f64.ln()).abs() < 1e-12);
        assert_eq!(tensorization_bound(1.0, 1.0, 1.0, 5, 1.0).unwrap().log_value, LogValue::Finite(0.0));
        assert_eq!(tensorization_bound(1.0, 1.0, 0.0, 5, 1.0).unwrap().log_value, LogValue::NegInfinity);
    }

    #[test]
    fn lattice_examples() {
        assert_eq!(lattice_ball_count(1, 2.5).unwrap(), 5);
        assert_eq!(lattice_ball_count(2, 2.0).unwrap(), 13);
        assert_eq!(lattice_ball_count(3, 1.0).unwrap(), 7);
        assert_eq!(lattice_ball_count(2, 0.0).unwrap(), 1);
        assert!(lattice_ball_count(5, 1.0).is_err());
    }

    #[test]
    fn net_examples() {
        let n = 16;
        let base = NetInputs { d: vec![4.0, 4.0], n, rho: 0.5, r: 0.1, big_r: 100.0, delta: 0.05, c: 1.0 };
        let r0 = net_cardinality_bound(&base).unwrap().log_value.as_f64();
        assert!((r0 - 2.0 * 16.0 * (0.5f64 / 0.005).ln()).abs() < 1e-9);
        let doubled = NetInputs { d: vec![8.0, 4.0], ..base.clone() };
        let r1 = net_cardinality_bound(&doubled).unwrap().log_value.as_f64();
        assert!((r1 - r0 - 16.0 * std::f64::consts::LN_2).abs() < 1e-9);
        let bad = NetInputs { d: vec![0.1], ..base };
        assert!(net_cardinality_bound(&bad).is_err());
    }

    #[test]
    fn event_bounds() {
        assert_eq!(compressible_event_bound(0, 5, 1.0).unwrap().log_value, LogValue::Finite(0.0));
        assert_eq!(compressible_event_bound(10, 10, 1.0).unwrap().log_value, LogValue::Finite(-100.0));
        assert_eq!(matrix_v_event_bound(10, 10).unwrap().log_value, LogValue::Finite(-100.0));
        assert!(matrix_v_event_bound(11, 10).is_err());
    }
}
