//! Finite-support entry distributions.

use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Atom {
    pub value: f64,
    pub prob: f64,
}

/// A non-constant real distribution with finitely many atoms.
///
/// Atoms are kept sorted by value, duplicates merged and zero-mass atoms
/// dropped.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "DistributionRepr", into = "DistributionRepr")]
pub struct DistributionSpec {
    name: String,
    atoms: Vec<Atom>,
    cumulative: Vec<f64>,
}

#[derive(Serialize, Deserialize)]
struct DistributionRepr {
    name: String,
    atoms: Vec<Atom>,
}

impl TryFrom<DistributionRepr> for DistributionSpec {
    type Error = Error;
    fn try_from(r: DistributionRepr) -> Result<Self> {
        DistributionSpec::new(r.name, r.atoms)
    }
}

impl From<DistributionSpec> for DistributionRepr {
    fn from(d: DistributionSpec) -> Self {
        DistributionRepr { name: d.name, atoms: d.atoms }
    }
}

const PROB_SUM_TOL: f64 = 1e-12;

impl DistributionSpec {
    pub fn new(name: impl Into<String>, atoms: Vec<Atom>) -> Result<Self> {
        let name = name.into();
        for a in &atoms {
            if !a.value.is_finite() || !a.prob.is_finite() {
                return Err(Error::InvalidDistribution(format!("non-finite atom {a:?}")));
            }
            if a.prob < 0.0 {
                return Err(Error::InvalidDistribution(format!("negative probability {}", a.prob)));
            }
        }
        let total: f64 = atoms.iter().map(|a| a.prob).sum();
        if (total - 1.0).abs() > PROB_SUM_TOL {
            return Err(Error::InvalidDistribution(format!("probabilities sum to {total}")));
        }
        let mut merged: Vec<Atom> = Vec::with_capacity(atoms.len());
        let mut sorted: Vec<Atom> = atoms.into_iter().filter(|a| a.prob > 0.0).collect();
        sorted.sort_by(|a, b| a.value.total_cmp(&b.value));
        for a in sorted {
            match merged.last_mut() {
                Some(last) if last.value == a.value => last.prob += a.prob,
                _ => merged.push(a),
            }
        }
        if merged.len() < 2 {
            return Err(Error::InvalidDistribution(
                "constant distribution: need two distinct atoms with positive mass".into(),
            ));
        }
        let mut acc = 0.0;
        let cumulative = merged
            .iter()
            .map(|a| {
                acc += a.prob;
                acc
            })
            .collect();
        Ok(Self { name, atoms: merged, cumulative })
    }

    /// Uniform on {-1, +1}.
    pub fn rademacher() -> Self {
        Self::new("rademacher", vec![Atom { value: -1.0, prob: 0.5 }, Atom { value: 1.0, prob: 0.5 }])
            .expect("valid")
    }

    /// Bernoulli(q) on {0, 1}.
    pub fn bernoulli(q: f64) -> Result<Self> {
        check_unit_open(q)?;
        Self::new(
            format!("bernoulli({q})"),
            vec![Atom { value: 0.0, prob: 1.0 - q }, Atom { value: 1.0, prob: q }],
        )
    }

    /// Bernoulli(q) shifted to mean zero: atoms {-q, 1-q}.
    pub fn centered_bernoulli(q: f64) -> Result<Self> {
        check_unit_open(q)?;
        Self::new(
            format!("centered-bernoulli({q})"),
            vec![Atom { value: -q, prob: 1.0 - q }, Atom { value: 1.0 - q, prob: q }],
        )
    }

    /// Uniform on the integers {-a, ..., a}.
    pub fn uniform_int(a: u32) -> Result<Self> {
        if a == 0 {
            return Err(Error::InvalidDistribution("uniform(0) is constant".into()));
        }
        let count = 2 * a as usize + 1;
        let prob = 1.0 / count as f64;
        let atoms = (-(a as i64)..=a as i64).map(|v| Atom { value: v as f64, prob }).collect::<Vec<_>>();
        Self::new(format!("uniform({a})"), atoms)
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn atoms(&self) -> &[Atom] {
        &self.atoms
    }

    pub fn mean(&self) -> f64 {
        self.atoms.iter().map(|a| a.value * a.prob).sum()
    }

    pub fn variance(&self) -> f64 {
        let m = self.mean();
        self.atoms.iter().map(|a| (a.value - m).powi(2) * a.prob).sum()
    }

    pub fn is_integral(&self) -> bool {
        self.atoms.iter().all(|a| a.value.fract() == 0.0 && a.value.abs() < 2f64.powi(62))
    }

    /// Atom values as integers, or an integrality error.
    pub fn integer_values(&self) -> Result<Vec<i64>> {
        self.atoms
            .iter()
            .map(|a| {
                if a.value.fract() == 0.0 && a.value.abs() < 2f64.powi(62) {
                    Ok(a.value as i64)
                } else {
                    Err(Error::Integrality(a.value))
                }
            })
            .collect()
    }

    /// Integer atoms of the centered law, rescaled by the denominator of the
    /// (exact, rational) mean: `den * value - num` for `mean = num / den`.
    ///
    /// A matrix built from these values is a nonzero multiple of `A - E[A]`,
    /// so it has the same rank.
    pub fn centered_integer_values(&self) -> Result<Vec<i64>> {
        let values = self.integer_values()?;
        let mean = self.exact_mean();
        let (num, den) = (mean.numer().clone(), mean.denom().clone());
        values
            .iter()
            .map(|&v| {
                let x: BigInt = &den * BigInt::from(v) - &num;
                x.to_i64().ok_or_else(|| Error::InvalidDistribution("centered atom overflows i64".into()))
            })
            .collect()
    }

    /// Mean as an exact rational, from the exact binary values of the atoms.
    pub fn exact_mean(&self) -> BigRational {
        let mut acc = BigRational::zero();
        for a in &self.atoms {
            let v = BigRational::from_float(a.value).expect("finite");
            let p = BigRational::from_float(a.prob).expect("finite");
            acc += v * p;
        }
        let total: BigRational = self
            .atoms
            .iter()
            .map(|a| BigRational::from_float(a.prob).expect("finite"))
            .fold(BigRational::zero(), |s, p| s + p);
        acc / total
    }

    /// Atom probabilities as exact rationals, renormalised to sum to one.
    pub fn exact_probs(&self) -> Vec<BigRational> {
        let ps: Vec<BigRational> =
            self.atoms.iter().map(|a| BigRational::from_float(a.prob).expect("finite")).collect();
        let total = ps.iter().fold(BigRational::zero(), |s, p| s + p);
        ps.into_iter().map(|p| p / &total).collect()
    }

    /// Index of a random atom.
    #[inline]
    pub fn sample_index<R: Rng + ?Sized>(&self, rng: &mut R) -> usize {
        let u: f64 = rng.random();
        let i = self.cumulative.partition_point(|&c| c <= u);
        i.min(self.atoms.len() - 1)
    }

    #[inline]
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        self.atoms[self.sample_index(rng)].value
    }

    /// The law of `scale * xi`.
    pub fn scaled(&self, scale: f64) -> Result<Self> {
        if !(scale.is_finite() && scale > 0.0) {
            return Err(Error::InvalidParameter(format!("scale must be positive, got {scale}")));
        }
        Self::new(
            format!("{}*{scale}", self.name),
            self.atoms.iter().map(|a| Atom { value: a.value * scale, prob: a.prob }).collect(),
        )
    }

    fn builtin_name(&self) -> bool {
        self.name.parse::<DistributionSpec>().is_ok_and(|d| d == *self)
    }
}

fn check_unit_open(q: f64) -> Result<()> {
    if q > 0.0 && q < 1.0 {
        Ok(())
    } else {
        Err(Error::InvalidDistribution(format!("q must lie in (0,1), got {q}")))
    }
}

/// Built-in names serialize as the name; everything else as
/// `atoms: v1:p1,v2:p2,...`.
impl fmt::Display for DistributionSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.builtin_name() {
            return f.write_str(&self.name);
        }
        f.write_str("atoms: ")?;
        for (i, a) in self.atoms.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "{}:{}", a.value, a.prob)?;
        }
        Ok(())
    }
}

impl FromStr for DistributionSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if let Some(rest) = s.strip_prefix("atoms:") {
            let atoms = rest
                .split(',')
                .map(|pair| {
                    let (v, p) = pair
                        .trim()
                        .split_once(':')
                        .ok_or_else(|| Error::InvalidDistribution(format!("bad atom `{pair}`")))?;
                    let value = v.trim().parse::<f64>().map_err(|e| Error::InvalidDistribution(e.to_string()))?;
                    let prob = p.trim().parse::<f64>().map_err(|e| Error::InvalidDistribution(e.to_string()))?;
                    Ok(Atom { value, prob })
                })
                .collect::<Result<Vec<_>>>()?;
            return Self::new("atoms", atoms);
        }
        let (head, arg) = match s.split_once('(') {
            Some((h, rest)) => {
                let inner = rest
                    .strip_suffix(')')
                    .ok_or_else(|| Error::InvalidDistribution(format!("unbalanced parentheses in `{s}`")))?;
                (h.trim(), Some(inner.trim()))
            }
            None => (s, None),
        };
        let num = |a: Option<&str>| -> Result<f64> {
            a.ok_or_else(|| Error::InvalidDistribution(format!("`{head}` needs a parameter")))?
                .parse::<f64>()
                .map_err(|e| Error::InvalidDistribution(e.to_string()))
        };
        match head {
            "rademacher" if arg.is_none() => Ok(Self::rademacher()),
            "bernoulli" => Self::bernoulli(arg.map_or(Ok(0.5), |a| num(Some(a)))?),
            "centered-bernoulli" => Self::centered_bernoulli(arg.map_or(Ok(0.5), |a| num(Some(a)))?),
            "uniform" => {
                let a = num(arg)?;
                if a.fract() != 0.0 || a < 1.0 || a > u32::MAX as f64 {
                    return Err(Error::InvalidDistribution(format!("uniform needs a positive integer, got {a}")));
                }
                Self::uniform_int(a as u32)
            }
            _ => Err(Error::InvalidDistribution(format!("unknown distribution `{s}`"))),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::RngStream;

    #[test]
    fn constant_rejected() {
        let err = DistributionSpec::new("c", vec![Atom { value: 0.0, prob: 1.0 }]).unwrap_err();
        assert!(matches!(err, Error::InvalidDistribution(_)));
        let err = DistributionSpec::new(
            "c",
            vec![Atom { value: 2.0, prob: 0.5 }, Atom { value: 2.0, prob: 0.5 }],
        )
        .unwrap_err();
        assert!(matches!(err, Error::InvalidDistribution(_)));
    }

    #[test]
    fn probabilities_must_sum_to_one() {
        assert!(DistributionSpec::new(
            "x",
            vec![Atom { value: 0.0, prob: 0.5 }, Atom { value: 1.0, prob: 0.4 }]
        )
        .is_err());
        assert!(DistributionSpec::new(
            "x",
            vec![Atom { value: 0.0, prob: -0.5 }, Atom { value: 1.0, prob: 1.5 }]
        )
        .is_err());
    }

    #[test]
    fn parse_round_trip() {
        for s in ["rademacher", "bernoulli(0.5)", "centered-bernoulli(0.25)", "uniform(3)"] {
            let d: DistributionSpec = s.parse().unwrap();
            assert_eq!(d.to_string(), s);
        }
        let d: DistributionSpec = "atoms: -2:0.25,3:0.75".parse().unwrap();
        assert_eq!(d.to_string(), "atoms: -2:0.25,3:0.75");
        assert_eq!(d.to_string().parse::<DistributionSpec>().unwrap(), d);
        assert!("gaussian".parse::<DistributionSpec>().is_err());
    }

    #[test]
    fn centered_values() {
        let d = DistributionSpec::bernoulli(0.5).unwrap();
        assert_eq!(d.centered_integer_values().unwrap(), vec![-1, 1]);
        let d = DistributionSpec::bernoulli(0.25).unwrap();
        // mean 1/4: 4*0-1, 4*1-1
        assert_eq!(d.centered_integer_values().unwrap(), vec![-1, 3]);
        assert!(DistributionSpec::centered_bernoulli(0.3).unwrap().integer_values().is_err());
    }

    #[test]
    fn sampling_is_deterministic_and_in_support() {
        let d = DistributionSpec::uniform_int(2).unwrap();
        let draw = |s| {
            let mut r = RngStream::new(s, 0).rng();
            (0..50).map(|_| d.sample(&mut r)).collect::<Vec<_>>()
        };
        assert_eq!(draw(9), draw(9));
        assert!(draw(9).iter().all(|v| (-2.0..=2.0).contains(v) && v.fract() == 0.0));
    }
}
