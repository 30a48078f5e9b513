//! Values computed outside this crate (exact rational elimination, closed
//! forms, bisection in plain floating point) and frozen here.

use std::path::PathBuf;

use num_rational::BigRational;
use ranklab::bounds::{extract_params, lattice_ball_count};
use ranklab::experiments::{estimate_deficiency, exhaustive_deficiency, exhaustive_deficiency_with, RankTrialConfig};
use ranklab::lcd::{lcd_condition, lcd_vector, LcdParams};
use ranklab::stats::{wilson_interval, Z95};
use ranklab::{DistributionSpec, Execution, RealMatrix};

fn golden(name: &str) -> Vec<u64> {
    let path: PathBuf = [env!("CARGO_MANIFEST_DIR"), "tests", "golden", name].iter().collect();
    let text = std::fs::read_to_string(&path).unwrap_or_else(|e| panic!("{}: {e}", path.display()));
    let mut counts = Vec::new();
    for line in text.lines().filter(|l| !l.starts_with('#') && !l.trim().is_empty()) {
        let mut it = line.split_whitespace();
        let d: usize = it.next().unwrap().parse().unwrap();
        assert_eq!(d, counts.len(), "deficiencies must be listed in order");
        counts.push(it.next().unwrap().parse().unwrap());
    }
    counts
}

fn laws() -> [(&'static str, DistributionSpec); 2] {
    [("rademacher", DistributionSpec::rademacher()), ("bernoulli", DistributionSpec::bernoulli(0.5).unwrap())]
}

#[test]
fn exhaustive_matches_golden_files() {
    for (name, law) in laws() {
        for n in 1..=4 {
            let want = golden(&format!("{name}_n{n}.txt"));
            let got = exhaustive_deficiency(&law, n).unwrap();
            assert_eq!(got.matrix_counts, want, "{name} n = {n}");
            assert_eq!(got.matrices, want.iter().sum::<u64>());
        }
    }
}

#[test]
fn exhaustive_is_execution_independent() {
    let law = DistributionSpec::rademacher();
    let a = exhaustive_deficiency_with(&law, 4, false, Execution::Sequential).unwrap();
    let b = exhaustive_deficiency_with(&law, 4, false, Execution::Parallel).unwrap();
    assert_eq!(a, b);
}

#[test]
fn singularity_probabilities_n2() {
    let rad = exhaustive_deficiency(&DistributionSpec::rademacher(), 2).unwrap();
    assert_eq!(rad.at_least(1), BigRational::new(1.into(), 2.into()));
    let ber = exhaustive_deficiency(&DistributionSpec::bernoulli(0.5).unwrap(), 2).unwrap();
    assert_eq!(ber.at_least(1), BigRational::new(10.into(), 16.into()));
}

#[test]
fn enumeration_mode_reproduces_golden_counts() {
    for (name, law) in laws() {
        let want = golden(&format!("{name}_n3.txt"));
        let cfg = RankTrialConfig::enumerate(law, 3, 3).unwrap();
        let res = estimate_deficiency(&cfg, Execution::Parallel).unwrap();
        assert_eq!(res.histogram.counts, want, "{name}");
        assert_eq!(res.histogram.trials, 512);
    }
}

#[test]
fn rademacher_n4_singular_count() {
    // 43264 of the 65536 sign matrices of order 4 are singular.
    let law = exhaustive_deficiency(&DistributionSpec::rademacher(), 4).unwrap();
    assert_eq!(law.matrix_counts.iter().skip(1).sum::<u64>(), 43_264);
}

#[test]
fn wilson_reference_values() {
    let (lo, hi) = wilson_interval(8, 16, Z95);
    assert!((lo - 0.279_995_636_103_260_17).abs() < 1e-14);
    assert!((hi - 0.720_004_363_896_739_8).abs() < 1e-14);
    let (lo, hi) = wilson_interval(0, 10, Z95);
    assert_eq!(lo, 0.0);
    assert!((hi - 0.277_532_799_862_889_2).abs() < 1e-14);
    let (lo, hi) = wilson_interval(10, 10, Z95);
    assert!((lo - 0.722_467_200_137_110_6).abs() < 1e-14);
    assert!(hi <= 1.0 && hi > 1.0 - 1e-14);
}

#[test]
fn rademacher_subgaussian_constant() {
    // E exp(xi^2 / K^2) = exp(1 / K^2) = 2.
    let p = extract_params(&DistributionSpec::rademacher(), 0.5).unwrap();
    assert!((p.k_subgauss - 1.201_122_408_786_449_8).abs() < 1e-9, "{}", p.k_subgauss);
    assert!(p.k_subgauss >= 1.201_122_408_786_449_8 - 1e-12, "must not undershoot");
}

#[test]
fn lattice_counts_by_enumeration() {
    for (r, want) in [(0.5, 1), (1.0, 5), (2.0, 13), (3.0, 29), (5.5, 97)] {
        assert_eq!(lattice_ball_count(2, r).unwrap(), want, "R = {r}");
    }
    assert_eq!(lattice_ball_count(3, 2.0).unwrap(), 33);
    assert_eq!(lattice_ball_count(4, 3.0).unwrap(), 425);
    assert_eq!(lattice_ball_count(3, 10.0).unwrap(), 4169);
}

fn ones(n: usize) -> Vec<f64> {
    vec![1.0 / (n as f64).sqrt(); n]
}

#[test]
fn lcd_of_ones_matches_root_of_crossing_equation() {
    // For n = 100 and n = 144 the first witness solves
    // sqrt(n) - t = 2 sqrt(ln(t / 8)), t < sqrt(n).
    let params = LcdParams::new(2.0, 0.25).unwrap();
    for (n, root) in [(100, 9.240_613_963_654_248), (144, 10.889_415_132_497_476)] {
        let est = lcd_vector(&ones(n), params, 20.0, 0.02).unwrap();
        assert!(est.upper_certified);
        assert!((est.upper - root).abs() < 1e-9, "n = {n}: {} vs {root}", est.upper);
        assert!(est.lower <= est.upper);
        let v = RealMatrix::new(1, n, ones(n)).unwrap();
        assert!(lcd_condition(&v, &est.witness, params).unwrap());
    }
}

#[test]
fn lcd_of_ones_n64_is_an_unattained_infimum() {
    // At theta = 8 both sides of the condition vanish, and every theta just
    // above 8 is a witness; the certified upper is the first float witness.
    let params = LcdParams::new(2.0, 0.25).unwrap();
    let est = lcd_vector(&ones(64), params, 20.0, 0.02).unwrap();
    let v = RealMatrix::new(1, 64, ones(64)).unwrap();
    assert!(!lcd_condition(&v, &[8.0], params).unwrap());
    assert!(lcd_condition(&v, &est.witness, params).unwrap());
    assert!(est.upper > 8.0 && est.upper - 8.0 < 1e-12, "{}", est.upper);
    assert!(est.lower <= 8.0);
}
