use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};

use ranklab::experiments::{estimate_deficiency, RankTrialConfig};
use ranklab::{DistributionSpec, Execution};

fn deficiency_estimation(c: &mut Criterion) {
    let mut group = c.benchmark_group("estimate_deficiency");
    group.sample_size(10);
    for n in [8usize, 16] {
        let cfg = RankTrialConfig::new(DistributionSpec::rademacher(), n, 2, 20_000, 7);
        for (label, exec) in [("sequential", Execution::Sequential), ("parallel", Execution::Parallel)] {
            group.bench_with_input(BenchmarkId::new(label, n), &cfg, |b, cfg| {
                b.iter(|| estimate_deficiency(cfg, exec).unwrap());
            });
        }
    }
    group.finish();
}

criterion_group!(benches, deficiency_estimation);
criterion_main!(benches);
