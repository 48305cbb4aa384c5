use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use plci_bench::{path_instance, random_graph_instance, storage};
use plci_core::dsep::d_connected;
use plci_core::oracle::DEFAULT_GUARD;
use plci_core::{Deadline, Oracle};

fn dsep(c: &mut Criterion) {
    let mut group = c.benchmark_group("dsep");
    for size in [25, 50, 100] {
        let inst = random_graph_instance(0, size);
        let odd: Vec<usize> = (0..size).step_by(2).collect();
        let obs = inst.observe(&odd);
        let last_even = if size % 2 == 0 { size - 1 } else { size - 2 };
        group.bench_with_input(BenchmarkId::from_parameter(size), &size, |b, _| {
            b.iter(|| d_connected(inst.dag(), 1, last_even, &obs, &Deadline::none()).unwrap())
        });
    }
    group.finish();
}

fn oracle(c: &mut Criterion) {
    let mut group = c.benchmark_group("oracle");
    group.sample_size(10);
    for size in [4, 6, 8] {
        let (inst, params) = path_instance(size);
        group.bench_with_input(BenchmarkId::from_parameter(size), &size, |b, _| {
            b.iter(|| {
                let o =
                    Oracle::for_instance(&inst, &params, DEFAULT_GUARD, &Deadline::none()).unwrap();
                o.ci_check(0, size - 1, &[1]).unwrap()
            })
        });
    }
    group.finish();
}

fn grounding(c: &mut Criterion) {
    c.bench_function("ground storage", |b| b.iter(storage));
}

criterion_group!(benches, dsep, oracle, grounding);
criterion_main!(benches);
