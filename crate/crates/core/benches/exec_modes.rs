use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use dgalab::cohomology::Cohomology;
use dgalab::dga::{DgaSpec, FundamentalClass};
use dgalab::fixtures;
use dgalab::inflexibility::*;
use dgalab::Exec;

const MODES: [(&str, Exec); 2] = [("sequential", Exec::Sequential), ("parallel", Exec::Parallel)];

fn constraints(c: &mut Criterion) {
    let mut g = c.benchmark_group("chain_constraints");
    for (name, f) in fixtures::all() {
        let an = build_ansatz(&f.spec);
        for (mode, exec) in MODES {
            g.bench_with_input(BenchmarkId::new(mode, name), &exec, |b, &exec| {
                b.iter(|| chain_constraints(&f.spec, &an, exec, DEFAULT_EXPANSION_BUDGET).unwrap())
            });
        }
    }
    g.finish();
}

fn cohomology(c: &mut Criterion) {
    let mut g = c.benchmark_group("cohomology_middle");
    for (name, f) in fixtures::all() {
        let mid = (f.spec.formal_dimension() / 2) as u32;
        for (mode, exec) in MODES {
            // Fresh instance per iteration so the degree cache does not hide the work.
            g.bench_with_input(BenchmarkId::new(mode, name), &exec, |b, &exec| {
                b.iter(|| Cohomology::direct(&f.spec, exec).space(mid).dimension())
            });
        }
    }
    g.finish();
}

fn certify_square(c: &mut Criterion) {
    let a3 = fixtures::a3();
    let t = DgaSpec::tensor_product(&a3.spec, &a3.spec);
    let fc = a3.fundamental.as_ref().unwrap();
    let fc = FundamentalClass::tensor(&a3.spec, fc, &a3.spec, fc, &t);
    let mut g = c.benchmark_group("certify_a3_square");
    g.sample_size(10);
    for (mode, exec) in MODES {
        g.bench_function(mode, |b| {
            b.iter(|| {
                let h = Cohomology::with_exec(&t, exec);
                certify_inflexible(&h, &fc, &CertifyConfig::default().with_exec(exec)).verdict
            })
        });
    }
    g.finish();
}

criterion_group!(benches, constraints, cohomology, certify_square);
criterion_main!(benches);
