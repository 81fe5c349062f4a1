//! Benchmarks for the data-parallel inner loops, comparing the library's
//! batch path (rayon under the default `parallel` feature) against a
//! plain sequential composition of the same public functions.
//!
//! Run with the default features for the parallel numbers and with
//! `cargo bench --no-default-features` for the sequential baseline of the
//! batch path itself.

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};

use itfkit_core::interference::{
    classify, classify_batch, channels, quotient, scenarios, Scenario, ScenarioOptions,
};
use itfkit_core::model::{Component, ComponentId, Link, Platform, SymmetryClass};
use itfkit_core::parallel::is_parallel;
use itfkit_core::txn::{Application, Transaction};

/// `cores` initiators behind one bus and one memory, `txns_per_core`
/// transactions each, all owned by per-core applications.
fn shared_bus(cores: usize, txns_per_core: usize) -> Platform {
    let mut p = Platform::new("bench")
        .with_component(Component::transporter("BUS"))
        .with_component(Component::target("DDR").with_service("load"))
        .with_link("BUS", "DDR");
    for i in 0..cores {
        let core = format!("C{i}");
        p.components.push(Component::initiator(&core));
        p.links.push(Link::new(
            ComponentId::new(core.clone()),
            ComponentId::new("BUS"),
        ));
        let mut app = Application::new(format!("app{i}"));
        for t in 0..txns_per_core {
            app.transactions.push(Transaction {
                app: format!("app{i}"),
                name: format!("t{t}"),
                path: vec![core.as_str().into(), "BUS".into(), "DDR".into()],
                service: "load".into(),
                rate: 100 + t as u64,
                payload: 64,
            });
        }
        p.applications.push(app);
    }
    p
}

fn symmetric(p: &mut Platform, cores: usize) {
    p.symmetries.push(SymmetryClass::new(
        "cores",
        (0..cores)
            .map(|i| ComponentId::new(format!("C{i}")))
            .collect(),
    ));
}

fn bench_classify(c: &mut Criterion) {
    let mode = if is_parallel() { "parallel" } else { "sequential" };
    let mut group = c.benchmark_group("classify_batch");
    for &cores in &[8usize, 12] {
        let p = shared_bus(cores, 2);
        let scs: Vec<Scenario> = (2..=3)
            .flat_map(|n| scenarios(&p, n, ScenarioOptions::default()).unwrap())
            .collect();
        group.bench_with_input(
            BenchmarkId::new(format!("batch_{mode}"), scs.len()),
            &scs,
            |b, scs| b.iter(|| classify_batch(scs)),
        );
        group.bench_with_input(
            BenchmarkId::new("one_by_one", scs.len()),
            &scs,
            |b, scs| b.iter(|| scs.iter().map(classify).collect::<Vec<_>>()),
        );
    }
    group.finish();
}

fn bench_channels(c: &mut Criterion) {
    let mode = if is_parallel() { "parallel" } else { "sequential" };
    let mut group = c.benchmark_group("channels");
    for &cores in &[6usize, 10] {
        let p = shared_bus(cores, 1);
        group.bench_with_input(BenchmarkId::new(mode, cores), &p, |b, p| {
            b.iter(|| channels(p, 3, ScenarioOptions::default()).unwrap())
        });
    }
    group.finish();
}

fn bench_quotient(c: &mut Criterion) {
    let mode = if is_parallel() { "parallel" } else { "sequential" };
    let mut group = c.benchmark_group("quotient");
    for &cores in &[8usize, 12] {
        let mut p = shared_bus(cores, 1);
        symmetric(&mut p, cores);
        let scs = scenarios(&p, 2, ScenarioOptions::default()).unwrap();
        group.bench_with_input(
            BenchmarkId::new(mode, scs.len()),
            &(p, scs),
            |b, (p, scs)| b.iter(|| quotient(p, scs).unwrap()),
        );
    }
    group.finish();
}

criterion_group!(benches, bench_classify, bench_channels, bench_quotient);
criterion_main!(benches);
