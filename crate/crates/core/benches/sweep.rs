use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use qnet_core::slh::random_slh;
use qnet_core::uncertainty::{
    cavity_box, cavity_nominal, stability_sweep_with, Direction, Family, Parameter, UncertaintyBox,
};
use qnet_core::{ComplexMatrix, Coupling, Execution, Hamiltonian};

fn modes_box(n: usize, m: usize) -> UncertaintyBox {
    let dir = |k: usize| Direction {
        coupling: Coupling::new(
            ComplexMatrix::from_fn(m, n, |i, j| {
                if (i + j + k).is_multiple_of(3) {
                    1.0.into()
                } else {
                    0.0.into()
                }
            }),
            ComplexMatrix::zeros(m, n),
        ),
        hamiltonian: Hamiltonian::new(ComplexMatrix::identity(n), ComplexMatrix::zeros(n, n)),
    };
    UncertaintyBox::new(
        vec![Parameter::new("s", -0.2, 0.2), Parameter::new("t", -0.2, 0.2)],
        Family::GenericAdditive {
            directions: vec![dir(0), dir(1)],
        },
    )
    .unwrap()
}

fn sweeps(c: &mut Criterion) {
    let mut group = c.benchmark_group("stability_sweep");
    let cavity = cavity_nominal([1.0, 1.0, 1.0]).unwrap();
    let cbox = cavity_box((-0.5, 0.5), (-0.3, 0.3)).unwrap();
    let big = random_slh(8, 4, 7);
    let bbox = modes_box(8, 4);
    for exec in [Execution::Sequential, Execution::Parallel] {
        let label = format!("{exec:?}");
        group.bench_with_input(BenchmarkId::new("cavity_41x41", &label), &exec, |b, &e| {
            b.iter(|| stability_sweep_with(&cavity, &cbox, 41, 0.0, e).unwrap())
        });
        group.bench_with_input(BenchmarkId::new("8_modes_16x16", &label), &exec, |b, &e| {
            b.iter(|| stability_sweep_with(&big, &bbox, 16, 0.0, e).unwrap())
        });
    }
    group.finish();
}

criterion_group!(benches, sweeps);
criterion_main!(benches);
