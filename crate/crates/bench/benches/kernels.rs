use std::hint::black_box;

use criterion::{criterion_group, criterion_main, Criterion};

use qhalab::{
    conv_fo, conv_oo, phi_op, quasi_radialize, toeplitz, weyl, OperatorMatrix, SpectralFunction, SpectralGrid,
    Symbol, TruncatedSpace, C64,
};

fn space_construction(c: &mut Criterion) {
    c.bench_function("fock n=1 N=16", |b| b.iter(|| TruncatedSpace::fock(1, black_box(16)).unwrap()));
    c.bench_function("fock n=2 N=8", |b| b.iter(|| TruncatedSpace::fock(2, black_box(8)).unwrap()));
}

fn operators(c: &mut Criterion) {
    let s1 = TruncatedSpace::fock(1, 16).unwrap();
    let s2 = TruncatedSpace::fock(2, 8).unwrap();
    let a1 = Symbol::plane_wave(vec![C64::new(0.5, 0.3)]);
    let a2 = Symbol::plane_wave(vec![C64::new(0.5, 0.3), C64::new(0.0, 0.0)]);
    let z = [C64::new(0.3, -0.2)];
    c.bench_function("toeplitz n=1 N=16", |b| b.iter(|| toeplitz(&s1, black_box(&a1)).unwrap()));
    c.bench_function("toeplitz n=2 N=8", |b| b.iter(|| toeplitz(&s2, black_box(&a2)).unwrap()));
    c.bench_function("weyl n=1 N=16", |b| b.iter(|| weyl(&s1, black_box(&z)).unwrap()));
    let x = OperatorMatrix::matrix_unit(&s2, 0, 1);
    c.bench_function("quasi_radialize (1,1) N=8", |b| b.iter(|| quasi_radialize(black_box(&x), &[1, 1]).unwrap()));
}

fn convolutions(c: &mut Criterion) {
    let s = TruncatedSpace::fock(1, 16).unwrap();
    let phi = phi_op(&s).unwrap();
    let e01 = OperatorMatrix::matrix_unit(&s, 0, 1);
    c.bench_function("phi * E01 N=16", |b| b.iter(|| conv_fo(&Symbol::phi(1), black_box(&e01)).unwrap()));
    c.bench_function("Phi * E01 evaluated", |b| {
        let f = conv_oo(&phi, &e01).unwrap();
        b.iter(|| f.eval(black_box(&[C64::new(0.4, 0.1)])))
    });
}

fn spectral(c: &mut Criterion) {
    let grid = SpectralGrid::new(1, 6.0, 256).unwrap();
    let f = SpectralFunction::phi(1);
    c.bench_function("inverse fft 256^2", |b| b.iter(|| f.to_grid(black_box(&grid)).unwrap()));
}

criterion_group!(benches, space_construction, operators, convolutions, spectral);
criterion_main!(benches);
