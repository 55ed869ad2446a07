use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use l1min::numerics::{chol_rank1, pcg_solve, soft_threshold, CholFactor, RankOneSign};
use l1min::{solve, Algorithm, Problem, SolverConfig};
use l1min_bench::fixture;
use std::hint::black_box;

fn noiseless(c: &mut Criterion) {
    let mut group = c.benchmark_group("basis_pursuit_n400_d200_k20");
    group.sample_size(10);
    let (a, b) = fixture(400, 200, 20, 0.0, 1);
    let p = Problem::new(&a, &b).unwrap();
    let config = SolverConfig::default();
    for algo in [Algorithm::Pdipa, Algorithm::Homotopy, Algorithm::Palm, Algorithm::Dalm] {
        group.bench_function(BenchmarkId::from_parameter(algo.name()), |bch| {
            bch.iter(|| solve(algo, black_box(&p), &config).unwrap())
        });
    }
    group.finish();
}

fn noisy(c: &mut Criterion) {
    let mut group = c.benchmark_group("lasso_n400_d200_k20_sigma0.01");
    group.sample_size(10);
    let (a, b) = fixture(400, 200, 20, 0.01, 2);
    let p = Problem::new(&a, &b).unwrap();
    let config = SolverConfig::default();
    for algo in [Algorithm::Homotopy, Algorithm::Gpsr, Algorithm::Tnipm, Algorithm::Ist, Algorithm::Fista] {
        group.bench_function(BenchmarkId::from_parameter(algo.name()), |bch| {
            bch.iter(|| solve(algo, black_box(&p), &config).unwrap())
        });
    }
    group.finish();
}

fn kernels(c: &mut Criterion) {
    let (a, b) = fixture(400, 200, 20, 0.0, 3);
    let u = a.matvec_t(&b);
    c.bench_function("soft_threshold_400", |bch| bch.iter(|| soft_threshold(black_box(&u), 0.1).unwrap()));
    c.bench_function("matvec_t_200x400", |bch| bch.iter(|| a.matvec_t(black_box(&b))));

    let mut gram = a.matmul(&a.transpose()).unwrap();
    for i in 0..gram.rows() {
        gram.set(i, i, gram.get(i, i) + 1.0);
    }
    let factor = CholFactor::factor(&gram).unwrap();
    let v = a.column(0);
    c.bench_function("chol_rank1_update_200", |bch| {
        bch.iter(|| chol_rank1(black_box(&factor), &v, RankOneSign::Update).unwrap())
    });
    c.bench_function("pcg_200", |bch| {
        bch.iter(|| pcg_solve(|x| gram.matvec(x), black_box(&b), None, 1e-10, 200).unwrap())
    });
}

criterion_group!(benches, noiseless, noisy, kernels);
criterion_main!(benches);
