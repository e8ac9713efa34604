use std::hint::black_box;

use criterion::{criterion_group, criterion_main, Criterion};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use skewval::{SkewPoly, SkewRing, Solver, SeriesModel, Tower};

fn random_poly(ring: &SkewRing, m: usize, d: usize, rng: &mut ChaCha8Rng) -> SkewPoly {
    let tw = ring.tower();
    let mut coeffs: Vec<_> = (0..d).map(|_| tw.random(m, rng)).collect();
    coeffs.push(tw.random_nonzero(m, rng));
    ring.from_coeffs_in(m, coeffs).unwrap()
}

fn arithmetic(c: &mut Criterion) {
    let tw = Tower::new(2, 1, 24).unwrap();
    let ring = SkewRing::new(&tw);
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    for m in [1, 3] {
        let a = random_poly(&ring, m, 8, &mut rng);
        let b = random_poly(&ring, m, 8, &mut rng);
        let ab = ring.mul(&a, &b);
        c.bench_function(&format!("mul deg 8 over F_2^{m}"), |bn| {
            bn.iter(|| ring.mul(black_box(&a), black_box(&b)))
        });
        c.bench_function(&format!("right_divmod deg 16 by 8 over F_2^{m}"), |bn| {
            bn.iter(|| ring.right_divmod(black_box(&ab), black_box(&a)).unwrap())
        });
        c.bench_function(&format!("rgcd deg 8 over F_2^{m}"), |bn| {
            bn.iter(|| ring.rgcd(black_box(&a), black_box(&b)).unwrap())
        });
        c.bench_function(&format!("lclm deg 8 over F_2^{m}"), |bn| {
            bn.iter(|| ring.lclm(black_box(&a), black_box(&b)).unwrap())
        });
    }
}

fn factoring(c: &mut Criterion) {
    let tw = Tower::new(2, 1, 24).unwrap();
    let ring = SkewRing::new(&tw);
    let solver = Solver::new(SeriesModel::new(&tw, 8, 64));
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let qs: Vec<SkewPoly> = (0..8)
        .map(|_| random_poly(&ring, 1, rng.gen_range(4..=6), &mut rng))
        .collect();
    c.bench_function("factorize 8 polys deg <= 6 over F_2", |bn| {
        bn.iter(|| {
            for q in &qs {
                black_box(ring.factorize(q, 8).unwrap());
            }
        })
    });
    let r = random_poly(&ring, 2, 3, &mut rng);
    c.bench_function("ann_roots deg 3 over F_4", |bn| {
        bn.iter(|| solver.ann_roots(black_box(&r)).unwrap())
    });
}

criterion_group!(benches, arithmetic, factoring);
criterion_main!(benches);
