use criterion::{criterion_group, criterion_main, Criterion};
use staircase::experiment::{run_seeded, Algo};
use staircase::optimizer::GdConfig;
use staircase::verification::gradient_check;
use staircase::{Landscape, LandscapeParams, Point};
use std::hint::black_box;

fn landscape(l: f64, n: usize) -> Landscape {
    Landscape::new(LandscapeParams::new(l, 0.5, 1.0, n).unwrap()).unwrap()
}

fn points(ls: &Landscape) -> Vec<Point> {
    (0..ls.n_regions())
        .map(|o| {
            let c = ls.center(o);
            Point::new(c.x1 + 0.13, c.x2 - 0.21)
        })
        .collect()
}

fn evaluation(c: &mut Criterion) {
    let ls = landscape(1.0, 9);
    let pts = points(&ls);
    c.bench_function("classify", |b| {
        b.iter(|| {
            pts.iter()
                .filter(|&&p| ls.classify(black_box(p)).is_outside())
                .count()
        })
    });
    c.bench_function("eval_f", |b| {
        b.iter(|| {
            pts.iter()
                .map(|&p| ls.eval_f(black_box(p)).unwrap())
                .sum::<f64>()
        })
    });
    c.bench_function("eval_grad", |b| {
        b.iter(|| {
            pts.iter()
                .map(|&p| ls.eval_grad(black_box(p)).unwrap()[0])
                .sum::<f64>()
        })
    });
    c.bench_function("project", |b| {
        b.iter(|| ls.project(black_box(Point::new(3.7, -0.4))))
    });
}

fn descent(c: &mut Criterion) {
    let mut g = c.benchmark_group("descent");
    for l in [1.0, 1.5] {
        let ls = landscape(l, 9);
        let cfg = GdConfig::for_landscape(&ls);
        g.bench_function(format!("gd_n9_L{l}"), |b| {
            b.iter(|| {
                run_seeded(&ls, &cfg, Algo::Gd, 0.0, black_box(1))
                    .unwrap()
                    .total_iters()
            })
        });
    }
    let ls = landscape(1.0, 9);
    let cfg = GdConfig::for_landscape(&ls);
    g.bench_function("sgd_n9", |b| {
        b.iter(|| {
            run_seeded(&ls, &cfg, Algo::Sgd, 0.1, black_box(1))
                .unwrap()
                .total_iters()
        })
    });
    g.finish();
}

fn verification(c: &mut Criterion) {
    let ls = landscape(1.0, 9);
    c.bench_function("gradient_check_1000", |b| {
        b.iter(|| {
            gradient_check(&ls, &ls, 1000, 1e-5, 1e-6, black_box(0))
                .unwrap()
                .worst_error
        })
    });
}

criterion_group!(benches, evaluation, descent, verification);
criterion_main!(benches);
