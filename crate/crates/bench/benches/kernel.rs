use criterion::{criterion_group, criterion_main, Criterion};
use std::hint::black_box;

use polyglue::fixtures::*;
use polyglue::{develop, Cone, DevelopOptions};

fn double_description(c: &mut Criterion) {
    for (name, p) in [("cube", cube()), ("octahedron", octahedron()), ("hexagon", hexagon())] {
        let rays = p.vertices.clone();
        let n = rays[0].len();
        c.bench_function(&format!("dd/{name}"), |b| b.iter(|| Cone::from_generators(n, black_box(&rays), &[])));
    }
}

fn classify(c: &mut Criterion) {
    for (name, p) in polytope_catalog() {
        c.bench_function(&format!("classify/{name}"), |b| {
            b.iter(|| {
                let p = black_box(&p);
                (p.is_triangular().is_some(), p.is_cone_like().is_some(), p.is_thin().is_some())
            })
        });
    }
}

fn development(c: &mut Criterion) {
    let mut g = c.benchmark_group("develop");
    g.sample_size(10);
    for (name, spec, depth) in [("square-torus", square_torus(), 5), ("cube-3-torus", cube_torus(), 2)] {
        g.bench_function(format!("{name}/{depth}"), |b| {
            b.iter(|| develop(black_box(&spec), 0, depth, DevelopOptions::default()).expect("develops"))
        });
    }
    g.finish();
}

criterion_group!(benches, double_description, classify, development);
criterion_main!(benches);
