use criterion::{criterion_group, criterion_main, Criterion};
use quartic_conics_core::geometry::{residual_surface, NodeId, SurfaceParams};

fn bench_residuals(c: &mut Criterion) {
    let p = SurfaceParams::from_ints([1, 87, 15, 39, 21]).unwrap();
    c.bench_function("residual_surfaces_all_nodes", |b| {
        b.iter(|| {
            for i in NodeId::all() {
                let r = residual_surface(&p, i).unwrap();
                assert!(!r.is_zero());
            }
        })
    });
}

criterion_group!(benches, bench_residuals);
criterion_main!(benches);
