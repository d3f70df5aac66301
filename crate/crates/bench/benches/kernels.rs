//! Microbenchmarks for the per-pixel kernels: color conversions, the
//! constrained optimization, and the separable blur.
//!
//! Run with: `cargo bench -p ostce-bench --bench kernels`

use criterion::{black_box, criterion_group, criterion_main, Criterion, Throughput};

use ostce_core::colorspace::{
    lab_to_linear, lab_to_scaled, linear_to_lab, linear_to_srgb, scaled_to_lab, srgb_to_linear,
    ScaledLab, Srgb8,
};
use ostce_core::optimizer::{optimize_color, EnhanceParams};
use ostce_core::preprocess::{gaussian_blur_linear, BlurParams, LinearImage};
use ostce_core::synth::{self, Xorshift};

fn conversion_chain(c: &mut Criterion) {
    let mut group = c.benchmark_group("conversion_chain");
    let colors: Vec<Srgb8> = {
        let mut rng = Xorshift::new(7);
        (0..4096)
            .map(|_| Srgb8::rgb(rng.next_u8(), rng.next_u8(), rng.next_u8()))
            .collect()
    };
    group.throughput(Throughput::Elements(colors.len() as u64));
    group.bench_function("srgb_to_scaled_and_back", |b| {
        b.iter(|| {
            let mut acc = 0u32;
            for &c in &colors {
                let s = lab_to_scaled(linear_to_lab(srgb_to_linear(black_box(c))));
                let back = linear_to_srgb(lab_to_linear(scaled_to_lab(s)));
                acc = acc.wrapping_add(back.g as u32);
            }
            acc
        });
    });
    group.finish();
}

fn optimize_kernel(c: &mut Criterion) {
    let mut group = c.benchmark_group("optimize_color");
    let params = EnhanceParams::default();
    let pairs: Vec<(ScaledLab, ScaledLab)> = {
        let mut rng = Xorshift::new(99);
        let mut out = Vec::new();
        while out.len() < 4096 {
            let p = ScaledLab::new(
                rng.next_f64() * 2.0 - 1.0,
                rng.next_f64() * 2.0 - 1.0,
                rng.next_f64() * 2.0 - 1.0,
            );
            let q = ScaledLab::new(
                rng.next_f64() * 2.0 - 1.0,
                rng.next_f64() * 2.0 - 1.0,
                rng.next_f64() * 2.0 - 1.0,
            );
            if p.norm() <= 1.0 && q.norm() <= 1.0 {
                out.push((p, q));
            }
        }
        out
    };
    group.throughput(Throughput::Elements(pairs.len() as u64));
    group.bench_function("random_in_ball", |b| {
        b.iter(|| {
            let mut acc = 0.0;
            for &(d, bg) in &pairs {
                acc += optimize_color(black_box(d), black_box(bg), &params).x;
            }
            acc
        });
    });
    group.finish();
}

fn blur_kernel(c: &mut Criterion) {
    let mut group = c.benchmark_group("gaussian_blur");
    let img = LinearImage::from_raster(&synth::noise(640, 360, 3));
    let params = BlurParams::default();
    group.throughput(Throughput::Elements((640 * 360) as u64));
    group.bench_function("640x360_k3", |b| {
        b.iter(|| gaussian_blur_linear(black_box(&img), &params));
    });
    group.finish();
}

criterion_group!(benches, conversion_chain, optimize_kernel, blur_kernel);
criterion_main!(benches);
