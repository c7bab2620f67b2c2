use std::hint::black_box;

use criterion::{criterion_group, criterion_main, Criterion};
use vip_core::compression::{intra_codec, ssim_map, QuantSpec, SsimParams};
use vip_core::engine::{generate_clip, render_demo, CorpusClip, CorpusOptions, ParamMap, ParamValue};
use vip_core::filters::{build_steerable, convolve2d, make_spatial_kernel, Boundary, SpatialKind};
use vip_core::motion::{horn_schunck, robust_flow, HSParams, RobustFlowParams};
use vip_core::synth::{dead_leaves, BlobField};
use vip_core::transforms::{dct2, dft2, dwt2, Wavelet};
use vip_core::video::Rational;

fn transforms(c: &mut Criterion) {
    let p = dead_leaves(256, 256, 1);
    c.bench_function("dft2 256x256", |b| b.iter(|| dft2(black_box(&p))));
    c.bench_function("dct2 256x256", |b| b.iter(|| dct2(black_box(&p))));
    c.bench_function("dwt2 db4 3 levels 256x256", |b| b.iter(|| dwt2(black_box(&p), 3, Wavelet::Db4).unwrap()));
}

fn filters(c: &mut Criterion) {
    let p = dead_leaves(320, 180, 2);
    let k = make_spatial_kernel(SpatialKind::Log { sigma: 2.0 }).unwrap();
    c.bench_function("LoG sigma 2 320x180", |b| b.iter(|| convolve2d(black_box(&p), &k, Boundary::Mirror).unwrap()));
    c.bench_function("steerable 4 scales 320x180", |b| b.iter(|| build_steerable(black_box(&p), 4).unwrap()));
}

fn motion(c: &mut Criterion) {
    let field = BlobField::new(128, 128, 7);
    let (f0, f1) = (field.render(128, 128, 0.0, 0.0), field.render(128, 128, 2.0, 1.0));
    let mut g = c.benchmark_group("flow 128x128");
    g.sample_size(10);
    g.bench_function("horn-schunck", |b| b.iter(|| horn_schunck(&f0, &f1, &HSParams::default()).unwrap()));
    g.bench_function("robust", |b| b.iter(|| robust_flow(&f0, &f1, &RobustFlowParams::default()).unwrap()));
    g.finish();
}

fn quality(c: &mut Criterion) {
    let p = dead_leaves(640, 360, 3);
    let q = QuantSpec::mpeg1(8).unwrap();
    let recon = intra_codec(&p, &q).recon;
    c.bench_function("intra codec q8 640x360", |b| b.iter(|| intra_codec(black_box(&p), &q)));
    c.bench_function("ssim 640x360", |b| b.iter(|| ssim_map(&p, black_box(&recon), &SsimParams::default()).unwrap()));
}

fn render(c: &mut Criterion) {
    let opts = CorpusOptions { width: 320, height: 180, frames: 8, fps: Rational::integer(24) };
    let clip = generate_clip(CorpusClip::BlobMotion, &opts).unwrap();
    let mut params = ParamMap::new();
    params.insert("frames".into(), ParamValue::Int(8));
    let mut g = c.benchmark_group("render 320x180 8 frames");
    g.sample_size(10);
    for id in ["dft-spatial", "spatial-filters", "intra-dct"] {
        g.bench_function(id, |b| b.iter(|| render_demo(id, Some(&clip), &params, None).unwrap()));
    }
    g.finish();
}

criterion_group!(benches, transforms, filters, motion, quality, render);
criterion_main!(benches);
