use approx::assert_relative_eq;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use smearseg::normalize::{background_mean, fit_corpus, shift_image, BackgroundParams};
use smearseg::raster::{dilate, BinaryMask, RgbImage};

fn random_rgb(rng: &mut ChaCha8Rng, w: usize, h: usize, lo: u8, hi: u8) -> RgbImage {
    RgbImage::new(
        w,
        h,
        (0..w * h * 3).map(|_| rng.random_range(lo..=hi)).collect(),
    )
    .unwrap()
}

fn random_mask(rng: &mut ChaCha8Rng, w: usize, h: usize) -> BinaryMask {
    BinaryMask::from_fn(w, h, |_, _| rng.random_bool(0.02))
}

/// Background pixels under the default extraction rule, listed directly.
fn background_pixels(img: &RgbImage, mask: &BinaryMask) -> Vec<(usize, usize)> {
    let p = BackgroundParams::default();
    let grown = dilate(mask, p.dilate_radius);
    let (w, h) = img.dimensions();
    let mut out = Vec::new();
    for y in 0..h {
        for x in 0..w {
            let framed = x >= p.border && y >= p.border && x + p.border < w && y + p.border < h;
            if framed && !grown.get(x, y) {
                out.push((x, y));
            }
        }
    }
    out
}

#[test]
fn background_mean_matches_loop_sum() {
    let mut rng = ChaCha8Rng::seed_from_u64(31);
    for _ in 0..30 {
        let (w, h) = (rng.random_range(20..90), rng.random_range(20..90));
        let img = random_rgb(&mut rng, w, h, 0, 255);
        let mask = random_mask(&mut rng, w, h);
        let px = background_pixels(&img, &mask);
        if px.is_empty() {
            assert!(background_mean(&img, &mask).is_err());
            continue;
        }
        let m = background_mean(&img, &mask).unwrap();
        assert_eq!(m.bg_pixels, px.len() as u64);
        for c in 0..3 {
            let mut sum = 0.0;
            for &(x, y) in &px {
                sum += img.pixel(x, y)[c] as f64;
            }
            assert_relative_eq!(m.mean[c], sum / px.len() as f64, max_relative = 1e-9);
        }
    }
}

#[test]
fn global_mean_pools_all_background_pixels() {
    let mut rng = ChaCha8Rng::seed_from_u64(32);
    let sizes = [(40, 30), (90, 70), (60, 120)];
    let corpus: Vec<(String, RgbImage, BinaryMask)> = sizes
        .iter()
        .enumerate()
        .map(|(i, &(w, h))| {
            (
                format!("i{i}"),
                random_rgb(&mut rng, w, h, 0, 255),
                random_mask(&mut rng, w, h),
            )
        })
        .collect();
    let stats = fit_corpus(corpus.iter().map(|(id, img, m)| (id.as_str(), img, m))).unwrap();
    let mut pooled = [0.0; 3];
    let mut n = 0usize;
    for (_, img, m) in &corpus {
        for (x, y) in background_pixels(img, m) {
            let p = img.pixel(x, y);
            for c in 0..3 {
                pooled[c] += p[c] as f64;
            }
            n += 1;
        }
    }
    for (g, p) in stats.global_mean.iter().zip(pooled) {
        assert_relative_eq!(*g, p / n as f64, max_relative = 1e-12);
    }
}

#[test]
fn zero_offset_is_bit_exact_identity() {
    let mut rng = ChaCha8Rng::seed_from_u64(33);
    for _ in 0..20 {
        let img = random_rgb(&mut rng, 37, 23, 0, 255);
        let m = [
            rng.random_range(0.0..255.0),
            rng.random_range(0.0..255.0),
            rng.random_range(0.0..255.0),
        ];
        let shifted = shift_image(&img, m, m);
        for (&a, &b) in img.data().iter().zip(&shifted.data) {
            assert_eq!(a as f64, b);
        }
        assert_eq!(shifted.quantize(), img);
    }
}

#[test]
fn shifted_background_mean_equals_global_mean() {
    let mut rng = ChaCha8Rng::seed_from_u64(34);
    for _ in 0..30 {
        // mid-range values with offsets below 40 never clamp
        let img = random_rgb(&mut rng, 64, 48, 60, 190);
        let mask = random_mask(&mut rng, 64, 48);
        let own = background_mean(&img, &mask).unwrap().mean;
        let global = own.map(|v| v + rng.random_range(-40.0..40.0));
        let shifted = shift_image(&img, own, global);
        let px = background_pixels(&img, &mask);
        for (c, g) in global.iter().enumerate() {
            let mean =
                px.iter().map(|&(x, y)| shifted.pixel(x, y)[c]).sum::<f64>() / px.len() as f64;
            assert!((mean - g).abs() < 1e-6, "channel {c}: {mean} vs {g}");
        }
    }
}

#[test]
fn opposite_offsets_cancel_without_clamping() {
    let mut rng = ChaCha8Rng::seed_from_u64(35);
    let img = random_rgb(&mut rng, 30, 30, 50, 200);
    let base = [120.0, 120.0, 120.0];
    let there = [131.0, 102.0, 140.0];
    let forth = shift_image(&img, base, there).quantize();
    let back = shift_image(&forth, there, base).quantize();
    assert_eq!(back, img);
}
