mod common;

use common::brute_force_otsu;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use smearseg::raster::{
    clahe, dilate, disc_offsets, erode, fill_holes, morph_open, otsu_threshold, BinaryMask,
    ClaheParams, GrayImage, Polarity,
};

fn random_gray(rng: &mut ChaCha8Rng, w: usize, h: usize) -> GrayImage {
    GrayImage::new(w, h, (0..w * h).map(|_| rng.random()).collect()).unwrap()
}

#[test]
fn otsu_matches_exhaustive_scan() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for i in 0..100 {
        let (w, h) = (rng.random_range(4..40), rng.random_range(4..40));
        let mut img = random_gray(&mut rng, w, h);
        if i % 2 == 0 {
            // squeeze into a narrow band so the histogram has gaps and ties
            let lo: u8 = rng.random_range(0..200);
            let data = img.data().iter().map(|&v| lo + v % 40).collect();
            img = GrayImage::new(w, h, data).unwrap();
        }
        let out = otsu_threshold(&img, Polarity::Dark);
        assert_eq!(out.threshold, brute_force_otsu(&img), "image {i}");
        for (&v, &m) in img.data().iter().zip(out.mask.data()) {
            assert_eq!(m, v < out.threshold);
        }
    }
}

#[test]
fn otsu_polarities_are_complementary() {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let img = random_gray(&mut rng, 32, 32);
    let dark = otsu_threshold(&img, Polarity::Dark);
    let bright = otsu_threshold(&img, Polarity::Bright);
    assert_eq!(dark.threshold, bright.threshold);
    assert_eq!(dark.mask.inverted(), bright.mask);
}

/// Straightforward per-pixel CLAHE: tile histograms, clip and redistribute,
/// cumulative mapping, bilinear blend between the four nearest tile centres.
fn reference_clahe(img: &GrayImage, clip: f64, tx: usize, ty: usize) -> Vec<u8> {
    let (w, h) = img.dimensions();
    let mut maps = vec![vec![[0f64; 256]; tx]; ty];
    for (j, row) in maps.iter_mut().enumerate() {
        for (i, map) in row.iter_mut().enumerate() {
            let (x0, x1, y0, y1) = (i * w / tx, (i + 1) * w / tx, j * h / ty, (j + 1) * h / ty);
            let area = ((x1 - x0) * (y1 - y0)) as u64;
            let mut hist = [0u64; 256];
            for y in y0..y1 {
                for x in x0..x1 {
                    hist[img.get(x, y) as usize] += 1;
                }
            }
            let limit = (clip * area as f64 / 256.0).max(1.0).floor() as u64;
            let excess: u64 = hist.iter().map(|&c| c.saturating_sub(limit)).sum();
            for c in hist.iter_mut() {
                *c = (*c).min(limit) + excess / 256;
            }
            let extra = (excess % 256) as usize;
            if let Some(step) = 256usize.checked_div(extra) {
                for k in 0..extra {
                    hist[k * step] += 1;
                }
            }
            let mut cdf = 0;
            for v in 0..256 {
                cdf += hist[v];
                map[v] = (255.0 * cdf as f64 / area as f64).round().min(255.0);
            }
        }
    }
    let centre =
        |t: usize, len: usize, n: usize| ((t * len / n + (t + 1) * len / n) as f64) / 2.0 - 0.5;
    let locate = |p: usize, len: usize, n: usize| -> (usize, usize, f64) {
        let p = p as f64;
        if n == 1 || p <= centre(0, len, n) {
            return (0, 0, 0.0);
        }
        if p >= centre(n - 1, len, n) {
            return (n - 1, n - 1, 0.0);
        }
        let t = (0..n - 1).rev().find(|&t| centre(t, len, n) <= p).unwrap();
        let (c0, c1) = (centre(t, len, n), centre(t + 1, len, n));
        (t, t + 1, (p - c0) / (c1 - c0))
    };
    let mut out = Vec::with_capacity(w * h);
    for y in 0..h {
        let (j0, j1, wy) = locate(y, h, ty);
        for x in 0..w {
            let (i0, i1, wx) = locate(x, w, tx);
            let v = img.get(x, y) as usize;
            let top = (1.0 - wx) * maps[j0][i0][v] + wx * maps[j0][i1][v];
            let bottom = (1.0 - wx) * maps[j1][i0][v] + wx * maps[j1][i1][v];
            out.push(((1.0 - wy) * top + wy * bottom).round() as u8);
        }
    }
    out
}

#[test]
fn clahe_two_level_image_matches_reference_and_spreads_levels() {
    // every tile holds both levels in equal share
    let data = (0..64 * 64)
        .map(|i| if (i / 64 + i % 64) % 2 == 0 { 40 } else { 60 })
        .collect();
    let img = GrayImage::new(64, 64, data).unwrap();
    let params = ClaheParams {
        clip_limit: 2.0,
        tiles_x: 2,
        tiles_y: 2,
    };
    let out = clahe(&img, &params).unwrap();
    assert!(!out.global_fallback);
    assert_eq!(
        out.image.data(),
        reference_clahe(&img, 2.0, 2, 2).as_slice()
    );
    let (dark, light) = (out.image.get(0, 0) as i32, out.image.get(1, 0) as i32);
    assert!(light - dark > 20, "levels {dark} and {light}");
}

#[test]
fn clahe_random_images_match_reference() {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    for _ in 0..20 {
        let (w, h) = (rng.random_range(16..90), rng.random_range(16..90));
        let img = random_gray(&mut rng, w, h);
        let (tx, ty) = (rng.random_range(1..9), rng.random_range(1..9));
        let clip = rng.random_range(1.0..4.0);
        let params = ClaheParams {
            clip_limit: clip,
            tiles_x: tx,
            tiles_y: ty,
        };
        assert_eq!(
            clahe(&img, &params).unwrap().image.data(),
            reference_clahe(&img, clip, tx, ty).as_slice()
        );
    }
}

#[test]
fn clahe_without_clipping_on_one_tile_is_global_equalization() {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let img = random_gray(&mut rng, 50, 40);
    let params = ClaheParams {
        clip_limit: 1e9,
        tiles_x: 1,
        tiles_y: 1,
    };
    let out = clahe(&img, &params).unwrap();
    let hist = img.histogram();
    let n = img.data().len() as f64;
    for (&v, &o) in img.data().iter().zip(out.image.data()) {
        let cdf: u64 = hist[..=v as usize].iter().sum();
        assert_eq!(o, (255.0 * cdf as f64 / n).round() as u8);
    }
}

#[test]
fn clahe_preserves_order_inside_corner_tiles() {
    let mut rng = ChaCha8Rng::seed_from_u64(10);
    let img = random_gray(&mut rng, 80, 80);
    let out = clahe(&img, &ClaheParams::default()).unwrap().image;
    // with 8x8 tiles of 10 px, pixels up to x, y = 4 use only the corner map
    let corner: Vec<(u8, u8)> = (0..5)
        .flat_map(|y| (0..5).map(move |x| (x, y)))
        .map(|(x, y)| (img.get(x, y), out.get(x, y)))
        .collect();
    for a in &corner {
        for b in &corner {
            if a.0 < b.0 {
                assert!(a.1 <= b.1);
            }
        }
    }
}

fn erode_oracle(m: &BinaryMask, r: usize) -> BinaryMask {
    let (w, h) = (m.width() as i64, m.height() as i64);
    let disc = disc_offsets(r);
    BinaryMask::from_fn(m.width(), m.height(), |x, y| {
        disc.iter().all(|&(dx, dy)| {
            let (nx, ny) = (x as i64 + dx, y as i64 + dy);
            // the image frame does not erode
            !(0..w).contains(&nx) || !(0..h).contains(&ny) || m.get(nx as usize, ny as usize)
        })
    })
}

fn dilate_oracle(m: &BinaryMask, r: usize) -> BinaryMask {
    let disc = disc_offsets(r);
    BinaryMask::from_fn(m.width(), m.height(), |x, y| {
        disc.iter()
            .any(|&(dx, dy)| m.get_signed(x as i64 - dx, y as i64 - dy))
    })
}

/// Background pixels reachable from the frame through 4-neighbours, by
/// repeated relaxation rather than a queue.
fn outside_oracle(m: &BinaryMask) -> BinaryMask {
    let (w, h) = m.dimensions();
    let mut out = BinaryMask::from_fn(w, h, |x, y| {
        !m.get(x, y) && (x == 0 || y == 0 || x + 1 == w || y + 1 == h)
    });
    loop {
        let next = BinaryMask::from_fn(w, h, |x, y| {
            out.get(x, y)
                || (!m.get(x, y)
                    && [(-1i64, 0i64), (1, 0), (0, -1), (0, 1)]
                        .iter()
                        .any(|&(dx, dy)| out.get_signed(x as i64 + dx, y as i64 + dy)))
        });
        if next == out {
            return out;
        }
        out = next;
    }
}

fn mask_strategy() -> impl Strategy<Value = BinaryMask> {
    (3usize..28, 3usize..28, 0.2f64..0.8, any::<u64>()).prop_map(|(w, h, p, seed)| {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        BinaryMask::from_fn(w, h, |_, _| rng.random_bool(p))
    })
}

proptest! {
    #[test]
    fn opening_matches_set_definition(m in mask_strategy(), r in 0usize..4) {
        prop_assert_eq!(erode(&m, r), erode_oracle(&m, r));
        prop_assert_eq!(dilate(&m, r), dilate_oracle(&m, r));
        prop_assert_eq!(morph_open(&m, r), dilate_oracle(&erode_oracle(&m, r), r));
    }

    #[test]
    fn fill_holes_matches_border_flood(m in mask_strategy()) {
        let filled = fill_holes(&m);
        prop_assert_eq!(&filled, &outside_oracle(&m).inverted());
        prop_assert!(m.is_subset_of(&filled));
    }
}

#[test]
fn solid_square_opening_by_set_algebra() {
    let sq = BinaryMask::from_fn(30, 30, |x, y| (5..25).contains(&x) && (5..25).contains(&y));
    let opened = morph_open(&sq, 1);
    assert_eq!(opened, dilate_oracle(&erode_oracle(&sq, 1), 1));
    // a radius-1 disc is a plus sign, so the square loses its corners
    assert_eq!(sq.count() - opened.count(), 4);
    let single = BinaryMask::from_fn(9, 9, |x, y| x == 4 && y == 4);
    assert_eq!(morph_open(&single, 1).count(), 0);
}
