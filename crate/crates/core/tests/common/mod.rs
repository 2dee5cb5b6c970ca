#![allow(dead_code)]

use smearseg::geometry::{rasterize_ellipse, Ellipse};
use smearseg::raster::{BinaryMask, GrayImage};

/// Threshold maximizing w0 * w1 * (mu0 - mu1)^2 with class 0 = `v < t`,
/// scanning every t and keeping the first of (near-)equal maxima.
pub fn brute_force_otsu(img: &GrayImage) -> u8 {
    let px = img.data();
    let n = px.len() as f64;
    let scores: Vec<Option<f64>> = (0..256u32)
        .map(|t| {
            let lo: Vec<f64> = px
                .iter()
                .filter(|&&v| (v as u32) < t)
                .map(|&v| v as f64)
                .collect();
            let hi: Vec<f64> = px
                .iter()
                .filter(|&&v| (v as u32) >= t)
                .map(|&v| v as f64)
                .collect();
            if lo.is_empty() || hi.is_empty() {
                return None;
            }
            let mu0 = lo.iter().sum::<f64>() / lo.len() as f64;
            let mu1 = hi.iter().sum::<f64>() / hi.len() as f64;
            Some(lo.len() as f64 / n * hi.len() as f64 / n * (mu0 - mu1).powi(2))
        })
        .collect();
    let best = scores.iter().flatten().cloned().fold(f64::MIN, f64::max);
    scores
        .iter()
        .position(|s| s.is_some_and(|s| s >= best * (1.0 - 1e-12)))
        .expect("image has two levels") as u8
}

pub fn union_mask(cells: &[Ellipse], dims: (usize, usize)) -> BinaryMask {
    let masks: Vec<BinaryMask> = cells.iter().map(|e| rasterize_ellipse(e, dims)).collect();
    BinaryMask::from_fn(dims.0, dims.1, |x, y| masks.iter().any(|m| m.get(x, y)))
}
