//! Background color normalization across a small corpus whose images were
//! photographed under different illumination.

use anyhow::Result;
use smearseg::normalize::{background_mean, fit_corpus, shift_image};
use smearseg::pipeline::{extract_mask, gen_synthetic, PipelineConfig, SceneSpec};
use smearseg::raster::RgbImage;

/// Adds a per-channel offset, as a different lamp or stain batch would.
fn tint(img: &RgbImage, offset: [i16; 3]) -> RgbImage {
    let data = img
        .data()
        .chunks_exact(3)
        .flat_map(|p| [0, 1, 2].map(|c| (p[c] as i16 + offset[c]).clamp(0, 255) as u8))
        .collect();
    RgbImage::new(img.width(), img.height(), data).unwrap()
}

fn main() -> Result<()> {
    let cfg = PipelineConfig::default();
    let spec = SceneSpec::default();
    let offsets = [[0, 0, 0], [-14, -6, 3], [5, -20, -11]];
    let mut corpus = Vec::new();
    for (i, off) in offsets.iter().enumerate() {
        let img = tint(&gen_synthetic(&spec, i as u64)?.image, *off);
        let mask = extract_mask(&img, &cfg)?.mask;
        corpus.push((format!("img{i}"), img, mask));
    }

    let stats = fit_corpus(corpus.iter().map(|(id, img, m)| (id.as_str(), img, m)))?;
    let g = stats.global_mean;
    println!(
        "global background mean: [{:.3}, {:.3}, {:.3}]",
        g[0], g[1], g[2]
    );

    for (id, img, mask) in &corpus {
        let before = stats.per_image[id].mean;
        let shifted = shift_image(img, before, g);
        let after = background_mean(&shifted.quantize(), mask)?.mean;
        println!(
            "{id}: background [{:.2}, {:.2}, {:.2}] -> [{:.2}, {:.2}, {:.2}]",
            before[0], before[1], before[2], after[0], after[1], after[2]
        );
    }
    println!("\n{}", stats.to_json()?);
    Ok(())
}
