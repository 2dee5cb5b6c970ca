//! Mask extraction step by step on a synthetic smear: green channel, CLAHE,
//! Otsu, opening, hole filling and contour tracing.
//!
//! ```bash
//! cargo run --example preprocess_mask -- /tmp/masks
//! ```
//! With an output directory the intermediate planes are written as PNGs.

use std::path::PathBuf;

use anyhow::Result;
use smearseg::geometry::{contour_area, trace_contours_with, TraceParams};
use smearseg::pipeline::io::{create_dir, save_rgb};
use smearseg::pipeline::{gen_synthetic, PipelineConfig, SceneSpec};
use smearseg::raster::{
    clahe, extract_channel, fill_holes, gray_to_rgb, morph_open, otsu_threshold, BinaryMask,
    Channel, ClaheParams, GrayImage, Polarity,
};

fn mask_to_gray(m: &BinaryMask) -> GrayImage {
    let (w, h) = m.dimensions();
    GrayImage::new(
        w,
        h,
        m.data().iter().map(|&b| if b { 255 } else { 0 }).collect(),
    )
    .unwrap()
}

fn main() -> Result<()> {
    let out = std::env::args().nth(1).map(PathBuf::from);
    let spec = SceneSpec {
        clusters: 3,
        count: (1, 3),
        ..SceneSpec::default()
    };
    let scene = gen_synthetic(&spec, 0)?;

    let green = extract_channel(&scene.image, Channel::Green);
    let eq = clahe(&green, &ClaheParams::default())?;
    let otsu = otsu_threshold(&eq.image, Polarity::Dark);
    let opened = morph_open(&otsu.mask, PipelineConfig::default().morph_radius);
    let filled = fill_holes(&opened);
    let contours = trace_contours_with(&filled, &TraceParams::default());

    println!("otsu threshold: {}", otsu.threshold);
    println!(
        "foreground pixels: raw {}, opened {}, filled {}",
        otsu.mask.count(),
        opened.count(),
        filled.count()
    );
    for c in &contours {
        let (x0, y0, x1, y1) = c.bbox();
        println!(
            "contour {}: {} boundary points, area {:.0}, bbox ({x0},{y0})-({x1},{y1})",
            c.id,
            c.len(),
            contour_area(c)
        );
    }
    println!("truth: {} contours", scene.truth.contours.len());

    if let Some(dir) = out {
        create_dir(&dir)?;
        save_rgb(&scene.image, &dir.join("input.png"))?;
        save_rgb(&gray_to_rgb(&green), &dir.join("green.png"))?;
        save_rgb(&gray_to_rgb(&eq.image), &dir.join("clahe.png"))?;
        save_rgb(&gray_to_rgb(&mask_to_gray(&filled)), &dir.join("mask.png"))?;
        println!("planes written to {}", dir.display());
    }
    Ok(())
}
