//! End-to-end segmentation of one synthetic scene: annotations, crops and an
//! overlay are written to the given directory (default: a temp dir).

use std::path::PathBuf;

use anyhow::Result;
use smearseg::pipeline::crops::{export_crops, manifest_csv, write_crops};
use smearseg::pipeline::io::{create_dir, save_rgb, write_text};
use smearseg::pipeline::{gen_synthetic, render_overlay, PipelineConfig, SceneSpec, Segmenter};

fn main() -> Result<()> {
    let out = std::env::args()
        .nth(1)
        .map(PathBuf::from)
        .unwrap_or_else(|| std::env::temp_dir().join("smearseg-segment-example"));
    create_dir(&out)?;

    let spec = SceneSpec {
        clusters: 4,
        count: (1, 3),
        ..SceneSpec::default()
    };
    let scene = gen_synthetic(&spec, 7)?;
    let seg = Segmenter::new(PipelineConfig::default(), None)?;
    let mut r = seg.segment("scene", &scene.image)?;

    for (t, s) in scene.truth.contours.iter().zip(&r.annotations.contours) {
        println!(
            "contour {}: truth {} cells, predicted {} ({} concave points)",
            s.contour_id, t.true_count, s.predicted_count, s.concave_points
        );
    }

    let canvas = seg.config().crop_canvas;
    let (crops, notes) = export_crops(&r.image, &r.annotations, canvas)?;
    let rows = write_crops(&out, &mut r.annotations, &crops)?;
    write_text(&out.join("manifest.csv"), &manifest_csv(&rows))?;
    r.annotations.save(&out.join("scene.json"))?;
    save_rgb(
        &render_overlay(&r.image, &r.contours, &r.results),
        &out.join("overlay.png"),
    )?;
    for n in notes {
        println!("note: {n}");
    }
    println!(
        "{} cells, {} crops, mask {:.1} ms, separation {:.1} ms -> {}",
        r.annotations.cells.len(),
        rows.len(),
        r.timing.mask_seconds * 1e3,
        r.timing.separation_seconds * 1e3,
        out.display()
    );
    Ok(())
}
