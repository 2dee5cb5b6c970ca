//! Separation accuracy on seeded synthetic scenes, reported by contour
//! cardinality.
//!
//! ```bash
//! cargo run --release --example evaluate_separation -- 200 42
//! ```

use anyhow::Result;
use rayon::prelude::*;
use smearseg::pipeline::{
    eval_separation, gen_synthetic, PipelineConfig, SceneSpec, Segmenter, TruthRow,
};

fn main() -> Result<()> {
    let mut args = std::env::args().skip(1);
    let scenes: u64 = args.next().map(|s| s.parse()).transpose()?.unwrap_or(50);
    let seed: u64 = args.next().map(|s| s.parse()).transpose()?.unwrap_or(42);

    let spec = SceneSpec {
        seed,
        ..SceneSpec::default()
    };
    let seg = Segmenter::new(PipelineConfig::default(), None)?;
    let runs = (0..scenes)
        .into_par_iter()
        .map(|i| {
            let scene = gen_synthetic(&spec, i)?;
            let name = format!("scene_{i:04}");
            let r = seg.segment(&name, &scene.image)?;
            let truth: Vec<TruthRow> = scene
                .truth
                .contours
                .iter()
                .map(|c| TruthRow {
                    image: name.clone(),
                    contour_id: c.contour_id,
                    true_count: c.true_count,
                    true_intersections: Some(c.true_intersections),
                })
                .collect();
            Ok((r.annotations, truth))
        })
        .collect::<smearseg::Result<Vec<_>>>()?;

    let (preds, truth): (Vec<_>, Vec<_>) = runs.into_iter().unzip();
    let truth: Vec<TruthRow> = truth.into_iter().flatten().collect();
    let report = eval_separation(&preds, &truth)?;
    print!("{}", report.render_table());
    println!(
        "single cells: {}/{}",
        report.single_correct, report.single_total
    );
    Ok(())
}
