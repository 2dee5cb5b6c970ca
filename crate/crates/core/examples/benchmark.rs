//! Single-threaded per-stage timing on 640x480 synthetic scenes.
//!
//! ```bash
//! cargo run --release --example benchmark -- 20
//! ```

use anyhow::Result;
use smearseg::pipeline::{gen_synthetic, timing_report, PipelineConfig, SceneSpec, Segmenter};

fn main() -> Result<()> {
    let n: u64 = std::env::args()
        .nth(1)
        .map(|s| s.parse())
        .transpose()?
        .unwrap_or(20);
    let spec = SceneSpec {
        clusters: 6,
        count: (1, 4),
        ..SceneSpec::default()
    };
    let seg = Segmenter::new(PipelineConfig::default(), None)?;
    let mut rows = Vec::new();
    for i in 0..n {
        let scene = gen_synthetic(&spec, i)?;
        rows.push(seg.segment(&format!("scene_{i:04}"), &scene.image)?.timing);
    }
    print!("{}", timing_report(rows).to_csv());
    Ok(())
}
