//! Batch orchestration: configuration, PNG I/O, end-to-end segmentation,
//! annotations, crops, overlays, synthetic scenes, evaluation and timing.

pub mod annotation;
pub mod batch;
pub mod config;
pub mod crops;
pub mod eval;
pub mod io;
pub mod overlay;
pub mod segment;
pub mod synth;
pub mod timing;

pub use annotation::{CellAnnotation, CellGeometry, CellSource, ContourSummary, ImageAnnotations};
pub use batch::{export_dir, fit_stats_dir, segment_dir, BatchOutcome, SegmentOptions};
pub use config::PipelineConfig;
pub use crops::{export_crops, Crop, ManifestRow};
pub use eval::{eval_separation, EvalReport, TruthRow};
pub use overlay::render_overlay;
pub use segment::{extract_mask, run_segment, ImageResult, MaskStage, Segmenter};
pub use synth::{gen_synthetic, SceneSpec, SceneTruth, SyntheticScene};
pub use timing::{timing_report, StageTiming, TimingReport};
