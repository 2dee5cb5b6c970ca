//! Segmentation toolkit for blood-smear microscopy.
//!
//! The crate turns a smear photograph into individual red blood cells:
//!
//! 1. [`normalize`] - background color normalization against corpus statistics.
//! 2. [`raster`] - green channel, CLAHE, Otsu binarization, opening, hole filling.
//! 3. [`geometry`] - Moore contour tracing, polygon predicates, conics and ellipses.
//! 4. [`separate`] - concave points, convex curves, direct ellipse fitting,
//!    three-criteria verification and two-curve refitting.
//! 5. [`pipeline`] - batch runs, annotations, crops, overlays, synthetic
//!    scenes, separation evaluation and timing.
//!
//! [`imbalance`] holds the class-distribution utilities used when preparing
//! the exported crops for classifier training.
//!
//! ## Examples
//!
//! Each stage has a runnable walkthrough in `examples/`:
//!
//! - **`preprocess_mask`** - channel, CLAHE, Otsu, opening, hole filling, tracing
//! - **`normalize_colors`** - corpus background statistics and the mean shift
//! - **`fit_ellipse`** - direct fitting on exact, noisy and partial samples
//! - **`concave_points`** - concave points on a two-disc union vs the analytic answer
//! - **`separate_two_cells`** - the whole separation of one clump
//! - **`segment_synthetic`** - annotations, crops and an overlay for one scene
//! - **`evaluate_separation`** - the accuracy table over seeded scenes
//! - **`imbalance_table`** - class weights, upsampling and focal loss
//! - **`benchmark`** - per-stage timing
//!
//! ```bash
//! cargo run --release --example separate_two_cells
//! cargo run --release --example evaluate_separation -- 200 42
//! ```
//!
//! The `smearseg` binary wraps the pipeline for batch use.

// negated float comparisons are deliberate: they also reject NaN
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod error;
pub mod geometry;
pub mod imbalance;
pub mod normalize;
pub mod pipeline;
pub mod raster;
pub mod separate;

pub use error::{Error, Result};
pub use geometry::{Conic, Contour, Ellipse};
pub use raster::{BinaryMask, GrayImage, RgbImage};
pub use separate::{SeparationParams, SeparationResult};
