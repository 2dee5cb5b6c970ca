//! Seeded synthetic smear scenes with exact ground truth.
//!
//! Each scene holds `clusters` groups of dark ellipses on a light field. A
//! group is grown by attaching every new ellipse to a random earlier member
//! so that the two overlap by a sampled fraction of their centre-line
//! extent. Truth contours are traced from the exact union raster, not from
//! the rendered image.

use std::fmt::Write as _;
use std::path::Path;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{ellipse_spans, fill_contour, trace_contours_with, Ellipse, TraceParams};
use crate::raster::{dilate, fill_holes, morph_open, BinaryMask, RgbImage};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SceneSpec {
    pub width: usize,
    pub height: usize,
    /// Separate cell groups per scene.
    pub clusters: usize,
    /// Inclusive range of cells per group.
    pub count: (usize, usize),
    /// Semi-major axis range in pixels.
    pub radius: (f64, f64),
    /// Range of `b / a`.
    pub axis_ratio: (f64, f64),
    /// Range of the overlap fraction between attached cells.
    pub overlap: (f64, f64),
    pub seed: u64,
    /// Amplitude of uniform per-pixel noise.
    pub noise: u8,
    /// Paint a lighter central pallor in each cell.
    pub pallor: bool,
    /// Minimum free space between groups and to the image edge.
    pub gap: usize,
    pub max_attempts: usize,
}

impl Default for SceneSpec {
    fn default() -> Self {
        Self {
            width: 640,
            height: 480,
            clusters: 1,
            count: (2, 4),
            radius: (18.0, 30.0),
            axis_ratio: (0.75, 1.0),
            overlap: (0.1, 0.6),
            seed: 42,
            noise: 4,
            pallor: true,
            gap: 8,
            max_attempts: 1000,
        }
    }
}

pub const BACKGROUND: [u8; 3] = [232, 222, 228];
pub const CELL: [u8; 3] = [176, 96, 124];
pub const PALLOR: [u8; 3] = [204, 150, 170];

impl SceneSpec {
    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::InvalidParameter(m));
        let range = |(lo, hi): (f64, f64)| lo.is_finite() && hi.is_finite() && lo <= hi;
        if self.count.0 == 0 || self.count.0 > self.count.1 {
            return bad(format!("invalid count range {:?}", self.count));
        }
        if self.clusters == 0 {
            return bad("clusters must be at least 1".into());
        }
        if !range(self.radius) || self.radius.0 <= 0.0 {
            return bad(format!("invalid radius range {:?}", self.radius));
        }
        if !range(self.axis_ratio) || self.axis_ratio.0 <= 0.0 || self.axis_ratio.1 > 1.0 {
            return bad(format!("invalid axis ratio range {:?}", self.axis_ratio));
        }
        if !range(self.overlap) || self.overlap.0 < 0.0 || self.overlap.1 >= 1.0 {
            return bad(format!("invalid overlap range {:?}", self.overlap));
        }
        let need = 2.0 * (self.radius.1 + self.gap as f64);
        if need >= self.width.min(self.height) as f64 {
            return bad("radii do not fit the canvas".into());
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TruthContour {
    pub contour_id: usize,
    pub true_count: usize,
    /// Boundary crossings between member ellipses that lie on the union
    /// outline, i.e. the concave points an ideal detector would report.
    pub true_intersections: usize,
    pub ellipses: Vec<Ellipse>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SceneTruth {
    pub ellipses: Vec<Ellipse>,
    pub contours: Vec<TruthContour>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SyntheticScene {
    pub image: RgbImage,
    pub truth: SceneTruth,
}

fn radial(e: &Ellipse, dir: f64) -> f64 {
    let alpha = dir - e.theta;
    e.a * e.b / ((e.b * alpha.cos()).powi(2) + (e.a * alpha.sin()).powi(2)).sqrt()
}

fn sample_ellipse(rng: &mut ChaCha8Rng, spec: &SceneSpec, cx: f64, cy: f64) -> Ellipse {
    let a = rng.random_range(spec.radius.0..=spec.radius.1);
    let ratio = rng.random_range(spec.axis_ratio.0..=spec.axis_ratio.1);
    let theta = rng.random_range(0.0..std::f64::consts::PI);
    Ellipse::new(cx, cy, a, a * ratio, theta).expect("validated ranges")
}

fn fits(e: &Ellipse, spec: &SceneSpec) -> bool {
    let (hx, hy) = e.half_extents();
    let m = spec.gap as f64;
    e.cx - hx >= m
        && e.cy - hy >= m
        && e.cx + hx <= spec.width as f64 - m
        && e.cy + hy <= spec.height as f64 - m
}

/// Grows one group; `None` when a bounded number of tries fails.
fn grow_cluster(rng: &mut ChaCha8Rng, spec: &SceneSpec, n: usize) -> Option<Vec<Ellipse>> {
    let r = spec.radius.1 + spec.gap as f64;
    let cx = rng.random_range(r..spec.width as f64 - r);
    let cy = rng.random_range(r..spec.height as f64 - r);
    let mut cells = vec![sample_ellipse(rng, spec, cx, cy)];
    if !fits(&cells[0], spec) {
        return None;
    }
    let mut tries = 0;
    while cells.len() < n {
        tries += 1;
        if tries > 200 {
            return None;
        }
        let anchor = cells[rng.random_range(0..cells.len())];
        let dir = rng.random_range(0.0..std::f64::consts::TAU);
        let overlap = rng.random_range(spec.overlap.0..=spec.overlap.1);
        let shape = sample_ellipse(rng, spec, 0.0, 0.0);
        let dist =
            (radial(&anchor, dir) + radial(&shape, dir + std::f64::consts::PI)) * (1.0 - overlap);
        let e = Ellipse {
            cx: anchor.cx + dist * dir.cos(),
            cy: anchor.cy + dist * dir.sin(),
            ..shape
        };
        if !fits(&e, spec) {
            continue;
        }
        // no other member may overlap the newcomer more than the maximum
        let crowded = cells.iter().any(|o| {
            let (dx, dy) = (e.cx - o.cx, e.cy - o.cy);
            let d = dx.hypot(dy);
            let dir = dy.atan2(dx);
            d < (radial(o, dir) + radial(&e, dir + std::f64::consts::PI)) * (1.0 - spec.overlap.1)
        });
        if !crowded {
            cells.push(e);
        }
    }
    Some(cells)
}

fn union_mask(ellipses: &[Ellipse], dims: (usize, usize)) -> BinaryMask {
    let mut m = BinaryMask::empty(dims.0, dims.1);
    for e in ellipses {
        for s in ellipse_spans(e, dims) {
            for x in s.x0..=s.x1 {
                m.set(x, s.y, true);
            }
        }
    }
    m
}

/// Crossings of the boundaries of `e` and `f` not covered by any `others`.
fn outline_crossings(e: &Ellipse, f: &Ellipse, others: &[&Ellipse]) -> usize {
    const STEPS: usize = 2048;
    let g = |t: f64| {
        let (x, y) = e.point_at(t);
        f.level(x, y) - 1.0
    };
    let mut count = 0;
    for i in 0..STEPS {
        let (mut t0, mut t1) = (
            i as f64 * std::f64::consts::TAU / STEPS as f64,
            (i + 1) as f64 * std::f64::consts::TAU / STEPS as f64,
        );
        let (g0, g1) = (g(t0), g(t1));
        if (g0 < 0.0) == (g1 < 0.0) {
            continue;
        }
        for _ in 0..40 {
            let tm = 0.5 * (t0 + t1);
            if (g(tm) < 0.0) == (g0 < 0.0) {
                t0 = tm;
            } else {
                t1 = tm;
            }
        }
        let (x, y) = e.point_at(0.5 * (t0 + t1));
        if !others.iter().any(|o| o.level(x, y) < 1.0) {
            count += 1;
        }
    }
    count
}

impl SceneTruth {
    /// Traces the exact union raster with the pipeline's cleanup steps and
    /// assigns each ellipse to the contour enclosing its centre.
    pub fn from_ellipses(
        ellipses: Vec<Ellipse>,
        dims: (usize, usize),
        trace: &TraceParams,
        morph_radius: usize,
    ) -> Self {
        let mask = fill_holes(&morph_open(&union_mask(&ellipses, dims), morph_radius));
        let contours = trace_contours_with(&mask, trace)
            .into_iter()
            .map(|c| {
                let inside = fill_contour(&c, dims);
                let members: Vec<Ellipse> = ellipses
                    .iter()
                    .filter(|e| {
                        let (x, y) = (e.cx.floor(), e.cy.floor());
                        x >= 0.0
                            && y >= 0.0
                            && (x as usize) < dims.0
                            && (y as usize) < dims.1
                            && inside.get(x as usize, y as usize)
                    })
                    .copied()
                    .collect();
                let mut crossings = 0;
                for i in 0..members.len() {
                    for j in i + 1..members.len() {
                        let others: Vec<&Ellipse> = members
                            .iter()
                            .enumerate()
                            .filter(|&(k, _)| k != i && k != j)
                            .map(|(_, e)| e)
                            .collect();
                        crossings += outline_crossings(&members[i], &members[j], &others);
                    }
                }
                TruthContour {
                    contour_id: c.id,
                    true_count: members.len(),
                    true_intersections: crossings,
                    ellipses: members,
                }
            })
            .collect();
        Self { ellipses, contours }
    }
}

fn jitter(rng: &mut ChaCha8Rng, base: [u8; 3], noise: u8) -> [u8; 3] {
    let n = noise as i16;
    base.map(|v| (v as i16 + rng.random_range(-n..=n)).clamp(0, 255) as u8)
}

/// Paints the ellipses: bodies first, then pallors, then per-pixel noise.
pub fn render_scene(ellipses: &[Ellipse], spec: &SceneSpec, rng: &mut ChaCha8Rng) -> RgbImage {
    let dims = (spec.width, spec.height);
    let body = union_mask(ellipses, dims);
    let pallor = if spec.pallor {
        let inner: Vec<Ellipse> = ellipses
            .iter()
            .map(|e| Ellipse {
                a: e.a * 0.4,
                b: e.b * 0.4,
                ..*e
            })
            .collect();
        union_mask(&inner, dims)
    } else {
        BinaryMask::empty(spec.width, spec.height)
    };
    let mut img = RgbImage::filled(spec.width, spec.height, BACKGROUND).expect("valid canvas");
    for y in 0..spec.height {
        for x in 0..spec.width {
            let base = if pallor.get(x, y) {
                PALLOR
            } else if body.get(x, y) {
                CELL
            } else {
                BACKGROUND
            };
            img.set_pixel(x, y, jitter(rng, base, spec.noise));
        }
    }
    img
}

fn scene_rng(spec: &SceneSpec, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    rng.set_stream(index);
    rng
}

/// Scene `index` of the batch seeded by `spec.seed`.
pub fn gen_scene(
    spec: &SceneSpec,
    index: u64,
    trace: &TraceParams,
    morph_radius: usize,
) -> Result<SyntheticScene> {
    spec.validate()?;
    let mut rng = scene_rng(spec, index);
    let dims = (spec.width, spec.height);
    for _ in 0..spec.max_attempts {
        let mut ellipses = Vec::new();
        let mut ok = true;
        for _ in 0..spec.clusters {
            let n = rng.random_range(spec.count.0..=spec.count.1);
            let Some(group) = grow_cluster(&mut rng, spec, n) else {
                ok = false;
                break;
            };
            // groups must stay apart by the gap
            let placed = dilate(&union_mask(&ellipses, dims), spec.gap);
            let fresh = union_mask(&group, dims);
            if fresh
                .data()
                .iter()
                .zip(placed.data())
                .any(|(&a, &b)| a && b)
            {
                ok = false;
                break;
            }
            ellipses.extend(group);
        }
        if !ok {
            continue;
        }
        let truth = SceneTruth::from_ellipses(ellipses, dims, trace, morph_radius);
        let image = render_scene(&truth.ellipses, spec, &mut rng);
        return Ok(SyntheticScene { image, truth });
    }
    Err(Error::PlacementFailed(spec.max_attempts))
}

/// Scene with the pipeline's default cleanup and tracing.
pub fn gen_synthetic(spec: &SceneSpec, index: u64) -> Result<SyntheticScene> {
    let cfg = super::config::PipelineConfig::default();
    gen_scene(spec, index, &cfg.trace(), cfg.morph_radius)
}

pub fn scene_name(index: u64) -> String {
    format!("scene_{index:04}")
}

/// Rows `image,contour_id,true_count,true_intersections`.
pub fn truth_csv<'a>(scenes: impl IntoIterator<Item = (&'a str, &'a SceneTruth)>) -> String {
    let mut out = String::from("image,contour_id,true_count,true_intersections\n");
    for (name, truth) in scenes {
        for c in &truth.contours {
            let _ = writeln!(
                out,
                "{name},{},{},{}",
                c.contour_id, c.true_count, c.true_intersections
            );
        }
    }
    out
}

/// Writes `scene_NNNN.png` files, `truth.csv` and `truth.json` into `dir`.
pub fn write_batch(dir: &Path, spec: &SceneSpec, scenes: u64) -> Result<Vec<(String, SceneTruth)>> {
    super::io::create_dir(dir)?;
    let mut truths = Vec::new();
    for i in 0..scenes {
        let scene = gen_synthetic(spec, i)?;
        let name = scene_name(i);
        super::io::save_rgb(&scene.image, &dir.join(format!("{name}.png")))?;
        truths.push((name, scene.truth));
    }
    let csv = truth_csv(truths.iter().map(|(n, t)| (n.as_str(), t)));
    super::io::write_text(&dir.join("truth.csv"), &csv)?;
    let json = serde_json::to_string_pretty(&truths)?;
    super::io::write_text(&dir.join("truth.json"), &json)?;
    Ok(truths)
}
