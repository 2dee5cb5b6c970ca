//! Overlapping-cell separation.
//!
//! For one traced contour:
//!
//! 1. find concave points (all `k` symmetric-pair midpoints outside the
//!    contour), collapsing contiguous runs to their middle point;
//! 2. cut the contour into convex curves between consecutive concave points;
//! 3. fit an ellipse to every curve by direct least squares;
//! 4. verify candidates largest first: at least `inside_ratio` of the
//!    ellipse inside the contour, at least `novelty_ratio` not covered by
//!    earlier accepts, and area above the size threshold;
//! 5. refit every pair of leftover curves and verify those the same way.
//!
//! A contour with fewer than two concave points, or where nothing is
//! accepted, is reported as a single cell.

mod concave;
mod fit;
mod verify;

use serde::{Deserialize, Serialize};

pub use concave::{
    collapse_runs, collapse_runs_with_gap, concave_flags, find_concave_points,
    find_concave_points_with_gap, ConcavePoint,
};
pub use fit::fit_ellipse_direct;
pub use verify::{
    audit, verify_ellipses, verify_with_prior, Decision, Verdict, Verification, Verifier,
};

use crate::error::{Error, Result};
use crate::geometry::{conic_to_ellipse, fill_contour, Contour, Ellipse, Point};
use crate::raster::BinaryMask;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SeparationParams {
    /// Number of symmetric neighbour pairs tested per contour point.
    pub k: usize,
    pub min_ellipse_area: f64,
    pub inside_ratio: f64,
    pub novelty_ratio: f64,
    /// Curves with fewer points skip single-curve fitting.
    pub min_fit_points: usize,
    /// Concave runs separated by at most this many contour points are
    /// reported as one concave point.
    pub merge_gap: usize,
}

impl Default for SeparationParams {
    fn default() -> Self {
        Self {
            k: 8,
            min_ellipse_area: 300.0,
            inside_ratio: 0.8,
            novelty_ratio: 0.2,
            min_fit_points: 5,
            merge_gap: 4,
        }
    }
}

impl SeparationParams {
    pub fn validate(&self) -> Result<()> {
        let bad = |msg: &str| Err(Error::InvalidParameter(msg.into()));
        if self.k < 1 {
            return bad("k must be at least 1");
        }
        if !(self.inside_ratio > 0.0 && self.inside_ratio <= 1.0) {
            return bad("inside_ratio must be in (0, 1]");
        }
        if !(self.novelty_ratio > 0.0 && self.novelty_ratio <= 1.0) {
            return bad("novelty_ratio must be in (0, 1]");
        }
        if self.min_fit_points < 5 {
            return bad("min_fit_points must be at least 5");
        }
        if !(self.min_ellipse_area >= 0.0) {
            return bad("min_ellipse_area must be non-negative");
        }
        Ok(())
    }
}

/// Contour run between two consecutive concave points, endpoints included.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConvexCurve {
    pub contour_id: usize,
    pub curve_index: usize,
    pub points: Vec<Point>,
}

impl ConvexCurve {
    /// Points as pixel centres in the continuous image frame.
    pub fn centres(&self) -> impl Iterator<Item = (f64, f64)> + '_ {
        self.points
            .iter()
            .map(|&(x, y)| (x as f64 + 0.5, y as f64 + 0.5))
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CurveSplit {
    pub curves: Vec<ConvexCurve>,
    /// Fewer than two concave points: one curve spanning the whole contour.
    pub fallback: bool,
}

/// Cuts the closed contour at the (sorted) concave points.
pub fn split_into_curves(c: &Contour, cps: &[ConcavePoint]) -> CurveSplit {
    let n = c.len();
    if cps.len() < 2 {
        return CurveSplit {
            curves: vec![ConvexCurve {
                contour_id: c.id,
                curve_index: 0,
                points: c.points().to_vec(),
            }],
            fallback: true,
        };
    }
    let curves = (0..cps.len())
        .map(|m| {
            let start = cps[m].contour_index;
            let end = cps[(m + 1) % cps.len()].contour_index;
            let len = (end + n - start) % n + 1;
            ConvexCurve {
                contour_id: c.id,
                curve_index: m,
                points: (0..len).map(|t| c.points()[(start + t) % n]).collect(),
            }
        })
        .collect();
    CurveSplit {
        curves,
        fallback: false,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum FitSource {
    SingleCurve { curve: usize },
    TwoCurve { first: usize, second: usize },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AcceptedEllipse {
    pub ellipse: Ellipse,
    pub source: FitSource,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct TwoCurveOutcome {
    pub accepted: Vec<(Ellipse, (usize, usize))>,
    /// Pairs whose merged points could not be fitted.
    pub degenerate_pairs: Vec<(usize, usize)>,
    pub decisions: Vec<((usize, usize), Verdict)>,
}

fn fit_curve_points(points: &[(f64, f64)], min_fit_points: usize) -> Result<Ellipse> {
    conic_to_ellipse(&fit_ellipse_direct(points, min_fit_points)?)
}

/// Refits every unordered pair of leftover curves and verifies the results
/// largest first; a curve is consumed by at most one accepted pair.
pub fn two_curve_fit(
    leftover: &[ConvexCurve],
    contour_mask: &BinaryMask,
    accepted: &[Ellipse],
    params: &SeparationParams,
) -> TwoCurveOutcome {
    let mut out = TwoCurveOutcome::default();
    let mut candidates = Vec::new();
    for (i, first) in leftover.iter().enumerate() {
        for second in &leftover[i + 1..] {
            let key = (
                first.curve_index.min(second.curve_index),
                first.curve_index.max(second.curve_index),
            );
            let points: Vec<_> = first.centres().chain(second.centres()).collect();
            match fit_curve_points(&points, params.min_fit_points) {
                Ok(e) => candidates.push((e, key)),
                Err(_) => out.degenerate_pairs.push(key),
            }
        }
    }
    verify::largest_first(&mut candidates);

    let mut verifier = Verifier::new(contour_mask, accepted, params);
    let mut consumed = Vec::new();
    for (e, key) in candidates {
        if consumed.contains(&key.0) || consumed.contains(&key.1) {
            continue;
        }
        let verdict = verifier.offer(&e);
        out.decisions.push((key, verdict));
        if verdict == Verdict::Accepted {
            consumed.extend([key.0, key.1]);
            out.accepted.push((e, key));
        }
    }
    out
}

/// Separation outcome for one contour.
#[derive(Debug, Clone, PartialEq)]
pub struct SeparationResult {
    pub contour_id: usize,
    pub accepted: Vec<AcceptedEllipse>,
    /// Curves not explained by any accepted ellipse.
    pub leftover_curves: Vec<usize>,
    pub concave_points: Vec<ConcavePoint>,
    pub curves: Vec<ConvexCurve>,
    /// The contour is reported as one cell.
    pub fallback_single_cell: bool,
    pub diagnostics: Vec<String>,
}

impl SeparationResult {
    /// Estimated number of cells in the contour.
    pub fn cell_count(&self) -> usize {
        if self.fallback_single_cell {
            1
        } else {
            self.accepted.len()
        }
    }

    pub fn ellipses(&self) -> impl Iterator<Item = &Ellipse> {
        self.accepted.iter().map(|a| &a.ellipse)
    }
}

/// Runs the full separation on one contour traced from `mask`.
pub fn separate_overlapping(
    c: &Contour,
    mask: &BinaryMask,
    params: &SeparationParams,
) -> SeparationResult {
    let mut result = SeparationResult {
        contour_id: c.id,
        accepted: Vec::new(),
        leftover_curves: Vec::new(),
        concave_points: Vec::new(),
        curves: Vec::new(),
        fallback_single_cell: true,
        diagnostics: Vec::new(),
    };

    match find_concave_points_with_gap(c, params.k, params.merge_gap) {
        Ok(cps) => result.concave_points = cps,
        Err(e) => {
            result.diagnostics.push(e.to_string());
            return result;
        }
    }
    let split = split_into_curves(c, &result.concave_points);
    result.curves = split.curves;
    if split.fallback {
        return result;
    }

    let contour_mask = fill_contour(c, mask.dimensions());
    let mut pool = Vec::new();
    let mut candidates = Vec::new();
    for curve in &result.curves {
        if curve.points.len() < params.min_fit_points {
            pool.push(curve.curve_index);
            continue;
        }
        let points: Vec<_> = curve.centres().collect();
        match fit_curve_points(&points, params.min_fit_points) {
            Ok(e) => candidates.push((e, curve.curve_index)),
            Err(e) => {
                result
                    .diagnostics
                    .push(format!("curve {}: {e}", curve.curve_index));
                pool.push(curve.curve_index);
            }
        }
    }

    let single = verify_ellipses(&candidates, &contour_mask, params);
    pool.extend(&single.rejected_curves);
    pool.sort_unstable();
    pool.dedup();
    result.accepted = single
        .accepted
        .iter()
        .map(|&(ellipse, curve)| AcceptedEllipse {
            ellipse,
            source: FitSource::SingleCurve { curve },
        })
        .collect();

    let leftover: Vec<ConvexCurve> = result
        .curves
        .iter()
        .filter(|c| pool.contains(&c.curve_index))
        .cloned()
        .collect();
    let prior: Vec<Ellipse> = result.ellipses().copied().collect();
    let pairs = two_curve_fit(&leftover, &contour_mask, &prior, params);
    for &(a, b) in &pairs.degenerate_pairs {
        result
            .diagnostics
            .push(format!("curves {a}+{b}: degenerate pair fit"));
    }
    for &(ellipse, (first, second)) in &pairs.accepted {
        pool.retain(|&i| i != first && i != second);
        result.accepted.push(AcceptedEllipse {
            ellipse,
            source: FitSource::TwoCurve { first, second },
        });
    }
    result.leftover_curves = pool;
    result.fallback_single_cell = result.accepted.is_empty();
    result
}
