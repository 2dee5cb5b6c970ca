//! Three-criteria ellipse verification on 1-px rasterizations.

use serde::{Deserialize, Serialize};

use crate::geometry::{ellipse_area, ellipse_spans, Ellipse, Span};
use crate::raster::BinaryMask;

use super::SeparationParams;

/// Outcome of checking one candidate.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "verdict", rename_all = "snake_case")]
pub enum Verdict {
    Accepted,
    /// The candidate covers no pixel centre inside the image.
    EmptyRaster,
    /// Criterion (i): share of the ellipse inside the contour.
    OutsideContour {
        inside_ratio: f64,
    },
    /// Criterion (ii): share of the ellipse not covered by earlier accepts.
    NotNovel {
        novelty_ratio: f64,
    },
    /// Criterion (iii): analytic area below the size threshold.
    TooSmall {
        area: f64,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Decision {
    pub curve_index: usize,
    pub verdict: Verdict,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct Verification {
    pub accepted: Vec<(Ellipse, usize)>,
    /// Curves whose candidates failed, ascending.
    pub rejected_curves: Vec<usize>,
    /// Every decision in processing order.
    pub decisions: Vec<Decision>,
}

type Bbox = (usize, usize, usize, usize);

fn mask_bbox(mask: &BinaryMask) -> Option<Bbox> {
    let (w, h) = mask.dimensions();
    let mut bb: Option<Bbox> = None;
    for y in 0..h {
        for x in 0..w {
            if mask.get(x, y) {
                bb = Some(match bb {
                    None => (x, y, x, y),
                    Some((x0, y0, x1, y1)) => (x0.min(x), y0.min(y), x1.max(x), y1.max(y)),
                });
            }
        }
    }
    bb
}

fn count_in(spans: &[Span], mask: &BinaryMask, bb: Option<Bbox>) -> usize {
    let Some((bx0, by0, bx1, by1)) = bb else {
        return 0;
    };
    spans
        .iter()
        .filter(|s| s.y >= by0 && s.y <= by1)
        .map(|s| {
            let (x0, x1) = (s.x0.max(bx0), s.x1.min(bx1));
            if x0 > x1 {
                return 0;
            }
            (x0..=x1).filter(|&x| mask.get(x, s.y)).count()
        })
        .sum()
}

/// Incremental checker holding the contour interior and the union of
/// already accepted ellipses.
#[derive(Debug, Clone)]
pub struct Verifier<'a> {
    contour_mask: &'a BinaryMask,
    contour_bbox: Option<Bbox>,
    coverage: BinaryMask,
    coverage_bbox: Option<Bbox>,
    params: SeparationParams,
}

impl<'a> Verifier<'a> {
    pub fn new(contour_mask: &'a BinaryMask, prior: &[Ellipse], params: &SeparationParams) -> Self {
        let (w, h) = contour_mask.dimensions();
        let mut v = Self {
            contour_mask,
            contour_bbox: mask_bbox(contour_mask),
            coverage: BinaryMask::empty(w, h),
            coverage_bbox: None,
            params: *params,
        };
        for e in prior {
            v.mark(e);
        }
        v
    }

    pub fn check(&self, e: &Ellipse) -> Verdict {
        let spans = ellipse_spans(e, self.coverage.dimensions());
        let total: usize = spans.iter().map(Span::pixel_count).sum();
        if total == 0 {
            return Verdict::EmptyRaster;
        }
        let inside = count_in(&spans, self.contour_mask, self.contour_bbox);
        let inside_ratio = inside as f64 / total as f64;
        if inside_ratio < self.params.inside_ratio {
            return Verdict::OutsideContour { inside_ratio };
        }
        let covered = count_in(&spans, &self.coverage, self.coverage_bbox);
        let novelty_ratio = (total - covered) as f64 / total as f64;
        if novelty_ratio < self.params.novelty_ratio {
            return Verdict::NotNovel { novelty_ratio };
        }
        let area = ellipse_area(e);
        if area < self.params.min_ellipse_area {
            return Verdict::TooSmall { area };
        }
        Verdict::Accepted
    }

    /// Adds an ellipse to the accepted union.
    pub fn mark(&mut self, e: &Ellipse) {
        for s in ellipse_spans(e, self.coverage.dimensions()) {
            for x in s.x0..=s.x1 {
                self.coverage.set(x, s.y, true);
            }
            self.coverage_bbox = Some(match self.coverage_bbox {
                None => (s.x0, s.y, s.x1, s.y),
                Some((x0, y0, x1, y1)) => (x0.min(s.x0), y0.min(s.y), x1.max(s.x1), y1.max(s.y)),
            });
        }
    }

    /// Checks and, when accepted, marks in one step.
    pub fn offer(&mut self, e: &Ellipse) -> Verdict {
        let verdict = self.check(e);
        if verdict == Verdict::Accepted {
            self.mark(e);
        }
        verdict
    }
}

/// Sorts `(area, key)` items by descending area, ties by ascending key.
pub(crate) fn largest_first<K: Ord>(items: &mut [(Ellipse, K)]) {
    items.sort_by(|(ea, ka), (eb, kb)| {
        ellipse_area(eb)
            .total_cmp(&ellipse_area(ea))
            .then_with(|| ka.cmp(kb))
    });
}

/// Verifies single-curve candidates largest first against the filled
/// contour interior.
pub fn verify_ellipses(
    candidates: &[(Ellipse, usize)],
    contour_mask: &BinaryMask,
    params: &SeparationParams,
) -> Verification {
    verify_with_prior(candidates, contour_mask, &[], params)
}

/// As [`verify_ellipses`], with ellipses accepted earlier already counted
/// against novelty.
pub fn verify_with_prior(
    candidates: &[(Ellipse, usize)],
    contour_mask: &BinaryMask,
    prior: &[Ellipse],
    params: &SeparationParams,
) -> Verification {
    let mut order = candidates.to_vec();
    largest_first(&mut order);
    let mut verifier = Verifier::new(contour_mask, prior, params);
    let mut out = Verification::default();
    for (e, curve) in order {
        let verdict = verifier.offer(&e);
        out.decisions.push(Decision {
            curve_index: curve,
            verdict,
        });
        if verdict == Verdict::Accepted {
            out.accepted.push((e, curve));
        } else {
            out.rejected_curves.push(curve);
        }
    }
    out.rejected_curves.sort_unstable();
    out.rejected_curves.dedup();
    out
}

/// Re-checks accepted ellipses in order, each against the contour and the
/// union of those before it.
pub fn audit(accepted: &[Ellipse], contour_mask: &BinaryMask, params: &SeparationParams) -> bool {
    let mut verifier = Verifier::new(contour_mask, &[], params);
    accepted
        .iter()
        .all(|e| verifier.offer(e) == Verdict::Accepted)
}
