use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{Contour, Ellipse, Point};
use crate::separate::{FitSource, SeparationResult};

/// Rounds to 9 significant digits so serialized annotations do not depend on
/// the last bits of floating-point work.
pub fn round_sig9(x: f64) -> f64 {
    if x == 0.0 || !x.is_finite() {
        return x;
    }
    format!("{x:.8e}").parse().expect("formatted float parses")
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CellSource {
    /// An isolated cell or a contour that fell back to one cell.
    Single,
    SeparatedSingleCurve,
    SeparatedTwoCurve,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EllipseParams {
    pub cx: f64,
    pub cy: f64,
    pub a: f64,
    pub b: f64,
    pub theta: f64,
}

impl From<&Ellipse> for EllipseParams {
    fn from(e: &Ellipse) -> Self {
        Self {
            cx: round_sig9(e.cx),
            cy: round_sig9(e.cy),
            a: round_sig9(e.a),
            b: round_sig9(e.b),
            theta: round_sig9(e.theta),
        }
    }
}

impl EllipseParams {
    pub fn to_ellipse(&self) -> Result<Ellipse> {
        Ellipse::new(self.cx, self.cy, self.a, self.b, self.theta)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CellGeometry {
    Ellipse(EllipseParams),
    Contour(Vec<Point>),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CellAnnotation {
    pub id: usize,
    pub contour_id: usize,
    pub source: CellSource,
    #[serde(flatten)]
    pub geometry: CellGeometry,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub crop: Option<String>,
}

/// Per-contour outcome, the prediction side of separation evaluation.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ContourSummary {
    pub contour_id: usize,
    pub concave_points: usize,
    pub predicted_count: usize,
    pub fallback: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ImageAnnotations {
    pub image: String,
    pub cells: Vec<CellAnnotation>,
    pub contours: Vec<ContourSummary>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub diagnostics: Vec<String>,
}

impl ImageAnnotations {
    /// One cell per fallback contour (its boundary) and one per accepted
    /// ellipse otherwise. Cell ids run in contour order.
    pub fn build(image: &str, contours: &[Contour], results: &[SeparationResult]) -> Self {
        let mut cells = Vec::new();
        let mut summaries = Vec::new();
        for (c, r) in contours.iter().zip(results) {
            summaries.push(ContourSummary {
                contour_id: c.id,
                concave_points: r.concave_points.len(),
                predicted_count: r.cell_count(),
                fallback: r.fallback_single_cell,
            });
            if r.fallback_single_cell {
                cells.push(CellAnnotation {
                    id: cells.len(),
                    contour_id: c.id,
                    source: CellSource::Single,
                    geometry: CellGeometry::Contour(c.points().to_vec()),
                    crop: None,
                });
                continue;
            }
            for a in &r.accepted {
                let source = match a.source {
                    FitSource::SingleCurve { .. } => CellSource::SeparatedSingleCurve,
                    FitSource::TwoCurve { .. } => CellSource::SeparatedTwoCurve,
                };
                cells.push(CellAnnotation {
                    id: cells.len(),
                    contour_id: c.id,
                    source,
                    geometry: CellGeometry::Ellipse((&a.ellipse).into()),
                    crop: None,
                });
            }
        }
        Self {
            image: image.to_string(),
            cells,
            contours: summaries,
            diagnostics: Vec::new(),
        }
    }

    /// Number of cells produced by separating an overlapping contour.
    pub fn separated_cells(&self) -> usize {
        self.cells
            .iter()
            .filter(|c| c.source != CellSource::Single)
            .count()
    }

    pub fn to_json(&self) -> Result<String> {
        let mut s = serde_json::to_string_pretty(self)?;
        s.push('\n');
        Ok(s)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_json(&text)
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.to_json()?).map_err(|e| Error::io(path, e))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn nine_digits() {
        assert_eq!(round_sig9(1.0 / 3.0), 0.333333333);
        assert_eq!(round_sig9(123456.7891234), 123456.789);
        assert_eq!(round_sig9(0.0), 0.0);
        assert_eq!(round_sig9(-2.5e-7), -2.5e-7);
    }

    #[test]
    fn json_shape() {
        let ann = ImageAnnotations {
            image: "img".into(),
            cells: vec![
                CellAnnotation {
                    id: 0,
                    contour_id: 0,
                    source: CellSource::SeparatedSingleCurve,
                    geometry: CellGeometry::Ellipse(EllipseParams {
                        cx: 1.0,
                        cy: 2.0,
                        a: 3.0,
                        b: 2.0,
                        theta: 0.5,
                    }),
                    crop: Some("img_cell000.png".into()),
                },
                CellAnnotation {
                    id: 1,
                    contour_id: 1,
                    source: CellSource::Single,
                    geometry: CellGeometry::Contour(vec![(0, 0), (1, 0), (1, 1)]),
                    crop: None,
                },
            ],
            contours: vec![],
            diagnostics: vec![],
        };
        let v: serde_json::Value = serde_json::from_str(&ann.to_json().unwrap()).unwrap();
        assert_eq!(v["cells"][0]["source"], "separated_single_curve");
        assert_eq!(v["cells"][0]["ellipse"]["a"], 3.0);
        assert_eq!(v["cells"][1]["contour"][1], serde_json::json!([1, 0]));
        assert!(v["cells"][1].get("crop").is_none());
        assert_eq!(
            ImageAnnotations::from_json(&ann.to_json().unwrap()).unwrap(),
            ann
        );
    }
}
