//! Per-contour separation accuracy, bucketed by true cell count.
//!
//! A contour is correct when the predicted cell count equals the truth.
//! Misses are attributed to concave-point detection when the number of
//! detected concave points differs from the true number of outline
//! intersections, and to fitting otherwise. Truth without an intersection
//! column leaves misses unattributed.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::io::Read;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::annotation::{ContourSummary, ImageAnnotations};
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TruthRow {
    pub image: String,
    pub contour_id: usize,
    pub true_count: usize,
    #[serde(default)]
    pub true_intersections: Option<usize>,
}

pub fn read_truth<R: Read>(reader: R) -> Result<Vec<TruthRow>> {
    let mut rdr = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .from_reader(reader);
    Ok(rdr.deserialize().collect::<Result<Vec<TruthRow>, _>>()?)
}

pub fn load_truth(path: &Path) -> Result<Vec<TruthRow>> {
    let file = std::fs::File::open(path).map_err(|e| Error::io(path, e))?;
    read_truth(file)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize, Default)]
pub struct BucketRow {
    pub label: String,
    pub correct: usize,
    pub incorrect_concave: usize,
    pub incorrect_fitting: usize,
    pub unattributed: usize,
    pub total: usize,
}

impl BucketRow {
    fn labelled(label: &str) -> Self {
        Self {
            label: label.into(),
            ..Self::default()
        }
    }

    fn add(&mut self, other: &BucketRow) {
        self.correct += other.correct;
        self.incorrect_concave += other.incorrect_concave;
        self.incorrect_fitting += other.incorrect_fitting;
        self.unattributed += other.unattributed;
        self.total += other.total;
    }

    pub fn accuracy(&self) -> f64 {
        if self.total == 0 {
            0.0
        } else {
            self.correct as f64 / self.total as f64
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalReport {
    /// `2 RBCs`, `3 RBCs`, `>3 RBCs`.
    pub buckets: Vec<BucketRow>,
    pub total: BucketRow,
    pub accuracy: f64,
    /// Single-cell contours (not part of the buckets): correct and total.
    pub single_correct: usize,
    pub single_total: usize,
    pub attribution: String,
}

pub const ATTRIBUTION_RULE: &str =
    "concave if detected concave points != true outline intersections, else fitting";

fn bucket_of(true_count: usize) -> usize {
    match true_count {
        2 => 0,
        3 => 1,
        _ => 2,
    }
}

/// Scores predictions against truth keyed by `(image, contour_id)`; every
/// key must appear on both sides.
pub fn eval_separation(predictions: &[ImageAnnotations], truth: &[TruthRow]) -> Result<EvalReport> {
    let mut pred: BTreeMap<(String, usize), &ContourSummary> = BTreeMap::new();
    for ann in predictions {
        for c in &ann.contours {
            pred.insert((ann.image.clone(), c.contour_id), c);
        }
    }
    let mut orphans: Vec<String> = truth
        .iter()
        .filter(|t| !pred.contains_key(&(t.image.clone(), t.contour_id)))
        .map(|t| format!("{}#{} (truth only)", t.image, t.contour_id))
        .collect();
    let truth_keys: std::collections::BTreeSet<(String, usize)> = truth
        .iter()
        .map(|t| (t.image.clone(), t.contour_id))
        .collect();
    orphans.extend(
        pred.keys()
            .filter(|k| !truth_keys.contains(*k))
            .map(|(img, id)| format!("{img}#{id} (prediction only)")),
    );
    if !orphans.is_empty() {
        return Err(Error::OrphanContours(orphans));
    }

    let mut buckets = vec![
        BucketRow::labelled("2 RBCs"),
        BucketRow::labelled("3 RBCs"),
        BucketRow::labelled(">3 RBCs"),
    ];
    let (mut single_correct, mut single_total) = (0, 0);
    for t in truth {
        let p = pred[&(t.image.clone(), t.contour_id)];
        if t.true_count < 2 {
            single_total += 1;
            single_correct += usize::from(p.predicted_count == t.true_count);
            continue;
        }
        let b = &mut buckets[bucket_of(t.true_count)];
        b.total += 1;
        if p.predicted_count == t.true_count {
            b.correct += 1;
            continue;
        }
        match t.true_intersections {
            Some(n) if n != p.concave_points => b.incorrect_concave += 1,
            Some(_) => b.incorrect_fitting += 1,
            None => b.unattributed += 1,
        }
    }
    let mut total = BucketRow::labelled("Total");
    for b in &buckets {
        total.add(b);
    }
    Ok(EvalReport {
        accuracy: total.accuracy(),
        buckets,
        total,
        single_correct,
        single_total,
        attribution: ATTRIBUTION_RULE.into(),
    })
}

/// Loads every `*.json` annotation file in `dir`, sorted by name.
pub fn load_predictions(dir: &Path) -> Result<Vec<ImageAnnotations>> {
    let entries = std::fs::read_dir(dir).map_err(|e| Error::io(dir, e))?;
    let mut paths = Vec::new();
    for entry in entries {
        let path = entry.map_err(|e| Error::io(dir, e))?.path();
        if path.extension().is_some_and(|e| e == "json") {
            paths.push(path);
        }
    }
    paths.sort();
    paths.iter().map(|p| ImageAnnotations::load(p)).collect()
}

impl EvalReport {
    /// Fixed-width text table, one row per bucket plus the total and the
    /// overall accuracy to three decimals. The unattributed column appears
    /// only when it is non-zero.
    pub fn render_table(&self) -> String {
        let with_unattributed = self.total.unattributed > 0;
        let mut headers = vec!["Correct", "Incorrect (Concave)", "Incorrect (Fitting)"];
        if with_unattributed {
            headers.push("Unattributed");
        }
        headers.push("Total");
        let mut out = format!("{:<9}", "Contour");
        for h in &headers {
            let _ = write!(out, "  {h}");
        }
        out.push('\n');
        for row in self.buckets.iter().chain(std::iter::once(&self.total)) {
            let mut values = vec![row.correct, row.incorrect_concave, row.incorrect_fitting];
            if with_unattributed {
                values.push(row.unattributed);
            }
            values.push(row.total);
            let _ = write!(out, "{:<9}", row.label);
            for (h, v) in headers.iter().zip(values) {
                let _ = write!(out, "  {v:>w$}", w = h.len());
            }
            out.push('\n');
        }
        let _ = writeln!(out, "Accuracy: {:.3}", self.accuracy);
        out
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)? + "\n")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ann(image: &str, contours: &[(usize, usize, usize)]) -> ImageAnnotations {
        ImageAnnotations {
            image: image.into(),
            cells: vec![],
            contours: contours
                .iter()
                .map(|&(id, cps, count)| ContourSummary {
                    contour_id: id,
                    concave_points: cps,
                    predicted_count: count,
                    fallback: count == 1,
                })
                .collect(),
            diagnostics: vec![],
        }
    }

    fn row(image: &str, id: usize, count: usize, inter: Option<usize>) -> TruthRow {
        TruthRow {
            image: image.into(),
            contour_id: id,
            true_count: count,
            true_intersections: inter,
        }
    }

    #[test]
    fn all_correct() {
        let r = eval_separation(
            &[ann("a", &[(0, 2, 2), (1, 3, 3), (2, 0, 1)])],
            &[
                row("a", 0, 2, Some(2)),
                row("a", 1, 3, Some(3)),
                row("a", 2, 1, Some(0)),
            ],
        )
        .unwrap();
        assert_eq!(r.accuracy, 1.0);
        assert_eq!(r.total.total, 2);
        assert_eq!((r.single_correct, r.single_total), (1, 1));
    }

    #[test]
    fn one_concave_point_is_a_concave_miss() {
        let r = eval_separation(&[ann("a", &[(0, 1, 1)])], &[row("a", 0, 2, Some(2))]).unwrap();
        assert_eq!(r.buckets[0].incorrect_concave, 1);
        let r = eval_separation(&[ann("a", &[(0, 2, 1)])], &[row("a", 0, 2, Some(2))]).unwrap();
        assert_eq!(r.buckets[0].incorrect_fitting, 1);
        let r = eval_separation(&[ann("a", &[(0, 2, 1)])], &[row("a", 0, 2, None)]).unwrap();
        assert_eq!(r.buckets[0].unattributed, 1);
        assert!(r.render_table().contains("Unattributed"));
    }

    #[test]
    fn orphans_are_listed() {
        let err = eval_separation(
            &[ann("a", &[(0, 2, 2), (5, 0, 1)])],
            &[row("a", 0, 2, None), row("b", 1, 2, None)],
        )
        .unwrap_err();
        match err {
            Error::OrphanContours(list) => {
                assert_eq!(list.len(), 2);
                assert!(list[0].starts_with("b#1"));
                assert!(list[1].starts_with("a#5"));
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn truth_csv_with_and_without_intersections() {
        let rows = read_truth("image,contour_id,true_count\nx,0,2\n".as_bytes()).unwrap();
        assert_eq!(rows[0].true_intersections, None);
        let rows =
            read_truth("image,contour_id,true_count,true_intersections\nx,0,2,2\n".as_bytes())
                .unwrap();
        assert_eq!(rows[0].true_intersections, Some(2));
    }
}
