use std::fmt::Write;

use serde::{Deserialize, Serialize};

/// Wall-clock seconds spent in each stage for one image.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StageTiming {
    pub image: String,
    /// Channel extraction through contour tracing.
    pub mask_seconds: f64,
    /// Separation of every traced contour.
    pub separation_seconds: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
pub struct TimingReport {
    pub rows: Vec<StageTiming>,
    /// Absent for an empty batch.
    pub mean: Option<StageTiming>,
}

pub fn timing_report(rows: Vec<StageTiming>) -> TimingReport {
    if rows.is_empty() {
        return TimingReport::default();
    }
    let n = rows.len() as f64;
    let mean = StageTiming {
        image: "mean".into(),
        mask_seconds: rows.iter().map(|r| r.mask_seconds).sum::<f64>() / n,
        separation_seconds: rows.iter().map(|r| r.separation_seconds).sum::<f64>() / n,
    };
    TimingReport {
        rows,
        mean: Some(mean),
    }
}

impl TimingReport {
    /// CSV table with one row per image and a trailing mean row.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("image,mask_seconds,separation_seconds\n");
        for r in self.rows.iter().chain(&self.mean) {
            let _ = writeln!(
                out,
                "{},{:.6},{:.6}",
                r.image, r.mask_seconds, r.separation_seconds
            );
        }
        out
    }
}
