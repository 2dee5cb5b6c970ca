use std::path::{Path, PathBuf};

use rayon::prelude::*;

use super::config::PipelineConfig;
use super::crops::{export_crops, manifest_csv, write_crops, ManifestRow};
use super::io::{create_dir, image_id, list_pngs, load_rgb, save_rgb, write_text};
use super::overlay::render_overlay;
use super::segment::{extract_mask, run_segment, Segmenter};
use super::timing::{timing_report, TimingReport};
use crate::error::{Error, Result};
use crate::normalize::{background_mean, stats_from_means, NormalizationStats};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct SegmentOptions {
    pub crops: bool,
    pub overlay: bool,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct BatchOutcome {
    pub processed: usize,
    /// Files that could not be processed, with the reason.
    pub failures: Vec<(PathBuf, String)>,
    pub manifest: Vec<ManifestRow>,
    pub timing: TimingReport,
    pub diagnostics: Vec<String>,
}

/// Background statistics over every PNG in `input`, each image masked by
/// the configured extraction.
pub fn fit_stats_dir(input: &Path, cfg: &PipelineConfig) -> Result<NormalizationStats> {
    let paths = list_pngs(input)?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(cfg.threads)
        .build()
        .expect("thread pool");
    let means = pool.install(|| {
        paths
            .par_iter()
            .map(|p| {
                let img = load_rgb(p)?;
                let stage = extract_mask(&img, cfg)?;
                let id = image_id(p);
                let m = background_mean(&img, &stage.mask).map_err(|e| match e {
                    Error::NoBackground => Error::NoBackgroundIn { id: id.clone() },
                    other => other,
                })?;
                Ok((id, m))
            })
            .collect::<Result<Vec<_>>>()
    })?;
    stats_from_means(means.into_iter().collect())
}

/// Segments every PNG in `input` and writes `<id>.json` annotations, plus
/// crops (`crops/`, with `crops/manifest.csv`) and `<id>_overlay.png` when
/// requested, and `timing.csv`. Files are written by this thread in input
/// order after the parallel work finishes.
pub fn segment_dir(
    seg: &Segmenter,
    input: &Path,
    output: &Path,
    opts: SegmentOptions,
) -> Result<BatchOutcome> {
    let paths = list_pngs(input)?;
    create_dir(output)?;
    let crop_dir = output.join("crops");
    if opts.crops {
        create_dir(&crop_dir)?;
    }
    let mut outcome = BatchOutcome::default();
    let mut timings = Vec::new();
    for (path, result) in run_segment(seg, &paths) {
        let mut r = match result {
            Ok(r) => r,
            Err(e) => {
                outcome.failures.push((path, e.to_string()));
                continue;
            }
        };
        if opts.crops {
            let (crops, diags) = export_crops(&r.image, &r.annotations, seg.config().crop_canvas)?;
            outcome.diagnostics.extend(diags);
            outcome
                .manifest
                .extend(write_crops(&crop_dir, &mut r.annotations, &crops)?);
        }
        if opts.overlay {
            let overlay = render_overlay(&r.image, &r.contours, &r.results);
            save_rgb(&overlay, &output.join(format!("{}_overlay.png", r.id)))?;
        }
        r.annotations.save(&output.join(format!("{}.json", r.id)))?;
        outcome.diagnostics.extend(
            r.annotations
                .diagnostics
                .iter()
                .map(|d| format!("{}: {d}", r.id)),
        );
        timings.push(r.timing);
        outcome.processed += 1;
    }
    if opts.crops {
        write_text(
            &crop_dir.join("manifest.csv"),
            &manifest_csv(&outcome.manifest),
        )?;
    }
    outcome.timing = timing_report(timings);
    write_text(&output.join("timing.csv"), &outcome.timing.to_csv())?;
    Ok(outcome)
}

/// Writes crops for existing annotations: for each `<id>.json` in
/// `annotations`, the image `<id>.png` is read from `images`.
pub fn export_dir(
    images: &Path,
    annotations: &Path,
    output: &Path,
    canvas: usize,
) -> Result<BatchOutcome> {
    create_dir(output)?;
    let mut outcome = BatchOutcome::default();
    for mut ann in super::eval::load_predictions(annotations)? {
        let path = images.join(format!("{}.png", ann.image));
        let img = match load_rgb(&path) {
            Ok(img) => img,
            Err(e) => {
                outcome.failures.push((path, e.to_string()));
                continue;
            }
        };
        let (crops, diags) = export_crops(&img, &ann, canvas)?;
        outcome.diagnostics.extend(diags);
        outcome
            .manifest
            .extend(write_crops(output, &mut ann, &crops)?);
        outcome.processed += 1;
    }
    write_text(
        &output.join("manifest.csv"),
        &manifest_csv(&outcome.manifest),
    )?;
    Ok(outcome)
}
