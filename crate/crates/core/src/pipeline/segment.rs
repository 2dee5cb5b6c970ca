use std::path::{Path, PathBuf};
use std::time::Instant;

use rayon::prelude::*;

use super::annotation::ImageAnnotations;
use super::config::PipelineConfig;
use super::io::{image_id, load_rgb};
use super::timing::StageTiming;
use crate::error::{Error, Result};
use crate::geometry::{trace_contours_with, Contour};
use crate::normalize::{background_mean, normalize_image, NormalizationStats};
use crate::raster::{
    clahe, extract_channel, fill_holes, morph_open, otsu_threshold, BinaryMask, GrayImage, RgbImage,
};
use crate::separate::{separate_overlapping, SeparationResult};

/// Intermediate planes of mask extraction.
#[derive(Debug, Clone)]
pub struct MaskStage {
    pub channel: GrayImage,
    pub enhanced: GrayImage,
    pub threshold: u8,
    /// Foreground after opening and hole filling.
    pub mask: BinaryMask,
    pub diagnostics: Vec<String>,
}

/// Channel, CLAHE, Otsu, opening and hole filling.
pub fn extract_mask(img: &RgbImage, cfg: &PipelineConfig) -> Result<MaskStage> {
    let channel = extract_channel(img, cfg.channel);
    let eq = clahe(&channel, &cfg.clahe())?;
    let mut diagnostics = Vec::new();
    if eq.global_fallback {
        diagnostics.push("image smaller than one CLAHE tile; used global equalization".into());
    }
    let otsu = otsu_threshold(&eq.image, cfg.polarity);
    if otsu.degenerate {
        diagnostics.push("constant image; no foreground".into());
    }
    let mask = fill_holes(&morph_open(&otsu.mask, cfg.morph_radius));
    Ok(MaskStage {
        channel,
        enhanced: eq.image,
        threshold: otsu.threshold,
        mask,
        diagnostics,
    })
}

/// Everything produced for one image.
#[derive(Debug, Clone)]
pub struct ImageResult {
    pub id: String,
    /// The image that was segmented (normalized when statistics were given).
    pub image: RgbImage,
    pub mask: BinaryMask,
    pub contours: Vec<Contour>,
    pub results: Vec<SeparationResult>,
    pub annotations: ImageAnnotations,
    pub timing: StageTiming,
}

/// Configured single-image segmenter; shared read-only across workers.
#[derive(Debug, Clone)]
pub struct Segmenter {
    config: PipelineConfig,
    stats: Option<NormalizationStats>,
}

impl Segmenter {
    pub fn new(config: PipelineConfig, stats: Option<NormalizationStats>) -> Result<Self> {
        config.validate()?;
        Ok(Self { config, stats })
    }

    /// Loads the statistics file named in the config, if any.
    pub fn from_config(config: PipelineConfig) -> Result<Self> {
        let stats = match &config.stats {
            Some(path) => Some(NormalizationStats::load(path)?),
            None => None,
        };
        Self::new(config, stats)
    }

    pub fn config(&self) -> &PipelineConfig {
        &self.config
    }

    /// Shifts the image background to the corpus mean. The image's own mean
    /// comes from the statistics when present, otherwise from a mask of the
    /// raw image.
    fn normalize(
        &self,
        id: &str,
        img: &RgbImage,
        diagnostics: &mut Vec<String>,
    ) -> Result<RgbImage> {
        let Some(stats) = &self.stats else {
            return Ok(img.clone());
        };
        let mean = match stats.per_image.get(id) {
            Some(m) => m.mean,
            None => {
                let stage = extract_mask(img, &self.config)?;
                match background_mean(img, &stage.mask) {
                    Ok(m) => m.mean,
                    Err(Error::NoBackground) => {
                        diagnostics.push("no background pixels; normalization skipped".into());
                        return Ok(img.clone());
                    }
                    Err(e) => return Err(e),
                }
            }
        };
        Ok(normalize_image(img, mean, stats.global_mean))
    }

    pub fn segment(&self, id: &str, img: &RgbImage) -> Result<ImageResult> {
        let mut diagnostics = Vec::new();
        let start = Instant::now();
        let image = self.normalize(id, img, &mut diagnostics)?;
        let stage = extract_mask(&image, &self.config)?;
        diagnostics.extend(stage.diagnostics);
        let contours = trace_contours_with(&stage.mask, &self.config.trace());
        let mask_seconds = start.elapsed().as_secs_f64();

        let start = Instant::now();
        let params = self.config.separation();
        let results: Vec<SeparationResult> = contours
            .iter()
            .map(|c| separate_overlapping(c, &stage.mask, &params))
            .collect();
        let separation_seconds = start.elapsed().as_secs_f64();

        for r in &results {
            diagnostics.extend(
                r.diagnostics
                    .iter()
                    .map(|d| format!("contour {}: {d}", r.contour_id)),
            );
        }
        let mut annotations = ImageAnnotations::build(id, &contours, &results);
        annotations.diagnostics = diagnostics;
        Ok(ImageResult {
            id: id.to_string(),
            image,
            mask: stage.mask,
            contours,
            results,
            annotations,
            timing: StageTiming {
                image: id.to_string(),
                mask_seconds,
                separation_seconds,
            },
        })
    }

    pub fn segment_file(&self, path: &Path) -> Result<ImageResult> {
        let img = load_rgb(path)?;
        self.segment(&image_id(path), &img)
    }
}

/// Segments every file on a pool of `config.threads` workers. Results come
/// back in input order; a failing file does not stop the batch.
pub fn run_segment(seg: &Segmenter, inputs: &[PathBuf]) -> Vec<(PathBuf, Result<ImageResult>)> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(seg.config.threads)
        .build()
        .expect("thread pool");
    pool.install(|| {
        inputs
            .par_iter()
            .map(|p| (p.clone(), seg.segment_file(p)))
            .collect()
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn blank_image_has_no_cells() {
        let img = RgbImage::filled(64, 48, [230, 220, 225]).unwrap();
        let seg = Segmenter::new(PipelineConfig::default(), None).unwrap();
        let r = seg.segment("blank", &img).unwrap();
        assert!(r.contours.is_empty());
        assert!(r.annotations.cells.is_empty());
    }

    #[test]
    fn invalid_config_is_rejected() {
        let cfg = PipelineConfig {
            k: 0,
            ..PipelineConfig::default()
        };
        assert!(Segmenter::new(cfg, None).is_err());
    }
}
