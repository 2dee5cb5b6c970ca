//! Background color normalization.
//!
//! Every image is shifted additively so that its background mean matches
//! the mean background color of a reference corpus:
//! `r' = r + (R_avg - r_avg)`, likewise for green and blue.

use std::collections::BTreeMap;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::raster::{dilate, BinaryMask, RgbImage};

/// How background pixels are chosen from a foreground mask.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BackgroundParams {
    /// Foreground is dilated by a disc of this radius before taking the
    /// complement, keeping cell halos out of the estimate.
    pub dilate_radius: usize,
    /// Pixels closer than this to the image edge are ignored.
    pub border: usize,
}

impl Default for BackgroundParams {
    fn default() -> Self {
        Self {
            dilate_radius: 5,
            border: 5,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BackgroundMean {
    pub mean: [f64; 3],
    pub bg_pixels: u64,
}

/// Per-channel mean over background pixels using the default extraction
/// parameters.
pub fn background_mean(img: &RgbImage, fg_mask: &BinaryMask) -> Result<BackgroundMean> {
    background_mean_with(img, fg_mask, &BackgroundParams::default())
}

pub fn background_mean_with(
    img: &RgbImage,
    fg_mask: &BinaryMask,
    params: &BackgroundParams,
) -> Result<BackgroundMean> {
    if img.dimensions() != fg_mask.dimensions() {
        return Err(Error::SizeMismatch {
            left: img.dimensions(),
            right: fg_mask.dimensions(),
        });
    }
    let grown = dilate(fg_mask, params.dilate_radius);
    let (w, h) = img.dimensions();
    let b = params.border;
    let mut sums = [0u64; 3];
    let mut count = 0u64;
    for y in b..h.saturating_sub(b) {
        for x in b..w.saturating_sub(b) {
            if grown.get(x, y) {
                continue;
            }
            let p = img.pixel(x, y);
            for c in 0..3 {
                sums[c] += p[c] as u64;
            }
            count += 1;
        }
    }
    if count == 0 {
        return Err(Error::NoBackground);
    }
    Ok(BackgroundMean {
        mean: sums.map(|s| s as f64 / count as f64),
        bg_pixels: count,
    })
}

/// Corpus-level background statistics.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NormalizationStats {
    pub global_mean: [f64; 3],
    #[serde(rename = "images")]
    pub per_image: BTreeMap<String, BackgroundMean>,
    pub version: u32,
}

impl NormalizationStats {
    pub const VERSION: u32 = 1;

    pub fn image_count(&self) -> usize {
        self.per_image.len()
    }

    /// Recomputes the pooled mean from per-image entries, in id order.
    fn pooled(per_image: &BTreeMap<String, BackgroundMean>) -> [f64; 3] {
        let total: u64 = per_image.values().map(|m| m.bg_pixels).sum();
        let mut acc = [0.0; 3];
        for m in per_image.values() {
            for (a, v) in acc.iter_mut().zip(m.mean) {
                *a += v * m.bg_pixels as f64;
            }
        }
        acc.map(|s| s / total as f64)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let stats: Self = serde_json::from_str(text)?;
        if stats.version != Self::VERSION {
            return Err(Error::InvalidParameter(format!(
                "unsupported stats version {}",
                stats.version
            )));
        }
        Ok(stats)
    }

    /// JSON document; reals use shortest round-trip formatting, which keeps
    /// full double precision.
    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_json(&text)
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.to_json()?).map_err(|e| Error::io(path, e))
    }
}

/// Fits corpus statistics from `(id, image, foreground mask)` triples.
///
/// The global mean pools all background pixels, i.e. per-image means are
/// weighted by their background pixel counts.
pub fn fit_corpus<'a, I>(images: I) -> Result<NormalizationStats>
where
    I: IntoIterator<Item = (&'a str, &'a RgbImage, &'a BinaryMask)>,
{
    let mut per_image = BTreeMap::new();
    for (id, img, mask) in images {
        let m = background_mean(img, mask).map_err(|e| match e {
            Error::NoBackground => Error::NoBackgroundIn { id: id.to_string() },
            other => other,
        })?;
        per_image.insert(id.to_string(), m);
    }
    stats_from_means(per_image)
}

/// Builds statistics from already-computed per-image background means.
pub fn stats_from_means(per_image: BTreeMap<String, BackgroundMean>) -> Result<NormalizationStats> {
    if per_image.is_empty() {
        return Err(Error::EmptyCorpus);
    }
    if let Some((id, _)) = per_image.iter().find(|(_, m)| m.bg_pixels == 0) {
        return Err(Error::NoBackgroundIn { id: id.clone() });
    }
    Ok(NormalizationStats {
        global_mean: NormalizationStats::pooled(&per_image),
        per_image,
        version: NormalizationStats::VERSION,
    })
}

/// Real-valued RGB plane produced by the unquantized shift.
#[derive(Debug, Clone, PartialEq)]
pub struct ShiftedImage {
    pub width: usize,
    pub height: usize,
    pub data: Vec<f64>,
}

impl ShiftedImage {
    pub fn pixel(&self, x: usize, y: usize) -> [f64; 3] {
        let i = (y * self.width + x) * 3;
        [self.data[i], self.data[i + 1], self.data[i + 2]]
    }

    /// Rounds to the nearest 8-bit value.
    pub fn quantize(&self) -> RgbImage {
        let data = self.data.iter().map(|v| v.round() as u8).collect();
        RgbImage::new(self.width, self.height, data).expect("dimensions preserved")
    }
}

/// Mean shift without quantization; results are clamped to `[0, 255]`.
pub fn shift_image(img: &RgbImage, img_mean: [f64; 3], global_mean: [f64; 3]) -> ShiftedImage {
    let offset = [0, 1, 2].map(|c| global_mean[c] - img_mean[c]);
    let data = img
        .data()
        .chunks_exact(3)
        .flat_map(|p| [0, 1, 2].map(|c| (p[c] as f64 + offset[c]).clamp(0.0, 255.0)))
        .collect();
    ShiftedImage {
        width: img.width(),
        height: img.height(),
        data,
    }
}

/// Applies the background mean shift and returns an 8-bit image (clamped,
/// rounded to nearest).
pub fn normalize_image(img: &RgbImage, img_mean: [f64; 3], global_mean: [f64; 3]) -> RgbImage {
    shift_image(img, img_mean, global_mean).quantize()
}
