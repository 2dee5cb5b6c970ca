use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::TraceParams;
use crate::raster::{Channel, ClaheParams, Polarity};
use crate::separate::SeparationParams;

/// Batch configuration, read from a flat `key = value` TOML file.
///
/// `min_area` is the single size filter: it drops small contours and is the
/// verification threshold for fitted ellipse areas.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PipelineConfig {
    pub channel: Channel,
    pub clip_limit: f64,
    pub tiles_x: usize,
    pub tiles_y: usize,
    pub polarity: Polarity,
    pub morph_radius: usize,
    pub min_area: f64,
    pub border_margin: usize,
    pub k: usize,
    pub inside_ratio: f64,
    pub novelty_ratio: f64,
    pub min_fit_points: usize,
    pub merge_gap: usize,
    pub crop_canvas: usize,
    pub stats: Option<PathBuf>,
    /// Worker threads; 0 uses every available core.
    pub threads: usize,
}

impl Default for PipelineConfig {
    fn default() -> Self {
        let clahe = ClaheParams::default();
        let sep = SeparationParams::default();
        Self {
            channel: Channel::Green,
            clip_limit: clahe.clip_limit,
            tiles_x: clahe.tiles_x,
            tiles_y: clahe.tiles_y,
            polarity: Polarity::Dark,
            morph_radius: 1,
            min_area: 300.0,
            border_margin: 1,
            k: sep.k,
            inside_ratio: sep.inside_ratio,
            novelty_ratio: sep.novelty_ratio,
            min_fit_points: sep.min_fit_points,
            merge_gap: sep.merge_gap,
            crop_canvas: 72,
            stats: None,
            threads: 1,
        }
    }
}

/// Smallest accepted crop canvas side.
pub const MIN_CROP_CANVAS: usize = 48;

impl PipelineConfig {
    pub fn from_toml(text: &str) -> Result<Self> {
        let cfg: Self = toml::from_str(text)?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_toml(&text)
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("flat config serializes")
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidParameter(msg));
        if !(self.clip_limit > 0.0) {
            return bad(format!(
                "clip_limit must be positive, got {}",
                self.clip_limit
            ));
        }
        if self.tiles_x == 0 || self.tiles_y == 0 {
            return bad("tile grid must be at least 1x1".into());
        }
        if !(self.min_area >= 0.0) {
            return bad(format!(
                "min_area must be non-negative, got {}",
                self.min_area
            ));
        }
        if self.crop_canvas < MIN_CROP_CANVAS {
            return bad(format!(
                "crop_canvas must be at least {MIN_CROP_CANVAS}, got {}",
                self.crop_canvas
            ));
        }
        self.separation().validate()
    }

    pub fn clahe(&self) -> ClaheParams {
        ClaheParams {
            clip_limit: self.clip_limit,
            tiles_x: self.tiles_x,
            tiles_y: self.tiles_y,
        }
    }

    pub fn trace(&self) -> TraceParams {
        TraceParams {
            min_area: self.min_area,
            border_margin: self.border_margin,
        }
    }

    pub fn separation(&self) -> SeparationParams {
        SeparationParams {
            k: self.k,
            min_ellipse_area: self.min_area,
            inside_ratio: self.inside_ratio,
            novelty_ratio: self.novelty_ratio,
            min_fit_points: self.min_fit_points,
            merge_gap: self.merge_gap,
        }
    }
}
