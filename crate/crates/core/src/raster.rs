//! Raster planes and the per-pixel operations that turn a smear photograph
//! into a clean foreground mask: channel extraction, CLAHE, Otsu
//! binarization, disc morphology and hole filling.

use std::collections::VecDeque;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

fn check_len(width: usize, height: usize, len: usize, per_pixel: usize) -> Result<()> {
    let expected = width * height * per_pixel;
    if width == 0 || height == 0 || len != expected {
        return Err(Error::InvalidRaster {
            width,
            height,
            len,
            expected,
        });
    }
    Ok(())
}

/// Row-major 8-bit RGB image.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RgbImage {
    width: usize,
    height: usize,
    data: Vec<u8>,
}

impl RgbImage {
    pub fn new(width: usize, height: usize, data: Vec<u8>) -> Result<Self> {
        check_len(width, height, data.len(), 3)?;
        Ok(Self {
            width,
            height,
            data,
        })
    }

    /// Image filled with a single color.
    pub fn filled(width: usize, height: usize, rgb: [u8; 3]) -> Result<Self> {
        let data = rgb
            .iter()
            .copied()
            .cycle()
            .take(width * height * 3)
            .collect();
        Self::new(width, height, data)
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn dimensions(&self) -> (usize, usize) {
        (self.width, self.height)
    }

    pub fn data(&self) -> &[u8] {
        &self.data
    }

    pub fn into_data(self) -> Vec<u8> {
        self.data
    }

    pub fn pixel(&self, x: usize, y: usize) -> [u8; 3] {
        let i = (y * self.width + x) * 3;
        [self.data[i], self.data[i + 1], self.data[i + 2]]
    }

    pub fn set_pixel(&mut self, x: usize, y: usize, rgb: [u8; 3]) {
        let i = (y * self.width + x) * 3;
        self.data[i..i + 3].copy_from_slice(&rgb);
    }

    pub fn pixels(&self) -> impl Iterator<Item = [u8; 3]> + '_ {
        self.data.chunks_exact(3).map(|p| [p[0], p[1], p[2]])
    }
}

/// Row-major 8-bit single-channel image.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GrayImage {
    width: usize,
    height: usize,
    data: Vec<u8>,
}

impl GrayImage {
    pub fn new(width: usize, height: usize, data: Vec<u8>) -> Result<Self> {
        check_len(width, height, data.len(), 1)?;
        Ok(Self {
            width,
            height,
            data,
        })
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn dimensions(&self) -> (usize, usize) {
        (self.width, self.height)
    }

    pub fn data(&self) -> &[u8] {
        &self.data
    }

    pub fn get(&self, x: usize, y: usize) -> u8 {
        self.data[y * self.width + x]
    }

    /// 256-bin intensity histogram.
    pub fn histogram(&self) -> [u64; 256] {
        let mut hist = [0u64; 256];
        for &v in &self.data {
            hist[v as usize] += 1;
        }
        hist
    }
}

/// Row-major boolean plane; `true` marks foreground (cell) pixels.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BinaryMask {
    width: usize,
    height: usize,
    data: Vec<bool>,
}

impl BinaryMask {
    pub fn new(width: usize, height: usize, data: Vec<bool>) -> Result<Self> {
        if data.len() != width * height {
            return Err(Error::InvalidRaster {
                width,
                height,
                len: data.len(),
                expected: width * height,
            });
        }
        Ok(Self {
            width,
            height,
            data,
        })
    }

    pub fn empty(width: usize, height: usize) -> Self {
        Self {
            width,
            height,
            data: vec![false; width * height],
        }
    }

    pub fn from_fn(width: usize, height: usize, mut f: impl FnMut(usize, usize) -> bool) -> Self {
        let mut data = Vec::with_capacity(width * height);
        for y in 0..height {
            for x in 0..width {
                data.push(f(x, y));
            }
        }
        Self {
            width,
            height,
            data,
        }
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn dimensions(&self) -> (usize, usize) {
        (self.width, self.height)
    }

    pub fn data(&self) -> &[bool] {
        &self.data
    }

    #[inline]
    pub fn get(&self, x: usize, y: usize) -> bool {
        self.data[y * self.width + x]
    }

    /// Bounds-checked lookup on signed coordinates; outside reads as background.
    #[inline]
    pub fn get_signed(&self, x: i64, y: i64) -> bool {
        x >= 0
            && y >= 0
            && (x as usize) < self.width
            && (y as usize) < self.height
            && self.data[y as usize * self.width + x as usize]
    }

    #[inline]
    pub fn set(&mut self, x: usize, y: usize, value: bool) {
        self.data[y * self.width + x] = value;
    }

    pub fn count(&self) -> usize {
        self.data.iter().filter(|&&v| v).count()
    }

    /// Pixel-wise complement.
    pub fn inverted(&self) -> Self {
        Self {
            width: self.width,
            height: self.height,
            data: self.data.iter().map(|v| !v).collect(),
        }
    }

    /// True when every foreground pixel of `self` is also foreground in `other`.
    pub fn is_subset_of(&self, other: &BinaryMask) -> bool {
        self.dimensions() == other.dimensions()
            && self.data.iter().zip(&other.data).all(|(&a, &b)| !a || b)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum Channel {
    Red,
    #[default]
    Green,
    Blue,
}

impl Channel {
    fn offset(self) -> usize {
        match self {
            Channel::Red => 0,
            Channel::Green => 1,
            Channel::Blue => 2,
        }
    }
}

/// Which side of the Otsu threshold is foreground.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum Polarity {
    /// Foreground is strictly darker than the threshold (stained cells on a
    /// bright field).
    #[default]
    Dark,
    /// Foreground is at or above the threshold.
    Bright,
}

pub fn extract_channel(img: &RgbImage, channel: Channel) -> GrayImage {
    let off = channel.offset();
    let data = img.data.chunks_exact(3).map(|p| p[off]).collect();
    GrayImage {
        width: img.width,
        height: img.height,
        data,
    }
}

/// Replicates a gray plane into all three channels.
pub fn gray_to_rgb(gray: &GrayImage) -> RgbImage {
    let data = gray.data.iter().flat_map(|&v| [v, v, v]).collect();
    RgbImage {
        width: gray.width,
        height: gray.height,
        data,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ClaheParams {
    pub clip_limit: f64,
    pub tiles_x: usize,
    pub tiles_y: usize,
}

impl Default for ClaheParams {
    fn default() -> Self {
        Self {
            clip_limit: 2.0,
            tiles_x: 8,
            tiles_y: 8,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ClaheOutput {
    pub image: GrayImage,
    /// Set when the image was smaller than one tile and plain global
    /// equalization was applied instead.
    pub global_fallback: bool,
}

/// Equalization lookup table for one histogram after clipping at
/// `clip_limit * area / 256` counts and redistributing the excess uniformly.
pub(crate) fn clipped_lut(hist: &[u64; 256], area: u64, clip_limit: f64) -> [u8; 256] {
    let mut hist = *hist;
    let limit = (clip_limit * area as f64 / 256.0).max(1.0);
    if limit < area as f64 {
        let limit = limit.floor() as u64;
        let mut excess = 0u64;
        for h in hist.iter_mut() {
            if *h > limit {
                excess += *h - limit;
                *h = limit;
            }
        }
        let per_bin = excess / 256;
        let mut residual = excess % 256;
        for h in hist.iter_mut() {
            *h += per_bin;
        }
        if residual > 0 {
            let step = (256 / residual as usize).max(1);
            let mut i = 0;
            while i < 256 && residual > 0 {
                hist[i] += 1;
                residual -= 1;
                i += step;
            }
        }
    }

    let mut lut = [0u8; 256];
    let mut cdf = 0u64;
    for (v, h) in hist.iter().enumerate() {
        cdf += h;
        // rounded 255 * cdf / area, halves up, in exact integers
        lut[v] = ((255 * cdf + area / 2) / area).min(255) as u8;
    }
    lut
}

/// Interpolation anchors along one axis: for every coordinate the pair of
/// neighbouring tile indices and the weight of the second one. Coordinates
/// outside the outermost tile centres clamp to the edge tile.
fn axis_weights(len: usize, tiles: usize) -> Vec<(usize, usize, f64)> {
    let centre = |t: usize| {
        let lo = t * len / tiles;
        let hi = (t + 1) * len / tiles;
        (lo + hi) as f64 / 2.0 - 0.5
    };
    (0..len)
        .map(|x| {
            let xf = x as f64;
            let mut left = 0;
            while left + 1 < tiles && centre(left + 1) <= xf {
                left += 1;
            }
            let right = (left + 1).min(tiles - 1);
            if right == left {
                return (left, left, 0.0);
            }
            let w = ((xf - centre(left)) / (centre(right) - centre(left))).clamp(0.0, 1.0);
            (left, right, w)
        })
        .collect()
}

/// Contrast-limited adaptive histogram equalization with bilinear blending
/// between tile mappings.
pub fn clahe(gray: &GrayImage, params: &ClaheParams) -> Result<ClaheOutput> {
    if params.tiles_x == 0 || params.tiles_y == 0 {
        return Err(Error::InvalidParameter(
            "CLAHE tile grid must be at least 1x1".into(),
        ));
    }
    if params.clip_limit.is_nan() || params.clip_limit <= 0.0 {
        return Err(Error::InvalidParameter(
            "CLAHE clip limit must be positive".into(),
        ));
    }
    let (w, h) = gray.dimensions();

    if w < params.tiles_x || h < params.tiles_y {
        let lut = clipped_lut(&gray.histogram(), (w * h) as u64, f64::INFINITY);
        let data = gray.data.iter().map(|&v| lut[v as usize]).collect();
        return Ok(ClaheOutput {
            image: GrayImage {
                width: w,
                height: h,
                data,
            },
            global_fallback: true,
        });
    }

    let (tx, ty) = (params.tiles_x, params.tiles_y);
    let mut luts = Vec::with_capacity(tx * ty);
    for j in 0..ty {
        let (y0, y1) = (j * h / ty, (j + 1) * h / ty);
        for i in 0..tx {
            let (x0, x1) = (i * w / tx, (i + 1) * w / tx);
            let mut hist = [0u64; 256];
            for y in y0..y1 {
                for &v in &gray.data[y * w + x0..y * w + x1] {
                    hist[v as usize] += 1;
                }
            }
            let area = ((x1 - x0) * (y1 - y0)) as u64;
            luts.push(clipped_lut(&hist, area, params.clip_limit));
        }
    }

    let cols = axis_weights(w, tx);
    let rows = axis_weights(h, ty);
    let mut data = Vec::with_capacity(w * h);
    for (y, &(t0, t1, wy)) in rows.iter().enumerate() {
        for (x, &(s0, s1, wx)) in cols.iter().enumerate() {
            let v = gray.data[y * w + x] as usize;
            let top = (1.0 - wx) * luts[t0 * tx + s0][v] as f64 + wx * luts[t0 * tx + s1][v] as f64;
            let bottom =
                (1.0 - wx) * luts[t1 * tx + s0][v] as f64 + wx * luts[t1 * tx + s1][v] as f64;
            data.push(((1.0 - wy) * top + wy * bottom).round().clamp(0.0, 255.0) as u8);
        }
    }
    Ok(ClaheOutput {
        image: GrayImage {
            width: w,
            height: h,
            data,
        },
        global_fallback: false,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct OtsuOutput {
    /// First intensity of the upper class: the split is `v < threshold`
    /// versus `v >= threshold`.
    pub threshold: u8,
    pub mask: BinaryMask,
    /// Constant input; the mask is all background.
    pub degenerate: bool,
}

/// Between-class variance scaled by `total²`, kept as an exact fraction
/// `numerator / denominator` so equal splits compare equal.
fn between_class(total: u64, sum_all: u64, w0: u64, sum0: u64) -> Option<(u128, u128)> {
    let w1 = total - w0;
    if w0 == 0 || w1 == 0 {
        return None;
    }
    let diff = total as i128 * sum0 as i128 - w0 as i128 * sum_all as i128;
    let num = diff.unsigned_abs().checked_mul(diff.unsigned_abs())?;
    Some((num, w0 as u128 * w1 as u128))
}

fn fraction_gt(a: (u128, u128), b: (u128, u128)) -> bool {
    match (a.0.checked_mul(b.1), b.0.checked_mul(a.1)) {
        (Some(l), Some(r)) => l > r,
        _ => a.0 as f64 / a.1 as f64 > b.0 as f64 / b.1 as f64,
    }
}

/// Otsu threshold over the 256-bin histogram. Ties resolve to the smallest
/// threshold.
pub fn otsu_threshold(gray: &GrayImage, polarity: Polarity) -> OtsuOutput {
    let hist = gray.histogram();
    let total: u64 = hist.iter().sum();
    let occupied: Vec<usize> = (0..256).filter(|&v| hist[v] > 0).collect();

    if occupied.len() <= 1 {
        let value = occupied.first().copied().unwrap_or(0) as u8;
        return OtsuOutput {
            threshold: value,
            mask: BinaryMask::empty(gray.width, gray.height),
            degenerate: true,
        };
    }

    let sum_all: u64 = hist.iter().enumerate().map(|(v, &h)| v as u64 * h).sum();
    let mut best: Option<((u128, u128), usize)> = None;
    let (mut w0, mut sum0) = (0u64, 0u64);
    for t in 0..256usize {
        // class 0 holds intensities below t
        if t > 0 {
            w0 += hist[t - 1];
            sum0 += (t as u64 - 1) * hist[t - 1];
        }
        if let Some(score) = between_class(total, sum_all, w0, sum0) {
            if best.is_none_or(|(b, _)| fraction_gt(score, b)) {
                best = Some((score, t));
            }
        }
    }
    let threshold = best.map(|(_, t)| t).unwrap_or(0) as u8;
    let data = gray
        .data
        .iter()
        .map(|&v| match polarity {
            Polarity::Dark => v < threshold,
            Polarity::Bright => v >= threshold,
        })
        .collect();
    OtsuOutput {
        threshold,
        mask: BinaryMask {
            width: gray.width,
            height: gray.height,
            data,
        },
        degenerate: false,
    }
}

/// Offsets of a digital disc `dx² + dy² <= r²`.
pub fn disc_offsets(radius: usize) -> Vec<(i64, i64)> {
    let r = radius as i64;
    let mut out = Vec::new();
    for dy in -r..=r {
        for dx in -r..=r {
            if dx * dx + dy * dy <= r * r {
                out.push((dx, dy));
            }
        }
    }
    out
}

/// Binary erosion by a disc. Neighbours outside the image are ignored.
pub fn erode(mask: &BinaryMask, radius: usize) -> BinaryMask {
    if radius == 0 {
        return mask.clone();
    }
    let offsets = disc_offsets(radius);
    let (w, h) = (mask.width as i64, mask.height as i64);
    BinaryMask::from_fn(mask.width, mask.height, |x, y| {
        mask.get(x, y)
            && offsets.iter().all(|&(dx, dy)| {
                let (nx, ny) = (x as i64 + dx, y as i64 + dy);
                nx < 0 || ny < 0 || nx >= w || ny >= h || mask.get(nx as usize, ny as usize)
            })
    })
}

/// Binary dilation by a disc.
pub fn dilate(mask: &BinaryMask, radius: usize) -> BinaryMask {
    if radius == 0 {
        return mask.clone();
    }
    let offsets = disc_offsets(radius);
    let mut out = BinaryMask::empty(mask.width, mask.height);
    let (w, h) = (mask.width as i64, mask.height as i64);
    for y in 0..mask.height {
        for x in 0..mask.width {
            if !mask.get(x, y) {
                continue;
            }
            for &(dx, dy) in &offsets {
                let (nx, ny) = (x as i64 + dx, y as i64 + dy);
                if nx >= 0 && ny >= 0 && nx < w && ny < h {
                    out.set(nx as usize, ny as usize, true);
                }
            }
        }
    }
    out
}

/// Opening (erosion then dilation) with a disc; radius 0 is the identity.
pub fn morph_open(mask: &BinaryMask, radius: usize) -> BinaryMask {
    dilate(&erode(mask, radius), radius)
}

/// Marks every background region that is not 4-connected to the image
/// border as foreground.
pub fn fill_holes(mask: &BinaryMask) -> BinaryMask {
    let (w, h) = mask.dimensions();
    let mut outside = vec![false; w * h];
    let mut queue = VecDeque::new();
    let seed =
        |x: usize, y: usize, outside: &mut Vec<bool>, queue: &mut VecDeque<(usize, usize)>| {
            let i = y * w + x;
            if !mask.data[i] && !outside[i] {
                outside[i] = true;
                queue.push_back((x, y));
            }
        };
    for x in 0..w {
        seed(x, 0, &mut outside, &mut queue);
        seed(x, h - 1, &mut outside, &mut queue);
    }
    for y in 0..h {
        seed(0, y, &mut outside, &mut queue);
        seed(w - 1, y, &mut outside, &mut queue);
    }
    while let Some((x, y)) = queue.pop_front() {
        if x > 0 {
            seed(x - 1, y, &mut outside, &mut queue);
        }
        if x + 1 < w {
            seed(x + 1, y, &mut outside, &mut queue);
        }
        if y > 0 {
            seed(x, y - 1, &mut outside, &mut queue);
        }
        if y + 1 < h {
            seed(x, y + 1, &mut outside, &mut queue);
        }
    }
    BinaryMask {
        width: w,
        height: h,
        data: outside.into_iter().map(|o| !o).collect(),
    }
}
