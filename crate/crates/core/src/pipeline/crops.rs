use std::fmt::Write as _;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::annotation::{CellGeometry, ImageAnnotations};
use super::io::save_rgb;
use crate::error::Result;
use crate::geometry::{fill_contour, rasterize_ellipse, Contour};
use crate::raster::{BinaryMask, RgbImage};

/// One cell on a black square canvas.
#[derive(Debug, Clone, PartialEq)]
pub struct Crop {
    pub cell_id: usize,
    pub image: RgbImage,
    /// Offset of the canvas origin in source-image pixels.
    pub origin: (i64, i64),
    /// Set when the cell's bounding box exceeded the canvas.
    pub oversized: bool,
}

/// Pixels of one annotated cell.
pub fn cell_mask(geometry: &CellGeometry, bounds: (usize, usize)) -> Result<BinaryMask> {
    Ok(match geometry {
        CellGeometry::Ellipse(p) => rasterize_ellipse(&p.to_ellipse()?, bounds),
        CellGeometry::Contour(points) => fill_contour(&Contour::new(0, points.clone())?, bounds),
    })
}

fn mask_bbox(mask: &BinaryMask) -> Option<(usize, usize, usize, usize)> {
    let (w, h) = mask.dimensions();
    let mut bb: Option<(usize, usize, usize, usize)> = None;
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

/// Copies the cell's pixels onto a centred black `canvas`×`canvas` image.
/// A cell larger than the canvas is centre-cropped. Returns `None` for a
/// geometry covering no pixel.
pub fn crop_cell(img: &RgbImage, mask: &BinaryMask, cell_id: usize, canvas: usize) -> Option<Crop> {
    let (x0, y0, x1, y1) = mask_bbox(mask)?;
    let (bw, bh) = ((x1 - x0 + 1) as i64, (y1 - y0 + 1) as i64);
    let c = canvas as i64;
    let ox = x0 as i64 - (c - bw).div_euclid(2);
    let oy = y0 as i64 - (c - bh).div_euclid(2);
    let mut out = RgbImage::filled(canvas, canvas, [0, 0, 0]).expect("canvas is non-empty");
    let (w, h) = (img.width() as i64, img.height() as i64);
    for cy in 0..c {
        for cx in 0..c {
            let (sx, sy) = (ox + cx, oy + cy);
            if sx >= 0 && sy >= 0 && sx < w && sy < h && mask.get(sx as usize, sy as usize) {
                out.set_pixel(
                    cx as usize,
                    cy as usize,
                    img.pixel(sx as usize, sy as usize),
                );
            }
        }
    }
    Some(Crop {
        cell_id,
        image: out,
        origin: (ox, oy),
        oversized: bw > c || bh > c,
    })
}

/// Crops every annotated cell; diagnostics name oversized and empty cells.
pub fn export_crops(
    img: &RgbImage,
    annotations: &ImageAnnotations,
    canvas: usize,
) -> Result<(Vec<Crop>, Vec<String>)> {
    let mut crops = Vec::new();
    let mut diagnostics = Vec::new();
    for cell in &annotations.cells {
        let mask = cell_mask(&cell.geometry, img.dimensions())?;
        match crop_cell(img, &mask, cell.id, canvas) {
            Some(crop) => {
                if crop.oversized {
                    diagnostics.push(format!(
                        "{} cell {}: larger than the {canvas}px canvas, centre-cropped",
                        annotations.image, cell.id
                    ));
                }
                crops.push(crop);
            }
            None => diagnostics.push(format!(
                "{} cell {}: empty geometry, no crop",
                annotations.image, cell.id
            )),
        }
    }
    Ok((crops, diagnostics))
}

pub fn crop_file_name(image: &str, cell_id: usize) -> String {
    format!("{image}_cell{cell_id:03}.png")
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ManifestRow {
    pub image: String,
    pub cell_id: usize,
    pub file: String,
    pub oversized: bool,
}

/// Writes crop PNGs into `dir`, records their names in the annotations and
/// returns manifest rows in cell order.
pub fn write_crops(
    dir: &Path,
    annotations: &mut ImageAnnotations,
    crops: &[Crop],
) -> Result<Vec<ManifestRow>> {
    let mut rows = Vec::new();
    for crop in crops {
        let file = crop_file_name(&annotations.image, crop.cell_id);
        save_rgb(&crop.image, &dir.join(&file))?;
        if let Some(cell) = annotations.cells.iter_mut().find(|c| c.id == crop.cell_id) {
            cell.crop = Some(file.clone());
        }
        rows.push(ManifestRow {
            image: annotations.image.clone(),
            cell_id: crop.cell_id,
            file,
            oversized: crop.oversized,
        });
    }
    Ok(rows)
}

pub fn manifest_csv(rows: &[ManifestRow]) -> String {
    let mut out = String::from("image,cell_id,file,oversized\n");
    for r in rows {
        let _ = writeln!(out, "{},{},{},{}", r.image, r.cell_id, r.file, r.oversized);
    }
    out
}
