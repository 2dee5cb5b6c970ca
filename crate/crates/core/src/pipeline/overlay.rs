use crate::geometry::{ellipse_outline, Contour};
use crate::raster::{disc_offsets, RgbImage};
use crate::separate::SeparationResult;

pub const CONTOUR_COLOR: [u8; 3] = [255, 255, 0];
pub const ELLIPSE_COLOR: [u8; 3] = [0, 255, 0];
pub const CONCAVE_COLOR: [u8; 3] = [255, 0, 0];
pub const CONCAVE_DOT_RADIUS: usize = 2;

/// Draws contours, then accepted ellipse outlines, then concave-point dots.
/// Pixels under no primitive keep their input values.
pub fn render_overlay(
    img: &RgbImage,
    contours: &[Contour],
    results: &[SeparationResult],
) -> RgbImage {
    let mut out = img.clone();
    let (w, h) = img.dimensions();
    let mut put = |x: i64, y: i64, color: [u8; 3]| {
        if x >= 0 && y >= 0 && (x as usize) < w && (y as usize) < h {
            out.set_pixel(x as usize, y as usize, color);
        }
    };
    for c in contours {
        for &(x, y) in c.points() {
            put(x as i64, y as i64, CONTOUR_COLOR);
        }
    }
    for r in results {
        for e in r.ellipses() {
            for (x, y) in ellipse_outline(e, (w, h)) {
                put(x as i64, y as i64, ELLIPSE_COLOR);
            }
        }
    }
    let dot = disc_offsets(CONCAVE_DOT_RADIUS);
    for r in results {
        for p in &r.concave_points {
            for &(dx, dy) in &dot {
                put(p.coord.0 as i64 + dx, p.coord.1 as i64 + dy, CONCAVE_COLOR);
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn nothing_to_draw_is_identity() {
        let img = RgbImage::filled(8, 8, [1, 2, 3]).unwrap();
        assert_eq!(render_overlay(&img, &[], &[]), img);
    }
}
