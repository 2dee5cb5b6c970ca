//! Concave points on the union of two overlapping discs, compared with the
//! analytic circle intersections.

use anyhow::Result;
use smearseg::geometry::trace_contours;
use smearseg::raster::BinaryMask;
use smearseg::separate::{concave_flags, find_concave_points_with_gap, SeparationParams};

fn main() -> Result<()> {
    let (r, d) = (22.0f64, 30.0f64);
    let (c1, c2) = ((100.0, 100.0), (100.0 + d, 100.0));
    let mask = BinaryMask::from_fn(240, 200, |x, y| {
        let (px, py) = (x as f64 + 0.5, y as f64 + 0.5);
        let inside = |c: (f64, f64)| (px - c.0).powi(2) + (py - c.1).powi(2) <= r * r;
        inside(c1) || inside(c2)
    });
    let contour = &trace_contours(&mask, 0.0)[0];
    let params = SeparationParams::default();

    let flags = concave_flags(contour, params.k)?;
    println!(
        "{} boundary points, {} pass the k = {} midpoint test",
        contour.len(),
        flags.iter().filter(|&&f| f).count(),
        params.k
    );

    let h = (r * r - d * d / 4.0).sqrt();
    let analytic = [(100.0 + d / 2.0, 100.0 - h), (100.0 + d / 2.0, 100.0 + h)];
    println!("analytic intersections: {analytic:.1?}");
    for cp in find_concave_points_with_gap(contour, params.k, params.merge_gap)? {
        let (x, y) = (cp.coord.0 as f64 + 0.5, cp.coord.1 as f64 + 0.5);
        let dist = analytic
            .iter()
            .map(|&(ax, ay)| (x - ax).hypot(y - ay))
            .fold(f64::INFINITY, f64::min);
        println!(
            "concave point #{} at {:?}, {dist:.2} px from the nearest intersection",
            cp.contour_index, cp.coord
        );
    }
    Ok(())
}
