//! Full separation of one overlapping contour: concave points, convex
//! curves, single-curve fits, verification and two-curve refits.

use anyhow::Result;
use smearseg::geometry::{rasterize_ellipse, trace_contours, Ellipse};
use smearseg::raster::BinaryMask;
use smearseg::separate::{separate_overlapping, FitSource, SeparationParams};

fn main() -> Result<()> {
    let cells = [
        Ellipse::new(120.0, 110.0, 30.0, 24.0, 0.3)?,
        Ellipse::new(162.0, 124.0, 26.0, 22.0, 1.2)?,
        Ellipse::new(138.0, 152.0, 22.0, 20.0, 0.0)?,
    ];
    let dims = (300, 260);
    let masks: Vec<BinaryMask> = cells.iter().map(|e| rasterize_ellipse(e, dims)).collect();
    let mask = BinaryMask::from_fn(dims.0, dims.1, |x, y| masks.iter().any(|m| m.get(x, y)));

    let contours = trace_contours(&mask, 300.0);
    println!("{} contour(s)", contours.len());
    let result = separate_overlapping(&contours[0], &mask, &SeparationParams::default());

    println!(
        "concave points: {:?}",
        result
            .concave_points
            .iter()
            .map(|c| c.coord)
            .collect::<Vec<_>>()
    );
    println!(
        "curve lengths: {:?}",
        result
            .curves
            .iter()
            .map(|c| c.points.len())
            .collect::<Vec<_>>()
    );
    for a in &result.accepted {
        let e = &a.ellipse;
        let from = match a.source {
            FitSource::SingleCurve { curve } => format!("curve {curve}"),
            FitSource::TwoCurve { first, second } => format!("curves {first}+{second}"),
        };
        println!(
            "cell at ({:.1}, {:.1}) a {:.1} b {:.1} from {from}",
            e.cx, e.cy, e.a, e.b
        );
    }
    println!("leftover curves: {:?}", result.leftover_curves);
    println!("cells: {} (truth {})", result.cell_count(), cells.len());
    for d in &result.diagnostics {
        println!("note: {d}");
    }
    Ok(())
}
