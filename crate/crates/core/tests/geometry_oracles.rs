use std::f64::consts::PI;

use approx::assert_relative_eq;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use smearseg::geometry::{
    conic_to_ellipse, contour_area, ellipse_area, ellipse_to_conic, fill_contour, point_in_polygon,
    polygon_area, rasterize_ellipse, trace_contours_with, Contour, Ellipse, Location, Point,
    TraceParams,
};
use smearseg::raster::{fill_holes, BinaryMask};

/// Star-shaped polygon around `(cx, cy)` with strictly increasing angles,
/// hence simple.
fn star_polygon(rng: &mut ChaCha8Rng, cx: i32, cy: i32) -> Vec<Point> {
    let n = rng.random_range(3..14);
    let mut angles: Vec<f64> = (0..n).map(|_| rng.random_range(0.0..2.0 * PI)).collect();
    angles.sort_by(f64::total_cmp);
    let mut pts: Vec<Point> = angles
        .iter()
        .map(|&t| {
            let r = rng.random_range(3.0..40.0);
            (
                cx + (r * t.cos()).round() as i32,
                cy + (r * t.sin()).round() as i32,
            )
        })
        .collect();
    pts.dedup();
    pts
}

fn winding_number(poly: &[Point], p: (f64, f64)) -> i32 {
    let mut wn = 0;
    let n = poly.len();
    for i in 0..n {
        let (a, b) = (poly[i], poly[(i + 1) % n]);
        let (ax, ay, bx, by) = (a.0 as f64, a.1 as f64, b.0 as f64, b.1 as f64);
        let side = (bx - ax) * (p.1 - ay) - (by - ay) * (p.0 - ax);
        if ay <= p.1 && by > p.1 && side > 0.0 {
            wn += 1;
        } else if ay > p.1 && by <= p.1 && side < 0.0 {
            wn -= 1;
        }
    }
    wn
}

fn on_boundary(poly: &[Point], p: (f64, f64)) -> bool {
    let n = poly.len();
    (0..n).any(|i| {
        let (a, b) = (poly[i], poly[(i + 1) % n]);
        let (ax, ay, bx, by) = (a.0 as f64, a.1 as f64, b.0 as f64, b.1 as f64);
        let cross = (bx - ax) * (p.1 - ay) - (by - ay) * (p.0 - ax);
        cross.abs() < 1e-9
            && p.0 >= ax.min(bx)
            && p.0 <= ax.max(bx)
            && p.1 >= ay.min(by)
            && p.1 <= ay.max(by)
    })
}

#[test]
fn ray_casting_agrees_with_winding_number() {
    let mut rng = ChaCha8Rng::seed_from_u64(21);
    let mut checked = 0;
    for _ in 0..50 {
        let poly = star_polygon(&mut rng, 50, 50);
        if poly.len() < 3 {
            continue;
        }
        for _ in 0..1000 {
            let p = (rng.random_range(0.0..100.0), rng.random_range(0.0..100.0));
            if on_boundary(&poly, p) {
                continue;
            }
            let expected = if winding_number(&poly, p) != 0 {
                Location::Inside
            } else {
                Location::Outside
            };
            assert_eq!(point_in_polygon(&poly, p), expected, "{poly:?} {p:?}");
            checked += 1;
        }
    }
    assert!(checked > 40_000);
}

fn fan_area(poly: &[Point]) -> f64 {
    let o = poly[0];
    let twice: i64 = (1..poly.len() - 1)
        .map(|i| {
            let (a, b) = (poly[i], poly[i + 1]);
            ((a.0 - o.0) as i64 * (b.1 - o.1) as i64) - ((a.1 - o.1) as i64 * (b.0 - o.0) as i64)
        })
        .sum();
    twice.abs() as f64 / 2.0
}

/// Histogram-shaped rectilinear polygon: random column heights above y = 0.
fn rectilinear_polygon(rng: &mut ChaCha8Rng) -> Vec<Point> {
    let cols = rng.random_range(1..12);
    let mut pts = vec![(0, 0)];
    let mut x = 0;
    for _ in 0..cols {
        let h = rng.random_range(1..30);
        let w = rng.random_range(1..10);
        pts.push((x, -h));
        x += w;
        pts.push((x, -h));
    }
    pts.push((x, 0));
    pts.dedup();
    pts
}

#[test]
fn shoelace_matches_fan_triangulation() {
    let mut rng = ChaCha8Rng::seed_from_u64(22);
    for _ in 0..500 {
        let poly = if rng.random_bool(0.5) {
            rectilinear_polygon(&mut rng)
        } else {
            star_polygon(&mut rng, 0, 0)
        };
        if poly.len() < 3 {
            continue;
        }
        assert_relative_eq!(
            polygon_area(&poly),
            fan_area(&poly),
            max_relative = 1e-9,
            epsilon = 1e-12
        );
        let mut reversed = poly.clone();
        reversed.reverse();
        assert_eq!(polygon_area(&reversed), polygon_area(&poly));
    }
}

/// 8-connected components by union over a visited grid.
fn component_of(mask: &BinaryMask, start: (usize, usize)) -> BinaryMask {
    let (w, h) = mask.dimensions();
    let mut out = BinaryMask::empty(w, h);
    let mut stack = vec![start];
    while let Some((x, y)) = stack.pop() {
        if out.get(x, y) || !mask.get(x, y) {
            continue;
        }
        out.set(x, y, true);
        for dy in -1i64..=1 {
            for dx in -1i64..=1 {
                let (nx, ny) = (x as i64 + dx, y as i64 + dy);
                if mask.get_signed(nx, ny) {
                    stack.push((nx as usize, ny as usize));
                }
            }
        }
    }
    out
}

fn blob_mask() -> impl Strategy<Value = BinaryMask> {
    (20usize..70, 20usize..70, 1usize..6, any::<u64>()).prop_map(|(w, h, n, seed)| {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let discs: Vec<(f64, f64, f64)> = (0..n)
            .map(|_| {
                (
                    rng.random_range(0.0..w as f64),
                    rng.random_range(0.0..h as f64),
                    rng.random_range(1.5..12.0),
                )
            })
            .collect();
        let m = BinaryMask::from_fn(w, h, |x, y| {
            discs
                .iter()
                .any(|&(cx, cy, r)| (x as f64 - cx).powi(2) + (y as f64 - cy).powi(2) <= r * r)
        });
        fill_holes(&m)
    })
}

proptest! {
    #[test]
    fn traced_contour_fills_back_to_its_component(m in blob_mask()) {
        let params = TraceParams { min_area: 0.0, border_margin: 0 };
        for c in trace_contours_with(&m, &params) {
            prop_assert!(contour_area(&c) > 0.0);
            let p = c.points()[0];
            let comp = component_of(&m, (p.0 as usize, p.1 as usize));
            prop_assert_eq!(fill_contour(&c, m.dimensions()), comp);
        }
    }

    #[test]
    fn area_is_invariant_under_rotation(m in blob_mask(), shift in 0usize..200) {
        let params = TraceParams { min_area: 0.0, border_margin: 0 };
        for c in trace_contours_with(&m, &params) {
            let mut pts = c.points().to_vec();
            let k = shift % pts.len();
            pts.rotate_left(k);
            let rotated = Contour::new(c.id, pts).unwrap();
            prop_assert_eq!(contour_area(&rotated), contour_area(&c));
        }
    }
}

fn random_ellipse(rng: &mut ChaCha8Rng) -> Ellipse {
    let a = rng.random_range(8.0..40.0);
    let b = a * rng.random_range(0.3..0.95);
    Ellipse::new(
        rng.random_range(0.0..640.0),
        rng.random_range(0.0..480.0),
        a,
        b,
        rng.random_range(0.0..PI),
    )
    .unwrap()
}

fn angle_diff(t1: f64, t2: f64) -> f64 {
    let d = (t1 - t2).rem_euclid(PI);
    d.min(PI - d)
}

#[test]
fn conic_round_trip() {
    let mut rng = ChaCha8Rng::seed_from_u64(23);
    for _ in 0..1000 {
        let e = random_ellipse(&mut rng);
        let back = conic_to_ellipse(&ellipse_to_conic(&e)).unwrap();
        assert!(
            (back.cx - e.cx).abs() < 1e-9 && (back.cy - e.cy).abs() < 1e-9,
            "{e:?} {back:?}"
        );
        assert!((back.a - e.a).abs() < 1e-9 * e.a && (back.b - e.b).abs() < 1e-9 * e.b);
        assert!(angle_diff(back.theta, e.theta) < 1e-9);
    }
}

#[test]
fn circle_raster_matches_pixel_centre_test() {
    let mut rng = ChaCha8Rng::seed_from_u64(24);
    for _ in 0..200 {
        let (cx, cy, r) = (
            rng.random_range(-10.0..110.0),
            rng.random_range(-10.0..90.0),
            rng.random_range(0.7..30.0),
        );
        let raster = rasterize_ellipse(&Ellipse::circle(cx, cy, r).unwrap(), (100, 80));
        let oracle = BinaryMask::from_fn(100, 80, |x, y| {
            (x as f64 + 0.5 - cx).powi(2) + (y as f64 + 0.5 - cy).powi(2) <= r * r
        });
        assert_eq!(raster, oracle, "circle ({cx}, {cy}) r {r}");
    }
}

#[test]
fn raster_area_tracks_analytic_area() {
    let mut rng = ChaCha8Rng::seed_from_u64(25);
    for _ in 0..300 {
        let a = rng.random_range(8.0..40.0);
        let b = rng.random_range(8.0..=a);
        let e = Ellipse::new(
            100.0 + rng.random::<f64>(),
            100.0 + rng.random::<f64>(),
            a,
            b,
            rng.random_range(0.0..PI),
        )
        .unwrap();
        let count = rasterize_ellipse(&e, (200, 200)).count() as f64;
        assert!((count - ellipse_area(&e)).abs() <= 0.03 * ellipse_area(&e));
    }
    assert_relative_eq!(
        ellipse_area(&Ellipse::new(0.0, 0.0, 2.0, 1.0, 0.0).unwrap()),
        2.0 * PI
    );
}
