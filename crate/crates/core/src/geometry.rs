//! Contours traced from binary masks, polygon predicates on them, and the
//! conic/ellipse representations used by the separation engine.
//!
//! Coordinates: contour points are integer pixel indices `(x, y)` with `y`
//! pointing down. Ellipses live in the continuous image frame where pixel
//! `(i, j)` covers `[i, i + 1) × [j, j + 1)` and its centre is
//! `(i + 0.5, j + 0.5)`.

use std::collections::VecDeque;
use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::raster::BinaryMask;

pub type Point = (i32, i32);

/// Moore neighbourhood in clockwise screen order, starting west.
const DIRS: [Point; 8] = [
    (-1, 0),
    (-1, -1),
    (0, -1),
    (1, -1),
    (1, 0),
    (1, 1),
    (0, 1),
    (-1, 1),
];

fn dir_index(dx: i32, dy: i32) -> usize {
    DIRS.iter()
        .position(|&d| d == (dx, dy))
        .expect("offset is an 8-neighbour")
}

/// Closed boundary polygon of one 8-connected foreground region.
///
/// Points are pixel indices; consecutive points (including last to first)
/// are 8-neighbours and the signed shoelace area is positive, i.e. the
/// traversal is counter-clockwise in the `(x, y)` frame (clockwise as
/// displayed, since `y` points down).
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Contour {
    pub id: usize,
    points: Vec<Point>,
}

impl Contour {
    pub fn new(id: usize, mut points: Vec<Point>) -> Result<Self> {
        if points.len() < 3 {
            return Err(Error::InvalidParameter(format!(
                "contour needs at least 3 points, got {}",
                points.len()
            )));
        }
        let n = points.len();
        for i in 0..n {
            let (a, b) = (points[i], points[(i + 1) % n]);
            let (dx, dy) = ((a.0 - b.0).abs(), (a.1 - b.1).abs());
            if dx > 1 || dy > 1 || (dx == 0 && dy == 0) {
                return Err(Error::InvalidParameter(format!(
                    "contour points {i} and {} are not distinct 8-neighbours",
                    (i + 1) % n
                )));
            }
        }
        if signed_area(&points) < 0.0 {
            points[1..].reverse();
        }
        Ok(Self { id, points })
    }

    pub fn points(&self) -> &[Point] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// Point at a cyclic index.
    pub fn at(&self, i: isize) -> Point {
        let n = self.points.len() as isize;
        self.points[i.rem_euclid(n) as usize]
    }

    /// Inclusive bounding box `(min_x, min_y, max_x, max_y)`.
    pub fn bbox(&self) -> (i32, i32, i32, i32) {
        bbox(&self.points)
    }
}

fn bbox(points: &[Point]) -> (i32, i32, i32, i32) {
    points.iter().fold(
        (i32::MAX, i32::MAX, i32::MIN, i32::MIN),
        |(x0, y0, x1, y1), &(x, y)| (x0.min(x), y0.min(y), x1.max(x), y1.max(y)),
    )
}

/// Signed shoelace area of a closed polygon.
pub fn signed_area(points: &[Point]) -> f64 {
    let n = points.len();
    let mut twice = 0i64;
    for i in 0..n {
        let (a, b) = (points[i], points[(i + 1) % n]);
        twice += a.0 as i64 * b.1 as i64 - b.0 as i64 * a.1 as i64;
    }
    twice as f64 / 2.0
}

/// Absolute shoelace area of a closed polygon.
pub fn polygon_area(points: &[Point]) -> f64 {
    signed_area(points).abs()
}

pub fn contour_area(c: &Contour) -> f64 {
    polygon_area(&c.points)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Location {
    Inside,
    Outside,
}

fn on_segment(p: (f64, f64), a: (f64, f64), b: (f64, f64)) -> bool {
    let cross = (b.0 - a.0) * (p.1 - a.1) - (b.1 - a.1) * (p.0 - a.0);
    cross == 0.0
        && p.0 >= a.0.min(b.0)
        && p.0 <= a.0.max(b.0)
        && p.1 >= a.1.min(b.1)
        && p.1 <= a.1.max(b.1)
}

/// Even-odd ray casting; points on an edge count as inside.
pub fn point_in_polygon(points: &[Point], p: (f64, f64)) -> Location {
    let n = points.len();
    let mut inside = false;
    for i in 0..n {
        let a = (points[i].0 as f64, points[i].1 as f64);
        let b = (points[(i + 1) % n].0 as f64, points[(i + 1) % n].1 as f64);
        if on_segment(p, a, b) {
            return Location::Inside;
        }
        if (a.1 > p.1) != (b.1 > p.1) {
            let x = a.0 + (p.1 - a.1) * (b.0 - a.0) / (b.1 - a.1);
            if p.0 < x {
                inside = !inside;
            }
        }
    }
    if inside {
        Location::Inside
    } else {
        Location::Outside
    }
}

pub fn point_in_contour(c: &Contour, p: (f64, f64)) -> Location {
    point_in_polygon(&c.points, p)
}

/// Pixels whose index lies inside or on the contour polygon, as a mask of
/// the given size.
pub fn fill_contour(c: &Contour, bounds: (usize, usize)) -> BinaryMask {
    let (w, h) = bounds;
    let mut mask = BinaryMask::empty(w, h);
    let (x0, y0, x1, y1) = c.bbox();
    let pts = &c.points;
    let n = pts.len();
    let mut crossings = Vec::new();
    for y in y0.max(0)..=y1.min(h as i32 - 1) {
        crossings.clear();
        let yf = y as f64;
        for i in 0..n {
            let (a, b) = (pts[i], pts[(i + 1) % n]);
            if (a.1 > y) != (b.1 > y) {
                let x = a.0 as f64 + (yf - a.1 as f64) * (b.0 - a.0) as f64 / (b.1 - a.1) as f64;
                crossings.push(x);
            }
        }
        crossings.sort_by(f64::total_cmp);
        for x in x0.max(0)..=x1.min(w as i32 - 1) {
            let right = crossings.len() - crossings.partition_point(|&c| c <= x as f64);
            if right % 2 == 1 {
                mask.set(x as usize, y as usize, true);
            }
        }
    }
    for &(x, y) in pts {
        if x >= 0 && y >= 0 && (x as usize) < w && (y as usize) < h {
            mask.set(x as usize, y as usize, true);
        }
    }
    mask
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TraceParams {
    /// Minimum shoelace area of a kept contour, in px².
    pub min_area: f64,
    /// Components with a pixel closer than this to the image edge are
    /// dropped; 0 keeps everything.
    pub border_margin: usize,
}

impl Default for TraceParams {
    fn default() -> Self {
        Self {
            min_area: 300.0,
            border_margin: 1,
        }
    }
}

/// One contour per 8-connected foreground component, with the default
/// one-pixel border exclusion.
pub fn trace_contours(mask: &BinaryMask, min_area: f64) -> Vec<Contour> {
    trace_contours_with(
        mask,
        &TraceParams {
            min_area,
            ..TraceParams::default()
        },
    )
}

/// Contours ordered by their top-left-most pixel in raster order; ids are
/// assigned in that order.
pub fn trace_contours_with(mask: &BinaryMask, params: &TraceParams) -> Vec<Contour> {
    let (w, h) = mask.dimensions();
    let m = params.border_margin;
    let mut seen = vec![false; w * h];
    let mut queue = VecDeque::new();
    let mut contours = Vec::new();

    for y in 0..h {
        for x in 0..w {
            if !mask.get(x, y) || seen[y * w + x] {
                continue;
            }
            seen[y * w + x] = true;
            queue.push_back((x, y));
            let mut touches_border = false;
            while let Some((px, py)) = queue.pop_front() {
                if px < m || py < m || px + m >= w || py + m >= h {
                    touches_border = true;
                }
                for &(dx, dy) in &DIRS {
                    let (nx, ny) = (px as i64 + dx as i64, py as i64 + dy as i64);
                    if mask.get_signed(nx, ny) && !seen[ny as usize * w + nx as usize] {
                        seen[ny as usize * w + nx as usize] = true;
                        queue.push_back((nx as usize, ny as usize));
                    }
                }
            }
            if touches_border {
                continue;
            }
            let points = moore_trace(mask, (x as i32, y as i32));
            // lines and isolated pixels enclose no area and have no orientation
            let area = polygon_area(&points);
            if points.len() < 3 || area <= 0.0 || area < params.min_area {
                continue;
            }
            if let Ok(c) = Contour::new(contours.len(), points) {
                contours.push(c);
            }
        }
    }
    contours
}

/// Moore-neighbour boundary tracing from the top-left-most pixel of a
/// component. Tracing stops once the start pixel is re-entered in a state
/// that would repeat the first move.
fn moore_trace(mask: &BinaryMask, start: Point) -> Vec<Point> {
    let fg = |p: Point| mask.get_signed(p.0 as i64, p.1 as i64);
    let step = |p: Point, back: usize| -> Option<(Point, usize)> {
        for t in 1..=8 {
            let d = (back + t) % 8;
            let q = (p.0 + DIRS[d].0, p.1 + DIRS[d].1);
            if fg(q) {
                let prev = DIRS[(d + 7) % 8];
                let prev = (p.0 + prev.0, p.1 + prev.1);
                return Some((q, dir_index(prev.0 - q.0, prev.1 - q.1)));
            }
        }
        None
    };

    let mut points = vec![start];
    // west of the first raster pixel is background
    let Some(first) = step(start, 0) else {
        return points;
    };
    let (mut p, mut back) = first;
    let cap = 4 * (mask.width() * mask.height()) + 8;
    while points.len() < cap {
        if p == start {
            match step(p, back) {
                Some((q, _)) if q == first.0 => break,
                _ => {}
            }
        }
        points.push(p);
        match step(p, back) {
            Some(next) => (p, back) = next,
            None => break,
        }
    }
    points
}

/// Conic `a x² + b xy + c y² + d x + e y + f = 0` with unit-norm
/// coefficients and `a >= 0`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Conic {
    coeffs: [f64; 6],
}

impl Conic {
    pub fn new(coeffs: [f64; 6]) -> Result<Self> {
        let norm = coeffs.iter().map(|c| c * c).sum::<f64>().sqrt();
        if !norm.is_finite() || norm == 0.0 {
            return Err(Error::DegenerateConic);
        }
        let sign = if coeffs[0] < 0.0 { -1.0 } else { 1.0 };
        Ok(Self {
            coeffs: coeffs.map(|c| sign * c / norm),
        })
    }

    pub fn coeffs(&self) -> [f64; 6] {
        self.coeffs
    }

    /// `b² - 4ac`; negative for ellipses.
    pub fn discriminant(&self) -> f64 {
        let [a, b, c, ..] = self.coeffs;
        b * b - 4.0 * a * c
    }

    pub fn is_ellipse(&self) -> bool {
        self.discriminant() < 0.0
    }

    pub fn eval(&self, x: f64, y: f64) -> f64 {
        let [a, b, c, d, e, f] = self.coeffs;
        a * x * x + b * x * y + c * y * y + d * x + e * y + f
    }
}

/// Ellipse with semi-axes `a >= b > 0` and major-axis rotation `theta` in
/// `[0, π)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Ellipse {
    pub cx: f64,
    pub cy: f64,
    pub a: f64,
    pub b: f64,
    pub theta: f64,
}

fn wrap_angle(theta: f64) -> f64 {
    let t = theta.rem_euclid(PI);
    if t >= PI {
        0.0
    } else {
        t
    }
}

impl Ellipse {
    pub fn new(cx: f64, cy: f64, a: f64, b: f64, theta: f64) -> Result<Self> {
        let finite = [cx, cy, a, b, theta].iter().all(|v| v.is_finite());
        if !finite || b <= 0.0 || a < b {
            return Err(Error::InvalidParameter(format!(
                "ellipse needs finite a >= b > 0, got a = {a}, b = {b}"
            )));
        }
        Ok(Self {
            cx,
            cy,
            a,
            b,
            theta: wrap_angle(theta),
        })
    }

    /// Builds an ellipse from two semi-axes in either order; `theta` is the
    /// direction of `r1`.
    pub fn from_axes(cx: f64, cy: f64, r1: f64, r2: f64, theta: f64) -> Result<Self> {
        if r1 >= r2 {
            Self::new(cx, cy, r1, r2, theta)
        } else {
            Self::new(cx, cy, r2, r1, theta + PI / 2.0)
        }
    }

    pub fn circle(cx: f64, cy: f64, r: f64) -> Result<Self> {
        Self::new(cx, cy, r, r, 0.0)
    }

    pub fn area(&self) -> f64 {
        ellipse_area(self)
    }

    /// Normalized radial coordinate: `<= 1` inside.
    pub fn level(&self, x: f64, y: f64) -> f64 {
        let (s, c) = self.theta.sin_cos();
        let (dx, dy) = (x - self.cx, y - self.cy);
        let u = dx * c + dy * s;
        let v = -dx * s + dy * c;
        (u / self.a).powi(2) + (v / self.b).powi(2)
    }

    pub fn contains(&self, x: f64, y: f64) -> bool {
        self.level(x, y) <= 1.0
    }

    /// Boundary point at parameter `t`.
    pub fn point_at(&self, t: f64) -> (f64, f64) {
        let (s, c) = self.theta.sin_cos();
        let (u, v) = (self.a * t.cos(), self.b * t.sin());
        (self.cx + u * c - v * s, self.cy + u * s + v * c)
    }

    /// Half extents of the axis-aligned bounding box.
    pub fn half_extents(&self) -> (f64, f64) {
        let (s, c) = self.theta.sin_cos();
        (
            ((self.a * c).powi(2) + (self.b * s).powi(2)).sqrt(),
            ((self.a * s).powi(2) + (self.b * c).powi(2)).sqrt(),
        )
    }

    /// Interior x-interval on the horizontal line at height `y`.
    pub fn row_interval(&self, y: f64) -> Option<(f64, f64)> {
        let (s, c) = self.theta.sin_cos();
        let (ia, ib) = (1.0 / (self.a * self.a), 1.0 / (self.b * self.b));
        let dy = y - self.cy;
        let p = c * c * ia + s * s * ib;
        let q = 2.0 * dy * c * s * (ia - ib);
        let r = dy * dy * (s * s * ia + c * c * ib) - 1.0;
        let disc = q * q - 4.0 * p * r;
        if disc < 0.0 {
            return None;
        }
        let root = disc.sqrt();
        Some((
            self.cx + (-q - root) / (2.0 * p),
            self.cx + (-q + root) / (2.0 * p),
        ))
    }
}

pub fn ellipse_area(e: &Ellipse) -> f64 {
    PI * e.a * e.b
}

pub fn ellipse_to_conic(e: &Ellipse) -> Conic {
    let (s, c) = e.theta.sin_cos();
    let (ia, ib) = (1.0 / (e.a * e.a), 1.0 / (e.b * e.b));
    let qa = c * c * ia + s * s * ib;
    let qb = 2.0 * c * s * (ia - ib);
    let qc = s * s * ia + c * c * ib;
    let qd = -2.0 * qa * e.cx - qb * e.cy;
    let qe = -qb * e.cx - 2.0 * qc * e.cy;
    let qf = qa * e.cx * e.cx + qb * e.cx * e.cy + qc * e.cy * e.cy - 1.0;
    Conic::new([qa, qb, qc, qd, qe, qf]).expect("ellipse coefficients are finite and nonzero")
}

/// Geometric parameters of an ellipse conic.
pub fn conic_to_ellipse(q: &Conic) -> Result<Ellipse> {
    let [a, b, c, d, e, f] = q.coeffs;
    let den = b * b - 4.0 * a * c;
    if den >= 0.0 {
        return Err(Error::NotAnEllipse);
    }
    let cx = (2.0 * c * d - b * e) / den;
    let cy = (2.0 * a * e - b * d) / den;
    let mut f0 = f + (d * cx + e * cy) / 2.0;
    let (mut a, mut b, mut c) = (a, b, c);
    if a + c < 0.0 {
        (a, b, c, f0) = (-a, -b, -c, -f0);
    }
    let mean = (a + c) / 2.0;
    let rad = ((a - c) / 2.0).hypot(b / 2.0);
    let (small, big) = (mean - rad, mean + rad);
    if small <= 0.0 {
        return Err(Error::NotAnEllipse);
    }
    if !(f0 < 0.0) {
        return Err(Error::DegenerateConic);
    }
    let major = (-f0 / small).sqrt();
    let minor = (-f0 / big).sqrt();
    let theta = if rad <= 1e-14 * mean {
        0.0
    } else {
        0.5 * b.atan2(a - c) + PI / 2.0
    };
    Ellipse::new(cx, cy, major, minor.min(major), theta).map_err(|_| Error::DegenerateConic)
}

/// Inclusive run of pixels `x0..=x1` on row `y`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Span {
    pub y: usize,
    pub x0: usize,
    pub x1: usize,
}

impl Span {
    pub fn pixel_count(&self) -> usize {
        self.x1 - self.x0 + 1
    }
}

/// Row spans of the pixels whose centres lie inside the ellipse, clipped
/// to `bounds`.
pub fn ellipse_spans(e: &Ellipse, bounds: (usize, usize)) -> Vec<Span> {
    let (w, h) = bounds;
    let mut spans = Vec::new();
    if w == 0 || h == 0 {
        return spans;
    }
    let (_, hy) = e.half_extents();
    let j0 = (e.cy - hy - 1.5).floor().max(0.0);
    let j1 = (e.cy + hy + 0.5).ceil().min(h as f64 - 1.0);
    if !(j0 <= j1) {
        return spans;
    }
    for j in j0 as usize..=j1 as usize {
        let yc = j as f64 + 0.5;
        let Some((xa, xb)) = e.row_interval(yc) else {
            continue;
        };
        let inside = |i: i64| e.contains(i as f64 + 0.5, yc);
        let mut lo = (xa - 0.5).ceil() as i64;
        let mut hi = (xb - 0.5).floor() as i64;
        // settle rounding at both ends against the direct test
        while lo <= hi && !inside(lo) {
            lo += 1;
        }
        while lo <= hi && !inside(hi) {
            hi -= 1;
        }
        if lo > hi {
            continue;
        }
        while inside(lo - 1) {
            lo -= 1;
        }
        while inside(hi + 1) {
            hi += 1;
        }
        let lo = lo.max(0);
        let hi = hi.min(w as i64 - 1);
        if lo <= hi {
            spans.push(Span {
                y: j,
                x0: lo as usize,
                x1: hi as usize,
            });
        }
    }
    spans
}

/// Pixel `(i, j)` is set iff `(i + 0.5, j + 0.5)` lies inside or on the
/// ellipse.
pub fn rasterize_ellipse(e: &Ellipse, bounds: (usize, usize)) -> BinaryMask {
    let mut mask = BinaryMask::empty(bounds.0, bounds.1);
    for s in ellipse_spans(e, bounds) {
        for x in s.x0..=s.x1 {
            mask.set(x, s.y, true);
        }
    }
    mask
}

/// Rasterized pixels of the ellipse with a 4-neighbour outside it.
pub fn ellipse_outline(e: &Ellipse, bounds: (usize, usize)) -> Vec<(usize, usize)> {
    let spans = ellipse_spans(e, bounds);
    let row = |y: i64| spans.iter().find(|s| s.y as i64 == y);
    let covered = |x: usize, y: i64| row(y).is_some_and(|s| s.x0 <= x && x <= s.x1);
    let mut out = Vec::new();
    for s in &spans {
        for x in s.x0..=s.x1 {
            let edge = x == s.x0
                || x == s.x1
                || !covered(x, s.y as i64 - 1)
                || !covered(x, s.y as i64 + 1);
            if edge {
                out.push((x, s.y));
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn square_mask(w: usize, h: usize, x0: usize, y0: usize, side: usize) -> BinaryMask {
        BinaryMask::from_fn(w, h, |x, y| {
            (x0..x0 + side).contains(&x) && (y0..y0 + side).contains(&y)
        })
    }

    #[test]
    fn empty_mask_has_no_contours() {
        assert!(trace_contours(&BinaryMask::empty(10, 10), 0.0).is_empty());
    }

    #[test]
    fn square_boundary() {
        let m = square_mask(20, 20, 5, 5, 10);
        let cs = trace_contours(&m, 50.0);
        assert_eq!(cs.len(), 1);
        assert_eq!(cs[0].len(), 36);
        assert_relative_eq!(contour_area(&cs[0]), 81.0);
        assert!(signed_area(cs[0].points()) > 0.0);
        assert_eq!(cs[0].points()[0], (5, 5));
    }

    #[test]
    fn size_filter_and_border_exclusion() {
        let m = BinaryMask::from_fn(80, 40, |x, y| {
            let d1 = (x as i64 - 20).pow(2) + (y as i64 - 20).pow(2);
            let d2 = (x as i64 - 60).pow(2) + (y as i64 - 20).pow(2);
            d1 <= 144 || d2 <= 9
        });
        assert_eq!(trace_contours(&m, 100.0).len(), 1);
        assert_eq!(trace_contours(&m, 0.0).len(), 2);

        let touching = square_mask(20, 20, 0, 5, 8);
        assert!(trace_contours(&touching, 0.0).is_empty());
        let kept = trace_contours_with(
            &touching,
            &TraceParams {
                min_area: 0.0,
                border_margin: 0,
            },
        );
        assert_eq!(kept.len(), 1);
    }

    #[test]
    fn contour_validation() {
        assert!(Contour::new(0, vec![(0, 0), (1, 0)]).is_err());
        assert!(Contour::new(0, vec![(0, 0), (3, 0), (1, 1)]).is_err());
        let c = Contour::new(0, vec![(0, 0), (0, 1), (1, 1), (1, 0)]).unwrap();
        assert!(signed_area(c.points()) > 0.0);
        assert_eq!(c.points()[0], (0, 0));
    }

    #[test]
    fn areas() {
        let sq = [(0, 0), (1, 0), (1, 1), (0, 1)];
        assert_eq!(polygon_area(&sq), 1.0);
        let mut rev = sq;
        rev.reverse();
        assert_eq!(polygon_area(&rev), 1.0);
    }

    #[test]
    fn point_location() {
        let c = Contour::new(
            0,
            vec![
                (2, 2),
                (3, 2),
                (4, 2),
                (4, 3),
                (4, 4),
                (3, 4),
                (2, 4),
                (2, 3),
            ],
        )
        .unwrap();
        assert_eq!(point_in_contour(&c, (3.0, 3.0)), Location::Inside);
        assert_eq!(point_in_contour(&c, (-1.0, -1.0)), Location::Outside);
        assert_eq!(point_in_contour(&c, (4.0, 3.5)), Location::Inside);
        assert_eq!(point_in_contour(&c, (4.5, 3.0)), Location::Outside);
    }

    #[test]
    fn circle_and_axis_aligned_conics() {
        let q = Conic::new([1.0, 0.0, 1.0, 0.0, 0.0, -1.0]).unwrap();
        let e = conic_to_ellipse(&q).unwrap();
        assert_relative_eq!(e.cx, 0.0, epsilon = 1e-12);
        assert_relative_eq!(e.a, 1.0, epsilon = 1e-12);
        assert_relative_eq!(e.b, 1.0, epsilon = 1e-12);

        let q = Conic::new([0.25, 0.0, 1.0, 0.0, 0.0, -1.0]).unwrap();
        let e = conic_to_ellipse(&q).unwrap();
        assert_relative_eq!(e.a, 2.0, epsilon = 1e-12);
        assert_relative_eq!(e.b, 1.0, epsilon = 1e-12);
        assert_relative_eq!(e.theta, 0.0, epsilon = 1e-12);
    }

    #[test]
    fn conic_errors() {
        let hyperbola = Conic::new([1.0, 0.0, -1.0, 0.0, 0.0, -1.0]).unwrap();
        assert!(matches!(
            conic_to_ellipse(&hyperbola),
            Err(Error::NotAnEllipse)
        ));
        let imaginary = Conic::new([1.0, 0.0, 1.0, 0.0, 0.0, 1.0]).unwrap();
        assert!(matches!(
            conic_to_ellipse(&imaginary),
            Err(Error::DegenerateConic)
        ));
        let point = Conic::new([1.0, 0.0, 1.0, 0.0, 0.0, 0.0]).unwrap();
        assert!(matches!(
            conic_to_ellipse(&point),
            Err(Error::DegenerateConic)
        ));
        assert!(Conic::new([0.0; 6]).is_err());
    }

    #[test]
    fn rasterized_circle_area_and_outside() {
        let e = Ellipse::circle(50.0, 40.0, 10.0).unwrap();
        let n = rasterize_ellipse(&e, (100, 80)).count() as f64;
        assert!((n - PI * 100.0).abs() / (PI * 100.0) < 0.03);
        let far = Ellipse::circle(-50.0, -50.0, 10.0).unwrap();
        assert_eq!(rasterize_ellipse(&far, (100, 80)).count(), 0);
        assert_relative_eq!(
            ellipse_area(&Ellipse::new(0.0, 0.0, 2.0, 1.0, 0.0).unwrap()),
            2.0 * PI
        );
        assert_relative_eq!(ellipse_area(&Ellipse::circle(0.0, 0.0, 1.0).unwrap()), PI);
    }

    #[test]
    fn outline_is_subset_of_raster() {
        let e = Ellipse::new(30.0, 30.0, 12.0, 7.0, 0.6).unwrap();
        let raster = rasterize_ellipse(&e, (60, 60));
        let outline = ellipse_outline(&e, (60, 60));
        assert!(!outline.is_empty());
        assert!(outline.iter().all(|&(x, y)| raster.get(x, y)));
        assert!(!outline.contains(&(30, 30)));
    }
}
