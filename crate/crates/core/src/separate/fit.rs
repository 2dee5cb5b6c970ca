//! Ellipse-specific direct least-squares conic fitting.
//!
//! Minimizes `Σ (a x² + b xy + c y² + d x + e y + f)²` subject to
//! `4ac - b² = 1`. The 6×6 scatter matrix is split into quadratic and
//! linear blocks; the linear part is eliminated, leaving a 3×3 eigenproblem
//! whose unique eigenvector with a positive constraint value is the
//! solution. Points are centred and scaled before building the scatter
//! matrix and the result is mapped back afterwards.

use nalgebra::{Matrix3, Matrix6, Vector3, Vector6};

use crate::error::{Error, Result};
use crate::geometry::Conic;

fn null_vector(m: &Matrix3<f64>) -> Vector3<f64> {
    let svd = m.svd(false, true);
    let v_t = svd.v_t.expect("requested V^T");
    let idx = svd.singular_values.imin();
    v_t.row(idx).transpose()
}

/// Centroid and the scale that brings the mean distance to the centroid to √2.
fn preconditioning(points: &[(f64, f64)]) -> Option<(f64, f64, f64)> {
    let n = points.len() as f64;
    let mx = points.iter().map(|p| p.0).sum::<f64>() / n;
    let my = points.iter().map(|p| p.1).sum::<f64>() / n;
    let mean_dist = points
        .iter()
        .map(|p| (p.0 - mx).hypot(p.1 - my))
        .sum::<f64>()
        / n;
    (mean_dist.is_finite() && mean_dist > 0.0)
        .then(|| (mx, my, std::f64::consts::SQRT_2 / mean_dist))
}

/// Maps a conic fitted in coordinates `x' = s (x - mx)`, `y' = s (y - my)`
/// back to the original frame.
fn denormalize(c: &Vector6<f64>, mx: f64, my: f64, s: f64) -> [f64; 6] {
    let [a, b, cc, d, e, f] = [c[0], c[1], c[2], c[3], c[4], c[5]];
    let s2 = s * s;
    [
        a * s2,
        b * s2,
        cc * s2,
        -2.0 * a * s2 * mx - b * s2 * my + d * s,
        -b * s2 * mx - 2.0 * cc * s2 * my + e * s,
        a * s2 * mx * mx + b * s2 * mx * my + cc * s2 * my * my - d * s * mx - e * s * my + f,
    ]
}

/// Fits an ellipse conic to `points`.
///
/// Fails with [`Error::InsufficientPoints`] below `max(min_fit_points, 5)`
/// points and with [`Error::DegenerateConfiguration`] when the points are
/// collinear or no ellipse solution exists.
pub fn fit_ellipse_direct(points: &[(f64, f64)], min_fit_points: usize) -> Result<Conic> {
    let need = min_fit_points.max(5);
    if points.len() < need {
        return Err(Error::InsufficientPoints {
            got: points.len(),
            need,
        });
    }
    let (mx, my, s) = preconditioning(points).ok_or(Error::DegenerateConfiguration)?;

    let mut scatter = Matrix6::<f64>::zeros();
    for &(px, py) in points {
        let (x, y) = ((px - mx) * s, (py - my) * s);
        let z = Vector6::new(x * x, x * y, y * y, x, y, 1.0);
        scatter += z * z.transpose();
    }
    let s1: Matrix3<f64> = scatter.fixed_view::<3, 3>(0, 0).into_owned();
    let s2: Matrix3<f64> = scatter.fixed_view::<3, 3>(0, 3).into_owned();
    let s3: Matrix3<f64> = scatter.fixed_view::<3, 3>(3, 3).into_owned();

    // collinear points make the linear block singular
    let sv = s3.singular_values();
    if !(sv.min() > 1e-12 * sv.max()) {
        return Err(Error::DegenerateConfiguration);
    }
    let s3_inv = s3.try_inverse().ok_or(Error::DegenerateConfiguration)?;
    let elim = -s3_inv * s2.transpose();
    let reduced = s1 + s2 * elim;

    // inverse of the constraint matrix [[0, 0, 2], [0, -1, 0], [2, 0, 0]]
    let system = Matrix3::from_rows(&[reduced.row(2) / 2.0, -reduced.row(1), reduced.row(0) / 2.0]);

    let mut best: Option<(f64, Vector3<f64>)> = None;
    for lambda in system.complex_eigenvalues().iter() {
        if lambda.im.abs() > 1e-9 * (1.0 + lambda.re.abs()) {
            continue;
        }
        let v = null_vector(&(system - Matrix3::identity() * lambda.re));
        let constraint = 4.0 * v[0] * v[2] - v[1] * v[1];
        if !(constraint > 0.0) {
            continue;
        }
        let cost = (v.transpose() * reduced * v)[0] / constraint;
        if best.as_ref().is_none_or(|(c, _)| cost < *c) {
            best = Some((cost, v));
        }
    }
    let (_, quad) = best.ok_or(Error::DegenerateConfiguration)?;
    let lin = elim * quad;
    let local = Vector6::new(quad[0], quad[1], quad[2], lin[0], lin[1], lin[2]);

    let conic =
        Conic::new(denormalize(&local, mx, my, s)).map_err(|_| Error::DegenerateConfiguration)?;
    if !conic.is_ellipse() {
        return Err(Error::DegenerateConfiguration);
    }
    Ok(conic)
}
