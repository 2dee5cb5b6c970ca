//! Direct least-squares ellipse fitting on exact and noisy boundary samples.

use anyhow::Result;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use smearseg::geometry::{conic_to_ellipse, Ellipse};
use smearseg::separate::fit_ellipse_direct;

fn show(label: &str, e: &Ellipse) {
    println!(
        "{label:>8}: centre ({:.4}, {:.4})  a {:.4}  b {:.4}  theta {:.2} deg",
        e.cx,
        e.cy,
        e.a,
        e.b,
        e.theta.to_degrees()
    );
}

fn main() -> Result<()> {
    let truth = Ellipse::new(320.0, 240.0, 28.0, 19.0, 35f64.to_radians())?;
    show("truth", &truth);

    let n = 24;
    let exact: Vec<(f64, f64)> = (0..n)
        .map(|i| truth.point_at(i as f64 * std::f64::consts::TAU / n as f64))
        .collect();
    let conic = fit_ellipse_direct(&exact, 5)?;
    println!("   conic: {:?}", conic.coeffs());
    show("exact", &conic_to_ellipse(&conic)?);

    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let noisy: Vec<(f64, f64)> = exact
        .iter()
        .map(|&(x, y)| {
            (
                x + rng.random_range(-0.5..=0.5),
                y + rng.random_range(-0.5..=0.5),
            )
        })
        .collect();
    show("noisy", &conic_to_ellipse(&fit_ellipse_direct(&noisy, 5)?)?);

    // a quarter arc still yields an ellipse, though a less certain one
    let arc: Vec<(f64, f64)> = (0..12)
        .map(|i| truth.point_at(i as f64 * std::f64::consts::FRAC_PI_2 / 11.0))
        .collect();
    show("arc", &conic_to_ellipse(&fit_ellipse_direct(&arc, 5)?)?);

    let line: Vec<(f64, f64)> = (0..8).map(|i| (i as f64, 2.0 * i as f64)).collect();
    println!("collinear: {}", fit_ellipse_direct(&line, 5).unwrap_err());
    Ok(())
}
