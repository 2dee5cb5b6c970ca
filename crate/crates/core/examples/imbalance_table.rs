//! Class weights, imbalance ratio, upsampling plan and focal loss for the
//! twelve-class red blood cell dataset.

use anyhow::Result;
use smearseg::imbalance::{
    class_weights, focal_loss, imbalance_ratio, reference_distribution, upsample_plan, WeightScheme,
};

fn main() -> Result<()> {
    let dist = reference_distribution();
    println!("{} classes, {} samples", dist.len(), dist.total());
    println!("imbalance ratio: {:.3}\n", imbalance_ratio(&dist)?);

    let schemes = [
        WeightScheme::Inverse,
        WeightScheme::InverseSqrt,
        WeightScheme::InverseCbrt,
    ];
    let weights: Vec<_> = schemes
        .iter()
        .map(|&s| class_weights(&dist, s))
        .collect::<Result<_, _>>()?;
    let plan = upsample_plan(&dist, "Normal")?;

    println!(
        "{:<14}{:>7}{:>12}{:>10}{:>10}{:>8}{:>8}",
        "class", "count", "1/f", "1/sqrt", "1/cbrt", "copies", "extra"
    );
    for (name, count) in dist.classes() {
        let rep = plan.classes[name];
        println!(
            "{name:<14}{count:>7}{:>12.3e}{:>10.4}{:>10.4}{:>8}{:>8}",
            weights[0][name], weights[1][name], weights[2][name], rep.copies, rep.remainder
        );
    }

    println!("\nfocal loss at p = 0.5:");
    for gamma in [0.0, 0.5, 1.0, 2.0, 3.0] {
        println!("  gamma {gamma:.1}: {:.7}", focal_loss(0.5, gamma)?);
    }
    Ok(())
}
