//! `cgsp validate`: feasibility report for a target triple.

use clap::Args;

use crate::cli::target::TargetArgs;
use crate::cli::{CommonArgs, EXIT_INFEASIBLE, EXIT_OK};
use crate::error::Result;
use crate::io::KeyValues;
use crate::spectrum::SpectralTriple;

#[derive(Args, Debug)]
pub struct ValidateArgs {
    #[command(flatten)]
    target: TargetArgs,
    #[command(flatten)]
    common: CommonArgs,
}

pub fn run(args: ValidateArgs) -> Result<i32> {
    let config = match &args.common.config {
        Some(path) => KeyValues::load(path)?,
        None => KeyValues::default(),
    };
    // validate judges the stated target as-is: no automatic rescue of an
    // infeasible cross amplitude
    let mut target = args.target.clone();
    if target.cross_scale_is_unset(&config) {
        target.force_unit_cross_scale();
    }
    let resolved = target.resolve(&config)?;
    let triple = SpectralTriple::from_models(&resolved.targets, &resolved.grid, resolved.path)?;
    let report = triple.feasibility();

    println!(
        "target on {} bins (d={}): max coherence {:.6}",
        resolved.grid.len(),
        resolved.grid.dim(),
        report.max_coherence
    );
    if triple.clip.clipped > 0 {
        println!(
            "clipped {} slightly negative autospectrum bin(s), worst magnitude {:.3e}",
            triple.clip.clipped, triple.clip.max_magnitude
        );
    }
    let bound = triple.max_cross_scale();
    if bound.is_finite() {
        println!("largest feasible cross amplitude multiplier: {bound:.6}");
    }
    if report.feasible {
        println!("feasible: max coherence <= 1");
        Ok(EXIT_OK)
    } else {
        println!(
            "INFEASIBLE at {} bin(s); first violations:",
            report.violations.len()
        );
        for v in report.violations.iter().take(10) {
            println!("  bin {}: coherence {:.6}", v.bin, v.coherence);
        }
        Ok(EXIT_INFEASIBLE)
    }
}
