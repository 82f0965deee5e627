//! `cgsp estimate`: ensemble correlation curves, coherence, and exponent fits
//! from generated data files.

use std::path::PathBuf;

use clap::Args;

use crate::cli::{resolve_out_dir, tool_header, CommonArgs, EXIT_OK};
use crate::error::{Error, Result};
use crate::estimate::{
    default_fit_range, fit_power_law_exponent, CorrelationEstimate, Curve, RadialAccumulator,
    SequenceAccumulator, SpectralEstimate,
};
use crate::grid::FrequencyGrid;
use crate::io::{read_dataset, write_curve_csv, KeyValues};

#[derive(Args, Debug)]
pub struct EstimateArgs {
    /// A data.cgsp file or a directory containing one.
    #[arg(long)]
    input: Option<PathBuf>,
    /// Smallest lag of the exponent fit window (default from the grid).
    #[arg(long)]
    fit_min: Option<usize>,
    /// Largest lag of the exponent fit window (default from the grid).
    #[arg(long)]
    fit_max: Option<usize>,
    /// Skip the power-law exponent fits.
    #[arg(long)]
    no_fit: bool,
    #[command(flatten)]
    common: CommonArgs,
}

pub fn run(args: EstimateArgs) -> Result<i32> {
    let config = match &args.common.config {
        Some(path) => KeyValues::load(path)?,
        None => KeyValues::default(),
    };
    let input = args
        .input
        .clone()
        .or_else(|| config.get("input").map(PathBuf::from))
        .ok_or_else(|| Error::InvalidParameter("--input is required".into()))?;
    let data_path = if input.is_dir() {
        input.join("data.cgsp")
    } else {
        input.clone()
    };
    let data = read_dataset(&data_path)?;
    let side = data.shape[0] as usize;
    if data.shape.iter().any(|&s| s as usize != side) {
        return Err(Error::Format {
            what: format!("{}", data_path.display()),
            detail: "non-square grids are not supported".into(),
        });
    }
    let grid = FrequencyGrid::new(side, data.dim as usize)?;
    let out_dir = if args.common.out.is_none() && config.get("out").is_none() {
        data_path
            .parent()
            .map(PathBuf::from)
            .unwrap_or_else(|| PathBuf::from("."))
    } else {
        resolve_out_dir(&args.common, &config)
    };
    std::fs::create_dir_all(&out_dir)?;

    if data.pairs.len() == 1 {
        eprintln!(
            "warning: single realization; standard errors are zero and \
             estimates carry full sample noise"
        );
    }

    let mut spectral = SpectralEstimate::new(&grid);
    let estimate: CorrelationEstimate = if grid.dim() == 1 {
        let mut acc = SequenceAccumulator::new(&grid)?;
        for (x, y) in &data.pairs {
            acc.push(x, y)?;
            spectral.push(x, y)?;
        }
        acc.finish()?
    } else {
        let mut acc = RadialAccumulator::new(&grid)?;
        for (x, y) in &data.pairs {
            acc.push(x, y)?;
            spectral.push(x, y)?;
        }
        acc.finish()?
    };

    write_curve_csv(
        &out_dir.join("cxx.csv"),
        &estimate.radii,
        &estimate.cxx,
        &estimate.se_xx,
    )?;
    write_curve_csv(
        &out_dir.join("cyy.csv"),
        &estimate.radii,
        &estimate.cyy,
        &estimate.se_yy,
    )?;
    write_curve_csv(
        &out_dir.join("cxy.csv"),
        &estimate.radii,
        &estimate.cxy,
        &estimate.se_xy,
    )?;
    if grid.dim() == 1 {
        match spectral.coherence_profile() {
            Ok(profile) => {
                let bins: Vec<f64> = (0..profile.len()).map(|i| i as f64).collect();
                let zeros = vec![0.0; profile.len()];
                write_curve_csv(&out_dir.join("coherence.csv"), &bins, &profile, &zeros)?;
            }
            Err(err) => eprintln!("warning: coherence profile skipped: {err}"),
        }
    }

    let mut report = vec![format!(
        "ensemble of {} realization(s), {} points, d={}",
        estimate.n_realizations,
        grid.len(),
        grid.dim()
    )];

    if !args.no_fit {
        let default = default_fit_range(&grid);
        let range = (
            args.fit_min.unwrap_or(default.0),
            args.fit_max.unwrap_or(default.1),
        );
        let mut fit_lines = vec!["which,exponent,stderr,fit_min,fit_max,rms_residual".to_string()];
        for which in [Curve::Xx, Curve::Yy, Curve::Xy] {
            match fit_power_law_exponent(&estimate, which, range) {
                Ok(fit) => {
                    report.push(format!(
                        "gamma_{which} = {:.4} +/- {:.4} (lags {}..{}, rms residual {:.3e})",
                        fit.exponent,
                        fit.uncertainty,
                        fit.fit_range.0,
                        fit.fit_range.1,
                        fit.goodness
                    ));
                    fit_lines.push(format!(
                        "{which},{},{},{},{},{}",
                        fit.exponent,
                        fit.uncertainty,
                        fit.fit_range.0,
                        fit.fit_range.1,
                        fit.goodness
                    ));
                }
                // a structurally invalid window is a usage problem; data that
                // cannot support a fit is only reported
                Err(err @ Error::FitRange { .. }) => return Err(err),
                Err(err) => {
                    report.push(format!("gamma_{which}: fit refused: {err}"));
                }
            }
        }
        if fit_lines.len() > 1 {
            std::fs::write(out_dir.join("fits.csv"), fit_lines.join("\n") + "\n")?;
        }
    }

    let text = report.join("\n") + "\n";
    std::fs::write(out_dir.join("report.txt"), &text)?;
    print!("{text}");

    let mut manifest = KeyValues::default();
    manifest.set("input", data_path.display());
    manifest.set("out", out_dir.display());
    manifest.save(&out_dir.join("estimate-manifest.cgsp"), &tool_header())?;
    Ok(EXIT_OK)
}
