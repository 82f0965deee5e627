//! Target construction shared by generate/validate/reproduce: flags,
//! config-file merging, and the feasibility-driven cross-amplitude scaling.

use std::path::PathBuf;

use clap::Args;

use crate::error::{Error, Result};
use crate::grid::FrequencyGrid;
use crate::io::{read_table, KeyValues};
use crate::model::{CorrelationFamily, CorrelationModel, TargetModels};
use crate::spectrum::{SpectralPath, SpectralTriple};

/// Safety margin applied when the cross amplitude is auto-scaled to the
/// feasibility bound.
pub const AUTO_SCALE_MARGIN: f64 = 0.999;

#[derive(Args, Debug, Default, Clone)]
pub struct TargetArgs {
    /// Number of points per axis; must be a power of two.
    #[arg(long)]
    length: Option<usize>,
    /// Grid dimension: 1 for sequences, 2 for fields.
    #[arg(long)]
    dim: Option<usize>,
    /// Autocorrelation family for both processes: white | power-law | gaussian
    /// | exponential | damped-harmonic | tabulated.
    #[arg(long)]
    family: Option<String>,
    /// Power-law exponent of C_xx (family power-law).
    #[arg(long)]
    gxx: Option<f64>,
    /// Power-law exponent of C_yy (family power-law).
    #[arg(long)]
    gyy: Option<f64>,
    /// Power-law exponent of C_xy (family power-law).
    #[arg(long)]
    gxy: Option<f64>,
    /// Width of gaussian autocorrelations (family gaussian).
    #[arg(long)]
    width: Option<f64>,
    /// Decay rate of exponential / damped-harmonic autocorrelations.
    #[arg(long)]
    decay: Option<f64>,
    /// Angular frequency of damped-harmonic autocorrelations.
    #[arg(long)]
    freq: Option<f64>,
    /// Cross-correlation family for white autocorrelations: gaussian |
    /// exponential | damped-harmonic | tabulated.
    #[arg(long)]
    coupling: Option<String>,
    /// Width of a gaussian coupling.
    #[arg(long)]
    coupling_width: Option<f64>,
    /// Decay rate of an exponential or damped-harmonic coupling.
    #[arg(long)]
    coupling_decay: Option<f64>,
    /// Angular frequency of a damped-harmonic coupling.
    #[arg(long)]
    coupling_freq: Option<f64>,
    /// Cross amplitude: a number (negative for anti-correlation), or `auto`
    /// to sit just inside the feasibility bound (the applied value is echoed
    /// in the manifest).
    #[arg(long, allow_hyphen_values = true)]
    cross_scale: Option<String>,
    /// Tabulated autocorrelation of x: one value per line.
    #[arg(long)]
    table_xx: Option<PathBuf>,
    /// Tabulated autocorrelation of y.
    #[arg(long)]
    table_yy: Option<PathBuf>,
    /// Tabulated cross-correlation.
    #[arg(long)]
    table_xy: Option<PathBuf>,
    /// Spectral route: fft (any family) or analytic (power-law closed form).
    #[arg(long)]
    path: Option<String>,
}

/// A fully resolved target: grid, models (cross already scaled), path, and
/// the echo of every setting for the manifest.
pub struct ResolvedTarget {
    pub grid: FrequencyGrid,
    pub targets: TargetModels,
    pub path: SpectralPath,
    /// Cross amplitude multiplier that was applied (1.0 when none).
    pub applied_cross_scale: f64,
    pub echo: KeyValues,
}

impl TargetArgs {
    /// True when neither the flags nor the config set a cross scale.
    pub fn cross_scale_is_unset(&self, config: &KeyValues) -> bool {
        self.cross_scale.is_none() && config.get("cross-scale").is_none()
    }

    /// Pin the cross amplitude to the models' stated value.
    pub fn force_unit_cross_scale(&mut self) {
        self.cross_scale = Some("1.0".into());
    }

    /// Merge flags over config entries and build the target. When
    /// `cross_scale` resolves to `auto`, the cross amplitude is scaled to
    /// `AUTO_SCALE_MARGIN` of the feasibility bound (never above 1).
    pub fn resolve(&self, config: &KeyValues) -> Result<ResolvedTarget> {
        let mut echo = KeyValues::default();
        let length = self
            .length
            .or_else(|| parse_key(config, "length"))
            .ok_or_else(|| Error::InvalidParameter("--length is required".into()))?;
        let dim = self.dim.or_else(|| parse_key(config, "dim")).unwrap_or(1);
        let grid = FrequencyGrid::new(length, dim)?;
        echo.set("length", length);
        echo.set("dim", dim);

        let path = match self
            .path
            .clone()
            .or_else(|| config.get("path").map(String::from))
            .unwrap_or_else(|| "fft".into())
            .as_str()
        {
            "fft" => SpectralPath::Fft,
            "analytic" => SpectralPath::Analytic,
            other => {
                return Err(Error::InvalidParameter(format!(
                    "unknown spectral path `{other}` (expected fft | analytic)"
                )))
            }
        };
        echo.set(
            "path",
            if path == SpectralPath::Fft {
                "fft"
            } else {
                "analytic"
            },
        );

        let family = self
            .family
            .clone()
            .or_else(|| config.get("family").map(String::from))
            .unwrap_or_else(|| "white".into());
        let coupling = self
            .coupling
            .clone()
            .or_else(|| config.get("coupling").map(String::from));
        echo.set("family", &family);
        if let Some(c) = &coupling {
            echo.set("coupling", c);
        }

        let (xx, yy, xy_unit) =
            self.build_models(&family, coupling.as_deref(), config, &mut echo)?;
        let targets = TargetModels::new(xx, yy, xy_unit)?;

        let cross_scale = self
            .cross_scale
            .clone()
            .or_else(|| config.get("cross-scale").map(String::from))
            .unwrap_or_else(|| "auto".into());
        let applied = match cross_scale.as_str() {
            "auto" => {
                let triple = SpectralTriple::from_models(&targets, &grid, path)?;
                let bound = triple.max_cross_scale();
                if bound.is_finite() {
                    (AUTO_SCALE_MARGIN * bound).min(1.0)
                } else {
                    1.0
                }
            }
            text => text.parse::<f64>().map_err(|_| {
                Error::InvalidParameter(format!(
                    "--cross-scale takes a number or `auto`, got `{text}`"
                ))
            })?,
        };
        echo.set("cross-scale", applied);
        let targets = targets.scale_cross(applied);
        Ok(ResolvedTarget {
            grid,
            targets,
            path,
            applied_cross_scale: applied,
            echo,
        })
    }

    fn build_models(
        &self,
        family: &str,
        coupling: Option<&str>,
        config: &KeyValues,
        echo: &mut KeyValues,
    ) -> Result<(CorrelationModel, CorrelationModel, CorrelationModel)> {
        let get_f64 = |flag: Option<f64>, key: &str| flag.or_else(|| parse_key(config, key));
        match family {
            "power-law" => {
                let gxx = get_f64(self.gxx, "gxx")
                    .ok_or_else(|| Error::InvalidParameter("--gxx is required".into()))?;
                let gyy = get_f64(self.gyy, "gyy")
                    .ok_or_else(|| Error::InvalidParameter("--gyy is required".into()))?;
                let gxy = get_f64(self.gxy, "gxy")
                    .ok_or_else(|| Error::InvalidParameter("--gxy is required".into()))?;
                echo.set("gxx", gxx);
                echo.set("gyy", gyy);
                echo.set("gxy", gxy);
                Ok((
                    CorrelationModel::power_law(gxx, 1.0)?,
                    CorrelationModel::power_law(gyy, 1.0)?,
                    CorrelationModel::power_law(gxy, 1.0)?,
                ))
            }
            "white" => {
                let xx = CorrelationModel::white(1.0)?;
                let yy = CorrelationModel::white(1.0)?;
                let xy = self.build_coupling(coupling, config, echo)?;
                Ok((xx, yy, xy))
            }
            "gaussian" => {
                let width = get_f64(self.width, "width")
                    .ok_or_else(|| Error::InvalidParameter("--width is required".into()))?;
                echo.set("width", width);
                let auto = CorrelationModel::new(CorrelationFamily::Gaussian { width }, 1.0)?;
                let xy = self.build_coupling(coupling, config, echo)?;
                Ok((auto.clone(), auto, xy))
            }
            "exponential" | "damped-harmonic" => {
                let decay = get_f64(self.decay, "decay")
                    .ok_or_else(|| Error::InvalidParameter("--decay is required".into()))?;
                echo.set("decay", decay);
                let auto = if family == "exponential" {
                    CorrelationModel::new(CorrelationFamily::Exponential { decay }, 1.0)?
                } else {
                    let freq = get_f64(self.freq, "freq")
                        .ok_or_else(|| Error::InvalidParameter("--freq is required".into()))?;
                    echo.set("freq", freq);
                    CorrelationModel::new(
                        CorrelationFamily::DampedHarmonic {
                            decay,
                            frequency: freq,
                        },
                        1.0,
                    )?
                };
                let xy = self.build_coupling(coupling, config, echo)?;
                Ok((auto.clone(), auto, xy))
            }
            "tabulated" => {
                let mut load = |flag: &Option<PathBuf>, key: &str| -> Result<CorrelationModel> {
                    let path = flag
                        .clone()
                        .or_else(|| config.get(key).map(PathBuf::from))
                        .ok_or_else(|| Error::InvalidParameter(format!("--{key} is required")))?;
                    echo.set(key, path.display());
                    CorrelationModel::new(
                        CorrelationFamily::Tabulated {
                            values: read_table(&path)?,
                        },
                        1.0,
                    )
                };
                Ok((
                    load(&self.table_xx, "table-xx")?,
                    load(&self.table_yy, "table-yy")?,
                    load(&self.table_xy, "table-xy")?,
                ))
            }
            other => Err(Error::InvalidParameter(format!(
                "unknown family `{other}` (expected white | power-law | gaussian | \
                 exponential | damped-harmonic | tabulated)"
            ))),
        }
    }

    fn build_coupling(
        &self,
        coupling: Option<&str>,
        config: &KeyValues,
        echo: &mut KeyValues,
    ) -> Result<CorrelationModel> {
        let get_f64 = |flag: Option<f64>, key: &str| flag.or_else(|| parse_key(config, key));
        match coupling.unwrap_or("white") {
            "white" => CorrelationModel::white(0.0),
            "gaussian" => {
                let width = get_f64(self.coupling_width, "coupling-width").unwrap_or(5.0);
                echo.set("coupling-width", width);
                CorrelationModel::new(CorrelationFamily::Gaussian { width }, 1.0)
            }
            "exponential" => {
                let decay = get_f64(self.coupling_decay, "coupling-decay").unwrap_or(0.2);
                echo.set("coupling-decay", decay);
                CorrelationModel::new(CorrelationFamily::Exponential { decay }, 1.0)
            }
            "damped-harmonic" => {
                let decay = get_f64(self.coupling_decay, "coupling-decay").unwrap_or(0.1);
                let freq = get_f64(self.coupling_freq, "coupling-freq").unwrap_or(0.5);
                echo.set("coupling-decay", decay);
                echo.set("coupling-freq", freq);
                CorrelationModel::new(
                    CorrelationFamily::DampedHarmonic {
                        decay,
                        frequency: freq,
                    },
                    1.0,
                )
            }
            "power-law" => {
                let gxy = self
                    .gxy
                    .or_else(|| parse_key(config, "gxy"))
                    .ok_or_else(|| Error::InvalidParameter("--gxy is required".into()))?;
                echo.set("gxy", gxy);
                CorrelationModel::power_law(gxy, 1.0)
            }
            "tabulated" => {
                let path = self
                    .table_xy
                    .clone()
                    .or_else(|| config.get("table-xy").map(PathBuf::from))
                    .ok_or_else(|| Error::InvalidParameter("--table-xy is required".into()))?;
                echo.set("table-xy", path.display());
                CorrelationModel::new(
                    CorrelationFamily::Tabulated {
                        values: read_table(&path)?,
                    },
                    1.0,
                )
            }
            other => Err(Error::InvalidParameter(format!(
                "unknown coupling `{other}` (expected white | gaussian | exponential | \
                 damped-harmonic | power-law | tabulated)"
            ))),
        }
    }
}

fn parse_key<T: std::str::FromStr>(config: &KeyValues, key: &str) -> Option<T> {
    config.get(key).and_then(|v| v.parse().ok())
}
