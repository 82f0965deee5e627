//! Target correlation functions of lag.

use crate::error::{Error, Result};
use crate::grid::FrequencyGrid;

/// Parametric family of a target correlation function.
#[derive(Debug, Clone, PartialEq)]
pub enum CorrelationFamily {
    /// Uncorrelated: C(l) = δ_{l,0}.
    White,
    /// C(l) = exp(-l² / 2σ²).
    Gaussian { width: f64 },
    /// C(l) = exp(-λ|l|).
    Exponential { decay: f64 },
    /// C(l) = exp(-λ|l|) cos(ω l).
    DampedHarmonic { decay: f64, frequency: f64 },
    /// C(l) = (1 + l²)^(-γ/2); long-range power law, finite at l = 0.
    PowerLaw { exponent: f64 },
    /// Values at integer lags. Either `side/2 + 1` entries (mirrored evenly)
    /// or a full period of `side` entries (circular, may be uneven for
    /// cross-correlations). Non-integer field distances are interpolated
    /// linearly.
    Tabulated { values: Vec<f64> },
}

/// A target correlation model: a family scaled by an amplitude.
///
/// Autocorrelation targets must be even in the lag; every built-in family is.
/// A full-period `Tabulated` cross target may be uneven.
#[derive(Debug, Clone, PartialEq)]
pub struct CorrelationModel {
    pub family: CorrelationFamily,
    pub amplitude: f64,
}

impl CorrelationModel {
    pub fn new(family: CorrelationFamily, amplitude: f64) -> Result<Self> {
        if !amplitude.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "amplitude must be finite, got {amplitude}"
            )));
        }
        match &family {
            CorrelationFamily::Gaussian { width } => {
                if !width.is_finite() || *width <= 0.0 {
                    return Err(Error::InvalidParameter(format!(
                        "gaussian width must be positive, got {width}"
                    )));
                }
            }
            CorrelationFamily::Exponential { decay } => {
                if !decay.is_finite() || *decay <= 0.0 {
                    return Err(Error::InvalidParameter(format!(
                        "exponential decay must be positive, got {decay}"
                    )));
                }
            }
            CorrelationFamily::DampedHarmonic { decay, frequency } => {
                if !decay.is_finite() || *decay <= 0.0 {
                    return Err(Error::InvalidParameter(format!(
                        "damped-harmonic decay must be positive, got {decay}"
                    )));
                }
                if !frequency.is_finite() || *frequency < 0.0 {
                    return Err(Error::InvalidParameter(format!(
                        "damped-harmonic frequency must be >= 0, got {frequency}"
                    )));
                }
            }
            CorrelationFamily::PowerLaw { exponent } => {
                // the 1-d construction in the source material restricts to
                // exponents below 1; up to 2 is required for 2-d fields
                if !exponent.is_finite() || *exponent <= 0.0 || *exponent >= 2.0 {
                    return Err(Error::InvalidParameter(format!(
                        "power-law exponent must lie in (0, 2), got {exponent}"
                    )));
                }
            }
            CorrelationFamily::White | CorrelationFamily::Tabulated { .. } => {}
        }
        if let CorrelationFamily::Tabulated { values } = &family {
            if values.is_empty() || values.iter().any(|v| !v.is_finite()) {
                return Err(Error::InvalidParameter(
                    "tabulated values must be non-empty and finite".into(),
                ));
            }
        }
        Ok(Self { family, amplitude })
    }

    pub fn white(amplitude: f64) -> Result<Self> {
        Self::new(CorrelationFamily::White, amplitude)
    }

    pub fn power_law(exponent: f64, amplitude: f64) -> Result<Self> {
        Self::new(CorrelationFamily::PowerLaw { exponent }, amplitude)
    }

    /// Evaluate the model at a signed real lag. `Tabulated` is only defined on
    /// the grid it was sized for; use [`sample_correlation`] for those.
    pub fn eval(&self, lag: f64) -> f64 {
        let l = lag.abs();
        let base = match &self.family {
            CorrelationFamily::White => {
                if l == 0.0 {
                    1.0
                } else {
                    0.0
                }
            }
            CorrelationFamily::Gaussian { width } => (-l * l / (2.0 * width * width)).exp(),
            CorrelationFamily::Exponential { decay } => (-decay * l).exp(),
            CorrelationFamily::DampedHarmonic { decay, frequency } => {
                (-decay * l).exp() * (frequency * lag).cos()
            }
            CorrelationFamily::PowerLaw { exponent } => (1.0 + l * l).powf(-exponent / 2.0),
            CorrelationFamily::Tabulated { values } => {
                let lo = l.floor() as usize;
                let frac = l - l.floor();
                let a = values.get(lo).copied().unwrap_or(0.0);
                if frac == 0.0 {
                    a
                } else {
                    let b = values.get(lo + 1).copied().unwrap_or(0.0);
                    a + frac * (b - a)
                }
            }
        };
        self.amplitude * base
    }

    /// True when the model is even in the lag by construction.
    pub fn is_even(&self) -> bool {
        !matches!(&self.family, CorrelationFamily::Tabulated { values }
            if !is_even_table(values))
    }
}

fn is_even_table(values: &[f64]) -> bool {
    // a table of side/2 + 1 entries (odd length, sides being powers of two)
    // is mirrored and hence even; a full period is even iff
    // values[n] == values[len - n]
    let n = values.len();
    n % 2 == 1 || (1..n).all(|i| values[i] == values[n - i])
}

/// The three targets of a coupled pair: C_xx, C_yy and C_xy.
#[derive(Debug, Clone, PartialEq)]
pub struct TargetModels {
    pub xx: CorrelationModel,
    pub yy: CorrelationModel,
    pub xy: CorrelationModel,
}

impl TargetModels {
    pub fn new(xx: CorrelationModel, yy: CorrelationModel, xy: CorrelationModel) -> Result<Self> {
        for (name, m) in [("xx", &xx), ("yy", &yy)] {
            if !m.is_even() {
                return Err(Error::InvalidParameter(format!(
                    "autocorrelation {name} must be even in the lag"
                )));
            }
        }
        Ok(Self { xx, yy, xy })
    }

    /// Same targets with the cross amplitude multiplied by `factor`.
    pub fn scale_cross(&self, factor: f64) -> Self {
        let mut out = self.clone();
        out.xy.amplitude *= factor;
        out
    }
}

/// Sample a model at every grid point: lag `n` along each axis is reduced to
/// its periodic minimum image, and the model is evaluated at the signed 1-d
/// lag (d = 1) or the Euclidean radial distance (d >= 2).
///
/// For even models this equals the mirrored array `C(n), n <= L/2; C(L-n)`
/// beyond; uneven 1-d cross models keep their sign through the signed lag.
pub fn sample_correlation(model: &CorrelationModel, grid: &FrequencyGrid) -> Result<Vec<f64>> {
    if let CorrelationFamily::Tabulated { values } = &model.family {
        let side = grid.side();
        if grid.dim() == 1 {
            if values.len() == side {
                // full circular period, used verbatim
                return Ok(values.iter().map(|v| v * model.amplitude).collect());
            }
            if values.len() != side / 2 + 1 {
                return Err(Error::TableLength {
                    got: values.len(),
                    need: side / 2 + 1,
                    side,
                });
            }
        } else {
            // must cover the largest periodic radial distance on the torus
            let need = ((grid.dim() as f64).sqrt() * side as f64 / 2.0).floor() as usize + 2;
            if values.len() < need {
                return Err(Error::TableLength {
                    got: values.len(),
                    need,
                    side,
                });
            }
        }
    }
    let n = grid.len();
    let mut out = Vec::with_capacity(n);
    if grid.dim() == 1 {
        for i in 0..n {
            out.push(model.eval(grid.signed_index(i) as f64));
        }
    } else {
        for i in 0..n {
            out.push(model.eval(grid.radial_lag(i)));
        }
    }
    Ok(out)
}
