//! Spectral densities on a frequency grid, built from target correlations.
//!
//! Conventions, fixed once for the whole crate: the forward transform is the
//! unnormalized DFT `S(q) = Σ_n C(n) e^{-2πi q n / L}`, the cross-spectrum is
//! the forward transform of `C_xy(n) = <x_i y_{i+n}>`, and synthesis targets
//! `(1/L^d) <x_q* y_q> = S_xy(q)`.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::fft::{forward_real, GridFft};
use crate::grid::FrequencyGrid;
use crate::model::{sample_correlation, CorrelationFamily, TargetModels};
use crate::specfun::{bessel_k, gamma};

/// Autospectrum values more negative than `-CLIP_TOLERANCE * max(S)` signal an
/// indefinite target; anything closer to zero is discretization noise and is
/// clipped silently.
pub const CLIP_TOLERANCE: f64 = 1e-8;

/// Relative slack on the pointwise coherence bound, so a target sitting
/// exactly on |g| = 1 survives roundoff.
pub const FEASIBILITY_TOLERANCE: f64 = 1e-10;

/// Cross-spectrum magnitudes below this fraction of the largest spectral
/// value are treated as zero: deep in the tail of fast-decaying spectra the
/// transform leaves roundoff-level residue there, over autospectra that may
/// have been clipped to exactly zero.
pub const CROSS_NEGLIGIBLE: f64 = 1e-12;

/// Residual imaginary part allowed in the spectrum of an even correlation,
/// relative to the lag-array magnitude.
const EVEN_IMAG_TOLERANCE: f64 = 1e-9;

/// Which route produces the spectra from the target models.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SpectralPath {
    /// Sample the correlation on the grid and take its DFT. Works for every
    /// family; this is the route the synthesis pipeline treats as exact.
    Fft,
    /// Closed Bessel-K form of the power-law family, evaluated at each bin's
    /// radial wavenumber. Power-law targets only.
    Analytic,
}

/// Count and worst magnitude of negative autospectrum values clipped to zero.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct ClipReport {
    pub clipped: usize,
    pub max_magnitude: f64,
}

impl ClipReport {
    fn merge(self, other: ClipReport) -> ClipReport {
        ClipReport {
            clipped: self.clipped + other.clipped,
            max_magnitude: self.max_magnitude.max(other.max_magnitude),
        }
    }
}

/// One coherence violation: flat bin index and the offending |g(q)|.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CoherenceViolation {
    pub bin: usize,
    pub coherence: f64,
}

/// Outcome of the pointwise Cauchy-Schwarz check `|S_xy|² <= S_xx S_yy`.
#[derive(Debug, Clone, Default)]
pub struct FeasibilityReport {
    pub feasible: bool,
    pub max_coherence: f64,
    pub violations: Vec<CoherenceViolation>,
}

/// The spectral triple (S_xx, S_yy, S_xy) on a common grid.
#[derive(Debug, Clone)]
pub struct SpectralTriple {
    pub grid: FrequencyGrid,
    pub sxx: Vec<f64>,
    pub syy: Vec<f64>,
    pub sxy: Vec<Complex64>,
    pub feasible: bool,
    pub clip: ClipReport,
}

impl SpectralTriple {
    /// Build the triple from target models along the requested path.
    pub fn from_models(
        models: &TargetModels,
        grid: &FrequencyGrid,
        path: SpectralPath,
    ) -> Result<Self> {
        let (sxx, cxx_clip, syy, cyy_clip, sxy) = match path {
            SpectralPath::Fft => {
                let fft = GridFft::new(grid);
                let cxx = sample_correlation(&models.xx, grid)?;
                let cyy = sample_correlation(&models.yy, grid)?;
                let cxy = sample_correlation(&models.xy, grid)?;
                let (mut sxx, cxx_clip) = autospectrum_from_correlation(&cxx, grid, &fft)?;
                let (mut syy, cyy_clip) = autospectrum_from_correlation(&cyy, grid, &fft)?;
                let mut sxy = cross_spectrum_from_correlation(&cxy, grid, &fft)?;
                if grid.dim() >= 2 {
                    // isotropic targets: make every bin of a given |q| carry
                    // the same value, removing FFT roundoff anisotropy
                    let shells = radial_shells(grid);
                    radialize_real(&mut sxx, &shells);
                    radialize_real(&mut syy, &shells);
                    radialize_complex(&mut sxy, &shells);
                }
                (sxx, cxx_clip, syy, cyy_clip, sxy)
            }
            SpectralPath::Analytic => {
                let sxx = analytic_power_law(&models.xx, grid)?;
                let syy = analytic_power_law(&models.yy, grid)?;
                let sxy: Vec<Complex64> = analytic_power_law(&models.xy, grid)?
                    .into_iter()
                    .map(|v| Complex64::new(v, 0.0))
                    .collect();
                (sxx, ClipReport::default(), syy, ClipReport::default(), sxy)
            }
        };
        let mut triple = SpectralTriple {
            grid: grid.clone(),
            sxx,
            syy,
            sxy,
            feasible: false,
            clip: cxx_clip.merge(cyy_clip),
        };
        triple.feasible = triple.feasibility().feasible;
        Ok(triple)
    }

    /// Largest spectral magnitude across the triple.
    pub fn spectral_scale(&self) -> f64 {
        let mut scale = 0.0_f64;
        for i in 0..self.grid.len() {
            scale = scale
                .max(self.sxx[i])
                .max(self.syy[i])
                .max(self.sxy[i].norm());
        }
        scale
    }

    /// Cross magnitudes at or below this are considered zero.
    pub fn cross_floor(&self) -> f64 {
        CROSS_NEGLIGIBLE * self.spectral_scale()
    }

    /// Pointwise feasibility: `|S_xy(q)|² <= S_xx S_yy (1 + ε)` at every bin
    /// carrying non-negligible cross power.
    pub fn feasibility(&self) -> FeasibilityReport {
        let mut report = FeasibilityReport {
            feasible: true,
            ..Default::default()
        };
        let floor = self.cross_floor();
        for i in 0..self.grid.len() {
            let cross = self.sxy[i].norm();
            if cross <= floor {
                continue;
            }
            let cross2 = cross * cross;
            let auto2 = self.sxx[i] * self.syy[i];
            let coherence = if auto2 > 0.0 {
                (cross2 / auto2).sqrt()
            } else {
                f64::INFINITY
            };
            if coherence > report.max_coherence {
                report.max_coherence = coherence;
            }
            if cross2 > auto2 * (1.0 + FEASIBILITY_TOLERANCE) {
                report.feasible = false;
                if report.violations.len() < 1024 {
                    report
                        .violations
                        .push(CoherenceViolation { bin: i, coherence });
                }
            }
        }
        report
    }

    /// Largest factor the cross-spectrum can be multiplied by while staying
    /// feasible. Infinite when the cross-spectrum is (effectively) zero.
    pub fn max_cross_scale(&self) -> f64 {
        let floor = self.cross_floor();
        let mut bound = f64::INFINITY;
        for i in 0..self.grid.len() {
            let cross = self.sxy[i].norm();
            if cross > floor {
                let auto = (self.sxx[i] * self.syy[i]).sqrt();
                bound = bound.min(auto / cross);
            }
        }
        bound
    }
}

/// Forward DFT of an even (auto) correlation lag array: the spectrum must be
/// real up to roundoff; small negative values are clipped and reported.
pub fn autospectrum_from_correlation(
    lags: &[f64],
    grid: &FrequencyGrid,
    fft: &GridFft,
) -> Result<(Vec<f64>, ClipReport)> {
    if lags.len() != grid.len() {
        return Err(Error::GridMismatch {
            expected: grid.len(),
            got: lags.len(),
        });
    }
    let spec = forward_real(fft, lags);
    let scale: f64 = lags.iter().map(|v| v.abs()).sum();
    let imag_tol = EVEN_IMAG_TOLERANCE * (1.0 + scale);
    let mut worst_imag = 0.0_f64;
    for v in &spec {
        worst_imag = worst_imag.max(v.im.abs());
    }
    if worst_imag > imag_tol {
        return Err(Error::ImaginaryResidue {
            residual: worst_imag,
            tolerance: imag_tol,
        });
    }
    let mut values: Vec<f64> = spec.iter().map(|v| v.re).collect();
    // make evenness under q -> -q exact; roundoff asymmetry deep in the tail
    // would otherwise be amplified by the square root in the filters
    for i in 0..values.len() {
        let j = grid.negated(i);
        if j > i {
            let avg = 0.5 * (values[i] + values[j]);
            values[i] = avg;
            values[j] = avg;
        }
    }
    let max_s = values.iter().fold(0.0_f64, |m, &v| m.max(v));
    let clip_floor = -CLIP_TOLERANCE * max_s.max(f64::MIN_POSITIVE);
    let mut clip = ClipReport::default();
    for (i, v) in values.iter_mut().enumerate() {
        if *v < 0.0 {
            if *v < clip_floor {
                return Err(Error::IndefiniteCorrelation {
                    value: *v,
                    bin: i,
                    tolerance: clip_floor,
                });
            }
            clip.clipped += 1;
            clip.max_magnitude = clip.max_magnitude.max(-*v);
            *v = 0.0;
        }
    }
    Ok((values, clip))
}

/// Forward DFT of a cross-correlation lag array. The result is Hermitian for
/// real input; symmetry is enforced exactly by averaging conjugate bins.
pub fn cross_spectrum_from_correlation(
    lags: &[f64],
    grid: &FrequencyGrid,
    fft: &GridFft,
) -> Result<Vec<Complex64>> {
    if lags.len() != grid.len() {
        return Err(Error::GridMismatch {
            expected: grid.len(),
            got: lags.len(),
        });
    }
    let mut spec = forward_real(fft, lags);
    for i in 0..spec.len() {
        let j = grid.negated(i);
        if j < i {
            continue;
        }
        if j == i {
            spec[i] = Complex64::new(spec[i].re, 0.0);
        } else {
            let avg = 0.5 * (spec[i] + spec[j].conj());
            spec[i] = avg;
            spec[j] = avg.conj();
        }
    }
    Ok(spec)
}

/// Closed-form spectrum of the power-law family on a grid.
///
/// For `C(l) = (1 + l²)^(-γ/2)` in d dimensions the transform is
/// `S(q) = 2 π^{d/2} / Γ(γ/2) · (q/2)^β K_β(q)` with `β = (γ - d)/2`.
/// The q = 0 bin, where the closed form diverges for β < 0, is the lag sum of
/// the sampled correlation, matching the DFT path's zero mode.
pub fn power_law_spectrum_analytic(
    exponent: f64,
    amplitude: f64,
    grid: &FrequencyGrid,
) -> Result<Vec<f64>> {
    let d = grid.dim() as f64;
    let beta = (exponent - d) / 2.0;
    let prefactor = 2.0 * std::f64::consts::PI.powf(d / 2.0) / gamma(exponent / 2.0)?;

    let model = crate::model::CorrelationModel::power_law(exponent, amplitude)?;
    let sampled = sample_correlation(&model, grid)?;
    let zero_mode: f64 = sampled.iter().sum();

    let mut out = Vec::with_capacity(grid.len());
    for i in 0..grid.len() {
        let q = grid.radial_wavenumber(i);
        if q == 0.0 {
            out.push(zero_mode);
        } else {
            // the shape factor is nonnegative; the sign of a (cross) target
            // rides on the amplitude alone
            let shape = (prefactor * (q / 2.0).powf(beta) * bessel_k(beta, q)?).max(0.0);
            out.push(amplitude * shape);
        }
    }
    Ok(out)
}

/// Group flat bins by the exact integer squared radius of their signed
/// frequency indices.
fn radial_shells(grid: &FrequencyGrid) -> Vec<Vec<usize>> {
    let mut by_key = std::collections::BTreeMap::<u64, Vec<usize>>::new();
    let mut idx = [0usize; 3];
    for flat in 0..grid.len() {
        grid.unravel(flat, &mut idx[..grid.dim()]);
        let mut key = 0u64;
        for &i in &idx[..grid.dim()] {
            let m = grid.signed_index(i).unsigned_abs();
            key += m * m;
        }
        by_key.entry(key).or_default().push(flat);
    }
    by_key.into_values().collect()
}

fn radialize_real(values: &mut [f64], shells: &[Vec<usize>]) {
    for shell in shells {
        let mean = shell.iter().map(|&i| values[i]).sum::<f64>() / shell.len() as f64;
        for &i in shell {
            values[i] = mean;
        }
    }
}

fn radialize_complex(values: &mut [Complex64], shells: &[Vec<usize>]) {
    // an isotropic cross target has a real, even spectrum; averaging the
    // shell (which contains each q with its mirror -q) lands on the real axis
    for shell in shells {
        let mean = shell.iter().map(|&i| values[i]).sum::<Complex64>() / shell.len() as f64;
        for &i in shell {
            values[i] = mean;
        }
    }
}

fn analytic_power_law(
    model: &crate::model::CorrelationModel,
    grid: &FrequencyGrid,
) -> Result<Vec<f64>> {
    match &model.family {
        CorrelationFamily::PowerLaw { exponent } => {
            power_law_spectrum_analytic(*exponent, model.amplitude, grid)
        }
        _ => Err(Error::AnalyticPathUnsupported),
    }
}
