//! Fourier-space mixing coefficients that turn two white spectra into the
//! target triple.
//!
//! The constructed pair of filters satisfies, at every bin,
//!
//! ```text
//! |a|² + |b|²          = S_xx
//! |c|² + |d|²          = S_yy
//! conj(a)·c + conj(b)·d = S_xy
//! ```
//!
//! together with the conjugation symmetry `a(-q) = conj(a(q))` (same for b, c,
//! d) that keeps the synthesized sequences real. The solution family is a
//! one-parameter gauge; this module fixes the lower-triangular member
//! (`b = 0`), which stays numerically stable as the coherence approaches 1.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::grid::FrequencyGrid;
use crate::spectrum::SpectralTriple;

/// Residual above which a coefficient set is considered inconsistent with its
/// triple, per unit spectral scale.
pub const COEFFICIENT_TOLERANCE: f64 = 1e-12;

/// The four mixing filters on a frequency grid.
#[derive(Debug, Clone)]
pub struct CoefficientSet {
    pub grid: FrequencyGrid,
    pub a: Vec<Complex64>,
    pub b: Vec<Complex64>,
    pub c: Vec<Complex64>,
    pub d: Vec<Complex64>,
}

/// Worst-case identity residuals of a coefficient set against a triple.
#[derive(Debug, Clone, Copy)]
pub struct ResidualReport {
    /// max |(|a|²+|b|²) - S_xx|
    pub xx: f64,
    /// max |(|c|²+|d|²) - S_yy|
    pub yy: f64,
    /// max |conj(a)c + conj(b)d - S_xy|
    pub xy: f64,
    /// residuals divided by the largest spectral magnitude
    pub normalized: f64,
    /// flat bin index of the worst residual
    pub worst_bin: usize,
}

impl ResidualReport {
    pub fn passes(&self) -> bool {
        self.normalized <= COEFFICIENT_TOLERANCE
    }
}

/// Build the gauge-fixed coefficients from a feasible triple:
/// `a = √S_xx, b = 0, c = √S_yy·g, d = √S_yy·√(1-|g|²)` with the complex
/// coherence `g = S_xy / √(S_xx S_yy)`.
pub fn coefficients_from_spectra(triple: &SpectralTriple) -> Result<CoefficientSet> {
    if !triple.feasible {
        let report = triple.feasibility();
        return Err(Error::InfeasibleTarget {
            max_coherence: report.max_coherence,
            violations: report.violations.len(),
        });
    }
    let n = triple.grid.len();
    let cross_floor = triple.cross_floor();

    let mut a = vec![Complex64::default(); n];
    let b = vec![Complex64::default(); n];
    let mut c = vec![Complex64::default(); n];
    let mut d = vec![Complex64::default(); n];
    for i in 0..n {
        let sxx = triple.sxx[i];
        let syy = triple.syy[i];
        let sxy = if triple.sxy[i].norm() <= cross_floor {
            Complex64::default()
        } else {
            triple.sxy[i]
        };
        if sxx <= 0.0 || syy <= 0.0 {
            // a degenerate bin carries no cross power; anything else is an error
            if sxy.norm() > 0.0 {
                return Err(Error::ZeroAutoNonzeroCross {
                    bin: i,
                    cross: sxy.norm(),
                });
            }
            a[i] = Complex64::new(sxx.max(0.0).sqrt(), 0.0);
            d[i] = Complex64::new(syy.max(0.0).sqrt(), 0.0);
            continue;
        }
        let g = sxy / (sxx * syy).sqrt();
        let g2 = g.norm_sqr().min(1.0); // feasibility tolerance admits |g| barely above 1
        a[i] = Complex64::new(sxx.sqrt(), 0.0);
        c[i] = g * syy.sqrt();
        d[i] = Complex64::new((syy * (1.0 - g2)).sqrt(), 0.0);
    }
    Ok(CoefficientSet {
        grid: triple.grid.clone(),
        a,
        b,
        c,
        d,
    })
}

/// Recompute the three defining identities and report the worst residuals.
pub fn verify_coefficients(cs: &CoefficientSet, triple: &SpectralTriple) -> Result<ResidualReport> {
    if cs.grid != triple.grid {
        return Err(Error::GridMismatch {
            expected: triple.grid.len(),
            got: cs.grid.len(),
        });
    }
    let mut report = ResidualReport {
        xx: 0.0,
        yy: 0.0,
        xy: 0.0,
        normalized: 0.0,
        worst_bin: 0,
    };
    let mut worst = 0.0_f64;
    for i in 0..cs.grid.len() {
        let rxx = (cs.a[i].norm_sqr() + cs.b[i].norm_sqr() - triple.sxx[i]).abs();
        let ryy = (cs.c[i].norm_sqr() + cs.d[i].norm_sqr() - triple.syy[i]).abs();
        let rxy = (cs.a[i].conj() * cs.c[i] + cs.b[i].conj() * cs.d[i] - triple.sxy[i]).norm();
        report.xx = report.xx.max(rxx);
        report.yy = report.yy.max(ryy);
        report.xy = report.xy.max(rxy);
        let here = rxx.max(ryy).max(rxy);
        if here > worst {
            worst = here;
            report.worst_bin = i;
        }
    }
    report.normalized = worst / triple.spectral_scale().max(f64::MIN_POSITIVE);
    Ok(report)
}

impl CoefficientSet {
    /// Check the conjugation symmetry `f(-q) = conj(f(q))` of all four filters.
    pub fn conjugation_residual(&self) -> f64 {
        let mut worst = 0.0_f64;
        for i in 0..self.grid.len() {
            let j = self.grid.negated(i);
            for f in [&self.a, &self.b, &self.c, &self.d] {
                worst = worst.max((f[i] - f[j].conj()).norm());
            }
        }
        worst
    }

    /// Apply the gauge freedom: rotate `(a, b)` and `(c, d)` by the same
    /// per-bin mixing angle. The angle field must be real and even under
    /// `q -> -q` for the rotated set to keep its conjugation symmetry; every
    /// rotation leaves the three defining identities unchanged.
    pub fn rotate_gauge(&self, theta: &[f64]) -> Result<CoefficientSet> {
        if theta.len() != self.grid.len() {
            return Err(Error::LengthMismatch {
                expected: self.grid.len(),
                got: theta.len(),
            });
        }
        let mut out = self.clone();
        for i in 0..theta.len() {
            let (sin, cos) = theta[i].sin_cos();
            out.a[i] = self.a[i] * cos - self.b[i] * sin;
            out.b[i] = self.a[i] * sin + self.b[i] * cos;
            out.c[i] = self.c[i] * cos - self.d[i] * sin;
            out.d[i] = self.c[i] * sin + self.d[i] * cos;
        }
        Ok(out)
    }
}
