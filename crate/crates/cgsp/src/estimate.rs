//! Ensemble estimators for auto/cross-correlations, coherence profiles, and
//! power-law exponent fits.
//!
//! All estimators are circular: the generated data is exactly periodic, so the
//! FFT-based correlation over the torus is the natural (and bias-free) choice.
//! Users comparing against non-periodic data should note the difference from
//! the linear (unbiased) estimator.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::fft::GridFft;
use crate::grid::FrequencyGrid;
use crate::spectrum::SpectralTriple;
use crate::synth::field::FieldPair;
use crate::synth::SequencePair;

/// Which curve of an estimate an operation targets.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Curve {
    Xx,
    Yy,
    Xy,
}

impl std::fmt::Display for Curve {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Curve::Xx => "xx",
            Curve::Yy => "yy",
            Curve::Xy => "xy",
        })
    }
}

/// Ensemble-averaged correlation curves with per-lag standard errors.
///
/// For sequences the lag axis is `0..L-1` (circular); for fields it is the
/// integer shell index of the periodic radial distance, with `radii` holding
/// the mean distance within each shell.
#[derive(Debug, Clone)]
pub struct CorrelationEstimate {
    pub lags: Vec<usize>,
    pub radii: Vec<f64>,
    pub cxx: Vec<f64>,
    pub cyy: Vec<f64>,
    pub cxy: Vec<f64>,
    pub se_xx: Vec<f64>,
    pub se_yy: Vec<f64>,
    pub se_xy: Vec<f64>,
    pub n_realizations: usize,
}

impl CorrelationEstimate {
    pub fn curve(&self, which: Curve) -> &[f64] {
        match which {
            Curve::Xx => &self.cxx,
            Curve::Yy => &self.cyy,
            Curve::Xy => &self.cxy,
        }
    }

    pub fn stderr(&self, which: Curve) -> &[f64] {
        match which {
            Curve::Xx => &self.se_xx,
            Curve::Yy => &self.se_yy,
            Curve::Xy => &self.se_xy,
        }
    }
}

#[derive(Clone)]
struct Welford {
    n: usize,
    mean: Vec<f64>,
    m2: Vec<f64>,
}

impl Welford {
    fn new(len: usize) -> Self {
        Self {
            n: 0,
            mean: vec![0.0; len],
            m2: vec![0.0; len],
        }
    }

    fn push(&mut self, sample: &[f64]) {
        self.n += 1;
        let inv = 1.0 / self.n as f64;
        for i in 0..sample.len() {
            let delta = sample[i] - self.mean[i];
            self.mean[i] += delta * inv;
            self.m2[i] += delta * (sample[i] - self.mean[i]);
        }
    }

    /// Standard error of the mean; zero for a single realization.
    fn stderr(&self) -> Vec<f64> {
        if self.n < 2 {
            return vec![0.0; self.mean.len()];
        }
        let denom = (self.n * (self.n - 1)) as f64;
        self.m2.iter().map(|m2| (m2 / denom).sqrt()).collect()
    }
}

/// Streaming estimator for 1-d sequence pairs.
pub struct SequenceAccumulator {
    fft: GridFft,
    wxx: Welford,
    wyy: Welford,
    wxy: Welford,
}

impl SequenceAccumulator {
    pub fn new(grid: &FrequencyGrid) -> Result<Self> {
        if grid.dim() != 1 {
            return Err(Error::DimensionMismatch {
                need: 1,
                got: grid.dim(),
            });
        }
        let n = grid.len();
        Ok(Self {
            fft: GridFft::new(grid),
            wxx: Welford::new(n),
            wyy: Welford::new(n),
            wxy: Welford::new(n),
        })
    }

    pub fn push(&mut self, x: &[f64], y: &[f64]) -> Result<()> {
        let (cxx, cyy, cxy) = circular_curves(&self.fft, x, y)?;
        self.wxx.push(&cxx);
        self.wyy.push(&cyy);
        self.wxy.push(&cxy);
        Ok(())
    }

    pub fn push_pair(&mut self, pair: &SequencePair) -> Result<()> {
        self.push(&pair.x, &pair.y)
    }

    pub fn n_realizations(&self) -> usize {
        self.wxx.n
    }

    pub fn finish(self) -> Result<CorrelationEstimate> {
        if self.wxx.n == 0 {
            return Err(Error::EmptyEnsemble);
        }
        let len = self.wxx.mean.len();
        Ok(CorrelationEstimate {
            lags: (0..len).collect(),
            radii: (0..len).map(|n| n as f64).collect(),
            se_xx: self.wxx.stderr(),
            se_yy: self.wyy.stderr(),
            se_xy: self.wxy.stderr(),
            cxx: self.wxx.mean,
            cyy: self.wyy.mean,
            cxy: self.wxy.mean,
            n_realizations: self.wxx.n,
        })
    }
}

/// Streaming estimator for field pairs: each realization's correlation grid is
/// averaged over periodic radial shells before entering the ensemble average,
/// so standard errors reflect across-realization scatter of shell means.
pub struct RadialAccumulator {
    fft: GridFft,
    shells: Vec<Vec<usize>>,
    radii: Vec<f64>,
    wxx: Welford,
    wyy: Welford,
    wxy: Welford,
}

impl RadialAccumulator {
    pub fn new(grid: &FrequencyGrid) -> Result<Self> {
        if grid.dim() < 2 {
            return Err(Error::DimensionMismatch {
                need: 2,
                got: grid.dim(),
            });
        }
        let max_shell = ((grid.dim() as f64).sqrt() * grid.side() as f64 / 2.0).round() as usize;
        let mut shells = vec![Vec::new(); max_shell + 1];
        let mut radius_sum = vec![0.0; max_shell + 1];
        for flat in 0..grid.len() {
            let r = grid.radial_lag(flat);
            let shell = r.round() as usize;
            shells[shell].push(flat);
            radius_sum[shell] += r;
        }
        let radii: Vec<f64> = shells
            .iter()
            .zip(&radius_sum)
            .map(|(s, sum)| {
                if s.is_empty() {
                    0.0
                } else {
                    sum / s.len() as f64
                }
            })
            .collect();
        let n = shells.len();
        Ok(Self {
            fft: GridFft::new(grid),
            shells,
            radii,
            wxx: Welford::new(n),
            wyy: Welford::new(n),
            wxy: Welford::new(n),
        })
    }

    pub fn push(&mut self, x: &[f64], y: &[f64]) -> Result<()> {
        let (cxx, cyy, cxy) = circular_curves(&self.fft, x, y)?;
        self.wxx.push(&self.shell_average(&cxx));
        self.wyy.push(&self.shell_average(&cyy));
        self.wxy.push(&self.shell_average(&cxy));
        Ok(())
    }

    pub fn push_pair(&mut self, pair: &FieldPair) -> Result<()> {
        self.push(&pair.x, &pair.y)
    }

    fn shell_average(&self, grid_curve: &[f64]) -> Vec<f64> {
        self.shells
            .iter()
            .map(|s| {
                if s.is_empty() {
                    0.0
                } else {
                    s.iter().map(|&i| grid_curve[i]).sum::<f64>() / s.len() as f64
                }
            })
            .collect()
    }

    pub fn finish(self) -> Result<CorrelationEstimate> {
        if self.wxx.n == 0 {
            return Err(Error::EmptyEnsemble);
        }
        Ok(CorrelationEstimate {
            lags: (0..self.shells.len()).collect(),
            radii: self.radii,
            se_xx: self.wxx.stderr(),
            se_yy: self.wyy.stderr(),
            se_xy: self.wxy.stderr(),
            cxx: self.wxx.mean,
            cyy: self.wyy.mean,
            cxy: self.wxy.mean,
            n_realizations: self.wxx.n,
        })
    }
}

/// Per-realization circular correlation curves via the periodogram.
fn circular_curves(fft: &GridFft, x: &[f64], y: &[f64]) -> Result<(Vec<f64>, Vec<f64>, Vec<f64>)> {
    let n = fft.grid().len();
    if x.len() != n || y.len() != n {
        return Err(Error::LengthMismatch {
            expected: n,
            got: x.len().min(y.len()),
        });
    }
    let inv_n = 1.0 / n as f64;
    let mut xq: Vec<Complex64> = x.iter().map(|&v| Complex64::new(v, 0.0)).collect();
    let mut yq: Vec<Complex64> = y.iter().map(|&v| Complex64::new(v, 0.0)).collect();
    fft.forward(&mut xq);
    fft.forward(&mut yq);

    let mut pxx: Vec<Complex64> = xq
        .iter()
        .map(|z| Complex64::new(z.norm_sqr() * inv_n, 0.0))
        .collect();
    let mut pyy: Vec<Complex64> = yq
        .iter()
        .map(|z| Complex64::new(z.norm_sqr() * inv_n, 0.0))
        .collect();
    let mut pxy: Vec<Complex64> = xq
        .iter()
        .zip(&yq)
        .map(|(a, b)| a.conj() * b * inv_n)
        .collect();
    fft.inverse(&mut pxx);
    fft.inverse(&mut pyy);
    fft.inverse(&mut pxy);

    let grid = fft.grid();
    let mut cxx: Vec<f64> = pxx.iter().map(|z| z.re).collect();
    let mut cyy: Vec<f64> = pyy.iter().map(|z| z.re).collect();
    // the autocorrelation estimator is even by the algebra of the circular
    // sum; averaging mirror bins removes FFT roundoff so it holds exactly
    for i in 0..n {
        let j = grid.negated(i);
        if j > i {
            let mx = 0.5 * (cxx[i] + cxx[j]);
            cxx[i] = mx;
            cxx[j] = mx;
            let my = 0.5 * (cyy[i] + cyy[j]);
            cyy[i] = my;
            cyy[j] = my;
        }
    }
    Ok((cxx, cyy, pxy.iter().map(|z| z.re).collect()))
}

/// Convenience wrapper: estimate from a finished collection of pairs.
pub fn estimate_correlations<'a, I>(grid: &FrequencyGrid, pairs: I) -> Result<CorrelationEstimate>
where
    I: IntoIterator<Item = &'a SequencePair>,
{
    let mut acc = SequenceAccumulator::new(grid)?;
    for p in pairs {
        acc.push_pair(p)?;
    }
    acc.finish()
}

/// A fitted power-law exponent `C(n) ~ n^{-γ}` with its OLS uncertainty.
#[derive(Debug, Clone, Copy)]
pub struct ExponentFit {
    pub exponent: f64,
    pub uncertainty: f64,
    pub fit_range: (usize, usize),
    /// RMS residual of the log-log fit.
    pub goodness: f64,
}

/// Default fit window for sequences: wide enough to pin the exponent, short
/// enough that desk-scale ensembles keep every lag strictly positive and away
/// from the periodic wrap.
pub fn default_fit_range(grid: &FrequencyGrid) -> (usize, usize) {
    let side = grid.side();
    if grid.dim() == 1 {
        let hi = (side / 1024).clamp(8, 4096).min(side / 8);
        (4, hi)
    } else {
        (3, (side / 16).max(4))
    }
}

/// Least-squares slope of `log C` against `log n` over `range` (inclusive);
/// the exponent estimate is the negated slope.
pub fn fit_power_law_exponent(
    estimate: &CorrelationEstimate,
    which: Curve,
    range: (usize, usize),
) -> Result<ExponentFit> {
    let curve = estimate.curve(which);
    let (lo, hi) = range;
    let len = curve.len();
    if lo < 1 || hi <= lo || hi >= len {
        return Err(Error::FitRange {
            lo,
            hi,
            len,
            reason: "need 1 <= lo < hi < len".into(),
        });
    }
    if hi > len / 8 {
        return Err(Error::FitRange {
            lo,
            hi,
            len,
            reason: "lags beyond len/8 are dominated by the periodic wrap".into(),
        });
    }
    if hi - lo < 2 {
        return Err(Error::FitRange {
            lo,
            hi,
            len,
            reason: "need at least 3 points".into(),
        });
    }
    let mut xs = Vec::with_capacity(hi - lo + 1);
    let mut ys = Vec::with_capacity(hi - lo + 1);
    for i in lo..=hi {
        let v = curve[i];
        if v <= 0.0 {
            return Err(Error::NonPositiveCorrelation {
                which: which.to_string(),
                lag: estimate.radii[i],
                value: v,
            });
        }
        xs.push(estimate.radii[i].ln());
        ys.push(v.ln());
    }
    let n = xs.len() as f64;
    let xm = xs.iter().sum::<f64>() / n;
    let ym = ys.iter().sum::<f64>() / n;
    let sxx: f64 = xs.iter().map(|x| (x - xm) * (x - xm)).sum();
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - xm) * (y - ym)).sum();
    let slope = sxy / sxx;
    let intercept = ym - slope * xm;
    let ss_res: f64 = xs
        .iter()
        .zip(&ys)
        .map(|(x, y)| {
            let r = y - (slope * x + intercept);
            r * r
        })
        .sum();
    let sigma2 = ss_res / (n - 2.0);
    let stderr = (sigma2 / sxx).sqrt();
    Ok(ExponentFit {
        exponent: -slope,
        // strictly positive by contract; exact inputs bottom out at roundoff
        uncertainty: stderr.max(f64::EPSILON * (1.0 + slope.abs())),
        fit_range: (lo, hi),
        goodness: (ss_res / n).sqrt(),
    })
}

/// Ensemble-averaged periodograms, for coherence diagnostics.
pub struct SpectralEstimate {
    fft: GridFft,
    n: usize,
    pxx: Vec<f64>,
    pyy: Vec<f64>,
    pxy: Vec<Complex64>,
}

impl SpectralEstimate {
    pub fn new(grid: &FrequencyGrid) -> Self {
        let n = grid.len();
        Self {
            fft: GridFft::new(grid),
            n: 0,
            pxx: vec![0.0; n],
            pyy: vec![0.0; n],
            pxy: vec![Complex64::default(); n],
        }
    }

    pub fn push(&mut self, x: &[f64], y: &[f64]) -> Result<()> {
        let n = self.pxx.len();
        if x.len() != n || y.len() != n {
            return Err(Error::LengthMismatch {
                expected: n,
                got: x.len().min(y.len()),
            });
        }
        let inv_n = 1.0 / n as f64;
        let mut xq: Vec<Complex64> = x.iter().map(|&v| Complex64::new(v, 0.0)).collect();
        let mut yq: Vec<Complex64> = y.iter().map(|&v| Complex64::new(v, 0.0)).collect();
        self.fft.forward(&mut xq);
        self.fft.forward(&mut yq);
        for i in 0..n {
            self.pxx[i] += xq[i].norm_sqr() * inv_n;
            self.pyy[i] += yq[i].norm_sqr() * inv_n;
            self.pxy[i] += xq[i].conj() * yq[i] * inv_n;
        }
        self.n += 1;
        Ok(())
    }

    /// `|S_xy| / sqrt(S_xx S_yy)` per bin from the averaged periodograms.
    pub fn coherence_profile(&self) -> Result<Vec<f64>> {
        if self.n == 0 {
            return Err(Error::EmptyEnsemble);
        }
        coherence_of(&self.pxx, &self.pyy, &self.pxy)
    }
}

/// Coherence profile of a target triple.
pub fn coherence_profile(triple: &SpectralTriple) -> Result<Vec<f64>> {
    coherence_of(&triple.sxx, &triple.syy, &triple.sxy)
}

fn coherence_of(sxx: &[f64], syy: &[f64], sxy: &[Complex64]) -> Result<Vec<f64>> {
    let mut out = Vec::with_capacity(sxx.len());
    for i in 0..sxx.len() {
        let denom = sxx[i] * syy[i];
        if denom <= 0.0 {
            return Err(Error::InvalidParameter(format!(
                "coherence undefined: autospectrum is zero at bin {i}"
            )));
        }
        out.push(sxy[i].norm() / denom.sqrt());
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::synth::SequencePair;

    fn pair(x: Vec<f64>, y: Vec<f64>) -> SequencePair {
        SequencePair {
            x,
            y,
            seed_used: 0,
            realness_residual: 0.0,
        }
    }

    #[test]
    fn empty_ensemble_is_an_error() {
        let grid = FrequencyGrid::new(16, 1).unwrap();
        let acc = SequenceAccumulator::new(&grid).unwrap();
        assert!(matches!(acc.finish(), Err(Error::EmptyEnsemble)));
    }

    #[test]
    fn circular_estimator_matches_direct_sum() {
        let grid = FrequencyGrid::new(8, 1).unwrap();
        let x: Vec<f64> = vec![0.3, -1.0, 2.0, 0.1, -0.4, 0.9, -1.5, 0.6];
        let y: Vec<f64> = vec![1.0, 0.2, -0.7, 0.4, 1.1, -0.3, 0.5, -0.9];
        let est = estimate_correlations(&grid, [&pair(x.clone(), y.clone())]).unwrap();
        for n in 0..8 {
            let mut direct = 0.0;
            for i in 0..8 {
                direct += x[i] * y[(i + n) % 8];
            }
            direct /= 8.0;
            assert!(
                (est.cxy[n] - direct).abs() < 1e-12,
                "lag {n}: {} vs {direct}",
                est.cxy[n]
            );
        }
        // exact circular symmetry of the autocorrelation
        for n in 1..8 {
            assert_eq!(est.cxx[n], est.cxx[8 - n]);
        }
    }

    #[test]
    fn self_coupled_white_pair() {
        let grid = FrequencyGrid::new(1 << 10, 1).unwrap();
        let mut acc = SequenceAccumulator::new(&grid).unwrap();
        for k in 0..64 {
            let (u, _) = crate::synth::white_pair(1 << 10, crate::synth::child_seed(5, k)).unwrap();
            acc.push(&u, &u).unwrap();
        }
        let est = acc.finish().unwrap();
        assert!((est.cxy[0] - 1.0).abs() < 0.05);
        for n in [1usize, 7, 100] {
            assert!(est.cxy[n].abs() < 0.02, "lag {n}: {}", est.cxy[n]);
        }
    }

    #[test]
    fn exact_power_law_is_fit_to_machine_precision() {
        let len = 1 << 10;
        let curve: Vec<f64> = (0..len)
            .map(|n| if n == 0 { 1.0 } else { (n as f64).powf(-0.5) })
            .collect();
        let est = CorrelationEstimate {
            lags: (0..len).collect(),
            radii: (0..len).map(|n| n as f64).collect(),
            cxx: curve.clone(),
            cyy: curve.clone(),
            cxy: curve,
            se_xx: vec![0.0; len],
            se_yy: vec![0.0; len],
            se_xy: vec![0.0; len],
            n_realizations: 1,
        };
        let fit = fit_power_law_exponent(&est, Curve::Xx, (4, 128)).unwrap();
        assert!((fit.exponent - 0.5).abs() < 1e-12, "{}", fit.exponent);
        assert!(fit.uncertainty > 0.0);
        assert!(fit.goodness < 1e-12);
    }

    #[test]
    fn non_positive_value_refuses_fit() {
        let len = 256;
        let mut curve: Vec<f64> = (0..len).map(|n| 1.0 / (1.0 + n as f64)).collect();
        curve[10] = 0.0;
        let est = CorrelationEstimate {
            lags: (0..len).collect(),
            radii: (0..len).map(|n| n as f64).collect(),
            cxx: curve.clone(),
            cyy: curve.clone(),
            cxy: curve,
            se_xx: vec![0.0; len],
            se_yy: vec![0.0; len],
            se_xy: vec![0.0; len],
            n_realizations: 1,
        };
        match fit_power_law_exponent(&est, Curve::Xy, (4, 32)) {
            Err(Error::NonPositiveCorrelation { which, lag, .. }) => {
                assert_eq!(which, "xy");
                assert_eq!(lag, 10.0);
            }
            other => panic!("expected refusal, got {other:?}"),
        }
    }

    #[test]
    fn fit_range_validation() {
        let est = CorrelationEstimate {
            lags: (0..32).collect(),
            radii: (0..32).map(|n| n as f64).collect(),
            cxx: vec![1.0; 32],
            cyy: vec![1.0; 32],
            cxy: vec![1.0; 32],
            se_xx: vec![0.0; 32],
            se_yy: vec![0.0; 32],
            se_xy: vec![0.0; 32],
            n_realizations: 1,
        };
        assert!(fit_power_law_exponent(&est, Curve::Xx, (0, 8)).is_err());
        assert!(fit_power_law_exponent(&est, Curve::Xx, (8, 8)).is_err());
        assert!(fit_power_law_exponent(&est, Curve::Xx, (4, 32)).is_err());
    }

    #[test]
    fn default_ranges() {
        let g18 = FrequencyGrid::new(1 << 18, 1).unwrap();
        assert_eq!(default_fit_range(&g18), (4, 256));
        let g21 = FrequencyGrid::new(1 << 21, 1).unwrap();
        assert_eq!(default_fit_range(&g21), (4, 2048));
        let g10 = FrequencyGrid::new(1 << 10, 1).unwrap();
        assert_eq!(default_fit_range(&g10), (4, 8));
        let f512 = FrequencyGrid::new(512, 2).unwrap();
        assert_eq!(default_fit_range(&f512), (3, 32));
    }

    #[test]
    fn coherence_profile_bounds() {
        let grid = FrequencyGrid::new(64, 1).unwrap();
        let mut se = SpectralEstimate::new(&grid);
        for k in 0..32 {
            let (u, v) = crate::synth::white_pair(64, crate::synth::child_seed(9, k)).unwrap();
            se.push(&u, &v).unwrap();
        }
        let prof = se.coherence_profile().unwrap();
        // independent sequences: low coherence, well under 1 everywhere
        assert!(prof.iter().all(|&c| (0.0..1.0).contains(&c)));
    }
}
