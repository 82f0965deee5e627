//! Brute-force ground truth for small problem sizes: the exact joint
//! covariance implied by the targets, exact-law Gaussian sampling from it,
//! the covariance a coefficient set actually generates, and a quadrature
//! Bessel evaluation independent of [`crate::specfun`].
//!
//! Everything here is desk-scale by design (dense 2L x 2L matrices) and is
//! meant for tests and verification, not production synthesis.

use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::coupling::CoefficientSet;
use crate::error::{Error, Result};
use crate::fft::GridFft;
use crate::grid::FrequencyGrid;
use crate::model::{sample_correlation, TargetModels};

/// Largest sequence length the dense oracle accepts.
pub const MAX_ORACLE_LEN: usize = 64;

/// Diagonal jitter allowed before a factorization failure counts as evidence
/// of infeasibility.
pub const CHOLESKY_JITTER: f64 = 1e-10;

/// The 2L x 2L joint covariance of `(x_0..x_{L-1}, y_0..y_{L-1})` in block
/// form `[[Σ_xx, Σ_xy], [Σ_xy^T, Σ_yy]]`, each block circulant.
#[derive(Debug, Clone)]
pub struct JointCovariance {
    pub len: usize,
    /// Row-major `(2L)²` matrix.
    pub matrix: Vec<f64>,
}

impl JointCovariance {
    pub fn order(&self) -> usize {
        2 * self.len
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.matrix[i * self.order() + j]
    }

    fn from_blocks(len: usize, cxx: &[f64], cyy: &[f64], cxy: &[f64]) -> Self {
        let order = 2 * len;
        let mut matrix = vec![0.0; order * order];
        for i in 0..len {
            for j in 0..len {
                let lag = (j + len - i) % len;
                matrix[i * order + j] = cxx[lag];
                matrix[(len + i) * order + (len + j)] = cyy[lag];
                matrix[i * order + (len + j)] = cxy[lag];
                matrix[(len + j) * order + i] = cxy[lag];
            }
        }
        Self { len, matrix }
    }

    /// Largest absolute entrywise difference to another covariance.
    pub fn max_abs_diff(&self, other: &JointCovariance) -> f64 {
        self.matrix
            .iter()
            .zip(&other.matrix)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }
}

/// Tabulate the block-circulant joint covariance of the target models:
/// `Σ_xx[i][j] = C_xx((j-i) mod L)` and likewise for yy and xy.
pub fn build_joint_covariance(models: &TargetModels, len: usize) -> Result<JointCovariance> {
    check_len(len)?;
    let grid = FrequencyGrid::new(len, 1)?;
    let cxx = sample_correlation(&models.xx, &grid)?;
    let cyy = sample_correlation(&models.yy, &grid)?;
    let cxy = sample_correlation(&models.xy, &grid)?;
    Ok(JointCovariance::from_blocks(len, &cxx, &cyy, &cxy))
}

/// The covariance the linear mixing actually produces: unit white-noise
/// covariance propagated through the coefficients and the inverse transform,
/// with no sampling. For a correct pipeline this equals
/// [`build_joint_covariance`] of the targets.
pub fn exact_generator_covariance(cs: &CoefficientSet) -> Result<JointCovariance> {
    let len = cs.grid.len();
    check_len(len)?;
    if cs.grid.dim() != 1 {
        return Err(Error::DimensionMismatch {
            need: 1,
            got: cs.grid.dim(),
        });
    }
    let fft = GridFft::new(&cs.grid);
    let mut sxx = Vec::with_capacity(len);
    let mut syy = Vec::with_capacity(len);
    let mut sxy = Vec::with_capacity(len);
    for i in 0..len {
        sxx.push(Complex64::new(cs.a[i].norm_sqr() + cs.b[i].norm_sqr(), 0.0));
        syy.push(Complex64::new(cs.c[i].norm_sqr() + cs.d[i].norm_sqr(), 0.0));
        sxy.push(cs.a[i].conj() * cs.c[i] + cs.b[i].conj() * cs.d[i]);
    }
    fft.inverse(&mut sxx);
    fft.inverse(&mut syy);
    fft.inverse(&mut sxy);
    let take_re = |v: Vec<Complex64>| -> Vec<f64> { v.into_iter().map(|z| z.re).collect() };
    Ok(JointCovariance::from_blocks(
        len,
        &take_re(sxx),
        &take_re(syy),
        &take_re(sxy),
    ))
}

/// Exact-law samples of the joint Gaussian: `z = G ξ` with `G` the Cholesky
/// factor of the covariance (jittered if needed) and `ξ` i.i.d. standard
/// normal. Returns `count` pairs of length-L arrays.
pub fn oracle_sample(
    cov: &JointCovariance,
    count: usize,
    seed: u64,
) -> Result<Vec<(Vec<f64>, Vec<f64>)>> {
    let factor = cholesky_with_jitter(&cov.matrix, cov.order())?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let order = cov.order();
    let mut out = Vec::with_capacity(count);
    let mut xi = vec![0.0; order];
    for _ in 0..count {
        for v in xi.iter_mut() {
            *v = StandardNormal.sample(&mut rng);
        }
        let mut z = vec![0.0; order];
        for i in 0..order {
            let mut acc = 0.0;
            for k in 0..=i {
                acc += factor[i * order + k] * xi[k];
            }
            z[i] = acc;
        }
        let y = z.split_off(cov.len);
        out.push((z, y));
    }
    Ok(out)
}

/// Lower-triangular Cholesky factor, allowing up to [`CHOLESKY_JITTER`] of
/// relative diagonal slack so PSD matrices on the rank-deficient boundary
/// still factor. A pivot below the slack is infeasibility evidence.
fn cholesky_with_jitter(matrix: &[f64], order: usize) -> Result<Vec<f64>> {
    let scale = (0..order)
        .map(|i| matrix[i * order + i])
        .fold(0.0_f64, f64::max);
    let jitter = CHOLESKY_JITTER * scale.max(f64::MIN_POSITIVE);
    let mut factor = vec![0.0; order * order];
    for i in 0..order {
        for j in 0..=i {
            let mut acc = matrix[i * order + j];
            for k in 0..j {
                acc -= factor[i * order + k] * factor[j * order + k];
            }
            if i == j {
                if acc < -jitter {
                    return Err(Error::FactorizationFailed {
                        pivot: i,
                        value: acc,
                    });
                }
                factor[i * order + i] = acc.max(jitter).sqrt();
            } else {
                factor[i * order + j] = acc / factor[j * order + j];
            }
        }
    }
    Ok(factor)
}

/// Eigenvalues of a symmetric matrix by cyclic Jacobi rotations. Dense and
/// slow; used to certify positive semidefiniteness in tests.
pub fn symmetric_eigenvalues(matrix: &[f64], order: usize) -> Vec<f64> {
    let mut a = matrix.to_vec();
    for _sweep in 0..100 {
        let mut off = 0.0;
        for i in 0..order {
            for j in (i + 1)..order {
                off += a[i * order + j] * a[i * order + j];
            }
        }
        if off.sqrt() < 1e-14 * (1.0 + frobenius(&a, order)) {
            break;
        }
        for p in 0..order {
            for q in (p + 1)..order {
                let apq = a[p * order + q];
                if apq.abs() < 1e-300 {
                    continue;
                }
                let app = a[p * order + p];
                let aqq = a[q * order + q];
                let theta = 0.5 * (aqq - app) / apq;
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for k in 0..order {
                    let akp = a[k * order + p];
                    let akq = a[k * order + q];
                    a[k * order + p] = c * akp - s * akq;
                    a[k * order + q] = s * akp + c * akq;
                }
                for k in 0..order {
                    let apk = a[p * order + k];
                    let aqk = a[q * order + k];
                    a[p * order + k] = c * apk - s * aqk;
                    a[q * order + k] = s * apk + c * aqk;
                }
            }
        }
    }
    let mut eig: Vec<f64> = (0..order).map(|i| a[i * order + i]).collect();
    eig.sort_by(|x, y| x.partial_cmp(y).unwrap());
    eig
}

fn frobenius(a: &[f64], order: usize) -> f64 {
    a.iter()
        .take(order * order)
        .map(|v| v * v)
        .sum::<f64>()
        .sqrt()
}

/// Modified Bessel K_nu(x) by adaptive Simpson quadrature of
/// `∫_0^∞ e^{-x cosh t} cosh(νt) dt`, to ~1e-8 relative accuracy.
///
/// Independent of the series/continued-fraction evaluation in
/// [`crate::specfun::bessel_k`]; the two cross-check each other in tests.
pub fn bessel_k_numeric(nu: f64, x: f64) -> Result<f64> {
    if !x.is_finite() || x <= 0.0 {
        return Err(Error::InvalidParameter(format!(
            "bessel_k_numeric needs x > 0, got {x}"
        )));
    }
    if !nu.is_finite() || nu.abs() >= 5.0 {
        return Err(Error::InvalidParameter(format!(
            "bessel_k_numeric supports |nu| < 5, got {nu}"
        )));
    }
    let integrand = |t: f64| (-x * t.cosh()).exp() * (nu * t).cosh();
    // grow the cutoff until the integrand has decayed below any contribution
    let mut upper = 1.0_f64;
    while x * upper.cosh() - nu.abs() * upper < 45.0 + x && upper < 750.0 {
        upper += 0.5;
    }
    let mut total = 0.0;
    let mut converged = false;
    let mut panels = 64usize;
    let mut prev = simpson(&integrand, 0.0, upper, panels);
    while panels <= (1 << 22) {
        panels *= 2;
        total = simpson(&integrand, 0.0, upper, panels);
        if (total - prev).abs() <= 1e-10 * total.abs().max(f64::MIN_POSITIVE) {
            converged = true;
            break;
        }
        prev = total;
    }
    if !converged {
        return Err(Error::QuadratureFailed { nu, x });
    }
    Ok(total)
}

fn simpson(f: &impl Fn(f64) -> f64, a: f64, b: f64, panels: usize) -> f64 {
    let h = (b - a) / panels as f64;
    let mut acc = f(a) + f(b);
    for i in 1..panels {
        let w = if i % 2 == 1 { 4.0 } else { 2.0 };
        acc += w * f(a + i as f64 * h);
    }
    acc * h / 3.0
}

fn check_len(len: usize) -> Result<()> {
    if len > MAX_ORACLE_LEN {
        return Err(Error::InvalidParameter(format!(
            "oracle is limited to L <= {MAX_ORACLE_LEN}, got {len}"
        )));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{CorrelationFamily, CorrelationModel};

    fn white_triple(cross: f64) -> TargetModels {
        TargetModels::new(
            CorrelationModel::white(1.0).unwrap(),
            CorrelationModel::white(1.0).unwrap(),
            CorrelationModel::white(cross).unwrap(),
        )
        .unwrap()
    }

    fn gaussian_coupling(width: f64, amplitude: f64) -> TargetModels {
        TargetModels::new(
            CorrelationModel::white(1.0).unwrap(),
            CorrelationModel::white(1.0).unwrap(),
            CorrelationModel::new(CorrelationFamily::Gaussian { width }, amplitude).unwrap(),
        )
        .unwrap()
    }

    #[test]
    fn white_targets_give_identity() {
        let cov = build_joint_covariance(&white_triple(0.0), 8).unwrap();
        for i in 0..16 {
            for j in 0..16 {
                let expect = if i == j { 1.0 } else { 0.0 };
                assert_eq!(cov.get(i, j), expect);
            }
        }
    }

    #[test]
    fn perfect_coupling_is_rank_deficient_psd() {
        let models = TargetModels::new(
            CorrelationModel::white(1.0).unwrap(),
            CorrelationModel::white(1.0).unwrap(),
            CorrelationModel::white(1.0).unwrap(),
        )
        .unwrap();
        let cov = build_joint_covariance(&models, 8).unwrap();
        // Σ_xy equals Σ_xx, so [x; y] has rank L
        let eig = symmetric_eigenvalues(&cov.matrix, cov.order());
        assert!(eig[0] > -1e-10, "smallest eigenvalue {}", eig[0]);
        assert!(eig.iter().filter(|&&e| e.abs() < 1e-9).count() >= 8);
        // still factors thanks to the jitter, and samples obey x = y
        let samples = oracle_sample(&cov, 4, 3).unwrap();
        for (x, y) in samples {
            for (a, b) in x.iter().zip(&y) {
                assert!((a - b).abs() < 1e-4, "{a} vs {b}");
            }
        }
    }

    #[test]
    fn gaussian_coupling_covariance_is_psd() {
        let cov = build_joint_covariance(&gaussian_coupling(2.0, 0.15), 8).unwrap();
        let eig = symmetric_eigenvalues(&cov.matrix, cov.order());
        assert!(eig[0] >= -1e-10, "smallest eigenvalue {}", eig[0]);
    }

    #[test]
    fn zero_covariance_samples_are_zero() {
        let cov = JointCovariance {
            len: 4,
            matrix: vec![0.0; 64],
        };
        let samples = oracle_sample(&cov, 3, 1).unwrap();
        for (x, y) in samples {
            assert!(x.iter().chain(&y).all(|&v| v.abs() < 1e-4));
        }
    }

    #[test]
    fn identity_covariance_moments() {
        let len = 8;
        let order = 2 * len;
        let mut matrix = vec![0.0; order * order];
        for i in 0..order {
            matrix[i * order + i] = 1.0;
        }
        let cov = JointCovariance { len, matrix };
        let n = 4000;
        let samples = oracle_sample(&cov, n, 11).unwrap();
        let mut mean = 0.0;
        let mut var = 0.0;
        for (x, y) in &samples {
            for v in x.iter().chain(y) {
                mean += v;
                var += v * v;
            }
        }
        let count = (n * order) as f64;
        mean /= count;
        var /= count;
        assert!(mean.abs() < 0.02, "mean {mean}");
        assert!((var - 1.0).abs() < 0.05, "var {var}");
    }

    #[test]
    fn infeasible_covariance_fails_to_factor() {
        let models = white_triple(1.3);
        let cov = build_joint_covariance(&models, 8).unwrap();
        assert!(matches!(
            oracle_sample(&cov, 1, 0),
            Err(Error::FactorizationFailed { .. })
        ));
    }

    #[test]
    fn oracle_len_capped() {
        assert!(build_joint_covariance(&white_triple(0.0), 128).is_err());
    }

    #[test]
    fn quadrature_bessel_half_order() {
        let expect = (std::f64::consts::PI / 2.0).sqrt() * (-1.0_f64).exp();
        let got = bessel_k_numeric(0.5, 1.0).unwrap();
        assert!(((got - expect) / expect).abs() < 1e-8, "{got} vs {expect}");
    }

    #[test]
    fn quadrature_bessel_even_in_order() {
        let a = bessel_k_numeric(-0.15, 1.0).unwrap();
        let b = bessel_k_numeric(0.15, 1.0).unwrap();
        assert!(((a - b) / b).abs() < 1e-12);
    }

    #[test]
    fn quadrature_agrees_with_series_evaluation() {
        // dual-route agreement across the supported order range
        for &nu in &[0.0, 0.15, 0.25, 0.45, 0.5, 0.7, 0.9, 1.3, 2.5, 4.5] {
            for &x in &[0.05, 0.3, 1.0, 2.0, 2.5, 6.0, 20.0] {
                let q = bessel_k_numeric(nu, x).unwrap();
                let s = crate::specfun::bessel_k(nu, x).unwrap();
                assert!(
                    ((q - s) / s).abs() < 1e-6,
                    "nu={nu} x={x}: quadrature {q} vs series {s}"
                );
            }
        }
    }

    #[test]
    fn quadrature_rejects_bad_arguments() {
        assert!(bessel_k_numeric(0.3, 0.0).is_err());
        assert!(bessel_k_numeric(0.3, -2.0).is_err());
        assert!(bessel_k_numeric(5.5, 1.0).is_err());
    }
}
