//! Gamma and modified Bessel functions used by the closed-form power-law spectrum.
//!
//! `bessel_k` combines the small-argument Temme series with the Steed
//! continued fraction for large arguments, joined by upward recurrence in the
//! order. It is independent of the quadrature evaluation in [`crate::oracle`],
//! which the tests use to cross-check it.

use crate::error::{Error, Result};

const LANCZOS_G: f64 = 7.0;
const LANCZOS_COEF: [f64; 9] = [
    0.999_999_999_999_809_9,
    676.520_368_121_885_1,
    -1_259.139_216_722_402_8,
    771.323_428_777_653_1,
    -176.615_029_162_140_6,
    12.507_343_278_686_905,
    -0.138_571_095_265_720_12,
    9.984_369_578_019_572e-6,
    1.505_632_735_149_311_6e-7,
];

/// Gamma function by the Lanczos approximation (g = 7, 9 terms), with
/// reflection for arguments below 1/2. Relative accuracy ~1e-14 away from poles.
pub fn gamma(x: f64) -> Result<f64> {
    if !x.is_finite() {
        return Err(Error::InvalidParameter(format!("gamma of non-finite {x}")));
    }
    if x <= 0.0 && x == x.floor() {
        return Err(Error::GammaPole { argument: x });
    }
    if x < 0.5 {
        // reflection: Γ(x) Γ(1-x) = π / sin(πx)
        let s = (std::f64::consts::PI * x).sin();
        if s == 0.0 {
            return Err(Error::GammaPole { argument: x });
        }
        return Ok(std::f64::consts::PI / (s * gamma(1.0 - x)?));
    }
    let x = x - 1.0;
    let mut acc = LANCZOS_COEF[0];
    for (i, c) in LANCZOS_COEF.iter().enumerate().skip(1) {
        acc += c / (x + i as f64);
    }
    let t = x + LANCZOS_G + 0.5;
    Ok((2.0 * std::f64::consts::PI).sqrt() * t.powf(x + 0.5) * (-t).exp() * acc)
}

/// Modified Bessel function of the second kind, K_nu(x), for x > 0.
///
/// The order is symmetrized (K_{-nu} = K_nu). Supported up to |nu| ~ 5, which
/// covers every order the spectral formulas produce for d <= 3.
pub fn bessel_k(nu: f64, x: f64) -> Result<f64> {
    if !x.is_finite() || x <= 0.0 || !nu.is_finite() {
        return Err(Error::InvalidParameter(format!("bessel_k(nu={nu}, x={x})")));
    }
    let nu = nu.abs();
    let steps = (nu + 0.5).floor() as usize;
    let mu = nu - steps as f64; // |mu| <= 1/2
    let (k_mu, k_mu1) = if x <= 2.0 {
        k_temme(mu, x)
    } else {
        k_steed(mu, x)
    };
    // upward recurrence K_{m+1} = (2m/x) K_m + K_{m-1}
    let (mut lo, mut hi) = (k_mu, k_mu1);
    for j in 0..steps {
        let next = 2.0 * (mu + j as f64 + 1.0) / x * hi + lo;
        lo = hi;
        hi = next;
    }
    Ok(lo)
}

/// Series evaluation of (K_mu, K_{mu+1}) for 0 < x <= 2, |mu| <= 1/2.
///
/// Derived from the defining series of I_{±mu}: with
/// P_k = π/(2 sin μπ) (x/2)^{-μ}/Γ(k+1-μ), Q_k the mirrored term and
/// f_k = P_k - Q_k, one has K_μ = Σ c_k f_k and K_{μ+1} = (2/x) Σ c_k (μP_k - k f_k)
/// with c_k = (x²/4)^k / k!.
fn k_temme(mu: f64, x: f64) -> (f64, f64) {
    let half_x = 0.5 * x;
    let log_ratio = -half_x.ln(); // ln(2/x)
    let sigma = mu * log_ratio;
    let gampl = inv_gamma_1p(mu); // 1/Γ(1+μ)
    let gammi = inv_gamma_1p(-mu); // 1/Γ(1-μ)
    let gam1 = if mu.abs() < 1e-6 {
        // (1/Γ(1-μ) - 1/Γ(1+μ)) / (2μ) -> -(a1 + a3 μ² + ...)
        -(INV_GAMMA_SERIES[1] + INV_GAMMA_SERIES[3] * mu * mu)
    } else {
        (gammi - gampl) / (2.0 * mu)
    };
    let gam2 = 0.5 * (gammi + gampl);
    let pimu = std::f64::consts::PI * mu;
    let fact = if pimu.abs() < 1e-12 {
        1.0
    } else {
        pimu / pimu.sin()
    };
    let fact2 = if sigma.abs() < 1e-12 {
        1.0
    } else {
        sigma.sinh() / sigma
    };

    let mut f = fact * (gam1 * sigma.cosh() + gam2 * fact2 * log_ratio);
    let e = sigma.exp(); // (2/x)^μ
    let mut p = 0.5 * e / gampl;
    let mut q = 0.5 / (e * gammi);
    let mut c = 1.0;
    let d2 = half_x * half_x;
    let mut sum = f;
    let mut sum1 = p;
    for k in 1..=200 {
        let kf = k as f64;
        f = (kf * f + p + q) / (kf * kf - mu * mu);
        c *= d2 / kf;
        p /= kf - mu;
        q /= kf + mu;
        let del = c * f;
        sum += del;
        sum1 += c * (p - kf * f);
        if del.abs() < sum.abs() * 1e-16 {
            break;
        }
    }
    (sum, sum1 * 2.0 / x)
}

/// Steed/Thompson-Barnett continued fraction for (K_mu, K_{mu+1}), x > 2, |mu| <= 1/2.
fn k_steed(mu: f64, x: f64) -> (f64, f64) {
    let a1 = 0.25 - mu * mu;
    let mut b = 2.0 * (1.0 + x);
    let mut d = 1.0 / b;
    let mut delh = d;
    let mut h = d;
    let mut q1 = 0.0;
    let mut q2 = 1.0;
    let mut a = -a1;
    let mut c = a1;
    let mut q = c;
    let mut s = 1.0 + q * delh;
    for i in 2..=20000 {
        a -= 2.0 * (i as f64 - 1.0);
        c = -a * c / i as f64;
        let qnew = (q1 - b * q2) / a;
        q1 = q2;
        q2 = qnew;
        q += c * qnew;
        b += 2.0;
        d = 1.0 / (b + a * d);
        delh *= b * d - 1.0;
        h += delh;
        let dels = q * delh;
        s += dels;
        if (dels / s).abs() < 1e-16 {
            break;
        }
    }
    h *= a1;
    let k_mu = (std::f64::consts::PI / (2.0 * x)).sqrt() * (-x).exp() / s;
    let k_mu1 = k_mu * (mu + x + 0.5 - h) / x;
    (k_mu, k_mu1)
}

// Taylor coefficients of 1/Γ(1+x) around 0 (Abramowitz & Stegun 6.1.34).
const INV_GAMMA_SERIES: [f64; 15] = [
    1.0,
    0.577_215_664_901_532_9,
    -0.655_878_071_520_253_8,
    -0.042_002_635_034_095_24,
    0.166_538_611_382_291_5,
    -0.042_197_734_555_544_34,
    -0.009_621_971_527_876_973,
    0.007_218_943_246_663_1,
    -0.001_165_167_591_859_065,
    -0.000_215_241_674_114_951,
    0.000_128_050_282_388_116_2,
    -0.000_020_134_854_780_788_24,
    -0.000_001_250_493_482_142_67,
    0.000_001_133_027_231_981_696,
    -0.000_000_205_633_841_697_761,
];

/// 1/Γ(1+x) for |x| <= 1/2, used where the Lanczos form would cancel.
fn inv_gamma_1p(x: f64) -> f64 {
    debug_assert!(x.abs() <= 0.5 + 1e-12);
    let mut acc = 0.0;
    for &c in INV_GAMMA_SERIES.iter().rev() {
        acc = acc * x + c;
    }
    acc
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gamma_known_values() {
        assert!((gamma(1.0).unwrap() - 1.0).abs() < 1e-13);
        assert!((gamma(0.5).unwrap() - std::f64::consts::PI.sqrt()).abs() < 1e-13);
        assert!((gamma(5.0).unwrap() - 24.0).abs() < 1e-11);
        // reflection branch
        let g = gamma(-0.5).unwrap();
        assert!((g - (-2.0 * std::f64::consts::PI.sqrt())).abs() < 1e-12);
        assert!(gamma(0.0).is_err());
        assert!(gamma(-2.0).is_err());
    }

    #[test]
    fn inv_gamma_series_matches_lanczos() {
        for &x in &[-0.5, -0.3, -0.05, 0.0, 0.07, 0.25, 0.5] {
            let direct = 1.0 / gamma(1.0 + x).unwrap();
            assert!(
                (inv_gamma_1p(x) - direct).abs() < 1e-12,
                "x={x}: {} vs {}",
                inv_gamma_1p(x),
                direct
            );
        }
    }

    #[test]
    fn bessel_k_half_order_closed_form() {
        // K_{1/2}(x) = sqrt(pi/(2x)) e^{-x}
        for &x in &[0.1, 0.5, 1.0, 2.0, 3.0, 10.0] {
            let expect = (std::f64::consts::PI / (2.0 * x)).sqrt() * (-x).exp();
            let got = bessel_k(0.5, x).unwrap();
            assert!(
                ((got - expect) / expect).abs() < 1e-10,
                "x={x}: {got} vs {expect}"
            );
        }
    }

    #[test]
    fn bessel_k_even_in_order() {
        for &x in &[0.3, 1.7, 4.0] {
            let a = bessel_k(-0.15, x).unwrap();
            let b = bessel_k(0.15, x).unwrap();
            assert!((a - b).abs() < 1e-15 * a.abs().max(1.0));
        }
    }

    #[test]
    fn bessel_k_positive_and_decreasing() {
        for &nu in &[0.0, 0.15, 0.45, 0.9, 1.5, 2.5] {
            let mut prev = f64::INFINITY;
            for i in 1..40 {
                let x = 0.05 * i as f64;
                let k = bessel_k(nu, x).unwrap();
                assert!(k > 0.0 && k < prev, "nu={nu} x={x}");
                prev = k;
            }
        }
    }

    #[test]
    fn bessel_k_rejects_bad_args() {
        assert!(bessel_k(0.3, 0.0).is_err());
        assert!(bessel_k(0.3, -1.0).is_err());
    }
}
