//! Discrete frequency grid shared by spectra, coefficients and synthesis.

use crate::error::{Error, Result};

/// A d-dimensional frequency grid with `side` points per axis.
///
/// Wavenumbers per axis are `q_i = 2π m_i / side` with the signed index
/// `m_i ∈ (−side/2, side/2]` obtained from the storage index by the usual
/// wrap-around convention. The side length must be a power of two so FFT
/// behaviour is uniform across sizes.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FrequencyGrid {
    side: usize,
    dim: usize,
}

impl FrequencyGrid {
    pub fn new(side: usize, dim: usize) -> Result<Self> {
        if !side.is_power_of_two() || side < 2 {
            return Err(Error::InvalidParameter(format!(
                "side length must be a power of two >= 2, got {side}"
            )));
        }
        if dim == 0 || dim > 3 {
            return Err(Error::InvalidParameter(format!(
                "dimension must be 1..=3, got {dim} (only d in {{1,2}} is validated)"
            )));
        }
        Ok(Self { side, dim })
    }

    pub fn side(&self) -> usize {
        self.side
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Total number of grid points, `side^dim`.
    pub fn len(&self) -> usize {
        self.side.pow(self.dim as u32)
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Signed frequency index for a storage index along one axis.
    pub fn signed_index(&self, i: usize) -> i64 {
        debug_assert!(i < self.side);
        if i <= self.side / 2 {
            i as i64
        } else {
            i as i64 - self.side as i64
        }
    }

    /// Wavenumber along one axis for a storage index.
    pub fn wavenumber(&self, i: usize) -> f64 {
        2.0 * std::f64::consts::PI * self.signed_index(i) as f64 / self.side as f64
    }

    /// Minimum-image lag distance along one axis (periodic torus).
    pub fn min_image(&self, i: usize) -> usize {
        debug_assert!(i < self.side);
        i.min(self.side - i)
    }

    /// Decompose a flat row-major index into per-axis indices.
    pub fn unravel(&self, mut flat: usize, out: &mut [usize]) {
        debug_assert_eq!(out.len(), self.dim);
        for k in (0..self.dim).rev() {
            out[k] = flat % self.side;
            flat /= self.side;
        }
    }

    /// Flat index of the frequency-reversed bin `q -> -q` (per-axis negation mod side).
    pub fn negated(&self, flat: usize) -> usize {
        let mut idx = [0usize; 3];
        self.unravel(flat, &mut idx[..self.dim]);
        let mut out = 0usize;
        for k in 0..self.dim {
            let neg = if idx[k] == 0 { 0 } else { self.side - idx[k] };
            out = out * self.side + neg;
        }
        out
    }

    /// Radial wavenumber `|q|` of a flat bin.
    pub fn radial_wavenumber(&self, flat: usize) -> f64 {
        let mut idx = [0usize; 3];
        self.unravel(flat, &mut idx[..self.dim]);
        let mut s = 0.0;
        for k in 0..self.dim {
            let q = self.wavenumber(idx[k]);
            s += q * q;
        }
        s.sqrt()
    }

    /// Periodic Euclidean lag distance of a flat bin (min image per axis).
    pub fn radial_lag(&self, flat: usize) -> f64 {
        let mut idx = [0usize; 3];
        self.unravel(flat, &mut idx[..self.dim]);
        let mut s = 0.0;
        for k in 0..self.dim {
            let m = self.min_image(idx[k]) as f64;
            s += m * m;
        }
        s.sqrt()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_non_power_of_two() {
        assert!(FrequencyGrid::new(12, 1).is_err());
        assert!(FrequencyGrid::new(0, 1).is_err());
        assert!(FrequencyGrid::new(16, 0).is_err());
        assert!(FrequencyGrid::new(16, 1).is_ok());
    }

    #[test]
    fn signed_indices_span_one_period() {
        let g = FrequencyGrid::new(8, 1).unwrap();
        let m: Vec<i64> = (0..8).map(|i| g.signed_index(i)).collect();
        assert_eq!(m, vec![0, 1, 2, 3, 4, -3, -2, -1]);
    }

    #[test]
    fn negation_is_involutive() {
        let g = FrequencyGrid::new(8, 2).unwrap();
        for flat in 0..g.len() {
            assert_eq!(g.negated(g.negated(flat)), flat);
        }
        // q = 0 and per-axis Nyquist bins are self-conjugate
        assert_eq!(g.negated(0), 0);
        let nyq = 4 * 8 + 4;
        assert_eq!(g.negated(nyq), nyq);
    }

    #[test]
    fn radial_lag_uses_min_image() {
        let g = FrequencyGrid::new(8, 2).unwrap();
        // offset (7, 1) is distance sqrt(1^2 + 1^2) on the torus
        let flat = 7 * 8 + 1;
        assert!((g.radial_lag(flat) - 2.0_f64.sqrt()).abs() < 1e-12);
    }
}
