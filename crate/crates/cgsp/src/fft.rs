//! Deterministic multi-dimensional FFT with the crate's transform convention.
//!
//! The forward transform is the unnormalized sum `S(q) = Σ_n f(n) e^{-2πi q·n / L}`;
//! the inverse carries the `1/L^d` factor, so `inverse(forward(f)) = f`.

use std::sync::Arc;

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

use crate::grid::FrequencyGrid;

/// FFT plans for one grid, reusable across realizations.
pub struct GridFft {
    grid: FrequencyGrid,
    forward: Arc<dyn Fft<f64>>,
    inverse: Arc<dyn Fft<f64>>,
}

impl GridFft {
    pub fn new(grid: &FrequencyGrid) -> Self {
        let mut planner = FftPlanner::new();
        Self {
            grid: grid.clone(),
            forward: planner.plan_fft_forward(grid.side()),
            inverse: planner.plan_fft_inverse(grid.side()),
        }
    }

    pub fn grid(&self) -> &FrequencyGrid {
        &self.grid
    }

    /// In-place forward transform over every axis.
    pub fn forward(&self, data: &mut [Complex64]) {
        assert_eq!(data.len(), self.grid.len());
        self.transform(data, &self.forward);
    }

    /// In-place inverse transform over every axis, normalized by `1/L^d`.
    pub fn inverse(&self, data: &mut [Complex64]) {
        assert_eq!(data.len(), self.grid.len());
        self.transform(data, &self.inverse);
        let norm = 1.0 / self.grid.len() as f64;
        for v in data.iter_mut() {
            *v *= norm;
        }
    }

    fn transform(&self, data: &mut [Complex64], plan: &Arc<dyn Fft<f64>>) {
        let side = self.grid.side();
        let dim = self.grid.dim();
        let total = data.len();
        let mut scratch = vec![Complex64::default(); plan.get_inplace_scratch_len()];

        for axis in 0..dim {
            let stride = side.pow((dim - 1 - axis) as u32);
            if stride == 1 {
                for chunk in data.chunks_exact_mut(side) {
                    plan.process_with_scratch(chunk, &mut scratch);
                }
            } else {
                let block = stride * side;
                let mut line = vec![Complex64::default(); side];
                for base in (0..total).step_by(block) {
                    for offset in 0..stride {
                        let start = base + offset;
                        for (j, v) in line.iter_mut().enumerate() {
                            *v = data[start + j * stride];
                        }
                        plan.process_with_scratch(&mut line, &mut scratch);
                        for (j, v) in line.iter().enumerate() {
                            data[start + j * stride] = *v;
                        }
                    }
                }
            }
        }
    }
}

/// Forward transform of a real array; the returned spectrum is complex.
pub fn forward_real(fft: &GridFft, values: &[f64]) -> Vec<Complex64> {
    let mut buf: Vec<Complex64> = values.iter().map(|&v| Complex64::new(v, 0.0)).collect();
    fft.forward(&mut buf);
    buf
}
