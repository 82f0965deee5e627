//! Coupled homogeneous isotropic random fields and the self-affine surfaces
//! built from them.

use crate::error::{Error, Result};
use crate::grid::FrequencyGrid;
use crate::model::TargetModels;
use crate::spectrum::{SpectralPath, SpectralTriple};
use crate::synth::SynthesisPlan;

/// A synthesized pair of coupled fields on an `L^d` grid, row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct FieldPair {
    pub grid: FrequencyGrid,
    pub x: Vec<f64>,
    pub y: Vec<f64>,
    pub seed_used: u64,
    pub realness_residual: f64,
}

/// Two coupled rough surfaces on an `L x L` grid, row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct SurfacePair {
    pub side: usize,
    pub hx: Vec<f64>,
    pub hy: Vec<f64>,
}

/// Spectral triple of isotropic targets on a d-dimensional grid.
///
/// The fft path samples the correlations at periodic radial distances and
/// transforms; the analytic path evaluates the closed power-law form at each
/// bin's `|q|`. Coefficients built from the result depend on `q` only through
/// its radius.
pub fn radial_spectra(
    models: &TargetModels,
    grid: &FrequencyGrid,
    path: SpectralPath,
) -> Result<SpectralTriple> {
    SpectralTriple::from_models(models, grid, path)
}

/// Synthesize one pair of coupled fields; the pipeline is the sequence one
/// with d-dimensional transforms.
pub fn synthesize_field_pair(plan: &SynthesisPlan, seed: u64) -> Result<FieldPair> {
    let pair = plan.synthesize(seed)?;
    Ok(FieldPair {
        grid: plan.grid().clone(),
        x: pair.x,
        y: pair.y,
        seed_used: pair.seed_used,
        realness_residual: pair.realness_residual,
    })
}

/// Build the coupled surfaces `h(s,t) = Σ_{i<=s} x_{i,t} + Σ_{j<=t} x_{s,j}`
/// from a two-dimensional field pair.
pub fn self_affine_surface(field: &FieldPair) -> Result<SurfacePair> {
    if field.grid.dim() != 2 {
        return Err(Error::DimensionMismatch {
            need: 2,
            got: field.grid.dim(),
        });
    }
    let side = field.grid.side();
    Ok(SurfacePair {
        side,
        hx: surface_of(&field.x, side),
        hy: surface_of(&field.y, side),
    })
}

fn surface_of(values: &[f64], side: usize) -> Vec<f64> {
    // column partial sums: col[s][t] = sum_{i<=s} v[i][t]
    let mut col = values.to_vec();
    for s in 1..side {
        for t in 0..side {
            col[s * side + t] += col[(s - 1) * side + t];
        }
    }
    // row partial sums: row[s][t] = sum_{j<=t} v[s][j]
    let mut row = values.to_vec();
    for s in 0..side {
        for t in 1..side {
            row[s * side + t] += row[s * side + t - 1];
        }
    }
    col.iter().zip(&row).map(|(a, b)| a + b).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::CorrelationModel;
    use crate::synth::GeneratorConfig;

    #[test]
    fn constant_field_surface() {
        let grid = FrequencyGrid::new(4, 2).unwrap();
        let field = FieldPair {
            grid,
            x: vec![1.5; 16],
            y: vec![-2.0; 16],
            seed_used: 0,
            realness_residual: 0.0,
        };
        let s = self_affine_surface(&field).unwrap();
        for i in 0..4 {
            for j in 0..4 {
                // with 1-based indices of the defining sum, h = c (s + t)
                let expect = 1.5 * ((i + 1) + (j + 1)) as f64;
                assert_eq!(s.hx[i * 4 + j], expect);
                assert_eq!(s.hy[i * 4 + j], -2.0 * ((i + 1) + (j + 1)) as f64);
            }
        }
    }

    #[test]
    fn sparse_field_surface_hand_check() {
        // only x[0][1] = 1; h(s,t) = [t >= 1] + [s == 0]
        let grid = FrequencyGrid::new(4, 2).unwrap();
        let mut x = vec![0.0; 16];
        x[1] = 1.0;
        let field = FieldPair {
            grid,
            x,
            y: vec![0.0; 16],
            seed_used: 0,
            realness_residual: 0.0,
        };
        let s = self_affine_surface(&field).unwrap();
        for si in 0..4 {
            for t in 0..4 {
                let col = if t == 1 { 1.0 } else { 0.0 };
                let row = if si == 0 && t >= 1 { 1.0 } else { 0.0 };
                assert_eq!(s.hx[si * 4 + t], col + row, "s={si} t={t}");
            }
        }
    }

    #[test]
    fn surface_is_linear_in_the_field() {
        let grid = FrequencyGrid::new(16, 2).unwrap();
        let mk = |seed: u64| {
            let targets = TargetModels::new(
                CorrelationModel::power_law(0.7, 1.0).unwrap(),
                CorrelationModel::power_law(0.9, 1.0).unwrap(),
                CorrelationModel::power_law(0.8, 0.1).unwrap(),
            )
            .unwrap();
            let plan = GeneratorConfig::new(grid.clone(), targets, SpectralPath::Fft, seed, 1)
                .unwrap()
                .plan()
                .unwrap();
            synthesize_field_pair(&plan, seed).unwrap()
        };
        let f1 = mk(1);
        let f2 = mk(2);
        let mut sum = f1.clone();
        for i in 0..sum.x.len() {
            sum.x[i] += f2.x[i];
            sum.y[i] += f2.y[i];
        }
        let s1 = self_affine_surface(&f1).unwrap();
        let s2 = self_affine_surface(&f2).unwrap();
        let s12 = self_affine_surface(&sum).unwrap();
        for i in 0..s12.hx.len() {
            assert!((s12.hx[i] - s1.hx[i] - s2.hx[i]).abs() < 1e-10);
        }
    }

    #[test]
    fn surface_requires_two_dimensions() {
        let grid = FrequencyGrid::new(16, 1).unwrap();
        let field = FieldPair {
            grid,
            x: vec![0.0; 16],
            y: vec![0.0; 16],
            seed_used: 0,
            realness_residual: 0.0,
        };
        assert!(matches!(
            self_affine_surface(&field),
            Err(Error::DimensionMismatch { need: 2, got: 1 })
        ));
    }

    #[test]
    fn coefficients_are_isotropic() {
        let grid = FrequencyGrid::new(16, 2).unwrap();
        let targets = TargetModels::new(
            CorrelationModel::power_law(0.7, 1.0).unwrap(),
            CorrelationModel::power_law(0.9, 1.0).unwrap(),
            CorrelationModel::power_law(0.8, 0.1).unwrap(),
        )
        .unwrap();
        for path in [SpectralPath::Fft, SpectralPath::Analytic] {
            let triple = radial_spectra(&targets, &grid, path).unwrap();
            let plan = SynthesisPlan::new(triple).unwrap();
            let cs = plan.coefficients();
            // bins (1,0) and (0,1) share |q|; so do (3,4) and (5,0)
            assert_eq!(cs.a[16], cs.a[1], "{path:?}");
            assert_eq!(cs.c[16], cs.c[1], "{path:?}");
            if path == SpectralPath::Fft {
                assert_eq!(cs.a[3 * 16 + 4], cs.a[5 * 16]);
            }
        }
    }
}
