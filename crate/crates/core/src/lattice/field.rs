//! The grading parameter spline: a scalar quadratic field over the
//! macro parametric domain whose values set tile thickness or strut
//! radius.

use super::{LatticeError, Result};
use crate::spline::{KnotVector, SplineVolume};
use serde::{Deserialize, Serialize};

/// What the field values mean.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FieldUnits {
    /// Tile arm thickness as a fraction of the cell (solid tiles).
    CellFraction,
    /// Strut radius in meters (beam cells).
    Meters,
}

/// Scalar spline over `[0,1]^3`, quadratic wherever the coefficient
/// grid allows it (a direction with fewer than 3 coefficients drops to
/// the highest degree it supports).
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ParameterField {
    spline: SplineVolume,
    units: FieldUnits,
}

impl ParameterField {
    /// Builds the field from a coefficient grid (u fastest).
    pub fn new(grid: [usize; 3], coefficients: Vec<f64>, units: FieldUnits) -> Result<Self> {
        if grid.iter().any(|&n| n == 0) {
            return Err(LatticeError::BadField("empty coefficient grid".into()));
        }
        let expected = grid[0] * grid[1] * grid[2];
        if coefficients.len() != expected {
            return Err(LatticeError::BadField(format!(
                "expected {expected} coefficients, got {}",
                coefficients.len()
            )));
        }
        let kv = |n: usize| {
            let degree = 2usize.min(n - 1);
            KnotVector::uniform(degree.max(0), n.max(1), 0.0, 1.0)
        };
        // A single coefficient along a direction is a constant; model it
        // as degree 0.
        let mk = |n: usize| -> Result<KnotVector> {
            if n == 1 {
                Ok(KnotVector::new(0, vec![0.0, 1.0]).expect("degree-0 knots"))
            } else {
                kv(n).map_err(LatticeError::from)
            }
        };
        let spline = SplineVolume::new(mk(grid[0])?, mk(grid[1])?, mk(grid[2])?, 1, coefficients, None)?;
        Ok(Self { spline, units })
    }

    /// Constant field.
    pub fn constant(value: f64, units: FieldUnits) -> Self {
        Self::new([1, 1, 1], vec![value], units).expect("constant field is valid")
    }

    pub fn units(&self) -> FieldUnits {
        self.units
    }

    pub fn grid(&self) -> (usize, usize, usize) {
        self.spline.grid_size()
    }

    pub fn coefficients(&self) -> &[f64] {
        self.spline.points()
    }

    pub fn coefficients_mut(&mut self) -> &mut [f64] {
        self.spline.points_mut()
    }

    pub fn with_coefficients(&self, coeffs: &[f64]) -> Result<Self> {
        let (nu, nv, nw) = self.grid();
        Self::new([nu, nv, nw], coeffs.to_vec(), self.units)
    }

    pub fn eval(&self, u: f64, v: f64, w: f64) -> Result<f64> {
        Ok(self.spline.eval_scalar(u, v, w)?)
    }

    /// Basis weights of every coefficient at `(u,v,w)` — the row of the
    /// linear map coefficient→value, used by design sensitivities.
    pub fn basis_row(&self, u: f64, v: f64, w: f64) -> Result<Vec<f64>> {
        let (nu, nv, nw) = self.grid();
        let (fu, bu) = self.spline.knots_u.eval_basis(u).map_err(LatticeError::from)?;
        let (fv, bv) = self.spline.knots_v.eval_basis(v)?;
        let (fw, bw) = self.spline.knots_w.eval_basis(w)?;
        let mut row = vec![0.0; nu * nv * nw];
        for (kk, &cw) in bw.iter().enumerate() {
            for (jj, &cv) in bv.iter().enumerate() {
                for (ii, &cu) in bu.iter().enumerate() {
                    row[((fw + kk) * nv + (fv + jj)) * nu + (fu + ii)] = cu * cv * cw;
                }
            }
        }
        Ok(row)
    }

    /// By the convex-hull property the field stays within the
    /// coefficient range; checks that range against `[lo, hi]`.
    pub fn check_range(&self, lo: f64, hi: f64) -> Result<()> {
        for (i, &c) in self.coefficients().iter().enumerate() {
            if !(c >= lo && c <= hi) {
                return Err(LatticeError::BadField(format!(
                    "coefficient {i} = {c} outside [{lo}, {hi}]"
                )));
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn constant_field_everywhere() {
        let f = ParameterField::constant(0.2, FieldUnits::CellFraction);
        for p in [[0.0, 0.0, 0.0], [0.5, 0.3, 0.9], [1.0, 1.0, 1.0]] {
            assert!((f.eval(p[0], p[1], p[2]).unwrap() - 0.2).abs() < 1e-15);
        }
    }

    #[test]
    fn default_grading_grid_is_quadratic_spanwise() {
        let f = ParameterField::new(
            [3, 2, 2],
            vec![0.25, 0.2, 0.15, 0.25, 0.2, 0.15, 0.25, 0.2, 0.15, 0.25, 0.2, 0.15],
            FieldUnits::Meters,
        )
        .unwrap();
        // Clamped ends interpolate the first/last spanwise coefficients.
        assert!((f.eval(0.0, 0.5, 0.5).unwrap() - 0.25).abs() < 1e-15);
        assert!((f.eval(1.0, 0.5, 0.5).unwrap() - 0.15).abs() < 1e-15);
        // Values stay within the coefficient hull.
        for i in 0..=10 {
            let v = f.eval(i as f64 / 10.0, 0.5, 0.5).unwrap();
            assert!((0.15..=0.25).contains(&v));
        }
    }

    #[test]
    fn basis_row_reproduces_eval() {
        let coeffs: Vec<f64> = (0..27).map(|i| 0.1 + 0.01 * i as f64).collect();
        let f = ParameterField::new([3, 3, 3], coeffs.clone(), FieldUnits::CellFraction).unwrap();
        let (u, v, w) = (0.3, 0.7, 0.45);
        let row = f.basis_row(u, v, w).unwrap();
        let dot: f64 = row.iter().zip(&coeffs).map(|(a, b)| a * b).sum();
        assert!((dot - f.eval(u, v, w).unwrap()).abs() < 1e-14);
    }

    #[test]
    fn wrong_coefficient_count_rejected() {
        assert!(ParameterField::new([3, 2, 2], vec![0.1; 11], FieldUnits::Meters).is_err());
    }
}
