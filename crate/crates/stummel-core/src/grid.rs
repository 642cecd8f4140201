//! Log-spaced radius grids for modulus curves and norm sweeps.

use crate::error::{Error, Result};

/// Strictly increasing positive radii, geometrically spaced.
#[derive(Debug, Clone, PartialEq)]
pub struct RadialGrid {
    radii: Vec<f64>,
}

impl RadialGrid {
    /// `points` radii from `r_min` to `r_max` inclusive, equal ratios.
    pub fn logspace(r_min: f64, r_max: f64, points: usize) -> Result<RadialGrid> {
        if !(r_min > 0.0 && r_min.is_finite()) {
            return Err(Error::NonPositiveArgument(r_min));
        }
        if !(r_max > r_min && r_max.is_finite()) {
            return Err(Error::InvalidDescriptor(format!(
                "grid needs r_min < r_max, got [{r_min}, {r_max}]"
            )));
        }
        if points < 2 {
            return Err(Error::InvalidDescriptor(format!("grid needs >= 2 points, got {points}")));
        }
        let ratio = (r_max / r_min).ln() / (points - 1) as f64;
        let mut radii: Vec<f64> = (0..points).map(|i| r_min * (ratio * i as f64).exp()).collect();
        // Pin the endpoints so config round trips are exact.
        radii[0] = r_min;
        radii[points - 1] = r_max;
        Ok(RadialGrid { radii })
    }

    /// The analyzer's default window: 48 radii spanning `[1e-12, 1e2]`.
    pub fn default_grid() -> RadialGrid {
        RadialGrid::logspace(1e-12, 1e2, 48).expect("default grid parameters are valid")
    }

    /// Same endpoints with `factor` times as many subintervals.
    pub fn refine(&self, factor: usize) -> RadialGrid {
        let points = (self.radii.len() - 1) * factor.max(1) + 1;
        RadialGrid::logspace(self.r_min(), self.r_max(), points)
            .expect("refinement preserves validity")
    }

    pub fn radii(&self) -> &[f64] {
        &self.radii
    }

    pub fn r_min(&self) -> f64 {
        self.radii[0]
    }

    pub fn r_max(&self) -> f64 {
        *self.radii.last().expect("grid is nonempty")
    }

    pub fn len(&self) -> usize {
        self.radii.len()
    }

    pub fn is_empty(&self) -> bool {
        self.radii.is_empty()
    }
}
