use crate::error::{Error, Result};

/// Uniform grid with an odd number of points, so that the center is a grid
/// point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Grid1D {
    n_points: usize,
    spacing: f64,
    center: f64,
}

impl Grid1D {
    pub fn new(n_points: usize, spacing: f64) -> Result<Self> {
        Self::with_center(n_points, spacing, 0.0)
    }

    pub fn with_center(n_points: usize, spacing: f64, center: f64) -> Result<Self> {
        if n_points < 3 || n_points.is_multiple_of(2) {
            return Err(Error::InvalidParameter(format!(
                "grid needs an odd number of points >= 3, got {n_points}"
            )));
        }
        if !(spacing > 0.0 && spacing.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "grid spacing must be positive, got {spacing}"
            )));
        }
        Ok(Self {
            n_points,
            spacing,
            center,
        })
    }

    pub fn n_points(&self) -> usize {
        self.n_points
    }

    pub fn spacing(&self) -> f64 {
        self.spacing
    }

    pub fn center(&self) -> f64 {
        self.center
    }

    pub fn coordinate(&self, i: usize) -> f64 {
        self.center + (i as f64 - (self.n_points - 1) as f64 / 2.0) * self.spacing
    }

    pub fn coordinates(&self) -> impl ExactSizeIterator<Item = f64> + '_ {
        (0..self.n_points).map(move |i| self.coordinate(i))
    }

    /// Distance between the hard walls (one spacing beyond each end point).
    pub fn box_length(&self) -> f64 {
        (self.n_points + 1) as f64 * self.spacing
    }

    pub(crate) fn kinetic_diagonal(&self) -> f64 {
        1.0 / (self.spacing * self.spacing)
    }

    pub(crate) fn kinetic_offdiagonal(&self) -> f64 {
        -0.5 / (self.spacing * self.spacing)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn odd_points_put_origin_on_grid() {
        let g = Grid1D::new(301, 0.1).unwrap();
        assert_eq!(g.coordinate(150), 0.0);
        assert!((g.coordinate(0) + 15.0).abs() < 1e-12);
        assert!((g.coordinate(300) - 15.0).abs() < 1e-12);
    }

    #[test]
    fn rejects_even_or_degenerate() {
        assert!(Grid1D::new(300, 0.1).is_err());
        assert!(Grid1D::new(1, 0.1).is_err());
        assert!(Grid1D::new(301, 0.0).is_err());
    }
}
