//! Uniform one-dimensional grids.
//!
//! Symmetric grids place their samples so that the mirror of every sample is
//! bit-for-bit the negated coordinate of its partner. Parity operations rely
//! on this: reflecting an index must land on exactly `-x`.

use serde::Serialize;

use crate::error::{Error, Result};

/// Smallest admissible number of samples.
pub const MIN_POINTS: usize = 16;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Grid1D {
    x_min: f64,
    x_max: f64,
    n_points: usize,
    spacing: f64,
    periodic: bool,
    symmetric: bool,
}

impl Grid1D {
    /// Grid on `[x_min, x_max]`. Periodic grids omit the right endpoint.
    pub fn new(x_min: f64, x_max: f64, n_points: usize, periodic: bool) -> Result<Self> {
        if !(x_min.is_finite() && x_max.is_finite()) || x_max <= x_min {
            return Err(Error::NonPositiveDomain {
                lower: x_min,
                upper: x_max,
            });
        }
        if n_points < MIN_POINTS {
            return Err(Error::TooCoarse {
                n_points,
                min: MIN_POINTS,
            });
        }
        if periodic && n_points % 2 != 0 {
            return Err(Error::OddPeriodic(n_points));
        }
        let cells = if periodic { n_points } else { n_points - 1 };
        Ok(Self {
            x_min,
            x_max,
            n_points,
            spacing: (x_max - x_min) / cells as f64,
            periodic,
            symmetric: x_min == -x_max,
        })
    }

    /// Grid on `[-half_width, half_width]`.
    pub fn symmetric(half_width: f64, n_points: usize, periodic: bool) -> Result<Self> {
        if !(half_width > 0.0) || !half_width.is_finite() {
            return Err(Error::NonPositiveDomain {
                lower: -half_width,
                upper: half_width,
            });
        }
        Self::new(-half_width, half_width, n_points, periodic)
    }

    pub fn x_min(&self) -> f64 {
        self.x_min
    }

    pub fn x_max(&self) -> f64 {
        self.x_max
    }

    pub fn len(&self) -> usize {
        self.n_points
    }

    pub fn is_empty(&self) -> bool {
        self.n_points == 0
    }

    pub fn spacing(&self) -> f64 {
        self.spacing
    }

    pub fn is_periodic(&self) -> bool {
        self.periodic
    }

    pub fn is_symmetric(&self) -> bool {
        self.symmetric
    }

    /// Period length of a periodic grid, or the closed extent otherwise.
    pub fn length(&self) -> f64 {
        self.x_max - self.x_min
    }

    pub fn x(&self, j: usize) -> f64 {
        debug_assert!(j < self.n_points);
        if self.symmetric {
            // offsets are exact integers or half-integers, so x(mirror(j)) == -x(j)
            let centre = if self.periodic {
                (self.n_points / 2) as f64
            } else {
                (self.n_points - 1) as f64 / 2.0
            };
            (j as f64 - centre) * self.spacing
        } else {
            self.x_min + j as f64 * self.spacing
        }
    }

    pub fn points(&self) -> Vec<f64> {
        (0..self.n_points).map(|j| self.x(j)).collect()
    }

    /// Index of the sample at `-x(j)`. Periodic grids wrap `j -> (n - j) mod n`.
    pub fn mirror(&self, j: usize) -> Result<usize> {
        if !self.symmetric {
            return Err(Error::AsymmetricGrid);
        }
        Ok(if self.periodic {
            (self.n_points - j) % self.n_points
        } else {
            self.n_points - 1 - j
        })
    }

    /// Angular wavenumbers in FFT order for a periodic grid.
    pub fn wavenumbers(&self) -> Vec<f64> {
        fft_wavenumbers(self.n_points, self.length())
    }
}

pub(crate) fn fft_wavenumbers(n: usize, period: f64) -> Vec<f64> {
    let base = 2.0 * std::f64::consts::PI / period;
    (0..n)
        .map(|j| {
            let m = if j <= n / 2 {
                j as f64
            } else {
                j as f64 - n as f64
            };
            m * base
        })
        .collect()
}
