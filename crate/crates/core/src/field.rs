//! Complex samples on a [`Grid1D`], with an optional validity mask.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::grid::Grid1D;

/// Complex-valued samples of a wavefunction, potential or residual.
///
/// A field may carry a mask marking samples that are excluded from every
/// norm, extremum and parity comparison (samples too close to a pole, or
/// samples poisoned by a boundary stencil). Masked samples are stored as zero.
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexField {
    grid: Grid1D,
    values: Vec<Complex64>,
    mask: Option<Vec<bool>>,
}

impl ComplexField {
    pub fn new(grid: Grid1D, values: Vec<Complex64>) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(Error::LengthMismatch {
                expected: grid.len(),
                got: values.len(),
            });
        }
        if let Some(j) = values
            .iter()
            .position(|v| !(v.re.is_finite() && v.im.is_finite()))
        {
            return Err(Error::NonFinite(j));
        }
        Ok(Self {
            grid,
            values,
            mask: None,
        })
    }

    /// Field with an explicit validity mask (`true` = sample is used).
    pub fn with_mask(grid: Grid1D, mut values: Vec<Complex64>, mask: Vec<bool>) -> Result<Self> {
        if values.len() != grid.len() || mask.len() != grid.len() {
            return Err(Error::LengthMismatch {
                expected: grid.len(),
                got: values.len().min(mask.len()),
            });
        }
        for (j, (v, &ok)) in values.iter_mut().zip(&mask).enumerate() {
            if !ok {
                *v = Complex64::new(0.0, 0.0);
            } else if !(v.re.is_finite() && v.im.is_finite()) {
                return Err(Error::NonFinite(j));
            }
        }
        let mask = if mask.iter().all(|&m| m) {
            None
        } else {
            Some(mask)
        };
        Ok(Self { grid, values, mask })
    }

    pub fn from_fn(grid: Grid1D, f: impl Fn(f64) -> Complex64) -> Result<Self> {
        let values = grid.points().into_iter().map(f).collect();
        Self::new(grid, values)
    }

    pub fn zeros(grid: Grid1D) -> Self {
        Self {
            grid,
            values: vec![Complex64::new(0.0, 0.0); grid.len()],
            mask: None,
        }
    }

    pub fn grid(&self) -> &Grid1D {
        &self.grid
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<Complex64> {
        self.values
    }

    pub fn mask(&self) -> Option<&[bool]> {
        self.mask.as_deref()
    }

    pub fn is_masked(&self) -> bool {
        self.mask.is_some()
    }

    pub fn is_valid(&self, j: usize) -> bool {
        self.mask.as_ref().map_or(true, |m| m[j])
    }

    /// Indices of unmasked samples.
    pub fn valid_indices(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.values.len()).filter(move |&j| self.is_valid(j))
    }

    /// Largest modulus over unmasked samples.
    pub fn max_abs(&self) -> f64 {
        self.valid_indices()
            .map(|j| self.values[j].norm())
            .fold(0.0, f64::max)
    }

    /// Elementwise map that keeps grid and mask.
    pub fn map(&self, f: impl Fn(f64, Complex64) -> Complex64) -> Self {
        let values = self
            .values
            .iter()
            .enumerate()
            .map(|(j, &v)| {
                if self.is_valid(j) {
                    f(self.grid.x(j), v)
                } else {
                    Complex64::new(0.0, 0.0)
                }
            })
            .collect();
        Self {
            grid: self.grid,
            values,
            mask: self.mask.clone(),
        }
    }

    pub(crate) fn with_values(&self, values: Vec<Complex64>) -> Self {
        debug_assert_eq!(values.len(), self.values.len());
        Self {
            grid: self.grid,
            values,
            mask: self.mask.clone(),
        }
    }

    /// Narrows the mask to exclude the given x-intervals (closed).
    pub fn exclude(&self, intervals: &[(f64, f64)]) -> Self {
        let mut mask: Vec<bool> = (0..self.values.len()).map(|j| self.is_valid(j)).collect();
        for (j, m) in mask.iter_mut().enumerate() {
            let x = self.grid.x(j);
            if intervals.iter().any(|&(lo, hi)| x >= lo && x <= hi) {
                *m = false;
            }
        }
        let mut values = self.values.clone();
        for (v, &m) in values.iter_mut().zip(&mask) {
            if !m {
                *v = Complex64::new(0.0, 0.0);
            }
        }
        let mask = if mask.iter().all(|&m| m) {
            None
        } else {
            Some(mask)
        };
        Self {
            grid: self.grid,
            values,
            mask,
        }
    }

    pub(crate) fn from_parts(
        grid: Grid1D,
        values: Vec<Complex64>,
        mask: Option<Vec<bool>>,
    ) -> Self {
        Self { grid, values, mask }
    }

    fn check_same_grid(&self, other: &Self) -> Result<()> {
        if self.grid != other.grid {
            return Err(Error::GridMismatch);
        }
        Ok(())
    }

    /// `∫ conj(self)·other dx`: rectangle rule on periodic grids, trapezoid
    /// otherwise. Masked samples contribute nothing.
    pub fn inner_product(&self, other: &Self) -> Result<Complex64> {
        self.check_same_grid(other)?;
        let n = self.values.len();
        let h = self.grid.spacing();
        let mut acc = Complex64::new(0.0, 0.0);
        for j in 0..n {
            if !(self.is_valid(j) && other.is_valid(j)) {
                continue;
            }
            let w = if !self.grid.is_periodic() && (j == 0 || j == n - 1) {
                0.5
            } else {
                1.0
            };
            acc += self.values[j].conj() * other.values[j] * w;
        }
        Ok(acc * h)
    }

    /// `∫ |f|² dx` with the same quadrature as [`inner_product`](Self::inner_product).
    pub fn norm_sqr(&self) -> f64 {
        let n = self.values.len();
        let h = self.grid.spacing();
        let periodic = self.grid.is_periodic();
        self.valid_indices()
            .map(|j| {
                let w = if !periodic && (j == 0 || j == n - 1) {
                    0.5
                } else {
                    1.0
                };
                self.values[j].norm_sqr() * w
            })
            .sum::<f64>()
            * h
    }

    /// `g(x) = conj(f(-x))` by index reflection.
    pub fn parity_conjugate(&self) -> Result<Self> {
        let grid = self.grid;
        let n = grid.len();
        let mut values = Vec::with_capacity(n);
        let mut mask = self.mask.as_ref().map(|_| Vec::with_capacity(n));
        for j in 0..n {
            let m = grid.mirror(j)?;
            values.push(self.values[m].conj());
            if let Some(mask) = mask.as_mut() {
                mask.push(self.is_valid(m));
            }
        }
        Ok(Self { grid, values, mask })
    }
}
