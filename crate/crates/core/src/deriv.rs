//! Second derivatives of sampled fields.

use std::sync::Arc;

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::field::ComplexField;
use crate::grid::{fft_wavenumbers, Grid1D};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum DerivativeMethod {
    /// Fourier differentiation on a periodic grid.
    Spectral,
    /// Fourier differentiation of the even reflection of a non-periodic
    /// field about both end points. Exact to rounding for fields whose slope
    /// vanishes at the ends, including ones that tend to different constants.
    Cosine,
    /// Five-point central stencil with fourth-order one-sided closures.
    FiniteDifference4,
}

impl std::fmt::Display for DerivativeMethod {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Self::Spectral => "spectral",
            Self::Cosine => "cosine",
            Self::FiniteDifference4 => "fd4",
        })
    }
}

/// Number of samples at each end whose FD stencil is one-sided.
pub const FD4_CLOSURE: usize = 2;

// weights × 1/(12 h²)
const CENTRAL: [f64; 5] = [-1.0, 16.0, -30.0, 16.0, -1.0];
const EDGE0: [f64; 6] = [45.0, -154.0, 214.0, -156.0, 61.0, -10.0];
const EDGE1: [f64; 6] = [10.0, -15.0, -4.0, 14.0, -6.0, 1.0];

pub fn second_derivative(f: &ComplexField, method: DerivativeMethod) -> Result<ComplexField> {
    match method {
        DerivativeMethod::Spectral => {
            if !f.grid().is_periodic() {
                return Err(Error::MethodGridMismatch);
            }
            if f.is_masked() {
                return Err(Error::MaskedSpectral);
            }
            let mut ws = SpectralWorkspace::new(f.grid());
            let mut values = f.values().to_vec();
            ws.second_derivative_in_place(&mut values);
            Ok(f.with_values(values))
        }
        DerivativeMethod::Cosine => {
            if f.grid().is_periodic() {
                return Err(Error::CosineOnPeriodic);
            }
            if f.is_masked() {
                return Err(Error::MaskedSpectral);
            }
            Ok(f.with_values(cosine_second_derivative(f.grid(), f.values())))
        }
        DerivativeMethod::FiniteDifference4 => fd4(f),
    }
}

fn fd4(f: &ComplexField) -> Result<ComplexField> {
    let grid = f.grid();
    let n = grid.len();
    if n < 9 {
        return Err(Error::TooCoarse {
            n_points: n,
            min: 9,
        });
    }
    let scale = 1.0 / (12.0 * grid.spacing() * grid.spacing());
    let v = f.values();
    let periodic = grid.is_periodic();

    let mut out = vec![Complex64::new(0.0, 0.0); n];
    let mut touched: Vec<Vec<usize>> = Vec::with_capacity(n);
    for j in 0..n {
        let (idx, w): (Vec<usize>, &[f64]) = if periodic {
            ((0..5).map(|o| (j + n + o - 2) % n).collect(), &CENTRAL)
        } else if j == 0 {
            ((0..6).collect(), &EDGE0)
        } else if j == 1 {
            ((0..6).collect(), &EDGE1)
        } else if j == n - 2 {
            ((0..6).map(|o| n - 1 - o).collect(), &EDGE1)
        } else if j == n - 1 {
            ((0..6).map(|o| n - 1 - o).collect(), &EDGE0)
        } else {
            ((j - 2..=j + 2).collect(), &CENTRAL)
        };
        out[j] = idx
            .iter()
            .zip(w)
            .map(|(&i, &c)| v[i] * c)
            .sum::<Complex64>()
            * scale;
        touched.push(idx);
    }

    if !f.is_masked() {
        return Ok(ComplexField::from_parts(*grid, out, None));
    }
    let mask: Vec<bool> = touched
        .iter()
        .map(|idx| idx.iter().all(|&i| f.is_valid(i)))
        .collect();
    ComplexField::with_mask(*grid, out, mask)
}

fn cosine_second_derivative(grid: &Grid1D, values: &[Complex64]) -> Vec<Complex64> {
    let n = values.len();
    let m = 2 * (n - 1);
    let mut ext: Vec<Complex64> = Vec::with_capacity(m);
    ext.extend_from_slice(values);
    ext.extend(values[1..n - 1].iter().rev());
    let period = 2.0 * grid.length();
    let mut planner = FftPlanner::new();
    let fwd = planner.plan_fft_forward(m);
    let inv = planner.plan_fft_inverse(m);
    fwd.process(&mut ext);
    let norm = 1.0 / m as f64;
    for (c, k) in ext.iter_mut().zip(fft_wavenumbers(m, period)) {
        *c *= -k * k * norm;
    }
    inv.process(&mut ext);
    ext.truncate(n);
    ext
}

/// Reusable FFT plans and wavenumbers for one periodic grid.
pub struct SpectralWorkspace {
    fwd: Arc<dyn Fft<f64>>,
    inv: Arc<dyn Fft<f64>>,
    k: Vec<f64>,
    scratch: Vec<Complex64>,
}

impl SpectralWorkspace {
    pub fn new(grid: &Grid1D) -> Self {
        let n = grid.len();
        let mut planner = FftPlanner::new();
        let fwd = planner.plan_fft_forward(n);
        let inv = planner.plan_fft_inverse(n);
        let scratch_len = fwd
            .get_inplace_scratch_len()
            .max(inv.get_inplace_scratch_len());
        Self {
            fwd,
            inv,
            k: grid.wavenumbers(),
            scratch: vec![Complex64::new(0.0, 0.0); scratch_len],
        }
    }

    pub fn wavenumbers(&self) -> &[f64] {
        &self.k
    }

    pub fn forward(&mut self, data: &mut [Complex64]) {
        self.fwd.process_with_scratch(data, &mut self.scratch);
    }

    /// Inverse transform including the 1/n normalisation.
    pub fn inverse(&mut self, data: &mut [Complex64]) {
        self.inv.process_with_scratch(data, &mut self.scratch);
        let norm = 1.0 / data.len() as f64;
        data.iter_mut().for_each(|c| *c *= norm);
    }

    pub fn second_derivative_in_place(&mut self, data: &mut [Complex64]) {
        self.forward(data);
        for (c, k) in data.iter_mut().zip(&self.k) {
            *c *= -k * k;
        }
        self.inverse(data);
    }
}
