//! Grid verification of constructed states: stationary residual, local
//! eigenvalue, and PT defects.

use std::f64::consts::{FRAC_PI_2, PI, TAU};

use num_complex::Complex64;
use serde::Serialize;

use crate::ansatz::{eval_ansatz, eval_ansatz_masked, AnsatzParams, Quadrant};
use crate::consistency::{solve, SystemParams};
use crate::deriv::{second_derivative, DerivativeMethod};
use crate::error::{Error, Result};
use crate::field::ComplexField;
use crate::grid::Grid1D;
use crate::potential::{pt_defect, Family, PotentialSpec};

pub const DEFAULT_THRESHOLD: f64 = 1e-3;
pub const DECAYING_TOLERANCE: f64 = 1e-7;
pub const SINGULAR_TOLERANCE: f64 = 1e-6;
pub const DEFAULT_POLE_MARGIN: f64 = 0.3;

/// Default grid sizes.
pub const DECAYING_POINTS: usize = 2048;
pub const SINGULAR_POINTS: usize = 8192;
/// Default half-width of the phase-locked grid.
pub const PHASE_LOCKED_HALF_WIDTH: f64 = 30.0;
/// Right end (in `αx`) of the csch-coth verification interval.
pub const CSCH_EXTENT: f64 = 10.0;

/// Fraction of the half-width dropped at each end of a spectral grid.
const SPECTRAL_BUFFER: f64 = 0.1;
/// Samples dropped at each end of a non-periodic grid.
const EDGE_POINTS: usize = 5;
const THETA_GRID: usize = 64;
const GOLDEN_ITERATIONS: usize = 80;

#[derive(Debug, Clone)]
pub struct Residual {
    pub field: ComplexField,
    pub inf_norm: f64,
    pub l2_norm: f64,
}

fn check_pair(psi: &ComplexField, v: &ComplexField) -> Result<()> {
    if psi.grid() != v.grid() {
        return Err(Error::GridMismatch);
    }
    Ok(())
}

// -ψ'' + Vψ + g|ψ|²ψ - μψ on the joint mask
fn nlse_operator(
    psi: &ComplexField,
    v: &ComplexField,
    sys: &SystemParams,
    method: DerivativeMethod,
) -> Result<ComplexField> {
    check_pair(psi, v)?;
    let d2 = second_derivative(psi, method)?;
    let n = psi.grid().len();
    let mask: Vec<bool> = (0..n)
        .map(|j| psi.is_valid(j) && v.is_valid(j) && d2.is_valid(j))
        .collect();
    let values = (0..n)
        .map(|j| {
            if !mask[j] {
                return Complex64::new(0.0, 0.0);
            }
            let p = psi.values()[j];
            -d2.values()[j] + v.values()[j] * p + sys.g() * p.norm_sqr() * p - sys.mu() * p
        })
        .collect();
    ComplexField::with_mask(*psi.grid(), values, mask)
}

/// Stationary residual `R = -ψ'' + Vψ + g|ψ|²ψ - (μ+E)ψ` with samples in
/// `exclusions` masked from the norms.
pub fn nlse_residual(
    psi: &ComplexField,
    v: &ComplexField,
    sys: &SystemParams,
    energy: f64,
    exclusions: &[(f64, f64)],
    method: DerivativeMethod,
) -> Result<Residual> {
    let op = nlse_operator(psi, v, sys, method)?;
    let shifted = op
        .values()
        .iter()
        .zip(psi.values())
        .map(|(r, p)| r - energy * p)
        .collect();
    let field = op.with_values(shifted).exclude(exclusions);
    let h = field.grid().spacing();
    let (mut inf, mut sq) = (0.0f64, 0.0);
    for j in field.valid_indices() {
        let m = field.values()[j].norm();
        inf = inf.max(m);
        sq += m * m;
    }
    Ok(Residual {
        field,
        inf_norm: inf,
        l2_norm: (sq * h).sqrt(),
    })
}

#[derive(Debug, Clone)]
pub struct LocalEigenvalue {
    pub field: ComplexField,
    pub mean: Complex64,
    pub std: f64,
    pub retained: usize,
}

/// `E_loc = (-ψ'' + Vψ + g|ψ|²ψ - μψ)/ψ` where `|ψ| > threshold·max|ψ|`.
pub fn local_eigenvalue(
    psi: &ComplexField,
    v: &ComplexField,
    sys: &SystemParams,
    threshold: f64,
    exclusions: &[(f64, f64)],
    method: DerivativeMethod,
) -> Result<LocalEigenvalue> {
    let op = nlse_operator(psi, v, sys, method)?.exclude(exclusions);
    let cut = threshold * psi.exclude(exclusions).max_abs();
    let n = psi.grid().len();
    let mut values = vec![Complex64::new(0.0, 0.0); n];
    let mut mask = vec![false; n];
    for j in op.valid_indices() {
        let p = psi.values()[j];
        if p.norm() > cut && psi.is_valid(j) {
            values[j] = op.values()[j] / p;
            mask[j] = true;
        }
    }
    let kept: Vec<Complex64> = (0..n).filter(|&j| mask[j]).map(|j| values[j]).collect();
    if kept.is_empty() {
        return Err(Error::AllSamplesBelowThreshold);
    }
    let mean = kept.iter().sum::<Complex64>() / kept.len() as f64;
    let var = kept.iter().map(|e| (e - mean).norm_sqr()).sum::<f64>() / kept.len() as f64;
    Ok(LocalEigenvalue {
        field: ComplexField::with_mask(*psi.grid(), values, mask)?,
        mean,
        std: var.sqrt(),
        retained: kept.len(),
    })
}

/// `min_θ max_x |e^{iθ} conj(ψ(-x)) - ψ(x)|` over unmasked mirror pairs,
/// with the minimizing `θ` in `[0, 2π)`.
pub fn pt_defect_state_with_phase(psi: &ComplexField) -> Result<(f64, f64)> {
    let grid = psi.grid();
    if !grid.is_symmetric() {
        return Err(Error::AsymmetricGrid);
    }
    let mut pairs = Vec::with_capacity(grid.len());
    for j in 0..grid.len() {
        let m = grid.mirror(j)?;
        // the periodic wrap sample x = -L has no partner on the grid
        if grid.is_periodic() && j == 0 {
            continue;
        }
        if psi.is_valid(j) && psi.is_valid(m) {
            pairs.push((psi.values()[m].conj(), psi.values()[j]));
        }
    }
    if pairs.is_empty() {
        return Ok((0.0, 0.0));
    }
    let defect = |theta: f64| {
        let w = Complex64::from_polar(1.0, theta);
        pairs
            .iter()
            .map(|(c, p)| (w * c - p).norm())
            .fold(0.0, f64::max)
    };

    // start from the phase that matches the peak sample exactly
    let peak = pairs
        .iter()
        .max_by(|x, y| x.1.norm().total_cmp(&y.1.norm()))
        .copied()
        .unwrap();
    let theta0 = if peak.0.norm() > 0.0 {
        peak.1.arg() - peak.0.arg()
    } else {
        0.0
    };
    let dt = TAU / THETA_GRID as f64;
    let (mut best_t, mut best) = (theta0, defect(theta0));
    for i in 1..THETA_GRID {
        let t = theta0 + i as f64 * dt;
        let d = defect(t);
        if d < best {
            best = d;
            best_t = t;
        }
    }

    let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
    let (mut lo, mut hi) = (best_t - dt, best_t + dt);
    let mut c = hi - inv_phi * (hi - lo);
    let mut d = lo + inv_phi * (hi - lo);
    let (mut fc, mut fd) = (defect(c), defect(d));
    for _ in 0..GOLDEN_ITERATIONS {
        if fc < fd {
            hi = d;
            d = c;
            fd = fc;
            c = hi - inv_phi * (hi - lo);
            fc = defect(c);
        } else {
            lo = c;
            c = d;
            fc = fd;
            d = lo + inv_phi * (hi - lo);
            fd = defect(d);
        }
    }
    for (t, f) in [(c, fc), (d, fd)] {
        if f < best {
            best = f;
            best_t = t;
        }
    }
    Ok((best, best_t.rem_euclid(TAU)))
}

pub fn pt_defect_state(psi: &ComplexField) -> Result<f64> {
    pt_defect_state_with_phase(psi).map(|(d, _)| d)
}

/// Overrides for [`verify_with`]. `None` selects the family default.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VerifyOptions {
    pub tolerance: Option<f64>,
    /// Half-width of symmetric grids. Singular families reject it when the
    /// window reaches a pole.
    pub half_width: Option<f64>,
    pub n_points: Option<usize>,
    /// Explicit `x` interval; replaces the family's safe sub-interval.
    pub interval: Option<(f64, f64)>,
    pub method: Option<DerivativeMethod>,
    /// Clearance `δ` (in `αx`) from poles for singular families.
    pub pole_margin: f64,
    pub threshold: f64,
    pub quadrant: Quadrant,
}

impl Default for VerifyOptions {
    fn default() -> Self {
        Self {
            tolerance: None,
            half_width: None,
            n_points: None,
            interval: None,
            method: None,
            pole_margin: DEFAULT_POLE_MARGIN,
            threshold: DEFAULT_THRESHOLD,
            quadrant: Quadrant::RealPositive,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VerificationReport {
    pub family: Family,
    pub pass: bool,
    pub reason: Option<String>,
    pub residual_inf_norm: f64,
    pub residual_l2_norm: f64,
    #[serde(rename = "local_E_mean_re")]
    pub local_e_mean_re: f64,
    #[serde(rename = "local_E_mean_im")]
    pub local_e_mean_im: f64,
    #[serde(rename = "local_E_std")]
    pub local_e_std: f64,
    pub pt_defect_state: f64,
    pub pt_defect_potential: f64,
    pub excluded_zones: Vec<(f64, f64)>,
    pub normalizable: bool,
    pub derivative: DerivativeMethod,
    pub n_points: usize,
    /// Energy from the consistency solve.
    #[serde(rename = "E")]
    pub energy: f64,
}

impl VerificationReport {
    pub fn local_e_mean(&self) -> Complex64 {
        Complex64::new(self.local_e_mean_re, self.local_e_mean_im)
    }
}

/// Grid, exclusions and method used to verify one state.
#[derive(Debug, Clone)]
pub struct VerificationSetup {
    pub grid: Grid1D,
    pub method: DerivativeMethod,
    pub exclusions: Vec<(f64, f64)>,
    pub tolerance: f64,
}

fn edge_zones(grid: &Grid1D, points: usize) -> Vec<(f64, f64)> {
    let h = grid.spacing();
    let pad = (points as f64 - 0.5) * h;
    vec![
        (grid.x_min(), grid.x_min() + pad),
        (grid.x_max() - pad, grid.x_max()),
    ]
}

fn default_interval(spec: &PotentialSpec, delta: f64) -> (f64, f64) {
    let al = spec.alpha();
    match spec.family() {
        Family::Scarf2Trig | Family::RmTrig => {
            ((-FRAC_PI_2 + delta) / al, (FRAC_PI_2 - delta) / al)
        }
        Family::CscCot => (delta / al, (PI - delta) / al),
        Family::CschCoth => (delta / al, CSCH_EXTENT / al),
        _ => unreachable!("interval requested for a family without poles"),
    }
}

/// Grid and derivative choice for `spec` under `opts`.
pub fn verification_setup(spec: &PotentialSpec, opts: &VerifyOptions) -> Result<VerificationSetup> {
    let family = spec.family();
    let al = spec.alpha();
    if let Some((lo, hi)) = opts.interval {
        if let Some(&pole) = spec.singularities(lo, hi).first() {
            return Err(Error::PoleInInterval {
                lower: lo,
                upper: hi,
                pole,
            });
        }
        let n = opts.n_points.unwrap_or(if family.is_singular() {
            SINGULAR_POINTS
        } else {
            DECAYING_POINTS
        });
        let grid = Grid1D::new(lo, hi, n, false)?;
        let method = opts.method.unwrap_or(DerivativeMethod::FiniteDifference4);
        let tolerance = opts.tolerance.unwrap_or(if family.is_singular() {
            SINGULAR_TOLERANCE
        } else {
            DECAYING_TOLERANCE
        });
        let exclusions = if grid.is_periodic() {
            Vec::new()
        } else {
            edge_zones(&grid, EDGE_POINTS)
        };
        return Ok(VerificationSetup {
            grid,
            method,
            exclusions,
            tolerance,
        });
    }
    if family.is_singular() {
        if let Some(half) = opts.half_width {
            // a symmetric window always straddles a pole of these families
            let grid = Grid1D::symmetric(half, opts.n_points.unwrap_or(SINGULAR_POINTS), false)?;
            if let Some(&pole) = spec.singularities(-half, half).first() {
                let x = grid
                    .points()
                    .into_iter()
                    .min_by(|a, b| (a - pole).abs().total_cmp(&(b - pole).abs()))
                    .unwrap_or(pole);
                return Err(Error::SingularSample {
                    x,
                    pole,
                    tolerance: grid.spacing(),
                });
            }
        }
        let (lo, hi) = default_interval(spec, opts.pole_margin);
        let grid = Grid1D::new(lo, hi, opts.n_points.unwrap_or(SINGULAR_POINTS), false)?;
        return Ok(VerificationSetup {
            exclusions: edge_zones(&grid, EDGE_POINTS),
            grid,
            method: opts.method.unwrap_or(DerivativeMethod::FiniteDifference4),
            tolerance: opts.tolerance.unwrap_or(SINGULAR_TOLERANCE),
        });
    }
    let n = opts.n_points.unwrap_or(DECAYING_POINTS);
    let tolerance = opts.tolerance.unwrap_or(DECAYING_TOLERANCE);
    if family == Family::PhaseLocked {
        let grid = Grid1D::symmetric(opts.half_width.unwrap_or(PHASE_LOCKED_HALF_WIDTH), n, false)?;
        let method = opts.method.unwrap_or(DerivativeMethod::Cosine);
        let exclusions = edge_zones(&grid, EDGE_POINTS);
        return Ok(VerificationSetup {
            grid,
            method,
            exclusions,
            tolerance,
        });
    }
    let method = opts.method.unwrap_or(DerivativeMethod::Spectral);
    let periodic = method == DerivativeMethod::Spectral;
    let half = opts.half_width.unwrap_or(20.0 / al);
    let grid = Grid1D::symmetric(half, n, periodic)?;
    let exclusions = if periodic {
        let b = SPECTRAL_BUFFER * half;
        vec![(-half, -half + b), (half - b, half)]
    } else {
        edge_zones(&grid, EDGE_POINTS)
    };
    Ok(VerificationSetup {
        grid,
        method,
        exclusions,
        tolerance,
    })
}

/// Symmetric grid (and pole-mask radius) on which PT defects are measured.
fn parity_grid(
    spec: &PotentialSpec,
    setup: &VerificationSetup,
    opts: &VerifyOptions,
) -> Result<(Grid1D, f64)> {
    let al = spec.alpha();
    let delta = opts.pole_margin / al;
    match spec.family() {
        Family::CscCot => Ok((
            Grid1D::symmetric((PI - opts.pole_margin) / al, SINGULAR_POINTS + 1, false)?,
            delta,
        )),
        Family::CschCoth => Ok((
            Grid1D::symmetric(CSCH_EXTENT / al, SINGULAR_POINTS + 1, false)?,
            delta,
        )),
        Family::Scarf2Trig | Family::RmTrig => {
            let (_, hi) = default_interval(spec, opts.pole_margin);
            Ok((Grid1D::symmetric(hi, SINGULAR_POINTS, false)?, delta))
        }
        _ if setup.grid.is_symmetric() => Ok((setup.grid, 0.0)),
        _ => Ok((
            Grid1D::symmetric(
                setup.grid.x_max().abs().max(setup.grid.x_min().abs()),
                DECAYING_POINTS,
                false,
            )?,
            0.0,
        )),
    }
}

/// Verifies a given state `params` with energy `energy`.
pub fn verify_state(
    spec: &PotentialSpec,
    sys: &SystemParams,
    params: &AnsatzParams,
    energy: f64,
    opts: &VerifyOptions,
) -> Result<VerificationReport> {
    let setup = verification_setup(spec, opts)?;
    let psi = eval_ansatz(params, spec, &setup.grid)?;
    let v = spec.eval(&setup.grid)?;
    let res = nlse_residual(&psi, &v, sys, energy, &setup.exclusions, setup.method)?;
    let le = local_eigenvalue(
        &psi,
        &v,
        sys,
        opts.threshold,
        &setup.exclusions,
        setup.method,
    )?;

    let (pgrid, radius) = parity_grid(spec, &setup, opts)?;
    let (ppsi, pv) = if radius > 0.0 {
        (
            eval_ansatz_masked(params, spec, &pgrid, radius)?,
            spec.eval_masked(&pgrid, radius)?,
        )
    } else {
        (eval_ansatz(params, spec, &pgrid)?, spec.eval(&pgrid)?)
    };
    let defect_state = pt_defect_state(&ppsi)?;
    let defect_potential = pt_defect(&pv)?;

    let tol = setup.tolerance;
    let mut failures = Vec::new();
    if !(res.inf_norm < tol) {
        failures.push(format!(
            "residual inf-norm {:.3e} exceeds {tol:e}",
            res.inf_norm
        ));
    }
    if !(le.std < tol) {
        failures.push(format!(
            "local eigenvalue spread {:.3e} exceeds {tol:e}",
            le.std
        ));
    }
    if !(le.mean.im.abs() < tol) {
        failures.push(format!(
            "local eigenvalue imaginary part {:.3e} exceeds {tol:e}",
            le.mean.im
        ));
    }
    Ok(VerificationReport {
        family: spec.family(),
        pass: failures.is_empty(),
        reason: (!failures.is_empty()).then(|| failures.join("; ")),
        residual_inf_norm: res.inf_norm,
        residual_l2_norm: res.l2_norm,
        local_e_mean_re: le.mean.re,
        local_e_mean_im: le.mean.im,
        local_e_std: le.std,
        pt_defect_state: defect_state,
        pt_defect_potential: defect_potential,
        excluded_zones: setup.exclusions,
        normalizable: spec.family().is_decaying(),
        derivative: setup.method,
        n_points: setup.grid.len(),
        energy,
    })
}

/// Samples behind a verification, for CSV dumps.
#[derive(Debug, Clone)]
pub struct FieldDump {
    pub psi: ComplexField,
    pub potential: ComplexField,
    pub residual: ComplexField,
}

pub fn verification_fields(
    spec: &PotentialSpec,
    sys: &SystemParams,
    params: &AnsatzParams,
    energy: f64,
    opts: &VerifyOptions,
) -> Result<FieldDump> {
    let setup = verification_setup(spec, opts)?;
    let psi = eval_ansatz(params, spec, &setup.grid)?;
    let potential = spec.eval(&setup.grid)?;
    let residual = nlse_residual(
        &psi,
        &potential,
        sys,
        energy,
        &setup.exclusions,
        setup.method,
    )?
    .field;
    Ok(FieldDump {
        psi,
        potential,
        residual,
    })
}

pub fn verify(spec: &PotentialSpec, sys: &SystemParams) -> Result<VerificationReport> {
    verify_with(spec, sys, &VerifyOptions::default())
}

/// Solve, construct, and verify. A missing solution is a failed report, not an error.
pub fn verify_with(
    spec: &PotentialSpec,
    sys: &SystemParams,
    opts: &VerifyOptions,
) -> Result<VerificationReport> {
    let report = solve(spec, sys)?;
    match report.ansatz(opts.quadrant) {
        Some(params) => verify_state(spec, sys, &params, report.energy, opts),
        None => {
            let setup = verification_setup(spec, opts)?;
            let reason = if spec.family() == Family::PhaseLocked {
                "no real root"
            } else {
                "no real amplitude"
            };
            Ok(VerificationReport {
                family: spec.family(),
                pass: false,
                reason: Some(reason.into()),
                residual_inf_norm: f64::NAN,
                residual_l2_norm: f64::NAN,
                local_e_mean_re: f64::NAN,
                local_e_mean_im: f64::NAN,
                local_e_std: f64::NAN,
                pt_defect_state: f64::NAN,
                pt_defect_potential: f64::NAN,
                excluded_zones: setup.exclusions,
                normalizable: spec.family().is_decaying(),
                derivative: setup.method,
                n_points: setup.grid.len(),
                energy: report.energy,
            })
        }
    }
}
