//! The phase-locked cubic system and its multistart Gauss-Newton solver.
//!
//! The four residual coefficients of `ψ = i a sech x + b tanh x` are cubic
//! polynomials in `(a, b)` and linear in `λ = μ + E`. Their coefficients are
//! recovered from the collocation engine by fitting samples, so the solver
//! works on the derived system rather than any transcription of it.

use nalgebra::{DMatrix, DVector, Matrix4x3, Vector3};
use serde::Serialize;

use super::collocation::collocation_conditions;
use super::SystemParams;
use crate::ansatz::AnsatzParams;
use crate::error::{Error, Result};
use crate::potential::{Family, PotentialSpec};

pub const MULTISTART_SIDE: usize = 21;
pub const MULTISTART_EXTENT: f64 = 3.0;
pub const ROOT_RESIDUAL_TOLERANCE: f64 = 1e-10;
pub const ROOT_DEDUP_TOLERANCE: f64 = 1e-8;

const STEP_TOLERANCE: f64 = 1e-12;
const MAX_ITERATIONS: usize = 100;
const MAX_HALVINGS: usize = 30;
const TRIVIAL_RADIUS: f64 = 1e-6;
const RANK_CUTOFF: f64 = 1e-9;
const CONTINUUM_RATIO: f64 = 1e-7;
const FIT_SAMPLES: usize = 16;

/// Monomials: `a, b, λa, λb, a³, a²b, ab², b³`.
const N_MONO: usize = 8;

#[derive(Debug, Clone, PartialEq)]
pub struct CubicSystem {
    /// Rows follow the basis `tanh, sech² tanh, i sech, i sech³`.
    pub coefficients: [[f64; N_MONO]; 4],
    /// Largest deviation of the fitted polynomials from the collocation samples.
    pub fit_error: f64,
}

fn monomials(a: f64, b: f64, l: f64) -> [f64; N_MONO] {
    [
        a,
        b,
        l * a,
        l * b,
        a * a * a,
        a * a * b,
        a * b * b,
        b * b * b,
    ]
}

// d/da, d/db, d/dλ of each monomial
fn monomial_gradients(a: f64, b: f64, l: f64) -> [[f64; 3]; N_MONO] {
    [
        [1.0, 0.0, 0.0],
        [0.0, 1.0, 0.0],
        [l, 0.0, a],
        [0.0, l, b],
        [3.0 * a * a, 0.0, 0.0],
        [2.0 * a * b, a * a, 0.0],
        [b * b, 2.0 * a * b, 0.0],
        [0.0, 3.0 * b * b, 0.0],
    ]
}

impl CubicSystem {
    pub fn eval(&self, a: f64, b: f64, lambda: f64) -> [f64; 4] {
        let m = monomials(a, b, lambda);
        let mut out = [0.0; 4];
        for (o, row) in out.iter_mut().zip(&self.coefficients) {
            *o = row.iter().zip(&m).map(|(c, x)| c * x).sum();
        }
        out
    }

    pub fn residual(&self, a: f64, b: f64, lambda: f64) -> f64 {
        self.eval(a, b, lambda)
            .iter()
            .map(|v| v * v)
            .sum::<f64>()
            .sqrt()
    }

    fn jacobian(&self, a: f64, b: f64, lambda: f64) -> Matrix4x3<f64> {
        let g = monomial_gradients(a, b, lambda);
        let mut j = Matrix4x3::zeros();
        for (r, row) in self.coefficients.iter().enumerate() {
            for (c, gm) in row.iter().zip(&g) {
                for k in 0..3 {
                    j[(r, k)] += c * gm[k];
                }
            }
        }
        j
    }

    /// `λ` minimizing the residual at fixed `(a, b)`; the system is linear in `λ`.
    pub fn optimal_lambda(&self, a: f64, b: f64) -> f64 {
        let f0 = self.eval(a, b, 0.0);
        let f1 = self.eval(a, b, 1.0);
        let g: Vec<f64> = f1.iter().zip(&f0).map(|(x, y)| x - y).collect();
        let gg: f64 = g.iter().map(|v| v * v).sum();
        if gg == 0.0 {
            return 0.0;
        }
        -g.iter().zip(&f0).map(|(x, y)| x * y).sum::<f64>() / gg
    }
}

/// Fits the cubic system from collocation samples.
pub fn cubic_system(spec: &PotentialSpec, sys: &SystemParams) -> Result<CubicSystem> {
    if spec.family() != Family::PhaseLocked {
        return Err(Error::WrongFamily(spec.family()));
    }
    // Deterministic scattered samples (additive recurrence, irrational steps).
    let steps = [
        0.618_033_988_749_895,
        0.414_213_562_373_095,
        0.732_050_807_568_877,
    ];
    let mut design = DMatrix::<f64>::zeros(FIT_SAMPLES, N_MONO);
    let mut targets = DMatrix::<f64>::zeros(FIT_SAMPLES, 4);
    for j in 0..FIT_SAMPLES {
        let u: Vec<f64> = steps
            .iter()
            .map(|s| 3.0 * ((j as f64 + 1.0) * s).fract() - 1.5)
            .collect();
        let (a, b, l) = (u[0], u[1], u[2]);
        let params = AnsatzParams::phase_locked(a, b)?;
        let c = collocation_conditions(spec, &params, sys, l - sys.mu())?;
        for (k, m) in monomials(a, b, l).into_iter().enumerate() {
            design[(j, k)] = m;
        }
        for r in 0..4 {
            targets[(j, r)] = c.coefficients[r].re;
        }
    }
    let svd = design.clone().svd(true, true);
    let mut coefficients = [[0.0; N_MONO]; 4];
    for (r, row) in coefficients.iter_mut().enumerate() {
        let col: DVector<f64> = targets.column(r).into_owned();
        let sol = svd
            .solve(&col, 0.0)
            .map_err(|e| Error::InvalidParameter(format!("cubic fit failed: {e}")))?;
        for k in 0..N_MONO {
            row[k] = sol[k];
        }
    }
    let fit_error = (&design * DMatrix::from_fn(N_MONO, 4, |k, r| coefficients[r][k]) - &targets)
        .iter()
        .fold(0.0f64, |m, v| m.max(v.abs()));
    Ok(CubicSystem {
        coefficients,
        fit_error,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PhaseLockedRoot {
    pub a: f64,
    pub b: f64,
    #[serde(rename = "E")]
    pub energy: f64,
    /// `μ + E` as solved.
    pub lambda: f64,
    pub residual: f64,
    /// The Jacobian is rank-deficient here: the root lies on a curve of roots.
    pub on_continuum: bool,
}

struct Converged {
    z: Vector3<f64>,
    residual: f64,
}

fn pinv_step(j: &DMatrix<f64>, f: &DVector<f64>) -> DVector<f64> {
    let svd = j.clone().svd(true, true);
    let cutoff = svd.singular_values.max() * RANK_CUTOFF;
    -svd.solve(f, cutoff)
        .unwrap_or_else(|_| DVector::zeros(j.ncols()))
}

/// Damped Gauss-Newton on a residual `F: R^n -> R^4`.
fn gauss_newton(
    mut z: DVector<f64>,
    eval: impl Fn(&DVector<f64>) -> DVector<f64>,
    jac: impl Fn(&DVector<f64>) -> DMatrix<f64>,
) -> Option<(DVector<f64>, f64)> {
    let mut f = eval(&z);
    let mut fnorm = f.norm();
    for _ in 0..MAX_ITERATIONS {
        if !fnorm.is_finite() {
            return None;
        }
        let step = pinv_step(&jac(&z), &f);
        let mut t = 1.0;
        let mut accepted = None;
        for _ in 0..=MAX_HALVINGS {
            let trial = &z + &step * t;
            let ft = eval(&trial);
            let n = ft.norm();
            if n < fnorm {
                accepted = Some((trial, ft, n, step.norm() * t));
                break;
            }
            t *= 0.5;
        }
        match accepted {
            Some((zt, ft, n, len)) => {
                z = zt;
                f = ft;
                fnorm = n;
                if len < STEP_TOLERANCE && fnorm < ROOT_RESIDUAL_TOLERANCE {
                    return Some((z, fnorm));
                }
            }
            // no descent left: a root if the residual is already at the floor
            None => return (fnorm < ROOT_RESIDUAL_TOLERANCE).then_some((z, fnorm)),
        }
    }
    (fnorm < ROOT_RESIDUAL_TOLERANCE).then_some((z, fnorm))
}

fn to_dmatrix(j: &Matrix4x3<f64>, cols: &[usize]) -> DMatrix<f64> {
    DMatrix::from_fn(4, cols.len(), |r, c| j[(r, cols[c])])
}

fn newton_full(sys: &CubicSystem, a: f64, b: f64) -> Option<Converged> {
    let z0 = DVector::from_vec(vec![a, b, sys.optimal_lambda(a, b)]);
    gauss_newton(
        z0,
        |z| DVector::from_row_slice(&sys.eval(z[0], z[1], z[2])),
        |z| to_dmatrix(&sys.jacobian(z[0], z[1], z[2]), &[0, 1, 2]),
    )
    .map(|(z, residual)| Converged {
        z: Vector3::new(z[0], z[1], z[2]),
        residual,
    })
}

// Newton with b held fixed; used to pick a representative on a continuum.
fn newton_pinned_b(sys: &CubicSystem, a: f64, b: f64) -> Option<Converged> {
    let z0 = DVector::from_vec(vec![a, sys.optimal_lambda(a, b)]);
    gauss_newton(
        z0,
        |z| DVector::from_row_slice(&sys.eval(z[0], b, z[1])),
        |z| to_dmatrix(&sys.jacobian(z[0], b, z[1]), &[0, 2]),
    )
    .map(|(z, residual)| Converged {
        z: Vector3::new(z[0], b, z[1]),
        residual,
    })
}

fn is_continuum(sys: &CubicSystem, z: &Vector3<f64>) -> bool {
    let sv = sys.jacobian(z[0], z[1], z[2]).singular_values();
    sv.min() <= CONTINUUM_RATIO * sv.max()
}

fn make_root(sys: &CubicSystem, g: f64, mu: f64, c: &Converged) -> PhaseLockedRoot {
    let (a, b, lambda) = (c.z[0], c.z[1], c.z[2]);
    // with b ≠ 0 the tanh condition reads λ = g b²
    let energy = if b.abs() > TRIVIAL_RADIUS {
        g * b * b - mu
    } else {
        lambda - mu
    };
    PhaseLockedRoot {
        a,
        b,
        energy,
        lambda,
        residual: c.residual,
        on_continuum: is_continuum(sys, &c.z),
    }
}

/// All real non-trivial roots `(a, b, E)` found from the multistart grid,
/// sorted by `(a, b)`. An empty list means no solution at this resolution.
pub fn solve_phase_locked(
    spec: &PotentialSpec,
    sys: &SystemParams,
) -> Result<Vec<PhaseLockedRoot>> {
    let cubic = cubic_system(spec, sys)?;
    let step = 2.0 * MULTISTART_EXTENT / (MULTISTART_SIDE - 1) as f64;
    let mut found: Vec<Converged> = Vec::new();
    for i in 0..MULTISTART_SIDE {
        for j in 0..MULTISTART_SIDE {
            let a0 = -MULTISTART_EXTENT + i as f64 * step;
            let b0 = -MULTISTART_EXTENT + j as f64 * step;
            if let Some(c) = newton_full(&cubic, a0, b0) {
                found.push(c);
            }
        }
    }

    // the system is odd under (a, b) -> (-a, -b)
    let mirrored: Vec<Converged> = found
        .iter()
        .filter_map(|c| {
            let z = Vector3::new(-c.z[0], -c.z[1], c.z[2]);
            let r = cubic.residual(z[0], z[1], z[2]);
            (r < ROOT_RESIDUAL_TOLERANCE).then_some(Converged { z, residual: r })
        })
        .collect();
    found.extend(mirrored);

    if let Some(c) = found
        .iter()
        .find(|c| c.z[1].abs() > TRIVIAL_RADIUS && is_continuum(&cubic, &c.z))
    {
        let a0 = c.z[0] / c.z[1];
        if let Some(p) = newton_pinned_b(&cubic, a0, 1.0) {
            let z = Vector3::new(-p.z[0], -1.0, p.z[2]);
            let r = cubic.residual(z[0], z[1], z[2]);
            found.push(p);
            if r < ROOT_RESIDUAL_TOLERANCE {
                found.push(Converged { z, residual: r });
            }
        }
    }

    let mut roots: Vec<PhaseLockedRoot> = found
        .iter()
        .filter(|c| c.z[0].hypot(c.z[1]) >= TRIVIAL_RADIUS)
        .map(|c| make_root(&cubic, sys.g(), sys.mu(), c))
        .collect();
    roots.sort_by(|p, q| p.a.total_cmp(&q.a).then(p.b.total_cmp(&q.b)));
    let mut unique: Vec<PhaseLockedRoot> = Vec::with_capacity(roots.len());
    for r in roots {
        let dup = unique
            .iter()
            .any(|u| (u.a - r.a).hypot(u.b - r.b) < ROOT_DEDUP_TOLERANCE);
        if !dup {
            unique.push(r);
        }
    }
    Ok(unique)
}
