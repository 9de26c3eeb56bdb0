//! Independent re-derivation of the consistency conditions.
//!
//! The stationary residual `R = -ψ'' + Vψ + g|ψ|²ψ - (μ+E)ψ` is evaluated at
//! collocation points (with `ψ''` from forward-mode jets) and projected by
//! least squares onto the family's residual basis. Each basis coefficient is
//! one consistency condition; an exact solution makes all of them vanish.

use std::f64::consts::{FRAC_PI_2, PI};

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use super::jet::{CJet, Jet};
use super::SystemParams;
use crate::ansatz::{AnsatzParams, EnvelopeForm};
use crate::error::{Error, Result};
use crate::potential::{Family, PotentialSpec};

pub const COLLOCATION_POINTS: usize = 64;
pub const MAX_CONDITION_NUMBER: f64 = 1e10;

/// Clearance (in units of `1/α`) between collocation points and any pole.
const POLE_MARGIN: f64 = 0.35;
/// Half-width (in units of `1/α`) of the window for decaying envelopes.
const DECAY_WINDOW: f64 = 4.0;

/// Basis coefficients of the projected residual.
#[derive(Debug, Clone)]
pub struct Collocation {
    pub labels: &'static [&'static str],
    pub coefficients: Vec<Complex64>,
    pub condition_number: f64,
    /// Largest `|R|` over the collocation points.
    pub residual_max: f64,
    /// Largest `|R - Σ c_j φ_j|`: non-zero when the residual leaves the basis.
    pub misfit: f64,
}

impl Collocation {
    pub fn max_coefficient(&self) -> f64 {
        self.coefficients
            .iter()
            .map(|c| c.norm())
            .fold(0.0, f64::max)
    }
}

/// Basis labels; the single-envelope bases carry the ansatz phase `e^{iΦ}`.
pub fn basis_labels(family: Family) -> &'static [&'static str] {
    match family {
        Family::Scarf2Hyp => &["sech", "sech^3", "i sech^2 tanh"],
        Family::Scarf2Trig => &["sec", "sec^3", "i sec^2 tan"],
        Family::RmHyp => &["sech", "sech^3", "i sech tanh"],
        Family::RmTrig => &["sec", "sec^3", "i sec tan"],
        Family::CschCoth => &["csch", "csch^3", "i csch coth"],
        Family::CscCot => &["csc", "csc^3", "i csc cot"],
        Family::PhaseLocked => &["tanh", "sech^2 tanh", "i sech", "i sech^3"],
    }
}

/// Collocation window in `x`.
pub fn window(family: Family, alpha: f64) -> (f64, f64) {
    let (lo, hi) = match family {
        Family::Scarf2Hyp | Family::RmHyp | Family::PhaseLocked => (-DECAY_WINDOW, DECAY_WINDOW),
        Family::Scarf2Trig | Family::RmTrig => (-FRAC_PI_2 + POLE_MARGIN, FRAC_PI_2 - POLE_MARGIN),
        Family::CscCot => (POLE_MARGIN, PI - POLE_MARGIN),
        Family::CschCoth => (POLE_MARGIN, DECAY_WINDOW),
    };
    (lo / alpha, hi / alpha)
}

pub fn points(family: Family, alpha: f64) -> Vec<f64> {
    let (lo, hi) = window(family, alpha);
    let step = (hi - lo) / (COLLOCATION_POINTS - 1) as f64;
    (0..COLLOCATION_POINTS)
        .map(|j| lo + j as f64 * step)
        .collect()
}

fn envelope_jet(family: Family, y: Jet, form: EnvelopeForm) -> Jet {
    match family {
        Family::Scarf2Hyp | Family::RmHyp | Family::PhaseLocked => y.cosh().recip(),
        Family::Scarf2Trig | Family::RmTrig => y.cos().recip(),
        Family::CschCoth => match form {
            EnvelopeForm::Closing => y.sinh().recip(),
            EnvelopeForm::AsPrinted => y.sinh(),
        },
        Family::CscCot => y.sin().recip(),
    }
}

fn phase_jet(family: Family, k: f64, y: Jet) -> Jet {
    match family {
        Family::Scarf2Hyp => y.sinh().atan().scale(k),
        Family::Scarf2Trig => y.sin().atanh().scale(k),
        Family::PhaseLocked => Jet::constant(0.0),
        _ => y.scale(k),
    }
}

pub(crate) fn psi_jet(params: &AnsatzParams, alpha: f64, x: f64, form: EnvelopeForm) -> CJet {
    let a = params.amplitude().to_complex();
    if params.family() == Family::PhaseLocked {
        let xj = Jet::variable(x);
        let sech = CJet::real(xj.cosh().recip()).scale(Complex64::i() * a);
        let tanh = CJet::real(xj.tanh()).scale(Complex64::new(params.tanh_weight(), 0.0));
        return sech + tanh;
    }
    let y = Jet::variable(x).scale(alpha);
    let env = CJet::real(envelope_jet(params.family(), y, form));
    let phase = CJet::unimodular(phase_jet(params.family(), params.wavenumber(), y));
    (env * phase).scale(a)
}

/// Stationary residual at one point.
pub(crate) fn residual_at(
    spec: &PotentialSpec,
    params: &AnsatzParams,
    sys: &SystemParams,
    energy: f64,
    x: f64,
    form: EnvelopeForm,
) -> Complex64 {
    let psi = psi_jet(params, spec.alpha(), x, form);
    let v = psi.value();
    -psi.second() + spec.value_at(x) * v + sys.g() * v.norm_sqr() * v - (sys.mu() + energy) * v
}

fn basis_at(family: Family, alpha: f64, k: f64, x: f64) -> Vec<Complex64> {
    let i = Complex64::i();
    if family == Family::PhaseLocked {
        let (s, t) = (1.0 / x.cosh(), x.tanh());
        return vec![
            Complex64::new(t, 0.0),
            Complex64::new(s * s * t, 0.0),
            i * s,
            i * s * s * s,
        ];
    }
    let y = alpha * x;
    let (e, odd) = match family {
        Family::Scarf2Hyp | Family::RmHyp => (1.0 / y.cosh(), y.tanh()),
        Family::Scarf2Trig | Family::RmTrig => (1.0 / y.cos(), y.tan()),
        Family::CschCoth => (1.0 / y.sinh(), 1.0 / y.tanh()),
        Family::CscCot => (1.0 / y.sin(), 1.0 / y.tan()),
        Family::PhaseLocked => unreachable!(),
    };
    let third = match family {
        Family::Scarf2Hyp | Family::Scarf2Trig => e * e * odd,
        _ => e * odd,
    };
    let phase = Complex64::from_polar(1.0, phase_jet(family, k, Jet::constant(y)).v);
    vec![phase * e, phase * e * e * e, i * phase * third]
}

/// Projects the residual of `params` onto the family basis.
pub fn collocation_conditions(
    spec: &PotentialSpec,
    params: &AnsatzParams,
    sys: &SystemParams,
    energy: f64,
) -> Result<Collocation> {
    collocation_conditions_with(spec, params, sys, energy, EnvelopeForm::Closing)
}

pub fn collocation_conditions_with(
    spec: &PotentialSpec,
    params: &AnsatzParams,
    sys: &SystemParams,
    energy: f64,
    form: EnvelopeForm,
) -> Result<Collocation> {
    let family = spec.family();
    if params.family() != family {
        return Err(Error::InvalidParameter(format!(
            "ansatz family {} does not match potential family {family}",
            params.family()
        )));
    }
    let xs = points(family, spec.alpha());
    let labels = basis_labels(family);
    let n = labels.len();
    let m = xs.len();

    let mut basis = DMatrix::<Complex64>::zeros(m, n);
    let mut rhs = DVector::<Complex64>::zeros(m);
    for (row, &x) in xs.iter().enumerate() {
        for (col, b) in basis_at(family, spec.alpha(), params.wavenumber(), x)
            .into_iter()
            .enumerate()
        {
            basis[(row, col)] = b;
        }
        rhs[row] = residual_at(spec, params, sys, energy, x, form);
    }

    let svd = basis.clone().svd(true, true);
    let s_max = svd.singular_values.max();
    let s_min = svd.singular_values.min();
    let condition_number = if s_min > 0.0 {
        s_max / s_min
    } else {
        f64::INFINITY
    };
    if !(condition_number <= MAX_CONDITION_NUMBER) {
        return Err(Error::IllConditionedBasis(condition_number));
    }
    let coef = svd
        .solve(&rhs, 0.0)
        .map_err(|e| Error::InvalidParameter(format!("least-squares solve failed: {e}")))?;
    let fitted = &basis * &coef;
    let misfit = (&rhs - fitted).iter().map(|c| c.norm()).fold(0.0, f64::max);
    let residual_max = rhs.iter().map(|c| c.norm()).fold(0.0, f64::max);

    Ok(Collocation {
        labels,
        coefficients: coef.iter().copied().collect(),
        condition_number,
        residual_max,
        misfit,
    })
}
