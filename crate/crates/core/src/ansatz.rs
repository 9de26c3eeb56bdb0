//! Closed-form candidate solutions `ψ(x)` for each potential family.

use num_complex::Complex64;
use serde::ser::SerializeStruct;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::field::ComplexField;
use crate::grid::Grid1D;
use crate::potential::{Family, PotentialSpec};

/// Which axis an amplitude lies on. Amplitudes are purely real or purely imaginary.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Quadrant {
    RealPositive,
    RealNegative,
    ImagPositive,
    ImagNegative,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Amplitude {
    modulus: f64,
    quadrant: Quadrant,
}

impl Amplitude {
    pub fn new(modulus: f64, quadrant: Quadrant) -> Result<Self> {
        if !(modulus >= 0.0 && modulus.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "amplitude modulus must be finite and non-negative (got {modulus})"
            )));
        }
        Ok(Self { modulus, quadrant })
    }

    pub fn real(a: f64) -> Self {
        let quadrant = if a.is_sign_negative() {
            Quadrant::RealNegative
        } else {
            Quadrant::RealPositive
        };
        Self {
            modulus: a.abs(),
            quadrant,
        }
    }

    pub fn imaginary(a: f64) -> Self {
        let quadrant = if a.is_sign_negative() {
            Quadrant::ImagNegative
        } else {
            Quadrant::ImagPositive
        };
        Self {
            modulus: a.abs(),
            quadrant,
        }
    }

    /// Accepts only values on the real or imaginary axis.
    pub fn from_complex(a: Complex64) -> Result<Self> {
        match (a.re == 0.0, a.im == 0.0) {
            (_, true) => Ok(Self::real(a.re)),
            (true, false) => Ok(Self::imaginary(a.im)),
            (false, false) => Err(Error::InvalidParameter(format!(
                "amplitude must be purely real or purely imaginary (got {a})"
            ))),
        }
    }

    pub fn modulus(&self) -> f64 {
        self.modulus
    }

    pub fn quadrant(&self) -> Quadrant {
        self.quadrant
    }

    pub fn to_complex(&self) -> Complex64 {
        let m = self.modulus;
        match self.quadrant {
            Quadrant::RealPositive => Complex64::new(m, 0.0),
            Quadrant::RealNegative => Complex64::new(-m, 0.0),
            Quadrant::ImagPositive => Complex64::new(0.0, m),
            Quadrant::ImagNegative => Complex64::new(0.0, -m),
        }
    }
}

/// Amplitude, wavenumber and (phase-locked only) the `tanh` weight `b`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AnsatzParams {
    family: Family,
    amplitude: Amplitude,
    wavenumber: f64,
    tanh_weight: f64,
}

impl AnsatzParams {
    pub fn single(family: Family, amplitude: Amplitude, wavenumber: f64) -> Result<Self> {
        if family == Family::PhaseLocked {
            return Err(Error::WrongFamily(family));
        }
        if !wavenumber.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "k must be finite (got {wavenumber})"
            )));
        }
        Ok(Self {
            family,
            amplitude,
            wavenumber,
            tanh_weight: 0.0,
        })
    }

    /// `ψ = i a sech(x) + b tanh(x)` with real `a`, `b`.
    pub fn phase_locked(a: f64, b: f64) -> Result<Self> {
        if !(a.is_finite() && b.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "phase-locked weights must be finite (got a={a}, b={b})"
            )));
        }
        Ok(Self {
            family: Family::PhaseLocked,
            amplitude: Amplitude::real(a),
            wavenumber: 0.0,
            tanh_weight: b,
        })
    }

    pub fn family(&self) -> Family {
        self.family
    }

    pub fn amplitude(&self) -> Amplitude {
        self.amplitude
    }

    pub fn wavenumber(&self) -> f64 {
        self.wavenumber
    }

    pub fn tanh_weight(&self) -> f64 {
        self.tanh_weight
    }

    pub fn with_amplitude(&self, amplitude: Amplitude) -> Self {
        Self { amplitude, ..*self }
    }

    pub fn with_wavenumber(&self, wavenumber: f64) -> Self {
        Self {
            wavenumber,
            ..*self
        }
    }
}

impl Serialize for AnsatzParams {
    fn serialize<S: serde::Serializer>(
        &self,
        serializer: S,
    ) -> std::result::Result<S::Ok, S::Error> {
        let a = self.amplitude.to_complex();
        let mut st = serializer.serialize_struct("AnsatzParams", 5)?;
        st.serialize_field("family", &self.family)?;
        st.serialize_field("a_re", &a.re)?;
        st.serialize_field("a_im", &a.im)?;
        st.serialize_field("k", &self.wavenumber)?;
        st.serialize_field("b", &self.tanh_weight)?;
        st.end()
    }
}

/// Envelope used for the `csch-coth` family. `AsPrinted` is the `sinh`
/// envelope that does not close the residual algebra; it exists so the
/// non-closure can be demonstrated.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum EnvelopeForm {
    #[default]
    Closing,
    AsPrinted,
}

/// Phase `Φ(x)` of the single-envelope ansatz.
///
/// * hyperbolic Scarf: `k·arctan(sinh αx)` (Gudermannian, `Φ' = kα sech αx`)
/// * trigonometric Scarf: `k·artanh(sin αx)` (`Φ' = kα sec αx`)
/// * the four linear-phase families: `kαx`
/// * phase-locked: 0
pub fn phase_profile(family: Family, k: f64, x: f64, alpha: f64) -> Result<f64> {
    let y = alpha * x;
    Ok(match family {
        Family::Scarf2Hyp => k * y.sinh().atan(),
        Family::Scarf2Trig => {
            if y.cos().abs() < crate::potential::POLE_TOLERANCE {
                return Err(Error::DomainViolation(x));
            }
            k * y.sin().atanh()
        }
        Family::RmHyp | Family::RmTrig | Family::CschCoth | Family::CscCot => k * y,
        Family::PhaseLocked => 0.0,
    })
}

fn envelope(family: Family, y: f64, form: EnvelopeForm) -> f64 {
    match family {
        Family::Scarf2Hyp | Family::RmHyp | Family::PhaseLocked => 1.0 / y.cosh(),
        Family::Scarf2Trig | Family::RmTrig => 1.0 / y.cos(),
        Family::CschCoth => match form {
            EnvelopeForm::Closing => 1.0 / y.sinh(),
            EnvelopeForm::AsPrinted => y.sinh(),
        },
        Family::CscCot => 1.0 / y.sin(),
    }
}

fn check_family(params: &AnsatzParams, spec: &PotentialSpec) -> Result<()> {
    if params.family != spec.family() {
        return Err(Error::InvalidParameter(format!(
            "ansatz family {} does not match potential family {}",
            params.family,
            spec.family()
        )));
    }
    Ok(())
}

/// `ψ(x)` at one point without pole checks.
pub(crate) fn value_unchecked(
    params: &AnsatzParams,
    alpha: f64,
    x: f64,
    form: EnvelopeForm,
) -> Complex64 {
    if params.family == Family::PhaseLocked {
        let a = params.amplitude.to_complex();
        return Complex64::i() * a / x.cosh() + params.tanh_weight * x.tanh();
    }
    let y = alpha * x;
    let phase = match params.family {
        Family::Scarf2Hyp => params.wavenumber * y.sinh().atan(),
        Family::Scarf2Trig => params.wavenumber * y.sin().atanh(),
        _ => params.wavenumber * y,
    };
    params.amplitude.to_complex()
        * envelope(params.family, y, form)
        * Complex64::from_polar(1.0, phase)
}

/// `ψ(x)` at one point.
pub fn ansatz_value(
    params: &AnsatzParams,
    spec: &PotentialSpec,
    x: f64,
    form: EnvelopeForm,
) -> Result<Complex64> {
    check_family(params, spec)?;
    spec.check_sample(x)?;
    phase_profile(params.family, params.wavenumber, x, spec.alpha())?;
    Ok(value_unchecked(params, spec.alpha(), x, form))
}

/// Samples of `ψ` on `grid`; fails with `SingularSample` near a pole.
pub fn eval_ansatz(
    params: &AnsatzParams,
    spec: &PotentialSpec,
    grid: &Grid1D,
) -> Result<ComplexField> {
    eval_ansatz_with(params, spec, grid, EnvelopeForm::Closing)
}

pub fn eval_ansatz_with(
    params: &AnsatzParams,
    spec: &PotentialSpec,
    grid: &Grid1D,
    form: EnvelopeForm,
) -> Result<ComplexField> {
    let values = grid
        .points()
        .into_iter()
        .map(|x| ansatz_value(params, spec, x, form))
        .collect::<Result<Vec<_>>>()?;
    ComplexField::new(*grid, values)
}

/// Samples of `ψ` with points closer than `radius` to a pole masked out.
pub fn eval_ansatz_masked(
    params: &AnsatzParams,
    spec: &PotentialSpec,
    grid: &Grid1D,
    radius: f64,
) -> Result<ComplexField> {
    check_family(params, spec)?;
    let radius = radius.max(crate::potential::POLE_TOLERANCE);
    let points = grid.points();
    let mask: Vec<bool> = points
        .iter()
        .map(|&x| spec.distance_to_pole(x).map_or(true, |(d, _)| d >= radius))
        .collect();
    let values = points
        .iter()
        .zip(&mask)
        .map(|(&x, &ok)| {
            if ok {
                value_unchecked(params, spec.alpha(), x, EnvelopeForm::Closing)
            } else {
                Complex64::new(0.0, 0.0)
            }
        })
        .collect();
    ComplexField::with_mask(*grid, values, mask)
}
