//! The catalogue of PT-symmetric complex potentials `V = V_e + i V_o`.

use std::f64::consts::{FRAC_PI_2, PI};
use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::field::ComplexField;
use crate::grid::Grid1D;

/// Distance below which a sample counts as sitting on a pole.
pub const POLE_TOLERANCE: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Family {
    /// `-A sech²(αx) + iαB sech(αx) tanh(αx)`
    Scarf2Hyp,
    /// `-A sec²(αx) + iαB sec(αx) tan(αx)`
    Scarf2Trig,
    /// `-A sech²(αx) + iαB tanh(αx)`
    RmHyp,
    /// `-A sec²(αx) + iαB tan(αx)`
    RmTrig,
    /// `-A csch²(αx) + iαB coth(αx)`
    CschCoth,
    /// `-A csc²(αx) + iαB cot(αx)`
    CscCot,
    /// `-A sech²(x) + iB sech(x) tanh(x)`, paired with the `i a sech + b tanh` ansatz
    PhaseLocked,
}

impl Family {
    pub const ALL: [Family; 7] = [
        Family::Scarf2Hyp,
        Family::Scarf2Trig,
        Family::RmHyp,
        Family::RmTrig,
        Family::CschCoth,
        Family::CscCot,
        Family::PhaseLocked,
    ];

    /// The six families with a single-envelope ansatz and closed-form conditions.
    pub const SINGLE_ENVELOPE: [Family; 6] = [
        Family::Scarf2Hyp,
        Family::Scarf2Trig,
        Family::RmHyp,
        Family::RmTrig,
        Family::CschCoth,
        Family::CscCot,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Family::Scarf2Hyp => "scarf2-hyp",
            Family::Scarf2Trig => "scarf2-trig",
            Family::RmHyp => "rm-hyp",
            Family::RmTrig => "rm-trig",
            Family::CschCoth => "csch-coth",
            Family::CscCot => "csc-cot",
            Family::PhaseLocked => "phase-locked",
        }
    }

    /// Families whose potential or ansatz has real poles.
    pub fn is_singular(self) -> bool {
        matches!(
            self,
            Family::Scarf2Trig | Family::RmTrig | Family::CschCoth | Family::CscCot
        )
    }

    /// Families whose stationary state decays at both ends.
    pub fn is_decaying(self) -> bool {
        matches!(self, Family::Scarf2Hyp | Family::RmHyp)
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct UnknownFamily(pub String);

impl fmt::Display for UnknownFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "unknown family '{}' (expected one of: ", self.0)?;
        for (i, fam) in Family::ALL.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            f.write_str(fam.name())?;
        }
        f.write_str(")")
    }
}

impl std::error::Error for UnknownFamily {}

impl FromStr for Family {
    type Err = UnknownFamily;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        Family::ALL
            .into_iter()
            .find(|f| f.name() == s)
            .ok_or_else(|| UnknownFamily(s.to_owned()))
    }
}

/// Family plus the real parameters `A` (well depth), `B` (gain/loss
/// strength) and the inverse length `α`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PotentialSpec {
    family: Family,
    #[serde(rename = "A")]
    depth: f64,
    #[serde(rename = "B")]
    gain_loss: f64,
    alpha: f64,
}

impl PotentialSpec {
    pub fn new(family: Family, depth: f64, gain_loss: f64, alpha: f64) -> Result<Self> {
        if !depth.is_finite() || !gain_loss.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "A and B must be finite (got A={depth}, B={gain_loss})"
            )));
        }
        if !(alpha > 0.0 && alpha.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "alpha must be positive (got {alpha})"
            )));
        }
        if family == Family::PhaseLocked && alpha != 1.0 {
            return Err(Error::InvalidParameter(format!(
                "the phase-locked family has alpha fixed at 1 (got {alpha})"
            )));
        }
        Ok(Self {
            family,
            depth,
            gain_loss,
            alpha,
        })
    }

    pub fn phase_locked(depth: f64, gain_loss: f64) -> Result<Self> {
        Self::new(Family::PhaseLocked, depth, gain_loss, 1.0)
    }

    pub fn family(&self) -> Family {
        self.family
    }

    /// `A`
    pub fn depth(&self) -> f64 {
        self.depth
    }

    /// `B`
    pub fn gain_loss(&self) -> f64 {
        self.gain_loss
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn with_gain_loss(&self, gain_loss: f64) -> Self {
        Self { gain_loss, ..*self }
    }

    /// `V(x)` at a single point. Poles produce non-finite values.
    pub fn value_at(&self, x: f64) -> Complex64 {
        let (a, b, al) = (self.depth, self.gain_loss, self.alpha);
        let y = al * x;
        let (re, im) = match self.family {
            Family::Scarf2Hyp => {
                let s = 1.0 / y.cosh();
                (-a * s * s, al * b * s * y.tanh())
            }
            Family::Scarf2Trig => {
                let c = 1.0 / y.cos();
                (-a * c * c, al * b * c * y.tan())
            }
            Family::RmHyp => {
                let s = 1.0 / y.cosh();
                (-a * s * s, al * b * y.tanh())
            }
            Family::RmTrig => {
                let c = 1.0 / y.cos();
                (-a * c * c, al * b * y.tan())
            }
            Family::CschCoth => {
                let h = 1.0 / y.sinh();
                (-a * h * h, al * b / y.tanh())
            }
            Family::CscCot => {
                let w = 1.0 / y.sin();
                (-a * w * w, al * b / y.tan())
            }
            Family::PhaseLocked => {
                let s = 1.0 / x.cosh();
                (-a * s * s, b * s * x.tanh())
            }
        };
        Complex64::new(re, im)
    }

    /// Poles of the family in `[lower, upper]`, ascending.
    pub fn singularities(&self, lower: f64, upper: f64) -> Vec<f64> {
        let period = PI / self.alpha;
        let offset = match self.family {
            Family::Scarf2Trig | Family::RmTrig => FRAC_PI_2 / self.alpha,
            Family::CscCot => 0.0,
            Family::CschCoth => {
                return if lower <= 0.0 && 0.0 <= upper {
                    vec![0.0]
                } else {
                    Vec::new()
                };
            }
            Family::Scarf2Hyp | Family::RmHyp | Family::PhaseLocked => return Vec::new(),
        };
        if !(lower.is_finite() && upper.is_finite()) || upper < lower {
            return Vec::new();
        }
        let first = ((lower - offset) / period).ceil() as i64;
        let last = ((upper - offset) / period).floor() as i64;
        (first..=last)
            .map(|m| offset + m as f64 * period)
            .filter(|&p| p >= lower && p <= upper)
            .collect()
    }

    /// Distance from `x` to the closest pole, if the family has any.
    pub fn distance_to_pole(&self, x: f64) -> Option<(f64, f64)> {
        let period = PI / self.alpha;
        let pole = match self.family {
            Family::Scarf2Trig | Family::RmTrig => {
                let off = FRAC_PI_2 / self.alpha;
                off + ((x - off) / period).round() * period
            }
            Family::CscCot => (x / period).round() * period,
            Family::CschCoth => 0.0,
            _ => return None,
        };
        Some(((x - pole).abs(), pole))
    }

    pub(crate) fn check_sample(&self, x: f64) -> Result<()> {
        match self.distance_to_pole(x) {
            Some((d, pole)) if d < POLE_TOLERANCE => Err(Error::SingularSample {
                x,
                pole,
                tolerance: POLE_TOLERANCE,
            }),
            _ => Ok(()),
        }
    }

    /// Samples of `V` on `grid`.
    pub fn eval(&self, grid: &Grid1D) -> Result<ComplexField> {
        let values = grid
            .points()
            .into_iter()
            .map(|x| self.check_sample(x).map(|_| self.value_at(x)))
            .collect::<Result<Vec<_>>>()?;
        ComplexField::new(*grid, values)
    }

    /// Samples of `V` with every point closer than `radius` to a pole masked out.
    pub fn eval_masked(&self, grid: &Grid1D, radius: f64) -> Result<ComplexField> {
        let radius = radius.max(POLE_TOLERANCE);
        let points = grid.points();
        let mask: Vec<bool> = points
            .iter()
            .map(|&x| self.distance_to_pole(x).map_or(true, |(d, _)| d >= radius))
            .collect();
        let values = points
            .iter()
            .zip(&mask)
            .map(|(&x, &ok)| {
                if ok {
                    self.value_at(x)
                } else {
                    Complex64::new(0.0, 0.0)
                }
            })
            .collect();
        ComplexField::with_mask(*grid, values, mask)
    }
}

/// `max_x |conj(V(-x)) - V(x)|` over unmasked mirror pairs.
pub fn pt_defect(v: &ComplexField) -> Result<f64> {
    let grid = v.grid();
    let mut worst = 0.0f64;
    for j in 0..grid.len() {
        let m = grid.mirror(j)?;
        // the periodic wrap sample x = -L has no partner on the grid
        if grid.is_periodic() && j == 0 {
            continue;
        }
        if v.is_valid(j) && v.is_valid(m) {
            worst = worst.max((v.values()[m].conj() - v.values()[j]).norm());
        }
    }
    Ok(worst)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn spec(f: Family, a: f64, b: f64, al: f64) -> PotentialSpec {
        PotentialSpec::new(f, a, b, al).unwrap()
    }

    #[test]
    fn family_names_round_trip() {
        for f in Family::ALL {
            assert_eq!(f.name().parse::<Family>().unwrap(), f);
            assert_eq!(
                serde_json::to_string(&f).unwrap(),
                format!("\"{}\"", f.name())
            );
        }
        assert!("nosuch".parse::<Family>().is_err());
    }

    #[test]
    fn reference_values() {
        let v = spec(Family::Scarf2Hyp, 4.0, 3.0, 1.0).value_at(0.0);
        assert_eq!(v, Complex64::new(-4.0, 0.0));

        let v = spec(Family::RmHyp, 2.0, 1.5, 1.0).value_at(40.0);
        assert!((v - Complex64::new(0.0, 1.5)).norm() < 1e-15);

        let v = spec(Family::CscCot, 2.0, 1.0, 1.0).value_at(FRAC_PI_2);
        assert!((v - Complex64::new(-2.0, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn singularities_listing() {
        assert!(spec(Family::Scarf2Hyp, 1.0, 1.0, 1.0)
            .singularities(-10.0, 10.0)
            .is_empty());
        let p = spec(Family::Scarf2Trig, 1.0, 1.0, 1.0).singularities(-2.0, 2.0);
        assert_eq!(p.len(), 2);
        assert!((p[0] + FRAC_PI_2).abs() < 1e-15 && (p[1] - FRAC_PI_2).abs() < 1e-15);
        let p = spec(Family::CscCot, 1.0, 1.0, 1.0).singularities(0.1, 4.0);
        assert_eq!(p, vec![PI]);
        let p = spec(Family::CschCoth, 1.0, 1.0, 2.0).singularities(-1.0, 1.0);
        assert_eq!(p, vec![0.0]);
        let p = spec(Family::RmTrig, 1.0, 1.0, 2.0).singularities(-2.0, 2.0);
        assert_eq!(p.len(), 2);
        let p = spec(Family::RmTrig, 1.0, 1.0, 2.0).singularities(-3.0, 3.0);
        assert_eq!(p.len(), 4);
        assert!(p.windows(2).all(|w| w[0] < w[1]));
    }

    #[test]
    fn singular_sample_detected() {
        // symmetric grid with a sample at exactly 0
        let grid = Grid1D::symmetric(1.0, 33, false).unwrap();
        let s = spec(Family::CscCot, 1.0, 1.0, 1.0);
        assert!(matches!(s.eval(&grid), Err(Error::SingularSample { .. })));
        let masked = s.eval_masked(&grid, 0.1).unwrap();
        assert!(!masked.is_valid(16));
        assert!(masked.is_valid(0));
    }

    #[test]
    fn phase_locked_alpha_is_fixed() {
        assert!(PotentialSpec::new(Family::PhaseLocked, 1.0, 1.0, 2.0).is_err());
        assert!(PotentialSpec::new(Family::Scarf2Hyp, 1.0, 1.0, 0.0).is_err());
        assert!(PotentialSpec::new(Family::Scarf2Hyp, f64::NAN, 1.0, 1.0).is_err());
    }

    #[test]
    fn defect_examples() {
        let grid = Grid1D::symmetric(10.0, 512, true).unwrap();
        let v = ComplexField::from_fn(grid, |x| Complex64::new(0.0, 1.0 / x.cosh())).unwrap();
        assert!((pt_defect(&v).unwrap() - 2.0).abs() < 1e-15);
        let v = ComplexField::from_fn(grid, |x| Complex64::new((-x * x).exp(), 0.0)).unwrap();
        assert_eq!(pt_defect(&v).unwrap(), 0.0);
    }

    #[test]
    fn trig_scarf_is_analytic_continuation() {
        // sech(iy) = sec(y), tanh(iy) = i tan(y): substituting α -> iα in the
        // hyperbolic formula gives the trigonometric one with B -> -B
        let (a, b, al) = (1.7, 0.6, 0.8);
        let trig = spec(Family::Scarf2Trig, a, -b, al);
        for &x in &[-1.5, -0.7, 0.0, 0.3, 1.1, 1.9] {
            let y = Complex64::new(0.0, al * x);
            let s = 1.0 / y.cosh();
            let hyp = -a * s * s + Complex64::i() * Complex64::new(0.0, al) * b * s * y.tanh();
            assert!((hyp - trig.value_at(x)).norm() < 1e-12, "x={x}");
        }
    }

    fn family_strategy() -> impl Strategy<Value = Family> {
        prop::sample::select(Family::ALL.to_vec())
    }

    proptest! {
        #[test]
        fn even_real_odd_imaginary(
            fam in family_strategy(),
            a in -10.0f64..10.0,
            b in -10.0f64..10.0,
            al in 0.2f64..3.0,
            x in 0.05f64..3.0,
        ) {
            let al = if fam == Family::PhaseLocked { 1.0 } else { al };
            let s = spec(fam, a, b, al);
            prop_assume!(s.distance_to_pole(x).map_or(true, |(d, _)| d > 1e-3));
            let (p, m) = (s.value_at(x), s.value_at(-x));
            prop_assert!((p.re - m.re).abs() <= 1e-14 * p.re.abs().max(1.0));
            prop_assert!((p.im + m.im).abs() <= 1e-14 * p.im.abs().max(1.0));

            let flipped = s.with_gain_loss(-b).value_at(x);
            prop_assert_eq!(flipped.re, p.re);
            prop_assert!((flipped.im + p.im).abs() <= 1e-15 * p.im.abs().max(1.0));
        }

        #[test]
        fn catalog_defect_vanishes(
            fam in family_strategy(),
            a in -10.0f64..10.0,
            b in -10.0f64..10.0,
            al in 0.2f64..3.0,
        ) {
            let al = if fam == Family::PhaseLocked { 1.0 } else { al };
            let s = spec(fam, a, b, al);
            let grid = Grid1D::symmetric(1.3 / al, 256, false).unwrap();
            let v = s.eval_masked(&grid, 0.1 / al).unwrap();
            prop_assert!(pt_defect(&v).unwrap() < 1e-14);
        }
    }
}
