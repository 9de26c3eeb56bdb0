//! Closed-form solutions of the single-envelope consistency systems.

use super::collocation::collocation_conditions;
use super::comparison::compare_printed;
use super::{AmplitudeSolution, ConsistencyReport, SystemParams};
use crate::ansatz::{Amplitude, AnsatzParams};
use crate::error::{Error, Result};
use crate::potential::{Family, PotentialSpec};

/// `k`, required `g|a|²` and `E`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ClosedForm {
    pub k: f64,
    pub gaa: f64,
    pub energy: f64,
}

impl ClosedForm {
    /// `g|a|²/g > 0`: a real non-zero amplitude exists.
    pub fn exists(&self, sys: &SystemParams) -> bool {
        self.gaa / sys.g() > 0.0
    }

    pub fn modulus(&self, sys: &SystemParams) -> Option<f64> {
        self.exists(sys).then(|| (self.gaa / sys.g()).sqrt())
    }
}

/// Closed-form `(k, g|a|², E)` plus any notes from sign arbitration.
pub fn closed_form(spec: &PotentialSpec, sys: &SystemParams) -> Result<(ClosedForm, Vec<String>)> {
    let (a, b, al, mu) = (spec.depth(), spec.gain_loss(), spec.alpha(), sys.mu());
    let al2 = al * al;
    let mut notes = Vec::new();
    let cf = match spec.family() {
        Family::Scarf2Hyp => {
            let k = -b / (3.0 * al);
            ClosedForm {
                k,
                gaa: a - (2.0 + k * k) * al2,
                energy: -al2 - mu,
            }
        }
        Family::Scarf2Trig => {
            let k = b / (3.0 * al);
            ClosedForm {
                k,
                gaa: (2.0 - k * k) * al2 + a,
                energy: al2 - mu,
            }
        }
        Family::RmHyp => {
            let k = -b / (2.0 * al);
            ClosedForm {
                k,
                gaa: a - 2.0 * al2,
                energy: (k * k - 1.0) * al2 - mu,
            }
        }
        Family::RmTrig => {
            let k = b / (2.0 * al);
            ClosedForm {
                k,
                gaa: a + 2.0 * al2,
                energy: (k * k + 1.0) * al2 - mu,
            }
        }
        Family::CschCoth => {
            let k = -b / (2.0 * al);
            let energy = (k * k - 1.0) * al2 - mu;
            let (gaa, note) = arbitrate_csch(spec, sys, k, energy)?;
            notes.push(note);
            ClosedForm { k, gaa, energy }
        }
        Family::CscCot => {
            let k = -b / (2.0 * al);
            ClosedForm {
                k,
                gaa: 2.0 * al2 + a,
                energy: (k * k + 1.0) * al2 - mu,
            }
        }
        Family::PhaseLocked => return Err(Error::WrongFamily(Family::PhaseLocked)),
    };
    Ok((cf, notes))
}

// The amplitude condition for the csch envelope is decided numerically:
// each candidate g|a|² is plugged into the collocation residual (a = 1,
// g = candidate) and the one whose csch³ coefficient vanishes wins.
fn arbitrate_csch(
    spec: &PotentialSpec,
    sys: &SystemParams,
    k: f64,
    energy: f64,
) -> Result<(f64, String)> {
    let al2 = spec.alpha() * spec.alpha();
    let candidates = [2.0 * al2 + spec.depth(), 2.0 * al2 - spec.depth()];
    let params = AnsatzParams::single(Family::CschCoth, Amplitude::real(1.0), k)?;
    let mut scored = Vec::with_capacity(2);
    for gaa in candidates {
        let probe = SystemParams::unchecked(gaa, sys.mu());
        let c = collocation_conditions(spec, &params, &probe, energy)?;
        scored.push((gaa, c.coefficients[1].norm()));
    }
    let best = if scored[0].1 <= scored[1].1 {
        scored[0]
    } else {
        scored[1]
    };
    let note = format!(
        "amplitude sign arbitrated by collocation: g|a|^2 = 2alpha^2+A = {:.6} leaves csch^3 coefficient {:.3e}; \
         g|a|^2 = 2alpha^2-A = {:.6} leaves {:.3e}; using {:.6}",
        scored[0].0, scored[0].1, scored[1].0, scored[1].1, best.0
    );
    Ok((best.0, note))
}

pub fn solve_closed_form(spec: &PotentialSpec, sys: &SystemParams) -> Result<ConsistencyReport> {
    let (cf, mut discrepancies) = closed_form(spec, sys)?;
    let exists = cf.exists(sys);
    discrepancies.extend(compare_printed(spec, sys)?.discrepancy_notes());
    if !exists {
        discrepancies.push(format!(
            "no real amplitude: required g|a|^2 = {} has the opposite sign to g = {}",
            cf.gaa,
            sys.g()
        ));
    }
    Ok(ConsistencyReport {
        family: spec.family(),
        k: cf.k,
        required_gaa: cf.gaa,
        amplitudes: cf
            .modulus(sys)
            .map(AmplitudeSolution::Modulus)
            .into_iter()
            .collect(),
        energy: cf.energy,
        exists,
        discrepancies,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sys(g: f64, mu: f64) -> SystemParams {
        SystemParams::new(g, mu).unwrap()
    }

    #[test]
    fn scarf_reference_point() {
        let spec = PotentialSpec::new(Family::Scarf2Hyp, 4.0, 3.0, 1.0).unwrap();
        let r = solve_closed_form(&spec, &sys(1.0, 0.0)).unwrap();
        assert_eq!(r.k, -1.0);
        assert_eq!(r.required_gaa, 1.0);
        assert_eq!(r.energy, -1.0);
        assert!(r.exists);
        assert_eq!(r.amplitudes, vec![AmplitudeSolution::Modulus(1.0)]);
    }

    #[test]
    fn scarf_without_gain_loss_has_zero_k() {
        let spec = PotentialSpec::new(Family::Scarf2Hyp, 4.0, 0.0, 1.0).unwrap();
        let r = solve_closed_form(&spec, &sys(1.0, 0.0)).unwrap();
        assert_eq!(r.k, 0.0);
    }

    #[test]
    fn shallow_scarf_has_no_real_amplitude() {
        let spec = PotentialSpec::new(Family::Scarf2Hyp, 1.0, 3.0, 1.0).unwrap();
        let r = solve_closed_form(&spec, &sys(1.0, 0.0)).unwrap();
        assert!(!r.exists);
        assert_eq!(r.required_gaa, -2.0);
        assert!(r.amplitudes.is_empty());
        // the attractive sign flips existence
        let r = solve_closed_form(&spec, &sys(-1.0, 0.0)).unwrap();
        assert!(r.exists);
    }

    #[test]
    fn csch_arbitration_picks_plus_sign() {
        let spec = PotentialSpec::new(Family::CschCoth, 4.0, 3.0, 1.0).unwrap();
        let (cf, notes) = closed_form(&spec, &sys(1.0, 0.0)).unwrap();
        assert!((cf.gaa - 6.0).abs() < 1e-12);
        assert!(notes[0].contains("-2.000000"), "{}", notes[0]);
    }

    #[test]
    fn phase_locked_rejected() {
        let spec = PotentialSpec::phase_locked(1.0, 1.0).unwrap();
        assert!(matches!(
            solve_closed_form(&spec, &sys(1.0, 0.0)),
            Err(Error::WrongFamily(_))
        ));
    }

    #[test]
    fn closed_forms_zero_collocation() {
        for fam in Family::SINGLE_ENVELOPE {
            let spec = PotentialSpec::new(fam, 6.0, 0.7, 1.3).unwrap();
            let s = sys(0.8, 0.25);
            let (cf, _) = closed_form(&spec, &s).unwrap();
            let m = cf.modulus(&s).unwrap();
            let p = AnsatzParams::single(fam, Amplitude::imaginary(m), cf.k).unwrap();
            let c = collocation_conditions(&spec, &p, &s, cf.energy).unwrap();
            assert!(c.max_coefficient() < 1e-8, "{fam}: {:?}", c.coefficients);
        }
    }

    #[test]
    fn gain_loss_scaling() {
        for fam in Family::SINGLE_ENVELOPE {
            let spec = PotentialSpec::new(fam, 3.0, 0.6, 1.1).unwrap();
            let s = sys(1.0, 0.0);
            let (c1, _) = closed_form(&spec, &s).unwrap();
            let (c2, _) = closed_form(&spec.with_gain_loss(1.5), &s).unwrap();
            assert!((c2.k - 2.5 * c1.k).abs() < 1e-12);
            let scarf = matches!(fam, Family::Scarf2Hyp | Family::Scarf2Trig);
            if scarf {
                assert_eq!(c1.energy, c2.energy);
            } else {
                let de = c2.energy - c1.energy;
                let expect = (c2.k * c2.k - c1.k * c1.k) * 1.1 * 1.1;
                assert!((de - expect).abs() < 1e-12);
            }
        }
    }
}
