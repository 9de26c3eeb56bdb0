//! Construction, consistency solving, residual verification and split-step
//! propagation of exact solutions of the stationary nonlinear Schrödinger
//! equation
//!
//! ```text
//! -ψ'' + V(x) ψ + g |ψ|² ψ - μ ψ = E ψ
//! ```
//!
//! with PT-symmetric complex potentials `V = V_e + i V_o`.
//!
//! ```
//! use ptnlse_core::{solve, verify, Family, PotentialSpec, SystemParams};
//!
//! let spec = PotentialSpec::new(Family::Scarf2Hyp, 4.0, 3.0, 1.0).unwrap();
//! let sys = SystemParams::new(1.0, 0.0).unwrap();
//! let report = solve(&spec, &sys).unwrap();
//! assert_eq!((report.k, report.energy), (-1.0, -1.0));
//! assert!(verify(&spec, &sys).unwrap().pass);
//! ```

pub mod ansatz;
pub mod consistency;
pub mod deriv;
pub mod error;
pub mod field;
pub mod grid;
pub mod potential;
pub mod propagate;
pub mod report;
pub mod verify;

pub use ansatz::{eval_ansatz, Amplitude, AnsatzParams, EnvelopeForm, Quadrant};
pub use consistency::{
    collocation_conditions, compare_printed, solve, solve_closed_form, solve_phase_locked,
    ConsistencyReport, SystemParams,
};
pub use deriv::{second_derivative, DerivativeMethod};
pub use error::{Error, Result};
pub use field::ComplexField;
pub use grid::Grid1D;
pub use potential::{pt_defect, Family, PotentialSpec};
pub use propagate::{norm_balance, split_step, EvolutionConfig, EvolutionResult};
pub use verify::{
    local_eigenvalue, nlse_residual, pt_defect_state, verify, verify_with, VerificationReport,
    VerifyOptions,
};
