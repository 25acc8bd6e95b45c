//! Parametric instability of two coupled non-Hermitian modes near the
//! exceptional point.
//!
//! Two coupled waveguides with gain/loss contrast `g` and coupling `kappa`
//! have eigenmodes that both decay once `|kappa| > g`, yet their
//! non-orthogonality lets a periodic modulation of the coupling pump energy
//! into the guides. The crate provides
//!
//! * the closed-form spectrum of the 2×2 generator, including the Jordan
//!   chain at the exceptional point ([`spectral`]),
//! * the diagonal/interference split of the energy and the interference
//!   phase ([`energy`]),
//! * piecewise-constant coupling schedules ([`schedule`]),
//! * exact linear propagation and RK4 for saturable gain ([`propagation`]),
//! * scenario runs and transmission sweeps ([`experiments`]),
//! * a flat `key = value` config format and CSV output ([`config`],
//!   [`csv_out`]).
//!
//! ```
//! use piep::{build_generator, spectral_decompose, SystemParams, DEFAULT_EP_TOL};
//!
//! let p = SystemParams::from_squared(2.5e-3, 5e-3, 1.01)?;
//! let sd = spectral_decompose(&build_generator(&p)?, DEFAULT_EP_TOL)?;
//! assert!((sd.e1().re - 0.005).abs() < 1e-12);
//! assert!((sd.overlap.norm() - 0.995037).abs() < 1e-6);
//! # Ok::<(), piep::Error>(())
//! ```

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod config;
pub mod csv_out;
pub mod energy;
pub mod error;
pub mod experiments;
pub mod linalg;
pub mod propagation;
pub mod schedule;
pub mod spectral;

pub use energy::{
    decompose_state, energy_closed_form, energy_expectation, oscillation_phase, waveguide_energy,
    EnergyBreakdown, Evolution,
};
pub use error::{Error, Result};
pub use experiments::{
    phase_aligned_start, run_scenario, sweep_perturbation_length, sweep_period_length,
    transmission, EigenSample, InitialState, ScenarioConfig, ScenarioRun, SweepRow,
};
pub use linalg::{Mat2, Vec2, C64};
pub use propagation::{
    propagate_endpoint, propagate_linear, propagate_nonlinear, propagator_matrix,
    NonlinearParams, Propagator, Trajectory,
};
pub use schedule::{optimal_period, CouplingSchedule, Segment};
pub use spectral::{
    build_generator, eigen_overlap, expand_orthogonal_mix, jordan_chain, spectral_decompose,
    Generator, JordanChain, Overlap, SpectralData, SystemParams, DEFAULT_EP_TOL,
};
