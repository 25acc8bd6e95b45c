//! Scenario runs and parameter sweeps.
//!
//! A scenario propagates one initial state through a coupling schedule and
//! records, next to the amplitudes, the instantaneous spectrum and the
//! interference phase. Sweeps compare the transmission of a periodically
//! perturbed guide against the same guide without perturbation.

use std::f64::consts::PI;

use rayon::prelude::*;

use crate::energy::{decompose_state, oscillation_phase, wrap_phase};
use crate::error::{Error, Result};
use crate::linalg::{Vec2, C64};
use crate::propagation::{
    nonlinear_generator_at, propagate_endpoint, propagate_linear_with_tol, propagate_nonlinear,
    NonlinearParams, Propagator, Trajectory,
};
use crate::schedule::{optimal_period, CouplingSchedule};
use crate::spectral::{build_generator, spectral_decompose, Generator, SpectralData, SystemParams};

/// Initial amplitudes, either per waveguide or per eigenmode of the base
/// generator.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum InitialState {
    Waveguide(Vec2),
    Eigen { a1: C64, a2: C64 },
}

impl InitialState {
    /// Waveguide amplitudes; eigen coefficients are expanded in `sd`.
    pub fn resolve(&self, sd: &SpectralData) -> Result<Vec2> {
        match *self {
            InitialState::Waveguide(u) => Ok(u),
            InitialState::Eigen { a1, a2 } => {
                if sd.is_defective {
                    return Err(Error::ExceptionalPoint(
                        "eigen coefficients need a diagonalizable base generator".into(),
                    ));
                }
                Ok(sd.right[0].scale(a1) + sd.right[1].scale(a2))
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScenarioConfig {
    /// Base parameters; `params.kappa` is overridden by the schedule.
    pub params: SystemParams,
    pub schedule: CouplingSchedule,
    pub initial: InitialState,
    /// Rescale the initial state to unit energy.
    pub normalize: bool,
    pub nonlinear: Option<NonlinearParams>,
    pub sample_dz: f64,
    /// RK4 step for the nonlinear path.
    pub rk4_step: f64,
    pub ep_tol: f64,
}

impl ScenarioConfig {
    pub fn base_params(&self) -> SystemParams {
        self.params.with_kappa(self.schedule.kappa_base)
    }

    pub fn base_spectrum(&self) -> Result<SpectralData> {
        spectral_decompose(&build_generator(&self.base_params())?, self.ep_tol)
    }

    /// Initial waveguide amplitudes.
    pub fn initial_state(&self) -> Result<Vec2> {
        let u = self.initial.resolve(&self.base_spectrum()?)?;
        if !self.normalize {
            return Ok(u);
        }
        let n = u.norm();
        if !(n > 0.0) {
            return Err(Error::DegenerateInput("cannot normalize a zero state".into()));
        }
        Ok(u.scale(C64::new(1.0 / n, 0.0)))
    }
}

/// Instantaneous spectral data attached to one sample.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EigenSample {
    /// `Re(E1 - E2)`.
    pub re_de: f64,
    pub im_e1: f64,
    pub im_e2: f64,
    /// Interference phase of the state in the instantaneous eigenbasis; NaN
    /// at the EP or when one mode is absent.
    pub cos_phase: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScenarioRun {
    pub trajectory: Trajectory,
    pub eigen: Vec<EigenSample>,
}

fn eigen_sample(gen: &Generator, state: &Vec2, ep_tol: f64) -> Result<EigenSample> {
    let [e1, e2] = gen.eigenvalues();
    let sd = spectral_decompose(gen, ep_tol)?;
    let cos_phase = decompose_state(state, &sd)
        .and_then(|(a1, a2)| oscillation_phase(a1, a2, &sd))
        .map_or(f64::NAN, |(_, c)| c);
    Ok(EigenSample {
        re_de: (e1 - e2).re,
        im_e1: e1.im,
        im_e2: e2.im,
        cos_phase,
    })
}

/// Propagates the configured state and attaches per-sample spectral traces.
pub fn run_scenario(cfg: &ScenarioConfig) -> Result<ScenarioRun> {
    let u0 = cfg.initial_state()?;
    let params = cfg.base_params();
    let trajectory = match &cfg.nonlinear {
        None => propagate_linear_with_tol(u0, &cfg.schedule, &params, cfg.sample_dz, cfg.ep_tol)?,
        Some(nl) => propagate_nonlinear(u0, &cfg.schedule, &params, nl, cfg.rk4_step)?,
    };
    let eigen = trajectory
        .z
        .iter()
        .zip(&trajectory.states)
        .map(|(&z, u)| {
            let kappa = cfg.schedule.kappa_at(z.min(cfg.schedule.z_total))?;
            let gen = match &cfg.nonlinear {
                None => build_generator(&params.with_kappa(kappa))?,
                Some(nl) => nonlinear_generator_at(&params, nl, kappa, u)?,
            };
            eigen_sample(&gen, u, cfg.ep_tol)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(ScenarioRun { trajectory, eigen })
}

/// `E(z_total) / E(0)` with `E = |u1|² + |u2|²`.
pub fn transmission(traj: &Trajectory) -> Result<f64> {
    let (first, last) = match (traj.energies.first(), traj.energies.last()) {
        (Some(a), Some(b)) => (*a, *b),
        _ => return Err(Error::DegenerateInput("empty trajectory".into())),
    };
    endpoint_transmission(first, last)
}

fn endpoint_transmission(e0: f64, e1: f64) -> Result<f64> {
    if !(e0 > 0.0) {
        return Err(Error::DegenerateInput("initial energy is zero".into()));
    }
    Ok(e1 / e0)
}

/// Smallest `z >= 0` at which the unperturbed evolution of `state` has
/// `cos Φ = +1`.
///
/// The interference phase of `e^{iMz}` evolution decreases as
/// `Φ(z) = Φ(0) - ω z` with `ω = |Re(E1 - E2)|`.
pub fn phase_aligned_start(params: &SystemParams, state: &Vec2, ep_tol: f64) -> Result<f64> {
    let sd = spectral_decompose(&build_generator(params)?, ep_tol)?;
    let (a1, a2) = decompose_state(state, &sd)?;
    let (phi, _) = oscillation_phase(a1, a2, &sd)?;
    let omega = (sd.e1() - sd.e2()).re.abs();
    if omega == 0.0 {
        return Err(Error::ExceptionalPoint(
            "eigenvalues share their real part; the phase does not rotate".into(),
        ));
    }
    Ok(wrap_phase(phi) / omega)
}

/// One cell of a transmission sweep.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepRow {
    pub delta_z: f64,
    /// `period / optimal_period(base)`.
    pub period_ratio: f64,
    /// Perturbed over unperturbed transmission.
    pub ratio: f64,
    pub log10_ratio: f64,
    /// `cos Φ` right after the first window, in the base eigenbasis.
    pub cos_phase_f: f64,
}

struct SweepContext {
    params: SystemParams,
    sd: SpectralData,
    u0: Vec2,
    base: Propagator,
    pert: Propagator,
    t_unpert: f64,
    optimal: f64,
}

impl SweepContext {
    fn new(cfg: &ScenarioConfig) -> Result<Self> {
        let params = cfg.base_params();
        let sd = cfg.base_spectrum()?;
        if sd.is_defective {
            return Err(Error::ExceptionalPoint(
                "base coupling sits at the EP; no eigenbasis for the phase diagnostic".into(),
            ));
        }
        let u0 = cfg.initial_state()?;
        let base = Propagator::new(&build_generator(&params)?, cfg.ep_tol)?;
        let pert = Propagator::new(
            &build_generator(&params.with_kappa(cfg.schedule.kappa_pert))?,
            cfg.ep_tol,
        )?;
        let end = propagate_endpoint(u0, &cfg.schedule.unperturbed(), &params, cfg.ep_tol)?;
        let t_unpert = endpoint_transmission(u0.norm_sqr(), end.norm_sqr())?;
        let optimal = optimal_period(&params)?;
        Ok(SweepContext {
            params,
            sd,
            u0,
            base,
            pert,
            t_unpert,
            optimal,
        })
    }

    fn cos_after_first_window(&self, z_first: f64, delta_z: f64) -> Result<f64> {
        let u = self.base.matrix(z_first).mul_vec(&self.u0);
        let u = self.pert.matrix(delta_z).mul_vec(&u);
        let (a1, a2) = decompose_state(&u, &self.sd)?;
        Ok(oscillation_phase(a1, a2, &self.sd)?.1)
    }

    fn row(&self, cfg: &ScenarioConfig, period: f64, delta_z: f64) -> Result<SweepRow> {
        let schedule = CouplingSchedule {
            delta_z,
            period,
            ..cfg.schedule
        };
        schedule.validate()?;
        let end = propagate_endpoint(self.u0, &schedule, &self.params, cfg.ep_tol)?;
        let t = endpoint_transmission(self.u0.norm_sqr(), end.norm_sqr())?;
        let ratio = t / self.t_unpert;
        if !(ratio > 0.0) || !ratio.is_finite() {
            return Err(Error::DegenerateInput(format!(
                "transmission ratio {ratio} at delta_z = {delta_z}"
            )));
        }
        Ok(SweepRow {
            delta_z,
            period_ratio: period / self.optimal,
            ratio,
            log10_ratio: ratio.log10(),
            cos_phase_f: self.cos_after_first_window(cfg.schedule.z_first, delta_z)?,
        })
    }
}

/// Transmission ratio and post-window phase for each window length, with
/// the schedule's period, start and total length held fixed.
pub fn sweep_perturbation_length(cfg: &ScenarioConfig, dz_grid: &[f64]) -> Result<Vec<SweepRow>> {
    let ctx = SweepContext::new(cfg)?;
    dz_grid
        .par_iter()
        .map(|&dz| ctx.row(cfg, cfg.schedule.period, dz))
        .collect()
}

/// Ratio grid over `period = ratio * optimal_period` and window length, at
/// fixed start and total length. Rows come out period-major in input order.
pub fn sweep_period_length(
    cfg: &ScenarioConfig,
    period_ratios: &[f64],
    dz_grid: &[f64],
) -> Result<Vec<SweepRow>> {
    let ctx = SweepContext::new(cfg)?;
    let cells: Vec<(f64, f64)> = period_ratios
        .iter()
        .flat_map(|&r| dz_grid.iter().map(move |&dz| (r, dz)))
        .collect();
    cells
        .par_iter()
        .map(|&(r, dz)| ctx.row(cfg, r * ctx.optimal, dz))
        .collect()
}

/// `n` evenly spaced points `top/n, 2 top/n, ..., top`.
pub fn open_grid(top: f64, n: usize) -> Vec<f64> {
    (1..=n).map(|k| top * k as f64 / n as f64).collect()
}

/// `n` evenly spaced points from `lo` to `hi` inclusive.
pub fn closed_grid(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    match n {
        0 => Vec::new(),
        1 => vec![lo],
        _ => (0..n)
            .map(|k| lo + (hi - lo) * k as f64 / (n - 1) as f64)
            .collect(),
    }
}

/// Default upper end of the window-length grid: one and a half beat periods
/// of the perturbed generator, capped at a quarter of `period`.
///
/// Window lengths that are whole beat periods of the perturbed generator act
/// as (scaled) identities and produce no effect, so the grid spans one such
/// revival and the region past it.
pub fn default_dz_max(params: &SystemParams, schedule: &CouplingSchedule) -> f64 {
    let cap = schedule.period / 4.0;
    let d = params.with_kappa(schedule.kappa_pert).detuning();
    if d > 0.0 {
        (1.5 * PI / d.sqrt()).min(cap)
    } else {
        cap
    }
}
