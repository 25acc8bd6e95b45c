//! Evolution of the two-mode amplitudes along `z`.
//!
//! Linear runs are exact: the coupling is piecewise constant, so each
//! segment is advanced with `exp(i M dz)`. The saturable-gain system is
//! integrated with fixed-step RK4, with steps aligned to segment boundaries.

use crate::error::{Error, Result};
use crate::linalg::{Mat2, Vec2, C64, I};
use crate::schedule::CouplingSchedule;
use crate::spectral::{build_generator, spectral_decompose, Generator, SystemParams, DEFAULT_EP_TOL};

/// Sampled solution `u(z)`.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Trajectory {
    pub z: Vec<f64>,
    pub states: Vec<Vec2>,
    /// `|u1|² + |u2|²` per sample.
    pub energies: Vec<f64>,
}

impl Trajectory {
    fn with_start(state: Vec2) -> Self {
        let mut t = Trajectory::default();
        t.push(0.0, state);
        t
    }

    fn push(&mut self, z: f64, state: Vec2) {
        self.z.push(z);
        self.energies.push(state.norm_sqr());
        self.states.push(state);
    }

    pub fn len(&self) -> usize {
        self.z.len()
    }

    pub fn is_empty(&self) -> bool {
        self.z.is_empty()
    }

    pub fn final_state(&self) -> Option<Vec2> {
        self.states.last().copied()
    }

    /// Index of the sample at `z` (exact match on a segment boundary).
    pub fn index_of(&self, z: f64) -> Option<usize> {
        let tol = 1e-9 * self.z.last().copied().unwrap_or(1.0).max(1.0);
        let k = self.z.partition_point(|&x| x < z - tol);
        (k < self.z.len() && (self.z[k] - z).abs() <= tol).then_some(k)
    }
}

/// Saturable gain parameters: `g_1,2 = ∓ g_c / (1 + alpha |u_1,2|²)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NonlinearParams {
    pub g_c: f64,
    pub alpha: f64,
}

impl NonlinearParams {
    pub fn new(g_c: f64, alpha: f64) -> Result<Self> {
        for (name, v) in [("g_c", g_c), ("alpha", alpha)] {
            if !(v.is_finite() && v >= 0.0) {
                return Err(Error::invalid(name, format!("must be finite and >= 0, got {v}")));
            }
        }
        Ok(NonlinearParams { g_c, alpha })
    }

    /// `(g1, g2)` for the current amplitudes.
    pub fn gains(&self, u: &Vec2) -> (f64, f64) {
        (
            -self.g_c / (1.0 + self.alpha * u[0].norm_sqr()),
            self.g_c / (1.0 + self.alpha * u[1].norm_sqr()),
        )
    }
}

/// `exp(i M dz)` for a fixed generator, with the decomposition computed once.
#[derive(Debug, Clone, Copy)]
pub enum Propagator {
    Diagonal { r: Mat2, r_inv: Mat2, e: [C64; 2] },
    /// `e^{iE dz} (I + i dz N)` with nilpotent `N = M - E I`.
    Defective { e: C64, n: Mat2 },
}

impl Propagator {
    pub fn new(gen: &Generator, ep_tol: f64) -> Result<Self> {
        let sd = spectral_decompose(gen, ep_tol)?;
        if sd.is_defective {
            let e = sd.e1();
            return Ok(Propagator::Defective {
                e,
                n: *gen.matrix() - Mat2::identity().scale(e),
            });
        }
        let r = sd.right_matrix();
        let r_inv = r.inverse().ok_or_else(|| {
            Error::ExceptionalPoint("eigenvector matrix is singular".into())
        })?;
        Ok(Propagator::Diagonal {
            r,
            r_inv,
            e: sd.eigenvalues,
        })
    }

    pub fn matrix(&self, dz: f64) -> Mat2 {
        match *self {
            Propagator::Diagonal { r, r_inv, e } => {
                let d = Mat2::diag((I * e[0] * dz).exp(), (I * e[1] * dz).exp());
                r * d * r_inv
            }
            Propagator::Defective { e, n } => {
                (Mat2::identity() + n.scale(I * dz)).scale((I * e * dz).exp())
            }
        }
    }
}

/// `exp(i M dz)`.
pub fn propagator_matrix(gen: &Generator, dz: f64, ep_tol: f64) -> Result<Mat2> {
    if !(dz >= 0.0) || !dz.is_finite() {
        return Err(Error::invalid("dz", format!("must be finite and >= 0, got {dz}")));
    }
    Ok(Propagator::new(gen, ep_tol)?.matrix(dz))
}

fn check_state(state: &Vec2) -> Result<()> {
    if state.is_finite() {
        Ok(())
    } else {
        Err(Error::invalid("initial state", "non-finite amplitude"))
    }
}

/// Exact linear evolution, sampled at most `sample_dz` apart and on every
/// segment boundary.
pub fn propagate_linear(
    state0: Vec2,
    schedule: &CouplingSchedule,
    params: &SystemParams,
    sample_dz: f64,
) -> Result<Trajectory> {
    propagate_linear_with_tol(state0, schedule, params, sample_dz, DEFAULT_EP_TOL)
}

pub fn propagate_linear_with_tol(
    state0: Vec2,
    schedule: &CouplingSchedule,
    params: &SystemParams,
    sample_dz: f64,
    ep_tol: f64,
) -> Result<Trajectory> {
    if !(sample_dz > 0.0) || !sample_dz.is_finite() {
        return Err(Error::invalid("sample_dz", format!("must be > 0, got {sample_dz}")));
    }
    check_state(&state0)?;
    schedule.validate()?;
    let mut traj = Trajectory::with_start(state0);
    let mut u = state0;
    for seg in schedule.segments() {
        let prop = Propagator::new(&build_generator(&params.with_kappa(seg.kappa))?, ep_tol)?;
        let len = seg.len();
        let n = (len / sample_dz).ceil().max(1.0) as usize;
        let start = u;
        for k in 1..=n {
            let dz = if k == n { len } else { len * k as f64 / n as f64 };
            u = prop.matrix(dz).mul_vec(&start);
            let z = if k == n { seg.z_end } else { seg.z_start + dz };
            traj.push(z, u);
        }
        if !u.is_finite() {
            return Err(Error::Divergence { z: seg.z_end });
        }
    }
    Ok(traj)
}

/// State at `z_total` only; the same arithmetic as the last sample of
/// [`propagate_linear`].
pub fn propagate_endpoint(
    state0: Vec2,
    schedule: &CouplingSchedule,
    params: &SystemParams,
    ep_tol: f64,
) -> Result<Vec2> {
    check_state(&state0)?;
    schedule.validate()?;
    let mut u = state0;
    for seg in schedule.segments() {
        let prop = Propagator::new(&build_generator(&params.with_kappa(seg.kappa))?, ep_tol)?;
        u = prop.matrix(seg.len()).mul_vec(&u);
    }
    if !u.is_finite() {
        return Err(Error::Divergence { z: schedule.z_total });
    }
    Ok(u)
}

fn nonlinear_generator(params: &SystemParams, kappa: C64, gains: (f64, f64)) -> Mat2 {
    let base = C64::new(params.beta, params.gamma);
    Mat2::new(
        base + I * gains.0,
        kappa.conj(),
        kappa,
        base + I * gains.1,
    )
}

fn rhs(params: &SystemParams, nl: &NonlinearParams, kappa: C64, u: &Vec2) -> Vec2 {
    nonlinear_generator(params, kappa, nl.gains(u))
        .mul_vec(u)
        .scale(I)
}

fn rk4_step(params: &SystemParams, nl: &NonlinearParams, kappa: C64, u: &Vec2, h: f64) -> Vec2 {
    let half = C64::new(0.5 * h, 0.0);
    let k1 = rhs(params, nl, kappa, u);
    let k2 = rhs(params, nl, kappa, &(*u + k1 * half));
    let k3 = rhs(params, nl, kappa, &(*u + k2 * half));
    let k4 = rhs(params, nl, kappa, &(*u + k3 * C64::new(h, 0.0)));
    let two = C64::new(2.0, 0.0);
    *u + (k1 + k2 * two + k3 * two + k4) * C64::new(h / 6.0, 0.0)
}

/// RK4 integration of the saturable-gain system, one sample per step.
///
/// The `±g` diagonal entries are replaced by `g_1` on waveguide 1 and `g_2`
/// on waveguide 2 (`params.g` is ignored). Each segment is split into
/// `ceil(len / h)` equal steps, so no step crosses a coupling jump.
pub fn propagate_nonlinear(
    state0: Vec2,
    schedule: &CouplingSchedule,
    params: &SystemParams,
    nl: &NonlinearParams,
    h: f64,
) -> Result<Trajectory> {
    if !(h > 0.0) || !h.is_finite() {
        return Err(Error::invalid("h", format!("must be > 0, got {h}")));
    }
    check_state(&state0)?;
    schedule.validate()?;
    let mut traj = Trajectory::with_start(state0);
    let mut u = state0;
    for seg in schedule.segments() {
        let len = seg.len();
        let n = (len / h - 1e-9).ceil().max(1.0) as usize;
        let step = len / n as f64;
        for k in 1..=n {
            u = rk4_step(params, nl, seg.kappa, &u, step);
            let z = if k == n {
                seg.z_end
            } else {
                seg.z_start + step * k as f64
            };
            if !u.is_finite() {
                return Err(Error::Divergence { z });
            }
            traj.push(z, u);
        }
    }
    Ok(traj)
}

/// Instantaneous generator of the saturable system at amplitude `u`.
pub fn nonlinear_generator_at(
    params: &SystemParams,
    nl: &NonlinearParams,
    kappa: C64,
    u: &Vec2,
) -> Result<Generator> {
    Generator::from_matrix(nonlinear_generator(params, kappa, nl.gains(u)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::ZERO;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    fn gen(beta: f64, gamma: f64, g: f64, k: C64) -> Generator {
        build_generator(&SystemParams::new(beta, gamma, g, k).unwrap()).unwrap()
    }

    #[test]
    fn decoupled_propagator() {
        let u = propagator_matrix(&gen(0.0, 5e-3, 0.05, ZERO), 10.0, DEFAULT_EP_TOL).unwrap();
        assert!((u[(0, 0)] - c((-0.55f64).exp(), 0.0)).norm() < 1e-15);
        assert!((u[(1, 1)] - c(0.45f64.exp(), 0.0)).norm() < 1e-15);
        assert!((u[(0, 0)].re - 0.57695).abs() < 1e-5);
        assert!((u[(1, 1)].re - 1.56831).abs() < 1e-5);
        assert_eq!(u[(0, 1)], ZERO);
    }

    #[test]
    fn zero_step_is_identity() {
        for g in [gen(0.3, 5e-3, 0.05, c(0.06, 0.01)), gen(0.0, 5e-3, 0.05, c(0.05, 0.0))] {
            let u = propagator_matrix(&g, 0.0, DEFAULT_EP_TOL).unwrap();
            assert!((u - Mat2::identity()).norm() < 1e-15);
        }
    }

    #[test]
    fn rejects_negative_step() {
        let g = gen(0.0, 0.0, 0.05, c(0.06, 0.0));
        assert!(propagator_matrix(&g, -1.0, DEFAULT_EP_TOL).is_err());
    }

    #[test]
    fn defective_branch_is_linear_in_dz_along_adjoint() {
        let g = gen(0.0, 5e-3, 0.05, c(0.05, 0.0));
        let sd = spectral_decompose(&g, DEFAULT_EP_TOL).unwrap();
        let adj = sd.adjoint.unwrap();
        for dz in [10.0, 100.0, 1000.0] {
            let v = propagator_matrix(&g, dz, DEFAULT_EP_TOL).unwrap().mul_vec(&adj);
            // U adj = e^{iEdz} (adj + i dz φ)
            let want = (adj + sd.right[0].scale(I * dz)).scale((I * sd.e1() * dz).exp());
            assert!((v - want).norm() < 1e-12 * want.norm());
        }
    }

    #[test]
    fn liouville_and_semigroup() {
        for g in [
            gen(0.2, 5e-3, 0.05, c(0.0502, 0.003)),
            gen(0.0, 5e-3, 0.05, c(0.05, 0.0)),
            gen(0.0, 0.0, 0.05, c(0.02, 0.0)),
        ] {
            let p = Propagator::new(&g, DEFAULT_EP_TOL).unwrap();
            let (a, b) = (13.0, 41.5);
            assert!((p.matrix(a) * p.matrix(b) - p.matrix(a + b)).norm() < 1e-12);
            let det = p.matrix(a).det();
            let want = (I * g.matrix().trace() * a).exp();
            assert!((det - want).norm() < 1e-12);
        }
    }

    #[test]
    fn hermitian_propagation_conserves_energy() {
        let params = SystemParams::new(0.1, 0.0, 0.0, c(0.03, 0.0)).unwrap();
        let s = CouplingSchedule::new(c(0.03, 0.0), c(0.09, 0.0), 4.0, 50.0, 7.0, 400.0).unwrap();
        let traj = propagate_linear(Vec2::real(0.6, 0.8), &s, &params, 3.0).unwrap();
        for e in &traj.energies {
            assert!((e - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn trajectory_grid_contains_boundaries() {
        let params = SystemParams::from_squared(2.5e-3, 5e-3, 1.01).unwrap();
        let s = CouplingSchedule::new(params.kappa, c(0.1, 0.0), 5.0, 100.0, 20.0, 300.0).unwrap();
        let traj = propagate_linear(Vec2::real(1.0, 1.0), &s, &params, 7.0).unwrap();
        assert_eq!(traj.z[0], 0.0);
        assert_eq!(*traj.z.last().unwrap(), 300.0);
        assert!(traj.z.windows(2).all(|w| w[1] > w[0]));
        assert!(traj.z.windows(2).all(|w| w[1] - w[0] <= 7.0 + 1e-12));
        for b in [20.0, 25.0, 120.0, 125.0, 220.0, 225.0] {
            assert!(traj.index_of(b).is_some(), "missing boundary {b}");
        }
        let end = propagate_endpoint(Vec2::real(1.0, 1.0), &s, &params, DEFAULT_EP_TOL).unwrap();
        assert!((end - traj.final_state().unwrap()).norm() < 1e-12 * end.norm());
    }

    #[test]
    fn gains_saturate() {
        let nl = NonlinearParams::new(0.05, 1e-4).unwrap();
        let (g1, g2) = nl.gains(&Vec2::real(0.0, 100.0));
        assert_eq!(g1, -0.05);
        assert!((g2 - 0.025).abs() < 1e-15);
        assert!(NonlinearParams::new(-1.0, 0.0).is_err());
        assert!(NonlinearParams::new(0.05, f64::NAN).is_err());
    }

    #[test]
    fn rk4_divergence_is_reported() {
        let params = SystemParams::new(0.0, -1e3, 0.0, ZERO).unwrap();
        let s = CouplingSchedule::constant(ZERO, 10.0, 100.0).unwrap();
        let nl = NonlinearParams::new(0.0, 0.0).unwrap();
        let err = propagate_nonlinear(Vec2::real(1.0, 1.0), &s, &params, &nl, 5.0).unwrap_err();
        assert!(matches!(err, Error::Divergence { .. }));
    }

    #[test]
    fn rk4_steps_align_with_segments() {
        let params = SystemParams::from_squared(2.5e-3, 5e-3, 1.01).unwrap();
        let s = CouplingSchedule::new(params.kappa, c(0.1, 0.0), 5.0, 100.0, 20.0, 300.0).unwrap();
        let nl = NonlinearParams::new(0.05, 1e-4).unwrap();
        let traj = propagate_nonlinear(Vec2::real(1.0, 1.0), &s, &params, &nl, 3.0).unwrap();
        for b in [20.0, 25.0, 120.0, 125.0, 300.0] {
            assert!(traj.index_of(b).is_some(), "missing boundary {b}");
        }
    }
}
