//! Piecewise-constant coupling profiles.
//!
//! The coupling sits at `kappa_base` except inside perturbation windows of
//! length `delta_z` that start at `z_first` and repeat every `period`
//! (measured start to start). Windows are half-open, `[start, start + δz)`.

use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::linalg::C64;
use crate::spectral::SystemParams;

/// Boundaries closer than this (relative to `z_total`) are merged.
const MERGE_EPS: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CouplingSchedule {
    pub kappa_base: C64,
    pub kappa_pert: C64,
    pub delta_z: f64,
    pub period: f64,
    pub z_first: f64,
    pub z_total: f64,
}

/// A stretch `[z_start, z_end)` of constant coupling.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Segment {
    pub z_start: f64,
    pub z_end: f64,
    pub kappa: C64,
    /// Whether this stretch lies inside a perturbation window.
    pub perturbed: bool,
}

impl Segment {
    pub fn len(&self) -> f64 {
        self.z_end - self.z_start
    }
}

impl CouplingSchedule {
    pub fn new(
        kappa_base: C64,
        kappa_pert: C64,
        delta_z: f64,
        period: f64,
        z_first: f64,
        z_total: f64,
    ) -> Result<Self> {
        let s = CouplingSchedule {
            kappa_base,
            kappa_pert,
            delta_z,
            period,
            z_first,
            z_total,
        };
        s.validate()?;
        Ok(s)
    }

    /// Constant coupling over `[0, z_total]`; one nominal window per period
    /// is kept so the value still satisfies the schedule invariants.
    pub fn constant(kappa: C64, period: f64, z_total: f64) -> Result<Self> {
        Self::new(kappa, kappa, period / 2.0, period, 0.0, z_total)
    }

    /// The same geometry with the perturbation switched off.
    pub fn unperturbed(&self) -> Self {
        CouplingSchedule {
            kappa_pert: self.kappa_base,
            ..*self
        }
    }

    pub fn validate(&self) -> Result<()> {
        let finite = [
            self.kappa_base.re,
            self.kappa_base.im,
            self.kappa_pert.re,
            self.kappa_pert.im,
            self.delta_z,
            self.period,
            self.z_first,
            self.z_total,
        ]
        .iter()
        .all(|v| v.is_finite());
        if !finite {
            return Err(Error::InvalidSchedule("non-finite field".into()));
        }
        if !(self.period > 0.0) {
            return Err(Error::InvalidSchedule(format!(
                "period must be > 0, got {}",
                self.period
            )));
        }
        if !(self.delta_z > 0.0 && self.delta_z < self.period) {
            return Err(Error::InvalidSchedule(format!(
                "need 0 < delta_z < period, got delta_z = {}, period = {}",
                self.delta_z, self.period
            )));
        }
        if self.z_first < 0.0 {
            return Err(Error::InvalidSchedule(format!(
                "z_first must be >= 0, got {}",
                self.z_first
            )));
        }
        if !(self.z_total >= self.period) {
            return Err(Error::InvalidSchedule(format!(
                "z_total = {} is shorter than one period ({})",
                self.z_total, self.period
            )));
        }
        Ok(())
    }

    fn in_window(&self, z: f64) -> bool {
        z >= self.z_first && (z - self.z_first).rem_euclid(self.period) < self.delta_z
    }

    /// Coupling at `z`.
    pub fn kappa_at(&self, z: f64) -> Result<C64> {
        if !(0.0..=self.z_total).contains(&z) {
            return Err(Error::Domain {
                z,
                z_total: self.z_total,
            });
        }
        Ok(if self.in_window(z) {
            self.kappa_pert
        } else {
            self.kappa_base
        })
    }

    /// Start positions of all windows that begin before `z_total`.
    pub fn window_starts(&self) -> impl Iterator<Item = f64> + '_ {
        (0..)
            .map(move |k| self.z_first + k as f64 * self.period)
            .take_while(move |&z| z < self.z_total)
    }

    /// Windows `[start, end)` clipped to `[0, z_total]`.
    pub fn windows(&self) -> impl Iterator<Item = (f64, f64)> + '_ {
        self.window_starts()
            .map(move |s| (s, (s + self.delta_z).min(self.z_total)))
    }

    /// Contiguous constant-coupling segments covering `[0, z_total]`.
    ///
    /// Adjacent segments always differ in `kappa`, so when the perturbation
    /// equals the base coupling the result is a single segment.
    pub fn segments(&self) -> Vec<Segment> {
        let tol = MERGE_EPS * self.z_total;
        let mut bounds = vec![0.0];
        for (a, b) in self.windows() {
            bounds.push(a);
            bounds.push(b);
        }
        bounds.push(self.z_total);

        let mut out: Vec<Segment> = Vec::new();
        for pair in bounds.windows(2) {
            let (a, b) = (pair[0], pair[1]);
            if b - a <= tol {
                continue;
            }
            let perturbed = self.in_window(0.5 * (a + b));
            let kappa = if perturbed {
                self.kappa_pert
            } else {
                self.kappa_base
            };
            match out.last_mut() {
                Some(last) if last.kappa == kappa => {
                    last.z_end = b;
                    last.perturbed &= perturbed;
                }
                _ => out.push(Segment {
                    z_start: a,
                    z_end: b,
                    kappa,
                    perturbed,
                }),
            }
        }
        out
    }

    /// Total length spent inside windows.
    pub fn perturbed_length(&self) -> f64 {
        self.windows().map(|(a, b)| b - a).sum()
    }
}

/// Half of the beat period of the base spectrum, `π / |Re(E1 - E2)|`.
pub fn optimal_period(params: &SystemParams) -> Result<f64> {
    let d = params.detuning();
    if d <= 0.0 || params.is_near_ep(crate::spectral::DEFAULT_EP_TOL) {
        return Err(Error::ExceptionalPoint(format!(
            "|kappa|² - g² = {d:e} <= 0: the eigenvalues share their real part"
        )));
    }
    Ok(PI / (2.0 * d.sqrt()))
}
