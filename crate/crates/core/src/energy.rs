//! Energy functionals of a two-mode state.
//!
//! A state expanded in the (non-orthogonal) eigenbasis,
//! `ψ(s) = a1 e^{λ1 s} r1 + a2 e^{λ2 s} r2`, has the complex energy
//! `E(s) = ⟨ψ(s)|M|ψ(s)⟩`. Because `⟨r1|r2⟩ ≠ 0` the real part carries an
//! interference term oscillating at `ω = |Re(E1 - E2)|` on top of the
//! diagonal (mode population) part.
//!
//! The rates `λ_i` depend on the sign convention of the evolution, see
//! [`Evolution`].

use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::linalg::{Vec2, C64, ZERO};
use crate::spectral::{Generator, SpectralData};

/// How eigenvalues turn into evolution rates.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Evolution {
    /// `ψ(t) ∝ e^{-iEt}`: decay means `Im E < 0`.
    Time,
    /// `ψ(z) ∝ e^{+iEz}` (coupled waveguides): decay means `Im E > 0`.
    #[default]
    Propagation,
}

impl Evolution {
    /// Rate `λ` with `ψ ∝ e^{λ s}` for an eigenvalue `e`.
    pub fn rate(self, e: C64) -> C64 {
        match self {
            Evolution::Time => C64::new(e.im, -e.re),
            Evolution::Propagation => C64::new(-e.im, e.re),
        }
    }
}

/// Decomposition of the energy at one instant.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EnergyBreakdown {
    /// `Re E`.
    pub total: f64,
    /// Full complex `E`; the imaginary part is the dissipation.
    pub complex_energy: C64,
    /// Diagonal part `Σ Re E_i |a_i|² e^{2 Re λ_i s}`.
    pub e_av: f64,
    /// Amplitude (>= 0) of the interference term.
    pub e_osc: f64,
    /// `|Re(E1 - E2)|`.
    pub omega: f64,
    /// `arg(a1* a2)`.
    pub theta: f64,
    /// Offset with `omega * t_theta = arg⟨r1|r2⟩`; zero when `omega = 0`.
    pub t_theta: f64,
    /// Interference phase `Φ(s) = arg(a1* a2 ⟨r1|r2⟩) + Im(λ2 - λ1) s`.
    pub phase: f64,
    /// `cos Φ(s)`.
    pub cos_phase: f64,
    /// `arg(Re(E1+E2) + i Im(E1-E2))`; the interference term is
    /// `e_osc * cos(Φ - phase_offset)`, which reduces to `e_osc * cos Φ`
    /// when the imaginary parts agree and `Re(E1+E2) > 0`.
    pub phase_offset: f64,
    /// `omega == 0`: the interference term does not rotate.
    pub static_phase: bool,
}

fn require_diagonalizable(sd: &SpectralData) -> Result<[Vec2; 2]> {
    match (sd.is_defective, sd.left) {
        (false, Some(l)) => Ok(l),
        _ => Err(Error::ExceptionalPoint(
            "eigenbasis is incomplete at the EP; use the Jordan expansion".into(),
        )),
    }
}

/// Eigenbasis coefficients `a_i = ⟨l_i|ψ⟩`.
pub fn decompose_state(state: &Vec2, sd: &SpectralData) -> Result<(C64, C64)> {
    let l = require_diagonalizable(sd)?;
    Ok((l[0].dot(state), l[1].dot(state)))
}

/// `⟨ψ|M|ψ⟩`.
///
/// This is the expectation of `Σ E_i |r_i⟩⟨l_i|`, i.e. of `M` itself, and
/// reproduces the mode expansion of [`energy_closed_form`] term by term.
pub fn energy_expectation(state: &Vec2, gen: &Generator) -> C64 {
    gen.matrix().sandwich(state, state)
}

/// `|u1|² + |u2|²`.
pub fn waveguide_energy(state: &Vec2) -> f64 {
    state.norm_sqr()
}

/// Closed-form energy of `a1 e^{λ1 s} r1 + a2 e^{λ2 s} r2` at `s`.
pub fn energy_closed_form(
    a1: C64,
    a2: C64,
    sd: &SpectralData,
    s: f64,
    evolution: Evolution,
) -> Result<EnergyBreakdown> {
    require_diagonalizable(sd)?;
    let [e1, e2] = sd.eigenvalues;
    let (l1, l2) = (evolution.rate(e1), evolution.rate(e2));

    let p1 = a1.norm_sqr() * (2.0 * l1.re * s).exp();
    let p2 = a2.norm_sqr() * (2.0 * l2.re * s).exp();
    let big_a = a1.conj() * a2 * sd.overlap;
    let cross = e2 * big_a * ((l1.conj() + l2) * s).exp()
        + e1 * big_a.conj() * ((l1 + l2.conj()) * s).exp();
    let complex_energy = e1 * p1 + e2 * p2 + cross;

    let envelope = ((l1.re + l2.re) * s).exp();
    let weight = C64::new((e1 + e2).re, (e1 - e2).im);
    let omega = (e1 - e2).re.abs();
    let static_phase = omega == 0.0;
    let phase = big_a.arg() + (l2.im - l1.im) * s;

    Ok(EnergyBreakdown {
        total: complex_energy.re,
        complex_energy,
        e_av: e1.re * p1 + e2.re * p2,
        e_osc: envelope * big_a.norm() * weight.norm(),
        omega,
        theta: (a1.conj() * a2).arg(),
        t_theta: if static_phase {
            0.0
        } else {
            sd.overlap.arg() / omega
        },
        phase,
        cos_phase: phase.cos(),
        phase_offset: if weight == ZERO { 0.0 } else { weight.arg() },
        static_phase,
    })
}

/// Interference phase `Φ = arg(a1* a2 ⟨r1|r2⟩)` and `cos Φ`.
///
/// Invariant under independent re-phasing of `r1` and `r2` because the
/// coefficients pick up the opposite phases.
pub fn oscillation_phase(a1: C64, a2: C64, sd: &SpectralData) -> Result<(f64, f64)> {
    require_diagonalizable(sd)?;
    if a1 == ZERO {
        return Err(Error::UndefinedPhase("a1 = 0, no interference term"));
    }
    if a2 == ZERO {
        return Err(Error::UndefinedPhase("a2 = 0, no interference term"));
    }
    let phi = (a1.conj() * a2 * sd.overlap).arg();
    Ok((phi, phi.cos()))
}

/// Wraps an angle into `[0, 2π)`.
pub(crate) fn wrap_phase(phi: f64) -> f64 {
    let w = phi.rem_euclid(2.0 * PI);
    if 2.0 * PI - w < 1e-12 {
        0.0
    } else {
        w
    }
}
