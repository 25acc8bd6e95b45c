//! The coupled-mode generator and its closed-form spectral structure.
//!
//! Two waveguides with common propagation constant `beta`, mean imaginary
//! wavenumber `gamma`, gain/loss half-difference `g` and coupling `kappa`
//! evolve under
//!
//! ```text
//!   -i d/dz (u1, u2)ᵀ = M (u1, u2)ᵀ,   M = [ beta + i(gamma+g)   conj(kappa)      ]
//!                                         [ kappa               beta + i(gamma-g) ]
//! ```
//!
//! The eigenvalues are `beta + i gamma ± sqrt(|kappa|² - g²)`. They collide at
//! `|kappa| = g`, the exceptional point, where `M` stops being diagonalizable
//! and a Jordan chain replaces the second eigenvector.

use crate::error::{Error, Result};
use crate::linalg::{Mat2, Vec2, C64, ONE, ZERO};

/// Relative EP threshold on `||kappa|² - g²| / g²`.
pub const DEFAULT_EP_TOL: f64 = 1e-10;

/// Coupled-mode parameters, all in inverse length units.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SystemParams {
    pub beta: f64,
    pub gamma: f64,
    /// Half-difference of the imaginary wavenumbers, `g >= 0`.
    pub g: f64,
    pub kappa: C64,
}

impl SystemParams {
    pub fn new(beta: f64, gamma: f64, g: f64, kappa: C64) -> Result<Self> {
        let p = SystemParams {
            beta,
            gamma,
            g,
            kappa,
        };
        p.validate()?;
        Ok(p)
    }

    /// Parameters written the way the waveguide experiments quote them:
    /// `g² = g2`, `|kappa|² = kappa2_rel * g²` with real positive `kappa`,
    /// and `beta = 0`.
    pub fn from_squared(g2: f64, gamma: f64, kappa2_rel: f64) -> Result<Self> {
        if !(g2 >= 0.0) {
            return Err(Error::invalid("g2", format!("must be >= 0, got {g2}")));
        }
        if !(kappa2_rel >= 0.0) {
            return Err(Error::invalid(
                "kappa2",
                format!("must be >= 0, got {kappa2_rel}"),
            ));
        }
        let g = g2.sqrt();
        Self::new(0.0, gamma, g, C64::new((kappa2_rel * g2).sqrt(), 0.0))
    }

    pub fn validate(&self) -> Result<()> {
        for (name, v) in [
            ("beta", self.beta),
            ("gamma", self.gamma),
            ("g", self.g),
            ("kappa", self.kappa.re),
            ("kappa", self.kappa.im),
        ] {
            if !v.is_finite() {
                return Err(Error::invalid(name, format!("must be finite, got {v}")));
            }
        }
        if self.g < 0.0 {
            return Err(Error::invalid("g", format!("must be >= 0, got {}", self.g)));
        }
        Ok(())
    }

    pub fn with_kappa(&self, kappa: C64) -> Self {
        SystemParams { kappa, ..*self }
    }

    /// `|kappa|² - g²`, factored to avoid cancellation near the EP.
    pub fn detuning(&self) -> f64 {
        let k = self.kappa.norm();
        (k - self.g) * (k + self.g)
    }

    /// Whether `||kappa|² - g²| <= ep_tol * g²`.
    pub fn is_near_ep(&self, ep_tol: f64) -> bool {
        self.g > 0.0 && self.detuning().abs() <= ep_tol * self.g * self.g
    }
}

/// The 2×2 generator `M`. Built from [`SystemParams`] it is exactly the
/// coupled-mode matrix; [`Generator::from_matrix`] admits any finite matrix
/// (used for the amplitude-dependent generator of the saturable system).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Generator {
    m: Mat2,
    params: Option<SystemParams>,
}

impl Generator {
    pub fn from_matrix(m: Mat2) -> Result<Self> {
        if !m.is_finite() {
            return Err(Error::invalid("generator", "matrix has non-finite entries"));
        }
        Ok(Generator { m, params: None })
    }

    pub fn matrix(&self) -> &Mat2 {
        &self.m
    }

    pub fn params(&self) -> Option<&SystemParams> {
        self.params.as_ref()
    }

    /// `(tr M / 2, disc, scale)` with eigenvalues `tr/2 ± sqrt(disc)` and
    /// `scale` the reference magnitude for the EP test (`g²` for coupled-mode
    /// generators).
    fn discriminant(&self) -> (C64, C64, f64) {
        let m = &self.m.0;
        let center = self.m.trace() * 0.5;
        match &self.params {
            Some(p) => (center, C64::new(p.detuning(), 0.0), p.g * p.g),
            None => {
                let h = (m[0][0] - m[1][1]) * 0.5;
                let disc = h * h + m[0][1] * m[1][0];
                let scale = h
                    .norm_sqr()
                    .max(m[0][1].norm_sqr())
                    .max(m[1][0].norm_sqr());
                (center, disc, scale)
            }
        }
    }

    /// True when the generator is at the exceptional point within `ep_tol`.
    pub fn is_defective(&self, ep_tol: f64) -> bool {
        let (_, disc, scale) = self.discriminant();
        scale > 0.0 && disc.norm() <= ep_tol * scale
    }

    /// Closed-form eigenvalues, `+` branch first.
    pub fn eigenvalues(&self) -> [C64; 2] {
        let (center, disc, _) = self.discriminant();
        let sq = branch_sqrt(disc);
        [center + sq, center - sq]
    }
}

/// Builds the coupled-mode generator.
pub fn build_generator(params: &SystemParams) -> Result<Generator> {
    params.validate()?;
    let base = C64::new(params.beta, params.gamma);
    let g = C64::new(0.0, params.g);
    let m = Mat2::new(base + g, params.kappa.conj(), params.kappa, base - g);
    Ok(Generator {
        m,
        params: Some(*params),
    })
}

/// Principal square root with the tie-break `Re >= 0`, and `Im >= 0` when
/// the real part vanishes, so that `center + sqrt` is always the branch with
/// the larger real part (larger imaginary part on ties).
fn branch_sqrt(disc: C64) -> C64 {
    let mut sq = if disc.im == 0.0 {
        if disc.re >= 0.0 {
            C64::new(disc.re.sqrt(), 0.0)
        } else {
            C64::new(0.0, (-disc.re).sqrt())
        }
    } else {
        disc.sqrt()
    };
    if sq.re < 0.0 || (sq.re == 0.0 && sq.im < 0.0) {
        sq = -sq;
    }
    sq
}

/// Eigenvector of `m` for the eigenvalue `center + root`, where
/// `h = (m00 - m11)/2`. Picks the better conditioned of the two row-based
/// candidates. `None` when both vanish (scalar matrix).
fn eigenvector(m: &Mat2, h: C64, root: C64) -> Option<Vec2> {
    // Row 0: (m00 - e) x + m01 y = 0,  e - m00 = root - h.
    let a = Vec2::new(m[(0, 1)], root - h);
    // Row 1: m10 x + (m11 - e) y = 0,  e - m11 = root + h.
    let b = Vec2::new(root + h, m[(1, 0)]);
    let v = if a.norm_sqr() >= b.norm_sqr() { a } else { b };
    v.normalized_gauge()
}

/// Full spectral data of a generator.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralData {
    /// `[e1, e2]`, `e1` on the `+` branch.
    pub eigenvalues: [C64; 2],
    /// Unit-norm right eigenvectors, first nonzero component real positive.
    /// At the EP both entries hold the single eigenvector.
    pub right: [Vec2; 2],
    /// Left vectors with `⟨l_i|r_j⟩ = δ_ij`; absent at the EP.
    pub left: Option<[Vec2; 2]>,
    /// Unit vector orthogonal to `r1` used to define `c_param`.
    pub orthogonal: Vec2,
    /// `⟨r1|r2⟩`.
    pub overlap: C64,
    /// `⟨φ⊥|r2⟩`; `|overlap|² + |c_param|² = 1`.
    pub c_param: C64,
    pub is_defective: bool,
    /// Jordan adjoint vector, present only at the EP.
    pub adjoint: Option<Vec2>,
}

impl SpectralData {
    pub fn e1(&self) -> C64 {
        self.eigenvalues[0]
    }

    pub fn e2(&self) -> C64 {
        self.eigenvalues[1]
    }

    /// Right-eigenvector matrix `R = [r1 r2]`.
    pub fn right_matrix(&self) -> Mat2 {
        Mat2::from_columns(self.right[0], self.right[1])
    }
}

fn orthogonal_to(v: &Vec2) -> Vec2 {
    Vec2::new(-v[1].conj(), v[0].conj())
}

/// Eigenvalues, right/left eigenvectors, overlap and c-parameter of `gen`.
///
/// When `gen` is within `ep_tol` of the exceptional point the double
/// eigenvalue `tr M / 2` is reported twice, both right slots carry the
/// single eigenvector, and the Jordan adjoint vector is filled in.
pub fn spectral_decompose(gen: &Generator, ep_tol: f64) -> Result<SpectralData> {
    if !(ep_tol > 0.0) || !ep_tol.is_finite() {
        return Err(Error::invalid("ep_tol", format!("must be > 0, got {ep_tol}")));
    }
    let m = gen.matrix();
    let h = (m[(0, 0)] - m[(1, 1)]) * 0.5;
    let (center, disc, _) = gen.discriminant();

    if gen.is_defective(ep_tol) {
        let chain = jordan_chain(gen, center, ep_tol)?;
        let phi = chain.eigenvector;
        return Ok(SpectralData {
            eigenvalues: [center, center],
            right: [phi, phi],
            left: None,
            orthogonal: orthogonal_to(&phi),
            overlap: ONE,
            c_param: ZERO,
            is_defective: true,
            adjoint: Some(chain.adjoint),
        });
    }

    let sq = branch_sqrt(disc);
    let eigenvalues = [center + sq, center - sq];
    let (r1, r2) = match (eigenvector(m, h, sq), eigenvector(m, h, -sq)) {
        (Some(r1), Some(r2)) => (r1, r2),
        // Scalar matrix: any basis diagonalizes it.
        _ => (Vec2::basis(0), Vec2::basis(1)),
    };

    let r = Mat2::from_columns(r1, r2);
    let left = r.inverse().map(|inv| [inv.row(0).conj(), inv.row(1).conj()]);
    if left.is_none() {
        return Err(Error::ExceptionalPoint(
            "right eigenvectors are numerically parallel; increase ep_tol".into(),
        ));
    }

    let orthogonal = orthogonal_to(&r1);
    Ok(SpectralData {
        eigenvalues,
        right: [r1, r2],
        left,
        orthogonal,
        overlap: r1.dot(&r2),
        c_param: orthogonal.dot(&r2),
        is_defective: false,
        adjoint: None,
    })
}

/// Overlap between the eigenvectors and the c-parameter.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Overlap {
    pub overlap: C64,
    pub c_param: C64,
    /// Set at the EP, where the values are the degenerate `(1, 0)`.
    pub at_exceptional_point: bool,
}

pub fn eigen_overlap(sd: &SpectralData) -> Overlap {
    Overlap {
        overlap: sd.overlap,
        c_param: sd.c_param,
        at_exceptional_point: sd.is_defective,
    }
}

/// Eigenvector and Jordan adjoint vector at a defective eigenvalue.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct JordanChain {
    pub eigenvalue: C64,
    pub eigenvector: Vec2,
    pub adjoint: Vec2,
    /// `‖(M - eI) adjoint - eigenvector‖`.
    pub residual: f64,
}

/// Minimal-norm solution of `(M - eI) x = phi`.
///
/// For a rank-one `N = M - eI` the pseudo-inverse is `N^H / ‖N‖_F²`, so the
/// result is linear in `phi`.
pub fn solve_adjoint(gen: &Generator, e: C64, phi: &Vec2) -> Vec2 {
    let n = *gen.matrix() - Mat2::identity().scale(e);
    let n2 = n.norm().powi(2);
    n.adjoint().mul_vec(phi).scale(C64::new(1.0 / n2, 0.0))
}

/// Jordan chain `(M - eI) φ_adj = φ` at a double eigenvalue `e`.
///
/// `tol` bounds both the nilpotency ratio `‖N²‖/‖N‖²` used to decide that
/// `e` is a defective double root and the final residual.
pub fn jordan_chain(gen: &Generator, e: C64, tol: f64) -> Result<JordanChain> {
    let n = *gen.matrix() - Mat2::identity().scale(e);
    let n2 = n.norm().powi(2);
    if n2 == 0.0 {
        // M = eI is diagonalizable; there is no chain.
        return Err(Error::NotDefective { ratio: 0.0 });
    }
    let ratio = (n * n).norm() / n2;
    if ratio > tol {
        return Err(Error::NotDefective { ratio });
    }

    let a = Vec2::new(n[(0, 1)], -n[(0, 0)]);
    let b = Vec2::new(-n[(1, 1)], n[(1, 0)]);
    let raw = if a.norm_sqr() >= b.norm_sqr() { a } else { b };
    let phi = raw
        .normalized_gauge()
        .ok_or(Error::NotDefective { ratio })?;

    let adjoint = solve_adjoint(gen, e, &phi);
    let residual = (n.mul_vec(&adjoint) - phi).norm();
    if residual > tol {
        return Err(Error::NumericalDegeneracy { residual, tol });
    }
    Ok(JordanChain {
        eigenvalue: e,
        eigenvector: phi,
        adjoint,
        residual,
    })
}

/// Eigenbasis coefficients `(A1, A2)` of `b1 |r1⟩ + b2 |φ⊥⟩`.
///
/// Writing `r2 = ⟨r1|r2⟩ r1 + c φ⊥` gives `A2 = b2 / c` and
/// `A1 = b1 - A2 ⟨r1|r2⟩`. In a gauge where the overlap is real this is
/// `b1 - (b2/c) sqrt(1 - |c|²)`.
pub fn expand_orthogonal_mix(b1: C64, b2: C64, sd: &SpectralData) -> Result<(C64, C64)> {
    if sd.is_defective || sd.c_param == ZERO {
        return Err(Error::ExceptionalPoint(
            "c-parameter vanishes; eigenvectors do not span the space".into(),
        ));
    }
    let a2 = b2 / sd.c_param;
    let a1 = b1 - a2 * sd.overlap;
    Ok((a1, a2))
}
