//! Independent reference computations shared by the integration tests.
//!
//! Nothing here calls into the closed forms under test: eigenvalues come
//! from nalgebra's complex Schur decomposition and matrix exponentials from a
//! Taylor series with scaling and squaring.

#![allow(dead_code)]

use nalgebra::{Complex, Matrix2, Vector2};
use piep::{Mat2, SystemParams, Vec2, C64};
use rand::Rng;
use rand_chacha::ChaCha8Rng;

pub type NMat = Matrix2<Complex<f64>>;

pub fn to_na(m: &Mat2) -> NMat {
    NMat::new(m[(0, 0)], m[(0, 1)], m[(1, 0)], m[(1, 1)])
}

pub fn from_na(m: &NMat) -> Mat2 {
    Mat2::new(m[(0, 0)], m[(0, 1)], m[(1, 0)], m[(1, 1)])
}

pub fn vec_na(v: &Vec2) -> Vector2<Complex<f64>> {
    Vector2::new(v[0], v[1])
}

/// Eigenvalues and unit eigenvectors from a complex Schur form `M = Q T Qᴴ`.
pub fn schur_eigen(m: &Mat2) -> [(C64, Vector2<Complex<f64>>); 2] {
    let (q, t) = to_na(m).schur().unpack();
    let (t00, t01, t11) = (t[(0, 0)], t[(0, 1)], t[(1, 1)]);
    let v0 = q.column(0).into_owned();
    // (T - t11 I) y = 0 with y = (t01, t11 - t00).
    let y = Vector2::new(t01, t11 - t00);
    let v1 = if y.norm() > 0.0 {
        let w = q * y;
        w / Complex::new(w.norm(), 0.0)
    } else {
        q.column(1).into_owned()
    };
    [(t00, v0), (t11, v1)]
}

/// `exp(A)` by a degree-18 Taylor polynomial after scaling `A` below norm 1/2.
pub fn expm(a: &NMat) -> NMat {
    let norm = a.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt();
    let s = if norm > 0.5 {
        (norm / 0.5).log2().ceil() as i32
    } else {
        0
    };
    let scaled = a.unscale(2f64.powi(s));
    let mut term = NMat::identity();
    let mut sum = NMat::identity();
    for k in 1..=18 {
        term = term * scaled / Complex::new(k as f64, 0.0);
        sum += term;
    }
    for _ in 0..s {
        sum = sum * sum;
    }
    sum
}

/// `exp(i M dz)`.
pub fn expm_i(m: &Mat2, dz: f64) -> Mat2 {
    from_na(&expm(&(to_na(m) * Complex::new(0.0, dz))))
}

pub fn rel_close(a: C64, b: C64, scale: f64, tol: f64) -> bool {
    (a - b).norm() <= tol * scale.max(f64::MIN_POSITIVE)
}

/// Random coupled-mode parameters with `||kappa|² - g²| > min_detuning g²`.
///
/// Half of the draws land within a decade or so of the EP to exercise the
/// ill-conditioned eigenvector regime.
pub fn random_params(rng: &mut ChaCha8Rng, min_detuning: f64) -> SystemParams {
    loop {
        let g = rng.gen_range(1e-3..0.5);
        let ratio = if rng.gen_bool(0.5) {
            rng.gen_range(0.0..9.0)
        } else {
            let off = 10f64.powf(rng.gen_range(-6.0..-1.0));
            if rng.gen_bool(0.5) {
                1.0 + off
            } else {
                1.0 - off
            }
        };
        if (ratio - 1.0).abs() <= min_detuning {
            continue;
        }
        let k = g * ratio.sqrt();
        let phase = rng.gen_range(0.0..std::f64::consts::TAU);
        return SystemParams::new(
            rng.gen_range(-1.0..1.0),
            rng.gen_range(-0.1..0.1),
            g,
            C64::from_polar(k, phase),
        )
        .unwrap();
    }
}

pub fn random_c64(rng: &mut ChaCha8Rng) -> C64 {
    C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))
}

pub fn random_state(rng: &mut ChaCha8Rng) -> Vec2 {
    Vec2::new(random_c64(rng), random_c64(rng))
}

/// Local maxima of a sampled curve, refined by a parabola through the three
/// neighbouring samples. Returns `(z, value)` pairs.
pub fn peaks(z: &[f64], y: &[f64]) -> Vec<(f64, f64)> {
    let mut out = Vec::new();
    for k in 1..y.len().saturating_sub(1) {
        if y[k] > y[k - 1] && y[k] >= y[k + 1] {
            let (a, b, c) = (y[k - 1], y[k], y[k + 1]);
            let h = z[k + 1] - z[k];
            let denom = a - 2.0 * b + c;
            let shift = if denom != 0.0 { 0.5 * (a - c) / denom } else { 0.0 };
            out.push((z[k] + shift * h, b - 0.25 * (a - c) * shift));
        }
    }
    out
}

/// Least-squares slope of `y` against `x`.
pub fn slope(x: &[f64], y: &[f64]) -> f64 {
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let sxx: f64 = x.iter().map(|a| (a - mx) * (a - mx)).sum();
    sxy / sxx
}
