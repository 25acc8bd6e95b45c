//! Fixed-size complex 2-vectors and 2×2 matrices.
//!
//! Everything in this crate lives in a two-dimensional state space, so the
//! handful of operations needed are spelled out by hand instead of going
//! through a general dense linear-algebra backend.

use std::ops::{Add, Index, IndexMut, Mul, Sub};

use num_complex::Complex64;

pub type C64 = Complex64;

pub const ZERO: C64 = C64::new(0.0, 0.0);
pub const ONE: C64 = C64::new(1.0, 0.0);
pub const I: C64 = C64::new(0.0, 1.0);

/// A column vector (ket) with two complex components.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Vec2(pub [C64; 2]);

impl Vec2 {
    pub const fn new(a: C64, b: C64) -> Self {
        Vec2([a, b])
    }

    pub fn real(a: f64, b: f64) -> Self {
        Vec2([C64::new(a, 0.0), C64::new(b, 0.0)])
    }

    pub fn basis(k: usize) -> Self {
        let mut v = Vec2::default();
        v.0[k] = ONE;
        v
    }

    /// Inner product ⟨self|other⟩, antilinear in `self`.
    pub fn dot(&self, other: &Vec2) -> C64 {
        self.0[0].conj() * other.0[0] + self.0[1].conj() * other.0[1]
    }

    pub fn norm_sqr(&self) -> f64 {
        self.0[0].norm_sqr() + self.0[1].norm_sqr()
    }

    pub fn norm(&self) -> f64 {
        self.norm_sqr().sqrt()
    }

    pub fn scale(&self, s: C64) -> Vec2 {
        Vec2([self.0[0] * s, self.0[1] * s])
    }

    pub fn conj(&self) -> Vec2 {
        Vec2([self.0[0].conj(), self.0[1].conj()])
    }

    pub fn is_finite(&self) -> bool {
        self.0.iter().all(|c| c.re.is_finite() && c.im.is_finite())
    }

    /// Unit-norm copy with the first non-negligible component rotated onto
    /// the positive real axis. Returns `None` for the zero vector.
    pub fn normalized_gauge(&self) -> Option<Vec2> {
        let n = self.norm();
        if !(n > 0.0) || !n.is_finite() {
            return None;
        }
        let v = self.scale(C64::new(1.0 / n, 0.0));
        // "nonzero" relative to the unit norm; anything at roundoff level is
        // treated as zero so the gauge does not jump on noise.
        let k = if v.0[0].norm() > 1e-14 { 0 } else { 1 };
        let phase = v.0[k].conj() / v.0[k].norm();
        let mut out = v.scale(phase);
        out.0[k] = C64::new(out.0[k].norm(), 0.0);
        Some(out)
    }
}

impl Index<usize> for Vec2 {
    type Output = C64;
    fn index(&self, i: usize) -> &C64 {
        &self.0[i]
    }
}

impl IndexMut<usize> for Vec2 {
    fn index_mut(&mut self, i: usize) -> &mut C64 {
        &mut self.0[i]
    }
}

impl Add for Vec2 {
    type Output = Vec2;
    fn add(self, rhs: Vec2) -> Vec2 {
        Vec2([self.0[0] + rhs.0[0], self.0[1] + rhs.0[1]])
    }
}

impl Sub for Vec2 {
    type Output = Vec2;
    fn sub(self, rhs: Vec2) -> Vec2 {
        Vec2([self.0[0] - rhs.0[0], self.0[1] - rhs.0[1]])
    }
}

impl Mul<C64> for Vec2 {
    type Output = Vec2;
    fn mul(self, s: C64) -> Vec2 {
        self.scale(s)
    }
}

/// Row-major 2×2 complex matrix.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Mat2(pub [[C64; 2]; 2]);

impl Mat2 {
    pub const fn new(a: C64, b: C64, c: C64, d: C64) -> Self {
        Mat2([[a, b], [c, d]])
    }

    pub fn identity() -> Self {
        Mat2([[ONE, ZERO], [ZERO, ONE]])
    }

    pub fn diag(a: C64, b: C64) -> Self {
        Mat2([[a, ZERO], [ZERO, b]])
    }

    /// Matrix whose columns are `c0` and `c1`.
    pub fn from_columns(c0: Vec2, c1: Vec2) -> Self {
        Mat2([[c0[0], c1[0]], [c0[1], c1[1]]])
    }

    pub fn column(&self, j: usize) -> Vec2 {
        Vec2([self.0[0][j], self.0[1][j]])
    }

    pub fn row(&self, i: usize) -> Vec2 {
        Vec2(self.0[i])
    }

    pub fn trace(&self) -> C64 {
        self.0[0][0] + self.0[1][1]
    }

    pub fn det(&self) -> C64 {
        self.0[0][0] * self.0[1][1] - self.0[0][1] * self.0[1][0]
    }

    pub fn adjoint(&self) -> Mat2 {
        let m = &self.0;
        Mat2([[m[0][0].conj(), m[1][0].conj()], [m[0][1].conj(), m[1][1].conj()]])
    }

    pub fn inverse(&self) -> Option<Mat2> {
        let d = self.det();
        if d == ZERO || !d.is_finite() {
            return None;
        }
        let m = &self.0;
        let r = d.inv();
        Some(Mat2([
            [m[1][1] * r, -m[0][1] * r],
            [-m[1][0] * r, m[0][0] * r],
        ]))
    }

    pub fn scale(&self, s: C64) -> Mat2 {
        let m = &self.0;
        Mat2([[m[0][0] * s, m[0][1] * s], [m[1][0] * s, m[1][1] * s]])
    }

    pub fn mul_vec(&self, v: &Vec2) -> Vec2 {
        let m = &self.0;
        Vec2([
            m[0][0] * v[0] + m[0][1] * v[1],
            m[1][0] * v[0] + m[1][1] * v[1],
        ])
    }

    /// Frobenius norm.
    pub fn norm(&self) -> f64 {
        self.0.iter().flatten().map(|c| c.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn is_finite(&self) -> bool {
        self.0.iter().flatten().all(|c| c.is_finite())
    }

    /// ⟨a|M|b⟩.
    pub fn sandwich(&self, a: &Vec2, b: &Vec2) -> C64 {
        a.dot(&self.mul_vec(b))
    }
}

impl Index<(usize, usize)> for Mat2 {
    type Output = C64;
    fn index(&self, (i, j): (usize, usize)) -> &C64 {
        &self.0[i][j]
    }
}

impl Mul for Mat2 {
    type Output = Mat2;
    fn mul(self, b: Mat2) -> Mat2 {
        let a = &self.0;
        let b = &b.0;
        Mat2([
            [
                a[0][0] * b[0][0] + a[0][1] * b[1][0],
                a[0][0] * b[0][1] + a[0][1] * b[1][1],
            ],
            [
                a[1][0] * b[0][0] + a[1][1] * b[1][0],
                a[1][0] * b[0][1] + a[1][1] * b[1][1],
            ],
        ])
    }
}

impl Mul<Vec2> for Mat2 {
    type Output = Vec2;
    fn mul(self, v: Vec2) -> Vec2 {
        self.mul_vec(&v)
    }
}

impl Add for Mat2 {
    type Output = Mat2;
    fn add(self, b: Mat2) -> Mat2 {
        let a = &self.0;
        let b = &b.0;
        Mat2([
            [a[0][0] + b[0][0], a[0][1] + b[0][1]],
            [a[1][0] + b[1][0], a[1][1] + b[1][1]],
        ])
    }
}

impl Sub for Mat2 {
    type Output = Mat2;
    fn sub(self, b: Mat2) -> Mat2 {
        let a = &self.0;
        let b = &b.0;
        Mat2([
            [a[0][0] - b[0][0], a[0][1] - b[0][1]],
            [a[1][0] - b[1][0], a[1][1] - b[1][1]],
        ])
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    #[test]
    fn product_matches_hand_computation() {
        let i = c(1.0, 2.0);
        let a = Mat2::new(i, i + 1.0, i + 2.0, i + 3.0);
        let b = Mat2::new(i * 2.0, i * 3.0, i * 4.0, i * 5.0);
        let p = a * b;
        let expected = [c(-14.0, 32.0), c(-19.0, 42.0), c(-2.0, 56.0), c(-3.0, 74.0)];
        for (got, want) in p.0.iter().flatten().zip(expected.iter()) {
            assert!((got - want).norm() < 1e-12);
        }
    }

    #[test]
    fn inverse_roundtrip() {
        let a = Mat2::new(c(0.3, -1.0), c(2.0, 0.5), c(-0.7, 0.1), c(1.1, 1.1));
        let p = a * a.inverse().unwrap();
        assert!((p - Mat2::identity()).norm() < 1e-14);
        assert!(Mat2::default().inverse().is_none());
    }

    #[test]
    fn dot_is_antilinear_in_bra() {
        let a = Vec2::new(c(0.0, 1.0), ZERO);
        let b = Vec2::new(ONE, ZERO);
        assert_eq!(a.dot(&b), c(0.0, -1.0));
        assert_eq!(b.dot(&a), c(0.0, 1.0));
    }

    #[test]
    fn gauge_fixing() {
        let v = Vec2::new(c(0.0, -3.0), c(4.0, 0.0)).normalized_gauge().unwrap();
        assert!((v.norm() - 1.0).abs() < 1e-15);
        assert_eq!(v[0].im, 0.0);
        assert!(v[0].re > 0.0);
        assert!((v[1] - c(0.0, 0.8)).norm() < 1e-15);

        let w = Vec2::new(ZERO, c(0.0, 2.0)).normalized_gauge().unwrap();
        assert_eq!(w, Vec2::basis(1));
        assert!(Vec2::default().normalized_gauge().is_none());
    }
}
