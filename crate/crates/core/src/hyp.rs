//! Scalar hyperbolic trigonometry, `SL(2,R)` matrices, cross ratios and
//! quadrilateral moduli.
//!
//! Everything here is a pure function on `f64`. Failures come back as
//! [`Error`] values; no function returns NaN.

use core::cmp::Ordering;
use core::f64::consts::PI;
use core::ops::Mul;

use libm::{acosh, asinh, atan, cosh, exp, fabs, fma, log, sinh, sqrt};

use crate::error::{Error, Result};

/// Traces this close to ±2 still count as parabolic.
pub const PARABOLIC_SLACK: f64 = 1e-12;

/// A 2×2 real matrix, normally of determinant one.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Mat2 {
    pub a: f64,
    pub b: f64,
    pub c: f64,
    pub d: f64,
}

impl Mat2 {
    pub const IDENTITY: Mat2 = Mat2::new(1.0, 0.0, 0.0, 1.0);

    /// Rotation by a quarter turn about `i`: `z ↦ -1/z`.
    pub const QUARTER_TURN: Mat2 = Mat2::new(0.0, -1.0, 1.0, 0.0);

    pub const fn new(a: f64, b: f64, c: f64, d: f64) -> Self {
        Mat2 { a, b, c, d }
    }

    /// Translation by `t` along the imaginary axis (towards ∞ when `t > 0`).
    pub fn axial(t: f64) -> Self {
        let h = exp(t / 2.0);
        Mat2::new(h, 0.0, 0.0, 1.0 / h)
    }

    /// Determinant via Kahan's compensated 2×2 formula.
    pub fn det(&self) -> f64 {
        let w = self.b * self.c;
        let e = fma(-self.b, self.c, w);
        fma(self.a, self.d, -w) + e
    }

    pub fn trace(&self) -> f64 {
        self.a + self.d
    }

    /// Inverse of a determinant-one matrix.
    pub fn inv(&self) -> Self {
        let det = self.det();
        Mat2::new(self.d / det, -self.b / det, -self.c / det, self.a / det)
    }

    pub fn conj(&self, g: &Mat2) -> Self {
        *g * *self * g.inv()
    }

    pub fn pow(&self, k: i64) -> Self {
        let mut base = if k < 0 { self.inv() } else { *self };
        let mut n = k.unsigned_abs();
        let mut out = Mat2::IDENTITY;
        while n > 0 {
            if n & 1 == 1 {
                out = out * base;
            }
            base = base * base;
            n >>= 1;
        }
        out
    }

    pub fn neg(&self) -> Self {
        Mat2::new(-self.a, -self.b, -self.c, -self.d)
    }

    /// Rescale to determinant one.
    pub fn normalized(&self) -> Result<Self> {
        let det = self.det();
        if !(det > 0.0) {
            return Err(Error::BadDeterminant(det));
        }
        let s = sqrt(det);
        Ok(Mat2::new(self.a / s, self.b / s, self.c / s, self.d / s))
    }

    /// `tr² − 4` evaluated as `(a − d)² + 4bc`, which keeps its relative accuracy
    /// for nearly diagonal matrices of short translation length.
    pub fn discriminant(&self) -> f64 {
        let diff = self.a - self.d;
        diff * diff + 4.0 * self.b * self.c
    }

    /// Translation length `2·arccosh(|tr|/2)`.
    pub fn translation_length(&self) -> Result<f64> {
        let tr = self.trace();
        if fabs(tr) < 2.0 - PARABOLIC_SLACK {
            return Err(Error::EllipticElement(tr));
        }
        let disc = self.discriminant();
        if disc <= 0.0 {
            return Ok(0.0);
        }
        Ok(2.0 * asinh(sqrt(disc) / 2.0))
    }

    /// Fixed points on the real line `(repelling, attracting)` of a hyperbolic element.
    /// `None` stands for ∞.
    pub fn fixed_points(&self) -> Option<(Option<f64>, Option<f64>)> {
        let disc = self.discriminant();
        if disc <= 0.0 {
            return None;
        }
        let root = sqrt(disc);
        // Attracting eigenvector has eigenvalue of larger modulus.
        let sign = if self.trace() >= 0.0 { 1.0 } else { -1.0 };
        let lam_big = (self.trace() + sign * root) / 2.0;
        let lam_small = (self.trace() - sign * root) / 2.0;
        let fix = |lam: f64| -> Option<f64> {
            // (a − λ) z + b = 0 or c z + (d − λ) = 0 for the eigenvector (z, 1).
            if fabs(self.c) > 1e-300 {
                Some((lam - self.d) / self.c)
            } else if fabs(self.a - lam) > 1e-300 {
                Some(-self.b / (self.a - lam))
            } else {
                None
            }
        };
        if fabs(self.c) <= 1e-300 {
            // Upper triangular: one fixed point is ∞.
            let finite = -self.b / (self.a - self.d);
            return if fabs(self.a) > fabs(self.d) {
                Some((Some(finite), None))
            } else {
                Some((None, Some(finite)))
            };
        }
        Some((fix(lam_small), fix(lam_big)))
    }

    /// Möbius action on a point of the upper half plane given as `(x, y)`.
    pub fn act(&self, x: f64, y: f64) -> (f64, f64) {
        // (a z + b) / (c z + d) with z = x + iy.
        let nr = self.a * x + self.b;
        let ni = self.a * y;
        let dr = self.c * x + self.d;
        let di = self.c * y;
        let den = dr * dr + di * di;
        ((nr * dr + ni * di) / den, (ni * dr - nr * di) / den)
    }
}

impl Mul for Mat2 {
    type Output = Mat2;

    fn mul(self, o: Mat2) -> Mat2 {
        Mat2::new(
            self.a * o.a + self.b * o.c,
            self.a * o.b + self.b * o.d,
            self.c * o.a + self.d * o.c,
            self.c * o.b + self.d * o.d,
        )
    }
}

/// Hyperbolic distance between two points of the upper half plane.
pub fn point_distance(p: (f64, f64), q: (f64, f64)) -> f64 {
    let dx = p.0 - q.0;
    let dy = p.1 - q.1;
    acosh(1.0 + (dx * dx + dy * dy) / (2.0 * p.1 * q.1))
}

/// A point of the extended real line.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ExtendedReal {
    Finite(f64),
    Infinity,
}

impl From<f64> for ExtendedReal {
    fn from(v: f64) -> Self {
        ExtendedReal::Finite(v)
    }
}

impl PartialOrd for ExtendedReal {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        use ExtendedReal::*;
        match (self, other) {
            (Finite(a), Finite(b)) => a.partial_cmp(b),
            (Finite(_), Infinity) => Some(Ordering::Less),
            (Infinity, Finite(_)) => Some(Ordering::Greater),
            (Infinity, Infinity) => Some(Ordering::Equal),
        }
    }
}

impl ExtendedReal {
    /// Image under `z ↦ (pz + q)/(rz + s)`.
    pub fn mobius(self, p: f64, q: f64, r: f64, s: f64) -> ExtendedReal {
        match self {
            ExtendedReal::Infinity => {
                if r == 0.0 {
                    ExtendedReal::Infinity
                } else {
                    ExtendedReal::Finite(p / r)
                }
            }
            ExtendedReal::Finite(z) => {
                let den = r * z + s;
                if den == 0.0 {
                    ExtendedReal::Infinity
                } else {
                    ExtendedReal::Finite((p * z + q) / den)
                }
            }
        }
    }
}

/// Distance between the axes of two hyperbolic elements with disjoint axes.
pub fn axis_distance(p: &Mat2, q: &Mat2) -> Result<f64> {
    let (tp, tq) = (p.trace(), q.trace());
    let den = sqrt(p.discriminant() * q.discriminant());
    if !(den > 0.0) {
        return Err(Error::EllipticElement(if p.discriminant() <= 0.0 { tp } else { tq }));
    }
    let ch = fabs(tp * tq - 2.0 * (*p * *q).trace()) / den;
    Ok(acosh(ch.max(1.0)))
}

/// `2·arccosh(|tr|/2)`, the translation length of a hyperbolic element with the given trace.
pub fn trace_to_length(trace: f64) -> Result<f64> {
    let t = fabs(trace);
    if t < 2.0 - PARABOLIC_SLACK {
        return Err(Error::EllipticElement(trace));
    }
    if t <= 2.0 {
        return Ok(0.0);
    }
    Ok(2.0 * acosh(t / 2.0))
}

/// Half-width of the standard embedded collar about a simple closed geodesic:
/// `arcsinh(1 / sinh(ℓ/2))`.
pub fn collar_half_width(length: f64) -> Result<f64> {
    if !(length > 0.0) {
        return Err(Error::NonPositiveLength(length));
    }
    Ok(asinh(1.0 / sinh(length / 2.0)))
}

/// Distance between the boundary geodesics of lengths `a` and `b` in a pair of
/// pants whose third boundary has length `c`.
pub fn pants_boundary_distance(a: f64, b: f64, c: f64) -> Result<f64> {
    for v in [a, b, c] {
        if !(v > 0.0) {
            return Err(Error::NonPositiveLength(v));
        }
    }
    let num = cosh(c / 2.0) + cosh(a / 2.0) * cosh(b / 2.0);
    let den = sinh(a / 2.0) * sinh(b / 2.0);
    Ok(acosh(num / den))
}

/// `[a, b, c, d] = (a−b)(c−d) / ((a−d)(c−b))`; a factor involving ∞ cancels
/// against its partner.
pub fn cross_ratio(a: ExtendedReal, b: ExtendedReal, c: ExtendedReal, d: ExtendedReal) -> Result<f64> {
    let pts = [a, b, c, d];
    for i in 0..4 {
        for j in (i + 1)..4 {
            if pts[i] == pts[j] {
                return Err(Error::DegenerateQuadruple);
            }
        }
    }
    let diff = |x: ExtendedReal, y: ExtendedReal| -> f64 {
        match (x, y) {
            (ExtendedReal::Finite(x), ExtendedReal::Finite(y)) => x - y,
            _ => 1.0,
        }
    };
    Ok(diff(a, b) * diff(c, d) / (diff(a, d) * diff(c, b)))
}

fn agm(mut a: f64, mut b: f64) -> f64 {
    for _ in 0..64 {
        let next_a = 0.5 * (a + b);
        let next_b = sqrt(a * b);
        if fabs(next_a - next_b) <= 4.0 * f64::EPSILON * next_a {
            return next_a;
        }
        a = next_a;
        b = next_b;
    }
    a
}

/// Complete elliptic integral of the first kind `K(k)` for modulus `k ∈ [0, 1)`,
/// supplied together with the complementary modulus `k' = √(1 − k²)` so callers
/// near `k = 1` can pass an accurate `k'`.
pub fn elliptic_k_complement(k_prime: f64) -> f64 {
    PI / (2.0 * agm(1.0, k_prime))
}

/// `K(k)` by the arithmetic–geometric mean.
pub fn elliptic_k(k: f64) -> f64 {
    elliptic_k_complement(sqrt((1.0 - k) * (1.0 + k)))
}

/// Conformal modulus of the upper half plane with four boundary vertices of
/// cross ratio `cr < 0`, normalized so that `cr = −1` gives 1.
pub fn quad_modulus(cr: f64) -> Result<f64> {
    if !(cr < 0.0) || !cr.is_finite() {
        return Err(Error::OrderViolation(cr));
    }
    let c = -cr;
    // (1−k)²/(4k) = c has roots k, 1/k; take the one in (0, 1).
    let root = 2.0 * sqrt(c * (1.0 + c));
    let inv_k = 1.0 + 2.0 * c + root;
    let k = 1.0 / inv_k;
    let one_minus_k = (2.0 * c + root) / inv_k;
    let k_prime = sqrt(one_minus_k * (1.0 + k));
    let big = elliptic_k_complement(k_prime);
    let small = elliptic_k_complement(k);
    Ok(small / (2.0 * big))
}

/// Ratio of the singular values `σ₁/σ₂` of a real 2×2 matrix given row-major.
pub fn jacobian_dilatation(j: [[f64; 2]; 2]) -> Result<f64> {
    let [[a, b], [c, d]] = j;
    let e = (a + d) / 2.0;
    let f = (a - d) / 2.0;
    let g = (c + b) / 2.0;
    let h = (c - b) / 2.0;
    let q = sqrt(e * e + h * h);
    let r = sqrt(f * f + g * g);
    let big = q + r;
    let small = fabs(q - r);
    if !(small > big * 1e-15) {
        return Err(Error::SingularJacobian);
    }
    Ok(big / small)
}

/// `|log x|`.
pub(crate) fn abs_log(x: f64) -> f64 {
    fabs(log(x))
}

/// Half-angle of the wedge `{π/2 − θ < arg z < π/2 + θ}` that lifts a tubular
/// neighborhood of half-width `w` about the imaginary axis.
pub fn wedge_half_angle(width: f64) -> f64 {
    atan(sinh(width))
}
