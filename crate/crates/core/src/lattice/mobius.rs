//! Möbius action on the upper half-space `{(z, h) : z ∈ ℂ, h > 0}`.
//! `H²` is the slice `z ∈ ℝ` acted on by real matrices.

use std::ops::Mul;

use num_complex::Complex64;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Point {
    pub z: Complex64,
    pub h: f64,
}

impl Point {
    pub fn new(z: Complex64, h: f64) -> Self {
        Self { z, h }
    }

    /// Point `x + ih` of the upper half-plane.
    pub fn plane(x: f64, h: f64) -> Self {
        Self {
            z: Complex64::new(x, 0.0),
            h,
        }
    }

    /// The point `j = (0, 1)`.
    pub fn j() -> Self {
        Self::plane(0.0, 1.0)
    }
}

/// Geodesic distance, `d = 2 asinh(|p − q|_E / (2√(h_p h_q)))`.
pub fn distance(p: &Point, q: &Point) -> f64 {
    let dz = (p.z - q.z).norm_sqr();
    let dh = p.h - q.h;
    2.0 * ((dz + dh * dh).sqrt() / (2.0 * (p.h * q.h).sqrt())).asinh()
}

/// Distance from `p` to the closed half-ball bounded by the hemisphere of
/// radius `radius` over `centre`; zero inside.
pub fn distance_to_half_ball(p: &Point, centre: Complex64, radius: f64) -> f64 {
    let num = (p.z - centre).norm_sqr() + p.h * p.h - radius * radius;
    if num <= 0.0 {
        0.0
    } else {
        (num / (2.0 * radius * p.h)).asinh()
    }
}

/// `[[a, b], [c, d]]` with determinant 1.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Mobius {
    pub a: Complex64,
    pub b: Complex64,
    pub c: Complex64,
    pub d: Complex64,
}

impl Mobius {
    pub fn new(a: Complex64, b: Complex64, c: Complex64, d: Complex64) -> Self {
        Self { a, b, c, d }
    }

    pub fn real(a: f64, b: f64, c: f64, d: f64) -> Self {
        let r = |x| Complex64::new(x, 0.0);
        Self::new(r(a), r(b), r(c), r(d))
    }

    pub fn identity() -> Self {
        Self::real(1.0, 0.0, 0.0, 1.0)
    }

    /// Hyperbolic translation of length `l` along the vertical geodesic
    /// through `j`.
    pub fn translation(l: f64) -> Self {
        Self::real((0.5 * l).exp(), 0.0, 0.0, (-0.5 * l).exp())
    }

    pub fn det(&self) -> Complex64 {
        self.a * self.d - self.b * self.c
    }

    pub fn trace(&self) -> Complex64 {
        self.a + self.d
    }

    pub fn inverse(&self) -> Self {
        Self::new(self.d, -self.b, -self.c, self.a)
    }

    pub fn is_real(&self) -> bool {
        [self.a, self.b, self.c, self.d].iter().all(|x| x.im == 0.0)
    }

    /// Translation length `2 ln |λ|` with `λ` the larger eigenvalue.
    pub fn translation_length(&self) -> f64 {
        let half = self.trace() * 0.5;
        let root = (half * half - 1.0).sqrt();
        let l1 = (half + root).norm();
        let l2 = (half - root).norm();
        2.0 * l1.max(l2).ln()
    }

    /// Loxodromic (including hyperbolic): trace not in the real interval [−2, 2].
    pub fn is_loxodromic(&self) -> bool {
        let tr = self.trace();
        let tol = 1e-12 * tr.norm().max(1.0);
        !(tr.im.abs() <= tol && tr.re.abs() <= 2.0 + tol)
    }

    /// Isometric circle `|cz + d| = 1` as (centre, radius); `None` when `c = 0`.
    pub fn isometric_circle(&self) -> Option<(Complex64, f64)> {
        if self.c.norm() == 0.0 {
            return None;
        }
        Some((-self.d / self.c, 1.0 / self.c.norm()))
    }

    pub fn act(&self, p: &Point) -> Point {
        let cz_d = self.c * p.z + self.d;
        let h2 = p.h * p.h;
        let denom = cz_d.norm_sqr() + self.c.norm_sqr() * h2;
        let z = ((self.a * p.z + self.b) * cz_d.conj() + self.a * self.c.conj() * h2) / denom;
        Point { z, h: p.h / denom }
    }
}

impl Mul for Mobius {
    type Output = Mobius;

    fn mul(self, o: Mobius) -> Mobius {
        Mobius::new(
            self.a * o.a + self.b * o.c,
            self.a * o.b + self.b * o.d,
            self.c * o.a + self.d * o.c,
            self.c * o.b + self.d * o.d,
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn translation_moves_along_axis() {
        let g = Mobius::translation(2.0);
        let p = g.act(&Point::j());
        assert!((distance(&Point::j(), &p) - 2.0).abs() < 1e-14);
        assert!((g.translation_length() - 2.0).abs() < 1e-14);
        assert!(g.is_loxodromic());
    }

    #[test]
    fn action_is_an_isometry() {
        let i = Complex64::i();
        let g = Mobius::new(1.0 + i, 2.0 * i, 0.5 + 0.0 * i, 0.0 * i);
        let s = g.det().sqrt();
        let g = Mobius::new(g.a / s, g.b / s, g.c / s, g.d / s);
        let p = Point::new(Complex64::new(0.3, -1.0), 0.7);
        let q = Point::new(Complex64::new(-2.0, 0.4), 2.5);
        let d0 = distance(&p, &q);
        let d1 = distance(&g.act(&p), &g.act(&q));
        assert!((d0 - d1).abs() < 1e-12);
        let back = g.inverse().act(&g.act(&p));
        assert!((back.z - p.z).norm() < 1e-12 && (back.h - p.h).abs() < 1e-12);
        let composed = (g * g).act(&p);
        let twice = g.act(&g.act(&p));
        assert!(distance(&composed, &twice) < 1e-10);
    }

    #[test]
    fn plane_action_matches_fractional_linear() {
        let g = Mobius::real(2.0, 1.0, 1.0, 1.0);
        let w = Complex64::new(0.4, 1.3);
        let expected = (w * 2.0 + 1.0) / (w + 1.0);
        let p = g.act(&Point::plane(w.re, w.im));
        assert!((p.z.re - expected.re).abs() < 1e-14);
        assert!(p.z.im.abs() < 1e-15);
        assert!((p.h - expected.im).abs() < 1e-14);
    }

    #[test]
    fn half_ball_distance() {
        let c = Complex64::new(0.0, 0.0);
        assert_eq!(distance_to_half_ball(&Point::plane(0.0, 0.5), c, 1.0), 0.0);
        // Along the vertical axis the hemisphere of radius 1 is at height 1.
        let d = distance_to_half_ball(&Point::plane(0.0, 3.0), c, 1.0);
        assert!((d - 3f64.ln()).abs() < 1e-14);
    }

    #[test]
    fn parabolic_and_elliptic_are_not_loxodromic() {
        assert!(!Mobius::real(1.0, 1.0, 0.0, 1.0).is_loxodromic());
        let (s, c) = 0.3f64.sin_cos();
        assert!(!Mobius::real(c, -s, s, c).is_loxodromic());
    }
}
