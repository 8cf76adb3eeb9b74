//! Heat kernels of `H²` and `H³` at curvature −1: closed form on `H³`,
//! one-dimensional quadrature on `H²`, their time and radial derivatives, a
//! finite-difference cross-check, and orbit sums on quotients.

use std::cell::RefCell;
use std::f64::consts::{LN_2, PI};
use std::fmt;
use std::str::FromStr;

use crate::error::{domain, Error, Result};
use crate::lattice::{CountingBound, OrbitSet};
use crate::numeric::logspace::{coth_minus_inv, ln_r_over_sinh};
use crate::numeric::{richardson_derivative, FdEstimate, Integrator, SignedLog};
use crate::rootspace::{build_real_hyperbolic, SpaceModel};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Space {
    H2,
    H3,
}

impl Space {
    pub fn dimension(self) -> usize {
        match self {
            Space::H2 => 2,
            Space::H3 => 3,
        }
    }

    pub fn model(self) -> SpaceModel {
        build_real_hyperbolic(self.dimension()).expect("dimension is at least 2")
    }
}

impl fmt::Display for Space {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Space::H2 => "h2",
            Space::H3 => "h3",
        })
    }
}

impl FromStr for Space {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "h2" => Ok(Space::H2),
            "h3" => Ok(Space::H3),
            _ => Err(Error::Config {
                line: 0,
                message: format!("unknown space `{s}` (expected h2 or h3)"),
            }),
        }
    }
}

/// `∂ᵢh_t/∂tⁱ` at geodesic distance `r`, held both as a float and in
/// log-space (the float underflows to zero far out).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KernelEval {
    pub t: f64,
    pub r: f64,
    pub order: usize,
    pub value: f64,
    pub log: SignedLog,
}

impl KernelEval {
    fn new(t: f64, r: f64, order: usize, log: SignedLog) -> Self {
        Self {
            t,
            r,
            order,
            value: log.to_f64(),
            log,
        }
    }
}

fn check_tr(t: f64, r: f64) -> Result<()> {
    if !(t > 0.0) || !t.is_finite() {
        return Err(domain("t", t, "time must be positive and finite"));
    }
    if !(r >= 0.0) || !r.is_finite() {
        return Err(domain("r", r, "distance must be nonnegative and finite"));
    }
    Ok(())
}

/// `ln h_t(r)` on `H³`.
pub fn ln_h3(t: f64, r: f64) -> f64 {
    -1.5 * (4.0 * PI * t).ln() + ln_r_over_sinh(r) - t - r * r / (4.0 * t)
}

/// `∂_t ln h_t` and `∂²_t ln h_t` on `H³`.
fn h3_log_derivatives(t: f64, r: f64) -> (f64, f64) {
    let r2 = r * r;
    let g1 = -1.5 / t - 1.0 + r2 / (4.0 * t * t);
    let g2 = 1.5 / (t * t) - r2 / (2.0 * t * t * t);
    (g1, g2)
}

/// Closed-form `H³` kernel and its first two time derivatives.
pub fn h3_kernel(t: f64, r: f64, order: usize) -> Result<KernelEval> {
    check_tr(t, r)?;
    let ln_h = ln_h3(t, r);
    let (g1, g2) = h3_log_derivatives(t, r);
    let log = match order {
        0 => SignedLog::positive(ln_h),
        1 => SignedLog::scaled(ln_h, g1),
        2 => SignedLog::scaled(ln_h, g1 * g1 + g2),
        _ => return Err(domain("order", order as f64, "closed-form derivatives stop at order 2")),
    };
    Ok(KernelEval::new(t, r, order, log))
}

const H2_REL_TOL: f64 = 1e-9;
/// Tighter tolerance used when kernel values feed finite differences.
const H2_FD_REL_TOL: f64 = 1e-13;

/// `u / √sinh(u²/2)` without underflow near zero.
fn u_over_sqrt_sinh(u: f64) -> f64 {
    let x = 0.5 * u * u;
    if x < 1e-6 {
        std::f64::consts::SQRT_2 * (1.0 - x * x / 12.0)
    } else {
        u / x.sinh().sqrt()
    }
}

/// `ln h_t(r)` on `H²` from the substituted integral.
fn ln_h2_with(t: f64, r: f64, integrator: &Integrator) -> Result<f64> {
    // s = r + u²; the factors e^{-r²/4t} and e^{-r/2} are pulled out.
    let integrand = |u: f64| {
        let u2 = u * u;
        let gauss = (-(2.0 * r * u2 + u2 * u2) / (4.0 * t) - 0.25 * u2).exp();
        let tail = (-(-2.0 * r - u2).exp_m1()).sqrt();
        if tail == 0.0 {
            // r = 0 and u = 0: the integrand's limit is 0.
            return 0.0;
        }
        2.0 * (r + u2) * gauss * u_over_sqrt_sinh(u) / tail
    };
    // The exponent reaches 745 at u² = q solving q²/4t + q(r/2t + 1/4) = 745.
    let b = r / (2.0 * t) + 0.25;
    let c = 745.0;
    let a = 1.0 / (4.0 * t);
    let q = (-b + (b * b + 4.0 * a * c).sqrt()) / (2.0 * a);
    let upper = q.sqrt();
    // Break points at the width of the Gaussian in u so the peak is resolved.
    let width = 1.0 / (b + a.sqrt()).sqrt();
    let mut cuts = vec![0.0];
    let mut x = width;
    while x < upper {
        cuts.push(x);
        x *= 4.0;
    }
    cuts.push(upper);
    let mut total = 0.0;
    for w in cuts.windows(2) {
        total += integrator.integrate(integrand, w[0], w[1])?.value;
    }
    if !(total > 0.0) {
        return Err(Error::Quadrature {
            value: total,
            error: f64::NAN,
            intervals: 0,
        });
    }
    Ok(0.5 * LN_2 - 1.5 * (4.0 * PI * t).ln() - 0.25 * t - r * r / (4.0 * t) - 0.5 * r + total.ln())
}

/// `H²` kernel by quadrature, relative tolerance `1e-9`.
pub fn h2_kernel(t: f64, r: f64) -> Result<KernelEval> {
    check_tr(t, r)?;
    let ln_h = ln_h2_with(t, r, &Integrator::with_rel_tol(H2_REL_TOL))?;
    Ok(KernelEval::new(t, r, 0, SignedLog::positive(ln_h)))
}

/// A heat kernel given by `ln h_t(r)`.
pub trait RadialKernel: Sync {
    fn ln_kernel(&self, t: f64, r: f64) -> Result<f64>;
}

#[derive(Debug, Clone, Copy, Default)]
pub struct H3Kernel;

impl RadialKernel for H3Kernel {
    fn ln_kernel(&self, t: f64, r: f64) -> Result<f64> {
        check_tr(t, r)?;
        Ok(ln_h3(t, r))
    }
}

/// `H²` kernel at the tight tolerance needed by finite differences.
#[derive(Debug, Clone, Copy, Default)]
pub struct H2Kernel;

impl RadialKernel for H2Kernel {
    fn ln_kernel(&self, t: f64, r: f64) -> Result<f64> {
        check_tr(t, r)?;
        ln_h2_with(t, r, &Integrator::with_rel_tol(H2_FD_REL_TOL))
    }
}

/// Wraps `ln f(t, r)` given as a closure.
pub struct FnKernel<F>(pub F);

impl<F: Fn(f64, f64) -> f64 + Sync> RadialKernel for FnKernel<F> {
    fn ln_kernel(&self, t: f64, r: f64) -> Result<f64> {
        Ok((self.0)(t, r))
    }
}

pub fn kernel_for(space: Space) -> &'static dyn RadialKernel {
    match space {
        Space::H2 => &H2Kernel,
        Space::H3 => &H3Kernel,
    }
}

/// `h_t(r)` on either space.
pub fn heat_kernel(space: Space, t: f64, r: f64) -> Result<KernelEval> {
    match space {
        Space::H2 => h2_kernel(t, r),
        Space::H3 => h3_kernel(t, r, 0),
    }
}

/// Differentiates `g ↦ exp(ln k(g) − ln k(x0))` so that the stencil works
/// on values of order one, then rescales.
fn normalized_derivative<G>(ln_k: G, x0: f64, order: usize, h: f64) -> Result<(f64, FdEstimate)>
where
    G: Fn(f64) -> Result<f64>,
{
    let base = ln_k(x0)?;
    let failure: RefCell<Option<Error>> = RefCell::new(None);
    let f = |x: f64| match ln_k(x) {
        Ok(v) => (v - base).exp(),
        Err(e) => {
            failure.borrow_mut().get_or_insert(e);
            f64::NAN
        }
    };
    let est = richardson_derivative(f, x0, order, h);
    if let Some(e) = failure.into_inner() {
        return Err(e);
    }
    Ok((base, est))
}

const FD_REL_LIMIT: f64 = 1e-5;

/// Finite-difference derivative expressed relative to `k(t, r)`:
/// the derivative equals `e^{ln_scale}·value` with error `e^{ln_scale}·error`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScaledFd {
    pub ln_scale: f64,
    pub value: f64,
    pub error: f64,
}

impl ScaledFd {
    pub fn log(&self) -> SignedLog {
        SignedLog::scaled(self.ln_scale, self.value)
    }
}

/// `i`-th time derivative by Richardson-extrapolated central differences,
/// kept in scaled form so that far-out kernels do not underflow.
/// The base step is `1e-3·t` for `i ≤ 2` and `1e-2·t` for `i ∈ {3, 4}`.
pub fn fd_time_derivative_scaled(kernel: &dyn RadialKernel, i: usize, t: f64, r: f64) -> Result<ScaledFd> {
    check_tr(t, r)?;
    if i > 4 {
        return Err(domain("order", i as f64, "finite differences stop at order 4"));
    }
    let h = if i <= 2 { 1e-3 * t } else { 1e-2 * t };
    let (base, est) = normalized_derivative(|s| kernel.ln_kernel(s, r), t, i, h)?;
    if !est.value.is_finite() || est.error > FD_REL_LIMIT * est.value.abs() {
        let scale = base.exp();
        return Err(Error::PrecisionLoss {
            value: est.value * scale,
            error: est.error * scale,
        });
    }
    Ok(ScaledFd {
        ln_scale: base,
        value: est.value,
        error: est.error,
    })
}

/// [`fd_time_derivative_scaled`] as a plain float.
pub fn fd_time_derivative(kernel: &dyn RadialKernel, i: usize, t: f64, r: f64) -> Result<FdEstimate> {
    let s = fd_time_derivative_scaled(kernel, i, t, r)?;
    let scale = s.ln_scale.exp();
    Ok(FdEstimate {
        value: s.value * scale,
        error: s.error * scale,
    })
}

/// `∂_r h_t(r)` with sign, in log-space.
pub fn radial_derivative_log(space: Space, t: f64, r: f64) -> Result<SignedLog> {
    check_tr(t, r)?;
    match space {
        Space::H3 => {
            let slope = -r / (2.0 * t) - coth_minus_inv(r);
            Ok(SignedLog::scaled(ln_h3(t, r), slope))
        }
        Space::H2 => {
            if r == 0.0 {
                return Err(domain("r", r, "finite-difference gradient needs r > 0"));
            }
            // Stencil reaches r ± 2h.
            let h = (1e-5 * r.max(1.0)).min(r / 4.0);
            let (base, est) = normalized_derivative(|s| H2Kernel.ln_kernel(t, s), r, 1, h)?;
            Ok(SignedLog::scaled(base, est.value))
        }
    }
}

/// `|∂_r h_t(r)|`, which equals `‖∇h_t‖` for a radial kernel.
pub fn radial_gradient(space: Space, t: f64, r: f64) -> Result<f64> {
    Ok(radial_derivative_log(space, t, r)?.to_f64().abs())
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuotientKernelEval {
    pub value: f64,
    pub terms_used: usize,
    pub truncation_bound: f64,
}

/// Majorant of `|∂ᵢ_t h_t(d)| / h_t(d)` on `H³`, increasing in `d`.
fn h3_derivative_majorant(i: usize, t: f64, d: f64) -> f64 {
    let p1 = 1.5 / t + 1.0 + d * d / (4.0 * t * t);
    match i {
        0 => 1.0,
        1 => p1,
        _ => p1 * p1 + 1.5 / (t * t) + d * d / (2.0 * t * t * t),
    }
}

const MAX_SHELLS: usize = 1_000_000;

/// `∂ᵢ_t h_t^M(x̃, ỹ) = Σ_γ ∂ᵢ_t h_t(d(x, γy))` over the orbit points with
/// `d ≤ r_cut`. The remainder is bounded shell by shell on
/// `[r_cut+k, r_cut+k+1]` by `c·e^{δ(r_cut+k+1)}` points, each at most the
/// kernel majorant at the inner radius.
///
/// On `H²` only `i = 0` is available, and the majorant uses the `H³`-free
/// bound `h_t(d) ≤ h_t(d_lo)` (the kernel is radially decreasing).
pub fn quotient_kernel(
    orbit: &OrbitSet,
    counting: &CountingBound,
    space: Space,
    t: f64,
    i: usize,
    r_cut: f64,
) -> Result<QuotientKernelEval> {
    check_tr(t, 0.0)?;
    if space == Space::H2 && i > 0 {
        return Err(domain("order", i as f64, "quotients of H2 support order 0 only"));
    }
    if i > 2 {
        return Err(domain("order", i as f64, "closed-form derivatives stop at order 2"));
    }
    if r_cut > orbit.r_max {
        return Err(Error::OutsideCertifiedRange {
            radius: r_cut,
            certified: orbit.r_max,
        });
    }
    if let Some(first) = orbit.points.first() {
        if r_cut < first.distance {
            return Err(domain("r_cut", r_cut, "cutoff must exceed d_M(x, y)"));
        }
    }
    let mut value = 0.0;
    let mut terms = 0;
    for p in orbit.points.iter().take_while(|p| p.distance <= r_cut) {
        let k = match space {
            Space::H3 => h3_kernel(t, p.distance, i)?.value,
            Space::H2 => h2_kernel(t, p.distance)?.value,
        };
        value += k;
        terms += 1;
    }
    if orbit.is_exhaustive() {
        return Ok(QuotientKernelEval {
            value,
            terms_used: terms,
            truncation_bound: 0.0,
        });
    }
    let mut tail = 0.0;
    let mut converged = false;
    for k in 0..MAX_SHELLS {
        let lo = r_cut + k as f64;
        let hi = lo + 1.0;
        let ln_count = counting.constant.ln() + counting.delta * hi;
        let ln_kernel = match space {
            Space::H3 => ln_h3(t, lo) + h3_derivative_majorant(i, t, hi).ln(),
            Space::H2 => ln_h2_with(t, lo, &Integrator::with_rel_tol(H2_REL_TOL))?,
        };
        let term = (ln_count + ln_kernel).exp();
        tail += term;
        // Past the peak of the shell terms, stop once they are negligible.
        let decreasing = hi * hi / (4.0 * t) > (counting.delta + 1.0) * hi;
        if decreasing && term <= 1e-17 * tail.max(f64::MIN_POSITIVE) {
            converged = true;
            break;
        }
        if tail.is_infinite() {
            break;
        }
    }
    if !converged {
        return Err(Error::TailDiverges(format!(
            "shell sum beyond R = {r_cut} did not settle (delta = {})",
            counting.delta
        )));
    }
    Ok(QuotientKernelEval {
        value,
        terms_used: terms,
        truncation_bound: tail,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rel(a: f64, b: f64) -> f64 {
        (a - b).abs() / b.abs()
    }

    #[test]
    fn h3_value_at_origin() {
        let v = h3_kernel(1.0, 0.0, 0).unwrap().value;
        let expected = (4.0 * PI).powf(-1.5) * (-1f64).exp();
        assert!(rel(v, expected) < 1e-14);
        assert!((v - 8.26e-3).abs() < 1e-5);
        let near = h3_kernel(1.0, 1e-9, 0).unwrap().value;
        assert!(rel(near, v) < 1e-14);
    }

    #[test]
    fn h3_domain_errors() {
        assert!(h3_kernel(0.0, 1.0, 0).is_err());
        assert!(h3_kernel(1.0, -1.0, 0).is_err());
        assert!(h3_kernel(1.0, 1.0, 3).is_err());
    }

    #[test]
    fn h3_symbolic_matches_finite_differences() {
        for &(t, r) in &[(1.0, 2.0), (0.3, 0.7), (5.0, 4.0), (2.0, 0.0)] {
            for i in 1..=2 {
                let exact = h3_kernel(t, r, i).unwrap().value;
                let fd = fd_time_derivative(&H3Kernel, i, t, r).unwrap();
                assert!(rel(fd.value, exact) < 1e-8, "t={t} r={r} i={i}");
            }
        }
    }

    #[test]
    fn fd_identity_and_known_function() {
        let e = FnKernel(|t: f64, _r: f64| -t);
        let d0 = fd_time_derivative(&e, 0, 1.0, 0.0).unwrap();
        assert!(rel(d0.value, (-1f64).exp()) < 1e-15);
        let d2 = fd_time_derivative(&e, 2, 1.0, 0.0).unwrap();
        assert!((d2.value - (-1f64).exp()).abs() < 1e-9);
        let d4 = fd_time_derivative(&e, 4, 1.0, 0.0).unwrap();
        assert!(rel(d4.value, (-1f64).exp()) < 1e-5);
        assert!(fd_time_derivative(&e, 5, 1.0, 0.0).is_err());
    }

    #[test]
    fn h3_total_mass_is_one() {
        for &t in &[0.5, 1.0, 2.0] {
            let q = Integrator::with_rel_tol(1e-12)
                .integrate_to_infinity(
                    |r| {
                        let s = if r == 0.0 { 0.0 } else { r.sinh() };
                        h3_kernel(t, r, 0).unwrap().value * 4.0 * PI * s * s
                    },
                    0.0,
                )
                .unwrap();
            assert!((q.value - 1.0).abs() < 1e-8, "t={t}: {}", q.value);
        }
    }

    #[test]
    fn h3_solves_heat_equation() {
        // ∂_t h = ∂_rr h + 2 coth r ∂_r h, Laplacian by differences of the exact ∂_r.
        for k in 0..6 {
            for j in 0..6 {
                let t = 0.5 + 0.9 * k as f64;
                let r = 0.5 + 0.9 * j as f64;
                let dr = |s: f64| radial_derivative_log(Space::H3, t, s).unwrap().to_f64();
                let drr = richardson_derivative(dr, r, 1, 1e-3).value;
                let lap = drr + 2.0 / r.tanh() * dr(r);
                let dt = h3_kernel(t, r, 1).unwrap().value;
                assert!(rel(lap, dt) < 1e-5, "t={t} r={r}: {lap} vs {dt}");
            }
        }
    }

    #[test]
    fn h3_gradient_properties() {
        let fd = richardson_derivative(|s| h3_kernel(1.0, s, 0).unwrap().value, 2.0, 1, 1e-3);
        let exact = radial_derivative_log(Space::H3, 1.0, 2.0).unwrap().to_f64();
        assert!(rel(fd.value, exact) < 1e-7);
        let small = radial_gradient(Space::H3, 1.0, 1e-4).unwrap();
        assert!(small < 1e-4 * 0.1);
        for k in 0..10 {
            for j in 0..10 {
                let t = 0.1 + k as f64 * 1.1;
                let r = 0.5 + j as f64 * 2.1;
                assert!(radial_derivative_log(Space::H3, t, r).unwrap().sign < 0.0);
            }
        }
    }

    #[test]
    fn h2_total_mass_is_one() {
        for &t in &[0.5, 1.0, 2.0] {
            let q = Integrator::with_rel_tol(1e-10)
                .integrate_to_infinity(
                    |r| {
                        if r == 0.0 {
                            return 0.0;
                        }
                        h2_kernel(t, r).unwrap().value * 2.0 * PI * r.sinh()
                    },
                    0.0,
                )
                .unwrap();
            assert!((q.value - 1.0).abs() < 1e-8, "t={t}: {}", q.value);
        }
    }

    #[test]
    fn h2_euclidean_limit() {
        let t = 1e-3;
        let v = h2_kernel(t, 0.0).unwrap().value * 4.0 * PI * t;
        assert!((v - 1.0).abs() < 1e-3, "{v}");
    }

    #[test]
    fn h2_far_out_stays_finite_in_log() {
        let k = h2_kernel(0.05, 40.0).unwrap();
        assert!(k.log.ln_abs.is_finite());
        assert!(k.log.ln_abs < -7000.0);
    }

    #[test]
    fn h2_solves_heat_equation() {
        // ∂_t h = ∂_rr h + coth r ∂_r h on H².
        for &(t, r) in &[(0.7, 0.8), (2.0, 3.0), (1.0, 5.0)] {
            let dt = fd_time_derivative(&H2Kernel, 1, t, r).unwrap().value;
            let d_r = |s: f64| radial_derivative_log(Space::H2, t, s).unwrap().to_f64();
            let drr = richardson_derivative(d_r, r, 1, 1e-2).value;
            let lap = drr + d_r(r) / r.tanh();
            assert!(rel(lap, dt) < 1e-4, "t={t} r={r}: {lap} vs {dt}");
        }
    }

    fn h3_quotient_points(s: f64) -> (crate::lattice::Point, crate::lattice::Point) {
        // y = (tanh s, sech s) sits at distance s from j, orthogonally to the axis.
        use num_complex::Complex64;
        let x = crate::lattice::Point::j();
        let y = crate::lattice::Point::new(Complex64::new(s.tanh(), 0.0), 1.0 / s.cosh());
        (x, y)
    }

    #[test]
    fn quotient_trivial_group_is_kernel() {
        use crate::lattice::{enumerate_orbit, CountingBound, GroupSpec};
        let (x, y) = h3_quotient_points(1.3);
        let o = enumerate_orbit(&GroupSpec::trivial(3).unwrap(), x, y, 5.0).unwrap();
        let q = quotient_kernel(&o, &CountingBound::finite(&o), Space::H3, 0.7, 0, 5.0).unwrap();
        assert_eq!(q.terms_used, 1);
        assert_eq!(q.truncation_bound, 0.0);
        assert!(rel(q.value, h3_kernel(0.7, 1.3, 0).unwrap().value) < 1e-12);
    }

    #[test]
    fn quotient_cyclic_tail_and_symmetry() {
        use crate::lattice::{enumerate_orbit, CountingBound, GroupSpec};
        let g = GroupSpec::cyclic_translation(3, 2.0).unwrap();
        let (x, y) = h3_quotient_points(0.8);
        let o = enumerate_orbit(&g, x, y, 40.0).unwrap();
        let count = CountingBound::fit(&o, 0.05).unwrap();
        for i in 0..=1 {
            let a = quotient_kernel(&o, &count, Space::H3, 3.0, i, 10.0).unwrap();
            let b = quotient_kernel(&o, &count, Space::H3, 3.0, i, 20.0).unwrap();
            assert!((a.value - b.value).abs() <= a.truncation_bound);
            assert!(b.truncation_bound < a.truncation_bound);
            let o2 = enumerate_orbit(&g, y, x, 40.0).unwrap();
            let c = quotient_kernel(&o2, &count, Space::H3, 3.0, i, 20.0).unwrap();
            assert!((c.value - b.value).abs() <= 1e-12 * b.value.abs());
        }
        assert!(quotient_kernel(&o, &count, Space::H2, 1.0, 1, 10.0).is_err());
        assert!(quotient_kernel(&o, &count, Space::H3, 1.0, 0, 50.0).is_err());
    }

    #[test]
    fn space_parsing() {
        assert_eq!("H3".parse::<Space>().unwrap(), Space::H3);
        assert!("h4".parse::<Space>().is_err());
        assert_eq!(Space::H2.to_string(), "h2");
    }
}
