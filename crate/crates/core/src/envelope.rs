//! Heat-kernel envelopes and the machinery that propagates them to time
//! derivatives. Every bound is returned as a natural logarithm.

use rayon::prelude::*;

use crate::error::{domain, Error, Result};
use crate::numeric::{Grid2, Integrator, SignedLog};
use crate::oracle::{fd_time_derivative, fd_time_derivative_scaled, radial_derivative_log, Space, H3Kernel};
use crate::rootspace::{ChamberPoint, SpaceModel};

/// `c·t^{−α}(1+t)^{β}(1+‖H‖)^{γ}e^{−Dt−B⟨ρ,H⟩−C‖H‖²/(4t)}`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EnvelopeBound {
    pub alpha: f64,
    pub beta: f64,
    pub gamma_exp: f64,
    pub d_rate: f64,
    pub b_rate: f64,
    pub c_rate: f64,
    pub constant: f64,
}

impl EnvelopeBound {
    pub fn ln_eval(&self, t: f64, h: ChamberPoint) -> f64 {
        self.constant.ln() - self.alpha * t.ln()
            + self.beta * t.ln_1p()
            + self.gamma_exp * h.norm.ln_1p()
            - self.d_rate * t
            - self.b_rate * h.rho_pairing
            - self.c_rate * h.norm * h.norm / (4.0 * t)
    }

    /// The global heat-kernel envelope with `c = 1`.
    pub fn anker(model: &SpaceModel) -> Self {
        Self {
            alpha: 0.5 * model.dimension as f64,
            beta: model.m_exp,
            gamma_exp: model.a_exp,
            d_rate: model.rho_norm.powi(2),
            b_rate: 1.0,
            c_rate: 1.0,
            constant: 1.0,
        }
    }

    /// Envelope of `∂ᵢ_t h_t` at induction step `l`, with `c = 1`.
    pub fn lemma_step(model: &SpaceModel, grid: &BoundGrid, l: usize, i: usize) -> Self {
        let b = grid.beta[l][i];
        Self {
            alpha: 0.5 * model.dimension as f64 + i as f64,
            beta: model.m_exp,
            gamma_exp: model.a_exp,
            d_rate: b * model.rho_norm.powi(2),
            b_rate: b,
            c_rate: grid.gamma[l][i],
            constant: 1.0,
        }
    }
}

fn check_t(t: f64) -> Result<()> {
    if !(t > 0.0) || !t.is_finite() {
        return Err(domain("t", t, "time must be positive and finite"));
    }
    Ok(())
}

fn check_eps(eps: f64) -> Result<()> {
    if !(eps > 0.0 && eps < 1.0) {
        return Err(domain("epsilon", eps, "must lie in (0, 1)"));
    }
    Ok(())
}

/// Sharp rank-one envelope
/// `t^{−n/2}(1+⟨α,H⟩)(1+t+⟨α,H⟩)^{(m_α+m_{2α})/2−1}e^{−‖ρ‖²t−⟨ρ,H⟩−r²/(4t)}` with `c = 1`;
/// the two-sided bracket comes from fitted constants.
pub fn ostellari_envelope(model: &SpaceModel, t: f64, r: f64) -> Result<f64> {
    check_t(t)?;
    if model.rank != 1 || model.roots.len() != 1 {
        return Err(Error::RootSystem("sharp envelope needs a rank-one model".into()));
    }
    if !(r >= 0.0) {
        return Err(domain("r", r, "distance must be nonnegative"));
    }
    let root = &model.roots[0];
    let alpha_h = root.vector[0].abs() * r;
    let exponent = 0.5 * (root.multiplicity + root.double_multiplicity) as f64 - 1.0;
    let n = model.dimension as f64;
    Ok(-0.5 * n * t.ln() + alpha_h.ln_1p() + exponent * (t + alpha_h).ln_1p()
        - model.rho_norm.powi(2) * t
        - model.rho_norm * r
        - r * r / (4.0 * t))
}

/// `t^{−n/2}(1+t)^{m}(1+‖H‖)^{A}e^{−(‖ρ‖²t+⟨ρ,H⟩+‖H‖²/(4t))}` with `c = 1`.
pub fn anker_upper(model: &SpaceModel, t: f64, h: ChamberPoint) -> Result<f64> {
    check_t(t)?;
    Ok(EnvelopeBound::anker(model).ln_eval(t, h))
}

/// `t^{−n/2−i}e^{−(1−ε)(‖ρ‖²t+⟨ρ,H⟩+‖H‖²/(4t))}`.
pub fn theorem1_rhs(model: &SpaceModel, i: usize, t: f64, h: ChamberPoint, epsilon: f64) -> Result<f64> {
    check_t(t)?;
    check_eps(epsilon)?;
    let n = model.dimension as f64;
    let rate = model.rho_norm.powi(2) * t + h.rho_pairing + h.norm * h.norm / (4.0 * t);
    Ok(-(0.5 * n + i as f64) * t.ln() - (1.0 - epsilon) * rate)
}

/// `t^{−(n+1)/2}e^{−(1−ε)(‖ρ‖²t+⟨ρ,H⟩+‖H‖²/(4t))}`.
pub fn gradient_rhs(model: &SpaceModel, t: f64, h: ChamberPoint, epsilon: f64) -> Result<f64> {
    Ok(theorem1_rhs(model, 0, t, h, epsilon)? - 0.5 * t.ln())
}

/// Rates of a pointwise kernel bound on a Cartan–Hadamard manifold.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CartanHadamardParams {
    pub constant: f64,
    pub a: f64,
    pub b: f64,
    pub c: f64,
    pub alpha: f64,
}

/// `c/min{1, t^{α+i}}·e^{−(1−ε)(At+Bd+Cd²/t)}`.
pub fn cartan_hadamard_rhs(p: &CartanHadamardParams, i: usize, t: f64, d: f64, epsilon: f64) -> Result<f64> {
    check_t(t)?;
    check_eps(epsilon)?;
    if !(p.a > 0.0 && p.b > 0.0 && p.c > 0.0 && p.constant > 0.0) {
        return Err(domain("rate", p.a.min(p.b).min(p.c), "rates must be positive"));
    }
    let small = ((p.alpha + i as f64) * t.ln()).min(0.0);
    Ok(p.constant.ln() - small - (1.0 - epsilon) * (p.a * t + p.b * d + p.c * d * d / t))
}

/// One Porper step: from envelopes of `f` and `f''` to an envelope of `f'`.
///
/// `hi` must have `α + 2` and the same `(1+t)` and `(1+‖H‖)` powers as `lo`.
/// The resulting constant is `2c/ε + εc*`.
pub fn porper_step(lo: &EnvelopeBound, hi: &EnvelopeBound, epsilon: f64) -> Result<EnvelopeBound> {
    check_eps(epsilon)?;
    if !(lo.alpha > lo.beta && lo.beta >= 0.0) {
        return Err(domain("alpha", lo.alpha, "need alpha > beta >= 0"));
    }
    if !(lo.d_rate >= hi.d_rate && lo.b_rate >= hi.b_rate && lo.c_rate >= hi.c_rate) {
        return Err(domain("rate", lo.c_rate, "need D >= D*, B >= B*, C >= C*"));
    }
    if hi.alpha != lo.alpha + 2.0 || hi.beta != lo.beta || hi.gamma_exp != lo.gamma_exp {
        return Err(domain("alpha", hi.alpha, "second-derivative envelope must have alpha + 2"));
    }
    let lambda = lambda_eps(epsilon);
    Ok(EnvelopeBound {
        alpha: lo.alpha + 1.0,
        beta: lo.beta,
        gamma_exp: lo.gamma_exp,
        d_rate: 0.5 * (lo.d_rate + hi.d_rate),
        b_rate: 0.5 * (lo.b_rate + hi.b_rate),
        c_rate: 0.5 * (hi.c_rate + lo.c_rate * lambda),
        constant: 2.0 * lo.constant / epsilon + epsilon * hi.constant,
    })
}

/// `λ_ε = (1−ε)/(1+ε)`.
pub fn lambda_eps(epsilon: f64) -> f64 {
    (1.0 - epsilon) / (1.0 + epsilon)
}

/// Inverse of [`lambda_eps`].
pub fn epsilon_for_lambda(lambda: f64) -> f64 {
    (1.0 - lambda) / (1.0 + lambda)
}

/// Rates `β_ℓⁱ`, `γ_ℓⁱ` for `ℓ ≤ l_max`, `i ≤ i_max`, indexed `[ℓ][i]`.
/// Entries are computed in floating point.
#[derive(Debug, Clone, PartialEq)]
pub struct BoundGrid {
    pub epsilon: f64,
    pub lambda_eps: f64,
    pub i_max: usize,
    pub l_max: usize,
    pub beta: Vec<Vec<f64>>,
    pub gamma: Vec<Vec<f64>>,
}

/// Iterates `β_ℓⁱ = ½(β_{ℓ−1}^{i−1} + β_{ℓ−1}^{i+1})` and
/// `γ_ℓⁱ = ½(λ_ε γ_{ℓ−1}^{i−1} + γ_{ℓ−1}^{i+1})` from `β_ℓ⁰ = γ_ℓ⁰ = 1`
/// and zero rates at `ℓ = 0, i ≥ 1`.
pub fn recurrence_grid(epsilon: f64, i_max: usize, l_max: usize) -> Result<BoundGrid> {
    check_eps(epsilon)?;
    let lambda = lambda_eps(epsilon);
    // The i+1 dependence moves the truncation error one cell per step, so a
    // padding of l_max cells keeps every reported cell exact.
    let width = i_max + l_max + 2;
    let mut b = vec![0.0; width];
    let mut g = vec![0.0; width];
    b[0] = 1.0;
    g[0] = 1.0;
    let mut beta = vec![b[..=i_max].to_vec()];
    let mut gamma = vec![g[..=i_max].to_vec()];
    for _ in 1..=l_max {
        let mut nb = vec![0.0; width];
        let mut ng = vec![0.0; width];
        nb[0] = 1.0;
        ng[0] = 1.0;
        for i in 1..width - 1 {
            nb[i] = 0.5 * (b[i - 1] + b[i + 1]);
            ng[i] = 0.5 * (lambda * g[i - 1] + g[i + 1]);
        }
        b = nb;
        g = ng;
        beta.push(b[..=i_max].to_vec());
        gamma.push(g[..=i_max].to_vec());
    }
    Ok(BoundGrid {
        epsilon,
        lambda_eps: lambda,
        i_max,
        l_max,
        beta,
        gamma,
    })
}

/// `lim_ℓ γ_ℓⁱ = (1 − √(1−λ_ε))ⁱ`.
pub fn gamma_limit(epsilon: f64, i: usize) -> f64 {
    (1.0 - (1.0 - lambda_eps(epsilon)).sqrt()).powi(i as i32)
}

/// Profile `f` in the diagonal bound `h_t(x, x) ≤ 1/f(t)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Diagonal {
    /// `f(t) = t^{n/2}(1+t)^{−m}`.
    Model { n: f64, m: f64 },
    /// `f(t) = (4πt)^{3/2}e^{t}`, the exact `H³` diagonal.
    H3Exact,
}

impl Diagonal {
    pub fn for_model(model: &SpaceModel) -> Self {
        Diagonal::Model {
            n: model.dimension as f64,
            m: model.m_exp,
        }
    }

    pub fn f(&self, t: f64) -> f64 {
        match *self {
            Diagonal::Model { n, m } => t.powf(0.5 * n) * (1.0 + t).powf(-m),
            Diagonal::H3Exact => (4.0 * std::f64::consts::PI * t).powf(1.5) * t.exp(),
        }
    }

    /// `f_k(t) = ∫₀ᵗ f_{k−1}`, evaluated as the single integral
    /// `∫₀ᵗ (t−s)^{k−1}/(k−1)!·f(s) ds` with `s = t·u²`.
    pub fn f_k(&self, k: usize, t: f64) -> Result<f64> {
        check_t(t)?;
        if k == 0 {
            return Ok(self.f(t));
        }
        let ln_fact: f64 = (1..k).map(|j| (j as f64).ln()).sum();
        let integrand = |u: f64| {
            let s = t * u * u;
            let w = ((k - 1) as f64 * (t * (1.0 - u * u)).ln() - ln_fact).exp();
            2.0 * t * u * w * self.f(s)
        };
        Ok(Integrator::with_rel_tol(1e-12).integrate(integrand, 0.0, 1.0)?.value)
    }

    /// `t^{n/2+k}(1+t)^{−m}`, the induction lower bound as stated.
    pub fn stated_lower(&self, k: usize, t: f64) -> f64 {
        let (n, m) = self.exponents();
        t.powf(0.5 * n + k as f64) * (1.0 + t).powf(-m)
    }

    /// `t^{n/2+k}·min{1, (1+t)^{−m}}·Γ(n/2+1)/Γ(n/2+k+1)`, which follows
    /// from `f(s) ≥ s^{n/2}·min{1, (1+t)^{−m}}` on `[0, t]`.
    pub fn certified_lower(&self, k: usize, t: f64) -> f64 {
        let (n, m) = self.exponents();
        let prod: f64 = (1..=k).map(|j| 0.5 * n + j as f64).product();
        let scale = match self {
            Diagonal::Model { .. } => (1.0 + t).powf(-m).min(1.0),
            Diagonal::H3Exact => (4.0 * std::f64::consts::PI).powf(1.5),
        };
        t.powf(0.5 * n + k as f64) * scale / prod
    }

    fn exponents(&self) -> (f64, f64) {
        match *self {
            Diagonal::Model { n, m } => (n, m),
            Diagonal::H3Exact => (3.0, 0.0),
        }
    }

    /// `1/√(f(t)·f_{2i}(t))`.
    pub fn bound(&self, i: usize, t: f64) -> Result<f64> {
        if i == 0 {
            return Err(domain("i", 0.0, "derivative order must be at least 1"));
        }
        Ok(1.0 / (self.f(t) * self.f_k(2 * i, t)?).sqrt())
    }
}

/// `|∂ᵢ_t h_t| ≤ 1/√(f·f_{2i})` with `f(t) = t^{n/2}(1+t)^{−m}`.
pub fn grigoryan_bound(model: &SpaceModel, i: usize, t: f64) -> Result<f64> {
    Diagonal::for_model(model).bound(i, t)
}

/// Right-hand side `nR²γ²/(√2(γ−1)) + nγ²/(2t)` of the Li–Yau inequality.
pub fn li_yau_rhs(n: f64, r2: f64, gamma: f64, t: f64) -> f64 {
    n * r2 * gamma * gamma / (std::f64::consts::SQRT_2 * (gamma - 1.0)) + n * gamma * gamma / (2.0 * t)
}

/// RHS − LHS of `‖∇h‖²/h² − γ∂_t h/h ≤ nR²γ²/(√2(γ−1)) + nγ²/(2t)` with
/// `R² = n−1`.
pub fn li_yau_gap(space: Space, t: f64, r: f64, gamma: f64) -> Result<f64> {
    check_t(t)?;
    if !(r >= 0.0) {
        return Err(domain("r", r, "need r >= 0"));
    }
    if !(gamma > 1.0) {
        return Err(domain("gamma", gamma, "need gamma > 1"));
    }
    let n = space.dimension() as f64;
    let (grad_log, dt_log) = match space {
        Space::H3 => {
            let h = crate::oracle::ln_h3(t, r);
            let dr = radial_derivative_log(space, t, r)?;
            let dt = crate::oracle::h3_kernel(t, r, 1)?.log;
            (ratio(dr, h), ratio(dt, h))
        }
        Space::H2 => {
            let h = crate::oracle::h2_kernel(t, r)?.log.ln_abs;
            let dr = radial_derivative_log(space, t, r)?;
            let dt = fd_time_derivative(&crate::oracle::H2Kernel, 1, t, r)?.value;
            (ratio(dr, h), dt / h.exp())
        }
    };
    let lhs = grad_log * grad_log - gamma * dt_log;
    Ok(li_yau_rhs(n, n - 1.0, gamma, t) - lhs)
}

fn ratio(x: SignedLog, ln_h: f64) -> f64 {
    x.sign * (x.ln_abs - ln_h).exp()
}

/// Fitted `c = max oracle/bound` over a set of points, from log values.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConstantFit {
    pub ln_constant: f64,
    pub argmax: usize,
}

impl ConstantFit {
    pub fn constant(&self) -> f64 {
        self.ln_constant.exp()
    }
}

/// Log-ratio above which the bound has the wrong shape.
pub const SHAPE_LIMIT: f64 = 700.0;

/// `max ln|oracle| − ln bound` over `points`. Points where the oracle is
/// exactly zero are skipped.
pub fn fit_constant<B, O>(bound: B, oracle: O, points: &[(f64, f64)]) -> Result<ConstantFit>
where
    B: Fn(f64, f64) -> Result<f64> + Sync,
    O: Fn(f64, f64) -> Result<SignedLog> + Sync,
{
    let ratios: Vec<f64> = points
        .par_iter()
        .map(|&(t, r)| {
            let o = oracle(t, r)?;
            if o.is_zero() {
                return Ok(f64::NEG_INFINITY);
            }
            let b = bound(t, r)?;
            if !b.is_finite() {
                return Err(domain("bound", b, "bound must be positive and finite"));
            }
            Ok(o.ln_abs - b)
        })
        .collect::<Result<Vec<f64>>>()?;
    let mut best = ConstantFit {
        ln_constant: f64::NEG_INFINITY,
        argmax: 0,
    };
    for (k, &q) in ratios.iter().enumerate() {
        if q > best.ln_constant {
            best = ConstantFit {
                ln_constant: q,
                argmax: k,
            };
        }
    }
    if best.ln_constant > SHAPE_LIMIT {
        return Err(Error::ShapeMismatch {
            log_ratio: best.ln_constant,
            index: best.argmax,
        });
    }
    if best.ln_constant == f64::NEG_INFINITY {
        return Err(Error::InsufficientData("oracle vanishes on the whole grid".into()));
    }
    Ok(best)
}

/// Fit on a coarse grid and re-fit on its refinement.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TwoGridFit {
    pub coarse: ConstantFit,
    pub fine: ConstantFit,
}

impl TwoGridFit {
    /// `c_fine / c_coarse`; the coarse constant covers the fine grid within
    /// this factor.
    pub fn stability(&self) -> f64 {
        (self.fine.ln_constant - self.coarse.ln_constant).exp()
    }
}

/// Required agreement between the coarse and refined fits.
pub const STABILITY_LIMIT: f64 = 1.05;

pub fn two_grid_fit<B, O>(bound: B, oracle: O, coarse: &Grid2, factor: usize) -> Result<TwoGridFit>
where
    B: Fn(f64, f64) -> Result<f64> + Sync,
    O: Fn(f64, f64) -> Result<SignedLog> + Sync,
{
    coarse.t.validate()?;
    coarse.r.validate()?;
    let c = fit_constant(&bound, &oracle, &coarse.points())?;
    let f = fit_constant(&bound, &oracle, &coarse.refined(factor).points())?;
    Ok(TwoGridFit { coarse: c, fine: f })
}

/// `∂ᵢ_t h_t(r)` on `H³` cross-checked against finite differences; returns
/// the symbolic value and the relative disagreement (`None` where the
/// difference quotient lost precision).
pub fn h3_derivative_with_check(i: usize, t: f64, r: f64) -> Result<(SignedLog, Option<f64>)> {
    let exact = crate::oracle::h3_kernel(t, r, i)?;
    let check = match fd_time_derivative_scaled(&H3Kernel, i, t, r) {
        Ok(fd) => {
            let reference = exact.log.sign * (exact.log.ln_abs - fd.ln_scale).exp();
            Some((fd.value - reference).abs() / reference.abs())
        }
        Err(Error::PrecisionLoss { .. }) => None,
        Err(e) => return Err(e),
    };
    Ok((exact.log, check))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numeric::Axis;
    use crate::oracle::h3_kernel;
    use crate::rootspace::build_real_hyperbolic;

    #[test]
    fn ostellari_h3_reduces() {
        let m = build_real_hyperbolic(3).unwrap();
        // Middle exponent is zero on H³.
        let v = ostellari_envelope(&m, 1.0, 0.0).unwrap();
        assert!((v - (-1.0)).abs() < 1e-15);
        let v = ostellari_envelope(&m, 2.0, 3.0).unwrap();
        let expected = -1.5 * 2f64.ln() + 4f64.ln() - 2.0 - 3.0 - 9.0 / 8.0;
        assert!((v - expected).abs() < 1e-14);
    }

    #[test]
    fn ostellari_ratio_closed_form() {
        // h/envelope = (4π)^{-3/2}·(r/sinh r)e^{r}/(1+r).
        let m = build_real_hyperbolic(3).unwrap();
        for &(t, r) in &[(0.5, 0.0), (3.0, 7.0), (20.0, 20.0)] {
            let ratio = (h3_kernel(t, r, 0).unwrap().log.ln_abs - ostellari_envelope(&m, t, r).unwrap()).exp();
            let s: f64 = if r == 0.0 { 1.0 } else { 2.0 * r / (1.0 - (-2.0 * r).exp()) };
            let expected = (4.0 * std::f64::consts::PI).powf(-1.5) * s / (1.0 + r);
            assert!((ratio - expected).abs() < 1e-12 * expected);
        }
    }

    #[test]
    fn anker_dominates_ostellari_on_h3() {
        let m = build_real_hyperbolic(3).unwrap();
        for (t, r) in Grid2::new(Axis::log(0.01, 30.0, 20), Axis::linear(0.0, 20.0, 20)).points() {
            let a = anker_upper(&m, t, ChamberPoint::radial(&m, r)).unwrap();
            assert!(a >= ostellari_envelope(&m, t, r).unwrap() - 1e-12);
        }
    }

    #[test]
    fn anker_large_time_rate() {
        let m = build_real_hyperbolic(3).unwrap();
        let h = ChamberPoint::radial(&m, 0.0);
        let slope = anker_upper(&m, 201.0, h).unwrap() - anker_upper(&m, 200.0, h).unwrap();
        assert!((slope + 1.0 + 1.5 * (201f64 / 200.0).ln()).abs() < 1e-12);
    }

    #[test]
    fn theorem1_and_gradient_shapes() {
        let m = build_real_hyperbolic(3).unwrap();
        let h = ChamberPoint::radial(&m, 0.0);
        let v = theorem1_rhs(&m, 1, 2.0, h, 0.1).unwrap();
        assert!((v - (-2.5 * 2f64.ln() - 0.9 * 2.0)).abs() < 1e-14);
        let h = ChamberPoint::radial(&m, 3.0);
        let g = gradient_rhs(&m, 2.0, h, 0.1).unwrap();
        let t1 = theorem1_rhs(&m, 1, 2.0, h, 0.1).unwrap();
        assert!((t1 - g - (-0.5 * 2f64.ln())).abs() < 1e-14);
    }

    #[test]
    fn porper_step_symbolic() {
        let env = EnvelopeBound {
            alpha: 2.5,
            beta: 0.0,
            gamma_exp: 1.0,
            d_rate: 0.5,
            b_rate: 0.5,
            c_rate: 0.8,
            constant: 1.0,
        };
        let hi = EnvelopeBound { alpha: 4.5, ..env };
        let out = porper_step(&env, &hi, 0.1).unwrap();
        assert_eq!(out.alpha, 3.5);
        assert!((out.c_rate - 0.8 * (1.0 + lambda_eps(0.1)) / 2.0).abs() < 1e-15);
        assert!((out.constant - (20.0 + 0.1)).abs() < 1e-12);
        let bad = EnvelopeBound { c_rate: 0.9, ..hi };
        assert!(porper_step(&env, &bad, 0.1).is_err());
        let near = porper_step(&env, &hi, 1e-9).unwrap();
        assert!((near.c_rate - 0.8).abs() < 1e-8);
    }

    #[test]
    fn porper_reproduces_recurrence() {
        let m = build_real_hyperbolic(3).unwrap();
        let g = recurrence_grid(0.1, 5, 6).unwrap();
        for l in 1..=6 {
            for i in 1..=4 {
                let lo = EnvelopeBound::lemma_step(&m, &g, l - 1, i - 1);
                let hi = EnvelopeBound::lemma_step(&m, &g, l - 1, i + 1);
                let out = porper_step(&lo, &hi, 0.1).unwrap();
                let want = EnvelopeBound::lemma_step(&m, &g, l, i);
                assert!((out.b_rate - want.b_rate).abs() < 1e-15);
                assert!((out.d_rate - want.d_rate).abs() < 1e-15);
                assert!((out.c_rate - want.c_rate).abs() < 1e-15);
                assert_eq!(out.alpha, want.alpha);
            }
        }
    }

    #[test]
    fn recurrence_first_cells() {
        let eps = 0.2;
        let g = recurrence_grid(eps, 4, 3).unwrap();
        assert!((g.gamma[1][1] - g.lambda_eps / 2.0).abs() < 1e-16);
        for l in 0..=3 {
            assert_eq!(g.beta[l][0], 1.0);
            assert_eq!(g.gamma[l][0], 1.0);
        }
        for i in 1..=4 {
            assert_eq!(g.beta[0][i], 0.0);
        }
        assert!(recurrence_grid(1.0, 1, 1).is_err());
    }

    #[test]
    fn padding_matches_wider_grid() {
        let a = recurrence_grid(0.3, 3, 40).unwrap();
        let b = recurrence_grid(0.3, 50, 40).unwrap();
        for l in 0..=40 {
            for i in 0..=3 {
                assert_eq!(a.gamma[l][i], b.gamma[l][i]);
                assert_eq!(a.beta[l][i], b.beta[l][i]);
            }
        }
    }

    #[test]
    fn gamma_limit_values() {
        assert_eq!(gamma_limit(0.3, 0), 1.0);
        let eps = epsilon_for_lambda(0.75);
        for i in 0..6 {
            assert!((gamma_limit(eps, i) - 0.5f64.powi(i as i32)).abs() < 1e-15);
        }
        assert!((gamma_limit(1e-12, 3) - 1.0).abs() < 1e-5);
    }

    #[test]
    fn grigoryan_quadrature_matches_closed_form() {
        // n = 2, m = 0: f = t, f_k = t^{k+1}/(k+1)!.
        let d = Diagonal::Model { n: 2.0, m: 0.0 };
        for k in 1..=8 {
            let fact: f64 = (1..=k + 1).map(|j| j as f64).product();
            let want = 2.5f64.powi(k as i32 + 1) / fact;
            assert!((d.f_k(k, 2.5).unwrap() - want).abs() < 1e-12 * want);
        }
    }

    #[test]
    fn grigoryan_exact_diagonal_dominates() {
        let d = Diagonal::H3Exact;
        for t in Axis::log(0.05, 20.0, 12).points() {
            let b1 = d.bound(1, t).unwrap();
            let b2 = d.bound(2, t).unwrap();
            for r in Axis::linear(0.0, 20.0, 12).points() {
                assert!(h3_kernel(t, r, 1).unwrap().value.abs() <= b1);
                assert!(h3_kernel(t, r, 2).unwrap().value.abs() <= b2);
            }
        }
        assert!(d.bound(0, 1.0).is_err());
    }

    #[test]
    fn certified_lower_holds() {
        let m = build_real_hyperbolic(3).unwrap();
        for diag in [Diagonal::for_model(&m), Diagonal::H3Exact, Diagonal::for_model(&build_real_hyperbolic(2).unwrap())] {
            for t in Axis::log(0.01, 30.0, 10).points() {
                for k in 1..=4 {
                    assert!(diag.f_k(k, t).unwrap() >= diag.certified_lower(k, t) * (1.0 - 1e-10));
                }
            }
        }
    }

    #[test]
    fn li_yau_holds_on_h3_grid() {
        for t in Axis::log(0.1, 10.0, 8).points() {
            for r in Axis::linear(0.1, 10.0, 8).points() {
                assert!(li_yau_gap(Space::H3, t, r, 2.0).unwrap() >= 0.0);
            }
        }
        assert!(li_yau_gap(Space::H3, 1.0, 1.0, 1.0).is_err());
    }

    #[test]
    fn li_yau_h2_agrees_in_sign() {
        assert!(li_yau_gap(Space::H2, 1.0, 2.0, 2.0).unwrap() >= 0.0);
    }

    #[test]
    fn fit_constant_identities() {
        let pts = [(1.0, 0.0), (2.0, 1.0)];
        let b = |t: f64, r: f64| Ok(-t - r);
        let same = fit_constant(b, |t, r| Ok(SignedLog::positive(-t - r)), &pts).unwrap();
        assert!((same.constant() - 1.0).abs() < 1e-15);
        let twice = fit_constant(b, |t, r| Ok(SignedLog::positive(-t - r + 2f64.ln())), &pts).unwrap();
        assert!((twice.constant() - 2.0).abs() < 1e-14);
        let wild = fit_constant(b, |_, _| Ok(SignedLog::positive(800.0)), &pts);
        assert!(matches!(wild, Err(Error::ShapeMismatch { .. })));
    }

    #[test]
    fn cartan_hadamard_shape() {
        let p = CartanHadamardParams {
            constant: 2.0,
            a: 1.0,
            b: 1.0,
            c: 0.25,
            alpha: 1.5,
        };
        let v = cartan_hadamard_rhs(&p, 1, 3.0, 2.0, 0.1).unwrap();
        assert!((v - (2f64.ln() - 0.9 * (3.0 + 2.0 + 1.0 / 3.0))).abs() < 1e-14);
        let small = cartan_hadamard_rhs(&p, 0, 0.5, 0.0, 0.1).unwrap();
        assert!((small - (2f64.ln() - 1.5 * 0.5f64.ln() - 0.45)).abs() < 1e-14);
    }
}
